//! Per-model hyper-parameters found by oracle tuning in the reference
//! simulation study, usable as fixed configurations.

use serde::{Deserialize, Serialize};

use super::models::ModelName;
use crate::config::{EtConfig, GrowerConfig, IntfConfig, MtryMode, RfConfig, RsrfConfig};

/// The five contenders of the simulation study; `RsrfFixed` is RSRF with
/// shared coordinate subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contender {
    Rsrf,
    RsrfFixed,
    Intf,
    Rf,
    Et,
}

impl Contender {
    pub const ALL: [Contender; 5] = [
        Contender::Intf,
        Contender::Rsrf,
        Contender::RsrfFixed,
        Contender::Rf,
        Contender::Et,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Contender::Rsrf => "rsrf",
            Contender::RsrfFixed => "rsrf_af",
            Contender::Intf => "intf",
            Contender::Rf => "rf",
            Contender::Et => "et",
        }
    }
}

fn column(model: ModelName, d: usize) -> Option<usize> {
    match (model, d) {
        (ModelName::Pure3, 6) => Some(0),
        (ModelName::Pure3, _) => None,
        (_, 4) => Some(0),
        (_, 10) => Some(1),
        (_, 30) => Some(2),
        _ => None,
    }
}

fn row(model: ModelName) -> usize {
    match model {
        ModelName::PureType => 0,
        ModelName::Hierarchical => 1,
        ModelName::Additive => 2,
        ModelName::Pure2 => 3,
        ModelName::Pure3 => 4,
    }
}

// Per model (pure_type, hierarchical, additive, pure_2, pure_3) and d (4, 10, 30; pure_3 only d = 6).
// RSRF: (include_cartcart, replace, width, mtry_cart_cart, mtry_random_cart, min_node_size)
type RsrfRow = (bool, bool, usize, usize, usize, usize);
const RSRF: [[RsrfRow; 3]; 5] = [
    [(false, true, 15, 0, 3, 16), (true, true, 15, 6, 9, 10), (true, true, 30, 22, 30, 5)],
    [(false, false, 12, 0, 2, 5), (true, false, 14, 7, 10, 12), (true, true, 29, 23, 26, 15)],
    [(false, true, 12, 0, 2, 14), (true, true, 15, 2, 8, 11), (true, true, 16, 24, 24, 8)],
    [(false, true, 13, 0, 4, 23), (false, true, 15, 0, 10, 13), (false, false, 25, 0, 30, 22)],
    [(false, true, 9, 0, 4, 5); 3],
];
// RSRF fixed mode: (include_cartcart, replace, width, mtry_random, mtry_random_cart, min_node_size)
const RSRF_FIXED: [[RsrfRow; 3]; 5] = [
    [(false, true, 8, 3, 4, 14), (true, true, 12, 9, 8, 5), (true, false, 28, 26, 26, 6)],
    [(false, true, 11, 4, 3, 10), (true, true, 14, 8, 9, 11), (true, false, 24, 19, 30, 17)],
    [(false, true, 14, 4, 2, 12), (false, true, 12, 9, 10, 7), (true, true, 12, 22, 26, 30)],
    [(false, true, 3, 4, 2, 20), (false, false, 13, 8, 10, 13), (false, true, 24, 24, 28, 29)],
    [(false, false, 15, 5, 4, 9); 3],
];
// INTF: (npairs, replace, min_node_size)
const INTF: [[(usize, bool, usize); 3]; 5] = [
    [(14, true, 20), (153, false, 11), (749, false, 11)],
    [(7, false, 10), (110, false, 8), (450, false, 17)],
    [(23, true, 13), (33, false, 14), (99, false, 18)],
    [(2, false, 16), (151, false, 26), (30, false, 28)],
    [(99, true, 22); 3],
];
// RF: (mtry, replace, min_node_size)
const RF: [[(usize, bool, usize); 3]; 5] = [
    [(4, true, 5), (10, false, 5), (30, false, 7)],
    [(3, true, 8), (6, true, 6), (9, true, 12)],
    [(2, true, 5), (7, true, 15), (26, true, 18)],
    [(2, true, 10), (5, true, 8), (20, true, 30)],
    [(5, true, 6); 3],
];
// ET: (mtry, num_random_splits, replace, min_node_size)
const ET: [[(usize, usize, bool, usize); 3]; 5] = [
    [(4, 3, false, 12), (9, 3, false, 5), (29, 6, false, 5)],
    [(3, 3, false, 8), (9, 3, false, 5), (29, 9, false, 9)],
    [(3, 5, true, 6), (7, 3, false, 10), (29, 3, false, 16)],
    [(2, 1, false, 10), (7, 1, true, 6), (28, 1, true, 15)],
    [(1, 5, false, 5); 3],
];

/// Tuned configuration for `contender` on `model` with `d` features, if one
/// was reported. RSRF variants use 100 trees, the others 500.
pub fn opt_config(model: ModelName, d: usize, contender: Contender) -> Option<GrowerConfig> {
    let (r, c) = (row(model), column(model, d)?);
    Some(match contender {
        Contender::Rsrf => {
            let (cc, replace, width, mcc, mrc, node) = RSRF[r][c];
            GrowerConfig::Rsrf(RsrfConfig {
                include_cartcart: cc,
                mtry_cart_cart: cc.then_some(mcc),
                replace,
                min_node_size: node,
                ..RsrfConfig::new(width, mrc)
            })
        }
        Contender::RsrfFixed => {
            let (cc, replace, width, mr, mrc, node) = RSRF_FIXED[r][c];
            GrowerConfig::Rsrf(RsrfConfig {
                include_cartcart: cc,
                mtry_mode: MtryMode::Fixed,
                mtry_random: Some(mr),
                replace,
                min_node_size: node,
                ..RsrfConfig::new(width, mrc)
            })
        }
        Contender::Intf => {
            let (npairs, replace, node) = INTF[r][c];
            GrowerConfig::Intf(IntfConfig {
                replace,
                min_node_size: node,
                ..IntfConfig::new(npairs)
            })
        }
        Contender::Rf => {
            let (mtry, replace, node) = RF[r][c];
            GrowerConfig::Rf(RfConfig {
                replace,
                min_node_size: node,
                ..RfConfig::new(mtry)
            })
        }
        Contender::Et => {
            let (mtry, nrs, replace, node) = ET[r][c];
            GrowerConfig::Et(EtConfig {
                replace,
                min_node_size: node,
                sample_fraction: Some(1.0),
                ..EtConfig::new(mtry, nrs)
            })
        }
    })
}
