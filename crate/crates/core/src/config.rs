//! Per-algorithm hyperparameters.
//!
//! Plain-text config keys follow the usual R package spellings:
//! `mtry`, `min.node.size`, `num.trees`, `replace`, `sample.fraction`,
//! `num.random.splits`, `npairs`, `width`, `include_cartcart`, `mtrymode`,
//! `mtry_random`, `mtry_random_cart`, `mtry_cart_cart`, `depth`.
//! Underscore and dot spellings are interchangeable (`min_nodesize` is also
//! accepted).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default subsample fraction when sampling without replacement.
pub const SUBSAMPLE_FRACTION: f64 = 0.632;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rf,
    Et,
    Intf,
    Rsrf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Intf, Algorithm::Rsrf, Algorithm::Rf, Algorithm::Et];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rf => "rf",
            Algorithm::Et => "et",
            Algorithm::Intf => "intf",
            Algorithm::Rsrf => "rsrf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rf" => Some(Algorithm::Rf),
            "et" => Some(Algorithm::Et),
            "intf" => Some(Algorithm::Intf),
            "rsrf" => Some(Algorithm::Rsrf),
            _ => None,
        }
    }

    /// Defaults with every mtry-like parameter set to `d`.
    pub fn default_config(self, d: usize) -> GrowerConfig {
        match self {
            Algorithm::Rf => GrowerConfig::Rf(RfConfig::new(d)),
            Algorithm::Et => GrowerConfig::Et(EtConfig::new(d, 1)),
            Algorithm::Intf => GrowerConfig::Intf(IntfConfig::new(d.max(2) * (d.max(2) - 1) / 2)),
            Algorithm::Rsrf => GrowerConfig::Rsrf(RsrfConfig::new(10, d)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfConfig {
    pub mtry: usize,
    pub min_node_size: usize,
    pub num_trees: usize,
    pub replace: bool,
    pub sample_fraction: Option<f64>,
}

impl RfConfig {
    pub fn new(mtry: usize) -> Self {
        Self {
            mtry,
            min_node_size: 5,
            num_trees: 500,
            replace: true,
            sample_fraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtConfig {
    pub mtry: usize,
    pub num_random_splits: usize,
    pub min_node_size: usize,
    pub num_trees: usize,
    pub replace: bool,
    pub sample_fraction: Option<f64>,
}

impl EtConfig {
    pub fn new(mtry: usize, num_random_splits: usize) -> Self {
        Self {
            mtry,
            num_random_splits,
            min_node_size: 5,
            num_trees: 500,
            replace: false,
            sample_fraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntfConfig {
    pub npairs: usize,
    pub min_node_size: usize,
    pub num_trees: usize,
    pub replace: bool,
    pub sample_fraction: Option<f64>,
}

impl IntfConfig {
    pub fn new(npairs: usize) -> Self {
        Self {
            npairs,
            min_node_size: 5,
            num_trees: 500,
            replace: true,
            sample_fraction: None,
        }
    }
}

/// Whether coordinate subsets are shared by all candidates of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MtryMode {
    Fixed,
    NotFixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsrfConfig {
    pub width: usize,
    pub include_cartcart: bool,
    pub mtry_mode: MtryMode,
    /// Fixed mode only: size of the subset the first (random) split draws from.
    pub mtry_random: Option<usize>,
    pub mtry_random_cart: usize,
    /// Not-fixed mode only; `None` means all coordinates.
    pub mtry_cart_cart: Option<usize>,
    pub min_node_size: usize,
    pub num_trees: usize,
    pub replace: bool,
    pub sample_fraction: Option<f64>,
    /// Random-split levels plus one CART level; cells split into at most `2^depth` pieces.
    pub depth: usize,
}

impl RsrfConfig {
    pub fn new(width: usize, mtry_random_cart: usize) -> Self {
        Self {
            width,
            include_cartcart: false,
            mtry_mode: MtryMode::NotFixed,
            mtry_random: None,
            mtry_random_cart,
            mtry_cart_cart: None,
            min_node_size: 5,
            num_trees: 100,
            replace: true,
            sample_fraction: None,
            depth: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum GrowerConfig {
    Rf(RfConfig),
    Et(EtConfig),
    Intf(IntfConfig),
    Rsrf(RsrfConfig),
}

macro_rules! common {
    ($self:ident, $field:ident) => {
        match $self {
            GrowerConfig::Rf(c) => c.$field,
            GrowerConfig::Et(c) => c.$field,
            GrowerConfig::Intf(c) => c.$field,
            GrowerConfig::Rsrf(c) => c.$field,
        }
    };
}

macro_rules! common_mut {
    ($self:expr, $field:ident) => {
        match $self {
            GrowerConfig::Rf(c) => &mut c.$field,
            GrowerConfig::Et(c) => &mut c.$field,
            GrowerConfig::Intf(c) => &mut c.$field,
            GrowerConfig::Rsrf(c) => &mut c.$field,
        }
    };
}

fn check_mtry(field: &str, value: usize, d: usize) -> Result<()> {
    if value == 0 || value > d {
        return Err(Error::config(field, format!("must be in [1, {d}], got {value}")));
    }
    Ok(())
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "t" | "yes" | "1" => Ok(true),
        "false" | "f" | "no" | "0" => Ok(false),
        _ => Err(Error::config(key, format!("expected true/false, got `{value}`"))),
    }
}

/// Normalise a config key: lower case, dots and dashes become underscores.
pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace(['.', '-'], "_")
}

impl GrowerConfig {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            GrowerConfig::Rf(_) => Algorithm::Rf,
            GrowerConfig::Et(_) => Algorithm::Et,
            GrowerConfig::Intf(_) => Algorithm::Intf,
            GrowerConfig::Rsrf(_) => Algorithm::Rsrf,
        }
    }

    pub fn num_trees(&self) -> usize {
        common!(self, num_trees)
    }

    pub fn min_node_size(&self) -> usize {
        common!(self, min_node_size)
    }

    pub fn replace(&self) -> bool {
        common!(self, replace)
    }

    /// Fraction of `n` drawn per tree. Bootstrap draws `n` rows; subsampling
    /// draws 63.2% of them, except for Extra Trees which then uses every row.
    pub fn sample_fraction(&self) -> f64 {
        common!(self, sample_fraction).unwrap_or(match self {
            GrowerConfig::Et(_) => 1.0,
            _ if self.replace() => 1.0,
            _ => SUBSAMPLE_FRACTION,
        })
    }

    pub fn with_num_trees(mut self, num_trees: usize) -> Self {
        *common_mut!(&mut self, num_trees) = num_trees;
        self
    }

    pub fn with_min_node_size(mut self, min_node_size: usize) -> Self {
        *common_mut!(&mut self, min_node_size) = min_node_size;
        self
    }

    pub fn with_replace(mut self, replace: bool) -> Self {
        *common_mut!(&mut self, replace) = replace;
        self
    }

    /// Check every field against the number of features `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        if self.num_trees() == 0 {
            return Err(Error::config("num.trees", "must be at least 1"));
        }
        if self.min_node_size() == 0 {
            return Err(Error::config("min.node.size", "must be at least 1"));
        }
        if let Some(f) = common!(self, sample_fraction) {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::config("sample.fraction", format!("must be in (0, 1], got {f}")));
            }
        }
        match self {
            GrowerConfig::Rf(c) => check_mtry("mtry", c.mtry, d),
            GrowerConfig::Et(c) => {
                check_mtry("mtry", c.mtry, d)?;
                if c.num_random_splits == 0 {
                    return Err(Error::config("num.random.splits", "must be at least 1"));
                }
                Ok(())
            }
            GrowerConfig::Intf(c) => {
                if c.npairs == 0 {
                    return Err(Error::config("npairs", "must be at least 1"));
                }
                if d < 2 {
                    return Err(Error::config("npairs", "variable pairs need at least 2 features"));
                }
                Ok(())
            }
            GrowerConfig::Rsrf(c) => {
                if c.width == 0 {
                    return Err(Error::config("width", "must be at least 1"));
                }
                if c.depth < 2 {
                    return Err(Error::config("depth", "must be at least 2"));
                }
                check_mtry("mtry_random_cart", c.mtry_random_cart, d)?;
                match c.mtry_mode {
                    MtryMode::Fixed => {
                        match c.mtry_random {
                            Some(m) => check_mtry("mtry_random", m, d)?,
                            None => {
                                return Err(Error::config("mtry_random", "required when mtrymode is fixed"))
                            }
                        }
                        if c.mtry_cart_cart.is_some() {
                            return Err(Error::config(
                                "mtry_cart_cart",
                                "not available when mtrymode is fixed",
                            ));
                        }
                    }
                    MtryMode::NotFixed => {
                        if c.mtry_random.is_some() {
                            return Err(Error::config(
                                "mtry_random",
                                "not available when mtrymode is not_fixed",
                            ));
                        }
                        if let Some(m) = c.mtry_cart_cart {
                            check_mtry("mtry_cart_cart", m, d)?;
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Apply one `key = value` setting. Unknown or inapplicable keys are errors.
    pub fn apply_setting(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize_key(key);
        let v = value.trim();
        match key.as_str() {
            "num_trees" => *common_mut!(self, num_trees) = parse_usize(&key, v)?,
            "min_node_size" | "min_nodesize" => *common_mut!(self, min_node_size) = parse_usize(&key, v)?,
            "replace" => *common_mut!(self, replace) = parse_bool(&key, v)?,
            "sample_fraction" => {
                let f: f64 = v
                    .parse()
                    .map_err(|_| Error::config("sample.fraction", format!("expected a number, got `{v}`")))?;
                *common_mut!(self, sample_fraction) = Some(f);
            }
            _ => return self.apply_specific(&key, v),
        }
        Ok(())
    }

    fn apply_specific(&mut self, key: &str, v: &str) -> Result<()> {
        let unknown = || {
            Error::config(
                key,
                format!("not a parameter of {}", self.algorithm().name()),
            )
        };
        match (self.clone(), key) {
            (GrowerConfig::Rf(mut c), "mtry") => {
                c.mtry = parse_usize(key, v)?;
                *self = GrowerConfig::Rf(c);
            }
            (GrowerConfig::Et(mut c), "mtry") => {
                c.mtry = parse_usize(key, v)?;
                *self = GrowerConfig::Et(c);
            }
            (GrowerConfig::Et(mut c), "num_random_splits") => {
                c.num_random_splits = parse_usize(key, v)?;
                *self = GrowerConfig::Et(c);
            }
            (GrowerConfig::Intf(mut c), "npairs") => {
                c.npairs = parse_usize(key, v)?;
                *self = GrowerConfig::Intf(c);
            }
            (GrowerConfig::Rsrf(mut c), k) => {
                match k {
                    "width" => c.width = parse_usize(k, v)?,
                    "include_cartcart" => c.include_cartcart = parse_bool(k, v)?,
                    "mtrymode" | "mtry_mode" => {
                        c.mtry_mode = match normalize_key(v).as_str() {
                            "fixed" => MtryMode::Fixed,
                            "not_fixed" => MtryMode::NotFixed,
                            _ => return Err(Error::config(k, format!("expected fixed or not-fixed, got `{v}`"))),
                        }
                    }
                    "mtry_random" => c.mtry_random = optional_usize(k, v)?,
                    "mtry_random_cart" => c.mtry_random_cart = parse_usize(k, v)?,
                    "mtry_cart_cart" => c.mtry_cart_cart = optional_usize(k, v)?,
                    "depth" => c.depth = parse_usize(k, v)?,
                    _ => return Err(unknown()),
                }
                *self = GrowerConfig::Rsrf(c);
            }
            _ => return Err(unknown()),
        }
        Ok(())
    }

    /// Effective settings in config-file spelling, for reports.
    pub fn describe(&self) -> String {
        let fraction = self.sample_fraction();
        let common = format!(
            "min.node.size={} replace={} sample.fraction={} num.trees={}",
            self.min_node_size(),
            self.replace(),
            fraction,
            self.num_trees()
        );
        let specific = match self {
            GrowerConfig::Rf(c) => format!("mtry={}", c.mtry),
            GrowerConfig::Et(c) => format!("mtry={} num.random.splits={}", c.mtry, c.num_random_splits),
            GrowerConfig::Intf(c) => format!("npairs={}", c.npairs),
            GrowerConfig::Rsrf(c) => {
                let mut s = format!(
                    "width={} include_cartcart={} mtrymode={} mtry_random_cart={}",
                    c.width,
                    c.include_cartcart,
                    match c.mtry_mode {
                        MtryMode::Fixed => "fixed",
                        MtryMode::NotFixed => "not-fixed",
                    },
                    c.mtry_random_cart
                );
                if let Some(m) = c.mtry_random {
                    s.push_str(&format!(" mtry_random={m}"));
                }
                if let Some(m) = c.mtry_cart_cart {
                    s.push_str(&format!(" mtry_cart_cart={m}"));
                }
                if c.depth != 2 {
                    s.push_str(&format!(" depth={}", c.depth));
                }
                s
            }
        };
        format!("{specific} {common}")
    }
}

impl GrowerConfig {
    /// `key = value` lines, starting with `algorithm`, that
    /// [`GrowerConfig::from_settings`] reads back.
    pub fn to_kv(&self) -> String {
        let mut out = format!("algorithm = {}\n", self.algorithm().name());
        for pair in self.describe().split_whitespace() {
            if let Some((k, v)) = pair.split_once('=') {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    /// Starts from `algorithm.default_config(d)` and applies `settings` in
    /// order. An `algorithm` key, if present, must agree.
    pub fn from_settings<'a>(
        algorithm: Algorithm,
        d: usize,
        settings: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        let mut cfg = algorithm.default_config(d);
        for (k, v) in settings {
            if normalize_key(k) == "algorithm" {
                if Algorithm::parse(v) != Some(algorithm) {
                    return Err(Error::config("algorithm", format!("expected {algorithm}, got `{v}`")));
                }
                continue;
            }
            cfg.apply_setting(k, v)?;
        }
        Ok(cfg)
    }
}

fn optional_usize(key: &str, v: &str) -> Result<Option<usize>> {
    if v == "-" || v.eq_ignore_ascii_case("none") || v.is_empty() {
        Ok(None)
    } else {
        parse_usize(key, v).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let cfgs = [
            GrowerConfig::Rsrf(RsrfConfig {
                mtry_mode: MtryMode::Fixed,
                mtry_random: Some(3),
                include_cartcart: true,
                replace: false,
                depth: 3,
                ..RsrfConfig::new(7, 2)
            }),
            GrowerConfig::Et(EtConfig::new(2, 4)),
            GrowerConfig::Intf(IntfConfig::new(17)),
            GrowerConfig::Rf(RfConfig::new(1)),
        ];
        for cfg in cfgs {
            let text = cfg.to_kv();
            let pairs: Vec<(String, String)> = text
                .lines()
                .map(|l| {
                    let (k, v) = l.split_once('=').unwrap();
                    (k.trim().to_string(), v.trim().to_string())
                })
                .collect();
            let back = GrowerConfig::from_settings(
                cfg.algorithm(),
                6,
                pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())),
            )
            .unwrap();
            // sample_fraction becomes explicit on the way back
            assert_eq!(back.describe(), cfg.describe());
            assert_eq!(back.algorithm(), cfg.algorithm());
        }
        assert!(GrowerConfig::from_settings(Algorithm::Rf, 3, [("algorithm", "et")]).is_err());
    }

    #[test]
    fn fraction_defaults() {
        let rf = GrowerConfig::Rf(RfConfig::new(2));
        assert_eq!(rf.sample_fraction(), 1.0);
        assert_eq!(rf.clone().with_replace(false).sample_fraction(), SUBSAMPLE_FRACTION);
        let et = GrowerConfig::Et(EtConfig::new(1, 5));
        assert_eq!(et.sample_fraction(), 1.0);
    }

    #[test]
    fn validation_names_field() {
        let err = GrowerConfig::Rf(RfConfig::new(7)).validate(6).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { ref field, .. } if field == "mtry"));

        let mut c = RsrfConfig::new(5, 2);
        c.mtry_mode = MtryMode::Fixed;
        let err = GrowerConfig::Rsrf(c.clone()).validate(4).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { ref field, .. } if field == "mtry_random"));
        c.mtry_random = Some(2);
        c.mtry_cart_cart = Some(2);
        let err = GrowerConfig::Rsrf(c).validate(4).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { ref field, .. } if field == "mtry_cart_cart"));

        let mut c = RsrfConfig::new(5, 2);
        c.mtry_random = Some(1);
        assert!(GrowerConfig::Rsrf(c).validate(4).is_err());

        assert!(GrowerConfig::Intf(IntfConfig::new(3)).validate(1).is_err());
        assert!(GrowerConfig::Et(EtConfig::new(1, 0)).validate(3).is_err());
        let mut c = RfConfig::new(1);
        c.sample_fraction = Some(0.0);
        assert!(GrowerConfig::Rf(c).validate(3).is_err());
    }

    #[test]
    fn settings_apply() {
        let mut c = Algorithm::Rsrf.default_config(6);
        c.apply_setting("width", "9").unwrap();
        c.apply_setting("min.node.size", "5").unwrap();
        c.apply_setting("mtry_random_cart", "4").unwrap();
        c.apply_setting("mtrymode", "not-fixed").unwrap();
        c.apply_setting("replace", "TRUE").unwrap();
        let GrowerConfig::Rsrf(r) = &c else { panic!() };
        assert_eq!((r.width, r.min_node_size, r.mtry_random_cart), (9, 5, 4));
        assert!(c.apply_setting("npairs", "3").is_err());
        assert!(c.apply_setting("width", "abc").is_err());

        let mut et = Algorithm::Et.default_config(6);
        et.apply_setting("num.random.splits", "5").unwrap();
        et.apply_setting("mtry", "1").unwrap();
        assert_eq!(et, GrowerConfig::Et(EtConfig::new(1, 5)));
    }

    #[test]
    fn serde_tagged() {
        let c = GrowerConfig::Intf(IntfConfig::new(99));
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"algorithm\":\"intf\""));
        assert_eq!(serde_json::from_str::<GrowerConfig>(&text).unwrap(), c);
    }
}
