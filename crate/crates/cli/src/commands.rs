use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use splitforest::dataio::{align_features, load_csv, load_features_csv, parse_kv, TabularSchema};
use splitforest::simbench::bench::{self, reference_mse};
use splitforest::simbench::{
    cv_tune, hd_augment, nested_cv, opt_config, opt_tune, Contender, ExperimentReport, ForestPins, Method, ModelName,
    MonteCarlo, NestedCvPlan, SimulationModel, TuneResult, TuningSpace,
};
use splitforest::{fit_forest, Algorithm, BaselineKind, Dataset, Forest, GrowerConfig, Predictor, RngStream};

use crate::cli::{BenchArgs, FitArgs, ParamArgs, PredictArgs, SchemaArgs, SimulateArgs, SpaceKind, Suite, TuneArgs, TuneMethod};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn read_kv_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(parse_kv(&text)?.into_iter().map(|(_, k, v)| (k, v)).collect())
}

fn split_set(s: &str) -> Result<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| CliError::usage(format!("`--set {s}`: expected KEY=VALUE")))
}

/// Parameter settings in precedence order: file, then `--set`, then dedicated flags.
fn param_settings(args: &ParamArgs, file: Vec<(String, String)>) -> Result<Vec<(String, String)>> {
    let mut out = file;
    for s in &args.set {
        out.push(split_set(s)?);
    }
    if let Some(n) = args.num_trees {
        out.push(("num.trees".into(), n.to_string()));
    }
    if let Some(n) = args.min_node_size {
        out.push(("min.node.size".into(), n.to_string()));
    }
    if let Some(r) = args.replace {
        out.push(("replace".into(), r.to_string()));
    }
    Ok(out)
}

fn apply(mut cfg: GrowerConfig, settings: &[(String, String)]) -> Result<GrowerConfig> {
    for (k, v) in settings {
        cfg.apply_setting(k, v)?;
    }
    Ok(cfg)
}

fn parse_algorithm(s: &str) -> Result<Algorithm> {
    Algorithm::parse(s).ok_or_else(|| CliError::usage(format!("unknown algorithm `{s}` (expected rf, et, intf or rsrf)")))
}

fn parse_model(s: &str) -> Result<ModelName> {
    ModelName::parse(s).ok_or_else(|| {
        CliError::usage(format!(
            "unknown model `{s}` (expected pure_type, hierarchical, additive, pure_2 or pure_3)"
        ))
    })
}

fn take(settings: &mut Vec<(String, String)>, key: &str) -> Option<String> {
    let pos = settings
        .iter()
        .rposition(|(k, _)| splitforest::config::normalize_key(k) == key)?;
    let v = settings[pos].1.clone();
    settings.retain(|(k, _)| splitforest::config::normalize_key(k) != key);
    Some(v)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| CliError::usage(format!("`{key}`: cannot parse `{v}`")))
}

fn schema_from(args: &SchemaArgs, default_target: Option<&str>, data: Option<&Path>) -> Result<TabularSchema> {
    if let Some(p) = &args.schema {
        return Ok(TabularSchema::load(p)?);
    }
    let mut schema = match (&args.target, default_target, data) {
        (Some(t), _, _) => TabularSchema::new(t.clone()),
        (None, Some(t), _) => TabularSchema::new(t),
        (None, None, Some(path)) => TabularSchema::infer(path)?,
        (None, None, None) => return Err(CliError::usage("no target column given")),
    };
    schema.categorical.extend(args.categorical.iter().cloned());
    Ok(schema)
}

fn write_output(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, contents).map_err(|e| CliError {
            code: 1,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

pub fn fit(args: FitArgs) -> Result<()> {
    let schema = schema_from(&args.schema, None, Some(&args.data))?;
    let data = load_csv(&args.data, &schema)?;
    let file = match &args.params.config {
        Some(p) => read_kv_file(p)?,
        None => Vec::new(),
    };
    let mut settings = param_settings(&args.params, file)?;
    let algo = match (&args.algo, take(&mut settings, "algorithm")) {
        (Some(a), _) => parse_algorithm(a)?,
        (None, Some(a)) => parse_algorithm(&a)?,
        (None, None) => return Err(CliError::usage("no algorithm given (use --algo)")),
    };
    let cfg = apply(algo.default_config(data.d()), &settings)?;
    let forest = fit_forest(&data, &cfg, args.seed)?;
    forest.save(&args.out)?;
    eprintln!(
        "fitted {} trees ({}) on n={} d={}",
        forest.trees.len(),
        cfg.describe(),
        data.n(),
        data.d()
    );
    Ok(())
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let forest = Forest::load(&args.forest)?;
    let schema = schema_from(&args.schema, Some("y"), None)?;
    let data = load_features_csv(&args.data, &schema)?;
    let data = align_features(&data, &forest.feature_names, &schema)?;
    let mut out = String::from("prediction\n");
    for p in forest.predict_dataset(&data) {
        let _ = writeln!(out, "{p:.16e}");
    }
    write_output(args.out.as_deref(), &out)
}

/// A method label as accepted by `--algo`.
fn method_for(label: &str, model: ModelName, d: usize, use_opt: bool) -> Result<Method> {
    let contender = match label {
        "mean_y" => return Ok(Method::Baseline(BaselineKind::MeanY)),
        "one_nn" | "1nn" => return Ok(Method::Baseline(BaselineKind::OneNn)),
        "rsrf_af" => Contender::RsrfFixed,
        other => match parse_algorithm(other)? {
            Algorithm::Rf => Contender::Rf,
            Algorithm::Et => Contender::Et,
            Algorithm::Intf => Contender::Intf,
            Algorithm::Rsrf => Contender::Rsrf,
        },
    };
    let tuned = if use_opt { opt_config(model, d, contender) } else { None };
    let cfg = match (tuned, contender) {
        (Some(c), _) => c,
        (None, Contender::RsrfFixed) => {
            let mut c = Algorithm::Rsrf.default_config(d);
            c.apply_setting("mtrymode", "fixed")?;
            c.apply_setting("mtry_random", &d.to_string())?;
            c
        }
        (None, _) => Algorithm::parse(label).expect("checked above").default_config(d),
    };
    Ok(Method::labelled(contender.label(), cfg))
}

fn sibling_json(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn write_report(report: &ExperimentReport, out: Option<&Path>, csv: &str) -> Result<()> {
    write_output(out, csv)?;
    if let Some(p) = out {
        write_output(Some(&sibling_json(p)), &report.to_json()?)?;
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let mut settings = match &args.param_args.config {
        Some(p) => read_kv_file(p)?,
        None => Vec::new(),
    };
    // experiment keys come out of the file; the rest are algorithm parameters
    let file_model = take(&mut settings, "model");
    let file_d = take(&mut settings, "d");
    let file_algo = take(&mut settings, "algo").or_else(|| take(&mut settings, "algorithm"));
    let file_reps = take(&mut settings, "reps");
    let file_n_train = take(&mut settings, "n_train");
    let file_n_test = take(&mut settings, "n_test");
    let file_seed = take(&mut settings, "seed");
    let file_params = take(&mut settings, "params");
    let settings = param_settings(&args.param_args, settings)?;

    let model_name = args
        .model
        .clone()
        .or(file_model)
        .ok_or_else(|| CliError::usage("no model given (use --model)"))?;
    let model_name = parse_model(&model_name)?;
    let d = match (args.d, file_d) {
        (Some(d), _) => d,
        (None, Some(v)) => parse_num("d", &v)?,
        (None, None) => model_name.default_d(),
    };
    let model = SimulationModel::new(model_name, d)?;
    let seed = match (args.seed, file_seed) {
        (Some(s), _) => s,
        (None, Some(v)) => parse_num("seed", &v)?,
        (None, None) => return Err(CliError::usage("a seed is required (use --seed)")),
    };
    let reps = match (args.reps, file_reps) {
        (Some(r), _) => r,
        (None, Some(v)) => parse_num("reps", &v)?,
        (None, None) => 100,
    };
    let n_train = match (args.n_train, file_n_train) {
        (Some(n), _) => n,
        (None, Some(v)) => parse_num("n_train", &v)?,
        (None, None) => 500,
    };
    let n_test = match (args.n_test, file_n_test) {
        (Some(n), _) => n,
        (None, Some(v)) => parse_num("n_test", &v)?,
        (None, None) => 500,
    };
    let use_opt = match args.params.clone().or(file_params).as_deref() {
        None | Some("opt") => true,
        Some("default") => false,
        Some(other) => return Err(CliError::usage(format!("`params`: expected opt or default, got `{other}`"))),
    };
    let algo = args
        .algo
        .clone()
        .or(file_algo)
        .ok_or_else(|| CliError::usage("no algorithm given (use --algo)"))?
        .to_ascii_lowercase();

    let methods = if algo == "all" {
        if !settings.is_empty() {
            return Err(CliError::usage("parameter overrides need a single --algo"));
        }
        let mut m: Vec<Method> = ["intf", "rsrf", "rf", "et"]
            .iter()
            .map(|a| method_for(a, model_name, d, use_opt))
            .collect::<Result<_>>()?;
        m.extend(bench::baseline_methods());
        m
    } else {
        let method = method_for(&algo, model_name, d, use_opt)?;
        match method {
            Method::Forest { label, config } => {
                let config = apply(config, &settings)?;
                config.validate(d)?;
                vec![Method::Forest { label, config }]
            }
            baseline if settings.is_empty() => vec![baseline],
            _ => return Err(CliError::usage("baselines take no parameters")),
        }
    };

    let mc = MonteCarlo {
        n_train,
        n_test,
        log: !args.quiet,
        ..MonteCarlo::new(model, reps, seed)
    };
    let report = mc.run(&methods)?;
    write_report(&report, args.out.as_deref(), &report.to_csv())
}

fn tune_space(args: &TuneArgs, algo: Algorithm, d: usize) -> Result<TuningSpace> {
    if args.params.config.is_some() || !args.params.set.is_empty() {
        let file = match &args.params.config {
            Some(p) => read_kv_file(p)?,
            None => Vec::new(),
        };
        let settings = param_settings(&args.params, file)?;
        let cfg = GrowerConfig::from_settings(algo, d, settings.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        cfg.validate(d)?;
        return Ok(TuningSpace::single(cfg));
    }
    let space = match args.space {
        SpaceKind::Ranges => TuningSpace::ranges(algo, d),
        SpaceKind::FixedMode if algo == Algorithm::Rsrf => TuningSpace::ranges_fixed_mode(d),
        SpaceKind::FixedMode => return Err(CliError::usage("--space fixed-mode applies to rsrf only")),
        SpaceKind::RealData => TuningSpace::real_data(algo, d),
    };
    Ok(space.pinned(ForestPins {
        num_trees: args.params.num_trees,
        min_node_size: args.params.min_node_size,
        replace: args.params.replace,
    }))
}

fn tune_output(result: &TuneResult) -> String {
    let mut out = result.best.to_kv();
    let _ = writeln!(out, "# score = {:.6}", result.best_score);
    let _ = writeln!(out, "# candidates = {}", result.scores.len());
    out
}

pub fn tune(args: TuneArgs) -> Result<()> {
    let seed = args.seed.ok_or_else(|| CliError::usage("a seed is required (use --seed)"))?;
    let mut rng = RngStream::new(seed, 0);
    let method = args.method.unwrap_or(if args.data.is_some() { TuneMethod::Cv } else { TuneMethod::Opt });

    match method {
        TuneMethod::Opt => {
            let model_name = parse_model(
                args.model
                    .as_deref()
                    .ok_or_else(|| CliError::usage("oracle tuning needs --model"))?,
            )?;
            let d = args.d.unwrap_or(model_name.default_d());
            let model = SimulationModel::new(model_name, d)?;
            let algo = parse_algorithm(&args.algo)?;
            let space = tune_space(&args, algo, d)?;
            let result = opt_tune(&model, &space, args.combos, args.sims, args.n_train, args.n_test, &mut rng)?;
            write_output(args.out.as_deref(), &tune_output(&result))
        }
        TuneMethod::Cv | TuneMethod::Nested => {
            let data = tune_data(&args, &mut rng)?;
            if method == TuneMethod::Cv {
                let algo = parse_algorithm(&args.algo)?;
                let space = tune_space(&args, algo, data.d())?;
                let result = cv_tune(&data, &space, args.combos, args.folds, &mut rng)?;
                return write_output(args.out.as_deref(), &tune_output(&result));
            }
            let algos: Vec<Algorithm> = if args.algo.eq_ignore_ascii_case("all") {
                Algorithm::ALL.to_vec()
            } else {
                vec![parse_algorithm(&args.algo)?]
            };
            let methods = algos
                .iter()
                .map(|&a| Ok((a.name().to_string(), tune_space(&args, a, data.d())?)))
                .collect::<Result<Vec<_>>>()?;
            let plan = NestedCvPlan {
                inner: args.inner,
                outer: args.outer,
                repeats: args.repeats,
                combos: args.combos,
            };
            let results = nested_cv(&data, &methods, plan, &mut rng)?;
            let mut out = String::from("method,estimate,mse_y,chosen\n");
            for r in &results {
                for (k, (e, c)) in r.fold_mse.iter().zip(&r.chosen).enumerate() {
                    let _ = writeln!(out, "{},{},{:.6},\"{}\"", r.method, k + 1, e, c.describe());
                }
            }
            write_output(args.out.as_deref(), &out)
        }
    }
}

fn tune_data(args: &TuneArgs, rng: &mut RngStream) -> Result<Dataset> {
    let data = match (&args.data, &args.model) {
        (Some(path), _) => {
            let schema = schema_from(&args.schema, None, Some(path))?;
            load_csv(path, &schema)?
        }
        (None, Some(m)) => {
            let name = parse_model(m)?;
            let model = SimulationModel::new(name, args.d.unwrap_or(name.default_d()))?;
            model.generate(args.n_train, rng).data
        }
        (None, None) => return Err(CliError::usage("tuning needs --data or --model")),
    };
    match args.hd {
        Some(extra) => Ok(hd_augment(&data, extra, rng)?),
        None => Ok(data),
    }
}

fn with_reference(report: &ExperimentReport) -> String {
    let mut out = format!("{},reference_mse\n", splitforest::simbench::experiment::REPORT_CSV_HEADER);
    for (line, row) in report.csv_rows().lines().zip(&report.rows) {
        let reference = if report.model == "pure_3" && report.n_train == 500 {
            reference_mse(&row.method).map(|v| format!("{v:.3}")).unwrap_or_default()
        } else {
            String::new()
        };
        let _ = writeln!(out, "{line},{reference}");
    }
    out
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let seed = args.seed.ok_or_else(|| CliError::usage("a seed is required (use --seed)"))?;
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    let pure3 = SimulationModel::with_default_d(ModelName::Pure3);
    let monte_carlo = |model: SimulationModel, n: usize, methods: &[Method]| -> Result<ExperimentReport> {
        let mc = MonteCarlo {
            n_train: n,
            log: !args.quiet,
            ..MonteCarlo::new(model, args.reps, seed)
        };
        Ok(mc.run(methods)?)
    };
    match args.suite {
        Suite::Table1 => {
            let report = monte_carlo(pure3, args.n.unwrap_or(500), &bench::table1_methods())?;
            write_report(&report, args.out.as_deref(), &with_reference(&report))
        }
        Suite::Baselines => {
            let report = monte_carlo(pure3, args.n.unwrap_or(500), &bench::baseline_methods())?;
            write_report(&report, args.out.as_deref(), &with_reference(&report))
        }
        Suite::Fig2a => {
            let report = monte_carlo(pure3, args.n.unwrap_or(1000), &bench::fig2a_methods())?;
            write_report(&report, args.out.as_deref(), &report.to_csv())
        }
        Suite::Table3 => {
            let mut csv = format!("{}\n", splitforest::simbench::experiment::REPORT_CSV_HEADER);
            for (model, methods) in bench::table3_cases() {
                if !args.quiet {
                    eprintln!("{} d={}", model.name, model.d);
                }
                csv.push_str(&monte_carlo(model, args.n.unwrap_or(500), &methods)?.csv_rows());
            }
            write_output(args.out.as_deref(), &csv)
        }
        Suite::Blindness => {
            let rows = bench::blindness(args.n.unwrap_or(10_000), args.reps as u64, seed);
            let mut csv = String::from("seed,root_feature,gain_interaction,gain_additive,ratio\n");
            for r in rows {
                let _ = writeln!(
                    csv,
                    "{},{},{:.6e},{:.6e},{:.6}",
                    r.seed,
                    r.root_feature,
                    r.gain_interaction,
                    r.gain_additive,
                    r.ratio()
                );
            }
            write_output(args.out.as_deref(), &csv)
        }
        Suite::Hd => {
            let lags = bench::hd_lag_covariances(args.n.unwrap_or(100_000), 50, seed);
            let mut csv = String::from("lag,target,mean,max_abs_dev\n");
            for l in lags {
                let _ = writeln!(csv, "{},{:.4},{:.6},{:.6}", l.lag, l.target, l.mean, l.max_abs_dev);
            }
            write_output(args.out.as_deref(), &csv)
        }
    }
}
