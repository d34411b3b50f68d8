//! Command implementations behind the binary: training runs, baseline
//! comparison, and Fourier-landscape export. Every output file starts with a
//! provenance comment carrying the tool version and the resolved config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ndarray::{Array1, Array2};

use crate::baselines::{rbf_random_features, RbfParams};
use crate::config::{Branch, RunConfig};
use crate::dataset::{fmt_f64, Dataset};
use crate::error::{Error, Result};
use crate::fourier::Mode;
use crate::game::{boost, features_for_prefix, BoostConfig, LearnedKernel, PeakFinder};
use crate::langevin::median_heuristic;
use crate::model::{measure_to_csv, save_model, TrainedModel};
use crate::svm::{accuracy, margin, predict, train_linear_svm};
use crate::{langevin, model};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn provenance(config: &RunConfig) -> String {
    format!("fourier-learn {VERSION} | {}", config.resolved())
}

fn finder_for(config: &RunConfig) -> PeakFinder {
    match config.branch {
        Branch::Translation => PeakFinder::Langevin(config.langevin.clone()),
        Branch::Rotation => PeakFinder::Enumerate {
            ell_max: config.ell_max,
        },
    }
}

fn boost_config(config: &RunConfig) -> BoostConfig {
    BoostConfig {
        box_c: config.box_c,
        rounds: config.rounds,
        step_multiplier: config.step_multiplier,
        projection_passes: config.projection_passes,
    }
}

/// Append the bias-free feature matrix rows for prediction.
fn eval_split(
    model: &crate::svm::LinearModel,
    features: &Array2<f64>,
    labels: &Array1<f64>,
) -> Result<f64> {
    let pred = predict(model, features)?;
    Ok(accuracy(&pred, labels))
}

fn trace_csv(kernel: &LearnedKernel, dim: usize, provenance: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {provenance}");
    let spherical = kernel
        .trace
        .records
        .first()
        .map(|r| matches!(r.mode, Mode::Harmonic(_)))
        .unwrap_or(false);
    if spherical {
        out.push_str("t,v_t,F_t,eta_t,ell,m\n");
    } else {
        out.push_str("t,v_t,F_t,eta_t");
        for j in 0..dim {
            let _ = write!(out, ",omega_{}", j + 1);
        }
        out.push('\n');
    }
    for rec in &kernel.trace.records {
        let _ = write!(
            out,
            "{},{},{},{}",
            rec.round,
            fmt_f64(rec.peak_value),
            fmt_f64(rec.objective),
            fmt_f64(rec.step_size)
        );
        match &rec.mode {
            Mode::Harmonic(h) => {
                let _ = write!(out, ",{},{}", h.ell, h.m);
            }
            Mode::Frequency(w) => {
                for v in w.iter() {
                    let _ = write!(out, ",{}", fmt_f64(*v));
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Train on the configured dataset; write model, measure, trace, and metrics.
pub fn cmd_train(config_path: &Path, out_dir: &Path, seed_override: Option<u64>) -> Result<()> {
    let mut config = RunConfig::parse_file(config_path)?;
    if let Some(seed) = seed_override {
        config.apply_seed_override(seed);
    }
    let head = provenance(&config);
    let (train, test) = config.train_test()?;
    train.require_nonempty()?;

    let start = Instant::now();
    let out = boost(&train, &boost_config(&config), &finder_for(&config))?;
    let svm = train_linear_svm(&out.features, train.labels(), config.box_c, config.svm_tol)?;
    let wall = start.elapsed().as_secs_f64();

    let train_acc = eval_split(&svm, &out.features, train.labels())?;
    let test_features = out.kernel.featurize(&test)?;
    let test_acc = eval_split(&svm, &test_features, test.labels())?;
    let train_margin = margin(&svm, &out.features, train.labels())?;

    std::fs::create_dir_all(out_dir)?;
    let mut params = BTreeMap::new();
    for pair in config.resolved().split(' ') {
        if let Some((k, v)) = pair.split_once('=') {
            params.insert(k.to_string(), v.to_string());
        }
    }
    let trained = TrainedModel::from_training(&out.kernel, svm, params);
    save_model(&out_dir.join("model.txt"), &trained, &head)?;

    let mut measure_file = format!("# {head}\n");
    measure_file.push_str(&measure_to_csv(&out.kernel.measure));
    std::fs::write(out_dir.join("measure.csv"), measure_file)?;

    std::fs::write(
        out_dir.join("trace.csv"),
        trace_csv(&out.kernel, train.dim(), &head),
    )?;

    let mut metrics = format!("# {head}\n");
    let _ = writeln!(metrics, "train_accuracy={train_acc}");
    let _ = writeln!(metrics, "test_accuracy={test_acc}");
    let _ = writeln!(metrics, "margin={train_margin}");
    let _ = writeln!(metrics, "wall_seconds={wall:.3}");
    let _ = writeln!(metrics, "rounds={}", config.rounds);
    let _ = writeln!(metrics, "feature_columns={}", out.features.ncols());
    let _ = writeln!(metrics, "distinct_atoms={}", out.kernel.measure.len());
    std::fs::write(out_dir.join("metrics.txt"), metrics)?;
    Ok(())
}

/// Head-to-head against the random-feature baseline at several feature
/// budgets, on one shared split. Budgets count real feature columns and must
/// be even: budget m compares our T = m/2 boosting rounds with m/2 sampled
/// frequency pairs.
pub fn cmd_compare(
    config_path: &Path,
    out_dir: &Path,
    budgets: &[usize],
    seed_override: Option<u64>,
) -> Result<()> {
    let mut config = RunConfig::parse_file(config_path)?;
    if let Some(seed) = seed_override {
        config.apply_seed_override(seed);
    }
    if budgets.is_empty() {
        return Err(Error::Config("compare needs at least one feature budget".into()));
    }
    if let Some(odd) = budgets.iter().find(|b| *b % 2 != 0 || **b == 0) {
        return Err(Error::Config(format!(
            "feature budgets must be positive and even, got {odd}"
        )));
    }
    let head = provenance(&config);
    let (train, test) = config.train_test()?;
    train.require_nonempty()?;
    test.require_nonempty()?;

    // One boosting run at the largest budget; smaller budgets are exact
    // prefixes of it because each round depends only on earlier rounds.
    let t_max = budgets.iter().max().unwrap() / 2;
    let mut config_max = config.clone();
    config_max.rounds = t_max;
    let out = boost(&train, &boost_config(&config_max), &finder_for(&config_max))?;

    let sigma = median_heuristic(&train)?;
    let mut rows = Vec::new();
    for &budget in budgets {
        let t = budget / 2;
        let ours_train = features_for_prefix(&train, &out.kernel.trace, t)?;
        let ours_test = features_for_prefix(&test, &out.kernel.trace, t)?;
        let model = train_linear_svm(&ours_train, train.labels(), config.box_c, config.svm_tol)?;
        rows.push((
            "ours",
            budget,
            eval_split(&model, &ours_train, train.labels())?,
            eval_split(&model, &ours_test, test.labels())?,
        ));

        let params = RbfParams {
            pairs: t,
            sigma,
            seed: config.langevin.seed,
        };
        let rbf_train = rbf_random_features(&train, &params)?;
        let rbf_test = rbf_random_features(&test, &params)?;
        let model = train_linear_svm(&rbf_train.values, train.labels(), config.box_c, config.svm_tol)?;
        rows.push((
            "rbf-rf",
            budget,
            eval_split(&model, &rbf_train.values, train.labels())?,
            eval_split(&model, &rbf_test.values, test.labels())?,
        ));
    }

    std::fs::create_dir_all(out_dir)?;
    let mut table = format!("# {head}\n");
    table.push_str("method\tfeatures\ttrain_acc\ttest_acc\n");
    for (method, budget, train_acc, test_acc) in rows {
        let _ = writeln!(table, "{method}\t{budget}\t{train_acc:.6}\t{test_acc:.6}");
    }
    std::fs::write(out_dir.join("comparison.tsv"), table)?;
    Ok(())
}

/// Grid specification `lo:hi:steps` for the landscape export.
pub fn parse_grid(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("grid must be lo:hi:steps, got {spec:?}")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid lower bound {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid upper bound {:?}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid step count {:?}", parts[2])))?;
    if steps == 0 || hi < lo {
        return Err(Error::Config(format!("empty grid {spec:?}")));
    }
    Ok((lo, hi, steps))
}

/// Source of the reweighting vector for the landscape export.
#[derive(Debug, Clone)]
pub enum AlphaSource {
    Uniform,
    ModelFile(std::path::PathBuf),
}

/// Export v_alpha over a square frequency grid of a 2-d dataset as CSV rows
/// `omega_1,omega_2,v`, iterating omega_1 in the outer loop.
pub fn cmd_landscape(
    config_path: &Path,
    out_dir: &Path,
    grid: &str,
    alpha_source: &AlphaSource,
    seed_override: Option<u64>,
) -> Result<()> {
    let mut config = RunConfig::parse_file(config_path)?;
    if let Some(seed) = seed_override {
        config.apply_seed_override(seed);
    }
    let (lo, hi, steps) = parse_grid(grid)?;
    let head = provenance(&config);
    let (train, _) = config.train_test()?;
    train.require_nonempty()?;
    if train.dim() != 2 {
        return Err(Error::UnsupportedDimension(train.dim()));
    }
    let alpha = match alpha_source {
        AlphaSource::Uniform => Array1::ones(train.n()),
        AlphaSource::ModelFile(path) => {
            let trained = model::load_model(path)?;
            if trained.alpha.len() != train.n() {
                return Err(Error::DimensionMismatch {
                    what: "model alpha",
                    expected: train.n(),
                    found: trained.alpha.len(),
                });
            }
            trained.alpha
        }
    };

    let axis: Vec<f64> = if steps == 1 {
        vec![lo]
    } else {
        (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let mut omegas = Array2::zeros((steps * steps, 2));
    for (i, &w1) in axis.iter().enumerate() {
        for (j, &w2) in axis.iter().enumerate() {
            omegas[[i * steps + j, 0]] = w1;
            omegas[[i * steps + j, 1]] = w2;
        }
    }
    let (values, _) = crate::fourier::potential_batch(&train, &alpha, &omegas, false)?;

    std::fs::create_dir_all(out_dir)?;
    let mut out = format!("# {head}\n");
    out.push_str("omega_1,omega_2,v\n");
    for r in 0..steps * steps {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(omegas[[r, 0]]),
            fmt_f64(omegas[[r, 1]]),
            fmt_f64(values[r])
        );
    }
    std::fs::write(out_dir.join("landscape.csv"), out)?;
    Ok(())
}

/// Re-evaluate a stored model on a dataset (used by tests and tooling).
pub fn evaluate_model(trained: &TrainedModel, data: &Dataset) -> Result<f64> {
    let features = trained.featurize(data)?;
    eval_split(&trained.svm, &features, data.labels())
}

/// Convenience used by tests: median-bandwidth baseline accuracy on a split.
pub fn rbf_baseline_accuracy(
    train: &Dataset,
    test: &Dataset,
    pairs: usize,
    box_c: f64,
    tol: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    let sigma = langevin::median_heuristic(train)?;
    let params = RbfParams { pairs, sigma, seed };
    let f_train = rbf_random_features(train, &params)?;
    let f_test = rbf_random_features(test, &params)?;
    let model = train_linear_svm(&f_train.values, train.labels(), box_c, tol)?;
    Ok((
        eval_split(&model, &f_train.values, train.labels())?,
        eval_split(&model, &f_test.values, test.labels())?,
    ))
}
