//! On-disk artifacts: the measure CSV interchange format and the
//! key-annotated model file bundling measure, dual variables, linear-SVM
//! weights, geometry, and hyperparameters.
//!
//! All floats are written with 17 significant digits, so save/load round
//! trips are bit-faithful.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::dataset::{fmt_f64, Dataset, Geometry};
use crate::error::{Error, Result};
use crate::fourier::{Atom, DualMeasure, Mode};
use crate::game::{measure_features, LearnedKernel};
use crate::spherical::HarmonicIndex;
use crate::svm::LinearModel;

/// Measure serialization: `weight,omega_1,...,omega_d` for the continuous
/// branch, `weight,ell,m` for the spherical branch.
pub fn measure_to_csv(measure: &DualMeasure) -> String {
    let mut out = String::new();
    let spherical = measure
        .atoms()
        .iter()
        .all(|a| matches!(a.mode, Mode::Harmonic(_)));
    if spherical {
        out.push_str("weight,ell,m\n");
        for atom in measure.atoms() {
            if let Mode::Harmonic(h) = &atom.mode {
                let _ = writeln!(out, "{},{},{}", fmt_f64(atom.weight), h.ell, h.m);
            }
        }
    } else {
        let d = measure
            .atoms()
            .iter()
            .find_map(|a| a.mode.as_frequency().map(|w| w.len()))
            .unwrap_or(0);
        out.push_str("weight");
        for j in 0..d {
            let _ = write!(out, ",omega_{}", j + 1);
        }
        out.push('\n');
        for atom in measure.atoms() {
            if let Mode::Frequency(w) = &atom.mode {
                out.push_str(&fmt_f64(atom.weight));
                for v in w.iter() {
                    out.push(',');
                    out.push_str(&fmt_f64(*v));
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Parse a measure CSV (either branch); `#` comment lines are skipped.
pub fn measure_from_csv(text: &str) -> Result<DualMeasure> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("measure csv is empty".into()))?;
    let spherical = header == "weight,ell,m";
    if !spherical && !header.starts_with("weight,omega_1") {
        return Err(Error::Config(format!("unrecognized measure header {header:?}")));
    }
    let mut atoms = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let weight: f64 = cells[0]
            .parse()
            .map_err(|_| Error::Config(format!("bad measure weight {:?}", cells[0])))?;
        let mode = if spherical {
            if cells.len() != 3 {
                return Err(Error::Config("spherical measure rows need weight,ell,m".into()));
            }
            let ell: u32 = cells[1]
                .parse()
                .map_err(|_| Error::Config(format!("bad ell {:?}", cells[1])))?;
            let m: i32 = cells[2]
                .parse()
                .map_err(|_| Error::Config(format!("bad m {:?}", cells[2])))?;
            Mode::Harmonic(HarmonicIndex::new(ell, m)?)
        } else {
            let mut coords = Vec::with_capacity(cells.len() - 1);
            for c in &cells[1..] {
                coords.push(
                    c.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad frequency coordinate {c:?}")))?,
                );
            }
            Mode::Frequency(Array1::from_vec(coords))
        };
        atoms.push(Atom { mode, weight });
    }
    DualMeasure::new(atoms)
}

/// A trained pipeline ready for prediction: learned measure plus the linear
/// model over its features.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub measure: DualMeasure,
    pub multiplicities: Vec<u32>,
    pub geometry: Geometry,
    pub rounds: usize,
    pub alpha: Array1<f64>,
    pub svm: LinearModel,
    /// Hyperparameters recorded at training time (key = value strings).
    pub params: BTreeMap<String, String>,
}

impl TrainedModel {
    pub fn from_training(kernel: &LearnedKernel, svm: LinearModel, params: BTreeMap<String, String>) -> Self {
        TrainedModel {
            measure: kernel.measure.clone(),
            multiplicities: kernel.multiplicities.clone(),
            geometry: kernel.geometry,
            rounds: kernel.rounds,
            alpha: kernel.final_alpha.clone(),
            svm,
            params,
        }
    }

    /// Feature matrix of this model's measure on new data.
    pub fn featurize(&self, data: &Dataset) -> Result<Array2<f64>> {
        measure_features(data, &self.measure, &self.multiplicities)
    }
}

/// Serialize a model file. `provenance` becomes the leading comment line.
pub fn model_to_string(model: &TrainedModel, provenance: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {provenance}");
    out.push_str("format=fourier-learn-model-v1\n");
    let _ = writeln!(out, "geometry={}", model.geometry.as_str());
    let _ = writeln!(out, "rounds={}", model.rounds);
    let _ = writeln!(out, "svm_c={}", fmt_f64(model.svm.box_c));
    out.push_str("[params]\n");
    for (k, v) in &model.params {
        let _ = writeln!(out, "{k}={v}");
    }
    out.push_str("[measure]\n");
    out.push_str(&measure_to_csv(&model.measure));
    out.push_str("[alpha]\n");
    for v in model.alpha.iter() {
        let _ = writeln!(out, "{}", fmt_f64(*v));
    }
    out.push_str("[svm]\n");
    let _ = writeln!(out, "bias={}", fmt_f64(model.svm.bias));
    let _ = writeln!(out, "primal_objective={}", fmt_f64(model.svm.primal_objective));
    let _ = writeln!(out, "duality_gap={}", fmt_f64(model.svm.duality_gap));
    for w in model.svm.weights.iter() {
        let _ = writeln!(out, "weight={}", fmt_f64(*w));
    }
    out
}

pub fn save_model(path: &Path, model: &TrainedModel, provenance: &str) -> Result<()> {
    std::fs::write(path, model_to_string(model, provenance))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path)?;
    model_from_string(&text)
}

pub fn model_from_string(text: &str) -> Result<TrainedModel> {
    let mut geometry = None;
    let mut rounds: Option<usize> = None;
    let mut svm_c: Option<f64> = None;
    let mut params = BTreeMap::new();
    let mut measure_csv = String::new();
    let mut alpha = Vec::new();
    let mut bias = None;
    let mut primal = 0.0;
    let mut gap = 0.0;
    let mut weights = Vec::new();
    let mut format_seen = false;

    #[derive(PartialEq)]
    enum Section {
        Head,
        Params,
        Measure,
        Alpha,
        Svm,
    }
    let mut section = Section::Head;

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[params]" => {
                section = Section::Params;
                continue;
            }
            "[measure]" => {
                section = Section::Measure;
                continue;
            }
            "[alpha]" => {
                section = Section::Alpha;
                continue;
            }
            "[svm]" => {
                section = Section::Svm;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Head => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("bad model header line {line:?}")))?;
                match key {
                    "format" => {
                        if value != "fourier-learn-model-v1" {
                            return Err(Error::Config(format!("unsupported model format {value:?}")));
                        }
                        format_seen = true;
                    }
                    "geometry" => {
                        geometry = Some(match value {
                            "euclidean" => Geometry::Euclidean,
                            "unit_sphere" => Geometry::UnitSphere,
                            other => {
                                return Err(Error::Config(format!("unknown geometry {other:?}")))
                            }
                        });
                    }
                    "rounds" => {
                        rounds = Some(value.parse().map_err(|_| {
                            Error::Config(format!("bad rounds value {value:?}"))
                        })?);
                    }
                    "svm_c" => {
                        svm_c = Some(value.parse().map_err(|_| {
                            Error::Config(format!("bad svm_c value {value:?}"))
                        })?);
                    }
                    other => {
                        return Err(Error::Config(format!("unknown model header key {other:?}")))
                    }
                }
            }
            Section::Params => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("bad params line {line:?}")))?;
                params.insert(key.to_string(), value.to_string());
            }
            Section::Measure => {
                measure_csv.push_str(line);
                measure_csv.push('\n');
            }
            Section::Alpha => {
                alpha.push(
                    line.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad alpha value {line:?}")))?,
                );
            }
            Section::Svm => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("bad svm line {line:?}")))?;
                let parsed: f64 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad svm value {value:?}")))?;
                match key {
                    "bias" => bias = Some(parsed),
                    "primal_objective" => primal = parsed,
                    "duality_gap" => gap = parsed,
                    "weight" => weights.push(parsed),
                    other => return Err(Error::Config(format!("unknown svm key {other:?}"))),
                }
            }
        }
    }

    if !format_seen {
        return Err(Error::Config("missing model format line".into()));
    }
    let geometry = geometry.ok_or_else(|| Error::Config("model missing geometry".into()))?;
    let rounds = rounds.ok_or_else(|| Error::Config("model missing rounds".into()))?;
    let svm_c = svm_c.ok_or_else(|| Error::Config("model missing svm_c".into()))?;
    let measure = measure_from_csv(&measure_csv)?;
    let multiplicities: Vec<u32> = measure
        .atoms()
        .iter()
        .map(|a| (a.weight * rounds as f64).round().max(1.0) as u32)
        .collect();
    let svm = LinearModel {
        weights: Array1::from_vec(weights),
        bias: bias.ok_or_else(|| Error::Config("model missing svm bias".into()))?,
        box_c: svm_c,
        primal_objective: primal,
        duality_gap: gap,
    };
    Ok(TrainedModel {
        measure,
        multiplicities,
        geometry,
        rounds,
        alpha: Array1::from_vec(alpha),
        svm,
        params,
    })
}
