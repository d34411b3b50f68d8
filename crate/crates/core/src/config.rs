//! Run configuration: a flat `key=value` text format with dotted sections,
//! strict about unknown keys so typos fail loudly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{self, Dataset, Geometry};
use crate::error::{Error, Result};
use crate::langevin::LangevinParams;

/// Which kernel family is being learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Translation,
    Rotation,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Translation => "translation",
            Branch::Rotation => "rotation",
        }
    }
}

/// Where the train/test datasets come from.
#[derive(Debug, Clone)]
pub enum DatasetSource {
    Windmill {
        n_train: usize,
        n_test: usize,
        blades: u32,
        radius: f64,
        noise: f64,
        seed: u64,
    },
    SphereCheckerboard {
        n_train: usize,
        n_test: usize,
        bands: u32,
        seed: u64,
    },
    Csv {
        path: PathBuf,
        test_path: Option<PathBuf>,
        geometry: Geometry,
        split: f64,
        seed: u64,
    },
}

/// Fully resolved configuration of a run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub branch: Branch,
    pub source: DatasetSource,
    pub box_c: f64,
    pub svm_tol: f64,
    pub rounds: usize,
    pub step_multiplier: f64,
    pub projection_passes: usize,
    pub langevin: LangevinParams,
    pub ell_max: u32,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("bad value {value:?} for key {key:?}")))
}

impl RunConfig {
    pub fn parse_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Config(format!(
                "config file not found: {}",
                path.display()
            )));
        }
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {} is not key=value: {line:?}", idx + 1))
            })?;
            if map.insert(key.trim().to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("duplicate key {:?}", key.trim())));
            }
        }
        Self::from_map(map)
    }

    fn from_map(mut map: BTreeMap<String, String>) -> Result<Self> {
        let mut take = |key: &str| map.remove(key);

        let branch = match take("branch").as_deref() {
            Some("translation") => Branch::Translation,
            Some("rotation") => Branch::Rotation,
            Some(other) => {
                return Err(Error::Config(format!(
                    "branch must be translation or rotation, got {other:?}"
                )))
            }
            None => return Err(Error::Config("missing required key 'branch'".into())),
        };

        let dataset_seed: u64 = match take("dataset.seed") {
            Some(v) => parse_value("dataset.seed", &v)?,
            None => 0,
        };
        let n_train: usize = match take("dataset.n_train") {
            Some(v) => parse_value("dataset.n_train", &v)?,
            None => 2000,
        };
        let n_test: usize = match take("dataset.n_test") {
            Some(v) => parse_value("dataset.n_test", &v)?,
            None => 10000,
        };

        let source = match take("dataset.source").as_deref() {
            Some("windmill") => DatasetSource::Windmill {
                n_train,
                n_test,
                blades: match take("dataset.blades") {
                    Some(v) => parse_value("dataset.blades", &v)?,
                    None => 3,
                },
                radius: match take("dataset.radius") {
                    Some(v) => parse_value("dataset.radius", &v)?,
                    None => 1.0,
                },
                noise: match take("dataset.noise") {
                    Some(v) => parse_value("dataset.noise", &v)?,
                    None => 0.0,
                },
                seed: dataset_seed,
            },
            Some("sphere_checkerboard") => DatasetSource::SphereCheckerboard {
                n_train,
                n_test,
                bands: match take("dataset.bands") {
                    Some(v) => parse_value("dataset.bands", &v)?,
                    None => 4,
                },
                seed: dataset_seed,
            },
            Some("csv") => {
                let path = take("dataset.path").ok_or_else(|| {
                    Error::Config("csv source requires dataset.path".into())
                })?;
                let geometry = match take("dataset.geometry").as_deref() {
                    Some("euclidean") | None => Geometry::Euclidean,
                    Some("unit_sphere") => Geometry::UnitSphere,
                    Some(other) => {
                        return Err(Error::Config(format!(
                            "dataset.geometry must be euclidean or unit_sphere, got {other:?}"
                        )))
                    }
                };
                DatasetSource::Csv {
                    path: PathBuf::from(path),
                    test_path: take("dataset.test_path").map(PathBuf::from),
                    geometry,
                    split: match take("dataset.split") {
                        Some(v) => parse_value("dataset.split", &v)?,
                        None => 0.8,
                    },
                    seed: dataset_seed,
                }
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "dataset.source must be windmill, sphere_checkerboard or csv, got {other:?}"
                )))
            }
            None => return Err(Error::Config("missing required key 'dataset.source'".into())),
        };

        let box_c = match take("svm.c") {
            Some(v) => parse_value("svm.c", &v)?,
            None => 1.0,
        };
        let svm_tol = match take("svm.tol") {
            Some(v) => parse_value("svm.tol", &v)?,
            None => 1e-3,
        };
        let rounds = match take("game.rounds") {
            Some(v) => parse_value("game.rounds", &v)?,
            None => 100,
        };
        let step_multiplier = match take("game.step_multiplier") {
            Some(v) => parse_value("game.step_multiplier", &v)?,
            None => 1.0,
        };
        let projection_passes = match take("game.projection_passes") {
            Some(v) => parse_value("game.projection_passes", &v)?,
            None => 10,
        };

        let defaults = LangevinParams::default();
        let langevin = LangevinParams {
            tau: match take("langevin.tau") {
                Some(v) => parse_value("langevin.tau", &v)?,
                None => defaults.tau,
            },
            chains: match take("langevin.chains") {
                Some(v) => parse_value("langevin.chains", &v)?,
                None => defaults.chains,
            },
            zeta: match take("langevin.zeta").as_deref() {
                Some("auto") | None => None,
                Some(v) => Some(parse_value("langevin.zeta", v)?),
            },
            xi: match take("langevin.xi").as_deref() {
                Some("auto") | None => None,
                Some(v) => Some(parse_value("langevin.xi", v)?),
            },
            init_variance_scale: match take("langevin.init_variance_scale") {
                Some(v) => parse_value("langevin.init_variance_scale", &v)?,
                None => defaults.init_variance_scale,
            },
            top_k: match take("langevin.top_k") {
                Some(v) => parse_value("langevin.top_k", &v)?,
                None => defaults.top_k,
            },
            clip_radius: match take("langevin.clip_radius").as_deref() {
                Some("none") | None => None,
                Some(v) => Some(parse_value("langevin.clip_radius", v)?),
            },
            seed: match take("langevin.seed") {
                Some(v) => parse_value("langevin.seed", &v)?,
                None => defaults.seed,
            },
        };

        let ell_max = match take("spherical.ell_max") {
            Some(v) => parse_value("spherical.ell_max", &v)?,
            None => 31,
        };

        if let Some(unknown) = map.keys().next() {
            return Err(Error::Config(format!("unknown config key {unknown:?}")));
        }

        let config = RunConfig {
            branch,
            source,
            box_c,
            svm_tol,
            rounds,
            step_multiplier,
            projection_passes,
            langevin,
            ell_max,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.branch == Branch::Rotation {
            let sphere = match &self.source {
                DatasetSource::SphereCheckerboard { .. } => true,
                DatasetSource::Csv { geometry, .. } => *geometry == Geometry::UnitSphere,
                DatasetSource::Windmill { .. } => false,
            };
            if !sphere {
                return Err(Error::Config(
                    "rotation branch requires unit-sphere data".into(),
                ));
            }
        }
        if let DatasetSource::Csv { split, test_path, .. } = &self.source {
            if test_path.is_none() && !(*split > 0.0 && *split < 1.0) {
                return Err(Error::Config(
                    "dataset.split must be strictly between 0 and 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Override the run seeds (dataset generation and diffusion streams).
    pub fn apply_seed_override(&mut self, seed: u64) {
        match &mut self.source {
            DatasetSource::Windmill { seed: s, .. } => *s = seed,
            DatasetSource::SphereCheckerboard { seed: s, .. } => *s = seed,
            DatasetSource::Csv { seed: s, .. } => *s = seed,
        }
        self.langevin.seed = seed;
    }

    /// Materialize the train/test pair. Generated sources use `seed` for the
    /// training set and `seed + 1` for the test set; a CSV source without a
    /// test file is split by a seeded shuffle.
    pub fn train_test(&self) -> Result<(Dataset, Dataset)> {
        match &self.source {
            DatasetSource::Windmill {
                n_train,
                n_test,
                blades,
                radius,
                noise,
                seed,
            } => {
                let train = dataset::gen_windmill(*n_train, *blades, *radius, *noise, *seed)?;
                let test =
                    dataset::gen_windmill(*n_test, *blades, *radius, *noise, seed.wrapping_add(1))?;
                Ok((train, test))
            }
            DatasetSource::SphereCheckerboard {
                n_train,
                n_test,
                bands,
                seed,
            } => {
                let train = dataset::gen_sphere_checkerboard(*n_train, *bands, *seed)?;
                let test =
                    dataset::gen_sphere_checkerboard(*n_test, *bands, seed.wrapping_add(1))?;
                Ok((train, test))
            }
            DatasetSource::Csv {
                path,
                test_path,
                geometry,
                split,
                seed,
            } => {
                let full = dataset::load_csv(path, *geometry)?;
                if let Some(test_path) = test_path {
                    let test = dataset::load_csv(test_path, *geometry)?;
                    return Ok((full, test));
                }
                full.require_nonempty()?;
                let n = full.n();
                let mut order: Vec<usize> = (0..n).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                order.shuffle(&mut rng);
                let n_train = ((n as f64) * split).round() as usize;
                let n_train = n_train.clamp(1, n - 1);
                let pick = |idx: &[usize]| {
                    let points = ndarray::Array2::from_shape_fn((idx.len(), full.dim()), |(i, j)| {
                        full.points()[[idx[i], j]]
                    });
                    let labels =
                        ndarray::Array1::from_shape_fn(idx.len(), |i| full.labels()[idx[i]]);
                    Dataset::new(points, labels, *geometry)
                };
                Ok((pick(&order[..n_train])?, pick(&order[n_train..])?))
            }
        }
    }

    /// Canonical one-line echo of every resolved setting, for provenance
    /// headers; deterministic for identical configs.
    pub fn resolved(&self) -> String {
        let mut pairs: Vec<(String, String)> = vec![
            ("branch".into(), self.branch.as_str().into()),
            ("svm.c".into(), trim_float(self.box_c)),
            ("svm.tol".into(), trim_float(self.svm_tol)),
            ("game.rounds".into(), self.rounds.to_string()),
            ("game.step_multiplier".into(), trim_float(self.step_multiplier)),
            ("game.projection_passes".into(), self.projection_passes.to_string()),
            ("langevin.tau".into(), self.langevin.tau.to_string()),
            ("langevin.chains".into(), self.langevin.chains.to_string()),
            (
                "langevin.zeta".into(),
                self.langevin.zeta.map_or("auto".into(), trim_float),
            ),
            (
                "langevin.xi".into(),
                self.langevin.xi.map_or("auto".into(), trim_float),
            ),
            (
                "langevin.init_variance_scale".into(),
                trim_float(self.langevin.init_variance_scale),
            ),
            ("langevin.top_k".into(), self.langevin.top_k.to_string()),
            (
                "langevin.clip_radius".into(),
                self.langevin.clip_radius.map_or("none".into(), trim_float),
            ),
            ("langevin.seed".into(), self.langevin.seed.to_string()),
            ("spherical.ell_max".into(), self.ell_max.to_string()),
        ];
        match &self.source {
            DatasetSource::Windmill {
                n_train,
                n_test,
                blades,
                radius,
                noise,
                seed,
            } => {
                pairs.push(("dataset.source".into(), "windmill".into()));
                pairs.push(("dataset.n_train".into(), n_train.to_string()));
                pairs.push(("dataset.n_test".into(), n_test.to_string()));
                pairs.push(("dataset.blades".into(), blades.to_string()));
                pairs.push(("dataset.radius".into(), trim_float(*radius)));
                pairs.push(("dataset.noise".into(), trim_float(*noise)));
                pairs.push(("dataset.seed".into(), seed.to_string()));
            }
            DatasetSource::SphereCheckerboard {
                n_train,
                n_test,
                bands,
                seed,
            } => {
                pairs.push(("dataset.source".into(), "sphere_checkerboard".into()));
                pairs.push(("dataset.n_train".into(), n_train.to_string()));
                pairs.push(("dataset.n_test".into(), n_test.to_string()));
                pairs.push(("dataset.bands".into(), bands.to_string()));
                pairs.push(("dataset.seed".into(), seed.to_string()));
            }
            DatasetSource::Csv {
                path,
                test_path,
                geometry,
                split,
                seed,
            } => {
                pairs.push(("dataset.source".into(), "csv".into()));
                pairs.push(("dataset.path".into(), path.display().to_string()));
                if let Some(tp) = test_path {
                    pairs.push(("dataset.test_path".into(), tp.display().to_string()));
                }
                pairs.push(("dataset.geometry".into(), geometry.as_str().into()));
                pairs.push(("dataset.split".into(), trim_float(*split)));
                pairs.push(("dataset.seed".into(), seed.to_string()));
            }
        }
        pairs.sort();
        let mut out = String::new();
        for (i, (k, v)) in pairs.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }
}

fn trim_float(x: f64) -> String {
    let s = format!("{x}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "branch=translation\ndataset.source=windmill\n";

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse_str(MINIMAL).unwrap();
        assert_eq!(cfg.rounds, 100);
        assert_eq!(cfg.box_c, 1.0);
        assert_eq!(cfg.langevin.chains, 500);
        assert_eq!(cfg.ell_max, 31);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{MINIMAL}bogus.key=1\n");
        assert!(matches!(
            RunConfig::parse_str(&text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = "branch=translation\nbranch=rotation\ndataset.source=windmill\n";
        assert!(matches!(RunConfig::parse_str(text), Err(Error::Config(_))));
    }

    #[test]
    fn rotation_needs_sphere() {
        let text = "branch=rotation\ndataset.source=windmill\n";
        assert!(matches!(RunConfig::parse_str(text), Err(Error::Config(_))));
        let ok = "branch=rotation\ndataset.source=sphere_checkerboard\n";
        assert!(RunConfig::parse_str(ok).is_ok());
    }

    #[test]
    fn seed_override_applies() {
        let mut cfg = RunConfig::parse_str(MINIMAL).unwrap();
        cfg.apply_seed_override(99);
        assert_eq!(cfg.langevin.seed, 99);
        match cfg.source {
            DatasetSource::Windmill { seed, .. } => assert_eq!(seed, 99),
            _ => unreachable!(),
        }
    }

    #[test]
    fn train_test_split_from_generator() {
        let cfg = RunConfig::parse_str(
            "branch=translation\ndataset.source=windmill\ndataset.n_train=30\ndataset.n_test=20\n",
        )
        .unwrap();
        let (train, test) = cfg.train_test().unwrap();
        assert_eq!(train.n(), 30);
        assert_eq!(test.n(), 20);
        assert_ne!(train.points().row(0), test.points().row(0));
    }

    #[test]
    fn resolved_echo_is_deterministic() {
        let a = RunConfig::parse_str(MINIMAL).unwrap().resolved();
        let b = RunConfig::parse_str(MINIMAL).unwrap().resolved();
        assert_eq!(a, b);
        assert!(a.contains("dataset.source=windmill"));
        assert!(a.contains("langevin.zeta=auto"));
    }
}
