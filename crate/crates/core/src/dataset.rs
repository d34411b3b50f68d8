//! Labeled datasets: CSV ingestion, the CSV writer, and the two synthetic
//! generators used throughout the test and benchmark harnesses.
//!
//! CSV layout is `label,coord_1,...,coord_d` with the label in {+1,-1}, `.`
//! decimal points and an optional single header row (detected by a
//! non-numeric first cell). The writer emits 17 significant digits so a
//! save/load round trip is bit-faithful.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Tolerance for unit-sphere validation of points that passed through text.
pub const SPHERE_LOAD_TOL: f64 = 1e-9;
/// Tolerance guaranteed by the sphere generator itself.
pub const SPHERE_GEN_TOL: f64 = 1e-12;

/// Whether points live in flat space or on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Euclidean,
    UnitSphere,
}

impl Geometry {
    pub fn as_str(&self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::UnitSphere => "unit_sphere",
        }
    }
}

/// An immutable labeled sample set.
///
/// Invariants enforced at construction: every label is +1 or -1, unit-sphere
/// data actually lies on the sphere, and `max_norm` caches `max_i |x_i|`.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Array2<f64>,
    labels: Array1<f64>,
    geometry: Geometry,
    max_norm: f64,
}

impl Dataset {
    pub fn new(points: Array2<f64>, labels: Array1<f64>, geometry: Geometry) -> Result<Self> {
        Self::with_tolerance(points, labels, geometry, SPHERE_LOAD_TOL)
    }

    fn with_tolerance(
        points: Array2<f64>,
        labels: Array1<f64>,
        geometry: Geometry,
        sphere_tol: f64,
    ) -> Result<Self> {
        if points.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                what: "dataset labels",
                expected: points.nrows(),
                found: labels.len(),
            });
        }
        for (i, &l) in labels.iter().enumerate() {
            if l != 1.0 && l != -1.0 {
                return Err(Error::InvalidLabel {
                    row: i + 1,
                    value: format!("{l}"),
                });
            }
        }
        let mut max_norm = 0.0f64;
        for (i, row) in points.rows().into_iter().enumerate() {
            let norm = row.dot(&row).sqrt();
            if !norm.is_finite() {
                return Err(Error::Domain(format!("non-finite point at data row {}", i + 1)));
            }
            if geometry == Geometry::UnitSphere && (norm - 1.0).abs() > sphere_tol {
                return Err(Error::NotOnSphere {
                    row: Some(i + 1),
                    norm,
                });
            }
            max_norm = max_norm.max(norm);
        }
        Ok(Dataset {
            points,
            labels,
            geometry,
            max_norm,
        })
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn labels(&self) -> &Array1<f64> {
        &self.labels
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Cached `max_i |x_i|` (the data norm bound).
    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    /// Fails unless the dataset is usable for training.
    pub fn require_nonempty(&self) -> Result<()> {
        if self.n() == 0 {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

/// Format a float with 17 significant digits (round-trips every f64).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Load a `label,coord...` CSV into a dataset.
///
/// The sphere invariant is validated, never repaired: a loaded point more
/// than 1e-9 away from unit norm is an error.
pub fn load_csv(path: &Path, geometry: Geometry) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, geometry)
}

fn parse_label(cell: &str) -> Option<f64> {
    let v: f64 = cell.trim().parse().ok()?;
    if v == 1.0 || v == -1.0 {
        Some(v)
    } else {
        None
    }
}

fn parse_csv(text: &str, geometry: Geometry) -> Result<Dataset> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    // Header detection: first cell of the first row does not parse as a number.
    if let Some(first) = lines.peek() {
        let first_cell = first.split(',').next().unwrap_or("");
        if first_cell.trim().parse::<f64>().is_err() {
            lines.next();
        }
    }

    let mut labels = Vec::new();
    let mut coords: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    for (row_idx, line) in lines.enumerate() {
        let row = row_idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        let d = cells.len() - 1;
        match dim {
            None => {
                if d == 0 {
                    return Err(Error::RaggedRows {
                        row,
                        expected: 2,
                        found: cells.len(),
                    });
                }
                dim = Some(d);
            }
            Some(expected) if expected != d => {
                return Err(Error::RaggedRows {
                    row,
                    expected: expected + 1,
                    found: cells.len(),
                });
            }
            _ => {}
        }
        let label = parse_label(cells[0]).ok_or_else(|| Error::InvalidLabel {
            row,
            value: cells[0].trim().to_string(),
        })?;
        labels.push(label);
        for cell in &cells[1..] {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Domain(format!("unparsable coordinate {:?} at data row {row}", cell.trim()))
            })?;
            coords.push(v);
        }
    }

    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let d = dim.unwrap();
    let points = Array2::from_shape_vec((n, d), coords).expect("consistent row lengths");
    Dataset::with_tolerance(points, Array1::from_vec(labels), geometry, SPHERE_LOAD_TOL)
}

/// Write a dataset in the exact format accepted by [`load_csv`].
pub fn save_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    for i in 0..data.n() {
        let label = if data.labels()[i] > 0.0 { "1" } else { "-1" };
        out.push_str(label);
        for &v in data.points().row(i) {
            out.push(',');
            let _ = write!(out, "{}", fmt_f64(v));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Labeling rule of the windmill task: the blade boundary spirals with
/// radius, `sign(sin(blades * theta + kappa * r))` with `kappa = blades / radius`.
pub fn windmill_label(blades: u32, radius: f64, x: f64, y: f64) -> f64 {
    let theta = y.atan2(x);
    let r = (x * x + y * y).sqrt();
    let kappa = blades as f64 / radius;
    let s = (blades as f64 * theta + kappa * r).sin();
    if s > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Sample `n` points uniformly in a disk and label them by [`windmill_label`],
/// flipping each label independently with probability `noise`.
pub fn gen_windmill(n: usize, blades: u32, radius: f64, noise: f64, seed: u64) -> Result<Dataset> {
    if blades == 0 {
        return Err(Error::InvalidParameter("windmill blades must be >= 1".into()));
    }
    if radius <= 0.0 {
        return Err(Error::InvalidParameter("windmill radius must be positive".into()));
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::InvalidParameter("windmill noise must be in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Array2::zeros((n, 2));
    let mut labels = Array1::zeros(n);
    for i in 0..n {
        let u_r: f64 = rng.gen();
        let u_t: f64 = rng.gen();
        let u_flip: f64 = rng.gen();
        let r = radius * u_r.sqrt();
        let theta = 2.0 * std::f64::consts::PI * u_t;
        let (x, y) = (r * theta.cos(), r * theta.sin());
        points[[i, 0]] = x;
        points[[i, 1]] = y;
        let mut label = windmill_label(blades, radius, x, y);
        if u_flip < noise {
            label = -label;
        }
        labels[i] = label;
    }
    Dataset::new(points, labels, Geometry::Euclidean)
}

/// Parity-cell rule of the sphere checkerboard: +1 iff
/// `floor(bands * theta / pi) + floor(bands * phi / pi)` is even, with
/// `theta` the polar and `phi` the azimuthal angle.
pub fn checkerboard_label(bands: u32, point: &[f64]) -> f64 {
    let theta = point[2].clamp(-1.0, 1.0).acos();
    let phi = point[1].atan2(point[0]);
    let b = bands as f64;
    let c1 = (b * theta / std::f64::consts::PI).floor() as i64;
    let c2 = (b * phi / std::f64::consts::PI).floor() as i64;
    if (c1 + c2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sample `n` points uniformly on the unit sphere (normalized Gaussians) and
/// label them with [`checkerboard_label`].
pub fn gen_sphere_checkerboard(n: usize, bands: u32, seed: u64) -> Result<Dataset> {
    if bands == 0 {
        return Err(Error::InvalidParameter("checkerboard bands must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Array2::zeros((n, 3));
    let mut labels = Array1::zeros(n);
    for i in 0..n {
        let mut p = [0.0f64; 3];
        loop {
            for c in &mut p {
                *c = StandardNormal.sample(&mut rng);
            }
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if norm > 1e-12 {
                for c in &mut p {
                    *c /= norm;
                }
                break;
            }
        }
        points[[i, 0]] = p[0];
        points[[i, 1]] = p[1];
        points[[i, 2]] = p[2];
        labels[i] = checkerboard_label(bands, &p);
    }
    Dataset::with_tolerance(points, labels, Geometry::UnitSphere, SPHERE_GEN_TOL)
}
