//! Rotation-invariant branch on the 2-sphere: Legendre polynomials,
//! orthonormal complex spherical harmonics, harmonic space dimensions, the
//! discrete Fourier potential over indices (ell, m), and its enumeration-based
//! maximizer.
//!
//! Conventions: unit L2 normalization on the sphere, Condon-Shortley phase
//! for m >= 0, and Y_{ell,-m} defined as conj(Y_{ell,m}) so that the index
//! involution (ell, m) -> (ell, -m) is exactly complex conjugation.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dataset::{Dataset, Geometry};
use crate::error::{Error, Result};
use crate::mathx::sincos;

/// Index (ell, m) of a spherical harmonic, |m| <= ell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    pub ell: u32,
    pub m: i32,
}

impl HarmonicIndex {
    pub fn new(ell: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > ell {
            return Err(Error::InvalidParameter(format!(
                "harmonic index requires |m| <= ell, got ({ell}, {m})"
            )));
        }
        Ok(HarmonicIndex { ell, m })
    }

    /// The conjugate index: -(ell, m) = (ell, -m).
    pub fn conjugate(self) -> Self {
        HarmonicIndex {
            ell: self.ell,
            m: -self.m,
        }
    }

    /// Position in a flat table enumerating all indices by (ell, m) order.
    pub fn flat_index(self) -> usize {
        let ell = self.ell as i64;
        (ell * ell + ell + self.m as i64) as usize
    }
}

/// Number of indices enumerated up to degree `ell_max` inclusive.
pub fn table_len(ell_max: u32) -> usize {
    let l = ell_max as usize + 1;
    l * l
}

fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Dimension N(d, ell) of the degree-ell harmonic space on S^{d-1}:
/// C(d-1+ell, ell) - C(d-3+ell, ell-2). Equals 2*ell + 1 when d = 3.
pub fn harmonic_dim(d: u32, ell: u32) -> u64 {
    let n = (d as i64 - 1) + ell as i64;
    (binomial(n, ell as i64) - binomial(n - 2, ell as i64 - 2)) as u64
}

/// Gegenbauer polynomial in the normalization P_ell(1) = 1. Only d = 3 is
/// supported, where it is the Legendre polynomial, evaluated by the
/// three-term recurrence.
pub fn gegenbauer(d: usize, ell: u32, t: f64) -> Result<f64> {
    if d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if t.abs() > 1.0 + 1e-12 || !t.is_finite() {
        return Err(Error::Domain(format!("legendre argument {t} outside [-1, 1]")));
    }
    let t = t.clamp(-1.0, 1.0);
    if ell == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = t;
    for k in 1..ell {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Evaluate every Y_{ell,m}(x) for 0 <= ell <= ell_max, |m| <= ell, as a flat
/// row indexed by [`HarmonicIndex::flat_index`]. `x` must be a unit 3-vector.
pub fn eval_harmonics(x: &[f64], ell_max: u32) -> Result<Vec<Complex64>> {
    if x.len() != 3 {
        return Err(Error::UnsupportedDimension(x.len()));
    }
    let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnSphere { row: None, norm });
    }
    let cos_t = x[2].clamp(-1.0, 1.0);
    let sin_t = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let phi = x[1].atan2(x[0]);
    let l = ell_max as usize;

    // q[ell][m] = fully normalized associated Legendre (Condon-Shortley
    // phase), so that Y_{ell,m} = q * e^{i m phi} for m >= 0.
    let mut q = vec![0.0f64; (l + 1) * (l + 2) / 2];
    let at = |ell: usize, m: usize| ell * (ell + 1) / 2 + m;
    q[0] = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for m in 1..=l {
        let mf = m as f64;
        q[at(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t * q[at(m - 1, m - 1)];
    }
    for m in 0..l {
        let mf = m as f64;
        q[at(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * cos_t * q[at(m, m)];
    }
    for m in 0..=l {
        for ell in (m + 2)..=l {
            let lf = ell as f64;
            let mf = m as f64;
            let alpha =
                ((2.0 * lf + 1.0) * (2.0 * lf - 1.0) / ((lf - mf) * (lf + mf))).sqrt();
            let beta = ((2.0 * lf + 1.0) * (lf + mf - 1.0) * (lf - mf - 1.0)
                / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
                .sqrt();
            q[at(ell, m)] = alpha * cos_t * q[at(ell - 1, m)] - beta * q[at(ell - 2, m)];
        }
    }

    let mut row = vec![Complex64::new(0.0, 0.0); table_len(ell_max)];
    for m in 0..=l {
        let (s, c) = sincos(m as f64 * phi);
        let phase = Complex64::new(c, s);
        for ell in m..=l {
            let y = q[at(ell, m)] * phase;
            let base = ell * ell + ell;
            row[base + m] = y;
            if m > 0 {
                row[base - m] = y.conj();
            }
        }
    }
    Ok(row)
}

/// Precomputed per-sample harmonic evaluations for a dataset.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    pub ell_max: u32,
    /// n x (ell_max + 1)^2 complex values.
    pub values: Array2<Complex64>,
}

impl HarmonicTable {
    pub fn build(data: &Dataset, ell_max: u32) -> Result<Self> {
        if data.geometry() != Geometry::UnitSphere {
            return Err(Error::GeometryMismatch(
                "harmonic table requires unit-sphere data".into(),
            ));
        }
        let n = data.n();
        let width = table_len(ell_max);
        let mut flat = vec![Complex64::new(0.0, 0.0); n * width];
        let points = data.points();
        let rows: Result<Vec<()>> = flat
            .par_chunks_exact_mut(width)
            .enumerate()
            .map(|(i, out)| {
                let row = eval_harmonics(points.row(i).as_slice().expect("layout"), ell_max)?;
                out.copy_from_slice(&row);
                Ok(())
            })
            .collect();
        rows?;
        Ok(HarmonicTable {
            ell_max,
            values: Array2::from_shape_vec((n, width), flat).expect("shape"),
        })
    }

    /// v_alpha over every index: |sum_i w_i Y_{ell,m}(x_i)|^2 with
    /// w = y * alpha, laid out by flat index. Accumulation order is fixed.
    pub fn weighted_potentials(&self, w: &[f64]) -> Vec<f64> {
        let width = table_len(self.ell_max);
        let mut sums = vec![Complex64::new(0.0, 0.0); width];
        for (i, &wi) in w.iter().enumerate() {
            let row = self.values.row(i);
            let row = row.as_slice().expect("layout");
            for (acc, &y) in sums.iter_mut().zip(row.iter()) {
                *acc += wi * y;
            }
        }
        sums.iter().map(|z| z.norm_sqr()).collect()
    }
}

fn check_sphere_inputs(data: &Dataset, alpha: &Array1<f64>) -> Result<()> {
    if data.geometry() != Geometry::UnitSphere {
        return Err(Error::GeometryMismatch(
            "spherical potential requires unit-sphere data".into(),
        ));
    }
    if alpha.len() != data.n() {
        return Err(Error::DimensionMismatch {
            what: "dual weights",
            expected: data.n(),
            found: alpha.len(),
        });
    }
    Ok(())
}

/// Discrete Fourier potential v_alpha(ell, m) = |sum_i y_i a_i Y_{ell,m}(x_i)|^2.
pub fn sph_potential(data: &Dataset, alpha: &Array1<f64>, index: HarmonicIndex) -> Result<f64> {
    check_sphere_inputs(data, alpha)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..data.n() {
        let row = eval_harmonics(data.points().row(i).as_slice().expect("layout"), index.ell)?;
        acc += data.labels()[i] * alpha[i] * row[index.flat_index()];
    }
    Ok(acc.norm_sqr())
}

/// Maximize the discrete potential over all indices with ell <= ell_max.
/// Ties break toward the smallest (ell, then m).
pub fn enumerate_max(
    data: &Dataset,
    alpha: &Array1<f64>,
    ell_max: u32,
) -> Result<(HarmonicIndex, f64)> {
    check_sphere_inputs(data, alpha)?;
    data.require_nonempty()?;
    let table = HarmonicTable::build(data, ell_max)?;
    let w: Vec<f64> = data
        .labels()
        .iter()
        .zip(alpha.iter())
        .map(|(&y, &a)| y * a)
        .collect();
    Ok(argmax_potential(&table.weighted_potentials(&w), ell_max))
}

/// Argmax over a flat potential table, in (ell asc, m asc) order with strict
/// improvement, which implements the smallest-(ell, m) tie break.
pub fn argmax_potential(values: &[f64], ell_max: u32) -> (HarmonicIndex, f64) {
    let mut best = (HarmonicIndex { ell: 0, m: 0 }, f64::NEG_INFINITY);
    for ell in 0..=ell_max {
        for m in -(ell as i32)..=(ell as i32) {
            let idx = HarmonicIndex { ell, m };
            let v = values[idx.flat_index()];
            if v > best.1 {
                best = (idx, v);
            }
        }
    }
    best
}
