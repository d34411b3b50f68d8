//! Translation-invariant branch: the reweighted Fourier potential, its
//! gradient, batched evaluation over many frequencies, explicit cos/sin
//! feature maps, kernels defined by a finitely supported dual measure, and
//! kernel alignment.
//!
//! The batched path is the canonical implementation; the scalar `potential`
//! and `potential_grad` are one-row wrappers around it.

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mathx::sincos_slice;
use crate::spherical::{self, HarmonicIndex};

/// A Fourier mode: a frequency vector in flat space, or a spherical-harmonic
/// index on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Frequency(Array1<f64>),
    Harmonic(HarmonicIndex),
}

impl Mode {
    pub fn as_frequency(&self) -> Option<&Array1<f64>> {
        match self {
            Mode::Frequency(w) => Some(w),
            Mode::Harmonic(_) => None,
        }
    }

    pub fn as_harmonic(&self) -> Option<HarmonicIndex> {
        match self {
            Mode::Frequency(_) => None,
            Mode::Harmonic(h) => Some(*h),
        }
    }
}

/// One atom of a dual measure. The stored weight is the total mass of the
/// symmetrized pair {+mode, -mode}, split evenly between the two signed
/// modes (a self-conjugate mode carries the whole weight).
#[derive(Debug, Clone)]
pub struct Atom {
    pub mode: Mode,
    pub weight: f64,
}

/// A finitely supported symmetric measure over Fourier modes; the learned
/// kernel. Weights are strictly positive; spherical atoms are unique.
#[derive(Debug, Clone)]
pub struct DualMeasure {
    atoms: Vec<Atom>,
}

impl DualMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut seen = std::collections::HashSet::new();
        for atom in &atoms {
            if !(atom.weight > 0.0) || !atom.weight.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "measure weights must be strictly positive, got {}",
                    atom.weight
                )));
            }
            match &atom.mode {
                Mode::Frequency(w) => {
                    if w.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidParameter(
                            "frequency coordinates must be finite".into(),
                        ));
                    }
                }
                Mode::Harmonic(h) => {
                    if !seen.insert(*h) {
                        return Err(Error::InvalidParameter(format!(
                            "duplicate spherical atom ({}, {})",
                            h.ell, h.m
                        )));
                    }
                }
            }
        }
        Ok(DualMeasure { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass, i.e. the l1 norm of the measure (= k(x, x) on the
    /// translation-invariant branch).
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Explicit real feature representation: column pair (2t, 2t+1) holds
/// (cos<w_t, x_i>, sin<w_t, x_i>) for mode t.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub values: Array2<f64>,
    pub modes: Vec<Array1<f64>>,
}

fn check_alpha(data: &Dataset, alpha: &Array1<f64>) -> Result<()> {
    if alpha.len() != data.n() {
        return Err(Error::DimensionMismatch {
            what: "dual weights",
            expected: data.n(),
            found: alpha.len(),
        });
    }
    Ok(())
}

fn check_omega(data: &Dataset, len: usize) -> Result<()> {
    if len != data.dim() {
        return Err(Error::DimensionMismatch {
            what: "frequency",
            expected: data.dim(),
            found: len,
        });
    }
    Ok(())
}

/// Signed sample weights y_i * alpha_i.
fn signed_weights(data: &Dataset, alpha: &Array1<f64>) -> Vec<f64> {
    data.labels()
        .iter()
        .zip(alpha.iter())
        .map(|(&y, &a)| y * a)
        .collect()
}

struct RowScratch {
    angles: Vec<f64>,
    sin: Vec<f64>,
    cos: Vec<f64>,
    wsin: Vec<f64>,
    wcos: Vec<f64>,
}

impl RowScratch {
    fn new(n: usize) -> Self {
        RowScratch {
            angles: vec![0.0; n],
            sin: vec![0.0; n],
            cos: vec![0.0; n],
            wsin: vec![0.0; n],
            wcos: vec![0.0; n],
        }
    }
}

/// Four-lane sum; fixed association order, so results do not depend on how
/// work is scheduled.
fn sum_lanes(a: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut chunks = a.chunks_exact(4);
    for c in &mut chunks {
        acc[0] += c[0];
        acc[1] += c[1];
        acc[2] += c[2];
        acc[3] += c[3];
    }
    let mut tail = 0.0;
    for &v in chunks.remainder() {
        tail += v;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail
}

/// Four-lane dot product with fixed association order.
fn dot_lanes(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (&x, &y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail
}

/// Evaluate v and optionally its gradient at one frequency, over a columnar
/// copy of the sample block (one contiguous slice per coordinate). All loops
/// are over contiguous slices with a fixed accumulation order, so results
/// are identical no matter how rows are scheduled across threads.
fn eval_row(
    cols: &[Vec<f64>],
    w: &[f64],
    omega: &[f64],
    scratch: &mut RowScratch,
    grad_out: Option<&mut [f64]>,
) -> f64 {
    let n = w.len();
    let d = cols.len();
    let angles = &mut scratch.angles[..n];
    match d {
        2 => {
            let (w0, w1) = (omega[0], omega[1]);
            for ((ang, &x0), &x1) in angles.iter_mut().zip(&cols[0]).zip(&cols[1]) {
                *ang = x0 * w0 + x1 * w1;
            }
        }
        3 => {
            let (w0, w1, w2) = (omega[0], omega[1], omega[2]);
            for (((ang, &x0), &x1), &x2) in
                angles.iter_mut().zip(&cols[0]).zip(&cols[1]).zip(&cols[2])
            {
                *ang = x0 * w0 + x1 * w1 + x2 * w2;
            }
        }
        _ => {
            angles.fill(0.0);
            for (col, &wj) in cols.iter().zip(omega.iter()) {
                for (ang, &x) in angles.iter_mut().zip(col) {
                    *ang += x * wj;
                }
            }
        }
    }
    sincos_slice(
        &scratch.angles[..n],
        &mut scratch.sin[..n],
        &mut scratch.cos[..n],
    );
    for i in 0..n {
        scratch.wsin[i] = w[i] * scratch.sin[i];
        scratch.wcos[i] = w[i] * scratch.cos[i];
    }
    let c = sum_lanes(&scratch.wcos[..n]);
    let s = sum_lanes(&scratch.wsin[..n]);
    if let Some(grad) = grad_out {
        for j in 0..d {
            let a = dot_lanes(&scratch.wsin[..n], &cols[j]);
            let b = dot_lanes(&scratch.wcos[..n], &cols[j]);
            grad[j] = -2.0 * c * a + 2.0 * s * b;
        }
    }
    c * c + s * s
}

/// Columnar copy of the sample block.
fn to_columns(points: &[f64], n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![vec![0.0; n]; d];
    for (i, row) in points.chunks_exact(d).enumerate() {
        for (j, &v) in row.iter().enumerate() {
            cols[j][i] = v;
        }
    }
    cols
}

/// Reweighted Fourier potential v_alpha(omega) = |sum_i y_i a_i e^{i<w,x_i>}|^2.
pub fn potential(data: &Dataset, alpha: &Array1<f64>, omega: &Array1<f64>) -> Result<f64> {
    check_alpha(data, alpha)?;
    check_omega(data, omega.len())?;
    let w = signed_weights(data, alpha);
    let cols = to_columns(
        data.points().as_slice().expect("standard layout"),
        data.n(),
        data.dim(),
    );
    let mut scratch = RowScratch::new(data.n());
    Ok(eval_row(
        &cols,
        &w,
        omega.as_slice().expect("standard layout"),
        &mut scratch,
        None,
    ))
}

/// Gradient of the potential in omega.
pub fn potential_grad(
    data: &Dataset,
    alpha: &Array1<f64>,
    omega: &Array1<f64>,
) -> Result<Array1<f64>> {
    check_alpha(data, alpha)?;
    check_omega(data, omega.len())?;
    let w = signed_weights(data, alpha);
    let cols = to_columns(
        data.points().as_slice().expect("standard layout"),
        data.n(),
        data.dim(),
    );
    let mut scratch = RowScratch::new(data.n());
    let mut grad = vec![0.0; data.dim()];
    eval_row(
        &cols,
        &w,
        omega.as_slice().expect("standard layout"),
        &mut scratch,
        Some(&mut grad),
    );
    Ok(Array1::from_vec(grad))
}

/// Potential (and optionally gradients) at every row of `omegas`, computed
/// row-parallel with one pass over the samples per row.
pub fn potential_batch(
    data: &Dataset,
    alpha: &Array1<f64>,
    omegas: &Array2<f64>,
    with_grad: bool,
) -> Result<(Array1<f64>, Option<Array2<f64>>)> {
    check_alpha(data, alpha)?;
    check_omega(data, omegas.ncols())?;
    let n = data.n();
    let d = data.dim();
    let m = omegas.nrows();
    let w = signed_weights(data, alpha);
    let cols = to_columns(data.points().as_slice().expect("standard layout"), n, d);
    let omega_flat = omegas.as_slice().expect("standard layout");

    let mut values = vec![0.0; m];
    let mut grads = if with_grad { vec![0.0; m * d] } else { Vec::new() };

    let run = |(r, (value, grad_row)): (usize, (&mut f64, Option<&mut [f64]>)), scratch: &mut RowScratch| {
        *value = eval_row(&cols, &w, &omega_flat[r * d..(r + 1) * d], scratch, grad_row);
    };

    if with_grad {
        let work: Vec<_> = values.iter_mut().zip(grads.chunks_exact_mut(d).map(Some)).collect();
        if m >= 16 {
            work.into_par_iter()
                .enumerate()
                .for_each_init(|| RowScratch::new(n), |scratch, item| run(item, scratch));
        } else {
            let mut scratch = RowScratch::new(n);
            for item in work.into_iter().enumerate() {
                run(item, &mut scratch);
            }
        }
    } else {
        let work: Vec<_> = values.iter_mut().map(|v| (v, None)).collect();
        if m >= 16 {
            work.into_par_iter()
                .enumerate()
                .for_each_init(|| RowScratch::new(n), |scratch, item| run(item, scratch));
        } else {
            let mut scratch = RowScratch::new(n);
            for item in work.into_iter().enumerate() {
                run(item, &mut scratch);
            }
        }
    }

    let values = Array1::from_vec(values);
    let grads = if with_grad {
        Some(Array2::from_shape_vec((m, d), grads).expect("shape"))
    } else {
        None
    };
    Ok((values, grads))
}

/// Feature map of a list of frequencies: an n x 2T matrix of cos/sin pairs.
pub fn feature_map(data: &Dataset, modes: &[Array1<f64>]) -> Result<FeatureMatrix> {
    for m in modes {
        check_omega(data, m.len())?;
    }
    let n = data.n();
    let d = data.dim();
    let t = modes.len();
    let points = data.points().as_slice().expect("standard layout");
    let mut values = vec![0.0; n * 2 * t];
    values
        .par_chunks_exact_mut(2 * t)
        .enumerate()
        .for_each(|(i, out)| {
            let row = &points[i * d..(i + 1) * d];
            for (k, omega) in modes.iter().enumerate() {
                let mut angle = 0.0;
                for (a, b) in row.iter().zip(omega.iter()) {
                    angle += a * b;
                }
                let (s, c) = crate::mathx::sincos(angle);
                out[2 * k] = c;
                out[2 * k + 1] = s;
            }
        });
    Ok(FeatureMatrix {
        values: Array2::from_shape_vec((n, 2 * t), values).expect("shape"),
        modes: modes.to_vec(),
    })
}

/// Kernel defined by a dual measure, evaluated at one pair of points.
///
/// Translation-invariant atoms contribute weight * cos<w, x - x2>; spherical
/// atoms contribute weight * Re(Y(x) * conj(Y(x2))) of the symmetrized pair.
pub fn kernel_from_measure(measure: &DualMeasure, x: &[f64], x2: &[f64]) -> Result<f64> {
    if measure.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            what: "kernel arguments",
            expected: x.len(),
            found: x2.len(),
        });
    }
    let mut acc = 0.0;
    let mut harmonic_rows: Option<(Vec<num_complex::Complex64>, Vec<num_complex::Complex64>)> =
        None;
    let max_ell = measure
        .atoms()
        .iter()
        .filter_map(|a| a.mode.as_harmonic().map(|h| h.ell))
        .max();
    if let Some(ell_max) = max_ell {
        harmonic_rows = Some((
            spherical::eval_harmonics(x, ell_max)?,
            spherical::eval_harmonics(x2, ell_max)?,
        ));
    }
    for atom in measure.atoms() {
        match &atom.mode {
            Mode::Frequency(w) => {
                if w.len() != x.len() {
                    return Err(Error::DimensionMismatch {
                        what: "kernel frequency",
                        expected: x.len(),
                        found: w.len(),
                    });
                }
                let mut angle = 0.0;
                for j in 0..x.len() {
                    angle += w[j] * (x[j] - x2[j]);
                }
                let (_, c) = crate::mathx::sincos(angle);
                acc += atom.weight * c;
            }
            Mode::Harmonic(h) => {
                let (ya, yb) = harmonic_rows.as_ref().expect("rows built above");
                let idx = h.flat_index();
                acc += atom.weight * (ya[idx] * yb[idx].conj()).re;
            }
        }
    }
    Ok(acc)
}

/// Kernel alignment of a measure with the (alpha-reweighted) labels:
/// sum over atoms of weight * v_alpha(mode). Equals (Y alpha)^T G (Y alpha)
/// for the Gram matrix G of [`kernel_from_measure`].
pub fn alignment(data: &Dataset, alpha: &Array1<f64>, measure: &DualMeasure) -> Result<f64> {
    if measure.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let mut acc = 0.0;
    for atom in measure.atoms() {
        let v = match &atom.mode {
            Mode::Frequency(w) => potential(data, alpha, w)?,
            Mode::Harmonic(h) => spherical::sph_potential(data, alpha, *h)?,
        };
        acc += atom.weight * v;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_windmill, Geometry};
    use ndarray::array;
    use num_complex::Complex64;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_instance(
        rng: &mut ChaCha8Rng,
        n: usize,
        d: usize,
    ) -> (Dataset, Array1<f64>, Array1<f64>) {
        let points = Array2::from_shape_fn((n, d), |_| rng.gen_range(-1.5..1.5));
        let labels = Array1::from_shape_fn(n, |_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        let alpha = Array1::from_shape_fn(n, |_| rng.gen_range(0.0..2.0));
        let omega = Array1::from_shape_fn(d, |_| rng.gen_range(-5.0..5.0));
        (
            Dataset::new(points, labels, Geometry::Euclidean).unwrap(),
            alpha,
            omega,
        )
    }

    /// Independent oracle: complex phasor sum with num_complex.
    fn potential_oracle(data: &Dataset, alpha: &Array1<f64>, omega: &Array1<f64>) -> f64 {
        let mut z = Complex64::new(0.0, 0.0);
        for i in 0..data.n() {
            let angle: f64 = data.points().row(i).dot(omega);
            z += data.labels()[i] * alpha[i] * Complex64::new(0.0, angle).exp();
        }
        z.norm_sqr()
    }

    #[test]
    fn single_sample_is_one() {
        let data = Dataset::new(array![[0.3, -0.7]], array![1.0], Geometry::Euclidean).unwrap();
        let alpha = array![1.0];
        for omega in [array![0.0, 0.0], array![2.0, -3.0]] {
            assert!((potential(&data, &alpha, &omega).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_labels_cancel_at_zero() {
        let data = Dataset::new(
            array![[0.5, 0.5], [-0.5, -0.5]],
            array![1.0, -1.0],
            Geometry::Euclidean,
        )
        .unwrap();
        let alpha = array![1.0, 1.0];
        let v = potential(&data, &alpha, &array![0.0, 0.0]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn matches_complex_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (data, alpha, omega) = random_instance(&mut rng, 3, 2);
            let v = potential(&data, &alpha, &omega).unwrap();
            let want = potential_oracle(&data, &alpha, &omega);
            assert!((v - want).abs() < 1e-12, "v={v} want={want}");
        }
    }

    #[test]
    fn gradient_zero_for_single_sample() {
        let data = Dataset::new(array![[0.3, -0.7]], array![1.0], Geometry::Euclidean).unwrap();
        let g = potential_grad(&data, &array![2.0], &array![1.0, 1.0]).unwrap();
        assert!(g.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = 1e-5;
        for _ in 0..25 {
            let (data, alpha, omega) = random_instance(&mut rng, 6, 3);
            let grad = potential_grad(&data, &alpha, &omega).unwrap();
            for j in 0..3 {
                let mut wp = omega.clone();
                let mut wm = omega.clone();
                wp[j] += h;
                wm[j] -= h;
                let fd = (potential(&data, &alpha, &wp).unwrap()
                    - potential(&data, &alpha, &wm).unwrap())
                    / (2.0 * h);
                let scale = grad[j].abs().max(1.0);
                assert!(
                    (grad[j] - fd).abs() / scale < 1e-5,
                    "grad {} vs fd {}",
                    grad[j],
                    fd
                );
            }
        }
    }

    #[test]
    fn gradient_is_odd_in_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (data, alpha, omega) = random_instance(&mut rng, 5, 2);
            let g = potential_grad(&data, &alpha, &omega).unwrap();
            let gm = potential_grad(&data, &alpha, &omega.mapv(|v| -v)).unwrap();
            for j in 0..2 {
                assert!((g[j] + gm[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn potential_is_even_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..25 {
            let (data, alpha, omega) = random_instance(&mut rng, 8, 2);
            let v = potential(&data, &alpha, &omega).unwrap();
            let v_neg = potential(&data, &alpha, &omega.mapv(|x| -x)).unwrap();
            assert_eq!(v, v_neg);
            let bound = alpha.sum() * alpha.sum();
            assert!(v >= 0.0 && v <= bound + 1e-9 * bound.max(1.0));
        }
    }

    #[test]
    fn potential_scales_quadratically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (data, alpha, omega) = random_instance(&mut rng, 6, 2);
            let c = 2.75;
            let v1 = potential(&data, &alpha, &omega).unwrap();
            let v2 = potential(&data, &alpha.mapv(|a| c * a), &omega).unwrap();
            assert!((v2 - c * c * v1).abs() <= 1e-12 * v2.abs().max(1.0));
        }
    }

    #[test]
    fn batch_of_one_matches_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (data, alpha, omega) = random_instance(&mut rng, 7, 2);
        let omegas = Array2::from_shape_vec((1, 2), omega.to_vec()).unwrap();
        let (vals, grads) = potential_batch(&data, &alpha, &omegas, true).unwrap();
        assert_eq!(vals[0], potential(&data, &alpha, &omega).unwrap());
        let g = potential_grad(&data, &alpha, &omega).unwrap();
        assert_eq!(grads.unwrap().row(0).to_owned(), g);
    }

    #[test]
    fn batch_matches_scalar_path_elementwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (data, alpha, _) = random_instance(&mut rng, 11, 3);
        let omegas = Array2::from_shape_fn((500, 3), |_| rng.gen_range(-8.0..8.0));
        let (vals, grads) = potential_batch(&data, &alpha, &omegas, true).unwrap();
        let grads = grads.unwrap();
        let mut max_dv = 0.0f64;
        let mut max_dg = 0.0f64;
        for r in 0..500 {
            let omega = omegas.row(r).to_owned();
            max_dv = max_dv.max((vals[r] - potential(&data, &alpha, &omega).unwrap()).abs());
            let g = potential_grad(&data, &alpha, &omega).unwrap();
            for j in 0..3 {
                max_dg = max_dg.max((grads[[r, j]] - g[j]).abs());
            }
        }
        assert!(max_dv <= 1e-10, "values diverge: {max_dv:e}");
        assert!(max_dg <= 1e-10, "gradients diverge: {max_dg:e}");
    }

    #[test]
    fn batch_zero_rows_collapse() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (data, alpha, _) = random_instance(&mut rng, 9, 2);
        let omegas = Array2::zeros((4, 2));
        let (vals, _) = potential_batch(&data, &alpha, &omegas, false).unwrap();
        let sum: f64 = data
            .labels()
            .iter()
            .zip(alpha.iter())
            .map(|(&y, &a)| y * a)
            .sum();
        for &v in vals.iter() {
            assert!((v - sum * sum).abs() < 1e-12 * (sum * sum).max(1.0));
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let data = Dataset::new(array![[0.0, 0.0]], array![1.0], Geometry::Euclidean).unwrap();
        assert!(matches!(
            potential(&data, &array![1.0], &array![0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            potential(&data, &array![1.0, 1.0], &array![0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_frequency_features() {
        let data = gen_windmill(5, 4, 1.0, 0.0, 0).unwrap();
        let fm = feature_map(&data, &[array![0.0, 0.0]]).unwrap();
        for i in 0..5 {
            assert_eq!(fm.values[[i, 0]], 1.0);
            assert_eq!(fm.values[[i, 1]], 0.0);
        }
    }

    #[test]
    fn feature_map_shape() {
        let data = gen_windmill(7, 4, 1.0, 0.0, 0).unwrap();
        let modes: Vec<_> = (0..3).map(|k| array![k as f64, 1.0]).collect();
        let fm = feature_map(&data, &modes).unwrap();
        assert_eq!(fm.values.shape(), &[7, 6]);
        assert!(fm.values.iter().all(|&v| (-1.0..=1.0).contains(&v)));
    }

    /// (1/T) Phi Phi^T must equal the Gram matrix of the uniform symmetrized
    /// measure over the same modes, with no sampling error.
    #[test]
    fn features_realize_kernel_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (data, _, _) = random_instance(&mut rng, 12, 2);
        let t = 9;
        let modes: Vec<Array1<f64>> =
            (0..t).map(|_| Array1::from_shape_fn(2, |_| rng.gen_range(-6.0..6.0))).collect();
        let fm = feature_map(&data, &modes).unwrap();
        let atoms = modes
            .iter()
            .map(|m| Atom {
                mode: Mode::Frequency(m.clone()),
                weight: 1.0 / t as f64,
            })
            .collect();
        let measure = DualMeasure::new(atoms).unwrap();
        for i in 0..data.n() {
            for j in 0..data.n() {
                let gram: f64 = fm.values.row(i).dot(&fm.values.row(j)) / t as f64;
                let k = kernel_from_measure(
                    &measure,
                    data.points().row(i).as_slice().unwrap(),
                    data.points().row(j).as_slice().unwrap(),
                )
                .unwrap();
                assert!((gram - k).abs() <= 1e-12, "i={i} j={j}: {gram} vs {k}");
            }
        }
    }

    #[test]
    fn constant_kernel_from_zero_mode() {
        let measure = DualMeasure::new(vec![Atom {
            mode: Mode::Frequency(array![0.0, 0.0]),
            weight: 1.0,
        }])
        .unwrap();
        assert_eq!(kernel_from_measure(&measure, &[0.3, 1.0], &[-2.0, 0.1]).unwrap(), 1.0);
    }

    #[test]
    fn normalized_measure_has_unit_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let weights = [0.2, 0.3, 0.1, 0.25, 0.15];
        let atoms: Vec<Atom> = weights
            .iter()
            .map(|&w| Atom {
                mode: Mode::Frequency(Array1::from_shape_fn(2, |_| rng.gen_range(-4.0..4.0))),
                weight: w,
            })
            .collect();
        let measure = DualMeasure::new(atoms).unwrap();
        let x = [0.77, -0.2];
        let k = kernel_from_measure(&measure, &x, &x).unwrap();
        assert!((k - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn kernel_matches_direct_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let atoms: Vec<Atom> = (0..5)
                .map(|_| Atom {
                    mode: Mode::Frequency(Array1::from_shape_fn(3, |_| rng.gen_range(-5.0..5.0))),
                    weight: rng.gen_range(0.01..1.0),
                })
                .collect();
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x2: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut want = 0.0;
            for atom in &atoms {
                let w = atom.mode.as_frequency().unwrap();
                let angle: f64 = (0..3).map(|j| w[j] * (x[j] - x2[j])).sum();
                want += atom.weight * angle.cos();
            }
            let measure = DualMeasure::new(atoms).unwrap();
            let k = kernel_from_measure(&measure, &x, &x2).unwrap();
            assert!((k - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn alignment_constant_kernel() {
        let data = Dataset::new(
            array![[0.1, 0.2], [0.3, -0.1], [-0.2, 0.6], [0.0, 0.0]],
            array![1.0, 1.0, -1.0, 1.0],
            Geometry::Euclidean,
        )
        .unwrap();
        let alpha = Array1::ones(4);
        let measure = DualMeasure::new(vec![Atom {
            mode: Mode::Frequency(array![0.0, 0.0]),
            weight: 1.0,
        }])
        .unwrap();
        let got = alignment(&data, &alpha, &measure).unwrap();
        let ysum: f64 = data.labels().sum();
        assert!((got - ysum * ysum).abs() < 1e-12);
    }

    #[test]
    fn alignment_equals_gram_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let (data, alpha, _) = random_instance(&mut rng, 4, 2);
            let atoms: Vec<Atom> = (0..3)
                .map(|_| Atom {
                    mode: Mode::Frequency(Array1::from_shape_fn(2, |_| rng.gen_range(-4.0..4.0))),
                    weight: rng.gen_range(0.1..0.8),
                })
                .collect();
            let measure = DualMeasure::new(atoms).unwrap();
            let mut quad = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    let g = kernel_from_measure(
                        &measure,
                        data.points().row(i).as_slice().unwrap(),
                        data.points().row(j).as_slice().unwrap(),
                    )
                    .unwrap();
                    quad += data.labels()[i] * alpha[i] * data.labels()[j] * alpha[j] * g;
                }
            }
            let got = alignment(&data, &alpha, &measure).unwrap();
            assert!((got - quad).abs() <= 1e-10, "{got} vs {quad}");
        }
    }

    #[test]
    fn alignment_is_linear_in_the_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (data, alpha, _) = random_instance(&mut rng, 5, 2);
        let m1: Vec<Atom> = (0..2)
            .map(|_| Atom {
                mode: Mode::Frequency(Array1::from_shape_fn(2, |_| rng.gen_range(-3.0..3.0))),
                weight: rng.gen_range(0.1..1.0),
            })
            .collect();
        let m2: Vec<Atom> = (0..3)
            .map(|_| Atom {
                mode: Mode::Frequency(Array1::from_shape_fn(2, |_| rng.gen_range(-3.0..3.0))),
                weight: rng.gen_range(0.1..1.0),
            })
            .collect();
        let a1 = alignment(&data, &alpha, &DualMeasure::new(m1.clone()).unwrap()).unwrap();
        let a2 = alignment(&data, &alpha, &DualMeasure::new(m2.clone()).unwrap()).unwrap();
        let joined = DualMeasure::new(m1.into_iter().chain(m2).collect()).unwrap();
        let all = alignment(&data, &alpha, &joined).unwrap();
        assert!((all - (a1 + a2)).abs() <= 1e-12 * all.abs().max(1.0));
    }

    /// Splitting a large sample in half changes the normalized potential only
    /// slightly, uniformly over a frequency grid.
    #[test]
    fn potential_concentrates_across_halves() {
        let mut hits = 0;
        for seed in 0..10u64 {
            let data = gen_windmill(4000, 4, 1.0, 0.0, 100 + seed).unwrap();
            let half = |lo: usize, hi: usize| {
                Dataset::new(
                    data.points().slice(ndarray::s![lo..hi, ..]).to_owned(),
                    data.labels().slice(ndarray::s![lo..hi]).to_owned(),
                    Geometry::Euclidean,
                )
                .unwrap()
            };
            let d1 = half(0, 2000);
            let d2 = half(2000, 4000);
            let a1 = Array1::ones(2000);
            let mut worst = 0.0f64;
            for i in 0..20 {
                for j in 0..20 {
                    let omega = array![
                        -10.0 + 20.0 * i as f64 / 19.0,
                        -10.0 + 20.0 * j as f64 / 19.0
                    ];
                    if omega.dot(&omega).sqrt() > 10.0 {
                        continue;
                    }
                    let v1 = potential(&d1, &a1, &omega).unwrap() / (2000.0 * 2000.0);
                    let v2 = potential(&d2, &a1, &omega).unwrap() / (2000.0 * 2000.0);
                    worst = worst.max((v1 - v2).abs());
                }
            }
            if worst <= 0.05 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "only {hits}/10 seeds concentrated");
    }
}
