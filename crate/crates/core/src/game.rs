//! The min-max boosting loop: online gradient ascent on the SVM dual against
//! best-response Fourier peaks, with alternating box/hyperplane projection.
//! Produces the learned measure, its explicit feature matrix, and a
//! per-round trace.

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::dataset::{Dataset, Geometry};
use crate::error::{Error, Result};
use crate::fourier::{self, Atom, DualMeasure, Mode};
use crate::langevin::LangevinParams;
use crate::mathx::sincos;
use crate::spherical::{argmax_potential, HarmonicTable};

/// SVM dual variables together with their box constraint.
#[derive(Debug, Clone)]
pub struct DualWeights {
    pub alpha: Array1<f64>,
    pub box_c: f64,
}

/// Alternating projection onto {0 <= a <= C, y^T a = 0}: `passes` rounds of
/// (clip to the box, then exact hyperplane step). The hyperplane step comes
/// last, so y^T a vanishes to round-off at return; the box holds within the
/// final inter-pass drift.
pub fn project_feasible(
    raw: &Array1<f64>,
    labels: &Array1<f64>,
    box_c: f64,
    passes: usize,
) -> Result<DualWeights> {
    if raw.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "projection labels",
            expected: raw.len(),
            found: labels.len(),
        });
    }
    if passes < 1 {
        return Err(Error::InvalidParameter("projection passes must be >= 1".into()));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidParameter("projection labels must be +1/-1".into()));
    }
    let n = raw.len() as f64;
    let mut alpha = raw.clone();
    for _ in 0..passes {
        alpha.mapv_inplace(|v| v.clamp(0.0, box_c));
        let shift = labels.dot(&alpha) / n;
        alpha.zip_mut_with(labels, |a, &y| *a -= shift * y);
    }
    Ok(DualWeights { alpha, box_c })
}

/// Largest per-coordinate distance outside the box [0, C].
pub fn box_violation(alpha: &Array1<f64>, box_c: f64) -> f64 {
    alpha
        .iter()
        .map(|&a| (-a).max(a - box_c).max(0.0))
        .fold(0.0, f64::max)
}

/// Box tolerance the boosting iterates are held to.
pub const BOX_TOL: f64 = 1e-6;

/// Repeat `passes`-round projection blocks until the box violation drops
/// under `box_tol * C` (the alternation contracts it by roughly the clipped
/// fraction per pass, so a few blocks suffice). The hyperplane is exact
/// after every block.
pub fn project_until_feasible(
    raw: &Array1<f64>,
    labels: &Array1<f64>,
    box_c: f64,
    passes: usize,
    box_tol: f64,
) -> Result<DualWeights> {
    let mut dual = project_feasible(raw, labels, box_c, passes)?;
    for _ in 0..10_000 {
        if box_violation(&dual.alpha, box_c) <= box_tol * box_c {
            return Ok(dual);
        }
        dual = project_feasible(&dual.alpha, labels, box_c, passes)?;
    }
    Err(Error::Solver(
        "alternating projection did not reach the box tolerance".into(),
    ))
}

/// Dual l1-SVM objective F(alpha, lambda) = 1^T alpha - 0.5 sum_atoms w v_alpha(mode).
pub fn dual_objective(data: &Dataset, alpha: &Array1<f64>, measure: &DualMeasure) -> Result<f64> {
    Ok(alpha.sum() - 0.5 * fourier::alignment(data, alpha, measure)?)
}

/// Gradient of F(alpha, delta_w + delta_{-w}) in alpha:
/// g = 1 - 2 Y Re(<Phi, Y alpha> conj(Phi)), with Phi_i the complex feature
/// of sample i at the round's mode.
pub fn dual_gradient(
    alpha: &Array1<f64>,
    labels: &Array1<f64>,
    phi: &[Complex64],
) -> Result<Array1<f64>> {
    let n = alpha.len();
    if labels.len() != n || phi.len() != n {
        return Err(Error::DimensionMismatch {
            what: "dual gradient inputs",
            expected: n,
            found: labels.len().min(phi.len()),
        });
    }
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        s += labels[i] * alpha[i] * phi[i];
    }
    let mut g = Array1::zeros(n);
    for i in 0..n {
        g[i] = 1.0 - 2.0 * labels[i] * (s * phi[i].conj()).re;
    }
    Ok(g)
}

/// One boosting round in the trace.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    pub mode: Mode,
    /// Peak value v_t reported by the mode player (the margin estimate rho).
    pub peak_value: f64,
    /// F(alpha_t, delta_{w_t} + delta_{-w_t}) = 1^T alpha_t - v_t.
    pub objective: f64,
    /// Step size eta_t used for the ascent after this round.
    pub step_size: f64,
}

/// Full per-iteration history of a boosting run.
#[derive(Debug, Clone, Default)]
pub struct BoostTrace {
    pub records: Vec<RoundRecord>,
}

/// The learned kernel: normalized dual measure, atom multiplicities (how
/// many rounds selected each atom), trace, and the final dual variables.
#[derive(Debug, Clone)]
pub struct LearnedKernel {
    pub measure: DualMeasure,
    pub multiplicities: Vec<u32>,
    pub trace: BoostTrace,
    pub geometry: Geometry,
    pub final_alpha: Array1<f64>,
    pub rounds: usize,
    pub box_c: f64,
}

impl LearnedKernel {
    /// Rebuild the explicit feature matrix for any dataset with matching
    /// geometry/dimension.
    pub fn featurize(&self, data: &Dataset) -> Result<Array2<f64>> {
        measure_features(data, &self.measure, &self.multiplicities)
    }
}

/// How the mode player answers each round.
#[derive(Debug, Clone)]
pub enum PeakFinder {
    /// Diffusion search over continuous frequencies.
    Langevin(LangevinParams),
    /// Exhaustive scan of spherical-harmonic indices up to ell_max.
    Enumerate { ell_max: u32 },
}

/// Boosting-loop parameters. The step size is
/// eta_t = step_multiplier * D / (G sqrt(t)) with D = C sqrt(n) and
/// G = (1 + 2C) sqrt(n).
#[derive(Debug, Clone)]
pub struct BoostConfig {
    pub box_c: f64,
    pub rounds: usize,
    pub step_multiplier: f64,
    pub projection_passes: usize,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            box_c: 1.0,
            rounds: 100,
            step_multiplier: 1.0,
            projection_passes: 10,
        }
    }
}

pub struct BoostOutput {
    pub kernel: LearnedKernel,
    pub features: Array2<f64>,
}

/// Complex per-sample feature of one mode.
fn mode_phi(data: &Dataset, mode: &Mode, table: Option<&HarmonicTable>) -> Result<Vec<Complex64>> {
    match mode {
        Mode::Frequency(omega) => {
            let points = data.points();
            let mut phi = Vec::with_capacity(data.n());
            for i in 0..data.n() {
                let angle = points.row(i).dot(omega);
                let (s, c) = sincos(angle);
                phi.push(Complex64::new(c, s));
            }
            Ok(phi)
        }
        Mode::Harmonic(h) => {
            let table = table.expect("harmonic table built for spherical rounds");
            let idx = h.flat_index();
            Ok((0..data.n()).map(|i| table.values[[i, idx]]).collect())
        }
    }
}

/// Explicit real features of a measure: per atom, the translation-invariant
/// pair {cos, sin}, or the spherical pair {Re Y, Im Y} scaled by sqrt(2)
/// (single column Y for m = 0); a merged atom's columns are scaled by
/// sqrt(multiplicity).
pub fn measure_features(
    data: &Dataset,
    measure: &DualMeasure,
    multiplicities: &[u32],
) -> Result<Array2<f64>> {
    if multiplicities.len() != measure.len() {
        return Err(Error::DimensionMismatch {
            what: "atom multiplicities",
            expected: measure.len(),
            found: multiplicities.len(),
        });
    }
    let n = data.n();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let max_ell = measure
        .atoms()
        .iter()
        .filter_map(|a| a.mode.as_harmonic().map(|h| h.ell))
        .max();
    let table = match max_ell {
        Some(ell_max) => Some(HarmonicTable::build(data, ell_max)?),
        None => None,
    };
    for (atom, &count) in measure.atoms().iter().zip(multiplicities.iter()) {
        let root = (count as f64).sqrt();
        match &atom.mode {
            Mode::Frequency(_) => {
                let phi = mode_phi(data, &atom.mode, None)?;
                columns.push(phi.iter().map(|z| root * z.re).collect());
                columns.push(phi.iter().map(|z| root * z.im).collect());
            }
            Mode::Harmonic(h) => {
                let phi = mode_phi(data, &atom.mode, table.as_ref())?;
                if h.m == 0 {
                    columns.push(phi.iter().map(|z| root * z.re).collect());
                } else {
                    let scale = root * 2.0f64.sqrt();
                    columns.push(phi.iter().map(|z| scale * z.re).collect());
                    columns.push(phi.iter().map(|z| scale * z.im).collect());
                }
            }
        }
    }
    let p = columns.len();
    let mut values = Array2::zeros((n, p));
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            values[[i, j]] = col[i];
        }
    }
    Ok(values)
}

fn round_seed(base: u64, round: usize) -> u64 {
    base ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Run the boosting loop.
pub fn boost(data: &Dataset, config: &BoostConfig, finder: &PeakFinder) -> Result<BoostOutput> {
    boost_observed(data, config, finder, |_, _| {})
}

/// [`boost`] with a per-update observer receiving the new trace records and
/// the projected dual variables after each ascent step.
pub fn boost_observed(
    data: &Dataset,
    config: &BoostConfig,
    finder: &PeakFinder,
    mut observer: impl FnMut(&[RoundRecord], &DualWeights),
) -> Result<BoostOutput> {
    data.require_nonempty()?;
    let n = data.n();
    if n < 2 {
        return Err(Error::DegenerateData("boosting needs at least two samples".into()));
    }
    let labels = data.labels();
    if !(labels.iter().any(|&y| y > 0.0) && labels.iter().any(|&y| y < 0.0)) {
        return Err(Error::DegenerateData("boosting needs both classes present".into()));
    }
    if config.rounds < 1 {
        return Err(Error::InvalidParameter("boosting rounds must be >= 1".into()));
    }
    if !(config.box_c > 0.0) {
        return Err(Error::InvalidParameter("box constraint C must be positive".into()));
    }
    if let PeakFinder::Enumerate { .. } = finder {
        if data.geometry() != Geometry::UnitSphere {
            return Err(Error::GeometryMismatch(
                "harmonic enumeration requires unit-sphere data".into(),
            ));
        }
    }

    let c = config.box_c;
    let t_total = config.rounds;
    let nf = n as f64;
    let diameter = c * nf.sqrt();
    let lipschitz = (1.0 + 2.0 * c) * nf.sqrt();

    let table = match finder {
        PeakFinder::Enumerate { ell_max } => Some(HarmonicTable::build(data, *ell_max)?),
        PeakFinder::Langevin(_) => None,
    };
    let sigma = match finder {
        PeakFinder::Langevin(_) => Some(crate::langevin::search_sigma(data)?),
        PeakFinder::Enumerate { .. } => None,
    };

    let mut dual = project_until_feasible(
        &Array1::from_elem(n, c / 2.0),
        labels,
        c,
        config.projection_passes,
        BOX_TOL,
    )?;
    let mut atoms: Vec<(Mode, u32)> = Vec::new();
    let mut harmonic_slot: HashMap<crate::spherical::HarmonicIndex, usize> = HashMap::new();
    let mut records: Vec<RoundRecord> = Vec::new();

    let mut round = 1usize;
    while round <= t_total {
        // The projection holds the box only to its drift tolerance, so the
        // iterate may dip a hair below zero; the mode player sees it clamped.
        // A fully collapsed dual (all zeros, flat potential) falls back to
        // uniform weights, for which any informative peak is a valid choice.
        let mut peak_alpha = dual.alpha.mapv(|a| a.max(0.0));
        if peak_alpha.iter().all(|&a| a == 0.0) {
            peak_alpha.fill(1.0 / n as f64);
        }
        let peaks: Vec<(Mode, f64)> = match finder {
            PeakFinder::Langevin(params) => {
                let mut p = params.clone();
                p.seed = round_seed(params.seed, round);
                p.top_k = params.top_k.min(t_total - round + 1).max(1);
                crate::langevin::find_peak_with_sigma(
                    data,
                    &peak_alpha,
                    &p,
                    sigma.expect("computed for the diffusion branch"),
                )?
                .into_iter()
                .map(|peak| (Mode::Frequency(peak.omega), peak.value))
                .collect()
            }
            PeakFinder::Enumerate { ell_max } => {
                let table = table.as_ref().expect("built above");
                let w: Vec<f64> = labels
                    .iter()
                    .zip(peak_alpha.iter())
                    .map(|(&y, &a)| y * a)
                    .collect();
                let (idx, value) = argmax_potential(&table.weighted_potentials(&w), *ell_max);
                vec![(Mode::Harmonic(idx), value)]
            }
        };

        let eta = config.step_multiplier * diameter / (lipschitz * (round as f64).sqrt());
        let alpha_sum = dual.alpha.sum();

        // Average ascent direction over the batch of symmetrized pairs.
        let mut grad = Array1::zeros(n);
        for (mode, _) in &peaks {
            let phi = mode_phi(data, mode, table.as_ref())?;
            grad += &dual_gradient(&dual.alpha, labels, &phi)?;
        }
        grad.mapv_inplace(|g| g / peaks.len() as f64);

        let batch_start = records.len();
        for (j, (mode, value)) in peaks.iter().enumerate() {
            records.push(RoundRecord {
                round: round + j,
                mode: mode.clone(),
                peak_value: *value,
                objective: alpha_sum - value,
                step_size: eta,
            });
            match mode {
                Mode::Frequency(_) => atoms.push((mode.clone(), 1)),
                Mode::Harmonic(h) => match harmonic_slot.get(h) {
                    Some(&slot) => atoms[slot].1 += 1,
                    None => {
                        harmonic_slot.insert(*h, atoms.len());
                        atoms.push((mode.clone(), 1));
                    }
                },
            }
        }

        let raw = &dual.alpha + &grad.mapv(|g| eta * g);
        dual = project_until_feasible(&raw, labels, c, config.projection_passes, BOX_TOL)?;
        observer(&records[batch_start..], &dual);
        round += peaks.len();
    }

    let mut measure_atoms = Vec::with_capacity(atoms.len());
    let mut multiplicities = Vec::with_capacity(atoms.len());
    for (mode, count) in &atoms {
        measure_atoms.push(Atom {
            mode: mode.clone(),
            weight: *count as f64 / t_total as f64,
        });
        multiplicities.push(*count);
    }
    let measure = DualMeasure::new(measure_atoms)?;
    let features = measure_features(data, &measure, &multiplicities)?;
    let kernel = LearnedKernel {
        measure,
        multiplicities,
        trace: BoostTrace { records },
        geometry: data.geometry(),
        final_alpha: dual.alpha,
        rounds: t_total,
        box_c: c,
    };
    Ok(BoostOutput { kernel, features })
}

/// Features of the measure formed by the first `rounds` trace records.
/// Because each round depends only on earlier rounds, this is exactly what a
/// shorter run with the same seeds would have produced.
pub fn features_for_prefix(
    data: &Dataset,
    trace: &BoostTrace,
    rounds: usize,
) -> Result<Array2<f64>> {
    if rounds == 0 || rounds > trace.records.len() {
        return Err(Error::InvalidParameter(format!(
            "prefix rounds {rounds} out of range 1..={}",
            trace.records.len()
        )));
    }
    let mut atoms: Vec<(Mode, u32)> = Vec::new();
    let mut slot: HashMap<crate::spherical::HarmonicIndex, usize> = HashMap::new();
    for rec in &trace.records[..rounds] {
        match &rec.mode {
            Mode::Frequency(_) => atoms.push((rec.mode.clone(), 1)),
            Mode::Harmonic(h) => match slot.get(h) {
                Some(&s) => atoms[s].1 += 1,
                None => {
                    slot.insert(*h, atoms.len());
                    atoms.push((rec.mode.clone(), 1));
                }
            },
        }
    }
    let counts: Vec<u32> = atoms.iter().map(|(_, c)| *c).collect();
    let measure = DualMeasure::new(
        atoms
            .into_iter()
            .map(|(mode, count)| Atom {
                mode,
                weight: count as f64 / rounds as f64,
            })
            .collect(),
    )?;
    measure_features(data, &measure, &counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::gen_windmill;
    use ndarray::array;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_measure(rng: &mut ChaCha8Rng, d: usize, atoms: usize) -> DualMeasure {
        DualMeasure::new(
            (0..atoms)
                .map(|_| Atom {
                    mode: Mode::Frequency(Array1::from_shape_fn(d, |_| rng.gen_range(-4.0..4.0))),
                    weight: rng.gen_range(0.05..1.0),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn objective_zero_at_zero_alpha() {
        let data = gen_windmill(6, 4, 1.0, 0.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let measure = random_measure(&mut rng, 2, 3);
        let f = dual_objective(&data, &Array1::zeros(6), &measure).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn objective_matches_gram_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = gen_windmill(3, 4, 1.0, 0.0, 2).unwrap();
        let alpha = Array1::from_shape_fn(3, |_| rng.gen_range(0.0..1.0));
        let measure = random_measure(&mut rng, 2, 2);
        let got = dual_objective(&data, &alpha, &measure).unwrap();
        let mut quad = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let g = fourier::kernel_from_measure(
                    &measure,
                    data.points().row(i).as_slice().unwrap(),
                    data.points().row(j).as_slice().unwrap(),
                )
                .unwrap();
                quad += data.labels()[i] * alpha[i] * data.labels()[j] * alpha[j] * g;
            }
        }
        let want = alpha.sum() - 0.5 * quad;
        assert!((got - want).abs() <= 1e-10);
    }

    #[test]
    fn objective_of_unnormalized_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = gen_windmill(5, 4, 1.0, 0.0, 3).unwrap();
        let alpha = Array1::from_shape_fn(5, |_| rng.gen_range(0.0..1.0));
        let omega = array![1.3, -0.4];
        // The atom (w, weight 2) is the pair delta_w + delta_{-w}.
        let pair = DualMeasure::new(vec![Atom {
            mode: Mode::Frequency(omega.clone()),
            weight: 2.0,
        }])
        .unwrap();
        let f = dual_objective(&data, &alpha, &pair).unwrap();
        let v = fourier::potential(&data, &alpha, &omega).unwrap();
        assert!((f - (alpha.sum() - v)).abs() <= 1e-12 * f.abs().max(1.0));
    }

    #[test]
    fn gradient_at_zero_alpha_is_ones() {
        let data = gen_windmill(4, 4, 1.0, 0.0, 5).unwrap();
        let phi = mode_phi(&data, &Mode::Frequency(array![0.7, -0.3]), None).unwrap();
        let g = dual_gradient(&Array1::zeros(4), data.labels(), &phi).unwrap();
        assert_eq!(g, Array1::ones(4));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let data = gen_windmill(7, 4, 1.0, 0.0, 6).unwrap();
        let omega = array![2.0, 1.0];
        let pair = DualMeasure::new(vec![Atom {
            mode: Mode::Frequency(omega.clone()),
            weight: 2.0,
        }])
        .unwrap();
        let alpha = Array1::from_shape_fn(7, |_| rng.gen_range(0.1..1.0));
        let phi = mode_phi(&data, &Mode::Frequency(omega), None).unwrap();
        let g = dual_gradient(&alpha, data.labels(), &phi).unwrap();
        let h = 1e-6;
        for i in 0..7 {
            let mut ap = alpha.clone();
            let mut am = alpha.clone();
            ap[i] += h;
            am[i] -= h;
            let fd = (dual_objective(&data, &ap, &pair).unwrap()
                - dual_objective(&data, &am, &pair).unwrap())
                / (2.0 * h);
            assert!(
                (g[i] - fd).abs() <= 1e-6 * g[i].abs().max(1.0),
                "coordinate {i}: {} vs {}",
                g[i],
                fd
            );
        }
    }

    #[test]
    fn gradient_matches_double_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = gen_windmill(6, 4, 1.0, 0.0, 7).unwrap();
        let omega = array![1.1, 0.9];
        let alpha = Array1::from_shape_fn(6, |_| rng.gen_range(0.0..1.0));
        let phi = mode_phi(&data, &Mode::Frequency(omega.clone()), None).unwrap();
        let g = dual_gradient(&alpha, data.labels(), &phi).unwrap();
        for i in 0..6 {
            let mut s = 0.0;
            for j in 0..6 {
                let diff = &data.points().row(i) - &data.points().row(j);
                s += 2.0
                    * data.labels()[i]
                    * data.labels()[j]
                    * alpha[j]
                    * diff.dot(&omega).cos();
            }
            assert!((g[i] - (1.0 - s)).abs() <= 1e-10);
        }
    }

    #[test]
    fn projection_fixed_point() {
        let labels = array![1.0, -1.0];
        let feasible = array![0.25, 0.25];
        let out = project_feasible(&feasible, &labels, 1.0, 10).unwrap();
        assert_eq!(out.alpha, feasible);
    }

    #[test]
    fn projection_hand_iteration() {
        // clip((2C, 0)) = (C, 0); hyperplane: y^T a = C, shift C/2 -> (C/2, C/2).
        let c = 0.8;
        let labels = array![1.0, -1.0];
        let out = project_feasible(&array![2.0 * c, 0.0], &labels, c, 10).unwrap();
        assert!((out.alpha[0] - c / 2.0).abs() < 1e-15);
        assert!((out.alpha[1] - c / 2.0).abs() < 1e-15);
    }

    #[test]
    fn projection_satisfies_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..200 {
            let n = rng.gen_range(2..60);
            let c = [0.5, 1.0, 2.0][trial % 3];
            let labels = Array1::from_shape_fn(n, |i| {
                if i == 0 {
                    1.0
                } else if i == 1 {
                    -1.0
                } else if rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            });
            let raw = Array1::from_shape_fn(n, |_| rng.gen_range(-2.0 * c..3.0 * c));
            // The fixed-pass projection ends on the hyperplane step, so that
            // constraint is exact regardless of the raw vector.
            let out = project_feasible(&raw, &labels, c, 10).unwrap();
            let h = labels.dot(&out.alpha).abs();
            assert!(h <= 1e-12, "hyperplane violation {h}");
            // The box tolerance needs the until-convergence form; imbalanced
            // label draws contract too slowly for a fixed 10 passes.
            let out = project_until_feasible(&raw, &labels, c, 10, BOX_TOL).unwrap();
            let h = labels.dot(&out.alpha).abs();
            assert!(h <= 1e-12, "hyperplane violation {h}");
            let bv = box_violation(&out.alpha, c);
            assert!(bv <= 1e-6 * c, "box violation {bv}");
        }
    }

    #[test]
    fn boost_single_round() {
        let data = gen_windmill(40, 4, 1.0, 0.0, 9).unwrap();
        let cfg = BoostConfig {
            rounds: 1,
            ..Default::default()
        };
        let finder = PeakFinder::Langevin(LangevinParams {
            chains: 20,
            tau: 10,
            seed: 1,
            ..Default::default()
        });
        let out = boost(&data, &cfg, &finder).unwrap();
        assert_eq!(out.kernel.measure.len(), 1);
        assert_eq!(out.kernel.measure.atoms()[0].weight, 1.0);
        assert_eq!(out.features.ncols(), 2);
        assert_eq!(out.kernel.trace.records.len(), 1);
    }

    #[test]
    fn boost_structural_contract() {
        let data = gen_windmill(60, 4, 1.0, 0.0, 10).unwrap();
        let cfg = BoostConfig {
            rounds: 12,
            ..Default::default()
        };
        let finder = PeakFinder::Langevin(LangevinParams {
            chains: 15,
            tau: 10,
            seed: 2,
            ..Default::default()
        });
        let out = boost(&data, &cfg, &finder).unwrap();
        assert_eq!(out.kernel.trace.records.len(), 12);
        assert!(out.kernel.trace.records.iter().all(|r| r.peak_value >= 0.0));
        let total: f64 = out.kernel.measure.total_weight();
        assert!((total - 1.0).abs() <= 1e-12);
        assert_eq!(out.features.ncols(), 24);
        assert_eq!(out.features.nrows(), 60);
    }

    #[test]
    fn boost_rejects_single_class() {
        let points = Array2::from_shape_fn((10, 2), |(i, j)| (i + j) as f64 * 0.1);
        let labels = Array1::ones(10);
        let data = Dataset::new(points, labels, Geometry::Euclidean).unwrap();
        let cfg = BoostConfig::default();
        let finder = PeakFinder::Langevin(LangevinParams::default());
        assert!(matches!(
            boost(&data, &cfg, &finder),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn iterates_stay_feasible_throughout() {
        let data = gen_windmill(50, 4, 1.0, 0.0, 11).unwrap();
        let cfg = BoostConfig {
            rounds: 8,
            ..Default::default()
        };
        let finder = PeakFinder::Langevin(LangevinParams {
            chains: 10,
            tau: 8,
            seed: 3,
            ..Default::default()
        });
        let labels = data.labels().clone();
        let mut checked = 0;
        boost_observed(&data, &cfg, &finder, |_, dual| {
            let h = labels.dot(&dual.alpha).abs();
            assert!(h <= 1e-12);
            let bv = dual
                .alpha
                .iter()
                .map(|&a| (-a).max(a - cfg.box_c).max(0.0))
                .fold(0.0f64, f64::max);
            assert!(bv <= 1e-6 * cfg.box_c);
            checked += 1;
        })
        .unwrap();
        assert_eq!(checked, 8);
    }

    #[test]
    fn prefix_matches_shorter_run() {
        let data = gen_windmill(50, 4, 1.0, 0.0, 12).unwrap();
        let finder = PeakFinder::Langevin(LangevinParams {
            chains: 10,
            tau: 8,
            seed: 4,
            ..Default::default()
        });
        let long = boost(
            &data,
            &BoostConfig {
                rounds: 9,
                ..Default::default()
            },
            &finder,
        )
        .unwrap();
        let short = boost(
            &data,
            &BoostConfig {
                rounds: 4,
                ..Default::default()
            },
            &finder,
        )
        .unwrap();
        for (a, b) in long.kernel.trace.records[..4]
            .iter()
            .zip(short.kernel.trace.records.iter())
        {
            assert_eq!(a.mode, b.mode);
            assert_eq!(a.peak_value, b.peak_value);
        }
        let prefix = features_for_prefix(&data, &long.kernel.trace, 4).unwrap();
        assert_eq!(prefix, short.features);
    }

    #[test]
    fn top_k_batches_count_toward_rounds() {
        let data = gen_windmill(50, 4, 1.0, 0.0, 13).unwrap();
        let cfg = BoostConfig {
            rounds: 10,
            ..Default::default()
        };
        let finder = PeakFinder::Langevin(LangevinParams {
            chains: 12,
            tau: 8,
            top_k: 4,
            seed: 5,
            ..Default::default()
        });
        let out = boost(&data, &cfg, &finder).unwrap();
        assert_eq!(out.kernel.trace.records.len(), 10);
        assert!((out.kernel.measure.total_weight() - 1.0).abs() <= 1e-12);
    }
}
