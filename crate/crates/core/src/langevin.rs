//! Parallel-chain Langevin dynamics maximizing the reweighted Fourier
//! potential, with bandwidth-based initialization.
//!
//! Each chain owns its own counter-based random stream keyed by
//! (seed, chain index), so results are bit-identical regardless of how many
//! threads execute the batched evaluations.

use ndarray::{Array1, Array2};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fourier::potential_batch;

/// Parameters of the diffusion search.
///
/// `zeta` (diffusion rate) and `xi` (temperature) default to data-driven
/// values when `None`: zeta is set so that a typical gradient step moves a
/// chain by a tenth of the initialization radius (estimated from the mean
/// gradient norm over the initial batch), and xi so that the per-coordinate
/// noise deviation sqrt(2 xi / zeta) equals that typical gradient step.
#[derive(Debug, Clone)]
pub struct LangevinParams {
    /// Number of diffusion steps per chain.
    pub tau: usize,
    /// Number of parallel chains.
    pub chains: usize,
    /// Diffusion rate; `None` = auto.
    pub zeta: Option<f64>,
    /// Temperature; `None` = auto.
    pub xi: Option<f64>,
    /// Initial positions are Gaussian with variance scale / sigma^2.
    pub init_variance_scale: f64,
    /// How many peaks to return.
    pub top_k: usize,
    /// Optional bandwidth cap: iterates are projected onto |w| <= clip_radius.
    pub clip_radius: Option<f64>,
    pub seed: u64,
}

impl Default for LangevinParams {
    fn default() -> Self {
        LangevinParams {
            tau: 100,
            chains: 500,
            zeta: None,
            xi: None,
            init_variance_scale: 1.5,
            top_k: 1,
            clip_radius: None,
            seed: 0,
        }
    }
}

impl LangevinParams {
    pub fn validate(&self) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::InvalidParameter("langevin tau must be >= 1".into()));
        }
        if self.chains < 1 {
            return Err(Error::InvalidParameter("langevin chains must be >= 1".into()));
        }
        if !(self.init_variance_scale > 0.0) {
            return Err(Error::InvalidParameter(
                "langevin init_variance_scale must be positive".into(),
            ));
        }
        if self.top_k < 1 || self.top_k > self.chains * self.tau {
            return Err(Error::InvalidParameter(format!(
                "langevin top_k must be in [1, chains * tau], got {}",
                self.top_k
            )));
        }
        if let Some(z) = self.zeta {
            if !(z > 0.0) {
                return Err(Error::InvalidParameter("langevin zeta must be positive".into()));
            }
        }
        if let Some(x) = self.xi {
            if !(x >= 0.0) {
                return Err(Error::InvalidParameter(
                    "langevin xi must be nonnegative".into(),
                ));
            }
        }
        if let Some(r) = self.clip_radius {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(
                    "langevin clip_radius must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Median of pairwise Euclidean distances. Exact for n <= 2000; larger sets
/// are subsampled to 2000 points with a fixed stream (seed 0).
pub fn median_heuristic(data: &Dataset) -> Result<f64> {
    let n = data.n();
    if n < 2 {
        return Err(Error::DegenerateData(
            "median heuristic needs at least two points".into(),
        ));
    }
    let indices: Vec<usize> = if n <= 2000 {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        rand::seq::index::sample(&mut rng, n, 2000).into_vec()
    };
    let points = data.points();
    let mut dists = Vec::with_capacity(indices.len() * (indices.len() - 1) / 2);
    for (a, &i) in indices.iter().enumerate() {
        for &j in indices.iter().skip(a + 1) {
            let diff = &points.row(i) - &points.row(j);
            dists.push(diff.dot(&diff).sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let mid = dists.len() / 2;
    let median = if dists.len() % 2 == 1 {
        dists[mid]
    } else {
        0.5 * (dists[mid - 1] + dists[mid])
    };
    if median <= 0.0 {
        return Err(Error::DegenerateData(
            "median pairwise distance is zero".into(),
        ));
    }
    Ok(median)
}

fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

fn draw_init(
    d: usize,
    sigma: f64,
    params: &LangevinParams,
) -> (Array2<f64>, Vec<ChaCha8Rng>) {
    let sd = params.init_variance_scale.sqrt() / sigma;
    let mut rngs: Vec<ChaCha8Rng> = (0..params.chains)
        .map(|c| chain_rng(params.seed, c))
        .collect();
    let mut omegas = Array2::zeros((params.chains, d));
    for (c, rng) in rngs.iter_mut().enumerate() {
        for j in 0..d {
            let z: f64 = StandardNormal.sample(rng);
            omegas[[c, j]] = sd * z;
        }
    }
    (omegas, rngs)
}

/// Initial chain positions: i.i.d. centered Gaussian rows with
/// per-coordinate variance init_variance_scale / sigma^2.
pub fn init_chains(data: &Dataset, params: &LangevinParams) -> Result<Array2<f64>> {
    params.validate()?;
    let sigma = median_heuristic(data)?;
    Ok(draw_init(data.dim(), sigma, params).0)
}

/// A located peak of the potential.
#[derive(Debug, Clone)]
pub struct Peak {
    pub omega: Array1<f64>,
    pub value: f64,
}

struct CandidatePool {
    cap: usize,
    entries: Vec<(f64, Vec<f64>)>,
}

impl CandidatePool {
    fn new(top_k: usize) -> Self {
        CandidatePool {
            cap: (top_k * 8).max(32),
            entries: Vec::new(),
        }
    }

    fn offer(&mut self, value: f64, omega: &[f64]) {
        if !value.is_finite() || omega.iter().any(|v| !v.is_finite()) {
            return;
        }
        if self.entries.len() < self.cap {
            self.entries.push((value, omega.to_vec()));
            if self.entries.len() == self.cap {
                self.sort();
            }
            return;
        }
        if value > self.entries.last().expect("nonempty").0 {
            *self.entries.last_mut().expect("nonempty") = (value, omega.to_vec());
            self.sort();
        }
    }

    fn sort(&mut self) {
        self.entries
            .sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite values"));
    }

    /// Top-k by value, deduplicated within Euclidean distance 1e-9.
    fn select(mut self, top_k: usize) -> Vec<Peak> {
        self.sort();
        let mut out: Vec<Peak> = Vec::new();
        for (value, omega) in self.entries {
            let dup = out.iter().any(|p| {
                let d2: f64 = p
                    .omega
                    .iter()
                    .zip(omega.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2.sqrt() <= 1e-9
            });
            if !dup {
                out.push(Peak {
                    omega: Array1::from_vec(omega),
                    value,
                });
                if out.len() == top_k {
                    break;
                }
            }
        }
        out
    }
}

/// Bandwidth for the chain search, with the constant-landscape fallback.
pub(crate) fn search_sigma(data: &Dataset) -> Result<f64> {
    match median_heuristic(data) {
        Ok(s) => Ok(s),
        // A single sample or identical points: the potential is constant in
        // omega, so any bandwidth works.
        Err(Error::DegenerateData(_)) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// Run the diffusion and return the best `top_k` visited frequencies by
/// potential value, sorted descending.
///
/// Every visited iterate (including the initial and final positions) is
/// evaluated through [`potential_batch`]; the reported value of a returned
/// peak is exactly the batched potential at that point.
pub fn find_peak(data: &Dataset, alpha: &Array1<f64>, params: &LangevinParams) -> Result<Vec<Peak>> {
    let sigma = search_sigma(data)?;
    find_peak_with_sigma(data, alpha, params, sigma)
}

/// [`find_peak`] with the bandwidth precomputed; the boosting loop caches it
/// across rounds since it only depends on the dataset.
pub(crate) fn find_peak_with_sigma(
    data: &Dataset,
    alpha: &Array1<f64>,
    params: &LangevinParams,
    sigma: f64,
) -> Result<Vec<Peak>> {
    params.validate()?;
    data.require_nonempty()?;
    if alpha.len() != data.n() {
        return Err(Error::DimensionMismatch {
            what: "dual weights",
            expected: data.n(),
            found: alpha.len(),
        });
    }
    if alpha.iter().any(|&a| a < 0.0) || alpha.iter().all(|&a| a == 0.0) {
        return Err(Error::DegenerateData(
            "chain weights must be nonnegative and not all zero".into(),
        ));
    }

    let d = data.dim();
    let (mut omegas, mut rngs) = draw_init(d, sigma, params);
    if let Some(r) = params.clip_radius {
        clip_rows(&mut omegas, r);
    }

    let (mut values, grads) = potential_batch(data, alpha, &omegas, true)?;
    let mut grads = grads.expect("requested gradients");

    // Scale the dynamics off the initial batch: a gradient step should move
    // a chain by about a tenth of the initialization radius, and the noise
    // should match the gradient step. The per-chain gradient norms shrink as
    // the dual weights decohere, so the auto rate adapts round to round.
    let init_sd = params.init_variance_scale.sqrt() / sigma;
    let mean_grad_norm = grads
        .rows()
        .into_iter()
        .map(|g| g.dot(&g).sqrt())
        .sum::<f64>()
        / params.chains as f64;
    let zeta = params.zeta.unwrap_or(if mean_grad_norm > 1e-300 {
        0.3 * init_sd / mean_grad_norm
    } else {
        1.0
    });
    let noise_sd = match params.xi {
        Some(xi) => (2.0 * xi / zeta).sqrt(),
        None => zeta * mean_grad_norm,
    };

    let mut pool = CandidatePool::new(params.top_k);
    for t in 0..=params.tau {
        for c in 0..params.chains {
            pool.offer(values[c], omegas.row(c).as_slice().expect("layout"));
        }
        if t == params.tau {
            break;
        }
        for (c, rng) in rngs.iter_mut().enumerate() {
            for j in 0..d {
                let z: f64 = StandardNormal.sample(rng);
                omegas[[c, j]] += zeta * grads[[c, j]] + noise_sd * z;
            }
        }
        if let Some(r) = params.clip_radius {
            clip_rows(&mut omegas, r);
        }
        let with_grad = t + 1 < params.tau;
        let (v, g) = potential_batch(data, alpha, &omegas, with_grad)?;
        values = v;
        if let Some(g) = g {
            grads = g;
        }
    }

    let peaks = pool.select(params.top_k);
    debug_assert!(!peaks.is_empty());
    Ok(peaks)
}

fn clip_rows(omegas: &mut Array2<f64>, radius: f64) {
    for mut row in omegas.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > radius {
            let scale = radius / norm;
            row.mapv_inplace(|v| v * scale);
        }
    }
}
