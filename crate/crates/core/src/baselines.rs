//! Gaussian random-feature baseline for head-to-head comparisons: frequencies
//! sampled from the spectral measure of the RBF kernel, emitted through the
//! same cos/sin feature map as the learned kernel.

use ndarray::Array2;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fourier::{feature_map, FeatureMatrix};

/// Parameters of the random-feature baseline.
#[derive(Debug, Clone)]
pub struct RbfParams {
    /// Number of sampled frequencies (feature pairs); output has 2 * pairs columns.
    pub pairs: usize,
    /// Kernel bandwidth; frequencies are N(0, I / sigma^2).
    pub sigma: f64,
    pub seed: u64,
}

/// Sample frequencies from the Gaussian spectral measure and emit the
/// explicit n x 2m cos/sin feature matrix.
pub fn rbf_random_features(data: &Dataset, params: &RbfParams) -> Result<FeatureMatrix> {
    if params.pairs < 1 {
        return Err(Error::InvalidParameter("rbf feature pairs must be >= 1".into()));
    }
    if !(params.sigma > 0.0) {
        return Err(Error::InvalidParameter("rbf sigma must be positive".into()));
    }
    data.require_nonempty()?;
    let d = data.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sd = 1.0 / params.sigma;
    let mut omegas = Array2::zeros((params.pairs, d));
    for mut row in omegas.rows_mut() {
        for v in row.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = sd * z;
        }
    }
    let modes: Vec<_> = omegas.rows().into_iter().map(|r| r.to_owned()).collect();
    feature_map(data, &modes)
}
