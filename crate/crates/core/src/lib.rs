//! Margin-driven kernel learning from Fourier peaks.
//!
//! This crate learns translation-invariant kernels on R^d (and
//! rotation-invariant kernels on the 2-sphere) by playing a zero-sum game
//! between the SVM dual variables and a kernel expressed as a finitely
//! supported symmetric measure over Fourier modes. Each round, a diffusion
//! search ([`langevin`]) or an exhaustive harmonic scan ([`spherical`]) finds
//! a peak of the reweighted Fourier potential; the peak's cos/sin (or
//! spherical-harmonic) pair joins the explicit feature map, and online
//! gradient ascent with alternating projection updates the dual variables
//! ([`game`]). The resulting features realize the learned kernel exactly and
//! feed an ordinary linear hinge-loss SVM ([`svm`]).
//!
//! The [`cli`] module backs the `fourier-learn` binary (`train`, `compare`,
//! `landscape`); [`baselines`] provides the Gaussian random-feature baseline
//! used for comparisons.

pub mod baselines;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod fourier;
pub mod game;
pub mod langevin;
pub mod mathx;
pub mod model;
pub mod spherical;
pub mod svm;

pub use config::{Branch, DatasetSource, RunConfig};
pub use dataset::{Dataset, Geometry};
pub use error::{Error, Result};
pub use fourier::{Atom, DualMeasure, FeatureMatrix, Mode};
pub use game::{boost, BoostConfig, BoostOutput, DualWeights, LearnedKernel, PeakFinder};
pub use langevin::{find_peak, median_heuristic, LangevinParams, Peak};
pub use model::TrainedModel;
pub use spherical::HarmonicIndex;
pub use svm::LinearModel;
