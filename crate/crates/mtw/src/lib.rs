//! Statistics of the Multi-cluster Two-Wave (MTW) fading model.
//!
//! The MTW model describes a received radio signal composed of `mu` wave
//! clusters, each carrying diffuse scatter and up to two constant-amplitude
//! specular components. It contains the two-wave-with-diffuse-power (TWDP)
//! model (`mu = 1`, one two-specular cluster) and the kappa-mu model (no
//! two-specular clusters) as special cases.
//!
//! The crate provides:
//!
//! * [`specfun`] — the self-contained special-function kernel (log-gamma,
//!   exponentially scaled modified Bessel I of real order, regularized
//!   incomplete gamma, generalized Marcum Q, cosine-exponential moments);
//! * [`model`] — the distribution itself: parameter validation, PDF/CDF in
//!   finite-range integral and Gamma-mixture series form, the generalized
//!   MGF, moments, amount of fading and the high-SNR asymptotic CDF;
//! * [`sim`] — a Monte Carlo generator for the physical model, used as an
//!   independent oracle for every analytic formula;
//! * [`metrics`] — outage probability (noise- and interference-limited),
//!   energy-detection probability / ROC / AUC with MRC diversity, and the
//!   composite Inverse-Gamma/MTW shadowing model;
//! * [`fit`] — an envelope-measurement fitting pipeline (histogram + MSE
//!   objective + multi-start Nelder–Mead).
//!
//! Numeric kernels are generic over the floating-point scalar via
//! [`scalar::Real`] (`f32` or `f64`); the simulator and the fitting pipeline
//! are `f64`. The default tolerances assume `f64`.
//!
//! ```
//! use mtw::model::{Method, MtwParams, NumericPolicy, SnrDistribution};
//!
//! let params = MtwParams::<f64>::new(1.0, vec![0.8], 2.0, 1.0).unwrap();
//! let dist = SnrDistribution::new(params, NumericPolicy::default()).unwrap();
//! let p = dist.pdf(1.0, Method::Auto).unwrap();
//! assert!((p - 0.55572873496223854).abs() < 1e-10);
//! ```

pub mod error;
pub mod scalar;

pub mod specfun;

pub mod quad;

pub mod model;

pub mod sim;

pub mod metrics;

pub mod fit;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete `f64` aliases for the generic core types.
pub type MtwParams64 = model::MtwParams<f64>;
/// `f32` parameter vector (reduced precision; loosen tolerances accordingly).
pub type MtwParams32 = model::MtwParams<f32>;
/// `f64` distribution handle.
pub type SnrDistribution64 = model::SnrDistribution<f64>;
