//! The MTW distribution: parameters, PDF/CDF in integral and series form,
//! Laplace-domain statistics, moments, amount of fading and asymptotics.
//!
//! The SNR distribution is parameterized by the vector {K, Δ₁..Δ_N, μ, γ̄}:
//! `K` is the ratio of total specular to diffuse power, `Δ_i` measures the
//! amplitude asymmetry of the two specular components in cluster `i`, `μ` is
//! the number of wave clusters (real-valued for fitting) and `γ̄` the mean
//! SNR. `ζ = (1+K)/γ̄` and `β = μζ` show up throughout; `β` is the rate of
//! the Gamma mixture underlying the series form.

mod cluster;
mod integral;
mod laplace;
mod params;
mod series;
mod tuples;

pub use integral::{cdf_integral, pdf_integral, ThetaGrid};
pub use laplace::{aof, asymptotic_cdf, gmgf, gmgf_ln, gmgf_ln_table, mgf, moment};
pub use params::{validate, MtwParams, NumericPolicy};
pub use series::{series_coeffs, SeriesCoeffs};
pub use tuples::{tuples, tuples_count};

use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::scalar::Real;

/// Which PDF/CDF evaluation path to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Tensor-product Gauss–Legendre quadrature of the finite-range integral
    /// representation.
    Integral,
    /// Gamma-mixture series representation.
    Series,
    /// Series when its truncated tail mass is below 1e−8, integral otherwise.
    #[default]
    Auto,
}

/// Truncated series mass above which `Method::Auto` abandons the series.
pub(crate) const AUTO_TAIL_TOL: f64 = 1e-8;

/// Parameter set plus numeric policy with lazily cached evaluation state.
///
/// Immutable after construction and shareable across threads; the series
/// coefficients and the quadrature grid are built on first use.
#[derive(Debug)]
pub struct SnrDistribution<T: Real> {
    params: MtwParams<T>,
    policy: NumericPolicy,
    coeffs: OnceLock<Result<Arc<SeriesCoeffs<T>>>>,
    grid: OnceLock<Result<Arc<ThetaGrid<T>>>>,
}

impl<T: Real> SnrDistribution<T> {
    /// Validates the inputs and bundles them into an evaluation handle.
    pub fn new(params: MtwParams<T>, policy: NumericPolicy) -> Result<Self> {
        params.validate()?;
        policy.validate()?;
        Ok(Self {
            params,
            policy,
            coeffs: OnceLock::new(),
            grid: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &MtwParams<T> {
        &self.params
    }

    pub fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    /// Series coefficients, built on first use.
    pub fn coeffs(&self) -> Result<Arc<SeriesCoeffs<T>>> {
        self.coeffs
            .get_or_init(|| series_coeffs(&self.params, &self.policy).map(Arc::new))
            .clone()
    }

    fn theta_grid(&self) -> Result<Arc<ThetaGrid<T>>> {
        self.grid
            .get_or_init(|| ThetaGrid::build(&self.params, &self.policy).map(Arc::new))
            .clone()
    }

    fn pick(&self, method: Method) -> Result<Method> {
        match method {
            Method::Auto => {
                let usable_series = match self.coeffs() {
                    Ok(c) => c.tail_mass() <= crate::scalar::cst(AUTO_TAIL_TOL),
                    Err(_) => false,
                };
                if usable_series {
                    Ok(Method::Series)
                } else if self.params.n_two_spec() <= self.policy.max_integral_dim {
                    Ok(Method::Integral)
                } else {
                    // no integral fallback; surface whatever the series has
                    Ok(Method::Series)
                }
            }
            m => Ok(m),
        }
    }

    /// PDF of the SNR at `x ≥ 0`.
    pub fn pdf(&self, x: T, method: Method) -> Result<T> {
        match self.pick(method)? {
            Method::Series => Ok(self.coeffs()?.pdf(x)),
            _ => self.theta_grid()?.pdf_at(&self.params, x),
        }
    }

    /// CDF of the SNR at `x ≥ 0`, in [0, 1].
    pub fn cdf(&self, x: T, method: Method) -> Result<T> {
        match self.pick(method)? {
            Method::Series => Ok(self.coeffs()?.cdf(x)),
            _ => self.theta_grid()?.cdf_at(&self.params, x),
        }
    }

    /// Generalized MGF φ^{(n)}(s) = E[γⁿ e^{γs}].
    pub fn gmgf(&self, n: u32, s: T) -> Result<T> {
        gmgf(&self.params, &self.policy, n, s)
    }

    /// MGF E[e^{γs}] in closed form.
    pub fn mgf(&self, s: T) -> Result<T> {
        mgf(&self.params, s)
    }

    /// n-th non-central moment E[γⁿ].
    pub fn moment(&self, n: u32) -> Result<T> {
        moment(&self.params, n)
    }

    /// Amount of fading Var(γ)/E[γ]².
    pub fn aof(&self) -> Result<T> {
        aof(&self.params)
    }

    /// Leading-order CDF term for x/γ̄ → 0; log-log slope is exactly μ.
    pub fn asymptotic_cdf(&self, x: T) -> Result<T> {
        asymptotic_cdf(&self.params, x)
    }
}
