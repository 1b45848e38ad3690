//! Parameter vector and numeric policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{as_f64, cst, Real};

/// MTW channel parameters {K, Δ₁..Δ_N, μ, γ̄}.
///
/// Invariants: K ≥ 0, μ > 0, γ̄ > 0, each Δ_i ∈ [0, 1] and ΣΔ_i ≤ 1. The
/// analytic formulas accept any real μ > 0; the physical constraint
/// N ≤ ⌈μ⌉ is enforced only by the simulator, which needs integer μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtwParams<T> {
    /// Specular-to-diffuse power ratio K.
    pub k_factor: T,
    /// Per-cluster specular asymmetry Δ_i for the N two-specular clusters.
    pub deltas: Vec<T>,
    /// Number of wave clusters μ (real-valued for fitting).
    pub mu: T,
    /// Mean SNR γ̄.
    pub mean_snr: T,
}

impl<T: Real> MtwParams<T> {
    /// Builds and validates a parameter set.
    pub fn new(k_factor: T, deltas: Vec<T>, mu: T, mean_snr: T) -> Result<Self> {
        let p = Self {
            k_factor,
            deltas,
            mu,
            mean_snr,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every invariant, reporting the first violation by name.
    pub fn validate(&self) -> Result<()> {
        if !self.k_factor.is_finite() || self.k_factor < T::zero() {
            return Err(Error::InvalidK(as_f64(self.k_factor)));
        }
        if !self.mu.is_finite() || self.mu <= T::zero() {
            return Err(Error::InvalidMu(as_f64(self.mu)));
        }
        if !self.mean_snr.is_finite() || self.mean_snr <= T::zero() {
            return Err(Error::InvalidMeanSnr(as_f64(self.mean_snr)));
        }
        let mut sum = T::zero();
        for (index, &d) in self.deltas.iter().enumerate() {
            if !d.is_finite() || d < T::zero() || d > T::one() {
                return Err(Error::DeltaOutOfRange {
                    index,
                    value: as_f64(d),
                });
            }
            sum = sum + d;
        }
        if sum > T::one() + cst(1e-12) {
            return Err(Error::DeltaSumExceedsOne(as_f64(sum)));
        }
        Ok(())
    }

    /// Number of two-specular clusters N.
    pub fn n_two_spec(&self) -> usize {
        self.deltas.len()
    }

    /// ΣΔ_i.
    pub fn delta_sum(&self) -> T {
        self.deltas.iter().fold(T::zero(), |a, &d| a + d)
    }

    /// ζ = (1 + K)/γ̄.
    pub fn zeta(&self) -> T {
        (T::one() + self.k_factor) / self.mean_snr
    }

    /// β = μζ, the Gamma-mixture rate of the series form.
    pub fn beta(&self) -> T {
        self.mu * self.zeta()
    }

    /// Same channel with a different mean SNR (used for γ̄ sweeps).
    pub fn with_mean_snr(&self, mean_snr: T) -> Self {
        Self {
            mean_snr,
            ..self.clone()
        }
    }
}

/// Validates and returns the parameter set unchanged (operation form of
/// [`MtwParams::validate`]).
pub fn validate<T: Real>(params: MtwParams<T>) -> Result<MtwParams<T>> {
    params.validate()?;
    Ok(params)
}

/// Quadrature node counts, series truncation caps and tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Gauss–Legendre nodes per integral dimension.
    pub quad_nodes_per_dim: usize,
    /// Hard cap on the number of series terms.
    pub series_kmax: usize,
    /// Relative tolerance on the truncated Gamma-mixture tail mass.
    pub series_rel_tol: f64,
    /// Largest N evaluated by tensor quadrature.
    pub max_integral_dim: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            quad_nodes_per_dim: 64,
            series_kmax: 60,
            series_rel_tol: 1e-12,
            max_integral_dim: 4,
        }
    }
}

impl NumericPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.quad_nodes_per_dim < 8 {
            return Err(Error::InvalidPolicy("quad_nodes_per_dim must be >= 8"));
        }
        if self.series_kmax < 1 {
            return Err(Error::InvalidPolicy("series_kmax must be >= 1"));
        }
        if !(self.series_rel_tol > 0.0) {
            return Err(Error::InvalidPolicy("series_rel_tol must be positive"));
        }
        Ok(())
    }

    pub fn with_quad_nodes(mut self, n: usize) -> Self {
        self.quad_nodes_per_dim = n;
        self
    }

    pub fn with_series_kmax(mut self, k: usize) -> Self {
        self.series_kmax = k;
        self
    }

    pub fn with_series_rel_tol(mut self, tol: f64) -> Self {
        self.series_rel_tol = tol;
        self
    }

    /// Series term count that covers the Gamma-mixture mass for the given
    /// parameters: the weight distribution over k spreads up to roughly
    /// μK(1 + ΣΔ) with Poisson-like width.
    pub fn suggested_kmax<T: Real>(params: &MtwParams<T>) -> usize {
        let lam = as_f64(params.mu) * as_f64(params.k_factor) * (1.0 + as_f64(params.delta_sum()));
        (lam + 10.0 * (lam + 1.0).sqrt() + 30.0).ceil() as usize
    }
}
