//! Cosine-exponential moments (1/π) ∫₀^π e^{α cos θ} cosᵐ θ dθ.
//!
//! Closed form: 2^{−m} Σ_{l=0}^{m} C(m, l) I_{2l−m}(α). Every term in the
//! l-sum carries the same sign ((−1)^m when α < 0, positive otherwise), so
//! the sum never cancels and can be accumulated in the log domain.

use crate::error::Result;
use crate::scalar::{cst, Real};

use super::bessel::{bessel_i_scaled, integer_bessel_scaled_ln_table};
use super::gamma::ln_binomial;

/// (1/π) ∫₀^π e^{α cos θ} cosᵐ θ dθ, unscaled.
///
/// Overflows for |α| beyond ~700; use [`cos_exp_moment_scaled`] inside
/// products that carry their own e^{−|α|} factor.
pub fn cos_exp_moment<T: Real>(alpha: T, m: u32) -> Result<T> {
    let (ln, sign) = cos_exp_moment_scaled_ln(alpha, m as usize)?;
    Ok(cst::<T>(sign as f64) * (ln + alpha.abs()).exp())
}

/// e^{−|α|} (1/π) ∫₀^π e^{α cos θ} cosᵐ θ dθ; bounded by 1 in magnitude.
pub fn cos_exp_moment_scaled<T: Real>(alpha: T, m: u32) -> Result<T> {
    let (ln, sign) = cos_exp_moment_scaled_ln(alpha, m as usize)?;
    Ok(cst::<T>(sign as f64) * ln.exp())
}

/// (ln magnitude, sign) of the scaled moment.
pub(crate) fn cos_exp_moment_scaled_ln<T: Real>(alpha: T, m: usize) -> Result<(T, i8)> {
    if alpha == T::zero() {
        return Ok(moment_at_zero(m));
    }
    let table = integer_bessel_scaled_ln_table(m, alpha.abs())?;
    Ok(cos_exp_moment_scaled_ln_from_table(
        &table,
        alpha < T::zero(),
        m,
    ))
}

/// Moment at α = 0: only 2l = m survives, giving 2^{−m} C(m, m/2) for even
/// m and zero for odd m.
pub(crate) fn moment_at_zero<T: Real>(m: usize) -> (T, i8) {
    if m % 2 == 1 {
        return (T::neg_infinity(), 0);
    }
    let ln = ln_binomial::<T>(m, m / 2) - cst::<T>(m as f64) * cst::<T>(2.0).ln();
    (ln, 1)
}

/// Same moment from a precomputed ln-scaled-Bessel table for orders
/// 0..=m at |α| (the cluster machinery shares one table across all m).
pub(crate) fn cos_exp_moment_scaled_ln_from_table<T: Real>(
    table: &[T],
    alpha_negative: bool,
    m: usize,
) -> (T, i8) {
    debug_assert!(table.len() > m);
    let sign = if alpha_negative && m % 2 == 1 { -1i8 } else { 1i8 };
    let ln2 = cst::<T>(2.0).ln();
    // log-sum-exp over l with all-positive terms
    let mut max_ln = T::neg_infinity();
    let mut lns = Vec::with_capacity(m + 1);
    for l in 0..=m {
        let ord = (2 * l as i64 - m as i64).unsigned_abs() as usize;
        let t = ln_binomial::<T>(m, l) + table[ord];
        if t > max_ln {
            max_ln = t;
        }
        lns.push(t);
    }
    if max_ln == T::neg_infinity() {
        return (T::neg_infinity(), 0);
    }
    let mut acc = T::zero();
    for t in lns {
        acc = acc + (t - max_ln).exp();
    }
    (max_ln + acc.ln() - cst::<T>(m as f64) * ln2, sign)
}

/// Same moment via the scaled Bessel entry point; used when a caller already
/// has individual orders (kept for parity checks in tests).
#[allow(dead_code)]
pub(crate) fn cos_exp_moment_scaled_direct<T: Real>(alpha: T, m: usize) -> Result<T> {
    let mut acc = T::zero();
    let two = cst::<T>(2.0);
    for l in 0..=m {
        let ord = cst::<T>(2.0 * l as f64 - m as f64);
        let b = bessel_i_scaled(ord, alpha)?;
        acc = acc + ln_binomial::<T>(m, l).exp() * b.scaled_value;
    }
    Ok(acc / two.powi(m as i32))
}
