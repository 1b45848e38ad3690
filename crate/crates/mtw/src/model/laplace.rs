//! Laplace-domain statistics: generalized MGF, MGF, moments, amount of
//! fading, and the high-SNR asymptotic CDF.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, cst, Real};
use crate::specfun::{bessel_i_scaled_ln, ln_binomial, ln_gamma};

use super::cluster::cluster_avg_ln_all;
use super::params::{MtwParams, NumericPolicy};
use super::tuples::tuples;

/// Relative pole guard: s must satisfy μ(1+K) − γ̄s ≥ ε·μ(1+K).
const POLE_EPS: f64 = 1e-9;

/// ln φ^{(n)}(s) for every n = 0..=nmax at a fixed s.
///
/// The cluster averages are shared across orders, so the whole table costs
/// one cluster build plus O(nmax²) log-domain arithmetic; the per-metric
/// sums (interference outage, energy detection, composite shadowing)
/// consume consecutive orders.
pub fn gmgf_ln_table<T: Real>(
    params: &MtwParams<T>,
    policy: &NumericPolicy,
    nmax: u32,
    s: T,
) -> Result<Vec<T>> {
    params.validate()?;
    let mu = params.mu;
    let k = params.k_factor;
    let gbar = params.mean_snr;
    let mu1k = mu * (T::one() + k);
    let d = mu1k - gbar * s;
    if d <= cst::<T>(POLE_EPS) * mu1k {
        return Err(Error::PoleProximity {
            s: as_f64(s),
            pole: as_f64(mu1k / gbar),
        });
    }
    let t = gbar * s / d;
    let mu_k = mu * k;
    let nmax = nmax as usize;
    let avg = cluster_avg_ln_all(
        &params.deltas,
        mu_k * t,
        if mu_k == T::zero() { 0 } else { nmax },
        policy.quad_nodes_per_dim,
    )?;

    let ln_mu1k = mu1k.ln();
    let ln_d = d.ln();
    // q-dependent pieces are shared by every n
    let mut q_part = Vec::with_capacity(nmax + 1);
    for q in 0..=nmax {
        if mu_k == T::zero() && q > 0 {
            break;
        }
        let qf = cst::<T>(q as f64);
        let ln_kq = if q == 0 { T::zero() } else { qf * mu_k.ln() };
        q_part.push(
            ln_kq - ln_gamma(mu + qf)? + (mu + qf) * (ln_mu1k - ln_d)
                + avg.ln_values[q.min(avg.ln_values.len() - 1)],
        );
    }
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let nf = cst::<T>(n as f64);
        let mut max_l = T::neg_infinity();
        let mut ls = Vec::with_capacity(n + 1);
        for (q, qp) in q_part.iter().enumerate().take(n + 1) {
            let l = ln_binomial::<T>(n, q) + *qp;
            if l > max_l {
                max_l = l;
            }
            ls.push(l);
        }
        let mut acc = T::zero();
        for l in ls {
            acc = acc + (l - max_l).exp();
        }
        let n_ln_gbar = if n == 0 { T::zero() } else { nf * gbar.ln() };
        out.push(
            n_ln_gbar + ln_gamma(mu + nf)? + mu_k * t - nf * ln_d + max_l + acc.ln(),
        );
    }
    Ok(out)
}

/// ln φ^{(n)}(s), the log generalized MGF E[γⁿ e^{γs}].
///
/// The closed form groups into positive q-terms once the cluster averages
/// S(q) are in hand, so only logs are summed here; the linear value can
/// overflow f64 for large n, which is why metrics consume this entry point.
pub fn gmgf_ln<T: Real>(
    params: &MtwParams<T>,
    policy: &NumericPolicy,
    n: u32,
    s: T,
) -> Result<T> {
    Ok(gmgf_ln_table(params, policy, n, s)?[n as usize])
}

/// φ^{(n)}(s) = E[γⁿ e^{γs}] in linear scale.
pub fn gmgf<T: Real>(params: &MtwParams<T>, policy: &NumericPolicy, n: u32, s: T) -> Result<T> {
    gmgf_ln(params, policy, n, s).map(|l| l.exp())
}

/// MGF E[e^{γs}] in closed form (product of I₀ factors); equals
/// `gmgf(params, policy, 0, s)` to machine accuracy.
pub fn mgf<T: Real>(params: &MtwParams<T>, s: T) -> Result<T> {
    params.validate()?;
    let mu = params.mu;
    let k = params.k_factor;
    let gbar = params.mean_snr;
    let mu1k = mu * (T::one() + k);
    let d = mu1k - gbar * s;
    if d <= cst::<T>(POLE_EPS) * mu1k {
        return Err(Error::PoleProximity {
            s: as_f64(s),
            pole: as_f64(mu1k / gbar),
        });
    }
    let t = gbar * s / d;
    let mut ln = mu * (mu1k.ln() - d.ln()) + mu * k * t;
    for &delta in &params.deltas {
        let arg = mu * k * delta * t;
        if arg != T::zero() {
            // ln I₀(arg) = |arg| + ln Î₀(|arg|)
            ln = ln + arg.abs() + bessel_i_scaled_ln(T::zero(), arg.abs())?;
        }
    }
    Ok(ln.exp())
}

/// n-th non-central moment ν_n = E[γⁿ] via the closed form with the
/// Kronecker-delta cluster products (only even per-cluster indices
/// contribute). Exact 1 at n = 0.
pub fn moment<T: Real>(params: &MtwParams<T>, n: u32) -> Result<T> {
    params.validate()?;
    if n == 0 {
        return Ok(T::one());
    }
    let mu = params.mu;
    let k = params.k_factor;
    let gbar = params.mean_snr;
    let mu1k = mu * (T::one() + k);
    let mu_k = mu * k;
    let nn = n as usize;
    let n_cl = params.n_two_spec();

    // per-cluster factor (Δ/2)^m C(m, m/2)/m! for even m, else 0
    let cluster_term = |delta: T, m: usize| -> T {
        if m % 2 == 1 {
            return T::zero();
        }
        if m == 0 {
            return T::one();
        }
        let half_delta = delta / cst::<T>(2.0);
        let ln = cst::<T>(m as f64) * half_delta.ln() + ln_binomial::<T>(m, m / 2)
            - ln_gamma(cst::<T>((m + 1) as f64)).expect("positive");
        if delta == T::zero() {
            T::zero()
        } else {
            ln.exp()
        }
    };

    // inner(q) = Σ_r C(q,r) r! Σ_{τ(r,N)} Π_i cluster_term(Δ_i, r_i)
    let inner = |q: usize| -> T {
        let mut acc = T::one(); // r = 0 term
        if n_cl == 0 {
            return acc;
        }
        let mut r_fact = T::one();
        for r in 1..=q {
            r_fact = r_fact * cst::<T>(r as f64);
            let binom = ln_binomial::<T>(q, r).exp();
            let mut tau_sum = T::zero();
            for tuple in tuples(r, n_cl) {
                let mut prod = T::one();
                for (i, &ri) in tuple.iter().enumerate() {
                    prod = prod * cluster_term(params.deltas[i], ri);
                    if prod == T::zero() {
                        break;
                    }
                }
                tau_sum = tau_sum + prod;
            }
            acc = acc + binom * r_fact * tau_sum;
        }
        acc
    };

    // Γ(μ+n)/Γ(μ+q) as an explicit product keeps ν₁ = γ̄ exact to rounding
    let mut total = T::zero();
    for q in 0..=nn {
        if mu_k == T::zero() && q > 0 {
            break;
        }
        let mut gamma_ratio = T::one();
        for j in q..nn {
            gamma_ratio = gamma_ratio * (mu + cst::<T>(j as f64));
        }
        let binom = ln_binomial::<T>(nn, q).exp();
        let kq = if q == 0 {
            T::one()
        } else {
            mu_k.powi(q as i32)
        };
        total = total + binom * kq * gamma_ratio * inner(q);
    }
    Ok((gbar / mu1k).powi(n as i32) * total)
}

/// Amount of fading Var(γ)/E[γ]² = (1+2K)/(μ(1+K)²) + K²ΣΔᵢ²/(2(1+K)²).
pub fn aof<T: Real>(params: &MtwParams<T>) -> Result<T> {
    params.validate()?;
    let k = params.k_factor;
    let one_k = T::one() + k;
    let two = cst::<T>(2.0);
    let sum_d2 = params
        .deltas
        .iter()
        .fold(T::zero(), |acc, &d| acc + d * d);
    Ok(((T::one() + two * k) / params.mu + k * k * sum_d2 / two) / (one_k * one_k))
}

/// Leading CDF term for x/γ̄ → 0:
/// μ^μ(1+K)^μ / (Γ(μ+1) e^{μK}) · Π I₀(μKΔᵢ) · (x/γ̄)^μ.
pub fn asymptotic_cdf<T: Real>(params: &MtwParams<T>, x: T) -> Result<T> {
    params.validate()?;
    if x < T::zero() {
        return Err(Error::Domain {
            func: "asymptotic_cdf",
            msg: "requires x >= 0",
        });
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    let mu = params.mu;
    let k = params.k_factor;
    let mut ln = mu * (mu * (T::one() + k)).ln() - ln_gamma(mu + T::one())? - mu * k
        + mu * (x / params.mean_snr).ln();
    for &delta in &params.deltas {
        let arg = mu * k * delta;
        if arg > T::zero() {
            ln = ln + arg + bessel_i_scaled_ln(T::zero(), arg)?;
        }
    }
    Ok(ln.exp())
}
