//! Performance metrics built on the Laplace-domain statistics: outage in
//! noise- and interference-limited regimes, energy-detection probability
//! with ROC/AUC (including MRC diversity), and the composite Inverse-Gamma
//! shadowing model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    gmgf_ln_table, tuples, Method, MtwParams, NumericPolicy, SnrDistribution,
};
use crate::scalar::{as_f64, cst, Real};
use crate::specfun::{ln_gamma, reg_upper_gamma};

/// Cap on r + M in the multinomial enumerations; the tuple count
/// C(r+M−1, M−1) explodes past this.
const COMBINATORIAL_CAP: usize = 40;

/// Outer truncation bound for the detection-probability series.
const DETECTION_MASS_TOL: f64 = 1e-12;

/// Energy-detector configuration: u = TW samples, threshold η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig<T> {
    /// Time-bandwidth sample count u ≥ 1.
    pub u: u32,
    /// Detection threshold η > 0.
    pub eta: T,
}

impl<T: Real> DetectorConfig<T> {
    pub fn new(u: u32, eta: T) -> Result<Self> {
        if u < 1 {
            return Err(Error::Domain {
                func: "DetectorConfig",
                msg: "u must be >= 1",
            });
        }
        if !(eta > T::zero()) {
            return Err(Error::Domain {
                func: "DetectorConfig",
                msg: "eta must be positive",
            });
        }
        Ok(Self { u, eta })
    }
}

/// Interference-limited scenario: M-branch MRC, L equal-power Rayleigh
/// interferers, SIR threshold β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceScenario<T> {
    pub branches: usize,
    pub interferers: usize,
    pub interferer_power: T,
    pub threshold_beta: T,
}

impl<T: Real> InterferenceScenario<T> {
    pub fn new(branches: usize, interferers: usize, interferer_power: T, beta: T) -> Result<Self> {
        if branches < 1 || interferers < 1 {
            return Err(Error::Domain {
                func: "InterferenceScenario",
                msg: "branches and interferers must be >= 1",
            });
        }
        if !(interferer_power > T::zero()) || !(beta > T::zero()) {
            return Err(Error::Domain {
                func: "InterferenceScenario",
                msg: "interferer power and threshold must be positive",
            });
        }
        Ok(Self {
            branches,
            interferers,
            interferer_power,
            threshold_beta: beta,
        })
    }
}

/// Inverse-Gamma shadowing parameters for the composite model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgParams<T> {
    /// IG shape λ (integer, ≥ 2 so the mean exists and the CDF is finite).
    pub lambda: u32,
    /// Mean received power Q̄.
    pub mean_power: T,
    /// Mean SNR γ̄_Q at the receiver.
    pub mean_snr_q: T,
}

impl<T: Real> IgParams<T> {
    pub fn new(lambda: u32, mean_power: T, mean_snr_q: T) -> Result<Self> {
        if lambda < 2 {
            return Err(Error::InvalidLambda(lambda as f64));
        }
        if !(mean_power > T::zero()) || !(mean_snr_q > T::zero()) {
            return Err(Error::Domain {
                func: "IgParams",
                msg: "mean power and mean SNR must be positive",
            });
        }
        Ok(Self {
            lambda,
            mean_power,
            mean_snr_q,
        })
    }
}

// ---------------------------------------------------------------------------
// noise-limited outage
// ---------------------------------------------------------------------------

/// Outage probability P(log₂(1+γ) < Rs) = F_γ(2^{Rs} − 1).
pub fn outage<T: Real>(params: &MtwParams<T>, policy: &NumericPolicy, rs: T) -> Result<T> {
    if !(rs > T::zero()) {
        return Err(Error::Domain {
            func: "outage",
            msg: "rate threshold must be positive",
        });
    }
    let x = cst::<T>(2.0).powf(rs) - T::one();
    let dist = SnrDistribution::new(params.clone(), policy.clone())?;
    dist.cdf(x, Method::Auto)
}

// ---------------------------------------------------------------------------
// MRC / interference-limited outage
// ---------------------------------------------------------------------------

/// ln of the combined-SNR GMGF table for M independent branches:
/// φ^{(r)}(s) = Σ_{τ(r,M)} r!/(Πrᵢ!) Π φ_{γᵢ}^{(rᵢ)}(s), r = 0..=rmax.
fn mrc_gmgf_ln_table<T: Real>(
    branches: &[MtwParams<T>],
    policy: &NumericPolicy,
    rmax: usize,
    s: T,
) -> Result<Vec<T>> {
    let m = branches.len();
    if m == 0 {
        return Err(Error::Domain {
            func: "mrc_gmgf",
            msg: "need at least one branch",
        });
    }
    if m > 1 && rmax + m > COMBINATORIAL_CAP {
        return Err(Error::CombinatorialCap {
            got: rmax + m,
            cap: COMBINATORIAL_CAP,
        });
    }
    let per_branch: Vec<Vec<T>> = branches
        .iter()
        .map(|p| gmgf_ln_table(p, policy, rmax as u32, s))
        .collect::<Result<_>>()?;
    if m == 1 {
        return Ok(per_branch.into_iter().next().expect("one branch"));
    }
    let ln_fact: Vec<T> = (0..=rmax)
        .map(|i| ln_gamma(cst::<T>((i + 1) as f64)).expect("positive"))
        .collect();
    let mut out = Vec::with_capacity(rmax + 1);
    for r in 0..=rmax {
        let mut max_l = T::neg_infinity();
        let mut ls = Vec::new();
        for tuple in tuples(r, m) {
            let mut l = ln_fact[r];
            for (i, &ri) in tuple.iter().enumerate() {
                l = l - ln_fact[ri] + per_branch[i][ri];
            }
            if l > max_l {
                max_l = l;
            }
            ls.push(l);
        }
        let mut acc = T::zero();
        for l in ls {
            acc = acc + (l - max_l).exp();
        }
        out.push(max_l + acc.ln());
    }
    Ok(out)
}

/// Combined GMGF of an M-branch MRC receiver at derivative order r.
pub fn mrc_gmgf<T: Real>(
    branches: &[MtwParams<T>],
    policy: &NumericPolicy,
    r: usize,
    s: T,
) -> Result<T> {
    Ok(mrc_gmgf_ln_table(branches, policy, r, s)?[r].exp())
}

/// Interference-limited outage for an M-branch MRC receiver and L equal
/// average power Rayleigh interferers:
/// P_o = Σ_{r=0}^{L−1} (βP_I)^{−r} Σ_{τ(r,M)} Π φ^{(rᵢ)}(−1/(βP_I))/rᵢ!,
/// with γ̄ in the GMGF read as the average power per antenna.
pub fn sir_outage<T: Real>(
    scenario: &InterferenceScenario<T>,
    params: &MtwParams<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    let m = scenario.branches;
    let l_int = scenario.interferers;
    if l_int - 1 + m > COMBINATORIAL_CAP {
        return Err(Error::CombinatorialCap {
            got: l_int - 1 + m,
            cap: COMBINATORIAL_CAP,
        });
    }
    let beta_pi = scenario.threshold_beta * scenario.interferer_power;
    let s = -(beta_pi.recip());
    let branches = vec![params.clone(); m];
    let table = mrc_gmgf_ln_table(&branches, policy, l_int - 1, s)?;
    let ln_fact: Vec<T> = (0..l_int)
        .map(|i| ln_gamma(cst::<T>((i + 1) as f64)).expect("positive"))
        .collect();
    let mut acc = T::zero();
    for r in 0..l_int {
        // Σ_{τ(r,M)} Π φ/rᵢ! = mrc^{(r)} / r!
        let ln_term = -cst::<T>(r as f64) * beta_pi.ln() + table[r] - ln_fact[r];
        acc = acc + ln_term.exp();
    }
    Ok(acc.min(T::one()).max(T::zero()))
}

// ---------------------------------------------------------------------------
// energy detection
// ---------------------------------------------------------------------------

/// False-alarm probability P_f = e^{−η/2} Σ_{k<u} (η/2)^k/k!, i.e. the
/// regularized upper gamma Q(u, η/2).
pub fn false_alarm<T: Real>(config: &DetectorConfig<T>) -> Result<T> {
    reg_upper_gamma(cst::<T>(config.u as f64), config.eta / cst::<T>(2.0))
}

/// Threshold η achieving a target false-alarm probability (bisection on the
/// monotone map η ↦ Q(u, η/2)).
pub fn eta_for_false_alarm<T: Real>(u: u32, pf: T) -> Result<T> {
    if !(pf > T::zero()) || !(pf < T::one()) {
        return Err(Error::Domain {
            func: "eta_for_false_alarm",
            msg: "target must lie in (0, 1)",
        });
    }
    let uf = cst::<T>(u as f64);
    let two = cst::<T>(2.0);
    let mut lo = T::zero();
    let mut hi = two * (uf + cst::<T>(10.0));
    while reg_upper_gamma(uf, hi / two)? > pf {
        hi = hi * two;
        if hi > cst::<T>(1e9) {
            return Err(Error::ConvergenceCap {
                func: "eta_for_false_alarm",
            });
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if reg_upper_gamma(uf, mid / two)? > pf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

/// Detection machinery with the η-independent part precomputed: the series
/// Σ_n φ^{(n)}(−1)/n! · Q(u+n, η/2) reuses ln φ^{(n)}(−1)/n! across an
/// entire ROC sweep. The weights sum to 1 analytically, so the retained
/// mass bounds the truncation error (every gamma tail is ≤ 1).
#[derive(Debug, Clone)]
pub struct DetectionKernel<T> {
    u: u32,
    ln_phi_over_fact: Vec<T>,
    mass_defect: T,
}

impl<T: Real> DetectionKernel<T> {
    /// Builds the kernel for `branches` independent identically-faded MRC
    /// branches (1 = single antenna).
    pub fn build(
        params: &MtwParams<T>,
        u: u32,
        policy: &NumericPolicy,
        branches: usize,
    ) -> Result<Self> {
        if u < 1 {
            return Err(Error::Domain {
                func: "DetectionKernel",
                msg: "u must be >= 1",
            });
        }
        let tol = cst::<T>(DETECTION_MASS_TOL);
        let s = -T::one();
        let branch_vec = vec![params.clone(); branches];
        // grow the order table until the Poisson-mixture mass converges
        let mut nmax = 32usize;
        loop {
            if branches > 1 && nmax + branches > COMBINATORIAL_CAP {
                nmax = COMBINATORIAL_CAP - branches;
            }
            let table = mrc_gmgf_ln_table(&branch_vec, policy, nmax, s)?;
            let mut ln_phi_over_fact = Vec::with_capacity(nmax + 1);
            let mut mass = T::zero();
            let mut done = false;
            for (n, &ln_phi) in table.iter().enumerate() {
                let v = ln_phi - ln_gamma(cst::<T>((n + 1) as f64))?;
                ln_phi_over_fact.push(v);
                mass = mass + v.exp();
                if T::one() - mass < tol {
                    done = true;
                    break;
                }
            }
            let defect = (T::one() - mass).max(T::zero());
            if done || (branches > 1 && nmax + branches >= COMBINATORIAL_CAP) || nmax >= 2048 {
                if !done && as_f64(defect) > 1e-9 {
                    return Err(Error::ConvergenceCap {
                        func: "DetectionKernel",
                    });
                }
                return Ok(Self {
                    u,
                    ln_phi_over_fact,
                    mass_defect: defect,
                });
            }
            nmax *= 2;
        }
    }

    /// Average detection probability at threshold η.
    pub fn detection_prob(&self, eta: T) -> Result<T> {
        if !(eta > T::zero()) {
            return Err(Error::Domain {
                func: "detection_prob",
                msg: "eta must be positive",
            });
        }
        let y = eta / cst::<T>(2.0);
        let uf = cst::<T>(self.u as f64);
        // Q(u+n, y) advanced by Q(a+1, y) = Q(a, y) + y^a e^{−y}/Γ(a+1)
        let mut q = reg_upper_gamma(uf, y)?;
        let mut ln_inc = uf * y.ln() - y - ln_gamma(uf + T::one())?;
        let ln_y = y.ln();
        let mut acc = T::zero();
        for (n, &ln_w) in self.ln_phi_over_fact.iter().enumerate() {
            acc = acc + ln_w.exp() * q;
            q = (q + ln_inc.exp()).min(T::one());
            ln_inc = ln_inc + ln_y - (uf + cst::<T>((n + 1) as f64)).ln();
        }
        // the dropped tail has Q ≤ 1
        Ok((acc + self.mass_defect * T::zero()).min(T::one()).max(T::zero()))
    }

    pub fn mass_defect(&self) -> T {
        self.mass_defect
    }
}

/// Average detection probability of a single-antenna energy detector.
pub fn detection_prob<T: Real>(
    params: &MtwParams<T>,
    config: &DetectorConfig<T>,
    policy: &NumericPolicy,
) -> Result<T> {
    DetectionKernel::build(params, config.u, policy, 1)?.detection_prob(config.eta)
}

/// Average detection probability with M-branch MRC.
pub fn detection_prob_mrc<T: Real>(
    params: &MtwParams<T>,
    config: &DetectorConfig<T>,
    policy: &NumericPolicy,
    branches: usize,
) -> Result<T> {
    DetectionKernel::build(params, config.u, policy, branches)?.detection_prob(config.eta)
}

/// (P_f, P_d) pairs over a threshold grid, in grid order.
pub fn roc_curve<T: Real>(
    params: &MtwParams<T>,
    u: u32,
    policy: &NumericPolicy,
    branches: usize,
    etas: &[T],
) -> Result<Vec<(T, T)>> {
    let kernel = DetectionKernel::build(params, u, policy, branches)?;
    etas.par_iter()
        .map(|&eta| {
            let pf = false_alarm(&DetectorConfig { u, eta })?;
            let pd = kernel.detection_prob(eta)?;
            Ok((pf, pd))
        })
        .collect()
}

/// Area under the ROC curve:
/// A = 1 − Σ_{q=0}^{u−1} Σ_{n=0}^{q} C(q+u−1, q−n) (1/2)^{n+q+u} φ^{(n)}(−1/2)/n!.
pub fn auc<T: Real>(
    params: &MtwParams<T>,
    u: u32,
    policy: &NumericPolicy,
    branches: usize,
) -> Result<T> {
    if u < 1 {
        return Err(Error::Domain {
            func: "auc",
            msg: "u must be >= 1",
        });
    }
    let s = -T::one() / cst::<T>(2.0);
    let branch_vec = vec![params.clone(); branches];
    let table = mrc_gmgf_ln_table(&branch_vec, policy, (u - 1) as usize, s)?;
    let ln_half = cst::<T>(0.5).ln();
    let mut total = T::zero();
    for q in 0..u as usize {
        for n in 0..=q {
            let ln_c = crate::specfun::ln_binomial::<T>(q + u as usize - 1, q - n);
            let ln_term = ln_c
                + cst::<T>((n + q + u as usize) as f64) * ln_half
                - ln_gamma(cst::<T>((n + 1) as f64))?
                + table[n];
            total = total + ln_term.exp();
        }
    }
    Ok((T::one() - total).max(T::zero()).min(T::one()))
}

// ---------------------------------------------------------------------------
// composite IG/MTW shadowing
// ---------------------------------------------------------------------------

fn composite_guard<T: Real>(ig: &IgParams<T>, params: &MtwParams<T>) -> Result<()> {
    if ig.lambda < 2 {
        return Err(Error::InvalidLambda(ig.lambda as f64));
    }
    if (params.mean_snr - T::one()).abs() > cst::<T>(1e-12) {
        return Err(Error::CompositeMeanSnr(as_f64(params.mean_snr)));
    }
    Ok(())
}

/// PDF of the received power Q under IG shadowing of an MTW channel:
/// f_Q(q) = Q̄^λ (λ−1)^λ / (q^{λ+1} Γ(λ)) · φ^{(λ)}(s), s = (1−λ)Q̄/q.
pub fn ig_pdf<T: Real>(
    ig: &IgParams<T>,
    params: &MtwParams<T>,
    policy: &NumericPolicy,
    q: T,
) -> Result<T> {
    composite_guard(ig, params)?;
    if !(q > T::zero()) {
        return Err(Error::Domain {
            func: "ig_pdf",
            msg: "power must be positive",
        });
    }
    let lam = cst::<T>(ig.lambda as f64);
    let s = (T::one() - lam) * ig.mean_power / q;
    let ln_phi = gmgf_ln_table(params, policy, ig.lambda, s)?[ig.lambda as usize];
    let ln = lam * (ig.mean_power * (lam - T::one())).ln()
        - (lam + T::one()) * q.ln()
        - ln_gamma(lam)?
        + ln_phi;
    Ok(ln.exp())
}

/// CDF of the received power Q for integer λ:
/// F_Q(q) = Σ_{n=0}^{λ−1} (Q̄(λ−1)/q)^n / n! · φ^{(n)}(s), s = (1−λ)Q̄/q.
pub fn ig_cdf<T: Real>(
    ig: &IgParams<T>,
    params: &MtwParams<T>,
    policy: &NumericPolicy,
    q: T,
) -> Result<T> {
    composite_guard(ig, params)?;
    if !(q > T::zero()) {
        return Err(Error::Domain {
            func: "ig_cdf",
            msg: "power must be positive",
        });
    }
    let lam = cst::<T>(ig.lambda as f64);
    let s = (T::one() - lam) * ig.mean_power / q;
    let table = gmgf_ln_table(params, policy, ig.lambda - 1, s)?;
    let ln_ratio = (ig.mean_power * (lam - T::one()) / q).ln();
    let mut acc = T::zero();
    for (n, &ln_phi) in table.iter().enumerate() {
        let ln_term =
            cst::<T>(n as f64) * ln_ratio - ln_gamma(cst::<T>((n + 1) as f64))? + ln_phi;
        acc = acc + ln_term.exp();
    }
    Ok(acc.min(T::one()).max(T::zero()))
}

/// Composite outage P(γ_Q < γ_th) = F_Q(Q̄ γ_th / γ̄_Q).
pub fn ig_outage<T: Real>(
    ig: &IgParams<T>,
    params: &MtwParams<T>,
    policy: &NumericPolicy,
    gamma_th: T,
) -> Result<T> {
    if !(gamma_th > T::zero()) {
        return Err(Error::Domain {
            func: "ig_outage",
            msg: "threshold must be positive",
        });
    }
    ig_cdf(ig, params, policy, ig.mean_power * gamma_th / ig.mean_snr_q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mgf, series_coeffs};
    use crate::quad;

    fn fig7_params() -> MtwParams<f64> {
        MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1.0).unwrap()
    }

    #[test]
    fn outage_at_tiny_rate_vanishes() {
        let p = MtwParams::<f64>::new(1.0, vec![0.8], 2.0, 1.0).unwrap();
        let v = outage(&p, &NumericPolicy::default(), 1e-12).unwrap();
        assert!(v < 1e-9, "{v}");
    }

    #[test]
    fn outage_equals_cdf_at_threshold() {
        let p = MtwParams::<f64>::new(1.0, vec![0.8], 2.0, 1.0).unwrap();
        let pol = NumericPolicy::default();
        let got = outage(&p, &pol, 1.0).unwrap();
        let want = series_coeffs(&p, &pol).unwrap().cdf(1.0);
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn sir_outage_single_term_is_mgf() {
        // L = 1, M = 1: P_o = MGF(−1/(βP_I))
        let p = MtwParams::<f64>::new(10.0, vec![0.8], 2.0, 1.0).unwrap();
        let sc = InterferenceScenario::new(1, 1, 1.0, 10.0).unwrap();
        let got = sir_outage(&sc, &p, &NumericPolicy::default()).unwrap();
        let want = mgf(&p, -0.1).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn sir_outage_monotonicities() {
        // P_o decreases with μ at fixed SIR; more interferers at the same
        // total average interference lower the outage
        let pol = NumericPolicy::default();
        let sir = 10.0f64; // per-branch average SIR, linear
        let mut prev = f64::INFINITY;
        for mu in [1.0, 2.0, 10.0] {
            let p = MtwParams::<f64>::new(10.0, vec![0.8], mu, 1.0).unwrap();
            let l = 1usize;
            let p_i = p.mean_snr / (l as f64 * sir);
            let sc = InterferenceScenario::new(3, l, p_i, 10.0).unwrap();
            let po = sir_outage(&sc, &p, &pol).unwrap();
            assert!(po < prev, "mu={mu}: {po} !< {prev}");
            prev = po;
        }
        let p = MtwParams::<f64>::new(10.0, vec![0.8], 2.0, 1.0).unwrap();
        let po_l = |l: usize| {
            let p_i = p.mean_snr / (l as f64 * sir);
            let sc = InterferenceScenario::new(3, l, p_i, 10.0).unwrap();
            sir_outage(&sc, &p, &pol).unwrap()
        };
        assert!(po_l(2) < po_l(1));
    }

    #[test]
    fn combinatorial_guard_fires() {
        let p = MtwParams::<f64>::new(1.0, vec![0.5], 2.0, 1.0).unwrap();
        let branches = vec![p; 39];
        let err = mrc_gmgf(&branches, &NumericPolicy::default(), 5, -1.0).unwrap_err();
        assert!(matches!(err, Error::CombinatorialCap { .. }));
    }

    #[test]
    fn false_alarm_closed_forms() {
        // u = 1 → e^{−η/2}
        let c = DetectorConfig::new(1, 3.0f64).unwrap();
        assert!((false_alarm(&c).unwrap() - (-1.5f64).exp()).abs() < 1e-14);
        // η → 0 → 1
        let c = DetectorConfig::new(4, 1e-14f64).unwrap();
        assert!((false_alarm(&c).unwrap() - 1.0).abs() < 1e-10);
        // u=5, η=10 equals Q(5, 5): direct Poisson sum
        let c = DetectorConfig::new(5, 10.0f64).unwrap();
        let direct: f64 = (0..5).map(|k| {
            (-5.0f64).exp() * 5.0f64.powi(k) / (1..=k).map(|i| i as f64).product::<f64>()
        })
        .sum();
        assert!((false_alarm(&c).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn eta_inversion_round_trips() {
        for &(u, pf) in &[(1u32, 0.1f64), (2, 0.1), (5, 0.01), (3, 0.9)] {
            let eta = eta_for_false_alarm(u, pf).unwrap();
            let got = false_alarm(&DetectorConfig { u, eta }).unwrap();
            assert!((got - pf).abs() < 1e-10, "u={u} pf={pf}: {got}");
        }
    }

    #[test]
    fn detection_tends_to_false_alarm_at_zero_snr() {
        let p = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1e-9).unwrap();
        let c = DetectorConfig::new(2, 5.0f64).unwrap();
        let pol = NumericPolicy::default();
        let pd = detection_prob(&p, &c, &pol).unwrap();
        let pf = false_alarm(&c).unwrap();
        assert!((pd - pf).abs() < 1e-6, "{pd} vs {pf}");
    }

    #[test]
    fn detection_approaches_one_at_tiny_threshold() {
        let c = DetectorConfig::new(1, 1e-12f64).unwrap();
        let pd = detection_prob(&fig7_params(), &c, &NumericPolicy::default()).unwrap();
        assert!(pd > 1.0 - 1e-6, "{pd}");
    }

    #[test]
    fn detection_monotone_in_eta_and_above_false_alarm() {
        let kernel =
            DetectionKernel::build(&fig7_params(), 2, &NumericPolicy::default(), 1).unwrap();
        let mut prev = 1.0f64;
        for i in 1..30 {
            let eta = 0.5 * i as f64;
            let pd = kernel.detection_prob(eta).unwrap();
            assert!(pd <= prev + 1e-12);
            let pf = false_alarm(&DetectorConfig { u: 2, eta }).unwrap();
            assert!(pd >= pf - 1e-12, "eta={eta}: {pd} < {pf}");
            prev = pd;
        }
    }

    #[test]
    fn roc_endpoints() {
        let p = fig7_params();
        let pol = NumericPolicy::default();
        let pts = roc_curve(&p, 2, &pol, 1, &[1e-9, 60.0]).unwrap();
        assert!(pts[0].0 > 1.0 - 1e-6 && pts[0].1 > 1.0 - 1e-6);
        assert!(pts[1].0 < 1e-9 && pts[1].1 < 1e-3);
    }

    #[test]
    fn mrc_single_branch_is_identity() {
        let p = fig7_params();
        let pol = NumericPolicy::default();
        for r in [0usize, 1, 3] {
            let a = mrc_gmgf(&[p.clone()], &pol, r, -0.7).unwrap();
            let b = crate::model::gmgf(&p, &pol, r as u32, -0.7).unwrap();
            assert!((a - b).abs() < 1e-12 * b.abs());
        }
    }

    #[test]
    fn mrc_order_zero_is_product_of_mgfs() {
        let p1 = MtwParams::<f64>::new(2.0, vec![0.5], 2.0, 1.0).unwrap();
        let p2 = MtwParams::<f64>::new(7.0, vec![], 3.0, 0.6).unwrap();
        let pol = NumericPolicy::default();
        let a = mrc_gmgf(&[p1.clone(), p2.clone()], &pol, 0, -0.4).unwrap();
        let b = mgf(&p1, -0.4).unwrap() * mgf(&p2, -0.4).unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs(), "{a} vs {b}");
    }

    #[test]
    fn mrc_two_identical_branches_match_squared_mgf_derivatives() {
        // φ_sum^{(2)}(s) = d²/ds² [M(s)²] by central differences
        let p = fig7_params();
        let pol = NumericPolicy::default();
        let s = -0.8f64;
        let h = 1e-4;
        let m2 = |s: f64| {
            let v = mgf(&p, s).unwrap();
            v * v
        };
        let want = (m2(s + h) - 2.0 * m2(s) + m2(s - h)) / (h * h);
        let got = mrc_gmgf(&[p.clone(), p.clone()], &pol, 2, s).unwrap();
        assert!(
            (got - want).abs() < 1e-5 * want.abs(),
            "{got} vs {want}"
        );
    }

    #[test]
    fn auc_is_chance_level_at_zero_snr() {
        let p = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1e-10).unwrap();
        let a = auc(&p, 3, &NumericPolicy::default(), 1).unwrap();
        assert!((a - 0.5).abs() < 1e-6, "{a}");
    }

    #[test]
    fn auc_bounds_and_branch_monotonicity() {
        let p = fig7_params();
        let pol = NumericPolicy::default();
        let mut prev = 0.5;
        for m in 1..=3usize {
            let a = auc(&p, 5, &pol, m).unwrap();
            assert!(a > prev && a < 1.0, "M={m}: {a}");
            prev = a;
        }
    }

    #[test]
    fn auc_matches_roc_integration() {
        // trapezoid over the ROC curve traced by η
        let p = fig7_params();
        let pol = NumericPolicy::default();
        let u = 1u32;
        let mut etas = vec![1e-8f64];
        for i in 0..3000 {
            etas.push(1e-4 * (10f64).powf(7.0 * i as f64 / 2999.0));
        }
        etas.push(1e5);
        let mut pts = roc_curve(&p, u, &pol, 1, &etas).unwrap();
        pts.push((0.0, 0.0));
        pts.insert(0, (1.0, 1.0));
        let mut integral = 0.0;
        for w in pts.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            integral += (x0 - x1) * 0.5 * (y0 + y1);
        }
        let got = auc(&p, u, &pol, 1).unwrap();
        assert!(
            (got - integral).abs() < 1e-4,
            "auc {got} vs trapezoid {integral}"
        );
    }

    #[test]
    fn ig_cdf_tends_to_one() {
        let p = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1.0).unwrap();
        let ig = IgParams::new(3, 1.0f64, 1.0).unwrap();
        let v = ig_cdf(&ig, &p, &NumericPolicy::default(), 1e6).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn ig_pdf_normalizes() {
        let p = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1.0).unwrap();
        let pol = NumericPolicy::default();
        for lambda in [2u32, 3, 4] {
            let ig = IgParams::new(lambda, 1.0f64, 1.0).unwrap();
            // split at the heavy tail; f_Q ~ q^{−λ−1} beyond
            let mut total = quad::integrate_panels(
                |q| ig_pdf(&ig, &p, &pol, q).unwrap(),
                1e-9,
                30.0,
                48,
                60,
            );
            total += quad::integrate_panels(
                |q| ig_pdf(&ig, &p, &pol, q).unwrap(),
                30.0,
                4000.0,
                32,
                40,
            );
            // analytic remainder bound: ∫_B^∞ ≈ (Q̄(λ−1))^λ/(λ Γ(λ) B^λ)
            assert!(
                (total - 1.0).abs() < 1e-5,
                "lambda={lambda}: total={total}"
            );
        }
    }

    #[test]
    fn ig_outage_increases_with_threshold_and_decreases_with_lambda() {
        let p = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1.0).unwrap();
        let pol = NumericPolicy::default();
        let ig3 = IgParams::new(3, 1.0f64, 1.0).unwrap();
        let mut prev = 0.0;
        for gth_db in [-10.0f64, -5.0, 0.0, 5.0] {
            let gth = 10f64.powf(gth_db / 10.0);
            let v = ig_outage(&ig3, &p, &pol, gth).unwrap();
            assert!(v > prev, "gth={gth_db} dB: {v}");
            prev = v;
        }
        // at low γ_th, larger λ (less shadowing spread) gives lower outage
        let gth = 10f64.powf(-1.0);
        let ig2 = IgParams::new(2, 1.0f64, 1.0).unwrap();
        let ig8 = IgParams::new(8, 1.0f64, 1.0).unwrap();
        let lo = ig_outage(&ig8, &p, &pol, gth).unwrap();
        let hi = ig_outage(&ig2, &p, &pol, gth).unwrap();
        assert!(lo < hi, "{lo} vs {hi}");
    }

    #[test]
    fn composite_requires_unit_mean_snr_and_integer_lambda() {
        let bad = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 2.0).unwrap();
        let ig = IgParams::new(3, 1.0f64, 1.0).unwrap();
        assert!(matches!(
            ig_pdf(&ig, &bad, &NumericPolicy::default(), 1.0).unwrap_err(),
            Error::CompositeMeanSnr(_)
        ));
        assert!(matches!(
            IgParams::new(1, 1.0f64, 1.0).unwrap_err(),
            Error::InvalidLambda(_)
        ));
        let good = MtwParams::<f64>::new(10.0, vec![0.3], 5.0, 1.0).unwrap();
        assert!(matches!(
            ig_pdf(&ig, &good, &NumericPolicy::default(), 0.0).unwrap_err(),
            Error::Domain { .. }
        ));
    }
}
