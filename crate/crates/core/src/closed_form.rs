//! Exact laws and limits of the mean-field model.
//!
//! Infinite series over event indices are truncated where the relevant
//! Poisson tail drops below a tolerance `ε`; every result reports the mass
//! actually dropped.

use std::io::Write;

use statrs::function::factorial::ln_factorial;

use crate::collab_model::{CoauthorshipLaw, LinearParams};
use crate::error::{Error, Result};
use crate::indices::Phi;
use crate::process::IntensityFunction;

pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Work limit for joint laws, in elementary DP updates.
pub const DEFAULT_JOINT_BUDGET: u64 = 2_000_000_000;

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("tolerance must lie in (0, 1), got {eps}")))
    }
}

/// Poisson pmf on `0..=k*`, where `k*` is the smallest index whose upper
/// tail is at most `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPoisson {
    mean: f64,
    pmf: Vec<f64>,
    tail: f64,
}

impl TruncatedPoisson {
    pub fn new(mean: f64, eps: f64) -> Result<Self> {
        check_epsilon(eps)?;
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::domain(format!("Poisson mean must be finite and ≥ 0, got {mean}")));
        }
        if mean == 0.0 {
            return Ok(Self {
                mean,
                pmf: vec![1.0],
                tail: 0.0,
            });
        }
        let cap = (mean + 40.0 * mean.sqrt() + 50.0).ceil() as usize;
        let ln_mean = mean.ln();
        let full: Vec<f64> = (0..=cap)
            .map(|k| (k as f64 * ln_mean - mean - ln_factorial(k as u64)).exp())
            .collect();
        // above[k] = Σ_{j > k} pmf[j]
        let mut above = vec![0.0; cap + 1];
        for k in (0..cap).rev() {
            above[k] = above[k + 1] + full[k + 1];
        }
        let cut = (0..=cap).find(|&k| above[k] <= eps).unwrap_or(cap);
        Ok(Self {
            mean,
            pmf: full[..=cut].to_vec(),
            tail: above[cut],
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Mass beyond the last retained index.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn max_index(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }
}

/// Law of `m_{n,1}`, the joint-paper count of one author after `n` events.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorCountDistribution {
    pub n: usize,
    /// `pmf[k] = p_{n,k}` for `k = 0..=n`.
    pub pmf: Vec<f64>,
}

impl AuthorCountDistribution {
    /// `μ_{n,r}`.
    pub fn moment(&self, r: i32) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * (k as f64).powi(r))
            .sum()
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }
}

fn next_author_pmf(law: &CoauthorshipLaw, prev: &[f64]) -> Vec<f64> {
    let n = prev.len();
    let mut next = vec![0.0; n + 1];
    for (k, slot) in next.iter_mut().enumerate() {
        let stay = if k < n {
            (1.0 - law.prob(n, k)) * prev[k]
        } else {
            0.0
        };
        let step = if k >= 1 {
            law.prob(n, k - 1) * prev[k - 1]
        } else {
            0.0
        };
        *slot = stay + step;
    }
    next
}

/// `p_{n,·}` for `n = 0..=n_max`.
pub fn per_author_pmfs(law: &CoauthorshipLaw, n_max: usize) -> Result<Vec<AuthorCountDistribution>> {
    law.check_events(n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut pmf = vec![1.0];
    for n in 0..=n_max {
        if n > 0 {
            pmf = next_author_pmf(law, &pmf);
        }
        out.push(AuthorCountDistribution { n, pmf: pmf.clone() });
    }
    Ok(out)
}

pub fn per_author_pmf(law: &CoauthorshipLaw, n: usize) -> Result<AuthorCountDistribution> {
    law.check_events(n)?;
    let mut pmf = vec![1.0];
    for _ in 0..n {
        pmf = next_author_pmf(law, &pmf);
    }
    Ok(AuthorCountDistribution { n, pmf })
}

/// `Binomial(trials, q)` pmf.
pub fn binomial_pmf(trials: usize, q: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; trials + 1];
    if q <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if q >= 1.0 {
        pmf[trials] = 1.0;
        return pmf;
    }
    let (lq, lr) = (q.ln(), (-q).ln_1p());
    let ln_n = ln_factorial(trials as u64);
    for (k, slot) in pmf.iter_mut().enumerate() {
        let lc = ln_n - ln_factorial(k as u64) - ln_factorial((trials - k) as u64);
        *slot = (lc + k as f64 * lq + (trials - k) as f64 * lr).exp();
    }
    pmf
}

/// Law of `#C_n` and, optionally, of `(#C_n, #C_{n+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoauthorSizeDistribution {
    pub n: usize,
    /// Inclusion probability of a single author at event `n`.
    pub q: f64,
    /// `pmf[k] = P(#C_n = k)`, `k = 0..=L`.
    pub pmf: Vec<f64>,
    /// `joint[k][k'] = P(#C_n = k, #C_{n+1} = k')`.
    pub joint: Option<Vec<Vec<f64>>>,
}

impl CoauthorSizeDistribution {
    pub fn mean(&self) -> f64 {
        self.q * (self.pmf.len() - 1) as f64
    }

    /// `E φ(#C_n + 1)`.
    pub fn expected_phi(&self, phi: &Phi) -> f64 {
        expected_phi(&self.pmf, phi)
    }
}

/// `E φ(K + 1)` for `K` with the given pmf.
pub fn expected_phi(pmf: &[f64], phi: &Phi) -> f64 {
    pmf.iter()
        .enumerate()
        .map(|(k, p)| p * phi.eval(k + 1))
        .sum()
}

/// Per-author probabilities of (in `C_n`, in `C_{n+1}`) as
/// `[both, first only, second only, neither]`, mixed over `m_{n-1}`.
fn four_outcome(law: &CoauthorshipLaw, n: usize, prev: &[f64]) -> [f64; 4] {
    let mut c = [0.0; 3];
    for (m, &p) in prev.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let now = law.prob(n, m);
        c[0] += p * now * law.prob(n + 1, m + 1);
        c[1] += p * now * (1.0 - law.prob(n + 1, m + 1));
        c[2] += p * (1.0 - now) * law.prob(n + 1, m);
    }
    let rest = (1.0 - c[0] - c[1] - c[2]).max(0.0);
    [c[0], c[1], c[2], rest]
}

/// Aggregates `authors` i.i.d. four-outcome draws into the joint law of
/// the two set sizes, one author at a time.
fn aggregate_joint(authors: usize, pi: [f64; 4]) -> Vec<Vec<f64>> {
    let [p11, p10, p01, p00] = pi;
    let mut d = vec![vec![0.0; authors + 1]; authors + 1];
    d[0][0] = 1.0;
    for i in 0..authors {
        for k in (0..=i + 1).rev() {
            for kp in (0..=i + 1).rev() {
                let mut v = p00 * d[k][kp];
                if k >= 1 {
                    v += p10 * d[k - 1][kp];
                    if kp >= 1 {
                        v += p11 * d[k - 1][kp - 1];
                    }
                }
                if kp >= 1 {
                    v += p01 * d[k][kp - 1];
                }
                d[k][kp] = v;
            }
        }
    }
    d
}

fn joint_cost(authors: usize, laws: usize) -> u64 {
    let l = authors as u64 + 1;
    (laws as u64).saturating_mul(l.saturating_mul(l).saturating_mul(l))
}

fn check_budget(authors: usize, laws: usize, budget: u64) -> Result<()> {
    let cost = joint_cost(authors, laws);
    if cost > budget {
        return Err(Error::Budget(format!(
            "{laws} joint laws over {authors} authors need about {cost} updates, budget is {budget}"
        )));
    }
    Ok(())
}

/// Laws of `#C_n` for `n = 1..=n_max`.
pub fn coauthor_size_laws(
    law: &CoauthorshipLaw,
    n_max: usize,
    want_joint: bool,
) -> Result<Vec<CoauthorSizeDistribution>> {
    coauthor_size_laws_with_budget(law, n_max, want_joint, DEFAULT_JOINT_BUDGET)
}

pub fn coauthor_size_laws_with_budget(
    law: &CoauthorshipLaw,
    n_max: usize,
    want_joint: bool,
    budget: u64,
) -> Result<Vec<CoauthorSizeDistribution>> {
    law.check_events(if want_joint { n_max + 1 } else { n_max })?;
    if want_joint {
        check_budget(law.authors(), n_max, budget)?;
    }
    let authors = law.authors();
    let mut out = Vec::with_capacity(n_max);
    let mut prev = vec![1.0];
    for n in 1..=n_max {
        let q: f64 = prev
            .iter()
            .enumerate()
            .map(|(m, p)| p * law.prob(n, m))
            .sum();
        let q = q.clamp(0.0, 1.0);
        let joint = want_joint.then(|| aggregate_joint(authors, four_outcome(law, n, &prev)));
        out.push(CoauthorSizeDistribution {
            n,
            q,
            pmf: binomial_pmf(authors, q),
            joint,
        });
        prev = next_author_pmf(law, &prev);
    }
    Ok(out)
}

pub fn coauthor_size_law(
    law: &CoauthorshipLaw,
    n: usize,
    want_joint: bool,
) -> Result<CoauthorSizeDistribution> {
    coauthor_size_law_with_budget(law, n, want_joint, DEFAULT_JOINT_BUDGET)
}

pub fn coauthor_size_law_with_budget(
    law: &CoauthorshipLaw,
    n: usize,
    want_joint: bool,
    budget: u64,
) -> Result<CoauthorSizeDistribution> {
    if n == 0 {
        return Err(Error::domain("event indices start at 1"));
    }
    law.check_events(if want_joint { n + 1 } else { n })?;
    if want_joint {
        check_budget(law.authors(), 1, budget)?;
    }
    let prev = per_author_pmf(law, n - 1)?.pmf;
    let q: f64 = prev
        .iter()
        .enumerate()
        .map(|(m, p)| p * law.prob(n, m))
        .sum();
    let q = q.clamp(0.0, 1.0);
    Ok(CoauthorSizeDistribution {
        n,
        q,
        pmf: binomial_pmf(law.authors(), q),
        joint: want_joint.then(|| aggregate_joint(law.authors(), four_outcome(law, n, &prev))),
    })
}

/// `H_t` and optionally `G_t`: laws of the first (and second) paper after
/// `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryLimits {
    pub t: f64,
    /// `λ(t)`.
    pub rate: f64,
    /// `Λ(t)`.
    pub mass: f64,
    /// `h[k] = H_t(k)`, `k = 0..=L`.
    pub h: Vec<f64>,
    /// `g[k][k'] = G_t(k, k')`.
    pub g: Option<Vec<Vec<f64>>>,
    /// Poisson mass dropped by the truncation.
    pub tail: f64,
}

impl TheoryLimits {
    pub fn h(&self, k: usize) -> f64 {
        self.h.get(k).copied().unwrap_or(0.0)
    }

    pub fn g(&self, k: usize, kp: usize) -> Option<f64> {
        self.g
            .as_ref()
            .map(|g| g.get(k).and_then(|row| row.get(kp)).copied().unwrap_or(0.0))
    }

    /// One row per `H_t(k)` and per `G_t(k, k')`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["quantity", "t", "k", "k_prime", "value"])?;
        let t = self.t.to_string();
        for (k, v) in self.h.iter().enumerate() {
            w.write_record(["H", &t, &k.to_string(), "", &v.to_string()])?;
        }
        if let Some(g) = &self.g {
            for (k, row) in g.iter().enumerate() {
                for (kp, v) in row.iter().enumerate() {
                    w.write_record(["G", &t, &k.to_string(), &kp.to_string(), &v.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn limits(
    law: &CoauthorshipLaw,
    f: &IntensityFunction,
    t: f64,
    eps: f64,
    want_joint: bool,
    budget: u64,
) -> Result<TheoryLimits> {
    let mass = f.cumulative(t)?;
    let u = TruncatedPoisson::new(mass, eps)?;
    let n_max = u.max_index() + 1;
    let sizes = coauthor_size_laws_with_budget(law, n_max, want_joint, budget)?;
    let l = law.authors();
    let mut h = vec![0.0; l + 1];
    let mut g = want_joint.then(|| vec![vec![0.0; l + 1]; l + 1]);
    for (idx, size) in sizes.iter().enumerate() {
        let w = u.prob(idx);
        for (hk, pk) in h.iter_mut().zip(&size.pmf) {
            *hk += w * pk;
        }
        if let (Some(g), Some(joint)) = (g.as_mut(), size.joint.as_ref()) {
            for (grow, jrow) in g.iter_mut().zip(joint) {
                for (gv, jv) in grow.iter_mut().zip(jrow) {
                    *gv += w * jv;
                }
            }
        }
    }
    Ok(TheoryLimits {
        t,
        rate: f.rate(t),
        mass,
        h,
        g,
        tail: u.tail(),
    })
}

/// `H_t` only.
pub fn ht(law: &CoauthorshipLaw, f: &IntensityFunction, t: f64, eps: f64) -> Result<TheoryLimits> {
    limits(law, f, t, eps, false, DEFAULT_JOINT_BUDGET)
}

/// `H_t` and `G_t`.
pub fn ht_gt(law: &CoauthorshipLaw, f: &IntensityFunction, t: f64, eps: f64) -> Result<TheoryLimits> {
    limits(law, f, t, eps, true, DEFAULT_JOINT_BUDGET)
}

pub fn ht_gt_with_budget(
    law: &CoauthorshipLaw,
    f: &IntensityFunction,
    t: f64,
    eps: f64,
    budget: u64,
) -> Result<TheoryLimits> {
    limits(law, f, t, eps, true, budget)
}

/// Small-window limits of the counts `X_{k+1}[t, t+h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Limits {
    /// `lim E X_{k+1}/h = lim Var X_{k+1}/h`.
    pub mean_var_rate: f64,
    /// `lim Cov(X_{k+1}, X_{k'+1})/h²`; `None` when `k = k'`.
    pub cov_coeff: Option<f64>,
    /// `lim Corr(X_{k+1}, X_{k'+1})/h`; `None` when `k = k'` or a marginal
    /// vanishes.
    pub corr_coeff: Option<f64>,
}

pub fn theorem1_limits(limits: &TheoryLimits, k: usize, kp: usize) -> Result<Theorem1Limits> {
    let lambda = limits.rate;
    let mean_var_rate = lambda * limits.h(k);
    if k == kp {
        return Ok(Theorem1Limits {
            mean_var_rate,
            cov_coeff: None,
            corr_coeff: None,
        });
    }
    let (gk, gkp) = match (limits.g(k, kp), limits.g(kp, k)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Usage("covariance limits need G_t; use ht_gt".into())),
    };
    let (hk, hkp) = (limits.h(k), limits.h(kp));
    let centred = 0.5 * (gk + gkp) - hk * hkp;
    let denom = (hk * hkp).sqrt();
    Ok(Theorem1Limits {
        mean_var_rate,
        cov_coeff: Some(lambda * lambda * centred),
        corr_coeff: (denom > 0.0).then(|| lambda * centred / denom),
    })
}

fn linear_prefix(params: &LinearParams, n: usize) -> Result<()> {
    params.check_admissible()?;
    if n > params.len() {
        return Err(Error::domain(format!(
            "linear law has {} coefficient pairs, {n} requested",
            params.len()
        )));
    }
    Ok(())
}

/// `E #C_n` for `n = 1..=n_max` by `E #C_n = a_n Σ_{l<n} E #C_l + L b_n`.
pub fn expected_coauthors_recursion(
    params: &LinearParams,
    authors: usize,
    n_max: usize,
) -> Result<Vec<f64>> {
    linear_prefix(params, n_max)?;
    let l = authors as f64;
    let mut prefix = 0.0;
    Ok((1..=n_max)
        .map(|n| {
            let e = params.a(n) * prefix + l * params.b(n);
            prefix += e;
            e
        })
        .collect())
}

/// `E #C_n` in closed form.
pub fn expected_coauthors_closed_form(params: &LinearParams, authors: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("event indices start at 1"));
    }
    linear_prefix(params, n)?;
    let l = authors as f64;
    if n == 1 {
        return Ok(l * params.b(1));
    }
    let a_n = params.a(n);
    let mut total = params.b(n) + a_n * params.b(n - 1);
    // prod = Π_{l=j+1}^{n-1} (1 + a_l)
    let mut prod = 1.0;
    for j in (1..=n.saturating_sub(2)).rev() {
        prod *= 1.0 + params.a(j + 1);
        total += params.b(j) * a_n * prod;
    }
    Ok(l * total)
}

/// `w_n = E[1{E_n ∈ [s, t]} / N[s, t]]` for `n = 1, 2, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowWeights {
    /// `weights[n - 1] = w_n`.
    pub weights: Vec<f64>,
    /// `Λ(t) - Λ(s)`.
    pub mass: f64,
    /// Poisson mass dropped by the truncation.
    pub tail: f64,
}

impl WindowWeights {
    pub fn weight(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.weights.get(n - 1).copied().unwrap_or(0.0)
    }

    /// `P(N[s, t] > 0)`.
    pub fn nonempty_prob(&self) -> f64 {
        -(-self.mass).exp_m1()
    }
}

fn window_poissons(
    f: &IntensityFunction,
    s: f64,
    t: f64,
    eps: f64,
) -> Result<(TruncatedPoisson, TruncatedPoisson, f64)> {
    check_epsilon(eps)?;
    if t < s {
        return Err(Error::domain(format!("window [{s}, {t}] is reversed")));
    }
    let before = f.cumulative(s)?;
    let mass = f.integrate(s, t)?;
    Ok((
        TruncatedPoisson::new(before, eps / 2.0)?,
        TruncatedPoisson::new(mass, eps / 2.0)?,
        mass,
    ))
}

pub fn poisson_window_weights(f: &IntensityFunction, s: f64, t: f64, eps: f64) -> Result<WindowWeights> {
    let (u, v, mass) = window_poissons(f, s, t, eps)?;
    let kv = v.max_index();
    // inv_tail[j] = E[1{V ≥ j} / V] for j ≥ 1
    let mut inv_tail = vec![0.0; kv + 2];
    for j in (1..=kv).rev() {
        inv_tail[j] = inv_tail[j + 1] + v.prob(j) / j as f64;
    }
    let n_max = if kv == 0 { 0 } else { u.max_index() + kv };
    let weights = (1..=n_max)
        .map(|n| {
            let lo = n.saturating_sub(kv);
            (lo..n.min(u.max_index() + 1))
                .map(|k| u.prob(k) * inv_tail[n - k])
                .sum()
        })
        .collect();
    Ok(WindowWeights {
        weights,
        mass,
        tail: u.tail() + v.tail(),
    })
}

pub fn poisson_window_weight(f: &IntensityFunction, s: f64, t: f64, n: usize, eps: f64) -> Result<f64> {
    Ok(poisson_window_weights(f, s, t, eps)?.weight(n))
}

/// `E I_φ[s, t]` with the index read as 0 on empty windows, and the same
/// expectation conditional on `N[s, t] > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexExpectation {
    pub unconditional: f64,
    /// `None` when the window has zero mass.
    pub given_nonempty: Option<f64>,
    pub tail: f64,
}

/// `E φ(#C_n + 1)` for `n = 1..=n_max` and each `φ`.
fn phi_means(law: &CoauthorshipLaw, phis: &[Phi], n_max: usize) -> Result<Vec<Vec<f64>>> {
    let sizes = coauthor_size_laws(law, n_max, false)?;
    Ok(phis
        .iter()
        .map(|phi| sizes.iter().map(|s| s.expected_phi(phi)).collect())
        .collect())
}

fn combine(weights: &WindowWeights, means: &[f64]) -> IndexExpectation {
    let unconditional: f64 = weights.weights.iter().zip(means).map(|(w, m)| w * m).sum();
    let p = weights.nonempty_prob();
    IndexExpectation {
        unconditional,
        given_nonempty: (p > 0.0).then(|| unconditional / p),
        tail: weights.tail,
    }
}

pub fn expected_index(
    f: &IntensityFunction,
    law: &CoauthorshipLaw,
    phi: &Phi,
    s: f64,
    t: f64,
    eps: f64,
) -> Result<IndexExpectation> {
    let weights = poisson_window_weights(f, s, t, eps)?;
    let means = phi_means(law, std::slice::from_ref(phi), weights.weights.len())?;
    Ok(combine(&weights, &means[0]))
}

/// [`expected_index`] over many windows and weight functions, sharing the
/// size laws. Result is indexed `[window][phi]`.
pub fn expected_index_table(
    f: &IntensityFunction,
    law: &CoauthorshipLaw,
    phis: &[Phi],
    windows: &[(f64, f64)],
    eps: f64,
) -> Result<Vec<Vec<IndexExpectation>>> {
    let weights = windows
        .iter()
        .map(|&(s, t)| poisson_window_weights(f, s, t, eps))
        .collect::<Result<Vec<_>>>()?;
    let n_max = weights.iter().map(|w| w.weights.len()).max().unwrap_or(0);
    let means = phi_means(law, phis, n_max)?;
    Ok(weights
        .iter()
        .map(|w| means.iter().map(|m| combine(w, m)).collect())
        .collect())
}

/// `lim_{h↓0} E I_φ[t, t+h] / h = λ(t) Σ_k φ(k + 1) H_t(k)`.
pub fn index_rate_limit(
    f: &IntensityFunction,
    law: &CoauthorshipLaw,
    phi: &Phi,
    t: f64,
    eps: f64,
) -> Result<f64> {
    let lim = ht(law, f, t, eps)?;
    Ok(lim.rate * expected_phi(&lim.h, phi))
}

/// `E X_{k+1}[s, t]`, the expected number of papers with `k` co-authors in
/// the closed window.
pub fn expected_window_count(
    f: &IntensityFunction,
    law: &CoauthorshipLaw,
    s: f64,
    t: f64,
    k: usize,
    eps: f64,
) -> Result<f64> {
    let (u, v, _) = window_poissons(f, s, t, eps)?;
    let kv = v.max_index();
    if kv == 0 {
        return Ok(0.0);
    }
    // survival[j] = P(V ≥ j)
    let mut survival = vec![0.0; kv + 2];
    for j in (0..=kv).rev() {
        survival[j] = survival[j + 1] + v.prob(j);
    }
    let n_max = u.max_index() + kv;
    let sizes = coauthor_size_laws(law, n_max, false)?;
    Ok(sizes
        .iter()
        .map(|size| {
            let n = size.n;
            let inside: f64 = (n.saturating_sub(kv)..n.min(u.max_index() + 1))
                .map(|j| u.prob(j) * survival[n - j])
                .sum();
            inside * size.pmf.get(k).copied().unwrap_or(0.0)
        })
        .sum())
}

/// Bounds on the remainders of the small-window expansions, as functions of
/// the window mass `m < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixBounds {
    /// First moment of `X_{k+1}`.
    pub r1: f64,
    /// Second moment of `X_{k+1}`.
    pub r2: f64,
    /// Cross moment of `X_{k+1}`, `X_{k'+1}`.
    pub r3: f64,
    /// `E I_φ`, in units of `φ(L + 1)`.
    pub r4: f64,
}

pub fn appendix_bounds(mass: f64) -> Result<AppendixBounds> {
    if !(0.0..1.0).contains(&mass) {
        return Err(Error::domain(format!("window mass must lie in [0, 1), got {mass}")));
    }
    let m = mass;
    let inv = 1.0 / (1.0 - m);
    let one = 1.0 + inv;
    let two = 1.0 + inv + inv * inv;
    Ok(AppendixBounds {
        r1: m * m * one,
        r2: m * one + 2.0 * m * m * two,
        r3: 2.0 * m * m * m * two,
        r4: m * m * one,
    })
}
