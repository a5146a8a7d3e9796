//! Conditional maximum-likelihood estimators of `F_n(k)` and of the linear
//! coefficients `(a_n, b_n)`, with asymptotic confidence intervals.
//!
//! All standard errors are on the `√L` scale: the interval half-width is
//! `z_{q/2} · se / √L`.

use std::io::Write;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::closed_form::per_author_pmf;
use crate::collab_model::{CoauthorshipLaw, SimulationRun};
use crate::error::{Error, Result};

pub const DEFAULT_LEVEL: f64 = 0.05;

/// Data of one event: the counts `m_{n-1,i}` before it and the indicators
/// `1{i ∈ C_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSnapshot {
    pub n: usize,
    pub prev_counts: Vec<u32>,
    pub inclusions: Vec<bool>,
}

impl EventSnapshot {
    pub fn new(n: usize, prev_counts: Vec<u32>, inclusions: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("event indices start at 1"));
        }
        if prev_counts.len() != inclusions.len() {
            return Err(Error::validation("counts and inclusions differ in length"));
        }
        if let Some(&m) = prev_counts.iter().find(|&&m| m as usize >= n) {
            return Err(Error::validation(format!(
                "count {m} impossible before event {n}"
            )));
        }
        Ok(Self {
            n,
            prev_counts,
            inclusions,
        })
    }

    pub fn authors(&self) -> usize {
        self.prev_counts.len()
    }

    /// Snapshot of event `n` (1-based) of a run.
    pub fn from_run(run: &SimulationRun, n: usize) -> Result<Self> {
        if n == 0 || n > run.len() {
            return Err(Error::domain(format!(
                "run has {} events, snapshot {n} requested",
                run.len()
            )));
        }
        let before = run.history_at(n - 1);
        Ok(Self::from_parts(n, before.counts(), run.set(n)))
    }

    fn from_parts(n: usize, counts: &[u32], set: &[u32]) -> Self {
        let mut inclusions = vec![false; counts.len()];
        for &i in set {
            inclusions[i as usize] = true;
        }
        Self {
            n,
            prev_counts: counts.to_vec(),
            inclusions,
        }
    }
}

/// Snapshots of every event of a run, in order.
pub fn snapshots(run: &SimulationRun) -> Vec<EventSnapshot> {
    let mut counts = vec![0u32; run.authors()];
    let mut out = Vec::with_capacity(run.len());
    for (idx, set) in run.coauthor_sets().iter().enumerate() {
        out.push(EventSnapshot::from_parts(idx + 1, &counts, set));
        for &i in set {
            counts[i as usize] += 1;
        }
    }
    out
}

/// A point estimate with its asymptotic interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub value: f64,
    /// Plug-in asymptotic standard deviation of `√L (estimate − truth)`;
    /// `None` when it cannot be formed.
    pub se: Option<f64>,
    pub interval: Option<(f64, f64)>,
    /// The interval has level `1 − q`.
    pub level: f64,
    /// Size of the sample behind the estimate.
    pub support_count: u64,
    /// `L`, the scale of the interval.
    pub authors: u64,
}

impl EstimateWithCI {
    fn build(value: f64, se: Option<f64>, level: f64, support_count: u64, authors: u64) -> Self {
        let interval = se.filter(|_| authors > 0).map(|s| {
            let half = z_quantile(level) * s / (authors as f64).sqrt();
            (value - half, value + half)
        });
        Self {
            value,
            se,
            interval,
            level,
            support_count,
            authors,
        }
    }

    pub fn covers(&self, truth: f64) -> bool {
        self.interval
            .is_some_and(|(lo, hi)| lo <= truth && truth <= hi)
    }
}

/// `z_{q/2}`, the `1 − q/2` standard normal quantile.
pub fn z_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - q / 2.0)
}

fn check_level(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("level q must lie in (0, 1), got {q}")))
    }
}

/// `F̂ = successes / support` with the plug-in variance
/// `F̂(1 − F̂) / (support / L)`; `0` with no standard error when
/// `support = 0`.
pub fn estimate_f_from_counts(successes: u64, support: u64, authors: u64, q: f64) -> Result<EstimateWithCI> {
    check_level(q)?;
    if successes > support || support > authors {
        return Err(Error::validation(format!(
            "need successes ≤ support ≤ authors, got {successes}, {support}, {authors}"
        )));
    }
    if support == 0 {
        return Ok(EstimateWithCI::build(0.0, None, q, 0, authors));
    }
    let f = successes as f64 / support as f64;
    let share = support as f64 / authors as f64;
    let se = (f * (1.0 - f) / share).sqrt();
    Ok(EstimateWithCI::build(f, Some(se), q, support, authors))
}

pub fn estimate_f_nonparam(snap: &EventSnapshot, k: usize, q: f64) -> Result<EstimateWithCI> {
    let mut support = 0u64;
    let mut successes = 0u64;
    for (&m, &x) in snap.prev_counts.iter().zip(&snap.inclusions) {
        if m as usize == k {
            support += 1;
            successes += u64::from(x);
        }
    }
    estimate_f_from_counts(successes, support, snap.authors() as u64, q)
}

/// `F̂_n(k)` at every event of a run.
pub fn estimate_f_series(run: &SimulationRun, k: usize, q: f64) -> Result<Vec<EstimateWithCI>> {
    if run.is_empty() {
        return Err(Error::Usage("run has no events".into()));
    }
    snapshots(run)
        .iter()
        .map(|s| estimate_f_nonparam(s, k, q))
        .collect()
}

/// Writes `(n, k, value, se, lo, hi, support_count)` rows; unavailable
/// fields are left empty.
pub fn write_estimate_series<W: Write>(out: W, k: usize, series: &[EstimateWithCI]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "k", "value", "se", "lo", "hi", "support_count"])?;
    for (idx, e) in series.iter().enumerate() {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            (idx + 1).to_string(),
            k.to_string(),
            e.value.to_string(),
            opt(e.se),
            opt(e.interval.map(|i| i.0)),
            opt(e.interval.map(|i| i.1)),
            e.support_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Moments of `Z = (X, Y, Y², XY)` with `X = 1{i ∈ C_n}`, `Y = m_{n-1,i}`,
/// and the delta-method variances of the least-squares slope and
/// intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMethodContext {
    /// `s[γ][λ] = E(X^γ Y^λ)`, `γ ∈ 0..=2`, `λ ∈ 0..=4`.
    pub s: [[f64; 5]; 3],
    /// Mean of `Z`.
    pub z_mean: [f64; 4],
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x2: f64,
    pub sigma_y2: f64,
    pub rho: f64,
    /// `Cov(Z)`.
    pub sigma: [[f64; 4]; 4],
    pub beta: f64,
    pub alpha: f64,
}

fn cov_from_moments(s: &[[f64; 5]; 3]) -> [[f64; 4]; 4] {
    // E of products of the components of Z, with X² = X.
    let e = |i: usize, j: usize| -> f64 {
        let pow = |c: usize| -> (usize, usize) {
            match c {
                0 => (1, 0),
                1 => (0, 1),
                2 => (0, 2),
                _ => (1, 1),
            }
        };
        let (gi, li) = pow(i);
        let (gj, lj) = pow(j);
        s[(gi + gj).min(2)][li + lj]
    };
    let mean = [s[1][0], s[0][1], s[0][2], s[1][1]];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = e(i, j) - mean[i] * mean[j];
        }
    }
    out
}

impl DeltaMethodContext {
    fn from_moments(s: [[f64; 5]; 3]) -> Result<Self> {
        let sigma = cov_from_moments(&s);
        let sigma_x2 = sigma[0][0];
        let sigma_y2 = sigma[1][1];
        if !(sigma_y2 > 0.0) {
            return Err(Error::domain("counts have zero variance"));
        }
        let beta = sigma[0][1] / sigma_y2;
        let mu_x = s[1][0];
        let mu_y = s[0][1];
        let rho = if sigma_x2 > 0.0 {
            sigma[0][1] / (sigma_x2 * sigma_y2).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            s,
            z_mean: [mu_x, mu_y, s[0][2], s[1][1]],
            mu_x,
            mu_y,
            sigma_x2,
            sigma_y2,
            rho,
            sigma,
            beta,
            alpha: mu_x - beta * mu_y,
        })
    }

    /// Exact moments under `law` at event `n ≥ 2`.
    pub fn population(law: &CoauthorshipLaw, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("counts are constant before event 2"));
        }
        law.check_events(n)?;
        let p = per_author_pmf(law, n - 1)?.pmf;
        let mut s = [[0.0; 5]; 3];
        for (k, &pk) in p.iter().enumerate() {
            let f = law.prob(n, k);
            let mut kp = 1.0;
            for lam in 0..5 {
                s[0][lam] += kp * pk;
                s[1][lam] += kp * f * pk;
                kp *= k as f64;
            }
        }
        s[2] = s[1];
        Self::from_moments(s)
    }

    /// Empirical moments of a snapshot.
    pub fn from_sample(snap: &EventSnapshot) -> Result<Self> {
        let l = snap.authors();
        if l == 0 {
            return Err(Error::domain("empty snapshot"));
        }
        let mut s = [[0.0; 5]; 3];
        for (&m, &x) in snap.prev_counts.iter().zip(&snap.inclusions) {
            let y = m as f64;
            let xv = if x { 1.0 } else { 0.0 };
            let mut yp = 1.0;
            for lam in 0..5 {
                s[0][lam] += yp;
                s[1][lam] += xv * yp;
                yp *= y;
            }
        }
        for row in s.iter_mut().take(2) {
            for v in row.iter_mut() {
                *v /= l as f64;
            }
        }
        s[2] = s[1];
        let mut ctx = Self::from_moments(s)?;
        // Centred sums for the covariance to avoid cancellation.
        let zs: Vec<[f64; 4]> = snap
            .prev_counts
            .iter()
            .zip(&snap.inclusions)
            .map(|(&m, &x)| {
                let y = m as f64;
                let xv = if x { 1.0 } else { 0.0 };
                [xv, y, y * y, xv * y]
            })
            .collect();
        let mean = zs.iter().fold([0.0; 4], |mut acc, z| {
            for c in 0..4 {
                acc[c] += z[c] / l as f64;
            }
            acc
        });
        let mut sigma = [[0.0; 4]; 4];
        for z in &zs {
            for i in 0..4 {
                for j in 0..4 {
                    sigma[i][j] += (z[i] - mean[i]) * (z[j] - mean[j]) / l as f64;
                }
            }
        }
        if !(sigma[1][1] > 0.0) {
            return Err(Error::domain("counts have zero variance"));
        }
        ctx.z_mean = mean;
        ctx.mu_x = mean[0];
        ctx.mu_y = mean[1];
        ctx.sigma = sigma;
        ctx.sigma_x2 = sigma[0][0];
        ctx.sigma_y2 = sigma[1][1];
        ctx.beta = sigma[0][1] / sigma[1][1];
        ctx.alpha = ctx.mu_x - ctx.beta * ctx.mu_y;
        ctx.rho = if ctx.sigma_x2 > 0.0 {
            sigma[0][1] / (ctx.sigma_x2 * ctx.sigma_y2).sqrt()
        } else {
            0.0
        };
        Ok(ctx)
    }

    /// Gradient of `g₁(z) = (z₄ − z₁z₂)/(z₃ − z₂²)` at the mean of `Z`.
    pub fn grad_g1(&self) -> [f64; 4] {
        let d = self.sigma_y2;
        [
            -self.mu_y / d,
            (2.0 * self.beta * self.mu_y - self.mu_x) / d,
            -self.beta / d,
            1.0 / d,
        ]
    }

    /// Gradient of `g₂(z) = z₁ − z₂ g₁(z)` at the mean of `Z`.
    pub fn grad_g2(&self) -> [f64; 4] {
        let d = self.sigma_y2;
        let (b, mx, my) = (self.beta, self.mu_x, self.mu_y);
        [
            1.0 + my * my / d,
            -(b * d + 2.0 * b * my * my - mx * my) / d,
            b * my / d,
            -my / d,
        ]
    }

    fn quadratic(&self, g: [f64; 4]) -> f64 {
        let mut total = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                total += g[i] * self.sigma[i][j] * g[j];
            }
        }
        total
    }

    /// `σ_a² = ∇g₁ᵀ Σ ∇g₁`.
    pub fn sigma_a2(&self) -> f64 {
        self.quadratic(self.grad_g1())
    }

    /// `σ_b² = ∇g₂ᵀ Σ ∇g₂`.
    pub fn sigma_b2(&self) -> f64 {
        self.quadratic(self.grad_g2())
    }

    /// `σ_a²` written out term by term.
    pub fn sigma_a2_expanded(&self) -> f64 {
        let s = &self.sigma;
        let (b, my) = (self.beta, self.mu_y);
        let c = 2.0 * b * my - self.mu_x;
        let d2 = self.sigma_y2 * self.sigma_y2;
        (my * my * s[0][0] + c * c * s[1][1] + b * b * s[2][2] + s[3][3]
            - 2.0 * my * c * s[0][1]
            + 2.0 * my * b * s[0][2]
            - 2.0 * my * s[0][3]
            - 2.0 * c * b * s[1][2]
            + 2.0 * c * s[1][3]
            - 2.0 * b * s[2][3])
            / d2
    }

    /// `σ_b²` written out term by term.
    pub fn sigma_b2_expanded(&self) -> f64 {
        let s = &self.sigma;
        let (b, mx, my, d) = (self.beta, self.mu_x, self.mu_y, self.sigma_y2);
        let u = 1.0 + my * my / d;
        let c = (b * d + 2.0 * b * my * my - mx * my) / d;
        u * u * s[0][0] - 2.0 * u * c * s[0][1] + 2.0 * u * b * my * s[0][2] / d
            - 2.0 * u * my * s[0][3] / d
            + c * c * s[1][1]
            - 2.0 * c * b * my * s[1][2] / d
            + 2.0 * c * my * s[1][3] / d
            + b * b * my * my * s[2][2] / (d * d)
            - 2.0 * b * my * my * s[2][3] / (d * d)
            + my * my * s[3][3] / (d * d)
    }
}

/// `(â_n, b̂_n)`, the least-squares fit of inclusions on prior counts.
pub fn estimate_linear(snap: &EventSnapshot, q: f64) -> Result<(EstimateWithCI, EstimateWithCI)> {
    check_level(q)?;
    let l = snap.authors() as u64;
    if l == 0 {
        return Err(Error::domain("empty snapshot"));
    }
    match DeltaMethodContext::from_sample(snap) {
        Ok(ctx) => {
            let se = |v: f64| Some(v.max(0.0).sqrt());
            Ok((
                EstimateWithCI::build(ctx.beta, se(ctx.sigma_a2()), q, l, l),
                EstimateWithCI::build(ctx.alpha, se(ctx.sigma_b2()), q, l, l),
            ))
        }
        Err(_) => {
            // Constant counts: no slope information, the intercept is the
            // inclusion frequency.
            let successes = snap.inclusions.iter().filter(|&&x| x).count() as u64;
            let b = estimate_f_from_counts(successes, l, l, q)?;
            Ok((EstimateWithCI::build(0.0, None, q, l, l), b))
        }
    }
}

/// `σ₀²` in `√n (X̄/Ȳ − μ_x/μ_y) → N(0, σ₀²)`.
pub fn ratio_asymptotics(mu_x: f64, mu_y: f64, sigma_x2: f64, sigma_y2: f64, rho: f64) -> Result<f64> {
    if mu_y == 0.0 {
        return Err(Error::domain("ratio limit needs μ_y ≠ 0"));
    }
    if sigma_x2 < 0.0 || sigma_y2 < 0.0 {
        return Err(Error::domain("variances must be non-negative"));
    }
    let (sx, sy) = (sigma_x2.sqrt(), sigma_y2.sqrt());
    Ok((mu_y * mu_y * sigma_x2 + mu_x * mu_x * sigma_y2 - 2.0 * rho * mu_x * mu_y * sx * sy)
        / mu_y.powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collab_model::{LinearParams, Table};

    fn snap(counts: &[u32], inc: &[u8]) -> EventSnapshot {
        EventSnapshot::new(3, counts.to_vec(), inc.iter().map(|&x| x == 1).collect()).unwrap()
    }

    #[test]
    fn nonparam_examples() {
        let s = snap(&[0, 0, 1, 1], &[1, 0, 1, 0]);
        let e = estimate_f_nonparam(&s, 0, 0.05).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.support_count, 2);
        // σ̂² = 0.25 / 0.5
        assert!((e.se.unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let (lo, hi) = e.interval.unwrap();
        let half = z_quantile(0.05) * e.se.unwrap() / 2.0;
        assert!((hi - lo - 2.0 * half).abs() < 1e-15);

        let full = estimate_f_nonparam(&snap(&[0, 1, 1], &[0, 1, 1]), 1, 0.05).unwrap();
        assert_eq!((full.value, full.se), (1.0, Some(0.0)));

        let none = estimate_f_nonparam(&s, 2, 0.05).unwrap();
        assert_eq!((none.value, none.se, none.interval), (0.0, None, None));
    }

    #[test]
    fn linear_examples() {
        let (a, b) = estimate_linear(&snap(&[0, 0, 1, 1], &[1, 0, 1, 0]), 0.05).unwrap();
        assert_eq!((a.value, b.value), (0.0, 0.5));

        let (a, b) = estimate_linear(&snap(&[0, 1, 2, 1], &[1, 1, 1, 1]), 0.05).unwrap();
        assert_eq!((a.value, b.value), (0.0, 1.0));

        let (a, b) = estimate_linear(&snap(&[1, 1, 1], &[1, 0, 0]), 0.05).unwrap();
        assert_eq!(a.value, 0.0);
        assert!(a.se.is_none());
        assert!((b.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn linear_matches_least_squares() {
        let counts = [0u32, 1, 2, 2, 0, 1, 1, 2];
        let inc = [0u8, 1, 1, 0, 0, 0, 1, 1];
        let (a, b) = estimate_linear(&snap(&counts, &inc), 0.05).unwrap();
        let n = counts.len() as f64;
        let xm = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
        let ym = inc.iter().map(|&c| c as f64).sum::<f64>() / n;
        let sxy: f64 = counts.iter().zip(&inc).map(|(&c, &i)| (c as f64 - xm) * (i as f64 - ym)).sum();
        let sxx: f64 = counts.iter().map(|&c| (c as f64 - xm).powi(2)).sum();
        assert!((a.value - sxy / sxx).abs() < 1e-14);
        assert!((b.value - (ym - sxy / sxx * xm)).abs() < 1e-14);
    }

    #[test]
    fn expanded_variances_agree() {
        let params = LinearParams::new(vec![0.0, 0.2, 0.15, 0.1], vec![0.1, 0.3, 0.2, 0.25]).unwrap();
        let law = CoauthorshipLaw::linear(params, 50).unwrap();
        for n in 2..=4 {
            let ctx = DeltaMethodContext::population(&law, n).unwrap();
            assert!((ctx.beta - law.prob(n, 1) + law.prob(n, 0)).abs() < 1e-12);
            assert!((ctx.alpha - law.prob(n, 0)).abs() < 1e-12);
            assert!((ctx.sigma_a2() - ctx.sigma_a2_expanded()).abs() < 1e-10 * ctx.sigma_a2());
            assert!((ctx.sigma_b2() - ctx.sigma_b2_expanded()).abs() < 1e-10 * ctx.sigma_b2());
        }
        let flat = CoauthorshipLaw::tabulated(Table::AffineInCount { slope: 0.0, intercept: 0.3 }, 5).unwrap();
        assert!(DeltaMethodContext::population(&flat, 1).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_asymptotics(0.3, 0.5, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(ratio_asymptotics(1.0, 0.0, 1.0, 1.0, 0.0).is_err());
        // X = 1{Y = 1} · Bernoulli(F), Y ~ Bernoulli(p)
        let (f, p): (f64, f64) = (0.3, 0.4);
        let (mx, my) = (f * p, p);
        let (vx, vy) = (mx * (1.0 - mx), p * (1.0 - p));
        let rho = (mx - mx * my) / (vx * vy).sqrt();
        let s0 = ratio_asymptotics(mx, my, vx, vy, rho).unwrap();
        assert!((s0 - f * (1.0 - f) / p).abs() < 1e-14);
    }

    #[test]
    fn series_and_csv() {
        let law = CoauthorshipLaw::constant(0.5, 3).unwrap();
        let run = SimulationRun::from_sets(law, vec![vec![0], vec![0, 1], vec![], vec![2], vec![0]]).unwrap();
        let series = estimate_f_series(&run, 1, 0.05).unwrap();
        assert_eq!(series.len(), 5);
        assert!(series[0].se.is_none());
        // event 2: only author 0 has one joint paper, and joins
        assert_eq!(series[1].value, 1.0);
        assert_eq!(snapshots(&run)[3], EventSnapshot::from_run(&run, 4).unwrap());

        let mut buf = Vec::new();
        write_estimate_series(&mut buf, 1, &series[..1]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,k,value,se,lo,hi,support_count\n1,1,0,,,,0\n"
        );
    }
}
