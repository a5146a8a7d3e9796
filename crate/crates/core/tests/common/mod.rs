#![allow(dead_code)]

use std::collections::HashMap;

use mfcollab::collab_model::CoauthorshipLaw;
use rand::Rng;

/// Co-author set sizes of one ego, drawn author by author without the
/// library's simulator.
pub fn simulate_sizes<R: Rng>(law: &CoauthorshipLaw, events: usize, rng: &mut R) -> Vec<usize> {
    let mut counts = vec![0usize; law.authors()];
    let mut sizes = Vec::with_capacity(events);
    for n in 1..=events {
        let mut size = 0;
        for m in counts.iter_mut() {
            if rng.random_bool(law.prob(n, *m)) {
                *m += 1;
                size += 1;
            }
        }
        sizes.push(size);
    }
    sizes
}

/// Joint-paper count of a single author after `events` events.
pub fn simulate_one_author<R: Rng>(law: &CoauthorshipLaw, events: usize, rng: &mut R) -> usize {
    let mut m = 0;
    for n in 1..=events {
        if rng.random_bool(law.prob(n, m)) {
            m += 1;
        }
    }
    m
}

pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Law of `(#C_n, #C_{n+1})` by summing over every inclusion pattern of
/// every author over the first `n + 1` events.
pub fn brute_force_joint(law: &CoauthorshipLaw, n: usize) -> Vec<Vec<f64>> {
    let l = law.authors();
    let events = n + 1;
    let bits = l * events;
    let mut joint = vec![vec![0.0; l + 1]; l + 1];
    for pattern in 0u64..(1u64 << bits) {
        let mut prob = 1.0;
        let mut sizes = vec![0usize; events];
        for author in 0..l {
            let mut m = 0;
            for e in 0..events {
                let included = pattern >> (author * events + e) & 1 == 1;
                let f = law.prob(e + 1, m);
                prob *= if included { f } else { 1.0 - f };
                if included {
                    m += 1;
                    sizes[e] += 1;
                }
            }
        }
        joint[sizes[n - 1]][sizes[n]] += prob;
    }
    joint
}

/// Per-author law of (in `C_a`, in `C_b`) for `a < b`, by forward
/// propagation of the pair (joint-paper count, inclusion at `a`).
pub fn pair_inclusion(law: &CoauthorshipLaw, a: usize, b: usize) -> [f64; 4] {
    assert!(a < b);
    // state: (m, included at a) → probability
    let mut state: HashMap<(usize, bool), f64> = HashMap::from([((0, false), 1.0)]);
    let mut out = [0.0; 4];
    for e in 1..=b {
        let mut next: HashMap<(usize, bool), f64> = HashMap::new();
        for (&(m, flag), &p) in &state {
            let f = law.prob(e, m);
            if e == b {
                // [both, a only, b only, neither]
                let idx_in = if flag { 0 } else { 2 };
                let idx_out = if flag { 1 } else { 3 };
                out[idx_in] += p * f;
                out[idx_out] += p * (1.0 - f);
                continue;
            }
            let in_flag = if e == a { true } else { flag };
            *next.entry((m + 1, in_flag)).or_default() += p * f;
            *next.entry((m, flag)).or_default() += p * (1.0 - f);
        }
        state = next;
    }
    out
}

/// Joint law of the two set sizes from i.i.d. per-author four-outcome
/// probabilities, by multinomial enumeration.
pub fn multinomial_joint(authors: usize, pi: [f64; 4]) -> Vec<Vec<f64>> {
    let mut joint = vec![vec![0.0; authors + 1]; authors + 1];
    let fact = |n: usize| -> f64 { (1..=n).map(|v| v as f64).product() };
    for n11 in 0..=authors {
        for n10 in 0..=authors - n11 {
            for n01 in 0..=authors - n11 - n10 {
                let n00 = authors - n11 - n10 - n01;
                let coef = fact(authors) / (fact(n11) * fact(n10) * fact(n01) * fact(n00));
                let p = coef
                    * pi[0].powi(n11 as i32)
                    * pi[1].powi(n10 as i32)
                    * pi[2].powi(n01 as i32)
                    * pi[3].powi(n00 as i32);
                joint[n11 + n10][n11 + n01] += p;
            }
        }
    }
    joint
}

/// `P(Poisson(mean) = k)` for `k = 0..len`.
pub fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut p = (-mean).exp();
    for k in 0..len {
        out.push(p);
        p *= mean / (k + 1) as f64;
    }
    out
}
