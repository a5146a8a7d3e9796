//! The paper-writing process: a Poisson process with deterministic,
//! piecewise-defined intensity `λ(t)` (papers per month).
//!
//! Sampling is exact. Constant segments use inversion (exponential gaps,
//! restarted at each segment boundary by memorylessness); linear segments use
//! thinning against the segment supremum. The intensity estimator is the
//! fixed-bandwidth kernel smoother `λ̂(t) = h⁻¹ Σ K((E_n − t)/h)`. No
//! boundary correction is applied, so estimates within one bandwidth of `0`
//! or of the horizon are biased downwards.

use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateForm {
    Constant(f64),
    /// `min(slope * t + intercept, cap)`.
    Linear {
        slope: f64,
        intercept: f64,
        cap: Option<f64>,
    },
}

impl RateForm {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            RateForm::Constant(r) => r,
            RateForm::Linear {
                slope,
                intercept,
                cap,
            } => {
                let v = slope * t + intercept;
                cap.map_or(v, |c| v.min(c))
            }
        }
    }

    /// Exact integral over `[a, b]`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match *self {
            RateForm::Constant(r) => r * (b - a),
            RateForm::Linear {
                slope,
                intercept,
                cap,
            } => {
                let affine = |x: f64, y: f64| 0.5 * slope * (y - x) * (y + x) + intercept * (y - x);
                match cap {
                    None => affine(a, b),
                    Some(c) if slope == 0.0 => intercept.min(c) * (b - a),
                    Some(c) => {
                        let cross = ((c - intercept) / slope).clamp(a, b);
                        if slope > 0.0 {
                            affine(a, cross) + c * (b - cross)
                        } else {
                            c * (cross - a) + affine(cross, b)
                        }
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    /// May be `f64::INFINITY` for the last segment.
    pub end: f64,
    pub form: RateForm,
}

/// Piecewise intensity on `[0, end of last segment)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityFunction {
    segments: Vec<Segment>,
}

impl IntensityFunction {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::validation("intensity needs at least one segment"))?;
        if first.start != 0.0 {
            return Err(Error::validation("first intensity segment must start at 0"));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.end > seg.start) || seg.start.is_nan() {
                return Err(Error::validation(format!(
                    "segment {i} has empty or invalid range [{}, {})",
                    seg.start, seg.end
                )));
            }
            if seg.end.is_infinite() && i + 1 != segments.len() {
                return Err(Error::validation("only the last segment may be unbounded"));
            }
            if i > 0 && segments[i - 1].end != seg.start {
                return Err(Error::validation(format!(
                    "segment {i} starts at {} but the previous one ends at {}",
                    seg.start,
                    segments[i - 1].end
                )));
            }
            check_nonnegative(seg).map_err(|m| Error::validation(format!("segment {i}: {m}")))?;
        }
        Ok(Self { segments })
    }

    /// `λ(t) = rate` on `[0, ∞)`.
    pub fn constant(rate: f64) -> Result<Self> {
        Self::new(vec![Segment {
            start: 0.0,
            end: f64::INFINITY,
            form: RateForm::Constant(rate),
        }])
    }

    /// Piecewise-constant intensity with `rates.len() == breaks.len() + 1`;
    /// the last rate extends to infinity.
    pub fn piecewise_constant(breaks: &[f64], rates: &[f64]) -> Result<Self> {
        if rates.len() != breaks.len() + 1 {
            return Err(Error::validation(
                "need exactly one more rate than breakpoints",
            ));
        }
        let mut edges = Vec::with_capacity(rates.len() + 1);
        edges.push(0.0);
        edges.extend_from_slice(breaks);
        edges.push(f64::INFINITY);
        Self::new(
            rates
                .iter()
                .enumerate()
                .map(|(i, &r)| Segment {
                    start: edges[i],
                    end: edges[i + 1],
                    form: RateForm::Constant(r),
                })
                .collect(),
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn domain_end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end)
    }

    /// Right-continuous value of `λ` at `t`.
    pub fn rate(&self, t: f64) -> f64 {
        let idx = self.segments.partition_point(|s| s.end <= t);
        self.segments
            .get(idx)
            .or(self.segments.last())
            .map_or(0.0, |s| s.form.value(t))
    }

    /// `∫_s^t λ(u) du`, computed segment by segment.
    pub fn integrate(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0) || !(t >= s) || t > self.domain_end() {
            return Err(Error::domain(format!(
                "window [{s}, {t}] outside [0, {}]",
                self.domain_end()
            )));
        }
        Ok(self
            .segments
            .iter()
            .filter(|seg| seg.end > s && seg.start < t)
            .map(|seg| seg.form.integral(seg.start.max(s), seg.end.min(t)))
            .sum())
    }

    /// `Λ(t) = ∫_0^t λ(u) du`.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        self.integrate(0.0, t)
    }
}

fn check_nonnegative(seg: &Segment) -> std::result::Result<(), String> {
    match seg.form {
        RateForm::Constant(r) if !(r >= 0.0) || !r.is_finite() => {
            Err(format!("rate {r} must be finite and non-negative"))
        }
        RateForm::Constant(_) => Ok(()),
        RateForm::Linear {
            slope,
            intercept,
            cap,
        } => {
            if !slope.is_finite() || !intercept.is_finite() || cap.is_some_and(|c| !c.is_finite()) {
                return Err("linear coefficients must be finite".into());
            }
            let form = seg.form;
            if seg.end.is_infinite() {
                if slope < 0.0 {
                    return Err("unbounded segment with negative slope goes negative".into());
                }
                if form.value(seg.start) < 0.0 || cap.is_some_and(|c| c < 0.0) {
                    return Err("intensity must be non-negative".into());
                }
                return Ok(());
            }
            // min(affine, cap) is monotone, so checking the endpoints suffices.
            if form.value(seg.start) < 0.0 || form.value(seg.end) < 0.0 {
                Err("intensity must be non-negative".into())
            } else {
                Ok(())
            }
        }
    }
}

/// Ordered event times `E_1 < E_2 < …` observed on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTimeline {
    times: Vec<f64>,
    horizon: f64,
}

impl EventTimeline {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::validation(format!("invalid horizon {horizon}")));
        }
        if times.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
            return Err(Error::validation("event time outside [0, horizon]"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("event times must be strictly increasing"));
        }
        Ok(Self { times, horizon })
    }

    pub fn empty(horizon: f64) -> Self {
        Self {
            times: Vec::new(),
            horizon,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `N[s, t]`, closed on both ends.
    pub fn count(&self, s: f64, t: f64) -> usize {
        if t < s {
            return 0;
        }
        let lo = self.times.partition_point(|&x| x < s);
        let hi = self.times.partition_point(|&x| x <= t);
        hi - lo
    }

    pub(crate) fn truncated(&self, len: usize) -> Self {
        Self {
            times: self.times[..len.min(self.times.len())].to_vec(),
            horizon: self.horizon,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["event_time"])?;
        for t in &self.times {
            wtr.write_record([t.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, horizon: f64) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut times = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = rec.get(0).unwrap_or_default();
            let t = field
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::validation(format!("bad event time `{field}`: {e}")))?;
            times.push(t);
        }
        Self::new(times, horizon)
    }
}

/// One realization on `[0, horizon]`, reproducible from `seed`.
pub fn sample_event_times(f: &IntensityFunction, horizon: f64, seed: u64) -> Result<EventTimeline> {
    sample_event_times_with(f, horizon, &mut rng_from_seed(seed))
}

pub fn sample_event_times_with<R: Rng + ?Sized>(
    f: &IntensityFunction,
    horizon: f64,
    rng: &mut R,
) -> Result<EventTimeline> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::validation(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if horizon > f.domain_end() {
        return Err(Error::domain(format!(
            "horizon {horizon} beyond intensity domain {}",
            f.domain_end()
        )));
    }
    let mut times = Vec::new();
    for seg in f.segments() {
        if seg.start >= horizon {
            break;
        }
        let (a, b) = (seg.start, seg.end.min(horizon));
        let sup = match seg.form {
            RateForm::Constant(r) => r,
            form => form.value(a).max(form.value(b)),
        };
        if sup <= 0.0 {
            continue;
        }
        let gap = Exp::new(sup).map_err(|e| Error::validation(e.to_string()))?;
        let mut t = a;
        loop {
            t += gap.sample(rng);
            if t >= b {
                break;
            }
            let keep = match seg.form {
                RateForm::Constant(_) => true,
                form => rng.random::<f64>() * sup < form.value(t),
            };
            if keep && times.last().is_none_or(|&last| t > last) {
                times.push(t);
            }
        }
    }
    Ok(EventTimeline { times, horizon })
}

/// Symmetric kernels with support `[-1, 1]`, each integrating to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Box,
    Triangular,
    Epanechnikov,
}

impl Kernel {
    pub fn weight(self, u: f64) -> f64 {
        let a = u.abs();
        if a > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Box => 0.5,
            Kernel::Triangular => 1.0 - a,
            Kernel::Epanechnikov => 0.75 * (1.0 - u * u),
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "box" | "uniform" => Ok(Kernel::Box),
            "triangular" | "triangle" => Ok(Kernel::Triangular),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            other => Err(Error::Usage(format!(
                "unknown kernel `{other}` (expected box, triangular or epanechnikov)"
            ))),
        }
    }
}

/// Kernel estimate of `λ(t)`. With [`Kernel::Box`] this is exactly
/// `N[t − h, t + h] / (2h)`.
pub fn estimate_intensity_kernel(
    events: &EventTimeline,
    t: f64,
    bandwidth: f64,
    kernel: Kernel,
) -> Result<f64> {
    if !(bandwidth > 0.0) {
        return Err(Error::validation(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let (lo, hi) = (t - bandwidth, t + bandwidth);
    if kernel == Kernel::Box {
        return Ok(events.count(lo, hi) as f64 / (2.0 * bandwidth));
    }
    let times = events.times();
    let first = times.partition_point(|&x| x < lo);
    let last = times.partition_point(|&x| x <= hi);
    let total: f64 = times[first..last]
        .iter()
        .map(|&e| kernel.weight((e - t) / bandwidth))
        .sum();
    Ok(total / bandwidth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6() -> IntensityFunction {
        IntensityFunction::piecewise_constant(&[100.0, 200.0], &[1.0 / 6.0, 1.0 / 3.0, 0.5])
            .unwrap()
    }

    #[test]
    fn constant_mass() {
        let f = IntensityFunction::constant(0.5).unwrap();
        assert_eq!(f.integrate(0.0, 12.0).unwrap(), 6.0);
        assert_eq!(f.integrate(3.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn piecewise_window_mass() {
        let m = fig6().integrate(90.0, 110.0).unwrap();
        assert!((m - 5.0).abs() < 1e-12, "{m}");
    }

    #[test]
    fn capped_linear_integral() {
        // min(t/720, 1/2) on [200, 500]: linear up to 360, flat after.
        let f = IntensityFunction::new(vec![Segment {
            start: 0.0,
            end: f64::INFINITY,
            form: RateForm::Linear {
                slope: 1.0 / 720.0,
                intercept: 0.0,
                cap: Some(0.5),
            },
        }])
        .unwrap();
        let want = (360.0f64.powi(2) - 200.0f64.powi(2)) / 1440.0 + 0.5 * 140.0;
        assert!((f.integrate(200.0, 500.0).unwrap() - want).abs() < 1e-10);
        assert_eq!(f.rate(1000.0), 0.5);
    }

    #[test]
    fn out_of_domain_windows_are_rejected() {
        let f = IntensityFunction::new(vec![Segment {
            start: 0.0,
            end: 10.0,
            form: RateForm::Constant(1.0),
        }])
        .unwrap();
        assert!(matches!(f.integrate(0.0, 11.0), Err(Error::Domain(_))));
        assert!(matches!(f.integrate(5.0, 4.0), Err(Error::Domain(_))));
        assert!(matches!(f.integrate(-1.0, 4.0), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_segments_are_rejected() {
        let neg = IntensityFunction::new(vec![Segment {
            start: 0.0,
            end: 10.0,
            form: RateForm::Linear {
                slope: -1.0,
                intercept: 5.0,
                cap: None,
            },
        }]);
        assert!(neg.is_err());
        let gap = IntensityFunction::new(vec![
            Segment {
                start: 0.0,
                end: 1.0,
                form: RateForm::Constant(1.0),
            },
            Segment {
                start: 2.0,
                end: 3.0,
                form: RateForm::Constant(1.0),
            },
        ]);
        assert!(gap.is_err());
    }

    #[test]
    fn zero_rate_gives_empty_timeline() {
        let f = IntensityFunction::constant(0.0).unwrap();
        assert!(sample_event_times(&f, 100.0, 1).unwrap().is_empty());
    }

    #[test]
    fn sampling_is_deterministic_and_ordered() {
        let a = sample_event_times(&fig6(), 300.0, 42).unwrap();
        let b = sample_event_times(&fig6(), 300.0, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.times().windows(2).all(|w| w[0] < w[1]));
        assert!(a.times().iter().all(|&t| (0.0..=300.0).contains(&t)));
    }

    #[test]
    fn box_kernel_hand_example() {
        let ev = EventTimeline::new(vec![1.0, 2.0, 3.0], 4.0).unwrap();
        let est = estimate_intensity_kernel(&ev, 2.0, 0.5, Kernel::Box).unwrap();
        assert_eq!(est, 1.0);
        let empty = EventTimeline::empty(4.0);
        for k in [Kernel::Box, Kernel::Triangular, Kernel::Epanechnikov] {
            assert_eq!(estimate_intensity_kernel(&empty, 2.0, 0.5, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn kernels_integrate_to_one() {
        for k in [Kernel::Box, Kernel::Triangular, Kernel::Epanechnikov] {
            let n = 200_000;
            let step = 2.0 / n as f64;
            let total: f64 = (0..n)
                .map(|i| k.weight(-1.0 + (i as f64 + 0.5) * step) * step)
                .sum();
            assert!((total - 1.0).abs() < 1e-6, "{k:?}: {total}");
        }
    }

    #[test]
    fn timeline_csv_round_trip() {
        let ev = sample_event_times(&fig6(), 50.0, 3).unwrap();
        let mut buf = Vec::new();
        ev.write_csv(&mut buf).unwrap();
        let back = EventTimeline::read_csv(buf.as_slice(), 50.0).unwrap();
        assert_eq!(ev, back);
    }
}
