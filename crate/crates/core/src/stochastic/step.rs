use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous integer step function on `[0, ∞)`.
///
/// The value is `initial` until the first breakpoint; at each breakpoint
/// `(t, v)` the value becomes `v` (inclusive of `t`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepTrace {
    initial: i64,
    steps: Vec<(f64, i64)>,
}

impl StepTrace {
    pub fn constant(value: i64) -> Self {
        Self { initial: value, steps: Vec::new() }
    }

    pub fn new(initial: i64, steps: Vec<(f64, i64)>) -> Result<Self> {
        let mut prev = f64::NEG_INFINITY;
        for &(t, _) in &steps {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::param(format!("breakpoint time {t} outside [0, inf)")));
            }
            if t <= prev {
                return Err(Error::param(format!(
                    "breakpoint times must be strictly increasing, found {t} after {prev}"
                )));
            }
            prev = t;
        }
        Ok(Self { initial, steps })
    }

    pub(crate) fn from_sorted_unchecked(initial: i64, steps: Vec<(f64, i64)>) -> Self {
        debug_assert!(steps.windows(2).all(|w| w[0].0 < w[1].0));
        Self { initial, steps }
    }

    pub fn initial(&self) -> i64 {
        self.initial
    }

    pub fn steps(&self) -> &[(f64, i64)] {
        &self.steps
    }

    pub fn value_at(&self, t: f64) -> i64 {
        match self.steps.partition_point(|&(s, _)| s <= t) {
            0 => self.initial,
            k => self.steps[k - 1].1,
        }
    }

    /// Value just before `t`.
    pub fn left_limit(&self, t: f64) -> i64 {
        match self.steps.partition_point(|&(s, _)| s < t) {
            0 => self.initial,
            k => self.steps[k - 1].1,
        }
    }

    pub fn is_non_decreasing(&self) -> bool {
        let mut prev = self.initial;
        self.steps.iter().all(|&(_, v)| {
            let ok = v >= prev;
            prev = v;
            ok
        })
    }
}

/// Incremental construction of a [`StepTrace`].
///
/// A push at the same time as the previous breakpoint replaces its value, and
/// pushes that do not change the current value are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTraceBuilder {
    initial: i64,
    steps: Vec<(f64, i64)>,
}

impl StepTraceBuilder {
    pub fn new(initial: i64) -> Self {
        Self { initial, steps: Vec::new() }
    }

    pub fn current(&self) -> i64 {
        self.steps.last().map_or(self.initial, |s| s.1)
    }

    pub fn push(&mut self, t: f64, value: i64) -> Result<()> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param(format!("breakpoint time {t} outside [0, inf)")));
        }
        if let Some(&(last_t, _)) = self.steps.last() {
            if t < last_t {
                return Err(Error::Contract(format!("breakpoint {t} precedes {last_t}")));
            }
            if t == last_t {
                self.steps.pop();
            }
        }
        if value != self.current() {
            self.steps.push((t, value));
        }
        Ok(())
    }

    pub fn build(self) -> StepTrace {
        StepTrace::from_sorted_unchecked(self.initial, self.steps)
    }
}

/// Integral of `a - b` and of `|a - b|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Area {
    pub signed: f64,
    pub absolute: f64,
}

/// Streaming integral of a piecewise-constant integer difference.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DifferenceAccumulator {
    last: f64,
    area: Area,
}

impl DifferenceAccumulator {
    pub fn new(start: f64) -> Self {
        Self { last: start, area: Area::default() }
    }

    /// Accounts for the difference `diff` holding on `[last, to)`.
    #[inline]
    pub fn advance(&mut self, to: f64, diff: i64) {
        debug_assert!(to >= self.last, "accumulator moved backwards: {to} < {}", self.last);
        let dt = to - self.last;
        if dt > 0.0 && diff != 0 {
            let d = diff as f64;
            self.area.signed += d * dt;
            self.area.absolute += d.abs() * dt;
        }
        self.last = to;
    }

    pub fn position(&self) -> f64 {
        self.last
    }

    pub fn area(&self) -> Area {
        self.area
    }
}

/// Exact integral of `a - b` (and `|a - b|`) over `[0, horizon]` by merging
/// breakpoints. Breakpoints beyond the horizon are ignored.
pub fn integrate_difference(a: &StepTrace, b: &StepTrace, horizon: f64) -> Result<Area> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::param(format!("integration bounds [0, {horizon}] are invalid")));
    }
    let mut acc = DifferenceAccumulator::new(0.0);
    let (mut i, mut j) = (0, 0);
    let (mut va, mut vb) = (a.initial, b.initial);
    loop {
        let ta = a.steps.get(i).map_or(f64::INFINITY, |s| s.0);
        let tb = b.steps.get(j).map_or(f64::INFINITY, |s| s.0);
        let t = ta.min(tb);
        if t >= horizon {
            acc.advance(horizon, va - vb);
            break;
        }
        acc.advance(t, va - vb);
        if ta == t {
            va = a.steps[i].1;
            i += 1;
        }
        if tb == t {
            vb = b.steps[j].1;
            j += 1;
        }
    }
    Ok(acc.area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_trace(rng: &mut ChaCha8Rng, steps: usize, horizon: f64) -> StepTrace {
        let mut times: Vec<f64> = (0..steps).map(|_| rng.random::<f64>() * horizon).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let initial = rng.random_range(-3..4);
        let steps = times.into_iter().map(|t| (t, rng.random_range(-5..6))).collect();
        StepTrace::new(initial, steps).unwrap()
    }

    #[test]
    fn identity_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_trace(&mut rng, 50, 10.0);
        let area = integrate_difference(&a, &a, 10.0).unwrap();
        assert_eq!(area.signed, 0.0);
        assert_eq!(area.absolute, 0.0);
    }

    #[test]
    fn rectangle() {
        let a = StepTrace::constant(1);
        let b = StepTrace::constant(0);
        let area = integrate_difference(&a, &b, 10.0).unwrap();
        assert_eq!(area.signed, 10.0);
        assert_eq!(area.absolute, 10.0);
    }

    #[test]
    fn trims_past_horizon() {
        let a = StepTrace::new(0, vec![(1.0, 2), (5.0, 100)]).unwrap();
        let b = StepTrace::constant(0);
        let area = integrate_difference(&a, &b, 3.0).unwrap();
        assert_eq!(area.signed, 4.0);
    }

    #[test]
    fn inverted_bounds_rejected() {
        let a = StepTrace::constant(1);
        assert!(matches!(integrate_difference(&a, &a, -1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn absolute_differs_when_sign_changes() {
        let a = StepTrace::new(0, vec![(1.0, 2)]).unwrap();
        let b = StepTrace::constant(1);
        let area = integrate_difference(&a, &b, 3.0).unwrap();
        assert_eq!(area.signed, -1.0 + 2.0);
        assert_eq!(area.absolute, 3.0);
    }

    /// Dense midpoint Riemann sum, independent of the breakpoint merge.
    fn riemann(a: &StepTrace, b: &StepTrace, horizon: f64, dt: f64) -> f64 {
        let n = (horizon / dt).round() as usize;
        (0..n)
            .map(|k| {
                let t = (k as f64 + 0.5) * dt;
                (a.value_at(t) - b.value_at(t)) as f64 * dt
            })
            .sum()
    }

    #[test]
    fn matches_riemann_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..3 {
            let a = random_trace(&mut rng, 100, 10.0);
            let b = random_trace(&mut rng, 100, 10.0);
            let exact = integrate_difference(&a, &b, 10.0).unwrap().signed;
            let approx = riemann(&a, &b, 10.0, 1e-4);
            let scale = exact.abs().max(1.0);
            assert!((exact - approx).abs() / scale < 1e-3, "{exact} vs {approx}");
        }
    }

    #[test]
    fn builder_merges_and_drops() {
        let mut b = StepTraceBuilder::new(0);
        b.push(1.0, 1).unwrap();
        b.push(1.0, 2).unwrap();
        b.push(2.0, 2).unwrap();
        b.push(3.0, 3).unwrap();
        assert!(b.push(2.5, 4).is_err());
        let t = b.build();
        assert_eq!(t.steps(), &[(1.0, 2), (3.0, 3)]);
        assert_eq!(t.value_at(0.5), 0);
        assert_eq!(t.value_at(1.0), 2);
        assert_eq!(t.left_limit(1.0), 0);
    }

    #[test]
    fn new_rejects_unsorted() {
        assert!(StepTrace::new(0, vec![(2.0, 1), (1.0, 2)]).is_err());
        assert!(StepTrace::new(0, vec![(1.0, 1), (1.0, 2)]).is_err());
        assert!(StepTrace::new(0, vec![(f64::NAN, 1)]).is_err());
    }

    proptest! {
        #[test]
        fn integral_is_linear(seed in any::<u64>(), horizon in 0.5f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_trace(&mut rng, 40, horizon * 1.2);
            let b = random_trace(&mut rng, 40, horizon * 1.2);
            let c = random_trace(&mut rng, 40, horizon * 1.2);
            let ab = integrate_difference(&a, &b, horizon).unwrap().signed;
            let bc = integrate_difference(&b, &c, horizon).unwrap().signed;
            let ac = integrate_difference(&a, &c, horizon).unwrap().signed;
            prop_assert!((ab + bc - ac).abs() < 1e-12, "{} + {} != {}", ab, bc, ac);
        }

        #[test]
        fn antisymmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_trace(&mut rng, 30, 5.0);
            let b = random_trace(&mut rng, 30, 5.0);
            let ab = integrate_difference(&a, &b, 5.0).unwrap();
            let ba = integrate_difference(&b, &a, 5.0).unwrap();
            prop_assert_eq!(ab.signed, -ba.signed);
            prop_assert_eq!(ab.absolute, ba.absolute);
        }
    }
}
