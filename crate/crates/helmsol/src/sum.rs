//! Compensated accumulation, the shared truncation rule, and a small
//! double-double kit used where plain f64 cancellation would dominate.

/// Neumaier-compensated running sum that also tracks the sum of absolute
/// values (the scale against which relative tail tests are made).
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let s = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - s) + term;
        } else {
            self.comp += (term - s) + self.sum;
        }
        self.sum = s;
        self.abs += term.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs
    }
}

/// Stop rule for (possibly sign-alternating) series: fires only after three
/// consecutive contributions fall below rel_tol times the running scale.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TailRule {
    rel_tol: f64,
    strikes: u8,
}

impl TailRule {
    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol, strikes: 0 }
    }

    /// Feed one contribution magnitude; true means the series may stop.
    pub fn check(&mut self, contribution_abs: f64, scale_abs: f64) -> bool {
        if contribution_abs <= self.rel_tol * scale_abs {
            self.strikes += 1;
        } else {
            self.strikes = 0;
        }
        self.strikes >= 3
    }
}

/// Geometric tail bound from the magnitudes of the last two contributions;
/// conservative (ratio clamped) and zero once the series has cleanly died.
pub(crate) fn geometric_tail(last_abs: f64, prev_abs: f64) -> f64 {
    if last_abs == 0.0 {
        return 0.0;
    }
    let q = if prev_abs > 0.0 { (last_abs / prev_abs).min(0.9) } else { 0.5 };
    last_abs * q / (1.0 - q)
}

// ---------------------------------------------------------------------------
// Double-double arithmetic (~31 significant digits). Only the handful of
// operations the accelerated series summation needs.

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact double-double value of a + b (each an f64).
    pub fn sum_of(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, s: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, s);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * s);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::from_f64(1.0);
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        // 1 + 1e16 - 1e16 summed naively loses the 1
        let mut acc = Accumulator::new();
        acc.add(1.0);
        acc.add(1e16);
        acc.add(-1e16);
        assert_relative_eq!(acc.value(), 1.0);
        assert!(acc.abs_sum() >= 2e16);
    }

    #[test]
    fn tail_rule_requires_three_consecutive_small_terms() {
        let mut rule = TailRule::new(1e-6);
        assert!(!rule.check(1e-9, 1.0));
        assert!(!rule.check(1e-9, 1.0));
        // a large term resets the streak
        assert!(!rule.check(1.0, 1.0));
        assert!(!rule.check(1e-9, 1.0));
        assert!(!rule.check(1e-9, 1.0));
        assert!(rule.check(1e-9, 1.0));
    }

    #[test]
    fn dd_multiplication_keeps_products_exact() {
        // (1 + 2^-40)^2 = 1 + 2^-39 + 2^-80; plain f64 drops the last bit
        let x = Dd::sum_of(1.0, (2.0f64).powi(-40));
        let sq = x.mul(x);
        let expect_hi = 1.0 + (2.0f64).powi(-39);
        assert_relative_eq!(sq.hi, expect_hi);
        assert_relative_eq!(sq.lo, (2.0f64).powi(-80));
    }

    #[test]
    fn dd_division_round_trips() {
        let a = Dd::sum_of(3.1415926535897931, 1.2246467991473532e-16);
        let b = Dd::from_f64(7.0);
        let q = a.div(b);
        let back = q.mul(b);
        assert!((back.sub(a).hi).abs() < 1e-30);
    }

    #[test]
    fn dd_integer_power_matches_exact_value() {
        // 17^13 needs 57 bits, so the f64 product is inexact while dd is not
        let v = Dd::from_f64(17.0).powi(13);
        // exact value 9904578032905937 = hi + lo in dd
        assert_eq!(v.hi + v.lo, 9.904578032905937e15);
        assert_eq!(v.hi.mul_add(1.0, v.lo), 9904578032905937.0);
    }

    #[test]
    fn geometric_tail_is_zero_for_dead_series() {
        assert_eq!(geometric_tail(0.0, 1.0), 0.0);
        assert!(geometric_tail(1e-10, 1e-5) < 1e-13);
    }
}
