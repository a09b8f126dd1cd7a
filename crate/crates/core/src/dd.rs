//! Double-double arithmetic. A value is the unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

pub const LN_2: DoubleDouble = DoubleDouble::new(std::f64::consts::LN_2, 2.3190468138462996e-17);
pub const TWO_PI: DoubleDouble = DoubleDouble::new(std::f64::consts::TAU, 2.4492935982947064e-16);

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    /// Natural logarithm of a positive integer, via `n = m 2^e` and the
    /// atanh series for `ln m` with `m` in `[1/sqrt 2, sqrt 2)`.
    pub fn ln_u64(n: u64) -> Self {
        assert!(n > 0, "ln of zero");
        if n == 1 {
            return Self::default();
        }
        // exact for n < 2^53, which covers every table size in use
        let x = n as f64;
        let mut e = x.log2().floor() as i32;
        let mut m = x / 2f64.powi(e);
        while m >= std::f64::consts::SQRT_2 {
            m *= 0.5;
            e += 1;
        }
        while m < std::f64::consts::FRAC_1_SQRT_2 {
            m *= 2.0;
            e -= 1;
        }
        let num = Self::from_f64(m - 1.0);
        let den = Self::from_f64(m).add_f64(1.0);
        let z = num / den;
        let w = z * z;
        let mut acc = Self::default();
        for k in (0..24).rev() {
            acc = acc * w + Self::from_f64(1.0) / Self::from_f64((2 * k + 1) as f64);
        }
        LN_2.mul_f64(e as f64) + (z * acc).mul_f64(2.0)
    }

    /// Reduces `self` modulo 2 pi into roughly `[-pi, pi]`.
    #[inline]
    pub fn reduce_two_pi(self) -> f64 {
        let k = (self.hi / TWO_PI.hi).round();
        (self + TWO_PI.mul_f64(-k)).to_f64()
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    #[inline]
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    #[inline]
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add_f64(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_matches_libm_in_leading_part() {
        for n in [2u64, 3, 7, 10, 1000, 65_537, 999_983, 1 << 40] {
            let l = DoubleDouble::ln_u64(n);
            assert!(
                (l.hi - (n as f64).ln()).abs() <= 2.0 * f64::EPSILON * l.hi.abs(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn ln_is_additive_to_double_double_accuracy() {
        // ln 6 - ln 2 - ln 3 cancels to well below double precision
        let r = DoubleDouble::ln_u64(6) - DoubleDouble::ln_u64(2) - DoubleDouble::ln_u64(3);
        assert!(r.to_f64().abs() < 1e-30, "{r:?}");
        let r = DoubleDouble::ln_u64(1 << 20) - LN_2.mul_f64(20.0);
        assert!(r.to_f64().abs() < 1e-29, "{r:?}");
        let r = DoubleDouble::ln_u64(1_000_000) - DoubleDouble::ln_u64(1000).mul_f64(2.0);
        assert!(r.to_f64().abs() < 1e-29, "{r:?}");
    }

    #[test]
    fn reduction_keeps_phase_exact_for_large_multiples() {
        let x = TWO_PI.mul_f64(1.0e7).add_f64(0.25);
        assert!((x.reduce_two_pi() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn division_round_trips() {
        let a = DoubleDouble::from_f64(1.0) / DoubleDouble::from_f64(3.0);
        let b = a.mul_f64(3.0) - DoubleDouble::from_f64(1.0);
        assert!(b.to_f64().abs() < 1e-31);
    }
}
