//! Closed rational intervals with optional outward rounding to dyadic
//! endpoints, used to certify signs of real embeddings.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{ceil_rat, floor_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, s: &Rat) -> Interval {
        if s.is_negative() {
            Interval { lo: &self.hi * s, hi: &self.lo * s }
        } else {
            Interval { lo: &self.lo * s, hi: &self.hi * s }
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified sign, or `None` when zero is not excluded.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Upper bound on `|x|` over the interval.
    pub fn abs_upper(&self) -> Rat {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `|x|` over the interval (zero if it straddles zero).
    pub fn abs_lower(&self) -> Rat {
        if self.contains_zero() {
            Rat::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            -self.hi.clone()
        }
    }

    /// Outward rounding of both endpoints to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Interval {
        let scale = Rat::from_integer(BigInt::one() << bits);
        let lo = floor_rat(&(&self.lo * &scale));
        let hi = ceil_rat(&(&self.hi * &scale));
        Interval {
            lo: Rat::new(lo, BigInt::one() << bits),
            hi: Rat::new(hi, BigInt::one() << bits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn arithmetic_contains_true_values() {
        let a = Interval::new(rat(-1, 2), rat(1, 3));
        let b = Interval::new(rat(2, 1), rat(3, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo, rat(-3, 2));
        assert_eq!(p.hi, rat(1, 1));
        assert_eq!(b.sign(), Some(1));
        assert_eq!(a.sign(), None);
        let r = Interval::new(rat(1, 3), rat(1, 3)).round_out(4);
        assert!(r.lo <= rat(1, 3) && r.hi >= rat(1, 3));
        assert!(r.width() <= rat(1, 16));
    }
}
