//! Truncated Laurent series in `t` over `Q[X^{±1}, N^{±1}]` and the formal
//! identity behind the Euler factor at a prime of the ordinary set.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use num_traits::{One, Zero};

use crate::arith::Rat;
use crate::error::{Error, Result};

/// A Laurent polynomial in `X` and `N` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentXN {
    terms: BTreeMap<(i64, i64), Rat>,
}

impl LaurentXN {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0, 0)
    }

    /// `c X^a N^b`.
    pub fn monomial(c: Rat, a: i64, b: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        LaurentXN { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            let e = terms.entry(*k).or_insert_with(Rat::zero);
            *e += v;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        LaurentXN { terms }
    }

    pub fn neg(&self) -> Self {
        LaurentXN { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc = LaurentXN::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                acc = acc.add(&Self::monomial(c1 * c2, a1 + a2, b1 + b2));
            }
        }
        acc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Rat)> {
        self.terms.iter()
    }
}

impl fmt::Display for LaurentXN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*X^{a}*N^{b}")?;
        }
        Ok(())
    }
}

/// A Laurent series in `t` whose coefficients of `t^n` are known exactly for
/// `n <= prec` (all `n` when `prec` is `None`).
#[derive(Clone, Debug)]
pub struct RationalFunctionSeries {
    coeffs: BTreeMap<i64, LaurentXN>,
    prec: Option<i64>,
}

impl RationalFunctionSeries {
    /// An exact Laurent polynomial in `t`.
    pub fn polynomial(terms: Vec<(i64, LaurentXN)>) -> Self {
        let mut s = RationalFunctionSeries { coeffs: BTreeMap::new(), prec: None };
        for (n, c) in terms {
            s.add_term(n, &c);
        }
        s
    }

    /// `(1 - c t)^{-1}` known through `t^prec`.
    pub fn geometric(c: &LaurentXN, prec: i64) -> Self {
        let mut s = RationalFunctionSeries { coeffs: BTreeMap::new(), prec: Some(prec) };
        let mut p = LaurentXN::one();
        for n in 0..=prec {
            s.add_term(n, &p);
            p = p.mul(c);
        }
        s
    }

    fn add_term(&mut self, n: i64, c: &LaurentXN) {
        if self.prec.is_some_and(|p| n > p) {
            return;
        }
        let e = self.coeffs.entry(n).or_default();
        *e = e.add(c);
        if e.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    /// Truncates to `t^prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        let p = self.prec.map_or(prec, |q| q.min(prec));
        RationalFunctionSeries { coeffs: self.coeffs.range(..=p).map(|(k, v)| (*k, v.clone())).collect(), prec: Some(p) }
    }

    fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn coefficient(&self, n: i64) -> Result<LaurentXN> {
        if self.prec.is_some_and(|p| n > p) {
            return Err(Error::Truncation(format!("coefficient of t^{n} requested beyond precision {:?}", self.prec)));
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_default())
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = match (self.prec, o.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut s = RationalFunctionSeries { coeffs: BTreeMap::new(), prec };
        for (n, c) in self.coeffs.iter().chain(o.coeffs.iter()) {
            s.add_term(*n, c);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        // an unknown coefficient of one factor spoils every product term above
        // its precision shifted by the other factor's lowest exponent
        let shift = |p: Option<i64>, m: Option<i64>| p.map(|p| p + m.unwrap_or(0));
        let prec = match (shift(self.prec, o.min_exp()), shift(o.prec, self.min_exp())) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut s = RationalFunctionSeries { coeffs: BTreeMap::new(), prec };
        for (n1, c1) in &self.coeffs {
            for (n2, c2) in &o.coeffs {
                s.add_term(n1 + n2, &c1.mul(c2));
            }
        }
        s
    }

    /// Whether the coefficients agree for all `n <= upto`.
    pub fn agrees_through(&self, o: &Self, upto: i64) -> Result<bool> {
        for s in [self, o] {
            if s.prec.is_some_and(|p| p < upto) {
                return Err(Error::Truncation(format!("comparison through t^{upto} exceeds precision {:?}", s.prec)));
            }
        }
        let keys: Vec<i64> = self.coeffs.keys().chain(o.coeffs.keys()).copied().filter(|&n| n <= upto).collect();
        Ok(keys.into_iter().all(|n| self.coeffs.get(&n) == o.coeffs.get(&n)))
    }

    /// Nonzero terms up to precision.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &LaurentXN)> {
        self.coeffs.iter()
    }
}

#[derive(Clone, Debug)]
pub struct EulerReport {
    pub e: u32,
    pub truncation: i64,
    pub holds: bool,
    /// `(1 - X t)` times the left side, through `t^T`.
    pub telescoped: RationalFunctionSeries,
    pub telescopes: bool,
}

/// `w(n) = 1 - 1/N` for `n >= -e` and `w(-1-e) = -1/N`.
fn weight(n: i64, e: i64) -> LaurentXN {
    if n == -1 - e {
        LaurentXN::monomial(-Rat::one(), 0, -1)
    } else {
        LaurentXN::one().sub(&LaurentXN::monomial(Rat::one(), 0, -1))
    }
}

/// The left side `sum_{n=-1-e}^{T} w(n) X^n t^n`, known through `t^T`.
pub fn euler_lhs(e: u32, truncation: i64) -> RationalFunctionSeries {
    let e = e as i64;
    let terms = (-1 - e..=truncation).map(|n| (n, weight(n, e).mul(&LaurentXN::monomial(Rat::one(), n, 0)))).collect();
    RationalFunctionSeries::polynomial(terms).truncate(truncation)
}

/// The right side `(1 - t^{-1} X^{-1} N^{-1}) X^{-e} t^{-e} (1 - X t)^{-1}`,
/// known through `t^T`.
pub fn euler_rhs(e: u32, truncation: i64) -> RationalFunctionSeries {
    let e = e as i64;
    let first = RationalFunctionSeries::polynomial(alloc::vec![
        (0, LaurentXN::one()),
        (-1, LaurentXN::monomial(-Rat::one(), -1, -1)),
    ]);
    let shift = RationalFunctionSeries::polynomial(alloc::vec![(-e, LaurentXN::monomial(Rat::one(), -e, 0))]);
    let geo = RationalFunctionSeries::geometric(&LaurentXN::monomial(Rat::one(), 1, 0), truncation + e + 1);
    first.mul(&shift).mul(&geo).truncate(truncation)
}

/// Checks the inner-sum identity through `t^T` together with its
/// telescoping form.
pub fn verify_euler_identity(e: u32, truncation: i64) -> Result<EulerReport> {
    if truncation < e as i64 + 2 {
        return Err(Error::Truncation(format!("need T >= e + 2 = {}, got {truncation}", e + 2)));
    }
    let lhs = euler_lhs(e, truncation);
    let rhs = euler_rhs(e, truncation);
    let holds = lhs.agrees_through(&rhs, truncation)?;
    let one_minus_xt = RationalFunctionSeries::polynomial(alloc::vec![
        (0, LaurentXN::one()),
        (1, LaurentXN::monomial(-Rat::one(), 1, 0)),
    ]);
    let telescoped = one_minus_xt.mul(&lhs).truncate(truncation);
    let ei = e as i64;
    let expected = RationalFunctionSeries::polynomial(alloc::vec![
        (-ei, LaurentXN::monomial(Rat::one(), -ei, 0)),
        (-1 - ei, LaurentXN::monomial(-Rat::one(), -1 - ei, -1)),
    ]);
    let telescopes = telescoped.agrees_through(&expected, truncation)? && telescoped.terms().count() == 2;
    Ok(EulerReport { e, truncation, holds, telescoped, telescopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_examples() {
        for (e, t) in [(0, 10), (2, 20), (5, 30)] {
            let r = verify_euler_identity(e, t).unwrap();
            assert!(r.holds && r.telescopes, "e = {e}");
        }
        assert!(matches!(verify_euler_identity(3, 4), Err(Error::Truncation(_))));
    }

    #[test]
    fn t_instead_of_t_inverse_fails() {
        // (1 - t X^{-1} N^{-1}) in place of (1 - t^{-1} X^{-1} N^{-1})
        let e = 1i64;
        let first = RationalFunctionSeries::polynomial(alloc::vec![
            (0, LaurentXN::one()),
            (1, LaurentXN::monomial(-Rat::one(), -1, -1)),
        ]);
        let shift = RationalFunctionSeries::polynomial(alloc::vec![(-e, LaurentXN::monomial(Rat::one(), -e, 0))]);
        let geo = RationalFunctionSeries::geometric(&LaurentXN::monomial(Rat::one(), 1, 0), 12);
        let rhs = first.mul(&shift).mul(&geo);
        assert!(!euler_lhs(1, 8).agrees_through(&rhs, 8).unwrap());
    }

    #[test]
    fn precision_is_tracked() {
        let g = RationalFunctionSeries::geometric(&LaurentXN::one(), 5);
        assert!(g.coefficient(6).is_err());
        let h = g.mul(&RationalFunctionSeries::polynomial(alloc::vec![(-2, LaurentXN::one())]));
        assert_eq!(h.prec(), Some(3));
    }
}
