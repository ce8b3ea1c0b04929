//! Dense univariate polynomials over Q (coefficients low degree first) and
//! real root isolation by Sturm sequences.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::{rat_int, Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[Int]) -> Self {
        Poly::new(c.iter().map(rat_int).collect())
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Rat::one()] }
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![Rat::zero(), Rat::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::point(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&Interval::point(c.clone()));
        }
        acc
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![Rat::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i] += a;
        }
        for (i, a) in o.coeffs.iter().enumerate() {
            c[i] += a;
        }
        Poly::new(c)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * b;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(Int::from(i as u64)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead();
        self.scale(&(Rat::one() / l))
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Composition `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::new(vec![c.clone()]));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Cauchy bound: every complex root has absolute value below it.
    pub fn root_bound(&self) -> Rat {
        let l = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &l)
            .fold(Rat::zero(), |a, b| if b > a { b } else { a });
        m + Rat::one()
    }
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(f: &Poly) -> Vec<Poly> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &Rat) -> usize {
    let mut last = 0i32;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[Poly], a: &Rat, b: &Rat) -> usize {
    sign_changes(seq, a) - sign_changes(seq, b)
}

/// Isolates every real root of a squarefree polynomial and refines each to
/// width at most `2^-bits`. Intervals are closed, disjoint and ascending.
pub fn isolate_real_roots(f: &Poly, bits: u32) -> Vec<Interval> {
    let seq = sturm_sequence(f);
    let b = f.root_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = count_roots(&seq, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine_root(f, lo, hi, bits));
            continue;
        }
        let mid = (&lo + &hi) / Rat::from_integer(Int::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Bisects `(lo, hi]`, which contains exactly one simple root of `f`.
pub fn refine_root(f: &Poly, mut lo: Rat, mut hi: Rat, bits: u32) -> Interval {
    let width = Rat::new(Int::one(), Int::one() << bits);
    if f.eval(&hi).is_zero() {
        return Interval::point(hi);
    }
    let two = Rat::from_integer(Int::from(2));
    // f(hi) != 0 and the unique root in (lo, hi] is simple, so the sign of f
    // at hi tells which half holds it.
    let shi = f.eval(&hi).signum();
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        let v = f.eval(&mid);
        if v.is_zero() {
            return Interval::point(mid);
        }
        if v.signum() == shi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Interval::new(lo, hi)
}

/// Characteristic polynomial of a square rational matrix (Faddeev-LeVerrier).
pub fn charpoly(m: &[Vec<Rat>]) -> Poly {
    let n = m.len();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut mk: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    for k in 1..=n {
        // mk = m * (mk_prev + c[n-k+1] I)
        let mut tmp = mk.clone();
        for (i, row) in tmp.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        let mut prod = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if m[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    prod[i][j] += &m[i][l] * &tmp[l][j];
                }
            }
        }
        let tr: Rat = (0..n).map(|i| prod[i][i].clone()).sum();
        c[n - k] = -tr / Rat::from_integer(Int::from(k as u64));
        mk = prod;
    }
    Poly::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn isolates_cubic_roots() {
        let f = Poly::from_i64(&[1, -3, 0, 1]);
        let roots = isolate_real_roots(&f, 40);
        assert_eq!(roots.len(), 3);
        assert!(roots[0].hi < rat(-18, 10) && roots[0].lo > rat(-19, 10));
        assert!(roots[1].lo > rat(34, 100) && roots[1].hi < rat(35, 100));
        assert!(roots[2].lo > rat(153, 100) && roots[2].hi < rat(154, 100));
    }

    #[test]
    fn rational_root_is_exact() {
        let f = Poly::from_i64(&[-1, 0, 1]);
        let roots = isolate_real_roots(&f, 30);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.lo == r.hi));
    }

    #[test]
    fn charpoly_of_companion() {
        let m = vec![
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
            vec![rat(1, 1), rat(0, 1), rat(3, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        ];
        assert_eq!(charpoly(&m), Poly::from_i64(&[1, -3, 0, 1]));
    }
}
