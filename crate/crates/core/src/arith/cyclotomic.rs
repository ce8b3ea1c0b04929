//! Exact arithmetic in cyclotomic rings `Z[zeta_m]`, stored in the power
//! basis of the cyclotomic polynomial.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::{One, Zero};

use super::{divisors_u64, lcm_u64, Int, Rat};

/// Integer coefficients of the `m`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(m: u64) -> Vec<Int> {
    // x^m - 1 divided by the cyclotomic polynomials of the proper divisors
    let mut num = vec![Int::zero(); m as usize + 1];
    num[0] = -Int::one();
    num[m as usize] = Int::one();
    for d in divisors_u64(m) {
        if d == m {
            continue;
        }
        num = exact_div_monic(&num, &cyclotomic_poly(d));
    }
    num
}

fn exact_div_monic(a: &[Int], b: &[Int]) -> Vec<Int> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![Int::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] -= &c * bj;
            }
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    pub m: u64,
    phi: Vec<Int>,
}

impl CycloField {
    pub fn new(m: u64) -> Arc<Self> {
        assert!(m >= 1);
        Arc::new(CycloField { m, phi: cyclotomic_poly(m) })
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut c: Vec<Int>) -> Vec<Int> {
        let d = self.degree();
        for k in (d..c.len()).rev() {
            let lead = core::mem::take(&mut c[k]);
            if lead.is_zero() {
                continue;
            }
            for (j, pj) in self.phi.iter().enumerate().take(d) {
                c[k - d + j] -= &lead * pj;
            }
        }
        c.resize(d, Int::zero());
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicInt {
    field: Arc<CycloField>,
    coeffs: Vec<Int>,
}

impl CyclotomicInt {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        CyclotomicInt { field: field.clone(), coeffs: vec![Int::zero(); field.degree()] }
    }

    pub fn from_int(field: &Arc<CycloField>, n: Int) -> Self {
        let mut z = Self::zero(field);
        z.coeffs[0] = n;
        z
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::from_int(field, Int::one())
    }

    /// `zeta_m^k`.
    pub fn zeta(field: &Arc<CycloField>, k: i64) -> Self {
        let m = field.m as i64;
        let e = k.rem_euclid(m) as usize;
        let mut c = vec![Int::zero(); e.max(field.degree()) + 1];
        c[e] = Int::one();
        CyclotomicInt { field: field.clone(), coeffs: field.reduce(c) }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn modulus(&self) -> u64 {
        self.field.m
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Returns the value as a rational integer if it lies in `Z`.
    pub fn as_integer(&self) -> Option<Int> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.field.m, o.field.m, "cyclotomic moduli differ; coerce first");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        CyclotomicInt {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        CyclotomicInt { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: &Int) -> Self {
        CyclotomicInt { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.field.degree();
        let mut c = vec![Int::zero(); 2 * d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        CyclotomicInt { field: self.field.clone(), coeffs: self.field.reduce(c) }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.field.m as usize;
        let mut c = vec![Int::zero(); m.max(self.field.degree() + 1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[(m - i % m) % m] += a;
        }
        CyclotomicInt { field: self.field.clone(), coeffs: self.field.reduce(c) }
    }

    /// Galois action `zeta -> zeta^a` for `a` prime to `m`.
    pub fn galois(&self, a: u64) -> Self {
        let m = self.field.m as usize;
        let mut c = vec![Int::zero(); m.max(self.field.degree() + 1)];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[(i * a as usize) % m] += x;
        }
        CyclotomicInt { field: self.field.clone(), coeffs: self.field.reduce(c) }
    }

    /// Image in `Z[zeta_{m'}]` for a multiple `m'` of `m`.
    pub fn coerce(&self, target: &Arc<CycloField>) -> Self {
        assert!(target.m.is_multiple_of(self.field.m), "coercion needs m | m'");
        let step = (target.m / self.field.m) as usize;
        let mut c = vec![Int::zero(); (self.coeffs.len() * step).max(target.degree() + 1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i * step] += a;
        }
        CyclotomicInt { field: target.clone(), coeffs: target.reduce(c) }
    }

    /// Squared absolute value, which lies in the maximal real subring; returns
    /// it when rational.
    pub fn abs_squared_integer(&self) -> Option<Int> {
        self.mul(&self.conj()).as_integer()
    }
}

/// Brings two values into the common ring `Z[zeta_lcm]`.
pub fn unify(a: &CyclotomicInt, b: &CyclotomicInt) -> (CyclotomicInt, CyclotomicInt) {
    if a.modulus() == b.modulus() {
        return (a.clone(), b.clone());
    }
    let f = CycloField::new(lcm_u64(a.modulus(), b.modulus()));
    (a.coerce(&f), b.coerce(&f))
}

/// Element of `Q(zeta_m)`: a cyclotomic integer times a rational scalar.
#[derive(Clone, Debug)]
pub struct CycloRat {
    pub num: CyclotomicInt,
    pub scale: Rat,
}

impl CycloRat {
    pub fn new(num: CyclotomicInt, scale: Rat) -> Self {
        CycloRat { num, scale }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = unify(&self.num, &o.num);
        CycloRat { num: a.mul(&b), scale: &self.scale * &o.scale }
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero() || self.num.is_zero()
    }

    /// Exact equality as elements of a common cyclotomic field.
    pub fn equals(&self, o: &Self) -> bool {
        let (a, b) = unify(&self.num, &o.num);
        // a * s1 == b * s2  <=>  a * n1 * d2 == b * n2 * d1
        let l = a.scale(&(self.scale.numer() * o.scale.denom()));
        let r = b.scale(&(o.scale.numer() * self.scale.denom()));
        l == r
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z{}", self.field.m)?,
                _ => write!(f, "{c}*z{}^{i}", self.field.m)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![int(-1), int(1)]);
        assert_eq!(cyclotomic_poly(4), vec![int(1), int(0), int(1)]);
        assert_eq!(cyclotomic_poly(9), vec![int(1), int(0), int(0), int(1), int(0), int(0), int(1)]);
        assert_eq!(cyclotomic_poly(12).len(), 5);
    }

    #[test]
    fn roots_of_unity_multiply() {
        let f = CycloField::new(9);
        let z = CyclotomicInt::zeta(&f, 1);
        assert_eq!(z.pow(9), CyclotomicInt::one(&f));
        assert_eq!(z.mul(&z.conj()), CyclotomicInt::one(&f));
        assert_eq!(CyclotomicInt::zeta(&f, 4).mul(&CyclotomicInt::zeta(&f, 7)), CyclotomicInt::zeta(&f, 2));
        let g = CycloField::new(18);
        assert_eq!(z.coerce(&g), CyclotomicInt::zeta(&g, 2));
    }

    #[test]
    fn quadratic_gauss_sum_mod_5() {
        let f = CycloField::new(5);
        let mut g = CyclotomicInt::zero(&f);
        for u in 1..5i64 {
            let leg = if u == 1 || u == 4 { 1 } else { -1 };
            g = g.add(&CyclotomicInt::zeta(&f, u).scale(&int(leg)));
        }
        assert_eq!(g.mul(&g).as_integer(), Some(int(5)));
        assert_eq!(g.abs_squared_integer(), Some(int(5)));
    }
}
