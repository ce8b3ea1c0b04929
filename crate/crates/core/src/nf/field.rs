//! Totally real fields: an order together with a defining polynomial and
//! certified real embeddings.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;
use num_traits::{One, Signed, Zero};

use super::order::{FieldElement, Order};
use crate::arith::interval::Interval;
use crate::arith::matrix::solve_left_rat;
use crate::arith::poly::{isolate_real_roots, refine_root, Poly};
use crate::arith::{Int, Rat};
use crate::error::{Error, Result};

pub const BASE_PRECISION: u32 = 64;

#[derive(Clone, Debug)]
pub struct FieldOrder {
    order: Order,
    min_poly: Vec<Int>,
    /// Basis element `i` as a polynomial in the generator.
    basis: Vec<Poly>,
    monogenic: bool,
    roots: Vec<Interval>,
    /// `embeddings[j][i]` encloses `sigma_j(e_i)`.
    embeddings: Vec<Vec<Interval>>,
}

impl Deref for FieldOrder {
    type Target = Order;
    fn deref(&self) -> &Order {
        &self.order
    }
}

impl FieldOrder {
    /// The order `Z[theta]` for a monic integer polynomial.
    pub fn monogenic(label: &str, min_poly: &[i64]) -> Result<Self> {
        let n = min_poly.len() - 1;
        let basis = (0..n)
            .map(|k| {
                let mut c = vec![0i64; k + 1];
                c[k] = 1;
                Poly::from_i64(&c)
            })
            .collect();
        Self::with_basis(label, min_poly, basis)
    }

    /// The order spanned by the given polynomials in a root `theta` of the
    /// monic polynomial `min_poly`; the first must be 1.
    pub fn with_basis(label: &str, min_poly: &[i64], basis: Vec<Poly>) -> Result<Self> {
        let f = Poly::from_i64(min_poly);
        let n = min_poly.len().saturating_sub(1);
        if n == 0 || min_poly[n] != 1 {
            return Err(Error::InvalidField(format!("{label}: defining polynomial must be monic")));
        }
        if basis.len() != n || basis[0] != Poly::one() {
            return Err(Error::InvalidField(format!("{label}: basis must have {n} elements starting with 1")));
        }
        if !f.is_squarefree() {
            return Err(Error::InvalidField(format!("{label}: defining polynomial is not squarefree")));
        }
        let bmat: Vec<Vec<Rat>> = basis
            .iter()
            .map(|p| {
                let r = p.rem(&f);
                let mut c = r.coeffs.clone();
                c.resize(n, Rat::zero());
                c
            })
            .collect();
        let mut table = vec![vec![vec![0i64; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = basis[i].mul(&basis[j]).rem(&f);
                let mut c = prod.coeffs.clone();
                c.resize(n, Rat::zero());
                let y = solve_left_rat(&bmat, &c)
                    .ok_or_else(|| Error::InvalidField(format!("{label}: basis is linearly dependent")))?;
                for (k, v) in y.iter().enumerate() {
                    if !v.is_integer() {
                        return Err(Error::InvalidField(format!("{label}: basis does not span a ring")));
                    }
                    table[i][j][k] = i64::try_from(v.numer().clone())
                        .map_err(|_| Error::InvalidField(format!("{label}: table entry too large")))?;
                }
            }
        }
        let order = Order::new(label, table, None)?;
        let roots = isolate_real_roots(&f, BASE_PRECISION);
        if roots.len() != n {
            return Err(Error::InvalidField(format!("{label}: field is not totally real")));
        }
        let embeddings = roots.iter().map(|r| basis.iter().map(|p| p.eval_interval(r)).collect()).collect();
        let monogenic = basis.iter().enumerate().all(|(k, p)| p.degree() == Some(k) && p.lead().is_one());
        Ok(FieldOrder {
            order,
            min_poly: min_poly.iter().map(|&c| Int::from(c)).collect(),
            basis,
            monogenic,
            roots,
            embeddings,
        })
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn min_poly(&self) -> &[Int] {
        &self.min_poly
    }

    pub fn is_monogenic(&self) -> bool {
        self.monogenic
    }

    pub fn basis_polys(&self) -> &[Poly] {
        &self.basis
    }

    pub fn root_intervals(&self) -> &[Interval] {
        &self.roots
    }

    /// Coordinates of the generator `theta` on the basis.
    pub fn generator(&self) -> FieldElement {
        let n = self.degree();
        let mut t = vec![Rat::zero(); n];
        if n > 1 {
            t[1] = Rat::one();
        }
        let target = Poly::new(t);
        self.from_poly(&target)
    }

    /// The element `g(theta)`.
    pub fn from_poly(&self, g: &Poly) -> FieldElement {
        let n = self.degree();
        let f = Poly::from_ints(&self.min_poly);
        let bmat: Vec<Vec<Rat>> = self
            .basis
            .iter()
            .map(|p| {
                let mut c = p.rem(&f).coeffs;
                c.resize(n, Rat::zero());
                c
            })
            .collect();
        let mut c = g.rem(&f).coeffs;
        c.resize(n, Rat::zero());
        let y = solve_left_rat(&bmat, &c).expect("basis is invertible");
        self.element(y)
    }

    /// The polynomial `g` with `x = g(theta)`.
    pub fn to_poly(&self, x: &FieldElement) -> Poly {
        x.coords.iter().zip(&self.basis).fold(Poly::zero(), |acc, (c, p)| acc.add(&p.scale(c)))
    }

    /// Enclosures of all real embeddings of `x` at the base precision.
    pub fn embed(&self, x: &FieldElement) -> Vec<Interval> {
        self.embeddings
            .iter()
            .map(|row| {
                x.coords
                    .iter()
                    .zip(row)
                    .fold(Interval::point(Rat::zero()), |acc, (c, iv)| acc.add(&iv.scale(c)))
            })
            .collect()
    }

    /// Enclosure of `sigma_j(x)` with the defining root refined to `bits`.
    pub fn embed_at(&self, x: &FieldElement, j: usize, bits: u32) -> Interval {
        let f = Poly::from_ints(&self.min_poly);
        let r = &self.roots[j];
        let root = if r.lo == r.hi { r.clone() } else { refine_root(&f, r.lo.clone(), r.hi.clone(), bits) };
        self.to_poly(x).eval_interval(&root)
    }

    /// Certified signs of all embeddings of a nonzero element, in the order
    /// of increasing defining roots.
    pub fn signs(&self, x: &FieldElement) -> Vec<i32> {
        let base = self.embed(x);
        base.iter()
            .enumerate()
            .map(|(j, iv)| {
                if let Some(s) = iv.sign() {
                    return s;
                }
                let mut bits = 2 * BASE_PRECISION;
                loop {
                    if let Some(s) = self.embed_at(x, j, bits).sign() {
                        return s;
                    }
                    bits *= 2;
                }
            })
            .collect()
    }

    /// Total positivity, by interval arithmetic with an exact fallback: the
    /// characteristic polynomial of an element of a totally real field has
    /// only real roots, which are all positive exactly when its coefficients
    /// strictly alternate in sign.
    pub fn is_totally_positive(&self, x: &FieldElement) -> bool {
        let emb = self.embed(x);
        if emb.iter().all(|iv| iv.lo.is_positive()) {
            return true;
        }
        if emb.iter().any(|iv| !iv.hi.is_positive()) {
            return false;
        }
        let cp = self.charpoly_of(&x.coords);
        let n = cp.coeffs.len() - 1;
        cp.coeffs.iter().enumerate().all(|(i, c)| {
            let want = if (n - i).is_multiple_of(2) { 1 } else { -1 };
            !c.is_zero() && (if c.is_positive() { 1 } else { -1 }) == want
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn zeta9() -> FieldOrder {
        FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap()
    }

    #[test]
    fn total_positivity_examples() {
        let k = zeta9();
        assert!(k.is_totally_positive(&k.one()));
        assert!(!k.is_totally_positive(&k.element_i64(&[-1, 0, 1])));
        assert!(k.is_totally_positive(&k.element_i64(&[2, 1, 0])));
    }

    #[test]
    fn exact_fallback_agrees() {
        let k = zeta9();
        for x in [[2i64, 1, 0], [-1, 0, 1], [1, 1, 1], [3, 0, -1]] {
            let e = k.element_i64(&x);
            let by_signs = k.signs(&e).iter().all(|&s| s > 0);
            assert_eq!(by_signs, k.is_totally_positive(&e));
        }
    }

    #[test]
    fn golden_ratio_basis() {
        // Z[(1+sqrt5)/2] via x^2 - 5 and basis 1, (1+x)/2
        let basis = vec![Poly::one(), Poly::new(vec![rat(1, 2), rat(1, 2)])];
        let k = FieldOrder::with_basis("Q(sqrt5)", &[-5, 0, 1], basis).unwrap();
        assert_eq!(k.discriminant(), &Int::from(5));
        let phi = k.basis_element(1);
        let sq = k.element_mul(&phi, &phi).unwrap();
        assert_eq!(sq, k.element_i64(&[1, 1]));
        assert_eq!(k.norm_trace(&phi).unwrap().0, rat(-1, 1));
        assert!(!k.is_monogenic());
    }
}
