//! Fractional ideals as canonical Hermite-form lattices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::order::{FieldElement, Order};
use crate::arith::matrix::{hnf, inverse_rat, to_rat, transpose, IntMat};
use crate::arith::{common_denominator, Int, Rat};
use crate::error::{Error, Result};

/// `(1/denom) * rowspan(hnf)`, with `hnf` upper triangular with positive
/// diagonal, reduced above the diagonal, and `gcd(content, denom) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdealLattice {
    pub hnf: IntMat,
    pub denom: Int,
    pub order_id: u64,
}

impl fmt::Display for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.denom.is_one() {
            write!(f, "1/{} * ", self.denom)?;
        }
        write!(f, "<")?;
        for (i, r) in self.hnf.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, ">")
    }
}

impl IdealLattice {
    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    /// Basis vectors as rational coordinate rows.
    pub fn basis(&self) -> Vec<Vec<Rat>> {
        self.hnf
            .iter()
            .map(|r| r.iter().map(|x| Rat::new(x.clone(), self.denom.clone())).collect())
            .collect()
    }

    /// Product of the diagonal; for an integral ideal this is `[O : I]`.
    pub fn index(&self) -> Int {
        self.hnf.iter().enumerate().map(|(i, r)| r[i].clone()).product()
    }

    /// The positive generator of `I ∩ Z` for an integral ideal.
    pub fn min_integer(&self) -> Int {
        let n = self.hnf.len();
        let mut k = Int::one();
        let mut target = vec![Int::zero(); n];
        target[0] = Int::one();
        // e_0 = sum y_i h_i / denom; k e_0 lies in the lattice iff k y is integral
        let mut y = vec![Rat::zero(); n];
        let mut rest: Vec<Rat> = target.iter().map(|x| Rat::from_integer(x * &self.denom)).collect();
        for i in 0..n {
            let yi = &rest[i] / Rat::from_integer(self.hnf[i][i].clone());
            for j in i..n {
                let d = &yi * Rat::from_integer(self.hnf[i][j].clone());
                rest[j] -= d;
            }
            y[i] = yi;
        }
        for yi in &y {
            k = k.lcm(yi.denom());
        }
        k
    }
}

impl Order {
    pub fn ideal_from_rows(&self, rows: &[Vec<Rat>]) -> Result<IdealLattice> {
        let n = self.degree();
        let flat: Vec<Rat> = rows.iter().flatten().cloned().collect();
        let d = common_denominator(&flat);
        let ints: IntMat = rows
            .iter()
            .map(|r| r.iter().map(|x| (x * Rat::from_integer(d.clone())).to_integer()).collect())
            .collect();
        let h = hnf(&ints);
        if h.len() != n {
            return Err(Error::ZeroIdeal);
        }
        Ok(self.canonical(h, d))
    }

    fn canonical(&self, mut h: IntMat, mut d: Int) -> IdealLattice {
        let mut g = d.clone();
        for r in &h {
            for x in r {
                g = g.gcd(x);
            }
        }
        if !g.is_one() {
            for r in h.iter_mut() {
                for x in r.iter_mut() {
                    *x = &*x / &g;
                }
            }
            d /= &g;
        }
        IdealLattice { hnf: h, denom: d, order_id: self.id() }
    }

    fn check_ideal(&self, i: &IdealLattice) -> Result<()> {
        if i.order_id != self.id() {
            return Err(Error::OrderMismatch(self.label().into(), alloc::format!("{:#x}", i.order_id)));
        }
        Ok(())
    }

    pub fn unit_ideal(&self) -> IdealLattice {
        let n = self.degree();
        self.canonical(crate::arith::matrix::identity_int(n), Int::one())
    }

    /// The ideal generated (as an `O`-module) by the given elements.
    pub fn ideal_generated(&self, gens: &[FieldElement]) -> Result<IdealLattice> {
        let n = self.degree();
        let mut rows = Vec::new();
        for g in gens {
            self.check(g)?;
            for i in 0..n {
                let mut e = vec![Rat::zero(); n];
                e[i] = Rat::one();
                rows.push(self.mul_rat(&g.coords, &e));
            }
        }
        if rows.iter().all(|r| r.iter().all(|x| x.is_zero())) {
            return Err(Error::ZeroIdeal);
        }
        self.ideal_from_rows(&rows)
    }

    pub fn principal_ideal(&self, x: &FieldElement) -> Result<IdealLattice> {
        self.ideal_generated(core::slice::from_ref(x))
    }

    pub fn rational_ideal(&self, q: &Rat) -> Result<IdealLattice> {
        self.principal_ideal(&self.from_rational(q.clone()))
    }

    pub fn ideal_mul(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        self.check_ideal(a)?;
        self.check_ideal(b)?;
        let mut rows = Vec::new();
        for r in &a.hnf {
            for s in &b.hnf {
                rows.push(self.mul_int(r, s));
            }
        }
        let h = hnf(&rows);
        Ok(self.canonical(h, &a.denom * &b.denom))
    }

    pub fn ideal_pow(&self, a: &IdealLattice, e: i64) -> Result<IdealLattice> {
        let mut base = if e < 0 { self.ideal_inverse(a)? } else { a.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.unit_ideal();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.ideal_mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.ideal_mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn ideal_add(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        self.check_ideal(a)?;
        self.check_ideal(b)?;
        let mut rows = a.basis();
        rows.extend(b.basis());
        self.ideal_from_rows(&rows)
    }

    pub fn ideal_scale(&self, a: &IdealLattice, q: &Rat) -> Result<IdealLattice> {
        if q.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let rows: Vec<Vec<Rat>> = a.basis().into_iter().map(|r| r.into_iter().map(|x| x * q).collect()).collect();
        self.ideal_from_rows(&rows)
    }

    /// Trace dual `{x : Tr(x L) ⊆ Z}` of a full-rank lattice.
    pub fn trace_dual(&self, a: &IdealLattice) -> Result<IdealLattice> {
        let b = a.basis();
        let t = to_rat(&self.trace_gram());
        // rows D with D * T * B^T = I
        let bt = transpose(&b);
        let n = self.degree();
        let m: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &t[i][k] * &bt[k][j]).sum()).collect())
            .collect();
        let d = inverse_rat(&m).ok_or(Error::ZeroIdeal)?;
        self.ideal_from_rows(&d)
    }

    pub fn ideal_inverse(&self, a: &IdealLattice) -> Result<IdealLattice> {
        self.check_ideal(a)?;
        let dual_o = self.trace_dual(&self.unit_ideal())?;
        let p = self.ideal_mul(a, &dual_o)?;
        self.trace_dual(&p)
    }

    pub fn ideal_div(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        let bi = self.ideal_inverse(b)?;
        self.ideal_mul(a, &bi)
    }

    /// The different: inverse of the trace dual of the order.
    pub fn different(&self) -> Result<IdealLattice> {
        let dual_o = self.trace_dual(&self.unit_ideal())?;
        self.ideal_inverse(&dual_o)
    }

    pub fn ideal_norm(&self, a: &IdealLattice) -> Rat {
        let n = self.degree() as u32;
        Rat::new(a.index(), num_traits::pow::pow(a.denom.clone(), n as usize))
    }

    /// Integer coordinates of `x` on the ideal basis, if `x` lies in it.
    pub fn ideal_coords(&self, a: &IdealLattice, x: &[Rat]) -> Option<Vec<Int>> {
        let n = self.degree();
        let mut rest: Vec<Rat> = x.iter().map(|c| c * Rat::from_integer(a.denom.clone())).collect();
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let yi = &rest[i] / Rat::from_integer(a.hnf[i][i].clone());
            if !yi.is_integer() {
                return None;
            }
            for j in i..n {
                let d = &yi * Rat::from_integer(a.hnf[i][j].clone());
                rest[j] -= d;
            }
            y.push(yi.to_integer());
        }
        Some(y)
    }

    pub fn ideal_contains(&self, a: &IdealLattice, x: &FieldElement) -> Result<bool> {
        self.check_ideal(a)?;
        self.check(x)?;
        Ok(self.ideal_coords(a, &x.coords).is_some())
    }

    /// `b ⊆ a`.
    pub fn ideal_contains_ideal(&self, a: &IdealLattice, b: &IdealLattice) -> bool {
        b.basis().iter().all(|r| self.ideal_coords(a, r).is_some())
    }

    pub fn ideal_intersect(&self, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
        let da = self.trace_dual(a)?;
        let db = self.trace_dual(b)?;
        let s = self.ideal_add(&da, &db)?;
        self.trace_dual(&s)
    }

    /// Reduces integer coordinates modulo an integral ideal to the canonical
    /// representative with `0 <= v_i < hnf[i][i]`.
    pub fn reduce_mod(&self, m: &IdealLattice, v: &mut [Int]) {
        for i in 0..v.len() {
            let q = v[i].div_floor(&m.hnf[i][i]);
            if !q.is_zero() {
                for j in i..v.len() {
                    v[j] -= &q * &m.hnf[i][j];
                }
            }
        }
    }

    /// Every element of a fractional ideal times a suitable integer is
    /// integral; returns `(d, d * a)` with `d` the denominator.
    pub fn integral_multiple(&self, a: &IdealLattice) -> (Int, IdealLattice) {
        (a.denom.clone(), IdealLattice { hnf: a.hnf.clone(), denom: Int::one(), order_id: a.order_id })
    }

    /// Verifies closure under multiplication by every basis element.
    pub fn is_module(&self, a: &IdealLattice) -> bool {
        let n = self.degree();
        a.basis().iter().all(|r| {
            (0..n).all(|i| {
                let mut e = vec![Rat::zero(); n];
                e[i] = Rat::one();
                self.ideal_coords(a, &self.mul_rat(r, &e)).is_some()
            })
        })
    }

    /// `true` when the integral ideals are coprime.
    pub fn coprime(&self, a: &IdealLattice, b: &IdealLattice) -> Result<bool> {
        Ok(self.ideal_add(a, b)? == self.unit_ideal())
    }

    /// Absolute value of the norm of an ideal, as an integer when integral.
    pub fn ideal_norm_int(&self, a: &IdealLattice) -> Option<Int> {
        let q = self.ideal_norm(a);
        q.is_integer().then(|| q.to_integer().abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::nf::order::power_basis_table;

    #[test]
    fn rational_ideals() {
        let z = Order::new("Q", vec![vec![vec![1]]], None).unwrap();
        let a = z.rational_ideal(&rat(2, 1)).unwrap();
        let b = z.rational_ideal(&rat(3, 1)).unwrap();
        assert_eq!(z.ideal_mul(&a, &b).unwrap(), z.rational_ideal(&rat(6, 1)).unwrap());
        assert!(z.ideal_contains(&a, &z.from_rational(rat(6, 1))).unwrap());
        assert_eq!(z.different().unwrap(), z.unit_ideal());
        assert_eq!(z.ideal_inverse(&a).unwrap(), z.rational_ideal(&rat(1, 2)).unwrap());
    }

    #[test]
    fn sqrt5_squared() {
        let o = Order::new("Q(sqrt5)", power_basis_table(&[-1, -1, 1]), None).unwrap();
        // sqrt5 = 2 phi - 1
        let s = o.element_i64(&[-1, 2]);
        let i = o.principal_ideal(&s).unwrap();
        let sq = o.ideal_mul(&i, &i).unwrap();
        assert_eq!(sq, o.rational_ideal(&rat(5, 1)).unwrap());
        assert_eq!(o.ideal_norm(&o.different().unwrap()), rat(5, 1));
        assert_eq!(o.different().unwrap(), i);
    }

    #[test]
    fn zeta9_different() {
        let o = Order::new("c9", power_basis_table(&[1, -3, 0, 1]), None).unwrap();
        let d = o.different().unwrap();
        assert_eq!(o.ideal_norm(&d), rat(81, 1));
        // f'(c) = 3c^2 - 3
        let fp = o.principal_ideal(&o.element_i64(&[-3, 0, 3])).unwrap();
        assert_eq!(d, fp);
        let inv = o.ideal_inverse(&d).unwrap();
        assert_eq!(o.ideal_mul(&d, &inv).unwrap(), o.unit_ideal());
    }
}
