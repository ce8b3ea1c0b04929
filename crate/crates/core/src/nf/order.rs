//! Orders given by a multiplication table on an integral basis whose first
//! element is 1, optionally with a complex conjugation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::matrix::{det_int, det_rat, solve_left_rat, IntMat, RatMat};
use crate::arith::poly::{charpoly, Poly};
use crate::arith::{Int, Rat};
use crate::error::{Error, Result};

/// An element of the fraction field, in coordinates on the integral basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement {
    pub coords: Vec<Rat>,
    pub order_id: u64,
}

impl FieldElement {
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Integer coordinates, if integral.
    pub fn int_coords(&self) -> Option<Vec<Int>> {
        self.is_integral().then(|| self.coords.iter().map(|c| c.numer().clone()).collect())
    }

    pub fn i64_coords(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| if c.is_integer() { c.numer().to_i64() } else { None }).collect()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct Order {
    label: String,
    id: u64,
    n: usize,
    table: Vec<Vec<Vec<i64>>>,
    conj: Option<Vec<Vec<i64>>>,
    traces: Vec<i64>,
    discriminant: Int,
}

fn fnv(label: &str, table: &[Vec<Vec<i64>>]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for b in label.bytes() {
        eat(b);
    }
    for row in table {
        for v in row {
            for x in v {
                for b in x.to_le_bytes() {
                    eat(b);
                }
            }
        }
    }
    h
}

impl Order {
    /// Builds an order from `table[i][j]` = coordinates of `e_i * e_j`.
    /// Requires `e_0 = 1`, commutativity and associativity.
    pub fn new(label: &str, table: Vec<Vec<Vec<i64>>>, conj: Option<Vec<Vec<i64>>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(Error::InvalidField(format!("{label}: malformed multiplication table")));
        }
        for j in 0..n {
            let mut e = vec![0i64; n];
            e[j] = 1;
            if table[0][j] != e {
                return Err(Error::InvalidField(format!("{label}: first basis element is not 1")));
            }
        }
        let mut o = Order {
            label: label.to_string(),
            id: fnv(label, &table),
            n,
            table,
            conj,
            traces: Vec::new(),
            discriminant: Int::zero(),
        };
        for i in 0..n {
            for j in 0..n {
                if o.table[i][j] != o.table[j][i] {
                    return Err(Error::InvalidField(format!("{label}: table not commutative at ({i},{j})")));
                }
                for k in 0..n {
                    let a = o.mul_i64(&o.table[i][j], &unit_vec(n, k));
                    let b = o.mul_i64(&unit_vec(n, i), &o.table[j][k]);
                    if a != b || a.is_none() {
                        return Err(Error::InvalidField(format!(
                            "{label}: table not associative at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        o.traces = (0..n).map(|i| (0..n).map(|j| o.table[i][j][j]).sum()).collect();
        if let Some(c) = &o.conj {
            if c.len() != n || c.iter().any(|v| v.len() != n) {
                return Err(Error::InvalidField(format!("{label}: malformed conjugation")));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = o.apply_conj_i64(&o.table[i][j]);
                    let rhs = o.mul_i64(&c[i], &c[j]);
                    if Some(lhs) != rhs {
                        return Err(Error::InvalidField(format!("{label}: conjugation is not multiplicative")));
                    }
                }
                if o.apply_conj_i64(&c[i]) != unit_vec(n, i) {
                    return Err(Error::InvalidField(format!("{label}: conjugation is not an involution")));
                }
            }
        }
        o.discriminant = det_int(&o.trace_gram());
        if o.discriminant.is_zero() {
            return Err(Error::InvalidField(format!("{label}: degenerate trace form")));
        }
        Ok(o)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn discriminant(&self) -> &Int {
        &self.discriminant
    }

    pub fn table(&self) -> &[Vec<Vec<i64>>] {
        &self.table
    }

    pub fn has_conjugation(&self) -> bool {
        self.conj.is_some()
    }

    pub fn check(&self, x: &FieldElement) -> Result<()> {
        if x.order_id != self.id || x.coords.len() != self.n {
            return Err(Error::OrderMismatch(self.label.clone(), format!("{:#x}", x.order_id)));
        }
        Ok(())
    }

    // ---- constructors ----

    pub fn element(&self, coords: Vec<Rat>) -> FieldElement {
        assert_eq!(coords.len(), self.n);
        FieldElement { coords, order_id: self.id }
    }

    pub fn element_i64(&self, coords: &[i64]) -> FieldElement {
        self.element(coords.iter().map(|&c| Rat::from_integer(Int::from(c))).collect())
    }

    pub fn element_int(&self, coords: &[Int]) -> FieldElement {
        self.element(coords.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    pub fn from_rational(&self, q: Rat) -> FieldElement {
        let mut c = vec![Rat::zero(); self.n];
        c[0] = q;
        self.element(c)
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(Rat::one())
    }

    pub fn zero(&self) -> FieldElement {
        self.from_rational(Rat::zero())
    }

    pub fn basis_element(&self, i: usize) -> FieldElement {
        self.element_i64(&unit_vec(self.n, i))
    }

    // ---- raw kernels ----

    /// Product of integral elements with overflow checking.
    pub fn mul_i64(&self, x: &[i64], y: &[i64]) -> Option<Vec<i64>> {
        let n = self.n;
        let mut acc = vec![0i128; n];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = (a as i128).checked_mul(b as i128)?;
                for (k, &t) in self.table[i][j].iter().enumerate() {
                    if t != 0 {
                        acc[k] = acc[k].checked_add(ab.checked_mul(t as i128)?)?;
                    }
                }
            }
        }
        acc.into_iter().map(|v| i64::try_from(v).ok()).collect()
    }

    pub fn mul_int(&self, x: &[Int], y: &[Int]) -> Vec<Int> {
        let n = self.n;
        let mut acc = vec![Int::zero(); n];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, &t) in self.table[i][j].iter().enumerate() {
                    if t != 0 {
                        acc[k] += &ab * t;
                    }
                }
            }
        }
        acc
    }

    pub fn mul_rat(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        let mut acc = vec![Rat::zero(); n];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, &t) in self.table[i][j].iter().enumerate() {
                    if t != 0 {
                        acc[k] += &ab * Rat::from_integer(Int::from(t));
                    }
                }
            }
        }
        acc
    }

    fn apply_conj_i64(&self, x: &[i64]) -> Vec<i64> {
        match &self.conj {
            None => x.to_vec(),
            Some(c) => {
                let mut out = vec![0i64; self.n];
                for (i, &a) in x.iter().enumerate() {
                    for (k, &t) in c[i].iter().enumerate() {
                        out[k] += a * t;
                    }
                }
                out
            }
        }
    }

    pub fn conj_int(&self, x: &[Int]) -> Vec<Int> {
        match &self.conj {
            None => x.to_vec(),
            Some(c) => {
                let mut out = vec![Int::zero(); self.n];
                for (i, a) in x.iter().enumerate() {
                    for (k, &t) in c[i].iter().enumerate() {
                        if t != 0 {
                            out[k] += a * t;
                        }
                    }
                }
                out
            }
        }
    }

    pub fn conj_rat(&self, x: &[Rat]) -> Vec<Rat> {
        match &self.conj {
            None => x.to_vec(),
            Some(c) => {
                let mut out = vec![Rat::zero(); self.n];
                for (i, a) in x.iter().enumerate() {
                    for (k, &t) in c[i].iter().enumerate() {
                        if t != 0 {
                            out[k] += a * Rat::from_integer(Int::from(t));
                        }
                    }
                }
                out
            }
        }
    }

    /// Matrix whose row `i` holds the coordinates of `x * e_i`, so that the
    /// product with `y` is the row vector `y * M`.
    pub fn mul_matrix(&self, x: &[Rat]) -> RatMat {
        (0..self.n)
            .map(|i| {
                let mut e = vec![Rat::zero(); self.n];
                e[i] = Rat::one();
                self.mul_rat(x, &e)
            })
            .collect()
    }

    pub fn mul_matrix_int(&self, x: &[Int]) -> IntMat {
        (0..self.n)
            .map(|i| {
                let mut e = vec![Int::zero(); self.n];
                e[i] = Int::one();
                self.mul_int(x, &e)
            })
            .collect()
    }

    pub fn trace_of(&self, x: &[Rat]) -> Rat {
        x.iter().zip(&self.traces).map(|(a, &t)| a * Rat::from_integer(Int::from(t))).sum()
    }

    pub fn trace_int(&self, x: &[Int]) -> Int {
        x.iter().zip(&self.traces).map(|(a, &t)| a * t).sum()
    }

    pub fn trace_i64(&self, x: &[i64]) -> i128 {
        x.iter().zip(&self.traces).map(|(&a, &t)| a as i128 * t as i128).sum()
    }

    pub fn norm_of(&self, x: &[Rat]) -> Rat {
        det_rat(&self.mul_matrix(x))
    }

    pub fn norm_int(&self, x: &[Int]) -> Int {
        det_int(&self.mul_matrix_int(x))
    }

    pub fn charpoly_of(&self, x: &[Rat]) -> Poly {
        charpoly(&crate::arith::matrix::transpose(&self.mul_matrix(x)))
    }

    pub fn inverse_of(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        let mut one = vec![Rat::zero(); self.n];
        one[0] = Rat::one();
        solve_left_rat(&self.mul_matrix(x), &one)
    }

    /// Gram matrix of the trace form `Tr(e_i e_j)`.
    pub fn trace_gram(&self) -> IntMat {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| Int::from(self.trace_i64(&self.table[i][j]))).collect())
            .collect()
    }

    /// Gram matrix of the positive definite form `Tr(x conj(y))`; equal to
    /// the trace form when there is no conjugation.
    pub fn t2_gram(&self) -> IntMat {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let cj = self.apply_conj_i64(&unit_vec(self.n, j));
                        let p = self.mul_i64(&unit_vec(self.n, i), &cj).expect("small table");
                        Int::from(self.trace_i64(&p))
                    })
                    .collect()
            })
            .collect()
    }

    /// `Tr(x conj(x))` for an integral element.
    pub fn t2_int(&self, x: &[Int]) -> Int {
        let c = self.conj_int(x);
        self.trace_int(&self.mul_int(x, &c))
    }

    // ---- checked element API ----

    pub fn element_mul(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.element(self.mul_rat(&x.coords, &y.coords)))
    }

    pub fn element_add(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.element(x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect()))
    }

    pub fn element_sub(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.element(x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect()))
    }

    pub fn element_neg(&self, x: &FieldElement) -> FieldElement {
        self.element(x.coords.iter().map(|a| -a).collect())
    }

    pub fn element_scale(&self, x: &FieldElement, q: &Rat) -> FieldElement {
        self.element(x.coords.iter().map(|a| a * q).collect())
    }

    pub fn element_inv(&self, x: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.element(self.inverse_of(&x.coords).ok_or(Error::DivisionByZero)?))
    }

    pub fn element_div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        let yi = self.element_inv(y)?;
        self.element_mul(x, &yi)
    }

    pub fn element_pow(&self, x: &FieldElement, e: i64) -> Result<FieldElement> {
        self.check(x)?;
        let mut base = if e < 0 { self.element_inv(x)? } else { x.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.element_mul(&acc, &base)?;
            }
            base = self.element_mul(&base, &base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    pub fn element_conj(&self, x: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        Ok(self.element(self.conj_rat(&x.coords)))
    }

    /// `(N(x), Tr(x))` as exact rationals.
    pub fn norm_trace(&self, x: &FieldElement) -> Result<(Rat, Rat)> {
        self.check(x)?;
        Ok((self.norm_of(&x.coords), self.trace_of(&x.coords)))
    }

    /// Canonical element order: trace first, then coordinates
    /// lexicographically.
    pub fn canonical_cmp(&self, x: &FieldElement, y: &FieldElement) -> core::cmp::Ordering {
        self.trace_of(&x.coords).cmp(&self.trace_of(&y.coords)).then_with(|| x.coords.cmp(&y.coords))
    }

    pub fn is_unit(&self, x: &FieldElement) -> bool {
        x.is_integral() && self.norm_of(&x.coords).abs().is_one()
    }
}

pub(crate) fn unit_vec(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0i64; n];
    v[i] = 1;
    v
}

/// Multiplication table of `Z[x]/(f)` for a monic integer `f`.
pub fn power_basis_table(f: &[i64]) -> Vec<Vec<Vec<i64>>> {
    let n = f.len() - 1;
    // x^k reduced, for k < 2n - 1
    let mut powers: Vec<Vec<i64>> = Vec::new();
    for k in 0..(2 * n).max(1) {
        if k < n {
            powers.push(unit_vec(n, k));
        } else {
            let prev = powers[k - 1].clone();
            let mut next = vec![0i64; n];
            for i in 0..n - 1 {
                next[i + 1] = prev[i];
            }
            let top = prev[n - 1];
            for i in 0..n {
                next[i] -= top * f[i];
            }
            powers.push(next);
        }
    }
    (0..n).map(|i| (0..n).map(|j| powers[i + j].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn power_basis_cubic() {
        let t = power_basis_table(&[1, -3, 0, 1]);
        let o = Order::new("c9", t, None).unwrap();
        assert_eq!(o.discriminant(), &Int::from(81));
        let c = o.element_i64(&[0, 1, 0]);
        let c2 = o.element_i64(&[0, 0, 1]);
        assert_eq!(o.element_mul(&c, &c2).unwrap(), o.element_i64(&[-1, 3, 0]));
        let (nm, tr) = o.norm_trace(&c).unwrap();
        assert_eq!(tr, rat(0, 1));
        assert_eq!(nm, rat(-1, 1));
    }

    #[test]
    fn mismatched_orders_error() {
        let a = Order::new("a", power_basis_table(&[-1, -1, 1]), None).unwrap();
        let b = Order::new("b", power_basis_table(&[1, -3, 0, 1]), None).unwrap();
        let x = a.one();
        let y = b.one();
        assert!(matches!(a.element_mul(&x, &y), Err(Error::OrderMismatch(..))));
    }
}
