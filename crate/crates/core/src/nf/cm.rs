//! CM quadratic extensions `K = F(sqrt D)` of a totally real field with the
//! order `O_F[w]`, `w^2 = t w - n`, `D = t^2 - 4n`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::field::FieldOrder;
use super::order::{FieldElement, Order};
use crate::arith::{factor_u64, Int, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CMQuadExt {
    base: Arc<FieldOrder>,
    t: i64,
    n: i64,
    order: Order,
}

/// Whether `d` is the discriminant of the maximal order of a quadratic
/// field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    let squarefree = |m: i64| factor_u64(m.unsigned_abs()).iter().all(|&(_, e)| e == 1);
    if d.rem_euclid(4) == 1 {
        squarefree(d)
    } else if d.rem_euclid(4) == 0 {
        let m = d / 4;
        (m.rem_euclid(4) == 2 || m.rem_euclid(4) == 3) && squarefree(m)
    } else {
        false
    }
}

impl CMQuadExt {
    pub fn new(label: &str, base: Arc<FieldOrder>, t: i64, n: i64) -> Result<Self> {
        let d = t * t - 4 * n;
        if d >= 0 {
            return Err(Error::InvalidField(format!("{label}: D = {d} is not totally negative")));
        }
        if !is_fundamental_discriminant(d) {
            return Err(Error::InvalidField(format!("{label}: Z[w] is not maximal (D = {d})")));
        }
        if !Int::from(d).gcd(base.discriminant()).is_one() {
            return Err(Error::InvalidField(format!(
                "{label}: ramification of Q(sqrt {d}) meets that of {}; O_F[w] need not be maximal",
                base.label()
            )));
        }
        let m = base.degree();
        let bt = base.table();
        let mut table = vec![vec![vec![0i64; 2 * m]; 2 * m]; 2 * m];
        for i in 0..2 * m {
            for j in 0..2 * m {
                let (bi, wi) = (i % m, i / m);
                let (bj, wj) = (j % m, j / m);
                let prod = &bt[bi][bj];
                let out = &mut table[i][j];
                match wi + wj {
                    0 => out[..m].copy_from_slice(prod),
                    1 => out[m..].copy_from_slice(prod),
                    _ => {
                        // w^2 = t w - n
                        for k in 0..m {
                            out[k] = -n * prod[k];
                            out[m + k] = t * prod[k];
                        }
                    }
                }
            }
        }
        // conj(e_i) = e_i, conj(e_i w) = t e_i - e_i w
        let conj = (0..2 * m)
            .map(|i| {
                let mut v = vec![0i64; 2 * m];
                if i < m {
                    v[i] = 1;
                } else {
                    v[i - m] = t;
                    v[i] = -1;
                }
                v
            })
            .collect();
        let order = Order::new(label, table, Some(conj))?;
        Ok(CMQuadExt { base, t, n, order })
    }

    pub fn base(&self) -> &Arc<FieldOrder> {
        &self.base
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn label(&self) -> String {
        self.order.label().into()
    }

    /// `D` with `K = F(sqrt D)`.
    pub fn d(&self) -> i64 {
        self.t * self.t - 4 * self.n
    }

    pub fn w_data(&self) -> (i64, i64) {
        (self.t, self.n)
    }

    pub fn base_degree(&self) -> usize {
        self.base.degree()
    }

    pub fn embed_base(&self, x: &FieldElement) -> FieldElement {
        let mut c = x.coords.clone();
        c.extend(core::iter::repeat_n(Rat::zero(), self.base.degree()));
        self.order.element(c)
    }

    /// `(a, b)` with `x = a + b w`.
    pub fn parts(&self, x: &FieldElement) -> (FieldElement, FieldElement) {
        let m = self.base.degree();
        (self.base.element(x.coords[..m].to_vec()), self.base.element(x.coords[m..].to_vec()))
    }

    pub fn from_parts(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut c = a.coords.clone();
        c.extend(b.coords.iter().cloned());
        self.order.element(c)
    }

    pub fn w(&self) -> FieldElement {
        self.from_parts(&self.base.zero(), &self.base.one())
    }

    /// `sqrt D = 2w - t`.
    pub fn sqrt_d(&self) -> FieldElement {
        self.from_parts(&self.base.from_rational(Rat::from_integer(Int::from(-self.t))), &self.base.from_rational(Rat::from_integer(Int::from(2))))
    }

    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        self.order.element(self.order.conj_rat(&x.coords))
    }

    /// `N_{K/F}(a + b w) = a^2 + t a b + n b^2`.
    pub fn relative_norm(&self, x: &FieldElement) -> FieldElement {
        let p = self.order.element_mul(x, &self.conj(x)).expect("same order");
        self.parts(&p).0
    }

    /// Roots of unity in `O_K`: elements with `x conj(x) = 1`.
    pub fn roots_of_unity(&self) -> Result<Vec<FieldElement>> {
        let deg = Rat::from_integer(Int::from(self.order.degree() as u64));
        let mut out: Vec<FieldElement> = self
            .order
            .short_elements(&self.order.unit_ideal(), &deg, 1_000_000)?
            .into_iter()
            .filter(|x| self.relative_norm(x) == self.base.one())
            .collect();
        self.order.sort_canonical(&mut out);
        Ok(out)
    }

    /// Applies a map on base coordinates (e.g. a Galois automorphism of the
    /// base) to both parts.
    pub fn map_parts(&self, x: &FieldElement, f: impl Fn(&FieldElement) -> FieldElement) -> FieldElement {
        let (a, b) = self.parts(x);
        self.from_parts(&f(&a), &f(&b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_quadratic_over_q() {
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let k = CMQuadExt::new("Q(sqrt-11)", q.clone(), 1, 3).unwrap();
        assert_eq!(k.d(), -11);
        assert_eq!(k.order().discriminant(), &Int::from(-11));
        let s = k.sqrt_d();
        let s2 = k.order().element_mul(&s, &s).unwrap();
        assert_eq!(s2, k.embed_base(&q.element_i64(&[-11])));
        assert_eq!(k.conj(&s), k.order().element_neg(&s));
        assert_eq!(k.roots_of_unity().unwrap().len(), 2);
        let g = CMQuadExt::new("Q(i)", q.clone(), 0, 1).unwrap();
        assert_eq!(g.roots_of_unity().unwrap().len(), 4);
        let e = CMQuadExt::new("Q(sqrt-3)", q, 1, 1).unwrap();
        assert_eq!(e.roots_of_unity().unwrap().len(), 6);
    }

    #[test]
    fn compositum_with_zeta9_plus() {
        let f = Arc::new(FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap());
        let k = CMQuadExt::new("K'", f, 1, 3).unwrap();
        // disc = 81^2 * (-11)^3
        assert_eq!(k.order().discriminant(), &(Int::from(6561) * Int::from(-1331)));
        let bad = Arc::new(FieldOrder::monogenic("Q(sqrt5)", &[-1, -1, 1]).unwrap());
        assert!(CMQuadExt::new("bad", bad, 0, 5).is_err());
    }
}
