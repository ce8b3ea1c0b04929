//! Enumeration of short and of totally positive lattice elements.

use alloc::vec::Vec;
use num_traits::Signed;

use super::field::FieldOrder;
use super::ideal::IdealLattice;
use super::order::{FieldElement, Order};
use crate::arith::lattice::{short_vectors, transform_gram};
use crate::arith::{floor_rat, Int, Rat};
use crate::error::{Error, Result};

/// Node budget for enumerations that have no caller-supplied cap.
pub const DEFAULT_NODE_CAP: usize = 200_000_000;

impl Order {
    /// Nonzero elements `x` of `l` with `Tr(x conj(x)) <= bound`.
    pub fn short_elements(&self, l: &IdealLattice, t2_bound: &Rat, cap: usize) -> Result<Vec<FieldElement>> {
        if t2_bound.is_negative() {
            return Ok(Vec::new());
        }
        let g = transform_gram(&l.hnf, &self.t2_gram());
        let d2 = Rat::from_integer(&l.denom * &l.denom);
        let b = floor_rat(&(t2_bound * d2));
        let vs = short_vectors(&g, &b, cap)
            .map_err(|_| Error::LimitExceeded(alloc::format!("lattice enumeration beyond {cap} nodes")))?;
        let n = self.degree();
        Ok(vs
            .into_iter()
            .map(|y| {
                let coords: Vec<Rat> = (0..n)
                    .map(|c| {
                        let s: Int = y.iter().zip(&l.hnf).map(|(a, row)| a * &row[c]).sum();
                        Rat::new(s, l.denom.clone())
                    })
                    .collect();
                self.element(coords)
            })
            .collect())
    }

    pub fn sort_canonical(&self, v: &mut [FieldElement]) {
        v.sort_by(|a, b| self.canonical_cmp(a, b));
    }
}

/// All totally positive `x` in `l` with `Tr(x) <= trace_bound`, sorted by
/// trace and then coordinates. Uses `T2(x) <= Tr(x)^2` for totally positive
/// `x` to reduce to a short-vector search.
pub fn enumerate_totally_positive(k: &FieldOrder, l: &IdealLattice, trace_bound: &Rat) -> Result<Vec<FieldElement>> {
    if !trace_bound.is_positive() {
        return Ok(Vec::new());
    }
    let b2 = trace_bound * trace_bound;
    let mut out: Vec<FieldElement> = k
        .short_elements(l, &b2, DEFAULT_NODE_CAP)?
        .into_iter()
        .filter(|x| {
            let t = k.trace_of(&x.coords);
            t.is_positive() && &t <= trace_bound && !x.is_zero() && k.is_totally_positive(x)
        })
        .collect();
    k.sort_canonical(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use alloc::vec;

    #[test]
    fn integers_up_to_three() {
        let q = FieldOrder::monogenic("Q", &[0, 1]).unwrap();
        let v = enumerate_totally_positive(&q, &q.unit_ideal(), &rat(3, 1)).unwrap();
        assert_eq!(v, vec![q.element_i64(&[1]), q.element_i64(&[2]), q.element_i64(&[3])]);
        assert!(enumerate_totally_positive(&q, &q.unit_ideal(), &rat(0, 1)).unwrap().is_empty());
    }

    #[test]
    fn zeta9_small_traces() {
        let k = FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap();
        let v = enumerate_totally_positive(&k, &k.unit_ideal(), &rat(3, 1)).unwrap();
        assert_eq!(v, vec![k.one()]);
    }
}
