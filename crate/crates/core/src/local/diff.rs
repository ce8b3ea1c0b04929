//! Valuations of `delta^p` against `N_{K'/K}(delta')` at the primes above a
//! rational prime, for the CM fields `K = F K_0` and `K' = F' K_0` of a tower.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::nf::cm::CMQuadExt;
use crate::nf::order::FieldElement;
use crate::tower::TowerData;

#[derive(Clone, Debug)]
pub struct DiffValuation {
    /// Norm of the prime of `K`.
    pub prime_norm: u64,
    pub ord_delta_p: i64,
    pub ord_norm_delta_prime: i64,
    pub difference: i64,
}

#[derive(Clone, Debug)]
pub struct DiffReport {
    pub ell: u64,
    pub rows: Vec<DiffValuation>,
}

impl DiffReport {
    pub fn any_nonzero(&self) -> bool {
        self.rows.iter().any(|r| r.difference != 0)
    }
}

fn check_delta(cm: &CMQuadExt, d: &FieldElement, ell: u64, what: &str) -> Result<()> {
    let o = cm.order();
    if d.is_zero() {
        return Err(Error::Precondition(format!("{what} is zero")));
    }
    if cm.conj(d) != o.element_neg(d) {
        return Err(Error::Precondition(format!("{what} is not purely imaginary")));
    }
    let diff = o.different()?;
    for p in o.primes_above(ell)? {
        if o.element_valuation(&p, d)? != o.valuation(&p, &diff) {
            return Err(Error::Precondition(format!(
                "{what} does not have the valuation of the different at a prime above {ell}"
            )));
        }
    }
    Ok(())
}

/// `N_{K'/K}` for `K' = F'(w)` over `K = F(w)`, through the Galois action on
/// the `F'`-parts.
pub fn relative_norm_down(cm: &CMQuadExt, cm_top: &CMQuadExt, t: &TowerData, x: &FieldElement) -> Result<FieldElement> {
    let o = cm_top.order();
    let mut acc = o.one();
    for i in 0..t.p as i64 {
        let y = cm_top.map_parts(x, |z| t.galois(i, z));
        acc = o.element_mul(&acc, &y)?;
    }
    let (a, b) = cm_top.parts(&acc);
    let (a, b) = match (t.descend(&a), t.descend(&b)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::CorruptTower("relative norm does not descend".into())),
    };
    Ok(cm.from_parts(&a, &b))
}

/// `ord_P(delta^p)` and `ord_P(N_{K'/K} delta')` at each prime `P` of `K`
/// above `ell`. Both `delta` and `delta'` must be purely imaginary with the
/// valuation of the respective absolute different above `ell`.
pub fn diff_valuations(
    cm: &CMQuadExt,
    cm_top: &CMQuadExt,
    delta: &FieldElement,
    delta_top: &FieldElement,
    t: &TowerData,
    ell: u64,
) -> Result<DiffReport> {
    if cm.base().id() != t.base.id() || cm_top.base().id() != t.top.id() || cm.w_data() != cm_top.w_data() {
        return Err(Error::Precondition("CM data does not match the tower".into()));
    }
    check_delta(cm, delta, ell, "delta")?;
    check_delta(cm_top, delta_top, ell, "delta'")?;
    let o = cm.order();
    let dp = o.element_pow(delta, t.p as i64)?;
    let nd = relative_norm_down(cm, cm_top, t, delta_top)?;
    let mut rows = Vec::new();
    for p in o.primes_above(ell)? {
        let a = o.element_valuation(&p, &dp)?;
        let b = o.element_valuation(&p, &nd)?;
        rows.push(DiffValuation { prime_norm: p.norm(), ord_delta_p: a, ord_norm_delta_prime: b, difference: b - a });
    }
    Ok(DiffReport { ell, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Poly;
    use crate::nf::field::FieldOrder;
    use alloc::sync::Arc;

    #[test]
    fn ramified_prime_shows_a_gap() {
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let f = Arc::new(FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap());
        let t = TowerData::new("zeta9", q.clone(), f.clone(), 3, &Poly::from_i64(&[0]), &Poly::from_i64(&[-2, 0, 1])).unwrap();
        let k = CMQuadExt::new("K", q, 1, 3).unwrap();
        let kp = CMQuadExt::new("K'", f.clone(), 1, 3).unwrap();
        let delta = k.sqrt_d();
        // sqrt(-11) (2 - x)^4 carries the different of F' at 3
        let pi = kp.embed_base(&f.element_i64(&[2, -1, 0]));
        let pi4 = kp.order().element_pow(&pi, 4).unwrap();
        let dtop = kp.order().element_mul(&kp.sqrt_d(), &pi4).unwrap();
        let r = diff_valuations(&k, &kp, &delta, &dtop, &t, 3).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|x| x.difference == 4));
        let r5 = diff_valuations(&k, &kp, &delta, &dtop, &t, 5).unwrap();
        assert!(!r5.any_nonzero());
        let bad = kp.order().one();
        assert!(diff_valuations(&k, &kp, &delta, &bad, &t, 3).is_err());
    }
}
