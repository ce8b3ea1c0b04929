//! Conductors and local constants along a cyclic tower `Q ⊂ F'` of prime
//! degree: conductor-discriminant, degree-zero inductivity of conductors,
//! and inductivity of epsilon factors at the ramified primes.

use alloc::format;
use alloc::vec::Vec;
use num_traits::{Signed, ToPrimitive, Zero};

use super::chars::{frac, rationals, DirichletChar, LocalChar};
use super::epsilon::{epsilon_of, EpsilonValue, MeasureMode};
use crate::arith::{factor_u64, primes_up_to, Int, Rat};
use crate::error::{Error, Result};
use crate::tower::TowerData;

const SPLIT_PRIME_BOUND: u64 = 3000;

fn require_rational_base(t: &TowerData) -> Result<()> {
    if t.base.degree() != 1 {
        return Err(Error::Precondition(format!("{}: tower characters need base Q", t.label)));
    }
    Ok(())
}

/// Ramified rational primes of the top field.
pub fn ramified_primes(t: &TowerData) -> Vec<u64> {
    let d = t.top.discriminant().abs().to_u64().expect("small discriminant");
    factor_u64(d).into_iter().map(|(q, _)| q).collect()
}

/// The characters of `Gal(F'/Q)` as Dirichlet characters modulo `|disc F'|`:
/// those of order dividing `p` that are trivial at every small prime
/// splitting completely in `F'`.
pub fn galois_characters(t: &TowerData) -> Result<Vec<DirichletChar>> {
    require_rational_base(t)?;
    let m = t.top.discriminant().abs().to_u64().ok_or_else(|| Error::LimitExceeded("discriminant".into()))?;
    let n = t.top.degree();
    let mut split = Vec::new();
    for l in primes_up_to(SPLIT_PRIME_BOUND) {
        if m % l != 0 && t.top.primes_above(l)?.len() == n {
            split.push(Int::from(l));
        }
    }
    let chars: Vec<DirichletChar> = DirichletChar::all_mod(m)?
        .into_iter()
        .filter(|c| t.p.is_multiple_of(c.char_order()) && split.iter().all(|l| c.eval_int(l).is_some_and(|v| v.is_zero())))
        .collect();
    if chars.len() as u64 != t.p {
        return Err(Error::Undecided(format!(
            "{}: found {} candidate characters, expected {}",
            t.label,
            chars.len(),
            t.p
        )));
    }
    Ok(chars)
}

fn check_group(chars: &[DirichletChar], p: u64) -> Result<()> {
    if chars.len() < 2 || p < 2 {
        return Err(Error::Precondition("a trivial extension has no conductor-discriminant content".into()));
    }
    if chars.len() as u64 != p {
        return Err(Error::Precondition(format!("expected {p} characters, got {}", chars.len())));
    }
    let prim: Vec<DirichletChar> = chars.iter().map(|c| c.primitive()).collect::<Result<_>>()?;
    let has = |c: &DirichletChar| -> Result<bool> {
        let c = c.primitive()?;
        Ok(prim.contains(&c))
    };
    for a in chars {
        if !has(&a.inverse())? {
            return Err(Error::Precondition("character list is not closed under inversion".into()));
        }
        for b in chars {
            if !has(&a.mul_lifted(b)?)? {
                return Err(Error::Precondition("character list is not closed under products".into()));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct LocalCondDisc {
    pub q: u64,
    /// `n_{P'}(psi')`: valuation of the different of `F'` at the prime above `q`.
    pub n_psi_top: i64,
    /// `sum_chi n_q(chi)`.
    pub sum_char_exponents: i64,
    /// `p * n_q(psi)`; zero over `Q`.
    pub p_n_psi_base: i64,
    /// Conductor exponents over `(O_{F'}/P'^k)^x` of `chi_q o N` for each
    /// `chi`; local class field theory forces zeros.
    pub pulled_back: Vec<u32>,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct CondDiscReport {
    pub disc: Int,
    pub conductors: Vec<Int>,
    pub product: Int,
    pub global_ok: bool,
    pub local: Vec<LocalCondDisc>,
}

impl CondDiscReport {
    pub fn ok(&self) -> bool {
        self.global_ok && self.local.iter().all(|l| l.ok)
    }
}

/// `|disc F'| = prod_chi cond(chi)` and, at each totally ramified prime,
/// `n_{P'}(psi') = sum_chi n_q(chi) + p n_q(psi)`.
pub fn conductor_discriminant(t: &TowerData, chars: &[DirichletChar]) -> Result<CondDiscReport> {
    require_rational_base(t)?;
    check_group(chars, t.p)?;
    let disc = t.top.discriminant().abs();
    let conductors: Vec<Int> = chars.iter().map(|c| c.conductor_norm()).collect();
    let product: Int = conductors.iter().product();
    let global_ok = product == disc;
    let diff = t.top.different()?;
    let mut local = Vec::new();
    for q in ramified_primes(t) {
        let ps = t.top.primes_above(q)?;
        if ps.len() != 1 || ps[0].e as u64 != t.p {
            continue;
        }
        let n_psi_top = t.top.valuation(&ps[0], &diff);
        let sum: i64 = chars.iter().map(|c| c.conductor_exponent_at(q) as i64).sum();
        let mut pulled_back = Vec::new();
        for c in chars {
            let lc = LocalChar::new(t.top.clone(), c.local_at(q)?)?;
            pulled_back.push(lc.conductor);
        }
        let ok = n_psi_top == sum && pulled_back.iter().all(|&x| x == 0);
        local.push(LocalCondDisc { q, n_psi_top, sum_char_exponents: sum, p_n_psi_base: 0, pulled_back, ok });
    }
    Ok(CondDiscReport { disc, conductors, product, global_ok, local })
}

#[derive(Clone, Debug)]
pub struct InductivityRow {
    pub q: u64,
    /// `n_{P'}(phi o N)` computed over `O_{F'}` residue rings.
    pub lhs: i64,
    /// `sum_chi n_q(phi chi) - sum_chi n_q(chi)`.
    pub rhs: i64,
    pub ok: bool,
}

/// `n_{P'}(phi o N) = sum_chi n_q(phi chi) - sum_chi n_q(chi)` at each
/// totally ramified prime of the tower.
pub fn inductivity_degree_zero(phi: &DirichletChar, t: &TowerData, chars: &[DirichletChar]) -> Result<Vec<InductivityRow>> {
    require_rational_base(t)?;
    check_group(chars, t.p)?;
    let mut rows = Vec::new();
    for q in ramified_primes(t) {
        let ps = t.top.primes_above(q)?;
        if ps.len() != 1 {
            continue;
        }
        let lhs = LocalChar::new(t.top.clone(), phi.local_at(q)?)?.conductor as i64;
        let mut rhs = 0i64;
        for c in chars {
            rhs += phi.mul_lifted(c)?.conductor_exponent_at(q) as i64;
            rhs -= c.conductor_exponent_at(q) as i64;
        }
        rows.push(InductivityRow { q, lhs, rhs, ok: lhs == rhs });
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct EpsInductivityRow {
    pub q: u64,
    /// `eps(phi o N, psi', dx_psi')` at the prime of `F'` above `q`.
    pub lhs: EpsilonValue,
    /// `prod_chi eps((phi chi)_q, psi, dx_psi)`.
    pub rhs: EpsilonValue,
    pub abs_squared_equal: bool,
    /// `None` when the formal square roots cannot be compared exactly.
    pub exact_equal: Option<bool>,
}

/// Compares the local constant of `phi o N` at each ramified prime of `F'`
/// with the product over the characters of the tower.
pub fn epsilon_inductivity(phi: &DirichletChar, t: &TowerData, chars: &[DirichletChar]) -> Result<Vec<EpsInductivityRow>> {
    require_rational_base(t)?;
    check_group(chars, t.p)?;
    let q_order = rationals();
    let mut rows = Vec::new();
    for q in ramified_primes(t) {
        let ps = t.top.primes_above(q)?;
        if ps.len() != 1 {
            return Err(Error::Precondition(format!("{}: several primes above {q}", t.label)));
        }
        let top = LocalChar::new(t.top.clone(), phi.local_at(q)?)?;
        let lhs = epsilon_of(&top, MeasureMode::Tamagawa)?;
        let mut rhs = EpsilonValue::one();
        for c in chars {
            let pc = phi.mul_lifted(c)?;
            let lc = LocalChar::new(q_order.clone(), pc.local_at(q)?)?;
            rhs = rhs.mul(&epsilon_of(&lc, MeasureMode::Tamagawa)?)?;
        }
        let abs_squared_equal = match (lhs.abs_squared(), rhs.abs_squared()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        let exact_equal = lhs.exact_eq(&rhs);
        rows.push(EpsInductivityRow { q, lhs, rhs, abs_squared_equal, exact_equal });
    }
    Ok(rows)
}

/// `prod_chi chi(x)` as an exponent in `Q/Z`.
pub fn product_over_group(chars: &[DirichletChar], x: &Int) -> Option<Rat> {
    let mut s = Rat::zero();
    for c in chars {
        s += c.eval_int(x)?;
    }
    Some(frac(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Poly;
    use crate::nf::field::FieldOrder;
    use alloc::sync::Arc;

    fn zeta9() -> TowerData {
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let k = Arc::new(FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap());
        TowerData::new("zeta9", q, k, 3, &Poly::from_i64(&[0]), &Poly::from_i64(&[-2, 0, 1])).unwrap()
    }

    #[test]
    fn zeta9_conductor_discriminant() {
        let t = zeta9();
        let chars = galois_characters(&t).unwrap();
        let r = conductor_discriminant(&t, &chars).unwrap();
        assert_eq!(r.disc, Int::from(81));
        let mut c = r.conductors.clone();
        c.sort();
        assert_eq!(c, [Int::from(1), Int::from(9), Int::from(9)]);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.local[0].n_psi_top, 4);
        assert!(conductor_discriminant(&t, &chars[..1]).is_err());
    }

    #[test]
    fn zeta9_inductivity() {
        let t = zeta9();
        let chars = galois_characters(&t).unwrap();
        for m in [1u64, 7, 9, 4] {
            for phi in DirichletChar::all_mod(m).unwrap() {
                for row in inductivity_degree_zero(&phi, &t, &chars).unwrap() {
                    assert!(row.ok, "m = {m}: {row:?}");
                }
                for row in epsilon_inductivity(&phi, &t, &chars).unwrap() {
                    assert!(row.abs_squared_equal, "m = {m}: {row:?}");
                    assert_eq!(row.exact_equal, Some(true), "m = {m}");
                }
            }
        }
        for x in [2i64, 4, 5, 7, 8] {
            assert_eq!(product_over_group(&chars, &Int::from(x)), Some(Rat::zero()));
        }
    }

    #[test]
    fn zeta7_tower() {
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let k = Arc::new(FieldOrder::monogenic("Q(zeta7)+", &[-1, -2, 1, 1]).unwrap());
        let t = TowerData::new("zeta7", q, k, 3, &Poly::from_i64(&[0]), &Poly::from_i64(&[-2, 0, 1])).unwrap();
        let chars = galois_characters(&t).unwrap();
        let r = conductor_discriminant(&t, &chars).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.local[0].n_psi_top, 2);
        let mut exact = 0;
        for m in [1u64, 3, 7, 9] {
            for phi in DirichletChar::all_mod(m).unwrap() {
                for row in inductivity_degree_zero(&phi, &t, &chars).unwrap() {
                    assert!(row.ok, "m = {m}: {row:?}");
                }
                for row in epsilon_inductivity(&phi, &t, &chars).unwrap() {
                    assert!(row.abs_squared_equal);
                    if row.exact_equal == Some(true) {
                        exact += 1;
                    }
                }
            }
        }
        assert!(exact > 1);
    }
}
