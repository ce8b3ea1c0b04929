//! Fourier coefficients of Hilbert Eisenstein series attached to a locally
//! constant function, at a cusp `(a, b)`:
//!
//! `a(xi) = N(a) * sum_{(a, b)} phi(a, b) sgn N(a) N(a)^(k-1)`
//!
//! over unit orbits of factorizations `xi = a b` with `a` in `a`, `b` in `b`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{ceil_root, divisors_u64, Int, Rat};
use crate::error::{Error, Result};
use crate::locfun::LocConstFn;
use crate::nf::enumerate::{enumerate_totally_positive, DEFAULT_NODE_CAP};
use crate::nf::units::{coverage_constant, UnitGroupData};
use crate::nf::{FieldElement, FieldOrder, IdealLattice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionMeta {
    pub weight: u32,
    pub level: String,
    pub phi: String,
}

/// A truncated q-expansion: exact coefficients at totally positive
/// exponents of `exponent_ideal` with trace at most `trace_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub field: String,
    pub order_id: u64,
    pub degree: usize,
    pub exponent_ideal: IdealLattice,
    pub coeffs: BTreeMap<FieldElement, Int>,
    pub trace_bound: Rat,
    pub meta: ExpansionMeta,
}

impl QExpansion {
    pub fn empty(k: &FieldOrder, exponent_ideal: IdealLattice, trace_bound: Rat, meta: ExpansionMeta) -> Self {
        QExpansion {
            field: k.label().into(),
            order_id: k.id(),
            degree: k.degree(),
            exponent_ideal,
            coeffs: BTreeMap::new(),
            trace_bound,
            meta,
        }
    }

    pub fn coefficient(&self, xi: &FieldElement) -> Int {
        self.coeffs.get(xi).cloned().unwrap_or_default()
    }

    /// Adds `c` at `xi`, dropping the entry if it becomes zero.
    pub fn add_term(&mut self, xi: FieldElement, c: &Int) {
        let v = self.coefficient(&xi) + c;
        if v.is_zero() {
            self.coeffs.remove(&xi);
        } else {
            self.coeffs.insert(xi, v);
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Orbits of factorizations `xi = a b` under `(a, b) -> (e^-1 a, e b)`.
///
/// Candidates for `a` are enumerated once per norm range: for every `a` of
/// norm `t` some associate has `T2 <= C t^(2/n)` with
/// `C = sum_i prod_j max(|s_i(e_j)|, |s_i(e_j)|^-1)`, which follows by
/// reducing the log vector of `a` into the centred fundamental
/// parallelotope of the unit lattice. Associates are then identified by
/// their principal ideal, so the orbits are those of the full unit group.
#[derive(Clone, Debug)]
pub struct OrbitEngine {
    k: Arc<FieldOrder>,
    a: IdealLattice,
    b: IdealLattice,
    /// `a_int = da * a` and `b_int = db * b` are integral.
    da: Int,
    a_int: IdealLattice,
    db: Int,
    b_int: IdealLattice,
    norm_a_int: Int,
    norm_b_int: Int,
    cover: Rat,
    covered: Int,
    /// Orbit representatives in `a_int`, by absolute norm.
    buckets: BTreeMap<Int, Vec<FieldElement>>,
}

impl OrbitEngine {
    pub fn new(k: Arc<FieldOrder>, a: &IdealLattice, b: &IdealLattice, units: &UnitGroupData) -> Result<Self> {
        let n = k.degree();
        if units.rank() + 1 < n {
            return Err(Error::InsufficientUnits(format!(
                "{}: {} fundamental units for rank {}",
                k.label(),
                units.rank(),
                n - 1
            )));
        }
        if a.order_id != k.id() || b.order_id != k.id() {
            return Err(Error::OrderMismatch(k.label().into(), "ideal".into()));
        }
        let (da, a_int) = k.integral_multiple(a);
        let (db, b_int) = k.integral_multiple(b);
        let norm_a_int = k.ideal_norm(&a_int).to_integer();
        let norm_b_int = k.ideal_norm(&b_int).to_integer();
        let cover = coverage_constant(&k, units);
        Ok(OrbitEngine {
            k,
            a: a.clone(),
            b: b.clone(),
            da,
            a_int,
            db,
            b_int,
            norm_a_int,
            norm_b_int,
            cover,
            covered: Int::zero(),
            buckets: BTreeMap::new(),
        })
    }

    pub fn field(&self) -> &Arc<FieldOrder> {
        &self.k
    }

    fn rep_cmp(&self, x: &FieldElement, y: &FieldElement) -> Ordering {
        let k = &self.k;
        let tx = k.t2_int(&x.int_coords().expect("integral"));
        let ty = k.t2_int(&y.int_coords().expect("integral"));
        tx.cmp(&ty)
            .then_with(|| k.trace_of(&y.coords).cmp(&k.trace_of(&x.coords)))
            .then_with(|| x.coords.cmp(&y.coords))
    }

    /// Makes sure all orbit representatives of norm up to `max_norm` are known.
    pub fn ensure(&mut self, max_norm: &Int) -> Result<()> {
        if *max_norm <= self.covered {
            return Ok(());
        }
        let target = core::cmp::max(max_norm.clone(), &self.covered * Int::from(2));
        let n = self.k.degree() as u32;
        let bound = &self.cover * Rat::from_integer(ceil_root(&(&target * &target), n));
        let cands = self.k.short_elements(&self.a_int, &bound, DEFAULT_NODE_CAP)?;
        let mut best: BTreeMap<IdealLattice, FieldElement> = BTreeMap::new();
        for x in cands {
            let t = self.k.norm_of(&x.coords).to_integer().abs();
            if t > target {
                continue;
            }
            let id = self.k.principal_ideal(&x)?;
            match best.get(&id) {
                Some(cur) if self.rep_cmp(cur, &x) != Ordering::Greater => {}
                _ => {
                    best.insert(id, x);
                }
            }
        }
        let mut buckets: BTreeMap<Int, Vec<FieldElement>> = BTreeMap::new();
        for (_, x) in best {
            let t = self.k.norm_of(&x.coords).to_integer().abs();
            buckets.entry(t).or_default().push(x);
        }
        for v in buckets.values_mut() {
            v.sort_by(|x, y| self.rep_cmp(x, y));
        }
        self.buckets = buckets;
        self.covered = target;
        Ok(())
    }

    /// Largest candidate norm needed for `xi`.
    fn needed_norm(&self, xi: &FieldElement) -> Result<(Int, Int)> {
        let k = &self.k;
        let scale = Rat::from_integer(&self.da * &self.db);
        let eta = k.element_scale(xi, &scale);
        let ne = k.norm_of(&eta.coords).abs();
        let denom = &self.norm_a_int * &self.norm_b_int;
        if !ne.is_integer() || !(ne.to_integer() % &denom).is_zero() {
            return Err(Error::Precondition(format!("{xi} is not in the product of the cusp ideals")));
        }
        let m = ne.to_integer() / denom;
        Ok((&self.norm_a_int * &m, m))
    }

    /// One representative `(a, b)` per orbit, ordered by the representative of `a`.
    pub fn orbits(&mut self, xi: &FieldElement) -> Result<Vec<(FieldElement, FieldElement)>> {
        let k = self.k.clone();
        k.check(xi)?;
        if xi.is_zero() || !k.is_totally_positive(xi) {
            return Err(Error::Precondition(format!("{xi} is not totally positive")));
        }
        let ab = k.ideal_mul(&self.a, &self.b)?;
        if !k.ideal_contains(&ab, xi)? {
            return Err(Error::Precondition(format!("{xi} is not in the product of the cusp ideals")));
        }
        let (need, m) = self.needed_norm(xi)?;
        self.ensure(&need)?;
        let eta = k.element_scale(xi, &Rat::from_integer(&self.da * &self.db));
        let mu = m.to_u64().ok_or_else(|| Error::LimitExceeded("norm too large".into()))?;
        let mut out = Vec::new();
        for t in divisors_u64(mu) {
            let key = &self.norm_a_int * Int::from(t);
            let Some(cands) = self.buckets.get(&key) else { continue };
            for alpha in cands {
                let beta = k.element_div(&eta, alpha)?;
                if k.ideal_contains(&self.b_int, &beta)? {
                    let a = k.element_scale(alpha, &Rat::from_integer(self.da.clone()).recip());
                    let b = k.element_div(xi, &a)?;
                    out.push((a, b));
                }
            }
        }
        out.sort_by(|x, y| {
            let sx = k.element_scale(&x.0, &Rat::from_integer(self.da.clone()));
            let sy = k.element_scale(&y.0, &Rat::from_integer(self.da.clone()));
            let nx = k.norm_of(&sx.coords).abs();
            let ny = k.norm_of(&sy.coords).abs();
            nx.cmp(&ny).then_with(|| self.rep_cmp(&sx, &sy))
        });
        Ok(out)
    }

    /// The summands `phi(a, b) sgn N(a) N(a)^(k-1)` per orbit.
    pub fn contributions(&mut self, xi: &FieldElement, phi: &LocConstFn, k: u32) -> Result<Vec<(FieldElement, FieldElement, Rat)>> {
        check_weight(phi, k)?;
        let f = self.k.clone();
        if phi.order.id() != f.id() {
            return Err(Error::OrderMismatch(phi.order.label().into(), f.label().into()));
        }
        let mut out = Vec::new();
        for (a, b) in self.orbits(xi)? {
            let v = phi.eval(&a, &b)?;
            if v == 0 {
                continue;
            }
            let na = f.norm_of(&a.coords);
            let sgn = if na.is_negative() { -1 } else { 1 };
            let mut s = Rat::from_integer(Int::from(v * sgn));
            s *= num_traits::pow::pow(na, (k - 1) as usize);
            out.push((a, b, s));
        }
        Ok(out)
    }

    pub fn coefficient(&mut self, xi: &FieldElement, phi: &LocConstFn, k: u32) -> Result<Int> {
        let mut total = Rat::zero();
        for (_, _, s) in self.contributions(xi, phi, k)? {
            total += s;
        }
        total *= self.k.ideal_norm(&self.a);
        if !total.is_integer() {
            return Err(Error::Precondition("coefficient scaling by N(a) is not integral".into()));
        }
        Ok(total.to_integer())
    }
}

fn check_weight(phi: &LocConstFn, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("weight must be at least 1".into()));
    }
    if phi.weight % 2 != k % 2 {
        return Err(Error::Precondition(format!(
            "{} has weight {} which does not match k = {k} mod 2",
            phi.label, phi.weight
        )));
    }
    if k == 1 && !phi.vanishes_at_second_zero() {
        return Err(Error::Precondition(format!("k = 1 needs phi(a, 0) = 0, which fails for {}", phi.label)));
    }
    Ok(())
}

pub fn factorization_orbits(
    k: Arc<FieldOrder>,
    xi: &FieldElement,
    a: &IdealLattice,
    b: &IdealLattice,
    units: &UnitGroupData,
) -> Result<Vec<(FieldElement, FieldElement)>> {
    OrbitEngine::new(k, a, b, units)?.orbits(xi)
}

pub fn coefficient(
    k: Arc<FieldOrder>,
    xi: &FieldElement,
    a: &IdealLattice,
    b: &IdealLattice,
    phi: &LocConstFn,
    weight: u32,
    units: &UnitGroupData,
) -> Result<Int> {
    OrbitEngine::new(k, a, b, units)?.coefficient(xi, phi, weight)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpandOptions {
    /// Skip the unit-support requirement. The constant term is omitted
    /// either way; this only serves classical sanity checks.
    pub sanity: bool,
}

/// All coefficients at totally positive `xi` in `a b` with `Tr(xi) <= bound`.
pub fn expand(
    k: Arc<FieldOrder>,
    a: &IdealLattice,
    b: &IdealLattice,
    phi: &LocConstFn,
    weight: u32,
    trace_bound: &Rat,
    units: &UnitGroupData,
    opts: ExpandOptions,
) -> Result<QExpansion> {
    if !opts.sanity && !(phi.flags.first_units || phi.flags.second_units) {
        return Err(Error::Precondition(format!(
            "{} is not supported on units; its constant term is out of scope",
            phi.label
        )));
    }
    check_weight(phi, weight)?;
    let ab = k.ideal_mul(a, b)?;
    let meta = ExpansionMeta { weight, level: format!("{}", phi.level.modulus), phi: phi.label.clone() };
    let mut e = QExpansion::empty(&k, ab.clone(), trace_bound.clone(), meta);
    if phi.is_zero() {
        return Ok(e);
    }
    let xs = enumerate_totally_positive(&k, &ab, trace_bound)?;
    let mut eng = OrbitEngine::new(k.clone(), a, b, units)?;
    let mut need = Int::zero();
    for xi in &xs {
        let (t, _) = eng.needed_norm(xi)?;
        if t > need {
            need = t;
        }
    }
    eng.ensure(&need)?;
    for xi in xs {
        let c = eng.coefficient(&xi, phi, weight)?;
        if !c.is_zero() {
            e.coeffs.insert(xi, c);
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::locfun::{Level, RawFn, SupportFlags};
    use crate::nf::residue::ResidueRing;
    use crate::nf::units::{search_units, unit_group};
    use alloc::vec;

    fn q() -> (Arc<FieldOrder>, UnitGroupData) {
        let k = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let u = unit_group(&k, None, 1).unwrap();
        (k, u)
    }

    fn one(k: &Arc<FieldOrder>, u: &UnitGroupData) -> LocConstFn {
        let r = Arc::new(ResidueRing::new(k, &k.unit_ideal()).unwrap());
        let lv = Level::new(k, 2, 0, k.unit_ideal()).unwrap();
        RawFn::constant(k.clone(), r, 1).build(u, 0, SupportFlags::default(), "one", lv).unwrap()
    }

    #[test]
    fn orbits_over_q() {
        let (k, u) = q();
        let z = k.unit_ideal();
        let o = factorization_orbits(k.clone(), &k.element_i64(&[6]), &z, &z, &u).unwrap();
        let got: Vec<(i64, i64)> = o
            .iter()
            .map(|(a, b)| (a.i64_coords().unwrap()[0], b.i64_coords().unwrap()[0]))
            .collect();
        assert_eq!(got, vec![(1, 6), (2, 3), (3, 2), (6, 1)]);
    }

    #[test]
    fn sigma_one() {
        let (k, u) = q();
        let z = k.unit_ideal();
        let phi = one(&k, &u);
        for (xi, s) in [(6, 12), (4, 7), (1, 1), (12, 28)] {
            let c = coefficient(k.clone(), &k.element_i64(&[xi]), &z, &z, &phi, 2, &u).unwrap();
            assert_eq!(c, Int::from(s));
        }
    }

    #[test]
    fn sqrt5_orbits_of_two() {
        let k = Arc::new(FieldOrder::monogenic("Q(sqrt5)", &[-1, -1, 1]).unwrap());
        let u = search_units(&k, 2).unwrap();
        let r = k.unit_ideal();
        let o = factorization_orbits(k.clone(), &k.element_i64(&[2, 0]), &r, &r, &u).unwrap();
        // 2 is inert: (1, 2) and (2, 1)
        assert_eq!(o.len(), 2);
        let o = factorization_orbits(k.clone(), &k.element_i64(&[4, 0]), &r, &r, &u).unwrap();
        assert_eq!(o.len(), 3);
        // 11 splits: 1, pi, pi', 11 give four orbits
        let o = factorization_orbits(k.clone(), &k.element_i64(&[11, 0]), &r, &r, &u).unwrap();
        assert_eq!(o.len(), 4);
    }

    #[test]
    fn even_exponents_for_b_two() {
        let (k, u) = q();
        let phi = one(&k, &u);
        let b = k.rational_ideal(&rat(2, 1)).unwrap();
        let e = expand(k.clone(), &k.unit_ideal(), &b, &phi, 2, &rat(10, 1), &u, ExpandOptions { sanity: true }).unwrap();
        assert!(e.coeffs.keys().all(|x| x.i64_coords().unwrap()[0] % 2 == 0));
        // a(2) = sum over a | 1 with b = 2/a in 2Z: a = 1
        assert_eq!(e.coefficient(&k.element_i64(&[2])), Int::from(1));
        assert_eq!(e.coefficient(&k.element_i64(&[4])), Int::from(1 + 2));
    }
}
