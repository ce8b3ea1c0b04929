//! The mod `p` congruence between the diagonal restriction of an Eisenstein
//! series over `F'` and the Frobenius twist of one over `F`, with the
//! Galois-orbit decomposition behind it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

use crate::arith::{Int, Rat};
use crate::eisenstein::{expand, ExpandOptions, ExpansionMeta, OrbitEngine, QExpansion};
use crate::error::{Error, Result};
use crate::locfun::{Factor, Level, LocConstFn, RawFn, SupportFlags, Table};
use crate::nf::enumerate::enumerate_totally_positive;
use crate::nf::residue::ResidueRing;
use crate::nf::units::UnitGroupData;
use crate::nf::{FieldElement, FieldOrder, IdealLattice};
use crate::tower::{principal_generator, TowerData};

/// `a_F(xi) = sum_{Tr(xi') = xi} a_F'(xi')` for `Tr_{F/Q}(xi) <= bound`.
pub fn restrict_diagonal(e: &QExpansion, t: &TowerData, bound: &Rat) -> Result<QExpansion> {
    if e.order_id != t.top.id() {
        return Err(Error::OrderMismatch(e.field.clone(), t.top.label().into()));
    }
    if bound > &e.trace_bound {
        return Err(Error::Precondition(format!(
            "requested bound {bound} exceeds the completeness bound {}",
            e.trace_bound
        )));
    }
    let gens = e
        .exponent_ideal
        .basis()
        .iter()
        .map(|r| t.rel_trace(&t.top.element(r.clone())))
        .collect::<Result<Vec<_>>>()?;
    let ideal = t.base.ideal_generated(&gens)?;
    let mut out = QExpansion::empty(&t.base, ideal, bound.clone(), e.meta.clone());
    for (xi, c) in &e.coeffs {
        let x = t.rel_trace(xi)?;
        if &t.base.trace_of(&x.coords) <= bound {
            out.add_term(x, c);
        }
    }
    Ok(out)
}

/// Relabels `xi -> p xi`.
pub fn frobenius_twist(e: &QExpansion, k: &FieldOrder, p: u64) -> Result<QExpansion> {
    if e.order_id != k.id() {
        return Err(Error::OrderMismatch(e.field.clone(), k.label().into()));
    }
    let pr = Rat::from_integer(Int::from(p));
    let mut out = QExpansion::empty(k, k.ideal_scale(&e.exponent_ideal, &pr)?, &e.trace_bound * &pr, e.meta.clone());
    for (xi, c) in &e.coeffs {
        out.coeffs.insert(k.element_scale(xi, &pr), c.clone());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Run even when the function is not Galois-invariant.
    pub forced: bool,
    /// Also report differences mod `p^2` (not predicted to vanish).
    pub mod_p2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exponent: FieldElement,
    pub lhs: Int,
    pub rhs: Int,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrbitStats {
    pub exponents: usize,
    pub fixed: usize,
    pub free: usize,
    /// Free orbits whose subtotal is not divisible by `p`.
    pub bad_subtotals: usize,
    /// Fixed triples not descending to the base.
    pub bad_fixed: usize,
    /// Orbits containing a triple whose Galois image does not contribute.
    pub incomplete: usize,
}

impl OrbitStats {
    pub fn ok(&self) -> bool {
        self.bad_subtotals == 0 && self.bad_fixed == 0 && self.incomplete == 0
    }
}

#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub tower: String,
    pub phi: String,
    pub k: u32,
    pub p: u64,
    pub bound: Rat,
    pub gamma_invariant: bool,
    pub forced: bool,
    /// Whether a totally positive generator of the relative different is known.
    pub xi_known: bool,
    pub lhs: QExpansion,
    pub rhs: QExpansion,
    pub mismatches: Vec<Mismatch>,
    /// Exploratory: exponents where the sides differ mod `p^2`.
    pub mismatches_p2: Option<Vec<Mismatch>>,
    pub orbit_stats: Option<OrbitStats>,
}

type Triple = (FieldElement, FieldElement, Rat);

/// The contributions `(a, b, summand)` of each exponent of the reduced
/// cusp on `F'`. The reduction: for `phi'` supported on units in the second
/// variable, `b` in `b theta^-1` contributes only when it is integral at the
/// primes of `theta`, i.e. when `b` lies in `b O'`.
struct TopSide {
    a_top: IdealLattice,
    b_top: IdealLattice,
    by_exponent: BTreeMap<FieldElement, Vec<Triple>>,
}

fn top_side(
    phi: &LocConstFn,
    t: &TowerData,
    a: &IdealLattice,
    b: &IdealLattice,
    k: u32,
    bound: &Rat,
    units_top: &UnitGroupData,
) -> Result<TopSide> {
    let top = t.top.clone();
    let a_top = t.extend_ideal(a)?;
    let b_top = t.extend_ideal(b)?;
    let ab = top.ideal_mul(&a_top, &b_top)?;
    let mut eng = OrbitEngine::new(top.clone(), &a_top, &b_top, units_top)?;
    let mut by_exponent = BTreeMap::new();
    if phi.is_zero() {
        return Ok(TopSide { a_top, b_top, by_exponent });
    }
    for xi in enumerate_totally_positive(&top, &ab, bound)? {
        let c = eng.contributions(&xi, phi, k)?;
        if !c.is_empty() {
            by_exponent.insert(xi, c);
        }
    }
    Ok(TopSide { a_top, b_top, by_exponent })
}

fn to_expansion(side: &TopSide, k: &FieldOrder, bound: &Rat, meta: ExpansionMeta) -> Result<QExpansion> {
    let ab = k.ideal_mul(&side.a_top, &side.b_top)?;
    let na = k.ideal_norm(&side.a_top);
    let mut e = QExpansion::empty(k, ab, bound.clone(), meta);
    for (xi, c) in &side.by_exponent {
        let s: Rat = c.iter().map(|x| &x.2).sum::<Rat>() * &na;
        if !s.is_integer() {
            return Err(Error::Precondition("non-integral coefficient".into()));
        }
        if !s.is_zero() {
            e.coeffs.insert(xi.clone(), s.to_integer());
        }
    }
    Ok(e)
}

fn modp(x: &Int, m: &Int) -> Int {
    ((x % m) + m) % m
}

fn compare(lhs: &QExpansion, rhs: &QExpansion, m: &Int) -> Vec<Mismatch> {
    let keys: BTreeSet<&FieldElement> = lhs.coeffs.keys().chain(rhs.coeffs.keys()).collect();
    keys.into_iter()
        .filter_map(|x| {
            let l = modp(&lhs.coefficient(x), m);
            let r = modp(&rhs.coefficient(x), m);
            (l != r).then(|| Mismatch { exponent: x.clone(), lhs: l, rhs: r })
        })
        .collect()
}

/// Checks `res(E_k(phi', (O', b theta^-1))) = Frob_p(E_pk(phi' o ver, (a, b)))`
/// coefficientwise mod `p` for traces up to `bound`.
#[allow(clippy::too_many_arguments)]
pub fn check_congruence(
    phi: &LocConstFn,
    t: &TowerData,
    a: &IdealLattice,
    b: &IdealLattice,
    k: u32,
    bound: &Rat,
    units_base: &UnitGroupData,
    units_top: &UnitGroupData,
    opts: CheckOptions,
) -> Result<CongruenceReport> {
    let base = &t.base;
    if phi.order.id() != t.top.id() {
        return Err(Error::OrderMismatch(phi.order.label().into(), t.top.label().into()));
    }
    if !phi.flags.second_units {
        return Err(Error::Precondition(format!("{} is not supported on units in the second variable", phi.label)));
    }
    let pr = base.rational_ideal(&Rat::from_integer(Int::from(t.p)))?;
    let (db, b_int) = base.integral_multiple(b);
    if !base.coprime(&b_int, &pr)? || (&db % Int::from(t.p)).is_zero() {
        return Err(Error::Precondition("b is not prime to p".into()));
    }
    let inv = phi.gamma_invariant(t)?;
    if !inv && !opts.forced {
        return Err(Error::Precondition(format!("{} is not Galois-invariant", phi.label)));
    }
    let side = top_side(phi, t, a, b, k, bound, units_top)?;
    let meta = ExpansionMeta { weight: k, level: format!("{}", phi.level.modulus), phi: phi.label.clone() };
    let full = to_expansion(&side, &t.top, bound, meta)?;
    let lhs = restrict_diagonal(&full, t, bound)?;

    let pk = t.p as u32 * k;
    let phi_base = phi.pullback_ver(t, units_base)?;
    let pr_rat = Rat::from_integer(Int::from(t.p));
    let rhs0 = expand(base.clone(), a, b, &phi_base, pk, &(bound / &pr_rat), units_base, ExpandOptions::default())?;
    let rhs = frobenius_twist(&rhs0, base, t.p)?;

    let p = Int::from(t.p);
    let mismatches = compare(&lhs, &rhs, &p);
    let mismatches_p2 = opts.mod_p2.then(|| compare(&lhs, &rhs, &(&p * &p)));
    let orbit_stats = if inv {
        let mut stats = OrbitStats::default();
        for rec in diagnostics_from(&side, t)? {
            stats.exponents += 1;
            for o in &rec.orbits {
                if o.size == 1 {
                    stats.fixed += 1;
                } else {
                    stats.free += 1;
                }
                if o.size == t.p as usize && !o.subtotal_divisible {
                    stats.bad_subtotals += 1;
                }
                if o.fixed_descends == Some(false) {
                    stats.bad_fixed += 1;
                }
                if !o.complete {
                    stats.incomplete += 1;
                }
            }
        }
        Some(stats)
    } else {
        None
    };
    Ok(CongruenceReport {
        tower: t.label.clone(),
        phi: phi.label.clone(),
        k,
        p: t.p,
        bound: bound.clone(),
        gamma_invariant: inv,
        forced: opts.forced,
        xi_known: t.xi.is_some(),
        lhs,
        rhs,
        mismatches,
        mismatches_p2,
        orbit_stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitInfo {
    pub size: usize,
    /// Exponents `xi'` of the triples, one per orbit element.
    pub exponents: Vec<FieldElement>,
    pub subtotal: Rat,
    pub subtotal_divisible: bool,
    /// For fixed triples: whether `xi'`, `a` and `b` come from `F` up to units
    /// and `xi = p xi'`.
    pub fixed_descends: Option<bool>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub xi: FieldElement,
    pub orbits: Vec<OrbitInfo>,
    pub total: Rat,
}

fn descends(t: &TowerData, x: &FieldElement) -> Result<bool> {
    let id = t.top.principal_ideal(x)?;
    let (_, num) = t.top.integral_multiple(&id);
    let c = t.contract_ideal(&num)?;
    if t.extend_ideal(&c)? != num {
        return Ok(false);
    }
    Ok(principal_generator(&t.base, &c)?.is_some())
}

fn diagnostics_from(side: &TopSide, t: &TowerData) -> Result<Vec<OrbitRecord>> {
    let top = &t.top;
    let p = t.p as usize;
    // triple key: (xi', ideal (a)); the orbit of (a, b) is determined by (a)
    let mut triples: BTreeMap<(FieldElement, IdealLattice), (FieldElement, FieldElement, Rat)> = BTreeMap::new();
    for (xi, cs) in &side.by_exponent {
        for (a, b, s) in cs {
            triples.insert((xi.clone(), top.principal_ideal(a)?), (a.clone(), b.clone(), s.clone()));
        }
    }
    let mut by_base: BTreeMap<FieldElement, OrbitRecord> = BTreeMap::new();
    let mut seen: BTreeSet<(FieldElement, IdealLattice)> = BTreeSet::new();
    let pr = Rat::from_integer(Int::from(t.p));
    for (key, (a, b, _)) in &triples {
        if seen.contains(key) {
            continue;
        }
        let mut orbit = vec![key.clone()];
        let mut complete = true;
        for i in 1..p as i64 {
            let k2 = (t.galois(i, &key.0), t.galois_ideal(i, &key.1)?);
            if !orbit.contains(&k2) {
                orbit.push(k2);
            }
        }
        if orbit.len() != 1 && orbit.len() != p {
            return Err(Error::Precondition(format!("Galois orbit of size {}", orbit.len())));
        }
        let mut subtotal = Rat::zero();
        for o in &orbit {
            seen.insert(o.clone());
            match triples.get(o) {
                Some((_, _, s)) => subtotal += s,
                None => complete = false,
            }
        }
        let xi = t.rel_trace(&key.0)?;
        let fixed_descends = if orbit.len() == 1 {
            let d = t.descend(&key.0);
            let ok = match d {
                Some(x0) => {
                    t.base.element_scale(&x0, &pr) == xi && descends(t, a)? && descends(t, b)?
                }
                None => false,
            };
            Some(ok)
        } else {
            None
        };
        let divisible = subtotal.is_integer() && (subtotal.to_integer() % Int::from(t.p)).is_zero();
        let rec = by_base.entry(xi.clone()).or_insert_with(|| OrbitRecord { xi: xi.clone(), orbits: Vec::new(), total: Rat::zero() });
        rec.total += &subtotal;
        rec.orbits.push(OrbitInfo {
            size: orbit.len(),
            exponents: orbit.iter().map(|o| o.0.clone()).collect(),
            subtotal,
            subtotal_divisible: divisible,
            fixed_descends,
            complete,
        });
    }
    Ok(by_base.into_values().collect())
}

/// Decomposes the contributions to the restricted coefficient at `xi` into
/// Galois orbits.
#[allow(clippy::too_many_arguments)]
pub fn orbit_diagnostics(
    xi: &FieldElement,
    t: &TowerData,
    a: &IdealLattice,
    b: &IdealLattice,
    phi: &LocConstFn,
    k: u32,
    units_top: &UnitGroupData,
) -> Result<Option<OrbitRecord>> {
    if !phi.gamma_invariant(t)? {
        return Err(Error::Precondition(format!("{} is not Galois-invariant", phi.label)));
    }
    let bound = t.base.trace_of(&xi.coords);
    let mut side = top_side(phi, t, a, b, k, &bound, units_top)?;
    let mut keep = BTreeMap::new();
    for (x, c) in core::mem::take(&mut side.by_exponent) {
        if &t.rel_trace(&x)? == xi {
            keep.insert(x, c);
        }
    }
    side.by_exponent = keep;
    Ok(diagnostics_from(&side, t)?.into_iter().find(|r| &r.xi == xi))
}

/// Orbit records for every restricted exponent of trace at most `bound`.
#[allow(clippy::too_many_arguments)]
pub fn orbit_table(
    t: &TowerData,
    a: &IdealLattice,
    b: &IdealLattice,
    phi: &LocConstFn,
    k: u32,
    bound: &Rat,
    units_top: &UnitGroupData,
) -> Result<Vec<OrbitRecord>> {
    if !phi.gamma_invariant(t)? {
        return Err(Error::Precondition(format!("{} is not Galois-invariant", phi.label)));
    }
    let side = top_side(phi, t, a, b, k, bound, units_top)?;
    let mut recs = diagnostics_from(&side, t)?;
    recs.retain(|r| &t.base.trace_of(&r.xi.coords) <= bound);
    Ok(recs)
}

/// Test functions `phi'` at level `p^alpha f O'` for the tower, each Galois
/// invariant, supported on units in both variables and of weight parity
/// `k mod 2`. `f` must be a rational prime or 1.
pub fn battery(t: &TowerData, units_top: &UnitGroupData, alpha: u32, f: u64, k: u32) -> Result<Vec<LocConstFn>> {
    let top = t.top.clone();
    let p = t.p;
    let w = k % 2;
    let ctx = BatteryCtx::new(t, alpha, f)?;
    let fl = SupportFlags { first_units: true, second_units: true };
    let legendre_p = move |n: u64| legendre(n, p);
    let omega_x = RawFn::norm_character(top.clone(), ctx.ring.clone(), p, legendre_p, true)?;
    let omega_y = RawFn::norm_character(top.clone(), ctx.ring.clone(), p, legendre_p, false)?;
    let up = ctx.units_on(&ctx.rp, true, true);
    let up_x = ctx.units_on(&ctx.rp, true, false);
    let up_y = ctx.units_on(&ctx.rp, false, true);
    let uf = match &ctx.rf {
        Some(r) => ctx.units_on(r, true, true),
        None => RawFn::constant(top.clone(), ctx.ring.clone(), 1),
    };
    let pa = p.pow(alpha);
    let pm1 = RawFn::second(top.clone(), ctx.ring.clone(), ctx.rp.clone(), {
        let k2 = top.clone();
        move |r| {
            let n = k2.norm_int(&r.iter().map(|&x| Int::from(x)).collect::<Vec<_>>());
            let m = Int::from(pa);
            let v = ((n % &m) + &m) % &m;
            (v == Int::from(1) || v == Int::from(pa - 1)) as i64
        }
    });
    let mut out = Vec::new();
    let mut push = |raw: RawFn, name: &str| -> Result<()> {
        let phi = raw.build(units_top, k, fl, &format!("{}:{name}:k{k}", t.label), ctx.level.clone())?;
        if !phi.is_zero() {
            out.push(phi);
        }
        Ok(())
    };
    if w == 0 {
        push(up.mul(&uf)?, "units")?;
        push(omega_x.mul(&omega_y)?.mul(&uf)?, "omega-omega")?;
        push(up_x.mul(&pm1)?.mul(&uf)?, "norm-pm1")?;
    } else {
        push(omega_x.mul(&up_y)?.mul(&uf)?, "omega-x")?;
        push(up_x.mul(&omega_y)?.mul(&uf)?, "omega-y")?;
        push(omega_x.mul(&pm1)?.mul(&uf)?, "omega-norm-pm1")?;
    }
    if ctx.rf.is_some() {
        let lf = move |n: u64| legendre(n, f);
        let cx = RawFn::norm_character(top.clone(), ctx.ring.clone(), f, lf, true)?;
        let cy = RawFn::norm_character(top.clone(), ctx.ring.clone(), f, lf, false)?;
        let pfac = if w == 0 { up.clone() } else { omega_x.mul(&up_y)? };
        // chi_f(N x) chi_f(N y) is even whatever the parity of chi_f
        push(pfac.mul(&cx)?.mul(&cy)?, "chi-f")?;
    }
    let moving = ctx.moving_pairs(2);
    for (n, (x0, y0)) in moving.iter().enumerate() {
        let ix = RawFn::from_factor(top.clone(), ctx.ring.clone(), first_indicator(&ctx.rp, *x0, true));
        let sx = ix.homogenize(units_top, w)?.gamma_symmetrize(t)?;
        push(sx.mul(&up_y)?.mul(&uf)?, &format!("sym-x{n}"))?;
        let iy = RawFn::from_factor(top.clone(), ctx.ring.clone(), first_indicator(&ctx.rp, *y0, false));
        let sy = iy.homogenize(units_top, w)?.gamma_symmetrize(t)?;
        push(up_x.mul(&sy)?.mul(&uf)?, &format!("sym-y{n}"))?;
    }
    if let Some(&(z0, _)) = moving.first() {
        // xy is unchanged by (x, y) -> (e^-1 x, e y), so any function of it is even
        let orbit: Vec<u64> = (0..t.p as usize).scan(z0, |z, _| {
            let cur = *z;
            *z = ctx.gamma_p[cur as usize];
            Some(cur)
        }).collect();
        let prod = RawFn::from_factor(top.clone(), ctx.ring.clone(), ctx.product_indicator(&orbit));
        let pfac = if w == 0 { prod } else { prod.mul(&omega_x)? };
        push(pfac.mul(&uf)?, "sym-product")?;
    }
    Ok(out)
}

/// A homogenized indicator at level `p^alpha f O'` that is not Galois
/// invariant.
pub fn non_invariant_control(t: &TowerData, units_top: &UnitGroupData, alpha: u32, f: u64, k: u32) -> Result<LocConstFn> {
    let ctx = BatteryCtx::new(t, alpha, f)?;
    let fl = SupportFlags { first_units: true, second_units: true };
    let uf = match &ctx.rf {
        Some(r) => ctx.units_on(r, true, true),
        None => RawFn::constant(t.top.clone(), ctx.ring.clone(), 1),
    };
    let omega_x = RawFn::norm_character(t.top.clone(), ctx.ring.clone(), t.p, move |n| legendre(n, t.p), true)?;
    for (z0, _) in ctx.moving_pairs(8) {
        let prod = RawFn::from_factor(t.top.clone(), ctx.ring.clone(), ctx.product_indicator(&[z0]));
        let h = if k.is_multiple_of(2) { prod } else { prod.mul(&omega_x)? }.mul(&uf)?;
        let phi = h.build(units_top, k, fl, &format!("{}:control:k{k}", t.label), ctx.level.clone())?;
        if !phi.is_zero() && !phi.gamma_invariant(t)? {
            return Ok(phi);
        }
    }
    Err(Error::Precondition("no non-invariant indicator found".into()))
}

fn first_indicator(r: &Arc<ResidueRing>, x0: u64, first: bool) -> Factor {
    let mut v = vec![0i64; r.size() as usize];
    v[x0 as usize] = 1;
    let table = if first { Table::First(v) } else { Table::Second(v) };
    Factor { ring: r.clone(), table }
}

fn legendre(n: u64, p: u64) -> i64 {
    let n = n % p;
    if n == 0 {
        return 0;
    }
    if crate::arith::pow_mod(n, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

struct BatteryCtx {
    top: Arc<FieldOrder>,
    level: Level,
    ring: Arc<ResidueRing>,
    rp: Arc<ResidueRing>,
    rf: Option<Arc<ResidueRing>>,
    gamma_p: Vec<u64>,
}

impl BatteryCtx {
    fn new(t: &TowerData, alpha: u32, f: u64) -> Result<Self> {
        let top = t.top.clone();
        let fi = top.rational_ideal(&Rat::from_integer(Int::from(f)))?;
        let level = Level::new(&top, t.p, alpha, fi.clone())?;
        let ring = Arc::new(ResidueRing::new(&top, &level.modulus)?);
        let pa = top.rational_ideal(&Rat::from_integer(Int::from(t.p.pow(alpha))))?;
        let rp = Arc::new(ResidueRing::new(&top, &pa)?);
        let rf = if f > 1 { Some(Arc::new(ResidueRing::new(&top, &fi)?)) } else { None };
        let gamma_p = t.residue_galois(&rp)?;
        Ok(BatteryCtx { top, level, ring, rp, rf, gamma_p })
    }

    fn units_on(&self, r: &Arc<ResidueRing>, first: bool, second: bool) -> RawFn {
        let t: Vec<i64> = (0..r.size()).map(|i| r.is_unit(i) as i64).collect();
        let mut term = Vec::new();
        if first {
            term.push(Factor { ring: r.clone(), table: Table::First(t.clone()) });
        }
        if second {
            term.push(Factor { ring: r.clone(), table: Table::Second(t) });
        }
        RawFn { order: self.top.clone(), ring: self.ring.clone(), terms: vec![term] }
    }

    /// `[x, y units and x y in targets]` mod `p^alpha`.
    fn product_indicator(&self, targets: &[u64]) -> Factor {
        let r = &self.rp;
        let units: Vec<u64> = (0..r.size()).filter(|&i| r.is_unit(i)).collect();
        let mut m = BTreeMap::new();
        for &x in &units {
            for &y in &units {
                if targets.contains(&r.mul(&self.top, x, y)) {
                    m.insert((x, y), 1);
                }
            }
        }
        Factor { ring: r.clone(), table: Table::Sparse(m) }
    }

    /// Unit pairs `(x, y)` mod `p^alpha` with `x` not fixed by `gamma`.
    fn moving_pairs(&self, n: usize) -> Vec<(u64, u64)> {
        let units: Vec<u64> = (0..self.rp.size()).filter(|&i| self.rp.is_unit(i)).collect();
        let moving: Vec<u64> = units.iter().copied().filter(|&u| self.gamma_p[u as usize] != u).collect();
        let mut out = Vec::new();
        for (i, &x) in moving.iter().enumerate() {
            if out.len() == n {
                break;
            }
            let y = units[(7 * i + 3) % units.len()];
            out.push((x, y));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{poly::Poly, rat};
    use crate::nf::units::{search_units, unit_group};

    fn zeta9() -> (TowerData, UnitGroupData, UnitGroupData) {
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let k = Arc::new(FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap());
        let t = TowerData::new("zeta9", q.clone(), k.clone(), 3, &Poly::from_i64(&[0]), &Poly::from_i64(&[-2, 0, 1])).unwrap();
        let ub = unit_group(&q, None, 1).unwrap();
        let ut = search_units(&k, 2).unwrap();
        (t, ub, ut)
    }

    #[test]
    fn frobenius_relabels() {
        let q = FieldOrder::monogenic("Q", &[0, 1]).unwrap();
        let meta = ExpansionMeta { weight: 2, level: "1".into(), phi: "x".into() };
        let mut e = QExpansion::empty(&q, q.unit_ideal(), rat(5, 1), meta);
        e.coeffs.insert(q.element_i64(&[2]), Int::from(7));
        let f = frobenius_twist(&e, &q, 3).unwrap();
        assert_eq!(f.coeffs.len(), 1);
        assert_eq!(f.coefficient(&q.element_i64(&[6])), Int::from(7));
        assert_eq!(f.trace_bound, rat(15, 1));
    }

    #[test]
    fn small_congruence_zeta9() {
        let (t, ub, ut) = zeta9();
        let z = t.base.unit_ideal();
        for k in [1, 2] {
            let bat = battery(&t, &ut, 2, 1, k).unwrap();
            assert!(bat.len() >= 5);
            let phi = &bat[0];
            let r = check_congruence(phi, &t, &z, &z, k, &rat(12, 1), &ub, &ut, CheckOptions::default()).unwrap();
            assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
            assert!(r.orbit_stats.unwrap().ok());
        }
    }
}
