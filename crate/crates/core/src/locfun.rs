//! Locally constant functions of finite level on pairs of residues.
//!
//! A function is stored as a sum of terms, each a product of factors. A
//! factor lives on its own residue ring `O / m` (with `m` dividing the
//! level) and is either constant, a function of one variable, or a table in
//! both. This keeps tensor-shaped functions at level `9 * 7` small and
//! lets homogeneity and Galois invariance be certified factor by factor.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use crate::arith::cyclotomic::{CycloField, CycloRat, CyclotomicInt};
use crate::arith::matrix::hnf;
use crate::arith::{lcm_u64, Int, Rat};
use crate::error::{Error, Result};
use crate::nf::residue::ResidueRing;
use crate::nf::units::UnitGroupData;
use crate::nf::{FieldElement, FieldOrder, IdealLattice};
use crate::tower::TowerData;

/// Exhaustive checks over pairs are attempted up to this ring size.
pub const EXHAUSTIVE_RING_LIMIT: u64 = 2000;

/// Level `p^alpha f` with `f` prime to `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub p: u64,
    pub alpha: u32,
    pub f: IdealLattice,
    pub modulus: IdealLattice,
}

impl Level {
    pub fn new(k: &FieldOrder, p: u64, alpha: u32, f: IdealLattice) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if !f.is_integral() || f.order_id != k.id() {
            return Err(Error::Precondition("level ideal must be integral in the same order".into()));
        }
        let pi = k.rational_ideal(&Rat::from_integer(Int::from(p)))?;
        if !k.coprime(&f, &pi)? {
            return Err(Error::Precondition(format!("f is not prime to {p}")));
        }
        let pa = k.rational_ideal(&Rat::from_integer(Int::from(p).pow(alpha)))?;
        let modulus = k.ideal_mul(&pa, &f)?;
        Ok(Level { p, alpha, f, modulus })
    }

    /// Level `p^alpha O`.
    pub fn prime_power(k: &FieldOrder, p: u64, alpha: u32) -> Result<Self> {
        Level::new(k, p, alpha, k.unit_ideal())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table {
    Const(i64),
    /// Depends on the first variable only.
    First(Vec<i64>),
    /// Depends on the second variable only.
    Second(Vec<i64>),
    /// Row-major `size * size` table.
    Dense(Vec<i64>),
    Sparse(BTreeMap<(u64, u64), i64>),
}

#[derive(Clone, Debug)]
pub struct Factor {
    pub ring: Arc<ResidueRing>,
    pub table: Table,
}

impl Factor {
    pub fn value(&self, x: u64, y: u64) -> i64 {
        match &self.table {
            Table::Const(c) => *c,
            Table::First(v) => v[x as usize],
            Table::Second(v) => v[y as usize],
            Table::Dense(v) => v[(x * self.ring.size() + y) as usize],
            Table::Sparse(m) => m.get(&(x, y)).copied().unwrap_or(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.table {
            Table::Const(c) => *c == 0,
            Table::First(v) | Table::Second(v) | Table::Dense(v) => v.iter().all(|&x| x == 0),
            Table::Sparse(m) => m.values().all(|&x| x == 0),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let s = self.ring.size();
        let ok = match &self.table {
            Table::Const(_) => true,
            Table::First(v) | Table::Second(v) => v.len() as u64 == s,
            Table::Dense(v) => v.len() as u64 == s * s,
            Table::Sparse(m) => m.keys().all(|&(x, y)| x < s && y < s),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFunction("table does not match its residue ring".into()))
        }
    }

    /// The factor `(x, y) -> T(fx(x), fy(y))` on `ring`, where `fx`, `fy`
    /// map residues of `ring` to residues of `self.ring` and `inv` inverts
    /// them where defined.
    fn pull(&self, ring: Arc<ResidueRing>, fx: &[u64], fy: &[u64], inv_x: &BTreeMap<u64, Vec<u64>>, inv_y: &BTreeMap<u64, Vec<u64>>) -> Factor {
        let s = ring.size();
        let table = match &self.table {
            Table::Const(c) => Table::Const(*c),
            Table::First(v) => Table::First(fx.iter().map(|&i| v[i as usize]).collect()),
            Table::Second(v) => Table::Second(fy.iter().map(|&i| v[i as usize]).collect()),
            Table::Dense(_) => {
                let mut out = vec![0i64; (s * s) as usize];
                for x in 0..s {
                    for y in 0..s {
                        out[(x * s + y) as usize] = self.value(fx[x as usize], fy[y as usize]);
                    }
                }
                Table::Dense(out)
            }
            Table::Sparse(m) => {
                let mut out = BTreeMap::new();
                for (&(a, b), &v) in m {
                    if v == 0 {
                        continue;
                    }
                    for x in inv_x.get(&a).into_iter().flatten() {
                        for y in inv_y.get(&b).into_iter().flatten() {
                            out.insert((*x, *y), v);
                        }
                    }
                }
                Table::Sparse(out)
            }
        };
        Factor { ring, table }
    }

    fn permuted(&self, px: &[u64], py: &[u64]) -> Factor {
        let inv_x = invert(px);
        let inv_y = invert(py);
        self.pull(self.ring.clone(), px, py, &inv_x, &inv_y)
    }

    fn add_table(&self, o: &Factor) -> Factor {
        let s = self.ring.size();
        let table = match (&self.table, &o.table) {
            (Table::Const(a), Table::Const(b)) => Table::Const(a + b),
            (Table::First(a), Table::First(b)) => Table::First(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            (Table::Second(a), Table::Second(b)) => Table::Second(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            (Table::Sparse(a), Table::Sparse(b)) => {
                let mut m = a.clone();
                for (k, v) in b {
                    *m.entry(*k).or_insert(0) += v;
                }
                m.retain(|_, v| *v != 0);
                Table::Sparse(m)
            }
            _ => {
                let mut out = vec![0i64; (s * s) as usize];
                for x in 0..s {
                    for y in 0..s {
                        out[(x * s + y) as usize] = self.value(x, y) + o.value(x, y);
                    }
                }
                Table::Dense(out)
            }
        };
        Factor { ring: self.ring.clone(), table }
    }
}

fn invert(f: &[u64]) -> BTreeMap<u64, Vec<u64>> {
    let mut m: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (i, &v) in f.iter().enumerate() {
        m.entry(v).or_default().push(i as u64);
    }
    m
}

/// Image of the global units in `(O/m)^x x {+-1}`: triples `(u, u^-1, sign N)`.
#[derive(Clone, Debug)]
pub struct UnitImage {
    pub gens: Vec<(u64, u64, i8)>,
    pub elements: Vec<(u64, u64, i8)>,
}

pub fn unit_image(k: &FieldOrder, ring: &ResidueRing, units: &UnitGroupData) -> Result<UnitImage> {
    let mut gens = Vec::new();
    for e in units.generators() {
        let u = ring.index_of_element(&e)?;
        let ui = ring.index_of_element(&k.element_inv(&e)?)?;
        let s = if k.norm_of(&e.coords).is_negative() { -1 } else { 1 };
        gens.push((u, ui, s));
    }
    let one = (ring.one(), ring.one(), 1i8);
    let g = crate::arith::abelian::FiniteAbelianGroup::generate(
        one,
        &gens,
        |a, b| (ring.mul(k, a.0, b.0), ring.mul(k, a.1, b.1), a.2 * b.2),
        2 * ring.size() as usize + 2,
    )
    .map_err(|_| Error::LimitExceeded("unit image".into()))?;
    Ok(UnitImage { gens, elements: g.elements().cloned().collect() })
}

fn mul_perm(k: &FieldOrder, ring: &ResidueRing, u: u64) -> Vec<u64> {
    (0..ring.size()).map(|x| ring.mul(k, x, u)).collect()
}

/// A function before validation: a sum of products of factors.
#[derive(Clone, Debug)]
pub struct RawFn {
    pub order: Arc<FieldOrder>,
    pub ring: Arc<ResidueRing>,
    pub terms: Vec<Vec<Factor>>,
}

impl RawFn {
    pub fn zero(order: Arc<FieldOrder>, ring: Arc<ResidueRing>) -> Self {
        RawFn { order, ring, terms: Vec::new() }
    }

    pub fn from_factor(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, f: Factor) -> Self {
        RawFn { order, ring, terms: vec![vec![f]] }
    }

    pub fn constant(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, c: i64) -> Self {
        let f = Factor { ring: ring.clone(), table: Table::Const(c) };
        Self::from_factor(order, ring, f)
    }

    /// Indicator of the residue pair `(x0, y0)` at the level ring.
    pub fn indicator(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, x0: u64, y0: u64) -> Self {
        let mut m = BTreeMap::new();
        m.insert((x0, y0), 1);
        let f = Factor { ring: ring.clone(), table: Table::Sparse(m) };
        Self::from_factor(order, ring, f)
    }

    /// A factor on `sub` (a ring whose modulus divides the level) given by
    /// a function of the first variable's representative.
    pub fn first(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, sub: Arc<ResidueRing>, f: impl Fn(&[i64]) -> i64) -> Self {
        let t = (0..sub.size()).map(|i| f(&sub.rep(i))).collect();
        Self::from_factor(order, ring, Factor { ring: sub, table: Table::First(t) })
    }

    pub fn second(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, sub: Arc<ResidueRing>, f: impl Fn(&[i64]) -> i64) -> Self {
        let t = (0..sub.size()).map(|i| f(&sub.rep(i))).collect();
        Self::from_factor(order, ring, Factor { ring: sub, table: Table::Second(t) })
    }

    /// `x -> chi(N(x) mod q)` on `O / q O` for a function `chi` on `Z/q`.
    pub fn norm_character(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, q: u64, chi: impl Fn(u64) -> i64, first: bool) -> Result<Self> {
        let qi = order.rational_ideal(&Rat::from_integer(Int::from(q)))?;
        let sub = Arc::new(ResidueRing::new(&order, &qi)?);
        let k = order.clone();
        let val = move |r: &[i64]| {
            let n = k.norm_int(&r.iter().map(|&x| Int::from(x)).collect::<Vec<_>>());
            let qq = Int::from(q);
            let m = ((n % &qq) + &qq) % &qq;
            chi(num_traits::ToPrimitive::to_u64(&m).unwrap())
        };
        Ok(if first { Self::first(order, ring, sub, val) } else { Self::second(order, ring, sub, val) })
    }

    /// The indicator of units in the chosen variables, at the level ring.
    pub fn units_support(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, first: bool, second: bool) -> Self {
        let t: Vec<i64> = (0..ring.size()).map(|i| ring.is_unit(i) as i64).collect();
        let mut term = Vec::new();
        if first {
            term.push(Factor { ring: ring.clone(), table: Table::First(t.clone()) });
        }
        if second {
            term.push(Factor { ring: ring.clone(), table: Table::Second(t) });
        }
        if term.is_empty() {
            term.push(Factor { ring: ring.clone(), table: Table::Const(1) });
        }
        RawFn { order, ring, terms: vec![term] }
    }

    pub fn add(&self, o: &RawFn) -> Result<RawFn> {
        self.compatible(o)?;
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(RawFn { order: self.order.clone(), ring: self.ring.clone(), terms })
    }

    pub fn mul(&self, o: &RawFn) -> Result<RawFn> {
        self.compatible(o)?;
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                let mut t = a.clone();
                t.extend(b.iter().cloned());
                terms.push(t);
            }
        }
        Ok(RawFn { order: self.order.clone(), ring: self.ring.clone(), terms })
    }

    pub fn scale(&self, c: i64) -> RawFn {
        let mut r = self.clone();
        for t in r.terms.iter_mut() {
            t.push(Factor { ring: self.ring.clone(), table: Table::Const(c) });
        }
        r
    }

    fn compatible(&self, o: &RawFn) -> Result<()> {
        if self.ring.modulus() != o.ring.modulus() || self.order.id() != o.order.id() {
            return Err(Error::InvalidFunction("functions of different levels".into()));
        }
        Ok(())
    }

    /// Sum over the Galois orbit: `sum_i phi(gamma^i x, gamma^i y)`.
    /// Terms made of invariant factors are kept; single-factor terms are
    /// symmetrized in place; other terms are expanded into `p` copies.
    pub fn gamma_symmetrize(&self, t: &TowerData) -> Result<RawFn> {
        let mut cache = PermCache::default();
        let mut terms = Vec::new();
        for term in &self.terms {
            let mut all_inv = true;
            for f in term {
                if !factor_gamma_invariant(f, t, &mut cache)? {
                    all_inv = false;
                }
            }
            if all_inv {
                terms.push(term.clone());
            } else if term.len() == 1 {
                let f = &term[0];
                let perm = cache.gamma(t, &f.ring)?;
                let mut acc = f.clone();
                let mut cur = f.clone();
                for _ in 1..t.p {
                    cur = cur.permuted(&perm, &perm);
                    acc = acc.add_table(&cur);
                }
                terms.push(vec![acc]);
            } else {
                let mut cur = term.clone();
                terms.push(cur.clone());
                for _ in 1..t.p {
                    cur = cur
                        .iter()
                        .map(|f| Ok(f.permuted(&cache.gamma(t, &f.ring)?, &cache.gamma(t, &f.ring)?)))
                        .collect::<Result<Vec<_>>>()?;
                    terms.push(cur.clone());
                }
            }
        }
        Ok(RawFn { order: self.order.clone(), ring: self.ring.clone(), terms })
    }

    /// `sum_{(u, s)} s^w phi(u x, u^-1 y)` over the image of the global
    /// units, applied to each single-factor term. The result satisfies
    /// `phi(e^-1 x, e y) = N(e)^w phi(x, y)`.
    pub fn homogenize(&self, units: &UnitGroupData, w: u32) -> Result<RawFn> {
        let k = &self.order;
        let mut terms = Vec::new();
        for term in &self.terms {
            if term.len() != 1 {
                return Err(Error::InvalidFunction("homogenize needs single-factor terms".into()));
            }
            let f = &term[0];
            let img = unit_image(k, &f.ring, units)?;
            let mut acc: Option<Factor> = None;
            for &(u, ui, s) in &img.elements {
                let g = f.permuted(&mul_perm(k, &f.ring, u), &mul_perm(k, &f.ring, ui));
                let g = if s < 0 && w % 2 == 1 { negate(&g) } else { g };
                acc = Some(match acc {
                    None => g,
                    Some(a) => a.add_table(&g),
                });
            }
            terms.push(vec![acc.expect("unit image is nonempty")]);
        }
        Ok(RawFn { order: self.order.clone(), ring: self.ring.clone(), terms })
    }

    /// Validates and fixes the weight.
    pub fn build(self, units: &UnitGroupData, weight: u32, flags: SupportFlags, label: &str, level: Level) -> Result<LocConstFn> {
        LocConstFn::new(self, units, weight, flags, label, level)
    }
}

fn negate(f: &Factor) -> Factor {
    let table = match &f.table {
        Table::Const(c) => Table::Const(-c),
        Table::First(v) => Table::First(v.iter().map(|x| -x).collect()),
        Table::Second(v) => Table::Second(v.iter().map(|x| -x).collect()),
        Table::Dense(v) => Table::Dense(v.iter().map(|x| -x).collect()),
        Table::Sparse(m) => Table::Sparse(m.iter().map(|(k, v)| (*k, -v)).collect()),
    };
    Factor { ring: f.ring.clone(), table }
}

#[derive(Default)]
struct PermCache {
    gamma: BTreeMap<IdealLattice, Arc<Vec<u64>>>,
}

impl PermCache {
    fn gamma(&mut self, t: &TowerData, ring: &ResidueRing) -> Result<Arc<Vec<u64>>> {
        if let Some(p) = self.gamma.get(ring.modulus()) {
            return Ok(p.clone());
        }
        let p = Arc::new(t.residue_galois(ring)?);
        self.gamma.insert(ring.modulus().clone(), p.clone());
        Ok(p)
    }
}

fn factor_gamma_invariant(f: &Factor, t: &TowerData, cache: &mut PermCache) -> Result<bool> {
    if matches!(f.table, Table::Const(_)) {
        return Ok(true);
    }
    let g = cache.gamma(t, &f.ring)?;
    Ok(f.permuted(&g, &g).table == f.table)
}

/// Parities `w mod 2` for which `T(u^-1 x, u y) = s^w T(x, y)` holds for
/// every generator; bit `w` set when parity `w` works.
fn factor_parities(k: &FieldOrder, f: &Factor, units: &UnitGroupData) -> Result<u8> {
    if f.is_zero() {
        return Ok(0b11);
    }
    let img = unit_image(k, &f.ring, units)?;
    let mut mask = 0b11u8;
    for &(u, ui, s) in &img.gens {
        // (x, y) -> (u^-1 x, u y) is `permuted` by (mul by u^-1, mul by u)
        let moved = f.permuted(&mul_perm(k, &f.ring, ui), &mul_perm(k, &f.ring, u));
        let ok0 = moved.table == f.table;
        let ok1 = if s < 0 { negate(&moved).table == f.table } else { ok0 };
        mask &= (ok0 as u8) | ((ok1 as u8) << 1);
    }
    Ok(mask)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SupportFlags {
    /// Zero unless the first variable is a unit at every prime of the level.
    pub first_units: bool,
    pub second_units: bool,
}

/// A validated locally constant function of weight `k`.
#[derive(Clone, Debug)]
pub struct LocConstFn {
    pub label: String,
    pub order: Arc<FieldOrder>,
    pub level: Level,
    pub ring: Arc<ResidueRing>,
    pub terms: Vec<Vec<Factor>>,
    pub weight: u32,
    pub flags: SupportFlags,
    proj: BTreeMap<IdealLattice, Arc<Vec<u64>>>,
}

impl LocConstFn {
    fn new(raw: RawFn, units: &UnitGroupData, weight: u32, flags: SupportFlags, label: &str, level: Level) -> Result<Self> {
        let k = raw.order.clone();
        if raw.ring.modulus() != &level.modulus {
            return Err(Error::InvalidFunction("ring does not match the level".into()));
        }
        let mut proj = BTreeMap::new();
        for term in &raw.terms {
            for f in term {
                f.check_shape()?;
                if f.ring.order_id() != k.id() || !k.ideal_contains_ideal(f.ring.modulus(), &level.modulus) {
                    return Err(Error::InvalidFunction("factor modulus does not divide the level".into()));
                }
                if !proj.contains_key(f.ring.modulus()) {
                    let r = &raw.ring;
                    let map: Vec<u64> = (0..r.size()).map(|i| f.ring.index_of(&r.rep(i))).collect();
                    proj.insert(f.ring.modulus().clone(), Arc::new(map));
                }
            }
        }
        let phi = LocConstFn {
            label: label.into(),
            order: k,
            level,
            ring: raw.ring,
            terms: raw.terms,
            weight,
            flags,
            proj,
        };
        phi.check_homogeneous(units)?;
        phi.check_flags()?;
        Ok(phi)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.iter().any(|f| f.is_zero()))
    }

    /// Value at level-ring indices.
    pub fn eval_idx(&self, x: u64, y: u64) -> i64 {
        let mut total = 0i64;
        for term in &self.terms {
            let mut v = 1i64;
            for f in term {
                let p = &self.proj[f.ring.modulus()];
                v = v.checked_mul(f.value(p[x as usize], p[y as usize])).expect("function value overflow");
                if v == 0 {
                    break;
                }
            }
            total = total.checked_add(v).expect("function value overflow");
        }
        total
    }

    /// Value at integral elements.
    pub fn eval(&self, x: &FieldElement, y: &FieldElement) -> Result<i64> {
        let i = self.ring.index_of_element(x)?;
        let j = self.ring.index_of_element(y)?;
        Ok(self.eval_idx(i, j))
    }

    fn small(&self) -> bool {
        self.ring.size() <= EXHAUSTIVE_RING_LIMIT
    }

    fn check_homogeneous(&self, units: &UnitGroupData) -> Result<()> {
        let k = &self.order;
        let w = (self.weight % 2) as u8;
        let mut per_factor = true;
        'terms: for term in &self.terms {
            if term.iter().any(|f| f.is_zero()) {
                continue;
            }
            // reachable parities of the product
            let mut reach = 0b01u8;
            for f in term {
                let m = factor_parities(k, f, units)?;
                let mut next = 0u8;
                for a in 0..2 {
                    for b in 0..2 {
                        if reach & (1 << a) != 0 && m & (1 << b) != 0 {
                            next |= 1 << ((a + b) % 2);
                        }
                    }
                }
                reach = next;
                if reach == 0 {
                    per_factor = false;
                    break 'terms;
                }
            }
            if reach & (1 << w) == 0 {
                per_factor = false;
                break;
            }
        }
        if per_factor {
            return Ok(());
        }
        if !self.small() {
            return Err(Error::Undecided(format!("homogeneity of {} at level size {}", self.label, self.ring.size())));
        }
        let img = unit_image(k, &self.ring, units)?;
        let s = self.ring.size();
        for &(u, ui, sg) in &img.gens {
            let sign = if sg < 0 && w == 1 { -1 } else { 1 };
            for x in 0..s {
                let xm = self.ring.mul(k, x, ui);
                for y in 0..s {
                    let ym = self.ring.mul(k, y, u);
                    if self.eval_idx(xm, ym) != sign * self.eval_idx(x, y) {
                        return Err(Error::Homogeneity {
                            witness: format!(
                                "e = {:?}, x = {:?}, y = {:?}",
                                self.ring.rep(u),
                                self.ring.rep(x),
                                self.ring.rep(y)
                            ),
                            detail: format!("phi(e^-1 x, e y) != N(e)^{} phi(x, y)", self.weight),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether a factor vanishes whenever the chosen variable lies in `q`.
    fn factor_kills(f: &Factor, q: &IdealLattice, first: bool) -> bool {
        let Some(pi) = f.ring.primes().iter().position(|p| &p.ideal == q) else {
            return false;
        };
        let r = &f.ring;
        match &f.table {
            Table::Const(c) => *c == 0,
            Table::First(v) if first => (0..r.size()).all(|x| !r.in_prime(pi, x) || v[x as usize] == 0),
            Table::Second(v) if !first => (0..r.size()).all(|x| !r.in_prime(pi, x) || v[x as usize] == 0),
            Table::First(_) | Table::Second(_) => false,
            Table::Dense(v) => {
                let s = r.size();
                (0..s).all(|a| {
                    !r.in_prime(pi, a)
                        || (0..s).all(|b| {
                            let (x, y) = if first { (a, b) } else { (b, a) };
                            v[(x * s + y) as usize] == 0
                        })
                })
            }
            Table::Sparse(m) => m.iter().all(|(&(x, y), &v)| v == 0 || !r.in_prime(pi, if first { x } else { y })),
        }
    }

    fn check_flags(&self) -> Result<()> {
        for (on, first) in [(self.flags.first_units, true), (self.flags.second_units, false)] {
            if !on {
                continue;
            }
            let primes: Vec<IdealLattice> = self.ring.primes().iter().map(|p| p.ideal.clone()).collect();
            let per_term = self.terms.iter().all(|term| {
                term.iter().any(|f| f.is_zero())
                    || primes.iter().all(|q| term.iter().any(|f| Self::factor_kills(f, q, first)))
            });
            if per_term {
                continue;
            }
            if !self.small() {
                return Err(Error::Undecided(format!("support flags of {}", self.label)));
            }
            let s = self.ring.size();
            for a in (0..s).filter(|&a| !self.ring.is_unit(a)) {
                for b in 0..s {
                    let (x, y) = if first { (a, b) } else { (b, a) };
                    if self.eval_idx(x, y) != 0 {
                        return Err(Error::InvalidFunction(format!(
                            "{}: nonzero at ({:?}, {:?}) outside the declared unit support",
                            self.label,
                            self.ring.rep(x),
                            self.ring.rep(y)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `phi(a, 0) = 0` for every `a`.
    pub fn vanishes_at_second_zero(&self) -> bool {
        if self.flags.second_units {
            return true;
        }
        (0..self.ring.size()).all(|x| self.eval_idx(x, 0) == 0)
    }

    /// Whether `phi(gamma x, gamma y) = phi(x, y)` for all pairs.
    pub fn gamma_invariant(&self, t: &TowerData) -> Result<bool> {
        if self.order.id() != t.top.id() {
            return Err(Error::OrderMismatch(self.order.label().into(), t.top.label().into()));
        }
        if !t.is_gamma_stable(&self.level.modulus)? {
            return Err(Error::Precondition("level is not Galois-stable".into()));
        }
        let mut cache = PermCache::default();
        let mut all = true;
        for term in &self.terms {
            for f in term {
                if !factor_gamma_invariant(f, t, &mut cache)? {
                    all = false;
                }
            }
        }
        if all {
            return Ok(true);
        }
        let g = cache.gamma(t, &self.ring)?;
        let s = self.ring.size();
        if !self.small() {
            // look for a witness along a few rows before giving up
            for y in (0..s).step_by((s / 64).max(1) as usize) {
                for x in 0..s {
                    if self.eval_idx(g[x as usize], g[y as usize]) != self.eval_idx(x, y) {
                        return Ok(false);
                    }
                }
            }
            return Err(Error::Undecided(format!("Galois invariance of {}", self.label)));
        }
        for x in 0..s {
            for y in 0..s {
                if self.eval_idx(g[x as usize], g[y as usize]) != self.eval_idx(x, y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `phi(x, y) = phi'(ver x, ver y)` on the contracted level.
    pub fn pullback_ver(&self, t: &TowerData, units: &UnitGroupData) -> Result<LocConstFn> {
        if self.order.id() != t.top.id() {
            return Err(Error::OrderMismatch(self.order.label().into(), t.top.label().into()));
        }
        let base = t.base.clone();
        let contract = |m: &IdealLattice| -> Result<IdealLattice> {
            let c = t.contract_ideal(m)?;
            if &t.extend_ideal(&c)? != m {
                return Err(Error::InvalidFunction("factor modulus is not extended from the base".into()));
            }
            Ok(c)
        };
        let f_base = if self.level.f == t.top.unit_ideal() { base.unit_ideal() } else { contract(&self.level.f)? };
        let level = Level::new(&base, self.level.p, self.level.alpha, f_base)?;
        if t.extend_ideal(&level.modulus)? != self.level.modulus {
            return Err(Error::InvalidFunction("level is not extended from the base".into()));
        }
        let ver = t.residue_ver(&level.modulus)?;
        let mut vers: BTreeMap<IdealLattice, (Arc<ResidueRing>, Vec<u64>)> = BTreeMap::new();
        let mut terms = Vec::new();
        for term in &self.terms {
            let mut nt = Vec::new();
            for f in term {
                if !vers.contains_key(f.ring.modulus()) {
                    let c = contract(f.ring.modulus())?;
                    let v = t.residue_ver(&c)?;
                    vers.insert(f.ring.modulus().clone(), (v.src.clone(), v.table));
                }
                let (src, table) = &vers[f.ring.modulus()];
                let inv = invert(table);
                nt.push(f.pull(src.clone(), table, table, &inv, &inv));
            }
            terms.push(nt);
        }
        let raw = RawFn { order: base, ring: ver.src.clone(), terms };
        raw.build(units, self.weight, self.flags, &format!("{}|ver", self.label), level)
    }

    /// Explicit value table over the level ring (small levels only).
    pub fn dense_values(&self) -> Result<Vec<i64>> {
        if !self.small() {
            return Err(Error::LimitExceeded(format!("level ring of size {}", self.ring.size())));
        }
        let s = self.ring.size();
        Ok((0..s * s).map(|i| self.eval_idx(i / s, i % s)).collect())
    }
}

/// Prefactor applied to the partial Fourier transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierNormalization {
    None,
    InverseCardinality,
    /// `p^(alpha [F:Q]) / N(f)` read literally.
    Literal,
}

/// The dual group `X = (m theta)^-1 / theta^-1` of `O/m`, with elements
/// listed as field elements in the trace dual of `m`.
pub fn dual_group(k: &FieldOrder, m: &IdealLattice) -> Result<Vec<FieldElement>> {
    let d = k.trace_dual(m)?;
    let codiff = k.trace_dual(&k.unit_ideal())?;
    let db = d.basis();
    let mut rows = Vec::new();
    for b in codiff.basis() {
        let c = k.ideal_coords(&d, &b).ok_or_else(|| Error::Precondition("codifferent not in dual".into()))?;
        rows.push(c);
    }
    let h = hnf(&rows);
    let n = k.degree();
    let diag: Vec<i64> = (0..n).map(|i| num_traits::ToPrimitive::to_i64(&h[i][i]).unwrap()).collect();
    let total: i64 = diag.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut c = vec![0i64; n];
    loop {
        let mut coords = vec![Rat::zero(); n];
        for (ci, row) in c.iter().zip(&db) {
            for (o, x) in coords.iter_mut().zip(row) {
                *o += x * Rat::from_integer(Int::from(*ci));
            }
        }
        out.push(k.element(coords));
        let mut i = 0;
        while i < n {
            c[i] += 1;
            if c[i] < diag[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(out)
}

fn exp_trace(k: &FieldOrder, a: &[i64], x: &FieldElement) -> (u64, u64) {
    let ar: Vec<Rat> = a.iter().map(|&v| Rat::from_integer(Int::from(v))).collect();
    let t = k.trace_of(&k.mul_rat(&ar, &x.coords));
    let den = num_traits::ToPrimitive::to_u64(t.denom()).unwrap();
    let num = t.numer().clone() % Int::from(den);
    let num = num_traits::ToPrimitive::to_i64(&num).unwrap().rem_euclid(den as i64) as u64;
    (num, den)
}

/// `P phi(x, y) = sum_a phi(a, y) e(Tr(a x))` for `x` in the dual group and
/// `y` a level-ring index, times the chosen prefactor.
pub fn partial_fourier_at(phi: &LocConstFn, x: &FieldElement, y: u64, mode: FourierNormalization) -> CycloRat {
    let k = &phi.order;
    let s = phi.ring.size();
    let mut terms = Vec::new();
    let mut m = 1u64;
    for a in 0..s {
        let v = phi.eval_idx(a, y);
        if v != 0 {
            let (num, den) = exp_trace(k, &phi.ring.rep(a), x);
            m = lcm_u64(m, den);
            terms.push((v, num, den));
        }
    }
    let field = CycloField::new(m);
    let mut acc = CyclotomicInt::zero(&field);
    for (v, num, den) in terms {
        let z = CyclotomicInt::zeta(&field, (num * (m / den)) as i64);
        acc = acc.add(&z.scale(&Int::from(v)));
    }
    CycloRat::new(acc, fourier_prefactor(phi, mode))
}

pub fn fourier_prefactor(phi: &LocConstFn, mode: FourierNormalization) -> Rat {
    match mode {
        FourierNormalization::None => Rat::from_integer(Int::from(1)),
        FourierNormalization::InverseCardinality => Rat::new(Int::from(1), Int::from(phi.ring.size())),
        FourierNormalization::Literal => {
            let k = &phi.order;
            let num = Int::from(phi.level.p).pow(phi.level.alpha * k.degree() as u32);
            Rat::from_integer(num) / k.ideal_norm(&phi.level.f)
        }
    }
}

/// The whole transform as a map `(x, y) -> P phi(x, y)`, with `x` running
/// over [`dual_group`].
pub fn partial_fourier(phi: &LocConstFn, mode: FourierNormalization) -> Result<Vec<(FieldElement, u64, CycloRat)>> {
    let xs = dual_group(&phi.order, &phi.level.modulus)?;
    let s = phi.ring.size();
    if (xs.len() as u64).saturating_mul(s).saturating_mul(s) > 50_000_000 {
        return Err(Error::LimitExceeded("Fourier transform table".into()));
    }
    let mut out = Vec::new();
    for x in &xs {
        for y in 0..s {
            out.push((x.clone(), y, partial_fourier_at(phi, x, y, mode)));
        }
    }
    Ok(out)
}

/// `e(Tr(a x))` for a residue representative `a` and `x` in the dual group.
pub fn additive_character(k: &FieldOrder, a: &[i64], x: &FieldElement) -> CyclotomicInt {
    let (num, den) = exp_trace(k, a, x);
    CyclotomicInt::zeta(&CycloField::new(den), num as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::nf::units::{search_units, unit_group};

    fn q() -> (Arc<FieldOrder>, UnitGroupData) {
        let k = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let u = unit_group(&k, None, 1).unwrap();
        (k, u)
    }

    fn ring(k: &Arc<FieldOrder>, m: i64) -> Arc<ResidueRing> {
        Arc::new(ResidueRing::new(k, &k.rational_ideal(&rat(m, 1)).unwrap()).unwrap())
    }

    #[test]
    fn constant_and_indicator_over_q() {
        let (k, u) = q();
        let r = ring(&k, 9);
        let lv = Level::prime_power(&k, 3, 2).unwrap();
        RawFn::constant(k.clone(), r.clone(), 1).build(&u, 0, SupportFlags::default(), "one", lv.clone()).unwrap();
        let pm1 = RawFn::second(k.clone(), r.clone(), r.clone(), |y| (y[0] == 1 || y[0] == 8) as i64);
        pm1.build(&u, 0, SupportFlags::default(), "pm1", lv.clone()).unwrap();
        // the indicator of y = 1 alone is not even
        let one = RawFn::second(k.clone(), r.clone(), r.clone(), |y| (y[0] == 1) as i64);
        let e = one.build(&u, 0, SupportFlags::default(), "y1", lv).unwrap_err();
        assert!(matches!(e, Error::Homogeneity { .. }));
    }

    #[test]
    fn homogenize_gives_weight() {
        let (k, u) = q();
        let r = ring(&k, 9);
        let lv = Level::prime_power(&k, 3, 2).unwrap();
        let ind = RawFn::indicator(k.clone(), r.clone(), 2, 4);
        let h1 = ind.homogenize(&u, 1).unwrap();
        let phi = h1.build(&u, 1, SupportFlags { first_units: true, second_units: false }, "h", lv).unwrap();
        assert_eq!(phi.eval_idx(2, 4), 1);
        assert_eq!(phi.eval_idx(7, 5), -1);
    }

    #[test]
    fn real_quadratic_rejects_non_homogeneous() {
        let k = Arc::new(FieldOrder::monogenic("Q(sqrt5)", &[-1, -1, 1]).unwrap());
        let u = search_units(&k, 2).unwrap();
        let r = ring(&k, 3);
        let lv = Level::prime_power(&k, 3, 1).unwrap();
        let ind = RawFn::indicator(k.clone(), r.clone(), 1, 1);
        assert!(matches!(
            ind.clone().build(&u, 0, SupportFlags::default(), "ind", lv.clone()),
            Err(Error::Homogeneity { .. })
        ));
        for w in 0..2 {
            ind.homogenize(&u, w).unwrap().build(&u, w, SupportFlags::default(), "h", lv.clone()).unwrap();
        }
    }

    #[test]
    fn fourier_one_term() {
        let (k, u) = q();
        let r = ring(&k, 3);
        let lv = Level::prime_power(&k, 3, 1).unwrap();
        // indicator(a = 1) is not even; use phi(a, y) = [a = 1] - [a = 2], weight 1
        let f = RawFn::first(k.clone(), r.clone(), r.clone(), |a| match a[0] {
            1 => 1,
            2 => -1,
            _ => 0,
        });
        let phi = f.build(&u, 1, SupportFlags::default(), "f", lv).unwrap();
        let x = k.element(vec![rat(1, 3)]);
        let v = partial_fourier_at(&phi, &x, 0, FourierNormalization::None);
        let z3 = CycloField::new(3);
        let want = CyclotomicInt::zeta(&z3, 1).sub(&CyclotomicInt::zeta(&z3, 2));
        assert_eq!(v.num, want);
    }
}
