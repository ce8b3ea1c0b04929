//! Finite-order characters of residue rings `(O/m)^x` and of local
//! multiplicative groups. Values are roots of unity recorded by their
//! exponent in `Q/Z`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::cyclotomic::{CycloField, CyclotomicInt};
use crate::arith::{floor_rat, lcm_u64, Int, Rat};
use crate::error::{Error, Result};
use crate::nf::field::FieldOrder;
use crate::nf::ideal::IdealLattice;
use crate::nf::order::FieldElement;
use crate::nf::primes::PrimeIdeal;
use crate::nf::residue::ResidueRing;

/// Representative of `r mod 1` in `[0, 1)`.
pub fn frac(r: &Rat) -> Rat {
    r - Rat::from_integer(floor_rat(r))
}

/// The order `Z` viewed as the maximal order of `Q`.
pub fn rationals() -> Arc<FieldOrder> {
    Arc::new(FieldOrder::monogenic("Q", &[0, 1]).expect("Q"))
}

/// `exp(2 pi i r)` in `Z[zeta_m]`; `m` must be divisible by the denominator.
pub fn root_of_unity(r: &Rat, field: &Arc<CycloField>) -> CyclotomicInt {
    let r = frac(r);
    let m = Int::from(field.m);
    assert!((&m % r.denom()).is_zero(), "root of unity outside the ambient field");
    let k = (r.numer() * &m / r.denom()).to_i64().expect("small exponent");
    CyclotomicInt::zeta(field, k)
}

/// A formal integer combination of roots of unity `exp(2 pi i r)`.
#[derive(Clone, Debug, Default)]
pub struct RootSum {
    terms: BTreeMap<Rat, Int>,
}

impl RootSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: &Rat, mult: Int) {
        let e = self.terms.entry(frac(r)).or_insert_with(Int::zero);
        *e += mult;
    }

    /// Least `m` such that every term lies in `Z[zeta_m]`.
    pub fn level(&self) -> u64 {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .fold(1, |acc, (r, _)| lcm_u64(acc, r.denom().to_u64().expect("small denominator")))
    }

    pub fn to_cyclo(&self, field: &Arc<CycloField>) -> CyclotomicInt {
        let mut acc = CyclotomicInt::zero(field);
        for (r, c) in &self.terms {
            if !c.is_zero() {
                acc = acc.add(&root_of_unity(r, field).scale(c));
            }
        }
        acc
    }

    pub fn evaluate(&self) -> CyclotomicInt {
        self.to_cyclo(&CycloField::new(self.level()))
    }
}

/// A character of `(O/m)^x`.
#[derive(Clone, Debug)]
pub struct DirichletChar {
    order: Arc<FieldOrder>,
    ring: Arc<ResidueRing>,
    /// Values are `n`-th roots of unity.
    n: u64,
    /// Exponent of `zeta_n` at each residue; `None` off the unit group.
    table: Vec<Option<u64>>,
    gens: Vec<u64>,
    conductor: IdealLattice,
    exponents: Vec<(PrimeIdeal, u32, u32)>,
}

impl PartialEq for DirichletChar {
    fn eq(&self, o: &Self) -> bool {
        self.ring.modulus() == o.ring.modulus()
            && self.ring.order_id() == o.ring.order_id()
            && self.table.len() == o.table.len()
            && (0..self.table.len() as u64).all(|i| self.value_exp(i) == o.value_exp(i))
    }
}

fn to_exp(r: &Rat, n: u64) -> u64 {
    let r = frac(r);
    (r.numer() * Int::from(n) / r.denom()).to_u64().expect("exponent")
}

impl DirichletChar {
    fn finish(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, n: u64, table: Vec<Option<u64>>, gens: Vec<u64>) -> Result<Self> {
        let (conductor, exponents) = compute_conductor(&order, &ring, &table)?;
        Ok(DirichletChar { order, ring, n, table, gens, conductor, exponents })
    }

    /// Residue ring `O/m` for an integral ideal `m`.
    pub fn ring(order: &FieldOrder, m: &IdealLattice) -> Result<Arc<ResidueRing>> {
        Ok(Arc::new(ResidueRing::new(order, m)?))
    }

    /// Residue ring `Z/m`.
    pub fn ring_mod(m: u64) -> Result<(Arc<FieldOrder>, Arc<ResidueRing>)> {
        if m == 0 {
            return Err(Error::Precondition("modulus must be positive".into()));
        }
        let q = rationals();
        let id = q.rational_ideal(&Rat::from_integer(Int::from(m)))?;
        let r = Self::ring(&q, &id)?;
        Ok((q, r))
    }

    pub fn trivial(order: Arc<FieldOrder>, ring: Arc<ResidueRing>) -> Result<Self> {
        let table = (0..ring.size()).map(|i| ring.is_unit(i).then_some(0)).collect();
        Self::finish(order, ring, 1, table, Vec::new())
    }

    /// The character with `gens[i] -> exp(2 pi i images[i])`, extended
    /// multiplicatively. Fails if the images are inconsistent or the
    /// generators do not generate the unit group.
    pub fn from_images(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, gens: &[u64], images: &[Rat]) -> Result<Self> {
        if gens.len() != images.len() {
            return Err(Error::Precondition("one image per generator".into()));
        }
        let n = images.iter().fold(1u64, |a, r| lcm_u64(a, frac(r).denom().to_u64().unwrap_or(0)));
        if n == 0 {
            return Err(Error::Precondition("image denominators too large".into()));
        }
        let img: Vec<u64> = images.iter().map(|r| to_exp(r, n)).collect();
        let mut table: Vec<Option<u64>> = vec![None; ring.size() as usize];
        for &g in gens {
            if !ring.is_unit(g) {
                return Err(Error::Precondition(format!("generator {g} is not a unit")));
            }
        }
        let one = ring.one();
        table[one as usize] = Some(0);
        let mut queue = alloc::collections::VecDeque::from([one]);
        while let Some(x) = queue.pop_front() {
            let ex = table[x as usize].unwrap();
            for (g, e) in gens.iter().zip(&img) {
                let y = ring.mul(&order, x, *g);
                let ey = (ex + e) % n;
                match table[y as usize] {
                    Some(v) if v != ey => {
                        return Err(Error::Precondition(format!(
                            "generator images are not multiplicative (conflict at residue {y})"
                        )))
                    }
                    Some(_) => {}
                    None => {
                        table[y as usize] = Some(ey);
                        queue.push_back(y);
                    }
                }
            }
        }
        if (0..ring.size()).any(|i| ring.is_unit(i) && table[i as usize].is_none()) {
            return Err(Error::Precondition("generators do not generate the unit group".into()));
        }
        Self::finish(order, ring, n, table, gens.to_vec())
    }

    /// Tabulates `f` on the unit group and checks that it is a character.
    pub fn from_fn(order: Arc<FieldOrder>, ring: Arc<ResidueRing>, f: impl Fn(u64) -> Rat) -> Result<Self> {
        let group = ring.unit_group(&order)?;
        let units = ring.units();
        let vals: BTreeMap<u64, Rat> = units.iter().map(|&u| (u, frac(&f(u)))).collect();
        let n = vals.values().fold(1u64, |a, r| lcm_u64(a, r.denom().to_u64().unwrap_or(0)));
        if n == 0 {
            return Err(Error::Precondition("value denominators too large".into()));
        }
        if !vals[&ring.one()].is_zero() {
            return Err(Error::Precondition("f(1) != 1".into()));
        }
        for g in &group.generators {
            for &u in &units {
                let gu = ring.mul(&order, *g, u);
                if frac(&(&vals[g] + &vals[&u])) != vals[&gu] {
                    return Err(Error::Precondition(format!("not multiplicative at ({g}, {u})")));
                }
            }
        }
        let mut table = vec![None; ring.size() as usize];
        for (u, r) in &vals {
            table[*u as usize] = Some(to_exp(r, n));
        }
        let gens = group.generators.clone();
        Self::finish(order, ring, n, table, gens)
    }

    /// Every character of `(O/m)^x`, in lexicographic order of the images of
    /// the invariant-factor generators.
    pub fn all(order: Arc<FieldOrder>, ring: Arc<ResidueRing>) -> Result<Vec<Self>> {
        let group = ring.unit_group(&order)?;
        let inv = group.invariants.clone();
        let n = group.exponent();
        let mut out = Vec::new();
        let mut a = vec![0u64; inv.len()];
        loop {
            let mut table = vec![None; ring.size() as usize];
            for &u in group.elements() {
                let d = group.dlog(&u).unwrap();
                let e = d.iter().zip(&a).zip(&inv).map(|((x, y), m)| x * y * (n / m)).sum::<u64>() % n;
                table[u as usize] = Some(e);
            }
            out.push(Self::finish(order.clone(), ring.clone(), n, table, group.generators.clone())?);
            let mut i = 0;
            while i < inv.len() {
                a[i] += 1;
                if a[i] < inv[i] {
                    break;
                }
                a[i] = 0;
                i += 1;
            }
            if i == inv.len() {
                break;
            }
        }
        Ok(out)
    }

    /// All characters modulo `m` over `Q`.
    pub fn all_mod(m: u64) -> Result<Vec<Self>> {
        let (q, r) = Self::ring_mod(m)?;
        Self::all(q, r)
    }

    pub fn order(&self) -> &Arc<FieldOrder> {
        &self.order
    }

    pub fn residue_ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    pub fn modulus(&self) -> &IdealLattice {
        self.ring.modulus()
    }

    /// Size of the residue ring; the modulus itself over `Q`.
    pub fn modulus_norm(&self) -> u64 {
        self.ring.size()
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    /// Images of the recorded generators.
    pub fn generator_images(&self) -> Vec<(u64, Rat)> {
        self.gens.iter().map(|&g| (g, self.value_exp(g).unwrap())).collect()
    }

    /// `chi(x) = exp(2 pi i r)` with `r` returned in `[0, 1)`.
    pub fn value_exp(&self, idx: u64) -> Option<Rat> {
        self.table[idx as usize].map(|e| Rat::new(Int::from(e), Int::from(self.n)))
    }

    pub fn value(&self, idx: u64, field: &Arc<CycloField>) -> Option<CyclotomicInt> {
        self.value_exp(idx).map(|r| root_of_unity(&r, field))
    }

    pub fn eval_element(&self, x: &FieldElement) -> Result<Option<Rat>> {
        Ok(self.value_exp(self.ring.index_of_element(x)?))
    }

    pub fn eval_int(&self, k: &Int) -> Option<Rat> {
        let mut c = vec![Int::zero(); self.order.degree()];
        c[0] = k.clone();
        self.value_exp(self.ring.index_of_int(&c))
    }

    /// Order of the character (lcm of the value orders).
    pub fn char_order(&self) -> u64 {
        self.table.iter().flatten().fold(1, |a, &e| lcm_u64(a, self.n / self.n.gcd(&e)))
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().flatten().all(|&e| e == 0)
    }

    pub fn conductor(&self) -> &IdealLattice {
        &self.conductor
    }

    /// `(prime, exponent in the modulus, exponent in the conductor)`.
    pub fn conductor_exponents(&self) -> &[(PrimeIdeal, u32, u32)] {
        &self.exponents
    }

    /// Conductor exponent at the prime containing the rational prime `q`,
    /// zero if `q` does not divide the modulus.
    pub fn conductor_exponent_at(&self, q: u64) -> u32 {
        self.exponents.iter().filter(|(p, _, _)| p.p == q).map(|(_, _, c)| *c).max().unwrap_or(0)
    }

    pub fn conductor_norm(&self) -> Int {
        self.order.ideal_norm_int(&self.conductor).expect("integral conductor")
    }

    pub fn is_primitive(&self) -> bool {
        &self.conductor == self.ring.modulus()
    }

    pub fn inverse(&self) -> Self {
        let table = self.table.iter().map(|e| e.map(|e| (self.n - e) % self.n)).collect();
        DirichletChar { table, ..self.clone() }
    }

    /// Product of two characters of the same modulus.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.ring.modulus() != o.ring.modulus() || self.ring.order_id() != o.ring.order_id() {
            return Err(Error::Precondition("characters of different moduli; lift first".into()));
        }
        let n = lcm_u64(self.n, o.n);
        let (sa, sb) = (n / self.n, n / o.n);
        let table = self
            .table
            .iter()
            .zip(&o.table)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some((a * sa + b * sb) % n),
                _ => None,
            })
            .collect();
        Self::finish(self.order.clone(), self.ring.clone(), n, table, self.gens.clone())
    }

    pub fn pow(&self, k: u64) -> Self {
        let table = self.table.iter().map(|e| e.map(|e| (e * (k % self.n)) % self.n)).collect();
        let mut c = DirichletChar { table, ..self.clone() };
        let (cond, ex) = compute_conductor(&c.order, &c.ring, &c.table).expect("conductor");
        c.conductor = cond;
        c.exponents = ex;
        c
    }

    /// The same character viewed modulo a multiple `m'` of its modulus.
    pub fn lift(&self, ring: Arc<ResidueRing>) -> Result<Self> {
        if !self.order.ideal_contains_ideal(self.ring.modulus(), ring.modulus()) {
            return Err(Error::Precondition("lift needs a multiple of the modulus".into()));
        }
        let table = (0..ring.size())
            .map(|u| if ring.is_unit(u) { self.table[self.ring.index_of(&ring.rep(u)) as usize] } else { None })
            .collect();
        Self::finish(self.order.clone(), ring, self.n, table, Vec::new())
    }

    /// Product after lifting both factors to the lcm of the moduli.
    pub fn mul_lifted(&self, o: &Self) -> Result<Self> {
        if self.ring.modulus() == o.ring.modulus() {
            return self.mul(o);
        }
        let m = self.order.ideal_intersect(self.ring.modulus(), o.ring.modulus())?;
        let ring = Self::ring(&self.order, &m)?;
        self.lift(ring.clone())?.mul(&o.lift(ring)?)
    }

    /// Pushes the character down to a modulus `d | m` through which it factors.
    pub fn reduce_to(&self, d: &IdealLattice) -> Result<Self> {
        let rd = Self::ring(&self.order, d)?;
        let mut table: Vec<Option<u64>> = vec![None; rd.size() as usize];
        for u in 0..self.ring.size() {
            let Some(e) = self.table[u as usize] else { continue };
            let v = rd.index_of(&self.ring.rep(u)) as usize;
            match table[v] {
                Some(w) if w != e => {
                    return Err(Error::Precondition(format!("character does not factor through {d}")));
                }
                _ => table[v] = Some(e),
            }
        }
        Self::finish(self.order.clone(), rd, self.n, table, Vec::new())
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Result<Self> {
        self.reduce_to(&self.conductor.clone())
    }

    /// Residues that are `1` modulo `d` (for `d | m`).
    fn one_mod(&self, d: &IdealLattice) -> Result<Vec<u64>> {
        let rd = Self::ring(&self.order, d)?;
        let one = rd.one();
        Ok((0..self.ring.size()).filter(|&u| self.ring.is_unit(u) && rd.index_of(&self.ring.rep(u)) == one).collect())
    }

    /// Splits the modulus as `P^e m'`; returns `(P^e, m')`.
    fn split_at(&self, p: &PrimeIdeal) -> Result<(IdealLattice, IdealLattice, u32)> {
        let e = self.order.valuation(p, self.ring.modulus()) as u32;
        let pe = self.order.ideal_pow(&p.ideal, e as i64)?;
        let rest = self.order.ideal_div(self.ring.modulus(), &pe)?;
        Ok((pe, rest, e))
    }

    /// The component on `(O/P^e)^x`: restriction to residues that are `1`
    /// away from `P`.
    pub fn component(&self, p: &PrimeIdeal) -> Result<Self> {
        let (pe, rest, _) = self.split_at(p)?;
        let rp = Self::ring(&self.order, &pe)?;
        let mut table: Vec<Option<u64>> = vec![None; rp.size() as usize];
        for u in self.one_mod(&rest)? {
            table[rp.index_of(&self.ring.rep(u)) as usize] = self.table[u as usize];
        }
        Self::finish(self.order.clone(), rp, self.n, table, Vec::new())
    }

    /// The component away from `P`, a character modulo `m'`.
    pub fn away_from(&self, p: &PrimeIdeal) -> Result<Self> {
        let (pe, rest, _) = self.split_at(p)?;
        let rr = Self::ring(&self.order, &rest)?;
        let mut table: Vec<Option<u64>> = vec![None; rr.size() as usize];
        for u in self.one_mod(&pe)? {
            table[rr.index_of(&self.ring.rep(u)) as usize] = self.table[u as usize];
        }
        Self::finish(self.order.clone(), rr, self.n, table, Vec::new())
    }

    /// Local component at the rational prime `q` of a character over `Q`:
    /// `c(u) = chi_q(u)` on units and `c(q) = chi'(q)^{-1}` with `chi'` the
    /// part away from `q`.
    pub fn local_at(&self, q: u64) -> Result<QpChar> {
        if self.order.degree() != 1 {
            return Err(Error::Precondition("local components are taken over Q".into()));
        }
        let pq = self.order.primes_above(q)?.remove(0);
        let units = self.component(&pq)?;
        let away = self.away_from(&pq)?;
        let at_q = frac(&-away.eval_int(&Int::from(q)).expect("q is prime to the rest"));
        Ok(QpChar { q, units, at_q })
    }
}

fn compute_conductor(
    order: &FieldOrder,
    ring: &ResidueRing,
    table: &[Option<u64>],
) -> Result<(IdealLattice, Vec<(PrimeIdeal, u32, u32)>)> {
    let m = ring.modulus();
    let mut exps = Vec::new();
    let mut cond = order.unit_ideal();
    for p in ring.primes() {
        let e = order.valuation(p, m) as u32;
        let pe = order.ideal_pow(&p.ideal, e as i64)?;
        let rest = order.ideal_div(m, &pe)?;
        let mut n = e;
        let mut pk = order.unit_ideal();
        for k in 0..e {
            let d = order.ideal_mul(&pk, &rest)?;
            let rd = ResidueRing::new(order, &d)?;
            let one = rd.one();
            let trivial =
                (0..ring.size()).all(|u| !matches!(table[u as usize], Some(x) if x != 0) || rd.index_of(&ring.rep(u)) != one);
            if trivial {
                n = k;
                break;
            }
            pk = order.ideal_mul(&pk, &p.ideal)?;
        }
        cond = order.ideal_mul(&cond, &order.ideal_pow(&p.ideal, n as i64)?)?;
        exps.push((p.clone(), e, n));
    }
    Ok((cond, exps))
}

/// `q`-adic valuation of a nonzero rational.
pub fn vq(x: &Rat, q: u64) -> i64 {
    let qi = Int::from(q);
    let mut v = 0i64;
    let (mut a, mut b) = (x.numer().abs(), x.denom().clone());
    while (&a % &qi).is_zero() {
        a /= &qi;
        v += 1;
    }
    while (&b % &qi).is_zero() {
        b /= &qi;
        v -= 1;
    }
    v
}

/// The `q`-adic fractional part of a rational, in `[0, 1)`.
pub fn frac_q(x: &Rat, q: u64) -> Rat {
    let qi = Int::from(q);
    let mut b = x.denom().clone();
    let mut qm = Int::one();
    while (&b % &qi).is_zero() {
        b /= &qi;
        qm *= &qi;
    }
    if qm.is_one() {
        return Rat::zero();
    }
    let binv = mod_inverse(&b, &qm);
    let a = (x.numer() * binv).mod_floor(&qm);
    Rat::new(a, qm)
}

fn mod_inverse(b: &Int, m: &Int) -> Int {
    let g = b.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

/// A character of `Q_q^x` of finite order: its restriction to `Z_q^x`
/// (a character modulo `q^k`) and its value at `q`.
#[derive(Clone, Debug)]
pub struct QpChar {
    pub q: u64,
    pub units: DirichletChar,
    pub at_q: Rat,
}

impl QpChar {
    pub fn unramified(q: u64, at_q: Rat) -> Result<Self> {
        let (o, r) = DirichletChar::ring_mod(1)?;
        Ok(QpChar { q, units: DirichletChar::trivial(o, r)?, at_q: frac(&at_q) })
    }

    pub fn conductor_exponent(&self) -> u32 {
        self.units.conductor_exponent_at(self.q)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        assert!(!x.is_zero());
        let v = vq(x, self.q);
        let qv = Rat::from_integer(Int::from(self.q).pow(v.unsigned_abs() as u32));
        let w = if v >= 0 { x / qv } else { x * qv };
        let m = Int::from(self.units.modulus_norm());
        let res = (w.numer() * mod_inverse(w.denom(), &m)).mod_floor(&m);
        let u = self.units.eval_int(&res).expect("q-adic unit");
        frac(&(u + &self.at_q * Rat::from_integer(Int::from(v))))
    }

    pub fn inverse(&self) -> Self {
        QpChar { q: self.q, units: self.units.inverse(), at_q: frac(&-&self.at_q) }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.q != o.q {
            return Err(Error::Precondition("local characters at different primes".into()));
        }
        Ok(QpChar { q: self.q, units: self.units.mul_lifted(&o.units)?, at_q: frac(&(&self.at_q + &o.at_q)) })
    }

    pub fn is_trivial(&self) -> bool {
        self.units.is_trivial() && self.at_q.is_zero()
    }
}

/// The character `c = base o N_{F/Q}` of `F_P^x`, where `P` is the only
/// prime of `F` above `q`; global norms then agree with local ones.
#[derive(Clone, Debug)]
pub struct LocalChar {
    pub field: Arc<FieldOrder>,
    pub prime: PrimeIdeal,
    pub base: QpChar,
    /// Conductor exponent `n_P(c)`.
    pub conductor: u32,
    /// `ord_P` of the different of `F`.
    pub different: u32,
    pub uniformizer: FieldElement,
}

/// An element of `P` of valuation one, searched among small vectors.
pub fn find_uniformizer(k: &FieldOrder, p: &PrimeIdeal) -> Result<FieldElement> {
    let n = k.degree();
    if n == 1 {
        return Ok(k.element_i64(&[p.p as i64]));
    }
    for cap in 1..=4i64 {
        let mut x = vec![-cap; n];
        loop {
            if x.iter().any(|c| c.abs() == cap) {
                let e = k.element_i64(&x);
                if !e.is_zero() && k.element_valuation(p, &e)? == 1 {
                    return Ok(e);
                }
            }
            let mut i = 0;
            while i < n {
                x[i] += 1;
                if x[i] <= cap {
                    break;
                }
                x[i] = -cap;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Err(Error::LimitExceeded(format!("no small uniformizer for the prime above {}", p.p)))
}

impl LocalChar {
    pub fn new(field: Arc<FieldOrder>, base: QpChar) -> Result<Self> {
        let mut ps = field.primes_above(base.q)?;
        if ps.len() != 1 {
            return Err(Error::Precondition(format!(
                "{} has {} primes above {}; local characters need exactly one",
                field.label(),
                ps.len(),
                base.q
            )));
        }
        let prime = ps.remove(0);
        let different = field.valuation(&prime, &field.different()?) as u32;
        let uniformizer = find_uniformizer(&field, &prime)?;
        let mut c = LocalChar { field, prime, base, conductor: 0, different, uniformizer };
        c.conductor = if c.field.degree() == 1 {
            c.base.conductor_exponent()
        } else {
            let nq = c.base.conductor_exponent();
            if nq == 0 {
                0
            } else {
                // N(1 + P^m) lies in 1 + q^{ceil(m/e)}
                let k = c.prime.e * (nq - 1) + 1;
                c.residue_char(k)?.conductor_exponent_at(c.base.q)
            }
        };
        Ok(c)
    }

    pub fn over_q(base: QpChar) -> Result<Self> {
        Self::new(rationals(), base)
    }

    /// `ord_P(x)` for nonzero `x`.
    pub fn ord(&self, x: &FieldElement) -> Result<i64> {
        let nm = self.field.norm_of(&x.coords);
        Ok(vq(&nm, self.base.q) / self.prime.f as i64)
    }

    /// `c(x)` as an exponent in `Q/Z`.
    pub fn eval(&self, x: &FieldElement) -> Rat {
        self.base.eval(&self.field.norm_of(&x.coords))
    }

    /// The restriction of `c` to `(O/P^k)^x`.
    pub fn residue_char(&self, k: u32) -> Result<DirichletChar> {
        let pk = self.field.ideal_pow(&self.prime.ideal, k as i64)?;
        let ring = DirichletChar::ring(&self.field, &pk)?;
        let r2 = ring.clone();
        let f = &self.field;
        DirichletChar::from_fn(f.clone(), ring, |u| self.base.eval(&f.norm_of(&f.element_i64(&r2.rep(u)).coords)))
    }

    pub fn inverse(&self) -> Self {
        LocalChar { base: self.base.inverse(), ..self.clone() }
    }

    pub fn norm_of_prime(&self) -> u64 {
        self.prime.norm()
    }

    /// Representatives of `(O/P^n)^x` for the conductor exponent `n`; the
    /// single residue `1` when `n = 0`.
    pub fn unit_reps(&self) -> Result<Vec<FieldElement>> {
        if self.conductor == 0 {
            return Ok(vec![self.field.one()]);
        }
        let pn = self.field.ideal_pow(&self.prime.ideal, self.conductor as i64)?;
        let ring = ResidueRing::new(&self.field, &pn)?;
        Ok(ring.units().into_iter().map(|u| self.field.element_i64(&ring.rep(u))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn conductor_examples() {
        let triv = DirichletChar::all_mod(12).unwrap().into_iter().find(|c| c.is_trivial()).unwrap();
        assert_eq!(triv.conductor_norm(), Int::from(1));
        // quadratic character mod 8 induced to 24
        let (q, r24) = DirichletChar::ring_mod(24).unwrap();
        let chi8 = DirichletChar::all_mod(8)
            .unwrap()
            .into_iter()
            .find(|c| c.is_primitive() && c.eval_int(&Int::from(3)) == Some(rat(1, 2)) && c.eval_int(&Int::from(5)) == Some(rat(1, 2)))
            .unwrap();
        let lifted = chi8.lift(r24).unwrap();
        assert_eq!(lifted.conductor_norm(), Int::from(8));
        assert_eq!(lifted.order().label(), q.label());
        // order-3 character mod 9
        let c3 = DirichletChar::all_mod(9).unwrap().into_iter().find(|c| c.char_order() == 3).unwrap();
        assert_eq!(c3.conductor_norm(), Int::from(9));
    }

    #[test]
    fn images_define_characters() {
        let (q, r) = DirichletChar::ring_mod(7).unwrap();
        let g = r.from_integer(3);
        let c = DirichletChar::from_images(q.clone(), r.clone(), &[g], &[rat(1, 6)]).unwrap();
        assert_eq!(c.eval_int(&Int::from(2)), Some(rat(2, 6)));
        assert_eq!(c.char_order(), 6);
        assert!(DirichletChar::from_images(q.clone(), r.clone(), &[g], &[rat(1, 4)]).is_err());
        let two = r.from_integer(2);
        assert!(DirichletChar::from_images(q, r, &[two], &[rat(1, 3)]).is_err());
    }

    #[test]
    fn local_components() {
        // chi = chi_3 * chi_7 of conductor 21
        let cs = DirichletChar::all_mod(21).unwrap();
        let c = cs.iter().find(|c| c.is_primitive() && c.char_order() == 6).unwrap();
        let c3 = c.local_at(3).unwrap();
        let c7 = c.local_at(7).unwrap();
        assert_eq!(c3.conductor_exponent(), 1);
        assert_eq!(c7.conductor_exponent(), 1);
        // product formula on a rational: chi(x) = prod of components for units
        for x in [2i64, 5, 10, 11] {
            let xv = Rat::from_integer(Int::from(x));
            let lhs = c.eval_int(&Int::from(x)).unwrap();
            let rhs = frac(&(c3.units.eval_int(&Int::from(x)).unwrap() + c7.units.eval_int(&Int::from(x)).unwrap()));
            assert_eq!(lhs, rhs);
            let _ = c3.eval(&xv);
        }
        assert_eq!(frac_q(&rat(5, 9), 3), rat(5, 9));
        assert_eq!(frac_q(&rat(1, 6), 3), rat(2, 3));
        assert_eq!(vq(&rat(18, 5), 3), 2);
    }
}
