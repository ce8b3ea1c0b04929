//! Cyclic towers `F'/F` of odd prime degree `p`: embedding, the Galois
//! action, relative trace and different, and the transfer map on residues.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

use crate::arith::interval::Interval;
use crate::arith::matrix::{hnf, left_kernel, solve_left_rat, IntMat};
use crate::arith::poly::Poly;
use crate::arith::{Int, Rat};
use crate::error::{Error, Result};
use crate::nf::residue::ResidueRing;
use crate::nf::units::UnitGroupData;
use crate::nf::{FieldElement, FieldOrder, IdealLattice};

#[derive(Clone, Debug)]
pub struct TowerData {
    pub label: String,
    pub base: Arc<FieldOrder>,
    pub top: Arc<FieldOrder>,
    pub p: u64,
    /// Row `i`: coordinates of the base basis element `e_i` in the top basis.
    pub embed_matrix: Vec<Vec<i64>>,
    /// Row `i`: coordinates of `gamma(e'_i)`.
    pub gamma: Vec<Vec<i64>>,
    pub rel_different: IdealLattice,
    pub xi: Option<FieldElement>,
}

/// Outcome of the search for a totally positive generator of the relative
/// different.
#[derive(Clone, Debug)]
pub struct XiSearch {
    pub different: IdealLattice,
    pub generator: Option<FieldElement>,
    pub xi: Option<FieldElement>,
    pub all_found: Vec<FieldElement>,
    pub depth: u32,
}

fn apply_matrix(m: &[Vec<i64>], x: &[Rat]) -> Vec<Rat> {
    let n = m.first().map_or(0, |r| r.len());
    let mut out = vec![Rat::zero(); n];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, &t) in out.iter_mut().zip(row) {
            if t != 0 {
                *o += xi * Rat::from_integer(Int::from(t));
            }
        }
    }
    out
}

impl TowerData {
    /// Builds a tower from the image of the base generator in the top field
    /// and the image of the top generator under `gamma`, both given as
    /// polynomials in the top generator.
    pub fn new(
        label: &str,
        base: Arc<FieldOrder>,
        top: Arc<FieldOrder>,
        p: u64,
        base_gen_image: &Poly,
        gamma_image: &Poly,
    ) -> Result<Self> {
        if p < 3 || !crate::arith::is_prime(p) || p.is_multiple_of(2) {
            return Err(Error::Precondition(format!("{label}: tower degree must be an odd prime, got {p}")));
        }
        if top.degree() != base.degree() * p as usize {
            return Err(Error::CorruptTower(format!("{label}: [F':Q] != p [F:Q]")));
        }
        let to_i64 = |x: &FieldElement, what: &str| -> Result<Vec<i64>> {
            x.i64_coords().ok_or_else(|| Error::CorruptTower(format!("{label}: {what} is not integral")))
        };
        let bgen = top.from_poly(base_gen_image);
        let embed_matrix = base
            .basis_polys()
            .iter()
            .map(|b| to_i64(&top.from_poly(&b.compose(&top.to_poly(&bgen))), "embedded basis"))
            .collect::<Result<Vec<_>>>()?;
        let gamma = top
            .basis_polys()
            .iter()
            .map(|b| to_i64(&top.from_poly(&b.compose(gamma_image)), "gamma image"))
            .collect::<Result<Vec<_>>>()?;
        let rel_different = {
            let dt = top.different()?;
            let db = base.different()?;
            let ext = Self::extend_with(&top, &embed_matrix, &db)?;
            top.ideal_div(&dt, &ext)?
        };
        let t = TowerData {
            label: label.into(),
            base,
            top,
            p,
            embed_matrix,
            gamma,
            rel_different,
            xi: None,
        };
        t.validate()?;
        Ok(t)
    }

    fn extend_with(top: &FieldOrder, em: &[Vec<i64>], a: &IdealLattice) -> Result<IdealLattice> {
        let gens: Vec<FieldElement> =
            a.basis().iter().map(|r| top.element(apply_matrix(em, r))).collect();
        top.ideal_generated(&gens)
    }

    fn validate(&self) -> Result<()> {
        let top = &self.top;
        let n = top.degree();
        let err = |m: &str| Err(Error::CorruptTower(format!("{}: {m}", self.label)));
        // ring homomorphism
        for i in 0..n {
            for j in 0..n {
                let eij = top.element_i64(&top.table()[i][j]);
                let lhs = self.galois(1, &eij);
                let rhs = top.element_mul(&top.element_i64(&self.gamma[i]), &top.element_i64(&self.gamma[j]))?;
                if lhs != rhs {
                    return err("gamma is not multiplicative");
                }
            }
        }
        let th = top.generator();
        if self.galois(1, &th) == th {
            return err("gamma is the identity");
        }
        if self.galois(self.p as i64, &th) != th {
            return err("gamma^p is not the identity");
        }
        for i in 0..self.base.degree() {
            let e = top.element_i64(&self.embed_matrix[i]);
            if self.galois(1, &e) != e {
                return err("gamma does not fix the base");
            }
        }
        // embedding is a ring homomorphism
        let bt = self.base.table();
        for i in 0..self.base.degree() {
            for j in 0..self.base.degree() {
                let lhs = self.embed(&self.base.element_i64(&bt[i][j]));
                let rhs = top.element_mul(
                    &top.element_i64(&self.embed_matrix[i]),
                    &top.element_i64(&self.embed_matrix[j]),
                )?;
                if lhs != rhs {
                    return err("base embedding is not multiplicative");
                }
            }
        }
        for i in 0..n {
            self.rel_trace(&top.basis_element(i))?;
        }
        // gamma permutes the real embeddings
        let a = sorted(top.embed(&th));
        let b = sorted(top.embed(&self.galois(1, &th)));
        for (x, y) in a.iter().zip(&b) {
            if x.hi < y.lo || y.hi < x.lo {
                return err("gamma does not permute the real embeddings");
            }
        }
        Ok(())
    }

    pub fn embed(&self, x: &FieldElement) -> FieldElement {
        self.top.element(apply_matrix(&self.embed_matrix, &x.coords))
    }

    /// `gamma^i(x)`, any integer `i`.
    pub fn galois(&self, i: i64, x: &FieldElement) -> FieldElement {
        let k = i.rem_euclid(self.p as i64);
        let mut c = x.coords.clone();
        for _ in 0..k {
            c = apply_matrix(&self.gamma, &c);
        }
        self.top.element(c)
    }

    pub fn galois_i64(&self, x: &[i64]) -> Vec<i64> {
        let n = x.len();
        let mut out = vec![0i64; n];
        for (xi, row) in x.iter().zip(&self.gamma) {
            if *xi != 0 {
                for (o, t) in out.iter_mut().zip(row) {
                    *o += xi * t;
                }
            }
        }
        out
    }

    /// Preimage of a top element lying in the embedded base.
    pub fn descend(&self, z: &FieldElement) -> Option<FieldElement> {
        let em: Vec<Vec<Rat>> = self
            .embed_matrix
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
            .collect();
        // pick pivot columns and verify the candidate
        let cols = pivot_columns(&self.embed_matrix);
        let sub: Vec<Vec<Rat>> = em.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        let rhs: Vec<Rat> = cols.iter().map(|&c| z.coords[c].clone()).collect();
        let y = solve_left_rat(&sub, &rhs)?;
        let cand = self.base.element(y);
        (self.embed(&cand) == *z).then_some(cand)
    }

    pub fn rel_trace(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut s = self.top.zero();
        for i in 0..self.p as i64 {
            s = self.top.element_add(&s, &self.galois(i, x))?;
        }
        self.descend(&s)
            .ok_or_else(|| Error::CorruptTower(format!("{}: relative trace left the base", self.label)))
    }

    pub fn rel_norm(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut s = self.top.one();
        for i in 0..self.p as i64 {
            s = self.top.element_mul(&s, &self.galois(i, x))?;
        }
        self.descend(&s)
            .ok_or_else(|| Error::CorruptTower(format!("{}: relative norm left the base", self.label)))
    }

    /// `m O'` for an ideal `m` of the base.
    pub fn extend_ideal(&self, m: &IdealLattice) -> Result<IdealLattice> {
        Self::extend_with(&self.top, &self.embed_matrix, m)
    }

    /// `M ∩ O_F` for an integral ideal `M` of the top order.
    pub fn contract_ideal(&self, m: &IdealLattice) -> Result<IdealLattice> {
        if !m.is_integral() {
            return Err(Error::Precondition("contraction needs an integral ideal".into()));
        }
        let mb = self.base.degree();
        // (y, z) with y E - z H = 0
        let mut a: IntMat = self.embed_matrix.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
        for r in &m.hnf {
            a.push(r.iter().map(|x| -x).collect());
        }
        let ker = left_kernel(&a);
        let rows: IntMat = ker.iter().map(|v| v[..mb].to_vec()).collect();
        let h = hnf(&rows);
        let rows: Vec<Vec<Rat>> = h.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
        self.base.ideal_from_rows(&rows)
    }

    /// `gamma(M)` for an ideal of the top order.
    pub fn galois_ideal(&self, i: i64, m: &IdealLattice) -> Result<IdealLattice> {
        let rows: Vec<Vec<Rat>> = m.basis().iter().map(|r| self.galois(i, &self.top.element(r.clone())).coords).collect();
        self.top.ideal_from_rows(&rows)
    }

    pub fn is_gamma_stable(&self, m: &IdealLattice) -> Result<bool> {
        Ok(self.galois_ideal(1, m)? == *m)
    }

    /// Searches a totally positive generator of the relative different among
    /// `+-g u` for a generator `g` and units `u` with exponents in
    /// `[-depth, depth]`.
    pub fn rel_different_with_xi(&self, units: &UnitGroupData, depth: u32) -> Result<XiSearch> {
        let top = &self.top;
        let d = self.rel_different.clone();
        let generator = principal_generator(top, &d)?;
        let mut all = Vec::new();
        if let Some(g) = &generator {
            let r = units.rank();
            let mut exps = vec![-(depth as i64); r];
            loop {
                let mut u = top.one();
                for (e, eps) in exps.iter().zip(&units.fundamental) {
                    u = top.element_mul(&u, &top.element_pow(eps, *e)?)?;
                }
                for s in [1i64, -1] {
                    let cand = top.element_scale(&top.element_mul(g, &u)?, &Rat::from_integer(Int::from(s)));
                    if top.is_totally_positive(&cand) && !all.contains(&cand) {
                        all.push(cand);
                    }
                }
                let mut i = 0;
                while i < r {
                    exps[i] += 1;
                    if exps[i] <= depth as i64 {
                        break;
                    }
                    exps[i] = -(depth as i64);
                    i += 1;
                }
                if i == r {
                    break;
                }
            }
        }
        top.sort_canonical(&mut all);
        Ok(XiSearch { different: d, xi: all.first().cloned(), generator, all_found: all, depth })
    }

    /// The natural map `O_F / m -> O_F' / m O_F'` as a table on residue
    /// indices, together with both rings.
    pub fn residue_ver(&self, m: &IdealLattice) -> Result<ResidueVer> {
        let src = ResidueRing::new(&self.base, m)?;
        let dst_ideal = self.extend_ideal(m)?;
        let dst = ResidueRing::new(&self.top, &dst_ideal)?;
        let table = (0..src.size())
            .map(|i| {
                let x = self.base.element_i64(&src.rep(i));
                dst.index_of_element(&self.embed(&x)).expect("integral")
            })
            .collect();
        Ok(ResidueVer { src: Arc::new(src), dst: Arc::new(dst), table })
    }

    /// Permutation of residue indices induced by `gamma` on `O'/M` for a
    /// gamma-stable `M`.
    pub fn residue_galois(&self, ring: &ResidueRing) -> Result<Vec<u64>> {
        if !self.is_gamma_stable(ring.modulus())? {
            return Err(Error::Precondition("modulus is not Galois-stable".into()));
        }
        Ok((0..ring.size()).map(|i| ring.index_of(&self.galois_i64(&ring.rep(i)))).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ResidueVer {
    pub src: Arc<ResidueRing>,
    pub dst: Arc<ResidueRing>,
    pub table: Vec<u64>,
}

fn sorted(v: Vec<Interval>) -> Vec<Interval> {
    let mut v = v;
    v.sort_by(|a, b| a.lo.cmp(&b.lo));
    v
}

fn pivot_columns(m: &[Vec<i64>]) -> Vec<usize> {
    let rows: Vec<Vec<Rat>> = m.iter().map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut a = rows;
    let mut cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                let rr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&rr) {
                    *x -= &f * y;
                }
            }
        }
        cols.push(c);
        r += 1;
    }
    cols
}

/// A generator of a principal ideal, searched among short elements of norm
/// equal to the ideal norm; `None` if the search budget finds none.
pub fn principal_generator(k: &FieldOrder, a: &IdealLattice) -> Result<Option<FieldElement>> {
    let target = k.ideal_norm(a);
    let n = k.degree() as u32;
    // start with a bound a little above the AM-GM minimum n * N^(2/n)
    let base = crate::arith::ceil_root(&crate::arith::ceil_rat(&(&target * &target)), n);
    let mut bound = Rat::from_integer(base * Int::from(n as u64 * 4));
    for _ in 0..8 {
        let mut cands = match k.short_elements(a, &bound, 5_000_000) {
            Ok(c) => c,
            Err(_) => return Ok(None),
        };
        cands.retain(|x| num_traits::Signed::abs(&k.norm_of(&x.coords)) == target);
        if !cands.is_empty() {
            cands.sort_by(|x, y| {
                k.t2_int(&x.int_coords().unwrap_or_default())
                    .cmp(&k.t2_int(&y.int_coords().unwrap_or_default()))
                    .then_with(|| k.canonical_cmp(x, y))
            });
            return Ok(Some(cands.swap_remove(0)));
        }
        bound *= Rat::from_integer(Int::from(4));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::nf::units::search_units;

    fn zeta9_tower() -> TowerData {
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1]).unwrap());
        let k = Arc::new(FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap());
        TowerData::new("zeta9", q, k, 3, &Poly::from_i64(&[0]), &Poly::from_i64(&[-2, 0, 1])).unwrap()
    }

    #[test]
    fn trace_and_galois() {
        let t = zeta9_tower();
        let c = t.top.generator();
        assert_eq!(t.galois(1, &c), t.top.element_i64(&[-2, 0, 1]));
        assert_eq!(t.galois(3, &c), c);
        assert_eq!(t.rel_trace(&c).unwrap(), t.base.element_i64(&[0]));
        assert_eq!(t.rel_trace(&t.top.one()).unwrap(), t.base.element_i64(&[3]));
        assert_eq!(t.top.ideal_norm(&t.rel_different), rat(81, 1));
    }

    #[test]
    fn xi_is_found() {
        let t = zeta9_tower();
        let u = search_units(&t.top, 2).unwrap();
        let s = t.rel_different_with_xi(&u, 6).unwrap();
        let xi = s.xi.unwrap();
        assert!(t.top.is_totally_positive(&xi));
        assert_eq!(t.top.principal_ideal(&xi).unwrap(), t.rel_different);
    }

    #[test]
    fn ver_is_multiplicative() {
        let t = zeta9_tower();
        let m = t.base.rational_ideal(&rat(9, 1)).unwrap();
        let v = t.residue_ver(&m).unwrap();
        for a in 0..9u64 {
            for b in 0..9u64 {
                let ab = v.src.mul(&t.base, a, b);
                assert_eq!(v.table[ab as usize], v.dst.mul(&t.top, v.table[a as usize], v.table[b as usize]));
            }
        }
        let c = t.contract_ideal(v.dst.modulus()).unwrap();
        assert_eq!(c, m);
    }
}
