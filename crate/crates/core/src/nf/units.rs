//! Unit groups of totally real fields: validated preset generators or a
//! bounded search for elements of norm ±1.

use alloc::vec::Vec;
use alloc::{format, vec};
use num_traits::{Float, One, Signed, Zero};

use super::field::FieldOrder;
use super::order::FieldElement;
use crate::arith::{rat_to_f64, Int, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitSource {
    Preset,
    Searched(i64),
}

#[derive(Clone, Debug)]
pub struct UnitGroupData {
    /// `{1, -1}`.
    pub torsion: Vec<FieldElement>,
    pub fundamental: Vec<FieldElement>,
    pub source: UnitSource,
}

impl UnitGroupData {
    pub fn rank(&self) -> usize {
        self.fundamental.len()
    }

    /// Generators of the unit group including `-1`.
    pub fn generators(&self) -> Vec<FieldElement> {
        let mut g = vec![self.torsion[1].clone()];
        g.extend(self.fundamental.iter().cloned());
        g
    }
}

/// Approximate log embedding `(log|sigma_j(x)|)_j`.
pub fn log_embedding(k: &FieldOrder, x: &FieldElement) -> Vec<f64> {
    k.embed(x)
        .iter()
        .map(|iv| {
            let mid = (&iv.lo + &iv.hi) / Rat::from_integer(Int::from(2));
            Float::ln(Float::abs(rat_to_f64(&mid)))
        })
        .collect()
}

fn det_f64(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap()).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    det
}

/// Absolute regulator of a list of units (drops the last embedding).
pub fn regulator(k: &FieldOrder, units: &[FieldElement]) -> f64 {
    let r = units.len();
    if r == 0 {
        return 1.0;
    }
    let rows: Vec<Vec<f64>> = units.iter().map(|u| log_embedding(k, u)[..r].to_vec()).collect();
    det_f64(rows).abs()
}

const INDEPENDENCE_TOL: f64 = 1e-6;

fn torsion(k: &FieldOrder) -> Vec<FieldElement> {
    vec![k.one(), k.from_rational(-Rat::one())]
}

/// Validates preset units: integral, norm ±1, independent logs, full rank.
pub fn validate_units(k: &FieldOrder, units: Vec<FieldElement>) -> Result<UnitGroupData> {
    let r = k.degree() - 1;
    for u in &units {
        k.check(u)?;
        if !k.is_unit(u) {
            return Err(Error::InvalidField(format!("{}: {u} is not a unit", k.label())));
        }
    }
    if units.len() != r {
        return Err(Error::InsufficientUnits(format!("{}: need {r} units, got {}", k.label(), units.len())));
    }
    if regulator(k, &units) < INDEPENDENCE_TOL {
        return Err(Error::InsufficientUnits(format!("{}: preset units are dependent", k.label())));
    }
    Ok(UnitGroupData { torsion: torsion(k), fundamental: units, source: UnitSource::Preset })
}

/// Normalises a unit so that its largest-root embedding is positive and
/// greater than one.
fn normalize(k: &FieldOrder, u: &FieldElement) -> FieldElement {
    let last = k.degree() - 1;
    let mut x = u.clone();
    if k.signs(&x)[last] < 0 {
        x = k.element_neg(&x);
    }
    let iv = &k.embed(&x)[last];
    if iv.hi < Rat::one() {
        x = k.element_inv(&x).expect("unit");
    }
    x
}

/// Bounded search over integral elements with all coordinates in
/// `[-cap, cap]`; picks independent units of smallest regulator.
pub fn search_units(k: &FieldOrder, cap: i64) -> Result<UnitGroupData> {
    let n = k.degree();
    let r = n - 1;
    if r == 0 {
        return Ok(UnitGroupData { torsion: torsion(k), fundamental: Vec::new(), source: UnitSource::Searched(cap) });
    }
    let mut found: Vec<FieldElement> = Vec::new();
    let mut x = vec![-cap; n];
    loop {
        let nm = k.norm_int(&x.iter().map(|&c| Int::from(c)).collect::<Vec<_>>());
        if nm.abs().is_one() {
            let e = normalize(k, &k.element_i64(&x));
            let one = k.one();
            if e != one && !found.contains(&e) {
                found.push(e);
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
    found.sort_by(|a, b| {
        let ta = k.t2_int(&a.int_coords().unwrap());
        let tb = k.t2_int(&b.int_coords().unwrap());
        ta.cmp(&tb).then_with(|| k.canonical_cmp(a, b))
    });
    found.truncate(40);
    let best = if r <= 3 { best_subset(k, &found, r) } else { greedy(k, &found, r) };
    match best {
        Some(units) => Ok(UnitGroupData { torsion: torsion(k), fundamental: units, source: UnitSource::Searched(cap) }),
        None => Err(Error::InsufficientUnits(format!(
            "{}: search with cap {cap} found no {r} independent units",
            k.label()
        ))),
    }
}

fn best_subset(k: &FieldOrder, cands: &[FieldElement], r: usize) -> Option<Vec<FieldElement>> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx: Vec<usize> = (0..r).collect();
    if cands.len() < r {
        return None;
    }
    loop {
        let units: Vec<FieldElement> = idx.iter().map(|&i| cands[i].clone()).collect();
        let reg = regulator(k, &units);
        if reg > INDEPENDENCE_TOL && best.as_ref().is_none_or(|(b, _)| reg < *b * (1.0 - 1e-9)) {
            best = Some((reg, idx.clone()));
        }
        let mut advanced = false;
        let mut i = r;
        while i > 0 {
            i -= 1;
            if idx[i] < cands.len() - r + i {
                idx[i] += 1;
                for j in i + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return best.map(|(_, ix)| ix.into_iter().map(|i| cands[i].clone()).collect());
        }
    }
}

fn greedy(k: &FieldOrder, cands: &[FieldElement], r: usize) -> Option<Vec<FieldElement>> {
    let mut chosen: Vec<FieldElement> = Vec::new();
    for c in cands {
        let mut trial = chosen.clone();
        trial.push(c.clone());
        let m = trial.len();
        let rows: Vec<Vec<f64>> = trial.iter().map(|u| log_embedding(k, u)[..m].to_vec()).collect();
        if det_f64(rows).abs() > INDEPENDENCE_TOL {
            chosen = trial;
            if chosen.len() == r {
                return Some(chosen);
            }
        }
    }
    None
}

/// `sum_i prod_j max(|sigma_i e_j|, 1/|sigma_i e_j|)` over the fundamental
/// units: after reduction by units every `x` has
/// `sum_i sigma_i(x)^2 <= C |N(x)|^(2/n)`.
pub fn coverage_constant(k: &FieldOrder, units: &UnitGroupData) -> Rat {
    let n = k.degree();
    let embs: Vec<_> = units.fundamental.iter().map(|e| k.embed(e)).collect();
    let mut c = Rat::zero();
    for i in 0..n {
        let mut prod = Rat::one();
        for e in &embs {
            let hi = e[i].abs_upper();
            let lo = e[i].abs_lower();
            let inv = if lo.is_zero() { hi.clone() } else { lo.recip() };
            prod *= if hi > inv { hi } else { inv };
        }
        c += prod;
    }
    c
}

/// Preset units if supplied (validated), otherwise a bounded search.
pub fn unit_group(k: &FieldOrder, preset: Option<Vec<FieldElement>>, search_cap: i64) -> Result<UnitGroupData> {
    match preset {
        Some(u) => validate_units(k, u),
        None => search_units(k, search_cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_found() {
        let k = FieldOrder::monogenic("Q(sqrt5)", &[-1, -1, 1]).unwrap();
        let u = search_units(&k, 3).unwrap();
        assert_eq!(u.fundamental, vec![k.element_i64(&[0, 1])]);
    }

    #[test]
    fn zeta9_rank_two() {
        let k = FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap();
        let u = search_units(&k, 2).unwrap();
        assert_eq!(u.rank(), 2);
        assert!(regulator(&k, &u.fundamental) > 0.5);
        let q = FieldOrder::monogenic("Q", &[0, 1]).unwrap();
        assert_eq!(search_units(&q, 1).unwrap().rank(), 0);
    }

    #[test]
    fn dependent_preset_rejected() {
        let k = FieldOrder::monogenic("Q(zeta9)+", &[1, -3, 0, 1]).unwrap();
        let c = k.element_i64(&[0, 1, 0]);
        let c2 = k.element_mul(&c, &c).unwrap();
        assert!(matches!(validate_units(&k, vec![c, c2]), Err(Error::InsufficientUnits(_))));
    }
}
