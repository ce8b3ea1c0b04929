//! Finite abelian groups given by generators and a multiplication oracle.
//! The group is enumerated by breadth-first search on its Cayley graph; the
//! relation lattice is read off the graph and put in Smith normal form.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::{det_int, hnf_modular, snf_with_cols};
use super::Int;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    TooLarge(usize),
}

#[derive(Clone, Debug)]
pub struct FiniteAbelianGroup<K: Ord + Clone> {
    /// Nontrivial invariant factors, each dividing the next.
    pub invariants: Vec<u64>,
    /// One generator per invariant factor.
    pub generators: Vec<K>,
    dlog: BTreeMap<K, Vec<u64>>,
    by_exp: BTreeMap<Vec<u64>, K>,
}

impl<K: Ord + Clone> FiniteAbelianGroup<K> {
    /// Builds the group generated by `gens` inside an ambient group with the
    /// given identity and multiplication. Fails if more than `limit`
    /// elements are reached.
    pub fn generate(
        identity: K,
        gens: &[K],
        mut mul: impl FnMut(&K, &K) -> K,
        limit: usize,
    ) -> Result<Self, GroupError> {
        let g = gens.len();
        let mut seen: BTreeMap<K, Vec<i64>> = BTreeMap::new();
        seen.insert(identity.clone(), vec![0; g]);
        let mut queue = VecDeque::new();
        queue.push_back(identity.clone());
        let mut relations: Vec<Vec<i64>> = Vec::new();
        while let Some(e) = queue.pop_front() {
            let v = seen[&e].clone();
            for (i, gi) in gens.iter().enumerate() {
                let f = mul(&e, gi);
                let mut w = v.clone();
                w[i] += 1;
                match seen.get(&f) {
                    Some(u) => {
                        let rel: Vec<i64> = w.iter().zip(u).map(|(a, b)| a - b).collect();
                        if rel.iter().any(|&x| x != 0) {
                            relations.push(rel);
                        }
                    }
                    None => {
                        if seen.len() >= limit {
                            return Err(GroupError::TooLarge(limit));
                        }
                        seen.insert(f.clone(), w);
                        queue.push_back(f);
                    }
                }
            }
        }
        let order = seen.len();
        if g == 0 || order == 1 {
            let mut dlog = BTreeMap::new();
            dlog.insert(identity.clone(), Vec::new());
            let mut by_exp = BTreeMap::new();
            by_exp.insert(Vec::new(), identity);
            return Ok(FiniteAbelianGroup { invariants: Vec::new(), generators: Vec::new(), dlog, by_exp });
        }
        let d = Int::from(order as u64);
        let mut h: Vec<Vec<Int>> = Vec::new();
        for chunk in relations.chunks(64) {
            let mut rows = h.clone();
            rows.extend(chunk.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()));
            h = hnf_modular(&rows, &d);
            if h.len() == g && det_int(&h) == d {
                break;
            }
        }
        let (diag, v, _) = snf_with_cols(&h, g);
        let keep: Vec<usize> = (0..g).filter(|&i| !diag[i].is_one()).collect();
        let invariants: Vec<u64> = keep.iter().map(|&i| diag[i].to_u64().unwrap()).collect();
        let mut dlog = BTreeMap::new();
        let mut by_exp = BTreeMap::new();
        for (k, ov) in &seen {
            let e: Vec<u64> = keep
                .iter()
                .zip(&invariants)
                .map(|(&j, &m)| {
                    let s: Int = ov.iter().zip(v.iter()).map(|(a, row)| Int::from(*a) * &row[j]).sum();
                    let mm = Int::from(m);
                    ((s % &mm + &mm) % &mm).to_u64().unwrap()
                })
                .collect();
            by_exp.insert(e.clone(), k.clone());
            dlog.insert(k.clone(), e);
        }
        let generators = (0..keep.len())
            .map(|pos| {
                let mut e = vec![0u64; keep.len()];
                e[pos] = 1;
                by_exp[&e].clone()
            })
            .collect();
        Ok(FiniteAbelianGroup { invariants, generators, dlog, by_exp })
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Exponent of the group (largest invariant).
    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn dlog(&self, k: &K) -> Option<&[u64]> {
        self.dlog.get(k).map(|v| v.as_slice())
    }

    pub fn element(&self, exps: &[u64]) -> Option<&K> {
        let e: Vec<u64> = exps.iter().zip(&self.invariants).map(|(a, m)| a % m).collect();
        self.by_exp.get(&e)
    }

    pub fn contains(&self, k: &K) -> bool {
        self.dlog.contains_key(k)
    }

    pub fn elements(&self) -> impl Iterator<Item = &K> {
        self.dlog.keys()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Sum of exponent vectors (group law in dlog coordinates).
    pub fn add_exps(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.invariants).map(|((x, y), m)| (x + y) % m).collect()
    }

    pub fn neg_exps(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.invariants).map(|(x, m)| (m - x % m) % m).collect()
    }

    pub fn is_zero_exps(a: &[u64]) -> bool {
        a.iter().all(|x| x.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_mod_15() {
        let g = FiniteAbelianGroup::generate(1u64, &[2, 7, 11, 13, 14], |a, b| a * b % 15, 100).unwrap();
        assert_eq!(g.invariants, vec![2, 4]);
        assert_eq!(g.order(), 8);
        for x in [1u64, 2, 4, 7, 8, 11, 13, 14] {
            let e = g.dlog(&x).unwrap().to_vec();
            assert_eq!(g.element(&e), Some(&x));
        }
    }

    #[test]
    fn units_mod_9_cyclic() {
        let g = FiniteAbelianGroup::generate(1u64, &[2], |a, b| a * b % 9, 100).unwrap();
        assert_eq!(g.invariants, vec![6]);
        assert_eq!(g.generators.len(), 1);
        assert_eq!(g.dlog(&g.generators[0]), Some(&[1u64][..]));
    }
}
