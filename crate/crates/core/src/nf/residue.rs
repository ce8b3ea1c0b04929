//! Finite quotients `O / m` of an order by an integral ideal, with residues
//! indexed by their canonical Hermite representatives.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{ToPrimitive, Zero};

use super::ideal::IdealLattice;
use super::order::{FieldElement, Order};
use super::primes::PrimeIdeal;
use crate::arith::abelian::{FiniteAbelianGroup, GroupError};
use crate::arith::{factor_u64, Int};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ResidueRing {
    modulus: IdealLattice,
    hnf: Vec<Vec<i64>>,
    strides: Vec<u64>,
    diag: Vec<u64>,
    size: u64,
    primes: Vec<PrimeIdeal>,
    prime_hnfs: Vec<Vec<Vec<i64>>>,
    order_id: u64,
}

fn small_hnf(m: &IdealLattice) -> Option<Vec<Vec<i64>>> {
    m.hnf.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
}

fn reduce_small(h: &[Vec<i64>], v: &mut [i64]) {
    for i in 0..v.len() {
        let q = v[i].div_euclid(h[i][i]);
        if q != 0 {
            for j in i..v.len() {
                v[j] -= q * h[i][j];
            }
        }
    }
}

impl ResidueRing {
    pub const MAX_SIZE: u64 = 1 << 26;

    pub fn new(order: &Order, m: &IdealLattice) -> Result<Self> {
        if !m.is_integral() || m.order_id != order.id() {
            return Err(Error::Precondition("residue rings need an integral ideal of the same order".into()));
        }
        let hnf = small_hnf(m).ok_or_else(|| Error::Precondition("modulus too large".into()))?;
        let n = order.degree();
        let diag: Vec<u64> = (0..n).map(|i| hnf[i][i] as u64).collect();
        let size = diag.iter().try_fold(1u64, |a, &d| a.checked_mul(d)).unwrap_or(u64::MAX);
        if size > Self::MAX_SIZE {
            return Err(Error::LimitExceeded(alloc::format!("residue ring of size {size}")));
        }
        let mut strides = vec![1u64; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * diag[i + 1];
        }
        let mut primes = Vec::new();
        for (l, _) in factor_u64(size) {
            for p in order.primes_above(l)? {
                if order.ideal_contains_ideal(&p.ideal, m) {
                    primes.push(p);
                }
            }
        }
        let prime_hnfs = primes.iter().map(|p| small_hnf(&p.ideal).expect("small prime")).collect();
        Ok(ResidueRing { modulus: m.clone(), hnf, strides, diag, size, primes, prime_hnfs, order_id: order.id() })
    }

    pub fn modulus(&self) -> &IdealLattice {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn primes(&self) -> &[PrimeIdeal] {
        &self.primes
    }

    pub fn order_id(&self) -> u64 {
        self.order_id
    }

    pub fn reduce(&self, v: &mut [i64]) {
        reduce_small(&self.hnf, v)
    }

    pub fn index_of(&self, v: &[i64]) -> u64 {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().zip(&self.strides).map(|(&x, &s)| x as u64 * s).sum()
    }

    pub fn index_of_int(&self, v: &[Int]) -> u64 {
        let mut w = v.to_vec();
        // size * O lies in the ideal, so coordinates may be reduced mod size
        let idx = Int::from(self.size);
        for x in w.iter_mut() {
            *x = ((&*x % &idx) + &idx) % &idx;
        }
        let small: Vec<i64> = w.iter().map(|x| x.to_i64().expect("reduced")).collect();
        self.index_of(&small)
    }

    /// Index of an integral field element.
    pub fn index_of_element(&self, x: &FieldElement) -> Result<u64> {
        let c = x.int_coords().ok_or_else(|| Error::NotIntegral(alloc::format!("{x}")))?;
        Ok(self.index_of_int(&c))
    }

    pub fn rep(&self, mut idx: u64) -> Vec<i64> {
        let mut v = vec![0i64; self.diag.len()];
        for (i, s) in self.strides.iter().enumerate() {
            v[i] = (idx / s) as i64;
            idx %= s;
        }
        v
    }

    pub fn mul(&self, order: &Order, a: u64, b: u64) -> u64 {
        let p = order.mul_i64(&self.rep(a), &self.rep(b)).expect("residues are small");
        self.index_of(&p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s: Vec<i64> = self.rep(a).iter().zip(self.rep(b)).map(|(x, y)| x + y).collect();
        self.index_of(&s)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let s: Vec<i64> = self.rep(a).iter().map(|x| -x).collect();
        self.index_of(&s)
    }

    pub fn one(&self) -> u64 {
        let mut e = vec![0i64; self.diag.len()];
        e[0] = 1;
        self.index_of(&e)
    }

    pub fn from_integer(&self, k: i64) -> u64 {
        let mut e = vec![0i64; self.diag.len()];
        e[0] = k;
        self.index_of(&e)
    }

    /// Whether the residue lies in the prime `primes()[i]`.
    pub fn in_prime(&self, i: usize, idx: u64) -> bool {
        let mut v = self.rep(idx);
        reduce_small(&self.prime_hnfs[i], &mut v);
        v.iter().all(|x| *x == 0)
    }

    pub fn is_unit(&self, idx: u64) -> bool {
        (0..self.primes.len()).all(|i| !self.in_prime(i, idx))
    }

    pub fn units(&self) -> Vec<u64> {
        (0..self.size).filter(|&i| self.is_unit(i)).collect()
    }

    /// The unit group `(O/m)^x` as an abstract finite abelian group.
    pub fn unit_group(&self, order: &Order) -> Result<FiniteAbelianGroup<u64>> {
        let one = self.one();
        let mut gens: Vec<u64> = Vec::new();
        let mut group = FiniteAbelianGroup::generate(one, &gens, |a, b| self.mul(order, *a, *b), 1)
            .map_err(group_err)?;
        let limit = self.size as usize + 1;
        for u in self.units() {
            if !group.contains(&u) {
                gens.push(u);
                group = FiniteAbelianGroup::generate(one, &gens, |a, b| self.mul(order, *a, *b), limit)
                    .map_err(group_err)?;
            }
        }
        Ok(group)
    }

    /// The subgroup generated by the given residues.
    pub fn subgroup(&self, order: &Order, gens: &[u64]) -> Result<FiniteAbelianGroup<u64>> {
        FiniteAbelianGroup::generate(self.one(), gens, |a, b| self.mul(order, *a, *b), self.size as usize + 1)
            .map_err(group_err)
    }

    pub fn is_zero(&self, idx: u64) -> bool {
        idx.is_zero()
    }
}

fn group_err(e: GroupError) -> Error {
    match e {
        GroupError::TooLarge(n) => Error::LimitExceeded(alloc::format!("group larger than {n}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::nf::order::power_basis_table;

    #[test]
    fn units_mod_nine_in_zeta9_plus() {
        let o = Order::new("c9", power_basis_table(&[1, -3, 0, 1]), None).unwrap();
        let m = o.rational_ideal(&rat(9, 1)).unwrap();
        let r = ResidueRing::new(&o, &m).unwrap();
        assert_eq!(r.size(), 729);
        // (O/lambda^6)^x has order 3^6 - 3^5 = 486
        let g = r.unit_group(&o).unwrap();
        assert_eq!(g.order(), 486);
        assert_eq!(r.units().len(), 486);
    }

    #[test]
    fn units_mod_15_over_q() {
        let z = Order::new("Q", vec![vec![vec![1]]], None).unwrap();
        let m = z.rational_ideal(&rat(15, 1)).unwrap();
        let r = ResidueRing::new(&z, &m).unwrap();
        let g = r.unit_group(&z).unwrap();
        assert_eq!(g.invariants, vec![2, 4]);
    }
}
