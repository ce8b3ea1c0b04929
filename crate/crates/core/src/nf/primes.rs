//! Prime ideals above a rational prime, found by splitting the finite
//! algebra `O / lO`: its radical is the kernel of a Frobenius power, and the
//! semisimple quotient is split along eigenvalues of elements of the
//! Berlekamp subalgebra.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{ToPrimitive, Zero};

use super::ideal::IdealLattice;
use super::order::{FieldElement, Order};
use crate::arith::modp::{rref, right_kernel, span_basis};
use crate::arith::{factor_u64, Int, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub ideal: IdealLattice,
    pub p: u64,
    pub e: u32,
    pub f: u32,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f)
    }
}

struct ModAlgebra<'a> {
    order: &'a Order,
    l: u64,
}

impl ModAlgebra<'_> {
    fn n(&self) -> usize {
        self.order.degree()
    }

    fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let n = self.n();
        let l = self.l as i128;
        let mut acc = vec![0i128; n];
        let table = self.order.table();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0 {
                    continue;
                }
                let ab = x[i] as i128 * y[j] as i128 % l;
                for (k, &t) in table[i][j].iter().enumerate() {
                    if t != 0 {
                        acc[k] = (acc[k] + ab * (t as i128).rem_euclid(l)) % l;
                    }
                }
            }
        }
        acc.into_iter().map(|v| v as u64).collect()
    }

    fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let n = self.n();
        let mut acc = vec![0u64; n];
        acc[0] = 1;
        let mut b = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    fn unit(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.n()];
        v[i] = 1;
        v
    }

    /// Reduces `v` modulo the subspace with reduced echelon rows `rows`.
    fn reduce(&self, v: &mut [u64], rows: &[Vec<u64>], pivots: &[usize]) {
        let l = self.l;
        for (r, &pc) in rows.iter().zip(pivots) {
            let c = v[pc] % l;
            if c != 0 {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = (*x + l - c * y % l) % l;
                }
            }
        }
    }

    /// Ideal of the algebra generated by `j` and `x`.
    fn ideal_with(&self, j: &[Vec<u64>], x: &[u64]) -> Vec<Vec<u64>> {
        let mut rows = j.to_vec();
        for i in 0..self.n() {
            rows.push(self.mul(x, &self.unit(i)));
        }
        span_basis(&rows, self.l)
    }

    /// Splits the ideal `j` (containing the radical) into maximal ideals.
    fn split(&self, j: Vec<Vec<u64>>, out: &mut Vec<Vec<Vec<u64>>>) {
        let n = self.n();
        let l = self.l;
        let mut jr = j.clone();
        let pivots = rref(&mut jr, l);
        jr.truncate(pivots.len());
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        // matrix of Frob - 1 on the quotient, acting on rows
        let mut m = Vec::new();
        for &c in &free {
            let e = self.unit(c);
            let mut img = self.pow(&e, l);
            img[c] = (img[c] + l - 1) % l;
            self.reduce(&mut img, &jr, &pivots);
            m.push(free.iter().map(|&k| img[k]).collect::<Vec<u64>>());
        }
        let mt = crate::arith::matrix::transpose(&m);
        let ker = right_kernel(&mt, l);
        if ker.len() <= 1 {
            out.push(jr);
            return;
        }
        let mut one = self.unit(0);
        self.reduce(&mut one, &jr, &pivots);
        let lift = |k: &Vec<u64>| {
            let mut v = vec![0u64; n];
            for (&c, &x) in free.iter().zip(k) {
                v[c] = x;
            }
            v
        };
        let b = ker
            .iter()
            .map(lift)
            .find(|v| crate::arith::modp::rank(&vec![v.clone(), one.clone()], l) == 2)
            .expect("Berlekamp subalgebra of dimension > 1 has a non-scalar element");
        for c in 0..l {
            let mut bc = b.clone();
            bc[0] = (bc[0] + l - c % l) % l;
            let jc = self.ideal_with(&jr, &bc);
            if jc.len() < n {
                self.split(jc, out);
            }
        }
    }
}

impl Order {
    /// All prime ideals above the rational prime `l`, with ramification
    /// indices and residue degrees.
    pub fn primes_above(&self, l: u64) -> Result<Vec<PrimeIdeal>> {
        if !crate::arith::is_prime(l) || l >= 1 << 31 {
            return Err(Error::Precondition(alloc::format!("{l} is not a small prime")));
        }
        let alg = ModAlgebra { order: self, l };
        let n = self.degree();
        let mut lk = l;
        while (lk as usize) < n {
            lk *= l;
        }
        // radical = kernel of x -> x^(l^k), a linear map
        let rows: Vec<Vec<u64>> = (0..n).map(|i| alg.pow(&alg.unit(i), lk)).collect();
        let radical: Vec<Vec<u64>> = right_kernel(&crate::arith::matrix::transpose(&rows), l);
        let radical = span_basis(&radical, l);
        let mut maximal = Vec::new();
        alg.split(radical, &mut maximal);
        let mut out = Vec::new();
        for m in maximal {
            let mut gens: Vec<Vec<Rat>> =
                m.iter().map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()).collect();
            for i in 0..n {
                let mut e = vec![Rat::zero(); n];
                e[i] = Rat::from_integer(Int::from(l));
                gens.push(e);
            }
            let ideal = self.ideal_from_rows(&gens)?;
            let f = (n - m.len()) as u32;
            out.push(PrimeIdeal { ideal, p: l, e: 0, f });
        }
        let lo = self.rational_ideal(&Rat::from_integer(Int::from(l)))?;
        for pr in out.iter_mut() {
            pr.e = self.valuation_integral(&pr.ideal, &lo) as u32;
        }
        out.sort_by(|a, b| (a.f, &a.ideal).cmp(&(b.f, &b.ideal)));
        Ok(out)
    }

    fn valuation_integral(&self, p: &IdealLattice, a: &IdealLattice) -> i64 {
        let mut k = 0;
        let mut pk = p.clone();
        while self.ideal_contains_ideal(&pk, a) {
            k += 1;
            pk = self.ideal_mul(&pk, p).expect("same order");
        }
        k
    }

    /// `ord_P(a)` for a nonzero fractional ideal.
    pub fn valuation(&self, p: &PrimeIdeal, a: &IdealLattice) -> i64 {
        let (d, num) = self.integral_multiple(a);
        let dv = if d == Int::from(1) {
            0
        } else {
            let di = self.rational_ideal(&Rat::from_integer(d)).expect("nonzero");
            self.valuation_integral(&p.ideal, &di)
        };
        self.valuation_integral(&p.ideal, &num) - dv
    }

    pub fn element_valuation(&self, p: &PrimeIdeal, x: &FieldElement) -> Result<i64> {
        Ok(self.valuation(p, &self.principal_ideal(x)?))
    }

    /// Factorisation of a nonzero fractional ideal into prime powers.
    pub fn factor_ideal(&self, a: &IdealLattice) -> Result<Vec<(PrimeIdeal, i64)>> {
        let (d, num) = self.integral_multiple(a);
        let nn = self.ideal_norm(&num).to_integer();
        let mut primes: Vec<u64> = Vec::new();
        for v in [nn, d] {
            let v = v.to_u64().ok_or_else(|| Error::Precondition("ideal norm too large to factor".into()))?;
            primes.extend(factor_u64(v).into_iter().map(|(p, _)| p));
        }
        primes.sort_unstable();
        primes.dedup();
        let mut out = Vec::new();
        for l in primes {
            for p in self.primes_above(l)? {
                let v = self.valuation(&p, a);
                if v != 0 {
                    out.push((p, v));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::nf::order::power_basis_table;

    #[test]
    fn splitting_types_in_quadratic_field() {
        let o = Order::new("Q(sqrt5)", power_basis_table(&[-1, -1, 1]), None).unwrap();
        let p2 = o.primes_above(2).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!((p2[0].e, p2[0].f), (1, 2));
        let p5 = o.primes_above(5).unwrap();
        assert_eq!(p5.len(), 1);
        assert_eq!((p5[0].e, p5[0].f), (2, 1));
        let p11 = o.primes_above(11).unwrap();
        assert_eq!(p11.len(), 2);
        assert!(p11.iter().all(|p| p.e == 1 && p.f == 1));
    }

    #[test]
    fn totally_ramified_in_zeta9_plus() {
        let o = Order::new("c9", power_basis_table(&[1, -3, 0, 1]), None).unwrap();
        let p3 = o.primes_above(3).unwrap();
        assert_eq!(p3.len(), 1);
        assert_eq!((p3[0].e, p3[0].f), (3, 1));
        // 2 - c generates it
        let u = o.principal_ideal(&o.element_i64(&[2, -1, 0])).unwrap();
        assert_eq!(u, p3[0].ideal);
        let d = o.different().unwrap();
        assert_eq!(o.valuation(&p3[0], &d), 4);
        // 19 = 1 mod 9 splits completely, 2 is inert
        assert_eq!(o.primes_above(19).unwrap().len(), 3);
        let p2 = o.primes_above(2).unwrap();
        assert_eq!((p2.len(), p2[0].f), (1, 3));
        let fac = o.factor_ideal(&o.rational_ideal(&rat(6, 1)).unwrap()).unwrap();
        assert_eq!(fac.len(), 2);
    }
}
