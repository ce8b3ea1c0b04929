//! Exact integer, rational and small-dimensional lattice arithmetic shared by
//! the number-field layers.

pub mod abelian;
pub mod cyclotomic;
pub mod interval;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod poly;

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

#[inline]
pub fn int(n: i64) -> Int {
    Int::from(n)
}

#[inline]
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

#[inline]
pub fn rat_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Converts a rational that is known to be a small integer.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn floor_rat(r: &Rat) -> Int {
    r.numer().div_floor(r.denom())
}

pub fn ceil_rat(r: &Rat) -> Int {
    -((-r.numer()).div_floor(r.denom()))
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(xs: &[Rat]) -> Int {
    xs.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / a.gcd(&b) * b
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation by trial division, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut ds = alloc::vec![1u64];
    for (p, e) in factor_u64(n) {
        let cur = ds.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128 % m as u128;
    let mut bb = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let g = a.extended_gcd(&m);
    if g.gcd.abs() != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m) * g.gcd.signum() % m)
}

/// Smallest integer `r >= 0` with `r^k >= n`.
pub fn ceil_root(n: &Int, k: u32) -> Int {
    if n.is_zero() || n.is_negative() {
        return Int::zero();
    }
    let mut r = n.nth_root(k);
    while num_traits::pow::pow(r.clone(), k as usize) < *n {
        r += 1;
    }
    r
}

pub fn isqrt_floor(n: &Int) -> Int {
    if n.is_negative() {
        return Int::zero();
    }
    n.sqrt()
}

/// Converts a rational to the nearest f64 (used only for pruning heuristics).
pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // scale down huge operands
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
        let n2 = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let d2 = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        n2 / d2
    }
}

/// `floor` for f64 without std.
pub fn floor_f64(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

pub fn sign_of(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_and_factors() {
        assert_eq!(divisors_u64(12), alloc::vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factor_u64(360), alloc::vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors_u64(1), alloc::vec![1]);
    }

    #[test]
    fn roots_and_inverses() {
        assert_eq!(ceil_root(&int(1000), 3), int(10));
        assert_eq!(ceil_root(&int(1001), 3), int(11));
        assert_eq!(inv_mod(2, 9), Some(5));
        assert_eq!(inv_mod(3, 9), None);
        assert_eq!(floor_rat(&rat(-7, 2)), int(-4));
        assert_eq!(ceil_rat(&rat(-7, 2)), int(-3));
    }
}
