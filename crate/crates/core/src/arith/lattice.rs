//! LLL reduction of positive definite integral Gram matrices and
//! Fincke-Pohst enumeration of short vectors.
//!
//! Floating point is only used to prune the search tree, with a safety
//! margin; every reported vector is checked exactly.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{ToPrimitive, Zero};

use super::matrix::{identity_int, IntMat};
use super::{floor_rat, rat, Int, Rat};

/// `t * g * t^T`.
pub fn transform_gram(t: &[Vec<Int>], g: &[Vec<Int>]) -> IntMat {
    let n = t.len();
    let m = g.len();
    let tg: IntMat = t
        .iter()
        .map(|row| (0..m).map(|j| row.iter().zip(g.iter()).map(|(a, gr)| a * &gr[j]).sum()).collect())
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| tg[i].iter().zip(t[j].iter()).map(|(a, b)| a * b).sum()).collect())
        .collect()
}

fn gso(g: &[Vec<Int>]) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let n = g.len();
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut bstar = vec![Rat::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = Rat::from_integer(g[i][j].clone());
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &bstar[k];
            }
            mu[i][j] = s / &bstar[j];
        }
        let mut s = Rat::from_integer(g[i][i].clone());
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &bstar[k];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

/// LLL-reduces the lattice with Gram matrix `g`. Returns the transform `t`
/// (rows are the reduced basis in terms of the input basis) and the reduced
/// Gram matrix.
pub fn lll_gram(g: &[Vec<Int>]) -> (IntMat, IntMat) {
    let n = g.len();
    let mut t = identity_int(n);
    let mut gr = g.to_vec();
    if n <= 1 {
        return (t, gr);
    }
    let delta = rat(99, 100);
    let half = rat(1, 2);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gso(&gr);
            let q = floor_rat(&(&mu[k][j] + &half));
            if !q.is_zero() {
                let tj = t[j].clone();
                for (a, b) in t[k].iter_mut().zip(tj.iter()) {
                    *a -= &q * b;
                }
                gr = transform_gram(&t, g);
            }
        }
        let (mu, bstar) = gso(&gr);
        let lhs = bstar[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            t.swap(k, k - 1);
            gr = transform_gram(&t, g);
            k = if k > 1 { k - 1 } else { 1 };
        }
    }
    (t, gr)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationCapped;

/// All integer vectors `x` (coordinates in the input basis) with
/// `x^T g x <= bound`, excluding zero. Fails once more than `cap` tree nodes
/// have been visited.
pub fn short_vectors(g: &[Vec<Int>], bound: &Int, cap: usize) -> Result<Vec<Vec<Int>>, EnumerationCapped> {
    let n = g.len();
    if n == 0 || bound < &Int::zero() {
        return Ok(Vec::new());
    }
    let (t, gr) = lll_gram(g);
    let (mu, bstar) = gso(&gr);
    let q: Vec<f64> = bstar.iter().map(super::rat_to_f64).collect();
    let m: Vec<Vec<f64>> = mu.iter().map(|r| r.iter().map(super::rat_to_f64).collect()).collect();
    let b = bound.to_f64().unwrap_or(f64::MAX);
    let slack = b * 1e-9 + 1e-7;
    let mut out = Vec::new();
    let mut visited = 0usize;
    let mut x = vec![0i64; n];
    enumerate_level(n - 1, &q, &m, b + slack, 0.0, &mut x, &mut visited, cap, &mut |y| {
        if y.iter().all(|&c| c == 0) {
            return;
        }
        let yi: Vec<Int> = y.iter().map(|&c| Int::from(c)).collect();
        // exact check in the reduced basis
        let mut val = Int::zero();
        for i in 0..n {
            if y[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] != 0 {
                    val += &gr[i][j] * &yi[i] * &yi[j];
                }
            }
        }
        if &val <= bound {
            let orig: Vec<Int> = (0..n)
                .map(|c| yi.iter().zip(t.iter()).map(|(a, row)| a * &row[c]).sum())
                .collect();
            out.push(orig);
        }
    })?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level(
    i: usize,
    q: &[f64],
    mu: &[Vec<f64>],
    bound: f64,
    partial: f64,
    x: &mut Vec<i64>,
    visited: &mut usize,
    cap: usize,
    leaf: &mut dyn FnMut(&[i64]),
) -> Result<(), EnumerationCapped> {
    let n = q.len();
    let c: f64 = -(i + 1..n).map(|j| mu[j][i] * x[j] as f64).sum::<f64>();
    let remaining = bound - partial;
    let r = super::floor_f64(c + 0.5) as i64;
    for dir in [1i64, -1] {
        let mut xi = if dir == 1 { r } else { r - 1 };
        loop {
            let d = xi as f64 - c;
            let contrib = q[i] * d * d;
            if contrib > remaining {
                break;
            }
            *visited += 1;
            if *visited > cap {
                return Err(EnumerationCapped);
            }
            x[i] = xi;
            if i == 0 {
                leaf(x);
            } else {
                enumerate_level(i - 1, q, mu, bound, partial + contrib, x, visited, cap, leaf)?;
            }
            xi += dir;
        }
    }
    x[i] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn im(rows: &[&[i64]]) -> IntMat {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn counts_points_of_z2() {
        let g = im(&[&[1, 0], &[0, 1]]);
        let v = short_vectors(&g, &int(2), 10_000).unwrap();
        assert_eq!(v.len(), 8);
        let v = short_vectors(&g, &int(5), 10_000).unwrap();
        // norms 1,2,4,5: 4 + 4 + 4 + 8
        assert_eq!(v.len(), 20);
    }

    #[test]
    fn skewed_basis_reduces() {
        // basis (1,0),(100,1) of Z^2
        let g = im(&[&[1, 100], &[100, 10001]]);
        let (t, gr) = lll_gram(&g);
        assert_eq!(&gr[0][0] + &gr[1][1], int(2));
        assert_eq!(t.len(), 2);
        let v = short_vectors(&g, &int(1), 10_000).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn cap_is_reported() {
        let g = im(&[&[1, 0], &[0, 1]]);
        assert_eq!(short_vectors(&g, &int(10_000), 50), Err(EnumerationCapped));
    }
}
