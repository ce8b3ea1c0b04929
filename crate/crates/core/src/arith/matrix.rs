//! Exact dense matrices over Z and Q: determinants, solving, Hermite and
//! Smith normal forms.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Int, Rat};

pub type IntMat = Vec<Vec<Int>>;
pub type RatMat = Vec<Vec<Rat>>;

pub fn identity_int(n: usize) -> IntMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

pub fn to_rat(m: &[Vec<Int>]) -> RatMat {
    m.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul_int(a: &[Vec<Int>], b: &[Vec<Int>]) -> IntMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .filter(|(x, _)| !x.is_zero())
                        .map(|(x, brow)| x * &brow[j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat_int(v: &[Int], m: &[Vec<Int>]) -> Vec<Int> {
    let n = m.first().map_or(0, |r| r.len());
    (0..n)
        .map(|j| v.iter().zip(m.iter()).filter(|(x, _)| !x.is_zero()).map(|(x, r)| x * &r[j]).sum())
        .collect()
}

pub fn vec_mat_rat(v: &[Rat], m: &[Vec<Rat>]) -> Vec<Rat> {
    let n = m.first().map_or(0, |r| r.len());
    (0..n)
        .map(|j| v.iter().zip(m.iter()).filter(|(x, _)| !x.is_zero()).map(|(x, r)| x * &r[j]).sum())
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_int(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: IntMat = m.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves `x * m = b` for a row vector `x` (m square and invertible).
pub fn solve_left_rat(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let mt = transpose(m);
    solve_rat(&mt, b)
}

/// Solves `m * x = b` (column vector) by Gaussian elimination.
pub fn solve_rat(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let mut a: RatMat = m.iter().zip(b).map(|(r, bi)| {
        let mut row = r.clone();
        row.push(bi.clone());
        row
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = Rat::one() / &a[c][c];
        for j in c..=n {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

pub fn inverse_rat(m: &[Vec<Rat>]) -> Option<RatMat> {
    let n = m.len();
    let mut a: RatMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = Rat::one() / &a[c][c];
        for j in 0..2 * n {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det_rat(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    det
}

/// Row-style Hermite normal form with transformation: returns `(h, u)` with
/// `u * a = h`, `u` unimodular, the nonzero rows of `h` in echelon form with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
/// Also returns the rank.
pub fn hnf_with_transform(a: &[Vec<Int>]) -> (IntMat, IntMat, usize) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut h: IntMat = a.to_vec();
    let mut u = identity_int(m);
    let mut r = 0usize;
    for c in 0..n {
        if r >= m {
            break;
        }
        loop {
            // smallest nonzero entry in column c among rows r..m
            let piv = (r..m)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = piv else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_sub(&mut h, i, r, &q);
                row_sub(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !h[r][c].is_zero() {
            if h[r][c].is_negative() {
                for x in h[r].iter_mut() {
                    *x = -x.clone();
                }
                for x in u[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = h[i][c].div_floor(&h[r][c]);
                if !q.is_zero() {
                    row_sub(&mut h, i, r, &q);
                    row_sub(&mut u, i, r, &q);
                }
            }
            r += 1;
        }
    }
    (h, u, r)
}

fn row_sub(m: &mut IntMat, i: usize, r: usize, q: &Int) {
    let (a, b) = if i < r {
        let (x, y) = m.split_at_mut(r);
        (&mut x[i], &y[0])
    } else {
        let (x, y) = m.split_at_mut(i);
        (&mut y[0], &x[r])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Hermite normal form of the lattice spanned by the rows; returns only the
/// nonzero rows.
pub fn hnf(a: &[Vec<Int>]) -> IntMat {
    let (mut h, r) = hnf_rank(a);
    h.truncate(r);
    h
}

/// HNF without tracking the transform, together with the rank.
fn hnf_rank(a: &[Vec<Int>]) -> (IntMat, usize) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut h: IntMat = a.to_vec();
    let mut r = 0usize;
    for c in 0..n {
        if r >= m {
            break;
        }
        loop {
            let piv = (r..m)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = piv else { break };
            h.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_sub(&mut h, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !h[r][c].is_zero() {
            if h[r][c].is_negative() {
                for x in h[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = h[i][c].div_floor(&h[r][c]);
                if !q.is_zero() {
                    row_sub(&mut h, i, r, &q);
                }
            }
            r += 1;
        }
    }
    (h, r)
}

/// HNF of a full-rank lattice known to contain `d * Z^n`; entries stay
/// bounded by reducing modulo `d`.
pub fn hnf_modular(a: &[Vec<Int>], d: &Int) -> IntMat {
    let n = a.first().map_or(0, |r| r.len());
    let mut rows: IntMat = a.iter().map(|r| r.iter().map(|x| x.mod_floor(d)).collect()).collect();
    for i in 0..n {
        let mut e = vec![Int::zero(); n];
        e[i] = d.clone();
        rows.push(e);
    }
    hnf(&rows)
}

/// Basis of the left integer kernel `{x : x * a = 0}`.
pub fn left_kernel(a: &[Vec<Int>]) -> IntMat {
    let (_, u, r) = hnf_with_transform(a);
    u[r..].to_vec()
}

/// Smith normal form with column transform tracking: returns the diagonal
/// `d`, `v` and `v_inv` such that `u * a * v = diag(d)` for some unimodular
/// `u`. The diagonal has `min(rows, cols)` entries, nonnegative, each
/// dividing the next (zeros last).
pub fn snf_with_cols(a: &[Vec<Int>], ncols: usize) -> (Vec<Int>, IntMat, IntMat) {
    let m = a.len();
    let n = ncols;
    let mut s: IntMat = a.to_vec();
    let mut v = identity_int(n);
    let mut vinv = identity_int(n);
    let k = m.min(n);
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !s[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_snf(s, v, vinv, k);
            };
            s.swap(t, pi);
            if pj != t {
                for row in s.iter_mut() {
                    row.swap(t, pj);
                }
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
                vinv.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = s[i][t].div_floor(&s[t][t]);
                row_sub(&mut s, i, t, &q);
                if !s[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = s[t][j].div_floor(&s[t][t]);
                // column j -= q * column t
                for row in s.iter_mut() {
                    let d = &q * &row[t];
                    row[j] -= d;
                }
                for row in v.iter_mut() {
                    let d = &q * &row[t];
                    row[j] -= d;
                }
                // inverse: row t of vinv += q * row j
                let rj = vinv[j].clone();
                for (x, y) in vinv[t].iter_mut().zip(rj.iter()) {
                    *x += &q * y;
                }
                if !s[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition
            let mut bad = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&s[i][j] % &s[t][t]).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let ri = s[i].clone();
                    for (x, y) in s[t].iter_mut().zip(ri.iter()) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    finish_snf(s, v, vinv, k)
}

fn finish_snf(s: IntMat, v: IntMat, vinv: IntMat, k: usize) -> (Vec<Int>, IntMat, IntMat) {
    let d = (0..k).map(|i| s[i][i].abs()).collect();
    (d, v, vinv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn im(rows: &[&[i64]]) -> IntMat {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn bareiss_matches_expansion() {
        let m = im(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        assert_eq!(det_int(&m), int(-54));
        assert_eq!(det_rat(&to_rat(&m)), Rat::from_integer(int(-54)));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = im(&[&[4, 6], &[2, 8], &[6, 2]]);
        let b = im(&[&[2, 2], &[0, 2], &[4, 4]]);
        assert_eq!(hnf(&a), hnf(&b));
        let h = hnf(&a);
        assert_eq!(h, im(&[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn snf_invariants() {
        let a = im(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (d, v, vinv) = snf_with_cols(&a, 3);
        assert_eq!(d, alloc::vec![int(2), int(6), int(12)]);
        assert_eq!(mat_mul_int(&v, &vinv), identity_int(3));
    }

    #[test]
    fn kernel_is_annihilated() {
        let a = im(&[&[1, 2], &[2, 4], &[3, 1]]);
        let k = left_kernel(&a);
        assert_eq!(k.len(), 1);
        let prod = vec_mat_int(&k[0], &a);
        assert!(prod.iter().all(|x| x.is_zero()));
    }
}
