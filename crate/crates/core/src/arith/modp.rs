//! Linear algebra over prime fields `F_l` with `l < 2^31`.

use alloc::vec;
use alloc::vec::Vec;

pub type ModMat = Vec<Vec<u64>>;

pub fn inv(a: u64, l: u64) -> u64 {
    super::pow_mod(a, l - 2, l)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut ModMat, l: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_multiple_of(l)) else { continue };
        m.swap(r, p);
        let iv = inv(m[r][c] % l, l);
        for x in m[r].iter_mut() {
            *x = *x % l * iv % l;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_multiple_of(l) {
                let f = m[i][c] % l;
                for j in 0..cols {
                    let t = f * m[r][j] % l;
                    m[i][j] = (m[i][j] % l + l - t) % l;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &ModMat, l: u64) -> usize {
    let mut a = m.clone();
    rref(&mut a, l).len()
}

/// Basis of `{x : m x = 0}` (column vectors).
pub fn right_kernel(m: &ModMat, l: u64) -> Vec<Vec<u64>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let piv = rref(&mut a, l);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = (l - a[r][free] % l) % l;
        }
        out.push(v);
    }
    out
}

pub fn mat_mul(a: &ModMat, b: &ModMat, l: u64) -> ModMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b.iter()).fold(0u64, |acc, (x, br)| (acc + x * br[j]) % l))
                .collect()
        })
        .collect()
}

/// Row-space basis (reduced) of the given vectors.
pub fn span_basis(vs: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
    let mut a = vs.to_vec();
    let r = rref(&mut a, l).len();
    a.truncate(r);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_dimension() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let k = right_kernel(&m, 7);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: u64 = m[0].iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % 7;
            assert_eq!(s, 0);
        }
        assert_eq!(rank(&m, 7), 1);
    }
}
