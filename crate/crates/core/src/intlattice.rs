//! Integer matrix algorithms: Hermite and Smith normal forms, integer
//! kernels and preimages. All arithmetic is arbitrary precision;
//! results are converted back to `i64` with an overflow check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) type BigVec = Vec<BigInt>;

pub(crate) fn to_big(v: &[i64]) -> BigVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub(crate) fn to_small(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

pub(crate) fn big_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dot_i64(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Divides out the content of `v`; the zero vector is returned unchanged.
pub(crate) fn primitive(v: &[BigInt]) -> BigVec {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub(crate) fn primitive_i64(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

fn row_axpy(target: &mut [BigInt], factor: &BigInt, source: &[BigInt]) {
    for (t, s) in target.iter_mut().zip(source) {
        *t += factor * s;
    }
}

/// Row-style Hermite normal form with a unimodular transform.
///
/// Returns `(h, u, pivots)` with `u * m = h`, `h` in row echelon form with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
/// Zero rows of `h` sit at the bottom.
pub(crate) fn hermite_with_transform(
    m: &[BigVec],
    ncols: usize,
) -> (Vec<BigVec>, Vec<BigVec>, Vec<usize>) {
    let nrows = m.len();
    let mut h: Vec<BigVec> = m.to_vec();
    let mut u: Vec<BigVec> = (0..nrows)
        .map(|i| {
            let mut r = vec![BigInt::zero(); nrows];
            r[i] = BigInt::one();
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        // Euclid on column `col` among rows `row..` until a single nonzero remains.
        loop {
            let nonzero: Vec<usize> = (row..nrows).filter(|&i| !h[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero
                .iter()
                .min_by_key(|&&i| h[i][col].abs())
                .expect("nonempty");
            h.swap(row, best);
            u.swap(row, best);
            if nonzero.len() == 1 {
                break;
            }
            let (prow, urow) = (h[row].clone(), u[row].clone());
            for i in row + 1..nrows {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = -h[i][col].div_floor(&prow[col]);
                row_axpy(&mut h[i], &q, &prow);
                row_axpy(&mut u[i], &q, &urow);
            }
        }
        if h[row][col].is_zero() {
            continue;
        }
        if h[row][col].is_negative() {
            for x in h[row].iter_mut().chain(u[row].iter_mut()) {
                *x = -x.clone();
            }
        }
        let (prow, urow) = (h[row].clone(), u[row].clone());
        for i in 0..row {
            let q = -h[i][col].div_floor(&prow[col]);
            if !q.is_zero() {
                row_axpy(&mut h[i], &q, &prow);
                row_axpy(&mut u[i], &q, &urow);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (h, u, pivots)
}

/// Canonical Hermite basis of the lattice spanned by the integer rows.
pub(crate) fn hermite_basis(rows: &[BigVec], ncols: usize) -> Vec<BigVec> {
    let (h, _, pivots) = hermite_with_transform(rows, ncols);
    h.into_iter().take(pivots.len()).collect()
}

/// Basis of the integer kernel `{x in Z^n : a x = 0}` for an `m x n` matrix
/// given by its rows. The kernel is saturated, and the basis is in Hermite
/// form, hence canonical.
pub(crate) fn integer_kernel(a: &[BigVec], n: usize) -> Vec<BigVec> {
    let at = transpose(a, n);
    let (_, u, pivots) = hermite_with_transform(&at, a.len());
    let kernel: Vec<BigVec> = u.into_iter().skip(pivots.len()).collect();
    hermite_basis(&kernel, n)
}

pub(crate) fn transpose(a: &[BigVec], ncols: usize) -> Vec<BigVec> {
    (0..ncols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Some integer solution of `a x = b`, or `None` when none exists.
pub(crate) fn solve_integer(a: &[BigVec], n: usize, b: &[BigInt]) -> Option<BigVec> {
    let at = transpose(a, n);
    let (h, u, pivots) = hermite_with_transform(&at, a.len());
    // a * u^T = h^T, so a x = b with x = u^T y reduces to y h = b.
    let mut residual = b.to_vec();
    let mut x = vec![BigInt::zero(); n];
    for (i, &pc) in pivots.iter().enumerate() {
        let (q, r) = residual[pc].div_rem(&h[i][pc]);
        if !r.is_zero() {
            return None;
        }
        if q.is_zero() {
            continue;
        }
        row_axpy(&mut residual, &(-&q), &h[i]);
        row_axpy(&mut x, &q, &u[i]);
    }
    residual.iter().all(Zero::is_zero).then_some(x)
}

/// Diagonal of the Smith normal form (nonzero invariant factors only).
pub(crate) fn smith_diagonal(a: &[BigVec], ncols: usize) -> Vec<BigInt> {
    let mut m: Vec<BigVec> = a.to_vec();
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        let Some((pi, pj)) = (t..nrows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| !m[i][j].is_zero())
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut done = true;
        for i in t + 1..nrows {
            let q = m[i][t].div_floor(&m[t][t]);
            if !q.is_zero() {
                let prow = m[t].clone();
                row_axpy(&mut m[i], &(-q), &prow);
            }
            if !m[i][t].is_zero() {
                done = false;
            }
        }
        for j in t + 1..ncols {
            let q = m[t][j].div_floor(&m[t][t]);
            if !q.is_zero() {
                for row in m.iter_mut() {
                    let v = row[t].clone();
                    row[j] -= &q * v;
                }
            }
            if !m[t][j].is_zero() {
                done = false;
            }
        }
        if !done {
            continue;
        }
        // The pivot must divide every remaining entry.
        let bad = (t + 1..nrows)
            .flat_map(|i| (t + 1..ncols).map(move |j| (i, j)))
            .find(|&(i, j)| !m[i][j].is_multiple_of(&m[t][t]));
        if let Some((i, _)) = bad {
            let src = m[i].clone();
            row_axpy(&mut m[t], &BigInt::one(), &src);
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}
