//! Small dense complex linear algebra: solves, products, numerical rank.
//! Sizes here never exceed a few dozen, so plain Gaussian elimination with
//! partial pivoting is enough.

use super::C64;

pub fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[allow(clippy::needless_range_loop)] // rows are indexed in pairs
/// Solves `A x = b`; `None` when the pivot collapses (singular to working
/// precision).
pub fn solve(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut scale = 0.0f64;
    for row in &a {
        for c in row {
            scale = scale.max(c.norm());
        }
    }
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for k in 0..n {
        let (pivot_row, pivot_norm) = (k..n)
            .map(|r| (r, a[r][k].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pivot_norm < 1e-14 * scale || !pivot_norm.is_finite() {
            return None;
        }
        a.swap(k, pivot_row);
        b.swap(k, pivot_row);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            if f.norm() == 0.0 {
                continue;
            }
            for c in k..n {
                let sub = f * a[k][c];
                a[r][c] -= sub;
            }
            let sub = f * b[k];
            b[r] -= sub;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k][c] * x[c];
        }
        x[k] = acc / a[k][k];
    }
    if x.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return None;
    }
    Some(x)
}

/// Solves `A X = B` column by column; `None` if `A` is singular.
pub fn solve_multi(a: &[Vec<C64>], b: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let n = a.len();
    let cols = b[0].len();
    let mut out = vec![vec![C64::new(0.0, 0.0); cols]; n];
    for c in 0..cols {
        let rhs: Vec<C64> = (0..n).map(|r| b[r][c]).collect();
        let x = solve(a.to_vec(), rhs)?;
        for r in 0..n {
            out[r][c] = x[r];
        }
    }
    Some(out)
}

pub fn mat_mul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![C64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            if ail.norm() == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &[Vec<C64>], v: &[C64]) -> Vec<C64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

#[allow(clippy::needless_range_loop)] // rows are indexed in pairs
/// Numerical rank by row elimination with full pivoting: pivots below
/// `tol_rel` times the largest pivot do not count.
pub fn numerical_rank(mut rows: Vec<Vec<C64>>, tol_rel: f64) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let n = rows[0].len();
    let mut rank = 0;
    let mut first_pivot = 0.0f64;
    let mut used_cols = vec![false; n];
    for _ in 0..m.min(n) {
        let mut best = (0usize, 0usize, 0.0f64);
        for (r, row) in rows.iter().enumerate().skip(rank) {
            for c in 0..n {
                if !used_cols[c] && row[c].norm() > best.2 {
                    best = (r, c, row[c].norm());
                }
            }
        }
        let (pr, pc, pn) = best;
        if rank == 0 {
            first_pivot = pn;
        }
        if pn == 0.0 || pn < tol_rel * first_pivot {
            break;
        }
        rows.swap(rank, pr);
        used_cols[pc] = true;
        for r in rank + 1..m {
            let f = rows[r][pc] / rows[rank][pc];
            if f.norm() == 0.0 {
                continue;
            }
            for c in 0..n {
                let sub = f * rows[rank][c];
                rows[r][c] -= sub;
            }
        }
        rank += 1;
    }
    rank
}
