//! Linear least squares with optional equality constraints.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct LsqSolution {
    pub x: DVector<f64>,
    /// `‖Ax − b‖₂`.
    pub residual: f64,
    /// Ratio of extreme singular values of the (reduced) design matrix.
    pub condition: f64,
    pub rank: usize,
    /// `‖Cx − d‖₂`; zero up to rounding when the constraints are consistent.
    pub constraint_residual: f64,
    pub used_svd: bool,
}

const RANK_TOL: f64 = 1e-13;

fn svd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64, usize)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = RANK_TOL * smax.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    let smin = svd.singular_values.iter().copied().filter(|s| *s > eps).fold(f64::INFINITY, f64::min);
    let x = svd.solve(b, eps).map_err(|e| Error::LinearAlgebra(e.to_string()))?;
    Ok((x, if rank == 0 { f64::INFINITY } else { smax / smin }, rank))
}

/// Scale columns to unit norm; returns the scales.
fn equilibrate(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let scales: Vec<f64> = (0..a.ncols()).map(|j| {
        let n = a.column(j).norm();
        if n > 0.0 { n } else { 1.0 }
    }).collect();
    let mut s = a.clone();
    for (j, sc) in scales.iter().enumerate() {
        s.column_mut(j).iter_mut().for_each(|v| *v /= sc);
    }
    (s, scales)
}

/// Unconstrained least squares: column-pivoted QR, switching to SVD when
/// the triangular factor signals rank deficiency or poor conditioning.
fn solve_free(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64, usize, bool)> {
    let (s, scales) = equilibrate(a);
    let n = s.ncols();
    let unscale = |y: DVector<f64>| DVector::from_iterator(n, y.iter().zip(&scales).map(|(v, sc)| v / sc));
    if s.nrows() >= n && n > 0 {
        let qr = s.clone().col_piv_qr();
        let r = qr.r();
        let d: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
        let dmax = d.iter().copied().fold(0.0, f64::max);
        let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
        let cond = dmax / dmin;
        if dmin > 0.0 && cond < 1e10 {
            let qtb = qr.q().transpose() * b;
            let mut y = r.solve_upper_triangular(&qtb.rows(0, n).into_owned()).ok_or_else(|| Error::LinearAlgebra("singular triangular factor".into()))?;
            qr.p().inv_permute_rows(&mut y);
            return Ok((unscale(y), cond, n, false));
        }
    }
    let (y, cond, rank) = svd_solve(&s, b)?;
    Ok((unscale(y), cond, rank, true))
}

/// `min ‖Ax − b‖` subject to `Cx = d` (in the least-squares sense if the
/// constraints are inconsistent), by the null-space method.
pub fn constrained_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, constraints: Option<(&DMatrix<f64>, &DVector<f64>)>) -> Result<LsqSolution> {
    if a.nrows() != b.len() {
        return Err(Error::InvalidInput("design matrix and right-hand side disagree".into()));
    }
    let n = a.ncols();
    let Some((c, d)) = constraints.filter(|(c, _)| c.nrows() > 0) else {
        let (x, condition, rank, used_svd) = solve_free(a, b)?;
        let residual = (a * &x - b).norm();
        return Ok(LsqSolution { x, residual, condition, rank, constraint_residual: 0.0, used_svd });
    };
    if c.ncols() != n || c.nrows() != d.len() {
        return Err(Error::InvalidInput("constraint matrix has the wrong shape".into()));
    }
    // row-normalize constraints so the rank threshold is meaningful
    let mut cn = c.clone();
    let mut dn = d.clone();
    for i in 0..cn.nrows() {
        let s = cn.row(i).norm();
        if s > 0.0 {
            cn.row_mut(i).iter_mut().for_each(|v| *v /= s);
            dn[i] /= s;
        }
    }
    // pad to square so the full right singular basis is available
    let rows = cn.nrows().max(n);
    let mut cp = DMatrix::<f64>::zeros(rows, n);
    cp.rows_mut(0, cn.nrows()).copy_from(&cn);
    let mut dp = DVector::<f64>::zeros(rows);
    dp.rows_mut(0, dn.len()).copy_from(&dn);
    let svd = cp.svd(true, true);
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::LinearAlgebra("no right singular vectors".into()))?;
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let x0 = svd.solve(&dp, eps).map_err(|e| Error::LinearAlgebra(e.to_string()))?;
    let null: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= eps).collect();
    let x = if null.is_empty() {
        x0
    } else {
        let nb = DMatrix::from_fn(n, null.len(), |r, k| vt[(null[k], r)]);
        let (y, _, _, _) = solve_free(&(a * &nb), &(b - a * &x0))?;
        &x0 + nb * y
    };
    // report conditioning of the reduced problem
    let (condition, rank, used_svd) = if null.is_empty() {
        (f64::INFINITY, 0, true)
    } else {
        let nb = DMatrix::from_fn(n, null.len(), |r, k| vt[(null[k], r)]);
        let (_, cond, rank, used) = solve_free(&(a * &nb), &(b - a * &x))?;
        (cond, rank, used)
    };
    let residual = (a * &x - b).norm();
    let constraint_residual = (c * &x - d).norm();
    Ok(LsqSolution { x, residual, condition, rank, constraint_residual, used_svd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_exact_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DMatrix::from_fn(30, 5, |_, _| rng.gen_range(-1.0..1.0));
        let x = DVector::from_fn(5, |i, _| i as f64 - 2.0);
        let b = &a * &x;
        let s = constrained_lstsq(&a, &b, None).unwrap();
        assert!((s.x - x).norm() < 1e-12 && s.residual < 1e-12 && !s.used_svd);
    }

    #[test]
    fn rank_deficiency_switches_to_svd() {
        let mut a = DMatrix::from_fn(10, 3, |i, j| (i * (j + 1)) as f64 + 1.0);
        let col = a.column(0) * 2.0;
        a.set_column(2, &col);
        let b = DVector::from_fn(10, |i, _| i as f64);
        let s = constrained_lstsq(&a, &b, None).unwrap();
        assert!(s.used_svd && s.rank == 2);
    }

    #[test]
    fn constraints_are_met_and_objective_minimized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DMatrix::from_fn(40, 6, |_, _| rng.gen_range(-1.0..1.0));
        let b = DVector::from_fn(40, |_, _| rng.gen_range(-1.0..1.0));
        let c = DMatrix::from_row_slice(2, 6, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        let d = DVector::from_vec(vec![1.0, 0.5]);
        let s = constrained_lstsq(&a, &b, Some((&c, &d))).unwrap();
        assert!(s.constraint_residual < 1e-12);
        // perturbing inside the constraint set cannot decrease the residual
        for k in 0..20 {
            let mut dir = DVector::from_fn(6, |_, _| rng.gen_range(-1.0..1.0));
            let proj = c.transpose() * (c.clone() * c.transpose()).try_inverse().unwrap() * (&c * &dir);
            dir -= proj;
            let t = 1e-3 * (k + 1) as f64;
            assert!((&a * (&s.x + &dir * t) - &b).norm() >= s.residual - 1e-12);
        }
    }
}
