//! Projections onto low-rank, fixed-nuclear-norm matrices.

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Euclidean projection of `v` onto `{w : w ≥ 0, Σw = budget}` by sorting and
/// thresholding.
pub fn simplex_projection(v: &[f64], budget: f64) -> Result<Vec<f64>> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(invalid(format!("simplex budget {budget} must be positive")));
    }
    if v.is_empty() {
        return Err(invalid("cannot project an empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("simplex projection input".into()));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - budget) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    Ok(v.iter().map(|&x| (x - theta).max(0.0)).collect())
}

/// Thin SVD with singular values in decreasing order.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: DMatrix<Complex64>,
    pub singular_values: Vec<f64>,
    pub v_t: DMatrix<Complex64>,
}

// nalgebra's bidiagonal SVD returns wrong singular vectors on a few percent of
// rank-deficient inputs, which is exactly what PGA iterates are; faer's does not.
pub fn sorted_svd(m: &DMatrix<Complex64>) -> Result<SortedSvd> {
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite("SVD input".into()));
    }
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Svd);
    }
    let svd = Mat::from_fn(rows, cols, |i, j| m[(i, j)])
        .thin_svd()
        .map_err(|_| Error::Svd)?;
    let (u, v) = (svd.U(), svd.V());
    let k = rows.min(cols);
    Ok(SortedSvd {
        u: DMatrix::from_fn(rows, k, |i, j| u[(i, j)]),
        singular_values: svd.S().column_vector().iter().map(|s| s.re).collect(),
        v_t: DMatrix::from_fn(k, cols, |i, j| v[(j, i)].conj()),
    })
}

pub fn nuclear_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(sorted_svd(m)?.singular_values.iter().sum())
}

/// Count of singular values above `rel_tol` times the largest.
pub fn numerical_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> Result<usize> {
    let s = sorted_svd(m)?.singular_values;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&v| v > rel_tol * top).count())
}

/// Keeps the top `rank` singular triplets of `m` and projects their singular
/// values onto the simplex of total mass `budget`.
pub fn low_rank_project(
    m: &DMatrix<Complex64>,
    rank: usize,
    budget: f64,
) -> Result<DMatrix<Complex64>> {
    let max_rank = m.nrows().min(m.ncols());
    if rank == 0 || rank > max_rank {
        return Err(invalid(format!("rank {rank} outside [1, {max_rank}]")));
    }
    let svd = sorted_svd(m)?;
    let weights = simplex_projection(&svd.singular_values[..rank], budget)?;
    let u = svd.u.columns(0, rank);
    let v_t = svd.v_t.rows(0, rank);
    let scaled = DMatrix::from_fn(rank, v_t.ncols(), |i, j| v_t[(i, j)] * weights[i]);
    Ok(u * scaled)
}

/// Leading left and right singular vectors.
pub fn top_singular_pair(
    m: &DMatrix<Complex64>,
) -> Result<(DVector<Complex64>, DVector<Complex64>)> {
    let svd = sorted_svd(m)?;
    let u = svd.u.column(0).into_owned();
    // row 0 of Vᴴ is v₁ᴴ; conjugate back to v₁
    let v = svd.v_t.row(0).adjoint();
    Ok((u, v))
}
