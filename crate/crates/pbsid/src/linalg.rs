//! Shared dense linear-algebra helpers built on SVD factorizations.

use nalgebra::DMatrix;

/// Result of a minimum-norm least-squares solve.
pub(crate) struct LeftLstsq {
    /// Minimizer of `||Y - M X||_F` with minimum Frobenius norm.
    pub coefficients: DMatrix<f64>,
    /// Numerical rank of `X` at the default tolerance.
    pub rank: usize,
}

/// Default rank tolerance: `max(dims) * eps * sigma_max`.
pub(crate) fn rank_tolerance(nrows: usize, ncols: usize, sigma_max: f64) -> f64 {
    nrows.max(ncols) as f64 * f64::EPSILON * sigma_max
}

/// Solves `min_M ||Y - M X||_F` through the SVD of `X`, returning the
/// minimum-norm solution `M = Y X⁺`. Singular values at or below the rank
/// tolerance are treated as zero.
pub(crate) fn lstsq_left(y: &DMatrix<f64>, x: &DMatrix<f64>) -> LeftLstsq {
    assert_eq!(y.ncols(), x.ncols(), "column counts must agree");
    let svd = x.clone().svd(true, true);
    let u = svd.u.as_ref().expect("SVD with U requested");
    let v_t = svd.v_t.as_ref().expect("SVD with V^T requested");
    let sv = &svd.singular_values;
    let sigma_max = if sv.is_empty() { 0.0 } else { sv[0] };
    let tol = rank_tolerance(x.nrows(), x.ncols(), sigma_max);
    let rank = sv.iter().filter(|s| **s > tol).count();

    // M = Y V Σ⁺ Uᵀ, with the inverse restricted to the numerical rank.
    let mut yv = y * v_t.transpose(); // r x min(dims)
    for j in 0..yv.ncols() {
        let scale = if j < rank { 1.0 / sv[j] } else { 0.0 };
        yv.column_mut(j).scale_mut(scale);
    }
    let coefficients = yv * u.transpose();
    LeftLstsq { coefficients, rank }
}

/// Moore-Penrose pseudo-inverse with the default rank tolerance.
pub(crate) fn pinv(m: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let svd = m.clone().svd(true, true);
    let sigma_max = if svd.singular_values.is_empty() { 0.0 } else { svd.singular_values[0] };
    let tol = rank_tolerance(m.nrows(), m.ncols(), sigma_max);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let p = svd.pseudo_inverse(tol).expect("non-negative tolerance");
    (p, rank)
}

/// Numerical rank of a matrix at the default tolerance.
pub(crate) fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    if sv.is_empty() {
        return 0;
    }
    let tol = rank_tolerance(m.nrows(), m.ncols(), sv[0]);
    sv.iter().filter(|s| **s > tol).count()
}
