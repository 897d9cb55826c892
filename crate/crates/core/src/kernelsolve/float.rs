//! Dense SVD nullspace and rank for float mode.

use nalgebra::DMatrix;

/// Singular values and right singular vectors of a dense block, padded with
/// zero rows so that every column gets a singular value.
pub(crate) struct BlockSvd {
    pub sigma: Vec<f64>,
    /// Right singular vectors, one per entry of `sigma`.
    pub vectors: Vec<Vec<f64>>,
}

pub(crate) fn block_svd(rows: &[Vec<(usize, f64)>], ncols: usize) -> BlockSvd {
    let nrows = rows.len().max(ncols);
    let mut m = DMatrix::<f64>::zeros(nrows, ncols);
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            m[(r, c)] = v;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let vectors = (0..sigma.len())
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect();
    BlockSvd { sigma, vectors }
}

/// Numerical rank with relative threshold `tol · σ_max`.
pub(crate) fn rank(rows: &[Vec<(usize, f64)>], ncols: usize, tol: f64) -> usize {
    if rows.is_empty() || ncols == 0 {
        return 0;
    }
    let svd = block_svd(rows, ncols);
    let smax = svd.sigma.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.sigma.iter().filter(|&&s| s > tol * smax).count()
}
