use nalgebra::DMatrix;

fn svd(a: &DMatrix<f64>) -> faer::linalg::solvers::Svd<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)])
        .svd()
        .expect("SVD of a finite matrix converges")
}

/// Orthonormal basis (as columns) of the null space of `a`, keeping right
/// singular vectors whose singular value is at most `rel_cutoff` times the
/// largest one.
pub(crate) fn null_space(a: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = svd(a);
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    // Columns past the last singular value span part of the kernel as well.
    let keep: Vec<usize> = (0..n)
        .filter(|&i| s.get(i).is_none_or(|&x| x <= rel_cutoff * smax))
        .collect();
    let v = svd.V();
    DMatrix::from_fn(n, keep.len(), |r, c| v[(r, keep[c])])
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub(crate) fn column_space(a: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 {
        return DMatrix::zeros(m, 0);
    }
    let svd = svd(a);
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len())
        .filter(|&i| s[i] > rel_cutoff * smax && s[i] > 1e-14)
        .collect();
    let u = svd.U();
    DMatrix::from_fn(m, keep.len(), |r, c| u[(r, keep[c])])
}
