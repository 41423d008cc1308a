//! Dense complex Hermitian matrices and the canonical real coordinates used to
//! represent linear maps on them.
//!
//! The canonical orthonormal basis of the d²-dimensional real space of
//! Hermitian matrices (Hilbert–Schmidt inner product `Tr(A·B)`) is ordered as:
//!
//! 1. the diagonal projectors `E_j = |j⟩⟨j|`, `j = 0..d`;
//! 2. for each pair `j < k` in lexicographic order, the symmetric element
//!    `(E_jk + E_kj)/√2` followed by the antisymmetric element
//!    `i(E_jk − E_kj)/√2`.
//!
//! The coordinates of `A` are therefore `A_jj`, `√2·Re A_jk` and
//! `√2·Im A_jk`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json::MatrixJson;
use crate::C64;

/// Largest entrywise asymmetry `|a_jk − conj(a_kj)|` absorbed at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Default tolerance for positive semi-definiteness tests.
pub const PSD_TOL: f64 = 1e-10;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;

/// A d×d complex Hermitian matrix.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<C64>,
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix{}", self.data)
    }
}

impl HermitianMatrix {
    /// Validates Hermiticity and symmetrizes away rounding noise.
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        let asymmetry = asymmetry(&data);
        if asymmetry > HERMITICITY_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self::symmetrized(data))
    }

    /// Wraps a matrix that is Hermitian by construction, averaging it with its
    /// adjoint.
    pub(crate) fn symmetrized(data: DMatrix<C64>) -> Self {
        let sym = (&data + data.adjoint()) * C64::new(0.5, 0.0);
        HermitianMatrix { data: sym }
    }

    /// Builds a real symmetric matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            data: DMatrix::zeros(dim, dim),
        }
    }

    /// The diagonal projector `|j⟩⟨j|`.
    pub fn basis_projector(dim: usize, j: usize) -> Self {
        let mut data = DMatrix::zeros(dim, dim);
        data[(j, j)] = C64::new(1.0, 0.0);
        HermitianMatrix { data }
    }

    /// The (unnormalized) outer product `|v⟩⟨v|`.
    pub fn ket_bra(v: &DVector<C64>) -> Self {
        HermitianMatrix::symmetrized(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.data[(j, j)].re).sum()
    }

    fn check_dim(&self, other: &HermitianMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Hilbert–Schmidt inner product `Tr(self · other)`.
    pub fn hs_inner(&self, other: &HermitianMatrix) -> Result<f64> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            for k in 0..d {
                acc += (self.data[(j, k)] * other.data[(k, j)]).re;
            }
        }
        Ok(acc)
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order together with the matching eigenvectors
    /// (as columns).
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = SymmetricEigen::new(self.data.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.data.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Smallest and largest eigenvalue.
    pub fn eig_extrema(&self) -> (f64, f64) {
        let values = self.eigenvalues();
        (values[0], values[values.len() - 1])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig_extrema().0
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig_extrema().1
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Transposes the second tensor factor of a `dA·dB`-dimensional matrix.
    pub fn partial_transpose(&self, da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 || da * db != self.dim() {
            return Err(Error::Factorization {
                dim: self.dim(),
                da,
                db,
            });
        }
        let out = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            let (a, b) = (r / db, r % db);
            let (a2, b2) = (c / db, c % db);
            self.data[(a * db + b2, a2 * db + b)]
        });
        Ok(HermitianMatrix { data: out })
    }

    pub fn transpose(&self) -> Self {
        HermitianMatrix {
            data: self.data.transpose(),
        }
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, unitary: &DMatrix<C64>) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: unitary.nrows(),
            });
        }
        Ok(Self::symmetrized(unitary * &self.data * unitary.adjoint()))
    }

    /// `⟨v| self |v⟩`.
    pub fn expectation(&self, v: &DVector<C64>) -> f64 {
        (v.adjoint() * &self.data * v)[(0, 0)].re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix {
            data: &self.data * C64::new(s, 0.0),
        }
    }

    /// Coordinates in the canonical orthonormal basis.
    pub fn to_coords(&self) -> DVector<f64> {
        let d = self.dim();
        let mut v = DVector::zeros(d * d);
        for j in 0..d {
            v[j] = self.data[(j, j)].re;
        }
        let s2 = std::f64::consts::SQRT_2;
        let mut slot = d;
        for j in 0..d {
            for k in (j + 1)..d {
                let z = self.data[(j, k)];
                v[slot] = s2 * z.re;
                v[slot + 1] = s2 * z.im;
                slot += 2;
            }
        }
        v
    }

    /// Inverse of [`HermitianMatrix::to_coords`].
    pub fn from_coords(dim: usize, coords: &DVector<f64>) -> Result<Self> {
        if coords.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: coords.len(),
            });
        }
        let mut data = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            data[(j, j)] = C64::new(coords[j], 0.0);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut slot = dim;
        for j in 0..dim {
            for k in (j + 1)..dim {
                let z = C64::new(h * coords[slot], h * coords[slot + 1]);
                data[(j, k)] = z;
                data[(k, j)] = z.conj();
                slot += 2;
            }
        }
        Ok(HermitianMatrix { data })
    }
}

fn asymmetry(m: &DMatrix<C64>) -> f64 {
    let d = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for k in j..d {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        HermitianMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Add for HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self + &rhs
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        HermitianMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Sub for HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self - &rhs
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(&self.data).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        raw.to_matrix()
            .and_then(HermitianMatrix::new)
            .map_err(serde::de::Error::custom)
    }
}

/// A positive semi-definite Hermitian matrix of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let min = matrix.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotDensity(format!("min eigenvalue {min:.3e} is negative")));
        }
        Ok(DensityMatrix(matrix))
    }

    /// Rescales a nonzero PSD matrix to unit trace.
    pub fn normalized(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if tr <= 0.0 {
            return Err(Error::NotDensity(format!("trace {tr} is not positive")));
        }
        Self::new(matrix.scale(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotDensity("zero state vector".into()));
        }
        Self::new(HermitianMatrix::ket_bra(&(v / C64::new(norm, 0.0))))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_inner(self) -> HermitianMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        self.0.hs_inner(&self.0).expect("same dimension")
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = HermitianMatrix::deserialize(deserializer)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// The canonical orthonormal basis, materialized.
#[derive(Clone, Debug)]
pub struct CanonicalBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl CanonicalBasis {
    pub fn new(dim: usize) -> Self {
        let n = dim * dim;
        let elements = (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                HermitianMatrix::from_coords(dim, &e).expect("coordinate length matches")
            })
            .collect();
        CanonicalBasis { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn to_coords(&self, a: &HermitianMatrix) -> Result<DVector<f64>> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(a.to_coords())
    }

    pub fn from_coords(&self, coords: &DVector<f64>) -> Result<HermitianMatrix> {
        HermitianMatrix::from_coords(self.dim, coords)
    }
}

/// Free-function form of [`HermitianMatrix::hs_inner`].
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    a.hs_inner(b)
}

pub fn eig_extrema(a: &HermitianMatrix) -> (f64, f64) {
    a.eig_extrema()
}

pub fn is_psd(a: &HermitianMatrix, tol: f64) -> bool {
    a.is_psd(tol)
}

pub fn partial_transpose(a: &HermitianMatrix, dims: (usize, usize)) -> Result<HermitianMatrix> {
    a.partial_transpose(dims.0, dims.1)
}
