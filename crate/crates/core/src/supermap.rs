//! Real-linear maps on the space of d×d Hermitian matrices, stored as d²×d²
//! real matrices acting on canonical coordinates (see [`crate::hermitian`]).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::json::MatrixJson;
use crate::linalg;
use crate::C64;

/// Relative singular-value cutoff used for null spaces and spans.
pub const FIXED_CUTOFF: f64 = 1e-9;
const TAG_TOL: f64 = 1e-12;

/// Builtin map families with an analytic action.
#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Identity,
    Transpose,
    PartialTranspose { dims: (usize, usize) },
    UnitaryConjugation { unitary: DMatrix<C64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperMap {
    dim: usize,
    action: DMatrix<f64>,
    kind: Option<MapKind>,
}

impl SuperMap {
    pub fn from_action(dim: usize, action: DMatrix<f64>) -> Result<Self> {
        let n = dim * dim;
        if dim == 0 || action.nrows() != n || action.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: action.nrows(),
            });
        }
        if action.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("map action has non-finite entries".into()));
        }
        Ok(SuperMap {
            dim,
            action,
            kind: None,
        })
    }

    /// Tabulates a linear map by evaluating it on the canonical basis.
    pub fn from_linear_fn(
        dim: usize,
        mut f: impl FnMut(&HermitianMatrix) -> Result<HermitianMatrix>,
    ) -> Result<Self> {
        let n = dim * dim;
        let mut action = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            let image = f(&HermitianMatrix::from_coords(dim, &e)?)?;
            if image.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: image.dim(),
                });
            }
            action.set_column(i, &image.to_coords());
        }
        Self::from_action(dim, action)
    }

    pub fn identity(dim: usize) -> Self {
        SuperMap {
            dim,
            action: DMatrix::identity(dim * dim, dim * dim),
            kind: Some(MapKind::Identity),
        }
    }

    /// Full transposition: fixes the diagonal and symmetric coordinates and
    /// negates the antisymmetric ones.
    pub fn transpose(dim: usize) -> Self {
        let n = dim * dim;
        let diag = DVector::from_fn(n, |i, _| {
            if i < dim || (i - dim) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        SuperMap {
            dim,
            action: DMatrix::from_diagonal(&diag),
            kind: Some(MapKind::Transpose),
        }
    }

    /// Transposition of the second tensor factor of `C^dA ⊗ C^dB`.
    pub fn partial_transpose(da: usize, db: usize) -> Result<Self> {
        let dim = da * db;
        if da == 0 || db == 0 {
            return Err(Error::Factorization { dim, da, db });
        }
        let mut map = Self::from_linear_fn(dim, |x| x.partial_transpose(da, db))?;
        // The action is a signed permutation; remove the √2 round-off.
        map.action.iter_mut().for_each(|x| {
            if (*x - x.round()).abs() < 1e-12 {
                *x = x.round();
            }
        });
        map.kind = Some(MapKind::PartialTranspose { dims: (da, db) });
        Ok(map)
    }

    /// `X ↦ U X U†` for a unitary `U`.
    pub fn unitary_conjugation(unitary: DMatrix<C64>) -> Result<Self> {
        check_unitary(&unitary)?;
        let dim = unitary.nrows();
        let mut map = Self::from_linear_fn(dim, |x| x.conjugate_by(&unitary))?;
        map.kind = Some(MapKind::UnitaryConjugation { unitary });
        Ok(map)
    }

    /// `X ↦ s·X`; trace preserving only for `s = 1`.
    pub fn scaling(dim: usize, s: f64) -> Self {
        SuperMap {
            dim,
            action: DMatrix::identity(dim * dim, dim * dim) * s,
            kind: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self) -> &DMatrix<f64> {
        &self.action
    }

    pub fn kind(&self) -> Option<&MapKind> {
        self.kind.as_ref()
    }

    pub fn apply(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        HermitianMatrix::from_coords(self.dim, &(&self.action * x.to_coords()))
    }

    /// Adjoint with respect to the Hilbert–Schmidt inner product. The
    /// canonical basis is orthonormal, so this is the transposed action.
    pub fn adjoint(&self) -> SuperMap {
        let kind = self.kind.as_ref().map(|k| match k {
            MapKind::UnitaryConjugation { unitary } => MapKind::UnitaryConjugation {
                unitary: unitary.adjoint(),
            },
            other => other.clone(),
        });
        SuperMap {
            dim: self.dim,
            action: self.action.transpose(),
            kind,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SuperMap) -> Result<SuperMap> {
        if inner.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: inner.dim,
            });
        }
        Ok(SuperMap {
            dim: self.dim,
            action: &self.action * &inner.action,
            kind: None,
        })
    }

    /// Checks `Tr f(B) = Tr B` on every canonical basis element.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d * d).all(|col| {
            let image_trace: f64 = (0..d).map(|r| self.action[(r, col)]).sum();
            let basis_trace = if col < d { 1.0 } else { 0.0 };
            (image_trace - basis_trace).abs() <= tol
        })
    }
}

fn check_unitary(u: &DMatrix<C64>) -> Result<()> {
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let deviation = (u.adjoint() * u - DMatrix::<C64>::identity(u.nrows(), u.nrows()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// A linear subspace of Hermitian matrices with an HS-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    dim: usize,
    /// d²×r, orthonormal columns.
    coords: DMatrix<f64>,
    basis: Vec<HermitianMatrix>,
}

impl Subspace {
    fn from_orthonormal_coords(dim: usize, coords: DMatrix<f64>) -> Self {
        let basis = coords
            .column_iter()
            .map(|c| HermitianMatrix::from_coords(dim, &c.into_owned()).expect("coordinate length"))
            .collect();
        Subspace { dim, coords, basis }
    }

    pub fn full(dim: usize) -> Self {
        Self::from_orthonormal_coords(dim, DMatrix::identity(dim * dim, dim * dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_orthonormal_coords(dim, DMatrix::zeros(dim * dim, 0))
    }

    /// Orthonormalized span of the given matrices.
    pub fn from_spanning(dim: usize, spanning: &[HermitianMatrix]) -> Result<Self> {
        for m in spanning {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        let mut a = DMatrix::zeros(dim * dim, spanning.len());
        for (i, m) in spanning.iter().enumerate() {
            a.set_column(i, &m.to_coords());
        }
        Ok(Self::from_orthonormal_coords(
            dim,
            linalg::column_space(&a, FIXED_CUTOFF),
        ))
    }

    /// Orthogonal complement within the full Hermitian space.
    pub fn complement(&self) -> Subspace {
        let n = self.dim * self.dim;
        let proj = DMatrix::<f64>::identity(n, n) - &self.coords * self.coords.transpose();
        Self::from_orthonormal_coords(self.dim, linalg::column_space(&proj, FIXED_CUTOFF))
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        &self.basis
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    /// HS-orthogonal projection onto the subspace.
    pub fn project(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let c = x.to_coords();
        let p = &self.coords * (self.coords.transpose() * c);
        HermitianMatrix::from_coords(self.dim, &p)
    }

    /// `‖x − P(x)‖_HS`.
    pub fn residual(&self, x: &HermitianMatrix) -> Result<f64> {
        Ok((x - &self.project(x)?).hs_norm())
    }

    pub fn contains(&self, x: &HermitianMatrix, tol: f64) -> Result<bool> {
        Ok(self.residual(x)? <= tol)
    }

    /// Largest entry of `Gram − I`.
    pub fn gram_deviation(&self) -> f64 {
        let r = self.dimension();
        let gram = self.coords.transpose() * &self.coords;
        (gram - DMatrix::<f64>::identity(r, r))
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

/// Common fixed space `∩_f ker(f† − id)` of the adjoints of `maps`, with the
/// default singular-value cutoff.
pub fn common_fixed_subspace<'a>(
    dim: usize,
    maps: impl IntoIterator<Item = &'a SuperMap>,
) -> Result<Subspace> {
    common_fixed_subspace_with_cutoff(dim, maps, FIXED_CUTOFF)
}

pub fn common_fixed_subspace_with_cutoff<'a>(
    dim: usize,
    maps: impl IntoIterator<Item = &'a SuperMap>,
    rel_cutoff: f64,
) -> Result<Subspace> {
    let n = dim * dim;
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    for f in maps {
        if f.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim,
            });
        }
        blocks.push(f.action.transpose() - DMatrix::<f64>::identity(n, n));
    }
    if blocks.is_empty() {
        return Ok(Subspace::full(dim));
    }
    let mut stacked = DMatrix::zeros(n * blocks.len(), n);
    for (i, b) in blocks.iter().enumerate() {
        stacked.view_mut((i * n, 0), (n, n)).copy_from(b);
    }
    Ok(Subspace::from_orthonormal_coords(
        dim,
        linalg::null_space(&stacked, rel_cutoff),
    ))
}

#[derive(Serialize, Deserialize)]
struct SuperMapJson {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unitary: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action: Option<Vec<Vec<f64>>>,
}

impl SuperMapJson {
    fn into_map(self) -> Result<SuperMap> {
        let builtin = match self.builtin.as_deref() {
            None => None,
            Some("identity") => Some(SuperMap::identity(self.dim)),
            Some("transpose") => Some(SuperMap::transpose(self.dim)),
            Some("partial_transpose") => {
                let [da, db] = self.dims.ok_or_else(|| {
                    Error::InvalidInput("partial_transpose requires \"dims\"".into())
                })?;
                Some(SuperMap::partial_transpose(da, db)?)
            }
            Some("unitary_conjugation") => {
                let u = self.unitary.as_ref().ok_or_else(|| {
                    Error::InvalidInput("unitary_conjugation requires \"unitary\"".into())
                })?;
                Some(SuperMap::unitary_conjugation(u.to_matrix()?)?)
            }
            Some(other) => {
                return Err(Error::InvalidInput(format!("unknown builtin map {other:?}")))
            }
        };
        if let Some(map) = &builtin {
            if map.dim != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: map.dim,
                });
            }
        }
        let action = match &self.action {
            None => None,
            Some(rows) => {
                let n = self.dim * self.dim;
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: rows.len(),
                    });
                }
                Some(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
            }
        };
        match (builtin, action) {
            (Some(map), Some(action)) => {
                let dev = (&map.action - &action).abs().max();
                if dev > TAG_TOL {
                    return Err(Error::InvalidInput(format!(
                        "builtin tag disagrees with stored action (deviation {dev:.3e})"
                    )));
                }
                Ok(map)
            }
            (Some(map), None) => Ok(map),
            (None, Some(action)) => SuperMap::from_action(self.dim, action),
            (None, None) => Err(Error::InvalidInput(
                "map needs either \"builtin\" or \"action\"".into(),
            )),
        }
    }
}

impl Serialize for SuperMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut raw = SuperMapJson {
            dim: self.dim,
            builtin: None,
            dims: None,
            unitary: None,
            action: None,
        };
        match &self.kind {
            Some(MapKind::Identity) => raw.builtin = Some("identity".into()),
            Some(MapKind::Transpose) => raw.builtin = Some("transpose".into()),
            Some(MapKind::PartialTranspose { dims }) => {
                raw.builtin = Some("partial_transpose".into());
                raw.dims = Some([dims.0, dims.1]);
            }
            Some(MapKind::UnitaryConjugation { unitary }) => {
                raw.builtin = Some("unitary_conjugation".into());
                raw.unitary = Some(MatrixJson::from_matrix(unitary));
            }
            None => {
                raw.action = Some(
                    self.action
                        .row_iter()
                        .map(|r| r.iter().copied().collect())
                        .collect(),
                )
            }
        }
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SuperMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        SuperMapJson::deserialize(deserializer)?
            .into_map()
            .map_err(serde::de::Error::custom)
    }
}

/// Subspace file: either an explicit spanning set or the common fixed space
/// of a list of maps.
#[derive(Serialize, Deserialize)]
pub struct SubspaceJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spanning: Option<Vec<HermitianMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_by: Option<Vec<SuperMap>>,
}

impl SubspaceJson {
    pub fn into_subspace(self) -> Result<Subspace> {
        match (self.spanning, self.fixed_by) {
            (Some(span), None) => Subspace::from_spanning(self.dim, &span),
            (None, Some(maps)) => common_fixed_subspace(self.dim, &maps),
            _ => Err(Error::InvalidInput(
                "subspace needs exactly one of \"spanning\" or \"fixed_by\"".into(),
            )),
        }
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            dim: self.dim,
            spanning: Some(self.basis.clone()),
            fixed_by: None,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        SubspaceJson::deserialize(deserializer)?
            .into_subspace()
            .map_err(serde::de::Error::custom)
    }
}
