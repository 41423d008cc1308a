//! A two-qubit N-POVM built from the partial transpose on the second qubit,
//! together with the POVM that implements it under post-selection and two
//! non-orthogonal states it tells apart perfectly.
//!
//! ```text
//!        [1 0 0 0]        [0  0  0 0]              [1 0 0 1]
//!   N0 = [0 0 1 0]   N1 = [0  1 -1 0]   Γ(N0) =    [0 0 0 0]
//!        [0 1 0 0]        [0 -1  1 0]              [0 0 0 0]
//!        [0 0 0 1]        [0  0  0 0]              [1 0 0 1]
//!
//!   M0 = Γ(N0)/2,  M1 = N1/2,  M2 = 𝟙 − M0 − M1
//! ```

use crate::bridge::{Decomposition, Term};
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::measurement::Measurement;
use crate::supermap::SuperMap;

/// Label of the reject outcome of [`PartialTransposeExample::povm`].
pub const REJECT_LABEL: &str = "2";

#[derive(Clone, Debug)]
pub struct PartialTransposeExample {
    pub n0: HermitianMatrix,
    pub n1: HermitianMatrix,
    /// `Γ(N0)`, the matrix with ones in its four corners.
    pub four_corners: HermitianMatrix,
    pub m0: HermitianMatrix,
    pub m1: HermitianMatrix,
    pub m2: HermitianMatrix,
    /// `|00⟩⟨00|`.
    pub rho0: DensityMatrix,
    /// `|+−⟩⟨+−|`; overlaps `rho0` with weight 1/4.
    pub rho1: DensityMatrix,
}

fn real4(entries: [f64; 16]) -> HermitianMatrix {
    HermitianMatrix::from_real(4, &entries).expect("symmetric literal")
}

impl Default for PartialTransposeExample {
    fn default() -> Self {
        Self::new()
    }
}

impl PartialTransposeExample {
    pub fn new() -> Self {
        #[rustfmt::skip]
        let n0 = real4([
            1., 0., 0., 0.,
            0., 0., 1., 0.,
            0., 1., 0., 0.,
            0., 0., 0., 1.,
        ]);
        #[rustfmt::skip]
        let n1 = real4([
            0.,  0.,  0., 0.,
            0.,  1., -1., 0.,
            0., -1.,  1., 0.,
            0.,  0.,  0., 0.,
        ]);
        #[rustfmt::skip]
        let four_corners = real4([
            1., 0., 0., 1.,
            0., 0., 0., 0.,
            0., 0., 0., 0.,
            1., 0., 0., 1.,
        ]);
        #[rustfmt::skip]
        let m2 = real4([
             1., 0., 0., -1.,
             0., 1., 1.,  0.,
             0., 1., 1.,  0.,
            -1., 0., 0.,  1.,
        ])
        .scale(0.5);
        let rho0 = DensityMatrix::new(HermitianMatrix::basis_projector(4, 0)).expect("pure state");
        #[rustfmt::skip]
        let rho1 = DensityMatrix::new(real4([
             1., -1.,  1., -1.,
            -1.,  1., -1.,  1.,
             1., -1.,  1., -1.,
            -1.,  1., -1.,  1.,
        ]).scale(0.25))
        .expect("pure state");
        PartialTransposeExample {
            m0: four_corners.scale(0.5),
            m1: n1.scale(0.5),
            n0,
            n1,
            four_corners,
            m2,
            rho0,
            rho1,
        }
    }

    /// `{N0, N1}` labelled "0", "1".
    pub fn npovm(&self) -> Measurement {
        Measurement::from_pairs([("0", self.n0.clone()), ("1", self.n1.clone())])
            .expect("effects sum to the identity")
    }

    /// `{M0, M1, M2}` labelled "0", "1", "2"; "2" is the reject outcome.
    pub fn povm(&self) -> Measurement {
        Measurement::from_pairs([
            ("0", self.m0.clone()),
            ("1", self.m1.clone()),
            (REJECT_LABEL, self.m2.clone()),
        ])
        .expect("effects sum to the identity")
    }

    pub fn gamma() -> SuperMap {
        SuperMap::partial_transpose(2, 2).expect("4 = 2·2")
    }

    /// `N0 = Γ(Γ(N0))`, `N1 = id(N1)`.
    pub fn decomposition(&self) -> Decomposition {
        Decomposition::new(
            4,
            [
                ("0", vec![Term::new(Self::gamma(), self.four_corners.clone())]),
                ("1", vec![Term::new(SuperMap::identity(4), self.n1.clone())]),
            ],
        )
        .expect("valid decomposition")
    }

    /// The computational basis states `|j⟩⟨j|`.
    pub fn computational_basis() -> Vec<DensityMatrix> {
        (0..4)
            .map(|j| DensityMatrix::new(HermitianMatrix::basis_projector(4, j)).expect("pure"))
            .collect()
    }
}
