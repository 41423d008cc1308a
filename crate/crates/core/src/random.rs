//! Seeded generators for random matrices and test instances.

use nalgebra::{DMatrix, DVector};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bridge::{Decomposition, Term};
use crate::hermitian::{DensityMatrix, HermitianMatrix, PSD_TOL};
use crate::measurement::Measurement;
use crate::supermap::SuperMap;
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianMatrix {
    let m = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    HermitianMatrix::symmetrized(m)
}

/// `G G†` for a complex Gaussian `d×rank` matrix `G`.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
    let g = gaussian_matrix(d, rank, rng);
    HermitianMatrix::symmetrized(&g * g.adjoint())
}

pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::normalized(random_psd(d, d, rng)).expect("nonzero PSD")
}

/// Haar-random unitary: QR of a Gaussian matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = gaussian_matrix(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Which families the map of each random term is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapFamily {
    Identity,
    Transpose,
    PartialTranspose,
    UnitaryConjugation,
}

impl MapFamily {
    pub fn available(d: usize) -> Vec<MapFamily> {
        let mut v = vec![MapFamily::Identity, MapFamily::Transpose, MapFamily::UnitaryConjugation];
        if d == 4 {
            v.push(MapFamily::PartialTranspose);
        }
        v
    }

    pub fn build<R: Rng + ?Sized>(self, d: usize, rng: &mut R) -> SuperMap {
        match self {
            MapFamily::Identity => SuperMap::identity(d),
            MapFamily::Transpose => SuperMap::transpose(d),
            MapFamily::PartialTranspose => SuperMap::partial_transpose(2, d / 2).expect("even d"),
            MapFamily::UnitaryConjugation => {
                SuperMap::unitary_conjugation(random_unitary(d, rng)).expect("unitary")
            }
        }
    }
}

/// A random decomposition on `C^d` with two or three outcomes and one or two
/// terms per outcome. The last outcome carries an extra identity term
/// `𝟙 − Σ f(S)`, kept positive by shrinking the random terms.
pub fn random_decomposition<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Decomposition {
    let families = MapFamily::available(d);
    let outcomes = rng.random_range(2..=3);
    let mut raw: Vec<(String, SuperMap, HermitianMatrix)> = Vec::new();
    for i in 0..outcomes {
        for _ in 0..rng.random_range(1..=2) {
            let family = *families.choose(rng).expect("non-empty");
            let rank = rng.random_range(1..=d);
            raw.push((i.to_string(), family.build(d, rng), random_psd(d, rank, rng)));
        }
    }
    let mut total = HermitianMatrix::zeros(d);
    for (_, f, s) in &raw {
        total = &total + &f.apply(s).expect("dims");
    }
    let (lo, hi) = total.eig_extrema();
    let scale = rng.random_range(0.3..0.9) / lo.abs().max(hi.abs()).max(1e-12);
    let mut terms: Vec<(String, Vec<Term>)> = (0..outcomes).map(|i| (i.to_string(), vec![])).collect();
    for (label, f, s) in raw {
        let slot = terms.iter_mut().find(|(l, _)| *l == label).expect("label");
        slot.1.push(Term::new(f, s.scale(scale)));
    }
    let rest = &HermitianMatrix::identity(d) - &total.scale(scale);
    terms
        .last_mut()
        .expect("outcomes")
        .1
        .push(Term::new(SuperMap::identity(d), rest));
    Decomposition::new(d, terms).expect("generator keeps terms positive and summing to 𝟙")
}

/// Two-outcome N-POVM `{𝟙 − Γ(P), Γ(P)}` on two qubits with `P` a noisy
/// entangled projector, together with the `d` orthogonal pure states in which
/// both effects have non-negative diagonals. With `random_frame` the whole
/// instance is rotated by a random unitary.
pub fn pt_witness_npovm<R: Rng + ?Sized>(
    rng: &mut R,
    random_frame: bool,
) -> (Measurement, Vec<DensityMatrix>) {
    loop {
        let chi = random_ket(4, rng);
        let noise = random_psd(4, 4, rng);
        let p = &HermitianMatrix::ket_bra(&chi) + &noise.scale(rng.random_range(0.0..0.05));
        let max_diag = (0..4).map(|j| p.entry(j, j).re).fold(0.0, f64::max);
        let p = p.scale(rng.random_range(0.3..0.9) / max_diag);
        let n1 = p.partial_transpose(2, 2).expect("4 = 2·2");
        let n0 = &HermitianMatrix::identity(4) - &n1;
        let m = Measurement::from_pairs([("0", n0), ("1", n1)]).expect("sums to 𝟙");
        if m.is_povm(PSD_TOL) {
            continue;
        }
        let u = if random_frame {
            random_unitary(4, rng)
        } else {
            DMatrix::identity(4, 4)
        };
        let rotated = Measurement::from_pairs(
            m.outcomes()
                .iter()
                .map(|o| (o.label.clone(), o.effect.conjugate_by(&u).expect("dims"))),
        )
        .expect("conjugation keeps the sum");
        let states = (0..4)
            .map(|j| DensityMatrix::pure(&u.column(j).into_owned()).expect("unit column"))
            .collect();
        return (rotated, states);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..6 {
            let u = random_unitary(d, &mut rng);
            let dev = (u.adjoint() * &u - DMatrix::<C64>::identity(d, d)).norm();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn decompositions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 2..=4 {
            for _ in 0..5 {
                let dec = random_decomposition(d, &mut rng);
                assert_eq!(dec.dim(), d);
            }
        }
    }

    #[test]
    fn witness_instances_are_npovms_with_nonnegative_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for frame in [false, true] {
            let (m, states) = pt_witness_npovm(&mut rng, frame);
            assert!(!m.is_povm(PSD_TOL));
            for rho in &states {
                for p in m.expectations(rho.matrix()).unwrap() {
                    assert!(p >= -1e-12);
                }
            }
        }
    }
}
