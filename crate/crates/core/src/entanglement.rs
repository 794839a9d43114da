//! Partial transposition and negativity of two-qutrit states.

use crate::density::{DensityMatrix9, Matrix9};
use crate::eigen::hermitian_eigenvalues;
use crate::error::Result;

/// Eigenvalues of the partial transpose above this are treated as zero.
pub const NEGATIVE_EIGENVALUE_THRESHOLD: f64 = -1e-12;

/// `<i j| m^T1 |k l> = <k j| m |i l>`, transposing atom 1's index.
pub fn partial_transpose_first(m: &Matrix9) -> Matrix9 {
    Matrix9::from_fn(|row, col| {
        let (i, j) = (row / 3, row % 3);
        let (k, l) = (col / 3, col % 3);
        m[(3 * k + j, 3 * i + l)]
    })
}

/// `<i j| m^T2 |k l> = <i l| m |k j>`, transposing atom 2's index.
pub fn partial_transpose_second(m: &Matrix9) -> Matrix9 {
    Matrix9::from_fn(|row, col| {
        let (i, j) = (row / 3, row % 3);
        let (k, l) = (col / 3, col % 3);
        m[(3 * i + l, 3 * k + j)]
    })
}

pub fn partial_transpose(rho: &DensityMatrix9) -> Matrix9 {
    partial_transpose_first(rho.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Negativity(f64);

impl Negativity {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Negativity> for f64 {
    fn from(n: Negativity) -> f64 {
        n.0
    }
}

/// `-2 * (sum of negative eigenvalues of the given spectrum)`.
pub fn negativity_from_spectrum(eigenvalues: &[f64]) -> Negativity {
    let neg: f64 = eigenvalues
        .iter()
        .filter(|&&l| l < NEGATIVE_EIGENVALUE_THRESHOLD)
        .sum();
    Negativity(-2.0 * neg)
}

/// Negativity with respect to the atom-1 partial transpose.
pub fn negativity(rho: &DensityMatrix9) -> Result<Negativity> {
    let ev = hermitian_eigenvalues(&partial_transpose(rho))?;
    Ok(negativity_from_spectrum(&ev))
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &Matrix9) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{BC, CA, CB, CC};
    use crate::dynamics::{AmplitudeSet, C64};
    use crate::measurement::assemble_density;

    #[test]
    fn diagonal_is_fixed_point() {
        let m = Matrix9::from_diagonal(&nalgebra::SVector::<C64, 9>::from_fn(|i, _| {
            C64::new(i as f64 / 36.0, 0.0)
        }));
        assert_eq!(partial_transpose_first(&m), m);
        assert_eq!(partial_transpose_second(&m), m);
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let m = Matrix9::from_fn(|i, j| C64::new(i as f64 + 0.1 * j as f64, j as f64 - i as f64));
        assert_eq!(partial_transpose_first(&partial_transpose_first(&m)), m);
        assert_eq!(partial_transpose_second(&partial_transpose_second(&m)), m);
        // T1 T2 is the full transpose
        assert_eq!(
            partial_transpose_first(&partial_transpose_second(&m)),
            m.transpose()
        );
    }

    #[test]
    fn bell_coherence_moves_to_ground_row() {
        let rho = assemble_density(&AmplitudeSet::bell()).unwrap();
        let pt = partial_transpose(&rho);
        // rho[CA][BC] = <C A|rho|B C> lands at <B A|rho^T1|C C>, i.e. (BA, CC)
        let ba = 5;
        assert_eq!(pt[(ba, CC)], rho.get(CA, BC));
        assert_eq!(pt[(CC, ba)], rho.get(BC, CA));
        assert_eq!(pt[(CA, CA)], rho.get(CA, CA));
        assert_eq!(pt[(CA, BC)], C64::new(0.0, 0.0));
    }

    #[test]
    fn matches_sparsity_of_single_excitation_layout() {
        let amps = AmplitudeSet::new(
            C64::new(0.2, 0.1),
            C64::new(-0.3, 0.2),
            C64::new(0.1, -0.4),
            C64::new(0.3, 0.3),
        );
        let rho = assemble_density(&amps).unwrap();
        let pt = partial_transpose(&rho);
        // 1-based (position, source element of rho) for every nonzero entry.
        // rho_47 sits at (7, 4); Hermiticity rules out (7, 5).
        let layout: [((usize, usize), (usize, usize)); 17] = [
            ((1, 1), (1, 1)),
            ((1, 5), (4, 2)),
            ((1, 6), (4, 3)),
            ((1, 8), (7, 2)),
            ((1, 9), (7, 3)),
            ((2, 2), (2, 2)),
            ((2, 3), (2, 3)),
            ((3, 2), (3, 2)),
            ((3, 3), (3, 3)),
            ((4, 4), (4, 4)),
            ((4, 7), (7, 4)),
            ((5, 1), (2, 4)),
            ((6, 1), (3, 4)),
            ((7, 4), (4, 7)),
            ((7, 7), (7, 7)),
            ((8, 1), (2, 7)),
            ((9, 1), (3, 7)),
        ];
        let mut expected = Matrix9::zeros();
        for ((r, c), (sr, sc)) in layout {
            expected[(r - 1, c - 1)] = rho.get(sr - 1, sc - 1);
        }
        assert!((pt - expected).norm() < 1e-15);
    }

    #[test]
    fn product_state_has_zero_negativity() {
        let rho = assemble_density(&AmplitudeSet::product()).unwrap();
        assert_eq!(negativity(&rho).unwrap().value(), 0.0);
    }

    #[test]
    fn bell_sector_is_maximally_entangled() {
        let rho = assemble_density(&AmplitudeSet::bell()).unwrap();
        let n = negativity(&rho).unwrap().value();
        assert!((n - 1.0).abs() < 1e-12);
        let tn = trace_norm(&partial_transpose(&rho)).unwrap();
        assert!((tn - 1.0 - n).abs() < 1e-9);
    }

    #[test]
    fn separable_diagonal_mixture() {
        let mut m = Matrix9::zeros();
        for (k, w) in [(CC, 0.4), (CB, 0.3), (BC, 0.2), (8, 0.1)] {
            m[(k, k)] = C64::new(w, 0.0);
        }
        let rho = DensityMatrix9::new(m).unwrap();
        assert_eq!(negativity(&rho).unwrap().value(), 0.0);
    }

    #[test]
    fn threshold_ignores_solver_noise() {
        let n = negativity_from_spectrum(&[-5e-13, 0.2, 0.8]);
        assert_eq!(n.value(), 0.0);
        let n = negativity_from_spectrum(&[-0.25, 0.25, 1.0]);
        assert_eq!(n.value(), 0.5);
    }
}
