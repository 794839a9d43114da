//! Two-qutrit density matrices.
//!
//! Each atom uses the single-atom order `{|C>, |B>, |A>}`, so the product
//! basis is `CC, CB, CA, BC, BB, BA, AC, AB, AA` with index `3 * atom1 + atom2`.

use nalgebra::SMatrix;

use crate::dynamics::C64;
use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};

pub type Matrix9 = SMatrix<C64, 9, 9>;
pub type Matrix3 = SMatrix<C64, 3, 3>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Single-atom level, numbered in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    C = 0,
    B = 1,
    A = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::C, Level::B, Level::A];

    pub fn is_excited(self) -> bool {
        self != Level::C
    }
}

pub const fn basis_index(atom1: Level, atom2: Level) -> usize {
    3 * atom1 as usize + atom2 as usize
}

pub const CC: usize = basis_index(Level::C, Level::C);
pub const CB: usize = basis_index(Level::C, Level::B);
pub const CA: usize = basis_index(Level::C, Level::A);
pub const BC: usize = basis_index(Level::B, Level::C);
pub const AC: usize = basis_index(Level::A, Level::C);

/// Indices that carry no weight in the single-excitation model.
pub const DOUBLY_EXCITED: [usize; 4] = [
    basis_index(Level::B, Level::B),
    basis_index(Level::B, Level::A),
    basis_index(Level::A, Level::B),
    basis_index(Level::A, Level::A),
];

/// Number of excited atoms in basis state `index`.
pub fn excitation_count(index: usize) -> u32 {
    let (a1, a2) = (index / 3, index % 3);
    u32::from(a1 != 0) + u32::from(a2 != 0)
}

pub fn max_hermitian_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in i..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix9(Matrix9);

impl DensityMatrix9 {
    /// Wraps `m` after checking Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix9) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix9) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix9 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix9 {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn hermitian_defect(&self) -> f64 {
        max_hermitian_defect(&self.0)
    }

    pub fn eigenvalues(&self) -> Result<[f64; 9]> {
        hermitian_eigenvalues(&self.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "Hermitian defect {defect:e} > {HERMITIAN_TOL:e}"
            )));
        }
        let trace = self.0.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "minimum eigenvalue {min:e} < -{PSD_TOL:e}"
            )));
        }
        Ok(())
    }

    /// Relabel atom 1 <-> atom 2.
    pub fn swap_atoms(&self) -> Self {
        let swap = |i: usize| 3 * (i % 3) + i / 3;
        Self(Matrix9::from_fn(|r, c| self.0[(swap(r), swap(c))]))
    }
}
