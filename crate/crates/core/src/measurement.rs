//! Prior weak measurement, density assembly and measurement reversal.
//!
//! Both atoms are measured with the same strengths. The weak measurement is
//! `diag(1, sqrt(1-p), sqrt(1-p))` per atom and the reversal is
//! `diag(1-p_r, sqrt(1-p_r), sqrt(1-p_r))`, in the single-atom order
//! `{|C>, |B>, |A>}`.

use crate::density::{
    excitation_count, DensityMatrix9, Level, Matrix3, Matrix9, AC, BC, CA, CB, CC,
};
use crate::dynamics::{AmplitudeSet, C64};
use crate::error::{Error, Result};

/// Slack allowed on `sum |c|^2 <= 1` before an amplitude set is rejected.
pub const NORM_SLACK: f64 = 1e-9;

/// Smallest reversal normalization accepted.
pub const MIN_NORMALIZATION: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementStrengths {
    p: f64,
    p_r: f64,
}

impl MeasurementStrengths {
    pub fn new(p: f64, p_r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                bound: "0 <= p <= 1",
            });
        }
        if !(0.0..1.0).contains(&p_r) {
            return Err(Error::InvalidParameter {
                name: "p_r",
                value: p_r,
                bound: "0 <= p_r < 1",
            });
        }
        Ok(Self { p, p_r })
    }

    pub fn none() -> Self {
        Self { p: 0.0, p_r: 0.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p_r(&self) -> f64 {
        self.p_r
    }
}

/// How the state is normalized right after the prior weak measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Scale amplitudes by `sqrt(1-p)` and let the lost weight sit in the
    /// ground-ground population; normalization happens after the reversal.
    #[default]
    Unnormalized,
    /// Renormalize to unit trace immediately (`C1 = 1 - p` for a normalized
    /// single-excitation input). Uniform `p` then leaves such inputs unchanged.
    Immediate,
}

impl std::str::FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "unnormalized" => Ok(Self::Unnormalized),
            "paper" => Ok(Self::Immediate),
            other => Err(format!(
                "unknown normalization `{other}` (expected `paper` or `unnormalized`)"
            )),
        }
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Unnormalized => "unnormalized",
            Self::Immediate => "paper",
        })
    }
}

/// Scales every single-excitation amplitude by `sqrt(1-p)` without renormalizing.
pub fn apply_weak_measurement(init: &AmplitudeSet, p: f64) -> AmplitudeSet {
    debug_assert!((0.0..=1.0).contains(&p));
    let s = (1.0 - p).sqrt();
    init.map(|z| z * s)
}

/// Weak measurement under the chosen normalization convention.
pub fn prepare_initial(
    init: &AmplitudeSet,
    p: f64,
    normalization: Normalization,
) -> Result<AmplitudeSet> {
    let norm = init.norm_sqr();
    if !(norm <= 1.0 + NORM_SLACK) {
        return Err(Error::AmplitudeNorm { norm });
    }
    let measured = apply_weak_measurement(init, p);
    match normalization {
        Normalization::Unnormalized => Ok(measured),
        Normalization::Immediate => {
            // Ground component keeps weight 1 under M_w.
            let c1 = (1.0 - norm) + measured.norm_sqr();
            if c1 < MIN_NORMALIZATION {
                return Err(Error::DegenerateNormalization {
                    value: c1,
                    context: "weak-measurement normalization C1",
                });
            }
            let s = 1.0 / c1.sqrt();
            Ok(measured.map(|z| z * s))
        }
    }
}

/// Reduced two-atom state with the reservoir traced out.
pub fn assemble_density(amps: &AmplitudeSet) -> Result<DensityMatrix9> {
    let norm = amps.norm_sqr();
    if !(norm <= 1.0 + NORM_SLACK) {
        return Err(Error::AmplitudeNorm { norm });
    }
    let mut psi = [C64::new(0.0, 0.0); 9];
    psi[CB] = amps.c2b;
    psi[CA] = amps.c2a;
    psi[BC] = amps.c1b;
    psi[AC] = amps.c1a;

    let mut m = Matrix9::from_fn(|i, j| psi[i] * psi[j].conj());
    m[(CC, CC)] = C64::new(1.0 - norm, 0.0);
    Ok(DensityMatrix9::from_matrix_unchecked(m))
}

/// Per-element reversal weight `m_i m_j` for diagonal entries
/// `m_i = (1-p_r)^(2 - n_i/2)`, `n_i` the number of excited atoms.
fn reversal_weight(i: usize, j: usize, p_r: f64) -> f64 {
    let exponent = 4.0 - 0.5 * f64::from(excitation_count(i) + excitation_count(j));
    (1.0 - p_r).powf(exponent)
}

/// Trace of the reversed, not yet normalized state (`C2`).
pub fn reversal_normalization(rho: &DensityMatrix9, p_r: f64) -> f64 {
    (0..9)
        .map(|i| reversal_weight(i, i, p_r) * rho.get(i, i).re)
        .sum()
}

/// Applies the reversing measurement and renormalizes by `C2`.
pub fn apply_reversal(rho: &DensityMatrix9, p_r: f64) -> Result<DensityMatrix9> {
    if !(0.0..1.0).contains(&p_r) {
        return Err(Error::InvalidParameter {
            name: "p_r",
            value: p_r,
            bound: "0 <= p_r < 1",
        });
    }
    let c2 = reversal_normalization(rho, p_r);
    if !(c2 >= MIN_NORMALIZATION) {
        return Err(Error::DegenerateNormalization {
            value: c2,
            context: "reversal normalization C2",
        });
    }
    let m = Matrix9::from_fn(|i, j| rho.get(i, j) * (reversal_weight(i, j, p_r) / c2));
    Ok(DensityMatrix9::from_matrix_unchecked(m))
}

/// Probability that the reversal succeeds on the state described by `amps`.
pub fn success_probability(amps: &AmplitudeSet, p_r: f64) -> f64 {
    let excited = amps.norm_sqr();
    let ground = 1.0 - excited;
    let w = 1.0 - p_r;
    ground * w.powi(4) + excited * w.powi(3)
}

fn single_atom_operator(entries: [f64; 3]) -> Matrix3 {
    let mut m = Matrix3::zeros();
    for level in Level::ALL {
        let k = level as usize;
        m[(k, k)] = C64::new(entries[k], 0.0);
    }
    m
}

/// Full two-atom weak-measurement operator `M_w(p) ⊗ M_w(p)`.
pub fn weak_measurement_operator(p: f64) -> Matrix9 {
    let s = (1.0 - p).sqrt();
    let one = single_atom_operator([1.0, s, s]);
    one.kronecker(&one)
}

/// Full two-atom reversal operator `M_r(p_r) ⊗ M_r(p_r)`.
pub fn reversal_operator(p_r: f64) -> Matrix9 {
    let s = (1.0 - p_r).sqrt();
    let one = single_atom_operator([1.0 - p_r, s, s]);
    one.kronecker(&one)
}
