//! Cyclic Jacobi eigenvalues for small dense Hermitian matrices.

use nalgebra::SMatrix;

use crate::density::max_hermitian_defect;
use crate::dynamics::C64;
use crate::error::{Error, Result};

const INPUT_HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Each rotation first rotates the phase out of the pivot `m[p][q]` with a
/// diagonal unitary, then annihilates the now-real pivot with a Givens
/// rotation. Only the lower-left input triangle is trusted up to
/// Hermitian symmetrization.
pub fn hermitian_eigenvalues<const N: usize>(m: &SMatrix<C64, N, N>) -> Result<[f64; N]> {
    let defect = max_hermitian_defect(m);
    if !(defect <= INPUT_HERMITIAN_TOL) {
        return Err(Error::NotHermitian { defect });
    }
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = (scale * f64::EPSILON).max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, p, q);
            }
        }
    }

    let mut out = [0.0; N];
    for (i, v) in out.iter_mut().enumerate() {
        *v = a[(i, i)].re;
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<C64, N, N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<const N: usize>(a: &mut SMatrix<C64, N, N>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }

    // D = diag(.., conj(phase) at q, ..) makes a[p][q] real and positive.
    let phase = apq / mag;
    for i in 0..N {
        a[(i, q)] *= phase.conj();
    }
    for j in 0..N {
        a[(q, j)] *= phase;
    }

    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}
