//! Closed-form evolution of the single-excitation amplitudes.
//!
//! Both atoms share a Lorentzian reservoir. With degenerate upper levels the
//! equations decouple into a symmetric (`+`) and an antisymmetric (`-`)
//! collective channel with effective couplings `gamma0 * (1 ± theta)`. Each
//! channel is damped by the propagator
//!
//! ```text
//! G(t) = exp(-a t / 2) [cosh(d t / 2) + (a / d) sinh(d t / 2)],   a = kappa - i delta
//! d^2  = a^2 - 4 gamma0 kappa (1 ± theta)
//! ```
//!
//! and the four amplitudes mix through `G1 = (G+ + G- + 2)/4`,
//! `G2 = (G+ + G- - 2)/4` and `G3 = (G+ - G-)/4`.

use std::ops::{Add, Mul, Sub};

use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Physical parameters, all in units where rates are measured against `gamma0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    gamma0: f64,
    kappa: f64,
    theta: f64,
    delta: f64,
}

impl SystemParams {
    pub fn new(gamma0: f64, kappa: f64, theta: f64, delta: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma0",
                value: gamma0,
                bound: "gamma0 > 0",
            });
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: kappa,
                bound: "kappa > 0",
            });
        }
        if !(theta.is_finite() && theta.abs() <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                bound: "|theta| <= 1",
            });
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                bound: "delta finite",
            });
        }
        Ok(Self {
            gamma0,
            kappa,
            theta,
            delta,
        })
    }

    /// Parameters with `gamma0 = 1`.
    pub fn scaled(kappa: f64, theta: f64, delta: f64) -> Result<Self> {
        Self::new(1.0, kappa, theta, delta)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `kappa - i delta`, the complex damping rate of the memory kernel.
    pub fn kernel_rate(&self) -> C64 {
        C64::new(self.kappa, -self.delta)
    }
}

/// Symmetric (`+`) or antisymmetric (`-`) collective channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Single-excitation amplitudes. `c{atom}{level}`: `c1b` is atom 1 in |B>, etc.
///
/// The reservoir weight `1 - norm_sqr()` is implied and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AmplitudeSet {
    pub c1a: C64,
    pub c1b: C64,
    pub c2a: C64,
    pub c2b: C64,
}

impl AmplitudeSet {
    pub fn new(c1a: C64, c1b: C64, c2a: C64, c2b: C64) -> Self {
        Self { c1a, c1b, c2a, c2b }
    }

    /// `c2a |C1 A2> + c1b |B1 C2>`, the family of initial states used throughout.
    pub fn initial(c2a: C64, c1b: C64) -> Self {
        Self {
            c2a,
            c1b,
            ..Self::default()
        }
    }

    /// `(|C1 A2> + |B1 C2>) / sqrt(2)`.
    pub fn bell() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::initial(h, h)
    }

    /// `|B1 C2>`.
    pub fn product() -> Self {
        Self::initial(ZERO, ONE)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1a.norm_sqr() + self.c1b.norm_sqr() + self.c2a.norm_sqr() + self.c2b.norm_sqr()
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.c1a, self.c1b, self.c2a, self.c2b]
    }

    pub fn from_array(a: [C64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Relabel atom 1 <-> atom 2.
    pub fn swap_atoms(&self) -> Self {
        Self::new(self.c2a, self.c2b, self.c1a, self.c1b)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(f(self.c1a), f(self.c1b), f(self.c2a), f(self.c2b))
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other)
            .to_array()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Collective amplitudes `C_l^± = C_l^A ± C_l^B` for atom `l` in {1, 2}.
    pub fn collective(&self, atom: usize, branch: Branch) -> C64 {
        let (a, b) = match atom {
            1 => (self.c1a, self.c1b),
            2 => (self.c2a, self.c2b),
            _ => panic!("atom index must be 1 or 2, got {atom}"),
        };
        a + b * branch.sign()
    }
}

impl Add for AmplitudeSet {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.c1a + rhs.c1a,
            self.c1b + rhs.c1b,
            self.c2a + rhs.c2a,
            self.c2b + rhs.c2b,
        )
    }
}

impl Sub for AmplitudeSet {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.c1a - rhs.c1a,
            self.c1b - rhs.c1b,
            self.c2a - rhs.c2a,
            self.c2b - rhs.c2b,
        )
    }
}

impl Mul<C64> for AmplitudeSet {
    type Output = Self;

    fn mul(self, rhs: C64) -> Self {
        self.map(|z| z * rhs)
    }
}

/// Mixing coefficients `G1, G2, G3` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorCoefficients {
    pub g1: C64,
    pub g2: C64,
    pub g3: C64,
}

impl PropagatorCoefficients {
    pub fn from_propagators(g_plus: C64, g_minus: C64) -> Self {
        let sum = g_plus + g_minus;
        Self {
            g1: (sum + 2.0) / 4.0,
            g2: (sum - 2.0) / 4.0,
            g3: (g_plus - g_minus) / 4.0,
        }
    }

    pub fn apply(&self, init: &AmplitudeSet) -> AmplitudeSet {
        let Self { g1, g2, g3 } = *self;
        let a_sum = init.c1a + init.c2a;
        let b_sum = init.c1b + init.c2b;
        AmplitudeSet {
            c1a: g1 * init.c1a + g2 * init.c2a + g3 * b_sum,
            c1b: g1 * init.c1b + g2 * init.c2b + g3 * a_sum,
            c2a: g1 * init.c2a + g2 * init.c1a + g3 * b_sum,
            c2b: g1 * init.c2b + g2 * init.c1b + g3 * a_sum,
        }
    }
}

fn coupling(params: &SystemParams, branch: Branch) -> f64 {
    4.0 * params.gamma0 * params.kappa * (1.0 + branch.sign() * params.theta)
}

/// Principal square root of `(kappa - i delta)^2 - 4 gamma0 kappa (1 ± theta)`.
pub fn collective_root(params: &SystemParams, branch: Branch) -> C64 {
    let a = params.kernel_rate();
    let z = a * a - coupling(params, branch);
    // `+ 0.0` maps a signed-zero imaginary part to +0 so the cut is not crossed.
    C64::new(z.re, z.im + 0.0).sqrt()
}

/// `sinh(x) / x`, with the removable singularity filled in.
fn sinhc(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        ONE + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// `G` from the rate `a`, a root `d` with `d^2 = a^2 - c`, and `c` itself.
fn propagator_parts(a: C64, root: C64, c: C64, t: f64) -> C64 {
    // G is even in d; pointing d along a keeps d + a away from zero.
    let d = if (root * a.conj()).re < 0.0 {
        -root
    } else {
        root
    };
    let half_t = 0.5 * t;
    let x = d * half_t;
    if x.norm() <= 1.0 {
        return (-a * half_t).exp() * (x.cosh() + a * half_t * sinhc(x));
    }
    // Split into the two characteristic exponentials; neither grows, so this
    // stays finite where cosh/sinh alone would overflow. The slow exponent
    // d - a is written as -c / (d + a) to avoid cancellation when c << |a|^2.
    let ratio = a / d;
    let slow = (-c / (d + a) * half_t).exp();
    let fast = (-(a + d) * half_t).exp();
    (slow * (ONE + ratio) + fast * (ONE - ratio)) * 0.5
}

/// Collective propagator `G(t)` for an explicit characteristic root `d`.
///
/// Only even functions of `d` enter, so either sign of the root gives the same
/// value.
pub fn propagator_from_root(params: &SystemParams, root: C64, t: f64) -> C64 {
    let a = params.kernel_rate();
    propagator_parts(a, root, a * a - root * root, t)
}

/// `G_±(t)`.
pub fn propagator(params: &SystemParams, branch: Branch, t: f64) -> C64 {
    let c = C64::new(coupling(params, branch), 0.0);
    propagator_parts(params.kernel_rate(), collective_root(params, branch), c, t)
}

pub fn mixing_coefficients(params: &SystemParams, t: f64) -> PropagatorCoefficients {
    PropagatorCoefficients::from_propagators(
        propagator(params, Branch::Plus, t),
        propagator(params, Branch::Minus, t),
    )
}

/// Amplitudes at time `t` from `init` at time 0.
pub fn evolve_amplitudes(init: &AmplitudeSet, params: &SystemParams, t: f64) -> AmplitudeSet {
    mixing_coefficients(params, t).apply(init)
}
