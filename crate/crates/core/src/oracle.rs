//! Independent check of the closed form.
//!
//! The amplitude equation has an exponential memory kernel, so the history
//! integral `u_n(t) = ∫_0^t exp(-(kappa - i delta)(t - s)) Σ_j C_j^n(s) ds`
//! obeys a local ODE. Integrating the augmented six-component system with
//! RK4 is exact up to the stepper's own O(dt^4) error.

use crate::dynamics::{AmplitudeSet, SystemParams, C64};
use crate::error::{Error, Result};

/// Default oracle step in units of `1 / gamma0`.
pub const DEFAULT_DT: f64 = 1e-4;

/// Largest step allowed for `params`.
pub fn max_step(params: &SystemParams) -> f64 {
    let scale = params
        .kappa()
        .max(params.gamma0())
        .max(params.delta().abs())
        .max(1.0);
    0.01 / scale
}

/// Same-channel (`f`) or cross-channel (`f'`) memory kernel at lag `tau`.
pub fn memory_kernel(params: &SystemParams, same_channel: bool, tau: f64) -> C64 {
    let weight = if same_channel { 1.0 } else { params.theta() };
    let amplitude = 0.5 * params.gamma0() * params.kappa() * weight;
    (-params.kernel_rate() * tau).exp() * amplitude
}

/// Amplitudes plus the two memory integrals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AugmentedState {
    pub amps: AmplitudeSet,
    pub u_a: C64,
    pub u_b: C64,
}

impl AugmentedState {
    /// Empty memory.
    pub fn start(amps: AmplitudeSet) -> Self {
        Self {
            amps,
            ..Self::default()
        }
    }

    fn axpy(&self, h: f64, k: &Self) -> Self {
        let amps = self.amps + k.amps * C64::new(h, 0.0);
        Self {
            amps,
            u_a: self.u_a + k.u_a * h,
            u_b: self.u_b + k.u_b * h,
        }
    }

    fn is_finite(&self) -> bool {
        self.amps
            .to_array()
            .iter()
            .chain([&self.u_a, &self.u_b])
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn derivative(params: &SystemParams, s: &AugmentedState) -> AugmentedState {
    let rate = params.kernel_rate();
    let g = 0.5 * params.gamma0() * params.kappa();
    let theta = params.theta();
    let da = -(s.u_a + s.u_b * theta) * g;
    let db = -(s.u_b + s.u_a * theta) * g;
    AugmentedState {
        amps: AmplitudeSet::new(da, db, da, db),
        u_a: -rate * s.u_a + s.amps.c1a + s.amps.c2a,
        u_b: -rate * s.u_b + s.amps.c1b + s.amps.c2b,
    }
}

fn rk4_step(params: &SystemParams, s: &AugmentedState, h: f64) -> AugmentedState {
    let k1 = derivative(params, s);
    let k2 = derivative(params, &s.axpy(0.5 * h, &k1));
    let k3 = derivative(params, &s.axpy(0.5 * h, &k2));
    let k4 = derivative(params, &s.axpy(h, &k3));
    let mut next = *s;
    for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
        next = next.axpy(h * w / 6.0, k);
    }
    next
}

fn check_step(params: &SystemParams, dt: f64) -> Result<()> {
    let bound = max_step(params);
    if !(dt > 0.0 && dt <= bound * (1.0 + 1e-12)) {
        return Err(Error::StepTooLarge { dt, bound });
    }
    Ok(())
}

/// Advances `state` by `span` using equal steps no longer than `dt`.
fn advance(
    params: &SystemParams,
    mut state: AugmentedState,
    t0: f64,
    span: f64,
    dt: f64,
    mut visit: impl FnMut(f64, &AugmentedState),
) -> Result<AugmentedState> {
    if span <= 0.0 {
        return Ok(state);
    }
    let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;
    for i in 1..=n {
        state = rk4_step(params, &state, h);
        let t = t0 + h * i as f64;
        if !state.is_finite() {
            return Err(Error::NonFinite { t });
        }
        visit(t, &state);
    }
    Ok(state)
}

/// Oracle trajectory sampled at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<AmplitudeSet>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &AmplitudeSet)> {
        Some((*self.times.last()?, self.states.last()?))
    }
}

/// RK4 trajectory of the augmented system on `[0, t_end]`.
pub fn integrate(
    init: &AmplitudeSet,
    params: &SystemParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    check_step(params, dt)?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            bound: "t_end >= 0",
        });
    }
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![*init],
    };
    advance(
        params,
        AugmentedState::start(*init),
        0.0,
        t_end,
        dt,
        |t, s| {
            traj.times.push(t);
            traj.states.push(s.amps);
        },
    )?;
    Ok(traj)
}

/// Oracle amplitudes at each time of a nondecreasing grid.
pub fn sample(
    init: &AmplitudeSet,
    params: &SystemParams,
    t_grid: &[f64],
    dt: f64,
) -> Result<Vec<AmplitudeSet>> {
    check_step(params, dt)?;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut state = AugmentedState::start(*init);
    let mut now = 0.0;
    for &t in t_grid {
        if !(t >= now && t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_grid",
                value: t,
                bound: "nonnegative and nondecreasing",
            });
        }
        state = advance(params, state, now, t - now, dt, |_, _| {})?;
        now = t;
        out.push(state.amps);
    }
    Ok(out)
}

/// Worst-case disagreement between the closed form and the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub params: SystemParams,
    /// Max |analytic - oracle| per amplitude, in `c1a, c1b, c2a, c2b` order.
    pub per_amplitude: [f64; 4],
    /// Time at which the overall maximum occurred.
    pub worst_time: f64,
}

impl DeviationReport {
    pub fn max(&self) -> f64 {
        self.per_amplitude.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares an arbitrary analytic solution against the oracle on `t_grid`.
pub fn compare_with(
    params: &SystemParams,
    init: &AmplitudeSet,
    t_grid: &[f64],
    dt: f64,
    analytic: impl Fn(f64) -> AmplitudeSet,
) -> Result<DeviationReport> {
    let oracle = sample(init, params, t_grid, dt)?;
    let mut per_amplitude = [0.0_f64; 4];
    let mut worst = (0.0, 0.0);
    for (&t, reference) in t_grid.iter().zip(&oracle) {
        let a = analytic(t).to_array();
        let r = reference.to_array();
        for k in 0..4 {
            let d = (a[k] - r[k]).norm();
            per_amplitude[k] = per_amplitude[k].max(d);
            if d > worst.0 {
                worst = (d, t);
            }
        }
    }
    Ok(DeviationReport {
        params: *params,
        per_amplitude,
        worst_time: worst.1,
    })
}

/// Closed-form amplitudes versus the oracle on `t_grid`.
pub fn compare(
    params: &SystemParams,
    init: &AmplitudeSet,
    t_grid: &[f64],
    dt: f64,
) -> Result<DeviationReport> {
    compare_with(params, init, t_grid, dt, |t| {
        crate::dynamics::evolve_amplitudes(init, params, t)
    })
}
