//! Pseudospectral simulation of the full nonlinear equation with homogeneous boundary data,
//! and a Picard iteration on the linear solvers.
//!
//! Expanding `N_tt` by the chain rule and moving the `u_ttt` term to the left gives
//! `(1 + 2k u_t) u_ttt = L(u) − 2k u_tt² − 2s(|∇u_t|² + ∇u·∇u_tt) − f`
//! with `L(u) = (a+b)Δu_tt + c²Δu_t − abΔ²u_t − ac²Δ²u`.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::block::PdeParams;
use crate::compat;
use crate::data::{FieldState, Forcing, ProblemData, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::fd;
use crate::linear::{self, LinearOptions};
use crate::spectral::{GridFunction, SpectralDomain};

pub const DEFAULT_GUARD: f64 = 0.5;
const PICARD_FD_ACCURACY: usize = 4;
const GROWTH_LIMIT: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Lawson RK4 with the exact per-mode linear propagator.
    #[default]
    IntegratingFactor,
    /// Classical RK4 on `(u, u_t, u_tt)`.
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            max_iterations: 40,
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub params: PdeParams,
    /// Lower bound enforced on `1 + 2k u_t`.
    pub guard: f64,
    pub integrator: Integrator,
    pub record_stride: usize,
    pub picard: PicardConfig,
    /// Skip the compatibility gate.
    pub force: bool,
}

impl SimConfig {
    pub fn new(params: PdeParams) -> SimConfig {
        SimConfig {
            params,
            guard: DEFAULT_GUARD,
            integrator: Integrator::default(),
            record_stride: 1,
            picard: PicardConfig::default(),
            force: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.guard > 0.0 && self.guard < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "guard must lie in (0, 1), got {}",
                self.guard
            )));
        }
        if !(self.picard.tolerance > 0.0) {
            return Err(Error::InvalidParameter("Picard tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Mode-space state `(u, u_t, u_tt)`.
#[derive(Clone, Debug)]
struct Modes {
    u: Vec<f64>,
    ut: Vec<f64>,
    utt: Vec<f64>,
}

impl Modes {
    fn from_state(s: &FieldState) -> Modes {
        Modes {
            u: s.u.coeffs().to_vec(),
            ut: s.ut.coeffs().to_vec(),
            utt: s.utt.coeffs().to_vec(),
        }
    }

    fn to_state(&self, domain: &Arc<SpectralDomain>, time: f64) -> FieldState {
        let g = |c: &Vec<f64>| GridFunction::from_coeffs(domain, c.clone()).expect("domain shape");
        FieldState {
            time,
            u: g(&self.u),
            ut: g(&self.ut),
            utt: g(&self.utt),
        }
    }

    fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.ut)
            .chain(&self.utt)
            .all(|v| v.is_finite())
    }

    /// `self + h·(d_u, d_ut, d_utt)`
    fn offset(&self, h: f64, d: &Modes) -> Modes {
        let f = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| x + h * y).collect();
        Modes {
            u: f(&self.u, &d.u),
            ut: f(&self.ut, &d.ut),
            utt: f(&self.utt, &d.utt),
        }
    }
}

/// `L(u)` per mode, `λ` the eigenvalue of `−Δ`.
fn linear_part(p: &PdeParams, lam: &[f64], m: &Modes) -> Vec<f64> {
    let (a, b, c2) = (p.a, p.b, p.c * p.c);
    lam.iter()
        .enumerate()
        .map(|(i, &l)| {
            -(a + b) * l * m.utt[i] - (c2 * l + a * b * l * l) * m.ut[i] - a * c2 * l * l * m.u[i]
        })
        .collect()
}

fn gradient_dot(x: &GridFunction, y: &GridFunction) -> Vec<f64> {
    let gx = x.gradient();
    let gy = y.gradient();
    let mut out = vec![0.0; gx[0].fine_values().len()];
    for (a, b) in gx.iter().zip(&gy) {
        for ((o, va), vb) in out.iter_mut().zip(a.fine_values()).zip(b.fine_values()) {
            *o += va * vb;
        }
    }
    out
}

/// `u_ttt − L(u)` per mode, with forcing coefficients `f` when present.
fn nonlinear_part(
    domain: &Arc<SpectralDomain>,
    p: &PdeParams,
    guard: f64,
    m: &Modes,
    lin: &[f64],
    f: Option<&[f64]>,
    time: f64,
) -> Result<Vec<f64>> {
    let mut drive: Vec<f64> = lin.to_vec();
    if let Some(f) = f {
        drive.iter_mut().zip(f).for_each(|(d, fv)| *d -= fv);
    }
    if p.k == 0.0 && p.s == 0 {
        return Ok(drive.iter().zip(lin).map(|(d, l)| d - l).collect());
    }
    let g = |c: &Vec<f64>| GridFunction::from_coeffs(domain, c.clone()).expect("domain shape");
    let ut = g(&m.ut);
    let utt = g(&m.utt);
    let drive_f = g(&drive).fine_values();
    let ut_f = ut.fine_values();
    let utt_f = utt.fine_values();
    let mut quad: Vec<f64> = utt_f.iter().map(|v| 2.0 * p.k * v * v).collect();
    if p.s == 1 {
        let u = g(&m.u);
        let a = gradient_dot(&ut, &ut);
        let b = gradient_dot(&u, &utt);
        for ((q, x), y) in quad.iter_mut().zip(a).zip(b) {
            *q += 2.0 * (x + y);
        }
    }
    let den: Vec<f64> = ut_f.iter().map(|v| 1.0 + 2.0 * p.k * v).collect();
    let (worst, &low) = den
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    if !(low >= guard) {
        return Err(Error::GuardViolation {
            time,
            value: low,
            guard,
            location: domain.fine_points()[worst].clone(),
        });
    }
    let corr: Vec<f64> = (0..den.len())
        .map(|i| (-2.0 * p.k * ut_f[i] * drive_f[i] - quad[i]) / den[i])
        .collect();
    let corr = domain.from_fine(domain.solution_parity(), &corr)?;
    Ok(drive
        .iter()
        .zip(lin)
        .zip(corr.coeffs())
        .map(|((d, l), c)| d - l + c)
        .collect())
}

/// `u_ttt` for the unforced equation at the given state.
pub fn rhs_expanded(state: &FieldState, params: &PdeParams, guard: f64) -> Result<GridFunction> {
    let domain = state.u.domain();
    let m = Modes::from_state(state);
    let lin = linear_part(params, domain.lambdas(), &m);
    let nl = nonlinear_part(domain, params, guard, &m, &lin, None, state.time)?;
    let out = lin.iter().zip(&nl).map(|(l, n)| l + n).collect();
    GridFunction::from_coeffs(domain, out)
}

/// `min (1 + 2k u_t)` on the oversampled grid.
pub fn guard_minimum(state: &FieldState, params: &PdeParams) -> f64 {
    if params.k == 0.0 {
        return 1.0;
    }
    state
        .ut
        .fine_values()
        .iter()
        .map(|v| 1.0 + 2.0 * params.k * v)
        .fold(f64::INFINITY, f64::min)
}

/// Forcing coefficients at an arbitrary time; spectral samples are interpolated linearly.
fn forcing_at(f: &Forcing, domain: &Arc<SpectralDomain>, time: &TimeGrid, t: f64) -> Option<Vec<f64>> {
    match f {
        Forcing::Zero => None,
        Forcing::Field(field) => Some(domain.sample(|x| field.eval(t, x)).into_coeffs()),
        Forcing::Spectral(s) => {
            let pos = (t / time.dt).clamp(0.0, (s.len() - 1) as f64);
            let n = (pos.floor() as usize).min(s.len().saturating_sub(2));
            let w = pos - n as f64;
            let hi = &s[(n + 1).min(s.len() - 1)];
            Some(s[n].iter().zip(hi).map(|(a, b)| (1.0 - w) * a + w * b).collect())
        }
    }
}

/// Companion matrix of the linear part for one mode.
fn companion(p: &PdeParams, l: f64) -> DMatrix<f64> {
    let (a, b, c2) = (p.a, p.b, p.c * p.c);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            1.0,
            -a * c2 * l * l,
            -(c2 * l + a * b * l * l),
            -(a + b) * l,
        ],
    )
}

struct Stepper<'a> {
    domain: &'a Arc<SpectralDomain>,
    cfg: &'a SimConfig,
    data: &'a ProblemData,
    lam: Vec<f64>,
    /// `e^{Ah/2}` and `e^{Ah}` per mode.
    half: Vec<Matrix3<f64>>,
    full: Vec<Matrix3<f64>>,
}

fn to_m3(m: &DMatrix<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

impl<'a> Stepper<'a> {
    fn new(domain: &'a Arc<SpectralDomain>, cfg: &'a SimConfig, data: &'a ProblemData) -> Self {
        let lam = domain.lambdas().to_vec();
        let h = data.time.dt;
        let (half, full) = if cfg.integrator == Integrator::IntegratingFactor {
            lam.iter()
                .map(|&l| {
                    let a = companion(&cfg.params, l);
                    (to_m3(&expm(&(&a * (0.5 * h)))), to_m3(&expm(&(&a * h))))
                })
                .unzip()
        } else {
            (Vec::new(), Vec::new())
        };
        Stepper {
            domain,
            cfg,
            data,
            lam,
            half,
            full,
        }
    }

    fn nonlinear(&self, m: &Modes, t: f64) -> Result<Vec<f64>> {
        let lin = linear_part(&self.cfg.params, &self.lam, m);
        let f = forcing_at(&self.data.f, self.domain, &self.data.time, t);
        nonlinear_part(self.domain, &self.cfg.params, self.cfg.guard, m, &lin, f.as_deref(), t)
    }

    fn derivative(&self, m: &Modes, t: f64) -> Result<Modes> {
        let lin = linear_part(&self.cfg.params, &self.lam, m);
        let nl = self.nonlinear(m, t)?;
        Ok(Modes {
            u: m.ut.clone(),
            ut: m.utt.clone(),
            utt: lin.iter().zip(&nl).map(|(a, b)| a + b).collect(),
        })
    }

    fn propagate(mats: &[Matrix3<f64>], m: &Modes) -> Modes {
        let n = m.u.len();
        let mut out = Modes {
            u: vec![0.0; n],
            ut: vec![0.0; n],
            utt: vec![0.0; n],
        };
        for i in 0..n {
            let v = mats[i] * Vector3::new(m.u[i], m.ut[i], m.utt[i]);
            out.u[i] = v[0];
            out.ut[i] = v[1];
            out.utt[i] = v[2];
        }
        out
    }

    /// Nonlinear increment as a mode state `(0, 0, n)`.
    fn kick(&self, m: &Modes, t: f64) -> Result<Modes> {
        let n = m.u.len();
        Ok(Modes {
            u: vec![0.0; n],
            ut: vec![0.0; n],
            utt: self.nonlinear(m, t)?,
        })
    }

    fn step(&self, y: &Modes, t: f64) -> Result<Modes> {
        let h = self.data.time.dt;
        match self.cfg.integrator {
            Integrator::Rk4 => {
                let k1 = self.derivative(y, t)?;
                let k2 = self.derivative(&y.offset(0.5 * h, &k1), t + 0.5 * h)?;
                let k3 = self.derivative(&y.offset(0.5 * h, &k2), t + 0.5 * h)?;
                let k4 = self.derivative(&y.offset(h, &k3), t + h)?;
                Ok(y
                    .offset(h / 6.0, &k1)
                    .offset(h / 3.0, &k2)
                    .offset(h / 3.0, &k3)
                    .offset(h / 6.0, &k4))
            }
            Integrator::IntegratingFactor => {
                let (eh, ef) = (&self.half, &self.full);
                let k1 = self.kick(y, t)?;
                let yh = Self::propagate(eh, y);
                let k2 = self.kick(&Self::propagate(eh, &y.offset(0.5 * h, &k1)), t + 0.5 * h)?;
                let k3 = self.kick(&yh.offset(0.5 * h, &k2), t + 0.5 * h)?;
                let k4 = self.kick(
                    &Self::propagate(ef, y).offset(h, &Self::propagate(eh, &k3)),
                    t + h,
                )?;
                let mid = Self::propagate(eh, &k2.offset(1.0, &k3));
                Ok(Self::propagate(ef, y)
                    .offset(h / 6.0, &Self::propagate(ef, &k1))
                    .offset(h / 3.0, &mid)
                    .offset(h / 6.0, &k4))
            }
        }
    }
}

fn initial_state(domain: &Arc<SpectralDomain>, data: &ProblemData) -> FieldState {
    FieldState {
        time: 0.0,
        u: domain.sample(|x| data.u0.eval(0.0, x)),
        ut: domain.sample(|x| data.u1.eval(0.0, x)),
        utt: domain.sample(|x| data.u2.eval(0.0, x)),
    }
}

fn gate(domain: &Arc<SpectralDomain>, cfg: &SimConfig, data: &ProblemData) -> Result<()> {
    cfg.validate()?;
    data.validate(domain)?;
    if !cfg.force {
        let report = compat::check_problem(domain, data, LinearOptions::default().compat_tolerance)?;
        if !report.passed {
            return Err(Error::Incompatible(report.failures()));
        }
    }
    Ok(())
}

/// Time integration of the quasilinear system; homogeneous boundary data only.
pub fn simulate(domain: &Arc<SpectralDomain>, cfg: &SimConfig, data: &ProblemData) -> Result<Trajectory> {
    gate(domain, cfg, data)?;
    if !data.has_homogeneous_bc() {
        return Err(Error::Unsupported(
            "nonlinear time stepping with inhomogeneous boundary data (use the Picard solver)".into(),
        ));
    }
    let time = data.time;
    let stepper = Stepper::new(domain, cfg, data);
    let stride = cfg.record_stride.max(1);
    let first = initial_state(domain, data);
    let mut y = Modes::from_state(&first);
    let mut states = vec![first];
    let mut guard = vec![guard_minimum(&states[0], &cfg.params)];
    let last = time.len() - 1;
    for n in 0..last {
        y = stepper.step(&y, time.t(n))?;
        if !y.is_finite() {
            return Err(Error::NonFinite(time.t(n + 1)));
        }
        if (n + 1) % stride == 0 || n + 1 == last {
            let s = y.to_state(domain, time.t(n + 1));
            guard.push(guard_minimum(&s, &cfg.params));
            states.push(s);
        }
    }
    Ok(Trajectory { states, guard })
}

/// Outcome of the fixed-point iteration.
#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// Sup-norm difference between successive iterates.
    pub increments: Vec<f64>,
}

/// Solution-basis coefficients of `N = k u_t² + s|∇u|²` at every state.
fn nonlinearity_series(traj: &Trajectory, params: &PdeParams) -> Result<Vec<Vec<f64>>> {
    traj.states
        .iter()
        .map(|st| {
            let domain = st.u.domain();
            let ut = st.ut.fine_values();
            let mut n: Vec<f64> = ut.iter().map(|v| params.k * v * v).collect();
            if params.s == 1 {
                for (o, g) in n.iter_mut().zip(gradient_dot(&st.u, &st.u)) {
                    *o += g;
                }
            }
            Ok(domain.from_fine(domain.solution_parity(), &n)?.into_coeffs())
        })
        .collect()
}

/// Second time derivative of each coefficient of a sampled series.
fn second_derivative(series: &[Vec<f64>], dt: f64) -> Result<Vec<Vec<f64>>> {
    let len = series[0].len();
    let mut out = vec![vec![0.0; len]; series.len()];
    for m in 0..len {
        let col: Vec<f64> = series.iter().map(|c| c[m]).collect();
        let d2 = fd::derivative_series(&col, dt, 2, PICARD_FD_ACCURACY)?;
        for (row, v) in out.iter_mut().zip(d2) {
            row[m] = v;
        }
    }
    Ok(out)
}

fn add_states(a: &Trajectory, b: &Trajectory) -> Result<Trajectory> {
    let states = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| {
            Ok(FieldState {
                time: x.time,
                u: x.u.axpy(1.0, &y.u)?,
                ut: x.ut.axpy(1.0, &y.ut)?,
                utt: x.utt.axpy(1.0, &y.utt)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        states,
        guard: Vec::new(),
    })
}

fn linear_solve(domain: &Arc<SpectralDomain>, params: &PdeParams, data: &ProblemData) -> Result<Trajectory> {
    let opts = LinearOptions {
        force: true,
        ..LinearOptions::with_stride(1)
    };
    if data.has_homogeneous_bc() {
        linear::solve_direct(domain, params, data, &opts)
    } else {
        linear::solve_bc_linear(domain, params, data, &opts)
    }
}

/// Fixed-point iteration `u⁽ᵐ⁺¹⁾ = u_lin + L⁻¹[N(u⁽ᵐ⁾)_tt]` on the full time grid, where
/// `u_lin` solves the linear problem with all data and `L⁻¹` the one with zero data.
pub fn picard_solve(
    domain: &Arc<SpectralDomain>,
    cfg: &SimConfig,
    data: &ProblemData,
) -> Result<PicardOutcome> {
    gate(domain, cfg, data)?;
    let params = cfg.params;
    let lin = linear_solve(domain, &params, data)?;
    let zero = ProblemData::zero(data.time);
    let mut current = lin.clone();
    let mut increments = Vec::new();
    let mut growth = 0;
    for it in 1..=cfg.picard.max_iterations {
        let ntt = second_derivative(&nonlinearity_series(&current, &params)?, data.time.dt)?;
        let forced = ProblemData {
            f: Forcing::Spectral(Arc::new(ntt)),
            ..zero.clone()
        };
        let next = match linear::solve_direct(domain, &params, &forced, &LinearOptions::with_stride(1))
            .and_then(|corr| add_states(&lin, &corr))
        {
            Ok(t) => t,
            Err(Error::NonFinite(_)) => {
                return Err(Error::Divergence {
                    iterations: it,
                    increment: f64::INFINITY,
                })
            }
            Err(e) => return Err(e),
        };
        let inc = next.sup_distance(&current);
        if !inc.is_finite() {
            return Err(Error::Divergence {
                iterations: it,
                increment: inc,
            });
        }
        if increments.last().is_some_and(|&prev| inc > prev) {
            growth += 1;
        } else {
            growth = 0;
        }
        increments.push(inc);
        current = next;
        if inc < cfg.picard.tolerance {
            let guard = current
                .states
                .iter()
                .map(|s| guard_minimum(s, &params))
                .collect();
            let stride = cfg.record_stride.max(1);
            let last = current.states.len() - 1;
            let keep = |i: usize| i % stride == 0 || i == last;
            let states = current
                .states
                .into_iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, s)| s)
                .collect();
            let guard = guard_filter(guard, stride);
            return Ok(PicardOutcome {
                trajectory: Trajectory { states, guard },
                iterations: it,
                increments,
            });
        }
        if growth >= GROWTH_LIMIT {
            return Err(Error::Divergence {
                iterations: it,
                increment: inc,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.picard.max_iterations,
        increment: increments.last().copied().unwrap_or(f64::NAN),
    })
}

fn guard_filter(guard: Vec<f64>, stride: usize) -> Vec<f64> {
    let last = guard.len() - 1;
    guard
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, g)| g)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::mode_matrix;
    use crate::field::{self, TrigField};
    use crate::spectral::BoundaryKind;
    use std::f64::consts::PI;

    fn dir(n: usize) -> Arc<SpectralDomain> {
        SpectralDomain::interval(PI, BoundaryKind::Dirichlet, n).unwrap()
    }

    #[test]
    fn rhs_of_zero_state_is_zero() {
        let d = dir(16);
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0, 1).unwrap();
        let r = rhs_expanded(&FieldState::zero(&d, 0.0), &p, 0.5).unwrap();
        assert_eq!(r.max_abs_coeff(), 0.0);
    }

    #[test]
    fn linear_rhs_matches_mode_blocks() {
        let d = dir(8);
        let p = PdeParams::linear(0.7, 1.3, 0.9).unwrap();
        let st = FieldState {
            time: 0.0,
            u: d.sample(|x| x[0] * (PI - x[0])),
            ut: d.sample(|x| (2.0 * x[0]).sin()),
            utt: d.sample(|x| (x[0]).sin() * x[0]),
        };
        let r = rhs_expanded(&st, &p, 0.5).unwrap();
        let v3 = st.third_component(&p);
        for (m, &l) in d.lambdas().iter().enumerate() {
            // v3' = −aλ v3 from the block, then u_ttt = v3' − bλ u_tt − c²λ u_t
            let blk = mode_matrix(l, &p).unwrap().matrix();
            let v = Vector3::new(st.u.coeffs()[m], st.ut.coeffs()[m], v3.coeffs()[m]);
            let dv = -(blk * v);
            let want = dv[2] - p.b * l * st.utt.coeffs()[m] - p.c * p.c * l * st.ut.coeffs()[m];
            assert!((r.coeffs()[m] - want).abs() < 1e-10 * (1.0 + want.abs()), "mode {m}");
        }
    }

    #[test]
    fn quadratic_term_example() {
        let d = dir(32);
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0, 0).unwrap();
        let mut st = FieldState::zero(&d, 0.0);
        st.utt = d.sample(|x| x[0].sin());
        let r = rhs_expanded(&st, &p, 0.5).unwrap();
        // sin² is projected onto the sine basis, which converges slowly near the ends
        for x in [PI / 4.0, PI / 2.0, 2.0] {
            let s = x.sin();
            let want = -2.0 * s - 2.0 * s * s;
            assert!((r.eval(&[x]) - want).abs() < 2e-3, "x = {x}");
        }
    }

    #[test]
    fn guard_violation_is_reported() {
        let d = dir(8);
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0, 0).unwrap();
        let mut st = FieldState::zero(&d, 0.25);
        st.ut = d.sample(|x| -0.4 * x[0].sin());
        match rhs_expanded(&st, &p, 0.5) {
            Err(Error::GuardViolation { time, value, location, .. }) => {
                assert_eq!(time, 0.25);
                assert!(value < 0.5);
                assert!((location[0] - PI / 2.0).abs() < 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    fn sine_data(time: TimeGrid, amp: f64) -> ProblemData {
        ProblemData::homogeneous(
            time,
            TrigField::term(amp, 0.0, vec![(1.0, 0.0)]).into_ref(),
            field::zero(),
            field::zero(),
        )
    }

    #[test]
    fn zero_data_stay_zero() {
        let d = dir(8);
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0, 1).unwrap();
        let time = TimeGrid::new(1e-2, 20).unwrap();
        let cfg = SimConfig::new(p);
        let t = simulate(&d, &cfg, &ProblemData::zero(time)).unwrap();
        assert!(t.states.iter().all(|s| s.u.max_abs_coeff() == 0.0));
        let pc = picard_solve(&d, &cfg, &ProblemData::zero(time)).unwrap();
        assert_eq!(pc.iterations, 1);
    }

    #[test]
    fn linear_case_reproduces_linear_solver() {
        let d = dir(16);
        let p = PdeParams::linear(1.0, 1.0, 1.0).unwrap();
        let time = TimeGrid::new(1e-2, 200).unwrap();
        let data = sine_data(time, 1.0);
        let lin = linear::solve_direct(&d, &p, &data, &LinearOptions::default()).unwrap();
        for integ in [Integrator::IntegratingFactor, Integrator::Rk4] {
            let cfg = SimConfig {
                integrator: integ,
                ..SimConfig::new(p)
            };
            let t = simulate(&d, &cfg, &data).unwrap();
            assert!(t.sup_distance(&lin) < 1e-6, "{integ:?}");
        }
        let pc = picard_solve(&d, &SimConfig::new(p), &data).unwrap();
        assert_eq!(pc.iterations, 1);
        assert!(pc.trajectory.sup_distance(&lin) < 1e-12);
    }

    #[test]
    fn picard_agrees_with_time_stepping() {
        let d = dir(16);
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0, 1).unwrap();
        let time = TimeGrid::new(1e-2, 200).unwrap();
        let data = sine_data(time, 1e-2);
        let cfg = SimConfig::new(p);
        let a = simulate(&d, &cfg, &data).unwrap();
        let b = picard_solve(&d, &cfg, &data).unwrap();
        assert!(b.iterations > 1);
        assert!(a.sup_distance(&b.trajectory) < 1e-6, "{}", a.sup_distance(&b.trajectory));
    }

    #[test]
    fn large_data_diverge() {
        let d = dir(16);
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0, 1).unwrap();
        let time = TimeGrid::new(1e-2, 200).unwrap();
        let data = sine_data(time, 10.0);
        match picard_solve(&d, &SimConfig::new(p), &data) {
            Err(Error::Divergence { .. }) => {}
            other => panic!("{:?}", other.map(|o| o.iterations)),
        }
    }
}
