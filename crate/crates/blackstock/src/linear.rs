//! Linear solvers for the heat, strongly damped wave and full third-order problems.
//!
//! Inhomogeneous interval boundary data are removed with a polynomial lifting. The
//! remaining homogeneous problems are integrated mode by mode with exact exponential
//! propagators and forcing interpolated linearly between time samples.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::block::PdeParams;
use crate::compat;
use crate::data::{BoundaryData, FieldState, Forcing, ProblemData, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::expm::EtdMatrices;
use crate::fd;
use crate::field::{self, FieldRef};
use crate::spectral::{BoundaryKind, Geometry, GridFunction, SpectralDomain};

/// Mode counts above which a step is split across threads.
const PARALLEL_MODES: usize = 1024;
const MEAN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LinearOptions {
    /// Record every `record_stride`-th step; the last step is always recorded.
    pub record_stride: usize,
    /// Accuracy order of the finite differences applied to boundary data.
    pub fd_accuracy: usize,
    /// Take the Neumann mean from its ODE instead of rejecting non-mean-zero data.
    pub mean_ode: bool,
    /// Skip the compatibility check of the composed solver.
    pub force: bool,
    /// Tolerance of that check.
    pub compat_tolerance: f64,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions {
            record_stride: 1,
            fd_accuracy: 6,
            mean_ode: false,
            force: false,
            compat_tolerance: 1e-6,
        }
    }
}

impl LinearOptions {
    pub fn with_stride(stride: usize) -> Self {
        LinearOptions {
            record_stride: stride.max(1),
            ..Default::default()
        }
    }
}

/// Polynomial lifting `ℓ = g_left φ_left + g_right φ_right` of interval boundary data.
///
/// Dirichlet shapes are linear. Neumann shapes are the zero-mean quadratics with outward
/// normal derivative one at their own endpoint and zero at the other.
#[derive(Clone, Debug)]
pub struct Lifting {
    bc: BoundaryKind,
    length: f64,
    shape: [Vec<f64>; 2],
    lap: [Vec<f64>; 2],
}

impl Lifting {
    pub fn new(domain: &Arc<SpectralDomain>) -> Result<Lifting> {
        let Geometry::Interval { length } = domain.geometry() else {
            return Err(Error::Unsupported(
                "inhomogeneous boundary data on rectangles".into(),
            ));
        };
        let mut lifting = Lifting {
            bc: domain.bc(),
            length,
            shape: Default::default(),
            lap: Default::default(),
        };
        for side in 0..2 {
            let shape = domain.sample(|x| lifting.shape_value(side, x[0])).into_coeffs();
            let d = lifting.lap_value();
            lifting.lap[side] = domain.sample(|_| d).into_coeffs();
            lifting.shape[side] = shape;
        }
        Ok(lifting)
    }

    pub fn shape_value(&self, side: usize, x: f64) -> f64 {
        let l = self.length;
        match (self.bc, side) {
            (BoundaryKind::Dirichlet, 0) => 1.0 - x / l,
            (BoundaryKind::Dirichlet, _) => x / l,
            (BoundaryKind::Neumann, 0) => -x + x * x / (2.0 * l) + l / 3.0,
            (BoundaryKind::Neumann, _) => x * x / (2.0 * l) - l / 6.0,
        }
    }

    /// `Δφ`, the same constant for both shapes.
    pub fn lap_value(&self) -> f64 {
        match self.bc {
            BoundaryKind::Dirichlet => 0.0,
            BoundaryKind::Neumann => 1.0 / self.length,
        }
    }

    pub fn value(&self, g: [f64; 2], x: f64) -> f64 {
        g[0] * self.shape_value(0, x) + g[1] * self.shape_value(1, x)
    }

    /// Mode `m` of `ℓ(g)`.
    fn shape_mode(&self, g: [f64; 2], m: usize) -> f64 {
        g[0] * self.shape[0][m] + g[1] * self.shape[1][m]
    }

    /// Mode `m` of `Δℓ(g)`.
    fn lap_mode(&self, g: [f64; 2], m: usize) -> f64 {
        g[0] * self.lap[0][m] + g[1] * self.lap[1][m]
    }
}

/// Endpoint samples of a boundary datum and their time derivatives.
struct Traces {
    d: [Vec<Vec<f64>>; 2],
    zero: bool,
}

impl Traces {
    fn new(b: &BoundaryData, time: &TimeGrid, max_order: usize, accuracy: usize) -> Result<Traces> {
        if b.is_zero() {
            return Ok(Traces {
                d: Default::default(),
                zero: true,
            });
        }
        let sides = b.sides(time.len());
        let mut d: [Vec<Vec<f64>>; 2] = Default::default();
        for (s, samples) in sides.iter().enumerate() {
            for order in 0..=max_order {
                d[s].push(fd::derivative_series(samples, time.dt, order, accuracy)?);
            }
        }
        Ok(Traces { d, zero: false })
    }

    fn at(&self, order: usize, n: usize) -> [f64; 2] {
        if self.zero {
            [0.0; 2]
        } else {
            [self.d[0][order][n], self.d[1][order][n]]
        }
    }
}

fn lin(a: f64, x: [f64; 2], b: f64, y: [f64; 2]) -> [f64; 2] {
    [a * x[0] + b * y[0], a * x[1] + b * y[1]]
}

/// Mode-wise exponential integrator for `x' = B_m x + r_m(t)` with `r_m` linear on each step.
struct ModeIntegrator {
    dim: usize,
    mats: Vec<EtdMatrices>,
}

impl ModeIntegrator {
    fn new(dim: usize, blocks: impl Iterator<Item = DMatrix<f64>>, h: f64) -> ModeIntegrator {
        let blocks: Vec<DMatrix<f64>> = blocks.collect();
        let mats = if blocks.len() >= PARALLEL_MODES {
            blocks.par_iter().map(|b| EtdMatrices::new(b, h)).collect()
        } else {
            blocks.iter().map(|b| EtdMatrices::new(b, h)).collect()
        };
        ModeIntegrator { dim, mats }
    }

    /// Runs over the grid. `forcing(n)` returns all `r_m(t_n)` concatenated, `record(n, x,
    /// r)` receives the state at recorded steps.
    fn run(
        &self,
        time: &TimeGrid,
        stride: usize,
        mut state: Vec<f64>,
        mut forcing: impl FnMut(usize) -> Result<Vec<f64>>,
        mut record: impl FnMut(usize, &[f64], &[f64]) -> Result<()>,
    ) -> Result<()> {
        let d = self.dim;
        let h = time.dt;
        let mut r_prev = forcing(0)?;
        record(0, &state, &r_prev)?;
        let mut next = vec![0.0; state.len()];
        for n in 0..time.steps {
            let r_next = forcing(n + 1)?;
            let slope: Vec<f64> = r_next
                .iter()
                .zip(&r_prev)
                .map(|(b, a)| (b - a) / h)
                .collect();
            let step = |(m, out): (usize, &mut [f64])| {
                let s = m * d..(m + 1) * d;
                self.mats[m].apply(&state[s.clone()], &r_prev[s.clone()], &slope[s], out);
            };
            if self.mats.len() >= PARALLEL_MODES {
                next.par_chunks_mut(d).enumerate().for_each(step);
            } else {
                next.chunks_mut(d).enumerate().for_each(step);
            }
            std::mem::swap(&mut state, &mut next);
            if (n + 1) % stride == 0 || n + 1 == time.steps {
                if state.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(time.t(n + 1)));
                }
                record(n + 1, &state, &r_next)?;
            }
            r_prev = r_next;
        }
        Ok(())
    }
}

/// Coefficients of `u(0) − ℓ(g(0))`.
fn lifted_initial(
    domain: &Arc<SpectralDomain>,
    field: &FieldRef,
    lifting: Option<&Lifting>,
    g0: [f64; 2],
) -> Vec<f64> {
    match lifting {
        Some(l) if g0 != [0.0; 2] => domain
            .sample(|x| field.eval(0.0, x) - l.value(g0, x[0]))
            .into_coeffs(),
        _ => domain.sample(|x| field.eval(0.0, x)).into_coeffs(),
    }
}

fn lifting_for(domain: &Arc<SpectralDomain>, bcs: &[&BoundaryData]) -> Result<Option<Lifting>> {
    if bcs.iter().all(|b| b.is_zero()) {
        Ok(None)
    } else {
        Lifting::new(domain).map(Some)
    }
}

fn grid(domain: &Arc<SpectralDomain>, coeffs: Vec<f64>) -> GridFunction {
    GridFunction::from_coeffs(domain, coeffs).expect("solver output has the domain's shape")
}

/// Rejects Neumann data whose mean is not conserved at zero.
fn check_zero_mean(u0_mean: f64, g: &BoundaryData, n_times: usize) -> Result<()> {
    if u0_mean.abs() > MEAN_TOLERANCE {
        return Err(Error::NonZeroMean(u0_mean));
    }
    let [l, r] = g.sides(n_times);
    if let Some(v) = l.iter().zip(&r).map(|(a, b)| a + b).find(|v| v.abs() > MEAN_TOLERANCE) {
        return Err(Error::NonZeroMean(v));
    }
    Ok(())
}

/// Time samples of `u` alone.
#[derive(Clone, Debug)]
pub struct HeatSolution {
    pub times: Vec<f64>,
    pub u: Vec<GridFunction>,
}

/// Solves `u_t − aΔu + μu = f` with boundary data `g` and `u(0) = u₀`.
#[allow(clippy::too_many_arguments)]
pub fn solve_heat(
    domain: &Arc<SpectralDomain>,
    a: f64,
    mu: f64,
    f: &Forcing,
    g: &BoundaryData,
    u0: &FieldRef,
    time: TimeGrid,
    opts: &LinearOptions,
) -> Result<HeatSolution> {
    if !(a > 0.0 && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("need a > 0 and μ ≥ 0, got a = {a}, μ = {mu}")));
    }
    g.check(domain, &time)?;
    f.check(domain, &time)?;
    let lifting = lifting_for(domain, &[g])?;
    let tr = Traces::new(g, &time, 1, opts.fd_accuracy)?;
    let neumann_mean = domain.bc() == BoundaryKind::Neumann && mu == 0.0;
    let lam = domain.lambdas().to_vec();
    let integ = ModeIntegrator::new(
        1,
        lam.iter().map(|l| DMatrix::from_element(1, 1, -(a * l + mu))),
        time.dt,
    );
    let u_init = lifted_initial(domain, u0, lifting.as_ref(), tr.at(0, 0));
    let mean_path = if neumann_mean {
        if opts.mean_ode {
            let md = MeanData::new(domain, &time, f, g, &BoundaryData::Zero)?;
            let u0_mean = domain.sample(|x| u0.eval(0.0, x)).mean();
            Some(neumann_mean_ode(&time, &md, &[u0_mean], &PdeParams { a, ..mean_params() }, 1, opts.fd_accuracy)?.w)
        } else {
            check_zero_mean(u_init[0], g, time.len())?;
            None
        }
    } else {
        None
    };
    let mut times = Vec::new();
    let mut us = Vec::new();
    integ.run(
        &time,
        opts.record_stride.max(1),
        u_init,
        |n| {
            let mut r = f.coeffs_at(domain, &time, n);
            if neumann_mean && !opts.mean_ode && r[0].abs() > MEAN_TOLERANCE {
                return Err(Error::NonZeroMean(r[0]));
            }
            if let Some(l) = &lifting {
                let (g0, g1) = (tr.at(0, n), tr.at(1, n));
                for (m, v) in r.iter_mut().enumerate() {
                    *v -= l.shape_mode(lin(1.0, g1, mu, g0), m) - a * l.lap_mode(g0, m);
                }
            }
            Ok(r)
        },
        |n, x, _| {
            let mut u = x.to_vec();
            if let Some(l) = &lifting {
                let g0 = tr.at(0, n);
                for (m, v) in u.iter_mut().enumerate() {
                    *v += l.shape_mode(g0, m);
                }
            }
            if let Some(w) = &mean_path {
                u[0] = w[n];
            }
            times.push(time.t(n));
            us.push(grid(domain, u));
            Ok(())
        },
    )?;
    Ok(HeatSolution { times, u: us })
}

/// Solves `u_tt − bΔu_t − c²Δu = f` with boundary data `g` and `(u, u_t)(0) = (u₀, u₁)`.
#[allow(clippy::too_many_arguments)]
pub fn solve_westervelt_linear(
    domain: &Arc<SpectralDomain>,
    b: f64,
    c: f64,
    f: &Forcing,
    g: &BoundaryData,
    u0: &FieldRef,
    u1: &FieldRef,
    time: TimeGrid,
    opts: &LinearOptions,
) -> Result<Trajectory> {
    if !(b > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter(format!("need b, c > 0, got b = {b}, c = {c}")));
    }
    g.check(domain, &time)?;
    f.check(domain, &time)?;
    let lifting = lifting_for(domain, &[g])?;
    let tr = Traces::new(g, &time, 2, opts.fd_accuracy)?;
    let lam = domain.lambdas().to_vec();
    let c2 = c * c;
    let integ = ModeIntegrator::new(
        2,
        lam.iter()
            .map(|l| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -c2 * l, -b * l])),
        time.dt,
    );
    let w0 = lifted_initial(domain, u0, lifting.as_ref(), tr.at(0, 0));
    let w1 = lifted_initial(domain, u1, lifting.as_ref(), tr.at(1, 0));
    let neumann_mean = domain.bc() == BoundaryKind::Neumann && !opts.mean_ode;
    if neumann_mean {
        check_zero_mean(w0[0], g, time.len())?;
        check_zero_mean(w1[0], &BoundaryData::Zero, time.len())?;
    }
    let state: Vec<f64> = w0.iter().zip(&w1).flat_map(|(a, b)| [*a, *b]).collect();
    let mut states = Vec::new();
    integ.run(
        &time,
        opts.record_stride.max(1),
        state,
        |n| {
            let fm = f.coeffs_at(domain, &time, n);
            if neumann_mean && fm[0].abs() > MEAN_TOLERANCE {
                return Err(Error::NonZeroMean(fm[0]));
            }
            let mut r = vec![0.0; 2 * fm.len()];
            for (m, v) in fm.iter().enumerate() {
                let mut fv = *v;
                if let Some(l) = &lifting {
                    let (g0, g1, g2) = (tr.at(0, n), tr.at(1, n), tr.at(2, n));
                    fv -= l.shape_mode(g2, m) - l.lap_mode(lin(b, g1, c2, g0), m);
                }
                r[2 * m + 1] = fv;
            }
            Ok(r)
        },
        |n, x, r| {
            let len = lam.len();
            let (mut u, mut ut, mut utt) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
            for m in 0..len {
                u[m] = x[2 * m];
                ut[m] = x[2 * m + 1];
                utt[m] = -c2 * lam[m] * x[2 * m] - b * lam[m] * x[2 * m + 1] + r[2 * m + 1];
                if let Some(l) = &lifting {
                    u[m] += l.shape_mode(tr.at(0, n), m);
                    ut[m] += l.shape_mode(tr.at(1, n), m);
                    utt[m] += l.shape_mode(tr.at(2, n), m);
                }
            }
            states.push(FieldState {
                time: time.t(n),
                u: grid(domain, u),
                ut: grid(domain, ut),
                utt: grid(domain, utt),
            });
            Ok(())
        },
    )?;
    Ok(Trajectory {
        states,
        guard: Vec::new(),
    })
}

/// Solves the linear third-order problem `(aΔ − ∂t)(u_tt − bΔu_t − c²Δu) = f` in two stages.
///
/// Stage one is the damped wave problem for `w = aΔu − u_t` with boundary value
/// `a h − g_t` and initial data `(aΔu₀ − u₁, aΔu₁ − u₂)`. Stage two is the heat problem
/// `u_t − aΔu = −w` with boundary data `g` and `u(0) = u₀`. Both run mode by mode in one
/// sweep: per mode `(û, ŵ, ŵ_t)` is a triangular system whose wave block drives the heat
/// component, and its exact propagator carries `ŵ` into the heat stage without quadrature.
pub fn solve_bc_linear(
    domain: &Arc<SpectralDomain>,
    params: &PdeParams,
    data: &ProblemData,
    opts: &LinearOptions,
) -> Result<Trajectory> {
    params.validate()?;
    data.validate(domain)?;
    if !opts.force {
        let report = compat::check_problem(domain, data, opts.compat_tolerance)?;
        if !report.passed {
            return Err(Error::Incompatible(report.failures()));
        }
    }
    let time = data.time;
    let (a, b, c2) = (params.a, params.b, params.c * params.c);
    let lifting = lifting_for(domain, &[&data.g, &data.h])?;
    let acc = opts.fd_accuracy;
    let tg = Traces::new(&data.g, &time, 3, acc)?;
    let th = Traces::new(&data.h, &time, 2, acc)?;
    // q = a h − g_t and its derivatives
    let q = |order: usize, n: usize| lin(a, th.at(order, n), -1.0, tg.at(order + 1, n));
    let lam = domain.lambdas().to_vec();
    let len = lam.len();
    let integ = ModeIntegrator::new(
        3,
        lam.iter().map(|l| {
            DMatrix::from_row_slice(
                3,
                3,
                &[-a * l, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -c2 * l, -b * l],
            )
        }),
        time.dt,
    );

    let u_hat = lifted_initial(domain, &data.u0, lifting.as_ref(), tg.at(0, 0));
    let (w0, w1) = match &lifting {
        None => {
            let u0 = domain.sample(|x| data.u0.eval(0.0, x));
            let u1 = domain.sample(|x| data.u1.eval(0.0, x));
            let u2 = domain.sample(|x| data.u2.eval(0.0, x));
            let w0: Vec<f64> = (0..len)
                .map(|m| -a * lam[m] * u0.coeffs()[m] - u1.coeffs()[m])
                .collect();
            let w1: Vec<f64> = (0..len)
                .map(|m| -a * lam[m] * u1.coeffs()[m] - u2.coeffs()[m])
                .collect();
            (w0, w1)
        }
        Some(_) => {
            let lengths = domain.lengths();
            let w0 = field::Combination::new(vec![
                (a, field::laplacian_of(&data.u0, &lengths)),
                (-1.0, Arc::clone(&data.u1)),
            ]);
            let w1 = field::Combination::new(vec![
                (a, field::laplacian_of(&data.u1, &lengths)),
                (-1.0, Arc::clone(&data.u2)),
            ]);
            (
                lifted_initial(domain, &w0, lifting.as_ref(), q(0, 0)),
                lifted_initial(domain, &w1, lifting.as_ref(), q(1, 0)),
            )
        }
    };
    let state: Vec<f64> = (0..len).flat_map(|m| [u_hat[m], w0[m], w1[m]]).collect();

    let mut states = Vec::new();
    integ.run(
        &time,
        opts.record_stride.max(1),
        state,
        |n| {
            let fm = data.f.coeffs_at(domain, &time, n);
            let mut r = vec![0.0; 3 * len];
            for m in 0..len {
                let mut fv = fm[m];
                if let Some(l) = &lifting {
                    let (h0, g0) = (th.at(0, n), tg.at(0, n));
                    r[3 * m] = -a * (l.shape_mode(h0, m) - l.lap_mode(g0, m));
                    fv -= l.shape_mode(q(2, n), m) - l.lap_mode(lin(b, q(1, n), c2, q(0, n)), m);
                }
                r[3 * m + 2] = fv;
            }
            Ok(r)
        },
        |n, x, r| {
            let (mut u, mut ut, mut utt) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
            for m in 0..len {
                let (uh, wh, wth) = (x[3 * m], x[3 * m + 1], x[3 * m + 2]);
                let uh_t = -a * lam[m] * uh - wh + r[3 * m];
                u[m] = uh;
                ut[m] = uh_t;
                utt[m] = -a * lam[m] * uh_t - wth;
                if let Some(l) = &lifting {
                    let lift_t = a * (l.shape_mode(th.at(1, n), m) - l.lap_mode(tg.at(1, n), m));
                    u[m] += l.shape_mode(tg.at(0, n), m);
                    ut[m] += l.shape_mode(tg.at(1, n), m);
                    utt[m] += l.shape_mode(tg.at(2, n), m) - lift_t;
                }
            }
            states.push(FieldState {
                time: time.t(n),
                u: grid(domain, u),
                ut: grid(domain, ut),
                utt: grid(domain, utt),
            });
            Ok(())
        },
    )?;
    Ok(Trajectory {
        states,
        guard: Vec::new(),
    })
}

/// Direct mode-wise propagation of `v = (u, u_t, u_tt − bΔu_t − c²Δu)` under `v' = −M v +
/// (0, 0, −f)`; homogeneous boundary data only.
pub fn solve_direct(
    domain: &Arc<SpectralDomain>,
    params: &PdeParams,
    data: &ProblemData,
    opts: &LinearOptions,
) -> Result<Trajectory> {
    params.validate()?;
    data.validate(domain)?;
    if !data.has_homogeneous_bc() {
        return Err(Error::Unsupported(
            "direct propagation with inhomogeneous boundary data".into(),
        ));
    }
    let time = data.time;
    let (a, b, c2) = (params.a, params.b, params.c * params.c);
    let lam = domain.lambdas().to_vec();
    let len = lam.len();
    let integ = ModeIntegrator::new(
        3,
        lam.iter().map(|l| {
            DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -c2 * l, -b * l, 1.0, 0.0, 0.0, -a * l])
        }),
        time.dt,
    );
    let u0 = domain.sample(|x| data.u0.eval(0.0, x)).into_coeffs();
    let u1 = domain.sample(|x| data.u1.eval(0.0, x)).into_coeffs();
    let u2 = domain.sample(|x| data.u2.eval(0.0, x)).into_coeffs();
    let state: Vec<f64> = (0..len)
        .flat_map(|m| [u0[m], u1[m], u2[m] + b * lam[m] * u1[m] + c2 * lam[m] * u0[m]])
        .collect();
    let mut states = Vec::new();
    integ.run(
        &time,
        opts.record_stride.max(1),
        state,
        |n| {
            let fm = data.f.coeffs_at(domain, &time, n);
            let mut r = vec![0.0; 3 * len];
            for m in 0..len {
                r[3 * m + 2] = -fm[m];
            }
            Ok(r)
        },
        |n, x, _| {
            let (mut u, mut ut, mut utt) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
            for m in 0..len {
                u[m] = x[3 * m];
                ut[m] = x[3 * m + 1];
                utt[m] = x[3 * m + 2] - b * lam[m] * ut[m] - c2 * lam[m] * u[m];
            }
            states.push(FieldState {
                time: time.t(n),
                u: grid(domain, u),
                ut: grid(domain, ut),
                utt: grid(domain, utt),
            });
            Ok(())
        },
    )?;
    Ok(Trajectory {
        states,
        guard: Vec::new(),
    })
}

/// Spatially averaged data entering the Neumann mean ODEs.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanData {
    /// `f̄` at every time sample.
    pub f_bar: Vec<f64>,
    /// Boundary averages `ḡ`, `h̄`.
    pub g_bar: Vec<f64>,
    pub h_bar: Vec<f64>,
    /// `|Γ| / |Ω|`.
    pub ratio: f64,
}

impl MeanData {
    pub fn new(
        domain: &Arc<SpectralDomain>,
        time: &TimeGrid,
        f: &Forcing,
        g: &BoundaryData,
        h: &BoundaryData,
    ) -> Result<MeanData> {
        f.check(domain, time)?;
        let f_bar = match f {
            Forcing::Zero => vec![0.0; time.len()],
            Forcing::Field(field) => (0..time.len())
                .map(|n| {
                    let t = time.t(n);
                    domain.sample(|x| field.eval(t, x)).mean()
                })
                .collect(),
            Forcing::Spectral(s) => s
                .iter()
                .map(|c| grid(domain, c.clone()).mean())
                .collect(),
        };
        let avg = |b: &BoundaryData| {
            let [l, r] = b.sides(time.len());
            l.iter().zip(&r).map(|(x, y)| 0.5 * (x + y)).collect()
        };
        Ok(MeanData {
            f_bar,
            g_bar: avg(g),
            h_bar: avg(h),
            ratio: domain.boundary_measure() / domain.volume(),
        })
    }

    pub fn from_problem(domain: &Arc<SpectralDomain>, data: &ProblemData) -> Result<MeanData> {
        MeanData::new(domain, &data.time, &data.f, &data.g, &data.h)
    }
}

/// The spatially constant part `w(t)` of a Neumann solution.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanTrajectory {
    pub times: Vec<f64>,
    pub w: Vec<f64>,
    pub w_t: Vec<f64>,
    pub w_tt: Vec<f64>,
}

fn mean_params() -> PdeParams {
    PdeParams {
        a: 1.0,
        b: 1.0,
        c: 1.0,
        k: 0.0,
        s: 0,
        b_over_a: None,
    }
}

/// Integrates the mean ODE of the given order with RK4:
///
/// * order 1 (heat): `w_t = f̄ + a r ḡ`
/// * order 2 (`u_tt − bΔu_t = f`): `w_tt = f̄ + b r ḡ_t`
/// * order 3 (full problem): `w_ttt = −f̄ + r((a+b)ḡ_tt + c²ḡ_t − ab h̄_t − ac² h̄)`
///
/// with `r = |Γ|/|Ω|` and initial values `initial = [ū₀, ū₁, ū₂]` (the first `order` used).
pub fn neumann_mean_ode(
    time: &TimeGrid,
    data: &MeanData,
    initial: &[f64],
    params: &PdeParams,
    order: usize,
    fd_accuracy: usize,
) -> Result<MeanTrajectory> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!("mean ODE order {order} not in 1..=3")));
    }
    if initial.len() < order {
        return Err(Error::DimensionMismatch {
            expected: order,
            got: initial.len(),
        });
    }
    for s in [&data.f_bar, &data.g_bar, &data.h_bar] {
        if s.len() != time.len() {
            return Err(Error::TimeGridMismatch {
                expected: time.len(),
                got: s.len(),
            });
        }
    }
    let (a, b, c2, r) = (params.a, params.b, params.c * params.c, data.ratio);
    let dt = time.dt;
    let is_zero = |s: &[f64]| s.iter().all(|v| *v == 0.0);
    let deriv = |s: &[f64], k: usize| -> Result<Vec<f64>> {
        if is_zero(s) {
            Ok(vec![0.0; s.len()])
        } else {
            fd::derivative_series(s, dt, k, fd_accuracy)
        }
    };
    let source: Vec<f64> = match order {
        1 => (0..time.len())
            .map(|n| data.f_bar[n] + a * r * data.g_bar[n])
            .collect(),
        2 => {
            let gt = deriv(&data.g_bar, 1)?;
            (0..time.len()).map(|n| data.f_bar[n] + b * r * gt[n]).collect()
        }
        _ => {
            let gt = deriv(&data.g_bar, 1)?;
            let gtt = deriv(&data.g_bar, 2)?;
            let ht = deriv(&data.h_bar, 1)?;
            (0..time.len())
                .map(|n| {
                    -data.f_bar[n]
                        + r * ((a + b) * gtt[n] + c2 * gt[n]
                            - a * b * ht[n]
                            - a * c2 * data.h_bar[n])
                })
                .collect()
        }
    };
    let src = |t: f64| fd::interpolate(&source, dt, t);
    // y' = (y_1, …, y_{order-1}, S(t))
    let rhs = |t: f64, y: &[f64]| -> Vec<f64> {
        let mut d: Vec<f64> = y[1..].to_vec();
        d.push(src(t));
        d
    };
    let mut y = initial[..order].to_vec();
    let mut traj = MeanTrajectory {
        times: Vec::with_capacity(time.len()),
        w: Vec::with_capacity(time.len()),
        w_t: Vec::with_capacity(time.len()),
        w_tt: Vec::with_capacity(time.len()),
    };
    let push = |n: usize, y: &[f64], traj: &mut MeanTrajectory| {
        let full: Vec<f64> = y.iter().copied().chain(std::iter::once(source[n])).collect();
        traj.times.push(time.t(n));
        traj.w.push(full[0]);
        traj.w_t.push(full[1]);
        traj.w_tt.push(if order >= 2 { full[2] } else { f64::NAN });
    };
    push(0, &y, &mut traj);
    for n in 0..time.steps {
        let t = time.t(n);
        let k1 = rhs(t, &y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(y, k)| y + 0.5 * dt * k).collect();
        let k2 = rhs(t + 0.5 * dt, &y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(y, k)| y + 0.5 * dt * k).collect();
        let k3 = rhs(t + 0.5 * dt, &y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(y, k)| y + dt * k).collect();
        let k4 = rhs(t + dt, &y4);
        for i in 0..order {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        push(n + 1, &y, &mut traj);
    }
    Ok(traj)
}
