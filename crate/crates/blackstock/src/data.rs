//! Problem data, time grids and solution states.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::block::PdeParams;
use crate::error::{Error, Result};
use crate::field::{self, Combination, FieldRef, TrigField};
use crate::spectral::{BoundaryKind, Geometry, GridFunction, SpectralDomain};

/// Uniform grid `t_n = n Δt`, `n = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<TimeGrid> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
        }
        Ok(TimeGrid { dt, steps })
    }

    /// Grid reaching `horizon` with step `dt` (rounded to a whole number of steps).
    pub fn with_horizon(dt: f64, horizon: f64) -> Result<TimeGrid> {
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {horizon} must be nonnegative")));
        }
        TimeGrid::new(dt, (horizon / dt).round() as usize)
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.t(self.steps)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.t(n)).collect()
    }
}

/// Time-sampled boundary data.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum BoundaryData {
    #[default]
    Zero,
    /// Samples at the left (`x = 0`) and right (`x = L`) endpoints of an interval.
    Interval { left: Vec<f64>, right: Vec<f64> },
}

impl BoundaryData {
    pub fn interval_from_fn(
        time: &TimeGrid,
        left: impl Fn(f64) -> f64,
        right: impl Fn(f64) -> f64,
    ) -> BoundaryData {
        BoundaryData::Interval {
            left: time.times().into_iter().map(&left).collect(),
            right: time.times().into_iter().map(&right).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BoundaryData::Zero => true,
            BoundaryData::Interval { left, right } => {
                left.iter().chain(right).all(|v| *v == 0.0)
            }
        }
    }

    pub fn check(&self, domain: &SpectralDomain, time: &TimeGrid) -> Result<()> {
        if let BoundaryData::Interval { left, right } = self {
            if !matches!(domain.geometry(), Geometry::Interval { .. }) {
                return Err(Error::Unsupported(
                    "sampled boundary data on rectangles (only homogeneous data)".into(),
                ));
            }
            for s in [left, right] {
                if s.len() != time.len() {
                    return Err(Error::TimeGridMismatch {
                        expected: time.len(),
                        got: s.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `[left, right]` series; zeros for homogeneous data.
    pub fn sides(&self, len: usize) -> [Vec<f64>; 2] {
        match self {
            BoundaryData::Zero => [vec![0.0; len], vec![0.0; len]],
            BoundaryData::Interval { left, right } => [left.clone(), right.clone()],
        }
    }

    pub fn scaled(&self, s: f64) -> BoundaryData {
        match self {
            BoundaryData::Zero => BoundaryData::Zero,
            BoundaryData::Interval { left, right } => BoundaryData::Interval {
                left: left.iter().map(|v| v * s).collect(),
                right: right.iter().map(|v| v * s).collect(),
            },
        }
    }

    /// `self + other`, both sampled on grids of length `len`.
    pub fn plus(&self, other: &BoundaryData, len: usize) -> BoundaryData {
        if self.is_zero() && matches!(self, BoundaryData::Zero) {
            return other.clone();
        }
        if matches!(other, BoundaryData::Zero) {
            return self.clone();
        }
        let [a, b] = self.sides(len);
        let [c, d] = other.sides(len);
        BoundaryData::Interval {
            left: a.iter().zip(&c).map(|(x, y)| x + y).collect(),
            right: b.iter().zip(&d).map(|(x, y)| x + y).collect(),
        }
    }
}

/// Space-time forcing.
#[derive(Clone, Debug, Default)]
pub enum Forcing {
    #[default]
    Zero,
    Field(FieldRef),
    /// Solution-basis coefficients at every time sample.
    Spectral(Arc<Vec<Vec<f64>>>),
}

impl Forcing {
    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }

    /// Coefficients at time sample `n`.
    pub fn coeffs_at(&self, domain: &Arc<SpectralDomain>, time: &TimeGrid, n: usize) -> Vec<f64> {
        match self {
            Forcing::Zero => vec![0.0; domain.len()],
            Forcing::Field(f) => {
                let t = time.t(n);
                domain.sample(|x| f.eval(t, x)).into_coeffs()
            }
            Forcing::Spectral(s) => s[n].clone(),
        }
    }

    pub fn check(&self, domain: &SpectralDomain, time: &TimeGrid) -> Result<()> {
        if let Forcing::Spectral(s) = self {
            if s.len() != time.len() {
                return Err(Error::TimeGridMismatch {
                    expected: time.len(),
                    got: s.len(),
                });
            }
            if let Some(bad) = s.iter().find(|c| c.len() != domain.len()) {
                return Err(Error::DimensionMismatch {
                    expected: domain.len(),
                    got: bad.len(),
                });
            }
        }
        Ok(())
    }

    /// Pointwise view; spectral samples are read at the nearest time sample.
    pub fn as_field(&self, domain: &Arc<SpectralDomain>, time: &TimeGrid) -> FieldRef {
        match self {
            Forcing::Zero => field::zero(),
            Forcing::Field(f) => Arc::clone(f),
            Forcing::Spectral(s) => {
                let series: Vec<GridFunction> = s
                    .iter()
                    .map(|c| GridFunction::from_coeffs(domain, c.clone()).expect("checked shape"))
                    .collect();
                Arc::new(SpectralSeries {
                    series: Arc::new(series),
                    dt: time.dt,
                })
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Forcing {
        match self {
            Forcing::Zero => Forcing::Zero,
            Forcing::Field(f) => Forcing::Field(Combination::new(vec![(s, Arc::clone(f))])),
            Forcing::Spectral(v) => Forcing::Spectral(Arc::new(
                v.iter()
                    .map(|c| c.iter().map(|x| x * s).collect())
                    .collect(),
            )),
        }
    }
}

/// Time series of grid functions viewed as a field.
struct SpectralSeries {
    series: Arc<Vec<GridFunction>>,
    dt: f64,
}

impl SpectralSeries {
    fn index(&self, t: f64) -> usize {
        ((t / self.dt).round().max(0.0) as usize).min(self.series.len() - 1)
    }
}

impl field::Field for SpectralSeries {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.series[self.index(t)].eval(x)
    }
    fn laplacian(&self) -> Option<FieldRef> {
        Some(Arc::new(SpectralSeries {
            series: Arc::new(self.series.iter().map(|g| g.laplacian()).collect()),
            dt: self.dt,
        }))
    }
    fn partial_x(&self, axis: usize) -> Option<FieldRef> {
        Some(Arc::new(SpectralSeries {
            series: Arc::new(self.series.iter().map(|g| g.derivative(axis)).collect()),
            dt: self.dt,
        }))
    }
}

/// The data tuple `(f, g, h, u₀, u₁, u₂)` and the integrability exponent `p`.
///
/// `g` prescribes `u` (Dirichlet) or `∂νu` (Neumann) on the boundary; `h` prescribes `Δu`
/// or `∂νΔu`.
#[derive(Clone, Debug)]
pub struct ProblemData {
    pub time: TimeGrid,
    pub f: Forcing,
    pub g: BoundaryData,
    pub h: BoundaryData,
    pub u0: FieldRef,
    pub u1: FieldRef,
    pub u2: FieldRef,
    pub p_exponent: f64,
}

pub const DEFAULT_P: f64 = 2.0;

impl ProblemData {
    /// Initial data only; zero forcing and homogeneous boundary data.
    pub fn homogeneous(time: TimeGrid, u0: FieldRef, u1: FieldRef, u2: FieldRef) -> ProblemData {
        ProblemData {
            time,
            f: Forcing::Zero,
            g: BoundaryData::Zero,
            h: BoundaryData::Zero,
            u0,
            u1,
            u2,
            p_exponent: DEFAULT_P,
        }
    }

    pub fn zero(time: TimeGrid) -> ProblemData {
        Self::homogeneous(time, field::zero(), field::zero(), field::zero())
    }

    pub fn has_homogeneous_bc(&self) -> bool {
        self.g.is_zero() && self.h.is_zero()
    }

    pub fn validate(&self, domain: &SpectralDomain) -> Result<()> {
        check_exponent(self.p_exponent, domain.bc())?;
        self.g.check(domain, &self.time)?;
        self.h.check(domain, &self.time)?;
        self.f.check(domain, &self.time)
    }

    /// `α·self + β·other` on the same time grid.
    pub fn combine(&self, alpha: f64, other: &ProblemData, beta: f64) -> ProblemData {
        let lin = |a: &FieldRef, b: &FieldRef| {
            Combination::new(vec![(alpha, Arc::clone(a)), (beta, Arc::clone(b))])
        };
        let f = match (&self.f, &other.f) {
            (Forcing::Zero, Forcing::Zero) => Forcing::Zero,
            _ => {
                let d = |f: &Forcing| match f {
                    Forcing::Zero => field::zero(),
                    Forcing::Field(f) => Arc::clone(f),
                    Forcing::Spectral(_) => panic!("combine spectral forcing by coefficients"),
                };
                Forcing::Field(lin(&d(&self.f), &d(&other.f)))
            }
        };
        let n = self.time.len();
        ProblemData {
            time: self.time,
            f,
            g: self.g.scaled(alpha).plus(&other.g.scaled(beta), n),
            h: self.h.scaled(alpha).plus(&other.h.scaled(beta), n),
            u0: lin(&self.u0, &other.u0),
            u1: lin(&self.u1, &other.u1),
            u2: lin(&self.u2, &other.u2),
            p_exponent: self.p_exponent,
        }
    }

    /// Data extracted from a smooth space-time function `u*` on an interval or rectangle:
    /// `f := (aΔ − ∂t)(u*_tt − bΔu*_t − c²Δu*)`, traces for `g`, `h`, and `u_i := ∂tⁱu*(0)`.
    /// Rectangles require `u*` to satisfy the homogeneous boundary conditions.
    pub fn manufactured(
        u_star: &TrigField,
        params: &PdeParams,
        domain: &SpectralDomain,
        time: TimeGrid,
    ) -> ProblemData {
        let (a, b, c) = (params.a, params.b, params.c);
        let ut = u_star.dt();
        let z = ut.dt().plus(&ut.lap().scaled(-b)).plus(&u_star.lap().scaled(-c * c));
        let f = z.lap().scaled(a).plus(&z.dt().scaled(-1.0));
        let (g, h) = match domain.geometry() {
            Geometry::Interval { length } => {
                let lap = u_star.lap();
                match domain.bc() {
                    BoundaryKind::Dirichlet => (
                        BoundaryData::interval_from_fn(
                            &time,
                            |t| u_star.value(t, &[0.0]),
                            |t| u_star.value(t, &[length]),
                        ),
                        BoundaryData::interval_from_fn(
                            &time,
                            |t| lap.value(t, &[0.0]),
                            |t| lap.value(t, &[length]),
                        ),
                    ),
                    BoundaryKind::Neumann => {
                        let du = u_star.dx(0);
                        let dl = lap.dx(0);
                        (
                            BoundaryData::interval_from_fn(
                                &time,
                                |t| -du.value(t, &[0.0]),
                                |t| du.value(t, &[length]),
                            ),
                            BoundaryData::interval_from_fn(
                                &time,
                                |t| -dl.value(t, &[0.0]),
                                |t| dl.value(t, &[length]),
                            ),
                        )
                    }
                }
            }
            Geometry::Rectangle { .. } => (BoundaryData::Zero, BoundaryData::Zero),
        };
        ProblemData {
            time,
            f: Forcing::Field(f.into_ref()),
            g,
            h,
            u0: u_star.at_time(0.0).into_ref(),
            u1: ut.at_time(0.0).into_ref(),
            u2: ut.dt().at_time(0.0).into_ref(),
            p_exponent: DEFAULT_P,
        }
    }
}

/// Rejects `p ≤ 1` and the excluded values `3/2` (Dirichlet) and `3` (Neumann).
pub fn check_exponent(p: f64, bc: BoundaryKind) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    let excluded = match bc {
        BoundaryKind::Dirichlet => 1.5,
        BoundaryKind::Neumann => 3.0,
    };
    if p == excluded {
        return Err(Error::ExcludedExponent(p));
    }
    Ok(())
}

/// `(u, u_t, u_tt)` at one instant.
#[derive(Clone, Debug)]
pub struct FieldState {
    pub time: f64,
    pub u: GridFunction,
    pub ut: GridFunction,
    pub utt: GridFunction,
}

impl FieldState {
    pub fn zero(domain: &Arc<SpectralDomain>, time: f64) -> FieldState {
        let z = GridFunction::zeros(domain);
        FieldState {
            time,
            u: z.clone(),
            ut: z.clone(),
            utt: z,
        }
    }

    /// Third component `u_tt − bΔu_t − c²Δu` of the first-order state.
    pub fn third_component(&self, params: &PdeParams) -> GridFunction {
        let mut out = self.utt.clone();
        let lam = self.u.domain().lambdas();
        let b = params.b;
        let c2 = params.c * params.c;
        for (i, v) in out.coeffs_mut().iter_mut().enumerate() {
            *v += lam[i] * (b * self.ut.coeffs()[i] + c2 * self.u.coeffs()[i]);
        }
        out
    }

    /// Largest absolute collocation-value difference over the three fields.
    pub fn sup_distance(&self, other: &FieldState) -> f64 {
        [
            (&self.u, &other.u),
            (&self.ut, &other.ut),
            (&self.utt, &other.utt),
        ]
        .iter()
        .map(|(a, b)| sup_diff(a, b))
        .fold(0.0, f64::max)
    }
}

/// `max |a − b|` over the collocation grid.
pub fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.inverse_transform()
        .iter()
        .zip(b.inverse_transform())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Recorded states along a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<FieldState>,
    /// `min_x (1 + 2k u_t)` at every recorded state (nonlinear runs only).
    pub guard: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> &FieldState {
        self.states.last().expect("trajectories hold the initial state")
    }

    /// Largest `sup_distance` between matching states.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.sup_distance(b))
            .fold(0.0, f64::max)
    }

    /// Largest `sup |u − v|` between matching states.
    pub fn sup_distance_u(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| sup_diff(&a.u, &b.u))
            .fold(0.0, f64::max)
    }
}
