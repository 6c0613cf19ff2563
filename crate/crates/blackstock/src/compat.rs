//! Pointwise compatibility conditions between initial and boundary data, and the derived
//! sequences `u_j`, `g_j` of the shifted heat problem.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use serde::Serialize;

use crate::data::{check_exponent, BoundaryData, Forcing, ProblemData, TimeGrid};
use crate::error::{Error, Result};
use crate::fd;
use crate::field::{self, Combination, FieldRef, Snapshots};
use crate::spectral::{BoundaryKind, Geometry, SpectralDomain};

/// Accuracy order of one-sided time differences at `t = 0`.
pub const TIME_FD_ACCURACY: usize = 6;
/// Interior sample points per rectangle edge.
const EDGE_POINTS: usize = 15;

/// One datum of the tuple `(f, g, h, u₀, u₁, u₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Datum {
    F,
    G,
    H,
    U0,
    U1,
    U2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub id: String,
    pub description: String,
    /// Sup norm of the defect over the boundary sample points.
    pub residual: f64,
    pub threshold: f64,
    pub active: bool,
    pub passed: bool,
    pub references: Vec<Datum>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatReport {
    pub problem: String,
    pub p_exponent: f64,
    pub conditions: Vec<Condition>,
    /// True iff every active condition passes.
    pub passed: bool,
    pub notes: Vec<String>,
}

impl CompatReport {
    fn new(problem: &str, p: f64, conditions: Vec<Condition>, notes: Vec<String>) -> Self {
        let passed = conditions.iter().all(|c| !c.active || c.passed);
        CompatReport {
            problem: problem.to_string(),
            p_exponent: p,
            conditions,
            passed,
            notes,
        }
    }

    pub fn get(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn active_ids(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| c.active)
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Active conditions that fail.
    pub fn failed_ids(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| c.active && !c.passed)
            .map(|c| c.id.as_str())
            .collect()
    }

    pub fn max_active_residual(&self) -> f64 {
        self.conditions
            .iter()
            .filter(|c| c.active)
            .fold(0.0, |m, c| m.max(c.residual))
    }

    pub fn failures(&self) -> String {
        self.conditions
            .iter()
            .filter(|c| c.active && !c.passed)
            .map(|c| format!("{} (residual {:.3e})", c.description, c.residual))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn condition(
    id: &str,
    description: &str,
    residual: f64,
    tol: f64,
    active: bool,
    references: &[Datum],
) -> Condition {
    Condition {
        id: id.to_string(),
        description: description.to_string(),
        residual,
        threshold: tol,
        active,
        passed: residual <= tol,
        references: references.to_vec(),
    }
}

/// A boundary sample point with its outward normal `sign · e_axis`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub x: Vec<f64>,
    pub axis: usize,
    pub sign: f64,
    /// Interval endpoint index (0 left, 1 right).
    pub side: Option<usize>,
}

/// Both endpoints of an interval, or interior points of every rectangle edge.
pub fn boundary_points(domain: &SpectralDomain) -> Vec<BoundaryPoint> {
    match domain.geometry() {
        Geometry::Interval { length } => vec![
            BoundaryPoint {
                x: vec![0.0],
                axis: 0,
                sign: -1.0,
                side: Some(0),
            },
            BoundaryPoint {
                x: vec![length],
                axis: 0,
                sign: 1.0,
                side: Some(1),
            },
        ],
        Geometry::Rectangle { lx, ly } => {
            let len = [lx, ly];
            let mut pts = Vec::new();
            for axis in 0..2 {
                let other = 1 - axis;
                for (sign, at) in [(-1.0, 0.0), (1.0, len[axis])] {
                    for j in 1..=EDGE_POINTS {
                        let mut x = vec![0.0; 2];
                        x[axis] = at;
                        x[other] = len[other] * j as f64 / (EDGE_POINTS + 1) as f64;
                        pts.push(BoundaryPoint {
                            x,
                            axis,
                            sign,
                            side: None,
                        });
                    }
                }
            }
            pts
        }
    }
}

/// Boundary trace `γ_B` (value or outward normal derivative) of a field at time `t`.
pub fn trace_values(
    field: &FieldRef,
    domain: &SpectralDomain,
    points: &[BoundaryPoint],
    t: f64,
) -> Vec<f64> {
    match domain.bc() {
        BoundaryKind::Dirichlet => points.iter().map(|p| field.eval(t, &p.x)).collect(),
        BoundaryKind::Neumann => {
            let lengths = domain.lengths();
            let partials: Vec<FieldRef> = (0..domain.dims())
                .map(|a| field::partial_of(field, a, &lengths))
                .collect();
            points
                .iter()
                .map(|p| p.sign * partials[p.axis].eval(t, &p.x))
                .collect()
        }
    }
}

/// Time series of boundary data at each point, `[point][time]`.
fn boundary_series(b: &BoundaryData, points: &[BoundaryPoint], n_times: usize) -> Vec<Vec<f64>> {
    let sides = b.sides(n_times);
    points
        .iter()
        .map(|p| match p.side {
            Some(s) => sides[s].clone(),
            None => vec![0.0; n_times],
        })
        .collect()
}

/// `∂tʲ b(0)` at each boundary point.
fn boundary_derivative(
    b: &BoundaryData,
    points: &[BoundaryPoint],
    order: usize,
    time: &TimeGrid,
) -> Result<Vec<f64>> {
    if b.is_zero() {
        return Ok(vec![0.0; points.len()]);
    }
    boundary_series(b, points, time.len())
        .iter()
        .map(|s| fd::derivative_at_start(s, time.dt, order, TIME_FD_ACCURACY))
        .collect()
}

/// `∂tʲ f(0, ·)`, exact when the field knows its time derivatives and by a one-sided
/// difference on the time grid otherwise.
pub fn time_derivative_at_zero(f: &FieldRef, order: usize, time: &TimeGrid) -> Result<FieldRef> {
    let mut g = Arc::clone(f);
    let mut exact = true;
    for _ in 0..order {
        match g.partial_t() {
            Some(d) => g = d,
            None => {
                exact = false;
                break;
            }
        }
    }
    if exact {
        return Ok(Snapshots::new(g, vec![(0.0, 1.0)]));
    }
    let w = fd::forward_weights(order, TIME_FD_ACCURACY, time.dt);
    if w.len() > time.len() {
        return Err(Error::InsufficientSamples {
            needed: w.len(),
            have: time.len(),
        });
    }
    let weights = w
        .iter()
        .enumerate()
        .map(|(i, w)| (time.t(i), *w))
        .collect();
    Ok(Snapshots::new(Arc::clone(f), weights))
}

fn sup_defect(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Conditions of the full Dirichlet problem:
/// `u₀ = g(0)`, `u₁ = g_t(0)`, `Δu₀ = h(0)` on `Γ`, and for `p > 3/2` also `Δu₁ = h_t(0)`,
/// `u₂ = g_tt(0)`.
pub fn dirichlet_compat(
    domain: &Arc<SpectralDomain>,
    data: &ProblemData,
    tol: f64,
) -> Result<CompatReport> {
    if domain.bc() != BoundaryKind::Dirichlet {
        return Err(Error::InvalidBoundary {
            expected: "Dirichlet",
        });
    }
    full_problem_compat(domain, data, tol)
}

/// Normal-derivative analogue of [`dirichlet_compat`] with the switch at `p > 3`.
pub fn neumann_compat(
    domain: &Arc<SpectralDomain>,
    data: &ProblemData,
    tol: f64,
) -> Result<CompatReport> {
    if domain.bc() != BoundaryKind::Neumann {
        return Err(Error::InvalidBoundary {
            expected: "Neumann",
        });
    }
    full_problem_compat(domain, data, tol)
}

/// Dispatches on the boundary condition of the domain.
pub fn check_problem(
    domain: &Arc<SpectralDomain>,
    data: &ProblemData,
    tol: f64,
) -> Result<CompatReport> {
    match domain.bc() {
        BoundaryKind::Dirichlet => dirichlet_compat(domain, data, tol),
        BoundaryKind::Neumann => neumann_compat(domain, data, tol),
    }
}

fn full_problem_compat(
    domain: &Arc<SpectralDomain>,
    data: &ProblemData,
    tol: f64,
) -> Result<CompatReport> {
    let bc = domain.bc();
    check_exponent(data.p_exponent, bc)?;
    data.g.check(domain, &data.time)?;
    data.h.check(domain, &data.time)?;
    let pts = boundary_points(domain);
    let lengths = domain.lengths();
    let trace = |f: &FieldRef| trace_values(f, domain, &pts, 0.0);
    let lap = |f: &FieldRef| field::laplacian_of(f, &lengths);
    let g = |j| boundary_derivative(&data.g, &pts, j, &data.time);
    let h = |j| boundary_derivative(&data.h, &pts, j, &data.time);
    let (high, tag, gamma) = match bc {
        BoundaryKind::Dirichlet => (data.p_exponent > 1.5, "", "|Γ"),
        BoundaryKind::Neumann => (data.p_exponent > 3.0, "dn_", "∂ν"),
    };
    let desc = |lhs: &str, rhs: &str| match bc {
        BoundaryKind::Dirichlet => format!("{lhs}{gamma} = {rhs}(0)"),
        BoundaryKind::Neumann => format!("{gamma}{lhs} = {rhs}(0)"),
    };
    use Datum::*;
    let conditions = vec![
        condition(
            &format!("{tag}u0=g"),
            &desc("u₀", "g"),
            sup_defect(&trace(&data.u0), &g(0)?),
            tol,
            true,
            &[U0, G],
        ),
        condition(
            &format!("{tag}u1=g_t"),
            &desc("u₁", "g_t"),
            sup_defect(&trace(&data.u1), &g(1)?),
            tol,
            true,
            &[U1, G],
        ),
        condition(
            &format!("{tag}lap_u0=h"),
            &desc("Δu₀", "h"),
            sup_defect(&trace(&lap(&data.u0)), &h(0)?),
            tol,
            true,
            &[U0, H],
        ),
        condition(
            &format!("{tag}lap_u1=h_t"),
            &desc("Δu₁", "h_t"),
            sup_defect(&trace(&lap(&data.u1)), &h(1)?),
            tol,
            high,
            &[U1, H],
        ),
        condition(
            &format!("{tag}u2=g_tt"),
            &desc("u₂", "g_tt"),
            sup_defect(&trace(&data.u2), &g(2)?),
            tol,
            high,
            &[U2, G],
        ),
    ];
    let threshold = match bc {
        BoundaryKind::Dirichlet => "3/2",
        BoundaryKind::Neumann => "3",
    };
    let notes = vec![
        format!("last two conditions active iff p > {threshold}"),
        "trace-space and weighted-norm membership of the data is not checked".to_string(),
    ];
    Ok(CompatReport::new(
        bc.name(),
        data.p_exponent,
        conditions,
        notes,
    ))
}

/// `[u₁, …, u_count]` with `u_j = ∂t^{j−1} f(0) + (Δ − μ) u_{j−1}`.
pub fn derived_initial(
    domain: &SpectralDomain,
    f: &FieldRef,
    u0: &FieldRef,
    mu: f64,
    count: usize,
    time: &TimeGrid,
) -> Result<Vec<FieldRef>> {
    let lengths = domain.lengths();
    let mut out: Vec<FieldRef> = Vec::with_capacity(count);
    let mut prev = Snapshots::new(Arc::clone(u0), vec![(0.0, 1.0)]);
    for j in 1..=count {
        let ft = time_derivative_at_zero(f, j - 1, time)?;
        let next = Combination::new(vec![
            (1.0, ft),
            (1.0, field::laplacian_of(&prev, &lengths)),
            (-mu, Arc::clone(&prev)),
        ]);
        out.push(Arc::clone(&next));
        prev = next;
    }
    Ok(out)
}

/// `[g₁, …, g_count]` at each boundary point, `[j][point][time]`, with
/// `g_{j+1} = ∂t g_j + μ g_j − γ_B Δʲ f`.
pub fn derived_boundary(
    domain: &SpectralDomain,
    f: &FieldRef,
    g: &BoundaryData,
    mu: f64,
    count: usize,
    time: &TimeGrid,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let pts = boundary_points(domain);
    let lengths = domain.lengths();
    let mut current = boundary_series(g, &pts, time.len());
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let lap_j = field::laplacian_power(f, j, &lengths);
        let traces: Vec<Vec<f64>> = (0..time.len())
            .map(|n| trace_values(&lap_j, domain, &pts, time.t(n)))
            .collect();
        let mut next = Vec::with_capacity(pts.len());
        for (i, s) in current.iter().enumerate() {
            let ds = fd::derivative_series(s, time.dt, 1, TIME_FD_ACCURACY)?;
            next.push(
                (0..time.len())
                    .map(|n| ds[n] + mu * s[n] - traces[n][i])
                    .collect::<Vec<f64>>(),
            );
        }
        out.push(next.clone());
        current = next;
    }
    Ok(out)
}

/// Largest integer `j ≥ 0` with `j ≤ l + k − j_B/2 − 3/(2p)`, decided in exact arithmetic.
pub fn heat_condition_range(l: usize, k: usize, p: f64, bc: BoundaryKind) -> Result<Option<usize>> {
    let jb: i64 = match bc {
        BoundaryKind::Dirichlet => 0,
        BoundaryKind::Neumann => 1,
    };
    let pr = BigRational::from_f64(p)
        .ok_or_else(|| Error::InvalidParameter(format!("p = {p} is not finite")))?;
    if !(pr > BigRational::from_integer(BigInt::from(1))) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    let three = BigRational::from_integer(BigInt::from(3));
    // j_B/2 + 3/(2p) = 1  ⇔  p (2 − j_B) = 3
    if (&pr * BigRational::from_integer(BigInt::from(2 - jb)) - &three).is_zero() {
        return Err(Error::ExcludedExponent(p));
    }
    // j admissible ⇔ p (2(l + k − j) − j_B) ≥ 3
    let admissible = |j: usize| {
        let m = 2 * (l + k) as i64 - 2 * j as i64 - jb;
        &pr * BigRational::from_integer(BigInt::from(m)) >= three
    };
    Ok((0..=l + k).rev().find(|&j| admissible(j)))
}

/// Conditions `∂tʲ g(0) = γ_B u_j` of the shifted heat problem `(∂t + μ − Δ)u = f` for the
/// regularity indices `l ≥ 0`, `k ≥ 1`.
#[allow(clippy::too_many_arguments)]
pub fn heat_higher_compat(
    domain: &Arc<SpectralDomain>,
    f: &Forcing,
    g: &BoundaryData,
    u0: &FieldRef,
    mu: f64,
    l: usize,
    k: usize,
    p: f64,
    time: &TimeGrid,
    tol: f64,
) -> Result<CompatReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    g.check(domain, time)?;
    let bc = domain.bc();
    let j_max = heat_condition_range(l, k, p, bc)?;
    let pts = boundary_points(domain);
    let f_field = f.as_field(domain, time);
    let count = l + k - 1;
    let us = derived_initial(domain, &f_field, u0, mu, count, time)?;
    let u0_frozen = Snapshots::new(Arc::clone(u0), vec![(0.0, 1.0)]);
    let mut conditions = Vec::new();
    for j in 0..=count {
        let uj = if j == 0 { &u0_frozen } else { &us[j - 1] };
        let lhs = boundary_derivative(g, &pts, j, time)?;
        let rhs = trace_values(uj, domain, &pts, 0.0);
        let refs: &[Datum] = if j == 0 {
            &[Datum::G, Datum::U0]
        } else {
            &[Datum::G, Datum::U0, Datum::F]
        };
        conditions.push(condition(
            &format!("heat_j{j}"),
            &format!("∂t^{j} g(0) = γ u_{j}"),
            sup_defect(&lhs, &rhs),
            tol,
            j_max.is_some_and(|m| j <= m),
            refs,
        ));
    }
    let notes = vec![match j_max {
        Some(m) => format!("active for j = 0..={m}"),
        None => "no active conditions".to_string(),
    }];
    Ok(CompatReport::new(
        &format!("heat-{}", bc.name()),
        p,
        conditions,
        notes,
    ))
}

/// `∫_Ω u₀ = 0` and `∫_Ω f(t) + ∫_Γ g(t) = 0` at every time sample.
pub fn neumann_mean_compat(
    domain: &Arc<SpectralDomain>,
    f: &Forcing,
    g: &BoundaryData,
    u0: &FieldRef,
    time: &TimeGrid,
    tol: f64,
) -> Result<CompatReport> {
    if domain.bc() != BoundaryKind::Neumann {
        return Err(Error::InvalidBoundary {
            expected: "Neumann",
        });
    }
    g.check(domain, time)?;
    f.check(domain, time)?;
    let vol = domain.volume();
    let u0_int = domain.sample(|x| u0.eval(0.0, x)).mean() * vol;
    let [gl, gr] = g.sides(time.len());
    let mut flux = 0.0f64;
    for n in 0..time.len() {
        let f_int = match f {
            Forcing::Zero => 0.0,
            _ => {
                crate::spectral::GridFunction::from_coeffs(domain, f.coeffs_at(domain, time, n))?
                    .mean()
                    * vol
            }
        };
        flux = flux.max((f_int + gl[n] + gr[n]).abs());
    }
    let conditions = vec![
        condition("mean_u0", "∫_Ω u₀ = 0", u0_int.abs(), tol, true, &[Datum::U0]),
        condition(
            "mean_flux",
            "∫_Ω f + ∫_Γ g = 0 for all t",
            flux,
            tol,
            true,
            &[Datum::F, Datum::G],
        ),
    ];
    Ok(CompatReport::new("neumann-mean", f64::NAN, conditions, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sin_data(extra: f64) -> ProblemData {
        let time = TimeGrid::new(1e-2, 20).unwrap();
        ProblemData::homogeneous(
            time,
            if extra == 0.0 {
                crate::field::TrigField::term(1.0, 0.0, vec![(1.0, 0.0)]).into_ref()
            } else {
                field::spatial(move |x| x[0].sin() + extra * x[0])
            },
            field::zero(),
            field::zero(),
        )
    }

    #[test]
    fn sine_data_pass_and_linear_term_fails() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Dirichlet, 16).unwrap();
        let r = dirichlet_compat(&d, &sin_data(0.0), 1e-8).unwrap();
        assert!(r.passed);
        assert!(r.max_active_residual() < 1e-12);
        let r = dirichlet_compat(&d, &sin_data(0.1), 1e-8).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failed_ids(), vec!["u0=g"]);
        assert!((r.get("u0=g").unwrap().residual - 0.1 * PI).abs() < 1e-12);
        assert!(neumann_compat(&d, &sin_data(0.0), 1e-8).is_err());
    }

    #[test]
    fn neumann_slope_residual() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Neumann, 16).unwrap();
        let time = TimeGrid::new(1e-2, 20).unwrap();
        let mut data = ProblemData::zero(time);
        data.u0 = field::spatial(|x| x[0].cos());
        assert!(neumann_compat(&d, &data, 1e-8).unwrap().get("dn_u0=g").unwrap().passed);
        data.u0 = field::spatial(|x| 0.5 * x[0] * x[0]);
        let r = neumann_compat(&d, &data, 1e-8).unwrap();
        assert!((r.get("dn_u0=g").unwrap().residual - PI).abs() < 1e-9);
    }

    #[test]
    fn derived_sequences() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Dirichlet, 16).unwrap();
        let time = TimeGrid::new(1e-2, 40).unwrap();
        let sin = crate::field::TrigField::term(1.0, 0.0, vec![(1.0, 0.0)]).into_ref();
        let us = derived_initial(&d, &field::zero(), &sin, 0.0, 3, &time).unwrap();
        for (j, u) in us.iter().enumerate() {
            let s = if j % 2 == 0 { -1.0 } else { 1.0 };
            assert!((u.eval(0.0, &[1.0]) - s * 1f64.sin()).abs() < 1e-12);
        }
        let f = field::spatial(|x| x[0].sin());
        let us = derived_initial(&d, &f, &field::zero(), 0.0, 2, &time).unwrap();
        assert!((us[0].eval(0.0, &[0.7]) - 0.7f64.sin()).abs() < 1e-12);
        assert!((us[1].eval(0.0, &[0.7]) + 0.7f64.sin()).abs() < 1e-8);

        let g = BoundaryData::interval_from_fn(&time, |t| t * t, |t| t * t);
        let gs = derived_boundary(&d, &field::zero(), &g, 0.0, 2, &time).unwrap();
        for n in 0..time.len() {
            assert!((gs[0][0][n] - 2.0 * time.t(n)).abs() < 1e-10);
            assert!((gs[1][1][n] - 2.0).abs() < 1e-8);
        }
        let g = BoundaryData::interval_from_fn(&time, |t| (-t).exp(), |t| (-t).exp());
        let gs = derived_boundary(&d, &field::zero(), &g, 1.0, 1, &time).unwrap();
        assert!(gs[0][0].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn heat_ranges_follow_the_exponent() {
        assert_eq!(heat_condition_range(1, 2, 2.0, BoundaryKind::Dirichlet).unwrap(), Some(2));
        assert_eq!(heat_condition_range(1, 2, 1.4, BoundaryKind::Dirichlet).unwrap(), Some(1));
        assert_eq!(heat_condition_range(1, 2, 2.0, BoundaryKind::Neumann).unwrap(), Some(1));
        assert_eq!(heat_condition_range(1, 2, 4.0, BoundaryKind::Neumann).unwrap(), Some(2));
        assert!(matches!(
            heat_condition_range(0, 1, 1.5, BoundaryKind::Dirichlet),
            Err(Error::ExcludedExponent(_))
        ));
        assert!(matches!(
            heat_condition_range(0, 1, 3.0, BoundaryKind::Neumann),
            Err(Error::ExcludedExponent(_))
        ));
        // l + k − 3/(2p) with p = 3/2 + tiny stays exact at the boundary j = l + k − 1
        assert_eq!(heat_condition_range(0, 1, 1.5000000001, BoundaryKind::Dirichlet).unwrap(), Some(0));
        assert_eq!(heat_condition_range(0, 1, 1.4999999999, BoundaryKind::Dirichlet).unwrap(), None);
    }

    #[test]
    fn mean_conditions() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Neumann, 16).unwrap();
        let time = TimeGrid::new(0.1, 5).unwrap();
        let cos = field::spatial(|x| x[0].cos());
        let r = neumann_mean_compat(&d, &Forcing::Zero, &BoundaryData::Zero, &cos, &time, 1e-10).unwrap();
        assert!(r.passed);
        let one = field::spatial(|_| 1.0);
        let r = neumann_mean_compat(&d, &Forcing::Zero, &BoundaryData::Zero, &one, &time, 1e-10).unwrap();
        assert!((r.get("mean_u0").unwrap().residual - PI).abs() < 1e-12);
        let f = Forcing::Field(field::spatial(|_| 1.0));
        let g = BoundaryData::interval_from_fn(&time, |_| -PI / 2.0, |_| -PI / 2.0);
        let r = neumann_mean_compat(&d, &f, &g, &cos, &time, 1e-10).unwrap();
        assert!(r.passed, "{:?}", r);
    }
}
