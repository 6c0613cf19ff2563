//! Space-time fields used as problem data.
//!
//! A [`Field`] is evaluated pointwise. Fields may also report their Laplacian and partial
//! derivatives in closed form; when they do not, [`laplacian_of`] and [`partial_of`] fall
//! back to Chebyshev differentiation along coordinate lines of the domain.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

pub type FieldRef = Arc<dyn Field>;

pub trait Field: Send + Sync {
    fn eval(&self, t: f64, x: &[f64]) -> f64;

    /// Spatial Laplacian, when known exactly.
    fn laplacian(&self) -> Option<FieldRef> {
        None
    }

    /// Partial derivative along one spatial axis, when known exactly.
    fn partial_x(&self, _axis: usize) -> Option<FieldRef> {
        None
    }

    /// Time derivative, when known exactly.
    fn partial_t(&self) -> Option<FieldRef> {
        None
    }
}

impl fmt::Debug for dyn Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Field")
    }
}

struct Closure<F>(F);

impl<F: Fn(f64, &[f64]) -> f64 + Send + Sync> Field for Closure<F> {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        (self.0)(t, x)
    }
}

/// Field from a closure of `(t, x)`.
pub fn from_fn(f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> FieldRef {
    Arc::new(Closure(f))
}

/// Time-independent field from a closure of `x`.
pub fn spatial(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> FieldRef {
    Arc::new(Closure(move |_t: f64, x: &[f64]| f(x)))
}

struct Zero;

impl Field for Zero {
    fn eval(&self, _t: f64, _x: &[f64]) -> f64 {
        0.0
    }
    fn laplacian(&self) -> Option<FieldRef> {
        Some(zero())
    }
    fn partial_x(&self, _axis: usize) -> Option<FieldRef> {
        Some(zero())
    }
    fn partial_t(&self) -> Option<FieldRef> {
        Some(zero())
    }
}

pub fn zero() -> FieldRef {
    Arc::new(Zero)
}

/// One product term `amp · t^p · e^{-σt} · Π_a sin(k_a x_a + θ_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm {
    pub amp: f64,
    pub power: u32,
    pub sigma: f64,
    pub waves: Vec<(f64, f64)>,
}

impl TrigTerm {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        let mut v = self.amp * (-self.sigma * t).exp();
        if self.power > 0 {
            v *= t.powi(self.power as i32);
        }
        for (&(k, th), &xa) in self.waves.iter().zip(x) {
            v *= (k * xa + th).sin();
        }
        v
    }

    fn kappa_sq(&self) -> f64 {
        self.waves.iter().map(|(k, _)| k * k).sum()
    }
}

/// Finite sum of separable trigonometric-exponential terms; closed under Δ, ∂x and ∂t.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigField {
    pub terms: Vec<TrigTerm>,
}

impl TrigField {
    pub fn new(terms: Vec<TrigTerm>) -> TrigField {
        TrigField { terms }
    }

    /// `amp · e^{-σt} · Π sin(k_a x_a + θ_a)`
    pub fn term(amp: f64, sigma: f64, waves: Vec<(f64, f64)>) -> TrigField {
        TrigField::new(vec![TrigTerm {
            amp,
            power: 0,
            sigma,
            waves,
        }])
    }

    pub fn scaled(&self, s: f64) -> TrigField {
        TrigField::new(
            self.terms
                .iter()
                .map(|t| TrigTerm {
                    amp: t.amp * s,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn plus(&self, other: &TrigField) -> TrigField {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TrigField::new(terms)
    }

    pub fn lap(&self) -> TrigField {
        TrigField::new(
            self.terms
                .iter()
                .map(|t| TrigTerm {
                    amp: -t.amp * t.kappa_sq(),
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn dx(&self, axis: usize) -> TrigField {
        TrigField::new(
            self.terms
                .iter()
                .map(|t| {
                    let mut waves = t.waves.clone();
                    let (k, th) = waves[axis];
                    waves[axis] = (k, th + FRAC_PI_2);
                    TrigTerm {
                        amp: t.amp * k,
                        waves,
                        ..t.clone()
                    }
                })
                .collect(),
        )
    }

    pub fn dt(&self) -> TrigField {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.sigma != 0.0 {
                terms.push(TrigTerm {
                    amp: -t.sigma * t.amp,
                    ..t.clone()
                });
            }
            if t.power > 0 {
                terms.push(TrigTerm {
                    amp: t.amp * t.power as f64,
                    power: t.power - 1,
                    ..t.clone()
                });
            }
        }
        TrigField::new(terms)
    }

    /// Time-independent snapshot at `t`.
    pub fn at_time(&self, t: f64) -> TrigField {
        TrigField::new(
            self.terms
                .iter()
                .map(|term| TrigTerm {
                    amp: term.amp * (-term.sigma * t).exp() * t.powi(term.power as i32),
                    power: 0,
                    sigma: 0.0,
                    waves: term.waves.clone(),
                })
                .collect(),
        )
    }

    pub fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.terms.iter().map(|term| term.eval(t, x)).sum()
    }

    pub fn into_ref(self) -> FieldRef {
        Arc::new(self)
    }
}

impl Field for TrigField {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.value(t, x)
    }
    fn laplacian(&self) -> Option<FieldRef> {
        Some(Arc::new(self.lap()))
    }
    fn partial_x(&self, axis: usize) -> Option<FieldRef> {
        Some(Arc::new(self.dx(axis)))
    }
    fn partial_t(&self) -> Option<FieldRef> {
        Some(Arc::new(self.dt()))
    }
}

/// `Σ_i c_i f_i`
pub struct Combination {
    parts: Vec<(f64, FieldRef)>,
}

impl Combination {
    pub fn new(parts: Vec<(f64, FieldRef)>) -> FieldRef {
        Arc::new(Combination { parts })
    }

    fn map(&self, op: impl Fn(&FieldRef) -> Option<FieldRef>) -> Option<FieldRef> {
        let parts: Option<Vec<(f64, FieldRef)>> = self
            .parts
            .iter()
            .map(|(c, f)| op(f).map(|g| (*c, g)))
            .collect();
        parts.map(Combination::new)
    }
}

impl Field for Combination {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.parts.iter().map(|(c, f)| c * f.eval(t, x)).sum()
    }
    fn laplacian(&self) -> Option<FieldRef> {
        self.map(|f| f.laplacian())
    }
    fn partial_x(&self, axis: usize) -> Option<FieldRef> {
        self.map(|f| f.partial_x(axis))
    }
    fn partial_t(&self) -> Option<FieldRef> {
        self.map(|f| f.partial_t())
    }
}

/// Time-independent field `x ↦ Σ_i w_i f(t_i, x)`, e.g. a finite-difference time derivative.
pub struct Snapshots {
    field: FieldRef,
    weights: Vec<(f64, f64)>,
}

impl Snapshots {
    pub fn new(field: FieldRef, weights: Vec<(f64, f64)>) -> FieldRef {
        Arc::new(Snapshots { field, weights })
    }

    fn map(&self, op: impl Fn(&FieldRef) -> Option<FieldRef>) -> Option<FieldRef> {
        op(&self.field).map(|f| Snapshots::new(f, self.weights.clone()))
    }
}

impl Field for Snapshots {
    fn eval(&self, _t: f64, x: &[f64]) -> f64 {
        self.weights
            .iter()
            .map(|(ti, w)| w * self.field.eval(*ti, x))
            .sum()
    }
    fn laplacian(&self) -> Option<FieldRef> {
        self.map(|f| f.laplacian())
    }
    fn partial_x(&self, axis: usize) -> Option<FieldRef> {
        self.map(|f| f.partial_x(axis))
    }
    fn partial_t(&self) -> Option<FieldRef> {
        Some(zero())
    }
}

/// Chebyshev interpolant on `[a, b]` built from values at Chebyshev–Lobatto points, with
/// trailing coefficients below roundoff removed.
#[derive(Clone, Debug)]
pub struct ChebLine {
    coeffs: Vec<f64>,
    a: f64,
    b: f64,
}

impl ChebLine {
    pub fn fit(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, degree: usize) -> ChebLine {
        let n = degree;
        let vals: Vec<f64> = (0..=n)
            .map(|j| {
                let y = (std::f64::consts::PI * j as f64 / n as f64).cos();
                f(a + 0.5 * (y + 1.0) * (b - a))
            })
            .collect();
        let mut coeffs = vec![0.0; n + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (std::f64::consts::PI * (k * j) as f64 / n as f64).cos();
            }
            *c = 2.0 / n as f64 * s;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        let big = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let cut = coeffs
            .iter()
            .rposition(|c| c.abs() > 1e-14 * big)
            .map_or(1, |i| i + 1);
        coeffs.truncate(cut);
        ChebLine { coeffs, a, b }
    }

    pub fn derivative(&self) -> ChebLine {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebLine {
                coeffs: vec![0.0],
                a: self.a,
                b: self.b,
            };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let scale = 2.0 / (self.b - self.a);
        ChebLine {
            coeffs: d.iter().map(|v| v * scale).collect(),
            a: self.a,
            b: self.b,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * y * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        y * b1 - b2 + self.coeffs[0]
    }
}

/// Degree of the Chebyshev lines used for numerical spatial derivatives.
pub const CHEB_DEGREE: usize = 24;

struct NumericPartial {
    field: FieldRef,
    axis: usize,
    order: usize,
    lengths: Vec<f64>,
}

impl Field for NumericPartial {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        let mut p = x.to_vec();
        let line = ChebLine::fit(
            |s| {
                p[self.axis] = s;
                self.field.eval(t, &p)
            },
            0.0,
            self.lengths[self.axis],
            CHEB_DEGREE,
        );
        let mut d = line;
        for _ in 0..self.order {
            d = d.derivative();
        }
        d.eval(x[self.axis])
    }
}

/// ∂f/∂x_axis, exact when available.
pub fn partial_of(f: &FieldRef, axis: usize, lengths: &[f64]) -> FieldRef {
    f.partial_x(axis).unwrap_or_else(|| {
        Arc::new(NumericPartial {
            field: Arc::clone(f),
            axis,
            order: 1,
            lengths: lengths.to_vec(),
        })
    })
}

/// Δf, exact when available.
pub fn laplacian_of(f: &FieldRef, lengths: &[f64]) -> FieldRef {
    f.laplacian().unwrap_or_else(|| {
        let parts = (0..lengths.len())
            .map(|axis| {
                let p: FieldRef = Arc::new(NumericPartial {
                    field: Arc::clone(f),
                    axis,
                    order: 2,
                    lengths: lengths.to_vec(),
                });
                (1.0, p)
            })
            .collect();
        Combination::new(parts)
    })
}

/// Δ^j f
pub fn laplacian_power(f: &FieldRef, j: usize, lengths: &[f64]) -> FieldRef {
    let mut g = Arc::clone(f);
    for _ in 0..j {
        g = laplacian_of(&g, lengths);
    }
    g
}
