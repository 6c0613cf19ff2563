//! Per-mode 3×3 blocks of the linear operator, their spectra, the decay constant ω₀ and
//! the per-mode propagators `exp(-tM)`.
//!
//! For a Laplacian eigenvalue λ the state `(u, u_t, u_tt + bλu_t + c²λu)` evolves by
//! `v' = -M v` with `M = [[0, -1, 0], [c²λ, bλ, -1], [0, 0, aλ]]`.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::spectral::{BoundaryKind, SpectralDomain};

/// Physical constants of the equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeParams {
    /// heat conductivity
    pub a: f64,
    /// diffusivity of sound
    pub b: f64,
    /// speed of sound
    pub c: f64,
    /// coefficient of u_t²
    #[serde(default)]
    pub k: f64,
    /// 1 keeps the |∇u|² term (Kuznetsov), 0 drops it (Westervelt)
    #[serde(default)]
    pub s: u8,
    /// nonlinearity parameter B/A; when present, `k` follows from it
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_over_a: Option<f64>,
}

impl PdeParams {
    pub fn new(a: f64, b: f64, c: f64, k: f64, s: u8) -> Result<PdeParams> {
        let p = PdeParams {
            a,
            b,
            c,
            k,
            s,
            b_over_a: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Linear problem with the given diffusivities.
    pub fn linear(a: f64, b: f64, c: f64) -> Result<PdeParams> {
        Self::new(a, b, c, 0.0, 0)
    }

    /// Derives `k` from B/A: `(B/2A)/c²` when `s = 1`, `(1 + B/2A)/c²` when `s = 0`.
    pub fn from_nonlinearity(a: f64, b: f64, c: f64, s: u8, b_over_a: f64) -> Result<PdeParams> {
        let p = PdeParams {
            a,
            b,
            c,
            k: Self::k_from_ratio(c, s, b_over_a),
            s,
            b_over_a: Some(b_over_a),
        };
        p.validate()?;
        Ok(p)
    }

    fn k_from_ratio(c: f64, s: u8, ratio: f64) -> f64 {
        let half = 0.5 * ratio;
        if s == 1 {
            half / (c * c)
        } else {
            (1.0 + half) / (c * c)
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::InvalidParameter(format!("k = {} must be nonnegative", self.k)));
        }
        if self.s > 1 {
            return Err(Error::InvalidParameter(format!("s = {} must be 0 or 1", self.s)));
        }
        if let Some(r) = self.b_over_a {
            let want = Self::k_from_ratio(self.c, self.s, r);
            if (want - self.k).abs() > 1e-12 * want.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "k = {} does not match B/A = {r} (expected {want})",
                    self.k
                )));
            }
        }
        Ok(())
    }

    /// Fills in `k` from B/A when it is set.
    pub fn resolved(mut self) -> PdeParams {
        if let Some(r) = self.b_over_a {
            self.k = Self::k_from_ratio(self.c, self.s, r);
        }
        self
    }

    pub fn is_linear(&self) -> bool {
        self.k == 0.0 && self.s == 0
    }
}

/// The operator restricted to one Laplacian eigenspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeBlock {
    pub lambda: f64,
    pub params: PdeParams,
}

pub fn mode_matrix(lambda: f64, params: &PdeParams) -> Result<ModeBlock> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(Error::NegativeEigenvalue(lambda));
    }
    Ok(ModeBlock {
        lambda,
        params: *params,
    })
}

impl ModeBlock {
    pub fn matrix(&self) -> Matrix3<f64> {
        let PdeParams { a, b, c, .. } = self.params;
        let l = self.lambda;
        Matrix3::new(0.0, -1.0, 0.0, c * c * l, b * l, -1.0, 0.0, 0.0, a * l)
    }

    /// `[aλ, μ₊, μ₋]` with μ± the roots of `μ² − bλμ + c²λ`.
    pub fn eigenvalues(&self) -> [Complex64; 3] {
        let (plus, minus) = damped_roots(self.lambda, &self.params);
        [Complex64::new(self.params.a * self.lambda, 0.0), plus, minus]
    }

    /// `exp(-tM)`
    pub fn propagator(&self, t: f64) -> Matrix3<f64> {
        if t == 0.0 {
            return Matrix3::identity();
        }
        if let Some(p) = self.eigen_propagator(t) {
            return p;
        }
        let m = DMatrix::from_iterator(3, 3, self.matrix().iter().map(|v| -v * t));
        let e = expm(&m);
        Matrix3::from_iterator(e.iter().copied())
    }

    fn eigenvectors(&self) -> Option<(Matrix3<Complex64>, [Complex64; 3])> {
        let mu = self.eigenvalues();
        let l = self.lambda;
        let PdeParams { b, c, .. } = self.params;
        let qa = mu[0] * mu[0] - mu[0] * (b * l) + c * c * l;
        if qa.norm() == 0.0 || (mu[1] - mu[2]).norm() == 0.0 {
            return None;
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let v = Matrix3::new(
            one / qa,
            one,
            one,
            -mu[0] / qa,
            -mu[1],
            -mu[2],
            one,
            zero,
            zero,
        );
        Some((v, mu))
    }

    /// Eigenvectors, their inverse and the 1-norm condition number.
    fn eigenbasis(&self) -> Option<(Matrix3<Complex64>, Matrix3<Complex64>, [Complex64; 3], f64)> {
        let (v, mu) = self.eigenvectors()?;
        let inv = v.try_inverse()?;
        let n1 = |m: &Matrix3<Complex64>| {
            m.column_iter()
                .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let cond = n1(&v) * n1(&inv);
        Some((v, inv, mu, cond))
    }

    /// Condition number of the eigenvector matrix, infinite when defective.
    pub fn eigenvector_condition(&self) -> f64 {
        self.eigenbasis().map_or(f64::INFINITY, |e| e.3)
    }

    fn eigen_propagator(&self, t: f64) -> Option<Matrix3<f64>> {
        let (v, inv, mu, cond) = self.eigenbasis()?;
        if !(cond < EIGEN_COND_LIMIT) {
            return None;
        }
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            (-mu[0] * t).exp(),
            (-mu[1] * t).exp(),
            (-mu[2] * t).exp(),
        ));
        let p = v * d * inv;
        Some(p.map(|z| z.re))
    }
}

/// Eigenvector conditioning above which the Padé route is used.
pub const EIGEN_COND_LIMIT: f64 = 1e8;

/// Roots `(μ₊, μ₋)` of `μ² − bλμ + c²λ`, the small real root computed without cancellation.
pub fn damped_roots(lambda: f64, p: &PdeParams) -> (Complex64, Complex64) {
    let bl = p.b * lambda;
    let cl = p.c * p.c * lambda;
    let disc = bl * bl - 4.0 * cl;
    if disc >= 0.0 {
        let plus = 0.5 * (bl + disc.sqrt());
        let minus = if plus > 0.0 { cl / plus } else { 0.0 };
        (Complex64::new(plus, 0.0), Complex64::new(minus, 0.0))
    } else {
        let im = 0.5 * (-disc).sqrt();
        (Complex64::new(0.5 * bl, im), Complex64::new(0.5 * bl, -im))
    }
}

/// Slowest decay rate of one mode: `min{aλ, Re μ₋}`.
pub fn mode_rate(lambda: f64, p: &PdeParams) -> f64 {
    let (_, minus) = damped_roots(lambda, p);
    (p.a * lambda).min(minus.re)
}

/// Which term realizes ω₀.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attainment {
    /// `aλ*` at the lowest admissible eigenvalue
    Heat { lambda: f64 },
    /// `bλ*/2`, the real part of the complex pair at the lowest eigenvalue
    Oscillatory { lambda: f64 },
    /// `c²/b`, the limit of μ₋ as λ → ∞; not attained by any mode
    AccumulationAtInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConstant {
    pub omega0: f64,
    pub attaining: Attainment,
}

/// `ω₀ = min{aλ*, bλ*/2, c²/b}` with λ* the lowest Dirichlet eigenvalue or the lowest
/// nonzero Neumann eigenvalue.
pub fn omega0(params: &PdeParams, domain: &SpectralDomain) -> DecayConstant {
    omega0_at(params, domain.lambda_star())
}

pub fn omega0_at(params: &PdeParams, lambda_star: f64) -> DecayConstant {
    let heat = params.a * lambda_star;
    let osc = 0.5 * params.b * lambda_star;
    let acc = params.c * params.c / params.b;
    let mut best = DecayConstant {
        omega0: heat,
        attaining: Attainment::Heat {
            lambda: lambda_star,
        },
    };
    if osc < best.omega0 {
        best = DecayConstant {
            omega0: osc,
            attaining: Attainment::Oscillatory {
                lambda: lambda_star,
            },
        };
    }
    if acc < best.omega0 {
        best = DecayConstant {
            omega0: acc,
            attaining: Attainment::AccumulationAtInfinity,
        };
    }
    best
}

/// Spectral abscissa of `-A` over the retained modes and its analytic limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralAbscissa {
    /// `-min` over retained modes of `min{aλ, Re μ±}`
    pub numeric: f64,
    /// `-ω₀`, including the accumulation value `c²/b`
    pub analytic: f64,
    /// eigenvalue of the mode realizing the numeric value
    pub slowest_lambda: f64,
}

/// Abscissa on a Dirichlet domain, or on the mean-zero subspace of a Neumann domain when
/// `mean_zero` is set.
pub fn spectral_abscissa(
    params: &PdeParams,
    domain: &SpectralDomain,
    mean_zero: bool,
) -> Result<SpectralAbscissa> {
    if domain.bc() == BoundaryKind::Neumann && !mean_zero {
        return Err(Error::ZeroEigenvalue);
    }
    let mut best = f64::INFINITY;
    let mut slowest = f64::NAN;
    for &l in domain.lambdas() {
        if l == 0.0 {
            continue;
        }
        let r = mode_rate(l, params);
        if r < best {
            best = r;
            slowest = l;
        }
    }
    Ok(SpectralAbscissa {
        numeric: -best,
        analytic: -omega0(params, domain).omega0,
        slowest_lambda: slowest,
    })
}

/// Spectrum rows for every retained mode: `(λ, μ₁, μ₂, aλ)`.
pub fn spectrum_table(params: &PdeParams, domain: &SpectralDomain) -> Vec<(f64, Complex64, Complex64, f64)> {
    domain
        .eigenpairs()
        .iter()
        .map(|e| {
            let (p, m) = damped_roots(e.lambda, params);
            (e.lambda, p, m, params.a * e.lambda)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> PdeParams {
        PdeParams::linear(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn matrices_by_substitution() {
        let m = mode_matrix(1.0, &unit()).unwrap().matrix();
        assert_eq!(m, Matrix3::new(0.0, -1.0, 0.0, 1.0, 1.0, -1.0, 0.0, 0.0, 1.0));
        let m = mode_matrix(0.0, &unit()).unwrap().matrix();
        assert_eq!(m, Matrix3::new(0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0));
        let p = PdeParams::linear(2.0, 3.0, 1.0).unwrap();
        let m = mode_matrix(4.0, &p).unwrap().matrix();
        assert_eq!(m, Matrix3::new(0.0, -1.0, 0.0, 4.0, 12.0, -1.0, 0.0, 0.0, 8.0));
        assert!(mode_matrix(-1.0, &p).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let e = mode_matrix(1.0, &unit()).unwrap().eigenvalues();
        let h = 3f64.sqrt() / 2.0;
        assert_eq!(e[0], Complex64::new(1.0, 0.0));
        assert!((e[1] - Complex64::new(0.5, h)).norm() < 1e-15);
        assert!((e[2] - Complex64::new(0.5, -h)).norm() < 1e-15);
        let p = PdeParams::linear(1.0, 10.0, 1.0).unwrap();
        let e = mode_matrix(1.0, &p).unwrap().eigenvalues();
        assert!((e[1].re - (10.0 + 96f64.sqrt()) / 2.0).abs() < 1e-13);
        assert!((e[2].re - (10.0 - 96f64.sqrt()) / 2.0).abs() < 1e-13);
        assert!((e[2].re - 0.10102).abs() < 1e-5);
        let z = mode_matrix(0.0, &p).unwrap().eigenvalues();
        assert!(z.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn omega0_examples() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Dirichlet, 16).unwrap();
        let n = SpectralDomain::interval(PI, BoundaryKind::Neumann, 16).unwrap();
        assert_eq!(omega0(&unit(), &d).omega0, 0.5);
        let p = PdeParams::linear(0.1, 1.0, 1.0).unwrap();
        assert!((omega0(&p, &d).omega0 - 0.1).abs() < 1e-16);
        assert_eq!(omega0(&unit(), &n).omega0, 0.5);
        let big = PdeParams::linear(1.0, 10.0, 1.0).unwrap();
        let w = omega0(&big, &d);
        assert!((w.omega0 - 0.1).abs() < 1e-16);
        assert_eq!(w.attaining, Attainment::AccumulationAtInfinity);
    }

    #[test]
    fn abscissa_examples() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Dirichlet, 5).unwrap();
        let s = spectral_abscissa(&unit(), &d, false).unwrap();
        assert_eq!((s.numeric, s.analytic), (-0.5, -0.5));
        let d = SpectralDomain::interval(PI, BoundaryKind::Dirichlet, 100).unwrap();
        let big = PdeParams::linear(1.0, 10.0, 1.0).unwrap();
        let s = spectral_abscissa(&big, &d, false).unwrap();
        let brute = 2.0 / (10.0 + (100.0 - 4.0 / 10000.0f64).sqrt());
        assert!((s.numeric + brute).abs() < 1e-15);
        assert!(s.numeric < s.analytic);
        assert_eq!(s.analytic, -0.1);
        let n = SpectralDomain::interval(PI, BoundaryKind::Neumann, 8).unwrap();
        assert_eq!(spectral_abscissa(&unit(), &n, false), Err(Error::ZeroEigenvalue));
        assert_eq!(spectral_abscissa(&unit(), &n, true).unwrap().analytic, -0.5);
    }

    #[test]
    fn nilpotent_propagator() {
        let p = mode_matrix(0.0, &unit()).unwrap().propagator(1.0);
        assert_eq!(p, Matrix3::new(1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0));
        assert_eq!(mode_matrix(3.0, &unit()).unwrap().propagator(0.0), Matrix3::identity());
    }

    #[test]
    fn eigen_and_pade_routes_agree() {
        for (l, p) in [
            (1.0, unit()),
            (25.0, PdeParams::linear(0.3, 2.0, 1.5).unwrap()),
            (4.0, PdeParams::linear(1.0, 10.0, 1.0).unwrap()),
        ] {
            let blk = mode_matrix(l, &p).unwrap();
            let t = 0.7;
            let fast = blk.eigen_propagator(t).unwrap();
            let m = DMatrix::from_iterator(3, 3, blk.matrix().iter().map(|v| -v * t));
            let slow = expm(&m);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((fast[(i, j)] - slow[(i, j)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn defective_blocks_use_pade() {
        // aλ equal to a damped root: a = 0.5 with λ = 1 gives q(aλ) = 0.25 - 0.5 + 1 ≠ 0;
        // choose b, c so that the pair is a double root instead: b²λ = 4c²
        let p = PdeParams::linear(1.0, 2.0, 1.0).unwrap();
        let blk = mode_matrix(1.0, &p).unwrap();
        assert!(blk.eigenvector_condition().is_infinite());
        let a = blk.propagator(0.5);
        let b = blk.propagator(0.25) * blk.propagator(0.25);
        assert!((a - b).abs().max() < 1e-14);
    }

    #[test]
    fn b_over_a_sets_k() {
        let k = PdeParams::from_nonlinearity(1.0, 1.0, 2.0, 1, 5.0).unwrap();
        assert!((k.k - 2.5 / 4.0).abs() < 1e-16);
        let w = PdeParams::from_nonlinearity(1.0, 1.0, 2.0, 0, 5.0).unwrap();
        assert!((w.k - 3.5 / 4.0).abs() < 1e-16);
        let mut bad = w;
        bad.k = 1.0;
        assert!(bad.validate().is_err());
        assert!(PdeParams::new(1.0, 1.0, 1.0, 0.0, 2).is_err());
        assert!(PdeParams::linear(0.0, 1.0, 1.0).is_err());
    }
}
