//! Functions of time with prescribed initial derivatives, built from Vandermonde-weighted
//! semigroup orbits `S(t) = Σ_j Σ_i c_ij e^{−t(1+i)A} A^{−j} x_j`.
//!
//! The generator acts on mode `m` as the scalar `α_m = shift + λ_m`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{GridFunction, Parity, SpectralDomain};

/// Largest order solved in exact rational arithmetic.
pub const EXACT_MAX_L: usize = 8;
/// Condition numbers above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VandermondeCoeffs {
    pub l: usize,
    /// `c[i][j]`
    pub c: Vec<Vec<f64>>,
    /// 2-norm condition number of `W = ((−(1+i))^m)_{m,i}`.
    pub condition: f64,
    /// Exact `c[i][j]` as `"p/q"` strings when solved in rational arithmetic.
    pub exact: Option<Vec<Vec<String>>>,
}

fn node(i: usize) -> i64 {
    -(1 + i as i64)
}

/// `W[m][i] = (−(1+i))^m`.
fn w_matrix(l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(l + 1, l + 1, |m, i| (node(i) as f64).powi(m as i32))
}

fn rational_w(l: usize) -> Vec<Vec<BigRational>> {
    (0..=l)
        .map(|m| {
            (0..=l)
                .map(|i| BigRational::from_integer(BigInt::from(node(i)).pow(m as u32)))
                .collect()
        })
        .collect()
}

/// Gauss–Jordan elimination in exact arithmetic; returns `(W⁻¹, det W)`.
fn rational_inverse(mut a: Vec<Vec<BigRational>>) -> Option<(Vec<Vec<BigRational>>, BigRational)> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let da = &factor * &a[col][j];
                    let di = &factor * &inv[col][j];
                    a[r][j] -= da;
                    inv[r][j] -= di;
                }
            }
        }
    }
    Some((inv, det))
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Exact `det W` for order `l`.
pub fn vandermonde_det(l: usize) -> BigRational {
    rational_inverse(rational_w(l))
        .map(|(_, d)| d)
        .unwrap_or_else(BigRational::zero)
}

/// `(−1)^{l(l+1)/2} Π_{j=1}^{l} j!`
pub fn det_formula(l: usize) -> BigInt {
    let mut prod = BigInt::one();
    let mut fact = BigInt::one();
    for j in 1..=l {
        fact *= BigInt::from(j);
        prod *= &fact;
    }
    if (l * (l + 1) / 2) % 2 == 1 {
        -prod
    } else {
        prod
    }
}

/// Coefficients with `Σ_i c_ij (−(1+i))^m = δ_mj` for `m, j ≤ l`.
pub fn vandermonde_coeffs(l: usize) -> Result<VandermondeCoeffs> {
    let w = w_matrix(l);
    let condition = condition_number(&w);
    if condition > MAX_CONDITION || !condition.is_finite() {
        return Err(Error::IllConditioned { l, cond: condition });
    }
    if l <= EXACT_MAX_L {
        let (inv, _) = rational_inverse(rational_w(l)).expect("distinct nodes");
        // W c_{·j} = e_j, so c = W⁻¹ with c[i][j] = inv[i][j]
        let c = inv
            .iter()
            .map(|row| row.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        let exact = inv
            .iter()
            .map(|row| row.iter().map(|q| q.to_string()).collect())
            .collect();
        return Ok(VandermondeCoeffs {
            l,
            c,
            condition,
            exact: Some(exact),
        });
    }
    let inv = w
        .clone()
        .try_inverse()
        .ok_or(Error::IllConditioned { l, cond: condition })?;
    let c = (0..=l)
        .map(|i| (0..=l).map(|j| inv[(i, j)]).collect())
        .collect();
    Ok(VandermondeCoeffs {
        l,
        c,
        condition,
        exact: None,
    })
}

impl VandermondeCoeffs {
    /// Largest `|Σ_i c_ij (−(1+i))^m − δ_mj|`.
    pub fn identity_defect(&self) -> f64 {
        let l = self.l;
        let mut worst = 0.0f64;
        for j in 0..=l {
            for m in 0..=l {
                let s: f64 = (0..=l)
                    .map(|i| self.c[i][j] * (node(i) as f64).powi(m as i32))
                    .sum();
                let target = if m == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `c[i][j]` as an exact rational, when available.
    pub fn exact(&self, i: usize, j: usize) -> Option<BigRational> {
        self.exact.as_ref().and_then(|e| e[i][j].parse().ok())
    }
}

/// `S(t)` assembled from prescribed initial derivatives `x_0, …, x_l`.
#[derive(Clone, Debug)]
pub struct Extension {
    domain: Arc<SpectralDomain>,
    parity: [Parity; 2],
    coeffs: VandermondeCoeffs,
    alphas: Vec<f64>,
    /// `weights[m][i] = Σ_j c_ij α_m^{−j} x_j[m]`
    weights: Vec<Vec<f64>>,
}

/// Builds the extension with generator `α_m = shift + λ_m`.
pub fn extend(values: &[GridFunction], shift: f64) -> Result<Extension> {
    let first = values
        .first()
        .ok_or_else(|| Error::InvalidParameter("at least one initial derivative required".into()))?;
    let domain = Arc::clone(first.domain());
    let parity = first.parity();
    for v in values {
        if !(Arc::ptr_eq(v.domain(), &domain) || **v.domain() == *domain) || v.parity() != parity {
            return Err(Error::DomainMismatch);
        }
    }
    let lam = if parity == domain.solution_parity() {
        domain.lambdas().to_vec()
    } else {
        domain
            .wavenumbers(parity)
            .iter()
            .map(|ks| {
                ks.iter()
                    .zip(domain.lengths())
                    .map(|(&k, l)| (k as f64 * std::f64::consts::PI / l).powi(2))
                    .sum()
            })
            .collect()
    };
    let alphas: Vec<f64> = lam.iter().map(|l| shift + l).collect();
    if let Some(bad) = alphas.iter().find(|a| !(**a > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "generator must be positive, got mode value {bad}"
        )));
    }
    let l = values.len() - 1;
    let coeffs = vandermonde_coeffs(l)?;
    let weights = alphas
        .iter()
        .enumerate()
        .map(|(m, &a)| {
            (0..=l)
                .map(|i| {
                    (0..=l)
                        .map(|j| coeffs.c[i][j] * a.powi(-(j as i32)) * values[j].coeffs()[m])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(Extension {
        domain,
        parity,
        coeffs,
        alphas,
        weights,
    })
}

impl Extension {
    pub fn order(&self) -> usize {
        self.coeffs.l
    }

    pub fn coeffs(&self) -> &VandermondeCoeffs {
        &self.coeffs
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `∂t^k S(t)` in closed form.
    pub fn derivative(&self, k: usize, t: f64) -> GridFunction {
        let c: Vec<f64> = self
            .alphas
            .iter()
            .zip(&self.weights)
            .map(|(&a, w)| {
                w.iter()
                    .enumerate()
                    .map(|(i, wi)| {
                        let rate = -((1 + i) as f64) * a;
                        wi * rate.powi(k as i32) * (rate * t).exp()
                    })
                    .sum()
            })
            .collect();
        GridFunction::from_coeffs_with(&self.domain, self.parity, c).expect("shape preserved")
    }

    pub fn eval(&self, t: f64) -> GridFunction {
        self.derivative(0, t)
    }

    /// Mode `m` of `S` at a complex time.
    pub fn eval_mode_complex(&self, m: usize, t: Complex64) -> Complex64 {
        let a = self.alphas[m];
        self.weights[m]
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * (t * (-((1 + i) as f64) * a)).exp())
            .sum()
    }

    /// Mode `m` of `S` at a real time.
    pub fn eval_mode(&self, m: usize, t: f64) -> f64 {
        self.eval_mode_complex(m, Complex64::new(t, 0.0)).re
    }

    /// Bound `Σ_i |w_i|` on `e^{t α_min} ‖S(t)‖_∞`-type coefficients, used for decay checks.
    pub fn envelope(&self, m: usize) -> f64 {
        self.weights[m].iter().map(|w| w.abs()).sum()
    }
}

/// True when `|det W|` matches the factorial product exactly.
pub fn determinant_matches(l: usize) -> bool {
    vandermonde_det(l).abs() == BigRational::from_integer(det_formula(l).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoundaryKind;
    use std::f64::consts::PI;

    #[test]
    fn small_orders_are_exact() {
        let c0 = vandermonde_coeffs(0).unwrap();
        assert_eq!(c0.c, vec![vec![1.0]]);
        let c1 = vandermonde_coeffs(1).unwrap();
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        assert_eq!(c1.exact(0, 0).unwrap(), q(2));
        assert_eq!(c1.exact(1, 0).unwrap(), q(-1));
        assert_eq!(c1.exact(0, 1).unwrap(), q(1));
        assert_eq!(c1.exact(1, 1).unwrap(), q(-1));
    }

    #[test]
    fn identity_and_determinant() {
        for l in 0..=EXACT_MAX_L {
            let c = vandermonde_coeffs(l).unwrap();
            assert!(c.identity_defect() < 1e-10 * c.condition.max(1.0), "l={l}");
        }
        for l in 0..=EXACT_MAX_L {
            assert_eq!(vandermonde_det(l), BigRational::from_integer(det_formula(l)));
            assert!(determinant_matches(l));
        }
    }

    #[test]
    fn large_orders_are_rejected() {
        let first_bad = (0..30).find(|&l| vandermonde_coeffs(l).is_err()).unwrap();
        assert!((9..=16).contains(&first_bad), "{first_bad}");
    }

    #[test]
    fn two_term_examples() {
        let d = SpectralDomain::interval(PI, BoundaryKind::Neumann, 4).unwrap();
        // mode 0 has λ = 0, so α = 1
        let mut phi = GridFunction::zeros(&d);
        phi.coeffs_mut()[0] = 1.0;
        let zero = GridFunction::zeros(&d);
        let e = extend(&[phi.clone(), zero.clone()], 1.0).unwrap();
        for t in [0.0f64, 0.3, 1.7] {
            let want = 2.0 * (-t).exp() - (-2.0 * t).exp();
            assert!((e.eval(t).coeffs()[0] - want).abs() < 1e-15);
        }
        assert!(e.derivative(1, 0.0).coeffs()[0].abs() < 1e-15);
        let e = extend(&[zero, phi], 1.0).unwrap();
        for t in [0.0f64, 0.3, 1.7] {
            let want = (-t).exp() - (-2.0 * t).exp();
            assert!((e.eval(t).coeffs()[0] - want).abs() < 1e-15);
        }
        assert!((e.derivative(1, 0.0).coeffs()[0] - 1.0).abs() < 1e-15);
    }
}
