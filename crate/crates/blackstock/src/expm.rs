//! Matrix exponential by scaling and squaring with diagonal Padé approximants, and the
//! augmented-matrix trick for exponential integrators.

use nalgebra::{DMatrix, DVector};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA_13: f64 = 5.371920351148152;

fn pade_coeffs(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
        ],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
    }
}

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade(a: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let b = pade_coeffs(m);
    let a2 = a * a;
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    let mut pow = DMatrix::identity(n, n);
    for j in 0..=m / 2 {
        v += &pow * b[2 * j];
        if 2 * j + 1 <= m {
            u += &pow * b[2 * j + 1];
        }
        pow = &pow * &a2;
    }
    let u = a * u;
    let lhs = &v - &u;
    let rhs = &v + &u;
    lhs.lu().solve(&rhs).expect("Padé denominator is nonsingular")
}

/// `exp(A)` for a small dense matrix.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = norm1(a);
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    for (m, theta) in THETA {
        if norm <= theta {
            return pade(a, m);
        }
    }
    let s = ((norm / THETA_13).log2().ceil()).max(0.0) as i32;
    let scaled = a / 2f64.powi(s);
    let mut r = pade(&scaled, 13);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Exact one-step weights for `z' = B z + e (F0 + D s)` over a step of length `h`:
/// `z(h) = P z(0) + q0 F0 + q1 D`.
#[derive(Clone, Debug)]
pub struct EtdWeights {
    pub p: DMatrix<f64>,
    pub q0: DVector<f64>,
    pub q1: DVector<f64>,
}

impl EtdWeights {
    pub fn new(b: &DMatrix<f64>, e: &DVector<f64>, h: f64) -> EtdWeights {
        let d = b.nrows();
        let mut aug = DMatrix::zeros(d + 2, d + 2);
        aug.view_mut((0, 0), (d, d)).copy_from(&(b * h));
        for i in 0..d {
            aug[(i, d)] = e[i] * h;
        }
        aug[(d, d + 1)] = h;
        let ex = expm(&aug);
        EtdWeights {
            p: ex.view((0, 0), (d, d)).into_owned(),
            q0: ex.view((0, d), (d, 1)).column(0).into_owned(),
            q1: ex.view((0, d + 1), (d, 1)).column(0).into_owned(),
        }
    }

    /// Advances `z` given the forcing value at the left end and its slope.
    pub fn apply(&self, z: &[f64], f0: f64, slope: f64, out: &mut [f64]) {
        let d = z.len();
        for i in 0..d {
            let mut acc = self.q0[i] * f0 + self.q1[i] * slope;
            for j in 0..d {
                acc += self.p[(i, j)] * z[j];
            }
            out[i] = acc;
        }
    }
}

/// Exact one-step matrices for `z' = B z + r0 + s r1` over a step of length `h`:
/// `z(h) = P z(0) + Φ0 r0 + Φ1 r1`.
#[derive(Clone, Debug)]
pub struct EtdMatrices {
    pub p: DMatrix<f64>,
    pub phi0: DMatrix<f64>,
    pub phi1: DMatrix<f64>,
}

impl EtdMatrices {
    pub fn new(b: &DMatrix<f64>, h: f64) -> EtdMatrices {
        let d = b.nrows();
        let mut aug = DMatrix::zeros(3 * d, 3 * d);
        aug.view_mut((0, 0), (d, d)).copy_from(&(b * h));
        for i in 0..d {
            aug[(i, d + i)] = h;
            aug[(d + i, 2 * d + i)] = h;
        }
        let ex = expm(&aug);
        EtdMatrices {
            p: ex.view((0, 0), (d, d)).into_owned(),
            phi0: ex.view((0, d), (d, d)).into_owned(),
            phi1: ex.view((0, 2 * d), (d, d)).into_owned(),
        }
    }

    pub fn apply(&self, z: &[f64], r0: &[f64], r1: &[f64], out: &mut [f64]) {
        let d = z.len();
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.p[(i, j)] * z[j] + self.phi0[(i, j)] * r0[j] + self.phi1[(i, j)] * r1[j];
            }
            out[i] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_of_rotation_and_diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = expm(&a);
        assert!((e[(0, 0)] - 1f64.cos()).abs() < 1e-15);
        assert!((e[(1, 0)] - 1f64.sin()).abs() < 1e-15);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![-30.0, 2.0, 1e-3]));
        let e = expm(&d);
        assert!((e[(0, 0)] / (-30f64).exp() - 1.0).abs() < 1e-13);
        assert!((e[(1, 1)] / 2f64.exp() - 1.0).abs() < 1e-14);
        assert!((e[(2, 2)] / 1e-3f64.exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_is_exact() {
        let n = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let e = expm(&n);
        let want = [1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                assert!((e[(i, j)] - want[3 * i + j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn etd_weights_match_scalar_formulas() {
        let beta = 3.0;
        let h = 0.2;
        let w = EtdWeights::new(
            &DMatrix::from_element(1, 1, -beta),
            &DVector::from_element(1, 1.0),
            h,
        );
        let q0 = (1.0 - (-beta * h).exp()) / beta;
        let q1 = (beta * h - 1.0 + (-beta * h).exp()) / (beta * beta);
        assert!((w.p[(0, 0)] - (-beta * h).exp()).abs() < 1e-15);
        assert!((w.q0[0] - q0).abs() < 1e-15);
        assert!((w.q1[0] - q1).abs() < 1e-15);
    }

    #[test]
    fn etd_matrices_reduce_to_weights() {
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0, -0.5]);
        let e = DVector::from_vec(vec![0.0, 1.0]);
        let h = 0.3;
        let w = EtdWeights::new(&b, &e, h);
        let m = EtdMatrices::new(&b, h);
        let z = [0.7, -0.2];
        let (mut x, mut y) = ([0.0; 2], [0.0; 2]);
        w.apply(&z, 1.5, -2.0, &mut x);
        m.apply(&z, &[0.0, 1.5], &[0.0, -2.0], &mut y);
        for i in 0..2 {
            assert!((x[i] - y[i]).abs() < 1e-15);
        }
    }
}
