//! Finite-difference weights on arbitrary nodes and derivatives of uniformly sampled series.

use crate::error::{Error, Result};

/// Fornberg weights: `w[m][j]` approximates the m-th derivative at `z` from values at `x[j]`.
pub fn fornberg(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Weights of a one-sided stencil at the first node of a uniform grid with spacing `dt`.
pub fn forward_weights(order: usize, accuracy: usize, dt: f64) -> Vec<f64> {
    let points = order + accuracy;
    let nodes: Vec<f64> = (0..points).map(|j| j as f64).collect();
    let w = fornberg(0.0, &nodes, order);
    w[order].iter().map(|v| v / dt.powi(order as i32)).collect()
}

/// `order`-th derivative at the first sample from a one-sided stencil of the given accuracy.
pub fn derivative_at_start(samples: &[f64], dt: f64, order: usize, accuracy: usize) -> Result<f64> {
    if order == 0 {
        return samples.first().copied().ok_or(Error::InsufficientSamples { needed: 1, have: 0 });
    }
    let w = forward_weights(order, accuracy, dt);
    if samples.len() < w.len() {
        return Err(Error::InsufficientSamples {
            needed: w.len(),
            have: samples.len(),
        });
    }
    Ok(w.iter().zip(samples).map(|(w, s)| w * s).sum())
}

/// Derivative of a uniformly sampled series at every sample: centered stencils inside,
/// one-sided stencils near the ends, all of the given (even) accuracy.
pub fn derivative_series(samples: &[f64], dt: f64, order: usize, accuracy: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Ok(samples.to_vec());
    }
    let n = samples.len();
    let points = order + accuracy - if order % 2 == 0 { 1 } else { 0 };
    let points = points.max(order + 1);
    if n < points {
        return Err(Error::InsufficientSamples {
            needed: points,
            have: n,
        });
    }
    let half = points / 2;
    let scale = dt.powi(order as i32);
    let mut out = vec![0.0; n];
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; points];
    for (i, o) in out.iter_mut().enumerate() {
        let start = i.saturating_sub(half).min(n - points);
        let offset = i - start;
        let w = cache[offset].get_or_insert_with(|| {
            let nodes: Vec<f64> = (0..points).map(|j| j as f64 - offset as f64).collect();
            fornberg(0.0, &nodes, order).swap_remove(order)
        });
        *o = w
            .iter()
            .zip(&samples[start..start + points])
            .map(|(w, s)| w * s)
            .sum::<f64>()
            / scale;
    }
    Ok(out)
}

/// Cubic Lagrange interpolation of a uniformly sampled series at time `t`.
pub fn interpolate(samples: &[f64], dt: f64, t: f64) -> f64 {
    let n = samples.len();
    if n == 1 {
        return samples[0];
    }
    let pts = 4.min(n);
    let pos = t / dt;
    let base = (pos.floor() as isize - 1).clamp(0, (n - pts) as isize) as usize;
    let mut acc = 0.0;
    for i in 0..pts {
        let xi = (base + i) as f64;
        let mut l = 1.0;
        for j in 0..pts {
            if j != i {
                let xj = (base + j) as f64;
                l *= (pos - xj) / (xi - xj);
            }
        }
        acc += l * samples[base + i];
    }
    acc
}
