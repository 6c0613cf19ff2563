//! Norm channels of trajectories, exponential decay fits and their comparison with ω₀.

use serde::{Deserialize, Serialize};

use crate::block::{mode_rate, omega0, PdeParams};
use crate::data::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::SpectralDomain;

pub const MIN_SAMPLES: usize = 20;
pub const UNDERFLOW_FLOOR: f64 = 1e-14;
pub const R2_WARNING: f64 = 0.999;
/// Fraction of the horizon dropped by the default window.
pub const TRANSIENT_FRACTION: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    L2U,
    L2Ut,
    L2Utt,
    H2U,
    H4U,
    Mean,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::L2U,
        Channel::L2Ut,
        Channel::L2Utt,
        Channel::H2U,
        Channel::H4U,
        Channel::Mean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::L2U => "L2_norm_u",
            Channel::L2Ut => "L2_norm_ut",
            Channel::L2Utt => "L2_norm_utt",
            Channel::H2U => "H2_norm_u",
            Channel::H4U => "H4_norm_u",
            Channel::Mean => "mean_u",
        }
    }

    pub fn parse(s: &str) -> Option<Channel> {
        let s = s.to_ascii_lowercase();
        Channel::ALL.into_iter().find(|c| {
            c.name().to_ascii_lowercase() == s
                || serde_json::to_value(c).ok().and_then(|v| v.as_str().map(str::to_owned)) == Some(s.clone())
        })
    }
}

/// Norms of a trajectory on its time grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub l2_u: Vec<f64>,
    pub l2_ut: Vec<f64>,
    pub l2_utt: Vec<f64>,
    pub h2_u: Vec<f64>,
    pub h4_u: Vec<f64>,
    /// `|mean(u)|`
    pub mean: Vec<f64>,
}

impl NormSeries {
    pub fn from_trajectory(traj: &Trajectory) -> NormSeries {
        let mut out = NormSeries::default();
        for s in &traj.states {
            out.times.push(s.time);
            out.l2_u.push(s.u.l2_norm());
            out.l2_ut.push(s.ut.l2_norm());
            out.l2_utt.push(s.utt.l2_norm());
            out.h2_u.push(s.u.sobolev_norm(2.0).expect("valid order"));
            out.h4_u.push(s.u.sobolev_norm(4.0).expect("valid order"));
            out.mean.push(s.u.mean().abs());
        }
        out
    }

    /// Series with a single channel filled in.
    pub fn single(times: Vec<f64>, channel: Channel, values: Vec<f64>) -> NormSeries {
        let mut out = NormSeries {
            times,
            ..Default::default()
        };
        *out.channel_mut(channel) = values;
        out
    }

    pub fn channel(&self, c: Channel) -> &[f64] {
        match c {
            Channel::L2U => &self.l2_u,
            Channel::L2Ut => &self.l2_ut,
            Channel::L2Utt => &self.l2_utt,
            Channel::H2U => &self.h2_u,
            Channel::H4U => &self.h4_u,
            Channel::Mean => &self.mean,
        }
    }

    pub fn channel_mut(&mut self, c: Channel) -> &mut Vec<f64> {
        match c {
            Channel::L2U => &mut self.l2_u,
            Channel::L2Ut => &mut self.l2_ut,
            Channel::L2Utt => &mut self.l2_utt,
            Channel::H2U => &mut self.h2_u,
            Channel::H4U => &mut self.h4_u,
            Channel::Mean => &mut self.mean,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// `[0.2 T, T]`
    pub fn default_window(&self) -> (f64, f64) {
        let t0 = self.times.first().copied().unwrap_or(0.0);
        let t1 = self.horizon();
        (t0 + TRANSIENT_FRACTION * (t1 - t0), t1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub channel: Channel,
    pub window: (f64, f64),
    pub rate: f64,
    /// `C` in `‖·‖ ≈ C e^{−rate·t}`
    pub intercept: f64,
    pub r_squared: f64,
    /// Points entering the regression.
    pub points: usize,
    /// Fit taken through the local maxima of an oscillating series.
    pub envelope: bool,
    pub warning: Option<String>,
}

impl DecayFit {
    pub fn predict(&self, t: f64) -> f64 {
        self.intercept * (-self.rate * t).exp()
    }
}

/// Least-squares line `y = α + βx`; returns `(α, β, r²)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let beta = sxy / sxx;
    let alpha = my - beta * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - alpha - beta * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (alpha, beta, r2)
}

/// Local maxima of `log y`, refined by a parabola through each peak and its neighbours.
fn peaks(t: &[f64], logy: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..t.len().saturating_sub(1) {
        if logy[i] > logy[i - 1] && logy[i] >= logy[i + 1] {
            let (ym, y0, yp) = (logy[i - 1], logy[i], logy[i + 1]);
            let h = t[i + 1] - t[i];
            let curv = ym - 2.0 * y0 + yp;
            if curv < 0.0 {
                let d = 0.5 * (ym - yp) / curv;
                out.push((t[i] + d * h, y0 - 0.25 * (ym - yp) * d));
            } else {
                out.push((t[i], y0));
            }
        }
    }
    out
}

/// Log-linear fit of one channel on `window` (default: drop the first 20% of the horizon).
///
/// Series with interior local maxima are fitted through those maxima.
pub fn fit_decay(series: &NormSeries, channel: Channel, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let window = window.unwrap_or_else(|| series.default_window());
    let values = series.channel(channel);
    if values.len() != series.times.len() {
        return Err(Error::DimensionMismatch {
            expected: series.times.len(),
            got: values.len(),
        });
    }
    let eps = 1e-9 * (window.1 - window.0).abs().max(1.0);
    let (t, y): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 - eps && **t <= window.1 + eps)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if t.len() < MIN_SAMPLES {
        return Err(Error::ShortWindow {
            have: t.len(),
            needed: MIN_SAMPLES,
        });
    }
    let logy: Vec<f64> = y.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let pk = peaks(&t, &logy);
    let envelope = pk.len() >= 3;
    let (ft, fy): (Vec<f64>, Vec<f64>) = if envelope {
        pk.into_iter().unzip()
    } else {
        (t.clone(), logy)
    };
    if let Some(i) = ft.iter().zip(&fy).position(|(_, l)| *l <= UNDERFLOW_FLOOR.ln()) {
        return Err(Error::Underflow {
            time: ft[i],
            floor: UNDERFLOW_FLOOR,
        });
    }
    let (alpha, beta, r2) = linear_regression(&ft, &fy);
    let warning = (r2 < R2_WARNING).then(|| format!("r² = {r2:.6} below {R2_WARNING}: decay is not cleanly exponential"));
    Ok(DecayFit {
        channel,
        window,
        rate: -beta,
        intercept: alpha.exp(),
        r_squared: r2,
        points: ft.len(),
        envelope,
        warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayComparison {
    pub measured: f64,
    pub omega0: f64,
    /// Analytic rate of the slowest reference mode.
    pub mode_rate: f64,
    pub mode_lambda: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Compares a measured rate with ω₀ and the slowest analytic rate over `lambdas` (the
/// lowest admissible eigenvalue when `None`).
///
/// PASS needs `measured ≥ 0.99·min(ω₀, mode rate)` and a relative distance to the mode
/// rate of at most `tolerance`.
pub fn compare_omega0(
    measured: f64,
    params: &PdeParams,
    domain: &SpectralDomain,
    lambdas: Option<&[f64]>,
    tolerance: f64,
) -> DecayComparison {
    let w0 = omega0(params, domain).omega0;
    let lam_star = [domain.lambda_star()];
    let set = lambdas.unwrap_or(&lam_star);
    let (mode_lambda, mode) = set
        .iter()
        .filter(|l| **l > 0.0)
        .map(|&l| (l, mode_rate(l, params)))
        .fold((f64::NAN, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
    let floor = 0.99 * w0.min(mode);
    let ok = measured >= floor && (measured - mode).abs() <= tolerance * mode;
    DecayComparison {
        measured,
        omega0: w0,
        mode_rate: mode,
        mode_lambda,
        tolerance,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    }
}

/// Eigenvalues of modes whose coefficient exceeds `rel` times the largest one.
pub fn excited_lambdas(traj: &Trajectory, rel: f64) -> Vec<f64> {
    let s = &traj.states[0];
    let lam = s.u.domain().lambdas();
    let mag: Vec<f64> = (0..lam.len())
        .map(|m| {
            s.u.coeffs()[m]
                .abs()
                .max(s.ut.coeffs()[m].abs())
                .max(s.utt.coeffs()[m].abs())
        })
        .collect();
    let top = mag.iter().cloned().fold(0.0, f64::max);
    lam.iter()
        .zip(&mag)
        .filter(|(_, m)| **m > rel * top)
        .map(|(l, _)| *l)
        .collect()
}
