//! Scenario files: parameters, domain, data and solver settings, plus the bundled presets.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::block::PdeParams;
use crate::data::{ProblemData, TimeGrid, DEFAULT_P};
use crate::decay::Channel;
use crate::error::{Error, Result};
use crate::field::{self, FieldRef, TrigField, TrigTerm};
use crate::nonlinear::{Integrator, PicardConfig, SimConfig, DEFAULT_GUARD};
use crate::spectral::{BoundaryKind, Geometry, GridFunction, SpectralDomain};
use crate::linear::LinearOptions;

pub const PRESETS: [&str; 5] = [
    "dirichlet-baseline",
    "neumann-meanzero",
    "big-b-accumulation",
    "nonlinear-small",
    "incompatible-data",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub geometry: Geometry,
    pub bc: BoundaryKind,
    /// Retained modes per axis.
    pub modes: Vec<usize>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<Arc<SpectralDomain>> {
        SpectralDomain::new(self.geometry, self.bc, &self.modes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataPreset {
    /// `u₀` is the slowest eigenfunction, `u₁ = u₂ = 0`.
    Fundamental,
    Zero,
    /// The fundamental mode plus a term violating the lowest boundary condition.
    Incompatible,
    /// All data extracted from a smooth space-time function with nonzero traces.
    Manufactured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub preset: DataPreset,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "default_p")]
    pub p_exponent: f64,
    /// CSV files of collocation-grid samples (`x[, y], value`) replacing the preset's
    /// initial data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2_file: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_p() -> f64 {
    DEFAULT_P
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub dt: f64,
    pub horizon: f64,
    pub record_stride: usize,
    pub guard: f64,
    pub integrator: Integrator,
    pub picard: PicardConfig,
    pub fd_accuracy: usize,
    /// Neumann runs: take the mean from its ODE.
    pub mean_ode: bool,
    pub compat_tolerance: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            dt: 1e-3,
            horizon: 30.0,
            record_stride: 10,
            guard: DEFAULT_GUARD,
            integrator: Integrator::default(),
            picard: PicardConfig::default(),
            fd_accuracy: 6,
            mean_ode: false,
            compat_tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompatProblem {
    Dirichlet,
    Neumann,
    Heat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompatSpec {
    /// Defaults to the domain's boundary condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<CompatProblem>,
    pub tolerance: f64,
    pub heat_l: usize,
    pub heat_k: usize,
    pub heat_mu: f64,
}

impl Default for CompatSpec {
    fn default() -> Self {
        CompatSpec {
            problem: None,
            tolerance: 1e-8,
            heat_l: 0,
            heat_k: 1,
            heat_mu: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySpec {
    pub channel: Channel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Relative tolerance against the slowest mode rate.
    pub tolerance: f64,
}

impl Default for DecaySpec {
    fn default() -> Self {
        DecaySpec {
            channel: Channel::L2U,
            window: None,
            tolerance: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtendSpec {
    pub l: usize,
    pub shift: f64,
    pub horizon: f64,
    pub samples: usize,
}

impl Default for ExtendSpec {
    fn default() -> Self {
        ExtendSpec {
            l: 2,
            shift: 1.0,
            horizon: 2.0,
            samples: 41,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Draw this many `(a, b, c)` uniformly from `range` instead of the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    pub range: [f64; 2],
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            a: vec![0.5, 1.0, 2.0],
            b: vec![0.5, 1.0, 2.0],
            c: vec![0.5, 1.0, 2.0],
            random: None,
            range: [0.05, 20.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// At most `i64::MAX`, the largest TOML integer.
    #[serde(default)]
    pub seed: u64,
    pub params: PdeParams,
    pub domain: DomainSpec,
    pub data: DataSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub compat: CompatSpec,
    #[serde(default)]
    pub decay: DecaySpec,
    #[serde(default)]
    pub extend: ExtendSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let located = |e: &dyn std::fmt::Display| Error::Config(format!("{}: {e}", path.display()));
        let text = fs::read_to_string(path).map_err(|e| located(&e))?;
        let mut s = Scenario::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => located(&m),
            other => other,
        })?;
        // sample files are resolved against the scenario's directory
        if let Some(dir) = path.parent() {
            for f in [&mut s.data.u0_file, &mut s.data.u1_file, &mut s.data.u2_file]
                .into_iter()
                .flatten()
            {
                if f.is_relative() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.domain.build()?;
        if self.seed > i64::MAX as u64 {
            return Err(Error::InvalidParameter(format!("seed must not exceed {}", i64::MAX)));
        }
        let s = &self.solver;
        if !(s.dt > 0.0 && s.horizon > 0.0) {
            return Err(Error::InvalidParameter("solver.dt and solver.horizon must be positive".into()));
        }
        if s.record_stride == 0 {
            return Err(Error::InvalidParameter("solver.record_stride must be at least 1".into()));
        }
        if !(self.data.amplitude.is_finite()) {
            return Err(Error::InvalidParameter("data.amplitude must be finite".into()));
        }
        if self.sweep.range[0] <= 0.0 || self.sweep.range[1] < self.sweep.range[0] {
            return Err(Error::InvalidParameter("sweep.range must be an increasing positive pair".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> PdeParams {
        self.params.resolved()
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_horizon(self.solver.dt, self.solver.horizon)
    }

    pub fn linear_options(&self, force: bool) -> LinearOptions {
        LinearOptions {
            record_stride: self.solver.record_stride,
            fd_accuracy: self.solver.fd_accuracy,
            mean_ode: self.solver.mean_ode,
            force,
            compat_tolerance: self.solver.compat_tolerance,
        }
    }

    pub fn sim_config(&self, force: bool) -> SimConfig {
        SimConfig {
            params: self.params(),
            guard: self.solver.guard,
            integrator: self.solver.integrator,
            record_stride: self.solver.record_stride,
            picard: self.solver.picard,
            force,
        }
    }

    /// Problem data on the scenario's time grid.
    pub fn problem(&self, domain: &Arc<SpectralDomain>) -> Result<ProblemData> {
        let time = self.time_grid()?;
        let mut data = build_preset_data(self.data.preset, self.data.amplitude, &self.params(), domain, time)?;
        data.p_exponent = self.data.p_exponent;
        for (file, slot) in [
            (&self.data.u0_file, &mut data.u0),
            (&self.data.u1_file, &mut data.u1),
            (&self.data.u2_file, &mut data.u2),
        ] {
            if let Some(path) = file {
                *slot = load_samples(domain, path)?;
            }
        }
        Ok(data)
    }
}

/// Slowest eigenfunction of the domain as a trigonometric field.
pub fn fundamental_mode(domain: &SpectralDomain, amp: f64) -> TrigField {
    let lengths = domain.lengths();
    let waves = match domain.bc() {
        BoundaryKind::Dirichlet => lengths.iter().map(|l| (std::f64::consts::PI / l, 0.0)).collect(),
        BoundaryKind::Neumann => {
            // cosine along the longest axis, constant along the others
            let long = (0..lengths.len())
                .max_by(|&i, &j| lengths[i].total_cmp(&lengths[j]))
                .unwrap_or(0);
            let half_pi = std::f64::consts::FRAC_PI_2;
            (0..lengths.len())
                .map(|i| {
                    if i == long {
                        (std::f64::consts::PI / lengths[i], half_pi)
                    } else {
                        (0.0, half_pi)
                    }
                })
                .collect()
        }
    };
    TrigField::term(amp, 0.0, waves)
}

fn build_preset_data(
    preset: DataPreset,
    amp: f64,
    params: &PdeParams,
    domain: &Arc<SpectralDomain>,
    time: TimeGrid,
) -> Result<ProblemData> {
    let zero = field::zero;
    Ok(match preset {
        DataPreset::Zero => ProblemData::zero(time),
        DataPreset::Fundamental => {
            ProblemData::homogeneous(time, fundamental_mode(domain, amp).into_ref(), zero(), zero())
        }
        DataPreset::Incompatible => {
            let base = fundamental_mode(domain, amp).into_ref();
            let extra: FieldRef = match domain.bc() {
                BoundaryKind::Dirichlet => field::spatial(move |_| 0.1 * amp),
                BoundaryKind::Neumann => field::spatial(move |x| 0.05 * amp * x[0] * x[0]),
            };
            ProblemData::homogeneous(
                time,
                field::Combination::new(vec![(1.0, base), (1.0, extra)]),
                zero(),
                zero(),
            )
        }
        DataPreset::Manufactured => {
            let u_star = match domain.geometry() {
                Geometry::Interval { .. } => TrigField::new(vec![
                    TrigTerm {
                        amp,
                        power: 0,
                        sigma: 0.5,
                        waves: vec![(0.7, 0.4)],
                    },
                    TrigTerm {
                        amp: 0.5 * amp,
                        power: 1,
                        sigma: 1.0,
                        waves: vec![(1.3, 1.1)],
                    },
                ]),
                Geometry::Rectangle { .. } => {
                    let mut u = fundamental_mode(domain, amp);
                    u.terms[0].sigma = 0.5;
                    u
                }
            };
            ProblemData::manufactured(&u_star, params, domain, time)
        }
    })
}

/// Time-independent field backed by a spectral series.
struct SeriesField(GridFunction);

impl field::Field for SeriesField {
    fn eval(&self, _t: f64, x: &[f64]) -> f64 {
        self.0.eval(x)
    }
    fn laplacian(&self) -> Option<FieldRef> {
        Some(Arc::new(SeriesField(self.0.laplacian())))
    }
    fn partial_x(&self, axis: usize) -> Option<FieldRef> {
        Some(Arc::new(SeriesField(self.0.derivative(axis))))
    }
    fn partial_t(&self) -> Option<FieldRef> {
        Some(field::zero())
    }
}

/// Reads `x[, y], value` rows sampled at the domain's collocation points.
pub fn load_samples(domain: &Arc<SpectralDomain>, path: &Path) -> Result<FieldRef> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    let pts = domain.grid_points();
    let dims = domain.dims();
    let mut values = Vec::with_capacity(pts.len());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(|c: char| c.is_alphabetic()) {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if cols.len() != dims + 1 {
            return Err(Error::InvalidParameter(format!(
                "{}:{}: expected {} columns",
                path.display(),
                lineno + 1,
                dims + 1
            )));
        }
        let i = values.len();
        if i < pts.len() && pts[i].iter().zip(&cols).any(|(p, c)| (p - c).abs() > 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "{}:{}: point {:?} is not collocation point {:?}",
                path.display(),
                lineno + 1,
                &cols[..dims],
                pts[i]
            )));
        }
        values.push(cols[dims]);
    }
    let g = domain.transform(&values)?;
    Ok(Arc::new(SeriesField(g)))
}

/// One of the bundled scenarios.
pub fn preset(name: &str) -> Result<Scenario> {
    let pi = std::f64::consts::PI;
    let unit = PdeParams::linear(1.0, 1.0, 1.0)?;
    let interval = |bc| DomainSpec {
        geometry: Geometry::Interval { length: pi },
        bc,
        modes: vec![32],
    };
    let data = |preset, amplitude| DataSpec {
        preset,
        amplitude,
        p_exponent: DEFAULT_P,
        u0_file: None,
        u1_file: None,
        u2_file: None,
    };
    let base = Scenario {
        name: name.to_string(),
        seed: 0,
        params: unit,
        domain: interval(BoundaryKind::Dirichlet),
        data: data(DataPreset::Fundamental, 1.0),
        solver: SolverSpec::default(),
        compat: CompatSpec::default(),
        decay: DecaySpec {
            window: Some([5.0, 30.0]),
            ..DecaySpec::default()
        },
        extend: ExtendSpec::default(),
        sweep: SweepSpec::default(),
        output_dir: default_out(),
    };
    let s = match name {
        "dirichlet-baseline" => base,
        "neumann-meanzero" => Scenario {
            domain: interval(BoundaryKind::Neumann),
            ..base
        },
        "big-b-accumulation" => Scenario {
            params: PdeParams::linear(1.0, 10.0, 1.0)?,
            solver: SolverSpec {
                dt: 1e-2,
                horizon: 100.0,
                ..SolverSpec::default()
            },
            decay: DecaySpec {
                window: Some([20.0, 100.0]),
                ..DecaySpec::default()
            },
            ..base
        },
        "nonlinear-small" => Scenario {
            params: PdeParams::new(1.0, 1.0, 1.0, 1.0, 1)?,
            data: data(DataPreset::Fundamental, 1e-3),
            decay: DecaySpec {
                window: Some([5.0, 30.0]),
                tolerance: 0.05,
                ..DecaySpec::default()
            },
            ..base
        },
        "incompatible-data" => Scenario {
            data: data(DataPreset::Incompatible, 1.0),
            ..base
        },
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {name:?}; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(s)
}
