//! Tensor-product sine/cosine spectral domains on intervals and rectangles.
//!
//! Every axis carries a band of wavenumbers `0..=K`. A function is stored per axis either
//! as a sine series (wavenumbers `1..=K`) or as a cosine series (`0..=K`). Dirichlet
//! domains keep solutions in the sine family with `K = n_modes`, Neumann domains in the
//! cosine family with `K = n_modes - 1`. Derivatives and products move between families.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "Dirichlet",
            BoundaryKind::Neumann => "Neumann",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Geometry {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Geometry {
    pub fn lengths(&self) -> Vec<f64> {
        match *self {
            Geometry::Interval { length } => vec![length],
            Geometry::Rectangle { lx, ly } => vec![lx, ly],
        }
    }
}

/// Trigonometric family of a series along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Sine,
    Cosine,
}

impl Parity {
    /// Lowest stored wavenumber.
    pub fn first(self) -> usize {
        match self {
            Parity::Sine => 1,
            Parity::Cosine => 0,
        }
    }

    /// Family of the pointwise product of two series.
    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Cosine
        } else {
            Parity::Sine
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Sine => Parity::Cosine,
            Parity::Cosine => Parity::Sine,
        }
    }

    fn count(self, kmax: usize) -> usize {
        kmax + 1 - self.first()
    }

    fn slot(self) -> usize {
        match self {
            Parity::Sine => 0,
            Parity::Cosine => 1,
        }
    }

    fn basis(self, k: usize, x: f64, length: f64) -> f64 {
        let arg = k as f64 * PI * x / length;
        match self {
            Parity::Sine => arg.sin(),
            Parity::Cosine => arg.cos(),
        }
    }
}

#[derive(Debug)]
struct Axis {
    length: f64,
    kmax: usize,
    fine: usize,
    nodes: Vec<f64>,
    fine_nodes: Vec<f64>,
    to_nodes: [DMatrix<f64>; 2],
    from_nodes: DMatrix<f64>,
    to_fine: [DMatrix<f64>; 2],
    from_fine: [DMatrix<f64>; 2],
}

fn synthesis(parity: Parity, kmax: usize, nodes: &[f64], length: f64) -> DMatrix<f64> {
    let n = parity.count(kmax);
    DMatrix::from_fn(nodes.len(), n, |j, i| {
        parity.basis(i + parity.first(), nodes[j], length)
    })
}

/// Discrete sine analysis on nodes `j L / P`, `j = 1..P-1`, stored over all `P + 1` closed
/// nodes when `closed` is set (endpoint columns are zero).
fn sine_analysis(kmax: usize, p: usize, closed: bool) -> DMatrix<f64> {
    let cols = if closed { p + 1 } else { p - 1 };
    let offset = if closed { 0 } else { 1 };
    let mut m = DMatrix::zeros(kmax, cols);
    for k in 1..=kmax {
        for j in 1..p {
            let v = 2.0 / p as f64 * (PI * (k * j) as f64 / p as f64).sin();
            m[(k - 1, j - offset)] = v;
        }
    }
    m
}

/// Discrete cosine analysis with halved endpoints on the closed nodes `j L / P`.
fn cosine_analysis(kmax: usize, p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(kmax + 1, p + 1);
    for k in 0..=kmax {
        for j in 0..=p {
            let mut v = 2.0 / p as f64 * (PI * (k * j) as f64 / p as f64).cos();
            if j == 0 || j == p {
                v *= 0.5;
            }
            if k == 0 || k == p {
                v *= 0.5;
            }
            m[(k, j)] = v;
        }
    }
    m
}

impl Axis {
    fn new(length: f64, kmax: usize, bc: BoundaryKind) -> Axis {
        let fine = 3 * kmax / 2 + 2;
        let (nodes, from_nodes) = match bc {
            BoundaryKind::Dirichlet => {
                let p = kmax + 1;
                let nodes: Vec<f64> = (1..p).map(|j| j as f64 * length / p as f64).collect();
                (nodes, sine_analysis(kmax, p, false))
            }
            BoundaryKind::Neumann => {
                let p = kmax;
                let nodes: Vec<f64> = (0..=p).map(|j| j as f64 * length / p as f64).collect();
                (nodes, cosine_analysis(kmax, p))
            }
        };
        let fine_nodes: Vec<f64> = (0..=fine)
            .map(|j| j as f64 * length / fine as f64)
            .collect();
        let to_nodes = [
            synthesis(Parity::Sine, kmax, &nodes, length),
            synthesis(Parity::Cosine, kmax, &nodes, length),
        ];
        let to_fine = [
            synthesis(Parity::Sine, kmax, &fine_nodes, length),
            synthesis(Parity::Cosine, kmax, &fine_nodes, length),
        ];
        let from_fine = [
            sine_analysis(kmax, fine, true),
            cosine_analysis(kmax, fine),
        ];
        Axis {
            length,
            kmax,
            fine,
            nodes,
            fine_nodes,
            to_nodes,
            from_nodes,
            to_fine,
            from_fine,
        }
    }

    fn wavenumber(&self, k: usize) -> f64 {
        k as f64 * PI / self.length
    }

    fn norm_sq(&self, parity: Parity, k: usize) -> f64 {
        if parity == Parity::Cosine && k == 0 {
            self.length
        } else {
            0.5 * self.length
        }
    }

    fn mean(&self, parity: Parity, k: usize) -> f64 {
        match parity {
            Parity::Cosine => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Parity::Sine => {
                if k % 2 == 1 {
                    2.0 / (k as f64 * PI)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Applies one matrix per axis to a row-major tensor.
fn apply_separable(mats: &[&DMatrix<f64>], input: &[f64]) -> Vec<f64> {
    match mats.len() {
        1 => {
            let v = DVector::from_column_slice(input);
            (mats[0] * v).as_slice().to_vec()
        }
        _ => {
            let (a, b) = (mats[0], mats[1]);
            let x = DMatrix::from_row_slice(a.ncols(), b.ncols(), input);
            let y = a * x * b.transpose();
            y.transpose().as_slice().to_vec()
        }
    }
}

/// A Laplacian eigenvalue together with its per-axis wavenumbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub lambda: f64,
    pub wavenumbers: Vec<usize>,
}

/// Interval or rectangle with analytic Laplacian eigenpairs and transform tables.
#[derive(Debug)]
pub struct SpectralDomain {
    geometry: Geometry,
    bc: BoundaryKind,
    n_modes: Vec<usize>,
    axes: Vec<Axis>,
    lambdas: Vec<f64>,
}

impl PartialEq for SpectralDomain {
    fn eq(&self, other: &Self) -> bool {
        self.geometry == other.geometry && self.bc == other.bc && self.n_modes == other.n_modes
    }
}

pub const DEFAULT_INTERVAL_MODES: usize = 128;
pub const DEFAULT_RECTANGLE_MODES: usize = 64;

impl SpectralDomain {
    pub fn new(geometry: Geometry, bc: BoundaryKind, n_modes: &[usize]) -> Result<Arc<Self>> {
        let lengths = geometry.lengths();
        if n_modes.len() != lengths.len() {
            return Err(Error::DimensionMismatch {
                expected: lengths.len(),
                got: n_modes.len(),
            });
        }
        for &l in &lengths {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidDomain(format!("side length {l} must be positive")));
            }
        }
        let min_modes = match bc {
            BoundaryKind::Dirichlet => 1,
            BoundaryKind::Neumann => 2,
        };
        if let Some(&n) = n_modes.iter().find(|&&n| n < min_modes) {
            return Err(Error::InvalidDomain(format!(
                "{} axes need at least {min_modes} modes, got {n}",
                bc.name()
            )));
        }
        let axes: Vec<Axis> = lengths
            .iter()
            .zip(n_modes)
            .map(|(&l, &n)| {
                let kmax = match bc {
                    BoundaryKind::Dirichlet => n,
                    BoundaryKind::Neumann => n - 1,
                };
                Axis::new(l, kmax, bc)
            })
            .collect();
        let mut dom = SpectralDomain {
            geometry,
            bc,
            n_modes: n_modes.to_vec(),
            axes,
            lambdas: Vec::new(),
        };
        let parity = dom.solution_parity();
        dom.lambdas = dom.lambdas_for(parity);
        Ok(Arc::new(dom))
    }

    pub fn interval(length: f64, bc: BoundaryKind, n_modes: usize) -> Result<Arc<Self>> {
        Self::new(Geometry::Interval { length }, bc, &[n_modes])
    }

    pub fn rectangle(lx: f64, ly: f64, bc: BoundaryKind, nx: usize, ny: usize) -> Result<Arc<Self>> {
        Self::new(Geometry::Rectangle { lx, ly }, bc, &[nx, ny])
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn n_modes(&self) -> &[usize] {
        &self.n_modes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.length).collect()
    }

    pub fn solution_parity(&self) -> [Parity; 2] {
        match self.bc {
            BoundaryKind::Dirichlet => [Parity::Sine; 2],
            BoundaryKind::Neumann => [Parity::Cosine; 2],
        }
    }

    /// Number of coefficients of a series with the given parity.
    pub fn shape(&self, parity: [Parity; 2]) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .map(|(i, a)| parity[i].count(a.kmax))
            .collect()
    }

    pub fn len_for(&self, parity: [Parity; 2]) -> usize {
        self.shape(parity).iter().product()
    }

    /// Number of retained solution modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Eigenvalues in coefficient storage order.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Per-coefficient wavenumbers for the given parity in storage order.
    pub fn wavenumbers(&self, parity: [Parity; 2]) -> Vec<Vec<usize>> {
        let shape = self.shape(parity);
        let total: usize = shape.iter().product();
        (0..total)
            .map(|flat| {
                let mut rem = flat;
                let mut ks = vec![0; shape.len()];
                for ax in (0..shape.len()).rev() {
                    ks[ax] = rem % shape[ax] + parity[ax].first();
                    rem /= shape[ax];
                }
                ks
            })
            .collect()
    }

    fn lambdas_for(&self, parity: [Parity; 2]) -> Vec<f64> {
        self.wavenumbers(parity)
            .iter()
            .map(|ks| {
                ks.iter()
                    .enumerate()
                    .map(|(ax, &k)| self.axes[ax].wavenumber(k).powi(2))
                    .sum()
            })
            .collect()
    }

    /// Retained eigenpairs sorted by eigenvalue.
    pub fn eigenpairs(&self) -> Vec<Eigenpair> {
        let mut pairs: Vec<Eigenpair> = self
            .wavenumbers(self.solution_parity())
            .into_iter()
            .zip(&self.lambdas)
            .map(|(wavenumbers, &lambda)| Eigenpair {
                lambda,
                wavenumbers,
            })
            .collect();
        pairs.sort_by(|a, b| {
            a.lambda
                .total_cmp(&b.lambda)
                .then_with(|| a.wavenumbers.cmp(&b.wavenumbers))
        });
        pairs
    }

    /// Smallest eigenvalue of the Dirichlet Laplacian or of the mean-zero Neumann Laplacian.
    pub fn lambda_star(&self) -> f64 {
        let lengths = self.lengths();
        match self.bc {
            BoundaryKind::Dirichlet => lengths.iter().map(|l| (PI / l).powi(2)).sum(),
            BoundaryKind::Neumann => lengths
                .iter()
                .map(|l| (PI / l).powi(2))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// |Ω|
    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// |Γ|: two endpoints for an interval, the perimeter for a rectangle.
    pub fn boundary_measure(&self) -> f64 {
        match self.geometry {
            Geometry::Interval { .. } => 2.0,
            Geometry::Rectangle { lx, ly } => 2.0 * (lx + ly),
        }
    }

    /// Collocation nodes of one axis.
    pub fn axis_nodes(&self, axis: usize) -> &[f64] {
        &self.axes[axis].nodes
    }

    pub fn fine_axis_nodes(&self, axis: usize) -> &[f64] {
        &self.axes[axis].fine_nodes
    }

    /// Number of intervals of the oversampled grid on each axis.
    pub fn fine_sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.fine).collect()
    }

    fn tensor_points(per_axis: Vec<&[f64]>) -> Vec<Vec<f64>> {
        match per_axis.len() {
            1 => per_axis[0].iter().map(|&x| vec![x]).collect(),
            _ => {
                let mut out = Vec::with_capacity(per_axis[0].len() * per_axis[1].len());
                for &x in per_axis[0] {
                    for &y in per_axis[1] {
                        out.push(vec![x, y]);
                    }
                }
                out
            }
        }
    }

    /// Collocation points in row-major order.
    pub fn grid_points(&self) -> Vec<Vec<f64>> {
        Self::tensor_points(self.axes.iter().map(|a| a.nodes.as_slice()).collect())
    }

    pub fn fine_points(&self) -> Vec<Vec<f64>> {
        Self::tensor_points(self.axes.iter().map(|a| a.fine_nodes.as_slice()).collect())
    }

    /// Forward transform of collocation values into the solution basis.
    pub fn transform(self: &Arc<Self>, values: &[f64]) -> Result<GridFunction> {
        let expected: usize = self.axes.iter().map(|a| a.nodes.len()).product();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        let mats: Vec<&DMatrix<f64>> = self.axes.iter().map(|a| &a.from_nodes).collect();
        Ok(GridFunction {
            domain: Arc::clone(self),
            parity: self.solution_parity(),
            coeffs: apply_separable(&mats, values),
        })
    }

    /// Samples a function of position on the collocation grid and transforms it.
    pub fn sample(self: &Arc<Self>, f: impl Fn(&[f64]) -> f64) -> GridFunction {
        let values: Vec<f64> = self.grid_points().iter().map(|p| f(p)).collect();
        self.transform(&values).expect("grid sized by construction")
    }

    /// Projects values on the oversampled grid onto a series with the given parity.
    pub fn from_fine(self: &Arc<Self>, parity: [Parity; 2], values: &[f64]) -> Result<GridFunction> {
        let expected: usize = self.axes.iter().map(|a| a.fine + 1).product();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        let mats: Vec<&DMatrix<f64>> = self
            .axes
            .iter()
            .enumerate()
            .map(|(i, a)| &a.from_fine[parity[i].slot()])
            .collect();
        Ok(GridFunction {
            domain: Arc::clone(self),
            parity,
            coeffs: apply_separable(&mats, values),
        })
    }
}

/// A series on a spectral domain, stored by coefficients.
#[derive(Clone, Debug)]
pub struct GridFunction {
    domain: Arc<SpectralDomain>,
    parity: [Parity; 2],
    coeffs: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(domain: &Arc<SpectralDomain>) -> GridFunction {
        let parity = domain.solution_parity();
        Self::zeros_with(domain, parity)
    }

    pub fn zeros_with(domain: &Arc<SpectralDomain>, parity: [Parity; 2]) -> GridFunction {
        GridFunction {
            domain: Arc::clone(domain),
            parity,
            coeffs: vec![0.0; domain.len_for(parity)],
        }
    }

    /// Wraps a coefficient vector in the solution basis.
    pub fn from_coeffs(domain: &Arc<SpectralDomain>, coeffs: Vec<f64>) -> Result<GridFunction> {
        let parity = domain.solution_parity();
        Self::from_coeffs_with(domain, parity, coeffs)
    }

    pub fn from_coeffs_with(
        domain: &Arc<SpectralDomain>,
        parity: [Parity; 2],
        coeffs: Vec<f64>,
    ) -> Result<GridFunction> {
        let expected = domain.len_for(parity);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(GridFunction {
            domain: Arc::clone(domain),
            parity,
            coeffs,
        })
    }

    pub fn domain(&self) -> &Arc<SpectralDomain> {
        &self.domain
    }

    pub fn parity(&self) -> [Parity; 2] {
        self.parity
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    fn check_same(&self, other: &GridFunction) -> Result<()> {
        if Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    fn dims(&self) -> usize {
        self.domain.dims()
    }

    /// Values on the domain's collocation grid.
    pub fn inverse_transform(&self) -> Vec<f64> {
        let mats: Vec<&DMatrix<f64>> = self
            .domain
            .axes
            .iter()
            .enumerate()
            .map(|(i, a)| &a.to_nodes[self.parity[i].slot()])
            .collect();
        apply_separable(&mats, &self.coeffs)
    }

    /// Values on the oversampled closed grid.
    pub fn fine_values(&self) -> Vec<f64> {
        let mats: Vec<&DMatrix<f64>> = self
            .domain
            .axes
            .iter()
            .enumerate()
            .map(|(i, a)| &a.to_fine[self.parity[i].slot()])
            .collect();
        apply_separable(&mats, &self.coeffs)
    }

    /// Point evaluation of the series.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let ks = self.domain.wavenumbers(self.parity);
        ks.iter()
            .zip(&self.coeffs)
            .map(|(k, &c)| {
                let mut v = c;
                for (ax, &kk) in k.iter().enumerate() {
                    v *= self.parity[ax].basis(kk, x[ax], self.domain.axes[ax].length);
                }
                v
            })
            .sum()
    }

    pub fn scale(&self, alpha: f64) -> GridFunction {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= alpha);
        out
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &GridFunction) -> Result<GridFunction> {
        self.check_same(other)?;
        if self.parity != other.parity {
            return Err(Error::InvalidParameter(
                "cannot add series of different parity".into(),
            ));
        }
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += alpha * b);
        Ok(out)
    }

    /// Per-coefficient eigenvalue of -Δ for this parity.
    fn lambdas(&self) -> Vec<f64> {
        if self.parity == self.domain.solution_parity() {
            self.domain.lambdas.clone()
        } else {
            self.domain.lambdas_for(self.parity)
        }
    }

    pub fn laplacian(&self) -> GridFunction {
        let mut out = self.clone();
        for (c, l) in out.coeffs.iter_mut().zip(self.lambdas()) {
            *c *= -l;
        }
        out
    }

    /// Partial derivative along one axis; flips that axis' parity.
    pub fn derivative(&self, axis: usize) -> GridFunction {
        let mut parity = self.parity;
        parity[axis] = parity[axis].flip();
        let dom = &self.domain;
        let new_shape = dom.shape(parity);
        let mut out = vec![0.0; new_shape.iter().product()];
        let ax = &dom.axes[axis];
        for (ks, &c) in dom.wavenumbers(self.parity).iter().zip(&self.coeffs) {
            let k = ks[axis];
            if k == 0 {
                continue;
            }
            let factor = match self.parity[axis] {
                Parity::Sine => ax.wavenumber(k),
                Parity::Cosine => -ax.wavenumber(k),
            };
            let mut flat = 0;
            for d in 0..ks.len() {
                let first = parity[d].first();
                flat = flat * new_shape[d] + (ks[d] - first);
            }
            out[flat] += factor * c;
        }
        GridFunction {
            domain: Arc::clone(dom),
            parity,
            coeffs: out,
        }
    }

    pub fn gradient(&self) -> Vec<GridFunction> {
        (0..self.dims()).map(|ax| self.derivative(ax)).collect()
    }

    /// Basis norms squared in storage order.
    fn basis_norms(&self) -> Vec<f64> {
        self.domain
            .wavenumbers(self.parity)
            .iter()
            .map(|ks| {
                ks.iter()
                    .enumerate()
                    .map(|(ax, &k)| self.domain.axes[ax].norm_sq(self.parity[ax], k))
                    .product()
            })
            .collect()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0).expect("order zero is valid")
    }

    /// `(Σ (1+λ_m)^s c_m² ‖φ_m‖²)^{1/2}`.
    pub fn sobolev_norm(&self, order: f64) -> Result<f64> {
        if !(order >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Sobolev order must be nonnegative, got {order}"
            )));
        }
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(self.lambdas())
            .zip(self.basis_norms())
            .map(|((&c, l), n)| (1.0 + l).powf(order) * c * c * n)
            .sum();
        Ok(sum.sqrt())
    }

    /// Exact spatial average of the series.
    pub fn mean(&self) -> f64 {
        self.domain
            .wavenumbers(self.parity)
            .iter()
            .zip(&self.coeffs)
            .map(|(ks, &c)| {
                let mut v = c;
                for (ax, &k) in ks.iter().enumerate() {
                    v *= self.domain.axes[ax].mean(self.parity[ax], k);
                }
                v
            })
            .sum()
    }

    /// Removes the constant mode of a Neumann series.
    pub fn project_mean_zero(&self) -> Result<GridFunction> {
        if self.domain.bc != BoundaryKind::Neumann || self.parity != [Parity::Cosine; 2] {
            return Err(Error::InvalidBoundary {
                expected: "Neumann",
            });
        }
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        Ok(out)
    }

    /// Pseudospectral product on the oversampled grid, truncated to the retained band.
    pub fn dealiased_product(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same(other)?;
        let a = self.fine_values();
        let b = other.fine_values();
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let parity = [
            self.parity[0].times(other.parity[0]),
            self.parity[1].times(other.parity[1]),
        ];
        self.domain.from_fine(parity, &prod)
    }

    /// Projects onto another parity family using the oversampled grid.
    pub fn reproject(&self, parity: [Parity; 2]) -> GridFunction {
        if parity == self.parity {
            return self.clone();
        }
        self.domain
            .from_fine(parity, &self.fine_values())
            .expect("fine grid sized by construction")
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(n: usize) -> Arc<SpectralDomain> {
        SpectralDomain::interval(PI, BoundaryKind::Dirichlet, n).unwrap()
    }

    fn neu(n: usize) -> Arc<SpectralDomain> {
        SpectralDomain::interval(PI, BoundaryKind::Neumann, n).unwrap()
    }

    #[test]
    fn eigenvalues_of_unit_interval() {
        let d: Vec<f64> = dir(3).eigenpairs().iter().map(|e| e.lambda).collect();
        let n: Vec<f64> = neu(3).eigenpairs().iter().map(|e| e.lambda).collect();
        assert_eq!(d, vec![1.0, 4.0, 9.0]);
        assert_eq!(n, vec![0.0, 1.0, 4.0]);
        let r = SpectralDomain::rectangle(PI, PI, BoundaryKind::Dirichlet, 4, 4).unwrap();
        assert_eq!(r.eigenpairs()[0].lambda, 2.0);
        assert_eq!(r.eigenpairs()[0].wavenumbers, vec![1, 1]);
    }

    #[test]
    fn neumann_needs_two_modes() {
        assert!(SpectralDomain::interval(PI, BoundaryKind::Neumann, 1).is_err());
        assert!(SpectralDomain::interval(-1.0, BoundaryKind::Dirichlet, 4).is_err());
    }

    #[test]
    fn transforms_of_basis_functions() {
        let d = dir(8);
        let c = d.sample(|x| (2.0 * x[0]).sin());
        for (i, v) in c.coeffs().iter().enumerate() {
            let want = if i == 1 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-14);
        }
        let c = d.sample(|x| x[0].sin() + 0.5 * (3.0 * x[0]).sin());
        let want = [1.0, 0.0, 0.5, 0.0, 0.0];
        for (v, w) in c.coeffs().iter().zip(want) {
            assert!((v - w).abs() < 1e-14);
        }
        let c = neu(8).sample(|_| 1.0);
        assert!((c.coeffs()[0] - 1.0).abs() < 1e-14);
        assert!(c.coeffs()[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn round_trip_rectangle() {
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            let d = SpectralDomain::rectangle(2.0, 3.0, bc, 7, 5).unwrap();
            let coeffs: Vec<f64> = (0..d.len()).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
            let f = GridFunction::from_coeffs(&d, coeffs.clone()).unwrap();
            let back = d.transform(&f.inverse_transform()).unwrap();
            for (a, b) in back.coeffs().iter().zip(&coeffs) {
                assert!((a - b).abs() < 1e-12 * 6.0);
            }
        }
    }

    #[test]
    fn mean_zero_projection() {
        let n = neu(16);
        let f = n.sample(|x| 1.0 + x[0].cos()).project_mean_zero().unwrap();
        assert!(f.coeffs()[0].abs() < 1e-15);
        assert!((f.coeffs()[1] - 1.0).abs() < 1e-14);
        let g = n.sample(|_| 3.0).project_mean_zero().unwrap();
        assert!(g.max_abs_coeff() < 1e-14);
        let vals = f.inverse_transform();
        let p = vals.len() - 1;
        let trap: f64 = vals
            .iter()
            .enumerate()
            .map(|(j, v)| if j == 0 || j == p { 0.5 * v } else { *v })
            .sum::<f64>()
            / p as f64;
        assert!(trap.abs() < 1e-12);
        assert!(dir(4).sample(|x| x[0].sin()).project_mean_zero().is_err());
    }

    #[test]
    fn dealiased_products() {
        let d = dir(16);
        let s = d.sample(|x| x[0].sin());
        let sq = s.dealiased_product(&s).unwrap();
        assert_eq!(sq.parity(), [Parity::Cosine; 2]);
        for x in d.axis_nodes(0) {
            assert!((sq.eval(&[*x]) - x.sin().powi(2)).abs() < 1e-12);
        }
        let n = neu(16);
        let c = n.sample(|x| x[0].cos());
        let cc = c.dealiased_product(&c).unwrap();
        assert!((cc.coeffs()[0] - 0.5).abs() < 1e-14);
        assert!(cc.coeffs()[1].abs() < 1e-14);
        assert!((cc.coeffs()[2] - 0.5).abs() < 1e-14);
        let z = GridFunction::zeros(&n);
        assert_eq!(z.dealiased_product(&c).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn sine_cosine_product_keeps_band() {
        let d = dir(12);
        let a = d.sample(|x| (5.0 * x[0]).sin() + (12.0 * x[0]).sin());
        let b = a.derivative(0);
        let p = a.dealiased_product(&b).unwrap();
        // sin(ax)cos(bx) = (sin((a+b)x) + sin((a-b)x))/2; only wavenumbers <= 12 survive
        let x = 0.37;
        let exact = |x: f64| {
            let terms = [(5.0, 5.0), (5.0, 12.0), (12.0, 5.0), (12.0, 12.0)];
            terms
                .iter()
                .map(|&(p, q)| {
                    let s = |k: f64| if k.abs() <= 12.0 { (k * x).sin() } else { 0.0 };
                    q * 0.5 * (s(p + q) + s(p - q))
                })
                .sum::<f64>()
        };
        assert!((p.eval(&[x]) - exact(x)).abs() < 1e-11);
    }

    #[test]
    fn norms_and_means() {
        let d = dir(8);
        let s = d.sample(|x| x[0].sin());
        assert!((s.l2_norm() - (PI / 2.0).sqrt()).abs() < 1e-14);
        assert!((s.sobolev_norm(2.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-13);
        assert!((s.mean() - 2.0 / PI).abs() < 1e-15);
        assert!(s.sobolev_norm(-1.0).is_err());
        assert_eq!(GridFunction::zeros(&d).l2_norm(), 0.0);
    }

    #[test]
    fn spectral_laplacian_matches_finite_differences() {
        let d = dir(32);
        let f = d.sample(|x| x[0].sin() * x[0].cos().exp());
        let lap = f.laplacian().inverse_transform();
        let v = f.inverse_transform();
        let nodes = d.axis_nodes(0);
        let h = nodes[1] - nodes[0];
        let mut errs = Vec::new();
        for step in [1usize, 2] {
            let hh = h * step as f64;
            let mut err: f64 = 0.0;
            for j in 8..nodes.len() - 8 {
                let fd = (v[j + step] - 2.0 * v[j] + v[j - step]) / (hh * hh);
                err = err.max((fd - lap[j]).abs());
            }
            errs.push(err);
        }
        let ratio = errs[1] / errs[0];
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn derivative_changes_family() {
        let n = neu(10);
        let c = n.sample(|x| (3.0 * x[0]).cos());
        let dc = c.derivative(0);
        assert_eq!(dc.parity()[0], Parity::Sine);
        assert!((dc.eval(&[0.4]) + 3.0 * (1.2f64).sin()).abs() < 1e-12);
        let r = SpectralDomain::rectangle(PI, 2.0, BoundaryKind::Dirichlet, 6, 6).unwrap();
        let f = r.sample(|p| p[0].sin() * (PI * p[1] / 2.0).sin());
        let g = f.derivative(1);
        let want = p_val(0.3, 0.7);
        fn p_val(x: f64, y: f64) -> f64 {
            x.sin() * PI / 2.0 * (PI * y / 2.0).cos()
        }
        assert!((g.eval(&[0.3, 0.7]) - want).abs() < 1e-12);
    }
}
