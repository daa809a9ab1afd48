//! Measure spaces as weighted point sets.
//!
//! Finite sets carry their Dirac masses exactly. The unit interval is
//! discretized with a composite Gauss–Legendre rule aligned on the dyadic
//! grid, so that every cell lies strictly inside an interval where Haar
//! functions are constant. The complex plane with the Gaussian measure
//! `π⁻¹ e^{-|z|²} d²z` is truncated to a disk and sampled on a polar grid.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    FiniteSet,
    Interval,
    ComplexPlane,
}

/// A labeled atom of a finite set, optionally carrying a real coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub label: usize,
    pub coord: Option<f64>,
}

impl Atom {
    pub fn new(label: usize) -> Self {
        Self { label, coord: None }
    }

    pub fn with_coord(label: usize, coord: f64) -> Self {
        Self { label, coord: Some(coord) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Real(f64),
    Atom(Atom),
    Complex(Complex64),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "x={x}"),
            Point::Atom(a) => write!(f, "atom #{}", a.label),
            Point::Complex(z) => write!(f, "z={z}"),
        }
    }
}

/// A finite weighted point set standing for `(X, μ)`.
///
/// For [`SpaceKind::FiniteSet`] the weights are the Dirac masses `a_i`; for
/// the other kinds they are quadrature weights that already include the
/// density of `μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpace {
    points: Vec<Point>,
    weights: Vec<f64>,
    kind: SpaceKind,
    exact: bool,
    /// Number of dyadic cells is `2^dyadic_level` (interval spaces only).
    dyadic_level: Option<u32>,
    nodes_per_cell: Option<usize>,
    radius: Option<f64>,
    tail_bound: f64,
}

/// Neumaier's variant of Kahan summation, fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated complex accumulator (real and imaginary parts summed apart).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the three-term recurrence, started from the
/// Tricomi approximation of the roots.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A finite set with Dirac masses `μ = Σ a_i δ_{x_i}`.
pub fn finite_space(labels: &[Atom], masses: &[f64]) -> Result<MeasureSpace> {
    if labels.len() != masses.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: masses.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("finite space needs at least one atom".into()));
    }
    let mut seen = HashSet::new();
    for (i, (atom, &mass)) in labels.iter().zip(masses).enumerate() {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonPositiveMass { index: i, mass });
        }
        if !seen.insert(atom.label) {
            return Err(Error::DuplicateLabel(atom.label));
        }
    }
    Ok(MeasureSpace {
        points: labels.iter().copied().map(Point::Atom).collect(),
        weights: masses.to_vec(),
        kind: SpaceKind::FiniteSet,
        exact: true,
        dyadic_level: None,
        nodes_per_cell: None,
        radius: None,
        tail_bound: 0.0,
    })
}

/// `n` atoms labeled `1..=n` with coordinates `x_i = i`, all of unit mass.
pub fn uniform_finite_space(n: usize) -> Result<MeasureSpace> {
    let atoms: Vec<Atom> = (1..=n).map(|i| Atom::with_coord(i, i as f64)).collect();
    finite_space(&atoms, &vec![1.0; n])
}

/// Lebesgue measure on `[0, 1]` via per-cell Gauss–Legendre on the
/// `2^{scale_j+1}` dyadic cells.
pub fn interval_space(scale_j: u32, nodes_per_cell: usize) -> Result<MeasureSpace> {
    if nodes_per_cell == 0 {
        return Err(Error::InvalidArgument("nodes_per_cell must be at least 1".into()));
    }
    if scale_j > 24 {
        return Err(Error::InvalidArgument(format!("scale {scale_j} is too fine")));
    }
    let level = scale_j + 1;
    let cells = 1usize << level;
    let width = 1.0 / cells as f64;
    let (ref_nodes, ref_weights) = gauss_legendre(nodes_per_cell);
    let mut points = Vec::with_capacity(cells * nodes_per_cell);
    let mut weights = Vec::with_capacity(cells * nodes_per_cell);
    for c in 0..cells {
        let left = c as f64 * width;
        for (t, w) in ref_nodes.iter().zip(&ref_weights) {
            points.push(Point::Real(left + 0.5 * width * (t + 1.0)));
            weights.push(0.5 * width * w);
        }
    }
    Ok(MeasureSpace {
        points,
        weights,
        kind: SpaceKind::Interval,
        exact: true,
        dyadic_level: Some(level),
        nodes_per_cell: Some(nodes_per_cell),
        radius: None,
        tail_bound: 0.0,
    })
}

/// The Gaussian plane truncated to `|z| ≤ radius`.
///
/// Gauss–Legendre in the radius, uniform (trapezoidal) in the angle. The
/// missing mass `e^{-radius²}` is reported as the tail bound.
pub fn plane_space(radius: f64, radial_nodes: usize, angular_nodes: usize) -> Result<MeasureSpace> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if radial_nodes == 0 {
        return Err(Error::InvalidArgument("radial_nodes must be at least 1".into()));
    }
    if angular_nodes < 4 {
        return Err(Error::InvalidArgument("angular_nodes must be at least 4".into()));
    }
    let (ref_nodes, ref_weights) = gauss_legendre(radial_nodes);
    let mut points = Vec::with_capacity(radial_nodes * angular_nodes);
    let mut weights = Vec::with_capacity(radial_nodes * angular_nodes);
    let dtheta = 2.0 * PI / angular_nodes as f64;
    for (t, w) in ref_nodes.iter().zip(&ref_weights) {
        let r = 0.5 * radius * (t + 1.0);
        // (1/π) e^{-r²} r dr dθ
        let radial_weight = 0.5 * radius * w * r * (-r * r).exp() / PI * dtheta;
        for k in 0..angular_nodes {
            let theta = k as f64 * dtheta;
            points.push(Point::Complex(Complex64::from_polar(r, theta)));
            weights.push(radial_weight);
        }
    }
    Ok(MeasureSpace {
        points,
        weights,
        kind: SpaceKind::ComplexPlane,
        exact: false,
        dyadic_level: None,
        nodes_per_cell: None,
        radius: Some(radius),
        tail_bound: (-radius * radius).exp(),
    })
}

impl MeasureSpace {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether integration of the intended function class is exact.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn dyadic_level(&self) -> Option<u32> {
        self.dyadic_level
    }

    pub fn nodes_per_cell(&self) -> Option<usize> {
        self.nodes_per_cell
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// Measure missing from the truncated domain (zero for exact spaces).
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Position of the atom with the given label (finite sets only).
    pub fn atom_position(&self, label: usize) -> Option<usize> {
        self.points
            .iter()
            .position(|p| matches!(p, Point::Atom(a) if a.label == label))
    }

    /// `Σ_i w_i f_i` for values given at every point.
    pub fn integrate(&self, values: &[Complex64]) -> Result<Complex64> {
        if values.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                found: values.len(),
            });
        }
        let mut acc = ComplexSum::default();
        for (w, v) in self.weights.iter().zip(values) {
            acc.add(v * *w);
        }
        Ok(acc.value())
    }

    /// `∫ f dμ` for a pointwise function; `None` marks a point where `f` is undefined.
    pub fn integrate_fn<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(&Point) -> Option<Complex64>,
    {
        let mut acc = ComplexSum::default();
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = f(p).ok_or_else(|| Error::PointOutOfDomain(p.to_string()))?;
            acc.add(v * *w);
        }
        Ok(acc.value())
    }
}
