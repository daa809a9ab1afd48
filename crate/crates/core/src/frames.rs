//! Orthonormal families `{φ_n}` tabulated on a measure space.
//!
//! The choice of family is the quantization: every downstream object
//! (coherent states, operators, symbols) is computed from the table of
//! point evaluations `φ_n(x_i)` and the weights of the underlying space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::spaces::{ComplexSum, MeasureSpace, Point, SpaceKind};
use crate::{CMatrix, CVector, Error, Result};

/// Orthonormality tolerance for spaces with exact integration.
pub const EXACT_TOL: f64 = 1e-12;
/// Orthonormality tolerance for quadrature-truncated spaces.
pub const APPROX_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Two orthonormal vectors `α, β ∈ ℂ^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorPair {
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

impl VectorPair {
    pub const TOL: f64 = 1e-12;

    pub fn new(alpha: Vec<Complex64>, beta: Vec<Complex64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::LengthMismatch {
                expected: alpha.len(),
                found: beta.len(),
            });
        }
        if alpha.is_empty() {
            return Err(Error::InvalidArgument("vector pair needs at least one component".into()));
        }
        let pair = Self { alpha, beta };
        let defect = pair.orthonormality_defect();
        if !(defect <= Self::TOL) {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(pair)
    }

    pub fn from_real(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        Self::new(
            alpha.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            beta.iter().map(|&b| Complex64::new(b, 0.0)).collect(),
        )
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|z| z.im == 0.0)
    }

    /// `max(|‖α‖²−1|, |‖β‖²−1|, |⟨α,β⟩|)`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut na = ComplexSum::default();
        let mut nb = ComplexSum::default();
        let mut ab = ComplexSum::default();
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            na.add(Complex64::new(a.norm_sqr(), 0.0));
            nb.add(Complex64::new(b.norm_sqr(), 0.0));
            ab.add(a * b.conj());
        }
        (na.value().re - 1.0)
            .abs()
            .max((nb.value().re - 1.0).abs())
            .max(ab.value().norm())
    }

    /// `|α_i|² + |β_i|²`, the weight of atom `i` in the resolution of unity.
    pub fn weight(&self, i: usize) -> f64 {
        self.alpha[i].norm_sqr() + self.beta[i].norm_sqr()
    }
}

/// Two columns of a Haar-random unitary: a seeded complex Gaussian `n×2`
/// matrix orthonormalized by Gram–Schmidt (with reorthogonalization).
pub fn random_pair(n: usize, seed: u64) -> Result<VectorPair> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("pair dimension must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    };
    let a: Vec<Complex64> = (0..n).map(|_| draw()).collect();
    let b: Vec<Complex64> = (0..n).map(|_| draw()).collect();
    let (alpha, beta) = orthonormalize(a, b);
    VectorPair::new(alpha, beta)
}

/// Real counterpart of [`random_pair`].
pub fn random_real_pair(n: usize, seed: u64) -> Result<VectorPair> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("pair dimension must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, 0.0)
    };
    let a: Vec<Complex64> = (0..n).map(|_| draw()).collect();
    let b: Vec<Complex64> = (0..n).map(|_| draw()).collect();
    let (alpha, beta) = orthonormalize(a, b);
    VectorPair::new(alpha, beta)
}

fn orthonormalize(mut a: Vec<Complex64>, mut b: Vec<Complex64>) -> (Vec<Complex64>, Vec<Complex64>) {
    fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
        // ⟨u, v⟩ antilinear in u
        u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
    }
    fn normalize(u: &mut [Complex64]) {
        let norm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= norm);
    }
    normalize(&mut a);
    normalize(&mut a);
    for _ in 0..2 {
        let c = inner(&a, &b);
        b.iter_mut().zip(&a).for_each(|(y, x)| *y -= c * x);
        normalize(&mut b);
    }
    (a, b)
}

/// Which orthonormal family a frame tabulates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// `φ_α = Σ α_i a_i^{-1/2} χ_{x_i}`, `φ_β` likewise, on a finite set.
    Pair(VectorPair),
    /// `1` and the dyadic Haar wavelets `2^{j/2} h(2^j x − k)`, `0 ≤ j ≤ scale`.
    Haar { scale: i32 },
    /// `1` and `√2 sin 2πx`.
    Trig,
    /// `z^n / √(n!)`, `0 ≤ n ≤ n_max`.
    Fock { n_max: usize },
}

/// An orthonormal family evaluated at the points of a measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    space: MeasureSpace,
    family: Family,
    values: CMatrix,
    labels: Vec<String>,
    gram_defect: f64,
}

impl Frame {
    fn build(space: MeasureSpace, family: Family, labels: Vec<String>) -> Result<Self> {
        let n_basis = labels.len();
        if n_basis > space.len() {
            return Err(Error::InvalidArgument(format!(
                "{n_basis} basis functions exceed {} points",
                space.len()
            )));
        }
        let mut frame = Self {
            values: DMatrix::from_element(n_basis, space.len(), ZERO),
            space,
            family,
            labels,
            gram_defect: 0.0,
        };
        for (i, p) in frame.space.points().iter().enumerate() {
            let col = frame.eval(p)?;
            frame.values.set_column(i, &col);
        }
        let g = frame.gram();
        frame.gram_defect = max_abs_deviation_from_identity(&g);
        Ok(frame)
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Entry `(n, i)` is `φ_n(x_i)`.
    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_basis(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_points(&self) -> usize {
        self.values.ncols()
    }

    /// `‖G − I‖_max` measured at construction.
    pub fn gram_defect(&self) -> f64 {
        self.gram_defect
    }

    /// Orthonormality tolerance implied by the space.
    pub fn tolerance(&self) -> f64 {
        if self.space.is_exact() {
            EXACT_TOL
        } else {
            APPROX_TOL
        }
    }

    /// `G_{mn} = Σ_i w_i φ_m(x_i) conj(φ_n(x_i))`.
    pub fn gram(&self) -> CMatrix {
        let n = self.n_basis();
        let w = self.space.weights();
        DMatrix::from_fn(n, n, |m, k| {
            let mut acc = ComplexSum::default();
            for (i, wi) in w.iter().enumerate() {
                acc.add(self.values[(m, i)] * self.values[(k, i)].conj() * *wi);
            }
            acc.value()
        })
    }

    /// `N(x_i) = Σ_n |φ_n(x_i)|²` at every node.
    pub fn node_normalizations(&self) -> Vec<f64> {
        self.values
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// `(φ_n(x))_n` at an arbitrary point of the family's domain.
    pub fn eval(&self, x: &Point) -> Result<CVector> {
        match (&self.family, x) {
            (Family::Pair(pair), Point::Atom(atom)) => {
                let i = self
                    .space
                    .atom_position(atom.label)
                    .ok_or_else(|| Error::PointOutOfDomain(x.to_string()))?;
                let s = self.space.weights()[i].sqrt();
                Ok(CVector::from_vec(vec![pair.alpha[i] / s, pair.beta[i] / s]))
            }
            (Family::Haar { scale }, Point::Real(t)) => {
                check_unit(*t, x)?;
                Ok(haar_values(*scale, *t))
            }
            (Family::Trig, Point::Real(t)) => {
                check_unit(*t, x)?;
                let s = std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * t).sin();
                Ok(CVector::from_vec(vec![ONE, Complex64::new(s, 0.0)]))
            }
            (Family::Fock { n_max }, Point::Complex(z)) => {
                let mut v = Vec::with_capacity(n_max + 1);
                let mut term = ONE;
                v.push(term);
                for n in 1..=*n_max {
                    term = term * z / (n as f64).sqrt();
                    v.push(term);
                }
                Ok(CVector::from_vec(v))
            }
            _ => Err(Error::PointOutOfDomain(x.to_string())),
        }
    }

    fn check_gram(self) -> Result<Self> {
        let tol = self.tolerance();
        if self.gram_defect <= tol {
            Ok(self)
        } else if self.space.kind() == SpaceKind::ComplexPlane {
            Err(Error::TruncationTooLarge {
                defect: self.gram_defect,
                tol,
            })
        } else {
            Err(Error::NotOrthonormal {
                defect: self.gram_defect,
            })
        }
    }
}

fn check_unit(t: f64, x: &Point) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::PointOutOfDomain(x.to_string()))
    }
}

pub(crate) fn max_abs_deviation_from_identity(g: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..g.nrows() {
        for n in 0..g.ncols() {
            let target = if m == n { ONE } else { ZERO };
            worst = worst.max((g[(m, n)] - target).norm());
        }
    }
    worst
}

/// Haar family up to `scale` evaluated at `t ∈ [0, 1]`.
///
/// Right-continuous at breakpoints; `t = 1` is attached to the last cell.
fn haar_values(scale: i32, t: f64) -> CVector {
    let mut v = vec![ONE];
    if scale >= 0 {
        let level = scale as u32 + 1;
        let cells = 1usize << level;
        let cell = ((t * cells as f64).floor() as usize).min(cells - 1);
        for j in 0..=scale as u32 {
            let amp = 2f64.powf(j as f64 / 2.0);
            // each wavelet at scale j spans 2^{level-j} fine cells
            let span = 1usize << (level - j);
            let k_here = cell / span;
            let first_half = cell % span < span / 2;
            for k in 0..(1usize << j) {
                let val = if k != k_here {
                    0.0
                } else if first_half {
                    amp
                } else {
                    -amp
                };
                v.push(Complex64::new(val, 0.0));
            }
        }
    }
    CVector::from_vec(v)
}

/// The pair family of a finite set: `φ_α(x_i) = α_i/√a_i`, `φ_β(x_i) = β_i/√a_i`.
pub fn frame_from_pair(space: &MeasureSpace, pair: &VectorPair) -> Result<Frame> {
    if space.kind() != SpaceKind::FiniteSet {
        return Err(Error::WrongSpaceKind { expected: "FiniteSet" });
    }
    if pair.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            found: pair.len(),
        });
    }
    let defect = pair.orthonormality_defect();
    if !(defect <= VectorPair::TOL) {
        return Err(Error::NotOrthonormal { defect });
    }
    Frame::build(
        space.clone(),
        Family::Pair(pair.clone()),
        vec!["alpha".into(), "beta".into()],
    )?
    .check_gram()
}

/// `{1} ∪ {2^{j/2} h(2^j x − k) : 0 ≤ j ≤ scale, 0 ≤ k < 2^j}`, `2^{scale+1}` functions.
pub fn haar_frame(space: &MeasureSpace, scale: i32) -> Result<Frame> {
    if space.kind() != SpaceKind::Interval {
        return Err(Error::WrongSpaceKind { expected: "Interval" });
    }
    if scale < -1 {
        return Err(Error::InvalidArgument(format!("Haar scale must be >= -1, got {scale}")));
    }
    let level = space.dyadic_level().unwrap_or(0);
    if scale >= 0 && level < scale as u32 + 1 {
        return Err(Error::PartitionTooCoarse { space: level, scale });
    }
    let mut labels = vec!["1".to_string()];
    if scale >= 0 {
        for j in 0..=scale {
            for k in 0..(1 << j) {
                labels.push(format!("psi[{j},{k}]"));
            }
        }
    }
    Frame::build(space.clone(), Family::Haar { scale }, labels)?.check_gram()
}

/// `{1, √2 sin 2πx}` on the unit interval.
pub fn trig_frame(space: &MeasureSpace) -> Result<Frame> {
    if space.kind() != SpaceKind::Interval {
        return Err(Error::WrongSpaceKind { expected: "Interval" });
    }
    Frame::build(space.clone(), Family::Trig, vec!["1".into(), "sqrt2_sin_2pi_x".into()])?.check_gram()
}

/// `{z^n/√(n!) : 0 ≤ n ≤ n_max}` on the truncated Gaussian plane.
///
/// The truncation is adequate when `radius² ≥ 2(n_max + 35)`; otherwise
/// the Gram defect usually exceeds [`APPROX_TOL`] and construction fails.
pub fn fock_frame(space: &MeasureSpace, n_max: usize) -> Result<Frame> {
    if space.kind() != SpaceKind::ComplexPlane {
        return Err(Error::WrongSpaceKind { expected: "ComplexPlane" });
    }
    let labels = (0..=n_max).map(|n| format!("n={n}")).collect();
    Frame::build(space.clone(), Family::Fock { n_max }, labels)?.check_gram()
}

/// JSON form of a frame: complex entries as `[re, im]`, row-major values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDocument {
    pub space: MeasureSpace,
    pub family: Family,
    pub labels: Vec<String>,
    pub values: Vec<Vec<[f64; 2]>>,
}

impl Frame {
    pub fn to_document(&self) -> FrameDocument {
        FrameDocument {
            space: self.space.clone(),
            family: self.family.clone(),
            labels: self.labels.clone(),
            values: self
                .values
                .row_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("frame documents are always serializable")
    }

    /// Rebuilds the frame from its family and checks the stored table against it.
    pub fn from_document(doc: &FrameDocument) -> Result<Self> {
        let frame = match &doc.family {
            Family::Pair(pair) => frame_from_pair(&doc.space, pair)?,
            Family::Haar { scale } => haar_frame(&doc.space, *scale)?,
            Family::Trig => trig_frame(&doc.space)?,
            Family::Fock { n_max } => fock_frame(&doc.space, *n_max)?,
        };
        if doc.values.len() != frame.n_basis() {
            return Err(Error::LengthMismatch {
                expected: frame.n_basis(),
                found: doc.values.len(),
            });
        }
        for (m, row) in doc.values.iter().enumerate() {
            if row.len() != frame.n_points() {
                return Err(Error::LengthMismatch {
                    expected: frame.n_points(),
                    found: row.len(),
                });
            }
            for (i, [re, im]) in row.iter().enumerate() {
                let stored = Complex64::new(*re, *im);
                if (stored - frame.values[(m, i)]).norm() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "tabulated value ({m}, {i}) disagrees with the {:?} family",
                        doc.family
                    )));
                }
            }
        }
        Ok(frame)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: FrameDocument =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad frame JSON: {e}")))?;
        Self::from_document(&doc)
    }
}
