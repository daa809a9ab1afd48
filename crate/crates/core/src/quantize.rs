//! The quantization map `f ↦ A_f`, lower symbols, spectra and the
//! two-level symbol calculus of a vector pair on a finite set.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::coherent_state;
use crate::frames::{Family, Frame, VectorPair};
use crate::linalg::{hermitian_defect, hermitian_eigen};
use crate::spaces::{ComplexSum, CompensatedSum, MeasureSpace, Point};
use crate::{CMatrix, Error, Result};

/// Hermiticity threshold for operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Observables with all `|Im f| ≤ REAL_TOL` are flagged real.
pub const REAL_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A classical function given by its values on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    values: Vec<Complex64>,
    real: bool,
}

impl Observable {
    pub fn new(values: Vec<Complex64>) -> Self {
        let real = values.iter().all(|z| z.im.abs() <= REAL_TOL);
        Self { values, real }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| c(v, 0.0)).collect())
    }

    /// Samples `f` at every point of the space.
    pub fn sample<F: Fn(&Point) -> Complex64>(space: &MeasureSpace, f: F) -> Self {
        Self::new(space.points().iter().map(f).collect())
    }

    /// Samples a real function of the interval coordinate.
    pub fn sample_real<F: Fn(f64) -> f64>(space: &MeasureSpace, f: F) -> Result<Self> {
        let values = space
            .points()
            .iter()
            .map(|p| match p {
                Point::Real(x) => Ok(c(f(*x), 0.0)),
                Point::Atom(a) => a
                    .coord
                    .map(|x| c(f(x), 0.0))
                    .ok_or_else(|| Error::PointOutOfDomain(p.to_string())),
                Point::Complex(_) => Err(Error::PointOutOfDomain(p.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(values))
    }

    pub fn constant(space: &MeasureSpace, value: f64) -> Self {
        Self::from_real(&vec![value; space.len()])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// `(min f, max f)` of the real parts.
    pub fn real_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)))
    }
}

/// A dense square matrix acting on the span of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    hermitian: bool,
}

impl Operator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let hermitian = hermitian_defect(&matrix) <= HERMITIAN_TOL;
        Ok(Self { matrix, hermitian })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
            hermitian: true,
        }
    }

    /// Pauli matrix `σ_k`, `k = 0..=3`, with `σ_0 = I`.
    pub fn pauli(k: usize) -> Self {
        let m = match k {
            0 => [c(1.0, 0.0), ZERO, ZERO, c(1.0, 0.0)],
            1 => [ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO],
            2 => [ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO],
            3 => [c(1.0, 0.0), ZERO, ZERO, c(-1.0, 0.0)],
            _ => panic!("Pauli index {k} out of range"),
        };
        Self {
            matrix: CMatrix::from_row_slice(2, 2, &m),
            hermitian: true,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Row-major `[re, im]` nested arrays.
    pub fn to_nested(&self) -> Vec<Vec<[f64; 2]>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }
}

/// `(A_f)_{mn} = Σ_i w_i f(x_i) φ_m(x_i) conj(φ_n(x_i))`, i.e.
/// `∫ f(x) |x⟩⟨x| N(x) μ(dx)` in the basis `{|n⟩}`.
pub fn quantize(frame: &Frame, f: &Observable) -> Result<Operator> {
    if f.len() != frame.n_points() {
        return Err(Error::DimensionMismatch {
            left: frame.n_points(),
            right: f.len(),
        });
    }
    let n = frame.n_basis();
    let w = frame.space().weights();
    let phi = frame.values();
    let weighted: Vec<Complex64> = f.values().iter().zip(w).map(|(v, wi)| v * *wi).collect();
    let mut m = CMatrix::from_fn(n, n, |r, k| {
        let mut acc = ComplexSum::default();
        for (i, fw) in weighted.iter().enumerate() {
            acc.add(fw * phi[(r, i)] * phi[(k, i)].conj());
        }
        acc.value()
    });
    if f.is_real() {
        // the two triangles are the same sums up to rounding; make them agree exactly
        for r in 0..n {
            m[(r, r)].im = 0.0;
            for k in (r + 1)..n {
                m[(k, r)] = m[(r, k)].conj();
            }
        }
    }
    Operator::new(m)
}

/// `⟨x|A|x⟩`.
pub fn lower_symbol(frame: &Frame, op: &Operator, x: &Point) -> Result<Complex64> {
    if op.dim() != frame.n_basis() {
        return Err(Error::DimensionMismatch {
            left: frame.n_basis(),
            right: op.dim(),
        });
    }
    let state = coherent_state(frame, x)?;
    let v = state.coeffs();
    let value = v.dotc(&(op.matrix() * v));
    Ok(if op.is_hermitian() { c(value.re, 0.0) } else { value })
}

fn pair_of(frame: &Frame) -> Result<&VectorPair> {
    match frame.family() {
        Family::Pair(p) => Ok(p),
        _ => Err(Error::WrongFrameKind { expected: "Pair" }),
    }
}

/// The stochastic matrix `ϖ` with `⟨x_l|A_f|x_l⟩ = Σ_i ϖ_{li} f(x_i)`.
pub fn transition_matrix(frame: &Frame) -> Result<DMatrix<f64>> {
    let pair = pair_of(frame)?;
    let (a, b) = (pair.alpha(), pair.beta());
    let n = pair.len();
    let mut out = DMatrix::zeros(n, n);
    for l in 0..n {
        let denom = pair.weight(l);
        if !(denom > 0.0) {
            return Err(Error::ZeroNormalization(format!("atom at position {l}")));
        }
        for i in 0..n {
            out[(l, i)] = if i == l {
                denom
            } else {
                (a[l].conj() * a[i] + b[l].conj() * b[i]).norm_sqr() / denom
            };
        }
    }
    Ok(out)
}

/// `⟨f⟩₊`, `⟨f⟩₋` and the off-diagonal `Σ α_i conj(β_i) f(x_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub plus: f64,
    pub minus: f64,
    pub offdiag: Complex64,
}

impl Averages {
    /// `⟨f⟩₊ σ₀ + ⟨f⟩₋ σ₃ + Re(o) σ₁ − Im(o) σ₂`.
    pub fn reassemble(&self) -> CMatrix {
        let o = self.offdiag;
        Operator::pauli(0).into_matrix() * c(self.plus, 0.0)
            + Operator::pauli(3).into_matrix() * c(self.minus, 0.0)
            + Operator::pauli(1).into_matrix() * c(o.re, 0.0)
            - Operator::pauli(2).into_matrix() * c(o.im, 0.0)
    }

    /// `⟨f⟩₊ ± √(⟨f⟩₋² + |o|²)`, ascending.
    pub fn outcomes(&self) -> (f64, f64) {
        let r = self.minus.hypot(self.offdiag.norm());
        (self.plus - r, self.plus + r)
    }
}

pub fn averages(pair: &VectorPair, f: &Observable) -> Result<Averages> {
    if f.len() != pair.len() {
        return Err(Error::DimensionMismatch {
            left: pair.len(),
            right: f.len(),
        });
    }
    if !f.is_real() {
        return Err(Error::InvalidArgument("averages need a real observable".into()));
    }
    let mut plus = CompensatedSum::default();
    let mut minus = CompensatedSum::default();
    let mut off = ComplexSum::default();
    for ((a, b), v) in pair.alpha().iter().zip(pair.beta()).zip(f.values()) {
        let fv = v.re;
        plus.add(0.5 * (a.norm_sqr() + b.norm_sqr()) * fv);
        minus.add(0.5 * (a.norm_sqr() - b.norm_sqr()) * fv);
        off.add(a * b.conj() * fv);
    }
    Ok(Averages {
        plus: plus.value(),
        minus: minus.value(),
        offdiag: off.value(),
    })
}

/// `p_i = (|α_i|² + |β_i|²)/2`.
pub fn outcome_probabilities(pair: &VectorPair) -> Vec<f64> {
    (0..pair.len()).map(|i| 0.5 * pair.weight(i)).collect()
}

/// Eigenvalues `(λ₋, λ₊)` of a hermitian 2×2 operator in the shifted
/// closed form `t ± √(d² + |o|²)`.
pub fn spectrum2(op: &Operator) -> Result<(f64, f64)> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch { left: 2, right: op.dim() });
    }
    if !op.is_hermitian() {
        return Err(Error::NotHermitian {
            defect: hermitian_defect(op.matrix()),
        });
    }
    let m = op.matrix();
    let t = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let d = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let r = d.hypot(m[(0, 1)].norm());
    Ok((t - r, t + r))
}

/// Ascending eigenvalues of a hermitian operator (cyclic Jacobi).
pub fn spectrum(op: &Operator) -> Result<Vec<f64>> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian {
            defect: hermitian_defect(op.matrix()),
        });
    }
    Ok(hermitian_eigen(op.matrix(), HERMITIAN_TOL)?.values)
}

/// A real coefficient matrix with its numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub entries: DMatrix<f64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl CoefficientMatrix {
    fn new(entries: DMatrix<f64>) -> Self {
        let svd = entries.clone().svd(false, false);
        let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let rank = numerical_rank(&singular_values, entries.nrows().max(entries.ncols()));
        Self {
            entries,
            rank,
            singular_values,
        }
    }
}

/// Number of singular values above `max(4, dim) · ε · σ_max`.
fn numerical_rank(singular_values: &[f64], dim: usize) -> usize {
    let smax = singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = dim.max(4) as f64 * f64::EPSILON * smax;
    singular_values.iter().filter(|&&s| s > threshold).count()
}

/// The `4×N` matrix with rows `|α_i|²`, `|β_i|²`, `Re(α_i β̄_i)`, `Im(α_i β̄_i)`.
pub fn coefficient_matrix(pair: &VectorPair) -> CoefficientMatrix {
    let n = pair.len();
    let (a, b) = (pair.alpha(), pair.beta());
    let entries = DMatrix::from_fn(4, n, |r, i| match r {
        0 => a[i].norm_sqr(),
        1 => b[i].norm_sqr(),
        2 => (a[i] * b[i].conj()).re,
        _ => (a[i] * b[i].conj()).im,
    });
    CoefficientMatrix::new(entries)
}

/// Right-hand side `(A₁₁, A₂₂, Re A₁₂, Im A₁₂)` of `𝒞 f = ·` for a 2×2 target.
fn pauli_rhs(target: &Operator) -> Result<DVector<f64>> {
    if target.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: target.dim(),
        });
    }
    if !target.is_hermitian() {
        return Err(Error::NotHermitian {
            defect: hermitian_defect(target.matrix()),
        });
    }
    let m = target.matrix();
    Ok(DVector::from_vec(vec![m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].re, m[(0, 1)].im]))
}

/// Minimum-norm least-squares solution of `C f = rhs`, rejected when the
/// residual shows the system is inconsistent.
fn min_norm_solve(cm: &CoefficientMatrix, rhs: &DVector<f64>) -> Result<Vec<f64>> {
    let svd = cm.entries.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = cm.entries.nrows().max(cm.entries.ncols()).max(4) as f64 * f64::EPSILON * smax;
    let mut f = DVector::zeros(cm.entries.ncols());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > threshold {
            let coeff = u.column(k).dot(rhs) / s;
            f += vt.row(k).transpose() * coeff;
        }
    }
    let residual = (&cm.entries * &f - rhs).norm();
    if residual > 1e-9 * rhs.norm().max(1.0) {
        return Err(Error::InconsistentSystem { residual });
    }
    Ok(f.iter().copied().collect())
}

/// An upper symbol `f` with `A_f = target` for the pair frame.
///
/// Unique when `N = 4` and `det 𝒞 ≠ 0`; otherwise the minimum-norm
/// solution (several classical functions can share one operator).
pub fn upper_symbol_solve(pair: &VectorPair, target: &Operator) -> Result<Observable> {
    let rhs = pauli_rhs(target)?;
    let cm = coefficient_matrix(pair);
    Ok(Observable::from_real(&min_norm_solve(&cm, &rhs)?))
}

/// The real `N = 3` coefficient matrix and its determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct RealCoefficients3 {
    pub matrix: CoefficientMatrix,
    pub determinant: f64,
    /// `(α₁β₂ − α₂β₁)(β₁β₂ − α₁α₂)`, the closed form as usually quoted.
    pub quoted_closed_form: f64,
    /// `−(α₁β₂ − α₂β₁)(α₁α₂ + β₁β₂)`, the exact factorization of the determinant.
    pub factored_determinant: f64,
}

/// Rows `α_i²`, `β_i²`, `α_i β_i`, with the third column written through
/// normalization and orthogonality from the first two.
pub fn coefficient_matrix_real3(pair: &VectorPair) -> Result<RealCoefficients3> {
    if pair.len() != 3 {
        return Err(Error::LengthMismatch {
            expected: 3,
            found: pair.len(),
        });
    }
    if !pair.is_real() {
        return Err(Error::InvalidArgument("the N = 3 calculus needs a real pair".into()));
    }
    let a: Vec<f64> = pair.alpha().iter().map(|z| z.re).collect();
    let b: Vec<f64> = pair.beta().iter().map(|z| z.re).collect();
    #[rustfmt::skip]
    let entries = DMatrix::from_row_slice(3, 3, &[
        a[0] * a[0], a[1] * a[1], 1.0 - a[0] * a[0] - a[1] * a[1],
        b[0] * b[0], b[1] * b[1], 1.0 - b[0] * b[0] - b[1] * b[1],
        a[0] * b[0], a[1] * b[1], -a[0] * b[0] - a[1] * b[1],
    ]);
    let determinant = det3(&entries);
    let cross = a[0] * b[1] - a[1] * b[0];
    Ok(RealCoefficients3 {
        matrix: CoefficientMatrix::new(entries),
        determinant,
        quoted_closed_form: cross * (b[0] * b[1] - a[0] * a[1]),
        factored_determinant: -cross * (a[0] * a[1] + b[0] * b[1]),
    })
}

fn det3(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Upper symbol of a real symmetric 2×2 target for a real `N = 3` pair.
pub fn upper_symbol_solve_real3(pair: &VectorPair, target: &Operator) -> Result<Observable> {
    let rhs = pauli_rhs(target)?;
    if rhs[3].abs() > HERMITIAN_TOL {
        return Err(Error::InvalidArgument("target must be real symmetric".into()));
    }
    let coeffs = coefficient_matrix_real3(pair)?;
    let rhs3 = DVector::from_vec(vec![rhs[0], rhs[1], rhs[2]]);
    Ok(Observable::from_real(&min_norm_solve(&coeffs.matrix, &rhs3)?))
}

/// Lower symbols `(σ̌₀, σ̌₁, σ̌₂, σ̌₃)` of the Pauli matrices at atom position `l`.
pub fn pauli_lower_symbols(pair: &VectorPair, l: usize) -> Result<[f64; 4]> {
    if l >= pair.len() {
        return Err(Error::InvalidArgument(format!("atom position {l} out of range")));
    }
    let (a, b) = (pair.alpha()[l], pair.beta()[l]);
    let denom = pair.weight(l);
    if !(denom > 0.0) {
        return Err(Error::ZeroNormalization(format!("atom at position {l}")));
    }
    let ab = a.conj() * b;
    Ok([
        1.0,
        2.0 * ab.re / denom,
        2.0 * ab.im / denom,
        (a.norm_sqr() - b.norm_sqr()) / denom,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{fock_frame, frame_from_pair, haar_frame, random_pair, random_real_pair, trig_frame};
    use crate::linalg::max_abs_diff;
    use crate::spaces::{interval_space, plane_space, uniform_finite_space, Atom};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, SQRT_2};

    fn real2(m: [[f64; 2]; 2]) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(m[0][0], 0.0), c(m[0][1], 0.0), c(m[1][0], 0.0), c(m[1][1], 0.0)])
    }

    fn atom(label: usize) -> Point {
        Point::Atom(Atom::new(label))
    }

    fn pair_frame(n: usize, seed: u64) -> (VectorPair, Frame) {
        let pair = random_pair(n, seed).unwrap();
        let frame = frame_from_pair(&uniform_finite_space(n).unwrap(), &pair).unwrap();
        (pair, frame)
    }

    #[test]
    fn unit_quantizes_to_identity() {
        let space = interval_space(0, 16).unwrap();
        for frame in [haar_frame(&space, 0).unwrap(), trig_frame(&space).unwrap()] {
            let a = quantize(&frame, &Observable::constant(&space, 1.0)).unwrap();
            assert!(max_abs_diff(a.matrix(), &CMatrix::identity(2, 2)) <= 1e-12);
        }
    }

    #[test]
    fn haar_wavelet_quantizes_to_sigma1() {
        let space = interval_space(0, 4).unwrap();
        let frame = haar_frame(&space, 0).unwrap();
        let phi2: Vec<Complex64> = frame.values().row(1).iter().copied().collect();
        let a = quantize(&frame, &Observable::new(phi2)).unwrap();
        assert!(max_abs_diff(a.matrix(), Operator::pauli(1).matrix()) <= 1e-15);
    }

    #[test]
    fn haar_power_law_operator() {
        let space = interval_space(0, 8).unwrap();
        let frame = haar_frame(&space, 0).unwrap();
        for p in 0..=5 {
            let pf = p as f64;
            let f = Observable::sample_real(&space, |x| x.powi(p)).unwrap();
            let a = quantize(&frame, &f).unwrap();
            let off = (2f64.powf(-pf) - 1.0) / (pf + 1.0);
            let diag = 1.0 / (pf + 1.0);
            assert!(max_abs_diff(a.matrix(), &real2([[diag, off], [off, diag]])) <= 1e-14);
        }
        let f = Observable::sample_real(&space, |x| x).unwrap();
        let a = quantize(&frame, &f).unwrap();
        assert!(max_abs_diff(a.matrix(), &real2([[0.5, -0.25], [-0.25, 0.5]])) <= 1e-15);
    }

    #[test]
    fn trig_position_operator() {
        let space = interval_space(0, 16).unwrap();
        let frame = trig_frame(&space).unwrap();
        let a = quantize(&frame, &Observable::sample_real(&space, |x| x).unwrap()).unwrap();
        let off = -1.0 / (SQRT_2 * PI);
        assert!(max_abs_diff(a.matrix(), &real2([[0.5, off], [off, 0.5]])) <= 1e-13);
        let (lo, hi) = spectrum2(&a).unwrap();
        assert_abs_diff_eq!(lo, 0.5 - 1.0 / (SQRT_2 * PI), epsilon = 1e-13);
        assert_abs_diff_eq!(hi, 0.5 + 1.0 / (SQRT_2 * PI), epsilon = 1e-13);
    }

    #[test]
    fn haar_lower_symbols() {
        let space = interval_space(0, 8).unwrap();
        let frame = haar_frame(&space, 0).unwrap();
        for p in 0..=3 {
            let pf = p as f64;
            let a = quantize(&frame, &Observable::sample_real(&space, |x| x.powi(p)).unwrap()).unwrap();
            let left = lower_symbol(&frame, &a, &Point::Real(0.3)).unwrap().re;
            let right = lower_symbol(&frame, &a, &Point::Real(0.8)).unwrap().re;
            assert_abs_diff_eq!(left, 2f64.powf(-pf) / (pf + 1.0), epsilon = 1e-14);
            assert_abs_diff_eq!(right, (2.0 - 2f64.powf(-pf)) / (pf + 1.0), epsilon = 1e-14);
            let (lo, hi) = spectrum2(&a).unwrap();
            assert_abs_diff_eq!(lo, left, epsilon = 1e-14);
            assert_abs_diff_eq!(hi, right, epsilon = 1e-14);
        }
    }

    #[test]
    fn haar_dyadic_localization() {
        for scale in 0..=3i32 {
            let space = interval_space(scale as u32, 2).unwrap();
            let frame = haar_frame(&space, scale).unwrap();
            let a = quantize(&frame, &Observable::sample_real(&space, |x| x).unwrap()).unwrap();
            let cells = 1usize << (scale + 1);
            for k in 0..cells {
                let expected = (2 * k + 1) as f64 / (2 * cells) as f64;
                for frac in [0.01, 0.37, 0.5, 0.99] {
                    let x0 = (k as f64 + frac) / cells as f64;
                    let v = lower_symbol(&frame, &a, &Point::Real(x0)).unwrap().re;
                    assert_abs_diff_eq!(v, expected, epsilon = 1e-12);
                }
            }
            let spec = spectrum(&a).unwrap();
            for (k, ev) in spec.iter().enumerate() {
                assert_abs_diff_eq!(*ev, (2 * k + 1) as f64 / (2 * cells) as f64, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn trig_lower_symbol_curve() {
        let space = interval_space(0, 16).unwrap();
        let frame = trig_frame(&space).unwrap();
        let a = quantize(&frame, &Observable::sample_real(&space, |x| x).unwrap()).unwrap();
        for k in 0..=20 {
            let x0 = k as f64 / 20.0;
            let s = (2.0 * PI * x0).sin();
            let expected = 0.5 - (2.0 / PI) * s / (1.0 + 2.0 * s * s);
            assert_abs_diff_eq!(lower_symbol(&frame, &a, &Point::Real(x0)).unwrap().re, expected, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(lower_symbol(&frame, &a, &Point::Real(0.0)).unwrap().re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn transition_matrix_examples() {
        let canonical = VectorPair::from_real(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let frame = frame_from_pair(&uniform_finite_space(2).unwrap(), &canonical).unwrap();
        assert_eq!(transition_matrix(&frame).unwrap(), DMatrix::identity(2, 2));

        for seed in 0..10 {
            let (_, frame) = pair_frame(2, seed);
            let w = transition_matrix(&frame).unwrap();
            assert!((w - DMatrix::<f64>::identity(2, 2)).abs().max() <= 1e-12);
        }

        let (_, frame) = pair_frame(4, 1);
        let w = transition_matrix(&frame).unwrap();
        for row in w.row_iter() {
            assert_abs_diff_eq!(row.sum(), 1.0, epsilon = 1e-12);
            assert!(row.iter().all(|&v| v >= 0.0));
        }

        let haar = haar_frame(&interval_space(0, 2).unwrap(), 0).unwrap();
        assert!(matches!(transition_matrix(&haar), Err(Error::WrongFrameKind { .. })));

        let degenerate = VectorPair::from_real(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        let frame = frame_from_pair(&uniform_finite_space(3).unwrap(), &degenerate).unwrap();
        assert!(matches!(transition_matrix(&frame), Err(Error::ZeroNormalization(_))));
    }

    #[test]
    fn transition_matrix_reproduces_lower_symbols() {
        let (_, frame) = pair_frame(6, 4);
        let f = Observable::from_real(&[0.3, -1.0, 2.5, 4.0, 0.0, 1.1]);
        let a = quantize(&frame, &f).unwrap();
        let w = transition_matrix(&frame).unwrap();
        let wf = &w * DVector::from_vec(f.real_values());
        for l in 0..6 {
            let v = lower_symbol(&frame, &a, &atom(l + 1)).unwrap().re;
            assert_abs_diff_eq!(v, wf[l], epsilon = 1e-12);
        }
    }

    #[test]
    fn averages_examples() {
        let (pair, frame) = pair_frame(5, 8);
        let ones = Observable::constant(frame.space(), 1.0);
        let avg = averages(&pair, &ones).unwrap();
        assert_abs_diff_eq!(avg.plus, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(avg.minus, 0.0, epsilon = 1e-15);
        assert!(avg.offdiag.norm() <= 1e-15);

        let chi1 = Observable::from_real(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let avg = averages(&pair, &chi1).unwrap();
        assert_abs_diff_eq!(avg.plus, pair.weight(0) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(avg.plus, outcome_probabilities(&pair)[0], epsilon = 1e-15);

        let f = Observable::from_real(&[1.0, -2.0, 0.5, 3.0, 7.0]);
        let avg = averages(&pair, &f).unwrap();
        let a = quantize(&frame, &f).unwrap();
        assert!(max_abs_diff(&avg.reassemble(), a.matrix()) <= 1e-12);

        assert!(averages(&pair, &Observable::new(vec![c(0.0, 1.0); 5])).is_err());
    }

    #[test]
    fn spectrum2_examples() {
        let (pair, frame) = pair_frame(4, 1);
        let f = Observable::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let a = quantize(&frame, &f).unwrap();
        let (lo, hi) = spectrum2(&a).unwrap();
        let (elo, ehi) = averages(&pair, &f).unwrap().outcomes();
        assert_abs_diff_eq!(lo, elo, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, ehi, epsilon = 1e-12);
        let general = spectrum(&a).unwrap();
        assert_abs_diff_eq!(lo, general[0], epsilon = 1e-12);
        assert_abs_diff_eq!(hi, general[1], epsilon = 1e-12);

        // α on the first canonical vector, β supported on the rest: A_f diagonal
        let s = 1.0 / 3f64.sqrt();
        let pair = VectorPair::from_real(&[1.0, 0.0, 0.0, 0.0], &[0.0, s, s, s]).unwrap();
        let frame = frame_from_pair(&uniform_finite_space(4).unwrap(), &pair).unwrap();
        let f = Observable::from_real(&[5.0, 1.0, 2.0, 6.0]);
        let (lo, hi) = spectrum2(&quantize(&frame, &f).unwrap()).unwrap();
        assert_abs_diff_eq!(lo, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hi, 5.0, epsilon = 1e-14);

        let bad = Operator::new(real2([[0.0, 1.0], [0.0, 0.0]])).unwrap();
        assert!(matches!(spectrum2(&bad), Err(Error::NotHermitian { .. })));
        assert!(spectrum(&bad).is_err());
    }

    #[test]
    fn spectrum_small_cases() {
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0, 0.0), c(-3.0, 0.0), c(0.5, 0.0)]));
        assert_eq!(spectrum(&Operator::new(d).unwrap()).unwrap(), vec![-3.0, 0.5, 2.0]);
        let s = spectrum(&Operator::pauli(1)).unwrap();
        assert_abs_diff_eq!(s[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn coefficient_matrix_ranks() {
        for seed in 0..20 {
            assert!(coefficient_matrix(&random_pair(2, seed).unwrap()).rank <= 2);
            assert_eq!(coefficient_matrix(&random_pair(4, seed).unwrap()).rank, 4);
            let real = coefficient_matrix(&random_real_pair(5, seed).unwrap());
            assert!(real.entries.row(3).iter().all(|&v| v == 0.0));
            assert!(real.rank <= 3);
        }
    }

    #[test]
    fn upper_symbols_round_trip() {
        let (pair, frame) = pair_frame(4, 1);
        let s0 = upper_symbol_solve(&pair, &Operator::pauli(0)).unwrap();
        for v in s0.values() {
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-10);
        }
        for k in 0..4 {
            let target = Operator::pauli(k);
            let f = upper_symbol_solve(&pair, &target).unwrap();
            let back = quantize(&frame, &f).unwrap();
            assert!(max_abs_diff(back.matrix(), target.matrix()) <= 1e-10);
        }
        // underdetermined case: minimum-norm symbol still quantizes back
        let (pair, frame) = pair_frame(7, 2);
        let target = Operator::new(real2([[0.2, -1.0], [-1.0, 3.0]])).unwrap();
        let f = upper_symbol_solve(&pair, &target).unwrap();
        assert!(max_abs_diff(quantize(&frame, &f).unwrap().matrix(), target.matrix()) <= 1e-10);
    }

    #[test]
    fn two_atom_sigma2_is_unreachable() {
        for seed in 0..5 {
            let pair = random_pair(2, seed).unwrap();
            assert!(matches!(
                upper_symbol_solve(&pair, &Operator::pauli(2)),
                Err(Error::InconsistentSystem { .. })
            ));
        }
    }

    #[test]
    fn real3_determinant() {
        for seed in 0..100 {
            let pair = random_real_pair(3, seed).unwrap();
            let c3 = coefficient_matrix_real3(&pair).unwrap();
            assert_abs_diff_eq!(c3.determinant, c3.factored_determinant, epsilon = 1e-12);
            // the quoted form differs by the sign of α₁α₂ in its second factor
            let a: Vec<f64> = pair.alpha().iter().map(|z| z.re).collect();
            let b: Vec<f64> = pair.beta().iter().map(|z| z.re).collect();
            let cross = a[0] * b[1] - a[1] * b[0];
            assert_abs_diff_eq!(c3.quoted_closed_form - c3.factored_determinant, 2.0 * cross * b[0] * b[1], epsilon = 1e-12);
        }
        let pair = VectorPair::from_real(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        let c3 = coefficient_matrix_real3(&pair).unwrap();
        assert_eq!(c3.determinant, 0.0);
        assert_eq!(c3.factored_determinant, 0.0);
        assert_eq!(c3.quoted_closed_form, 0.0);
        assert!(coefficient_matrix_real3(&random_pair(3, 0).unwrap()).is_err());
    }

    #[test]
    fn real3_round_trips() {
        let mut checked = 0;
        for seed in 0..30 {
            let pair = random_real_pair(3, seed).unwrap();
            if coefficient_matrix_real3(&pair).unwrap().determinant.abs() <= 1e-6 {
                continue;
            }
            let frame = frame_from_pair(&uniform_finite_space(3).unwrap(), &pair).unwrap();
            for k in [0, 1, 3] {
                let target = Operator::pauli(k);
                let f = upper_symbol_solve_real3(&pair, &target).unwrap();
                let back = quantize(&frame, &f).unwrap();
                assert!(max_abs_diff(back.matrix(), target.matrix()) <= 1e-10);
            }
            checked += 1;
        }
        assert!(checked > 20);
    }

    #[test]
    fn pauli_lower_symbol_examples() {
        let canonical = VectorPair::from_real(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(pauli_lower_symbols(&canonical, 0).unwrap(), [1.0, 0.0, 0.0, 1.0]);

        for seed in 0..10 {
            let (pair, frame) = pair_frame(5, seed);
            for l in 0..5 {
                let s = pauli_lower_symbols(&pair, l).unwrap();
                for k in 0..4 {
                    let v = lower_symbol(&frame, &Operator::pauli(k), &atom(l + 1)).unwrap().re;
                    assert_abs_diff_eq!(s[k], v, epsilon = 1e-12);
                }
                assert!(s[1] * s[1] + s[2] * s[2] + s[3] * s[3] <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn quantize_rejects_bad_dimensions() {
        let (_, frame) = pair_frame(4, 0);
        assert!(matches!(
            quantize(&frame, &Observable::from_real(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(lower_symbol(&frame, &Operator::identity(3), &atom(1)).is_err());
    }

    #[test]
    fn fock_ladder_entries() {
        let space = plane_space(10.0, 400, 64).unwrap();
        let frame = fock_frame(&space, 8).unwrap();
        let z = Observable::sample(&space, |p| match p {
            Point::Complex(z) => *z,
            _ => unreachable!(),
        });
        let a = quantize(&frame, &z).unwrap();
        assert!(!a.is_hermitian());
        for n in 0..8 {
            assert_abs_diff_eq!(a.matrix()[(n, n + 1)].re, ((n + 1) as f64).sqrt(), epsilon = 1e-8);
        }
        assert!(a.matrix()[(0, 0)].norm() <= 1e-8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn quantization_is_linear(seed in 0u64..1000, s in -3.0f64..3.0, t in -3.0f64..3.0,
                                      f in proptest::collection::vec(-5.0f64..5.0, 6),
                                      g in proptest::collection::vec(-5.0f64..5.0, 6)) {
                let (_, frame) = pair_frame(6, seed);
                let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| s * x + t * y).collect();
                let lhs = quantize(&frame, &Observable::from_real(&combo)).unwrap();
                let af = quantize(&frame, &Observable::from_real(&f)).unwrap();
                let ag = quantize(&frame, &Observable::from_real(&g)).unwrap();
                let rhs = af.matrix() * c(s, 0.0) + ag.matrix() * c(t, 0.0);
                prop_assert!(max_abs_diff(lhs.matrix(), &rhs) <= 1e-12);
            }

            #[test]
            fn symbols_stay_in_range(seed in 0u64..1000, f in proptest::collection::vec(-5.0f64..5.0, 5)) {
                let (pair, frame) = pair_frame(5, seed);
                let obs = Observable::from_real(&f);
                let a = quantize(&frame, &obs).unwrap();
                prop_assert!(a.is_hermitian());
                let (lo, hi) = obs.real_range();
                let (l1, l2) = spectrum2(&a).unwrap();
                prop_assert!(l1 >= lo - 1e-12 && l2 <= hi + 1e-12);
                let w = transition_matrix(&frame).unwrap();
                for l in 0..5 {
                    let v = lower_symbol(&frame, &a, &atom(l + 1)).unwrap().re;
                    prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                    prop_assert!((w.row(l).sum() - 1.0).abs() <= 1e-12);
                }
                let avg = averages(&pair, &obs).unwrap();
                prop_assert!(max_abs_diff(&avg.reassemble(), a.matrix()) <= 1e-12);
            }

            #[test]
            fn generic_upper_symbols_round_trip(seed in 0u64..1000, d in proptest::collection::vec(-2.0f64..2.0, 4)) {
                let (pair, frame) = pair_frame(4, seed);
                let target = Operator::new(CMatrix::from_row_slice(2, 2, &[
                    c(d[0], 0.0), c(d[2], -d[3]), c(d[2], d[3]), c(d[1], 0.0),
                ])).unwrap();
                let f = upper_symbol_solve(&pair, &target).unwrap();
                prop_assert!(max_abs_diff(quantize(&frame, &f).unwrap().matrix(), target.matrix()) <= 1e-10);
            }
        }
    }
}
