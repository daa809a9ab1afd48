//! Canonical quantization of the plane recovered at finite truncation:
//! quantizing `z` over the Fock frame yields the lowering operator.

use num_complex::Complex64;

use crate::frames::{Family, Frame};
use crate::quantize::{quantize, Observable, Operator};
use crate::spaces::Point;
use crate::{CMatrix, Error, Result};

/// `a = A_z`, `a† = A_{z̄}` on the span of `z^n/√(n!)`, `n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct TruncatedLadder {
    pub a: Operator,
    pub a_dagger: Operator,
    pub n_max: usize,
    /// Bound on the quadrature error of individual matrix entries.
    pub quadrature_defect: f64,
}

pub fn ladder_from_quantization(frame: &Frame) -> Result<TruncatedLadder> {
    let n_max = match frame.family() {
        Family::Fock { n_max } => *n_max,
        _ => return Err(Error::WrongFrameKind { expected: "Fock" }),
    };
    let space = frame.space();
    let coordinate = |conjugate: bool| {
        Observable::sample(space, |p| match p {
            Point::Complex(z) if conjugate => z.conj(),
            Point::Complex(z) => *z,
            _ => unreachable!("Fock frames live on the complex plane"),
        })
    };
    let a = quantize(frame, &coordinate(false))?;
    let a_dagger = quantize(frame, &coordinate(true))?;
    // entries of A_z are moments of the same order as the Gram entries, scaled by √(n+1)
    let quadrature_defect = ((n_max + 1) as f64).sqrt() * frame.gram_defect().max(f64::EPSILON);

    let tol = frame.tolerance();
    let ideal = ideal_lowering(n_max);
    let worst = crate::linalg::max_abs_diff(a.matrix(), &ideal);
    if worst > tol {
        return Err(Error::TruncationTooLarge { defect: worst, tol });
    }
    Ok(TruncatedLadder {
        a,
        a_dagger,
        n_max,
        quadrature_defect,
    })
}

/// `Σ_{n<n_max} √(n+1) |n⟩⟨n+1|`.
pub fn ideal_lowering(n_max: usize) -> CMatrix {
    let dim = n_max + 1;
    CMatrix::from_fn(dim, dim, |r, k| {
        if k == r + 1 {
            Complex64::new((k as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Q = (a + a†)/√2`, `P = (a − a†)/(√2 i)`.
pub fn position_momentum(ladder: &TruncatedLadder) -> (Operator, Operator) {
    let a = ladder.a.matrix();
    let ad = ladder.a_dagger.matrix();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (a + ad) * Complex64::new(s, 0.0);
    let p = (a - ad) * Complex64::new(0.0, -s);
    // symmetrize so that quadrature noise does not break hermiticity
    let q = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
    let p = (&p + p.adjoint()) * Complex64::new(0.5, 0.0);
    (
        Operator::new(q).expect("square by construction"),
        Operator::new(p).expect("square by construction"),
    )
}

/// `N = a† a`.
pub fn number_operator(ladder: &TruncatedLadder) -> Operator {
    Operator::new(ladder.a_dagger.matrix() * ladder.a.matrix()).expect("square by construction")
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Operator::new(a.matrix() * b.matrix() - b.matrix() * a.matrix())
}

/// `⟨z|a|z⟩` for the ideal truncated ladder:
/// `z · Σ_{n<n_max} |z|^{2n}/n! / Σ_{n≤n_max} |z|^{2n}/n!`.
pub fn truncated_coherent_mean(z: Complex64, n_max: usize) -> Complex64 {
    let r2 = z.norm_sqr();
    let mut term = 1.0;
    let mut partial = 0.0;
    for n in 0..n_max {
        partial += term;
        term *= r2 / (n + 1) as f64;
    }
    z * (partial / (partial + term))
}
