//! Coherent states `|x⟩ = N(x)^{-1/2} Σ_n φ_n(x) |n⟩`, their overlaps, the
//! reproducing kernel and the resolution of unity.

use num_complex::Complex64;

use crate::frames::{max_abs_deviation_from_identity, Frame};
use crate::spaces::{ComplexSum, Point};
use crate::{CMatrix, CVector, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    coeffs: CVector,
    base_point: Point,
    norm_factor: f64,
}

impl CoherentState {
    /// Components `⟨n|x⟩`.
    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn base_point(&self) -> Point {
        self.base_point
    }

    /// `N(x)` at the base point.
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CoherentState) -> Complex64 {
        self.coeffs.dotc(&other.coeffs)
    }
}

/// `N(x) = Σ_n |φ_n(x)|²`.
pub fn normalization(frame: &Frame, x: &Point) -> Result<f64> {
    let n: f64 = frame.eval(x)?.iter().map(|z| z.norm_sqr()).sum();
    if n > 0.0 {
        Ok(n)
    } else {
        Err(Error::ZeroNormalization(x.to_string()))
    }
}

pub fn coherent_state(frame: &Frame, x: &Point) -> Result<CoherentState> {
    let phi = frame.eval(x)?;
    state_from_values(phi, *x)
}

fn state_from_values(phi: CVector, x: Point) -> Result<CoherentState> {
    let n: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if !(n > 0.0) {
        return Err(Error::ZeroNormalization(x.to_string()));
    }
    let coeffs = phi / Complex64::new(n.sqrt(), 0.0);
    Ok(CoherentState {
        coeffs,
        base_point: x,
        norm_factor: n,
    })
}

/// `⟨x|x′⟩`.
pub fn overlap(frame: &Frame, x: &Point, x_prime: &Point) -> Result<Complex64> {
    let a = coherent_state(frame, x)?;
    let b = coherent_state(frame, x_prime)?;
    Ok(a.inner(&b))
}

/// `K(x, x′) = √(N(x) N(x′)) ⟨x|x′⟩ = Σ_n conj(φ_n(x)) φ_n(x′)`.
pub fn kernel(frame: &Frame, x: &Point, x_prime: &Point) -> Result<Complex64> {
    let a = coherent_state(frame, x)?;
    let b = coherent_state(frame, x_prime)?;
    Ok(a.inner(&b) * (a.norm_factor * b.norm_factor).sqrt())
}

/// Coherent states at the nodes of the frame's space, with `ν`-weights
/// `N(x_i) w_i`. Nodes where `N` vanishes carry no weight and are skipped.
pub fn node_states(frame: &Frame) -> Vec<(usize, CoherentState, f64)> {
    let w = frame.space().weights();
    frame
        .space()
        .points()
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let phi = frame.values().column(i).into_owned();
            state_from_values(phi, *p)
                .ok()
                .map(|s| {
                    let nu = s.norm_factor * w[i];
                    (i, s, nu)
                })
        })
        .collect()
}

/// `Σ_i N(x_i) w_i |x_i⟩⟨x_i|`.
pub fn resolution_operator(frame: &Frame) -> CMatrix {
    let n = frame.n_basis();
    let states = node_states(frame);
    CMatrix::from_fn(n, n, |m, k| {
        let mut acc = ComplexSum::default();
        for (_, s, nu) in &states {
            acc.add(s.coeffs[m] * s.coeffs[k].conj() * *nu);
        }
        acc.value()
    })
}

/// `‖Σ_i N(x_i) w_i |x_i⟩⟨x_i| − I‖_max`.
pub fn resolution_defect(frame: &Frame) -> f64 {
    max_abs_deviation_from_identity(&resolution_operator(frame))
}
