//! Closed-form dynamics of two interacting bosons in a double well,
//! starting from both particles in one well (`c_0(0) = 1`).
//!
//! These expressions are evaluated exactly as printed so that any
//! disagreement with the exact chain evolution in [`crate::fock`] would
//! surface as a cross-module test failure instead of being silently
//! papered over. They double as the oracle for the N = 2 chain and produce
//! the pair-tunneling curves.

use crate::error::{Error, Result};

/// Two-boson parameters; rates in 1/mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBosonParams {
    /// Hopping J > 0.
    pub hopping: f64,
    /// Interaction U (signed).
    pub interaction: f64,
}

impl TwoBosonParams {
    pub fn new(hopping: f64, interaction: f64) -> Result<Self> {
        if !(hopping > 0.0) || !hopping.is_finite() || !interaction.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "two-boson parameters need J > 0 and finite U, got J = {hopping}, U = {interaction}"
            )));
        }
        Ok(Self { hopping, interaction })
    }

    /// Effective oscillation rate M = sqrt(4 J^2 + U^2 / 4); M >= 2J with
    /// equality iff U = 0.
    pub fn m(&self) -> f64 {
        (4.0 * self.hopping * self.hopping + 0.25 * self.interaction * self.interaction).sqrt()
    }
}

/// Derived observables at one evolution coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBosonObservables {
    /// Evolution coordinate (identified with z), mm.
    pub t: f64,
    /// (|c_0|^2, |c_1|^2, |c_2|^2).
    pub probs: [f64; 3],
    /// Fraction of bosons in the initially occupied (right) well.
    pub p_right: f64,
    /// Probability of finding both bosons in the same well.
    pub p_pair: f64,
}

/// The shared four-term interference bracket of the printed |c_2|^2
/// expression:
/// `1 + cos^2(Mt) - 2 cos(Ut/2) cos(Mt) - (U/M) sin(Ut/2) sin(Mt)
///  + (U^2 / 4M^2) sin^2(Mt)`.
fn interference_bracket(p: &TwoBosonParams, t: f64) -> f64 {
    let m = p.m();
    let u = p.interaction;
    let (smt, cmt) = (m * t).sin_cos();
    let (sut, cut) = (0.5 * u * t).sin_cos();
    1.0 + cmt * cmt - 2.0 * cut * cmt - (u / m) * sut * smt
        + (u * u) / (4.0 * m * m) * smt * smt
}

/// Occupation probabilities (|c_0|^2, |c_1|^2, |c_2|^2) at `t >= 0`.
pub fn closed_form_probs(p: &TwoBosonParams, t: f64) -> [f64; 3] {
    debug_assert!(t >= 0.0);
    let m = p.m();
    let j = p.hopping;
    let s = (m * t).sin();
    let p1 = 2.0 * j * j / (m * m) * s * s;
    let p2 = 0.25 * interference_bracket(p, t);
    [1.0 - p1 - p2, p1, p2]
}

/// Fraction of bosons in the right well,
/// `p_R = |c_0|^2 + |c_1|^2 / 2`, in its expanded form.
pub fn p_right(p: &TwoBosonParams, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let m = p.m();
    let j = p.hopping;
    let s = (m * t).sin();
    1.0 - j * j / (m * m) * s * s - 0.25 * interference_bracket(p, t)
}

/// Pair (same-site) probability `p_2 = 1 - (2 J^2 / M^2) sin^2(Mt)`.
pub fn p_pair(p: &TwoBosonParams, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let m = p.m();
    let j = p.hopping;
    let s = (m * t).sin();
    1.0 - 2.0 * j * j / (m * m) * s * s
}

pub fn observables(p: &TwoBosonParams, t: f64) -> TwoBosonObservables {
    TwoBosonObservables {
        t,
        probs: closed_form_probs(p, t),
        p_right: p_right(p, t),
        p_pair: p_pair(p, t),
    }
}
