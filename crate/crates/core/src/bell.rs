//! The tilted two-input Bell family and its randomness bounds.
//!
//! The expression is
//! `I_{α,β} = β⟨B₀⟩ + α(⟨A₀B₀⟩ + ⟨A₁B₀⟩) + ⟨A₀B₁⟩ − ⟨A₁B₁⟩`
//! with α ≥ 1, β ≥ 0 and αβ < 2; its classical bound is β + 2α and its
//! maximal quantum value `√((1+α²)(4+β²))`. α = 1 with β = β(θ) is the
//! one-parameter family tailored to the states `cos(θ)|00⟩ + sin(θ)|11⟩`.
//!
//! An observed value I converts into an upper bound on an eavesdropper's
//! guessing probability for Bob's weak input,
//! `g ≤ 1/2 + √(I_max² − I²) / (2(2 − αβ))`,
//! a concave decreasing function that reaches exactly 1/2 (one certified
//! bit) at maximal violation. The bound is clamped at 1 below the useful
//! range, because a guessing probability cannot exceed certainty.

use crate::error::{Error, Result};
use crate::math;
use crate::qstate::{self, BlochObservable, KrausPair, Outcome, TwoQubitState};
use alloc::format;
use core::f64::consts::FRAC_PI_4;

/// Tolerated overshoot of a Bell value above the quantum maximum before the
/// input is declared infeasible rather than rounded.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// The eight expectation values entering `I_{α,β}`, plus Alice's marginals
/// (ignored by the expression itself but needed for positivity checks and
/// finite-statistics validation).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelatorSet {
    /// ⟨B₀⟩, Bob's marginal for his projective z input.
    pub b0: f64,
    /// ⟨B₁⟩, Bob's marginal for his weak x input.
    pub b1: f64,
    /// ⟨A₀B₀⟩.
    pub a0b0: f64,
    /// ⟨A₁B₀⟩.
    pub a1b0: f64,
    /// ⟨A₀B₁⟩.
    pub a0b1: f64,
    /// ⟨A₁B₁⟩.
    pub a1b1: f64,
    /// ⟨A₀⟩, Alice's marginal for her first setting.
    pub a0: f64,
    /// ⟨A₁⟩, Alice's marginal for her second setting.
    pub a1: f64,
}

impl CorrelatorSet {
    /// Checks that every entry lies in [−1, 1] and that each input pair's
    /// reconstructed outcome distribution is nonnegative
    /// (`1 + a·⟨A⟩ + b·⟨B⟩ + ab·⟨AB⟩ ≥ −1e-10` for all sign choices).
    pub fn validate(&self) -> Result<()> {
        let entries = [
            ("b0", self.b0),
            ("b1", self.b1),
            ("a0b0", self.a0b0),
            ("a1b0", self.a1b0),
            ("a0b1", self.a0b1),
            ("a1b1", self.a1b1),
            ("a0", self.a0),
            ("a1", self.a1),
        ];
        for (name, value) in entries {
            if !(-1.0 - 1e-10..=1.0 + 1e-10).contains(&value) {
                return Err(Error::InvalidCorrelators {
                    detail: format!("{name} = {value} outside [-1, 1]"),
                });
            }
        }
        let cells = [
            ("A0,B0", self.a0, self.b0, self.a0b0),
            ("A1,B0", self.a1, self.b0, self.a1b0),
            ("A0,B1", self.a0, self.b1, self.a0b1),
            ("A1,B1", self.a1, self.b1, self.a1b1),
        ];
        for (pair, ma, mb, joint) in cells {
            for a in [-1.0, 1.0] {
                for b in [-1.0, 1.0] {
                    let mass = 1.0 + a * ma + b * mb + a * b * joint;
                    if mass < -1e-10 {
                        return Err(Error::InvalidCorrelators {
                            detail: format!(
                                "cell ({pair}) with signs ({a}, {b}) has mass {mass:e}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// All entries scaled by a visibility v, the effect of mixing the state
    /// with white noise on the correlators of traceless ±1 observables.
    pub fn scaled(&self, visibility: f64) -> Self {
        Self {
            b0: visibility * self.b0,
            b1: visibility * self.b1,
            a0b0: visibility * self.a0b0,
            a1b0: visibility * self.a1b0,
            a0b1: visibility * self.a0b1,
            a1b1: visibility * self.a1b1,
            a0: visibility * self.a0,
            a1: visibility * self.a1,
        }
    }
}

/// Parameters (α, β) of the Bell expression, with α ≥ 1, β ≥ 0, αβ < 2.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BellParams {
    alpha: f64,
    beta: f64,
}

impl BellParams {
    /// Validates and builds the parameter pair.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 1.0 && beta >= 0.0 && alpha * beta < 2.0) {
            return Err(Error::InvalidBellParams { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// The CHSH point α = 1, β = 0.
    pub fn chsh() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
        }
    }

    /// α.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// β.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The local-deterministic bound β + 2α.
    pub fn classical_bound(&self) -> f64 {
        self.beta + 2.0 * self.alpha
    }
}

/// A certified randomness bound derived from one Bell value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomnessBound {
    /// The Bell value the bound was derived from.
    pub bell_value: f64,
    /// Upper bound on the guessing probability, in [1/2, 1].
    pub g_upper: f64,
    /// Certified min-entropy, −log₂(g_upper).
    pub min_entropy_bits: f64,
}

impl RandomnessBound {
    fn from_guessing(bell_value: f64, g_upper: f64) -> Self {
        Self {
            bell_value,
            g_upper,
            min_entropy_bits: -math::log2(g_upper),
        }
    }
}

/// The tilt β(θ) = 2cos(2θ)/√(1 + sin²(2θ)) matched to the state angle θ.
///
/// θ must lie in (0, π/2); angles above π/4 describe the same state up to a
/// local relabeling, so the magnitude of the cosine is used and the result
/// is always in [0, 2). The value decreases from 2 (θ → 0) to 0 (θ = π/4).
pub fn beta_of_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < core::f64::consts::FRAC_PI_2) {
        return Err(Error::AngleOutOfRange {
            name: "theta",
            value: theta,
            min: 0.0,
            max: core::f64::consts::FRAC_PI_2,
        });
    }
    let s2 = math::sin(2.0 * theta);
    Ok(2.0 * math::abs(math::cos(2.0 * theta)) / math::sqrt(1.0 + s2 * s2))
}

/// Evaluates `I_{α,β}` on a correlator set.
pub fn bell_value(c: &CorrelatorSet, p: &BellParams) -> f64 {
    p.beta * c.b0 + p.alpha * (c.a0b0 + c.a1b0) + c.a0b1 - c.a1b1
}

/// The maximal quantum value `√((1+α²)(4+β²))`; for α = 1 this equals
/// `2√2·√(1 + β²/4)`.
pub fn max_quantum_value(p: &BellParams) -> f64 {
    math::sqrt((1.0 + p.alpha * p.alpha) * (4.0 + p.beta * p.beta))
}

/// Converts an observed Bell value into a guessing-probability bound.
///
/// Values at or below the classical bound certify nothing (g = 1 exactly);
/// at the maximal quantum value the bound is exactly 1/2, one perfect bit.
/// Values beyond the quantum maximum by more than [`FEASIBILITY_TOL`] are
/// rejected as infeasible; smaller overshoots clamp to the maximum.
pub fn guessing_bound(i: f64, p: &BellParams) -> Result<RandomnessBound> {
    let i_max = max_quantum_value(p);
    let magnitude = math::abs(i);
    if magnitude > i_max + FEASIBILITY_TOL {
        return Err(Error::InfeasibleBellValue {
            value: i,
            max: i_max,
        });
    }
    let clamped = magnitude.min(i_max);
    if clamped <= p.classical_bound() {
        return Ok(RandomnessBound::from_guessing(i, 1.0));
    }
    let excess = (i_max * i_max - clamped * clamped).max(0.0);
    let g_raw = 0.5 + math::sqrt(excess) / (2.0 * (2.0 - p.alpha * p.beta));
    Ok(RandomnessBound::from_guessing(i, g_raw.min(1.0)))
}

/// Exact correlators of a state under Alice's two settings and Bob's pair
/// {projective observable, weak x measurement}.
///
/// Entries involving the weak input are computed from the actual outcome
/// probabilities `‖(Π_a ⊗ M_b)|ψ⟩‖²`, which makes every such correlator
/// equal cos(2ξ) times its projective counterpart.
pub fn correlators_of(
    state: &TwoQubitState,
    alice: &[BlochObservable; 2],
    bob_z: &BlochObservable,
    bob_weak: &KrausPair,
) -> CorrelatorSet {
    let a0 = qstate::expectation(state, Some(&alice[0]), None);
    let a1 = qstate::expectation(state, Some(&alice[1]), None);
    let b0 = qstate::expectation(state, None, Some(bob_z));
    let a0b0 = qstate::expectation(state, Some(&alice[0]), Some(bob_z));
    let a1b0 = qstate::expectation(state, Some(&alice[1]), Some(bob_z));

    let mut b1 = 0.0;
    for outcome in Outcome::BOTH {
        let op = bob_weak.operator(outcome);
        b1 += outcome.sign() * qstate::image_norm_sq(state, None, Some(&op));
    }
    let mut joint = [0.0; 2];
    for (k, obs) in alice.iter().enumerate() {
        for a in Outcome::BOTH {
            let proj = obs.projector(a);
            for b in Outcome::BOTH {
                let op = bob_weak.operator(b);
                let p = qstate::image_norm_sq(state, Some(&proj), Some(&op));
                joint[k] += a.sign() * b.sign() * p;
            }
        }
    }

    CorrelatorSet {
        b0,
        b1,
        a0b0,
        a1b0,
        a0b1: joint[0],
        a1b1: joint[1],
        a0,
        a1,
    }
}

/// One certified step of the matched family (α = 1, β = β(θ)) evaluated in
/// closed, cancellation-free form, optionally under white noise.
///
/// With Alice's optimal settings for θ and Bob's pair {σ_z, weak x of
/// strength ξ}, the value and its distance from the maximum are
///
/// ```text
/// I_max       = 4 / √(1 + sin²2θ)
/// I_max − I   = 4 sin²2θ sin²ξ / √(1 + sin²2θ)
/// 2 − β       = 4 sin²2θ / (√(1+sin²2θ)(√(1+sin²2θ) + cos 2θ))
/// ```
///
/// so `g − 1/2 = √((I_max − vI)(I_max + vI)) / (2(2 − β))` can be formed
/// without subtracting nearly equal quantities. This keeps the bound exact
/// for branch angles far below the point where β rounds to 2 in double
/// precision, and it agrees with [`guessing_bound`] on the correlators of
/// the same settings wherever the generic route is numerically valid.
///
/// Returns the noiseless maximum together with the bound at visibility v.
/// θ must lie in (0, π/4], ξ in [0, π/4], v in [0, 1].
pub fn family_step_bound(theta: f64, xi: f64, visibility: f64) -> Result<(f64, RandomnessBound)> {
    if !(theta > 0.0 && theta <= FRAC_PI_4) {
        return Err(Error::AngleOutOfRange {
            name: "theta",
            value: theta,
            min: 0.0,
            max: FRAC_PI_4,
        });
    }
    if !(0.0..=FRAC_PI_4).contains(&xi) {
        return Err(Error::AngleOutOfRange {
            name: "xi",
            value: xi,
            min: 0.0,
            max: FRAC_PI_4,
        });
    }
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidConfig {
            field: "visibility",
            detail: format!("{visibility} outside [0, 1]"),
        });
    }

    let s2 = math::sin(2.0 * theta);
    let c2 = math::cos(2.0 * theta);
    let q = math::sqrt(1.0 + s2 * s2);
    let i_max = 4.0 / q;
    let sin_xi = math::sin(xi);
    let gap = 4.0 * s2 * s2 * sin_xi * sin_xi / q;
    let i_noiseless = i_max - gap;
    let i_observed = visibility * i_noiseless;
    // I_max − v·I as a sum of nonnegative terms.
    let gap_v = i_max * (1.0 - visibility) + visibility * gap;
    let sum_v = i_max + i_observed;
    let two_minus_beta = 4.0 * s2 * s2 / (q * (q + c2));
    let g_raw = 0.5 + math::sqrt(gap_v * sum_v) / (2.0 * two_minus_beta);
    Ok((
        i_max,
        RandomnessBound::from_guessing(i_observed, g_raw.min(1.0)),
    ))
}
