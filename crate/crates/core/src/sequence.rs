//! The sequential protocol engine.
//!
//! Alice keeps one qubit of `cos(θ₁)|00⟩ + sin(θ₁)|11⟩`; Bob's side performs
//! a chain of weak x measurements of strengths ξ₁, …, ξ_n. After each
//! outcome Bob applies the inverse of his Schmidt-basis unitary, restoring
//! his side to the canonical form so the next measurer can reuse the same
//! two settings. What remains of each branch is a pair (θ, U_A): the branch
//! angle, identical for both outcomes, and an Alice-side unitary that her
//! per-branch measurement bank absorbs.
//!
//! Because the bank conjugation cancels in every correlator, all branches of
//! a level certify the same per-step bound; [`certify`] therefore walks one
//! representative per level while [`build_tree`] materializes the full
//! outcome tree for inspection at small depth.

use crate::bell;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::math;
use crate::qstate::{
    self, apply_kraus_bob, branch_angle_stable, make_state, schmidt, BlochObservable, KrausPair,
    Outcome,
};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, SQRT_2};

/// Deepest sequence for which [`build_tree`] will materialize all 2^n
/// branches.
pub const MAX_TREE_DEPTH: usize = 16;

/// Branch angles below this report the sequence as exhausted.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// A validated protocol configuration: initial angle θ₁ ∈ (0, π/4] and one
/// weak-measurement strength ξ_i ∈ (0, π/4] per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    theta1: f64,
    xis: Vec<f64>,
}

impl ProtocolConfig {
    /// Validates angles and builds the configuration. ξ = 0 is rejected: a
    /// projective step leaves a product state and the sequence cannot
    /// continue.
    pub fn new(theta1: f64, xis: Vec<f64>) -> Result<Self> {
        if !(theta1 > 0.0 && theta1 <= FRAC_PI_4) {
            return Err(Error::InvalidConfig {
                field: "theta1",
                detail: format!("{theta1} outside (0, pi/4]"),
            });
        }
        if xis.is_empty() {
            return Err(Error::InvalidConfig {
                field: "xis",
                detail: String::from("need at least one step"),
            });
        }
        for (i, &xi) in xis.iter().enumerate() {
            if !(xi > 0.0 && xi <= FRAC_PI_4) {
                return Err(Error::InvalidConfig {
                    field: "xis",
                    detail: format!("xi[{i}] = {xi} outside (0, pi/4]"),
                });
            }
        }
        Ok(Self { theta1, xis })
    }

    /// Derives a strength schedule from a per-step guessing-probability
    /// target g* ∈ (1/2, 1).
    ///
    /// The first strength inverts the exact first-step bound at maximal
    /// entanglement, ξ₁ = asin(g* − 1/2); later steps use the small-angle
    /// linearization ξ_i = (g* − 1/2)·θ_i/√2 of the same bound. Branch
    /// angles decay doubly exponentially under any such schedule, which the
    /// stable angle formula keeps finite for the supported depths.
    pub fn from_schedule(theta1: f64, target_g: f64, n: usize) -> Result<Self> {
        if !(target_g > 0.5 && target_g < 1.0) {
            return Err(Error::InvalidConfig {
                field: "target_g",
                detail: format!("{target_g} outside (1/2, 1)"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidConfig {
                field: "n",
                detail: String::from("need at least one step"),
            });
        }
        let margin = target_g - 0.5;
        let mut xis = Vec::with_capacity(n);
        let mut theta = theta1;
        for i in 0..n {
            if theta < UNDERFLOW_FLOOR {
                return Err(Error::UnderflowExhausted { theta });
            }
            let xi = if i == 0 {
                math::asin(margin)
            } else {
                (margin * theta / SQRT_2).min(FRAC_PI_4)
            };
            xis.push(xi);
            theta = branch_angle_stable(theta, xi);
        }
        Self::new(theta1, xis)
    }

    /// The initial angle θ₁.
    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    /// The per-step strengths ξ₁, …, ξ_n.
    pub fn xis(&self) -> &[f64] {
        &self.xis
    }

    /// Sequence length n.
    pub fn n(&self) -> usize {
        self.xis.len()
    }

    /// The branch angle received by each step, θ₁, …, θ_n. Both outcomes of
    /// a weak measurement leave the same angle, so the value is uniform
    /// across each level of the outcome tree.
    pub fn branch_angles(&self) -> Vec<f64> {
        let mut angles = Vec::with_capacity(self.n());
        let mut theta = self.theta1;
        for &xi in &self.xis {
            angles.push(theta);
            theta = branch_angle_stable(theta, xi);
        }
        angles
    }
}

/// One node of the outcome tree: the canonical state received after a given
/// outcome history, carried as (θ, U_A) rather than raw amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    history: String,
    theta: f64,
    u_a: Mat2,
    reach_prob: f64,
}

impl BranchRecord {
    /// The root branch before any measurement.
    pub fn root(theta1: f64) -> Result<Self> {
        if !(theta1 > 0.0 && theta1 <= FRAC_PI_4) {
            return Err(Error::InvalidConfig {
                field: "theta1",
                detail: format!("{theta1} outside (0, pi/4]"),
            });
        }
        Ok(Self {
            history: String::new(),
            theta: theta1,
            u_a: Mat2::identity(),
            reach_prob: 1.0,
        })
    }

    /// Outcome history as a string over `+`/`-`.
    pub fn history(&self) -> &str {
        &self.history
    }

    /// The branch angle θ.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Alice-side unitary accumulated along this history.
    pub fn u_a(&self) -> &Mat2 {
        &self.u_a
    }

    /// Probability of reaching this history, 2^{-(steps taken)}.
    pub fn reach_prob(&self) -> f64 {
        self.reach_prob
    }

    /// The physical state this record stands for,
    /// `(U_A ⊗ 1)(cos θ|00⟩ + sin θ|11⟩)`.
    pub fn state(&self) -> qstate::TwoQubitState {
        let canonical = make_state(self.theta).expect("branch angle stays in range");
        qstate::TwoQubitState::from_matrix_unchecked(
            self.u_a * canonical.amplitude_matrix() * Mat2::identity(),
        )
    }
}

/// Advances a branch through one weak measurement and Bob's corrective
/// unitary.
///
/// The child keeps Bob's side in canonical form, so the same measurement
/// pair {σ_z, weak x} remains valid next step regardless of the outcome;
/// the outcome's trace survives only in Alice's unitary, composed from the
/// Schmidt factor of this step, and in the halved reach probability.
pub fn step(branch: &BranchRecord, xi: f64, outcome: Outcome) -> Result<BranchRecord> {
    if !(xi > 0.0 && xi <= FRAC_PI_4) {
        return Err(Error::AngleOutOfRange {
            name: "xi",
            value: xi,
            min: 0.0,
            max: FRAC_PI_4,
        });
    }
    let child_theta = branch_angle_stable(branch.theta, xi);
    if child_theta < UNDERFLOW_FLOOR {
        return Err(Error::UnderflowExhausted { theta: child_theta });
    }
    let kraus = KrausPair::new(xi)?;
    let canonical = make_state(branch.theta)?;
    let (post, _prob) = apply_kraus_bob(&canonical, &kraus, outcome)?;
    let factor = schmidt(&post);

    let mut history = branch.history.clone();
    history.push(outcome.label());
    Ok(BranchRecord {
        history,
        theta: child_theta,
        u_a: branch.u_a * factor.u_a,
        reach_prob: branch.reach_prob / 2.0,
    })
}

/// Alice's two Bell settings for a branch:
/// `U_A (cos μ σ_z ± sin μ σ_x) U_A†` with `tan μ = sin 2θ`.
///
/// Rejects θ = 0 — a product state violates no Bell inequality, so the bank
/// is undefined there.
pub fn alice_bank(branch: &BranchRecord) -> Result<(BlochObservable, BlochObservable)> {
    if !(branch.theta > 0.0 && branch.theta <= FRAC_PI_4) {
        return Err(Error::AngleOutOfRange {
            name: "branch angle",
            value: branch.theta,
            min: 0.0,
            max: FRAC_PI_4,
        });
    }
    let mu = math::atan(math::sin(2.0 * branch.theta));
    let a0 = BlochObservable::from_polar(mu, 0.0).conjugated_by(&branch.u_a);
    let a1 = BlochObservable::from_polar(-mu, 0.0).conjugated_by(&branch.u_a);
    Ok((a0, a1))
}

/// Materializes the outcome tree: n + 1 levels, level k holding the 2^k
/// branches after k weak outcomes (level 0 is the root received by the
/// first measurer).
///
/// The tree is exponential in n; depths beyond [`MAX_TREE_DEPTH`] are
/// refused. Certification does not need the tree — see [`certify`].
pub fn build_tree(cfg: &ProtocolConfig) -> Result<Vec<Vec<BranchRecord>>> {
    if cfg.n() > MAX_TREE_DEPTH {
        return Err(Error::TreeTooLarge {
            n: cfg.n(),
            max: MAX_TREE_DEPTH,
        });
    }
    let mut levels = Vec::with_capacity(cfg.n() + 1);
    levels.push(alloc::vec![BranchRecord::root(cfg.theta1)?]);
    for &xi in &cfg.xis {
        let parents = levels.last().expect("levels start non-empty");
        let mut children = Vec::with_capacity(parents.len() * 2);
        for parent in parents {
            for outcome in Outcome::BOTH {
                children.push(step(parent, xi, outcome)?);
            }
        }
        levels.push(children);
    }
    Ok(levels)
}

/// Certified values of one protocol step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepCertificate {
    /// Step number, 1-based.
    pub index: usize,
    /// Branch angle received by this step (uniform across the level).
    pub theta: f64,
    /// Weak-measurement strength used at this step.
    pub xi: f64,
    /// Bell value of the step's statistics.
    pub bell_value: f64,
    /// Maximal quantum value of the step's inequality.
    pub bell_max: f64,
    /// Guessing-probability bound for the step.
    pub g_upper: f64,
    /// Certified min-entropy of the step, −log₂(g_upper).
    pub min_entropy_bits: f64,
}

/// The full certification output of a protocol run.
///
/// `guess_product` multiplies the per-step bounds; it is the asymptotic
/// target of the sequential argument, not a proven finite-n composition, and
/// is reported as such. `total_bits` is its negative log, equal to the sum
/// of per-step min-entropies.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificationReport {
    /// Per-step certificates, one per measurement in the sequence.
    pub per_step: Vec<StepCertificate>,
    /// Sum of per-step min-entropies, in bits.
    pub total_bits: f64,
    /// Product of per-step guessing bounds.
    pub guess_product: f64,
}

/// Runs the certification pipeline over a configuration.
///
/// Per level, the branch angle is advanced with the stable closed form and
/// the step's Bell value and guessing bound are evaluated on the canonical
/// representative; branch unitaries cancel against Alice's bank, so these
/// values hold identically on every branch of the level.
pub fn certify(cfg: &ProtocolConfig) -> Result<CertificationReport> {
    let mut per_step = Vec::with_capacity(cfg.n());
    let mut total_bits = 0.0;
    let mut guess_product = 1.0;
    let mut theta = cfg.theta1;
    for (i, &xi) in cfg.xis.iter().enumerate() {
        if theta < UNDERFLOW_FLOOR {
            return Err(Error::UnderflowExhausted { theta });
        }
        let (bell_max, bound) = bell::family_step_bound(theta, xi, 1.0)?;
        per_step.push(StepCertificate {
            index: i + 1,
            theta,
            xi,
            bell_value: bound.bell_value,
            bell_max,
            g_upper: bound.g_upper,
            min_entropy_bits: bound.min_entropy_bits,
        });
        total_bits += bound.min_entropy_bits;
        guess_product *= bound.g_upper;
        theta = branch_angle_stable(theta, xi);
    }
    Ok(CertificationReport {
        per_step,
        total_bits,
        guess_product,
    })
}
