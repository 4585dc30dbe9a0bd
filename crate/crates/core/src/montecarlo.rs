//! Finite statistics: seeded protocol sampling, correlator estimation, and
//! white-noise robustness sweeps.
//!
//! Rounds are sampled by exact Born-rule evolution of the two-qubit state
//! along Bob's measurement chain. Per round, Bob draws each input — σ_z with
//! probability γ_i, the weak x measurement otherwise — and Alice draws one
//! observable from her bank; the simulator samples the matched view of that
//! bank (the level is drawn, the branch index always agrees with the
//! realized history), which is the part of a uniform bank draw that the
//! estimators consume. A σ_z round is projective and destroys the
//! entanglement; later steps of that round are still sampled faithfully
//! from the resulting product state, and the estimators simply exclude such
//! histories for the steps after the break.
//!
//! Randomness contract: round r draws from stream r of a ChaCha8 generator
//! keyed by the seed, so outputs are identical across runs and across any
//! parallel partitioning of rounds; there is no global generator state.

use crate::bell::{self, family_step_bound};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::math;
use crate::qstate::{
    self, apply_kraus_bob, make_state, schmidt, BlochObservable, KrausPair, Outcome, TwoQubitState,
};
use crate::sequence::{alice_bank, BranchRecord, ProtocolConfig, StepCertificate};
use alloc::format;
use alloc::vec::Vec;
use rand_core::{RngCore, SeedableRng};

/// Cells with fewer samples than this are flagged low-statistics.
pub const MIN_CELL_COUNT: usize = 100;

/// Sampling plan: input bias per step, round count, and the seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplePlan {
    /// Per-step probability that Bob chooses σ_z (input y = 0).
    pub gammas: Vec<f64>,
    /// Number of rounds to sample.
    pub rounds: usize,
    /// Seed of the counter-based generator.
    pub seed: u64,
    /// Optional weights over Alice's level choice; uniform when absent.
    pub alice_level_weights: Option<Vec<f64>>,
}

impl SamplePlan {
    /// Uniform-bank plan with a common γ for every step.
    pub fn uniform(gamma: f64, n: usize, rounds: usize, seed: u64) -> Self {
        Self {
            gammas: alloc::vec![gamma; n],
            rounds,
            seed,
            alice_level_weights: None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig {
                field: "rounds",
                detail: format!("{} rounds requested", self.rounds),
            });
        }
        if self.gammas.len() != n {
            return Err(Error::InvalidConfig {
                field: "gammas",
                detail: format!("{} entries for {n} steps", self.gammas.len()),
            });
        }
        for (i, &g) in self.gammas.iter().enumerate() {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidConfig {
                    field: "gammas",
                    detail: format!("gamma[{i}] = {g} outside [0, 1]"),
                });
            }
        }
        if let Some(w) = &self.alice_level_weights {
            if w.len() != n {
                return Err(Error::InvalidConfig {
                    field: "alice_level_weights",
                    detail: format!("{} entries for {n} steps", w.len()),
                });
            }
            if w.iter().any(|&x| x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidConfig {
                    field: "alice_level_weights",
                    detail: alloc::string::String::from(
                        "weights must be nonnegative with positive sum",
                    ),
                });
            }
        }
        Ok(())
    }
}

/// One sampled round: the inputs chosen and the outputs observed.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSample {
    /// The step Alice's bank choice targets, 1-based.
    pub alice_level: usize,
    /// Which of the two bank settings she used, 0 or 1.
    pub alice_setting: u8,
    /// Alice's outcome, ±1.
    pub alice_outcome: i8,
    /// Bob's inputs y_i: 0 for σ_z, 1 for the weak x measurement.
    pub bob_inputs: Vec<u8>,
    /// Bob's outcomes b_i, ±1 — the branch path of the round.
    pub bob_outcomes: Vec<i8>,
}

/// A plug-in estimate of one correlator cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellEstimate {
    /// Sample mean, absent when the cell is empty.
    pub value: Option<f64>,
    /// Standard error √((1 − ĉ²)/N) of a ±1-product estimator.
    pub std_error: Option<f64>,
    /// Number of samples in the cell.
    pub count: usize,
    /// Whether the cell is below [`MIN_CELL_COUNT`].
    pub low_stats: bool,
}

impl CellEstimate {
    fn from_values(sum: f64, count: usize) -> Self {
        if count == 0 {
            return Self {
                value: None,
                std_error: None,
                count: 0,
                low_stats: true,
            };
        }
        let mean = sum / count as f64;
        let var = (1.0 - mean * mean).max(0.0);
        Self {
            value: Some(mean),
            std_error: Some(math::sqrt(var / count as f64)),
            count,
            low_stats: count < MIN_CELL_COUNT,
        }
    }
}

/// Estimated correlators of one step, with per-cell uncertainties.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateSet {
    /// The step the estimates refer to, 1-based.
    pub step: usize,
    /// ⟨B₀⟩ estimate.
    pub b0: CellEstimate,
    /// ⟨B₁⟩ estimate.
    pub b1: CellEstimate,
    /// ⟨A₀⟩ estimate.
    pub a0: CellEstimate,
    /// ⟨A₁⟩ estimate.
    pub a1: CellEstimate,
    /// ⟨A₀B₀⟩ estimate.
    pub a0b0: CellEstimate,
    /// ⟨A₁B₀⟩ estimate.
    pub a1b0: CellEstimate,
    /// ⟨A₀B₁⟩ estimate.
    pub a0b1: CellEstimate,
    /// ⟨A₁B₁⟩ estimate.
    pub a1b1: CellEstimate,
    /// Whether any cell is below the statistics threshold.
    pub low_stats: bool,
}

/// One visibility point of a noise sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoisePoint {
    /// Visibility v of the noisy state v·ψ + (1 − v)·1/4.
    pub visibility: f64,
    /// Per-step certificates at this visibility.
    pub per_step: Vec<StepCertificate>,
    /// Sum of per-step min-entropies.
    pub total_bits: f64,
    /// Product of per-step guessing bounds.
    pub guess_product: f64,
}

/// Per-level precomputed machinery for round sampling.
struct LevelData {
    kraus: KrausPair,
    bank: [BlochObservable; 2],
    /// Alice-side Schmidt factor per outcome, composing the branch unitary.
    alice_factor: [Mat2; 2],
    /// Bob's corrective unitary per outcome (adjoint of his Schmidt factor).
    correction: [Mat2; 2],
}

fn precompute_levels(cfg: &ProtocolConfig) -> Result<Vec<LevelData>> {
    let angles = cfg.branch_angles();
    let mut levels = Vec::with_capacity(cfg.n());
    for (&theta, &xi) in angles.iter().zip(cfg.xis()) {
        if theta <= 0.0 {
            return Err(Error::UnderflowExhausted { theta });
        }
        let kraus = KrausPair::new(xi)?;
        let root = BranchRecord::root(theta)?;
        let (a0, a1) = alice_bank(&root)?;
        let canonical = make_state(theta)?;
        let mut alice_factor = [Mat2::identity(); 2];
        let mut correction = [Mat2::identity(); 2];
        for (k, outcome) in Outcome::BOTH.into_iter().enumerate() {
            let (post, _) = apply_kraus_bob(&canonical, &kraus, outcome)?;
            let form = schmidt(&post);
            alice_factor[k] = form.u_a;
            correction[k] = form.u_b.adjoint();
        }
        levels.push(LevelData {
            kraus,
            bank: [a0, a1],
            alice_factor,
            correction,
        });
    }
    Ok(levels)
}

fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn draw_level(rng: &mut impl RngCore, weights: Option<&[f64]>, n: usize) -> usize {
    let u = uniform_f64(rng);
    match weights {
        None => ((u * n as f64) as usize).min(n - 1) + 1,
        Some(w) => {
            let total: f64 = w.iter().sum();
            let mut acc = 0.0;
            for (j, &wj) in w.iter().enumerate() {
                acc += wj / total;
                if u < acc {
                    return j + 1;
                }
            }
            n
        }
    }
}

fn normalize(m: Mat2, norm_sq: f64) -> TwoQubitState {
    let inv = num_complex::Complex64::new(1.0 / math::sqrt(norm_sq), 0.0);
    TwoQubitState::from_matrix_unchecked(Mat2::new([
        [m[(0, 0)] * inv, m[(0, 1)] * inv],
        [m[(1, 0)] * inv, m[(1, 1)] * inv],
    ]))
}

/// Samples N protocol rounds by exact Born-rule evolution.
///
/// Deterministic under the plan's seed: identical invocations produce
/// identical sample lists, independent of how rounds might be partitioned
/// across workers.
pub fn sample_runs(cfg: &ProtocolConfig, plan: &SamplePlan) -> Result<Vec<RunSample>> {
    plan.validate(cfg.n())?;
    let levels = precompute_levels(cfg)?;
    let base = rand_chacha::ChaCha8Rng::seed_from_u64(plan.seed);
    let n = cfg.n();
    let mut samples = Vec::with_capacity(plan.rounds);

    for round in 0..plan.rounds {
        let mut rng = base.clone();
        rng.set_stream(round as u64);

        let alice_level = draw_level(&mut rng, plan.alice_level_weights.as_deref(), n);
        let alice_setting = (uniform_f64(&mut rng) < 0.5) as u8;

        let mut state = make_state(cfg.theta1())?;
        let mut bob_inputs: Vec<u8> = Vec::with_capacity(n);
        let mut bob_outcomes: Vec<i8> = Vec::with_capacity(n);
        for level in &levels {
            let projective = uniform_f64(&mut rng) < plan.gammas[bob_inputs.len()];
            let outcome_draw = uniform_f64(&mut rng);
            if projective {
                let z = BlochObservable::z();
                let p_plus = qstate::image_norm_sq(&state, None, Some(&z.projector(Outcome::Plus)));
                let outcome = if outcome_draw < p_plus {
                    Outcome::Plus
                } else {
                    Outcome::Minus
                };
                let proj = z.projector(outcome);
                let image = state.apply_local(&Mat2::identity(), &proj);
                let p = qstate::image_norm_sq(&state, None, Some(&proj));
                state = normalize(image, p);
                bob_inputs.push(0);
                bob_outcomes.push(outcome.sign() as i8);
            } else {
                let op_plus = level.kraus.operator(Outcome::Plus);
                let p_plus = qstate::image_norm_sq(&state, None, Some(&op_plus));
                let outcome = if outcome_draw < p_plus {
                    Outcome::Plus
                } else {
                    Outcome::Minus
                };
                let op = level.kraus.operator(outcome);
                let image = state.apply_local(&Mat2::identity(), &op);
                let p = qstate::image_norm_sq(&state, None, Some(&op));
                state = normalize(image, p);
                // Fixed corrective unitary, part of the device program.
                let k = (outcome == Outcome::Minus) as usize;
                let corrected = state.apply_local(&Mat2::identity(), &level.correction[k]);
                state = TwoQubitState::from_matrix_unchecked(corrected);
                bob_inputs.push(1);
                bob_outcomes.push(outcome.sign() as i8);
            }
        }

        // Alice measures her bank observable for the realized history; the
        // bank is indexed by the all-weak tree, so the prefix unitary
        // composes the precomputed per-outcome factors.
        let mut u_prefix = Mat2::identity();
        for i in 0..alice_level - 1 {
            let k = (bob_outcomes[i] < 0) as usize;
            u_prefix = u_prefix * levels[i].alice_factor[k];
        }
        let obs = levels[alice_level - 1].bank[alice_setting as usize].conjugated_by(&u_prefix);
        let p_plus = qstate::image_norm_sq(&state, Some(&obs.projector(Outcome::Plus)), None);
        let alice_outcome = if uniform_f64(&mut rng) < p_plus {
            1
        } else {
            -1
        };

        samples.push(RunSample {
            alice_level,
            alice_setting,
            alice_outcome,
            bob_inputs,
            bob_outcomes,
        });
    }
    Ok(samples)
}

/// Plug-in correlator estimates for one step from sampled rounds.
///
/// Only rounds whose steps before `step` were all weak enter the cells (a
/// projective input breaks the canonical chain); joint and Alice-marginal
/// cells additionally require Alice's bank choice to target the step. Empty
/// cells stay `None` — they are flagged, never silently zeroed.
pub fn estimate(samples: &[RunSample], step: usize) -> Result<EstimateSet> {
    let n = samples
        .first()
        .map(|s| s.bob_inputs.len())
        .ok_or(Error::InvalidConfig {
            field: "samples",
            detail: alloc::string::String::from("no samples given"),
        })?;
    if step == 0 || step > n {
        return Err(Error::InvalidConfig {
            field: "step",
            detail: format!("step {step} outside 1..={n}"),
        });
    }

    // (sum, count) accumulators: b0, b1, a0, a1, a0b0, a1b0, a0b1, a1b1.
    let mut acc = [(0.0_f64, 0usize); 8];
    let mut add = |idx: usize, v: f64| {
        acc[idx].0 += v;
        acc[idx].1 += 1;
    };
    for s in samples {
        let prefix_weak = s.bob_inputs[..step - 1].iter().all(|&y| y == 1);
        if !prefix_weak {
            continue;
        }
        let y = s.bob_inputs[step - 1];
        let b = s.bob_outcomes[step - 1] as f64;
        add(y as usize, b);
        if s.alice_level == step {
            let a = s.alice_outcome as f64;
            let k = s.alice_setting as usize;
            add(2 + k, a);
            add(4 + 2 * (y as usize) + k, a * b);
        }
    }

    let cell = |idx: usize| CellEstimate::from_values(acc[idx].0, acc[idx].1);
    Ok(EstimateSet {
        step,
        b0: cell(0),
        b1: cell(1),
        a0: cell(2),
        a1: cell(3),
        a0b0: cell(4),
        a1b0: cell(5),
        a0b1: cell(6),
        a1b1: cell(7),
        low_stats: acc.iter().any(|&(_, count)| count < MIN_CELL_COUNT),
    })
}

/// Certification under white noise: every correlator of a visibility-v
/// state is the noiseless one scaled by v, so each step's Bell value scales
/// accordingly and the bound is re-evaluated per point.
///
/// The grid is evaluated as given; v = 1 reproduces the noiseless
/// certification bit for bit.
pub fn noise_sweep(cfg: &ProtocolConfig, v_grid: &[f64]) -> Result<Vec<NoisePoint>> {
    let angles = cfg.branch_angles();
    let mut table = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidConfig {
                field: "visibility",
                detail: format!("{v} outside [0, 1]"),
            });
        }
        let mut per_step = Vec::with_capacity(cfg.n());
        let mut total_bits = 0.0;
        let mut guess_product = 1.0;
        for (i, (&theta, &xi)) in angles.iter().zip(cfg.xis()).enumerate() {
            let (bell_max, bound) = family_step_bound(theta, xi, v)?;
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
        }
        table.push(NoisePoint {
            visibility: v,
            per_step,
            total_bits,
            guess_product,
        });
    }
    Ok(table)
}

/// Exact correlators the estimators converge to at a given step: the
/// canonical branch state measured with the step's bank and
/// {σ_z, weak x(ξ)}.
pub fn exact_step_correlators(cfg: &ProtocolConfig, step: usize) -> Result<bell::CorrelatorSet> {
    if step == 0 || step > cfg.n() {
        return Err(Error::InvalidConfig {
            field: "step",
            detail: format!("step {step} outside 1..={}", cfg.n()),
        });
    }
    let theta = cfg.branch_angles()[step - 1];
    let root = BranchRecord::root(theta)?;
    let (a0, a1) = alice_bank(&root)?;
    let state = make_state(theta)?;
    let kraus = KrausPair::new(cfg.xis()[step - 1])?;
    Ok(bell::correlators_of(
        &state,
        &[a0, a1],
        &BlochObservable::z(),
        &kraus,
    ))
}
