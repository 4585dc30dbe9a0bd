//! Independent brute-force verification of the quadratic Bell bound.
//!
//! The guessing-probability conversion in [`crate::bell`] rests on the
//! conjectured inequality
//!
//! ```text
//! I_{α,β}² + (2 − αβ)²⟨B₁⟩² ≤ (1 + α²)(4 + β²)
//! ```
//!
//! over all qubit strategies: a state `cos(t)|00⟩ + sin(t)|11⟩` with
//! t ∈ [0, π/2] and four unit Bloch directions for the observables (for two
//! dichotomic measurements per side, qubit strategies exhaust the quantum
//! set). This module maximizes the left-hand side — and, separately, the
//! Bell value itself — by a seeded, reproducible derivative-free search.
//!
//! The Bell expression is linear in each of Alice's directions, so her
//! exact best response to any (state, Bob) configuration is analytic:
//! `m⃗ₓ` aligned with `T(α n⃗₀ ± n⃗₁)`, `T = diag(sin 2t, −sin 2t, 1)`. The
//! search therefore explores only the state angle and Bob's two directions —
//! a coarse grid restricted to the x–z plane, where the known optima of this
//! family lie, a lower-resolution full-sphere pass plus seeded random probes
//! to test that restriction, and compass refinement with a shrinking step —
//! while Alice's settings are eliminated exactly rather than sampled. The
//! reduction also removes the flat ridges at classical corners that trap
//! coordinate-wise polling.
//!
//! A negative margin beyond roundoff would be a counterexample to the
//! conjecture; the search reports it rather than silencing it.

use crate::bell::{self, BellParams, CorrelatorSet};
use crate::error::{Error, Result};
use crate::math;
use crate::qstate::{self, make_state, BlochObservable, TwoQubitState};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use rand_core::{RngCore, SeedableRng};

/// Smallest accepted evaluation budget.
pub const MIN_BUDGET: u64 = 10_000;

/// Margins below this are surfaced as counterexample candidates instead of
/// being attributed to roundoff.
pub const MARGIN_TOL: f64 = -1e-6;

const REFINE_STARTS: usize = 8;
const INITIAL_STEP: f64 = 0.25;
const FINAL_STEP: f64 = 1e-8;

/// A qubit strategy: the state angle and the four measurement directions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Strategy {
    /// State angle t ∈ [0, π/2] of `cos(t)|00⟩ + sin(t)|11⟩`.
    pub t: f64,
    /// Alice's first observable direction.
    pub a0: BlochObservable,
    /// Alice's second observable direction.
    pub a1: BlochObservable,
    /// Bob's first (projective) observable direction.
    pub b0: BlochObservable,
    /// Bob's second observable direction, weakened by ξ where applicable.
    pub b1: BlochObservable,
}

impl Strategy {
    /// Validates the state angle and assembles the strategy.
    pub fn new(
        t: f64,
        a0: BlochObservable,
        a1: BlochObservable,
        b0: BlochObservable,
        b1: BlochObservable,
    ) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&t) {
            return Err(Error::AngleOutOfRange {
                name: "t",
                value: t,
                min: 0.0,
                max: FRAC_PI_2,
            });
        }
        Ok(Self { t, a0, a1, b0, b1 })
    }

    fn state(&self) -> TwoQubitState {
        make_state(self.t).expect("strategy angle is validated")
    }

    /// Exact correlators of the strategy. A weak second input of strength ξ
    /// damps every ⟨·B₁⟩ entry by cos(2ξ); ξ = 0 is the projective case.
    pub fn correlators(&self, weak_xi: f64) -> CorrelatorSet {
        let state = self.state();
        let damping = math::cos(2.0 * weak_xi);
        CorrelatorSet {
            b0: qstate::expectation(&state, None, Some(&self.b0)),
            b1: damping * qstate::expectation(&state, None, Some(&self.b1)),
            a0b0: qstate::expectation(&state, Some(&self.a0), Some(&self.b0)),
            a1b0: qstate::expectation(&state, Some(&self.a1), Some(&self.b0)),
            a0b1: damping * qstate::expectation(&state, Some(&self.a0), Some(&self.b1)),
            a1b1: damping * qstate::expectation(&state, Some(&self.a1), Some(&self.b1)),
            a0: qstate::expectation(&state, Some(&self.a0), None),
            a1: qstate::expectation(&state, Some(&self.a1), None),
        }
    }
}

/// Outcome of one search run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchReport {
    /// Largest objective value found.
    pub best_value: f64,
    /// The strategy attaining it.
    pub best_strategy: Strategy,
    /// The closed-form right-hand side the value is compared against.
    pub rhs: f64,
    /// `rhs − best_value`; a value below [`MARGIN_TOL`] is a counterexample
    /// candidate.
    pub margin: f64,
    /// Number of objective evaluations spent (one per Bob configuration,
    /// Alice handled by exact best response).
    pub evaluations: u64,
    /// Whether every refinement reached its final step size in budget.
    pub converged: bool,
}

/// Evaluates the conjectured inequality's left-hand side
/// `I² + (2 − αβ)²⟨B₁⟩²` on the exact correlators of a strategy.
///
/// ξ = 0 reproduces the projective check; ξ > 0 extends it to the weak
/// statistics the protocol actually collects.
pub fn lhs_conjecture(s: &Strategy, p: &BellParams, xi: f64) -> f64 {
    let c = s.correlators(xi);
    let i = bell::bell_value(&c, p);
    let slack = 2.0 - p.alpha() * p.beta();
    i * i + slack * slack * c.b1 * c.b1
}

/// Maximizes the conjecture's left-hand side over qubit strategies.
///
/// The right-hand side is `(1 + α²)(4 + β²)`; the conjecture predicts a
/// nonnegative margin up to roundoff, which the runs reported so far have
/// always shown.
pub fn maximize_lhs(p: &BellParams, budget: u64, seed: u64) -> Result<SearchReport> {
    let rhs = (1.0 + p.alpha() * p.alpha()) * (4.0 + p.beta() * p.beta());
    run_search(Objective::ConjectureLhs(*p), rhs, budget, seed)
}

/// Maximizes the Bell value itself over qubit strategies; the closed-form
/// quantum maximum is the reference value the search must not exceed.
pub fn find_max_violation(p: &BellParams, budget: u64, seed: u64) -> Result<SearchReport> {
    let rhs = bell::max_quantum_value(p);
    run_search(Objective::BellValue(*p), rhs, budget, seed)
}

#[derive(Clone, Copy)]
enum Objective {
    ConjectureLhs(BellParams),
    BellValue(BellParams),
}

fn dir_from_angles(polar: f64, azimuth: f64) -> [f64; 3] {
    let sp = math::sin(polar);
    [
        sp * math::cos(azimuth),
        sp * math::sin(azimuth),
        math::cos(polar),
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

fn unit_or_z(v: [f64; 3], n: f64) -> [f64; 3] {
    if n > 1e-300 {
        [v[0] / n, v[1] / n, v[2] / n]
    } else {
        [0.0, 0.0, 1.0]
    }
}

/// Alice-eliminated evaluation of one Bob configuration.
struct BestResponse {
    /// β⟨B₀⟩ at Alice-independent settings.
    head: f64,
    /// |T(α n⃗₀ + n⃗₁)| and the direction attaining it.
    plus: ([f64; 3], f64),
    /// |T(α n⃗₀ − n⃗₁)| and the direction attaining it.
    minus: ([f64; 3], f64),
    /// ⟨B₁⟩ at ξ = 0, independent of Alice.
    b1: f64,
}

fn best_response(p: &BellParams, t: f64, n0: [f64; 3], n1: [f64; 3]) -> BestResponse {
    let s2 = math::sin(2.0 * t);
    let c2 = math::cos(2.0 * t);
    // Correlation map of the state: ⟨m̂ ⊗ n̂⟩ = m⃗ · T n⃗ with
    // T = diag(sin 2t, −sin 2t, 1).
    let tmap = |v: [f64; 3]| [s2 * v[0], -s2 * v[1], v[2]];
    let a = p.alpha();
    let vp = tmap([a * n0[0] + n1[0], a * n0[1] + n1[1], a * n0[2] + n1[2]]);
    let vm = tmap([a * n0[0] - n1[0], a * n0[1] - n1[1], a * n0[2] - n1[2]]);
    BestResponse {
        head: p.beta() * n0[2] * c2,
        plus: (vp, norm3(vp)),
        minus: (vm, norm3(vm)),
        b1: n1[2] * c2,
    }
}

impl Objective {
    fn eval(&self, z: &Point) -> f64 {
        let (t, n0, n1) = z.bob_config();
        match self {
            Objective::BellValue(p) => {
                let r = best_response(p, t, n0, n1);
                r.head + r.plus.1 + r.minus.1
            }
            Objective::ConjectureLhs(p) => {
                // I² is maximized by the sign choice aligning Alice with
                // ±the best-response directions, giving |head| + |v₊| + |v₋|.
                let r = best_response(p, t, n0, n1);
                let peak = math::abs(r.head) + r.plus.1 + r.minus.1;
                let slack = 2.0 - p.alpha() * p.beta();
                peak * peak + slack * slack * r.b1 * r.b1
            }
        }
    }

    /// The full strategy (Alice reconstructed) behind a search point.
    fn strategy(&self, z: &Point) -> Strategy {
        let (t, n0, n1) = z.bob_config();
        let p = match self {
            Objective::BellValue(p) | Objective::ConjectureLhs(p) => p,
        };
        let r = best_response(p, t, n0, n1);
        let flip = match self {
            Objective::BellValue(_) => 1.0,
            // For the squared expression the negative branch wins when the
            // tilt term is negative.
            Objective::ConjectureLhs(_) => {
                if r.head >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        let m0 = unit_or_z(r.plus.0, r.plus.1).map(|x| flip * x);
        let m1 = unit_or_z(r.minus.0, r.minus.1).map(|x| flip * x);
        Strategy {
            t,
            a0: BlochObservable::new(m0).expect("unit by construction"),
            a1: BlochObservable::new(m1).expect("unit by construction"),
            b0: BlochObservable::new(n0).expect("unit by construction"),
            b1: BlochObservable::new(n1).expect("unit by construction"),
        }
    }
}

/// Search coordinates: state angle plus (polar, azimuth) for each of Bob's
/// directions. Azimuths stay zero throughout the planar passes.
#[derive(Clone, Copy, Debug)]
struct Point {
    z: [f64; 5],
}

impl Point {
    fn planar(t: f64, polar0: f64, polar1: f64) -> Self {
        Self {
            z: [t, polar0, 0.0, polar1, 0.0],
        }
    }

    fn bob_config(&self) -> (f64, [f64; 3], [f64; 3]) {
        (
            self.z[0].clamp(0.0, FRAC_PI_2),
            dir_from_angles(self.z[1], self.z[2]),
            dir_from_angles(self.z[3], self.z[4]),
        )
    }

    fn nudged(&self, coord: usize, delta: f64) -> Self {
        let mut z = self.z;
        z[coord] += delta;
        if coord == 0 {
            z[0] = z[0].clamp(0.0, FRAC_PI_2);
        }
        Self { z }
    }
}

struct Meter {
    objective: Objective,
    budget: u64,
    spent: u64,
}

impl Meter {
    fn eval(&mut self, p: &Point) -> Option<f64> {
        if self.spent >= self.budget {
            return None;
        }
        self.spent += 1;
        Some(self.objective.eval(p))
    }
}

/// Fixed-size pool of the best points seen, kept sorted descending.
struct TopPool {
    entries: Vec<(f64, Point)>,
    capacity: usize,
}

impl TopPool {
    fn new(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity + 1),
            capacity,
        }
    }

    fn offer(&mut self, value: f64, point: Point) {
        let pos = self
            .entries
            .iter()
            .position(|(v, _)| value > *v)
            .unwrap_or(self.entries.len());
        if pos < self.capacity {
            self.entries.insert(pos, (value, point));
            self.entries.truncate(self.capacity);
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
    if n <= 1 {
        return lo;
    }
    lo + (hi - lo) * k as f64 / (n - 1) as f64
}

fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    // 53 uniform mantissa bits in [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn compass<F: FnMut(&Point) -> Option<f64>>(
    start: (f64, Point),
    mut eval: F,
) -> ((f64, Point), bool) {
    let mut current = start;
    let mut step = INITIAL_STEP;
    while step >= FINAL_STEP {
        let mut improved = false;
        for coord in 0..5 {
            for dir in [1.0, -1.0] {
                let cand = current.1.nudged(coord, dir * step);
                match eval(&cand) {
                    Some(v) => {
                        if v > current.0 {
                            current = (v, cand);
                            improved = true;
                        }
                    }
                    None => return (current, false),
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (current, true)
}

fn run_search(objective: Objective, rhs: f64, budget: u64, seed: u64) -> Result<SearchReport> {
    if budget < MIN_BUDGET {
        return Err(Error::BudgetTooSmall {
            budget,
            min: MIN_BUDGET,
        });
    }

    let mut meter = Meter {
        objective,
        budget,
        spent: 0,
    };
    let mut pool = TopPool::new(REFINE_STARTS);

    // Coarse pass in the x–z plane: state angle and two in-plane direction
    // angles, at most 24 points per angle, shrunk to fit the budget.
    let planar_budget = (0.5 * budget as f64) as u64;
    let res = (math::powf(planar_budget as f64, 1.0 / 3.0) as usize).clamp(4, 24);
    'planar: for it in 0..res {
        let t = linspace(0.0, FRAC_PI_2, res, it);
        for i0 in 0..res {
            for i1 in 0..res {
                let angle = |k: usize| linspace(0.0, 2.0 * PI * (1.0 - 1.0 / res as f64), res, k);
                let p = Point::planar(t, angle(i0), angle(i1));
                match meter.eval(&p) {
                    Some(v) => pool.offer(v, p),
                    None => break 'planar,
                }
            }
        }
    }

    // Full-sphere lattice at lower resolution: checks that nothing off the
    // x–z plane beats the planar optima.
    let sphere_budget = (0.2 * budget as f64) as u64;
    let res_s = (math::powf(sphere_budget as f64, 0.2) as usize).clamp(3, 11);
    let mut idx = [0usize; 5];
    'sphere: loop {
        let grid = |dim: usize, k: usize| match dim {
            0 => linspace(0.0, FRAC_PI_2, res_s, k),
            1 | 3 => linspace(0.0, PI, res_s, k),
            _ => linspace(0.0, 2.0 * PI * (1.0 - 1.0 / res_s as f64), res_s, k),
        };
        let mut z = [0.0; 5];
        for (d, zd) in z.iter_mut().enumerate() {
            *zd = grid(d, idx[d]);
        }
        let p = Point { z };
        match meter.eval(&p) {
            Some(v) => pool.offer(v, p),
            None => break 'sphere,
        }
        let mut d = 4;
        loop {
            idx[d] += 1;
            if idx[d] < res_s {
                break;
            }
            idx[d] = 0;
            if d == 0 {
                break 'sphere;
            }
            d -= 1;
        }
    }

    // Seeded random probes over the full sphere, uniform in direction.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let probes = (0.1 * budget as f64) as u64;
    for _ in 0..probes {
        let mut z = [0.0; 5];
        z[0] = uniform_f64(&mut rng) * FRAC_PI_2;
        for k in 0..2 {
            z[1 + 2 * k] = math::acos(2.0 * uniform_f64(&mut rng) - 1.0);
            z[2 + 2 * k] = uniform_f64(&mut rng) * 2.0 * PI;
        }
        let p = Point { z };
        match meter.eval(&p) {
            Some(v) => pool.offer(v, p),
            None => break,
        }
    }

    // Compass refinement with shrinking step over all five coordinates, so
    // off-plane improvements are caught if they exist.
    let mut converged = true;
    let starts: Vec<(f64, Point)> = pool.entries.clone();
    let mut best = starts
        .first()
        .copied()
        .expect("coarse pass always evaluates at least one point");
    for start in starts {
        let (result, done) = compass(start, |p| meter.eval(p));
        converged &= done;
        if result.0 > best.0 {
            best = result;
        }
    }

    Ok(SearchReport {
        best_value: best.0,
        best_strategy: objective.strategy(&best.1),
        rhs,
        margin: rhs - best.0,
        evaluations: meter.spent,
        converged,
    })
}
