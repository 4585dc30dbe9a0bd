//! Exact linear algebra for two-qubit pure states.
//!
//! States are four complex amplitudes over the product basis
//! `|00⟩, |01⟩, |10⟩, |11⟩` (first factor Alice, second Bob). The module
//! provides construction of the Schmidt-diagonal family
//! `cos(θ)|00⟩ + sin(θ)|11⟩`, the two-outcome weak x measurement acting on
//! Bob's qubit, expectation values of local ±1 observables, and a
//! numerically stable Schmidt decomposition with a deterministic phase
//! convention.

use crate::error::{Error, Result};
use crate::mat2::{self, Mat2};
use crate::math;
use core::f64::consts::FRAC_PI_4;
use num_complex::Complex64;

/// Squared-norm tolerance for state and Bloch-vector invariants.
pub const NORM_TOL: f64 = 1e-12;

/// Branch norms below this are treated as genuinely zero probability rather
/// than roundoff, and normalizing them is refused.
pub const DEGENERATE_BRANCH_NORM: f64 = 1e-15;

/// Relative singular-value gap below which the Schmidt coefficients are
/// treated as degenerate and the basis is fixed by convention instead of by
/// eigenvectors.
const SCHMIDT_DEGENERATE_GAP: f64 = 1e-9;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// One of the two outcomes of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Outcome {
    /// The +1 outcome.
    Plus,
    /// The −1 outcome.
    Minus,
}

impl Outcome {
    /// Both outcomes, in the order `[Plus, Minus]`.
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    /// The outcome as a signed value, +1.0 or −1.0.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    /// Single-character label, `+` or `-`, used in outcome histories.
    pub fn label(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }
}

/// A normalized two-qubit pure state.
///
/// The unit-norm invariant is enforced at construction; all operations in
/// this crate preserve it, so a value of this type can always be fed back in
/// without re-checking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    /// Builds a state from amplitudes ordered `|00⟩, |01⟩, |10⟩, |11⟩`.
    ///
    /// Rejects vectors whose squared norm deviates from one by more than
    /// [`NORM_TOL`].
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let deviation = math::abs(norm_sq - 1.0);
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "two-qubit state",
                deviation,
            });
        }
        Ok(Self { amps })
    }

    /// The four amplitudes, ordered `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amps(&self) -> &[Complex64; 4] {
        &self.amps
    }

    /// The amplitudes as a 2×2 matrix `ψ[i][j] = ⟨ij|ψ⟩`, rows indexing
    /// Alice's qubit and columns Bob's.
    pub fn amplitude_matrix(&self) -> Mat2 {
        Mat2::new([[self.amps[0], self.amps[1]], [self.amps[2], self.amps[3]]])
    }

    pub(crate) fn from_matrix_unchecked(m: Mat2) -> Self {
        Self {
            amps: [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]],
        }
    }

    /// Overlap fidelity `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        let mut overlap = Complex64::new(0.0, 0.0);
        for k in 0..4 {
            overlap += self.amps[k].conj() * other.amps[k];
        }
        overlap.norm_sqr()
    }

    /// Applies a local operator pair `A ⊗ B` without normalizing, returning
    /// the raw image vector as a matrix (`A · ψ · Bᵀ`).
    pub(crate) fn apply_local(&self, a: &Mat2, b: &Mat2) -> Mat2 {
        // (A ⊗ B)|ψ⟩ reshapes to A · Ψ · Bᵀ on the amplitude matrix.
        let bt = Mat2::new([[b[(0, 0)], b[(1, 0)]], [b[(0, 1)], b[(1, 1)]]]);
        *a * self.amplitude_matrix() * bt
    }
}

/// Squared norm of `(A ⊗ B)|ψ⟩` for local operators, identity where `None` —
/// the unnormalized branch probability of a local outcome pair.
pub(crate) fn image_norm_sq(state: &TwoQubitState, a: Option<&Mat2>, b: Option<&Mat2>) -> f64 {
    let id = Mat2::identity();
    let image = state.apply_local(a.unwrap_or(&id), b.unwrap_or(&id));
    image[(0, 0)].norm_sqr()
        + image[(0, 1)].norm_sqr()
        + image[(1, 0)].norm_sqr()
        + image[(1, 1)].norm_sqr()
}

/// States of the form `cos(θ)|00⟩ + sin(θ)|11⟩` for θ ∈ [0, π/2].
pub fn make_state(theta: f64) -> Result<TwoQubitState> {
    if !(0.0..=core::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::AngleOutOfRange {
            name: "theta",
            value: theta,
            min: 0.0,
            max: core::f64::consts::FRAC_PI_2,
        });
    }
    Ok(TwoQubitState {
        amps: [re(math::cos(theta)), re(0.0), re(0.0), re(math::sin(theta))],
    })
}

/// A ±1-valued single-qubit observable `n⃗ · σ⃗` given by its unit Bloch
/// vector.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlochObservable {
    n: [f64; 3],
}

impl BlochObservable {
    /// Builds an observable from a Bloch vector, rejecting non-unit input
    /// (|n| must be 1 within [`NORM_TOL`]).
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = math::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        if math::abs(norm - 1.0) > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "Bloch vector",
                deviation: math::abs(norm - 1.0),
            });
        }
        Ok(Self { n })
    }

    /// σ_x, the Bloch direction (1, 0, 0).
    pub fn x() -> Self {
        Self { n: [1.0, 0.0, 0.0] }
    }

    /// σ_y, the Bloch direction (0, 1, 0).
    pub fn y() -> Self {
        Self { n: [0.0, 1.0, 0.0] }
    }

    /// σ_z, the Bloch direction (0, 0, 1).
    pub fn z() -> Self {
        Self { n: [0.0, 0.0, 1.0] }
    }

    /// Unit direction from spherical angles: polar measured from +z,
    /// azimuth from +x in the x–y plane.
    pub fn from_polar(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = (math::sin(polar), math::cos(polar));
        Self {
            n: [sp * math::cos(azimuth), sp * math::sin(azimuth), cp],
        }
    }

    /// The Bloch vector.
    pub fn bloch(&self) -> [f64; 3] {
        self.n
    }

    /// The observable as a Hermitian traceless matrix `n⃗ · σ⃗`.
    pub fn matrix(&self) -> Mat2 {
        let [nx, ny, nz] = self.n;
        Mat2::new([
            [re(nz), Complex64::new(nx, -ny)],
            [Complex64::new(nx, ny), re(-nz)],
        ])
    }

    /// Projector onto the ±1 eigenspace, `(1 ± n⃗·σ⃗)/2`.
    pub fn projector(&self, outcome: Outcome) -> Mat2 {
        let s = outcome.sign() / 2.0;
        let [nx, ny, nz] = self.n;
        Mat2::new([
            [re(0.5 + s * nz), Complex64::new(s * nx, -s * ny)],
            [Complex64::new(s * nx, s * ny), re(0.5 - s * nz)],
        ])
    }

    /// Conjugates the observable by a unitary, `U (n⃗·σ⃗) U†`, returning the
    /// rotated Bloch direction. The result is renormalized to absorb
    /// roundoff from the matrix product.
    pub fn conjugated_by(&self, u: &Mat2) -> Self {
        let m = *u * self.matrix() * u.adjoint();
        // A Hermitian traceless 2×2 matrix reads its Bloch components off
        // the first column and the diagonal.
        let nx = m[(1, 0)].re;
        let ny = m[(1, 0)].im;
        let nz = m[(0, 0)].re;
        let norm = math::sqrt(nx * nx + ny * ny + nz * nz);
        Self {
            n: [nx / norm, ny / norm, nz / norm],
        }
    }
}

/// The two-outcome weak x measurement of strength ξ ∈ [0, π/4].
///
/// Its Kraus operators are `M_{±1} = cos(ξ)|±⟩⟨±| + sin(ξ)|∓⟩⟨∓|` in the
/// Hadamard basis `|±⟩ = (|0⟩ ± |1⟩)/√2`. At ξ = 0 the measurement is the
/// projective σ_x; at ξ = π/4 it does not disturb the state at all. Its
/// effective ±1 observable is `cos(2ξ)·σ_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KrausPair {
    xi: f64,
}

impl KrausPair {
    /// Builds the pair, rejecting ξ outside [0, π/4].
    pub fn new(xi: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&xi) {
            return Err(Error::AngleOutOfRange {
                name: "xi",
                value: xi,
                min: 0.0,
                max: FRAC_PI_4,
            });
        }
        Ok(Self { xi })
    }

    /// The strength parameter ξ.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// The Kraus operator for the given outcome.
    pub fn operator(&self, outcome: Outcome) -> Mat2 {
        let c = math::cos(self.xi);
        let s = math::sin(self.xi);
        let diag = (c + s) / 2.0;
        let off = outcome.sign() * (c - s) / 2.0;
        Mat2::from_real([[diag, off], [off, diag]])
    }

    /// Damping factor cos(2ξ) relating every correlator of this measurement
    /// to its projective (ξ = 0) counterpart.
    pub fn damping(&self) -> f64 {
        math::cos(2.0 * self.xi)
    }
}

/// Applies one weak-measurement outcome on Bob's qubit.
///
/// Returns the normalized post-measurement state `(1 ⊗ M_b)|ψ⟩ / ‖·‖` and
/// the outcome probability `‖(1 ⊗ M_b)|ψ⟩‖²`. A branch whose norm falls
/// below [`DEGENERATE_BRANCH_NORM`] is reported as degenerate instead of
/// being normalized.
pub fn apply_kraus_bob(
    state: &TwoQubitState,
    kraus: &KrausPair,
    outcome: Outcome,
) -> Result<(TwoQubitState, f64)> {
    let m = kraus.operator(outcome);
    let image = state.apply_local(&Mat2::identity(), &m);
    let prob = image[(0, 0)].norm_sqr()
        + image[(0, 1)].norm_sqr()
        + image[(1, 0)].norm_sqr()
        + image[(1, 1)].norm_sqr();
    if math::sqrt(prob) < DEGENERATE_BRANCH_NORM {
        return Err(Error::DegenerateBranch { norm_sq: prob });
    }
    let inv = re(1.0 / math::sqrt(prob));
    let normalized = Mat2::new([
        [image[(0, 0)] * inv, image[(0, 1)] * inv],
        [image[(1, 0)] * inv, image[(1, 1)] * inv],
    ]);
    Ok((TwoQubitState::from_matrix_unchecked(normalized), prob))
}

/// Expectation value `⟨ψ| Â ⊗ B̂ |ψ⟩` of local ±1 observables; `None` stands
/// for the identity on that side. The result is real and clamped to [−1, 1].
pub fn expectation(
    state: &TwoQubitState,
    obs_a: Option<&BlochObservable>,
    obs_b: Option<&BlochObservable>,
) -> f64 {
    let a = obs_a.map_or_else(Mat2::identity, |o| o.matrix());
    let b = obs_b.map_or_else(Mat2::identity, |o| o.matrix());
    let image = state.apply_local(&a, &b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &amp) in state.amps.iter().enumerate() {
        let (i, j) = (k / 2, k % 2);
        acc += amp.conj() * image[(i, j)];
    }
    debug_assert!(math::abs(acc.im) < 1e-12, "expectation not real: {acc}");
    acc.re.clamp(-1.0, 1.0)
}

/// A Schmidt decomposition `(u_a ⊗ u_b)(cos(θ)|00⟩ + sin(θ)|11⟩)` of a
/// two-qubit pure state.
///
/// Coefficients are ordered descending, so θ ∈ [0, π/4]. The basis phases
/// follow a fixed convention — in each column of `u_a` the component of
/// largest modulus is real and positive — so equal inputs decompose to equal
/// forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtForm {
    /// Schmidt angle, `cos θ` and `sin θ` being the two coefficients.
    pub theta: f64,
    /// Alice-side unitary.
    pub u_a: Mat2,
    /// Bob-side unitary.
    pub u_b: Mat2,
}

impl SchmidtForm {
    /// Rebuilds the state this form represents.
    pub fn reconstruct(&self) -> TwoQubitState {
        let sig = [math::cos(self.theta), math::sin(self.theta)];
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &s) in sig.iter().enumerate() {
                    acc += re(s) * self.u_a[(i, k)] * self.u_b[(j, k)];
                }
                amps[2 * i + j] = acc;
            }
        }
        // Unitary factors and unit coefficients keep the norm at one up to
        // roundoff far below NORM_TOL.
        TwoQubitState::new(amps).expect("reconstruction preserves the norm")
    }
}

fn perp(v: [Complex64; 2]) -> [Complex64; 2] {
    [-v[1].conj(), v[0].conj()]
}

fn scale(v: [Complex64; 2], s: Complex64) -> [Complex64; 2] {
    [v[0] * s, v[1] * s]
}

/// Given a right vector `v1` for the leading singular value, completes the
/// factor pair: left vectors by image-and-complement, phases fixed so the
/// second diagonal entry of `U† m V` is real nonnegative.
fn complete_factors(m: &Mat2, v1: [Complex64; 2]) -> (Mat2, Mat2) {
    let image = m.apply(v1);
    let inv = re(1.0 / math::sqrt(mat2::norm_sq(image)));
    let u1 = scale(image, inv);
    let v2 = perp(v1);
    let mut u2 = perp(u1);
    let s2 = mat2::inner(u2, m.apply(v2));
    let mag = s2.norm();
    if mag > 0.0 {
        u2 = scale(u2, s2 / re(mag));
    }
    let mut u = Mat2::from_columns(u1, u2);
    let mut v = Mat2::from_columns(v1, v2);
    fix_column_phases(&mut u, &mut v);
    (u, v)
}

/// Makes the largest-modulus component of each left column real positive,
/// rotating the paired right column by the same phase so the product
/// `Σ σ_k u_k v_k†` is untouched.
fn fix_column_phases(u: &mut Mat2, v: &mut Mat2) {
    let mut ucols = [u.column(0), u.column(1)];
    let mut vcols = [v.column(0), v.column(1)];
    for k in 0..2 {
        let col = ucols[k];
        let pick = if col[0].norm_sqr() >= col[1].norm_sqr() {
            col[0]
        } else {
            col[1]
        };
        let mag = pick.norm();
        if mag > 0.0 {
            let phase = (pick / re(mag)).conj();
            ucols[k] = scale(ucols[k], phase);
            vcols[k] = scale(vcols[k], phase);
        }
    }
    *u = Mat2::from_columns(ucols[0], ucols[1]);
    *v = Mat2::from_columns(vcols[0], vcols[1]);
}

fn lex_distance_key(m: &Mat2) -> [f64; 4] {
    [
        (m[(0, 0)] - re(1.0)).norm(),
        m[(0, 1)].norm(),
        m[(1, 0)].norm(),
        (m[(1, 1)] - re(1.0)).norm(),
    ]
}

fn lex_less(a: &[f64; 4], b: &[f64; 4]) -> bool {
    for k in 0..4 {
        if a[k] < b[k] {
            return true;
        }
        if a[k] > b[k] {
            return false;
        }
    }
    false
}

/// Schmidt decomposition of a two-qubit pure state.
///
/// Every pure state admits one, so this cannot fail. Singular values come
/// from the eigenvalues of the 2×2 Gram matrix, with the smaller one taken
/// as `det/λ₁` to avoid cancellation; the left factor is completed by
/// orthogonality rather than by dividing by a possibly tiny singular value.
/// On (near-)degenerate coefficients the right basis is fixed to the
/// computational ordering whose Alice unitary is lexicographically closest
/// to the identity.
pub fn schmidt(state: &TwoQubitState) -> SchmidtForm {
    let m = state.amplitude_matrix();
    let g = m.adjoint() * m;
    let b00 = g[(0, 0)].re;
    let b11 = g[(1, 1)].re;
    let b01 = g[(0, 1)];

    let trace = b00 + b11;
    let det_sq = m.det().norm_sqr();
    let disc = (trace * trace - 4.0 * det_sq).max(0.0);
    let gap = math::sqrt(disc);
    let lam1 = (trace + gap) / 2.0;
    let lam2 = if lam1 > 0.0 { det_sq / lam1 } else { 0.0 };
    let sig1 = math::sqrt(lam1);
    let sig2 = math::sqrt(lam2);
    let theta = math::atan2(sig2, sig1);

    let (u, v) = if gap <= SCHMIDT_DEGENERATE_GAP * trace {
        let e0 = [re(1.0), re(0.0)];
        let e1 = [re(0.0), re(1.0)];
        let cand0 = complete_factors(&m, e0);
        let cand1 = complete_factors(&m, e1);
        let (k0, k1) = (lex_distance_key(&cand0.0), lex_distance_key(&cand1.0));
        if lex_less(&k1, &k0) {
            cand1
        } else {
            cand0
        }
    } else {
        // Eigenvector of the Gram matrix for λ₁; of the two closed forms,
        // the larger-norm one is the better conditioned.
        let w_a = [b01, re(lam1 - b00)];
        let w_b = [re(lam1 - b11), b01.conj()];
        let w = if mat2::norm_sq(w_a) >= mat2::norm_sq(w_b) {
            w_a
        } else {
            w_b
        };
        let inv = re(1.0 / math::sqrt(mat2::norm_sq(w)));
        complete_factors(&m, scale(w, inv))
    };

    SchmidtForm {
        theta,
        u_a: u,
        u_b: v.conj(),
    }
}

/// Branch angle after one weak x measurement, in cancellation-free form.
///
/// A state of angle θ hit by a strength-ξ weak measurement leaves (for
/// either outcome) a state of angle θ′ with
/// `sin²θ′ = x / (2(1 + √(1 − x)))`, `x = sin²(2θ)·sin²(2ξ)` — the rewrite
/// of `(1 − √(1 − x))/2` that stays exact for x near zero, keeping double
/// precision valid down to θ′ around 1e-150. Expects θ, ξ ∈ [0, π/4].
pub fn branch_angle_stable(theta: f64, xi: f64) -> f64 {
    debug_assert!((0.0..=FRAC_PI_4 + 1e-12).contains(&theta));
    debug_assert!((0.0..=FRAC_PI_4 + 1e-12).contains(&xi));
    let s_th = math::sin(2.0 * theta);
    let s_xi = math::sin(2.0 * xi);
    let x = (s_th * s_th * s_xi * s_xi).min(1.0);
    let sin_sq = x / (2.0 * (1.0 + math::sqrt(1.0 - x)));
    math::asin(math::sqrt(sin_sq))
}
