//! The entangling referee scheme fed by a corrupt two-qubit source.
//!
//! The referee applies `J` to the source state, each player applies a local
//! `U(θ, φ)` to their own qubit (Alice owns the first tensor factor), the
//! referee undoes the entanglement with `J†` and measures in the computational
//! basis. All evolution is done on density matrices.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{
    expected_payoffs, BimatrixGame, MixedStrategy, OutcomeDistribution, PayoffPair,
};
use crate::linalg::{kron, DensityMatrix4, Ket4, Mat2, Mat4, C64, ZERO};

/// A point `(θ, φ)` of the two-parameter strategy set, `θ ∈ [0, π]`, `φ ∈ [0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    theta: f64,
    phi: f64,
}

impl StrategyParams {
    pub const THETA_MAX: f64 = PI;
    pub const PHI_MAX: f64 = FRAC_PI_2;

    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=Self::THETA_MAX).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                lo: 0.0,
                hi: Self::THETA_MAX,
            });
        }
        if !(0.0..=Self::PHI_MAX).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                lo: 0.0,
                hi: Self::PHI_MAX,
            });
        }
        Ok(Self { theta, phi })
    }

    /// Clamps into the strategy set; only for optimizer-internal points.
    pub(crate) fn clamped(theta: f64, phi: f64) -> Self {
        Self {
            theta: theta.clamp(0.0, Self::THETA_MAX),
            phi: phi.clamp(0.0, Self::PHI_MAX),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `σ₀`.
    pub fn identity() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// `iσ_y`.
    pub fn flip() -> Self {
        Self {
            theta: PI,
            phi: 0.0,
        }
    }

    /// `iσ_z`.
    pub fn i_sigma_z() -> Self {
        Self {
            theta: 0.0,
            phi: FRAC_PI_2,
        }
    }

    /// `(σ₀ + iσ_y)/√2`, whose payoffs do not depend on the corruption rate.
    pub fn risk_free() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    /// At `θ = π` the phase has no effect; such points are reported with `φ = 0`.
    pub fn canonical(self) -> Self {
        if self.theta >= PI - 1e-12 {
            Self {
                theta: PI,
                phi: 0.0,
            }
        } else {
            self
        }
    }

    pub fn unitary(&self) -> Mat2 {
        strategy_unitary(*self)
    }
}

/// Probability that each single-qubit source emits the flipped state.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CorruptionRate(f64);

impl CorruptionRate {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The intended source bits `|f⟩|g⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisPair {
    pub f: u8,
    pub g: u8,
}

impl BasisPair {
    pub const ALL: [BasisPair; 4] = [
        BasisPair { f: 0, g: 0 },
        BasisPair { f: 0, g: 1 },
        BasisPair { f: 1, g: 0 },
        BasisPair { f: 1, g: 1 },
    ];

    pub fn new(f: u8, g: u8) -> Result<Self> {
        if f > 1 || g > 1 {
            return Err(Error::InvalidArgument(format!(
                "basis bits must be 0/1, got ({f},{g})"
            )));
        }
        Ok(Self { f, g })
    }

    pub fn index(&self) -> usize {
        2 * self.f as usize + self.g as usize
    }
}

/// A classical move: `σ₀` with probability `p0`, `iσ_y` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMove {
    pub mix: MixedStrategy,
}

impl ClassicalMove {
    pub fn new(p0: f64) -> Result<Self> {
        Ok(Self {
            mix: MixedStrategy::new(p0)?,
        })
    }

    pub fn pure(action: usize) -> Self {
        Self {
            mix: MixedStrategy::pure(action),
        }
    }

    pub fn p0(&self) -> f64 {
        self.mix.p0()
    }
}

impl From<MixedStrategy> for ClassicalMove {
    fn from(mix: MixedStrategy) -> Self {
        Self { mix }
    }
}

/// `J|fg⟩ = (|fg⟩ + i(−1)^(f+g) |f̄ḡ⟩)/√2`, built column by column.
pub fn entangler() -> Mat4 {
    let mut j = Mat4::zeros();
    for f in 0..2usize {
        for g in 0..2usize {
            let col = 2 * f + g;
            let partner = 2 * (1 - f) + (1 - g);
            let sign = if (f + g) % 2 == 0 { 1.0 } else { -1.0 };
            j[(col, col)] += C64::new(FRAC_1_SQRT_2, 0.0);
            j[(partner, col)] += C64::new(0.0, sign * FRAC_1_SQRT_2);
        }
    }
    j
}

/// `U(θ, φ) = [[e^{iφ} cos(θ/2), sin(θ/2)], [−sin(θ/2), e^{−iφ} cos(θ/2)]]`.
pub fn strategy_unitary(s: StrategyParams) -> Mat2 {
    let (sin, cos) = (0.5 * s.theta).sin_cos();
    let phase = C64::from_polar(1.0, s.phi);
    Mat2([
        [phase * cos, C64::new(sin, 0.0)],
        [C64::new(-sin, 0.0), phase.conj() * cos],
    ])
}

/// Diagonal source state: each intended bit flipped independently with probability `r`.
pub fn corrupt_input(r: CorruptionRate, base: BasisPair) -> DensityMatrix4 {
    let r = r.value();
    let bit = |intended: u8, actual: usize| {
        if intended as usize == actual {
            1.0 - r
        } else {
            r
        }
    };
    let mut diag = [ZERO; 4];
    for (n, d) in diag.iter_mut().enumerate() {
        *d = C64::new(bit(base.f, n >> 1) * bit(base.g, n & 1), 0.0);
    }
    DensityMatrix4::new_unchecked(Mat4::diag(diag))
}

/// The four maximally entangled states `(|00⟩ ∓ i|11⟩)/√2` and `(|01⟩ ∓ i|10⟩)/√2`.
pub fn bell_states() -> [Ket4; 4] {
    let h = FRAC_1_SQRT_2;
    let psi = |s: f64| Ket4([C64::new(h, 0.0), ZERO, ZERO, C64::new(0.0, s * h)]);
    let phi = |s: f64| Ket4([ZERO, C64::new(h, 0.0), C64::new(0.0, s * h), ZERO]);
    // ψ⁺, ψ⁻, φ⁺, φ⁻; J maps |00⟩, |11⟩, |10⟩, |01⟩ onto these up to phase
    [psi(1.0), psi(-1.0), phi(1.0), phi(-1.0)]
}

/// `(1−r)² ψ⁺ + r² ψ⁻ + r(1−r)(φ⁺ + φ⁻)`, the entangler output for the corrupt source.
pub fn entangled_mixture(r: CorruptionRate) -> DensityMatrix4 {
    let r = r.value();
    let weights = [(1.0 - r) * (1.0 - r), r * r, r * (1.0 - r), r * (1.0 - r)];
    let mut acc = Mat4::zeros();
    for (w, ket) in weights.iter().zip(bell_states()) {
        acc = acc + ket.projector().scale(C64::new(*w, 0.0));
    }
    DensityMatrix4::new_unchecked(acc)
}

/// Referee output `J† (U_A ⊗ U_B) J ρ_in J† (U_A ⊗ U_B)† J`, before measurement.
pub fn output_state(
    r: CorruptionRate,
    alice: StrategyParams,
    bob: StrategyParams,
    base: BasisPair,
) -> DensityMatrix4 {
    let j = entangler();
    let local = kron(&alice.unitary(), &bob.unitary());
    let circuit = j.adjoint().matmul(&local).matmul(&j);
    corrupt_input(r, base).conjugate_unchecked(&circuit)
}

pub fn outcome_distribution(
    r: CorruptionRate,
    alice: StrategyParams,
    bob: StrategyParams,
    base: BasisPair,
) -> OutcomeDistribution {
    let pops = output_state(r, alice, bob, base).populations();
    OutcomeDistribution::new(pops).expect("unitary evolution preserves normalization")
}

pub fn quantum_payoffs(
    game: &BimatrixGame,
    r: CorruptionRate,
    alice: StrategyParams,
    bob: StrategyParams,
    base: BasisPair,
) -> PayoffPair {
    expected_payoffs(game, &outcome_distribution(r, alice, bob, base))
}

/// Classical moves played through the full circuit: the convex combination of
/// the four pure operator pairs `σ₀ / iσ_y`.
pub fn classical_payoffs(
    game: &BimatrixGame,
    r: CorruptionRate,
    alice: ClassicalMove,
    bob: ClassicalMove,
    base: BasisPair,
) -> PayoffPair {
    let ops = [StrategyParams::identity(), StrategyParams::flip()];
    let (wa, wb) = (alice.mix.weights(), bob.mix.weights());
    let mut out = PayoffPair::new(0.0, 0.0);
    for (ia, pa) in wa.iter().enumerate() {
        for (ib, pb) in wb.iter().enumerate() {
            if *pa == 0.0 || *pb == 0.0 {
                continue;
            }
            let p = quantum_payoffs(game, r, ops[ia], ops[ib], base);
            out.a += pa * pb * p.a;
            out.b += pa * pb * p.b;
        }
    }
    out
}

/// Classical moves without any quantum machinery: each outcome bit is the
/// intended bit, XOR an independent source flip, XOR the player's move flip.
pub fn classical_payoffs_direct(
    game: &BimatrixGame,
    r: CorruptionRate,
    alice: ClassicalMove,
    bob: ClassicalMove,
    base: BasisPair,
) -> PayoffPair {
    let r = r.value();
    let bit_dist = |intended: u8, mv: ClassicalMove| {
        // probability that the delivered bit is 1
        let source_one = if intended == 0 { r } else { 1.0 - r };
        let flip = 1.0 - mv.p0();
        let one = source_one * (1.0 - flip) + (1.0 - source_one) * flip;
        [1.0 - one, one]
    };
    let da = bit_dist(base.f, alice);
    let db = bit_dist(base.g, bob);
    let mut out = PayoffPair::new(0.0, 0.0);
    for (j, pj) in da.iter().enumerate() {
        for (l, pl) in db.iter().enumerate() {
            let cell = game.payoff(j, l);
            out.a += pj * pl * cell.a;
            out.b += pj * pl * cell.b;
        }
    }
    out
}

/// Payoffs as a bilinear form in per-player features.
///
/// With `K = U_A ⊗ U_B`, every outcome probability is a sum of products
/// `U_A[k₁,l₁]·conj(U_A[k₁',l₁'])` times the matching Bob product, so
/// `$_X = Re(f_Aᵀ M_X f_B)` with 16-component features `f` and fixed 16×16
/// kernels `M_X` for a given game, rate and source. Grid searches evaluate
/// millions of profiles through this form; [`quantum_payoffs`] remains the
/// reference path.
#[derive(Clone, Debug)]
pub struct PayoffKernel {
    alice: [[C64; 16]; 16],
    bob: [[C64; 16]; 16],
}

/// Per-player feature vector `f[(k,l,k',l')] = U[k,l]·conj(U[k',l'])`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyFeatures(pub [C64; 16]);

impl StrategyFeatures {
    pub fn of(s: StrategyParams) -> Self {
        let u = s.unitary();
        let mut f = [ZERO; 16];
        for (idx, v) in f.iter_mut().enumerate() {
            let (k, l, kp, lp) = split4(idx);
            *v = u[(k, l)] * u[(kp, lp)].conj();
        }
        Self(f)
    }

    pub fn dot(&self, h: &[C64; 16]) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.0.iter().zip(h) {
            acc += a.re * b.re - a.im * b.im;
        }
        acc
    }
}

fn split4(idx: usize) -> (usize, usize, usize, usize) {
    ((idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1)
}

impl PayoffKernel {
    pub fn new(game: &BimatrixGame, r: CorruptionRate, base: BasisPair) -> Self {
        let j = entangler();
        let rho1 = corrupt_input(r, base).conjugate_unchecked(&j);
        let rho = rho1.mat();
        let cells = game.outcome_payoffs();
        let mut alice = [[ZERO; 16]; 16];
        let mut bob = [[ZERO; 16]; 16];
        for ia in 0..16 {
            let (k1, l1, k1p, l1p) = split4(ia);
            for ib in 0..16 {
                let (k2, l2, k2p, l2p) = split4(ib);
                let (k, kp) = (2 * k1 + k2, 2 * k1p + k2p);
                let (l, lp) = (2 * l1 + l2, 2 * l1p + l2p);
                let core = rho[(l, lp)];
                if core == ZERO {
                    continue;
                }
                for (n, cell) in cells.iter().enumerate() {
                    let t = j[(k, n)].conj() * core * j[(kp, n)];
                    alice[ia][ib] += t * cell.a;
                    bob[ia][ib] += t * cell.b;
                }
            }
        }
        Self { alice, bob }
    }

    /// `M_A f_B`: Alice's payoff against a fixed Bob is `f_A · h`.
    pub fn alice_response(&self, bob: &StrategyFeatures) -> [C64; 16] {
        mat_vec(&self.alice, &bob.0)
    }

    pub fn bob_response(&self, bob: &StrategyFeatures) -> [C64; 16] {
        mat_vec(&self.bob, &bob.0)
    }

    /// `f_Aᵀ M_A`: Alice's payoff for a fixed Alice is `h · f_B`.
    pub fn alice_row(&self, alice: &StrategyFeatures) -> [C64; 16] {
        vec_mat(&alice.0, &self.alice)
    }

    pub fn bob_row(&self, alice: &StrategyFeatures) -> [C64; 16] {
        vec_mat(&alice.0, &self.bob)
    }

    pub fn payoffs(&self, alice: &StrategyFeatures, bob: &StrategyFeatures) -> PayoffPair {
        PayoffPair::new(
            alice.dot(&self.alice_response(bob)),
            alice.dot(&self.bob_response(bob)),
        )
    }
}

fn mat_vec(m: &[[C64; 16]; 16], v: &[C64; 16]) -> [C64; 16] {
    let mut out = [ZERO; 16];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

fn vec_mat(v: &[C64; 16], m: &[[C64; 16]; 16]) -> [C64; 16] {
    let mut out = [ZERO; 16];
    for (vi, row) in v.iter().zip(m) {
        if *vi == ZERO {
            continue;
        }
        for (o, mij) in out.iter_mut().zip(row) {
            *o += vi * mij;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{builtin_game, GameId};
    use crate::linalg::{trace_distance, I, ONE};
    use std::f64::consts::FRAC_PI_4;

    fn rate(r: f64) -> CorruptionRate {
        CorruptionRate::new(r).unwrap()
    }

    fn sp(t: f64, p: f64) -> StrategyParams {
        StrategyParams::new(t, p).unwrap()
    }

    const BASE: BasisPair = BasisPair { f: 0, g: 0 };

    #[test]
    fn entangler_action_on_basis_states() {
        let j = entangler();
        let h = FRAC_1_SQRT_2;
        let out = j * Ket4::basis(0);
        let expected = Ket4([C64::new(h, 0.0), ZERO, ZERO, I * h]);
        for k in 0..4 {
            assert!((out.0[k] - expected.0[k]).norm() < 1e-15);
        }
        let out = j * Ket4::basis(1);
        let expected = Ket4([ZERO, C64::new(h, 0.0), -I * h, ZERO]);
        for k in 0..4 {
            assert!((out.0[k] - expected.0[k]).norm() < 1e-15);
        }
        assert!(j.adjoint().matmul(&j).max_abs_diff(&Mat4::identity()) < 1e-12);
    }

    #[test]
    fn strategy_unitary_special_points() {
        assert!(strategy_unitary(sp(0.0, 0.0)).max_abs_diff(&Mat2::identity()) < 1e-15);
        for phi in [0.0, 0.4, FRAC_PI_2] {
            let u = strategy_unitary(sp(PI, phi));
            assert!(u.max_abs_diff(&Mat2::i_pauli_y()) < 1e-15);
        }
        let z = strategy_unitary(StrategyParams::i_sigma_z());
        assert!(z.max_abs_diff(&Mat2::diag([I, -I])) < 1e-15);
        let u = strategy_unitary(sp(1.1, 0.7));
        assert!((u.det() - ONE).norm() < 1e-12);
    }

    #[test]
    fn strategy_bounds_are_errors() {
        assert!(StrategyParams::new(-1e-9, 0.0).is_err());
        assert!(StrategyParams::new(PI + 1e-9, 0.0).is_err());
        assert!(StrategyParams::new(0.0, FRAC_PI_2 + 1e-9).is_err());
        assert!(matches!(
            StrategyParams::new(0.0, -0.1),
            Err(Error::OutOfRange { name: "phi", .. })
        ));
        assert!(CorruptionRate::new(1.5).is_err());
        assert!(CorruptionRate::new(-0.01).is_err());
        assert!(BasisPair::new(2, 0).is_err());
    }

    #[test]
    fn corrupt_input_examples() {
        let pure00 = DensityMatrix4::pure(&Ket4::basis(0)).unwrap();
        let pure11 = DensityMatrix4::pure(&Ket4::basis(3)).unwrap();
        assert_eq!(corrupt_input(rate(0.0), BASE), pure00);
        assert_eq!(corrupt_input(rate(1.0), BASE), pure11);
        assert_eq!(
            corrupt_input(rate(0.5), BASE),
            DensityMatrix4::maximally_mixed()
        );
        let rho = corrupt_input(rate(0.3), BasisPair::new(0, 1).unwrap());
        let expected = [0.7 * 0.3, 0.7 * 0.7, 0.3 * 0.3, 0.3 * 0.7];
        for (a, b) in rho.populations().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn entangled_mixture_matches_conjugated_source() {
        for r in [0.0, 0.1, 0.25, 0.5, 0.77, 1.0] {
            let direct = entangled_mixture(rate(r));
            let evolved = corrupt_input(rate(r), BASE)
                .conjugate_by(&entangler())
                .unwrap();
            assert!(trace_distance(&direct, &evolved) < 1e-12, "r = {r}");
        }
        let psi_plus = DensityMatrix4::pure(&bell_states()[0]).unwrap();
        assert!(trace_distance(&entangled_mixture(rate(0.0)), &psi_plus) < 1e-12);
        let half = entangled_mixture(rate(0.5));
        assert!(trace_distance(&half, &DensityMatrix4::maximally_mixed()) < 1e-12);
        let quarter = DensityMatrix4::mixture(&[
            (9.0 / 16.0, DensityMatrix4::pure(&bell_states()[0]).unwrap()),
            (1.0 / 16.0, DensityMatrix4::pure(&bell_states()[1]).unwrap()),
            (3.0 / 16.0, DensityMatrix4::pure(&bell_states()[2]).unwrap()),
            (3.0 / 16.0, DensityMatrix4::pure(&bell_states()[3]).unwrap()),
        ])
        .unwrap();
        assert!(trace_distance(&entangled_mixture(rate(0.25)), &quarter) < 1e-12);
    }

    #[test]
    fn outcome_distribution_examples() {
        let id = StrategyParams::identity();
        let d = outcome_distribution(rate(0.0), id, id, BASE).probs();
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1..].iter().all(|p| p.abs() < 1e-15));
        let flip = StrategyParams::flip();
        let d = outcome_distribution(rate(0.0), flip, flip, BASE).probs();
        assert!((d[3] - 1.0).abs() < 1e-15 && d[..3].iter().all(|p| p.abs() < 1e-15));
        let d = outcome_distribution(rate(0.5), sp(0.3, 1.2), sp(2.9, 0.1), BASE).probs();
        assert!(d.iter().all(|p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn quantum_payoff_table_values() {
        let pd = builtin_game(GameId::PD);
        let sd = builtin_game(GameId::SD);
        let bos = builtin_game(GameId::BoS);
        let q = StrategyParams::i_sigma_z();
        let close = |p: PayoffPair, a: f64, b: f64| p.max_abs_diff(&PayoffPair::new(a, b)) < 1e-12;
        assert!(close(quantum_payoffs(&pd, rate(0.0), q, q, BASE), 3.0, 3.0));
        assert!(close(
            quantum_payoffs(&pd, rate(0.25), q, q, BASE),
            43.0 / 16.0,
            43.0 / 16.0
        ));
        let s = quantum_payoffs(&sd, rate(1.0 / 7.0), q, q, BASE);
        assert!(close(s, 96.0 / 49.0, 96.0 / 49.0), "{s}");
        let f = StrategyParams::flip();
        assert!(close(
            quantum_payoffs(&bos, rate(1.0), f, f, BASE),
            2.0,
            1.0
        ));
        let p4 = sp(0.0, FRAC_PI_4);
        assert!(close(
            quantum_payoffs(&pd, rate(1.0), p4, p4, BASE),
            3.0,
            3.0
        ));
    }

    #[test]
    fn classical_examples() {
        let pd = builtin_game(GameId::PD);
        let flip = ClassicalMove::pure(1);
        let p = classical_payoffs(&pd, rate(0.0), flip, flip, BASE);
        assert!(p.max_abs_diff(&PayoffPair::new(1.0, 1.0)) < 1e-12);
        let p = classical_payoffs(&pd, rate(1.0), flip, flip, BASE);
        assert!(p.max_abs_diff(&PayoffPair::new(3.0, 3.0)) < 1e-12);

        let sd = builtin_game(GameId::SD);
        let (a, b) = (
            ClassicalMove::new(0.5).unwrap(),
            ClassicalMove::new(0.2).unwrap(),
        );
        for k in 0..=10 {
            let r = k as f64 / 10.0;
            let p = classical_payoffs(&sd, rate(r), a, b, BASE);
            assert!((p.b - 1.5).abs() < 1e-12);
            assert!((p.a - (-0.2 + 0.9 * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn circuit_and_direct_classical_agree_for_every_base() {
        let sd = builtin_game(GameId::SD);
        for base in BasisPair::ALL {
            for (pa, pb) in [(0.0, 1.0), (0.3, 0.9), (1.0, 1.0), (0.5, 0.2)] {
                let (a, b) = (
                    ClassicalMove::new(pa).unwrap(),
                    ClassicalMove::new(pb).unwrap(),
                );
                let circuit = classical_payoffs(&sd, rate(0.35), a, b, base);
                let direct = classical_payoffs_direct(&sd, rate(0.35), a, b, base);
                assert!(circuit.max_abs_diff(&direct) < 1e-12, "{base:?}");
            }
        }
    }

    #[test]
    fn kernel_matches_density_matrix_path() {
        let bos = builtin_game(GameId::BoS);
        for base in BasisPair::ALL {
            let kernel = PayoffKernel::new(&bos, rate(0.3), base);
            for (a, b) in [
                (sp(0.2, 0.3), sp(2.0, 1.0)),
                (sp(PI, 0.0), sp(0.0, FRAC_PI_2)),
            ] {
                let fast = kernel.payoffs(&StrategyFeatures::of(a), &StrategyFeatures::of(b));
                let slow = quantum_payoffs(&bos, rate(0.3), a, b, base);
                assert!(fast.max_abs_diff(&slow) < 1e-12, "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn canonical_drops_phase_at_full_flip() {
        assert_eq!(sp(PI, 1.0).canonical(), StrategyParams::flip());
        assert_eq!(sp(1.0, 1.0).canonical(), sp(1.0, 1.0));
    }
}
