use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use qgame::games::expected_payoffs;
use qgame::linalg::{kron, DensityMatrix4, Ket4, Mat2, Mat4, C64};
use qgame::protocol::{
    classical_payoffs_direct, entangler, output_state, strategy_unitary, PayoffKernel,
    StrategyFeatures,
};
use qgame::{
    builtin_game, classical_payoffs, outcome_distribution, quantum_payoffs, BasisPair,
    BimatrixGame, ClassicalMove, CorruptionRate, GameId, MixedStrategy, OutcomeDistribution,
    StrategyParams,
};

fn strategy() -> impl Strategy<Value = StrategyParams> {
    (0.0..=PI, 0.0..=FRAC_PI_2).prop_map(|(t, p)| StrategyParams::new(t, p).unwrap())
}

fn rate() -> impl Strategy<Value = CorruptionRate> {
    (0.0..=1.0f64).prop_map(|r| CorruptionRate::new(r).unwrap())
}

fn game() -> impl Strategy<Value = BimatrixGame> {
    prop::array::uniform8(-10.0..10.0f64).prop_map(|v| {
        BimatrixGame::new(
            "random",
            ["0", "1"],
            ["0", "1"],
            [[[v[0], v[1]], [v[2], v[3]]], [[v[4], v[5]], [v[6], v[7]]]],
        )
        .unwrap()
    })
}

fn builtin() -> impl Strategy<Value = BimatrixGame> {
    prop::sample::select(GameId::ALL.to_vec()).prop_map(builtin_game)
}

fn mat2() -> impl Strategy<Value = Mat2> {
    prop::array::uniform8(-1.0..1.0f64).prop_map(|v| {
        Mat2([
            [C64::new(v[0], v[1]), C64::new(v[2], v[3])],
            [C64::new(v[4], v[5]), C64::new(v[6], v[7])],
        ])
    })
}

fn random_state() -> impl Strategy<Value = DensityMatrix4> {
    (
        prop::array::uniform8(-1.0..1.0f64),
        prop::array::uniform4(0.0..1.0f64),
    )
        .prop_map(|(v, w)| {
            // mixture of two random pure states
            let ket = |o: usize| {
                let k = Ket4([
                    C64::new(v[o], v[o + 1]),
                    C64::new(v[o + 2], v[o + 3]),
                    C64::new(w[0] + 0.1, v[(o + 4) % 8]),
                    C64::new(w[1], 0.0),
                ]);
                let n = k.norm_sqr().sqrt();
                Ket4(k.0.map(|c| c / n))
            };
            let a = DensityMatrix4::pure(&ket(0)).unwrap();
            let b = DensityMatrix4::pure(&ket(4)).unwrap();
            DensityMatrix4::mixture(&[(w[2], a), (1.0 - w[2], b)]).unwrap()
        })
}

fn max_diff(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kron_mixed_product(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn conjugation_composes_and_keeps_trace(rho in random_state(), s in strategy(), t in strategy(), u in strategy(), v in strategy()) {
        let x = kron(&s.unitary(), &t.unitary());
        let y = kron(&u.unitary(), &v.unitary());
        let twice = rho.conjugate_by(&x).unwrap().conjugate_by(&y).unwrap();
        let once = rho.conjugate_by(&y.matmul(&x)).unwrap();
        prop_assert!(twice.mat().max_abs_diff(once.mat()) < 1e-12);
        prop_assert!((twice.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unitaries_are_unitary(s in strategy()) {
        let u = strategy_unitary(s);
        prop_assert!(u.matmul(&u.adjoint()).max_abs_diff(&Mat2::identity()) < 1e-12);
        prop_assert!((u.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
        let j = entangler();
        prop_assert!(j.matmul(&j.adjoint()).max_abs_diff(&Mat4::identity()) < 1e-12);
    }

    #[test]
    fn outcome_probabilities_are_normalized(r in rate(), a in strategy(), b in strategy(), base in prop::sample::select(BasisPair::ALL.to_vec())) {
        let p = outcome_distribution(r, a, b, base).probs();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(p.iter().all(|x| *x >= -1e-12));
        let rho = output_state(r, a, b, base);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_decomposition(r in rate(), a in strategy(), b in strategy()) {
        let x = r.value();
        let zero = CorruptionRate::new(0.0).unwrap();
        let weights = [(1.0 - x) * (1.0 - x), x * (1.0 - x), x * (1.0 - x), x * x];
        let mut mix = [0.0; 4];
        for (w, base) in weights.iter().zip(BasisPair::ALL) {
            let p = outcome_distribution(zero, a, b, base).probs();
            for n in 0..4 {
                mix[n] += w * p[n];
            }
        }
        let direct = outcome_distribution(r, a, b, BasisPair::default()).probs();
        prop_assert!(max_diff(direct, mix) < 1e-12);
    }

    #[test]
    fn classical_moves_commute_with_the_circuit(g in game(), r in rate(), pa in 0.0..=1.0f64, pb in 0.0..=1.0f64, base in prop::sample::select(BasisPair::ALL.to_vec())) {
        let (ma, mb) = (ClassicalMove::new(pa).unwrap(), ClassicalMove::new(pb).unwrap());
        let circuit = classical_payoffs(&g, r, ma, mb, base);
        let direct = classical_payoffs_direct(&g, r, ma, mb, base);
        prop_assert!(circuit.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn payoffs_are_quadratic_in_r(g in builtin(), a in strategy(), b in strategy(), r in 0.0..=1.0f64) {
        let at = |x: f64| quantum_payoffs(&g, CorruptionRate::new(x).unwrap(), a, b, BasisPair::default());
        let (p0, ph, p1) = (at(0.0), at(0.5), at(1.0));
        // Lagrange basis on nodes 0, 1/2, 1
        let l0 = 2.0 * (r - 0.5) * (r - 1.0);
        let lh = -4.0 * r * (r - 1.0);
        let l1 = 2.0 * r * (r - 0.5);
        let got = at(r);
        prop_assert!((l0 * p0.a + lh * ph.a + l1 * p1.a - got.a).abs() < 1e-9);
        prop_assert!((l0 * p0.b + lh * ph.b + l1 * p1.b - got.b).abs() < 1e-9);
    }

    #[test]
    fn prisoners_dilemma_is_symmetric(r in rate(), a in strategy(), b in strategy()) {
        let pd = builtin_game(GameId::PD);
        let ab = quantum_payoffs(&pd, r, a, b, BasisPair::default());
        let ba = quantum_payoffs(&pd, r, b, a, BasisPair::default());
        prop_assert!(ab.max_abs_diff(&ba.swap()) < 1e-12);
    }

    #[test]
    fn classical_pd_swap_is_exact(pa in 0.0..=1.0f64, pb in 0.0..=1.0f64) {
        let pd = builtin_game(GameId::PD);
        let (a, b) = (MixedStrategy::new(pa).unwrap(), MixedStrategy::new(pb).unwrap());
        prop_assert_eq!(pd.mixed_payoffs(a, b), pd.mixed_payoffs(b, a).swap());
    }

    #[test]
    fn expected_payoffs_are_linear(g in game(), w in prop::array::uniform8(0.0..1.0f64), alpha in 0.0..=1.0f64) {
        let norm = |v: &[f64]| {
            let s: f64 = v.iter().sum::<f64>() + 1e-3;
            [v[0] + 2.5e-4, v[1] + 2.5e-4, v[2] + 2.5e-4, v[3] + 2.5e-4].map(|x| x / s)
        };
        let (d1, d2) = (norm(&w[..4]), norm(&w[4..]));
        let mixed: Vec<f64> = d1.iter().zip(&d2).map(|(x, y)| alpha * x + (1.0 - alpha) * y).collect();
        let e = |d: [f64; 4]| expected_payoffs(&g, &OutcomeDistribution::new(d).unwrap());
        let lhs = e([mixed[0], mixed[1], mixed[2], mixed[3]]);
        let (e1, e2) = (e(d1), e(d2));
        prop_assert!((lhs.a - (alpha * e1.a + (1.0 - alpha) * e2.a)).abs() < 1e-12);
        prop_assert!((lhs.b - (alpha * e1.b + (1.0 - alpha) * e2.b)).abs() < 1e-12);
    }

    #[test]
    fn kernel_matches_density_matrix_path(g in game(), r in rate(), a in strategy(), b in strategy(), base in prop::sample::select(BasisPair::ALL.to_vec())) {
        let k = PayoffKernel::new(&g, r, base);
        let fast = k.payoffs(&StrategyFeatures::of(a), &StrategyFeatures::of(b));
        let slow = quantum_payoffs(&g, r, a, b, base);
        prop_assert!(fast.max_abs_diff(&slow) < 1e-10 * (1.0 + g.payoff_span()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn half_corruption_is_uniform(g in builtin(), a in strategy(), b in strategy()) {
        let half = CorruptionRate::new(0.5).unwrap();
        let p = outcome_distribution(half, a, b, BasisPair::default()).probs();
        prop_assert!(max_diff(p, [0.25; 4]) < 1e-12);
        prop_assert!(quantum_payoffs(&g, half, a, b, BasisPair::default()).max_abs_diff(&g.mean_payoff()) < 1e-12);
    }

    #[test]
    fn risk_free_profile_ignores_r(g in builtin(), r in rate()) {
        let s = StrategyParams::risk_free();
        let at = |x: CorruptionRate| quantum_payoffs(&g, x, s, s, BasisPair::default());
        prop_assert!(at(r).max_abs_diff(&at(CorruptionRate::new(0.0).unwrap())) < 1e-12);
    }
}
