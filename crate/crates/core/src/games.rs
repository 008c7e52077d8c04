//! Classical 2×2 bimatrix games.
//!
//! Action index 0 is played by the identity operator `σ₀` and action index 1
//! by the flip `iσ_y`, for both players. Payoff cell `(j, ℓ)` corresponds to
//! measurement outcome `n = 2j + ℓ`, with `j` Alice's bit and `ℓ` Bob's.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Builtin games.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameId {
    /// Prisoner's Dilemma.
    PD,
    /// Samaritan's Dilemma.
    SD,
    /// Battle of Sexes.
    BoS,
}

impl GameId {
    pub const ALL: [GameId; 3] = [GameId::PD, GameId::SD, GameId::BoS];

    pub fn key(self) -> &'static str {
        match self {
            GameId::PD => "pd",
            GameId::SD => "sd",
            GameId::BoS => "bos",
        }
    }
}

impl FromStr for GameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pd" => Ok(GameId::PD),
            "sd" => Ok(GameId::SD),
            "bos" => Ok(GameId::BoS),
            _ => Err(Error::UnknownGame(s.to_string())),
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub a: f64,
    pub b: f64,
}

impl PayoffPair {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn swap(self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }

    pub fn max_abs_diff(&self, other: &PayoffPair) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs())
    }

    pub fn get(&self, player: Player) -> f64 {
        match player {
            Player::Alice => self.a,
            Player::Bob => self.b,
        }
    }
}

impl fmt::Display for PayoffPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

/// A probability `p0` of playing action 0 (`σ₀`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    p0: f64,
}

impl MixedStrategy {
    pub fn new(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::OutOfRange {
                name: "p0",
                value: p0,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self { p0 })
    }

    pub fn pure(action: usize) -> Self {
        Self {
            p0: if action == 0 { 1.0 } else { 0.0 },
        }
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Probabilities of actions 0 and 1.
    pub fn weights(&self) -> [f64; 2] {
        [self.p0, 1.0 - self.p0]
    }
}

/// Probabilities over the four referee outcomes `n = 2j + ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    p: [f64; 4],
}

impl OutcomeDistribution {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter()
            .any(|v| !v.is_finite() || *v < -1e-12 || *v > 1.0 + 1e-12)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry out of [0,1]: {p:?}"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self { p })
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 4] }
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    pub fn get(&self, alice_action: usize, bob_action: usize) -> f64 {
        self.p[2 * alice_action + bob_action]
    }
}

/// Payoff cells of a game file: `[[[a,b],[a,b]],[[a,b],[a,b]]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimatrixGame {
    pub name: String,
    pub alice_actions: [String; 2],
    pub bob_actions: [String; 2],
    /// `payoffs[alice_action][bob_action] = [a, b]`.
    pub payoffs: [[[f64; 2]; 2]; 2],
}

impl BimatrixGame {
    pub fn new(
        name: impl Into<String>,
        alice_actions: [&str; 2],
        bob_actions: [&str; 2],
        payoffs: [[[f64; 2]; 2]; 2],
    ) -> Result<Self> {
        let game = Self {
            name: name.into(),
            alice_actions: alice_actions.map(str::to_string),
            bob_actions: bob_actions.map(str::to_string),
            payoffs,
        };
        game.validate()?;
        Ok(game)
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .payoffs
            .iter()
            .flatten()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidGame(format!(
                "{}: non-finite payoff",
                self.name
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let game: BimatrixGame =
            serde_json::from_str(text).map_err(|e| Error::InvalidGame(e.to_string()))?;
        game.validate()?;
        Ok(game)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game serializes")
    }

    pub fn payoff(&self, alice_action: usize, bob_action: usize) -> PayoffPair {
        let [a, b] = self.payoffs[alice_action][bob_action];
        PayoffPair::new(a, b)
    }

    /// Payoffs indexed by outcome `n = 2j + ℓ`.
    pub fn outcome_payoffs(&self) -> [PayoffPair; 4] {
        [
            self.payoff(0, 0),
            self.payoff(0, 1),
            self.payoff(1, 0),
            self.payoff(1, 1),
        ]
    }

    /// Average over all four cells.
    pub fn mean_payoff(&self) -> PayoffPair {
        expected_payoffs(self, &OutcomeDistribution::uniform())
    }

    /// Largest minus smallest entry over both players' tables.
    pub fn payoff_span(&self) -> f64 {
        let all = self.payoffs.iter().flatten().flatten();
        let hi = all.clone().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = all.copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }

    /// Payoff of independent mixed strategies in the plain classical game.
    pub fn mixed_payoffs(&self, alice: MixedStrategy, bob: MixedStrategy) -> PayoffPair {
        let (wa, wb) = (alice.weights(), bob.weights());
        let mut out = PayoffPair::new(0.0, 0.0);
        for (j, pa) in wa.iter().enumerate() {
            for (l, pb) in wb.iter().enumerate() {
                let cell = self.payoff(j, l);
                out.a += pa * pb * cell.a;
                out.b += pa * pb * cell.b;
            }
        }
        out
    }
}

pub fn builtin_game(id: GameId) -> BimatrixGame {
    let game = match id {
        GameId::PD => BimatrixGame::new(
            "Prisoner's Dilemma",
            ["Deny", "Confess"],
            ["Deny", "Confess"],
            [[[3.0, 3.0], [0.0, 5.0]], [[5.0, 0.0], [1.0, 1.0]]],
        ),
        GameId::SD => BimatrixGame::new(
            "Samaritan's Dilemma",
            ["Aid", "No-aid"],
            ["Work", "Loaf"],
            [[[3.0, 2.0], [-1.0, 3.0]], [[-1.0, 1.0], [0.0, 0.0]]],
        ),
        GameId::BoS => BimatrixGame::new(
            "Battle of Sexes",
            ["Ballet", "Football"],
            ["Ballet", "Football"],
            [[[2.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 2.0]]],
        ),
    };
    game.expect("builtin games are finite")
}

/// `$_A = Σ a_n p_n`, `$_B = Σ b_n p_n`.
pub fn expected_payoffs(game: &BimatrixGame, dist: &OutcomeDistribution) -> PayoffPair {
    let cells = game.outcome_payoffs();
    let p = dist.probs();
    let mut out = PayoffPair::new(0.0, 0.0);
    for n in 0..4 {
        out.a += cells[n].a * p[n];
        out.b += cells[n].b * p[n];
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassicalProfile {
    Pure {
        alice: usize,
        bob: usize,
    },
    Mixed {
        alice: MixedStrategy,
        bob: MixedStrategy,
    },
}

impl ClassicalProfile {
    pub fn strategies(&self) -> (MixedStrategy, MixedStrategy) {
        match *self {
            ClassicalProfile::Pure { alice, bob } => {
                (MixedStrategy::pure(alice), MixedStrategy::pure(bob))
            }
            ClassicalProfile::Mixed { alice, bob } => (alice, bob),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEquilibrium {
    pub profile: ClassicalProfile,
    pub payoffs: PayoffPair,
}

/// Denominators smaller than this are treated as a degenerate game.
const DEGENERATE_TOL: f64 = 1e-12;

/// Pure equilibria by exhaustive best-response check, then the fully mixed
/// equilibrium from the indifference conditions when it is interior.
pub fn classical_equilibria(game: &BimatrixGame) -> Vec<ClassicalEquilibrium> {
    let mut out = Vec::new();
    for j in 0..2 {
        for l in 0..2 {
            let cell = game.payoff(j, l);
            let alice_ok = cell.a >= game.payoff(1 - j, l).a;
            let bob_ok = cell.b >= game.payoff(j, 1 - l).b;
            if alice_ok && bob_ok {
                out.push(ClassicalEquilibrium {
                    profile: ClassicalProfile::Pure { alice: j, bob: l },
                    payoffs: cell,
                });
            }
        }
    }

    // Alice's p makes Bob indifferent between his two actions and vice versa.
    let b = |j, l| game.payoff(j, l).b;
    let a = |j, l| game.payoff(j, l).a;
    let denom_alice = b(0, 0) - b(0, 1) - b(1, 0) + b(1, 1);
    let denom_bob = a(0, 0) - a(1, 0) - a(0, 1) + a(1, 1);
    if denom_alice.abs() > DEGENERATE_TOL && denom_bob.abs() > DEGENERATE_TOL {
        let p = (b(1, 1) - b(1, 0)) / denom_alice;
        let q = (a(1, 1) - a(0, 1)) / denom_bob;
        let interior = |x: f64| x > DEGENERATE_TOL && x < 1.0 - DEGENERATE_TOL;
        if interior(p) && interior(q) {
            let alice = MixedStrategy::new(p).expect("interior");
            let bob = MixedStrategy::new(q).expect("interior");
            out.push(ClassicalEquilibrium {
                profile: ClassicalProfile::Mixed { alice, bob },
                payoffs: game.mixed_payoffs(alice, bob),
            });
        }
    }
    out
}

/// The classical reference profile: the unique pure equilibrium when there
/// is exactly one, otherwise the mixed one, otherwise the first pure one.
pub fn classical_baseline(game: &BimatrixGame) -> Option<ClassicalEquilibrium> {
    let eqs = classical_equilibria(game);
    let pure: Vec<_> = eqs
        .iter()
        .filter(|e| matches!(e.profile, ClassicalProfile::Pure { .. }))
        .collect();
    if pure.len() == 1 {
        return Some(*pure[0]);
    }
    eqs.iter()
        .find(|e| matches!(e.profile, ClassicalProfile::Mixed { .. }))
        .or_else(|| eqs.first())
        .copied()
}

/// Largest gain either player can obtain by a pure unilateral deviation.
pub fn classical_deviation_gain(
    game: &BimatrixGame,
    alice: MixedStrategy,
    bob: MixedStrategy,
) -> f64 {
    let cur = game.mixed_payoffs(alice, bob);
    let mut gain = f64::NEG_INFINITY;
    for action in 0..2 {
        let dev_a = game.mixed_payoffs(MixedStrategy::pure(action), bob).a - cur.a;
        let dev_b = game.mixed_payoffs(alice, MixedStrategy::pure(action)).b - cur.b;
        gain = gain.max(dev_a).max(dev_b);
    }
    gain
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_means_match_uniform_payoffs() {
        let pd = builtin_game(GameId::PD).mean_payoff();
        assert_eq!(pd, PayoffPair::new(9.0 / 4.0, 9.0 / 4.0));
        let sd = builtin_game(GameId::SD).mean_payoff();
        assert_eq!(sd, PayoffPair::new(0.25, 1.5));
        let bos = builtin_game(GameId::BoS).mean_payoff();
        assert_eq!(bos, PayoffPair::new(0.75, 0.75));
    }

    #[test]
    fn pure_outcome_lookup() {
        let pd = builtin_game(GameId::PD);
        let d = OutcomeDistribution::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(expected_payoffs(&pd, &d), PayoffPair::new(3.0, 3.0));
        let d = OutcomeDistribution::new([0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(expected_payoffs(&pd, &d), PayoffPair::new(0.0, 5.0));
    }

    #[test]
    fn outcome_distribution_validation() {
        assert!(OutcomeDistribution::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(OutcomeDistribution::new([1.1, -0.1, 0.0, 0.0]).is_err());
        assert!(OutcomeDistribution::new([f64::NAN, 0.5, 0.5, 0.0]).is_err());
        assert!(OutcomeDistribution::new([1.0 + 1e-13, -1e-13, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn mixed_strategy_bounds() {
        assert!(MixedStrategy::new(-0.01).is_err());
        assert!(MixedStrategy::new(1.01).is_err());
        assert_eq!(MixedStrategy::new(0.2).unwrap().weights(), [0.2, 0.8]);
    }

    #[test]
    fn pd_has_unique_pure_confess_equilibrium() {
        let eqs = classical_equilibria(&builtin_game(GameId::PD));
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].profile, ClassicalProfile::Pure { alice: 1, bob: 1 });
        assert_eq!(eqs[0].payoffs, PayoffPair::new(1.0, 1.0));
    }

    #[test]
    fn sd_has_only_a_mixed_equilibrium() {
        let eqs = classical_equilibria(&builtin_game(GameId::SD));
        assert_eq!(eqs.len(), 1);
        let ClassicalProfile::Mixed { alice, bob } = eqs[0].profile else {
            panic!("expected mixed equilibrium");
        };
        assert!((alice.p0() - 0.5).abs() < 1e-12);
        assert!((bob.p0() - 0.2).abs() < 1e-12);
        assert!(eqs[0].payoffs.max_abs_diff(&PayoffPair::new(-0.2, 1.5)) < 1e-12);
    }

    #[test]
    fn bos_has_two_pure_and_one_mixed() {
        let eqs = classical_equilibria(&builtin_game(GameId::BoS));
        assert_eq!(eqs.len(), 3);
        assert_eq!(eqs[0].profile, ClassicalProfile::Pure { alice: 0, bob: 0 });
        assert_eq!(eqs[1].profile, ClassicalProfile::Pure { alice: 1, bob: 1 });
        let ClassicalProfile::Mixed { alice, bob } = eqs[2].profile else {
            panic!("expected mixed equilibrium");
        };
        assert!((alice.p0() - 2.0 / 3.0).abs() < 1e-12);
        assert!((bob.p0() - 1.0 / 3.0).abs() < 1e-12);
        assert!(
            eqs[2]
                .payoffs
                .max_abs_diff(&PayoffPair::new(2.0 / 3.0, 2.0 / 3.0))
                < 1e-12
        );
    }

    #[test]
    fn degenerate_game_reports_only_pure() {
        let flat = BimatrixGame::new("flat", ["x", "y"], ["x", "y"], [[[1.0, 1.0]; 2]; 2]).unwrap();
        let eqs = classical_equilibria(&flat);
        assert_eq!(eqs.len(), 4);
        assert!(eqs
            .iter()
            .all(|e| matches!(e.profile, ClassicalProfile::Pure { .. })));
    }

    #[test]
    fn every_equilibrium_is_stable() {
        for id in GameId::ALL {
            let game = builtin_game(id);
            for eq in classical_equilibria(&game) {
                let (a, b) = eq.profile.strategies();
                assert!(
                    classical_deviation_gain(&game, a, b) <= 1e-12,
                    "{id} {eq:?}"
                );
            }
        }
    }

    #[test]
    fn baseline_choice_per_game() {
        let pd = classical_baseline(&builtin_game(GameId::PD)).unwrap();
        assert!(matches!(
            pd.profile,
            ClassicalProfile::Pure { alice: 1, bob: 1 }
        ));
        for id in [GameId::SD, GameId::BoS] {
            let eq = classical_baseline(&builtin_game(id)).unwrap();
            assert!(matches!(eq.profile, ClassicalProfile::Mixed { .. }), "{id}");
        }
    }

    #[test]
    fn game_file_round_trip_and_rejects_unknown_fields() {
        let sd = builtin_game(GameId::SD);
        let parsed = BimatrixGame::from_json(&sd.to_json()).unwrap();
        assert_eq!(parsed, sd);
        let bad = r#"{"name":"x","alice_actions":["a","b"],"bob_actions":["c","d"],
            "payoffs":[[[1,2],[3,4]],[[5,6],[7,8]]],"extra":1}"#;
        assert!(BimatrixGame::from_json(bad).is_err());
        let short = r#"{"name":"x","alice_actions":["a","b"],"bob_actions":["c","d"],
            "payoffs":[[[1,2],[3,4]]]}"#;
        assert!(BimatrixGame::from_json(short).is_err());
    }

    #[test]
    fn game_id_parsing() {
        assert_eq!("PD".parse::<GameId>().unwrap(), GameId::PD);
        assert_eq!("bos".parse::<GameId>().unwrap(), GameId::BoS);
        assert!("chicken".parse::<GameId>().is_err());
    }
}
