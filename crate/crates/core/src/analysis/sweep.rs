//! Payoff curves as a function of the corruption rate for players who keep
//! the strategies that are optimal for an ideal source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{classical_baseline, BimatrixGame, GameId, PayoffPair, Player};
use crate::protocol::{
    classical_payoffs, quantum_payoffs, BasisPair, ClassicalMove, CorruptionRate, StrategyParams,
};

use super::crossings::{find_crossings, CrossingResult};
use super::optimize::scan_min;

/// Strategies both players commit to, quantum and classical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepProfiles {
    pub quantum: (StrategyParams, StrategyParams),
    pub classical: (ClassicalMove, ClassicalMove),
}

impl SweepProfiles {
    /// Builtin games: `iσ_z` for PD and SD, `iσ_y` for BoS. Custom games
    /// default to `iσ_z`. The classical side is [`classical_baseline`].
    pub fn defaults_for(game: &BimatrixGame, id: Option<GameId>) -> Result<Self> {
        let q = match id {
            Some(GameId::BoS) => StrategyParams::flip(),
            _ => StrategyParams::i_sigma_z(),
        };
        let eq = classical_baseline(game).ok_or_else(|| {
            Error::InvalidGame(format!("{} has no classical equilibrium", game.name))
        })?;
        let (a, b) = eq.profile.strategies();
        Ok(Self {
            quantum: (q, q),
            classical: (a.into(), b.into()),
        })
    }

    pub fn quantum_at(&self, game: &BimatrixGame, r: CorruptionRate) -> PayoffPair {
        quantum_payoffs(
            game,
            r,
            self.quantum.0,
            self.quantum.1,
            BasisPair::default(),
        )
    }

    pub fn classical_at(&self, game: &BimatrixGame, r: CorruptionRate) -> PayoffPair {
        classical_payoffs(
            game,
            r,
            self.classical.0,
            self.classical.1,
            BasisPair::default(),
        )
    }

    /// Classical payoffs with an ideal source, i.e. the horizontal reference lines.
    pub fn classical_ideal(&self, game: &BimatrixGame) -> PayoffPair {
        self.classical_at(game, CorruptionRate::new(0.0).expect("0 is a valid rate"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub r_grid: Vec<f64>,
    /// `qA`, `qB`, `cA`, `cB` in that order.
    pub series: Vec<Series>,
}

impl SweepCurve {
    pub const LABELS: [&'static str; 4] = ["qA", "qB", "cA", "cB"];

    pub fn series(&self, label: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.values.as_slice())
    }
}

/// `n` evenly spaced rates `0, 1/(n−1), …, 1`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

pub fn scenario1_sweep(
    game: &BimatrixGame,
    profiles: &SweepProfiles,
    r_grid: &[f64],
) -> Result<SweepCurve> {
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("empty r grid".into()));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "r grid must be strictly increasing".into(),
        ));
    }
    let mut cols: [Vec<f64>; 4] = Default::default();
    for &r in r_grid {
        let rate = CorruptionRate::new(r)?;
        let q = profiles.quantum_at(game, rate);
        let c = profiles.classical_at(game, rate);
        for (col, v) in cols.iter_mut().zip([q.a, q.b, c.a, c.b]) {
            col.push(v);
        }
    }
    let series = SweepCurve::LABELS
        .iter()
        .zip(cols)
        .map(|(label, values)| Series {
            label: label.to_string(),
            values,
        })
        .collect();
    Ok(SweepCurve {
        r_grid: r_grid.to_vec(),
        series,
    })
}

/// Which curve the classical payoff is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Classical strategies through the same corrupt source.
    Corrupt,
    /// Classical strategies with an ideal source (constant in `r`).
    Ideal,
}

/// Scan resolution used for crossing searches.
pub const CROSSING_SCAN_POINTS: usize = 1001;

/// Rates where a player's quantum payoff equals their classical one.
pub fn quantum_classical_crossings(
    game: &BimatrixGame,
    profiles: &SweepProfiles,
    player: Player,
    baseline: Baseline,
) -> Vec<CrossingResult> {
    let ideal = profiles.classical_ideal(game).get(player);
    let q = |r: f64| profiles.quantum_at(game, rate(r)).get(player);
    let c = |r: f64| match baseline {
        Baseline::Corrupt => profiles.classical_at(game, rate(r)).get(player),
        Baseline::Ideal => ideal,
    };
    find_crossings(q, c, CROSSING_SCAN_POINTS)
}

/// Rates where the two players' quantum payoffs are equal.
pub fn quantum_equal_payoff_points(
    game: &BimatrixGame,
    profiles: &SweepProfiles,
) -> Vec<CrossingResult> {
    find_crossings(
        |r| profiles.quantum_at(game, rate(r)).a,
        |r| profiles.quantum_at(game, rate(r)).b,
        CROSSING_SCAN_POINTS,
    )
}

/// Minimum of a player's quantum payoff over `r ∈ [0, 1]`: `(r, value)`.
pub fn quantum_minimum(
    game: &BimatrixGame,
    profiles: &SweepProfiles,
    player: Player,
) -> (f64, f64) {
    scan_min(
        |r| profiles.quantum_at(game, rate(r)).get(player),
        0.0,
        1.0,
        CROSSING_SCAN_POINTS,
        1e-12,
    )
}

fn rate(r: f64) -> CorruptionRate {
    CorruptionRate::new(r.clamp(0.0, 1.0)).expect("clamped")
}

/// Outcome classes used for Samaritan's Dilemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdCase {
    /// `$_A ≤ 0`: insufficient solution.
    Case1,
    /// `0 < $_A ≤ $_B`: weak solution.
    Case2,
    /// `0 ≤ $_B < $_A`: strong solution.
    Case3,
}

pub fn classify_sd(p: PayoffPair) -> Option<SdCase> {
    if p.a <= 0.0 {
        Some(SdCase::Case1)
    } else if p.a <= p.b {
        Some(SdCase::Case2)
    } else if p.b >= 0.0 {
        Some(SdCase::Case3)
    } else {
        None
    }
}

/// Where the SD case changes along the quantum sweep: the `$_A = $_B`
/// crossings and the `$_A = 0` crossings.
pub fn sd_case_boundaries(
    game: &BimatrixGame,
    profiles: &SweepProfiles,
) -> Vec<(f64, SdCase, SdCase)> {
    let mut points: Vec<f64> = quantum_equal_payoff_points(game, profiles)
        .into_iter()
        .chain(find_crossings(
            |r| profiles.quantum_at(game, rate(r)).a,
            |_| 0.0,
            CROSSING_SCAN_POINTS,
        ))
        .filter(|c| !c.tangent)
        .map(|c| c.r_star)
        .collect();
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let probe = |r: f64| classify_sd(profiles.quantum_at(game, rate(r)));
    points
        .into_iter()
        .filter(|&r| r - 1e-6 >= 0.0 && r + 1e-6 <= 1.0)
        .filter_map(|r| {
            let before = probe(r - 1e-6)?;
            let after = probe(r + 1e-6)?;
            (before != after).then_some((r, before, after))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::builtin_game;

    fn setup(id: GameId) -> (BimatrixGame, SweepProfiles) {
        let g = builtin_game(id);
        let p = SweepProfiles::defaults_for(&g, Some(id)).unwrap();
        (g, p)
    }

    #[test]
    fn pd_curves_run_between_one_and_three() {
        let (g, p) = setup(GameId::PD);
        let curve = scenario1_sweep(&g, &p, &uniform_grid(101)).unwrap();
        let qa = curve.series("qA").unwrap();
        let ca = curve.series("cA").unwrap();
        assert!((qa[0] - 3.0).abs() < 1e-12 && (qa[100] - 1.0).abs() < 1e-12);
        assert!((ca[0] - 1.0).abs() < 1e-12 && (ca[100] - 3.0).abs() < 1e-12);
        assert!(qa.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(ca.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn sd_bob_decreases_from_two_to_zero() {
        let (g, p) = setup(GameId::SD);
        let curve = scenario1_sweep(&g, &p, &uniform_grid(101)).unwrap();
        let qb = curve.series("qB").unwrap();
        assert!((qb[0] - 2.0).abs() < 1e-12 && qb[100].abs() < 1e-12);
        assert!(qb.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bos_endpoints_swap() {
        let (g, p) = setup(GameId::BoS);
        let q0 = p.quantum_at(&g, rate(0.0));
        let q1 = p.quantum_at(&g, rate(1.0));
        assert!(q0.max_abs_diff(&PayoffPair::new(1.0, 2.0)) < 1e-12);
        assert!(q1.max_abs_diff(&PayoffPair::new(2.0, 1.0)) < 1e-12);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let (g, p) = setup(GameId::PD);
        assert!(scenario1_sweep(&g, &p, &[]).is_err());
        assert!(scenario1_sweep(&g, &p, &[0.0, 0.5, 0.5]).is_err());
        assert!(scenario1_sweep(&g, &p, &[0.0, 1.5]).is_err());
    }

    #[test]
    fn sd_classification() {
        assert_eq!(classify_sd(PayoffPair::new(-0.1, 1.0)), Some(SdCase::Case1));
        assert_eq!(classify_sd(PayoffPair::new(0.5, 1.0)), Some(SdCase::Case2));
        assert_eq!(classify_sd(PayoffPair::new(3.0, 2.0)), Some(SdCase::Case3));
        assert_eq!(classify_sd(PayoffPair::new(3.0, -2.0)), None);
    }

    #[test]
    fn bos_alice_touches_ideal_baseline() {
        let (g, p) = setup(GameId::BoS);
        let touches = quantum_classical_crossings(&g, &p, Player::Alice, Baseline::Ideal);
        assert_eq!(touches.len(), 1, "{touches:?}");
        assert!(touches[0].tangent);
        assert!((touches[0].r_star - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn sd_case_changes() {
        let (g, p) = setup(GameId::SD);
        let b = sd_case_boundaries(&g, &p);
        assert_eq!(b.len(), 2, "{b:?}");
        assert!((b[0].0 - 1.0 / 7.0).abs() < 1e-9);
        assert_eq!((b[0].1, b[0].2), (SdCase::Case3, SdCase::Case2));
        assert!((b[1].0 - 0.6).abs() < 1e-6);
        assert_eq!((b[1].1, b[1].2), (SdCase::Case2, SdCase::Case1));
    }
}
