//! `reproduce` targets: equilibrium tables and payoff-curve figures, each
//! with an assertions file that states the expected values and tolerances.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::analysis::{
    certify_ne, quantum_classical_crossings, quantum_equal_payoff_points, quantum_minimum,
    scenario1_sweep, scenario2_table, sd_case_boundaries, uniform_grid, Baseline, CrossingResult,
    EquilibriumFamily, NeConfig, SdCase, SweepProfiles, TABLE_RATES,
};
use crate::games::{builtin_game, BimatrixGame, GameId, PayoffPair, Player};
use crate::protocol::{quantum_payoffs, BasisPair, CorruptionRate, StrategyParams};
use crate::report::{assertions_json, Assertion, Table};

use super::{curve_table, push_families, CliError, FAMILY_COLUMNS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Table3,
    Fig4,
    Fig5,
    Fig6,
    All,
}

impl Target {
    pub const EACH: [Target; 6] = [
        Target::Table1,
        Target::Table2,
        Target::Table3,
        Target::Fig4,
        Target::Fig5,
        Target::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Table1 => "table1",
            Target::Table2 => "table2",
            Target::Table3 => "table3",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
            Target::Fig6 => "fig6",
            Target::All => "all",
        }
    }

    pub fn game(self) -> Option<GameId> {
        match self {
            Target::Table1 | Target::Fig4 => Some(GameId::PD),
            Target::Table2 | Target::Fig5 => Some(GameId::SD),
            Target::Table3 | Target::Fig6 => Some(GameId::BoS),
            Target::All => None,
        }
    }
}

/// Writes the files for `target` into `dir` and returns their paths.
pub fn reproduce(target: Target, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    if target == Target::All {
        let mut all = Vec::new();
        for t in Target::EACH {
            all.extend(reproduce(t, dir)?);
        }
        return Ok(all);
    }
    let id = target.game().expect("single target");
    let files = match target {
        Target::Table1 | Target::Table2 | Target::Table3 => table_files(target, id)?,
        _ => figure_files(target, id)?,
    };
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

fn sp(theta: f64, phi: f64) -> StrategyParams {
    StrategyParams::new(theta, phi).expect("listed profiles are in range")
}

fn rate(r: f64) -> CorruptionRate {
    CorruptionRate::new(r).expect("listed rates are in range")
}

/// One listed row: the profile shown for rate `r` and its payoffs.
struct ListedRow {
    r: f64,
    profile: &'static str,
    alice: StrategyParams,
    bob: StrategyParams,
    expected: PayoffPair,
}

fn row(
    r: f64,
    profile: &'static str,
    alice: StrategyParams,
    bob: StrategyParams,
    a: f64,
    b: f64,
) -> ListedRow {
    ListedRow {
        r,
        profile,
        alice,
        bob,
        expected: PayoffPair::new(a, b),
    }
}

fn listed_rows(id: GameId) -> Vec<ListedRow> {
    let z = sp(0.0, FRAC_PI_2);
    let q = sp(0.0, FRAC_PI_4);
    let id0 = StrategyParams::identity();
    let flip = StrategyParams::flip();
    let half = sp(FRAC_PI_2, FRAC_PI_4);
    match id {
        GameId::PD => vec![
            row(0.0, "(0,pi/2);(0,pi/2)", z, z, 3.0, 3.0),
            row(0.25, "(0,pi/2);(0,pi/2)", z, z, 43.0 / 16.0, 43.0 / 16.0),
            row(0.5, "any;any", id0, id0, 9.0 / 4.0, 9.0 / 4.0),
            row(0.75, "(0,pi/4);(0,pi/4)", q, q, 43.0 / 16.0, 43.0 / 16.0),
            row(1.0, "(0,pi/4);(0,pi/4)", q, q, 3.0, 3.0),
        ],
        GameId::SD => vec![
            row(0.0, "(0,pi/2);(0,pi/2)", z, z, 3.0, 2.0),
            row(0.25, "(0,pi/2);(0,pi/2)", z, z, 21.0 / 16.0, 15.0 / 8.0),
            row(0.5, "any;any", id0, id0, 0.25, 1.5),
            row(0.75, "(0,phi);(0,pi/2-phi)", q, q, 21.0 / 16.0, 15.0 / 8.0),
            row(1.0, "(0,phi);(0,pi/2-phi) phi in [0,pi/4]", q, q, 3.0, 2.0),
        ],
        GameId::BoS => vec![
            row(
                0.0,
                "(theta,phi);(theta,pi/2-phi) theta in [pi/2,pi]",
                half,
                half,
                1.0,
                2.0,
            ),
            row(0.0, "(pi,any);(pi,any)", flip, flip, 1.0, 2.0),
            row(
                0.25,
                "(theta,phi);(theta,pi/2-phi) theta in [pi/2,pi]",
                half,
                half,
                15.0 / 16.0,
                21.0 / 16.0,
            ),
            row(
                0.25,
                "(pi,any);(pi,any)",
                flip,
                flip,
                11.0 / 16.0,
                19.0 / 16.0,
            ),
            row(0.5, "any;any", id0, id0, 0.75, 0.75),
            row(0.75, "(pi,0);(pi,0)", flip, flip, 19.0 / 16.0, 11.0 / 16.0),
            row(1.0, "(pi,0);(pi,0)", flip, flip, 2.0, 1.0),
        ],
    }
}

/// Deterministic spread of profiles over the strategy space.
fn spread_profiles(n: usize) -> Vec<(StrategyParams, StrategyParams)> {
    const A: [f64; 4] = [0.809_654_4, 0.655_538_3, 0.530_756_2, 0.429_724_1];
    (1..=n)
        .map(|k| {
            let u: Vec<f64> = A.iter().map(|a| (0.5 + a * k as f64).fract()).collect();
            (
                sp(u[0] * PI, u[1] * FRAC_PI_2),
                sp(u[2] * PI, u[3] * FRAC_PI_2),
            )
        })
        .collect()
}

/// Kind of the search family that contains a profile with these payoffs.
fn matching_family(families: &[EquilibriumFamily], payoffs: PayoffPair) -> &'static str {
    families
        .iter()
        .find(|f| {
            f.members
                .iter()
                .chain(std::iter::once(&f.representative))
                .any(|m| m.payoffs.max_abs_diff(&payoffs) <= 1e-6)
        })
        .map(|f| f.descriptor.kind())
        .unwrap_or("none")
}

fn table_files(target: Target, id: GameId) -> Result<Vec<(String, String)>, CliError> {
    let game = builtin_game(id);
    let config = NeConfig::default();
    let search = scenario2_table(&game, &TABLE_RATES, &config)?;
    let mut table = Table::new(
        "table",
        &[
            "r",
            "profile",
            "theta_a",
            "phi_a",
            "theta_b",
            "phi_b",
            "payoff_a",
            "payoff_b",
            "max_gain",
            "search_family",
        ],
    );
    let mut checks = Vec::new();
    for (i, lr) in listed_rows(id).iter().enumerate() {
        let cand = certify_ne(&game, rate(lr.r), lr.alice, lr.bob, &config);
        let families = &search
            .iter()
            .find(|s| s.r == lr.r)
            .expect("listed rates are table rates")
            .families;
        let found = matching_family(families, cand.payoffs);
        table.push(vec![
            lr.r.into(),
            lr.profile.into(),
            lr.alice.theta().into(),
            lr.alice.phi().into(),
            lr.bob.theta().into(),
            lr.bob.phi().into(),
            cand.payoffs.a.into(),
            cand.payoffs.b.into(),
            cand.max_gain.into(),
            found.into(),
        ]);
        let tag = format!("row{}", i + 1);
        checks.push(Assertion::new(
            format!("{tag}_payoff_a"),
            format!("r={} payoff A", lr.r),
            lr.expected.a,
            cand.payoffs.a,
            1e-9,
        ));
        checks.push(Assertion::new(
            format!("{tag}_payoff_b"),
            format!("r={} payoff B", lr.r),
            lr.expected.b,
            cand.payoffs.b,
            1e-9,
        ));
        checks.push(Assertion::new(
            format!("{tag}_max_gain"),
            format!("r={} certified deviation gain", lr.r),
            0.0,
            cand.max_gain,
            config.epsilon,
        ));
        checks.push(Assertion::holds(
            format!("{tag}_search"),
            format!("r={} search reports a family with these payoffs", lr.r),
            found != "none",
        ));
    }

    let uniform = rate(0.5);
    let worst = spread_profiles(20)
        .into_iter()
        .map(|(a, b)| certify_ne(&game, uniform, a, b, &config).max_gain)
        .fold(0.0, f64::max);
    checks.push(Assertion::new(
        "uniform_source_any_profile",
        "r=1/2: 20 spread profiles certify",
        0.0,
        worst,
        1e-6,
    ));

    match id {
        GameId::SD => {
            let worst = (0..9)
                .map(|k| {
                    let phi = FRAC_PI_4 * k as f64 / 8.0;
                    certify_ne(
                        &game,
                        rate(1.0),
                        sp(0.0, phi),
                        sp(0.0, FRAC_PI_2 - phi),
                        &config,
                    )
                    .max_gain
                })
                .fold(0.0, f64::max);
            checks.push(Assertion::new(
                "full_corruption_phi_family",
                "r=1: (0,phi),(0,pi/2-phi) certifies for 9 phi in [0,pi/4]",
                0.0,
                worst,
                1e-6,
            ));
        }
        GameId::BoS => {
            let worst = (0..9)
                .map(|k| {
                    let theta = FRAC_PI_2 + FRAC_PI_2 * k as f64 / 8.0;
                    let p = quantum_payoffs(
                        &game,
                        rate(0.25),
                        sp(theta, 0.4),
                        sp(theta, FRAC_PI_2 - 0.4),
                        BasisPair::default(),
                    );
                    let c = (2.0 * theta).cos();
                    p.max_abs_diff(&PayoffPair::new((13.0 - 2.0 * c) / 16.0, (20.0 - c) / 16.0))
                })
                .fold(0.0, f64::max);
            checks.push(Assertion::new(
                "quarter_theta_formula",
                "r=1/4: payoffs follow (13-2cos2t)/16, (20-cos2t)/16 at 9 theta",
                0.0,
                worst,
                1e-9,
            ));
        }
        GameId::PD => {}
    }

    let mut fam_table = Table::new("families", &FAMILY_COLUMNS);
    for s in &search {
        push_families(&mut fam_table, s.r, &s.families);
    }
    let name = target.name();
    Ok(vec![
        (format!("{name}.csv"), table.to_csv()?),
        (format!("{name}_families.csv"), fam_table.to_csv()?),
        (
            format!("{name}_assertions.json"),
            assertions_json(name, &checks),
        ),
    ])
}

struct Points {
    table: Table,
}

impl Points {
    fn new() -> Self {
        Self {
            table: Table::new(
                "points",
                &["label", "kind", "r", "value_a", "value_b", "tangent"],
            ),
        }
    }

    fn push(&mut self, label: &str, kind: &str, r: f64, a: f64, b: f64, tangent: bool) {
        self.table.push(vec![
            label.into(),
            kind.into(),
            r.into(),
            a.into(),
            b.into(),
            tangent.into(),
        ]);
    }

    fn crossings(&mut self, kind: &str, labels: &[&str], list: &[CrossingResult]) {
        for (k, c) in list.iter().enumerate() {
            let label = labels.get(k).copied().unwrap_or("");
            self.push(label, kind, c.r_star, c.value_a, c.value_b, c.tangent);
        }
    }
}

/// Assertions that a crossing list has exactly the expected rates.
fn crossing_checks(
    prefix: &str,
    list: &[CrossingResult],
    expected: &[f64],
    tol: f64,
) -> Vec<Assertion> {
    let mut out = vec![Assertion::new(
        format!("{prefix}_count"),
        format!("{prefix}: number of crossings"),
        expected.len() as f64,
        list.len() as f64,
        0.0,
    )];
    for (k, &r) in expected.iter().enumerate() {
        let actual = list.get(k).map(|c| c.r_star).unwrap_or(f64::NAN);
        out.push(Assertion::new(
            format!("{prefix}_{}", k + 1),
            format!("{prefix}: crossing rate"),
            r,
            actual,
            tol,
        ));
    }
    out
}

fn max_dev(values: &[f64], target: f64) -> f64 {
    values
        .iter()
        .map(|v| (v - target).abs())
        .fold(0.0, f64::max)
}

fn risk_free_spread(game: &BimatrixGame, grid: &[f64]) -> (f64, PayoffPair) {
    let s = StrategyParams::risk_free();
    let pays: Vec<PayoffPair> = grid
        .iter()
        .map(|&r| quantum_payoffs(game, rate(r), s, s, BasisPair::default()))
        .collect();
    let spread = |f: fn(&PayoffPair) -> f64| {
        let (lo, hi) = pays
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(v), h.max(v))
            });
        hi - lo
    };
    (spread(|p| p.a).max(spread(|p| p.b)), pays[0])
}

fn figure_files(target: Target, id: GameId) -> Result<Vec<(String, String)>, CliError> {
    let game = builtin_game(id);
    let profiles = SweepProfiles::defaults_for(&game, Some(id))?;
    let grid = uniform_grid(101);
    let curve = scenario1_sweep(&game, &profiles, &grid)?;
    let series = |l: &str| curve.series(l).expect("standard labels").to_vec();
    let (qa, qb, ca, cb) = (series("qA"), series("qB"), series("cA"), series("cB"));
    let last = grid.len() - 1;

    let alice = quantum_classical_crossings(&game, &profiles, Player::Alice, Baseline::Corrupt);
    let bob = quantum_classical_crossings(&game, &profiles, Player::Bob, Baseline::Corrupt);
    let equal = quantum_equal_payoff_points(&game, &profiles);
    let ideal = profiles.classical_ideal(&game);

    let mut pts = Points::new();
    let mut checks = Vec::new();
    pts.push("", "quantum_start", 0.0, qa[0], qb[0], false);
    pts.push("", "quantum_end", 1.0, qa[last], qb[last], false);
    pts.push("", "classical_start", 0.0, ca[0], cb[0], false);
    pts.push("", "classical_end", 1.0, ca[last], cb[last], false);
    pts.push("", "classical_ideal", 0.0, ideal.a, ideal.b, false);

    match id {
        GameId::PD => {
            pts.crossings("crossing_alice", &["a"], &alice);
            pts.crossings("crossing_bob", &["a"], &bob);
            checks.extend(crossing_checks("crossing_alice", &alice, &[0.5], 1e-8));
            checks.extend(crossing_checks("crossing_bob", &bob, &[0.5], 1e-8));
            if let Some(c) = alice.first() {
                checks.push(Assertion::new(
                    "crossing_value",
                    "payoff at the crossing",
                    2.25,
                    c.value_a,
                    1e-8,
                ));
            }
            checks.push(Assertion::new(
                "quantum_start",
                "quantum payoff at r=0",
                3.0,
                qa[0],
                1e-12,
            ));
            checks.push(Assertion::new(
                "quantum_end",
                "quantum payoff at r=1",
                1.0,
                qa[last],
                1e-12,
            ));
            checks.push(Assertion::new(
                "classical_start",
                "classical payoff at r=0",
                1.0,
                ca[0],
                1e-12,
            ));
            checks.push(Assertion::new(
                "classical_end",
                "classical payoff at r=1",
                3.0,
                ca[last],
                1e-12,
            ));
        }
        GameId::SD => {
            pts.crossings("quantum_equal", &["a"], &equal);
            pts.crossings("crossing_alice", &["c"], &alice);
            pts.crossings("crossing_bob", &["b"], &bob);
            let (r_min, v_min) = quantum_minimum(&game, &profiles, Player::Alice);
            let at_min = profiles.quantum_at(&game, rate(r_min));
            pts.push("", "minimum_alice", r_min, v_min, at_min.b, false);
            let bounds = sd_case_boundaries(&game, &profiles);
            for &(r, _, after) in &bounds {
                let q = profiles.quantum_at(&game, rate(r));
                let kind = match after {
                    SdCase::Case1 => "enter_case1",
                    SdCase::Case2 => "enter_case2",
                    SdCase::Case3 => "enter_case3",
                };
                pts.push("", kind, r, q.a, q.b, false);
            }
            let a = equal.first().copied();
            checks.push(Assertion::new(
                "a_rate",
                "quantum payoffs equal",
                1.0 / 7.0,
                a.map_or(f64::NAN, |c| c.r_star),
                1e-9,
            ));
            checks.push(Assertion::new(
                "a_value",
                "equal quantum payoff",
                96.0 / 49.0,
                a.map_or(f64::NAN, |c| c.value_a),
                1e-9,
            ));
            checks.extend(crossing_checks("crossing_alice", &alice, &[0.5], 1e-6));
            checks.extend(crossing_checks("crossing_bob", &bob, &[0.5], 1e-6));
            checks.push(Assertion::new(
                "minimum_rate",
                "rate of Alice's quantum minimum",
                0.8,
                r_min,
                1e-6,
            ));
            checks.push(Assertion::new(
                "minimum_value",
                "Alice's quantum minimum",
                -0.2,
                v_min,
                1e-6,
            ));
            let line = grid
                .iter()
                .zip(&ca)
                .map(|(r, c)| (c - (-0.2 + 0.9 * r)).abs())
                .fold(0.0, f64::max);
            checks.push(Assertion::new(
                "classical_alice_line",
                "cA = -0.2 + 0.9 r, max residual",
                0.0,
                line,
                1e-9,
            ));
            checks.push(Assertion::new(
                "classical_bob_constant",
                "cB = 1.5, max deviation",
                0.0,
                max_dev(&cb, 1.5),
                1e-12,
            ));
            let rates: Vec<f64> = bounds.iter().map(|b| b.0).collect();
            checks.push(Assertion::new(
                "case_boundary_count",
                "case changes along the sweep",
                2.0,
                rates.len() as f64,
                0.0,
            ));
            checks.push(Assertion::new(
                "case3_to_case2",
                "case 3 ends",
                1.0 / 7.0,
                rates.first().copied().unwrap_or(f64::NAN),
                1e-6,
            ));
            checks.push(Assertion::new(
                "case2_to_case1",
                "case 1 starts",
                0.6,
                rates.get(1).copied().unwrap_or(f64::NAN),
                1e-6,
            ));
            checks.push(Assertion::holds(
                "bob_decreasing",
                "quantum B decreases from 2 to 0",
                qb.windows(2).all(|w| w[1] < w[0])
                    && (qb[0] - 2.0).abs() < 1e-12
                    && qb[last].abs() < 1e-12,
            ));
        }
        GameId::BoS => {
            pts.crossings("quantum_equal", &["a"], &equal);
            pts.crossings("crossing_alice", &["b", "a"], &alice);
            pts.crossings("crossing_bob", &["a", "c"], &bob);
            let touch_a =
                quantum_classical_crossings(&game, &profiles, Player::Alice, Baseline::Ideal);
            let touch_b =
                quantum_classical_crossings(&game, &profiles, Player::Bob, Baseline::Ideal);
            pts.crossings("ideal_alice", &[], &touch_a);
            pts.crossings("ideal_bob", &[], &touch_b);
            checks.extend(crossing_checks("crossing_alice", &alice, &[0.2, 0.5], 1e-6));
            checks.extend(crossing_checks("crossing_bob", &bob, &[0.5, 0.8], 1e-6));
            checks.extend(crossing_checks("quantum_equal", &equal, &[0.5], 1e-6));
            let classical_equal = ca
                .iter()
                .zip(&cb)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            checks.push(Assertion::new(
                "classical_equal",
                "classical payoffs equal for all r",
                0.0,
                classical_equal,
                1e-12,
            ));
            checks.push(Assertion::new(
                "quantum_start_a",
                "quantum A at r=0",
                1.0,
                qa[0],
                1e-12,
            ));
            checks.push(Assertion::new(
                "quantum_start_b",
                "quantum B at r=0",
                2.0,
                qb[0],
                1e-12,
            ));
            checks.push(Assertion::new(
                "quantum_end_a",
                "quantum A at r=1",
                2.0,
                qa[last],
                1e-12,
            ));
            checks.push(Assertion::new(
                "quantum_end_b",
                "quantum B at r=1",
                1.0,
                qb[last],
                1e-12,
            ));
            checks.push(Assertion::holds(
                "ideal_touch",
                "quantum A only touches the ideal classical line, at r=1/3",
                touch_a.len() == 1
                    && touch_a[0].tangent
                    && (touch_a[0].r_star - 1.0 / 3.0).abs() < 1e-6,
            ));
        }
    }
    let (spread, constant) = risk_free_spread(&game, &grid);
    pts.push("", "risk_free", 0.0, constant.a, constant.b, false);
    checks.push(Assertion::new(
        "risk_free_constant",
        "risk-free profile payoff spread over r",
        0.0,
        spread,
        1e-9,
    ));
    if id == GameId::BoS {
        checks.push(Assertion::new(
            "risk_free_value_a",
            "risk-free payoff A",
            0.75,
            constant.a,
            1e-12,
        ));
        checks.push(Assertion::new(
            "risk_free_value_b",
            "risk-free payoff B",
            0.75,
            constant.b,
            1e-12,
        ));
    }

    let name = target.name();
    Ok(vec![
        (format!("{name}.csv"), curve_table(&curve).to_csv()?),
        (format!("{name}_points.csv"), pts.table.to_csv()?),
        (
            format!("{name}_assertions.json"),
            assertions_json(name, &checks),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_rows_use_table_rates() {
        for id in GameId::ALL {
            for r in listed_rows(id) {
                assert!(TABLE_RATES.contains(&r.r));
            }
        }
    }

    #[test]
    fn spread_profiles_are_distinct() {
        let p = spread_profiles(20);
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                assert_ne!(p[i], p[j]);
            }
        }
    }

    #[test]
    fn unmatched_payoffs_report_none() {
        assert_eq!(matching_family(&[], PayoffPair::new(0.0, 0.0)), "none");
    }
}
