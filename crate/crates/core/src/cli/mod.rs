//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or validation errors, 3 for I/O and
//! parse errors (unreadable files, malformed game definitions).

mod reproduce;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    ne_search, quantum_classical_crossings, quantum_equal_payoff_points, scenario1_sweep,
    uniform_grid, Baseline, EquilibriumFamily, FamilyDescriptor, NeConfig, SweepProfiles,
    CROSSING_SCAN_POINTS,
};
use crate::error::Error;
use crate::games::{builtin_game, BimatrixGame, GameId, Player};
use crate::protocol::{
    outcome_distribution, quantum_payoffs, BasisPair, ClassicalMove, CorruptionRate, StrategyParams,
};
use crate::report::{fmt_num, Report, Table};

pub use reproduce::{reproduce, Target};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qgame",
    version,
    about = "Quantum 2x2 games through a corrupt entangling source"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Payoffs and outcome distribution for one strategy profile.
    Payoff(PayoffArgs),
    /// Quantum and classical payoffs over a grid of corruption rates.
    Sweep(SweepArgs),
    /// Rates where quantum and classical payoffs meet.
    Crossings(CrossingsArgs),
    /// Nash-equilibrium search at a known corruption rate.
    Ne(NeArgs),
    /// Regenerates a table or figure data set with an assertions file.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct GameArg {
    /// Builtin game (pd, sd, bos) or path to a game-definition JSON file.
    #[arg(long)]
    pub game: String,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct PayoffArgs {
    #[command(flatten)]
    pub game: GameArg,
    /// Corruption rate in [0, 1].
    #[arg(long)]
    pub r: f64,
    /// Alice's strategy as `theta,phi`; angles accept `pi` fractions.
    #[arg(long, allow_hyphen_values = true)]
    pub alice: String,
    /// Bob's strategy as `theta,phi`.
    #[arg(long, allow_hyphen_values = true)]
    pub bob: String,
    /// Intended source bits as `f,g`.
    #[arg(long, default_value = "0,0")]
    pub basis: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Quantum strategy for Alice (default depends on the game).
    #[arg(long, allow_hyphen_values = true)]
    pub alice: Option<String>,
    /// Quantum strategy for Bob.
    #[arg(long, allow_hyphen_values = true)]
    pub bob: Option<String>,
    /// Classical probability of σ₀ for Alice (default: classical equilibrium).
    #[arg(long)]
    pub alice_mix: Option<f64>,
    /// Classical probability of σ₀ for Bob.
    #[arg(long)]
    pub bob_mix: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub game: GameArg,
    #[command(flatten)]
    pub profiles: ProfileArgs,
    /// Number of evenly spaced rates in [0, 1].
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Explicit comma-separated rates; overrides --points.
    #[arg(long)]
    pub r_values: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlayerArg {
    Alice,
    Bob,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Corrupt,
    Ideal,
}

#[derive(Debug, Args)]
pub struct CrossingsArgs {
    #[command(flatten)]
    pub game: GameArg,
    #[command(flatten)]
    pub profiles: ProfileArgs,
    /// Whose crossings to report.
    #[arg(long, value_enum, default_value_t = PlayerArg::Both)]
    pub player: PlayerArg,
    /// Classical curve through the corrupt source, or the ideal-source constant.
    #[arg(long, value_enum, default_value_t = BaselineArg::Corrupt)]
    pub baseline: BaselineArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NeArgs {
    #[command(flatten)]
    pub game: GameArg,
    /// Corruption rate in [0, 1], known to both players.
    #[arg(long)]
    pub r: f64,
    /// Coarse search grid as `THETAxPHI`.
    #[arg(long, default_value = "65x33")]
    pub coarse: String,
    /// Certification grid as `THETAxPHI`.
    #[arg(long, default_value = "257x129")]
    pub fine: String,
    /// Largest deviation gain accepted for an equilibrium.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Directory for the data, summary and assertions files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Parse(_) => CliError::io(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn flag<T>(name: &str, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::usage(format!("invalid value for --{name}: {e}")))
}

/// Parses an angle: a decimal literal or a multiple of π such as `pi`,
/// `pi/2`, `3pi/4`, `2*pi/3` or `π/4`.
pub fn parse_angle(text: &str) -> crate::Result<f64> {
    let s = text.trim().to_ascii_lowercase().replace('π', "pi");
    let bad = || Error::Parse(format!("cannot read angle '{text}'"));
    let Some(at) = s.find("pi") else {
        return s
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(bad);
    };
    let coef = s[..at].trim().trim_end_matches('*').trim();
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().map_err(|_| bad())?
    };
    let rest = s[at + 2..].trim();
    let den = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coef * std::f64::consts::PI / den)
}

/// `theta,phi` with angles as in [`parse_angle`].
pub fn parse_strategy(text: &str) -> crate::Result<StrategyParams> {
    let (t, p) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected 'theta,phi', got '{text}'")))?;
    StrategyParams::new(parse_angle(t)?, parse_angle(p)?)
}

fn parse_grid(text: &str) -> crate::Result<(usize, usize)> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("expected 'THETAxPHI', got '{text}'")))?;
    let n = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad grid size '{s}'")))
    };
    Ok((n(a)?, n(b)?))
}

/// Builtin id or game-definition file, with the label used in reports.
pub fn load_game(spec: &str) -> CliResult<(BimatrixGame, Option<GameId>)> {
    if let Ok(id) = spec.parse::<GameId>() {
        return Ok((builtin_game(id), Some(id)));
    }
    let path = Path::new(spec);
    let looks_like_path = spec.contains(['/', '\\', '.']);
    if !path.exists() && !looks_like_path {
        return Err(CliError::usage(format!(
            "invalid value for --game: {}",
            Error::UnknownGame(spec.into())
        )));
    }
    BimatrixGame::from_file(path)
        .map(|g| (g, None))
        .map_err(|e| CliError::io(format!("cannot load game file {}: {e}", path.display())))
}

fn game_label(game: &BimatrixGame, id: Option<GameId>) -> String {
    id.map(|i| i.key().to_string())
        .unwrap_or_else(|| game.name.clone())
}

fn rate(name: &str, r: f64) -> CliResult<CorruptionRate> {
    flag(name, CorruptionRate::new(r))
}

fn profiles(
    game: &BimatrixGame,
    id: Option<GameId>,
    args: &ProfileArgs,
) -> CliResult<SweepProfiles> {
    let mut p = SweepProfiles::defaults_for(game, id).map_err(CliError::from)?;
    if let Some(s) = &args.alice {
        p.quantum.0 = flag("alice", parse_strategy(s))?;
    }
    if let Some(s) = &args.bob {
        p.quantum.1 = flag("bob", parse_strategy(s))?;
    }
    if let Some(x) = args.alice_mix {
        p.classical.0 = flag("alice-mix", ClassicalMove::new(x))?;
    }
    if let Some(x) = args.bob_mix {
        p.classical.1 = flag("bob-mix", ClassicalMove::new(x))?;
    }
    Ok(p)
}

fn emit(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match output.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json_string(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(format!("cannot write output: {e}"))),
    }
}

pub fn cmd_payoff(args: &PayoffArgs) -> CliResult<Report> {
    let (game, id) = load_game(&args.game.game)?;
    let r = rate("r", args.r)?;
    let alice = flag("alice", parse_strategy(&args.alice))?;
    let bob = flag("bob", parse_strategy(&args.bob))?;
    let basis = {
        let bits: Vec<&str> = args.basis.split(',').map(str::trim).collect();
        let parsed = match bits.as_slice() {
            [f, g] => f.parse::<u8>().ok().zip(g.parse::<u8>().ok()),
            _ => None,
        };
        let (f, g) = parsed.ok_or_else(|| {
            CliError::usage(format!("invalid value for --basis: '{}'", args.basis))
        })?;
        flag("basis", BasisPair::new(f, g))?
    };
    let pay = quantum_payoffs(&game, r, alice, bob, basis);
    let dist = outcome_distribution(r, alice, bob, basis).probs();
    let mut t = Table::new(
        "payoff",
        &[
            "game", "r", "theta_a", "phi_a", "theta_b", "phi_b", "payoff_a", "payoff_b", "p00",
            "p01", "p10", "p11",
        ],
    );
    t.push(vec![
        game_label(&game, id).into(),
        r.value().into(),
        alice.theta().into(),
        alice.phi().into(),
        bob.theta().into(),
        bob.phi().into(),
        pay.a.into(),
        pay.b.into(),
        dist[0].into(),
        dist[1].into(),
        dist[2].into(),
        dist[3].into(),
    ]);
    Ok(Report::new("payoff").with_table(t))
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<Report> {
    let (game, id) = load_game(&args.game.game)?;
    let profiles = profiles(&game, id, &args.profiles)?;
    let grid = match &args.r_values {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("invalid value for --r-values: '{s}'")))
            })
            .collect::<CliResult<Vec<f64>>>()?,
        None if args.points >= 2 => uniform_grid(args.points),
        None => {
            return Err(CliError::usage(
                "invalid value for --points: need at least 2",
            ))
        }
    };
    let curve = flag("r-values", scenario1_sweep(&game, &profiles, &grid))?;
    let mut report = Report::new("sweep").with_table(curve_table(&curve));
    report.detail("game", json!(game_label(&game, id)));
    report.detail(
        "profiles",
        serde_json::to_value(profiles).expect("profiles serialize"),
    );
    Ok(report)
}

pub(crate) fn curve_table(curve: &crate::analysis::SweepCurve) -> Table {
    let mut t = Table::new("curve", &["r", "qA", "qB", "cA", "cB"]);
    for (k, &r) in curve.r_grid.iter().enumerate() {
        let mut row = vec![r.into()];
        row.extend(curve.series.iter().map(|s| s.values[k].into()));
        t.push(row);
    }
    t
}

pub fn cmd_crossings(args: &CrossingsArgs) -> CliResult<Report> {
    let (game, id) = load_game(&args.game.game)?;
    let profiles = profiles(&game, id, &args.profiles)?;
    let baseline = match args.baseline {
        BaselineArg::Corrupt => Baseline::Corrupt,
        BaselineArg::Ideal => Baseline::Ideal,
    };
    let players: &[Player] = match args.player {
        PlayerArg::Alice => &[Player::Alice],
        PlayerArg::Bob => &[Player::Bob],
        PlayerArg::Both => &[Player::Alice, Player::Bob],
    };
    let mut t = Table::new(
        "crossings",
        &["kind", "player", "r_star", "value_a", "value_b", "tangent"],
    );
    let baseline_name = match baseline {
        Baseline::Corrupt => "quantum_vs_classical",
        Baseline::Ideal => "quantum_vs_ideal_classical",
    };
    for &p in players {
        for c in quantum_classical_crossings(&game, &profiles, p, baseline) {
            let who = if p == Player::Alice { "alice" } else { "bob" };
            t.push(vec![
                baseline_name.into(),
                who.into(),
                c.r_star.into(),
                c.value_a.into(),
                c.value_b.into(),
                c.tangent.into(),
            ]);
        }
    }
    if args.player == PlayerArg::Both {
        for c in quantum_equal_payoff_points(&game, &profiles) {
            t.push(vec![
                "quantum_equal".into(),
                "both".into(),
                c.r_star.into(),
                c.value_a.into(),
                c.value_b.into(),
                c.tangent.into(),
            ]);
        }
    }
    let mut report = Report::new("crossings").with_table(t);
    report.detail("game", json!(game_label(&game, id)));
    report.detail("scan_points", json!(CROSSING_SCAN_POINTS));
    Ok(report)
}

pub fn cmd_ne(args: &NeArgs) -> CliResult<Report> {
    let (game, id) = load_game(&args.game.game)?;
    let r = rate("r", args.r)?;
    let (coarse_theta, coarse_phi) = flag("coarse", parse_grid(&args.coarse))?;
    let (fine_theta, fine_phi) = flag("fine", parse_grid(&args.fine))?;
    let config = NeConfig {
        coarse_theta,
        coarse_phi,
        fine_theta,
        fine_phi,
        epsilon: args.epsilon,
        ..NeConfig::default()
    };
    if let Err(e) = config.validate() {
        let name = if !(args.epsilon.is_finite() && args.epsilon > 0.0) {
            "epsilon"
        } else if coarse_theta < 8 || coarse_phi < 8 {
            "coarse"
        } else {
            "fine"
        };
        return Err(CliError::usage(format!("invalid value for --{name}: {e}")));
    }
    let families = ne_search(&game, r, &config)?;
    let mut report = Report::new("ne").with_table(family_table(r.value(), &families));
    report.detail("game", json!(game_label(&game, id)));
    report.detail("r", json!(r.value()));
    report.detail(
        "config",
        serde_json::to_value(config).expect("config serializes"),
    );
    report.detail(
        "families",
        serde_json::to_value(&families).expect("families serialize"),
    );
    Ok(report)
}

pub(crate) const FAMILY_COLUMNS: [&str; 14] = [
    "r",
    "family",
    "kind",
    "payoff_parametric",
    "theta_a",
    "phi_a",
    "theta_b",
    "phi_b",
    "payoff_a",
    "payoff_b",
    "max_gain",
    "members",
    "ranges",
    "phi_sum",
];

pub(crate) fn family_table(r: f64, families: &[EquilibriumFamily]) -> Table {
    let mut t = Table::new("families", &FAMILY_COLUMNS);
    push_families(&mut t, r, families);
    t
}

pub(crate) fn push_families(t: &mut Table, r: f64, families: &[EquilibriumFamily]) {
    for (k, f) in families.iter().enumerate() {
        let rep = f.representative;
        t.push(vec![
            r.into(),
            (k as f64).into(),
            f.descriptor.kind().into(),
            f.payoff_parametric.into(),
            rep.alice.theta().into(),
            rep.alice.phi().into(),
            rep.bob.theta().into(),
            rep.bob.phi().into(),
            rep.payoffs.a.into(),
            rep.payoffs.b.into(),
            rep.max_gain.into(),
            (f.members.len() as f64).into(),
            describe_ranges(&f.descriptor).into(),
            match f.descriptor {
                FamilyDescriptor::PhiSum { phi_sum, .. } => phi_sum.into(),
                _ => "".into(),
            },
        ]);
    }
}

fn describe_ranges(d: &FamilyDescriptor) -> String {
    let range = |(lo, hi): (f64, f64)| format!("[{} {}]", fmt_num(lo), fmt_num(hi));
    match *d {
        FamilyDescriptor::Point => String::new(),
        FamilyDescriptor::AllStrategies => "all".into(),
        FamilyDescriptor::PhiSum {
            theta, phi_alice, ..
        } => {
            format!("theta={} phi_a={}", range(theta), range(phi_alice))
        }
        FamilyDescriptor::Custom {
            theta_alice,
            phi_alice,
            theta_bob,
            phi_bob,
        } => format!(
            "theta_a={} phi_a={} theta_b={} phi_b={}",
            range(theta_alice),
            range(phi_alice),
            range(theta_bob),
            range(phi_bob)
        ),
    }
}

/// Runs one parsed command, writing normal output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Payoff(a) => emit(&cmd_payoff(a)?, &a.output, stdout),
        Command::Sweep(a) => emit(&cmd_sweep(a)?, &a.output, stdout),
        Command::Crossings(a) => emit(&cmd_crossings(a)?, &a.output, stdout),
        Command::Ne(a) => emit(&cmd_ne(a)?, &a.output, stdout),
        Command::Reproduce(a) => {
            let written = reproduce(a.target, &a.out_dir)?;
            for p in written {
                writeln!(stdout, "{}", p.display()).map_err(|e| CliError::io(e.to_string()))?;
            }
            Ok(())
        }
    }
}

/// Full CLI entry point; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
