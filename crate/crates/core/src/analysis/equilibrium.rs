//! Nash-equilibrium search over the two-parameter strategy space when both
//! players know the corruption rate.
//!
//! The search runs in five stages:
//!
//! 1. evaluate the full payoff bimatrix on a coarse product grid of
//!    strategies (through [`PayoffKernel`], so each cell costs two 16-term
//!    dot products);
//! 2. keep profiles whose grid best-response gain for both players is within
//!    a resolution-dependent tolerance, and group the survivors into
//!    connected components of the grid;
//! 3. refine seeds from each component by alternating best responses;
//! 4. certify every refined profile against a fine grid of deviations with
//!    local refinement of the best one;
//! 5. cluster certified profiles into families and detect a descriptor
//!    (`point`, `φ_A + φ_B = const`, `all strategies`, or plain ranges) that
//!    is only accepted when probe points along it certify as well.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{BimatrixGame, PayoffPair, Player};
use crate::protocol::{BasisPair, CorruptionRate, PayoffKernel, StrategyFeatures, StrategyParams};

use super::optimize::golden_max;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeConfig {
    pub coarse_theta: usize,
    pub coarse_phi: usize,
    pub fine_theta: usize,
    pub fine_phi: usize,
    /// Largest deviation gain accepted for an ε-equilibrium.
    pub epsilon: f64,
    pub max_seeds: usize,
    /// Probe points a family descriptor must pass before it is reported.
    pub probes: usize,
}

impl Default for NeConfig {
    fn default() -> Self {
        Self {
            coarse_theta: 65,
            coarse_phi: 33,
            fine_theta: 257,
            fine_phi: 129,
            epsilon: 1e-6,
            max_seeds: 12,
            probes: 32,
        }
    }
}

impl NeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_theta < 8 || self.coarse_phi < 8 {
            return Err(Error::InvalidArgument(
                "coarse grid needs at least 8 steps per axis".into(),
            ));
        }
        if self.fine_theta < 8 || self.fine_phi < 8 {
            return Err(Error::InvalidArgument(
                "fine grid needs at least 8 steps per axis".into(),
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(
                "epsilon must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    /// Same search with a doubled-resolution certification grid.
    pub fn doubled_fine(&self) -> Self {
        Self {
            fine_theta: 2 * self.fine_theta - 1,
            fine_phi: 2 * self.fine_phi - 1,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCandidate {
    pub alice: StrategyParams,
    pub bob: StrategyParams,
    pub payoffs: PayoffPair,
    /// Best unilateral deviation gain over both players; never negative.
    pub max_gain: f64,
}

impl EquilibriumCandidate {
    pub fn is_equilibrium(&self, epsilon: f64) -> bool {
        self.max_gain <= epsilon
    }

    fn key(&self) -> [f64; 4] {
        [
            self.alice.theta(),
            self.alice.phi(),
            self.bob.theta(),
            self.bob.phi(),
        ]
    }

    fn distance(&self, other: &Self) -> f64 {
        self.key()
            .iter()
            .zip(other.key())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn lex_cmp(a: &EquilibriumCandidate, b: &EquilibriumCandidate) -> std::cmp::Ordering {
    let (ka, kb) = (a.key(), b.key());
    ka.iter()
        .zip(kb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyDescriptor {
    /// A single profile.
    Point,
    /// `θ_A = θ_B = θ ∈ theta`, `φ_A ∈ phi_alice`, `φ_B = phi_sum − φ_A`.
    /// At `θ = π` the phases are irrelevant.
    PhiSum {
        theta: (f64, f64),
        phi_alice: (f64, f64),
        phi_sum: f64,
    },
    /// Every profile is an equilibrium with the same payoffs.
    AllStrategies,
    /// Observed parameter ranges only; no structure was confirmed.
    Custom {
        theta_alice: (f64, f64),
        phi_alice: (f64, f64),
        theta_bob: (f64, f64),
        phi_bob: (f64, f64),
    },
}

impl FamilyDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilyDescriptor::Point => "point",
            FamilyDescriptor::PhiSum { .. } => "phi_sum",
            FamilyDescriptor::AllStrategies => "all_strategies",
            FamilyDescriptor::Custom { .. } => "custom",
        }
    }

    /// Profile of the family at parameters `(θ, φ_A)`, for `PhiSum` only.
    pub fn phi_sum_profile(
        &self,
        theta: f64,
        phi_alice: f64,
    ) -> Option<(StrategyParams, StrategyParams)> {
        match *self {
            FamilyDescriptor::PhiSum { phi_sum, .. } => phi_sum_profile(theta, phi_alice, phi_sum),
            _ => None,
        }
    }
}

fn phi_sum_profile(
    theta: f64,
    phi_alice: f64,
    phi_sum: f64,
) -> Option<(StrategyParams, StrategyParams)> {
    let a = StrategyParams::new(theta, phi_alice).ok()?;
    let b = StrategyParams::new(theta, (phi_sum - phi_alice).clamp(0.0, FRAC_PI_2)).ok()?;
    Some((a, b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumFamily {
    pub representative: EquilibriumCandidate,
    pub members: Vec<EquilibriumCandidate>,
    pub descriptor: FamilyDescriptor,
    /// Members share the descriptor but not a common payoff pair.
    pub payoff_parametric: bool,
}

/// Strategies on a `θ × φ` lattice, with the phase-free `θ = π` column
/// collapsed to a single point.
#[derive(Clone, Debug)]
pub struct StrategyGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub points: Vec<StrategyParams>,
    pub features: Vec<StrategyFeatures>,
    index: Vec<(usize, usize)>,
}

impl StrategyGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let mut points = Vec::new();
        let mut index = Vec::new();
        for k in 0..n_theta {
            let theta = lattice(k, n_theta, PI);
            let m_max = if k == n_theta - 1 { 1 } else { n_phi };
            for m in 0..m_max {
                points.push(StrategyParams::clamped(theta, lattice(m, n_phi, FRAC_PI_2)));
                index.push((k, m));
            }
        }
        let features = points
            .par_iter()
            .map(|s| StrategyFeatures::of(*s))
            .collect();
        Self {
            n_theta,
            n_phi,
            points,
            features,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn theta_step(&self) -> f64 {
        PI / (self.n_theta - 1) as f64
    }

    pub fn phi_step(&self) -> f64 {
        FRAC_PI_2 / (self.n_phi - 1) as f64
    }

    /// Lattice neighbours (Chebyshev distance one), including the point itself.
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut at: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, key) in self.index.iter().enumerate() {
            at.insert(*key, i);
        }
        let last = self.n_theta - 1;
        let flip = at[&(last, 0)];
        self.index
            .iter()
            .map(|&(k, m)| {
                if k == last {
                    let mut v: Vec<usize> = (0..self.n_phi).map(|m| at[&(last - 1, m)]).collect();
                    v.push(flip);
                    return v;
                }
                let mut v = Vec::with_capacity(9);
                for dk in -1i64..=1 {
                    let kk = k as i64 + dk;
                    if kk < 0 || kk as usize >= self.n_theta {
                        continue;
                    }
                    let kk = kk as usize;
                    if kk == last {
                        v.push(flip);
                        continue;
                    }
                    for dm in -1i64..=1 {
                        let mm = m as i64 + dm;
                        if mm >= 0 && (mm as usize) < self.n_phi {
                            v.push(at[&(kk, mm as usize)]);
                        }
                    }
                }
                v
            })
            .collect()
    }
}

fn lattice(k: usize, n: usize, span: f64) -> f64 {
    if k + 1 == n {
        span
    } else {
        span * k as f64 / (n - 1) as f64
    }
}

/// Payoff evaluation, best responses and certification for one game and rate.
pub struct Certifier {
    kernel: PayoffKernel,
    fine: StrategyGrid,
    epsilon: f64,
}

impl Certifier {
    pub fn new(game: &BimatrixGame, r: CorruptionRate, config: &NeConfig) -> Self {
        Self {
            kernel: PayoffKernel::new(game, r, BasisPair::default()),
            fine: StrategyGrid::new(config.fine_theta, config.fine_phi),
            epsilon: config.epsilon,
        }
    }

    pub fn payoffs(&self, alice: StrategyParams, bob: StrategyParams) -> PayoffPair {
        self.kernel
            .payoffs(&StrategyFeatures::of(alice), &StrategyFeatures::of(bob))
    }

    /// Response vector `h` such that the deviating player's payoff is `f·h`.
    fn response(&self, player: Player, opponent: StrategyParams) -> [crate::linalg::C64; 16] {
        let f = StrategyFeatures::of(opponent);
        match player {
            Player::Alice => self.kernel.alice_response(&f),
            Player::Bob => self.kernel.bob_row(&f),
        }
    }

    /// Best payoff `player` can reach against `opponent`: fine-grid argmax,
    /// then coordinate-wise golden-section refinement around it.
    pub fn best_response(&self, player: Player, opponent: StrategyParams) -> (StrategyParams, f64) {
        let h = self.response(player, opponent);
        let value = |s: StrategyParams| StrategyFeatures::of(s).dot(&h);
        let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
        for (i, f) in self.fine.features.iter().enumerate() {
            let v = f.dot(&h);
            if v > best_v {
                best_v = v;
                best_i = i;
            }
        }
        let mut s = self.fine.points[best_i];
        let (dt, dp) = (2.0 * self.fine.theta_step(), 2.0 * self.fine.phi_step());
        for _ in 0..30 {
            let before = best_v;
            let (t, vt) = golden_max(
                |t| value(StrategyParams::clamped(t, s.phi())),
                (s.theta() - dt).max(0.0),
                (s.theta() + dt).min(PI),
                1e-12,
            );
            if vt > best_v {
                s = StrategyParams::clamped(t, s.phi());
                best_v = vt;
            }
            let (p, vp) = golden_max(
                |p| value(StrategyParams::clamped(s.theta(), p)),
                (s.phi() - dp).max(0.0),
                (s.phi() + dp).min(FRAC_PI_2),
                1e-12,
            );
            if vp > best_v {
                s = StrategyParams::clamped(s.theta(), p);
                best_v = vp;
            }
            if best_v - before <= 1e-15 {
                break;
            }
        }
        (s, best_v)
    }

    /// Largest unilateral deviation gain of either player. The current
    /// strategy is always among the deviations, so the gain is never negative.
    pub fn certify(&self, alice: StrategyParams, bob: StrategyParams) -> EquilibriumCandidate {
        let payoffs = self.payoffs(alice, bob);
        let (_, best_a) = self.best_response(Player::Alice, bob);
        let (_, best_b) = self.best_response(Player::Bob, alice);
        let gain = (best_a - payoffs.a).max(best_b - payoffs.b).max(0.0);
        EquilibriumCandidate {
            alice,
            bob,
            payoffs,
            max_gain: gain,
        }
    }

    /// Alternating best responses from a seed; a player only moves when the
    /// improvement exceeds round-off, so exact equilibria stay put.
    pub fn refine(
        &self,
        mut alice: StrategyParams,
        mut bob: StrategyParams,
    ) -> (StrategyParams, StrategyParams) {
        for _ in 0..100 {
            let cur = self.payoffs(alice, bob);
            let mut moved = 0.0f64;
            let (a, va) = self.best_response(Player::Alice, bob);
            if va > cur.a + 1e-13 {
                moved = moved.max(param_distance(a, alice));
                alice = a;
            }
            let cur_b = self.payoffs(alice, bob).b;
            let (b, vb) = self.best_response(Player::Bob, alice);
            if vb > cur_b + 1e-13 {
                moved = moved.max(param_distance(b, bob));
                bob = b;
            }
            if moved <= 1e-10 {
                break;
            }
        }
        (alice.canonical(), bob.canonical())
    }

    /// Moves coordinates onto nearby lattice values when the snapped profile
    /// certifies with the same payoffs.
    fn snap(&self, cand: EquilibriumCandidate, lattice: &StrategyGrid) -> EquilibriumCandidate {
        let snap_axis = |x: f64, step: f64| {
            let k = (x / step).round();
            if (x - k * step).abs() < 1e-5 {
                k * step
            } else {
                x
            }
        };
        let snap = |s: StrategyParams| {
            StrategyParams::clamped(
                snap_axis(s.theta(), lattice.theta_step() / 2.0),
                snap_axis(s.phi(), lattice.phi_step() / 2.0),
            )
            .canonical()
        };
        let (a, b) = (snap(cand.alice), snap(cand.bob));
        if a == cand.alice && b == cand.bob {
            return cand;
        }
        let snapped = self.certify(a, b);
        if snapped.is_equilibrium(self.epsilon)
            && snapped.payoffs.max_abs_diff(&cand.payoffs) <= 1e-9
        {
            snapped
        } else {
            cand
        }
    }
}

fn param_distance(a: StrategyParams, b: StrategyParams) -> f64 {
    (a.theta() - b.theta()).abs().max((a.phi() - b.phi()).abs())
}

/// Certifies a single profile with the default grids of `config`.
pub fn certify_ne(
    game: &BimatrixGame,
    r: CorruptionRate,
    alice: StrategyParams,
    bob: StrategyParams,
    config: &NeConfig,
) -> EquilibriumCandidate {
    Certifier::new(game, r, config).certify(alice, bob)
}

/// Payoff differences below this count as "constant".
const FLAT_TOL: f64 = 1e-9;
/// Payoff pairs closer than this belong to the same family.
const PAYOFF_TOL: f64 = 1e-6;
/// Parameter distance below which two certified profiles are the same point.
const SAME_POINT_TOL: f64 = 1e-6;

struct Survivor {
    alice: usize,
    bob: usize,
    gain: f64,
}

struct CoarseScan {
    survivors: Vec<Survivor>,
    span_a: f64,
    span_b: f64,
}

fn coarse_scan(kernel: &PayoffKernel, grid: &StrategyGrid) -> CoarseScan {
    let n = grid.len();
    let rows: Vec<_> = grid
        .features
        .par_iter()
        .map(|f| (kernel.alice_row(f), kernel.bob_row(f)))
        .collect();
    let feats = &grid.features;

    struct Pass1 {
        col_max_a: Vec<f64>,
        lo: [f64; 2],
        hi: [f64; 2],
    }
    let identity = || Pass1 {
        col_max_a: vec![f64::NEG_INFINITY; n],
        lo: [f64::INFINITY; 2],
        hi: [f64::NEG_INFINITY; 2],
    };
    let row_max_b: Vec<f64> = rows
        .par_iter()
        .map(|(_, rb)| {
            feats
                .iter()
                .map(|f| f.dot(rb))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let pass1 = rows
        .par_iter()
        .fold(identity, |mut acc, (ra, rb)| {
            for (j, f) in feats.iter().enumerate() {
                let pa = f.dot(ra);
                let pb = f.dot(rb);
                if pa > acc.col_max_a[j] {
                    acc.col_max_a[j] = pa;
                }
                acc.lo[0] = acc.lo[0].min(pa);
                acc.hi[0] = acc.hi[0].max(pa);
                acc.lo[1] = acc.lo[1].min(pb);
                acc.hi[1] = acc.hi[1].max(pb);
            }
            acc
        })
        .reduce(identity, |mut a, b| {
            for (x, y) in a.col_max_a.iter_mut().zip(b.col_max_a) {
                *x = x.max(y);
            }
            for k in 0..2 {
                a.lo[k] = a.lo[k].min(b.lo[k]);
                a.hi[k] = a.hi[k].max(b.hi[k]);
            }
            a
        });
    let span_a = pass1.hi[0] - pass1.lo[0];
    let span_b = pass1.hi[1] - pass1.lo[1];
    // near an off-lattice equilibrium the grid gain is second order in the spacing
    let h = grid.theta_step().max(grid.phi_step());
    let tol_a = (2.0 * h * h * span_a).max(FLAT_TOL);
    let tol_b = (2.0 * h * h * span_b).max(FLAT_TOL);
    let col_max_a = &pass1.col_max_a;
    let survivors = rows
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (ra, rb))| {
            let rmb = row_max_b[i];
            feats.iter().enumerate().filter_map(move |(j, f)| {
                let ga = col_max_a[j] - f.dot(ra);
                let gb = rmb - f.dot(rb);
                (ga <= tol_a && gb <= tol_b).then(|| Survivor {
                    alice: i,
                    bob: j,
                    gain: ga.max(gb),
                })
            })
        })
        .collect();
    CoarseScan {
        survivors,
        span_a,
        span_b,
    }
}

fn components(survivors: &[Survivor], grid: &StrategyGrid) -> Vec<Vec<usize>> {
    let n = grid.len();
    let neigh = grid.neighbours();
    let mut at: HashMap<usize, usize> = HashMap::with_capacity(survivors.len());
    for (idx, s) in survivors.iter().enumerate() {
        at.insert(s.alice * n + s.bob, idx);
    }
    let mut parent: Vec<usize> = (0..survivors.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (idx, s) in survivors.iter().enumerate() {
        for &a in &neigh[s.alice] {
            for &b in &neigh[s.bob] {
                if let Some(&other) = at.get(&(a * n + b)) {
                    let (ra, rb) = (find(&mut parent, idx), find(&mut parent, other));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for idx in 0..survivors.len() {
        let root = find(&mut parent, idx);
        groups.entry(root).or_default().push(idx);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for g in out.iter_mut() {
        g.sort_unstable_by_key(|&i| (survivors[i].alice, survivors[i].bob));
    }
    out.sort_by_key(|g| (survivors[g[0]].alice, survivors[g[0]].bob));
    out
}

fn pick_seeds(component: &[usize], survivors: &[Survivor], max_seeds: usize) -> Vec<usize> {
    let best = *component
        .iter()
        .min_by(|&&x, &&y| survivors[x].gain.total_cmp(&survivors[y].gain))
        .expect("components are non-empty");
    let mut seeds = vec![best];
    let extra = max_seeds.saturating_sub(1).min(component.len());
    for k in 0..extra {
        let pos = if extra == 1 {
            0
        } else {
            k * (component.len() - 1) / (extra - 1)
        };
        let s = component[pos];
        if !seeds.contains(&s) {
            seeds.push(s);
        }
    }
    seeds
}

/// Deterministic low-discrepancy point in `[0,1)²`.
fn probe_point(k: usize) -> (f64, f64) {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    let x = 0.5 + A1 * (k + 1) as f64;
    let y = 0.5 + A2 * (k + 1) as f64;
    (x.fract(), y.fract())
}

/// Searches the strategy space for ε-equilibria at corruption rate `r`.
pub fn ne_search(
    game: &BimatrixGame,
    r: CorruptionRate,
    config: &NeConfig,
) -> Result<Vec<EquilibriumFamily>> {
    config.validate()?;
    let certifier = Certifier::new(game, r, config);
    let coarse = StrategyGrid::new(config.coarse_theta, config.coarse_phi);
    let scan = coarse_scan(&certifier.kernel, &coarse);

    if scan.span_a <= FLAT_TOL && scan.span_b <= FLAT_TOL {
        if let Some(family) = all_strategies_family(&certifier, config) {
            return Ok(vec![family]);
        }
    }

    let comps = components(&scan.survivors, &coarse);
    let seeds: Vec<(usize, usize)> = comps
        .iter()
        .enumerate()
        .flat_map(|(c, comp)| {
            pick_seeds(comp, &scan.survivors, config.max_seeds)
                .into_iter()
                .map(move |s| (c, s))
        })
        .collect();
    let refined: Vec<(usize, EquilibriumCandidate)> = seeds
        .par_iter()
        .filter_map(|&(c, s)| {
            let sv = &scan.survivors[s];
            let (a, b) = certifier.refine(coarse.points[sv.alice], coarse.points[sv.bob]);
            let cand = certifier.certify(a, b);
            cand.is_equilibrium(config.epsilon)
                .then(|| (c, certifier.snap(cand, &coarse)))
        })
        .collect();

    let mut unique: Vec<(usize, EquilibriumCandidate)> = Vec::new();
    for (c, cand) in refined {
        if !unique
            .iter()
            .any(|(_, u)| u.distance(&cand) <= SAME_POINT_TOL)
        {
            unique.push((c, cand));
        }
    }

    let mut families = build_families(&certifier, unique, config);
    families.sort_by(|a, b| lex_cmp(&a.representative, &b.representative));
    Ok(families)
}

fn all_strategies_family(certifier: &Certifier, config: &NeConfig) -> Option<EquilibriumFamily> {
    let origin = StrategyParams::identity();
    let representative = certifier.certify(origin, origin);
    let mut members = vec![representative];
    for k in 0..config.probes {
        let (u, v) = probe_point(2 * k);
        let (w, z) = probe_point(2 * k + 1);
        let a = StrategyParams::clamped(u * PI, v * FRAC_PI_2);
        let b = StrategyParams::clamped(w * PI, z * FRAC_PI_2);
        let cand = certifier.certify(a, b);
        if !cand.is_equilibrium(config.epsilon)
            || cand.payoffs.max_abs_diff(&representative.payoffs) > FLAT_TOL
        {
            return None;
        }
        members.push(cand);
    }
    Some(EquilibriumFamily {
        representative,
        members,
        descriptor: FamilyDescriptor::AllStrategies,
        payoff_parametric: false,
    })
}

fn build_families(
    certifier: &Certifier,
    cands: Vec<(usize, EquilibriumCandidate)>,
    config: &NeConfig,
) -> Vec<EquilibriumFamily> {
    let mut groups: Vec<Vec<(usize, EquilibriumCandidate)>> = Vec::new();
    for (c, cand) in cands {
        match groups
            .iter_mut()
            .find(|g| g[0].1.payoffs.max_abs_diff(&cand.payoffs) <= PAYOFF_TOL)
        {
            Some(g) => g.push((c, cand)),
            None => groups.push(vec![(c, cand)]),
        }
    }
    let families: Vec<EquilibriumFamily> = groups
        .into_iter()
        .flat_map(|g| family_from_group(certifier, g, config))
        .collect();
    join_segments(certifier, families, config)
}

/// Isolated points with different payoffs that are joined by a certified
/// straight segment form one payoff-parametric family.
fn join_segments(
    certifier: &Certifier,
    families: Vec<EquilibriumFamily>,
    config: &NeConfig,
) -> Vec<EquilibriumFamily> {
    let (points, mut out): (Vec<_>, Vec<_>) = families
        .into_iter()
        .partition(|f| f.descriptor == FamilyDescriptor::Point);
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (points[i].representative, points[j].representative);
            if p.payoffs.max_abs_diff(&q.payoffs) <= PAYOFF_TOL {
                continue;
            }
            let joined = [0.25, 0.5, 0.75].iter().all(|&t| {
                let (a, b) = interpolate(&p, &q, t);
                certifier.certify(a, b).is_equilibrium(config.epsilon)
            });
            if joined {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match sets.iter_mut().find(|s| s[0] == root) {
            Some(s) => s.push(i),
            None => sets.push(vec![i]),
        }
    }
    for set in sets {
        if set.len() == 1 {
            out.push(points[set[0]].clone());
            continue;
        }
        let mut members: Vec<EquilibriumCandidate> = set
            .iter()
            .flat_map(|&i| points[i].members.iter().copied())
            .collect();
        members.sort_by(lex_cmp);
        if set.len() == 2 {
            let (p, q) = (points[set[0]].representative, points[set[1]].representative);
            members.extend(extend_segment(certifier, &p, &q, config));
            members.sort_by(lex_cmp);
            members.dedup_by(|a, b| a.distance(b) <= SAME_POINT_TOL);
        }
        out.push(EquilibriumFamily {
            representative: members[0],
            descriptor: custom_ranges(&members),
            members,
            payoff_parametric: true,
        });
    }
    out
}

fn interpolate(
    p: &EquilibriumCandidate,
    q: &EquilibriumCandidate,
    t: f64,
) -> (StrategyParams, StrategyParams) {
    let lerp = |x: f64, y: f64| x + t * (y - x);
    let a = StrategyParams::clamped(
        lerp(p.alice.theta(), q.alice.theta()),
        lerp(p.alice.phi(), q.alice.phi()),
    );
    let b = StrategyParams::clamped(
        lerp(p.bob.theta(), q.bob.theta()),
        lerp(p.bob.phi(), q.bob.phi()),
    );
    (a, b)
}

/// Certified end points of the line through `p` and `q`, widened by bisection
/// up to the strategy-space boundary. Empty if a probe on the widened segment
/// fails.
fn extend_segment(
    certifier: &Certifier,
    p: &EquilibriumCandidate,
    q: &EquilibriumCandidate,
    config: &NeConfig,
) -> Vec<EquilibriumCandidate> {
    let (kp, kq) = (p.key(), q.key());
    let upper = [PI, FRAC_PI_2, PI, FRAC_PI_2];
    let (mut t_lo, mut t_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..4 {
        let d = kq[k] - kp[k];
        if d.abs() <= 1e-15 {
            continue;
        }
        let (a, b) = ((0.0 - kp[k]) / d, (upper[k] - kp[k]) / d);
        t_lo = t_lo.max(a.min(b));
        t_hi = t_hi.min(a.max(b));
    }
    let ok = |t: f64| {
        let (a, b) = interpolate(p, q, t);
        certifier.certify(a, b).is_equilibrium(config.epsilon)
    };
    let lo = widen(ok, 0.0, t_lo);
    let hi = widen(ok, 1.0, t_hi);
    let n = config.probes.max(2);
    let probes_ok = (0..n)
        .into_par_iter()
        .all(|k| ok(lo + (hi - lo) * k as f64 / (n - 1) as f64));
    if !probes_ok {
        return Vec::new();
    }
    [lo, hi]
        .iter()
        .map(|&t| {
            let (a, b) = interpolate(p, q, t);
            certifier.certify(a.canonical(), b.canonical())
        })
        .collect()
}

fn family_from_group(
    certifier: &Certifier,
    group: Vec<(usize, EquilibriumCandidate)>,
    config: &NeConfig,
) -> Vec<EquilibriumFamily> {
    let mut members: Vec<EquilibriumCandidate> = group.iter().map(|(_, c)| *c).collect();
    members.sort_by(lex_cmp);
    let representative = members[0];
    if members
        .iter()
        .all(|m| m.distance(&representative) <= SAME_POINT_TOL)
    {
        return vec![EquilibriumFamily {
            representative,
            members,
            descriptor: FamilyDescriptor::Point,
            payoff_parametric: false,
        }];
    }
    if let Some(descriptor) = detect_phi_sum(certifier, &members, config) {
        let representative =
            symmetric_member(certifier, &descriptor, &members, config).unwrap_or(representative);
        if !members
            .iter()
            .any(|m| m.distance(&representative) <= SAME_POINT_TOL)
        {
            members.push(representative);
            members.sort_by(lex_cmp);
        }
        return vec![EquilibriumFamily {
            representative,
            members,
            descriptor,
            payoff_parametric: false,
        }];
    }
    // unrelated profiles that merely share payoffs stay apart
    let mut comps: Vec<usize> = group.iter().map(|(c, _)| *c).collect();
    comps.sort_unstable();
    comps.dedup();
    if comps.len() > 1 {
        return comps
            .into_iter()
            .flat_map(|c| {
                let sub: Vec<_> = group.iter().filter(|(cc, _)| *cc == c).copied().collect();
                family_from_group(certifier, sub, config)
            })
            .collect();
    }
    vec![EquilibriumFamily {
        representative,
        descriptor: custom_ranges(&members),
        members,
        payoff_parametric: false,
    }]
}

/// The member with `U_A = U_B`, if the family contains one.
fn symmetric_member(
    certifier: &Certifier,
    descriptor: &FamilyDescriptor,
    members: &[EquilibriumCandidate],
    config: &NeConfig,
) -> Option<EquilibriumCandidate> {
    if let Some(m) = members
        .iter()
        .find(|m| param_distance(m.alice, m.bob) <= SAME_POINT_TOL)
    {
        return Some(*m);
    }
    let FamilyDescriptor::PhiSum {
        theta,
        phi_alice,
        phi_sum,
    } = *descriptor
    else {
        return None;
    };
    let half = 0.5 * phi_sum;
    if half < phi_alice.0 - 1e-12 || half > phi_alice.1 + 1e-12 {
        return None;
    }
    let (a, b) = phi_sum_profile(theta.0, half, phi_sum)?;
    let cand = certifier.certify(a, b);
    (cand.is_equilibrium(config.epsilon)
        && cand.payoffs.max_abs_diff(&members[0].payoffs) <= PAYOFF_TOL)
        .then_some(cand)
}

fn range_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn custom_ranges(members: &[EquilibriumCandidate]) -> FamilyDescriptor {
    FamilyDescriptor::Custom {
        theta_alice: range_of(members.iter().map(|m| m.alice.theta())),
        phi_alice: range_of(members.iter().map(|m| m.alice.phi())),
        theta_bob: range_of(members.iter().map(|m| m.bob.theta())),
        phi_bob: range_of(members.iter().map(|m| m.bob.phi())),
    }
}

fn is_flip(theta: f64) -> bool {
    theta >= PI - 1e-9
}

/// Detects `θ_A = θ_B` with `φ_A + φ_B = const`, widens the observed ranges
/// as far as certification allows, and accepts the descriptor only if all
/// probe points inside it certify with the family's payoffs.
fn detect_phi_sum(
    certifier: &Certifier,
    members: &[EquilibriumCandidate],
    config: &NeConfig,
) -> Option<FamilyDescriptor> {
    if members
        .iter()
        .any(|m| (m.alice.theta() - m.bob.theta()).abs() > SAME_POINT_TOL)
    {
        return None;
    }
    let phased: Vec<&EquilibriumCandidate> = members
        .iter()
        .filter(|m| !is_flip(m.alice.theta()))
        .collect();
    let first = phased.first()?;
    let phi_sum = snap_angle(first.alice.phi() + first.bob.phi());
    if phased
        .iter()
        .any(|m| (m.alice.phi() + m.bob.phi() - phi_sum).abs() > SAME_POINT_TOL)
    {
        return None;
    }
    let payoffs = members[0].payoffs;
    let ok = |theta: f64, phi: f64| -> bool {
        if is_flip(theta) {
            // phases are irrelevant at the full flip
            let flip = StrategyParams::flip();
            let c = certifier.certify(flip, flip);
            return c.is_equilibrium(config.epsilon)
                && c.payoffs.max_abs_diff(&payoffs) <= PAYOFF_TOL;
        }
        match phi_sum_profile(theta, phi, phi_sum) {
            Some((a, b)) if (phi_sum - phi) >= -1e-12 && (phi_sum - phi) <= FRAC_PI_2 + 1e-12 => {
                let c = certifier.certify(a, b);
                c.is_equilibrium(config.epsilon) && c.payoffs.max_abs_diff(&payoffs) <= PAYOFF_TOL
            }
            _ => false,
        }
    };
    let mut theta = range_of(members.iter().map(|m| m.alice.theta()));
    let mut phi = range_of(phased.iter().map(|m| m.alice.phi()));
    let theta_ref = first.alice.theta();
    let phi_ref = first.alice.phi();
    let phi_lo_limit = (phi_sum - FRAC_PI_2).max(0.0);
    let phi_hi_limit = phi_sum.min(FRAC_PI_2);

    if phi.1 - phi.0 > SAME_POINT_TOL {
        phi.0 = widen(|p| ok(theta_ref, p), phi.0, phi_lo_limit);
        phi.1 = widen(|p| ok(theta_ref, p), phi.1, phi_hi_limit);
    }
    if theta.1 - theta.0 > SAME_POINT_TOL {
        theta.0 = widen(|t| ok(t, phi_ref), theta.0, 0.0);
        theta.1 = widen(|t| ok(t, phi_ref), theta.1, PI);
    }

    // probe lattice over the claimed region
    let (nt, np) = if theta.1 - theta.0 > SAME_POINT_TOL {
        if phi.1 - phi.0 > SAME_POINT_TOL {
            (8, config.probes.div_ceil(8))
        } else {
            (config.probes, 1)
        }
    } else {
        (1, config.probes)
    };
    let at = |range: (f64, f64), k: usize, n: usize| {
        if n == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64
        }
    };
    let all_ok = (0..nt)
        .flat_map(|i| (0..np).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .par_iter()
        .all(|&(i, j)| ok(at(theta, i, nt), at(phi, j, np)));
    all_ok.then_some(FamilyDescriptor::PhiSum {
        theta,
        phi_alice: phi,
        phi_sum,
    })
}

/// Rounds to a multiple of π/256 when within 1e-6 of one.
fn snap_angle(x: f64) -> f64 {
    let step = PI / 256.0;
    let k = (x / step).round();
    if (x - k * step).abs() <= 1e-6 {
        k * step
    } else {
        x
    }
}

/// Extends a certified endpoint toward `limit` by bisection on `ok`.
fn widen<F: Fn(f64) -> bool>(ok: F, good: f64, limit: f64) -> f64 {
    if (good - limit).abs() < 1e-12 || ok(limit) {
        return limit;
    }
    let (mut g, mut b) = (good, limit);
    for _ in 0..40 {
        let m = 0.5 * (g + b);
        if ok(m) {
            g = m;
        } else {
            b = m;
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario2Row {
    pub r: f64,
    pub families: Vec<EquilibriumFamily>,
}

/// Default rates for the informed-player tables.
pub const TABLE_RATES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// `ne_search` over a list of rates.
pub fn scenario2_table(
    game: &BimatrixGame,
    rates: &[f64],
    config: &NeConfig,
) -> Result<Vec<Scenario2Row>> {
    rates
        .iter()
        .map(|&r| {
            let rate = CorruptionRate::new(r)?;
            Ok(Scenario2Row {
                r,
                families: ne_search(game, rate, config)?,
            })
        })
        .collect()
}
