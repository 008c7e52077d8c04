//! Two-player quantum games played through an entangling referee whose
//! input source is corrupt.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: fixed-size 2×2 / 4×4 complex matrices and density matrices.
//! * [`games`]: classical 2×2 bimatrix games and their equilibria.
//! * [`protocol`]: the referee circuit, strategy unitaries and payoffs.
//! * [`analysis`]: payoff sweeps over the corruption rate, crossing
//!   detection and Nash-equilibrium search over the strategy space.
//! * [`cli`] and [`report`]: the command-line front end and its CSV/JSON output.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod games;
pub mod linalg;
pub mod protocol;
pub mod report;

pub use error::{Error, Result};
pub use games::{
    builtin_game, BimatrixGame, GameId, MixedStrategy, OutcomeDistribution, PayoffPair, Player,
};
pub use protocol::{
    classical_payoffs, outcome_distribution, quantum_payoffs, BasisPair, ClassicalMove,
    CorruptionRate, StrategyParams,
};
