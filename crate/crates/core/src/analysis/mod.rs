//! Corruption-rate sweeps (players unaware of the corruption) and equilibrium
//! search (players informed of it).

pub mod crossings;
pub mod equilibrium;
pub mod optimize;
pub mod sweep;

pub use crossings::{find_crossings, CrossingResult};
pub use equilibrium::{
    certify_ne, ne_search, scenario2_table, Certifier, EquilibriumCandidate, EquilibriumFamily,
    FamilyDescriptor, NeConfig, Scenario2Row, TABLE_RATES,
};
pub use sweep::{
    classify_sd, quantum_classical_crossings, quantum_equal_payoff_points, quantum_minimum,
    scenario1_sweep, sd_case_boundaries, uniform_grid, Baseline, SdCase, Series, SweepCurve,
    SweepProfiles, CROSSING_SCAN_POINTS,
};
