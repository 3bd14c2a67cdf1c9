//! Deterministic simulation of the distributed multiply.
//!
//! Ranks are plain structs; every message goes through a [`CommLedger`]
//! which counts words and messages per rank and tracks the longest chain of
//! dependent messages. Collectives are binomial trees, so a broadcast or
//! reduce over `p` ranks costs `p − 1` messages in `⌈log₂p⌉` rounds.

mod arrow;
mod baseline;
pub mod collective;
mod decomp;
mod ledger;
mod storage;

pub use arrow::{
    arrow_critical_path_bound, arrow_multiply_sim, arrow_multiply_sim_with, arrow_tiles, distribute_arrow,
    gather_rows, RankState, RankTiles, Tile, PHASE_BROADCAST, PHASE_REDUCE,
};
pub use baseline::{
    baseline_15d_sim, baseline_15d_sim_with, baseline_dense_words, check_grid, BaselineRun, PHASE_X_BROADCAST,
    PHASE_Y_BROADCAST, PHASE_Y_REDUCE,
};
pub use decomp::{
    decomposition_multiply_sim, decomposition_multiply_sim_with, DecompositionRun, Routing, SimOptions,
    PHASE_FORWARD, PHASE_REVERSE, PHASE_UNPERMUTE,
};
pub use ledger::{
    ledger_summary, Chain, CommLedger, CostModel, CriticalPath, LedgerSummary, Message, PhaseSummary, RankTraffic,
    Totals, LEDGER_SCHEMA,
};
pub use storage::{storage_report, RankStorage, StorageReport};
