//! Deterministic SOC-ACOPF and DC-OPF builders, recovery of physical
//! quantities, and evaluation of the exact AC equations.

mod block;
mod dc;
mod gap;
mod point;
mod soc;

pub use block::{FarmLimits, SLACK_PRICE_FACTOR};
pub use dc::{build_dc_opf, build_dc_opf_with_wind};
pub use gap::{feasibility_gap, write_gap_csv, GapReport};
pub use point::{
    recover_physical, recover_scenario, BusState, ConverterState, InjectionState, LineState, OperatingPoint,
    RecoverError,
};
pub use soc::{build_soc_acopf, build_soc_acopf_with_wind};

pub(crate) use block::{add_soc_block, name, BlockConfig};
pub(crate) use soc::{add_generators, check_case};

use crate::grid::ValidationReport;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AcopfError {
    #[error("invalid case:\n{0}")]
    InvalidCase(ValidationReport),
    #[error("wind limits given for {given} farms but the case has {expected}")]
    WindMismatch { given: usize, expected: usize },
}
