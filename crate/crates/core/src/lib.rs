//! Entangled graphs with classical correlations: graph model, mixed-state
//! construction, pair analysis, feasibility rules, and pure-state search.

pub mod analyzer;
pub mod error;
pub mod feasibility;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod search;
pub mod synthesis;

pub use analyzer::{PairVerdict, StateInput, Tolerances};
pub use error::{Error, Result};
pub use feasibility::{
    assess, assess_with_search, census, CensusReport, CensusRow, ComponentVerdict,
    FeasibilityStatus, Verdict, CENSUS_CAP,
};
pub use graph::{CanonicalLabel, EntangledGraph, PairClass, ValidationReport};
pub use linalg::{DensityOperator, PureState, C64};
pub use search::{
    objective, search, search_with_cap, SearchConfig, SearchMethod, SearchResult,
    ACCEPT_OBJECTIVE, SEARCH_QUBIT_CAP,
};
pub use synthesis::{build_mixed, ExcitationBlockState};
