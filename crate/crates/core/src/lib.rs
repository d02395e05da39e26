//! Steady states of a free-entry oligopoly with differentiated goods in which
//! the number of firms adjusts sluggishly, in proportion to industry profit.
//!
//! Three solution concepts are computed for a symmetric market:
//!
//! - the static free-entry equilibrium `(x̃, ñ)` ([`static_eq`]);
//! - the open-loop steady state `(x*, n*)`, where firms commit to output
//!   paths ([`open_loop`]);
//! - the memoryless closed-loop steady state `(x**, n**)`, where firms
//!   account for rivals' output responding to the firm count
//!   ([`closed_loop`]).
//!
//! Along the way the crate checks the orderings `n* < ñ` and `n** > n*`, the
//! collapse of both dynamic concepts onto the static equilibrium as `s → 0`
//! or `ρ → ∞`, and offers an entry/exit simulator ([`dynamics`]) plus sweep
//! and verification drivers ([`sweep`], [`verify`]) used by the `entrydyn`
//! binary.
//!
//! ```
//! use entrydyn::{LinearMarket, SolverConfig, solve_static, solve_openloop, solve_closedloop};
//!
//! let m = LinearMarket::default(); // a = 11, b = 0.8, c = 1, f = 4
//! let cfg = SolverConfig::default();
//! let st = solve_static(&m.demand(), &m.cost(), &cfg).unwrap();
//! let ol = solve_openloop(&m.demand(), &m.cost(), 0.1, 0.5, &cfg).unwrap();
//! let cl = solve_closedloop(&m.demand(), &m.cost(), 0.1, 0.5, &cfg).unwrap();
//! assert!((st.n_tilde - 4.75).abs() < 1e-9);
//! assert!(ol.n < st.n_tilde && cl.n > ol.n);
//! ```

// `!(v > 0.0)` style tests also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_loop;
pub mod dynamics;
pub mod error;
pub mod market;
pub mod numerics;
pub mod open_loop;
pub mod static_eq;
pub mod sweep;
pub mod verify;

mod fmt;

pub use closed_loop::{
    closedloop_residual, closedloop_residual_with, continue_closedloop, dxi_dn, lambda_s_closedloop,
    lambda_s_closedloop_with, lambda_s_identities, proposition2_check, solve_closedloop, solve_closedloop_from,
    Feedback, FeedbackMode, FeedbackParts, Proposition2Report,
};
pub use dynamics::{myopic_output, simulate_entry, ProfitMode, SimulationConfig, Trajectory};
pub use error::{Error, Result};
pub use fmt::sig6;
pub use market::{
    audit_assumptions, audit_with_costate, symmetric_price, AssumptionReport, CostSpec, LinearCost, LinearDemand,
    LinearMarket, SymmetricDemand, SymmetricPoint,
};
pub use numerics::{continue_in_parameter, solve_2d, ContinuationPoint, SolveError, SolveOutcome, SolverConfig};
pub use open_loop::{
    continue_openloop, lambda_s_openloop, openloop_residual, proposition1_check, solve_openloop, solve_openloop_from,
    Concept, Proposition1Report, SteadyState,
};
pub use static_eq::{entry_slope_dn_dx, solve_static, solve_static_from, static_residual, StaticEquilibrium};
