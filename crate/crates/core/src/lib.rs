//! Scheduling for multi-resource, partially ordered, flexible job shops.
//!
//! Each job is a set of operations under a partial order and a deadline.
//! Every operation demands one instance of each of several resource classes,
//! and several instances of a class may be able to run it. The goal is to
//! minimize total tardiness `sum_j max(0, C_j - d_j)`.
//!
//! The solver is a depth-first search over allocations and start orders whose
//! timing is carried by an incremental difference-logic engine ([`dl`]). On
//! top of it, [`bound`] locates a uniform per-job tardiness cap by probing,
//! then optimizes under that cap.
//!
//! ```
//! use mpfjss::bound::{solve_with_strategy, Strategy, StrategyConfig};
//! use mpfjss::facts::parse_instance;
//!
//! let inst = parse_instance("
//!     op(a,2). op(b,3). needs(a,w). needs(b,w).
//!     res(w,1,a). res(w,1,b).
//!     job(j1,4). recipe(j1,a). recipe(j1,b). prec(j1,a,b).
//! ").unwrap();
//! let report = solve_with_strategy(&inst, &StrategyConfig::new(Strategy::Exp)).unwrap();
//! assert_eq!(report.total_tardiness, Some(1));
//! ```

pub mod bench;
pub mod bound;
pub mod cli;
pub mod dl;
pub mod error;
pub mod facts;
pub mod generate;
pub mod instance;
pub mod model;
pub mod oracle;
pub mod schedule;
pub mod scheduler;
pub mod validator;

mod search;

pub use bound::{solve_with_strategy, SolveReport, Strategy, StrategyConfig};
pub use error::SolveError;
pub use facts::{load_instance, parse_instance, to_facts};
pub use instance::{validate_instance, Instance, TaskRef};
pub use schedule::{Assignment, Schedule};
pub use scheduler::{Decision, Solver};
pub use validator::check_schedule;
