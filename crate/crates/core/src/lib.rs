//! Token-counting and color-matching strategies on quantum networks without
//! inputs, and linear-programming certificates that their output
//! distributions have no classical (local) network model.
//!
//! Modules, bottom up:
//!
//! - [`netgraph`]: source/party networks, NDCS, ECS, PFIS.
//! - [`lpcore`]: feasibility of `A x = b, x >= 0` with verifiable
//!   witnesses and Farkas certificates.
//! - [`quantum`]: pure-state strategies and exact output distributions.
//! - [`classical`]: classical strategies and hidden-pattern enumeration.
//! - [`rigidity`]: the `q(outputs, t)` system, Finner's inequality and the
//!   certification pipeline.
//! - [`catalog`]: the 5-0, ring, 1-2, complete and graph-coloring families.
//! - [`sweep`]: angle parsing and parallel parameter scans.
//!
//! ```
//! use netrig::catalog::{make_5_0_tc, FiveZeroParams};
//! use netrig::rigidity::{certify_nonlocality, Event, QOptions, Verdict};
//!
//! let (net, strat) = make_5_0_tc(&FiveZeroParams::rotation(std::f64::consts::PI / 8.0)).unwrap();
//! let report = certify_nonlocality(&net, &strat, Event::AllAmbiguous, &QOptions::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::Nonlocal);
//! ```

pub mod catalog;
pub mod classical;
pub mod error;
pub mod lpcore;
pub mod netgraph;
pub mod quantum;
pub mod rigidity;
pub mod sweep;

pub use error::{Error, Result};
