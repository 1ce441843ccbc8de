//! Solar tracking for a robot that moves along a single wire.
//!
//! The robot looks for the position of maximum photovoltaic power under a
//! drifting tree-shadow field, using an inertia-damped 1-D search that only
//! runs when the panel output falls well below the best value seen so far.
//!
//! Modules:
//! - [`envfield`]: available panel power along the wire over time
//! - [`plant`]: kinematics, battery and power budget, simulation clock
//! - [`sts`]: the tracking state machine
//! - [`oracle`]: brute-force argmax and baseline strategies
//! - [`harness`]: scenario files, traces, reports, comparisons

pub mod envfield;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod plant;
pub mod sts;

pub use envfield::{FrozenField, PowerField, PowerSource, ShadowBand, SunEnvelope, WireSpan};
pub use error::{Error, ErrorClass, Result};
pub use harness::{run_simulation, RunReport, Scenario, TraceRecord};
pub use oracle::{sweep_argmax, SweepResult};
pub use plant::{Battery, Measurement, Mode, PowerBudget, RobotPlant};
pub use sts::{Phase, Strategy, StsParams, StsState};
