//! Reproduction harnesses: the Hölder-inequality sweep, rigidity scans
//! along convergent denominators, recurrence-density measurements, entropy
//! slopes, and the Hofer-bound convergence diagnostic.

pub mod entropy;
pub mod hofer_conv;
pub mod inequality;
pub mod recurrence;
pub mod rigidity;

pub use entropy::entropy_slope;
pub use hofer_conv::{hofer_convergence_diagnostic, HoferConvRow};
pub use inequality::{inequality_harness, plane_refined_harness, InequalityReport, SampleOutcome};
pub use recurrence::{recurrence_experiment, RecurrenceReport, SetSpec};
pub use rigidity::{exp_liouville_rigidity, rigidity_scan, RigidityRow};
