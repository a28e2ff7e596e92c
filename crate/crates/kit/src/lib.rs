//! Instance files, seeded generators and verification suites for
//! `sectorial-core`, plus the `sectorial-kit` command-line tool.

pub mod checks;
pub mod generate;
pub mod instance;
pub mod report;
pub mod suites;

pub use instance::{parse_instance, serialize_instance, InstanceDocument, InstanceError, Kind, Problem};
pub use report::{CheckRecord, Verdict, VerificationReport};
pub use suites::{run_suite, verify_document, Suite, SuiteError, SuiteRegistry};
