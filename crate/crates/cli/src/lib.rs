//! Session language, runner and built-in corpus behind the `codim-cat`
//! binary.

pub mod corpus;
pub mod runner;
pub mod selftest;
pub mod session;

pub use runner::{run_session, run_text, Report, RunConfig};
pub use session::{parse_session, ParseDefaults, Session};
