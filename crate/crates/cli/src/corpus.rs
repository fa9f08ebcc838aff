//! Built-in example sessions and their expected reports.

use crate::runner::{run_text, RunConfig};

pub struct Entry {
    pub name: &'static str,
    pub session: &'static str,
    pub golden: &'static str,
}

macro_rules! entry {
    ($name:literal) => {
        Entry {
            name: $name,
            session: include_str!(concat!("../corpus/", $name, ".ses")),
            golden: include_str!(concat!("../golden/", $name, ".json")),
        }
    };
}

pub const CORPUS: &[Entry] = &[
    entry!("gb"),
    entry!("weq"),
    entry!("minimal"),
    entry!("residue"),
    entry!("pic"),
    entry!("filtration"),
    entry!("hartogs"),
    entry!("cusp"),
    entry!("autoeq"),
];

/// Outcome of running one corpus entry.
pub struct Checked {
    pub name: &'static str,
    pub output: String,
    pub matches_golden: bool,
}

/// Runs every entry without timings; the golden files are compared
/// byte for byte.
pub fn check(config: &RunConfig) -> Vec<Checked> {
    let config = RunConfig {
        timing: false,
        ..config.clone()
    };
    CORPUS
        .iter()
        .map(|e| {
            let output = run_text(e.session, &config).render();
            Checked {
                name: e.name,
                matches_golden: output == e.golden,
                output,
            }
        })
        .collect()
}
