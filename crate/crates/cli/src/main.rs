use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use codim_cat::corpus;
use codim_cat::runner::{run_text, RunConfig};
use codim_cat::selftest;
use codimcat::limits::Limits;
use codimcat::MonomialOrder;

#[derive(Parser)]
#[command(name = "codim-cat", version, about = "Quotient categories of coherent sheaves by dimension")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a session file and print the JSON report.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the built-in corpus and compare with the golden reports.
    Check {
        /// Write the reports to this directory instead of comparing.
        #[arg(long, value_name = "DIR")]
        write_golden: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the seeded property suites.
    Selftest,
}

#[derive(Args)]
struct Opts {
    /// Default characteristic for `ring` lines without `p=`.
    #[arg(long, default_value_t = 32003)]
    prime: u64,
    /// Default monomial order: lex, grevlex or elim(j).
    #[arg(long, default_value = "grevlex", value_parser = parse_order)]
    order: MonomialOrder,
    /// Largest total degree allowed in a Gröbner basis.
    #[arg(long, default_value_t = 30)]
    max_degree: u32,
    /// Wall-clock budget of a single Gröbner computation, in seconds.
    #[arg(long, default_value_t = 60)]
    timeout_s: u64,
    /// Worker threads for independent commands (0: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Leave out the per-command timings.
    #[arg(long)]
    no_timing: bool,
}

fn parse_order(s: &str) -> Result<MonomialOrder, String> {
    MonomialOrder::parse(s).ok_or_else(|| format!("unknown order `{s}`"))
}

fn seed() -> u64 {
    std::env::var("CODIMCAT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            prime: self.prime,
            order: self.order,
            limits: Limits {
                max_degree: self.max_degree,
                timeout: Duration::from_secs(self.timeout_s),
                ..Limits::default()
            },
            jobs: self.jobs,
            timing: !self.no_timing,
            seed: seed(),
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Cmd::Run { file, opts } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("codim-cat: cannot read {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let report = run_text(&text, &opts.config());
            print!("{}", report.render());
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Cmd::Check { write_golden, opts } => {
            let checked = corpus::check(&opts.config());
            let mut ok = true;
            for c in &checked {
                if let Some(dir) = &write_golden {
                    let path = dir.join(format!("{}.json", c.name));
                    if let Err(e) = std::fs::write(&path, &c.output) {
                        eprintln!("codim-cat: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    println!("wrote {}", path.display());
                } else {
                    println!("{:<12} {}", c.name, if c.matches_golden { "ok" } else { "MISMATCH" });
                    ok &= c.matches_golden;
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Cmd::Selftest => {
            let seed = seed();
            println!("seed {seed}");
            let mut ok = true;
            for r in selftest::run(seed) {
                let status = if r.passed() { "pass" } else { "FAIL" };
                println!("{status} {} ({} cases)", r.name, r.cases);
                for f in &r.failures {
                    println!("    {f}");
                }
                ok &= r.passed();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
