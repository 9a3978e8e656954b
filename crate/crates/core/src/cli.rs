//! Command-line front end. [`run_command`] never touches the process
//! streams, so the binary is a thin wrapper and tests can drive it directly.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage errors.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::carrier::AtomSet;
use crate::diag::compute_bounds;
use crate::diag_part;
use crate::diag_perm::{self, Mode};
use crate::error::CliError;
use crate::exec::Strategy;
use crate::fraenkel::{scan, SupportConfig};
use crate::injection::build_tableau;
use crate::oracles::{PartOracle, PermOracle};
use crate::partition::bell;
use crate::perm::FinPerm;

const DEFAULT_SEEDS: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "bfto",
    version,
    about = "Diagonalization engines, injections and support probes over finitely supported permutations and partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct JsonOut {
    /// Write the machine-readable result to this file.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Opportunistic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a permutation moving n points as one moving m points.
    Inject {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Permutation in cycle notation, e.g. "(20;21)".
        #[arg(long)]
        perm: FinPerm,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Recover the permutation behind an encoded one.
    Decode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        perm: FinPerm,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Run the permutation engine against a built-in oracle.
    DiagPerm {
        /// Oracle values move at most this many points.
        #[arg(long)]
        n: usize,
        /// Claimed fiber bound.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Opportunistic)]
        mode: ModeArg,
        /// Seed count in opportunistic mode [default: 64].
        #[arg(long)]
        seeds: Option<usize>,
        /// truncate | pool:P
        #[arg(long, default_value = "truncate")]
        oracle: PermOracle,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Run the partition engine against a built-in oracle.
    DiagPart {
        /// Claimed fiber bound.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// min-block | pool:P
        #[arg(long, default_value = "min-block")]
        oracle: PartOracle,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Classify every assignment s -> t over a small carrier against a support.
    Fraenkel {
        /// Carrier size (atoms 0..N), at most 8.
        #[arg(long, default_value_t = 6)]
        atoms: usize,
        /// Support set, e.g. "{0}".
        #[arg(long, default_value = "{0}")]
        support: AtomSet,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Print Bell numbers B_0 ..= B_N.
    Bell {
        #[arg(long)]
        upto: usize,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Print the threshold l0 and the seed bound m0 for the permutation engine.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: JsonOut,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutput {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(stdout) => CommandOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => CommandOutput {
            code: if matches!(e, CliError::Usage(_)) {
                2
            } else {
                1
            },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn write_json<T: Serialize>(out: &JsonOut, value: &T) -> Result<(), CliError> {
    let Some(path) = &out.json else {
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(command: Command) -> Result<String, CliError> {
    let mut s = String::new();
    match command {
        Command::Inject { n, m, perm, out } => {
            let tableau = build_tableau(n, m)?;
            let (image, trace) = tableau.encode(&perm)?;
            writeln!(s, "{image}").unwrap();
            writeln!(s, "i_s = {}", trace.i_s).unwrap();
            writeln!(s, "h_s = {}", trace.h_s).unwrap();
            writeln!(s, "t_s = {}", trace.t_s).unwrap();
            writeln!(s, "u_s = {}", trace.u_s).unwrap();
            write_json(
                &out,
                &json!({ "n": n, "m": m, "input": perm, "image": image, "trace": trace }),
            )?;
        }
        Command::Decode { n, m, perm, out } => {
            let tableau = build_tableau(n, m)?;
            let decoded = tableau.decode(&perm)?;
            writeln!(s, "{decoded}").unwrap();
            write_json(
                &out,
                &json!({ "n": n, "m": m, "input": perm, "decoded": decoded }),
            )?;
        }
        Command::DiagPerm {
            n,
            k,
            steps,
            mode,
            seeds,
            oracle,
            out,
        } => {
            let mode = match (mode, seeds) {
                (ModeArg::Strict, Some(_)) => {
                    return Err(CliError::Usage(
                        "--seeds applies only to --mode opportunistic".into(),
                    ))
                }
                (ModeArg::Strict, None) => Mode::Strict,
                (ModeArg::Opportunistic, seeds) => {
                    let seeds = seeds.unwrap_or(DEFAULT_SEEDS);
                    if seeds == 0 {
                        return Err(CliError::Usage("--seeds must be at least 1".into()));
                    }
                    Mode::Opportunistic { seeds }
                }
            };
            let cert = diag_perm::run(n, k, oracle.build(n), steps, mode)?;
            summarize(
                &mut s,
                &cert.kind,
                cert.seeds,
                cert.outputs.len(),
                cert.all_distinct,
                &cert.violation,
            );
            if let Some(m0) = cert.m0 {
                writeln!(s, "l0 = {}, m0 = {m0}", cert.l0.unwrap_or_default()).unwrap();
            }
            if let Some(note) = &cert.note {
                writeln!(s, "note: {note}").unwrap();
            }
            write_json(&out, &cert)?;
        }
        Command::DiagPart {
            k,
            steps,
            oracle,
            out,
        } => {
            let cert = diag_part::run(k, oracle.build(), steps)?;
            summarize(
                &mut s,
                &cert.kind,
                cert.seeds,
                cert.outputs.len(),
                cert.all_distinct,
                &cert.violation,
            );
            if let Some(note) = &cert.note {
                writeln!(s, "note: {note}").unwrap();
            }
            write_json(&out, &cert)?;
        }
        Command::Fraenkel {
            atoms,
            support,
            n,
            out,
        } => {
            let cfg = SupportConfig::new(support, n, atoms)?;
            let report = scan(&cfg, Strategy::default())?;
            writeln!(
                s,
                "carrier {} E {} n {}",
                report.carrier, report.e, report.n
            )
            .unwrap();
            writeln!(s, "pairs: {}", report.pairs).unwrap();
            writeln!(s, "missing moved point: {}", report.missing_moved).unwrap();
            writeln!(s, "extra point outside: {}", report.extra_outside).unwrap();
            writeln!(s, "forced fixed point: {}", report.forced_fixed_point).unwrap();
            writeln!(s, "escapes: {}", report.escapes).unwrap();
            writeln!(s, "verified: {}", report.verified).unwrap();
            if let Some(min) = report.min_sample {
                writeln!(s, "smallest missing-moved sample: {min}").unwrap();
            }
            write_json(&out, &report)?;
        }
        Command::Bell { upto, out } => {
            let values = (0..=upto).map(bell).collect::<Result<Vec<_>, _>>()?;
            let line: Vec<String> = values.iter().map(u64::to_string).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
            write_json(&out, &json!({ "upto": upto, "bell": values }))?;
        }
        Command::Bounds { n, k, out } => {
            let params = compute_bounds(n, k)?;
            writeln!(s, "l0 = {}", params.l0).unwrap();
            writeln!(s, "m0 = {}", params.m0).unwrap();
            writeln!(s, "window = {}", params.window).unwrap();
            write_json(&out, &params)?;
        }
    }
    Ok(s)
}

fn summarize(
    s: &mut String,
    kind: &impl Serialize,
    seeds: usize,
    emitted: usize,
    all_distinct: bool,
    violation: &Option<crate::diag::ViolationRecord>,
) {
    let kind = serde_json::to_value(kind).expect("serializable");
    writeln!(s, "kind: {}", kind.as_str().unwrap_or_default()).unwrap();
    writeln!(s, "seeds: {seeds}").unwrap();
    writeln!(s, "emitted: {emitted}").unwrap();
    writeln!(s, "all distinct: {all_distinct}").unwrap();
    if let Some(v) = violation {
        writeln!(
            s,
            "violation: {} inputs share the value {}",
            v.witnesses.len(),
            v.output
        )
        .unwrap();
        for w in &v.witnesses {
            writeln!(s, "  {w}").unwrap();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &str) -> CommandOutput {
        run_command(std::iter::once("bfto").chain(args.split_whitespace()))
    }

    #[test]
    fn bell_line() {
        let out = run("bell --upto 6");
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout, "1 1 2 5 15 52 203\n");
    }

    #[test]
    fn inject_example() {
        let out = run("inject --n 2 --m 4 --perm (20;21)");
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(
            out.stdout.starts_with("(0;1)(20;21)\ni_s = 0\nh_s = ()\n"),
            "{}",
            out.stdout
        );
        let back = run("decode --n 2 --m 4 --perm (0;1)(20;21)");
        assert_eq!(back.stdout, "(20;21)\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run("bell").code, 2);
        assert_eq!(run("frobnicate").code, 2);
        assert_eq!(run("inject --n 2 --m 4 --perm (1;1)").code, 2);
        assert_eq!(run("diag-perm --n 1 --k 1 --mode strict --seeds 5").code, 2);
        assert_eq!(run("inject --n 3 --m 3 --perm (1;2;3)").code, 1);
        assert_eq!(run("decode --n 2 --m 4 --perm (0;1)").code, 1);
        assert_eq!(run("bell --upto 99").code, 1);
        assert_eq!(run("diag-perm --n 1 --k 1 --steps 0").code, 1);
        assert_eq!(run("fraenkel --n 1").code, 1);
        assert_eq!(run("--help").code, 0);
    }

    #[test]
    fn strict_violation_summary() {
        let out = run("diag-perm --n 1 --k 1 --oracle truncate --mode strict --steps 1");
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(
            out.stdout
                .starts_with("kind: ledger-violation\nseeds: 257\n"),
            "{}",
            out.stdout
        );
        assert!(out
            .stdout
            .contains("violation: 2 inputs share the value ()"));
    }

    #[test]
    fn bounds_text() {
        assert_eq!(
            run("bounds --n 1 --k 2").stdout,
            "l0 = 9\nm0 = 648\nwindow = 100\n"
        );
    }
}
