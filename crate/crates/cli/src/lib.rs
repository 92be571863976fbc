//! Argument handling and report output for the `opalg` binary.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;
use opalg_core::experiment::{run_experiment, ExperimentConfig};
use opalg_core::report::Format;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FLAG_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// Run a named operator-algebra experiment and print its report.
#[derive(Parser, Debug)]
#[command(name = "opalg", version)]
struct Args {
    /// Experiment name, e.g. v2norm, littlereade, gauge-scan.
    experiment: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// harmonic, ones, geometric:<r> or list:<w0>,<w1>,...
    #[arg(long)]
    weights: Option<String>,
    /// const:<c>, poly:<c0>,<c1>,..., powern:<n>, step:<a>,<b>,<v>;..., notell1:<m> or singular32
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let fail = |err: &mut dyn Write, code: u8, msg: &dyn std::fmt::Display| {
        let _ = writeln!(err, "opalg: {msg}");
        code
    };
    let format: Format = match args.format.parse() {
        Ok(f) => f,
        Err(e) => return fail(err, EXIT_USAGE, &e),
    };
    let config = ExperimentConfig {
        experiment: args.experiment,
        dim: args.dim,
        nodes: args.nodes,
        seed: args.seed,
        weights: args.weights,
        kernel: args.kernel,
        n_max: args.nmax,
        output_path: args.out,
        format,
    };

    let start = Instant::now();
    let mut report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) if e.is_numeric() => return fail(err, EXIT_NUMERIC, &e),
        Err(e) => return fail(err, EXIT_USAGE, &e),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let _ = writeln!(err, "wall time: {elapsed:.3} s");
    if args.timing {
        report.wall_time = Some(elapsed);
    }

    let text = report.emit(format);
    let written = match &config.output_path {
        Some(path) => std::fs::write(path, &text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return fail(err, EXIT_USAGE, &format!("cannot write report: {e}"));
    }
    for label in report.failed_flags() {
        let _ = writeln!(err, "FAIL {label}");
    }
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_FLAG_FAILED
    }
}
