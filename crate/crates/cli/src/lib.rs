//! Command-line front end: every pipeline stage as a subcommand, JSON in,
//! JSON or CSV out.
//!
//! Exit status is 0 on success, 1 for rejected input or arguments and 2 for
//! numerical failures (including `verify` exceeding its tolerance). Errors go
//! to the error stream as `{"error":{"kind":..,"detail":..}}`.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod format;

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rtl_core::direct::direct_transform;
use rtl_core::flow::{evolve_weights, solve_trajectory};
use rtl_core::inverse::inverse_transform;
use rtl_core::ode::integrate_at;
use rtl_core::{example, BidiagonalPencil, FlowSpec, SpectralData};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "rtl", version, about = "Spectral solver for the finite generalized relativistic Toda lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Pencil {"a","b"} to spectral data {"lambda","w"}.
    Direct,
    /// Spectral data to pencil.
    Inverse,
    /// Spectral data evolved to `--time` under `--flow`.
    Evolve,
    /// Pencil along a time grid, by the spectral route.
    Trajectory,
    /// Pencil along a time grid, by direct integration.
    Simulate,
    /// Compares `trajectory` against `simulate`; fails above `--tol`.
    Verify,
    /// The worked five-site example, computed against the published table.
    PaperExample,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Input file; standard input if absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// reciprocal, identity, log or power:<p>.
    #[arg(long, global = true, default_value = "reciprocal")]
    pub flow: String,
    /// Uniform grid `start,end,count`.
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with = "time_list")]
    pub times: Option<String>,
    /// Explicit comma-separated, strictly increasing times.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub time_list: Option<String>,
    /// Evolution time for `evolve`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub time: Option<f64>,
    /// Deviation tolerance for `verify`.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Integrator step for `simulate` and `verify`.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub dt: f64,
    /// Defaults to csv for time grids and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// A failure with its machine-readable kind and exit status.
#[derive(Debug)]
pub struct Failure {
    pub kind: String,
    pub detail: String,
    pub status: i32,
}

impl Failure {
    fn invalid(kind: &str, detail: impl Into<String>) -> Self {
        Failure { kind: kind.into(), detail: detail.into(), status: 1 }
    }

    fn to_json(&self) -> String {
        format!("{{\"error\":{{\"kind\":{},\"detail\":{}}}}}", format::string(&self.kind), format::string(&self.detail))
    }
}

impl From<rtl_core::Error> for Failure {
    fn from(e: rtl_core::Error) -> Self {
        Failure { kind: e.kind().into(), detail: e.to_string(), status: if e.is_numerical() { 2 } else { 1 } }
    }
}

#[derive(Deserialize)]
struct PencilInput {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Deserialize)]
struct SpectralInput {
    lambda: Vec<f64>,
    w: Vec<f64>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::invalid("InvalidInput", e.to_string()))
}

fn read_pencil(text: &str) -> Result<BidiagonalPencil, Failure> {
    let PencilInput { a, b } = parse_json(text)?;
    Ok(BidiagonalPencil::new(a, b)?)
}

fn read_spectral(text: &str) -> Result<SpectralData, Failure> {
    let SpectralInput { lambda, w } = parse_json(text)?;
    Ok(SpectralData::new(lambda, w)?)
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::invalid("InvalidTimes", format!("not a number: {x:?}"))))
        .collect()
}

/// The time grid from `--times start,end,count` or `--time-list`.
pub fn time_grid(opts: &Options) -> Result<Vec<f64>, Failure> {
    let times = match (&opts.times, &opts.time_list) {
        (Some(grid), None) => {
            let parts: Vec<&str> = grid.split(',').collect();
            let [start, end, count] = parts[..] else {
                return Err(Failure::invalid("InvalidTimes", format!("expected start,end,count, got {grid:?}")));
            };
            let (start, end) = (parse_list(start)?[0], parse_list(end)?[0]);
            let count: usize = count.trim().parse().ok().filter(|&c| c >= 1).ok_or_else(|| {
                Failure::invalid("InvalidTimes", format!("count must be a positive integer, got {count:?}"))
            })?;
            if count == 1 {
                vec![start]
            } else {
                let step = (end - start) / (count - 1) as f64;
                (0..count).map(|k| if k + 1 == count { end } else { start + step * k as f64 }).collect()
            }
        }
        (None, Some(list)) => parse_list(list)?,
        (None, None) => return Err(Failure::invalid("InvalidTimes", "one of --times or --time-list is required")),
        (Some(_), Some(_)) => return Err(Failure::invalid("InvalidTimes", "--times and --time-list are exclusive")),
    };
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Failure::invalid("InvalidTimes", "times must be finite and strictly increasing"));
    }
    Ok(times)
}

fn flow(opts: &Options) -> Result<FlowSpec, Failure> {
    Ok(opts.flow.parse::<FlowSpec>()?)
}

fn json_only(opts: &Options, command: &str) -> Result<(), Failure> {
    match opts.format {
        Some(Format::Csv) => Err(Failure::invalid("InvalidArguments", format!("{command} writes JSON only"))),
        _ => Ok(()),
    }
}

/// Output text and exit status of a successful or tolerance-failing run.
fn execute(
    command: Command,
    opts: &Options,
    input: impl FnOnce() -> Result<String, Failure>,
) -> Result<(String, i32), Failure> {
    let format = |default| opts.format.unwrap_or(default);
    let out = match command {
        Command::Direct => {
            let s = direct_transform(&read_pencil(&input()?)?)?;
            match format(Format::Json) {
                Format::Json => format::spectral_json(&s) + "\n",
                Format::Csv => format::spectral_csv(&s),
            }
        }
        Command::Inverse => {
            let p = inverse_transform(&read_spectral(&input()?)?)?;
            match format(Format::Json) {
                Format::Json => format::pencil_json(&p) + "\n",
                Format::Csv => format::pencil_csv(&p),
            }
        }
        Command::Evolve => {
            let t = opts.time.ok_or_else(|| Failure::invalid("InvalidTimes", "--time is required"))?;
            let f = flow(opts)?;
            let s = evolve_weights(&read_spectral(&input()?)?, &f, t)?;
            match format(Format::Json) {
                Format::Json => format!(
                    "{{\"t\":{},\"lambda\":{},\"w\":{}}}\n",
                    format::real(t),
                    format::array(s.lambda()),
                    format::array(s.w())
                ),
                Format::Csv => format::spectral_csv(&s),
            }
        }
        Command::Trajectory | Command::Simulate => {
            let (f, times) = (flow(opts)?, time_grid(opts)?);
            let p = read_pencil(&input()?)?;
            let traj = if command == Command::Trajectory {
                solve_trajectory(&p, &f, &times)?
            } else {
                integrate_at(&p, &f, &times, opts.dt)?
            };
            match format(Format::Csv) {
                Format::Json => format::trajectory_json(&traj),
                Format::Csv => format::trajectory_csv(&traj),
            }
        }
        Command::Verify => {
            json_only(opts, "verify")?;
            let (f, times) = (flow(opts)?, time_grid(opts)?);
            let p = read_pencil(&input()?)?;
            let spectral = solve_trajectory(&p, &f, &times)?;
            let ode = integrate_at(&p, &f, &times, opts.dt)?;
            let dev = spectral.max_abs_deviation(&ode);
            let pass = dev < opts.tol;
            let text = format!(
                "{{\"flow\":{},\"points\":{},\"dt\":{},\"max_deviation\":{},\"tol\":{},\"pass\":{pass}}}\n",
                format::string(&f.to_string()),
                times.len(),
                format::real(opts.dt),
                format::real(dev),
                format::real(opts.tol),
            );
            return Ok((text, if pass { 0 } else { 2 }));
        }
        Command::PaperExample => {
            json_only(opts, "paper-example")?;
            let s = direct_transform(&example::pencil())?;
            let dl = s.lambda().iter().zip(example::LAMBDA).map(|(x, y)| (x - y).abs());
            let dw = s.w().iter().zip(example::W).map(|(x, y)| (x - y).abs());
            let dev = dl.chain(dw).fold(0.0, f64::max);
            format!(
                "{{\"flow\":\"reciprocal\",\"initial\":{},\"computed\":{},\"published\":{{\"lambda\":{},\"w\":{}}},\"max_deviation\":{}}}\n",
                format::pencil_json(&example::pencil()),
                format::spectral_json(&s),
                format::array(&example::LAMBDA),
                format::array(&example::W),
                format::real(dev),
            )
        }
    };
    Ok((out, 0))
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit status.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = writeln!(stderr, "{}", Failure::invalid("InvalidArguments", first).to_json());
            return 1;
        }
    };
    let opts = &cli.opts;
    let input = || -> Result<String, Failure> {
        match &opts.input {
            Some(path) => {
                fs::read_to_string(path).map_err(|e| Failure::invalid("Io", format!("{}: {e}", path.display())))
            }
            None => {
                let mut text = String::new();
                stdin.read_to_string(&mut text).map_err(|e| Failure::invalid("Io", e.to_string()))?;
                Ok(text)
            }
        }
    };
    let result = execute(cli.command, opts, input).and_then(|(text, status)| {
        match &opts.output {
            Some(path) => {
                fs::write(path, &text).map_err(|e| Failure::invalid("Io", format!("{}: {e}", path.display())))?
            }
            None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::invalid("Io", e.to_string()))?,
        }
        Ok(status)
    });
    match result {
        Ok(status) => status,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.to_json());
            f.status
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(times: Option<&str>, list: Option<&str>) -> Options {
        let mut args = vec!["rtl", "trajectory"];
        if let Some(t) = times {
            args.extend(["--times", t]);
        }
        if let Some(l) = list {
            args.extend(["--time-list", l]);
        }
        Cli::try_parse_from(args).unwrap().opts
    }

    #[test]
    fn grids() {
        assert_eq!(time_grid(&opts(Some("-2,2,5"), None)).unwrap(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(time_grid(&opts(Some("3,9,1"), None)).unwrap(), vec![3.0]);
        assert_eq!(time_grid(&opts(None, Some("0, 0.5,2"))).unwrap(), vec![0.0, 0.5, 2.0]);
        let g = time_grid(&opts(Some("-2,2,41"), None)).unwrap();
        assert_eq!((g.len(), g[40]), (41, 2.0));
        for bad in [
            opts(Some("0,1,0"), None),
            opts(Some("0,1"), None),
            opts(None, Some("1,1")),
            opts(None, Some("0,x")),
            opts(None, None),
        ] {
            assert_eq!(time_grid(&bad).unwrap_err().kind, "InvalidTimes");
        }
    }

    #[test]
    fn error_statuses() {
        let numerical: Failure = rtl_core::Error::PositivityLoss { t: 1.0 }.into();
        assert_eq!(numerical.status, 2);
        let invalid: Failure = rtl_core::Error::InvalidLength("x".into()).into();
        assert_eq!((invalid.status, invalid.kind.as_str()), (1, "InvalidLength"));
        assert_eq!(invalid.to_json(), "{\"error\":{\"kind\":\"InvalidLength\",\"detail\":\"invalid length: x\"}}");
    }
}
