use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mary_core::{Param, DEFAULT_EPSILON};

#[derive(Debug, Parser)]
#[command(name = "mary", version, about = "Correct-identification probability of m-ary orthogonal channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate q = Q_m(x) from channel parameters or the invariant x.
    Forward(ForwardArgs),
    /// Solve Q_m(x) = q* for x.
    Invert(InvertArgs),
    /// Recover one channel parameter from an observed q*.
    Recover(RecoverArgs),
    /// Well-posed interval [a_m, b_m] of the slope threshold.
    Interval(IntervalArgs),
    /// Choose adjustable parameters that keep the invariant well-posed.
    Tune(TuneArgs),
    /// Write Q_m(x) curves as CSV.
    Plot(PlotArgs),
    /// Monte Carlo estimate of Q_m(x) checked against quadrature.
    Mc(McArgs),
}

#[derive(Debug, Args, Default)]
pub struct ChannelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub pn: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub base: Option<f64>,
    /// Invariant x = (1 - delta) sqrt(ps/pn) sqrt(base), instead of the four
    /// parameters.
    #[arg(short = 'x', allow_negative_numbers = true)]
    pub x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(short = 'm')]
    pub m: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long = "q-star", allow_negative_numbers = true)]
    pub q_star: f64,
    #[arg(short = 'm')]
    pub m: u64,
    /// Search bracket for x.
    #[arg(long, value_parser = parse_pair, default_value = "0:50", allow_hyphen_values = true)]
    pub bracket: (f64, f64),
    #[arg(long, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknown {
    Param(Param),
    M,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// One of delta, ps, pn, base, m.
    #[arg(long, value_parser = parse_unknown)]
    pub unknown: Unknown,
    #[arg(long = "q-star", allow_negative_numbers = true)]
    pub q_star: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(short = 'm')]
    pub m: Option<u64>,
    /// Largest alphabet size searched when the unknown is m.
    #[arg(long = "m-max", default_value_t = 10_000)]
    pub m_max: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[arg(short = 'm')]
    pub m: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedRange {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedValue {
    pub param: Param,
    pub value: f64,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Unknown parameter and its admissible range, as name=lo:hi.
    #[arg(long, value_parser = parse_named_range)]
    pub unknown: NamedRange,
    /// Adjustable parameter and its range, as name=lo:hi. Repeatable.
    #[arg(long = "adjust", value_parser = parse_named_range)]
    pub adjust: Vec<NamedRange>,
    /// Fixed parameter, as name=value. Repeatable.
    #[arg(long = "fix", value_parser = parse_named_value)]
    pub fix: Vec<NamedValue>,
    #[arg(short = 'm')]
    pub m: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.lo + self.step * i as f64)
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Comma-separated alphabet sizes.
    #[arg(short = 'm', value_delimiter = ',', required = true)]
    pub m: Vec<u64>,
    /// Grid of x as lo:hi:step.
    #[arg(long = "x", value_parser = parse_grid, allow_hyphen_values = true)]
    pub x: Grid,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(short = 'x', allow_negative_numbers = true)]
    pub x: f64,
    #[arg(short = 'm')]
    pub m: u64,
    #[arg(short = 'n', default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if lo > hi {
        return Err(format!("range '{s}' has lo > hi"));
    }
    Ok((lo, hi))
}

fn parse_param(s: &str) -> Result<Param, String> {
    s.trim().parse().map_err(|_| format!("unknown parameter '{s}' (expected delta, ps, pn or base)"))
}

fn parse_unknown(s: &str) -> Result<Unknown, String> {
    if s.trim() == "m" {
        Ok(Unknown::M)
    } else {
        parse_param(s).map(Unknown::Param)
    }
}

fn parse_named_range(s: &str) -> Result<NamedRange, String> {
    let (name, range) = s.split_once('=').ok_or_else(|| format!("expected name=lo:hi, got '{s}'"))?;
    let (lo, hi) = parse_pair(range)?;
    Ok(NamedRange { param: parse_param(name)?, lo, hi })
}

fn parse_named_value(s: &str) -> Result<NamedValue, String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    Ok(NamedValue { param: parse_param(name)?, value: parse_f64(value)? })
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected lo:hi:step, got '{s}'"));
    };
    let grid = Grid { lo: parse_f64(lo)?, hi: parse_f64(hi)?, step: parse_f64(step)? };
    if grid.step <= 0.0 || grid.hi < grid.lo {
        return Err(format!("grid '{s}' needs step > 0 and lo <= hi"));
    }
    if grid.len() > 10_000_000 {
        return Err(format!("grid '{s}' has too many points"));
    }
    Ok(grid)
}
