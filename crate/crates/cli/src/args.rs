//! Command-line flags and their value parsers.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use eigpert::eigentriple::EigenSelector;
use eigpert::normalize::SchemeKind;
use eigpert::verify::{log_ladder, DEFAULT_NODES};
use eigpert::C64;

/// Upper bound on the number of points in a step ladder or grid.
pub const MAX_LADDER: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "eigpert", version, about = "First-order eigenvalue perturbation analysis and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigentriple, spectral structure, derivatives and bounds at τ₀.
    Analyze(AnalyzeArgs),
    /// Finite-difference sweeps and the contour oracle.
    Verify(VerifyArgs),
    /// Exponent fits for the two defective example families.
    DefectiveDemo(DemoArgs),
    /// Contour-integral projector and eigenvalue count.
    ContourCheck(ContourArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Family document (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "seed", required_unless_present = "seed")]
    pub input: Option<PathBuf>,
    /// Generate a random linear family with ‖A₀‖ = ‖ΔA‖ = 1 from this seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Dimension of the generated family.
    #[arg(long, value_name = "N", default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..=512))]
    pub dimension: u16,
    /// closest=RE,IM | largest-real | largest-modulus | index=K (1-based).
    #[arg(long, value_name = "SELECTOR", value_parser = parse_selector)]
    pub select: Option<EigenSelector>,
    /// Report destination (default standard output).
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeFlags {
    /// n0 | n1 | n2 | n3 | n4.
    #[arg(long, value_name = "SCHEME", value_parser = parse_scheme)]
    pub scheme: Option<SchemeKind>,
    /// Pinned entry of x̂ (1-based).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub pin_j: Option<u32>,
    /// Pinned entry of ŷ (1-based).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub pin_k: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub scheme: SchemeFlags,
}

#[derive(Debug, Clone, Args)]
pub struct ContourFlags {
    /// Quadrature nodes on the circle.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    /// Circle radius (default half the spectral gap).
    #[arg(long, value_name = "R", value_parser = parse_positive)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub scheme: SchemeFlags,
    /// FIRST:LAST (ratio 10) or FIRST:LAST:COUNT, decreasing.
    #[arg(long, value_name = "LADDER", value_parser = parse_steps)]
    pub steps: Option<Ladder>,
    /// Step direction RE,IM (scaled to unit modulus).
    #[arg(long, value_name = "RE,IM", value_parser = parse_complex, allow_hyphen_values = true)]
    pub direction: Option<C64>,
    #[command(flatten)]
    pub contour: ContourFlags,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// 1: [[0,1],[τ,0]]; 2: [[0,τ],[τ²,0]].
    #[arg(long, value_name = "ID", value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: u8,
    /// FIRST:LAST:COUNT (log-spaced) or a comma-separated list.
    #[arg(long, value_name = "GRID", default_value = "1e-1:1e-5:9", value_parser = parse_grid)]
    pub grid: Ladder,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ContourArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub contour: ContourFlags,
}

/// A list of positive reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(pub Vec<f64>);

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(v)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v <= 0.0 {
        return Err(format!("must be positive: {s:?}"));
    }
    Ok(v)
}

/// `RE,IM`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    Ok(C64::new(parse_f64(re)?, parse_f64(im)?))
}

pub fn parse_selector(s: &str) -> Result<EigenSelector, String> {
    match s {
        "largest-real" => Ok(EigenSelector::LargestReal),
        "largest-modulus" => Ok(EigenSelector::LargestModulus),
        _ => {
            if let Some(rest) = s.strip_prefix("closest=") {
                Ok(EigenSelector::ClosestTo(parse_complex(rest)?))
            } else if let Some(rest) = s.strip_prefix("index=") {
                let k: usize = rest.parse().map_err(|_| format!("bad index {rest:?}"))?;
                if k == 0 {
                    return Err("index is 1-based".into());
                }
                Ok(EigenSelector::Index(k - 1))
            } else {
                Err(format!("unknown selector {s:?}"))
            }
        }
    }
}

pub fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    match s {
        "n0" => Ok(SchemeKind::N0),
        "n1" => Ok(SchemeKind::N1),
        "n2" => Ok(SchemeKind::N2),
        "n3" => Ok(SchemeKind::N3),
        "n4" => Ok(SchemeKind::N4Rp),
        _ => Err(format!("unknown scheme {s:?}")),
    }
}

fn ladder(first: f64, last: f64, count: usize) -> Result<Ladder, String> {
    if !(2..=MAX_LADDER).contains(&count) {
        return Err(format!("count must lie in 2..={MAX_LADDER}"));
    }
    log_ladder(first, last, count).map(Ladder).map_err(|e| e.to_string())
}

/// `FIRST:LAST` with ratio 10, or `FIRST:LAST:COUNT`; strictly decreasing.
pub fn parse_steps(s: &str) -> Result<Ladder, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let (first, last) = match parts.as_slice() {
        [a, b] | [a, b, _] => (parse_positive(a)?, parse_positive(b)?),
        _ => return Err(format!("expected FIRST:LAST[:COUNT], got {s:?}")),
    };
    if first <= last {
        return Err("steps must decrease".into());
    }
    let count = match parts.as_slice() {
        [_, _, c] => c.parse().map_err(|_| format!("bad count {c:?}"))?,
        _ => {
            let decades = (first / last).log10();
            if decades > MAX_LADDER as f64 {
                return Err("ladder too long".into());
            }
            decades.round() as usize + 1
        }
    };
    let l = ladder(first, last, count)?;
    if l.0.windows(2).any(|w| w[1] >= w[0]) {
        return Err("steps must decrease strictly".into());
    }
    Ok(l)
}

/// `FIRST:LAST:COUNT` (log-spaced) or `T1,T2,…`.
pub fn parse_grid(s: &str) -> Result<Ladder, String> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected FIRST:LAST:COUNT, got {s:?}"));
        };
        let count: usize = c.parse().map_err(|_| format!("bad count {c:?}"))?;
        ladder(parse_positive(a)?, parse_positive(b)?, count)
    } else {
        let v = s.split(',').map(parse_positive).collect::<Result<Vec<_>, _>>()?;
        if v.len() > MAX_LADDER {
            return Err("grid too long".into());
        }
        Ok(Ladder(v))
    }
}
