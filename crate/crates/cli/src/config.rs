//! Validated run configuration shared by all subcommands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use liesym::catalog::{HeatEquation, Regime};
use liesym::expr::JetConfig;
use liesym::numerics::Scheme;

/// Inclusive range of spatial dimensions, written `a..b` or `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub start: usize,
    pub end: usize,
}

impl DimRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl FromStr for DimRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{p}` is not a dimension"))
        };
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if start < 1 || end < start {
            return Err(format!("`{s}` is not a range of dimensions n >= 1"));
        }
        Ok(DimRange { start, end })
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Integer,
    Fractional,
    Both,
}

impl RegimeArg {
    pub fn regimes(self) -> Vec<Regime> {
        match self {
            RegimeArg::Integer => vec![Regime::Integer],
            RegimeArg::Fractional => vec![Regime::Fractional],
            RegimeArg::Both => vec![Regime::Integer, Regime::Fractional],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Gl,
    L1,
}

impl SchemeArg {
    pub fn scheme(self) -> Scheme {
        match self {
            SchemeArg::Gl => Scheme::Gl,
            SchemeArg::L1 => Scheme::L1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeArg::Gl => "gl",
            SchemeArg::L1 => "l1",
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// spatial dimensions, `a..b` (inclusive) or a single value
    #[arg(long, default_value = "1..4", global = true)]
    pub n: DimRange,
    #[arg(long, value_enum, default_value_t = RegimeArg::Both, global = true)]
    pub regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// write to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// α used by the numeric checks
    #[arg(long, default_value_t = 0.5, global = true)]
    pub alpha: f64,
    /// time steps K on [0, T]
    #[arg(long, default_value_t = 400, global = true)]
    pub grid: usize,
    /// J quadrature nodes k per half range
    #[arg(long, default_value_t = 32, global = true)]
    pub quad: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Gl, global = true)]
    pub scheme: SchemeArg,
    /// start of the residual window, default 0.1 T
    #[arg(long, global = true)]
    pub tcut: Option<f64>,
    /// seed of the randomized negative controls
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
    /// directory with edited bracket fixtures, `<n>d_<regime>.toml`
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
}

/// Arguments after the downstream constraints have been checked.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dims: DimRange,
    pub regime: RegimeArg,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub alpha: f64,
    pub grid: usize,
    pub quad: usize,
    pub scheme: SchemeArg,
    pub t_cut: Option<f64>,
    pub seed: u64,
    pub fixtures: Option<PathBuf>,
    pub jet: JetConfig,
}

impl RunConfig {
    pub fn from_args(a: CommonArgs) -> Result<Self, String> {
        if !(a.alpha > 0.0 && a.alpha < 1.0) {
            return Err(format!("--alpha {} must lie in (0, 1)", a.alpha));
        }
        if a.grid < 16 {
            return Err(format!("--grid {} must be at least 16", a.grid));
        }
        if a.quad == 0 {
            return Err("--quad must be positive".into());
        }
        if let Some(t) = a.tcut {
            if !(t >= 0.0 && t < 1.0) {
                return Err(format!("--tcut {t} must lie in [0, T) with T = 1"));
            }
        }
        let jet = JetConfig::from_env().map_err(|e| e.to_string())?;
        Ok(RunConfig {
            dims: a.n,
            regime: a.regime,
            format: a.format,
            output: a.output,
            alpha: a.alpha,
            grid: a.grid,
            quad: a.quad,
            scheme: a.scheme,
            t_cut: a.tcut,
            seed: a.seed,
            fixtures: a.fixtures,
            jet,
        })
    }

    /// Every requested equation, dimension-major.
    pub fn equations(&self) -> Vec<HeatEquation> {
        self.dims
            .iter()
            .flat_map(|n| {
                self.regime
                    .regimes()
                    .into_iter()
                    .map(move |r| HeatEquation::new(n, r).expect("n >= 1"))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("1..4".parse::<DimRange>().unwrap(), DimRange { start: 1, end: 4 });
        assert_eq!("1..=3".parse::<DimRange>().unwrap(), DimRange { start: 1, end: 3 });
        assert_eq!("2".parse::<DimRange>().unwrap(), DimRange { start: 2, end: 2 });
        assert!("0..2".parse::<DimRange>().is_err());
        assert!("3..1".parse::<DimRange>().is_err());
        assert!("a..b".parse::<DimRange>().is_err());
    }
}
