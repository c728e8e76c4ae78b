//! Argument definitions and dispatch.

use std::io::Write;
use std::path::PathBuf;

use boxscope_core::boxspace::Alpha;
use boxscope_core::cayley::DEFAULT_VERTEX_CAP;
use boxscope_core::density::PrimeSet;
use boxscope_core::oddorder::DEFAULT_K_CUTOFF;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use crate::cache::Cache;
use crate::commands::{self, Ctx};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "boxscope",
    version,
    about = "Orders, quotients, Cayley graphs and box spaces of BS(1,m)"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Emit JSON lines
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV with a header row
    #[arg(long, global = true)]
    pub csv: bool,
    /// JSON-lines result cache
    #[arg(long, global = true, env = "BOXSCOPE_CACHE")]
    pub cache: Option<PathBuf>,
    /// Worker threads for sweeps (0 = number of processors)
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Largest Cayley graph to build
    #[arg(long, global = true, default_value_t = DEFAULT_VERTEX_CAP)]
    pub max_vertices: u64,
}

impl GlobalArgs {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Human
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Geometric,
    #[value(alias = "doubly-exponential")]
    DoublyExponential,
    Explicit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplicative order of m mod N with mu = (m^ord - 1) / N
    Order { m: BigUint, n: BigUint },
    /// The congruence quotient Z/N ⋊_m Z/ord_m(N)
    Quotient { m: BigUint, n: BigUint },
    /// Exact Cayley graph diameter of the quotient, with its envelope
    Diameter { m: BigUint, n: BigUint },
    /// Normal form and synthesized word of an element given as a word in a, A, t, T
    Word {
        m: BigUint,
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Cached order/diameter sweep over N coprime to m
    Sweep {
        m: BigUint,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
    },
    /// Order and diameter growth table along a modulus chain
    Scan {
        m: BigUint,
        family: Family,
        #[arg(long)]
        alpha: Alpha,
        #[arg(long)]
        kmax: u32,
        /// Also compute diameters for quotients under the vertex cap
        #[arg(long)]
        diameters: bool,
        /// Comma-separated chain for the explicit family
        #[arg(long, value_delimiter = ',')]
        terms: Vec<BigUint>,
    },
    /// Check the covering quotient Z/N ⋊ Z/(ord N^D) against Q(m, N)
    Covering {
        m: BigUint,
        n: BigUint,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Also test (nN)^alpha <= n
        #[arg(long)]
        alpha: Option<Alpha>,
    },
    /// Prime densities, Euler products and order/modulus scans
    #[command(subcommand)]
    Density(DensityCommand),
    /// Moduli in which a1/a2 has odd multiplicative order
    Oddorder {
        #[arg(allow_negative_numbers = true)]
        a1: BigInt,
        #[arg(allow_negative_numbers = true)]
        a2: BigInt,
        m: BigUint,
        #[arg(long, default_value_t = 2)]
        count: usize,
        /// Largest exponent k tried
        #[arg(long, default_value_t = DEFAULT_K_CUTOFF)]
        kmax: u64,
    },
    /// Write the Cayley graph of the quotient as DOT
    ExportDot {
        m: BigUint,
        n: BigUint,
        /// Output file (standard output if omitted)
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run acceptance criteria (all when none are given)
    Verify { criteria: Vec<u8> },
}

#[derive(Debug, Subcommand)]
pub enum DensityCommand {
    /// #{p <= x in P} / #{p <= x}
    Natural {
        /// all, none, 3,5,7 or "1 mod 4"
        set: PrimeSet,
        #[arg(long)]
        x: u64,
    },
    /// Truncated Dirichlet-type density with exponent s > 1
    Analytic {
        set: PrimeSet,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        cutoff: u64,
    },
    /// Product of (1 - 1/p) over the first members of P
    Euler {
        set: PrimeSet,
        #[arg(long)]
        count: usize,
    },
    /// Exact min ord_m(N)/N over P-smooth N <= bound
    RatioScan {
        m: BigUint,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long)]
        bound: BigUint,
    },
    /// phi(N)/N, the upper envelope of ord_m(N)/N
    Totient { n: BigUint },
}

/// Runs a parsed command line.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    let cache = match &cli.global.cache {
        Some(path) => {
            let cache = Cache::open(path)?;
            if cache.corrupt_lines() > 0 {
                writeln!(
                    err,
                    "warning: skipped {} corrupt line(s) in cache {}",
                    cache.corrupt_lines(),
                    path.display()
                )?;
            }
            Some(cache)
        }
        None => None,
    };
    let mut ctx = Ctx {
        format: cli.global.format(),
        jobs: cli.global.jobs,
        max_vertices: cli.global.max_vertices,
        cache,
        out,
        err,
    };
    match cli.command {
        Command::Order { m, n } => commands::order(&mut ctx, &m, &n),
        Command::Quotient { m, n } => commands::quotient(&mut ctx, &m, &n),
        Command::Diameter { m, n } => commands::diameter(&mut ctx, &m, &n),
        Command::Word { m, word } => commands::word(&mut ctx, &m, &word),
        Command::Sweep { m, n_max, n_min } => commands::sweep(&mut ctx, &m, n_min, n_max),
        Command::Scan {
            m,
            family,
            alpha,
            kmax,
            diameters,
            terms,
        } => commands::scan(&mut ctx, &m, family, alpha, kmax, diameters, terms),
        Command::Covering { m, n, d, alpha } => commands::covering(&mut ctx, &m, &n, d, alpha),
        Command::Density(sub) => match sub {
            DensityCommand::Natural { set, x } => commands::density_natural(&mut ctx, &set, x),
            DensityCommand::Analytic { set, s, cutoff } => commands::density_analytic(&mut ctx, &set, s, cutoff),
            DensityCommand::Euler { set, count } => commands::density_euler(&mut ctx, &set, count),
            DensityCommand::RatioScan { m, primes, bound } => commands::ratio_scan(&mut ctx, &m, &primes, &bound),
            DensityCommand::Totient { n } => commands::totient(&mut ctx, &n),
        },
        Command::Oddorder { a1, a2, m, count, kmax } => commands::oddorder(&mut ctx, &a1, &a2, &m, count, kmax),
        Command::ExportDot { m, n, output } => commands::export_dot(&mut ctx, &m, &n, output.as_deref()),
        Command::Verify { criteria } => commands::verify(&mut ctx, &criteria),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_examples() {
        let cli = Cli::try_parse_from(["boxscope", "scan", "2", "geometric", "--alpha", "0.5", "--kmax", "4"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Scan {
                kmax: 4,
                family: Family::Geometric,
                ..
            }
        ));
        let cli = Cli::try_parse_from(["boxscope", "--json", "order", "2", "5"]).unwrap();
        assert_eq!(cli.global.format(), Format::Json);
        let cli = Cli::try_parse_from(["boxscope", "oddorder", "-2", "1", "2"]).unwrap();
        assert!(matches!(cli.command, Command::Oddorder { .. }));
        let cli = Cli::try_parse_from(["boxscope", "density", "natural", "1 mod 4", "--x", "100"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Density(DensityCommand::Natural { x: 100, .. })
        ));
        assert!(Cli::try_parse_from(["boxscope", "--json", "--csv", "order", "2", "5"]).is_err());
        assert!(Cli::try_parse_from(["boxscope", "order", "2", "x"]).is_err());
    }
}
