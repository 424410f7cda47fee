//! Batch CLI over the verba library: one subcommand per experiment.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use verba::cli::{self, Command, LawSource, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "verba", version, about = "word equations on matrix groups over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Seed for randomized searches (always logged in reports).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker count for partitioned scans; affects wall time only.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Budget on brute-force tuple evaluations.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Cache directory (defaults to $VERBA_CACHE_DIR).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Output format: json, csv, or text.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GroupWord {
    /// Group spec: SL2/q, PSL2/q, SL3/3, Sz-family/m.
    #[arg(long)]
    group: String,
    /// Word over x,y (aliases x1,x2; [a,b] = a b a^-1 b^-1).
    #[arg(long)]
    word: String,
}

#[derive(Args)]
struct LawArgs {
    /// Named law: engel, u, s, or r.
    #[arg(long, conflicts_with = "law_file")]
    law: Option<String>,
    /// Law file with lines `first: <word>` and `law: <word over x,y,z>`.
    #[arg(long)]
    law_file: Option<PathBuf>,
}

impl LawArgs {
    fn source(&self) -> Result<LawSource, String> {
        match (&self.law, &self.law_file) {
            (Some(name), None) => Ok(LawSource::Named(name.clone())),
            (None, Some(path)) => Ok(LawSource::File(path.clone())),
            _ => Err("pass exactly one of --law or --law-file".into()),
        }
    }
}

#[derive(Subcommand)]
enum Sub {
    /// Exact image of a word map; exit 0 iff surjective.
    Image(GroupWord),
    /// Minimal j ≤ k with w(G)^j = G.
    Cover {
        #[command(flatten)]
        gw: GroupWord,
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    /// Per-class fibre census of a word map.
    Census(GroupWord),
    /// Trace-accelerated census on SL(2,q) through the fibre table.
    TraceCensus {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        word: String,
    },
    /// Build (or load from cache) the fibre table N_π over trace triples.
    Fibretable {
        #[arg(long)]
        q: u64,
    },
    /// Equidistribution statistics (ε*, L1) of a word map.
    Equidist(GroupWord),
    /// Compile a two-letter word to its trace polynomial.
    TraceCompile {
        #[arg(long)]
        word: String,
    },
    /// Search a verbal dynamical system for a nontrivial preperiodic pair.
    Goodness {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        law: LawArgs,
        /// Search for v1 = v2 ≠ 1 instead of a general preperiodic witness.
        #[arg(long)]
        equation: bool,
    },
    /// Fixed points of the trace map ψ and a lifted group-level witness.
    TraceGoodness {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        q: u64,
    },
    /// Mapping-torus periodic-point certificate.
    TorusCert {
        /// Images of the generators, e.g. --endo "x^2" --endo "y^2".
        #[arg(long, required = true)]
        endo: Vec<String>,
        #[arg(long)]
        word: String,
        /// The exponent a in w(Φ^(a)(g)).
        #[arg(long, default_value_t = 1)]
        exponent: u32,
        /// Candidate field sizes, in search order.
        #[arg(long, required = true)]
        q: Vec<u64>,
    },
    /// Exhaustive Suzuki-family search for u1 = u2 ≠ 1.
    Suzuki {
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Commutator surjectivity on a group.
    Ore {
        #[arg(long)]
        group: String,
    },
    /// Classes C with C·C = G.
    Thompson {
        #[arg(long)]
        group: String,
    },
    /// Ordered class pairs with C1·C2 = G ∖ {1}.
    Gm {
        #[arg(long)]
        group: String,
        /// Restrict candidates to classes of element order coprime to 6.
        #[arg(long)]
        coprime6: bool,
    },
    /// Curve criterion vs direct image for the Engel word e_{n+1} on SL(2,q).
    EngelCurve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u64,
    },
    /// Decide whether x^a y^b = -id is solvable in SL(2,q).
    MinusId {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long)]
        q: u64,
    },
    /// Exact bound calculators.
    Bounds {
        #[command(subcommand)]
        kind: BoundsSub,
    },
    /// Witten zeta bound on the commutator distribution.
    Witten {
        #[arg(long)]
        group: String,
        /// Character degrees, comma/whitespace separated (defaults to the
        /// built-in validated lists for PSL2/q, q ≤ 13).
        #[arg(long)]
        degrees_file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundsSub {
    /// Smallest q with q+1-2g√q-d-k > 0, by exact integer arithmetic.
    Weil {
        #[arg(long)]
        g: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 0)]
        k: u64,
    },
    /// Hypersurface count error bound (d-1)(d-2)q^{3/2} + 12(d+4)^4 q.
    Gl {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        q: u64,
    },
}

fn to_command(sub: Sub) -> Result<Command, String> {
    Ok(match sub {
        Sub::Image(gw) => Command::Image {
            group: gw.group,
            word: gw.word,
        },
        Sub::Cover { gw, k } => Command::Cover {
            group: gw.group,
            word: gw.word,
            k,
        },
        Sub::Census(gw) => Command::Census {
            group: gw.group,
            word: gw.word,
        },
        Sub::TraceCensus { q, word } => Command::TraceCensus { q, word },
        Sub::Fibretable { q } => Command::FibreTable { q },
        Sub::Equidist(gw) => Command::Equidist {
            group: gw.group,
            word: gw.word,
        },
        Sub::TraceCompile { word } => Command::TraceCompile { word },
        Sub::Goodness {
            group,
            law,
            equation,
        } => Command::Goodness {
            group,
            law: law.source()?,
            equation,
        },
        Sub::TraceGoodness { law, q } => Command::TraceGoodness {
            law: law.source()?,
            q,
        },
        Sub::TorusCert {
            endo,
            word,
            exponent,
            q,
        } => Command::TorusCert {
            endo,
            word,
            exponent,
            q_list: q,
        },
        Sub::Suzuki { m } => Command::Suzuki { m },
        Sub::Ore { group } => Command::Ore { group },
        Sub::Thompson { group } => Command::Thompson { group },
        Sub::Gm { group, coprime6 } => Command::Gm { group, coprime6 },
        Sub::EngelCurve { n, q } => Command::EngelCurve { n, q },
        Sub::MinusId { a, b, q } => Command::MinusId { a, b, q },
        Sub::Bounds { kind } => match kind {
            BoundsSub::Weil { g, d, k } => Command::BoundsWeil { g, d, k },
            BoundsSub::Gl { d, q } => Command::BoundsGl { d, q },
        },
        Sub::Witten {
            group,
            degrees_file,
        } => Command::Witten {
            group,
            degrees_file,
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match OutputFormat::parse(&cli.format) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::EXIT_INPUT as u8);
        }
    };
    let command = match to_command(cli.command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(cli::EXIT_INPUT as u8);
        }
    };
    let mut cfg = RunConfig::new(command);
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.workers = cli.workers.max(1);
    if let Some(budget) = cli.budget {
        cfg.budget = budget;
    }
    if let Some(cache) = cli.cache {
        cfg.cache_dir = Some(cache);
    }
    match cli::run(&cfg) {
        Ok((report, status)) => {
            let rendered = match report.render(format) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(cli::EXIT_INPUT as u8);
                }
            };
            if let Some(path) = cli.out {
                if let Err(e) = std::fs::write(&path, rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(cli::EXIT_INPUT as u8);
                }
            } else {
                println!("{rendered}");
            }
            ExitCode::from(status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_status_for(&e) as u8)
        }
    }
}
