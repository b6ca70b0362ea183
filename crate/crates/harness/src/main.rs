use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vtslab::config::{ExperimentConfig, Format, Kind};
use vtslab::emit::write_results;
use vtslab::error::Result;
use vtslab::run_experiment;
use vtslab_core::loops::Regime;

#[derive(Parser)]
#[command(name = "vtslab", version, about = "Run variable-time search experiments and check their assertions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Query weights and average query cost of Grover's loop.
    Grover {
        #[command(flatten)]
        common: Common,
        /// Search-space sizes for the weight tables.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Number of random cost profiles.
        #[arg(long)]
        profiles: Option<usize>,
    },
    /// The simple loop-composition instance and its witnesses.
    SimpleLoop {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Marked sets, `;`-separated, elements `+`-separated; `-` is the empty set.
        #[arg(long)]
        marked: Option<String>,
    },
    /// General loop composition over random subroutines.
    GeneralLoop {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instances: Option<usize>,
        /// Regimes to run (i-a, i-b, ii-a, ii-b, ii-c).
        #[arg(long, value_delimiter = ',')]
        regimes: Option<Vec<String>>,
        /// Skip the phase-estimation simulation.
        #[arg(long)]
        no_qpe: bool,
    },
    /// Cost bounds on random stopping-time profiles.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        profiles: Option<usize>,
    },
    /// Every family.
    Suite {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output formats: json, csv.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    assert_tol: Option<f64>,
    #[arg(long)]
    eig_cluster_tol: Option<f64>,
}

impl Common {
    fn load(&self, kind: Kind) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| vtslab::HarnessError::Io { path: path.display().to_string(), source })?;
                let c: ExperimentConfig = toml::from_str(&text)?;
                if c.kind != kind {
                    return Err(vtslab::HarnessError::Config(format!(
                        "{} holds a {} experiment, not {}",
                        path.display(),
                        c.kind.name(),
                        kind.name()
                    )));
                }
                c
            }
            None => ExperimentConfig::new(kind, None),
        };
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if let Some(out) = &self.out {
            c.output_dir = out.clone();
        }
        if let Some(f) = &self.format {
            c.formats = f.iter().map(|s| Format::parse(s)).collect::<Result<_>>()?;
        }
        let t = &mut c.tolerance;
        t.rank_tol = self.rank_tol.or(t.rank_tol);
        t.assert_tol = self.assert_tol.or(t.assert_tol);
        t.eig_cluster_tol = self.eig_cluster_tol.or(t.eig_cluster_tol);
        Ok(c)
    }
}

fn parse_marked(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';')
        .map(|set| {
            let set = set.trim();
            if set == "-" || set.is_empty() {
                return Ok(Vec::new());
            }
            set.split('+')
                .map(|x| x.trim().parse().map_err(|_| vtslab::HarnessError::Config(format!("bad marked element `{x}`"))))
                .collect()
        })
        .collect()
}

fn configure(command: Command) -> Result<ExperimentConfig> {
    let c = match command {
        Command::Grover { common, n, profiles } => {
            let mut c = common.load(Kind::GroverWeights)?;
            if let Some(n) = n {
                c.grover.n = n;
            }
            if let Some(p) = profiles {
                c.grover.profiles = p;
            }
            c
        }
        Command::SimpleLoop { common, n, marked } => {
            let mut c = common.load(Kind::SimpleLoop)?;
            if let Some(n) = n {
                c.simple.n = n;
            }
            if let Some(m) = marked {
                c.simple.marked_sets = parse_marked(&m)?;
            }
            c
        }
        Command::GeneralLoop { common, instances, regimes, no_qpe } => {
            let mut c = common.load(Kind::GeneralLoop)?;
            if let Some(i) = instances {
                c.general.instances = i;
            }
            if let Some(r) = regimes {
                c.general.regimes = r.iter().map(|s| Regime::parse(s)).collect::<std::result::Result<_, _>>()?;
            }
            if no_qpe {
                c.general.qpe = false;
            }
            c
        }
        Command::Bounds { common, profiles } => {
            let mut c = common.load(Kind::BoundsCompare)?;
            if let Some(p) = profiles {
                c.bounds.profiles = p;
            }
            c
        }
        Command::Suite { common } => common.load(Kind::FullSuite)?,
    };
    c.validate()?;
    Ok(c)
}

fn run(command: Command) -> Result<bool> {
    let config = configure(command)?;
    let results = run_experiment(&config)?;
    write_results(&config, &results, &config.output_dir)?;
    let failures = results.failures();
    for (experiment, check) in &failures {
        eprintln!("FAIL {experiment}: {check}");
    }
    println!(
        "{}: {} records, {} failed assertions, written to {}",
        config.kind.name(),
        results.records.len(),
        failures.len(),
        config.output_dir.display()
    );
    Ok(failures.is_empty())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
