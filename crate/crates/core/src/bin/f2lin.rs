use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use f2lin::genkit::GeneratorSpec;
use f2lin::merit::DEFAULT_BUDGET;
use f2lin::report::{self, Format, Report};
use f2lin::stats::BirthdayParams;

#[derive(Parser, Serialize)]
#[command(name = "f2lin", version, about = "Equidistribution and linear-relation analysis of F2-linear generators")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv, global = true)]
    format: FormatArg,
    /// Report file; overrides --out-dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for report files named after the command and generator.
    #[arg(long, env = "F2LIN_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true)]
    #[serde(skip)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Tsv,
    Json,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// k(v), d(v), successive minima and N_v for v = 1..=v-max.
    Analyze {
        /// Built-in name (mt19937, memt19937ii) or a dense generator TOML file.
        generator: String,
        #[arg(long, default_value_t = 32)]
        v_max: usize,
        /// N_v is reported only where the shortest vectors fit in this budget.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
    },
    /// Minimum weight N_v of the shortest dual-lattice vectors at one v.
    Merit {
        generator: String,
        #[arg(long)]
        v: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Sample the space when it exceeds the budget; N_v becomes an upper bound.
        #[arg(long)]
        allow_sampling: bool,
        /// Also write the minimum-weight relations to a JSON file.
        #[arg(long)]
        relations: bool,
        #[arg(long, requires = "relations")]
        relations_out: Option<PathBuf>,
    },
    /// Every shortest dual-lattice vector at one v, as a relation.
    Relations {
        generator: String,
        #[arg(long)]
        v: usize,
        /// Refuse to list more than this many.
        #[arg(long, default_value_t = 1 << 16)]
        limit: u64,
        #[arg(long)]
        relations_out: Option<PathBuf>,
    },
    /// Checks relations from a JSON file against generated output.
    Verify {
        generator: String,
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        seeds: Vec<u32>,
    },
    /// Birthday spacings test on lagged coordinates.
    Birthday {
        generator: String,
        /// Points per replication.
        #[arg(long)]
        n: usize,
        /// Replications N.
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Dimension; must match the number of lags.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        log2d: u32,
        #[arg(long, value_delimiter = ',')]
        lags: Vec<usize>,
        /// Replication r uses seed base + 1 + r.
        #[arg(long, default_value_t = 0)]
        seed: u32,
    },
    /// Lattice results against brute-force oracles on random small generators.
    OracleSelftest {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        p_min: usize,
        #[arg(long, default_value_t = 16)]
        p_max: usize,
        #[arg(long, default_value_t = 1)]
        w_min: u32,
        #[arg(long, default_value_t = 8)]
        w_max: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Words per second for a fixed number of outputs.
    Speed {
        generator: String,
        #[arg(long, default_value_t = 100_000_000)]
        count: u64,
        #[arg(long, default_value_t = 5489)]
        seed: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Merit { .. } => "merit",
            Command::Relations { .. } => "relations",
            Command::Verify { .. } => "verify",
            Command::Birthday { .. } => "birthday",
            Command::OracleSelftest { .. } => "oracle-selftest",
            Command::Speed { .. } => "speed",
        }
    }

    fn generator(&self) -> Option<&str> {
        match self {
            Command::Analyze { generator, .. }
            | Command::Merit { generator, .. }
            | Command::Relations { generator, .. }
            | Command::Verify { generator, .. }
            | Command::Birthday { generator, .. }
            | Command::Speed { generator, .. } => Some(generator),
            Command::OracleSelftest { .. } => None,
        }
    }
}

fn stem(cli: &Cli, spec: Option<&GeneratorSpec>) -> String {
    match spec {
        Some(s) => format!("{}-{}", cli.command.name(), s.name()),
        None => cli.command.name().to_string(),
    }
}

fn write_out(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn side_file(cli: &Cli, given: &Option<PathBuf>, name: String) -> PathBuf {
    given.clone().unwrap_or_else(|| {
        cli.output
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("."))
            .join(name)
    })
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let spec = cli.command.generator().map(report::load_generator).transpose()?;
    let gen = || spec.as_ref().expect("command takes a generator");
    let report = match &cli.command {
        Command::Analyze { v_max, budget, .. } => report::analyze(gen(), *v_max, *budget)?,
        Command::Merit {
            v,
            budget,
            allow_sampling,
            relations,
            relations_out,
            ..
        } => {
            let (report, m) = report::merit(gen(), *v, *budget, *allow_sampling)?;
            if *relations {
                let path = side_file(cli, relations_out, format!("{}-v{v}.relations.json", gen().name()));
                write_out(&path, &report::relations_to_json(&m.relations))?;
            }
            report
        }
        Command::Relations {
            v,
            limit,
            relations_out,
            ..
        } => {
            let (report, rels) = report::relations(gen(), *v, *limit)?;
            if let Some(path) = relations_out {
                write_out(path, &report::relations_to_json(&rels))?;
            }
            report
        }
        Command::Verify { file, steps, seeds, .. } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let rels = report::parse_relations(&text)?;
            report::verify(gen(), &rels, *steps, seeds)?
        }
        Command::Birthday {
            n,
            reps,
            t,
            log2d,
            lags,
            seed,
            ..
        } => {
            if let Some(t) = t {
                if *t != lags.len() {
                    bail!("--t {t} does not match {} lags", lags.len());
                }
            }
            let params = BirthdayParams {
                reps: *reps,
                n: *n,
                log2d: *log2d,
                lags: lags.clone(),
                base_seed: *seed,
            };
            report::birthday(gen(), &params)?.0
        }
        Command::OracleSelftest {
            count,
            p_min,
            p_max,
            w_min,
            w_max,
            seed,
        } => report::oracle_selftest(*count, *p_min..=*p_max, *w_min..=*w_max, *seed)?,
        Command::Speed { count, seed, .. } => report::speed(gen(), *count, *seed)?,
    };
    let mut report = report;
    report.config = serde_json::to_value(cli)?;
    let format = match cli.output.format {
        FormatArg::Tsv => Format::Tsv,
        FormatArg::Json => Format::Json,
    };
    let text = report.render(format);
    let path = cli.output.out.clone().or_else(|| {
        cli.output
            .out_dir
            .as_ref()
            .map(|d| d.join(format!("{}.{}", stem(cli, spec.as_ref()), format.extension())))
    });
    match path {
        Some(p) => write_out(&p, &text)?,
        None => print!("{text}"),
    }
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.output.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(r) if r.ok => ExitCode::SUCCESS,
        Ok(r) => {
            eprintln!("{}: check failed", r.command);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
