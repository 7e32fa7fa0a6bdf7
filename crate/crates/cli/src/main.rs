use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use netcode::bounds::BoundTag;
use netcode::cli_db::{
    closure_report, cmd_closure, cmd_enumerate, cmd_operate, cmd_query, cmd_region, cmd_sweep,
    parse_flag, parse_operation, parse_pairs, read_closure_config, resolve_network, resolve_tag,
    CliError, Db, Filter,
};
use netcode::enumerate::Mode;

#[derive(Parser)]
#[command(
    name = "netcode",
    about = "Enumerate network coding problems and bound their rate regions"
)]
struct Cli {
    /// Results database (JSON lines).
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Idsc,
}

#[derive(Subcommand)]
enum Command {
    /// List all canonical minimal (K, L) networks.
    Enumerate {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, value_enum, default_value = "general")]
        mode: ModeArg,
        /// Allow the large classes; checkpoints to `--checkpoint`.
        #[arg(long)]
        long_run: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Compute bounds for one network (file path or network text).
    Region {
        network: String,
        /// Comma-separated tags: outer, scalar-2, vector-2-6, vector-2+1, ingleton.
        #[arg(long, default_value = "outer")]
        bounds: String,
    },
    /// Check bounds against the outer bound on every (K, L) network.
    Sweep {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value = "scalar-2")]
        bounds: String,
        #[arg(long)]
        long_run: bool,
    },
    /// Apply one embedding or combination operator.
    Operate {
        /// e.g. edge-delete, source-merge, merge-edges.
        op: String,
        left: String,
        right: Option<String>,
        /// Label for embeddings.
        #[arg(long)]
        target: Option<u32>,
        /// Pairs `a:b,c:d` for combinations.
        #[arg(long, default_value = "")]
        pairs: String,
    },
    /// Grow a seed set under the operators.
    Closure {
        /// JSON closure configuration.
        config: PathBuf,
        /// Override the caps as `K,L`.
        #[arg(long)]
        caps: Option<String>,
        /// Provenance output (JSON lines).
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Print database records.
    Query {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        key: Option<String>,
        /// `tag=bool`, repeatable.
        #[arg(long)]
        flag: Vec<String>,
        #[arg(long)]
        provenance: Option<String>,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
}

fn open_db(path: &Option<PathBuf>) -> Result<Option<Db>, CliError> {
    let Some(p) = path else { return Ok(None) };
    let db = Db::open(p)?;
    if db.skipped > 0 {
        eprintln!(
            "warning: skipped {} unreadable lines in {}",
            db.skipped,
            p.display()
        );
    }
    Ok(Some(db))
}

fn tags(text: &str, n: u32) -> Result<Vec<BoundTag>, CliError> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|t| resolve_tag(t.trim(), n))
        .collect()
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut db = open_db(&cli.db)?;
    match cli.command {
        Command::Enumerate {
            k,
            l,
            mode,
            long_run,
            checkpoint,
        } => {
            let mode = match mode {
                ModeArg::General => Mode::General,
                ModeArg::Idsc => Mode::Idsc,
            };
            let summary = cmd_enumerate(k, l, mode, long_run, checkpoint.as_deref(), &mut |rec| {
                match db.as_mut() {
                    Some(db) => {
                        db.append(rec)?;
                    }
                    None => println!("{}", json(&rec)),
                }
                Ok(())
            })?;
            println!(
                "({},{}) {:?}: {} networks, orbit sum {}",
                k, l, mode, summary.networks, summary.orbit_sum
            );
        }
        Command::Region { network, bounds } => {
            let net = resolve_network(&network)?;
            let tags = tags(&bounds, net.n())?;
            let b = cmd_region(&net, &tags, db.as_mut())?;
            println!("{}", b.key);
            print!("{}", b.outer.render_hrep());
            for (t, f) in &b.sufficient {
                println!(
                    "{t}: {}",
                    if *f {
                        "matches outer"
                    } else {
                        "strictly inside outer"
                    }
                );
            }
        }
        Command::Sweep {
            k,
            l,
            bounds,
            long_run,
        } => {
            let tags = tags(&bounds, k + l)?;
            let tally = cmd_sweep(k, l, &tags, long_run)?;
            if let Some(db) = db.as_mut() {
                for r in tally.records.iter().cloned() {
                    db.append(r)?;
                }
            }
            print!("{}", tally.table());
        }
        Command::Operate {
            op,
            left,
            right,
            target,
            pairs,
        } => {
            let op = parse_operation(&op, &parse_pairs(&pairs)?, target)?;
            let left = resolve_network(&left)?;
            let right = right.map(|r| resolve_network(&r)).transpose()?;
            let out = cmd_operate(&op, &left, right.as_ref(), db.as_mut())?;
            for (i, n) in out.results.iter().enumerate() {
                println!("{n}");
                if let Some(c) = out.outer.as_ref().map(|v| &v[i]) {
                    print!("{}", c.render_hrep());
                }
            }
            if out.results.is_empty() {
                println!("empty network");
            }
        }
        Command::Closure {
            config,
            caps,
            provenance,
        } => {
            let mut cfg = read_closure_config(&config)?;
            if let Some(c) = caps {
                let (k, l) = c
                    .split_once(',')
                    .ok_or_else(|| CliError::Usage("--caps takes K,L".into()))?;
                let p = |s: &str| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Usage("--caps takes K,L".into()))
                };
                cfg.k_max = p(k)?;
                cfg.l_max = p(l)?;
            }
            let r = cmd_closure(&cfg, db.as_mut(), provenance.as_deref())?;
            print!("{}", closure_report(&r));
        }
        Command::Query {
            k,
            l,
            key,
            flag,
            provenance,
            count,
        } => {
            let db = db.ok_or_else(|| CliError::Usage("query needs --db".into()))?;
            let size = match (k, l) {
                (Some(k), Some(l)) => Some((k, l)),
                (None, None) => None,
                _ => return Err(CliError::Usage("give both --k and --l".into())),
            };
            let flags = flag
                .iter()
                .map(|f| parse_flag(f))
                .collect::<Result<_, _>>()?;
            let filter = Filter {
                key,
                size,
                flags,
                provenance,
            };
            let hits = cmd_query(&db, &filter);
            if count {
                println!("{}", hits.len());
            } else {
                for r in hits {
                    println!("{}", json(r));
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
