use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::Value;

use orbigw::{GroupDescriptor, Insertion, Normalization};
use orbigw_cli::{render, run, CliError, Command, CorrelatorRequest, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Group,
    Chartable,
    Rmatrix,
    Psi,
    Graphs,
    Correlator,
    Verify,
    Example,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Norm {
    X,
    Twisted,
}

/// Exact equivariant descendant invariants of [C^r/G].
#[derive(Debug, Parser)]
#[command(name = "orbigw", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group descriptor: a JSON file or inline JSON.
    #[arg(long, conflicts_with = "family")]
    group: Option<String>,
    /// Built-in family: cyclic, dihedral, binary_dihedral, quaternion, symmetric.
    #[arg(long, requires = "n")]
    family: Option<String>,
    #[arg(long)]
    n: Option<i64>,
    /// Irrep indices of the summands, e.g. "1,0".
    #[arg(long)]
    rep: Option<String>,
    #[arg(long)]
    g: Option<u32>,
    /// Correlator request or insertion list: a JSON file or inline JSON.
    #[arg(long)]
    insertions: Option<String>,
    /// Treat the insertions as identical unordered leaves.
    #[arg(long)]
    unordered: bool,
    #[arg(long, value_enum)]
    normalization: Option<Norm>,
    /// ψ exponents for `psi`, e.g. "1,1".
    #[arg(long)]
    exponents: Option<String>,
    /// Number of leaves for `graphs`.
    #[arg(long)]
    leaves: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    height_cap: Option<u32>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn command(c: Cmd) -> Command {
    match c {
        Cmd::Group => Command::Group,
        Cmd::Chartable => Command::Chartable,
        Cmd::Rmatrix => Command::Rmatrix,
        Cmd::Psi => Command::Psi,
        Cmd::Graphs => Command::Graphs,
        Cmd::Correlator => Command::Correlator,
        Cmd::Verify => Command::Verify,
        Cmd::Example => Command::Example,
    }
}

fn inline_or_file(s: &str) -> Result<String, CliError> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(s.to_string())
    } else {
        std::fs::read_to_string(s).map_err(|e| CliError::config(format!("{s}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(s).map_err(|e| CliError::config(format!("{what}: {e}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| CliError::config(format!("{what}: bad entry `{x}`")))).collect()
}

fn config(args: Args) -> Result<RunConfig, CliError> {
    let cmd = command(args.command);
    let mut cfg = match &args.config {
        Some(p) => {
            let c: RunConfig = parse_json(&inline_or_file(&p.to_string_lossy())?, "config")?;
            if c.command != cmd {
                return Err(CliError::config("config command differs from the subcommand"));
            }
            c
        }
        None => RunConfig::new(cmd),
    };
    if let Some(s) = &args.insertions {
        let text = inline_or_file(s)?;
        let v: Value = parse_json(&text, "insertions")?;
        if v.is_array() {
            cfg.insertions = Some(parse_json::<Vec<Insertion>>(&text, "insertions")?);
        } else {
            let req: CorrelatorRequest = parse_json(&text, "insertions")?;
            cfg.group = req.group.or(cfg.group);
            cfg.rep = req.rep.or(cfg.rep);
            cfg.g = req.g.or(cfg.g);
            cfg.ordered = req.ordered;
            cfg.insertions = Some(req.insertions);
        }
    }
    if let Some(s) = &args.group {
        cfg.group = Some(parse_json::<GroupDescriptor>(&inline_or_file(s)?, "group")?);
    }
    if let (Some(f), Some(n)) = (&args.family, args.n) {
        cfg.group = Some(GroupDescriptor::family(f, n));
    } else if args.n.is_some() && args.family.is_none() && cmd != Command::Example {
        return Err(CliError::config("--n needs --family"));
    }
    if cmd == Command::Example && args.family.is_none() {
        if let Some(n) = args.n {
            cfg.group = Some(GroupDescriptor::family("binary_dihedral", n));
        }
    }
    if let Some(r) = &args.rep {
        cfg.rep = Some(parse_list(r, "--rep")?);
    }
    if let Some(e) = &args.exponents {
        cfg.exponents = Some(parse_list(e, "--exponents")?);
    }
    if args.unordered {
        cfg.ordered = false;
    }
    if let Some(n) = args.normalization {
        cfg.normalization = match n {
            Norm::X => Normalization::X,
            Norm::Twisted => Normalization::Twisted,
        };
    }
    cfg.g = args.g.or(cfg.g);
    cfg.leaves = args.leaves.or(cfg.leaves);
    cfg.order = args.order.or(cfg.order);
    cfg.height_cap = args.height_cap.or(cfg.height_cap);
    cfg.budget = args.budget.or(cfg.budget);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.out = args.out.or(cfg.out);
    Ok(cfg)
}

fn fail(e: CliError) -> ExitCode {
    eprint!("{}", render(&e.to_json()));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::config(e.to_string().trim().to_string())),
    };
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match run(&cfg) {
        Ok(v) => {
            if cfg.out.is_none() {
                print!("{}", render(&v));
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
