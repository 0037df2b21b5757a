//! Configuration, dispatch and JSON output for the `orbigw` command.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use orbigw::algebra::format_rational;
use orbigw::example::type_d_example;
use orbigw::graphs::{correlator, enumerate_graphs};
use orbigw::oracle::{compare_with_graphsum, QuadraticSign, DEFAULT_BUDGET};
use orbigw::rmatrix::default_order;
use orbigw::{
    character_table, psi_integral, r_matrix, CharacterTable, Error, GraphOptions, GraphSum, GroupDescriptor, Insertion,
    Normalization, RepSpec, Target,
};

pub const GROUP_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Group,
    Chartable,
    Rmatrix,
    Psi,
    Graphs,
    Correlator,
    Verify,
    Example,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub group: Option<GroupDescriptor>,
    #[serde(default)]
    pub rep: Option<Vec<usize>>,
    #[serde(default)]
    pub g: Option<u32>,
    #[serde(default)]
    pub insertions: Option<Vec<Insertion>>,
    #[serde(default = "yes")]
    pub ordered: bool,
    #[serde(default = "x_norm")]
    pub normalization: Normalization,
    #[serde(default)]
    pub exponents: Option<Vec<u32>>,
    #[serde(default)]
    pub leaves: Option<usize>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub height_cap: Option<u32>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

fn x_norm() -> Normalization {
    Normalization::X
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            group: None,
            rep: None,
            g: None,
            insertions: None,
            ordered: true,
            normalization: Normalization::X,
            exponents: None,
            leaves: None,
            order: None,
            height_cap: None,
            budget: None,
            seed: 0,
            out: None,
        }
    }
}

/// Correlator request as read from an insertions file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorRequest {
    #[serde(default)]
    pub group: Option<GroupDescriptor>,
    #[serde(default)]
    pub rep: Option<Vec<usize>>,
    #[serde(default)]
    pub g: Option<u32>,
    pub insertions: Vec<Insertion>,
    #[serde(default = "yes")]
    pub ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: "cli.ConfigInvalid".into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        if self.code.starts_with("cli.") {
            2
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message } })
    }
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        let e = e.into();
        CliError { code: e.code(), message: e.to_string() }
    }
}

/// Canonical output: keys sorted, two-space indentation, trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("output types serialize")
}

fn require<T: Clone>(x: &Option<T>, name: &str, cmd: Command) -> Result<T, CliError> {
    x.clone().ok_or_else(|| CliError::config(format!("`{}` requires --{name}", to_value(&cmd).as_str().unwrap_or(""))))
}

fn build_table(cfg: &RunConfig) -> Result<CharacterTable, CliError> {
    let desc = require(&cfg.group, "group or --family", cfg.command)?;
    let group = desc.build(GROUP_CAP)?;
    Ok(character_table(Arc::new(group))?)
}

fn build_target(cfg: &RunConfig) -> Result<Target, CliError> {
    let table = build_table(cfg)?;
    let rep = require(&cfg.rep, "rep", cfg.command)?;
    if rep.is_empty() {
        return Err(CliError::config("--rep needs at least one summand"));
    }
    Ok(Target::new(Arc::new(table), RepSpec::new(rep))?)
}

/// Checks that every field the command needs is present and consistent.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let c = cfg.command;
    match c {
        Command::Group | Command::Chartable => {
            require(&cfg.group, "group or --family", c)?;
        }
        Command::Rmatrix => {
            require(&cfg.group, "group or --family", c)?;
            require(&cfg.rep, "rep", c)?;
            if cfg.order == Some(0) {
                return Err(CliError::config("--order must be at least 1"));
            }
        }
        Command::Psi => {
            require(&cfg.g, "g", c)?;
            require(&cfg.exponents, "exponents", c)?;
        }
        Command::Graphs => {
            require(&cfg.g, "g", c)?;
            if cfg.leaves.is_none() && cfg.insertions.is_none() {
                return Err(CliError::config("`graphs` requires --leaves or --insertions"));
            }
        }
        Command::Correlator => {
            require(&cfg.group, "group or --family", c)?;
            require(&cfg.rep, "rep", c)?;
            require(&cfg.g, "g", c)?;
            let ins = require(&cfg.insertions, "insertions", c)?;
            if ins.is_empty() {
                return Err(CliError::config("at least one insertion is needed"));
            }
            if !cfg.ordered && ins.iter().any(|x| *x != ins[0]) {
                return Err(CliError::config("unordered insertions must all be equal"));
            }
        }
        Command::Verify => {
            if cfg.group.is_some() != cfg.rep.is_some() {
                return Err(CliError::config("`verify` takes both --group/--family and --rep, or neither"));
            }
        }
        Command::Example => {}
    }
    Ok(())
}

fn write_out(cfg: &RunConfig, v: &Value) -> Result<(), CliError> {
    if let Some(path) = &cfg.out {
        std::fs::write(path, render(v))
            .map_err(|e| CliError { code: "cli.Io".into(), message: format!("{}: {e}", path.display()) })?;
    }
    Ok(())
}

/// Runs one command; the result is also written to `cfg.out` if set.
pub fn run(cfg: &RunConfig) -> Result<Value, CliError> {
    validate(cfg)?;
    let v = match cfg.command {
        Command::Group => group_info(cfg)?,
        Command::Chartable => chartable(cfg)?,
        Command::Rmatrix => rmatrix(cfg)?,
        Command::Psi => psi(cfg)?,
        Command::Graphs => graphs(cfg)?,
        Command::Correlator => correlator_value(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Example => example(cfg)?,
    };
    write_out(cfg, &v)?;
    Ok(v)
}

fn group_info(cfg: &RunConfig) -> Result<Value, CliError> {
    let g = require(&cfg.group, "group", cfg.command)?.build(GROUP_CAP)?;
    let classes: Vec<Value> = (0..g.num_classes())
        .map(|c| {
            json!({
                "size": g.class_size(c),
                "element_order": g.class_element_order(c),
                "representative": g.class_rep(c),
                "inverse_class": g.class_inverse(c),
            })
        })
        .collect();
    Ok(json!({ "name": g.name(), "order": g.order(), "exponent": g.exponent(), "classes": classes }))
}

fn chartable(cfg: &RunConfig) -> Result<Value, CliError> {
    let t = build_table(cfg)?;
    let nu: Vec<String> = (0..t.num_irreps()).map(|i| format_rational(t.nu(i))).collect();
    Ok(json!({ "group": t.group().name(), "table": to_value(&t.to_json()), "nu": nu }))
}

fn rmatrix(cfg: &RunConfig) -> Result<Value, CliError> {
    let target = build_target(cfg)?;
    let order = cfg.order.unwrap_or(default_order(cfg.g.unwrap_or(1), 3));
    let r = r_matrix(&target, order)?;
    let n = r.size();
    let entries: Vec<Vec<Value>> =
        (0..n).map(|a| (0..n).map(|b| to_value(&r.entry(a, b).coeffs())).collect()).collect();
    Ok(json!({
        "group": target.table().group().name(),
        "rep": target.rep().summands,
        "order": order,
        "basis": "phi",
        "entries": entries,
    }))
}

fn psi(cfg: &RunConfig) -> Result<Value, CliError> {
    let g = require(&cfg.g, "g", cfg.command)?;
    let a = require(&cfg.exponents, "exponents", cfg.command)?;
    let v = psi_integral(g, &a)?;
    Ok(json!({ "g": g, "exponents": a, "value": format_rational(&v) }))
}

fn graphs(cfg: &RunConfig) -> Result<Value, CliError> {
    let g = require(&cfg.g, "g", cfg.command)?;
    let irreps = match &cfg.group {
        Some(_) => build_table(cfg)?.num_irreps(),
        None => 1,
    };
    let n = cfg.leaves.unwrap_or_else(|| cfg.insertions.as_ref().map_or(0, |i| i.len()));
    let list = enumerate_graphs(g, n, 0, irreps, None)?;
    let budget = cfg.budget.unwrap_or(100_000);
    if list.len() > budget {
        return Err(CliError {
            code: "cli.BudgetExceeded".into(),
            message: format!("{} graphs exceed the budget of {budget}", list.len()),
        });
    }
    Ok(json!({ "g": g, "n": n, "irreps": irreps, "count": list.len(), "graphs": to_value(&list) }))
}

fn correlator_value(cfg: &RunConfig) -> Result<Value, CliError> {
    let target = build_target(cfg)?;
    let g = require(&cfg.g, "g", cfg.command)?;
    let ins = require(&cfg.insertions, "insertions", cfg.command)?;
    let n = ins.len();
    let order = cfg.order.unwrap_or(default_order(g, n).max(3 * g as usize + n));
    let r = r_matrix(&target, order)?;
    let opts = GraphOptions { normalization: cfg.normalization, ..Default::default() };
    let sum = GraphSum::new(&target, &r, opts)?;
    let value =
        if cfg.ordered { correlator(&sum, g, &ins, None)? } else { correlator(&sum, g, &[], Some((ins[0], n)))? };
    Ok(json!({ "value": to_value(&value) }))
}

/// Seeded string and dilaton checks on random stable ψ-keys.
fn psi_suite(seed: u64, keys: usize) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..keys {
        let g = rng.gen_range(0..=3u32);
        let n = rng.gen_range(if g == 0 { 3 } else { 1 }..=6usize);
        let dim = 3 * g as usize + n - 3;
        let mut a = vec![0u32; n];
        for _ in 0..dim {
            a[rng.gen_range(0..n)] += 1;
        }
        let lhs_string = psi_integral(g, &[a.clone(), vec![0]].concat())?;
        let mut rhs_string = orbigw::Rational::from_integer(0.into());
        for j in 0..n {
            if a[j] > 0 {
                let mut b = a.clone();
                b[j] -= 1;
                rhs_string += psi_integral(g, &b)?;
            }
        }
        let lhs_dilaton = psi_integral(g, &[a.clone(), vec![1]].concat())?;
        let rhs_dilaton = psi_integral(g, &a)? * orbigw::Rational::from_integer((2 * g as i64 - 2 + n as i64).into());
        if lhs_string != rhs_string || lhs_dilaton != rhs_dilaton {
            failures += 1;
        }
    }
    Ok(json!({ "seed": seed, "keys": keys, "failures": failures }))
}

/// The five groups and representations of the default comparison suite.
pub fn default_suite() -> Vec<(GroupDescriptor, Vec<usize>)> {
    vec![
        (GroupDescriptor::family("cyclic", 1), vec![0, 0]),
        (GroupDescriptor::family("cyclic", 2), vec![1, 0]),
        (GroupDescriptor::family("cyclic", 3), vec![1, 2]),
        (GroupDescriptor::family("symmetric", 3), vec![2, 1]),
        (GroupDescriptor::family("binary_dihedral", 2), vec![4, 0]),
    ]
}

fn verify(cfg: &RunConfig) -> Result<Value, CliError> {
    let suite = match (&cfg.group, &cfg.rep) {
        (Some(d), Some(r)) => vec![(d.clone(), r.clone())],
        _ => default_suite(),
    };
    let cap = cfg.height_cap.unwrap_or(3);
    let budget = cfg.budget.unwrap_or(DEFAULT_BUDGET);
    let mut cases = Vec::new();
    let mut total = 0;
    for (desc, rep) in suite {
        let table = character_table(Arc::new(desc.build(GROUP_CAP)?))?;
        let name = table.group().name().to_string();
        let target = Target::new(Arc::new(table), RepSpec::new(rep.clone()))?;
        for (g, n) in [(0u32, 3usize), (0, 4), (1, 1), (1, 2)] {
            let entry = match compare_with_graphsum(&target, g, n, cap, QuadraticSign::Verbatim, budget) {
                Ok(r) => {
                    total += r.mismatches;
                    json!({ "group": name, "rep": rep, "report": to_value(&r) })
                }
                Err(e) => {
                    total += 1;
                    let e = CliError::from(e);
                    json!({ "group": name, "rep": rep, "g": g, "n": n, "error": { "code": e.code, "message": e.message } })
                }
            };
            cases.push(entry);
        }
    }
    Ok(json!({
        "height_cap": cap,
        "quadratic_sign": to_value(&QuadraticSign::Verbatim),
        "cases": cases,
        "mismatches": total,
        "psi_suite": psi_suite(cfg.seed, 200)?,
    }))
}

fn example(cfg: &RunConfig) -> Result<Value, CliError> {
    let n = match &cfg.group {
        None => 2,
        Some(GroupDescriptor::Family(f)) if f.family == "binary_dihedral" => f.n as usize,
        Some(_) => return Err(CliError::config("`example` takes --family binary_dihedral --n K")),
    };
    let order = cfg.order.unwrap_or(3);
    Ok(to_value(&type_d_example(n, 4, order)?))
}
