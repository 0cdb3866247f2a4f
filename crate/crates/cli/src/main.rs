//! Command-line front end: solve the equilibrium, report approval
//! probabilities and payoffs, locate welfare-optimal deadlines, run
//! comparative-statics sweeps to CSV, drive the Monte Carlo harness, and
//! handle general arrival processes.
//!
//! Single computations print a JSON object to stdout that embeds the full
//! resolved inputs; feeding that object back via `--config` reproduces the
//! run. Sweeps write CSV (with `# key = value` provenance comments) to
//! `--out` or stdout. Exit codes: 0 success, 1 model-level error, 2 usage
//! error, 3 I/O error.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use committee_core::analysis::csv_float;
use committee_core::*;
use serde_json::{json, Value};
// The glob above pulls in the crate's Result alias; restore the std one.
use std::result::Result;

use config::{pick, require, FileConfig};

#[derive(Parser, Debug)]
#[command(
    name = "committee",
    version,
    about = "Two-faction collective stopping game: equilibrium, payoffs, welfare, simulation"
)]
struct Cli {
    /// Flat JSON config file; command-line flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the Markov equilibrium (regime, c_bar, p*, t*).
    Equilibrium(ParamArgs),
    /// Ex-ante approval probability.
    Approve(ParamArgs),
    /// Ex-ante faction payoffs.
    Payoffs(PayoffArgs),
    /// Welfare-optimal decision rule for a faction-A welfare weight.
    Welfare(WelfareArgs),
    /// Approval probability and payoffs over a cost grid (CSV).
    SweepCost(SweepArgs),
    /// Approval probability and payoffs over a prior grid (CSV).
    SweepPrior(SweepArgs),
    /// Monte Carlo estimates, optionally under a deadline rule.
    Simulate(SimArgs),
    /// Equilibrium under a general arrival process.
    General(GeneralArgs),
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Prior probability that the project benefits faction A.
    #[arg(long)]
    p0: Option<f64>,
    /// Per-faction cost of approval.
    #[arg(long)]
    c: Option<f64>,
    /// Discount rate.
    #[arg(long)]
    r: Option<f64>,
    /// Signal intensity for type a.
    #[arg(long)]
    la: Option<f64>,
    /// Signal intensity for type b.
    #[arg(long)]
    lb: Option<f64>,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    /// Multiply payoffs by e^{-r t*} (consistent with the switching value).
    Discounted,
    /// Leave the approval-time discount off.
    Undiscounted,
}

impl Variant {
    fn as_str(self) -> &'static str {
        match self {
            Variant::Discounted => "discounted",
            Variant::Undiscounted => "undiscounted",
        }
    }

    fn from_name(name: &str) -> Result<Self, Failure> {
        match name {
            "discounted" => Ok(Variant::Discounted),
            "undiscounted" => Ok(Variant::Undiscounted),
            other => Err(usage(format!(
                "unknown variant '{other}' (discounted|undiscounted)"
            ))),
        }
    }
}

#[derive(Args, Debug, Default)]
struct PayoffArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Payoff variant (default: discounted).
    #[arg(long, value_enum)]
    variant: Option<Variant>,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("alpha must lie in [0, 1], got {v}"))
    }
}

#[derive(Args, Debug, Default)]
struct WelfareArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Weight of faction A in the utilitarian welfare function, in [0, 1].
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of grid points (default 400).
    #[arg(long)]
    grid: Option<usize>,
    /// Lower grid bound (exclusive; defaults: 0 for costs, c for priors).
    #[arg(long)]
    grid_min: Option<f64>,
    /// Upper grid bound (inclusive for costs, exclusive for priors;
    /// defaults: 1/2 for costs, 1 for priors).
    #[arg(long)]
    grid_max: Option<f64>,
    /// Payoff variant (default: discounted).
    #[arg(long, value_enum)]
    variant: Option<Variant>,
}

#[derive(Args, Debug, Default)]
struct SimArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Replication count (default 1_000_000).
    #[arg(long)]
    n: Option<u64>,
    /// RNG seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Impose a deadline: approval cannot happen after this time.
    #[arg(long)]
    deadline: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct GeneralArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Arrival process: a path to a process JSON file, or inline JSON.
    /// Omitted: an exponential pair is built from --la/--lb.
    #[arg(long, value_name = "PATH|JSON")]
    process: Option<String>,
    /// Scan resolution for the switching-time search (default 512).
    #[arg(long)]
    grid_size: Option<usize>,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

fn model(err: ModelError) -> Failure {
    Failure {
        code: 1,
        message: err.to_string(),
    }
}

fn io_failure(err: std::io::Error, what: &str) -> Failure {
    Failure {
        code: 3,
        message: format!("{what}: {err}"),
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let file = match load_config(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let command = match cli.command.or_else(|| command_from_config(&file)) {
        Some(cmd) => cmd,
        None => {
            eprintln!("error: no command given (pass a subcommand or a config with \"command\")");
            return 2;
        }
    };
    match dispatch(command, &file) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| io_failure(e, &format!("cannot read config {}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

fn command_from_config(file: &FileConfig) -> Option<Command> {
    Some(match file.command.as_deref()? {
        "equilibrium" => Command::Equilibrium(ParamArgs::default()),
        "approve" => Command::Approve(ParamArgs::default()),
        "payoffs" => Command::Payoffs(PayoffArgs::default()),
        "welfare" => Command::Welfare(WelfareArgs::default()),
        "sweep-cost" => Command::SweepCost(SweepArgs::default()),
        "sweep-prior" => Command::SweepPrior(SweepArgs::default()),
        "simulate" => Command::Simulate(SimArgs::default()),
        "general" => Command::General(GeneralArgs::default()),
        _ => return None,
    })
}

fn resolve_params(
    args: &ParamArgs,
    file: &FileConfig,
    default_p0: Option<f64>,
    default_c: Option<f64>,
) -> Result<ModelParams, Failure> {
    let p0 = require(args.p0, file.p0, default_p0, "p0").map_err(usage)?;
    let c = require(args.c, file.c, default_c, "c").map_err(usage)?;
    let r = require(args.r, file.r, None, "r").map_err(usage)?;
    let la = require(args.la, file.lambda_a, None, "la").map_err(usage)?;
    let lb = require(args.lb, file.lambda_b, None, "lb").map_err(usage)?;
    ModelParams::new(p0, c, r, la, lb).map_err(model)
}

fn params_json(params: &ModelParams) -> Vec<(String, Value)> {
    vec![
        ("p0".into(), json!(params.p0())),
        ("c".into(), json!(params.c())),
        ("r".into(), json!(params.r())),
        ("lambda_a".into(), json!(params.lambda_a())),
        ("lambda_b".into(), json!(params.lambda_b())),
    ]
}

fn output_object(command: &str, fields: Vec<(String, Value)>, result: Value) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), json!(command));
    for (k, v) in fields {
        map.insert(k, v);
    }
    map.insert("result".into(), result);
    Value::Object(map)
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    match out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| io_failure(e, &format!("cannot write {}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_csv(
    table: &SweepTable,
    provenance: &[(String, String)],
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_sweep_csv(table, provenance, &mut buf).map_err(|e| io_failure(e, "cannot format CSV"))?;
    match out {
        Some(path) => fs::write(path, buf)
            .map_err(|e| io_failure(e, &format!("cannot write {}", path.display()))),
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| io_failure(e, "cannot write to stdout")),
    }
}

fn resolve_out(flag: &Option<PathBuf>, file: &FileConfig) -> Option<PathBuf> {
    flag.clone()
        .or_else(|| file.out.as_ref().map(PathBuf::from))
}

fn resolve_variant(flag: Option<Variant>, file: &FileConfig) -> Result<Variant, Failure> {
    match (flag, &file.variant) {
        (Some(v), _) => Ok(v),
        (None, Some(name)) => Variant::from_name(name),
        (None, None) => Ok(Variant::Discounted),
    }
}

fn dispatch(command: Command, file: &FileConfig) -> Result<(), Failure> {
    match command {
        Command::Equilibrium(args) => {
            let params = resolve_params(&args, file, None, None)?;
            let outcome = solve_equilibrium(&params);
            let value = output_object(
                "equilibrium",
                params_json(&params),
                serde_json::to_value(outcome).unwrap(),
            );
            emit_json(&value, resolve_out(&args.out, file).as_deref())
        }
        Command::Approve(args) => {
            let params = resolve_params(&args, file, None, None)?;
            let outcome = solve_equilibrium(&params);
            let result = json!({
                "prob_approval": approval_probability(&params),
                "regime": outcome.regime,
                "c_bar": outcome.c_bar,
                "p_star": outcome.p_star,
                "t_star": outcome.t_star,
            });
            let value = output_object("approve", params_json(&params), result);
            emit_json(&value, resolve_out(&args.out, file).as_deref())
        }
        Command::Payoffs(args) => {
            let params = resolve_params(&args.params, file, None, None)?;
            let variant = resolve_variant(args.variant, file)?;
            let report = approval_report(&params, variant == Variant::Discounted);
            let mut fields = params_json(&params);
            fields.push(("variant".into(), json!(variant.as_str())));
            let value = output_object("payoffs", fields, serde_json::to_value(report).unwrap());
            emit_json(&value, resolve_out(&args.params.out, file).as_deref())
        }
        Command::Welfare(args) => {
            let params = resolve_params(&args.params, file, None, None)?;
            let alpha = require(args.alpha, file.alpha, None, "alpha").map_err(usage)?;
            if !(0.0..=1.0).contains(&alpha) {
                return Err(usage(format!("alpha must lie in [0, 1], got {alpha}")));
            }
            let policy = optimal_rule(&params, alpha);
            let mut fields = params_json(&params);
            fields.push(("alpha".into(), json!(alpha)));
            let value = output_object("welfare", fields, serde_json::to_value(policy).unwrap());
            emit_json(&value, resolve_out(&args.params.out, file).as_deref())
        }
        Command::SweepCost(args) => run_sweep(args, file, SweepAxis::Cost),
        Command::SweepPrior(args) => run_sweep(args, file, SweepAxis::Prior),
        Command::Simulate(args) => {
            let params = resolve_params(&args.params, file, None, None)?;
            let n = pick(args.n, file.n, Some(1_000_000)).unwrap();
            let seed = pick(args.seed, file.seed, Some(0)).unwrap();
            let deadline = pick(args.deadline, file.deadline, None);
            let rule = match deadline {
                Some(t) => SimRule::Deadline(t),
                None => SimRule::Equilibrium,
            };
            let cfg = SimConfig::new(params, rule, n, seed).map_err(model)?;
            let mut fields = params_json(&params);
            fields.push(("n".into(), json!(n)));
            fields.push(("seed".into(), json!(seed)));
            if let Some(t) = deadline {
                fields.push(("deadline".into(), json!(t)));
            }
            let result = match rule {
                SimRule::Equilibrium => {
                    let cmp = compare_closed_form(&cfg).map_err(model)?;
                    let mut obj = serde_json::to_value(&cmp.sim).unwrap();
                    let comparison = json!({
                        "closed_prob": cmp.closed_prob,
                        "closed_payoff_A": cmp.closed_payoff_a,
                        "closed_payoff_B": cmp.closed_payoff_b,
                        "z_prob": cmp.z_prob,
                        "z_payoff_A": cmp.z_payoff_a,
                        "z_payoff_B": cmp.z_payoff_b,
                        "pass": cmp.pass,
                    });
                    obj.as_object_mut()
                        .unwrap()
                        .insert("comparison".into(), comparison);
                    obj
                }
                SimRule::Deadline(_) => serde_json::to_value(run_sim(&cfg)).unwrap(),
            };
            let value = output_object("simulate", fields, result);
            emit_json(&value, resolve_out(&args.params.out, file).as_deref())
        }
        Command::General(args) => {
            let process_cfg = resolve_process(&args, file)?;
            let (la, lb) = match &process_cfg.spec {
                ProcessSpec::Exponential { lambda_a, lambda_b } => (*lambda_a, *lambda_b),
                // Intensities are irrelevant under a non-exponential process;
                // fill the validated pair with an ordered placeholder.
                _ => (1.0, 0.0),
            };
            let p0 = require(args.params.p0, file.p0, None, "p0").map_err(usage)?;
            let c = require(args.params.c, file.c, None, "c").map_err(usage)?;
            let r = require(args.params.r, file.r, None, "r").map_err(usage)?;
            let params = ModelParams::new(p0, c, r, la, lb).map_err(model)?;
            let grid_size = pick(args.grid_size, file.grid_size, Some(512)).unwrap();
            let process = process_cfg.build().map_err(model)?;
            let outcome = equilibrium_general(&process, &params, grid_size).map_err(model)?;
            let fields = vec![
                ("p0".into(), json!(p0)),
                ("c".into(), json!(c)),
                ("r".into(), json!(r)),
                ("grid_size".into(), json!(grid_size)),
                (
                    "process".into(),
                    serde_json::to_value(&process_cfg).unwrap(),
                ),
            ];
            let value = output_object("general", fields, serde_json::to_value(outcome).unwrap());
            emit_json(&value, resolve_out(&args.params.out, file).as_deref())
        }
    }
}

fn resolve_process(args: &GeneralArgs, file: &FileConfig) -> Result<ProcessConfig, Failure> {
    if let Some(spec) = &args.process {
        let text = if spec.trim_start().starts_with('{') {
            spec.clone()
        } else {
            fs::read_to_string(spec)
                .map_err(|e| io_failure(e, &format!("cannot read process spec {spec}")))?
        };
        return serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid process spec: {e}")));
    }
    if let Some(p) = &file.process {
        return Ok(p.clone());
    }
    let la = require(args.params.la, file.lambda_a, None, "la (or --process)").map_err(usage)?;
    let lb = require(args.params.lb, file.lambda_b, None, "lb (or --process)").map_err(usage)?;
    Ok(ProcessConfig {
        spec: ProcessSpec::Exponential {
            lambda_a: la,
            lambda_b: lb,
        },
        horizon: None,
    })
}

fn run_sweep(args: SweepArgs, file: &FileConfig, axis: SweepAxis) -> Result<(), Failure> {
    // The swept primitive needs no flag: a placeholder keeps the template
    // valid and each row replaces it with the grid value.
    let (default_p0, default_c) = match axis {
        SweepAxis::Cost => (None, Some(0.25)),
        SweepAxis::Prior => (Some(0.5), None),
    };
    let params = resolve_params(&args.params, file, default_p0, default_c)?;
    let variant = resolve_variant(args.variant, file)?;
    let n = pick(args.grid, file.grid, Some(400)).unwrap();
    let (lo_default, hi_default) = match axis {
        SweepAxis::Cost => (0.0, 0.5),
        SweepAxis::Prior => (params.c(), 1.0),
    };
    let lo = pick(args.grid_min, file.grid_min, Some(lo_default)).unwrap();
    let hi = pick(args.grid_max, file.grid_max, Some(hi_default)).unwrap();
    let discounted = variant == Variant::Discounted;
    let table = match axis {
        SweepAxis::Cost => sweep_cost(&params, &left_open_grid(n, lo, hi), discounted),
        SweepAxis::Prior => sweep_prior(&params, &open_grid(n, lo, hi), discounted),
    }
    .map_err(model)?;

    let command = match axis {
        SweepAxis::Cost => "sweep-cost",
        SweepAxis::Prior => "sweep-prior",
    };
    let mut provenance: Vec<(String, String)> = vec![
        ("command".into(), command.into()),
        ("p0".into(), csv_float(params.p0())),
        ("c".into(), csv_float(params.c())),
        ("r".into(), csv_float(params.r())),
        ("lambda_a".into(), csv_float(params.lambda_a())),
        ("lambda_b".into(), csv_float(params.lambda_b())),
        ("variant".into(), variant.as_str().into()),
        ("grid".into(), n.to_string()),
        ("grid_min".into(), csv_float(lo)),
        ("grid_max".into(), csv_float(hi)),
        ("minimizer".into(), csv_float(table.annotations.minimizer)),
    ];
    if let Some(edge) = table.annotations.plateau_edge {
        provenance.push(("plateau_edge".into(), csv_float(edge)));
    }
    emit_csv(
        &table,
        &provenance,
        resolve_out(&args.params.out, file).as_deref(),
    )
}
