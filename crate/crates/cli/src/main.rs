//! Configuration-driven experiment runner for the exact-penalty library.
//!
//! Verbs: `run` (one strategy, trace CSV + summary JSON), `compare` (several
//! strategies on one instance, comparison table), `diagnose` (named checks,
//! report JSON + table), `list-instances`, `list-checks`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use exact_penalty::cones::{dual_norm, p_k, ConeSpace, DualElement};
use exact_penalty::diagnostics::{run_named_check, CheckStatus, DiagnosticsReport, CHECK_NAMES};
use exact_penalty::instances::{bundled, bundled_names, deserialize_instance};
use exact_penalty::strategies::{
    run_method, trace_to_csv, MethodConfig, Outcome, RunSummary, RunTrace, Scaling, Strategy,
};
use exact_penalty::subsolver::SubsolverConfig;
use exact_penalty::ProblemInstance;

#[derive(Parser)]
#[command(name = "penalty", about = "Exact penalty methods with cone-valued parameters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one penalty-update strategy and write its trace.
    Run(CommonArgs),
    /// Run every configured strategy on one instance and tabulate.
    Compare(CommonArgs),
    /// Run diagnostic checks and write the report.
    Diagnose(CommonArgs),
    /// List the bundled problem instances.
    ListInstances,
    /// List the registered diagnostic checks.
    ListChecks,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for traces, summaries, and reports.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed override for the subsolver and sampling (wins over the config).
    #[arg(long)]
    seed: Option<u64>,
}

/// Flat strategy description; every field has a default so a config naming
/// only the instance runs end to end.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MethodSpec {
    strategy: String,
    theta: f64,
    delta: f64,
    period: usize,
    scaling: String,
    gamma: f64,
    /// Coordinates of the initial parameter; `null` means the unit element.
    tau1: Option<Vec<f64>>,
    eps_feas: f64,
    eps_phi: f64,
    max_iters: usize,
}

impl Default for MethodSpec {
    fn default() -> Self {
        MethodSpec {
            strategy: "geometric".into(),
            theta: 10.0,
            delta: 0.1,
            period: 5,
            scaling: "unit".into(),
            gamma: 1.0,
            tau1: None,
            eps_feas: 1e-6,
            eps_phi: 1e-8,
            max_iters: 100,
        }
    }
}

impl MethodSpec {
    fn to_config(&self, cone: &ConeSpace) -> anyhow::Result<MethodConfig> {
        let strategy = match self.strategy.as_str() {
            "geometric" => Strategy::Geometric { theta: self.theta },
            "adaptive" => Strategy::Adaptive,
            "combined" => Strategy::Combined { delta: self.delta },
            "periodic_combined" => Strategy::PeriodicCombined {
                delta: self.delta,
                period: self.period,
            },
            other => bail!(
                "method.strategy: unknown '{other}' (expected geometric, adaptive, combined, or periodic_combined)"
            ),
        };
        let scaling = match self.scaling.as_str() {
            "unit" => Scaling::Unit,
            "inverse_violation" => Scaling::InverseViolation { gamma: self.gamma },
            other => bail!("method.scaling: unknown '{other}' (expected unit or inverse_violation)"),
        };
        let tau1 = match &self.tau1 {
            Some(coords) => DualElement::new(cone.clone(), coords.clone())
                .map_err(|e| anyhow!("method.tau1: {e}"))?,
            None => DualElement::unit(cone.clone()),
        };
        let cfg = MethodConfig {
            strategy,
            scaling,
            tau1,
            eps_feas: self.eps_feas,
            eps_phi: self.eps_phi,
            max_iters: self.max_iters,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct ExperimentConfig {
    /// Bundled instance name or path to an instance JSON file.
    instance: Option<String>,
    /// Strategy for `run` and the trace-backed diagnostics.
    method: MethodSpec,
    /// Strategies for `compare`; must list at least two.
    methods: Vec<MethodSpec>,
    subsolver: Option<SubsolverConfig>,
    /// Check names for `diagnose`; empty means all registered checks.
    checks: Vec<String>,
    seed: Option<u64>,
}

fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let doc = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&doc)
        .map_err(|e| anyhow!("config parse error at line {}, column {}: {e}", e.line(), e.column()))?;
    Ok(cfg)
}

fn load_instance(spec: &Option<String>) -> anyhow::Result<ProblemInstance> {
    let name = spec
        .as_deref()
        .ok_or_else(|| anyhow!("instance: required (bundled name or file path)"))?;
    if let Some(inst) = bundled(name) {
        return Ok(inst);
    }
    let path = Path::new(name);
    if path.exists() {
        let doc = fs::read_to_string(path)
            .with_context(|| format!("cannot read instance {}", path.display()))?;
        return Ok(deserialize_instance(&doc)?);
    }
    bail!(
        "instance: '{name}' is neither a bundled instance ({}) nor an existing file",
        bundled_names().join(", ")
    )
}

fn resolve_subsolver(cfg: &ExperimentConfig, seed: Option<u64>) -> anyhow::Result<SubsolverConfig> {
    let mut sub = cfg.subsolver.clone().unwrap_or_default();
    if let Some(s) = seed.or(cfg.seed) {
        sub.rng_seed = s;
    }
    sub.validate()?;
    Ok(sub)
}

fn write_atomic(path: &Path, data: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, data).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn json_pretty<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn exit_for_outcome(outcome: Outcome) -> ExitCode {
    match outcome {
        Outcome::ConvergedFeasible | Outcome::StoppedPhiEqual => ExitCode::SUCCESS,
        Outcome::MaxItersReached => ExitCode::from(2),
    }
}

fn cmd_run(args: &CommonArgs) -> anyhow::Result<ExitCode> {
    let cfg = load_config(&args.config)?;
    let inst = load_instance(&cfg.instance)?;
    let sub = resolve_subsolver(&cfg, args.seed)?;
    let method = cfg.method.to_config(&inst.cone)?;

    let trace = run_method(&inst, &method, &sub).map_err(|f| anyhow!("{f}"))?;
    let stem = format!("{}_{}", inst.name, trace.strategy.tag());
    let csv_path = args.out.join(format!("{stem}_trace.csv"));
    let json_path = args.out.join(format!("{stem}_summary.json"));
    write_atomic(&csv_path, &trace_to_csv(&trace))?;
    let summary = RunSummary::from_trace(&trace);
    write_atomic(&json_path, &json_pretty(&summary)?)?;

    println!(
        "{}: {:?} after {} iterations ({} evaluations) -> {}, {}",
        inst.name,
        summary.outcome,
        summary.iterations,
        summary.total_evaluations,
        csv_path.display(),
        json_path.display()
    );
    Ok(exit_for_outcome(trace.outcome))
}

#[derive(Debug, Serialize)]
struct CompareRow {
    strategy: String,
    outcome: Outcome,
    iterations: usize,
    total_evals: u64,
    final_infeas: f64,
    f_gap: Option<f64>,
    p_k_tau: f64,
    dual_norm_tau: f64,
    notes: String,
}

fn compare_row(inst: &ProblemInstance, trace: &RunTrace) -> CompareRow {
    let last = trace.records.last().expect("nonempty trace");
    let is_orthant = matches!(inst.cone, ConeSpace::Orthant { .. });
    let heuristic = matches!(
        trace.strategy,
        Strategy::Adaptive | Strategy::Combined { .. } | Strategy::PeriodicCombined { .. }
    ) && !is_orthant;
    CompareRow {
        strategy: trace.strategy.tag().into(),
        outcome: trace.outcome,
        iterations: trace.records.len(),
        total_evals: trace.total_evaluations(),
        final_infeas: last.infeas,
        f_gap: inst.reference.as_ref().map(|r| (last.f_value - r.f_star).abs()),
        p_k_tau: p_k(&last.tau),
        dual_norm_tau: dual_norm(&last.tau),
        notes: if heuristic {
            "heuristic (non-orthant Theorem 4)".into()
        } else {
            String::new()
        },
    }
}

fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out =
        String::from("strategy,outcome,iterations,total_evals,final_infeas,f_gap,p_k_tau,dual_norm_tau,notes\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:?},{},{},{:.16e},{},{:.16e},{:.16e},{}\n",
            r.strategy,
            r.outcome,
            r.iterations,
            r.total_evals,
            r.final_infeas,
            r.f_gap.map(|g| format!("{g:.16e}")).unwrap_or_default(),
            r.p_k_tau,
            r.dual_norm_tau,
            r.notes
        ));
    }
    out
}

fn cmd_compare(args: &CommonArgs) -> anyhow::Result<ExitCode> {
    let cfg = load_config(&args.config)?;
    let inst = load_instance(&cfg.instance)?;
    let sub = resolve_subsolver(&cfg, args.seed)?;
    if cfg.methods.len() < 2 {
        bail!("methods: compare needs at least two strategies, got {}", cfg.methods.len());
    }
    let mut rows = Vec::new();
    for spec in &cfg.methods {
        let method = spec.to_config(&inst.cone)?;
        let trace = run_method(&inst, &method, &sub).map_err(|f| anyhow!("{f}"))?;
        rows.push(compare_row(&inst, &trace));
    }
    let csv_path = args.out.join(format!("{}_compare.csv", inst.name));
    let json_path = args.out.join(format!("{}_compare.json", inst.name));
    write_atomic(&csv_path, &compare_csv(&rows))?;
    write_atomic(&json_path, &json_pretty(&rows)?)?;
    for r in &rows {
        println!(
            "{:<20} {:?} iters={} evals={} infeas={:.3e}{}{}",
            r.strategy,
            r.outcome,
            r.iterations,
            r.total_evals,
            r.final_infeas,
            r.f_gap.map(|g| format!(" f_gap={g:.3e}")).unwrap_or_default(),
            if r.notes.is_empty() { String::new() } else { format!("  [{}]", r.notes) }
        );
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_diagnose(args: &CommonArgs) -> anyhow::Result<ExitCode> {
    let cfg = load_config(&args.config)?;
    let inst = load_instance(&cfg.instance)?;
    let sub = resolve_subsolver(&cfg, args.seed)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(sub.rng_seed);

    let names: Vec<String> = if cfg.checks.is_empty() {
        CHECK_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.checks.clone()
    };
    for n in &names {
        if !CHECK_NAMES.contains(&n.as_str()) {
            bail!("checks: unknown check '{n}'; valid names: {}", CHECK_NAMES.join(", "));
        }
    }

    let mut results = Vec::new();
    for n in &names {
        results.push(run_named_check(n, &inst, &sub, seed)?);
    }
    let report = DiagnosticsReport {
        instance: inst.name.clone(),
        results,
    };
    let json_path = args.out.join(format!("{}_diagnostics.json", inst.name));
    write_atomic(&json_path, &json_pretty(&report)?)?;

    println!("{:<18} {:<13} {:>12}  notes", "check", "status", "slack");
    for r in &report.results {
        println!("{:<18} {:<13} {:>12.4e}  {}", r.name, format!("{:?}", r.status), r.slack, r.notes);
    }
    println!("wrote {}", json_path.display());
    let failed: Vec<&str> = report
        .results
        .iter()
        .filter(|r| r.status == CheckStatus::Fail)
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(ExitCode::FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Compare(args) => cmd_compare(args),
        Cmd::Diagnose(args) => cmd_diagnose(args),
        Cmd::ListInstances => {
            for name in bundled_names() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ListChecks => {
            for name in CHECK_NAMES {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
