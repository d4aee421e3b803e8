//! Command-line front end: every subcommand reads an optional JSON config, applies flag
//! overrides, writes CSV outputs and a `manifest.json` into `--out`.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dualwalk::chain::{AcceptanceChoice, SpectralReport};
use dualwalk::gates::{self, RegisterLayout};
use dualwalk::io::KernelJson;
use dualwalk::lab::{self, report, ExperimentConfig, Mode, RunManifest};
use dualwalk::walk::{self, MhWalk, Operator};
use dualwalk::{dual, io};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dualwalk", version, about = "Edge-space Metropolis-Hastings walks, simulated")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// exact (or exact-projection) | qpe
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Phase register width for qpe mode.
    #[arg(long, global = true)]
    ancilla_bits: Option<u32>,
    /// glauber | metropolis | metropolis-lazy
    #[arg(long, global = true, value_parser = parse_choice)]
    acceptance: Option<AcceptanceChoice>,
}

#[derive(Subcommand)]
enum Command {
    /// Proposal, target, MH kernel, edge space and the kernel's spectrum.
    BuildKernel,
    /// Gaps of the kernel and the walk, the inequalities between them, mixing bounds.
    GapReport,
    /// Eigenvalues of the walk operator.
    WalkSpectrum,
    /// Sample the target by preparing the walk's stationary state.
    Sample,
    /// Sweep the two-well Langevin family and compare the walk's gap with its lower bound.
    ReproduceFig1,
    /// Qubit counts and the gate list of one walk step.
    AuditQubits,
}

fn parse_choice(s: &str) -> std::result::Result<AcceptanceChoice, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown acceptance {s:?}"))
}

fn load_config(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.shots {
        cfg.shots = v;
    }
    if let Some(v) = c.mode {
        cfg.mode = v;
    }
    if let Some(v) = c.ancilla_bits {
        cfg.ancilla_bits = v;
    }
    if let Some(v) = c.acceptance {
        cfg.acceptance = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Run<'a> {
    out: &'a Path,
    manifest: RunManifest,
}

impl Run<'_> {
    fn create(&mut self, name: &str) -> Result<File> {
        self.manifest.outputs.push(name.to_string());
        let path = self.out.join(name);
        File::create(&path).with_context(|| format!("creating {}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every check the subcommand makes passed.
fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(&cli.common)?;
    let out = cli.common.out.as_path();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let name = match cli.command {
        Command::BuildKernel => "build-kernel",
        Command::GapReport => "gap-report",
        Command::WalkSpectrum => "walk-spectrum",
        Command::Sample => "sample",
        Command::ReproduceFig1 => "reproduce-fig1",
        Command::AuditQubits => "audit-qubits",
    };
    let mut run = Run { out, manifest: RunManifest::new(name, &cfg, cfg.seed, env!("CARGO_PKG_VERSION"))? };
    let ok = match cli.command {
        Command::BuildKernel => build_kernel(&cfg, &mut run)?,
        Command::GapReport => gap_report(&cfg, &mut run)?,
        Command::WalkSpectrum => walk_spectrum(&cfg, &mut run)?,
        Command::Sample => sample(&cfg, &mut run)?,
        Command::ReproduceFig1 => reproduce_fig1(&cfg, &mut run)?,
        Command::AuditQubits => audit_qubits(&cfg, &mut run)?,
    };
    run.manifest.write(out)?;
    println!("{}", serde_json::to_string_pretty(&run.manifest.summary)?);
    Ok(ok)
}

fn build_kernel(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let inst = cfg.kernel.instance(cfg.acceptance)?;
    let space = dual::edge_space(&inst.t);
    let nu = dual::nu(&inst.pi, &inst.t, &space)?;
    serde_json::to_writer_pretty(
        run.create("kernel.json")?,
        &json!({
            "proposal": KernelJson::from(inst.t.kernel()),
            "target": io::VectorJson::from(&inst.pi),
            "acceptance": KernelJson::from_matrix(inst.a.matrix()),
            "kernel": KernelJson::from(&inst.p),
        }),
    )?;
    dual::write_edge_space_json(&space, &nu, run.create("edge_space.json")?)?;

    let curve_len = 10_000;
    let spectral = SpectralReport::new(&inst.p, cfg.epsilon, curve_len, &cfg.tolerances)?;
    spectral.write_eigenvalues_csv(run.create("eigenvalues.csv")?)?;
    let mut tv = csv::Writer::from_writer(run.create("tv_curve.csv")?);
    tv.write_record(["t", "tv"])?;
    for (t, d) in &spectral.tv_curve {
        tv.write_record([t.to_string(), d.to_string()])?;
    }
    tv.flush()?;

    run.manifest.summary = json!({
        "n": inst.n(),
        "edges": space.len(),
        "gap": spectral.gap,
        "epsilon": spectral.epsilon,
        "mixing_time": spectral.mixing_time,
        "mixing_bounds": spectral.mixing_bounds,
    });
    Ok(true)
}

fn gap_report(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let r = lab::gap_report(&cfg.kernel, cfg.acceptance, cfg.epsilon, &cfg.tolerances)?;
    r.write_csv(run.create("gap_report.csv")?)?;
    let mut checks = csv::Writer::from_writer(run.create("checks.csv")?);
    for c in &r.checks {
        checks.serialize(c)?;
    }
    checks.flush()?;
    run.manifest.summary = serde_json::to_value(&r)?;
    Ok(r.all_pass())
}

fn walk_spectrum(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let inst = cfg.kernel.instance(cfg.acceptance)?;
    let r = lab::walk_spectrum_report(&inst, &cfg.tolerances, 1e-8)?;
    r.write_csv(run.create("walk_spectrum.csv")?)?;
    run.manifest.summary = json!({
        "n": r.n,
        "angular_gap": r.angular_gap,
        "max_mismatch": r.max_mismatch,
        "spectra_equal": r.spectra_equal,
        "eigvec_residual": r.eigvec_residual,
    });
    Ok(r.spectra_equal.unwrap_or(true))
}

fn sample(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let inst = cfg.kernel.instance(cfg.acceptance)?;
    let walk = MhWalk::new(&inst.t, &inst.a, &cfg.tolerances)?;
    let s = lab::algorithm1(&walk, cfg)?;
    s.write_histogram_csv(run.create("histogram.csv")?)?;
    run.manifest.summary = serde_json::to_value(&s)?;
    Ok(true)
}

fn reproduce_fig1(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let spec = cfg.sweep.clone().unwrap_or_default();
    let fig = lab::reproduce_fig1(&spec, &cfg.tolerances, cfg.execution)?;
    fig.write_csv(run.create("fig1.csv")?)?;
    let failing: Vec<f64> = fig.points.iter().filter(|p| !p.holds).map(|p| p.value).collect();
    run.manifest.summary = json!({
        "parameter": spec.parameter.name(),
        "points": fig.points.len(),
        "all_hold": fig.all_hold(),
        "failing_values": failing,
    });
    if !failing.is_empty() {
        eprintln!("bound violated at {} = {failing:?}", spec.parameter.name());
    }
    Ok(fig.all_hold())
}

fn audit_qubits(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let (t, pi) = cfg.kernel.proposal_and_target()?;
    let n = t.n();
    let m = report::register_bits(n);
    let audit = gates::qubit_audit(m);
    let mut rows = csv::Writer::from_writer(run.create("qubits.csv")?);
    for r in &audit.rows {
        rows.serialize(r)?;
    }
    rows.flush()?;

    // The gate list needs oracles on full m-qubit registers; other sizes get identity stand-ins,
    // which leave the circuit's shape unchanged.
    let exact = n == 1 << m;
    let (o_t, o_a) = if exact {
        let a = cfg.acceptance.build(&t, &pi)?;
        (walk::build_o_t(&t), walk::build_o_a(&a))
    } else {
        (Operator::identity(1 << (2 * m)), Operator::identity(1 << (2 * m + 1)))
    };
    let seq = gates::assemble_w_with(RegisterLayout::new(m), &Arc::new(o_t), &Arc::new(o_a))?;
    let total = gates::audit_sequence(&seq, m)?;
    seq.write_jsonl(run.create("gates.jsonl")?)?;
    let calls = seq.oracle_calls();
    let mut counts = csv::Writer::from_writer(run.create("oracle_calls.csv")?);
    counts.write_record(["oracle", "calls"])?;
    for (k, v) in &calls {
        counts.write_record([k.clone(), v.to_string()])?;
    }
    counts.flush()?;

    if total != audit.walk_qubits() {
        bail!("assembled walk uses {total} qubits, audit says {}", audit.walk_qubits());
    }
    run.manifest.summary = json!({
        "n": n,
        "m": m,
        "walk_qubits": total,
        "cswap_qubits": audit.cswap_qubits(),
        "gates": seq.gates.len(),
        "oracles_from_instance": exact,
        "oracle_calls": calls,
    });
    Ok(true)
}
