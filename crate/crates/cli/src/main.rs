use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sweepopt::experiments::{parameter_sweep, ScenarioSpec, TrendTable, Vary};
use sweepopt::planner::plan_coverage;
use sweepopt_cli::{
    load_scene, metrics_csv, metrics_for, parse_values, render_svg, threads_from_env, verify_plan, write_file,
    CliError, CliResult, PlanDocument, SceneFile, EXIT_INFEASIBLE, EXIT_OK, THREADS_ENV,
};

#[derive(Parser)]
#[command(name = "sweepopt", version, about = "Optimal-control coverage planning over convex fields")]
struct Cli {
    /// Print machine-readable JSON to stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal sweep direction and its altitude sum.
    Direction { scene: PathBuf },
    /// Plans every slice of the scene.
    Plan {
        scene: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Repeated plans over a varied parameter.
    Experiment {
        scene: PathBuf,
        #[arg(long, value_enum)]
        vary: VaryArg,
        #[arg(long)]
        values: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plans the scene and runs the invariant checks on the result.
    Verify { scene: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum VaryArg {
    Weight,
    NObs,
    RObs,
}

impl From<VaryArg> for Vary {
    fn from(v: VaryArg) -> Self {
        match v {
            VaryArg::Weight => Vary::Weight,
            VaryArg::NObs => Vary::ObstacleCount,
            VaryArg::RObs => Vary::ObstacleRadius,
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn direction(path: &Path, as_json: bool) -> CliResult<i32> {
    let loaded = load_scene(path)?;
    let (sweep, cost) = loaded.scene.sweep();
    if as_json {
        print_json(&json!({ "theta": sweep.theta(), "theta_deg": sweep.theta().to_degrees(), "msa_cost": cost }));
    } else {
        println!("theta* = {:.6} rad ({:.4} deg)", sweep.theta(), sweep.theta().to_degrees());
        println!("S(theta*) = {cost:.6}");
    }
    Ok(EXIT_OK)
}

fn plan(
    path: &Path,
    out: Option<&Path>,
    svg: Option<&Path>,
    metrics: Option<&Path>,
    as_json: bool,
) -> CliResult<i32> {
    let loaded = load_scene(path)?;
    let scene = &loaded.scene;
    let plan = plan_coverage(scene)?;
    let summary = metrics_for(&plan, scene)?;
    let doc = PlanDocument { scene: SceneFile::from_scene(scene, loaded.seed), metrics: summary, plan: &plan };
    if let Some(p) = out {
        write_file(p, &serde_json::to_string_pretty(&doc).expect("plans serialize"))?;
    }
    if let Some(p) = svg {
        render_svg(&plan, scene, p)?;
    }
    if let Some(p) = metrics {
        write_file(p, &metrics_csv(&plan, scene)?)?;
    }
    let expanded = plan.slices.iter().filter(|s| s.flag == sweepopt::planner::SliceFlag::CorridorExpanded).count();
    if as_json {
        print_json(&json!({
            "theta": plan.sweep.theta(),
            "msa_cost": plan.msa_cost,
            "slices": plan.slices.len(),
            "corridor_expanded": expanded,
            "metrics": summary,
        }));
    } else {
        println!("sweep direction {:.4} deg, {} slices ({expanded} with expanded corridor)", plan.sweep.theta().to_degrees(), plan.slices.len());
        println!("E = {:.6}", summary.total_energy);
        println!("t_ftot = {:.6}", summary.total_time);
        println!("A_tot = {:.6}", summary.covered_area);
        println!("A_rel = {:.6}", summary.coverage_ratio);
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    path: &Path,
    vary: VaryArg,
    values: &str,
    trials: Option<usize>,
    seed: Option<u64>,
    out: &Path,
    as_json: bool,
) -> CliResult<i32> {
    let loaded = load_scene(path)?;
    let values = parse_values(values)?;
    let threads = threads_from_env(std::env::var(THREADS_ENV).ok().as_deref())?;
    let seed = seed.or(loaded.seed).unwrap_or(0);
    let mut spec = ScenarioSpec::new(loaded.scene, vary.into(), values, seed);
    if let Some(k) = trials {
        spec.trials_per_value = k;
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let table: TrendTable = parameter_sweep(&spec, threads)?;
    write_file(out, &table.to_csv())?;
    if as_json {
        print_json(&serde_json::to_value(&table).expect("tables serialize"));
    } else {
        let failed = table.rows.iter().filter(|r| !r.status.is_success()).count();
        println!("{} trials written to {} ({failed} failed)", table.rows.len(), out.display());
        for r in table.rows.iter().filter(|r| !r.status.is_success()) {
            println!(
                "  value {} trial {}: {} {}",
                r.value,
                r.trial,
                r.status.as_str(),
                r.detail.as_deref().unwrap_or("")
            );
        }
    }
    Ok(if table.any_failed() { EXIT_INFEASIBLE } else { EXIT_OK })
}

fn verify(path: &Path, as_json: bool) -> CliResult<i32> {
    let loaded = load_scene(path)?;
    let plan = plan_coverage(&loaded.scene)?;
    let report = verify_plan(&loaded.scene, &plan);
    if as_json {
        print_json(&json!({ "passed": report.passed(), "report": report }));
    } else {
        for c in &report.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let at = c.worst_slice.map(|k| format!(" at slice {k}")).unwrap_or_default();
            println!(
                "{verdict} {}: worst {:.3e}{at} (tol {:.0e}, {} slices)",
                c.name, c.worst, c.tolerance, c.slices_checked
            );
            if let Some(d) = &c.detail {
                println!("     {d}");
            }
        }
    }
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        Err(CliError::ChecksFailed(report.failures()))
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Direction { scene } => direction(&scene, cli.json),
        Command::Plan { scene, out, svg, metrics } => {
            plan(&scene, out.as_deref(), svg.as_deref(), metrics.as_deref(), cli.json)
        }
        Command::Experiment { scene, vary, values, trials, seed, out } => {
            experiment(&scene, vary, &values, trials, seed, &out, cli.json)
        }
        Command::Verify { scene } => verify(&scene, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { sweepopt_cli::EXIT_INPUT as u8 } else { 0 });
        }
    };
    let as_json = cli.json;
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            if as_json {
                print_json(&json!({ "error": e.kind(), "message": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
