use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;
use windflow::acopf::{
    build_dc_opf, build_soc_acopf, feasibility_gap, recover_physical, write_gap_csv, AcopfError, InjectionState,
};
use windflow::conic::{solve as solve_program, BackendKind, SolveStatus, SolverOptions};
use windflow::grid::{load_case_file, GridCase};
use windflow::mbda::{run_mbda, write_trace_csv, MbdaError, MbdaOptions};
use windflow::stochastic::{
    build_two_stage, compute_vss, model_size_of, solve_single_stage, StochasticError, StochasticSolution,
};
use windflow::wind::{
    case_scenarios, fit_distribution, load_curve_dir, synthetic_measurements, FamilyKind, ScenarioSet,
};

use crate::output::OutputDir;
use crate::{Failure, Family, OpfModel, SolveMethod};

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn solver(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Solver(e.into())
}

fn stochastic_failure(e: StochasticError) -> Failure {
    match e {
        StochasticError::SolverFailed { .. } | StochasticError::Recover(_) | StochasticError::Program(_) => solver(e),
        StochasticError::Case(_) | StochasticError::Scenarios(_) | StochasticError::DispatchMismatch { .. } => input(e),
    }
}

fn mbda_failure(e: MbdaError) -> Failure {
    match e {
        MbdaError::Model(e) => stochastic_failure(e),
        MbdaError::NoScenarios => input(e),
        _ => solver(e),
    }
}

/// Solver settings, with the backend taken from `WINDFLOW_SOLVER`.
fn solver_options() -> Result<SolverOptions, Failure> {
    let backend = match std::env::var("WINDFLOW_SOLVER") {
        Ok(name) => BackendKind::parse(&name).ok_or_else(|| input(anyhow!("unknown WINDFLOW_SOLVER backend {name:?}")))?,
        Err(_) => BackendKind::default(),
    };
    Ok(SolverOptions {
        backend,
        ..SolverOptions::default()
    })
}

fn load_case(path: &Path) -> Result<GridCase, Failure> {
    load_case_file(path)
        .with_context(|| format!("loading case {}", path.display()))
        .map_err(Failure::Input)
}

fn load_scenarios(path: &Path) -> Result<ScenarioSet, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenarios {}", path.display()))
        .map_err(Failure::Input)?;
    ScenarioSet::from_json(&text)
        .with_context(|| format!("parsing scenarios {}", path.display()))
        .map_err(Failure::Input)
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

#[derive(Serialize)]
struct OpfSolution<'a> {
    case: &'a str,
    model: &'a str,
    status: SolveStatus,
    objective: f64,
    iterations: u32,
    backend: &'a str,
    generators: &'a [InjectionState],
}

pub fn run_opf(case_path: &Path, model: OpfModel, out: &Path) -> Result<(), Failure> {
    let opts = solver_options()?;
    let case = load_case(case_path)?;
    let (name, built) = match model {
        OpfModel::Soc => ("soc", build_soc_acopf(&case)),
        OpfModel::Dc => ("dc", build_dc_opf(&case)),
    };
    let program = built.map_err(|e: AcopfError| input(e))?;
    let sol = solve_program(&program, &opts).map_err(solver)?;
    if !sol.is_optimal() {
        return Err(solver(anyhow!("{name} OPF on {}: solver returned {:?}", case.name, sol.status)));
    }
    let point = recover_physical(&case, &program, &sol).map_err(solver)?;
    let gap = feasibility_gap(&case, &point, name);

    let mut dir = OutputDir::create(out)?;
    dir.write_json(
        "solution.json",
        &OpfSolution {
            case: &case.name,
            model: name,
            status: sol.status,
            objective: sol.objective_value,
            iterations: sol.iterations,
            backend: sol.backend.name(),
            generators: &point.generators,
        },
    )?;
    dir.write_json("point.json", &point)?;
    dir.write_csv("gaps.csv", |buf| write_gap_csv(std::slice::from_ref(&gap), buf))?;
    dir.finish("run-opf", vec![display(case_path)], None, opts)?;
    println!("{} {name}: objective {:.6} $/h", case.name, sol.objective_value);
    for (family, value) in gap.families() {
        println!("  gap {family}: {value:.3e}");
    }
    Ok(())
}

pub struct ScenarioArgs {
    pub case: PathBuf,
    pub measurements: Option<PathBuf>,
    pub synthetic: Option<Vec<f64>>,
    pub family: Family,
    pub curves: PathBuf,
    pub per_farm: Vec<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

/// Wind speeds from the first field of each line; a non-numeric first
/// line is taken as a header.
fn read_measurements(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading measurements {}", path.display()))
        .map_err(Failure::Input)?;
    let mut samples = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split([',', ';', ' ', '\t']).next().unwrap_or_default();
        match field.parse::<f64>() {
            Ok(v) => samples.push(v),
            Err(_) if n == 0 => continue,
            Err(_) => return Err(input(anyhow!("{}:{}: not a number: {field:?}", path.display(), n + 1))),
        }
    }
    Ok(samples)
}

pub fn gen_scenarios(args: ScenarioArgs) -> Result<(), Failure> {
    let case = load_case(&args.case)?;
    let mut inputs = vec![display(&args.case), display(&args.curves)];
    let samples = match (&args.measurements, &args.synthetic) {
        (Some(path), _) => {
            inputs.push(display(path));
            read_measurements(path)?
        }
        (None, Some(p)) => {
            let (shape, scale, count) = (p[0], p[1], p[2]);
            if !(shape > 0.0 && scale > 0.0 && count >= 1.0 && count.fract() == 0.0) {
                return Err(input(anyhow!("--synthetic needs positive SHAPE and SCALE and a whole COUNT")));
            }
            synthetic_measurements(shape, scale, count as usize, args.seed)
        }
        (None, None) => return Err(input(anyhow!("give --measurements or --synthetic"))),
    };
    let kind = match args.family {
        Family::Weibull => FamilyKind::Weibull,
        Family::Rayleigh => FamilyKind::Rayleigh,
    };
    let dist = fit_distribution(&samples, kind).map_err(input)?;
    let curves = load_curve_dir(&args.curves)
        .with_context(|| format!("loading power curves from {}", args.curves.display()))
        .map_err(Failure::Input)?;
    let counts = match args.per_farm.as_slice() {
        [n] => vec![*n; case.wind_farms.len()],
        many => many.to_vec(),
    };
    let set = case_scenarios(&case, &dist, &curves, &counts, args.seed).map_err(input)?;

    let mut dir = OutputDir::create(&args.out)?;
    dir.write("scenarios.json", set.to_json() + "\n")?;
    dir.write_csv("scenarios.csv", |buf| set.write_csv(buf))?;
    dir.write_json("distribution.json", &dist)?;
    dir.finish("gen-scenarios", inputs, Some(args.seed), SolverOptions::default())?;
    println!("{}", set.len());
    Ok(())
}

pub struct SolveArgs {
    pub case: PathBuf,
    pub scenarios: PathBuf,
    pub method: SolveMethod,
    pub workers: usize,
    pub blocks: Option<usize>,
    pub gap: f64,
    pub max_iter: usize,
    pub out: PathBuf,
}

fn write_solution(dir: &mut OutputDir, sol: &StochasticSolution) -> Result<(), Failure> {
    dir.write("solution.json", sol.to_json() + "\n")?;
    dir.write_json("point.json", &sol.points)
}

pub fn solve(args: SolveArgs) -> Result<(), Failure> {
    if args.workers == 0 {
        return Err(input(anyhow!("--workers must be at least 1")));
    }
    if args.gap.is_nan() || args.gap < 0.0 {
        return Err(input(anyhow!("--gap must be non-negative")));
    }
    let opts = solver_options()?;
    let case = load_case(&args.case)?;
    let set = load_scenarios(&args.scenarios)?;
    let size = model_size_of(&case, set.len()).map_err(stochastic_failure)?;
    let inputs = vec![display(&args.case), display(&args.scenarios)];

    let (solution, bda) = match args.method {
        SolveMethod::Single => {
            let model = build_two_stage(&case, &set).map_err(stochastic_failure)?;
            (solve_single_stage(&model, &opts).map_err(stochastic_failure)?, None)
        }
        SolveMethod::SerialBda | SolveMethod::ParallelBda => {
            let mbda = MbdaOptions {
                parallel: matches!(args.method, SolveMethod::ParallelBda),
                workers: args.workers,
                blocks: args.blocks,
                gap: args.gap,
                max_iter: args.max_iter,
                solver: opts,
            };
            let result = run_mbda(&case, &set, &mbda).map_err(mbda_failure)?;
            (result.solution.clone(), Some(result))
        }
    };

    let mut dir = OutputDir::create(&args.out)?;
    write_solution(&mut dir, &solution)?;
    dir.write_json("size.json", &size)?;
    if let Some(result) = &bda {
        dir.write_csv("trace.csv", |buf| write_trace_csv(&result.trace, buf))?;
        dir.write("cuts.json", result.cuts_json() + "\n")?;
    }
    dir.finish("solve", inputs, None, opts)?;

    println!(
        "{} {}: {} scenarios, objective {:.6} $/h",
        case.name,
        solution.method.name(),
        set.len(),
        solution.objective
    );
    if let Some(b) = solution.bounds {
        println!(
            "  bounds [{:.6}, {:.6}], gap {:.3e}, {} iterations",
            b.lower, b.upper, b.gap, b.iterations
        );
        if !b.converged {
            return Err(Failure::NonConverged(format!(
                "gap {:.3e} above {} after {} iterations",
                b.gap, args.gap, b.iterations
            )));
        }
    }
    Ok(())
}

pub fn vss(case_path: &Path, scenarios_path: &Path, out: &Path) -> Result<(), Failure> {
    let opts = solver_options()?;
    let case = load_case(case_path)?;
    let set = load_scenarios(scenarios_path)?;
    let report = compute_vss(&case, &set, &opts).map_err(stochastic_failure)?;
    let mut dir = OutputDir::create(out)?;
    dir.write_json("vss.json", &report)?;
    dir.finish("vss", vec![display(case_path), display(scenarios_path)], None, opts)?;
    println!("{:>14} {:>14} {:>14}", "cost_det", "cost_sto", "vss");
    println!(
        "{:>14.4} {:>14.4} {:>14.4}",
        report.deterministic_cost, report.stochastic_cost, report.vss
    );
    Ok(())
}
