use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conic::SolverOptions;
use crate::acopf::check_case;
use crate::grid::GridCase;
use crate::stochastic::{summarize, Bounds, Method, StochasticError, StochasticSolution};
use crate::wind::ScenarioSet;

use super::{partition_scenarios, solve_master, Cut, MbdaError, Subproblem, SubproblemResult};

const GAP_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MbdaOptions {
    /// Solve subproblems on a thread pool instead of in sequence.
    pub parallel: bool,
    /// Thread count in parallel mode; also the default block count.
    pub workers: usize,
    /// Overrides the number of scenario blocks.
    pub blocks: Option<usize>,
    /// Relative stopping gap.
    pub gap: f64,
    pub max_iter: usize,
    pub solver: SolverOptions,
}

impl Default for MbdaOptions {
    fn default() -> Self {
        MbdaOptions {
            parallel: false,
            workers: 1,
            blocks: None,
            gap: 0.02,
            max_iter: 50,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct MbdaResult {
    /// Best incumbent; `objective` is the upper bound.
    pub solution: StochasticSolution,
    pub trace: Vec<TraceRow>,
    pub cuts: Vec<Cut>,
    pub partition: Vec<Range<usize>>,
    /// Raw master objective of every iteration.
    pub master_objectives: Vec<f64>,
    pub converged: bool,
}

impl MbdaResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn lower_bound(&self) -> f64 {
        self.trace.last().map_or(f64::NEG_INFINITY, |t| t.lower_bound)
    }

    pub fn upper_bound(&self) -> f64 {
        self.trace.last().map_or(f64::INFINITY, |t| t.upper_bound)
    }

    pub fn cuts_json(&self) -> String {
        serde_json::to_string_pretty(&self.cuts).expect("cuts serialize")
    }
}

/// Solves the two-stage problem with shedding by decomposition.
pub fn run_mbda(case: &GridCase, scenarios: &ScenarioSet, opts: &MbdaOptions) -> Result<MbdaResult, MbdaError> {
    let start = Instant::now();
    check_case(case).map_err(StochasticError::from)?;
    let limits = scenarios.limits_for(case).map_err(StochasticError::from)?;
    let pis: Vec<f64> = scenarios.scenarios.iter().map(|s| s.pi).collect();
    let workers = opts.workers.max(1);
    let partition = partition_scenarios(scenarios.len(), opts.blocks.unwrap_or(workers));
    if partition.is_empty() {
        return Err(MbdaError::NoScenarios);
    }
    if opts.blocks.unwrap_or(workers) > partition.len() {
        log::info!("block count clamped to {} scenarios", partition.len());
    }
    let mut subs: Vec<Subproblem> = partition
        .iter()
        .enumerate()
        .map(|(n, r)| Subproblem::new(case, &pis, &limits, n, r.clone()))
        .collect();
    let pool = if opts.parallel {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| MbdaError::Pool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut cuts = Vec::new();
    let mut trace = Vec::new();
    let mut master_objectives = Vec::new();
    let (mut lb, mut ub) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut incumbent: Option<(Vec<f64>, Vec<SubproblemResult>)> = None;
    let mut converged = false;

    for k in 1..=opts.max_iter.max(1) {
        let master = solve_master(case, subs.len(), &cuts, &opts.solver, k)?;
        master_objectives.push(master.objective);
        lb = lb.max(master.objective);
        let dispatch: Vec<f64> = master
            .dispatch
            .iter()
            .zip(&case.generators)
            .map(|(&p, g)| p.clamp(g.p_min, g.p_max))
            .collect();

        let solve_one = |sub: &mut Subproblem| sub.solve_at(&dispatch, &opts.solver, k);
        let results: Vec<SubproblemResult> = match &pool {
            Some(pool) => pool.install(|| subs.par_iter_mut().map(solve_one).collect::<Result<_, _>>())?,
            None => subs.iter_mut().map(solve_one).collect::<Result<_, _>>()?,
        };

        let thermal: f64 = case.generators.iter().zip(&dispatch).map(|(g, &p)| g.cost(p)).sum();
        let total = thermal + results.iter().map(|r| r.value).sum::<f64>();
        for r in &results {
            cuts.push(Cut {
                iteration: k,
                block: r.block,
                anchor: dispatch.clone(),
                value: r.value,
                slope: r.mu.clone(),
            });
        }
        if total < ub {
            ub = total;
            incumbent = Some((dispatch, results));
        }
        let gap = (ub - lb) / ub.abs().max(GAP_FLOOR);
        log::debug!("iteration {k}: lb {lb:.6} ub {ub:.6} gap {gap:.3e}");
        trace.push(TraceRow {
            iteration: k,
            lower_bound: lb,
            upper_bound: ub,
            gap,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        if gap <= opts.gap {
            converged = true;
            break;
        }
    }

    let (dispatch, results) = incumbent.expect("at least one iteration ran");
    let mut points = Vec::with_capacity(scenarios.len());
    for (sub, r) in subs.iter().zip(&results) {
        points.extend(sub.recover(case, r)?);
    }
    let available: Vec<f64> = limits.iter().map(|l| l.iter().map(|f| f.p_max).sum()).collect();
    let method = if opts.parallel { Method::ParallelBda } else { Method::SerialBda };
    let mut solution = summarize(case, method, &dispatch, &pis, &available, points, ub, Some(case.voll));
    let last = trace.last().expect("trace is non-empty");
    solution.bounds = Some(Bounds {
        lower: last.lower_bound,
        upper: last.upper_bound,
        gap: last.gap,
        iterations: trace.len(),
        converged,
    });
    solution.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(MbdaResult {
        solution,
        trace,
        cuts,
        partition,
        master_objectives,
        converged,
    })
}

pub fn write_trace_csv<W: std::io::Write>(rows: &[TraceRow], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
