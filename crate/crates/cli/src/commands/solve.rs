use std::path::PathBuf;

use compact_conserve::pde::{
    advect_1d, advect_2d_varcoeff, conservation_monitor, error_and_order, euler_vortex_2d, Advection1dConfig,
    Advection2dConfig, StepBudget, VortexConfig,
};
use compact_conserve::SchemeDefinition;
use ndarray::Array2;
use rayon::prelude::*;

use super::load_scheme;
use crate::error::{CliError, CliResult, Status};
use crate::output::{Csv, OutDir};
use crate::Experiment;

pub struct Options {
    pub experiment: Experiment,
    pub scheme: String,
    pub n: Option<Vec<usize>>,
    pub t_final: Option<f64>,
    pub epsilon: Option<f64>,
    pub mach: Option<f64>,
    pub travel: Option<f64>,
    pub snapshots: Option<Vec<f64>>,
    pub full: bool,
    pub out: PathBuf,
}

/// What the writers need from one run, whatever the experiment.
struct RunSummary {
    n: usize,
    spacing: f64,
    max_error: f64,
    error_history: Vec<(f64, f64)>,
    budget: Vec<StepBudget>,
    /// Whether `budget` carries mass and flux or only identity residuals.
    mass_budget: bool,
    fields: Vec<NamedField>,
}

struct NamedField {
    name: String,
    x: Vec<f64>,
    y: Vec<f64>,
    /// Indexed `[j, i]` for the point `(x_i, y_j)`.
    values: Array2<f64>,
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::input(anyhow::anyhow!("--{name} must be positive, got {v}")))
    }
}

fn time_label(t: f64) -> String {
    format!("{t:.4}").trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn run(opts: Options) -> CliResult<Status> {
    let scheme = load_scheme(&opts.scheme)?;
    let (default_n, label) = match opts.experiment {
        Experiment::Advect1d => (vec![65, 129, 257], "advect1d"),
        Experiment::Advect2d => (vec![21, 41], "advect2d"),
        Experiment::EulerVortex => (vec![60], "euler-vortex"),
    };
    let mut ns = opts.n.clone().unwrap_or(default_n);
    if ns.is_empty() {
        return Err(CliError::input(anyhow::anyhow!("--n needs at least one grid size")));
    }
    ns.sort_unstable();
    ns.dedup();
    let finest = *ns.last().unwrap();

    let runs: Vec<RunSummary> = ns
        .par_iter()
        .map(|&n| {
            let snapshots = n == finest;
            match opts.experiment {
                Experiment::Advect1d => solve_1d(&scheme, &opts, n, snapshots),
                Experiment::Advect2d => solve_2d(&scheme, &opts, n, snapshots),
                Experiment::EulerVortex => solve_vortex(&scheme, &opts, n, snapshots),
            }
        })
        .collect::<CliResult<_>>()?;

    let out = OutDir::new(opts.out.clone())?;
    let mut errors = Csv::new(&["n", "t", "linf_error"]);
    let mut conservation = Csv::new(&["n", "t", "mismatch", "identity_residual"]);
    for r in &runs {
        for (t, e) in &r.error_history {
            errors.row(&[&r.n, t, e]);
        }
        for rec in conservation_monitor(&r.budget) {
            if r.mass_budget {
                conservation.row(&[&r.n, &rec.t, &rec.mismatch, &rec.identity_residual]);
            } else {
                conservation.row(&[&r.n, &rec.t, &Blank, &rec.identity_residual]);
            }
        }
        println!("{label} {} n = {:>4}: max error {:.6e}", scheme.scheme_id, r.n, r.max_error);
    }
    let mut written = vec![
        out.write("errors.csv", &errors.into_bytes())?,
        out.write("conservation.csv", &conservation.into_bytes())?,
    ];

    if runs.len() > 1 {
        let pairs: Vec<(f64, f64)> = runs.iter().map(|r| (r.spacing, r.max_error)).collect();
        let est = error_and_order(&pairs)?;
        let mut order = Csv::new(&["n", "h", "linf_error", "pairwise_order", "least_squares_order"]);
        // runs are sorted by increasing n, i.e. decreasing h, like the estimate
        for (k, r) in runs.iter().enumerate() {
            if k == 0 {
                order.row(&[&r.n, &r.spacing, &r.max_error, &Blank, &est.slope]);
            } else {
                order.row(&[&r.n, &r.spacing, &r.max_error, &est.pairwise[k - 1], &est.slope]);
            }
        }
        written.push(out.write("order.csv", &order.into_bytes())?);
        println!("least-squares order {:.4}", est.slope);
    }

    for run in &runs {
        for f in &run.fields {
            let mut csv = Csv::new(&["x", "y", "value"]);
            for ((j, i), v) in f.values.indexed_iter() {
                csv.row(&[&f.x[i], &f.y[j], v]);
            }
            written.push(out.write(&format!("{}.csv", f.name), &csv.into_bytes())?);
        }
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(Status::Success)
}

/// Empty CSV field.
struct Blank;

impl std::fmt::Debug for Blank {
    fn fmt(&self, _: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        Ok(())
    }
}

fn advection_t_final(opts: &Options, short: f64) -> CliResult<f64> {
    positive("t-final", opts.t_final.unwrap_or(if opts.full { 1000.0 } else { short }))
}

fn solve_1d(scheme: &SchemeDefinition, opts: &Options, n: usize, snapshots: bool) -> CliResult<RunSummary> {
    let t_final = advection_t_final(opts, 10.0)?;
    let mut config = Advection1dConfig::new(n, t_final);
    if snapshots {
        config.snapshot_times = opts.snapshots.clone().unwrap_or_else(|| vec![t_final]);
    }
    let run = advect_1d(scheme, &config).map_err(|e| CliError::from(e).context(format!("n = {n}")))?;
    let fields = run
        .snapshots
        .iter()
        .map(|s| NamedField {
            name: format!("snapshot_t{}", time_label(s.t)),
            x: run.nodes.clone(),
            y: vec![0.0],
            values: s.values.clone(),
        })
        .collect();
    Ok(RunSummary {
        n,
        spacing: run.spacing,
        max_error: run.max_error,
        error_history: run.error_history,
        budget: run.budget,
        mass_budget: true,
        fields,
    })
}

fn solve_2d(scheme: &SchemeDefinition, opts: &Options, n: usize, snapshots: bool) -> CliResult<RunSummary> {
    let t_final = advection_t_final(opts, 1.0)?;
    let mut config = Advection2dConfig::new(n, t_final);
    if snapshots {
        config.snapshot_times = opts.snapshots.clone().unwrap_or_else(|| vec![t_final]);
    }
    let run = advect_2d_varcoeff(scheme, &config).map_err(|e| CliError::from(e).context(format!("n = {n}")))?;
    let fields = run
        .snapshots
        .iter()
        .map(|s| NamedField {
            name: format!("snapshot_t{}", time_label(s.t)),
            x: run.nodes.clone(),
            y: run.nodes.clone(),
            values: s.values.clone(),
        })
        .collect();
    Ok(RunSummary {
        n,
        spacing: run.spacing,
        max_error: run.max_error,
        error_history: run.error_history,
        budget: run.budget,
        mass_budget: false,
        fields,
    })
}

fn solve_vortex(scheme: &SchemeDefinition, opts: &Options, n: usize, snapshots: bool) -> CliResult<RunSummary> {
    let mut config = VortexConfig::new(opts.epsilon.unwrap_or(0.1), n);
    if let Some(m) = opts.mach {
        config.mach = m;
    }
    config.travel = opts.travel.unwrap_or(if opts.full { 200.0 } else { 2.0 });
    if snapshots {
        config.snapshot_travel = opts.snapshots.clone().unwrap_or_else(|| vec![config.travel]);
    }
    config.validate()?;
    let time_unit = config.length / config.u_inf();
    let run = euler_vortex_2d(scheme, &config).map_err(|e| CliError::from(e).context(format!("n = {n}")))?;
    let mut fields = Vec::new();
    for s in &run.snapshots {
        let label = time_label(s.t / time_unit);
        for (name, values) in [("vorticity", &s.vorticity), ("pressure", &s.pressure)] {
            fields.push(NamedField {
                name: format!("{name}_travel{label}"),
                x: run.x.clone(),
                y: run.y.clone(),
                values: values.clone(),
            });
        }
    }
    println!("n = {n}: min pressure {:.6}", run.min_pressure);
    Ok(RunSummary {
        n,
        spacing: run.hx,
        max_error: run.max_error,
        error_history: run.error_history,
        budget: run.budget,
        mass_budget: true,
        fields,
    })
}
