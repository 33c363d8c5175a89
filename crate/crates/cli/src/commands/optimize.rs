use std::collections::BTreeMap;
use std::path::PathBuf;

use compact_conserve::optimizer::{optimize, DEConfig, OptimizationProblem};
use compact_conserve::{Provenance, SchemeFile};
use serde_json::json;

use super::parse_id;
use crate::error::{CliError, CliResult, Status};
use crate::output::{write_atomic, OutDir};

pub struct Options {
    pub scheme: String,
    pub seed: u64,
    pub generations: Option<usize>,
    pub population: Option<usize>,
    pub allow_initial: bool,
    pub out_file: Option<PathBuf>,
    pub out_dir: PathBuf,
}

pub fn run(opts: Options) -> CliResult<Status> {
    let id = parse_id(&opts.scheme)?;
    let mut problem = OptimizationProblem::new(id);
    problem.seed = opts.seed;
    let mut config = DEConfig::for_dimension(problem.dimension());
    config.rng_seed = opts.seed;
    if let Some(g) = opts.generations {
        config.max_generations = g;
    }
    if let Some(p) = opts.population {
        config.population_size = p;
    }
    if config.max_generations == 0 && !opts.allow_initial {
        return Err(CliError::numeric(anyhow::anyhow!(
            "--generations 0 performs no search; pass --allow-initial to keep the best initial member"
        )));
    }

    let result = optimize(&problem, &config, |s| {
        eprintln!("generation {:>4}  best {:+.8}  spread {:.3e}", s.generation, s.best, s.spread);
    })?;

    let mut meta = BTreeMap::new();
    meta.insert("seed".to_string(), json!(opts.seed));
    meta.insert("generations".to_string(), json!(result.generations));
    meta.insert("objective".to_string(), json!(result.best_objective));
    let file = SchemeFile::from_definition(&result.scheme, Provenance::Optimized, meta);
    let path = match opts.out_file {
        Some(p) => p,
        None => OutDir::new(opts.out_dir)?.join(&format!("optimized_{id}.json")),
    };
    write_atomic(&path, file.to_json().as_bytes())?;

    let params: Vec<String> = id
        .free_param_names()
        .iter()
        .zip(&result.best_params)
        .map(|(n, v)| format!("{n} = {v}"))
        .collect();
    println!("{}", params.join(", "));
    println!("objective = {:.6} after {} generations", result.best_objective, result.generations);
    println!("wrote {}", path.display());
    Ok(Status::Success)
}
