use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{objective, OptimizationProblem, PENALTY};
use crate::error::{Error, Result};
use crate::scheme::{close_scheme, SchemeDefinition};

/// Scale of the difference vector in `a + F (b - c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationFactor {
    Constant(f64),
    /// Drawn uniformly from `[lo, hi)` once per generation.
    Dither(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEConfig {
    pub population_size: usize,
    pub mutation_factor: MutationFactor,
    pub crossover_rate: f64,
    pub max_generations: usize,
    /// Stop once the objective spread of the population falls below this.
    pub tolerance: f64,
    pub rng_seed: u64,
}

impl DEConfig {
    /// Defaults for a problem of the given dimension.
    pub fn for_dimension(dimension: usize) -> Self {
        Self {
            population_size: (15 * dimension).max(4),
            mutation_factor: MutationFactor::Dither(0.5, 1.0),
            crossover_rate: 0.7,
            max_generations: 500,
            tolerance: 1e-10,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::InvalidConfig(format!(
                "population_size must be at least 4, got {}",
                self.population_size
            )));
        }
        let factor_ok = match self.mutation_factor {
            MutationFactor::Constant(f) => f > 0.0 && f < 2.0,
            MutationFactor::Dither(lo, hi) => lo > 0.0 && lo <= hi && hi <= 2.0,
        };
        if !factor_ok {
            return Err(Error::InvalidConfig(format!(
                "mutation factor {:?} outside (0, 2)",
                self.mutation_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::InvalidConfig(format!(
                "crossover_rate must lie in [0, 1], got {}",
                self.crossover_rate
            )));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!("invalid tolerance {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// 0 for the initial population.
    pub generation: usize,
    pub best: f64,
    /// Difference between the worst and best objective in the population.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_objective: f64,
    pub scheme: SchemeDefinition,
    /// Generations actually run, excluding the initial population.
    pub generations: usize,
    pub history: Vec<GenerationStats>,
}

/// DE/rand/1/bin over the problem's box.
pub fn optimize(
    problem: &OptimizationProblem,
    config: &DEConfig,
    progress: impl FnMut(&GenerationStats),
) -> Result<OptimizationResult> {
    optimize_seeded(problem, config, &[], progress)
}

/// As [`optimize`], with the first members of the initial population replaced
/// by `seeds` (clipped to the box).
pub fn optimize_seeded(
    problem: &OptimizationProblem,
    config: &DEConfig,
    seeds: &[Vec<f64>],
    mut progress: impl FnMut(&GenerationStats),
) -> Result<OptimizationResult> {
    problem.validate()?;
    config.validate()?;
    let dim = problem.dimension();
    if let Some(s) = seeds.iter().find(|s| s.len() != dim) {
        return Err(Error::LengthMismatch { expected: dim, got: s.len() });
    }
    let np = config.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|k| match seeds.get(k) {
            Some(s) => clip(s.clone(), &problem.bounds),
            None => problem
                .bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect(),
        })
        .collect();
    let mut fitness = evaluate(problem, &population);

    let mut history = vec![stats(0, &fitness)];
    progress(&history[0]);

    let mut generations = 0;
    while generations < config.max_generations && !converged(&fitness, config.tolerance) {
        generations += 1;
        let f = match config.mutation_factor {
            MutationFactor::Constant(f) => f,
            MutationFactor::Dither(lo, hi) => lo + (hi - lo) * rng.random::<f64>(),
        };
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let [a, b, c] = distinct_others(&mut rng, np, i);
                let forced = rng.random_range(0..dim);
                let mutant: Vec<f64> = (0..dim)
                    .map(|j| {
                        let cross = rng.random::<f64>() < config.crossover_rate;
                        if j == forced || cross {
                            population[a][j] + f * (population[b][j] - population[c][j])
                        } else {
                            population[i][j]
                        }
                    })
                    .collect();
                clip(mutant, &problem.bounds)
            })
            .collect();
        let trial_fitness = evaluate(problem, &trials);
        for (i, (trial, value)) in trials.into_iter().zip(trial_fitness).enumerate() {
            if value <= fitness[i] {
                population[i] = trial;
                fitness[i] = value;
            }
        }
        let s = stats(generations, &fitness);
        progress(&s);
        history.push(s);
    }

    let best = best_index(&fitness);
    if fitness[best] == PENALTY {
        return Err(Error::NoFeasiblePoint);
    }
    let best_params = population.swap_remove(best);
    let scheme = close_scheme(problem.scheme_id, &best_params)?;
    Ok(OptimizationResult {
        best_params,
        best_objective: fitness[best],
        scheme,
        generations,
        history,
    })
}

fn evaluate(problem: &OptimizationProblem, members: &[Vec<f64>]) -> Vec<f64> {
    members.par_iter().map(|x| objective(problem, x)).collect()
}

fn clip(mut x: Vec<f64>, bounds: &[(f64, f64)]) -> Vec<f64> {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
    x
}

fn distinct_others(rng: &mut ChaCha8Rng, np: usize, exclude: usize) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let r = rng.random_range(0..np);
        if r != exclude && !picked[..k].contains(&r) {
            picked[k] = r;
            k += 1;
        }
    }
    picked
}

fn best_index(fitness: &[f64]) -> usize {
    // first minimum, so ties resolve deterministically
    fitness
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v < fitness[best] { i } else { best })
}

fn stats(generation: usize, fitness: &[f64]) -> GenerationStats {
    let best = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    GenerationStats {
        generation,
        best,
        spread: worst - best,
    }
}

/// Converged once a feasible best exists and the population has collapsed onto it.
fn converged(fitness: &[f64], tolerance: f64) -> bool {
    let s = stats(0, fitness);
    s.best < PENALTY && s.spread < tolerance
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{bundled, SchemeId};

    fn small_config(seed: u64) -> DEConfig {
        DEConfig {
            population_size: 8,
            max_generations: 15,
            rng_seed: seed,
            ..DEConfig::for_dimension(1)
        }
    }

    #[test]
    fn config_validation() {
        let mut c = DEConfig::for_dimension(3);
        assert_eq!(c.population_size, 45);
        c.validate().unwrap();
        c.population_size = 3;
        assert!(c.validate().is_err());
        c.population_size = 10;
        c.mutation_factor = MutationFactor::Constant(2.0);
        assert!(c.validate().is_err());
        c.mutation_factor = MutationFactor::Constant(0.8);
        c.crossover_rate = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn degenerate_box_returns_its_point() {
        let w0 = bundled(SchemeId::P1).free_params()[0];
        let mut p = OptimizationProblem::new(SchemeId::P1);
        p.bounds = vec![(w0, w0)];
        let r = optimize(&p, &small_config(1), |_| {}).unwrap();
        assert_eq!(r.best_params, vec![w0]);
        assert_eq!(r.best_objective, objective(&p, &[w0]));
    }

    #[test]
    fn infeasible_box_is_reported() {
        let mut p = OptimizationProblem::new(SchemeId::P1);
        p.bounds = vec![(0.01, 0.05)];
        assert_eq!(optimize(&p, &small_config(2), |_| {}).unwrap_err(), Error::NoFeasiblePoint);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let mut p = OptimizationProblem::new(SchemeId::P1);
        p.bounds = vec![(0.36, 0.40)];
        let mut seen_a = Vec::new();
        let a = optimize(&p, &small_config(7), |s| seen_a.push(*s)).unwrap();
        let b = optimize(&p, &small_config(7), |_| {}).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.history, seen_a);
        assert_eq!(a.best_params, b.best_params);
        let c = optimize(&p, &small_config(8), |_| {}).unwrap();
        assert_ne!(a.history, c.history);
    }

    #[test]
    fn best_never_increases() {
        let mut p = OptimizationProblem::new(SchemeId::P1);
        p.bounds = vec![(0.3, 0.5)];
        let r = optimize(&p, &small_config(3), |_| {}).unwrap();
        assert!(r.history.windows(2).all(|w| w[1].best <= w[0].best));
        assert_eq!(r.history.last().unwrap().best, r.best_objective);
        assert!(r.best_objective < PENALTY);
    }

    #[test]
    fn seeds_enter_initial_population() {
        let p = OptimizationProblem::new(SchemeId::P1);
        let seed = bundled(SchemeId::P1).free_params();
        let config = DEConfig { max_generations: 0, ..small_config(4) };
        let r = optimize_seeded(&p, &config, std::slice::from_ref(&seed), |_| {}).unwrap();
        assert_eq!(r.generations, 0);
        assert!(r.best_objective <= objective(&p, &seed));
    }
}
