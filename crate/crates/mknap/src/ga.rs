//! The genetic algorithm: Bernoulli initialization that tolerates
//! infeasible individuals, feasibility-first tournament selection, the
//! greedy crossover that rebuilds offspring from the union of two
//! parents, bitwise mutation, elitism, and the evolution loop.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::greedy::greedy_construct;
use crate::instance::{Instance, Selection};
use crate::multipliers::{compute_multipliers, compute_ratios, UtilityRatios};

/// A candidate selection with its evaluation cached: objective value,
/// per-constraint usage, feasibility, and total normalized constraint
/// violation. Caches are computed once at construction and always agree
/// with the selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    sel: Selection,
    value: f64,
    usage: Vec<f64>,
    feasible: bool,
    violation: f64,
}

impl Individual {
    pub fn from_selection(instance: &Instance, sel: Selection) -> Self {
        let value = instance.objective(&sel);
        let usage: Vec<f64> = (0..instance.m()).map(|j| instance.usage(&sel, j)).collect();
        let violation: f64 = usage
            .iter()
            .enumerate()
            .map(|(j, &u)| (u - instance.capacity(j)).max(0.0) / instance.capacity(j).max(1.0))
            .sum();
        let feasible = violation == 0.0;
        Individual { sel, value, usage, feasible, violation }
    }

    pub fn selection(&self) -> &Selection {
        &self.sel
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn usage(&self) -> &[f64] {
        &self.usage
    }

    pub fn feasible(&self) -> bool {
        self.feasible
    }

    /// Σ_j max(0, usage_j − c_j) / max(c_j, 1); zero iff feasible.
    pub fn violation(&self) -> f64 {
        self.violation
    }
}

/// Hyperparameters for [`evolve`]. `mutation_rate` of `None` resolves to
/// `1/n` for the instance at hand.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub inclusion_probability: f64,
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    pub elite_count: usize,
    pub no_improvement_limit: Option<usize>,
    pub seed: u64,
    pub divide_by_m: bool,
    pub multiplier_iterations: usize,
    pub multiplier_step: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            generations: 500,
            inclusion_probability: 0.5,
            mutation_rate: None,
            tournament_size: 3,
            elite_count: 2,
            no_improvement_limit: Some(200),
            seed: 42,
            divide_by_m: true,
            multiplier_iterations: 100,
            multiplier_step: 0.5,
        }
    }
}

/// Configuration validation failures.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    PopulationZero,
    GenerationsZero,
    InclusionProbability(f64),
    MutationRate(f64),
    TournamentSize(usize),
    EliteCount { elite: usize, population: usize },
    NoImprovementZero,
    MultiplierStep(f64),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::PopulationZero => write!(f, "population size must be at least 1"),
            ConfigError::GenerationsZero => write!(f, "generation count must be at least 1"),
            ConfigError::InclusionProbability(p) => {
                write!(f, "inclusion probability {p} must lie in [0, 1]")
            }
            ConfigError::MutationRate(r) => write!(f, "mutation rate {r} must lie in [0, 1]"),
            ConfigError::TournamentSize(t) => write!(f, "tournament size {t} must be at least 2"),
            ConfigError::EliteCount { elite, population } => {
                write!(f, "elite count {elite} must be smaller than the population size {population}")
            }
            ConfigError::NoImprovementZero => {
                write!(f, "no-improvement limit must be at least 1 when set")
            }
            ConfigError::MultiplierStep(s) => {
                write!(f, "multiplier step {s} must be positive")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size == 0 {
            return Err(ConfigError::PopulationZero);
        }
        if self.generations == 0 {
            return Err(ConfigError::GenerationsZero);
        }
        if !(0.0..=1.0).contains(&self.inclusion_probability) {
            return Err(ConfigError::InclusionProbability(self.inclusion_probability));
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(ConfigError::MutationRate(r));
            }
        }
        // Tournaments draw with replacement, so sizes above the population
        // are harmless; only degenerate single-draw tournaments are refused.
        if self.tournament_size < 2 {
            return Err(ConfigError::TournamentSize(self.tournament_size));
        }
        if self.elite_count >= self.population_size {
            return Err(ConfigError::EliteCount {
                elite: self.elite_count,
                population: self.population_size,
            });
        }
        if self.no_improvement_limit == Some(0) {
            return Err(ConfigError::NoImprovementZero);
        }
        if !(self.multiplier_step > 0.0) {
            return Err(ConfigError::MultiplierStep(self.multiplier_step));
        }
        Ok(())
    }

    fn resolved_mutation_rate(&self, n: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / n as f64)
    }
}

/// Outcome of one [`evolve`] run.
#[derive(Debug, Clone)]
pub struct GaResult {
    /// Best feasible individual found. Never worse than the greedy baseline.
    pub best: Individual,
    /// Generation at which `best` was found; 0 means the initial population.
    pub generation_found: usize,
    /// Generations actually executed (early exits stop short).
    pub generations_run: usize,
    /// Best-ever objective after the initial population (entry 0) and after
    /// each generation; non-decreasing.
    pub history: Vec<f64>,
    pub elapsed: Duration,
    /// Objective of the pure greedy pass under the same ratios.
    pub greedy_baseline: f64,
    /// Lagrangian dual bound from the multiplier run.
    pub upper_bound: f64,
}

/// Draws `population_size` individuals, each bit set independently with
/// probability `inclusion_probability`. Infeasible draws are kept; the
/// crossover is what pulls the population back inside the constraints.
pub fn init_population<R: Rng>(
    instance: &Instance,
    config: &GaConfig,
    rng: &mut R,
) -> Vec<Individual> {
    (0..config.population_size)
        .map(|_| {
            let bits = (0..instance.n())
                .map(|_| rng.gen_bool(config.inclusion_probability))
                .collect();
            Individual::from_selection(instance, Selection::from_bits(bits))
        })
        .collect()
}

/// Ranks `a` against `b`; `Greater` means `a` is fitter. Any feasible
/// individual outranks every infeasible one; feasibles compare by value;
/// infeasibles compare by smaller violation, then by value.
pub fn fitness_rank(a: &Individual, b: &Individual) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a.feasible(), b.feasible()) {
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (true, true) => a.value().total_cmp(&b.value()),
        (false, false) => b
            .violation()
            .total_cmp(&a.violation())
            .then(a.value().total_cmp(&b.value())),
    }
}

/// Tournament selection: draws `tournament_size` members uniformly with
/// replacement and returns the fitness maximum, earliest draw winning ties.
pub fn select_parent<'p, R: Rng>(
    population: &'p [Individual],
    config: &GaConfig,
    rng: &mut R,
) -> &'p Individual {
    assert!(!population.is_empty(), "cannot select from an empty population");
    let mut winner = rng.gen_range(0..population.len());
    for _ in 1..config.tournament_size {
        let challenger = rng.gen_range(0..population.len());
        if fitness_rank(&population[challenger], &population[winner]) == std::cmp::Ordering::Greater {
            winner = challenger;
        }
    }
    &population[winner]
}

/// Builds one offspring: the candidate set is the union of the parents'
/// selected objects, and the offspring is the greedy construction over
/// that set. The result is feasible no matter how infeasible the parents
/// are, and selects only objects at least one parent selected.
pub fn greedy_crossover(
    instance: &Instance,
    ratios: &UtilityRatios,
    a: &Individual,
    b: &Individual,
) -> Individual {
    let union: Vec<usize> = (0..instance.n())
        .filter(|&i| a.selection().get(i) || b.selection().get(i))
        .collect();
    let sel = greedy_construct(instance, ratios, Some(&union));
    Individual::from_selection(instance, sel)
}

/// Flips each bit independently with the configured mutation rate. The
/// result may be infeasible; it is evaluated, not repaired.
pub fn mutate<R: Rng>(
    instance: &Instance,
    ind: &Individual,
    config: &GaConfig,
    rng: &mut R,
) -> Individual {
    let rate = config.resolved_mutation_rate(instance.n());
    let bits = ind
        .selection()
        .bits()
        .iter()
        .map(|&b| if rng.gen_bool(rate) { !b } else { b })
        .collect();
    Individual::from_selection(instance, Selection::from_bits(bits))
}

fn best_feasible(population: &[Individual]) -> Option<&Individual> {
    population
        .iter()
        .filter(|ind| ind.feasible())
        .max_by(|a, b| a.value().total_cmp(&b.value()))
}

fn elite_indices(population: &[Individual], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| fitness_rank(&population[b], &population[a]));
    order.truncate(count);
    order
}

/// Runs the full pipeline: multiplier precomputation, ratio construction,
/// greedy baseline, Bernoulli initialization with the greedy selection
/// injected, then generational evolution with elitism. Stops after
/// `generations` rounds, after `no_improvement_limit` rounds without a
/// better feasible individual, or as soon as the best value reaches the
/// known optimum or the dual bound.
pub fn evolve(instance: &Instance, config: &GaConfig) -> Result<GaResult, ConfigError> {
    config.validate()?;
    let start = Instant::now();

    let mult = compute_multipliers(instance, config.multiplier_iterations, config.multiplier_step);
    let upper_bound = mult.best_bound();
    let ratios = compute_ratios(instance, &mult, config.divide_by_m);
    let greedy_sel = greedy_construct(instance, &ratios, None);
    let greedy_baseline = instance.objective(&greedy_sel);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = init_population(instance, config, &mut rng);
    population[0] = Individual::from_selection(instance, greedy_sel);

    let mut best = best_feasible(&population)
        .expect("the injected greedy individual is feasible")
        .clone();
    let mut generation_found = 0;
    let mut history = vec![best.value()];
    let mut generations_run = 0;
    let mut stale = 0usize;

    let reached_proven_optimum = |value: f64| {
        instance.known_optimum().is_some_and(|opt| value >= opt) || value >= upper_bound
    };

    if !reached_proven_optimum(best.value()) {
        for generation in 1..=config.generations {
            let mut next: Vec<Individual> = elite_indices(&population, config.elite_count)
                .into_iter()
                .map(|i| population[i].clone())
                .collect();
            while next.len() < config.population_size {
                let p1 = select_parent(&population, config, &mut rng);
                let p2 = select_parent(&population, config, &mut rng);
                let child = greedy_crossover(instance, &ratios, p1, p2);
                next.push(mutate(instance, &child, config, &mut rng));
            }
            population = next;
            generations_run = generation;

            if let Some(gen_best) = best_feasible(&population) {
                if gen_best.value() > best.value() {
                    best = gen_best.clone();
                    generation_found = generation;
                    stale = 0;
                } else {
                    stale += 1;
                }
            } else {
                stale += 1;
            }
            history.push(best.value());

            if reached_proven_optimum(best.value()) {
                break;
            }
            if config.no_improvement_limit.is_some_and(|limit| stale >= limit) {
                break;
            }
        }
    }

    Ok(GaResult {
        best,
        generation_found,
        generations_run,
        history,
        elapsed: start.elapsed(),
        greedy_baseline,
        upper_bound,
    })
}
