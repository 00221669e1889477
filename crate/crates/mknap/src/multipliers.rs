//! Lagrangian machinery: subgradient multiplier computation, the dual
//! bound, and the utility ratios every greedy pass consumes.

use crate::instance::{Instance, Selection};

/// Smallest weight any constraint may carry. Updates clamp here so no
/// constraint's influence on the ratios ever vanishes entirely.
pub const EPSILON_FLOOR: f64 = 1e-4;

/// Per-constraint Lagrangian weights plus bookkeeping from the
/// subgradient run that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    weights: Vec<f64>,
    iterations_run: usize,
    best_bound: f64,
}

impl Multipliers {
    /// Wraps an explicit weight vector. Weights must be finite and
    /// strictly positive; the bound is evaluated fresh for them.
    ///
    /// Panics when the length differs from the constraint count or any
    /// weight is non-positive or non-finite.
    pub fn from_weights(instance: &Instance, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), instance.m(), "need one weight per constraint");
        for (j, &l) in weights.iter().enumerate() {
            assert!(l.is_finite() && l > 0.0, "weight {j} is {l}, must be finite and positive");
        }
        let best_bound = bound_for(instance, &weights);
        Multipliers { weights, iterations_run: 0, best_bound }
    }

    /// The weight l_j for each constraint.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of subgradient updates applied so far.
    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    /// Smallest dual bound seen across the run that produced this value.
    pub fn best_bound(&self) -> f64 {
        self.best_bound
    }
}

/// Utility ratios for every object and the rank order greedy passes walk.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityRatios {
    ratios: Vec<f64>,
    order: Vec<usize>,
}

impl UtilityRatios {
    /// ratio_i per object; zero-denominator objects carry infinity.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Object indices in non-increasing ratio order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Unit weights for every constraint, bound evaluated at those weights.
pub fn init_multipliers(instance: &Instance) -> Multipliers {
    let weights = vec![1.0; instance.m()];
    let best_bound = bound_for(instance, &weights);
    Multipliers { weights, iterations_run: 0, best_bound }
}

fn reduced_profit(instance: &Instance, weights: &[f64], i: usize) -> f64 {
    let penalty: f64 = weights
        .iter()
        .enumerate()
        .map(|(j, &l)| l * instance.weight(j, i))
        .sum();
    instance.value(i) - penalty
}

/// Maximizer of the relaxed objective: object `i` is taken iff its
/// reduced profit v_i − Σ_j l_j·w_{j,i} is strictly positive. The result
/// ignores capacities and need not be feasible.
pub fn relaxed_selection(instance: &Instance, mult: &Multipliers) -> Selection {
    let bits = (0..instance.n())
        .map(|i| reduced_profit(instance, mult.weights(), i) > 0.0)
        .collect();
    Selection::from_bits(bits)
}

fn bound_for(instance: &Instance, weights: &[f64]) -> f64 {
    let capacity_term: f64 = weights
        .iter()
        .enumerate()
        .map(|(j, &l)| l * instance.capacity(j))
        .sum();
    let profit_term: f64 = (0..instance.n())
        .map(|i| reduced_profit(instance, weights, i).max(0.0))
        .sum();
    capacity_term + profit_term
}

/// Lagrangian dual bound Σ_j l_j·c_j + Σ_i max(0, reduced profit of i).
/// Upper-bounds the objective of every feasible selection.
pub fn relaxation_bound(instance: &Instance, mult: &Multipliers) -> f64 {
    bound_for(instance, mult.weights())
}

/// One subgradient step: with x* the relaxed selection at the current
/// weights and g_j = usage(x*, j) − c_j, each weight moves to
/// max(EPSILON_FLOOR, l_j + step·g_j/max(c_j, 1)).
///
/// Panics when `step` is not strictly positive.
pub fn update_multipliers(instance: &Instance, mult: &Multipliers, step: f64) -> Multipliers {
    assert!(step > 0.0, "step is {step}, must be positive");
    let relaxed = relaxed_selection(instance, mult);
    let weights: Vec<f64> = mult
        .weights()
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let subgradient = instance.usage(&relaxed, j) - instance.capacity(j);
            (l + step * subgradient / instance.capacity(j).max(1.0)).max(EPSILON_FLOOR)
        })
        .collect();
    let best_bound = mult.best_bound().min(bound_for(instance, &weights));
    Multipliers { weights, iterations_run: mult.iterations_run() + 1, best_bound }
}

/// Diminishing-step subgradient run: starts from unit weights and applies
/// `iterations` updates with step `initial_step / k` at round `k`. Returns
/// the weight vector whose bound was smallest over the whole run, not
/// necessarily the final iterate. `iterations = 0` returns the unit
/// weights untouched.
pub fn compute_multipliers(instance: &Instance, iterations: usize, initial_step: f64) -> Multipliers {
    assert!(initial_step > 0.0, "initial step is {initial_step}, must be positive");
    let mut current = init_multipliers(instance);
    let mut best_weights = current.weights().to_vec();
    let mut best_bound = current.best_bound();
    for k in 1..=iterations {
        current = update_multipliers(instance, &current, initial_step / k as f64);
        // best_bound inside `current` is already the running minimum, so a
        // strict drop means the weights just produced are the new argmin.
        if current.best_bound() < best_bound {
            best_bound = current.best_bound();
            best_weights = current.weights().to_vec();
        }
    }
    Multipliers { weights: best_weights, iterations_run: iterations, best_bound }
}

/// Utility ratio per object: value over the multiplier-weighted aggregate
/// weight d_i = Σ_j l_j·w_{j,i}, with d_i further divided by m when
/// `divide_by_m` is set. Division by m is applied as a multiplication of
/// the numerator so the toggle rescales every ratio by exactly m and
/// cannot perturb the rank order. Objects with d_i = 0 rank before all
/// others, among themselves by descending value then ascending index.
pub fn compute_ratios(instance: &Instance, mult: &Multipliers, divide_by_m: bool) -> UtilityRatios {
    let n = instance.n();
    let scale = if divide_by_m { instance.m() as f64 } else { 1.0 };
    let mut denominators = Vec::with_capacity(n);
    let mut ratios = Vec::with_capacity(n);
    for i in 0..n {
        let d: f64 = mult
            .weights()
            .iter()
            .enumerate()
            .map(|(j, &l)| l * instance.weight(j, i))
            .sum();
        denominators.push(d);
        ratios.push(if d == 0.0 { f64::INFINITY } else { instance.value(i) * scale / d });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let free_a = denominators[a] == 0.0;
        let free_b = denominators[b] == 0.0;
        match (free_a, free_b) {
            (true, true) => instance
                .value(b)
                .total_cmp(&instance.value(a))
                .then(a.cmp(&b)),
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => ratios[b].total_cmp(&ratios[a]).then(a.cmp(&b)),
        }
    });
    UtilityRatios { ratios, order }
}
