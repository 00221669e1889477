//! Exact branch-and-bound reference solver for desk-scale instances,
//! plus the gap arithmetic used by the benchmark report.

use std::fmt;

use crate::instance::{Instance, Selection};
use crate::multipliers::{compute_ratios, init_multipliers};

/// Largest object count [`solve_exact`] accepts without an explicit
/// override; beyond it the search space invites accidental exponential
/// runs.
pub const GUARD_LIMIT: usize = 30;

/// Refusal to run the exact search on an oversized instance.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooLarge { n: usize, limit: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { n, limit } => {
                write!(f, "instance has {n} objects, above the exact-search guard of {limit}")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Gap arithmetic failures.
#[derive(Debug, Clone, PartialEq)]
pub enum GapError {
    NonPositiveReference(f64),
    /// The achieved value exceeds the reference it is measured against.
    /// This signals an oracle or bound inconsistency and must abort the
    /// caller, never be clamped to zero.
    BestExceedsReference { best: f64, reference: f64 },
}

impl fmt::Display for GapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapError::NonPositiveReference(r) => {
                write!(f, "gap reference {r} must be positive")
            }
            GapError::BestExceedsReference { best, reference } => {
                write!(f, "best value {best} exceeds its reference {reference}")
            }
        }
    }
}

impl std::error::Error for GapError {}

struct Search<'a> {
    instance: &'a Instance,
    order: Vec<usize>,
    /// suffix[k] = total value of order[k..]; the optimistic completion bound.
    suffix: Vec<f64>,
    usage: Vec<f64>,
    current: Selection,
    current_value: f64,
    best: Selection,
    best_value: f64,
}

impl Search<'_> {
    fn run(mut self) -> (f64, Selection) {
        self.descend(0);
        (self.best_value, self.best)
    }

    fn descend(&mut self, k: usize) {
        if self.current_value > self.best_value {
            self.best_value = self.current_value;
            self.best = self.current.clone();
        }
        if k == self.order.len() {
            return;
        }
        if self.current_value + self.suffix[k] <= self.best_value {
            return;
        }
        let i = self.order[k];
        let fits = (0..self.instance.m())
            .all(|j| self.usage[j] + self.instance.weight(j, i) <= self.instance.capacity(j));
        if fits {
            self.current.set(i, true);
            self.current_value += self.instance.value(i);
            for j in 0..self.instance.m() {
                self.usage[j] += self.instance.weight(j, i);
            }
            self.descend(k + 1);
            self.current.set(i, false);
            self.current_value -= self.instance.value(i);
            for j in 0..self.instance.m() {
                self.usage[j] -= self.instance.weight(j, i);
            }
        }
        self.descend(k + 1);
    }
}

/// Exact optimum by depth-first search in non-increasing unit-multiplier
/// ratio order, pruning any node whose value plus the total value of all
/// remaining objects cannot beat the incumbent. Runs regardless of size;
/// cost is exponential in the worst case.
pub fn solve_exact_unguarded(instance: &Instance) -> (f64, Selection) {
    let unit = init_multipliers(instance);
    let ratios = compute_ratios(instance, &unit, true);
    let order = ratios.order().to_vec();
    let n = instance.n();
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + instance.value(order[k]);
    }
    Search {
        instance,
        order,
        suffix,
        usage: vec![0.0; instance.m()],
        current: Selection::zeros(n),
        current_value: 0.0,
        best: Selection::zeros(n),
        best_value: 0.0,
    }
    .run()
}

/// [`solve_exact_unguarded`] behind the [`GUARD_LIMIT`] size check.
pub fn solve_exact(instance: &Instance) -> Result<(f64, Selection), OracleError> {
    if instance.n() > GUARD_LIMIT {
        return Err(OracleError::TooLarge { n: instance.n(), limit: GUARD_LIMIT });
    }
    Ok(solve_exact_unguarded(instance))
}

/// 100·(reference − best)/reference: how far `best` falls short of
/// `reference`, as a percentage of the reference.
pub fn percent_gap(best: f64, reference: f64) -> Result<f64, GapError> {
    if reference <= 0.0 {
        return Err(GapError::NonPositiveReference(reference));
    }
    if best > reference {
        return Err(GapError::BestExceedsReference { best, reference });
    }
    Ok(100.0 * (reference - best) / reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::greedy_estimate;
    use crate::instance::test_fixtures::t1;
    use crate::instance::random_instance;
    use crate::multipliers::{compute_multipliers, relaxation_bound, Multipliers};

    /// Plain sweep over all 2^n selections; the reference for the reference.
    fn enumerate_optimum(instance: &Instance) -> f64 {
        let n = instance.n();
        assert!(n <= 20);
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let bits = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let sel = Selection::from_bits(bits);
            if instance.is_feasible(&sel) {
                best = best.max(instance.objective(&sel));
            }
        }
        best
    }

    #[test]
    fn fixture_optimum() {
        let inst = t1();
        let (value, sel) = solve_exact(&inst).unwrap();
        assert_eq!(value, 22.0);
        assert_eq!(sel.indices(), vec![1, 2]);
    }

    #[test]
    fn single_fitting_object() {
        let inst = Instance::new("solo", vec![7.0], vec![vec![3.0]], vec![4.0], None).unwrap();
        let (value, sel) = solve_exact(&inst).unwrap();
        assert_eq!(value, 7.0);
        assert_eq!(sel.indices(), vec![0]);
    }

    #[test]
    fn nothing_fits() {
        let inst = Instance::new(
            "oversized",
            vec![5.0, 8.0],
            vec![vec![10.0, 12.0]],
            vec![9.0],
            None,
        )
        .unwrap();
        let (value, sel) = solve_exact(&inst).unwrap();
        assert_eq!(value, 0.0);
        assert_eq!(sel.count_selected(), 0);
    }

    #[test]
    fn matches_plain_enumeration() {
        for seed in 0..8 {
            let inst = random_instance(format!("enum-{seed}"), 12, 3, 0.5, seed);
            let (value, sel) = solve_exact(&inst).unwrap();
            assert_eq!(value, enumerate_optimum(&inst), "seed {seed}");
            assert!(inst.is_feasible(&sel));
            assert_eq!(inst.objective(&sel), value);
        }
    }

    #[test]
    fn sits_between_greedy_and_the_dual_bound() {
        for seed in 0..8 {
            let inst = random_instance(format!("bracket-{seed}"), 14, 4, 0.4, 100 + seed);
            let (value, _) = solve_exact(&inst).unwrap();
            let unit = crate::multipliers::init_multipliers(&inst);
            assert!(greedy_estimate(&inst, &unit) <= value);
            for iterations in [1, 10, 100] {
                let mult = compute_multipliers(&inst, iterations, 0.5);
                assert!(relaxation_bound(&inst, &mult) >= value);
            }
            let lopsided = Multipliers::from_weights(&inst, (0..inst.m()).map(|j| 0.3 + j as f64).collect());
            assert!(relaxation_bound(&inst, &lopsided) >= value);
        }
    }

    #[test]
    fn guard_refuses_oversized_instances() {
        let inst = random_instance("big", GUARD_LIMIT + 1, 2, 0.5, 1);
        assert_eq!(
            solve_exact(&inst).unwrap_err(),
            OracleError::TooLarge { n: GUARD_LIMIT + 1, limit: GUARD_LIMIT }
        );
    }

    #[test]
    fn unguarded_agrees_with_guarded() {
        let inst = random_instance("pair", 10, 2, 0.5, 2);
        let guarded = solve_exact(&inst).unwrap();
        assert_eq!(solve_exact_unguarded(&inst), guarded);
    }

    #[test]
    fn gap_arithmetic() {
        assert_eq!(percent_gap(22.0, 22.0).unwrap(), 0.0);
        let gap = percent_gap(21.0, 22.0).unwrap();
        assert!((gap - 100.0 / 22.0).abs() < 1e-12);
        assert_eq!(
            percent_gap(23.0, 22.0).unwrap_err(),
            GapError::BestExceedsReference { best: 23.0, reference: 22.0 }
        );
        assert_eq!(percent_gap(5.0, 0.0).unwrap_err(), GapError::NonPositiveReference(0.0));
    }
}
