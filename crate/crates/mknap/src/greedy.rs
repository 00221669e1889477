//! Ratio-ordered greedy construction: the baseline estimate and the
//! engine inside the crossover.

use crate::instance::{Instance, Selection};
use crate::multipliers::{compute_ratios, Multipliers, UtilityRatios};

/// Builds a feasible selection by scanning `candidates` (all objects when
/// `None`) in non-increasing ratio order and taking each object that still
/// fits every constraint. Objects that do not fit are skipped and the scan
/// continues, so a bulky high-ratio object cannot block later small ones.
pub fn greedy_construct(
    instance: &Instance,
    ratios: &UtilityRatios,
    candidates: Option<&[usize]>,
) -> Selection {
    let n = instance.n();
    let m = instance.m();
    let allowed: Vec<bool> = match candidates {
        Some(set) => {
            let mut mask = vec![false; n];
            for &i in set {
                assert!(i < n, "candidate {i} out of range for {n} objects");
                mask[i] = true;
            }
            mask
        }
        None => vec![true; n],
    };
    let mut sel = Selection::zeros(n);
    let mut usage = vec![0.0; m];
    for &i in ratios.order() {
        if !allowed[i] {
            continue;
        }
        let fits = (0..m).all(|j| usage[j] + instance.weight(j, i) <= instance.capacity(j));
        if fits {
            sel.set(i, true);
            for (j, u) in usage.iter_mut().enumerate() {
                *u += instance.weight(j, i);
            }
        }
    }
    sel
}

/// Objective of the full greedy pass under the given multipliers, with
/// the divided ratio form. This is the baseline the evolutionary search
/// is measured against.
pub fn greedy_estimate(instance: &Instance, mult: &Multipliers) -> f64 {
    let ratios = compute_ratios(instance, mult, true);
    let sel = greedy_construct(instance, &ratios, None);
    instance.objective(&sel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::test_fixtures::t1;
    use crate::multipliers::init_multipliers;

    #[test]
    fn full_scan_on_the_fixture_finds_the_optimum() {
        let inst = t1();
        let unit = init_multipliers(&inst);
        let ratios = compute_ratios(&inst, &unit, true);
        let sel = greedy_construct(&inst, &ratios, None);
        // Order is object 1, then 2, then 0; object 0 would push usage to
        // (6, 6) past the (5, 5) capacities.
        assert_eq!(sel.indices(), vec![1, 2]);
        assert_eq!(inst.objective(&sel), 22.0);
        assert!(inst.is_feasible(&sel));
    }

    #[test]
    fn empty_candidate_set_selects_nothing() {
        let inst = t1();
        let unit = init_multipliers(&inst);
        let ratios = compute_ratios(&inst, &unit, true);
        let sel = greedy_construct(&inst, &ratios, Some(&[]));
        assert_eq!(sel.count_selected(), 0);
    }

    #[test]
    fn oversized_objects_are_all_skipped() {
        let inst = Instance::new(
            "oversized",
            vec![5.0, 8.0],
            vec![vec![10.0, 12.0]],
            vec![9.0],
            None,
        )
        .unwrap();
        let unit = init_multipliers(&inst);
        let ratios = compute_ratios(&inst, &unit, true);
        let sel = greedy_construct(&inst, &ratios, None);
        assert_eq!(sel.count_selected(), 0);
    }

    #[test]
    fn skipped_object_does_not_stop_the_scan() {
        // Ratio order is 1 (8/2), 0 (9/4), 2 (2/1); object 0 no longer fits
        // after object 1, but object 2 still does.
        let inst = Instance::new(
            "skip",
            vec![9.0, 8.0, 2.0],
            vec![vec![4.0, 2.0, 1.0]],
            vec![3.0],
            None,
        )
        .unwrap();
        let unit = init_multipliers(&inst);
        let ratios = compute_ratios(&inst, &unit, true);
        let sel = greedy_construct(&inst, &ratios, None);
        assert_eq!(sel.indices(), vec![1, 2]);
    }

    #[test]
    fn result_stays_inside_the_candidate_set() {
        let inst = t1();
        let unit = init_multipliers(&inst);
        let ratios = compute_ratios(&inst, &unit, true);
        let sel = greedy_construct(&inst, &ratios, Some(&[0, 2]));
        for i in sel.indices() {
            assert!(i == 0 || i == 2);
        }
        assert!(inst.is_feasible(&sel));
    }

    #[test]
    fn estimate_matches_the_fixture_trace() {
        let inst = t1();
        let unit = init_multipliers(&inst);
        assert_eq!(greedy_estimate(&inst, &unit), 22.0);
    }

    #[test]
    fn estimate_on_zero_values_is_zero() {
        let inst = Instance::new(
            "worthless",
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            vec![2.0],
            None,
        )
        .unwrap();
        let unit = init_multipliers(&inst);
        assert_eq!(greedy_estimate(&inst, &unit), 0.0);
    }

    #[test]
    fn estimate_single_fitting_object_is_its_value() {
        let inst = Instance::new("solo", vec![7.0], vec![vec![3.0]], vec![4.0], None).unwrap();
        let unit = init_multipliers(&inst);
        assert_eq!(greedy_estimate(&inst, &unit), 7.0);
    }
}
