//! Acceptance gate: one test per promise the artifact makes, each at its
//! stated tolerance. The benchmark-replication tests need the public
//! OR-Library mknap instance files, which are not redistributed here;
//! they fail with instructions until those files are supplied in `data/`
//! (or a directory named by MKNAP_BENCH_DATA).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mknap::{
    compute_multipliers, compute_ratios, emit_report, evolve, greedy_crossover, greedy_estimate,
    init_multipliers, parse_orlib, parse_weing, random_instance, relaxation_bound, run_benchmark,
    solve_exact, GaConfig, Individual, Instance, Multipliers, ParseError, ReportFormat, Selection,
};

const T1_WEING: &str = "3 2  6 10 12  1 2 3  2 2 2  5 5  22";
const T1_ORLIB: &str = "1  3 2 22  6 10 12  1 2 3  2 2 2  5 5";

fn worker_count() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Offspring feasibility: ten thousand randomized crossovers, zero
/// infeasible children, under ten seconds.
#[test]
fn crossover_never_yields_an_infeasible_offspring_in_ten_thousand_cases() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let mut infeasible = 0usize;
    for case in 0..10_000u64 {
        let n = rng.gen_range(5..=60);
        let m = rng.gen_range(2..=10);
        let inst = random_instance(format!("feas-{case}"), n, m, 0.5, case);
        let ratios = compute_ratios(&inst, &init_multipliers(&inst), true);
        let parent = |rng: &mut ChaCha8Rng| {
            Individual::from_selection(
                &inst,
                Selection::from_bits((0..n).map(|_| rng.gen_bool(0.5)).collect()),
            )
        };
        let a = parent(&mut rng);
        let b = parent(&mut rng);
        let child = greedy_crossover(&inst, &ratios, &a, &b);
        if !child.feasible() || !inst.is_feasible(child.selection()) {
            infeasible += 1;
        }
    }
    assert_eq!(infeasible, 0, "{infeasible} infeasible offspring out of 10000");
    let elapsed = start.elapsed();
    println!("10000 crossovers, all feasible, {elapsed:?}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, limit is 10s");
}

fn desk_scale_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde5c);
    (0..100)
        .map(|k| {
            let n = rng.gen_range(8..=16);
            let m = rng.gen_range(2..=5);
            random_instance(format!("desk-{k}"), n, m, 0.5, 10_000 + k)
        })
        .collect()
}

/// Oracle equivalence at desk scale: the search matches the exact optimum
/// on at least 95 of 100 small instances, never exceeds it, never falls
/// below the greedy estimate, and finishes inside a minute.
#[test]
fn evolution_matches_the_exact_optimum_on_at_least_95_of_100_small_instances() {
    let start = Instant::now();
    let config = GaConfig { population_size: 100, generations: 200, ..GaConfig::default() };
    let mut matched = 0usize;
    for inst in &desk_scale_instances() {
        let (optimum, _) = solve_exact(inst).unwrap();
        let result = evolve(inst, &config).unwrap();
        let best = result.best.value();
        assert!(best <= optimum, "{}: best {best} above the exact optimum {optimum}", inst.name());
        let mult = compute_multipliers(inst, config.multiplier_iterations, config.multiplier_step);
        let estimate = greedy_estimate(inst, &mult);
        assert_eq!(result.greedy_baseline, estimate, "{}: baseline drifted", inst.name());
        assert!(
            best >= estimate,
            "{}: best {best} below the greedy estimate {estimate}",
            inst.name()
        );
        if best == optimum {
            matched += 1;
        }
    }
    let elapsed = start.elapsed();
    println!("{matched}/100 instances matched the exact optimum, {elapsed:?}");
    assert!(matched >= 95, "only {matched}/100 instances matched the exact optimum");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, limit is 60s");
}

/// Dual bound validity: every multiplier vector produced at 1, 10, and
/// 100 iterations upper-bounds the exact optimum on all 100 desk-scale
/// instances.
#[test]
fn dual_bounds_never_undercut_the_exact_optimum() {
    let mut violations = Vec::new();
    for inst in &desk_scale_instances() {
        let (optimum, _) = solve_exact(inst).unwrap();
        for iterations in [1usize, 10, 100] {
            let mult = compute_multipliers(inst, iterations, 0.5);
            let bound = relaxation_bound(inst, &mult);
            if bound < optimum - 1e-9 {
                violations.push(format!(
                    "{} at {iterations} iterations: bound {bound} < optimum {optimum}",
                    inst.name()
                ));
            }
        }
    }
    assert!(violations.is_empty(), "dual bound violations:\n{}", violations.join("\n"));
}

fn bench_data_dir() -> PathBuf {
    match std::env::var_os("MKNAP_BENCH_DATA") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

fn with_optimum(inst: Instance, path: &Path) -> Instance {
    assert!(
        inst.known_optimum().is_some(),
        "{}: benchmark file must carry its known optimum (trailing weing token or orlib reference)",
        path.display()
    );
    inst
}

/// Loads one named OR-Library benchmark instance from the data directory,
/// accepting either grammar. Panics with setup instructions when absent:
/// the files are public but not redistributed with this repository.
fn load_benchmark(name: &str) -> Instance {
    let dir = bench_data_dir();
    for ext in ["dat", "txt"] {
        let path = dir.join(format!("{name}.{ext}"));
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path)
            .unwrap_or_else(|err| panic!("{}: {err}", path.display()));
        match parse_weing(&text, name) {
            Ok(inst) => return with_optimum(inst, &path),
            Err(weing_err) => match parse_orlib(&text, name) {
                Ok(mut multi) if multi.len() == 1 => {
                    return with_optimum(multi.pop().unwrap(), &path)
                }
                Ok(multi) => panic!(
                    "{}: expected one instance, found {}; split the file",
                    path.display(),
                    multi.len()
                ),
                Err(orlib_err) => panic!(
                    "{}: parses as neither grammar (weing: {weing_err}; orlib: {orlib_err})",
                    path.display()
                ),
            },
        }
    }
    panic!(
        "benchmark instance '{name}' is missing: download the OR-Library mknap file, convert it to \
         a single-instance weing or orlib file carrying its known optimum, and save it as \
         {}/{name}.dat (or point MKNAP_BENCH_DATA at the directory holding it); \
         network access was unavailable when this repository was built, so the public data \
         files could not be bundled",
        dir.display()
    )
}

fn benchmark_report(inst: &Instance, trials: usize) -> (usize, f64, f64, Vec<f64>) {
    let config = GaConfig::default();
    let report = run_benchmark(std::slice::from_ref(inst), &config, trials, worker_count())
        .expect("default config is valid");
    let row = match &report.rows[0] {
        mknap::RowOutcome::Done(row) => row.clone(),
        mknap::RowOutcome::Failed { instance, message } => {
            panic!("{instance}: benchmark failed: {message}")
        }
    };
    let trial_seconds = report.records.iter().map(|r| r.elapsed.as_secs_f64()).collect();
    (row.solved, row.best_value, row.gap_percent, trial_seconds)
}

/// Benchmark replication, sento2 (m=30, n=60): the known optimum is
/// reached in at least 15 of 20 default-config trials, best-of-trials
/// gap exactly zero.
#[test]
fn benchmark_sento2_reaches_its_optimum_in_at_least_15_of_20_trials() {
    let inst = load_benchmark("sento2");
    let (solved, _, gap, _) = benchmark_report(&inst, 20);
    assert!(solved >= 15, "solved {solved}/20, need 15");
    assert_eq!(gap, 0.0, "best-of-trials gap {gap}% is not zero");
}

/// Benchmark replication, weish05 (m=5, n=30): optimum in at least 18 of
/// 20 trials, best-of-trials gap exactly zero.
#[test]
fn benchmark_weish05_reaches_its_optimum_in_at_least_18_of_20_trials() {
    let inst = load_benchmark("weish05");
    let (solved, _, gap, _) = benchmark_report(&inst, 20);
    assert!(solved >= 18, "solved {solved}/20, need 18");
    assert_eq!(gap, 0.0, "best-of-trials gap {gap}% is not zero");
}

/// Benchmark replication, weing1 (m=2, n=28): optimum in at least 8 of 20
/// trials, best-of-trials gap exactly zero.
#[test]
fn benchmark_weing1_reaches_its_optimum_in_at_least_8_of_20_trials() {
    let inst = load_benchmark("weing1");
    let (solved, _, gap, _) = benchmark_report(&inst, 20);
    assert!(solved >= 8, "solved {solved}/20, need 8");
    assert_eq!(gap, 0.0, "best-of-trials gap {gap}% is not zero");
}

/// Benchmark replication, weing7 (m=2, n=105, acknowledged hard): the
/// best of 20 trials lands within 0.5% of the known optimum and no trial
/// exceeds its 60-second cap.
#[test]
fn benchmark_weing7_best_of_20_lands_within_half_a_percent_of_optimum() {
    let inst = load_benchmark("weing7");
    let (_, _, gap, trial_seconds) = benchmark_report(&inst, 20);
    for (trial, seconds) in trial_seconds.iter().enumerate() {
        assert!(*seconds < 60.0, "trial {trial} took {seconds:.1}s, cap is 60s");
    }
    assert!(gap <= 0.5, "best-of-trials gap {gap}% exceeds 0.5%");
}

/// Greedy baseline dominance: on every benchmark instance the search
/// result is at least the greedy estimate, and strictly better on at
/// least one of them.
#[test]
fn search_never_falls_below_its_greedy_baseline_and_beats_it_somewhere() {
    let config = GaConfig::default();
    let mut strict_improvements = 0usize;
    for name in ["weing1", "weing7", "sento2", "weish05"] {
        let inst = load_benchmark(name);
        let result = evolve(&inst, &config).unwrap();
        assert!(
            result.best.value() >= result.greedy_baseline,
            "{name}: best {} below greedy baseline {}",
            result.best.value(),
            result.greedy_baseline
        );
        if result.best.value() > result.greedy_baseline {
            strict_improvements += 1;
        }
    }
    assert!(strict_improvements >= 1, "the search never strictly beat its greedy baseline");
}

/// Determinism and concurrency neutrality: a fixed base seed produces
/// byte-identical csv (time column excluded) across two runs and across
/// worker counts 1 and 8.
#[test]
fn benchmark_reports_are_identical_across_reruns_and_worker_counts() {
    let instances = vec![
        parse_weing(T1_WEING, "T1").unwrap(),
        random_instance("neutral-a", 24, 4, 0.5, 31),
        random_instance("neutral-b", 30, 6, 0.4, 32),
        random_instance("neutral-c", 18, 2, 0.6, 33),
    ];
    let config = GaConfig { population_size: 40, generations: 60, seed: 2024, ..GaConfig::default() };
    let strip_time = |csv: String| -> String {
        csv.lines()
            .map(|line| {
                if line.starts_with("instance,") || line.starts_with('#') {
                    return line.to_string();
                }
                let mut fields: Vec<&str> = line.split(',').collect();
                fields[5] = "-";
                fields.join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let run = |workers: usize| -> String {
        let report = run_benchmark(&instances, &config, 5, workers).unwrap();
        strip_time(emit_report(&report, ReportFormat::Csv))
    };
    let first = run(1);
    assert_eq!(first, run(1), "reruns with the same seed differ");
    assert_eq!(first, run(8), "worker counts 1 and 8 differ");
}

/// Ratio formula reduction: with one constraint and unit multipliers the
/// ratio is bit-exactly value over weight, and on 1000 random instances
/// the rank order survives the divide-by-m toggle and uniform rescaling.
#[test]
fn single_constraint_ratios_reduce_to_value_over_weight_and_ranking_survives_rescaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    for case in 0..1_000u64 {
        let n = rng.gen_range(2..=40);
        let m = rng.gen_range(1..=6);
        let inst = random_instance(format!("ratio-{case}"), n, m, 0.5, 77_000 + case);

        if m == 1 {
            let unit = init_multipliers(&inst);
            let ratios = compute_ratios(&inst, &unit, true);
            for i in 0..n {
                let exact = inst.value(i) / inst.weight(0, i);
                assert_eq!(ratios.ratios()[i], exact, "case {case}, object {i}");
            }
        }

        let mult = compute_multipliers(&inst, 20, 0.5);
        let reference = compute_ratios(&inst, &mult, true);
        assert_eq!(
            compute_ratios(&inst, &mult, false).order(),
            reference.order(),
            "case {case}: divide-by-m toggle reordered"
        );
        for scale in [0.0009765625, 0.5, 2.0, 1024.0] {
            let scaled = Multipliers::from_weights(
                &inst,
                mult.weights().iter().map(|&l| l * scale).collect(),
            );
            assert_eq!(
                compute_ratios(&inst, &scaled, true).order(),
                reference.order(),
                "case {case}: rescaling by {scale} reordered"
            );
        }
    }
}

/// Parser golden tests: the fixture parses field-identically under both
/// grammars, and malformed streams are rejected with positioned errors.
#[test]
fn fixture_files_parse_identically_in_both_grammars_and_errors_carry_positions() {
    let weing = parse_weing(T1_WEING, "T1").unwrap();
    let orlib = parse_orlib(T1_ORLIB, "T1").unwrap();
    assert_eq!(orlib.len(), 1);
    let twin = &orlib[0];
    assert_eq!(weing.n(), twin.n());
    assert_eq!(weing.m(), twin.m());
    assert_eq!(weing.values(), twin.values());
    for j in 0..weing.m() {
        assert_eq!(weing.weight_row(j), twin.weight_row(j));
    }
    assert_eq!(weing.capacities(), twin.capacities());
    assert_eq!(weing.known_optimum(), twin.known_optimum());
    assert_eq!(weing.known_optimum(), Some(22.0));

    // One token short of the bare form.
    assert_eq!(
        parse_weing("2 1  5 5  1 1", "short").unwrap_err(),
        ParseError::TokenCount { expected: 7, with_optimum: 8, found: 6 }
    );
    // Negative value at token 4.
    assert_eq!(
        parse_weing("3 2  6 -10 12  1 2 3  2 2 2  5 5", "neg").unwrap_err(),
        ParseError::Negative { what: "value", pos: 4, value: -10.0 }
    );
    // Negative capacity in an orlib stream, position counted from the start.
    let err = parse_orlib("1  1 1 0  5  1  -1", "neg").unwrap_err();
    assert_eq!(err, ParseError::Negative { what: "capacity", pos: 7, value: -1.0 });
}
