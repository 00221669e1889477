//! Command-line front end: solve, bench, oracle, ratios, and gen
//! subcommands over weing- and orlib-format instance files.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage or parse
//! error, 3 exact-search guard refusal.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mknap::{
    compute_multipliers, compute_ratios, emit_report, emit_trials_csv, evolve, parse_orlib,
    parse_weing, percent_gap, random_instance, run_benchmark, solve_exact, solve_exact_unguarded,
    GaConfig, Instance, ReportFormat, GUARD_LIMIT,
};

#[derive(Parser)]
#[command(name = "mknap", version, about = "0/1 multidimensional knapsack solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every instance in a file with the genetic algorithm
    Solve(SolveArgs),
    /// Run repeated seeded trials over instance files and report solve rates
    Bench(BenchArgs),
    /// Compute the exact optimum by branch and bound (small instances)
    Oracle(OracleArgs),
    /// Show the Lagrangian multipliers, dual bound, and utility ratio table
    Ratios(RatiosArgs),
    /// Emit a random instance in weing format
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Single instance: n m, values, weight rows, capacities, optional optimum
    Weing,
    /// Multi-instance: count, then per problem n m reference and the body
    Orlib,
}

#[derive(Args)]
struct InputArgs {
    /// Instance file
    path: PathBuf,
    /// Format as a bare second word, shorthand for --format
    #[arg(value_enum, value_name = "FORMAT", conflicts_with = "format")]
    format_pos: Option<Format>,
    /// Instance file format
    #[arg(long, value_enum, default_value = "weing")]
    format: Format,
}

impl InputArgs {
    fn format(&self) -> Format {
        self.format_pos.unwrap_or(self.format)
    }
}

#[derive(Args)]
struct GaFlags {
    /// Individuals per generation
    #[arg(long, default_value_t = 100)]
    population: usize,
    /// Maximum generations to run
    #[arg(long, default_value_t = 500)]
    generations: usize,
    /// Probability a bit starts set in the initial population
    #[arg(long, default_value_t = 0.5)]
    inclusion_probability: f64,
    /// Per-bit flip probability after crossover (default: 1/n)
    #[arg(long)]
    mutation_rate: Option<f64>,
    /// Individuals drawn (with replacement) per tournament
    #[arg(long, default_value_t = 3)]
    tournament: usize,
    /// Best individuals carried over unchanged each generation
    #[arg(long, default_value_t = 2)]
    elite: usize,
    /// Stop after this many generations without improvement; 0 disables
    #[arg(long, default_value_t = 200)]
    no_improvement_limit: usize,
    /// Base random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Use the raw weighted denominator instead of dividing it by m
    #[arg(long)]
    no_divide_by_m: bool,
    /// Subgradient iterations for the multiplier precomputation; 0 keeps unit weights
    #[arg(long, default_value_t = 100)]
    multiplier_iters: usize,
    /// Initial subgradient step size
    #[arg(long, default_value_t = 0.5)]
    multiplier_step: f64,
    /// Print the effective configuration before running
    #[arg(long)]
    print_config: bool,
}

impl GaFlags {
    fn to_config(&self) -> GaConfig {
        GaConfig {
            population_size: self.population,
            generations: self.generations,
            inclusion_probability: self.inclusion_probability,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament,
            elite_count: self.elite,
            no_improvement_limit: match self.no_improvement_limit {
                0 => None,
                limit => Some(limit),
            },
            seed: self.seed,
            divide_by_m: !self.no_divide_by_m,
            multiplier_iterations: self.multiplier_iters,
            multiplier_step: self.multiplier_step,
        }
    }

    fn print_effective(&self) {
        let config = self.to_config();
        println!("population: {}", config.population_size);
        println!("generations: {}", config.generations);
        println!("inclusion-probability: {}", config.inclusion_probability);
        match config.mutation_rate {
            Some(rate) => println!("mutation-rate: {rate}"),
            None => println!("mutation-rate: 1/n"),
        }
        println!("tournament: {}", config.tournament_size);
        println!("elite: {}", config.elite_count);
        match config.no_improvement_limit {
            Some(limit) => println!("no-improvement-limit: {limit}"),
            None => println!("no-improvement-limit: none"),
        }
        println!("seed: {}", config.seed);
        println!("divide-by-m: {}", config.divide_by_m);
        println!("multiplier-iters: {}", config.multiplier_iterations);
        println!("multiplier-step: {}", config.multiplier_step);
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    ga: GaFlags,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files and/or directories of instance files
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Instance file format
    #[arg(long, value_enum, default_value = "weing")]
    format: Format,
    /// Independent runs per instance
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Emit csv instead of the aligned table on stdout
    #[arg(long)]
    csv: bool,
    /// Also emit one csv line per trial on stdout
    #[arg(long)]
    per_trial: bool,
    /// Write the aggregate csv to this file instead of printing a report
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(flatten)]
    ga: GaFlags,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Run the exponential search even above the size guard
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RatiosArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Subgradient iterations; 0 keeps unit weights
    #[arg(long, default_value_t = 100)]
    multiplier_iters: usize,
    /// Initial subgradient step size
    #[arg(long, default_value_t = 0.5)]
    multiplier_step: f64,
    /// Use the raw weighted denominator instead of dividing it by m
    #[arg(long)]
    no_divide_by_m: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Object count
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Constraint count
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    /// Random seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Capacity as a fraction of each constraint's total weight
    #[arg(long, default_value_t = 0.5)]
    tightness: f64,
}

enum CliError {
    Usage(String),
    Io(String),
    Guard(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Guard(_) => 3,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(msg)
            | CliError::Io(msg)
            | CliError::Guard(msg)
            | CliError::Internal(msg) => msg,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Ratios(args) => cmd_ratios(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|err| CliError::Io(format!("{}: {err}", path.display())))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string()
}

fn load_instances(path: &Path, format: Format) -> Result<Vec<Instance>, CliError> {
    let text = read_text(path)?;
    let stem = file_stem(path);
    let parsed = match format {
        Format::Weing => parse_weing(&text, &stem).map(|inst| vec![inst]),
        Format::Orlib => parse_orlib(&text, &stem),
    };
    parsed.map_err(|err| CliError::Usage(format!("{}: {err}", path.display())))
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let instances = load_instances(&args.input.path, args.input.format())?;
    if args.ga.print_config {
        args.ga.print_effective();
    }
    let config = args.ga.to_config();
    for instance in &instances {
        let result = evolve(instance, &config)
            .map_err(|err| CliError::Usage(err.to_string()))?;
        println!("instance: {}", instance.name());
        println!("best: {}", fmt_num(result.best.value()));
        if let Some(optimum) = instance.known_optimum() {
            let gap = percent_gap(result.best.value(), optimum)
                .map_err(|err| CliError::Internal(err.to_string()))?;
            println!("gap: {}%", fmt_num(gap));
        }
        println!("generation: {}", result.generation_found);
        println!("time: {:.3}s", result.elapsed.as_secs_f64());
        let selected: Vec<String> = result
            .best
            .selection()
            .indices()
            .into_iter()
            .map(|i| i.to_string())
            .collect();
        println!("selected: {}", selected.join(" "));
    }
    Ok(())
}

fn collect_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = fs::read_dir(path)
                .map_err(|err| CliError::Io(format!("{}: {err}", path.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let files = collect_files(&args.paths)?;
    let mut instances = Vec::new();
    for file in &files {
        match load_instances(file, args.format) {
            Ok(parsed) => instances.extend(parsed),
            Err(err) => eprintln!("warning: skipping {}", err.message()),
        }
    }
    if instances.is_empty() {
        return Err(CliError::Usage("no valid instances to benchmark".into()));
    }
    if args.ga.print_config {
        args.ga.print_effective();
    }
    let config = args.ga.to_config();
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    if args.trials == 0 || workers == 0 {
        return Err(CliError::Usage("trials and workers must be at least 1".into()));
    }
    let report = run_benchmark(&instances, &config, args.trials, workers)
        .map_err(|err| CliError::Usage(err.to_string()))?;
    match &args.output {
        Some(path) => {
            fs::write(path, emit_report(&report, ReportFormat::Csv))
                .map_err(|err| CliError::Io(format!("{}: {err}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let format = if args.csv { ReportFormat::Csv } else { ReportFormat::Table };
            print!("{}", emit_report(&report, format));
        }
    }
    if args.per_trial {
        print!("{}", emit_trials_csv(&report));
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let instances = load_instances(&args.input.path, args.input.format())?;
    for instance in &instances {
        let (value, selection) = if args.force {
            if instance.n() > GUARD_LIMIT {
                eprintln!(
                    "warning: {} objects exceeds the guard of {GUARD_LIMIT}; this search is exponential",
                    instance.n()
                );
            }
            solve_exact_unguarded(instance)
        } else {
            solve_exact(instance).map_err(|err| CliError::Guard(err.to_string()))?
        };
        println!("instance: {}", instance.name());
        println!("optimum: {}", fmt_num(value));
        let selected: Vec<String> =
            selection.indices().into_iter().map(|i| i.to_string()).collect();
        println!("selected: {}", selected.join(" "));
    }
    Ok(())
}

fn cmd_ratios(args: RatiosArgs) -> Result<(), CliError> {
    if args.multiplier_step <= 0.0 {
        return Err(CliError::Usage(format!(
            "multiplier step {} must be positive",
            args.multiplier_step
        )));
    }
    let instances = load_instances(&args.input.path, args.input.format())?;
    let divide_by_m = !args.no_divide_by_m;
    for instance in &instances {
        let mult = compute_multipliers(instance, args.multiplier_iters, args.multiplier_step);
        let ratios = compute_ratios(instance, &mult, divide_by_m);
        let mut rank = vec![0usize; instance.n()];
        for (position, &object) in ratios.order().iter().enumerate() {
            rank[object] = position + 1;
        }
        println!("instance: {}", instance.name());
        let weights: Vec<String> = mult.weights().iter().map(|&l| fmt_num(l)).collect();
        println!("multipliers: {}", weights.join(" "));
        println!("best_bound: {}", fmt_num(mult.best_bound()));
        println!(
            "{:<8} {:<12} {:<14} {:<12} rank",
            "object", "value", "denominator", "ratio"
        );
        let scale = if divide_by_m { instance.m() as f64 } else { 1.0 };
        for i in 0..instance.n() {
            let raw: f64 = mult
                .weights()
                .iter()
                .enumerate()
                .map(|(j, &l)| l * instance.weight(j, i))
                .sum();
            println!(
                "{:<8} {:<12} {:<14} {:<12} {}",
                i,
                fmt_num(instance.value(i)),
                fmt_num(raw / scale),
                fmt_num(ratios.ratios()[i]),
                rank[i],
            );
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    if !(args.tightness > 0.0 && args.tightness.is_finite()) {
        return Err(CliError::Usage(format!(
            "tightness {} must be positive and finite",
            args.tightness
        )));
    }
    let name = format!("gen-n{}-m{}-s{}", args.n, args.m, args.seed);
    let instance = random_instance(name, args.n as usize, args.m as usize, args.tightness, args.seed);
    print!("{}", instance.to_weing_string());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
