//! Command-line front end for the transform library: build circuits, run
//! them exactly or by sampling, rewrite coherent tails into the
//! measurement-driven form, and compare readout distributions.
//!
//! Exit codes: 0 on success, 1 on a usage error (unknown flags, values out
//! of range, missing arguments), 2 on a domain error (missing or malformed
//! files, pattern not found, invalid parameter combinations). All output is
//! deterministic for a fixed command line, including seeds.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use semiqft::{
    build_coherent_qft, build_semiclassical_qft, equivalence_report, periodic_state,
    rewrite_semiclassical, run_exact, run_trajectory, Circuit, Complex64, OutcomeDistribution,
    StateVector,
};

/// Largest wire index accepted by `build` and `demo-period`: a transform on
/// `s + 1` wires explores up to `2^(s+1)` measurement branches, and this cap
/// keeps the worst case comfortably interactive.
const MAX_CLI_S: i64 = 14;

/// Qubit cap when `compare` enumerates every computational-basis input.
const MAX_ENUMERATED_QUBITS: usize = 15;

/// Random superpositions appended to the basis states when `compare` runs
/// without an explicit `--inputs` choice, and used alone for
/// `--inputs random`.
const DEFAULT_RANDOM_INPUTS: usize = 20;

/// Width of the longest histogram bar, in characters.
const BAR_WIDTH: usize = 40;

#[derive(Parser)]
#[command(
    name = "semiqft",
    version,
    about = "Build, simulate, rewrite, and compare Fourier-transform circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a transform circuit and write it to a JSON file
    Build(BuildArgs),
    /// Run a circuit file on an input state, exactly or by sampling
    Simulate(SimulateArgs),
    /// Replace a terminal coherent transform with the measurement-driven form
    Rewrite(RewriteArgs),
    /// Compare the exact readout distributions of two circuit files
    Compare(CompareArgs),
    /// Transform a period-r input state and annotate the readout peaks
    DemoPeriod(DemoPeriodArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitKind {
    /// Controlled-phase ladder with every measurement at the end
    Coherent,
    /// Classically controlled splits driven by earlier measurements
    Semiclassical,
}

#[derive(Args)]
struct BuildArgs {
    /// Which construction to build
    #[arg(long, value_enum)]
    kind: CircuitKind,
    /// Highest wire index; the circuit acts on s + 1 qubits
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=MAX_CLI_S))]
    s: u8,
    /// Path the circuit JSON is written to
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true))]
struct SimulateArgs {
    /// Circuit JSON file to run
    #[arg(long = "in", value_name = "PATH")]
    circuit: PathBuf,
    /// Enumerate every measurement branch and print exact probabilities
    #[arg(long, group = "mode")]
    exact: bool,
    /// Sample this many trajectories and print outcome counts
    #[arg(long, group = "mode", value_name = "INT",
          value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,
    /// Start in this computational-basis state [default: 0]
    #[arg(long, value_name = "INT", conflicts_with = "input_amps")]
    input_basis: Option<u64>,
    /// Read the input amplitudes from a JSON array of [re, im] pairs
    #[arg(long, value_name = "PATH")]
    input_amps: Option<PathBuf>,
    /// Base seed for sampling; shot i runs with seed + i
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    /// Print the distribution as a JSON object instead of a histogram
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RewriteArgs {
    /// Circuit JSON file to rewrite
    #[arg(long = "in", value_name = "PATH")]
    circuit: PathBuf,
    /// Path the rewritten circuit is written to
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Also write a JSON accounting of the rewrite to this path
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// First circuit file
    #[arg(long, value_name = "PATH")]
    a: PathBuf,
    /// Second circuit file
    #[arg(long, value_name = "PATH")]
    b: PathBuf,
    /// Input states: "basis", "random", or "file:PATH" [default: every
    /// basis state plus 20 seeded random superpositions]
    #[arg(long, value_name = "SPEC", value_parser = parse_input_spec)]
    inputs: Option<InputSpec>,
    /// Base seed for the random superpositions; input i uses seed + i
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    /// Print the report as a JSON object instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Debug)]
enum InputSpec {
    Basis,
    Random,
    File(PathBuf),
}

fn parse_input_spec(text: &str) -> Result<InputSpec, String> {
    match text {
        "basis" => Ok(InputSpec::Basis),
        "random" => Ok(InputSpec::Random),
        other => match other.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(InputSpec::File(PathBuf::from(path))),
            _ => Err(format!(
                "expected \"basis\", \"random\", or \"file:PATH\", got \"{other}\""
            )),
        },
    }
}

#[derive(Args)]
struct DemoPeriodArgs {
    /// Highest wire index; the state lives on s + 1 qubits
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=MAX_CLI_S))]
    s: u8,
    /// Period of the prepared input state
    #[arg(long, value_name = "INT", value_parser = clap::value_parser!(u64).range(1..))]
    r: u64,
    /// Index of the first populated basis state [default: 0]
    #[arg(long, value_name = "INT", default_value_t = 0)]
    offset: u64,
    /// Print the distribution as a JSON object instead of a histogram
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Build(args) => cmd_build(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Rewrite(args) => cmd_rewrite(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::DemoPeriod(args) => cmd_demo_period(&args),
    }
}

fn cmd_build(args: &BuildArgs) -> Result<(), String> {
    let s = usize::from(args.s);
    let (circuit, kind_name) = match args.kind {
        CircuitKind::Coherent => (build_coherent_qft(s), "coherent"),
        CircuitKind::Semiclassical => (build_semiclassical_qft(s), "semiclassical"),
    };
    write_file(&args.out, &circuit.to_json())?;
    let counts = circuit.gate_counts();
    println!(
        "wrote {kind_name} transform for s={s}: {} qubits, {} instructions \
         ({} one-bit, {} two-bit, {} classically controlled, {} measurements) -> {}",
        circuit.n_qubits(),
        circuit.len(),
        counts.one_bit,
        counts.two_bit,
        counts.classically_controlled,
        counts.measurements,
        args.out.display()
    );
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), String> {
    let circuit = read_circuit(&args.circuit)?;
    let input = simulate_input(&circuit, args)?;
    if args.exact {
        let dist = run_exact(&circuit, &input).map_err(|e| e.to_string())?;
        if args.json {
            println!("{}", pretty(&probability_map(&dist)));
        } else {
            println!(
                "exact readout distribution: {} classical bits, {} outcomes",
                dist.n_cbits(),
                dist.probabilities().len()
            );
            print!("{}", probability_histogram(&dist, None));
        }
    } else {
        let shots = args.shots.expect("the mode group guarantees --shots here");
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for i in 0..shots {
            let trajectory = run_trajectory(&circuit, &input, args.seed.wrapping_add(i))
                .map_err(|e| e.to_string())?;
            *counts.entry(trajectory.readout_integer()).or_insert(0) += 1;
        }
        if args.json {
            println!("{}", pretty(&count_map(&counts)));
        } else {
            println!("sampled readout counts: {shots} shots, seed {}", args.seed);
            print!("{}", count_histogram(&counts));
        }
    }
    Ok(())
}

/// Resolves the simulation input state: an amplitude file if given, else a
/// computational-basis state (index 0 by default).
fn simulate_input(circuit: &Circuit, args: &SimulateArgs) -> Result<StateVector, String> {
    if let Some(path) = &args.input_amps {
        return read_amplitudes(path);
    }
    let index = usize::try_from(args.input_basis.unwrap_or(0))
        .map_err(|_| "basis index does not fit this platform's address space".to_string())?;
    StateVector::basis(circuit.n_qubits(), index).map_err(|e| e.to_string())
}

fn cmd_rewrite(args: &RewriteArgs) -> Result<(), String> {
    let circuit = read_circuit(&args.circuit)?;
    let (rewritten, report) = rewrite_semiclassical(&circuit).map_err(|e| e.to_string())?;
    write_file(&args.out, &rewritten.to_json())?;
    if let Some(report_path) = &args.report {
        write_file(
            report_path,
            &pretty(&serde_json::to_value(report).expect("report is plain data")),
        )?;
    }
    println!(
        "rewrote terminal transform: removed {} two-qubit gates, added {} classically \
         controlled splits, kept {} measurements -> {}",
        report.two_bit_gates_removed,
        report.classically_controlled_gates_added,
        report.measurements,
        args.out.display()
    );
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), String> {
    let circuit_a = read_circuit(&args.a)?;
    let circuit_b = read_circuit(&args.b)?;
    let (labels, inputs) = compare_inputs(&circuit_a, args)?;
    let report = equivalence_report(&circuit_a, &circuit_b, &inputs).map_err(|e| e.to_string())?;
    if args.json {
        let value = serde_json::json!({
            "labels": labels,
            "per_input": report.per_input,
            "max_tv": report.max_tv,
            "worst_input": report.worst_input,
        });
        println!("{}", pretty(&value));
    } else {
        let width = labels.iter().map(String::len).max().unwrap_or(0);
        for (label, tv) in labels.iter().zip(&report.per_input) {
            println!("  {label:<width$}  tv={tv:.6e}");
        }
        match report.worst_input {
            Some(i) => {
                println!(
                    "max total variation = {:.6e} ({})",
                    report.max_tv, labels[i]
                );
            }
            None => println!("max total variation = 0 (no inputs)"),
        }
    }
    Ok(())
}

/// Builds the labeled input set for `compare`. The default is every
/// computational-basis state followed by seeded random superpositions, so
/// agreement is checked on states with and without interference structure.
fn compare_inputs(
    circuit: &Circuit,
    args: &CompareArgs,
) -> Result<(Vec<String>, Vec<StateVector>), String> {
    let n = circuit.n_qubits();
    match &args.inputs {
        Some(InputSpec::File(path)) => {
            let states = read_state_list(path)?;
            let labels = (0..states.len()).map(|i| format!("state {i}")).collect();
            Ok((labels, states))
        }
        Some(InputSpec::Basis) => basis_inputs(n),
        Some(InputSpec::Random) => random_inputs(n, args.seed, DEFAULT_RANDOM_INPUTS),
        None => {
            let (mut labels, mut states) = basis_inputs(n)?;
            let (random_labels, random_states) =
                random_inputs(n, args.seed, DEFAULT_RANDOM_INPUTS)?;
            labels.extend(random_labels);
            states.extend(random_states);
            Ok((labels, states))
        }
    }
}

fn basis_inputs(n: usize) -> Result<(Vec<String>, Vec<StateVector>), String> {
    if n > MAX_ENUMERATED_QUBITS {
        return Err(format!(
            "circuit acts on {n} qubits; enumerating all basis inputs is supported only up \
             to {MAX_ENUMERATED_QUBITS} (pass --inputs random or --inputs file:PATH)"
        ));
    }
    let mut labels = Vec::new();
    let mut states = Vec::new();
    for a in 0..(1usize << n) {
        labels.push(format!("basis {a}"));
        states.push(StateVector::basis(n, a).map_err(|e| e.to_string())?);
    }
    Ok((labels, states))
}

fn random_inputs(
    n: usize,
    seed: u64,
    count: usize,
) -> Result<(Vec<String>, Vec<StateVector>), String> {
    let mut labels = Vec::new();
    let mut states = Vec::new();
    for i in 0..count {
        labels.push(format!("random {i}"));
        states
            .push(StateVector::random(n, seed.wrapping_add(i as u64)).map_err(|e| e.to_string())?);
    }
    Ok((labels, states))
}

fn cmd_demo_period(args: &DemoPeriodArgs) -> Result<(), String> {
    let s = usize::from(args.s);
    let r = usize::try_from(args.r)
        .map_err(|_| "period does not fit this platform's address space".to_string())?;
    let offset = usize::try_from(args.offset)
        .map_err(|_| "offset does not fit this platform's address space".to_string())?;
    let input = periodic_state(s, r, offset).map_err(|e| e.to_string())?;
    let circuit = build_semiclassical_qft(s);
    let dist = run_exact(&circuit, &input).map_err(|e| e.to_string())?;
    let q = dist.probabilities().len();
    let peaks: Option<Vec<usize>> = if q % r == 0 {
        Some((0..r).map(|k| k * (q / r)).collect())
    } else {
        None
    };
    if args.json {
        let value = serde_json::json!({
            "s": s,
            "r": r,
            "offset": offset,
            "q": q,
            "distribution": probability_map(&dist),
            "peaks": peaks,
        });
        println!("{}", pretty(&value));
    } else {
        println!(
            "period-{r} input on {} qubits (q = {q}), transformed and measured:",
            s + 1
        );
        print!("{}", probability_histogram(&dist, peaks.as_deref()));
        match &peaks {
            Some(list) => {
                let positions = list
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(", ");
                println!("peaks at multiples of q/r = {}: {positions}", q / r);
            }
            None => println!(
                "note: r = {r} does not divide q = {q}; weight concentrates near multiples \
                 of q/r ~= {:.3}",
                q as f64 / r as f64
            ),
        }
    }
    Ok(())
}

fn read_circuit(path: &Path) -> Result<Circuit, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Circuit::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    let mut text = contents.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Loads one state from a JSON array of `[re, im]` pairs, one per amplitude.
fn read_amplitudes(path: &Path) -> Result<StateVector, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| {
        format!(
            "{}: expected a JSON array of [re, im] pairs: {e}",
            path.display()
        )
    })?;
    let amps = pairs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    StateVector::from_amplitudes(amps).map_err(|e| format!("{}: {e}", path.display()))
}

/// Loads a list of states from a JSON array of states, each itself an array
/// of `[re, im]` pairs.
fn read_state_list(path: &Path) -> Result<Vec<StateVector>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let lists: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).map_err(|e| {
        format!(
            "{}: expected a JSON array of states, each an array of [re, im] pairs: {e}",
            path.display()
        )
    })?;
    if lists.is_empty() {
        return Err(format!("{}: the state list is empty", path.display()));
    }
    lists
        .into_iter()
        .enumerate()
        .map(|(i, pairs)| {
            let amps = pairs
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect();
            StateVector::from_amplitudes(amps)
                .map_err(|e| format!("{}: state {i}: {e}", path.display()))
        })
        .collect()
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values serialize")
}

/// `{"outcome": probability}` with keys in ascending outcome order.
fn probability_map(dist: &OutcomeDistribution) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (c, &p) in dist.probabilities().iter().enumerate() {
        map.insert(c.to_string(), serde_json::Value::from(p));
    }
    serde_json::Value::Object(map)
}

/// `{"outcome": count}` with keys in ascending outcome order; outcomes that
/// were never observed are omitted.
fn count_map(counts: &BTreeMap<usize, u64>) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (&c, &n) in counts {
        map.insert(c.to_string(), serde_json::Value::from(n));
    }
    serde_json::Value::Object(map)
}

/// One row per outcome: index, probability, and a bar scaled so the largest
/// probability fills `BAR_WIDTH` characters. Rows listed in `peaks` get a
/// trailing marker.
fn probability_histogram(dist: &OutcomeDistribution, peaks: Option<&[usize]>) -> String {
    let probs = dist.probabilities();
    let label_width = digits(probs.len().saturating_sub(1));
    let max = probs.iter().copied().fold(0.0_f64, f64::max);
    let mut out = String::new();
    for (c, &p) in probs.iter().enumerate() {
        let bar = bar(p, max);
        let mut line = format!("  c={c:>label_width$}  p={p:.6}");
        if !bar.is_empty() {
            line.push_str("  ");
            line.push_str(&bar);
        }
        if peaks.is_some_and(|list| list.contains(&c)) {
            line.push_str("  <- peak");
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// One row per observed outcome: index, count, and a bar scaled so the
/// largest count fills `BAR_WIDTH` characters.
fn count_histogram(counts: &BTreeMap<usize, u64>) -> String {
    let label_width = digits(counts.keys().next_back().copied().unwrap_or(0));
    let largest = counts.values().max().copied().unwrap_or(0);
    let count_width = digits(usize::try_from(largest).unwrap_or(usize::MAX));
    let mut out = String::new();
    for (&c, &n) in counts {
        let bar = bar(n as f64, largest as f64);
        let mut line = format!("  c={c:>label_width$}  n={n:>count_width$}");
        if !bar.is_empty() {
            line.push_str("  ");
            line.push_str(&bar);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn bar(value: f64, max: f64) -> String {
    if max <= 0.0 {
        return String::new();
    }
    let len = ((value / max) * BAR_WIDTH as f64).round() as usize;
    "#".repeat(len.min(BAR_WIDTH))
}

fn digits(mut n: usize) -> usize {
    let mut width = 1;
    while n >= 10 {
        n /= 10;
        width += 1;
    }
    width
}
