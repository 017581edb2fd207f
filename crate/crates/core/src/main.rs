use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treecut::branch::{leaf_bound, solve_decision, solve_min, SolveOptions, RHO};
use treecut::gmwct::solve_wgmwct;
use treecut::io::{parse_cut, parse_instance, write_instance};
use treecut::model::{root_forest, verify_cut, CutSet, Instance, Mode};
use treecut::oracle::{generate, GenSpec, TreeShape};
use treecut::reduce::{check_reduced, reduce_to_fixpoint_counted, reduced_instance, ReductionCounts};

#[derive(Parser)]
#[command(name = "treecut", version, about = "Exact multicut and multiway cut on trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance: decide a budget with --k, or minimize with --min.
    Solve(SolveArgs),
    /// Apply the reduction rules and print the reduced instance.
    Reduce(ReduceArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// Check that a cut separates every request.
    Verify(VerifyArgs),
    /// Solve a sweep of random instances and print CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file, `-` for standard input.
    #[arg(long, short)]
    input: PathBuf,
    /// Budget for the decision version; defaults to the file's `k` line.
    #[arg(long, conflicts_with = "min")]
    k: Option<u64>,
    /// Find a minimum cut.
    #[arg(long)]
    min: bool,
    /// Solver route: `mct` sends terminal-set instances through the
    /// branching solver instead of the dynamic program.
    #[arg(long)]
    mode: Option<ModeArg>,
    /// More than one thread explores the first branching in parallel.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Print the JSON report on standard output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Budget; defaults to the file's `k` line.
    #[arg(long)]
    k: Option<usize>,
    /// Print a JSON record (holding the instance text) instead of the file.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    edges: usize,
    #[arg(long, default_value_t = 4)]
    requests: usize,
    #[arg(long, value_enum, default_value_t = ShapeArg::Random)]
    shape: ShapeArg,
    /// Named gadget instance; overrides the other shape options.
    #[arg(long)]
    gadget: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Mct)]
    mode: ModeArg,
    /// Number of terminal sets.
    #[arg(long, default_value_t = 2)]
    q: usize,
    #[arg(long, default_value_t = 100)]
    max_cost: u64,
    /// Budget line to append.
    #[arg(long)]
    k: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// List the gadget names and exit.
    #[arg(long)]
    list_gadgets: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Cut file: one `<u> <v>` line per cut edge.
    #[arg(long)]
    cut: PathBuf,
    /// Also require the cut to cost at most this much.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest edge count.
    #[arg(long, default_value_t = 10)]
    from: usize,
    /// Largest edge count.
    #[arg(long, default_value_t = 40)]
    to: usize,
    #[arg(long, default_value_t = 10)]
    step: usize,
    /// Requests per instance; defaults to the edge count.
    #[arg(long)]
    requests: Option<usize>,
    /// Instances per size.
    #[arg(long, default_value_t = 3)]
    count: u64,
    #[arg(long, value_enum, default_value_t = ShapeArg::Random)]
    shape: ShapeArg,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Mct,
    Gmwct,
    Wgmwct,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Mct => Mode::Mct,
            ModeArg::Gmwct => Mode::Gmwct,
            ModeArg::Wgmwct => Mode::Wgmwct,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Random,
    Star,
    Caterpillar,
}

impl From<ShapeArg> for TreeShape {
    fn from(s: ShapeArg) -> TreeShape {
        match s {
            ShapeArg::Random => TreeShape::RandomTree,
            ShapeArg::Star => TreeShape::Star,
            ShapeArg::Caterpillar => TreeShape::Caterpillar,
        }
    }
}

/// Input and usage problems; reported with exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        return Ok(std::io::read_to_string(std::io::stdin())?);
    }
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn cut_pairs(cut: &CutSet, inst: &Instance) -> Vec<[usize; 2]> {
    cut.iter()
        .map(|e| {
            let (a, b) = inst.edge(e);
            [a + 1, b + 1]
        })
        .collect()
}

fn emit(json: bool, report: &Value) {
    if json {
        // A closed pipe downstream is not our error.
        let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(report).unwrap());
    }
}

fn solve(a: SolveArgs) -> Outcome {
    let inst = load(&a.input)?;
    let mode = inst.mode();
    let route = a.mode.map(Mode::from).unwrap_or(mode);
    if route == Mode::Mct && mode == Mode::Wgmwct {
        return Err(Failure("the branching solver handles unit costs only".into()));
    }
    if route != Mode::Mct && mode == Mode::Mct {
        return Err(Failure(format!("an mct instance cannot be solved as {}", route.as_str())));
    }
    let k = if a.min { None } else { a.k.or(inst.k().map(|k| k as u64)) };
    let opts = SolveOptions { parallel: a.threads > 1, ..SolveOptions::default() };
    let start = Instant::now();
    let (status, cut, stats) = if route == Mode::Mct {
        match k {
            Some(k) => {
                let (cut, stats) = solve_decision(&inst, k as usize, &opts);
                let status = if cut.is_some() { "yes" } else { "no" };
                (status, cut, serde_json::to_value(&stats)?)
            }
            None => {
                let (_, cut, stats) = solve_min(&inst, &opts);
                ("optimal", Some(cut), serde_json::to_value(&stats)?)
            }
        }
    } else {
        let (cost, cut, stats) = solve_wgmwct(&inst)?;
        let stats = serde_json::to_value(&stats)?;
        match k {
            Some(k) if cost > k => ("no", None, stats),
            Some(_) => ("yes", Some(cut), stats),
            None => ("optimal", Some(cut), stats),
        }
    };
    let secs = start.elapsed().as_secs_f64();
    let report = json!({
        "status": status,
        "mode": mode.as_str(),
        "solver": if route == Mode::Mct { "branch" } else { "dp" },
        "k": k,
        "size": cut.as_ref().map(|c| c.len()),
        "cost": cut.as_ref().map(|c| c.cost(&inst)),
        "cut": cut.as_ref().map(|c| cut_pairs(c, &inst)),
        "stats": stats,
        "time_s": secs,
    });
    match &cut {
        Some(c) => eprintln!("{status}: {} edges, cost {}, {secs:.3}s", c.len(), c.cost(&inst)),
        None => eprintln!("{status}: no cut within budget, {secs:.3}s"),
    }
    emit(a.json, &report);
    Ok(if status == "no" { 1 } else { 0 })
}

fn reduce(a: ReduceArgs) -> Outcome {
    let inst = load(&a.input)?;
    if inst.mode() == Mode::Wgmwct {
        return Err(Failure("the reduction rules assume unit costs".into()));
    }
    let mut forest = root_forest(&inst, None);
    forest.set_budget(a.k.or(inst.k()));
    let mut counts = ReductionCounts::default();
    let out = reduce_to_fixpoint_counted(&mut forest, &mut counts);
    let forced = CutSet(forest.committed_cut().iter().copied().collect());
    let infeasible = out.is_infeasible();
    let (reduced, _) = reduced_instance(&forest);
    let text = write_instance(&reduced);
    eprintln!(
        "{}: {} forced cuts, {} contractions, {} vertices left",
        if infeasible { "infeasible" } else { "reduced" },
        forced.len(),
        out.contractions,
        reduced.n()
    );
    if a.json {
        let violations: Vec<String> = check_reduced(&forest).iter().map(|v| format!("{v:?}")).collect();
        let report = json!({
            "status": if infeasible { "no" } else { "reduced" },
            "forced_cuts": cut_pairs(&forced, &inst),
            "contractions": out.contractions,
            "rules": counts.fired,
            "violations": violations,
            "instance": text,
        });
        emit(true, &report);
    } else {
        print!("{text}");
    }
    Ok(if infeasible { 1 } else { 0 })
}

fn gen(a: GenArgs) -> Outcome {
    if a.list_gadgets {
        for name in treecut::gadgets::GADGET_NAMES {
            println!("{name}");
        }
        return Ok(0);
    }
    let shape = match a.gadget {
        Some(name) => TreeShape::Gadget(name),
        None => a.shape.into(),
    };
    let spec = GenSpec {
        seed: a.seed,
        edges: a.edges,
        requests: a.requests,
        shape,
        mode: a.mode.into(),
        q: a.q,
        max_cost: a.max_cost,
    };
    let inst = generate(&spec)?.with_k(a.k);
    let text = write_instance(&inst);
    match a.output {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn verify(a: VerifyArgs) -> Outcome {
    let inst = load(&a.input)?;
    let cut = parse_cut(&read(&a.cut)?, &inst).map_err(|e| Failure(format!("{}: {e}", a.cut.display())))?;
    let separates = verify_cut(&inst, &cut);
    let within = a.k.is_none_or(|k| cut.cost(&inst) <= k);
    let valid = separates && within;
    eprintln!(
        "{}: {} edges, cost {}",
        if valid { "valid" } else { "invalid" },
        cut.len(),
        cut.cost(&inst)
    );
    let report = json!({
        "status": if valid { "valid" } else { "invalid" },
        "separates": separates,
        "size": cut.len(),
        "cost": cut.cost(&inst),
        "k": a.k,
    });
    emit(a.json, &report);
    Ok(if valid { 0 } else { 1 })
}

fn bench(a: BenchArgs) -> Outcome {
    if a.step == 0 || a.from > a.to {
        return Err(Failure("need --step > 0 and --from <= --to".into()));
    }
    let opts = SolveOptions { parallel: a.threads > 1, ..SolveOptions::default() };
    println!("n,requests,k,nodes,leaves,bound,time_s");
    let mut edges = a.from;
    while edges <= a.to {
        for i in 0..a.count {
            let spec = GenSpec {
                seed: a.seed.wrapping_add(edges as u64 * 1000 + i),
                edges,
                requests: a.requests.unwrap_or(edges),
                shape: a.shape.into(),
                ..GenSpec::default()
            };
            let inst = generate(&spec)?;
            let start = Instant::now();
            let (k, _, stats) = solve_min(&inst, &opts);
            let secs = start.elapsed().as_secs_f64();
            println!(
                "{},{},{k},{},{},{},{secs:.6}",
                inst.n(),
                inst.requests().len(),
                stats.nodes,
                stats.leaves,
                leaf_bound(k)
            );
        }
        edges += a.step;
    }
    eprintln!("leaf bound is ceil({RHO}^k)");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Reduce(a) => reduce(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
