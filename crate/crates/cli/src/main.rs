use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aspine_core::instances::{coloring, pigeonhole, random_graph, random_program, visitall, RandomShape};
use aspine_core::oracle::enumerate_answer_sets;
use aspine_core::{
    compile_completion, emit_stats, solve, Error, GroundProgram, HeuristicConfig, HeuristicKind, LearnMode,
    NogoodStore, RestartPolicy, SolverConfig, StatsFormat, Status,
};
use clap::{Args, Parser, Subcommand};

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "aspine", version, about = "Conflict-driven answer set solver over completion nogoods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a ground program ("-" reads stdin)
    Solve(SolveArgs),
    /// Enumerate answer sets by brute force (at most 22 atoms)
    Oracle { file: PathBuf },
    /// Print a generated program in the canonical format
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Print the completion nogoods of a program
    Dump {
        file: PathBuf,
        /// Print the CSR arrays of the nogood store instead
        #[arg(long)]
        csr: bool,
    },
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value = "fwd")]
    mode: LearnMode,
    #[arg(long, default_value = "occ")]
    heur: HeuristicKind,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// off, geometric, or geometric:BASE:FACTOR
    #[arg(long, default_value = "off")]
    restarts: RestartPolicy,
    /// Number of models to print, 0 for all
    #[arg(short = 'n', default_value_t = 1)]
    models: usize,
    #[arg(long, default_value_t = aspine_core::assignment::DEFAULT_DEPS_WORDS)]
    deps_words: usize,
    /// Conflicts analysed per conflicting pass
    #[arg(long, default_value_t = 1)]
    fanout: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check every model against the reduct before printing it
    #[arg(long)]
    verify: bool,
    /// Print statistics to stderr as csv or human
    #[arg(long)]
    stats: Option<StatsFormat>,
    /// Print one line per learned nogood to stderr
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Random program with mixed negation
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        atoms: usize,
        #[arg(long, default_value_t = 25)]
        rules: usize,
        #[arg(long, default_value_t = 5)]
        constraints: usize,
        #[arg(long, default_value_t = 2)]
        body: usize,
    },
    /// Pigeons into holes
    Pigeonhole { pigeons: usize, holes: usize },
    /// Coloring of a seeded random graph
    Coloring {
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        colors: usize,
        #[arg(long, default_value_t = 0.2)]
        prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grid walk visiting every cell
    Visitall { width: usize, height: usize, steps: usize },
}

fn read_program(path: &PathBuf) -> Result<(String, GroundProgram), String> {
    let (name, text) = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        ("stdin".to_string(), s)
    } else {
        let s = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        (path.display().to_string(), s)
    };
    let program = GroundProgram::parse(&text).map_err(|e| format!("{name}: {e}"))?;
    Ok((name, program))
}

fn print_models<W: Write>(out: &mut W, models: impl Iterator<Item = Vec<String>>, sat: bool) -> io::Result<()> {
    for (i, names) in models.enumerate() {
        writeln!(out, "Answer: {}", i + 1)?;
        writeln!(out, "{}", names.join(" "))?;
    }
    writeln!(out, "{}", if sat { "SATISFIABLE" } else { "UNSATISFIABLE" })
}

fn run_solve(args: SolveArgs) -> Result<u8, (u8, String)> {
    let (name, program) = read_program(&args.file).map_err(|e| (EXIT_ERROR, e))?;
    let config = SolverConfig {
        mode: args.mode,
        heuristic: HeuristicConfig { kind: args.heur, ..HeuristicConfig::default() },
        workers: args.workers,
        restarts: args.restarts,
        max_models: args.models,
        deps_words: args.deps_words,
        fanout: args.fanout,
        seed: args.seed,
        verify: args.verify,
        trace: args.trace,
        ..SolverConfig::default()
    };
    config.validate().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let output = solve(&program, &config).map_err(|e| match e {
        Error::Config(_) => (EXIT_USAGE, e.to_string()),
        _ => (EXIT_ERROR, e.to_string()),
    })?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let sat = output.status == Status::Sat;
    print_models(&mut out, output.models.iter().map(|m| m.names(&program)), sat)
        .map_err(|e| (EXIT_ERROR, e.to_string()))?;
    let mut err = io::stderr().lock();
    for event in &output.trace {
        let _ = writeln!(err, "{event}");
    }
    if let Some(format) = args.stats {
        let _ = write!(err, "{}", emit_stats(&name, &config, &output, format));
    }
    Ok(if sat { EXIT_SAT } else { EXIT_UNSAT })
}

fn run_oracle(file: PathBuf) -> Result<u8, (u8, String)> {
    let (_, program) = read_program(&file).map_err(|e| (EXIT_ERROR, e))?;
    let family = enumerate_answer_sets(&program).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let names = family.iter().map(|m| {
        let mut v: Vec<String> = m.iter().map(|&a| program.atoms().name(a).to_owned()).collect();
        v.sort();
        v
    });
    let sat = !family.is_empty();
    print_models(&mut io::stdout().lock(), names, sat).map_err(|e| (EXIT_ERROR, e.to_string()))?;
    Ok(if sat { EXIT_SAT } else { EXIT_UNSAT })
}

fn run_gen(family: GenFamily) -> Result<u8, (u8, String)> {
    let program = match family {
        GenFamily::Random { seed, atoms, rules, constraints, body } => {
            if atoms == 0 || rules == 0 {
                return Err((EXIT_USAGE, "random programs need at least one atom and one rule".into()));
            }
            random_program(
                seed,
                RandomShape { max_atoms: atoms, max_rules: rules, max_constraints: constraints, max_body: body },
            )
        }
        GenFamily::Pigeonhole { pigeons, holes } => pigeonhole(pigeons, holes),
        GenFamily::Coloring { nodes, colors, prob, seed } => {
            if !(0.0..=1.0).contains(&prob) {
                return Err((EXIT_USAGE, format!("edge probability {prob} outside [0, 1]")));
            }
            coloring(nodes, &random_graph(nodes, prob, seed), colors)
        }
        GenFamily::Visitall { width, height, steps } => {
            if width == 0 || height == 0 {
                return Err((EXIT_USAGE, "grid must be non-empty".into()));
            }
            visitall(width, height, steps)
        }
    };
    print!("{program}");
    Ok(0)
}

fn run_dump(file: PathBuf, csr: bool) -> Result<u8, (u8, String)> {
    let (_, program) = read_program(&file).map_err(|e| (EXIT_ERROR, e))?;
    let completion = compile_completion(&program);
    if csr {
        let store = NogoodStore::build(&completion.nogoods, completion.aux.total_atoms());
        print!("{}", store.csr_csv());
    } else {
        print!("{}", completion.dump(&program));
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Oracle { file } => run_oracle(file),
        Command::Gen { family } => run_gen(family),
        Command::Dump { file, csr } => run_dump(file, csr),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            eprintln!("aspine: {message}");
            ExitCode::from(code)
        }
    }
}
