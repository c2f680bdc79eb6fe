use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cook::gen::{generate_program, GenConfig};
use cook::safelist::parse_safe_list;
use cook::{analyze_program, load_program, render_text, ReportConfig};
use cook_core::cfg::{build_cfg, dot};
use cook_core::cook::SwampTest;
use cook_core::interp::{run_concrete, run_reified, Cell, DefaultExterns, Heap, RunConfig, RunOutcome, Value};
use cook_core::lang::{Elem, Program, Type};
use cook_core::{pretty, MethodId};

#[derive(Parser)]
#[command(name = "cook", about = "Find terminating islands of methods in Carib programs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every method and print a report.
    Analyze(AnalyzeArgs),
    /// Execute one method under the reference interpreter.
    Run(RunArgs),
    /// Print a random well-formed program.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SwampArg {
    #[value(alias = "pre-strip")]
    Pre,
    #[value(alias = "post-strip")]
    Post,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// File of API methods assumed not to diverge.
    #[arg(long)]
    safe_list: Option<PathBuf>,
    /// Methods with fewer statements count as trivial.
    #[arg(long, default_value_t = 30)]
    min_instructions: usize,
    /// Count getters and setters as non-trivial.
    #[arg(long)]
    no_accessor_filter: bool,
    /// Look for `⊥` facts before or after a method's locals are stripped.
    #[arg(long, value_enum, default_value = "pre")]
    swamp_test: SwampArg,
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Print each method's control-flow graph as DOT instead of the report.
    #[arg(long, group = "dump")]
    dump_cfg: bool,
    /// Print the call graph as DOT instead of the report.
    #[arg(long, group = "dump")]
    dump_callgraph: bool,
    /// Print the transformed program instead of the report.
    #[arg(long, group = "dump")]
    dump_phi: bool,
    /// Print method and loop summaries instead of the report.
    #[arg(long, group = "dump")]
    dump_summaries: bool,
    /// Landfall worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Method to run, `m` or `C.m`.
    #[arg(long)]
    entry: String,
    /// One value per formal: an integer, `null`, `new` (fresh object with
    /// default fields) or `array:N` (zeroed array of length N).
    #[arg(long, num_args = 0.., allow_negative_numbers = true)]
    args: Vec<String>,
    #[arg(long, default_value_t = cook_core::interp::DEFAULT_FUEL)]
    fuel: u64,
    /// Reify divergence as `⊥` instead of running concretely.
    #[arg(long)]
    reified: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    methods: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 2)]
    max_depth: u32,
    #[arg(long, default_value_t = 5)]
    block_len: usize,
    #[arg(long)]
    loop_density: Option<f64>,
    #[arg(long)]
    opaque_loops: Option<f64>,
    #[arg(long)]
    recursion: Option<f64>,
    #[arg(long)]
    extern_density: Option<f64>,
    #[arg(long)]
    call_density: Option<f64>,
    #[arg(long, default_value_t = 3)]
    externs: usize,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Run(a) => execute(a),
        Command::Gen(a) => generate(a),
    }
}

fn analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let p = load_program(&a.files)?;
    let mut cfg = ReportConfig {
        min_instructions: a.min_instructions,
        exclude_accessors: !a.no_accessor_filter,
        swamp_test: match a.swamp_test {
            SwampArg::Pre => SwampTest::PreStrip,
            SwampArg::Post => SwampTest::PostStrip,
        },
        ..Default::default()
    };
    if let Some(f) = &a.safe_list {
        let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
        cfg.safe_list = parse_safe_list(&text);
    }
    let (out, report) = analyze_program(&p, &cfg, a.jobs)?;
    if a.dump_cfg {
        for m in p.methods.iter().filter(|m| !m.is_extern()) {
            print!("{}", dot::to_dot(&build_cfg(m), &m.id()));
        }
    } else if a.dump_callgraph {
        print!("{}", out.prepared.callgraph.to_dot());
    } else if a.dump_phi {
        print!("{}", pretty(&out.prepared.transform.program));
    } else if a.dump_summaries {
        for (id, s) in &out.result.summaries {
            println!("{id}:");
            for f in &s.facts {
                println!("    {}", f.display_in(Some(id)));
            }
        }
        for (id, j) in &out.prepared.transform.loops {
            if let Some(s) = &j.summary {
                println!("loop {id} at {}:\n{s}", j.path);
            }
        }
    } else {
        match a.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
            Format::Text => print!("{}", render_text(&report)),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn arg_value(p: &Program, s: &str, ty: &Type, heap: &mut Heap) -> Result<Value> {
    if s == "null" {
        return Ok(Value::Null);
    }
    if let Ok(k) = s.parse::<i64>() {
        return Ok(Value::Int(k));
    }
    match (s, ty) {
        ("new", Type::Ref(c)) => {
            let hier = cook_core::hierarchy::Hierarchy::new(p);
            if !hier.is_class(c) {
                bail!("`{c}` is not a class");
            }
            let fields: BTreeMap<_, _> = hier.all_fields(c).into_iter().map(|(_, n, t)| (n, Value::default_of(&t))).collect();
            Ok(heap.alloc(Cell::Object { class: c.clone(), fields }))
        }
        (_, Type::Array(e)) if s.starts_with("array:") => {
            let n: usize = s["array:".len()..].parse().with_context(|| format!("bad array length in `{s}`"))?;
            let v = Value::default_of(&match e {
                Elem::Int => Type::Int,
                Elem::Ref(c) => Type::Ref(c.clone()),
            });
            Ok(heap.alloc_array(e.clone(), vec![v; n]))
        }
        _ => bail!("cannot build a `{ty}` from `{s}`"),
    }
}

fn execute(a: RunArgs) -> Result<ExitCode> {
    let p = load_program(&[&a.file])?;
    let entry = MethodId::parse(&a.entry);
    let Some(m) = p.method(&entry) else { bail!("no method `{entry}`") };
    if a.args.len() != m.formals.len() {
        bail!("`{entry}` takes {} arguments, got {}", m.formals.len(), a.args.len());
    }
    let mut heap = Heap::default();
    let args = m.formals.iter().zip(&a.args).map(|(f, s)| arg_value(&p, s, &f.ty, &mut heap)).collect::<Result<Vec<_>>>()?;
    let cfg = RunConfig { fuel: a.fuel, ..Default::default() };
    let outcome = if a.reified {
        let prepared = cook_core::prepare(&p, &Default::default());
        run_reified(&p, &prepared.cx, &entry, &args, heap, &cfg, &prepared.reify_oracle(), &mut DefaultExterns)
    } else {
        let cx = cook_core::alias::Context::new(&p, &Default::default());
        run_concrete(&p, &cx, &entry, &args, heap, &cfg, &mut DefaultExterns)
    };
    match outcome {
        RunOutcome::Finished(f) => {
            println!("finished after {} steps", f.steps);
            println!("ret = {}", f.ret);
            for (x, v) in f.vars.iter().filter(|(x, _)| &***x != cook_core::lang::RET) {
                println!("{x} = {v}");
            }
            for r in &f.tainted {
                println!("{r} = ⊥");
            }
            Ok(ExitCode::SUCCESS)
        }
        RunOutcome::FuelExhausted { steps } => {
            println!("fuel exhausted after {steps} steps");
            Ok(ExitCode::from(2))
        }
        RunOutcome::Fault(f) => {
            println!("fault: {f}");
            Ok(ExitCode::from(3))
        }
    }
}

fn generate(a: GenArgs) -> Result<ExitCode> {
    let d = GenConfig::default();
    let cfg = GenConfig {
        seed: a.seed,
        methods: a.methods,
        classes: a.classes,
        max_depth: a.max_depth,
        block_len: a.block_len.max(1),
        loop_density: a.loop_density.unwrap_or(d.loop_density),
        opaque_loops: a.opaque_loops.unwrap_or(d.opaque_loops),
        recursion: a.recursion.unwrap_or(d.recursion),
        extern_density: a.extern_density.unwrap_or(d.extern_density),
        call_density: a.call_density.unwrap_or(d.call_density),
        externs: a.externs,
    };
    for (name, v) in [
        ("loop-density", cfg.loop_density),
        ("opaque-loops", cfg.opaque_loops),
        ("recursion", cfg.recursion),
        ("extern-density", cfg.extern_density),
        ("call-density", cfg.call_density),
    ] {
        if !(0.0..=1.0).contains(&v) {
            bail!("--{name} must lie in [0, 1]");
        }
    }
    let text = pretty(&generate_program(&cfg));
    match &a.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
