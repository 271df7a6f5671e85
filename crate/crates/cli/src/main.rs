mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::RunConfig;
use output::{num, report_table, Cache, OutputDir, ReportSummary, RunManifest, Table};
use serde_json::json;
use stablewalk::asymptotics::{report, report_ids, ReportOptions, VerificationReport};
use stablewalk::killed::{default_half_width, killed_kernel, ladder_renewals, marginal_kernel, DEFAULT_ESCAPE_BUDGET};
use stablewalk::montecarlo::{first_passage_report, SimConfig};
use stablewalk::potential::PotentialTable;
use stablewalk::{Error, Result, WalkLaw};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "stablewalk", version, about = "First-passage numerics for lattice walks attracted to stable laws")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// flat TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// smaller grids
    #[arg(long, global = true)]
    quick: bool,
    /// reference law by name; overrides the config
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a law and write it with its tail validation.
    Law,
    /// Materialise a table as CSV.
    Table {
        kind: TableKind,
        /// horizon for kernel tables (overrides `ns` in the config)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        start: Option<i64>,
        #[arg(long)]
        x_max: Option<i64>,
    },
    /// Run convergence checks; exit status 0 only if all pass.
    Verify {
        /// report ids, or `all`
        #[arg(required = true)]
        ids: Vec<String>,
    },
    /// Write one report without judging it; `montecarlo` gives the
    /// simulated first-passage law against the exact one.
    Report { id: String },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum TableKind {
    Kernel,
    Killed,
    Potential,
    Ladder,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::WindowTooSmall(_) = e {
                eprintln!("hint: raise `half_width` in the config or shorten the horizon");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

struct Context {
    config: RunConfig,
    seed: u64,
    started: Instant,
}

impl Context {
    fn law(&self) -> Result<(String, WalkLaw)> {
        let (name, spec) = self.config.tail_spec()?;
        Ok((name, WalkLaw::build(&spec)?))
    }

    fn manifest(&self, g: &Global, subcommand: &str, parameters: serde_json::Value, law: Option<&WalkLaw>) -> RunManifest {
        RunManifest {
            config_path: g.config.as_ref().map(|p| p.display().to_string()),
            law_hash: law.map(|l| output::sha256_hex(l.to_json().as_bytes())),
            subcommand: subcommand.to_string(),
            parameters,
            seed: self.seed,
            outputs: Vec::new(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    let mut config = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &g.preset {
        config.preset = Some(p.clone());
    }
    let seed = g.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let ctx = Context {
        config,
        seed,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Law => cmd_law(g, &ctx),
        Command::Table { kind, n, start, x_max } => cmd_table(g, &ctx, *kind, *n, *start, *x_max),
        Command::Verify { ids } => cmd_verify(g, &ctx, ids),
        Command::Report { id } => cmd_report(g, &ctx, id),
    }
}

fn cmd_law(g: &Global, ctx: &Context) -> Result<u8> {
    let (name, law) = ctx.law()?;
    let mut out = OutputDir::create(&g.out)?;
    let json = law.to_json();
    out.write("law.json", json.as_bytes())?;
    let mut tails = Table::new(&["x", "scaled_upper", "scaled_lower", "upper_deviation", "lower_deviation"]);
    for r in law.validate_tails().rows {
        tails.push(vec![
            r.x.to_string(),
            num(r.scaled_upper),
            num(r.scaled_lower),
            num(r.upper_deviation),
            num(r.lower_deviation),
        ]);
    }
    out.write("tails.csv", &tails.to_bytes())?;
    let hash = output::sha256_hex(json.as_bytes());
    let p = law.stable_params();
    println!("law {name}: hash {hash}");
    println!("  alpha {} gamma {:.6} c0 {:.6}", p.alpha, p.gamma, p.c0);
    println!("  atoms p(-1), p(0), p(1) = {:?}, tail start {}", law.atoms(), law.tail_start());
    out.finish(ctx.manifest(g, "law", json!({ "law": name }), Some(&law)))?;
    Ok(0)
}

fn cmd_table(
    g: &Global,
    ctx: &Context,
    kind: TableKind,
    n: Option<usize>,
    start: Option<i64>,
    x_max: Option<i64>,
) -> Result<u8> {
    let (name, law) = ctx.law()?;
    let ns: Vec<usize> = match n {
        Some(n) => vec![n],
        None => ctx.config.ns.clone().unwrap_or_else(|| vec![64]),
    };
    let n_max = ns.iter().copied().max().unwrap_or(64);
    let x_max = x_max.or(ctx.config.x_max).unwrap_or(64);
    let start = start.or(ctx.config.start).unwrap_or(1);
    let half_width = ctx
        .config
        .half_width
        .unwrap_or_else(|| default_half_width(law.alpha(), n_max) + start.abs());
    let (file, table, params) = match kind {
        TableKind::Kernel => {
            let t = marginal_kernel(&law, n_max, half_width, &ns, DEFAULT_ESCAPE_BUDGET)?;
            let mut csv = Table::new(&["n", "x", "value"]);
            for (n, row) in &t.snapshots {
                for (i, v) in row.iter().enumerate() {
                    csv.push(vec![n.to_string(), (i as i64 - t.half_width).to_string(), num(*v)]);
                }
            }
            ("kernel.csv", csv, json!({ "ns": ns, "half_width": half_width }))
        }
        TableKind::Killed => {
            let killing = ctx.config.killing_set()?;
            let t = killed_kernel(&law, killing.clone(), start, n_max, half_width, &ns, DEFAULT_ESCAPE_BUDGET)?;
            let mut csv = Table::new(&["n", "y", "value"]);
            for (n, row) in &t.snapshots {
                for (i, v) in row.iter().enumerate() {
                    csv.push(vec![n.to_string(), (i as i64 - t.half_width).to_string(), num(*v)]);
                }
            }
            let escaped = t.ledgers.last().map_or(0.0, |l| l.escaped);
            (
                "killed.csv",
                csv,
                json!({ "ns": ns, "start": start, "killing": killing, "half_width": half_width, "escaped": escaped }),
            )
        }
        TableKind::Potential => {
            let t = PotentialTable::build(&law, x_max)?;
            let mut csv = Table::new(&["x", "a", "a_dagger"]);
            for x in -x_max..=x_max {
                csv.push(vec![x.to_string(), num(t.a(x)), num(t.a_dagger(x))]);
            }
            ("potential.csv", csv, json!({ "x_max": x_max }))
        }
        TableKind::Ladder => {
            let t = ladder_renewals(&law, x_max as usize)?;
            let mut csv = Table::new(&["x", "u_ds", "v_as", "ascending_pmf", "descending_pmf"]);
            for x in 0..=x_max as usize {
                csv.push(vec![
                    x.to_string(),
                    num(t.u_ds[x]),
                    num(t.v_as[x]),
                    num(t.ascending_pmf[x]),
                    num(t.descending_pmf[x]),
                ]);
            }
            ("ladder.csv", csv, json!({ "x_max": x_max, "mean_descending": t.mean_descending }))
        }
    };
    let mut out = OutputDir::create(&g.out)?;
    let bytes = table.to_bytes();
    out.write(file, &bytes)?;
    println!("{file}: {} rows, sha256 {}", bytes.iter().filter(|&&b| b == b'\n').count() - 1, output::sha256_hex(&bytes));
    let mut params = params;
    params["law"] = json!(name);
    out.finish(ctx.manifest(g, &format!("table {kind:?}").to_lowercase(), params, Some(&law)))?;
    Ok(0)
}

fn report_options(g: &Global, ctx: &Context) -> Result<ReportOptions> {
    let law = if ctx.config.has_law() { Some(ctx.config.tail_spec()?) } else { None };
    Ok(ReportOptions {
        ns: ctx.config.ns.clone(),
        cap: ctx.config.cap,
        law,
        quick: g.quick,
    })
}

/// Run a report through the cache.
fn cached_report(g: &Global, id: &str, opts: &ReportOptions) -> Result<VerificationReport> {
    let cache = Cache::locate(&g.out);
    let request = json!({
        "id": id,
        "ns": opts.ns,
        "cap": opts.cap,
        "law": opts.law.as_ref().map(|(n, s)| json!({ "name": n, "spec": s })),
        "quick": opts.quick,
    });
    let key = Cache::key("report", &request);
    if let Some(r) = cache.get::<VerificationReport>(&key) {
        return Ok(r);
    }
    let r = report(id, opts)?;
    cache.put(&key, &r)?;
    Ok(r)
}

fn write_report(out: &mut OutputDir, r: &VerificationReport, source: &str) -> Result<()> {
    out.write(&format!("{}.csv", r.theorem_id), &report_table(r, source).to_bytes())?;
    out.write_json(&format!("{}.json", r.theorem_id), r)?;
    Ok(())
}

fn cmd_verify(g: &Global, ctx: &Context, ids: &[String]) -> Result<u8> {
    let ids: Vec<String> = if ids.iter().any(|i| i == "all") {
        report_ids().iter().map(|s| s.to_string()).collect()
    } else {
        ids.to_vec()
    };
    if let Some(bad) = ids.iter().find(|i| !report_ids().contains(&i.as_str())) {
        return Err(Error::Config(format!("unknown report {bad:?}; known: {}", report_ids().join(", "))));
    }
    let opts = report_options(g, ctx)?;
    let mut out = OutputDir::create(&g.out)?;
    let mut summaries = Vec::new();
    let mut errors = Vec::new();
    let mut code = 0u8;
    for id in &ids {
        let started = Instant::now();
        match cached_report(g, id, &opts) {
            Ok(r) => {
                print!("{}", r.summary());
                println!("  ({:.1}s)", started.elapsed().as_secs_f64());
                write_report(&mut out, &r, "asymptotics")?;
                if !r.passed() {
                    code = code.max(EXIT_FAIL);
                }
                summaries.push(ReportSummary::of(&r));
            }
            // a single report fails fast; several report every error
            Err(e) if ids.len() == 1 => return Err(e),
            Err(e) => {
                println!("{id}: error: {e}");
                code = code.max(exit_code(&e));
                errors.push(json!({ "theorem_id": id, "error": e.to_string() }));
            }
        }
    }
    out.write_json("summary.json", &json!({ "reports": summaries, "errors": errors }))?;
    let params = json!({ "ids": ids, "quick": g.quick, "ns": opts.ns, "cap": opts.cap });
    out.finish(ctx.manifest(g, "verify", params, None))?;
    Ok(code)
}

fn cmd_report(g: &Global, ctx: &Context, id: &str) -> Result<u8> {
    let mut out = OutputDir::create(&g.out)?;
    if id == "montecarlo" {
        let (name, law) = ctx.law()?;
        let ns = ctx.config.ns.clone().unwrap_or_else(|| vec![8, 32, 128]);
        let horizon = ns.iter().copied().max().unwrap_or(1);
        let trials = ctx.config.trials.unwrap_or(if g.quick { 20_000 } else { 200_000 });
        let start = ctx.config.start.unwrap_or(0);
        let sim = SimConfig::new(name.clone(), trials, horizon, ctx.seed);
        let r = first_passage_report(&law, &name, start, &ns, &sim)?;
        print!("{}", r.summary());
        write_report(&mut out, &r, "montecarlo")?;
        let params = json!({ "id": id, "ns": ns, "trials": trials, "start": start, "law": name });
        out.finish(ctx.manifest(g, "report", params, Some(&law)))?;
        return Ok(0);
    }
    let opts = report_options(g, ctx)?;
    let r = cached_report(g, id, &opts)?;
    print!("{}", r.summary());
    write_report(&mut out, &r, "asymptotics")?;
    out.write_json("summary.json", &ReportSummary::of(&r))?;
    out.finish(ctx.manifest(g, "report", json!({ "id": id, "quick": g.quick }), None))?;
    Ok(0)
}
