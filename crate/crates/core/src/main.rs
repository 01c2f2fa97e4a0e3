use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mlrc::bounds::{self, Part};
use mlrc::code::{verify_locality, LocalityOutcome};
use mlrc::construct::{build_multi_delta_lrc, ConstructionError, ConstructionParams};
use mlrc::descriptor::CodeDescriptor;
use mlrc::regen::{self, Budget};
use mlrc::sim::{self, Failures, SimConfig};

#[derive(Parser)]
#[command(name = "mlrc", version, about = "Locally repairable codes with multiple localities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an optimal code from part sizes and localities.
    Construct {
        /// Parts as n:r, comma separated (e.g. 6:2,8:3).
        #[arg(long, value_parser = parse_pairs)]
        parts: Pairs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Prime field size (default: smallest prime above n).
        #[arg(long)]
        q: Option<u32>,
        /// Write the descriptor here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the locality profile stored in a descriptor.
    Verify {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long)]
        json: bool,
    },
    /// Exact minimum distance.
    Mindist {
        #[command(flatten)]
        code: CodeArg,
        /// Also print a smallest dependent coordinate set.
        #[arg(long)]
        witness: bool,
    },
    /// Distance bounds for a descriptor or for raw parameters.
    Bounds {
        #[arg(long, conflicts_with_all = ["n", "k", "parts"])]
        code: Option<PathBuf>,
        #[arg(long, requires_all = ["k", "parts"])]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Parts as n:r:delta, comma separated.
        #[arg(long, value_parser = parse_triples)]
        parts: Option<Triples>,
        /// Information locality profile k_1,...,k_t.
        #[arg(long, value_delimiter = ',')]
        info_profile: Option<Vec<usize>>,
        #[arg(long)]
        json: bool,
    },
    /// Union sizes of regenerating sets and the derived bounds.
    Phi {
        #[command(flatten)]
        code: CodeArg,
        /// Largest x to tabulate (default: until the bound is decided).
        #[arg(long)]
        x_max: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Monte-Carlo erasure and repair simulation.
    Simulate {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Erasures per trial: a count (2) or an inclusive range (1-4).
        #[arg(long, default_value = "1", value_parser = |s: &str| s.parse::<Failures>())]
        failures: Failures,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Confine each trial's erasures to one local group.
        #[arg(long)]
        within_group: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct CodeArg {
    /// Code descriptor (JSON).
    #[arg(long = "code")]
    path: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

type Pairs = Vec<(usize, usize)>;
type Triples = Vec<Part>;

fn parse_fields(s: &str, arity: usize) -> Result<Vec<Vec<usize>>, String> {
    s.split(',')
        .map(|item| {
            let v: Result<Vec<usize>, _> = item.trim().split(':').map(str::parse::<usize>).collect();
            match v {
                Ok(v) if v.len() == arity => Ok(v),
                _ => Err(format!("invalid part {item:?}")),
            }
        })
        .collect()
}

fn parse_pairs(s: &str) -> Result<Pairs, String> {
    Ok(parse_fields(s, 2)?.into_iter().map(|v| (v[0], v[1])).collect())
}

fn parse_triples(s: &str) -> Result<Triples, String> {
    Ok(parse_fields(s, 3)?.into_iter().map(|v| Part::new(v[0], v[1], v[2])).collect())
}

/// Input errors: reported on standard error with exit status 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Fail>;

fn load(path: &Path) -> Result<CodeDescriptor, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))?;
    CodeDescriptor::from_json(&text).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn construct(parts: Pairs, k: usize, delta: usize, q: Option<u32>, out: Option<PathBuf>) -> CmdResult {
    let params = ConstructionParams { parts, k, delta, q };
    let built = match build_multi_delta_lrc(&params) {
        Ok(b) => b,
        Err(ConstructionError::Invalid(v)) => {
            return Err(Fail(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")))
        }
        Err(e) => return Err(e.into()),
    };
    let desc = CodeDescriptor::from_construction(&built);
    let c = &built.certificate;
    match out {
        Some(path) => {
            fs::write(&path, desc.to_json() + "\n").map_err(|e| Fail(format!("{}: {e}", path.display())))?;
            let bound = c.bound_d.map_or("n/a".to_string(), |b| b.to_string());
            println!(
                "[{},{},{}] over GF({}); bound {} ({}); optimal {}{}",
                c.n,
                c.k,
                c.achieved_d,
                c.q,
                bound,
                c.bound_formula,
                c.optimal,
                if c.degenerate { "; single part (degenerate)" } else { "" }
            );
        }
        None => println!("{}", desc.to_json()),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(path: &Path, as_json: bool) -> CmdResult {
    let desc = load(path)?;
    let code = desc.code()?;
    let profile = desc.require_profile()?;
    let outcome = verify_locality(&code, profile, desc.hints())?;
    let mut problems = Vec::new();
    if let Some(c) = desc.certificate() {
        if (c.n, c.k) != (code.n(), code.k()) {
            problems.push(format!("certificate says [{}, {}], code is [{}, {}]", c.n, c.k, code.n(), code.k()));
        }
    }
    let ok = outcome.is_certified() && problems.is_empty();
    if as_json {
        let body = match &outcome {
            LocalityOutcome::Certified(cert) => {
                json!({"holds": ok, "n": code.n(), "k": code.k(), "certificate": cert, "problems": problems})
            }
            LocalityOutcome::Violated(v) => {
                json!({"holds": false, "n": code.n(), "k": code.k(), "violation": v, "problems": problems})
            }
        };
        print_json(&json!({"version": 1, "verify": body}));
    } else {
        println!("[{}, {}] code over GF({})", code.n(), code.k(), code.field().q());
        match &outcome {
            LocalityOutcome::Certified(cert) => {
                for (part, group) in cert.groups() {
                    println!("part {}: group {:?}", part + 1, group);
                }
                println!("locality holds for every coordinate");
            }
            LocalityOutcome::Violated(v) => println!(
                "locality violated: coordinate {} in part {} has no ({}, {}) repair group",
                v.coordinate,
                v.part + 1,
                v.r,
                v.delta
            ),
        }
        for p in &problems {
            println!("{p}");
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn mindist(path: &Path, witness: bool) -> CmdResult {
    let code = load(path)?.code()?;
    let w = code.min_distance_witness();
    println!("{}", w.len());
    if witness {
        println!("{w:?}");
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds_cmd(
    code: Option<PathBuf>,
    n: Option<usize>,
    k: Option<usize>,
    parts: Option<Triples>,
    info: Option<Vec<usize>>,
    as_json: bool,
) -> CmdResult {
    let (n, k, parts) = match (code, n, k, parts) {
        (Some(path), ..) => {
            let desc = load(&path)?;
            let c = desc.code()?;
            let parts = desc.require_profile()?.params().into_iter().map(|(a, b, d)| Part::new(a, b, d)).collect();
            (c.n(), c.k(), parts)
        }
        (None, Some(n), Some(k), Some(parts)) => (n, k, parts),
        _ => return Err(Fail("give either --code or all of --n, --k and --parts".into())),
    };
    let total: usize = parts.iter().map(|p| p.n).sum();
    if total != n {
        return Err(Fail(format!("part sizes sum to {total}, not n = {n}")));
    }
    let table = bounds::all_bounds(n, k, &parts, info.as_deref());
    let best = bounds::tightest(&table);
    if as_json {
        print_json(&json!({
            "version": 1, "n": n, "k": k, "parts": parts, "bounds": table,
            "tightest": best.map(|b| json!({"formula": b.formula, "value": b.value})),
        }));
    } else {
        println!("n = {n}, k = {k}");
        println!("{:<24} {:>6}  note", "bound", "value");
        for b in &table {
            match b.value {
                Some(v) => println!("{:<24} {:>6}", b.formula.id(), v),
                None => println!("{:<24} {:>6}  {}", b.formula.id(), "-", b.reason.as_deref().unwrap_or("")),
            }
        }
        match best {
            Some(b) => println!("tightest: {} ({})", b.value.unwrap(), b.formula),
            None => println!("tightest: none applicable"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn phi_cmd(path: &Path, x_max: Option<usize>, as_json: bool) -> CmdResult {
    let desc = load(path)?;
    let code = desc.code()?;
    let budget = Budget::default();
    let table = match x_max {
        Some(x) => regen::phi(&code, x, &budget)?,
        None => regen::phi_until_rho(&code, &budget)?,
    };
    let rho_table = if table.rho.is_some() { table.clone() } else { regen::phi_until_rho(&code, &budget)? };
    let rho = rho_table.rho.expect("decided");
    let single = code.n() - code.k() + 1 - rho;
    let refined = regen::refined_bound(&code, &budget)?;
    let parts: Option<Vec<Part>> =
        desc.profile.as_ref().map(|p| p.params().into_iter().map(|(a, b, d)| Part::new(a, b, d)).collect());
    let upper = |x: usize| parts.as_ref().and_then(|p| bounds::phi_upper_lemma(x, p, code.k()).ok());
    if as_json {
        let rows: Vec<_> =
            table.values.iter().enumerate().map(|(x, &v)| json!({"x": x, "phi": v, "upper": upper(x)})).collect();
        print_json(&json!({
            "version": 1, "n": code.n(), "k": code.k(), "phi": rows, "rho": rho,
            "singleton_rho_bound": single, "refined_bound": refined,
        }));
    } else {
        println!("[{}, {}] code over GF({})", code.n(), code.k(), code.field().q());
        println!("{:>3} {:>6} {:>6}", "x", "phi", "upper");
        for (x, &v) in table.values.iter().enumerate() {
            let u = upper(x).map_or("-".to_string(), |u| u.to_string());
            println!("{x:>3} {v:>6} {u:>6}");
        }
        println!("rho = {rho}");
        println!("d <= n - k + 1 - rho = {single}");
        println!("d <= refined bound = {refined}");
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(path: &Path, trials: u64, failures: Failures, seed: u64, within_group: bool, format: Format) -> CmdResult {
    let desc = load(path)?;
    let code = desc.code()?;
    let profile = desc.require_profile()?;
    let config = SimConfig { trials, failures, seed, within_group };
    let report = sim::run(&code, profile, desc.hints(), &config)?;
    match format {
        Format::Json => print_json(&report),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { parts, k, delta, q, out } => construct(parts, k, delta, q, out),
        Command::Verify { code, json } => verify(&code.path, json),
        Command::Mindist { code, witness } => mindist(&code.path, witness),
        Command::Bounds { code, n, k, parts, info_profile, json } => bounds_cmd(code, n, k, parts, info_profile, json),
        Command::Phi { code, x_max, json } => phi_cmd(&code.path, x_max, json),
        Command::Simulate { code, trials, failures, seed, within_group, format } => {
            simulate(&code.path, trials, failures, seed, within_group, format)
        }
    };
    match result {
        Ok(code) => code,
        Err(Fail(msg)) => {
            for line in msg.lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(2)
        }
    }
}
