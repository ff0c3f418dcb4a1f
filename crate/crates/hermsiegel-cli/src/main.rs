mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hermsiegel::budget;
use hermsiegel::decomp::{diff_identity_check, fourier_pden_perp, FlatContext, FlatPair};
use hermsiegel::density::{den_lambda_poly, den_poly, den_value, derived_den, derived_den_lambda, whittaker_factors, Level};
use hermsiegel::io::{lattice_from_json, matrix_from_json, vector_from_json};
use hermsiegel::kr::{int_almost_selfdual, int_prime, int_selfdual, standard_flat, vertical_identity_on_grid, IntResult};
use hermsiegel::lattice::{EmbeddedLattice, SpaceKind};
use hermsiegel::oracle::{den_oracle, rep_count};
use hermsiegel::overlat::{cyclic_overlattices, integral_overlattices, OverlatticeRecord};
use hermsiegel::ring::{parse_rational, rat_to_string, FieldParams, Rational};
use hermsiegel::schwartz::{int_v_lambda, local_modularity_check, standard_type3};
use hermsiegel::verify::{full_grid, run_suite, Suite, SuiteConfig};
use hermsiegel::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Exact local densities and Siegel series of hermitian lattices over the
/// unramified quadratic extension of Q_p.
#[derive(Parser, Debug)]
#[command(name = "hermsiegel", version)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Residue characteristic, an odd prime.
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Non-square used for the quadratic extension; defaults to the smallest one.
    #[arg(long, global = true)]
    eps: Option<i64>,
    /// Budget for enumeration and counting; also read from HERMSIEGEL_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads for the parallel counters.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

impl RunConfig {
    fn params(&self) -> anyhow::Result<FieldParams> {
        Ok(match self.eps {
            Some(e) => FieldParams::with_eps(self.p, e)?,
            None => FieldParams::new(self.p)?,
        })
    }
}

/// Where a lattice comes from: a lattice file, a Gram matrix file, or an
/// invariants list realized in the standard space.
#[derive(Args, Debug, Clone)]
struct LatticeArgs {
    /// Lattice JSON file: {"space": {...}, "basis": [[...], ...]}.
    #[arg(long, conflicts_with_all = ["gram", "inv"])]
    lattice: Option<PathBuf>,
    /// JSON file with a Gram matrix; the lattice is spanned by the standard basis.
    #[arg(long, conflicts_with = "inv")]
    gram: Option<PathBuf>,
    /// Fundamental invariants, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    inv: Option<Vec<i64>>,
    #[arg(long, conflicts_with = "nonsplit")]
    split: bool,
    #[arg(long)]
    nonsplit: bool,
}

impl LatticeArgs {
    fn kind(&self) -> Option<SpaceKind> {
        match (self.split, self.nonsplit) {
            (true, _) => Some(SpaceKind::Split),
            (_, true) => Some(SpaceKind::Nonsplit),
            _ => None,
        }
    }

    fn load(&self, params: FieldParams) -> anyhow::Result<EmbeddedLattice> {
        if let Some(path) = &self.lattice {
            return Ok(lattice_from_json(&read_json(path)?, params)?);
        }
        if let Some(path) = &self.gram {
            return Ok(EmbeddedLattice::from_gram(matrix_from_json(&read_json(path)?, params)?)?);
        }
        let inv = self.inv.as_ref().ok_or_else(|| usage("give one of --lattice, --gram or --inv"))?;
        if inv.is_empty() {
            return Err(usage("--inv needs at least one invariant"));
        }
        let val: i64 = inv.iter().sum();
        let kind = self.kind().unwrap_or(SpaceKind::of_val(val));
        Ok(EmbeddedLattice::in_standard_space(params, kind, inv)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fundamental invariants, valuation, type and volume.
    Invariants(LatticeArgs),
    /// Local Siegel series and their derivatives.
    #[command(subcommand)]
    Den(DenCmd),
    /// Brute-force representation counts.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Integral overlattices.
    #[command(subcommand)]
    Overlat(OverlatCmd),
    /// Horizontal and vertical parts of the derived density.
    #[command(subcommand)]
    Decomp(DecompCmd),
    /// Lattice functions and their Fourier transforms.
    #[command(subcommand)]
    Schwartz(SchwartzCmd),
    /// Intersection numbers through the proven identities.
    #[command(subcommand)]
    Kr(KrCmd),
    /// Run property suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum DenCmd {
    /// Den(X, L), or Den_Λ(X, L) with --almost-self-dual.
    Poly {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        almost_self_dual: bool,
    },
    /// Central derivative: ∂Den for odd valuation, ∂Den_Λ with --almost-self-dual.
    Derived {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        almost_self_dual: bool,
    },
    /// Value at a rational X, for example 1, -3 or -1/3.
    Value {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        almost_self_dual: bool,
    },
    /// Local Whittaker data as rational factors.
    Whittaker {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        almost_self_dual: bool,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Count hermitian maps L -> M modulo p^N.
    Count {
        /// Target lattice: a JSON file or comma separated invariants.
        #[arg(long = "M")]
        m: String,
        /// Source lattice: a JSON file or comma separated invariants.
        #[arg(long = "L")]
        l: String,
        #[arg(long = "N")]
        n: u32,
    },
    /// The stabilized local density Den(M, L).
    Den {
        #[arg(long = "M")]
        m: String,
        #[arg(long = "L")]
        l: String,
    },
}

#[derive(Subcommand, Debug)]
enum OverlatCmd {
    /// List integral overlattices as JSON records.
    List {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Only overlattices with cyclic quotient.
        #[arg(long)]
        cyclic: bool,
        /// Only overlattices of this type.
        #[arg(long = "type")]
        type_t: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct FlatArgs {
    /// Rank n-1 lattice file.
    #[arg(long)]
    flat: PathBuf,
    /// Vector file: a JSON list of field elements in ambient coordinates.
    #[arg(long)]
    x: PathBuf,
}

#[derive(Subcommand, Debug)]
enum DecompCmd {
    /// ∂Den of L♭ + <x> with its horizontal and vertical parts.
    Eval(FlatArgs),
    /// Transforms of the full and horizontal parts at x ⊥ L♭ with val(x) < 0.
    FourierCheck(FlatArgs),
    /// The two difference identities at x ⊥ L♭ with val(x) > e_max(L♭).
    DiffCheck(FlatArgs),
}

#[derive(Subcommand, Debug)]
enum SchwartzCmd {
    /// Checks that Int_{V(Λ)} is a Fourier eigenfunction with eigenvalue -1.
    Modularity {
        /// Type 3 vertex lattice file; defaults to the standard one.
        #[arg(long)]
        lambda: Option<PathBuf>,
        /// Dimension of the standard nonsplit space when no file is given.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntCase {
    Selfdual,
    Asd,
    Prime,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum OutFormat {
    Text,
    Json,
    Csv,
    Latex,
}

#[derive(Subcommand, Debug)]
enum KrCmd {
    /// Int, Int for the almost self-dual level, or Int'.
    Int {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_enum)]
        case: IntCase,
    },
    /// The n = 3 vertical identity on a grid of vectors.
    VerifyN3 {
        /// Rank 2 lattice file in the nonsplit space of dimension 3.
        #[arg(long, conflicts_with = "inv")]
        flat: Option<PathBuf>,
        /// Invariants of a standard rank 2 flat lattice.
        #[arg(long, value_delimiter = ',')]
        inv: Option<Vec<i64>>,
    },
    /// A table of invariants, Den(X), the central derivative and Int.
    Table {
        /// JSON file: a list of invariant lists, or {"max_rank": r, "max_val": v}.
        #[arg(long)]
        inv_grid: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        #[arg(long, default_value_t = 4)]
        max_val: i64,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        out: OutFormat,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or "all".
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Error::Parse(msg.into()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A JSON file path, or comma separated invariants for a diagonal lattice.
fn lattice_spec(spec: &str, params: FieldParams) -> anyhow::Result<EmbeddedLattice> {
    let parsed: Result<Vec<i64>, _> = spec.split(',').map(|s| s.trim().parse::<i64>()).collect();
    match parsed {
        Ok(inv) if !inv.is_empty() => Ok(EmbeddedLattice::diagonal(params, &inv)),
        _ => Ok(lattice_from_json(&read_json(Path::new(spec))?, params)?),
    }
}

fn rat(r: &Rational) -> String {
    rat_to_string(r)
}

fn emit(json_mode: bool, value: Value, text: impl FnOnce() -> String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("{}", text());
    }
}

fn int_json(r: &IntResult) -> Value {
    r.to_json()
}

fn record_json(r: &OverlatticeRecord) -> Value {
    json!({
        "invariants": r.lattice.invariants().seq,
        "length": r.length,
        "type": r.type_t,
        "cyclic": r.cyclic,
        "lattice": r.lattice.to_json(),
    })
}

/// Outcome of a command that checks something.
enum Outcome {
    Done,
    Failed,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = &cli.run;
    if let Some(b) = cfg.budget {
        std::env::set_var(budget::ENV_VAR, b.to_string());
    }
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global()?;
    }
    let params = cfg.params()?;
    let js = cfg.json;
    match cli.command {
        Command::Invariants(la) => {
            let l = la.load(params)?;
            let inv = l.fundamental_invariants()?;
            let ty = inv.type_t();
            emit(
                js,
                json!({
                    "invariants": inv.seq,
                    "val": inv.val(),
                    "type": ty,
                    "vol": rat(&l.vol()),
                    "integral": inv.is_integral(),
                    "space": l.space().kind(),
                }),
                || {
                    let t = ty.map_or("-".to_string(), |t| t.to_string());
                    format!("invariants {inv}\nval {}\ntype {t}\nvol {}\nspace {:?}", inv.val(), rat(&l.vol()), l.space().kind())
                },
            );
        }
        Command::Den(cmd) => den(cmd, params, js)?,
        Command::Oracle(cmd) => match cmd {
            OracleCmd::Count { m, l, n } => {
                let (m, l) = (lattice_spec(&m, params)?, lattice_spec(&l, params)?);
                let r = rep_count(&m, &l, n)?;
                emit(js, serde_json::to_value(&r)?, || format!("count {}\nnormalized {}", r.count, rat(&r.normalized)));
            }
            OracleCmd::Den { m, l } => {
                let (m, l) = (lattice_spec(&m, params)?, lattice_spec(&l, params)?);
                let r = den_oracle(&m, &l)?;
                emit(js, serde_json::to_value(&r)?, || {
                    format!("{}\nN {}\nstabilized {}", rat(&r.normalized), r.precision, r.stabilized)
                });
                if !r.stabilized {
                    return Ok(Outcome::Failed);
                }
            }
        },
        Command::Overlat(OverlatCmd::List { lattice, cyclic, type_t }) => {
            let l = lattice.load(params)?;
            let all = if cyclic { cyclic_overlattices(&l)? } else { integral_overlattices(&l)? };
            let recs: Vec<Value> = all.iter().filter(|r| type_t.map_or(true, |t| r.type_t == t)).map(record_json).collect();
            println!("{}", serde_json::to_string_pretty(&recs)?);
        }
        Command::Decomp(cmd) => return decomp(cmd, params, js),
        Command::Schwartz(SchwartzCmd::Modularity { lambda, n }) => {
            let lambda = match lambda {
                Some(path) => lattice_from_json(&read_json(&path)?, params)?,
                None => standard_type3(params, n)?,
            };
            let ok = local_modularity_check(&lambda)?;
            emit(js, json!({ "holds": ok, "function": int_v_lambda(&lambda)?.to_json() }), || ok.to_string());
            if !ok {
                return Ok(Outcome::Failed);
            }
        }
        Command::Kr(cmd) => return kr(cmd, params, js),
        Command::Verify(args) => return verify(args, cfg),
    }
    Ok(Outcome::Done)
}

fn den(cmd: DenCmd, params: FieldParams, js: bool) -> anyhow::Result<()> {
    match cmd {
        DenCmd::Poly { lattice, almost_self_dual } => {
            let l = lattice.load(params)?;
            let d = if almost_self_dual { den_lambda_poly(&l)? } else { den_poly(&l)? };
            emit(js, d.to_json(), || d.to_string());
        }
        DenCmd::Derived { lattice, almost_self_dual } => {
            let l = lattice.load(params)?;
            let v = if almost_self_dual { derived_den_lambda(&l)? } else { derived_den(&l)? };
            emit(js, json!({ "value": rat(&v) }), || rat(&v));
        }
        DenCmd::Value { lattice, x, almost_self_dual } => {
            let l = lattice.load(params)?;
            let x = parse_rational(&x)?;
            let v = if almost_self_dual { den_lambda_poly(&l)?.eval(&x) } else { den_value(&l, &x)? };
            emit(js, json!({ "x": rat(&x), "value": rat(&v) }), || rat(&v));
        }
        DenCmd::Whittaker { lattice, almost_self_dual } => {
            let l = lattice.load(params)?;
            let level = if almost_self_dual { Level::AlmostSelfdual } else { Level::Selfdual };
            let w = whittaker_factors(&l, level)?;
            emit(js, serde_json::to_value(&w)?, || {
                let d = w.derivative_log_q2.as_deref().map_or(String::new(), |d| format!("\nderivative {d} * {}", w.log_factor));
                format!("factor {}\nvalue {}{d}", w.factor, w.value)
            });
        }
    }
    Ok(())
}

fn flat_pair(args: &FlatArgs, params: FieldParams) -> anyhow::Result<FlatPair> {
    let flat = lattice_from_json(&read_json(&args.flat)?, params)?;
    let x = vector_from_json(&read_json(&args.x)?, params)?;
    Ok(FlatPair::new(flat, x)?)
}

fn decomp(cmd: DecompCmd, params: FieldParams, js: bool) -> anyhow::Result<Outcome> {
    match cmd {
        DecompCmd::Eval(args) => {
            let fp = flat_pair(&args, params)?;
            let ctx = FlatContext::new(fp.lflat())?;
            let (full, hor, ver) = ctx.eval(fp.x())?;
            emit(js, json!({ "pden": rat(&full), "horizontal": rat(&hor), "vertical": rat(&ver) }), || {
                format!("pden {}\nhorizontal {}\nvertical {}", rat(&full), rat(&hor), rat(&ver))
            });
        }
        DecompCmd::FourierCheck(args) => {
            let fp = flat_pair(&args, params)?;
            let (full, hor) = fourier_pden_perp(&fp)?;
            let ok = full == hor;
            emit(js, json!({ "hat_full": rat(&full), "hat_horizontal": rat(&hor), "holds": ok }), || {
                format!("hat_full {}\nhat_horizontal {}\nholds {ok}", rat(&full), rat(&hor))
            });
            if !ok {
                return Ok(Outcome::Failed);
            }
        }
        DecompCmd::DiffCheck(args) => {
            let fp = flat_pair(&args, params)?;
            let (a, b) = diff_identity_check(&fp)?;
            emit(js, json!({ "full": a, "horizontal": b }), || format!("full {a}\nhorizontal {b}"));
            if !(a && b) {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn grid_from_file(path: &Path) -> anyhow::Result<Vec<Vec<i64>>> {
    let v = read_json(path)?;
    if let Some(list) = v.as_array() {
        return list
            .iter()
            .map(|row| serde_json::from_value::<Vec<i64>>(row.clone()).map_err(|e| usage(format!("bad invariant list: {e}"))))
            .collect();
    }
    let field = |k: &str| v.get(k).and_then(Value::as_i64).ok_or_else(|| usage(format!("grid spec needs {k}")));
    Ok(full_grid(field("max_rank")? as usize, field("max_val")?))
}

fn kr(cmd: KrCmd, params: FieldParams, js: bool) -> anyhow::Result<Outcome> {
    match cmd {
        KrCmd::Int { lattice, case } => {
            let l = lattice.load(params)?;
            let r = match case {
                IntCase::Selfdual => int_selfdual(&l)?,
                IntCase::Asd => int_almost_selfdual(&l)?,
                IntCase::Prime => int_prime(&l)?,
            };
            emit(js, int_json(&r), || rat(&r.value));
        }
        KrCmd::VerifyN3 { flat, inv } => {
            let flat = match (flat, inv) {
                (Some(path), _) => lattice_from_json(&read_json(&path)?, params)?,
                (None, Some(inv)) => standard_flat(params, &inv)?,
                (None, None) => bail!(usage("give --flat or --inv")),
            };
            let rep = vertical_identity_on_grid(&flat, 1 << 22)?;
            let ok = rep.holds();
            emit(
                js,
                json!({ "points": rep.points, "in_support": rep.in_support, "mismatches": rep.mismatches.len(), "holds": ok }),
                || format!("points {}\nin_support {}\nmismatches {}\nholds {ok}", rep.points, rep.in_support, rep.mismatches.len()),
            );
            if !ok {
                return Ok(Outcome::Failed);
            }
        }
        KrCmd::Table { inv_grid, max_rank, max_val, out } => {
            let grid = match inv_grid {
                Some(path) => grid_from_file(&path)?,
                None => full_grid(max_rank, max_val),
            };
            let out = if js { OutFormat::Json } else { out };
            print!("{}", table::render(params, &grid, out)?);
        }
    }
    Ok(Outcome::Done)
}

fn verify(args: VerifyArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let suites: Vec<Suite> = if args.suite == "all" { Suite::ALL.to_vec() } else { vec![args.suite.parse()?] };
    let config = SuiteConfig { primes: vec![cfg.params()?], seed: args.seed };
    let mut all_ok = true;
    for s in suites {
        let rep = run_suite(s, &config)?;
        all_ok &= rep.passed();
        if cfg.json {
            println!("{}", serde_json::to_string(&rep)?);
        } else {
            let status = if rep.passed() { "PASS" } else { "FAIL" };
            println!("{status} {s}: {} checked, {} failed ({:.2}s)", rep.checked, rep.failures.len(), rep.elapsed.as_secs_f64());
            for f in &rep.failures {
                println!("  failed: {f}");
            }
            for n in &rep.notes {
                println!("  note: {n}");
            }
        }
    }
    Ok(if all_ok { Outcome::Done } else { Outcome::Failed })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => EXIT_BUDGET,
        Some(Error::Inconsistent(_)) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
