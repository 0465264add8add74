//! The `strata0` command line.

pub mod parse;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::divisor::{d_mu_boundary_form, d_mu_psi_form, volume};
use crate::error::{Error, Result};
use crate::family::{classify_codim2_case, path_ratio_constant, verify_ratio_identity};
use crate::intersection::{product_number, DivisorExpression, DivisorSymbol};
use crate::strata::{
    boundary_weight, enumerate_p_hat, enumerate_stable_trees, enumerate_two_block,
    exceptional_divisor, exponent_vector, fiber_projective_dim, ideal_generators, in_ideal_support,
    m_factors, m_value, principal_subcurves, validate_signature, vanishing_orders, Signature,
    StableTree, TwoBlockPartition,
};
use crate::{Marks, Rational};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONTRIVIAL: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

const FORMAT_HELP: &str = "\
Signatures: --d 2 --kappa=-1,-1,-1,-1,-1,1

Tree spec (--tree, --chart): marking groups joined by ';' (one per vertex, may be empty),
then edges 'j-k' between 0-based vertex indices, separated by spaces:
    '1,2;3,4,5;6,7 0-1 0-2'
A chart may also give 't[j-k]=p/q' (smoothing parameter), 'a[i]=p/q' or 'a[i]=inf'
(coordinate of marking i on its own line) and 'b[j-k]=p/q' (the node's coordinate on
line j). Anything omitted is drawn at random from --seed.

Factor spec (--factors): classes separated by ';', each a signed sum of '[coef*]symbol'
with symbols psiI, D{i,j,..} (either side of a boundary divisor), Dmu (boundary form)
and DmuPsi (psi form):
    'Dmu; 2*psi1 - 1/2*D{1,2}'

Exit codes: 0 success, 2 invalid input, 3 nonzero exceptional divisor, 4 verification failed.";

#[derive(Parser, Debug)]
#[command(name = "strata0", version, about = "Exact invariants of genus-0 strata of d-differentials", after_help = FORMAT_HELP)]
struct Cli {
    #[arg(long, global = true)]
    d: Option<i64>,
    /// Orders k_1,..,k_n, comma separated.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_hyphen_values = true,
        num_args = 1
    )]
    kappa: Option<Vec<i64>>,
    /// Number of markings, for `intersect` without a signature.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of nodes for the stratum-by-stratum triviality check.
    #[arg(long, global = true)]
    max_codim: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Boundary divisors of M_0,n with their weights mu_S.
    Boundary,
    /// Boundary divisors of the blow-up with m(S).
    Phat,
    /// Exceptional divisor coefficients and per-node vanishing orders.
    Exceptional,
    /// Principal subcurves, exponent vectors and ideal generators of one stratum.
    Principal {
        #[arg(long)]
        tree: String,
    },
    /// The divisor D_mu in boundary form and in psi form.
    Divisor,
    /// Top intersection product of n-3 divisor classes.
    Intersect {
        #[arg(long)]
        factors: String,
    },
    /// Volume of the projectivized stratum.
    Volume,
    /// Check the section ratio identities on a local chart.
    VerifyFamily {
        #[arg(long)]
        chart: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
}

/// Everything a run needs, after argument parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub d: Option<i64>,
    pub kappa: Option<Vec<i64>>,
    pub n: Option<usize>,
    pub command: Command,
    pub format: OutputFormat,
    pub seed: u64,
    pub samples: usize,
    pub max_codim: Option<usize>,
    pub out: Option<PathBuf>,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            d: c.d,
            kappa: c.kappa,
            n: c.n,
            command: c.command,
            format: if c.json {
                OutputFormat::Json
            } else {
                OutputFormat::Table
            },
            seed: c.seed.unwrap_or(DEFAULT_SEED),
            samples: c.samples as usize,
            max_codim: c.max_codim,
            out: c.out,
        }
    }
}

struct Outcome {
    json: Value,
    table: String,
    exit: i32,
}

fn rat(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

fn blocks(bs: &[Marks]) -> Value {
    Value::Array(bs.iter().map(|b| json!(b.to_vec())).collect())
}

fn list(m: Marks) -> String {
    m.to_vec()
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn show_blocks(bs: &[Marks]) -> String {
    bs.iter()
        .map(|b| format!("{{{}}}", list(*b)))
        .collect::<Vec<_>>()
        .join(" | ")
}

impl RunConfig {
    fn signature(&self) -> Result<Signature> {
        match (self.d, &self.kappa) {
            (Some(d), Some(k)) => validate_signature(d, k),
            _ => Err(Error::Usage("this command needs --d and --kappa".into())),
        }
    }

    fn header(&self, sig: &Signature) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("d".into(), json!(sig.d()));
        m.insert("kappa".into(), json!(sig.kappa()));
        m
    }
}

fn symbol_json(sym: &DivisorSymbol, sig: Option<&Signature>) -> Value {
    match sym {
        DivisorSymbol::Psi(i) => json!({ "psi": i }),
        DivisorSymbol::Boundary(s) => {
            let (a, b) = match sig {
                Some(sig) => {
                    let p = TwoBlockPartition::from_split(*s, sig);
                    (p.i0, p.i1)
                }
                None => (s.near(), s.far()),
            };
            json!({ "boundary": blocks(&[a, b]) })
        }
    }
}

fn expression_json(e: &DivisorExpression, sig: Option<&Signature>) -> Value {
    Value::Array(
        e.iter()
            .map(|(s, c)| json!({ "symbol": symbol_json(s, sig), "coefficient": rat(c) }))
            .collect(),
    )
}

fn cmd_boundary(cfg: &RunConfig) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let mut rows = Vec::new();
    let mut table = String::from("I0 | I1\tmu_S\n");
    for p in enumerate_two_block(&sig) {
        let mu = boundary_weight(&p, &sig)?;
        table.push_str(&format!("{}\t{mu}\n", show_blocks(&[p.i0, p.i1])));
        rows.push(json!({ "blocks": blocks(&[p.i0, p.i1]), "mu": rat(&mu) }));
    }
    let mut j = cfg.header(&sig);
    table.push_str(&format!("{} partitions\n", rows.len()));
    j.insert("partitions".into(), Value::Array(rows));
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: EXIT_OK,
    })
}

fn cmd_phat(cfg: &RunConfig) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let mut rows = Vec::new();
    let mut table = String::from("r\tm\tblocks\n");
    for p in enumerate_p_hat(&sig) {
        let m = m_value(&p, &sig)?;
        table.push_str(&format!("{}\t{m}\t{}\n", p.r(), show_blocks(p.blocks())));
        rows.push(json!({ "blocks": blocks(p.blocks()), "r": p.r(), "m": m.to_string() }));
    }
    let mut j = cfg.header(&sig);
    table.push_str(&format!("{} partitions\n", rows.len()));
    j.insert("partitions".into(), Value::Array(rows));
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: EXIT_OK,
    })
}

fn cmd_exceptional(cfg: &RunConfig) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let e = exceptional_divisor(&sig);
    let mut rows = Vec::new();
    let mut table = String::from("coefficient\tm_j\torders\tblocks\n");
    for (p, c) in e.support() {
        let factors: Vec<String> = m_factors(p, &sig)?.iter().map(|x| x.to_string()).collect();
        let orders: Vec<String> = vanishing_orders(p, &sig)?
            .iter()
            .map(|x| x.to_string())
            .collect();
        table.push_str(&format!(
            "{c}\t{}\t{}\t{}\n",
            factors.join(","),
            orders.join(","),
            show_blocks(p.blocks())
        ));
        rows.push(json!({
            "blocks": blocks(p.blocks()),
            "coefficient": rat(c),
            "m_factors": factors,
            "vanishing_orders": orders,
        }));
    }
    let mut j = cfg.header(&sig);
    j.insert("trivial".into(), json!(e.is_zero()));
    table.push_str(&format!(
        "exceptional divisor {}\n",
        if e.is_zero() { "is zero" } else { "is nonzero" }
    ));
    if let Some(k) = cfg.max_codim {
        let n = sig.n();
        let k = k.min(n - 3);
        let none = enumerate_stable_trees(n, k)
            .iter()
            .all(|t| !in_ideal_support(t, &sig));
        j.insert("max_codim".into(), json!(k));
        j.insert("no_multi_principal_strata".into(), json!(none));
        table.push_str(&format!(
            "strata with <= {k} nodes and several principal subcurves: {}\n",
            if none { "none" } else { "present" }
        ));
    }
    j.insert("terms".into(), Value::Array(rows));
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: EXIT_OK,
    })
}

fn cmd_principal(cfg: &RunConfig, spec: &str) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let tree = parse::parse_tree(spec, sig.n())?;
    let pa = principal_subcurves(&tree, &sig);
    let betas: Vec<Vec<i64>> = (0..tree.num_vertices())
        .map(|v| exponent_vector(&tree, v, &sig).0)
        .collect();
    let gens: Vec<Vec<i64>> = ideal_generators(&tree, &sig)
        .into_iter()
        .map(|g| g.0)
        .collect();
    let dim = fiber_projective_dim(&tree, &sig);
    let support = in_ideal_support(&tree, &sig);
    let mut table = format!(
        "tree: {tree}\nprincipal subcurves: {:?}\nother vertices: {:?}\n",
        pa.principal, pa.other
    );
    for (v, b) in betas.iter().enumerate() {
        table.push_str(&format!("beta_{v} = {b:?}\n"));
    }
    table.push_str(&format!(
        "generators: {gens:?}\nfiber dimension: {dim}\nin support: {support}\n"
    ));
    let mut j = cfg.header(&sig);
    j.insert("tree".into(), json!(tree.to_string()));
    j.insert("edges".into(), json!(tree.edges()));
    j.insert("principal".into(), json!(pa.principal));
    j.insert("other".into(), json!(pa.other));
    j.insert("beta".into(), json!(betas));
    j.insert("generators".into(), json!(gens));
    j.insert("fiber_dim".into(), json!(dim));
    j.insert("in_support".into(), json!(support));
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: EXIT_OK,
    })
}

fn cmd_divisor(cfg: &RunConfig) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let b = d_mu_boundary_form(&sig);
    let p = d_mu_psi_form(&sig);
    let table = format!("boundary form: {b}\npsi form: {p}\n");
    let mut j = cfg.header(&sig);
    j.insert("boundary_form".into(), expression_json(&b, Some(&sig)));
    j.insert("psi_form".into(), expression_json(&p, Some(&sig)));
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: EXIT_OK,
    })
}

fn cmd_intersect(cfg: &RunConfig, spec: &str) -> Result<Outcome> {
    let sig = match (cfg.d, &cfg.kappa) {
        (None, None) => None,
        _ => Some(cfg.signature()?),
    };
    let n = match (&sig, cfg.n) {
        (Some(s), Some(n)) if s.n() != n => {
            return Err(Error::Usage(format!(
                "--n {n} disagrees with kappa of length {}",
                s.n()
            )))
        }
        (Some(s), _) => s.n(),
        (None, Some(n)) => n,
        (None, None) => return Err(Error::Usage("intersect needs --n or --d/--kappa".into())),
    };
    let factors = parse::parse_factors(spec, n, sig.as_ref())?;
    let value = product_number(n, &factors)?;
    let mut j = serde_json::Map::new();
    j.insert("n".into(), json!(n));
    j.insert(
        "factors".into(),
        Value::Array(
            factors
                .iter()
                .map(|f| expression_json(f, sig.as_ref()))
                .collect(),
        ),
    );
    j.insert("value".into(), rat(&value));
    Ok(Outcome {
        json: Value::Object(j),
        table: format!("{value}\n"),
        exit: EXIT_OK,
    })
}

fn cmd_volume(cfg: &RunConfig) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let v = volume(&sig)?;
    let mut j = cfg.header(&sig);
    j.insert(
        "volume".into(),
        json!({
            "coefficient": rat(&v.coefficient),
            "pi_power": v.pi_power,
            "signed_decimal": v.signed_decimal(),
            "abs_decimal": v.abs_decimal(),
        }),
    );
    j.insert("abs_coefficient".into(), rat(&v.abs_coefficient()));
    j.insert("intersection_number".into(), rat(&v.intersection_number));
    j.insert("warnings".into(), json!(v.warnings));
    let table = format!(
        "volume = ({}) * pi^{} = {}\n|volume| = {}\nD_mu^{} = {}\n",
        v.coefficient,
        v.pi_power,
        v.signed_decimal(),
        v.abs_decimal(),
        sig.n() - 3,
        v.intersection_number
    );
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: EXIT_OK,
    })
}

fn codim2_label(sig: &Signature, tree: &StableTree) -> Option<String> {
    if tree.num_vertices() != 3 {
        return None;
    }
    let center = (0..3).find(|&v| tree.degree(v) == 2)?;
    let outer: Vec<usize> = tree.neighbors(center);
    let bl = [
        tree.vertices()[center],
        tree.vertices()[outer[0]],
        tree.vertices()[outer[1]],
    ];
    classify_codim2_case(sig, &bl).ok().map(|c| c.to_string())
}

fn cmd_verify_family(cfg: &RunConfig, spec: &str) -> Result<Outcome> {
    let sig = cfg.signature()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let chart = parse::parse_chart(spec, &sig, &mut rng)?;
    let tree = chart.tree().clone();
    let mut pairs = Vec::new();
    let mut table = format!(
        "chart: {tree}\nseed: {}\nsamples: {}\n",
        cfg.seed, cfg.samples
    );
    let mut all = true;
    for &(a, b) in tree.edges() {
        for (j, k) in [(a, b), (b, a)] {
            let f = path_ratio_constant(&chart, j, k)?;
            let ok = verify_ratio_identity(&chart, j, k, cfg.samples, &mut rng)?;
            all &= ok;
            table.push_str(&format!(
                "{j} -> {k}\t{}\tf = {f}\n",
                if ok { "pass" } else { "FAIL" }
            ));
            pairs.push(json!({ "j": j, "k": k, "f": rat(&f), "passed": ok }));
        }
    }
    let betas: Vec<Vec<i64>> = (0..tree.num_vertices())
        .map(|v| exponent_vector(&tree, v, &sig).0)
        .collect();
    let case = codim2_label(&sig, &tree);
    if let Some(c) = &case {
        table.push_str(&format!("codimension-two case: ({c})\n"));
    }
    let mut j = cfg.header(&sig);
    j.insert("chart".into(), json!(tree.to_string()));
    j.insert("seed".into(), json!(cfg.seed));
    j.insert("samples".into(), json!(cfg.samples));
    j.insert(
        "t".into(),
        Value::Array(chart.params().iter().map(rat).collect()),
    );
    j.insert("beta".into(), json!(betas));
    j.insert("pairs".into(), Value::Array(pairs));
    j.insert("all_passed".into(), json!(all));
    j.insert("codim2_case".into(), json!(case));
    Ok(Outcome {
        json: Value::Object(j),
        table,
        exit: if all { EXIT_OK } else { EXIT_VERIFY_FAILED },
    })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExceptionalDivisorNontrivial => EXIT_NONTRIVIAL,
        Error::SamplingExhausted(_) => EXIT_VERIFY_FAILED,
        _ => EXIT_INVALID,
    }
}

/// Execute a parsed configuration, writing results to `out` and diagnostics to `err`.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cfg.command {
        Command::Boundary => cmd_boundary(cfg),
        Command::Phat => cmd_phat(cfg),
        Command::Exceptional => cmd_exceptional(cfg),
        Command::Principal { tree } => cmd_principal(cfg, tree),
        Command::Divisor => cmd_divisor(cfg),
        Command::Intersect { factors } => cmd_intersect(cfg, factors),
        Command::Volume => cmd_volume(cfg),
        Command::VerifyFamily { chart } => cmd_verify_family(cfg, chart),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let text = serde_json::to_string_pretty(&outcome.json).expect("json values serialize");
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_INVALID;
        }
    }
    let _ = match cfg.format {
        OutputFormat::Json => writeln!(out, "{text}"),
        OutputFormat::Table => write!(out, "{}", outcome.table),
    };
    if outcome.exit == EXIT_VERIFY_FAILED {
        let _ = writeln!(err, "verification failed");
    }
    outcome.exit
}

/// Parse `argv` (program name first) and run.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&RunConfig::from(cli), out, err),
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_INVALID
            }
        }
    }
}
