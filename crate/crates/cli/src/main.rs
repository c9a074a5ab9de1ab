mod render;

use std::process::ExitCode;
use std::str::FromStr;

use chaingamma_core::chain::{format_rational, rat};
use chaingamma_core::forms::{
    euler_matrix, euler_matrix_int, grading_matrix, intersection_matrix, pairing_matrix, serre_matrix,
};
use chaingamma_core::json::{int_matrix_value, rational_list};
use chaingamma_core::lattice::{braid_word_apply, BraidWord, ExceptionalSequence};
use chaingamma_core::numerics::{
    central_charge, ch_gamma_matrix, format_float, ComplexRecord, modulus, orthant_integral_closed_form,
    orthant_integral_quadrature,
};
use chaingamma_core::verify::{run_named_suite, Suite};
use chaingamma_core::{new_chain, ChainDescriptor, Error, IntMatrix, Monomial, PrecContext};
use clap::{Args, Parser, Subcommand, ValueEnum};
use render::{table, Format, Rendered};
use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::json;

/// Invariants and Gamma integral structure checks for chain polynomials
/// `z1^a1 z2 + z2^a2 z3 + … + zn^an`.
#[derive(Debug, Parser)]
#[command(name = "chaingamma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Exponents a_1,…,a_n, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    chain: Vec<i64>,
    /// Working precision in decimal digits.
    #[arg(long, env = "CHAINGAMMA_PREC", default_value_t = 128)]
    prec: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Eta,
    Qtilde,
    Chi,
    Serre,
    Chgamma,
    Intersection,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Degrees, Milnor number, weights, index set, monomial bases and ages.
    Info {
        #[command(flatten)]
        common: Common,
    },
    /// Print one of the structure matrices.
    Matrix {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        /// all, thm1, thm2, exact, gamma or d3.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Central charges Z(E_1), …, Z(E_jmax).
    Charges {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
        jmax: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Apply a word such as "b1 b2^-1 p3" to an exceptional sequence.
    Braid {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// "standard" or explicit vectors such as "1,0;1,1".
        #[arg(long, default_value = "standard", allow_hyphen_values = true)]
        seed: String,
        #[command(flatten)]
        common: Common,
    },
    /// Orthant integrals over the top monomial basis.
    Integral {
        /// A single monomial exponent list, e.g. "1,0"; all of B' by default.
        #[arg(long)]
        k: Option<String>,
        /// Cross-check the closed form with adaptive quadrature (n ≤ 2).
        #[arg(long)]
        quadrature: bool,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyChain
            | Error::InvalidExponent { .. }
            | Error::DegreeOverflow
            | Error::IndexNotInSet { .. }
            | Error::MonomialOutOfRange { .. }
            | Error::WrongLevel { .. }
            | Error::RankLimit { .. }
            | Error::PrecisionTooLow { .. }
            | Error::DimensionTooLarge { .. }
            | Error::InvalidArgument(_)
            | Error::IndexOutOfRange { .. }
            | Error::MalformedWord(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// Output plus whether every check it reports passed.
struct Outcome {
    rendered: Rendered,
    passed: bool,
}

impl From<Rendered> for Outcome {
    fn from(rendered: Rendered) -> Self {
        Outcome { rendered, passed: true }
    }
}

const TABLE_DIGITS: u32 = 20;

fn setup(common: &Common) -> Result<(ChainDescriptor, PrecContext), Failure> {
    let c = new_chain(&common.chain)?;
    let ctx = PrecContext::new(common.prec)?;
    Ok((c, ctx))
}

fn labels<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn cmd_info(common: &Common) -> Result<Outcome, Failure> {
    let c = new_chain(&common.chain)?;
    let n = c.n();
    let weights = rational_list(&c.rational_weights());
    let index_set = labels(&c.index_set());
    let (basis, top) = c.monomial_basis();
    let (basis, top) = (labels(&basis), labels(&top));
    let mut ages = Vec::new();
    for kappa in c.top_set(n) {
        ages.push((kappa, format_rational(&c.symmetry_generator(kappa)?.age)));
    }
    let json = json!({
        "chain": c.exponents(),
        "n": n,
        "degrees": c.degrees(),
        "mu": c.mu(),
        "weights": weights,
        "index_set": index_set,
        "monomial_basis": basis,
        "top_monomial_basis": top,
        "ages": ages.iter().map(|(k, a)| json!({"kappa": k, "age": a})).collect::<Vec<_>>(),
    });
    let join = |v: &[String], sep: &str| v.join(sep);
    let ages_s: Vec<String> = ages.iter().map(|(k, a)| format!("{k}:{a}")).collect();
    let fields = vec![
        ("chain", join(&labels(c.exponents()), ",")),
        ("n", n.to_string()),
        ("degrees", join(&labels(c.degrees()), ",")),
        ("mu", c.mu().to_string()),
        ("weights", join(&weights, ",")),
        ("index_set", join(&index_set, " ")),
        ("monomial_basis", join(&basis, " ")),
        ("top_monomial_basis", join(&top, " ")),
        ("ages", join(&ages_s, " ")),
    ];
    let rows: Vec<Vec<String>> = fields
        .iter()
        .map(|(k, v)| vec![k.to_string(), v.clone()])
        .collect();
    let mut csv = vec![vec!["field".to_string(), "value".to_string()]];
    csv.extend(rows.iter().cloned());
    Ok(Rendered { json, csv, table: table(&rows) }.into())
}

fn cmd_matrix(which: Which, common: &Common) -> Result<Outcome, Failure> {
    let (c, ctx) = setup(common)?;
    let r = match which {
        Which::Eta => render::exact_matrix("eta", &pairing_matrix(&c)?),
        Which::Qtilde => render::exact_matrix("qtilde", &grading_matrix(&c)?),
        Which::Chi => render::exact_matrix("chi", &euler_matrix(&c)?),
        Which::Serre => render::exact_matrix("serre", &serre_matrix(&c)?),
        Which::Intersection => render::exact_matrix("intersection", &intersection_matrix(&c)?),
        Which::Chgamma => {
            render::complex_matrix("chgamma", &ch_gamma_matrix(&c, &ctx)?, TABLE_DIGITS.min(ctx.digits()))
        }
    };
    Ok(r.into())
}

fn cmd_verify(suite: &str, common: &Common) -> Result<Outcome, Failure> {
    let suite = Suite::from_str(suite)?;
    let (c, ctx) = setup(common)?;
    let report = run_named_suite(&c, &ctx, suite)?;
    let mut csv = vec![vec![
        "check".to_string(),
        "status".to_string(),
        "residual".to_string(),
        "tolerance".to_string(),
        "wall_ms".to_string(),
    ]];
    for r in &report.checks {
        csv.push(vec![
            r.name.clone(),
            r.status.to_string(),
            r.residual.clone().unwrap_or_default(),
            r.tolerance.clone().unwrap_or_default(),
            format!("{:.3}", r.wall_ms),
        ]);
    }
    Ok(Outcome {
        passed: report.passed(),
        rendered: Rendered {
            json: serde_json::to_value(&report).map_err(|e| Failure::Runtime(e.to_string()))?,
            csv,
            table: report.to_table(),
        },
    })
}

fn cmd_charges(jmax: i64, common: &Common) -> Result<Outcome, Failure> {
    let (c, ctx) = setup(common)?;
    let bits = ctx.bits();
    let shown = TABLE_DIGITS.min(ctx.digits());
    let step = rat(if c.n() % 2 == 1 { -1 } else { 1 }, c.order() as i128);
    let rho = ctx.root_of_unity(&step);
    let two_pi = Float::with_val(bits, ctx.pi() * 2u32);
    let mut zs = Vec::new();
    for j in 1..=jmax {
        zs.push(central_charge(&c, j, &ctx)?);
    }
    let mut worst = ctx.float(0.0);
    for w in zs.windows(2) {
        let ratio = Complex::with_val(bits, &w[1] / &w[0]);
        let e = modulus(&Complex::with_val(bits, ratio - &rho));
        if e > worst {
            worst = e;
        }
    }
    let passed = worst <= ctx.tolerance();
    let mut entries = Vec::new();
    let mut rows = vec![labels(&["j", "re", "im", "modulus", "phase/2pi"])];
    for (j, z) in (1..).zip(&zs) {
        let m = modulus(z);
        let phase = Float::with_val(bits, z.arg_ref()) / &two_pi;
        let show = |digits: u32| {
            let rec = ComplexRecord::new(z, digits);
            let tiny = Float::with_val(bits, 10).pow(-(digits as i32));
            let p = if phase.clone().abs() <= tiny { "0".to_string() } else { format_float(&phase, digits) };
            [rec.re, rec.im, format_float(&m, digits), p]
        };
        let [re, im, modl, ph] = show(ctx.digits());
        entries.push(json!({ "j": j, "re": re, "im": im, "modulus": modl, "phase": ph }));
        rows.push(std::iter::once(j.to_string()).chain(show(shown)).collect());
    }
    let residual = chaingamma_core::numerics::format_residual(&worst);
    let json = json!({
        "chain": c.exponents(),
        "digits": ctx.digits(),
        "rotation": format_rational(&step),
        "rotation_residual": residual,
        "rotation_holds": passed,
        "charges": entries,
    });
    let csv = rows.clone();
    let mut text = table(&rows);
    text.push_str(&format!(
        "Z(E_{{j+1}}) = e[{}] Z(E_j): {} (max deviation {residual})\n",
        format_rational(&step),
        if passed { "holds" } else { "FAILS" }
    ));
    Ok(Outcome {
        rendered: Rendered { json, csv, table: text },
        passed,
    })
}

fn parse_seed(seed: &str, form: IntMatrix) -> Result<ExceptionalSequence, Failure> {
    if seed == "standard" {
        return Ok(ExceptionalSequence::standard_with_form(form));
    }
    let bad = || Failure::Usage(format!("malformed seed basis {seed:?}"));
    let vectors = seed
        .split(';')
        .map(|v| {
            v.split(',')
                .map(|x| x.trim().parse::<i128>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExceptionalSequence::from_vectors(vectors, form)?)
}

/// `[0, 1]` → `e2`, `[1, -2]` → `e1 - 2e2`.
fn combination(v: &[i128]) -> String {
    let mut out = String::new();
    for (i, &x) in v.iter().enumerate().filter(|(_, x)| **x != 0) {
        let sign = if x < 0 { "-" } else { "+" };
        let mag = if x.abs() == 1 { String::new() } else { x.abs().to_string() };
        if out.is_empty() {
            out = format!("{}{mag}e{}", if x < 0 { "-" } else { "" }, i + 1);
        } else {
            out.push_str(&format!(" {sign} {mag}e{}", i + 1));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn cmd_braid(word: &str, seed: &str, common: &Common) -> Result<Outcome, Failure> {
    let c = new_chain(&common.chain)?;
    let word = BraidWord::from_str(word)?;
    let start = parse_seed(seed, euler_matrix_int(&c)?)?;
    let out = braid_word_apply(&start, &word)?;
    let gram = out.gram()?;
    let vectors: Vec<Vec<String>> = out
        .vectors()
        .iter()
        .map(|v| v.iter().map(ToString::to_string).collect())
        .collect();
    let json = json!({
        "chain": c.exponents(),
        "word": word.to_string(),
        "vectors": vectors,
        "gram": int_matrix_value(&gram),
        "exceptional": gram.is_upper_unitriangular(),
    });
    let names: Vec<String> = out.vectors().iter().map(|v| combination(v)).collect();
    let mut text = format!("({})\n\ngram\n", names.join(", "));
    text.push_str(&table(&gram.to_rows().iter().map(|r| labels(r)).collect::<Vec<_>>()));
    let mut csv = vec![std::iter::once("vector".to_string())
        .chain((1..=c.rank()).map(|i| format!("e{i}")))
        .collect::<Vec<_>>()];
    for (i, v) in vectors.iter().enumerate() {
        csv.push(std::iter::once(format!("{}", i + 1)).chain(v.iter().cloned()).collect());
    }
    Ok(Rendered { json, csv, table: text }.into())
}

fn cmd_integral(k: Option<&str>, quadrature: bool, common: &Common) -> Result<Outcome, Failure> {
    let (c, ctx) = setup(common)?;
    let ks = match k {
        Some(s) => vec![Monomial::from_str(s)?],
        None => c.monomial_basis().1,
    };
    let tol = if c.n() == 1 { 1e-6 } else { 1e-4 };
    let shown = TABLE_DIGITS.min(ctx.digits());
    let mut passed = true;
    let mut entries = Vec::new();
    let mut header = labels(&["k", "closed_form"]);
    if quadrature {
        header.extend(labels(&["quadrature", "rel_error"]));
    }
    let mut rows = vec![header];
    for k in &ks {
        let closed = orthant_integral_closed_form(&c, k, &ctx)?;
        let mut entry = json!({ "k": k.to_string(), "closed_form": format_float(&closed, ctx.digits()) });
        let mut row = vec![k.to_string(), format_float(&closed, shown)];
        if quadrature {
            let q = orthant_integral_quadrature(&c, k, tol / 4.0)?;
            let rel = (q - closed.to_f64()).abs() / closed.to_f64();
            passed &= rel <= tol;
            entry["quadrature"] = json!(q);
            entry["rel_error"] = json!(rel);
            row.push(format!("{q:.12e}"));
            row.push(format!("{rel:.3e}"));
        }
        entries.push(entry);
        rows.push(row);
    }
    let mut json = json!({ "chain": c.exponents(), "digits": ctx.digits(), "integrals": entries });
    if quadrature {
        json["tolerance"] = json!(tol);
    }
    Ok(Outcome {
        rendered: Rendered { json, csv: rows.clone(), table: table(&rows) },
        passed,
    })
}

fn run(cli: &Cli) -> (Result<Outcome, Failure>, Format) {
    match &cli.command {
        Command::Info { common } => (cmd_info(common), common.format),
        Command::Matrix { which, common } => (cmd_matrix(*which, common), common.format),
        Command::Verify { suite, common } => (cmd_verify(suite, common), common.format),
        Command::Charges { jmax, common } => (cmd_charges(*jmax, common), common.format),
        Command::Braid { word, seed, common } => (cmd_braid(word, seed, common), common.format),
        Command::Integral { k, quadrature, common } => {
            (cmd_integral(k.as_deref(), *quadrature, common), common.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        (Ok(out), format) => match out.rendered.emit(format) {
            Ok(text) => {
                print!("{text}");
                ExitCode::from(if out.passed { 0 } else { 1 })
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        (Err(Failure::Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Err(Failure::Runtime(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
