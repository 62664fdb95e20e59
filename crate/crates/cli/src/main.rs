use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use walg::error::Error;
use walg::screening::{
    exponential_screenings, expected_character, generator_weights, generic_screenings, kernel, kernel_reports,
    q_apply, Ambient, Level, ScreeningOp,
};
use walg::superdata::{good_grading, preset, restricted_base, DatumFile, GoodGrading, SuperRootDatum};
use walg::vertexcalc::axioms::run_suite;
use walg::walgebras::brst::h0_basis;
use walg::walgebras::miura::proportionality;
use walg::walgebras::{
    build_complex, build_w2n, build_wbn, cohomology_dims, miura_project, verify_fs, verify_wbn_screening,
    wakimoto_pi, CheckReport, GammaMode,
};

/// Exact vertex algebra computations for affine W-algebras.
///
/// All weights on the command line are doubled: `--max-weight 12` means conformal weight 6.
#[derive(Parser)]
#[command(name = "walg", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Roots, grading, restricted base and W-generator weights.
    Info(Common),
    /// Screening kernels weight by weight.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Screenings::Generic)]
        screenings: Screenings,
    },
    /// Named verification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
        /// Rank parameter for wbn, fs and wakimoto.
        #[arg(long)]
        n: Option<usize>,
        /// Doubled weight bound for sampled fields (wick).
        #[arg(long, default_value_t = 6)]
        weight: i64,
        /// Number of sampled fields (wick).
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "sl2-regular")]
    preset: String,
    /// Datum file (JSON).
    #[arg(long)]
    datum: Option<PathBuf>,
    /// Doubled simple-root labels, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    labels: Option<Vec<i64>>,
    /// Roots of the support of f, `;` separated, each comma separated.
    #[arg(long, allow_hyphen_values = true)]
    f_support: Option<String>,
    /// `symbolic` or a rational `p/q`.
    #[arg(long, default_value = "symbolic")]
    level: String,
    /// Doubled conformal weight bound.
    #[arg(long, default_value_t = 8)]
    max_weight: i64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Screenings {
    Generic,
    Exponential,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Wick,
    Brst,
    Wbn,
    Fs,
    Wakimoto,
    Miura,
}

enum Failure {
    Usage(String),
    Check,
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidArgument(_)
            | Error::InvalidDatum(_)
            | Error::NotGoodGrading(_)
            | Error::DegreeMismatch(_)
            | Error::CriticalLevel
            | Error::NonCartanZeroPart => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Info(c) => {
            let g = load_grading(&c)?;
            let out = info(&g, c.max_weight)?;
            emit(&c, &out, info_table(&out))
        }
        Cmd::Kernel { common: c, screenings } => {
            let g = load_grading(&c)?;
            let level = parse_level(&c)?;
            let amb = Ambient::new(&g)?;
            let ops = screening_ops(&amb, screenings)?;
            let reps = kernel_reports(&amb, &ops, c.max_weight, &level)?;
            let ok = reps.iter().all(|r| r.matches() && r.rechecked);
            let out = json!({
                "algebra": g.datum.name,
                "level": level.to_string(),
                "screenings": ops.iter().map(|o| o.describe(&amb)).collect::<Vec<_>>(),
                "reports": reps,
                "status": status(ok),
            });
            let table = reps
                .iter()
                .map(|r| {
                    format!(
                        "{:>6} {:>8} {:>8} {:>8}",
                        half(r.weight2),
                        r.ambient_dim,
                        r.kernel_dim,
                        r.expected_dim
                    )
                })
                .collect::<Vec<_>>();
            let mut t = vec![format!("{:>6} {:>8} {:>8} {:>8}", "weight", "ambient", "kernel", "expected")];
            t.extend(table);
            emit(&c, &out, t.join("\n"))?;
            verdict(ok)
        }
        Cmd::Verify {
            suite,
            common: c,
            n,
            weight,
            samples,
        } => {
            let (ok, out) = match suite {
                Suite::Wick => verify_wick(&c, weight, samples)?,
                Suite::Brst => verify_brst(&c)?,
                Suite::Wbn => reports(verify_wbn_suite(n.unwrap_or(2))?),
                Suite::Fs => reports(vec![verify_fs(&build_w2n(n.unwrap_or(2))?)?]),
                Suite::Wakimoto => reports(vec![wakimoto_pi(n.unwrap_or(3))?]),
                Suite::Miura => verify_miura(&c)?,
            };
            let line = format!("{}: {}", suite_name(suite), status(ok));
            emit(&c, &out, line)?;
            verdict(ok)
        }
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Wick => "wick",
        Suite::Brst => "brst",
        Suite::Wbn => "wbn",
        Suite::Fs => "fs",
        Suite::Wakimoto => "wakimoto",
        Suite::Miura => "miura",
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn verdict(ok: bool) -> Res<()> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn half(w2: i64) -> String {
    if w2 % 2 == 0 {
        (w2 / 2).to_string()
    } else {
        format!("{w2}/2")
    }
}

fn emit(c: &Common, out: &Value, table: String) -> Res<()> {
    let text = serde_json::to_string_pretty(out).map_err(|e| Failure::Runtime(e.to_string()))?;
    if let Some(p) = &c.out {
        std::fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    match c.format {
        Format::Json => println!("{text}"),
        Format::Table => println!("{table}"),
    }
    Ok(())
}

fn parse_level(c: &Common) -> Res<Level> {
    Ok(Level::parse(&c.level)?)
}

fn parse_support(s: &str) -> Res<Vec<Vec<i64>>> {
    s.split(';')
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("f-support `{r}`: {e}")))
        })
        .collect()
}

/// `-alpha_i` for every simple root of doubled label 2.
fn default_support(labels: &[i64]) -> Vec<Vec<i64>> {
    (0..labels.len())
        .filter(|&i| labels[i] == 2)
        .map(|i| {
            let mut v = vec![0; labels.len()];
            v[i] = -1;
            v
        })
        .collect()
}

fn load_grading(c: &Common) -> Res<GoodGrading> {
    if c.max_weight < 0 {
        return Err(Failure::Usage("--max-weight must be >= 0".into()));
    }
    let (datum, file_labels, file_support) = match &c.datum {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            let f: DatumFile = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            let d = Arc::new(SuperRootDatum::from_file(&f)?);
            (d, f.grading_labels, f.f_support)
        }
        None => {
            let p = preset(&c.preset)?;
            if c.labels.is_none() && c.f_support.is_none() {
                return Ok(p.grading);
            }
            (p.grading.datum.clone(), None, None)
        }
    };
    let labels = c
        .labels
        .clone()
        .or(file_labels)
        .ok_or_else(|| Failure::Usage("grading labels missing: pass --labels".into()))?;
    let support = match (&c.f_support, file_support) {
        (Some(s), _) => parse_support(s)?,
        (None, Some(s)) if c.labels.is_none() => s,
        _ => default_support(&labels),
    };
    Ok(good_grading(datum, &labels, &support)?)
}

fn screening_ops(amb: &Ambient, s: Screenings) -> Res<Vec<ScreeningOp>> {
    Ok(match s {
        Screenings::Generic => generic_screenings(amb),
        Screenings::Exponential => exponential_screenings(amb)?,
    })
}

fn info(g: &GoodGrading, max2: i64) -> Res<Value> {
    let d = &g.datum;
    let base = restricted_base(g);
    let names = |v: &[usize]| v.iter().map(|&a| d.basis[a].name.clone()).collect::<Vec<_>>();
    let roots: Vec<Value> = d
        .roots()
        .map(|a| {
            json!({
                "name": d.basis[a].name,
                "root": d.basis[a].root,
                "parity": d.parity(a),
                "degree": half(g.deg2[a]),
            })
        })
        .collect();
    let gens = generator_weights(g);
    Ok(json!({
        "algebra": d.name,
        "rank": d.rank,
        "dim": d.dim(),
        "h_dual": d.h_dual.to_string(),
        "labels": g.labels2.iter().map(|&l| half(l)).collect::<Vec<_>>(),
        "f": g.f.iter().map(|(a, c)| json!([d.basis[*a].name, c.to_string()])).collect::<Vec<_>>(),
        "roots": roots,
        "pi_half": names(&base.pi_half),
        "classes": base.classes.iter().map(|c| names(c)).collect::<Vec<_>>(),
        "generator_weights": gens.iter().map(|&(w, p)| json!({"weight": half(w), "parity": p})).collect::<Vec<_>>(),
        "expected_character": expected_character(g, max2),
    }))
}

fn info_table(v: &Value) -> String {
    let mut out = Vec::new();
    for key in ["algebra", "rank", "dim", "h_dual", "labels", "pi_half", "classes", "expected_character"] {
        out.push(format!("{key:<20} {}", v[key]));
    }
    let w: Vec<String> = v["generator_weights"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|x| x["weight"].as_str().unwrap_or("").to_string())
        .collect();
    out.push(format!("{:<20} {}", "generator_weights", w.join(", ")));
    out.join("\n")
}

fn reports(r: Vec<CheckReport>) -> (bool, Value) {
    let ok = r.iter().all(|x| x.passed());
    (ok, json!({"status": status(ok), "checks": r}))
}

fn verify_wbn_suite(n: usize) -> Res<Vec<CheckReport>> {
    let sym = build_wbn(n, GammaMode::Symbolic)?;
    let mut out = vec![sym.check_congruences()?];
    if n == 1 {
        out.push(sym.check_closed_form()?);
    }
    out.push(verify_wbn_screening(&build_wbn(n, GammaMode::Plus)?)?);
    Ok(out)
}

fn wick_algebras(c: &Common) -> Res<Vec<walg::vertexcalc::Algebra>> {
    let g = load_grading(c)?;
    Ok(vec![Ambient::new(&g)?.alg, build_complex(&g)?.alg])
}

fn verify_wick(c: &Common, weight: i64, samples: usize) -> Res<(bool, Value)> {
    let mut reps = Vec::new();
    for alg in wick_algebras(c)? {
        reps.push(run_suite(&alg, c.seed, samples, weight)?);
    }
    let ok = reps.iter().all(|r| r.ok());
    Ok((ok, json!({"status": status(ok), "seed": c.seed, "suites": reps})))
}

fn verify_brst(c: &Common) -> Res<(bool, Value)> {
    let g = load_grading(c)?;
    let level = parse_level(c)?;
    let cx = build_complex(&g)?;
    let entries = cohomology_dims(&cx, c.max_weight, &level)?;
    let want = expected_character(&g, c.max_weight);
    let mut h0 = vec![0u64; want.len()];
    let mut ok = true;
    for e in &entries {
        ok &= e.d_squared_zero;
        if e.charge == 0 {
            h0[e.weight2 as usize] = e.dim as u64;
        } else {
            ok &= e.dim == 0;
        }
    }
    ok &= h0 == want;
    Ok((
        ok,
        json!({
            "status": status(ok),
            "algebra": g.datum.name,
            "level": level.to_string(),
            "h0": h0,
            "expected": want,
            "entries": entries,
        }),
    ))
}

fn verify_miura(c: &Common) -> Res<(bool, Value)> {
    let g = load_grading(c)?;
    let level = parse_level(c)?;
    let cx = build_complex(&g)?;
    let amb = Ambient::new(&g)?;
    let ops = generic_screenings(&amb);
    let e = amb.alg.engine();
    let mut ok = true;
    let mut rows = Vec::new();
    for w2 in 0..=c.max_weight {
        let imgs: Vec<_> = h0_basis(&cx, w2)?
            .iter()
            .map(|v| miura_project(&cx, &amb, v))
            .collect::<walg::error::Result<_>>()?;
        let mut in_kernel = true;
        for v in &imgs {
            for op in &ops {
                in_kernel &= q_apply(&amb, &e, op, v)?.is_zero();
            }
        }
        let ker = kernel(&amb, &ops, w2, &level)?;
        let scalar = match (imgs.as_slice(), ker.vectors.as_slice()) {
            ([a], [b]) => proportionality(a, b).map(|s| s.to_string()),
            _ => None,
        };
        let dims_ok = imgs.len() == ker.vectors.len();
        ok &= in_kernel && dims_ok && (imgs.len() != 1 || scalar.is_some());
        rows.push(json!({
            "weight2": w2,
            "h0_dim": imgs.len(),
            "kernel_dim": ker.vectors.len(),
            "in_kernel": in_kernel,
            "scalar": scalar,
        }));
    }
    Ok((ok, json!({"status": status(ok), "algebra": g.datum.name, "weights": rows})))
}
