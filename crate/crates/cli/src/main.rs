use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pasted_core::bounds::{classify_weight, cycle_bounds, RegionLabel};
use pasted_core::empirical::{analyze, sample_counts, CountData, DEFAULT_Z_THRESHOLD};
use pasted_core::json;
use pasted_core::numeric::{format_float, int, rat, Mode, Value};
use pasted_core::softmax::{context_softmax, gluing_check, max_family_error, maxent_softmax, represent_weight};
use pasted_core::states::enumerate_two_valued_states;
use pasted_core::weights::{
    check_admissible, constant_weight, cyclic_sum, half_weight, midpoint_weight, path_weight, Weight,
};
use pasted_core::{cycle_logic, EventStructure};
use rand::SeedableRng;
use serde_json::json;

const EXIT_NOT_GLUED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NONCLASSICAL: u8 = 3;
const EXIT_BEYOND_THETA: u8 = 4;
const EXIT_NOT_ADMISSIBLE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "pasted",
    version,
    about = "Admissible weights, two-valued states and softmax gluing on pasted event structures",
    after_help = "Structures are `cycle:N` or a JSON file. Weights are a JSON file or one of \
`half`, `midpoint`, `path:R`, `constant:V`.\n\nExit codes: 0 ok/classical, 1 not glued, 2 invalid input, \
3 nonclassical, 4 beyond theta, 5 not admissible.\n\nExample:\n  pasted classify --structure cycle:5 --weight half"
)]
struct Cli {
    /// Numeric mode for weights and scores.
    #[arg(long, value_enum, global = true, default_value = "rational")]
    mode: ModeArg,
    /// Tolerance for float-mode comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for sampling commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rational,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Rational => Mode::Rational,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit the n-cycle logic as a structure document.
    #[command(after_help = "Example:\n  pasted gen-cycle --n 5 --out pentagon.json")]
    GenCycle {
        #[arg(long)]
        n: usize,
    },
    /// Pentagon weights in the midpoint, uniform and half-weight regimes (CSV).
    #[command(after_help = "Example:\n  pasted table1 --mode rational")]
    Table1,
    /// Check that a weight is admissible (exit 5 if not).
    #[command(after_help = "Example:\n  pasted check --structure cycle:5 --weight path:1/3")]
    Check {
        #[arg(long)]
        structure: String,
        #[arg(long)]
        weight: String,
    },
    /// List the two-valued states.
    #[command(after_help = "Example:\n  pasted enumerate --structure cycle:5")]
    Enumerate {
        #[arg(long)]
        structure: String,
        /// Abort once more than this many states are found.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Classify a weight; the exit code encodes the region.
    #[command(after_help = "Example:\n  pasted classify --structure cycle:5 --weight half")]
    Classify {
        #[arg(long)]
        structure: String,
        #[arg(long)]
        weight: String,
    },
    /// Global scores whose softmax reproduces a strictly positive weight.
    #[command(after_help = "Example:\n  pasted represent --structure cycle:5 --weight path:1 --link exponential:1")]
    Represent {
        #[arg(long)]
        structure: String,
        #[arg(long)]
        weight: String,
        /// `exponential[:beta]`, `identity`, `power:k` or a JSON link object.
        #[arg(long, default_value = "exponential:1")]
        link: String,
        /// Scale factor; chosen automatically when omitted.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Softmax a score document per context and test whether it glues (exit 1 if not).
    #[command(after_help = "Example:\n  pasted glue-check --structure cycle:5 --scores scores.json --link identity")]
    GlueCheck {
        #[arg(long)]
        structure: String,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value = "exponential:1")]
        link: String,
    },
    /// Cyclic sum of the path family over an r-grid, against both bounds (CSV).
    #[command(after_help = "Example:\n  pasted sweep --structure cycle:5 --points 1000")]
    Sweep {
        #[arg(long)]
        structure: String,
        /// Grid r = (k + 1/2) / points * r_max for k = 0..points.
        #[arg(long, default_value_t = 1000)]
        points: u32,
        #[arg(long, default_value = "1")]
        r_max: String,
    },
    /// Maximum-entropy softmax over scores with a fixed mean.
    #[command(after_help = "Example:\n  pasted maxent --scores 0,1 --target 2/3")]
    Maxent {
        /// Comma-separated scores.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        scores: Vec<f64>,
        #[arg(long)]
        target: String,
    },
    /// Estimate, test single-valuedness, reconstruct and classify count data.
    #[command(after_help = "Examples:\n  pasted analyze --counts counts.json\n  \
pasted analyze --structure cycle:5 --weight path:1/10 --samples 100000 --seed 7")]
    Analyze {
        /// Count document (JSON) or `context,atom,count` CSV (needs --structure).
        #[arg(long, conflicts_with = "weight")]
        counts: Option<PathBuf>,
        #[arg(long)]
        structure: Option<String>,
        /// Sample counts from this weight instead of reading them (needs --seed).
        #[arg(long, requires = "samples")]
        weight: Option<String>,
        /// Outcomes drawn per context when sampling.
        #[arg(long)]
        samples: Option<u64>,
        /// Also write the sampled counts as a count document.
        #[arg(long, requires = "weight")]
        counts_out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
        z_threshold: f64,
    },
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }

    fn json(v: &serde_json::Value, code: u8) -> Self {
        let mut text = serde_json::to_string_pretty(v).expect("json");
        text.push('\n');
        Output { text, code }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => fs::write(p, &out.text).with_context(|| format!("writing {}", p.display())),
                None => std::io::stdout()
                    .write_all(out.text.as_bytes())
                    .context("writing output"),
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_INVALID)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    if !(cli.tol >= 0.0 && cli.tol.is_finite()) {
        bail!("--tol must be a nonnegative number");
    }
    let mode = Mode::from(cli.mode);
    match &cli.command {
        Command::GenCycle { n } => Ok(Output::json(&json::structure_to_json(&cycle_logic(*n)?), 0)),
        Command::Table1 => table1(mode),
        Command::Check { structure, weight } => {
            let e = load_structure(structure)?;
            let p = load_weight(&e, weight, mode)?;
            let r = check_admissible(&e, &p, cli.tol)?;
            let code = if r.admissible { 0 } else { EXIT_NOT_ADMISSIBLE };
            let mut v = json::admissibility_to_json(&e, &r);
            if let Ok(s) = cyclic_sum(&e, &p) {
                v["cyclic_sum"] = json::value(&s);
            }
            Ok(Output::json(&v, code))
        }
        Command::Enumerate { structure, limit } => {
            let e = load_structure(structure)?;
            let states = enumerate_two_valued_states(&e, *limit)?;
            Ok(Output::json(&json::states_to_json(&e, &states), 0))
        }
        Command::Classify { structure, weight } => {
            let e = load_structure(structure)?;
            let p = load_weight(&e, weight, mode)?;
            let r = classify_weight(&e, &p, cli.tol)?;
            Ok(Output::json(&json::region_to_json(&e, &r)?, label_code(r.label)))
        }
        Command::Represent {
            structure,
            weight,
            link,
            alpha,
        } => {
            let e = load_structure(structure)?;
            let p = load_weight(&e, weight, mode)?;
            let link = json::link_from_str(link)?;
            let alpha = alpha.as_deref().map(|a| Value::parse(a, mode)).transpose()?;
            let scores = represent_weight(&e, &p, &link, alpha)?;
            let family = context_softmax(&e, &scores, &link)?;
            let err = max_family_error(&e, &family, &p.to_f64_vec());
            let v = json!({
                "link": json::link_to_json(&link),
                "scores": json::scores_to_json(&e, &scores),
                "max_reconstruction_error": json::float(err),
            });
            Ok(Output::json(&v, 0))
        }
        Command::GlueCheck {
            structure,
            scores,
            link,
        } => {
            let e = load_structure(structure)?;
            let link = json::link_from_str(link)?;
            let doc = read_json(scores)?;
            let scores = json::scores_from_json(&e, &doc, mode)?;
            let family = context_softmax(&e, &scores, &link)?;
            let report = gluing_check(&e, &family, cli.tol)?;
            let weight = report.glued.then(|| glued_weight(&e, &family));
            let v = json!({
                "report": json::gluing_to_json(&e, &report),
                "weight": weight.map(|w| json::weight_to_json(&e, &w)),
                "family": json::family_to_json(&e, &family),
            });
            Ok(Output::json(&v, if report.glued { 0 } else { EXIT_NOT_GLUED }))
        }
        Command::Sweep {
            structure,
            points,
            r_max,
        } => sweep(structure, *points, r_max, mode),
        Command::Maxent { scores, target } => {
            let target = Value::parse(target, Mode::Rational)?.to_f64();
            let tol = if cli.tol > 0.0 { cli.tol } else { f64::EPSILON };
            let m = maxent_softmax(scores, target, tol)?;
            Ok(Output::json(&json::maxent_to_json(&m), 0))
        }
        Command::Analyze {
            counts,
            structure,
            weight,
            samples,
            counts_out,
            z_threshold,
        } => {
            let (e, d) = match (counts, weight) {
                (Some(path), _) => load_counts(path, structure.as_deref())?,
                (None, Some(w)) => {
                    let Some(seed) = cli.seed else {
                        bail!("sampling needs --seed")
                    };
                    let Some(s) = structure else {
                        bail!("sampling needs --structure")
                    };
                    let e = load_structure(s)?;
                    let p = load_weight(&e, w, mode)?;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    let d = sample_counts(&e, &p, samples.expect("clap requires samples"), &mut rng)?;
                    if let Some(path) = counts_out {
                        let mut text = serde_json::to_string_pretty(&json::count_data_to_json(&e, &d))?;
                        text.push('\n');
                        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                    }
                    (e, d)
                }
                (None, None) => bail!("analyze needs --counts or --weight"),
            };
            let report = analyze(&e, &d, *z_threshold, cli.tol)?;
            Ok(Output::json(&json::analysis_to_json(&e, &report)?, 0))
        }
    }
}

fn label_code(label: RegionLabel) -> u8 {
    match label {
        RegionLabel::Classical => 0,
        RegionLabel::AdmissibleNonclassical => EXIT_NONCLASSICAL,
        RegionLabel::BeyondTheta => EXIT_BEYOND_THETA,
        RegionLabel::NotAdmissible => EXIT_NOT_ADMISSIBLE,
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_structure(spec: &str) -> Result<EventStructure> {
    Ok(json::resolve_structure(spec, None)?)
}

fn load_weight(e: &EventStructure, spec: &str, mode: Mode) -> Result<Weight> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let w = match kind {
        "half" => half_weight(e)?.to_mode(mode)?,
        "midpoint" => midpoint_weight(e)?.to_mode(mode)?,
        "path" => path_weight(e, &Value::parse(arg, mode)?)?,
        "constant" => constant_weight(e, Value::parse(arg, mode)?),
        _ => json::weight_from_json(e, &read_json(Path::new(spec))?, Some(mode))?,
    };
    Ok(w)
}

fn load_counts(path: &Path, structure: Option<&str>) -> Result<(EventStructure, CountData)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
        let Some(s) = structure else {
            bail!("CSV counts need --structure")
        };
        let e = load_structure(s)?;
        let d = CountData::from_csv(&e, text.as_bytes())?;
        return Ok((e, d));
    }
    Ok(json::count_document_from_str(&text, path.parent())?)
}

/// Per-atom value of a family already known to glue.
fn glued_weight(e: &EventStructure, f: &pasted_core::softmax::ContextDistributionFamily) -> Weight {
    let values = (0..e.atom_count())
        .map(|a| {
            let ci = e.incidence().contexts_of(a)[0];
            f.probability(e, ci, a).expect("atom in its context").clone()
        })
        .collect();
    Weight::from_values(values).expect("one mode per family")
}

fn table1(mode: Mode) -> Result<Output> {
    let e = cycle_logic(5)?;
    let view = e.as_cycle()?;
    let order: Vec<usize> = view
        .cyclic
        .iter()
        .zip(&view.midpoint)
        .flat_map(|(&a, &x)| [a, x])
        .collect();
    let far = path_weight(&e, &Value::Float(1e12))?.to_f64_vec();
    let limit = midpoint_weight(&e)?;
    let gap = far
        .iter()
        .zip(limit.to_f64_vec())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    let rows = [
        (
            "midpoint_limit",
            "1e12".to_string(),
            limit.to_mode(mode)?,
            format!("limit; max deviation at r=1e12 is {}", format_float(gap)),
        ),
        (
            "uniform",
            "1".into(),
            path_weight(&e, &Value::Rational(int(1)))?.to_mode(mode)?,
            String::new(),
        ),
        (
            "half_weight",
            "0".into(),
            half_weight(&e)?.to_mode(mode)?,
            String::new(),
        ),
    ];
    let mut text = String::from("regime,r");
    for &a in &order {
        text.push(',');
        text.push_str(e.atom_name(a));
    }
    text.push_str(",note\n");
    for (name, r, w, note) in rows {
        text.push_str(name);
        text.push(',');
        text.push_str(&r);
        for &a in &order {
            text.push(',');
            text.push_str(&w.get(a).to_string());
        }
        text.push(',');
        text.push_str(&note);
        text.push('\n');
    }
    Ok(Output::ok(text))
}

fn sweep(structure: &str, points: u32, r_max: &str, mode: Mode) -> Result<Output> {
    if points == 0 {
        bail!("--points must be positive");
    }
    let e = load_structure(structure)?;
    let n = e.as_cycle()?.n;
    let b = cycle_bounds(n)?;
    let r_max = Value::parse(r_max, mode)?;
    if r_max.is_negative() || r_max.is_zero() {
        bail!("--r-max must be positive");
    }
    let classical = Value::Rational(b.classical_bound.clone());
    let mut text = String::from("r,cyclic_sum,exceeds_classical,exceeds_theta\n");
    for k in 0..points {
        let frac = Value::Rational(rat(2 * k as i64 + 1, 2 * points as i64));
        let r = frac.to_mode(mode)?.mul(&r_max);
        let s = cyclic_sum(&e, &path_weight(&e, &r)?)?;
        let over_classical = s.compare(&classical) == Some(std::cmp::Ordering::Greater);
        let over_theta = if b.theta_applies() {
            (s.to_f64() > b.theta).to_string()
        } else {
            String::new()
        };
        text.push_str(&format!(
            "{},{},{},{}\n",
            format_float(r.to_f64()),
            format_float(s.to_f64()),
            over_classical,
            over_theta
        ));
    }
    Ok(Output::ok(text))
}
