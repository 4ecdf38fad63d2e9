use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use g3as::covers::{self, TripleInvariants};
use g3as::ec::EllipticCurve;
use g3as::genus3::{Family, Genus3Curve};
use g3as::gf2::{Fe, Field, FieldInfo};
use g3as::maximal::{self, MaximalReport};
use g3as::quotients;
use g3as::sweep::{self, Plan};
use g3as::Error;

/// Largest degree for commands that scan the projective plane.
const QUARTIC_MAX_N: u32 = 13;

#[derive(Parser)]
#[command(name = "g3as", version, about = "Genus-3 Artin-Schreier covers over GF(2^n)")]
struct Cli {
    /// Extension degree of k = GF(2^n).
    #[arg(long, global = true, default_value_t = 3)]
    n: u32,
    /// Irreducible modulus as a hex bitmask (default: smallest of degree n).
    #[arg(long, global = true)]
    modulus: Option<String>,
    /// Seed for sampled sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One JSON object per line.
    Json,
    Csv,
    Pretty,
}

#[derive(Args)]
struct CurveArg {
    /// Serialized curve, e.g. `hypa:a=1,r=0,t=2` or `ord:r=0,a=1`.
    #[arg(long, conflicts_with_all = ["family", "params"])]
    curve: Option<String>,
    /// Family tag (hypa, hypb, ss, nhypa, nhypb, ord); used with --params.
    #[arg(long, requires = "params")]
    family: Option<String>,
    /// Parameters as `key=hex,...`.
    #[arg(long, requires = "family")]
    params: Option<String>,
}

impl CurveArg {
    fn text(&self) -> Result<String, Error> {
        match (&self.curve, &self.family, &self.params) {
            (Some(c), _, _) => Ok(c.clone()),
            (None, Some(f), Some(p)) => Ok(format!("{f}:{p}")),
            _ => Err(Error::Parse("give --curve, or --family with --params".into())),
        }
    }
}

#[derive(Args)]
struct TripleArg {
    #[arg(long)]
    j1: Option<String>,
    #[arg(long)]
    j2: Option<String>,
    #[arg(long)]
    j3: Option<String>,
    /// Signatures as three bits, `1` meaning r0.
    #[arg(long, default_value = "0,0,0")]
    sgn: String,
    /// Three ordinary curves instead of j-invariants and signatures.
    #[arg(long, num_args = 3, value_delimiter = ' ', conflicts_with_all = ["j1", "j2", "j3"])]
    curves: Option<Vec<String>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoverKind {
    Hyp,
    Nonhyp,
}

#[derive(Subcommand)]
enum Command {
    /// Modulus, q and r0 of the field.
    FieldInfo,
    /// Exact number of rational points of a curve.
    Count(CurveArg),
    /// The three elliptic quotients of a genus-3 curve.
    Quotients(CurveArg),
    /// Check #C(k) = q + 1 - (tr E1 + tr E2 + tr E3).
    VerifyIsogeny(CurveArg),
    /// Decide whether a triple of ordinary curves has a cover.
    CoverExists(TripleArg),
    /// Build a covering curve of the given kind.
    CoverConstruct {
        #[command(flatten)]
        triple: TripleArg,
        #[arg(long, value_enum, default_value_t = CoverKind::Nonhyp)]
        kind: CoverKind,
    },
    /// Search the SS family for a cover of supersingular curves with the given traces.
    SsCoverSearch {
        /// Three traces, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        traces: Vec<i64>,
    },
    /// Defect-0 or defect-3 curve for odd n.
    Maximal {
        /// Build a curve with q + 1 - 3m points instead.
        #[arg(long)]
        minimal: bool,
    },
    /// N_q(3) for every odd n up to --n-max.
    Nq3Table {
        #[arg(long, default_value_t = 13)]
        n_max: u32,
    },
    /// The sequence m_n = floor(2^n sqrt 2).
    MSeq {
        #[arg(long, default_value_t = 64)]
        count: u32,
    },
    /// Verify the point count identity across a family.
    Sweep {
        #[arg(long)]
        family: Family,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
    },
}

enum Failure {
    /// A checked identity did not hold.
    Violated(String),
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Inconsistency(_) | Error::NoCurveWithTrace { .. } => Failure::Violated(e.to_string()),
            other => Failure::Usage(other),
        }
    }
}

type Output = Result<Vec<Value>, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn field(cli: &Cli) -> Result<Field, Error> {
    let modulus = cli
        .modulus
        .as_deref()
        .map(|m| {
            u64::from_str_radix(m.trim_start_matches("0x"), 16)
                .map_err(|_| Error::Parse(format!("invalid hex modulus {m:?}")))
        })
        .transpose()?;
    Field::new(cli.n, modulus)
}

enum AnyCurve {
    Elliptic(EllipticCurve),
    Genus3(Genus3Curve),
}

fn parse_curve(k: &Field, arg: &CurveArg) -> Result<AnyCurve, Error> {
    let text = arg.text()?;
    let tag = text.split(':').next().unwrap_or("").trim();
    if tag == "ord" || (tag == "ss" && text.contains("l=")) {
        return EllipticCurve::parse(k, &text).map(AnyCurve::Elliptic);
    }
    let c = Genus3Curve::parse(k, &text)?;
    if !c.family().is_hyperelliptic() && k.n() > QUARTIC_MAX_N {
        return Err(Error::Precondition(format!(
            "plane quartic scans are limited to n <= {QUARTIC_MAX_N}"
        )));
    }
    Ok(AnyCurve::Genus3(c))
}

fn genus3(k: &Field, arg: &CurveArg) -> Result<Genus3Curve, Error> {
    match parse_curve(k, arg)? {
        AnyCurve::Genus3(c) => Ok(c),
        AnyCurve::Elliptic(e) => Err(Error::Parse(format!("{e} is not a genus-3 curve"))),
    }
}

fn triple(k: &Field, arg: &TripleArg) -> Result<TripleInvariants, Error> {
    if let Some(curves) = &arg.curves {
        let mut es = Vec::new();
        for c in curves {
            match EllipticCurve::parse(k, c)? {
                EllipticCurve::Ordinary(e) => es.push(e),
                EllipticCurve::Supersingular(e) => {
                    return Err(Error::Precondition(format!("{e} is not ordinary")))
                }
            }
        }
        return covers::triple_invariants(k, &[es[0], es[1], es[2]]);
    }
    let js = [&arg.j1, &arg.j2, &arg.j3].map(|j| {
        j.as_deref()
            .ok_or_else(|| Error::Parse("give --j1 --j2 --j3, or --curves".into()))
            .and_then(|s| k.parse(s))
    });
    let sgn: Vec<Fe> = arg
        .sgn
        .split(',')
        .map(|b| match b.trim() {
            "0" => Ok(Fe::ZERO),
            "1" => Ok(k.r0()),
            other => Err(Error::Parse(format!("signature bit {other:?} is not 0 or 1"))),
        })
        .collect::<Result<_, _>>()?;
    if sgn.len() != 3 {
        return Err(Error::Parse(format!("--sgn needs three bits, got {}", sgn.len())));
    }
    let [j1, j2, j3] = js;
    TripleInvariants::from_pairs(k, [(j1?, sgn[0]), (j2?, sgn[1]), (j3?, sgn[2])])
}

fn run(cli: &Cli) -> Output {
    match &cli.command {
        Command::FieldInfo => Ok(vec![to_value(&FieldInfo::from(&field(cli)?))]),
        Command::Count(arg) => {
            let k = field(cli)?;
            let (curve, count) = match parse_curve(&k, arg)? {
                AnyCurve::Elliptic(e) => (e.to_string(), e.count_points(&k)),
                AnyCurve::Genus3(c) => (c.to_string(), c.count_points(&k)),
            };
            Ok(vec![json!({ "curve": curve, "count": count })])
        }
        Command::Quotients(arg) => {
            let k = field(cli)?;
            let c = genus3(&k, arg)?;
            let t = quotients::quotients_of(&k, &c)?;
            Ok(vec![json!({ "curve": c, "triple": t, "traces": t.traces(&k) })])
        }
        Command::VerifyIsogeny(arg) => {
            let k = field(cli)?;
            let rep = quotients::verify_isogeny(&k, &genus3(&k, arg)?)?;
            if !rep.ok {
                return Err(Failure::Violated(to_value(&rep).to_string()));
            }
            Ok(vec![to_value(&rep)])
        }
        Command::CoverExists(arg) => {
            let k = field(cli)?;
            let t = triple(&k, arg)?;
            let hyp = covers::exists_hyp_cover(&k, &t)?;
            let nonhyp = covers::exists_nonhyp_cover(&k, &t)?;
            Ok(vec![json!({
                "invariants": t,
                "hyperelliptic": hyp.is_some(),
                "nonhyperelliptic": nonhyp.is_some(),
                "hyp_witness": hyp,
                "nonhyp_witness": nonhyp,
            })])
        }
        Command::CoverConstruct { triple: arg, kind } => {
            let k = field(cli)?;
            let t = triple(&k, arg)?;
            let w = match kind {
                CoverKind::Hyp => covers::exists_hyp_cover(&k, &t)?,
                CoverKind::Nonhyp => covers::exists_nonhyp_cover(&k, &t)?,
            };
            Ok(vec![json!({ "witness": w })])
        }
        Command::SsCoverSearch { traces } => {
            let [t1, t2, t3] = traces[..] else {
                return Err(Failure::Usage(Error::Parse(format!(
                    "--traces needs three values, got {}",
                    traces.len()
                ))));
            };
            let k = field(cli)?;
            let w = covers::exists_ss_cover(&k, [t1, t2, t3])?;
            Ok(vec![json!({ "traces": traces, "witness": w })])
        }
        Command::Maximal { minimal } => {
            if *minimal {
                let found = maximal::construct_minimal(cli.n)?;
                let (curve, count) = found.map_or((None, None), |(c, n)| (Some(c), Some(n)));
                return Ok(vec![json!({
                    "n": cli.n,
                    "m": maximal::m_of(cli.n),
                    "witness": curve,
                    "count": count,
                })]);
            }
            let r = match maximal::m_of(cli.n) % 8 {
                0 | 2 | 6 => maximal::construct_defect3(cli.n)?,
                _ => maximal::construct_defect0(cli.n)?,
            };
            Ok(vec![to_value(&r)])
        }
        Command::Nq3Table { n_max } => {
            if *n_max > 30 {
                return Err(Failure::Usage(Error::DegreeOutOfRange { n: *n_max, max: 30 }));
            }
            let reports = (1..=*n_max)
                .step_by(2)
                .map(maximal::nq3)
                .collect::<Result<Vec<MaximalReport>, Error>>()?;
            if cli.format == Format::Csv {
                let mut lines = vec![Value::String(MaximalReport::CSV_HEADER.into())];
                lines.extend(reports.iter().map(|r| Value::String(r.csv_row())));
                return Ok(lines);
            }
            Ok(reports.iter().map(to_value).collect())
        }
        Command::MSeq { count } => {
            let s = maximal::m_sequence(*count)?;
            let mut out: Vec<Value> = s.entries.iter().map(to_value).collect();
            if cli.format != Format::Csv {
                out.push(json!({ "residue1": s.residue1, "residue2": s.residue2 }));
            }
            Ok(out)
        }
        Command::Sweep { family, exhaustive, samples } => {
            let k = field(cli)?;
            if !family.is_hyperelliptic() && k.n() > QUARTIC_MAX_N {
                return Err(Failure::Usage(Error::Precondition(format!(
                    "plane quartic scans are limited to n <= {QUARTIC_MAX_N}"
                ))));
            }
            let plan = match (exhaustive, samples) {
                (true, _) => Plan::Exhaustive,
                (false, Some(s)) => Plan::Sampled { samples: *s },
                (false, None) => Plan::Auto { samples: 500 },
            };
            let s = sweep::sweep(&k, *family, plan, cli.seed)?;
            if !s.ok() {
                return Err(Failure::Violated(to_value(&s).to_string()));
            }
            Ok(vec![to_value(&s)])
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn render(format: Format, records: &[Value]) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            for r in records {
                out.push_str(&r.to_string());
                out.push('\n');
            }
        }
        Format::Pretty => {
            for r in records {
                out.push_str(&serde_json::to_string_pretty(r).expect("valid json"));
                out.push('\n');
            }
        }
        Format::Csv => {
            if records.iter().all(Value::is_string) {
                for r in records {
                    out.push_str(r.as_str().expect("string"));
                    out.push('\n');
                }
                return out;
            }
            let empty = Map::new();
            let mut header: Vec<String> = Vec::new();
            for r in records {
                for key in r.as_object().unwrap_or(&empty).keys() {
                    if !header.contains(key) {
                        header.push(key.clone());
                    }
                }
            }
            out.push_str(&header.join(","));
            out.push('\n');
            for r in records {
                let obj = r.as_object().unwrap_or(&empty);
                let row: Vec<String> =
                    header.iter().map(|h| obj.get(h).map_or(String::new(), csv_cell)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(records) => {
            print!("{}", render(cli.format, &records));
            ExitCode::SUCCESS
        }
        Err(Failure::Violated(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
