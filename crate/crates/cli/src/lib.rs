//! The `multifilt` command-line tool: reads JSON documents, runs one library
//! operation, and prints a JSON (or plain text) report.
//!
//! Exit codes: 0 on success, 2 when a property check ran and its verdict is
//! false, 1 when the job could not run.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use multifilt_core::multifilt::{Comparison, GradeOutcome, Multifiltration, Window};
use multifilt_core::oracle::{oracle_check, OracleConfig, OracleProperty};
use multifilt_core::ordered_group::map_check;
use multifilt_core::solvable::{rep_multifilt, weight_cone};
use multifilt_core::toric::{classify, family_check, klyachko_from_family, pullback, FamilyReport};
use multifilt_core::wire::{
    space_to_doc, ConeDoc, FamilyDoc, FanDoc, GradedRepDoc, GradingDoc, KlyachkoDoc, LatticeMapDoc,
    MultifiltrationDoc, WeightDataDoc, WindowDoc, WitnessDoc,
};

#[derive(Debug, Parser)]
#[command(name = "multifilt", version, about = "Exact multifiltration toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Exhaustive,
    Separated,
    ChainSeparated,
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Separated,
    Regular,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a property of a multifiltration.
    Check {
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Extract a grading from an exhaustive, separated, regular multifiltration.
    Grade {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Push a multifiltration forward along an order-preserving map.
    Ind {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Cone of the target lattice.
        #[arg(long)]
        cone: PathBuf,
    },
    /// Restrict a multifiltration along a map into its index lattice.
    Res {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Cone of the source lattice.
        #[arg(long)]
        cone: PathBuf,
        /// Evaluate on this box when the map is not a quotient map.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Translate a multifiltration: the new value at μ is the old one at μ + by.
    Shift {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        by: String,
    },
    /// Compare two multifiltrations over the same index.
    Compare {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Compatibility, exhaustiveness and separatedness of a fan family.
    ToricCheck {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Torsion free, reflexive and locally free flags of a fan family.
    ToricClassify {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Pull a family on the target fan back along a map of lattices.
    ToricPullback {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        target_fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// The cone generated by a set of torus weights.
    SolvableCone {
        #[arg(long)]
        weights: PathBuf,
    },
    /// The multifiltration of a weight-graded representation.
    SolvableRep {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        rep: PathBuf,
    },
    /// Brute-force window check by pointwise evaluation.
    Oracle {
        #[arg(long, value_enum)]
        property: OracleKind,
        #[arg(long = "in")]
        input: PathBuf,
        /// Box `lo1,lo2:hi1,hi2`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Maximum number of window jump points.
        #[arg(long, default_value_t = OracleConfig::default().cap)]
        cap: usize,
    },
}

/// A finished job: exit code and report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Job<T> = std::result::Result<T, Failure>;

fn read_doc<T: DeserializeOwned>(path: &Path) -> Job<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Failure(format!("{}: at `{at}`: {}", path.display(), e.into_inner()))
    })
}

fn read_filtration(path: &Path) -> Job<Multifiltration> {
    Ok(read_doc::<MultifiltrationDoc>(path)?.from_value()?)
}

fn parse_point(s: &str) -> Job<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| Failure(format!("bad coordinate `{x}`: {e}"))))
        .collect()
}

/// Parses `lo1,lo2:hi1,hi2`.
pub fn parse_window(s: &str) -> Job<Window> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Failure(format!("window `{s}` must have the form lo1,lo2:hi1,hi2")))?;
    Ok(Window::new(parse_point(lo)?, parse_point(hi)?)?)
}

fn verdict_code(holds: bool) -> i32 {
    if holds {
        0
    } else {
        2
    }
}

fn points_doc(points: &[(Vec<i64>, usize)]) -> Value {
    points
        .iter()
        .map(|(p, d)| json!({"point": p, "graded_dim": d}))
        .collect()
}

fn family_report(r: &FamilyReport) -> Value {
    let mut m = Map::new();
    m.insert("compatible".into(), json!(r.compatible));
    m.insert("exhaustive".into(), json!(r.exhaustive));
    m.insert("separated".into(), json!(r.separated));
    if let Some(c) = &r.conflict {
        m.insert(
            "conflict".into(),
            json!({"cones": [c.cones.0, c.cones.1], "face": c.face}),
        );
    }
    Value::Object(m)
}

fn comparison_name(c: Comparison) -> &'static str {
    match c {
        Comparison::Equal => "equal",
        Comparison::FContainsG => "first_contains_second",
        Comparison::GContainsF => "second_contains_first",
        Comparison::Incomparable => "incomparable",
    }
}

/// Runs one job. Errors are returned for jobs that could not run.
pub fn execute(command: &Command) -> Job<Outcome> {
    let done = |report: Value| Ok(Outcome { code: 0, report });
    match command {
        Command::Check { property, input } => {
            let f = read_filtration(input)?;
            let (name, holds, extra) = match property {
                Property::Exhaustive => ("exhaustive", f.is_exhaustive(), json!({})),
                Property::Separated => {
                    let c = f.is_separated()?;
                    ("separated", c.holds, json!({"certificate": c.certificate}))
                }
                Property::ChainSeparated => {
                    let c = f.is_chain_separated()?;
                    ("chain_separated", c.holds, json!({"certificate": c.certificate}))
                }
                Property::Regular => {
                    let (holds, w) = f.is_regular()?;
                    let extra = match w {
                        Some(w) => json!({"witness": WitnessDoc::to_value(&w)}),
                        None => json!({"certificate": "grading extracted"}),
                    };
                    ("regular", holds, extra)
                }
            };
            let mut report = json!({"command": "check", "property": name, "verdict": holds});
            merge(&mut report, extra);
            Ok(Outcome {
                code: verdict_code(holds),
                report,
            })
        }
        Command::Grade { input } => {
            let f = read_filtration(input)?;
            if !f.is_exhaustive() {
                return Ok(Outcome {
                    code: 2,
                    report: json!({"command": "grade", "verdict": false, "reason": "not exhaustive"}),
                });
            }
            match f.grade()? {
                GradeOutcome::Graded(g) => done(json!({
                    "command": "grade",
                    "verdict": true,
                    "grading": GradingDoc::to_value(&g),
                })),
                GradeOutcome::NotRegular(w) => Ok(Outcome {
                    code: 2,
                    report: json!({
                        "command": "grade",
                        "verdict": false,
                        "reason": "not regular",
                        "witness": WitnessDoc::to_value(&w),
                    }),
                }),
            }
        }
        Command::Ind { input, map, cone } => {
            let f = read_filtration(input)?;
            let phi = read_doc::<LatticeMapDoc>(map)?.from_value()?;
            let c = read_doc::<ConeDoc>(cone)?.from_value()?;
            let g = f.ind(&phi, &c)?;
            done(json!({"command": "ind", "multifiltration": MultifiltrationDoc::to_value(&g)}))
        }
        Command::Res {
            input,
            map,
            cone,
            window,
        } => {
            let f = read_filtration(input)?;
            let phi = read_doc::<LatticeMapDoc>(map)?.from_value()?;
            let c = read_doc::<ConeDoc>(cone)?.from_value()?;
            let check = map_check(&phi, &c, f.index())?;
            if check.surjective && check.preimage_equals {
                let g = f.res_surjective(&phi, &c)?;
                return done(json!({
                    "command": "res",
                    "scope": "exact",
                    "multifiltration": MultifiltrationDoc::to_value(&g),
                }));
            }
            let Some(w) = window else {
                return Err(Failure(
                    "map is not a quotient map for these cones; pass --window to evaluate on a box".into(),
                ));
            };
            let w = parse_window(w)?;
            let g = f.res_window(&phi, &c, Some(w.clone()))?;
            let values = w
                .points()
                .into_iter()
                .map(|p| {
                    let s = multifilt_core::multifilt::Filtration::eval(&g, &p)?;
                    Ok(json!({"point": p, "space": space_to_doc(&s)}))
                })
                .collect::<Job<Vec<_>>>()?;
            done(json!({
                "command": "res",
                "scope": "window",
                "window": WindowDoc::to_value(&w),
                "values": values,
            }))
        }
        Command::Shift { input, by } => {
            let f = read_filtration(input)?;
            let g = f.shift(&parse_point(by)?)?;
            done(json!({"command": "shift", "multifiltration": MultifiltrationDoc::to_value(&g)}))
        }
        Command::Compare { input, other } => {
            let f = read_filtration(input)?;
            let g = read_filtration(other)?;
            done(json!({"command": "compare", "comparison": comparison_name(f.compare(&g)?)}))
        }
        Command::ToricCheck { fan, family } => {
            let fan = read_doc::<FanDoc>(fan)?.from_value()?;
            let fam = read_doc::<FamilyDoc>(family)?.from_value(&fan)?;
            let r = family_check(&fan, &fam)?;
            let holds = r.compatible && r.exhaustive && r.separated;
            let mut report = json!({"command": "toric-check", "verdict": holds});
            merge(&mut report, family_report(&r));
            Ok(Outcome {
                code: verdict_code(holds),
                report,
            })
        }
        Command::ToricClassify { fan, family } => {
            let fan = read_doc::<FanDoc>(fan)?.from_value()?;
            let fam = read_doc::<FamilyDoc>(family)?.from_value(&fan)?;
            let c = classify(&fan, &fam)?;
            let mut report = json!({
                "command": "toric-classify",
                "torsion_free": c.torsion_free,
                "reflexive": c.reflexive,
                "locally_free": c.locally_free,
                "checks": family_report(&c.report),
            });
            if let Some(r) = c.regularity.as_ref().filter(|r| !r.holds) {
                merge(
                    &mut report,
                    json!({"not_locally_free": {
                        "cone_index": r.cone,
                        "witness": r.witness.as_ref().map(WitnessDoc::to_value),
                    }}),
                );
            }
            if c.torsion_free {
                let k = klyachko_from_family(&fan, &fam)?;
                merge(&mut report, json!({"klyachko": KlyachkoDoc::to_value(&k)}));
            }
            done(report)
        }
        Command::ToricPullback {
            map,
            fan,
            target_fan,
            family,
        } => {
            let phi = read_doc::<LatticeMapDoc>(map)?.from_value()?;
            let fan = read_doc::<FanDoc>(fan)?.from_value()?;
            let target = read_doc::<FanDoc>(target_fan)?.from_value()?;
            let fam = read_doc::<FamilyDoc>(family)?.from_value(&target)?;
            let back = pullback(&phi, &fan, &target, &fam)?;
            done(json!({"command": "toric-pullback", "family": FamilyDoc::to_value(&back)}))
        }
        Command::SolvableCone { weights } => {
            let w = read_doc::<WeightDataDoc>(weights)?.from_value()?;
            let c = weight_cone(&w)?;
            done(json!({
                "command": "solvable-cone",
                "cone": ConeDoc::to_value(&c),
                "strict": c.is_strict(),
                "generating": c.is_generating(),
                "quasi_zeros": c.lineality(),
            }))
        }
        Command::SolvableRep { weights, rep } => {
            let w = read_doc::<WeightDataDoc>(weights)?.from_value()?;
            let v = read_doc::<GradedRepDoc>(rep)?.from_value()?;
            let f = rep_multifilt(&w, &v)?;
            let n = f.normalize()?;
            let g = &n.filtration;
            let exhaustive = g.is_exhaustive();
            let separated = g.is_separated()?.holds;
            let (regular, witness) = g.is_regular()?;
            let holds = exhaustive && separated && regular;
            let mut report = json!({
                "command": "solvable-rep",
                "verdict": holds,
                "multifiltration": MultifiltrationDoc::to_value(&f),
                "quotient_map": LatticeMapDoc::to_value(&n.q),
                "normalized": MultifiltrationDoc::to_value(g),
                "exhaustive": exhaustive,
                "separated": separated,
                "regular": regular,
            });
            if let Some(w) = witness {
                merge(&mut report, json!({"witness": WitnessDoc::to_value(&w)}));
            }
            Ok(Outcome {
                code: verdict_code(holds),
                report,
            })
        }
        Command::Oracle {
            property,
            input,
            window,
            cap,
        } => {
            let f = read_filtration(input)?;
            let w = parse_window(window)?;
            let prop = match property {
                OracleKind::Separated => OracleProperty::Separated,
                OracleKind::Regular => OracleProperty::Regular,
            };
            let config = OracleConfig {
                cap: *cap,
                ..OracleConfig::default()
            };
            let r = oracle_check(&f, &w, prop, config)?;
            let mut report = json!({
                "command": "oracle",
                "property": match property { OracleKind::Separated => "separated", OracleKind::Regular => "regular" },
                "verdict": r.holds,
                "conclusive": !r.holds,
                "window": WindowDoc::to_value(&r.window),
                "sampled": WindowDoc::to_value(&r.sampled),
                "jump_points": points_doc(&r.jump_points),
            });
            if let Some(wit) = &r.witness {
                merge(&mut report, json!({"witness": WitnessDoc::to_value(wit)}));
            }
            Ok(Outcome {
                code: verdict_code(r.holds),
                report,
            })
        }
    }
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

/// Renders a report as indented `key: value` lines.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_into(&mut out, v, 0);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Object(_) => None,
        Value::Array(items) if items.iter().any(|x| x.is_object()) => None,
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

fn render_into(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_into(out, x, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_into(out, x, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| match x {
            Value::Array(inner) => inner.iter().all(|y| !y.is_object() && !y.is_array()),
            Value::Object(_) => false,
            _ => true,
        }),
        _ => true,
    }
}

/// Indented JSON that keeps points, matrices and subspaces on one line.
fn pretty_json(out: &mut String, v: &Value, depth: usize) {
    if is_flat(v) {
        out.push_str(&v.to_string());
        return;
    }
    let pad = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&format!("{pad}{}: ", Value::String(k.clone())));
                pretty_json(out, x, depth + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&format!("{close}}}"));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad);
                pretty_json(out, x, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&format!("{close}]"));
        }
        _ => unreachable!("scalars are flat"),
    }
}

/// Serializes a report in the requested format, newline terminated.
pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = String::new();
            pretty_json(&mut s, report, 0);
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
    }
}

/// Runs a parsed command line and returns the exit code and output text.
pub fn run(cli: &Cli) -> (i32, String) {
    match execute(&cli.command) {
        Ok(o) => (o.code, render(&o.report, cli.format)),
        Err(Failure(msg)) => {
            let report = json!({"error": msg});
            (1, render(&report, cli.format))
        }
    }
}
