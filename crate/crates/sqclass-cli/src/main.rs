use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use sqclass::cgroup::{two_generator_census, WGroup};
use sqclass::local_global::QForm;
use sqclass::ordering::ClassSet;
use sqclass::valuation::ValuationData;
use sqclass::witt::{c0_kernel_check, WittRing};
use sqclass::{Error, FieldModel, SquareClass, SubgroupT};

const EXIT_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser)]
#[command(name = "sqclass", version, about = "Square classes, orderings, W-groups and Witt rings of fields")]
struct Cli {
    /// Print the structured report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Additive structure and classification of a subgroup T.
    Classify {
        #[arg(long)]
        model: String,
        /// Comma-separated class labels spanning T together with the squares.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        subgroup: String,
    },
    /// The W-group presentation computed from the symbol.
    Wgroup {
        #[arg(long)]
        model: String,
    },
    /// The ring W_T(F); T defaults to the squares.
    Witt {
        #[arg(long)]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        subgroup: Option<String>,
        /// Also compare the kernel of the total signature with I^2 + 2W.
        #[arg(long)]
        kernel_check: bool,
    },
    /// Push a subgroup down to a residue field, or lift one up.
    Lift {
        #[arg(long)]
        model: String,
        /// Valuation name; see the report for the built-in choices.
        #[arg(long)]
        valuation: Option<String>,
        /// Subgroup of the residue field to lift.
        #[arg(long, allow_hyphen_values = true)]
        residue_subgroup: Option<String>,
        /// Subgroup of the field to push down.
        #[arg(long, allow_hyphen_values = true)]
        subgroup: Option<String>,
    },
    /// Local-global analysis of the diagonal form <a_1, ..., a_n> over Q.
    Lgp {
        #[arg(required = true, allow_negative_numbers = true)]
        coefficients: Vec<String>,
        /// Also search for a rational zero of bounded height.
        #[arg(long)]
        height_bound: Option<u64>,
    },
    /// Quotients of the free 2-generator group of the category.
    Census,
    /// Run the built-in acceptance checks.
    Selftest,
}

#[derive(Serialize)]
struct Report {
    command: String,
    inputs: Value,
    summary: String,
    results: Value,
    /// Human table rows, a subset of `results`.
    #[serde(skip)]
    table: Vec<(String, String)>,
    diagnostics: Vec<String>,
}

impl Report {
    fn new(command: &str, inputs: Value) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            summary: String::new(),
            results: json!({}),
            table: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: Value, shown: impl Into<String>) {
        self.results[key] = value;
        self.table.push((key.to_string(), shown.into()));
    }

    fn print_human(&self) {
        println!("{}", self.summary);
        let width = self.table.iter().map(|r| r.0.len()).max().unwrap_or(0);
        for (k, v) in &self.table {
            println!("  {k:<width$}  {v}");
        }
        for d in &self.diagnostics {
            println!("note: {d}");
        }
    }
}

fn model(desc: &str) -> Result<Arc<FieldModel>, Error> {
    FieldModel::parse(desc).map(Arc::new)
}

/// Labels of a class set, non-negative classes first.
fn sorted_labels(m: &FieldModel, s: &ClassSet) -> Vec<String> {
    let mut v: Vec<(bool, SquareClass, String)> =
        s.iter().map(|&c| m.class_label(c)).zip(s.iter()).map(|(l, &c)| (l.starts_with('-'), c, l)).collect();
    v.sort();
    v.into_iter().map(|x| x.2).collect()
}

fn braces(v: &[String]) -> String {
    format!("{{{}}}", v.join(","))
}

fn classify(m: &str, sub: &str) -> Result<Report, Error> {
    let m = model(m)?;
    let t = SubgroupT::parse(m.clone(), sub)?;
    let class = t.classify()?;
    let tt = sorted_labels(&m, &t.plus_a(SquareClass::ONE)?);
    let classes = sorted_labels(&m, &t.class_set());
    let mut r = Report::new("classify", json!({"model": m.descriptor(), "subgroup": sub}));
    r.summary = format!("{}, level {}, T+T = {}", class.tag, class.level, braces(&tt));
    r.put("tag", json!(class.tag.to_string()), class.tag.to_string());
    r.put("level", json!(class.level.to_string()), class.level.to_string());
    r.put("index", json!(class.index), class.index.to_string());
    r.put("rigid", json!(class.rigid), class.rigid.to_string());
    r.put("preordering", json!(class.preordering), class.preordering.to_string());
    r.put("classes", json!(classes), braces(&classes));
    r.put("t_plus_t", json!(tt), braces(&tt));
    Ok(r)
}

fn wgroup(m: &str) -> Result<Report, Error> {
    let m = model(m)?;
    let w = WGroup::from_model(m.clone())?;
    let g = w.group();
    let rels = w.relation_words();
    let labels = w.labels().to_vec();
    let mut r = Report::new("wgroup", json!({"model": m.descriptor()}));
    let rel_text = match rels.len() {
        0 => "no relations".to_string(),
        1 => format!("relation {}", rels[0]),
        _ => format!("relations {}", rels.join("; ")),
    };
    r.summary = format!("{} generators ({}); {rel_text}; order {}", g.n(), labels.join(","), g.order());
    r.put("generators", json!(labels), labels.join(","));
    r.put("relations", json!(rels), rels.join("; "));
    r.put("order", json!(g.order().to_string()), g.order().to_string());
    r.put("symbol_rank", json!(w.symbol_span_dim()), w.symbol_span_dim().to_string());
    if let Some(name) = g.identify() {
        r.put("isomorphism_type", json!(name), name);
    }
    match g.semidirect_chain() {
        Ok(chain) => {
            let shown: Vec<String> = chain.iter().map(|(o, c)| format!("{o}:{c}")).collect();
            let js: Vec<Value> =
                chain.iter().map(|(o, c)| json!({"order": o.to_string(), "factor": c.to_string()})).collect();
            r.put("semidirect_chain", json!(js), shown.join(" "));
        }
        Err(e) => r.diagnostics.push(format!("no semidirect chain: {e}")),
    }
    Ok(r)
}

fn witt(m: &str, sub: Option<&str>, kernel: bool) -> Result<Report, Error> {
    let m = model(m)?;
    let t = match sub {
        Some(s) => SubgroupT::parse(m.clone(), s)?,
        None => SubgroupT::squares(m.clone()),
    };
    let w = WittRing::new(&t)?;
    let inv: Vec<String> = w.invariants().iter().map(|d| d.to_string()).collect();
    let order = w.order().map(|o| o.to_string()).unwrap_or_else(|| "inf".to_string());
    let ch = w.characteristic().map(|c| c.to_string()).unwrap_or_else(|| "0".to_string());
    let mut r = Report::new("witt", json!({"model": m.descriptor(), "subgroup": t.labels()}));
    r.summary = format!("W_T with {} generators; additive group ({}); order {order}", w.rank(), inv.join(", "));
    r.put("basis", json!(w.basis_labels()), w.basis_labels().join(","));
    r.put("invariants", json!(inv), inv.join(", "));
    r.put("order", json!(order), order.clone());
    r.put("characteristic", json!(ch), ch.clone());
    if kernel {
        let k = c0_kernel_check(&m)?;
        r.put(
            "kernel_check",
            json!({
                "passed": k.passed(),
                "orderings": k.orderings,
                "phi_kills_relations": k.phi_kills_relations,
                "multiplicative": k.multiplicative,
                "i2_plus_2w_in_kernel": k.i2_plus_2w_in_kernel,
                "kernel_in_i2_plus_2w": k.kernel_in_i2_plus_2w,
            }),
            format!("{} ({} orderings)", if k.passed() { "passed" } else { "failed" }, k.orderings),
        );
    }
    Ok(r)
}

fn lift(m: &str, val: Option<&str>, residue_sub: Option<&str>, sub: Option<&str>) -> Result<Report, Error> {
    let m = model(m)?;
    let builtins = ValuationData::builtins(&m)?;
    let names: Vec<String> = builtins.iter().map(|v| v.name().to_string()).collect();
    let v = match val {
        Some(name) => ValuationData::select(&m, name)?,
        None => builtins
            .into_iter()
            .next()
            .ok_or_else(|| Error::Precondition(format!("{} has no built-in valuation", m.name())))?,
    };
    let res = v.residue_model().clone();
    let mut r = Report::new(
        "lift",
        json!({"model": m.descriptor(), "valuation": v.name(), "residue_subgroup": residue_sub, "subgroup": sub}),
    );
    r.summary = format!("{}: residue field {}", v.name(), res.name());
    r.put("valuations", json!(names), names.join(", "));
    r.put("residue_model", json!(res.descriptor()), res.descriptor());
    if let Some(s) = residue_sub {
        let t0 = SubgroupT::parse(res.clone(), s)?;
        let kind = v.lift_kind(&t0)?;
        let t = v.lift_ordering(&t0)?;
        let class = t.classify()?;
        r.summary = format!("lift of {t0} along {}: {t}, {}", v.name(), class.tag);
        r.put("lift_kind", json!(format!("{kind:?}")), format!("{kind:?}"));
        r.put("lift", json!(t.labels()), t.to_string());
        r.put("lift_tag", json!(class.tag.to_string()), class.tag.to_string());
    }
    if let Some(s) = sub {
        let t = SubgroupT::parse(m.clone(), s)?;
        let compatible = v.is_compatible(&t)?;
        r.put("compatible", json!(compatible), compatible.to_string());
        if compatible {
            let t0 = v.residue_ordering(&t)?;
            r.put("residue", json!(t0.labels()), t0.to_string());
        } else {
            r.diagnostics.push(format!("{} is not compatible with {}", t, v.name()));
        }
    }
    Ok(r)
}

fn lgp(coeffs: &[String], bound: Option<u64>) -> Result<Report, Error> {
    let items: Vec<&str> = coeffs.iter().map(String::as_str).collect();
    let q = QForm::parse(&items)?;
    let v = q.hasse_minkowski();
    let entries: Vec<String> = q.entries().iter().map(|e| e.to_string()).collect();
    let mut r = Report::new("lgp", json!({"coefficients": coeffs, "height_bound": bound}));
    r.summary = v.to_string();
    r.put("form", json!(entries), q.to_string());
    r.put("isotropic", json!(v.isotropic), v.isotropic.to_string());
    let failures: Vec<String> = v.failures.iter().map(ToString::to_string).collect();
    r.put("local_failures", json!(failures), failures.join(", "));
    let local: Vec<Value> = v
        .local
        .iter()
        .map(|(p, iso)| json!({"place": p.to_string(), "isotropic": iso, "hasse": q.hasse_invariant(*p)}))
        .collect();
    let shown: Vec<String> = v
        .local
        .iter()
        .map(|(p, iso)| format!("{p}:{}", if *iso { "iso" } else { "aniso" }))
        .collect();
    r.put("local", json!(local), shown.join(" "));
    if let Some(b) = bound {
        let pt = q.rational_point_oracle(b)?;
        let shown = match &pt {
            Some(x) => format!("{x:?}"),
            None => format!("none with height <= {b}"),
        };
        r.put("rational_zero", json!(pt), shown);
    }
    Ok(r)
}

fn census() -> Result<Report, Error> {
    let entries = two_generator_census()?;
    let mut r = Report::new("census", json!({}));
    let flagged: Vec<String> = entries.iter().filter(|e| e.flagged).map(|e| e.name.clone()).collect();
    r.summary = format!("{} groups; flagged {}", entries.len(), braces(&flagged));
    let mut rows = Vec::new();
    for e in &entries {
        rows.push(json!({
            "name": e.name,
            "order": e.group.order().to_string(),
            "presentations": e.presentations,
            "split": e.split,
            "c2_factor": e.has_c2_factor,
            "flagged": e.flagged,
        }));
        r.table.push((
            e.name.clone(),
            format!(
                "order {:<3} presentations {} split {:<5} c2-factor {:<5} flagged {}",
                e.group.order(),
                e.presentations,
                e.split,
                e.has_c2_factor,
                e.flagged
            ),
        ));
    }
    r.results["groups"] = json!(rows);
    Ok(r)
}

fn selftest() -> (Report, bool) {
    let results = sqclass::selftest::run_all();
    let passed = results.iter().filter(|c| c.passed).count();
    let mut r = Report::new("selftest", json!({}));
    r.summary = format!("{passed}/{} criteria passed", results.len());
    let mut rows = Vec::new();
    for c in &results {
        rows.push(json!({"id": c.id, "name": c.name, "passed": c.passed, "detail": c.detail}));
        let status = if c.passed { "PASS".to_string() } else { format!("FAIL ({})", c.detail) };
        r.table.push((format!("criterion {}", c.id), format!("{status} - {}", c.name)));
    }
    r.results["criteria"] = json!(rows);
    (r, passed == results.len())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidModel(_) => EXIT_PARSE,
        _ => EXIT_DOMAIN,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ok = true;
    let report = match &cli.command {
        Command::Classify { model, subgroup } => classify(model, subgroup),
        Command::Wgroup { model } => wgroup(model),
        Command::Witt { model, subgroup, kernel_check } => witt(model, subgroup.as_deref(), *kernel_check),
        Command::Lift { model, valuation, residue_subgroup, subgroup } => {
            lift(model, valuation.as_deref(), residue_subgroup.as_deref(), subgroup.as_deref())
        }
        Command::Lgp { coefficients, height_bound } => lgp(coefficients, *height_bound),
        Command::Census => census(),
        Command::Selftest => {
            let (r, all) = selftest();
            ok = all;
            Ok(r)
        }
    };
    match report {
        Ok(r) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            } else {
                r.print_human();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("sqclass: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
