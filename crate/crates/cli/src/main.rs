use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bftk_core::adversary;
use bftk_core::approx;
use bftk_core::gamma2;
use bftk_core::graph::{self, GraphProperty};
use bftk_core::harness::{self, CampaignOptions, CampaignReport};
use bftk_core::spectral::{self, SensitivityGraph};
use bftk_core::{parse_formula, poly};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bftk",
    version,
    about = "Complexity measures of Boolean functions"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for campaigns (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, default_value_t = harness::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute measures of one function.
    Measure {
        /// tt:N:HEX, fam:NAME:PARAMS, formula:TEXT or graph:NAME:VERTICES
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_delimiter = ',')]
        measures: Option<Vec<String>>,
        /// Write the sensitivity graph as an edge list.
        #[arg(long)]
        emit_graph: Option<PathBuf>,
        /// Write R = H diag(1-2f) H as CSV.
        #[arg(long)]
        emit_r: Option<PathBuf>,
    },
    /// Run a verification campaign.
    Verify {
        #[arg(long, required_unless_present = "list_relations")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "random")]
        exhaustive: bool,
        /// Number of random functions.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "all")]
        relations: Vec<String>,
        /// Print every relation id with its statement and exit.
        #[arg(long)]
        list_relations: bool,
    },
    /// Build and validate the band-matrix factorization for (n, d).
    Gamma2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        emit_matrix: bool,
    },
    /// Check the signing matrix B_n.
    Huang {
        #[arg(long)]
        n: usize,
        /// Write B_n as CSV.
        #[arg(long)]
        emit_matrix: Option<PathBuf>,
    },
    /// Eigenvector witness for lambda >= sqrt(deg).
    HuangWitness {
        #[arg(long = "fn")]
        function: String,
    },
    /// Check lambda(f o g) = lambda(f) lambda(g).
    Compose {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Parse a read-once formula.
    Parse {
        #[arg(long, required_unless_present = "file")]
        formula: Option<String>,
        #[arg(long, conflicts_with = "formula")]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        epsilon: f64,
    },
    /// Report on a built-in graph property.
    Graphprop {
        #[arg(long)]
        property: String,
        #[arg(long)]
        vertices: usize,
    },
}

/// What a subcommand produced: a report and whether its checks passed.
enum Output {
    Record(Value, bool),
    Campaign(CampaignReport),
    Rows(Vec<Vec<String>>, Value, bool),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    let output = match &cli.command {
        Command::Measure {
            function,
            measures,
            emit_graph,
            emit_r,
        } => measure(
            function,
            measures.as_deref(),
            emit_graph.as_ref(),
            emit_r.as_ref(),
        )?,
        Command::Verify {
            n,
            exhaustive,
            random,
            seed,
            relations,
            list_relations,
        } => {
            if *list_relations {
                return list(g);
            }
            let n = n.expect("clap requires --n");
            let ids: Vec<&str> = relations.iter().map(String::as_str).collect();
            let opts = CampaignOptions {
                jobs: g.jobs,
                tolerance: g.tolerance,
            };
            let start = Instant::now();
            let mut report = match (exhaustive, random) {
                (_, Some(count)) => harness::verify_random(n, *count, *seed, &ids, opts)?,
                (true, None) => harness::verify_exhaustive(n, &ids, opts)?,
                (false, None) => bail!("pass --exhaustive or --random COUNT"),
            };
            report.seed = Some(*seed);
            eprintln!(
                "{}: {} functions in {:.2?}",
                report.campaign,
                report.function_count,
                start.elapsed()
            );
            Output::Campaign(report)
        }
        Command::Gamma2 { n, d, emit_matrix } => {
            let c = gamma2::build_gamma2_certificate(*n, *d)?;
            let (cs, ct) = c.column_norms_squared();
            let mut v = serde_json::to_value(&c)?;
            v["c_s_squared"] = json!(cs);
            v["c_t_squared"] = json!(ct);
            v["gamma2_upper"] = json!(c.value());
            v["band_ok"] = json!(c.band_ok());
            if *emit_matrix {
                v["M"] = json!(c.m);
            }
            let ok = c.band_ok() && c.column_counts_ok();
            if *emit_matrix {
                let rows =
                    c.m.iter()
                        .map(|r| r.iter().map(i64::to_string).collect())
                        .collect();
                Output::Rows(rows, v, ok)
            } else {
                Output::Record(v, ok)
            }
        }
        Command::Huang { n, emit_matrix } => {
            let b = spectral::signing_matrix(*n)?;
            let square = b.square_is_scaled_identity();
            let trace = b.trace();
            if let Some(path) = emit_matrix {
                let file = fs::File::create(path)
                    .with_context(|| format!("creating {}", path.display()))?;
                b.write_csv(io::BufWriter::new(file))?;
            }
            let ok = square && trace == 0;
            Output::Record(
                json!({ "n": n, "square_is_n_identity": square, "trace": trace, "holds": ok }),
                ok,
            )
        }
        Command::HuangWitness { function } => {
            let f = harness::parse_function_spec(function)?;
            if f.is_constant() {
                bail!("constant functions have no degree witness");
            }
            let (sub, fixed) = spectral::max_degree_subcube(&f)?;
            let w = spectral::huang_witness(&sub)?;
            let fixed: Vec<Value> = fixed
                .iter()
                .map(|&(i, b)| json!({ "var": i + 1, "value": b as u8 }))
                .collect();
            let mut v = serde_json::to_value(&w)?;
            v["function"] = json!(f.to_string());
            v["subcube"] = json!(sub.to_string());
            v["fixed"] = json!(fixed);
            Output::Record(v, w.holds)
        }
        Command::Compose { f, g: gs } => {
            let f = harness::parse_function_spec(f)?;
            let g = harness::parse_function_spec(gs)?;
            let r = adversary::composition_check(&f, &g)?;
            let mut v = serde_json::to_value(&r)?;
            v["composed"] = json!(f.compose(&g)?.to_string());
            Output::Record(v, r.holds)
        }
        Command::Parse {
            formula,
            file,
            epsilon,
        } => {
            let text = match (formula, file) {
                (Some(t), _) => t.clone(),
                (None, Some(p)) => {
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            let ast = parse_formula(&text)?;
            let table = ast.to_table()?;
            let deg = poly::degree(&table);
            let n = ast.leaf_count();
            let mut v = json!({
                "formula": ast.to_string(),
                "n": n,
                "read_once": ast.is_read_once(),
                "function": table.to_string(),
                "deg": deg,
                "deg_equals_n": deg == n,
            });
            let mut ok = deg == n;
            if n <= approx::LP_CAP {
                let w = bftk_core::formula::readonce_adeg_window(&ast, *epsilon)?;
                ok &= w.holds;
                v["adeg_window"] = serde_json::to_value(&w)?;
            }
            Output::Record(v, ok)
        }
        Command::Graphprop { property, vertices } => {
            let p = GraphProperty::builtin(property, *vertices)?;
            let r = graph::graph_property_report(&p)?;
            let mut v = serde_json::to_value(&r)?;
            v["function"] = json!(p.table.to_string());
            Output::Record(v, r.flags.invariant)
        }
    };
    emit(g, output)
}

fn measure(
    spec: &str,
    ids: Option<&[String]>,
    emit_graph: Option<&PathBuf>,
    emit_r: Option<&PathBuf>,
) -> Result<Output> {
    let f = harness::parse_function_spec(spec)?;
    let default: Vec<String> = {
        let mut d = vec!["n", "s0", "s1", "s"];
        if f.arity() <= 6 {
            d.extend(["bs", "c0", "c1", "c", "d"]);
        }
        d.extend(["avg-s", "deg", "lambda"]);
        d.into_iter().map(String::from).collect()
    };
    let ids: Vec<&str> = ids.unwrap_or(&default).iter().map(String::as_str).collect();
    let values = harness::measure(&f, &ids)?;
    let mut v = json!({ "function": f.to_string() });
    for (k, x) in values {
        v[k] = x;
    }
    if let Some(path) = emit_graph {
        let g = SensitivityGraph::new(&f);
        let mut w = io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        for (x, y) in g.edges()? {
            writeln!(w, "{x} {y}")?;
        }
        w.flush()?;
    }
    if let Some(path) = emit_r {
        let r = approx::r_tilde(&approx::signed_polynomial(&f))?;
        let mut w = io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        for row in r.row_iter() {
            let cells: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
    }
    Ok(Output::Record(v, true))
}

fn list(g: &Global) -> Result<bool> {
    let mut rows = vec![vec![
        "id".to_string(),
        "cap".to_string(),
        "statement".to_string(),
    ]];
    let mut arr = Vec::new();
    for r in harness::RELATIONS {
        rows.push(vec![
            r.id.to_string(),
            r.cap.to_string(),
            r.statement.to_string(),
        ]);
        arr.push(json!({ "id": r.id, "cap": r.cap, "statement": r.statement }));
    }
    write_out(g, &render(g.format, &rows, &Value::Array(arr))?)?;
    Ok(true)
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render(format: Format, rows: &[Vec<String>], value: &Value) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(value)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.write_record(r)?;
            }
            Ok(w.into_inner()?)
        }
    }
}

fn record_rows(v: &Value) -> Vec<Vec<String>> {
    let obj = v.as_object().expect("records are objects");
    vec![
        obj.keys().cloned().collect(),
        obj.values().map(cell).collect(),
    ]
}

fn campaign_rows(r: &CampaignReport) -> Vec<Vec<String>> {
    let mut rows = vec![[
        "campaign",
        "n",
        "seed",
        "relation",
        "checked",
        "passed",
        "failed",
        "worst_margin",
        "worst_function",
        "statement",
    ]
    .map(String::from)
    .to_vec()];
    for s in &r.relations {
        rows.push(vec![
            r.campaign.clone(),
            r.n.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            s.id.clone(),
            s.checked.to_string(),
            s.passed.to_string(),
            s.failed.to_string(),
            s.worst_margin.map(|m| m.to_string()).unwrap_or_default(),
            s.worst_function.clone().unwrap_or_default(),
            s.statement.clone(),
        ]);
    }
    rows
}

fn emit(g: &Global, output: Output) -> Result<bool> {
    let (bytes, ok) = match output {
        Output::Record(v, ok) => (render(g.format, &record_rows(&v), &v)?, ok),
        Output::Rows(rows, v, ok) => (render(g.format, &rows, &v)?, ok),
        Output::Campaign(r) => {
            let v = serde_json::to_value(&r)?;
            (render(g.format, &campaign_rows(&r), &v)?, r.passed)
        }
    };
    write_out(g, &bytes)?;
    Ok(ok)
}

fn write_out(g: &Global, bytes: &[u8]) -> Result<()> {
    match &g.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}
