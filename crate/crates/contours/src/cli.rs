//! Command-line front end: argument parsing, subcommand dispatch, and
//! machine-readable reports. All output is deterministic: JSON maps are
//! key-sorted and counts serialize as decimal strings.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use contours::counters::{
    bound_bollobas, bounds_dary, count_grammar, dary_report, regular_report, Count,
    CountReport,
};
use contours::enumerator::{cross_check, enumerate_contours, size_counts};
use contours::peierls::{critical_activity_bound, peierls_partial_sum, WeightSpec};
use contours::structure_analyzer::{infinitely_many_sizes, DEFAULT_PROBE_BOUND};
use contours::tree_core::{
    binarize, contract_independent_paths, expand_grammar, ExplicitTree, TreeGrammar,
    DEFAULT_VERTEX_BUDGET,
};
use contours::Error;

const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

#[derive(Parser)]
#[command(name = "contours", version, about = "Count and enumerate contours on rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Tree selection shared by all subcommands: a built-in family or a grammar
/// file.
#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["family", "grammar"])))]
struct InputArgs {
    /// Built-in family: dary:<d> (d >= 2) or regular:<k> (k >= 3)
    #[arg(long)]
    family: Option<String>,
    /// Path to a grammar JSON file {"root": ..., "classes": {...}}
    #[arg(long)]
    grammar: Option<std::path::PathBuf>,
    /// Vertex budget for tree expansion (overrides CONTOUR_BUDGET)
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact per-size contour counts
    Count {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n_max: usize,
        /// Count only contours containing an edge incident with the root
        #[arg(long)]
        rooted: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Enumerate contours on a truncation, listing edge sets per size
    Enumerate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        rooted: bool,
        /// Truncation depth override (refused if too shallow for n_max)
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Cross-check enumeration methods and formulas; nonzero exit on mismatch
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        depth: Option<usize>,
        /// Expected counts as inline JSON, e.g. '{"2":"1","3":"2"}'
        #[arg(long)]
        expect: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Finiteness analysis: infinite independent paths and infinite sizes
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Probe sizes 1..=probe-bound for infinite multiplicity
        #[arg(long, default_value_t = DEFAULT_PROBE_BOUND)]
        probe_bound: usize,
    },
    /// Rigorous enclosure of the weighted contour sum
    Peierls {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n_max: usize,
        /// Activity λ as a rational, e.g. 1/8
        #[arg(long, conflicts_with = "beta")]
        activity: Option<String>,
        /// Inverse temperature β as a rational (weight exp(-2βn))
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 64)]
        precision_bits: u32,
    },
    /// Lower/upper bounds sandwiching the d-ary counts
    Bounds {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Emit the binary minor of a truncation
    Binarize {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        depth: usize,
    },
    /// Emit the truncation with independent paths contracted
    Contract {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        depth: usize,
    },
}

enum Input {
    Dary(usize),
    Regular(usize),
    Grammar(TreeGrammar),
}

fn parse_family(spec: &str) -> Result<Input, Error> {
    let (kind, num) = spec
        .split_once(':')
        .ok_or_else(|| Error::Precondition(format!("family must be dary:<d> or regular:<k>, got {spec:?}")))?;
    let n: usize = num
        .parse()
        .map_err(|_| Error::Precondition(format!("invalid family parameter {num:?}")))?;
    match kind {
        "dary" if n >= 2 => Ok(Input::Dary(n)),
        "regular" if n >= 3 => Ok(Input::Regular(n)),
        "dary" => Err(Error::Precondition("dary requires d >= 2".into())),
        "regular" => Err(Error::Precondition("regular requires degree >= 3".into())),
        other => Err(Error::Precondition(format!("unknown family kind {other:?}"))),
    }
}

impl InputArgs {
    fn resolve(&self) -> Result<Input, Error> {
        if let Some(spec) = &self.family {
            return parse_family(spec);
        }
        let path = self.grammar.as_ref().expect("clap enforces one input source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
        Ok(Input::Grammar(TreeGrammar::from_json(&text)?))
    }

    fn budget(&self) -> Result<usize, Error> {
        if let Some(b) = self.budget {
            return Ok(b);
        }
        match std::env::var("CONTOUR_BUDGET") {
            Ok(v) => v
                .parse()
                .map_err(|_| Error::Precondition(format!("CONTOUR_BUDGET must be an integer, got {v:?}"))),
            Err(_) => Ok(DEFAULT_VERTEX_BUDGET),
        }
    }
}

impl Input {
    fn grammar(&self) -> TreeGrammar {
        match self {
            Input::Dary(d) => TreeGrammar::dary(*d),
            Input::Regular(k) => TreeGrammar::regular(*k),
            Input::Grammar(g) => g.clone(),
        }
    }

    fn name(&self) -> String {
        match self {
            Input::Dary(d) => format!("dary:{d}"),
            Input::Regular(k) => format!("regular:{k}"),
            Input::Grammar(g) => format!("grammar:{}", g.root_class()),
        }
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, kind) = classify(&e);
            eprintln!("{}", json!({"error": {"kind": kind, "message": e.to_string()}}));
            ExitCode::from(code)
        }
    }
}

fn classify(e: &Error) -> (u8, &'static str) {
    match e {
        Error::BudgetExceeded { .. } => (EXIT_BUDGET, "budget"),
        Error::Mismatch { .. } => (EXIT_MISMATCH, "mismatch"),
        Error::Schema(_) => (EXIT_INPUT, "schema"),
        Error::TruncationTooShallow { .. } => (EXIT_INPUT, "truncation"),
        Error::InfiniteMultiplicity { .. } => (EXIT_INPUT, "infinite-multiplicity"),
        Error::InfiniteCoefficients(_) => (EXIT_INPUT, "infinite-coefficients"),
        Error::InsufficientData { .. } => (EXIT_INPUT, "insufficient-data"),
        _ => (EXIT_INPUT, "input"),
    }
}

fn dispatch(cmd: &Command) -> Result<String, Error> {
    match cmd {
        Command::Count { input, n_max, rooted, format } => {
            let report = counts_for(&input.resolve()?, *n_max, *rooted)?;
            render_counts(&report, *format)
        }
        Command::Enumerate { input, n_max, rooted, depth, format } => {
            let src = input.resolve()?;
            let tree = expand_for(&src, *n_max, *depth, input.budget()?)?;
            let by_size = enumerate_contours(&tree, *n_max, *rooted)?;
            match format {
                Format::Json => {
                    let sizes: BTreeMap<String, Value> = by_size
                        .iter()
                        .map(|(n, group)| {
                            let lists: Vec<Value> =
                                group.iter().map(|c| json!(c.edges)).collect();
                            (n.to_string(), Value::Array(lists))
                        })
                        .collect();
                    let counts: BTreeMap<String, String> = by_size
                        .iter()
                        .map(|(n, g)| (n.to_string(), g.len().to_string()))
                        .collect();
                    Ok(json!({
                        "family": src.name(),
                        "vertices": tree.len(),
                        "counts": counts,
                        "contours": sizes,
                    })
                    .to_string())
                }
                Format::Csv => {
                    let mut out = String::from("n,count\n");
                    for (n, c) in size_counts(&by_size) {
                        out.push_str(&format!("{n},{c}\n"));
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }
        Command::Verify { input, n_max, depth, expect, format } => {
            let src = input.resolve()?;
            let budget = input.budget()?;
            let tree = expand_for(&src, *n_max, *depth, budget)?;
            let by_size = enumerate_contours(&tree, *n_max, false)?;
            let counts = size_counts(&by_size);
            // the quadratic antichain search only scales to a small
            // truncation, so cross-check on one expanded just for the cap
            let cap = (*n_max).min(4);
            let small = expand_for(&src, cap, None, budget)?;
            let check = cross_check(&small, cap, Some(cap))?;
            let formula = counts_for(&src, *n_max, false)?;
            let mut table: BTreeMap<String, Value> = BTreeMap::new();
            for n in 1..=*n_max {
                let enumerated = counts.get(&n).copied().unwrap_or(0);
                let expected = match formula.counts.get(&n) {
                    Some(Count::Finite(v)) => v.to_string(),
                    Some(Count::Infinite) => "infinite".to_string(),
                    None => "0".to_string(),
                };
                if expected != enumerated.to_string() {
                    return Err(Error::Mismatch {
                        n,
                        left: enumerated.to_string(),
                        right: expected,
                    });
                }
                table.insert(
                    n.to_string(),
                    json!({"enumerated": enumerated.to_string(), "formula": expected}),
                );
            }
            if let Some(expect) = expect {
                let wanted: BTreeMap<String, String> = serde_json::from_str(expect)
                    .map_err(|e| Error::Schema(format!("invalid --expect JSON: {e}")))?;
                for (n, want) in &wanted {
                    let n_parsed: usize = n
                        .parse()
                        .map_err(|_| Error::Schema(format!("invalid size key {n:?} in --expect")))?;
                    let got = counts.get(&n_parsed).copied().unwrap_or(0);
                    if got.to_string() != *want {
                        return Err(Error::Mismatch {
                            n: n_parsed,
                            left: got.to_string(),
                            right: want.clone(),
                        });
                    }
                }
            }
            match format {
                Format::Json => Ok(json!({
                    "family": src.name(),
                    "ok": true,
                    "direct_cap": check.direct_cap,
                    "sizes": table,
                })
                .to_string()),
                Format::Csv => {
                    let mut out = String::from("n,enumerated,formula\n");
                    for (n, row) in &table {
                        out.push_str(&format!(
                            "{n},{},{}\n",
                            row["enumerated"].as_str().unwrap(),
                            row["formula"].as_str().unwrap()
                        ));
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }
        Command::Analyze { input, probe_bound } => {
            let src = input.resolve()?;
            let report = infinitely_many_sizes(&src.grammar(), *probe_bound, input.budget()?)?;
            let witness = report.witness.as_ref().map(|w| {
                json!({"entry_path": w.entry_path, "class_cycle": w.class_cycle})
            });
            Ok(json!({
                "family": src.name(),
                "has_infinite_path": report.has_infinite_path,
                "infinitely_many_sizes": report.infinitely_many_sizes,
                "infinite_sizes_found": report.infinite_sizes_found,
                "probe_bound": report.probe_bound,
                "witness": witness,
            })
            .to_string())
        }
        Command::Peierls { input, n_max, activity, beta, precision_bits } => {
            let src = input.resolve()?;
            let weight = match (activity, beta) {
                (Some(a), None) => WeightSpec::Activity(parse_rational(a)?),
                (None, Some(b)) => WeightSpec::ExpBeta(parse_rational(b)?),
                _ => {
                    return Err(Error::Precondition(
                        "exactly one of --activity or --beta is required".into(),
                    ))
                }
            };
            let counts = counts_for(&src, *n_max, false)?;
            let enc = peierls_partial_sum(&counts, &weight, *n_max, *precision_bits)?;
            let mut out = json!({
                "family": src.name(),
                "n_max": n_max,
                "lower": enc.lower.to_string(),
                "upper": enc.upper.to_string(),
            });
            if let Input::Dary(d) = src {
                out["critical_activity_bound"] =
                    Value::String(critical_activity_bound(d, *precision_bits).to_string());
            }
            Ok(out.to_string())
        }
        Command::Bounds { input, n_max, format } => {
            let src = input.resolve()?;
            let d = match src {
                Input::Dary(d) => d,
                _ => {
                    return Err(Error::Precondition(
                        "bounds requires --family dary:<d>".into(),
                    ))
                }
            };
            let mut table: BTreeMap<String, Value> = BTreeMap::new();
            let mut rows = Vec::new();
            for n in 2..=*n_max {
                if (n - 1) % (d - 1) != 0 {
                    continue;
                }
                let (lower, upper) = bounds_dary(d, n)?;
                let bb = bound_bollobas(d, n);
                table.insert(
                    n.to_string(),
                    json!({
                        "lower": lower.to_string(),
                        "upper": upper.to_string(),
                        "bollobas": bb.to_string(),
                    }),
                );
                rows.push((n, lower, upper, bb));
            }
            match format {
                Format::Json => {
                    Ok(json!({"family": src.name(), "bounds": table}).to_string())
                }
                Format::Csv => {
                    let mut out = String::from("n,lower,upper,bollobas\n");
                    for (n, lower, upper, bb) in rows {
                        out.push_str(&format!("{n},{lower},{upper},{bb}\n"));
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }
        Command::Binarize { input, depth } => {
            let src = input.resolve()?;
            let tree = expand_grammar(&src.grammar(), *depth, input.budget()?)?;
            let (bin, _) = binarize(&tree)?;
            Ok(tree_json(&src, &bin, None).to_string())
        }
        Command::Contract { input, depth } => {
            let src = input.resolve()?;
            let tree = expand_grammar(&src.grammar(), *depth, input.budget()?)?;
            let (ct, _) = contract_independent_paths(&tree)?;
            Ok(tree_json(&src, &ct.tree, Some(&ct.edge_length)).to_string())
        }
    }
}

fn parse_rational(text: &str) -> Result<BigRational, Error> {
    BigRational::from_str(text)
        .map_err(|e| Error::Precondition(format!("invalid rational {text:?}: {e}")))
}

fn counts_for(src: &Input, n_max: usize, rooted: bool) -> Result<CountReport, Error> {
    match src {
        Input::Dary(d) => Ok(dary_report(*d, n_max, rooted)),
        Input::Regular(k) => Ok(regular_report(*k, n_max, rooted)),
        Input::Grammar(g) => {
            if rooted {
                return Err(Error::Precondition(
                    "--rooted is only supported for built-in families".into(),
                ));
            }
            count_grammar(g, n_max)
        }
    }
}

fn render_counts(report: &CountReport, format: Format) -> Result<String, Error> {
    match format {
        Format::Json => {
            let counts: BTreeMap<String, String> = report
                .counts
                .iter()
                .map(|(n, c)| (n.to_string(), c.to_string()))
                .collect();
            Ok(json!({
                "family": report.family.to_string(),
                "rooted": report.rooted,
                "order": report.order,
                "counts": counts,
            })
            .to_string())
        }
        Format::Csv => {
            let mut out = String::from("n,count\n");
            for (n, c) in &report.counts {
                out.push_str(&format!("{n},{c}\n"));
            }
            Ok(out.trim_end().to_string())
        }
    }
}

/// Expands the grammar deep enough for exact enumeration up to `n_max`,
/// using the solver's own depth requirement: expand shallowly, and on a
/// too-shallow report re-expand at the required depth. An explicit `depth`
/// is used as-is and refused by the enumerator if insufficient.
fn expand_for(
    src: &Input,
    n_max: usize,
    depth: Option<usize>,
    budget: usize,
) -> Result<ExplicitTree, Error> {
    let grammar = src.grammar();
    if let Some(d) = depth {
        return expand_grammar(&grammar, d, budget);
    }
    let mut depth = 2;
    for _ in 0..3 {
        let tree = expand_grammar(&grammar, depth, budget)?;
        match enumerate_contours(&tree, n_max, false) {
            Ok(_) => return Ok(tree),
            Err(Error::TruncationTooShallow { required, actual }) if required > actual => {
                if required <= depth {
                    return Ok(tree);
                }
                depth = required;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Precondition(
        "no finite truncation depth suffices; the tree likely has an infinite independent path"
            .into(),
    ))
}

fn tree_json(src: &Input, tree: &ExplicitTree, edge_length: Option<&[usize]>) -> Value {
    let children: Vec<Vec<usize>> =
        (0..tree.len()).map(|v| tree.children(v).to_vec()).collect();
    let open_ends: Vec<usize> = (0..tree.len()).filter(|&v| tree.is_open_end(v)).collect();
    let mut out = json!({
        "family": src.name(),
        "vertices": tree.len(),
        "root": tree.root(),
        "children": children,
        "open_ends": open_ends,
    });
    if let Some(lengths) = edge_length {
        out["edge_lengths"] = json!(lengths);
    }
    out
}
