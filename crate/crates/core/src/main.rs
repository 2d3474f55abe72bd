use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use heffter::construct::{construct, construct_forced, Class};
use heffter::decompose::{
    base_cycles, check_compatible, check_orthogonality, gcd_compat_predicate, natural_orderings,
    verify_decomposition, DecomposeError,
};
use heffter::grid::{Axis, PartialArray};
use heffter::io::{self, Format};
use heffter::oracle::{brute_force_heffter, find_simple_ordering, OracleError, SearchSpec};
use heffter::verify::{is_globally_simple, shifted_sum_table, Detail};

const FAILURE: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "heffter", version, about = "Build and check globally simple integer Heffter arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Rows,
    Cols,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::Rows => Axis::Row,
            AxisArg::Cols => Axis::Column,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build H(n;k) and print it.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// json, csv or table
        #[arg(long, default_value = "json")]
        format: Format,
        /// Also try k = 9, keeping the result only if it verifies.
        #[arg(long)]
        force: bool,
    },
    /// Check an array file. Fill counts and sums modulo 2nk+1 are always checked.
    Verify {
        file: PathBuf,
        /// Line sums must vanish over the integers.
        #[arg(long)]
        integer: bool,
        /// Every row and column must be simple in its natural order.
        #[arg(long)]
        global_simple: bool,
        /// Absolute values must be exactly 1..nk.
        #[arg(long)]
        support: bool,
        #[arg(long)]
        json: bool,
    },
    /// Partial sums in the shifted, wrapped reading order of a construction class.
    Table {
        file: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// n3 or n0
        #[arg(long)]
        class: Class,
    },
    /// Develop the row and column cycle systems over Z_{2nk+1}.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        check_orthogonal: bool,
        /// Report the cycle type of the natural orderings' composition.
        #[arg(long)]
        check_compatible: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search for a simple ordering of one line.
    Order {
        file: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Exhaustively enumerate small H(m,n;h,k).
    Search {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<PartialArray, ExitCode> {
    io::read_array(path).map_err(|e| fail(USAGE, e))
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { n, k, format, force } => cmd_construct(n, k, format, force),
        Command::Verify {
            file,
            integer,
            global_simple,
            support,
            json,
        } => cmd_verify(&file, integer, global_simple, support, json),
        Command::Table { file, axis, class } => cmd_table(&file, axis.into(), class),
        Command::Decompose {
            file,
            check_orthogonal,
            check_compatible,
            json,
        } => cmd_decompose(&file, check_orthogonal, check_compatible, json),
        Command::Order {
            file,
            axis,
            index,
            budget,
        } => cmd_order(&file, axis.into(), index, budget),
        Command::Search {
            m,
            n,
            h,
            k,
            limit,
            budget,
            format,
        } => cmd_search(m, n, h, k, limit, budget, format),
    };
    result.unwrap_or_else(|code| code)
}

fn cmd_construct(n: usize, k: usize, format: Format, force: bool) -> Result<ExitCode, ExitCode> {
    let built = if force {
        construct_forced(n, k)
    } else {
        construct(n, k)
    };
    match built {
        Ok(array) => {
            print!("{}", io::emit(&array, format));
            Ok(ExitCode::SUCCESS)
        }
        Err(heffter::ConstructError::Verification { n, k, detail }) => Err(fail(
            FAILURE,
            format!("H({n};{k}) failed verification: {detail}"),
        )),
        Err(e) => Err(fail(USAGE, e)),
    }
}

fn cmd_verify(
    file: &Path,
    integer: bool,
    global_simple: bool,
    support: bool,
    json: bool,
) -> Result<ExitCode, ExitCode> {
    let array = load(file)?;
    let report = is_globally_simple(&array);
    let mut checks = vec![
        ("fill counts", report.fill_ok),
        ("sums modulo 2nk+1", report.modular_sums_ok),
    ];
    if support {
        checks.push(("support", report.support_ok));
    }
    if integer {
        checks.push(("integer sums", report.integer_sums_ok));
    }
    if global_simple {
        checks.push(("globally simple", report.globally_simple));
    }
    let ok = checks.iter().all(|(_, passed)| *passed);
    let requested = |d: &Detail| match d {
        Detail::FillCount { .. } | Detail::ModularSum { .. } => true,
        Detail::MissingValue { .. } | Detail::DuplicatedValue { .. } => support,
        Detail::IntegerSum { .. } => integer,
        Detail::RepeatedPartialSum { .. } => global_simple,
    };
    let witnesses: Vec<_> = report.witnesses_where(requested).collect();
    if json {
        let checks: serde_json::Map<_, _> = checks
            .iter()
            .map(|(name, passed)| (name.to_string(), json!(passed)))
            .collect();
        let out = json!({ "ok": ok, "checks": checks, "witnesses": witnesses });
        println!("{}", serde_json::to_string_pretty(&out).expect("plain data"));
    } else {
        for (name, passed) in &checks {
            println!("{name}: {}", status(*passed));
        }
        for w in &witnesses {
            println!("{w}");
        }
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE)
    })
}

fn cmd_table(file: &Path, axis: Axis, class: Class) -> Result<ExitCode, ExitCode> {
    let array = load(file)?;
    let traces = shifted_sum_table(&array, axis, class).map_err(|e| fail(USAGE, e))?;
    for trace in traces {
        let sums: Vec<String> = trace.sums.iter().map(i64::to_string).collect();
        println!("{},{}", trace.label(), sums.join(","));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decompose(
    file: &Path,
    orthogonal: bool,
    compatible: bool,
    json: bool,
) -> Result<ExitCode, ExitCode> {
    let array = load(file)?;
    let not_simple = |e: DecomposeError| fail(FAILURE, e);
    let rows = base_cycles(&array, Axis::Row).map_err(not_simple)?;
    let cols = base_cycles(&array, Axis::Column).map_err(not_simple)?;
    let row_report = verify_decomposition(&rows);
    let col_report = verify_decomposition(&cols);
    let mut ok = row_report.ok && col_report.ok;
    let mut out = json!({
        "modulus": rows.modulus,
        "rows": row_report,
        "columns": col_report,
    });
    if orthogonal {
        let report = check_orthogonality(&rows, &cols).map_err(|e| fail(USAGE, e))?;
        ok &= report.ok;
        out["orthogonal"] = json!(report);
    }
    if compatible {
        // Reported only; natural orderings need not be compatible.
        let c = check_compatible(&natural_orderings(&array));
        let d = array.dims();
        out["compatible"] = json!(c);
        out["gcd_predicate"] = json!(gcd_compat_predicate(d.n, d.k));
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&out).expect("plain data"));
    } else {
        println!("vertices: {}", rows.modulus);
        for (name, r) in [("row", &out["rows"]), ("column", &out["columns"])] {
            println!(
                "{name} cycles: {} cycles, {} of {} edges, partition {}",
                r["cycles"],
                r["edges"],
                r["expected_edges"],
                status(r["ok"] == true)
            );
            if !r["problem"].is_null() {
                println!("  {}", r["problem"]);
            }
        }
        if let Some(o) = out.get("orthogonal") {
            println!("orthogonal: {}", status(o["ok"] == true));
            if let Some([r, c]) = o["witness"].as_array().map(Vec::as_slice) {
                println!("  row cycle {r} and column cycle {c} share two or more edges");
            }
        }
        if let Some(c) = out.get("compatible") {
            println!("natural orderings compatible: {}", c["compatible"]);
            println!("cycle type of row∘column: {}", summarize_cycle_type(&c["cycle_type"]));
            println!("cycle type of column∘row: {}", summarize_cycle_type(&c["reverse_cycle_type"]));
            println!("gcd(n, k-2) = 1 predicts compatible orderings: {}", out["gcd_predicate"]);
        }
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE)
    })
}

/// `[19, 19, 19]` as `19^3`.
fn summarize_cycle_type(v: &serde_json::Value) -> String {
    let lengths: Vec<u64> = v
        .as_array()
        .map(|a| a.iter().filter_map(|x| x.as_u64()).collect())
        .unwrap_or_default();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < lengths.len() {
        let j = lengths[i..].iter().take_while(|&&x| x == lengths[i]).count();
        parts.push(if j == 1 {
            lengths[i].to_string()
        } else {
            format!("{}^{j}", lengths[i])
        });
        i += j;
    }
    parts.join(" ")
}

fn cmd_order(file: &Path, axis: Axis, index: usize, budget: u64) -> Result<ExitCode, ExitCode> {
    let array = load(file)?;
    if index == 0 || index > array.line_count(axis) {
        return Err(fail(USAGE, format!("{axis} {index} is out of range")));
    }
    let line = array.line(axis, index);
    match find_simple_ordering(&line, array.modulus(), budget) {
        Ok(Some(order)) => {
            let text: Vec<String> = order.iter().map(i64::to_string).collect();
            println!("{}", text.join(","));
            Ok(ExitCode::SUCCESS)
        }
        Ok(None) => Err(fail(FAILURE, format!("{axis} {index} has no simple ordering"))),
        Err(e @ OracleError::OrderingBudgetExceeded { .. }) => Err(fail(BUDGET, e)),
        Err(e) => Err(fail(USAGE, e)),
    }
}

fn cmd_search(
    m: usize,
    n: usize,
    h: usize,
    k: usize,
    limit: Option<usize>,
    budget: u64,
    format: Format,
) -> Result<ExitCode, ExitCode> {
    let spec = SearchSpec {
        limit,
        budget,
        ..SearchSpec::new(m, n, h, k)
    };
    match brute_force_heffter(&spec) {
        Ok(outcome) => {
            for (i, s) in outcome.solutions.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", io::emit(s, format));
            }
            eprintln!(
                "{} solution(s), {} nodes",
                outcome.solutions.len(),
                outcome.nodes
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ OracleError::BudgetExceeded { .. }) => Err(fail(BUDGET, e)),
        Err(e) => Err(fail(USAGE, e)),
    }
}
