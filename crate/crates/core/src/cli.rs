//! The `cyclosum` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or agreement check fails (or output
//! cannot be written), 2 on usage errors and invalid parameters.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::prime_power;
use crate::bench::{render_csv, render_markdown, run_bench, BenchError};
use crate::cyclo::{compute_all, compute_all_par, compute_minimal};
use crate::field::{build_index_table, find_generator, make_field_bounded, IndexTable, DEFAULT_Q_BOUND};
use crate::jacobi::{
    jacobi_from_full_matrix, jacobi_minimal, jacobi_oracle, jacobi_theorem_expression, JacobiResult,
};
use crate::order::{enumerate_valid_q_with_limit, make_order_spec, OrderSpec, ParityCase, Variant};
use crate::partition::partition;
use crate::verify::run_verification;

pub const QMAX_ENV: &str = "CYCLOSUM_QMAX";

#[derive(Debug, Parser)]
#[command(name = "cyclosum", version, about = "Cyclotomic numbers and Jacobi sums of orders l² and 2l²")]
struct Cli {
    /// Upper bound on q (default 2^20, or $CYCLOSUM_QMAX)
    #[arg(long, global = true)]
    qmax: Option<u64>,
    /// Write output to this file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Oracle,
    Full,
    Minimal,
    Expression,
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// Odd prime l
    #[arg(long)]
    l: u32,
    /// Order variant: l2 (e = l²) or 2l2 (e = 2l²)
    #[arg(long)]
    variant: Variant,
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Field order q = p^r
    #[arg(long)]
    q: Option<u64>,
    /// Characteristic p
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree r (default 1 when only p is given)
    #[arg(long)]
    r: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List prime powers q with e | q - 1
    Params {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Partition of index pairs into classes
    Classes {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// Parity case when no field is given: even or odd
        #[arg(long)]
        parity: Option<ParityCase>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Cyclotomic-number matrix or minimal set
    Cyclo {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// Emit one value per class instead of the full matrix
        #[arg(long)]
        minimal: bool,
        #[arg(long)]
        parallel: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Jacobi sums
    Jacobi {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// Compute J(1, n)
        #[arg(long, conflicts_with_all = ["i", "j", "all"])]
        n: Option<u32>,
        #[arg(long, requires = "j")]
        i: Option<u32>,
        #[arg(long, requires = "i")]
        j: Option<u32>,
        /// Compute J(1, n) for every n
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Minimal)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the identity and cross-method agreement suite
    Verify {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        parallel: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compare naive and minimal evaluation counts and timings
    Bench {
        /// One or more odd primes l
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        l: Vec<u32>,
        #[arg(long)]
        variant: Variant,
        /// Field order; defaults to the smallest valid q for each l
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long)]
        parallel: bool,
        /// table renders Markdown
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

struct Context {
    qmax: u64,
}

struct Setup {
    spec: OrderSpec,
    table: IndexTable,
}

impl Context {
    fn resolve_field(&self, field: &FieldArgs) -> Result<(u64, u32), Failure> {
        let (p, r) = match (field.q, field.p, field.r) {
            (Some(q), p, r) => {
                let (qp, qr) = prime_power(q).ok_or_else(|| usage(format!("q = {q} is not a prime power")))?;
                if p.is_some_and(|p| p != qp) || r.is_some_and(|r| r != qr) {
                    return Err(usage(format!("q = {q} is inconsistent with the given p and r")));
                }
                (qp, qr)
            }
            (None, Some(p), r) => (p, r.unwrap_or(1)),
            (None, None, _) => return Err(usage("a field is required: give --q or --p [--r]")),
        };
        Ok((p, r))
    }

    fn setup(&self, order: &OrderArgs, field: &FieldArgs) -> Result<Setup, Failure> {
        let (p, r) = self.resolve_field(field)?;
        let f = make_field_bounded(p, r, self.qmax).map_err(usage)?;
        let spec = make_order_spec(order.l, order.variant, &f).map_err(usage)?;
        let table = build_index_table(&f, &find_generator(&f)).map_err(usage)?;
        Ok(Setup { spec, table })
    }
}

fn metadata(spec: &OrderSpec, table: Option<&IndexTable>, method: Option<&str>) -> Value {
    let mut m = json!({
        "tool": "cyclosum",
        "version": env!("CARGO_PKG_VERSION"),
        "l": spec.l,
        "variant": spec.variant,
        "e": spec.e,
        "parity_case": spec.parity_case,
    });
    let obj = m.as_object_mut().expect("object");
    if let Some(t) = table {
        let meta = t.meta();
        obj.insert("p".into(), json!(meta.p));
        obj.insert("r".into(), json!(meta.r));
        obj.insert("q".into(), json!(meta.q));
        obj.insert("k".into(), json!(spec.k));
        obj.insert("generator".into(), json!(meta.generator));
        obj.insert("modulus_poly".into(), json!(meta.modulus_poly));
    }
    if let Some(method) = method {
        obj.insert("method".into(), json!(method));
    }
    m
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_params(ctx: &Context, order: &OrderArgs, bound: u64, format: Format) -> Result<String, Failure> {
    let list = enumerate_valid_q_with_limit(order.l, order.variant, bound, ctx.qmax).map_err(usage)?;
    let e = order.variant.order(order.l);
    Ok(match format {
        Format::Json => to_json(&json!({
            "tool": "cyclosum",
            "version": env!("CARGO_PKG_VERSION"),
            "l": order.l,
            "variant": order.variant,
            "e": e,
            "bound": bound,
            "fields": list,
        })),
        Format::Csv => {
            let mut out = String::from("p,r,q,k,parity_case\n");
            for v in &list {
                let _ = writeln!(out, "{},{},{},{},{}", v.p, v.r, v.q, v.k, v.parity_case);
            }
            out
        }
        Format::Table => {
            let mut out = format!("valid q <= {bound} for l = {}, e = {e}\n", order.l);
            for v in &list {
                let _ = writeln!(out, "  q = {:>7} = {}^{}  k = {:<6} {}", v.q, v.p, v.r, v.k, v.parity_case);
            }
            out
        }
    })
}

fn cmd_classes(
    ctx: &Context,
    order: &OrderArgs,
    field: &FieldArgs,
    parity: Option<ParityCase>,
    format: Format,
) -> Result<String, Failure> {
    let has_field = field.q.is_some() || field.p.is_some();
    let (spec, table) = match (has_field, parity) {
        (true, None) => {
            let s = ctx.setup(order, field)?;
            (s.spec, Some(s.table))
        }
        (false, Some(parity)) => (
            OrderSpec::abstract_spec(order.l, order.variant, parity).map_err(usage)?,
            None,
        ),
        (true, Some(_)) => return Err(usage("give either a field or --parity, not both")),
        (false, None) => return Err(usage("give a field (--q or --p) or --parity")),
    };
    let part = partition(&spec);
    let census = part.census();
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("a,b,rep_a,rep_b,class_size\n");
            let e = spec.e;
            for a in 0..e {
                for b in 0..e {
                    let class = part.class_of(a, b);
                    let _ = writeln!(out, "{a},{b},{},{},{}", class.rep.0, class.rep.1, class.size());
                }
            }
            out
        }
        Format::Json => to_json(&json!({
            "metadata": metadata(&spec, table.as_ref(), None),
            "class_count": part.len(),
            "census": census,
            "classes": part.classes,
        })),
        Format::Table => format!(
            "e = {} ({}), {} classes: {} singleton, {} of size 2, {} of size 3, {} of size 6\n",
            spec.e,
            spec.parity_case,
            part.len(),
            census.ones,
            census.twos,
            census.threes,
            census.sixes
        ),
    })
}

fn cmd_cyclo(
    ctx: &Context,
    order: &OrderArgs,
    field: &FieldArgs,
    minimal: bool,
    parallel: bool,
    format: Format,
) -> Result<String, Failure> {
    let Setup { spec, table } = ctx.setup(order, field)?;
    let kind = if minimal { "minimal" } else { "full" };
    let meta = metadata(&spec, Some(&table), Some(kind));
    let cells: Vec<(u32, u32, u64)> = if minimal {
        let part = partition(&spec);
        let mins = compute_minimal(&spec, &table, &part).map_err(|e| Failure::Check(e.to_string()))?;
        mins.by_rep.iter().map(|(&(a, b), &v)| (a, b, v)).collect()
    } else {
        let m = if parallel { compute_all_par(&spec, &table) } else { compute_all(&spec, &table) }
            .map_err(usage)?;
        let e = spec.e;
        (0..e * e).map(|i| (i / e, i % e, m.get(i / e, i % e))).collect()
    };
    Ok(match format {
        Format::Json => to_json(&json!({ "metadata": meta, "cells": cells })),
        Format::Csv => {
            let mut out = format!("# {}\n", serde_json::to_string(&meta).expect("json"));
            out.push_str(if minimal { "rep_a,rep_b,count\n" } else { "a,b,count\n" });
            for (a, b, v) in cells {
                let _ = writeln!(out, "{a},{b},{v}");
            }
            out
        }
        Format::Table => {
            let mut out = format!("# {}\n", serde_json::to_string(&meta).expect("json"));
            if minimal {
                for (a, b, v) in cells {
                    let _ = writeln!(out, "({a},{b}) = {v}");
                }
            } else {
                let e = spec.e as usize;
                for row in cells.chunks(e) {
                    let line: Vec<String> = row.iter().map(|c| format!("{:>3}", c.2)).collect();
                    let _ = writeln!(out, "{}", line.join(" "));
                }
            }
            out
        }
    })
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Oracle => "oracle",
        MethodArg::Full => "full_matrix",
        MethodArg::Minimal => "minimal",
        MethodArg::Expression => "theorem_expression",
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_jacobi(
    ctx: &Context,
    order: &OrderArgs,
    field: &FieldArgs,
    n: Option<u32>,
    ij: Option<(u32, u32)>,
    all: bool,
    method: MethodArg,
    format: Format,
) -> Result<String, Failure> {
    let Setup { spec, table } = ctx.setup(order, field)?;
    let pairs: Vec<(u32, u32)> = match (n, ij, all) {
        (Some(n), None, false) => vec![(1, n)],
        (None, Some(ij), false) => vec![ij],
        (None, None, true) => (0..spec.e).map(|n| (1, n)).collect(),
        _ => return Err(usage("select exactly one of --n, --i/--j, --all")),
    };
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= spec.e || j >= spec.e) {
        return Err(usage(format!("index ({i},{j}) out of range for e = {}", spec.e)));
    }
    let needs_first_one = matches!(method, MethodArg::Minimal | MethodArg::Expression);
    if needs_first_one && pairs.iter().any(|&(i, _)| i != 1) {
        return Err(usage("the minimal and expression methods compute J(1, n) only"));
    }
    let fail = |e: crate::jacobi::JacobiError| Failure::Check(e.to_string());
    let results: Vec<JacobiResult> = match method {
        MethodArg::Oracle => pairs
            .iter()
            .map(|&(i, j)| jacobi_oracle(i, j, &spec, &table))
            .collect::<Result<_, _>>()
            .map_err(fail)?,
        MethodArg::Full => {
            let m = compute_all(&spec, &table).map_err(usage)?;
            pairs
                .iter()
                .map(|&(i, j)| jacobi_from_full_matrix(i, j, &m))
                .collect::<Result<_, _>>()
                .map_err(fail)?
        }
        MethodArg::Minimal | MethodArg::Expression => {
            let part = partition(&spec);
            let mins = compute_minimal(&spec, &table, &part).map_err(|e| Failure::Check(e.to_string()))?;
            pairs
                .iter()
                .map(|&(_, n)| {
                    if method == MethodArg::Minimal {
                        jacobi_minimal(n, &spec, &mins, &part)
                    } else {
                        jacobi_theorem_expression(n, &spec, &mins, &part)
                    }
                })
                .collect::<Result<_, _>>()
                .map_err(fail)?
        }
    };
    let meta = metadata(&spec, Some(&table), Some(method_name(method)));
    let entry = |r: &JacobiResult| json!({ "i": r.i, "j": r.j, "value": r.value });
    Ok(match format {
        Format::Json if results.len() == 1 => {
            let r = &results[0];
            to_json(&json!({ "metadata": meta, "i": r.i, "j": r.j, "value": r.value }))
        }
        Format::Json => to_json(&json!({
            "metadata": meta,
            "results": results.iter().map(entry).collect::<Vec<_>>(),
        })),
        Format::Csv | Format::Table => {
            let phi = results[0].value.coeffs().len();
            let mut out = format!("# {}\n", serde_json::to_string(&meta).expect("json"));
            let header: Vec<String> = (0..phi).map(|t| format!("c{t}")).collect();
            let _ = writeln!(out, "i,j,{}", header.join(","));
            for r in &results {
                let coeffs: Vec<String> = r.value.coeffs().iter().map(i64::to_string).collect();
                let _ = writeln!(out, "{},{},{}", r.i, r.j, coeffs.join(","));
            }
            out
        }
    })
}

fn cmd_verify(
    ctx: &Context,
    order: &OrderArgs,
    field: &FieldArgs,
    parallel: bool,
    format: Format,
) -> Result<(String, bool), Failure> {
    let Setup { spec, table } = ctx.setup(order, field)?;
    let report = run_verification(&spec, &table, parallel);
    let out = match format {
        Format::Json => to_json(&json!({
            "metadata": metadata(&spec, Some(&table), None),
            "ok": report.ok,
            "checks": report.checks,
        })),
        Format::Csv => {
            let mut out = String::from("check,ok,detail\n");
            for c in &report.checks {
                let _ = writeln!(out, "{},{},\"{}\"", c.name, c.ok, c.detail.replace('"', "'"));
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            for c in &report.checks {
                let _ = writeln!(out, "{} {:<36} {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            out
        }
    };
    Ok((out, report.ok))
}

fn cmd_bench(
    ctx: &Context,
    ls: &[u32],
    variant: Variant,
    q: Option<u64>,
    repetitions: usize,
    parallel: bool,
    format: Format,
) -> Result<String, Failure> {
    let mut reports = Vec::new();
    for &l in ls {
        let order = OrderArgs { l, variant };
        let field = match q {
            Some(q) => FieldArgs {
                q: Some(q),
                p: None,
                r: None,
            },
            None => {
                let first = enumerate_valid_q_with_limit(l, variant, ctx.qmax, ctx.qmax)
                    .map_err(usage)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| usage(format!("no valid q <= {} for l = {l}", ctx.qmax)))?;
                FieldArgs {
                    q: Some(first.q as u64),
                    p: None,
                    r: None,
                }
            }
        };
        let Setup { spec, table } = ctx.setup(&order, &field)?;
        let report = run_bench(&spec, &table, repetitions, parallel).map_err(|e| match e {
            BenchError::ZeroRepetitions => usage(e),
            other => Failure::Check(other.to_string()),
        })?;
        reports.push(report);
    }
    Ok(match format {
        Format::Table => render_markdown(&reports),
        Format::Csv => render_csv(&reports),
        Format::Json => to_json(&reports),
    })
}

fn dispatch(cli: &Cli, ctx: &Context) -> Result<(String, bool), Failure> {
    let ok = |s: String| Ok((s, true));
    match &cli.command {
        Command::Params { order, bound, format } => ok(cmd_params(ctx, order, *bound, *format)?),
        Command::Classes {
            order,
            field,
            parity,
            format,
        } => ok(cmd_classes(ctx, order, field, *parity, *format)?),
        Command::Cyclo {
            order,
            field,
            minimal,
            parallel,
            format,
        } => ok(cmd_cyclo(ctx, order, field, *minimal, *parallel, *format)?),
        Command::Jacobi {
            order,
            field,
            n,
            i,
            j,
            all,
            method,
            format,
        } => {
            let ij = i.zip(*j);
            ok(cmd_jacobi(ctx, order, field, *n, ij, *all, *method, *format)?)
        }
        Command::Verify {
            order,
            field,
            parallel,
            format,
        } => cmd_verify(ctx, order, field, *parallel, *format),
        Command::Bench {
            l,
            variant,
            q,
            repetitions,
            parallel,
            format,
        } => ok(cmd_bench(ctx, l, *variant, *q, *repetitions, *parallel, *format)?),
    }
}

fn env_qmax() -> Result<Option<u64>, String> {
    match std::env::var(QMAX_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{QMAX_ENV}={v} is not an integer")),
        Err(_) => Ok(None),
    }
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let qmax = match cli.qmax.map(Ok).or_else(|| env_qmax().transpose()) {
        Some(Ok(q)) => q,
        Some(Err(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
        None => DEFAULT_Q_BOUND,
    };
    let ctx = Context { qmax };
    match dispatch(&cli, &ctx) {
        Ok((text, passed)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return 1;
            }
            if passed {
                0
            } else {
                let _ = writeln!(err, "verification failed");
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nUsage: cyclosum <params|classes|cyclo|jacobi|verify|bench> [OPTIONS]\nRun `cyclosum --help` for details.");
            2
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
