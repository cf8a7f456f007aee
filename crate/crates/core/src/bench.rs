//! Naive full-matrix vs. minimal-class evaluation of `J(1, n)`, `0 <= n < e`.
//!
//! The evaluation count of a path is the number of distinct cells `(a, b)` whose
//! cyclotomic number it reads, observed by instrumenting the evaluators' lookups.
//! Wall times are medians over the requested repetitions.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cycint::CycInt;
use crate::cyclo::{compute_all, compute_minimal, CycloError};
use crate::field::IndexTable;
use crate::jacobi::{jacobi_1n_dense_with, jacobi_minimal_with, JacobiError};
use crate::order::OrderSpec;
use crate::partition::partition;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("naive and minimal J(1,{n}) disagree")]
    AgreementFailure { n: u32 },
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub order_spec: OrderSpec,
    pub naive_count: usize,
    pub minimal_count: usize,
    pub reduction: usize,
    pub naive_ms: f64,
    pub minimal_ms: f64,
    pub partition_ms: f64,
    /// Minimal path with the `J(1, n)` evaluations spread over the rayon pool.
    pub parallel_ms: Option<f64>,
    pub repetitions: usize,
    pub agreement: bool,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[xs.len() / 2]
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct NaiveRun {
    values: Vec<CycInt>,
    cells_read: usize,
}

fn naive_path(spec: &OrderSpec, table: &IndexTable) -> Result<NaiveRun, BenchError> {
    let e = spec.e;
    let m = compute_all(spec, table)?;
    let mut seen = vec![false; (e * e) as usize];
    let values = (0..e)
        .map(|n| {
            jacobi_1n_dense_with(n, e, |a, b| {
                seen[(a * e + b) as usize] = true;
                m.get(a, b)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NaiveRun {
        values,
        cells_read: seen.iter().filter(|&&s| s).count(),
    })
}

pub fn run_bench(spec: &OrderSpec, table: &IndexTable, repetitions: usize, parallel: bool) -> Result<BenchReport, BenchError> {
    if repetitions == 0 {
        return Err(BenchError::ZeroRepetitions);
    }
    let e = spec.e;

    let t = Instant::now();
    let part = partition(spec);
    let partition_ms = ms_since(t);

    let mut naive_times = Vec::with_capacity(repetitions);
    let mut minimal_times = Vec::with_capacity(repetitions);
    let mut naive = None;
    let mut minimal = None;
    for _ in 0..repetitions {
        let t = Instant::now();
        naive = Some(naive_path(spec, table)?);
        naive_times.push(ms_since(t));

        let t = Instant::now();
        let mins = compute_minimal(spec, table, &part)?;
        let mut reads = BTreeSet::new();
        let values = (0..e)
            .map(|n| {
                jacobi_minimal_with(n, &part, |rep| {
                    reads.insert(rep);
                    mins.by_rep[&rep]
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        minimal_times.push(ms_since(t));
        minimal = Some((values, reads.len()));
    }
    let naive = naive.expect("at least one repetition");
    let (minimal_values, minimal_count) = minimal.expect("at least one repetition");

    if let Some(n) = (0..e).find(|&n| naive.values[n as usize] != minimal_values[n as usize]) {
        return Err(BenchError::AgreementFailure { n });
    }

    let parallel_ms = if parallel {
        let mut times = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let t = Instant::now();
            let mins = compute_minimal(spec, table, &part)?;
            let values = (0..e)
                .into_par_iter()
                .map(|n| jacobi_minimal_with(n, &part, |rep| mins.by_rep[&rep]))
                .collect::<Result<Vec<_>, _>>()?;
            times.push(ms_since(t));
            if let Some(n) = (0..e).find(|&n| values[n as usize] != minimal_values[n as usize]) {
                return Err(BenchError::AgreementFailure { n });
            }
        }
        Some(median(times))
    } else {
        None
    };

    Ok(BenchReport {
        order_spec: *spec,
        naive_count: naive.cells_read,
        minimal_count,
        reduction: naive.cells_read - minimal_count,
        naive_ms: median(naive_times),
        minimal_ms: median(minimal_times),
        partition_ms,
        parallel_ms,
        repetitions,
        agreement: true,
    })
}

fn fmt_ms(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

pub fn render_markdown(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    out.push_str("| l | e | q | k | parity | required | actual | reduced | naive ms | minimal ms | partition ms | parallel ms | agree |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|---|---|---|---|\n");
    for r in reports {
        let s = &r.order_spec;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {:.3} | {:.3} | {:.3} | {} | {} |",
            s.l,
            s.e,
            s.q,
            s.k,
            s.parity_case,
            r.naive_count,
            r.minimal_count,
            r.reduction,
            r.naive_ms,
            r.minimal_ms,
            r.partition_ms,
            fmt_ms(r.parallel_ms),
            r.agreement
        );
    }
    out
}

pub fn render_csv(reports: &[BenchReport]) -> String {
    let mut out = String::from("l,e,q,k,parity_case,required,actual,reduced,naive_ms,minimal_ms,partition_ms,parallel_ms,agreement\n");
    for r in reports {
        let s = &r.order_spec;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{},{}",
            s.l,
            s.e,
            s.q,
            s.k,
            s.parity_case,
            r.naive_count,
            r.minimal_count,
            r.reduction,
            r.naive_ms,
            r.minimal_ms,
            r.partition_ms,
            fmt_ms(r.parallel_ms),
            r.agreement
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_index_table, find_generator, make_field};
    use crate::order::{make_order_spec, Variant};

    fn bench(l: u32, variant: Variant, p: u64, r: u32) -> BenchReport {
        let f = make_field(p, r).unwrap();
        let t = build_index_table(&f, &find_generator(&f)).unwrap();
        let spec = make_order_spec(l, variant, &f).unwrap();
        run_bench(&spec, &t, 1, false).unwrap()
    }

    #[test]
    fn table_counts_small_orders() {
        let r = bench(3, Variant::L2, 19, 1);
        assert_eq!((r.naive_count, r.minimal_count, r.reduction), (81, 19, 62));
        assert!(r.agreement);
        let r = bench(5, Variant::TwoL2, 101, 1);
        assert_eq!((r.naive_count, r.minimal_count, r.reduction), (2500, 442, 2058));
        let r = bench(7, Variant::L2, 197, 1);
        assert_eq!((r.naive_count, r.minimal_count, r.reduction), (2401, 425, 1976));
    }

    #[test]
    fn parallel_path_and_rendering() {
        let f = make_field(19, 1).unwrap();
        let t = build_index_table(&f, &find_generator(&f)).unwrap();
        let spec = make_order_spec(3, Variant::TwoL2, &f).unwrap();
        let r = run_bench(&spec, &t, 3, true).unwrap();
        assert!(r.parallel_ms.is_some());
        assert_eq!(r.reduction, 260);
        let md = render_markdown(std::slice::from_ref(&r));
        assert!(md.lines().nth(2).unwrap().starts_with("| 3 | 18 | 19 | 1 | odd | 324 | 64 | 260 |"));
        let csv = render_csv(&[r]);
        assert!(csv.lines().nth(1).unwrap().starts_with("3,18,19,1,odd,324,64,260,"));
        assert_eq!(run_bench(&spec, &t, 0, false), Err(BenchError::ZeroRepetitions));
    }
}
