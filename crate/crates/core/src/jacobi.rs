//! Jacobi sums `J_e(i, j) = Σ_v χ^i(v) χ^j(v+1)` with `χ(γ) = ζ_e`, `χ(0) = 0`.
//!
//! Four evaluation routes are provided:
//!
//! - [`jacobi_oracle`]: the character sum itself, one monomial per `v`
//! - [`jacobi_from_full_matrix`]: `Σ_{a,b} (a,b)·ζ^{ai+bj}` over the whole cyclotomic matrix
//! - [`jacobi_minimal`]: `J(1, n)` from one cyclotomic number per class, each class
//!   contributing its value times the sum of `ζ^{a+bn}` over its orbit
//! - [`jacobi_theorem_expression`]: `J(1, n)` from the explicit per-class term lists
//!   summed over the index ranges of the closed-form expressions
//!
//! The last two only produce `J(1, n)`; general `(i, j)` goes through the first two.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{gcd, modulo};
use crate::cycint::{CycInt, CycIntError, CycOrder};
use crate::cyclo::{CycNumMatrix, MinimalCycNums};
use crate::field::{FieldMeta, IndexTable};
use crate::order::{OrderSpec, ParityCase, Variant};
use crate::partition::{partition, ClassPartition, Pair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobiError {
    #[error("order spec is for q = {spec_q} but the index table is for q = {table_q}")]
    SpecTableMismatch { spec_q: u32, table_q: u32 },
    #[error("index {index} out of range for e = {e}")]
    OutOfRange { index: u32, e: u32 },
    #[error("partition or minimal set was built for a different order or parity case")]
    PartitionMismatch,
    #[error("J({i},{j}) involves a trivial character")]
    TrivialCharacter { i: u32, j: u32 },
    #[error("recovered value for ({a},{b}) has residual {residual:e}")]
    ResidualTooLarge { a: u32, b: u32, residual: f64 },
    #[error("jacobi grid has {got} entries, expected {expected}")]
    GridShape { expected: usize, got: usize },
    #[error(transparent)]
    CycInt(#[from] CycIntError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    FullMatrix,
    Minimal,
    TheoremExpression,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobiResult {
    pub order_spec: OrderSpec,
    pub i: u32,
    pub j: u32,
    pub value: CycInt,
    pub method: Method,
    pub meta: FieldMeta,
}

fn check_index(index: u32, e: u32) -> Result<(), JacobiError> {
    if index >= e {
        return Err(JacobiError::OutOfRange { index, e });
    }
    Ok(())
}

fn check_table(spec: &OrderSpec, table: &IndexTable) -> Result<(), JacobiError> {
    if spec.q != table.q() {
        return Err(JacobiError::SpecTableMismatch {
            spec_q: spec.q,
            table_q: table.q(),
        });
    }
    Ok(())
}

/// Direct character sum: `Σ_{v ∉ {0,-1}} ζ^{i·ind(v) + j·ind(v+1)}`, one monomial at a time.
pub fn jacobi_oracle(i: u32, j: u32, spec: &OrderSpec, table: &IndexTable) -> Result<JacobiResult, JacobiError> {
    check_table(spec, table)?;
    check_index(i, spec.e)?;
    check_index(j, spec.e)?;
    let order = CycOrder::new(spec.e)?;
    let mut acc = CycInt::zero(order);
    for (x, y) in table.admissible_pairs() {
        let d = i as i64 * x as i64 + j as i64 * y as i64;
        acc = acc.add(&CycInt::monomial(1, d, spec.e)?)?;
    }
    Ok(JacobiResult {
        order_spec: *spec,
        i,
        j,
        value: acc,
        method: Method::Oracle,
        meta: table.meta(),
    })
}

/// All `e²` oracle values, row-major in `(i, j)`. Exponents are tallied per `(i, j)` and
/// reduced once, which is the same sum as [`jacobi_oracle`] by linearity.
pub fn jacobi_oracle_grid(spec: &OrderSpec, table: &IndexTable, parallel: bool) -> Result<JacobiGrid, JacobiError> {
    check_table(spec, table)?;
    let e = spec.e;
    let order = CycOrder::new(e)?;
    let inds: Vec<(u32, u32)> = table
        .admissible_pairs()
        .map(|(x, y)| (x % e, y % e))
        .collect();
    let one = |idx: u32| -> Result<CycInt, CycIntError> {
        let (i, j) = (idx / e, idx % e);
        let mut counts = vec![0i64; e as usize];
        for &(x, y) in &inds {
            counts[((i * x + j * y) % e) as usize] += 1;
        }
        CycInt::from_power_counts(order, counts)
    };
    let values = if parallel {
        (0..e * e).into_par_iter().map(one).collect::<Result<Vec<_>, _>>()?
    } else {
        (0..e * e).map(one).collect::<Result<Vec<_>, _>>()?
    };
    Ok(JacobiGrid {
        order_spec: *spec,
        values,
    })
}

fn full_matrix_value(i: u32, j: u32, m: &CycNumMatrix, order: CycOrder) -> Result<CycInt, CycIntError> {
    let e = m.e();
    let mut counts = vec![0i64; e as usize];
    // zero cells contribute nothing to Σ (a,b)·ζ^{ai+bj}
    for (a, b, v) in m.nonzero() {
        counts[((a * i + b * j) % e) as usize] += v as i64;
    }
    CycInt::from_power_counts(order, counts)
}

/// `Σ_{a,b} (a,b)_e·ζ^{ai+bj}`.
pub fn jacobi_from_full_matrix(i: u32, j: u32, m: &CycNumMatrix) -> Result<JacobiResult, JacobiError> {
    let e = m.e();
    check_index(i, e)?;
    check_index(j, e)?;
    let order = CycOrder::new(e)?;
    Ok(JacobiResult {
        order_spec: m.order_spec,
        i,
        j,
        value: full_matrix_value(i, j, m, order)?,
        method: Method::FullMatrix,
        meta: m.meta.clone(),
    })
}

pub fn jacobi_full_grid(m: &CycNumMatrix, parallel: bool) -> Result<JacobiGrid, JacobiError> {
    let e = m.e();
    let order = CycOrder::new(e)?;
    let one = |idx: u32| full_matrix_value(idx / e, idx % e, m, order);
    let values = if parallel {
        (0..e * e).into_par_iter().map(one).collect::<Result<Vec<_>, _>>()?
    } else {
        (0..e * e).map(one).collect::<Result<Vec<_>, _>>()?
    };
    Ok(JacobiGrid {
        order_spec: m.order_spec,
        values,
    })
}

/// Dense `Σ_{a,b} (a,b)·ζ^{a+bn}` reading every cell through `lookup`.
pub fn jacobi_1n_dense_with(
    n: u32,
    e: u32,
    mut lookup: impl FnMut(u32, u32) -> u64,
) -> Result<CycInt, JacobiError> {
    check_index(n, e)?;
    let order = CycOrder::new(e)?;
    let mut counts = vec![0i64; e as usize];
    for a in 0..e {
        for b in 0..e {
            counts[((a + b * n) % e) as usize] += lookup(a, b) as i64;
        }
    }
    Ok(CycInt::from_power_counts(order, counts)?)
}

/// Class-orbit evaluation of `J(1, n)`, reading one value per class through `lookup`.
pub fn jacobi_minimal_with(
    n: u32,
    part: &ClassPartition,
    mut lookup: impl FnMut(Pair) -> u64,
) -> Result<CycInt, JacobiError> {
    let e = part.e();
    check_index(n, e)?;
    let order = CycOrder::new(e)?;
    let mut counts = vec![0i64; e as usize];
    for class in &part.classes {
        let v = lookup(class.rep) as i64;
        if v == 0 {
            continue;
        }
        for &(a, b) in &class.members {
            counts[((a + b * n) % e) as usize] += v;
        }
    }
    Ok(CycInt::from_power_counts(order, counts)?)
}

fn check_minimal_inputs(spec: &OrderSpec, mins: &MinimalCycNums, part: &ClassPartition) -> Result<(), JacobiError> {
    if !part.matches(spec) || !part.matches(&mins.order_spec) || mins.len() != part.len() {
        return Err(JacobiError::PartitionMismatch);
    }
    Ok(())
}

/// `J(1, n)` from the minimal set of cyclotomic numbers.
pub fn jacobi_minimal(
    n: u32,
    spec: &OrderSpec,
    mins: &MinimalCycNums,
    part: &ClassPartition,
) -> Result<JacobiResult, JacobiError> {
    check_minimal_inputs(spec, mins, part)?;
    let value = jacobi_minimal_with(n, part, |rep| mins.by_rep[&rep])?;
    Ok(JacobiResult {
        order_spec: *spec,
        i: 1,
        j: n,
        value,
        method: Method::Minimal,
        meta: mins.meta.clone(),
    })
}

/// Which block of a closed-form expression an index pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Singleton,
    Pair,
    Triple,
    Sextet,
}

impl TermKind {
    pub fn class_size(self) -> usize {
        match self {
            TermKind::Singleton => 1,
            TermKind::Pair => 2,
            TermKind::Triple => 3,
            TermKind::Sextet => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpressionTerm {
    pub a: u32,
    pub b: u32,
    pub kind: TermKind,
}

/// The index pairs named by the summation ranges of the closed-form expression for
/// `J_e(1, n)` in the given parity case, in the order they are written.
pub fn theorem_index_set(spec: &OrderSpec) -> Vec<ExpressionTerm> {
    let e = spec.e;
    let l = spec.l;
    let mut out = Vec::new();
    let mut push = |a: u32, b: u32, kind: TermKind| out.push(ExpressionTerm { a, b, kind });
    match spec.parity_case {
        ParityCase::EvenOrChar2 => {
            push(0, 0, TermKind::Singleton);
            if l == 3 {
                push(e / 3, 2 * e / 3, TermKind::Pair);
            }
            for b in 1..e {
                push(0, b, TermKind::Triple);
            }
            for a in 1..=(e - 1) / 3 {
                for b in 2 * a..=e - 1 - a {
                    push(a, b, TermKind::Sextet);
                }
            }
        }
        ParityCase::Odd => {
            let s = e / 2;
            push(0, s, TermKind::Singleton);
            if l == 3 {
                push(6, 3, TermKind::Pair);
            }
            for b in (0..e).filter(|&b| b != s) {
                push(0, b, TermKind::Triple);
            }
            for a in 1..=(s - 1) / 2 {
                for b in (0..=s - a).chain(s + 2 * a + 1..e) {
                    push(a, b, TermKind::Sextet);
                }
            }
            for j in 1..=(s - 1) / 6 {
                let a = (s - 1) / 2 + j;
                for b in 2 * j - 1..=(s - 3) / 2 - (j - 1) {
                    push(a, b, TermKind::Sextet);
                }
            }
        }
    }
    out
}

/// Exponents of the printed term list for one index pair, as functions of `n`.
fn term_exponents(t: &ExpressionTerm, n: i64, spec: &OrderSpec) -> Vec<i64> {
    let (a, b) = (t.a as i64, t.b as i64);
    let n1 = n + 1;
    match spec.parity_case {
        ParityCase::EvenOrChar2 => match t.kind {
            TermKind::Singleton => vec![0],
            TermKind::Pair => vec![a + b * n, b + a * n],
            TermKind::Triple => vec![b * n, b, -b * n1],
            TermKind::Sextet => vec![
                a * n + b,
                a + b * n,
                a - b * n1,
                a * n - b * n1,
                b * n - a * n1,
                b - a * n1,
            ],
        },
        ParityCase::Odd => {
            let s = (spec.e / 2) as i64;
            match t.kind {
                TermKind::Singleton => vec![s * n],
                TermKind::Pair => vec![a + b * n, (b + s) + (a + s) * n],
                TermKind::Triple => vec![b * n, s * n1 + b, s - b * n1],
                TermKind::Sextet => vec![
                    a + b * n,
                    a * n + b + s * n1,
                    s + a - b * n1,
                    s * n1 + b - a * n1,
                    // image of (-a, b-a); the l >= 5 form is sometimes written b - a(n+1)
                    b * n - a * n1,
                    s + a * n - b * n1,
                ],
            }
        }
    }
}

/// `J(1, n)` by summing each printed block's term list over the expression's index set.
/// Values are looked up through `rep_of`, since the printed index pairs need not be
/// the lexicographic class minima.
pub fn jacobi_theorem_expression(
    n: u32,
    spec: &OrderSpec,
    mins: &MinimalCycNums,
    part: &ClassPartition,
) -> Result<JacobiResult, JacobiError> {
    check_minimal_inputs(spec, mins, part)?;
    let e = spec.e;
    check_index(n, e)?;
    let order = CycOrder::new(e)?;
    let mut counts = vec![0i64; e as usize];
    for term in theorem_index_set(spec) {
        let v = mins.by_rep[&part.rep_of(term.a, term.b)] as i64;
        for d in term_exponents(&term, n as i64, spec) {
            counts[modulo(d, e) as usize] += v;
        }
    }
    Ok(JacobiResult {
        order_spec: *spec,
        i: 1,
        j: n,
        value: CycInt::from_power_counts(order, counts)?,
        method: Method::TheoremExpression,
        meta: mins.meta.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalReport {
    pub e: u32,
    pub parity_case: ParityCase,
    pub classes: usize,
    pub index_pairs: usize,
    /// Classes hit by no index pair.
    pub missing: usize,
    /// Index pairs landing in an already-hit class.
    pub duplicates: usize,
    /// Every block's declared class size equals the size of the class it lands in.
    pub sizes_match: bool,
    pub is_transversal: bool,
    /// For `2l²`: cardinality of the index set of the other parity case.
    pub other_parity_pairs: Option<usize>,
    pub other_parity_is_transversal: Option<bool>,
    pub cardinality_equal: Option<bool>,
}

impl TransversalReport {
    pub fn ok(&self) -> bool {
        self.is_transversal
            && self.sizes_match
            && self.other_parity_is_transversal.unwrap_or(true)
            && self.cardinality_equal.unwrap_or(true)
    }
}

fn transversal_stats(spec: &OrderSpec, part: &ClassPartition) -> (usize, usize, usize, bool) {
    let terms = theorem_index_set(spec);
    let mut hit = vec![false; part.len()];
    let mut duplicates = 0;
    let mut sizes_match = true;
    for t in &terms {
        let idx = part.class_index(t.a, t.b);
        if hit[idx] {
            duplicates += 1;
        }
        hit[idx] = true;
        sizes_match &= part.classes[idx].size() == t.kind.class_size();
    }
    let missing = hit.iter().filter(|&&h| !h).count();
    (terms.len(), missing, duplicates, sizes_match)
}

/// Checks that the expression's index set picks exactly one pair from every class, and
/// for `2l²` that both parity cases' index sets have the same cardinality.
pub fn expression_transversal_check(spec: &OrderSpec, part: &ClassPartition) -> Result<TransversalReport, JacobiError> {
    if !part.matches(spec) {
        return Err(JacobiError::PartitionMismatch);
    }
    let (pairs, missing, duplicates, sizes_match) = transversal_stats(spec, part);
    let (other_parity_pairs, other_parity_is_transversal) = match spec.variant {
        Variant::L2 => (None, None),
        Variant::TwoL2 => {
            let other = spec.with_parity(match spec.parity_case {
                ParityCase::EvenOrChar2 => ParityCase::Odd,
                ParityCase::Odd => ParityCase::EvenOrChar2,
            });
            let (n, miss, dup, sizes) = transversal_stats(&other, &partition(&other));
            (Some(n), Some(miss == 0 && dup == 0 && sizes))
        }
    };
    Ok(TransversalReport {
        e: spec.e,
        parity_case: spec.parity_case,
        classes: part.len(),
        index_pairs: pairs,
        missing,
        duplicates,
        sizes_match,
        is_transversal: missing == 0 && duplicates == 0,
        other_parity_pairs,
        other_parity_is_transversal,
        cardinality_equal: other_parity_pairs.map(|n| n == pairs),
    })
}

/// `J(i, j)` for all `0 <= i, j < e`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiGrid {
    pub order_spec: OrderSpec,
    pub values: Vec<CycInt>,
}

impl JacobiGrid {
    pub fn get(&self, i: u32, j: u32) -> &CycInt {
        &self.values[(i * self.order_spec.e + j) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Recovered {
    pub value: u64,
    pub residual: f64,
}

fn embedded_grid(grid: &JacobiGrid) -> Result<(Vec<Complex64>, Vec<Complex64>), JacobiError> {
    let e = grid.order_spec.e;
    let expected = (e * e) as usize;
    if grid.values.len() != expected {
        return Err(JacobiError::GridShape {
            expected,
            got: grid.values.len(),
        });
    }
    let emb = grid
        .values
        .iter()
        .map(|x| x.embed_complex(1))
        .collect::<Result<Vec<_>, _>>()?;
    let roots = (0..e)
        .map(|t| Complex64::from_polar(1.0, -2.0 * PI * t as f64 / e as f64))
        .collect();
    Ok((emb, roots))
}

fn recover_with(a: u32, b: u32, e: u32, emb: &[Complex64], inv_roots: &[Complex64]) -> Result<Recovered, JacobiError> {
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..e {
        for j in 0..e {
            sum += inv_roots[((a * i + b * j) % e) as usize] * emb[(i * e + j) as usize];
        }
    }
    let x = sum / (e as f64 * e as f64);
    let rounded = x.re.round();
    let residual = (x - Complex64::new(rounded, 0.0)).norm();
    if residual > 1e-6 || rounded < 0.0 {
        return Err(JacobiError::ResidualTooLarge { a, b, residual });
    }
    Ok(Recovered {
        value: rounded as u64,
        residual,
    })
}

/// `(a, b)_e = e^{-2} Σ_{i,j} ζ^{-(ai+bj)} J(i, j)`, evaluated numerically at `ζ = e^{2πi/e}`.
pub fn recover_cyclotomic(a: u32, b: u32, all_jacobi: &JacobiGrid) -> Result<Recovered, JacobiError> {
    let e = all_jacobi.order_spec.e;
    check_index(a, e)?;
    check_index(b, e)?;
    let (emb, roots) = embedded_grid(all_jacobi)?;
    recover_with(a, b, e, &emb, &roots)
}

/// Recovers every cell; returns the counts (row-major) and the largest residual.
pub fn recover_all(all_jacobi: &JacobiGrid) -> Result<(Vec<u64>, f64), JacobiError> {
    let e = all_jacobi.order_spec.e;
    let (emb, roots) = embedded_grid(all_jacobi)?;
    let mut values = Vec::with_capacity((e * e) as usize);
    let mut worst = 0.0f64;
    for a in 0..e {
        for b in 0..e {
            let r = recover_with(a, b, e, &emb, &roots)?;
            worst = worst.max(r.residual);
            values.push(r.value);
        }
    }
    Ok((values, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub ok: bool,
    pub norm_sq: f64,
    pub deviation: f64,
}

/// `|J(i,j)|² = q` at the embedding `ζ ↦ e^{2πi·m/e}`, for nontrivial `i`, `j`, `i + j`.
pub fn norm_check_at(res: &JacobiResult, m: i64) -> Result<NormReport, JacobiError> {
    let e = res.order_spec.e;
    if res.i.is_multiple_of(e) || res.j.is_multiple_of(e) || (res.i + res.j).is_multiple_of(e) {
        return Err(JacobiError::TrivialCharacter { i: res.i, j: res.j });
    }
    let q = res.order_spec.q as f64;
    let norm_sq = res.value.embed_complex(m)?.norm_sqr();
    let deviation = (norm_sq - q).abs();
    Ok(NormReport {
        ok: deviation <= 1e-6 * q,
        norm_sq,
        deviation,
    })
}

pub fn norm_check(res: &JacobiResult) -> Result<NormReport, JacobiError> {
    norm_check_at(res, 1)
}

/// Worst-case norm report over every embedding `m` coprime to `e`.
pub fn norm_check_all_embeddings(res: &JacobiResult) -> Result<NormReport, JacobiError> {
    let e = res.order_spec.e as i64;
    let mut worst = norm_check_at(res, 1)?;
    for m in (2..e).filter(|&m| gcd(m as u64, e as u64) == 1) {
        let r = norm_check_at(res, m)?;
        if r.deviation > worst.deviation {
            worst = r;
        }
    }
    Ok(worst)
}
