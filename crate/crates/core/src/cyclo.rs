//! Cyclotomic numbers `(a, b)_e` by enumeration over the field.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldMeta, IndexTable};
use crate::order::OrderSpec;
use crate::partition::{partition, ClassPartition, Pair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("order spec is for q = {spec_q} but the index table is for q = {table_q}")]
    SpecTableMismatch { spec_q: u32, table_q: u32 },
    #[error("partition was built for a different order or parity case")]
    PartitionMismatch,
    #[error("class of {rep:?} is not constant: representative count {at_rep}, class total {class_total}")]
    NotClassConstant { rep: Pair, at_rep: u64, class_total: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycNumMatrix {
    pub order_spec: OrderSpec,
    /// Row-major `e × e`.
    values: Vec<u64>,
    /// Field and generator the counts were taken with.
    pub meta: FieldMeta,
    /// Row with `n_a = 1` (the residue of `ind(-1)`).
    pub deficient_row: u32,
}

impl CycNumMatrix {
    pub fn e(&self) -> u32 {
        self.order_spec.e
    }

    pub fn get(&self, a: u32, b: u32) -> u64 {
        self.values[(a * self.e() + b) as usize]
    }

    pub fn set(&mut self, a: u32, b: u32, v: u64) {
        let e = self.e();
        self.values[(a * e + b) as usize] = v;
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn row_sum(&self, a: u32) -> u64 {
        let e = self.e() as usize;
        self.values[a as usize * e..(a as usize + 1) * e].iter().sum()
    }

    /// Nonzero cells as `(a, b, count)`, row-major.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        let e = self.e();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(i, &v)| (i as u32 / e, i as u32 % e, v))
    }
}

fn check_table(spec: &OrderSpec, table: &IndexTable) -> Result<(), CycloError> {
    if spec.q != table.q() {
        return Err(CycloError::SpecTableMismatch {
            spec_q: spec.q,
            table_q: table.q(),
        });
    }
    Ok(())
}

fn empty_matrix(spec: &OrderSpec, table: &IndexTable) -> CycNumMatrix {
    CycNumMatrix {
        order_spec: *spec,
        values: vec![0; (spec.e * spec.e) as usize],
        meta: table.meta(),
        deficient_row: spec.deficient_row(),
    }
}

/// One increment at `(ind v mod e, ind(v+1) mod e)` for every `v ∉ {0, -1}`.
pub fn compute_all(spec: &OrderSpec, table: &IndexTable) -> Result<CycNumMatrix, CycloError> {
    check_table(spec, table)?;
    let mut m = empty_matrix(spec, table);
    let e = spec.e;
    for (x, y) in table.admissible_pairs() {
        m.values[((x % e) * e + y % e) as usize] += 1;
    }
    Ok(m)
}

/// Same as [`compute_all`], splitting the field into chunks counted on the rayon pool.
pub fn compute_all_par(spec: &OrderSpec, table: &IndexTable) -> Result<CycNumMatrix, CycloError> {
    check_table(spec, table)?;
    let e = spec.e;
    let cells = (e * e) as usize;
    let field = &table.field;
    let minus_one = field.minus_one_code();
    let values = (1..field.q)
        .into_par_iter()
        .with_min_len(4096)
        .fold(
            || vec![0u64; cells],
            |mut acc, v| {
                if v != minus_one {
                    let x = table.ind(v).expect("nonzero") % e;
                    let y = table.ind(field.succ_code(v)).expect("nonzero") % e;
                    acc[(x * e + y) as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut m = empty_matrix(spec, table);
    m.values = values;
    Ok(m)
}

/// One value per class, keyed by the class representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalCycNums {
    pub order_spec: OrderSpec,
    pub by_rep: BTreeMap<Pair, u64>,
    pub meta: FieldMeta,
}

impl MinimalCycNums {
    pub fn get(&self, rep: Pair) -> Option<u64> {
        self.by_rep.get(&rep).copied()
    }

    pub fn len(&self) -> usize {
        self.by_rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_rep.is_empty()
    }

    /// Rebuild the full matrix through `rep_of`.
    pub fn expand(&self, part: &ClassPartition) -> Vec<u64> {
        let e = part.e();
        let mut out = vec![0; (e * e) as usize];
        for class in &part.classes {
            let v = self.by_rep[&class.rep];
            for &(a, b) in &class.members {
                out[(a * e + b) as usize] = v;
            }
        }
        out
    }

    /// `Σ_C |C|·value(C)`, which must equal `q - 2`.
    pub fn weighted_total(&self, part: &ClassPartition) -> u64 {
        part.classes
            .iter()
            .map(|c| c.size() as u64 * self.by_rep[&c.rep])
            .sum()
    }
}

/// Counts only the representative cells, and cross-checks against the class totals
/// accumulated through `rep_of` (the two agree exactly when counts are class-constant).
pub fn compute_minimal(
    spec: &OrderSpec,
    table: &IndexTable,
    part: &ClassPartition,
) -> Result<MinimalCycNums, CycloError> {
    check_table(spec, table)?;
    if !part.matches(spec) {
        return Err(CycloError::PartitionMismatch);
    }
    let e = spec.e;
    let mut at_rep = vec![0u64; part.len()];
    let mut class_total = vec![0u64; part.len()];
    for (x, y) in table.admissible_pairs() {
        let (a, b) = (x % e, y % e);
        let idx = part.class_index(a, b);
        class_total[idx] += 1;
        if part.classes[idx].rep == (a, b) {
            at_rep[idx] += 1;
        }
    }
    let mut by_rep = BTreeMap::new();
    for (idx, class) in part.classes.iter().enumerate() {
        if at_rep[idx] * class.size() as u64 != class_total[idx] {
            return Err(CycloError::NotClassConstant {
                rep: class.rep,
                at_rep: at_rep[idx],
                class_total: class_total[idx],
            });
        }
        by_rep.insert(class.rep, at_rep[idx]);
    }
    Ok(MinimalCycNums {
        order_spec: *spec,
        by_rep,
        meta: table.meta(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub total_ok: bool,
    pub row_sums_ok: bool,
    pub class_constancy_ok: bool,
    pub first_failure: Option<String>,
}

impl IdentityReport {
    pub fn all_ok(&self) -> bool {
        self.total_ok && self.row_sums_ok && self.class_constancy_ok
    }
}

/// Checks `Σ (a,b) = q - 2`, the row sums `k - n_a`, and constancy on partition classes.
pub fn verify_identities(m: &CycNumMatrix) -> IdentityReport {
    let spec = &m.order_spec;
    let mut failures = Vec::new();

    let total = m.total();
    let total_ok = total == spec.q as u64 - 2;
    if !total_ok {
        failures.push(format!("total {} != q - 2 = {}", total, spec.q - 2));
    }

    let mut row_sums_ok = true;
    for a in 0..spec.e {
        let expected = (spec.k - spec.n_a(a)) as u64;
        let got = m.row_sum(a);
        if got != expected {
            if row_sums_ok {
                failures.push(format!("row {a} sums to {got}, expected k - n_a = {expected}"));
            }
            row_sums_ok = false;
        }
    }

    let part = partition(spec);
    let mut class_constancy_ok = true;
    for class in &part.classes {
        let (ra, rb) = class.rep;
        let v = m.get(ra, rb);
        if let Some(&(a, b)) = class.members.iter().find(|&&(a, b)| m.get(a, b) != v) {
            failures.push(format!("({a},{b}) = {} differs from ({ra},{rb}) = {v}", m.get(a, b)));
            class_constancy_ok = false;
            break;
        }
    }

    IdentityReport {
        total_ok,
        row_sums_ok,
        class_constancy_ok,
        first_failure: failures.into_iter().next(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_index_table, find_generator, make_field};
    use crate::order::{make_order_spec, Variant};

    fn setup(l: u32, variant: Variant, p: u64, r: u32) -> (OrderSpec, IndexTable) {
        let f = make_field(p, r).unwrap();
        let t = build_index_table(&f, &find_generator(&f)).unwrap();
        (make_order_spec(l, variant, &f).unwrap(), t)
    }

    #[test]
    fn enumeration_examples_q19() {
        let (spec, t) = setup(3, Variant::L2, 19, 1);
        let m = compute_all(&spec, &t).unwrap();
        assert_eq!(m.get(0, 0), 0);
        assert_eq!(m.row_sum(0), 1);
        assert_eq!(m.total(), 17);
        // hand enumeration: v = 1 is the only admissible v with ind(v) ≡ 0 (mod 9);
        // ind(2) = 1, so row 0 holds a single hit at (0, 1).
        assert_eq!(m.get(0, 1), 1);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let (spec, _) = setup(3, Variant::L2, 19, 1);
        let (_, t37) = setup(3, Variant::L2, 37, 1);
        assert_eq!(
            compute_all(&spec, &t37),
            Err(CycloError::SpecTableMismatch { spec_q: 19, table_q: 37 })
        );
        let (spec18, t19) = setup(3, Variant::TwoL2, 19, 1);
        let wrong = partition(&spec18.with_parity(crate::order::ParityCase::EvenOrChar2));
        assert_eq!(compute_minimal(&spec18, &t19, &wrong), Err(CycloError::PartitionMismatch));
    }

    #[test]
    fn minimal_examples() {
        let (spec, t) = setup(3, Variant::L2, 19, 1);
        let part = partition(&spec);
        let mins = compute_minimal(&spec, &t, &part).unwrap();
        assert_eq!(mins.len(), 19);
        assert_eq!(mins.get((0, 0)), Some(0));
        let (spec, t) = setup(3, Variant::TwoL2, 19, 1);
        let mins = compute_minimal(&spec, &t, &partition(&spec)).unwrap();
        assert_eq!(mins.len(), 64);
    }

    #[test]
    fn identities_hold_and_detect_perturbation() {
        for (l, v, p, r) in [(3, Variant::L2, 19, 1), (3, Variant::TwoL2, 19, 1), (3, Variant::L2, 2, 6)] {
            let (spec, t) = setup(l, v, p, r);
            let m = compute_all(&spec, &t).unwrap();
            let report = verify_identities(&m);
            assert!(report.all_ok(), "{report:?}");
            let mut bad = m.clone();
            bad.set(2, 5, bad.get(2, 5) + 1);
            let report = verify_identities(&bad);
            assert!(!report.total_ok);
            assert!(!report.row_sums_ok);
            assert!(report.first_failure.is_some());
        }
    }

    #[test]
    fn char2_row_zero_loses_one() {
        // In characteristic 2, -1 = 1 has index 0, so row 0 is the short row even for odd k.
        let (spec, t) = setup(3, Variant::L2, 2, 6);
        let m = compute_all(&spec, &t).unwrap();
        assert_eq!(spec.k, 7);
        assert_eq!(m.row_sum(0), 6);
        assert!((1..9).all(|a| m.row_sum(a) == 7));
    }

    #[test]
    fn parallel_matches_sequential() {
        for (l, v, p) in [(3, Variant::TwoL2, 19), (5, Variant::L2, 101), (3, Variant::L2, 7993)] {
            let (spec, t) = setup(l, v, p, 1);
            assert_eq!(compute_all(&spec, &t).unwrap(), compute_all_par(&spec, &t).unwrap());
        }
    }

    #[test]
    fn minimal_expands_to_full() {
        for (l, v, p) in [(3, Variant::L2, 37), (3, Variant::TwoL2, 109), (5, Variant::TwoL2, 151)] {
            let (spec, t) = setup(l, v, p, 1);
            let part = partition(&spec);
            let m = compute_all(&spec, &t).unwrap();
            let mins = compute_minimal(&spec, &t, &part).unwrap();
            assert_eq!(mins.expand(&part), m.values());
            assert_eq!(mins.weighted_total(&part), spec.q as u64 - 2);
        }
    }
}
