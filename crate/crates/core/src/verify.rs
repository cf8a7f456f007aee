//! The full identity and cross-method agreement suite for one `(l, variant, q)`.

use serde::Serialize;

use crate::cycint::CycInt;
use crate::cyclo::{compute_all, compute_all_par, compute_minimal, verify_identities};
use crate::field::IndexTable;
use crate::jacobi::{
    expression_transversal_check, jacobi_full_grid, jacobi_minimal, jacobi_oracle_grid, jacobi_theorem_expression,
    norm_check_at, recover_all, JacobiResult, Method,
};
use crate::order::OrderSpec;
use crate::partition::{expected_class_count, partition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub checks: Vec<Check>,
}

fn check(name: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        ok,
        detail: detail.into(),
    }
}

fn first_mismatch<T: PartialEq>(a: &[T], b: &[T]) -> Option<usize> {
    if a.len() != b.len() {
        return Some(a.len().min(b.len()));
    }
    a.iter().zip(b).position(|(x, y)| x != y)
}

pub fn run_verification(spec: &OrderSpec, table: &IndexTable, parallel: bool) -> VerificationReport {
    let mut checks = Vec::new();
    let e = spec.e;
    let q = spec.q as i64;

    let part = partition(spec);
    let expected = expected_class_count(spec);
    checks.push(check(
        "class_count",
        part.len() == expected,
        format!("{} classes, closed form {}", part.len(), expected),
    ));

    let matrix = match if parallel { compute_all_par(spec, table) } else { compute_all(spec, table) } {
        Ok(m) => m,
        Err(err) => {
            checks.push(check("cyclotomic_matrix", false, err.to_string()));
            return VerificationReport { ok: false, checks };
        }
    };
    let ident = verify_identities(&matrix);
    checks.push(check("sum_equals_q_minus_2", ident.total_ok, format!("total {}", matrix.total())));
    checks.push(check(
        "row_sums_k_minus_n_a",
        ident.row_sums_ok,
        ident.first_failure.clone().unwrap_or_default(),
    ));
    checks.push(check(
        "class_constancy",
        ident.class_constancy_ok,
        ident.first_failure.clone().unwrap_or_default(),
    ));

    let mins = match compute_minimal(spec, table, &part) {
        Ok(m) => m,
        Err(err) => {
            checks.push(check("minimal_set", false, err.to_string()));
            return VerificationReport { ok: false, checks };
        }
    };
    checks.push(check(
        "minimal_expands_to_full",
        mins.expand(&part) == matrix.values(),
        format!("{} representatives", mins.len()),
    ));
    let weighted = mins.weighted_total(&part);
    checks.push(check(
        "weighted_class_sum",
        weighted == spec.q as u64 - 2,
        format!("Σ |C|·value = {weighted}"),
    ));

    let grids = jacobi_oracle_grid(spec, table, parallel).and_then(|o| Ok((o, jacobi_full_grid(&matrix, parallel)?)));
    let (oracle, full) = match grids {
        Ok(g) => g,
        Err(err) => {
            checks.push(check("jacobi_grids", false, err.to_string()));
            return VerificationReport { ok: false, checks };
        }
    };
    let mism = first_mismatch(&oracle.values, &full.values);
    checks.push(check(
        "oracle_equals_full_matrix",
        mism.is_none(),
        mism.map_or(format!("{} pairs", e * e), |i| format!("first mismatch at (i,j) = ({},{})", i as u32 / e, i as u32 % e)),
    ));

    let minus_one = spec.deficient_row() as i64;
    let trivial_ok = oracle.get(0, 0).as_constant() == Some(q - 2)
        && (1..e).all(|t| {
            oracle.get(0, t).as_constant() == Some(-1)
                && CycInt::monomial(-1, t as i64 * minus_one, e).is_ok_and(|want| oracle.get(t, 0) == &want)
        });
    checks.push(check("trivial_characters", trivial_ok, "J(0,0) = q-2, J(0,j) = -1, J(i,0) = -χ^i(-1)"));

    let mut minimal_bad = None;
    let mut expr_bad = None;
    for n in 0..e {
        let want = oracle.get(1, n);
        match jacobi_minimal(n, spec, &mins, &part) {
            Ok(r) if &r.value == want => {}
            _ => {
                minimal_bad.get_or_insert(n);
            }
        }
        match jacobi_theorem_expression(n, spec, &mins, &part) {
            Ok(r) if &r.value == want => {}
            _ => {
                expr_bad.get_or_insert(n);
            }
        }
    }
    checks.push(check(
        "oracle_equals_minimal",
        minimal_bad.is_none(),
        minimal_bad.map_or(format!("{e} values of J(1,n)"), |n| format!("first mismatch at n = {n}")),
    ));
    checks.push(check(
        "oracle_equals_theorem_expression",
        expr_bad.is_none(),
        expr_bad.map_or(format!("{e} values of J(1,n)"), |n| format!("first mismatch at n = {n}")),
    ));

    match expression_transversal_check(spec, &part) {
        Ok(r) => checks.push(check(
            "expression_transversal",
            r.ok(),
            format!(
                "{} index pairs, {} classes, {} missing, {} duplicates",
                r.index_pairs, r.classes, r.missing, r.duplicates
            ),
        )),
        Err(err) => checks.push(check("expression_transversal", false, err.to_string())),
    }

    let mut worst = 0.0f64;
    let mut norm_ok = true;
    for i in 1..e {
        for j in 1..e {
            if (i + j) % e == 0 {
                continue;
            }
            let res = JacobiResult {
                order_spec: *spec,
                i,
                j,
                value: oracle.get(i, j).clone(),
                method: Method::Oracle,
                meta: table.meta(),
            };
            match norm_check_at(&res, 1) {
                Ok(r) => {
                    worst = worst.max(r.deviation);
                    norm_ok &= r.ok;
                }
                Err(_) => norm_ok = false,
            }
        }
    }
    checks.push(check("norm_equals_q", norm_ok, format!("max | |J|² - q | = {worst:.3e}")));

    match recover_all(&oracle) {
        Ok((values, residual)) => checks.push(check(
            "inverse_relation_round_trip",
            values == matrix.values(),
            format!("max residual {residual:.3e}"),
        )),
        Err(err) => checks.push(check("inverse_relation_round_trip", false, err.to_string())),
    }

    VerificationReport {
        ok: checks.iter().all(|c| c.ok),
        checks,
    }
}
