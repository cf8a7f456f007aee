//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cyclosum::bench::run_bench;
use cyclosum::jacobi::{
    expression_transversal_check, jacobi_from_full_matrix, jacobi_minimal, jacobi_oracle, jacobi_oracle_grid,
    jacobi_theorem_expression, norm_check, recover_all,
};
use cyclosum::partition::expected_class_count;
use cyclosum::{
    build_index_table, compute_all, compute_minimal, find_generator, make_field, make_order_spec, partition,
    verify_identities, IndexTable, OrderSpec, ParityCase, Variant,
};

const SMALL_PRIMES: [u32; 5] = [3, 5, 7, 11, 13];

fn setup(e: u32, q: u64) -> Result<(OrderSpec, IndexTable), String> {
    let (l, variant) = match (3..=13).find(|l| l * l == e) {
        Some(l) => (l, Variant::L2),
        None => ((3..=13).find(|l| 2 * l * l == e).ok_or(format!("bad e = {e}"))?, Variant::TwoL2),
    };
    let (p, r) = cyclosum::arith::prime_power(q).ok_or(format!("q = {q} is not a prime power"))?;
    let f = make_field(p, r).map_err(|x| x.to_string())?;
    let spec = make_order_spec(l, variant, &f).map_err(|x| x.to_string())?;
    let table = build_index_table(&f, &find_generator(&f)).map_err(|x| x.to_string())?;
    Ok((spec, table))
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn class_counts() -> Outcome {
    let start = Instant::now();
    let mut seen = 0;
    for l in SMALL_PRIMES {
        let specs = [
            OrderSpec::abstract_spec(l, Variant::L2, ParityCase::EvenOrChar2),
            OrderSpec::abstract_spec(l, Variant::TwoL2, ParityCase::EvenOrChar2),
            OrderSpec::abstract_spec(l, Variant::TwoL2, ParityCase::Odd),
        ];
        for spec in specs {
            let spec = spec.map_err(|x| x.to_string())?;
            let part = partition(&spec);
            let want = expected_class_count(&spec);
            if part.len() != want {
                return Err(format!("e = {} {}: {} classes, expected {want}", spec.e, spec.parity_case, part.len()));
            }
            seen += 1;
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(5) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{seen} partitions in {took:.2?}"))
}

const IDENTITY_CONFIGS: [(u32, u64); 13] = [
    (9, 19),
    (9, 37),
    (9, 64),
    (9, 73),
    (25, 101),
    (25, 151),
    (49, 197),
    (18, 19),
    (18, 37),
    (18, 109),
    (50, 101),
    (50, 151),
    (98, 197),
];

fn identities(configs: &[(u32, u64)]) -> Outcome {
    for &(e, q) in configs {
        let (spec, table) = setup(e, q)?;
        let m = compute_all(&spec, &table).map_err(|x| x.to_string())?;
        let report = verify_identities(&m);
        if !report.all_ok() {
            return Err(format!("(e, q) = ({e}, {q}): {:?}", report.first_failure));
        }
        let part = partition(&spec);
        let mins = compute_minimal(&spec, &table, &part).map_err(|x| format!("(e, q) = ({e}, {q}): {x}"))?;
        if mins.expand(&part) != m.values() {
            return Err(format!("(e, q) = ({e}, {q}): minimal set does not expand to the matrix"));
        }
    }
    Ok(format!("{} configurations", configs.len()))
}

fn agreement(configs: &[(u32, u64)]) -> Outcome {
    let mut slowest = Duration::ZERO;
    for &(e, q) in configs {
        let start = Instant::now();
        let (spec, table) = setup(e, q)?;
        let m = compute_all(&spec, &table).map_err(|x| x.to_string())?;
        let part = partition(&spec);
        let mins = compute_minimal(&spec, &table, &part).map_err(|x| x.to_string())?;
        for n in 0..e {
            let oracle = jacobi_oracle(1, n, &spec, &table).map_err(|x| x.to_string())?.value;
            let full = jacobi_from_full_matrix(1, n, &m).map_err(|x| x.to_string())?.value;
            let minimal = jacobi_minimal(n, &spec, &mins, &part).map_err(|x| x.to_string())?.value;
            let expr = jacobi_theorem_expression(n, &spec, &mins, &part).map_err(|x| x.to_string())?.value;
            if oracle != full || oracle != minimal || oracle != expr {
                return Err(format!("(e, q) = ({e}, {q}): J(1,{n}) disagrees"));
            }
        }
        let took = start.elapsed();
        if took > Duration::from_secs(10) {
            return Err(format!("(e, q) = ({e}, {q}) took {took:?}"));
        }
        slowest = slowest.max(took);
    }
    Ok(format!("{} configurations, slowest {slowest:.2?}", configs.len()))
}

fn round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for (e, q) in [(9, 19), (18, 19)] {
        let (spec, table) = setup(e, q)?;
        let grid = jacobi_oracle_grid(&spec, &table, false).map_err(|x| x.to_string())?;
        let (values, residual) = recover_all(&grid).map_err(|x| x.to_string())?;
        let m = compute_all(&spec, &table).map_err(|x| x.to_string())?;
        if values != m.values() || residual >= 1e-6 {
            return Err(format!("(e, q) = ({e}, {q}): residual {residual:.3e}"));
        }
        worst = worst.max(residual);
    }
    Ok(format!("max residual {worst:.3e}"))
}

fn norms() -> Outcome {
    let mut checked = 0;
    for (e, q) in [(9, 19), (25, 101), (18, 37)] {
        let (spec, table) = setup(e, q)?;
        for i in 1..e {
            for j in 1..e {
                if (i + j) % e == 0 {
                    continue;
                }
                let res = jacobi_oracle(i, j, &spec, &table).map_err(|x| x.to_string())?;
                let r = norm_check(&res).map_err(|x| x.to_string())?;
                if !r.ok {
                    return Err(format!("(e, q) = ({e}, {q}): |J({i},{j})|² = {}", r.norm_sq));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} sums"))
}

fn transversals() -> Outcome {
    let cases = [
        (3, Variant::L2, ParityCase::EvenOrChar2),
        (3, Variant::TwoL2, ParityCase::EvenOrChar2),
        (3, Variant::TwoL2, ParityCase::Odd),
        (5, Variant::L2, ParityCase::EvenOrChar2),
        (5, Variant::TwoL2, ParityCase::EvenOrChar2),
        (5, Variant::TwoL2, ParityCase::Odd),
    ];
    for (l, variant, parity) in cases {
        let spec = OrderSpec::abstract_spec(l, variant, parity).map_err(|x| x.to_string())?;
        let r = expression_transversal_check(&spec, &partition(&spec)).map_err(|x| x.to_string())?;
        if !r.ok() {
            return Err(format!("e = {} {parity}: {r:?}", spec.e));
        }
    }
    Ok(format!("{} index sets", cases.len()))
}

fn bench_reductions() -> Outcome {
    let expected = [
        (Variant::L2, [(19, 62), (101, 508), (197, 1976), (243, 12140), (677, 23716)]),
        (Variant::TwoL2, [(19, 260), (101, 2058), (197, 7954), (243, 48682), (677, 95034)]),
    ];
    let mut got = Vec::new();
    for (variant, row) in expected {
        for (l, (q, want)) in SMALL_PRIMES.into_iter().zip(row) {
            let (spec, table) = setup(variant.order(l), q)?;
            let r = run_bench(&spec, &table, 1, false).map_err(|x| x.to_string())?;
            if r.reduction != want || !r.agreement {
                return Err(format!("e = {}, q = {q}: reduction {}, expected {want}", spec.e, r.reduction));
            }
            got.push(r.reduction.to_string());
        }
    }
    Ok(got.join(" "))
}

fn characteristic_two() -> Outcome {
    identities(&[(9, 64)])?;
    agreement(&[(9, 64)])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("class counts match closed form", class_counts),
        ("cyclotomic identities", || identities(&IDENTITY_CONFIGS)),
        ("oracle, full, minimal and expression agree", || agreement(&IDENTITY_CONFIGS)),
        ("inverse relation round trip", round_trip),
        ("|J|² = q for nontrivial characters", norms),
        ("expression index sets are transversals", transversals),
        ("benchmark evaluation reductions", bench_reductions),
        ("characteristic 2 (e = 9, q = 64)", characteristic_two),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
