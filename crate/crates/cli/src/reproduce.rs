//! The reference-value table behind `starmax reproduce`.

use num_traits::Signed;
use serde_json::{json, Value};

use starmax_core::classc::{j_boundary_check, membership_scan, weighted_power_sum};
use starmax_core::graphs::max_edges;
use starmax_core::scalar::parse_rational;
use starmax_core::{
    alpha_constant, count_stars, crossover, degree_moment, enumerate_threshold, extremal_witness,
    f_bound, is_good, max_over_threshold, q_taylor_coeff, quasi_complete, quasi_star,
    FunctionOracle, Objective, Rational, StepGraphon,
};

use crate::render::{significant, Check, Report};

fn q(s: &str) -> Rational {
    parse_rational(s).expect("literal rational")
}

fn close(name: &str, expected: f64, computed: f64, tol: f64) -> Check {
    Check::new(
        name,
        significant(expected),
        significant(computed),
        (expected - computed).abs() <= tol,
    )
}

fn failed(name: &str, e: impl std::fmt::Display) -> Check {
    Check::new(name, "a value", format!("error: {e}"), false)
}

/// Every check of the table; the result lists the tolerance conventions.
pub fn reproduce() -> Report {
    let mut checks = Vec::new();
    counts(&mut checks);
    roots(&mut checks);
    counterexample(&mut checks);
    cherry(&mut checks);
    membership(&mut checks);
    let result = json!({
        "checks": checks.len(),
        "passed": checks.iter().filter(|c| c.pass).count(),
        "float_tolerance": 1e-10,
    });
    let mut report = Report::new("reproduce", Value::Object(Default::default()), result);
    report.checks = checks;
    report
}

fn counts(checks: &mut Vec<Check>) {
    let graphs = [
        (
            "quasi-complete(13,61)",
            quasi_complete(13, 61),
            1610u32,
            13202u32,
        ),
        ("quasi-star(13,61)", quasi_star(13, 61), 1620, 13172),
        ("witness", Ok(extremal_witness()), 1622, 13238),
    ];
    for (name, g, stars, moment) in graphs {
        match g {
            Ok(g) => {
                checks.push(Check::equal(
                    format!("star count {name}, k=3"),
                    stars,
                    count_stars(&g, 3),
                ));
                checks.push(Check::equal(
                    format!("degree moment {name}, k=3"),
                    moment,
                    degree_moment(&g, 3),
                ));
            }
            Err(e) => checks.push(failed(name, e)),
        }
    }
    for (objective, expected) in [
        (Objective::StarCount, 1622u32),
        (Objective::DegreeMoment, 13238),
    ] {
        let name = format!("max {objective} over threshold graphs (13,61), k=3");
        match max_over_threshold(13, 61, 3, objective) {
            Ok(r) => checks.push(Check::equal(name, expected, r.max_value)),
            Err(e) => checks.push(failed(&name, e)),
        }
    }
}

fn roots(checks: &mut Vec<Check>) {
    for (k, expected) in [(2, 0.5), (3, 0.75)] {
        let name = format!("gamma_{k}");
        match crossover(k, 1e-12) {
            Ok(c) => checks.push(close(&name, expected, c.gamma_k, 1e-10)),
            Err(e) => checks.push(failed(&name, e)),
        }
    }
    match alpha_constant(1e-10) {
        Ok(a) => {
            checks.push(Check::equal(
                "alpha to 4 decimals",
                "1.5936",
                format!("{a:.4}"),
            ));
            checks.push(close(
                "alpha/2 + exp(-alpha) - 1",
                0.0,
                a / 2.0 + (-a).exp() - 1.0,
                1e-10,
            ));
        }
        Err(e) => checks.push(failed("alpha", e)),
    }
}

fn counterexample(checks: &mut Vec<Check>) {
    let f = FunctionOracle::counterexample();
    match f_bound(&f, q("9/25")) {
        Ok(b) => checks.push(Check::equal("counterexample bound at 9/25", "3/5", b.bound)),
        Err(e) => checks.push(failed("counterexample bound", e)),
    }
    let w = match StepGraphon::l_shaped(q("2/5"), q("1/4")) {
        Ok(w) => w,
        Err(e) => return checks.push(failed("l-shaped(2/5,1/4)", e)),
    };
    match w.f_functional(&f) {
        Ok(v) => checks.push(Check::equal(
            "counterexample functional on l-shaped(2/5,1/4)",
            "5/8",
            v,
        )),
        Err(e) => checks.push(failed("counterexample functional", e)),
    }
    match is_good(&f, &w) {
        Ok(g) => {
            checks.push(Check::equal("counterexample is good", false, g.holds));
            checks.push(Check::equal("counterexample slack", "-1/40", g.slack));
        }
        Err(e) => checks.push(failed("counterexample goodness", e)),
    }
    match j_boundary_check(&f, 0.36, 1000) {
        Ok(j) => checks.push(Check::new(
            "counterexample J excess at 9/25",
            format!(">= {}", significant(1.0 / 40.0 - 1e-9)),
            significant(j.worst_excess),
            !j.holds && j.worst_excess >= 1.0 / 40.0 - 1e-9,
        )),
        Err(e) => checks.push(failed("counterexample J", e)),
    }
}

fn cherry(checks: &mut Vec<Check>) {
    let mut graphs = 0u64;
    let mut failures = 0u64;
    for n in 1..=10 {
        for m in 0..=max_edges(n) {
            let Ok(list) = enumerate_threshold(n, m) else {
                failures += 1;
                continue;
            };
            for g in list {
                graphs += 1;
                if count_stars(&g, 2) != degree_moment(&g, 2) / 2u32 - m {
                    failures += 1;
                }
            }
        }
    }
    checks.push(Check::new(
        format!("cherry identity on {graphs} threshold graphs, n <= 10"),
        0,
        failures,
        failures == 0 && graphs > 0,
    ));
}

fn membership(checks: &mut Vec<Check>) {
    for k in 2..=10 {
        let name = format!("power:{k} grid-100 scan minimum");
        match FunctionOracle::power(k).and_then(|f| membership_scan(&f, 100)) {
            Ok(r) => {
                let min = r.min_value.unwrap_or(f64::NEG_INFINITY);
                checks.push(Check::new(name, "> 0", significant(min), min > 0.0));
            }
            Err(e) => checks.push(failed(&name, e)),
        }
    }
    let mut negative = Vec::new();
    for m in 0..=40 {
        for x in ["1", "3/2", "2", "5", "10"] {
            match weighted_power_sum(m, &q(x), false) {
                Ok(v) if !v.is_negative() => {}
                _ => negative.push(format!("(m={m}, x={x})")),
            }
        }
    }
    checks.push(Check::new(
        "polynomial sum nonnegative, m <= 40",
        "[]",
        format!("[{}]", negative.join(", ")),
        negative.is_empty(),
    ));
    let mut negative = 0;
    for k in 2..=64 {
        for i in 4..=200 {
            if q_taylor_coeff(k, i).map_or(true, |c| c.is_negative()) {
                negative += 1;
            }
        }
    }
    checks.push(Check::new(
        "negative Taylor coefficients, k <= 64, i <= 200",
        0,
        negative,
        negative == 0,
    ));
}
