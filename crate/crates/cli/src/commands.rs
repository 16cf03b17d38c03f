use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use latmass::arith::parse_rational;
use latmass::conductor::{auto_c_lo, table1};
use latmass::count::{count_with, valid_pivots, Ceilings, CountQuery, Method};
use latmass::mass::{
    c_delta, c_delta_primes, class_number_lower_bound, classify_primes, mass_ratio_lower_bound,
    MassMode, ShiftedLatticeSpec,
};
use latmass::padic::{self, DiagonalForm, LocalVector};
use latmass::ser::Exact;
use latmass::verify::{run_grid, GridConfig};
use latmass::{Error, Rational, Result, Valuation};

use crate::args::{
    CdeltaArgs, ClassArgs, Command, CountArgs, MassArgs, MethodArg, StructureArgs, TableArgs,
    VerifyArgs,
};

/// Records to emit and whether every check held.
pub struct Outcome {
    pub records: Vec<Value>,
    pub ok: bool,
}

impl Outcome {
    fn ok(records: Vec<Value>) -> Self {
        Self { records, ok: true }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Count(a) => count(a),
        Command::MassBound(a) => mass_bound(a),
        Command::ClassBound(a) => class_bound(a),
        Command::Table1(a) => table(a),
        Command::Cdelta(a) => cdelta(a),
        Command::Structure(a) => structure(a),
        Command::Verify(a) => verify(a),
    }
}

/// Structured record for a failed run.
pub fn error_record(e: &Error) -> Value {
    let prime = match e {
        Error::GcdHypothesisViolated { prime } => Some(*prime as i128),
        Error::InvalidPrime(p) => Some(*p),
        Error::NotPrimitive(p) => Some(*p as i128),
        _ => None,
    };
    json!({
        "record": "error",
        "kind": e.kind(),
        "message": e.to_string(),
        "prime": prime,
    })
}

fn rat(r: &Rational) -> Value {
    serde_json::to_value(Exact(r)).expect("rationals serialize")
}

fn valuation(v: Valuation) -> Value {
    v.finite().map_or_else(|| Value::from("inf"), Value::from)
}

fn rational_arg(s: &str) -> Result<Rational> {
    parse_rational(s)
}

fn zero_based(indices: &[usize]) -> Result<Vec<usize>> {
    indices
        .iter()
        .map(|&j| {
            j.checked_sub(1)
                .ok_or_else(|| Error::InvalidInput("indices are 1-based".into()))
        })
        .collect()
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Oracle => Method::Oracle,
        MethodArg::Convolution => Method::Convolution,
        MethodArg::ClosedForm => Method::ClosedForm,
    }
}

fn count(a: &CountArgs) -> Result<Outcome> {
    let ceilings = Ceilings::from_env()?;
    let form = DiagonalForm::new(a.form.clone())?;
    let methods: Vec<Method> = a.methods.iter().map(|&m| method(m)).collect();
    let subsets: Vec<Vec<usize>> = if let Some(j) = a.pivot {
        vec![zero_based(&[j])?]
    } else if !a.subset.is_empty() {
        vec![zero_based(&a.subset)?]
    } else if methods.contains(&Method::ClosedForm) {
        let pivots = valid_pivots(&form, &a.u, a.p)?;
        if pivots.is_empty() {
            return Err(Error::NoPivot);
        }
        pivots.into_iter().map(|j| vec![j]).collect()
    } else {
        vec![vec![]]
    };

    let mut records = Vec::new();
    let mut all_agree = true;
    for subset in subsets {
        let q = CountQuery::new(form.clone(), a.u.clone(), subset, a.r, a.p, a.k)?;
        let results = methods
            .iter()
            .map(|&m| count_with(&q, m, &ceilings))
            .collect::<Result<Vec<_>>>()?;
        let agree = results.windows(2).all(|w| w[0].count == w[1].count);
        all_agree &= agree;
        let one_based: Vec<usize> = q.subset().iter().map(|j| j + 1).collect();
        for res in results {
            records.push(json!({
                "record": "count",
                "method": res.method,
                "count": res.count,
                "pivot": res.pivot.map(|j| j + 1),
                "subset": one_based,
                "r": q.r(),
                "p": q.p(),
                "k": q.k(),
                "m": q.m().to_string(),
                "agree": agree,
            }));
        }
    }
    Ok(Outcome {
        records,
        ok: all_agree,
    })
}

fn shifted_spec(form: &[i64], u: &[i64], c: u64) -> Result<ShiftedLatticeSpec> {
    ShiftedLatticeSpec::new(DiagonalForm::new(form.to_vec())?, u.to_vec(), c)
}

fn mass_bound(a: &MassArgs) -> Result<Outcome> {
    let ceilings = Ceilings::from_env()?;
    let spec = shifted_spec(&a.form, &a.u, a.c)?;
    let classes = classify_primes(&spec)?;
    let mut records = vec![json!({
        "record": "classification",
        "c": spec.c(),
        "m": spec.m().to_string(),
        "omega1": classes.omega1,
        "omega2": classes.omega2,
    })];
    for mode in [MassMode::General, MassMode::DiagonalClosedForm] {
        let res = mass_ratio_lower_bound(&spec, mode, &ceilings)?;
        for f in &res.factors {
            records.push(json!({
                "record": "mass_factor",
                "mode": mode,
                "p": f.p,
                "c_p": f.c_p,
                "value": rat(&f.value),
                "count": f.count.as_ref().map(|c| c.count),
                "method": f.count.as_ref().map(|c| c.method),
            }));
        }
        records.push(json!({
            "record": "mass_total",
            "mode": mode,
            "total": rat(&res.total),
        }));
    }
    if let Some(m) = &a.mass_of_l {
        records.push(class_record(&spec, m, &a.delta, &a.width)?);
    }
    Ok(Outcome::ok(records))
}

fn class_record(spec: &ShiftedLatticeSpec, mass: &str, delta: &str, width: &str) -> Result<Value> {
    let mass = rational_arg(mass)?;
    let delta = rational_arg(delta)?;
    let iv = class_number_lower_bound(spec, &mass, &delta, &rational_arg(width)?)?;
    // h is a positive integer, so h ≥ ⌈lo⌉ and h ≥ 1
    let certified = iv.lo().ceil().to_integer().max(BigInt::one());
    Ok(json!({
        "record": "class_bound",
        "c": spec.c(),
        "delta": rat(&delta),
        "mass_of_l": rat(&mass),
        "lo": rat(iv.lo()),
        "hi": rat(iv.hi()),
        "h_at_least": certified.to_string(),
    }))
}

fn class_bound(a: &ClassArgs) -> Result<Outcome> {
    let spec = shifted_spec(&a.form, &a.u, a.c)?;
    Ok(Outcome::ok(vec![class_record(
        &spec,
        &a.mass_of_l,
        &a.delta,
        &a.width,
    )?]))
}

fn table(a: &TableArgs) -> Result<Outcome> {
    let delta = rational_arg(&a.delta)?;
    let c_lo = if a.c_lo.trim().eq_ignore_ascii_case("auto") {
        auto_c_lo(&delta)?
    } else {
        rational_arg(&a.c_lo)?
    };
    let records = table1(&delta, &c_lo)?
        .iter()
        .map(|b| {
            json!({
                "record": "conductor_bound",
                "rank": b.rank,
                "c_max": b.c_max,
                "delta": rat(&b.delta),
                "c_lo": rat(&b.c_lo),
                "threshold": rat(b.threshold.lo()),
            })
        })
        .collect();
    Ok(Outcome::ok(records))
}

fn cdelta(a: &CdeltaArgs) -> Result<Outcome> {
    let delta = rational_arg(&a.delta)?;
    let width = rational_arg(&a.width)?;
    let iv = c_delta(&delta, &width)?;
    Ok(Outcome::ok(vec![json!({
        "record": "c_delta",
        "delta": rat(&delta),
        "lo": rat(iv.lo()),
        "hi": rat(iv.hi()),
        "width": rat(&width),
        "primes": c_delta_primes(&delta)?,
    })]))
}

fn structure(a: &StructureArgs) -> Result<Outcome> {
    let ctx = DiagonalForm::new(a.form.clone())?.local(a.p)?;
    let local = |v: &[i64]| match a.precision {
        Some(k) => LocalVector::new(v.to_vec(), k),
        None => ctx.vector(v),
    };
    let x = local(&a.x)?;
    let optional = |r: Result<Value>| match r {
        Ok(v) => Ok(v),
        Err(Error::NotPrimitive(_)) => Ok(Value::Null),
        Err(e) => Err(e),
    };
    let depth = optional(padic::depth(&ctx, &x).map(Value::from))?;
    let james = optional(padic::james_decompose(&ctx, &x).map(|terms| {
        terms
            .iter()
            .map(|t| json!({ "b": t.b, "r": t.r, "lambda": t.lambda.coords() }))
            .collect()
    }))?;
    let association = match &a.y {
        Some(y) => serde_json::to_value(padic::are_associated(&ctx, &x, &local(y)?)?)
            .expect("enum serializes"),
        None => Value::Null,
    };
    Ok(Outcome::ok(vec![json!({
        "record": "structure",
        "p": a.p,
        "x": x.coords(),
        "precision": x.precision(),
        "order": valuation(padic::order(&ctx, &x)?),
        "critical_indices": padic::critical_indices(&ctx, &x)?,
        "depth": depth,
        "simple_index": padic::is_simple(&ctx, &x)?,
        "witness_index": padic::simple_by_witness(&ctx, &x)?,
        "james": james,
        "association": association,
    })]))
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let cfg = GridConfig {
        max_pk: a.max_pk,
        jobs: a.jobs,
        inject_fault: a.inject_fault,
        ceilings: Ceilings::from_env()?,
        ..GridConfig::default()
    };
    let report = run_grid(&cfg)?;
    let mut records = vec![json!({
        "record": "verify_summary",
        "cells": report.cells,
        "violations": report.violations.len(),
        "passed": report.passed(),
        "cp_branches": report.cp_branches,
        "t_parities": report.t_parities,
        "tight_unit_bounds": report.tight_unit_bounds.len(),
    })];
    for t in &report.tallies {
        records.push(json!({
            "record": "verify_property",
            "property": t.property,
            "checked": t.checked,
            "passed": t.passed,
        }));
    }
    for v in &report.violations {
        records.push(json!({
            "record": "violation",
            "property": v.property,
            "p": v.cell.p,
            "k": v.cell.k,
            "coeffs": v.cell.coeffs,
            "u": v.cell.u,
            "detail": v.detail,
        }));
    }
    Ok(Outcome {
        records,
        ok: report.passed(),
    })
}
