//! Bundled verification suites: named check lists that exercise the
//! library end-to-end and exit 0 only when every member passes.
//!
//! * `smoke` — n = 2 families, p = 7, small orders; finishes in well
//!   under a minute.
//! * `quintic` — the quintic instanton pipeline and mirror-map
//!   integrality tier.
//! * `diagonal` — the hyperoctahedral (cross-polytope) operator and
//!   Hasse–Witt/Frobenius tier.
//!
//! Suite members run concurrently up to the worker count; the report is
//! assembled single-threaded in declaration order.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use dworkmill::diffop::ThetaOperator;
use dworkmill::geometry::{build_family, constant_term_series, FamilyData, FamilySpec};
use dworkmill::hassewitt::{hw_block_check, hw_condition};
use dworkmill::mirror::{
    check_integrality, dieudonne_dwork_verdicts, exp_ratio, mirror_pipeline,
    series_integrality_verdicts, PrimeVerdict,
};
use dworkmill::padic::IntegralityVerdict;
use dworkmill::reduce::derive_picard_fuchs;
use dworkmill::QPoly;

use crate::commands::{assess_structure, Report, Status};
use crate::pool;
use crate::render::{json_doc, Format, TsvDoc};

type Check = Box<dyn FnOnce() -> Result<bool, String> + Send>;

fn core_err(e: dworkmill::error::Error) -> String {
    e.to_string()
}

fn simplicial(n: usize) -> Result<FamilyData, String> {
    build_family(&FamilySpec::Simplicial(n)).map_err(core_err)
}

fn cross_polytope(n: usize) -> Result<FamilyData, String> {
    build_family(&FamilySpec::Hyperoctahedral(n)).map_err(core_err)
}

fn derived_operator(family: &FamilyData) -> Result<ThetaOperator, String> {
    let n = family.g.dimension();
    derive_picard_fuchs(family, 2 * n + 16).map_err(core_err)
}

fn poly_eq(a: &QPoly, b: &QPoly) -> bool {
    use num_traits::Zero;
    let (ac, bc) = (a.coeffs(), b.coeffs());
    let len = ac.len().max(bc.len());
    for i in 0..len {
        let x = ac.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = bc.get(i).cloned().unwrap_or_else(BigRational::zero);
        if x != y {
            return false;
        }
    }
    true
}

fn operators_equal(a: &ThetaOperator, b: &ThetaOperator) -> bool {
    a.order() == b.order()
        && a.coeff_polys()
            .iter()
            .zip(b.coeff_polys())
            .all(|(p, q)| poly_eq(p, q))
}

fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// First five instanton numbers of the quintic benchmark operator
/// (kappa = 5, s = 3).
const QUINTIC_FIRST_FIVE: [i64; 5] = [
    2875,
    609_250,
    317_206_375,
    242_467_530_000,
    229_305_888_887_625,
];

fn quintic_pipeline(r_max: usize) -> Result<Vec<BigRational>, String> {
    let op = ThetaOperator::builtin("quintic").map_err(core_err)?;
    let basis = op.frobenius_basis(r_max + 2).map_err(core_err)?;
    let md = mirror_pipeline(&basis, r_max, 3, &rational(5)).map_err(core_err)?;
    Ok(md.inst)
}

fn quintic_lambert(r_max: usize) -> Result<Vec<BigRational>, String> {
    let op = ThetaOperator::builtin("quintic").map_err(core_err)?;
    let basis = op.frobenius_basis(r_max + 2).map_err(core_err)?;
    let md = mirror_pipeline(&basis, r_max, 3, &rational(5)).map_err(core_err)?;
    Ok(md.a)
}

/// Structure assertions hold cleanly (no failure, no precision gap).
fn structure_clean(family: &FamilyData, p: u64, precision: u32, terms: usize) -> Result<bool, String> {
    Ok(assess_structure(family, p, precision, terms)?.status == Status::Pass)
}

fn hasse_witt_clean(family: &FamilyData, p: u64, terms: usize) -> Result<bool, String> {
    let n = family.g.dimension();
    for k in 1..=n as u64 {
        if !hw_condition(family, k, p, terms).map_err(core_err)? {
            return Ok(false);
        }
        if !hw_block_check(family, k, p).map_err(core_err)?.ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn annihilates_constant_terms(n: usize, order: usize) -> Result<bool, String> {
    let family = cross_polytope(n)?;
    let op = derived_operator(&family)?;
    let f = constant_term_series(&family.g, &family.polytope, order)
        .map(|c| BigRational::from_integer(c.clone()));
    Ok(op.apply_series(&f).is_zero_series())
}

fn smoke_checks() -> Vec<(&'static str, Check)> {
    vec![
        (
            "simplicial-2-closed-form",
            Box::new(|| {
                let family = simplicial(2)?;
                let derived = derived_operator(&family)?;
                let closed = ThetaOperator::builtin("simplicial:2").map_err(core_err)?;
                Ok(operators_equal(&derived, &closed))
            }),
        ),
        (
            "cross-polytope-2-annihilates-to-20",
            Box::new(|| annihilates_constant_terms(2, 21)),
        ),
        (
            "simplicial-2-hasse-witt-p7",
            Box::new(|| hasse_witt_clean(&simplicial(2)?, 7, 6)),
        ),
        (
            "cross-polytope-2-hasse-witt-p7",
            Box::new(|| hasse_witt_clean(&cross_polytope(2)?, 7, 6)),
        ),
        (
            "simplicial-2-frobenius-structure-p7",
            Box::new(|| structure_clean(&simplicial(2)?, 7, 2, 8)),
        ),
        (
            "cross-polytope-2-frobenius-structure-p7",
            Box::new(|| structure_clean(&cross_polytope(2)?, 7, 2, 8)),
        ),
        (
            "simplicial-2-lambert-integrality-p7",
            Box::new(|| {
                let family = simplicial(2)?;
                let op = derived_operator(&family)?;
                let basis = op.frobenius_basis(12).map_err(core_err)?;
                let md = mirror_pipeline(&basis, 10, 2, &rational(1)).map_err(core_err)?;
                Ok(check_integrality(&md.a, 2, 7, 1, 5).verdict == PrimeVerdict::Pass)
            }),
        ),
        (
            "simplicial-3-lambert-integrality-p7",
            Box::new(|| {
                let family = simplicial(3)?;
                let op = derived_operator(&family)?;
                let basis = op.frobenius_basis(17).map_err(core_err)?;
                let md = mirror_pipeline(&basis, 15, 2, &rational(1)).map_err(core_err)?;
                Ok(check_integrality(&md.a, 2, 7, 1, 5).verdict == PrimeVerdict::Pass)
            }),
        ),
        (
            "quintic-first-instanton",
            Box::new(|| {
                let inst = quintic_pipeline(3)?;
                Ok(inst[0] == rational(2875))
            }),
        ),
    ]
}

fn quintic_checks(extended: bool) -> Vec<(&'static str, Check)> {
    let mut checks: Vec<(&'static str, Check)> = vec![
        (
            "instanton-numbers-1-to-5",
            Box::new(|| {
                let inst = quintic_pipeline(5)?;
                Ok(QUINTIC_FIRST_FIVE
                    .iter()
                    .zip(&inst)
                    .all(|(&want, got)| *got == rational(want)))
            }),
        ),
        (
            "integer-instantons-to-20",
            Box::new(|| Ok(quintic_pipeline(20)?.iter().all(|a| a.is_integer()))),
        ),
        (
            "lambert-quotient-integrality-7-11-13",
            Box::new(|| {
                let a = quintic_lambert(20)?;
                Ok([7u64, 11, 13]
                    .iter()
                    .all(|&p| check_integrality(&a, 3, p, 1, 7).verdict == PrimeVerdict::Pass))
            }),
        ),
        (
            "mirror-map-integrality-to-40",
            Box::new(|| {
                let op = ThetaOperator::builtin("quintic").map_err(core_err)?;
                let basis = op.frobenius_basis(41).map_err(core_err)?;
                let e = exp_ratio(basis.f(0), basis.f(1)).map_err(core_err)?;
                Ok([7u64, 11, 13].iter().all(|&p| {
                    series_integrality_verdicts(&e, p, 1)
                        .iter()
                        .all(|v| *v == IntegralityVerdict::Integral)
                }))
            }),
        ),
        (
            "splitting-criterion-agreement-to-40",
            Box::new(|| {
                let op = ThetaOperator::builtin("quintic").map_err(core_err)?;
                let basis = op.frobenius_basis(41).map_err(core_err)?;
                let e = exp_ratio(basis.f(0), basis.f(1)).map_err(core_err)?;
                let l = basis.f(1).div(basis.f(0)).map_err(core_err)?;
                for &p in &[7u64, 11, 13] {
                    let direct = series_integrality_verdicts(&e, p, 1);
                    let split = dieudonne_dwork_verdicts(&l, p, 1).map_err(core_err)?;
                    if direct != split {
                        return Ok(false);
                    }
                }
                Ok(true)
            }),
        ),
    ];
    if extended {
        checks.push((
            "quintic-family-frobenius-structure-n4",
            Box::new(|| {
                eprintln!("extended tier: simplicial n = 4 Frobenius structure (p = 7, N = 3, M = 10) ...");
                let out = structure_clean(&simplicial(4)?, 7, 3, 10);
                eprintln!("extended tier finished");
                out
            }),
        ));
    }
    checks
}

fn diagonal_checks() -> Vec<(&'static str, Check)> {
    vec![
        (
            "cross-polytope-4-matches-benchmark",
            Box::new(|| {
                let family = cross_polytope(4)?;
                let derived = derived_operator(&family)?;
                let benchmark = ThetaOperator::builtin("diagonal4").map_err(core_err)?;
                let order = 24;
                let got = derived.monic_series(order).map_err(core_err)?;
                let want = benchmark.monic_series(order).map_err(core_err)?;
                Ok(got
                    .iter()
                    .zip(&want)
                    .all(|(g, w)| g.sub(w).is_zero_series()))
            }),
        ),
        (
            "cross-polytope-4-is-mum",
            Box::new(|| {
                let family = cross_polytope(4)?;
                derived_operator(&family)?.is_mum().map_err(core_err)
            }),
        ),
        (
            "cross-polytope-2-annihilates-to-30",
            Box::new(|| annihilates_constant_terms(2, 31)),
        ),
        (
            "cross-polytope-3-annihilates-to-30",
            Box::new(|| annihilates_constant_terms(3, 31)),
        ),
        (
            "cross-polytope-2-hasse-witt-t10",
            Box::new(|| hasse_witt_clean(&cross_polytope(2)?, 7, 10)),
        ),
        (
            "cross-polytope-3-hasse-witt-t10",
            Box::new(|| hasse_witt_clean(&cross_polytope(3)?, 7, 10)),
        ),
        (
            "cross-polytope-2-frobenius-structure-p7",
            Box::new(|| structure_clean(&cross_polytope(2)?, 7, 3, 10)),
        ),
    ]
}

pub fn verify_cmd(suite: &str, extended: bool, fmt: Format) -> Result<Report, String> {
    let checks = match suite {
        "smoke" => smoke_checks(),
        "quintic" => quintic_checks(extended),
        "diagonal" => diagonal_checks(),
        other => {
            return Err(format!(
                "unknown suite {:?}: available suites are quintic, diagonal, smoke",
                other
            ))
        }
    };
    let names: Vec<&'static str> = checks.iter().map(|(n, _)| *n).collect();
    let jobs: Vec<Check> = checks.into_iter().map(|(_, f)| f).collect();
    let results = pool::run_all(jobs);

    let mut status = Status::Pass;
    let mut rows: Vec<(String, &'static str, String)> = Vec::new();
    for (name, result) in names.iter().zip(results) {
        let (label, note) = match result {
            Ok(true) => ("pass", String::new()),
            Ok(false) => {
                status = status.and(Status::Fail);
                ("fail", String::new())
            }
            Err(e) => {
                status = status.and(Status::Fail);
                ("fail", e.replace(['\t', '\n'], " "))
            }
        };
        rows.push((name.to_string(), label, note));
    }

    let data = match fmt {
        Format::Json => {
            let checks_json: Vec<serde_json::Value> = rows
                .iter()
                .map(|(name, label, note)| {
                    if note.is_empty() {
                        json!({ "name": name, "status": label })
                    } else {
                        json!({ "name": name, "status": label, "note": note })
                    }
                })
                .collect();
            json_doc(&json!({
                "command": "verify",
                "suite": suite,
                "extended": extended,
                "checks": checks_json,
                "status": status.label(),
            }))
        }
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "verify");
            doc.meta("suite", suite);
            doc.meta("extended", extended);
            doc.meta("status", status.label());
            doc.header(&["check", "status", "note"]);
            for (name, label, note) in &rows {
                doc.row(vec![name.clone(), label.to_string(), note.clone()]);
            }
            doc.finish()
        }
    };
    Ok(Report { data, status })
}
