//! Subcommand implementations. Every command builds its whole report
//! in memory and only then hands it back for writing, so a failing run
//! never leaves partial output behind.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use dworkmill::cartier::{frobenius_structure, verify_frobenius_equation};
use dworkmill::diffop::ThetaOperator;
use dworkmill::geometry::{
    build_family, constant_term_series, FamilyData, FamilySpec, LaurentPoly, PolytopeData,
};
use dworkmill::hassewitt::{hw_block_check, hw_matrix};
use dworkmill::mirror::{
    check_integrality, dieudonne_dwork_verdicts, exp_ratio, mirror_pipeline, IntegralityReport,
    PrimeVerdict,
};
use dworkmill::padic::{IntegralityVerdict, PadicScalar, Valuation};
use dworkmill::reduce::derive_picard_fuchs;
use dworkmill::series::TruncatedSeries;
use dworkmill::QSeries;

use crate::pool;
use crate::render::{
    json_doc, prime_verdict, rat, series_json, verdict_str, Format, TsvDoc,
};

/// Overall report verdict, mapped to the process exit code.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    /// Success / all checks passed: exit 0.
    Pass,
    /// At least one verification failed: exit 1.
    Fail,
    /// Nothing failed, but some result could not be decided at the stated
    /// precision (or sits outside the theorem hypotheses): exit 3.
    Inconclusive,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }

    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

pub struct Report {
    pub data: String,
    pub status: Status,
}

fn core_err(e: dworkmill::error::Error) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Selector resolution
// ---------------------------------------------------------------------------

/// What the user pointed the command at: a differential operator by name,
/// or a family (whose derived operator is used where one is needed).
pub enum Selector {
    Operator(String),
    Family { name: String, dim: Option<usize> },
}

/// Default derivation window: enough rows to pin the operator coefficients
/// for every builtin family up to n = 4.
pub fn derive_window(n: usize, flag: Option<usize>) -> usize {
    flag.unwrap_or(2 * n + 16)
}

pub fn resolve_family(name: &str, dim: Option<usize>) -> Result<FamilyData, String> {
    let spec = if name.contains(':') {
        FamilySpec::parse(name).map_err(core_err)?
    } else if name == "simplicial" || name == "hyperoctahedral" {
        let d = dim.ok_or_else(|| {
            format!("`family` {:?} needs `dim` (or use \"{}:N\")", name, name)
        })?;
        FamilySpec::parse(&format!("{}:{}", name, d)).map_err(core_err)?
    } else if Path::new(name).is_file() {
        return load_custom_family(Path::new(name));
    } else {
        return Err(format!(
            "unknown family {:?}: expected simplicial or hyperoctahedral (with `dim`), \
             \"kind:N\", or a path to a custom-family JSON file",
            name
        ));
    };
    build_family(&spec).map_err(core_err)
}

/// Custom family file: `{"g": [{"exp": [..], "coeff": c}, ...],
/// "facets": [[..], ...]}`. Coefficients may be integers or decimal
/// strings; polytope vertices are inferred from the support of g.
fn load_custom_family(path: &Path) -> Result<FamilyData, String> {
    #[derive(serde::Deserialize)]
    struct TermFile {
        exp: Vec<i64>,
        coeff: serde_json::Value,
    }
    #[derive(serde::Deserialize)]
    struct FamilyFile {
        g: Vec<TermFile>,
        facets: Vec<Vec<i64>>,
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read family file {}: {}", path.display(), e))?;
    let file: FamilyFile = serde_json::from_str(&text)
        .map_err(|e| format!("family file {}: {}", path.display(), e))?;
    if file.g.is_empty() {
        return Err(format!("family file {}: empty \"g\"", path.display()));
    }
    let n = file.g[0].exp.len();
    let mut terms: Vec<(Vec<i64>, BigInt)> = Vec::new();
    for t in &file.g {
        if t.exp.len() != n {
            return Err(format!(
                "family file {}: exponent {:?} has wrong length (dimension is {})",
                path.display(),
                t.exp,
                n
            ));
        }
        let c = match &t.coeff {
            serde_json::Value::Number(num) => num
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| "coefficients must be integers".to_string())?,
            serde_json::Value::String(s) => s
                .parse::<BigInt>()
                .map_err(|_| format!("invalid integer coefficient {:?}", s))?,
            other => {
                return Err(format!(
                    "family file {}: coefficient {:?} is neither integer nor string",
                    path.display(),
                    other
                ))
            }
        };
        terms.push((t.exp.clone(), c));
    }
    let mut vertices: Vec<Vec<i64>> = Vec::new();
    for (e, _) in &terms {
        if !vertices.contains(e) {
            vertices.push(e.clone());
        }
    }
    let g = LaurentPoly::from_terms(n, terms);
    let polytope = PolytopeData::new(n, vertices, file.facets).map_err(core_err)?;
    build_family(&FamilySpec::Custom { g, polytope }).map_err(core_err)
}

/// Resolves an operator: builtin name, `hyperoctahedral:N` (derived), a
/// JSON operator file, or a family whose operator is derived.
pub fn resolve_operator(sel: &Selector) -> Result<(String, ThetaOperator), String> {
    match sel {
        Selector::Operator(name) => {
            if name == "quintic" || name == "diagonal4" || name.starts_with("simplicial:") {
                let op = ThetaOperator::builtin(name).map_err(core_err)?;
                return Ok((name.clone(), op));
            }
            if name.starts_with("hyperoctahedral:") {
                let fam = resolve_family(name, None)?;
                let n = fam.g.dimension();
                let op = derive_picard_fuchs(&fam, derive_window(n, None)).map_err(core_err)?;
                return Ok((name.clone(), op));
            }
            if Path::new(name).is_file() {
                let text = std::fs::read_to_string(name)
                    .map_err(|e| format!("cannot read operator file {}: {}", name, e))?;
                let v: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| format!("operator file {}: {}", name, e))?;
                let op = ThetaOperator::from_json(&v).map_err(core_err)?;
                return Ok((name.clone(), op));
            }
            Err(format!(
                "unknown operator {:?}: expected quintic, diagonal4, simplicial:N, \
                 hyperoctahedral:N, or a path to an operator JSON file",
                name
            ))
        }
        Selector::Family { name, dim } => {
            let fam = resolve_family(name, *dim)?;
            let n = fam.g.dimension();
            let op = derive_picard_fuchs(&fam, derive_window(n, None)).map_err(core_err)?;
            Ok((fam.name.clone(), op))
        }
    }
}

// ---------------------------------------------------------------------------
// frobenius-basis
// ---------------------------------------------------------------------------

pub fn frobenius_basis_cmd(
    label: &str,
    op: &ThetaOperator,
    terms: usize,
    fmt: Format,
) -> Result<Report, String> {
    let basis = op.frobenius_basis(terms).map_err(core_err)?;
    let data = match fmt {
        Format::Json => json_doc(&json!({
            "command": "frobenius-basis",
            "operator": label,
            "operator_order": op.order(),
            "terms": terms,
            "precision": "exact-rational",
            "solutions": basis.fs().iter().map(series_json).collect::<Vec<_>>(),
        })),
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "frobenius-basis");
            doc.meta("operator", label);
            doc.meta("operator-order", op.order());
            doc.meta("terms", terms);
            doc.meta("precision", "exact rational");
            doc.header(&["solution", "power", "coefficient"]);
            for (i, f) in basis.fs().iter().enumerate() {
                for (m, c) in f.coeffs().iter().enumerate() {
                    doc.row(vec![i.to_string(), m.to_string(), rat(c)]);
                }
            }
            doc.finish()
        }
    };
    Ok(Report {
        data,
        status: Status::Pass,
    })
}

// ---------------------------------------------------------------------------
// mirror
// ---------------------------------------------------------------------------

pub fn mirror_cmd(
    label: &str,
    op: &ThetaOperator,
    terms: usize,
    power: u32,
    kappa: &BigRational,
    fmt: Format,
) -> Result<Report, String> {
    if terms < 3 {
        return Err("`terms` must be at least 3 for the mirror pipeline".into());
    }
    let basis = op.frobenius_basis(terms).map_err(core_err)?;
    let md = mirror_pipeline(&basis, terms - 2, power, kappa).map_err(core_err)?;
    let series: [(&str, &QSeries); 4] = [
        ("q_of_t", &md.q_of_t),
        ("t_of_q", &md.t_of_q),
        ("v_of_q", &md.v_of_q),
        ("k_of_q", &md.k_of_q),
    ];
    let data = match fmt {
        Format::Json => json_doc(&json!({
            "command": "mirror",
            "operator": label,
            "terms": terms,
            "power": power,
            "kappa": rat(kappa),
            "precision": "exact-rational",
            "q_of_t": series_json(&md.q_of_t),
            "t_of_q": series_json(&md.t_of_q),
            "v_of_q": series_json(&md.v_of_q),
            "k_of_q": series_json(&md.k_of_q),
        })),
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "mirror");
            doc.meta("operator", label);
            doc.meta("terms", terms);
            doc.meta("power", power);
            doc.meta("kappa", rat(kappa));
            doc.meta("precision", "exact rational");
            doc.header(&["series", "power", "coefficient"]);
            for (name, s) in series {
                for (m, c) in s.coeffs().iter().enumerate() {
                    doc.row(vec![name.to_string(), m.to_string(), rat(c)]);
                }
            }
            doc.finish()
        }
    };
    Ok(Report {
        data,
        status: Status::Pass,
    })
}

// ---------------------------------------------------------------------------
// instantons
// ---------------------------------------------------------------------------

fn integrality_status(reports: &[IntegralityReport]) -> Status {
    let mut st = Status::Pass;
    for rep in reports {
        match rep.verdict {
            PrimeVerdict::Fail(_) => st = st.and(Status::Fail),
            PrimeVerdict::OutsideHypotheses => st = st.and(Status::Inconclusive),
            PrimeVerdict::Pass => {}
        }
        if rep
            .per_r
            .iter()
            .any(|v| *v == IntegralityVerdict::Inconclusive)
        {
            st = st.and(Status::Inconclusive);
        }
    }
    st
}

#[allow(clippy::too_many_arguments)]
pub fn instantons_cmd(
    label: &str,
    op: &ThetaOperator,
    count: usize,
    power: u32,
    kappa: &BigRational,
    primes: &[u64],
    min_prime: u64,
    fmt: Format,
) -> Result<Report, String> {
    let basis = op.frobenius_basis(count + 2).map_err(core_err)?;
    let md = mirror_pipeline(&basis, count, power, kappa).map_err(core_err)?;
    let a = md.a.clone();
    let jobs: Vec<Box<dyn FnOnce() -> IntegralityReport + Send>> = primes
        .iter()
        .map(|&p| {
            let a = a.clone();
            Box::new(move || check_integrality(&a, power, p, 1, min_prime))
                as Box<dyn FnOnce() -> IntegralityReport + Send>
        })
        .collect();
    let reports = pool::run_all(jobs);
    let status = integrality_status(&reports);

    let cell = |rep: &IntegralityReport, r: usize| -> String {
        if rep.per_r.is_empty() {
            "outside-hypotheses".to_string()
        } else {
            verdict_str(&rep.per_r[r - 1]).to_string()
        }
    };
    let data = match fmt {
        Format::Json => {
            let rows: Vec<serde_json::Value> = (1..=count)
                .map(|r| {
                    json!({
                        "r": r,
                        "A": rat(&md.a[r - 1]),
                        "a": rat(&md.inst[r - 1]),
                        "verdicts": reports
                            .iter()
                            .map(|rep| json!({ "p": rep.p, "verdict": cell(rep, r) }))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            let prime_summaries: Vec<serde_json::Value> = reports
                .iter()
                .map(|rep| {
                    let (label, first) = prime_verdict(&rep.verdict);
                    json!({ "p": rep.p, "verdict": label, "first_failure": first })
                })
                .collect();
            json_doc(&json!({
                "command": "instantons",
                "operator": label,
                "count": count,
                "power": power,
                "kappa": rat(kappa),
                "min_prime": min_prime,
                "precision": "exact-rational",
                "rows": rows,
                "primes": prime_summaries,
                "status": status.label(),
            }))
        }
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "instantons");
            doc.meta("operator", label);
            doc.meta("count", count);
            doc.meta("power", power);
            doc.meta("kappa", rat(kappa));
            doc.meta("min-prime", min_prime);
            doc.meta("precision", "exact rational");
            for rep in &reports {
                let (label, first) = prime_verdict(&rep.verdict);
                match first {
                    Some(r) => doc.meta(&format!("prime {}", rep.p), format!("{} at r = {}", label, r)),
                    None => doc.meta(&format!("prime {}", rep.p), label),
                }
            }
            doc.meta("status", status.label());
            let mut header: Vec<String> = vec!["r".into(), "A".into(), "a".into()];
            header.extend(reports.iter().map(|rep| format!("p{}", rep.p)));
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            doc.header(&header_refs);
            for r in 1..=count {
                let mut row = vec![r.to_string(), rat(&md.a[r - 1]), rat(&md.inst[r - 1])];
                row.extend(reports.iter().map(|rep| cell(rep, r)));
                doc.row(row);
            }
            doc.finish()
        }
    };
    Ok(Report { data, status })
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct PrimeCheck {
    p: u64,
    direct: Vec<IntegralityVerdict>,
    splitting: Vec<IntegralityVerdict>,
    agree: bool,
}

pub fn check_cmd(
    label: &str,
    op: &ThetaOperator,
    terms: usize,
    primes: &[u64],
    fmt: Format,
) -> Result<Report, String> {
    // Coefficients through t^terms need truncation order terms + 1.
    let order = terms + 1;
    let basis = op.frobenius_basis(order).map_err(core_err)?;
    let e = exp_ratio(basis.f(0), basis.f(1)).map_err(core_err)?;
    let l = basis.f(1).div(basis.f(0)).map_err(core_err)?;
    let jobs: Vec<Box<dyn FnOnce() -> Result<PrimeCheck, String> + Send>> = primes
        .iter()
        .map(|&p| {
            let e = e.clone();
            let l = l.clone();
            Box::new(move || {
                let direct = dworkmill::mirror::series_integrality_verdicts(&e, p, 1);
                let splitting = dieudonne_dwork_verdicts(&l, p, 1).map_err(core_err)?;
                let agree = direct == splitting;
                Ok(PrimeCheck {
                    p,
                    direct,
                    splitting,
                    agree,
                })
            }) as Box<dyn FnOnce() -> Result<PrimeCheck, String> + Send>
        })
        .collect();
    let checks: Vec<PrimeCheck> = pool::run_all(jobs)
        .into_iter()
        .collect::<Result<_, _>>()?;

    let mut status = Status::Pass;
    for c in &checks {
        let any_bad = c
            .direct
            .iter()
            .chain(c.splitting.iter())
            .any(|v| *v == IntegralityVerdict::NonIntegral);
        let any_open = c
            .direct
            .iter()
            .chain(c.splitting.iter())
            .any(|v| *v == IntegralityVerdict::Inconclusive);
        if any_bad || !c.agree {
            status = status.and(Status::Fail);
        } else if any_open {
            status = status.and(Status::Inconclusive);
        }
    }

    let data = match fmt {
        Format::Json => {
            let primes_json: Vec<serde_json::Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "p": c.p,
                        "direct": c.direct.iter().map(verdict_str).collect::<Vec<_>>(),
                        "splitting": c.splitting.iter().map(verdict_str).collect::<Vec<_>>(),
                        "coefficientwise_agreement": c.agree,
                    })
                })
                .collect();
            json_doc(&json!({
                "command": "check",
                "operator": label,
                "terms": terms,
                "precision": "exact-rational",
                "primes": primes_json,
                "status": status.label(),
            }))
        }
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "check");
            doc.meta("operator", label);
            doc.meta("terms", terms);
            doc.meta("precision", "exact rational");
            for c in &checks {
                doc.meta(
                    &format!("prime {}", c.p),
                    if c.agree {
                        "criteria agree coefficient-for-coefficient"
                    } else {
                        "criteria disagree"
                    },
                );
            }
            doc.meta("status", status.label());
            let mut header: Vec<String> = vec!["power".into()];
            for c in &checks {
                header.push(format!("direct_p{}", c.p));
                header.push(format!("splitting_p{}", c.p));
            }
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            doc.header(&header_refs);
            for m in 0..order {
                let mut row = vec![m.to_string()];
                for c in &checks {
                    row.push(verdict_str(&c.direct[m]).to_string());
                    row.push(verdict_str(&c.splitting[m]).to_string());
                }
                doc.row(row);
            }
            doc.finish()
        }
    };
    Ok(Report { data, status })
}

// ---------------------------------------------------------------------------
// hasse-witt
// ---------------------------------------------------------------------------

pub fn hasse_witt_cmd(
    family: &FamilyData,
    ks: &[u64],
    p: u64,
    terms: usize,
    fmt: Format,
) -> Result<Report, String> {
    let n = family.g.dimension();
    let mut status = Status::Pass;
    let mut reports = Vec::new();
    for &k in ks {
        let rep = hw_matrix(family, k, p, terms).map_err(core_err)?;
        let blocks = hw_block_check(family, k, p).map_err(core_err)?;
        if !(rep.hw_unit && blocks.ok) {
            status = status.and(Status::Fail);
        }
        reports.push((rep, blocks));
    }

    let data = match fmt {
        Format::Json => {
            let reports_json: Vec<serde_json::Value> = reports
                .iter()
                .map(|(rep, blocks)| {
                    json!({
                        "k": rep.k,
                        "size": rep.index.len(),
                        "L_k": rep.l_k,
                        "det_at_0": rep.det_at_0.to_string(),
                        "det_valuation": rep.det_valuation_at_0,
                        "unit": rep.hw_unit,
                        "block_product_matches": blocks.product_matches,
                        "per_face_blocks": blocks
                            .blocks
                            .iter()
                            .map(|b| {
                                json!({
                                    "face": b.face_key,
                                    "vertices_on_face": b.s_vertices,
                                    "points": b.points.len(),
                                    "det": b.det.to_string(),
                                    "det_valuation": b.det_valuation,
                                    "expected_valuation": b.expected_valuation,
                                    "ok": b.valuation_ok,
                                })
                            })
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_doc(&json!({
                "command": "hasse-witt",
                "family": family.name,
                "n": n,
                "p": p,
                "terms": terms,
                "precision": format!("integer determinants exact at t = 0; entries mod t^{}", terms),
                "reports": reports_json,
                "status": status.label(),
            }))
        }
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "hasse-witt");
            doc.meta("family", &family.name);
            doc.meta("n", n);
            doc.meta("p", p);
            doc.meta("terms", terms);
            doc.meta(
                "precision",
                format!("integer determinants exact at t = 0; entries mod t^{}", terms),
            );
            doc.meta("status", status.label());
            doc.header(&[
                "k",
                "size",
                "L_k",
                "det_valuation",
                "unit",
                "blocks_ok",
            ]);
            for (rep, blocks) in &reports {
                doc.row(vec![
                    rep.k.to_string(),
                    rep.index.len().to_string(),
                    rep.l_k.to_string(),
                    rep.det_valuation_at_0
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| "infinite".into()),
                    rep.hw_unit.to_string(),
                    blocks.ok.to_string(),
                ]);
            }
            doc.finish()
        }
    };
    Ok(Report { data, status })
}

// ---------------------------------------------------------------------------
// frobenius-structure
// ---------------------------------------------------------------------------

/// Guaranteed lower bound on the t-adic-coefficientwise p-adic order of a
/// series, and whether the bound is attained exactly.
fn series_order_bound(s: &TruncatedSeries<PadicScalar>) -> (Option<i64>, bool) {
    let mut bound: Option<i64> = None;
    let mut attained = false;
    for c in s.coeffs() {
        let (b, exact) = match c.valuation() {
            Valuation::PlusInfinity => continue,
            Valuation::Finite(v) => (v, true),
            Valuation::AtLeast(w) => (w, false),
        };
        match bound {
            None => {
                bound = Some(b);
                attained = exact;
            }
            Some(cur) if b < cur => {
                bound = Some(b);
                attained = exact;
            }
            Some(cur) if b == cur && exact => attained = true,
            _ => {}
        }
    }
    (bound, attained)
}

fn render_order_bound(bound: Option<i64>, attained: bool) -> String {
    match bound {
        None => "+inf".into(),
        Some(b) if attained => b.to_string(),
        Some(b) => format!(">={}", b),
    }
}

/// Is ord_p(x) >= need guaranteed / violated / undecidable at the stored
/// precision?
fn tri_ge(x: &PadicScalar, need: i64) -> Status {
    match x.valuation() {
        Valuation::PlusInfinity => Status::Pass,
        Valuation::Finite(v) => {
            if v >= need {
                Status::Pass
            } else {
                Status::Fail
            }
        }
        Valuation::AtLeast(w) => {
            if w >= need {
                Status::Pass
            } else {
                Status::Inconclusive
            }
        }
    }
}

/// The structure assertions in one bundle: functional equation, alpha
/// congruences, and lambda divisibility, with tri-state verdicts.
pub struct StructureAssessment {
    pub fs: dworkmill::cartier::FrobeniusStructure,
    pub feq: bool,
    pub alpha_status: Status,
    pub lambda_status: Status,
    pub lambda_vals: Vec<String>,
    pub status: Status,
}

pub fn assess_structure(
    family: &FamilyData,
    p: u64,
    precision: u32,
    terms: usize,
) -> Result<StructureAssessment, String> {
    let fs = frobenius_structure(family, p, precision, terms).map_err(core_err)?;
    let f0 = constant_term_series(&family.g, &family.polytope, terms)
        .map(|c| BigRational::from_integer(c.clone()));
    let feq = verify_frobenius_equation(&fs, &f0, p, precision, terms).map_err(core_err)?;

    // alpha_0 = 1 and alpha_1 = 0 hold modulo p^N.
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let a0_dev = fs.alpha[0].clone() + PadicScalar::from_rational(&minus_one, p, precision);
    let mut alpha_status = tri_ge(&a0_dev, precision as i64);
    if fs.alpha.len() > 1 {
        alpha_status = alpha_status.and(tri_ge(&fs.alpha[1], precision as i64));
    }

    // ord_p lambda_i >= i, coefficientwise.
    let mut lambda_status = Status::Pass;
    let mut lambda_vals = Vec::new();
    for (i, lam) in fs.lambda.iter().enumerate() {
        let (bound, attained) = series_order_bound(lam);
        lambda_vals.push(render_order_bound(bound, attained));
        let need = i as i64;
        match bound {
            None => {}
            Some(b) if b >= need => {}
            Some(_) if attained => lambda_status = lambda_status.and(Status::Fail),
            Some(_) => lambda_status = lambda_status.and(Status::Inconclusive),
        }
    }

    let status = alpha_status
        .and(lambda_status)
        .and(if feq { Status::Pass } else { Status::Fail });
    Ok(StructureAssessment {
        fs,
        feq,
        alpha_status,
        lambda_status,
        lambda_vals,
        status,
    })
}

pub fn frobenius_structure_cmd(
    family: &FamilyData,
    p: u64,
    precision: u32,
    terms: usize,
    extended: bool,
    fmt: Format,
) -> Result<Report, String> {
    let n = family.g.dimension();
    if n >= 4 && !extended {
        return Err(format!(
            "dimension {} is a long-running tier; pass `--extended` to opt in",
            n
        ));
    }
    if extended {
        eprintln!(
            "computing Frobenius structure: family {}, p = {}, N = {}, M = {} ...",
            family.name, p, precision, terms
        );
    }
    let a = assess_structure(family, p, precision, terms)?;
    if extended {
        eprintln!("functional equation verified: {}", a.feq);
    }
    let StructureAssessment {
        fs,
        feq,
        alpha_status,
        lambda_status,
        lambda_vals,
        status,
    } = a;
    let alpha_strings: Vec<String> = fs.alpha.iter().map(|a| a.to_string()).collect();

    let data = match fmt {
        Format::Json => json_doc(&json!({
            "command": "frobenius-structure",
            "family": family.name,
            "n": n,
            "p": p,
            "N": precision,
            "M": terms,
            "alpha": alpha_strings,
            "alpha_congruences": alpha_status.label(),
            "lambda_valuations": lambda_vals,
            "lambda_divisibility": lambda_status.label(),
            "functional_equation": feq,
            "status": status.label(),
        })),
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "frobenius-structure");
            doc.meta("family", &family.name);
            doc.meta("n", n);
            doc.meta("p", p);
            doc.meta("N", precision);
            doc.meta("M", terms);
            doc.meta("functional-equation", feq);
            doc.meta("alpha-congruences", alpha_status.label());
            doc.meta("lambda-divisibility", lambda_status.label());
            doc.meta("status", status.label());
            doc.header(&["i", "alpha", "lambda_valuation"]);
            for i in 0..fs.alpha.len() {
                doc.row(vec![
                    i.to_string(),
                    alpha_strings[i].clone(),
                    lambda_vals[i].clone(),
                ]);
            }
            doc.finish()
        }
    };
    Ok(Report { data, status })
}

// ---------------------------------------------------------------------------
// derive-pf
// ---------------------------------------------------------------------------

pub fn derive_pf_cmd(
    family: &FamilyData,
    window: usize,
    fmt: Format,
) -> Result<Report, String> {
    let n = family.g.dimension();
    let op = derive_picard_fuchs(family, window).map_err(core_err)?;
    let data = match fmt {
        Format::Json => json_doc(&json!({
            "command": "derive-pf",
            "family": family.name,
            "n": n,
            "window": window,
            "precision": "exact-rational",
            // The "operator" member is itself a valid operator input file.
            "operator": op.to_json(),
        })),
        Format::Tsv => {
            let mut doc = TsvDoc::new();
            doc.meta("command", "derive-pf");
            doc.meta("family", &family.name);
            doc.meta("n", n);
            doc.meta("window", window);
            doc.meta("operator-order", op.order());
            doc.meta("precision", "exact rational");
            doc.header(&["theta_power", "t_power", "coefficient"]);
            for (j, poly) in op.coeff_polys().iter().enumerate() {
                for (t, c) in poly.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        doc.row(vec![j.to_string(), t.to_string(), rat(c)]);
                    }
                }
            }
            doc.finish()
        }
    };
    Ok(Report {
        data,
        status: Status::Pass,
    })
}
