//! End-to-end acceptance gate.  One test per headline criterion; the test
//! harness emits exactly one pass/fail line for each, and every test
//! asserts its stated runtime budget and prints a timed detail line
//! (visible with `--nocapture`).
//!
//! The quintic pipeline is validated against an independent brute-force
//! oracle written before the assertions it feeds: a direct coefficient
//! recursion in Q[eps]/(eps^3), entirely separate from the library's
//! generic Frobenius solver, plus a full re-run of the invariant chain at
//! doubled truncation.

mod common;

use std::time::{Duration, Instant};

use dworkmill::cartier::{frobenius_structure, verify_frobenius_equation};
use dworkmill::diffop::ThetaOperator;
use dworkmill::geometry::{build_family, constant_term_series, FamilyData, FamilySpec};
use dworkmill::hassewitt::{hw_block_check, hw_condition};
use dworkmill::mirror::{
    check_integrality, dieudonne_dwork_verdicts, exp_ratio, mirror_pipeline,
    series_integrality_verdicts, PrimeVerdict,
};
use dworkmill::padic::{IntegralityVerdict, PadicScalar, Valuation};
use dworkmill::reduce::derive_picard_fuchs;
use dworkmill::QSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Independent oracle for the quintic solutions (written first)
// ---------------------------------------------------------------------------

type Eps = [BigRational; 3];

fn eps_mul(a: &Eps, b: &Eps) -> Eps {
    [
        &a[0] * &b[0],
        &a[0] * &b[1] + &a[1] * &b[0],
        &a[0] * &b[2] + &a[1] * &b[1] + &a[2] * &b[0],
    ]
}

/// F_0, F_1, F_2 of the quintic operator by direct recursion, working in
/// Q[eps]/(eps^3): with c_0 = 1 and
///
///   c_m (m + eps)^4 = 5 (5eps + 5m - 4)(5eps + 5m - 3)(5eps + 5m - 2)(5eps + 5m - 1) c_{m-1},
///
/// the solution t^eps sum c_m(eps) t^m expands as
/// sum_j (log t)^j / j! sum_m [eps^j] c_m t^m, so F_j[m] = [eps^j] c_m.
fn quintic_solutions_by_direct_recursion(order: usize) -> [Vec<BigRational>; 3] {
    let mut f: [Vec<BigRational>; 3] = [
        Vec::with_capacity(order),
        Vec::with_capacity(order),
        Vec::with_capacity(order),
    ];
    let mut c: Eps = [BigRational::one(), BigRational::zero(), BigRational::zero()];
    for j in 0..3 {
        f[j].push(c[j].clone());
    }
    let five = BigRational::from_integer(BigInt::from(5));
    for m in 1..order {
        let mut rhs = c.clone();
        for k in 1..=4i64 {
            let lin: Eps = [
                BigRational::from_integer(BigInt::from(5 * m as i64 - k)),
                five.clone(),
                BigRational::zero(),
            ];
            rhs = eps_mul(&rhs, &lin);
        }
        for x in rhs.iter_mut() {
            *x *= &five;
        }
        // Divide by (m + eps)^4 = m^4 (1 + eps/m)^4:
        // inverse is m^(-4) (1 - 4 eps/m + 10 eps^2/m^2).
        let m_inv = BigRational::new(BigInt::one(), BigInt::from(m));
        let m4_inv = &m_inv * &m_inv * &m_inv * &m_inv;
        let inv: Eps = [
            m4_inv.clone(),
            -BigRational::from_integer(BigInt::from(4)) * &m4_inv * &m_inv,
            BigRational::from_integer(BigInt::from(10)) * &m4_inv * &m_inv * &m_inv,
        ];
        c = eps_mul(&rhs, &inv);
        for j in 0..3 {
            f[j].push(c[j].clone());
        }
    }
    f
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

fn family(spec: FamilySpec) -> FamilyData {
    build_family(&spec).unwrap()
}

fn ct_series(fam: &FamilyData, order: usize) -> QSeries {
    constant_term_series(&fam.g, &fam.polytope, order)
        .map(|c| BigRational::from_integer(c.clone()))
}

fn operators_equal(a: &ThetaOperator, b: &ThetaOperator) -> bool {
    let (pa, pb) = (a.coeff_polys(), b.coeff_polys());
    if pa.len() != pb.len() {
        return false;
    }
    pa.iter().zip(pb).all(|(x, y)| {
        let n = x.coeffs().len().max(y.coeffs().len());
        (0..n).all(|i| {
            let cx = x.coeffs().get(i).cloned().unwrap_or_else(BigRational::zero);
            let cy = y.coeffs().get(i).cloned().unwrap_or_else(BigRational::zero);
            cx == cy
        })
    })
}

/// A valuation known for certain to be at least `need`.
fn valuation_at_least(v: Valuation, need: i64) -> bool {
    match v {
        Valuation::PlusInfinity => true,
        Valuation::Finite(x) => x >= need,
        Valuation::AtLeast(x) => x >= need,
    }
}

fn check_budget(name: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("{name}: PASS in {elapsed:.2?} (budget {budget:.0?})");
    assert!(
        elapsed <= budget,
        "{name} exceeded its runtime budget: {elapsed:.2?} > {budget:.0?}"
    );
}

/// Frobenius-structure assertions shared by the base and extended tiers:
/// ord_p lambda_i >= i, alpha_0 = 1, alpha_1 = 0 mod p^N, and the
/// functional equation sum_i (lambda_i / p^i) theta^i [F_0(t^p)] = F_0(t)
/// modulo (p^N, t^M).
fn assert_frobenius_structure(spec: FamilySpec, p: u64, prec: u32, order: usize) {
    let fam = family(spec);
    let fs = frobenius_structure(&fam, p, prec, order).unwrap();
    for (i, lam) in fs.lambda.iter().enumerate() {
        for (m, c) in lam.coeffs().iter().enumerate() {
            assert!(
                valuation_at_least(c.valuation(), i as i64),
                "{}: ord_p of lambda_{i} coefficient t^{m} not provably >= {i}",
                fam.name
            );
        }
    }
    let minus_one = PadicScalar::from_rational(
        &-BigRational::one(),
        p,
        prec + 1,
    );
    assert!(
        valuation_at_least((fs.alpha[0].clone() + minus_one).valuation(), prec as i64),
        "{}: alpha_0 is not 1 mod p^{prec}",
        fam.name
    );
    assert!(
        valuation_at_least(fs.alpha[1].valuation(), prec as i64),
        "{}: alpha_1 is not 0 mod p^{prec}",
        fam.name
    );
    let f0 = ct_series(&fam, order);
    assert!(
        verify_frobenius_equation(&fs, &f0, p, prec, order).unwrap(),
        "{}: Frobenius functional equation fails mod (p^{prec}, t^{order})",
        fam.name
    );
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_quintic_instanton_pipeline() {
    let start = Instant::now();
    let op = ThetaOperator::builtin("quintic").unwrap();

    // Oracle, part 1: the solver's F_0, F_1, F_2 match the direct recursion.
    let oracle = quintic_solutions_by_direct_recursion(42);
    let basis42 = op.frobenius_basis(42).unwrap();
    for j in 0..3 {
        assert_eq!(
            basis42.f(j).coeffs(),
            &oracle[j][..],
            "F_{j} differs from the direct recursion"
        );
    }

    // Oracle, part 2: the whole chain is stable under doubled truncation.
    let five = BigRational::from_integer(BigInt::from(5));
    let basis22 = op.frobenius_basis(22).unwrap();
    let md = mirror_pipeline(&basis22, 20, 3, &five).unwrap();
    let md_doubled = mirror_pipeline(&basis42, 40, 3, &five).unwrap();
    assert_eq!(
        &md_doubled.inst[..20],
        &md.inst[..],
        "a_1..a_20 changed when the truncation was doubled"
    );

    let expected: [i64; 5] = [2_875, 609_250, 317_206_375, 242_467_530_000, 229_305_888_887_625];
    for (r, want) in expected.iter().enumerate() {
        assert_eq!(
            md.inst[r],
            BigRational::from_integer(BigInt::from(*want)),
            "a_{} has the wrong value",
            r + 1
        );
    }
    for (r, a) in md.inst.iter().enumerate() {
        assert!(a.is_integer(), "a_{} is not an integer", r + 1);
    }
    for p in [7u64, 11, 13] {
        let report = check_integrality(&md.a, 3, p, 40, 7);
        assert_eq!(
            report.verdict,
            PrimeVerdict::Pass,
            "A_r/r^3 fails {p}-integrality"
        );
    }
    check_budget("criterion 1 (quintic instanton pipeline)", start, Duration::from_secs(30));
}

#[test]
fn criterion_2_mirror_map_integrality_and_splitting_criterion() {
    let start = Instant::now();
    let op = ThetaOperator::builtin("quintic").unwrap();
    let basis = op.frobenius_basis(41).unwrap();
    let e = exp_ratio(basis.f(0), basis.f(1)).unwrap();
    let l = basis.f(1).div(basis.f(0)).unwrap();
    for p in [7u64, 11, 13] {
        let direct = series_integrality_verdicts(&e, p, 40);
        assert!(
            direct.iter().all(|v| *v == IntegralityVerdict::Integral),
            "exp(F_1/F_0) has a non-{p}-integral coefficient below t^41"
        );
        let splitting = dieudonne_dwork_verdicts(&l, p, 40).unwrap();
        assert_eq!(
            direct, splitting,
            "the splitting criterion disagrees with the direct verdicts at p = {p}"
        );
    }
    check_budget(
        "criterion 2 (mirror-map integrality, two criteria)",
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_3_picard_fuchs_derivation() {
    let start = Instant::now();
    for n in 2..=4usize {
        let fam = family(FamilySpec::Simplicial(n));
        let derived = derive_picard_fuchs(&fam, 2 * n + 16).unwrap();
        let closed = ThetaOperator::builtin(&format!("simplicial:{n}")).unwrap();
        assert!(
            operators_equal(&derived, &closed),
            "derived simplicial n = {n} operator differs from the closed form"
        );
    }
    let window = 24;
    let derived4 = derive_picard_fuchs(&family(FamilySpec::Hyperoctahedral(4)), window).unwrap();
    let diagonal = ThetaOperator::builtin("diagonal4").unwrap();
    assert_eq!(
        derived4.monic_series(window).unwrap(),
        diagonal.monic_series(window).unwrap(),
        "hyperoctahedral n = 4 disagrees with the benchmark diagonal operator"
    );
    for n in 2..=3usize {
        let fam = family(FamilySpec::Hyperoctahedral(n));
        let derived = derive_picard_fuchs(&fam, 2 * n + 16).unwrap();
        let ct = ct_series(&fam, 31);
        assert!(
            derived.apply_series(&ct).is_zero_series(),
            "hyperoctahedral n = {n} operator does not annihilate its period to t^30"
        );
    }
    check_budget("criterion 3 (Picard-Fuchs derivation)", start, Duration::from_secs(60));
}

#[test]
fn criterion_4_hasse_witt_condition_and_blocks() {
    let start = Instant::now();
    for n in [2usize, 3] {
        for spec in [FamilySpec::Simplicial(n), FamilySpec::Hyperoctahedral(n)] {
            let fam = family(spec);
            for k in 1..=n as u64 {
                assert!(
                    hw_condition(&fam, k, 7, 10).unwrap(),
                    "{}: Hasse-Witt condition fails at level {k}",
                    fam.name
                );
                let bc = hw_block_check(&fam, k, 7).unwrap();
                assert!(
                    bc.product_matches,
                    "{}: determinant at t = 0 is not the product of face blocks at level {k}",
                    fam.name
                );
                assert!(
                    bc.valuations_ok,
                    "{}: a face block has the wrong p-adic valuation at level {k}",
                    fam.name
                );
                assert!(bc.ok);
            }
        }
    }
    check_budget("criterion 4 (Hasse-Witt condition and blocks)", start, Duration::from_secs(120));
}

#[test]
fn criterion_5_frobenius_structure() {
    let start = Instant::now();
    for n in [2usize, 3] {
        assert_frobenius_structure(FamilySpec::Simplicial(n), 7, 3, 10);
        assert_frobenius_structure(FamilySpec::Hyperoctahedral(n), 7, 3, 10);
    }
    check_budget("criterion 5 (Frobenius structure, n = 2, 3)", start, Duration::from_secs(600));
}

/// Extended tier: the quintic family itself (n = 4).  Opt in with
/// `cargo test --test acceptance -- --ignored`.
#[test]
#[ignore = "long-running extended tier"]
fn criterion_5_extended_quintic_family() {
    assert_frobenius_structure(FamilySpec::Simplicial(4), 7, 3, 10);
    println!("criterion 5 extended (quintic family, n = 4): PASS");
}

#[test]
fn criterion_6_property_suites() {
    let start = Instant::now();
    common::series_ring_laws(120);
    common::reversion_round_trips(80);
    common::lambert_round_trips(100);
    common::degree_subadditivity_and_cone_criterion(500);
    common::reduction_soundness(20);
    common::cartier_theta_commutation(50);
    check_budget("criterion 6 (randomized property suites)", start, Duration::from_secs(120));
}

#[test]
fn criterion_7_simplicial_normalization() {
    let start = Instant::now();
    for n in [2usize, 3] {
        let op = ThetaOperator::builtin(&format!("simplicial:{n}")).unwrap();
        let basis = op.frobenius_basis(17).unwrap();
        let md = mirror_pipeline(&basis, 15, 2, &BigRational::one()).unwrap();
        let report = check_integrality(&md.a, 2, 7, 40, 5);
        assert_eq!(
            report.verdict,
            PrimeVerdict::Pass,
            "simplicial n = {n}: A_r/r^2 fails 7-integrality"
        );
    }
    check_budget("criterion 7 (A_r/r^2 normalization)", start, Duration::from_secs(30));
}
