//! Randomized property suites shared between the standalone property target
//! and the timed acceptance gate.  Every suite is deterministic (fixed RNG
//! seeds) and panics with context on the first violated case.

#![allow(dead_code)]

use dworkmill::cartier::cartier_pick;
use dworkmill::geometry::{
    build_family, constant_term_series, period_map, FamilyData, FamilySpec, PolytopeData,
};
use dworkmill::mirror::{lambert_coefficients, lambert_forward};
use dworkmill::normlaurent::NormLaurent;
use dworkmill::reduce::{reduce_hyperoctahedral, reduce_simplicial, AdmissibleForm, ReducedVector};
use dworkmill::series::TruncatedSeries;
use dworkmill::QSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(r: &mut ChaCha8Rng) -> BigRational {
    let num = r.gen_range(-9i64..=9);
    let den = r.gen_range(1i64..=4);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_series(r: &mut ChaCha8Rng, order: usize) -> QSeries {
    let coeffs = (0..order).map(|_| small_rational(r)).collect();
    TruncatedSeries::from_coeffs(coeffs)
}

// ---------------------------------------------------------------------------
// Series ring laws and reversion round trips
// ---------------------------------------------------------------------------

/// Commutativity, associativity, distributivity, identities and the theta
/// derivation rule on random rational series triples.
pub fn series_ring_laws(cases: usize) {
    let mut r = rng(0xA11C_E001);
    for case in 0..cases {
        let order = r.gen_range(6..=10);
        let a = random_series(&mut r, order);
        let b = random_series(&mut r, order);
        let c = random_series(&mut r, order);
        let one = TruncatedSeries::one_series(order);
        let zero = TruncatedSeries::zero_series(order);
        assert_eq!(a.mul(&b), b.mul(&a), "commutativity, case {case}");
        assert_eq!(
            a.mul(&b).mul(&c),
            a.mul(&b.mul(&c)),
            "associativity, case {case}"
        );
        assert_eq!(
            a.add(&b).add(&c),
            a.add(&b.add(&c)),
            "additive associativity, case {case}"
        );
        assert_eq!(
            a.mul(&b.add(&c)),
            a.mul(&b).add(&a.mul(&c)),
            "distributivity, case {case}"
        );
        assert_eq!(a.mul(&one), a, "multiplicative identity, case {case}");
        assert_eq!(a.add(&zero), a, "additive identity, case {case}");
        assert!(
            a.sub(&a).is_zero_series(),
            "additive inverse, case {case}"
        );
        assert_eq!(
            a.mul(&b).theta(),
            a.theta().mul(&b).add(&a.mul(&b.theta())),
            "theta is a derivation, case {case}"
        );
    }
}

/// Two-sided compositional round trips for reversion, with every case also
/// checked against the Lagrange inversion formula
/// [q^k] s^(-1) = (1/k) [t^(k-1)] (t/s)^k.
pub fn reversion_round_trips(cases: usize) {
    let mut r = rng(0xA11C_E002);
    for case in 0..cases {
        let order = r.gen_range(6..=10);
        let mut coeffs = vec![BigRational::zero(), BigRational::one()];
        for _ in 2..order {
            let c = if case % 2 == 0 {
                BigRational::from_integer(BigInt::from(r.gen_range(-9i64..=9)))
            } else {
                small_rational(&mut r)
            };
            coeffs.push(c);
        }
        let s: QSeries = TruncatedSeries::from_coeffs(coeffs);
        let inv = s.revert().expect("unit linear coefficient");
        let id = TruncatedSeries::t_series(order);
        assert_eq!(
            s.compose(&inv).unwrap(),
            id,
            "s o s^(-1) = id, case {case}"
        );
        assert_eq!(
            inv.compose(&s).unwrap(),
            id,
            "s^(-1) o s = id, case {case}"
        );
        // Lagrange inversion oracle.
        let t_over_s = s.shift_div_t(1).unwrap().try_inv().unwrap();
        let mut power = TruncatedSeries::one_series(order);
        for k in 1..order {
            power = power.mul(&t_over_s);
            let predicted = power.coeff(k - 1) / BigRational::from_integer(BigInt::from(k));
            assert_eq!(
                *inv.coeff(k),
                predicted,
                "Lagrange inversion at q^{k}, case {case}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Lambert / Moebius round trips
// ---------------------------------------------------------------------------

/// lambert_coefficients and the forward Lambert sum are mutually inverse on
/// random integer data, in both directions.
pub fn lambert_round_trips(cases: usize) {
    let mut r = rng(0xA11C_E003);
    for case in 0..cases {
        let len = r.gen_range(10..=30);
        let g: Vec<BigRational> = (0..len)
            .map(|_| BigRational::from_integer(BigInt::from(r.gen_range(-50i64..=50))))
            .collect();
        let a = lambert_coefficients(&g);
        assert_eq!(
            lambert_forward(&a),
            g,
            "forward o inverse = id, case {case}"
        );
        let g2 = lambert_forward(&g);
        assert_eq!(
            lambert_coefficients(&g2),
            g,
            "inverse o forward = id, case {case}"
        );
    }
}

// ---------------------------------------------------------------------------
// Degree subadditivity and the cone criterion
// ---------------------------------------------------------------------------

/// Solves V c = w over the rationals, columns of V being the facet's
/// vertices.  Builtin facets carry exactly n vertices forming a basis.
fn solve_in_vertex_basis(vertices: &[&Vec<i64>], w: &[i64]) -> Option<Vec<BigRational>> {
    let n = w.len();
    if vertices.len() != n {
        return None;
    }
    // Augmented matrix [V | w], Gaussian elimination.
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|row| {
            let mut line: Vec<BigRational> = (0..n)
                .map(|col| BigRational::from_integer(BigInt::from(vertices[col][row])))
                .collect();
            line.push(BigRational::from_integer(BigInt::from(w[row])));
            line
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&row| !m[row][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for row in 0..n {
            if row != col && !m[row][col].is_zero() {
                let factor = m[row][col].clone();
                for c in col..=n {
                    let sub = &factor * &m[col][c];
                    m[row][c] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|line| line[n].clone()).collect())
}

fn builtin_polytopes(ns: &[usize]) -> Vec<(String, PolytopeData)> {
    let mut out = Vec::new();
    for &n in ns {
        for spec in [FamilySpec::Simplicial(n), FamilySpec::Hyperoctahedral(n)] {
            let fam = build_family(&spec).unwrap();
            out.push((fam.name.clone(), fam.polytope));
        }
    }
    out
}

/// deg(u+v) <= deg(u) + deg(v), and per facet tau:
/// deg(w) = l_tau(w) exactly when w is a nonnegative combination of tau's
/// vertices (cone membership decided independently by a linear solve).
pub fn degree_subadditivity_and_cone_criterion(cases_per_family: usize) {
    let mut r = rng(0xA11C_E004);
    for (name, polytope) in builtin_polytopes(&[2, 3, 4]) {
        let n = polytope.dimension();
        let vertices = polytope.vertices();
        for case in 0..cases_per_family {
            let u: Vec<i64> = (0..n).map(|_| r.gen_range(-15i64..=15)).collect();
            let v: Vec<i64> = (0..n).map(|_| r.gen_range(-15i64..=15)).collect();
            let sum: Vec<i64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            assert!(
                polytope.degree(&sum) <= polytope.degree(&u) + polytope.degree(&v),
                "degree subadditivity, {name}, case {case}"
            );
            let w = &u;
            let deg = polytope.degree(w);
            for (fi, facet) in polytope.facets().iter().enumerate() {
                let ell: i64 = facet.iter().zip(w).map(|(a, b)| a * b).sum();
                let on_facet: Vec<&Vec<i64>> = vertices
                    .iter()
                    .filter(|v| facet.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<i64>() == 1)
                    .collect();
                let coords = solve_in_vertex_basis(&on_facet, w)
                    .unwrap_or_else(|| panic!("facet {fi} of {name} is not a simplex basis"));
                let in_cone = coords.iter().all(|c| *c >= BigRational::zero());
                assert_eq!(
                    ell == deg,
                    in_cone,
                    "cone criterion, {name}, facet {fi}, w = {w:?}"
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Reduction soundness via the period-map oracle
// ---------------------------------------------------------------------------

fn random_admissible_form(
    r: &mut ChaCha8Rng,
    family: &FamilyData,
    order: usize,
    max_pole: usize,
) -> AdmissibleForm<BigRational> {
    let n = family.polytope.dimension();
    let mut form = AdmissibleForm::new(n, order, 1);
    let terms = r.gen_range(1..=2);
    for _ in 0..terms {
        let pole = r.gen_range(1..=max_pole);
        let support = family.polytope.lattice_points(pole as i64 - 1);
        let mut nl = NormLaurent::new(n, order);
        for _ in 0..r.gen_range(1..=3) {
            let u = support[r.gen_range(0..support.len())].clone();
            let mut coeffs = vec![BigRational::zero(); order];
            for c in coeffs.iter_mut().take(4.min(order)) {
                *c = small_rational(r);
            }
            nl.accumulate(u, &TruncatedSeries::from_coeffs(coeffs));
        }
        form.add_term(pole, nl, &family.polytope)
            .expect("support sampled inside (pole-1) Delta");
    }
    form
}

fn period_of_form(
    form: &AdmissibleForm<BigRational>,
    family: &FamilyData,
    order: usize,
) -> QSeries {
    let mut acc = TruncatedSeries::zero_series(order);
    for rf in form.rational_forms(&family.polytope) {
        acc = acc.add(&period_map(&rf, family, order));
    }
    acc
}

fn apply_reduced(b: &ReducedVector<BigRational>, f0: &QSeries) -> QSeries {
    let mut acc = TruncatedSeries::zero_series(f0.order());
    let mut th = f0.clone();
    for bj in &b.b {
        acc = acc.add(&bj.mul(&th));
        th = th.theta();
    }
    acc
}

/// For random admissible forms omega, the reduction output b satisfies
/// sum_j b_j theta^j (F_0) = period(omega): the period map kills every
/// derivative discarded by the reduction.
pub fn reduction_soundness(forms_per_family: usize) {
    let mut r = rng(0xA11C_E005);
    let order = 10;
    for n in [2usize, 3] {
        for spec in [FamilySpec::Simplicial(n), FamilySpec::Hyperoctahedral(n)] {
            let family = build_family(&spec).unwrap();
            let f0: QSeries = constant_term_series(&family.g, &family.polytope, order)
                .map(|c| BigRational::from_integer(c.clone()));
            for case in 0..forms_per_family {
                let form = random_admissible_form(&mut r, &family, order, n + 1);
                let b = match spec {
                    FamilySpec::Simplicial(_) => reduce_simplicial(&form).unwrap(),
                    _ => reduce_hyperoctahedral(&form, true).unwrap(),
                };
                let got = apply_reduced(&b, &f0);
                let oracle = period_of_form(&form, &family, order);
                assert!(
                    got.sub(&oracle).is_zero_series(),
                    "period oracle mismatch, {}, case {case}",
                    family.name
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cartier-theta commutation
// ---------------------------------------------------------------------------

fn theta_i(nl: &NormLaurent<BigInt>, i: usize) -> NormLaurent<BigInt> {
    let mut out = NormLaurent::new(nl.dimension(), nl.order());
    for (u, c) in nl.terms() {
        out.accumulate(u.clone(), &c.mul_i64(u[i]));
    }
    out
}

/// C(theta_i h) = p theta_i C(h) on random exponent tables over the builtin
/// polytopes, for every coordinate direction.
pub fn cartier_theta_commutation(cases: usize) {
    let mut r = rng(0xA11C_E006);
    let configs = [
        (FamilySpec::Simplicial(2), 3u64),
        (FamilySpec::Hyperoctahedral(2), 5),
        (FamilySpec::Simplicial(3), 7),
        (FamilySpec::Hyperoctahedral(3), 3),
        (FamilySpec::Simplicial(2), 5),
    ];
    let order = 10;
    for case in 0..cases {
        let (spec, p) = &configs[case % configs.len()];
        let p = *p;
        let family = build_family(spec).unwrap();
        let n = family.polytope.dimension();
        let mut nl: NormLaurent<BigInt> = NormLaurent::new(n, order);
        for j in 0..6 {
            let u: Vec<i64> = if j % 2 == 0 {
                // Multiples of p survive the pick; force some.
                (0..n).map(|_| p as i64 * r.gen_range(-2i64..=2)).collect()
            } else {
                (0..n).map(|_| r.gen_range(-(2 * p as i64)..=2 * p as i64)).collect()
            };
            let k = r.gen_range(0..4usize);
            let c = BigInt::from(r.gen_range(-9i64..=9));
            nl.accumulate(u, &TruncatedSeries::monomial(order, k, c));
        }
        for i in 0..n {
            let lhs = cartier_pick(&theta_i(&nl, i), p, &family.polytope);
            let rhs = theta_i(&cartier_pick(&nl, p, &family.polytope), i);
            let mut scaled = NormLaurent::new(n, order);
            for (u, c) in rhs.terms() {
                scaled.accumulate(u.clone(), &c.mul_i64(p as i64));
            }
            let diff = lhs.sub(&scaled);
            assert!(
                diff.terms().all(|(_, c)| c.is_zero_series()),
                "Cartier-theta commutation, {}, p = {p}, direction {i}, case {case}",
                family.name
            );
        }
    }
}
