//! Laurent polynomials, reflexive Newton-polytope data, the degree function,
//! admissibility, the builtin families, and the period (constant-term) map.
//!
//! A polytope is given by explicit facet functionals l_tau normalized so that
//! l_tau = 1 on the facet; reflexivity means every vertex attains maximum 1
//! and the origin is the unique interior lattice point. The degree of a
//! lattice point u is deg u = max_tau l_tau(u), the smallest d with
//! u in d*Delta.
//!
//! The two builtin families are
//!   simplicial:      g = x_1 + ... + x_n + 1/(x_1...x_n),
//!   hyperoctahedral: g = x_1 + 1/x_1 + ... + x_n + 1/x_n,
//! with f = 1 - t g. The period map sends (k-1)! A / f^k to the x-constant
//! term of its geometric-series expansion in t; it kills theta_i-derivatives
//! and sends 1/f to the holomorphic period.

use crate::error::Error;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A finitely supported Laurent polynomial over a scalar ring.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<C> {
    n: usize,
    terms: BTreeMap<Vec<i64>, C>,
}

impl<C: Scalar> LaurentPoly<C> {
    pub fn new(n: usize) -> Self {
        LaurentPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<i64>, C)>) -> Self {
        let mut p = Self::new(n);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn constant(n: usize, c: C) -> Self {
        Self::from_terms(n, [(vec![0; n], c)])
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, e: &[i64]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    /// Adds c * x^e, dropping the entry if the sum vanishes.
    pub fn add_term(&mut self, e: Vec<i64>, c: C) {
        assert_eq!(e.len(), self.n, "exponent dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::new(self.n);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_pruned(other, |_| true)
    }

    /// Product keeping only exponents accepted by the filter; the key
    /// performance lever for constant-term extraction.
    pub fn mul_pruned(&self, other: &Self, keep: impl Fn(&[i64]) -> bool) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::new(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if keep(&e) {
                    out.add_term(e, c1.clone() * c2.clone());
                }
            }
        }
        out
    }

    /// theta_i = x_i d/dx_i: multiplies each coefficient by its exponent u_i.
    pub fn theta(&self, i: usize) -> Self {
        let mut out = Self::new(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul_i64(e[i]));
        }
        out
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        let mut out = LaurentPoly::new(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

/// Laurent polynomial whose coefficients are truncated t-series.
pub type SeriesLaurent<C> = LaurentPoly<SeriesCoeff<C>>;

/// Newtype so a truncated series can sit in a Laurent coefficient slot.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoeff<C>(pub TruncatedSeries<C>);

impl<C: Scalar> std::ops::Add for SeriesCoeff<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        SeriesCoeff(self.0.add(&o.0))
    }
}
impl<C: Scalar> std::ops::Sub for SeriesCoeff<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        SeriesCoeff(self.0.sub(&o.0))
    }
}
impl<C: Scalar> std::ops::Mul for SeriesCoeff<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        SeriesCoeff(self.0.mul(&o.0))
    }
}
impl<C: Scalar> std::ops::Neg for SeriesCoeff<C> {
    type Output = Self;
    fn neg(self) -> Self {
        SeriesCoeff(self.0.neg())
    }
}
impl<C: Scalar> num_traits::Zero for SeriesCoeff<C> {
    fn zero() -> Self {
        // Order-1 zero; binary ops truncate to the smaller operand order, so
        // this placeholder is only safe where a real order is reimposed.
        SeriesCoeff(TruncatedSeries::zero_series(1))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero_series()
    }
}
impl<C: Scalar> num_traits::One for SeriesCoeff<C> {
    fn one() -> Self {
        SeriesCoeff(TruncatedSeries::one_series(1))
    }
}
impl<C: Scalar> Scalar for SeriesCoeff<C> {
    fn from_i64(n: i64) -> Self {
        SeriesCoeff(TruncatedSeries::monomial(1, 0, C::from_i64(n)))
    }
    fn try_inv(&self) -> Option<Self> {
        self.0.try_inv().ok().map(SeriesCoeff)
    }
    fn exact_div_i64(&self, k: i64) -> Option<Self> {
        let coeffs: Option<Vec<C>> = self.0.coeffs().iter().map(|c| c.exact_div_i64(k)).collect();
        coeffs.map(|c| SeriesCoeff(TruncatedSeries::from_coeffs(c)))
    }
    // The default would multiply by the order-1 series from_i64(n) and
    // truncate; scale coefficientwise instead, preserving the order.
    fn mul_i64(&self, n: i64) -> Self {
        SeriesCoeff(self.0.mul_i64(n))
    }
}

/// A reflexive polytope given by vertices and facet functionals.
#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeData {
    n: usize,
    vertices: Vec<Vec<i64>>,
    facets: Vec<Vec<i64>>,
}

impl PolytopeData {
    pub fn new(n: usize, vertices: Vec<Vec<i64>>, facets: Vec<Vec<i64>>) -> Result<Self> {
        let p = PolytopeData {
            n,
            vertices,
            facets,
        };
        p.verify_reflexive()?;
        Ok(p)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<i64>] {
        &self.facets
    }

    fn dot(l: &[i64], u: &[i64]) -> i64 {
        l.iter().zip(u).map(|(a, b)| a * b).sum()
    }

    /// deg u = max_tau l_tau(u): the smallest d with u in d*Delta.
    pub fn degree(&self, u: &[i64]) -> i64 {
        self.facets
            .iter()
            .map(|l| Self::dot(l, u))
            .max()
            .expect("polytope has facets")
    }

    /// Facet functionals attaining the degree (the cone(s) containing u).
    pub fn argmax_facets(&self, u: &[i64]) -> Vec<usize> {
        let d = self.degree(u);
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, l)| Self::dot(l, u) == d)
            .map(|(i, _)| i)
            .collect()
    }

    fn verify_reflexive(&self) -> Result<()> {
        if self.vertices.is_empty() || self.facets.is_empty() {
            return Err(Error::InvalidFamily("polytope needs vertices and facets".into()));
        }
        for v in &self.vertices {
            if v.len() != self.n {
                return Err(Error::InvalidFamily("vertex dimension mismatch".into()));
            }
            if self.degree(v) != 1 {
                return Err(Error::InvalidFamily(format!(
                    "vertex {:?} does not lie on the boundary of Delta",
                    v
                )));
            }
        }
        for (i, l) in self.facets.iter().enumerate() {
            if l.len() != self.n {
                return Err(Error::InvalidFamily("facet dimension mismatch".into()));
            }
            if !self.vertices.iter().any(|v| Self::dot(l, v) == 1) {
                return Err(Error::InvalidFamily(format!(
                    "facet functional #{} touches no vertex",
                    i
                )));
            }
        }
        // Reflexivity: the origin is the unique interior lattice point.
        let interior: Vec<_> = self
            .lattice_points(1)
            .into_iter()
            .filter(|u| self.facets.iter().all(|l| Self::dot(l, u) < 1))
            .collect();
        if interior != vec![vec![0i64; self.n]] {
            return Err(Error::InvalidFamily(format!(
                "interior lattice points are {:?}, expected only the origin",
                interior
            )));
        }
        Ok(())
    }

    /// All lattice points of k*Delta, in lexicographic order.
    pub fn lattice_points(&self, k: i64) -> Vec<Vec<i64>> {
        assert!(k >= 0);
        let lo: Vec<i64> = (0..self.n)
            .map(|i| k * self.vertices.iter().map(|v| v[i]).min().unwrap())
            .collect();
        let hi: Vec<i64> = (0..self.n)
            .map(|i| k * self.vertices.iter().map(|v| v[i]).max().unwrap())
            .collect();
        let mut out = vec![];
        let mut cur = lo.clone();
        'outer: loop {
            if self.degree(&cur) <= k {
                out.push(cur.clone());
            }
            // Lexicographic increment from the last coordinate.
            for i in (0..self.n).rev() {
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    for (c, l) in cur.iter_mut().skip(i + 1).zip(lo.iter().skip(i + 1)) {
                        *c = *l;
                    }
                    continue 'outer;
                }
            }
            break;
        }
        out
    }
}

/// Builtin family selector.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Simplicial(usize),
    Hyperoctahedral(usize),
    Custom {
        g: LaurentPoly<BigInt>,
        polytope: PolytopeData,
    },
}

impl FamilySpec {
    /// Parses "simplicial:n" / "hyperoctahedral:n".
    pub fn parse(name: &str) -> Result<FamilySpec> {
        if let Some(ns) = name.strip_prefix("simplicial:") {
            let n = ns
                .parse()
                .map_err(|_| Error::InvalidFamily(format!("bad dimension in {:?}", name)))?;
            return Ok(FamilySpec::Simplicial(n));
        }
        if let Some(ns) = name.strip_prefix("hyperoctahedral:") {
            let n = ns
                .parse()
                .map_err(|_| Error::InvalidFamily(format!("bad dimension in {:?}", name)))?;
            return Ok(FamilySpec::Hyperoctahedral(n));
        }
        Err(Error::InvalidFamily(format!("unknown family {:?}", name)))
    }
}

/// A family: Laurent polynomial g, its Newton polytope, and symmetry order.
#[derive(Clone, Debug)]
pub struct FamilyData {
    pub name: String,
    pub g: LaurentPoly<BigInt>,
    pub polytope: PolytopeData,
    /// Order of the monomial symmetry group preserving g.
    pub symmetry_order: u64,
}

/// Builds g, the polytope, and the symmetry order for a family; f = 1 - t g
/// is available via [`FamilyData::f_series`].
pub fn build_family(spec: &FamilySpec) -> Result<FamilyData> {
    match spec {
        FamilySpec::Simplicial(n) => {
            let n = *n;
            if n < 2 {
                return Err(Error::InvalidFamily("simplicial family needs n >= 2".into()));
            }
            let mut verts: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect();
            verts.push(vec![-1; n]);
            let mut facets = vec![vec![1i64; n]];
            for i in 0..n {
                let mut l = vec![1i64; n];
                l[i] = -(n as i64);
                facets.push(l);
            }
            let g = LaurentPoly::from_terms(
                n,
                verts.iter().map(|v| (v.clone(), BigInt::one())),
            );
            Ok(FamilyData {
                name: format!("simplicial:{}", n),
                g,
                polytope: PolytopeData::new(n, verts, facets)?,
                symmetry_order: factorial(n as u64 + 1),
            })
        }
        FamilySpec::Hyperoctahedral(n) => {
            let n = *n;
            if n < 2 {
                return Err(Error::InvalidFamily(
                    "hyperoctahedral family needs n >= 2".into(),
                ));
            }
            let mut verts = vec![];
            for i in 0..n {
                for s in [1i64, -1] {
                    let mut v = vec![0i64; n];
                    v[i] = s;
                    verts.push(v);
                }
            }
            let mut facets = vec![];
            for mask in 0..(1u32 << n) {
                facets.push(
                    (0..n)
                        .map(|i| if mask >> i & 1 == 1 { -1i64 } else { 1 })
                        .collect(),
                );
            }
            let g = LaurentPoly::from_terms(
                n,
                verts.iter().map(|v| (v.clone(), BigInt::one())),
            );
            Ok(FamilyData {
                name: format!("hyperoctahedral:{}", n),
                g,
                polytope: PolytopeData::new(n, verts, facets)?,
                symmetry_order: (1u64 << n) * factorial(n as u64),
            })
        }
        FamilySpec::Custom { g, polytope } => {
            for u in g.support() {
                if polytope.degree(u) > 1 {
                    return Err(Error::InvalidFamily(format!(
                        "g has a monomial {:?} outside Delta",
                        u
                    )));
                }
            }
            Ok(FamilyData {
                name: "custom".into(),
                g: g.clone(),
                polytope: polytope.clone(),
                symmetry_order: 1,
            })
        }
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

impl FamilyData {
    /// f = 1 - t g with coefficients as t-series of the given order.
    pub fn f_series(&self, order: usize) -> SeriesLaurent<BigRational> {
        let n = self.g.dimension();
        let mut f = LaurentPoly::new(n);
        f.add_term(
            vec![0; n],
            SeriesCoeff(TruncatedSeries::one_series(order)),
        );
        for (e, c) in self.g.terms() {
            let coeff = BigRational::from_integer(-c.clone());
            f.add_term(
                e.clone(),
                SeriesCoeff(TruncatedSeries::monomial(order, 1, coeff)),
            );
        }
        f
    }

    /// Smallest prime satisfying the integrality-theorem hypotheses: the
    /// symmetry order and the relevant binomials must be p-units.
    pub fn min_prime(&self) -> u64 {
        let bound = match self.name.split(':').next().unwrap_or("") {
            "simplicial" => self.g.dimension() as u64 + 1,
            "hyperoctahedral" => self.g.dimension() as u64,
            _ => 1,
        };
        let mut p = (bound + 1).max(3);
        while !is_prime(p) {
            p += 1;
        }
        p
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A rational form (k-1)! A / f^k with series-coefficient numerator A.
#[derive(Clone, Debug)]
pub struct RationalForm<C> {
    pub pole_order: usize,
    pub numerator: SeriesLaurent<C>,
}

impl<C: Scalar> RationalForm<C> {
    pub fn new(pole_order: usize, numerator: SeriesLaurent<C>) -> Self {
        assert!(pole_order >= 1);
        RationalForm {
            pole_order,
            numerator,
        }
    }

    /// theta_i of the form, rewritten over the pole order k+1:
    /// theta_i((k-1)! A/f^k) = k! (theta_i(A) f / k - A theta_i(f)) / f^(k+1).
    pub fn theta_form(&self, i: usize, f: &SeriesLaurent<C>) -> Result<RationalForm<C>> {
        let k = self.pole_order as i64;
        let ta_f = self.numerator.theta(i).mul(f);
        let mut num = LaurentPoly::new(self.numerator.dimension());
        for (e, c) in ta_f.terms() {
            let d = c.exact_div_i64(k).ok_or_else(|| {
                Error::NotInvertible(format!("coefficient ring cannot divide by {}", k))
            })?;
            num.add_term(e.clone(), d);
        }
        let af = self.numerator.mul(&f.theta(i));
        for (e, c) in af.terms() {
            num.add_term(e.clone(), -c.clone());
        }
        Ok(RationalForm::new(self.pole_order + 1, num))
    }
}

/// Admissibility: support in k*Delta and ord_t(a_u) >= deg(u) for each term.
pub fn is_admissible<C: Scalar>(
    a: &SeriesLaurent<C>,
    k: i64,
    polytope: &PolytopeData,
) -> bool {
    a.terms().all(|(u, c)| {
        let d = polytope.degree(u);
        if d > k {
            return false;
        }
        match c.0.valuation() {
            None => true, // zero series: order +infinity
            Some(v) => v as i64 >= d,
        }
    })
}

/// Constant term of g^m for m < order, as SUM g_m t^m.
pub fn constant_term_series(
    g: &LaurentPoly<BigInt>,
    polytope: &PolytopeData,
    order: usize,
) -> TruncatedSeries<BigInt> {
    let n = g.dimension();
    let mut out = TruncatedSeries::zero_series(order);
    let mut pw = LaurentPoly::constant(n, BigInt::one());
    for m in 0..order {
        out.set_coeff(m, pw.get(&vec![0; n]));
        if m + 1 == order {
            break;
        }
        // A monomial v can still cancel to the origin only if deg(-v) more
        // factors fit in the remaining budget.
        let budget = (order - 1 - (m + 1)) as i64;
        let neg = |e: &[i64]| e.iter().map(|x| -x).collect::<Vec<_>>();
        pw = pw.mul_pruned(g, |e| polytope.degree(&neg(e)) <= budget);
    }
    out
}

/// The period map: x-constant term of the t-adic expansion of
/// (k-1)! A / f^k = (k-1)! A SUM_m binom(m+k-1, m) t^m g^m.
///
/// Derivative forms theta_i(omega) are annihilated; 1/f gives the
/// holomorphic period series.
pub fn period_map(
    form: &RationalForm<BigRational>,
    family: &FamilyData,
    order: usize,
) -> TruncatedSeries<BigRational> {
    let n = family.g.dimension();
    let polytope = &family.polytope;
    let k = form.pole_order;
    let slack = form
        .numerator
        .support()
        .map(|u| polytope.degree(u))
        .max()
        .unwrap_or(0);
    let mut out = TruncatedSeries::zero_series(order);
    let mut pw = LaurentPoly::constant(n, BigInt::one());
    // binom(m+k-1, m), maintained incrementally.
    let mut binom = BigInt::one();
    let mut factorial_k1 = BigInt::one();
    for j in 1..k {
        factorial_k1 *= BigInt::from(j);
    }
    for m in 0..order {
        for (u, a_u) in form.numerator.terms() {
            let neg_u: Vec<i64> = u.iter().map(|x| -x).collect();
            let c = pw.get(&neg_u);
            if c.is_zero() {
                continue;
            }
            let factor = BigRational::from_integer(&c * &binom * &factorial_k1);
            let contrib = a_u.0.scale(&factor).shift_mul_t(m, order);
            out = out.add(&contrib);
        }
        if m + 1 == order {
            break;
        }
        binom = binom * BigInt::from(m + k) / BigInt::from(m + 1);
        let budget = (order - 1 - (m + 1)) as i64 + slack;
        let neg = |e: &[i64]| e.iter().map(|x| -x).collect::<Vec<_>>();
        pw = pw.mul_pruned(&family.g, |e| polytope.degree(&neg(e)) <= budget);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplicial(n: usize) -> FamilyData {
        build_family(&FamilySpec::Simplicial(n)).unwrap()
    }
    fn hyperoct(n: usize) -> FamilyData {
        build_family(&FamilySpec::Hyperoctahedral(n)).unwrap()
    }

    #[test]
    fn builtin_polytopes_are_reflexive() {
        for n in 2..=4 {
            let s = simplicial(n);
            assert_eq!(s.polytope.vertices().len(), n + 1);
            let h = hyperoct(n);
            assert_eq!(h.polytope.facets().len(), 1 << n);
        }
        assert_eq!(simplicial(4).symmetry_order, 120);
        assert_eq!(hyperoct(2).symmetry_order, 8);
        assert_eq!(hyperoct(4).symmetry_order, 384);
    }

    #[test]
    fn custom_square_family() {
        let square = PolytopeData::new(
            2,
            vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]],
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        )
        .unwrap();
        assert_eq!(square.lattice_points(1).len(), 9);
        // A point off the boundary normalization fails reflexivity.
        assert!(PolytopeData::new(
            2,
            vec![vec![2, 0], vec![-2, 0], vec![0, 1], vec![0, -1]],
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        )
        .is_err());
    }

    #[test]
    fn degree_examples() {
        let s4 = simplicial(4);
        assert_eq!(s4.polytope.degree(&[0, 0, 0, 0]), 0);
        for v in s4.polytope.vertices() {
            assert_eq!(s4.polytope.degree(v), 1);
        }
        assert_eq!(s4.polytope.degree(&[1, 1, 1, 1]), 4);
        let h3 = hyperoct(3);
        assert_eq!(h3.polytope.degree(&[1, -2, 1]), 4);
    }

    #[test]
    fn lattice_point_counts() {
        let s2 = simplicial(2);
        let pts = s2.polytope.lattice_points(1);
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![-1, -1]));
        assert!(pts.contains(&vec![0, 0]));
        let h2 = hyperoct(2);
        assert_eq!(h2.polytope.lattice_points(1).len(), 5);
        assert_eq!(h2.polytope.lattice_points(0), vec![vec![0, 0]]);
    }

    #[test]
    fn admissibility() {
        let s2 = simplicial(2);
        let f = s2.f_series(6);
        assert!(is_admissible(&f, 1, &s2.polytope));
        // x_1 with a t-free coefficient is not admissible.
        let bad: SeriesLaurent<BigRational> = LaurentPoly::from_terms(
            2,
            [(
                vec![1, 0],
                SeriesCoeff(TruncatedSeries::one_series(6)),
            )],
        );
        assert!(!is_admissible(&bad, 1, &s2.polytope));
        // t^2 x_1 is admissible at k = 1.
        let good: SeriesLaurent<BigRational> = LaurentPoly::from_terms(
            2,
            [(
                vec![1, 0],
                SeriesCoeff(TruncatedSeries::monomial(6, 2, BigRational::one())),
            )],
        );
        assert!(is_admissible(&good, 1, &s2.polytope));
    }

    #[test]
    fn constant_terms() {
        let s4 = simplicial(4);
        let ct = constant_term_series(&s4.g, &s4.polytope, 11);
        assert_eq!(ct.coeff(5), &BigInt::from(120));
        assert_eq!(ct.coeff(10), &BigInt::from(113400));
        for m in [1usize, 2, 3, 4, 6, 7, 8, 9] {
            assert!(ct.coeff(m).is_zero());
        }
        let h2 = hyperoct(2);
        let ct = constant_term_series(&h2.g, &h2.polytope, 5);
        assert_eq!(ct.coeff(2), &BigInt::from(4));
        assert_eq!(ct.coeff(4), &BigInt::from(36));
    }

    #[test]
    fn period_of_one_over_f() {
        let s4 = simplicial(4);
        let one = LaurentPoly::from_terms(
            4,
            [(
                vec![0; 4],
                SeriesCoeff(TruncatedSeries::one_series(11)),
            )],
        );
        let form = RationalForm::new(1, one);
        let period = period_map(&form, &s4, 11);
        assert_eq!(period.coeff(0), &BigRational::one());
        assert_eq!(
            period.coeff(5),
            &BigRational::from_integer(BigInt::from(120))
        );
        assert_eq!(
            period.coeff(10),
            &BigRational::from_integer(BigInt::from(113400))
        );
    }

    #[test]
    fn period_kills_derivatives() {
        let s2 = simplicial(2);
        let order = 9;
        let f = s2.f_series(order);
        // x_1 / f as a form, then theta_1 of it.
        let x1 = LaurentPoly::from_terms(
            2,
            [(
                vec![1, 0],
                SeriesCoeff(TruncatedSeries::one_series(order)),
            )],
        );
        let form = RationalForm::new(1, x1);
        let d = form.theta_form(0, &f).unwrap();
        let period = period_map(&d, &s2, order);
        assert!(period.is_zero_series(), "period of a derivative: {:?}", period);
    }

    #[test]
    fn period_commutes_with_theta_t() {
        // c_0(theta_t applied to 1/f) = theta_t(c_0(1/f)); theta_t(1/f) =
        // t g/f^2 has numerator t g (pole 2, factor 1! = 1).
        let s2 = simplicial(2);
        let order = 10;
        let tg: SeriesLaurent<BigRational> = LaurentPoly::from_terms(
            2,
            s2.g.terms().map(|(e, c)| {
                (
                    e.clone(),
                    SeriesCoeff(TruncatedSeries::monomial(
                        order,
                        1,
                        BigRational::from_integer(c.clone()),
                    )),
                )
            }),
        );
        let lhs = period_map(&RationalForm::new(2, tg), &s2, order);
        let one = LaurentPoly::from_terms(
            2,
            [(
                vec![0; 2],
                SeriesCoeff(TruncatedSeries::one_series(order)),
            )],
        );
        let rhs = period_map(&RationalForm::new(1, one), &s2, order).theta();
        assert_eq!(lhs, rhs);
    }
}
