//! Pole-lowering reduction of admissible rational functions.
//!
//! Working modulo the submodule generated by logarithmic derivatives
//! theta_i(omega), every admissible form SUM (m-1)! A_m / f^m whose pole-m
//! numerator is supported in (m-1)*Delta is equivalent to a series
//! combination of the basis theta^j(1/f), j = 0..n-1. This module provides
//! that reduction for the two built-in reflexive families:
//!
//! * the simplex family (`reduce_simplicial`): monomials are rewritten in
//!   homogeneous coordinates w = (w_0..w_n) with x_0 = 1/(x_1...x_n) and
//!   min w_i = 0, and one variable is peeled per step:
//!
//!   ```text
//!   [m, W] == 1/(n+1) [m, W-e_i]
//!           + ((|W|-1-m)/(n+1) - (W_i - 1)) [m-1, W-e_i]
//!   ```
//!
//!   where [m, W] denotes m! t^|W| x^W / f^(m+1);
//!
//! * the cross-polytope family (`reduce_hyperoctahedral`): numerators are
//!   rewritten in the inversion-invariant coordinates X_i = x_i + 1/x_i,
//!   squares are eliminated with
//!
//!   ```text
//!   [m, a] == 4 t^2 [m, a-2e_i] - (a_i - 1) [m-1, a-e_i]
//!           + 4 (a_i - 2) t^2 [m-1, a-3e_i]
//!   ```
//!
//!   ([m, a] = m! t^|a| X^a / f^(m+1)), the multilinear residue is averaged
//!   to elementary symmetric functions <m, r> = m! r! t^r s_r / f^(m+1), and
//!   those recurse via
//!
//!   ```text
//!   <m, r> == (r-1-m) <m-1, r-1> + <m, r-1> - 4 (n+2-r)(r-1) t^2 <m, r-2>
//!   ```
//!
//! Terminal atoms m!/f^(m+1) = (theta+1)...(theta+m)(1/f) convert to
//! theta-powers through the unsigned-Stirling (Pochhammer) triangle, and
//! powers theta^s with s >= n fold down by the companion recursion of the
//! family's differential operator. The same identities, read in T = t^p,
//! drive the Frobenius-side reduction: `AdmissibleForm::scale` records the
//! parameterization, and the only t-sensitive steps (the t^2 shifts above)
//! scale accordingly.
//!
//! `derive_picard_fuchs` recovers the annihilating operator of 1/f
//! mechanically: the chain theta^j(1/f) is tracked in atom coordinates, and
//! the one relation the formal calculus cannot see (x_0...x_n = 1 for the
//! simplex, s_{n+1} = 0 for the cross-polytope) is injected by reducing a
//! single element that has two distinct atom representations.

use crate::diffop::{rational_reconstruct, ThetaOperator};
use crate::error::Error;
use crate::geometry::{
    build_family, FamilyData, FamilySpec, LaurentPoly, PolytopeData, RationalForm, SeriesCoeff,
};
use crate::normlaurent::NormLaurent;
use crate::scalar::Scalar;
use crate::series::{Poly, TruncatedSeries};
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A finite sum SUM_m (m-1)! A_m(x) / f(x)^m with series coefficients.
///
/// Numerator coefficients are stored degree-normalized (see
/// [`NormLaurent`]): the actual coefficient of x^u is t^(scale*deg u) times
/// the stored series. `scale` is 1 on the base parameterization and p on the
/// Frobenius side, where f means f^sigma = 1 - t^p g and all t-budgets are
/// counted in T = t^p.
#[derive(Clone, Debug)]
pub struct AdmissibleForm<C: Scalar> {
    n: usize,
    order: usize,
    scale: usize,
    terms: Vec<(usize, NormLaurent<C>)>,
}

impl<C: Scalar> AdmissibleForm<C> {
    pub fn new(n: usize, order: usize, scale: usize) -> Self {
        assert!(order >= 1 && scale >= 1);
        AdmissibleForm {
            n,
            order,
            scale,
            terms: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn terms(&self) -> &[(usize, NormLaurent<C>)] {
        &self.terms
    }

    /// Adds a pole-`pole` term. The numerator support must lie in
    /// pole * Delta; stored coefficients are normalized, so the t-adic half
    /// of admissibility holds by construction.
    pub fn add_term(
        &mut self,
        pole: usize,
        numerator: NormLaurent<C>,
        polytope: &PolytopeData,
    ) -> Result<()> {
        if pole == 0 {
            return Err(Error::InvalidInput("pole order must be at least 1".into()));
        }
        assert_eq!(numerator.dimension(), self.n);
        assert_eq!(numerator.order(), self.order);
        for (u, _) in numerator.terms() {
            let d = polytope.degree(u);
            if d > pole as i64 {
                return Err(Error::NotAdmissible(format!(
                    "monomial of degree {} exceeds the pole-{} support bound",
                    d, pole
                )));
            }
        }
        self.terms.push((pole, numerator));
        Ok(())
    }

    /// theta = t d/dt of the form, on the base parameterization:
    /// theta((k-1)! A / f^k) = (k-1)! theta(A) / f^k + k! (t g A) / f^(k+1).
    pub fn theta(&self, family: &FamilyData) -> Result<AdmissibleForm<C>> {
        if self.scale != 1 {
            return Err(Error::InvalidInput(
                "theta acts on the base parameterization only".into(),
            ));
        }
        let polytope = &family.polytope;
        let mut by_pole: BTreeMap<usize, NormLaurent<C>> = BTreeMap::new();
        for (pole, nl) in &self.terms {
            let mut same = NormLaurent::new(self.n, self.order);
            for (u, c) in nl.terms() {
                let d = polytope.degree(u);
                same.insert(u.clone(), c.theta().add(&c.mul_i64(self.scale as i64 * d)));
            }
            // Numerator times t*g, in normalized coordinates: the degree can
            // drop under the product, which shows up as a t-shift.
            let mut raised = NormLaurent::new(self.n, self.order);
            for (u, c) in nl.terms() {
                let du = polytope.degree(u);
                for (v, gv) in family.g.terms() {
                    let w: Vec<i64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
                    let dw = polytope.degree(&w);
                    let shift = self.scale * (du + 1 - dw) as usize;
                    let contrib = c
                        .shift_mul_t(shift, self.order)
                        .scale(&C::embed_bigint(gv));
                    raised.accumulate(w, &contrib);
                }
            }
            for (key, part) in [(*pole, same), (*pole + 1, raised)] {
                match by_pole.get_mut(&key) {
                    Some(existing) => *existing = existing.add(&part),
                    None => {
                        by_pole.insert(key, part);
                    }
                }
            }
        }
        let mut out = AdmissibleForm::new(self.n, self.order, self.scale);
        for (pole, nl) in by_pole {
            if !nl.is_empty() {
                out.add_term(pole, nl, polytope)?;
            }
        }
        Ok(out)
    }

    /// The terms as plain rational forms with actual (denormalized) series
    /// coefficients, for oracle-style consumers. Base parameterization only.
    pub fn rational_forms(&self, polytope: &PolytopeData) -> Vec<RationalForm<C>> {
        assert_eq!(self.scale, 1, "denormalization is defined for scale 1");
        self.terms
            .iter()
            .map(|(pole, nl)| {
                let numerator = LaurentPoly::from_terms(
                    self.n,
                    nl.terms()
                        .map(|(u, _)| (u.clone(), SeriesCoeff(nl.actual_series(u, polytope)))),
                );
                RationalForm::new(*pole, numerator)
            })
            .collect()
    }
}

/// Coordinates of a class on the basis theta^j(1/f), j = 0..n-1.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedVector<C: Scalar> {
    pub b: Vec<TruncatedSeries<C>>,
}

/// Raw engine output: the class SUM_r c_r * r!/f^(r+1).
#[derive(Clone, Debug)]
pub struct RawReduction<C: Scalar> {
    pub c: Vec<TruncatedSeries<C>>,
}

impl<C: Scalar> RawReduction<C> {
    pub fn coeff(&self, r: usize) -> TruncatedSeries<C> {
        self.c
            .get(r)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero_series(self.order()))
    }

    fn order(&self) -> usize {
        self.c.first().map(|s| s.order()).unwrap_or(1)
    }
}

/// Atom key: (pole parameter m, homogeneous weight |W| or |a|, exponent).
type AtomKey = (usize, usize, Vec<i64>);
type AtomMap<C> = BTreeMap<AtomKey, TruncatedSeries<C>>;

fn atom_add<C: Scalar>(map: &mut AtomMap<C>, key: AtomKey, val: TruncatedSeries<C>) {
    if val.is_zero_series() {
        return;
    }
    match map.get_mut(&key) {
        Some(existing) => *existing = existing.add(&val),
        None => {
            map.insert(key, val);
        }
    }
}

/// Coefficientwise exact division by an integer. Over rationals this always
/// succeeds; over residue rings it is multiplication by the inverse of a
/// unit, the form divisions by p-adic units take there.
fn series_exact_div_i64<C: Scalar>(s: &TruncatedSeries<C>, k: i64) -> Result<TruncatedSeries<C>> {
    let coeffs: Option<Vec<C>> = s.coeffs().iter().map(|c| c.exact_div_i64(k)).collect();
    coeffs.map(TruncatedSeries::from_coeffs).ok_or_else(|| {
        Error::NotInvertible(format!(
            "division by {} is not exact in the coefficient ring",
            k
        ))
    })
}

/// Homogeneous-coordinate representative of an n-torus monomial: W has
/// length n+1, nonnegative entries, min W_i = 0, and |W| = deg(x^u) on the
/// simplex polytope.
fn homogeneous_weight(u: &[i64]) -> Vec<i64> {
    let w0 = -u.iter().copied().min().unwrap_or(0).min(0);
    let mut w = Vec::with_capacity(u.len() + 1);
    w.push(w0);
    for &c in u {
        w.push(c + w0);
    }
    w
}

/// Reduces simplex-family atoms [m, W] = m! t^|W| x^W / f^(m+1) to the
/// terminal coefficients of r!/f^(r+1) by variable peeling. Atoms must have
/// |W| <= m, except for the one-step-overweight case |W| = m + 1 with some
/// W_i = 1 (then the pole-lowering branch has coefficient zero).
pub(crate) fn reduce_simplicial_atoms<C: Scalar>(
    mut atoms: AtomMap<C>,
    n: usize,
    order: usize,
) -> Result<RawReduction<C>> {
    let np1 = n as i64 + 1;
    let mut c: Vec<TruncatedSeries<C>> = Vec::new();
    while let Some(((m, wsum, w), val)) = atoms.pop_last() {
        if val.is_zero_series() {
            continue;
        }
        if wsum == 0 {
            while c.len() <= m {
                c.push(TruncatedSeries::zero_series(order));
            }
            c[m] = c[m].add(&val);
            continue;
        }
        let i = if wsum == m + 1 {
            w.iter().position(|&x| x == 1).ok_or_else(|| {
                Error::NotAdmissible(
                    "pole-m numerator support must lie in (m-1)*Delta".into(),
                )
            })?
        } else if wsum > m + 1 {
            return Err(Error::NotAdmissible(
                "pole-m numerator support must lie in (m-1)*Delta".into(),
            ));
        } else {
            w.iter().position(|&x| x >= 1).expect("nonzero weight")
        };
        let mut w1 = w.clone();
        w1[i] -= 1;
        let peeled = series_exact_div_i64(&val, np1)?;
        atom_add(&mut atoms, (m, wsum - 1, w1.clone()), peeled.clone());
        // q = (|W|-1-m)/(n+1) - (W_i-1), as a single fraction over n+1.
        let qnum = (wsum as i64 - 1 - m as i64) - (w[i] - 1) * np1;
        if qnum != 0 {
            debug_assert!(m >= 1, "pole-lowering from a polynomial atom");
            atom_add(&mut atoms, (m - 1, wsum - 1, w1), peeled.mul_i64(qnum));
        }
    }
    if c.is_empty() {
        c.push(TruncatedSeries::zero_series(order));
    }
    Ok(RawReduction { c })
}

/// Reduces cross-polytope-family atoms in the invariant coordinates
/// X_i = x_i + 1/x_i: eliminates squares, averages the multilinear residue
/// onto elementary symmetric functions, and finishes with the s_r recursion.
/// Requires |a| <= m per atom.
pub(crate) fn reduce_hyper_atoms<C: Scalar>(
    mut atoms: AtomMap<C>,
    n: usize,
    t_step: usize,
    order: usize,
) -> Result<RawReduction<C>> {
    let mut s_atoms: BTreeMap<(usize, usize), TruncatedSeries<C>> = BTreeMap::new();
    while let Some(((m, asum, a), val)) = atoms.pop_last() {
        if val.is_zero_series() {
            continue;
        }
        if asum > m {
            return Err(Error::NotAdmissible(
                "pole-m numerator support must lie in (m-1)*Delta".into(),
            ));
        }
        if let Some(i) = a.iter().position(|&x| x >= 2) {
            debug_assert!(m >= 2);
            let ai = a[i];
            let shifted = val.shift_mul_t(2 * t_step, order);
            let mut a2 = a.clone();
            a2[i] -= 2;
            atom_add(&mut atoms, (m, asum - 2, a2), shifted.mul_i64(4));
            let mut a1 = a.clone();
            a1[i] -= 1;
            atom_add(&mut atoms, (m - 1, asum - 1, a1), val.mul_i64(1 - ai));
            if ai > 2 {
                let mut a3 = a.clone();
                a3[i] -= 3;
                atom_add(
                    &mut atoms,
                    (m - 1, asum - 3, a3),
                    shifted.mul_i64(4 * (ai - 2)),
                );
            }
            continue;
        }
        // Multilinear atom: average over the symmetry group. X^a with
        // |a| = r contributes s_r / binom(n, r), i.e. <m, r>/(r! binom(n, r)).
        let r = asum;
        let factor = (1..=r as i64).product::<i64>() * binom_i64(n as i64, r as i64);
        let contrib = series_exact_div_i64(&val, factor).map_err(|_| {
            Error::NotInvertible(format!(
                "symmetrization divides by r! * binom(n, r) = {}; \
                 the symmetry order 2^n n! must be invertible",
                factor
            ))
        })?;
        match s_atoms.get_mut(&(m, r)) {
            Some(existing) => *existing = existing.add(&contrib),
            None => {
                s_atoms.insert((m, r), contrib);
            }
        }
    }
    reduce_hyper_s_atoms(s_atoms, n, t_step, order)
}

/// The elementary-symmetric recursion: reduces atoms
/// <m, r> = m! r! t^r s_r(X) / f^(m+1) (r <= m) to terminal coefficients.
pub(crate) fn reduce_hyper_s_atoms<C: Scalar>(
    mut s_atoms: BTreeMap<(usize, usize), TruncatedSeries<C>>,
    n: usize,
    t_step: usize,
    order: usize,
) -> Result<RawReduction<C>> {
    let mut c: Vec<TruncatedSeries<C>> = Vec::new();
    while let Some(((m, r), val)) = s_atoms.pop_last() {
        if val.is_zero_series() {
            continue;
        }
        if r == 0 {
            while c.len() <= m {
                c.push(TruncatedSeries::zero_series(order));
            }
            c[m] = c[m].add(&val);
            continue;
        }
        if r > m {
            return Err(Error::NotAdmissible(
                "symmetric weight exceeds the pole parameter".into(),
            ));
        }
        let mut push = |key: (usize, usize), v: TruncatedSeries<C>| {
            if v.is_zero_series() {
                return;
            }
            match s_atoms.get_mut(&key) {
                Some(existing) => *existing = existing.add(&v),
                None => {
                    s_atoms.insert(key, v);
                }
            }
        };
        push((m - 1, r - 1), val.mul_i64(r as i64 - 1 - m as i64));
        push((m, r - 1), val.clone());
        if r >= 2 {
            let coeff = -4 * (n as i64 + 2 - r as i64) * (r as i64 - 1);
            push(
                (m, r - 2),
                val.shift_mul_t(2 * t_step, order).mul_i64(coeff),
            );
        }
    }
    if c.is_empty() {
        c.push(TruncatedSeries::zero_series(order));
    }
    Ok(RawReduction { c })
}

fn binom_i64(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut b = 1i64;
    for j in 0..k {
        b = b * (n - j) / (j + 1);
    }
    b
}

/// Signed-permutation orbit of an exponent vector (coordinate permutations
/// and inversions x_i -> 1/x_i).
fn sign_perm_orbit(u: &[i64]) -> Vec<Vec<i64>> {
    let mut abs: Vec<i64> = u.iter().map(|x| x.abs()).collect();
    abs.sort_unstable();
    let mut perms = std::collections::BTreeSet::new();
    permute_multiset(&mut abs, 0, &mut perms);
    let mut orbit = std::collections::BTreeSet::new();
    for perm in perms {
        let nz: Vec<usize> = (0..perm.len()).filter(|&i| perm[i] != 0).collect();
        for mask in 0..(1u32 << nz.len()) {
            let mut v = perm.clone();
            for (bit, &i) in nz.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    v[i] = -v[i];
                }
            }
            orbit.insert(v);
        }
    }
    orbit.into_iter().collect()
}

fn permute_multiset(vals: &mut Vec<i64>, k: usize, out: &mut std::collections::BTreeSet<Vec<i64>>) {
    if k == vals.len() {
        out.insert(vals.clone());
        return;
    }
    let mut seen = std::collections::BTreeSet::new();
    for i in k..vals.len() {
        if !seen.insert(vals[i]) {
            continue;
        }
        vals.swap(k, i);
        permute_multiset(vals, k + 1, out);
        vals.swap(k, i);
    }
}

/// Replaces a numerator by its average over the signed-permutation group.
/// With `average` false the numerator must already be invariant.
pub(crate) fn hyper_symmetrize<C: Scalar>(
    nl: &NormLaurent<C>,
    average: bool,
) -> Result<NormLaurent<C>> {
    let n = nl.dimension();
    let order = nl.order();
    let mut canon_seen = std::collections::BTreeSet::new();
    let mut out = NormLaurent::new(n, order);
    for (u, _) in nl.terms() {
        let mut canon: Vec<i64> = u.iter().map(|x| x.abs()).collect();
        canon.sort_unstable_by(|a, b| b.cmp(a));
        if !canon_seen.insert(canon) {
            continue;
        }
        let orbit = sign_perm_orbit(u);
        let zero = TruncatedSeries::zero_series(order);
        let values: Vec<&TruncatedSeries<C>> = orbit
            .iter()
            .map(|v| nl.get_norm(v).unwrap_or(&zero))
            .collect();
        let avg = if average {
            let mut sum = TruncatedSeries::zero_series(order);
            for v in &values {
                sum = sum.add(v);
            }
            series_exact_div_i64(&sum, orbit.len() as i64).map_err(|_| {
                Error::NotInvertible(format!(
                    "symmetrization divides by the orbit size {}; \
                     the symmetry order 2^n n! must be invertible",
                    orbit.len()
                ))
            })?
        } else {
            for v in &values {
                if *v != values[0] {
                    return Err(Error::NotAdmissible(
                        "numerator is not invariant under signed permutations; \
                         pass symmetrize to average it"
                            .into(),
                    ));
                }
            }
            values[0].clone()
        };
        if avg.is_zero_series() {
            continue;
        }
        for v in orbit {
            out.insert(v, avg.clone());
        }
    }
    Ok(out)
}

/// Rewrites an inversion-invariant numerator as a polynomial in the
/// coordinates X_i = x_i + 1/x_i. Returns stored coefficients d_a with the
/// actual coefficient of X^a equal to t^(t_step * |a|) * d_a.
pub(crate) fn rewrite_invariant<C: Scalar>(
    nl: &NormLaurent<C>,
    t_step: usize,
) -> Result<BTreeMap<Vec<i64>, TruncatedSeries<C>>> {
    let n = nl.dimension();
    let order = nl.order();
    let mut work: BTreeMap<(usize, Vec<i64>), TruncatedSeries<C>> = BTreeMap::new();
    let l1 = |u: &[i64]| u.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>();
    for (u, c) in nl.terms() {
        work.insert((l1(u), u.clone()), c.clone());
    }
    let mut out: BTreeMap<Vec<i64>, TruncatedSeries<C>> = BTreeMap::new();
    while let Some(((d, u), c)) = work.pop_last() {
        if c.is_zero_series() {
            continue;
        }
        let a: Vec<i64> = u.iter().map(|x| x.abs()).collect();
        // The whole sign-orbit at top degree is consumed at once, so the
        // input must carry equal coefficients across it.
        for sib in sign_perm_orbit_fixed_abs(&u) {
            let matches = match work.get(&(d, sib)) {
                Some(s) => *s == c,
                None => false,
            };
            if !matches {
                return Err(Error::NotAdmissible(
                    "numerator is not invariant under inversions".into(),
                ));
            }
        }
        match out.get_mut(&a) {
            Some(existing) => *existing = existing.add(&c),
            None => {
                out.insert(a.clone(), c.clone());
            }
        }
        // Subtract c * X^a: expansion over k_i = 0..a_i with coefficient
        // prod binom(a_i, k_i) at exponent a - 2k.
        let mut k = vec![0i64; n];
        let mut more = true;
        while more {
            let mut coeff = 1i64;
            let mut uprime = Vec::with_capacity(n);
            for i in 0..n {
                coeff *= binom_i64(a[i], k[i]);
                uprime.push(a[i] - 2 * k[i]);
            }
            // Odometer over the expansion index k.
            let mut i = 0;
            while i < n {
                k[i] += 1;
                if k[i] <= a[i] {
                    break;
                }
                k[i] = 0;
                i += 1;
            }
            more = i < n;
            // The popped entry's own term cancels by construction.
            if uprime == u {
                continue;
            }
            let dprime = l1(&uprime);
            let shift = t_step * (d - dprime);
            let sub = c.shift_mul_t(shift, order).mul_i64(-coeff);
            if sub.is_zero_series() {
                continue;
            }
            let key = (dprime, uprime);
            match work.get_mut(&key) {
                Some(existing) => {
                    *existing = existing.add(&sub);
                    if existing.is_zero_series() {
                        work.remove(&key);
                    }
                }
                None => {
                    work.insert(key, sub);
                }
            }
        }
    }
    Ok(out)
}

/// Sign-flips of `u` other than `u` itself (same absolute values, same
/// positions).
fn sign_perm_orbit_fixed_abs(u: &[i64]) -> Vec<Vec<i64>> {
    let nz: Vec<usize> = (0..u.len()).filter(|&i| u[i] != 0).collect();
    let mut out = Vec::new();
    for mask in 1..(1u32 << nz.len()) {
        let mut v = u.to_vec();
        for (bit, &i) in nz.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                v[i] = -v[i];
            }
        }
        out.push(v);
    }
    out
}

/// P[r][i] = coefficient of theta^i in (theta+1)(theta+2)...(theta+r)
/// (unsigned Stirling numbers of the first kind).
pub fn pochhammer_coeffs(max_r: usize) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::one()]];
    for r in 1..=max_r {
        let prev = &table[r - 1];
        let mut row = vec![BigInt::zero(); r + 1];
        for i in 0..=r {
            let mut v = BigInt::zero();
            if i >= 1 {
                v += &prev[i - 1];
            }
            if i < r {
                v += &prev[i] * BigInt::from(r as i64);
            }
            row[i] = v;
        }
        table.push(row);
    }
    table
}

fn embed_q_series<C: Scalar>(s: &TruncatedSeries<BigRational>) -> Result<TruncatedSeries<C>> {
    let coeffs: Option<Vec<C>> = s.coeffs().iter().map(C::embed_ratio).collect();
    coeffs
        .map(TruncatedSeries::from_coeffs)
        .ok_or_else(|| Error::NotInvertible("series coefficient denominator is not a unit".into()))
}

/// Companion rows of a differential operator: rows[s-n][j] is the
/// coefficient of theta^j(1/f) in the reduction of theta^s(1/f), for
/// s = n..=max_s, over series of the given truncation order. On the
/// Frobenius side callers build the rows in T = t^p and stretch.
pub fn companion_rows<C: Scalar>(
    op: &ThetaOperator,
    max_s: usize,
    order: usize,
) -> Result<Vec<Vec<TruncatedSeries<C>>>> {
    let n = op.order();
    assert!(max_s >= n);
    let monic = op.monic_series(order)?;
    let base: Vec<TruncatedSeries<C>> = monic[..n]
        .iter()
        .map(|b| embed_q_series::<C>(b).map(|s| s.neg()))
        .collect::<Result<_>>()?;
    let mut rows = vec![base];
    for _ in n..max_s {
        let prev = rows.last().unwrap().clone();
        let mut next = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = prev[j].theta();
            if j >= 1 {
                e = e.add(&prev[j - 1]);
            }
            e = e.add(&prev[n - 1].mul(&rows[0][j]));
            next.push(e);
        }
        rows.push(next);
    }
    Ok(rows)
}

/// Converts a raw reduction to basis coordinates using the Pochhammer
/// triangle, folding theta^s with s >= n through the companion rows.
pub fn fold_to_basis<C: Scalar>(
    raw: &RawReduction<C>,
    n: usize,
    rows: Option<&[Vec<TruncatedSeries<C>>]>,
    order: usize,
) -> Result<ReducedVector<C>> {
    let max_r = raw.c.len().saturating_sub(1);
    let pt = pochhammer_coeffs(max_r);
    let mut b = vec![TruncatedSeries::zero_series(order); n];
    for (r, cr) in raw.c.iter().enumerate() {
        if cr.is_zero_series() {
            continue;
        }
        for (j, bj) in b.iter_mut().enumerate().take((r + 1).min(n)) {
            *bj = bj.add(&cr.scale(&C::embed_bigint(&pt[r][j])));
        }
        if r >= n {
            let rows = rows.ok_or_else(|| {
                Error::InvalidInput(
                    "companion rows are required for poles above the operator order".into(),
                )
            })?;
            for s in n..=r {
                if pt[r][s].is_zero() {
                    continue;
                }
                let scaled = cr.scale(&C::embed_bigint(&pt[r][s]));
                for j in 0..n {
                    b[j] = b[j].add(&scaled.mul(&rows[s - n][j]));
                }
            }
        }
    }
    Ok(ReducedVector { b })
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum FamilyKind {
    Simplex,
    CrossPolytope,
}

pub(crate) fn family_kind(family: &FamilyData) -> Result<FamilyKind> {
    match family.name.split(':').next().unwrap_or("") {
        "simplicial" => Ok(FamilyKind::Simplex),
        "hyperoctahedral" => Ok(FamilyKind::CrossPolytope),
        other => Err(Error::InvalidFamily(format!(
            "reduction calculus is implemented for the built-in families, not '{}'",
            other
        ))),
    }
}

/// theta of an atom map, with numerator monomials tracked explicitly:
/// theta(c [m, e]) = (theta(c) + |e| c) [m, e] + SUM_v c [m+1, e + v] over
/// the support v of g (homogeneous-coordinate or X-coordinate basis).
fn theta_atoms<C: Scalar>(v: &AtomMap<C>, n: usize, kind: FamilyKind) -> AtomMap<C> {
    let mut out = AtomMap::new();
    for ((m, esum, e), c) in v {
        atom_add(
            &mut out,
            (*m, *esum, e.clone()),
            c.theta().add(&c.mul_i64(*esum as i64)),
        );
        match kind {
            FamilyKind::Simplex => {
                for j in 0..=n {
                    let mut w = e.clone();
                    w[j] += 1;
                    let mut wsum = esum + 1;
                    if w.iter().all(|&x| x >= 1) {
                        for x in w.iter_mut() {
                            *x -= 1;
                        }
                        wsum -= n + 1;
                    }
                    atom_add(&mut out, (m + 1, wsum, w), c.clone());
                }
            }
            FamilyKind::CrossPolytope => {
                for j in 0..n {
                    let mut a = e.clone();
                    a[j] += 1;
                    atom_add(&mut out, (m + 1, esum + 1, a), c.clone());
                }
            }
        }
    }
    out
}

fn reduce_atoms_for<C: Scalar>(
    kind: FamilyKind,
    atoms: AtomMap<C>,
    n: usize,
    t_step: usize,
    order: usize,
) -> Result<RawReduction<C>> {
    match kind {
        FamilyKind::Simplex => reduce_simplicial_atoms(atoms, n, order),
        FamilyKind::CrossPolytope => reduce_hyper_atoms(atoms, n, t_step, order),
    }
}

/// The extra relation the formal atom calculus cannot see: coefficients
/// rho'_r with n!/f^(n+1) == SUM_{r<n} rho'_r * r!/f^(r+1) mod dO_f.
///
/// For the simplex it comes from reducing the weight-(1,..,1) atom, whose
/// monomial x_0 x_1...x_n equals 1; for the cross-polytope from equating the
/// two reductions of <n, n> given by s_{n+1} = 0.
fn extra_relation(
    kind: FamilyKind,
    n: usize,
    order: usize,
) -> Result<Vec<TruncatedSeries<BigRational>>> {
    match kind {
        FamilyKind::Simplex => {
            let mut atoms: AtomMap<BigRational> = AtomMap::new();
            atoms.insert(
                (n, n + 1, vec![1i64; n + 1]),
                TruncatedSeries::one_series(order),
            );
            let raw = reduce_simplicial_atoms(atoms, n, order)?;
            // SUM c_r [r,0] == t^(n+1) [n,0], so
            // [n,0] = SUM_{r<n} c_r / (t^(n+1) - c_n) [r,0].
            let denom = TruncatedSeries::monomial(order, n + 1, BigRational::one())
                .sub(&raw.coeff(n));
            (0..n).map(|r| raw.coeff(r).div(&denom)).collect()
        }
        FamilyKind::CrossPolytope => {
            let mut lhs = BTreeMap::new();
            lhs.insert((n, n), TruncatedSeries::one_series(order));
            let a = reduce_hyper_s_atoms::<BigRational>(lhs, n, 1, order)?;
            let mut rhs = BTreeMap::new();
            rhs.insert(
                (n, n - 1),
                TruncatedSeries::monomial(order, 2, BigRational::from_integer(BigInt::from(
                    4 * n as i64,
                ))),
            );
            let b = reduce_hyper_s_atoms::<BigRational>(rhs, n, 1, order)?;
            // <n,n> == 4n t^2 <n,n-1>: (c_n - cc_n)[n,0] == SUM (cc_r - c_r)[r,0].
            let denom = a.coeff(n).sub(&b.coeff(n));
            (0..n)
                .map(|r| b.coeff(r).sub(&a.coeff(r)).div(&denom))
                .collect()
        }
    }
}

/// Derives the Picard-Fuchs operator of 1/f for a built-in family by
/// reducing theta^n(1/f) over exact rational series of truncation `window`
/// and reconstructing the rational-function coefficients. The result has
/// coprime integer polynomial coefficients with a_n(0) > 0.
pub fn derive_picard_fuchs(family: &FamilyData, window: usize) -> Result<ThetaOperator> {
    let kind = family_kind(family)?;
    let n = family.polytope.dimension();
    let order = window.max(2 * n + 9);
    let rho_prime = extra_relation(kind, n, order)?;

    // theta^j(1/f) in atom coordinates, j = 0..n.
    let mut chain: Vec<AtomMap<BigRational>> = vec![AtomMap::new()];
    chain[0].insert((0, 0, start_key(kind, n)), TruncatedSeries::one_series(order));
    for j in 0..n {
        let next = theta_atoms(&chain[j], n, kind);
        chain.push(next);
    }
    let raw = reduce_atoms_for(kind, chain[n].clone(), n, 1, order)?;

    // theta^n == SUM_{r<n} (c_r + c_n rho'_r) [r,0]; convert to theta-powers.
    let w: Vec<TruncatedSeries<BigRational>> = (0..n)
        .map(|r| raw.coeff(r).add(&raw.coeff(n).mul(&rho_prime[r])))
        .collect();
    let pt = pochhammer_coeffs(n.saturating_sub(1));
    let rho: Vec<TruncatedSeries<BigRational>> = (0..n)
        .map(|i| {
            let mut acc = TruncatedSeries::zero_series(order);
            for (r, wr) in w.iter().enumerate().skip(i) {
                acc = acc.add(&wr.scale(&BigRational::from_integer(pt[r][i].clone())));
            }
            acc
        })
        .collect();

    let caps = n + 2;
    let (q, nums) = rational_reconstruct(&rho, caps, caps).ok_or_else(|| {
        Error::InsufficientTruncation(format!(
            "rational reconstruction of the operator coefficients failed \
             within degree {} at series order {}; increase the window",
            caps, order
        ))
    })?;
    let mut polys: Vec<Poly<BigRational>> =
        nums.iter().map(|p| p.mul_i64(-1)).collect();
    polys.push(q);
    let op = ThetaOperator::from_polys(integer_normalize(polys))?;

    // Self-check: SUM_j a_j(t) theta^j(1/f) must reduce to zero.
    let mut combined: AtomMap<BigRational> = AtomMap::new();
    for (j, v) in chain.iter().enumerate() {
        let aj = op.coeff_poly(j).to_series(order);
        if aj.is_zero_series() {
            continue;
        }
        for (key, c) in v {
            atom_add(&mut combined, key.clone(), c.mul(&aj));
        }
    }
    let rawz = reduce_atoms_for(kind, combined, n, 1, order)?;
    for r in 0..n {
        let zr = rawz.coeff(r).add(&rawz.coeff(n).mul(&rho_prime[r]));
        if !zr.is_zero_series() {
            return Err(Error::InvalidOperator(
                "derived operator failed the reduction self-check".into(),
            ));
        }
    }
    Ok(op)
}

fn start_key(kind: FamilyKind, n: usize) -> Vec<i64> {
    match kind {
        FamilyKind::Simplex => vec![0; n + 1],
        FamilyKind::CrossPolytope => vec![0; n],
    }
}

/// Clears denominators and the content, keeping the leading polynomial's
/// constant term positive.
fn integer_normalize(polys: Vec<Poly<BigRational>>) -> Vec<Poly<BigRational>> {
    let mut l = BigInt::one();
    for p in &polys {
        for c in p.coeffs() {
            l = l.lcm(c.denom());
        }
    }
    let scaled: Vec<Vec<BigInt>> = polys
        .iter()
        .map(|p| {
            p.coeffs()
                .iter()
                .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut g = BigInt::zero();
    for v in &scaled {
        for c in v {
            g = g.gcd(c);
        }
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    let sign = scaled
        .last()
        .and_then(|v| v.first())
        .map(|c| if c.is_negative() { -1 } else { 1 })
        .unwrap_or(1);
    let g = g * BigInt::from(sign);
    scaled
        .into_iter()
        .map(|v| {
            Poly::from_coeffs(
                v.into_iter()
                    .map(|c| BigRational::from_integer(c / &g))
                    .collect(),
            )
        })
        .collect()
}

/// Companion rows sized for a raw reduction, derived from the family's
/// operator; `None` when no pole reaches the operator order. `scale` > 1
/// builds the rows in T = t^scale and stretches them to t-series.
fn rows_for<C: Scalar>(
    family: &FamilyData,
    n: usize,
    max_r: usize,
    order: usize,
    scale: usize,
) -> Result<Option<Vec<Vec<TruncatedSeries<C>>>>> {
    if max_r < n {
        return Ok(None);
    }
    let op = derive_picard_fuchs(family, 2 * n + 12)?;
    if scale == 1 {
        return Ok(Some(companion_rows::<C>(&op, max_r, order)?));
    }
    let wt = order.div_ceil(scale);
    let rows_t = companion_rows::<C>(&op, max_r, wt)?;
    Ok(Some(
        rows_t
            .into_iter()
            .map(|row| row.into_iter().map(|s| s.stretch(scale, order)).collect())
            .collect(),
    ))
}

/// Reduces an admissible form for the simplex family to coordinates on the
/// basis theta^j(1/f), j < n. Each pole-m numerator must be supported in
/// (m-1)*Delta.
pub fn reduce_simplicial<C: Scalar>(form: &AdmissibleForm<C>) -> Result<ReducedVector<C>> {
    let n = form.dimension();
    let order = form.order();
    let family = build_family(&FamilySpec::Simplicial(n))?;
    let mut atoms: AtomMap<C> = AtomMap::new();
    for (pole, nl) in form.terms() {
        for (u, c) in nl.terms() {
            let d = family.polytope.degree(u);
            if d >= *pole as i64 {
                return Err(Error::NotAdmissible(format!(
                    "pole-{} numerator has a monomial of degree {}; \
                     reducible support lies in ({}-1)*Delta",
                    pole, d, pole
                )));
            }
            let w = homogeneous_weight(u);
            debug_assert_eq!(w.iter().sum::<i64>(), d);
            atom_add(&mut atoms, (*pole - 1, d as usize, w), c.clone());
        }
    }
    let raw = reduce_simplicial_atoms(atoms, n, order)?;
    let rows = rows_for::<C>(&family, n, raw.c.len().saturating_sub(1), order, form.scale())?;
    fold_to_basis(&raw, n, rows.as_deref(), order)
}

/// Reduces an admissible form for the cross-polytope family. The numerators
/// must be invariant under signed permutations, or `symmetrize` must be set
/// to average them first (this divides by orbit sizes, so the symmetry
/// order 2^n n! must be invertible in the coefficient ring).
pub fn reduce_hyperoctahedral<C: Scalar>(
    form: &AdmissibleForm<C>,
    symmetrize: bool,
) -> Result<ReducedVector<C>> {
    let n = form.dimension();
    let order = form.order();
    let family = build_family(&FamilySpec::Hyperoctahedral(n))?;
    let mut atoms: AtomMap<C> = AtomMap::new();
    for (pole, nl) in form.terms() {
        for (u, _) in nl.terms() {
            let d = family.polytope.degree(u);
            if d >= *pole as i64 {
                return Err(Error::NotAdmissible(format!(
                    "pole-{} numerator has a monomial of degree {}; \
                     reducible support lies in ({}-1)*Delta",
                    pole, d, pole
                )));
            }
        }
        let sym = hyper_symmetrize(nl, symmetrize)?;
        for (a, da) in rewrite_invariant(&sym, form.scale())? {
            let asum = a.iter().sum::<i64>() as usize;
            atom_add(&mut atoms, (*pole - 1, asum, a), da);
        }
    }
    let raw = reduce_hyper_atoms(atoms, n, form.scale(), order)?;
    let rows = rows_for::<C>(&family, n, raw.c.len().saturating_sub(1), order, form.scale())?;
    fold_to_basis(&raw, n, rows.as_deref(), order)
}
