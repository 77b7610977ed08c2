//! Theta-operators L = a_n(t) theta^n + ... + a_0(t), the MUM and
//! self-duality predicates, and the Frobenius solution basis.
//!
//! Coefficients are exact polynomials in t. An operator with a_n(0) != 0 is
//! normalized on demand by dividing through by a_n as a power series; inputs
//! with a_n(0) = 0 are rejected. For a MUM operator the unique solution
//! family
//!
//!   y_l = SUM_{j<=l} F_{l-j} (log t)^j / j!,   F_0(0) = 1, F_i(0) = 0,
//!
//! is computed degree by degree over exact rationals: collecting log-powers
//! in L(y_l) = 0 gives, for each s <= l, the equation
//! SUM_{k<=s} L^(k)(F_{s-k}) = 0 with L^(k) = SUM_i binom(i,k) b_i theta^(i-k),
//! and the t^m coefficient has leading factor m^n.

use crate::error::Error;
use crate::series::{LogSeries, Poly, TruncatedSeries};
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::str::FromStr;

type QSeries = TruncatedSeries<BigRational>;
type QLogSeries = LogSeries<BigRational>;
type QPoly = Poly<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qq(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p" or "p/q" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let make = |n: &str, d: &str| -> Result<BigRational> {
        let num = BigInt::from_str(n.trim())
            .map_err(|e| Error::InvalidInput(format!("bad integer {:?}: {}", n, e)))?;
        let den = BigInt::from_str(d.trim())
            .map_err(|e| Error::InvalidInput(format!("bad integer {:?}: {}", d, e)))?;
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    };
    match s.split_once('/') {
        Some((n, d)) => make(n, d),
        None => make(s, "1"),
    }
}

/// Renders an exact rational as "p" or "p/q".
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn binom(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut c = 1i64;
    for i in 0..k {
        c = c * (n - i) as i64 / (i + 1) as i64;
    }
    c
}

/// A linear differential operator in theta = t d/dt with polynomial
/// coefficients a_0..a_n.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaOperator {
    coeffs: Vec<QPoly>,
}

impl ThetaOperator {
    /// Builds an operator from a_0..a_n; the top coefficient must be nonzero.
    pub fn from_polys(coeffs: Vec<QPoly>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.last().unwrap().is_zero_poly() {
            return Err(Error::InvalidOperator(
                "leading coefficient must be nonzero".into(),
            ));
        }
        Ok(ThetaOperator { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff_poly(&self, i: usize) -> &QPoly {
        &self.coeffs[i]
    }

    pub fn coeff_polys(&self) -> &[QPoly] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().unwrap() == &Poly::constant(BigRational::one())
    }

    pub fn max_coeff_degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0)
    }

    /// Series coefficients b_i = a_i / a_n of the monic normalization;
    /// requires a_n(0) != 0.
    pub fn monic_series(&self, order: usize) -> Result<Vec<QSeries>> {
        let top = self.coeffs.last().unwrap();
        if top.eval0().is_zero() {
            return Err(Error::InvalidOperator(
                "cannot normalize: a_n(0) = 0".into(),
            ));
        }
        let top_series = top.to_series(order);
        self.coeffs
            .iter()
            .map(|a| a.to_series(order).div(&top_series))
            .collect()
    }

    /// Maximal unipotent monodromy at t = 0: after monic normalization all
    /// lower coefficients vanish at the origin.
    pub fn is_mum(&self) -> Result<bool> {
        if self.coeffs.last().unwrap().eval0().is_zero() {
            return Err(Error::InvalidOperator(
                "cannot normalize: a_n(0) = 0".into(),
            ));
        }
        Ok(self.coeffs[..self.order()]
            .iter()
            .all(|a| a.eval0().is_zero()))
    }

    /// Self-duality of an order-4 operator: on the monic normalization,
    /// a_1 = (1/2) a_2 a_3 - (1/8) a_3^3 + theta(a_2)
    ///       - (3/4) a_3 theta(a_3) - (1/2) theta^2(a_3).
    ///
    /// Both sides are rational functions with denominator dividing a_4^3, so
    /// comparing series past the degree bound decides the identity exactly.
    pub fn is_self_dual(&self) -> Result<bool> {
        if self.order() != 4 {
            return Err(Error::InvalidOperator(format!(
                "self-duality is defined for order 4, got order {}",
                self.order()
            )));
        }
        let bound = 4 * self.max_coeff_degree() + 10;
        let b = self.monic_series(bound)?;
        let (b1, b2, b3) = (&b[1], &b[2], &b[3]);
        let rhs = b2
            .mul(b3)
            .scale(&qq(1, 2))
            .sub(&b3.mul(b3).mul(b3).scale(&qq(1, 8)))
            .add(&b2.theta())
            .sub(&b3.mul(&b3.theta()).scale(&qq(3, 4)))
            .sub(&b3.theta().theta().scale(&qq(1, 2)));
        Ok(b1.sub(&rhs).is_zero_series())
    }

    /// SUM_i a_i(t) theta^i(y) with the log-series theta rule.
    pub fn apply(&self, y: &QLogSeries) -> QLogSeries {
        let order = y.order();
        let mut acc = y.mul_series(&self.coeffs[0].to_series(order));
        let mut th = y.clone();
        for a in &self.coeffs[1..] {
            th = th.theta();
            if !a.is_zero_poly() {
                acc = acc.add(&th.mul_series(&a.to_series(order)));
            }
        }
        acc
    }

    /// SUM_i a_i(t) theta^i(f) on a plain series.
    pub fn apply_series(&self, f: &QSeries) -> QSeries {
        let order = f.order();
        let mut acc = f.mul(&self.coeffs[0].to_series(order));
        let mut th = f.clone();
        for a in &self.coeffs[1..] {
            th = th.theta();
            if !a.is_zero_poly() {
                acc = acc.add(&th.mul(&a.to_series(order)));
            }
        }
        acc
    }

    /// The Frobenius basis F_0..F_{n-1} mod t^order for a MUM operator.
    pub fn frobenius_basis(&self, order: usize) -> Result<FrobeniusBasis> {
        if !self.is_mum()? {
            return Err(Error::NotMum(
                "Frobenius basis needs a MUM operator".into(),
            ));
        }
        let n = self.order();
        let b = self.monic_series(order)?;
        // theta-derivative coefficient lists: L^(k) = SUM_d opk[k][d] theta^d.
        let opk: Vec<Vec<QSeries>> = (0..=n)
            .map(|k| {
                (0..=n - k)
                    .map(|d| b[d + k].mul_i64(binom(d + k, k)))
                    .collect()
            })
            .collect();
        let mut fs: Vec<QSeries> = Vec::with_capacity(n);
        for s in 0..n {
            // G = SUM_{k=1..s} L^(k)(F_{s-k}), fully known.
            let mut g = TruncatedSeries::zero_series(order);
            for k in 1..=s {
                let mut th = fs[s - k].clone();
                for (d, c) in opk[k].iter().enumerate() {
                    if d > 0 {
                        th = th.theta();
                    }
                    g = g.add(&th.mul(c));
                }
            }
            let mut f = vec![BigRational::zero(); order];
            if s == 0 {
                f[0] = BigRational::one();
            }
            for m in 1..order {
                // m^n F_{s,m} = -G_m - SUM_{d<=n} SUM_{r=1..m} b_{d,r} (m-r)^d F_{s,m-r};
                // the r = 0 terms vanish because b_d(0) = delta_{dn} (MUM).
                let mut rhs = -g.coeff(m).clone();
                for r in 1..=m {
                    let fm = &f[m - r];
                    if fm.is_zero() {
                        continue;
                    }
                    let mut pw = BigRational::one();
                    let base = q((m - r) as i64);
                    for bd in b.iter().take(n + 1) {
                        let br = bd.coeff(r);
                        if !br.is_zero() {
                            let contrib = br * &pw * fm;
                            rhs -= contrib;
                        }
                        pw *= &base;
                    }
                }
                let mn = BigInt::from(m).pow(n as u32);
                f[m] = rhs / BigRational::from_integer(mn);
            }
            fs.push(TruncatedSeries::from_coeffs(f));
        }
        Ok(FrobeniusBasis { f: fs })
    }

    /// Builtin operator families with closed-form coefficients.
    ///
    /// Accepted names: "quintic", "simplicial:n" (n >= 1), "diagonal4".
    pub fn builtin(name: &str) -> Result<ThetaOperator> {
        if name == "quintic" {
            // theta^4 - 5t (5 theta + 1)(5 theta + 2)(5 theta + 3)(5 theta + 4)
            let rows: [(usize, i64); 5] =
                [(0, -120), (1, -1250), (2, -4375), (3, -6250), (4, -3125)];
            let coeffs = rows
                .iter()
                .map(|&(i, c)| {
                    let mut p = Poly::monomial(1, q(c));
                    if i == 4 {
                        p = p.add(&Poly::constant(q(1)));
                    }
                    p
                })
                .collect();
            return Self::from_polys(coeffs);
        }
        if name == "diagonal4" {
            // (1024 t^4 - 80 t^2 + 1) theta^4 + 64 (128 t^4 - 5 t^2) theta^3
            // + 16 (1472 t^4 - 33 t^2) theta^2 + 32 (896 t^4 - 13 t^2) theta
            // + 128 (96 t^4 - t^2)
            let quartic = |c4: i64, c2: i64, c0: i64| {
                Poly::from_coeffs(vec![q(c0), q(0), q(c2), q(0), q(c4)])
            };
            return Self::from_polys(vec![
                quartic(128 * 96, -128, 0),
                quartic(32 * 896, -32 * 13, 0),
                quartic(16 * 1472, -16 * 33, 0),
                quartic(64 * 128, -64 * 5, 0),
                quartic(1024, -80, 1),
            ]);
        }
        if let Some(ns) = name.strip_prefix("simplicial:") {
            let n: usize = ns
                .parse()
                .map_err(|_| Error::InvalidFamily(format!("bad dimension in {:?}", name)))?;
            if n < 1 || n > 8 {
                return Err(Error::InvalidFamily(format!(
                    "simplicial dimension must be 1..=8, got {}",
                    n
                )));
            }
            // theta^n - ((n+1) t)^(n+1) (theta + 1) ... (theta + n)
            let mut rising = vec![1i64]; // coefficients of prod (theta + j)
            for j in 1..=n {
                let mut next = vec![0i64; rising.len() + 1];
                for (d, &c) in rising.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] += c * j as i64;
                }
                rising = next;
            }
            let scale = (n as i64 + 1).pow(n as u32 + 1);
            let coeffs = (0..=n)
                .map(|i| {
                    let mut p = Poly::monomial(n + 1, q(-scale * rising[i]));
                    if i == n {
                        p = p.add(&Poly::constant(q(1)));
                    }
                    p
                })
                .collect();
            return Self::from_polys(coeffs);
        }
        Err(Error::InvalidFamily(format!(
            "unknown builtin operator {:?}",
            name
        )))
    }

    /// JSON form {"order": n, "coeffs": [[a_00, a_01, ...], ...]} with
    /// exact-rational string entries listing t-coefficients of a_0..a_n.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<Vec<String>> = self
            .coeffs
            .iter()
            .map(|p| p.coeffs().iter().map(rational_string).collect())
            .collect();
        serde_json::json!({ "order": self.order(), "coeffs": coeffs })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<ThetaOperator> {
        let order = v
            .get("order")
            .and_then(|o| o.as_u64())
            .ok_or_else(|| Error::InvalidInput("operator JSON needs \"order\"".into()))?;
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::InvalidInput("operator JSON needs \"coeffs\"".into()))?;
        if coeffs.len() != order as usize + 1 {
            return Err(Error::InvalidInput(format!(
                "operator of order {} needs {} coefficient lists, got {}",
                order,
                order + 1,
                coeffs.len()
            )));
        }
        let polys = coeffs
            .iter()
            .map(|row| {
                let entries = row
                    .as_array()
                    .ok_or_else(|| Error::InvalidInput("coefficient row must be a list".into()))?;
                let cs = entries
                    .iter()
                    .map(|e| match e {
                        serde_json::Value::String(s) => parse_rational(s),
                        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                        _ => Err(Error::InvalidInput(
                            "coefficients must be strings or integers".into(),
                        )),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Poly::from_coeffs(cs))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_polys(polys)
    }
}

/// The normalized solution family F_0..F_{n-1} of a MUM operator.
#[derive(Clone, Debug)]
pub struct FrobeniusBasis {
    f: Vec<QSeries>,
}

impl FrobeniusBasis {
    pub fn count(&self) -> usize {
        self.f.len()
    }

    pub fn order(&self) -> usize {
        self.f[0].order()
    }

    pub fn f(&self, i: usize) -> &QSeries {
        &self.f[i]
    }

    pub fn fs(&self) -> &[QSeries] {
        &self.f
    }

    /// y_i = SUM_{j<=i} F_{i-j} (log t)^j / j! as a log-series.
    pub fn solution(&self, i: usize) -> QLogSeries {
        let mut fact = BigRational::one();
        let parts = (0..=i)
            .map(|j| {
                if j > 0 {
                    fact *= q(j as i64);
                }
                self.f[i - j].scale(&fact.recip())
            })
            .collect();
        LogSeries::from_parts(parts)
    }

    pub fn solutions(&self) -> Vec<QLogSeries> {
        (0..self.count()).map(|i| self.solution(i)).collect()
    }
}

/// Wronskian-style pairing |y_a y_b; theta y_a theta y_b| on log-series.
pub fn wronskian_pair(ya: &QLogSeries, yb: &QLogSeries) -> QLogSeries {
    ya.mul(&yb.theta()).sub(&yb.mul(&ya.theta()))
}

/// Hypergeometric deformation oracle for the quintic family: coefficients of
/// SUM_m c_m(eps) t^(m+eps) with
/// c_m(eps) = PROD_{j=1..m} 5(5(eps+j)-4)(5(eps+j)-3)(5(eps+j)-2)(5(eps+j)-1) / (eps+j)^4,
/// expanded mod eps^4. Row i of the result is the expected F_i mod t^order.
///
/// This is an independent route to the Frobenius basis: no differential
/// operator is solved, only rational eps-arithmetic.
pub fn quintic_basis_oracle(order: usize) -> Vec<QSeries> {
    let dim = 4usize;
    // eps-polynomials mod eps^4, index = eps power.
    let mul = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); dim];
        for i in 0..dim {
            for j in 0..dim - i {
                let t = &a[i] * &b[j];
                out[i + j] += t;
            }
        }
        out
    };
    // 1/(eps + j) = (1/j) * 1/(1 + eps/j) = SUM_i (-1)^i eps^i / j^(i+1).
    let inv_linear = |j: i64| -> Vec<BigRational> {
        (0..dim as i64)
            .map(|i| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                qq(sign, 1) / BigRational::from_integer(BigInt::from(j).pow(i as u32 + 1))
            })
            .collect()
    };
    let linear = |a: i64, b: i64| -> Vec<BigRational> {
        // a*eps + b as an eps-polynomial.
        let mut v = vec![BigRational::zero(); dim];
        v[0] = q(b);
        v[1] = q(a);
        v
    };
    let mut rows = vec![TruncatedSeries::zero_series(order); dim];
    let mut c = linear(0, 1); // c_0 = 1
    for i in 0..dim {
        rows[i].set_coeff(0, c[i].clone());
    }
    for m in 1..order {
        let j = m as i64;
        let mut factor = linear(0, 5);
        for r in 1..=4 {
            factor = mul(&factor, &linear(5, 5 * j - 5 + r));
        }
        let inv = inv_linear(j);
        let inv4 = mul(&mul(&inv, &inv), &mul(&inv, &inv));
        c = mul(&mul(&c, &factor), &inv4);
        for i in 0..dim {
            rows[i].set_coeff(m, c[i].clone());
        }
    }
    rows
}

/// Rational-function reconstruction of series coefficients: finds polynomials
/// (q, p_0..p_k) with q(0) = 1, deg q <= den_deg, deg p_i <= num_deg and
/// q * d_i = p_i mod t^order for all given series, minimizing den_deg first.
/// Returns None if no such presentation exists within the degree caps.
pub fn rational_reconstruct(
    series: &[QSeries],
    max_den_deg: usize,
    max_num_deg: usize,
) -> Option<(QPoly, Vec<QPoly>)> {
    let order = series.iter().map(|s| s.order()).min()?;
    for dq in 0..=max_den_deg {
        for dp in 0..=max_num_deg {
            // Unknowns: q_1..q_dq (q_0 = 1 fixed). Conditions: for each series,
            // [t^m](q d_i) = 0 for dp < m < order.
            if dp + 1 >= order {
                continue;
            }
            let mut rows: Vec<Vec<BigRational>> = vec![];
            let mut rhs: Vec<BigRational> = vec![];
            for d in series {
                for m in dp + 1..order {
                    let mut row = vec![BigRational::zero(); dq];
                    for k in 1..=dq {
                        if k <= m {
                            row[k - 1] = d.coeff(m - k).clone();
                        }
                    }
                    rows.push(row);
                    rhs.push(-d.coeff(m).clone());
                }
            }
            // Solve the overdetermined system rows * x = rhs by elimination:
            // append rhs as a column and require consistency.
            let mut aug: Vec<Vec<BigRational>> = rows
                .iter()
                .zip(&rhs)
                .map(|(r, b)| {
                    let mut row = r.clone();
                    row.push(b.clone());
                    row
                })
                .collect();
            let sol = solve_overdetermined(&mut aug, dq);
            let Some(qcoeffs) = sol else { continue };
            let mut qpoly = vec![BigRational::one()];
            qpoly.extend(qcoeffs);
            let qpoly = Poly::from_coeffs(qpoly);
            let nums: Vec<QPoly> = series
                .iter()
                .map(|d| {
                    let prod = qpoly.to_series(order).mul(d);
                    Poly::from_coeffs(prod.coeffs()[..=dp.min(order - 1)].to_vec())
                })
                .collect();
            // Verify the caps were honored (the tail vanished).
            let ok = series.iter().zip(&nums).all(|(d, p)| {
                qpoly.to_series(order).mul(d).sub(&p.to_series(order)).is_zero_series()
            });
            if ok {
                return Some((qpoly, nums));
            }
        }
    }
    None
}

/// Gaussian elimination for an overdetermined augmented system; returns the
/// unique-ish solution if consistent (free variables set to zero).
fn solve_overdetermined(aug: &mut [Vec<BigRational>], ncols: usize) -> Option<Vec<BigRational>> {
    let rows = aug.len();
    let mut r = 0;
    let mut pivots = vec![];
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, pr);
        let inv = aug[r][c].recip();
        for j in c..=ncols {
            aug[r][j] *= &inv;
        }
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in c..=ncols {
                    let sub = &f * &aug[r][j];
                    aug[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    // Consistency: no row reduces to (0 .. 0 | nonzero).
    for row in aug.iter().skip(r) {
        if !row[ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (ri, &c) in pivots.iter().enumerate() {
        x[c] = aug[ri][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_mum_flags() {
        let quintic = ThetaOperator::builtin("quintic").unwrap();
        assert!(quintic.is_mum().unwrap());
        assert!(!quintic.is_monic());
        let theta2 = ThetaOperator::from_polys(vec![
            Poly::constant(q(1)),
            Poly::zero_poly(),
            Poly::constant(q(1)),
        ])
        .unwrap();
        // theta^2 + 1 is not MUM (a_0(0) = 1).
        assert!(!theta2.is_mum().unwrap());
        let pure = ThetaOperator::from_polys(vec![
            Poly::zero_poly(),
            Poly::zero_poly(),
            Poly::zero_poly(),
            Poly::constant(q(1)),
        ])
        .unwrap();
        assert!(pure.is_mum().unwrap());
    }

    #[test]
    fn self_duality() {
        let theta4 = ThetaOperator::from_polys(vec![
            Poly::zero_poly(),
            Poly::zero_poly(),
            Poly::zero_poly(),
            Poly::zero_poly(),
            Poly::constant(q(1)),
        ])
        .unwrap();
        assert!(theta4.is_self_dual().unwrap());

        let perturbed = ThetaOperator::from_polys(vec![
            Poly::zero_poly(),
            Poly::monomial(1, q(1)),
            Poly::zero_poly(),
            Poly::zero_poly(),
            Poly::constant(q(1)),
        ])
        .unwrap();
        assert!(!perturbed.is_self_dual().unwrap());

        assert!(ThetaOperator::builtin("quintic")
            .unwrap()
            .is_self_dual()
            .unwrap());
        assert!(ThetaOperator::builtin("diagonal4")
            .unwrap()
            .is_self_dual()
            .unwrap());
    }

    #[test]
    fn quintic_basis_low_coefficients() {
        let l = ThetaOperator::builtin("quintic").unwrap();
        let fb = l.frobenius_basis(6).unwrap();
        assert_eq!(fb.f(0).coeff(1), &q(120));
        assert_eq!(fb.f(0).coeff(2), &q(113400));
        // 770 = 120 * (5 H_5 - 5 H_1) with H_5 = 137/60.
        assert_eq!(fb.f(1).coeff(1), &q(770));
    }

    #[test]
    fn quintic_basis_matches_deformation_oracle() {
        let order = 12;
        let l = ThetaOperator::builtin("quintic").unwrap();
        let fb = l.frobenius_basis(order).unwrap();
        let oracle = quintic_basis_oracle(order);
        for i in 0..4 {
            assert_eq!(fb.f(i), &oracle[i], "F_{} disagrees with the oracle", i);
        }
    }

    #[test]
    fn solutions_annihilated() {
        for name in ["quintic", "simplicial:3", "diagonal4"] {
            let l = ThetaOperator::builtin(name).unwrap();
            let fb = l.frobenius_basis(10).unwrap();
            for i in 0..fb.count() {
                let y = fb.solution(i);
                assert!(
                    l.apply(&y).is_zero_series(),
                    "L(y_{}) != 0 for {}",
                    i,
                    name
                );
            }
        }
    }

    #[test]
    fn simplicial_constant_terms() {
        // F_0 for simplicial:2 is SUM (3m)!/(m!)^3 t^(3m).
        let l = ThetaOperator::builtin("simplicial:2").unwrap();
        let fb = l.frobenius_basis(8).unwrap();
        assert_eq!(fb.f(0).coeff(0), &q(1));
        assert_eq!(fb.f(0).coeff(3), &q(6));
        assert_eq!(fb.f(0).coeff(6), &q(90));
        assert_eq!(fb.f(0).coeff(1), &q(0));
    }

    #[test]
    fn wronskian_identity_self_dual() {
        let l = ThetaOperator::builtin("quintic").unwrap();
        let fb = l.frobenius_basis(8).unwrap();
        let lhs = wronskian_pair(&fb.solution(0), &fb.solution(3));
        let rhs = wronskian_pair(&fb.solution(1), &fb.solution(2));
        assert!(lhs.sub(&rhs).is_zero_series());
    }

    #[test]
    fn json_roundtrip() {
        let l = ThetaOperator::builtin("diagonal4").unwrap();
        let j = l.to_json();
        let back = ThetaOperator::from_json(&j).unwrap();
        assert_eq!(l, back);
    }

    #[test]
    fn reconstruction_of_rational_series() {
        // d = (2 + t) / (1 - 3t) as a series.
        let num = Poly::from_coeffs(vec![q(2), q(1)]);
        let den = Poly::from_coeffs(vec![q(1), q(-3)]);
        let d = num.to_series(20).div(&den.to_series(20)).unwrap();
        let (qp, nums) = rational_reconstruct(&[d], 4, 4).unwrap();
        assert_eq!(qp, den);
        assert_eq!(nums[0], num);
    }
}
