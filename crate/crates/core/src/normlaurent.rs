//! Laurent polynomials with degree-normalized truncated-series coefficients.
//!
//! An admissible Laurent polynomial has t-adic coefficient order at least
//! deg(u) at each monomial x^u. Storing the normalized coefficient
//! chat_u(t) = c_u(t) / t^deg(u) as a plain truncated series makes products
//! division-free: the normalized product coefficient is
//!
//!   chat_w = SUM_{u+v=w} t^(deg u + deg v - deg w) chat_u chat_v,
//!
//! with a nonnegative shift by degree subadditivity. It also bounds support
//! sharply: along any multiplication chain aimed at a target set T of
//! exponents, an intermediate monomial v only matters when
//! deg(v) + deg(tau - v) - deg(tau) stays below the t-truncation window for
//! some target tau, since that quantity lower-bounds the accumulated shift.
//! [`reach_filter`] implements this prune.
//!
//! Products iterate by output exponent, so the larger operand should be
//! `self`; rows are distributed over worker threads.

use crate::error::Error;
use crate::geometry::{LaurentPoly, PolytopeData};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;
use crate::Result;
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

/// Worker-count override; defaults to available parallelism capped at 8.
pub fn worker_count() -> usize {
    if let Ok(s) = std::env::var("DWORKMILL_WORKERS") {
        if let Ok(k) = s.trim().parse::<usize>() {
            return k.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|k| k.get().min(8))
        .unwrap_or(1)
}

/// Laurent polynomial whose coefficient at x^u is t^deg(u) * (stored series).
#[derive(Clone, Debug, PartialEq)]
pub struct NormLaurent<C> {
    n: usize,
    order: usize,
    terms: BTreeMap<Vec<i64>, TruncatedSeries<C>>,
}

impl<C: Scalar> NormLaurent<C> {
    pub fn new(n: usize, order: usize) -> Self {
        assert!(order >= 1);
        NormLaurent {
            n,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial 1.
    pub fn one(n: usize, order: usize) -> Self {
        let mut p = Self::new(n, order);
        p.insert(vec![0; n], TruncatedSeries::one_series(order));
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Truncation window of the normalized coefficient series.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &TruncatedSeries<C>)> {
        self.terms.iter()
    }

    /// Sets the normalized coefficient at x^u, dropping zero series.
    pub fn insert(&mut self, u: Vec<i64>, c: TruncatedSeries<C>) {
        assert_eq!(u.len(), self.n);
        assert_eq!(c.order(), self.order);
        if c.is_zero_series() {
            self.terms.remove(&u);
        } else {
            self.terms.insert(u, c);
        }
    }

    /// Adds into the normalized coefficient at x^u.
    pub fn accumulate(&mut self, u: Vec<i64>, c: &TruncatedSeries<C>) {
        assert_eq!(c.order(), self.order);
        match self.terms.get_mut(&u) {
            Some(existing) => {
                *existing = existing.add(c);
                if existing.is_zero_series() {
                    self.terms.remove(&u);
                }
            }
            None => {
                if !c.is_zero_series() {
                    self.terms.insert(u, c.clone());
                }
            }
        }
    }

    pub fn get_norm(&self, u: &[i64]) -> Option<&TruncatedSeries<C>> {
        self.terms.get(u)
    }

    /// Actual coefficient c_u = t^deg(u) * chat_u, truncated at the window.
    pub fn actual_series(&self, u: &[i64], polytope: &PolytopeData) -> TruncatedSeries<C> {
        let d = polytope.degree(u);
        debug_assert!(d >= 0);
        match self.terms.get(u) {
            Some(c) => c.shift_mul_t(d as usize, self.order),
            None => TruncatedSeries::zero_series(self.order),
        }
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> NormLaurent<D> {
        let mut out = NormLaurent::new(self.n, self.order);
        for (u, c) in &self.terms {
            out.insert(u.clone(), c.map(&f));
        }
        out
    }

    /// Exact coefficientwise division by an integer (used to form G from
    /// the Frobenius-lift difference); errors on non-divisibility.
    pub fn exact_div_i64(&self, k: i64) -> Result<Self> {
        let mut out = NormLaurent::new(self.n, self.order);
        for (u, c) in &self.terms {
            let coeffs: Option<Vec<C>> =
                c.coeffs().iter().map(|a| a.exact_div_i64(k)).collect();
            match coeffs {
                Some(cs) => out.insert(u.clone(), TruncatedSeries::from_coeffs(cs)),
                None => {
                    return Err(Error::DivisibilityFailure(format!(
                        "coefficient at {:?} is not divisible by {}",
                        u, k
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.accumulate(u.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.accumulate(u.clone(), &c.neg());
        }
        out
    }

    /// Degree-shift-normalized product, keeping only exponents accepted by
    /// the filter. Iterates by output exponent: for each candidate w,
    /// chat_w = SUM_v t^(deg(w-v)+deg(v)-deg(w)) chat^self_(w-v) chat^other_v.
    /// Rows run on `workers` threads when the candidate set is large.
    pub fn mul(
        &self,
        other: &Self,
        polytope: &PolytopeData,
        keep: &(dyn Fn(&[i64]) -> bool + Sync),
        workers: usize,
    ) -> Self
    where
        C: Send + Sync,
    {
        assert_eq!(self.order, other.order);
        assert_eq!(self.n, other.n);
        let order = self.order;
        let mut candidates: BTreeSet<Vec<i64>> = BTreeSet::new();
        for u in self.terms.keys() {
            for v in other.terms.keys() {
                let w: Vec<i64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
                if keep(&w) {
                    candidates.insert(w);
                }
            }
        }
        let cands: Vec<Vec<i64>> = candidates.into_iter().collect();
        let row = |w: &Vec<i64>| -> Option<TruncatedSeries<C>> {
            let dw = polytope.degree(w);
            let mut acc = TruncatedSeries::zero_series(order);
            for (v, cv) in &other.terms {
                let u: Vec<i64> = w.iter().zip(v).map(|(a, b)| a - b).collect();
                let Some(cu) = self.terms.get(&u) else {
                    continue;
                };
                let shift = polytope.degree(&u) + polytope.degree(v) - dw;
                debug_assert!(shift >= 0, "degree subadditivity violated");
                if (shift as usize) >= order {
                    continue;
                }
                acc = acc.add(&cu.mul(cv).shift_mul_t(shift as usize, order));
            }
            if acc.is_zero_series() {
                None
            } else {
                Some(acc)
            }
        };
        let workers = workers.max(1).min(cands.len().max(1));
        let rows: Vec<Option<TruncatedSeries<C>>> = if workers <= 1 || cands.len() < 64 {
            cands.iter().map(row).collect()
        } else {
            let mut rows: Vec<Option<TruncatedSeries<C>>> = vec![None; cands.len()];
            let chunk = cands.len().div_ceil(workers);
            std::thread::scope(|scope| {
                for (slot_chunk, cand_chunk) in
                    rows.chunks_mut(chunk).zip(cands.chunks(chunk))
                {
                    scope.spawn(move || {
                        for (slot, w) in slot_chunk.iter_mut().zip(cand_chunk) {
                            *slot = row(w);
                        }
                    });
                }
            });
            rows
        };
        let mut out = NormLaurent::new(self.n, order);
        for (w, r) in cands.into_iter().zip(rows) {
            if let Some(c) = r {
                out.terms.insert(w, c);
            }
        }
        out
    }
}

/// f = 1 - t g in normalized storage: chat_0 = 1, chat_u = -g_u for u in
/// the support of g (every such u has degree 1).
pub fn family_f(g: &LaurentPoly<BigInt>, polytope: &PolytopeData, order: usize) -> NormLaurent<BigInt> {
    let n = g.dimension();
    let mut f = NormLaurent::one(n, order);
    for (u, c) in g.terms() {
        debug_assert_eq!(polytope.degree(u), 1);
        f.insert(
            u.clone(),
            TruncatedSeries::monomial(order, 0, -c.clone()),
        );
    }
    f
}

/// f^sigma(x^p) = 1 - t^p g(x^p) in normalized storage: the monomial p*u has
/// degree p, so its normalized coefficient is again the constant -g_u.
pub fn family_f_sigma_xp(
    g: &LaurentPoly<BigInt>,
    polytope: &PolytopeData,
    p: u64,
    order: usize,
) -> NormLaurent<BigInt> {
    let n = g.dimension();
    let mut f = NormLaurent::one(n, order);
    for (u, c) in g.terms() {
        let pu: Vec<i64> = u.iter().map(|x| x * p as i64).collect();
        debug_assert_eq!(polytope.degree(&pu), p as i64);
        f.insert(pu, TruncatedSeries::monomial(order, 0, -c.clone()));
    }
    f
}

impl<C: Scalar + Send + Sync> NormLaurent<C> {
    /// Binary powering under the same keep-filter as [`Self::mul`].
    pub fn pow(
        &self,
        e: u64,
        polytope: &PolytopeData,
        keep: &(dyn Fn(&[i64]) -> bool + Sync),
        workers: usize,
    ) -> Self {
        if e == 0 {
            return Self::one(self.n, self.order);
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base, polytope, keep, workers),
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base, polytope, keep, workers);
        }
        acc.unwrap()
    }
}

/// Reachability prune for multiplication chains aimed at `targets`: keeps v
/// iff deg(v) + deg(tau - v) - deg(tau) < window for some target tau. Any
/// product path through a rejected v accumulates a normalized t-shift of at
/// least the window and cannot contribute below the truncation order.
pub fn reach_filter<'a>(
    polytope: &'a PolytopeData,
    targets: &'a [Vec<i64>],
    window: usize,
) -> impl Fn(&[i64]) -> bool + Sync + 'a {
    let target_degs: Vec<i64> = targets.iter().map(|t| polytope.degree(t)).collect();
    move |v: &[i64]| {
        let dv = polytope.degree(v);
        targets.iter().zip(&target_degs).any(|(t, dt)| {
            let diff: Vec<i64> = t.iter().zip(v).map(|(a, b)| a - b).collect();
            dv + polytope.degree(&diff) - dt < window as i64
        })
    }
}

/// Materializes the reach filter as a lookup set, scanning the degree ball
/// that contains every monomial it can accept: deg(z) <= max deg(tau) +
/// window - 1, since deg(tau - z) >= 0. The scan is chunked over threads.
pub fn reach_set(
    polytope: &PolytopeData,
    targets: &[Vec<i64>],
    window: usize,
    workers: usize,
) -> std::collections::HashSet<Vec<i64>> {
    if targets.is_empty() {
        return std::collections::HashSet::new();
    }
    let max_deg = targets.iter().map(|t| polytope.degree(t)).max().unwrap();
    let ball = polytope.lattice_points(max_deg + window as i64 - 1);
    let keep = reach_filter(polytope, targets, window);
    let workers = workers.max(1);
    if workers <= 1 || ball.len() < 256 {
        return ball.into_iter().filter(|z| keep(z)).collect();
    }
    let chunk = ball.len().div_ceil(workers);
    let mut kept: Vec<Vec<Vec<i64>>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = ball
            .chunks(chunk)
            .map(|part| {
                let keep = &keep;
                scope.spawn(move || {
                    part.iter()
                        .filter(|z| keep(z))
                        .cloned()
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            kept.push(h.join().expect("reach_set worker panicked"));
        }
    });
    kept.into_iter().flatten().collect()
}
