//! Exact dense linear algebra: fraction-free determinants over the integers
//! and Gaussian elimination over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant by the Bareiss fraction-free algorithm; every division is
/// exact, so all intermediate values stay integral.
pub fn det_int(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|row| row.len() == n), "square matrix required");
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num_integer::Integer::div_rem(&num, &prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Determinant over the rationals by Gaussian elimination.
pub fn det_rational(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    assert!(m.iter().all(|row| row.len() == n), "square matrix required");
    let mut det = BigRational::one();
    for k in 0..n {
        match (k..n).find(|&i| !m[i][k].is_zero()) {
            Some(i) => {
                if i != k {
                    m.swap(k, i);
                    det = -det;
                }
            }
            None => return BigRational::zero(),
        }
        let pivot = m[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for j in k..n {
                let sub = &f * &m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of the right nullspace of `a` (rows are vectors of length ncols).
pub fn nullspace_rational(a: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    assert!(m.iter().all(|row| row.len() == ncols));
    let pivots = rref(&mut m);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut basis = vec![];
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[ri][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves the square system `a x = b`, if `a` is invertible.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut x = x.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&x, &pb);
        if r.is_zero() {
            x = q;
            v += 1;
        } else {
            return Some(v);
        }
    }
}
