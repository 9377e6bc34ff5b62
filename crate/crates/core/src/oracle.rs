//! Independent brute-force checks used by the test suite.
//!
//! Everything here is deliberately naive — exhaustive enumeration and
//! fraction-free elimination — and shares no code path with the normal-form
//! engines it is used to validate.  Enumeration is bounded by an explicit
//! budget and refuses to run past it rather than degrade silently.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::Ring;

/// Determinant of a square integer matrix by Bareiss fraction-free
/// elimination.  Exact; intended for small test matrices.
pub fn determinant(a: &Matrix) -> Result<BigInt> {
    if a.ring().is_modular() {
        return Err(Error::Precondition("determinant oracle runs over Z".into()));
    }
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    Ok(sign * m[n - 1][n - 1].clone())
}

/// All vectors of the given length with entries in `[0, N)`, provided the
/// total count stays within `budget`.
pub fn enumerate_vectors(ring: &Ring, len: usize, budget: u64) -> Result<Vec<Vec<BigInt>>> {
    let Ring::Mod(n) = ring else {
        return Err(Error::Precondition("enumeration requires a finite ring".into()));
    };
    let n: u64 = n.try_into().map_err(|_| {
        Error::EnumerationBudget("modulus too large to enumerate".into())
    })?;
    let mut count: u64 = 1;
    for _ in 0..len {
        count = count
            .checked_mul(n)
            .filter(|&c| c <= budget)
            .ok_or_else(|| {
                Error::EnumerationBudget(format!(
                    "{n}^{len} exceeds enumeration budget {budget}"
                ))
            })?;
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0u64; len];
    loop {
        out.push(cur.iter().map(|&x| BigInt::from(x)).collect());
        let mut i = 0;
        loop {
            if i == len {
                return Ok(out);
            }
            cur[i] += 1;
            if cur[i] < n {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Every `x` with `a x = 0`, found by exhaustive search over `Z/N`.
pub fn enumerate_kernel(a: &Matrix, budget: u64) -> Result<Vec<Vec<BigInt>>> {
    let ring = a.ring().clone();
    let mut out = Vec::new();
    for x in enumerate_vectors(&ring, a.cols(), budget)? {
        let xc = Matrix::column_vector(ring.clone(), &x);
        if a.mul(&xc)?.is_zero() {
            out.push(x);
        }
    }
    Ok(out)
}

/// First `x` with `a x = b` (single-column `b`), by exhaustive search.
pub fn enumerate_solution(a: &Matrix, b: &Matrix, budget: u64) -> Result<Option<Vec<BigInt>>> {
    if b.cols() != 1 {
        return Err(Error::Precondition("enumeration solves one column".into()));
    }
    let ring = a.ring().clone();
    for x in enumerate_vectors(&ring, a.cols(), budget)? {
        let xc = Matrix::column_vector(ring.clone(), &x);
        if a.mul(&xc)? == *b {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Number of distinct values of `m * y` over all `y`, i.e. the size of the
/// subgroup of `(Z/N)^rows` spanned by the columns of `m`.
pub fn span_size(m: &Matrix, budget: u64) -> Result<u64> {
    let ring = m.ring().clone();
    let mut seen = std::collections::BTreeSet::new();
    for y in enumerate_vectors(&ring, m.cols(), budget)? {
        let yc = Matrix::column_vector(ring.clone(), &y);
        let v = m.mul(&yc)?;
        seen.insert((0..m.rows()).map(|i| v.get(i, 0).clone()).collect::<Vec<_>>());
    }
    Ok(seen.len() as u64)
}

/// Size of the module presented as `(Z/N)^g` modulo the column span of
/// `rel` — the subgroup index.
pub fn coset_count(rel: &Matrix, budget: u64) -> Result<u64> {
    let Ring::Mod(n) = rel.ring() else {
        return Err(Error::Precondition("coset counting requires a finite ring".into()));
    };
    let n: u64 = n.try_into().map_err(|_| {
        Error::EnumerationBudget("modulus too large to enumerate".into())
    })?;
    let mut total: u64 = 1;
    for _ in 0..rel.rows() {
        total = total.checked_mul(n).ok_or_else(|| {
            Error::EnumerationBudget("ambient group too large to count".into())
        })?;
    }
    Ok(total / span_size(rel, budget)?)
}

/// Smallest `l <= cap` such that `pi^l * v` lies in the column span of
/// `rel` for every standard basis vector `v`, with span membership decided
/// by exhaustive search.  `None` when no such exponent exists within `cap`.
pub fn annihilator_exponent_enumerated(
    rel: &Matrix,
    pi: &BigInt,
    cap: u32,
    budget: u64,
) -> Result<Option<u32>> {
    let ring = rel.ring().clone();
    let g = rel.rows();
    'levels: for l in 0..=cap {
        let mut p = BigInt::one();
        for _ in 0..l {
            p = ring.mul(&p, pi);
        }
        for i in 0..g {
            let mut target = vec![BigInt::zero(); g];
            target[i] = p.clone();
            let t = Matrix::column_vector(ring.clone(), &target);
            if enumerate_solution(rel, &t, budget)?.is_none() {
                continue 'levels;
            }
        }
        return Ok(Some(l));
    }
    Ok(None)
}
