//! Level-1 elliptic modular forms: cusp form dimensions, traces of `T(p)`
//! from integer q-expansions, and the Lefschetz trace on `e_c(A_1, Sym^n)`
//! from an elliptic census.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::census::EllipticCensus;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModFormError {
    #[error("weight {0} is not supported here: need an even weight >= 4")]
    InvalidWeight(i64),
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("division by {divisor} is not exact in {what}")]
    NonIntegral { what: String, divisor: String },
}

/// A truncated q-expansion `sum_{n < len} c_n q^n`.
pub type QSeries = Vec<BigInt>;

fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

fn eisenstein(prec: usize, k: u32, scale: i64) -> QSeries {
    (0..prec)
        .map(|n| {
            if n == 0 {
                BigInt::one()
            } else {
                BigInt::from(scale) * divisor_power_sum(n as u64, k - 1)
            }
        })
        .collect()
}

/// `E4 = 1 + 240 sum sigma_3(n) q^n`.
pub fn e4(prec: usize) -> QSeries {
    eisenstein(prec, 4, 240)
}

/// `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn e6(prec: usize) -> QSeries {
    eisenstein(prec, 6, -504)
}

pub fn mul(a: &[BigInt], b: &[BigInt], prec: usize) -> QSeries {
    let mut out = vec![BigInt::zero(); prec];
    for (i, x) in a.iter().enumerate().take(prec) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn pow_series(a: &[BigInt], e: u32, prec: usize) -> QSeries {
    let mut acc = vec![BigInt::zero(); prec];
    if prec > 0 {
        acc[0] = BigInt::one();
    }
    for _ in 0..e {
        acc = mul(&acc, a, prec);
    }
    acc
}

/// `Delta = (E4^3 - E6^2) / 1728`.
pub fn delta(prec: usize) -> Result<QSeries, ModFormError> {
    let a = pow_series(&e4(prec), 3, prec);
    let b = pow_series(&e6(prec), 2, prec);
    let d = BigInt::from(1728);
    a.into_iter()
        .zip(b)
        .map(|(x, y)| {
            let (quo, rem) = (x - y).div_rem(&d);
            if rem.is_zero() {
                Ok(quo)
            } else {
                Err(ModFormError::NonIntegral {
                    what: "E4^3 - E6^2".into(),
                    divisor: "1728".into(),
                })
            }
        })
        .collect()
}

/// Dimension of the space of level-1 cusp forms of weight `k`.
pub fn dim_cusp_sl2(k: i64) -> u64 {
    if k < 4 || k % 2 != 0 {
        return 0;
    }
    let base = (k / 12) as u64;
    if k % 12 == 2 {
        base.saturating_sub(1)
    } else {
        base
    }
}

/// Exponents `(a, b)` with `4a + 6b = k` and `b` in `{0, 1}`.
fn e4_e6_exponents(k: i64) -> (u32, u32) {
    if k % 4 == 0 {
        ((k / 4) as u32, 0)
    } else {
        (((k - 6) / 4) as u32, 1)
    }
}

/// Basis `f_1, ..., f_d` of `S_k` with `f_i = q^i + O(q^(d+1))`, integral
/// coefficients, expanded to `prec` terms.
pub fn cusp_basis(k: i64, prec: usize) -> Result<Vec<QSeries>, ModFormError> {
    if k < 4 || k % 2 != 0 {
        return Err(ModFormError::InvalidWeight(k));
    }
    let dim = dim_cusp_sl2(k) as usize;
    if dim == 0 {
        return Ok(Vec::new());
    }
    let d = delta(prec)?;
    let four = e4(prec);
    let six = e6(prec);
    let mut basis: Vec<QSeries> = (1..=dim)
        .map(|j| {
            let (a, b) = e4_e6_exponents(k - 12 * j as i64);
            let mut f = pow_series(&d, j as u32, prec);
            f = mul(&f, &pow_series(&four, a, prec), prec);
            mul(&f, &pow_series(&six, b, prec), prec)
        })
        .collect();
    // basis[j-1] starts at q^j with coefficient 1; clear higher pivots
    for j in (1..=dim).rev() {
        for i in (j + 1)..=dim {
            let c = basis[j - 1][i].clone();
            if c.is_zero() {
                continue;
            }
            let pivot = basis[i - 1].clone();
            for (x, y) in basis[j - 1].iter_mut().zip(&pivot) {
                *x -= &c * y;
            }
        }
    }
    Ok(basis)
}

fn check_prime(p: u64) -> Result<(), ModFormError> {
    if p < 3 || !crate::ff::is_prime(p) {
        return Err(ModFormError::InvalidPrime(p));
    }
    Ok(())
}

/// Trace of `T(p)` on `S_k(SL_2(Z))`, using
/// `a_n(T_p f) = a_(np)(f) + p^(k-1) a_(n/p)(f)`.
pub fn trace_hecke_sl2(k: i64, p: u64) -> Result<BigInt, ModFormError> {
    check_prime(p)?;
    if k < 4 || k % 2 != 0 {
        return Err(ModFormError::InvalidWeight(k));
    }
    let dim = dim_cusp_sl2(k) as usize;
    let prec = p as usize * (dim + 1) + 1;
    let basis = cusp_basis(k, prec)?;
    let pk = BigInt::from(p).pow((k - 1) as u32);
    let p = p as usize;
    let mut trace = BigInt::zero();
    for (idx, f) in basis.iter().enumerate() {
        let i = idx + 1;
        trace += &f[i * p];
        if i % p == 0 {
            trace += &pk * &f[i / p];
        }
    }
    Ok(trace)
}

/// Rank over `Q` of all products `Delta^c E4^a E6^b` (`c >= 1`) of weight `k`,
/// as q-expansions truncated to `prec` terms.
pub fn cusp_monomial_rank(k: i64, prec: usize) -> Result<usize, ModFormError> {
    if k < 0 || k % 2 != 0 {
        return Ok(0);
    }
    let d = delta(prec)?;
    let four = e4(prec);
    let six = e6(prec);
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for c in 1..=(k / 12) {
        let rest = k - 12 * c;
        for b in 0..=(rest / 6) {
            if (rest - 6 * b) % 4 != 0 {
                continue;
            }
            let a = (rest - 6 * b) / 4;
            let mut f = pow_series(&d, c as u32, prec);
            f = mul(&f, &pow_series(&four, a as u32, prec), prec);
            f = mul(&f, &pow_series(&six, b as u32, prec), prec);
            rows.push(f.into_iter().map(BigRational::from_integer).collect());
        }
    }
    Ok(rational_rank(rows))
}

fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * y;
            }
        }
        rank += 1;
    }
    rank
}

/// `tr Sym^n` of a 2x2 Frobenius with trace `a` and determinant `q`.
pub fn sym_power_trace(n: u32, a: i64, q: u64) -> BigInt {
    let a = BigInt::from(a);
    let q = BigInt::from(q);
    let mut prev = BigInt::one();
    if n == 0 {
        return prev;
    }
    let mut cur = a.clone();
    for _ in 1..n {
        let next = &a * &cur - &q * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Lefschetz trace of Frobenius on `e_c(A_1, Sym^n)` over `F_q`:
/// `sum_E tr Sym^n(Frob_E) / |Aut E|`.
pub fn trace_ec_a1(n: u32, census: &EllipticCensus) -> Result<BigInt, ModFormError> {
    let sum = census
        .entries
        .iter()
        .fold(BigInt::zero(), |acc, (&a, &count)| {
            acc + BigInt::from(count) * sym_power_trace(n, a, census.q as u64)
        });
    let normalizer = BigInt::from(census.normalizer);
    let (quo, rem) = sum.div_rem(&normalizer);
    if !rem.is_zero() {
        return Err(ModFormError::NonIntegral {
            what: format!("elliptic Lefschetz sum for Sym^{n} over F_{}", census.q),
            divisor: normalizer.to_string(),
        });
    }
    Ok(quo)
}

/// Deligne bound `|tr T(p)| <= dim S_k * 2 p^((k-1)/2)`, checked in floating point.
pub fn within_deligne_bound(trace: &BigInt, k: i64, p: u64) -> bool {
    let bound = dim_cusp_sl2(k) as f64 * 2.0 * (p as f64).powf((k - 1) as f64 / 2.0);
    let t: f64 = trace.abs().to_string().parse().unwrap_or(f64::INFINITY);
    t <= bound * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::elliptic_census;
    use crate::ff::PrimeField;

    /// `q prod (1 - q^n)^24`, independent of the Eisenstein series.
    fn delta_product(prec: usize) -> QSeries {
        let mut acc = vec![BigInt::zero(); prec];
        acc[1] = BigInt::one();
        for n in 1..prec {
            for _ in 0..24 {
                for i in (n..prec).rev() {
                    let t = acc[i - n].clone();
                    acc[i] -= t;
                }
            }
        }
        acc
    }

    #[test]
    fn delta_matches_product_formula() {
        let d = delta(40).unwrap();
        assert_eq!(d, delta_product(40));
        assert_eq!(d[2], BigInt::from(-24));
        assert_eq!(d[3], BigInt::from(252));
        assert_eq!(d[5], BigInt::from(4830));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_cusp_sl2(12), 1);
        assert_eq!(dim_cusp_sl2(14), 0);
        assert_eq!(dim_cusp_sl2(11), 0);
        assert_eq!(dim_cusp_sl2(2), 0);
        assert_eq!(dim_cusp_sl2(24), 2);
        assert_eq!(dim_cusp_sl2(26), 1);
    }

    #[test]
    fn ramanujan_tau_traces() {
        assert_eq!(trace_hecke_sl2(12, 3).unwrap(), BigInt::from(252));
        assert_eq!(trace_hecke_sl2(12, 5).unwrap(), BigInt::from(4830));
        assert_eq!(trace_hecke_sl2(12, 7).unwrap(), BigInt::from(-16744));
        for p in [3, 5, 7, 11] {
            assert!(trace_hecke_sl2(10, p).unwrap().is_zero());
        }
    }

    #[test]
    fn deligne_bound_holds() {
        for k in (12..=40).step_by(2) {
            for p in [3, 5, 7] {
                let t = trace_hecke_sl2(k, p).unwrap();
                assert!(within_deligne_bound(&t, k, p), "k = {k}, p = {p}");
            }
        }
        let t = trace_hecke_sl2(24, 3).unwrap();
        assert!(within_deligne_bound(&t, 24, 3));
    }

    #[test]
    fn echelon_rank_matches_dimension() {
        for k in (0..=60).step_by(2) {
            let prec = (k as usize / 12) + 3;
            assert_eq!(
                cusp_monomial_rank(k, prec).unwrap() as u64,
                dim_cusp_sl2(k),
                "k = {k}"
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(trace_hecke_sl2(12, 2).is_err());
        assert!(trace_hecke_sl2(13, 3).is_err());
        assert!(trace_hecke_sl2(2, 3).is_err());
    }

    #[test]
    fn sym_power_recurrence() {
        assert_eq!(sym_power_trace(0, 3, 5), BigInt::from(1));
        assert_eq!(sym_power_trace(1, 3, 5), BigInt::from(3));
        // a^2 - q
        assert_eq!(sym_power_trace(2, 3, 5), BigInt::from(4));
    }

    #[test]
    fn lefschetz_elliptic_small_cases() {
        let c3 = elliptic_census(&PrimeField::new(3).unwrap());
        assert_eq!(trace_ec_a1(0, &c3).unwrap(), BigInt::from(3));
        assert_eq!(trace_ec_a1(10, &c3).unwrap(), BigInt::from(-253));
        let c7 = elliptic_census(&PrimeField::new(7).unwrap());
        assert_eq!(trace_ec_a1(2, &c7).unwrap(), BigInt::from(-1));
        for n in [1, 3, 5, 7] {
            assert!(trace_ec_a1(n, &c7).unwrap().is_zero());
        }
    }
}
