//! Weight multiplicities of `V_(l,m)` by Freudenthal's recursion, and the
//! character rebuilt from them. Used as an independent check of
//! [`sp4_trace_at`](super::sp4_trace_at).
//!
//! Weights are written in the orthonormal basis `e1, e2`; the positive roots
//! are `e1 - e2, e1 + e2, 2 e1, 2 e2` and `rho = (2, 1)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{CharacterError, LocalSystem};

pub const DEFAULT_BUDGET: u32 = 24;

const POSITIVE_ROOTS: [(i32, i32); 4] = [(1, -1), (1, 1), (2, 0), (0, 2)];
const RHO: (i32, i32) = (2, 1);

fn dot(a: (i32, i32), b: (i32, i32)) -> i64 {
    a.0 as i64 * b.0 as i64 + a.1 as i64 * b.1 as i64
}

fn shifted_norm(mu: (i32, i32)) -> i64 {
    let v = (mu.0 + RHO.0, mu.1 + RHO.1);
    dot(v, v)
}

/// Multiplicity of every weight of `V_(l,m)` (zero weights omitted).
pub fn weight_multiplicities(
    sys: LocalSystem,
    budget: u32,
) -> Result<BTreeMap<(i32, i32), u64>, CharacterError> {
    if sys.weight_sum() > budget {
        return Err(CharacterError::BudgetExceeded {
            l: sys.l,
            m: sys.m,
            budget,
        });
    }
    let (l, m) = (sys.l as i32, sys.m as i32);
    let top = (l, m);
    let top_norm = shifted_norm(top);

    // Candidates lie below the highest weight by non-negative integer
    // combinations c1 (e1 - e2) + c2 (2 e2); sort by c1 + c2.
    let mut candidates = Vec::new();
    for w1 in -l..=l {
        for w2 in -l..=l {
            let (d1, d2) = (l - w1, m - w2);
            if d1 < 0 || (d1 + d2) < 0 || (d1 + d2) % 2 != 0 {
                continue;
            }
            let depth = d1 + (d1 + d2) / 2;
            candidates.push((depth, (w1, w2)));
        }
    }
    candidates.sort();

    let mut mult: HashMap<(i32, i32), i64> = HashMap::new();
    for &(depth, mu) in &candidates {
        if depth == 0 {
            mult.insert(mu, 1);
            continue;
        }
        let mut numerator = 0i64;
        for &alpha in &POSITIVE_ROOTS {
            let mut k = 1;
            loop {
                let shifted = (mu.0 + k * alpha.0, mu.1 + k * alpha.1);
                if shifted.0.abs() > l || shifted.1.abs() > l {
                    break;
                }
                if let Some(&n) = mult.get(&shifted) {
                    numerator += n * dot(shifted, alpha);
                }
                k += 1;
            }
        }
        numerator *= 2;
        let denominator = top_norm - shifted_norm(mu);
        if numerator == 0 {
            continue;
        }
        if denominator <= 0 || numerator % denominator != 0 {
            return Err(CharacterError::NonIntegral(mu));
        }
        mult.insert(mu, numerator / denominator);
    }
    Ok(mult
        .into_iter()
        .filter(|&(_, n)| n > 0)
        .map(|(mu, n)| (mu, n as u64))
        .collect())
}

/// `alpha^w + (p/alpha)^w` as a polynomial in `x = alpha + p/alpha`
/// (index = power of `x`), with the convention that `w = 0` gives `1`.
fn orbit_polynomial(w: usize, p: &BigInt) -> Vec<BigInt> {
    if w == 0 {
        return vec![BigInt::one()];
    }
    // P_0 = 2, P_1 = x, P_(n+1) = x P_n - p P_(n-1)
    let mut prev = vec![BigInt::from(2)];
    let mut cur = vec![BigInt::zero(), BigInt::one()];
    for _ in 1..w {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= p * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Character value at `(a1, a2, p)` from a weight-multiplicity table.
///
/// Weight `(w1, w2)` contributes `p^((l+m-w1-w2)/2) alpha1^w1 alpha2^w2`.
/// Grouping sign changes gives a symmetric polynomial in
/// `x_i = alpha_i + p/alpha_i`, which is rewritten in `x1 + x2 = a1` and
/// `x1 x2 = a2 - 2p`.
pub fn character_from_weights(
    weights: &BTreeMap<(i32, i32), u64>,
    weight_sum: u32,
    a1: &BigInt,
    a2: &BigInt,
    p: &BigInt,
) -> Result<BigInt, CharacterError> {
    let mut poly: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    for (&(w1, w2), &n) in weights {
        if w1 < 0 || w2 < 0 {
            continue;
        }
        let shift = (weight_sum as i64 - w1 as i64 - w2 as i64) / 2;
        let scale = BigInt::from(n) * p.pow(shift as u32);
        let f1 = orbit_polynomial(w1 as usize, p);
        let f2 = orbit_polynomial(w2 as usize, p);
        for (i, c1) in f1.iter().enumerate() {
            if c1.is_zero() {
                continue;
            }
            for (j, c2) in f2.iter().enumerate() {
                if c2.is_zero() {
                    continue;
                }
                *poly.entry((i, j)).or_insert_with(BigInt::zero) += &scale * c1 * c2;
            }
        }
    }
    poly.retain(|_, c| !c.is_zero());

    let e1 = a1.clone();
    let e2 = a2 - BigInt::from(2) * p;
    let max_degree = poly.keys().map(|&(i, j)| i.max(j)).max().unwrap_or(0);
    // power sums s_n = x1^n + x2^n
    let mut power_sums = vec![BigInt::from(2), e1.clone()];
    for n in 2..=max_degree {
        let next = &e1 * &power_sums[n - 1] - &e2 * &power_sums[n - 2];
        power_sums.push(next);
    }

    let zero = BigInt::zero();
    let mut value = BigInt::zero();
    for (&(i, j), c) in &poly {
        if poly.get(&(j, i)).unwrap_or(&zero) != c {
            return Err(CharacterError::NotSymmetric);
        }
        if i == j {
            value += c * e2.pow(i as u32);
        } else if i > j {
            value += c * e2.pow(j as u32) * &power_sums[i - j];
        }
    }
    Ok(value)
}

/// Convenience wrapper: multiplicities then character value.
pub fn freudenthal_trace(
    sys: LocalSystem,
    budget: u32,
    a1: &BigInt,
    a2: &BigInt,
    p: &BigInt,
) -> Result<BigInt, CharacterError> {
    let weights = weight_multiplicities(sys, budget)?;
    character_from_weights(&weights, sys.weight_sum(), a1, a2, p)
}
