//! Traces of Frobenius classes on the irreducible local systems `V_(l,m)`
//! of the genus-2 symplectic similitude group.
//!
//! The trace is evaluated through the complete homogeneous symmetric
//! functions `H_j` of the four Frobenius eigenvalues and a 2x2 symplectic
//! Jacobi-Trudi determinant homogenized by the multiplier `p`:
//!
//! ```text
//! chi_(l,m) = H_l H_m + p H_l H_(m-2) - H_(l+1) H_(m-1) - p H_(l-1) H_(m-1)
//! ```

pub mod freudenthal;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::census::FrobeniusClass;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterError {
    #[error("invalid highest weight ({l}, {m}): need l >= m >= 0")]
    InvalidWeight { l: i64, m: i64 },
    #[error("highest weight ({l}, {m}) exceeds the oracle budget l + m <= {budget}")]
    BudgetExceeded { l: u32, m: u32, budget: u32 },
    #[error("weight-multiplicity recursion produced a non-integral value at {0:?}")]
    NonIntegral((i32, i32)),
    #[error("character polynomial is not symmetric")]
    NotSymmetric,
}

/// Highest weight `(l, m)`, `l >= m >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LocalSystem {
    pub l: u32,
    pub m: u32,
}

impl LocalSystem {
    pub fn new(l: i64, m: i64) -> Result<Self, CharacterError> {
        if m < 0 || l < m || l > u32::MAX as i64 {
            return Err(CharacterError::InvalidWeight { l, m });
        }
        Ok(Self {
            l: l as u32,
            m: m as u32,
        })
    }

    /// `-1` acts on `V_(l,m)` by `(-1)^(l+m)`; only even `l + m` can carry
    /// cohomology.
    pub fn has_even_parity(&self) -> bool {
        (self.l + self.m).is_multiple_of(2)
    }

    pub fn weight_sum(&self) -> u32 {
        self.l + self.m
    }

    pub fn dimension(&self) -> u64 {
        let (l, m) = (self.l as u64, self.m as u64);
        (l - m + 1) * (m + 1) * (l + 2) * (l + m + 3) / 6
    }
}

/// `H_0, ..., H_n` for the class with parameters `(a1, a2, p)`.
pub fn h_sequence_at(a1: &BigInt, a2: &BigInt, p: &BigInt, n: usize) -> Vec<BigInt> {
    let mut h: Vec<BigInt> = Vec::with_capacity(n + 1);
    let pa1 = p * a1;
    let p2 = p * p;
    let zero = BigInt::zero();
    for j in 0..=n {
        if j == 0 {
            h.push(BigInt::one());
            continue;
        }
        let back = |k: usize| if j >= k { &h[j - k] } else { &zero };
        let next = a1 * back(1) - a2 * back(2) + &pa1 * back(3) - &p2 * back(4);
        h.push(next);
    }
    h
}

pub fn h_sequence(cls: &FrobeniusClass, n: usize) -> Vec<BigInt> {
    h_sequence_at(
        &BigInt::from(cls.a1),
        &BigInt::from(cls.a2),
        &BigInt::from(cls.p),
        n,
    )
}

/// Trace on `V_(l,m)` as an integer polynomial in `(a1, a2, p)`.
pub fn sp4_trace_at(sys: LocalSystem, a1: &BigInt, a2: &BigInt, p: &BigInt) -> BigInt {
    let (l, m) = (sys.l as i64, sys.m as i64);
    let h = h_sequence_at(a1, a2, p, (l + 1) as usize);
    let get = |j: i64| -> BigInt {
        if j < 0 {
            BigInt::zero()
        } else {
            h[j as usize].clone()
        }
    };
    get(l) * get(m) + p * get(l) * get(m - 2)
        - get(l + 1) * get(m - 1)
        - p * get(l - 1) * get(m - 1)
}

pub fn sp4_trace(sys: LocalSystem, cls: &FrobeniusClass) -> BigInt {
    sp4_trace_at(
        sys,
        &BigInt::from(cls.a1),
        &BigInt::from(cls.a2),
        &BigInt::from(cls.p),
    )
}
