use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{CensusError, Locus};
use crate::ff::FiniteField;

/// Histogram of Frobenius traces of elliptic curves over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCensus {
    pub p: u32,
    pub q: u32,
    pub locus: Locus,
    /// `q(q - 1)`, the order of `x -> u^2 x + r, y -> u^3 y`.
    pub normalizer: u64,
    /// trace `a = q + 1 - #E(F_q)` -> number of models
    pub entries: BTreeMap<i64, u64>,
    pub total: u64,
}

impl EllipticCensus {
    pub fn count(&self, a: i64) -> u64 {
        self.entries.get(&a).copied().unwrap_or(0)
    }

    /// `sum / normalizer = q` and Hasse support.
    pub fn check_mass(&self) -> Result<(), CensusError> {
        let q = self.q as u64;
        let sum: u64 = self.entries.values().sum();
        if sum != self.total || self.normalizer != q * (q - 1) || sum != q * self.normalizer {
            return Err(CensusError::MassIdentity {
                locus: self.locus,
                total: sum,
                normalizer: self.normalizer,
                expected: q,
            });
        }
        for &a in self.entries.keys() {
            if (a * a) as u64 > 4 * q {
                return Err(CensusError::WeilViolation {
                    p: self.p,
                    a1: a,
                    a2: 0,
                });
            }
        }
        Ok(())
    }

    pub fn check_twist_symmetry(&self) -> Result<(), CensusError> {
        for (&a, &n) in &self.entries {
            if self.count(-a) != n {
                return Err(CensusError::TwistSymmetry {
                    locus: self.locus,
                    key: a.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn verify(&self) -> Result<(), CensusError> {
        self.check_mass()?;
        self.check_twist_symmetry()
    }
}

/// Discriminant of the monic cubic `x^3 + b x^2 + c x + d`, valid in every
/// characteristic.
pub(crate) fn cubic_discriminant<F: FiniteField>(f: &F, b: u32, c: u32, d: u32) -> u32 {
    let k = |n: i64| f.constant(n);
    let bb = f.mul(b, b);
    let cc = f.mul(c, c);
    let terms = [
        f.mul(bb, cc),
        f.mul(k(-4), f.mul(cc, c)),
        f.mul(k(-4), f.mul(f.mul(bb, b), d)),
        f.mul(k(-27), f.mul(d, d)),
        f.mul(k(18), f.mul(f.mul(b, c), d)),
    ];
    terms.into_iter().fold(0, |acc, t| f.add(acc, t))
}

/// Enumerates every model `y^2 = x^3 + c2 x^2 + c4 x + c6` with squarefree
/// right-hand side and histograms `a = q + 1 - #E(F_q)`.
pub fn elliptic_census<F: FiniteField>(field: &F) -> EllipticCensus {
    let q = field.order();
    let qu = q as usize;
    let locus = if q == field.characteristic() {
        Locus::EllipticFp
    } else {
        Locus::EllipticFp2
    };
    let add: Vec<u32> = (0..q)
        .flat_map(|a| (0..q).map(move |b| (a, b)))
        .map(|(a, b)| field.add(a, b))
        .collect();
    let chi: Vec<i32> = (0..q).map(|a| field.chi(a)).collect();
    let cube: Vec<u32> = (0..q).map(|x| field.mul(x, field.mul(x, x))).collect();
    let square: Vec<u32> = (0..q).map(|x| field.mul(x, x)).collect();

    // a ranges over |a| <= 2 sqrt(q)
    let bound = (2.0 * (q as f64).sqrt()).floor() as i64 + 1;
    let width = (2 * bound + 1) as usize;

    let hist = (0..q)
        .into_par_iter()
        .map(|c2| {
            let mut hist = vec![0u64; width];
            let mut g = vec![0u32; qu];
            for c4 in 0..q {
                for x in 0..q {
                    let t = field.add(cube[x as usize], field.mul(c2, square[x as usize]));
                    g[x as usize] = field.add(t, field.mul(c4, x));
                }
                for c6 in 0..q {
                    if cubic_discriminant(field, c2, c4, c6) == 0 {
                        continue;
                    }
                    let row = &add[c6 as usize * qu..(c6 as usize + 1) * qu];
                    let s: i64 = g
                        .iter()
                        .map(|&v| chi[row[v as usize] as usize] as i64)
                        .sum();
                    // #E = q + 1 + s
                    let a = -s;
                    hist[(a + bound) as usize] += 1;
                }
            }
            hist
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let entries: BTreeMap<i64, u64> = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, n)| n > 0)
        .map(|(i, n)| (i as i64 - bound, n))
        .collect();
    let total = entries.values().sum();
    let q64 = q as u64;
    EllipticCensus {
        p: field.characteristic(),
        q,
        locus,
        normalizer: q64 * (q64 - 1),
        entries,
        total,
    }
}
