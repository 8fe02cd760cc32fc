//! Mass-weighted censuses of curves over small finite fields.
//!
//! A census records, for every Frobenius class that occurs, how many explicit
//! models of curves over `F_q` realize it. Dividing by the order of the group
//! of model substitutions turns model counts into groupoid cardinalities
//! (each isomorphism class weighted by `1/|Aut|`), which is exactly what the
//! Lefschetz sums over `A_1(F_p)` and `A_2(F_p)` need.
//!
//! * [`elliptic_census`]: models `y^2 = x^3 + c2 x^2 + c4 x + c6` over `F_q`,
//!   normalizer `q(q - 1)`.
//! * [`genus2_census`]: binary sextic forms `y^2 = F(x, z)` over `F_p`,
//!   normalizer `|GL_2(F_p)|`.

mod elliptic;
mod genus2;
pub mod oracle;
mod store;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ff::FieldError;

pub use elliptic::{elliptic_census, EllipticCensus};
pub use genus2::{
    frobenius_class, genus2_census, genus2_census_full, genus2_point_count, is_squarefree_sextic,
    Genus2Options, Sextic,
};
pub use store::{
    census_load, census_store, elliptic_load, elliptic_store, file_checksum, CENSUS_FORMAT_VERSION,
};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("non-integral a2 from point counts N1 = {n1}, N2 = {n2} at p = {p}")]
    NonIntegralClass { n1: i64, n2: i64, p: u32 },
    #[error("Frobenius class ({a1}, {a2}) at p = {p} violates the Weil bounds")]
    WeilViolation { p: u32, a1: i64, a2: i64 },
    #[error("mass identity failed for {locus}: {total} models / {normalizer} != {expected}")]
    MassIdentity {
        locus: Locus,
        total: u64,
        normalizer: u64,
        expected: u64,
    },
    #[error("twist symmetry failed for {locus} at key {key}")]
    TwistSymmetry { locus: Locus, key: String },
    #[error("census file format version {found}, expected {expected}")]
    Version { found: String, expected: u32 },
    #[error("census file checksum mismatch: header {stored}, contents {computed}")]
    Checksum { stored: String, computed: String },
    #[error("census file {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("census file records locus {found}, expected {expected}")]
    WrongLocus { found: String, expected: Locus },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Which moduli locus a census samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Locus {
    /// Elliptic curves over the prime field.
    EllipticFp,
    /// Elliptic curves over the quadratic extension.
    EllipticFp2,
    /// Genus-2 curves, i.e. the Jacobian locus of `A_2`.
    Genus2Jacobian,
}

impl Locus {
    pub fn tag(self) -> &'static str {
        match self {
            Locus::EllipticFp => "elliptic-fp",
            Locus::EllipticFp2 => "elliptic-fp2",
            Locus::Genus2Jacobian => "genus2-jacobian",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [Locus::EllipticFp, Locus::EllipticFp2, Locus::Genus2Jacobian]
            .into_iter()
            .find(|l| l.tag() == tag)
    }
}

impl std::fmt::Display for Locus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Frobenius on `H^1` of a genus-2 curve (or abelian surface) over `F_p`,
/// with characteristic polynomial `x^4 - a1 x^3 + a2 x^2 - p a1 x + p^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FrobeniusClass {
    pub p: u32,
    pub a1: i64,
    pub a2: i64,
}

impl FrobeniusClass {
    pub fn new(p: u32, a1: i64, a2: i64) -> Result<Self, CensusError> {
        let cls = Self { p, a1, a2 };
        if cls.within_weil_envelope() {
            Ok(cls)
        } else {
            Err(CensusError::WeilViolation { p, a1, a2 })
        }
    }

    /// Class of the product `E1 x E2` from the two Frobenius traces.
    pub fn product(p: u32, a: i64, b: i64) -> Self {
        Self {
            p,
            a1: a + b,
            a2: a * b + 2 * p as i64,
        }
    }

    /// Class of the Weil restriction of an elliptic curve over `F_{p^2}` with
    /// trace `t`: characteristic polynomial `x^4 - t x^2 + p^2`.
    pub fn restriction(p: u32, t: i64) -> Self {
        Self { p, a1: 0, a2: -t }
    }

    /// Identity element of `GSp_4` at similitude 1 (all eigenvalues 1).
    pub fn identity() -> Self {
        Self { p: 1, a1: 4, a2: 6 }
    }

    /// `|a1| <= 4 sqrt(p)` and `|a2| <= 6p`.
    pub fn within_weil_envelope(&self) -> bool {
        let p = self.p as i64;
        self.a1 * self.a1 <= 16 * p && self.a2.abs() <= 6 * p
    }

    /// Whether every complex root of the characteristic polynomial has
    /// absolute value `sqrt(p)`, up to `tol`.
    ///
    /// Roots pair up as `(alpha, p/alpha)`; with `y = alpha + p/alpha` this
    /// holds exactly when `y^2 - a1 y + (a2 - 2p)` has real roots in
    /// `[-2 sqrt(p), 2 sqrt(p)]`.
    pub fn roots_on_weil_circle(&self, tol: f64) -> bool {
        let (a1, a2, p) = (self.a1 as f64, self.a2 as f64, self.p as f64);
        let disc = a1 * a1 - 4.0 * (a2 - 2.0 * p);
        if disc < -tol {
            return false;
        }
        let s = disc.max(0.0).sqrt();
        let bound = 2.0 * p.sqrt() + tol;
        [(a1 + s) / 2.0, (a1 - s) / 2.0]
            .iter()
            .all(|y| y.abs() <= bound)
    }
}

/// Histogram of genus-2 Frobenius classes over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub p: u32,
    pub locus: Locus,
    /// `|GL_2(F_p)| = (p^2 - 1)(p^2 - p)`.
    pub normalizer: u64,
    /// `(a1, a2) -> number of squarefree sextic models`.
    pub entries: BTreeMap<(i64, i64), u64>,
    pub total: u64,
}

impl CensusTable {
    pub fn gl2_order(p: u32) -> u64 {
        let p = p as u64;
        (p * p - 1) * (p * p - p)
    }

    /// Number of squarefree binary sextic forms: `(p - 1)(p^6 - p^4)`.
    pub fn expected_total(p: u32) -> u64 {
        let p = p as u64;
        (p - 1) * (p.pow(6) - p.pow(4))
    }

    pub fn count(&self, a1: i64, a2: i64) -> u64 {
        self.entries.get(&(a1, a2)).copied().unwrap_or(0)
    }

    pub fn classes(&self) -> impl Iterator<Item = (FrobeniusClass, u64)> + '_ {
        self.entries
            .iter()
            .map(move |(&(a1, a2), &n)| (FrobeniusClass { p: self.p, a1, a2 }, n))
    }

    /// Checks `total = sum of counts` and `total / normalizer = p^3`.
    pub fn check_mass(&self) -> Result<(), CensusError> {
        let sum: u64 = self.entries.values().sum();
        let p = self.p as u64;
        let expected = p.pow(3);
        if sum != self.total
            || self.normalizer != Self::gl2_order(self.p)
            || self.total != expected * self.normalizer
        {
            return Err(CensusError::MassIdentity {
                locus: self.locus,
                total: sum,
                normalizer: self.normalizer,
                expected,
            });
        }
        Ok(())
    }

    pub fn check_twist_symmetry(&self) -> Result<(), CensusError> {
        for (&(a1, a2), &n) in &self.entries {
            if self.count(-a1, a2) != n {
                return Err(CensusError::TwistSymmetry {
                    locus: self.locus,
                    key: format!("({a1}, {a2})"),
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
