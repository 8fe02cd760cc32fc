//! Trace of `T(p)` on genus-2 vector-valued Siegel cusp forms of weight
//! `(k1, k2)` for the full modular group.
//!
//! ```text
//! N * tr T(p) = -tr(F_p | e_c(A_2, V_(l,m))) + second_row
//! ```
//!
//! with `(l, m) = (k1 - 3, k2 - 3)`, `N` the normalization factor (default 1)
//! and
//!
//! ```text
//! second_row = s[r1] p^(k2-2) tr(F_p | e_c(A_1, Sym^(r2-2)))
//!            + s[r2]
//!            + (-1)^k1 tr(F_p | e_c(A_1, Sym^(k-2)))
//!            + (1 + (-1)^k1) / 2
//! ```
//!
//! where `s[r] = dim S_r(SL_2(Z))`, `r1 = k1 + k2 - 2`, `r2 = k1 - k2 + 2`
//! and `k = k1` for even `k1`, `k = k2 - 1` for odd `k1`.
//!
//! The `A_2` trace is a Lefschetz sum over the Jacobian locus (genus-2
//! census) and the product locus (symmetric square of the elliptic
//! groupoid).

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::census::{
    census_load, census_store, elliptic_census, elliptic_load, elliptic_store, file_checksum,
    genus2_census, CensusError, CensusTable, EllipticCensus, FrobeniusClass, Genus2Options,
};
use crate::ff::{PrimeField, QuadExtField};
use crate::modform1::{dim_cusp_sl2, trace_ec_a1, trace_hecke_sl2, ModFormError};
use crate::sp4char::{sp4_trace, LocalSystem};

/// Divisor applied to the right-hand side. The value 1 reproduces published
/// Hecke eigenvalues on one-dimensional spaces; 4 is accepted for comparison.
pub const DEFAULT_NORMALIZATION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("weight ({k1}, {k2}) is not regular: need k1 > k2 > 3")]
    Irregular { k1: i64, k2: i64 },
    #[error("weight ({k1}, {k2}) has odd k1 + k2; the local system carries no cohomology")]
    OddParity { k1: i64, k2: i64 },
    #[error("{what} is not an integer: {value}")]
    NonIntegral { what: &'static str, value: String },
    #[error(
        "formula consistency: {four_times_trace} is not divisible by {normalization} at weight ({k1}, {k2}), p = {p}"
    )]
    NotDivisible {
        k1: i64,
        k2: i64,
        p: u32,
        four_times_trace: String,
        normalization: u32,
        report: Box<TraceReport>,
    },
    #[error("normalization factor must be positive")]
    BadNormalization,
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    ModForm(#[from] ModFormError),
}

/// Regular weight `(k1, k2)`, `k1 > k2 > 3`, `k1 + k2` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightPair {
    pub k1: i64,
    pub k2: i64,
}

impl WeightPair {
    pub fn new(k1: i64, k2: i64) -> Result<Self, TraceError> {
        if !(k1 > k2 && k2 > 3) {
            return Err(TraceError::Irregular { k1, k2 });
        }
        if (k1 + k2) % 2 != 0 {
            return Err(TraceError::OddParity { k1, k2 });
        }
        Ok(Self { k1, k2 })
    }

    pub fn r1(&self) -> i64 {
        self.k1 + self.k2 - 2
    }

    pub fn r2(&self) -> i64 {
        self.k1 - self.k2 + 2
    }

    pub fn local_system(&self) -> LocalSystem {
        LocalSystem {
            l: (self.k1 - 3) as u32,
            m: (self.k2 - 3) as u32,
        }
    }

    /// All regular parity-valid weights with `k1 + k2 <= max_sum`.
    pub fn all_up_to(max_sum: i64) -> Vec<Self> {
        let mut out = Vec::new();
        for k2 in 4..=max_sum {
            for k1 in (k2 + 1)..=(max_sum - k2) {
                if let Ok(w) = Self::new(k1, k2) {
                    out.push(w);
                }
            }
        }
        out.sort_by_key(|w| (w.k1 + w.k2, w.k1));
        out
    }
}

/// Checksums of the three census files a prime's data was loaded from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CensusChecksums {
    pub elliptic_fp: String,
    pub elliptic_fp2: String,
    pub genus2: String,
}

/// All census data needed at one prime.
#[derive(Debug, Clone)]
pub struct PrimeCensus {
    pub p: u32,
    pub elliptic_p: EllipticCensus,
    pub elliptic_p2: EllipticCensus,
    pub genus2: CensusTable,
    pub checksums: Option<CensusChecksums>,
}

impl PrimeCensus {
    pub fn compute(p: u64, options: Genus2Options) -> Result<Self, CensusError> {
        let field = PrimeField::new(p)?;
        let elliptic_p = elliptic_census(&field);
        let elliptic_p2 = elliptic_census(&QuadExtField::new(field));
        let genus2 = genus2_census(p, options)?;
        Ok(Self {
            p: p as u32,
            elliptic_p,
            elliptic_p2,
            genus2,
            checksums: None,
        })
    }

    pub fn file_names(p: u64) -> [String; 3] {
        [
            format!("elliptic_p{p}.csv"),
            format!("elliptic_p{p}_sq.csv"),
            format!("genus2_p{p}.csv"),
        ]
    }

    pub fn store(&self, dir: &Path) -> Result<(), CensusError> {
        let [e1, e2, g] = Self::file_names(self.p as u64);
        elliptic_store(&self.elliptic_p, &dir.join(e1))?;
        elliptic_store(&self.elliptic_p2, &dir.join(e2))?;
        census_store(&self.genus2, &dir.join(g))
    }

    pub fn exists(dir: &Path, p: u64) -> bool {
        Self::file_names(p).iter().all(|f| dir.join(f).is_file())
    }

    /// Loads and verifies the three census files for `p`.
    pub fn load(dir: &Path, p: u64) -> Result<Self, CensusError> {
        let [e1, e2, g] = Self::file_names(p).map(|f| dir.join(f));
        let elliptic_p = elliptic_load(&e1)?;
        let elliptic_p2 = elliptic_load(&e2)?;
        let genus2 = census_load(&g)?;
        let consistent = elliptic_p.p as u64 == p
            && elliptic_p.q as u64 == p
            && elliptic_p2.q as u64 == p * p
            && genus2.p as u64 == p;
        if !consistent {
            return Err(CensusError::Malformed {
                path: dir.display().to_string(),
                reason: format!("census files do not all belong to p = {p}"),
            });
        }
        Ok(Self {
            p: p as u32,
            checksums: Some(CensusChecksums {
                elliptic_fp: file_checksum(&e1)?,
                elliptic_fp2: file_checksum(&e2)?,
                genus2: file_checksum(&g)?,
            }),
            elliptic_p,
            elliptic_p2,
            genus2,
        })
    }

    pub fn verify(&self) -> Result<(), CensusError> {
        self.elliptic_p.verify()?;
        self.elliptic_p2.verify()?;
        self.genus2.verify()
    }
}

fn ratio(num: BigInt, den: u64) -> BigRational {
    BigRational::new(num, BigInt::from(den))
}

/// Lefschetz contribution of products of elliptic curves, including Weil
/// restrictions of curves over `F_{p^2}`:
/// `1/2 (sum_{E1, E2} chi(E1 x E2) + sum_{E / F_{p^2}} chi(Res E))`,
/// every sum weighted by `1/|Aut|`.
pub fn product_locus_trace(sys: LocalSystem, data: &PrimeCensus) -> BigRational {
    let p = data.p;
    let e = &data.elliptic_p;
    let mut pairs = BigInt::zero();
    for (&a, &na) in &e.entries {
        for (&b, &nb) in &e.entries {
            let chi = sp4_trace(sys, &FrobeniusClass::product(p, a, b));
            pairs += BigInt::from(na) * BigInt::from(nb) * chi;
        }
    }
    let e2 = &data.elliptic_p2;
    let mut restrictions = BigInt::zero();
    for (&t, &n) in &e2.entries {
        restrictions += BigInt::from(n) * sp4_trace(sys, &FrobeniusClass::restriction(p, t));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    half * (ratio(pairs, e.normalizer * e.normalizer) + ratio(restrictions, e2.normalizer))
}

/// Lefschetz contribution of Jacobians of genus-2 curves.
pub fn jacobian_locus_trace(sys: LocalSystem, data: &PrimeCensus) -> BigRational {
    let table = &data.genus2;
    let sum = table.classes().fold(BigInt::zero(), |acc, (cls, n)| {
        acc + BigInt::from(n) * sp4_trace(sys, &cls)
    });
    ratio(sum, table.normalizer)
}

fn integral(value: BigRational, what: &'static str) -> Result<BigInt, TraceError> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(TraceError::NonIntegral {
            what,
            value: value.to_string(),
        })
    }
}

/// `tr(F_p | e_c(A_2, V_(l,m)))`.
pub fn trace_ec_a2(sys: LocalSystem, data: &PrimeCensus) -> Result<BigInt, TraceError> {
    integral(
        jacobian_locus_trace(sys, data) + product_locus_trace(sys, data),
        "A_2 Lefschetz sum",
    )
}

/// `dim S_r1 * p^(k2-2) * tr T(p)|S_r2`: the trace of Frobenius on the
/// endoscopic part of the cohomology.
pub fn endoscopic_term(w: WeightPair, p: u64) -> Result<BigInt, TraceError> {
    let dim = dim_cusp_sl2(w.r1());
    if dim == 0 {
        return Ok(BigInt::zero());
    }
    let twist = BigInt::from(p).pow((w.k2 - 2) as u32);
    Ok(BigInt::from(dim) * twist * trace_hecke_sl2(w.r2(), p)?)
}

/// Endoscopic plus Eisenstein contributions in elliptic terms (see module docs).
pub fn second_row(w: WeightPair, data: &PrimeCensus) -> Result<BigInt, TraceError> {
    let p = BigInt::from(data.p);
    let e = &data.elliptic_p;
    let k1_even = w.k1 % 2 == 0;
    let k = if k1_even { w.k1 } else { w.k2 - 1 };

    let endo = BigInt::from(dim_cusp_sl2(w.r1()))
        * p.pow((w.k2 - 2) as u32)
        * trace_ec_a1((w.r2() - 2) as u32, e)?;
    let cusp = BigInt::from(dim_cusp_sl2(w.r2()));
    let sign = if k1_even {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let eis = sign * trace_ec_a1((k - 2) as u32, e)?;
    let parity = BigInt::from(k1_even as i64);
    Ok(endo + cusp + eis + parity)
}

/// Term-by-term record of one Hecke trace evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub k1: i64,
    pub k2: i64,
    pub p: u32,
    pub r1: i64,
    pub r2: i64,
    pub l: u32,
    pub m: u32,
    #[serde(serialize_with = "decimal")]
    pub trace_a2: BigInt,
    #[serde(serialize_with = "fraction")]
    pub jacobian_term: BigRational,
    #[serde(serialize_with = "fraction")]
    pub product_term: BigRational,
    #[serde(serialize_with = "decimal")]
    pub second_row: BigInt,
    #[serde(serialize_with = "decimal")]
    pub endoscopic_term: BigInt,
    #[serde(serialize_with = "decimal")]
    pub eisenstein_term: BigInt,
    #[serde(serialize_with = "decimal")]
    pub four_times_trace: BigInt,
    #[serde(serialize_with = "optional_decimal")]
    pub hecke_trace: Option<BigInt>,
    pub normalization_factor: u32,
    pub divisible: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub census_checksums: Option<CensusChecksums>,
    pub code_version: String,
}

fn decimal<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn optional_decimal<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn fraction<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl TraceReport {
    pub const CSV_HEADER: [&'static str; 9] = [
        "k1",
        "k2",
        "p",
        "traceA2",
        "secondRow",
        "endoTerm",
        "fourTimesTrace",
        "heckeTrace",
        "checksPassed",
    ];

    pub fn csv_row(&self) -> [String; 9] {
        [
            self.k1.to_string(),
            self.k2.to_string(),
            self.p.to_string(),
            self.trace_a2.to_string(),
            self.second_row.to_string(),
            self.endoscopic_term.to_string(),
            self.four_times_trace.to_string(),
            self.hecke_trace
                .as_ref()
                .map(BigInt::to_string)
                .unwrap_or_default(),
            self.checks_passed().to_string(),
        ]
    }

    pub fn checks_passed(&self) -> bool {
        self.divisible
            && self.trace_a2 == (&self.jacobian_term + &self.product_term).to_integer()
            && self.eisenstein_term == &self.second_row + &self.endoscopic_term
    }
}

/// Evaluates the trace formula for one weight at one prime.
///
/// A normalization factor that does not divide the right-hand side is
/// returned as [`TraceError::NotDivisible`] carrying the full report.
pub fn hecke_trace_genus2(
    w: WeightPair,
    data: &PrimeCensus,
    normalization: u32,
) -> Result<TraceReport, TraceError> {
    if normalization == 0 {
        return Err(TraceError::BadNormalization);
    }
    let sys = w.local_system();
    let jacobian_term = jacobian_locus_trace(sys, data);
    let product_term = product_locus_trace(sys, data);
    let trace_a2 = integral(&jacobian_term + &product_term, "A_2 Lefschetz sum")?;
    let second = second_row(w, data)?;
    let endo = endoscopic_term(w, data.p as u64)?;
    let four_times_trace = -&trace_a2 + &second;
    let (quo, rem) = four_times_trace.div_rem(&BigInt::from(normalization));
    let divisible = rem.is_zero();
    let report = TraceReport {
        k1: w.k1,
        k2: w.k2,
        p: data.p,
        r1: w.r1(),
        r2: w.r2(),
        l: sys.l,
        m: sys.m,
        trace_a2,
        jacobian_term,
        product_term,
        eisenstein_term: &second + &endo,
        second_row: second,
        endoscopic_term: endo,
        hecke_trace: divisible.then_some(quo),
        four_times_trace,
        normalization_factor: normalization,
        divisible,
        provenance: Provenance {
            census_checksums: data.checksums.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    if !divisible {
        return Err(TraceError::NotDivisible {
            k1: w.k1,
            k2: w.k2,
            p: data.p,
            four_times_trace: report.four_times_trace.to_string(),
            normalization,
            report: Box::new(report),
        });
    }
    Ok(report)
}
