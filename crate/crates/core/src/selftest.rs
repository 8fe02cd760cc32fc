//! Invariant battery run by `siegel-hecke selftest`.
//!
//! Every suite returns a [`SuiteOutcome`]; a failing check never aborts the
//! remaining suites.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::census::oracle::genus2_groupoid;
use crate::census::{FrobeniusClass, Genus2Options};
use crate::ff::{FiniteField, PrimeField, QuadExtField};
use crate::modform1::{trace_ec_a1, trace_hecke_sl2};
use crate::sp4char::freudenthal::{freudenthal_trace, DEFAULT_BUDGET};
use crate::sp4char::{sp4_trace, sp4_trace_at, CharacterError, LocalSystem};
use crate::trace2::{
    hecke_trace_genus2, product_locus_trace, second_row, trace_ec_a2, PrimeCensus, TraceError,
    WeightPair, DEFAULT_NORMALIZATION,
};

#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub cache_dir: PathBuf,
    pub primes: Vec<u64>,
    pub workers: Option<usize>,
    /// Largest `l + m` handed to the weight-multiplicity oracle.
    pub oracle_budget: u32,
    /// Largest `l + m` in the character agreement suite.
    pub character_max_sum: u32,
    pub samples_per_weight: usize,
    pub seed: u64,
    pub normalization: u32,
    pub dim0_weights: Vec<WeightPair>,
}

impl SelftestConfig {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            cache_dir: cache_dir.into(),
            primes: vec![3, 5],
            workers: None,
            oracle_budget: DEFAULT_BUDGET,
            character_max_sum: 12,
            samples_per_weight: 50,
            seed: 0x5eed,
            normalization: DEFAULT_NORMALIZATION,
            dim0_weights: WeightPair::all_up_to(14),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notices: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.checks += 1;
        self.failures.push(what);
    }
}

/// Loads the census for `p` from `dir`, building and storing it first when
/// the files are absent. Present but invalid files are an error, never
/// silently rebuilt.
pub fn load_or_build(dir: &Path, p: u64, options: Genus2Options) -> Result<PrimeCensus, String> {
    if !PrimeCensus::exists(dir, p) {
        let data = PrimeCensus::compute(p, options).map_err(|e| e.to_string())?;
        data.store(dir).map_err(|e| e.to_string())?;
    }
    PrimeCensus::load(dir, p).map_err(|e| format!("p = {p}: {e}"))
}

pub fn field_characters(primes: &[u64]) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("field-characters");
    fn field_checks<F: FiniteField>(s: &mut SuiteOutcome, f: &F) {
        let q = f.order();
        s.check(f.chi(0) == 0, || format!("chi(0) != 0 over F_{q}"));
        let sum: i64 = (0..q).map(|x| f.chi(x) as i64).sum();
        s.check(sum == 0, || format!("character sum {sum} over F_{q}"));
        let mut bad = None;
        'outer: for a in 1..q {
            for b in 1..q {
                if f.chi(f.mul(a, b)) != f.chi(a) * f.chi(b) {
                    bad = Some((a, b));
                    break 'outer;
                }
            }
        }
        s.check(bad.is_none(), || {
            format!("chi not multiplicative over F_{q} at {bad:?}")
        });
    }
    for &p in primes {
        let base = match PrimeField::new(p) {
            Ok(f) => f,
            Err(e) => {
                s.fail(e.to_string());
                continue;
            }
        };
        field_checks(&mut s, &base);
        let ext = QuadExtField::new(base.clone());
        field_checks(&mut s, &ext);
        let norm_ok = (0..ext.order()).all(|x| ext.chi(x) == base.chi(ext.norm(x)));
        s.check(norm_ok, || format!("chi_(p^2) != chi_p o Norm at p = {p}"));
    }
    s
}

pub fn mass_identities(censuses: &[Result<PrimeCensus, String>]) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("mass-identities");
    for data in censuses {
        let data = match data {
            Ok(d) => d,
            Err(e) => {
                s.fail(format!("census cache: {e}"));
                continue;
            }
        };
        let p = data.p as u64;
        if let Err(e) = data.verify() {
            s.fail(format!("p = {p}: {e}"));
        }
        s.checks += 1;
        let product = product_locus_trace(LocalSystem { l: 0, m: 0 }, data);
        s.check(
            product == BigRational::from_integer(BigInt::from(p * p)),
            || format!("product-locus mass {product} != {} at p = {p}", p * p),
        );
    }
    s
}

/// Orbit-stabilizer masses against `census / |GL_2(F_3)|`.
pub fn orbit_oracle(census: Option<&PrimeCensus>) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("orbit-oracle-p3");
    let Some(data) = census else {
        s.fail("no p = 3 census available".into());
        return s;
    };
    let oracle = match genus2_groupoid(3) {
        Ok(o) => o,
        Err(e) => {
            s.fail(e.to_string());
            return s;
        }
    };
    let table = &data.genus2;
    let mut keys: Vec<(i64, i64)> = oracle.by_class.keys().copied().collect();
    keys.extend(table.entries.keys().copied());
    keys.sort();
    keys.dedup();
    for key in keys {
        let expected = BigRational::new(
            BigInt::from(table.count(key.0, key.1)),
            BigInt::from(table.normalizer),
        );
        let got = oracle
            .by_class
            .get(&key)
            .cloned()
            .unwrap_or_else(BigRational::zero);
        s.check(got == expected, || {
            format!("class {key:?}: orbit mass {got}, census {expected}")
        });
    }
    s.check(
        oracle.total == BigRational::from_integer(BigInt::from(27)),
        || format!("orbit total mass {} != 27", oracle.total),
    );
    s
}

pub fn character_agreement(config: &SelftestConfig) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("character-oracle");
    let mut rng = StdRng::seed_from_u64(config.seed);
    let max = config.character_max_sum as i64;
    for l in 0..=max {
        for m in 0..=l.min(max - l) {
            let sys = LocalSystem::new(l, m).expect("l >= m >= 0");
            for _ in 0..config.samples_per_weight {
                let a1 = BigInt::from(rng.gen_range(-200i64..=200));
                let a2 = BigInt::from(rng.gen_range(-2000i64..=2000));
                let p = BigInt::from(rng.gen_range(1i64..=100));
                let expected = sp4_trace_at(sys, &a1, &a2, &p);
                match freudenthal_trace(sys, config.oracle_budget, &a1, &a2, &p) {
                    Ok(v) => s.check(v == expected, || {
                        format!("({l},{m}) at ({a1},{a2},{p}): oracle {v}, closed form {expected}")
                    }),
                    Err(CharacterError::BudgetExceeded { .. }) => {
                        s.notices.push(format!(
                            "({l},{m}) skipped: exceeds oracle budget {}",
                            config.oracle_budget
                        ));
                        break;
                    }
                    Err(e) => s.fail(format!("({l},{m}): {e}")),
                }
            }
        }
    }
    let id = FrobeniusClass::identity();
    for l in 0..=24i64 {
        for m in 0..=l.min(24 - l) {
            let sys = LocalSystem::new(l, m).expect("l >= m >= 0");
            let v = sp4_trace(sys, &id);
            s.check(v == BigInt::from(sys.dimension()), || {
                format!(
                    "({l},{m}): value {v} at identity, dimension {}",
                    sys.dimension()
                )
            });
        }
    }
    s
}

pub fn eichler_shimura(censuses: &[Result<PrimeCensus, String>]) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("eichler-shimura");
    for data in censuses.iter().flatten() {
        let p = data.p as u64;
        for n in (2..=20u32).step_by(2) {
            let lhs = trace_ec_a1(n, &data.elliptic_p);
            let rhs = trace_hecke_sl2(n as i64 + 2, p);
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => {
                    let r = -r - BigInt::one();
                    s.check(l == r, || {
                        format!("n = {n}, p = {p}: census {l}, q-expansion {r}")
                    });
                }
                (Err(e), _) | (_, Err(e)) => s.fail(format!("n = {n}, p = {p}: {e}")),
            }
        }
    }
    s
}

pub fn parity_vanishing(censuses: &[Result<PrimeCensus, String>]) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("parity-vanishing");
    s.check(
        matches!(WeightPair::new(7, 4), Err(TraceError::OddParity { .. })),
        || "weight (7,4) accepted".into(),
    );
    for data in censuses.iter().flatten() {
        for (l, m) in [(1u32, 0u32), (2, 1), (3, 0), (4, 1), (5, 2), (6, 3)] {
            let sys = LocalSystem { l, m };
            match trace_ec_a2(sys, data) {
                Ok(v) => s.check(v.is_zero(), || format!("({l},{m}) at p = {}: {v}", data.p)),
                Err(e) => s.fail(e.to_string()),
            }
        }
    }
    s
}

pub fn dim0_suite(
    config: &SelftestConfig,
    censuses: &[Result<PrimeCensus, String>],
) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("dim0");
    for data in censuses.iter().flatten() {
        for &w in &config.dim0_weights {
            match hecke_trace_genus2(w, data, config.normalization) {
                Ok(r) => {
                    let t = r.hecke_trace.unwrap_or_default();
                    s.check(t.is_zero(), || {
                        format!("({},{}) at p = {}: heckeTrace {t}", w.k1, w.k2, data.p)
                    });
                }
                Err(e) => s.fail(e.to_string()),
            }
        }
    }
    s
}

pub fn second_row_closed_forms(censuses: &[Result<PrimeCensus, String>]) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("second-row");
    for data in censuses.iter().flatten() {
        let p = BigInt::from(data.p);
        let cases = [
            ((6, 4), BigInt::zero()),
            ((7, 5), BigInt::one()),
            ((8, 6), -p.pow(4)),
        ];
        for ((k1, k2), expected) in cases {
            let w = WeightPair::new(k1, k2).expect("regular weight");
            match second_row(w, data) {
                Ok(v) => s.check(v == expected, || {
                    format!("({k1},{k2}) at p = {p}: {v}, expected {expected}")
                }),
                Err(e) => s.fail(e.to_string()),
            }
        }
    }
    s
}

/// Runs every suite; `progress` receives one line per stage.
pub fn run(config: &SelftestConfig, mut progress: impl FnMut(&str)) -> Vec<SuiteOutcome> {
    let options = Genus2Options {
        workers: config.workers,
    };
    let censuses: Vec<Result<PrimeCensus, String>> = config
        .primes
        .iter()
        .map(|&p| {
            progress(&format!("loading census p = {p}"));
            load_or_build(&config.cache_dir, p, options)
        })
        .collect();
    let p3 = censuses.iter().flatten().find(|d| d.p == 3);

    let mut out = Vec::new();
    progress("field characters");
    out.push(field_characters(&config.primes));
    progress("mass identities");
    out.push(mass_identities(&censuses));
    progress("orbit oracle");
    out.push(orbit_oracle(p3));
    progress("character oracle");
    out.push(character_agreement(config));
    progress("eichler-shimura");
    out.push(eichler_shimura(&censuses));
    progress("parity vanishing");
    out.push(parity_vanishing(&censuses));
    progress("dim-0 suite");
    out.push(dim0_suite(config, &censuses));
    progress("second row");
    out.push(second_row_closed_forms(&censuses));
    out
}
