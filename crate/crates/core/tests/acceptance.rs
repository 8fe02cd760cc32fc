//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed.
//! Criterion 8 is recorded but never fails the run.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use siegel_hecke::census::oracle::genus2_groupoid;
use siegel_hecke::census::{
    elliptic_census, genus2_census, CensusTable, FrobeniusClass, Genus2Options,
};
use siegel_hecke::ff::{PrimeField, QuadExtField};
use siegel_hecke::modform1::{trace_ec_a1, trace_hecke_sl2};
use siegel_hecke::sp4char::freudenthal::{freudenthal_trace, DEFAULT_BUDGET};
use siegel_hecke::sp4char::{sp4_trace, sp4_trace_at, LocalSystem};
use siegel_hecke::trace2::{
    hecke_trace_genus2, product_locus_trace, second_row, trace_ec_a2, PrimeCensus, TraceError,
    WeightPair,
};

/// Hecke eigenvalues of the one-dimensional space of type `Sym^6 det^8`
/// at p = 3, 5, 7, from the published genus-2 eigenvalue tables.
const SYM6_DET8: [(u64, i64); 3] = [(3, -27000), (5, 2_843_100), (7, -107_822_000)];

type Criterion<'a> = (u32, &'static str, bool, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            passed: true,
            detail: summary,
        }
    } else {
        Outcome {
            passed: false,
            detail: failures.join("; "),
        }
    }
}

fn mass_identities() -> Outcome {
    let mut failures = Vec::new();
    let single = Genus2Options { workers: Some(1) };

    for p in [3u64, 5, 7, 11, 13] {
        let base = PrimeField::new(p).unwrap();
        let ext = QuadExtField::new(base.clone());
        for census in [elliptic_census(&base), elliptic_census(&ext)] {
            if let Err(e) = census.check_mass() {
                failures.push(format!("elliptic q = {}: {e}", census.q));
            }
        }
    }

    let start = Instant::now();
    for p in [3u64, 5, 7] {
        match PrimeCensus::compute(p, single) {
            Ok(d) => {
                if let Err(e) = d.verify() {
                    failures.push(format!("p = {p}: {e}"));
                }
                let product = product_locus_trace(LocalSystem { l: 0, m: 0 }, &d);
                if product != BigRational::from_integer(BigInt::from(p * p)) {
                    failures.push(format!("product mass {product} at p = {p}"));
                }
            }
            Err(e) => failures.push(format!("p = {p}: {e}")),
        }
    }
    let small = start.elapsed();
    if small > Duration::from_secs(60) {
        failures.push(format!("p <= 7 censuses took {small:?} single-threaded"));
    }

    let mut large = Vec::new();
    for p in [11u64, 13] {
        let start = Instant::now();
        let workers = Genus2Options { workers: Some(8) };
        match genus2_census(p, workers).and_then(|t| t.verify().map(|_| t)) {
            Ok(t) => {
                let mass = BigRational::new(BigInt::from(t.total), BigInt::from(t.normalizer));
                if mass != BigRational::from_integer(BigInt::from(p.pow(3))) {
                    failures.push(format!("genus-2 mass {mass} at p = {p}"));
                }
            }
            Err(e) => failures.push(format!("p = {p}: {e}")),
        }
        let t = start.elapsed();
        if t > Duration::from_secs(600) {
            failures.push(format!("p = {p} census took {t:?}"));
        }
        large.push(format!("p={p} {:.1}s", t.as_secs_f64()));
    }
    outcome(
        failures,
        format!(
            "elliptic q in {{3,5,7,9,25,49,11,13,121,169}}, genus-2 p in {{3,5,7,11,13}}, product p^2; p<=7 in {:.2}s, {}",
            small.as_secs_f64(),
            large.join(", ")
        ),
    )
}

fn orbit_oracle(p3: &CensusTable) -> Outcome {
    let mut failures = Vec::new();
    let oracle = match genus2_groupoid(3) {
        Ok(o) => o,
        Err(e) => return outcome(vec![e.to_string()], String::new()),
    };
    if oracle.group_order != 48 {
        failures.push(format!("group order {}", oracle.group_order));
    }
    let mut keys: Vec<_> = oracle
        .by_class
        .keys()
        .chain(p3.entries.keys())
        .copied()
        .collect();
    keys.sort();
    keys.dedup();
    for (a1, a2) in &keys {
        let census = BigRational::new(BigInt::from(p3.count(*a1, *a2)), BigInt::from(48));
        let orbit = oracle
            .by_class
            .get(&(*a1, *a2))
            .cloned()
            .unwrap_or_else(BigRational::zero);
        if census != orbit {
            failures.push(format!("({a1},{a2}): census {census}, orbits {orbit}"));
        }
    }
    outcome(
        failures,
        format!(
            "{} classes, {} orbits, total mass {}",
            keys.len(),
            oracle.orbits,
            oracle.total
        ),
    )
}

fn character_oracle() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = StdRng::seed_from_u64(20_041_018);
    let mut evaluations = 0;
    for l in 0..=12i64 {
        for m in 0..=l.min(12 - l) {
            let sys = LocalSystem::new(l, m).unwrap();
            for _ in 0..50 {
                let a1 = BigInt::from(rng.gen_range(-10_000i64..=10_000));
                let a2 = BigInt::from(rng.gen_range(-10_000i64..=10_000));
                let p = BigInt::from(rng.gen_range(-500i64..=500));
                let closed = sp4_trace_at(sys, &a1, &a2, &p);
                match freudenthal_trace(sys, DEFAULT_BUDGET, &a1, &a2, &p) {
                    Ok(v) if v == closed => {}
                    Ok(v) => {
                        failures.push(format!("({l},{m}) at ({a1},{a2},{p}): {v} vs {closed}"))
                    }
                    Err(e) => failures.push(format!("({l},{m}): {e}")),
                }
                evaluations += 1;
            }
        }
    }
    let id = FrobeniusClass::identity();
    for l in 0..=24i64 {
        for m in 0..=l.min(24 - l) {
            let (l1, m1) = (l as u64, m as u64);
            let weyl = (l1 - m1 + 1) * (m1 + 1) * (l1 + 2) * (l1 + m1 + 3) / 6;
            let v = sp4_trace(LocalSystem::new(l, m).unwrap(), &id);
            if v != BigInt::from(weyl) {
                failures.push(format!("dimension ({l},{m}): {v} vs {weyl}"));
            }
        }
    }
    outcome(
        failures,
        format!("{evaluations} exact evaluations, dimensions for l+m <= 24"),
    )
}

fn eichler_shimura(data: &[PrimeCensus]) -> Outcome {
    let mut failures = Vec::new();
    for d in data {
        let p = d.p as u64;
        for n in (2..=20u32).step_by(2) {
            let lhs = trace_ec_a1(n, &d.elliptic_p).unwrap();
            let rhs = -trace_hecke_sl2(n as i64 + 2, p).unwrap() - BigInt::one();
            if lhs != rhs {
                failures.push(format!("n = {n}, p = {p}: {lhs} vs {rhs}"));
            }
        }
    }
    for (p, tau) in [(3u64, 252i64), (5, 4830)] {
        let t = trace_hecke_sl2(12, p).unwrap();
        if t != BigInt::from(tau) {
            failures.push(format!("tau({p}) = {t}"));
        }
    }
    outcome(
        failures,
        "even n in 2..=20, p in {3,5,7}; tau(3) = 252, tau(5) = 4830".into(),
    )
}

fn trivial_system(data: &[PrimeCensus]) -> Outcome {
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for d in data {
        let p = BigInt::from(d.p);
        let v = trace_ec_a2(LocalSystem { l: 0, m: 0 }, d).unwrap();
        if v != p.pow(3) + p.pow(2) {
            failures.push(format!("p = {p}: {v}"));
        }
        seen.push(format!("{v}"));
    }
    outcome(failures, format!("values {}", seen.join(", ")))
}

fn parity_and_second_row(data: &[PrimeCensus]) -> Outcome {
    let mut failures = Vec::new();
    for (k1, k2) in [(7, 4), (9, 6), (12, 5)] {
        if !matches!(WeightPair::new(k1, k2), Err(TraceError::OddParity { .. })) {
            failures.push(format!("({k1},{k2}) accepted"));
        }
    }
    for d in data {
        for (l, m) in [(1u32, 0u32), (2, 1), (4, 1), (3, 2), (6, 3), (7, 0)] {
            let sys = LocalSystem { l, m };
            let a2 = trace_ec_a2(sys, d).unwrap();
            let prod = product_locus_trace(sys, d);
            if !a2.is_zero() || !prod.is_zero() {
                failures.push(format!("({l},{m}) at p = {}: {a2}, {prod}", d.p));
            }
        }
        let p = BigInt::from(d.p);
        for ((k1, k2), expected) in [
            ((6, 4), BigInt::zero()),
            ((7, 5), BigInt::one()),
            ((8, 6), -p.pow(4)),
        ] {
            let v = second_row(WeightPair::new(k1, k2).unwrap(), d).unwrap();
            if v != expected {
                failures.push(format!("second row ({k1},{k2}) at p = {p}: {v}"));
            }
        }
    }
    outcome(
        failures,
        "odd weights rejected and vanish; closed forms at p in {3,5,7}".into(),
    )
}

fn structural(data: &[PrimeCensus]) -> Outcome {
    let mut failures = Vec::new();
    let weights = WeightPair::all_up_to(24);
    for d in data {
        for &w in &weights {
            if let Err(e) = hecke_trace_genus2(w, d, 4) {
                failures.push(e.to_string());
            }
        }
        for w in WeightPair::all_up_to(14) {
            let r = hecke_trace_genus2(w, d, 1).unwrap();
            if !r.four_times_trace.is_zero() {
                failures.push(format!(
                    "({},{}) at p = {}: {}",
                    w.k1, w.k2, d.p, r.four_times_trace
                ));
            }
        }
    }
    outcome(
        failures,
        format!(
            "{} weights x 3 primes divisible by 4; dim-0 list (k1+k2 <= 14) vanishes",
            weights.len()
        ),
    )
}

fn eigenvalue_crosscheck(data: &[PrimeCensus]) -> Outcome {
    let w = WeightPair::new(14, 8).unwrap();
    let mut notes = Vec::new();
    let mut exact = true;
    for (p, published) in SYM6_DET8 {
        let d = data.iter().find(|d| d.p as u64 == p).unwrap();
        let rhs = hecke_trace_genus2(w, d, 1).unwrap().four_times_trace;
        let quarter = hecke_trace_genus2(w, d, 4).ok().and_then(|r| r.hecke_trace);
        exact &= rhs == BigInt::from(published);
        notes.push(format!(
            "p={p}: published {published}, factor 1 -> {rhs}, factor 4 -> {}",
            quarter
                .map(|q| q.to_string())
                .unwrap_or_else(|| "not divisible".into())
        ));
    }
    Outcome {
        passed: exact,
        detail: notes.join("; "),
    }
}

fn main() {
    let data: Vec<PrimeCensus> = [3u64, 5, 7]
        .iter()
        .map(|&p| PrimeCensus::compute(p, Genus2Options::default()).unwrap())
        .collect();

    let criteria: Vec<Criterion> = vec![
        (1, "mass identities", true, Box::new(mass_identities)),
        (
            2,
            "orbit-stabilizer oracle at p = 3",
            true,
            Box::new(|| orbit_oracle(&data[0].genus2)),
        ),
        (
            3,
            "character vs weight multiplicities",
            true,
            Box::new(character_oracle),
        ),
        (
            4,
            "Eichler-Shimura consistency",
            true,
            Box::new(|| eichler_shimura(&data)),
        ),
        (
            5,
            "trivial local system",
            true,
            Box::new(|| trivial_system(&data)),
        ),
        (
            6,
            "parity and second-row closed forms",
            true,
            Box::new(|| parity_and_second_row(&data)),
        ),
        (
            7,
            "divisibility and dim-0 vanishing",
            true,
            Box::new(|| structural(&data)),
        ),
        (
            8,
            "published eigenvalues, weight (14,8) [non-blocking]",
            false,
            Box::new(|| eigenvalue_crosscheck(&data)),
        ),
    ];

    let mut blocking_failures = 0;
    for (n, name, blocking, run) in &criteria {
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {n} {status}: {name} -- {}", o.detail);
        if !o.passed && *blocking {
            blocking_failures += 1;
        }
    }
    if blocking_failures > 0 {
        eprintln!("{blocking_failures} blocking criteria failed");
        std::process::exit(1);
    }
}
