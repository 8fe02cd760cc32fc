use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{CensusError, CensusTable, FrobeniusClass, Locus};
use crate::ff::{FiniteField, PrimeField, QuadExtField};

/// Binary sextic `F(x, z) = sum f_i x^i z^(6-i)`, coefficients as residues mod `p`.
pub type Sextic = [u32; 7];

/// `#C(F_q)` for `y^2 = F(x, z)`, one representative per point of `P^1(F_q)`.
pub fn genus2_point_count<F: FiniteField>(f: &Sextic, field: &F) -> u64 {
    let coeffs: Vec<u32> = f.iter().map(|&c| field.embed(c)).collect();
    let affine: i64 = (0..field.order())
        .map(|x| {
            let v = coeffs
                .iter()
                .rev()
                .fold(0, |acc, &c| field.add(field.mul(acc, x), c));
            1 + field.chi(v) as i64
        })
        .sum();
    let infinity = 1 + field.chi(coeffs[6]) as i64;
    (affine + infinity) as u64
}

/// Frobenius class from `N1 = #C(F_p)` and `N2 = #C(F_{p^2})`.
pub fn frobenius_class(n1: i64, n2: i64, p: u32) -> Result<FrobeniusClass, CensusError> {
    let pi = p as i64;
    let a1 = pi + 1 - n1;
    let num = a1 * a1 - (pi * pi + 1 - n2);
    if num % 2 != 0 {
        return Err(CensusError::NonIntegralClass { n1, n2, p });
    }
    FrobeniusClass::new(p, a1, num / 2)
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Remainder of `a` modulo `b` (`b` nonzero, trimmed).
fn poly_rem(field: &PrimeField, mut a: Vec<u32>, b: &[u32]) -> Vec<u32> {
    let lead_inv = field.inv(*b.last().expect("nonzero divisor"));
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let c = field.mul(*a.last().unwrap(), lead_inv);
        for (i, &bi) in b.iter().enumerate() {
            a[shift + i] = field.sub(a[shift + i], field.mul(c, bi));
        }
        a = trim(a);
    }
    a
}

fn poly_gcd_degree(field: &PrimeField, a: Vec<u32>, b: Vec<u32>) -> usize {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(field, a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// Whether `F` is squarefree as a binary form of degree 6: the dehomogenized
/// polynomial has degree at least 5 (at most a simple root at infinity) and
/// is coprime to its derivative.
pub fn is_squarefree_sextic(f: &Sextic, field: &PrimeField) -> bool {
    let poly = trim(f.to_vec());
    if poly.len() < 6 {
        return false;
    }
    let deriv: Vec<u32> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| field.mul(field.reduce(i as u64), c))
        .collect();
    let deriv = trim(deriv);
    if deriv.is_empty() {
        // f is a p-th power in characteristic p
        return false;
    }
    poly_gcd_degree(field, poly, deriv) == 0
}

/// Precomputed power tables for fast `N1`, `N2` evaluation.
struct Kernel {
    p: u32,
    field: PrimeField,
    chi: Vec<i8>,
    /// `x^i mod p` for `x` in `F_p`.
    prime_powers: Vec<[u32; 7]>,
    /// `(u_i, v_i)` with `x^i = u_i + v_i t`, one `x` per conjugate pair
    /// of `F_{p^2} \ F_p`.
    ext_powers: Vec<([u32; 7], [u32; 7])>,
    d: u32,
}

impl Kernel {
    fn new(field: &PrimeField) -> Self {
        let p = field.p();
        let ext = QuadExtField::new(field.clone());
        let prime_powers = (0..p)
            .map(|x| {
                let mut row = [1u32; 7];
                for i in 1..7 {
                    row[i] = field.mul(row[i - 1], x);
                }
                row
            })
            .collect();
        let mut ext_powers = Vec::with_capacity((p * (p - 1) / 2) as usize);
        for v in 1..=(p - 1) / 2 {
            for u in 0..p {
                let x = ext.pack(u, v);
                let mut us = [1u32; 7];
                let mut vs = [0u32; 7];
                let mut acc = ext.pack(1, 0);
                for i in 1..7 {
                    acc = ext.mul(acc, x);
                    (us[i], vs[i]) = ext.unpack(acc);
                }
                ext_powers.push((us, vs));
            }
        }
        Self {
            p,
            chi: field.chi_table().to_vec(),
            prime_powers,
            ext_powers,
            d: ext.non_residue(),
            field: field.clone(),
        }
    }

    /// `(N1, N2)` for `y^2 = F(x, z)`.
    fn point_counts(&self, f: &Sextic) -> (i64, i64) {
        let p = self.p as u64;
        let mut s1 = 0i64;
        let mut nonzero_p = 0i64;
        for row in &self.prime_powers {
            let v = (0..7).map(|i| f[i] as u64 * row[i] as u64).sum::<u64>() % p;
            s1 += self.chi[v as usize] as i64;
            nonzero_p += (v != 0) as i64;
        }
        let mut pairs = 0i64;
        let neg_d = p - self.d as u64;
        for (us, vs) in &self.ext_powers {
            let mut u = 0u64;
            let mut v = 0u64;
            for i in 0..7 {
                u += f[i] as u64 * us[i] as u64;
                v += f[i] as u64 * vs[i] as u64;
            }
            let (u, v) = (u % p, v % p);
            let norm = (u * u + neg_d * (v * v % p)) % p;
            pairs += self.chi[norm as usize] as i64;
        }
        let f6 = f[6];
        let pi = p as i64;
        let n1 = pi + 1 + s1 + self.chi[f6 as usize] as i64;
        let n2 = pi * pi + 1 + nonzero_p + 2 * pairs + (f6 != 0) as i64;
        (n1, n2)
    }

    fn class(&self, f: &Sextic) -> Result<Option<FrobeniusClass>, CensusError> {
        if !is_squarefree_sextic(f, &self.field) {
            return Ok(None);
        }
        let (n1, n2) = self.point_counts(f);
        frobenius_class(n1, n2, self.p).map(Some)
    }
}

/// Dense `(a1, a2)` histogram over the Weil envelope.
struct DenseHistogram {
    a1_bound: i64,
    a2_bound: i64,
    counts: Vec<u64>,
}

impl DenseHistogram {
    fn new(p: u32) -> Self {
        let a1_bound = (4.0 * (p as f64).sqrt()).floor() as i64;
        let a2_bound = 6 * p as i64;
        let len = ((2 * a1_bound + 1) * (2 * a2_bound + 1)) as usize;
        Self {
            a1_bound,
            a2_bound,
            counts: vec![0; len],
        }
    }

    fn add(&mut self, cls: FrobeniusClass, n: u64) {
        let row = (cls.a1 + self.a1_bound) * (2 * self.a2_bound + 1);
        self.counts[(row + cls.a2 + self.a2_bound) as usize] += n;
    }

    fn merge(mut self, other: Self) -> Self {
        self.counts
            .iter_mut()
            .zip(other.counts)
            .for_each(|(a, b)| *a += b);
        self
    }

    fn into_entries(self) -> BTreeMap<(i64, i64), u64> {
        let width = 2 * self.a2_bound + 1;
        self.counts
            .into_iter()
            .enumerate()
            .filter(|&(_, n)| n > 0)
            .map(|(i, n)| {
                let i = i as i64;
                ((i / width - self.a1_bound, i % width - self.a2_bound), n)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Genus2Options {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

fn decode(mut index: u64, p: u64, out: &mut [u32]) {
    for c in out.iter_mut() {
        *c = (index % p) as u32;
        index /= p;
    }
}

fn run_in_pool<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, CensusError> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CensusError::Pool(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Genus-2 census over `F_p`.
///
/// Scaling `F -> c F` by a square preserves point counts and by a non-square
/// twists `a1 -> -a1`, so only forms whose leading coefficient (`f6`, or
/// `f5` when `f6 = 0`) equals 1 are evaluated; each contributes `(p-1)/2`
/// models to its class and `(p-1)/2` to the twisted class. The resulting
/// histogram equals that of [`genus2_census_full`].
pub fn genus2_census(p: u64, options: Genus2Options) -> Result<CensusTable, CensusError> {
    let field = PrimeField::new(p)?;
    let kernel = Kernel::new(&field);
    let pu = p as u32;
    let half = (p - 1) / 2;

    // (number of free low coefficients, index range) per block
    let block = p.pow(4);
    let mut jobs = Vec::new();
    for free in [6u32, 5] {
        let size = p.pow(free);
        let mut start = 0;
        while start < size {
            jobs.push((free, start, (start + block).min(size)));
            start += block;
        }
    }

    let histogram = run_in_pool(options.workers, || {
        jobs.par_iter()
            .map(|&(free, start, end)| {
                let mut hist = DenseHistogram::new(pu);
                let mut f: Sextic = [0; 7];
                for index in start..end {
                    decode(index, p, &mut f[..free as usize]);
                    f[5] = if free == 5 { 1 } else { f[5] };
                    f[6] = (free == 6) as u32;
                    if let Some(cls) = kernel.class(&f)? {
                        hist.add(cls, half);
                        hist.add(FrobeniusClass { a1: -cls.a1, ..cls }, half);
                    }
                }
                Ok::<_, CensusError>(hist)
            })
            .try_reduce(|| DenseHistogram::new(pu), |a, b| Ok(a.merge(b)))
    })??;

    Ok(table_from(pu, histogram.into_entries()))
}

/// Genus-2 census by evaluating every `(f0, ..., f6)` in `F_p^7`.
pub fn genus2_census_full(p: u64, options: Genus2Options) -> Result<CensusTable, CensusError> {
    let field = PrimeField::new(p)?;
    let kernel = Kernel::new(&field);
    let pu = p as u32;
    let size = p.pow(7);
    let block = p.pow(4);
    let starts: Vec<u64> = (0..size).step_by(block as usize).collect();
    let histogram = run_in_pool(options.workers, || {
        starts
            .par_iter()
            .map(|&start| {
                let mut hist = DenseHistogram::new(pu);
                let mut f: Sextic = [0; 7];
                for index in start..(start + block).min(size) {
                    decode(index, p, &mut f);
                    if let Some(cls) = kernel.class(&f)? {
                        hist.add(cls, 1);
                    }
                }
                Ok::<_, CensusError>(hist)
            })
            .try_reduce(|| DenseHistogram::new(pu), |a, b| Ok(a.merge(b)))
    })??;
    Ok(table_from(pu, histogram.into_entries()))
}

fn table_from(p: u32, entries: BTreeMap<(i64, i64), u64>) -> CensusTable {
    CensusTable {
        p,
        locus: Locus::Genus2Jacobian,
        normalizer: CensusTable::gl2_order(p),
        total: entries.values().sum(),
        entries,
    }
}
