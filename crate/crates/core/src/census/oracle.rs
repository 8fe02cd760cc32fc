//! Orbit-stabilizer enumeration of isomorphism classes.
//!
//! These oracles enumerate orbits of the model-substitution groups explicitly,
//! read off `|Aut|` from stabilizers and sum `1/|Aut|` per Frobenius class.
//! They share no code with the census histograms beyond the generic point
//! counter, and serve as independent checks of the mass normalization.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{genus2_point_count, is_squarefree_sextic, CensusError, Sextic};
use crate::census::elliptic::cubic_discriminant;
use crate::ff::{FiniteField, PrimeField, QuadExtField};

#[derive(Debug, Clone)]
pub struct GroupoidMass<K> {
    pub by_class: BTreeMap<K, BigRational>,
    pub total: BigRational,
    pub orbits: usize,
    pub group_order: u64,
}

fn mismatch(msg: String) -> CensusError {
    CensusError::Malformed {
        path: "<orbit oracle>".into(),
        reason: msg,
    }
}

fn elliptic_trace<F: FiniteField>(field: &F, c: [u32; 3]) -> i64 {
    let q = field.order();
    let s: i64 = (0..q)
        .map(|x| {
            let v = field.add(
                field.mul(field.add(field.mul(field.add(x, c[0]), x), c[1]), x),
                c[2],
            );
            field.chi(v) as i64
        })
        .sum();
    -s
}

/// Isomorphism classes of elliptic curves over `F_q` by orbits of
/// `x -> u^2 x + r, y -> u^3 y` on cubic models; the stabilizer of a model
/// is `Aut(E)`.
pub fn elliptic_groupoid<F: FiniteField>(field: &F) -> Result<GroupoidMass<i64>, CensusError> {
    let q = field.order();
    let k = |n: i64| field.constant(n);
    let index =
        |c: [u32; 3]| (c[0] as usize * q as usize + c[1] as usize) * q as usize + c[2] as usize;
    let mut seen = vec![false; (q as usize).pow(3)];
    let units: Vec<u32> = (1..q).collect();
    let group_order = q as u64 * (q as u64 - 1);
    let mut by_class: BTreeMap<i64, BigRational> = BTreeMap::new();
    let mut orbits = 0;

    for c2 in 0..q {
        for c4 in 0..q {
            for c6 in 0..q {
                let model = [c2, c4, c6];
                if seen[index(model)] || cubic_discriminant(field, c2, c4, c6) == 0 {
                    continue;
                }
                let mut stabilizer = 0u64;
                let mut orbit = Vec::new();
                for &w in &units {
                    let w2 = field.mul(w, w);
                    let w4 = field.mul(w2, w2);
                    let w6 = field.mul(w4, w2);
                    for r in 0..q {
                        let r2 = field.mul(r, r);
                        let r3 = field.mul(r2, r);
                        let n2 = field.add(c2, field.mul(k(3), r));
                        let n4 = field.add(
                            field.add(c4, field.mul(k(2), field.mul(c2, r))),
                            field.mul(k(3), r2),
                        );
                        let n6 = field.add(
                            field.add(c6, field.mul(c4, r)),
                            field.add(field.mul(c2, r2), r3),
                        );
                        let image = [field.mul(n2, w2), field.mul(n4, w4), field.mul(n6, w6)];
                        if image == model {
                            stabilizer += 1;
                        }
                        if !seen[index(image)] {
                            seen[index(image)] = true;
                            orbit.push(image);
                        }
                    }
                }
                if orbit.len() as u64 * stabilizer != group_order {
                    return Err(mismatch(format!(
                        "orbit {} x stabilizer {} != {}",
                        orbit.len(),
                        stabilizer,
                        group_order
                    )));
                }
                let a = elliptic_trace(field, model);
                if let Some(bad) = orbit.iter().find(|m| elliptic_trace(field, **m) != a) {
                    return Err(mismatch(format!("trace not constant on orbit at {bad:?}")));
                }
                *by_class.entry(a).or_insert_with(BigRational::zero) +=
                    BigRational::new(BigInt::from(1), BigInt::from(stabilizer));
                orbits += 1;
            }
        }
    }
    let total = by_class
        .values()
        .fold(BigRational::zero(), |acc, m| acc + m);
    Ok(GroupoidMass {
        by_class,
        total,
        orbits,
        group_order,
    })
}

/// Coefficients of `(a x + b z)^i (c x + d z)^(6-i)` for each `i`.
fn substitution_matrix(field: &PrimeField, m: [u32; 4]) -> [[u32; 7]; 7] {
    let mul_linear = |poly: &[u32; 7], (s, t): (u32, u32)| {
        // poly * (s x + t z), degrees in x
        let mut out = [0u32; 7];
        for j in 0..7 {
            if poly[j] == 0 {
                continue;
            }
            out[j] = field.add(out[j], field.mul(poly[j], t));
            if j + 1 < 7 {
                out[j + 1] = field.add(out[j + 1], field.mul(poly[j], s));
            }
        }
        out
    };
    let [a, b, c, d] = m;
    let mut rows = [[0u32; 7]; 7];
    for (i, row) in rows.iter_mut().enumerate() {
        let mut acc = [0u32; 7];
        acc[0] = 1;
        for _ in 0..i {
            acc = mul_linear(&acc, (a, b));
        }
        for _ in i..6 {
            acc = mul_linear(&acc, (c, d));
        }
        *row = acc;
    }
    rows
}

/// Isomorphism classes of genus-2 curves over `F_p` by orbits of
/// `GL_2(F_p) x F_p^*` acting as `F -> lambda^2 F(a x + b z, c x + d z)`.
///
/// The subgroup `{(mu I, mu^3)}` of order `p - 1` acts trivially on curves,
/// so `|Aut(C)| = |Stab(F)| / (p - 1)`; the effective group has order
/// `|GL_2(F_p)|`.
pub fn genus2_groupoid(p: u64) -> Result<GroupoidMass<(i64, i64)>, CensusError> {
    let field = PrimeField::new(p)?;
    let ext = QuadExtField::new(field.clone());
    let pu = p as u32;
    let mut group = Vec::new();
    for a in 0..pu {
        for b in 0..pu {
            for c in 0..pu {
                for d in 0..pu {
                    let det = field.sub(field.mul(a, d), field.mul(b, c));
                    if det == 0 {
                        continue;
                    }
                    let m = substitution_matrix(&field, [a, b, c, d]);
                    for lambda in 1..pu {
                        group.push((m, field.mul(lambda, lambda)));
                    }
                }
            }
        }
    }
    let raw_order = group.len() as u64;
    let group_order = raw_order / (p - 1);

    let encode = |f: &Sextic| {
        f.iter()
            .rev()
            .fold(0usize, |acc, &c| acc * p as usize + c as usize)
    };
    let size = (p as usize).pow(7);
    let mut seen = vec![false; size];
    let mut by_class: BTreeMap<(i64, i64), BigRational> = BTreeMap::new();
    let mut orbits = 0;

    let class_of = |f: &Sextic| -> Result<(i64, i64), CensusError> {
        let n1 = genus2_point_count(f, &field) as i64;
        let n2 = genus2_point_count(f, &ext) as i64;
        let cls = super::frobenius_class(n1, n2, pu)?;
        Ok((cls.a1, cls.a2))
    };

    for index in 0..size {
        if seen[index] {
            continue;
        }
        let mut f: Sextic = [0; 7];
        let mut rest = index;
        for c in f.iter_mut() {
            *c = (rest % p as usize) as u32;
            rest /= p as usize;
        }
        if !is_squarefree_sextic(&f, &field) {
            seen[index] = true;
            continue;
        }
        let mut stabilizer = 0u64;
        let mut orbit = Vec::new();
        for (m, s) in &group {
            let mut image = [0u32; 7];
            for (i, &fi) in f.iter().enumerate() {
                if fi == 0 {
                    continue;
                }
                for j in 0..7 {
                    image[j] = field.add(image[j], field.mul(fi, m[i][j]));
                }
            }
            for c in image.iter_mut() {
                *c = field.mul(*c, *s);
            }
            if image == f {
                stabilizer += 1;
            }
            let key = encode(&image);
            if !seen[key] {
                seen[key] = true;
                orbit.push(image);
            }
        }
        if orbit.len() as u64 * stabilizer != raw_order || !stabilizer.is_multiple_of(p - 1) {
            return Err(mismatch(format!(
                "orbit {} x stabilizer {} != {raw_order}",
                orbit.len(),
                stabilizer
            )));
        }
        let automorphisms = stabilizer / (p - 1);
        let cls = class_of(&f)?;
        for member in &orbit {
            if class_of(member)? != cls {
                return Err(mismatch(format!(
                    "class not constant on orbit at {member:?}"
                )));
            }
        }
        *by_class.entry(cls).or_insert_with(BigRational::zero) +=
            BigRational::new(BigInt::from(1), BigInt::from(automorphisms));
        orbits += 1;
    }
    let total = by_class
        .values()
        .fold(BigRational::zero(), |acc, m| acc + m);
    Ok(GroupoidMass {
        by_class,
        total,
        orbits,
        group_order,
    })
}
