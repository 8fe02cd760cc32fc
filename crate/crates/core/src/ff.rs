//! Prime fields `F_p` and their quadratic extensions `F_{p^2}` for odd `p`.
//!
//! Elements are plain `u32` indices in `[0, q)`. For the prime field the index
//! is the residue itself; for `F_{p^2} = F_p[t]/(t^2 - d)` the element
//! `u + v*t` has index `u + v*p`.
//!
//! Both fields carry a quadratic-character table with the convention
//! `chi(0) = 0`, so that `#{y : y^2 = c} = 1 + chi(c)` holds for every `c`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not supported: need an odd prime")]
    NotOddPrime(u64),
    #[error("characteristic {0} is too large for table-driven arithmetic")]
    TooLarge(u64),
}

/// Largest characteristic accepted; keeps `p^2` tables and products in `u32`/`u64`.
pub const MAX_CHARACTERISTIC: u64 = 1 << 12;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Shared interface of the two field types, in terms of element indices.
pub trait FiniteField: Sync {
    fn characteristic(&self) -> u32;
    fn order(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    /// Quadratic character, `0` on zero.
    fn chi(&self, a: u32) -> i32;
    /// Image of the residue `c mod p` under `F_p -> F_q`.
    fn embed(&self, c: u32) -> u32;

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Embed a signed integer constant.
    fn constant(&self, c: i64) -> u32 {
        let p = self.characteristic() as i64;
        self.embed(c.rem_euclid(p) as u32)
    }
}

#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u32,
    chi: Vec<i8>,
    inv: Vec<u32>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if p > MAX_CHARACTERISTIC {
            return Err(FieldError::TooLarge(p));
        }
        let p = p as u32;
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for x in 1..p {
            chi[((x as u64 * x as u64) % p as u64) as usize] = 1;
        }
        let mut inv = vec![0u32; p as usize];
        for x in 1..p {
            inv[x as usize] = pow_mod(x, p - 2, p);
        }
        Ok(Self { p, chi, inv })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn chi_table(&self) -> &[i8] {
        &self.chi
    }

    /// Multiplicative inverse; `inv(0)` is `0`.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u32 {
        (a % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, e: u32) -> u32 {
        pow_mod(a, e, self.p)
    }

    /// Smallest positive quadratic non-residue.
    pub fn least_non_residue(&self) -> u32 {
        (1..self.p)
            .find(|&a| self.chi[a as usize] == -1)
            .expect("odd prime field has a non-residue")
    }
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64;
    let mut base = a as u64 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc as u32
}

impl FiniteField for PrimeField {
    fn characteristic(&self) -> u32 {
        self.p
    }
    fn order(&self) -> u32 {
        self.p
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }
    #[inline]
    fn chi(&self, a: u32) -> i32 {
        self.chi[a as usize] as i32
    }
    fn embed(&self, c: u32) -> u32 {
        c % self.p
    }
}

/// `F_{p^2} = F_p[t]/(t^2 - d)` with `d` the least non-residue mod `p`.
#[derive(Debug, Clone)]
pub struct QuadExtField {
    base: PrimeField,
    d: u32,
    chi: Vec<i8>,
}

impl QuadExtField {
    pub fn new(base: PrimeField) -> Self {
        let p = base.p;
        let d = base.least_non_residue();
        let q = (p * p) as usize;
        let mut chi = vec![-1i8; q];
        chi[0] = 0;
        let mut ext = Self {
            base,
            d,
            chi: Vec::new(),
        };
        // character from the image of the squaring map
        let mut squares = vec![false; q];
        for x in 1..q as u32 {
            squares[ext.mul(x, x) as usize] = true;
        }
        for (c, sq) in chi.iter_mut().zip(&squares).skip(1) {
            if *sq {
                *c = 1;
            }
        }
        ext.chi = chi;
        ext
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    /// The non-residue `d` with `t^2 = d`.
    pub fn non_residue(&self) -> u32 {
        self.d
    }

    #[inline]
    pub fn pack(&self, u: u32, v: u32) -> u32 {
        u + v * self.base.p
    }

    #[inline]
    pub fn unpack(&self, x: u32) -> (u32, u32) {
        (x % self.base.p, x / self.base.p)
    }

    /// Norm `u^2 - d v^2` down to `F_p`.
    pub fn norm(&self, x: u32) -> u32 {
        let (u, v) = self.unpack(x);
        let p = self.base.p as u64;
        let (u, v, d) = (u as u64, v as u64, self.d as u64);
        ((u * u + (p - d) * (v * v % p)) % p) as u32
    }

    /// Frobenius `x -> x^p`, i.e. `u + v t -> u - v t`.
    pub fn conjugate(&self, x: u32) -> u32 {
        let (u, v) = self.unpack(x);
        self.pack(u, self.base.neg(v))
    }
}

impl FiniteField for QuadExtField {
    fn characteristic(&self) -> u32 {
        self.base.p
    }
    fn order(&self) -> u32 {
        self.base.p * self.base.p
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let (u, v) = self.unpack(a);
        let (u2, v2) = self.unpack(b);
        self.pack(self.base.add(u, u2), self.base.add(v, v2))
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        let (u, v) = self.unpack(a);
        self.pack(self.base.neg(u), self.base.neg(v))
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.base.p as u64;
        let (u, v) = self.unpack(a);
        let (u2, v2) = self.unpack(b);
        let (u, v, u2, v2) = (u as u64, v as u64, u2 as u64, v2 as u64);
        let re = (u * u2 + self.d as u64 * (v * v2 % p)) % p;
        let im = (u * v2 + u2 * v) % p;
        self.pack(re as u32, im as u32)
    }
    #[inline]
    fn chi(&self, a: u32) -> i32 {
        self.chi[a as usize] as i32
    }
    fn embed(&self, c: u32) -> u32 {
        c % self.base.p
    }
}
