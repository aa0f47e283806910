//! The finite field F_q, q = p^e.
//!
//! Elements are packed into a `u32`: the coordinate vector `(c_0, .., c_{e-1})` in the
//! polynomial basis `1, u, .., u^{e-1}` is stored as the base-p integer
//! `c_0 + c_1 p + .. + c_{e-1} p^{e-1}`. For prime fields this is just the residue.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order supported for proper extensions (log/exp tables are built eagerly).
pub const MAX_EXTENSION_ORDER: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FqConfig {
    pub p: u32,
    pub e: u32,
    /// Monic irreducible modulus over F_p, coefficients lowest degree first (length e + 1).
    /// Absent for prime fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FqConfig {
    pub fn prime(p: u32) -> Self {
        FqConfig { p, e: 1, modulus: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);

    /// Packed base-p index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug)]
struct FqInner {
    config: FqConfig,
    q: u64,
    tables: Option<Tables>,
}

/// A handle on F_q. Cheap to clone; equality compares configurations.
#[derive(Clone)]
pub struct Fq(Arc<FqInner>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.config == other.0.config
    }
}

impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())?;
        if let Some(m) = &self.0.config.modulus {
            write!(f, " (modulus {m:?})")?;
        }
        Ok(())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Fq {
    pub fn prime(p: u32) -> Result<Fq> {
        Fq::new(FqConfig::prime(p))
    }

    pub fn new(config: FqConfig) -> Result<Fq> {
        let p = config.p;
        if !is_prime(p as u64) || p >= (1 << 31) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        if config.e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        if config.e == 1 {
            if config.modulus.is_some() {
                return Err(Error::InvalidField("prime fields take no modulus".into()));
            }
            return Ok(Fq(Arc::new(FqInner { q: p as u64, config, tables: None })));
        }
        let q = (p as u64)
            .checked_pow(config.e)
            .filter(|q| *q <= MAX_EXTENSION_ORDER)
            .ok_or_else(|| Error::TooLarge(format!("F_{p}^{} exceeds 2^20 elements", config.e)))?;
        let modulus =
            config.modulus.clone().ok_or_else(|| Error::InvalidField("extension fields need a modulus".into()))?;
        if modulus.len() != config.e as usize + 1 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField(format!("modulus must be monic of degree {}", config.e)));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
        }
        let base = Fq::prime(p)?;
        let mpoly = super::Poly::from_coeffs(&base, modulus.iter().map(|&c| FqElem(c)).collect());
        if !super::factor::poly_irreducible(&mpoly)? {
            return Err(Error::InvalidField("modulus is reducible over F_p".into()));
        }
        let tables = build_tables(p, config.e, &modulus, q);
        Ok(Fq(Arc::new(FqInner { q, config, tables: Some(tables) })))
    }

    pub fn config(&self) -> &FqConfig {
        &self.0.config
    }

    pub fn p(&self) -> u32 {
        self.0.config.p
    }

    pub fn e(&self) -> u32 {
        self.0.config.e
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.tables.is_none()
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> FqElem {
        let p = self.p() as i64;
        FqElem(n.rem_euclid(p) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FqElem> {
        if coords.len() > self.e() as usize {
            return Err(Error::Parse(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.e()
            )));
        }
        let p = self.p() as u64;
        let mut acc = 0u64;
        for &c in coords.iter().rev() {
            if c as u64 >= p {
                return Err(Error::Parse(format!("coordinate {c} not reduced mod {p}")));
            }
            acc = acc * p + c as u64;
        }
        Ok(FqElem(acc as u32))
    }

    pub fn coords(&self, a: FqElem) -> Vec<u32> {
        let p = self.p();
        let mut v = a.0;
        (0..self.e())
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    /// Element from its packed index; `None` when out of range.
    pub fn from_index(&self, idx: u64) -> Option<FqElem> {
        (idx < self.q()).then_some(FqElem(idx as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q()).map(|i| FqElem(i as u32))
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.p();
        if self.0.tables.is_none() {
            let s = a.0 as u64 + b.0 as u64;
            let p = p as u64;
            return FqElem(if s >= p { (s - p) as u32 } else { s as u32 });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut scale = 1u32;
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * scale;
            scale = scale.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        let p = self.p();
        if self.0.tables.is_none() {
            return FqElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut scale = 1u32;
        while x > 0 {
            let d = (p - x % p) % p;
            out += d * scale;
            scale = scale.wrapping_mul(p);
            x /= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        match &self.0.tables {
            None => FqElem(((a.0 as u64 * b.0 as u64) % self.p() as u64) as u32),
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    return FqElem(0);
                }
                let n = self.0.q - 1;
                let l = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % n;
                FqElem(t.exp[l as usize])
            }
        }
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q() - 2))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, mut k: u64) -> FqElem {
        if let Some(t) = &self.0.tables {
            if a.0 == 0 {
                return if k == 0 { FqElem(1) } else { FqElem(0) };
            }
            let n = self.0.q - 1;
            let l = (t.log[a.0 as usize] as u128 * (k as u128 % n as u128)) % n as u128;
            return FqElem(t.exp[l as usize]);
        }
        let mut base = a;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// a -> a^p.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        if self.is_prime_field() {
            a
        } else {
            self.pow(a, self.p() as u64)
        }
    }

    /// The unique b with b^p = a.
    pub fn pth_root(&self, a: FqElem) -> FqElem {
        if self.is_prime_field() {
            a
        } else {
            self.pow(a, (self.p() as u64).pow(self.e() - 1))
        }
    }
}

fn mul_coords(p: u32, e: usize, modulus: &[u32], a: u32, b: u32) -> u32 {
    let p64 = p as u64;
    let digits = |mut x: u32| {
        let mut v = vec![0u64; e];
        for d in v.iter_mut() {
            *d = (x % p) as u64;
            x /= p;
        }
        v
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u64; 2 * e - 1];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p64;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus.iter().take(e).enumerate() {
            let sub = c * m as u64 % p64;
            prod[k - e + i] = (prod[k - e + i] + p64 - sub) % p64;
        }
    }
    let mut out = 0u64;
    for &d in prod[..e].iter().rev() {
        out = out * p64 + d;
    }
    out as u32
}

fn build_tables(p: u32, e: u32, modulus: &[u32], q: u64) -> Tables {
    let e = e as usize;
    let n = q - 1;
    let factors = prime_factors(n);
    let pow = |mut g: u32, mut k: u64| {
        let mut acc = 1u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = mul_coords(p, e, modulus, acc, g);
            }
            g = mul_coords(p, e, modulus, g, g);
            k >>= 1;
        }
        acc
    };
    let generator = (2..q as u32)
        .find(|&g| factors.iter().all(|&l| pow(g, n / l) != 1))
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; n as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = 1u32;
    for (k, slot) in exp.iter_mut().enumerate() {
        *slot = cur;
        log[cur as usize] = k as u32;
        cur = mul_coords(p, e, modulus, cur, generator);
    }
    Tables { exp, log }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> Fq {
        Fq::new(FqConfig { p: 3, e: 2, modulus: Some(vec![1, 0, 1]) }).unwrap()
    }

    #[test]
    fn u_squared_is_minus_one_in_f9() {
        let f = f9();
        let u = f.from_coords(&[0, 1]).unwrap();
        assert_eq!(f.mul(u, u), f.from_int(2));
    }

    #[test]
    fn inverse_of_two_mod_five() {
        let f = Fq::prime(5).unwrap();
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(3));
        assert_eq!(f.inv(f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn extension_field_axioms_hold_exhaustively() {
        let f = f9();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            assert_eq!(f.pth_root(f.frobenius(a)), a);
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.from_index(mul_coords(3, 2, &[1, 0, 1], a.0, b.0) as u64).unwrap());
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Fq::prime(4).is_err());
        assert!(Fq::new(FqConfig { p: 5, e: 2, modulus: Some(vec![1, 0, 1]) }).is_err());
        assert!(Fq::new(FqConfig { p: 3, e: 2, modulus: None }).is_err());
    }
}
