//! Dense univariate polynomials over F_q, coefficients lowest degree first.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num::BigUint;

use super::fq::{Fq, FqElem};
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Poly {
    field: Fq,
    coeffs: Vec<FqElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Degree first, then coefficients compared from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_poly(self))
    }
}

impl Poly {
    pub fn zero(field: &Fq) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Fq) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: &Fq, c: FqElem) -> Poly {
        Poly::from_coeffs(field, vec![c])
    }

    /// The indeterminate t.
    pub fn t(field: &Fq) -> Poly {
        Poly::monomial(field, field.one(), 1)
    }

    pub fn monomial(field: &Fq, c: FqElem, k: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero(field);
        }
        let mut coeffs = vec![FqElem::ZERO; k + 1];
        coeffs[k] = c;
        Poly { field: field.clone(), coeffs }
    }

    pub fn from_coeffs(field: &Fq, mut coeffs: Vec<FqElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Coefficients given as integers (reduced into the prime field), lowest degree first.
    pub fn from_ints(field: &Fq, ints: &[i64]) -> Poly {
        Poly::from_coeffs(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<FqElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(self.field.one())
    }

    /// Number of nonzero terms.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub(crate) fn same_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("leading coefficient is nonzero");
                self.scale(inv)
            }
        }
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        let f = &self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Ok(Poly::from_coeffs(f, coeffs))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Ok(Poly::from_coeffs(f, coeffs))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.field));
        }
        let f = &self.field;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let n = a.len() + b.len() - 1;
        let p = f.p() as u64;
        let coeffs = if f.is_prime_field() && p < (1 << 16) {
            // (p-1)^2 < 2^32, so at least 2^32 products fit in a u64 before reducing.
            let mut acc = vec![0u64; n];
            for (i, &x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let x = x.0 as u64;
                for (slot, &y) in acc[i..i + b.len()].iter_mut().zip(b.iter()) {
                    *slot += x * y.0 as u64;
                }
            }
            acc.into_iter().map(|v| FqElem((v % p) as u32)).collect()
        } else {
            let mut acc = vec![FqElem::ZERO; n];
            for (i, &x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    acc[i + j] = f.add(acc[i + j], f.mul(x, y));
                }
            }
            acc
        };
        Ok(Poly::from_coeffs(f, coeffs))
    }

    /// Euclidean division `self = quo * d + rem` with `deg rem < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(d)?;
        let f = &self.field;
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv_lc = f.inv(d.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![FqElem::ZERO; rem.len() - dd];
        let p = f.p() as u64;
        let fast = f.is_prime_field();
        for k in (0..quo.len()).rev() {
            let c = rem[k + dd];
            if c.is_zero() {
                continue;
            }
            let c = f.mul(c, inv_lc);
            quo[k] = c;
            if fast {
                let negc = p - c.0 as u64;
                for (r, &m) in rem[k..k + dd + 1].iter_mut().zip(d.coeffs.iter()) {
                    r.0 = ((r.0 as u64 + negc * m.0 as u64) % p) as u32;
                }
            } else {
                for (r, &m) in rem[k..k + dd + 1].iter_mut().zip(d.coeffs.iter()) {
                    *r = f.sub(*r, f.mul(c, m));
                }
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(f, quo), Poly::from_coeffs(f, rem)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Precondition(format!("{d} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly) -> Result<bool> {
        Ok(other.rem(self)?.is_zero())
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn try_pow(&self, mut k: u64) -> Result<Poly> {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, k: u64) -> Poly {
        self.try_pow(k).expect("same field")
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Result<Poly> {
        self.try_mul(other)?.rem(m)
    }

    pub fn pow_mod(&self, k: &BigUint, m: &Poly) -> Result<Poly> {
        let mut acc = Poly::one(&self.field).rem(m)?;
        let base = self.rem(m)?;
        for i in (0..k.bits()).rev() {
            acc = acc.mul_mod(&acc, m)?;
            if k.bit(i) {
                acc = acc.mul_mod(&base, m)?;
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.p() as u64) as i64)))
            .collect();
        Poly::from_coeffs(f, coeffs)
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Substitute t -> t^m.
    pub fn inflate(&self, m: usize) -> Poly {
        if self.is_zero() || m == 1 {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; (self.coeffs.len() - 1) * m + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * m] = c;
        }
        Poly { field: self.field.clone(), coeffs }
    }

    /// `self^(p^k)`, computed coefficientwise in characteristic p.
    pub fn frobenius(&self, k: u32) -> Result<Poly> {
        let f = &self.field;
        let m = (f.p() as usize).checked_pow(k).ok_or_else(|| Error::TooLarge(format!("p^{k} overflows")))?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let len = (self.coeffs.len() - 1)
            .checked_mul(m)
            .and_then(|n| n.checked_add(1))
            .filter(|&n| n <= 1 << 32)
            .ok_or_else(|| Error::TooLarge("Frobenius image too large".into()))?;
        let mut coeffs = vec![FqElem::ZERO; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let mut c = c;
            for _ in 0..(k % f.e()) {
                c = f.frobenius(c);
            }
            coeffs[i * m] = c;
        }
        Ok(Poly { field: f.clone(), coeffs })
    }

    /// `self^(q^i)`: coefficients are fixed by the q-power map, so only exponents move.
    pub fn q_power(&self, i: u32) -> Result<Poly> {
        self.frobenius(i * self.field.e())
    }

    /// The unique g with g^p = self, when `self` is a polynomial in t^p.
    pub fn pth_root(&self) -> Option<Poly> {
        let f = &self.field;
        let p = f.p() as usize;
        if self.coeffs.iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
            return None;
        }
        let coeffs = self.coeffs.iter().step_by(p).map(|&c| f.pth_root(c)).collect();
        Some(Poly::from_coeffs(f, coeffs))
    }

    /// Exponent of t dividing `self` (None for zero).
    pub fn trailing_zeros(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Largest k with `pi^k | self`; `None` for the zero polynomial.
    pub fn multiplicity(&self, pi: &Poly) -> Result<Option<u64>> {
        self.same_field(pi)?;
        if self.is_zero() {
            return Ok(None);
        }
        if pi.is_constant() {
            return Err(Error::ConstantInput("multiplicity"));
        }
        if pi.coeffs.len() == 2 && pi.coeffs[0].is_zero() {
            return Ok(self.trailing_zeros().map(|k| k as u64));
        }
        let mut k = 0u64;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.div_rem(pi)?;
            if !r.is_zero() {
                return Ok(Some(k));
            }
            k += 1;
            cur = q;
        }
    }
}

/// Extended gcd: returns `(g, r1, r2)` with `g` monic and `r1*a + r2*b = g`.
pub fn poly_xgcd(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
    a.same_field(b)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroInput("poly_xgcd"));
    }
    let f = a.field();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
    let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1)?;
        let s = s0.try_sub(&q.try_mul(&s1)?)?;
        let t = t0.try_sub(&q.try_mul(&t1)?)?;
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = f.inv(r0.leading().expect("gcd of not-both-zero is nonzero"))?;
    Ok((r0.scale(inv), s0.scale(inv), t0.scale(inv)))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$call(rhs).expect("polynomials over different fields")
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $trait<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
