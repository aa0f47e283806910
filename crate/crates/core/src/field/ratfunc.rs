use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::fq::{Fq, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

/// An element of F_q(t) in lowest terms with monic denominator; zero is `0/1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Hash for RatFunc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_ratfunc(self))
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        let den = Poly::one(p.field());
        RatFunc { num: p, den }
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        num.same_field(&den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g)?, den.div_exact(&g)?) };
        Ok(RatFunc::normalized(num, den))
    }

    /// Assumes `gcd(num, den) = 1`; only fixes the unit.
    fn normalized(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            let one = Poly::one(num.field());
            return RatFunc { num, den: one };
        }
        let lc = den.leading().expect("nonzero denominator");
        if lc == den.field().one() {
            return RatFunc { num, den };
        }
        let inv = den.field().inv(lc).expect("nonzero");
        RatFunc { num: num.scale(inv), den: den.scale(inv) }
    }

    pub fn zero(field: &Fq) -> RatFunc {
        Poly::zero(field).into()
    }

    pub fn one(field: &Fq) -> RatFunc {
        Poly::one(field).into()
    }

    pub fn t(field: &Fq) -> RatFunc {
        Poly::t(field).into()
    }

    pub fn constant(field: &Fq, c: FqElem) -> RatFunc {
        Poly::constant(field, c).into()
    }

    pub fn field(&self) -> &Fq {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// `Some(c)` when this is a constant of F_q.
    pub fn as_constant(&self) -> Option<FqElem> {
        (self.is_polynomial() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    fn same_field(&self, other: &RatFunc) -> Result<()> {
        self.num.same_field(&other.num)
    }

    pub fn try_add(&self, other: &RatFunc) -> Result<RatFunc> {
        self.same_field(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            return RatFunc::new(self.num.try_add(&other.num)?, self.den.clone());
        }
        // With both inputs reduced, gcd(num, den) divides g = gcd(d1, d2).
        let g = self.den.gcd(&other.den)?;
        let d1 = self.den.div_exact(&g)?;
        let d2 = other.den.div_exact(&g)?;
        let num = self.num.try_mul(&d2)?.try_add(&other.num.try_mul(&d1)?)?;
        let den = self.den.try_mul(&d2)?;
        if g.is_one() {
            return Ok(RatFunc::normalized(num, den));
        }
        let h = num.gcd(&g)?;
        if h.is_one() {
            Ok(RatFunc::normalized(num, den))
        } else {
            Ok(RatFunc::normalized(num.div_exact(&h)?, den.div_exact(&h)?))
        }
    }

    pub fn try_sub(&self, other: &RatFunc) -> Result<RatFunc> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &RatFunc) -> Result<RatFunc> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(RatFunc::zero(self.field()));
        }
        let g1 = self.num.gcd(&other.den)?;
        let g2 = other.num.gcd(&self.den)?;
        let num = self.num.div_exact(&g1)?.try_mul(&other.num.div_exact(&g2)?)?;
        let den = self.den.div_exact(&g2)?.try_mul(&other.den.div_exact(&g1)?)?;
        Ok(RatFunc::normalized(num, den))
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &RatFunc) -> Result<RatFunc> {
        self.try_mul(&other.inv()?)
    }

    pub fn scale(&self, c: FqElem) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.field());
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Result<RatFunc> {
        self.try_mul(&RatFunc::from(p.clone()))
    }

    /// Integer powers; negative exponents invert.
    pub fn pow(&self, k: i64) -> Result<RatFunc> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// `self^(q^i)`; stays in lowest terms because Frobenius is injective.
    pub fn q_power(&self, i: u32) -> Result<RatFunc> {
        Ok(RatFunc { num: self.num.q_power(i)?, den: self.den.q_power(i)? })
    }

    /// max(deg num, deg den); zero has height 0.
    pub fn naive_degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                self.$call(rhs).expect("rational function operation")
            }
        }
        impl $trait<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                (&self).$method(rhs)
            }
        }
        impl $trait<RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
// Panics on division by zero, like integer division.
forward_binop!(Div, div, try_div);

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_after_operations() {
        let f3 = Fq::prime(3).unwrap();
        let t = RatFunc::t(&f3);
        let one = RatFunc::one(&f3);
        let x = (&t + &one) / (&t.scale(f3.from_int(2)) + &one.scale(f3.from_int(2)));
        assert_eq!(x, RatFunc::constant(&f3, f3.from_int(2)));
        let y = &one / &t - &one / (&t + &one);
        assert!(y.den().is_monic());
        assert!(y.num().gcd(y.den()).unwrap().is_one());
        assert_eq!(y, one.clone() / (&t * (&t + &one)));
        assert_eq!(RatFunc::new(Poly::t(&f3), Poly::zero(&f3)), Err(Error::DivisionByZero));
        assert_eq!((&t - &t).den(), &Poly::one(&f3));
    }

    #[test]
    fn q_power_agrees_with_pow() {
        let f3 = Fq::prime(3).unwrap();
        let t = RatFunc::t(&f3);
        let x = (&t + &RatFunc::one(&f3)) / &t;
        assert_eq!(x.q_power(1).unwrap(), x.pow(3).unwrap());
        assert_eq!(x.q_power(2).unwrap(), x.pow(9).unwrap());
    }
}
