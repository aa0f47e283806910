//! The twisted polynomial ring K{τ} with `τ·c = c^q·τ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fq, RatFunc};

/// `c_0 + c_1 τ + .. + c_m τ^m` over F_q(t); trailing zeros are stripped.
#[derive(Clone, PartialEq, Eq)]
pub struct TwistedPoly {
    field: Fq,
    coeffs: Vec<RatFunc>,
}

impl fmt::Debug for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwistedPoly({self})")
    }
}

impl fmt::Display for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})*tau^{i}"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl TwistedPoly {
    pub fn new(field: &Fq, mut coeffs: Vec<RatFunc>) -> Result<TwistedPoly> {
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(TwistedPoly { field: field.clone(), coeffs })
    }

    pub fn zero(field: &Fq) -> TwistedPoly {
        TwistedPoly { field: field.clone(), coeffs: Vec::new() }
    }

    /// `c·τ^0`.
    pub fn scalar(c: RatFunc) -> TwistedPoly {
        let field = c.field().clone();
        TwistedPoly::new(&field, vec![c]).expect("single field")
    }

    pub fn one(field: &Fq) -> TwistedPoly {
        TwistedPoly::scalar(RatFunc::one(field))
    }

    /// τ itself.
    pub fn tau(field: &Fq) -> TwistedPoly {
        TwistedPoly { field: field.clone(), coeffs: vec![RatFunc::zero(field), RatFunc::one(field)] }
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.coeffs.get(i).cloned().unwrap_or_else(|| RatFunc::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// τ-degree; `None` for zero.
    pub fn tau_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&RatFunc> {
        self.coeffs.last()
    }

    fn check(&self, other: &TwistedPoly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &TwistedPoly) -> Result<TwistedPoly> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).try_add(&other.coeff(i))).collect::<Result<Vec<_>>>()?;
        TwistedPoly::new(&self.field, coeffs)
    }

    pub fn sub(&self, other: &TwistedPoly) -> Result<TwistedPoly> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).try_sub(&other.coeff(i))).collect::<Result<Vec<_>>>()?;
        TwistedPoly::new(&self.field, coeffs)
    }

    /// Composition `self ∘ other`: `sum_{i,j} f_i g_j^(q^i) τ^(i+j)`.
    pub fn compose(&self, other: &TwistedPoly) -> Result<TwistedPoly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(TwistedPoly::zero(&self.field));
        }
        let mut out = vec![RatFunc::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, fi) in self.coeffs.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in other.coeffs.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let term = fi.try_mul(&gj.q_power(i as u32)?)?;
                out[i + j] = out[i + j].try_add(&term)?;
            }
        }
        TwistedPoly::new(&self.field, out)
    }

    /// The additive polynomial `sum c_i X^(q^i)` as `(exponent, coefficient)` pairs with
    /// nonzero coefficients and strictly increasing exponents.
    pub fn x_polynomial(&self) -> Result<Vec<(u64, RatFunc)>> {
        let q = self.field.q();
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = q.checked_pow(i as u32).ok_or_else(|| Error::TooLarge(format!("exponent q^{i} overflows")))?;
            out.push((e, c.clone()));
        }
        Ok(out)
    }

    /// Evaluate the additive polynomial at `x` term by term.
    pub fn eval(&self, x: &RatFunc) -> Result<RatFunc> {
        let mut acc = RatFunc::zero(&self.field);
        let mut power = x.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.q_power(1)?;
            }
            if !c.is_zero() {
                acc = acc.try_add(&c.try_mul(&power)?)?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_ratfunc;

    #[test]
    fn commutation_rule() {
        let f3 = Fq::prime(3).unwrap();
        let c = parse_ratfunc(&f3, "t+1").unwrap();
        let lhs = TwistedPoly::tau(&f3).compose(&TwistedPoly::scalar(c.clone())).unwrap();
        let want = TwistedPoly::new(&f3, vec![RatFunc::zero(&f3), c.pow(3).unwrap()]).unwrap();
        assert_eq!(lhs, want);
    }

    #[test]
    fn carlitz_square() {
        let f3 = Fq::prime(3).unwrap();
        let r = |s| parse_ratfunc(&f3, s).unwrap();
        let phi_t = TwistedPoly::new(&f3, vec![r("t"), r("1")]).unwrap();
        let sq = phi_t.compose(&phi_t).unwrap();
        assert_eq!(sq, TwistedPoly::new(&f3, vec![r("t^2"), r("t^3+t"), r("1")]).unwrap());
        assert_eq!(phi_t.compose(&TwistedPoly::one(&f3)).unwrap(), phi_t);
    }

    #[test]
    fn x_polynomial_forms() {
        let f3 = Fq::prime(3).unwrap();
        let r = |s| parse_ratfunc(&f3, s).unwrap();
        let f = TwistedPoly::new(&f3, vec![r("t^2"), r("t^3+t"), r("1")]).unwrap();
        let xs = f.x_polynomial().unwrap();
        assert_eq!(xs, vec![(1, r("t^2")), (3, r("t^3+t")), (9, r("1"))]);
        assert!(TwistedPoly::zero(&f3).x_polynomial().unwrap().is_empty());
        assert_eq!(TwistedPoly::scalar(r("2*t")).x_polynomial().unwrap(), vec![(1, r("2*t"))]);
    }
}
