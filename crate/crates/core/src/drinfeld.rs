//! Drinfeld modules `Φ_t = t·τ^0 + a_1 τ + .. + a_r τ^r` over K = F_q(t).

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_ratfunc, Fq, FqConfig, Poly, RatFunc};
use crate::heights::{escape_bound, local_canonical_height, LocalHeight};
use crate::places::{factor_monic, log_abs, poly_support, Place, PlaceSet};
use crate::twisted::TwistedPoly;
use crate::Rational;

/// Largest number of candidates examined when searching for K-rational packet points.
pub const RATIONAL_SEARCH_LIMIT: u64 = 1 << 16;

#[derive(Clone, PartialEq, Eq)]
pub struct DrinfeldModule {
    field: Fq,
    a: Vec<RatFunc>,
}

impl fmt::Debug for DrinfeldModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DrinfeldModule({:?}, Phi_t = {})", self.field, self.phi_t())
    }
}

/// On-disk module definition. `a` lists `a_1..a_r`; the `τ^0` coefficient `t` is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDef {
    pub p: u32,
    pub e: u32,
    pub r: usize,
    pub a: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionCertificate {
    /// `Φ_annihilator(x) = 0`, annihilator monic of minimal degree.
    Torsion {
        annihilator: Poly,
    },
    /// The orbit escapes (or has positive local height) at `place` after `step` iterations.
    NonTorsion {
        place: Place,
        step: u32,
    },
    Undecided {
        steps: u32,
    },
}

impl TorsionCertificate {
    pub fn is_torsion(&self) -> bool {
        matches!(self, TorsionCertificate::Torsion { .. })
    }
}

/// K-rational points of a packet `{γ : Φ_Q(γ) = α}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoints {
    pub points: Vec<RatFunc>,
    /// Whether `points` is provably the full set of K-rational packet points.
    pub complete: bool,
}

impl DrinfeldModule {
    pub fn new(field: &Fq, a: Vec<RatFunc>) -> Result<DrinfeldModule> {
        let last = a.last().ok_or_else(|| Error::InvalidModule("rank must be at least 1".into()))?;
        if last.is_zero() {
            return Err(Error::InvalidModule("leading coefficient a_r must be nonzero".into()));
        }
        if a.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(DrinfeldModule { field: field.clone(), a })
    }

    /// The Carlitz module `Φ_t = t + τ`.
    pub fn carlitz(field: &Fq) -> DrinfeldModule {
        DrinfeldModule { field: field.clone(), a: vec![RatFunc::one(field)] }
    }

    pub fn from_def(def: &ModuleDef) -> Result<DrinfeldModule> {
        if def.a.len() != def.r {
            return Err(Error::InvalidModule(format!("r = {} but {} coefficients given", def.r, def.a.len())));
        }
        let field = Fq::new(FqConfig { p: def.p, e: def.e, modulus: def.modulus.clone() })?;
        let a = def.a.iter().map(|s| parse_ratfunc(&field, s)).collect::<Result<Vec<_>>>()?;
        DrinfeldModule::new(&field, a)
    }

    pub fn from_json(s: &str) -> Result<DrinfeldModule> {
        let def: ModuleDef = serde_json::from_str(s).map_err(|e| Error::Parse(format!("module file: {e}")))?;
        DrinfeldModule::from_def(&def)
    }

    pub fn to_def(&self) -> ModuleDef {
        let cfg = self.field.config();
        ModuleDef {
            p: cfg.p,
            e: cfg.e,
            r: self.rank(),
            a: self.a.iter().map(|c| c.to_string()).collect(),
            modulus: cfg.modulus.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_def()).expect("plain data serializes")
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `a_1..a_r`.
    pub fn coefficients(&self) -> &[RatFunc] {
        &self.a
    }

    pub fn leading_coefficient(&self) -> &RatFunc {
        self.a.last().expect("rank >= 1")
    }

    /// `q^r`, the degree of Φ_t as a polynomial in X.
    pub fn degree_x(&self) -> u64 {
        self.q().pow(self.rank() as u32)
    }

    /// `q^(r·k)` as an exact rational.
    pub fn scale_factor(&self, k: u64) -> Result<Rational> {
        let exp = (self.rank() as u64)
            .checked_mul(k)
            .and_then(|e| u32::try_from(e).ok())
            .ok_or_else(|| Error::TooLarge("q^(r k) exponent".into()))?;
        Ok(Rational::from_integer(num::BigInt::from(self.q()).pow(exp)))
    }

    pub fn is_normal_form(&self) -> bool {
        self.leading_coefficient().is_one()
    }

    pub fn phi_t(&self) -> TwistedPoly {
        let mut coeffs = vec![RatFunc::t(&self.field)];
        coeffs.extend(self.a.iter().cloned());
        TwistedPoly::new(&self.field, coeffs).expect("single field")
    }

    fn check_poly(&self, q: &Poly) -> Result<()> {
        if q.field() == &self.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Φ_Q by Horner's rule in K{τ}.
    pub fn phi_of(&self, q: &Poly) -> Result<TwistedPoly> {
        self.check_poly(q)?;
        let phi_t = self.phi_t();
        let mut acc = TwistedPoly::zero(&self.field);
        for &c in q.coeffs().iter().rev() {
            acc = phi_t.compose(&acc)?;
            if !c.is_zero() {
                acc = acc.add(&TwistedPoly::scalar(RatFunc::constant(&self.field, c)))?;
            }
        }
        debug_assert!(
            q.degree().unwrap_or(0) > 3 || self.q() > 5 || acc == self.phi_of_by_powers(q)?,
            "Horner and power-sum evaluations of Phi_Q disagree"
        );
        Ok(acc)
    }

    /// Φ_Q as `sum_k Q_k (Φ_t)^k` with explicit powers of Φ_t.
    pub fn phi_of_by_powers(&self, q: &Poly) -> Result<TwistedPoly> {
        self.check_poly(q)?;
        let phi_t = self.phi_t();
        let mut power = TwistedPoly::one(&self.field);
        let mut acc = TwistedPoly::zero(&self.field);
        for (k, &c) in q.coeffs().iter().enumerate() {
            if k > 0 {
                power = power.compose(&phi_t)?;
            }
            if !c.is_zero() {
                let term = TwistedPoly::scalar(RatFunc::constant(&self.field, c)).compose(&power)?;
                acc = acc.add(&term)?;
            }
        }
        Ok(acc)
    }

    /// One step of the dynamics: `Φ_t(y) = t y + sum a_i y^(q^i)`.
    pub fn phi_t_eval(&self, y: &RatFunc) -> Result<RatFunc> {
        if y.is_zero() {
            return Ok(y.clone());
        }
        let mut acc = y.mul_poly(&Poly::t(&self.field))?;
        let mut power = y.clone();
        for a in &self.a {
            power = power.q_power(1)?;
            if !a.is_zero() {
                acc = acc.try_add(&a.try_mul(&power)?)?;
            }
        }
        Ok(acc)
    }

    /// Φ_Q(x), by Horner over Q's coefficients on values:
    /// `Φ_{tQ'+c}(x) = Φ_t(Φ_{Q'}(x)) + c x`.
    pub fn phi_eval(&self, q: &Poly, x: &RatFunc) -> Result<RatFunc> {
        self.check_poly(q)?;
        let mut acc = RatFunc::zero(&self.field);
        for &c in q.coeffs().iter().rev() {
            acc = self.phi_t_eval(&acc)?;
            if !c.is_zero() {
                acc = acc.try_add(&x.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// Φ_Q(x) by evaluating the sparse additive polynomial term by term.
    pub fn phi_eval_sparse(&self, q: &Poly, x: &RatFunc) -> Result<RatFunc> {
        self.phi_of(q)?.eval(x)
    }

    /// The orbit `x, Φ_t(x), .., Φ_{t^n}(x)`.
    pub fn orbit(&self, x: &RatFunc, n: usize) -> Result<Vec<RatFunc>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        for _ in 0..n {
            let next = self.phi_t_eval(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Finite places where some coefficient of Φ_t is not integral or `a_r` is not a unit.
    pub fn good_reduction_check(&self) -> Result<PlaceSet> {
        let mut bad = PlaceSet::new();
        for a in &self.a {
            bad.extend(&poly_support(a.den())?);
        }
        bad.extend(&poly_support(self.leading_coefficient().num())?);
        Ok(bad)
    }

    pub fn has_good_reduction_everywhere(&self) -> Result<bool> {
        Ok(self.good_reduction_check()?.is_empty())
    }

    /// Error unless the module is in normal form with good reduction at every finite place.
    pub fn require_normal_good(&self) -> Result<()> {
        if !self.is_normal_form() {
            return Err(Error::NotNormalForm);
        }
        let bad = self.good_reduction_check()?;
        if !bad.is_empty() {
            return Err(Error::BadReduction(bad.to_string()));
        }
        Ok(())
    }

    /// Decide whether `x` is torsion by iterating Φ_t.
    ///
    /// Torsion is certified when the orbit revisits a value (`Φ_{t^k}(x) = Φ_{t^j}(x)`);
    /// the annihilator is then the minimal divisor of `t^j (t^(k-j) - 1)` killing `x`,
    /// verified by exact evaluation. Non-torsion is certified by a pole at a place of good
    /// reduction, or by an iterate leaving the escape radius at the infinite place or at a
    /// bad place.
    pub fn torsion_test(&self, x: &RatFunc, n_max: u32) -> Result<TorsionCertificate> {
        if n_max == 0 {
            return Err(Error::Precondition("torsion_test needs n_max > 0".into()));
        }
        if x.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let t = Poly::t(&self.field);
        if x.is_zero() {
            return Ok(TorsionCertificate::Torsion { annihilator: Poly::one(&self.field) });
        }
        let bad = self.good_reduction_check()?;
        if !x.den().is_one() {
            if let Some(v) = poly_support(x.den())?.into_iter().find(|v| !bad.contains(v)) {
                return Ok(TorsionCertificate::NonTorsion { place: v, step: 0 });
            }
        }
        let mut bounds = vec![(Place::Infinite, escape_bound(self, &Place::Infinite)?.log_m)];
        for v in &bad {
            bounds.push((v.clone(), escape_bound(self, v)?.log_m));
        }
        let mut seen: HashMap<RatFunc, u32> = HashMap::new();
        let mut y = x.clone();
        for k in 0..=n_max {
            if y.is_zero() {
                let relation = t.pow(k as u64);
                return self.certify_torsion(&relation, x);
            }
            for (v, lm) in &bounds {
                if log_abs(&y, v)? > *lm {
                    return Ok(TorsionCertificate::NonTorsion { place: v.clone(), step: k });
                }
            }
            if let Some(&j) = seen.get(&y) {
                let cycle = t.pow((k - j) as u64) - Poly::one(&self.field);
                let relation = t.pow(j as u64) * cycle;
                return self.certify_torsion(&relation, x);
            }
            if k == n_max {
                break;
            }
            seen.insert(y.clone(), k);
            y = self.phi_t_eval(&y)?;
        }
        Ok(TorsionCertificate::Undecided { steps: n_max })
    }

    fn certify_torsion(&self, relation: &Poly, x: &RatFunc) -> Result<TorsionCertificate> {
        let mut ann = relation.monic();
        for (pi, e) in factor_monic(relation)? {
            for _ in 0..e {
                let cand = ann.div_exact(&pi)?;
                if self.phi_eval(&cand, x)?.is_zero() {
                    ann = cand;
                } else {
                    break;
                }
            }
        }
        if !self.phi_eval(&ann, x)?.is_zero() {
            return Err(Error::Precondition(format!("orbit relation {relation} does not kill {x}")));
        }
        Ok(TorsionCertificate::Torsion { annihilator: ann })
    }

    /// K-rational solutions of `Φ_Q(γ) = α`.
    ///
    /// For normal-form modules with everywhere good reduction the search is exhaustive:
    /// poles of γ are forced by those of α (`den γ = den α^(1/q^(r deg Q))`), and
    /// `log|γ|_inf <= max(log M_inf, ĥ_inf(α) / q^(r deg Q))`. Otherwise only γ = 0 (for
    /// α = 0) is reported and the set is flagged incomplete.
    pub fn rational_packet_points(&self, q: &Poly, alpha: &RatFunc) -> Result<RationalPoints> {
        self.check_poly(q)?;
        let zero = RatFunc::zero(&self.field);
        let trivial =
            || RationalPoints { points: if alpha.is_zero() { vec![zero.clone()] } else { vec![] }, complete: false };
        if q.is_zero() {
            return Err(Error::ZeroInput("rational_packet_points"));
        }
        if !self.is_normal_form() || !self.has_good_reduction_everywhere()? {
            return Ok(trivial());
        }
        let deg_q = q.degree().expect("nonzero") as u32;
        let k = self.field.e() * self.rank() as u32 * deg_q;
        // den(γ)^(p^k) must equal den(α).
        let mut den = alpha.den().clone();
        for _ in 0..k {
            match den.pth_root() {
                Some(r) => den = r,
                None => return Ok(RationalPoints { points: vec![], complete: true }),
            }
        }
        let scale = self.scale_factor(deg_q as u64)?;
        let lm = escape_bound(self, &Place::Infinite)?.log_m;
        let h_alpha = if alpha.is_zero() {
            Rational::from_integer(0.into())
        } else {
            match local_canonical_height(self, alpha, &Place::Infinite, 32)?.value {
                LocalHeight::Exact(h) => h,
                LocalHeight::Bounded { upper, .. } => upper,
            }
        };
        let bound = std::cmp::max(lm, h_alpha / scale).floor().to_integer();
        let Ok(excess) = i64::try_from(bound) else {
            return Ok(trivial());
        };
        let max_deg = den.degree().expect("nonzero") as i64 + excess;
        if max_deg < 0 {
            // Only γ = 0 is small enough.
            let points = if alpha.is_zero() { vec![zero] } else { vec![] };
            return Ok(RationalPoints { points, complete: true });
        }
        let qf = self.q();
        let count = qf.checked_pow(max_deg as u32 + 1).filter(|&c| c <= RATIONAL_SEARCH_LIMIT);
        let Some(count) = count else {
            return Ok(trivial());
        };
        let mut points = Vec::new();
        for idx in 0..count {
            let mut rest = idx;
            let coeffs = (0..=max_deg)
                .map(|_| {
                    let c = self.field.from_index(rest % qf).expect("in range");
                    rest /= qf;
                    c
                })
                .collect();
            let num = Poly::from_coeffs(&self.field, coeffs);
            if !num.gcd(&den)?.is_one() && !num.is_zero() {
                continue;
            }
            let gamma = RatFunc::new(num, den.clone())?;
            if self.phi_eval(q, &gamma)? == *alpha {
                points.push(gamma);
            }
        }
        Ok(RationalPoints { points, complete: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_poly;

    fn carlitz(p: u32) -> DrinfeldModule {
        DrinfeldModule::carlitz(&Fq::prime(p).unwrap())
    }

    fn r(m: &DrinfeldModule, s: &str) -> RatFunc {
        parse_ratfunc(m.field(), s).unwrap()
    }

    fn poly(m: &DrinfeldModule, s: &str) -> Poly {
        parse_poly(m.field(), s).unwrap()
    }

    #[test]
    fn phi_of_examples() {
        let m = carlitz(3);
        let f = m.field().clone();
        let want = TwistedPoly::new(&f, vec![r(&m, "t^2"), r(&m, "t^3+t"), r(&m, "1")]).unwrap();
        assert_eq!(m.phi_of(&poly(&m, "t^2")).unwrap(), want);
        assert_eq!(m.phi_of(&poly(&m, "2")).unwrap(), TwistedPoly::scalar(r(&m, "2")));
        let want = TwistedPoly::new(&f, vec![r(&m, "t+1"), r(&m, "1")]).unwrap();
        assert_eq!(m.phi_of(&poly(&m, "t+1")).unwrap(), want);
        assert!(m.phi_of(&Poly::zero(&f)).unwrap().is_zero());
    }

    #[test]
    fn phi_eval_examples() {
        let m = carlitz(3);
        assert_eq!(m.phi_eval(&poly(&m, "t"), &r(&m, "1")).unwrap(), r(&m, "t+1"));
        assert_eq!(m.phi_eval(&poly(&m, "t^2"), &r(&m, "1")).unwrap(), r(&m, "t^3+t^2+t+1"));
        let m2 = carlitz(2);
        assert!(m2.phi_eval(&poly(&m2, "t"), &r(&m2, "t")).unwrap().is_zero());
        let q = poly(&m, "t^3+2*t+1");
        let x = r(&m, "(t+2)/(t^2+1)");
        assert_eq!(m.phi_eval(&q, &x).unwrap(), m.phi_eval_sparse(&q, &x).unwrap());
    }

    #[test]
    fn good_reduction_examples() {
        let f3 = Fq::prime(3).unwrap();
        assert!(carlitz(3).good_reduction_check().unwrap().is_empty());
        let m = DrinfeldModule::new(&f3, vec![parse_ratfunc(&f3, "1/t").unwrap()]).unwrap();
        assert_eq!(m.good_reduction_check().unwrap().to_string(), "t");
        let m = DrinfeldModule::new(&f3, vec![parse_ratfunc(&f3, "t").unwrap()]).unwrap();
        assert_eq!(m.good_reduction_check().unwrap().to_string(), "t");
        assert!(!m.is_normal_form());
        assert_eq!(m.require_normal_good(), Err(Error::NotNormalForm));
    }

    #[test]
    fn torsion_examples() {
        let m2 = carlitz(2);
        assert_eq!(
            m2.torsion_test(&r(&m2, "t"), 32).unwrap(),
            TorsionCertificate::Torsion { annihilator: poly(&m2, "t") }
        );
        assert_eq!(
            m2.torsion_test(&r(&m2, "1"), 32).unwrap(),
            TorsionCertificate::Torsion { annihilator: poly(&m2, "t^2+t") }
        );
        let m3 = carlitz(3);
        assert_eq!(
            m3.torsion_test(&r(&m3, "1"), 32).unwrap(),
            TorsionCertificate::NonTorsion { place: Place::Infinite, step: 1 }
        );
        assert_eq!(
            m3.torsion_test(&r(&m3, "1/t"), 32).unwrap(),
            TorsionCertificate::NonTorsion { place: Place::Finite(Poly::t(m3.field())), step: 0 }
        );
        assert!(m3.torsion_test(&r(&m3, "1"), 0).is_err());
    }

    #[test]
    fn module_json_round_trip() {
        let m = DrinfeldModule::from_json(r#"{"p":3,"e":1,"r":1,"a":["1"]}"#).unwrap();
        assert_eq!(m, carlitz(3));
        assert_eq!(m.to_json(), r#"{"p":3,"e":1,"r":1,"a":["1"]}"#);
        assert!(DrinfeldModule::from_json(r#"{"p":3,"e":1,"r":2,"a":["1"]}"#).is_err());
        assert!(DrinfeldModule::from_json(r#"{"p":3,"e":1,"r":1,"a":["0"]}"#).is_err());
        assert!(DrinfeldModule::from_json(r#"{"p":3,"e":1,"r":1,"a":["1"],"x":1}"#).is_err());
        let ext = r#"{"p":3,"e":2,"r":2,"a":["[0,1]*t","1"],"modulus":[1,0,1]}"#;
        let m = DrinfeldModule::from_json(ext).unwrap();
        assert_eq!(DrinfeldModule::from_json(&m.to_json()).unwrap(), m);
        assert!(DrinfeldModule::from_json(r#"{"p":5,"e":2,"r":1,"a":["1"],"modulus":[1,0,1]}"#).is_err());
    }

    #[test]
    fn rational_torsion_points_of_carlitz() {
        let m2 = carlitz(2);
        let zero = RatFunc::zero(m2.field());
        let pts = m2.rational_packet_points(&poly(&m2, "t^2+t"), &zero).unwrap();
        assert!(pts.complete);
        let texts: Vec<String> = pts.points.iter().map(|p| p.to_string()).collect();
        assert_eq!(texts, ["0", "1", "t", "t+1"]);
        let m3 = carlitz(3);
        let pts = m3.rational_packet_points(&poly(&m3, "t^3"), &RatFunc::zero(m3.field())).unwrap();
        assert_eq!(pts.points, vec![RatFunc::zero(m3.field())]);
        // Backward orbit: Φ_t(γ) = Φ_t(1/t) has the rational solution 1/t.
        let alpha = m3.phi_eval(&poly(&m3, "t"), &r(&m3, "1/t")).unwrap();
        let pts = m3.rational_packet_points(&poly(&m3, "t"), &alpha).unwrap();
        assert!(pts.complete);
        assert_eq!(pts.points, vec![r(&m3, "1/t")]);
    }
}
