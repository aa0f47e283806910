//! Places of K = F_q(t) and normalized log-absolute values.
//!
//! A finite place is a monic irreducible π; `log|x|_π = -v_π(x) * deg π`. The infinite
//! place has `v_inf(f/g) = deg g - deg f` and `log|x|_inf = -v_inf(x)`, so that
//! `log|t|_inf = 1` and the product formula `sum_v log|x|_v = 0` holds exactly.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock, RwLock};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{parse_poly, poly_factor, poly_irreducible, Fq, FqConfig, Poly, RatFunc};
use crate::{rat_int, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Infinite,
    Finite(Poly),
}

impl Place {
    /// Validated finite place: `pi` must be monic irreducible.
    pub fn finite(pi: Poly) -> Result<Place> {
        if !pi.is_monic() {
            return Err(Error::Precondition(format!("place {pi} is not monic")));
        }
        if !poly_irreducible(&pi)? {
            return Err(Error::Precondition(format!("place {pi} is not irreducible")));
        }
        Ok(Place::Finite(pi))
    }

    /// `inf` or the text of a monic irreducible polynomial.
    pub fn parse(field: &Fq, s: &str) -> Result<Place> {
        let s = s.trim();
        if s == "inf" || s == "infinity" {
            return Ok(Place::Infinite);
        }
        Place::finite(parse_poly(field, s)?)
    }

    pub fn degree(&self) -> u64 {
        match self {
            Place::Infinite => 1,
            Place::Finite(pi) => pi.degree().expect("nonconstant") as u64,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }
}

/// Infinite first, then by degree, then lexicographically from the top coefficient.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinite, Place::Infinite) => Ordering::Equal,
            (Place::Infinite, _) => Ordering::Less,
            (_, Place::Infinite) => Ordering::Greater,
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => f.write_str("inf"),
            Place::Finite(pi) => write!(f, "{pi}"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Place({self})")
    }
}

/// A finite set of places, kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaceSet(BTreeSet<Place>);

impl PlaceSet {
    pub fn new() -> Self {
        PlaceSet(BTreeSet::new())
    }

    pub fn insert(&mut self, v: Place) -> bool {
        self.0.insert(v)
    }

    pub fn contains(&self, v: &Place) -> bool {
        self.0.contains(v)
    }

    pub fn extend(&mut self, other: &PlaceSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn iter(&self) -> impl Iterator<Item = &Place> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn difference(&self, other: &PlaceSet) -> PlaceSet {
        PlaceSet(self.0.difference(&other.0).cloned().collect())
    }

    /// Comma-separated list, e.g. `inf,t,t+1`.
    pub fn parse(field: &Fq, s: &str) -> Result<PlaceSet> {
        let mut out = PlaceSet::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            out.insert(Place::parse(field, part)?);
        }
        Ok(out)
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromIterator<Place> for PlaceSet {
    fn from_iter<I: IntoIterator<Item = Place>>(iter: I) -> Self {
        PlaceSet(iter.into_iter().collect())
    }
}

impl IntoIterator for PlaceSet {
    type Item = Place;
    type IntoIter = std::collections::btree_set::IntoIter<Place>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a PlaceSet {
    type Item = &'a Place;
    type IntoIter = std::collections::btree_set::Iter<'a, Place>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Valuation of a nonzero element at `v`.
pub fn valuation(x: &RatFunc, v: &Place) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroInput("valuation"));
    }
    match v {
        Place::Infinite => {
            let dn = x.num().degree().expect("nonzero") as i64;
            let dd = x.den().degree().expect("nonzero") as i64;
            Ok(dd - dn)
        }
        Place::Finite(pi) => {
            let a = x.num().multiplicity(pi)?.expect("nonzero") as i64;
            let b = x.den().multiplicity(pi)?.expect("nonzero") as i64;
            Ok(a - b)
        }
    }
}

/// Valuation of a nonzero polynomial at a place (cheaper than going through RatFunc).
pub fn poly_valuation(p: &Poly, v: &Place) -> Result<i64> {
    match v {
        Place::Infinite => p.degree().map(|d| -(d as i64)).ok_or(Error::ZeroInput("valuation")),
        Place::Finite(pi) => p.multiplicity(pi)?.map(|k| k as i64).ok_or(Error::ZeroInput("valuation")),
    }
}

/// `log|x|_v = -valuation(x, v) * deg v`, exact.
pub fn log_abs(x: &RatFunc, v: &Place) -> Result<Rational> {
    Ok(rat_int(log_abs_int(x, v)?))
}

/// Log-absolute values of elements of K are integers.
pub fn log_abs_int(x: &RatFunc, v: &Place) -> Result<i64> {
    Ok(-valuation(x, v)? * v.degree() as i64)
}

type CacheKey = (FqConfig, Vec<u32>);
type Factors = Vec<(Poly, u32)>;

fn memo() -> &'static Mutex<HashMap<CacheKey, Factors>> {
    static MEMO: OnceLock<Mutex<HashMap<CacheKey, Factors>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_dir() -> &'static RwLock<Option<PathBuf>> {
    static DIR: OnceLock<RwLock<Option<PathBuf>>> = OnceLock::new();
    DIR.get_or_init(|| RwLock::new(None))
}

/// Point the factorization cache at a directory (content-addressed, safe to delete).
pub fn set_factor_cache_dir(dir: Option<PathBuf>) {
    *cache_dir().write().expect("cache dir lock") = dir;
}

fn disk_key(f: &Poly) -> String {
    let cfg = f.field().config();
    let mut h = Sha256::new();
    h.update(format!("{}:{}:{:?}|{}", cfg.p, cfg.e, cfg.modulus, f).as_bytes());
    hex::encode(h.finalize())
}

fn disk_load(f: &Poly) -> Option<Factors> {
    let dir = cache_dir().read().ok()?.clone()?;
    let text = std::fs::read_to_string(dir.join(disk_key(f))).ok()?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let (e, p) = line.split_once(' ')?;
        out.push((parse_poly(f.field(), p).ok()?, e.parse().ok()?));
    }
    // Reject stale or corrupt entries.
    let prod = out.iter().fold(Poly::one(f.field()), |acc, (g, e)| acc * g.pow(*e as u64));
    (prod == *f).then_some(out)
}

fn disk_store(f: &Poly, factors: &Factors) {
    let Some(dir) = cache_dir().read().ok().and_then(|d| d.clone()) else {
        return;
    };
    let body: String = factors.iter().map(|(g, e)| format!("{e} {g}\n")).collect();
    if std::fs::create_dir_all(&dir).is_ok() {
        let _ = std::fs::write(dir.join(disk_key(f)), body);
    }
}

/// Monic irreducible factors of a nonzero polynomial, memoized. This is the one
/// gateway to factorization used by the rest of the crate.
pub fn factor_monic(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("factor"));
    }
    let f = f.monic();
    if f.is_one() {
        return Ok(Vec::new());
    }
    let key = (f.field().config().clone(), f.coeffs().iter().map(|c| c.index()).collect());
    if let Some(hit) = memo().lock().expect("memo lock").get(&key) {
        return Ok(hit.clone());
    }
    let factors = match disk_load(&f) {
        Some(v) => v,
        None => {
            let v = poly_factor(&f)?.factors;
            disk_store(&f, &v);
            v
        }
    };
    memo().lock().expect("memo lock").insert(key, factors.clone());
    Ok(factors)
}

/// Finite places dividing a nonzero polynomial.
pub fn poly_support(f: &Poly) -> Result<PlaceSet> {
    Ok(factor_monic(f)?.into_iter().map(|(g, _)| Place::Finite(g)).collect())
}

/// Exactly the places where `x` has nonzero valuation.
pub fn support(x: &RatFunc) -> Result<PlaceSet> {
    if x.is_zero() {
        return Err(Error::ZeroInput("support"));
    }
    let mut out = poly_support(x.num())?;
    out.extend(&poly_support(x.den())?);
    if x.num().degree() != x.den().degree() {
        out.insert(Place::Infinite);
    }
    Ok(out)
}

/// Sum over all places of `max(0, log|x|_v)`.
pub fn weil_height(x: &RatFunc) -> Result<Rational> {
    if x.is_zero() {
        return Ok(rat_int(0));
    }
    let mut total = rat_int(0);
    for v in &support(x)? {
        let l = log_abs(x, v)?;
        if l > rat_int(0) {
            total += l;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_ratfunc;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let f = f3();
        let x = parse_ratfunc(&f, "(t^2+1)/t").unwrap();
        assert_eq!(valuation(&x, &Place::Infinite).unwrap(), -1);
        assert_eq!(valuation(&x, &Place::Finite(Poly::t(&f))).unwrap(), -1);
        let pi = Place::parse(&f, "t^2+1").unwrap();
        assert_eq!(valuation(&x, &pi).unwrap(), 1);
        assert_eq!(valuation(&RatFunc::zero(&f), &pi), Err(Error::ZeroInput("valuation")));
    }

    #[test]
    fn log_abs_examples() {
        let f = f3();
        assert_eq!(log_abs(&RatFunc::t(&f), &Place::Infinite).unwrap(), rat_int(1));
        let x = parse_ratfunc(&f, "(t^2+1)/t").unwrap();
        let pi = Place::parse(&f, "t^2+1").unwrap();
        assert_eq!(log_abs(&x, &pi).unwrap(), rat_int(-2));
        let c = RatFunc::constant(&f, f.from_int(2));
        for v in [Place::Infinite, pi] {
            assert_eq!(log_abs(&c, &v).unwrap(), rat_int(0));
        }
    }

    #[test]
    fn support_examples() {
        let f = f3();
        let x = parse_ratfunc(&f, "(t^2+1)/t").unwrap();
        assert_eq!(support(&x).unwrap().to_string(), "inf,t,t^2+1");
        assert!(support(&RatFunc::one(&f)).unwrap().is_empty());
        let f2 = Fq::prime(2).unwrap();
        let y = parse_ratfunc(&f2, "t+1").unwrap();
        assert_eq!(support(&y).unwrap().to_string(), "inf,t+1");
    }

    #[test]
    fn places_order_and_parse() {
        let f = f3();
        let s = PlaceSet::parse(&f, "t^2+1, t+1, inf, t").unwrap();
        assert_eq!(s.to_string(), "inf,t,t+1,t^2+1");
        assert!(Place::parse(&f, "t^2+2").is_err());
        assert!(Place::parse(&f, "2*t").is_err());
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("drinfeld-cache-test-{}", std::process::id()));
        let f = f3();
        let g = parse_poly(&f, "t^7+t^5+2*t+1").unwrap();
        let want = poly_factor(&g).unwrap().factors;
        set_factor_cache_dir(Some(dir.clone()));
        disk_store(&g, &want);
        assert_eq!(disk_load(&g).unwrap(), want);
        set_factor_cache_dir(None);
        let _ = std::fs::remove_dir_all(dir);
    }
}
