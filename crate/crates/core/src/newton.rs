//! Newton polygons over K at a place, and root-valuation profiles of packet polynomials.
//!
//! Convention: the polygon is the lower convex hull of the points `(i, v(c_i))`. A
//! segment of slope `s` and length `l` accounts for `l` roots of valuation `-s`, that is
//! of log-absolute value `s * deg(v)`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::drinfeld::{DrinfeldModule, RationalPoints};
use crate::error::{Error, Result};
use crate::field::{Poly, RatFunc};
use crate::places::{log_abs, valuation, Place};
use crate::{rat_int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rational,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub place: Place,
    /// `(exponent, valuation)` for every nonzero coefficient, by increasing exponent.
    pub points: Vec<(u64, i64)>,
    pub hull: Vec<(u64, i64)>,
    pub segments: Vec<Segment>,
}

/// Multiset of root log-values at one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationProfile {
    pub place: Place,
    /// `(log-value, multiplicity)`, strictly increasing in log-value.
    pub entries: Vec<(Rational, u64)>,
    /// Number of roots equal to 0 (log-value minus infinity), not listed in `entries`.
    pub zero_roots: u64,
    /// Roots known to lie in K, with their log-values; these are also counted in
    /// `entries` (or in `zero_roots` when the value is `None`).
    pub rational_roots: Vec<(RatFunc, Option<Rational>)>,
}

fn cross(o: (u64, i64), a: (u64, i64), b: (u64, i64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// Lower convex hull of points sorted by x, dropping collinear interior points.
fn lower_hull(points: &[(u64, i64)]) -> Vec<(u64, i64)> {
    let mut hull: Vec<(u64, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Newton polygon of `sum c_i X^i` (sparse, any order) at `v`.
pub fn newton_polygon(coeffs: &[(u64, RatFunc)], v: &Place) -> Result<NewtonPolygon> {
    let mut points = Vec::new();
    for (i, c) in coeffs {
        if !c.is_zero() {
            points.push((*i, valuation(c, v)?));
        }
    }
    if points.is_empty() {
        return Err(Error::ZeroInput("newton_polygon"));
    }
    points.sort_unstable();
    if points.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Precondition("repeated exponent in sparse polynomial".into()));
    }
    let hull = lower_hull(&points);
    let segments = hull
        .windows(2)
        .map(|w| {
            let length = w[1].0 - w[0].0;
            let rise = w[1].1 - w[0].1;
            Segment { slope: Rational::new(rise.into(), (length as i64).into()), length }
        })
        .collect();
    Ok(NewtonPolygon { place: v.clone(), points, hull, segments })
}

impl NewtonPolygon {
    /// Profile of the roots: one entry per segment, zero roots from the lowest exponent.
    pub fn profile(&self) -> ValuationProfile {
        let deg = rat_int(self.place.degree() as i64);
        let entries = self.segments.iter().map(|s| (&s.slope * &deg, s.length)).collect();
        ValuationProfile {
            place: self.place.clone(),
            entries,
            zero_roots: self.points[0].0,
            rational_roots: Vec::new(),
        }
    }
}

/// Root log-values of `sum c_i X^i` at `v`.
pub fn root_valuations(coeffs: &[(u64, RatFunc)], v: &Place) -> Result<ValuationProfile> {
    let poly = newton_polygon(coeffs, v)?;
    if poly.points.len() < 2 && poly.points[0].0 == 0 {
        return Err(Error::ConstantInput("root_valuations"));
    }
    Ok(poly.profile())
}

impl ValuationProfile {
    pub fn empty(place: &Place) -> ValuationProfile {
        ValuationProfile { place: place.clone(), entries: Vec::new(), zero_roots: 0, rational_roots: Vec::new() }
    }

    /// Build from an unsorted list of `(log, mult)` pairs, merging equal logs.
    pub fn from_entries(place: &Place, items: impl IntoIterator<Item = (Rational, u64)>) -> Self {
        let mut map: BTreeMap<Rational, u64> = BTreeMap::new();
        for (l, m) in items {
            if m > 0 {
                *map.entry(l).or_default() += m;
            }
        }
        ValuationProfile {
            place: place.clone(),
            entries: map.into_iter().collect(),
            zero_roots: 0,
            rational_roots: Vec::new(),
        }
    }

    /// Number of nonzero roots.
    pub fn nonzero_count(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn total_count(&self) -> u64 {
        self.nonzero_count() + self.zero_roots
    }

    /// `sum log * mult` over nonzero roots.
    pub fn log_sum(&self) -> Rational {
        self.entries.iter().fold(rat_int(0), |acc, (l, m)| acc + l * rat_int(*m as i64))
    }

    pub fn min_log(&self) -> Option<&Rational> {
        self.entries.first().map(|(l, _)| l)
    }

    pub fn count_below(&self, bound: &Rational) -> u64 {
        self.entries.iter().filter(|(l, _)| l < bound).map(|(_, m)| m).sum()
    }

    pub fn count_at_most(&self, bound: &Rational) -> u64 {
        self.entries.iter().filter(|(l, _)| l <= bound).map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, log: &Rational) -> u64 {
        self.entries.iter().find(|(l, _)| l == log).map_or(0, |(_, m)| *m)
    }

    /// Multiset difference of nonzero-root entries; `None` if `other` is not contained.
    pub fn subtract(&self, other: &ValuationProfile) -> Option<ValuationProfile> {
        let mut map: BTreeMap<Rational, u64> = self.entries.iter().cloned().collect();
        for (l, m) in &other.entries {
            let slot = map.get_mut(l)?;
            *slot = slot.checked_sub(*m)?;
        }
        let mut out = ValuationProfile::from_entries(&self.place, map);
        out.zero_roots = self.zero_roots.checked_sub(other.zero_roots)?;
        Some(out)
    }

    /// Entries with the rational roots removed (the part only a polygon can see).
    pub fn deflated(&self) -> ValuationProfile {
        let mut map: BTreeMap<Rational, u64> = self.entries.iter().cloned().collect();
        let mut zeros = self.zero_roots;
        for (_, l) in &self.rational_roots {
            match l {
                Some(l) => {
                    if let Some(m) = map.get_mut(l) {
                        *m = m.saturating_sub(1);
                    }
                }
                None => zeros = zeros.saturating_sub(1),
            }
        }
        let mut out = ValuationProfile::from_entries(&self.place, map);
        out.zero_roots = zeros;
        out
    }

    /// `[{"log": "a/b", "mult": n}, ..]`, ascending by log.
    pub fn to_json(&self) -> Value {
        Value::Array(self.entries.iter().map(|(l, m)| json!({"log": l.to_string(), "mult": m})).collect())
    }
}

/// Precomputed data for the packet `{γ : Φ_Q(γ) = α}`, reused across places.
#[derive(Clone, Debug)]
pub struct Packet {
    pub q: Poly,
    pub alpha: RatFunc,
    /// Sparse X-form of Φ_Q.
    pub phi_q: Vec<(u64, RatFunc)>,
    pub rational: RationalPoints,
}

impl Packet {
    pub fn new(m: &DrinfeldModule, q: &Poly, alpha: &RatFunc) -> Result<Packet> {
        if q.is_zero() {
            return Err(Error::ZeroInput("packet"));
        }
        let phi_q = m.phi_of(q)?.x_polynomial()?;
        let rational = m.rational_packet_points(q, alpha)?;
        Ok(Packet { q: q.clone(), alpha: alpha.clone(), phi_q, rational })
    }

    /// Number of packet points `q^(r deg Q)`.
    pub fn size(&self) -> u64 {
        self.phi_q.last().expect("nonzero").0
    }

    /// `Φ_Q(X) - c` as a sparse polynomial.
    fn shifted(&self, c: &RatFunc) -> Vec<(u64, RatFunc)> {
        let mut coeffs = self.phi_q.clone();
        if !c.is_zero() {
            coeffs.insert(0, (0, -c));
        }
        coeffs
    }

    /// `Φ_Q(β) - α`.
    pub fn offset(&self, m: &DrinfeldModule, beta: &RatFunc) -> Result<RatFunc> {
        m.phi_eval(&self.q, beta)?.try_sub(&self.alpha)
    }

    /// Profile of `log|β - γ|_v` over the packet, from `P(X) = Φ_Q(X) - (Φ_Q(β) - α)`,
    /// whose roots are exactly `β - γ` by additivity.
    pub fn distance_profile(&self, m: &DrinfeldModule, beta: &RatFunc, v: &Place) -> Result<ValuationProfile> {
        let c = self.offset(m, beta)?;
        self.distance_profile_with_offset(beta, &c, v)
    }

    pub fn distance_profile_with_offset(
        &self,
        beta: &RatFunc,
        offset: &RatFunc,
        v: &Place,
    ) -> Result<ValuationProfile> {
        if offset.is_zero() {
            return Err(Error::BaseInPacket);
        }
        let mut prof = newton_polygon(&self.shifted(offset), v)?.profile();
        for g in &self.rational.points {
            let d = beta.try_sub(g)?;
            prof.rational_roots.push((g.clone(), Some(log_abs(&d, v)?)));
        }
        Ok(prof)
    }

    /// Profile of `log|γ|_v` over the packet, from `Φ_Q(X) - α`.
    pub fn size_profile(&self, v: &Place) -> Result<ValuationProfile> {
        let mut prof = newton_polygon(&self.shifted(&self.alpha), v)?.profile();
        for g in &self.rational.points {
            let l = if g.is_zero() { None } else { Some(log_abs(g, v)?) };
            prof.rational_roots.push((g.clone(), l));
        }
        Ok(prof)
    }
}

/// Multiset `{log|β - γ|_v : Φ_Q(γ) = α}`.
pub fn packet_distance_profile(
    m: &DrinfeldModule,
    q: &Poly,
    beta: &RatFunc,
    alpha: &RatFunc,
    v: &Place,
) -> Result<ValuationProfile> {
    Packet::new(m, q, alpha)?.distance_profile(m, beta, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_poly, parse_ratfunc, Fq};
    use crate::rat;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn sparse(f: &Fq, terms: &[(u64, &str)]) -> Vec<(u64, RatFunc)> {
        terms.iter().map(|(i, s)| (*i, parse_ratfunc(f, s).unwrap())).collect()
    }

    #[test]
    fn sign_convention_x_minus_t() {
        let f = f3();
        let c = sparse(&f, &[(0, "-t"), (1, "1")]);
        let np = newton_polygon(&c, &Place::Infinite).unwrap();
        assert_eq!(np.segments, vec![Segment { slope: rat(1, 1), length: 1 }]);
        let prof = root_valuations(&c, &Place::Infinite).unwrap();
        assert_eq!(prof.entries, vec![(rat(1, 1), 1)]);
        assert_eq!(prof.zero_roots, 0);
    }

    #[test]
    fn carlitz_examples() {
        let f = f3();
        let c = sparse(&f, &[(0, "-(t+1)"), (1, "t"), (3, "1")]);
        let np = newton_polygon(&c, &Place::Infinite).unwrap();
        let segs: Vec<_> = np.segments.iter().map(|s| (s.slope.clone(), s.length)).collect();
        assert_eq!(segs, vec![(rat(0, 1), 1), (rat(1, 2), 2)]);
        let c = sparse(&f, &[(1, "t^2"), (3, "t^3+t"), (9, "1")]);
        let prof = root_valuations(&c, &Place::Infinite).unwrap();
        assert_eq!(prof.entries, vec![(rat(-1, 2), 2), (rat(1, 2), 6)]);
        assert_eq!(prof.zero_roots, 1);
        let at_t = root_valuations(&c, &Place::finite(Poly::t(&f)).unwrap()).unwrap();
        assert_eq!(at_t.entries, vec![(rat(-1, 2), 2), (rat(-1, 6), 6)]);
    }

    #[test]
    fn packet_profiles() {
        let f = f3();
        let m = DrinfeldModule::carlitz(&f);
        let q = parse_poly(&f, "t").unwrap();
        let beta = parse_ratfunc(&f, "1/t").unwrap();
        let zero = RatFunc::zero(&f);
        let p = packet_distance_profile(&m, &q, &beta, &zero, &Place::Infinite).unwrap();
        assert_eq!(p.entries, vec![(rat(-1, 1), 1), (rat(1, 2), 2)]);
        let v = Place::finite(parse_poly(&f, "t+1").unwrap()).unwrap();
        let p = packet_distance_profile(&m, &q, &beta, &zero, &v).unwrap();
        assert_eq!(p.entries, vec![(rat(-3, 1), 1), (rat(0, 1), 2)]);
        assert_eq!(p.rational_roots, vec![(zero.clone(), Some(rat(0, 1)))]);
        assert_eq!(p.deflated().entries, vec![(rat(-3, 1), 1), (rat(0, 1), 1)]);
        // Constant Q: the packet is the single point 0.
        let two = parse_poly(&f, "2").unwrap();
        let p = packet_distance_profile(&m, &two, &beta, &zero, &Place::Infinite).unwrap();
        assert_eq!(p.entries, vec![(rat(-1, 1), 1)]);
        // Torsion base point.
        let fq2 = Fq::prime(2).unwrap();
        let m2 = DrinfeldModule::carlitz(&fq2);
        let tq = parse_poly(&fq2, "t^2+t").unwrap();
        let r = packet_distance_profile(&m2, &tq, &RatFunc::one(&fq2), &RatFunc::zero(&fq2), &Place::Infinite);
        assert_eq!(r, Err(Error::BaseInPacket));
    }

    #[test]
    fn profile_json_and_subtract() {
        let v = Place::Infinite;
        let a = ValuationProfile::from_entries(&v, [(rat(1, 2), 6), (rat(-1, 2), 2)]);
        assert_eq!(a.to_json().to_string(), r#"[{"log":"-1/2","mult":2},{"log":"1/2","mult":6}]"#);
        let b = ValuationProfile::from_entries(&v, [(rat(1, 2), 2)]);
        let d = a.subtract(&b).unwrap();
        assert_eq!(d.entries, vec![(rat(-1, 2), 2), (rat(1, 2), 4)]);
        assert!(b.subtract(&a).is_none());
        assert_eq!(a.log_sum(), rat(2, 1));
    }
}
