//! Naive, local canonical and global canonical heights.

use std::collections::BTreeMap;

use crate::drinfeld::{DrinfeldModule, TorsionCertificate};
use crate::error::{Error, Result};
use crate::field::{Poly, RatFunc};
use crate::newton::{newton_polygon, Packet};
use crate::places::{log_abs, poly_support, support, valuation, Place, PlaceSet};
use crate::{rat_int, Rational};

/// Default iteration budget for local heights.
pub const DEFAULT_N_MAX: u32 = 32;

/// Orbit iterates whose naive degree exceeds this are not computed; a local height that
/// has not escaped by then is reported as a certified interval.
pub const ORBIT_DEGREE_BUDGET: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscapeBound {
    pub place: Place,
    /// `log M_v`: any `y` with `log|y|_v > log M_v` satisfies `|Φ_t(y)|_v = |a_r y^(q^r)|_v`
    /// and `|Φ_t(y)|_v > |y|_v`.
    pub log_m: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalHeight {
    Exact(Rational),
    /// `lower <= ĥ_v(x) <= upper`.
    Bounded {
        lower: Rational,
        upper: Rational,
    },
}

impl LocalHeight {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            LocalHeight::Exact(h) => Some(h),
            LocalHeight::Bounded { .. } => None,
        }
    }

    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            LocalHeight::Exact(h) => (h.clone(), h.clone()),
            LocalHeight::Bounded { lower, upper } => (lower.clone(), upper.clone()),
        }
    }

    fn shift(&self, by: &Rational) -> LocalHeight {
        match self {
            LocalHeight::Exact(h) => LocalHeight::Exact(h + by),
            LocalHeight::Bounded { lower, upper } => LocalHeight::Bounded { lower: lower + by, upper: upper + by },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalHeightResult {
    pub value: LocalHeight,
    /// First iterate index whose absolute value exceeded the escape bound.
    pub escape_step: Option<u32>,
    /// Number of orbit steps examined.
    pub steps: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightTotal {
    Exact(Rational),
    Interval(Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightBreakdown {
    pub per_place: BTreeMap<Place, LocalHeightResult>,
    pub total: HeightTotal,
}

/// `h(x) = max(deg num, deg den)`, the sum over all places of `log+|x|_v`.
pub fn naive_height(x: &RatFunc) -> Rational {
    rat_int(x.naive_degree() as i64)
}

fn log_or_none(x: &RatFunc, v: &Place) -> Result<Option<Rational>> {
    if x.is_zero() {
        Ok(None)
    } else {
        log_abs(x, v).map(Some)
    }
}

/// `log M_v` for the X-form `tX + sum a_i X^(q^i)` of Φ_t, with `d = q^r`:
/// `max(-log|a_d| / (d-1), max_i log|a_i / a_d| / (d - q^i))`.
pub fn escape_bound(m: &DrinfeldModule, v: &Place) -> Result<EscapeBound> {
    let d = m.degree_x();
    let lead = log_abs(m.leading_coefficient(), v)?;
    let mut best = -lead.clone() / rat_int(d as i64 - 1);
    let mut terms = vec![(1u64, log_abs(&RatFunc::t(m.field()), v)?)];
    let q = m.q();
    let mut e = 1u64;
    for a in &m.coefficients()[..m.rank() - 1] {
        e *= q;
        if let Some(l) = log_or_none(a, v)? {
            terms.push((e, l));
        }
    }
    for (e, l) in terms {
        let cand = (l - &lead) / rat_int((d - e) as i64);
        if cand > best {
            best = cand;
        }
    }
    Ok(EscapeBound { place: v.clone(), log_m: best })
}

/// `log|a_r|_v / (q^r - 1)`, the correction term in the escaped closed form.
fn lead_correction(m: &DrinfeldModule, v: &Place) -> Result<Rational> {
    Ok(log_abs(m.leading_coefficient(), v)? / rat_int(m.degree_x() as i64 - 1))
}

/// Upper bound on `ĥ_v(y)` over all `y` with `log|y|_v <= log M_v`:
/// `max(0, B + log|a_r|/(q^r-1)) / q^r` with `B = max_i (log|a_i| + q^i log M_v)`,
/// `a_0 = t`. If `y` does not escape, `Φ_t(y)` has `log <= B`; if it escapes,
/// `ĥ(y) = ĥ(Φ_t y)/q^r` is given by the closed form, otherwise recurse.
pub fn non_escaped_height_cap(m: &DrinfeldModule, v: &Place) -> Result<Rational> {
    let lm = escape_bound(m, v)?.log_m;
    let mut b = log_abs(&RatFunc::t(m.field()), v)? + &lm;
    let mut e = 1i64;
    for a in m.coefficients() {
        e *= m.q() as i64;
        if let Some(l) = log_or_none(a, v)? {
            let cand = l + &lm * rat_int(e);
            if cand > b {
                b = cand;
            }
        }
    }
    let s = b + lead_correction(m, v)?;
    let zero = rat_int(0);
    Ok(if s > zero { s / rat_int(m.degree_x() as i64) } else { zero })
}

/// True when `v` is finite and Φ_t has good reduction there.
pub fn good_at(m: &DrinfeldModule, v: &Place) -> Result<bool> {
    if v.is_infinite() {
        return Ok(false);
    }
    for a in m.coefficients() {
        if !a.is_zero() && valuation(a, v)? < 0 {
            return Ok(false);
        }
    }
    Ok(valuation(m.leading_coefficient(), v)? == 0)
}

/// `ĥ_{Φ,v}(x)`.
///
/// At good finite places this is `max(0, log|x|_v)`. Elsewhere the orbit is iterated;
/// at the first `k` with `log|y_k| > log M_v`, the value is
/// `q^(-rk) (log|y_k| + log|a_r|/(q^r-1))`. Without escape after `n_max` steps (or
/// before the orbit exceeds [`ORBIT_DEGREE_BUDGET`]) the result is `Exact(0)` if `x`
/// is certified torsion, else the interval `[0, cap / q^(r k)]`.
pub fn local_canonical_height(m: &DrinfeldModule, x: &RatFunc, v: &Place, n_max: u32) -> Result<LocalHeightResult> {
    let zero = rat_int(0);
    if x.is_zero() {
        return Ok(LocalHeightResult { value: LocalHeight::Exact(zero), escape_step: None, steps: 0 });
    }
    if good_at(m, v)? {
        let l = log_abs(x, v)?;
        let h = if l > zero { l } else { zero };
        return Ok(LocalHeightResult { value: LocalHeight::Exact(h), escape_step: None, steps: 0 });
    }
    let lm = escape_bound(m, v)?.log_m;
    let mut y = x.clone();
    let mut k = 0u32;
    loop {
        if y.is_zero() {
            return Ok(LocalHeightResult { value: LocalHeight::Exact(zero), escape_step: None, steps: k });
        }
        let l = log_abs(&y, v)?;
        if l > lm {
            let h = (l + lead_correction(m, v)?) / m.scale_factor(k as u64)?;
            return Ok(LocalHeightResult { value: LocalHeight::Exact(h), escape_step: Some(k), steps: k });
        }
        if k == n_max || y.naive_degree() > ORBIT_DEGREE_BUDGET {
            break;
        }
        y = m.phi_t_eval(&y)?;
        k += 1;
    }
    if n_max > 0 {
        if let TorsionCertificate::Torsion { .. } = m.torsion_test(x, n_max)? {
            return Ok(LocalHeightResult { value: LocalHeight::Exact(zero), escape_step: None, steps: k });
        }
    }
    let upper = non_escaped_height_cap(m, v)? / m.scale_factor(k as u64)?;
    Ok(LocalHeightResult { value: LocalHeight::Bounded { lower: zero, upper }, escape_step: None, steps: k })
}

/// Places where `ĥ_v(x)` can be nonzero: `support(x)`, the infinite place and the bad places.
pub fn height_places(m: &DrinfeldModule, x: &RatFunc) -> Result<PlaceSet> {
    let mut places = m.good_reduction_check()?;
    places.insert(Place::Infinite);
    if !x.is_zero() {
        places.extend(&support(x)?);
    }
    Ok(places)
}

/// `ĥ_Φ(x)` as a sum of local heights. Places off [`height_places`] contribute 0.
pub fn global_canonical_height(m: &DrinfeldModule, x: &RatFunc, n_max: u32) -> Result<HeightBreakdown> {
    let mut per_place = BTreeMap::new();
    let (mut lo, mut hi) = (rat_int(0), rat_int(0));
    let mut exact = true;
    for v in &height_places(m, x)? {
        let r = local_canonical_height(m, x, v, n_max)?;
        let (a, b) = r.value.bounds();
        exact &= r.value.exact().is_some();
        lo += a;
        hi += b;
        per_place.insert(v.clone(), r);
    }
    let total = if exact { HeightTotal::Exact(lo) } else { HeightTotal::Interval(lo, hi) };
    Ok(HeightBreakdown { per_place, total })
}

/// `λ_v(x) = ĥ_v(x) - log|x|_v + c_v` with `c_v = -log|a_r|_v / (q^r - 1)`.
pub fn normalized_local_height(m: &DrinfeldModule, x: &RatFunc, v: &Place, n_max: u32) -> Result<LocalHeightResult> {
    if x.is_zero() {
        return Err(Error::ZeroInput("normalized_local_height"));
    }
    let mut r = local_canonical_height(m, x, v, n_max)?;
    let shift = local_height_offset(m, v)? - log_abs(x, v)?;
    r.value = r.value.shift(&shift);
    Ok(r)
}

/// `c_v = -log|a_r|_v / (q^r - 1)`; zero for normal-form modules.
pub fn local_height_offset(m: &DrinfeldModule, v: &Place) -> Result<Rational> {
    Ok(-lead_correction(m, v)?)
}

/// Rows `(n, h(Φ_{t^n}(x)) / q^(r n))`.
pub fn naive_height_limit_table(m: &DrinfeldModule, x: &RatFunc, n_list: &[u64]) -> Result<Vec<(u64, Rational)>> {
    if n_list.is_empty() {
        return Err(Error::Precondition("naive_height_limit_table needs at least one n".into()));
    }
    let max_n = *n_list.iter().max().expect("nonempty");
    let orbit = m.orbit(x, max_n as usize)?;
    n_list.iter().map(|&n| Ok((n, naive_height(&orbit[n as usize]) / m.scale_factor(n)?))).collect()
}

fn require_nontorsion_packet(m: &DrinfeldModule, q: &Poly, value: &RatFunc, beta: &RatFunc) -> Result<()> {
    if value.is_zero() {
        let annihilator = match m.torsion_test(beta, 64)? {
            TorsionCertificate::Torsion { annihilator } => annihilator,
            _ => q.monic(),
        };
        return Err(Error::TorsionBase { annihilator: annihilator.to_string() });
    }
    Ok(())
}

/// `log|Φ_Q(β)|_v / q^(r deg Q)`: the average of `log|β - γ|_v` over `γ ∈ Φ[Q]`, since the
/// packet polynomial is monic with constant term `-Φ_Q(β)` (normal form).
pub fn packet_avg_log_distance(m: &DrinfeldModule, q: &Poly, beta: &RatFunc, v: &Place) -> Result<Rational> {
    if q.is_zero() {
        return Err(Error::ZeroInput("packet_avg_log_distance"));
    }
    let value = m.phi_eval(q, beta)?;
    require_nontorsion_packet(m, q, &value, beta)?;
    avg_from_value(m, q, &value, v)
}

fn avg_from_value(m: &DrinfeldModule, q: &Poly, value: &RatFunc, v: &Place) -> Result<Rational> {
    let deg = q.degree().expect("nonzero") as u64;
    let size = m.scale_factor(deg)?;
    // The product of the roots is Φ_Q(β) / lead(Φ_Q), and
    // lead(Φ_Q) = lead(Q) * a_r^(1 + q^r + .. + q^(r(deg Q - 1))).
    let mut lead_log = rat_int(0);
    if !m.is_normal_form() {
        let exponent = (0..deg).try_fold(rat_int(0), |acc, k| Ok::<_, Error>(acc + m.scale_factor(k)?))?;
        lead_log = exponent * log_abs(m.leading_coefficient(), v)?;
    }
    Ok((log_abs(value, v)? - lead_log) / size)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageRow {
    pub q: Poly,
    /// One cell per column place, aligned with [`AverageTable::places`].
    pub cells: Vec<Rational>,
    pub sum: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageTable {
    pub places: Vec<Place>,
    pub rows: Vec<AverageRow>,
    /// Local canonical height of β at each column place (the column limits).
    pub limits: Vec<LocalHeightResult>,
}

/// Packet-averaged log-distances for each Q, at every place where some cell is nonzero.
/// Each row sums to 0 by the product formula; each column tends to `ĥ_v(β)`.
pub fn packet_average_table(m: &DrinfeldModule, beta: &RatFunc, q_list: &[Poly]) -> Result<AverageTable> {
    match m.torsion_test(beta, 64)? {
        TorsionCertificate::Torsion { annihilator } => {
            return Err(Error::TorsionBase { annihilator: annihilator.to_string() })
        }
        TorsionCertificate::Undecided { steps } => return Err(Error::Undecided { steps }),
        TorsionCertificate::NonTorsion { .. } => {}
    }
    let mut values = Vec::with_capacity(q_list.len());
    let mut places = PlaceSet::new();
    places.insert(Place::Infinite);
    if !beta.is_zero() {
        places.extend(&support(beta)?);
    }
    for q in q_list {
        if q.is_zero() {
            return Err(Error::ZeroInput("packet_average_table"));
        }
        let value = m.phi_eval(q, beta)?;
        require_nontorsion_packet(m, q, &value, beta)?;
        places.extend(&support(&value)?);
        values.push(value);
    }
    places.extend(&m.good_reduction_check()?);
    if !m.is_normal_form() {
        places.extend(&poly_support(m.leading_coefficient().num())?);
    }
    let places: Vec<Place> = places.into_iter().collect();
    let mut rows = Vec::with_capacity(q_list.len());
    for (q, value) in q_list.iter().zip(&values) {
        let cells = places.iter().map(|v| avg_from_value(m, q, value, v)).collect::<Result<Vec<_>>>()?;
        let sum = cells.iter().fold(rat_int(0), |acc, c| acc + c);
        rows.push(AverageRow { q: q.clone(), cells, sum });
    }
    let limits =
        places.iter().map(|v| local_canonical_height(m, beta, v, DEFAULT_N_MAX)).collect::<Result<Vec<_>>>()?;
    Ok(AverageTable { places, rows, limits })
}

/// Places where the roots of a sparse polynomial over K can have positive log-value:
/// the infinite place, poles of coefficients and zeros of the leading coefficient.
fn naive_places(f: &[(u64, RatFunc)]) -> Result<PlaceSet> {
    let mut places = PlaceSet::new();
    places.insert(Place::Infinite);
    for (_, c) in f {
        if !c.is_zero() {
            places.extend(&poly_support(c.den())?);
        }
    }
    let lead = &f.iter().rev().find(|(_, c)| !c.is_zero()).expect("checked nonzero").1;
    places.extend(&poly_support(lead.num())?);
    Ok(places)
}

/// Average Weil height of the roots of `F = sum c_i X^i`, with multiplicity:
/// `(1/deg F) sum_v sum_roots max(0, log|root|_v)`, read off Newton polygons.
pub fn packet_naive_height_avg(f: &[(u64, RatFunc)]) -> Result<Rational> {
    let deg = f.iter().filter(|(_, c)| !c.is_zero()).map(|(i, _)| *i).max();
    let deg = match deg {
        Some(d) if d > 0 => d,
        _ => return Err(Error::ConstantInput("packet_naive_height_avg")),
    };
    let zero = rat_int(0);
    let mut total = rat_int(0);
    for v in &naive_places(f)? {
        let prof = newton_polygon(f, v)?.profile();
        for (l, mult) in &prof.entries {
            if *l > zero {
                total += l * rat_int(*mult as i64);
            }
        }
    }
    Ok(total / rat_int(deg as i64))
}

/// Packet analysis helper: `Packet` for `Φ_Q(X) = 0`.
pub fn torsion_packet(m: &DrinfeldModule, q: &Poly) -> Result<Packet> {
    Packet::new(m, q, &RatFunc::zero(m.field()))
}
