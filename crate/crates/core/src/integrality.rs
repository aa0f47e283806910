//! S-integrality of packets relative to a base point, torsion discreteness near a finite
//! place, the small-height Carlitz sequence and the minimum log-distance fit.

use std::fmt;

use rayon::prelude::*;

use crate::drinfeld::{DrinfeldModule, TorsionCertificate};
use crate::error::{Error, Result};
use crate::field::{poly_irreducible, Fq, Poly, RatFunc};
use crate::heights::packet_naive_height_avg;
use crate::newton::{newton_polygon, Packet, ValuationProfile};
use crate::places::{log_abs, poly_support, support, Place, PlaceSet};
use crate::{rat_int, Rational};

/// Absolute slack allowed when the fitted line is compared to exact rows.
pub const FIT_TOLERANCE: f64 = 1e-9;

/// Step budget for certifying that a base point is not torsion.
pub const BASE_TORSION_STEPS: u32 = 64;

/// Which condition applies at a place: `|β|_v <= 1` asks `|β - γ|_v >= 1`,
/// `|β|_v > 1` asks `|γ|_v <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Distance,
    Size,
}

impl Branch {
    fn for_beta(beta: &RatFunc, v: &Place) -> Result<Branch> {
        if !beta.is_zero() && log_abs(beta, v)? > rat_int(0) {
            Ok(Branch::Size)
        } else {
            Ok(Branch::Distance)
        }
    }

    fn violates(self, log: &Rational) -> bool {
        match self {
            Branch::Distance => *log < rat_int(0),
            Branch::Size => *log > rat_int(0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Distance => "distance",
            Branch::Size => "size",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    All,
    None,
    Indeterminate,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::All => "ALL",
            VerdictKind::None => "NONE",
            VerdictKind::Indeterminate => "INDETERMINATE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub place: Place,
    pub log: Rational,
    pub mult: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceCheck {
    pub place: Place,
    pub branch: Branch,
    pub profile: ValuationProfile,
    pub violating: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityVerdict {
    pub kind: VerdictKind,
    pub witnesses: Vec<Witness>,
    /// K-rational packet points with their exact S-integrality.
    pub rational_points: Vec<(RatFunc, bool)>,
    pub checks: Vec<PlaceCheck>,
}

/// Exact S-integrality of a K-rational `γ` relative to `β`.
pub fn s_integral_rational(gamma: &RatFunc, beta: &RatFunc, s: &PlaceSet) -> Result<bool> {
    let diff = beta.try_sub(gamma)?;
    if diff.is_zero() {
        // |β - γ|_v = 0 < 1 at each of the infinitely many places off S with |β|_v <= 1.
        return Ok(false);
    }
    // Violations need |β - γ|_v < 1 or |γ|_v > 1, so they sit in these supports.
    let mut places = support(&diff)?;
    if !gamma.is_zero() {
        places.extend(&support(gamma)?);
    }
    for v in places.difference(s).iter() {
        let ok = match Branch::for_beta(beta, v)? {
            Branch::Distance => log_abs(&diff, v)? >= rat_int(0),
            Branch::Size => gamma.is_zero() || log_abs(gamma, v)? <= rat_int(0),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Trichotomy for the packet `{γ : Φ_Q(γ) = α}` relative to `β`.
///
/// Checked places are `support(β) ∪ support(Φ_Q(β) - α) ∪ support(α) ∪ {inf}`, minus `S`;
/// elsewhere good reduction makes both branches hold for every root.
pub fn packet_integrality_verdict(
    m: &DrinfeldModule,
    q: &Poly,
    beta: &RatFunc,
    s: &PlaceSet,
    alpha: &RatFunc,
) -> Result<IntegralityVerdict> {
    m.require_normal_good()?;
    let packet = Packet::new(m, q, alpha)?;
    verdict_for_packet(m, &packet, beta, s)
}

fn verdict_for_packet(m: &DrinfeldModule, packet: &Packet, beta: &RatFunc, s: &PlaceSet) -> Result<IntegralityVerdict> {
    let offset = packet.offset(m, beta)?;
    if offset.is_zero() {
        return Err(Error::BaseInPacket);
    }
    let mut relevant = support(&offset)?;
    relevant.insert(Place::Infinite);
    if !beta.is_zero() {
        relevant.extend(&support(beta)?);
    }
    if !packet.alpha.is_zero() {
        relevant.extend(&support(&packet.alpha)?);
    }
    let relevant = relevant.difference(s);

    let mut checks = Vec::new();
    let mut witnesses = Vec::new();
    let mut none_place = false;
    for v in relevant.iter() {
        let branch = Branch::for_beta(beta, v)?;
        let profile = match branch {
            Branch::Distance => packet.distance_profile_with_offset(beta, &offset, v)?,
            Branch::Size => packet.size_profile(v)?,
        };
        let mut violating = 0;
        for (l, mult) in &profile.entries {
            if branch.violates(l) {
                violating += mult;
                witnesses.push(Witness { place: v.clone(), log: l.clone(), mult: *mult });
            }
        }
        if violating > 0 && violating == profile.total_count() {
            none_place = true;
        }
        checks.push(PlaceCheck { place: v.clone(), branch, profile, violating });
    }
    let rational_points = packet
        .rational
        .points
        .iter()
        .map(|g| Ok((g.clone(), s_integral_rational(g, beta, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let kind = if witnesses.is_empty() {
        VerdictKind::All
    } else if none_place {
        VerdictKind::None
    } else {
        VerdictKind::Indeterminate
    };
    Ok(IntegralityVerdict { kind, witnesses, rational_points, checks })
}

/// Error unless `x` is certified non-torsion.
pub fn require_nontorsion(m: &DrinfeldModule, x: &RatFunc) -> Result<()> {
    match m.torsion_test(x, BASE_TORSION_STEPS)? {
        TorsionCertificate::NonTorsion { .. } => Ok(()),
        TorsionCertificate::Torsion { annihilator } => Err(Error::TorsionBase { annihilator: annihilator.to_string() }),
        TorsionCertificate::Undecided { steps } => Err(Error::Undecided { steps }),
    }
}

/// All monic polynomials of degree at most `max_deg`, ordered by degree then lexicographically.
pub fn monic_polys_up_to(field: &Fq, max_deg: u32) -> Result<Vec<Poly>> {
    let q = field.q();
    let mut out = Vec::new();
    for d in 0..=max_deg {
        let count = q
            .checked_pow(d)
            .filter(|&c| c <= 1 << 20)
            .ok_or_else(|| Error::TooLarge(format!("q^{d} monic polynomials")))?;
        let mut batch: Vec<Poly> = (0..count)
            .map(|mut idx| {
                let mut coeffs = Vec::with_capacity(d as usize + 1);
                for _ in 0..d {
                    coeffs.push(field.from_index(idx % q).expect("in range"));
                    idx /= q;
                }
                coeffs.push(field.one());
                Poly::from_coeffs(field, coeffs)
            })
            .collect();
        batch.sort();
        out.extend(batch);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub q: Poly,
    /// `Err` text when `Φ_Q(β) = α` for this Q.
    pub verdict: std::result::Result<IntegralityVerdict, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub all: usize,
    pub none: usize,
    pub indeterminate: usize,
    /// Nonconstant Q with an ALL verdict.
    pub candidates: Vec<Poly>,
}

/// Verdicts for every monic Q with `deg Q <= max_deg`.
pub fn integrality_scan(
    m: &DrinfeldModule,
    beta: &RatFunc,
    s: &PlaceSet,
    max_deg: u32,
    alpha: &RatFunc,
) -> Result<ScanReport> {
    m.require_normal_good()?;
    require_nontorsion(m, beta)?;
    if !alpha.is_zero() {
        if let TorsionCertificate::Torsion { annihilator } = m.torsion_test(alpha, BASE_TORSION_STEPS)? {
            return Err(Error::Precondition(format!(
                "alpha is torsion (annihilator {annihilator}); backward orbits of torsion points are torsion packets"
            )));
        }
    }
    let qs = monic_polys_up_to(m.field(), max_deg)?;
    let rows = qs
        .par_iter()
        .map(|q| {
            let verdict = match packet_integrality_verdict(m, q, beta, s, alpha) {
                Ok(v) => Ok(v),
                Err(Error::BaseInPacket) => Err(Error::BaseInPacket.to_string()),
                Err(e) => return Err(e),
            };
            Ok(ScanRow { q: q.clone(), verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |k: VerdictKind| rows.iter().filter(|r| matches!(&r.verdict, Ok(v) if v.kind == k)).count();
    let candidates = rows
        .iter()
        .filter(|r| !r.q.is_constant() && matches!(&r.verdict, Ok(v) if v.kind == VerdictKind::All))
        .map(|r| r.q.clone())
        .collect();
    Ok(ScanReport {
        all: count(VerdictKind::All),
        none: count(VerdictKind::None),
        indeterminate: count(VerdictKind::Indeterminate),
        rows,
        candidates,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallBound {
    /// `log|π|_v / (q - 1) = -deg π / (q - 1)`.
    pub s0_log: Rational,
    /// Smallest integer `n >= 1` with `n >= 1 + log_q(s0_log / s_log)`.
    pub n0: u32,
}

fn finite_place_poly(v: &Place) -> Result<&Poly> {
    match v {
        Place::Finite(pi) => Ok(pi),
        Place::Infinite => Err(Error::Precondition("a finite place is required".into())),
    }
}

/// Torsion points with `log|x|_v < s_log` are killed by `π^n0`.
pub fn torsion_ball_bound(m: &DrinfeldModule, v: &Place, s_log: &Rational) -> Result<BallBound> {
    if !m.has_good_reduction_everywhere()? {
        return Err(Error::BadReduction(m.good_reduction_check()?.to_string()));
    }
    let pi = finite_place_poly(v)?;
    if *s_log >= rat_int(0) {
        return Err(Error::Precondition("s_log must be negative".into()));
    }
    let deg = pi.degree().expect("irreducible") as i64;
    let s0_log = Rational::new((-deg).into(), (m.q() as i64 - 1).into());
    let ratio = &s0_log / s_log;
    let q = rat_int(m.q() as i64);
    let mut n0 = 1u32;
    let mut power = rat_int(1);
    while power < ratio {
        power *= &q;
        n0 += 1;
    }
    Ok(BallBound { s0_log, n0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallCensus {
    /// Profile of `Φ[π^n]` at `π`; the zero point is in `zero_roots`.
    pub profile: ValuationProfile,
    /// Nonzero points with `log < s_log`.
    pub count_below: u64,
}

pub fn torsion_ball_census(m: &DrinfeldModule, pi: &Poly, n: u32, s_log: &Rational) -> Result<BallCensus> {
    if n == 0 {
        return Err(Error::Precondition("census needs n >= 1".into()));
    }
    if pi.is_constant() || !poly_irreducible(pi)? {
        return Err(Error::Precondition(format!("{pi} is not irreducible")));
    }
    let pi = pi.monic();
    let v = Place::finite(pi.clone())?;
    let xform = m.phi_of(&pi.pow(n as u64))?.x_polynomial()?;
    let profile = newton_polygon(&xform, &v)?.profile();
    let count_below = profile.count_below(s_log);
    Ok(BallCensus { profile, count_below })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinDistanceRow {
    pub q: Poly,
    pub d: u64,
    pub min_log: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinDistanceFit {
    pub rows: Vec<MinDistanceRow>,
    pub c0: f64,
    pub c1: f64,
    /// Rows used for the fit (the first half); the rest are validation rows.
    pub training: usize,
    /// Validation rows where the fitted line exceeds the observed minimum.
    pub violations: Vec<usize>,
}

impl MinDistanceFit {
    pub fn lower_bounds_validation(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn predict(&self, d: u64) -> f64 {
        self.c0 + self.c1 * dlogd(d)
    }
}

fn dlogd(d: u64) -> f64 {
    if d <= 1 {
        0.0
    } else {
        d as f64 * (d as f64).ln()
    }
}

/// Least squares `y ≈ c0 + c1 x`; a single distinct `x` gives the flat fit at the mean.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return (my, 0.0);
    }
    let c1 = sxy / sxx;
    (my - c1 * mx, c1)
}

/// `min log|β - γ|_inf` over `γ ∈ Φ[Q]` for each Q, and a `C0 + C1 d log d` fit.
pub fn min_distance_report(m: &DrinfeldModule, beta: &RatFunc, q_list: &[Poly]) -> Result<MinDistanceFit> {
    require_nontorsion(m, beta)?;
    let zero = RatFunc::zero(m.field());
    let rows = q_list
        .iter()
        .map(|q| {
            let packet = Packet::new(m, q, &zero)?;
            let prof = packet.distance_profile(m, beta, &Place::Infinite)?;
            let min_log = prof.min_log().cloned().expect("packet is nonempty");
            Ok(MinDistanceRow { q: q.clone(), d: q.degree().expect("nonzero") as u64, min_log })
        })
        .collect::<Result<Vec<_>>>()?;
    let training = rows.len().div_ceil(2);
    let xs: Vec<f64> = rows[..training].iter().map(|r| dlogd(r.d)).collect();
    let ys: Vec<f64> = rows[..training].iter().map(|r| rational_to_f64(&r.min_log)).collect();
    let (c0, c1) = least_squares(&xs, &ys);
    let mut fit = MinDistanceFit { rows, c0, c1, training, violations: Vec::new() };
    fit.violations = (training..fit.rows.len())
        .filter(|&i| fit.predict(fit.rows[i].d) > rational_to_f64(&fit.rows[i].min_log) + FIT_TOLERANCE)
        .collect();
    Ok(fit)
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallHeightRow {
    pub n: u32,
    /// Coefficients of `F_n(z)`, lowest degree first.
    pub f_n: Vec<Poly>,
    pub avg_h: Rational,
    pub u_n: Rational,
    /// Packet-level S-integrality of the roots of `F_n` relative to 1 with `S = {inf}`.
    pub integral: VerdictKind,
}

fn dense_to_sparse(coeffs: &[Poly]) -> Vec<(u64, RatFunc)> {
    coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as u64, RatFunc::from(c.clone()))).collect()
}

/// For the Carlitz module over F_p, `F_n(z) = Φ_{t^n}(z) (z - 1) - 1`, whose roots `x`
/// satisfy `Φ_{t^n}(x) (x - 1) = 1`. Reports the average naive height of the roots,
/// `U_n = avg_h(F_n(z + 1)) / p^n`, and an ALL/NONE/INDETERMINATE check that every root is
/// S-integral relative to 1 for `S = {inf}` (roots of `F_n(z+1)` must have `log >= 0` at
/// every finite place).
pub fn small_height_sequence(p: u32, n_list: &[u32]) -> Result<Vec<SmallHeightRow>> {
    if p % 2 == 0 {
        return Err(Error::Precondition("the small-height sequence is reproduced for odd p only".into()));
    }
    let field = Fq::prime(p)?;
    let m = DrinfeldModule::carlitz(&field);
    let t = Poly::t(&field);
    n_list
        .par_iter()
        .map(|&n| {
            let xform = m.phi_of(&t.pow(n as u64))?.x_polynomial()?;
            let top = xform.last().expect("nonzero").0 as usize;
            // phi[k] = coefficient of z^k in Φ_{t^n}(z), polynomial in t.
            let mut phi = vec![Poly::zero(&field); top + 1];
            for (e, c) in &xform {
                phi[*e as usize] = c.as_poly().expect("Carlitz coefficients are polynomials").clone();
            }
            let one = Poly::one(&field);
            // F_n(z) = z Φ(z) - Φ(z) - 1.
            let mut f = vec![Poly::zero(&field); top + 2];
            for (k, c) in phi.iter().enumerate() {
                f[k + 1] = f[k + 1].try_add(c)?;
                f[k] = f[k].try_sub(c)?;
            }
            f[0] = f[0].try_sub(&one)?;
            // F_n(z + 1) = z (Φ(z) + Φ(1)) - 1.
            let phi_one = phi.iter().try_fold(Poly::zero(&field), |acc, c| acc.try_add(c))?;
            let mut g = vec![Poly::zero(&field); top + 2];
            for (k, c) in phi.iter().enumerate() {
                g[k + 1] = c.clone();
            }
            g[1] = g[1].try_add(&phi_one)?;
            g[0] = -one.clone();
            let avg_h = packet_naive_height_avg(&dense_to_sparse(&f))?;
            let shifted = dense_to_sparse(&g);
            let scale = rat_int(p as i64).pow(n as i32);
            let u_n = packet_naive_height_avg(&shifted)? / scale;
            let integral = shifted_integrality(&shifted)?;
            Ok(SmallHeightRow { n, f_n: f, avg_h, u_n, integral })
        })
        .collect()
}

/// Roots `y` of a polynomial over F_q[t] must satisfy `log|y|_v >= 0` at every finite place.
/// Only zeros of the constant and leading coefficients can bend the polygon downward.
fn shifted_integrality(g: &[(u64, RatFunc)]) -> Result<VerdictKind> {
    let mut places = PlaceSet::new();
    let low = &g.first().expect("nonempty").1;
    let high = &g.last().expect("nonempty").1;
    places.extend(&poly_support(low.num())?);
    places.extend(&poly_support(high.num())?);
    for (_, c) in g {
        places.extend(&poly_support(c.den())?);
    }
    let zero = rat_int(0);
    let mut kind = VerdictKind::All;
    for v in &places {
        let prof = newton_polygon(g, v)?.profile();
        let bad = prof.count_below(&zero);
        if bad == prof.total_count() {
            return Ok(VerdictKind::None);
        }
        if bad > 0 {
            kind = VerdictKind::Indeterminate;
        }
    }
    Ok(kind)
}
