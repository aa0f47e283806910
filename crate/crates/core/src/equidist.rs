//! Haar log-integral, torsion lattice counts and packet shell statistics.

use num::{BigInt, BigUint, One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::field::{is_prime, prime_factors};
use crate::field::{Fq, FqElem, Poly, RatFunc};
use crate::newton::{newton_polygon, Packet, ValuationProfile};
use crate::places::Place;
use crate::{rat_int, Rational};

/// Exhaustive enumerations are attempted only up to this many cases.
pub const BRUTE_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarResult {
    /// `-1/(q^r - 1)`.
    pub exact: Rational,
    /// Expectation of `max_i log|x_i|` over the `q^(rN)` truncated tuples.
    pub brute: Rational,
    /// `(N + 1) q^(-rN)`.
    pub tail_bound: Rational,
    /// The same expectation by listing every tuple, when there are at most [`BRUTE_LIMIT`].
    pub enumerated: Option<Rational>,
}

fn check_prime_power(q: u64) -> Result<()> {
    let ps = prime_factors(q);
    if q < 2 || ps.len() != 1 || !is_prime(ps[0]) {
        return Err(Error::Precondition(format!("q = {q} is not a prime power")));
    }
    Ok(())
}

fn pow_rat(base: u64, exp: u64) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(exp as u32))
}

/// Mean of `max_i log|x_i|` for `x_i` uniform in the unit ball of `F_q((1/t))`.
///
/// `exact` solves `I = -q^(-r) + I q^(-r)`: with probability `q^(-r)` every coordinate
/// lies in the maximal ideal, and rescaling by `t` shifts the maximum by `-1`.
/// `brute` truncates each coordinate to its first N digits and scores the all-zero
/// tuple as `-N`, which gives `-sum_{m=1}^N q^(-rm)`.
pub fn haar_log_integral(q: u64, r: u32, n: u32) -> Result<HaarResult> {
    check_prime_power(q)?;
    if r < 1 {
        return Err(Error::Precondition("rank r must be at least 1".into()));
    }
    if n < 1 {
        return Err(Error::Precondition("truncation N must be at least 1".into()));
    }
    let qr = pow_rat(q, r as u64);
    let exact = -rat_int(1) / (&qr - rat_int(1));
    // P(min valuation >= m) = q^(-rm) for m <= N, so E[min(val, N)] = sum_{m=1}^N q^(-rm).
    let mut brute = rat_int(0);
    let mut term = rat_int(1);
    for _ in 0..n {
        term /= &qr;
        brute -= &term;
    }
    let tail_bound = rat_int(n as i64 + 1) / pow_rat(q, r as u64 * n as u64);
    let enumerated = haar_enumerate(q, r, n);
    Ok(HaarResult { exact, brute, tail_bound, enumerated })
}

/// Average over all `q^(rN)` tuples of N-digit coordinates, listing each tuple.
pub fn haar_enumerate(q: u64, r: u32, n: u32) -> Option<Rational> {
    let total = q.checked_pow(r.checked_mul(n)?)?;
    if total > BRUTE_LIMIT {
        return None;
    }
    let per_coord = q.pow(n);
    // Score of one coordinate: -(index of first nonzero digit), or -N if all digits vanish.
    let score = |mut x: u64| -> i64 {
        for j in 0..n {
            if x % q != 0 {
                return -(j as i64);
            }
            x /= q;
        }
        -(n as i64)
    };
    let sum: i64 = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rest = idx;
            let mut best = i64::MIN;
            for _ in 0..r {
                best = best.max(score(rest % per_coord));
                rest /= per_coord;
            }
            best
        })
        .sum();
    Some(Rational::new(sum.into(), (total as i64).into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCount {
    /// `q^(sum (deg Q - n_i))`.
    pub formula: BigUint,
    /// Exhaustive count over all `P_i` with `deg P_i < deg Q`.
    pub brute: Option<BigUint>,
    /// Exhaustive count restricted to monic `P_i`.
    pub monic_only: Option<BigUint>,
}

/// First `n` Laurent coefficients `b_1..b_n` of `P/Q = sum_{j>=1} b_j t^(-j)` for `deg P < deg Q`.
pub fn laurent_tail(p: &Poly, q: &Poly, n: usize) -> Result<Vec<FqElem>> {
    let quot = p.shift(n).div_rem(q)?.0;
    Ok((1..=n).map(|j| quot.coeff(n - j)).collect())
}

/// Number of tuples `(P_1..P_r)`, `deg P_i < deg Q`, with `P_i/Q` matching `targets[i]`
/// in its first `depths[i]` Laurent coefficients.
pub fn lattice_count(
    q_poly: &Poly,
    targets: &[Vec<FqElem>],
    depths: &[usize],
    brute: bool,
    monic_only: bool,
) -> Result<LatticeCount> {
    let d = q_poly.degree().ok_or(Error::ZeroInput("lattice_count"))?;
    if targets.len() != depths.len() || depths.is_empty() {
        return Err(Error::Precondition("need one target per depth and r >= 1".into()));
    }
    for (t, &n) in targets.iter().zip(depths) {
        if n > d {
            return Err(Error::Precondition(format!("depth {n} exceeds deg Q = {d}")));
        }
        if t.len() != n {
            return Err(Error::Precondition(format!("target has {} coefficients, depth is {n}", t.len())));
        }
    }
    let field = q_poly.field();
    let q = field.q();
    let free: usize = depths.iter().map(|n| d - n).sum();
    let formula = BigUint::from(q).pow(free as u32);
    let total = q.checked_pow((d * depths.len()) as u32);
    let enumerable = total.is_some_and(|t| t <= BRUTE_LIMIT);
    let count = |monic: bool| -> Result<BigUint> {
        let all = all_polys_below(field, d);
        let mut product = BigUint::one();
        for (t, &n) in targets.iter().zip(depths) {
            let hits = all
                .iter()
                .filter(|p| !monic || p.is_monic())
                .map(|p| Ok(laurent_tail(p, q_poly, n)? == *t))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|&b| b)
                .count();
            product *= BigUint::from(hits);
        }
        Ok(product)
    };
    let brute = if brute && enumerable { Some(count(false)?) } else { None };
    let monic_only = if monic_only && enumerable { Some(count(true)?) } else { None };
    Ok(LatticeCount { formula, brute, monic_only })
}

/// All polynomials of degree `< d` (including 0).
pub fn all_polys_below(field: &Fq, d: usize) -> Vec<Poly> {
    let q = field.q();
    let total = q.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let coeffs = (0..d)
                .map(|_| {
                    let c = field.from_index(idx % q).expect("in range");
                    idx /= q;
                    c
                })
                .collect();
            Poly::from_coeffs(field, coeffs)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellRow {
    pub log_radius: Rational,
    /// Packet points exactly at this log-distance.
    pub count: u64,
    /// Packet points at log-distance `<= log_radius`.
    pub cumulative_count: u64,
    pub packet_fraction: Rational,
    /// `q^(r (log_radius - outer radius))` when the exponent is an integer.
    pub ball_mass: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellReport {
    pub rows: Vec<ShellRow>,
    pub deflated: u64,
    pub packet_size: u64,
    pub profile: ValuationProfile,
}

/// Shells of `{log|β - γ|_inf : γ ∈ Φ[Q]}`. For `β = 0` the point `γ = 0` is dropped.
pub fn packet_ball_report(m: &DrinfeldModule, q: &Poly, beta: &RatFunc) -> Result<ShellReport> {
    let zero = RatFunc::zero(m.field());
    let packet = Packet::new(m, q, &zero)?;
    let (profile, deflated) = if beta.is_zero() {
        let prof = newton_polygon(&packet.phi_q, &Place::Infinite)?.profile();
        let z = prof.zero_roots;
        (prof, z)
    } else {
        (packet.distance_profile(m, beta, &Place::Infinite)?, 0)
    };
    let packet_size = packet.size();
    let remaining = rat_int((packet_size - deflated) as i64);
    let outer = profile.entries.last().map(|(l, _)| l.clone());
    let r = rat_int(m.rank() as i64);
    let mut cumulative = 0u64;
    let rows = profile
        .entries
        .iter()
        .map(|(l, c)| {
            cumulative += c;
            let exponent = (l - outer.as_ref().expect("nonempty")) * &r;
            let ball_mass = exponent
                .is_integer()
                .then(|| (-exponent.to_integer()).to_u64())
                .flatten()
                .map(|k| rat_int(1) / pow_rat(m.q(), k));
            ShellRow {
                log_radius: l.clone(),
                count: *c,
                cumulative_count: cumulative,
                packet_fraction: if remaining.is_zero() { rat_int(0) } else { rat_int(cumulative as i64) / &remaining },
                ball_mass,
            }
        })
        .collect();
    Ok(ShellReport { rows, deflated, packet_size, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_poly;
    use crate::rat;
    use num::Signed;

    #[test]
    fn haar_exact_values() {
        assert_eq!(haar_log_integral(2, 1, 4).unwrap().exact, rat(-1, 1));
        assert_eq!(haar_log_integral(3, 1, 4).unwrap().exact, rat(-1, 2));
        assert_eq!(haar_log_integral(2, 2, 4).unwrap().exact, rat(-1, 3));
        assert!(haar_log_integral(6, 1, 4).is_err());
        assert!(haar_log_integral(2, 0, 4).is_err());
    }

    #[test]
    fn haar_brute_agrees_with_enumeration() {
        for (q, r, n) in [(2, 1, 5), (3, 2, 3), (4, 1, 4), (2, 3, 3)] {
            let h = haar_log_integral(q, r, n).unwrap();
            assert_eq!(h.enumerated.as_ref(), Some(&h.brute));
            let gap = (&h.brute - &h.exact).abs();
            assert!(gap <= h.tail_bound);
        }
    }

    #[test]
    fn lattice_examples() {
        let f2 = Fq::prime(2).unwrap();
        let one = f2.one();
        let q = parse_poly(&f2, "t^2").unwrap();
        let c = lattice_count(&q, &[vec![one]], &[1], true, false).unwrap();
        assert_eq!(c.formula, BigUint::from(2u32));
        assert_eq!(c.brute, Some(BigUint::from(2u32)));
        let q = parse_poly(&f2, "t^2+t+1").unwrap();
        let c = lattice_count(&q, &[vec![f2.zero()]], &[1], true, true).unwrap();
        assert_eq!(c.brute, Some(BigUint::from(2u32)));
        let c = lattice_count(&q, &[vec![]], &[0], true, false).unwrap();
        assert_eq!(c.formula, BigUint::from(4u32));
        assert!(lattice_count(&q, &[vec![one, one, one]], &[3], true, false).is_err());
    }

    #[test]
    fn laurent_tail_of_one_over_t_plus_one() {
        let f2 = Fq::prime(2).unwrap();
        // 1/(t+1) = t^-1 + t^-2 + t^-3 + ..
        let tail = laurent_tail(&Poly::one(&f2), &parse_poly(&f2, "t+1").unwrap(), 3).unwrap();
        assert_eq!(tail, vec![f2.one(); 3]);
    }

    #[test]
    fn shell_report_t_cubed() {
        let f3 = Fq::prime(3).unwrap();
        let m = DrinfeldModule::carlitz(&f3);
        let rep = packet_ball_report(&m, &parse_poly(&f3, "t^3").unwrap(), &RatFunc::zero(&f3)).unwrap();
        let shells: Vec<_> = rep.rows.iter().map(|r| (r.log_radius.clone(), r.count)).collect();
        assert_eq!(shells, vec![(rat(-3, 2), 2), (rat(-1, 2), 6), (rat(1, 2), 18)]);
        assert_eq!(rep.deflated, 1);
        assert_eq!(rep.rows[2].packet_fraction, rat(1, 1));
        assert_eq!(rep.rows[0].ball_mass, Some(rat(1, 9)));
        let rep = packet_ball_report(&m, &parse_poly(&f3, "1").unwrap(), &RatFunc::zero(&f3)).unwrap();
        assert!(rep.rows.is_empty());
    }
}
