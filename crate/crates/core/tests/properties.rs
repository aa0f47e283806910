mod common;

use common::{carlitz_orbit, rq, OPoly};
use drinfeld::field::{parse_ratfunc, poly_factor, poly_xgcd, Fq, Poly, RatFunc};
use drinfeld::heights::{global_canonical_height, naive_height, naive_height_limit_table, HeightTotal};
use drinfeld::newton::{newton_polygon, packet_distance_profile};
use drinfeld::places::{log_abs, support, valuation, Place};
use drinfeld::DrinfeldModule;
use proptest::prelude::*;

fn field(p: u32) -> Fq {
    Fq::prime(p).unwrap()
}

fn poly_strategy(p: u32, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..p as i64, 0..=max_deg + 1).prop_map(move |c| Poly::from_ints(&field(p), &c))
}

fn nonzero_poly(p: u32, max_deg: usize) -> impl Strategy<Value = Poly> {
    poly_strategy(p, max_deg).prop_filter("nonzero", |f| !f.is_zero())
}

fn ratfunc(p: u32, max_deg: usize) -> impl Strategy<Value = RatFunc> {
    (nonzero_poly(p, max_deg), nonzero_poly(p, max_deg)).prop_map(|(a, b)| RatFunc::new(a, b).unwrap())
}

fn to_opoly(f: &Poly) -> OPoly {
    OPoly::new(f.field().p() as u64, f.coeffs().iter().map(|c| c.index() as u64).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_formula(x in ratfunc(3, 6)) {
        let sum = support(&x).unwrap().iter().fold(rq(0, 1), |acc, v| acc + log_abs(&x, v).unwrap());
        prop_assert_eq!(sum, rq(0, 1));
    }

    #[test]
    fn valuation_is_additive(x in ratfunc(2, 5), y in ratfunc(2, 5)) {
        let xy = x.try_mul(&y).unwrap();
        let mut places = support(&x).unwrap();
        places.extend(&support(&y).unwrap());
        for v in places.iter() {
            prop_assert_eq!(valuation(&xy, v).unwrap(), valuation(&x, v).unwrap() + valuation(&y, v).unwrap());
        }
    }

    #[test]
    fn factorization_multiplies_back(f in nonzero_poly(5, 10)) {
        let fac = poly_factor(&f).unwrap();
        prop_assert_eq!(fac.expand(&f), f);
    }

    #[test]
    fn xgcd_matches_oracle_gcd(a in nonzero_poly(3, 6), b in nonzero_poly(3, 6)) {
        let (g, u, v) = poly_xgcd(&a, &b).unwrap();
        prop_assert_eq!(&(&u * &a) + &(&v * &b), g.clone());
        prop_assert_eq!(to_opoly(&g).c, to_opoly(&a).gcd(&to_opoly(&b)).c);
    }

    #[test]
    fn phi_is_a_ring_homomorphism(a in poly_strategy(3, 3), b in poly_strategy(3, 3)) {
        let m = DrinfeldModule::carlitz(&field(3));
        let pa = m.phi_of(&a).unwrap();
        let pb = m.phi_of(&b).unwrap();
        prop_assert_eq!(m.phi_of(&(&a * &b)).unwrap(), pa.compose(&pb).unwrap());
        prop_assert_eq!(m.phi_of(&(&a + &b)).unwrap(), pa.add(&pb).unwrap());
    }

    #[test]
    fn carlitz_orbit_matches_oracle(num in nonzero_poly(3, 2), den in nonzero_poly(3, 2)) {
        let x = RatFunc::new(num.clone(), den.clone()).unwrap();
        let m = DrinfeldModule::carlitz(&field(3));
        let orbit = m.orbit(&x, 3).unwrap();
        let n0 = to_opoly(x.num());
        let d0 = to_opoly(x.den());
        let oracle = carlitz_orbit(n0, d0, 3);
        for (y, (on, od)) in orbit.iter().zip(&oracle) {
            // The oracle keeps unreduced fractions; compare by cross-multiplication.
            prop_assert_eq!(to_opoly(y.num()).mul(od).c, on.mul(&to_opoly(y.den())).c);
        }
    }

    #[test]
    fn newton_profile_counts_all_roots(q in nonzero_poly(2, 3), beta in ratfunc(2, 2)) {
        let m = DrinfeldModule::carlitz(&field(2));
        prop_assume!(!m.phi_eval(&q, &beta).unwrap().is_zero());
        let zero = RatFunc::zero(&field(2));
        let prof = packet_distance_profile(&m, &q, &beta, &zero, &Place::Infinite).unwrap();
        prop_assert_eq!(prof.total_count(), 2u64.pow(q.degree().unwrap() as u32));
    }

    #[test]
    fn newton_slopes_increase(q in nonzero_poly(3, 3)) {
        prop_assume!(!q.is_constant());
        let m = DrinfeldModule::carlitz(&field(3));
        let xform = m.phi_of(&q).unwrap().x_polynomial().unwrap();
        let poly = newton_polygon(&xform, &Place::Infinite).unwrap();
        for w in poly.segments.windows(2) {
            prop_assert!(w[0].slope < w[1].slope);
        }
    }

    #[test]
    fn canonical_height_is_functorial(x in ratfunc(3, 2)) {
        // h(Φ_t x) = q · h(x) whenever both totals are exact.
        let m = DrinfeldModule::carlitz(&field(3));
        let y = m.phi_t_eval(&x).unwrap();
        let hx = global_canonical_height(&m, &x, 32).unwrap().total;
        let hy = global_canonical_height(&m, &y, 32).unwrap().total;
        if let (HeightTotal::Exact(a), HeightTotal::Exact(b)) = (hx, hy) {
            prop_assert_eq!(b, a * rq(3, 1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn naive_and_canonical_heights_stay_close(x in ratfunc(3, 3)) {
        let m = DrinfeldModule::carlitz(&field(3));
        let h = naive_height(&x);
        let (lo, hi) = match global_canonical_height(&m, &x, 32).unwrap().total {
            HeightTotal::Exact(v) => (v.clone(), v),
            HeightTotal::Interval(lo, hi) => (lo, hi),
        };
        prop_assert!(&h - &hi <= rq(2, 1) && &lo - &h <= rq(2, 1), "h = {}, canonical in [{}, {}]", h, lo, hi);
    }

    #[test]
    fn limit_table_reaches_canonical_height(x in ratfunc(3, 2)) {
        let m = DrinfeldModule::carlitz(&field(3));
        if let HeightTotal::Exact(total) = global_canonical_height(&m, &x, 32).unwrap().total {
            let rows = naive_height_limit_table(&m, &x, &[8, 9]).unwrap();
            prop_assert_eq!(&rows[0].1, &total);
            prop_assert_eq!(&rows[1].1, &total);
        }
    }
}

#[test]
fn canonical_height_of_one_over_t() {
    let m = DrinfeldModule::carlitz(&field(3));
    let x = parse_ratfunc(m.field(), "1/t").unwrap();
    let h = global_canonical_height(&m, &x, 32).unwrap();
    assert_eq!(h.total, HeightTotal::Exact(rq(10, 9)));
}
