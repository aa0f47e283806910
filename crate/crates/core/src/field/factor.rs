//! Irreducibility testing and Cantor–Zassenhaus factorization over F_q.

use std::sync::atomic::{AtomicU64, Ordering};

use num::{BigUint, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fq::FqElem;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Default seed of the equal-degree splitting stream.
pub const DEFAULT_SPLIT_SEED: u64 = 0x5eed_d41f_e1d0;

static SPLIT_SEED: AtomicU64 = AtomicU64::new(DEFAULT_SPLIT_SEED);

/// Override the seed used by equal-degree splitting. Factorizations are canonical
/// (sorted, monic), so the seed only changes the search path, never the result.
pub fn set_split_seed(seed: u64) {
    SPLIT_SEED.store(seed, Ordering::Relaxed);
}

pub fn split_seed() -> u64 {
    SPLIT_SEED.load(Ordering::Relaxed)
}

/// `unit * prod(factor^exponent)`, factors monic irreducible and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FqElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, like: &Poly) -> Poly {
        let f = like.field();
        self.factors.iter().fold(Poly::constant(f, self.unit), |acc, (g, e)| acc * g.pow(*e as u64))
    }
}

fn q_big(f: &Poly) -> BigUint {
    BigUint::from(f.field().q())
}

/// True iff `f` is irreducible over F_q: `gcd(t^(q^k) - t, f) = 1` for every
/// `k <= deg f / 2`.
pub fn poly_irreducible(f: &Poly) -> Result<bool> {
    let n = match f.degree() {
        None | Some(0) => return Err(Error::ConstantInput("poly_irreducible")),
        Some(n) => n,
    };
    if n == 1 {
        return Ok(true);
    }
    let f = f.monic();
    let t = Poly::t(f.field());
    let q = q_big(&f);
    let mut h = t.rem(&f)?;
    for _ in 0..n / 2 {
        h = h.pow_mod(&q, &f)?;
        let g = h.try_sub(&t)?.gcd(&f)?;
        if !g.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Squarefree decomposition of a monic polynomial: pairs `(g_i, i)` with
/// `f = prod g_i^i`, each `g_i` squarefree, pairwise coprime.
pub fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    let mut out = Vec::new();
    sqf_into(&f.monic(), 1, &mut out)?;
    Ok(out)
}

fn sqf_into(f: &Poly, mult: u32, out: &mut Vec<(Poly, u32)>) -> Result<()> {
    if f.is_constant() {
        return Ok(());
    }
    let p = f.field().p();
    let d = f.derivative();
    if d.is_zero() {
        let root = f.pth_root().expect("zero derivative means f is a p-th power");
        return sqf_into(&root, mult * p, out);
    }
    let mut c = f.gcd(&d)?;
    let mut w = f.div_exact(&c)?;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c)?;
        let z = w.div_exact(&y)?;
        if !z.is_one() {
            out.push((z, i * mult));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w)?;
    }
    if !c.is_one() {
        let root = c.pth_root().expect("remaining cofactor is a p-th power");
        sqf_into(&root, mult * p, out)?;
    }
    Ok(())
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let mut out = Vec::new();
    let t = Poly::t(f.field());
    let q = q_big(f);
    let mut rest = f.clone();
    let mut h = t.rem(&rest)?;
    let mut d = 0usize;
    while let Some(n) = rest.degree() {
        if n < 2 * (d + 1) {
            if n > 0 {
                out.push((rest.clone(), n));
            }
            break;
        }
        d += 1;
        h = h.pow_mod(&q, &rest)?;
        let g = h.try_sub(&t)?.gcd(&rest)?;
        if !g.is_one() {
            rest = rest.div_exact(&g)?;
            h = h.rem(&rest)?;
            out.push((g, d));
        }
    }
    Ok(out)
}

fn random_poly(f: &Poly, deg_bound: usize, rng: &mut ChaCha8Rng) -> Poly {
    let field = f.field();
    let q = field.q();
    let coeffs = (0..deg_bound).map(|_| field.from_index(rng.gen_range(0..q)).expect("in range")).collect();
    Poly::from_coeffs(field, coeffs)
}

/// Equal-degree splitting of a monic squarefree `f` whose irreducible factors all
/// have degree `d`.
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) -> Result<()> {
    let n = f.degree().expect("nonzero");
    if n == d {
        out.push(f.clone());
        return Ok(());
    }
    let field = f.field();
    let q = field.q();
    loop {
        let a = random_poly(f, n, rng);
        if a.is_constant() {
            continue;
        }
        let b = if q % 2 == 1 {
            let exp = (BigUint::from(q).pow(d as u32) - BigUint::one()) >> 1u32;
            a.pow_mod(&exp, f)?.try_sub(&Poly::one(field))?
        } else {
            // Trace map to F_2: sum of a^(2^i) for i < d * log2(q).
            let k = d * q.trailing_zeros() as usize;
            let mut acc = a.rem(f)?;
            let mut cur = acc.clone();
            for _ in 1..k {
                cur = cur.mul_mod(&cur, f)?;
                acc = acc.try_add(&cur)?;
            }
            acc
        };
        let g = b.gcd(f)?;
        if let Some(gd) = g.degree() {
            if gd > 0 && gd < n {
                let h = f.div_exact(&g)?;
                equal_degree(&g, d, rng, out)?;
                equal_degree(&h, d, rng, out)?;
                return Ok(());
            }
        }
    }
}

/// Full factorization into monic irreducibles with multiplicities.
pub fn poly_factor(f: &Poly) -> Result<Factorization> {
    poly_factor_seeded(f, split_seed())
}

pub fn poly_factor_seeded(f: &Poly, seed: u64) -> Result<Factorization> {
    let unit = f.leading().ok_or(Error::ZeroInput("poly_factor"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (g, mult) in squarefree_decomposition(f)? {
        for (h, d) in distinct_degree(&g)? {
            let mut pieces = Vec::new();
            equal_degree(&h, d, &mut rng, &mut pieces)?;
            factors.extend(pieces.into_iter().map(|p| (p, mult)));
        }
    }
    factors.sort();
    // Squarefree parts are pairwise coprime, so irreducibles never repeat; merge anyway.
    let mut merged: Vec<(Poly, u32)> = Vec::with_capacity(factors.len());
    for (p, e) in factors {
        match merged.last_mut() {
            Some((last, le)) if *last == p => *le += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(Factorization { unit, factors: merged })
}
