//! Independent reference computations for integration tests.
//!
//! Nothing here calls into the library's arithmetic: polynomials over F_p are plain
//! `Vec<u64>` (lowest degree first) with schoolbook operations.

#![allow(dead_code)]

use num::{BigInt, BigRational};

pub type Q = BigRational;

pub fn rq(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl OPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> OPoly {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        OPoly { p, c }
    }

    pub fn zero(p: u64) -> OPoly {
        OPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> OPoly {
        OPoly::new(p, vec![1])
    }

    pub fn t(p: u64) -> OPoly {
        OPoly::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn add(&self, o: &OPoly) -> OPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)).collect();
        OPoly::new(self.p, c)
    }

    pub fn neg(&self) -> OPoly {
        OPoly::new(self.p, self.c.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, o: &OPoly) -> OPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &OPoly) -> OPoly {
        if self.is_zero() || o.is_zero() {
            return OPoly::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % self.p;
            }
        }
        OPoly::new(self.p, c)
    }

    pub fn pow(&self, k: u64) -> OPoly {
        let mut acc = OPoly::one(self.p);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn inv_mod_p(&self, a: u64) -> u64 {
        (1..self.p).find(|x| x * a % self.p == 1).expect("invertible")
    }

    pub fn divrem(&self, d: &OPoly) -> (OPoly, OPoly) {
        let p = self.p;
        let mut r = self.c.clone();
        let dl = d.c.len();
        if r.len() < dl {
            return (OPoly::zero(p), self.clone());
        }
        let inv = self.inv_mod_p(*d.c.last().unwrap());
        let mut qc = vec![0u64; r.len() - dl + 1];
        for k in (0..qc.len()).rev() {
            let coef = r[k + dl - 1] * inv % p;
            qc[k] = coef;
            for (j, dj) in d.c.iter().enumerate() {
                r[k + j] = (r[k + j] + p * p - coef * dj % p) % p;
            }
        }
        (OPoly::new(p, qc), OPoly::new(p, r))
    }

    pub fn monic(&self) -> OPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.inv_mod_p(*self.c.last().unwrap());
        OPoly::new(self.p, self.c.iter().map(|x| x * inv).collect())
    }

    pub fn gcd(&self, o: &OPoly) -> OPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `pi` in a nonzero polynomial.
    pub fn mult(&self, pi: &OPoly) -> u64 {
        let mut k = 0;
        let mut x = self.clone();
        loop {
            let (qq, r) = x.divrem(pi);
            if !r.is_zero() {
                return k;
            }
            x = qq;
            k += 1;
        }
    }
}

/// One Carlitz step over F_p on `N/D`: `t x + x^p`, reduced.
pub fn carlitz_step(n: &OPoly, d: &OPoly) -> (OPoly, OPoly) {
    let p = n.p;
    let num = OPoly::t(p).mul(n).mul(&d.pow(p - 1)).add(&n.pow(p));
    let den = d.pow(p);
    if num.is_zero() {
        return (num, OPoly::one(p));
    }
    let g = num.gcd(&den);
    let (num, den) = (num.divrem(&g).0, den.divrem(&g).0);
    let lead = *den.c.last().unwrap();
    let inv = (1..p).find(|x| x * lead % p == 1).unwrap();
    (OPoly::new(p, num.c.iter().map(|x| x * inv).collect()), den.monic())
}

pub fn carlitz_orbit(n: OPoly, d: OPoly, steps: usize) -> Vec<(OPoly, OPoly)> {
    let mut out = vec![(n, d)];
    for _ in 0..steps {
        let (a, b) = out.last().unwrap();
        out.push(carlitz_step(a, b));
    }
    out
}

/// `b_1..b_n` with `P/Q = sum_j b_j t^(-j)`, from `P = Q * sum_j b_j t^(-j)` compared
/// coefficient by coefficient from the top.
pub fn laurent_digits(pc: &[u64], qc: &[u64], p: u64, n: usize) -> Vec<u64> {
    let d = qc.len() - 1;
    let inv = (1..p).find(|x| x * qc[d] % p == 1).unwrap();
    let mut b = vec![0u64; n + 1];
    for j in 1..=n {
        // Coefficient of t^(d-j) in Q * sum b_i t^(-i): sum_{i=1}^{j} qc[d-j+i] b_i.
        let mut acc = if d >= j { pc.get(d - j).copied().unwrap_or(0) } else { 0 };
        for i in 1..j {
            if d + i >= j {
                let qi = qc[d + i - j];
                acc = (acc + p * p - qi * b[i] % p) % p;
            }
        }
        b[j] = acc * inv % p;
    }
    b[1..].to_vec()
}

/// Expected `max` over r coordinates of per-coordinate scores, where an N-digit coordinate
/// scores `-(index of first nonzero digit)` and `-N` when all digits vanish.
pub fn haar_truncated_mean(q: u64, r: u32, n: u32) -> Q {
    // counts[j] = coordinates with score -j.
    let mut counts: Vec<BigInt> = (0..n).map(|j| BigInt::from(q - 1) * BigInt::from(q).pow(n - 1 - j)).collect();
    counts.push(BigInt::from(1));
    let total = BigInt::from(q).pow(n);
    // cdf_le[s] = P(score >= -s) is the mass of scores -0..-s.
    let mut mean = rq(0, 1);
    let mut prev = rq(0, 1);
    let mut acc = BigInt::from(0);
    // Iterate scores from most negative upwards: P(max <= -j) = P(score <= -j)^r.
    let mut below: Vec<Q> = Vec::new();
    for j in (0..=n as usize).rev() {
        acc += &counts[j];
        let f = BigRational::new(acc.clone(), total.clone());
        below.push(f);
    }
    // below[k] = P(score <= -(n - k)), k = 0..=n.
    for (k, f) in below.iter().enumerate() {
        let s = -(n as i64 - k as i64);
        let fr = num::pow::pow(f.clone(), r as usize);
        mean += rq(s, 1) * (&fr - &prev);
        prev = fr;
    }
    mean
}
