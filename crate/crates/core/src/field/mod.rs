//! Exact arithmetic in F_q, F_q[t] and F_q(t).

mod factor;
mod fq;
mod poly;
mod ratfunc;
pub mod text;

pub use factor::{
    poly_factor, poly_factor_seeded, poly_irreducible, set_split_seed, split_seed, squarefree_decomposition,
    Factorization, DEFAULT_SPLIT_SEED,
};
pub(crate) use fq::{is_prime, prime_factors};
pub use fq::{Fq, FqConfig, FqElem, MAX_EXTENSION_ORDER};
pub use poly::{poly_xgcd, Poly};
pub use ratfunc::RatFunc;
pub use text::{parse_elem, parse_poly, parse_ratfunc};
