//! Exact engine for super Weil-Petersson volumes, Mirzakhani volumes,
//! Theta/psi intersection numbers, KdV tau functions and topological
//! recursion, all over the ring Q[pi^2].

pub mod algebra;
pub mod kdv;
pub mod kernels;
pub mod specrec;
pub mod verify;
pub mod virasoro;
pub mod volumes;

pub use algebra::{
    Bounds, Coeff, EvenPoly, LaurentSeries, Mono, OddPoly, PiScalar, Poly, Rat, TruncSeries,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unstable key (g={g}, n={n}): need 2g-2+n > 0")]
    Unstable { g: u32, n: u32 },
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("expected odd exponents: {0}")]
    NonOddExponent(String),
    #[error("degenerate spectral curve: {0}")]
    DegenerateCurve(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects `(g, n)` with `2g - 2 + n <= 0`.
pub fn check_stable(g: u32, n: u32) -> Result<()> {
    if 2 * g + n > 2 {
        Ok(())
    } else {
        Err(Error::Unstable { g, n })
    }
}
