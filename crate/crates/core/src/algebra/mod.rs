//! Exact arithmetic: rationals, Q[pi^2], polynomials, Laurent series and
//! truncated formal series.

pub mod laurent;
pub mod pi;
pub mod poly;
pub mod rat;
pub mod series;

use std::fmt::Debug;

pub use laurent::LaurentSeries;
pub use pi::PiScalar;
pub use poly::{EvenPoly, OddPoly, Poly};
pub use rat::Rat;
pub use series::{Bounds, Mono, TruncSeries};

use num_traits::{One, Zero};

/// Coefficient ring of a [`TruncSeries`]: either Q or Q[pi^2].
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn is_nil(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, r: &Rat) -> Self;
    fn from_rat(r: Rat) -> Self;
    fn to_pi(&self) -> PiScalar;
    /// Human form as a leading factor; `None` for zero, empty body for a unit.
    fn human_factor(&self) -> Option<(bool, String)>;
}

impl Coeff for Rat {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rat) -> Self {
        self * r
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn to_pi(&self) -> PiScalar {
        PiScalar::from_rat(self.clone())
    }
    fn human_factor(&self) -> Option<(bool, String)> {
        PiScalar::from_rat(self.clone()).to_human_factor()
    }
}

impl Coeff for PiScalar {
    fn zero_elem() -> Self {
        PiScalar::zero()
    }
    fn one_elem() -> Self {
        PiScalar::one()
    }
    fn is_nil(&self) -> bool {
        PiScalar::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rat) -> Self {
        self.scale(r)
    }
    fn from_rat(r: Rat) -> Self {
        PiScalar::from_rat(r)
    }
    fn to_pi(&self) -> PiScalar {
        self.clone()
    }
    fn human_factor(&self) -> Option<(bool, String)> {
        self.to_human_factor()
    }
}
