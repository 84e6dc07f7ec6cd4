//! Scalar abstraction and compensated arithmetic.
//!
//! The geometry and state layers are generic over [`Scalar`] so they run in
//! f32 as well as f64. The helpers below exist because several quantities in
//! this crate live 13 to 14 orders of magnitude below the coordinates they
//! are derived from, which is exactly where plain f64 subtraction dies.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the generic layers.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy view for error reporting and diagnostics.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Converts an f64 constant into the working scalar type.
///
/// Panics only if the target type cannot represent any f64 at all, which no
/// `Scalar` implementor does; f32 rounds as usual.
pub fn from_f64<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("scalar type must convert from f64")
}

/// Neumaier-compensated running sum.
///
/// Keeps the error of each addition in a separate compensation term, so a
/// million-term accumulation stays accurate to a few ulps of the true sum
/// even when individual terms cancel.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.compensation += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    /// Folds another compensated sum into this one without losing either
    /// compensation term. Merge order must be fixed for reproducibility.
    pub fn merge(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Double-double value: the unevaluated sum `hi + lo` with `|lo|` at most
/// half an ulp of `hi`, giving roughly 32 significant digits.
///
/// Used to evaluate algebraic identities whose direct f64 form cancels
/// catastrophically, such as the planner's window identity at beta ~ 3e-7
/// where `T1 - T_A` wipes out all but the last few bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Error-free sum: s + e == a + b exactly.
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    /// Error-free sum assuming |a| >= |b|.
    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    /// Error-free product via fused multiply-add.
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (hi, lo) = Self::quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd {
            hi: -o.hi,
            lo: -o.lo,
        })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = Self::two_prod(self.hi, o.hi);
        let (hi, lo) = Self::quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    /// Long division with three quotient terms, accurate to ~1 ulp of lo.
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.hi / o.hi;
        Dd::new(q1).add(Dd::new(q2)).add(Dd::new(q3))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // One Newton step on a correctly rounded f64 seed doubles precision.
        let y = Dd::new(self.hi.sqrt());
        let r = self.sub(y.mul(y));
        y.add(Dd::new(r.hi / (2.0 * y.hi)))
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            Dd {
                hi: -self.hi,
                lo: -self.lo,
            }
        } else {
            self
        }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        Dd::add(self, o)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        Dd::sub(self, o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        Dd::mul(self, o)
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        Dd::div(self, o)
    }
}
