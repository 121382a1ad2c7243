//! Dual-mode scalar arithmetic: exact rationals or IEEE doubles.
//!
//! Every quantity in this crate is a [`Scalar`]. A computation runs either
//! entirely in exact mode (arbitrary-precision rationals, no rounding) or
//! entirely in float mode; mixing the two in one arithmetic expression is a
//! contract violation and panics rather than coercing silently.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Which arithmetic a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    /// Arbitrary-precision rational arithmetic. No rounding anywhere.
    Exact,
    /// IEEE 754 double precision.
    Float,
}

impl ScalarMode {
    pub fn zero(self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(self, n: i64) -> Scalar {
        match self {
            ScalarMode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(n))),
            ScalarMode::Float => Scalar::Float(n as f64),
        }
    }

    /// The rational p/q in this mode (rounded once, to the nearest double,
    /// in float mode).
    pub fn ratio(self, p: i64, q: i64) -> Scalar {
        assert!(q != 0, "zero denominator");
        match self {
            ScalarMode::Exact => {
                Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
            }
            ScalarMode::Float => Scalar::Float(p as f64 / q as f64),
        }
    }
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Exact => write!(f, "exact"),
            ScalarMode::Float => write!(f, "float"),
        }
    }
}

/// A number carried uniformly through all computations, in one of two modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact(_) => ScalarMode::Exact,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    pub fn from_f64(x: f64) -> Scalar {
        assert!(x.is_finite(), "non-finite float scalar");
        // normalize -0.0 so equality and display behave
        Scalar::Float(if x == 0.0 { 0.0 } else { x })
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::Exact(r)
    }

    /// Lossy view, for display and for float-mode tolerances.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Float(x) => Scalar::Float(1.0 / x),
        }
    }

    fn pair<'a>(&'a self, other: &'a Scalar, op: &str) -> (&'a Scalar, &'a Scalar) {
        assert!(
            self.mode() == other.mode(),
            "mixed scalar modes in {op}: {self} vs {other}"
        );
        (self, other)
    }

    /// Total order within a mode. Panics on mixed modes.
    pub fn cmp_strict(&self, other: &Scalar) -> Ordering {
        match self.pair(other, "comparison") {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.partial_cmp(b).expect("NaN scalar in comparison")
            }
            _ => unreachable!(),
        }
    }

    pub fn max_of(self, other: Scalar) -> Scalar {
        if self.cmp_strict(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min_of(self, other: Scalar) -> Scalar {
        if self.cmp_strict(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// `self <= other + tol` where `tol` is interpreted in float mode only;
    /// exact mode compares exactly.
    pub fn le_within(&self, other: &Scalar, tol: f64) -> bool {
        match self.pair(other, "comparison") {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            (Scalar::Float(a), Scalar::Float(b)) => *a <= *b + tol,
            _ => unreachable!(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    /// Nonnegative up to the mode's feasibility epsilon.
    pub fn is_nonneg_eps(&self, eps: f64) -> bool {
        match self {
            Scalar::Exact(r) => !r.is_negative(),
            Scalar::Float(x) => *x >= -eps,
        }
    }

    /// Zero up to the mode's feasibility epsilon.
    pub fn is_zero_eps(&self, eps: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x.abs() <= eps,
        }
    }

    /// Nearest dyadic rational with denominator `2^bits` (identity in float
    /// mode). Iterated solves quantize their iterates with this so that
    /// exact-mode coefficient growth stays bounded; certificates evaluate
    /// the quantized data exactly.
    pub fn quantize_dyadic(&self, bits: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let scale = BigRational::from_integer(BigInt::from(1) << bits);
                Scalar::Exact((r * &scale).round() / scale)
            }
            Scalar::Float(x) => Scalar::Float(*x),
        }
    }

    /// Total bit size of the reduced fraction (0 in float mode).
    pub fn bit_size(&self) -> u64 {
        match self {
            Scalar::Exact(r) => r.numer().bits() + r.denom().bits(),
            Scalar::Float(_) => 0,
        }
    }

    /// Parse a matrix-file token: `p/q` is exact, a decimal or exponent
    /// literal is float, a bare integer fits either mode.
    pub fn parse_token(tok: &str, mode: ScalarMode) -> Result<Scalar, Error> {
        let bad = || Error::Parse(format!("bad scalar literal `{tok}`"));
        if let Some((p, q)) = tok.split_once('/') {
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            let r = BigRational::new(p, q);
            return Ok(match mode {
                ScalarMode::Exact => Scalar::Exact(r),
                ScalarMode::Float => Scalar::from_f64(r.to_f64().ok_or_else(bad)?),
            });
        }
        if tok.contains('.') || tok.contains('e') || tok.contains('E') {
            let x: f64 = tok.parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
            return Ok(match mode {
                ScalarMode::Exact => {
                    return Err(Error::Parse(format!(
                        "float literal `{tok}` in exact-mode input"
                    )))
                }
                ScalarMode::Float => Scalar::from_f64(x),
            });
        }
        let p: BigInt = tok.parse().map_err(|_| bad())?;
        Ok(match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::from_integer(p)),
            ScalarMode::Float => Scalar::from_f64(p.to_f64().ok_or_else(bad)?),
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom() == &BigInt::from(1) {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt, $name:expr) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match self.pair(&rhs, $name) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => unreachable!(),
                }
            }
        }
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match self.pair(rhs, $name) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => unreachable!(),
                }
            }
        }
    };
}

scalar_binop!(Add, add, +, "addition");
scalar_binop!(Sub, sub, -, "subtraction");
scalar_binop!(Mul, mul, *, "multiplication");

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "scalar division by zero");
        match self.pair(&rhs, "division") {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            _ => unreachable!(),
        }
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.clone() / rhs.clone()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(if x == 0.0 { 0.0 } else { -x }),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = self.clone() + rhs;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = self.clone() - rhs;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = self.clone() * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_is_closed() {
        let m = ScalarMode::Exact;
        let x = m.ratio(1, 3) + m.ratio(1, 6);
        assert_eq!(x, m.ratio(1, 2));
        assert_eq!((m.ratio(1, 2) * m.from_int(4)).to_string(), "2");
    }

    #[test]
    #[should_panic(expected = "mixed scalar modes")]
    fn mixed_modes_panic() {
        let _ = ScalarMode::Exact.one() + ScalarMode::Float.one();
    }

    #[test]
    fn token_parsing() {
        let exact = Scalar::parse_token("3/4", ScalarMode::Exact).unwrap();
        assert_eq!(exact, ScalarMode::Exact.ratio(3, 4));
        assert!(Scalar::parse_token("0.5", ScalarMode::Exact).is_err());
        let f = Scalar::parse_token("0.5", ScalarMode::Float).unwrap();
        assert_eq!(f.to_f64(), 0.5);
        assert!(Scalar::parse_token("1/0", ScalarMode::Exact).is_err());
    }

    #[test]
    fn display_round_trips() {
        assert_eq!(ScalarMode::Exact.ratio(-7, 2).to_string(), "-7/2");
        assert_eq!(ScalarMode::Exact.from_int(5).to_string(), "5");
        assert_eq!(Scalar::from_f64(0.1).to_string(), "0.1");
    }
}
