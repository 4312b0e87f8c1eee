use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use super::rational::{ParseRationalError, Rational};

/// `value + tilt·ε` for a positive infinitesimal `ε`, kept to first order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EpsRational {
    pub value: Rational,
    pub tilt: Rational,
}

impl EpsRational {
    pub fn new(value: Rational, tilt: Rational) -> Self {
        EpsRational { value, tilt }
    }

    pub fn exact(value: Rational) -> Self {
        EpsRational { value, tilt: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rational::one())
    }

    /// The infinitesimal itself.
    pub fn eps() -> Self {
        EpsRational { value: Rational::zero(), tilt: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.tilt.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one() && self.tilt.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.tilt.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.value.signum() {
            0 => self.tilt.signum(),
            s => s,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn limit(&self) -> &Rational {
        &self.value
    }

    pub fn scale(&self, k: &Rational) -> Self {
        EpsRational { value: &self.value * k, tilt: &self.tilt * k }
    }

    /// First-order quotient. `None` when the divisor is zero, or when its
    /// value is zero and the dividend's value is not.
    pub fn checked_div(&self, rhs: &EpsRational) -> Option<EpsRational> {
        if rhs.value.is_zero() {
            if rhs.tilt.is_zero() || !self.value.is_zero() {
                return None;
            }
            return Some(EpsRational::exact(&self.tilt / &rhs.tilt));
        }
        let value = &self.value / &rhs.value;
        let tilt = (&self.tilt * &rhs.value - &self.value * &rhs.tilt) / (&rhs.value * &rhs.value);
        Some(EpsRational { value, tilt })
    }
}

/// Lexicographic comparison on `(value, tilt)`.
pub fn eps_compare(a: &EpsRational, b: &EpsRational) -> Ordering {
    a.cmp(b)
}

/// The `ε → 0` limit.
pub fn eps_limit(a: &EpsRational) -> Rational {
    a.value.clone()
}

impl Ord for EpsRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then_with(|| self.tilt.cmp(&other.tilt))
    }
}

impl PartialOrd for EpsRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a EpsRational> for &'a EpsRational {
    type Output = EpsRational;
    fn add(self, rhs: &'a EpsRational) -> EpsRational {
        EpsRational { value: &self.value + &rhs.value, tilt: &self.tilt + &rhs.tilt }
    }
}

impl<'a> Sub<&'a EpsRational> for &'a EpsRational {
    type Output = EpsRational;
    fn sub(self, rhs: &'a EpsRational) -> EpsRational {
        EpsRational { value: &self.value - &rhs.value, tilt: &self.tilt - &rhs.tilt }
    }
}

impl<'a> Mul<&'a EpsRational> for &'a EpsRational {
    type Output = EpsRational;
    fn mul(self, rhs: &'a EpsRational) -> EpsRational {
        let value = &self.value * &rhs.value;
        let tilt = if self.tilt.is_zero() && rhs.tilt.is_zero() {
            Rational::zero()
        } else {
            &self.value * &rhs.tilt + &self.tilt * &rhs.value
        };
        EpsRational { value, tilt }
    }
}

impl Add for EpsRational {
    type Output = EpsRational;
    fn add(self, rhs: EpsRational) -> EpsRational {
        &self + &rhs
    }
}

impl Sub for EpsRational {
    type Output = EpsRational;
    fn sub(self, rhs: EpsRational) -> EpsRational {
        &self - &rhs
    }
}

impl Mul for EpsRational {
    type Output = EpsRational;
    fn mul(self, rhs: EpsRational) -> EpsRational {
        &self * &rhs
    }
}

impl Neg for &EpsRational {
    type Output = EpsRational;
    fn neg(self) -> EpsRational {
        EpsRational { value: -&self.value, tilt: -&self.tilt }
    }
}

impl AddAssign<&EpsRational> for EpsRational {
    fn add_assign(&mut self, rhs: &EpsRational) {
        self.value += &rhs.value;
        if !rhs.tilt.is_zero() {
            self.tilt += &rhs.tilt;
        }
    }
}

impl Sum for EpsRational {
    fn sum<I: Iterator<Item = EpsRational>>(iter: I) -> Self {
        iter.fold(EpsRational::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a EpsRational> for EpsRational {
    fn sum<I: Iterator<Item = &'a EpsRational>>(iter: I) -> Self {
        iter.fold(EpsRational::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl From<Rational> for EpsRational {
    fn from(value: Rational) -> Self {
        EpsRational::exact(value)
    }
}

impl fmt::Display for EpsRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tilt.is_zero() {
            return write!(f, "{}", self.value);
        }
        let sign = if self.tilt.is_negative() { '-' } else { '+' };
        let t = self.tilt.abs();
        if t.is_one() {
            write!(f, "{} {} e", self.value, sign)
        } else {
            write!(f, "{} {} {}e", self.value, sign, t)
        }
    }
}

impl fmt::Debug for EpsRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts a plain rational, or `v + e`, `v - e`, `v - 3e`, `v + 1/2e`, `v - 2*e`.
impl FromStr for EpsRational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let Some(body) = t.strip_suffix('e') else {
            return Ok(EpsRational::exact(t.parse()?));
        };
        // find the sign separating value and tilt
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[..i].iter().any(|b| !b.is_ascii_whitespace()) {
                split = Some(i);
                break;
            }
        }
        let (value, sign, coeff) = match split {
            Some(i) => (body[..i].trim(), bytes[i], body[i + 1..].trim()),
            None => {
                let b = body.trim();
                match b.as_bytes().first() {
                    Some(b'-') => ("0", b'-', b[1..].trim()),
                    Some(b'+') => ("0", b'+', b[1..].trim()),
                    _ => ("0", b'+', b),
                }
            }
        };
        let coeff = coeff.trim_end_matches('*').trim();
        let mut tilt = if coeff.is_empty() { Rational::one() } else { coeff.parse().map_err(|_| err())? };
        if sign == b'-' {
            tilt = -tilt;
        }
        let value: Rational = value.parse().map_err(|_| err())?;
        Ok(EpsRational { value, tilt })
    }
}

impl serde::Serialize for EpsRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for EpsRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = EpsRational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string, optionally with an infinitesimal term such as \"3/4 - e\"")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<EpsRational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<EpsRational, E> {
                Ok(EpsRational::exact(Rational::from_integer(v)))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<EpsRational, E> {
                i64::try_from(v)
                    .map(|v| EpsRational::exact(Rational::from_integer(v)))
                    .map_err(|_| E::custom("integer out of range"))
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> EpsRational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(e("3/4 - e"), EpsRational::new(Rational::new(3, 4), Rational::from_integer(-1)));
        assert_eq!(e("1/2+e").to_string(), "1/2 + e");
        assert_eq!(e("0.4 - 2e").to_string(), "2/5 - 2e");
        assert_eq!(e("1 + 1/2e").tilt, Rational::new(1, 2));
        assert_eq!(e("1 - 3*e").tilt, Rational::from_integer(-3));
        assert_eq!(e("-e"), -&EpsRational::eps());
        assert_eq!(e("e"), EpsRational::eps());
        assert_eq!(e("-1/2 - e").value, Rational::new(-1, 2));
        assert_eq!(e("7/10"), EpsRational::exact(Rational::new(7, 10)));
        for s in ["1/2 - e", "3/4 - 5/3e", "0", "-1/2 + e"] {
            assert_eq!(e(s).to_string().parse::<EpsRational>().unwrap(), e(s));
        }
        assert!("1/2 - xe".parse::<EpsRational>().is_err());
    }

    #[test]
    fn compare_examples() {
        use Ordering::*;
        assert_eq!(eps_compare(&e("1/2"), &e("1/2 - e")), Greater);
        assert_eq!(eps_compare(&e("1/4 + e"), &e("1/4")), Greater);
        assert_eq!(eps_compare(&e("3/4 - e"), &e("3/4 - e")), Equal);
    }

    #[test]
    fn limits() {
        assert_eq!(eps_limit(&e("3/4 - e")), Rational::new(3, 4));
        assert_eq!(eps_limit(&e("0 + 5e")), Rational::zero());
        assert_eq!(eps_limit(&e("7/10")), Rational::new(7, 10));
    }

    #[test]
    fn first_order_product() {
        let p = &e("1/2 + e") * &e("1/3 - 2e");
        assert_eq!(p, e("1/6 - 2/3e"));
    }

    #[test]
    fn division() {
        let a = e("1/6 - 2/3e");
        let b = e("1/2 + e");
        assert_eq!(a.checked_div(&b).unwrap(), e("1/3 - 2e"));
        assert_eq!(e("3e").checked_div(&e("6e")).unwrap(), e("1/2"));
        assert!(e("1").checked_div(&e("e")).is_none());
        assert!(e("1").checked_div(&e("0")).is_none());
    }
}
