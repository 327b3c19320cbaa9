//! Exact rationals and their decimal renderings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Decimal rendering precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Significant digits, trailing zeros trimmed (like `%g`).
    Significant(u32),
    /// Fixed places after the decimal point, trailing zeros trimmed.
    Places(u32),
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Significant(6)
    }
}

pub fn big(r: Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn big128(r: Ratio<i128>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `"num/den"`, or just `"num"` for integers.
pub fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds half away from zero.
fn round_to_integer(r: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let num = r.numer().abs() * &two + r.denom();
    let q = num.div_floor(&(r.denom() * &two));
    if r.is_negative() {
        -q
    } else {
        q
    }
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// Largest `e` with `10^e <= |r|`, for non-zero `r`.
fn decimal_exponent(r: &BigRational) -> i64 {
    let a = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let one = BigRational::one();
    let mut e = 0i64;
    let mut probe = one.clone();
    if a >= one {
        while &probe * &ten <= a {
            probe *= &ten;
            e += 1;
        }
    } else {
        while probe > a {
            probe /= &ten;
            e -= 1;
        }
    }
    e
}

/// Renders `digits * 10^-scale` with trailing zeros trimmed.
fn place_point(digits: &BigInt, scale: i64) -> String {
    let negative = digits.is_negative();
    let mut s = digits.abs().to_string();
    if scale <= 0 {
        s.push_str(&"0".repeat((-scale) as usize));
    } else {
        let scale = scale as usize;
        if s.len() <= scale {
            s = format!("{}{}", "0".repeat(scale - s.len() + 1), s);
        }
        s.insert(s.len() - scale, '.');
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if negative && s.chars().any(|c| c != '0' && c != '.') {
        s.insert(0, '-');
    }
    s
}

/// Decimal rendering of an exact rational.
pub fn render(r: &BigRational, precision: Precision) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    match precision {
        Precision::Places(p) => {
            let scaled = r * BigRational::from_integer(pow10(p));
            place_point(&round_to_integer(&scaled), p as i64)
        }
        Precision::Significant(k) => {
            let k = k.max(1) as i64;
            let mut e = decimal_exponent(r);
            loop {
                let scale = k - 1 - e;
                let scaled = if scale >= 0 {
                    r * BigRational::from_integer(pow10(scale as u32))
                } else {
                    r / BigRational::from_integer(pow10((-scale) as u32))
                };
                let digits = round_to_integer(&scaled);
                // Rounding up may carry into an extra digit (9.99999 -> 10.0000).
                if digits.abs() >= pow10(k as u32) {
                    e += 1;
                    continue;
                }
                return place_point(&digits, scale);
            }
        }
    }
}

/// Parses a plain decimal literal (`-12.345`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let value = BigRational::new(digits, pow10(frac_part.len() as u32));
    Some(if negative { -value } else { value })
}

/// Parses `"num/den"`, an integer, or a decimal literal.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => parse_decimal(text),
    }
}

/// True when `r` has a terminating decimal expansion.
pub fn is_terminating(r: &BigRational) -> bool {
    let mut d = r.denom().clone();
    for p in [2u32, 5] {
        let p = BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn six_significant_digits_match_printed_values() {
        let p = Precision::Significant(6);
        assert_eq!(render(&q(227, 12), p), "18.9167");
        assert_eq!(render(&q(41, 6), p), "6.83333");
        assert_eq!(render(&q(4001, 510), p), "7.8451");
        assert_eq!(render(&q(37, 2), p), "18.5");
        assert_eq!(render(&q(12, 1), p), "12");
        assert_eq!(render(&q(46, 5), p), "9.2");
        assert_eq!(render(&q(-1, 3), p), "-0.333333");
        assert_eq!(render(&q(1, 8000), p), "0.000125");
        assert_eq!(render(&q(1234567, 1), p), "1234570");
        assert_eq!(render(&q(999_9996, 1_000_000), p), "10");
    }

    #[test]
    fn fixed_places() {
        assert_eq!(render(&q(227, 12), Precision::Places(5)), "18.91667");
        assert_eq!(render(&q(-1, 3), Precision::Places(2)), "-0.33");
        assert_eq!(render(&q(-1, 1000), Precision::Places(2)), "0");
        assert_eq!(render(&q(5, 2), Precision::Places(0)), "3");
        assert_eq!(render(&q(-33, 2), Precision::Places(3)), "-16.5");
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_decimal("7.8451"), Some(q(78451, 10000)));
        assert_eq!(parse_decimal("-16.5"), Some(q(-33, 2)));
        assert_eq!(parse_decimal(".5"), Some(q(1, 2)));
        assert_eq!(parse_decimal("1e3"), None);
        assert_eq!(parse_rational("227/12"), Some(q(227, 12)));
        assert_eq!(parse_rational("3/0"), None);
    }

    #[test]
    fn terminating() {
        assert!(is_terminating(&q(-33, 2)));
        assert!(is_terminating(&q(1, 40)));
        assert!(!is_terminating(&q(1, 3)));
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(ratio_string(&q(12, 1)), "12");
        assert_eq!(ratio_string(&q(-2, 6)), "-1/3");
    }
}
