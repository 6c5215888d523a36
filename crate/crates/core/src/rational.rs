//! Exact rational helpers for ordering parameters and the λ identity.

use num_integer::Roots;
use num_traits::{Signed, Zero};

pub type Rational = num_rational::Ratio<i128>;

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact square root when both reduced numerator and denominator are perfect
/// squares; `None` otherwise (including negative input).
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rational::zero());
    }
    let n = *r.numer();
    let d = *r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    (sn * sn == n && sd * sd == d).then(|| Rational::new(sn, sd))
}

/// Parses `"-0.25"`, `"3"`, `"1e-3"`, `"-1/4"` exactly. Returns `None` for
/// anything else.
pub fn parse_exact(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n = parse_exact(num)?;
        let d = parse_exact(den)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut numer: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer.checked_mul(10)?.checked_add(i128::from(b - b'0'))?;
    }
    let scale = exponent - frac_part.len() as i32;
    let pow10 = 10i128.checked_pow(scale.unsigned_abs())?;
    let mut value = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(pow10)?)
    } else {
        Rational::new(numer, pow10)
    };
    if negative {
        value = -value;
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_exact("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(parse_exact("0.5"), Some(ratio(1, 2)));
        assert_eq!(parse_exact("-1/4"), Some(ratio(-1, 4)));
        assert_eq!(parse_exact("2.5e-1"), Some(ratio(1, 4)));
        assert_eq!(parse_exact("3"), Some(ratio(3, 1)));
        assert_eq!(parse_exact("abc"), None);
        assert_eq!(parse_exact("1/0"), None);
        assert_eq!(parse_exact("-"), None);
    }

    #[test]
    fn exact_sqrt_of_squares_only() {
        assert_eq!(exact_sqrt(&ratio(9, 16)), Some(ratio(3, 4)));
        assert_eq!(exact_sqrt(&ratio(0, 1)), Some(ratio(0, 1)));
        assert_eq!(exact_sqrt(&ratio(2, 1)), None);
        assert_eq!(exact_sqrt(&ratio(-1, 4)), None);
    }
}
