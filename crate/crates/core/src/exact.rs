//! Exact rational helpers: decimal parsing, float conversion, determinants.
//!
//! Every finite `f64` is a dyadic rational, so converting a float point to a
//! [`BigRational`] loses nothing. Bodies built from exact decimal data use this
//! to make boundary decisions without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses a decimal literal (`-12.5`, `3e-2`, `.25`) or a fraction (`7/3`) exactly.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::invalid(format!("not a decimal number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num)?;
        let d = parse_decimal(den)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// The rational written by the shortest decimal form of `x`, so `0.2` maps
/// to `1/5` rather than to the nearest binary fraction.
pub fn decimal_of(x: f64) -> BigRational {
    parse_decimal(&format!("{x:?}")).unwrap_or_else(|_| from_f64(x))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `floor(sqrt(n) * 10^digits) / 10^digits`, i.e. sqrt(n) truncated to `digits` decimals.
pub fn sqrt_truncated(n: u32, digits: u32) -> BigRational {
    let scale = num_traits::pow(BigInt::from(10u32), digits as usize);
    let radicand = BigInt::from(n) * &scale * &scale;
    BigRational::new(radicand.sqrt(), scale)
}

/// Determinant by fraction-exact Gaussian elimination. `rows` must be square.
pub fn determinant(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            let (top, bottom) = m.split_at_mut(r);
            for (target, pivot) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *target -= &factor * pivot;
            }
        }
    }
    det
}
