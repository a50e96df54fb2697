//! Exact rational helpers and deterministic decimal rendering.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type ExactRational = BigRational;

pub fn rat(num: i64, den: i64) -> ExactRational {
    BigRational::new(num.into(), den.into())
}

pub fn int(v: i64) -> ExactRational {
    BigRational::from_integer(v.into())
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// (w)_k = w (w - 1) ... (w - k + 1); (w)_0 = 1.
pub fn falling_factorial(w: &ExactRational, k: usize) -> ExactRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * (w - int(i as i64)))
}

/// w (w + 1) ... (w + k - 1).
pub fn rising_factorial(w: &ExactRational, k: usize) -> ExactRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * (w + int(i as i64)))
}

/// `sig` significant digits of `q`, rounded half away from zero.
///
/// Plain notation for exponents in -5..sig, scientific otherwise; trailing
/// zeros after the decimal point are dropped.
pub fn to_decimal(q: &ExactRational, sig: usize) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let negative = q.is_negative();
    let num = q.numer().magnitude().clone();
    let den = q.denom().magnitude().clone();
    let mut exp = decimal_exponent(&num, &den);
    let mut digits = round_scaled(&num, &den, sig as i64 - 1 - exp);
    if digits >= BigUint::from(10u32).pow(sig as u32) {
        exp += 1;
        digits = round_scaled(&num, &den, sig as i64 - 1 - exp);
    }
    layout(negative, digits, exp, sig)
}

/// Decimal rendering of `sign * sqrt(square)` for a non-negative rational
/// `square`.
pub fn sqrt_to_decimal(square: &ExactRational, negative: bool, sig: usize) -> String {
    assert!(!square.is_negative(), "square must be non-negative");
    if square.is_zero() {
        return "0".into();
    }
    let num = square.numer().magnitude().clone();
    let den = square.denom().magnitude().clone();
    let mut exp = Integer::div_floor(&decimal_exponent(&num, &den), &2);
    let mut digits = round_sqrt_scaled(&num, &den, sig as i64 - 1 - exp);
    if digits >= BigUint::from(10u32).pow(sig as u32) {
        exp += 1;
        digits = round_sqrt_scaled(&num, &den, sig as i64 - 1 - exp);
    }
    layout(negative, digits, exp, sig)
}

/// floor(log10(num / den)) for positive num, den.
fn decimal_exponent(num: &BigUint, den: &BigUint) -> i64 {
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    // now 10^(e-1) < num/den < 10^(e+1)
    let (a, b) = scale(num, den, -e);
    if a < b {
        e -= 1;
    }
    e
}

// num * 10^shift / den as an integer pair (a, b) with a/b equal to it
fn scale(num: &BigUint, den: &BigUint, shift: i64) -> (BigUint, BigUint) {
    let ten = BigUint::from(10u32);
    if shift >= 0 {
        (num * ten.pow(shift as u32), den.clone())
    } else {
        (num.clone(), den * ten.pow((-shift) as u32))
    }
}

fn round_scaled(num: &BigUint, den: &BigUint, shift: i64) -> BigUint {
    let (a, b) = scale(num, den, shift);
    (a * 2u32 + &b) / (b * 2u32)
}

// round(sqrt(num / den * 10^(2 shift)))
fn round_sqrt_scaled(num: &BigUint, den: &BigUint, shift: i64) -> BigUint {
    let (a, b) = scale(num, den, 2 * shift);
    // floor(2 sqrt(x)) = isqrt(floor(4x)); round(sqrt(x)) = floor((that + 1) / 2)
    let twice = (a * 4u32 / b).sqrt();
    (twice + 1u32) / 2u32
}

fn layout(negative: bool, digits: BigUint, exp: i64, sig: usize) -> String {
    let s = digits.to_string();
    debug_assert_eq!(s.len(), sig);
    let sign = if negative { "-" } else { "" };
    let body = if (-5..sig as i64).contains(&exp) {
        if exp >= 0 {
            let (int_part, frac) = s.split_at(exp as usize + 1);
            join_point(int_part, frac)
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            join_point("0", &format!("{zeros}{s}"))
        }
    } else {
        let (lead, frac) = s.split_at(1);
        format!("{}e{exp}", join_point(lead, frac))
    };
    format!("{sign}{body}")
}

fn join_point(int_part: &str, frac: &str) -> String {
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int_part.to_string()
    } else {
        format!("{int_part}.{frac}")
    }
}

/// `num/den` in lowest terms as decimal strings.
pub fn num_den(q: &ExactRational) -> (String, String) {
    (q.numer().to_string(), q.denom().to_string())
}

pub fn to_f64(q: &ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer_valued(q: &ExactRational) -> bool {
    q.denom().is_one()
}

pub(crate) fn from_big(v: BigInt, den: BigUint) -> ExactRational {
    BigRational::new(v, BigInt::from_biguint(Sign::Plus, den))
}
