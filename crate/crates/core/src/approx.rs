//! Decimal rational approximations of irrational constants (√x, π, cos, sin)
//! and a lossy `f64` view of rationals for reporting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Rational = BigRational;

fn pow10(digits: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), digits as usize)
}

/// Rounds `x` to the nearest multiple of `10^-digits`.
pub fn round_to(x: &Rational, digits: u32) -> Rational {
    let scale = pow10(digits);
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

/// `√x` to within `10^-digits`, for `x ≥ 0`.
pub fn sqrt(x: &Rational, digits: u32) -> Rational {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return Rational::zero();
    }
    // floor(sqrt(x * 10^(2d))) / 10^d, then one rounding step.
    let scale = pow10(digits + 1);
    let scaled = x * Rational::from_integer(&scale * &scale);
    let r = scaled.to_integer().sqrt();
    round_to(&Rational::new(r, scale), digits)
}

/// π to within `10^-digits` (Machin's formula).
pub fn pi(digits: u32) -> Rational {
    let guard = digits + 5;
    let eps = Rational::new(BigInt::one(), pow10(guard));
    let atan_inv = |m: i64| -> Rational {
        // atan(1/m) = Σ (-1)^i / ((2i+1) m^(2i+1))
        let m = BigInt::from(m);
        let m2 = &m * &m;
        let mut power = m.clone();
        let mut sum = Rational::zero();
        let mut i = 0u64;
        loop {
            let term = Rational::new(BigInt::one(), &power * BigInt::from(2 * i + 1));
            if term < eps {
                break;
            }
            if i.is_multiple_of(2) {
                sum += &term;
            } else {
                sum -= &term;
            }
            sum = round_to(&sum, guard + 2);
            power *= &m2;
            i += 1;
        }
        sum
    };
    let v = Rational::from_integer(BigInt::from(16)) * atan_inv(5)
        - Rational::from_integer(BigInt::from(4)) * atan_inv(239);
    round_to(&v, digits)
}

/// `(cos φ, sin φ)` for `φ = 2π · num / den`, each to within `10^-digits`.
pub fn cos_sin_turn(num: i64, den: i64, digits: u32) -> (Rational, Rational) {
    assert!(den > 0);
    let num = num.rem_euclid(den);
    let guard = digits + 6;
    let two_pi = pi(guard + 2) * Rational::from_integer(BigInt::from(2));
    let phi = round_to(&(two_pi * Rational::new(num.into(), den.into())), guard);
    let eps = Rational::new(BigInt::one(), pow10(guard));
    // Taylor series; φ < 2π so a few dozen terms suffice.
    let mut cos = Rational::zero();
    let mut sin = Rational::zero();
    let mut term = Rational::one(); // φ^i / i!
    let mut i: u64 = 0;
    loop {
        match i % 4 {
            0 => cos += &term,
            1 => sin += &term,
            2 => cos -= &term,
            _ => sin -= &term,
        }
        i += 1;
        term = round_to(&(term * &phi / Rational::from_integer(i.into())), guard + 4);
        if i > 8 && term.abs() < eps {
            break;
        }
    }
    (round_to(&cos, digits), round_to(&sin, digits))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: shift both down.
        let n = x.numer();
        let d = x.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(900);
        let n = n >> shift;
        let d = d >> shift;
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

/// Ceiling of a rational as an `i128`.
pub fn ceil_i128(x: &Rational) -> i128 {
    x.ceil().to_integer().to_i128().expect("value fits in i128")
}

/// Floor of a rational as an `i128`.
pub fn floor_i128(x: &Rational) -> i128 {
    x.floor()
        .to_integer()
        .to_i128()
        .expect("value fits in i128")
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
