//! Exact arbitrary-precision scalars and small helpers shared by every module.
//!
//! Everything in this crate computes over `Int` (arbitrary-precision integers)
//! and `Rat` (arbitrary-precision rationals). No floating point exists anywhere.

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Shorthand for small integer constants.
pub fn int(x: i64) -> Int {
    Int::from(x)
}

/// Shorthand for small rational constants; panics on q = 0.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(Int::from(p))
}

pub fn to_rat(x: &Int) -> Rat {
    Rat::from_integer(x.clone())
}

/// gcd of a slice, nonnegative; 0 for the empty slice or all-zero input.
pub fn gcd_all(values: &[Int]) -> Int {
    let mut g = Int::zero();
    for v in values {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divides a vector by the gcd of its entries. Returns `None` for the zero vector.
pub fn primitivize(v: &[Int]) -> Option<Vec<Int>> {
    let g = gcd_all(v);
    if g.is_zero() {
        return None;
    }
    Some(v.iter().map(|x| x / &g).collect())
}

pub fn is_primitive(v: &[Int]) -> bool {
    gcd_all(v).is_one()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * to_rat(y)).sum()
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat_int(x)).collect()
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(to_rat).collect()
}

/// Scales a rational vector by the lcm of denominators and divides by the gcd,
/// yielding the primitive integer vector in the same (positive) direction.
/// Returns `None` for the zero vector.
pub fn primitive_direction(v: &[Rat]) -> Option<Vec<Int>> {
    let mut l = Int::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    primitivize(&ints)
}

/// If every entry is an integer, returns the integer vector.
pub fn rat_vec_to_int(v: &[Rat]) -> Option<Vec<Int>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

/// Renders a rational in lowest terms: plain integer when the denominator is 1,
/// otherwise "p/q".
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses "p", "-p" or "p/q" into a rational. The denominator must be positive
/// after reduction; "1/0" is rejected.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let numer: Int = num_s.trim().parse().map_err(|_| bad())?;
    let denom: Int = den_s.trim().parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

pub fn rat_sign(x: &Rat) -> i8 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn is_nonneg(x: &Rat) -> bool {
    !x.is_negative()
}
