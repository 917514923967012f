//! Scalar types the metric formulas are evaluated in.
//!
//! Every probability in this crate is a rational function of integer design
//! parameters, so the formulas are written once against [`Scalar`] and
//! evaluated either exactly ([`BigRational`]) or in floating point.

use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// The value `num / den`. `den` must be nonzero.
    fn from_ratio(num: u128, den: u128) -> Self;

    fn powu(&self, exp: u32) -> Self;

    fn to_f64(&self) -> f64;

    fn from_count(count: u128) -> Self {
        Self::from_ratio(count, 1)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn powu(&self, exp: u32) -> Self {
        self.powi(exp as i32)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    fn to_f64(&self) -> f64 {
        // Scale into i64 range first; BigRational::to_f64 on huge
        // numerators/denominators loses everything.
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() {
                return v;
            }
        }
        let digits = 30u32;
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = (self.numer() * &scale).div_floor(self.denom());
        scaled.to_f64().unwrap_or(f64::NAN) / 1e30
    }
}

/// Renders an exact rational with `places` decimals, rounding half to even.
pub fn render_rational(value: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = value * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = if frac > half || (frac == half && floor.is_odd()) {
        floor + BigInt::one()
    } else {
        floor
    };
    let negative = rounded.sign() == Sign::Minus;
    let digits = rounded.abs().to_str_radix(10);
    let places = places as usize;
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let (int, dec) = padded.split_at(padded.len() - places);
        format!("{int}.{dec}")
    };
    if negative && !rounded.is_zero() {
        format!("-{body}")
    } else {
        body
    }
}

/// Renders a float with `places` decimals.
pub fn render_f64(value: f64, places: u32) -> String {
    format!("{value:.prec$}", prec = places as usize)
}
