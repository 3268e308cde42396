//! Scalar backends: exact Gaussian rationals and double-precision complex.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use super::MatError;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Exact Gaussian rational `p + q·i` with `p, q ∈ ℚ`.
pub type CQ = Complex<BigRational>;

const DEFAULT_EPS: f64 = 1e-9;
const DEFAULT_MERGE: f64 = 1e-7;

static EPS_BITS: AtomicU64 = AtomicU64::new(DEFAULT_EPS.to_bits());
static MERGE_BITS: AtomicU64 = AtomicU64::new(DEFAULT_MERGE.to_bits());

/// Global float comparison tolerance ε (default `1e-9`).
pub fn eps() -> f64 {
    f64::from_bits(EPS_BITS.load(Ordering::Relaxed))
}

/// Relative distance under which eigenvalues share one spectral projection (default `1e-7`).
pub fn merge_tolerance() -> f64 {
    f64::from_bits(MERGE_BITS.load(Ordering::Relaxed))
}

/// Replace the global ε. Intended for process start-up (the CLI `--eps` flag).
pub fn set_eps(value: f64) {
    assert!(value > 0.0 && value.is_finite(), "tolerance must be positive");
    EPS_BITS.store(value.to_bits(), Ordering::Relaxed);
}

pub fn set_merge_tolerance(value: f64) {
    assert!(value > 0.0 && value.is_finite(), "tolerance must be positive");
    MERGE_BITS.store(value.to_bits(), Ordering::Relaxed);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// Complex scalar field shared by both backends.
///
/// Real quantities (eigenvalues, real parameters of a skew-Hermitian element)
/// are carried as scalars with vanishing imaginary part.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(value: i64) -> Self;
    /// Real rational; rounded on the float backend.
    fn from_rational(q: &BigRational) -> Self;
    /// Real rational `num/den`.
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    fn from_parts(re: Self, im: Self) -> Self;
    fn conj(&self) -> Self;
    fn re(&self) -> Self;
    fn im(&self) -> Self;
    fn to_c64(&self) -> C64;
    /// Exact backends convert the binary value exactly.
    fn from_c64(value: C64) -> Self;

    /// Literal zero on the exact backend; `|x| ≤ ε·max(1, scale)` on the float backend.
    fn negligible(&self, scale: f64) -> bool;

    fn is_zero(&self) -> bool {
        self.negligible(1.0)
    }

    /// Literal zero on both backends.
    fn is_exact_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn modulus_sq(&self) -> f64 {
        self.to_c64().norm_sqr()
    }

    /// Random complex scalar of moderate size.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn sample_real<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::sample(rng).re()
    }

    fn to_json(&self) -> Value;
    fn from_json(value: &Value) -> Result<Self, MatError>;
}

impl Scalar for C64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }
    fn from_i64(value: i64) -> Self {
        Complex::new(value as f64, 0.0)
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_parts(re: Self, im: Self) -> Self {
        Complex::new(re.re, im.re)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn re(&self) -> Self {
        Complex::new(self.re, 0.0)
    }
    fn im(&self) -> Self {
        Complex::new(self.im, 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn from_c64(value: C64) -> Self {
        value
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= eps() * scale.max(1.0)
    }
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im)
    }
    fn to_json(&self) -> Value {
        Value::Array(vec![float_json(self.re), float_json(self.im)])
    }
    fn from_json(value: &Value) -> Result<Self, MatError> {
        let (re, im) = json_pair(value)?;
        Ok(Complex::new(parse_f64(re)?, parse_f64(im)?))
    }
}

impl Scalar for CQ {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_i64(value: i64) -> Self {
        Complex::new(BigRational::from_integer(value.into()), BigRational::zero())
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(q.clone(), BigRational::zero())
    }
    fn from_parts(re: Self, im: Self) -> Self {
        Complex::new(re.re, im.re)
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn re(&self) -> Self {
        Complex::new(self.re.clone(), BigRational::zero())
    }
    fn im(&self) -> Self {
        Complex::new(self.im.clone(), BigRational::zero())
    }
    fn to_c64(&self) -> C64 {
        Complex::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn from_c64(value: C64) -> Self {
        let conv = |x: f64| BigRational::from_float(x).expect("finite float");
        Complex::new(conv(value.re), conv(value.im))
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex::new(small_rational(rng), small_rational(rng))
    }
    fn to_json(&self) -> Value {
        Value::Array(vec![
            Value::String(rational_string(&self.re)),
            Value::String(rational_string(&self.im)),
        ])
    }
    fn from_json(value: &Value) -> Result<Self, MatError> {
        let (re, im) = json_pair(value)?;
        Ok(Complex::new(parse_rational(re)?, parse_rational(im)?))
    }
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let num: i64 = rng.random_range(-6..=6);
    let den: i64 = rng.random_range(1..=4);
    BigRational::new(num.into(), den.into())
}

/// `p/q` with the denominator always present.
pub fn rational_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn json_pair(value: &Value) -> Result<(&Value, &Value), MatError> {
    match value.as_array() {
        Some(items) if items.len() == 2 => Ok((&items[0], &items[1])),
        _ => Err(MatError::Parse(format!("expected [re, im], found {value}"))),
    }
}

fn parse_f64(value: &Value) -> Result<f64, MatError> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| MatError::Parse(format!("bad number {n}"))),
        Value::String(s) => parse_rational_str(s)
            .map(|q| q.to_f64().unwrap_or(f64::NAN))
            .or_else(|_| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| MatError::Parse(format!("bad scalar {s:?}")))
            }),
        other => Err(MatError::Parse(format!("bad scalar {other}"))),
    }
}

fn parse_rational(value: &Value) -> Result<BigRational, MatError> {
    match value {
        Value::String(s) => parse_rational_str(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                let f = n
                    .as_f64()
                    .ok_or_else(|| MatError::Parse(format!("bad number {n}")))?;
                BigRational::from_float(f).ok_or_else(|| MatError::Parse(format!("bad number {n}")))
            }
        }
        other => Err(MatError::Parse(format!("bad scalar {other}"))),
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.25`.
pub fn parse_rational_str(s: &str) -> Result<BigRational, MatError> {
    let s = s.trim();
    let bad = || MatError::Parse(format!("bad rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_q = BigRational::new(frac_num, scale);
        let int_q = BigRational::from_integer(int_part.abs());
        let magnitude = int_q + frac_q;
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Parse a complex literal such as `2`, `-1/2`, `3i`, `1+2i`, `1/2-i`.
pub fn parse_complex_literal<S: Scalar>(text: &str) -> Result<S, MatError> {
    let bad = || MatError::Parse(format!("bad complex literal {text:?}"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    // split at the last sign that is not the leading one
    let split = s
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(i, _)| i)
        .last();
    let (first, second) = match split {
        Some(i) if s.ends_with('i') => (&s[..i], Some(&s[i..])),
        _ => (s.as_str(), None),
    };
    let real_or_imag = |part: &str| -> Result<(S, bool), MatError> {
        if let Some(body) = part.strip_suffix('i') {
            let coeff = match body {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                b => parse_rational_str(b.trim_end_matches('*'))?,
            };
            Ok((S::from_rational(&coeff) * S::i(), true))
        } else {
            Ok((S::from_rational(&parse_rational_str(part)?), false))
        }
    };
    let (a, a_imag) = real_or_imag(first)?;
    match second {
        None => Ok(a),
        Some(rest) => {
            let (b, b_imag) = real_or_imag(rest)?;
            if a_imag || !b_imag {
                return Err(bad());
            }
            Ok(a + b)
        }
    }
}

/// Render a scalar compactly for human-readable diagnostics, e.g. `1/2-3i`.
pub fn format_scalar<S: Scalar>(x: &S) -> String {
    let part = |v: &Value| match v {
        Value::String(s) => s.strip_suffix("/1").unwrap_or(s).to_string(),
        other => other.to_string(),
    };
    match x.to_json() {
        Value::Array(parts) if parts.len() == 2 => {
            let (re, im) = (part(&parts[0]), part(&parts[1]));
            if im.starts_with('-') {
                format!("{re}{im}i")
            } else {
                format!("{re}+{im}i")
            }
        }
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_forms() {
        assert_eq!(parse_rational_str("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rational_str("-2").unwrap(), BigRational::from_integer((-2).into()));
        assert_eq!(parse_rational_str("-0.25").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert!(parse_rational_str("1/0").is_err());
        assert!(parse_rational_str("abc").is_err());
    }

    #[test]
    fn complex_literals() {
        let z: CQ = parse_complex_literal("1/2-i").unwrap();
        assert_eq!(z, Complex::new(BigRational::new(1.into(), 2.into()), -BigRational::one()));
        let w: CQ = parse_complex_literal("3i").unwrap();
        assert_eq!(w, CQ::i() * CQ::from_i64(3));
        let f: C64 = parse_complex_literal("-2+1/4i").unwrap();
        assert_eq!(f, C64::new(-2.0, 0.25));
        assert!(parse_complex_literal::<C64>("i+1").is_err());
    }

    #[test]
    fn json_round_trip_exact() {
        let z = CQ::from_ratio(-3, 7) + CQ::i() * CQ::from_ratio(5, 2);
        let v = z.to_json();
        assert_eq!(v, serde_json::json!(["-3/7", "5/2"]));
        assert_eq!(CQ::from_json(&v).unwrap(), z);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_scalar(&(CQ::from_ratio(1, 2) - CQ::i() * CQ::from_i64(3))), "1/2-3i");
        assert_eq!(format_scalar(&C64::new(1.5, 2.0)), "1.5+2.0i");
    }

    #[test]
    fn exact_negligible_is_literal() {
        let tiny = CQ::from_ratio(1, 1_000_000_000_000);
        assert!(!Scalar::is_zero(&tiny));
        assert!(Scalar::is_zero(&C64::new(1e-12, 0.0)));
    }
}
