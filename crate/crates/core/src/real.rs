//! Non-negative reals derived from exact integers.
//!
//! Growth ratios such as `ord / N^(p/q)` are irrational in general. They are
//! produced here as `floor(x * 2^s) / 2^s` for an exact rational `x^q`,
//! taking an integer `q`-th root, which keeps at least [`PRECISION_BITS`]
//! correct bits no matter how far the value is outside the `f64` range.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub const PRECISION_BITS: u64 = 96;

/// Significant digits used when rendering reals.
pub const DISPLAY_DIGITS: usize = 12;

/// `mantissa * 2^exp2`, non-negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    mantissa: BigUint,
    exp2: i64,
}

fn shl_signed(x: &BigUint, shift: i64) -> (BigUint, BigUint) {
    // returns (numerator, denominator) of x * 2^shift
    if shift >= 0 {
        (x << shift as u64, BigUint::one())
    } else {
        (x.clone(), BigUint::one() << (-shift) as u64)
    }
}

impl Real {
    pub fn zero() -> Self {
        Real {
            mantissa: BigUint::zero(),
            exp2: 0,
        }
    }

    pub fn from_integer(x: &BigUint) -> Self {
        Real {
            mantissa: x.clone(),
            exp2: 0,
        }
    }

    /// Exact value of a finite, non-negative `f64`. Negative or non-finite
    /// inputs yield `None`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Real {
            mantissa: BigUint::from(mant),
            exp2: exp,
        })
    }

    /// `num / den`.
    pub fn ratio(num: &BigUint, den: &BigUint) -> Self {
        Self::ratio_root(num, den, 1)
    }

    /// `(num / den)^(1/root)` to at least [`PRECISION_BITS`] bits.
    ///
    /// # Panics
    /// If `den` or `root` is zero.
    pub fn ratio_root(num: &BigUint, den: &BigUint, root: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert!(root > 0, "zero root");
        if num.is_zero() {
            return Self::zero();
        }
        let q = root as i64;
        let log2_estimate = (num.bits() as i64 - den.bits() as i64).div_euclid(q);
        let mut s = PRECISION_BITS as i64 + 2 - log2_estimate;
        loop {
            let (n, d) = shl_signed(num, q * s);
            let x = n / (d * den);
            let r = if root == 1 { x } else { x.nth_root(root) };
            if r.bits() >= PRECISION_BITS {
                return Real { mantissa: r, exp2: -s };
            }
            s += (PRECISION_BITS - r.bits()) as i64 + 2;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// Nearest `f64`; underflows to 0 and overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.mantissa >> shift as u64).to_f64().unwrap_or(f64::INFINITY);
        let e = self.exp2 + shift;
        let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        libm::ldexp(top, e)
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_biguint(&self.mantissa) + self.exp2 as f64 * core::f64::consts::LN_2
    }

    /// Exact value as a rational `(numerator, denominator)`.
    pub fn to_ratio(&self) -> (BigUint, BigUint) {
        shl_signed(&self.mantissa, self.exp2)
    }

    /// Renders with `digits` significant digits, trailing zeros trimmed.
    /// Plain notation for decimal exponents in `[-5, digits)`, scientific otherwise.
    pub fn to_sig_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return String::from("0");
        }
        let log10 = self.ln() / core::f64::consts::LN_10;
        let mut lead = libm::floor(log10) as i64;
        // lead is the decimal exponent of the leading digit; fix estimate drift
        let (scaled, lead) = loop {
            let t = digits as i64 - 1 - lead;
            let s = self.scaled_round(t);
            let len = s.to_str_radix(10).len() as i64;
            if len > digits as i64 {
                lead += 1;
                continue;
            }
            if len < digits as i64 {
                lead -= 1;
                continue;
            }
            break (s.to_str_radix(10), lead);
        };
        let bytes: Vec<u8> = scaled.into_bytes();
        let mut end = bytes.len();
        while end > 1 && bytes[end - 1] == b'0' {
            end -= 1;
        }
        let sig = core::str::from_utf8(&bytes[..end]).unwrap();
        let mut out = String::new();
        if lead >= -5 && lead < digits as i64 {
            if lead >= 0 {
                let int_len = lead as usize + 1;
                if sig.len() <= int_len {
                    out.push_str(sig);
                    out.extend(core::iter::repeat('0').take(int_len - sig.len()));
                } else {
                    out.push_str(&sig[..int_len]);
                    out.push('.');
                    out.push_str(&sig[int_len..]);
                }
            } else {
                out.push_str("0.");
                out.extend(core::iter::repeat('0').take((-lead - 1) as usize));
                out.push_str(sig);
            }
        } else {
            out.push_str(&sig[..1]);
            if sig.len() > 1 {
                out.push('.');
                out.push_str(&sig[1..]);
            }
            out.push('e');
            out.push_str(&alloc::format!("{lead}"));
        }
        out
    }

    /// `round(self * 10^t)`, half away from zero.
    fn scaled_round(&self, t: i64) -> BigUint {
        let (mut num, mut den) = self.to_ratio();
        let ten = BigUint::from(10u8);
        if t >= 0 {
            num *= num_traits::pow(ten, t as usize);
        } else {
            den *= num_traits::pow(ten, (-t) as usize);
        }
        (num * 2u8 + &den) / (den * 2u8)
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let e = self.exp2.min(other.exp2);
        let a = &self.mantissa << (self.exp2 - e) as u64;
        let b = &other.mantissa << (other.exp2 - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sig_string(DISPLAY_DIGITS))
    }
}

/// Renders a finite `f64` with [`DISPLAY_DIGITS`] significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return String::from("NaN");
    }
    if x.is_infinite() {
        return String::from(if x > 0.0 { "inf" } else { "-inf" });
    }
    let body = Real::from_f64(x.abs()).unwrap().to_sig_string(DISPLAY_DIGITS);
    if x < 0.0 {
        alloc::format!("-{body}")
    } else {
        body
    }
}

/// Natural log of a big integer, accurate to `f64` precision; `-inf` at 0.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_f64().unwrap();
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn simple_ratios() {
        assert_eq!(Real::ratio(&big(2), &big(3)).to_string(), "0.666666666667");
        assert_eq!(Real::ratio(&big(4), &big(5)).to_string(), "0.8");
        assert_eq!(Real::ratio(&big(20), &big(1)).to_string(), "20");
        assert_eq!(Real::ratio(&big(0), &big(7)).to_string(), "0");
        assert_eq!(Real::ratio(&big(1), &big(3_000_000)).to_string(), "3.33333333333e-7");
        assert_eq!(
            Real::ratio(&big(123_456_789_012_345), &big(1)).to_string(),
            "1.23456789012e14"
        );
    }

    #[test]
    fn roots() {
        // 2^(1/2)
        let r = Real::ratio_root(&big(2), &big(1), 2);
        assert_eq!(r.to_string(), "1.41421356237");
        assert!((r.to_f64() - core::f64::consts::SQRT_2).abs() < 1e-15);
        // (1/8)^(1/3) = 0.5 exactly
        assert_eq!(Real::ratio_root(&big(1), &big(8), 3).to_string(), "0.5");
    }

    #[test]
    fn values_far_outside_f64() {
        let huge = BigUint::one() << 5000u32;
        let r = Real::ratio(&big(3), &huge);
        assert_eq!(r.to_f64(), 0.0);
        assert!(!r.is_zero());
        assert!((r.ln() - (3f64.ln() - 5000.0 * core::f64::consts::LN_2)).abs() < 1e-9);
        // 3 * 2^-5000 = 2.3...e-1505
        assert!(r.to_string().ends_with("e-1505"), "{}", r);
    }

    #[test]
    fn ordering() {
        let a = Real::ratio(&big(2), &big(3));
        let b = Real::ratio(&big(3), &big(4));
        assert!(a < b);
        assert!(Real::zero() < a);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
    }

    #[test]
    fn f64_formatting() {
        assert_eq!(format_f64(43.090_355_937_7), "43.0903559377");
        assert_eq!(format_f64(-1.5), "-1.5");
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(0.580_9), "0.5809");
    }

    #[test]
    fn ln_of_big_integers() {
        assert!((ln_biguint(&big(1000)) - 1000f64.ln()).abs() < 1e-12);
        let x = BigUint::one() << 2000u32;
        assert!((ln_biguint(&x) - 2000.0 * core::f64::consts::LN_2).abs() < 1e-9);
    }
}
