//! Small helpers around exact rationals.

use alloc::string::{String, ToString};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Builds `p/q` as a big rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Builds an integer rational.
pub fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `num / den` for unsigned big integers.
pub fn from_biguint_ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, num),
        BigInt::from_biguint(Sign::Plus, den),
    )
}

/// Nearest `f64` to a rational, good to full double precision even for huge
/// numerators and denominators.
pub fn to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = q.numer();
    let d = q.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    // scale so that the quotient keeps 64 significant bits
    let scaled = if shift > 64 {
        n / (d << ((shift - 64) as usize))
    } else {
        (n << ((64 - shift) as usize)) / d
    };
    let mant = scaled.to_f64().unwrap_or(f64::NAN);
    mant * libm::pow(2.0, (shift - 64) as f64)
}

/// Exact `"p/q"` rendering (`"p"` for integers).
pub fn exact_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal rendering with `digits` fractional digits, rounding half to even.
pub fn to_decimal(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = a.numer() * &scale;
    let (mut quo, rem) = scaled.div_rem(a.denom());
    let twice = rem * 2u32;
    match twice.cmp(a.denom()) {
        core::cmp::Ordering::Greater => quo += 1u32,
        core::cmp::Ordering::Equal => {
            if quo.is_odd() {
                quo += 1u32
            }
        }
        core::cmp::Ordering::Less => {}
    }
    let s = quo.to_string();
    let s = if s.len() <= digits {
        let mut pad = String::new();
        for _ in 0..(digits + 1 - s.len()) {
            pad.push('0');
        }
        pad + &s
    } else {
        s
    };
    let (ip, fp) = s.split_at(s.len() - digits);
    let mut out = String::new();
    if neg && !quo.is_zero() {
        out.push('-');
    }
    out.push_str(ip);
    if digits > 0 {
        out.push('.');
        out.push_str(fp);
    }
    out
}

/// Least common multiple of `1..=n`.
pub fn lcm_upto(n: u64) -> BigUint {
    let mut l = BigUint::one();
    for i in 2..=n {
        l = l.lcm(&BigUint::from(i));
    }
    l
}

/// Least common multiple of the values yielded.
pub fn lcm_of<I: IntoIterator<Item = u64>>(vals: I) -> BigUint {
    let mut l = BigUint::one();
    for v in vals {
        if v > 1 {
            l = l.lcm(&BigUint::from(v));
        }
    }
    l
}

/// Binomial coefficient as `u128`, `None` on overflow.
pub fn binom(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rounding_half_even() {
        assert_eq!(to_decimal(&ratio(1, 8), 2), "0.12");
        assert_eq!(to_decimal(&ratio(3, 8), 2), "0.38");
        assert_eq!(to_decimal(&ratio(-1, 3), 3), "-0.333");
        assert_eq!(to_decimal(&ratio(5, 2), 0), "2");
        assert_eq!(to_decimal(&ratio(1, 1000), 2), "0.00");
        assert_eq!(to_decimal(&ratio(7, 1), 1), "7.0");
    }

    #[test]
    fn f64_of_huge_rationals() {
        let big = BigInt::from(3u32).pow(2000);
        let q = BigRational::new(big.clone() * 2, big * 3);
        assert!((to_f64(&q) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), Some(10));
        assert_eq!(binom(5, 4), Some(5));
        assert_eq!(binom(3, 5), Some(0));
    }
}
