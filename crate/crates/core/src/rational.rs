//! Exact rational arithmetic helpers.
//!
//! All probabilities in this crate are `BigRational` values. File formats
//! carry them as strings of the form `"num/den"` or plain integers; decimal
//! literals are rejected so nothing ever passes through floating point on
//! the way into the polytope machinery.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or an integer string. Decimal literals are an error.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(Error::Parse(format!(
            "decimal literal {s:?} rejected; use \"num/den\""
        )));
    }
    let mut parts = s.splitn(2, '/');
    let num_str = parts.next().unwrap();
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let den: BigInt = match parts.next() {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Formats in lowest terms, omitting the denominator when it is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // falls back to a quotient of lossy conversions for huge terms
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Rounds a real to the nearest rational with the given denominator,
/// then reduces. Used when an irrational joint probability has to enter
/// the exact LP.
pub fn approx_rational(x: f64, denominator: u64) -> Rational {
    let scaled = (x * denominator as f64).round();
    let num = BigInt::from(scaled as i128);
    BigRational::new(num, BigInt::from(denominator))
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

/// Uniform draw in `[0, bound)` by rejection on the top bit width.
pub fn draw_below(bound: &BigUint, rng: &mut impl rand::RngCore) -> BigUint {
    use num_traits::FromPrimitive;
    assert!(!bound.is_zero());
    if bound == &BigUint::one() {
        return BigUint::zero();
    }
    // fast path for bounds that fit a u128
    if let Some(b) = bound.to_u128() {
        let bits = 128 - b.leading_zeros();
        let mask = if bits == 128 {
            u128::MAX
        } else {
            (1u128 << bits) - 1
        };
        loop {
            let hi = rng.next_u64() as u128;
            let lo = rng.next_u64() as u128;
            let r = ((hi << 64) | lo) & mask;
            if r < b {
                return BigUint::from_u128(r).unwrap();
            }
        }
    }
    let bits = bound.bits();
    let n_words = ((bits + 63) / 64) as usize;
    let top_bits = bits % 64;
    loop {
        let mut words = Vec::with_capacity(n_words);
        for i in 0..n_words {
            let mut w = rng.next_u64();
            if i == n_words - 1 && top_bits != 0 {
                w &= (1u64 << top_bits) - 1;
            }
            words.push(w);
        }
        let r = BigUint::from_slice(
            &words
                .iter()
                .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                .collect::<Vec<_>>(),
        );
        if &r < bound {
            return r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let r = parse_rational("3/32").unwrap();
        assert_eq!(r, rat(3, 32));
        assert_eq!(format_rational(&r), "3/32");
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(format_rational(&rat(2, 1)), "2");
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
    }

    #[test]
    fn rejects_decimals_and_zero_denominator() {
        assert!(parse_rational("0.25").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn approx_rounding_policy() {
        assert_eq!(approx_rational(0.375, 1_000_000_000_000), rat(3, 8));
        assert_eq!(approx_rational(0.5, 4), rat(1, 2));
    }

    #[test]
    fn draw_below_is_in_range() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let bound = BigUint::from(12u32);
        for _ in 0..200 {
            assert!(draw_below(&bound, &mut rng) < bound);
        }
    }
}
