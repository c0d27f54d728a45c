//! Exact rational scalars.
//!
//! All kernel arithmetic uses arbitrary-precision rationals. `num-rational`
//! keeps values reduced with a positive denominator, which is exactly the
//! normal form the rest of the crate relies on for deterministic reports.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Reduced fraction `p/q`. Panics on `q == 0`; callers pass literals.
pub fn ratio(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Parses `"p"`, `"-p"`, or `"p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in rational '{s}'")))?;
    let q: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in rational '{s}'")))?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in rational '{s}'")));
    }
    Ok(Rat::new(p, q))
}

/// Renders a rational as `p` or `p/q` (reduced, denominator positive).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign snapshot used when ordering report lines.
pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-3", "2/4", "-6/9", "7/1"] {
            let r = parse_rat(s).unwrap();
            let t = parse_rat(&format_rat(&r)).unwrap();
            assert_eq!(r, t);
        }
        assert_eq!(format_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(format_rat(&parse_rat("-6/9").unwrap()), "-2/3");
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), rat(1));
        assert_eq!(factorial(1), rat(1));
        assert_eq!(factorial(5), rat(120));
    }
}
