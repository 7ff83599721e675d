//! Fractions num/den over Q[t^{±1}] with a canonical denominator.
//!
//! The canonical form keeps the denominator an ordinary monic polynomial
//! with nonzero constant term and strips common factors, so equality is
//! structural. Cross-multiplication equality is kept as a debug cross-check.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::Rat;
use num::One;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentFraction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl LaurentFraction {
    /// Build num/den in canonical form. Errors on zero denominator.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(LaurentFraction {
                num: LaurentPoly::zero(),
                den: LaurentPoly::one(),
            });
        }
        // den = c * t^b * den0 with den0 ordinary monic, nonzero constant term
        let (b, den_cleared) = den.clear_unit();
        let lc = den_cleared.leading_coeff();
        let den0 = den_cleared.monic();
        let num_adj = num.shift(-b).scale(&(Rat::one() / lc));
        // strip the gcd over Q[t]
        let g = num_adj.gcd(&den0);
        let den_final = den0.exact_div(&g).expect("gcd divides").monic();
        // correct for the scalar the monic renormalization dropped
        let den_mid = den0.exact_div(&g).expect("gcd divides");
        let unit = den_mid.leading_coeff();
        let num_final = num_adj
            .exact_div(&g)
            .expect("gcd divides")
            .scale(&(Rat::one() / unit));
        Ok(LaurentFraction {
            num: num_final,
            den: den_final,
        })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        LaurentFraction {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the fraction lies in Q[t^{±1}].
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&LaurentPoly> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn bar(&self) -> Self {
        Self::new(self.num.bar(), self.den.bar()).expect("nonzero denominator")
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        Self::new(&self.num * p, self.den.clone()).expect("nonzero denominator")
    }

    /// Split into polynomial part and reduced part: self = part + reduced,
    /// where the reduced numerator is the ordinary representative of degree
    /// < deg(den). Idempotent on the reduced part.
    pub fn normalize(&self) -> (LaurentPoly, LaurentFraction) {
        if self.is_polynomial() {
            return (self.num.clone(), LaurentFraction::zero());
        }
        let r = self.num.reduce_mod(&self.den).expect("canonical denominator");
        let part = (&self.num - &r)
            .exact_div(&self.den)
            .expect("difference divisible by denominator");
        let reduced = LaurentFraction {
            num: r,
            den: self.den.clone(),
        };
        (part, reduced)
    }

    /// The canonical representative modulo Q[t^{±1}].
    pub fn reduced_rep(&self) -> LaurentFraction {
        self.normalize().1
    }

    /// Polynomial part (self minus the reduced representative).
    pub fn polynomial_part(&self) -> LaurentPoly {
        self.normalize().0
    }

    /// Congruence modulo Q[t^{±1}].
    pub fn congruent_mod_poly(&self, other: &LaurentFraction) -> bool {
        (self - other).is_polynomial()
    }

    /// Largest exponent magnitude appearing in the numerator.
    pub fn exp_radius(&self) -> i64 {
        self.num.exp_radius()
    }

    /// Cross-multiplied equality; canonical forms make this structural,
    /// kept for use as an independent oracle.
    pub fn eq_cross(&self, other: &LaurentFraction) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Add for &LaurentFraction {
    type Output = LaurentFraction;
    fn add(self, rhs: &LaurentFraction) -> LaurentFraction {
        LaurentFraction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl Sub for &LaurentFraction {
    type Output = LaurentFraction;
    fn sub(self, rhs: &LaurentFraction) -> LaurentFraction {
        self + &-rhs
    }
}

impl Mul for &LaurentFraction {
    type Output = LaurentFraction;
    fn mul(self, rhs: &LaurentFraction) -> LaurentFraction {
        LaurentFraction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

impl Neg for &LaurentFraction {
    type Output = LaurentFraction;
    fn neg(self) -> LaurentFraction {
        LaurentFraction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for LaurentFraction {
    type Output = LaurentFraction;
    fn add(self, rhs: LaurentFraction) -> LaurentFraction {
        &self + &rhs
    }
}

impl Sub for LaurentFraction {
    type Output = LaurentFraction;
    fn sub(self, rhs: LaurentFraction) -> LaurentFraction {
        &self - &rhs
    }
}

impl Mul for LaurentFraction {
    type Output = LaurentFraction;
    fn mul(self, rhs: LaurentFraction) -> LaurentFraction {
        &self * &rhs
    }
}

impl Neg for LaurentFraction {
    type Output = LaurentFraction;
    fn neg(self) -> LaurentFraction {
        -&self
    }
}

impl fmt::Display for LaurentFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{} / {}", self.num, self.den)
        }
    }
}

impl FromStr for LaurentFraction {
    type Err = Error;
    /// `num / den` with the fraction slash surrounded by spaces; coefficient
    /// slashes like `1/3` bind to the coefficient.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(" / ") {
            None => Ok(LaurentFraction::from_poly(s.parse()?)),
            Some((n, d)) => {
                let num: LaurentPoly = n.parse()?;
                let den: LaurentPoly = d.parse()?;
                LaurentFraction::new(num, den)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn fr(s: &str) -> LaurentFraction {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_examples() {
        // 1/δ with δ = t - 1 + t^-1 canonicalizes over t^2 - t + 1
        let f = LaurentFraction::new(p("1"), p("t - 1 + t^-1")).unwrap();
        assert_eq!(f.numerator(), &p("t"));
        assert_eq!(f.denominator(), &p("t^2 - t + 1"));

        // common factors stripped
        let g = LaurentFraction::new(&p("t + 1") * &p("t - 1"), &p("t + 1") * &p("t^2")).unwrap();
        assert_eq!(g.numerator(), &p("-t^-2 + t^-1"));
        assert_eq!(g.denominator(), &p("1"));
    }

    #[test]
    fn normalize_examples() {
        let f = LaurentFraction::new(p("t^2 + 1"), p("t^2 - t + 1")).unwrap();
        let (part, red) = f.normalize();
        assert_eq!(part, p("1"));
        assert_eq!(red, fr("t / t^2 - t + 1"));

        let one_over_delta = fr("1 / t - 1 + t^-1");
        let (part, red) = one_over_delta.normalize();
        assert!(part.is_zero());
        assert_eq!(red, one_over_delta);

        // δ/δ
        let f = LaurentFraction::new(p("t - 1 + t^-1"), p("t - 1 + t^-1")).unwrap();
        let (part, red) = f.normalize();
        assert_eq!(part, p("1"));
        assert!(red.is_zero());
    }

    #[test]
    fn normalize_idempotent() {
        for s in ["t^3 + 2 / t^2 - t + 1", "t^-4 / t^3 + t + 1", "5"] {
            let f = fr(s);
            let (_, red) = f.normalize();
            let (part2, red2) = red.normalize();
            assert!(part2.is_zero());
            assert_eq!(red2, red);
        }
    }

    #[test]
    fn arithmetic_and_equality() {
        let a = fr("1 / t + 1");
        let b = fr("t / t + 1");
        let s = &a + &b;
        assert!(s.is_polynomial());
        assert_eq!(s.as_polynomial().unwrap(), &p("1"));
        assert!(a.eq_cross(&fr("t^-1 / 1 + t^-1")));
        assert_eq!(a, fr("t^-1 / 1 + t^-1"));
    }

    #[test]
    fn bar_on_fractions() {
        let f = fr("1 / t + 1");
        let g = f.bar(); // 1/(t^-1+1) = t/(t+1)
        assert_eq!(g, fr("t / t + 1"));
        assert_eq!(g.bar(), f);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "t", "t / t^2 - t + 1", "1 - t^-2", "-t / t + 1"] {
            let f = fr(s);
            assert_eq!(fr(&f.to_string()), f);
        }
    }
}
