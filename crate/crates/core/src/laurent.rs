//! Exact arithmetic in Q[t^{±1}].
//!
//! A Laurent polynomial is a finite map from integer exponents to nonzero
//! rationals. The bar involution t ↦ t^{-1} and the Euclidean toolbox over
//! Q[t] (division, gcd, modular inverse) live here; both are used everywhere
//! in the pairing and relation machinery.

use crate::error::{Error, Result};
use crate::{rat_int, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    // exponent -> coefficient, zero entries absent
    coeffs: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(rat_int(1), 0)
    }

    /// The variable t.
    pub fn t() -> Self {
        Self::monomial(rat_int(1), 1)
    }

    pub fn monomial(c: Rat, exp: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentPoly { coeffs }
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Integer-coefficient convenience: `[(exponent, coefficient)]`.
    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, rat_int(c))))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0).is_one()
    }

    pub fn add_term(&mut self, exp: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> Rat {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Exponent spread (max - min); 0 for monomials and the zero polynomial.
    pub fn spread(&self) -> i64 {
        match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// The dual polynomial P(t^{-1}).
    pub fn bar(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, k)| (e, k * c)).collect(),
        }
    }

    /// True iff no negative exponents occur (an ordinary polynomial in t).
    pub fn is_ordinary(&self) -> bool {
        self.min_exp().map_or(true, |m| m >= 0)
    }

    /// Degree as an ordinary polynomial. None for the zero polynomial.
    pub fn degree(&self) -> Option<i64> {
        self.max_exp()
    }

    pub fn leading_coeff(&self) -> Rat {
        self.max_exp().map(|e| self.coeff(e)).unwrap_or_else(Rat::zero)
    }

    /// Exact evaluation at t = 1 or t = -1.
    pub fn eval_pm_one(&self, sign: i64) -> Rat {
        debug_assert!(sign == 1 || sign == -1);
        let mut acc = Rat::zero();
        for (e, c) in self.terms() {
            if sign == 1 || e.rem_euclid(2) == 0 {
                acc += c.clone();
            } else {
                acc -= c.clone();
            }
        }
        acc
    }

    /// Split off the t-power unit: returns (k, P0) with self = t^k * P0 and
    /// P0 an ordinary polynomial with nonzero constant term. The zero
    /// polynomial returns (0, 0).
    pub fn clear_unit(&self) -> (i64, LaurentPoly) {
        match self.min_exp() {
            None => (0, Self::zero()),
            Some(m) => (m, self.shift(-m)),
        }
    }

    /// Monic rescaling; the zero polynomial stays zero.
    pub fn monic(&self) -> LaurentPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.leading_coeff();
        self.scale(&(Rat::one() / lc))
    }

    /// Canonical associate: an ordinary monic polynomial with nonzero
    /// constant term (t-power and scalar units stripped).
    pub fn canonical_associate(&self) -> LaurentPoly {
        self.clear_unit().1.monic()
    }

    /// Whether bar(P) = a t^k P for some rational a and integer k. Matching
    /// the extreme exponents forces k = -(min + max), so checking that
    /// single shift is exhaustive.
    pub fn is_symmetric(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroInput("is_symmetric".into()));
        }
        let b = self.bar();
        let k = -(self.min_exp().unwrap() + self.max_exp().unwrap());
        let shifted = self.shift(k);
        debug_assert_eq!(shifted.max_exp(), b.max_exp());
        let a = b.leading_coeff() / shifted.leading_coeff();
        Ok(shifted.scale(&a) == b)
    }

    /// Euclidean division for ordinary polynomials: self = q * d + r with
    /// deg r < deg d. Panics are avoided: zero divisor is an error.
    pub fn div_rem(&self, d: &LaurentPoly) -> Result<(LaurentPoly, LaurentPoly)> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        debug_assert!(self.is_ordinary() && d.is_ordinary());
        let dd = d.degree().unwrap();
        let dlc = d.leading_coeff();
        let mut r = self.clone();
        let mut q = LaurentPoly::zero();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.leading_coeff() / dlc.clone();
            let k = rd - dd;
            q.add_term(k, c.clone());
            r = &r - &d.shift(k).scale(&c);
        }
        Ok((q, r))
    }

    /// Exact division in Q[t^{±1}]; error if the divisor does not divide.
    pub fn exact_div(&self, d: &LaurentPoly) -> Result<LaurentPoly> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (ku, u) = self.clear_unit();
        let (kv, v) = d.clear_unit();
        let (q, r) = u.div_rem(&v)?;
        if !r.is_zero() {
            return Err(Error::Invalid(format!("{} does not divide {}", d, self)));
        }
        Ok(q.shift(ku - kv))
    }

    /// Divisibility in Q[t^{±1}] (units ignored).
    pub fn divides(&self, other: &LaurentPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        if other.is_zero() {
            return true;
        }
        let a = self.clear_unit().1;
        let b = other.clear_unit().1;
        match b.div_rem(&a) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic gcd over Q[t] (t-power units cleared first); gcd(0,0) = 0.
    pub fn gcd(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut a = self.clear_unit().1;
        let mut b = other.clear_unit().1;
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic lcm over Q[t].
    pub fn lcm(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(other);
        let a = self.canonical_associate();
        let b = other.canonical_associate();
        (&a * &b).exact_div(&g).expect("gcd divides").monic()
    }

    /// Extended Euclid over Q[t] on ordinary polynomials: returns (g, x, y)
    /// monic g with x*self + y*other = g.
    pub fn extended_gcd(&self, other: &LaurentPoly) -> (LaurentPoly, LaurentPoly, LaurentPoly) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut x0 = LaurentPoly::one();
        let mut x1 = LaurentPoly::zero();
        let mut y0 = LaurentPoly::zero();
        let mut y1 = LaurentPoly::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let x = &x0 - &(&q * &x1);
            let y = &y0 - &(&q * &y1);
            r0 = r1;
            r1 = r;
            x0 = x1;
            x1 = x;
            y0 = y1;
            y1 = y;
        }
        if r0.is_zero() {
            return (r0, x0, y0);
        }
        let lc = r0.leading_coeff();
        let inv = Rat::one() / lc;
        (r0.scale(&inv), x0.scale(&inv), y0.scale(&inv))
    }

    /// Inverse of self modulo m in Q[t^{±1}]: returns Q with self*Q ≡ 1
    /// (mod m). Requires gcd(self, m) = 1 after clearing t-powers; the
    /// result is the reduced ordinary representative.
    pub fn invert_mod(&self, m: &LaurentPoly) -> Result<LaurentPoly> {
        if self.is_zero() {
            return Err(Error::ZeroInput("invert_mod".into()));
        }
        let mc = m.canonical_associate();
        if mc.degree() == Some(0) {
            return Err(Error::ZeroInput("invert_mod: unit modulus".into()));
        }
        let (k, p0) = self.clear_unit();
        let p0 = match p0.div_rem(&mc) {
            Ok((_, r)) => r,
            Err(_) => p0,
        };
        if p0.is_zero() {
            return Err(Error::NotCoprime(mc.to_string()));
        }
        let (g, x, _) = p0.extended_gcd(&mc);
        if g.degree() != Some(0) {
            return Err(Error::NotCoprime(g.to_string()));
        }
        // p0 * x ≡ 1; undo the t-power by multiplying with (t^{-1} mod m)^k
        let mut inv = x.div_rem(&mc)?.1;
        if k != 0 {
            let tinv = Self::t_inverse_mod(&mc)?;
            let factor = if k > 0 {
                Self::pow_mod(&tinv, k as u64, &mc)?
            } else {
                Self::pow_mod(&LaurentPoly::t(), (-k) as u64, &mc)?
            };
            inv = (&inv * &factor).div_rem(&mc)?.1;
        }
        Ok(inv)
    }

    /// t^{-1} mod m for an ordinary m with nonzero constant term:
    /// from m = c0 + t*rest, t * (-rest/c0) ≡ 1 (mod m).
    pub fn t_inverse_mod(m: &LaurentPoly) -> Result<LaurentPoly> {
        let c0 = m.coeff(0);
        if c0.is_zero() {
            return Err(Error::NotCoprime("t".into()));
        }
        let rest = (m - &LaurentPoly::constant(c0.clone())).shift(-1);
        Ok(rest.scale(&(-Rat::one() / c0)))
    }

    fn pow_mod(base: &LaurentPoly, mut e: u64, m: &LaurentPoly) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::one();
        let mut b = base.div_rem(m)?.1;
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &b).div_rem(m)?.1;
            }
            b = (&b * &b).div_rem(m)?.1;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Reduce a Laurent polynomial modulo an ordinary monic m with nonzero
    /// constant term; negative powers of t are resolved through t^{-1} mod m.
    /// The result is the ordinary representative of degree < deg m.
    pub fn reduce_mod(&self, m: &LaurentPoly) -> Result<LaurentPoly> {
        let mc = m.canonical_associate();
        if mc.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if mc.degree() == Some(0) {
            return Ok(LaurentPoly::zero());
        }
        let (k, p0) = self.clear_unit();
        let mut r = p0.div_rem(&mc)?.1;
        if k > 0 {
            let tk = Self::pow_mod(&LaurentPoly::t(), k as u64, &mc)?;
            r = (&r * &tk).div_rem(&mc)?.1;
        } else if k < 0 {
            let tinv = Self::t_inverse_mod(&mc)?;
            let tk = Self::pow_mod(&tinv, (-k) as u64, &mc)?;
            r = (&r * &tk).div_rem(&mc)?.1;
        }
        Ok(r)
    }

    /// Power with non-negative integer exponent.
    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Largest exponent magnitude; 0 for the zero polynomial.
    pub fn exp_radius(&self) -> i64 {
        self.coeffs.keys().map(|e| e.abs()).max().unwrap_or(0)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Rat::one())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical text form: terms in increasing exponent order,
    /// `c*t^k` with exact rational coefficients, e.g. `-1/2 + t^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_part = if mag.is_one() && e != 0 {
                None
            } else {
                Some(fmt_rat(&mag))
            };
            let var_part = match e {
                0 => None,
                1 => Some("t".to_string()),
                _ => Some(format!("t^{}", e)),
            };
            match (coeff_part, var_part) {
                (Some(c), Some(v)) => write!(f, "{}*{}", c, v)?,
                (Some(c), None) => write!(f, "{}", c)?,
                (None, Some(v)) => write!(f, "{}", v)?,
                (None, None) => unreachable!(),
            }
        }
        Ok(())
    }
}

/// Parser for the polynomial text syntax. Whitespace is insignificant.
/// Terms look like `2*t^-3`, `t`, `-1/2`, `t^4`, joined by + and -.
fn parse_poly(input: &str) -> Result<LaurentPoly> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bytes = s.as_bytes();
    let mut i = 0usize;
    let mut out = LaurentPoly::zero();
    let mut sign = 1i64;
    // leading sign
    if bytes[i] == b'+' {
        i += 1;
    } else if bytes[i] == b'-' {
        sign = -1;
        i += 1;
    }
    while i < bytes.len() {
        let (term, ni) = parse_term(&s, i)?;
        out.add_term(term.0, term.1.scale_sign(sign));
        i = ni;
        if i == bytes.len() {
            break;
        }
        match bytes[i] {
            b'+' => {
                sign = 1;
                i += 1;
            }
            b'-' => {
                sign = -1;
                i += 1;
            }
            c => {
                return Err(Error::Parse(format!(
                    "unexpected character '{}' in polynomial '{}'",
                    c as char, input
                )))
            }
        }
        if i == bytes.len() {
            return Err(Error::Parse(format!("dangling sign in '{}'", input)));
        }
    }
    Ok(out)
}

trait ScaleSign {
    fn scale_sign(self, s: i64) -> Rat;
}
impl ScaleSign for Rat {
    fn scale_sign(self, s: i64) -> Rat {
        if s < 0 {
            -self
        } else {
            self
        }
    }
}

// one term: [coeff]['*'] ['t' ['^' int]]
fn parse_term(s: &str, mut i: usize) -> Result<((i64, Rat), usize)> {
    let bytes = s.as_bytes();
    let mut coeff = Rat::one();
    let mut saw_coeff = false;
    if i < bytes.len() && bytes[i].is_ascii_digit() {
        let (c, ni) = parse_rat(s, i)?;
        coeff = c;
        saw_coeff = true;
        i = ni;
    }
    if i < bytes.len() && bytes[i] == b'*' {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b't' {
        i += 1;
        let mut exp = 1i64;
        if i < bytes.len() && bytes[i] == b'^' {
            i += 1;
            let (e, ni) = parse_int(s, i)?;
            exp = e;
            i = ni;
        }
        Ok(((exp, coeff), i))
    } else if saw_coeff {
        Ok(((0, coeff), i))
    } else {
        Err(Error::Parse(format!(
            "expected term at position {} of '{}'",
            i, s
        )))
    }
}

fn parse_rat(s: &str, i: usize) -> Result<(Rat, usize)> {
    let (n, mut i) = parse_uint(s, i)?;
    let bytes = s.as_bytes();
    if i < bytes.len() && bytes[i] == b'/' {
        // a slash starts a denominator only if digits follow
        if i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
            let (d, ni) = parse_uint(s, i + 1)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator in coefficient".into()));
            }
            i = ni;
            return Ok((Rat::new(n, d), i));
        }
    }
    Ok((Rat::from(n), i))
}

fn parse_uint(s: &str, i: usize) -> Result<(num::BigInt, usize)> {
    let bytes = s.as_bytes();
    let start = i;
    let mut j = i;
    while j < bytes.len() && bytes[j].is_ascii_digit() {
        j += 1;
    }
    if j == start {
        return Err(Error::Parse(format!("expected digits at {} in '{}'", i, s)));
    }
    let n = s[start..j]
        .parse::<num::BigInt>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok((n, j))
}

fn parse_int(s: &str, mut i: usize) -> Result<(i64, usize)> {
    let bytes = s.as_bytes();
    let mut sign = 1i64;
    if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
        if bytes[i] == b'-' {
            sign = -1;
        }
        i += 1;
    }
    let start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == start {
        return Err(Error::Parse(format!("expected integer at {} in '{}'", i, s)));
    }
    let v: i64 = s[start..i]
        .parse()
        .map_err(|e: std::num::ParseIntError| Error::Parse(e.to_string()))?;
    Ok((sign * v, i))
}

impl FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in [
            "0",
            "1",
            "-1",
            "t",
            "-t",
            "t^-1",
            "1 - 2*t^-1 + 1/3*t^2",
            "-1/2 + t^2",
            "2*t - 3*t^2",
        ] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q, "roundtrip of {}", s);
        }
    }

    #[test]
    fn bar_negates_exponents() {
        assert_eq!(p("t").bar(), p("t^-1"));
        assert_eq!(p("2*t - 3*t^2").bar(), p("2*t^-1 - 3*t^-2"));
        let sym = p("t + 2 + t^-1");
        assert_eq!(sym.bar(), sym);
    }

    #[test]
    fn bar_is_involutive_and_multiplicative() {
        let a = p("1 - 2*t^-1 + 1/3*t^2");
        let b = p("t^3 + 5");
        assert_eq!(a.bar().bar(), a);
        assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
    }

    #[test]
    fn symmetry_examples() {
        assert!(p("t + 2 + t^-1").is_symmetric().unwrap());
        assert!(p("t - 1 + t^-1").is_symmetric().unwrap());
        assert!(!p("t - 2").is_symmetric().unwrap());
        assert!(p("t + 1").is_symmetric().unwrap()); // bar = t^-1(t+1)
        assert!(p("t^2 - t + 1").is_symmetric().unwrap());
        assert!(p("t").is_symmetric().unwrap());
        assert!(p("t - 1 + t^-1").bar() == p("t - 1 + t^-1"));
    }

    #[test]
    fn symmetry_rejects_zero() {
        assert!(LaurentPoly::zero().is_symmetric().is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = p("t^2 + 1");
        let d = p("t^2 - t + 1");
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(q, p("1"));
        assert_eq!(r, p("t"));

        let g = p("t^2 - 1").gcd(&p("t^2 - 2*t + 1"));
        assert_eq!(g, p("t - 1"));
        let l = p("t^2 - 1").lcm(&p("t^2 - 2*t + 1"));
        assert_eq!(l, &p("t - 1") * &p("t^2 - 1")); // (t-1)^2(t+1)
    }

    #[test]
    fn invert_mod_examples() {
        let delta = p("t - 1 + t^-1");
        assert_eq!(LaurentPoly::one().invert_mod(&delta).unwrap(), p("1"));

        let inv = p("t + 1").invert_mod(&p("t^2 - t + 1")).unwrap();
        assert_eq!(inv, p("2/3 - 1/3*t"));
        let check = (&p("t + 1") * &inv).reduce_mod(&p("t^2 - t + 1")).unwrap();
        assert_eq!(check, p("1"));

        let inv = p("t^2 - t + 1").invert_mod(&p("t + 1")).unwrap();
        assert_eq!(inv, LaurentPoly::constant(rat(1, 3)));
    }

    #[test]
    fn invert_mod_rejects_common_factor() {
        let err = p("t - 1").invert_mod(&p("t^2 - 2*t + 1"));
        match err {
            Err(Error::NotCoprime(g)) => assert_eq!(g, "-1 + t"),
            other => panic!("expected NotCoprime, got {:?}", other),
        }
    }

    #[test]
    fn reduce_mod_handles_negative_exponents() {
        let m = p("t^2 - t + 1");
        // t^-1 = 1 - t mod m  (t(1-t) = t - t^2 = t - (t-1) = 1)
        assert_eq!(p("t^-1").reduce_mod(&m).unwrap(), p("1 - t"));
        let x = p("3*t^-2 - t + 4");
        let r = x.reduce_mod(&m).unwrap();
        let diff = &x - &r;
        // difference must be divisible by m
        assert!(m.divides(&diff));
    }

    #[test]
    fn invert_mod_with_unit_factor() {
        // t-power units must not break invertibility
        let m = p("t^2 - t + 1");
        let a = p("t^-3 + t^-2"); // t^{-3}(1 + t)
        let inv = a.invert_mod(&m).unwrap();
        let one = (&a * &inv).reduce_mod(&m).unwrap();
        assert_eq!(one, p("1"));
    }
}
