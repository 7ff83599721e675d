//! Finite Q-linear combinations of canonicalized diagrams.
//!
//! Terms are indexed by canonical keys; the stored representative diagram
//! relates to the canonical class by `diagram = rep_sign * [key]`. Zero
//! coefficients are never stored, so structural equality of the term maps
//! is equality in the sign-normalized free vector space.

use crate::diagram::canonical::canonical_form;
use crate::diagram::Diagram;
use crate::Rat;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: Rat,
    pub rep: Diagram,
    pub rep_sign: i8,
}

#[derive(Debug, Clone, Default)]
pub struct FormalSum {
    terms: BTreeMap<String, Term>,
}

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_diagram(d: Diagram, coeff: Rat) -> Self {
        let mut s = Self::zero();
        s.add_diagram(d, coeff);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add coeff * d; diagrams identified with zero are dropped.
    pub fn add_diagram(&mut self, d: Diagram, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let (key, sign) = canonical_form(&d);
        if sign == 0 {
            return;
        }
        let signed = if sign < 0 { -coeff } else { coeff };
        match self.terms.get_mut(&key) {
            Some(term) => {
                term.coeff += signed;
                if term.coeff.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(
                    key,
                    Term {
                        coeff: signed,
                        rep: d,
                        rep_sign: sign,
                    },
                );
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FormalSum, c: &Rat) {
        if c.is_zero() {
            return;
        }
        for (key, term) in &other.terms {
            let add = term.coeff.clone() * c;
            match self.terms.get_mut(key) {
                Some(t) => {
                    t.coeff += add;
                    if t.coeff.is_zero() {
                        self.terms.remove(key);
                    }
                }
                None => {
                    self.terms.insert(
                        key.clone(),
                        Term {
                            coeff: add,
                            rep: term.rep.clone(),
                            rep_sign: term.rep_sign,
                        },
                    );
                }
            }
        }
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for term in self.terms.values_mut() {
            term.coeff *= c;
        }
    }

    pub fn negated(&self) -> FormalSum {
        let mut out = self.clone();
        out.scale(&-Rat::from_integer(1.into()));
        out
    }

    pub fn plus(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_scaled(other, &Rat::from_integer(1.into()));
        out
    }

    pub fn minus(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_scaled(other, &-Rat::from_integer(1.into()));
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &str) -> Rat {
        self.terms
            .get(key)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.terms.keys()
    }

    /// Representative diagrams of the support with the sign relating them
    /// to the canonical class.
    pub fn support(&self) -> impl Iterator<Item = (&String, &Diagram, i8)> {
        self.terms.iter().map(|(k, t)| (k, &t.rep, t.rep_sign))
    }

    /// One deterministic text line per term.
    pub fn describe(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(k, t)| format!("{}  {}", t.coeff, k))
            .collect()
    }
}

impl PartialEq for FormalSum {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .zip(other.terms.iter())
            .all(|((k1, t1), (k2, t2))| k1 == k2 && t1.coeff == t2.coeff)
    }
}

impl Eq for FormalSum {}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (_, t)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·[{} terms]", t.coeff, t.rep.vertices.len())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::testutil::theta;
    use crate::diagram::VertexKind;
    use crate::rat;

    #[test]
    fn signs_cancel() {
        let d = theta(["1", "t", "t^2"]);
        let mut flipped = d.clone();
        if let VertexKind::Trivalent { cyclic } = &mut flipped.vertices[0] {
            cyclic.swap(0, 2);
        }
        // d + flipped = 0 (anti-symmetry absorbed by the canonical form)
        let mut s = FormalSum::zero();
        s.add_diagram(d, rat(1, 1));
        s.add_diagram(flipped, rat(1, 1));
        assert!(s.is_zero());
    }

    #[test]
    fn accumulation() {
        let d = theta(["1", "t", "t^2"]);
        let mut s = FormalSum::zero();
        s.add_diagram(d.clone(), rat(1, 2));
        s.add_diagram(d.clone(), rat(1, 3));
        assert_eq!(s.len(), 1);
        let (_, term) = s.terms().next().unwrap();
        assert_eq!(term.coeff.clone() * rat(term.rep_sign as i64, 1), rat(5, 6));

        let mut t = FormalSum::from_diagram(d, rat(5, 6));
        t.add_scaled(&s, &rat(-1, 1));
        assert!(t.is_zero());
    }
}
