//! Blanchfield modules presented by structure-theorem blocks.
//!
//! A module is an orthogonal direct sum of cyclic blocks Q[t^{±1}]/(π^n)
//! with self-pairing P/π^n and hyperbolic pairs over (t+1)^m. Elements are
//! per-generator polynomial coordinates, stored reduced mod the block
//! orders. The pairing is extended sesquilinearly from the generator
//! pairings and all values are exact fractions.

use crate::error::{Error, Result};
use crate::fraction::LaurentFraction;
use crate::laurent::LaurentPoly;
use crate::{rat_int, Rat};
use num::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockSpec {
    Cyclic {
        pi: LaurentPoly,
        n: u32,
        /// numerator of the self-pairing b(γ,γ) = P/π^n
        self_pairing: LaurentPoly,
        /// declared product of two dual non-symmetric primes
        composite: bool,
    },
    Hyperbolic {
        m: u32,
    },
}

impl BlockSpec {
    pub fn cyclic(pi: LaurentPoly, n: u32, self_pairing: LaurentPoly) -> Self {
        BlockSpec::Cyclic {
            pi,
            n,
            self_pairing,
            composite: false,
        }
    }

    pub fn hyperbolic(m: u32) -> Self {
        BlockSpec::Hyperbolic { m }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            BlockSpec::Cyclic { .. } => 1,
            BlockSpec::Hyperbolic { .. } => 2,
        }
    }

    /// Canonical block order: the monic ordinary associate of π^n,
    /// resp. (t+1)^m.
    pub fn order(&self) -> LaurentPoly {
        match self {
            BlockSpec::Cyclic { pi, n, .. } => pi.pow(*n).canonical_associate(),
            BlockSpec::Hyperbolic { m } => t_plus_one().pow(*m),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            BlockSpec::Cyclic {
                pi,
                n,
                self_pairing,
                composite,
            } => {
                if *n == 0 {
                    return Err(Error::Invalid("cyclic block needs n >= 1".into()));
                }
                if pi.is_zero() || self_pairing.is_zero() {
                    return Err(Error::Invalid("cyclic block data must be nonzero".into()));
                }
                if !pi.is_symmetric()? {
                    return Err(Error::Invalid(format!("pi = {} is not symmetric", pi)));
                }
                if !self_pairing.is_symmetric()? {
                    return Err(Error::Invalid(format!(
                        "self-pairing numerator {} is not symmetric",
                        self_pairing
                    )));
                }
                if !self_pairing.gcd(pi).is_one() {
                    return Err(Error::NotCoprime(self_pairing.gcd(pi).to_string()));
                }
                let t2 = t_plus_one().pow(2); // canonical form of t + 2 + t^-1
                if !composite && pi.canonical_associate() != t2 {
                    if pi.eval_pm_one(1).is_zero() || pi.eval_pm_one(-1).is_zero() {
                        return Err(Error::Invalid(format!(
                            "pi = {} vanishes at t = ±1 and is not t+2+t^-1",
                            pi
                        )));
                    }
                }
                Ok(())
            }
            BlockSpec::Hyperbolic { m } => {
                if *m == 0 || m % 2 == 0 {
                    return Err(Error::Invalid(format!(
                        "hyperbolic block needs odd m, got {}",
                        m
                    )));
                }
                Ok(())
            }
        }
    }
}

fn t_plus_one() -> LaurentPoly {
    LaurentPoly::from_int_terms(&[(0, 1), (1, 1)])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleCopy {
    pub tag: String,
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct GeneratorInfo {
    copy: usize,
    block: usize,
    slot: usize,
}

/// An orthogonal direct sum of structure-theorem blocks, partitioned into
/// tagged copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlanchfieldModule {
    copies: Vec<ModuleCopy>,
    gens: Vec<GeneratorInfo>,
    orders: Vec<LaurentPoly>,
}

impl BlanchfieldModule {
    pub fn new(copies: Vec<ModuleCopy>) -> Result<Self> {
        let mut tags = BTreeSet::new();
        for c in &copies {
            if !tags.insert(c.tag.clone()) {
                return Err(Error::Invalid(format!("duplicate copy tag {}", c.tag)));
            }
            for b in &c.blocks {
                b.validate()?;
            }
        }
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (ci, c) in copies.iter().enumerate() {
            for (bi, b) in c.blocks.iter().enumerate() {
                for slot in 0..b.generator_count() {
                    gens.push(GeneratorInfo {
                        copy: ci,
                        block: bi,
                        slot,
                    });
                    orders.push(b.order());
                }
            }
        }
        Ok(BlanchfieldModule {
            copies,
            gens,
            orders,
        })
    }

    /// Single-copy module from a block list, tagged "1".
    pub fn single(blocks: Vec<BlockSpec>) -> Result<Self> {
        Self::new(vec![ModuleCopy {
            tag: "1".into(),
            blocks,
        }])
    }

    /// The trivial module (annihilator 1).
    pub fn trivial() -> Self {
        Self::new(vec![]).expect("trivial module is valid")
    }

    pub fn copies(&self) -> &[ModuleCopy] {
        &self.copies
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn copy_index(&self, tag: &str) -> Result<usize> {
        self.copies
            .iter()
            .position(|c| c.tag == tag)
            .ok_or_else(|| Error::UnknownCopy(tag.into()))
    }

    pub fn generator_order(&self, gen: usize) -> &LaurentPoly {
        &self.orders[gen]
    }

    pub fn generator_copy(&self, gen: usize) -> usize {
        self.gens[gen].copy
    }

    pub fn generators_of_copy(&self, copy: usize) -> Vec<usize> {
        (0..self.gens.len())
            .filter(|&g| self.gens[g].copy == copy)
            .collect()
    }

    /// Least common multiple of all block orders, canonical monic form.
    pub fn annihilator(&self) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for o in &self.orders {
            acc = acc.lcm(o);
        }
        acc
    }

    pub fn copy_annihilator(&self, copy: usize) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for (g, info) in self.gens.iter().enumerate() {
            if info.copy == copy {
                acc = acc.lcm(&self.orders[g]);
            }
        }
        acc
    }

    /// N orthogonal copies of this module's block content, tagged "1".."N".
    pub fn direct_sum(&self, n: usize) -> Result<BlanchfieldModule> {
        let unit: Vec<BlockSpec> = self
            .copies
            .iter()
            .flat_map(|c| c.blocks.iter().cloned())
            .collect();
        let copies = (1..=n)
            .map(|i| ModuleCopy {
                tag: i.to_string(),
                blocks: unit.clone(),
            })
            .collect();
        Self::new(copies)
    }

    pub fn zero_element(&self) -> ModuleElement {
        ModuleElement {
            coords: vec![LaurentPoly::zero(); self.gens.len()],
        }
    }

    pub fn generator_element(&self, gen: usize) -> ModuleElement {
        let mut e = self.zero_element();
        e.coords[gen] = LaurentPoly::one();
        e
    }

    /// Sum of all block generators of one copy; its order is the copy
    /// annihilator.
    pub fn sum_of_generators(&self, copy: usize) -> ModuleElement {
        let mut e = self.zero_element();
        for g in self.generators_of_copy(copy) {
            e.coords[g] = LaurentPoly::one();
        }
        e
    }

    pub fn reduce_element(&self, e: &ModuleElement) -> Result<ModuleElement> {
        if e.coords.len() != self.gens.len() {
            return Err(Error::DimensionMismatch(format!(
                "element has {} coordinates, module has {} generators",
                e.coords.len(),
                self.gens.len()
            )));
        }
        let coords = e
            .coords
            .iter()
            .zip(&self.orders)
            .map(|(c, o)| c.reduce_mod(o))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement { coords })
    }

    /// Generator pairing b(g_i, g_j) as an exact fraction; zero across
    /// blocks and copies.
    fn generator_pairing(&self, i: usize, j: usize) -> LaurentFraction {
        let a = self.gens[i];
        let b = self.gens[j];
        if a.copy != b.copy || a.block != b.block {
            return LaurentFraction::zero();
        }
        match &self.copies[a.copy].blocks[a.block] {
            BlockSpec::Cyclic {
                pi, n, self_pairing, ..
            } => LaurentFraction::new(self_pairing.clone(), pi.pow(*n))
                .expect("nonzero block order"),
            BlockSpec::Hyperbolic { m } => {
                let base = LaurentFraction::new(LaurentPoly::one(), t_plus_one().pow(*m))
                    .expect("nonzero block order");
                match (a.slot, b.slot) {
                    (0, 1) => base,
                    (1, 0) => base.bar(),
                    _ => LaurentFraction::zero(),
                }
            }
        }
    }

    /// The hermitian pairing, reduced mod Q[t^{±1}]: extended from
    /// generator pairings by b(P γ, Q η) = P(t) Q(t^{-1}) b(γ, η).
    pub fn pair(&self, x: &ModuleElement, y: &ModuleElement) -> Result<LaurentFraction> {
        if x.coords.len() != self.gens.len() || y.coords.len() != self.gens.len() {
            return Err(Error::DimensionMismatch("pair".into()));
        }
        let mut acc = LaurentFraction::zero();
        for i in 0..self.gens.len() {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..self.gens.len() {
                if y.coords[j].is_zero() {
                    continue;
                }
                let base = self.generator_pairing(i, j);
                if base.is_zero() {
                    continue;
                }
                acc = &acc + &base.mul_poly(&x.coords[i]).mul_poly(&y.coords[j].bar());
            }
        }
        Ok(acc.reduced_rep())
    }

    /// Apply an automorphism (or any generator-image table) to an element.
    pub fn apply_map(&self, images: &[ModuleElement], e: &ModuleElement) -> Result<ModuleElement> {
        if images.len() != self.gens.len() {
            return Err(Error::DimensionMismatch("apply_map".into()));
        }
        let mut out = self.zero_element();
        for (i, c) in e.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, img) in images[i].coords.iter().enumerate() {
                out.coords[k] = &out.coords[k] + &(c * img);
            }
        }
        self.reduce_element(&out)
    }

    /// Total Q-dimension of the underlying vector space.
    pub fn q_dimension(&self) -> usize {
        self.orders
            .iter()
            .map(|o| o.degree().unwrap_or(0) as usize)
            .sum()
    }

    /// Parse the module description format: `copy <tag>` headers followed by
    /// `cyclic pi=<poly> n=<int> P=<poly> [composite]` or
    /// `hyperbolic m=<int>` lines. Polynomials are written without spaces.
    pub fn parse(text: &str) -> Result<Self> {
        let mut copies: Vec<ModuleCopy> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            match head {
                "copy" => {
                    let tag = tokens
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: copy needs a tag", lineno + 1)))?;
                    copies.push(ModuleCopy {
                        tag: tag.to_string(),
                        blocks: Vec::new(),
                    });
                }
                "cyclic" | "hyperbolic" => {
                    if copies.is_empty() {
                        copies.push(ModuleCopy {
                            tag: "1".into(),
                            blocks: Vec::new(),
                        });
                    }
                    let mut pi = None;
                    let mut n = None;
                    let mut p = None;
                    let mut m = None;
                    let mut composite = false;
                    for tok in tokens {
                        if tok == "composite" {
                            composite = true;
                            continue;
                        }
                        let (key, val) = tok.split_once('=').ok_or_else(|| {
                            Error::Parse(format!("line {}: expected key=value, got '{}'", lineno + 1, tok))
                        })?;
                        match key {
                            "pi" => pi = Some(val.parse::<LaurentPoly>()?),
                            "n" => n = Some(val.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?),
                            "P" => p = Some(val.parse::<LaurentPoly>()?),
                            "m" => m = Some(val.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?),
                            _ => return Err(Error::Parse(format!("line {}: unknown key {}", lineno + 1, key))),
                        }
                    }
                    let block = if head == "cyclic" {
                        BlockSpec::Cyclic {
                            pi: pi.ok_or_else(|| Error::Parse(format!("line {}: cyclic needs pi", lineno + 1)))?,
                            n: n.ok_or_else(|| Error::Parse(format!("line {}: cyclic needs n", lineno + 1)))?,
                            self_pairing: p
                                .ok_or_else(|| Error::Parse(format!("line {}: cyclic needs P", lineno + 1)))?,
                            composite,
                        }
                    } else {
                        BlockSpec::Hyperbolic {
                            m: m.ok_or_else(|| Error::Parse(format!("line {}: hyperbolic needs m", lineno + 1)))?,
                        }
                    };
                    copies.last_mut().unwrap().blocks.push(block);
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected 'copy', 'cyclic' or 'hyperbolic', got '{}'",
                        lineno + 1,
                        head
                    )))
                }
            }
        }
        Self::new(copies)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for c in &self.copies {
            out.push_str(&format!("copy {}\n", c.tag));
            for b in &c.blocks {
                match b {
                    BlockSpec::Cyclic {
                        pi,
                        n,
                        self_pairing,
                        composite,
                    } => {
                        let compact = |p: &LaurentPoly| p.to_string().replace(' ', "");
                        out.push_str(&format!(
                            "cyclic pi={} n={} P={}{}\n",
                            compact(pi),
                            n,
                            compact(self_pairing),
                            if *composite { " composite" } else { "" }
                        ));
                    }
                    BlockSpec::Hyperbolic { m } => {
                        out.push_str(&format!("hyperbolic m={}\n", m));
                    }
                }
            }
        }
        out
    }
}

/// Element as per-generator polynomial coordinates, reduced mod the block
/// orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleElement {
    pub coords: Vec<LaurentPoly>,
}

impl ModuleElement {
    pub fn from_coords(coords: Vec<LaurentPoly>) -> Self {
        ModuleElement { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        ModuleElement {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale_poly(&self, p: &LaurentPoly, module: &BlanchfieldModule) -> Result<ModuleElement> {
        module.reduce_element(&ModuleElement {
            coords: self.coords.iter().map(|c| c * p).collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> ModuleElement {
        ModuleElement {
            coords: self.coords.iter().map(|q| q.scale(c)).collect(),
        }
    }

    /// Copies whose generators carry nonzero coordinates.
    pub fn support_copies(&self, module: &BlanchfieldModule) -> BTreeSet<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, _)| module.generator_copy(g))
            .collect()
    }

    /// Text form: generator coordinates joined by " ; ".
    pub fn serialize(&self) -> String {
        self.coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(';')
            .map(|part| part.trim().parse::<LaurentPoly>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement { coords })
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// A module map given by the images of the generators, tagged with the
/// family it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleAutomorphism {
    pub name: String,
    pub images: Vec<ModuleElement>,
}

impl ModuleAutomorphism {
    pub fn identity(module: &BlanchfieldModule) -> Self {
        ModuleAutomorphism {
            name: "id".into(),
            images: (0..module.num_generators())
                .map(|g| module.generator_element(g))
                .collect(),
        }
    }

    /// -identity on one copy, identity elsewhere.
    pub fn neg_identity_on_copy(module: &BlanchfieldModule, copy: usize) -> Self {
        let images = (0..module.num_generators())
            .map(|g| {
                let e = module.generator_element(g);
                if module.generator_copy(g) == copy {
                    e.scale(&-Rat::one())
                } else {
                    e
                }
            })
            .collect();
        ModuleAutomorphism {
            name: format!("-id@{}", module.copies()[copy].tag),
            images,
        }
    }

    /// Multiplication by c * t^k on one copy, identity elsewhere.
    pub fn scale_copy(
        module: &BlanchfieldModule,
        copy: usize,
        c: Rat,
        k: i64,
    ) -> Result<Self> {
        let mono = LaurentPoly::monomial(c.clone(), k);
        let images = (0..module.num_generators())
            .map(|g| {
                let e = module.generator_element(g);
                if module.generator_copy(g) == copy {
                    e.scale_poly(&mono, module)
                } else {
                    Ok(e)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleAutomorphism {
            name: format!("{}*t^{}@{}", c, k, module.copies()[copy].tag),
            images,
        })
    }

    /// Permutation automorphism exchanging two isomorphic copies.
    pub fn permutation(module: &BlanchfieldModule, copy_i: usize, copy_j: usize) -> Result<Self> {
        let gi = module.generators_of_copy(copy_i);
        let gj = module.generators_of_copy(copy_j);
        if module.copies()[copy_i].blocks != module.copies()[copy_j].blocks {
            return Err(Error::DimensionMismatch(
                "permutation needs isomorphic copies".into(),
            ));
        }
        let images = (0..module.num_generators())
            .map(|g| {
                if let Some(p) = gi.iter().position(|&x| x == g) {
                    module.generator_element(gj[p])
                } else if let Some(p) = gj.iter().position(|&x| x == g) {
                    module.generator_element(gi[p])
                } else {
                    module.generator_element(g)
                }
            })
            .collect();
        Ok(ModuleAutomorphism {
            name: format!(
                "swap@{},{}",
                module.copies()[copy_i].tag,
                module.copies()[copy_j].tag
            ),
            images,
        })
    }

    /// Rotation mixing two isomorphic copies: γ in copy i goes to
    /// x γ + y ξ(γ), γ in copy j to y ξ^{-1}(γ) - x γ, with x² + y² = 1.
    pub fn chi(
        module: &BlanchfieldModule,
        copy_i: usize,
        copy_j: usize,
        x: Rat,
        y: Rat,
    ) -> Result<Self> {
        if &x * &x + &y * &y != Rat::one() {
            return Err(Error::Invalid("chi needs x^2 + y^2 = 1".into()));
        }
        let gi = module.generators_of_copy(copy_i);
        let gj = module.generators_of_copy(copy_j);
        if module.copies()[copy_i].blocks != module.copies()[copy_j].blocks {
            return Err(Error::DimensionMismatch("chi needs isomorphic copies".into()));
        }
        let images = (0..module.num_generators())
            .map(|g| {
                if let Some(p) = gi.iter().position(|&x| x == g) {
                    let own = module.generator_element(g).scale(&x);
                    let cross = module.generator_element(gj[p]).scale(&y);
                    own.add(&cross)
                } else if let Some(p) = gj.iter().position(|&x| x == g) {
                    let cross = module.generator_element(gi[p]).scale(&y);
                    let own = module.generator_element(g).scale(&-x.clone());
                    cross.add(&own)
                } else {
                    module.generator_element(g)
                }
            })
            .collect();
        Ok(ModuleAutomorphism {
            name: format!(
                "chi@{},{}",
                module.copies()[copy_i].tag,
                module.copies()[copy_j].tag
            ),
            images,
        })
    }

    pub fn apply(&self, module: &BlanchfieldModule, e: &ModuleElement) -> Result<ModuleElement> {
        module.apply_map(&self.images, e)
    }

    /// Checks that the map is well-defined on the block orders, preserves
    /// the pairing on all generator pairs, and is invertible (by exact rank
    /// over the underlying Q-vector space).
    pub fn verify(&self, module: &BlanchfieldModule) -> Result<bool> {
        let n = module.num_generators();
        if self.images.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "automorphism has {} images, module has {} generators",
                self.images.len(),
                n
            )));
        }
        for img in &self.images {
            if img.coords.len() != n {
                return Err(Error::DimensionMismatch("image coordinate length".into()));
            }
        }
        // well-defined: order(g_j) * image_j = 0
        for j in 0..n {
            let d = module.generator_order(j).clone();
            let killed = self.images[j].scale_poly(&d, module)?;
            if !killed.is_zero() {
                return Ok(false);
            }
        }
        // pairing preserved on generators
        for i in 0..n {
            for j in 0..n {
                let before = module.pair(&module.generator_element(i), &module.generator_element(j))?;
                let after = module.pair(&self.images[i], &self.images[j])?;
                if before != after {
                    return Ok(false);
                }
            }
        }
        // invertible over Q
        let dim = module.q_dimension();
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for g in 0..n {
            let deg = module.generator_order(g).degree().unwrap_or(0);
            for a in 0..deg {
                let shifted = self.images[g].scale_poly(&LaurentPoly::monomial(Rat::one(), a), module)?;
                rows.push(element_q_coords(module, &shifted));
            }
        }
        Ok(rank_dense(rows) == dim)
    }
}

/// Flatten an element into Q-coordinates over the basis t^a g_i,
/// 0 <= a < deg(order_i).
fn element_q_coords(module: &BlanchfieldModule, e: &ModuleElement) -> Vec<Rat> {
    let mut out = Vec::new();
    for (g, c) in e.coords.iter().enumerate() {
        let deg = module.generator_order(g).degree().unwrap_or(0);
        for a in 0..deg {
            out.push(c.coeff(a));
        }
    }
    out
}

fn rank_dense(mut rows: Vec<Vec<Rat>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows.len()).find(|&r| !rows[r][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = Rat::one() / rows[rank][col].clone();
        for c in col..cols {
            let v = rows[rank][c].clone() * inv.clone();
            rows[rank][c] = v;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..cols {
                    let sub = rows[rank][c].clone() * f.clone();
                    rows[r][c] = rows[r][c].clone() - sub;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Solve b(γ_v, γ_w) ≡ f (mod Q[t^{±1}]) inside one copy: γ_v is the sum of
/// the copy's block generators (order = the copy annihilator), and γ_w is
/// solved blockwise after a partial-fraction split of f over the pairwise
/// coprime component moduli.
pub fn solve_pairing(
    module: &BlanchfieldModule,
    copy_tag: &str,
    f: &LaurentFraction,
) -> Result<(ModuleElement, ModuleElement)> {
    let copy = module.copy_index(copy_tag)?;
    let gamma_v = module.sum_of_generators(copy);
    if f.is_zero() {
        return Ok((gamma_v, module.zero_element()));
    }
    let delta = module.copy_annihilator(copy);
    if !f.denominator().divides(&delta) {
        return Err(Error::DenominatorOutsideModule {
            denominator: f.denominator().to_string(),
            annihilator: delta.to_string(),
        });
    }
    // reduced representative over the full annihilator: f ≡ r/delta
    let reduced = f.reduced_rep();
    if reduced.is_zero() {
        return Ok((gamma_v, module.zero_element()));
    }
    let cof = delta.exact_div(reduced.denominator())?;
    let r = (reduced.numerator() * &cof).reduce_mod(&delta)?;

    // group the copy's blocks into components with pairwise coprime moduli
    let gens = module.generators_of_copy(copy);
    let blocks: Vec<usize> = {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &g in &gens {
            let b = module.gens[g].block;
            if seen.insert(b) {
                out.push(b);
            }
        }
        out
    };
    let orders: Vec<LaurentPoly> = blocks
        .iter()
        .map(|&b| module.copies()[copy].blocks[b].order())
        .collect();
    let mut comp_of_block: Vec<usize> = (0..blocks.len()).collect();
    // union-find by gcd overlap
    loop {
        let mut changed = false;
        for i in 0..blocks.len() {
            for j in (i + 1)..blocks.len() {
                if comp_of_block[i] != comp_of_block[j] && !orders[i].gcd(&orders[j]).is_one() {
                    let (a, b) = (comp_of_block[i], comp_of_block[j]);
                    let target = a.min(b);
                    for c in comp_of_block.iter_mut() {
                        if *c == a || *c == b {
                            *c = target;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let comp_ids: Vec<usize> = {
        let set: BTreeSet<usize> = comp_of_block.iter().copied().collect();
        set.into_iter().collect()
    };

    let mut gamma_w = module.zero_element();
    for &cid in &comp_ids {
        let members: Vec<usize> = (0..blocks.len()).filter(|&i| comp_of_block[i] == cid).collect();
        let modulus = members
            .iter()
            .fold(LaurentPoly::one(), |acc, &i| acc.lcm(&orders[i]));
        // CRT projection of r/delta onto r_c/modulus
        let cofactor = delta.exact_div(&modulus)?;
        let inv = cofactor.invert_mod(&modulus)?;
        let r_c = (&r * &inv).reduce_mod(&modulus)?;
        if r_c.is_zero() {
            continue;
        }
        // solve on a block attaining the component modulus
        let target_i = members
            .iter()
            .copied()
            .find(|&i| orders[i] == modulus)
            .ok_or_else(|| Error::UnsupportedComponent(modulus.to_string()))?;
        let block_idx = blocks[target_i];
        let block = &module.copies()[copy].blocks[block_idx];
        match block {
            BlockSpec::Cyclic {
                pi, n, self_pairing, ..
            } => {
                // pairing value P/π^n = q/modulus in canonical form
                let base = LaurentFraction::new(self_pairing.clone(), pi.pow(*n))?;
                debug_assert_eq!(base.denominator(), &modulus);
                let s = (&r_c * &base.numerator().invert_mod(&modulus)?).reduce_mod(&modulus)?;
                let q = s.bar().reduce_mod(&modulus)?;
                let gen = gens
                    .iter()
                    .copied()
                    .find(|&g| module.gens[g].block == block_idx)
                    .expect("generator of block");
                gamma_w.coords[gen] = q;
            }
            BlockSpec::Hyperbolic { .. } => {
                // b(ρ+ρ', Q'ρ') = bar(Q')/(t+1)^m
                let q = r_c.bar().reduce_mod(&modulus)?;
                let gen1 = gens
                    .iter()
                    .copied()
                    .find(|&g| module.gens[g].block == block_idx && module.gens[g].slot == 1)
                    .expect("second hyperbolic generator");
                gamma_w.coords[gen1] = q;
            }
        }
    }

    debug_assert!({
        let achieved = module.pair(&gamma_v, &gamma_w)?;
        achieved == f.reduced_rep()
    });
    Ok((gamma_v, gamma_w))
}

/// One 2x2 matrix of integral residues: the images of (γ, η) are
/// (Pγ + Qη, Rγ + Sη).
pub type IntegralMatrix = [LaurentPoly; 4];

/// Exhaustive scan for automorphisms of Z[t^{±1}]/(δ) γ ⊕ Z[t^{±1}]/(δ) η
/// with equal self-pairings: enumerates integer-coefficient residues
/// P, Q, R, S of degree <= degree_bound with |coefficients| <= coeff_bound
/// and keeps the matrices satisfying
/// P bar(P) + Q bar(Q) = 1, R bar(R) + S bar(S) = 1, P bar(R) + Q bar(S) = 0
/// in Z[t^{±1}]/(δ). Complete within the given bounds only.
pub fn integral_automorphism_scan(
    delta: &LaurentPoly,
    degree_bound: usize,
    coeff_bound: i64,
) -> Result<Vec<IntegralMatrix>> {
    let dc = delta.canonical_associate();
    if dc.degree().unwrap_or(0) < 1 {
        return Err(Error::Invalid("scan needs a non-unit annihilator".into()));
    }
    let entries = enumerate_integer_polys(degree_bound, coeff_bound);
    let one = LaurentPoly::one();
    // rows (P, Q) with P bar P + Q bar Q = 1
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for (i, p) in entries.iter().enumerate() {
        for (j, q) in entries.iter().enumerate() {
            let lhs = &(p * &p.bar()) + &(q * &q.bar());
            if lhs.reduce_mod(&dc)? == one {
                rows.push((i, j));
            }
        }
    }
    let mut out = Vec::new();
    for &(pi, qi) in &rows {
        for &(ri, si) in &rows {
            let (p, q, r, s) = (&entries[pi], &entries[qi], &entries[ri], &entries[si]);
            let ortho = &(p * &r.bar()) + &(q * &s.bar());
            if ortho.reduce_mod(&dc)?.is_zero() {
                out.push([p.clone(), q.clone(), r.clone(), s.clone()]);
            }
        }
    }
    Ok(out)
}

fn enumerate_integer_polys(degree_bound: usize, coeff_bound: i64) -> Vec<LaurentPoly> {
    let mut out = Vec::new();
    let width = (2 * coeff_bound + 1) as usize;
    let count = width.pow(degree_bound as u32 + 1);
    for idx in 0..count {
        let mut rest = idx;
        let mut p = LaurentPoly::zero();
        for d in 0..=degree_bound {
            let c = (rest % width) as i64 - coeff_bound;
            rest /= width;
            p.add_term(d as i64, rat_int(c));
        }
        out.push(p);
    }
    out
}

/// Matrix composition in Z[t^{±1}]/(δ): apply `before`, then `after`.
pub fn compose_matrices(
    after: &IntegralMatrix,
    before: &IntegralMatrix,
    delta: &LaurentPoly,
) -> Result<IntegralMatrix> {
    let dc = delta.canonical_associate();
    let [pa, qa, ra, sa] = after;
    let [pb, qb, rb, sb] = before;
    let red = |x: LaurentPoly| x.reduce_mod(&dc);
    Ok([
        red(&(pb * pa) + &(qb * ra))?,
        red(&(pb * qa) + &(qb * sa))?,
        red(&(rb * pa) + &(sb * ra))?,
        red(&(rb * qa) + &(sb * sa))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn fr(s: &str) -> LaurentFraction {
        s.parse().unwrap()
    }

    fn cyclic_delta_module() -> BlanchfieldModule {
        BlanchfieldModule::single(vec![BlockSpec::cyclic(p("t - 1 + t^-1"), 1, p("1"))]).unwrap()
    }

    #[test]
    fn annihilator_examples() {
        let m = cyclic_delta_module();
        assert_eq!(m.annihilator(), p("t^2 - t + 1"));

        let sum = m.direct_sum(3).unwrap();
        assert_eq!(sum.annihilator(), p("t^2 - t + 1"));
        assert_eq!(sum.copies().len(), 3);

        let mixed = BlanchfieldModule::single(vec![
            BlockSpec::cyclic(p("t - 1 + t^-1"), 2, p("1")),
            BlockSpec::cyclic(p("t - 1 + t^-1"), 1, p("1")),
        ])
        .unwrap();
        assert_eq!(mixed.annihilator(), p("t^2 - t + 1").pow(2).monic());
    }

    #[test]
    fn hyperbolic_pairing_values() {
        let m = BlanchfieldModule::single(vec![BlockSpec::hyperbolic(3)]).unwrap();
        let rho = m.generator_element(0);
        let rho2 = m.generator_element(1);
        let b = m.pair(&rho, &rho2).unwrap();
        assert_eq!(b, fr("1 / t^3 + 3*t^2 + 3*t + 1"));
        assert!(m.pair(&rho, &rho).unwrap().is_zero());
        assert!(m.pair(&rho2, &rho2).unwrap().is_zero());
    }

    #[test]
    fn cross_copy_pairing_vanishes() {
        let m = cyclic_delta_module().direct_sum(2).unwrap();
        let a = m.generator_element(0);
        let b = m.generator_element(1);
        assert!(m.pair(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn sesquilinear_example() {
        // cyclic block with delta = t - 1 + t^-1, P = 1: pair(tγ, γ) = t/δ reduced
        let m = cyclic_delta_module();
        let g = m.generator_element(0);
        let tg = g.scale_poly(&p("t"), &m).unwrap();
        let got = m.pair(&tg, &g).unwrap();
        let expected = fr("t / t - 1 + t^-1").reduced_rep();
        assert_eq!(got, expected);
    }

    #[test]
    fn hermitian_on_generators() {
        let m = BlanchfieldModule::single(vec![
            BlockSpec::cyclic(p("t - 1 + t^-1"), 1, p("1")),
            BlockSpec::hyperbolic(1),
        ])
        .unwrap();
        for i in 0..m.num_generators() {
            for j in 0..m.num_generators() {
                let xy = m.pair(&m.generator_element(i), &m.generator_element(j)).unwrap();
                let yx = m.pair(&m.generator_element(j), &m.generator_element(i)).unwrap();
                assert_eq!(yx, xy.bar().reduced_rep());
            }
        }
    }

    #[test]
    fn automorphism_families_verify() {
        let m = cyclic_delta_module().direct_sum(2).unwrap();
        assert!(ModuleAutomorphism::neg_identity_on_copy(&m, 0).verify(&m).unwrap());
        assert!(ModuleAutomorphism::scale_copy(&m, 1, rat(1, 1), 3)
            .unwrap()
            .verify(&m)
            .unwrap());
        assert!(ModuleAutomorphism::permutation(&m, 0, 1).unwrap().verify(&m).unwrap());
        assert!(ModuleAutomorphism::chi(&m, 0, 1, rat(3, 5), rat(4, 5))
            .unwrap()
            .verify(&m)
            .unwrap());
    }

    #[test]
    fn doubling_is_not_an_automorphism() {
        let m = cyclic_delta_module();
        let double = ModuleAutomorphism {
            name: "2*id".into(),
            images: vec![m.generator_element(0).scale(&rat(2, 1))],
        };
        assert!(!double.verify(&m).unwrap());
    }

    #[test]
    fn solve_pairing_examples() {
        let m = cyclic_delta_module();
        let delta = fr("1 / t - 1 + t^-1");

        let (v, w) = solve_pairing(&m, "1", &delta).unwrap();
        assert_eq!(v, m.generator_element(0));
        assert_eq!(w, m.generator_element(0));

        let (v, w) = solve_pairing(&m, "1", &fr("t / t - 1 + t^-1")).unwrap();
        // t^-1 γ reduced mod t^2 - t + 1 is (1 - t) γ
        assert_eq!(w, ModuleElement::from_coords(vec![p("1 - t")]));
        let achieved = m.pair(&v, &w).unwrap();
        assert_eq!(achieved, fr("t / t - 1 + t^-1").reduced_rep());

        let (_, w) = solve_pairing(&m, "1", &LaurentFraction::zero()).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn solve_pairing_hyperbolic_and_mixed() {
        let m = BlanchfieldModule::single(vec![BlockSpec::hyperbolic(3)]).unwrap();
        let f = fr("t^2 - 2 / t^3 + 3*t^2 + 3*t + 1");
        let (v, w) = solve_pairing(&m, "1", &f).unwrap();
        assert_eq!(m.pair(&v, &w).unwrap(), f.reduced_rep());

        // mixed component: cyclic (t+2+t^-1)^1 and hyperbolic (t+1)^3 share
        // the radical t+1; the hyperbolic block attains the lcm (t+1)^3
        let mixed = BlanchfieldModule::single(vec![
            BlockSpec::cyclic(p("t + 2 + t^-1"), 1, p("1")),
            BlockSpec::hyperbolic(3),
        ])
        .unwrap();
        let f = fr("1 / t^3 + 3*t^2 + 3*t + 1");
        let (v, w) = solve_pairing(&mixed, "1", &f).unwrap();
        assert_eq!(mixed.pair(&v, &w).unwrap(), f.reduced_rep());
    }

    #[test]
    fn solve_pairing_rejects_bad_denominator() {
        let m = cyclic_delta_module();
        let err = solve_pairing(&m, "1", &fr("1 / t + 1"));
        assert!(matches!(err, Err(Error::DenominatorOutsideModule { .. })));
    }

    #[test]
    fn module_file_roundtrip() {
        let text = "copy 1\ncyclic pi=t-1+t^-1 n=1 P=1\nhyperbolic m=3\ncopy 2\ncyclic pi=t-1+t^-1 n=1 P=1\nhyperbolic m=3\n";
        let m = BlanchfieldModule::parse(text).unwrap();
        assert_eq!(m.copies().len(), 2);
        // serialization is a fixpoint and parses back to the same module
        let s = m.serialize();
        let m2 = BlanchfieldModule::parse(&s).unwrap();
        assert_eq!(m2, m);
        assert_eq!(m2.serialize(), s);
    }

    #[test]
    fn scan_units_of_quadratic_form() {
        // a^2 + ab + b^2 = 1 has exactly six integer solutions
        let delta = p("t - 1 + t^-1");
        let dc = delta.canonical_associate();
        let mut units = 0;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let q = LaurentPoly::from_int_terms(&[(1, a), (0, b)]);
                let val = &q * &q.bar();
                if val.reduce_mod(&dc).unwrap().is_one() {
                    units += 1;
                }
            }
        }
        assert_eq!(units, 6);
    }

    #[test]
    fn scan_structure() {
        let delta = p("t - 1 + t^-1");
        let sols = integral_automorphism_scan(&delta, 1, 2).unwrap();
        // every solution has P*Q = 0 and the full count is 72
        for m in &sols {
            assert!(m[0].is_zero() || m[1].is_zero());
            assert!(m[2].is_zero() || m[3].is_zero());
        }
        assert_eq!(sols.len(), 72);
    }

    #[test]
    fn scan_closed_under_composition() {
        let delta = p("t - 1 + t^-1");
        let sols = integral_automorphism_scan(&delta, 1, 1).unwrap();
        assert_eq!(sols.len(), 72);
        let reduced: BTreeSet<String> = sols
            .iter()
            .map(|m| format!("{}|{}|{}|{}", m[0], m[1], m[2], m[3]))
            .collect();
        for a in sols.iter().take(12) {
            for b in sols.iter().take(12) {
                let c = compose_matrices(a, b, &delta).unwrap();
                let key = format!("{}|{}|{}|{}", c[0], c[1], c[2], c[3]);
                assert!(reduced.contains(&key), "composition left the scan set");
            }
        }
    }
}
