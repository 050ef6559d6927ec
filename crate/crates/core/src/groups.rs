//! Finite groups built as direct products of cyclic and dihedral factors.
//!
//! Groups stay structured as factor lists so orders and indices are exact at
//! any size. Elements are only enumerated for coset work, under an order bound.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on group orders for element enumeration.
pub const DEFAULT_MAX_ORDER: u64 = 10_000;

/// Errors raised by group construction, embeddings and coset work.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cyclic factor needs order >= 1, got {0}")]
    BadCyclic(u64),
    #[error("dihedral factor needs m >= 2, got {0}")]
    BadDihedral(u64),
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    TooLarge { order: BigUint, bound: u64 },
    #[error("embedding has {rules} rules for {factors} source factors")]
    RuleCount { rules: usize, factors: usize },
    #[error("source factors {0} and {1} share a target factor")]
    SharedTarget(usize, usize),
    #[error("rule for source factor {factor} names missing target factor {target}")]
    MissingTarget { factor: usize, target: usize },
    #[error("rule for source factor {factor} does not fit the factor kinds")]
    KindMismatch { factor: usize },
    #[error("rule for source factor {factor} is not a homomorphism")]
    NotHomomorphism { factor: usize },
    #[error("rule for source factor {factor} is not injective")]
    NotInjective { factor: usize },
    #[error("embedding is not bijective")]
    NotBijective,
    #[error("element does not belong to the group")]
    ForeignElement,
    #[error("subset is not a subgroup")]
    NotSubgroup,
    #[error("embeddings do not compose: target of the first is not the source of the second")]
    Compose,
}

/// One direct factor: `Cyclic(b)` is C_b, `Dihedral(m)` is D_2m of order 2m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Cyclic(u64),
    Dihedral(u64),
}

impl Factor {
    /// Order of the factor.
    pub fn order(&self) -> u64 {
        match *self {
            Factor::Cyclic(b) => b,
            Factor::Dihedral(m) => 2 * m,
        }
    }

    fn modulus(&self) -> u64 {
        match *self {
            Factor::Cyclic(b) | Factor::Dihedral(b) => b,
        }
    }

    fn check(&self) -> Result<(), GroupError> {
        match *self {
            Factor::Cyclic(0) => Err(GroupError::BadCyclic(0)),
            Factor::Dihedral(m) if m < 2 => Err(GroupError::BadDihedral(m)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Factor::Cyclic(b) => write!(f, "C{b}"),
            Factor::Dihedral(m) => write!(f, "D{}", 2 * m),
        }
    }
}

/// A finite group given as an ordered direct product of factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct StructuredGroup {
    factors: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct RawGroup {
    factors: Vec<Factor>,
}

impl TryFrom<RawGroup> for StructuredGroup {
    type Error = GroupError;

    fn try_from(raw: RawGroup) -> Result<Self, Self::Error> {
        StructuredGroup::new(raw.factors)
    }
}

impl From<StructuredGroup> for RawGroup {
    fn from(g: StructuredGroup) -> Self {
        RawGroup { factors: g.factors }
    }
}

/// One coordinate of an element: a dihedral element is `s^flip r^rot`; cyclic
/// coordinates never flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coord {
    pub flip: bool,
    pub rot: u64,
}

/// Group element as per-factor coordinates; ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub Vec<Coord>);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if c.flip {
                write!(f, "s")?;
            }
            write!(f, "{}", c.rot)?;
        }
        write!(f, ")")
    }
}

impl StructuredGroup {
    /// Validated group from a factor list.
    pub fn new(factors: Vec<Factor>) -> Result<Self, GroupError> {
        for f in &factors {
            f.check()?;
        }
        Ok(StructuredGroup { factors })
    }

    /// The trivial group with no factors.
    pub fn trivial() -> Self {
        StructuredGroup::default()
    }

    /// C_b.
    pub fn cyclic(b: u64) -> Self {
        StructuredGroup::new(vec![Factor::Cyclic(b)]).expect("cyclic order >= 1")
    }

    /// D_2m.
    pub fn dihedral(m: u64) -> Self {
        StructuredGroup::new(vec![Factor::Dihedral(m)]).expect("dihedral m >= 2")
    }

    /// C_b^k.
    pub fn cyclic_power(b: u64, k: usize) -> Self {
        StructuredGroup::new(vec![Factor::Cyclic(b); k]).expect("cyclic order >= 1")
    }

    /// Direct product `self × other`, factors of `self` first.
    pub fn product(&self, other: &StructuredGroup) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        StructuredGroup { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Exact order.
    pub fn order(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * BigUint::from(f.order()))
    }

    /// Order as a machine integer when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(|f| f.order() == 1)
    }

    pub fn identity(&self) -> Element {
        Element(vec![Coord::default(); self.factors.len()])
    }

    /// Whether `x` has the right shape and coordinates in range.
    pub fn contains(&self, x: &Element) -> bool {
        x.0.len() == self.factors.len()
            && x.0.iter().zip(&self.factors).all(|(c, f)| match *f {
                Factor::Cyclic(b) => !c.flip && c.rot < b,
                Factor::Dihedral(m) => c.rot < m,
            })
    }

    /// Product `a · b`.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), f)| {
                    let n = f.modulus();
                    let lhs = if y.flip { (n - x.rot % n) % n } else { x.rot };
                    Coord { flip: x.flip ^ y.flip, rot: (lhs + y.rot) % n }
                })
                .collect(),
        )
    }

    pub fn inverse(&self, a: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&self.factors)
                .map(|(x, f)| {
                    if x.flip {
                        *x
                    } else {
                        let n = f.modulus();
                        Coord { flip: false, rot: (n - x.rot % n) % n }
                    }
                })
                .collect(),
        )
    }

    /// Generators: one per cyclic factor, rotation and reflection per dihedral factor.
    pub fn generators(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            let mut r = self.identity();
            r.0[i].rot = 1 % f.modulus();
            out.push(r);
            if let Factor::Dihedral(_) = f {
                let mut s = self.identity();
                s.0[i].flip = true;
                out.push(s);
            }
        }
        out
    }

    /// Every element in increasing order, refusing groups above `max_order`.
    pub fn elements(&self, max_order: u64) -> Result<Vec<Element>, GroupError> {
        let order = self.order();
        if order > BigUint::from(max_order) {
            return Err(GroupError::TooLarge { order, bound: max_order });
        }
        let mut out = vec![Element(Vec::with_capacity(self.factors.len()))];
        for f in &self.factors {
            let mut coords = Vec::new();
            let flips: &[bool] = match f {
                Factor::Cyclic(_) => &[false],
                Factor::Dihedral(_) => &[false, true],
            };
            for &flip in flips {
                for rot in 0..f.modulus() {
                    coords.push(Coord { flip, rot });
                }
            }
            let mut next = Vec::with_capacity(out.len() * coords.len());
            for prefix in &out {
                for c in &coords {
                    let mut e = prefix.clone();
                    e.0.push(*c);
                    next.push(e);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

impl fmt::Display for StructuredGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Image rule for one source factor.
///
/// * `Trivial`: everything maps to the identity.
/// * `Cyclic`: g ↦ h^mult into a cyclic target factor.
/// * `Rotation`: g ↦ r^mult into a dihedral target factor.
/// * `Reflection`: order-2 generator ↦ s r^index.
/// * `Dihedral`: r ↦ r^twist, s ↦ s r^offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum FactorRule {
    Trivial,
    Cyclic { target: usize, mult: u64 },
    Rotation { target: usize, mult: u64 },
    Reflection { target: usize, index: u64 },
    Dihedral { target: usize, twist: u64, offset: u64 },
}

impl FactorRule {
    pub fn target(&self) -> Option<usize> {
        match *self {
            FactorRule::Trivial => None,
            FactorRule::Cyclic { target, .. }
            | FactorRule::Rotation { target, .. }
            | FactorRule::Reflection { target, .. }
            | FactorRule::Dihedral { target, .. } => Some(target),
        }
    }

    fn retarget(self, t: usize) -> Self {
        match self {
            FactorRule::Trivial => FactorRule::Trivial,
            FactorRule::Cyclic { mult, .. } => FactorRule::Cyclic { target: t, mult },
            FactorRule::Rotation { mult, .. } => FactorRule::Rotation { target: t, mult },
            FactorRule::Reflection { index, .. } => FactorRule::Reflection { target: t, index },
            FactorRule::Dihedral { twist, offset, .. } => {
                FactorRule::Dihedral { target: t, twist, offset }
            }
        }
    }

    /// Identity rule between equal factors.
    pub fn identity(target: usize, factor: Factor) -> Self {
        match factor {
            Factor::Cyclic(_) => FactorRule::Cyclic { target, mult: 1 },
            Factor::Dihedral(_) => FactorRule::Dihedral { target, twist: 1, offset: 0 },
        }
    }
}

/// Homomorphism between structured groups given factor by factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    source: StructuredGroup,
    target: StructuredGroup,
    rules: Vec<FactorRule>,
}

impl Embedding {
    /// Checked homomorphism; injectivity is not required here.
    pub fn new(
        source: StructuredGroup,
        target: StructuredGroup,
        rules: Vec<FactorRule>,
    ) -> Result<Self, GroupError> {
        if rules.len() != source.factors.len() {
            return Err(GroupError::RuleCount {
                rules: rules.len(),
                factors: source.factors.len(),
            });
        }
        let mut used: Vec<Option<usize>> = vec![None; target.factors.len()];
        for (i, (rule, f)) in rules.iter().zip(&source.factors).enumerate() {
            let Some(t) = rule.target() else { continue };
            let Some(tf) = target.factors.get(t) else {
                return Err(GroupError::MissingTarget { factor: i, target: t });
            };
            if let Some(j) = used[t] {
                return Err(GroupError::SharedTarget(j, i));
            }
            used[t] = Some(i);
            let hom = match (*rule, *f, *tf) {
                (FactorRule::Cyclic { mult, .. }, Factor::Cyclic(b), Factor::Cyclic(d)) => {
                    (mult * b) % d == 0
                }
                (FactorRule::Rotation { mult, .. }, Factor::Cyclic(b), Factor::Dihedral(m)) => {
                    (mult * b) % m == 0
                }
                (FactorRule::Reflection { .. }, Factor::Cyclic(b), Factor::Dihedral(_)) => {
                    b % 2 == 0
                }
                (
                    FactorRule::Dihedral { twist, .. },
                    Factor::Dihedral(m),
                    Factor::Dihedral(mt),
                ) => (twist * m) % mt == 0,
                _ => return Err(GroupError::KindMismatch { factor: i }),
            };
            if !hom {
                return Err(GroupError::NotHomomorphism { factor: i });
            }
        }
        let rules = rules
            .into_iter()
            .zip(&source.factors)
            .map(|(r, f)| normalize(r, *f, &target))
            .collect();
        Ok(Embedding { source, target, rules })
    }

    /// Checked injective homomorphism.
    pub fn monomorphism(
        source: StructuredGroup,
        target: StructuredGroup,
        rules: Vec<FactorRule>,
    ) -> Result<Self, GroupError> {
        let e = Embedding::new(source, target, rules)?;
        if let Some(i) = e.first_non_injective_factor() {
            return Err(GroupError::NotInjective { factor: i });
        }
        Ok(e)
    }

    /// Identity map of `g`.
    pub fn identity(g: &StructuredGroup) -> Self {
        let rules = g
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| FactorRule::identity(i, *f))
            .collect();
        Embedding { source: g.clone(), target: g.clone(), rules }
    }

    /// Inclusion sending source factor `i` identically onto target factor
    /// `positions[i]`; paired factors must be equal.
    pub fn factor_inclusion(
        source: &StructuredGroup,
        target: &StructuredGroup,
        positions: &[usize],
    ) -> Result<Self, GroupError> {
        let mut rules = Vec::with_capacity(positions.len());
        for (i, (&p, f)) in positions.iter().zip(&source.factors).enumerate() {
            match target.factors.get(p) {
                Some(tf) if tf == f => rules.push(FactorRule::identity(p, *f)),
                Some(_) => return Err(GroupError::KindMismatch { factor: i }),
                None => return Err(GroupError::MissingTarget { factor: i, target: p }),
            }
        }
        Embedding::monomorphism(source.clone(), target.clone(), rules)
    }

    /// Inclusion of `source` onto the leading factors of `target`.
    pub fn prefix_inclusion(
        source: &StructuredGroup,
        target: &StructuredGroup,
    ) -> Result<Self, GroupError> {
        let positions: Vec<usize> = (0..source.factors.len()).collect();
        Embedding::factor_inclusion(source, target, &positions)
    }

    pub fn source(&self) -> &StructuredGroup {
        &self.source
    }

    pub fn target(&self) -> &StructuredGroup {
        &self.target
    }

    pub fn rules(&self) -> &[FactorRule] {
        &self.rules
    }

    fn first_non_injective_factor(&self) -> Option<usize> {
        self.rules.iter().zip(&self.source.factors).position(|(rule, f)| {
            let ok = match (*rule, *f) {
                (FactorRule::Trivial, f) => f.order() == 1,
                (FactorRule::Cyclic { target, mult }, Factor::Cyclic(b))
                | (FactorRule::Rotation { target, mult }, Factor::Cyclic(b)) => {
                    let d = self.target.factors[target].modulus();
                    d / mult.gcd(&d) == b
                }
                (FactorRule::Reflection { .. }, Factor::Cyclic(b)) => b == 2,
                (FactorRule::Dihedral { target, twist, .. }, Factor::Dihedral(m)) => {
                    let d = self.target.factors[target].modulus();
                    d / twist.gcd(&d) == m
                }
                _ => false,
            };
            !ok
        })
    }

    pub fn is_injective(&self) -> bool {
        self.first_non_injective_factor().is_none()
    }

    /// Index [target : image] for an injective map.
    pub fn index(&self) -> BigUint {
        self.target.order() / self.source.order()
    }

    /// Image of one element.
    pub fn apply(&self, x: &Element) -> Result<Element, GroupError> {
        if !self.source.contains(x) {
            return Err(GroupError::ForeignElement);
        }
        let mut out = self.target.identity();
        for (c, rule) in x.0.iter().zip(&self.rules) {
            match *rule {
                FactorRule::Trivial => {}
                FactorRule::Cyclic { target, mult } | FactorRule::Rotation { target, mult } => {
                    let n = self.target.factors[target].modulus();
                    out.0[target] = Coord { flip: false, rot: (mult * c.rot) % n };
                }
                FactorRule::Reflection { target, index } => {
                    if c.rot % 2 == 1 {
                        out.0[target] = Coord { flip: true, rot: index };
                    }
                }
                FactorRule::Dihedral { target, twist, offset } => {
                    let n = self.target.factors[target].modulus();
                    let shift = if c.flip { offset } else { 0 };
                    out.0[target] = Coord { flip: c.flip, rot: (shift + twist * c.rot) % n };
                }
            }
        }
        Ok(out)
    }

    /// Image of the whole source, sorted.
    pub fn image_subgroup(&self, max_order: u64) -> Result<Vec<Element>, GroupError> {
        let mut image: Vec<Element> = self
            .source
            .elements(max_order)?
            .iter()
            .map(|x| self.apply(x))
            .collect::<Result<_, _>>()?;
        image.sort();
        image.dedup();
        Ok(image)
    }

    /// The composite `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding, GroupError> {
        if self.target != next.source {
            return Err(GroupError::Compose);
        }
        let rules = self
            .rules
            .iter()
            .map(|a| {
                let Some(j) = a.target() else { return FactorRule::Trivial };
                let b = next.rules[j];
                let Some(k) = b.target() else { return FactorRule::Trivial };
                match (*a, b) {
                    (FactorRule::Cyclic { mult: x, .. }, FactorRule::Cyclic { mult: y, .. }) => {
                        FactorRule::Cyclic { target: k, mult: x * y }
                    }
                    (FactorRule::Cyclic { mult: x, .. }, FactorRule::Rotation { mult: y, .. }) => {
                        FactorRule::Rotation { target: k, mult: x * y }
                    }
                    (FactorRule::Cyclic { mult: x, .. }, FactorRule::Reflection { index, .. }) => {
                        if x % 2 == 1 {
                            FactorRule::Reflection { target: k, index }
                        } else {
                            FactorRule::Trivial
                        }
                    }
                    (FactorRule::Rotation { mult: x, .. }, FactorRule::Dihedral { twist, .. }) => {
                        FactorRule::Rotation { target: k, mult: x * twist }
                    }
                    (
                        FactorRule::Reflection { index, .. },
                        FactorRule::Dihedral { twist, offset, .. },
                    ) => FactorRule::Reflection { target: k, index: offset + twist * index },
                    (
                        FactorRule::Dihedral { twist: t1, offset: o1, .. },
                        FactorRule::Dihedral { twist: t2, offset: o2, .. },
                    ) => FactorRule::Dihedral { target: k, twist: t1 * t2, offset: o2 + t2 * o1 },
                    _ => FactorRule::Trivial,
                }
            })
            .collect();
        Embedding::new(self.source.clone(), next.target.clone(), rules)
    }

    /// Whether both maps send every source generator to the same element.
    pub fn agrees_with(&self, other: &Embedding) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.source.generators().iter().all(|g| {
                matches!((self.apply(g), other.apply(g)), (Ok(a), Ok(b)) if a == b)
            })
    }

    /// `prefix × self`, identity on the prefix factors.
    pub fn with_prefix(&self, prefix: &StructuredGroup) -> Embedding {
        let shift = prefix.factors.len();
        let mut rules: Vec<FactorRule> = prefix
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| FactorRule::identity(i, *f))
            .collect();
        rules.extend(self.rules.iter().map(|r| match r.target() {
            Some(t) => r.retarget(t + shift),
            None => FactorRule::Trivial,
        }));
        Embedding {
            source: prefix.product(&self.source),
            target: prefix.product(&self.target),
            rules,
        }
    }

    /// `self × suffix`, identity on the suffix factors.
    pub fn with_suffix(&self, suffix: &StructuredGroup) -> Embedding {
        let base = self.target.factors.len();
        let mut rules = self.rules.clone();
        rules.extend(
            suffix
                .factors
                .iter()
                .enumerate()
                .map(|(i, f)| FactorRule::identity(base + i, *f)),
        );
        Embedding {
            source: self.source.product(suffix),
            target: self.target.product(suffix),
            rules,
        }
    }

    /// Inverse of a bijective embedding.
    pub fn inverse(&self) -> Result<Embedding, GroupError> {
        if !self.is_injective() || self.source.order() != self.target.order() {
            return Err(GroupError::NotBijective);
        }
        let mut rules = vec![FactorRule::Trivial; self.target.factors.len()];
        for (i, rule) in self.rules.iter().enumerate() {
            let Some(t) = rule.target() else { continue };
            let n = self.target.factors[t].modulus();
            rules[t] = match *rule {
                FactorRule::Cyclic { mult, .. } => {
                    FactorRule::Cyclic { target: i, mult: mod_inverse(mult, n).ok_or(GroupError::NotBijective)? }
                }
                FactorRule::Dihedral { twist, offset, .. } => {
                    let inv = mod_inverse(twist, n).ok_or(GroupError::NotBijective)?;
                    let back = (n - (inv * offset) % n) % n;
                    FactorRule::Dihedral { target: i, twist: inv, offset: back }
                }
                _ => return Err(GroupError::NotBijective),
            };
        }
        for (t, f) in self.target.factors.iter().enumerate() {
            if rules[t] == FactorRule::Trivial && f.order() != 1 {
                return Err(GroupError::NotBijective);
            }
        }
        Embedding::monomorphism(self.target.clone(), self.source.clone(), rules)
    }
}

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (a, n) = (a as i128 % n as i128, n as i128);
    let (mut old_r, mut r) = (a, n);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(n) as u64)
}

fn normalize(rule: FactorRule, source: Factor, target: &StructuredGroup) -> FactorRule {
    if source.order() == 1 {
        return FactorRule::Trivial;
    }
    let Some(t) = rule.target() else { return rule };
    let n = target.factors[t].modulus();
    match rule {
        FactorRule::Trivial => FactorRule::Trivial,
        FactorRule::Cyclic { mult, .. } => FactorRule::Cyclic { target: t, mult: mult % n },
        FactorRule::Rotation { mult, .. } => FactorRule::Rotation { target: t, mult: mult % n },
        FactorRule::Reflection { index, .. } => FactorRule::Reflection { target: t, index: index % n },
        FactorRule::Dihedral { twist, offset, .. } => {
            FactorRule::Dihedral { target: t, twist: twist % n, offset: offset % n }
        }
    }
}

/// A left coset `representative · H` with its sorted elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub representative: Element,
    pub elements: Vec<Element>,
}

/// Left cosets of the subgroup `h` in `g`, ordered by least representative.
pub fn cosets(
    g: &StructuredGroup,
    h: &[Element],
    max_order: u64,
) -> Result<Vec<Coset>, GroupError> {
    let all = g.elements(max_order)?;
    let sub: BTreeSet<&Element> = h.iter().collect();
    if !sub.contains(&g.identity()) || h.iter().any(|x| !g.contains(x)) {
        return Err(GroupError::NotSubgroup);
    }
    for a in h {
        for b in h {
            if !sub.contains(&g.multiply(a, b)) {
                return Err(GroupError::NotSubgroup);
            }
        }
    }
    let mut seen: BTreeSet<Element> = BTreeSet::new();
    let mut out = Vec::new();
    for x in all {
        if seen.contains(&x) {
            continue;
        }
        let mut elements: Vec<Element> = h.iter().map(|y| g.multiply(&x, y)).collect();
        elements.sort();
        seen.extend(elements.iter().cloned());
        out.push(Coset { representative: elements[0].clone(), elements });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(StructuredGroup::trivial().order(), BigUint::one());
        assert_eq!(StructuredGroup::cyclic_power(2, 2).order(), BigUint::from(4u32));
        let g = StructuredGroup::cyclic(5).product(&StructuredGroup::cyclic_power(2, 2));
        assert_eq!(g.order(), BigUint::from(20u32));
    }

    #[test]
    fn rejects_degenerate_dihedral() {
        assert_eq!(StructuredGroup::new(vec![Factor::Dihedral(1)]), Err(GroupError::BadDihedral(1)));
    }

    #[test]
    fn dihedral_relations() {
        let g = StructuredGroup::dihedral(5);
        let r = Element(vec![Coord { flip: false, rot: 1 }]);
        let s = Element(vec![Coord { flip: true, rot: 0 }]);
        let srs = g.multiply(&g.multiply(&s, &r), &s);
        assert_eq!(srs, g.inverse(&r));
        assert_eq!(g.multiply(&s, &s), g.identity());
    }

    #[test]
    fn reflection_embedding() {
        let e = Embedding::monomorphism(
            StructuredGroup::cyclic(2),
            StructuredGroup::dihedral(3),
            vec![FactorRule::Reflection { target: 0, index: 1 }],
        )
        .unwrap();
        let g = Element(vec![Coord { flip: false, rot: 1 }]);
        assert_eq!(e.apply(&g).unwrap(), Element(vec![Coord { flip: true, rot: 1 }]));
    }

    #[test]
    fn rotation_image_has_index_two() {
        let e = Embedding::monomorphism(
            StructuredGroup::cyclic(4),
            StructuredGroup::dihedral(4),
            vec![FactorRule::Rotation { target: 0, mult: 1 }],
        )
        .unwrap();
        assert_eq!(e.image_subgroup(DEFAULT_MAX_ORDER).unwrap().len(), 4);
        assert_eq!(e.index(), BigUint::from(2u32));
    }

    #[test]
    fn non_injective_detected() {
        let e = Embedding::new(
            StructuredGroup::cyclic(4),
            StructuredGroup::cyclic(2),
            vec![FactorRule::Cyclic { target: 0, mult: 1 }],
        )
        .unwrap();
        assert!(!e.is_injective());
        assert!(Embedding::monomorphism(
            StructuredGroup::cyclic(4),
            StructuredGroup::cyclic(2),
            vec![FactorRule::Cyclic { target: 0, mult: 1 }],
        )
        .is_err());
    }

    #[test]
    fn coset_counts() {
        let c2 = StructuredGroup::cyclic(2);
        let one = Embedding::new(StructuredGroup::trivial(), c2.clone(), vec![]).unwrap();
        let cs = cosets(&c2, &one.image_subgroup(100).unwrap(), 100).unwrap();
        assert_eq!(cs.len(), 2);
        let d6 = StructuredGroup::dihedral(3);
        let refl = Embedding::monomorphism(
            c2,
            d6.clone(),
            vec![FactorRule::Reflection { target: 0, index: 0 }],
        )
        .unwrap();
        let cs = cosets(&d6, &refl.image_subgroup(100).unwrap(), 100).unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs.iter().all(|c| c.elements.len() == 2));
    }

    #[test]
    fn inverse_of_twisted_dihedral() {
        let d = StructuredGroup::dihedral(5);
        let e = Embedding::monomorphism(
            d.clone(),
            d.clone(),
            vec![FactorRule::Dihedral { target: 0, twist: 2, offset: 3 }],
        )
        .unwrap();
        let back = e.inverse().unwrap();
        assert!(e.then(&back).unwrap().agrees_with(&Embedding::identity(&d)));
    }
}
