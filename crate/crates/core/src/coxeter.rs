//! Coxeter matrices, spherical subsets, nerves, chambers and diagnostics.
//!
//! Subsets of generators are bitmasks; colex order is numeric mask order.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cog::{Color, Scwol, VertexInfo};

/// Largest rank accepted (subsets are 64-bit masks).
pub const MAX_RANK: usize = 64;
/// Largest rank for the flexibility search.
pub const FLEX_MAX_RANK: usize = 12;
/// Default budget of explored words for Tits rewriting.
pub const DEFAULT_WORD_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxeterError {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("declared rank {declared} does not match {rows} rows")]
    RankMismatch { declared: usize, rows: usize },
    #[error("diagonal entry ({0},{0}) must be 1")]
    BadDiagonal(usize),
    #[error("off-diagonal entry ({0},{1}) must be at least 2")]
    OffDiagonal(usize, usize),
    #[error("entry ({0},{1}) differs from entry ({1},{0})")]
    Asymmetric(usize, usize),
    #[error("rank {0} exceeds the supported maximum {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("rank {0} exceeds the flexibility search bound {FLEX_MAX_RANK}")]
    SearchBound(usize),
    #[error("generator {0} is out of range")]
    BadGenerator(usize),
    #[error("entry {0:?} is neither an integer nor \"inf\"")]
    BadEntry(String),
    #[error("word rewriting explored more than {0} words")]
    WordBudget(usize),
    #[error("subset is not spherical")]
    NotSpherical,
    #[error("matrix is not right-angled at ({0},{1})")]
    NotRightAngled(usize, usize),
}

/// Symmetric Coxeter matrix; `None` encodes ∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    m: Vec<Vec<Option<u64>>>,
}

/// Matrix entry in documents: an integer or the string "inf".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawEntry {
    Int(u64),
    Word(String),
}

/// Document form `{"n": int, "m": [[int|"inf"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterDocument {
    pub n: usize,
    pub m: Vec<Vec<RawEntry>>,
}

/// Validate a raw grid into a Coxeter matrix.
pub fn validate_matrix(raw: &[Vec<Option<u64>>]) -> Result<CoxeterMatrix, CoxeterError> {
    let n = raw.len();
    if n > MAX_RANK {
        return Err(CoxeterError::RankTooLarge(n));
    }
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(CoxeterError::NotSquare { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        if raw[i][i] != Some(1) {
            return Err(CoxeterError::BadDiagonal(i));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if raw[i][j] != raw[j][i] {
                return Err(CoxeterError::Asymmetric(i.min(j), i.max(j)));
            }
            if matches!(raw[i][j], Some(v) if v < 2) {
                return Err(CoxeterError::OffDiagonal(i, j));
            }
        }
    }
    Ok(CoxeterMatrix { m: raw.to_vec() })
}

impl CoxeterDocument {
    pub fn to_matrix(&self) -> Result<CoxeterMatrix, CoxeterError> {
        if self.m.len() != self.n {
            return Err(CoxeterError::RankMismatch { declared: self.n, rows: self.m.len() });
        }
        let grid = self
            .m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        RawEntry::Int(v) => Ok(Some(*v)),
                        RawEntry::Word(w) if w == "inf" => Ok(None),
                        RawEntry::Word(w) => Err(CoxeterError::BadEntry(w.clone())),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        validate_matrix(&grid)
    }

    pub fn from_matrix(m: &CoxeterMatrix) -> Self {
        CoxeterDocument {
            n: m.rank(),
            m: m.m
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| match e {
                            Some(v) => RawEntry::Int(*v),
                            None => RawEntry::Word("inf".into()),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Bitmask of a generator list.
pub fn mask_of(t: &[usize]) -> u64 {
    t.iter().fold(0u64, |acc, &i| acc | (1u64 << i))
}

/// Sorted generator list of a bitmask.
pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Display label of a subset, e.g. `{0,2}`.
pub fn type_label(mask: u64) -> String {
    let items: Vec<String> = members(mask).iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Nerve: nonempty spherical subsets and the labelled 1-skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    pub matrix: CoxeterMatrix,
    /// Nonempty spherical subsets in colex order.
    pub simplices: Vec<Vec<usize>>,
    /// Edges `(i, j, m_ij)` with `i < j`.
    pub edges: Vec<(usize, usize, u64)>,
}

impl Nerve {
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.matrix.rank()).collect()
    }

    /// Whether every nonempty subset of a simplex is present.
    pub fn is_downward_closed(&self) -> bool {
        let set: HashSet<u64> = self.simplices.iter().map(|s| mask_of(s)).collect();
        set.iter().all(|&s| {
            members(s)
                .iter()
                .all(|&i| s == 1 << i || set.contains(&(s & !(1 << i))))
        })
    }
}

/// A free factor: generators of one nerve component and its sub-matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub generators: Vec<usize>,
    pub matrix: CoxeterMatrix,
}

/// Number of ends of the Coxeter group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndsCount {
    Zero,
    One,
    Two,
    Infinity,
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

impl CoxeterMatrix {
    pub fn rank(&self) -> usize {
        self.m.len()
    }

    /// Entry `m_ij`, `None` for ∞.
    pub fn entry(&self, i: usize, j: usize) -> Option<u64> {
        self.m[i][j]
    }

    pub fn rows(&self) -> &[Vec<Option<u64>>] {
        &self.m
    }

    /// Free system with all off-diagonal entries ∞.
    pub fn free(n: usize) -> Self {
        let m = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Some(1) } else { None }).collect())
            .collect();
        CoxeterMatrix { m }
    }

    /// System whose nerve is the `len`-cycle with constant label.
    pub fn cycle(len: usize, label: u64) -> Self {
        let mut m = CoxeterMatrix::free(len).m;
        for i in 0..len {
            let j = (i + 1) % len;
            m[i][j] = Some(label);
            m[j][i] = Some(label);
        }
        CoxeterMatrix { m }
    }

    /// Rank-3 system with labels `m01, m12, m02`.
    pub fn triangle(a: u64, b: u64, c: u64) -> Self {
        validate_matrix(&[
            vec![Some(1), Some(a), Some(c)],
            vec![Some(a), Some(1), Some(b)],
            vec![Some(c), Some(b), Some(1)],
        ])
        .expect("triangle labels >= 2")
    }

    /// Path diagram with the given labels (`labels.len() + 1` generators,
    /// non-adjacent pairs commute).
    pub fn path(labels: &[u64]) -> Self {
        let n = labels.len() + 1;
        let mut m: Vec<Vec<Option<u64>>> = (0..n)
            .map(|i| (0..n).map(|j| Some(if i == j { 1 } else { 2 })).collect())
            .collect();
        for (i, &l) in labels.iter().enumerate() {
            m[i][i + 1] = Some(l);
            m[i + 1][i] = Some(l);
        }
        CoxeterMatrix { m }
    }

    /// Direct product: block diagonal with 2 between blocks.
    pub fn direct_sum(parts: &[CoxeterMatrix]) -> Self {
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut m: Vec<Vec<Option<u64>>> = (0..n)
            .map(|i| (0..n).map(|j| Some(if i == j { 1 } else { 2 })).collect())
            .collect();
        let mut base = 0;
        for p in parts {
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    m[base + i][base + j] = p.m[i][j];
                }
            }
            base += p.rank();
        }
        CoxeterMatrix { m }
    }

    /// Matrix of a named spherical type such as `A3`, `B4`, `D5`, `E6`, `F4`,
    /// `H3`, `I2(5)`, or a product like `A1xI2(4)`.
    pub fn from_type_name(name: &str) -> Result<Self, CoxeterError> {
        let bad = || CoxeterError::BadEntry(name.to_string());
        let parts: Vec<&str> = name.split('x').filter(|p| !p.is_empty()).collect();
        if parts.len() > 1 {
            let mats = parts
                .iter()
                .map(|p| CoxeterMatrix::from_type_name(p))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(CoxeterMatrix::direct_sum(&mats));
        }
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("I2(").and_then(|r| r.strip_suffix(')')) {
            let m: u64 = rest.parse().map_err(|_| bad())?;
            if m < 2 {
                return Err(bad());
            }
            return Ok(CoxeterMatrix::path(&[m]));
        }
        let (letter, rank) = name.split_at(1.min(name.len()));
        let k: usize = rank.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        let branched = |arms: [usize; 3]| {
            let n = arms.iter().sum::<usize>() + 1;
            let mut m: Vec<Vec<Option<u64>>> = (0..n)
                .map(|i| (0..n).map(|j| Some(if i == j { 1 } else { 2 })).collect())
                .collect();
            let mut next = 1;
            for len in arms {
                let mut prev = 0;
                for _ in 0..len {
                    m[prev][next] = Some(3);
                    m[next][prev] = Some(3);
                    prev = next;
                    next += 1;
                }
            }
            CoxeterMatrix { m }
        };
        let out = match (letter, k) {
            ("A", k) => CoxeterMatrix::path(&vec![3; k - 1]),
            ("B", k) if k >= 2 => {
                let mut labels = vec![3; k - 1];
                labels[0] = 4;
                CoxeterMatrix::path(&labels)
            }
            ("D", k) if k >= 4 => branched([1, 1, k - 3]),
            ("E", 6) => branched([2, 1, 2]),
            ("E", 7) => branched([2, 1, 3]),
            ("E", 8) => branched([2, 1, 4]),
            ("F", 4) => CoxeterMatrix::path(&[3, 4, 3]),
            ("H", 3) => CoxeterMatrix::path(&[5, 3]),
            ("H", 4) => CoxeterMatrix::path(&[5, 3, 3]),
            _ => return Err(bad()),
        };
        Ok(out)
    }

    /// Free product: block diagonal with ∞ between blocks.
    pub fn free_product(parts: &[CoxeterMatrix]) -> Self {
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut m = CoxeterMatrix::free(n).m;
        let mut base = 0;
        for p in parts {
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    m[base + i][base + j] = p.m[i][j];
                }
            }
            base += p.rank();
        }
        CoxeterMatrix { m }
    }

    /// Sub-matrix on the given generators, in order.
    pub fn restrict(&self, gens: &[usize]) -> Self {
        let m = gens
            .iter()
            .map(|&i| gens.iter().map(|&j| self.m[i][j]).collect())
            .collect();
        CoxeterMatrix { m }
    }

    /// Matrix with generators relabelled: generator `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.rank();
        let mut m = vec![vec![Some(1); n]; n];
        for i in 0..n {
            for j in 0..n {
                m[perm[i]][perm[j]] = self.m[i][j];
            }
        }
        CoxeterMatrix { m }
    }

    pub fn is_right_angled(&self) -> Result<(), CoxeterError> {
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                if i != j && !matches!(self.m[i][j], None | Some(2)) {
                    return Err(CoxeterError::NotRightAngled(i, j));
                }
            }
        }
        Ok(())
    }

    fn full_mask(&self) -> u64 {
        if self.rank() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rank()) - 1
        }
    }

    /// Order of W_T for a mask, `None` if infinite.
    pub fn spherical_order_mask(&self, mask: u64) -> Option<BigUint> {
        let gens = members(mask);
        let mut order = BigUint::one();
        let mut seen = 0u64;
        for &start in &gens {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            seen |= 1 << start;
            while let Some(a) = queue.pop_front() {
                for &b in &gens {
                    if seen >> b & 1 == 0 && self.m[a][b] != Some(2) {
                        seen |= 1 << b;
                        comp.push(b);
                        queue.push_back(b);
                    }
                }
            }
            order *= self.component_order(&comp)?;
        }
        Some(order)
    }

    /// Order of W_T, `None` if infinite.
    pub fn spherical_order(&self, t: &[usize]) -> Option<BigUint> {
        self.spherical_order_mask(mask_of(t))
    }

    pub fn is_spherical(&self, t: &[usize]) -> bool {
        self.spherical_order(t).is_some()
    }

    pub fn is_spherical_mask(&self, mask: u64) -> bool {
        self.spherical_order_mask(mask).is_some()
    }

    fn component_order(&self, comp: &[usize]) -> Option<BigUint> {
        let k = comp.len();
        let mut adj: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
        let mut edges = 0;
        for (x, &a) in comp.iter().enumerate() {
            adj.entry(a).or_default();
            for &b in &comp[x + 1..] {
                match self.m[a][b] {
                    None => return None,
                    Some(2) => {}
                    Some(l) => {
                        adj.entry(a).or_default().push((b, l));
                        adj.entry(b).or_default().push((a, l));
                        edges += 1;
                    }
                }
            }
        }
        if k == 1 {
            return Some(BigUint::from(2u32));
        }
        if edges != k - 1 {
            return None;
        }
        if k == 2 {
            let (_, l) = adj[&comp[0]][0];
            return Some(BigUint::from(2 * l));
        }
        let max_deg = adj.values().map(|v| v.len()).max().unwrap_or(0);
        if max_deg > 3 {
            return None;
        }
        if max_deg <= 2 {
            let start = *adj.iter().find(|(_, v)| v.len() == 1).map(|(a, _)| a)?;
            let mut labels = Vec::new();
            let (mut prev, mut cur) = (usize::MAX, start);
            loop {
                let next = adj[&cur].iter().find(|(b, _)| *b != prev).copied();
                match next {
                    Some((b, l)) => {
                        labels.push(l);
                        prev = cur;
                        cur = b;
                    }
                    None => break,
                }
            }
            let kk = k as u64;
            let all3 = labels.iter().all(|&l| l == 3);
            if all3 {
                return Some(factorial(kk + 1));
            }
            let rev: Vec<u64> = labels.iter().rev().copied().collect();
            let matches = |pat: &[u64]| labels == pat || rev == pat;
            let mut b_pat = vec![3u64; k - 1];
            b_pat[0] = 4;
            if matches(&b_pat) {
                return Some(BigUint::from(2u32).pow(k as u32) * factorial(kk));
            }
            if matches(&[5, 3]) {
                return Some(BigUint::from(120u32));
            }
            if matches(&[5, 3, 3]) {
                return Some(BigUint::from(14_400u32));
            }
            if matches(&[3, 4, 3]) {
                return Some(BigUint::from(1152u32));
            }
            return None;
        }
        if adj.values().flatten().any(|&(_, l)| l != 3) {
            return None;
        }
        let (&centre, _) = adj.iter().find(|(_, v)| v.len() == 3)?;
        if adj.iter().filter(|(_, v)| v.len() == 3).count() != 1 {
            return None;
        }
        let mut arms: Vec<usize> = adj[&centre]
            .iter()
            .map(|&(b, _)| {
                let (mut prev, mut cur, mut len) = (centre, b, 1);
                while let Some(&(n, _)) = adj[&cur].iter().find(|(x, _)| *x != prev) {
                    prev = cur;
                    cur = n;
                    len += 1;
                }
                len
            })
            .collect();
        arms.sort_unstable();
        let kk = k as u64;
        match arms.as_slice() {
            [1, 1, _] => Some(BigUint::from(2u32).pow(k as u32 - 1) * factorial(kk)),
            [1, 2, 2] => Some(BigUint::from(51_840u32)),
            [1, 2, 3] => Some(BigUint::from(2_903_040u32)),
            [1, 2, 4] => Some(BigUint::from(696_729_600u32)),
            _ => None,
        }
    }

    /// All spherical subsets including ∅, as masks in colex order.
    pub fn spherical_masks(&self) -> Vec<u64> {
        let mut found: HashSet<u64> = HashSet::from([0]);
        let mut frontier = vec![0u64];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &s in &frontier {
                let top = 64 - s.leading_zeros() as usize;
                for i in top..self.rank() {
                    let t = s | 1 << i;
                    if self.is_spherical_mask(t) && found.insert(t) {
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<u64> = found.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Nerve of the system.
    pub fn nerve(&self) -> Nerve {
        let simplices = self
            .spherical_masks()
            .into_iter()
            .filter(|&s| s != 0)
            .map(members)
            .collect();
        let mut edges = Vec::new();
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                if let Some(l) = self.m[i][j] {
                    edges.push((i, j, l));
                }
            }
        }
        Nerve { matrix: self.clone(), simplices, edges }
    }

    /// Generators with every off-diagonal entry ∞.
    pub fn free_generators(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| (0..self.rank()).all(|j| i == j || self.m[i][j].is_none()))
            .collect()
    }

    /// Connected components of the nerve 1-skeleton, ordered by least generator.
    pub fn components(&self) -> Vec<Component> {
        let n = self.rank();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for b in 0..n {
                    if !seen[b] && a != b && self.m[a][b].is_some() {
                        seen[b] = true;
                        comp.push(b);
                        queue.push_back(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(Component { matrix: self.restrict(&comp), generators: comp });
        }
        out
    }

    /// Chamber scwol: a vertex per spherical subset, edges toward supersets.
    pub fn chamber(&self) -> Scwol {
        let masks = self.spherical_masks();
        let index: HashMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let vertices = masks
            .iter()
            .map(|&m| VertexInfo::new(type_label(m), Color::None, type_label(m)))
            .collect();
        let mut cover = Vec::new();
        for (a, &m) in masks.iter().enumerate() {
            for i in 0..self.rank() {
                if m >> i & 1 == 0 {
                    if let Some(&b) = index.get(&(m | 1 << i)) {
                        cover.push((a, b));
                    }
                }
            }
        }
        Scwol::new(vertices, cover)
    }

    /// Ends of W, classified through punctured nerves.
    pub fn count_ends(&self) -> EndsCount {
        let full = self.full_mask();
        if self.is_spherical_mask(full) {
            return EndsCount::Zero;
        }
        let n = self.rank();
        for s in 0..n {
            for t in s + 1..n {
                if self.m[s][t].is_some() {
                    continue;
                }
                let rest = full & !(1 << s) & !(1 << t);
                let commutes = members(rest)
                    .iter()
                    .all(|&r| self.m[r][s] == Some(2) && self.m[r][t] == Some(2));
                if commutes && self.is_spherical_mask(rest) {
                    return EndsCount::Two;
                }
            }
        }
        let one = self
            .spherical_masks()
            .iter()
            .all(|&t| self.induced_connected(full & !t));
        if one {
            EndsCount::One
        } else {
            EndsCount::Infinity
        }
    }

    fn induced_connected(&self, mask: u64) -> bool {
        let gens = members(mask);
        let Some(&start) = gens.first() else { return false };
        let mut seen = 1u64 << start;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &b in &gens {
                if seen >> b & 1 == 0 && self.m[a][b].is_some() {
                    seen |= 1 << b;
                    queue.push_back(b);
                }
            }
        }
        seen == mask
    }

    /// Whether a nontrivial label-preserving automorphism of the nerve graph
    /// fixes the closed star of some vertex pointwise.
    pub fn is_flexible(&self) -> Result<bool, CoxeterError> {
        let n = self.rank();
        if n > FLEX_MAX_RANK {
            return Err(CoxeterError::SearchBound(n));
        }
        for v in 0..n {
            let star: Vec<bool> = (0..n).map(|u| u == v || self.m[u][v].is_some()).collect();
            let free: Vec<usize> = (0..n).filter(|&u| !star[u]).collect();
            let mut image: Vec<Option<usize>> =
                (0..n).map(|u| if star[u] { Some(u) } else { None }).collect();
            let mut used = star.clone();
            if self.extend_automorphism(&free, 0, &mut image, &mut used) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn extend_automorphism(
        &self,
        free: &[usize],
        depth: usize,
        image: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == free.len() {
            return image.iter().enumerate().any(|(u, x)| *x != Some(u));
        }
        let u = free[depth];
        for &c in free {
            if used[c] {
                continue;
            }
            let consistent = (0..self.rank()).all(|w| match image[w] {
                Some(iw) => self.m[u][w] == self.m[c][iw] || w == u,
                None => true,
            }) && self.m[u][u] == self.m[c][c];
            if !consistent {
                continue;
            }
            image[u] = Some(c);
            used[c] = true;
            if self.extend_automorphism(free, depth + 1, image, used) {
                return true;
            }
            image[u] = None;
            used[c] = false;
        }
        false
    }
}

/// Tits rewriting for words in the generators, with memoised results and a
/// budget on explored words.
#[derive(Debug, Clone)]
pub struct WordSolver {
    matrix: CoxeterMatrix,
    memo: HashMap<Vec<usize>, Vec<usize>>,
    budget: usize,
    explored: usize,
}

impl WordSolver {
    pub fn new(matrix: &CoxeterMatrix, budget: usize) -> Self {
        WordSolver { matrix: matrix.clone(), memo: HashMap::new(), budget, explored: 0 }
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    /// Words explored so far.
    pub fn explored(&self) -> usize {
        self.explored
    }

    /// Canonical form: the lexicographically least reduced word of the element.
    pub fn canonical(&mut self, word: &[usize]) -> Result<Vec<usize>, CoxeterError> {
        if let Some(w) = word.iter().find(|&&s| s >= self.matrix.rank()) {
            return Err(CoxeterError::BadGenerator(*w));
        }
        if let Some(c) = self.memo.get(word) {
            return Ok(c.clone());
        }
        let mut current = word.to_vec();
        'outer: loop {
            let mut seen: HashSet<Vec<usize>> = HashSet::from([current.clone()]);
            let mut queue = vec![current.clone()];
            while let Some(x) = queue.pop() {
                self.explored += 1;
                if self.explored > self.budget {
                    return Err(CoxeterError::WordBudget(self.budget));
                }
                if let Some(i) = x.windows(2).position(|p| p[0] == p[1]) {
                    let mut shorter = x.clone();
                    shorter.drain(i..i + 2);
                    current = shorter;
                    continue 'outer;
                }
                for i in 0..x.len().saturating_sub(1) {
                    let (a, b) = (x[i], x[i + 1]);
                    let Some(m) = self.matrix.m[a][b] else { continue };
                    let m = m as usize;
                    if i + m > x.len() {
                        continue;
                    }
                    let alternating = (0..m).all(|j| x[i + j] == if j % 2 == 0 { a } else { b });
                    if !alternating {
                        continue;
                    }
                    let mut y = x.clone();
                    for j in 0..m {
                        y[i + j] = if j % 2 == 0 { b } else { a };
                    }
                    if seen.insert(y.clone()) {
                        queue.push(y);
                    }
                }
            }
            let best = seen.into_iter().min().unwrap_or_default();
            self.memo.insert(word.to_vec(), best.clone());
            return Ok(best);
        }
    }

    /// Canonical words of every element of W_T, by increasing length; fails
    /// once more than `max_count` elements are found.
    pub fn enumerate(&mut self, mask: u64, max_count: usize) -> Result<Vec<Vec<usize>>, CoxeterError> {
        let gens = members(mask);
        let mut all = vec![Vec::new()];
        let mut seen: HashSet<Vec<usize>> = HashSet::from([Vec::new()]);
        let mut frontier = vec![Vec::new()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for &s in &gens {
                    let mut ws: Vec<usize> = w.clone();
                    ws.push(s);
                    let c = self.canonical(&ws)?;
                    if c.len() == w.len() + 1 && seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            next.sort();
            all.extend(next.iter().cloned());
            if all.len() > max_count {
                return Err(CoxeterError::WordBudget(max_count));
            }
            frontier = next;
        }
        Ok(all)
    }
}

/// A coset `wW_T` seen from a set of chambers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetCell {
    pub mask: u64,
    /// Least canonical word of the coset by (length, lexicographic).
    pub key: Vec<usize>,
    /// Indices of the coset's chambers present in the chamber list.
    pub chambers: Vec<usize>,
    /// Whether every chamber of the coset is present.
    pub complete: bool,
}

/// Cosets of spherical special subgroups meeting a chamber set, with the
/// containments `wW_T ⊂ wW_{T∪{s}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetComplex {
    pub chambers: Vec<Vec<usize>>,
    /// Cells ordered by mask, then key.
    pub cells: Vec<CosetCell>,
    /// `(smaller, larger)` cell pairs whose types differ by one generator.
    pub covers: Vec<(usize, usize)>,
}

impl WordSolver {
    /// Coset complex of the given canonical chamber words.
    pub fn coset_complex(&mut self, chambers: Vec<Vec<usize>>) -> Result<CosetComplex, CoxeterError> {
        let masks = self.matrix.spherical_masks();
        let position: HashMap<Vec<usize>, usize> =
            chambers.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut found: BTreeMap<(u64, (usize, Vec<usize>)), (Vec<usize>, bool)> = BTreeMap::new();
        let mut chamber_cell: HashMap<(u64, usize), (usize, Vec<usize>)> = HashMap::new();
        for &t in &masks {
            let elements = self.enumerate(t, usize::MAX)?;
            for ci in 0..chambers.len() {
                if chamber_cell.contains_key(&(t, ci)) {
                    continue;
                }
                let mut words = Vec::with_capacity(elements.len());
                for u in &elements {
                    let mut wu = chambers[ci].clone();
                    wu.extend_from_slice(u);
                    words.push(self.canonical(&wu)?);
                }
                let key = words
                    .iter()
                    .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
                    .cloned()
                    .unwrap_or_default();
                let key = (key.len(), key);
                let mut present: Vec<usize> = words.iter().filter_map(|w| position.get(w).copied()).collect();
                present.sort_unstable();
                present.dedup();
                for &p in &present {
                    chamber_cell.insert((t, p), key.clone());
                }
                let complete = present.len() == elements.len();
                found.insert((t, key), (present, complete));
            }
        }
        let mut index: HashMap<(u64, Vec<usize>), usize> = HashMap::new();
        let mut cells = Vec::with_capacity(found.len());
        for ((mask, (_, key)), (present, complete)) in found {
            index.insert((mask, key.clone()), cells.len());
            cells.push(CosetCell { mask, key, chambers: present, complete });
        }
        let spherical: HashSet<u64> = masks.iter().copied().collect();
        let mut covers = Vec::new();
        for (i, cell) in cells.iter().enumerate() {
            for s in 0..self.matrix.rank() {
                let bigger = cell.mask | 1 << s;
                if bigger == cell.mask || !spherical.contains(&bigger) {
                    continue;
                }
                let (_, key) = &chamber_cell[&(bigger, cell.chambers[0])];
                covers.push((i, index[&(bigger, key.clone())]));
            }
        }
        covers.sort_unstable();
        Ok(CosetComplex { chambers, cells, covers })
    }

    /// Canonical words of length at most `radius`, by length then lexicographic.
    pub fn ball(&mut self, radius: usize, max_count: usize) -> Result<Vec<Vec<usize>>, CoxeterError> {
        let n = self.matrix.rank();
        let mut all = vec![Vec::new()];
        let mut seen: HashSet<Vec<usize>> = HashSet::from([Vec::new()]);
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..n {
                    let mut ws = w.clone();
                    ws.push(s);
                    let c = self.canonical(&ws)?;
                    if c.len() == w.len() + 1 && seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            next.sort();
            all.extend(next.iter().cloned());
            if all.len() > max_count {
                return Err(CoxeterError::WordBudget(max_count));
            }
            frontier = next;
        }
        Ok(all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(m: &CoxeterMatrix, t: &[usize]) -> Option<u64> {
        m.spherical_order(t).map(|o| o.try_into().unwrap())
    }

    #[test]
    fn validation_errors() {
        assert!(validate_matrix(&[vec![Some(1)]]).is_ok());
        assert!(validate_matrix(&[vec![Some(1), Some(3)], vec![Some(3), Some(1)]]).is_ok());
        assert_eq!(
            validate_matrix(&[vec![Some(1), Some(2)], vec![Some(3), Some(1)]]),
            Err(CoxeterError::Asymmetric(0, 1))
        );
        assert_eq!(
            validate_matrix(&[vec![Some(2), Some(2)], vec![Some(2), Some(1)]]),
            Err(CoxeterError::BadDiagonal(0))
        );
        assert_eq!(
            validate_matrix(&[vec![Some(1), Some(1)], vec![Some(1), Some(1)]]),
            Err(CoxeterError::OffDiagonal(0, 1))
        );
    }

    #[test]
    fn classification_table() {
        assert_eq!(order(&CoxeterMatrix::path(&[3, 3]), &[0, 1, 2]), Some(24));
        assert_eq!(order(&CoxeterMatrix::path(&[4, 3]), &[0, 1, 2]), Some(48));
        assert_eq!(order(&CoxeterMatrix::path(&[5, 3]), &[0, 1, 2]), Some(120));
        assert_eq!(order(&CoxeterMatrix::path(&[5, 3, 3]), &[0, 1, 2, 3]), Some(14_400));
        assert_eq!(order(&CoxeterMatrix::path(&[3, 4, 3]), &[0, 1, 2, 3]), Some(1152));
        assert_eq!(order(&CoxeterMatrix::path(&[3, 5, 3]), &[0, 1, 2, 3]), None);
        assert_eq!(order(&CoxeterMatrix::path(&[6]), &[0, 1]), Some(12));
        assert_eq!(order(&CoxeterMatrix::path(&[6, 3]), &[0, 1, 2]), None);
        assert_eq!(order(&CoxeterMatrix::triangle(3, 3, 3), &[0, 1, 2]), None);
        assert_eq!(order(&CoxeterMatrix::triangle(3, 3, 3), &[0, 1]), Some(6));
        assert_eq!(order(&CoxeterMatrix::triangle(3, 3, 3), &[]), Some(1));
    }

    #[test]
    fn branched_diagrams() {
        let mut d4 = CoxeterMatrix::path(&[3, 2, 2]).m;
        for j in 1..4 {
            d4[0][j] = Some(3);
            d4[j][0] = Some(3);
        }
        let d4 = validate_matrix(&d4).unwrap();
        assert_eq!(order(&d4, &[0, 1, 2, 3]), Some(192));
        let mut e6 = CoxeterMatrix::path(&[3, 3, 3, 3, 2]).m;
        e6[2][5] = Some(3);
        e6[5][2] = Some(3);
        let e6 = validate_matrix(&e6).unwrap();
        assert_eq!(order(&e6, &[0, 1, 2, 3, 4, 5]), Some(51_840));
    }

    #[test]
    fn named_types() {
        let cases = [
            ("A3", 24u64),
            ("B3", 48),
            ("D4", 192),
            ("D5", 1920),
            ("E6", 51_840),
            ("E7", 2_903_040),
            ("F4", 1152),
            ("H3", 120),
            ("I2(5)", 10),
            ("A1xA1", 4),
            ("A1xI2(3)", 12),
        ];
        for (name, expected) in cases {
            let m = CoxeterMatrix::from_type_name(name).unwrap();
            let all: Vec<usize> = (0..m.rank()).collect();
            assert_eq!(order(&m, &all), Some(expected), "{name}");
        }
        assert!(CoxeterMatrix::from_type_name("Q2").is_err());
    }

    #[test]
    fn nerve_shapes() {
        let free = CoxeterMatrix::free(4).nerve();
        assert_eq!(free.simplices.len(), 4);
        assert!(free.edges.is_empty());
        let tri = CoxeterMatrix::triangle(3, 3, 3).nerve();
        assert_eq!(tri.edges.len(), 3);
        assert_eq!(tri.simplices.len(), 6);
        let cyc = CoxeterMatrix::cycle(6, 4).nerve();
        assert_eq!(cyc.simplices.len(), 12);
        assert_eq!(cyc.edges.len(), 6);
        assert!(cyc.is_downward_closed());
    }

    #[test]
    fn chamber_counts() {
        let c = CoxeterMatrix::triangle(3, 3, 3).chamber();
        assert_eq!(c.vertex_count(), 7);
        assert_eq!(c.edge_count(), 12);
        assert_eq!(c.composable_pairs().len(), 6);
        let f = CoxeterMatrix::free(3).chamber();
        assert_eq!(f.vertex_count(), 4);
        assert_eq!(f.edge_count(), 3);
    }

    #[test]
    fn ends_and_flexibility() {
        assert_eq!(CoxeterMatrix::triangle(3, 3, 3).count_ends(), EndsCount::One);
        assert_eq!(CoxeterMatrix::free(2).count_ends(), EndsCount::Two);
        assert_eq!(CoxeterMatrix::free(3).count_ends(), EndsCount::Infinity);
        assert_eq!(CoxeterMatrix::path(&[3]).count_ends(), EndsCount::Zero);
        assert!(CoxeterMatrix::free(3).is_flexible().unwrap());
        assert!(!CoxeterMatrix::triangle(3, 3, 3).is_flexible().unwrap());
        assert!(!CoxeterMatrix::free(1).is_flexible().unwrap());
        assert!(CoxeterMatrix::free(13).is_flexible().is_err());
    }

    #[test]
    fn canonical_words() {
        let m = CoxeterMatrix::path(&[3]);
        let mut w = WordSolver::new(&m, DEFAULT_WORD_BUDGET);
        assert_eq!(w.canonical(&[1, 0, 1]).unwrap(), vec![0, 1, 0]);
        assert_eq!(w.canonical(&[0, 1, 0, 1]).unwrap(), vec![1, 0]);
        assert_eq!(w.canonical(&[0, 0]).unwrap(), Vec::<usize>::new());
        assert_eq!(w.enumerate(0b11, 1000).unwrap().len(), 6);
    }

    #[test]
    fn finite_coset_complex() {
        let m = CoxeterMatrix::path(&[3]);
        let mut w = WordSolver::new(&m, DEFAULT_WORD_BUDGET);
        let chambers = w.enumerate(0b11, 100).unwrap();
        let cc = w.coset_complex(chambers).unwrap();
        assert_eq!(cc.cells.len(), 13);
        assert!(cc.cells.iter().all(|c| c.complete));
        assert_eq!(cc.covers.len(), 6 + 6 + 6);
    }
}
