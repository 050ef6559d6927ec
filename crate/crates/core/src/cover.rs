//! Balls in universal covers: Bass–Serre trees, Davis complexes and
//! right-angled buildings.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cog::{Color, ComplexOfGroups, GraphOfGroups, Scwol, VertexInfo};
use crate::coxeter::{members, type_label, CoxeterError, CoxeterMatrix, WordSolver, DEFAULT_WORD_BUDGET};
use crate::links::{link_fast, LinkCase, LinkError, LinkGraph};

/// Default cap on ball vertices.
pub const DEFAULT_MAX_BALL: usize = 100_000;

/// Largest Bass–Serre radius accepted.
pub const MAX_TREE_RADIUS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("ball exceeds {0} vertices")]
    BallCap(usize),
    #[error("radius {0} exceeds the limit {MAX_TREE_RADIUS}")]
    Radius(usize),
    #[error("base vertex {0:?} is not a sink")]
    BadBase(String),
    #[error("full Davis complex needs a finite Coxeter group")]
    Infinite,
    #[error("panel sizes: expected {expected} values >= 2, got {got:?}")]
    PanelSizes { expected: usize, got: Vec<u64> },
    #[error("vertex {0} is not interior")]
    NotInterior(usize),
    #[error("group of order {0} too large for a tree lift")]
    Index(BigUint),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

type Result<T> = std::result::Result<T, CoverError>;

/// Ball cap, overridable through `COVOL_MAX_BALL`.
pub fn max_ball() -> usize {
    std::env::var("COVOL_MAX_BALL")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_BALL)
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallVertex {
    /// Coset word of the lift.
    pub word: String,
    pub kind: String,
    pub color: Color,
    #[serde(with = "decimal")]
    pub stabilizer: BigUint,
    pub distance: usize,
    /// Whether the link of the vertex lies inside the ball.
    pub interior: bool,
    /// Quotient vertex, for lifts of a complex of groups.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallEdge {
    pub a: usize,
    pub b: usize,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBall {
    pub center: usize,
    pub radius: usize,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<BallEdge>,
    pub sphere_sizes: Vec<usize>,
}

impl CoverBall {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(|a| a.len()).collect()
    }

    /// Interior degree counts per color.
    pub fn degree_histogram(&self) -> BTreeMap<Color, BTreeMap<usize, usize>> {
        let mut h: BTreeMap<Color, BTreeMap<usize, usize>> = BTreeMap::new();
        for (v, d) in self.degrees().into_iter().enumerate() {
            if self.vertices[v].interior {
                *h.entry(self.vertices[v].color).or_default().entry(d).or_default() += 1;
            }
        }
        h
    }

    /// Whether the ball is connected.
    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; adj.len()];
        let mut queue = VecDeque::from([self.center]);
        if adj.is_empty() {
            return true;
        }
        seen[self.center] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Whether the ball is a tree whose interior vertices have degree `a` on
    /// one side of the bipartition and `b` on the other.
    pub fn is_biregular(&self, a: usize, b: usize) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n || !self.is_connected() {
            return false;
        }
        let adj = self.adjacency();
        let mut side = vec![usize::MAX; n];
        side[self.center] = 0;
        let mut queue = VecDeque::from([self.center]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if side[y] == usize::MAX {
                    side[y] = 1 - side[x];
                    queue.push_back(y);
                }
            }
        }
        let fits = |first: usize, second: usize| {
            (0..n).all(|v| !self.vertices[v].interior || adj[v].len() == if side[v] == 0 { first } else { second })
        };
        fits(a, b) || fits(b, a)
    }

    /// Scwol on the ball with edges directed `a -> b`.
    pub fn scwol(&self) -> Scwol {
        let infos = self
            .vertices
            .iter()
            .map(|v| VertexInfo::new(v.word.clone(), v.color, v.kind.clone()))
            .collect();
        Scwol::new(infos, self.edges.iter().map(|e| (e.a, e.b)).collect())
    }

    /// Link of an interior vertex, read off the ball with trivial groups.
    pub fn interior_link(&self, v: usize) -> Result<LinkGraph> {
        if !self.vertices[v].interior {
            return Err(CoverError::NotInterior(v));
        }
        let complex = ComplexOfGroups::trivial_over(&self.scwol()).map_err(|_| CoverError::NotInterior(v))?;
        Ok(link_fast(&complex, v, LinkCase::I)?.unordered())
    }

    /// Interior vertices of each kind.
    pub fn interior_by_kind(&self) -> BTreeMap<String, Vec<usize>> {
        let mut m: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.interior {
                m.entry(v.kind.clone()).or_default().push(i);
            }
        }
        m
    }
}

// ---------------------------------------------------------------- Bass–Serre

/// Ball of sink lifts in the Bass–Serre tree; radius counts sink-to-sink steps.
pub fn bass_serre_ball(g: &GraphOfGroups, base: usize, radius: usize) -> Result<CoverBall> {
    let c = g.complex();
    if !g.is_sink(base) {
        return Err(CoverError::BadBase(c.info(base).id.clone()));
    }
    if radius > MAX_TREE_RADIUS {
        return Err(CoverError::Radius(radius));
    }
    let cap = max_ball();
    let s = c.scwol();
    // Per sink: incoming (source, other sink, coset count).
    let mut arms: HashMap<usize, Vec<(usize, usize, usize)>> = HashMap::new();
    for &v in g.sinks() {
        let mut list = Vec::new();
        for &e in s.in_edges(v) {
            let src = s.edge(e).src;
            let other = s.out_edges(src).iter().map(|&f| s.edge(f).dst).find(|&w| w != v).unwrap_or(v);
            let index = c.map(e).index();
            let count = index.to_usize().filter(|&k| k <= cap).ok_or(CoverError::Index(index))?;
            list.push((src, other, count));
        }
        arms.insert(v, list);
    }
    let mut vertices = vec![BallVertex {
        word: c.info(base).id.clone(),
        kind: c.info(base).kind.clone(),
        color: c.color(base),
        stabilizer: c.group(base).order(),
        distance: 0,
        interior: radius > 0,
        origin: Some(base),
    }];
    let mut edges = Vec::new();
    // (ball vertex, quotient sink, arrival source)
    let mut frontier: Vec<(usize, usize, Option<usize>)> = vec![(0, base, None)];
    let mut sphere_sizes = vec![1];
    for r in 1..=radius {
        let mut next = Vec::new();
        for &(x, v, arrived) in &frontier {
            for &(src, w, count) in &arms[&v] {
                let skip = usize::from(arrived == Some(src));
                for k in skip..count {
                    if vertices.len() >= cap {
                        return Err(CoverError::BallCap(cap));
                    }
                    let y = vertices.len();
                    vertices.push(BallVertex {
                        word: format!("{} {}.{k}", vertices[x].word, c.info(src).id),
                        kind: c.info(w).kind.clone(),
                        color: c.color(w),
                        stabilizer: c.group(w).order(),
                        distance: r,
                        interior: r < radius,
                        origin: Some(w),
                    });
                    edges.push(BallEdge { a: x, b: y, kind: c.info(src).id.clone() });
                    next.push((y, w, Some(src)));
                }
            }
        }
        sphere_sizes.push(next.len());
        frontier = next;
    }
    Ok(CoverBall { center: 0, radius, vertices, edges, sphere_sizes })
}

/// Outcome of a quotient check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub status: CheckStatus,
    pub mismatches: Vec<String>,
}

fn sink_eccentricity(g: &GraphOfGroups, base: usize) -> usize {
    let s = g.complex().scwol();
    let mut dist: HashMap<usize, usize> = HashMap::from([(base, 0)]);
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &e in s.in_edges(v) {
            let src = s.edge(e).src;
            for &f in s.out_edges(src) {
                let w = s.edge(f).dst;
                if !dist.contains_key(&w) {
                    dist.insert(w, dist[&v] + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    if g.sinks().iter().any(|v| !dist.contains_key(v)) {
        return usize::MAX;
    }
    dist.values().copied().max().unwrap_or(0)
}

/// Collapse lifts by quotient vertex and compare counts, degrees and stabilizers with `g`.
pub fn quotient_check(ball: &CoverBall, g: &GraphOfGroups) -> QuotientReport {
    let c = g.complex();
    let base = ball.vertices.get(ball.center).and_then(|v| v.origin);
    let eccentric = base.map(|b| sink_eccentricity(g, b)).unwrap_or(usize::MAX);
    if ball.radius == 0 || ball.radius < eccentric {
        return QuotientReport { status: CheckStatus::Inconclusive, mismatches: Vec::new() };
    }
    let mut mismatches = Vec::new();
    let s = c.scwol();
    let adj = ball.adjacency();
    let mut seen_sinks = vec![false; c.vertex_count()];
    let mut seen_sources = vec![false; c.vertex_count()];
    let by_id: HashMap<&str, usize> = g.sources().iter().map(|&v| (c.info(v).id.as_str(), v)).collect();
    for (i, v) in ball.vertices.iter().enumerate() {
        let Some(o) = v.origin.filter(|&o| o < c.vertex_count() && g.is_sink(o)) else {
            mismatches.push(format!("lift {} has no quotient sink", v.word));
            continue;
        };
        seen_sinks[o] = true;
        if v.stabilizer != c.group(o).order() {
            mismatches.push(format!("lift {} stabilizer {} differs from |{}| = {}", v.word, v.stabilizer, c.info(o).id, c.group(o).order()));
        }
        if !v.interior {
            continue;
        }
        let mut per_source: BTreeMap<usize, usize> = BTreeMap::new();
        for &j in &adj[i] {
            let e = ball.edges.iter().find(|e| (e.a == i && e.b == j) || (e.a == j && e.b == i));
            if let Some(src) = e.and_then(|e| by_id.get(e.kind.as_str())) {
                seen_sources[*src] = true;
                *per_source.entry(*src).or_default() += 1;
            }
        }
        for &e in s.in_edges(o) {
            let src = s.edge(e).src;
            let want = c.map(e).index().to_usize().unwrap_or(usize::MAX);
            let got = per_source.get(&src).copied().unwrap_or(0);
            if got != want {
                mismatches.push(format!("lift {} meets {} {} times, expected index {}", v.word, c.info(src).id, got, want));
            }
        }
    }
    for &v in g.sinks() {
        if !seen_sinks[v] {
            mismatches.push(format!("sink {} has no lift", c.info(v).id));
        }
    }
    for &v in g.sources() {
        if !seen_sources[v] && ball.radius > eccentric {
            mismatches.push(format!("source {} has no lift", c.info(v).id));
        }
    }
    let status = if mismatches.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail };
    QuotientReport { status, mismatches }
}

// ---------------------------------------------------------------- Davis

/// Canonical form of a word in the generators.
pub fn coxeter_canonical(m: &CoxeterMatrix, word: &[usize]) -> Result<Vec<usize>> {
    Ok(WordSolver::new(m, DEFAULT_WORD_BUDGET).canonical(word)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DavisExtent {
    Radius(usize),
    /// Every chamber; needs a finite group.
    Full,
}

/// Vertex colors by cell type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorScheme {
    /// Chambers red, panels blue, larger cells purple.
    #[default]
    Davis,
    /// Chambers purple, s_0-panels red, s_1-panels green, other cells blue.
    Building,
}

impl ColorScheme {
    pub fn color(self, mask: u64) -> Color {
        match self {
            ColorScheme::Davis => match mask.count_ones() {
                0 => Color::Red,
                1 => Color::Blue,
                _ => Color::Purple,
            },
            ColorScheme::Building => match mask {
                0 => Color::Purple,
                1 => Color::Red,
                2 => Color::Green,
                _ => Color::Blue,
            },
        }
    }
}

fn word_string(w: &[usize]) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.iter().map(|s| format!("s{s}")).collect::<Vec<_>>().join(" ")
    }
}

/// Ball of the Davis complex: chambers of length at most the radius and the
/// cosets wW_T they meet; a coset is interior when all its chambers are present.
pub fn davis_ball(m: &CoxeterMatrix, extent: DavisExtent, scheme: ColorScheme) -> Result<CoverBall> {
    let cap = max_ball();
    let mut solver = WordSolver::new(m, DEFAULT_WORD_BUDGET.max(cap * 4));
    let (chambers, radius) = match extent {
        DavisExtent::Radius(r) => (solver.ball(r, cap).map_err(|_| CoverError::BallCap(cap))?, r),
        DavisExtent::Full => {
            let all: Vec<usize> = (0..m.rank()).collect();
            if !m.is_spherical(&all) {
                return Err(CoverError::Infinite);
            }
            let words = solver.enumerate(crate::coxeter::mask_of(&all), cap).map_err(|_| CoverError::BallCap(cap))?;
            let r = words.last().map(|w| w.len()).unwrap_or(0);
            (words, r)
        }
    };
    let cc = solver.coset_complex(chambers)?;
    if cc.cells.len() > cap {
        return Err(CoverError::BallCap(cap));
    }
    let vertices: Vec<BallVertex> = cc
        .cells
        .iter()
        .map(|cell| BallVertex {
            word: format!("{} {}", word_string(&cell.key), type_label(cell.mask)),
            kind: type_label(cell.mask),
            color: scheme.color(cell.mask),
            stabilizer: m.spherical_order_mask(cell.mask).unwrap_or_default(),
            distance: cell.key.len(),
            interior: cell.complete,
            origin: None,
        })
        .collect();
    let edges = cc
        .covers
        .iter()
        .map(|&(a, b)| BallEdge { a, b, kind: type_label(cc.cells[b].mask & !cc.cells[a].mask) })
        .collect();
    let mut sphere_sizes = vec![0; radius + 1];
    for w in &cc.chambers {
        sphere_sizes[w.len()] += 1;
    }
    Ok(CoverBall { center: 0, radius, vertices, edges, sphere_sizes })
}

// ---------------------------------------------------------------- buildings

/// Syllable `(generator, exponent)` of a graph-product word.
type Syllable = (usize, u64);

/// Normal forms in the graph product of cyclic groups C_{p_i} over a right-angled matrix.
#[derive(Debug, Clone)]
pub struct GraphProduct {
    commute: Vec<Vec<bool>>,
    p: Vec<u64>,
}

impl GraphProduct {
    pub fn new(m: &CoxeterMatrix, p: &[u64]) -> Result<Self> {
        m.is_right_angled()?;
        if p.len() != m.rank() || p.iter().any(|&q| q < 2) {
            return Err(CoverError::PanelSizes { expected: m.rank(), got: p.to_vec() });
        }
        let n = m.rank();
        let commute = (0..n).map(|i| (0..n).map(|j| i != j && m.entry(i, j) == Some(2)).collect()).collect();
        Ok(GraphProduct { commute, p: p.to_vec() })
    }

    /// Least shuffle of a reduced syllable word.
    pub fn normal_form(&self, w: &[Syllable]) -> Vec<Syllable> {
        let mut rest = w.to_vec();
        let mut out = Vec::with_capacity(w.len());
        while !rest.is_empty() {
            let pick = (0..rest.len())
                .filter(|&i| rest[..i].iter().all(|x| self.commute[x.0][rest[i].0]))
                .min_by_key(|&i| rest[i])
                .expect("first syllable is always movable");
            out.push(rest.remove(pick));
        }
        out
    }

    /// Normal form of `w · (s, a)` for a normal-form `w`.
    pub fn multiply(&self, w: &[Syllable], s: usize, a: u64) -> Vec<Syllable> {
        let mut v = w.to_vec();
        let movable = (0..v.len())
            .rev()
            .find(|&i| v[i].0 == s && v[i + 1..].iter().all(|x| self.commute[x.0][s]));
        match movable {
            Some(i) => {
                let e = (v[i].1 + a) % self.p[s];
                if e == 0 {
                    v.remove(i);
                } else {
                    v[i].1 = e;
                }
            }
            None => v.push((s, a % self.p[s])),
        }
        self.normal_form(&v)
    }

    /// Least representative of the residue wW_T.
    pub fn residue_key(&self, w: &[Syllable], mask: u64) -> Vec<Syllable> {
        let mut v = w.to_vec();
        loop {
            let i = (0..v.len()).rev().find(|&i| {
                mask >> v[i].0 & 1 == 1 && v[i + 1..].iter().all(|x| self.commute[x.0][v[i].0])
            });
            match i {
                Some(i) => {
                    v.remove(i);
                }
                None => return self.normal_form(&v),
            }
        }
    }
}

fn syllables_string(w: &[Syllable]) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.iter().map(|(s, a)| format!("s{s}^{a}")).collect::<Vec<_>>().join(" ")
    }
}

/// Ball of the right-angled building with p_i chambers per s_i-panel.
pub fn building_ball(m: &CoxeterMatrix, p: &[u64], radius: usize, scheme: ColorScheme) -> Result<CoverBall> {
    let gp = GraphProduct::new(m, p)?;
    let cap = max_ball();
    let n = m.rank();
    let mut chambers: Vec<Vec<Syllable>> = vec![Vec::new()];
    let mut index: HashMap<Vec<Syllable>, usize> = HashMap::from([(Vec::new(), 0)]);
    let mut frontier = vec![0];
    let mut sphere_sizes = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &c in &frontier {
            for s in 0..n {
                for a in 1..p[s] {
                    let w = gp.multiply(&chambers[c], s, a);
                    if w.len() == chambers[c].len() + 1 && !index.contains_key(&w) {
                        if chambers.len() >= cap {
                            return Err(CoverError::BallCap(cap));
                        }
                        index.insert(w.clone(), chambers.len());
                        next.push(chambers.len());
                        chambers.push(w);
                    }
                }
            }
        }
        sphere_sizes.push(next.len());
        frontier = next;
    }
    let masks = m.spherical_masks();
    let mut cells: BTreeMap<(u64, (usize, Vec<Syllable>)), Vec<usize>> = BTreeMap::new();
    for (ci, w) in chambers.iter().enumerate() {
        for &t in &masks {
            let key = gp.residue_key(w, t);
            cells.entry((t, (key.len(), key))).or_default().push(ci);
        }
    }
    let size = |t: u64| members(t).iter().map(|&i| p[i] as usize).product::<usize>();
    let position: HashMap<(u64, Vec<Syllable>), usize> =
        cells.keys().enumerate().map(|(i, (t, (_, k)))| ((*t, k.clone()), i)).collect();
    let mut vertices = Vec::with_capacity(cells.len());
    for ((t, (_, key)), contents) in &cells {
        let stabilizer = members(*t).iter().fold(BigUint::from(1u32), |acc, &i| acc * p[i]);
        vertices.push(BallVertex {
            word: format!("{} {}", syllables_string(key), type_label(*t)),
            kind: type_label(*t),
            color: scheme.color(*t),
            stabilizer,
            distance: key.len(),
            interior: contents.len() == size(*t),
            origin: None,
        });
    }
    if vertices.len() > cap {
        return Err(CoverError::BallCap(cap));
    }
    let spherical: std::collections::HashSet<u64> = masks.iter().copied().collect();
    let mut edges = Vec::new();
    for (i, ((t, _), contents)) in cells.iter().enumerate() {
        let w = &chambers[contents[0]];
        for s in 0..n {
            let bigger = t | 1 << s;
            if bigger == *t || !spherical.contains(&bigger) {
                continue;
            }
            let j = position[&(bigger, gp.residue_key(w, bigger))];
            edges.push(BallEdge { a: i, b: j, kind: format!("s{s}") });
        }
    }
    edges.sort_by_key(|e| (e.a, e.b));
    let center = position[&(0, Vec::new())];
    Ok(CoverBall { center, radius, vertices, edges, sphere_sizes })
}

/// Panel graph of a rank-two ball: panels as vertices, chambers as edges.
pub fn panel_graph(ball: &CoverBall) -> CoverBall {
    let panels: Vec<usize> = (0..ball.vertices.len()).filter(|&v| ball.vertices[v].kind != "{}").collect();
    let renumber: HashMap<usize, usize> = panels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut by_chamber: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in &ball.edges {
        if let Some(&j) = renumber.get(&e.b) {
            by_chamber.entry(e.a).or_default().push(j);
        }
    }
    let mut edges = Vec::new();
    for (c, ps) in by_chamber {
        if let [a, b] = ps[..] {
            edges.push(BallEdge { a, b, kind: ball.vertices[c].word.clone() });
        }
    }
    let vertices = panels.iter().map(|&v| ball.vertices[v].clone()).collect();
    let center = ball.edges.iter().find(|e| e.a == ball.center).and_then(|e| renumber.get(&e.b)).copied().unwrap_or(0);
    CoverBall { center, radius: ball.radius, vertices, edges, sphere_sizes: ball.sphere_sizes.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family_ga_k;
    use crate::links::{aut_order, graph_iso};

    #[test]
    fn tree_sphere_sizes() {
        let g = family_ga_k(3, 1).unwrap();
        let base = g.complex().find("b1").unwrap();
        let ball = bass_serre_ball(&g, base, 6).unwrap();
        assert_eq!(ball.sphere_sizes, vec![1, 3, 3, 6, 6, 12, 12]);
        assert!(ball.is_biregular(3, 2));
        assert_eq!(quotient_check(&ball, &g).status, CheckStatus::Pass);
        let zero = bass_serre_ball(&g, base, 0).unwrap();
        assert_eq!(quotient_check(&zero, &g).status, CheckStatus::Inconclusive);
    }

    #[test]
    fn single_sink_ball() {
        let mut b = crate::cog::ComplexBuilder::new();
        b.add_vertex("v", Color::Red, "sink", crate::groups::StructuredGroup::cyclic(3), true).unwrap();
        let g = crate::cog::as_graph_of_groups(&b.build().unwrap()).unwrap();
        let ball = bass_serre_ball(&g, 0, 4).unwrap();
        assert_eq!(ball.vertices.len(), 1);
    }

    #[test]
    fn triangle_group_links() {
        let m = CoxeterMatrix::triangle(3, 3, 3);
        let ball = davis_ball(&m, DavisExtent::Radius(4), ColorScheme::Davis).unwrap();
        let kinds = ball.interior_by_kind();
        let expect = [("{}", 6, 12), ("{0}", 4, 8), ("{0,1}", 12, 24)];
        for (kind, len, aut) in expect {
            let v = kinds[kind][0];
            let l = ball.interior_link(v).unwrap();
            assert!(graph_iso(&l.unordered(), &l));
            assert_eq!(l.vertex_count(), len);
            assert_eq!(l.edge_count(), len);
            assert_eq!(aut_order(&l), aut);
        }
    }

    #[test]
    fn finite_dihedral_full() {
        let m = CoxeterMatrix::path(&[3]);
        let ball = davis_ball(&m, DavisExtent::Full, ColorScheme::Davis).unwrap();
        assert_eq!(ball.vertices.len(), 13);
        let s = ball.scwol();
        assert_eq!(s.composable_pairs().len(), 12);
        assert!(davis_ball(&CoxeterMatrix::free(2), DavisExtent::Full, ColorScheme::Davis).is_err());
    }

    #[test]
    fn free_davis_is_tree() {
        let ball = davis_ball(&CoxeterMatrix::free(3), DavisExtent::Radius(4), ColorScheme::Davis).unwrap();
        assert!(ball.is_biregular(3, 2));
    }

    #[test]
    fn building_panels() {
        let ball = building_ball(&CoxeterMatrix::free(2), &[3, 2], 6, ColorScheme::Building).unwrap();
        let panels = panel_graph(&ball);
        assert!(panels.is_biregular(3, 2));
        for v in &ball.vertices {
            if v.interior && v.kind != "{}" {
                assert!(v.stabilizer == BigUint::from(3u32) || v.stabilizer == BigUint::from(2u32));
            }
        }
        let two = building_ball(&CoxeterMatrix::cycle(4, 2), &[2, 2, 2, 2], 3, ColorScheme::Davis).unwrap();
        let davis = davis_ball(&CoxeterMatrix::cycle(4, 2), DavisExtent::Radius(3), ColorScheme::Davis).unwrap();
        assert_eq!(two.sphere_sizes, davis.sphere_sizes);
        assert_eq!(two.vertices.len(), davis.vertices.len());
        assert!(building_ball(&CoxeterMatrix::path(&[3]), &[2, 2], 2, ColorScheme::Davis).is_err());
    }
}
