//! Local developments, links, colored-graph isomorphism and link catalogs.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cog::{Color, ComplexOfGroups};
use crate::groups::{Element, GroupError, DEFAULT_MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("vertex {vertex}: {source}")]
    Group { vertex: String, source: GroupError },
    #[error("vertex {0}: the local development has a chain of length three")]
    HigherDimension(String),
    #[error("vertex {vertex}: hypothesis of case {case:?} does not hold")]
    Hypothesis { vertex: String, case: LinkCase },
}

/// Group-order bound for enumeration, overridable by `COVOL_MAX_ORDER`.
pub fn max_order() -> u64 {
    std::env::var("COVOL_MAX_ORDER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkVertex {
    pub color: Color,
    /// Id of the neighbouring scwol vertex this link vertex comes from.
    pub origin: String,
    pub label: String,
}

/// Small colored graph, optionally with the strict order it realizes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinkGraph {
    pub vertices: Vec<LinkVertex>,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<(usize, usize)>>,
}

impl LinkGraph {
    /// Graph on `colors` with the given undirected edges.
    pub fn from_parts(colors: &[Color], edges: &[(usize, usize)]) -> Self {
        let vertices = colors
            .iter()
            .enumerate()
            .map(|(i, &color)| LinkVertex { color, origin: String::new(), label: i.to_string() })
            .collect();
        let mut g = LinkGraph { vertices, edges: Vec::new(), order: None };
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Cycle whose colors repeat the given pattern.
    pub fn cycle(len: usize, pattern: &[Color]) -> Self {
        let colors: Vec<Color> = (0..len).map(|i| pattern[i % pattern.len()]).collect();
        let edges: Vec<(usize, usize)> = (0..len).map(|i| (i, (i + 1) % len)).collect();
        LinkGraph::from_parts(&colors, &edges)
    }

    /// `count` isolated vertices of one color.
    pub fn isolated(count: usize, color: Color) -> Self {
        LinkGraph::from_parts(&vec![color; count], &[])
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        let e = (a.min(b), a.max(b));
        if a != b && !self.edges.contains(&e) {
            self.edges.push(e);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Disjoint union; the order is kept only when both sides carry one.
    pub fn disjoint_union(&self, other: &LinkGraph) -> LinkGraph {
        let shift = self.vertices.len();
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().cloned());
        out.edges.extend(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)));
        out.order = match (&self.order, &other.order) {
            (Some(a), Some(b)) => {
                let mut o = a.clone();
                o.extend(b.iter().map(|&(x, y)| (x + shift, y + shift)));
                Some(o)
            }
            _ => None,
        };
        out
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        adj
    }

    pub fn color_counts(&self) -> BTreeMap<Color, usize> {
        let mut out = BTreeMap::new();
        for v in &self.vertices {
            *out.entry(v.color).or_insert(0) += 1;
        }
        out
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for &b in &adj[a] {
                    if !seen[b] {
                        seen[b] = true;
                        comp.push(b);
                        queue.push_back(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Copy without the order.
    pub fn unordered(&self) -> LinkGraph {
        LinkGraph { order: None, ..self.clone() }
    }

    /// Whether every edge joins vertices of distinct colors.
    pub fn is_properly_colored(&self) -> bool {
        self.edges.iter().all(|&(a, b)| self.vertices[a].color != self.vertices[b].color)
    }
}

/// Fast-path cases for links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkCase {
    /// Trivial vertex group.
    I,
    /// Every edge at the vertex points away from it.
    II,
    /// Every edge points into the vertex and no two neighbours are related.
    III,
    /// The neighbour poset is disconnected.
    IV,
}

struct Neighbourhood {
    ins: Vec<usize>,
    outs: Vec<usize>,
}

fn neighbourhood(a: &ComplexOfGroups, v: usize, allowed: &dyn Fn(usize) -> bool) -> Neighbourhood {
    let s = a.scwol();
    let ins = s.in_edges(v).iter().copied().filter(|&e| allowed(s.edge(e).src)).collect();
    let outs = s.out_edges(v).iter().copied().filter(|&e| allowed(s.edge(e).dst)).collect();
    Neighbourhood { ins, outs }
}

fn group_err(a: &ComplexOfGroups, v: usize) -> impl Fn(GroupError) -> LinkError + '_ {
    move |source| LinkError::Group { vertex: a.info(v).id.clone(), source }
}

/// Local development of `v` with its order relation; the centre is omitted.
pub fn local_development(a: &ComplexOfGroups, v: usize) -> Result<LinkGraph, LinkError> {
    development_on(a, v, &|_| true, max_order())
}

/// Link of `v` as an unordered graph.
pub fn link(a: &ComplexOfGroups, v: usize) -> Result<LinkGraph, LinkError> {
    Ok(local_development(a, v)?.unordered())
}

fn development_on(
    a: &ComplexOfGroups,
    v: usize,
    allowed: &dyn Fn(usize) -> bool,
    bound: u64,
) -> Result<LinkGraph, LinkError> {
    let s = a.scwol();
    let nb = neighbourhood(a, v, allowed);
    let g = a.group(v);
    let mut vertices = Vec::new();
    let mut order = Vec::new();
    // Per incoming edge: source vertex, first link index, element -> coset.
    let mut families: Vec<(usize, usize, HashMap<Element, usize>, Vec<Vec<Element>>)> = Vec::new();
    if !nb.ins.is_empty() {
        let all = g.elements(bound).map_err(group_err(a, v))?;
        for &e in &nb.ins {
            let u = s.edge(e).src;
            let image = a.map(e).image_subgroup(bound).map_err(group_err(a, v))?;
            let mut member: HashMap<Element, usize> = HashMap::new();
            let mut cosets: Vec<Vec<Element>> = Vec::new();
            for x in &all {
                if member.contains_key(x) {
                    continue;
                }
                let mut c: Vec<Element> = image.iter().map(|h| g.multiply(x, h)).collect();
                c.sort();
                for y in &c {
                    member.insert(y.clone(), cosets.len());
                }
                cosets.push(c);
            }
            let base = vertices.len();
            let info = a.info(u);
            for c in &cosets {
                vertices.push(LinkVertex {
                    color: info.color,
                    origin: info.id.clone(),
                    label: format!("{}:{}", info.id, c[0]),
                });
            }
            families.push((u, base, member, cosets));
        }
        for (i, (ui, bi, _, ci)) in families.iter().enumerate() {
            for (j, (uj, bj, mj, _)) in families.iter().enumerate() {
                if i == j || s.edge_between(*ui, *uj).is_none() {
                    continue;
                }
                for (k, coset) in ci.iter().enumerate() {
                    let target = mj[&coset[0]];
                    if coset.iter().all(|x| mj[x] == target) {
                        order.push((bi + k, bj + target));
                    }
                }
            }
        }
    }
    let lower = vertices.len();
    for &e in &nb.outs {
        let w = s.edge(e).dst;
        let info = a.info(w);
        vertices.push(LinkVertex { color: info.color, origin: info.id.clone(), label: info.id.clone() });
    }
    for (i, &ei) in nb.outs.iter().enumerate() {
        for (j, &ej) in nb.outs.iter().enumerate() {
            if i != j && s.edge_between(s.edge(ei).dst, s.edge(ej).dst).is_some() {
                order.push((lower + i, lower + j));
            }
        }
    }
    for p in 0..lower {
        for q in lower..vertices.len() {
            order.push((p, q));
        }
    }
    realize(a, v, vertices, order)
}

fn realize(
    a: &ComplexOfGroups,
    v: usize,
    vertices: Vec<LinkVertex>,
    mut order: Vec<(usize, usize)>,
) -> Result<LinkGraph, LinkError> {
    order.sort_unstable();
    order.dedup();
    let n = vertices.len();
    let mut above = vec![false; n];
    let mut below = vec![false; n];
    for &(x, y) in &order {
        above[x] = true;
        below[y] = true;
    }
    if (0..n).any(|x| above[x] && below[x]) {
        return Err(LinkError::HigherDimension(a.info(v).id.clone()));
    }
    let mut g = LinkGraph { vertices, edges: Vec::new(), order: None };
    for &(x, y) in &order {
        g.add_edge(x, y);
    }
    g.edges.sort_unstable();
    g.order = Some(order);
    Ok(g)
}

/// Link through one of the fast-path cases; fails when its hypothesis does not hold.
pub fn link_fast(a: &ComplexOfGroups, v: usize, case: LinkCase) -> Result<LinkGraph, LinkError> {
    fast_on(a, v, case, &|_| true)
}

/// First applicable fast case at `v`, if any.
pub fn applicable_case(a: &ComplexOfGroups, v: usize) -> Option<LinkCase> {
    [LinkCase::I, LinkCase::II, LinkCase::III, LinkCase::IV]
        .into_iter()
        .find(|&c| hypothesis(a, v, c, &|_| true))
}

fn neighbour_components(a: &ComplexOfGroups, v: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let s = a.scwol();
    let nb = neighbourhood(a, v, allowed);
    let ins: Vec<usize> = nb.ins.iter().map(|&e| s.edge(e).src).collect();
    let outs: Vec<usize> = nb.outs.iter().map(|&e| s.edge(e).dst).collect();
    let all: Vec<usize> = ins.iter().chain(&outs).copied().collect();
    let n = all.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let related = (i < ins.len() && j >= ins.len())
                || s.edge_between(all[i], all[j]).is_some()
                || s.edge_between(all[j], all[i]).is_some();
            if related {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(all[i]);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn hypothesis(a: &ComplexOfGroups, v: usize, case: LinkCase, allowed: &dyn Fn(usize) -> bool) -> bool {
    let s = a.scwol();
    let nb = neighbourhood(a, v, allowed);
    match case {
        LinkCase::I => a.group(v).is_trivial(),
        LinkCase::II => nb.ins.is_empty(),
        LinkCase::III => {
            nb.outs.is_empty()
                && nb.ins.iter().all(|&e| {
                    nb.ins.iter().all(|&f| s.edge_between(s.edge(e).src, s.edge(f).src).is_none())
                })
        }
        LinkCase::IV => neighbour_components(a, v, allowed).len() >= 2,
    }
}

fn fast_on(
    a: &ComplexOfGroups,
    v: usize,
    case: LinkCase,
    allowed: &dyn Fn(usize) -> bool,
) -> Result<LinkGraph, LinkError> {
    if !hypothesis(a, v, case, allowed) {
        return Err(LinkError::Hypothesis { vertex: a.info(v).id.clone(), case });
    }
    let s = a.scwol();
    let nb = neighbourhood(a, v, allowed);
    match case {
        LinkCase::I | LinkCase::II => {
            let nbrs: Vec<usize> = nb
                .ins
                .iter()
                .map(|&e| s.edge(e).src)
                .chain(nb.outs.iter().map(|&e| s.edge(e).dst))
                .collect();
            let vertices = nbrs
                .iter()
                .map(|&u| {
                    let info = a.info(u);
                    LinkVertex { color: info.color, origin: info.id.clone(), label: info.id.clone() }
                })
                .collect();
            let mut order = Vec::new();
            for (i, &x) in nbrs.iter().enumerate() {
                for (j, &y) in nbrs.iter().enumerate() {
                    let through = i < nb.ins.len() && j >= nb.ins.len();
                    if i != j && (through || s.edge_between(x, y).is_some()) {
                        order.push((i, j));
                    }
                }
            }
            realize(a, v, vertices, order)
        }
        LinkCase::III => {
            let mut vertices = Vec::new();
            for &e in &nb.ins {
                let info = a.info(s.edge(e).src);
                let index: BigUint = a.map(e).index();
                let count: u64 = u64::try_from(&index).unwrap_or(u64::MAX);
                if count > max_order() {
                    return Err(LinkError::Group {
                        vertex: a.info(v).id.clone(),
                        source: GroupError::TooLarge { order: index, bound: max_order() },
                    });
                }
                for k in 0..count {
                    vertices.push(LinkVertex {
                        color: info.color,
                        origin: info.id.clone(),
                        label: format!("{}:{k}", info.id),
                    });
                }
            }
            realize(a, v, vertices, Vec::new())
        }
        LinkCase::IV => {
            let mut out = LinkGraph { order: Some(Vec::new()), ..LinkGraph::default() };
            for comp in neighbour_components(a, v, allowed) {
                let inside = |u: usize| comp.binary_search(&u).is_ok() && allowed(u);
                let sub_case = [LinkCase::I, LinkCase::II, LinkCase::III]
                    .into_iter()
                    .find(|&c| hypothesis(a, v, c, &inside));
                let part = match sub_case {
                    Some(c) => fast_on(a, v, c, &inside)?,
                    None => development_on(a, v, &inside, max_order())?,
                };
                out = out.disjoint_union(&part);
            }
            Ok(out)
        }
    }
}

/// Isomorphism and automorphism search with color/degree refinement.
fn refine(graphs: &[&LinkGraph], use_colors: bool) -> Vec<Vec<usize>> {
    let adjs: Vec<Vec<Vec<usize>>> = graphs.iter().map(|g| g.adjacency()).collect();
    let mut classes: Vec<Vec<usize>> = graphs
        .iter()
        .zip(&adjs)
        .map(|(g, adj)| {
            g.vertices
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let c = if use_colors { v.color as usize } else { 0 };
                    c * 100_000 + adj[i].len()
                })
                .collect()
        })
        .collect();
    loop {
        let mut names: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut signatures: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
        for (gi, adj) in adjs.iter().enumerate() {
            let sig: Vec<(usize, Vec<usize>)> = (0..adj.len())
                .map(|i| {
                    let mut nbr: Vec<usize> = adj[i].iter().map(|&j| classes[gi][j]).collect();
                    nbr.sort_unstable();
                    (classes[gi][i], nbr)
                })
                .collect();
            for s in &sig {
                let next = names.len();
                names.entry(s.clone()).or_insert(next);
            }
            signatures.push(sig);
        }
        let next: Vec<Vec<usize>> = signatures
            .iter()
            .map(|sig| sig.iter().map(|s| names[s]).collect())
            .collect();
        let count = |c: &Vec<Vec<usize>>| {
            let mut all: Vec<usize> = c.iter().flatten().copied().collect();
            all.sort_unstable();
            all.dedup();
            all.len()
        };
        let stable = count(&next) == count(&classes);
        classes = next;
        if stable {
            return classes;
        }
    }
}

fn search(
    a: &LinkGraph,
    b: &LinkGraph,
    use_colors: bool,
    limit: u64,
) -> u64 {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return 0;
    }
    let classes = refine(&[a, b], use_colors);
    let (ca, cb) = (&classes[0], &classes[1]);
    let mut ha = ca.clone();
    let mut hb = cb.clone();
    ha.sort_unstable();
    hb.sort_unstable();
    if ha != hb {
        return 0;
    }
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    let n = a.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for s in 0..n {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &adj_a[x] {
                if !placed[y] {
                    placed[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut count = 0;
    extend(&order, 0, ca, cb, &adj_a, &adj_b, &mut map, &mut used, &mut count, limit);
    count
}

#[allow(clippy::too_many_arguments)]
fn extend(
    order: &[usize],
    depth: usize,
    ca: &[usize],
    cb: &[usize],
    adj_a: &[Vec<usize>],
    adj_b: &[Vec<usize>],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    count: &mut u64,
    limit: u64,
) {
    if *count >= limit {
        return;
    }
    if depth == order.len() {
        *count += 1;
        return;
    }
    let x = order[depth];
    let mapped_nbr = adj_a[x].iter().find(|&&y| map[y] != usize::MAX).copied();
    let candidates: Vec<usize> = match mapped_nbr {
        Some(y) => adj_b[map[y]].clone(),
        None => (0..cb.len()).collect(),
    };
    for c in candidates {
        if used[c] || cb[c] != ca[x] {
            continue;
        }
        let consistent = adj_a[x].iter().all(|&y| map[y] == usize::MAX || adj_b[c].binary_search(&map[y]).is_ok())
            && adj_a[x].iter().filter(|&&y| map[y] != usize::MAX).count()
                == adj_b[c].iter().filter(|&&z| used[z]).count();
        if !consistent {
            continue;
        }
        map[x] = c;
        used[c] = true;
        extend(order, depth + 1, ca, cb, adj_a, adj_b, map, used, count, limit);
        map[x] = usize::MAX;
        used[c] = false;
        if *count >= limit {
            return;
        }
    }
}

/// Color-preserving graph isomorphism.
pub fn graph_iso(a: &LinkGraph, b: &LinkGraph) -> bool {
    search(a, b, true, 1) == 1
}

/// Number of graph automorphisms, colors ignored.
pub fn aut_order(g: &LinkGraph) -> u64 {
    search(g, g, false, u64::MAX)
}

/// Expected links keyed `color/kind`, falling back to `color`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinkCatalog {
    pub entries: BTreeMap<String, LinkGraph>,
}

impl LinkCatalog {
    pub fn insert(&mut self, key: impl Into<String>, g: LinkGraph) {
        self.entries.insert(key.into(), g);
    }

    pub fn lookup(&self, color: Color, kind: &str) -> Option<(&str, &LinkGraph)> {
        let specific = format!("{color}/{kind}");
        self.entries
            .get_key_value(&specific)
            .or_else(|| self.entries.get_key_value(&color.to_string()))
            .map(|(k, g)| (k.as_str(), g))
    }

    /// Whether no two entries are isomorphic.
    pub fn pairwise_distinct(&self) -> bool {
        let all: Vec<&LinkGraph> = self.entries.values().collect();
        (0..all.len()).all(|i| (i + 1..all.len()).all(|j| !graph_iso(all[i], all[j])))
    }
}

/// Parameters of a reference catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogKind {
    /// Polygon towers: corner label `m`, `2x`-gon faces, `greens` green neighbours per purple.
    Davis { m: u64, x: u64, greens: usize },
    /// Buildings: panel sizes, ∅-link of the chamber complex, and blue links by type.
    Building { p1: u64, p2: u64, empty_link: LinkGraph, blues: BTreeMap<String, LinkGraph> },
}

/// Reference links for a construction kind.
pub fn reference_catalog(kind: &CatalogKind) -> LinkCatalog {
    use Color::*;
    let mut c = LinkCatalog::default();
    match kind {
        CatalogKind::Davis { m, x, greens } => {
            let purple = LinkGraph::cycle(4 * *m as usize, &[Blue, Red])
                .disjoint_union(&LinkGraph::isolated(*greens, Green));
            c.insert("purple", purple);
            c.insert("red", LinkGraph::cycle(4 * *x as usize, &[Purple, Blue]));
            c.insert("blue", LinkGraph::cycle(4, &[Purple, Red]));
            c.insert("green", LinkGraph::isolated(2, Purple));
        }
        CatalogKind::Building { p1, p2, empty_link, blues } => {
            c.insert("red", LinkGraph::isolated(*p1 as usize, Purple));
            c.insert("green", LinkGraph::isolated(*p2 as usize, Purple));
            let purple = empty_link
                .unordered()
                .disjoint_union(&LinkGraph::isolated(1, Red))
                .disjoint_union(&LinkGraph::isolated(1, Green));
            c.insert("purple", purple);
            for (t, g) in blues {
                c.insert(format!("blue/{t}"), g.unordered());
            }
        }
    }
    c
}

/// One vertex's comparison against the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkCheck {
    pub vertex: String,
    pub color: Color,
    pub key: Option<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Per-vertex results and per-color tallies.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CatalogReport {
    pub checks: Vec<LinkCheck>,
    /// color -> (passed, failed)
    pub by_color: BTreeMap<String, (usize, usize)>,
}

impl CatalogReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&LinkCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    fn record(&mut self, check: LinkCheck) {
        let tally = self.by_color.entry(check.color.to_string()).or_insert((0, 0));
        if check.pass {
            tally.0 += 1;
        } else {
            tally.1 += 1;
        }
        self.checks.push(check);
    }
}

/// Compare every vertex link of `a` with its catalog entry.
pub fn catalog_check(a: &ComplexOfGroups, catalog: &LinkCatalog) -> CatalogReport {
    let mut report = CatalogReport::default();
    for v in 0..a.vertex_count() {
        let info = a.info(v);
        let mut check = LinkCheck {
            vertex: info.id.clone(),
            color: info.color,
            key: None,
            pass: false,
            reason: None,
        };
        match catalog.lookup(info.color, &info.kind) {
            None => check.reason = Some("no catalog entry".into()),
            Some((key, expected)) => {
                check.key = Some(key.to_string());
                let actual = match applicable_case(a, v) {
                    Some(case) => link_fast(a, v, case),
                    None => link(a, v),
                };
                match actual {
                    Ok(g) if graph_iso(&g.unordered(), expected) => check.pass = true,
                    Ok(g) => {
                        check.reason = Some(format!(
                            "link has {} vertices and {} edges, expected {} and {}",
                            g.vertex_count(),
                            g.edge_count(),
                            expected.vertex_count(),
                            expected.edge_count()
                        ))
                    }
                    Err(e) => check.reason = Some(e.to_string()),
                }
            }
        }
        report.record(check);
    }
    report
}

/// Coset-count check: incoming purple cosets sum to `p1` at reds and `p2` at greens.
pub fn building_coset_check(a: &ComplexOfGroups, p1: u64, p2: u64) -> CatalogReport {
    let mut report = CatalogReport::default();
    let s = a.scwol();
    for v in 0..a.vertex_count() {
        let color = a.color(v);
        let expected = match color {
            Color::Red => p1,
            Color::Green => p2,
            _ => continue,
        };
        let total: BigUint = s
            .in_edges(v)
            .iter()
            .filter(|&&e| a.color(s.edge(e).src) == Color::Purple)
            .map(|&e| a.map(e).index())
            .sum();
        let pass = total == BigUint::from(expected);
        report.record(LinkCheck {
            vertex: a.info(v).id.clone(),
            color,
            key: None,
            pass,
            reason: (!pass).then(|| format!("coset count {total}, expected {expected}")),
        });
    }
    report
}
