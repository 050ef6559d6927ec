//! Scwols and simple complexes of groups.
//!
//! A scwol here is a poset: at most one edge per ordered pair, with composites
//! generated as the transitive closure of the given edges.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{Embedding, FactorRule, GroupError, StructuredGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CogError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdgeId(String),
    #[error("edge {edge:?} refers to missing vertex {vertex:?}")]
    MissingVertex { edge: String, vertex: String },
    #[error("edge {edge:?}: embedding source or target differs from the vertex groups")]
    GroupMismatch { edge: String },
    #[error("edge {edge:?}: {source}")]
    Group { edge: String, source: GroupError },
    #[error("vertex {0:?} is neither a sink nor a source with two outgoing edges")]
    NotGraphOfGroups(String),
    #[error("edge {0:?} is not an isomorphism, so it cannot be reversed")]
    NotInvertible(String),
    #[error("malformed document: {0}")]
    Document(String),
}

/// Vertex colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
    Green,
    Purple,
    #[default]
    None,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Color::Red => "red",
            Color::Blue => "blue",
            Color::Green => "green",
            Color::Purple => "purple",
            Color::None => "none",
        };
        f.write_str(s)
    }
}

/// Identity, colour and type label of a scwol vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexInfo {
    pub id: String,
    pub color: Color,
    pub kind: String,
}

impl VertexInfo {
    pub fn new(id: impl Into<String>, color: Color, kind: impl Into<String>) -> Self {
        VertexInfo { id: id.into(), color, kind: kind.into() }
    }
}

/// A scwol edge; `given` edges are the ones stored on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScwolEdge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    pub given: bool,
}

/// Structural problems found while closing a scwol or checking a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Loop { edge: String },
    DuplicateEdge { edge: String },
    Cycle { vertex: String },
    NotInjective { edge: String },
    NotCommuting { first: String, second: String, composite: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Loop { edge } => write!(f, "edge {edge} is a loop"),
            Violation::DuplicateEdge { edge } => write!(f, "edge {edge} repeats an ordered pair"),
            Violation::Cycle { vertex } => write!(f, "directed cycle through {vertex}"),
            Violation::NotInjective { edge } => write!(f, "edge {edge} is not injective"),
            Violation::NotCommuting { first, second, composite } => {
                write!(f, "{second} after {first} differs from {composite}")
            }
        }
    }
}

/// Directed loop-free graph closed under composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scwol {
    vertices: Vec<VertexInfo>,
    edges: Vec<ScwolEdge>,
    lookup: HashMap<(usize, usize), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    defects: Vec<Violation>,
    /// For each composite edge, the given edges of the path it was built from.
    paths: HashMap<usize, Vec<usize>>,
}

impl Scwol {
    /// Scwol from given edges `(src, dst)` with ids `src>dst`.
    pub fn new(vertices: Vec<VertexInfo>, given: Vec<(usize, usize)>) -> Self {
        let given = given
            .into_iter()
            .map(|(a, b)| (format!("{}>{}", vertices[a].id, vertices[b].id), a, b))
            .collect();
        Scwol::with_ids(vertices, given)
    }

    /// Scwol from named given edges; loops, repeated pairs and cycles are
    /// recorded as defects instead of failing.
    pub fn with_ids(vertices: Vec<VertexInfo>, given: Vec<(String, usize, usize)>) -> Self {
        let n = vertices.len();
        let mut s = Scwol {
            vertices,
            edges: Vec::new(),
            lookup: HashMap::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            defects: Vec::new(),
            paths: HashMap::new(),
        };
        for (id, a, b) in given {
            if a == b {
                s.defects.push(Violation::Loop { edge: id });
            } else if s.lookup.contains_key(&(a, b)) {
                s.defects.push(Violation::DuplicateEdge { edge: id });
            } else {
                s.push_edge(ScwolEdge { id, src: a, dst: b, given: true });
            }
        }
        if let Some(v) = s.find_cycle() {
            let id = s.vertices[v].id.clone();
            s.defects.push(Violation::Cycle { vertex: id });
            return s;
        }
        s.close();
        s
    }

    fn push_edge(&mut self, e: ScwolEdge) -> usize {
        let idx = self.edges.len();
        self.lookup.insert((e.src, e.dst), idx);
        self.out_adj[e.src].push(idx);
        self.in_adj[e.dst].push(idx);
        self.edges.push(e);
        idx
    }

    fn find_cycle(&self) -> Option<usize> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_adj[v].len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut done = 0;
        while let Some(v) = queue.pop_front() {
            done += 1;
            for &e in &self.out_adj[v] {
                let w = self.edges[e].dst;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (done < n).then(|| (0..n).find(|&v| indeg[v] > 0).unwrap_or(0))
    }

    fn close(&mut self) {
        let n = self.vertices.len();
        let given_out: Vec<Vec<usize>> = self.out_adj.clone();
        let mut added = Vec::new();
        for a in 0..n {
            let mut parent: HashMap<usize, Vec<usize>> = HashMap::new();
            let mut queue = VecDeque::new();
            for &e in &given_out[a] {
                let b = self.edges[e].dst;
                parent.entry(b).or_insert_with(|| vec![e]);
                queue.push_back(b);
            }
            let mut order = Vec::new();
            while let Some(b) = queue.pop_front() {
                order.push(b);
                let path = parent[&b].clone();
                for &e in &given_out[b] {
                    let c = self.edges[e].dst;
                    if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(c) {
                        let mut p = path.clone();
                        p.push(e);
                        slot.insert(p);
                        queue.push_back(c);
                    }
                }
            }
            order.sort_unstable();
            for c in order {
                if !self.lookup.contains_key(&(a, c)) {
                    added.push((a, c, parent[&c].clone()));
                }
            }
        }
        for (a, c, path) in added {
            let id = format!("{}~{}", self.vertices[a].id, self.vertices[c].id);
            let idx = self.push_edge(ScwolEdge { id, src: a, dst: c, given: false });
            self.paths.insert(idx, path);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edges, composites included.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn given_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.given).count()
    }

    pub fn vertices(&self) -> &[VertexInfo] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &VertexInfo {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[ScwolEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &ScwolEdge {
        &self.edges[e]
    }

    /// Index of the edge `a → b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&(a, b)).copied()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn defects(&self) -> &[Violation] {
        &self.defects
    }

    /// Given edges along which a composite edge was built.
    pub fn composite_path(&self, e: usize) -> Option<&[usize]> {
        self.paths.get(&e).map(|p| p.as_slice())
    }

    /// Composable pairs `(e, e', ee')` with `t(e) = i(e')`.
    pub fn composable_pairs(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            for &f in &self.out_adj[edge.dst] {
                let c = self.lookup[&(edge.src, self.edges[f].dst)];
                out.push((e, f, c));
            }
        }
        out
    }

    /// Given edges reversed, composites regenerated.
    pub fn opposite(&self) -> Scwol {
        let given = self
            .edges
            .iter()
            .filter(|e| e.given)
            .map(|e| (e.id.clone(), e.dst, e.src))
            .collect();
        Scwol::with_ids(self.vertices.clone(), given)
    }
}

/// A vertex of a complex of groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    pub info: VertexInfo,
    pub group: StructuredGroup,
    pub measured: bool,
    pub level: Option<usize>,
}

/// Family name and parameters recorded in generated complexes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FamilyTag {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

/// Simple complex of groups over a scwol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexOfGroups {
    scwol: Scwol,
    groups: Vec<StructuredGroup>,
    measured: Vec<bool>,
    levels: Vec<Option<usize>>,
    maps: Vec<Embedding>,
    pub family: Option<FamilyTag>,
}

/// Incremental construction of a complex from given edges.
#[derive(Debug, Clone, Default)]
pub struct ComplexBuilder {
    vertices: Vec<VertexData>,
    index: HashMap<String, usize>,
    edges: Vec<(String, usize, usize, Embedding)>,
    edge_ids: HashMap<String, usize>,
    family: Option<FamilyTag>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        ComplexBuilder::default()
    }

    pub fn family(&mut self, name: &str, params: &[(&str, String)]) -> &mut Self {
        self.family = Some(FamilyTag {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        });
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn group(&self, v: usize) -> &StructuredGroup {
        &self.vertices[v].group
    }

    pub fn vertex_data(&self, v: usize) -> &VertexData {
        &self.vertices[v]
    }

    pub fn lookup(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn add_vertex(
        &mut self,
        id: impl Into<String>,
        color: Color,
        kind: impl Into<String>,
        group: StructuredGroup,
        measured: bool,
    ) -> Result<usize, CogError> {
        self.add_vertex_data(VertexData {
            info: VertexInfo::new(id, color, kind),
            group,
            measured,
            level: None,
        })
    }

    pub fn add_vertex_data(&mut self, data: VertexData) -> Result<usize, CogError> {
        if self.index.contains_key(&data.info.id) {
            return Err(CogError::DuplicateVertex(data.info.id));
        }
        let idx = self.vertices.len();
        self.index.insert(data.info.id.clone(), idx);
        self.vertices.push(data);
        Ok(idx)
    }

    pub fn set_level(&mut self, v: usize, level: usize) {
        self.vertices[v].level = Some(level);
    }

    /// Edge with an explicit embedding; id `src>dst`.
    pub fn add_edge(&mut self, src: usize, dst: usize, map: Embedding) -> Result<usize, CogError> {
        let id = format!("{}>{}", self.vertices[src].info.id, self.vertices[dst].info.id);
        self.add_named_edge(id, src, dst, map)
    }

    pub fn add_named_edge(
        &mut self,
        id: String,
        src: usize,
        dst: usize,
        map: Embedding,
    ) -> Result<usize, CogError> {
        if self.edge_ids.contains_key(&id) {
            return Err(CogError::DuplicateEdgeId(id));
        }
        if map.source() != &self.vertices[src].group || map.target() != &self.vertices[dst].group {
            return Err(CogError::GroupMismatch { edge: id });
        }
        self.edge_ids.insert(id.clone(), self.edges.len());
        self.edges.push((id, src, dst, map));
        Ok(self.edges.len() - 1)
    }

    /// Edge from explicit rules, checked as a monomorphism.
    pub fn add_rules(
        &mut self,
        src: usize,
        dst: usize,
        rules: Vec<FactorRule>,
    ) -> Result<usize, CogError> {
        let id = format!("{}>{}", self.vertices[src].info.id, self.vertices[dst].info.id);
        let map = Embedding::monomorphism(
            self.vertices[src].group.clone(),
            self.vertices[dst].group.clone(),
            rules,
        )
        .map_err(|source| CogError::Group { edge: id.clone(), source })?;
        self.add_named_edge(id, src, dst, map)
    }

    /// Edge mapping source factor `i` identically onto target factor `positions[i]`.
    pub fn add_inclusion(&mut self, src: usize, dst: usize, positions: &[usize]) -> Result<usize, CogError> {
        let id = format!("{}>{}", self.vertices[src].info.id, self.vertices[dst].info.id);
        let map = Embedding::factor_inclusion(&self.vertices[src].group, &self.vertices[dst].group, positions)
            .map_err(|source| CogError::Group { edge: id.clone(), source })?;
        self.add_named_edge(id, src, dst, map)
    }

    /// Edge onto the leading factors of the target.
    pub fn add_prefix(&mut self, src: usize, dst: usize) -> Result<usize, CogError> {
        let n = self.vertices[src].group.factors().len();
        let positions: Vec<usize> = (0..n).collect();
        self.add_inclusion(src, dst, &positions)
    }

    pub fn build(self) -> Result<ComplexOfGroups, CogError> {
        let infos: Vec<VertexInfo> = self.vertices.iter().map(|v| v.info.clone()).collect();
        let given: Vec<(String, usize, usize)> =
            self.edges.iter().map(|(id, a, b, _)| (id.clone(), *a, *b)).collect();
        let scwol = Scwol::with_ids(infos, given);
        let by_id: HashMap<&str, &Embedding> =
            self.edges.iter().map(|(id, _, _, m)| (id.as_str(), m)).collect();
        let mut maps = Vec::with_capacity(scwol.edge_count());
        for (idx, e) in scwol.edges().iter().enumerate() {
            if e.given {
                maps.push(by_id[e.id.as_str()].clone());
                continue;
            }
            let path = scwol.composite_path(idx).expect("composite has a path");
            let mut map = maps[path[0]].clone();
            for &p in &path[1..] {
                map = map
                    .then(&maps[p])
                    .map_err(|source| CogError::Group { edge: e.id.clone(), source })?;
            }
            maps.push(map);
        }
        Ok(ComplexOfGroups {
            scwol,
            groups: self.vertices.iter().map(|v| v.group.clone()).collect(),
            measured: self.vertices.iter().map(|v| v.measured).collect(),
            levels: self.vertices.iter().map(|v| v.level).collect(),
            maps,
            family: self.family,
        })
    }
}

/// Result of `validate`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ComplexOfGroups {
    /// Complex with trivial groups over a scwol, every vertex measured.
    pub fn trivial_over(scwol: &Scwol) -> Result<Self, CogError> {
        let mut b = ComplexBuilder::new();
        for v in scwol.vertices() {
            b.add_vertex_data(VertexData {
                info: v.clone(),
                group: StructuredGroup::trivial(),
                measured: true,
                level: None,
            })?;
        }
        for e in scwol.edges().iter().filter(|e| e.given) {
            let map = Embedding::identity(&StructuredGroup::trivial());
            b.add_named_edge(e.id.clone(), e.src, e.dst, map)?;
        }
        b.build()
    }

    pub fn scwol(&self) -> &Scwol {
        &self.scwol
    }

    pub fn vertex_count(&self) -> usize {
        self.scwol.vertex_count()
    }

    pub fn group(&self, v: usize) -> &StructuredGroup {
        &self.groups[v]
    }

    pub fn groups(&self) -> &[StructuredGroup] {
        &self.groups
    }

    pub fn map(&self, e: usize) -> &Embedding {
        &self.maps[e]
    }

    pub fn is_measured(&self, v: usize) -> bool {
        self.measured[v]
    }

    pub fn level(&self, v: usize) -> Option<usize> {
        self.levels[v]
    }

    pub fn info(&self, v: usize) -> &VertexInfo {
        self.scwol.vertex(v)
    }

    pub fn color(&self, v: usize) -> Color {
        self.scwol.vertex(v).color
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.scwol.find(id)
    }

    pub fn vertex_data(&self, v: usize) -> VertexData {
        VertexData {
            info: self.scwol.vertex(v).clone(),
            group: self.groups[v].clone(),
            measured: self.measured[v],
            level: self.levels[v],
        }
    }

    /// Structural, injectivity and commutation violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations: Vec<Violation> = self.scwol.defects().to_vec();
        for (e, edge) in self.scwol.edges().iter().enumerate() {
            if edge.given && !self.maps[e].is_injective() {
                violations.push(Violation::NotInjective { edge: edge.id.clone() });
            }
        }
        for (e, f, c) in self.scwol.composable_pairs() {
            let ok = match self.maps[e].then(&self.maps[f]) {
                Ok(m) => m.agrees_with(&self.maps[c]),
                Err(_) => false,
            };
            if !ok {
                violations.push(Violation::NotCommuting {
                    first: self.scwol.edge(e).id.clone(),
                    second: self.scwol.edge(f).id.clone(),
                    composite: self.scwol.edge(c).id.clone(),
                });
            }
        }
        ValidationReport { violations }
    }

    /// Builder holding this complex's vertices and given edges.
    pub fn to_builder(&self) -> ComplexBuilder {
        let mut b = ComplexBuilder::new();
        for v in 0..self.vertex_count() {
            b.add_vertex_data(self.vertex_data(v)).expect("ids are unique");
        }
        for (e, edge) in self.scwol.edges().iter().enumerate() {
            if edge.given {
                b.add_named_edge(edge.id.clone(), edge.src, edge.dst, self.maps[e].clone())
                    .expect("edge ids are unique");
            }
        }
        b.family = self.family.clone();
        b
    }

    /// `G × A`: every group gets `G` as leading factors.
    pub fn product_with(&self, g: &StructuredGroup) -> ComplexOfGroups {
        let mut out = self.clone();
        out.groups = self.groups.iter().map(|h| g.product(h)).collect();
        out.maps = self.maps.iter().map(|m| m.with_prefix(g)).collect();
        out
    }

    /// All arrows reversed; needs every edge to be an isomorphism.
    pub fn opposite(&self) -> Result<ComplexOfGroups, CogError> {
        let mut b = ComplexBuilder::new();
        for v in 0..self.vertex_count() {
            b.add_vertex_data(self.vertex_data(v))?;
        }
        for (e, edge) in self.scwol.edges().iter().enumerate() {
            if edge.given {
                let inv = self.maps[e]
                    .inverse()
                    .map_err(|_| CogError::NotInvertible(edge.id.clone()))?;
                b.add_named_edge(edge.id.clone(), edge.dst, edge.src, inv)?;
            }
        }
        b.family = self.family.clone();
        b.build()
    }

    /// Copy with the given measured flags.
    pub fn with_measured(&self, measured: Vec<bool>) -> ComplexOfGroups {
        assert_eq!(measured.len(), self.vertex_count());
        let mut out = self.clone();
        out.measured = measured;
        out
    }

    /// Copy with one vertex group replaced and every incident map retargeted by
    /// `f`; used by falsifiability probes.
    pub fn replace_group(
        &self,
        v: usize,
        group: StructuredGroup,
        retarget: impl Fn(&Embedding, &StructuredGroup, bool) -> Result<Embedding, GroupError>,
    ) -> Result<ComplexOfGroups, CogError> {
        let mut b = ComplexBuilder::new();
        for u in 0..self.vertex_count() {
            let mut d = self.vertex_data(u);
            if u == v {
                d.group = group.clone();
            }
            b.add_vertex_data(d)?;
        }
        for (e, edge) in self.scwol.edges().iter().enumerate() {
            if !edge.given {
                continue;
            }
            let map = if edge.src == v || edge.dst == v {
                retarget(&self.maps[e], &group, edge.src == v)
                    .map_err(|source| CogError::Group { edge: edge.id.clone(), source })?
            } else {
                self.maps[e].clone()
            };
            b.add_named_edge(edge.id.clone(), edge.src, edge.dst, map)?;
        }
        b.family = self.family.clone();
        b.build()
    }

    /// Serialized document, pretty printed.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<ComplexOfGroups, CogError> {
        let doc: ComplexDocument =
            serde_json::from_str(text).map_err(|e| CogError::Document(e.to_string()))?;
        ComplexOfGroups::from_document(doc)
    }

    pub fn to_document(&self) -> ComplexDocument {
        let vertices = (0..self.vertex_count())
            .map(|v| {
                let info = self.scwol.vertex(v);
                VertexDocument {
                    id: info.id.clone(),
                    color: info.color,
                    kind: info.kind.clone(),
                    group: self.groups[v].clone(),
                    measured: self.measured[v],
                    level: self.levels[v],
                }
            })
            .collect();
        let edges = self
            .scwol
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.given)
            .map(|(i, e)| EdgeDocument {
                id: e.id.clone(),
                src: self.scwol.vertex(e.src).id.clone(),
                dst: self.scwol.vertex(e.dst).id.clone(),
                embedding: self.maps[i].rules().to_vec(),
            })
            .collect();
        ComplexDocument { vertices, edges, family: self.family.clone() }
    }

    pub fn from_document(doc: ComplexDocument) -> Result<ComplexOfGroups, CogError> {
        let mut b = ComplexBuilder::new();
        for v in doc.vertices {
            b.add_vertex_data(VertexData {
                info: VertexInfo::new(v.id, v.color, v.kind),
                group: v.group,
                measured: v.measured,
                level: v.level,
            })?;
        }
        for e in doc.edges {
            let src = b.lookup(&e.src).ok_or_else(|| CogError::MissingVertex {
                edge: e.id.clone(),
                vertex: e.src.clone(),
            })?;
            let dst = b.lookup(&e.dst).ok_or_else(|| CogError::MissingVertex {
                edge: e.id.clone(),
                vertex: e.dst.clone(),
            })?;
            let map = Embedding::new(b.group(src).clone(), b.group(dst).clone(), e.embedding)
                .map_err(|source| CogError::Group { edge: e.id.clone(), source })?;
            b.add_named_edge(e.id, src, dst, map)?;
        }
        b.family = doc.family;
        b.build()
    }
}

/// On-disk vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDocument {
    pub id: String,
    #[serde(default)]
    pub color: Color,
    #[serde(rename = "type", default)]
    pub kind: String,
    #[serde(default)]
    pub group: StructuredGroup,
    #[serde(default = "default_measured")]
    pub measured: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
}

fn default_measured() -> bool {
    true
}

/// On-disk edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(default)]
    pub embedding: Vec<FactorRule>,
}

/// On-disk complex of groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub vertices: Vec<VertexDocument>,
    pub edges: Vec<EdgeDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
}

/// A complex whose vertices are sinks or two-edge sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    complex: ComplexOfGroups,
    sinks: Vec<usize>,
    sources: Vec<usize>,
}

/// Checks the sink/source shape and marks sources unmeasured.
pub fn as_graph_of_groups(a: &ComplexOfGroups) -> Result<GraphOfGroups, CogError> {
    let s = a.scwol();
    let mut sinks = Vec::new();
    let mut sources = Vec::new();
    for v in 0..s.vertex_count() {
        let (outs, ins) = (s.out_edges(v).len(), s.in_edges(v).len());
        if outs == 0 {
            sinks.push(v);
        } else if outs == 2 && ins == 0 {
            sources.push(v);
        } else {
            return Err(CogError::NotGraphOfGroups(s.vertex(v).id.clone()));
        }
    }
    let mut measured: Vec<bool> = (0..s.vertex_count()).map(|v| a.is_measured(v)).collect();
    for &v in &sources {
        measured[v] = false;
    }
    Ok(GraphOfGroups { complex: a.with_measured(measured), sinks, sources })
}

impl GraphOfGroups {
    pub fn complex(&self) -> &ComplexOfGroups {
        &self.complex
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.sinks.binary_search(&v).is_ok()
    }

    /// Covering degree at a sink: sum of indices of incoming edge groups.
    pub fn degree(&self, v: usize) -> num_bigint::BigUint {
        let c = &self.complex;
        c.scwol()
            .in_edges(v)
            .iter()
            .map(|&e| c.map(e).index())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Factor;

    fn two_sinks() -> ComplexOfGroups {
        let mut b = ComplexBuilder::new();
        let s = b.add_vertex("s", Color::Purple, "edge", StructuredGroup::trivial(), true).unwrap();
        let r = b.add_vertex("r", Color::Red, "v", StructuredGroup::cyclic(2), true).unwrap();
        let u = b.add_vertex("u", Color::Blue, "v", StructuredGroup::cyclic(3), true).unwrap();
        b.add_rules(s, r, vec![]).unwrap();
        b.add_rules(s, u, vec![]).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn closure_and_counts() {
        let info = |i: &str| VertexInfo::new(i, Color::None, i);
        let s = Scwol::new(vec![info("a"), info("b"), info("c")], vec![(0, 1), (1, 2)]);
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.composable_pairs().len(), 1);
        assert!(s.defects().is_empty());
        let looped = Scwol::new(vec![info("a")], vec![(0, 0)]);
        assert_eq!(looped.defects().len(), 1);
        let cyc = Scwol::new(vec![info("a"), info("b")], vec![(0, 1), (1, 0)]);
        assert!(matches!(cyc.defects()[0], Violation::Cycle { .. }));
    }

    #[test]
    fn validates_and_detects_non_injective() {
        assert!(two_sinks().validate().is_valid());
        let mut b = ComplexBuilder::new();
        let a = b.add_vertex("a", Color::None, "", StructuredGroup::cyclic(4), true).unwrap();
        let c = b.add_vertex("c", Color::None, "", StructuredGroup::cyclic(2), true).unwrap();
        let map = Embedding::new(
            StructuredGroup::cyclic(4),
            StructuredGroup::cyclic(2),
            vec![FactorRule::Cyclic { target: 0, mult: 1 }],
        )
        .unwrap();
        b.add_edge(a, c, map).unwrap();
        let bad = b.build().unwrap();
        assert_eq!(
            bad.validate().violations,
            vec![Violation::NotInjective { edge: "a>c".into() }]
        );
    }

    #[test]
    fn graph_of_groups_shape() {
        let g = as_graph_of_groups(&two_sinks()).unwrap();
        assert_eq!(g.sinks(), &[1, 2]);
        assert_eq!(g.sources(), &[0]);
        assert!(!g.complex().is_measured(0));
        assert_eq!(g.degree(1), 2u32.into());
        let single = ComplexBuilder::new();
        let mut single = single;
        single.add_vertex("v", Color::None, "", StructuredGroup::trivial(), true).unwrap();
        assert!(as_graph_of_groups(&single.build().unwrap()).is_ok());
    }

    #[test]
    fn round_trip_and_defaults() {
        let c = two_sinks();
        let text = c.to_json();
        let back = ComplexOfGroups::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let doc = r#"{"vertices":[{"id":"a"}],"edges":[{"id":"e","src":"a","dst":"z"}]}"#;
        assert!(matches!(
            ComplexOfGroups::from_json(doc),
            Err(CogError::MissingVertex { .. })
        ));
        let doc = r#"{"vertices":[{"id":"a","group":{"factors":[{"cyclic":5}]}}],"edges":[]}"#;
        let one = ComplexOfGroups::from_json(doc).unwrap();
        assert_eq!(one.color(0), Color::None);
        assert_eq!(one.group(0).factors(), &[Factor::Cyclic(5)]);
    }

    #[test]
    fn opposite_and_product() {
        let chamber = crate::coxeter::CoxeterMatrix::path(&[3]).chamber();
        let c = ComplexOfGroups::trivial_over(&chamber).unwrap();
        let op = c.opposite().unwrap();
        let empty = op.find("{}").unwrap();
        assert_eq!(op.scwol().out_edges(empty).len(), 0);
        assert_eq!(op.scwol().in_edges(empty).len(), 3);
        assert_eq!(op.opposite().unwrap().to_json(), c.to_json());
        assert!(op.validate().is_valid());
        assert!(matches!(two_sinks().opposite(), Err(CogError::NotInvertible(_))));
        let scaled = two_sinks().product_with(&StructuredGroup::cyclic(2));
        assert_eq!(scaled.group(2).order(), 6u32.into());
        assert!(scaled.validate().is_valid());
    }
}
