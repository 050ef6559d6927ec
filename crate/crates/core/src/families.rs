//! Generators for the tree, polygon-tower, glued and building families.

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::cog::{as_graph_of_groups, CogError, Color, ComplexBuilder, ComplexOfGroups, GraphOfGroups};
use crate::coxeter::{type_label, CoxeterError, CoxeterMatrix, WordSolver, DEFAULT_WORD_BUDGET};
use crate::groups::{Embedding, Factor, FactorRule, GroupError, StructuredGroup};
use crate::links::{local_development, reference_catalog, CatalogKind, LinkCatalog, LinkGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameter domain: {0}")]
    Domain(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("missing parameter {0:?}")]
    MissingParam(String),
    #[error("parameter {key:?} has invalid value {value:?}")]
    BadParam { key: String, value: String },
    #[error(transparent)]
    Cog(#[from] CogError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

type Result<T> = std::result::Result<T, FamilyError>;

fn domain(msg: impl Into<String>) -> FamilyError {
    FamilyError::Domain(msg.into())
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn cp(b: u64, k: usize) -> StructuredGroup {
    StructuredGroup::cyclic_power(b, k)
}

fn cyc(b: u64) -> StructuredGroup {
    StructuredGroup::cyclic(b)
}

fn tag(params: &[(&str, u64)]) -> Vec<(&'static str, String)> {
    params
        .iter()
        .map(|(k, v)| (leak(k), v.to_string()))
        .collect()
}

fn leak(k: &str) -> &'static str {
    match k {
        "n" => "n",
        "k" => "k",
        "p" => "p",
        "m" => "m",
        "x" => "x",
        "alpha" => "alpha",
        "beta" => "beta",
        "p1" => "p1",
        "p2" => "p2",
        _ => "param",
    }
}

/// A complex with its purple vertices grouped by level, and the scaling
/// group of each level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    pub complex: ComplexOfGroups,
    pub levels: Vec<Vec<usize>>,
    pub scales: Vec<StructuredGroup>,
}

// ---------------------------------------------------------------- trees

/// Path of sinks red C_2, blue/red C_{n-1}^i, blue C_{n-1}^k × C_n.
pub fn family_ga_k(n: u64, k: usize) -> Result<GraphOfGroups> {
    if n < 3 {
        return Err(domain("GA needs n >= 3"));
    }
    let c = n - 1;
    let mut b = ComplexBuilder::new();
    b.family("GA", &tag(&[("n", n), ("k", k as u64)]));
    let r0 = b.add_vertex("r0", Color::Red, "sink", cyc(2), true)?;
    b.set_level(r0, 0);
    let mut blues = Vec::new();
    let mut reds = vec![r0];
    for i in 1..=k {
        let bi = b.add_vertex(format!("b{i}"), Color::Blue, "sink", cp(c, i), true)?;
        let ri = b.add_vertex(format!("r{i}"), Color::Red, "sink", cp(c, i), true)?;
        b.set_level(bi, i);
        b.set_level(ri, i);
        blues.push(bi);
        reds.push(ri);
    }
    let last = b.add_vertex(format!("b{}", k + 1), Color::Blue, "sink", cp(c, k).product(&cyc(n)), true)?;
    b.set_level(last, k + 1);
    blues.push(last);
    let s0 = b.add_vertex("s0", Color::None, "edge", StructuredGroup::trivial(), false)?;
    b.add_prefix(s0, r0)?;
    b.add_prefix(s0, blues[0])?;
    for i in 1..=k {
        let br = b.add_vertex(format!("s{i}.br"), Color::None, "edge", cp(c, i), false)?;
        b.add_prefix(br, blues[i - 1])?;
        b.add_prefix(br, reds[i])?;
        let rb = b.add_vertex(format!("s{i}.rb"), Color::None, "edge", cp(c, i), false)?;
        b.add_prefix(rb, reds[i])?;
        b.add_prefix(rb, blues[i])?;
    }
    Ok(as_graph_of_groups(&b.build()?)?)
}

/// Star with blue centre C_{n-2} and red leaves C_{n-2} × C_2, C_2, C_{n-2} × C_2.
pub fn family_ga_limit(n: u64) -> Result<GraphOfGroups> {
    if n < 3 {
        return Err(domain("GA needs n >= 3"));
    }
    let c = cyc(n - 2);
    let mut b = ComplexBuilder::new();
    b.family("GA_limit", &tag(&[("n", n)]));
    let centre = b.add_vertex("b", Color::Blue, "sink", c.clone(), true)?;
    let leaves = [c.product(&cyc(2)), cyc(2), c.product(&cyc(2))];
    let edges = [c.clone(), StructuredGroup::trivial(), c.clone()];
    for (j, (leaf, edge)) in leaves.into_iter().zip(edges).enumerate() {
        let r = b.add_vertex(format!("r{j}"), Color::Red, "sink", leaf, true)?;
        let s = b.add_vertex(format!("s{j}"), Color::None, "edge", edge, false)?;
        b.add_prefix(s, centre)?;
        b.add_prefix(s, r)?;
    }
    Ok(as_graph_of_groups(&b.build()?)?)
}

/// Levelled tree: blues on level i join n-p reds; level k+1 blues carry C_n.
pub fn family_gpa_k(n: u64, p: u64, k: usize) -> Result<GraphOfGroups> {
    if !is_prime(p) || p >= n {
        return Err(domain("GpA needs a prime p < n"));
    }
    let c = (n - p) as usize;
    let mut b = ComplexBuilder::new();
    b.family("GpA", &tag(&[("n", n), ("p", p), ("k", k as u64)]));
    let r0 = b.add_vertex("l0.r0", Color::Red, "sink", cyc(2), true)?;
    b.set_level(r0, 0);
    let blue_group = |i: usize| if i == k + 1 { cp(p, k).product(&cyc(n)) } else { cp(p, i) };
    let mut level_blues = Vec::new();
    let mut prev_reds = vec![r0];
    for i in 1..=k + 1 {
        let count = c.pow(i as u32 - 1);
        let blues: Vec<usize> = (0..count)
            .map(|j| {
                let v = b.add_vertex(format!("l{i}.b{j}"), Color::Blue, "sink", blue_group(i), true)?;
                b.set_level(v, i);
                Ok(v)
            })
            .collect::<Result<_>>()?;
        for (j, &r) in prev_reds.iter().enumerate() {
            let g = b.group(r).clone();
            let g = if i == 1 { StructuredGroup::trivial() } else { g };
            let s = b.add_vertex(format!("l{}.t{j}", i - 1), Color::None, "edge", g, false)?;
            b.add_prefix(s, r)?;
            b.add_prefix(s, blues[j])?;
        }
        if i == k + 1 {
            level_blues = blues;
            break;
        }
        let mut reds = Vec::new();
        for (j, &blue) in blues.iter().enumerate() {
            for t in 0..c {
                let idx = j * c + t;
                let r = b.add_vertex(format!("l{i}.r{idx}"), Color::Red, "sink", cp(p, i), true)?;
                b.set_level(r, i);
                let s = b.add_vertex(format!("l{i}.s{idx}"), Color::None, "edge", cp(p, i), false)?;
                b.add_prefix(s, blue)?;
                b.add_prefix(s, r)?;
                reds.push(r);
            }
        }
        prev_reds = reds;
    }
    debug_assert_eq!(level_blues.len(), c.pow(k as u32));
    Ok(as_graph_of_groups(&b.build()?)?)
}

// ---------------------------------------------------------------- polygons

/// Vertex indices of a polygon added to a builder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonParts {
    pub face: usize,
    pub midpoints: Vec<usize>,
    pub corners: Vec<usize>,
}

/// Add `g × P(α,β)`; `corners` may supply existing vertices carrying `h × D_2α`
/// whose leading factors receive `g` at `g_positions`.
fn add_polygon(
    b: &mut ComplexBuilder,
    prefix: &str,
    g: &StructuredGroup,
    alpha: u64,
    beta: u64,
    kind_prefix: &str,
    existing: Option<(&[usize], &[usize])>,
) -> Result<PolygonParts> {
    let sides = 2 * beta as usize;
    let face = b.add_vertex(format!("{prefix}F"), Color::Red, format!("{kind_prefix}face"), g.clone(), true)?;
    let midpoints: Vec<usize> = (0..sides)
        .map(|i| {
            b.add_vertex(format!("{prefix}b{i}"), Color::Blue, format!("{kind_prefix}edge"), g.product(&cyc(2)), true)
                .map_err(FamilyError::from)
        })
        .collect::<Result<_>>()?;
    let ng = g.factors().len();
    let (corners, positions): (Vec<usize>, Vec<usize>) = match existing {
        Some((c, pos)) => (c.to_vec(), pos.to_vec()),
        None => {
            let c = (0..sides)
                .map(|i| {
                    b.add_vertex(
                        format!("{prefix}c{i}"),
                        Color::Purple,
                        format!("{kind_prefix}corner"),
                        g.product(&StructuredGroup::dihedral(alpha)),
                        true,
                    )
                    .map_err(FamilyError::from)
                })
                .collect::<Result<_>>()?;
            (c, (0..ng).collect())
        }
    };
    for &m in &midpoints {
        b.add_prefix(face, m)?;
    }
    for (i, &c) in corners.iter().enumerate() {
        let dihedral = b.group(c).factors().len() - 1;
        for (mid, index) in [(midpoints[i], 0), (midpoints[(i + 1) % sides], 1)] {
            let mut rules: Vec<FactorRule> = g
                .factors()
                .iter()
                .zip(&positions)
                .map(|(f, &t)| FactorRule::identity(t, *f))
                .collect();
            rules.push(FactorRule::Reflection { target: dihedral, index });
            b.add_rules(mid, c, rules)?;
        }
    }
    Ok(PolygonParts { face, midpoints, corners })
}

/// Polygon of groups: trivial red face, blue C_2 midpoints, purple D_2α corners.
pub fn polygon_p(alpha: u64, beta: u64) -> Result<ComplexOfGroups> {
    if alpha < 2 || beta < 2 {
        return Err(domain("polygon needs alpha, beta >= 2"));
    }
    let mut b = ComplexBuilder::new();
    b.family("polygon", &tag(&[("alpha", alpha), ("beta", beta)]));
    add_polygon(&mut b, "", &StructuredGroup::trivial(), alpha, beta, "", None)?;
    Ok(b.build()?)
}

/// Inclusion of `scale^i × D` into `scale^(i+1) × D`, leaving the new scale
/// factor first.
fn shift_rules(g: &StructuredGroup) -> Vec<FactorRule> {
    g.factors()
        .iter()
        .enumerate()
        .map(|(j, f)| FactorRule::identity(j + 1, *f))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bottom {
    Rotations,
    Dihedral(u64),
}

fn polygon_tower(name: &str, m: u64, x: u64, s: u64, k: usize, bottom: Bottom, params: &[(&str, u64)]) -> Result<Tower> {
    if m < 2 || x < 2 {
        return Err(domain("towers need m, x >= 2"));
    }
    let mut b = ComplexBuilder::new();
    b.family(name, &tag(params));
    let d = StructuredGroup::dihedral(m);
    let mut levels = Vec::new();
    let mut scales = Vec::new();
    for i in 0..=k {
        let scale = cp(s, i);
        let base = b.len();
        let parts = add_polygon(&mut b, &format!("p{i}."), &scale, m, x, "", None)?;
        for v in base..b.len() {
            b.set_level(v, i);
        }
        levels.push(parts.corners);
        scales.push(scale);
    }
    let corners = 2 * x as usize;
    match bottom {
        Bottom::Rotations => {
            for t in 0..x as usize {
                let g = b.add_vertex(format!("g.bottom{t}"), Color::Green, "green", cyc(m), true)?;
                for c in [levels[0][2 * t], levels[0][2 * t + 1]] {
                    b.add_rules(g, c, vec![FactorRule::Rotation { target: 0, mult: 1 }])?;
                }
            }
        }
        Bottom::Dihedral(p) => {
            for t in 0..x as usize {
                for r in 0..p {
                    let g = b.add_vertex(format!("g.bottom{t}.{r}"), Color::Green, "green", d.clone(), true)?;
                    b.add_prefix(g, levels[0][2 * t])?;
                    b.add_prefix(g, levels[0][2 * t + 1])?;
                }
            }
        }
    }
    for i in 0..k {
        for j in 0..corners {
            let group = cp(s, i).product(&d);
            let g = b.add_vertex(format!("g.gap{i}.{j}"), Color::Green, "green", group.clone(), true)?;
            b.add_prefix(g, levels[i][j])?;
            b.add_rules(g, levels[i + 1][j], shift_rules(&group))?;
        }
    }
    for t in 0..x as usize {
        let g = b.add_vertex(format!("g.top{t}"), Color::Green, "green", cp(s, k).product(&d), true)?;
        b.add_prefix(g, levels[k][2 * t])?;
        b.add_prefix(g, levels[k][2 * t + 1])?;
    }
    Ok(Tower { complex: b.build()?, levels, scales })
}

/// Stack of platforms C_2^i × P(m,x) joined by green vertices.
pub fn x0_tower(m: u64, x: u64, k: usize) -> Result<Tower> {
    polygon_tower("X0", m, x, 2, k, Bottom::Rotations, &[("m", m), ("x", x), ("k", k as u64)])
}

pub fn family_x0_k(m: u64, x: u64, k: usize) -> Result<ComplexOfGroups> {
    Ok(x0_tower(m, x, k)?.complex)
}

/// Two platforms with corner j joined to corner j by a D_2m and a C_m green.
pub fn family_x0_limit(m: u64, x: u64) -> Result<ComplexOfGroups> {
    if m < 2 || x < 2 {
        return Err(domain("towers need m, x >= 2"));
    }
    let mut b = ComplexBuilder::new();
    b.family("X0_limit", &tag(&[("m", m), ("x", x)]));
    let one = StructuredGroup::trivial();
    let low = add_polygon(&mut b, "p0.", &one, m, x, "", None)?;
    let high = add_polygon(&mut b, "p1.", &one, m, x, "", None)?;
    for j in 0..2 * x as usize {
        let g = b.add_vertex(format!("g.d{j}"), Color::Green, "green", StructuredGroup::dihedral(m), true)?;
        b.add_prefix(g, low.corners[j])?;
        b.add_prefix(g, high.corners[j])?;
        let g = b.add_vertex(format!("g.c{j}"), Color::Green, "green", cyc(m), true)?;
        for c in [low.corners[j], high.corners[j]] {
            b.add_rules(g, c, vec![FactorRule::Rotation { target: 0, mult: 1 }])?;
        }
    }
    Ok(b.build()?)
}

/// Platforms C_p^i × P(m,x); each bottom C_m green becomes p D_2m greens.
pub fn family_xprime_k(m: u64, x: u64, p: u64, k: usize) -> Result<ComplexOfGroups> {
    if !is_prime(p) {
        return Err(domain("Xprime needs a prime p"));
    }
    let params = [("m", m), ("x", x), ("p", p), ("k", k as u64)];
    Ok(polygon_tower("Xprime", m, x, p, k, Bottom::Dihedral(p), &params)?.complex)
}

// ---------------------------------------------------------------- Davis complexes

/// Opposite Davis complex of a finite Coxeter group with trivial groups:
/// chambers purple, other cells blue typed by their generator set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDavis {
    pub complex: ComplexOfGroups,
    /// Chamber vertices in canonical-word order.
    pub chambers: Vec<usize>,
}

fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("")
    }
}

/// Σ^op for a spherical system, as a complex with trivial groups.
pub fn finite_davis_op(m: &CoxeterMatrix) -> Result<FiniteDavis> {
    let all: Vec<usize> = (0..m.rank()).collect();
    if !m.is_spherical(&all) {
        return Err(domain("the Coxeter group must be finite"));
    }
    let mut solver = WordSolver::new(m, DEFAULT_WORD_BUDGET);
    let words = solver.enumerate(crate::coxeter::mask_of(&all), usize::MAX)?;
    let cc = solver.coset_complex(words)?;
    let mut b = ComplexBuilder::new();
    let mut chambers = Vec::new();
    for cell in &cc.cells {
        let label = type_label(cell.mask);
        let (color, kind) = if cell.mask == 0 { (Color::Purple, "chamber".to_string()) } else { (Color::Blue, label.clone()) };
        let v = b.add_vertex(format!("{label}{}", word_label(&cell.key)), color, kind, StructuredGroup::trivial(), true)?;
        if cell.mask == 0 {
            chambers.push(v);
        }
    }
    let one = Embedding::identity(&StructuredGroup::trivial());
    for &(small, large) in &cc.covers {
        b.add_edge(large, small, one.clone())?;
    }
    Ok(FiniteDavis { complex: b.build()?, chambers })
}

/// Copy `src` into `b` with ids prefixed, groups `g × A_v`; returns the index map.
fn copy_scaled(b: &mut ComplexBuilder, src: &ComplexOfGroups, prefix: &str, g: &StructuredGroup, level: Option<usize>) -> Result<Vec<usize>> {
    let mut map = Vec::with_capacity(src.vertex_count());
    for v in 0..src.vertex_count() {
        let mut d = src.vertex_data(v);
        d.info.id = format!("{prefix}{}", d.info.id);
        d.group = g.product(&d.group);
        d.level = level.or(d.level);
        map.push(b.add_vertex_data(d)?);
    }
    for (e, edge) in src.scwol().edges().iter().enumerate() {
        if edge.given {
            b.add_edge(map[edge.src], map[edge.dst], src.map(e).with_prefix(g))?;
        }
    }
    Ok(map)
}

fn y_tower(w: &CoxeterMatrix, k: usize) -> Result<(Tower, FiniteDavis)> {
    let sigma = finite_davis_op(w)?;
    let size = sigma.chambers.len();
    let mut b = ComplexBuilder::new();
    b.family("Y0", &[("k", k.to_string())]);
    let mut levels = Vec::new();
    let mut scales = Vec::new();
    for i in 0..=k {
        let scale = cp(2, i + 1);
        let map = copy_scaled(&mut b, &sigma.complex, &format!("p{i}."), &scale, Some(i))?;
        levels.push(sigma.chambers.iter().map(|&c| map[c]).collect::<Vec<_>>());
        scales.push(scale);
    }
    for t in 0..size / 2 {
        let g = b.add_vertex(format!("g.bottom{t}"), Color::Green, "green", StructuredGroup::trivial(), true)?;
        b.add_prefix(g, levels[0][2 * t])?;
        b.add_prefix(g, levels[0][2 * t + 1])?;
    }
    for i in 0..k {
        for j in 0..size {
            let group = cp(2, i + 1);
            let g = b.add_vertex(format!("g.gap{i}.{j}"), Color::Green, "green", group.clone(), true)?;
            b.add_prefix(g, levels[i][j])?;
            b.add_prefix(g, levels[i + 1][j])?;
        }
    }
    for t in 0..size / 2 {
        let g = b.add_vertex(format!("g.top{t}"), Color::Green, "green", cp(2, k + 1), true)?;
        b.add_prefix(g, levels[k][2 * t])?;
        b.add_prefix(g, levels[k][2 * t + 1])?;
    }
    Ok((Tower { complex: b.build()?, levels, scales }, sigma))
}

/// Platforms C_2^(i+1) × Σ^op of a finite Coxeter group joined chamberwise.
pub fn family_y0_k(w: &CoxeterMatrix, k: usize) -> Result<ComplexOfGroups> {
    Ok(y_tower(w, k)?.0.complex)
}

/// Two C_2 × Σ^op platforms joined per chamber by a C_2 and a trivial green.
pub fn family_y0_limit(w: &CoxeterMatrix) -> Result<ComplexOfGroups> {
    let sigma = finite_davis_op(w)?;
    let mut b = ComplexBuilder::new();
    b.family("Y0_limit", &[]);
    let c2 = cyc(2);
    let low = copy_scaled(&mut b, &sigma.complex, "p0.", &c2, Some(0))?;
    let high = copy_scaled(&mut b, &sigma.complex, "p1.", &c2, Some(1))?;
    for (j, &c) in sigma.chambers.iter().enumerate() {
        let g = b.add_vertex(format!("g.c{j}"), Color::Green, "green", c2.clone(), true)?;
        b.add_prefix(g, low[c])?;
        b.add_prefix(g, high[c])?;
        let g = b.add_vertex(format!("g.e{j}"), Color::Green, "green", StructuredGroup::trivial(), true)?;
        b.add_prefix(g, low[c])?;
        b.add_prefix(g, high[c])?;
    }
    Ok(b.build()?)
}

/// Catalog of a Y tower: purple is the chamber link plus three greens.
pub fn y_catalog(w: &CoxeterMatrix) -> Result<LinkCatalog> {
    let sigma = finite_davis_op(w)?;
    let mut c = LinkCatalog::default();
    let chamber = local_development(&sigma.complex, sigma.chambers[0]).map_err(|e| domain(e.to_string()))?;
    c.insert("purple", chamber.unordered().disjoint_union(&LinkGraph::isolated(3, Color::Green)));
    c.insert("green", LinkGraph::isolated(2, Color::Purple));
    for v in 0..sigma.complex.vertex_count() {
        let info = sigma.complex.info(v);
        if info.color == Color::Blue {
            let key = format!("blue/{}", info.kind);
            if !c.entries.contains_key(&key) {
                let l = local_development(&sigma.complex, v).map_err(|e| domain(e.to_string()))?;
                c.insert(key, l.unordered());
            }
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------- gluing

/// What gets glued onto every level's purples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Attachment {
    /// Opposite Davis complex of a finite Coxeter group.
    Spherical(CoxeterMatrix),
    /// Polygon platforms P(m, x).
    Cycle { m: u64, x: u64 },
}

/// How attachment-side groups are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GluePolicy {
    /// Attachments carry the merged purple group, so embeddings into merged purples have index 1.
    #[default]
    Scaled,
    /// Attachments carry only the level scaling group.
    Literal,
}

/// Copy counts for one gluing step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluePlan {
    pub lcm: usize,
    pub tower_copies: usize,
    pub attachment_copies: usize,
}

fn attachment_size(att: &Attachment) -> Result<usize> {
    match att {
        Attachment::Spherical(w) => {
            let all: Vec<usize> = (0..w.rank()).collect();
            let order = w.spherical_order(&all).ok_or_else(|| domain("attachment group is infinite"))?;
            usize::try_from(order).map_err(|_| domain("attachment group too large"))
        }
        Attachment::Cycle { m, x } => {
            if *m < 2 || *x < 2 {
                return Err(domain("cycle attachment needs m, x >= 2"));
            }
            Ok(2 * *x as usize)
        }
    }
}

/// Copy counts: c = lcm(purples per level, attachment purples).
pub fn glue_plan(a: &Tower, att: &Attachment) -> Result<GluePlan> {
    let per_level = a.levels.first().map(|l| l.len()).unwrap_or(0);
    if per_level == 0 || a.levels.iter().any(|l| l.len() != per_level) {
        return Err(domain("tower levels must hold equal nonzero purple counts"));
    }
    let size = attachment_size(att)?;
    let lcm = per_level.lcm(&size);
    Ok(GluePlan { lcm, tower_copies: lcm / per_level, attachment_copies: lcm / size })
}

/// Glue attachment copies onto every level of `a`; `round` names the attachment.
pub fn glue(a: &Tower, att: &Attachment, round: usize, policy: GluePolicy) -> Result<Tower> {
    let plan = glue_plan(a, att)?;
    let src = &a.complex;
    let nv = src.vertex_count();
    let mut merged_flag = vec![false; nv];
    for l in &a.levels {
        for &v in l {
            merged_flag[v] = true;
        }
    }
    let cycle_group = match att {
        Attachment::Cycle { m, .. } => Some(StructuredGroup::dihedral(*m)),
        Attachment::Spherical(_) => None,
    };
    let mut b = ComplexBuilder::new();
    if let Some(f) = &src.family {
        b.family(&format!("{}+glue", f.name), &f.params.iter().map(|(k, v)| (leak(k), v.clone())).collect::<Vec<_>>());
    }
    let mut copies: Vec<Vec<usize>> = Vec::new();
    for c in 0..plan.tower_copies {
        let mut map = Vec::with_capacity(nv);
        for v in 0..nv {
            let mut d = src.vertex_data(v);
            d.info.id = format!("a{c}.{}", d.info.id);
            if let Some(dg) = &cycle_group {
                if policy == GluePolicy::Scaled || merged_flag[v] {
                    d.group = d.group.product(dg);
                }
            }
            map.push(b.add_vertex_data(d)?);
        }
        for (e, edge) in src.scwol().edges().iter().enumerate() {
            if !edge.given {
                continue;
            }
            let base = src.map(e);
            let m = match &cycle_group {
                None => base.clone(),
                Some(dg) if policy == GluePolicy::Scaled => base.with_suffix(dg),
                Some(_) => {
                    if merged_flag[edge.src] {
                        return Err(domain("merged purples must be sinks"));
                    }
                    if merged_flag[edge.dst] {
                        let into = Embedding::prefix_inclusion(base.target(), b.group(map[edge.dst]))?;
                        base.then(&into)?
                    } else {
                        base.clone()
                    }
                }
            };
            b.add_edge(map[edge.src], map[edge.dst], m)?;
        }
        copies.push(map);
    }
    let mut levels = Vec::new();
    for (i, level) in a.levels.iter().enumerate() {
        let merged: Vec<usize> = copies.iter().flat_map(|map| level.iter().map(move |&v| map[v])).collect();
        let merged_group = b.group(merged[0]).clone();
        if merged.iter().any(|&v| b.group(v) != &merged_group) {
            return Err(domain("purples of one level must share a group"));
        }
        let scale = &a.scales[i];
        let a_side = src.group(level[0]).clone();
        match att {
            Attachment::Spherical(w) => {
                let sigma = finite_davis_op(w)?;
                let size = sigma.chambers.len();
                for t in 0..plan.attachment_copies {
                    let g = match policy {
                        GluePolicy::Scaled => merged_group.clone(),
                        GluePolicy::Literal => scale.clone(),
                    };
                    let mut map = vec![usize::MAX; sigma.complex.vertex_count()];
                    for (j, &c) in sigma.chambers.iter().enumerate() {
                        map[c] = merged[t * size + j];
                    }
                    for v in 0..sigma.complex.vertex_count() {
                        if map[v] != usize::MAX {
                            continue;
                        }
                        let mut d = sigma.complex.vertex_data(v);
                        d.info.id = format!("L{i}.g{round}.{t}.{}", d.info.id);
                        d.info.kind = format!("g{round}:{}", d.info.kind);
                        d.group = g.clone();
                        d.level = Some(i);
                        map[v] = b.add_vertex_data(d)?;
                    }
                    for edge in sigma.complex.scwol().edges().iter().filter(|e| e.given) {
                        let (s, d) = (map[edge.src], map[edge.dst]);
                        let m = Embedding::prefix_inclusion(b.group(s), b.group(d))?;
                        b.add_edge(s, d, m)?;
                    }
                }
            }
            Attachment::Cycle { m, x } => {
                let sides = 2 * *x as usize;
                for t in 0..plan.attachment_copies {
                    let corners = &merged[t * sides..(t + 1) * sides];
                    let (g, positions): (StructuredGroup, Vec<usize>) = match policy {
                        GluePolicy::Scaled => {
                            let n = a_side.factors().len();
                            (a_side.clone(), (0..n).collect())
                        }
                        GluePolicy::Literal => {
                            let n = scale.factors().len();
                            (scale.clone(), (0..n).collect())
                        }
                    };
                    let base = b.len();
                    add_polygon(
                        &mut b,
                        &format!("L{i}.g{round}.{t}."),
                        &g,
                        *m,
                        *x,
                        &format!("g{round}:"),
                        Some((corners, &positions)),
                    )?;
                    for v in base..b.len() {
                        b.set_level(v, i);
                    }
                }
            }
        }
        levels.push(merged);
    }
    Ok(Tower { complex: b.build()?, levels, scales: a.scales.clone() })
}

/// Fold `glue` over the attachments in order.
pub fn iterate_glue(a0: &Tower, atts: &[Attachment], policy: GluePolicy) -> Result<Tower> {
    let mut t = a0.clone();
    for (r, att) in atts.iter().enumerate() {
        t = glue(&t, att, r + 1, policy)?;
    }
    Ok(t)
}

/// Expected links after gluing onto a polygon tower with corner label `m`
/// and `2x`-gon faces.
pub fn glue_catalog(m: u64, x: u64, atts: &[Attachment]) -> Result<LinkCatalog> {
    let mut c = reference_catalog(&CatalogKind::Davis { m, x, greens: 3 });
    let mut purple = c.entries["purple"].clone();
    for (r, att) in atts.iter().enumerate() {
        let round = r + 1;
        match att {
            Attachment::Spherical(w) => {
                let sigma = finite_davis_op(w)?;
                let l = local_development(&sigma.complex, sigma.chambers[0]).map_err(|e| domain(e.to_string()))?;
                purple = purple.disjoint_union(&l.unordered());
                for v in 0..sigma.complex.vertex_count() {
                    let info = sigma.complex.info(v);
                    if info.color == Color::Blue {
                        let l = local_development(&sigma.complex, v).map_err(|e| domain(e.to_string()))?;
                        c.insert(format!("blue/g{round}:{}", info.kind), l.unordered());
                    }
                }
            }
            Attachment::Cycle { m: m1, x: x1 } => {
                let d = reference_catalog(&CatalogKind::Davis { m: *m1, x: *x1, greens: 0 });
                purple = purple.disjoint_union(&d.entries["purple"]);
                c.insert(format!("red/g{round}:face"), d.entries["red"].clone());
                c.insert(format!("blue/g{round}:edge"), d.entries["blue"].clone());
            }
        }
    }
    c.insert("purple", purple);
    Ok(c)
}

// ---------------------------------------------------------------- buildings

/// Right-angled chamber data: the sub-matrix on S' and panel sizes p_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPrime {
    pub matrix: CoxeterMatrix,
    pub p: Vec<u64>,
}

impl KPrime {
    pub fn new(matrix: CoxeterMatrix, p: Vec<u64>) -> Result<Self> {
        matrix.is_right_angled()?;
        if p.len() != matrix.rank() || p.iter().any(|&q| q < 2) {
            return Err(domain("need one panel size >= 2 per generator"));
        }
        Ok(KPrime { matrix, p })
    }

    /// Empty S'.
    pub fn empty() -> Self {
        KPrime { matrix: CoxeterMatrix::free(0), p: Vec::new() }
    }

    /// Pairwise commuting (`2x3`) or pairwise free (`2*3`) generators, or
    /// `none`/empty for S' = ∅.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() || spec == "none" {
            return Ok(KPrime::empty());
        }
        let bad = || FamilyError::BadParam { key: "kprime".into(), value: spec.into() };
        let (sep, label) = if spec.contains('*') { ('*', None) } else { ('x', Some(2)) };
        let p: Vec<u64> = spec.split(sep).map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let n = p.len();
        let m: Vec<Vec<Option<u64>>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Some(1) } else { label }).collect())
            .collect();
        KPrime::new(crate::coxeter::validate_matrix(&m)?, p)
    }

    fn group(&self, mask: u64) -> StructuredGroup {
        let factors = crate::coxeter::members(mask).iter().map(|&i| Factor::Cyclic(self.p[i])).collect();
        StructuredGroup::new(factors).expect("panel sizes >= 2")
    }
}

/// Chamber complex K'-hat: a vertex per spherical T ⊆ S' with Π_{i∈T} C_{p_i}.
pub fn chamber_hat_kprime(kp: &KPrime) -> Result<ComplexOfGroups> {
    let mut b = ComplexBuilder::new();
    b.family("KprimeHat", &[]);
    let p = b.add_vertex("{}", Color::Purple, "{}", StructuredGroup::trivial(), true)?;
    glue_kprime(&mut b, p, kp, "")?;
    Ok(b.build()?)
}

/// Attach `A_v × K'-hat` above the purple vertex `v`.
fn glue_kprime(b: &mut ComplexBuilder, v: usize, kp: &KPrime, prefix: &str) -> Result<()> {
    let g = b.group(v).clone();
    let ng = g.factors().len();
    let masks = kp.matrix.spherical_masks();
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    index.insert(0, v);
    let level = b.vertex_data(v).level;
    for &t in masks.iter().filter(|&&t| t != 0) {
        let label = type_label(t);
        let u = b.add_vertex(format!("{prefix}{label}"), Color::Blue, label, g.product(&kp.group(t)), true)?;
        if let Some(l) = level {
            b.set_level(u, l);
        }
        index.insert(t, u);
    }
    for &t in &masks {
        let inside = crate::coxeter::members(t);
        for i in 0..kp.matrix.rank() {
            let bigger = t | 1 << i;
            if bigger == t || !index.contains_key(&bigger) {
                continue;
            }
            let outer = crate::coxeter::members(bigger);
            let mut positions: Vec<usize> = (0..ng).collect();
            positions.extend(inside.iter().map(|s| ng + outer.iter().position(|o| o == s).expect("subset")));
            b.add_inclusion(index[&t], index[&bigger], &positions)?;
        }
    }
    Ok(())
}

fn add_purple(b: &mut ComplexBuilder, id: String, g: StructuredGroup, level: usize, kp: &KPrime) -> Result<usize> {
    let v = b.add_vertex(id.clone(), Color::Purple, "{}", g, true)?;
    b.set_level(v, level);
    glue_kprime(b, v, kp, &format!("{id}/"))?;
    Ok(v)
}

fn add_sink(b: &mut ComplexBuilder, id: String, color: Color, g: StructuredGroup, level: usize) -> Result<usize> {
    let kind = if color == Color::Red { "s1" } else { "s2" };
    let v = b.add_vertex(id, color, kind, g, true)?;
    b.set_level(v, level);
    Ok(v)
}

/// Building family for p1 > p2 = 2: a path of red/green sinks with K'-hat at purples.
pub fn family_a_k(p1: u64, kp: &KPrime, k: usize) -> Result<ComplexOfGroups> {
    if p1 <= 2 {
        return Err(domain("A needs p1 > 2"));
    }
    let c = p1 - 1;
    let mut b = ComplexBuilder::new();
    b.family("A", &tag(&[("p1", p1), ("k", k as u64)]));
    let g0 = add_sink(&mut b, "g0".into(), Color::Green, cyc(2), 0)?;
    let p0 = add_purple(&mut b, "p0".into(), StructuredGroup::trivial(), 0, kp)?;
    b.add_prefix(p0, g0)?;
    let mut prev = p0;
    for i in 1..=k {
        let r = add_sink(&mut b, format!("r{i}"), Color::Red, cp(c, i), i)?;
        b.add_prefix(prev, r)?;
        let pa = add_purple(&mut b, format!("pa{i}"), cp(c, i), i, kp)?;
        b.add_prefix(pa, r)?;
        let g = add_sink(&mut b, format!("g{i}"), Color::Green, cp(c, i), i)?;
        b.add_prefix(pa, g)?;
        let pb = add_purple(&mut b, format!("pb{i}"), cp(c, i), i, kp)?;
        b.add_prefix(pb, g)?;
        prev = pb;
    }
    let last = add_sink(&mut b, format!("r{}", k + 1), Color::Red, cp(c, k).product(&cyc(p1)), k + 1)?;
    b.add_prefix(prev, last)?;
    Ok(b.build()?)
}

/// Limit of the A family: red hub C_{p1-2} with three purple branches.
pub fn family_a_limit(p1: u64, kp: &KPrime) -> Result<ComplexOfGroups> {
    if p1 <= 2 {
        return Err(domain("A needs p1 > 2"));
    }
    let c = cyc(p1 - 2);
    let mut b = ComplexBuilder::new();
    b.family("A_limit", &tag(&[("p1", p1)]));
    let hub = add_sink(&mut b, "r".into(), Color::Red, c.clone(), 0)?;
    for (j, g) in [c.clone(), StructuredGroup::trivial(), c.clone()].into_iter().enumerate() {
        let p = add_purple(&mut b, format!("p{j}"), g.clone(), 0, kp)?;
        b.add_prefix(p, hub)?;
        let green = add_sink(&mut b, format!("g{j}"), Color::Green, g.product(&cyc(2)), 0)?;
        b.add_prefix(p, green)?;
    }
    Ok(b.build()?)
}

/// Euclidean division p1 = (p2 - 1) q + r with 0 <= r < p2 - 1.
pub fn b_division(p1: u64, p2: u64) -> (u64, u64) {
    (p1 / (p2 - 1), p1 % (p2 - 1))
}

/// Building family for p1 >= p2 > 2: a periodic chain of purples with groups
/// C_{p2-1}^e for e = 0..2k+2.
pub fn family_b_k(p1: u64, p2: u64, kp: &KPrime, k: usize) -> Result<ComplexOfGroups> {
    if !(p1 >= p2 && p2 > 2) {
        return Err(domain("B needs p1 >= p2 > 2"));
    }
    let d = p2 - 1;
    let (q, r) = b_division(p1, p2);
    let (q, r) = (q as usize, r as usize);
    let top = 2 * k + 2;
    let mut b = ComplexBuilder::new();
    b.family("B", &tag(&[("p1", p1), ("p2", p2), ("k", k as u64)]));
    let count = |e: usize| if e == 0 { q } else { q + r };
    let own = |e: usize| if e == 0 { 0 } else { r };
    let greens_at = |e: usize| if e % 2 == 1 { q - 1 } else { r + 1 };
    let down = |e: usize| if e == 0 { 1 } else { greens_at(e) };
    let mut purples: Vec<Vec<usize>> = Vec::new();
    for e in 0..=top {
        let row = (0..count(e))
            .map(|j| add_purple(&mut b, format!("p{e}.{j}"), cp(d, e), e, kp))
            .collect::<Result<Vec<_>>>()?;
        purples.push(row);
    }
    let g0 = add_sink(&mut b, "g0".into(), Color::Green, cyc(p2), 0)?;
    b.add_prefix(purples[0][0], g0)?;
    for e in 1..=top {
        let red = add_sink(&mut b, format!("r{e}"), Color::Red, cp(d, e), e)?;
        for &p in &purples[e - 1][own(e - 1)..] {
            b.add_prefix(p, red)?;
        }
        for &p in &purples[e][..own(e)] {
            b.add_prefix(p, red)?;
        }
        for t in 0..greens_at(e) {
            let g = add_sink(&mut b, format!("g{e}.{t}"), Color::Green, cp(d, e), e)?;
            b.add_prefix(purples[e - 1][down(e - 1) + t], g)?;
            b.add_prefix(purples[e][t], g)?;
        }
    }
    for (j, &p) in purples[top][own(top)..].iter().enumerate() {
        let leaf = add_sink(&mut b, format!("lr{j}"), Color::Red, cp(d, top).product(&cyc(p1)), top + 1)?;
        b.add_prefix(p, leaf)?;
    }
    for (j, &p) in purples[top][down(top)..].iter().enumerate() {
        let leaf = add_sink(&mut b, format!("lg{j}"), Color::Green, cp(d, top).product(&cyc(p2)), top + 1)?;
        b.add_prefix(p, leaf)?;
    }
    Ok(b.build()?)
}

/// Limit of the B family: red hub C_{p2-2} with p1-p2+2 branches and one trivial purple.
pub fn family_b_limit(p1: u64, p2: u64, kp: &KPrime) -> Result<ComplexOfGroups> {
    if !(p1 >= p2 && p2 > 2) {
        return Err(domain("B needs p1 >= p2 > 2"));
    }
    let c = cyc(p2 - 2);
    let mut b = ComplexBuilder::new();
    b.family("B_limit", &tag(&[("p1", p1), ("p2", p2)]));
    let hub = add_sink(&mut b, "r".into(), Color::Red, c.clone(), 0)?;
    let branches = (p1 - p2 + 2) as usize;
    for j in 0..=branches {
        let g = if j < branches { c.clone() } else { StructuredGroup::trivial() };
        let p = add_purple(&mut b, format!("p{j}"), g.clone(), 0, kp)?;
        b.add_prefix(p, hub)?;
        let green = add_sink(&mut b, format!("g{j}"), Color::Green, g.product(&cyc(p2)), 0)?;
        b.add_prefix(p, green)?;
    }
    Ok(b.build()?)
}

fn h_build(p: u64, p1: u64, p2: u64, k: usize, kp: Option<&KPrime>) -> Result<ComplexOfGroups> {
    if !is_prime(p) || p >= p1 || p2 < 2 {
        return Err(domain("H needs a prime p < p1 and p2 >= 2"));
    }
    let c = (p1 - p) as usize;
    let d = p2 - 1;
    let g = |a: usize, e: usize| cp(p, a).product(&cp(d, e));
    let mut b = ComplexBuilder::new();
    b.family(if kp.is_some() { "Ap" } else { "H" }, &tag(&[("p", p), ("p1", p1), ("p2", p2), ("k", k as u64)]));
    let purple = |b: &mut ComplexBuilder, id: String, grp: StructuredGroup, level: usize| -> Result<usize> {
        match kp {
            Some(kp) => add_purple(b, id, grp, level, kp),
            None => {
                let v = b.add_vertex(id, Color::Purple, "{}", grp, true)?;
                b.set_level(v, level);
                Ok(v)
            }
        }
    };
    // positions of C_p^a × C_d^e inside C_p^a' × C_d^e'
    let place = |a: usize, e: usize, a2: usize| -> Vec<usize> { (0..a).chain((0..e).map(|j| a2 + j)).collect() };
    let mut prev_greens = vec![add_sink(&mut b, "l0.g0".into(), Color::Green, cyc(p2), 0)?];
    for i in 1..=k + 1 {
        let type_one_count = c.pow(i as u32 - 1);
        let (a1, e1) = if i == 1 { (0, 0) } else { (i - 1, i - 1) };
        let (a1, e1) = if i == k + 1 { (k, k) } else { (a1, e1) };
        let type_one: Vec<usize> = (0..type_one_count)
            .map(|j| purple(&mut b, format!("l{i}.pi{j}"), g(a1, e1), i))
            .collect::<Result<_>>()?;
        for (j, &t) in type_one.iter().enumerate() {
            b.add_prefix(t, prev_greens[j])?;
        }
        if i == k + 1 {
            for (j, &t) in type_one.iter().enumerate() {
                let red = add_sink(&mut b, format!("l{i}.r{j}"), Color::Red, g(k, k).product(&cyc(p1)), i)?;
                b.add_prefix(t, red)?;
            }
            break;
        }
        let mut greens = Vec::new();
        for (j, &t) in type_one.iter().enumerate() {
            let red = add_sink(&mut b, format!("l{i}.r{j}"), Color::Red, g(i, i - 1), i)?;
            b.add_inclusion(t, red, &place(i - 1, i - 1, i))?;
            for s in 0..c {
                let idx = j * c + s;
                let two = purple(&mut b, format!("l{i}.pii{idx}"), g(i, i - 1), i)?;
                b.add_prefix(two, red)?;
                let green = add_sink(&mut b, format!("l{i}.g{idx}"), Color::Green, g(i, i), i)?;
                b.add_prefix(two, green)?;
                greens.push(green);
            }
        }
        prev_greens = greens;
    }
    Ok(b.build()?)
}

/// Levelled tree for the p-adic building family.
pub fn family_h(p: u64, p1: u64, p2: u64, k: usize) -> Result<ComplexOfGroups> {
    h_build(p, p1, p2, k, None)
}

/// The H tree with a multiple of K'-hat at every purple.
pub fn family_ap_k(p: u64, p1: u64, p2: u64, kp: &KPrime, k: usize) -> Result<ComplexOfGroups> {
    h_build(p, p1, p2, k, Some(kp))
}

/// Building catalog: red/green panels, purple ∅-link plus one red and one green,
/// and blue links read off K'-hat.
pub fn building_catalog(p1: u64, p2: u64, kp: &KPrime) -> Result<LinkCatalog> {
    let hat = chamber_hat_kprime(kp)?;
    let err = |e: crate::links::LinkError| domain(e.to_string());
    let empty_link = local_development(&hat, 0).map_err(err)?;
    let mut blues = BTreeMap::new();
    for v in 1..hat.vertex_count() {
        blues.insert(hat.info(v).kind.clone(), local_development(&hat, v).map_err(err)?);
    }
    Ok(reference_catalog(&CatalogKind::Building { p1, p2, empty_link, blues }))
}

// ---------------------------------------------------------------- specs

/// Family names accepted by `generate`.
pub const FAMILY_NAMES: &[&str] = &[
    "GA", "GA_limit", "GpA", "polygon", "X0", "X0_limit", "Y0", "Y0_limit", "Xprime", "glue", "KprimeHat",
    "A", "A_limit", "B", "B_limit", "H", "Ap",
];

/// A family name with its parameter map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FamilySpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl FamilySpec {
    /// Name plus comma-separated `key=value` pairs.
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| FamilyError::BadParam {
                key: item.to_string(),
                value: String::new(),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let name = name.strip_suffix("_k").unwrap_or(name);
        if !FAMILY_NAMES.contains(&name) {
            return Err(FamilyError::UnknownFamily(name.to_string()));
        }
        Ok(FamilySpec { name: name.to_string(), params: map })
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(|s| s.as_str())
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let v = self.raw(key).ok_or_else(|| FamilyError::MissingParam(key.to_string()))?;
        v.parse().map_err(|_| FamilyError::BadParam { key: key.to_string(), value: v.to_string() })
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        Ok(self.u64(key)? as usize)
    }

    pub fn kprime(&self) -> Result<KPrime> {
        KPrime::parse(self.raw("kprime").unwrap_or(""))
    }

    pub fn coxeter(&self, key: &str) -> Result<CoxeterMatrix> {
        let v = self.raw(key).ok_or_else(|| FamilyError::MissingParam(key.to_string()))?;
        CoxeterMatrix::from_type_name(v)
            .map_err(|_| FamilyError::BadParam { key: key.to_string(), value: v.to_string() })
    }

    /// Attachments `att=I2(3);cycle(2/3)`: spherical type names or `cycle(m/x)`.
    pub fn attachments(&self) -> Result<Vec<Attachment>> {
        let v = self.raw("att").ok_or_else(|| FamilyError::MissingParam("att".into()))?;
        v.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                let bad = || FamilyError::BadParam { key: "att".into(), value: s.to_string() };
                if let Some(inner) = s.strip_prefix("cycle(").and_then(|r| r.strip_suffix(')')) {
                    let (m, x) = inner.split_once('/').ok_or_else(bad)?;
                    Ok(Attachment::Cycle {
                        m: m.parse().map_err(|_| bad())?,
                        x: x.parse().map_err(|_| bad())?,
                    })
                } else {
                    Ok(Attachment::Spherical(CoxeterMatrix::from_type_name(s).map_err(|_| bad())?))
                }
            })
            .collect()
    }

    pub fn policy(&self) -> Result<GluePolicy> {
        match self.raw("policy").unwrap_or("scaled") {
            "scaled" => Ok(GluePolicy::Scaled),
            "literal" => Ok(GluePolicy::Literal),
            other => Err(FamilyError::BadParam { key: "policy".into(), value: other.into() }),
        }
    }

    /// Same spec at a different `k`.
    pub fn at_k(&self, k: usize) -> Self {
        self.clone().with("k", k)
    }
}

/// Generate the complex named by a spec, tagged with the spec's parameters.
pub fn generate(spec: &FamilySpec) -> Result<ComplexOfGroups> {
    let s = spec;
    let mut out = match s.name.as_str() {
        "GA" => family_ga_k(s.u64("n")?, s.usize("k")?)?.complex().clone(),
        "GA_limit" => family_ga_limit(s.u64("n")?)?.complex().clone(),
        "GpA" => family_gpa_k(s.u64("n")?, s.u64("p")?, s.usize("k")?)?.complex().clone(),
        "polygon" => polygon_p(s.u64("alpha")?, s.u64("beta")?)?,
        "X0" => family_x0_k(s.u64("m")?, s.u64("x")?, s.usize("k")?)?,
        "X0_limit" => family_x0_limit(s.u64("m")?, s.u64("x")?)?,
        "Y0" => family_y0_k(&s.coxeter("w")?, s.usize("k")?)?,
        "Y0_limit" => family_y0_limit(&s.coxeter("w")?)?,
        "Xprime" => family_xprime_k(s.u64("m")?, s.u64("x")?, s.u64("p")?, s.usize("k")?)?,
        "glue" => {
            let base = x0_tower(s.u64("m")?, s.u64("x")?, s.usize("k")?)?;
            iterate_glue(&base, &s.attachments()?, s.policy()?)?.complex
        }
        "KprimeHat" => chamber_hat_kprime(&s.kprime()?)?,
        "A" => family_a_k(s.u64("p1")?, &s.kprime()?, s.usize("k")?)?,
        "A_limit" => family_a_limit(s.u64("p1")?, &s.kprime()?)?,
        "B" => family_b_k(s.u64("p1")?, s.u64("p2")?, &s.kprime()?, s.usize("k")?)?,
        "B_limit" => family_b_limit(s.u64("p1")?, s.u64("p2")?, &s.kprime()?)?,
        "H" => family_h(s.u64("p")?, s.u64("p1")?, s.u64("p2")?, s.usize("k")?)?,
        "Ap" => family_ap_k(s.u64("p")?, s.u64("p1")?, s.u64("p2")?, &s.kprime()?, s.usize("k")?)?,
        other => return Err(FamilyError::UnknownFamily(other.to_string())),
    };
    out.family = Some(crate::cog::FamilyTag { name: s.name.clone(), params: s.params.clone() });
    Ok(out)
}

/// The catalog a family's links are compared against, when one applies.
pub fn catalog_for(spec: &FamilySpec) -> Result<Option<LinkCatalog>> {
    let s = spec;
    let davis = |greens: usize| -> Result<LinkCatalog> {
        Ok(reference_catalog(&CatalogKind::Davis { m: s.u64("m")?, x: s.u64("x")?, greens }))
    };
    Ok(match s.name.as_str() {
        "polygon" => {
            let mut c = reference_catalog(&CatalogKind::Davis { m: s.u64("alpha")?, x: s.u64("beta")?, greens: 0 });
            c.entries.remove("green");
            Some(c)
        }
        "X0" | "X0_limit" => Some(davis(3)?),
        "Xprime" => Some(davis(s.usize("p")? + 1)?),
        "Y0" | "Y0_limit" => Some(y_catalog(&s.coxeter("w")?)?),
        "glue" => Some(glue_catalog(s.u64("m")?, s.u64("x")?, &s.attachments()?)?),
        "A" | "A_limit" => Some(building_catalog(s.u64("p1")?, 2, &s.kprime()?)?),
        "B" | "B_limit" | "Ap" => Some(building_catalog(s.u64("p1")?, s.u64("p2")?, &s.kprime()?)?),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn orders(c: &ComplexOfGroups, color: Color) -> Vec<u64> {
        let mut o: Vec<u64> = (0..c.vertex_count())
            .filter(|&v| c.color(v) == color && c.is_measured(v))
            .map(|v| c.group(v).order_u64().unwrap())
            .collect();
        o.sort_unstable();
        o
    }

    #[test]
    fn ga_shapes() {
        let g = family_ga_k(3, 2).unwrap();
        assert_eq!(g.sinks().len(), 6);
        assert_eq!(g.sources().len(), 5);
        let mut all: Vec<u64> = g.sinks().iter().map(|&v| g.complex().group(v).order_u64().unwrap()).collect();
        all.sort_unstable();
        assert_eq!(all, vec![2, 2, 2, 4, 4, 12]);
        for &v in g.sinks() {
            let expected = if g.complex().color(v) == Color::Red { 2u32 } else { 3 };
            assert_eq!(g.degree(v), BigUint::from(expected));
        }
        assert!(family_ga_k(2, 1).is_err());
    }

    #[test]
    fn gpa_level_groups() {
        let g = family_gpa_k(5, 2, 2).unwrap();
        let c = g.complex();
        assert_eq!(orders(c, Color::Red), vec![2, 2, 2, 2, 4, 4, 4, 4, 4, 4, 4, 4, 4]);
        assert_eq!(orders(c, Color::Blue), [vec![2], vec![4; 3], vec![20; 9]].concat());
        for &v in g.sinks() {
            let expected = if c.color(v) == Color::Red { 2u32 } else { 5 };
            assert_eq!(g.degree(v), BigUint::from(expected), "{}", c.info(v).id);
        }
    }

    #[test]
    fn polygon_shape() {
        let p = polygon_p(2, 2).unwrap();
        assert_eq!(orders(&p, Color::Purple), vec![4; 4]);
        assert_eq!(orders(&p, Color::Blue), vec![2; 4]);
        assert_eq!(orders(&p, Color::Red), vec![1]);
        assert!(p.validate().is_valid());
        assert!(as_graph_of_groups(&p).is_err());
    }

    #[test]
    fn tower_green_indices() {
        let t = x0_tower(3, 2, 2).unwrap();
        let c = &t.complex;
        assert!(c.validate().is_valid());
        for level in &t.levels {
            for &v in level {
                let mut idx: Vec<BigUint> = c
                    .scwol()
                    .in_edges(v)
                    .iter()
                    .filter(|&&e| c.color(c.scwol().edge(e).src) == Color::Green)
                    .map(|&e| c.map(e).index())
                    .collect();
                idx.sort();
                assert_eq!(idx, vec![BigUint::from(1u32), BigUint::from(2u32)]);
            }
        }
    }

    #[test]
    fn kprime_hat_orders() {
        let kp = KPrime::parse("2x3").unwrap();
        let h = chamber_hat_kprime(&kp).unwrap();
        let mut o: Vec<u64> = (0..h.vertex_count()).map(|v| h.group(v).order_u64().unwrap()).collect();
        o.sort_unstable();
        assert_eq!(o, vec![1, 2, 3, 6]);
        assert!(h.validate().is_valid());
        assert_eq!(chamber_hat_kprime(&KPrime::empty()).unwrap().vertex_count(), 1);
        let non_ra = crate::coxeter::CoxeterMatrix::path(&[3]);
        assert!(KPrime::new(non_ra, vec![2, 2]).is_err());
    }

    #[test]
    fn h_level_counts() {
        let h = family_h(2, 5, 3, 1).unwrap();
        let count = |prefix: &str| {
            (0..h.vertex_count())
                .filter(|&v| h.info(v).id.strip_prefix(prefix).is_some_and(|r| r.chars().all(|c| c.is_ascii_digit())))
                .count()
        };
        assert_eq!(count("l1.pi"), 1);
        assert_eq!(count("l1.pii"), 3);
        assert_eq!(count("l1.r"), 1);
        assert_eq!(count("l1.g"), 3);
        assert_eq!(count("l2.r"), 3);
        assert!(h.validate().is_valid());
    }

    #[test]
    fn glue_plan_counts() {
        let t = x0_tower(2, 2, 1).unwrap();
        let plan = glue_plan(&t, &Attachment::Spherical(CoxeterMatrix::path(&[3]))).unwrap();
        assert_eq!((plan.lcm, plan.tower_copies, plan.attachment_copies), (12, 3, 2));
        let plan = glue_plan(&t, &Attachment::Cycle { m: 2, x: 3 }).unwrap();
        assert_eq!((plan.lcm, plan.tower_copies, plan.attachment_copies), (12, 3, 2));
    }

    #[test]
    fn specs_parse() {
        let s = FamilySpec::parse("GA_k", "n=4, k=2").unwrap();
        assert_eq!(s.u64("n").unwrap(), 4);
        assert!(FamilySpec::parse("nope", "").is_err());
        assert!(generate(&FamilySpec::parse("GA", "n=2,k=1").unwrap()).is_err());
    }

    fn assert_catalog(name: &str, params: &str) {
        let spec = FamilySpec::parse(name, params).unwrap();
        let c = generate(&spec).unwrap();
        assert!(c.validate().is_valid(), "{name} {params}");
        let cat = catalog_for(&spec).unwrap().unwrap();
        let report = crate::links::catalog_check(&c, &cat);
        assert!(report.pass(), "{name} {params}: {:?}", report.failures().first());
    }

    #[test]
    fn davis_catalogs() {
        assert_catalog("polygon", "alpha=3,beta=2");
        assert_catalog("X0", "m=3,x=2,k=2");
        assert_catalog("X0_limit", "m=2,x=3");
        assert_catalog("Xprime", "m=2,x=2,p=3,k=2");
        assert_catalog("Y0", "w=I2(3),k=1");
        assert_catalog("Y0_limit", "w=A1xA1");
        assert_catalog("glue", "m=2,x=2,k=1,att=I2(3)");
        assert_catalog("glue", "m=3,x=2,k=1,att=cycle(2/3)");
        assert_catalog("glue", "m=2,x=2,k=1,att=A1xA1;cycle(3/2)");
    }

    #[test]
    fn literal_glue_fails_catalog() {
        let spec = FamilySpec::parse("glue", "m=2,x=2,k=1,att=I2(3),policy=literal").unwrap();
        let c = generate(&spec).unwrap();
        assert!(c.validate().is_valid());
        let report = crate::links::catalog_check(&c, &catalog_for(&spec).unwrap().unwrap());
        assert!(!report.pass());
    }

    #[test]
    fn building_catalogs() {
        for (name, params) in [
            ("A", "p1=3,k=2,kprime=2x3"),
            ("A_limit", "p1=4,kprime=2*3"),
            ("B", "p1=5,p2=3,k=1,kprime=2"),
            ("B_limit", "p1=4,p2=3"),
            ("Ap", "p=2,p1=3,p2=3,k=2,kprime=2x2"),
        ] {
            let spec = FamilySpec::parse(name, params).unwrap();
            let c = generate(&spec).unwrap();
            assert!(c.validate().is_valid(), "{name}");
            let p1 = spec.u64("p1").unwrap();
            let p2 = spec.u64("p2").unwrap_or(2);
            let coset = crate::links::building_coset_check(&c, p1, p2);
            assert!(coset.pass(), "{name}: {:?}", coset.failures().first());
            assert_catalog(name, params);
        }
    }
}
