//! Finite pieces of the Sierpinski gasket graph.
//!
//! Vertices live on the triangular lattice and are stored as integer pairs
//! `(p, q)` in the basis `a2 = (1, 0)`, `a3 = (1/2, sqrt(3)/2)`. The level-`n`
//! triangle is the union of `3^n` unit triangles obtained from the recursion
//! `T_{n+1} = T_n ∪ (T_n + 2^n a2) ∪ (T_n + 2^n a3)`, and two vertices are
//! adjacent iff they are corners of a common unit triangle.
//!
//! Degrees are always measured against an ambient lattice. The default
//! ambient is the full (two-sided) gasket graph where every vertex has degree
//! four; the right half-lattice differs only at the origin, which has degree
//! two there.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{GasketError, Result};

/// Default largest level accepted by the builders (about 800k vertices).
pub const DEFAULT_MAX_LEVEL: u32 = 12;

/// A lattice point in the triangular basis.
///
/// Ordering is the canonical vertex order: lexicographic on `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub p: i64,
    pub q: i64,
}

impl Coord {
    pub const ORIGIN: Coord = Coord { p: 0, q: 0 };

    pub const fn new(p: i64, q: i64) -> Self {
        Coord { p, q }
    }

    /// Reflection across the y-axis, exact in the triangular basis.
    pub const fn mirror(self) -> Self {
        Coord { p: -self.p - self.q, q: self.q }
    }

    pub const fn offset(self, dp: i64, dq: i64) -> Self {
        Coord { p: self.p + dp, q: self.q + dq }
    }

    pub fn sub(self, other: Coord) -> (i64, i64) {
        (self.p - other.p, self.q - other.q)
    }

    /// Euclidean position of the point.
    pub fn position(self) -> (f64, f64) {
        let p = self.p as f64;
        let q = self.q as f64;
        (p + 0.5 * q, q * 3f64.sqrt() / 2.0)
    }

    /// Whether `other` is one lattice step away, i.e. the difference is one of
    /// `±(1,0)`, `±(0,1)`, `±(1,-1)`.
    pub fn is_lattice_neighbor(self, other: Coord) -> bool {
        matches!(
            self.sub(other),
            (1, 0) | (-1, 0) | (0, 1) | (0, -1) | (1, -1) | (-1, 1)
        )
    }
}

impl Ord for Coord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.q, self.p).cmp(&(other.q, other.p))
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A `2^level`-triangle placed in the lattice.
///
/// `anchor` is the bottom-left corner of the unreflected triangle. When
/// `mirrored` is set the whole vertex set is reflected across the y-axis
/// after placement, so `anchor` is mapped along with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub level: u32,
    pub anchor: Coord,
    pub truncated: bool,
    pub mirrored: bool,
}

impl TriangleSpec {
    pub fn new(level: u32) -> Self {
        TriangleSpec { level, anchor: Coord::ORIGIN, truncated: false, mirrored: false }
    }

    pub fn at(level: u32, anchor: Coord) -> Self {
        TriangleSpec { level, anchor, truncated: false, mirrored: false }
    }

    pub fn truncated(mut self, truncated: bool) -> Self {
        self.truncated = truncated;
        self
    }

    pub fn mirrored(mut self, mirrored: bool) -> Self {
        self.mirrored = mirrored;
        self
    }

    pub fn side(&self) -> i64 {
        1i64 << self.level
    }

    fn place(&self, local: Coord) -> Coord {
        let c = local.offset(self.anchor.p, self.anchor.q);
        if self.mirrored {
            c.mirror()
        } else {
            c
        }
    }

    /// The three extreme vertices, in canonical order.
    pub fn extreme_vertices(&self) -> [Coord; 3] {
        let s = self.side();
        let mut out = [
            self.place(Coord::ORIGIN),
            self.place(Coord::new(s, 0)),
            self.place(Coord::new(0, s)),
        ];
        out.sort();
        out
    }

    /// Bottom-left corner of the placed vertex set (the canonical minimum).
    pub fn bottom_left(&self) -> Coord {
        self.extreme_vertices()[0]
    }
}

/// Number of vertices in a `2^level`-triangle: `(3^(level+1) + 3) / 2`.
pub fn triangle_vertex_count(level: u32) -> Option<usize> {
    let pow = 3usize.checked_pow(level.checked_add(1)?)?;
    Some((pow.checked_add(3)?) / 2)
}

/// Number of vertices in the ball `B_L = G_L ∪ G_L'`.
pub fn ball_vertex_count(level: u32) -> Option<usize> {
    triangle_vertex_count(level)?.checked_mul(2)?.checked_sub(1)
}

/// Degree convention of the infinite lattice a region is cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Ambient {
    /// Two-sided gasket graph; every vertex has degree four.
    #[default]
    Full,
    /// Right half-lattice; the origin has degree two.
    Half,
}

impl Ambient {
    fn degree(self, c: Coord) -> u8 {
        match self {
            Ambient::Half if c == Coord::ORIGIN => 2,
            _ => 4,
        }
    }
}

/// How a region was produced; used for export headers and partitioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    Triangle(TriangleSpec),
    Ball { level: u32 },
    Custom,
}

/// Builder limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    pub max_level: u32,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity { max_level: DEFAULT_MAX_LEVEL }
    }
}

impl Capacity {
    fn check(&self, level: u32) -> Result<()> {
        if level > self.max_level || triangle_vertex_count(level).is_none() {
            return Err(GasketError::Capacity(format!(
                "level {level} exceeds the configured maximum level {}",
                self.max_level
            )));
        }
        Ok(())
    }
}

/// A finite induced subgraph of the gasket lattice.
#[derive(Debug, Clone)]
pub struct LatticeRegion {
    kind: RegionKind,
    ambient: Ambient,
    vertices: Vec<Coord>,
    index: HashMap<Coord, usize>,
    edges: Vec<(usize, usize)>,
    full_degree: Vec<u8>,
    region_degree: Vec<u8>,
    interior_boundary: Vec<usize>,
    // Level at which each vertex becomes an extreme vertex of the recursive
    // decomposition; drives the elimination order of the inertia counter.
    ranks: Vec<u8>,
}

impl LatticeRegion {
    /// Assemble a region from a vertex list and unit-triangle edges. Vertices
    /// are put in canonical order and edges deduplicated.
    fn assemble(
        kind: RegionKind,
        ambient: Ambient,
        mut points: Vec<(Coord, u8)>,
        raw_edges: impl IntoIterator<Item = (Coord, Coord)>,
    ) -> Self {
        points.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        points.dedup_by(|a, b| a.0 == b.0);
        let vertices: Vec<Coord> = points.iter().map(|(c, _)| *c).collect();
        let ranks: Vec<u8> = points.iter().map(|(_, r)| *r).collect();
        let index: HashMap<Coord, usize> =
            vertices.iter().enumerate().map(|(i, c)| (*c, i)).collect();

        let mut edges: Vec<(usize, usize)> = raw_edges
            .into_iter()
            .filter_map(|(a, b)| {
                let (i, j) = (*index.get(&a)?, *index.get(&b)?);
                Some(if i < j { (i, j) } else { (j, i) })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let mut region_degree = vec![0u8; vertices.len()];
        for &(i, j) in &edges {
            region_degree[i] += 1;
            region_degree[j] += 1;
        }
        let full_degree: Vec<u8> = vertices.iter().map(|c| ambient.degree(*c)).collect();
        let interior_boundary = (0..vertices.len())
            .filter(|&i| full_degree[i] > region_degree[i])
            .collect();

        LatticeRegion {
            kind,
            ambient,
            vertices,
            index,
            edges,
            full_degree,
            region_degree,
            interior_boundary,
            ranks,
        }
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices in canonical order.
    pub fn vertices(&self) -> &[Coord] {
        &self.vertices
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, c: Coord) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.index.contains_key(&c)
    }

    pub fn full_degree(&self) -> &[u8] {
        &self.full_degree
    }

    pub fn region_degree(&self) -> &[u8] {
        &self.region_degree
    }

    /// Indices of `{x : full_degree(x) > region_degree(x)}`.
    pub fn interior_boundary(&self) -> &[usize] {
        &self.interior_boundary
    }

    pub fn interior_boundary_coords(&self) -> BTreeSet<Coord> {
        self.interior_boundary.iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn dissection_ranks(&self) -> &[u8] {
        &self.ranks
    }

    /// Adjacency lists in canonical index order.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// The same vertex and edge set seen from another ambient lattice.
    pub fn with_ambient(&self, ambient: Ambient) -> LatticeRegion {
        let points = self.vertices.iter().copied().zip(self.ranks.iter().copied()).collect();
        let edges = self.edges.iter().map(|&(i, j)| (self.vertices[i], self.vertices[j]));
        LatticeRegion::assemble(self.kind, ambient, points, edges.collect::<Vec<_>>())
    }

    /// Induced subgraph on the vertices accepted by `keep`.
    pub fn induced(&self, kind: RegionKind, keep: impl Fn(Coord) -> bool) -> LatticeRegion {
        let points: Vec<(Coord, u8)> = self
            .vertices
            .iter()
            .zip(&self.ranks)
            .filter(|(c, _)| keep(**c))
            .map(|(c, r)| (*c, *r))
            .collect();
        let edges: Vec<(Coord, Coord)> =
            self.edges.iter().map(|&(i, j)| (self.vertices[i], self.vertices[j])).collect();
        LatticeRegion::assemble(kind, self.ambient, points, edges)
    }
}

/// Unit-triangle anchors (local coordinates) of the level-`level` triangle
/// together with, for every local vertex, its dissection rank.
fn local_triangle(level: u32) -> (Vec<Coord>, Vec<(Coord, u8)>) {
    let mut anchors = vec![Coord::ORIGIN];
    for n in 0..level {
        let s = 1i64 << n;
        let len = anchors.len();
        anchors.reserve(2 * len);
        for k in 0..len {
            anchors.push(anchors[k].offset(s, 0));
        }
        for k in 0..len {
            anchors.push(anchors[k].offset(0, s));
        }
    }
    let mut points: Vec<(Coord, u8)> = Vec::with_capacity(3 * anchors.len());
    for a in &anchors {
        for c in [*a, a.offset(1, 0), a.offset(0, 1)] {
            points.push((c, rank_of(c, level)));
        }
    }
    points.sort_by_key(|a| a.0);
    points.dedup_by(|a, b| a.0 == b.0);
    (anchors, points)
}

fn rank_of(local: Coord, level: u32) -> u8 {
    let tz = |v: i64| if v == 0 { level } else { v.trailing_zeros().min(level) };
    tz(local.p).min(tz(local.q)) as u8
}

/// Build a `2^level`-triangle in the full ambient lattice.
pub fn build_triangle(spec: TriangleSpec) -> Result<LatticeRegion> {
    build_triangle_with(spec, Ambient::Full, Capacity::default())
}

pub fn build_triangle_with(
    spec: TriangleSpec,
    ambient: Ambient,
    capacity: Capacity,
) -> Result<LatticeRegion> {
    capacity.check(spec.level)?;
    let (anchors, local_points) = local_triangle(spec.level);
    let extremes = spec.extreme_vertices();
    let points: Vec<(Coord, u8)> = local_points
        .into_iter()
        .map(|(c, r)| (spec.place(c), r))
        .filter(|(c, _)| !spec.truncated || !extremes.contains(c))
        .collect();
    let mut edges = Vec::with_capacity(3 * anchors.len());
    for a in &anchors {
        let t = [spec.place(*a), spec.place(a.offset(1, 0)), spec.place(a.offset(0, 1))];
        edges.push((t[0], t[1]));
        edges.push((t[0], t[2]));
        edges.push((t[1], t[2]));
    }
    Ok(LatticeRegion::assemble(RegionKind::Triangle(spec), ambient, points, edges))
}

/// The ball `B_L = G_L ∪ G_L'` around the origin, glued at the origin.
pub fn build_ball(level: u32) -> Result<LatticeRegion> {
    build_ball_with(level, Capacity::default())
}

pub fn build_ball_with(level: u32, capacity: Capacity) -> Result<LatticeRegion> {
    capacity.check(level)?;
    let right = build_triangle_with(TriangleSpec::new(level), Ambient::Full, capacity)?;
    let left = build_triangle_with(TriangleSpec::new(level).mirrored(true), Ambient::Full, capacity)?;
    let mut points = Vec::with_capacity(right.len() + left.len());
    let mut edges = Vec::with_capacity(right.edges.len() + left.edges.len());
    for half in [&right, &left] {
        points.extend(half.vertices.iter().copied().zip(half.ranks.iter().copied()));
        edges.extend(half.edges.iter().map(|&(i, j)| (half.vertices[i], half.vertices[j])));
    }
    Ok(LatticeRegion::assemble(RegionKind::Ball { level }, Ambient::Full, points, edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionKind {
    /// Non-disjoint cover by `2^l`-triangles sharing extreme vertices.
    CoverP,
    /// Disjoint truncated `2^l`-triangles plus the residual extreme vertices.
    DisjointPtilde,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub kind: PartitionKind,
    pub pieces: Vec<TriangleSpec>,
    /// Extreme vertices of all pieces; empty for the cover.
    pub residual: BTreeSet<Coord>,
}

/// Split a (non-truncated) `2^L`-triangle into its `3^(L-l)` sub-triangles of
/// level `l`.
pub fn subdivide(region: &LatticeRegion, level: u32, kind: PartitionKind) -> Result<Partition> {
    let parent = match region.kind {
        RegionKind::Triangle(spec) if !spec.truncated => spec,
        _ => {
            return Err(GasketError::InvalidArguments(
                "subdivide expects a non-truncated triangle region".into(),
            ))
        }
    };
    if level > parent.level {
        return Err(GasketError::InvalidArguments(format!(
            "piece level {level} exceeds the region level {}",
            parent.level
        )));
    }
    let mut offsets = vec![Coord::ORIGIN];
    for n in level..parent.level {
        let s = 1i64 << n;
        let len = offsets.len();
        for k in 0..len {
            offsets.push(offsets[k].offset(s, 0));
        }
        for k in 0..len {
            offsets.push(offsets[k].offset(0, s));
        }
    }
    let truncated = kind == PartitionKind::DisjointPtilde;
    let pieces: Vec<TriangleSpec> = offsets
        .iter()
        .map(|o| TriangleSpec {
            level,
            anchor: parent.anchor.offset(o.p, o.q),
            truncated,
            mirrored: parent.mirrored,
        })
        .collect();
    let residual = if truncated {
        pieces.iter().flat_map(|p| p.extreme_vertices()).collect()
    } else {
        BTreeSet::new()
    };
    Ok(Partition { kind, pieces, residual })
}

/// Translation carrying one `2^l`-triangle onto another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslationMap {
    pub dp: i64,
    pub dq: i64,
}

impl TranslationMap {
    pub fn apply(&self, c: Coord) -> Coord {
        c.offset(self.dp, self.dq)
    }

    pub fn inverse(&self) -> TranslationMap {
        TranslationMap { dp: -self.dp, dq: -self.dq }
    }

    pub fn is_identity(&self) -> bool {
        self.dp == 0 && self.dq == 0
    }
}

/// The translation taking triangle `a` onto triangle `b`.
///
/// A reflected gasket triangle coincides, as a vertex set, with a translate
/// of the unreflected one, so mirrored and unmirrored specs can be mixed.
pub fn translation_map(a: &TriangleSpec, b: &TriangleSpec) -> Result<TranslationMap> {
    if a.level != b.level || a.truncated != b.truncated {
        return Err(GasketError::InvalidArguments(format!(
            "cannot translate level {} (truncated={}) onto level {} (truncated={})",
            a.level, a.truncated, b.level, b.truncated
        )));
    }
    let (dp, dq) = b.bottom_left().sub(a.bottom_left());
    Ok(TranslationMap { dp, dq })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Histogram of degrees within the region.
    pub degree_histogram: BTreeMap<u32, usize>,
    pub interior_boundary_size: usize,
}

pub fn region_stats(region: &LatticeRegion) -> RegionStats {
    let mut degree_histogram = BTreeMap::new();
    for &d in &region.region_degree {
        *degree_histogram.entry(d as u32).or_insert(0) += 1;
    }
    RegionStats {
        vertex_count: region.len(),
        edge_count: region.edges.len(),
        degree_histogram,
        interior_boundary_size: region.interior_boundary.len(),
    }
}

/// Edge-list text export: a header line, one `p q` line per vertex, then one
/// `p1 q1 p2 q2` line per edge, all in canonical order.
pub fn export_edge_list(region: &LatticeRegion) -> String {
    let mut out = String::new();
    match region.kind {
        RegionKind::Triangle(spec) => {
            let _ = writeln!(
                out,
                "# gasket level={} truncated={} mirrored={}",
                spec.level, spec.truncated, spec.mirrored
            );
        }
        RegionKind::Ball { level } => {
            let _ = writeln!(out, "# gasket ball level={level}");
        }
        RegionKind::Custom => out.push_str("# gasket custom\n"),
    }
    for c in &region.vertices {
        let _ = writeln!(out, "{} {}", c.p, c.q);
    }
    for &(i, j) in &region.edges {
        let (a, b) = (region.vertices[i], region.vertices[j]);
        let _ = writeln!(out, "{} {} {} {}", a.p, a.q, b.p, b.q);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle() {
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        assert_eq!(g0.len(), 3);
        assert_eq!(g0.edges().len(), 3);
        assert_eq!(g0.vertices(), &[Coord::new(0, 0), Coord::new(1, 0), Coord::new(0, 1)]);
        let stats = region_stats(&g0);
        assert_eq!(stats.degree_histogram, BTreeMap::from([(2, 3)]));
    }

    #[test]
    fn level_three_has_42_vertices() {
        assert_eq!(build_triangle(TriangleSpec::new(3)).unwrap().len(), 42);
    }

    #[test]
    fn truncated_level_one_is_the_midpoint_triangle() {
        let t = build_triangle(TriangleSpec::new(1).truncated(true)).unwrap();
        assert_eq!(t.vertices(), &[Coord::new(1, 0), Coord::new(0, 1), Coord::new(1, 1)]);
        assert_eq!(t.edges().len(), 3);
    }

    #[test]
    fn truncated_level_two_boundary() {
        let t = build_triangle(TriangleSpec::new(2).truncated(true)).unwrap();
        assert_eq!(t.len(), 12);
        assert_eq!(region_stats(&t).interior_boundary_size, 6);
        let g2 = build_triangle(TriangleSpec::new(2)).unwrap();
        assert_eq!(region_stats(&g2).vertex_count, 15);
        assert_eq!(g2.interior_boundary_coords().len(), 3);
    }

    #[test]
    fn balls() {
        assert_eq!(build_ball(0).unwrap().len(), 5);
        assert_eq!(build_ball(2).unwrap().len(), 29);
        let b1 = build_ball(1).unwrap();
        let o = b1.index_of(Coord::ORIGIN).unwrap();
        assert_eq!(b1.region_degree()[o], 4);
        assert_eq!(b1.full_degree()[o], 4);
    }

    #[test]
    fn half_lattice_origin_degree() {
        let g = build_triangle_with(TriangleSpec::new(2), Ambient::Half, Capacity::default()).unwrap();
        let o = g.index_of(Coord::ORIGIN).unwrap();
        assert_eq!(g.full_degree()[o], 2);
        assert!(!g.interior_boundary().contains(&o));
        assert_eq!(g.interior_boundary().len(), 2);
    }

    #[test]
    fn capacity_guard() {
        let err = build_triangle(TriangleSpec::new(13)).unwrap_err();
        assert!(matches!(err, GasketError::Capacity(_)));
        let big = Capacity { max_level: 40 };
        assert!(matches!(
            build_triangle_with(TriangleSpec::new(40), Ambient::Full, big),
            Err(GasketError::Capacity(_))
        ));
    }

    #[test]
    fn mirror_reflects_x() {
        for c in [Coord::new(3, 2), Coord::new(-1, 5), Coord::new(0, 0)] {
            let (x, y) = c.position();
            let (mx, my) = c.mirror().position();
            assert!((x + mx).abs() < 1e-12 && (y - my).abs() < 1e-12);
            assert_eq!(c.mirror().mirror(), c);
        }
    }

    #[test]
    fn cover_of_level_three() {
        let g3 = build_triangle(TriangleSpec::new(3)).unwrap();
        let part = subdivide(&g3, 2, PartitionKind::CoverP).unwrap();
        assert_eq!(part.pieces.len(), 3);
        assert!(part.residual.is_empty());
        let sets: Vec<BTreeSet<Coord>> = part
            .pieces
            .iter()
            .map(|s| build_triangle(*s).unwrap().vertices().iter().copied().collect())
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                assert_eq!(sets[i].intersection(&sets[j]).count(), 1);
            }
        }
    }

    #[test]
    fn disjoint_partition_of_level_four() {
        let g4 = build_triangle(TriangleSpec::new(4)).unwrap();
        let part = subdivide(&g4, 2, PartitionKind::DisjointPtilde).unwrap();
        assert_eq!(part.pieces.len(), 9);
        assert_eq!(part.residual.len(), 15);
    }

    #[test]
    fn identity_partition_and_errors() {
        let g2 = build_triangle(TriangleSpec::new(2)).unwrap();
        let part = subdivide(&g2, 2, PartitionKind::CoverP).unwrap();
        assert_eq!(part.pieces, vec![TriangleSpec::new(2)]);
        assert!(matches!(
            subdivide(&g2, 3, PartitionKind::CoverP),
            Err(GasketError::InvalidArguments(_))
        ));
        let t = build_triangle(TriangleSpec::new(2).truncated(true)).unwrap();
        assert!(subdivide(&t, 1, PartitionKind::CoverP).is_err());
    }

    #[test]
    fn translation_identity_and_mismatch() {
        let a = TriangleSpec::at(2, Coord::new(4, 0));
        assert!(translation_map(&a, &a).unwrap().is_identity());
        assert!(translation_map(&a, &TriangleSpec::new(3)).is_err());
        assert!(translation_map(&a, &a.truncated(true)).is_err());
    }

    #[test]
    fn edge_list_format() {
        let g0 = build_triangle(TriangleSpec::new(0)).unwrap();
        let text = export_edge_list(&g0);
        assert_eq!(
            text,
            "# gasket level=0 truncated=false mirrored=false\n0 0\n1 0\n0 1\n0 0 1 0\n0 0 0 1\n1 0 0 1\n"
        );
    }

    #[test]
    fn dissection_ranks_mark_extremes() {
        let g2 = build_triangle(TriangleSpec::new(2)).unwrap();
        let ranks = g2.dissection_ranks();
        for c in TriangleSpec::new(2).extreme_vertices() {
            assert_eq!(ranks[g2.index_of(c).unwrap()], 2);
        }
        assert_eq!(ranks[g2.index_of(Coord::new(2, 0)).unwrap()], 1);
        assert_eq!(ranks[g2.index_of(Coord::new(1, 0)).unwrap()], 0);
    }
}
