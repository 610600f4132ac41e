//! Vertex sets, graphs and discrete measures of the Sierpinski gasket.
//!
//! The gasket is generated by the three contractions `f_i(z) = (z - p_i)/2 + p_i`
//! towards the corners `p_1 = (0, 0)`, `p_2 = (1, 0)`, `p_3 = (1/2, √3/2)`.
//! Vertex coordinates are stored exactly as dyadic rationals: the Euclidean
//! abscissa `x` and the height `t` measured in units of `√3/2`, so the plane
//! point is `(x, t·√3/2)`. Identification of vertices across levels is then
//! plain equality.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default maximal level accepted by [`build_graph`].
pub const DEFAULT_LEVEL_CAP: usize = 12;

/// Corners of `V_0` in doubled coordinates (denominator 2).
const CORNERS: [(i64, i64); 3] = [(0, 0), (2, 0), (1, 2)];

/// A point with coordinates `x / 2^exp` and `t / 2^exp`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicPoint {
    x: i64,
    t: i64,
    exp: u32,
}

impl DyadicPoint {
    pub fn new(mut x: i64, mut t: i64, mut exp: u32) -> Self {
        while exp > 0 && x % 2 == 0 && t % 2 == 0 {
            x /= 2;
            t /= 2;
            exp -= 1;
        }
        DyadicPoint { x, t, exp }
    }

    /// Numerator and denominator of the Euclidean abscissa, in lowest terms.
    pub fn x_fraction(&self) -> (i64, u64) {
        reduce(self.x, self.exp)
    }

    /// Numerator and denominator of the height in units of `√3/2`, in lowest terms.
    pub fn t_fraction(&self) -> (i64, u64) {
        reduce(self.t, self.exp)
    }

    /// Planar Euclidean coordinates.
    pub fn euclidean(&self) -> [f64; 2] {
        let scale = (-(self.exp as f64)).exp2();
        [self.x as f64 * scale, self.t as f64 * scale * 3f64.sqrt() * 0.5]
    }

    /// Numerators at denominator `2^exp` (requires `exp >= self.exp`).
    fn scaled(&self, exp: u32) -> (i64, i64) {
        let shift = exp - self.exp;
        (self.x << shift, self.t << shift)
    }
}

fn reduce(mut num: i64, mut exp: u32) -> (i64, u64) {
    while exp > 0 && num % 2 == 0 {
        num /= 2;
        exp -= 1;
    }
    (num, 1u64 << exp)
}

/// Squared Euclidean distance between two points scaled by `4^(exp+1)`, exact.
///
/// With `dx`, `dt` the numerators at denominator `2^exp` the squared distance
/// is `(4 dx² + 3 dt²) / 4^(exp+1)`.
fn scaled_sq_distance(a: (i64, i64), b: (i64, i64)) -> i128 {
    let dx = (a.0 - b.0) as i128;
    let dt = (a.1 - b.1) as i128;
    4 * dx * dx + 3 * dt * dt
}

/// A vertex address: the image `f_{w_1} ∘ ⋯ ∘ f_{w_m}(p_corner)`.
///
/// The level of the address is the length of `word`. Junction vertices have
/// exactly two addresses of a given level; the canonical one is the
/// lexicographically smaller (word, corner) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Address {
    pub word: Vec<u8>,
    pub corner: u8,
}

impl Address {
    pub fn level(&self) -> usize {
        self.word.len()
    }

    /// The point this address names.
    pub fn point(&self) -> DyadicPoint {
        let m = self.word.len();
        let (mut x, mut t) = CORNERS[(self.corner - 1) as usize];
        for (k, &digit) in self.word.iter().enumerate() {
            let (cx, ct) = CORNERS[(digit - 1) as usize];
            x += cx << (m - k - 1);
            t += ct << (m - k - 1);
        }
        DyadicPoint::new(x, t, m as u32 + 1)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.word {
            write!(f, "{d}")?;
        }
        write!(f, ":{}", self.corner)
    }
}

/// The level-`m` pre-gasket `G_m`.
#[derive(Debug, Clone)]
pub struct GasketGraph {
    level: usize,
    points: Vec<DyadicPoint>,
    addresses: Vec<Address>,
    coords: Vec<[f64; 2]>,
    boundary: Vec<bool>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    interior: Vec<usize>,
    /// Position of each vertex in `interior`, `None` on `V_0`.
    interior_slot: Vec<Option<usize>>,
    lookup: HashMap<DyadicPoint, usize>,
}

/// `#V_m = 3(3^m + 1)/2`.
pub fn vertex_count(m: usize) -> usize {
    3 * (3usize.pow(m as u32) + 1) / 2
}

/// `#E_m = 3^{m+1}`.
pub fn edge_count(m: usize) -> usize {
    3usize.pow(m as u32 + 1)
}

/// `N_m = (3^{m+1} - 3)/2`.
pub fn interior_count(m: usize) -> usize {
    (3usize.pow(m as u32 + 1) - 3) / 2
}

/// `a_m = 3^{m+1}/2`, the inverse atom mass of `μ_m`.
pub fn atom_scale(m: usize) -> f64 {
    3f64.powi(m as i32 + 1) / 2.0
}

/// Builds `G_m` with the default level cap.
pub fn build_graph(m: usize) -> Result<GasketGraph> {
    build_graph_capped(m, DEFAULT_LEVEL_CAP)
}

pub fn build_graph_capped(m: usize, cap: usize) -> Result<GasketGraph> {
    if m > cap {
        return Err(Error::LevelCap { level: m, cap });
    }
    let n_cells = 3usize.pow(m as u32);
    let n_vertices = vertex_count(m);
    let mut points = Vec::with_capacity(n_vertices);
    let mut addresses = Vec::with_capacity(n_vertices);
    let mut lookup = HashMap::with_capacity(n_vertices);
    let mut edge_set = Vec::with_capacity(edge_count(m));

    let mut word = vec![1u8; m];
    for cell in 0..n_cells {
        if cell > 0 {
            // increment the base-3 word, last digit fastest
            let mut k = m;
            while k > 0 {
                k -= 1;
                if word[k] < 3 {
                    word[k] += 1;
                    break;
                }
                word[k] = 1;
            }
        }
        let mut corner_ids = [0usize; 3];
        for corner in 1..=3u8 {
            let addr = Address { word: word.clone(), corner };
            let p = addr.point();
            // cells are visited in lexicographic order, so the first address
            // seen for a point is its canonical one
            let id = *lookup.entry(p).or_insert_with(|| {
                points.push(p);
                addresses.push(addr);
                points.len() - 1
            });
            corner_ids[(corner - 1) as usize] = id;
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let (i, j) = (corner_ids[a], corner_ids[b]);
            edge_set.push((i.min(j), i.max(j)));
        }
    }
    edge_set.sort_unstable();
    edge_set.dedup();

    let corners: Vec<DyadicPoint> =
        CORNERS.iter().map(|&(x, t)| DyadicPoint::new(x, t, 1)).collect();
    let boundary: Vec<bool> = points.iter().map(|p| corners.contains(p)).collect();
    let mut neighbors = vec![Vec::with_capacity(4); points.len()];
    for &(i, j) in &edge_set {
        neighbors[i].push(j);
        neighbors[j].push(i);
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    let interior: Vec<usize> = (0..points.len()).filter(|&i| !boundary[i]).collect();
    let mut interior_slot = vec![None; points.len()];
    for (slot, &v) in interior.iter().enumerate() {
        interior_slot[v] = Some(slot);
    }
    let coords = points.iter().map(DyadicPoint::euclidean).collect();

    Ok(GasketGraph {
        level: m,
        points,
        addresses,
        coords,
        boundary,
        edges: edge_set,
        neighbors,
        interior,
        interior_slot,
        lookup,
    })
}

impl GasketGraph {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `N_m`, the number of vertices off `V_0`.
    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn a_m(&self) -> f64 {
        atom_scale(self.level)
    }

    pub fn points(&self) -> &[DyadicPoint] {
        &self.points
    }

    pub fn addresses(&self) -> &[Address] {
        &self.addresses
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Interior vertex indices in canonical order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Position of vertex `v` among the interior vertices.
    pub fn interior_slot(&self, v: usize) -> Option<usize> {
        self.interior_slot[v]
    }

    pub fn index_of(&self, p: &DyadicPoint) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    /// Extends an interior vector by zero on `V_0`.
    pub fn extend_by_zero(&self, interior_values: &[f64]) -> Result<Vec<f64>> {
        check_len(self.level, self.interior.len(), interior_values.len())?;
        let mut out = vec![0.0; self.vertex_count()];
        for (&v, &x) in self.interior.iter().zip(interior_values) {
            out[v] = x;
        }
        Ok(out)
    }

    /// Values at the interior vertices.
    pub fn interior_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_len(self.level, self.vertex_count(), values.len())?;
        Ok(self.interior.iter().map(|&v| values[v]).collect())
    }

    /// Largest absolute value on `V_0`.
    pub fn boundary_magnitude(&self, values: &[f64]) -> f64 {
        self.boundary
            .iter()
            .zip(values)
            .filter(|(&b, _)| b)
            .map(|(_, x)| x.abs())
            .fold(0.0, f64::max)
    }

    /// Samples a function of the planar coordinates at every vertex.
    pub fn sample<F: Fn([f64; 2]) -> f64>(&self, f: F) -> Vec<f64> {
        self.coords.iter().map(|&c| f(c)).collect()
    }
}

pub(crate) fn check_len(level: usize, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { level, expected, got });
    }
    Ok(())
}

/// Index map embedding `V_m` into `V_M`.
#[derive(Debug, Clone)]
pub struct Nesting {
    coarse_level: usize,
    fine_level: usize,
    fine_len: usize,
    map: Vec<usize>,
}

impl Nesting {
    pub fn new(coarse: &GasketGraph, fine: &GasketGraph) -> Result<Self> {
        if coarse.level > fine.level {
            return Err(Error::NotNested { target: coarse.level, source_level: fine.level });
        }
        let map = coarse
            .points
            .iter()
            .map(|p| fine.index_of(p).expect("V_m is contained in V_M"))
            .collect();
        Ok(Nesting {
            coarse_level: coarse.level,
            fine_level: fine.level,
            fine_len: fine.vertex_count(),
            map,
        })
    }

    pub fn coarse_level(&self) -> usize {
        self.coarse_level
    }

    pub fn fine_level(&self) -> usize {
        self.fine_level
    }

    /// Fine-level index of each coarse vertex.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `f|_{V_m}` for `f` given on `V_M`.
    pub fn restrict(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_len(self.fine_level, self.fine_len, values.len())?;
        Ok(self.map.iter().map(|&i| values[i]).collect())
    }
}

/// Restricts values on `V_M` (in `fine` order) to `V_m`.
pub fn restrict(fine: &GasketGraph, values: &[f64], target: usize) -> Result<Vec<f64>> {
    check_len(fine.level, fine.vertex_count(), values.len())?;
    if target > fine.level {
        return Err(Error::NotNested { target, source_level: fine.level });
    }
    let coarse = build_graph(target)?;
    Nesting::new(&coarse, fine)?.restrict(values)
}

/// `∫ g dμ_m = (1/a_m) Σ_{p ∈ V_m} g(p)`.
pub fn discrete_integral(values: &[f64], m: usize) -> Result<f64> {
    check_len(m, vertex_count(m), values.len())?;
    Ok(values.iter().sum::<f64>() / atom_scale(m))
}

/// Uniform quadrature on the nodes of `V_M` with weight `1/a_M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffQuadrature {
    pub level: usize,
    pub node_count: usize,
    pub weight: f64,
}

impl HausdorffQuadrature {
    pub fn new(level: usize) -> Self {
        HausdorffQuadrature { level, node_count: vertex_count(level), weight: 1.0 / atom_scale(level) }
    }

    /// Total mass `#V_M / a_M = (3^M + 1)/3^M`.
    pub fn total_mass(&self) -> f64 {
        self.node_count as f64 * self.weight
    }

    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        discrete_integral(values, self.level)
    }
}

/// Nearest-vertex partition of `V_M` into the Voronoi cells of `V_m`.
#[derive(Debug, Clone)]
pub struct VoronoiCells {
    pub level: usize,
    pub reference: usize,
    /// Coarse vertex owning each fine node.
    pub assignment: Vec<usize>,
    /// Fine nodes of each coarse cell, ascending.
    pub cells: Vec<Vec<usize>>,
    /// `μ(C_p^m) ≈ #cell / a_M`.
    pub measures: Vec<f64>,
}

/// Assigns every node of `fine` to its nearest `coarse` vertex.
///
/// Distances are compared exactly; equidistant nodes go to the smaller coarse
/// index. `fine.level() == coarse.level()` gives single-node cells.
pub fn voronoi_quadrature(coarse: &GasketGraph, fine: &GasketGraph) -> Result<VoronoiCells> {
    if fine.level < coarse.level {
        return Err(Error::ReferenceLevel { level: coarse.level, reference: fine.level });
    }
    let exp = fine.level as u32 + 1;
    let coarse_pts: Vec<(i64, i64)> = coarse.points.iter().map(|p| p.scaled(exp)).collect();
    let mut assignment = Vec::with_capacity(fine.vertex_count());
    let mut cells = vec![Vec::new(); coarse.vertex_count()];
    for (node, p) in fine.points.iter().enumerate() {
        let q = p.scaled(exp);
        let mut best = 0usize;
        let mut best_d = i128::MAX;
        for (v, &c) in coarse_pts.iter().enumerate() {
            let d = scaled_sq_distance(q, c);
            if d < best_d {
                best_d = d;
                best = v;
            }
        }
        assignment.push(best);
        cells[best].push(node);
    }
    let a = atom_scale(fine.level);
    let measures = cells.iter().map(|c| c.len() as f64 / a).collect();
    Ok(VoronoiCells { level: coarse.level, reference: fine.level, assignment, cells, measures })
}

impl VoronoiCells {
    /// Cell averages `f̄_m(p)` of values given on the reference level.
    pub fn cell_averages(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_len(self.reference, self.assignment.len(), values.len())?;
        self.cells
            .iter()
            .enumerate()
            .map(|(p, cell)| {
                if cell.is_empty() {
                    return Err(Error::EmptyCell(p));
                }
                Ok(cell.iter().map(|&i| values[i]).sum::<f64>() / cell.len() as f64)
            })
            .collect()
    }

    /// Largest distance from a reference node to the vertex owning it.
    pub fn max_assignment_distance(&self, coarse: &GasketGraph, fine: &GasketGraph) -> f64 {
        self.assignment
            .iter()
            .enumerate()
            .map(|(node, &v)| {
                let (a, b) = (fine.coords[node], coarse.coords[v]);
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Independent enumeration: apply the three maps to V_{m-1} in floating
    /// point and deduplicate on a rounded key.
    fn brute_force_vertices(m: usize) -> HashSet<(i64, i64)> {
        let h = 3f64.sqrt() / 2.0;
        let corners = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        let mut pts: Vec<[f64; 2]> = corners.to_vec();
        for _ in 0..m {
            let mut next = Vec::new();
            for c in &corners {
                for p in &pts {
                    next.push([(p[0] - c[0]) / 2.0 + c[0], (p[1] - c[1]) / 2.0 + c[1]]);
                }
            }
            pts = next;
        }
        pts.iter().map(|p| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64)).collect()
    }

    #[test]
    fn level_one_counts() {
        let g = build_graph(1).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.interior_count(), 3);
        assert_eq!(g.a_m(), 4.5);
    }

    #[test]
    fn level_zero_has_no_interior() {
        let g = build_graph(0).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.interior_count(), 0);
        assert!(g.boundary_flags().iter().all(|&b| b));
    }

    #[test]
    fn level_three_matches_brute_force() {
        let g = build_graph(3).unwrap();
        let brute = brute_force_vertices(3);
        assert_eq!(brute.len(), 42);
        assert_eq!(g.vertex_count(), 42);
        assert_eq!(g.edge_count(), 81);
        assert_eq!(g.interior_count(), 39);
        let ours: HashSet<(i64, i64)> = g
            .coords()
            .iter()
            .map(|p| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64))
            .collect();
        assert_eq!(ours, brute);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(build_graph_capped(5, 4), Err(Error::LevelCap { level: 5, cap: 4 })));
    }

    #[test]
    fn degrees_and_edge_lengths() {
        for m in 0..=5 {
            let g = build_graph(m).unwrap();
            for v in 0..g.vertex_count() {
                let expected = if g.is_boundary(v) { 2 } else { 4 };
                assert_eq!(g.degree(v), expected, "m={m} v={v}");
            }
            let len = 0.5f64.powi(m as i32);
            for &(i, j) in g.edges() {
                assert!((g.distance(i, j) - len).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let g = build_graph(3).unwrap();
        for w in g.addresses().windows(2) {
            assert!(w[0] < w[1]);
        }
        for (a, p) in g.addresses().iter().zip(g.points()) {
            assert_eq!(a.level(), 3);
            assert_eq!(a.point(), *p);
        }
    }

    #[test]
    fn junction_vertices_have_two_addresses() {
        let m = 2;
        let g = build_graph(m).unwrap();
        let mut reps: HashMap<DyadicPoint, usize> = HashMap::new();
        for c in 0..9u8 {
            let word = vec![c / 3 + 1, c % 3 + 1];
            for corner in 1..=3 {
                *reps.entry(Address { word: word.clone(), corner }.point()).or_default() += 1;
            }
        }
        for (v, p) in g.points().iter().enumerate() {
            assert_eq!(reps[p], if g.is_boundary(v) { 1 } else { 2 });
        }
    }

    #[test]
    fn restriction_examples() {
        let g3 = build_graph(3).unwrap();
        let ones = vec![1.0; g3.vertex_count()];
        assert_eq!(restrict(&g3, &ones, 1).unwrap(), vec![1.0; 6]);

        let g2 = build_graph(2).unwrap();
        let g1 = build_graph(1).unwrap();
        let xs: Vec<f64> = g2.coords().iter().map(|c| c[0]).collect();
        let r = restrict(&g2, &xs, 1).unwrap();
        let expect: Vec<f64> = g1.coords().iter().map(|c| c[0]).collect();
        assert_eq!(r, expect);

        // a vertex of V_2 that is not in V_1
        let nest = Nesting::new(&g1, &g2).unwrap();
        let only2 = (0..g2.vertex_count()).find(|i| !nest.map().contains(i)).unwrap();
        let mut ind = vec![0.0; g2.vertex_count()];
        ind[only2] = 1.0;
        assert_eq!(nest.restrict(&ind).unwrap(), vec![0.0; 6]);

        assert!(matches!(
            nest.restrict(&[0.0; 5]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn integral_examples() {
        assert!((discrete_integral(&[1.0; 6], 1).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(discrete_integral(&[0.0; 15], 2).unwrap(), 0.0);
        let mut ind = vec![0.0; 15];
        ind[4] = 1.0;
        assert!((discrete_integral(&ind, 2).unwrap() - 1.0 / 13.5).abs() < 1e-15);
        assert!(discrete_integral(&[1.0; 7], 1).is_err());
    }

    #[test]
    fn quadrature_mass() {
        for m in 0..8 {
            let q = HausdorffQuadrature::new(m);
            let exact = (3f64.powi(m as i32) + 1.0) / 3f64.powi(m as i32);
            assert!((q.total_mass() - exact).abs() < 1e-14);
            let ones = vec![1.0; q.node_count];
            assert!((q.integrate(&ones).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn voronoi_self_assignment() {
        let g1 = build_graph(1).unwrap();
        let cells = voronoi_quadrature(&g1, &g1).unwrap();
        for (p, c) in cells.cells.iter().enumerate() {
            assert_eq!(c, &vec![p]);
        }
        for &mu in &cells.measures {
            assert!((mu - 1.0 / 4.5).abs() < 1e-15);
        }
    }

    #[test]
    fn voronoi_partition_mass() {
        let g1 = build_graph(1).unwrap();
        let g4 = build_graph(4).unwrap();
        let cells = voronoi_quadrature(&g1, &g4).unwrap();
        let total: usize = cells.cells.iter().map(Vec::len).sum();
        assert_eq!(total, 123);
        let mass: f64 = cells.measures.iter().sum();
        // every node of V_4 carries 1/a_4
        assert!((mass - 123.0 / 121.5).abs() < 1e-14);
        assert!(cells.max_assignment_distance(&g1, &g4) <= 0.25 + 1e-12);
        assert!(voronoi_quadrature(&g4, &g1).is_err());
    }

    #[test]
    fn voronoi_interior_cells_are_heavier() {
        let g1 = build_graph(1).unwrap();
        let g6 = build_graph(6).unwrap();
        let cells = voronoi_quadrature(&g1, &g6).unwrap();
        // brute-force nearest-vertex counts with the tie rule
        let mut counts = vec![0usize; 6];
        for node in 0..g6.vertex_count() {
            let c = g6.coords()[node];
            let mut best = (f64::INFINITY, 0);
            for v in 0..6 {
                let p = g1.coords()[v];
                let d = (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2);
                if d < best.0 - 1e-12 {
                    best = (d, v);
                }
            }
            counts[best.1] += 1;
        }
        let ours: Vec<usize> = cells.cells.iter().map(Vec::len).collect();
        assert_eq!(ours, counts);
        let min_interior = g1.interior().iter().map(|&v| cells.measures[v]).fold(f64::MAX, f64::min);
        let max_boundary = (0..6)
            .filter(|&v| g1.is_boundary(v))
            .map(|v| cells.measures[v])
            .fold(0.0, f64::max);
        assert!(min_interior > max_boundary);
    }
}
