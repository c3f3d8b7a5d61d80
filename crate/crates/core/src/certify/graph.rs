use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Zero};

use super::{Method, VertexCertificate};
use crate::array::{Array, Cell, Kind, PolytopeSpec, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    /// Adjacent iff the two cells share a line.
    Line,
    /// Adjacent iff the two cells share a coordinate hyperplane.
    Hyperplane,
}

impl GraphMode {
    pub fn for_kind(kind: Kind) -> Self {
        match kind {
            Kind::Omega => GraphMode::Line,
            Kind::Sigma => GraphMode::Hyperplane,
        }
    }

    fn kind(self) -> Kind {
        match self {
            GraphMode::Line => Kind::Omega,
            GraphMode::Hyperplane => Kind::Sigma,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Component {
    /// Graph vertex ids, ascending.
    pub members: Vec<usize>,
    /// `Some(color)` per member (parallel to `members`) when bipartite.
    pub coloring: Option<Vec<bool>>,
    /// A closed walk of odd length (vertex ids, first == last omitted) when
    /// not bipartite.
    pub odd_cycle: Option<Vec<usize>>,
}

impl Component {
    pub fn is_bipartite(&self) -> bool {
        self.coloring.is_some()
    }
}

/// Graph on the fractional support of an array (entries strictly between 0
/// and 1). Entries equal to 1 are forced in every convex decomposition and are
/// left out.
#[derive(Clone, Debug)]
pub struct SupportGraph {
    pub mode: GraphMode,
    pub cells: Vec<Cell>,
    /// Linear array index of each vertex.
    pub indices: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    components: Vec<Component>,
}

pub fn build_support_graph(a: &Array, mode: GraphMode) -> SupportGraph {
    let spec = PolytopeSpec {
        kind: mode.kind(),
        n: a.n(),
        d: a.d(),
    };
    let one = Rational::one();
    let indices: Vec<usize> = a
        .support_indices()
        .into_iter()
        .filter(|&i| a.get_index(i) != &one)
        .collect();
    let mut vertex_of = vec![usize::MAX; a.entries().len()];
    for (v, &i) in indices.iter().enumerate() {
        vertex_of[i] = v;
    }
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); indices.len()];
    for group in spec.constraint_groups() {
        let members: Vec<usize> = group
            .iter()
            .map(|&i| vertex_of[i])
            .filter(|&v| v != usize::MAX)
            .collect();
        for (k, &u) in members.iter().enumerate() {
            for &v in &members[k + 1..] {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
            }
        }
    }
    let adjacency: Vec<Vec<usize>> = adjacency.into_iter().map(|s| s.into_iter().collect()).collect();
    let components = components(&adjacency);
    SupportGraph {
        mode,
        cells: indices.iter().map(|&i| a.cell_of(i)).collect(),
        indices,
        adjacency,
        components,
    }
}

/// BFS 2-coloring per component; the first monochromatic edge yields an odd cycle.
fn components(adjacency: &[Vec<usize>]) -> Vec<Component> {
    let n = adjacency.len();
    let mut comp_of = vec![usize::MAX; n];
    let mut color = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp_of[start] = id;
        let mut members = vec![start];
        let mut conflict = None;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if comp_of[v] == usize::MAX {
                    comp_of[v] = id;
                    color[v] = !color[u];
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    members.push(v);
                    queue.push_back(v);
                } else if color[v] == color[u] && conflict.is_none() {
                    conflict = Some((u, v));
                }
            }
        }
        members.sort_unstable();
        let (coloring, odd_cycle) = match conflict {
            None => (Some(members.iter().map(|&v| color[v]).collect()), None),
            Some((u, v)) => (None, Some(odd_cycle_through(u, v, &parent, &depth))),
        };
        out.push(Component {
            members,
            coloring,
            odd_cycle,
        });
    }
    out
}

/// Tree paths from `u` and `v` up to their common ancestor, closed by edge `uv`.
fn odd_cycle_through(mut u: usize, mut v: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    while depth[u] > depth[v] {
        left.push(u);
        u = parent[u];
    }
    while depth[v] > depth[u] {
        right.push(v);
        v = parent[v];
    }
    while u != v {
        left.push(u);
        right.push(v);
        u = parent[u];
        v = parent[v];
    }
    left.push(u);
    left.extend(right.into_iter().rev());
    left
}

impl SupportGraph {
    pub fn vertex_count(&self) -> usize {
        self.indices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.adjacency.iter().all(|a| a.len() == k)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    pub fn is_bipartite(&self) -> bool {
        self.components.iter().all(Component::is_bipartite)
    }

    pub fn has_bipartite_component(&self) -> bool {
        self.components.iter().any(Component::is_bipartite)
    }

    /// Vertex id of an array cell, if the cell is a graph vertex.
    pub fn vertex_of(&self, index: usize) -> Option<usize> {
        self.indices.iter().position(|&i| i == index)
    }

    /// First odd cycle found, as cells.
    pub fn odd_cycle(&self) -> Option<Vec<Cell>> {
        self.components
            .iter()
            .find_map(|c| c.odd_cycle.as_ref())
            .map(|cyc| cyc.iter().map(|&v| self.cells[v].clone()).collect())
    }
}

/// Every constraint set holds either a single `1` or exactly two `1/2`, rest 0.
fn check_half_integral(a: &Array, spec: &PolytopeSpec) -> Result<()> {
    a.check_spec(spec)?;
    let half = Rational::new(1.into(), 2.into());
    let one = Rational::one();
    for group in spec.constraint_groups() {
        let (mut halves, mut ones) = (0, 0);
        for &i in &group {
            let v = a.get_index(i);
            if *v == half {
                halves += 1;
            } else if *v == one {
                ones += 1;
            } else if !v.is_zero() {
                return Err(Error::Precondition(format!(
                    "entry at {} is not 0, 1/2 or 1",
                    a.cell_of(i)
                )));
            }
        }
        if !matches!((halves, ones), (2, 0) | (0, 1)) {
            return Err(Error::Precondition(format!(
                "constraint set through {} has {halves} halves and {ones} ones",
                a.cell_of(group[0])
            )));
        }
    }
    Ok(())
}

/// Graph criterion for arrays whose constraint sets each hold a single `1` or
/// two `1/2`: a vertex iff no component of the graph on the `1/2` entries is
/// bipartite. Otherwise `A +- Delta/2` with `Delta = +-1` on the two colour
/// classes of a bipartite component is the witness.
pub fn is_vertex_graph(a: &Array, spec: &PolytopeSpec) -> Result<VertexCertificate> {
    check_half_integral(a, spec)?;
    let g = build_support_graph(a, GraphMode::for_kind(spec.kind));
    let Some(comp) = g.components().iter().find(|c| c.is_bipartite()) else {
        return Ok(VertexCertificate::vertex(Method::GraphCriterion));
    };
    let half = Rational::new(1.into(), 2.into());
    let mut x = a.clone();
    let mut y = a.clone();
    for (&v, &c) in comp.members.iter().zip(comp.coloring.as_ref().unwrap()) {
        let idx = g.indices[v];
        let (up, down) = (Rational::one(), Rational::zero());
        let (xv, yv) = if c { (up, down) } else { (down, up) };
        debug_assert_eq!(a.get_index(idx), &half);
        x.set_index(idx, xv);
        y.set_index(idx, yv);
    }
    Ok(VertexCertificate::non_vertex(Method::GraphCriterion, x, y))
}

/// [`is_vertex_graph`] for tristochastic arrays (`Omega`, `d = 2`).
pub fn is_vertex_half_integral(a: &Array) -> Result<VertexCertificate> {
    if a.d() != 2 {
        return Err(Error::DimensionMismatch(format!("expected d = 2, got d = {}", a.d())));
    }
    is_vertex_graph(a, &PolytopeSpec::omega(a.n(), 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{all_half, example_3x3x3, sigma_example_2x2x2};

    #[test]
    fn example_graph() {
        let a = example_3x3x3();
        let g = build_support_graph(&a, GraphMode::Line);
        assert_eq!(g.vertex_count(), 16);
        assert!(g.is_regular(3));
        assert!(g.is_connected());
        assert!(!g.is_bipartite());
        let cycle = g.odd_cycle().unwrap();
        assert_eq!(cycle.len() % 2, 1);
        let cert = is_vertex_half_integral(&a).unwrap();
        assert!(cert.is_vertex);
        assert_eq!(cert.method, Method::GraphCriterion);
    }

    #[test]
    fn odd_cycle_is_a_cycle() {
        let a = example_3x3x3();
        let g = build_support_graph(&a, GraphMode::Line);
        let comp = &g.components()[0];
        let cyc = comp.odd_cycle.as_ref().unwrap();
        for k in 0..cyc.len() {
            assert!(g.has_edge(cyc[k], cyc[(k + 1) % cyc.len()]));
        }
    }

    #[test]
    fn sigma_example_is_k4() {
        let a = sigma_example_2x2x2();
        let g = build_support_graph(&a, GraphMode::Hyperplane);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
        let cert = is_vertex_graph(&a, &PolytopeSpec::sigma(2, 2)).unwrap();
        assert!(cert.is_vertex);
    }

    #[test]
    fn all_half_n2_is_a_cube() {
        let a = all_half();
        let g = build_support_graph(&a, GraphMode::Line);
        assert_eq!(g.vertex_count(), 8);
        assert!(g.is_regular(3));
        assert!(g.is_connected());
        assert!(g.is_bipartite());
        let cert = is_vertex_half_integral(&a).unwrap();
        assert!(!cert.is_vertex);
        assert!(cert.witness_is_valid(&a, &PolytopeSpec::omega(2, 2)));
        let (x, y) = cert.witness.unwrap();
        assert!(x.is_zero_one() && y.is_zero_one());
    }

    #[test]
    fn precondition_violation() {
        let spec = PolytopeSpec::omega(3, 2);
        assert!(matches!(
            is_vertex_graph(&spec.barycenter(), &spec),
            Err(Error::Precondition(_))
        ));
        assert!(is_vertex_half_integral(&PolytopeSpec::omega(3, 1).barycenter()).is_err());
    }
}
