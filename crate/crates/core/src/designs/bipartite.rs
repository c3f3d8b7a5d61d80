use std::collections::VecDeque;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use super::perm::random_permutation;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Bipartite graph with `n` left and `n` right vertices, stored as a 0/1
/// adjacency matrix indexed `[left][right]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    adj: Vec<Vec<bool>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    Left(usize),
    Right(usize),
}

impl BipartiteGraph {
    pub fn empty(n: usize) -> Self {
        BipartiteGraph {
            adj: vec![vec![false; n]; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        BipartiteGraph {
            adj: vec![vec![true; n]; n],
        }
    }

    pub fn from_adjacency(adj: Vec<Vec<bool>>) -> Result<Self> {
        let n = adj.len();
        if adj.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("adjacency matrix must be square".into()));
        }
        Ok(BipartiteGraph { adj })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(l, r) in edges {
            g.add_edge(l, r);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l][r]
    }

    pub fn add_edge(&mut self, l: usize, r: usize) {
        self.adj[l][r] = true;
    }

    pub fn remove_edge(&mut self, l: usize, r: usize) {
        self.adj[l][r] = false;
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|l| (0..n).map(move |r| (l, r)))
            .filter(|&(l, r)| self.adj[l][r])
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|&&b| b).count()).sum()
    }

    pub fn left_degree(&self, l: usize) -> usize {
        self.adj[l].iter().filter(|&&b| b).count()
    }

    pub fn right_degree(&self, r: usize) -> usize {
        self.adj.iter().filter(|row| row[r]).count()
    }

    /// `Some(k)` if every vertex on both sides has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let n = self.order();
        let k = if n == 0 { 0 } else { self.left_degree(0) };
        let regular = (0..n).all(|v| self.left_degree(v) == k && self.right_degree(v) == k);
        regular.then_some(k)
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn contains_edge(&self, a: Vertex, b: Vertex) -> bool {
        match (a, b) {
            (Vertex::Left(l), Vertex::Right(r)) | (Vertex::Right(r), Vertex::Left(l)) => {
                l < self.order() && r < self.order() && self.adj[l][r]
            }
            _ => false,
        }
    }

    pub fn union(&self, other: &BipartiteGraph) -> BipartiteGraph {
        BipartiteGraph {
            adj: self
                .adj
                .iter()
                .zip(&other.adj)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x || *y).collect())
                .collect(),
        }
    }

    pub fn difference(&self, other: &BipartiteGraph) -> BipartiteGraph {
        BipartiteGraph {
            adj: self
                .adj
                .iter()
                .zip(&other.adj)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x && !*y).collect())
                .collect(),
        }
    }
}

/// Kuhn's augmenting-path matching restricted to the vertices with
/// `left_alive` / `right_alive`; vertex and neighbour orders are shuffled by
/// `rng`. Returns `match_of_left`, `None` unless every alive left vertex is
/// matched.
fn matching_on(
    g: &BipartiteGraph,
    left_alive: &[bool],
    right_alive: &[bool],
    rng: Option<&mut Rng>,
) -> Option<Vec<Option<usize>>> {
    let n = g.order();
    let mut left_order: Vec<usize> = (0..n).filter(|&l| left_alive[l]).collect();
    let mut neighbours: Vec<Vec<usize>> = (0..n)
        .map(|l| (0..n).filter(|&r| right_alive[r] && g.adj[l][r]).collect())
        .collect();
    if let Some(rng) = rng {
        left_order.shuffle(rng);
        for list in neighbours.iter_mut() {
            list.shuffle(rng);
        }
    }

    fn augment(
        l: usize,
        neighbours: &[Vec<usize>],
        seen: &mut [bool],
        match_left: &mut [Option<usize>],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &r in &neighbours[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let free = match match_right[r] {
                None => true,
                Some(other) => augment(other, neighbours, seen, match_left, match_right),
            };
            if free {
                match_left[l] = Some(r);
                match_right[r] = Some(l);
                return true;
            }
        }
        false
    }

    let mut match_left = vec![None; n];
    let mut match_right = vec![None; n];
    for &l in &left_order {
        let mut seen = vec![false; n];
        if !augment(l, &neighbours, &mut seen, &mut match_left, &mut match_right) {
            return None;
        }
    }
    Some(match_left)
}

/// Perfect matching as `left -> right`, vertex order shuffled by `seed`.
pub fn perfect_matching(g: &BipartiteGraph, seed: u64) -> Result<Vec<usize>> {
    let n = g.order();
    let mut rng = rng::seeded(seed);
    perfect_matching_with(g, &mut rng).inspect(|m| {
        debug_assert_eq!(m.len(), n);
    })
}

pub(crate) fn perfect_matching_with(g: &BipartiteGraph, rng: &mut Rng) -> Result<Vec<usize>> {
    let n = g.order();
    let alive = vec![true; n];
    let m = matching_on(g, &alive, &alive, Some(rng)).ok_or(Error::NoPerfectMatching)?;
    Ok(m.into_iter().map(|r| r.expect("perfect")).collect())
}

fn check_two_factor(g: &BipartiteGraph, factor: &BipartiteGraph) -> bool {
    let n = g.order();
    factor.difference(g).edge_count() == 0
        && (0..n).all(|v| factor.left_degree(v) == 2 && factor.right_degree(v) == 2)
}

/// Spanning 2-regular subgraph of a `k`-regular bipartite graph (`k >= 2`
/// even), as the union of two edge-disjoint perfect matchings.
pub fn extract_two_factor(g: &BipartiteGraph, seed: u64) -> Result<BipartiteGraph> {
    let mut rng = rng::seeded(seed);
    extract_two_factor_with(g, &mut rng)
}

pub(crate) fn extract_two_factor_with(g: &BipartiteGraph, rng: &mut Rng) -> Result<BipartiteGraph> {
    match g.regular_degree() {
        Some(k) if k >= 2 && k % 2 == 0 => {}
        Some(k) => {
            return Err(Error::Precondition(format!(
                "graph is {k}-regular; need even degree >= 2"
            )))
        }
        None => return Err(Error::Precondition("graph is not regular".into())),
    }
    let n = g.order();
    let first = perfect_matching_with(g, rng)?;
    let first = BipartiteGraph::from_edges(n, &first.into_iter().enumerate().collect::<Vec<_>>());
    let rest = g.difference(&first);
    let second = perfect_matching_with(&rest, rng)?;
    let second = BipartiteGraph::from_edges(n, &second.into_iter().enumerate().collect::<Vec<_>>());
    let factor = first.union(&second);
    debug_assert!(check_two_factor(g, &factor));
    Ok(factor)
}

fn path_edges(g: &BipartiteGraph, path: &[Vertex; 4]) -> Result<Vec<(usize, usize)>> {
    let n = g.order();
    for (a, v) in path.iter().enumerate() {
        let idx = match v {
            Vertex::Left(i) | Vertex::Right(i) => *i,
        };
        if idx >= n {
            return Err(Error::Precondition(format!("path vertex {v:?} out of range")));
        }
        if path[..a].contains(v) {
            return Err(Error::Precondition(format!("path repeats vertex {v:?}")));
        }
    }
    path.windows(2)
        .map(|w| match (w[0], w[1]) {
            (Vertex::Left(l), Vertex::Right(r)) | (Vertex::Right(r), Vertex::Left(l)) => {
                if g.has_edge(l, r) {
                    Ok((l, r))
                } else {
                    Err(Error::Precondition(format!("({}, {}) is not an edge", l + 1, r + 1)))
                }
            }
            _ => Err(Error::Precondition("path does not alternate sides".into())),
        })
        .collect()
}

/// 2-factor of an `(n-2)`-regular bipartite graph (`n >= 6`) that contains the
/// three edges of the path `x1 x2 x3 x4`.
///
/// Built as `Phi + Psi + path` where `Phi` is a perfect matching of
/// `G - {x1..x4}` and `Psi` a perfect matching of `(G - {x2, x3}) - Phi`.
/// Several seeded matchings are tried; if none combine, the residual degree
/// problem is solved by max flow.
pub fn two_factor_containing_path(g: &BipartiteGraph, path: &[Vertex; 4], seed: u64) -> Result<BipartiteGraph> {
    let mut rng = rng::seeded(seed);
    two_factor_containing_path_with(g, path, &mut rng)
}

pub(crate) fn two_factor_containing_path_with(
    g: &BipartiteGraph,
    path: &[Vertex; 4],
    rng: &mut Rng,
) -> Result<BipartiteGraph> {
    let n = g.order();
    if n < 6 {
        return Err(Error::Precondition(format!("need n >= 6, got {n}")));
    }
    if g.regular_degree() != Some(n - 2) {
        return Err(Error::Precondition(format!("graph is not {}-regular", n - 2)));
    }
    let m_edges = path_edges(g, path)?;
    let mut left_alive = vec![true; n];
    let mut right_alive = vec![true; n];
    let kill = |v: Vertex, la: &mut [bool], ra: &mut [bool]| match v {
        Vertex::Left(l) => la[l] = false,
        Vertex::Right(r) => ra[r] = false,
    };
    for &v in path.iter() {
        kill(v, &mut left_alive, &mut right_alive);
    }
    let mut inner_left = vec![true; n];
    let mut inner_right = vec![true; n];
    for &v in &path[1..3] {
        kill(v, &mut inner_left, &mut inner_right);
    }
    let m_graph = BipartiteGraph::from_edges(n, &m_edges);

    for _attempt in 0..8 {
        let Some(phi) = matching_on(g, &left_alive, &right_alive, Some(rng)) else {
            continue;
        };
        let phi_edges: Vec<(usize, usize)> = phi
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect();
        let phi_graph = BipartiteGraph::from_edges(n, &phi_edges);
        let rest = g.difference(&phi_graph);
        let Some(psi) = matching_on(&rest, &inner_left, &inner_right, Some(rng)) else {
            continue;
        };
        let psi_edges: Vec<(usize, usize)> = psi
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect();
        let factor = phi_graph
            .union(&BipartiteGraph::from_edges(n, &psi_edges))
            .union(&m_graph);
        if check_two_factor(g, &factor) {
            return Ok(factor);
        }
    }

    // residual degree-constrained subgraph: path edges fixed, every vertex
    // needs 2 minus its path degree more edges
    let mut need_left = vec![2usize; n];
    let mut need_right = vec![2usize; n];
    for &(l, r) in &m_edges {
        need_left[l] -= 1;
        need_right[r] -= 1;
    }
    let mut available = g.difference(&m_graph);
    for l in 0..n {
        for r in 0..n {
            if need_left[l] == 0 || need_right[r] == 0 {
                available.remove_edge(l, r);
            }
        }
    }
    let extra = degree_constrained_subgraph(&available, &need_left, &need_right)
        .ok_or_else(|| Error::ConstructionFailed("no 2-factor contains the path".into()))?;
    let factor = BipartiteGraph::from_edges(n, &extra).union(&m_graph);
    if !check_two_factor(g, &factor) {
        return Err(Error::ConstructionFailed("2-factor postcondition failed".into()));
    }
    Ok(factor)
}

/// Edge set with exactly the requested degrees, via unit-capacity max flow.
fn degree_constrained_subgraph(g: &BipartiteGraph, need_left: &[usize], need_right: &[usize]) -> Option<Vec<(usize, usize)>> {
    let n = g.order();
    let (source, sink) = (2 * n, 2 * n + 1);
    let size = 2 * n + 2;
    let mut cap = vec![vec![0i64; size]; size];
    for l in 0..n {
        cap[source][l] = need_left[l] as i64;
        for r in 0..n {
            if g.has_edge(l, r) {
                cap[l][n + r] = 1;
            }
        }
    }
    for r in 0..n {
        cap[n + r][sink] = need_right[r] as i64;
    }
    let demand: usize = need_left.iter().sum();
    if demand != need_right.iter().sum::<usize>() {
        return None;
    }
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..size {
                if parent[v] == usize::MAX && cap[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            break;
        }
        let mut v = sink;
        while v != source {
            let u = parent[v];
            cap[u][v] -= 1;
            cap[v][u] += 1;
            v = u;
        }
        flow += 1;
    }
    if flow != demand {
        return None;
    }
    let mut edges = Vec::new();
    for l in 0..n {
        for r in 0..n {
            // saturated forward edge carries flow
            if g.has_edge(l, r) && cap[l][n + r] == 0 {
                edges.push((l, r));
            }
        }
    }
    Some(edges)
}

/// Random `k`-regular bipartite graph on `n + n` vertices: a relabelled
/// circulant with `k` random shifts.
pub fn random_regular_bipartite(n: usize, k: usize, seed: u64) -> Result<BipartiteGraph> {
    if k > n {
        return Err(Error::InvalidParameter(format!("degree {k} exceeds side size {n}")));
    }
    let mut rng = rng::seeded(seed);
    let left = random_permutation(n, &mut rng);
    let right = random_permutation(n, &mut rng);
    let mut shifts: Vec<usize> = (0..n).collect();
    shifts.shuffle(&mut rng);
    let mut g = BipartiteGraph::empty(n);
    for &s in &shifts[..k] {
        for i in 0..n {
            g.add_edge(left[i], right[(i + s) % n]);
        }
    }
    Ok(g)
}

/// Random path `x1 x2 x3 x4` starting on the left side, `None` if the graph
/// has none.
pub fn random_path(g: &BipartiteGraph, seed: u64) -> Option<[Vertex; 4]> {
    random_path_with(g, &mut rng::seeded(seed))
}

pub(crate) fn random_path_with(g: &BipartiteGraph, rng: &mut Rng) -> Option<[Vertex; 4]> {
    let n = g.order();
    for _ in 0..100 {
        let l1 = rng.random_range(0..n);
        let pick = |list: Vec<usize>, rng: &mut Rng| list.choose(rng).copied();
        let Some(r1) = pick((0..n).filter(|&r| g.has_edge(l1, r)).collect(), rng) else {
            continue;
        };
        let Some(l2) = pick((0..n).filter(|&l| l != l1 && g.has_edge(l, r1)).collect(), rng) else {
            continue;
        };
        let Some(r2) = pick((0..n).filter(|&r| r != r1 && g.has_edge(l2, r)).collect(), rng) else {
            continue;
        };
        return Some([Vertex::Left(l1), Vertex::Right(r1), Vertex::Left(l2), Vertex::Right(r2)]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_perfect(g: &BipartiteGraph, m: &[usize]) -> bool {
        let mut used = vec![false; g.order()];
        m.len() == g.order()
            && m.iter()
                .enumerate()
                .all(|(l, &r)| g.has_edge(l, r) && !std::mem::replace(&mut used[r], true))
    }

    /// `K_{n,n}` minus the union of two disjoint perfect matchings.
    fn random_co_two_regular(n: usize, seed: u64) -> BipartiteGraph {
        let two = random_regular_bipartite(n, 2, seed).unwrap();
        BipartiteGraph::complete(n).difference(&two)
    }

    #[test]
    fn matching_complete_and_diagonal() {
        let k3 = BipartiteGraph::complete(3);
        for seed in 0..10 {
            assert!(is_perfect(&k3, &perfect_matching(&k3, seed).unwrap()));
        }
        let diag = BipartiteGraph::from_edges(4, &[(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(perfect_matching(&diag, 5).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn matching_on_regular_graph() {
        let g = random_regular_bipartite(10, 5, 7).unwrap();
        assert_eq!(g.regular_degree(), Some(5));
        assert!(is_perfect(&g, &perfect_matching(&g, 1).unwrap()));
    }

    #[test]
    fn no_perfect_matching_is_an_error() {
        let g = BipartiteGraph::from_edges(2, &[(0, 0), (1, 0)]);
        assert_eq!(perfect_matching(&g, 0), Err(Error::NoPerfectMatching));
    }

    #[test]
    fn two_factor_of_two_regular_is_itself() {
        let g = random_regular_bipartite(7, 2, 3).unwrap();
        assert_eq!(extract_two_factor(&g, 0).unwrap(), g);
    }

    #[test]
    fn two_factor_of_k44_leaves_two_regular() {
        let g = BipartiteGraph::complete(4);
        let f = extract_two_factor(&g, 2).unwrap();
        assert_eq!(g.difference(&f).regular_degree(), Some(2));
    }

    #[test]
    fn odd_degree_rejected() {
        let g = random_regular_bipartite(6, 3, 0).unwrap();
        assert!(matches!(extract_two_factor(&g, 0), Err(Error::Precondition(_))));
        let irregular = BipartiteGraph::from_edges(2, &[(0, 0), (0, 1), (1, 1)]);
        assert!(extract_two_factor(&irregular, 0).is_err());
    }

    #[test]
    fn repeated_extraction_empties_the_graph() {
        for k in [2, 4, 6, 8] {
            let mut g = random_regular_bipartite(9, k, k as u64).unwrap();
            let mut rounds = 0;
            while g.edge_count() > 0 {
                let f = extract_two_factor(&g, rounds).unwrap();
                g = g.difference(&f);
                rounds += 1;
            }
            assert_eq!(rounds, k as u64 / 2);
        }
    }

    #[test]
    fn path_two_factor_n6_and_n10() {
        for n in [6, 10] {
            for seed in 0..100 {
                let g = random_co_two_regular(n, seed);
                let path = random_path(&g, seed).unwrap();
                let f = two_factor_containing_path(&g, &path, seed).unwrap();
                assert!(check_two_factor(&g, &f));
                for w in path.windows(2) {
                    assert!(f.contains_edge(w[0], w[1]));
                }
            }
        }
    }

    #[test]
    fn bad_paths_rejected() {
        let g = random_co_two_regular(6, 1);
        let repeated = [Vertex::Left(0), Vertex::Right(1), Vertex::Left(0), Vertex::Right(2)];
        assert!(two_factor_containing_path(&g, &repeated, 0).is_err());
        let same_side = [Vertex::Left(0), Vertex::Left(1), Vertex::Right(0), Vertex::Right(2)];
        assert!(two_factor_containing_path(&g, &same_side, 0).is_err());
        let small = BipartiteGraph::complete(4).difference(&random_regular_bipartite(4, 2, 0).unwrap());
        let p = [Vertex::Left(0), Vertex::Right(0), Vertex::Left(1), Vertex::Right(1)];
        assert!(two_factor_containing_path(&small, &p, 0).is_err());
    }

    #[test]
    fn flow_fallback_finds_degree_subgraph() {
        let g = BipartiteGraph::complete(3);
        let edges = degree_constrained_subgraph(&g, &[2, 2, 2], &[2, 2, 2]).unwrap();
        assert_eq!(edges.len(), 6);
        assert!(degree_constrained_subgraph(&g, &[3, 0, 0], &[1, 1, 0]).is_none());
    }
}
