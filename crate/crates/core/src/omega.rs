//! Construction of non-Latin vertices of the tristochastic polytope with
//! exactly two `1/2` entries in every line.
//!
//! Layers are indexed from 0. For even `n` with `h = n / 2`:
//!
//! 1. layers `0..h` follow a Hamiltonian double Latin square `X`
//!    (`A(i, j, X(i, j)) = 1/2`), giving `h` disjoint `2n`-cycles in `G(A)`;
//! 2. layer `h` is `(P + P') / 2` where `P` contains a rainbow transversal of
//!    `X` and `P + P'` is a single `2n`-cycle, which connects everything;
//! 3. layer `h + 1` plants a path `x', w, y'` closing an odd cycle with an
//!    odd path `x .. y` of a top layer;
//! 4. the remaining layers are 2-factors of the shafts still missing a half.

use num_traits::One;
use rand::seq::{IndexedRandom, SliceRandom};

use crate::array::{Array, PolytopeSpec, Rational};
use crate::certify::{build_support_graph, is_vertex_half_integral, is_vertex_rank, GraphMode, SupportGraph, VertexCertificate};
use crate::designs::perm::{is_permutation, random_permutation};
use crate::designs::{extract_two_factor_with, two_factor_containing_path_with, BipartiteGraph, DoubleLatinSquare, Vertex};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Cells `(i, j)` of layer `k` planted by the odd-cycle step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedPath {
    pub layer: usize,
    pub x: (usize, usize),
    pub y: (usize, usize),
    pub w: (usize, usize),
}

/// An order-`n` array whose first `decided_layers` layers are final.
#[derive(Clone, Debug)]
pub struct PartialArray {
    array: Array,
    decided_layers: usize,
    planted: Option<PlantedPath>,
}

impl PartialArray {
    pub fn array(&self) -> &Array {
        &self.array
    }

    pub fn into_array(self) -> Array {
        self.array
    }

    pub fn decided_layers(&self) -> usize {
        self.decided_layers
    }

    pub fn planted(&self) -> Option<&PlantedPath> {
        self.planted.as_ref()
    }

    pub fn order(&self) -> usize {
        self.array.n()
    }

    /// Number of nonzero entries in shaft `(i, j)`.
    pub fn shaft_count(&self, i: usize, j: usize) -> usize {
        self.array
            .line(2, &[i, j])
            .into_iter()
            .filter(|v| !num_traits::Zero::is_zero(*v))
            .count()
    }

    /// `K(i, j) = 1` iff shaft `(i, j)` holds exactly one half.
    pub fn k_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.order();
        (0..n)
            .map(|i| (0..n).map(|j| u8::from(self.shaft_count(i, j) == 1)).collect())
            .collect()
    }

    fn k_graph(&self) -> BipartiteGraph {
        let adj = self
            .k_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|b| b == 1).collect())
            .collect();
        BipartiteGraph::from_adjacency(adj).expect("square")
    }

    /// `G(A)` restricted to the decided layers.
    pub fn decided_graph(&self) -> SupportGraph {
        build_support_graph(&self.array, GraphMode::Line)
    }

    fn layer_cells(&self, k: usize) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !num_traits::Zero::is_zero(self.array.get(&[i, j, k])))
            .collect()
    }

    fn set_layer(&mut self, k: usize, cells: &[(usize, usize)]) {
        for &(i, j) in cells {
            self.array.set(&[i, j, k], half());
        }
    }
}

/// Layers `0..n/2` from a Hamiltonian double Latin square.
pub fn build_top_half(x: &DoubleLatinSquare) -> Result<PartialArray> {
    if !x.is_hamiltonian() {
        return Err(Error::Precondition("double Latin square is not Hamiltonian".into()));
    }
    let n = x.order();
    let mut array = Array::zeros(n, 2);
    for i in 0..n {
        for j in 0..n {
            array.set(&[i, j, x.get(i, j)], half());
        }
    }
    let partial = PartialArray {
        array,
        decided_layers: n / 2,
        planted: None,
    };
    debug_assert!({
        let g = partial.decided_graph();
        g.is_regular(2) && g.components().len() == n / 2 && g.components().iter().all(|c| c.members.len() == 2 * n)
    });
    Ok(partial)
}

/// One cell per symbol `0..n/2`, pairwise in distinct rows and columns,
/// chosen greedily with seeded tie-breaking.
pub fn select_rainbow_transversal(x: &DoubleLatinSquare, seed: u64) -> Vec<(usize, usize)> {
    select_rainbow_transversal_with(x, &mut rng::seeded(seed))
}

fn select_rainbow_transversal_with(x: &DoubleLatinSquare, rng: &mut Rng) -> Vec<(usize, usize)> {
    let n = x.order();
    let mut used_rows = vec![false; n];
    let mut used_cols = vec![false; n];
    let mut chosen = Vec::with_capacity(n / 2);
    for symbol in 0..n / 2 {
        let candidates: Vec<(usize, usize)> = x
            .symbol_cells(symbol)
            .into_iter()
            .filter(|&(i, j)| !used_rows[i] && !used_cols[j])
            .collect();
        // at most 4 * symbol of the 2n cells are blocked, and 2n > 4 * symbol
        let &(i, j) = candidates.choose(rng).expect("greedy transversal step always succeeds");
        used_rows[i] = true;
        used_cols[j] = true;
        chosen.push((i, j));
    }
    chosen
}

/// Permutation `tau` of `0..n` with `tau(i) = j` for every input cell `(i, j)`;
/// the free rows are matched to the free columns at random.
pub fn extend_to_permutation(cells: &[(usize, usize)], n: usize, seed: u64) -> Result<Vec<usize>> {
    extend_to_permutation_with(cells, n, &mut rng::seeded(seed))
}

fn extend_to_permutation_with(cells: &[(usize, usize)], n: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    let mut tau = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    for &(i, j) in cells {
        if i >= n || j >= n {
            return Err(Error::InvalidParameter(format!("cell ({}, {}) out of range", i + 1, j + 1)));
        }
        if tau[i] != usize::MAX || col_used[j] {
            return Err(Error::InvalidParameter(format!(
                "cell ({}, {}) shares a row or column with another cell",
                i + 1,
                j + 1
            )));
        }
        tau[i] = j;
        col_used[j] = true;
    }
    let mut free_cols: Vec<usize> = (0..n).filter(|&j| !col_used[j]).collect();
    free_cols.shuffle(rng);
    let mut free_cols = free_cols.into_iter();
    for t in tau.iter_mut().filter(|t| **t == usize::MAX) {
        *t = free_cols.next().expect("as many free columns as free rows");
    }
    Ok(tau)
}

/// `sigma` with `sigma(i) != tau(i)` everywhere such that the permutation
/// matrices `P + P'` form one cycle of length `2n`: walk the rows in a random
/// cyclic order `r_0, .., r_{n-1}` and set `sigma(r_m) = tau(r_{m+1})`.
pub fn choose_single_cycle_partner(tau: &[usize], seed: u64) -> Result<Vec<usize>> {
    choose_single_cycle_partner_with(tau, &mut rng::seeded(seed))
}

fn choose_single_cycle_partner_with(tau: &[usize], rng: &mut Rng) -> Result<Vec<usize>> {
    let n = tau.len();
    if n < 2 || !is_permutation(tau) {
        return Err(Error::InvalidParameter("tau must be a permutation of order >= 2".into()));
    }
    let order = random_permutation(n, rng);
    let mut sigma = vec![0; n];
    for m in 0..n {
        sigma[order[m]] = tau[order[(m + 1) % n]];
    }
    Ok(sigma)
}

/// True iff `tau` and `sigma` are disjoint and `P + P'` is a single `2n`-cycle.
pub fn is_single_cycle_pair(tau: &[usize], sigma: &[usize]) -> bool {
    let n = tau.len();
    if sigma.len() != n || !is_permutation(tau) || !is_permutation(sigma) {
        return false;
    }
    if (0..n).any(|i| tau[i] == sigma[i]) {
        return false;
    }
    // row i -> column sigma(i) -> row tau^{-1}(sigma(i))
    let tau_inv = crate::designs::perm::inverse(tau);
    let step: Vec<usize> = (0..n).map(|i| tau_inv[sigma[i]]).collect();
    crate::designs::perm::is_single_cycle(&step)
}

/// Sets layer `n/2` to `(P + P') / 2`.
pub fn place_cycle_layer(partial: &PartialArray, tau: &[usize], sigma: &[usize]) -> Result<PartialArray> {
    let n = partial.order();
    if partial.decided_layers != n / 2 {
        return Err(Error::Precondition("expected exactly the top half decided".into()));
    }
    if tau.len() != n || !is_single_cycle_pair(tau, sigma) {
        return Err(Error::InvalidParameter("P + P' must be a single 2n-cycle".into()));
    }
    let mut next = partial.clone();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| [(i, tau[i]), (i, sigma[i])]).collect();
    next.set_layer(n / 2, &cells);
    next.decided_layers += 1;
    Ok(next)
}

/// The `2n` cells of a top layer in cycle order.
fn layer_cycle(partial: &PartialArray, k: usize) -> Vec<(usize, usize)> {
    let cells = partial.layer_cells(k);
    let n = partial.order();
    let mut order = Vec::with_capacity(cells.len());
    let mut current = cells[0];
    let mut previous = None;
    let mut via_row = true;
    for _ in 0..2 * n {
        order.push(current);
        let next = cells
            .iter()
            .copied()
            .find(|&c| {
                c != current
                    && Some(c) != previous
                    && if via_row { c.0 == current.0 } else { c.1 == current.1 }
            })
            .expect("layer is a single alternating cycle");
        previous = Some(current);
        current = next;
        via_row = !via_row;
    }
    order
}

/// Plants layer `n/2 + 1` so that `G(A)` gets an odd cycle
/// `x .. y, y', w, x'`, and completes that layer to two halves per row and
/// column with a 2-factor of the cells outside the shadow of layer `n/2`.
pub fn plant_odd_cycle(partial: &PartialArray, seed: u64) -> Result<PartialArray> {
    plant_odd_cycle_with(partial, &mut rng::seeded(seed))
}

fn plant_odd_cycle_with(partial: &PartialArray, rng: &mut Rng) -> Result<PartialArray> {
    let n = partial.order();
    let h = n / 2;
    if partial.decided_layers != h + 1 {
        return Err(Error::Precondition("expected layers up to n/2 + 1 decided".into()));
    }
    let mut shadow = vec![vec![false; n]; n];
    for (i, j) in partial.layer_cells(h) {
        shadow[i][j] = true;
    }
    let mut available = BipartiteGraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if !shadow[i][j] {
                available.add_edge(i, j);
            }
        }
    }

    let mut candidates = Vec::new();
    for k in 0..h {
        let cycle = layer_cycle(partial, k);
        let len = cycle.len();
        for a in 0..len {
            for b in a + 1..len {
                let dist = (b - a).min(len - (b - a));
                if dist % 2 == 1 && dist >= 3 {
                    candidates.push((k, cycle[a], cycle[b]));
                }
            }
        }
    }
    candidates.shuffle(rng);

    for (k, x, y) in candidates {
        if x.0 == y.0 || x.1 == y.1 || shadow[x.0][x.1] || shadow[y.0][y.1] {
            continue;
        }
        for w in [(x.0, y.1), (y.0, x.1)] {
            if shadow[w.0][w.1] {
                continue;
            }
            let path = if w == (x.0, y.1) {
                [Vertex::Right(x.1), Vertex::Left(x.0), Vertex::Right(y.1), Vertex::Left(y.0)]
            } else {
                [Vertex::Left(x.0), Vertex::Right(x.1), Vertex::Left(y.0), Vertex::Right(y.1)]
            };
            let factor = match two_factor_containing_path_with(&available, &path, rng) {
                Ok(f) => f,
                Err(Error::Precondition(msg)) => return Err(Error::ConstructionFailed(msg)),
                Err(_) => continue,
            };
            let mut next = partial.clone();
            next.set_layer(h + 1, &factor.edges());
            next.decided_layers += 1;
            next.planted = Some(PlantedPath { layer: k, x, y, w });
            if next.decided_graph().is_bipartite() {
                return Err(Error::ConstructionFailed("planted layer left G(A) bipartite".into()));
            }
            return Ok(next);
        }
    }
    Err(Error::ConstructionFailed(format!("no feasible odd-cycle pair for n = {n}")))
}

/// Fills the remaining layers with 2-factors of the graph of shafts that still
/// hold a single half.
pub fn fill_remaining_layers(partial: &PartialArray, seed: u64) -> Result<Array> {
    fill_remaining_layers_with(partial, &mut rng::seeded(seed))
}

fn fill_remaining_layers_with(partial: &PartialArray, rng: &mut Rng) -> Result<Array> {
    let n = partial.order();
    let first = n / 2 + 2;
    if partial.decided_layers != first {
        return Err(Error::Precondition("expected layers up to n/2 + 2 decided".into()));
    }
    let mut k_graph = partial.k_graph();
    if k_graph.regular_degree() != Some(n - 4) {
        return Err(Error::Precondition(format!("K is not {}-regular", n - 4)));
    }
    let mut next = partial.clone();
    for layer in first..n {
        let factor = extract_two_factor_with(&k_graph, rng)?;
        next.set_layer(layer, &factor.edges());
        k_graph = k_graph.difference(&factor);
        debug_assert_eq!(k_graph.regular_degree(), Some(n - 4 - 2 * (layer - first + 1)));
    }
    next.decided_layers = n;
    let array = next.into_array();
    if !array.is_member(&PolytopeSpec::omega(n, 2))? {
        return Err(Error::ConstructionFailed("filled array is not tristochastic".into()));
    }
    Ok(array)
}

/// Stage seeds of one pipeline run.
fn stage_seed(seed: u64, stage: u64) -> u64 {
    rng::mix(seed, stage)
}

/// Runs every stage for any even `n >= 4`. Feasibility is only guaranteed for
/// `n >= 10`; smaller orders may fail with [`Error::ConstructionFailed`].
pub fn run_pipeline(n: usize, seed: u64) -> Result<Array> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("pipeline needs even n >= 4, got {n}")));
    }
    let x = DoubleLatinSquare::random_hamiltonian(n, stage_seed(seed, 0))?;
    let top = build_top_half(&x)?;
    let cells = select_rainbow_transversal(&x, stage_seed(seed, 1));
    let tau = extend_to_permutation(&cells, n, stage_seed(seed, 2))?;
    let sigma = choose_single_cycle_partner(&tau, stage_seed(seed, 3))?;
    let with_cycle = place_cycle_layer(&top, &tau, &sigma)?;
    if !with_cycle.decided_graph().is_connected() {
        return Err(Error::ConstructionFailed("revealed part of G(A) is disconnected".into()));
    }
    let planted = plant_odd_cycle(&with_cycle, stage_seed(seed, 4))?;
    fill_remaining_layers(&planted, stage_seed(seed, 5))
}

/// A certified non-Latin vertex of the tristochastic polytope of even order
/// `n >= 10`. The array is checked by the graph criterion and by the rank
/// test; the rank certificate is returned.
pub fn construct_vertex(n: usize, seed: u64) -> Result<(Array, VertexCertificate)> {
    if n < 10 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("construction needs even n >= 10, got {n}")));
    }
    let array = run_pipeline(n, seed)?;
    let graph = is_vertex_half_integral(&array)?;
    let rank = is_vertex_rank(&array, &PolytopeSpec::omega(n, 2))?;
    if !graph.is_vertex || !rank.is_vertex {
        return Err(Error::ConstructionFailed(format!(
            "certification failed (graph: {}, rank: {})",
            graph.is_vertex, rank.is_vertex
        )));
    }
    Ok((array, rank))
}

/// Every line of an order-`n` tristochastic array holds exactly two halves.
pub fn has_two_halves_per_line(a: &Array) -> bool {
    let spec = PolytopeSpec::omega(a.n(), a.d());
    let h = half();
    spec.constraint_groups()
        .iter()
        .all(|g| g.iter().filter(|&&i| a.get_index(i) == &h).count() == 2 && g.iter().all(|&i| a.get_index(i) != &Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::perm::all_permutations;
    use crate::designs::{double_latin_from, LatinSquare};

    fn order4_square() -> DoubleLatinSquare {
        let l = LatinSquare::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        double_latin_from(&l, &l, &[1, 0]).unwrap()
    }

    #[test]
    fn top_half_cycles() {
        let top = build_top_half(&order4_square()).unwrap();
        let g = top.decided_graph();
        assert_eq!(g.components().len(), 2);
        assert!(g.components().iter().all(|c| c.members.len() == 8));
        let x10 = DoubleLatinSquare::random_hamiltonian(10, 3).unwrap();
        let g10 = build_top_half(&x10).unwrap().decided_graph();
        assert_eq!(g10.components().len(), 5);
        assert!(g10.components().iter().all(|c| c.members.len() == 20));
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(build_top_half(&x10).unwrap().shaft_count(i, j), 1);
            }
        }
    }

    #[test]
    fn top_half_rejects_non_hamiltonian() {
        let x = DoubleLatinSquare::new(vec![
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 1],
            vec![1, 1, 0, 0],
            vec![1, 1, 0, 0],
        ])
        .unwrap();
        assert!(matches!(build_top_half(&x), Err(Error::Precondition(_))));
    }

    #[test]
    fn transversal_properties() {
        for seed in 0..100 {
            let x = DoubleLatinSquare::random_hamiltonian(10, seed).unwrap();
            let cells = select_rainbow_transversal(&x, seed);
            assert_eq!(cells.len(), 5);
            for (l, &(i, j)) in cells.iter().enumerate() {
                assert_eq!(x.get(i, j), l);
            }
            let rows: std::collections::BTreeSet<_> = cells.iter().map(|c| c.0).collect();
            let cols: std::collections::BTreeSet<_> = cells.iter().map(|c| c.1).collect();
            assert_eq!((rows.len(), cols.len()), (5, 5));
            let tau = extend_to_permutation(&cells, 10, seed).unwrap();
            assert!(is_permutation(&tau));
            assert!(cells.iter().all(|&(i, j)| tau[i] == j));
        }
        let x = order4_square();
        assert_eq!(select_rainbow_transversal(&x, 0).len(), 2);
    }

    #[test]
    fn extension_edge_cases() {
        assert_eq!(extend_to_permutation(&[(0, 0)], 2, 0).unwrap(), vec![0, 1]);
        assert!(extend_to_permutation(&[(0, 0), (0, 1)], 3, 0).is_err());
        assert!(extend_to_permutation(&[(0, 1), (2, 1)], 3, 0).is_err());
    }

    #[test]
    fn single_cycle_partner() {
        let id = vec![0, 1, 2];
        assert!(is_single_cycle_pair(&id, &[1, 2, 0]));
        // exhaustive count at n = 3 equals (n-1)!
        let valid = all_permutations(3)
            .into_iter()
            .filter(|s| is_single_cycle_pair(&id, s))
            .count();
        assert_eq!(valid, 2);
        for seed in 0..50 {
            let tau = random_permutation(10, &mut rng::seeded(seed));
            let sigma = choose_single_cycle_partner(&tau, seed).unwrap();
            assert!(is_single_cycle_pair(&tau, &sigma));
        }
    }

    #[test]
    fn sampled_partners_cover_all_choices_at_n4() {
        let tau = vec![2, 0, 3, 1];
        let seen: std::collections::BTreeSet<_> =
            (0..400).map(|s| choose_single_cycle_partner(&tau, s).unwrap()).collect();
        let expected = all_permutations(4)
            .into_iter()
            .filter(|s| is_single_cycle_pair(&tau, s))
            .count();
        assert_eq!(expected, 6);
        assert_eq!(seen.len(), expected);
    }

    fn partial_to_plant(n: usize, seed: u64) -> PartialArray {
        let x = DoubleLatinSquare::random_hamiltonian(n, seed).unwrap();
        let top = build_top_half(&x).unwrap();
        let cells = select_rainbow_transversal(&x, seed);
        let tau = extend_to_permutation(&cells, n, seed).unwrap();
        let sigma = choose_single_cycle_partner(&tau, seed).unwrap();
        let p = place_cycle_layer(&top, &tau, &sigma).unwrap();
        assert!(p.decided_graph().is_connected());
        p
    }

    #[test]
    fn plant_odd_cycle_at_n10_and_n12() {
        for seed in 0..100 {
            let planted = plant_odd_cycle(&partial_to_plant(10, seed), seed).unwrap();
            assert!(!planted.decided_graph().is_bipartite());
            let k = planted.k_graph();
            assert_eq!(k.regular_degree(), Some(6));
        }
        let planted = plant_odd_cycle(&partial_to_plant(12, 7), 7).unwrap();
        let cells = planted.layer_cells(7);
        assert_eq!(cells.len(), 24);
        for v in 0..12 {
            assert_eq!(cells.iter().filter(|c| c.0 == v).count(), 2);
            assert_eq!(cells.iter().filter(|c| c.1 == v).count(), 2);
        }
        let path = planted.planted().unwrap();
        assert!(path.layer < 6);
    }

    #[test]
    fn small_orders_fail_cleanly_or_produce_valid_arrays() {
        for n in [4, 6, 8] {
            for seed in 0..20 {
                match run_pipeline(n, seed) {
                    Ok(a) => {
                        assert!(has_two_halves_per_line(&a));
                        assert!(a.is_member(&PolytopeSpec::omega(n, 2)).unwrap());
                    }
                    Err(e) => assert!(matches!(e, Error::ConstructionFailed(_)), "{e}"),
                }
            }
        }
    }

    #[test]
    fn fill_keeps_invariants() {
        let planted = plant_odd_cycle(&partial_to_plant(10, 1), 1).unwrap();
        let a = fill_remaining_layers(&planted, 1).unwrap();
        assert!(has_two_halves_per_line(&a));
        assert!(fill_remaining_layers(&partial_to_plant(10, 1), 1).is_err());
    }

    #[test]
    fn construct_vertex_n10() {
        let (a, cert) = construct_vertex(10, 1).unwrap();
        assert!(cert.is_vertex);
        assert_eq!(a.support().len(), 200);
        assert!(!a.is_zero_one());
        assert!(matches!(construct_vertex(9, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(construct_vertex(8, 1), Err(Error::InvalidParameter(_))));
    }
}
