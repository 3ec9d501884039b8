//! The `l = 2` case as a graph problem.
//!
//! A flat family on levels 2 and 3 is fixed by its non-edge graph `H` (the
//! pairs outside the lower level): the upper level must be the triangles
//! of `H`, and the family is a saturating antichain exactly when every
//! edge of `H` lies in a triangle. Its size is `C(n,2) − |E| + t`, so the
//! minimum family maximises `φ = |E| − t`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicI64, AtomicU64, Ordering};

use rayon::prelude::*;

use super::{binomial, construction_gen, flat_check, german_bound_raw, FlatFamily};
use crate::error::{invalid, Error, Result};
use crate::family::{check_n, level_words, BitIter, LevelSlice, SetMask};
use crate::search::{Problem, SearchOptions, SearchResult};

/// Largest `n` for the edge-counter enumeration (`2^28` graphs).
pub const FLAT_EXHAUSTIVE_MAX_N: usize = 8;
/// Largest `n` accepted by the branch-and-bound search.
pub const FLAT_BNB_MAX_N: usize = 12;

/// Position of the pair `{i, j}` (0-based, `i < j`) in canonical order,
/// which for pairs is colex: by larger element, then smaller.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// All pairs of `[n]` as bit words, in canonical order.
pub fn pair_words(n: usize) -> Vec<u64> {
    level_words(n, 2).collect()
}

/// A simple graph on `[n]` stored as adjacency bit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonEdgeGraph {
    n: usize,
    adj: Vec<u64>,
}

impl NonEdgeGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = SetMask>) -> Result<Self> {
        check_n(n)?;
        let mut g = NonEdgeGraph { n, adj: vec![0; n] };
        for e in edges {
            if e.len() != 2 || e.n() != n {
                return invalid(format!("{e} is not a pair of [{n}]"));
            }
            g.add_pair(e.bits());
        }
        Ok(g)
    }

    /// Graph whose edges are the pairs at the set bits of `mask`, in
    /// canonical pair order.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let pairs = pair_words(n);
        let mut g = NonEdgeGraph { n, adj: vec![0; n] };
        for b in BitIter(mask) {
            g.add_pair(pairs[b]);
        }
        g
    }

    fn from_adj(n: usize, adj: Vec<u64>) -> Self {
        NonEdgeGraph { n, adj }
    }

    fn add_pair(&mut self, w: u64) {
        let u = w.trailing_zeros() as usize;
        let v = 63 - w.leading_zeros() as usize;
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    /// The pairs missing from the lower level of an `l = 2` family.
    pub fn from_flat(fam: &FlatFamily) -> Result<Self> {
        if fam.level() != 2 {
            return invalid(format!("graph encoding needs l = 2, got l = {}", fam.level()));
        }
        let mut g = NonEdgeGraph { n: fam.n(), adj: vec![0; fam.n()] };
        for w in level_words(fam.n(), 2).filter(|&w| !fam.low().contains_word(w)) {
            g.add_pair(w);
        }
        Ok(g)
    }

    /// Lower level = non-edges, upper level = triangles.
    pub fn to_flat(&self) -> FlatFamily {
        let n = self.n;
        let low: Vec<u64> = level_words(n, 2).filter(|&w| !self.has_pair(w)).collect();
        let high: Vec<u64> = level_words(n, 3).filter(|&w| self.is_triangle(w)).collect();
        FlatFamily::new(
            n,
            2,
            LevelSlice::from_sorted_words(n, 2, low),
            LevelSlice::from_sorted_words(n, 3, high),
        )
        .expect("levels 2 and 3 fit whenever the graph has n >= 3")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> Vec<SetMask> {
        level_words(self.n, 2).filter(|&w| self.has_pair(w)).map(|w| SetMask::from_raw(self.n, w)).collect()
    }

    fn has_pair(&self, w: u64) -> bool {
        let u = w.trailing_zeros() as usize;
        self.adj[u] & w & !(1 << u) != 0
    }

    fn is_triangle(&self, w: u64) -> bool {
        BitIter(w).all(|u| w & !(1 << u) & !self.adj[u] == 0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn triangle_count(&self) -> usize {
        let mut t = 0;
        for u in 0..self.n {
            for v in BitIter(self.adj[u] >> (u + 1)).map(|b| b + u + 1) {
                t += (self.adj[u] & self.adj[v]).checked_shr(v as u32 + 1).unwrap_or(0).count_ones() as usize;
            }
        }
        t
    }

    pub fn every_edge_in_triangle(&self) -> bool {
        (0..self.n).all(|u| BitIter(self.adj[u]).all(|v| self.adj[u] & self.adj[v] != 0))
    }

    /// `C(n,2) − |E| + t`, the size of the encoded family.
    pub fn family_size(&self) -> usize {
        binomial(self.n as u64, 2) as usize - self.edge_count() + self.triangle_count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatSearchMode {
    /// Every graph by edge counter; needs `n <= 8`.
    Exhaustive,
    /// Vertex-by-vertex branch and bound; needs `n <= 12`.
    BranchAndBound,
}

/// Minimum saturating antichain on levels 2 and 3 of `[n]`.
///
/// Exhaustive mode returns, among minima, the graph with the smallest
/// edge counter (bit `i` = `i`-th pair in canonical order); that choice
/// does not depend on the number of workers. Branch and bound proves the
/// minimum without using any bound from the literature.
pub fn flat_min_exact(n: usize, mode: FlatSearchMode, opts: &SearchOptions) -> Result<SearchResult> {
    match mode {
        FlatSearchMode::Exhaustive => exhaustive(n, opts),
        FlatSearchMode::BranchAndBound => flat_min_bnb(n, opts, false),
    }
}

fn check_size(n: usize, max: usize, what: &str) -> Result<()> {
    if n < 3 {
        return invalid(format!("flat search needs n >= 3, got {n}"));
    }
    if n > max {
        return Err(Error::Capability(format!("{what} flat search supports n <= {max}, got n = {n}")));
    }
    Ok(())
}

fn finish(
    n: usize,
    graph: &NonEdgeGraph,
    nodes: u64,
    prunes: BTreeMap<&'static str, u64>,
    exhausted: bool,
) -> Result<SearchResult> {
    let flat = graph.to_flat();
    if !flat_check(&flat).is_valid() {
        return Err(Error::Invalid(format!("internal: witness graph on {n} vertices is not saturating")));
    }
    let minimum = flat.len();
    let proven_lower = if exhausted { minimum } else { german_bound_raw(n).max(0) as usize };
    Ok(SearchResult {
        problem: Problem::Flat { n },
        minimum,
        witness: flat.to_family(),
        nodes_explored: nodes,
        prunes,
        exhausted,
        proven_lower,
    })
}

fn run_pool<R: Send>(workers: usize, job: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Capability(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

fn exhaustive(n: usize, opts: &SearchOptions) -> Result<SearchResult> {
    check_size(n, FLAT_EXHAUSTIVE_MAX_N, "exhaustive")?;
    let m = n * (n - 1) / 2;
    let total = 1u64 << m;
    let limit = opts.budget.map_or(total, |b| b.min(total));
    let pairs: Vec<(usize, usize)> = pair_words(n)
        .into_iter()
        .map(|w| (w.trailing_zeros() as usize, 63 - w.leading_zeros() as usize))
        .collect();
    let pairs_total = m as i64;

    // Per graph: φ = |E| − t; keep the largest φ and, among those, the
    // smallest counter.
    let eval = |c: u64| -> Option<i64> {
        let mut adj = [0u64; FLAT_EXHAUSTIVE_MAX_N];
        for b in BitIter(c) {
            let (u, v) = pairs[b];
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        let mut tri3 = 0i64;
        for b in BitIter(c) {
            let (u, v) = pairs[b];
            let common = adj[u] & adj[v];
            if common == 0 {
                return None;
            }
            tri3 += common.count_ones() as i64;
        }
        Some(c.count_ones() as i64 - tri3 / 3)
    };

    const CHUNK: u64 = 1 << 14;
    let chunks = limit.div_ceil(CHUNK);
    let (best_phi, best_c, rejected) = run_pool(opts.workers, || {
        (0..chunks)
            .into_par_iter()
            .map(|i| {
                let (mut phi, mut arg, mut rej) = (i64::MIN, u64::MAX, 0u64);
                for c in i * CHUNK..((i + 1) * CHUNK).min(limit) {
                    match eval(c) {
                        Some(p) if p > phi => (phi, arg) = (p, c),
                        Some(_) => {}
                        None => rej += 1,
                    }
                }
                (phi, arg, rej)
            })
            .reduce(
                || (i64::MIN, u64::MAX, 0),
                |a, b| {
                    let pick = if (b.0, std::cmp::Reverse(b.1)) > (a.0, std::cmp::Reverse(a.1)) { b } else { a };
                    (pick.0, pick.1, a.2 + b.2)
                },
            )
    })?;
    debug_assert!(best_phi <= pairs_total);

    let exhausted = limit == total;
    let mut graph = NonEdgeGraph::from_edge_mask(n, best_c);
    if !exhausted {
        if let Some(seed) = construction_seed(n) {
            if seed.family_size() < graph.family_size() {
                graph = seed;
            }
        }
    }
    let prunes = BTreeMap::from([("edge_not_in_triangle", rejected)]);
    finish(n, &graph, limit, prunes, exhausted)
}

/// Best graph among the explicit constructions for `l = 2`.
fn construction_seed(n: usize) -> Option<NonEdgeGraph> {
    (0..=n / 2)
        .filter_map(|a| construction_gen(n, 2, a).ok())
        .filter_map(|f| NonEdgeGraph::from_flat(&f).ok())
        .min_by_key(|g| g.family_size())
}

/// Independence number of the graph induced on `verts`.
fn alpha(adj: &[u64], verts: u64) -> u32 {
    if verts == 0 {
        return 0;
    }
    // branch on a vertex of maximum degree inside `verts`
    let (v, deg) = BitIter(verts)
        .map(|v| (v, (adj[v] & verts).count_ones()))
        .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
        .unwrap();
    if deg == 0 {
        return verts.count_ones();
    }
    let without = alpha(adj, verts & !(1 << v));
    let with = 1 + alpha(adj, verts & !(1 << v) & !adj[v]);
    without.max(with)
}

struct Bnb<'a> {
    n: usize,
    nodes: &'a AtomicU64,
    budget: u64,
    best: &'a AtomicI64,
    stop_at: Option<i64>,
    bound_prunes: u64,
    infeasible: u64,
    found: Option<(i64, Vec<u64>)>,
    aborted: bool,
}

impl Bnb<'_> {
    /// Vertices `0..v` are placed with adjacency `adj` and value `phi`.
    fn dfs(&mut self, adj: &mut Vec<u64>, v: usize, phi: i64) {
        if self.aborted {
            return;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted = true;
            return;
        }
        if let Some(target) = self.stop_at {
            if self.best.load(Ordering::Relaxed) >= target {
                return;
            }
        }
        if v == self.n {
            let ok = (0..self.n).all(|u| BitIter(adj[u]).all(|w| adj[u] & adj[w] != 0));
            if !ok {
                self.infeasible += 1;
                return;
            }
            if phi > self.best.fetch_max(phi, Ordering::Relaxed) {
                self.found = Some((phi, adj.clone()));
            }
            return;
        }
        let r = (self.n - v) as i64;
        let placed = if v == 0 { 0 } else { (1u64 << v) - 1 };
        let a = alpha(adj, placed) as i64;
        if phi + r * a + r * r / 4 <= self.best.load(Ordering::Relaxed) {
            self.bound_prunes += 1;
            return;
        }
        // Back-neighbourhoods, larger gain first; ties by mask.
        let mut options: Vec<(i64, u64)> = (0..=placed)
            .filter(|&nb| nb & !placed == 0)
            .map(|nb| {
                let inner: u32 = BitIter(nb).map(|u| (adj[u] & nb).count_ones()).sum();
                (nb.count_ones() as i64 - inner as i64 / 2, nb)
            })
            .collect();
        options.sort_by_key(|&(g, nb)| (std::cmp::Reverse(g), nb));
        for (gain, nb) in options {
            for u in BitIter(nb) {
                adj[u] |= 1 << v;
            }
            adj[v] = nb;
            self.dfs(adj, v + 1, phi + gain);
            for u in BitIter(nb) {
                adj[u] &= !(1 << v);
            }
            adj[v] = 0;
            if self.aborted {
                return;
            }
        }
    }
}

/// Branch and bound over graphs, adding one vertex at a time together
/// with its neighbourhood among earlier vertices.
///
/// A new vertex with back-neighbourhood `N` adds `|N| − e(N)` to `φ`, so
/// `r` further vertices add at most `r·α + ⌊r²/4⌋` (`α` the independence
/// number so far; the second term bounds `φ` of the graph they induce).
///
/// The incumbent is seeded with the best explicit construction. With
/// `stop_at_known_bound`, the search also stops once `φ` reaches
/// `⌈(n+1)²/8⌉`, the published upper limit; the result is then only as
/// trustworthy as that bound. Witnesses are reproducible at one worker.
pub fn flat_min_bnb(n: usize, opts: &SearchOptions, stop_at_known_bound: bool) -> Result<SearchResult> {
    check_size(n, FLAT_BNB_MAX_N, "branch-and-bound")?;
    let seed = construction_seed(n).unwrap_or_else(|| NonEdgeGraph::from_adj(n, vec![0; n]));
    let seed_phi = seed.edge_count() as i64 - seed.triangle_count() as i64;
    let best = AtomicI64::new(seed_phi);
    let nodes = AtomicU64::new(0);
    let budget = opts.budget.unwrap_or(u64::MAX);
    let pairs = binomial(n as u64, 2) as i64;
    let stop_at = stop_at_known_bound.then(|| pairs - german_bound_raw(n));

    // Split after the first three vertices (at most 8 subtrees), which
    // all start from the same empty prefix otherwise.
    let mut prefixes: Vec<(Vec<u64>, i64)> = vec![(vec![0; n], 0)];
    for v in 1..3.min(n) {
        let placed = (1u64 << v) - 1;
        prefixes = prefixes
            .into_iter()
            .flat_map(|(adj, phi)| {
                (0..=placed).map(move |nb| {
                    let mut a = adj.clone();
                    for u in BitIter(nb) {
                        a[u] |= 1 << v;
                    }
                    a[v] = nb;
                    let inner: u32 = BitIter(nb).map(|u| (a[u] & nb).count_ones()).sum();
                    (a, phi + nb.count_ones() as i64 - inner as i64 / 2)
                })
            })
            .collect();
    }
    prefixes.sort_by_key(|(_, phi)| std::cmp::Reverse(*phi));
    let start = 3.min(n);

    let outcomes = run_pool(opts.workers, || {
        let run = |(mut adj, phi): (Vec<u64>, i64)| {
            let mut s = Bnb {
                n,
                nodes: &nodes,
                budget,
                best: &best,
                stop_at,
                bound_prunes: 0,
                infeasible: 0,
                found: None,
                aborted: false,
            };
            s.dfs(&mut adj, start, phi);
            (s.found, s.bound_prunes, s.infeasible, s.aborted)
        };
        if opts.workers <= 1 {
            prefixes.into_iter().map(run).collect::<Vec<_>>()
        } else {
            prefixes.into_par_iter().map(run).collect::<Vec<_>>()
        }
    })?;

    let mut prunes = BTreeMap::from([("bound", 0u64), ("edge_not_in_triangle", 0u64)]);
    let mut aborted = false;
    let mut winner: Option<(i64, Vec<u64>)> = None;
    for (found, bp, inf, ab) in outcomes {
        *prunes.get_mut("bound").unwrap() += bp;
        *prunes.get_mut("edge_not_in_triangle").unwrap() += inf;
        aborted |= ab;
        if let Some((phi, adj)) = found {
            if winner.as_ref().map_or(true, |(w, _)| phi > *w) {
                winner = Some((phi, adj));
            }
        }
    }
    let graph = match winner {
        Some((phi, adj)) if phi > seed_phi => NonEdgeGraph::from_adj(n, adj),
        _ => seed,
    };
    let reached_known = stop_at.is_some_and(|t| best.load(Ordering::Relaxed) >= t);
    let exhausted = !aborted || reached_known;
    finish(n, &graph, nodes.load(Ordering::Relaxed), prunes, exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::{flat_construction_23, german_bound};

    #[test]
    fn pair_order_is_canonical() {
        let pairs = pair_words(5);
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(pairs[pair_index(i, j)], 1 << i | 1 << j);
            }
        }
    }

    #[test]
    fn graph_round_trip_and_counts() {
        let f = flat_construction_23(8).unwrap();
        let g = NonEdgeGraph::from_flat(&f).unwrap();
        assert_eq!(g.to_flat(), f);
        assert!(g.every_edge_in_triangle());
        assert_eq!(g.family_size(), f.len());

        let k4 = NonEdgeGraph::from_edge_mask(4, 0b11_1111);
        assert_eq!((k4.edge_count(), k4.triangle_count()), (6, 4));
        assert_eq!(k4.family_size(), 4);
    }

    #[test]
    fn tiny_exhaustive_against_naive_oracle() {
        // oracle: check every flat family on levels 2 and 3 directly
        for n in 3..=5 {
            let pairs = pair_words(n);
            let triples: Vec<u64> = level_words(n, 3).collect();
            let mut best = usize::MAX;
            for lo in 0u64..1 << pairs.len() {
                let low: Vec<u64> = BitIter(lo).map(|b| pairs[b]).collect();
                let low = LevelSlice::from_sorted_words(n, 2, low);
                // high is forced by the second condition
                let high: Vec<u64> = triples
                    .iter()
                    .copied()
                    .filter(|&t| BitIter(t).all(|b| !low.contains_word(t & !(1 << b))))
                    .collect();
                let high = LevelSlice::from_sorted_words(n, 3, high);
                let f = FlatFamily::new(n, 2, low, high).unwrap();
                if flat_check(&f).is_valid() {
                    best = best.min(f.len());
                }
            }
            let opts = SearchOptions::default();
            let ex = flat_min_exact(n, FlatSearchMode::Exhaustive, &opts).unwrap();
            let bb = flat_min_exact(n, FlatSearchMode::BranchAndBound, &opts).unwrap();
            assert!(ex.exhausted && bb.exhausted);
            assert_eq!(ex.minimum, best, "n = {n}");
            assert_eq!(bb.minimum, best, "n = {n}");
            assert!(best as u64 >= german_bound(n).unwrap());
        }
    }

    #[test]
    fn bnb_agrees_with_exhaustive_at_six_and_seven() {
        let opts = SearchOptions::default();
        for n in [6, 7] {
            let ex = flat_min_exact(n, FlatSearchMode::Exhaustive, &opts).unwrap();
            let bb = flat_min_bnb(n, &opts, false).unwrap();
            assert_eq!(ex.minimum, bb.minimum);
        }
    }

    #[test]
    fn budget_stops_early() {
        let opts = SearchOptions { budget: Some(1000), workers: 1 };
        let r = flat_min_exact(7, FlatSearchMode::Exhaustive, &opts).unwrap();
        assert!(!r.exhausted);
        assert_eq!(r.nodes_explored, 1000);
        let r = flat_min_bnb(9, &opts, false).unwrap();
        assert!(!r.exhausted);
    }

    #[test]
    fn size_limits() {
        let opts = SearchOptions::default();
        assert!(matches!(flat_min_exact(9, FlatSearchMode::Exhaustive, &opts), Err(Error::Capability(_))));
        assert!(matches!(flat_min_exact(13, FlatSearchMode::BranchAndBound, &opts), Err(Error::Capability(_))));
        assert!(flat_min_exact(2, FlatSearchMode::Exhaustive, &opts).is_err());
    }
}
