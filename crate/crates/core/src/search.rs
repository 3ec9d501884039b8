//! Exact `sat(n,k)` and `wsat(n,k)` for small `n` by iterative deepening.
//!
//! Families of size `m` are enumerated as increasing sequences of
//! candidate indices in canonical order, so the first family found at the
//! smallest feasible `m` is the canonical-order-least minimum. For `k >= 2`
//! the empty set and `[n]` are fixed as members: any saturating family can
//! be normalised to contain both without growing.
//!
//! Once the search has moved past a set `S` without adding it, no later
//! candidate can lie below `S` (later sets are at least as large), so the
//! chain below `S` is final and the chain above it can grow by at most one
//! per remaining set. That gives the coverage prune.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::chains::{fill_lattice, is_strongly_saturating, is_weakly_saturating, strict_down, strict_up};
use crate::constructions::product_construction;
use crate::error::{invalid, Error, Result};
use crate::family::{check_n, full_bits, SetFamily};

/// Largest ground set accepted by [`min_sat`]; exhaustion is practical
/// up to about `n = 6` in strong mode.
pub const SAT_SEARCH_MAX_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SatMode {
    Weak,
    Strong,
}

impl fmt::Display for SatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatMode::Weak => "weak",
            SatMode::Strong => "strong",
        })
    }
}

/// What a [`SearchResult`] is the minimum of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Sat { n: usize, k: usize, mode: SatMode },
    /// Saturating antichains on levels 2 and 3.
    Flat { n: usize },
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Sat { n, k, mode: SatMode::Strong } => write!(f, "sat(n={n}, k={k})"),
            Problem::Sat { n, k, mode: SatMode::Weak } => write!(f, "wsat(n={n}, k={k})"),
            Problem::Flat { n } => write!(f, "flat-sat(n={n}, levels 2,3)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Cap on explored nodes; `None` runs to completion.
    pub budget: Option<u64>,
    /// Worker threads. Minima never depend on this; witnesses are only
    /// guaranteed reproducible with one worker.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: None, workers: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub problem: Problem,
    /// Exact when `exhausted`, otherwise the best size found.
    pub minimum: usize,
    pub witness: SetFamily,
    pub nodes_explored: u64,
    pub prunes: BTreeMap<&'static str, u64>,
    /// True when `minimum` is proven.
    pub exhausted: bool,
    /// Largest size below which no solution exists, as far as the search got.
    pub proven_lower: usize,
}

impl fmt::Display for SearchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem {}", self.problem)?;
        writeln!(f, "minimum {}", self.minimum)?;
        writeln!(f, "exhausted {}", self.exhausted)?;
        writeln!(f, "proven_lower {}", self.proven_lower)?;
        writeln!(f, "nodes {}", self.nodes_explored)?;
        for (rule, count) in &self.prunes {
            writeln!(f, "prune {rule} {count}")?;
        }
        write!(f, "source tool-derived search")
    }
}

/// Least `m` with `m(m−1)/2 · 2^(n−k+2) >= 2^n`: a weakly saturating
/// family of `m` sets covers `2^[n]` by at most `C(m,2)` intervals of size
/// at most `2^(n−k+2)`. Returns 1 for `k = 1`.
pub fn feasible_size_floor(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n {
        return invalid(format!("size floor needs 1 <= k <= n, got n = {n}, k = {k}"));
    }
    if k == 1 {
        return Ok(1);
    }
    // m(m−1) >= 2^(k−1), independent of n
    let target = 1u128 << (k - 1);
    let mut m = ((target as f64).sqrt() as u128).max(2);
    while m > 2 && (m - 1) * (m - 2) >= target {
        m -= 1;
    }
    while m * (m - 1) < target {
        m += 1;
    }
    Ok(m as usize)
}

struct Shared<'a> {
    n: usize,
    k: usize,
    strong: bool,
    cands: &'a [u64],
    nodes: &'a AtomicU64,
    budget: u64,
    over_budget: &'a AtomicBool,
    /// Lowest top-level branch with a solution so far.
    winner: &'a AtomicUsize,
}

struct Worker<'a> {
    s: &'a Shared<'a>,
    branch: usize,
    member: Vec<bool>,
    down: Vec<u8>,
    up: Vec<u8>,
    chosen: Vec<u64>,
    sperner: u64,
    coverage: u64,
    unsaturated: u64,
}

impl<'a> Worker<'a> {
    fn new(s: &'a Shared<'a>, branch: usize, fixed: &[u64]) -> Self {
        let size = 1usize << s.n;
        let mut member = vec![false; size];
        for &w in fixed {
            member[w as usize] = true;
        }
        Worker {
            s,
            branch,
            member,
            down: vec![0; size],
            up: vec![0; size],
            chosen: Vec::new(),
            sperner: 0,
            coverage: 0,
            unsaturated: 0,
        }
    }

    fn stopped(&self) -> bool {
        self.s.over_budget.load(Ordering::Relaxed)
            || self.s.winner.load(Ordering::Relaxed) < self.branch
    }

    /// Candidates before `next` are decided; `remaining` more are to be picked.
    fn dfs(&mut self, next: usize, remaining: usize) -> bool {
        if self.stopped() {
            return false;
        }
        if self.s.nodes.fetch_add(1, Ordering::Relaxed) >= self.s.budget {
            self.s.over_budget.store(true, Ordering::Relaxed);
            return false;
        }
        let (n, k) = (self.s.n, self.s.k);
        let member = &self.member;
        fill_lattice(n, |w| member[w as usize], &mut self.down, &mut self.up);

        if self.s.strong && self.down[full_bits(n) as usize] as usize > k {
            self.sperner += 1;
            return false;
        }
        for &w in &self.s.cands[..next] {
            if self.member[w as usize] {
                continue;
            }
            let below = strict_down(&self.down, w) as usize;
            let above = strict_up(&self.up, n, w) as usize + remaining;
            if below + above.min(n - w.count_ones() as usize) < k {
                self.coverage += 1;
                return false;
            }
        }
        if remaining == 0 {
            let ok = (0..1u64 << n).all(|w| {
                self.member[w as usize]
                    || strict_down(&self.down, w) as usize + strict_up(&self.up, n, w) as usize >= k
            });
            if !ok {
                self.unsaturated += 1;
            }
            return ok;
        }
        for i in next..=self.s.cands.len() - remaining {
            let w = self.s.cands[i];
            self.member[w as usize] = true;
            self.chosen.push(w);
            if self.dfs(i + 1, remaining - 1) {
                return true;
            }
            self.chosen.pop();
            self.member[w as usize] = false;
            if self.stopped() {
                return false;
            }
        }
        false
    }
}

struct Depth {
    found: Option<Vec<u64>>,
    prunes: [u64; 3],
}

fn search_depth(s: &Shared<'_>, fixed: &[u64], picks: usize, workers: usize) -> Depth {
    let run = |branch: usize| -> (Option<Vec<u64>>, [u64; 3]) {
        let mut w = Worker::new(s, branch, fixed);
        let ok = if picks == 0 {
            w.dfs(0, 0)
        } else {
            let c = s.cands[branch];
            w.member[c as usize] = true;
            w.chosen.push(c);
            w.dfs(branch + 1, picks - 1)
        };
        if ok {
            s.winner.fetch_min(branch, Ordering::Relaxed);
        }
        let mut all = fixed.to_vec();
        all.extend(&w.chosen);
        (ok.then_some(all), [w.sperner, w.coverage, w.unsaturated])
    };
    let branches = if picks == 0 { 1 } else { s.cands.len() + 1 - picks };
    let outcomes: Vec<(Option<Vec<u64>>, [u64; 3])> = if workers <= 1 {
        let mut out = Vec::new();
        for b in 0..branches {
            let r = run(b);
            let done = r.0.is_some();
            out.push(r);
            if done || s.over_budget.load(Ordering::Relaxed) {
                break;
            }
        }
        out
    } else {
        (0..branches).into_par_iter().map(run).collect()
    };
    let mut prunes = [0; 3];
    let mut found = None;
    for (f, p) in outcomes {
        for i in 0..3 {
            prunes[i] += p[i];
        }
        if found.is_none() {
            found = f;
        }
    }
    Depth { found, prunes }
}

/// Minimum size of a strongly (or weakly) saturating `k`-Sperner family
/// on `[n]`, with the canonical-order-least witness.
///
/// When the node budget runs out the result carries `exhausted = false`,
/// the best family known (a solution from the current depth, or the
/// product construction) and the depth reached as `proven_lower`.
pub fn min_sat(n: usize, k: usize, mode: SatMode, opts: &SearchOptions) -> Result<SearchResult> {
    check_n(n)?;
    if k == 0 || k > n {
        return invalid(format!("search needs 1 <= k <= n, got n = {n}, k = {k}"));
    }
    if n > SAT_SEARCH_MAX_N {
        return Err(Error::Capability(format!(
            "saturation search supports n <= {SAT_SEARCH_MAX_N}, got n = {n}"
        )));
    }
    let problem = Problem::Sat { n, k, mode };
    let incumbent = if k == 1 {
        SetFamily::from_words(n, [0])?
    } else {
        product_construction(n, k)?
    };
    let fixed: Vec<u64> = if k >= 2 { vec![0, full_bits(n)] } else { Vec::new() };
    let mut cands: Vec<u64> = (0..1u64 << n).filter(|w| !fixed.contains(w)).collect();
    cands.sort_by_key(|&w| (w.count_ones(), w));

    let nodes = AtomicU64::new(0);
    let over_budget = AtomicBool::new(false);
    let mut totals = [0u64; 3];
    let floor = feasible_size_floor(n, k)?.max(fixed.len());
    let mut outcome: Option<(usize, Vec<u64>)> = None;
    let mut reached = floor;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Capability(format!("cannot start worker pool: {e}")))?;
    for m in floor..=incumbent.len() {
        reached = m;
        let winner = AtomicUsize::new(usize::MAX);
        let shared = Shared {
            n,
            k,
            strong: mode == SatMode::Strong,
            cands: &cands,
            nodes: &nodes,
            budget: opts.budget.unwrap_or(u64::MAX),
            over_budget: &over_budget,
            winner: &winner,
        };
        let depth = pool.install(|| search_depth(&shared, &fixed, m - fixed.len(), opts.workers));
        for i in 0..3 {
            totals[i] += depth.prunes[i];
        }
        if let Some(words) = depth.found {
            outcome = Some((m, words));
            break;
        }
        if over_budget.load(Ordering::Relaxed) {
            break;
        }
    }

    let exhausted = !over_budget.load(Ordering::Relaxed) && outcome.is_some();
    let witness = match outcome {
        Some((_, words)) => SetFamily::from_words(n, words)?,
        None => incumbent,
    };
    let verdict = match mode {
        SatMode::Strong => is_strongly_saturating(&witness, k)?,
        SatMode::Weak => is_weakly_saturating(&witness, k)?,
    };
    if !verdict.is_valid() {
        return Err(Error::Invalid(format!("internal: search witness fails verification: {verdict}")));
    }
    let minimum = witness.len();
    Ok(SearchResult {
        problem,
        minimum,
        witness,
        nodes_explored: nodes.load(Ordering::Relaxed),
        prunes: BTreeMap::from([
            ("coverage", totals[1]),
            ("sperner", totals[0]),
            ("unsaturated_leaf", totals[2]),
        ]),
        exhausted,
        proven_lower: if exhausted { minimum } else { reached },
    })
}
