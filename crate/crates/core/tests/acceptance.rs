//! Acceptance suite. Runs every criterion in sequence (no harness, so the
//! timings are not disturbed by other tests), prints one PASS/FAIL line
//! each, and exits non-zero if any criterion failed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sperner_core::bounds::{bound_table, check_consistency, Direction, Status};
use sperner_core::chains::LatticeProfile;
use sperner_core::constructions::{double, general_wsat_construction, product_construction, sat66};
use sperner_core::covering::default_layer_spec;
use sperner_core::family::level_words;
use sperner_core::flat::{
    construction_gen, flat_check, flat_min_exact, german_bound, lflat_bounds, FlatSearchMode,
    NonEdgeGraph,
};
use sperner_core::reduction::reduce;
use sperner_core::search::{min_sat, SatMode, SearchOptions, SearchResult};
use sperner_core::{
    down_up, is_strongly_saturating, is_weakly_saturating, shade, shadow, LevelSlice, SetFamily,
    SetMask,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn strong(fam: &SetFamily, k: usize) -> bool {
    is_strongly_saturating(fam, k).unwrap().is_valid()
}

fn c1_sat66() -> Check {
    let f = sat66();
    ensure(f.len() == 30 && f.n() == 6, || format!("sat66 has {} sets on n = {}", f.len(), f.n()))?;
    let cert = is_strongly_saturating(&f, 6).unwrap();
    ensure(cert.is_valid(), || format!("certificate: {cert}"))?;
    Ok("30 sets, strongly saturating 6-Sperner".into())
}

fn c2_doubling() -> Check {
    let mut f = sat66();
    let mut sizes = Vec::new();
    for m in 1..=4 {
        f = double(&f).map_err(|e| e.to_string())?;
        let k = 6 + m;
        // (15/16)·2^(k−1)
        let expected = 15 * (1usize << (k - 1)) / 16;
        ensure(f.len() == expected, || format!("m = {m}: size {} != {expected}", f.len()))?;
        let cert = is_strongly_saturating(&f, k).unwrap();
        ensure(cert.is_valid(), || format!("m = {m}: {cert}"))?;
        sizes.push(f.len().to_string());
    }
    Ok(format!("sizes {}", sizes.join(",")))
}

fn c3_product_sweep() -> Check {
    let mut count = 0;
    for n in 2..=14 {
        for k in 2..=n {
            let f = product_construction(n, k).map_err(|e| e.to_string())?;
            ensure(f.len() == 1 << (k - 1), || format!("({n},{k}): size {}", f.len()))?;
            let cert = is_strongly_saturating(&f, k).unwrap();
            ensure(cert.is_valid(), || format!("({n},{k}): {cert}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} parameter pairs"))
}

fn c4_general_wsat() -> Check {
    let mut report = Vec::new();
    for k in 6..=8 {
        let spec = default_layer_spec(k).map_err(|e| e.to_string())?;
        for n in k..=k + 4 {
            let f = general_wsat_construction(n, k, &spec).map_err(|e| e.to_string())?;
            let cert = is_weakly_saturating(&f, k).unwrap();
            ensure(cert.is_valid(), || format!("({n},{k}): {cert}"))?;
            let table = bound_table(n, k).map_err(|e| e.to_string())?;
            for e in table.entries.iter().filter(|e| {
                e.direction == Direction::Lower && e.status == Status::ExactFinite && e.applicable
            }) {
                let bound = e.integer.clone().unwrap();
                ensure(bound <= f.len().into(), || {
                    format!("({n},{k}): size {} below {} = {bound}", f.len(), e.name)
                })?;
            }
            report.push(format!("({n},{k})={}", f.len()));
        }
    }
    Ok(report.join(" "))
}

fn c5_small_values() -> Check {
    let mut cases = 0;
    for k in 1..=3 {
        for n in k..=5 {
            let r = min_sat(n, k, SatMode::Strong, &SearchOptions::default()).map_err(|e| e.to_string())?;
            ensure(r.exhausted, || format!("({n},{k}) not exhausted"))?;
            ensure(r.minimum == 1 << (k - 1), || format!("({n},{k}): minimum {}", r.minimum))?;
            ensure(strong(&r.witness, k), || format!("({n},{k}): witness fails"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases equal 2^(k-1)"))
}

/// Brute force: every pair (low ⊆ level 2, high ⊆ level 3) of [n], kept
/// when it is a maximal antichain, i.e. strongly saturating 1-Sperner.
fn flat_oracle(n: usize) -> usize {
    let pairs: Vec<u64> = level_words(n, 2).collect();
    let triples: Vec<u64> = level_words(n, 3).collect();
    let mut best = usize::MAX;
    for lo in 0u64..1 << pairs.len() {
        for hi in 0u64..1 << triples.len() {
            let size = (lo.count_ones() + hi.count_ones()) as usize;
            if size >= best {
                continue;
            }
            let words = (0..pairs.len())
                .filter(|&i| lo >> i & 1 == 1)
                .map(|i| pairs[i])
                .chain((0..triples.len()).filter(|&i| hi >> i & 1 == 1).map(|i| triples[i]));
            let fam = SetFamily::from_words(n, words).unwrap();
            if strong(&fam, 1) {
                best = size;
            }
        }
    }
    best
}

fn c6_flat_minimum() -> Check {
    let opts = SearchOptions::default();
    let t = Instant::now();
    let r7 = flat_min_exact(7, FlatSearchMode::Exhaustive, &opts).map_err(|e| e.to_string())?;
    let t7 = t.elapsed();
    ensure(r7.exhausted && r7.nodes_explored == 1 << 21, || format!("n = 7 explored {}", r7.nodes_explored))?;
    ensure(r7.minimum == 13, || format!("flat_min_exact(7) = {}", r7.minimum))?;
    ensure(german_bound(7).unwrap() == 13, || "german_bound(7) != 13".into())?;
    ensure(strong(&r7.witness, 1), || "n = 7 witness is not a maximal antichain".into())?;
    ensure(t7 < Duration::from_secs(300), || format!("n = 7 took {t7:?}"))?;

    let t = Instant::now();
    let oracle = flat_oracle(5);
    let r5 = flat_min_exact(5, FlatSearchMode::Exhaustive, &opts).map_err(|e| e.to_string())?;
    let t5 = t.elapsed();
    ensure(oracle == 6, || format!("brute-force oracle for n = 5 gives {oracle}"))?;
    ensure(r5.exhausted && r5.minimum == oracle, || format!("flat_min_exact(5) = {}", r5.minimum))?;
    ensure(german_bound(5).unwrap() == 5, || "german_bound(5) != 5".into())?;
    ensure(t5 < Duration::from_secs(300), || format!("n = 5 took {t5:?}"))?;
    Ok(format!("n=7: 13 = bound ({t7:.2?}); n=5: 6 > 5, oracle agrees ({t5:.2?})"))
}

fn c7_construction_formula() -> Check {
    let mut cases = 0;
    for n in 3..=12u64 {
        for l in 2..=4u64 {
            for a in 0..=n / 2 {
                if l + 1 > n || l - 1 > n - 2 * a {
                    continue;
                }
                let f = construction_gen(n as usize, l as usize, a as usize).map_err(|e| e.to_string())?;
                let formula = binom(n, l) - a * binom(n - 2 * a + 1, l - 1);
                ensure(f.len() as u64 == formula, || {
                    format!("({n},{l},{a}): enumerated {} vs formula {formula}", f.len())
                })?;
                let cert = flat_check(&f);
                ensure(cert.is_valid(), || format!("({n},{l},{a}): {cert}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} parameter triples"))
}

/// Deterministic sample of sub-families of a level: every set, every
/// other set, every third, ... plus a few rotating windows.
fn level_samples(n: usize, l: usize) -> Vec<LevelSlice> {
    let words: Vec<u64> = level_words(n, l).collect();
    let mut out = Vec::new();
    for step in 1..=5 {
        for offset in 0..step.min(3) {
            let pick: Vec<u64> = words.iter().copied().skip(offset).step_by(step).collect();
            out.push(LevelSlice::from_words(n, l, pick).unwrap());
        }
    }
    let half = words.len() / 2;
    out.push(LevelSlice::from_words(n, l, words[..half].to_vec()).unwrap());
    out.push(LevelSlice::from_words(n, l, words[half..].to_vec()).unwrap());
    out.push(LevelSlice::from_words(n, l, Vec::new()).unwrap());
    out
}

fn c8a_duality() -> Result<usize, String> {
    let mut checked = 0;
    for n in 1..=12 {
        for l in 0..n {
            for fam in level_samples(n, l) {
                // complement(∇F) = Δ(complement F)
                let lhs = shade(&fam, n).unwrap().complements();
                let rhs = shadow(&fam.complements());
                ensure(lhs == rhs, || format!("n = {n}, l = {l}: duality fails"))?;
                checked += 1;
            }
        }
    }
    // all families for n <= 4
    for n in 1..=4 {
        for l in 0..n {
            let words: Vec<u64> = level_words(n, l).collect();
            for pick in 0u64..1 << words.len() {
                let fam = LevelSlice::from_words(n, l, (0..words.len()).filter(|&i| pick >> i & 1 == 1).map(|i| words[i])).unwrap();
                ensure(shade(&fam, n).unwrap().complements() == shadow(&fam.complements()), || {
                    format!("n = {n}, l = {l}, pick {pick:b}: duality fails")
                })?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn c8b_encoding() -> Result<usize, String> {
    let mut checked = 0;
    for n in 3..=6 {
        let pairs: Vec<u64> = level_words(n, 2).collect();
        for mask in 0u64..1 << pairs.len() {
            let edges: Vec<u64> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let has = |w: u64| edges.contains(&w);
            // every edge {u,v} has some w adjacent to both
            let closed = edges.iter().all(|&e| {
                (0..n).any(|w| e >> w & 1 == 0 && has(e & e.wrapping_neg() | 1 << w) && has((e & !(e & e.wrapping_neg())) | 1 << w))
            });
            let triangles = level_words(n, 3)
                .filter(|&t| (0..n).filter(|&b| t >> b & 1 == 1).all(|b| has(t & !(1 << b))))
                .count();
            let g = NonEdgeGraph::from_edge_mask(n, mask);
            let flat = g.to_flat();
            ensure(flat_check(&flat).is_valid() == closed, || format!("n = {n}, mask {mask:b}"))?;
            let size = binom(n as u64, 2) as usize - edges.len() + triangles;
            ensure(flat.len() == size, || format!("n = {n}, mask {mask:b}: size {} vs {size}", flat.len()))?;
            checked += 1;
        }
    }
    Ok(checked)
}

/// Longest chain of members strictly below / above `s`, by recursion over
/// the member list (no lattice tables).
fn chain_oracle(members: &[u64], s: u64) -> (usize, usize) {
    fn longest(sets: &[u64]) -> usize {
        // longest chain starting at each set, larger sets first
        let mut best = vec![1usize; sets.len()];
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(sets[i].count_ones()));
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[..pos] {
                if sets[i] & !sets[j] == 0 && sets[i] != sets[j] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }
    let below: Vec<u64> = members.iter().copied().filter(|&m| m & !s == 0 && m != s).collect();
    let above: Vec<u64> = members.iter().copied().filter(|&m| s & !m == 0 && m != s).collect();
    (longest(&below), longest(&above))
}

fn c8c_down_up() -> Result<usize, String> {
    let mut checked = 0;
    for n in 1..=4usize {
        let size = 1u64 << n;
        for pick in 0u64..1 << size {
            let members: Vec<u64> = (0..size).filter(|&w| pick >> w & 1 == 1).collect();
            let fam = SetFamily::from_words(n, members.iter().copied()).unwrap();
            let profile = LatticeProfile::new(&fam).unwrap();
            for s in 0..size {
                let expect = chain_oracle(&members, s);
                let mask = SetMask::new(n, s).unwrap();
                ensure(down_up(mask, &fam) == expect, || format!("n = {n}, F = {fam:?}, S = {mask}"))?;
                ensure((profile.down(s), profile.up(s)) == expect, || {
                    format!("lattice tables: n = {n}, F = {fam:?}, S = {mask}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn all_constructions() -> Vec<(String, SetFamily, usize)> {
    let mut out = Vec::new();
    for n in 2..=12 {
        for k in 2..=n {
            out.push((format!("product({n},{k})"), product_construction(n, k).unwrap(), k));
        }
    }
    let mut f = sat66();
    out.push(("sat66".into(), f.clone(), 6));
    for m in 1..=4 {
        f = double(&f).unwrap();
        out.push((format!("double^{m}(sat66)"), f.clone(), 6 + m));
    }
    for k in 3..=8 {
        let spec = default_layer_spec(k).unwrap();
        for n in k..=12 {
            out.push((format!("general({n},{k})"), general_wsat_construction(n, k, &spec).unwrap(), k));
        }
    }
    for n in 4..=12 {
        for a in 0..=n / 2 {
            if let Ok(fl) = construction_gen(n, 2, a) {
                out.push((format!("flatgen({n},2,{a})"), fl.to_family(), 1));
            }
        }
    }
    out
}

fn c8d_reduce() -> Result<usize, String> {
    let all = all_constructions();
    for (name, fam, k) in &all {
        let r = reduce(fam);
        ensure(r.len() == fam.len(), || format!("{name}: size {} -> {}", fam.len(), r.len()))?;
        ensure(strong(&r, *k) == strong(fam, *k), || format!("{name}: strong verdict changed"))?;
        let weak = |f: &SetFamily| is_weakly_saturating(f, *k).unwrap().is_valid();
        ensure(weak(&r) == weak(fam), || format!("{name}: weak verdict changed"))?;
    }
    Ok(all.len())
}

fn consistent(result: &SearchResult, n: usize, k_or_l: usize, flat: bool) -> Result<(), String> {
    let report = if flat { lflat_bounds(n, k_or_l, None) } else { bound_table(n, k_or_l) }.map_err(|e| e.to_string())?;
    let check = check_consistency(&report, result).map_err(|e| e.to_string())?;
    ensure(check.passed(), || format!("{:?}: {check}", result.problem))
}

fn c8e_consistency() -> Result<usize, String> {
    let mut searches = 0;
    let opts = SearchOptions::default();
    for n in 1..=5 {
        for k in 1..=n {
            let s = min_sat(n, k, SatMode::Strong, &opts).map_err(|e| e.to_string())?;
            let w = min_sat(n, k, SatMode::Weak, &opts).map_err(|e| e.to_string())?;
            for r in [&s, &w] {
                if r.exhausted {
                    consistent(r, n, k, false)?;
                    searches += 1;
                }
            }
            ensure(w.minimum <= s.minimum, || format!("({n},{k}): wsat > sat"))?;
        }
    }
    for n in 3..=7 {
        let r = flat_min_exact(n, FlatSearchMode::Exhaustive, &opts).map_err(|e| e.to_string())?;
        consistent(&r, n, 2, true)?;
        searches += 1;
    }
    Ok(searches)
}

fn c8_properties() -> Check {
    let limit = Duration::from_secs(300);
    let mut parts = Vec::new();
    let suites: [(&str, fn() -> Result<usize, String>); 5] = [
        ("duality", c8a_duality),
        ("encoding", c8b_encoding),
        ("down_up", c8c_down_up),
        ("reduce", c8d_reduce),
        ("consistency", c8e_consistency),
    ];
    for (name, suite) in suites {
        let t = Instant::now();
        let count = suite()?;
        let dt = t.elapsed();
        ensure(dt < limit, || format!("{name} took {dt:?}"))?;
        parts.push(format!("{name} {count} ({dt:.1?})"));
    }
    Ok(parts.join(", "))
}

fn c9_negative() -> Check {
    let p = product_construction(6, 4).unwrap();
    for s in p.iter() {
        let smaller = p.without(s);
        let cert = is_strongly_saturating(&smaller, 4).unwrap();
        ensure(!cert.is_valid(), || format!("removing {s} left a valid family"))?;
        ensure(cert.witness_holds(&smaller, 4), || format!("removing {s}: certificate does not re-check"))?;
    }

    let opts = SearchOptions::default();
    let flat = flat_min_exact(7, FlatSearchMode::Exhaustive, &opts).map_err(|e| e.to_string())?;
    let mut bad = flat.clone();
    bad.minimum -= 1;
    let check = check_consistency(&lflat_bounds(7, 2, None).unwrap(), &bad).map_err(|e| e.to_string())?;
    ensure(!check.passed(), || "flat minimum - 1 passed".into())?;
    ensure(check.violations().any(|c| c.entry == "german" && c.direction == Direction::Lower), || {
        format!("flat minimum - 1 did not name the lower bound: {check}")
    })?;

    let sat = min_sat(4, 3, SatMode::Strong, &opts).map_err(|e| e.to_string())?;
    let table = bound_table(4, 3).unwrap();
    let mut low = sat.clone();
    low.minimum = 1;
    let check = check_consistency(&table, &low).map_err(|e| e.to_string())?;
    ensure(check.violations().any(|c| c.direction == Direction::Lower), || "minimum 1 passed".into())?;
    let mut high = sat.clone();
    high.minimum = 5;
    let check = check_consistency(&table, &high).map_err(|e| e.to_string())?;
    ensure(check.violations().any(|c| c.entry == "upper_product"), || "minimum 5 passed".into())?;
    Ok(format!("{} deletions rejected; corrupted results fail", p.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 9] = [
        ("1 sat66 reproduction", 1, c1_sat66),
        ("2 doubling chain", 10, c2_doubling),
        ("3 product sweep", 60, c3_product_sweep),
        ("4 general wsat construction", 120, c4_general_wsat),
        ("5 exact small values", 60, c5_small_values),
        ("6 flat exact minimum", 600, c6_flat_minimum),
        ("7 construction formula", 60, c7_construction_formula),
        ("8 property suites", 1500, c8_properties),
        ("9 negative tests", 10, c9_negative),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let dt = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if dt > Duration::from_secs(limit) => {
                Err(format!("{detail}; over the {limit} s limit"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({dt:.2?}, limit {limit} s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({dt:.2?}, limit {limit} s) {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
