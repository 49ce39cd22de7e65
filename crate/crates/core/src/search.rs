//! Exhaustive extremal search over threshold graphs with fixed `(n, m)`.
//!
//! A threshold graph with `n` vertices is determined by the set `D ⊆ {1, …, n-1}`
//! of its dominating steps, and it has `ΣD` edges. So the graphs with `m` edges
//! correspond to the partitions of `m` into distinct parts below `n`.
//! Candidates are produced in lexicographic order of `D` (ascending lists).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graphs::{
    max_edges, moment_of_degrees, slot_pairs, star_count_of_degrees, DenseSmallGraph,
    ThresholdGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    StarCount,
    DegreeMoment,
}

impl Objective {
    pub fn evaluate(self, degrees: &[usize], k: usize) -> BigUint {
        match self {
            Objective::StarCount => star_count_of_degrees(degrees, k),
            Objective::DegreeMoment => moment_of_degrees(degrees, k),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::StarCount => "star-count",
            Objective::DegreeMoment => "degree-moment",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star-count" | "stars" => Ok(Objective::StarCount),
            "degree-moment" | "moment" => Ok(Objective::DegreeMoment),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// Big integers go out as JSON numbers when they fit in `u64`, otherwise as
/// decimal strings.
pub fn serialize_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

fn serialize_witnesses<S: Serializer>(
    w: &[ThresholdGraph],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(w.iter().map(|g| g.to_string()))
}

fn serialize_millis<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub objective: Objective,
    #[serde(serialize_with = "serialize_biguint")]
    pub max_value: BigUint,
    /// Every maximizing creation sequence, sorted by dominating positions.
    #[serde(serialize_with = "serialize_witnesses")]
    pub witnesses: Vec<ThresholdGraph>,
    pub explored: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "serialize_millis")]
    pub elapsed: Duration,
}

/// Lexicographic generator of subsets of `{1, …, max_part}` with a fixed sum.
#[derive(Debug, Clone)]
pub struct DistinctPartSubsets {
    max_part: usize,
    target: usize,
    stack: Vec<usize>,
    sum: usize,
    next: usize,
    state: GenState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GenState {
    EmptyPending,
    Running,
    Done,
}

impl DistinctPartSubsets {
    pub fn new(max_part: usize, target: usize) -> Self {
        Self {
            max_part,
            target,
            stack: Vec::new(),
            sum: 0,
            next: 1,
            state: if target == 0 {
                GenState::EmptyPending
            } else {
                GenState::Running
            },
        }
    }

    /// `c + (c+1) + … + max_part`, zero for an empty range.
    fn tail_sum(&self, c: usize) -> usize {
        if c > self.max_part {
            0
        } else {
            (c + self.max_part) * (self.max_part - c + 1) / 2
        }
    }
}

impl Iterator for DistinctPartSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        match self.state {
            GenState::Done => return None,
            GenState::EmptyPending => {
                self.state = GenState::Done;
                return Some(Vec::new());
            }
            GenState::Running => {}
        }
        loop {
            let c = self.next;
            let remaining = self.target - self.sum;
            // Infeasibility of c implies infeasibility of every larger candidate.
            if c <= self.max_part && c <= remaining && self.tail_sum(c) >= remaining {
                if c == remaining {
                    self.stack.push(c);
                    let out = self.stack.clone();
                    self.stack.pop();
                    self.next = c + 1;
                    return Some(out);
                }
                self.stack.push(c);
                self.sum += c;
                self.next = c + 1;
                continue;
            }
            match self.stack.pop() {
                Some(last) => {
                    self.sum -= last;
                    self.next = last + 1;
                }
                None => {
                    self.state = GenState::Done;
                    return None;
                }
            }
        }
    }
}

/// All threshold graphs on `n` vertices with `m` edges, one per dominating set,
/// in lexicographic order of the dominating set.
pub fn enumerate_threshold(n: usize, m: usize) -> Result<impl Iterator<Item = ThresholdGraph>> {
    check_inputs(n, m)?;
    Ok(DistinctPartSubsets::new(n - 1, m)
        .map(move |d| ThresholdGraph::from_dominating(n, &d).expect("parts lie in 1..n")))
}

fn check_inputs(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::out_of_range("n", n, "n >= 1"));
    }
    let max = max_edges(n);
    if m > max {
        return Err(Error::EdgeCount { n, m, max });
    }
    Ok(())
}

struct Best {
    value: BigUint,
    witnesses: Vec<Vec<usize>>,
    explored: u64,
}

impl Best {
    fn empty() -> Self {
        Self {
            value: BigUint::zero(),
            witnesses: Vec::new(),
            explored: 0,
        }
    }

    fn offer(&mut self, value: BigUint, d: Vec<usize>) {
        self.explored += 1;
        if self.witnesses.is_empty() || value > self.value {
            self.value = value;
            self.witnesses.clear();
            self.witnesses.push(d);
        } else if value == self.value {
            self.witnesses.push(d);
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.explored += other.explored;
        if other.witnesses.is_empty() {
            return self;
        }
        if self.witnesses.is_empty() || other.value > self.value {
            return Best {
                explored: self.explored,
                ..other
            };
        }
        if other.value == self.value {
            self.witnesses.extend(other.witnesses);
        }
        self
    }
}

/// Maximize the objective over all threshold graphs with `n` vertices and `m`
/// edges. Branches on the largest dominating position run in parallel on the
/// current rayon pool; the merged witness list is sorted, so the result does
/// not depend on scheduling.
pub fn max_over_threshold(
    n: usize,
    m: usize,
    k: usize,
    objective: Objective,
) -> Result<SearchResult> {
    check_inputs(n, m)?;
    if k == 0 {
        return Err(Error::out_of_range("k", k, "k >= 1"));
    }
    let start = Instant::now();
    let score = |d: Vec<usize>, best: &mut Best| {
        let g = ThresholdGraph::from_dominating(n, &d).expect("parts lie in 1..n");
        best.offer(objective.evaluate(g.degree_slice(), k), d);
    };
    let best = if m == 0 {
        let mut best = Best::empty();
        score(Vec::new(), &mut best);
        best
    } else {
        (1..n)
            .into_par_iter()
            .filter(|&largest| largest <= m)
            .map(|largest| {
                let mut best = Best::empty();
                for mut d in DistinctPartSubsets::new(largest - 1, m - largest) {
                    d.push(largest);
                    score(d, &mut best);
                }
                best
            })
            .reduce(Best::empty, Best::merge)
    };
    let mut ds = best.witnesses;
    ds.sort();
    let witnesses = ds
        .iter()
        .map(|d| ThresholdGraph::from_dominating(n, d).expect("parts lie in 1..n"))
        .collect();
    Ok(SearchResult {
        n,
        m,
        k,
        objective,
        max_value: best.value,
        witnesses,
        explored: best.explored,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteForceResult {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub objective: Objective,
    #[serde(serialize_with = "serialize_biguint")]
    pub max_value: BigUint,
    /// First maximizing edge set in slot-mask order.
    #[serde(serialize_with = "serialize_small_graph")]
    pub witness: DenseSmallGraph,
    pub explored: u64,
}

fn serialize_small_graph<S: Serializer>(
    g: &DenseSmallGraph,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(g.edges())
}

/// Default vertex cap for [`brute_force_max`].
pub const BRUTE_FORCE_CAP: usize = 7;

/// Maximum over every labeled graph with `n <= 7` vertices and `m` edges.
pub fn brute_force_max(
    n: usize,
    m: usize,
    k: usize,
    objective: Objective,
) -> Result<BruteForceResult> {
    brute_force_max_capped(n, m, k, objective, BRUTE_FORCE_CAP)
}

/// As [`brute_force_max`] with an explicit cap (at most 8).
pub fn brute_force_max_capped(
    n: usize,
    m: usize,
    k: usize,
    objective: Objective,
    cap: usize,
) -> Result<BruteForceResult> {
    let cap = cap.min(DenseSmallGraph::MAX_VERTICES);
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    check_inputs(n, m)?;
    if n > BRUTE_FORCE_CAP {
        log::warn!(
            "brute force over all graphs on {n} vertices visits up to C(28, 14) ≈ 4e7 edge sets"
        );
    }
    let pairs = slot_pairs(n);
    // The objective only depends on the degree multiset; evaluate each once.
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut best_value: Option<BigUint> = None;
    let mut witness_mask = 0u32;
    let mut explored = 0u64;
    for mask in masks_with_popcount(pairs.len(), m) {
        explored += 1;
        let mut deg = [0u8; DenseSmallGraph::MAX_VERTICES];
        let mut bits = mask;
        while bits != 0 {
            let s = bits.trailing_zeros() as usize;
            let (a, b) = pairs[s];
            deg[a] += 1;
            deg[b] += 1;
            bits &= bits - 1;
        }
        let mut key = deg[..n].to_vec();
        key.sort_unstable();
        if !seen.insert(key.clone()) {
            continue;
        }
        let degrees: Vec<usize> = key.iter().map(|&d| d as usize).collect();
        let value = objective.evaluate(&degrees, k);
        if best_value.as_ref().is_none_or(|b| value > *b) {
            best_value = Some(value);
            witness_mask = mask;
        }
    }
    Ok(BruteForceResult {
        n,
        m,
        k,
        objective,
        max_value: best_value.unwrap_or_default(),
        witness: DenseSmallGraph::from_mask(n, witness_mask)?,
        explored,
    })
}

/// All `slots`-bit masks with exactly `ones` bits set, in increasing order.
fn masks_with_popcount(slots: usize, ones: usize) -> impl Iterator<Item = u32> {
    let limit: u64 = 1 << slots;
    let first: u64 = if ones == 0 { 0 } else { (1u64 << ones) - 1 };
    let mut cur = (ones <= slots).then_some(first);
    std::iter::from_fn(move || {
        let out = cur?;
        cur = if out == 0 {
            None
        } else {
            // Gosper's hack: next larger integer with the same popcount.
            let c = out & out.wrapping_neg();
            let r = out + c;
            let next = (((r ^ out) >> 2) / c) | r;
            (next < limit).then_some(next)
        };
        Some(out as u32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{
        complement, count_stars, degree_moment, extremal_witness, quasi_complete, quasi_star,
        DegreeSequence, Flag,
    };

    /// Partitions of `m` into distinct parts no larger than `max`, by the
    /// standard 0/1 knapsack recurrence.
    fn distinct_partitions(m: usize, max: usize) -> u64 {
        let mut ways = vec![0u64; m + 1];
        ways[0] = 1;
        for part in 1..=max {
            for s in (part..=m).rev() {
                ways[s] += ways[s - part];
            }
        }
        ways[m]
    }

    #[test]
    fn enumeration_examples() {
        let g: Vec<_> = enumerate_threshold(3, 2).unwrap().collect();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].dominating_positions(), vec![2]);

        let g: Vec<_> = enumerate_threshold(4, 3).unwrap().collect();
        let ds: Vec<_> = g.iter().map(|g| g.dominating_positions()).collect();
        assert_eq!(ds, vec![vec![1, 2], vec![3]]);

        for n in 1..8 {
            let g: Vec<_> = enumerate_threshold(n, 0).unwrap().collect();
            assert_eq!(g.len(), 1);
            assert_eq!(g[0].m(), 0);
        }
        assert!(enumerate_threshold(4, 7).is_err());
    }

    #[test]
    fn enumeration_counts_match_partition_counter() {
        for n in 1..=14 {
            for m in 0..=max_edges(n) {
                let graphs: Vec<_> = enumerate_threshold(n, m).unwrap().collect();
                assert_eq!(
                    graphs.len() as u64,
                    distinct_partitions(m, n - 1),
                    "n={n} m={m}"
                );
                assert!(graphs.iter().all(|g| g.m() == m && g.n() == n));
                let ds: Vec<_> = graphs.iter().map(|g| g.dominating_positions()).collect();
                let mut sorted = ds.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(
                    ds, sorted,
                    "lexicographic and duplicate-free for n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn gosper_masks() {
        let masks: Vec<u32> = masks_with_popcount(4, 2).collect();
        assert_eq!(masks, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_with_popcount(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(masks_with_popcount(0, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(masks_with_popcount(21, 10).count(), 352_716);
        assert_eq!(masks_with_popcount(3, 4).count(), 0);
    }

    #[test]
    fn witness_search_13_61() {
        let r = max_over_threshold(13, 61, 3, Objective::StarCount).unwrap();
        assert_eq!(r.max_value, BigUint::from(1622u32));
        assert!(r.witnesses.contains(&extremal_witness()));
        for w in &r.witnesses {
            assert_eq!(count_stars(w, 3), r.max_value);
        }
        let r = max_over_threshold(13, 61, 3, Objective::DegreeMoment).unwrap();
        assert_eq!(r.max_value, BigUint::from(13238u32));
        assert!(r.witnesses.contains(&extremal_witness()));
        assert_eq!(r.explored, distinct_partitions(61, 12));
    }

    #[test]
    fn small_star_search() {
        let r = max_over_threshold(5, 4, 2, Objective::StarCount).unwrap();
        assert_eq!(r.max_value, BigUint::from(6u32));
        assert_eq!(r.witnesses, vec![quasi_star(5, 4).unwrap()]);
        let b = brute_force_max(5, 4, 2, Objective::StarCount).unwrap();
        assert_eq!(b.max_value, BigUint::from(6u32));
        assert_eq!(count_stars(&b.witness, 2), b.max_value);
    }

    #[test]
    fn brute_force_trivial_cases() {
        for n in 1..=6 {
            let b = brute_force_max(n, 0, 2, Objective::StarCount).unwrap();
            assert!(b.max_value.is_zero());
        }
        let b = brute_force_max(4, 6, 2, Objective::StarCount).unwrap();
        assert_eq!(b.max_value, BigUint::from(12u32));
        assert_eq!(b.explored, 1);
        assert!(matches!(
            brute_force_max(8, 3, 2, Objective::StarCount),
            Err(Error::TooLarge { n: 8, cap: 7 })
        ));
        assert!(brute_force_max_capped(8, 3, 2, Objective::StarCount, 8).is_ok());
        assert!(brute_force_max_capped(9, 3, 2, Objective::StarCount, 9).is_err());
    }

    #[test]
    fn oracle_equivalence_up_to_six_vertices() {
        for n in 1..=6 {
            for m in 0..=max_edges(n) {
                for k in 2..=4 {
                    for obj in [Objective::StarCount, Objective::DegreeMoment] {
                        let t = max_over_threshold(n, m, k, obj).unwrap();
                        let b = brute_force_max(n, m, k, obj).unwrap();
                        assert_eq!(t.max_value, b.max_value, "n={n} m={m} k={k} {obj}");
                    }
                }
            }
        }
    }

    #[test]
    fn dominates_both_constructions() {
        for n in 2..=12 {
            for m in 0..=max_edges(n) {
                let r = max_over_threshold(n, m, 3, Objective::StarCount).unwrap();
                let qc = count_stars(&quasi_complete(n, m).unwrap(), 3);
                let qs = count_stars(&quasi_star(n, m).unwrap(), 3);
                assert!(r.max_value >= qc && r.max_value >= qs);
            }
        }
        let r = max_over_threshold(13, 61, 3, Objective::StarCount).unwrap();
        assert!(r.max_value > count_stars(&quasi_star(13, 61).unwrap(), 3));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| max_over_threshold(16, 70, 3, Objective::StarCount).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.max_value, b.max_value);
        assert_eq!(a.witnesses, b.witnesses);
        assert_eq!(a.explored, b.explored);
    }

    #[test]
    fn cherry_identity_small() {
        for n in 1..=9 {
            for m in 0..=max_edges(n) {
                for g in enumerate_threshold(n, m).unwrap() {
                    let lhs = count_stars(&g, 2);
                    let rhs = degree_moment(&g, 2) / 2u32 - BigUint::from(g.m());
                    assert_eq!(lhs, rhs);
                    assert_eq!(complement(&complement(&g)), g);
                }
            }
        }
    }

    #[test]
    fn witnesses_are_threshold_graphs() {
        let r = max_over_threshold(9, 18, 2, Objective::StarCount).unwrap();
        for w in &r.witnesses {
            assert_eq!(w.edge_count(), 18);
            assert!(w.creation().contains(&Flag::Dom));
        }
    }

    #[test]
    fn objective_parsing() {
        assert_eq!(
            "star-count".parse::<Objective>().unwrap(),
            Objective::StarCount
        );
        assert_eq!(
            "degree-moment".parse::<Objective>().unwrap(),
            Objective::DegreeMoment
        );
        assert!("cliques".parse::<Objective>().is_err());
    }

    #[test]
    fn search_rejects_bad_input() {
        assert!(max_over_threshold(5, 11, 2, Objective::StarCount).is_err());
        assert!(max_over_threshold(5, 3, 0, Objective::StarCount).is_err());
        assert!(max_over_threshold(0, 0, 2, Objective::StarCount).is_err());
    }
}
