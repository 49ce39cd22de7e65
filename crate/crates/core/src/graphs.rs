//! Threshold graphs, small dense graphs, and exact star/moment counting.
//!
//! A threshold graph on `n` vertices is stored as its creation sequence: a
//! single starting vertex followed by `n - 1` steps, each adding either an
//! isolated vertex or one joined to every vertex present so far. Step `j`
//! (1-based) finds `j` vertices already present, so a dominating step at
//! position `j` contributes exactly `j` edges.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combin::binomial;
use crate::error::{Error, Result};

/// One step of a creation sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Iso,
    Dom,
}

impl Flag {
    pub fn flipped(self) -> Self {
        match self {
            Flag::Iso => Flag::Dom,
            Flag::Dom => Flag::Iso,
        }
    }

    fn as_char(self) -> char {
        match self {
            Flag::Iso => 'i',
            Flag::Dom => 'd',
        }
    }
}

/// Anything with a degree sequence.
pub trait DegreeSequence {
    fn vertex_count(&self) -> usize;
    fn degrees(&self) -> Vec<usize>;

    fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdGraph {
    creation: Vec<Flag>,
    degrees: Vec<usize>,
    edges: usize,
}

impl ThresholdGraph {
    /// Build from `n` and `n - 1` creation flags.
    pub fn from_creation(n: usize, flags: &[Flag]) -> Result<Self> {
        if n == 0 || flags.len() + 1 != n {
            return Err(Error::CreationLength {
                n,
                expected: n.saturating_sub(1),
                got: flags.len(),
            });
        }
        let creation = flags.to_vec();
        let mut degrees = vec![0usize; n];
        let mut edges = 0;
        // Vertex v (v >= 1) is added at step v; dominating later steps each
        // add one to its degree.
        let mut later_dom = 0usize;
        for v in (0..n).rev() {
            let own = if v >= 1 && creation[v - 1] == Flag::Dom {
                edges += v;
                v
            } else {
                0
            };
            degrees[v] = own + later_dom;
            if v >= 1 && creation[v - 1] == Flag::Dom {
                later_dom += 1;
            }
        }
        Ok(Self {
            creation,
            degrees,
            edges,
        })
    }

    /// Build from the set of dominating step positions (values in `1..n`).
    pub fn from_dominating(n: usize, positions: &[usize]) -> Result<Self> {
        let mut flags = vec![Flag::Iso; n.saturating_sub(1)];
        for &p in positions {
            if p == 0 || p >= n {
                return Err(Error::out_of_range("dominating position", p, "1..n"));
            }
            flags[p - 1] = Flag::Dom;
        }
        Self::from_creation(n, &flags)
    }

    /// Parse the compact `i`/`d` string produced by `Display`.
    pub fn parse(n: usize, code: &str) -> Result<Self> {
        let flags = code
            .chars()
            .map(|c| match c.to_ascii_lowercase() {
                'i' | '0' => Ok(Flag::Iso),
                'd' | '1' => Ok(Flag::Dom),
                _ => Err(Error::Parse(code.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_creation(n, &flags)
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn m(&self) -> usize {
        self.edges
    }

    pub fn creation(&self) -> &[Flag] {
        &self.creation
    }

    pub fn degree_slice(&self) -> &[usize] {
        &self.degrees
    }

    /// Dominating step positions in increasing order.
    pub fn dominating_positions(&self) -> Vec<usize> {
        self.creation
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == Flag::Dom)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Explicit edge list, refused above `cap` vertices.
    pub fn adjacency(&self, cap: usize) -> Result<EdgeSet> {
        let n = self.n();
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        let mut edges = BTreeSet::new();
        for (step, flag) in self.creation.iter().enumerate() {
            let v = step + 1;
            if *flag == Flag::Dom {
                for u in 0..v {
                    edges.insert((u, v));
                }
            }
        }
        Ok(EdgeSet { n, edges })
    }
}

impl DegreeSequence for ThresholdGraph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn degrees(&self) -> Vec<usize> {
        self.degrees.clone()
    }

    fn edge_count(&self) -> usize {
        self.edges
    }
}

impl fmt::Display for ThresholdGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for flag in &self.creation {
            write!(f, "{}", flag.as_char())?;
        }
        Ok(())
    }
}

/// Largest edge count of a simple graph on `n` vertices.
pub fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_edge_count(n: usize, m: usize) -> Result<()> {
    let max = max_edges(n);
    if m > max {
        return Err(Error::EdgeCount { n, m, max });
    }
    Ok(())
}

/// Split `m = C(a, 2) + b` with `0 <= b < a`.
pub fn clique_split(m: usize) -> (usize, usize) {
    let mut a = 1usize;
    while (a + 1) * a / 2 <= m {
        a += 1;
    }
    (a, m - a * (a - 1) / 2)
}

/// `K_a`, one more vertex joined to `b` clique vertices, and isolated vertices.
pub fn quasi_complete(n: usize, m: usize) -> Result<ThresholdGraph> {
    if n == 0 {
        return Err(Error::out_of_range("n", n, "n >= 1"));
    }
    check_edge_count(n, m)?;
    let (a, b) = clique_split(m);
    if a == n {
        // Only reachable with b = 0, i.e. the complete graph.
        return ThresholdGraph::from_creation(n, &vec![Flag::Dom; n - 1]);
    }
    let mut flags = Vec::with_capacity(n - 1);
    flags.extend(std::iter::repeat_n(Flag::Dom, a - b - 1));
    flags.push(Flag::Iso);
    flags.extend(std::iter::repeat_n(Flag::Dom, b));
    flags.extend(std::iter::repeat_n(Flag::Iso, n - a - 1));
    ThresholdGraph::from_creation(n, &flags)
}

/// Complement of the quasi-complete graph with `C(n, 2) - m` edges.
pub fn quasi_star(n: usize, m: usize) -> Result<ThresholdGraph> {
    if n == 0 {
        return Err(Error::out_of_range("n", n, "n >= 1"));
    }
    check_edge_count(n, m)?;
    Ok(complement(&quasi_complete(n, max_edges(n) - m)?))
}

pub fn complement(g: &ThresholdGraph) -> ThresholdGraph {
    let flags: Vec<Flag> = g.creation.iter().map(|f| f.flipped()).collect();
    ThresholdGraph::from_creation(g.n(), &flags).expect("same length as a valid sequence")
}

/// The 13-vertex, 61-edge graph with more copies of `S_3` than both the
/// quasi-complete graph and the quasi-star: `K_11` with three marked vertices
/// `v1, v2, v3`, plus two vertices `w1, w2` joined to exactly the marked ones.
///
/// Creation order: the eight unmarked clique vertices, then `w1, w2`
/// (isolated on arrival), then `v1, v2, v3` (dominating).
pub fn extremal_witness() -> ThresholdGraph {
    use Flag::{Dom, Iso};
    let flags = [Dom, Dom, Dom, Dom, Dom, Dom, Dom, Iso, Iso, Dom, Dom, Dom];
    ThresholdGraph::from_creation(13, &flags).expect("13 vertices, 12 flags")
}

/// Number of (not necessarily induced) copies of the `k`-leaf star:
/// `Σ_v C(d(v), k)`.
pub fn count_stars<G: DegreeSequence + ?Sized>(g: &G, k: usize) -> BigUint {
    star_count_of_degrees(&g.degrees(), k)
}

/// The `k`-th degree moment `Σ_v d(v)^k`.
pub fn degree_moment<G: DegreeSequence + ?Sized>(g: &G, k: usize) -> BigUint {
    moment_of_degrees(&g.degrees(), k)
}

pub fn star_count_of_degrees(degrees: &[usize], k: usize) -> BigUint {
    sum_by_degree(degrees, |d| binomial(d as u64, k as u64))
}

pub fn moment_of_degrees(degrees: &[usize], k: usize) -> BigUint {
    sum_by_degree(degrees, |d| {
        if k == 0 {
            BigUint::one()
        } else {
            num_traits::pow(BigUint::from(d), k)
        }
    })
}

fn sum_by_degree(degrees: &[usize], value: impl Fn(usize) -> BigUint) -> BigUint {
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut mult = vec![0u64; max + 1];
    for &d in degrees {
        mult[d] += 1;
    }
    mult.iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .fold(BigUint::zero(), |acc, (d, c)| acc + value(d) * *c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(serialize_with = "crate::search::serialize_biguint")]
    pub star_count: BigUint,
    #[serde(serialize_with = "crate::search::serialize_biguint")]
    pub moment: BigUint,
}

impl CountReport {
    pub fn new<G: DegreeSequence + ?Sized>(g: &G, k: usize) -> Self {
        let degrees = g.degrees();
        Self {
            n: degrees.len(),
            m: degrees.iter().sum::<usize>() / 2,
            k,
            star_count: star_count_of_degrees(&degrees, k),
            moment: moment_of_degrees(&degrees, k),
        }
    }
}

/// An explicit edge list on vertices `0..n`, pairs stored as `(low, high)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSet {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// `N(u) \ {v} ⊆ N(v) \ {u}` whenever `d(u) <= d(v)`.
    pub fn has_nested_neighborhoods(&self) -> bool {
        let nbrs: Vec<BTreeSet<usize>> = (0..self.n).map(|v| self.neighbors(v)).collect();
        for u in 0..self.n {
            for v in 0..self.n {
                if u == v || nbrs[u].len() > nbrs[v].len() {
                    continue;
                }
                let nested = nbrs[u].iter().all(|&w| w == v || nbrs[v].contains(&w));
                if !nested {
                    return false;
                }
            }
        }
        true
    }
}

impl DegreeSequence for EdgeSet {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Up to 8 vertices with the edge set packed into the 28 pair slots of a `u32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DenseSmallGraph {
    n: u8,
    mask: u32,
}

impl DenseSmallGraph {
    pub const MAX_VERTICES: usize = 8;

    pub fn empty(n: usize) -> Result<Self> {
        if n > Self::MAX_VERTICES {
            return Err(Error::TooLarge {
                n,
                cap: Self::MAX_VERTICES,
            });
        }
        Ok(Self {
            n: n as u8,
            mask: 0,
        })
    }

    pub fn from_mask(n: usize, mask: u32) -> Result<Self> {
        let g = Self::empty(n)?;
        let slots = max_edges(n);
        if slots < 32 && mask >> slots != 0 {
            return Err(Error::InvalidGraphon(format!(
                "edge mask {mask:#x} uses slots beyond the {slots} pairs of {n} vertices"
            )));
        }
        Ok(Self { mask, ..g })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::out_of_range(
                    "edge endpoint",
                    format!("({a}, {b})"),
                    "distinct vertices below n",
                ));
            }
            g.mask |= 1 << pair_slot(a.min(b), a.max(b));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        slot_pairs(self.n())
            .into_iter()
            .enumerate()
            .filter(|(s, _)| self.mask >> s & 1 == 1)
            .map(|(_, p)| p)
            .collect()
    }
}

impl DegreeSequence for DenseSmallGraph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n()];
        for (a, b) in self.edges() {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

/// Slot index of the pair `a < b`, ordered by `b` then `a`.
fn pair_slot(a: usize, b: usize) -> usize {
    b * (b - 1) / 2 + a
}

pub(crate) fn slot_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Flag::{Dom, Iso};

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn creation_examples() {
        let star = ThresholdGraph::from_creation(3, &[Iso, Dom]).unwrap();
        assert_eq!(star.degree_slice(), &[1, 1, 2]);
        assert_eq!(star.m(), 2);

        let k4 = ThresholdGraph::from_creation(4, &[Dom, Dom, Dom]).unwrap();
        assert_eq!(k4.degree_slice(), &[3, 3, 3, 3]);

        let empty = ThresholdGraph::from_creation(5, &[Iso; 4]).unwrap();
        assert_eq!(empty.m(), 0);
        assert!(empty.degree_slice().iter().all(|&d| d == 0));

        let single = ThresholdGraph::from_creation(1, &[]).unwrap();
        assert_eq!(single.degree_slice(), &[0]);
    }

    #[test]
    fn creation_length_mismatch() {
        assert!(matches!(
            ThresholdGraph::from_creation(4, &[Dom]),
            Err(Error::CreationLength {
                expected: 3,
                got: 1,
                ..
            })
        ));
        assert!(ThresholdGraph::from_creation(0, &[]).is_err());
    }

    #[test]
    fn quasi_complete_13_61() {
        assert_eq!(clique_split(61), (11, 6));
        let g = quasi_complete(13, 61).unwrap();
        assert_eq!(g.m(), 61);
        let mut expected = vec![11; 6];
        expected.extend([10; 5]);
        expected.extend([6, 0]);
        assert_eq!(sorted(g.degrees()), sorted(expected));
        assert_eq!(count_stars(&g, 3), big(1610));
        assert_eq!(degree_moment(&g, 3), big(13202));
    }

    #[test]
    fn quasi_complete_edge_cases() {
        assert_eq!(quasi_complete(5, 10).unwrap().degree_slice(), &[4; 5]);
        assert_eq!(quasi_complete(6, 0).unwrap().m(), 0);
        assert_eq!(quasi_complete(1, 0).unwrap().n(), 1);
        assert_eq!(clique_split(0), (1, 0));
        assert_eq!(clique_split(3), (3, 0));
        assert!(matches!(
            quasi_complete(4, 7),
            Err(Error::EdgeCount { max: 6, .. })
        ));
        assert!(quasi_star(4, 7).is_err());
    }

    #[test]
    fn quasi_star_13_61() {
        let g = quasi_star(13, 61).unwrap();
        let mut expected = vec![6, 6, 10];
        expected.extend([7; 4]);
        expected.extend([12; 6]);
        assert_eq!(sorted(g.degrees()), sorted(expected));
        assert_eq!(count_stars(&g, 3), big(1620));
        assert_eq!(degree_moment(&g, 3), big(13172));
        assert_eq!(complement(&quasi_complete(13, 17).unwrap()), g);
    }

    #[test]
    fn quasi_star_small() {
        assert_eq!(
            sorted(quasi_star(5, 4).unwrap().degrees()),
            vec![1, 1, 1, 1, 4]
        );
        assert_eq!(quasi_star(6, 15).unwrap().degree_slice(), &[5; 6]);
    }

    #[test]
    fn complement_of_k4_is_empty() {
        let k4 = ThresholdGraph::from_creation(4, &[Dom; 3]).unwrap();
        assert_eq!(complement(&k4).m(), 0);
    }

    #[test]
    fn witness_numbers() {
        let g = extremal_witness();
        assert_eq!((g.n(), g.m()), (13, 61));
        let mut expected = vec![12; 3];
        expected.extend([10; 8]);
        expected.extend([3; 2]);
        assert_eq!(sorted(g.degrees()), sorted(expected));
        assert_eq!(count_stars(&g, 3), big(1622));
        assert_eq!(degree_moment(&g, 3), big(13238));
        let adj = g.adjacency(64).unwrap();
        assert_eq!(adj.edges.len(), 61);
        assert!(adj.has_nested_neighborhoods());
        assert_eq!(adj.degrees(), g.degrees());
    }

    #[test]
    fn adjacency_small_and_capped() {
        let star = ThresholdGraph::from_creation(3, &[Iso, Dom]).unwrap();
        let adj = star.adjacency(8).unwrap();
        assert_eq!(
            adj.edges.iter().copied().collect::<Vec<_>>(),
            vec![(0, 2), (1, 2)]
        );
        let k4 = ThresholdGraph::from_creation(4, &[Dom; 3]).unwrap();
        assert_eq!(k4.adjacency(8).unwrap().edges.len(), 6);
        assert!(matches!(
            extremal_witness().adjacency(10),
            Err(Error::TooLarge { cap: 10, .. })
        ));
    }

    #[test]
    fn complete_graph_star_counts() {
        for n in 1..12usize {
            let kn = ThresholdGraph::from_creation(n, &vec![Dom; n - 1]).unwrap();
            for k in 0..6usize {
                assert_eq!(
                    count_stars(&kn, k),
                    binomial((n - 1) as u64, k as u64) * n as u64
                );
            }
            assert_eq!(degree_moment(&kn, 3), big((n * (n - 1).pow(3)) as u64));
        }
    }

    #[test]
    fn dense_small_graph_roundtrip() {
        let g = DenseSmallGraph::from_edges(4, &[(0, 1), (3, 1), (2, 3)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 3), (2, 3)]);
        assert_eq!(g.degrees(), vec![1, 2, 1, 2]);
        assert_eq!(g.edge_count(), 3);
        assert!(DenseSmallGraph::from_edges(4, &[(1, 1)]).is_err());
        assert!(DenseSmallGraph::empty(9).is_err());
        assert!(DenseSmallGraph::from_mask(3, 0b1000).is_err());
    }

    #[test]
    fn display_and_parse() {
        let g = extremal_witness();
        assert_eq!(g.to_string(), "dddddddiiddd");
        assert_eq!(ThresholdGraph::parse(13, &g.to_string()).unwrap(), g);
        assert_eq!(
            g.dominating_positions(),
            vec![1, 2, 3, 4, 5, 6, 7, 10, 11, 12]
        );
    }

    fn arb_threshold() -> impl Strategy<Value = ThresholdGraph> {
        (1usize..24).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n - 1).prop_map(move |bits| {
                let flags: Vec<Flag> = bits
                    .into_iter()
                    .map(|b| if b { Dom } else { Iso })
                    .collect();
                ThresholdGraph::from_creation(n, &flags).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn edge_count_identities(g in arb_threshold()) {
            let dom_sum: usize = g.dominating_positions().iter().sum();
            prop_assert_eq!(g.m(), dom_sum);
            prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.m());
            prop_assert_eq!(count_stars(&g, 1), big(2 * g.m() as u64));
            prop_assert_eq!(count_stars(&g, 0), big(g.n() as u64));
        }

        #[test]
        fn complement_laws(g in arb_threshold()) {
            let c = complement(&g);
            prop_assert_eq!(&complement(&c), &g);
            let n = g.n();
            prop_assert_eq!(degree_moment(&c, 1), big((n * (n - 1) - 2 * g.m()) as u64));
            for (d, dc) in g.degrees().iter().zip(c.degrees()) {
                prop_assert_eq!(d + dc, n - 1);
            }
        }

        #[test]
        fn factorial_bound(g in arb_threshold(), k in 0usize..7) {
            let fact: u64 = (1..=k as u64).product();
            prop_assert!(count_stars(&g, k) * fact <= degree_moment(&g, k));
        }

        #[test]
        fn nested_and_consistent_adjacency(g in arb_threshold()) {
            let adj = g.adjacency(64).unwrap();
            prop_assert!(adj.has_nested_neighborhoods());
            prop_assert_eq!(adj.degrees(), g.degrees());
            prop_assert_eq!(adj.edges.len(), g.m());
        }

        #[test]
        fn quasi_star_is_complement_of_quasi_complete(n in 1usize..20, frac in 0.0f64..=1.0) {
            let m = (frac * max_edges(n) as f64).floor() as usize;
            let qs = quasi_star(n, m).unwrap();
            let qc = quasi_complete(n, max_edges(n) - m).unwrap();
            prop_assert_eq!(qs.m(), m);
            let mut lhs = qs.degrees();
            let mut rhs: Vec<usize> = qc.degrees().iter().map(|d| n - 1 - d).collect();
            lhs.sort_unstable();
            rhs.sort_unstable();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn quasi_complete_has_m_edges(n in 1usize..30, frac in 0.0f64..=1.0) {
            let m = (frac * max_edges(n) as f64).floor() as usize;
            let g = quasi_complete(n, m).unwrap();
            prop_assert_eq!(g.m(), m);
        }
    }

    #[test]
    fn shifted_order_property() {
        // Edge (v_i, v_j) forces (v_k, v_l) for k <= i, l <= j, k != l when
        // vertices are sorted by decreasing degree.
        let g = extremal_witness();
        let adj = g.adjacency(64).unwrap();
        let mut order: Vec<usize> = (0..g.n()).collect();
        let deg = g.degrees();
        order.sort_by_key(|&v| std::cmp::Reverse(deg[v]));
        let has = |a: usize, b: usize| adj.edges.contains(&(a.min(b), a.max(b)));
        for i in 0..g.n() {
            for j in 0..g.n() {
                if i == j || !has(order[i], order[j]) {
                    continue;
                }
                for k in 0..=i {
                    for l in 0..=j {
                        if k != l {
                            assert!(has(order[k], order[l]));
                        }
                    }
                }
            }
        }
    }
}
