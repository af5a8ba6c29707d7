//! Copies of a pattern in an observed multigraph.
//!
//! A copy picks a vertex set, a placement of the pattern on it, and for each
//! pattern pair with multiplicity `i` one of the `C(y, i)` ways of choosing `i`
//! of the `y` observed parallel edges (self-loops likewise). The copy count is
//!
//! ```text
//! W = sum_S sum_placements prod_pairs C(y, i) * prod_loops C(s, s_w)
//! ```
//!
//! over vertex subsets `S` of size `v(G)`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::ObservedMultigraph;
use crate::pattern::{PatternGraph, Placement};

/// Largest host graph accepted by [`count_copies_bruteforce`].
pub const BRUTEFORCE_MAX_VERTICES: usize = 9;

/// Pattern with its placements precomputed, reusable across many host graphs.
#[derive(Debug, Clone)]
pub struct Counter {
    pattern: PatternGraph,
    /// For each placement and each position `k`, the requirements introduced
    /// when the `k`-th vertex is chosen: pairs `(j, i)` with `j < k` and the loop count.
    steps: Vec<Vec<Step>>,
    placements: Vec<Placement>,
}

#[derive(Debug, Clone, Default)]
struct Step {
    pairs: Vec<(usize, u32)>,
    loops: u32,
}

impl Counter {
    pub fn new(pattern: &PatternGraph) -> Self {
        let v = pattern.vertex_count();
        let placements = pattern.placements();
        let steps = placements
            .iter()
            .map(|pl| {
                let mut steps = vec![Step::default(); v];
                for &(a, b, m) in &pl.pairs {
                    steps[a.max(b)].pairs.push((a.min(b), m));
                }
                for &(w, c) in &pl.loops {
                    steps[w].loops = c;
                }
                steps
            })
            .collect();
        Counter { pattern: pattern.clone(), steps, placements }
    }

    pub fn pattern(&self) -> &PatternGraph {
        &self.pattern
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// Copy count `W` of the pattern in `graph`.
    pub fn count(&self, graph: &ObservedMultigraph) -> Result<BigUint> {
        self.check_size(graph)?;
        Ok(match self.count_fast(graph) {
            Some(w) => BigUint::from(w),
            None => self.count_big(graph),
        })
    }

    /// Copy count as `u64`, failing when it does not fit.
    pub fn count_u64(&self, graph: &ObservedMultigraph) -> Result<u64> {
        self.check_size(graph)?;
        let w = match self.count_fast(graph) {
            Some(w) => w.to_u64(),
            None => None,
        };
        w.ok_or_else(|| Error::Overflow("copy count exceeds 64 bits".into()))
    }

    fn check_size(&self, graph: &ObservedMultigraph) -> Result<()> {
        let v = self.pattern.vertex_count();
        if v > graph.vertex_count() {
            return Err(Error::OutOfRange(format!(
                "pattern has {v} vertices but the graph only {}",
                graph.vertex_count()
            )));
        }
        Ok(())
    }

    /// Depth-first scan over subsets in lexicographic order; a branch is cut as
    /// soon as every placement has an unmet requirement. `None` on overflow.
    fn count_fast(&self, graph: &ObservedMultigraph) -> Option<u128> {
        let v = self.pattern.vertex_count();
        let mut chosen = Vec::with_capacity(v);
        // products[k][p]: partial product of placement p after k vertices
        let mut products = vec![vec![0u128; self.steps.len()]; v + 1];
        products[0].iter_mut().for_each(|x| *x = 1);
        let mut total = 0u128;
        let ok = self.descend(graph, 0, &mut chosen, &mut products, &mut total);
        ok.then_some(total)
    }

    fn descend(
        &self,
        graph: &ObservedMultigraph,
        start: usize,
        chosen: &mut Vec<usize>,
        products: &mut [Vec<u128>],
        total: &mut u128,
    ) -> bool {
        let v = self.pattern.vertex_count();
        let k = chosen.len();
        if k == v {
            for &p in &products[k] {
                match total.checked_add(p) {
                    Some(t) => *total = t,
                    None => return false,
                }
            }
            return true;
        }
        let n = graph.vertex_count();
        for x in start..=n - (v - k) {
            let mut alive = false;
            for p in 0..self.steps.len() {
                let prev = products[k][p];
                let next = if prev == 0 {
                    0
                } else {
                    let step = &self.steps[p][k];
                    let mut acc = Some(prev);
                    for &(j, m) in &step.pairs {
                        acc = acc.and_then(|a| {
                            let b = binomial_u128(graph.count(chosen[j], x), m)?;
                            a.checked_mul(b)
                        });
                        if acc == Some(0) {
                            break;
                        }
                    }
                    if step.loops > 0 {
                        acc = acc.and_then(|a| a.checked_mul(binomial_u128(graph.self_loops(x), step.loops)?));
                    }
                    match acc {
                        Some(a) => a,
                        None => return false,
                    }
                };
                alive |= next != 0;
                products[k + 1][p] = next;
            }
            if !alive {
                continue;
            }
            chosen.push(x);
            let ok = self.descend(graph, x + 1, chosen, products, total);
            chosen.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    /// Arbitrary-precision scan, used when the `u128` path overflows.
    fn count_big(&self, graph: &ObservedMultigraph) -> BigUint {
        let v = self.pattern.vertex_count();
        let mut total = BigUint::zero();
        for_each_subset(graph.vertex_count(), v, |subset| {
            for pl in &self.placements {
                total += placement_product_big(graph, subset, pl);
            }
        });
        total
    }

    /// Clump size: copies supported on the vertex set of a `v(G)`-vertex graph.
    pub fn clump_size(&self, config: &ObservedMultigraph) -> Result<BigUint> {
        let v = self.pattern.vertex_count();
        if config.vertex_count() != v {
            return Err(Error::InvalidGraph(format!(
                "clump configuration has {} vertices, pattern has {v}",
                config.vertex_count()
            )));
        }
        self.count(config)
    }

    /// Clump size from a configuration given as pair counts `y[(a, b)]` through
    /// a lookup closure and loop counts `s[w]`. Returns `None` on overflow.
    pub(crate) fn clump_size_with<F, L>(&self, pair: F, loops: L) -> Option<u128>
    where
        F: Fn(usize, usize) -> u32,
        L: Fn(usize) -> u32,
    {
        let mut total = 0u128;
        for pl in &self.placements {
            let mut acc = 1u128;
            for &(a, b, m) in &pl.pairs {
                acc = acc.checked_mul(binomial_u128(pair(a, b), m)?)?;
                if acc == 0 {
                    break;
                }
            }
            for &(w, c) in &pl.loops {
                if acc == 0 {
                    break;
                }
                acc = acc.checked_mul(binomial_u128(loops(w), c)?)?;
            }
            total = total.checked_add(acc)?;
        }
        Some(total)
    }
}

/// `W` for `pattern` in `graph`.
pub fn count_copies(graph: &ObservedMultigraph, pattern: &PatternGraph) -> Result<BigUint> {
    Counter::new(pattern).count(graph)
}

/// Clump size of `pattern` on the vertex set of `config`, which must have `v(G)` vertices.
pub fn clump_size(config: &ObservedMultigraph, pattern: &PatternGraph) -> Result<BigUint> {
    Counter::new(pattern).clump_size(config)
}

/// Independent oracle: sum over all injective maps of the pattern into the
/// graph, divided by the automorphism count.
pub fn count_copies_bruteforce(graph: &ObservedMultigraph, pattern: &PatternGraph) -> Result<BigUint> {
    let n = graph.vertex_count();
    let v = pattern.vertex_count();
    if n > BRUTEFORCE_MAX_VERTICES {
        return Err(Error::OutOfRange(format!(
            "brute-force counting limited to {BRUTEFORCE_MAX_VERTICES} vertices, got {n}"
        )));
    }
    if v > n {
        return Err(Error::OutOfRange(format!("pattern has {v} vertices but the graph only {n}")));
    }
    let edges: Vec<(usize, usize, u32)> = pattern.edges().collect();
    let loops: Vec<(usize, u32)> = pattern.loops().collect();
    let mut image = vec![0usize; v];
    let mut used = vec![false; n];
    let mut total = BigUint::zero();
    injective_maps(0, &mut image, &mut used, &mut |img| {
        let mut prod = BigUint::one();
        for &(a, b, m) in &edges {
            prod *= binomial_big(graph.count(img[a], img[b]), m);
        }
        for &(w, c) in &loops {
            prod *= binomial_big(graph.self_loops(img[w]), c);
        }
        total += prod;
    });
    let a = BigUint::from(pattern.automorphism_count());
    debug_assert!((&total % &a).is_zero());
    Ok(total / a)
}

fn injective_maps<F: FnMut(&[usize])>(k: usize, image: &mut [usize], used: &mut [bool], f: &mut F) {
    if k == image.len() {
        f(image);
        return;
    }
    for x in 0..used.len() {
        if !used[x] {
            used[x] = true;
            image[k] = x;
            injective_maps(k + 1, image, used, f);
            used[x] = false;
        }
    }
}

fn placement_product_big(graph: &ObservedMultigraph, subset: &[usize], pl: &Placement) -> BigUint {
    let mut acc = BigUint::one();
    for &(a, b, m) in &pl.pairs {
        acc *= binomial_big(graph.count(subset[a], subset[b]), m);
        if acc.is_zero() {
            return acc;
        }
    }
    for &(w, c) in &pl.loops {
        acc *= binomial_big(graph.self_loops(subset[w]), c);
    }
    acc
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `C(y, m)` with overflow detection.
pub(crate) fn binomial_u128(y: u32, m: u32) -> Option<u128> {
    if m > y {
        return Some(0);
    }
    let m = m.min(y - m) as u128;
    let y = y as u128;
    let mut acc: u128 = 1;
    for j in 0..m {
        // exact at every step: acc * (y - j) is divisible by j + 1
        acc = acc.checked_mul(y - j)? / (j + 1);
    }
    Some(acc)
}

fn binomial_big(y: u32, m: u32) -> BigUint {
    if m > y {
        return BigUint::zero();
    }
    let m = m.min(y - m);
    let mut acc = BigUint::one();
    for j in 0..m {
        acc = acc * BigUint::from(y - j) / BigUint::from(j + 1);
    }
    acc
}
