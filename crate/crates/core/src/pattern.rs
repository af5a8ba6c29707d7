//! Fixed pattern graphs and the structural constants the bounds consume.
//!
//! A pattern may carry parallel edges and self-loops. Self-loops take part in
//! counting but never in the balancedness quantities, which are computed on
//! the loop-free part of the pattern.
//!
//! # Subgraph convention
//!
//! The minima defining `alpha`, `gamma`, `alpha_m` and `gamma_m` range over
//! proper subgraphs `H` with at least one edge whose vertex set is exactly the
//! set of endpoints of the chosen edges. For a fixed vertex set `S` both
//! objectives are decreasing in `e(H)`, so only the subgraph induced on `S`
//! needs to be examined, provided it has no isolated vertex inside `S`. The
//! spanning case `S = V(G)` is reached by removing one unit of multiplicity
//! when that keeps every vertex covered.
//!
//! Two-vertex patterns have no admissible subgraph with fewer vertices; for
//! those the single-vertex edgeless subgraph stands in, which yields
//! `kappa(G, 1) = e(G)`, the number of edges two copies sharing one vertex
//! carry on top of one copy.

use std::collections::HashSet;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest pattern order accepted; placements are enumerated over `v!` permutations.
pub const MAX_PATTERN_VERTICES: usize = 10;

/// A fixed pattern graph with edge multiplicities and self-loop counts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PatternGraph {
    vertex_count: usize,
    /// Row-major `v x v` symmetric multiplicity matrix with zero diagonal.
    mult: Vec<u32>,
    self_loops: Vec<u32>,
}

impl fmt::Debug for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PatternGraph")
            .field("vertices", &self.vertex_count)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .field("self_loops", &self.loops().collect::<Vec<_>>())
            .finish()
    }
}

impl PatternGraph {
    /// Build a pattern from `(u, v, multiplicity)` triples and `(w, count)` loop entries.
    pub fn new(
        vertex_count: usize,
        edges: &[(usize, usize, u32)],
        self_loops: &[(usize, u32)],
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidPattern("pattern needs at least one vertex".into()));
        }
        if vertex_count > MAX_PATTERN_VERTICES {
            return Err(Error::InvalidPattern(format!(
                "pattern has {vertex_count} vertices, at most {MAX_PATTERN_VERTICES} supported"
            )));
        }
        let mut mult = vec![0u32; vertex_count * vertex_count];
        for &(u, v, m) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidPattern(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidPattern(format!(
                    "edge ({u}, {v}) is a self-loop; list it under self_loops"
                )));
            }
            if m == 0 {
                return Err(Error::InvalidPattern(format!("edge ({u}, {v}) has multiplicity 0")));
            }
            if mult[u * vertex_count + v] != 0 {
                return Err(Error::InvalidPattern(format!("pair ({u}, {v}) listed twice")));
            }
            mult[u * vertex_count + v] = m;
            mult[v * vertex_count + u] = m;
        }
        let mut loops = vec![0u32; vertex_count];
        for &(w, c) in self_loops {
            if w >= vertex_count {
                return Err(Error::InvalidPattern(format!("self-loop vertex {w} out of range")));
            }
            if loops[w] != 0 {
                return Err(Error::InvalidPattern(format!("self-loop vertex {w} listed twice")));
            }
            loops[w] = c;
        }
        let graph = PatternGraph { vertex_count, mult, self_loops: loops };
        for w in 0..vertex_count {
            if graph.self_loops[w] == 0 && graph.degree_pairs(w) == 0 {
                return Err(Error::InvalidPattern(format!("vertex {w} is isolated")));
            }
        }
        Ok(graph)
    }

    pub fn single_edge(multiplicity: u32) -> Result<Self> {
        Self::new(2, &[(0, 1, multiplicity)], &[])
    }

    pub fn triangle() -> Self {
        Self::complete(3).expect("triangle is valid")
    }

    pub fn path(v: usize) -> Result<Self> {
        if v < 2 {
            return Err(Error::InvalidPattern("path needs at least 2 vertices".into()));
        }
        let edges: Vec<_> = (0..v - 1).map(|i| (i, i + 1, 1)).collect();
        Self::new(v, &edges, &[])
    }

    pub fn cycle(v: usize) -> Result<Self> {
        if v < 3 {
            return Err(Error::InvalidPattern("cycle needs at least 3 vertices".into()));
        }
        let mut edges: Vec<_> = (0..v - 1).map(|i| (i, i + 1, 1)).collect();
        edges.push((0, v - 1, 1));
        Self::new(v, &edges, &[])
    }

    pub fn complete(v: usize) -> Result<Self> {
        Self::complete_multi(v, 1)
    }

    /// Complete graph on `v` vertices with `t` parallel edges per pair.
    pub fn complete_multi(v: usize, t: u32) -> Result<Self> {
        if v < 2 {
            return Err(Error::InvalidPattern("complete graph needs at least 2 vertices".into()));
        }
        let mut edges = Vec::new();
        for u in 0..v {
            for w in u + 1..v {
                edges.push((u, w, t));
            }
        }
        Self::new(v, &edges, &[])
    }

    /// Complete graph on `v` vertices with the pair `{0, 1}` removed.
    pub fn complete_minus_edge(v: usize) -> Result<Self> {
        if v < 3 {
            return Err(Error::InvalidPattern("complete_minus_edge needs at least 3 vertices".into()));
        }
        let mut edges = Vec::new();
        for u in 0..v {
            for w in u + 1..v {
                if (u, w) != (0, 1) {
                    edges.push((u, w, 1));
                }
            }
        }
        Self::new(v, &edges, &[])
    }

    /// Parse a named shortcut such as `triangle`, `cycle:4` or `complete_multi:3:2`.
    pub fn from_shortcut(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.trim().split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidPattern(format!("shortcut '{name}' needs a size")))?
                .parse::<usize>()
                .map_err(|_| Error::InvalidPattern(format!("bad number in shortcut '{name}'")))
        };
        let arity = |n: usize| -> Result<()> {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidPattern(format!("shortcut '{name}' has wrong arity")))
            }
        };
        match parts[0] {
            "triangle" => {
                arity(1)?;
                Ok(Self::triangle())
            }
            "cycle" => {
                arity(2)?;
                Self::cycle(num(1)?)
            }
            "complete" => {
                arity(2)?;
                Self::complete(num(1)?)
            }
            "path" => {
                arity(2)?;
                Self::path(num(1)?)
            }
            "complete_minus_edge" => {
                arity(2)?;
                Self::complete_minus_edge(num(1)?)
            }
            "complete_multi" => {
                arity(3)?;
                let t = u32::try_from(num(2)?)
                    .map_err(|_| Error::InvalidPattern("multiplicity too large".into()))?;
                if t == 0 {
                    return Err(Error::InvalidPattern("multiplicity must be positive".into()));
                }
                Self::complete_multi(num(1)?, t)
            }
            other => Err(Error::InvalidPattern(format!("unknown pattern shortcut '{other}'"))),
        }
    }

    /// Parse either a shortcut name or a JSON pattern object.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let json: PatternJson = serde_json::from_str(trimmed)?;
            json.try_into()
        } else {
            Self::from_shortcut(trimmed)
        }
    }

    pub fn to_json(&self) -> PatternJson {
        PatternJson {
            vertices: self.vertex_count,
            edges: self.edges().map(|(u, v, m)| [u, v, m as usize]).collect(),
            self_loops: self.loops().map(|(w, c)| [w, c as usize]).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.mult[u * self.vertex_count + v]
    }

    pub fn self_loops(&self, w: usize) -> u32 {
        self.self_loops[w]
    }

    /// Pairs `u < v` with positive multiplicity, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let v = self.vertex_count;
        (0..v)
            .flat_map(move |a| (a + 1..v).map(move |b| (a, b)))
            .filter_map(move |(a, b)| {
                let m = self.multiplicity(a, b);
                (m > 0).then_some((a, b, m))
            })
    }

    pub fn loops(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.self_loops.iter().enumerate().filter(|(_, &c)| c > 0).map(|(w, &c)| (w, c))
    }

    /// `e(G)`: edges between distinct vertices, counted with multiplicity.
    pub fn edge_count(&self) -> u32 {
        self.edges().map(|(_, _, m)| m).sum()
    }

    /// `f(G)`: number of pairs joined by at least one edge.
    pub fn pair_count(&self) -> u32 {
        self.edges().count() as u32
    }

    /// `t(G)`: largest pair multiplicity (0 for a loops-only pattern).
    pub fn max_multiplicity(&self) -> u32 {
        self.edges().map(|(_, _, m)| m).max().unwrap_or(0)
    }

    /// `e_i(G)`: number of pairs with multiplicity exactly `i`.
    pub fn pairs_with_multiplicity(&self, i: u32) -> u32 {
        self.edges().filter(|&(_, _, m)| m == i).count() as u32
    }

    /// `s(G)`: total number of self-loops.
    pub fn self_loop_count(&self) -> u32 {
        self.self_loops.iter().sum()
    }

    pub fn is_simple(&self) -> bool {
        self.max_multiplicity() <= 1 && self.self_loop_count() == 0
    }

    fn degree_pairs(&self, w: usize) -> usize {
        (0..self.vertex_count).filter(|&u| self.multiplicity(w, u) > 0).count()
    }

    /// The loop-free pattern with every multiplicity reduced to one.
    pub fn reduction(&self) -> PatternGraph {
        let mult = self.mult.iter().map(|&m| m.min(1)).collect();
        PatternGraph { vertex_count: self.vertex_count, mult, self_loops: vec![0; self.vertex_count] }
    }

    /// Relabel vertices: vertex `i` of `self` becomes vertex `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> PatternGraph {
        let v = self.vertex_count;
        assert_eq!(perm.len(), v, "permutation length must equal vertex count");
        let mut mult = vec![0; v * v];
        let mut loops = vec![0; v];
        for a in 0..v {
            loops[perm[a]] = self.self_loops[a];
            for b in 0..v {
                mult[perm[a] * v + perm[b]] = self.mult[a * v + b];
            }
        }
        PatternGraph { vertex_count: v, mult, self_loops: loops }
    }

    /// `a(G)`: number of vertex permutations preserving every multiplicity and loop count.
    pub fn automorphism_count(&self) -> u64 {
        let v = self.vertex_count;
        let signature: Vec<(u32, Vec<u32>)> = (0..v)
            .map(|w| {
                let mut row: Vec<u32> = (0..v).map(|u| self.multiplicity(w, u)).collect();
                row.sort_unstable();
                (self.self_loops[w], row)
            })
            .collect();
        let mut image = Vec::with_capacity(v);
        let mut used = vec![false; v];
        self.extend_automorphism(&signature, &mut image, &mut used)
    }

    fn extend_automorphism(
        &self,
        signature: &[(u32, Vec<u32>)],
        image: &mut Vec<usize>,
        used: &mut [bool],
    ) -> u64 {
        let k = image.len();
        if k == self.vertex_count {
            return 1;
        }
        let mut total = 0;
        for w in 0..self.vertex_count {
            if used[w] || signature[w] != signature[k] {
                continue;
            }
            let consistent =
                (0..k).all(|j| self.multiplicity(j, k) == self.multiplicity(image[j], w));
            if !consistent {
                continue;
            }
            used[w] = true;
            image.push(w);
            total += self.extend_automorphism(signature, image, used);
            image.pop();
            used[w] = false;
        }
        total
    }

    /// `rho(G) = v(G)! / a(G)`: distinct placements of the pattern on a labelled vertex set.
    pub fn rho(&self) -> u64 {
        factorial(self.vertex_count) / self.automorphism_count()
    }

    /// All distinct placements of the pattern on the vertex set `{0, .., v-1}`.
    ///
    /// There are exactly `rho(G)` of them; each is returned as the list of
    /// `(u, v, multiplicity)` pairs and `(w, loops)` entries it occupies.
    pub fn placements(&self) -> Vec<Placement> {
        let v = self.vertex_count;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..v).collect();
        loop {
            let image = self.relabel(&perm);
            if seen.insert((image.mult.clone(), image.self_loops.clone())) {
                out.push(Placement {
                    pairs: image.edges().collect(),
                    loops: image.loops().collect(),
                });
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        out
    }

    /// Exact balancedness constants of the loop-free part of the pattern.
    pub fn balancedness_profile(&self) -> Result<BalancednessProfile> {
        let e = self.edge_count();
        if e == 0 {
            return Err(Error::InvalidPattern(
                "balancedness is undefined for a pattern without edges".into(),
            ));
        }
        let v = self.vertex_count as i64;
        let simple = subgraph_extrema(self);
        let reduced = subgraph_extrema(&self.reduction());
        Ok(BalancednessProfile {
            density: Rational64::new(e as i64, v),
            pseudo_density: Rational64::new(self.pair_count() as i64, v),
            alpha: simple.alpha,
            gamma: simple.gamma,
            alpha_m: reduced.alpha,
            gamma_m: reduced.gamma,
            strictly_balanced: simple.strict,
            strictly_pseudo_balanced: reduced.strict,
        })
    }

    /// `kappa(G, i)` (simple variant) or `kappa_m(G, i)` (multi variant).
    pub fn kappa(&self, i: usize, variant: KappaVariant) -> Result<Rational64> {
        let v = self.vertex_count;
        if i < 1 || i + 1 > v {
            return Err(Error::OutOfRange(format!("kappa index {i} outside [1, {}]", v.saturating_sub(1))));
        }
        let profile = self.balancedness_profile()?;
        Ok(profile.kappa(self.edge_count(), v, i, variant))
    }
}

/// One placement of a pattern on a labelled vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub pairs: Vec<(usize, usize, u32)>,
    pub loops: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaVariant {
    Simple,
    Multi,
}

/// Exact densities and subgraph minima of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancednessProfile {
    #[serde(serialize_with = "ser_ratio")]
    pub density: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub pseudo_density: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub gamma: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha_m: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub gamma_m: Rational64,
    pub strictly_balanced: bool,
    pub strictly_pseudo_balanced: bool,
}

impl BalancednessProfile {
    /// `kappa` from precomputed constants; `edges` is `e(G)` and `vertices` is `v(G)`.
    pub fn kappa(&self, edges: u32, vertices: usize, i: usize, variant: KappaVariant) -> Rational64 {
        let e = Rational64::from_integer(edges as i64);
        let i_r = Rational64::from_integer(i as i64);
        let rest = Rational64::from_integer((vertices - i) as i64);
        let (density, alpha, gamma) = match variant {
            KappaVariant::Simple => (self.density, self.alpha, self.gamma),
            KappaVariant::Multi => (self.pseudo_density, self.alpha_m, self.gamma_m),
        };
        (e - i_r * density + gamma).max(rest * alpha)
    }
}

fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

struct Extrema {
    alpha: Rational64,
    gamma: Rational64,
    strict: bool,
}

/// Minima over admissible proper subgraphs of the loop-free part of `g`.
fn subgraph_extrema(g: &PatternGraph) -> Extrema {
    let v = g.vertex_count;
    let e = g.edge_count() as i64;
    let density = Rational64::new(e, v as i64);
    let full: u32 = (1u32 << v) - 1;
    let mut alpha: Option<Rational64> = None;
    let mut gamma: Option<Rational64> = None;
    let mut strict = true;

    for mask in 1..full {
        let size = mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let members: Vec<usize> = (0..v).filter(|&w| mask & (1 << w) != 0).collect();
        let mut edges_in = 0i64;
        let mut covered = true;
        for &a in &members {
            let mut deg = 0;
            for &b in &members {
                let m = g.multiplicity(a, b);
                if m > 0 {
                    deg += 1;
                    if a < b {
                        edges_in += m as i64;
                    }
                }
            }
            if deg == 0 {
                covered = false;
            }
        }
        if !covered || edges_in == 0 {
            continue;
        }
        let a = Rational64::new(e - edges_in, (v - size) as i64);
        let gm = density * Rational64::from_integer(size as i64) - Rational64::from_integer(edges_in);
        alpha = Some(alpha.map_or(a, |x| x.min(a)));
        gamma = Some(gamma.map_or(gm, |x| x.min(gm)));
        if edges_in * (v as i64) >= e * size as i64 {
            strict = false;
        }
    }

    // spanning proper subgraph: drop one unit of multiplicity without isolating a vertex
    let removable = g.edges().any(|(a, b, m)| m >= 2 || (g.degree_pairs(a) >= 2 && g.degree_pairs(b) >= 2));
    if removable {
        let one = Rational64::from_integer(1);
        gamma = Some(gamma.map_or(one, |x| x.min(one)));
    }

    match (alpha, gamma) {
        (Some(alpha), Some(gamma)) => Extrema { alpha, gamma, strict },
        (None, Some(gamma)) => {
            // only spanning subgraphs qualify; alpha falls back to the single-vertex subgraph
            Extrema { alpha: Rational64::new(e, v as i64 - 1), gamma, strict }
        }
        (alpha, None) => Extrema {
            alpha: alpha.unwrap_or_else(|| Rational64::new(e, v as i64 - 1)),
            gamma: density,
            strict,
        },
    }
}

/// JSON form of a pattern: `{"vertices": 3, "edges": [[0,1,2], ...], "self_loops": [[w, c], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub self_loops: Vec<[usize; 2]>,
}

impl TryFrom<PatternJson> for PatternGraph {
    type Error = Error;

    fn try_from(json: PatternJson) -> Result<Self> {
        let to_u32 = |x: usize| {
            u32::try_from(x).map_err(|_| Error::InvalidPattern(format!("count {x} too large")))
        };
        let edges = json
            .edges
            .iter()
            .map(|&[u, v, m]| {
                if u >= v {
                    return Err(Error::InvalidPattern(format!("edge [{u}, {v}, {m}] must have u < v")));
                }
                Ok((u, v, to_u32(m)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let loops = json
            .self_loops
            .iter()
            .map(|&[w, c]| Ok((w, to_u32(c)?)))
            .collect::<Result<Vec<_>>>()?;
        PatternGraph::new(json.vertices, &edges, &loops)
    }
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Advance `perm` to the next lexicographic permutation; false when it was the last.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn doubled_triangle() -> PatternGraph {
        PatternGraph::new(3, &[(0, 1, 2), (1, 2, 1), (0, 2, 1)], &[]).unwrap()
    }

    #[test]
    fn automorphisms_of_small_patterns() {
        assert_eq!(PatternGraph::triangle().automorphism_count(), 6);
        assert_eq!(doubled_triangle().automorphism_count(), 2);
        assert_eq!(PatternGraph::single_edge(1).unwrap().automorphism_count(), 2);
        assert_eq!(PatternGraph::cycle(5).unwrap().automorphism_count(), 10);
    }

    #[test]
    fn rho_values() {
        assert_eq!(PatternGraph::triangle().rho(), 1);
        assert_eq!(doubled_triangle().rho(), 3);
        assert_eq!(PatternGraph::path(3).unwrap().rho(), 3);
        assert_eq!(PatternGraph::cycle(4).unwrap().rho(), 3);
    }

    #[test]
    fn placements_match_rho() {
        for g in [
            PatternGraph::path(4).unwrap(),
            PatternGraph::cycle(5).unwrap(),
            doubled_triangle(),
            PatternGraph::new(3, &[(0, 1, 1), (1, 2, 1)], &[(1, 2)]).unwrap(),
        ] {
            assert_eq!(g.placements().len() as u64, g.rho(), "{g:?}");
        }
    }

    #[test]
    fn table_rows() {
        let c4 = PatternGraph::cycle(4).unwrap().balancedness_profile().unwrap();
        assert_eq!((c4.density, c4.alpha, c4.gamma), (r(1, 1), r(3, 2), r(1, 1)));
        assert!(c4.strictly_balanced);

        let k4 = PatternGraph::complete(4).unwrap().balancedness_profile().unwrap();
        assert_eq!((k4.density, k4.alpha, k4.gamma), (r(3, 2), r(5, 2), r(1, 1)));

        let p3 = PatternGraph::path(3).unwrap().balancedness_profile().unwrap();
        assert_eq!((p3.density, p3.alpha, p3.gamma), (r(2, 3), r(1, 1), r(1, 3)));
    }

    #[test]
    fn doubled_triangle_multi_profile() {
        let p = doubled_triangle().balancedness_profile().unwrap();
        assert_eq!(p.pseudo_density, r(1, 1));
        assert_eq!(p.alpha_m, r(2, 1));
        assert_eq!(p.gamma_m, r(1, 1));
        assert!(p.strictly_pseudo_balanced);
        assert_eq!(p.density, r(4, 3));
    }

    #[test]
    fn kappa_examples() {
        let t = PatternGraph::triangle();
        assert_eq!(t.kappa(2, KappaVariant::Simple).unwrap(), r(2, 1));
        assert_eq!(t.kappa(1, KappaVariant::Simple).unwrap(), r(4, 1));
        assert_eq!(doubled_triangle().kappa(2, KappaVariant::Multi).unwrap(), r(3, 1));
        assert!(t.kappa(0, KappaVariant::Simple).is_err());
        assert!(t.kappa(3, KappaVariant::Simple).is_err());
    }

    #[test]
    fn two_vertex_patterns_use_single_vertex_fallback() {
        let g = PatternGraph::single_edge(3).unwrap();
        let p = g.balancedness_profile().unwrap();
        assert_eq!(p.alpha, r(3, 1));
        // the spanning subgraph with multiplicity 2 qualifies
        assert_eq!(p.gamma, r(1, 1));
        assert_eq!(p.gamma_m, r(1, 2));
        assert!(p.strictly_balanced && p.strictly_pseudo_balanced);
        assert_eq!(g.kappa(1, KappaVariant::Multi).unwrap(), r(3, 1));
        assert_eq!(g.kappa(1, KappaVariant::Simple).unwrap(), r(3, 1));
    }

    #[test]
    fn rejects_malformed_patterns() {
        assert!(PatternGraph::new(3, &[(0, 1, 1)], &[]).is_err());
        assert!(PatternGraph::new(2, &[(0, 1, 1), (1, 0, 1)], &[]).is_err());
        assert!(PatternGraph::new(2, &[(0, 0, 1)], &[]).is_err());
        assert!(PatternGraph::new(2, &[(0, 2, 1)], &[]).is_err());
        assert!(PatternGraph::new(0, &[], &[]).is_err());
        let loops_only = PatternGraph::new(1, &[], &[(0, 2)]).unwrap();
        assert!(loops_only.balancedness_profile().is_err());
    }

    #[test]
    fn shortcuts_and_json() {
        assert_eq!(PatternGraph::parse("complete:3").unwrap(), PatternGraph::parse("cycle:3").unwrap());
        assert_eq!(PatternGraph::parse("triangle").unwrap(), PatternGraph::triangle());
        let m = PatternGraph::parse("complete_multi:3:2").unwrap();
        assert_eq!((m.edge_count(), m.pair_count(), m.max_multiplicity()), (6, 3, 2));
        let json = r#"{"vertices": 3, "edges": [[0,1,2],[1,2,1],[0,2,1]]}"#;
        assert_eq!(PatternGraph::parse(json).unwrap(), doubled_triangle());
        let with_loops = r#"{"vertices": 2, "edges": [[0,1,1]], "self_loops": [[1, 2]]}"#;
        let g = PatternGraph::parse(with_loops).unwrap();
        assert_eq!(g.self_loop_count(), 2);
        let back = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(PatternGraph::parse(&back).unwrap(), g);
        assert!(PatternGraph::parse("cycle:2").is_err());
        assert!(PatternGraph::parse("wheel:5").is_err());
        assert!(PatternGraph::parse(r#"{"vertices": 2, "edges": [[1,0,1]]}"#).is_err());
    }

    #[test]
    fn derived_counts() {
        let g = PatternGraph::new(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 3)], &[(0, 1), (3, 2)]).unwrap();
        assert_eq!(g.edge_count(), 7);
        assert_eq!(g.pair_count(), 3);
        assert_eq!(g.max_multiplicity(), 3);
        assert_eq!(g.pairs_with_multiplicity(3), 2);
        assert_eq!(g.pairs_with_multiplicity(2), 0);
        assert_eq!(g.self_loop_count(), 3);
        assert!(!g.is_simple());
    }
}
