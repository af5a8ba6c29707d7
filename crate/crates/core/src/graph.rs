//! Observed pseudo-graphs and their edge-list text format.
//!
//! The text format has one line `u v count` per vertex pair with a positive
//! count and `u u count` for self-loops. Header comment lines carry the vertex
//! count and, when known, the class labels:
//!
//! ```text
//! # n 3
//! # classes 0 1 0
//! 0 1 1
//! 1 2 3
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// An undirected multigraph with self-loop counts on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedMultigraph {
    n: usize,
    /// Packed upper triangle, pair `(u, v)` with `u < v`.
    counts: Vec<u32>,
    loops: Vec<u32>,
    classes: Option<Vec<usize>>,
}

impl ObservedMultigraph {
    pub fn empty(n: usize) -> Self {
        ObservedMultigraph {
            n,
            counts: vec![0; n * n.saturating_sub(1) / 2],
            loops: vec![0; n],
            classes: None,
        }
    }

    /// Build from `(u, v, count)` entries; `u == v` entries are self-loops.
    pub fn from_edges(n: usize, entries: &[(usize, usize, u32)]) -> Result<Self> {
        let mut g = Self::empty(n);
        let mut seen = std::collections::HashSet::new();
        for &(u, v, c) in entries {
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("pair ({u}, {v}) appears twice")));
            }
            g.set(u, v, c)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < v && v < self.n);
        u * self.n - u * (u + 1) / 2 + (v - u - 1)
    }

    /// Edge count between `u` and `v`; the self-loop count when `u == v`.
    #[inline]
    pub fn count(&self, u: usize, v: usize) -> u32 {
        use std::cmp::Ordering::*;
        match u.cmp(&v) {
            Less => self.counts[self.index(u, v)],
            Greater => self.counts[self.index(v, u)],
            Equal => self.loops[u],
        }
    }

    pub fn set(&mut self, u: usize, v: usize, count: u32) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidGraph(format!("pair ({u}, {v}) out of range for n={}", self.n)));
        }
        if u == v {
            self.loops[u] = count;
        } else {
            let i = self.index(u.min(v), u.max(v));
            self.counts[i] = count;
        }
        Ok(())
    }

    pub fn self_loops(&self, w: usize) -> u32 {
        self.loops[w]
    }

    pub fn classes(&self) -> Option<&[usize]> {
        self.classes.as_deref()
    }

    pub fn set_classes(&mut self, classes: Vec<usize>) -> Result<()> {
        if classes.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "{} class labels for {} vertices",
                classes.len(),
                self.n
            )));
        }
        self.classes = Some(classes);
        Ok(())
    }

    /// Pairs and loops with positive counts, loops reported as `(w, w, c)`.
    pub fn entries(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            if self.loops[u] > 0 {
                out.push((u, u, self.loops[u]));
            }
            for v in u + 1..self.n {
                let c = self.count(u, v);
                if c > 0 {
                    out.push((u, v, c));
                }
            }
        }
        out
    }

    /// Total number of edges between distinct vertices.
    pub fn edge_total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# n {}", self.n).unwrap();
        if let Some(classes) = &self.classes {
            s.push_str("# classes");
            for c in classes {
                write!(s, " {c}").unwrap();
            }
            s.push('\n');
        }
        for (u, v, c) in self.entries() {
            writeln!(s, "{u} {v} {c}").unwrap();
        }
        s
    }

    /// Parse the edge-list format. Without an `# n` header the vertex count is
    /// inferred from the largest index (or the class list length).
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut classes: Option<Vec<usize>> = None;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidGraph(format!("line {}: {what}", lineno + 1));
            if let Some(comment) = line.strip_prefix('#') {
                let mut tokens = comment.split_whitespace();
                match tokens.next() {
                    Some("n") => {
                        let value = tokens.next().ok_or_else(|| bad("missing vertex count"))?;
                        n = Some(value.parse().map_err(|_| bad("bad vertex count"))?);
                    }
                    Some("classes") => {
                        let labels = tokens
                            .map(|t| t.parse::<usize>().map_err(|_| bad("bad class label")))
                            .collect::<Result<Vec<_>>>()?;
                        classes = Some(labels);
                    }
                    _ => {}
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad("expected 'u v count'"));
            }
            let u: usize = fields[0].parse().map_err(|_| bad("bad vertex"))?;
            let v: usize = fields[1].parse().map_err(|_| bad("bad vertex"))?;
            let c: u32 = fields[2].parse().map_err(|_| bad("bad count"))?;
            entries.push((u, v, c));
        }
        let inferred = entries
            .iter()
            .map(|&(u, v, _)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
            .max(classes.as_ref().map_or(0, Vec::len));
        let n = n.unwrap_or(inferred);
        let mut g = Self::from_edges(n, &entries)?;
        if let Some(c) = classes {
            g.set_classes(c)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing_is_symmetric() {
        let mut g = ObservedMultigraph::empty(5);
        g.set(3, 1, 4).unwrap();
        g.set(0, 4, 2).unwrap();
        g.set(2, 2, 7).unwrap();
        assert_eq!(g.count(1, 3), 4);
        assert_eq!(g.count(3, 1), 4);
        assert_eq!(g.count(4, 0), 2);
        assert_eq!(g.self_loops(2), 7);
        assert_eq!(g.count(0, 1), 0);
        assert_eq!(g.edge_total(), 6);
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = ObservedMultigraph::from_edges(4, &[(0, 1, 1), (1, 2, 3), (3, 3, 2)]).unwrap();
        g.set_classes(vec![0, 1, 1, 0]).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with("# n 4\n# classes 0 1 1 0\n"));
        assert_eq!(ObservedMultigraph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn parse_infers_size_and_rejects_duplicates() {
        let g = ObservedMultigraph::parse_edge_list("0 1 1\n1 2 3\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(ObservedMultigraph::parse_edge_list("0 1 1\n1 0 2\n").is_err());
        assert!(ObservedMultigraph::parse_edge_list("0 1\n").is_err());
        assert!(ObservedMultigraph::parse_edge_list("# n 2\n0 5 1\n").is_err());
    }
}
