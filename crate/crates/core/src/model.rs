//! The stochastic block multigraph model, its degree-corrected variant and the
//! self-loop extension.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::edge_dist::EdgeCountDistribution;
use crate::error::{Error, Result};
use crate::graph::ObservedMultigraph;
use crate::pattern::PatternGraph;
use crate::seed::{substream, Domain};

/// Tolerance on the total of the class weights.
pub const CLASS_WEIGHT_TOLERANCE: f64 = 1e-12;

/// Full model description.
///
/// JSON: `{"n":…, "Q":…, "f":[…], "edge_laws":[[law,…],…], "degree_weights":[…]?, "self_loop_laws":[…]?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmmSpec {
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    pub f: Vec<f64>,
    pub edge_laws: Vec<Vec<EdgeCountDistribution>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_loop_laws: Option<Vec<EdgeCountDistribution>>,
}

impl SbmmSpec {
    pub fn new(n: usize, f: Vec<f64>, edge_laws: Vec<Vec<EdgeCountDistribution>>) -> Result<Self> {
        let spec = SbmmSpec {
            n,
            q: f.len(),
            f,
            edge_laws,
            degree_weights: None,
            self_loop_laws: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// One class with the same law on every pair.
    pub fn homogeneous(n: usize, law: EdgeCountDistribution) -> Result<Self> {
        Self::new(n, vec![1.0], vec![vec![law]])
    }

    pub fn with_degree_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.degree_weights = Some(weights);
        self.validate()?;
        Ok(self)
    }

    pub fn with_self_loops(mut self, laws: Vec<EdgeCountDistribution>) -> Result<Self> {
        self.self_loop_laws = Some(laws);
        self.validate()?;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SbmmSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q;
        if q == 0 {
            return Err(Error::InvalidModel("Q must be positive".into()));
        }
        if self.f.len() != q {
            return Err(Error::InvalidModel(format!("f has {} entries, Q = {q}", self.f.len())));
        }
        if self.f.iter().any(|&x| !x.is_finite() || x <= 0.0) {
            return Err(Error::InvalidModel("class weights must be positive".into()));
        }
        let total: f64 = self.f.iter().sum();
        if (total - 1.0).abs() > CLASS_WEIGHT_TOLERANCE {
            return Err(Error::InvalidModel(format!("class weights sum to {total}, expected 1")));
        }
        if self.edge_laws.len() != q || self.edge_laws.iter().any(|row| row.len() != q) {
            return Err(Error::InvalidModel(format!("edge_laws must be a {q}x{q} matrix")));
        }
        for a in 0..q {
            for b in 0..q {
                self.edge_laws[a][b].validate()?;
                if self.edge_laws[a][b] != self.edge_laws[b][a] {
                    return Err(Error::InvalidModel(format!("edge law ({a},{b}) differs from ({b},{a})")));
                }
            }
        }
        if let Some(w) = &self.degree_weights {
            if w.len() != self.n {
                return Err(Error::InvalidModel(format!(
                    "{} degree weights for n = {}",
                    w.len(),
                    self.n
                )));
            }
            if w.iter().any(|&x| !x.is_finite() || x <= 0.0) {
                return Err(Error::InvalidModel("degree weights must be positive".into()));
            }
            if self.edge_laws.iter().flatten().any(|l| l.is_poisson().is_none()) {
                return Err(Error::InvalidModel(
                    "degree correction requires Poisson edge laws".into(),
                ));
            }
        }
        if let Some(laws) = &self.self_loop_laws {
            if laws.len() != q {
                return Err(Error::InvalidModel(format!("{} self-loop laws for Q = {q}", laws.len())));
            }
            for l in laws {
                l.validate()?;
            }
        }
        Ok(())
    }

    pub fn edge_law(&self, a: usize, b: usize) -> &EdgeCountDistribution {
        &self.edge_laws[a][b]
    }

    pub fn is_degree_corrected(&self) -> bool {
        self.degree_weights.is_some()
    }

    /// Self-loop law of class `a`; the point mass at zero when the model has none.
    pub fn self_loop_law(&self, a: usize) -> Option<&EdgeCountDistribution> {
        self.self_loop_laws.as_ref().map(|l| &l[a])
    }

    /// Iterator over all class pairs `(a, b)` with `a <= b`.
    fn class_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.q).flat_map(move |a| (a..self.q).map(move |b| (a, b)))
    }

    fn max_over_pairs<F: Fn(&EdgeCountDistribution) -> f64>(&self, g: F) -> f64 {
        self.class_pairs().map(|(a, b)| g(self.edge_law(a, b))).fold(0.0, f64::max)
    }

    /// Largest Poisson rate, when every edge law is Poisson.
    pub fn omega_star(&self) -> Option<f64> {
        let rates: Option<Vec<f64>> = self.edge_laws.iter().flatten().map(|l| l.is_poisson()).collect();
        rates.map(|r| r.into_iter().fold(0.0, f64::max))
    }

    /// Maxima of the edge-law functionals that enter the bounds, for a given pattern.
    pub fn extrema(&self, pattern: &PatternGraph) -> ModelExtrema {
        let t = pattern.max_multiplicity().max(1) as usize;
        let mu1_star = self.max_over_pairs(|l| l.mean());
        let mu_star: Vec<f64> = (1..=2 * t).map(|k| self.max_over_pairs(|l| l.moment(k))).collect();
        let mu_dstar: Vec<f64> =
            (1..=t).map(|k| self.max_over_pairs(|l| l.binomial_moment(k))).collect();
        let psi = mu_dstar.iter().copied().fold(2.0 * mu_star[2 * t - 1], f64::max);
        let phi_star = self
            .self_loop_laws
            .as_ref()
            .map(|laws| laws.iter().map(|l| l.mean()).fold(0.0, f64::max));
        let q2_star = self.max_over_pairs(|l| l.tail(2));
        let omega_star = self.omega_star();
        let inhom_max = match (&self.degree_weights, omega_star) {
            (Some(w), Some(omega)) => top_two_product(w) * omega,
            _ => mu1_star,
        };
        ModelExtrema { mu1_star, mu_star, mu_dstar, psi, phi_star, q2_star, omega_star, inhom_max }
    }

    /// Draw one multigraph. Deterministic in `(self, seed)`.
    pub fn sample(&self, seed: u64) -> ObservedMultigraph {
        let n = self.n;
        let classes: Vec<usize> = (0..n as u64)
            .map(|i| {
                let u: f64 = substream(seed, Domain::Class, i, 0).random();
                let mut acc = 0.0;
                for (c, &w) in self.f.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return c;
                    }
                }
                self.q - 1
            })
            .collect();
        let mut g = ObservedMultigraph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                let law = self.edge_law(classes[i], classes[j]);
                let mut rng = substream(seed, Domain::Edge, i as u64, j as u64);
                let y = match (&self.degree_weights, law) {
                    (Some(w), EdgeCountDistribution::Poisson { omega }) => {
                        EdgeCountDistribution::Poisson { omega: w[i] * w[j] * omega }.sample(&mut rng)
                    }
                    _ => law.sample(&mut rng),
                };
                g.set(i, j, saturate(y)).expect("indices in range");
            }
            if let Some(law) = self.self_loop_law(classes[i]) {
                let mut rng = substream(seed, Domain::SelfLoop, i as u64, i as u64);
                g.set(i, i, saturate(law.sample(&mut rng))).expect("index in range");
            }
        }
        g.set_classes(classes).expect("one label per vertex");
        g
    }
}

fn saturate(y: u64) -> u32 {
    u32::try_from(y).unwrap_or(u32::MAX)
}

/// Product of the two largest entries (over distinct indices).
fn top_two_product(w: &[f64]) -> f64 {
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for &x in w {
        if x > first {
            second = first;
            first = x;
        } else if x > second {
            second = x;
        }
    }
    first * second
}

/// Extremal moments of the edge laws used by the bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelExtrema {
    /// `max_{a,b} E Y_{a,b}`.
    pub mu1_star: f64,
    /// `max_{a,b} E[Y^k]` for `k = 1..=2t`.
    pub mu_star: Vec<f64>,
    /// `max_{a,b} E[C(Y, k)]` for `k = 1..=t`.
    pub mu_dstar: Vec<f64>,
    pub psi: f64,
    pub phi_star: Option<f64>,
    /// `max_{a,b} P(Y_{a,b} >= 2)`.
    pub q2_star: f64,
    pub omega_star: Option<f64>,
    /// Largest per-pair mean over vertex pairs; `mu1_star` without degree correction.
    pub inhom_max: f64,
}
