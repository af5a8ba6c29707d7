//! Empirical checks of the approximations: the exact law of `W` on tiny
//! models, its Monte Carlo law on larger ones, and total-variation distances to
//! the approximating laws.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{tv_bound, BoundOptions, BoundReport, BoundVariant};
use crate::counting::Counter;
use crate::cp::{cp_pmf, expected_count, lambda_params, CompoundPoissonParams, DEFAULT_EPS};
use crate::edge_dist::EdgeCountDistribution;
use crate::error::{Error, Result};
use crate::graph::ObservedMultigraph;
use crate::model::{ModelExtrema, SbmmSpec};
use crate::pattern::{BalancednessProfile, PatternGraph, PatternJson};
use crate::seed::{substream_seed, Domain};

/// Largest number of (class assignment, configuration) pairs the exact law will visit.
pub const EXACT_ENUMERATION_LIMIT: f64 = 1e8;

/// Mass below which an atom of the approximating law is ignored when counting atoms.
const ATOM_MASS_FLOOR: f64 = 1e-12;

/// Target pmfs are extended until their remaining mass is below this.
const TARGET_TAIL_TOLERANCE: f64 = 1e-14;

/// Hard cap on the length of a target pmf.
const TARGET_MAX_LEN: usize = 10_000_000;

/// Sparse pmf over copy counts.
pub type Pmf = BTreeMap<u64, f64>;

/// Exact law of `W` by enumerating every class assignment and edge configuration.
pub fn exact_count_pmf(spec: &SbmmSpec, pattern: &PatternGraph) -> Result<Pmf> {
    if spec.is_degree_corrected() {
        return Err(Error::Hypothesis("exact enumeration needs a model without degree correction".into()));
    }
    let n = spec.n;
    let categorical = |law: &EdgeCountDistribution| match law {
        EdgeCountDistribution::Categorical { p } => Ok(p.clone()),
        _ => Err(Error::InvalidModel("exact enumeration needs categorical laws".into())),
    };
    let pair_pmfs: Vec<Vec<Vec<f64>>> = spec
        .edge_laws
        .iter()
        .map(|row| row.iter().map(categorical).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let loop_pmfs: Option<Vec<Vec<f64>>> = match &spec.self_loop_laws {
        Some(laws) => Some(laws.iter().map(categorical).collect::<Result<_>>()?),
        None => None,
    };

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let radix = pair_pmfs.iter().flatten().map(Vec::len).max().unwrap_or(1) as f64;
    let loop_radix = loop_pmfs.as_ref().map_or(1.0, |l| l.iter().map(Vec::len).max().unwrap_or(1) as f64);
    let size = (spec.q as f64).powi(n as i32) * radix.powi(pairs.len() as i32) * loop_radix.powi(n as i32);
    if size > EXACT_ENUMERATION_LIMIT {
        return Err(Error::Infeasible { what: "exact law of W", size, limit: EXACT_ENUMERATION_LIMIT });
    }

    let counter = Counter::new(pattern);
    let total: u64 = (spec.q as u64).pow(n as u32);
    let parts: Vec<Result<Pmf>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut classes = vec![0; n];
            for c in classes.iter_mut() {
                *c = (idx % spec.q as u64) as usize;
                idx /= spec.q as u64;
            }
            let weight: f64 = classes.iter().map(|&c| spec.f[c]).product();
            let mut slots: Vec<(usize, usize, &[f64])> =
                pairs.iter().map(|&(i, j)| (i, j, pair_pmfs[classes[i]][classes[j]].as_slice())).collect();
            if let Some(lp) = &loop_pmfs {
                slots.extend((0..n).map(|w| (w, w, lp[classes[w]].as_slice())));
            }
            let mut graph = ObservedMultigraph::empty(n);
            let mut out = Pmf::new();
            enumerate_configs(&counter, &slots, 0, weight, &mut graph, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut pmf = Pmf::new();
    for part in parts {
        for (w, p) in part? {
            *pmf.entry(w).or_insert(0.0) += p;
        }
    }
    Ok(pmf)
}

fn enumerate_configs(
    counter: &Counter,
    slots: &[(usize, usize, &[f64])],
    depth: usize,
    weight: f64,
    graph: &mut ObservedMultigraph,
    out: &mut Pmf,
) -> Result<()> {
    if depth == slots.len() {
        let w = counter.count_u64(graph)?;
        *out.entry(w).or_insert(0.0) += weight;
        return Ok(());
    }
    let (i, j, pmf) = slots[depth];
    for (k, &p) in pmf.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        graph.set(i, j, k as u32)?;
        enumerate_configs(counter, slots, depth + 1, weight * p, graph, out)?;
    }
    graph.set(i, j, 0)
}

/// Monte Carlo law of `W`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloPmf {
    pub reps: u64,
    /// Exact replicate counts per observed value of `W`.
    pub histogram: BTreeMap<u64, u64>,
}

impl MonteCarloPmf {
    pub fn pmf(&self) -> Pmf {
        self.histogram.iter().map(|(&w, &c)| (w, c as f64 / self.reps as f64)).collect()
    }
}

/// `reps` independent samples of `W`; replicate `r` draws its graph from the
/// substream keyed by `(seed, r)`, so the result does not depend on scheduling.
pub fn monte_carlo_pmf(spec: &SbmmSpec, pattern: &PatternGraph, reps: u64, seed: u64) -> Result<MonteCarloPmf> {
    if reps == 0 {
        return Err(Error::OutOfRange("reps must be positive".into()));
    }
    let counter = Counter::new(pattern);
    let histogram = (0..reps)
        .into_par_iter()
        .map(|r| {
            let graph = spec.sample(substream_seed(seed, Domain::Replicate, r, 0));
            counter.count_u64(&graph).map(|w| BTreeMap::from([(w, 1u64)]))
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (w, c) in b {
                *a.entry(w).or_insert(0) += c;
            }
            Ok(a)
        })?;
    Ok(MonteCarloPmf { reps, histogram })
}

/// Total-variation distance between two sub-probability pmfs; any missing
/// mass is treated as sitting on a common extra atom.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    let check = |m: &Pmf| -> Result<f64> {
        if m.values().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::OutOfRange("pmf has negative or NaN mass".into()));
        }
        let total: f64 = m.values().sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::OutOfRange(format!("pmf has total mass {total} > 1")));
        }
        Ok(total)
    };
    let tp = check(p)?;
    let tq = check(q)?;
    let mut sum = 0.0;
    for (k, &a) in p {
        sum += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &b) in q {
        if !p.contains_key(k) {
            sum += b;
        }
    }
    let deficit = ((1.0 - tp).max(0.0) - (1.0 - tq).max(0.0)).abs();
    Ok((0.5 * (sum + deficit)).min(1.0))
}

/// Dense pmf of the approximating law, long enough to cover `min_len` points
/// and all but `TARGET_TAIL_TOLERANCE` of its mass.
fn target_pmf(params: &CompoundPoissonParams, min_len: usize) -> Vec<f64> {
    let mut len = min_len.max(params.imax + 1).max((4.0 * params.mean()) as usize + 64);
    loop {
        let pmf = cp_pmf(params, len - 1);
        let mass: f64 = pmf.iter().sum();
        if mass >= 1.0 - TARGET_TAIL_TOLERANCE || len >= TARGET_MAX_LEN {
            return pmf;
        }
        len = (len * 2).min(TARGET_MAX_LEN);
    }
}

fn sparse(pmf: &[f64]) -> Pmf {
    pmf.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(k, &p)| (k as u64, p)).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

/// Experiment description; `pattern` is a shortcut string or a pattern object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: SbmmSpec,
    pub pattern: serde_json::Value,
    pub variant: BoundVariant,
    pub mode: Mode,
    #[serde(default)]
    pub reps: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub c_override: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.spec.validate()?;
        Ok(cfg)
    }

    pub fn pattern(&self) -> Result<PatternGraph> {
        match &self.pattern {
            serde_json::Value::String(s) => PatternGraph::from_shortcut(s),
            other => {
                let json: PatternJson = serde_json::from_value(other.clone())?;
                json.try_into()
            }
        }
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub pattern: PatternJson,
    pub profile: BalancednessProfile,
    pub extrema: ModelExtrema,
    pub nu: f64,
    pub lambda: CompoundPoissonParams,
    /// `compound_poisson` or `poisson`.
    pub target: &'static str,
    /// Pmf of the approximating law on `0..len`.
    pub target_pmf: Vec<f64>,
    pub bound: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    pub seed: u64,
    /// Exact or empirical pmf of `W`.
    pub observed_pmf: Pmf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<BTreeMap<u64, u64>>,
    pub tv_distance: f64,
    /// Allowance for Monte Carlo noise added to the bound; zero in exact mode.
    pub mc_allowance: f64,
    /// gcd of the observed values of `W` (0 when only `W = 0` occurs).
    pub support_gcd: u64,
    /// gcd of the clump sizes with positive `lambda`.
    pub lambda_support_gcd: u64,
    /// Every observed value is a multiple of `lambda_support_gcd`.
    pub support_consistent: bool,
    /// `tv_distance <= bound.value + mc_allowance`.
    pub pass: bool,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let spec = &config.spec;
    let pattern = config.pattern()?;
    if spec.is_degree_corrected() {
        return Err(Error::Hypothesis(
            "experiments need a model without degree correction (no computable lambda)".into(),
        ));
    }
    let opts = BoundOptions { c_override: config.c_override, eps: config.eps, regime: None };
    let bound = tv_bound(spec, &pattern, config.variant, &opts)?;
    let nu = expected_count(spec, &pattern)?;
    let lambda = lambda_params(spec, &pattern, config.eps)?;

    let (observed, histogram, reps) = match config.mode {
        Mode::Exact => (exact_count_pmf(spec, &pattern)?, None, None),
        Mode::MonteCarlo => {
            let reps = config.reps.ok_or_else(|| Error::OutOfRange("monte_carlo mode needs reps".into()))?;
            let mc = monte_carlo_pmf(spec, &pattern, reps, config.seed)?;
            (mc.pmf(), Some(mc.histogram), Some(reps))
        }
    };
    let target_params = if config.variant.targets_poisson() {
        CompoundPoissonParams::from_lambda(vec![nu])?
    } else {
        lambda.clone()
    };
    let max_seen = observed.keys().next_back().copied().unwrap_or(0) as usize;
    let target_pmf = target_pmf(&target_params, max_seen + 1);
    let target_sparse = sparse(&target_pmf);
    let tv = tv_distance(&observed, &target_sparse)?;

    let mc_allowance = match reps {
        Some(r) => {
            let atoms = observed
                .keys()
                .chain(target_sparse.iter().filter(|(_, &p)| p >= ATOM_MASS_FLOOR).map(|(k, _)| k))
                .collect::<std::collections::BTreeSet<_>>()
                .len();
            (atoms as f64 / (4.0 * r as f64)).sqrt()
        }
        None => 0.0,
    };
    let support_gcd = observed.iter().filter(|(_, &p)| p > 0.0).fold(0, |g, (&w, _)| gcd(g, w));
    let lambda_support_gcd = target_params.support_gcd() as u64;
    let support_consistent = lambda_support_gcd == 0 || support_gcd % lambda_support_gcd == 0;
    let pass = tv <= bound.value + mc_allowance;

    Ok(ExperimentReport {
        mode: config.mode,
        pattern: pattern.to_json(),
        profile: pattern.balancedness_profile()?,
        extrema: spec.extrema(&pattern),
        nu,
        lambda,
        target: bound.target,
        target_pmf,
        bound,
        reps,
        seed: config.seed,
        observed_pmf: observed,
        histogram,
        tv_distance: tv,
        mc_allowance,
        support_gcd,
        lambda_support_gcd,
        support_consistent,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn er(n: usize, p: f64) -> SbmmSpec {
        SbmmSpec::homogeneous(n, EdgeCountDistribution::bernoulli(p).unwrap()).unwrap()
    }

    fn doubled(n: usize, p: f64) -> SbmmSpec {
        SbmmSpec::homogeneous(n, EdgeCountDistribution::categorical(vec![1.0 - p, 0.0, p]).unwrap()).unwrap()
    }

    #[test]
    fn exact_single_triangle() {
        let p: f64 = 0.3;
        let pmf = exact_count_pmf(&er(3, p), &PatternGraph::triangle()).unwrap();
        assert_eq!(pmf.len(), 2);
        assert_relative_eq!(pmf[&1], p.powi(3), max_relative = 1e-14);
        assert_relative_eq!(pmf[&0], 1.0 - p.powi(3), max_relative = 1e-14);
        let pmf = exact_count_pmf(&doubled(3, p), &PatternGraph::triangle()).unwrap();
        assert_eq!(pmf.keys().copied().collect::<Vec<_>>(), vec![0, 8]);
        assert_relative_eq!(pmf[&8], p.powi(3), max_relative = 1e-14);
    }

    #[test]
    fn exact_mass_and_limits() {
        let spec = SbmmSpec::new(
            4,
            vec![0.5, 0.5],
            vec![
                vec![EdgeCountDistribution::bernoulli(0.3).unwrap(), EdgeCountDistribution::bernoulli(0.6).unwrap()],
                vec![EdgeCountDistribution::bernoulli(0.6).unwrap(), EdgeCountDistribution::bernoulli(0.1).unwrap()],
            ],
        )
        .unwrap();
        let pmf = exact_count_pmf(&spec, &PatternGraph::triangle()).unwrap();
        assert!((pmf.values().sum::<f64>() - 1.0).abs() < 1e-10);
        let mean: f64 = pmf.iter().map(|(&w, &p)| w as f64 * p).sum();
        assert_relative_eq!(mean, expected_count(&spec, &PatternGraph::triangle()).unwrap(), max_relative = 1e-12);
        assert!(matches!(exact_count_pmf(&er(12, 0.1), &PatternGraph::triangle()), Err(Error::Infeasible { .. })));
        let po = SbmmSpec::homogeneous(4, EdgeCountDistribution::poisson(0.1).unwrap()).unwrap();
        assert!(exact_count_pmf(&po, &PatternGraph::triangle()).is_err());
    }

    #[test]
    fn monte_carlo_basics() {
        let tri = PatternGraph::triangle();
        let one = monte_carlo_pmf(&er(8, 0.5), &tri, 1, 3).unwrap();
        assert_eq!(one.histogram.len(), 1);
        let zero = SbmmSpec::homogeneous(8, EdgeCountDistribution::zero()).unwrap();
        let mc = monte_carlo_pmf(&zero, &tri, 100, 3).unwrap();
        assert_eq!(mc.histogram, BTreeMap::from([(0, 100)]));
        let a = monte_carlo_pmf(&er(8, 0.3), &tri, 500, 11).unwrap();
        let b = monte_carlo_pmf(&er(8, 0.3), &tri, 500, 11).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_pmf(&zero, &tri, 0, 1).is_err());
    }

    #[test]
    fn tv_examples() {
        let p = Pmf::from([(0, 0.2), (1, 0.8)]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        let a = Pmf::from([(0, 1.0)]);
        let b = Pmf::from([(1, 1.0)]);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        // deficits sit on a shared sink
        let c = Pmf::from([(0, 0.5)]);
        let d = Pmf::from([(0, 0.25)]);
        assert_relative_eq!(tv_distance(&c, &d).unwrap(), 0.25);
        assert!(tv_distance(&Pmf::from([(0, -0.1)]), &a).is_err());
        let po = sparse(&cp_pmf(&CompoundPoissonParams::from_lambda(vec![1.0]).unwrap(), 50));
        let law = EdgeCountDistribution::poisson(1.0).unwrap();
        let po2 = sparse(&(0..=50).map(|k| law.pmf(k)).collect::<Vec<_>>());
        assert!(tv_distance(&po, &po2).unwrap() < 1e-12);
    }

    #[test]
    fn experiment_config_and_report() {
        let text = r#"{"spec": {"n": 4, "Q": 1, "f": [1.0], "edge_laws": [[{"type":"categorical","p":[0.7,0.3]}]]},
            "pattern": "triangle", "variant": "thm31_simple", "mode": "exact"}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let report = run_experiment(&cfg).unwrap();
        assert!(report.pass);
        assert!(report.tv_distance >= 0.0);
        assert_eq!(report.mc_allowance, 0.0);
        let json = crate::format::to_json(&report).unwrap();
        assert_eq!(json, crate::format::to_json(&run_experiment(&cfg).unwrap()).unwrap());
        let obj = r#"{"spec": {"n": 4, "Q": 1, "f": [1.0], "edge_laws": [[{"type":"categorical","p":[1.0]}]]},
            "pattern": {"vertices": 3, "edges": [[0,1,1],[1,2,1],[0,2,1]]}, "variant": "thm41_multi", "mode": "exact"}"#;
        let report = run_experiment(&ExperimentConfig::from_json(obj).unwrap()).unwrap();
        assert_eq!(report.tv_distance, 0.0);
        assert!(report.bound.value >= 0.0);
        assert!(report.pass);
    }

    #[test]
    fn monte_carlo_clumps_of_eight() {
        let cfg = ExperimentConfig {
            spec: doubled(12, 0.1),
            pattern: serde_json::json!("triangle"),
            variant: BoundVariant::Thm41Multi,
            mode: Mode::MonteCarlo,
            reps: Some(2000),
            seed: 5,
            eps: DEFAULT_EPS,
            c_override: None,
        };
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.lambda_support_gcd, 8);
        assert!(report.support_consistent);
        assert_eq!(report.support_gcd % 8, 0);
    }
}
