//! Compound Poisson parameters of the copy count.
//!
//! `W` splits into clumps: all copies supported on one `v(G)`-vertex set. With
//! `Z_S` the clump size on vertex set `S`, grouping the defining sum for
//! `lambda_i` by vertex set gives
//!
//! ```text
//! i * lambda_i = sum_S sum_{copies a on S} E[X_a 1{Z_S = i}] = sum_S E[Z_S 1{Z_S = i}] = sum_S i P(Z_S = i)
//! ```
//!
//! and since every vertex set has the same law, `lambda_i = C(n, v) P(Z = i)`.
//! The law of `Z` is obtained by enumerating class assignments of the `v`
//! vertices and edge configurations on their pairs, truncating each
//! infinite-support law where its tail drops below `eps`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::Counter;
use crate::edge_dist::{binomial_big, binomial_f64, EdgeCountDistribution};
use crate::error::{Error, Result};
use crate::model::SbmmSpec;
use crate::pattern::PatternGraph;

/// Default per-slot truncation level for the clump-size enumeration.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Largest number of configurations the clump enumeration will visit.
pub const LAMBDA_ENUMERATION_LIMIT: f64 = 1e8;

/// Largest clump size stored densely.
pub const MAX_CLUMP_SIZE: u128 = 10_000_000;

/// Truncated compound Poisson parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompoundPoissonParams {
    /// `lambda[i - 1]` is `lambda_i`.
    pub lambda: Vec<f64>,
    pub imax: usize,
    /// Upper bound on the parameter mass lost to truncation.
    pub truncation_mass: f64,
    /// Upper bound on `sum_i i lambda_i` lost to truncation, so that
    /// `EW - mean() <= mean_truncation` up to rounding.
    pub mean_truncation: f64,
    /// `sum_{i <= imax} lambda_i`.
    pub total: f64,
}

impl CompoundPoissonParams {
    /// Parameters given directly, without truncation.
    pub fn from_lambda(lambda: Vec<f64>) -> Result<Self> {
        if lambda.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::OutOfRange("lambda entries must be finite and nonnegative".into()));
        }
        let mut lambda = lambda;
        while lambda.last() == Some(&0.0) {
            lambda.pop();
        }
        let total = lambda.iter().sum();
        Ok(CompoundPoissonParams { imax: lambda.len(), lambda, truncation_mass: 0.0, mean_truncation: 0.0, total })
    }

    /// `lambda_i`, zero outside the stored range.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.lambda.get(i - 1).copied().unwrap_or(0.0)
        }
    }

    /// `sum_i i * lambda_i`, the mean of the compound Poisson law.
    pub fn mean(&self) -> f64 {
        self.lambda.iter().enumerate().map(|(i, &l)| (i + 1) as f64 * l).sum()
    }

    /// Greatest common divisor of the clump sizes with positive weight.
    pub fn support_gcd(&self) -> usize {
        self.lambda
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.0)
            .fold(0, |g, (i, _)| gcd(g, i + 1))
    }
}

/// Exact parameter vector for finitely supported laws with dyadic probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCompoundPoissonParams {
    /// `lambda[i - 1]` is `lambda_i`.
    pub lambda: Vec<BigRational>,
}

impl ExactCompoundPoissonParams {
    pub fn get(&self, i: usize) -> BigRational {
        if i == 0 {
            BigRational::zero()
        } else {
            self.lambda.get(i - 1).cloned().unwrap_or_else(BigRational::zero)
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn reject_degree_correction(spec: &SbmmSpec, what: &str) -> Result<()> {
    if spec.is_degree_corrected() {
        return Err(Error::Hypothesis(format!(
            "{what} is not available for degree-corrected models (per-placement mean is not constant)"
        )));
    }
    Ok(())
}

/// All class assignments of `v` vertices, as digit vectors in base `q`.
fn class_assignments(q: usize, v: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = q.pow(v as u32);
    (0..total).map(move |mut idx| {
        let mut c = vec![0; v];
        for slot in c.iter_mut() {
            *slot = idx % q;
            idx /= q;
        }
        c
    })
}

/// `mu(G)`: the expected number of copies on one placement, averaged over classes.
pub fn occurrence_mean(spec: &SbmmSpec, pattern: &PatternGraph) -> Result<f64> {
    reject_degree_correction(spec, "the occurrence mean")?;
    let v = pattern.vertex_count();
    let edges: Vec<_> = pattern.edges().collect();
    let loops: Vec<_> = pattern.loops().collect();
    let mut total = 0.0;
    for c in class_assignments(spec.q, v) {
        let mut term: f64 = c.iter().map(|&k| spec.f[k]).product();
        for &(a, b, m) in &edges {
            term *= spec.edge_law(c[a], c[b]).binomial_moment(m as usize);
        }
        for &(w, s) in &loops {
            term *= match spec.self_loop_law(c[w]) {
                Some(law) => law.binomial_moment(s as usize),
                None => 0.0,
            };
        }
        total += term;
    }
    Ok(total)
}

/// `EW = C(n, v) rho(G) mu(G)`.
pub fn expected_count(spec: &SbmmSpec, pattern: &PatternGraph) -> Result<f64> {
    let mu = occurrence_mean(spec, pattern)?;
    let v = pattern.vertex_count();
    Ok(binomial_f64(spec.n, v) * pattern.rho() as f64 * mu)
}

/// One slot of a clump configuration: a vertex pair or a loop slot.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Pair(usize, usize),
    Loop(usize),
}

fn slots(pattern: &PatternGraph) -> Vec<Slot> {
    let v = pattern.vertex_count();
    let mut out: Vec<Slot> = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            out.push(Slot::Pair(a, b));
        }
    }
    if pattern.self_loop_count() > 0 {
        out.extend((0..v).map(Slot::Loop));
    }
    out
}

fn slot_law<'a>(spec: &'a SbmmSpec, classes: &[usize], slot: Slot) -> Option<&'a EdgeCountDistribution> {
    match slot {
        Slot::Pair(a, b) => Some(spec.edge_law(classes[a], classes[b])),
        Slot::Loop(w) => spec.self_loop_law(classes[w]),
    }
}

/// Evaluates the clump size for a full slot configuration.
fn clump_of(counter: &Counter, v: usize, slots: &[Slot], y: &[u32]) -> Option<u128> {
    let mut pair = vec![0u32; v * v];
    let mut loops = vec![0u32; v];
    for (slot, &val) in slots.iter().zip(y) {
        match *slot {
            Slot::Pair(a, b) => {
                pair[a * v + b] = val;
                pair[b * v + a] = val;
            }
            Slot::Loop(w) => loops[w] = val,
        }
    }
    counter.clump_size_with(|a, b| pair[a * v + b], |w| loops[w])
}

struct Enumeration<'a, T> {
    counter: &'a Counter,
    v: usize,
    slots: &'a [Slot],
    /// Truncated pmf of each slot.
    pmfs: Vec<Vec<T>>,
    y: Vec<u32>,
    out: BTreeMap<u128, T>,
    overflow: bool,
}

impl<T> Enumeration<'_, T>
where
    T: Clone + Zero + for<'b> std::ops::Mul<&'b T, Output = T> + for<'b> std::ops::AddAssign<&'b T>,
{
    fn run(&mut self, depth: usize, weight: T) {
        if self.overflow {
            return;
        }
        if depth == self.slots.len() {
            match clump_of(self.counter, self.v, self.slots, &self.y) {
                Some(z) if z > 0 => *self.out.entry(z).or_insert_with(T::zero) += &weight,
                Some(_) => {}
                None => self.overflow = true,
            }
            return;
        }
        for k in 0..self.pmfs[depth].len() {
            if self.pmfs[depth][k].is_zero() {
                continue;
            }
            self.y[depth] = k as u32;
            let w = weight.clone() * &self.pmfs[depth][k];
            self.run(depth + 1, w);
        }
    }
}

fn check_feasible(size: f64) -> Result<()> {
    if size > LAMBDA_ENUMERATION_LIMIT {
        return Err(Error::Infeasible {
            what: "clump-size enumeration",
            size,
            limit: LAMBDA_ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn densify<T: Clone + Zero>(map: BTreeMap<u128, T>) -> Result<Vec<T>> {
    let imax = map.keys().next_back().copied().unwrap_or(0);
    if imax > MAX_CLUMP_SIZE {
        return Err(Error::Infeasible {
            what: "dense lambda vector",
            size: imax as f64,
            limit: MAX_CLUMP_SIZE as f64,
        });
    }
    let mut lambda = vec![T::zero(); imax as usize];
    for (z, p) in map {
        lambda[z as usize - 1] = p;
    }
    Ok(lambda)
}

/// `lambda_i = C(n, v) P(Z = i)` with per-slot truncation at tail level `eps`.
pub fn lambda_params(spec: &SbmmSpec, pattern: &PatternGraph, eps: f64) -> Result<CompoundPoissonParams> {
    reject_degree_correction(spec, "the compound Poisson parameter")?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps must lie in (0, 1), got {eps}")));
    }
    let v = pattern.vertex_count();
    let counter = Counter::new(pattern);
    let slots = slots(pattern);
    let assignments: Vec<Vec<usize>> = class_assignments(spec.q, v).collect();
    let placement_mults = placement_multiplicities(pattern, &slots);

    // truncated pmfs per assignment, with the neglected probability and mean
    let mut plans = Vec::with_capacity(assignments.len());
    let mut size = 0.0;
    let mut neglected_max: f64 = 0.0;
    let mut neglected_mean = 0.0;
    for c in &assignments {
        let weight: f64 = c.iter().map(|&k| spec.f[k]).product();
        let mut pmfs = Vec::with_capacity(slots.len());
        let mut cutoffs = Vec::with_capacity(slots.len());
        let mut neglected = 0.0;
        let mut configs = 1.0;
        for &slot in &slots {
            let pmf = match slot_law(spec, c, slot) {
                Some(law) => {
                    let m = law.truncation_bound(eps);
                    neglected += law.tail(m + 1);
                    cutoffs.push(Some((law, m)));
                    (0..=m).map(|k| law.pmf(k)).collect()
                }
                None => {
                    cutoffs.push(None);
                    vec![1.0]
                }
            };
            configs *= pmf.len() as f64;
            pmfs.push(pmf);
        }
        size += configs;
        neglected_max = neglected_max.max(neglected);
        neglected_mean += weight * neglected_clump_mean(&cutoffs, &placement_mults);
        plans.push((weight, pmfs));
    }
    check_feasible(size)?;

    let partials: Vec<Result<BTreeMap<u128, f64>>> = plans
        .into_par_iter()
        .map(|(weight, pmfs)| {
            let mut e = Enumeration {
                counter: &counter,
                v,
                slots: &slots,
                y: vec![0; slots.len()],
                pmfs,
                out: BTreeMap::new(),
                overflow: false,
            };
            e.run(0, weight);
            if e.overflow {
                return Err(Error::Overflow("clump size exceeds 128 bits".into()));
            }
            Ok(e.out)
        })
        .collect();
    // merge in assignment order so the float sums do not depend on scheduling
    let mut merged: BTreeMap<u128, f64> = BTreeMap::new();
    for part in partials {
        for (z, p) in part? {
            *merged.entry(z).or_insert(0.0) += p;
        }
    }
    let sets = binomial_f64(spec.n, v);
    let lambda: Vec<f64> = densify(merged)?.into_iter().map(|p| sets * p).collect();
    Ok(CompoundPoissonParams {
        imax: lambda.len(),
        total: lambda.iter().sum(),
        lambda,
        truncation_mass: sets * neglected_max,
        mean_truncation: sets * neglected_mean,
    })
}

/// Multiplicity each placement puts on each slot.
fn placement_multiplicities(pattern: &PatternGraph, slots: &[Slot]) -> Vec<Vec<usize>> {
    pattern
        .placements()
        .into_iter()
        .map(|pl| {
            slots
                .iter()
                .map(|&slot| match slot {
                    Slot::Pair(a, b) => pl
                        .pairs
                        .iter()
                        .find(|&&(x, y, _)| (x, y) == (a, b) || (y, x) == (a, b))
                        .map_or(0, |&(_, _, m)| m as usize),
                    Slot::Loop(w) => pl.loops.iter().find(|&&(x, _)| x == w).map_or(0, |&(_, s)| s as usize),
                })
                .collect()
        })
        .collect()
}

/// Union bound on `E[Z; some slot beyond its cutoff]` for one class assignment:
/// `sum_s sum_placements E[C(Y_s, k_s); Y_s > m_s] prod_{t != s} E[C(Y_t, k_t)]`.
fn neglected_clump_mean(
    cutoffs: &[Option<(&EdgeCountDistribution, usize)>],
    placement_mults: &[Vec<usize>],
) -> f64 {
    let mut total = 0.0;
    for (s, cut) in cutoffs.iter().enumerate() {
        let Some((law, m)) = *cut else { continue };
        for ks in placement_mults {
            let mut term = law.binomial_tail_moment(ks[s], m);
            for (t, other) in cutoffs.iter().enumerate() {
                if t == s || term == 0.0 {
                    continue;
                }
                term *= match other {
                    Some((law, _)) => law.binomial_moment(ks[t]),
                    None if ks[t] == 0 => 1.0,
                    None => 0.0,
                };
            }
            total += term;
        }
    }
    total
}

/// Exact `lambda` for models whose laws are all categorical; probabilities are
/// taken as the exact binary value of each `f64` input.
pub fn lambda_params_exact(spec: &SbmmSpec, pattern: &PatternGraph) -> Result<ExactCompoundPoissonParams> {
    reject_degree_correction(spec, "the compound Poisson parameter")?;
    let v = pattern.vertex_count();
    let counter = Counter::new(pattern);
    let slots = slots(pattern);
    let exact_f: Vec<BigRational> = spec
        .f
        .iter()
        .map(|&x| BigRational::from_float(x).expect("validated weight"))
        .collect();
    let non_categorical = || Error::InvalidModel("the exact path needs categorical laws".into());

    let mut size = 0.0;
    let mut plans = Vec::new();
    for c in class_assignments(spec.q, v) {
        let weight = c.iter().fold(BigRational::from_integer(1.into()), |acc, &k| acc * &exact_f[k]);
        let mut pmfs = Vec::with_capacity(slots.len());
        let mut configs = 1.0;
        for &slot in &slots {
            let pmf = match slot_law(spec, &c, slot) {
                Some(law) => law.exact_pmf().ok_or_else(non_categorical)?,
                None => vec![BigRational::from_integer(1.into())],
            };
            configs *= pmf.len() as f64;
            pmfs.push(pmf);
        }
        size += configs;
        plans.push((weight, pmfs));
    }
    check_feasible(size)?;

    let mut merged: BTreeMap<u128, BigRational> = BTreeMap::new();
    for (weight, pmfs) in plans {
        let mut e = Enumeration {
            counter: &counter,
            v,
            slots: &slots,
            y: vec![0; slots.len()],
            pmfs,
            out: BTreeMap::new(),
            overflow: false,
        };
        e.run(0, weight);
        if e.overflow {
            return Err(Error::Overflow("clump size exceeds 128 bits".into()));
        }
        for (z, p) in e.out {
            *merged.entry(z).or_insert_with(BigRational::zero) += p;
        }
    }
    let sets = BigRational::from_integer(binomial_big(spec.n as u64, v as u64));
    let lambda = densify(merged)?.into_iter().map(|p| p * &sets).collect();
    Ok(ExactCompoundPoissonParams { lambda })
}

/// `P(0..=kmax)` of `CP(lambda)` by the recursion
/// `P(0) = exp(-lambda)`, `k P(k) = sum_i i lambda_i P(k - i)`.
pub fn cp_pmf(params: &CompoundPoissonParams, kmax: usize) -> Vec<f64> {
    let mut p = vec![0.0; kmax + 1];
    p[0] = (-params.total).exp();
    for k in 1..=kmax {
        let top = k.min(params.imax);
        let mut acc = 0.0;
        for i in 1..=top {
            let l = params.lambda[i - 1];
            if l != 0.0 {
                acc += i as f64 * l * p[k - i];
            }
        }
        p[k] = acc / k as f64;
    }
    p
}

/// `exp(lambda) min{1, 1/lambda_1}`, with the truncation mass added to `lambda`.
pub fn c_lambda_upper(params: &CompoundPoissonParams) -> f64 {
    let lambda = params.total + params.truncation_mass;
    let l1 = params.get(1);
    let factor = if l1 > 1.0 { 1.0 / l1 } else { 1.0 };
    lambda.exp() * factor
}

/// `(1 - exp(-nu)) / nu`, the Stein factor of `Po(nu)`; equal to 1 at `nu = 0`.
pub fn poisson_stein_factor(nu: f64) -> f64 {
    if nu == 0.0 {
        1.0
    } else {
        -(-nu).exp_m1() / nu
    }
}

/// `P(Y >= 2) = 1 - (1 + omega) exp(-omega)` for `Y ~ Po(omega)`.
pub fn poisson_tail_q2(omega: f64) -> f64 {
    if omega < 0.5 {
        // the closed form cancels badly for small omega
        let mut term = omega * omega / 2.0;
        let mut sum = 0.0;
        let mut k = 2.0;
        while term > sum * 1e-17 && term > 0.0 {
            sum += term;
            k += 1.0;
            term *= omega / k;
        }
        (-omega).exp() * sum
    } else {
        1.0 - (1.0 + omega) * (-omega).exp()
    }
}
