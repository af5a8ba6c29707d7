//! Total-variation bounds for the compound Poisson and Poisson approximations
//! of the copy count.
//!
//! Every report carries the numeric ingredients it was built from so that the
//! value can be recomputed independently.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cp::{c_lambda_upper, expected_count, lambda_params, poisson_stein_factor, DEFAULT_EPS};
use crate::edge_dist::{binomial_f64, factorial_f64};
use crate::error::{Error, Result};
use crate::model::{ModelExtrema, SbmmSpec};
use crate::pattern::{BalancednessProfile, KappaVariant, PatternGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// Strictly balanced simple pattern, compound Poisson target.
    Thm31Simple,
    /// As `Thm31Simple` with vertex-dependent edge means.
    Cor35Inhom,
    /// Strictly pseudo-balanced multigraph pattern.
    Thm41Multi,
    /// Multigraph pattern with self-loops.
    Thm51Selfloop,
    /// Poisson target for a strictly balanced simple pattern.
    Thm52PoissonApprox,
    /// Poisson target in the Poisson block model.
    Cor55PoissonSbm,
    /// Constant-free form in the regime `E Y ~ n^{-1/d}`.
    RegimeCorpn,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 7] = [
        BoundVariant::Thm31Simple,
        BoundVariant::Cor35Inhom,
        BoundVariant::Thm41Multi,
        BoundVariant::Thm51Selfloop,
        BoundVariant::Thm52PoissonApprox,
        BoundVariant::Cor55PoissonSbm,
        BoundVariant::RegimeCorpn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundVariant::Thm31Simple => "thm31_simple",
            BoundVariant::Cor35Inhom => "cor35_inhom",
            BoundVariant::Thm41Multi => "thm41_multi",
            BoundVariant::Thm51Selfloop => "thm51_selfloop",
            BoundVariant::Thm52PoissonApprox => "thm52_poisson_approx",
            BoundVariant::Cor55PoissonSbm => "cor55_poisson_sbm",
            BoundVariant::RegimeCorpn => "regime_corpn",
        }
    }

    /// Whether the bound compares against `Po(nu)` rather than `CP(lambda)`.
    pub fn targets_poisson(self) -> bool {
        matches!(self, BoundVariant::Thm52PoissonApprox | BoundVariant::Cor55PoissonSbm)
    }
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown bound variant '{s}'")))
    }
}

/// Constants `c <= n^{1/d} E Y_{a,b} <= C` of the regime form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeConstants {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOptions {
    /// Replaces `c(lambda)` (or the Poisson factor for the Poisson variants).
    pub c_override: Option<f64>,
    /// Bound on the neglected `lambda` mass behind the default `c(lambda)`; the
    /// per-slot truncation level is this divided by `C(n, v)`.
    pub eps: f64,
    /// Regime constants; the tightest constants for the model are used when absent.
    pub regime: Option<RegimeConstants>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { c_override: None, eps: DEFAULT_EPS, regime: None }
    }
}

impl BoundOptions {
    pub fn with_c(c: f64) -> Self {
        BoundOptions { c_override: Some(c), ..Default::default() }
    }
}

/// A bound value with everything it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub variant: BoundVariant,
    pub value: f64,
    /// `compound_poisson` or `poisson`.
    pub target: &'static str,
    /// Where the leading constant came from.
    pub c_source: &'static str,
    pub ingredients: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

fn r2f(r: Rational64) -> f64 {
    r.to_f64().expect("small rational")
}

fn hypothesis(variant: BoundVariant, what: &str) -> Error {
    Error::Hypothesis(format!("{variant}: {what}"))
}

struct Context<'a> {
    spec: &'a SbmmSpec,
    pattern: &'a PatternGraph,
    variant: BoundVariant,
    profile: BalancednessProfile,
    ext: ModelExtrema,
    ingredients: BTreeMap<String, f64>,
    flags: Vec<String>,
}

impl Context<'_> {
    fn put(&mut self, key: impl Into<String>, value: f64) {
        self.ingredients.insert(key.into(), value);
    }

    fn require_simple_balanced(&self) -> Result<()> {
        if self.pattern.max_multiplicity() != 1 {
            return Err(hypothesis(self.variant, "pattern has multiple edges"));
        }
        if self.pattern.self_loop_count() != 0 {
            return Err(hypothesis(self.variant, "pattern has self-loops"));
        }
        if !self.profile.strictly_balanced {
            return Err(hypothesis(self.variant, "pattern not strictly balanced"));
        }
        Ok(())
    }

    fn require_pseudo_balanced(&self) -> Result<()> {
        if !self.profile.strictly_pseudo_balanced {
            return Err(hypothesis(self.variant, "pattern not strictly pseudo-balanced"));
        }
        Ok(())
    }

    fn require_plain_model(&self) -> Result<()> {
        if self.spec.is_degree_corrected() {
            return Err(hypothesis(
                self.variant,
                "degree-corrected models are only covered by cor35_inhom",
            ));
        }
        Ok(())
    }

    fn base(&mut self) {
        let v = self.pattern.vertex_count();
        self.put("n", self.spec.n as f64);
        self.put("v", v as f64);
        self.put("e", self.pattern.edge_count() as f64);
        self.put("rho", self.pattern.rho() as f64);
        self.put("d", r2f(self.profile.density));
        self.put("alpha", r2f(self.profile.alpha));
        self.put("gamma", r2f(self.profile.gamma));
    }

    fn kappas(&mut self, variant: KappaVariant) -> Vec<f64> {
        let v = self.pattern.vertex_count();
        let e = self.pattern.edge_count();
        let prefix = match variant {
            KappaVariant::Simple => "kappa",
            KappaVariant::Multi => "kappa_m",
        };
        (1..v)
            .map(|i| {
                let k = r2f(self.profile.kappa(e, v, i, variant));
                self.put(format!("{prefix}_{i}"), k);
                k
            })
            .collect()
    }

    /// `c(lambda)`: override, or the upper bound from the enumerated parameters.
    fn cp_constant(&mut self, opts: &BoundOptions) -> Result<(f64, &'static str)> {
        if let Some(c) = opts.c_override {
            return Ok((c, "override"));
        }
        // per-slot level scaled so the certified mass added to lambda stays near eps
        let sets = binomial_f64(self.spec.n, self.pattern.vertex_count()).max(1.0);
        let eps = (opts.eps / sets).max(f64::MIN_POSITIVE);
        let params = lambda_params(self.spec, self.pattern, eps)?;
        self.put("lambda_total", params.total);
        self.put("lambda_1", params.get(1));
        self.put("lambda_truncation_mass", params.truncation_mass);
        Ok((c_lambda_upper(&params), "c_lambda_upper"))
    }

    /// Poisson factor `(1 - e^{-nu}) / nu` unless overridden.
    fn poisson_constant(&mut self, opts: &BoundOptions) -> Result<(f64, &'static str)> {
        let nu = expected_count(self.spec, self.pattern)?;
        self.put("nu", nu);
        let pf = poisson_stein_factor(nu);
        self.put("poisson_factor", pf);
        Ok(match opts.c_override {
            Some(c) => (c, "override"),
            None => (pf, "poisson_factor"),
        })
    }
}

/// `c rho^2/v! n^v mu^e { v^2/v! n^{v-1} mu^e + sum_i C(v,i) n^{v-i} mu^{kappa_i}/(v-i)! }`.
fn simple_form(c: f64, rho: f64, v: usize, n: f64, mu: f64, e: f64, kappas: &[f64]) -> f64 {
    let vf = factorial_f64(v);
    let first = (v * v) as f64 / vf * n.powi(v as i32 - 1) * mu.powf(e);
    let sum: f64 = (1..v)
        .map(|i| binomial_f64(v, i) * n.powi((v - i) as i32) * mu.powf(kappas[i - 1]) / factorial_f64(v - i))
        .sum();
    c * rho * rho / vf * n.powi(v as i32) * mu.powf(e) * (first + sum)
}

/// `pf rho^2/v! n^v mu^{e-1} { v^2/v! n^{v-1} mu^{e+1} + q2 + sum_i C(v,i) n^{v-i} mu^{kappa_i+1}/(v-i)! }`.
#[allow(clippy::too_many_arguments)]
fn poisson_form(pf: f64, rho: f64, v: usize, n: f64, mu: f64, e: f64, q2: f64, kappas: &[f64]) -> f64 {
    let vf = factorial_f64(v);
    let first = (v * v) as f64 / vf * n.powi(v as i32 - 1) * mu.powf(e + 1.0);
    let sum: f64 = (1..v)
        .map(|i| binomial_f64(v, i) * n.powi((v - i) as i32) * mu.powf(kappas[i - 1] + 1.0) / factorial_f64(v - i))
        .sum();
    pf * rho * rho / vf * n.powi(v as i32) * mu.powf(e - 1.0) * (first + q2 + sum)
}

/// Evaluate the bound `variant` for `pattern` in `spec`.
pub fn tv_bound(
    spec: &SbmmSpec,
    pattern: &PatternGraph,
    variant: BoundVariant,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    if let Some(c) = opts.c_override {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::OutOfRange(format!("c override must be finite and nonnegative, got {c}")));
        }
    }
    let mut ctx = Context {
        spec,
        pattern,
        variant,
        profile: pattern.balancedness_profile()?,
        ext: spec.extrema(pattern),
        ingredients: BTreeMap::new(),
        flags: Vec::new(),
    };
    ctx.base();
    let v = pattern.vertex_count();
    let n = spec.n as f64;
    let rho = pattern.rho() as f64;
    let e = pattern.edge_count() as f64;

    let (value, c_source) = match variant {
        BoundVariant::Thm31Simple | BoundVariant::Cor35Inhom => {
            ctx.require_simple_balanced()?;
            if variant == BoundVariant::Thm31Simple {
                ctx.require_plain_model()?;
            }
            let kappas = ctx.kappas(KappaVariant::Simple);
            let mu = if variant == BoundVariant::Thm31Simple { ctx.ext.mu1_star } else { ctx.ext.inhom_max };
            ctx.put("mu1_star", ctx.ext.mu1_star);
            if variant == BoundVariant::Cor35Inhom {
                ctx.put("inhom_max", ctx.ext.inhom_max);
            }
            let (c, source) = if variant == BoundVariant::Cor35Inhom && spec.is_degree_corrected() {
                match opts.c_override {
                    Some(c) => (c, "override"),
                    None => {
                        // lambda <= EW <= C(n,v) rho max E[Y]^e bounds exp(lambda) min{1, 1/lambda_1}
                        let ew = binomial_f64(spec.n, v) * rho * mu.powf(e);
                        ctx.put("ew_upper", ew);
                        (ew.exp(), "exp_mean_upper")
                    }
                }
            } else {
                ctx.cp_constant(opts)?
            };
            ctx.put("c_lambda", c);
            (simple_form(c, rho, v, n, mu, e, &kappas), source)
        }
        BoundVariant::Thm41Multi | BoundVariant::Thm51Selfloop => {
            ctx.require_plain_model()?;
            ctx.require_pseudo_balanced()?;
            let s = pattern.self_loop_count();
            if variant == BoundVariant::Thm41Multi && s > 0 {
                return Err(hypothesis(variant, "pattern has self-loops; use thm51_selfloop"));
            }
            ctx.put("pseudo_density", r2f(ctx.profile.pseudo_density));
            ctx.put("alpha_m", r2f(ctx.profile.alpha_m));
            ctx.put("gamma_m", r2f(ctx.profile.gamma_m));
            let phi = if variant == BoundVariant::Thm51Selfloop && s > 0 {
                let phi = ctx.ext.phi_star.unwrap_or(0.0);
                if phi <= 0.0 {
                    return Err(hypothesis(variant, "self-loop pattern needs phi* > 0"));
                }
                ctx.put("phi_star", phi);
                ctx.put("s", s as f64);
                if (1..v).any(|i| i > 2 * s as usize) {
                    ctx.flags.push("negative_phi_exponent".into());
                }
                Some(phi)
            } else {
                if variant == BoundVariant::Thm51Selfloop {
                    ctx.flags.push("dispatched_to_thm41_multi".into());
                }
                None
            };
            let kappas = ctx.kappas(KappaVariant::Multi);
            let t = pattern.max_multiplicity() as usize;
            ctx.put("psi", ctx.ext.psi);
            ctx.put(format!("mu_star_{}", 2 * t), ctx.ext.mu_star[2 * t - 1]);
            let mut product = 1.0;
            for i in 1..=t {
                let ei = pattern.pairs_with_multiplicity(i as u32);
                let mdd = ctx.ext.mu_dstar[i - 1];
                ctx.put(format!("mu_dstar_{i}"), mdd);
                ctx.put(format!("e_{i}"), ei as f64);
                product *= mdd.powi(2 * ei as i32);
            }
            let (c, source) = ctx.cp_constant(opts)?;
            ctx.put("c_lambda", c);
            let vf = factorial_f64(v);
            let s2 = 2.0 * s as f64;
            let loop_first = phi.map_or(1.0, |p| p.powf(s2));
            let first = (v * v) as f64 / vf * n.powi(v as i32 - 1) * loop_first * product;
            let sum: f64 = (1..v)
                .map(|i| {
                    let loop_factor = phi.map_or(1.0, |p| p.powf(s2 - i as f64));
                    binomial_f64(v, i) * n.powi((v - i) as i32) * loop_factor * ctx.ext.psi.powf(e + kappas[i - 1])
                        / factorial_f64(v - i)
                })
                .sum();
            (c * rho * rho / vf * n.powi(v as i32) * (first + sum), source)
        }
        BoundVariant::Thm52PoissonApprox | BoundVariant::Cor55PoissonSbm => {
            ctx.require_plain_model()?;
            ctx.require_simple_balanced()?;
            let kappas = ctx.kappas(KappaVariant::Simple);
            let (mu, q2) = if variant == BoundVariant::Cor55PoissonSbm {
                let omega = spec
                    .omega_star()
                    .ok_or_else(|| hypothesis(variant, "edge laws are not all Poisson"))?;
                ctx.put("omega_star", omega);
                (omega, 0.5 * omega * omega)
            } else {
                ctx.put("mu1_star", ctx.ext.mu1_star);
                (ctx.ext.mu1_star, ctx.ext.q2_star)
            };
            ctx.put("q2_star", q2);
            let (c, source) = ctx.poisson_constant(opts)?;
            ctx.put("c_lambda", c);
            (poisson_form(c, rho, v, n, mu, e, q2, &kappas), source)
        }
        BoundVariant::RegimeCorpn => {
            ctx.require_plain_model()?;
            ctx.require_simple_balanced()?;
            let d = r2f(ctx.profile.density);
            let alpha = r2f(ctx.profile.alpha);
            let gamma = r2f(ctx.profile.gamma);
            let scale = n.powf(1.0 / d);
            let means: Vec<f64> = (0..spec.q)
                .flat_map(|a| (a..spec.q).map(move |b| (a, b)))
                .map(|(a, b)| spec.edge_law(a, b).mean() * scale)
                .collect();
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = means.iter().copied().fold(0.0, f64::max);
            let (c_lo, c_hi) = match opts.regime {
                Some(r) => {
                    let slack = 1e-12;
                    if r.lower > lo * (1.0 + slack) || hi > r.upper * (1.0 + slack) {
                        return Err(hypothesis(
                            variant,
                            &format!(
                                "edge means scaled by n^(1/d) lie in [{lo}, {hi}], outside [{}, {}]",
                                r.lower, r.upper
                            ),
                        ));
                    }
                    (r.lower, r.upper)
                }
                None => (lo, hi),
            };
            ctx.put("c", c_lo);
            ctx.put("C", c_hi);
            let (k, source) = ctx.cp_constant(opts)?;
            ctx.put("K", k);
            let a = (1.0 + c_hi.powf(alpha)).powi(v as i32 - 1) * n.powf(1.0 - alpha / d);
            let value = if c_hi == 0.0 {
                ctx.put("A", a);
                ctx.put("B", 0.0);
                0.0
            } else {
                let b = c_hi.powf(e + gamma) * (1.0 + c_hi.powf(-d)).powi(v as i32 - 1) * n.powf(-gamma / d);
                ctx.put("A", a);
                ctx.put("B", b);
                let vf = factorial_f64(v);
                k * rho * rho / vf * c_hi.powf(e) * ((v * v) as f64 / vf * c_hi.powf(e) / n + a.min(b))
            };
            (value, source)
        }
    };

    let target = if variant.targets_poisson() { "poisson" } else { "compound_poisson" };
    Ok(BoundReport {
        variant,
        value,
        target,
        c_source,
        ingredients: ctx.ingredients,
        flags: ctx.flags,
    })
}

/// Exponent of `n` in the dominant term of the bound in the regime
/// `E Y ~ n^{-1/d}`, for the variants that have one.
pub fn predicted_rate_exponent(profile: &BalancednessProfile, variant: BoundVariant) -> Option<f64> {
    let d = r2f(profile.density);
    let alpha = r2f(profile.alpha);
    let gamma = r2f(profile.gamma);
    let core = (1.0 - alpha / d).min(-gamma / d).max(-1.0);
    match variant {
        BoundVariant::Thm31Simple | BoundVariant::RegimeCorpn | BoundVariant::Cor35Inhom => Some(core),
        BoundVariant::Thm52PoissonApprox | BoundVariant::Cor55PoissonSbm => Some(core.max(-1.0 / d)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_dist::EdgeCountDistribution;
    use approx::assert_relative_eq;

    fn er(n: usize, p: f64) -> SbmmSpec {
        SbmmSpec::homogeneous(n, EdgeCountDistribution::bernoulli(p).unwrap()).unwrap()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in BoundVariant::ALL {
            assert_eq!(v.name().parse::<BoundVariant>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{}\"", v.name()));
        }
        assert!("thm99".parse::<BoundVariant>().is_err());
    }

    #[test]
    fn zero_laws_give_zero() {
        let zero = SbmmSpec::homogeneous(10, EdgeCountDistribution::zero()).unwrap();
        let tri = PatternGraph::triangle();
        for v in [
            BoundVariant::Thm31Simple,
            BoundVariant::Cor35Inhom,
            BoundVariant::Thm41Multi,
            BoundVariant::Thm51Selfloop,
            BoundVariant::Thm52PoissonApprox,
            BoundVariant::RegimeCorpn,
        ] {
            let r = tv_bound(&zero, &tri, v, &BoundOptions::default()).unwrap();
            assert_eq!(r.value, 0.0, "{v}");
        }
        let po = SbmmSpec::homogeneous(10, EdgeCountDistribution::poisson(0.0).unwrap()).unwrap();
        let r = tv_bound(&po, &tri, BoundVariant::Cor55PoissonSbm, &BoundOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn hypotheses_are_named() {
        let spec = er(10, 0.1);
        // a triangle with a pendant edge has the same density as the triangle
        let tadpole = PatternGraph::new(4, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 3, 1)], &[]).unwrap();
        let err = tv_bound(&spec, &tadpole, BoundVariant::Thm31Simple, &BoundOptions::default()).unwrap_err();
        assert!(err.to_string().contains("not strictly balanced"), "{err}");
        let multi = PatternGraph::new(3, &[(0, 1, 2), (1, 2, 1), (0, 2, 1)], &[]).unwrap();
        assert!(tv_bound(&spec, &multi, BoundVariant::Thm31Simple, &BoundOptions::default()).is_err());
        assert!(tv_bound(&spec, &multi, BoundVariant::Thm41Multi, &BoundOptions::default()).is_ok());
        let err = tv_bound(&spec, &PatternGraph::triangle(), BoundVariant::Cor55PoissonSbm, &BoundOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("Poisson"));
        let looped = PatternGraph::new(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[(0, 1)]).unwrap();
        assert!(tv_bound(&spec, &looped, BoundVariant::Thm51Selfloop, &BoundOptions::default()).is_err());
        assert!(tv_bound(&spec, &looped, BoundVariant::Thm41Multi, &BoundOptions::default()).is_err());
    }

    #[test]
    fn cor55_matches_hand_evaluation() {
        let n = 100usize;
        let omega = 1.0 / n as f64;
        let spec = SbmmSpec::homogeneous(n, EdgeCountDistribution::poisson(omega).unwrap()).unwrap();
        let r = tv_bound(&spec, &PatternGraph::triangle(), BoundVariant::Cor55PoissonSbm, &BoundOptions::default())
            .unwrap();
        // triangle: rho = 1, v = 3, e = 3, kappa(1) = 4, kappa(2) = 2
        let nf = n as f64;
        let nu = 161_700.0 * omega.powi(3);
        let pf = (1.0 - (-nu).exp()) / nu;
        let t1 = 9.0 / 6.0 * nf * nf * omega.powi(4);
        let t2 = 0.5 * omega * omega;
        let t3 = 3.0 * nf * nf * omega.powi(5) / 2.0 + 3.0 * nf * omega.powi(3);
        let expect = pf / 6.0 * nf.powi(3) * omega.powi(2) * (t1 + t2 + t3);
        assert_relative_eq!(r.value, expect, max_relative = 1e-13);
        assert_eq!(r.target, "poisson");
    }

    #[test]
    fn sbm_reduction_coincides_with_simple_form() {
        for &(n, p) in &[(10usize, 0.2), (50, 0.05), (200, 0.01)] {
            let spec = er(n, p);
            let tri = PatternGraph::triangle();
            let pois = tv_bound(&spec, &tri, BoundVariant::Thm52PoissonApprox, &BoundOptions::default()).unwrap();
            assert_eq!(pois.ingredients["q2_star"], 0.0);
            let pf = pois.ingredients["poisson_factor"];
            let simple = tv_bound(&spec, &tri, BoundVariant::Thm31Simple, &BoundOptions::with_c(pf)).unwrap();
            assert_relative_eq!(pois.value, simple.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn degree_corrected_only_via_cor35() {
        let spec = SbmmSpec::homogeneous(6, EdgeCountDistribution::poisson(0.1).unwrap())
            .unwrap()
            .with_degree_weights(vec![1.0, 2.0, 1.5, 0.5, 1.0, 1.0])
            .unwrap();
        let tri = PatternGraph::triangle();
        assert!(tv_bound(&spec, &tri, BoundVariant::Thm31Simple, &BoundOptions::default()).is_err());
        let r = tv_bound(&spec, &tri, BoundVariant::Cor35Inhom, &BoundOptions::default()).unwrap();
        assert_eq!(r.c_source, "exp_mean_upper");
        assert_relative_eq!(r.ingredients["inhom_max"], 2.0 * 1.5 * 0.1, max_relative = 1e-15);
    }

    #[test]
    fn self_loop_flags() {
        let spec = SbmmSpec::homogeneous(8, EdgeCountDistribution::poisson(0.2).unwrap())
            .unwrap()
            .with_self_loops(vec![EdgeCountDistribution::poisson(0.3).unwrap()])
            .unwrap();
        let looped = PatternGraph::new(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[(0, 1)]).unwrap();
        let r = tv_bound(&spec, &looped, BoundVariant::Thm51Selfloop, &BoundOptions::with_c(1.0)).unwrap();
        assert!(r.flags.is_empty());
        let looped4 = PatternGraph::new(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)], &[(0, 1)]).unwrap();
        let r = tv_bound(&spec, &looped4, BoundVariant::Thm51Selfloop, &BoundOptions::with_c(1.0)).unwrap();
        assert!(r.flags.contains(&"negative_phi_exponent".to_string()));
        assert!(r.value > 0.0);
        let plain = tv_bound(&spec, &PatternGraph::triangle(), BoundVariant::Thm51Selfloop, &BoundOptions::with_c(1.0))
            .unwrap();
        assert!(plain.flags.contains(&"dispatched_to_thm41_multi".to_string()));
        let multi = tv_bound(&spec, &PatternGraph::triangle(), BoundVariant::Thm41Multi, &BoundOptions::with_c(1.0))
            .unwrap();
        assert_eq!(plain.value, multi.value);
    }

    #[test]
    fn regime_constants_are_checked() {
        let n = 1000usize;
        let spec = SbmmSpec::homogeneous(n, EdgeCountDistribution::poisson(2.0 / n as f64).unwrap()).unwrap();
        let tri = PatternGraph::triangle();
        let ok = BoundOptions { regime: Some(RegimeConstants { lower: 1.0, upper: 3.0 }), ..BoundOptions::with_c(1.0) };
        let r = tv_bound(&spec, &tri, BoundVariant::RegimeCorpn, &ok).unwrap();
        assert_relative_eq!(r.ingredients["C"], 3.0);
        let a = r.ingredients["A"];
        let b = r.ingredients["B"];
        let expect = 1.0 / 6.0 * 27.0 * (1.5 * 27.0 / n as f64 + a.min(b));
        assert_relative_eq!(r.value, expect, max_relative = 1e-13);
        let bad = BoundOptions { regime: Some(RegimeConstants { lower: 2.5, upper: 3.0 }), ..ok.clone() };
        assert!(matches!(tv_bound(&spec, &tri, BoundVariant::RegimeCorpn, &bad), Err(Error::Hypothesis(_))));
        let default = tv_bound(&spec, &tri, BoundVariant::RegimeCorpn, &BoundOptions::with_c(1.0)).unwrap();
        assert_relative_eq!(default.ingredients["C"], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn predicted_exponents() {
        let tri = PatternGraph::triangle().balancedness_profile().unwrap();
        assert_eq!(predicted_rate_exponent(&tri, BoundVariant::Cor55PoissonSbm), Some(-1.0));
        let c4 = PatternGraph::cycle(4).unwrap().balancedness_profile().unwrap();
        assert_eq!(predicted_rate_exponent(&c4, BoundVariant::Thm31Simple), Some(-1.0));
        let k4 = PatternGraph::complete(4).unwrap().balancedness_profile().unwrap();
        // min(1 - 5/3, -2/3) = -2/3
        assert_relative_eq!(predicted_rate_exponent(&k4, BoundVariant::Thm31Simple).unwrap(), -2.0 / 3.0);
        assert_eq!(predicted_rate_exponent(&tri, BoundVariant::Thm41Multi), None);
    }
}
