//! Laws of the edge count `Y_{a,b}` between two vertices and of self-loop counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a categorical law.
pub const CATEGORICAL_MASS_TOLERANCE: f64 = 1e-12;

/// Rates above this are sampled with `rand_distr` instead of sequential inversion.
const POISSON_INVERSION_LIMIT: f64 = 30.0;

/// A nonnegative integer-valued law.
///
/// JSON: `{"type":"categorical","p":[...]}`, `{"type":"poisson","omega":x}`,
/// `{"type":"geometric","p":x}` where the geometric pmf is `p^k (1-p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum EdgeCountDistribution {
    Categorical { p: Vec<f64> },
    Poisson { omega: f64 },
    Geometric { p: f64 },
}

impl EdgeCountDistribution {
    pub fn categorical(p: Vec<f64>) -> Result<Self> {
        let d = Self::Categorical { p };
        d.validate()?;
        Ok(d)
    }

    pub fn poisson(omega: f64) -> Result<Self> {
        let d = Self::Poisson { omega };
        d.validate()?;
        Ok(d)
    }

    pub fn geometric(p: f64) -> Result<Self> {
        let d = Self::Geometric { p };
        d.validate()?;
        Ok(d)
    }

    /// Point mass at zero.
    pub fn zero() -> Self {
        Self::Categorical { p: vec![1.0] }
    }

    /// `P(Y = 1) = p`, `P(Y = 0) = 1 - p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::categorical(vec![1.0 - p, p])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Categorical { p } => {
                if p.is_empty() {
                    return Err(Error::InvalidDistribution("categorical law with no atoms".into()));
                }
                if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidDistribution(
                        "categorical probabilities must be finite and nonnegative".into(),
                    ));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > CATEGORICAL_MASS_TOLERANCE {
                    return Err(Error::InvalidDistribution(format!(
                        "categorical probabilities sum to {total}, expected 1"
                    )));
                }
            }
            Self::Poisson { omega } => {
                if !omega.is_finite() || *omega < 0.0 {
                    return Err(Error::InvalidDistribution(format!("poisson rate {omega} invalid")));
                }
            }
            Self::Geometric { p } => {
                if !p.is_finite() || !(0.0..1.0).contains(p) {
                    return Err(Error::InvalidDistribution(format!(
                        "geometric ratio {p} outside [0, 1)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest value with positive probability, if the support is finite.
    pub fn support_max(&self) -> Option<usize> {
        match self {
            Self::Categorical { p } => Some(p.iter().rposition(|&x| x > 0.0).unwrap_or(0)),
            Self::Poisson { omega } if *omega == 0.0 => Some(0),
            Self::Geometric { p } if *p == 0.0 => Some(0),
            _ => None,
        }
    }

    pub fn pmf(&self, k: usize) -> f64 {
        match self {
            Self::Categorical { p } => p.get(k).copied().unwrap_or(0.0),
            Self::Poisson { omega } => poisson_pmf(*omega, k),
            Self::Geometric { p } => {
                if k == 0 {
                    1.0 - p
                } else {
                    p.powi(k as i32) * (1.0 - p)
                }
            }
        }
    }

    /// `P(Y >= k)`.
    pub fn tail(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match self {
            Self::Categorical { p } => p.iter().skip(k).sum(),
            Self::Poisson { omega } => poisson_tail(*omega, k),
            Self::Geometric { p } => p.powi(k as i32),
        }
    }

    /// `(P(Y = k), P(Y >= k))`.
    pub fn pmf_tail(&self, k: usize) -> (f64, f64) {
        (self.pmf(k), self.tail(k))
    }

    /// `E[C(Y, r)]`, the binomial (factorial-over-r!) moment of order `r`.
    pub fn binomial_moment(&self, r: usize) -> f64 {
        if r == 0 {
            return 1.0;
        }
        match self {
            Self::Categorical { p } => {
                p.iter().enumerate().skip(r).map(|(k, &pk)| binomial_f64(k, r) * pk).sum()
            }
            Self::Poisson { omega } => omega.powi(r as i32) / factorial_f64(r),
            Self::Geometric { p } => (p / (1.0 - p)).powi(r as i32),
        }
    }

    /// `E[C(Y, r); Y > m]`, an upper bound for the geometric law (the series
    /// remainder is bounded geometrically).
    pub fn binomial_tail_moment(&self, r: usize, m: usize) -> f64 {
        match self {
            Self::Categorical { p } => {
                p.iter().enumerate().skip(m + 1).map(|(k, &pk)| binomial_f64(k, r) * pk).sum()
            }
            // C(y, r) y-pmf = (omega^r / r!) times the pmf at y - r
            Self::Poisson { omega } => {
                let shift = (m + 1).saturating_sub(r);
                omega.powi(r as i32) / factorial_f64(r) * self.tail(shift)
            }
            Self::Geometric { p } => {
                if *p == 0.0 {
                    return 0.0;
                }
                let mut y = (m + 1).max(r);
                let mut term = binomial_f64(y, r) * self.pmf(y);
                let mut acc = 0.0;
                loop {
                    acc += term;
                    // successive ratio (y + 1) p / (y + 1 - r), decreasing in y
                    let ratio = if y + 1 > r { (y + 1) as f64 * p / (y + 1 - r) as f64 } else { 0.0 };
                    if ratio < 1.0 && term * ratio / (1.0 - ratio) <= 1e-17 * acc.max(f64::MIN_POSITIVE) {
                        return acc + term * ratio / (1.0 - ratio);
                    }
                    y += 1;
                    term *= ratio;
                    if term == 0.0 {
                        return acc;
                    }
                }
            }
        }
    }

    /// `E[Y^r]`.
    pub fn moment(&self, r: usize) -> f64 {
        if r == 0 {
            return 1.0;
        }
        match self {
            Self::Categorical { p } => {
                p.iter().enumerate().map(|(k, &pk)| (k as f64).powi(r as i32) * pk).sum()
            }
            // E[Y^r] = sum_j S(r, j) j! E[C(Y, j)]
            _ => {
                let stirling = stirling_second_row(r);
                (1..=r)
                    .map(|j| stirling[j] * factorial_f64(j) * self.binomial_moment(j))
                    .sum()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Smallest `m` with `P(Y > m) <= eps`.
    pub fn truncation_bound(&self, eps: f64) -> usize {
        if let Some(max) = self.support_max() {
            // finite support: scan down from the top
            let mut m = max;
            while m > 0 && self.tail(m) <= eps {
                m -= 1;
            }
            return m;
        }
        let mut m = 0;
        while self.tail(m + 1) > eps {
            m += 1;
        }
        m
    }

    /// Draw one value by inversion of the cdf at a fresh uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Self::Categorical { p } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (k, &pk) in p.iter().enumerate() {
                    acc += pk;
                    if u < acc {
                        return k as u64;
                    }
                }
                self.support_max().unwrap_or(0) as u64
            }
            Self::Poisson { omega } => sample_poisson(*omega, rng),
            Self::Geometric { p } => {
                if *p == 0.0 {
                    return 0;
                }
                let u: f64 = rng.random();
                // P(Y >= k) = p^k
                ((1.0 - u).ln() / p.ln()).floor() as u64
            }
        }
    }

    /// The pmf as exact rationals (each `f64` is a dyadic rational), for categorical laws.
    pub fn exact_pmf(&self) -> Option<Vec<BigRational>> {
        match self {
            Self::Categorical { p } => p.iter().map(|&x| BigRational::from_float(x)).collect(),
            _ => None,
        }
    }

    pub fn is_poisson(&self) -> Option<f64> {
        match self {
            Self::Poisson { omega } => Some(*omega),
            _ => None,
        }
    }
}

pub(crate) fn poisson_pmf(omega: f64, k: usize) -> f64 {
    if omega == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let log_fact: f64 = (2..=k).map(|j| (j as f64).ln()).sum();
    (-omega + k as f64 * omega.ln() - log_fact).exp()
}

/// `P(Y >= k)` for `Y ~ Po(omega)`, summed forward from `k` to avoid cancellation.
pub(crate) fn poisson_tail(omega: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if omega == 0.0 {
        return 0.0;
    }
    if (k as f64) < omega {
        // bulk of the mass lies above k: complement is the accurate side
        let below: f64 = (0..k).map(|j| poisson_pmf(omega, j)).sum();
        return (1.0 - below).max(0.0);
    }
    let mut term = poisson_pmf(omega, k);
    let mut sum = 0.0;
    let mut j = k;
    while term > 0.0 {
        sum += term;
        j += 1;
        term *= omega / j as f64;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

fn sample_poisson<R: Rng + ?Sized>(omega: f64, rng: &mut R) -> u64 {
    if omega == 0.0 {
        return 0;
    }
    if omega > POISSON_INVERSION_LIMIT {
        use rand_distr::Distribution;
        let d = rand_distr::Poisson::new(omega).expect("validated rate");
        return d.sample(rng) as u64;
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut pk = (-omega).exp();
    let mut acc = pk;
    while u >= acc {
        k += 1;
        pk *= omega / k as f64;
        if pk == 0.0 {
            break;
        }
        acc += pk;
    }
    k
}

pub(crate) fn factorial_f64(n: usize) -> f64 {
    (2..=n).map(|j| j as f64).product()
}

pub(crate) fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Exact binomial coefficient `C(n, k)` as a big integer.
pub(crate) fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Row `r` of the Stirling numbers of the second kind, `S(r, 0..=r)`.
fn stirling_second_row(r: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for n in 1..=r {
        let mut next = vec![0.0; n + 1];
        for k in 1..=n {
            let carry = if k < n { k as f64 * row[k] } else { 0.0 };
            next[k] = carry + row[k - 1];
        }
        row = next;
    }
    row
}

#[cfg(test)]
mod tests {

    #[test]
    fn binomial_tail_moment_matches_direct_sums() {
        for law in [
            EdgeCountDistribution::poisson(0.7).unwrap(),
            EdgeCountDistribution::geometric(0.35).unwrap(),
            EdgeCountDistribution::categorical(vec![0.2, 0.3, 0.1, 0.4]).unwrap(),
        ] {
            for r in 0..4 {
                for m in 0..6 {
                    let direct: f64 = (m + 1..400).map(|y| binomial_f64(y, r) * law.pmf(y)).sum();
                    let got = law.binomial_tail_moment(r, m);
                    assert!(got >= direct * (1.0 - 1e-12), "{law:?} r={r} m={m}: {got} < {direct}");
                    assert!((got - direct).abs() <= 1e-13 * direct.max(1e-300) + 1e-300, "{law:?} r={r} m={m}");
                }
            }
        }
    }

    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent series oracle: sum `g(k) * pmf(k)` until the law's mass is exhausted.
    fn series<F: Fn(usize) -> f64>(d: &EdgeCountDistribution, g: F) -> f64 {
        let m = d.truncation_bound(1e-18) + 40;
        (0..=m).map(|k| g(k) * d.pmf(k)).sum()
    }

    fn families() -> Vec<EdgeCountDistribution> {
        vec![
            EdgeCountDistribution::categorical(vec![0.5, 0.2, 0.1, 0.15, 0.05]).unwrap(),
            EdgeCountDistribution::poisson(0.3).unwrap(),
            EdgeCountDistribution::poisson(2.5).unwrap(),
            EdgeCountDistribution::geometric(0.2).unwrap(),
            EdgeCountDistribution::geometric(0.6).unwrap(),
        ]
    }

    #[test]
    fn pmf_tail_examples() {
        let d = EdgeCountDistribution::categorical(vec![0.9, 0.0, 0.1]).unwrap();
        let (pmf, tail) = d.pmf_tail(2);
        assert_relative_eq!(pmf, 0.1);
        assert_relative_eq!(tail, 0.1);

        for omega in [0.0, 0.1, 1.0, 3.0] {
            let d = EdgeCountDistribution::poisson(omega).unwrap();
            let expected = 1.0 - (1.0 + omega) * (-omega).exp();
            assert_relative_eq!(d.tail(2), expected, epsilon = 1e-15);
        }

        let g = EdgeCountDistribution::geometric(0.3).unwrap();
        for k in 0..8 {
            let by_sum: f64 = 1.0 - (0..k).map(|j| g.pmf(j)).sum::<f64>();
            assert_relative_eq!(g.tail(k), by_sum, epsilon = 1e-14);
        }
    }

    #[test]
    fn tails_are_nonincreasing() {
        for d in families() {
            assert_eq!(d.tail(0), 1.0);
            for k in 0..30 {
                assert!(d.tail(k + 1) <= d.tail(k), "{d:?} at {k}");
            }
        }
    }

    #[test]
    fn moments_match_series() {
        let two_point = EdgeCountDistribution::categorical(vec![0.7, 0.0, 0.3]).unwrap();
        assert_relative_eq!(two_point.moment(1), 0.6);
        assert_relative_eq!(EdgeCountDistribution::poisson(1.7).unwrap().moment(1), 1.7, epsilon = 1e-14);
        for d in families() {
            for r in 1..=6 {
                let oracle = series(&d, |k| (k as f64).powi(r as i32));
                assert_relative_eq!(d.moment(r), oracle, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn poisson_fourth_moment_touchard() {
        // T_4(w) = w^4 + 6 w^3 + 7 w^2 + w
        let w: f64 = 0.3;
        let touchard = w.powi(4) + 6.0 * w.powi(3) + 7.0 * w.powi(2) + w;
        let d = EdgeCountDistribution::poisson(w).unwrap();
        let oracle = series(&d, |k| (k as f64).powi(4));
        assert!((touchard - oracle).abs() < 1e-12);
        assert!((d.moment(4) - touchard).abs() < 1e-12);
    }

    #[test]
    fn binomial_moments() {
        let w = 0.8;
        let d = EdgeCountDistribution::poisson(w).unwrap();
        for r in 1..=6 {
            let oracle = series(&d, |k| binomial_f64(k, r));
            assert_relative_eq!(d.binomial_moment(r), oracle, max_relative = 1e-12);
        }
        let p = 0.35;
        let g = EdgeCountDistribution::geometric(p).unwrap();
        for r in 1..=6 {
            let oracle = series(&g, |k| binomial_f64(k, r));
            assert_relative_eq!(g.binomial_moment(r), (p / (1.0 - p)).powi(r as i32), max_relative = 1e-12);
            assert_relative_eq!(g.binomial_moment(r), oracle, max_relative = 1e-12);
        }
        for d in families() {
            assert_relative_eq!(d.binomial_moment(1), d.moment(1), max_relative = 1e-14);
        }
    }

    #[test]
    fn binomial_moment_tail_identity() {
        // E[C(Y, r)] = sum_{a >= r} C(a-1, r-1) P(Y >= a)
        for d in families() {
            let m = d.truncation_bound(1e-18) + 60;
            for r in 1..=6 {
                let double: f64 = (r..=m).map(|a| binomial_f64(a - 1, r - 1) * d.tail(a)).sum();
                assert!((d.binomial_moment(r) - double).abs() < 1e-10, "{d:?} r={r}");
            }
        }
    }

    #[test]
    fn moment_chain_is_monotone() {
        for d in families() {
            for r in 1..8 {
                assert!(d.moment(r) <= d.moment(r + 1) * (1.0 + 1e-12), "{d:?} r={r}");
            }
        }
    }

    #[test]
    fn truncation_bounds() {
        let c = EdgeCountDistribution::categorical(vec![0.2, 0.5, 0.3]).unwrap();
        assert!(c.truncation_bound(1e-3) <= 2);
        assert_eq!(c.truncation_bound(0.5), 1);
        assert_eq!(EdgeCountDistribution::poisson(0.0).unwrap().truncation_bound(1e-9), 0);
        let p = EdgeCountDistribution::poisson(0.5).unwrap();
        let m = p.truncation_bound(1e-10);
        assert!(p.tail(m + 1) <= 1e-10);
        assert!(m == 0 || p.tail(m) > 1e-10);
        let g = EdgeCountDistribution::geometric(0.5).unwrap();
        assert_eq!(g.truncation_bound(0.25), 1);
    }

    #[test]
    fn mass_is_certified() {
        for d in families() {
            let m = d.truncation_bound(1e-14);
            let mass: f64 = (0..=m).map(|k| d.pmf(k)).sum::<f64>() + d.tail(m + 1);
            assert!((mass - 1.0).abs() < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn rejects_invalid_laws() {
        assert!(EdgeCountDistribution::categorical(vec![]).is_err());
        assert!(EdgeCountDistribution::categorical(vec![0.5, 0.4]).is_err());
        assert!(EdgeCountDistribution::categorical(vec![1.2, -0.2]).is_err());
        assert!(EdgeCountDistribution::poisson(-1.0).is_err());
        assert!(EdgeCountDistribution::poisson(f64::NAN).is_err());
        assert!(EdgeCountDistribution::geometric(1.0).is_err());
    }

    #[test]
    fn json_forms() {
        let d: EdgeCountDistribution = serde_json::from_str(r#"{"type":"poisson","omega":0.5}"#).unwrap();
        assert_eq!(d, EdgeCountDistribution::Poisson { omega: 0.5 });
        let d: EdgeCountDistribution = serde_json::from_str(r#"{"type":"geometric","p":0.1}"#).unwrap();
        assert_eq!(d, EdgeCountDistribution::Geometric { p: 0.1 });
        let d: EdgeCountDistribution =
            serde_json::from_str(r#"{"type":"categorical","p":[0.9,0,0.1]}"#).unwrap();
        assert_eq!(d.support_max(), Some(2));
        assert!(serde_json::from_str::<EdgeCountDistribution>(r#"{"type":"normal"}"#).is_err());
    }

    #[test]
    fn sampler_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in families() {
            let n = 200_000;
            let mean = (0..n).map(|_| d.sample(&mut rng) as f64).sum::<f64>() / n as f64;
            let var = d.moment(2) - d.mean().powi(2);
            let se = (var / n as f64).sqrt();
            assert!((mean - d.mean()).abs() < 4.0 * se, "{d:?}: {mean} vs {}", d.mean());
        }
        let big = EdgeCountDistribution::poisson(80.0).unwrap();
        let n = 20_000;
        let mean = (0..n).map(|_| big.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 80.0).abs() < 4.0 * (80.0 / n as f64).sqrt());
    }
}
