//! Trial design objects: scalar design knobs, endpoint models, overall
//! sample size, and regional allocation with integer apportionment.

use crate::error::{Error, Result};
use crate::stats::z_sum;

/// The scalar knobs shared by every consistency criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    /// One-sided significance level, in (0, 0.5).
    pub alpha: f64,
    /// Type-II error, in (0, 0.5); power is 1 - beta.
    pub beta: f64,
    /// Fraction of the overall effect the region must preserve, in [0, 1).
    pub pi: f64,
    /// Consistency risk; the target consistency probability is 1 - gamma.
    pub gamma: f64,
    /// Treatment-to-control randomization ratio, shared by all regions.
    pub ratio: f64,
}

impl DesignParams {
    pub fn new(alpha: f64, beta: f64, pi: f64, gamma: f64, ratio: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            pi,
            gamma,
            ratio,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 0.5), got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::invalid(format!(
                "beta must lie in (0, 0.5), got {}",
                self.beta
            )));
        }
        if !(self.pi >= 0.0 && self.pi < 1.0) {
            return Err(Error::invalid(format!(
                "pi must lie in [0, 1), got {}",
                self.pi
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0, 0.5), got {}",
                self.gamma
            )));
        }
        if !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return Err(Error::invalid(format!(
                "randomization ratio must be positive, got {}",
                self.ratio
            )));
        }
        Ok(())
    }

    /// Guidance-range advisories (not errors): the regulatory convention
    /// expects pi >= 0.5 and a target consistency probability >= 0.8.
    pub fn guidance_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.pi < 0.5 {
            w.push(format!(
                "pi = {} is below the customary minimum of 0.5",
                self.pi
            ));
        }
        if 1.0 - self.gamma < 0.8 {
            w.push(format!(
                "target consistency probability {} is below the customary 0.8",
                1.0 - self.gamma
            ));
        }
        w
    }

    /// z_{1-alpha} + z_{1-beta}.
    pub fn z_sum(&self) -> f64 {
        z_sum(self.alpha, self.beta)
    }
}

/// Primary endpoint model: continuous with known arm variances, or binary
/// with arm response rates (variances p(1-p), effect the rate difference).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Normal {
        sigma2_t: f64,
        sigma2_c: f64,
        d: f64,
    },
    Binary {
        p_t: f64,
        p_c: f64,
    },
}

impl Endpoint {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Endpoint::Normal {
                sigma2_t, sigma2_c, ..
            } => {
                if sigma2_t <= 0.0 || sigma2_c <= 0.0 {
                    return Err(Error::invalid("arm variances must be strictly positive"));
                }
            }
            Endpoint::Binary { p_t, p_c } => {
                for (name, p) in [("p_t", p_t), ("p_c", p_c)] {
                    if !(p > 0.0 && p < 1.0) {
                        return Err(Error::invalid(format!(
                            "{name} must lie in (0, 1), got {p}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Treatment-minus-control mean difference.
    pub fn effect(&self) -> f64 {
        match *self {
            Endpoint::Normal { d, .. } => d,
            Endpoint::Binary { p_t, p_c } => p_t - p_c,
        }
    }

    pub fn var_t(&self) -> f64 {
        match *self {
            Endpoint::Normal { sigma2_t, .. } => sigma2_t,
            Endpoint::Binary { p_t, .. } => p_t * (1.0 - p_t),
        }
    }

    pub fn var_c(&self) -> f64 {
        match *self {
            Endpoint::Normal { sigma2_c, .. } => sigma2_c,
            Endpoint::Binary { p_c, .. } => p_c * (1.0 - p_c),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, Endpoint::Binary { .. })
    }
}

/// An endpoint plus integer per-arm sample sizes for one study.
///
/// `raw_n_c` keeps the unrounded control-arm size from the sizing formula;
/// design-exact computations (weights, the effect-sd identity) use it, while
/// simulation uses the integer arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPlan {
    pub endpoint: Endpoint,
    pub n_t: u64,
    pub n_c: u64,
    raw_n_c: f64,
    ratio: f64,
}

impl StudyPlan {
    /// Overall sample size for the requested significance and power: the
    /// control arm is the ceiling of
    /// (sigma2_t / r + sigma2_c) (z_{1-alpha} + z_{1-beta})^2 / d^2
    /// and the treatment arm is the ceiling of r times the unrounded value.
    pub fn size(endpoint: Endpoint, params: &DesignParams) -> Result<StudyPlan> {
        endpoint.validate()?;
        params.validate()?;
        let d = endpoint.effect();
        if d <= 0.0 {
            return Err(Error::invalid(
                "effect must be positive (no alternative to power against)",
            ));
        }
        let r = params.ratio;
        let zs = params.z_sum();
        let raw_n_c = (endpoint.var_t() / r + endpoint.var_c()) * zs * zs / (d * d);
        // Guard against an exactly-integral raw value being bumped by fp noise.
        let n_c = (raw_n_c - 1e-9).ceil() as u64;
        let n_t = (r * raw_n_c - 1e-9).ceil() as u64;
        if n_c < 2 || n_t < 2 {
            return Err(Error::invalid(
                "design yields fewer than 2 subjects per arm",
            ));
        }
        Ok(StudyPlan {
            endpoint,
            n_t,
            n_c,
            raw_n_c,
            ratio: r,
        })
    }

    /// A plan with an externally fixed total, split by the randomization
    /// ratio (control arm rounded down on ties).
    pub fn from_total(endpoint: Endpoint, n_total: u64, ratio: f64) -> Result<StudyPlan> {
        endpoint.validate()?;
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::invalid("ratio must be positive"));
        }
        if n_total < 4 {
            return Err(Error::invalid("total sample size must be at least 4"));
        }
        let n_c = (n_total as f64 / (1.0 + ratio)).floor() as u64;
        let n_t = n_total - n_c;
        Ok(StudyPlan {
            endpoint,
            n_t,
            n_c,
            raw_n_c: n_c as f64,
            ratio,
        })
    }

    pub fn n_total(&self) -> u64 {
        self.n_t + self.n_c
    }

    /// Unrounded total from the sizing formula (equals the integer total
    /// when the plan was built from an explicit total).
    pub fn raw_n_total(&self) -> f64 {
        self.raw_n_c * (1.0 + self.ratio)
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Standard deviation of the overall effect estimate at the plan's
    /// integer sample size: sqrt((r+1)(sigma2_t + r sigma2_c) / (r N)).
    pub fn effect_sd_actual(&self) -> f64 {
        let r = self.ratio;
        let n = self.n_total() as f64;
        ((r + 1.0) * (self.endpoint.var_t() + r * self.endpoint.var_c()) / (r * n)).sqrt()
    }

    /// Design-exact standard deviation of the effect estimate. At the
    /// unrounded sample size the sizing formula collapses to
    /// effect / (z_{1-alpha} + z_{1-beta}).
    pub fn effect_sd_design(&self, params: &DesignParams) -> f64 {
        self.endpoint.effect() / params.z_sum()
    }
}

/// Regional fractions. Each fraction lies in (0, 1] and the vector sums
/// to 1 within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAllocation {
    fractions: Vec<f64>,
}

impl RegionAllocation {
    pub fn new(fractions: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::invalid("allocation needs at least one region"));
        }
        for &f in &fractions {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(format!(
                    "regional fraction {f} must lie in (0, 1]"
                )));
            }
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "regional fractions sum to {total}, expected 1"
            )));
        }
        Ok(Self { fractions })
    }

    /// Region 1 holds `f1`; the remaining K-1 regions share the rest
    /// equally.
    pub fn equal_rest(f1: f64, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("need at least one region"));
        }
        if k == 1 {
            if (f1 - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("single region must take fraction 1"));
            }
            return Self::new(vec![1.0]);
        }
        if !(f1 > 0.0 && f1 < 1.0) {
            return Err(Error::invalid(format!(
                "region-of-interest fraction {f1} must lie in (0, 1)"
            )));
        }
        let rest = (1.0 - f1) / (k as f64 - 1.0);
        let mut fractions = vec![f1];
        fractions.resize(k, rest);
        Self::new(fractions)
    }

    /// Equal fractions across all K regions.
    pub fn equal(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("need at least one region"));
        }
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn regions(&self) -> usize {
        self.fractions.len()
    }
}

/// Largest-remainder apportionment of `total` units across `weights`
/// (deterministic: ties go to the lower index). The result always sums to
/// `total` and each entry is within one unit of its exact share.
pub fn apportion(weights: &[f64], total: u64) -> Vec<u64> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut base: Vec<u64> = raw.iter().map(|&x| x.floor() as u64).collect();
    let assigned: u64 = base.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = raw[i] - raw[i].floor();
        let rj = raw[j] - raw[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    for idx in 0..(total - assigned) as usize {
        base[order[idx % order.len()]] += 1;
    }
    base
}

/// Integer per-arm regional sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionArms {
    pub n_t: u64,
    pub n_c: u64,
}

impl RegionArms {
    pub fn total(&self) -> u64 {
        self.n_t + self.n_c
    }
}

/// Apportion each arm of the plan across regions independently with the
/// largest-remainder rule, so that per-arm totals are preserved exactly and
/// equal-ratio designs keep the ratio in every region.
pub fn regional_arm_sizes(plan: &StudyPlan, alloc: &RegionAllocation) -> Vec<RegionArms> {
    let nt = apportion(alloc.fractions(), plan.n_t);
    let nc = apportion(alloc.fractions(), plan.n_c);
    nt.into_iter()
        .zip(nc)
        .map(|(n_t, n_c)| RegionArms { n_t, n_c })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(alpha: f64, beta: f64) -> DesignParams {
        DesignParams::new(alpha, beta, 0.5, 0.2, 1.0).unwrap()
    }

    #[test]
    fn overall_sizes_match_published_designs() {
        let cases: Vec<(Endpoint, f64, f64, u64)> = vec![
            (
                Endpoint::Normal {
                    sigma2_t: 16.0,
                    sigma2_c: 16.0,
                    d: 1.0,
                },
                0.025,
                0.2,
                504,
            ),
            (
                Endpoint::Normal {
                    sigma2_t: 16.0,
                    sigma2_c: 16.0,
                    d: 1.0,
                },
                0.025,
                0.1,
                674,
            ),
            (Endpoint::Binary { p_t: 0.6, p_c: 0.5 }, 0.025, 0.2, 770),
            (Endpoint::Binary { p_t: 0.6, p_c: 0.5 }, 0.025, 0.1, 1030),
            (Endpoint::Binary { p_t: 0.9, p_c: 0.8 }, 0.05, 0.2, 310),
        ];
        for (ep, a, b, want) in cases {
            let plan = StudyPlan::size(ep, &params(a, b)).unwrap();
            assert_eq!(plan.n_total(), want, "endpoint {ep:?} alpha={a} beta={b}");
            assert_eq!(plan.n_t, plan.n_c, "balanced design");
        }
    }

    #[test]
    fn rejects_non_positive_effect() {
        let ep = Endpoint::Normal {
            sigma2_t: 16.0,
            sigma2_c: 16.0,
            d: 0.0,
        };
        assert!(StudyPlan::size(ep, &params(0.025, 0.2)).is_err());
    }

    #[test]
    fn effect_sd_values() {
        let ep = Endpoint::Normal {
            sigma2_t: 16.0,
            sigma2_c: 16.0,
            d: 1.0,
        };
        let p = params(0.025, 0.2);
        let plan = StudyPlan::size(ep, &p).unwrap();
        // sqrt(2 * 32 / 504)
        assert!((plan.effect_sd_actual() - 0.3563483).abs() < 1e-6);
        // design identity: rounding slack below 1%
        let exact = plan.effect_sd_design(&p);
        assert!((plan.effect_sd_actual() - exact).abs() / exact < 0.01);
        // r=1, equal variances: 2 sigma / sqrt(N)
        let reduced = 2.0 * 4.0 / (plan.n_total() as f64).sqrt();
        assert!((plan.effect_sd_actual() - reduced).abs() < 1e-12);
    }

    #[test]
    fn sizing_monotonicity() {
        let p = params(0.025, 0.2);
        let n_of_d = |d: f64| {
            StudyPlan::size(
                Endpoint::Normal {
                    sigma2_t: 16.0,
                    sigma2_c: 16.0,
                    d,
                },
                &p,
            )
            .unwrap()
            .n_total()
        };
        assert!(n_of_d(1.0) >= n_of_d(1.25));
        assert!(n_of_d(1.25) >= n_of_d(1.5));
        let n_of_var = |v: f64| {
            StudyPlan::size(
                Endpoint::Normal {
                    sigma2_t: v,
                    sigma2_c: 16.0,
                    d: 1.0,
                },
                &p,
            )
            .unwrap()
            .n_total()
        };
        assert!(n_of_var(18.0) >= n_of_var(16.0));
    }

    #[test]
    fn unequal_ratio_sizing() {
        let p = DesignParams::new(0.025, 0.2, 0.5, 0.2, 2.0).unwrap();
        let plan = StudyPlan::size(
            Endpoint::Normal {
                sigma2_t: 16.0,
                sigma2_c: 16.0,
                d: 1.0,
            },
            &p,
        )
        .unwrap();
        // n_t = ceil(2 * raw_nc)
        assert!(plan.n_t >= 2 * plan.n_c - 1 && plan.n_t <= 2 * plan.n_c + 2);
    }

    #[test]
    fn guidance_warnings_trigger() {
        let ok = DesignParams::new(0.025, 0.2, 0.5, 0.2, 1.0).unwrap();
        assert!(ok.guidance_warnings().is_empty());
        let low_pi = DesignParams::new(0.025, 0.2, 0.3, 0.2, 1.0).unwrap();
        assert_eq!(low_pi.guidance_warnings().len(), 1);
        let low_cp = DesignParams::new(0.025, 0.2, 0.5, 0.3, 1.0).unwrap();
        assert_eq!(low_cp.guidance_warnings().len(), 1);
    }

    #[test]
    fn allocation_validation() {
        assert!(RegionAllocation::new(vec![0.3, 0.3, 0.4]).is_ok());
        assert!(RegionAllocation::new(vec![0.3, 0.3]).is_err());
        assert!(RegionAllocation::new(vec![0.0, 1.0]).is_err());
        let er = RegionAllocation::equal_rest(0.105, 3).unwrap();
        assert_eq!(er.regions(), 3);
        assert!((er.fractions()[1] - 0.4475).abs() < 1e-12);
        assert!(RegionAllocation::equal_rest(1.0, 1).is_ok());
    }

    #[test]
    fn apportionment_example() {
        // 229 subjects at (0.105, 0.4475, 0.4475): deficit goes to the
        // larger remainders, lower index first on ties.
        let sizes = apportion(&[0.105, 0.4475, 0.4475], 229);
        assert_eq!(sizes, vec![24, 103, 102]);
        assert_eq!(sizes.iter().sum::<u64>(), 229);
    }

    #[test]
    fn regional_arms_preserve_totals_and_ratio() {
        let p = params(0.05, 0.2);
        let plan = StudyPlan::size(Endpoint::Binary { p_t: 0.8, p_c: 0.7 }, &p).unwrap();
        let alloc = RegionAllocation::equal_rest(0.155, 3).unwrap();
        let arms = regional_arm_sizes(&plan, &alloc);
        assert_eq!(arms.iter().map(|a| a.n_t).sum::<u64>(), plan.n_t);
        assert_eq!(arms.iter().map(|a| a.n_c).sum::<u64>(), plan.n_c);
        // r = 1 with identical per-arm inputs: every region balanced
        for a in &arms {
            assert_eq!(a.n_t, a.n_c);
        }
        assert_eq!(arms[0].n_t, 35);
    }

    proptest! {
        #[test]
        fn apportion_sums_and_stays_close(
            k in 2usize..6,
            total in 10u64..2000,
            seedw in 1u64..1000,
        ) {
            // deterministic pseudo-weights from the seed
            let mut ws: Vec<f64> = (0..k)
                .map(|i| ((seedw * (i as u64 + 17)) % 97 + 1) as f64)
                .collect();
            let s: f64 = ws.iter().sum();
            for w in &mut ws { *w /= s; }
            let out = apportion(&ws, total);
            prop_assert_eq!(out.iter().sum::<u64>(), total);
            for (o, w) in out.iter().zip(&ws) {
                prop_assert!((*o as f64 - w * total as f64).abs() < 1.0 + 1e-9);
            }
        }
    }
}
