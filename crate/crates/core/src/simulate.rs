//! Trial-level Monte Carlo: the empirical-consistency-probability protocol
//! that serves as the independent check on every analytic evaluator.
//!
//! Replication i draws from stream (seed, i), so results are identical for
//! any worker count and replications can run in parallel. A replication
//! enters the denominator when the overall test (both tests, for two
//! studies) rejects, and the numerator when the configured regional
//! consistency event also holds.

use rayon::prelude::*;

use crate::consistency_one::{CpEstimate, TiePolicy};
use crate::consistency_two::TwoStudyPlan;
use crate::design::{
    regional_arm_sizes, DesignParams, Endpoint, RegionAllocation, RegionArms, StudyPlan,
};
use crate::error::{Error, Result};
use crate::stats::{norm_quantile, sample_binomial, sample_standard_normal, RngStream};

/// Which consistency event the numerator counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionChoice {
    /// Region of interest retains fraction pi of the overall effect.
    EffectPreservation,
    /// Every region shows the overall trend.
    SameTrend,
}

/// A complete simulation scenario. The region of interest (for the
/// effect-preservation criterion) is the first allocation entry.
#[derive(Debug, Clone)]
pub enum Scenario {
    OneStudy {
        plan: StudyPlan,
        alloc: RegionAllocation,
        params: DesignParams,
        criterion: CriterionChoice,
    },
    TwoStudy {
        plan: TwoStudyPlan,
        alloc1: RegionAllocation,
        alloc2: RegionAllocation,
        criterion: CriterionChoice,
    },
}

/// Simulation request: replication count, base seed, scenario, and the tie
/// policy for discrete trend indicators.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub replications: u64,
    pub seed: u64,
    pub scenario: Scenario,
    pub tie_policy: TiePolicy,
}

/// Aggregated counts and the conditional consistency estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub replications: u64,
    /// Replications where the overall test(s) rejected.
    pub rejections: u64,
    /// Replications that rejected and met the consistency event.
    pub consistent_and_rejected: u64,
    pub empirical_cp: f64,
    pub mc_se: f64,
}

/// Per-region arm totals from one simulated trial.
#[derive(Debug, Clone, Copy)]
pub struct RegionSummary {
    pub n_t: u64,
    pub n_c: u64,
    pub sum_t: f64,
    pub sum_c: f64,
}

impl RegionSummary {
    /// Regional treatment-control difference of means.
    pub fn effect(&self) -> f64 {
        self.sum_t / self.n_t as f64 - self.sum_c / self.n_c as f64
    }

    /// Cross-multiplied trend statistic, exact for integer counts:
    /// positive iff the regional difference is positive.
    pub fn trend_stat(&self) -> f64 {
        self.sum_t * self.n_c as f64 - self.sum_c * self.n_t as f64
    }
}

/// Sufficient statistics of one simulated study.
#[derive(Debug, Clone)]
pub struct TrialSummary {
    pub regions: Vec<RegionSummary>,
    pub n_t: u64,
    pub n_c: u64,
    pub sum_t: f64,
    pub sum_c: f64,
    pub sumsq_t: f64,
    pub sumsq_c: f64,
}

impl TrialSummary {
    /// Overall difference of arm means.
    pub fn effect(&self) -> f64 {
        self.sum_t / self.n_t as f64 - self.sum_c / self.n_c as f64
    }

    pub fn region_effect(&self, k: usize) -> f64 {
        self.regions[k].effect()
    }

    /// Difference of means over all regions except k.
    pub fn complement_effect(&self, k: usize) -> f64 {
        let r = &self.regions[k];
        (self.sum_t - r.sum_t) / (self.n_t - r.n_t) as f64
            - (self.sum_c - r.sum_c) / (self.n_c - r.n_c) as f64
    }

    /// Realized regional share N_k / N.
    pub fn realized_fraction(&self, k: usize) -> f64 {
        let r = &self.regions[k];
        (r.n_t + r.n_c) as f64 / (self.n_t + self.n_c) as f64
    }

    /// Overall one-sided test at critical value `z`. Continuous endpoints
    /// use the design-variance form with plug-in sample variances; binary
    /// endpoints use the unpooled Wald statistic. A degenerate zero-variance
    /// draw rejects exactly when the point difference is positive.
    pub fn rejects(&self, plan: &StudyPlan, z: f64) -> bool {
        if plan.endpoint.is_binary() {
            wald_rejects(self.sum_t as u64, self.sum_c as u64, self.n_t, self.n_c, z)
        } else {
            let nt = self.n_t as f64;
            let nc = self.n_c as f64;
            let var_t = (self.sumsq_t - self.sum_t * self.sum_t / nt) / (nt - 1.0);
            let var_c = (self.sumsq_c - self.sum_c * self.sum_c / nc) / (nc - 1.0);
            let r = plan.ratio();
            let sd = ((r + 1.0) * (var_t + r * var_c) / (r * (nt + nc))).sqrt();
            let d = self.effect();
            if sd > 0.0 {
                d / sd > z
            } else {
                d > 0.0
            }
        }
    }
}

/// Exact numerator of the weight-combined regional trend for binary
/// endpoints. The pooled difference
/// w1 (a1/n1 - b1/m1) + w2 (a2/n2 - b2/m2), with study weights
/// w_s = N_s / (N_1 + N_2), shares its sign with
/// N1 (a1 m1 - b1 n1) n2 m2 + N2 (a2 m2 - b2 n2) n1 m1,
/// which is computed exactly in integers so the tie policy sees true ties.
pub(crate) fn pooled_trend_numerator(
    study_totals: (u64, u64),
    region1: (u64, u64, u64, u64),
    region2: (u64, u64, u64, u64),
) -> i128 {
    let (a1, n1, b1, m1) = region1;
    let (a2, n2, b2, m2) = region2;
    let term1 = (a1 as i128 * m1 as i128 - b1 as i128 * n1 as i128)
        * (n2 as i128 * m2 as i128)
        * study_totals.0 as i128;
    let term2 = (a2 as i128 * m2 as i128 - b2 as i128 * n2 as i128)
        * (n1 as i128 * m1 as i128)
        * study_totals.1 as i128;
    term1 + term2
}

/// Unpooled-variance Wald test for two proportions given response totals:
/// rejects when the rate difference exceeds z times its plug-in standard
/// error, or (degenerate zero variance) when the difference is positive.
pub fn wald_rejects(u: u64, v: u64, n_t: u64, n_c: u64, z: f64) -> bool {
    let nt = n_t as f64;
    let nc = n_c as f64;
    let diff = u as f64 / nt - v as f64 / nc;
    let var =
        u as f64 * (nt - u as f64) / (nt * nt * nt) + v as f64 * (nc - v as f64) / (nc * nc * nc);
    if var > 0.0 {
        diff > z * var.sqrt()
    } else {
        diff > 0.0
    }
}

/// Draw one trial. Regions are visited in order; within a region the
/// treatment arm is drawn before the control arm, so a given stream state
/// is reproducible across runs.
pub fn simulate_trial(rng: &mut RngStream, plan: &StudyPlan, arms: &[RegionArms]) -> TrialSummary {
    let mut regions = Vec::with_capacity(arms.len());
    let mut sum_t = 0.0;
    let mut sum_c = 0.0;
    let mut sumsq_t = 0.0;
    let mut sumsq_c = 0.0;
    match plan.endpoint {
        Endpoint::Binary { p_t, p_c } => {
            for arm in arms {
                let a = sample_binomial(rng, arm.n_t, p_t) as f64;
                let b = sample_binomial(rng, arm.n_c, p_c) as f64;
                sum_t += a;
                sum_c += b;
                sumsq_t += a;
                sumsq_c += b;
                regions.push(RegionSummary {
                    n_t: arm.n_t,
                    n_c: arm.n_c,
                    sum_t: a,
                    sum_c: b,
                });
            }
        }
        Endpoint::Normal {
            sigma2_t,
            sigma2_c,
            d,
        } => {
            let sd_t = sigma2_t.sqrt();
            let sd_c = sigma2_c.sqrt();
            for arm in arms {
                let mut st = 0.0;
                let mut sst = 0.0;
                for _ in 0..arm.n_t {
                    let x = d + sd_t * sample_standard_normal(rng);
                    st += x;
                    sst += x * x;
                }
                let mut sc = 0.0;
                let mut ssc = 0.0;
                for _ in 0..arm.n_c {
                    let x = sd_c * sample_standard_normal(rng);
                    sc += x;
                    ssc += x * x;
                }
                sum_t += st;
                sum_c += sc;
                sumsq_t += sst;
                sumsq_c += ssc;
                regions.push(RegionSummary {
                    n_t: arm.n_t,
                    n_c: arm.n_c,
                    sum_t: st,
                    sum_c: sc,
                });
            }
        }
    }
    TrialSummary {
        regions,
        n_t: plan.n_t,
        n_c: plan.n_c,
        sum_t,
        sum_c,
        sumsq_t,
        sumsq_c,
    }
}

fn aggregate(
    counts: impl ParallelIterator<Item = (u64, u64)>,
    replications: u64,
) -> Result<SimResult> {
    let (rejections, consistent) = counts.reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if rejections == 0 {
        return Err(Error::DegenerateSimulation { replications });
    }
    let cp = consistent as f64 / rejections as f64;
    Ok(SimResult {
        replications,
        rejections,
        consistent_and_rejected: consistent,
        empirical_cp: cp,
        mc_se: (cp * (1.0 - cp) / rejections as f64).sqrt(),
    })
}

/// Run the configured scenario for B replications and report the empirical
/// consistency probability with its binomial standard error.
pub fn empirical_cp(config: &SimConfig) -> Result<SimResult> {
    if config.replications == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    match &config.scenario {
        Scenario::OneStudy {
            plan,
            alloc,
            params,
            criterion,
        } => {
            params.validate()?;
            let arms = regional_arm_sizes(plan, alloc);
            let z = norm_quantile(1.0 - params.alpha)?;
            let pi = params.pi;
            let tie = config.tie_policy;
            let counts = (0..config.replications).into_par_iter().map(|i| {
                let mut rng = RngStream::new(config.seed, i);
                let s = simulate_trial(&mut rng, plan, &arms);
                let rejected = s.rejects(plan, z);
                let consistent = rejected
                    && match criterion {
                        CriterionChoice::EffectPreservation => {
                            s.region_effect(0) >= pi * s.effect()
                        }
                        CriterionChoice::SameTrend => {
                            s.regions.iter().all(|r| tie.passes(r.trend_stat()))
                        }
                    };
                (rejected as u64, consistent as u64)
            });
            aggregate(counts, config.replications)
        }
        Scenario::TwoStudy {
            plan,
            alloc1,
            alloc2,
            criterion,
        } => {
            plan.validate()?;
            if alloc1.regions() != alloc2.regions() {
                return Err(Error::invalid(
                    "allocations must cover the same regions in both studies",
                ));
            }
            let arms1 = regional_arm_sizes(&plan.study1, alloc1);
            let arms2 = regional_arm_sizes(&plan.study2, alloc2);
            let z = norm_quantile(1.0 - plan.params.alpha)?;
            let (w1, w2) = plan.weights_actual();
            let totals = (plan.study1.n_total(), plan.study2.n_total());
            let binary = plan.study1.endpoint.is_binary();
            let pi = plan.params.pi;
            let tie = config.tie_policy;
            let counts = (0..config.replications).into_par_iter().map(|i| {
                let mut rng = RngStream::new(config.seed, i);
                let s1 = simulate_trial(&mut rng, &plan.study1, &arms1);
                let s2 = simulate_trial(&mut rng, &plan.study2, &arms2);
                let rejected = s1.rejects(&plan.study1, z) && s2.rejects(&plan.study2, z);
                let consistent = rejected
                    && match criterion {
                        CriterionChoice::EffectPreservation => {
                            let pooled_region = w1 * s1.region_effect(0) + w2 * s2.region_effect(0);
                            let pooled_overall = w1 * s1.effect() + w2 * s2.effect();
                            pooled_region >= pi * pooled_overall
                        }
                        CriterionChoice::SameTrend if binary => (0..s1.regions.len()).all(|k| {
                            let r1 = &s1.regions[k];
                            let r2 = &s2.regions[k];
                            tie.passes_exact(pooled_trend_numerator(
                                totals,
                                (r1.sum_t as u64, r1.n_t, r1.sum_c as u64, r1.n_c),
                                (r2.sum_t as u64, r2.n_t, r2.sum_c as u64, r2.n_c),
                            ))
                        }),
                        CriterionChoice::SameTrend => (0..s1.regions.len()).all(|k| {
                            tie.passes(w1 * s1.region_effect(k) + w2 * s2.region_effect(k))
                        }),
                    };
                (rejected as u64, consistent as u64)
            });
            aggregate(counts, config.replications)
        }
    }
}

/// Fast binary one-study path used by the Monte Carlo fraction solver,
/// which sizes regions explicitly rather than through an allocation.
#[allow(clippy::too_many_arguments)]
pub(crate) fn binary_one_study_mc(
    arms: &[RegionArms],
    n_t: u64,
    n_c: u64,
    p_t: f64,
    p_c: f64,
    z: f64,
    tie: TiePolicy,
    replications: u64,
    seed: u64,
) -> Result<CpEstimate> {
    let counts = (0..replications).into_par_iter().map(|i| {
        let mut rng = RngStream::new(seed, i);
        let mut total_t = 0u64;
        let mut total_c = 0u64;
        let mut all_trend = true;
        for arm in arms {
            let a = sample_binomial(&mut rng, arm.n_t, p_t);
            let b = sample_binomial(&mut rng, arm.n_c, p_c);
            total_t += a;
            total_c += b;
            all_trend &= tie.passes((a * arm.n_c) as f64 - (b * arm.n_t) as f64);
        }
        let rejected = wald_rejects(total_t, total_c, n_t, n_c, z);
        (rejected as u64, (rejected && all_trend) as u64)
    });
    let res = aggregate(counts, replications)?;
    Ok(CpEstimate::monte_carlo(
        res.empirical_cp,
        res.mc_se,
        res.replications,
    ))
}

/// Fast binary two-study path for the pooled Monte Carlo fraction solver.
#[allow(clippy::too_many_arguments)]
pub(crate) fn binary_two_study_mc(
    arms1: &[RegionArms],
    arms2: &[RegionArms],
    totals1: (u64, u64),
    totals2: (u64, u64),
    rates1: (f64, f64),
    rates2: (f64, f64),
    z: f64,
    tie: TiePolicy,
    replications: u64,
    seed: u64,
) -> Result<CpEstimate> {
    let k = arms1.len();
    let study_totals = (totals1.0 + totals1.1, totals2.0 + totals2.1);
    let counts = (0..replications).into_par_iter().map(|i| {
        let mut rng = RngStream::new(seed, i);
        let mut draws = vec![(0u64, 0u64); 2 * k];
        let mut rejected = true;
        for (s, (arms, totals, rates)) in [(arms1, totals1, rates1), (arms2, totals2, rates2)]
            .into_iter()
            .enumerate()
        {
            let mut total_t = 0u64;
            let mut total_c = 0u64;
            for (kk, arm) in arms.iter().enumerate() {
                let a = sample_binomial(&mut rng, arm.n_t, rates.0);
                let b = sample_binomial(&mut rng, arm.n_c, rates.1);
                total_t += a;
                total_c += b;
                draws[s * k + kk] = (a, b);
            }
            rejected &= wald_rejects(total_t, total_c, totals.0, totals.1, z);
        }
        let consistent = rejected
            && (0..k).all(|kk| {
                let (a1, b1) = draws[kk];
                let (a2, b2) = draws[k + kk];
                tie.passes_exact(pooled_trend_numerator(
                    study_totals,
                    (a1, arms1[kk].n_t, b1, arms1[kk].n_c),
                    (a2, arms2[kk].n_t, b2, arms2[kk].n_c),
                ))
            });
        (rejected as u64, consistent as u64)
    });
    let res = aggregate(counts, replications)?;
    Ok(CpEstimate::monte_carlo(
        res.empirical_cp,
        res.mc_se,
        res.replications,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Endpoint;

    fn params(alpha: f64, beta: f64) -> DesignParams {
        DesignParams::new(alpha, beta, 0.5, 0.2, 1.0).unwrap()
    }

    fn normal_plan() -> StudyPlan {
        StudyPlan::size(
            Endpoint::Normal {
                sigma2_t: 16.0,
                sigma2_c: 16.0,
                d: 1.0,
            },
            &params(0.025, 0.2),
        )
        .unwrap()
    }

    #[test]
    fn single_region_effect_equals_overall() {
        let plan = normal_plan();
        let alloc = RegionAllocation::new(vec![1.0]).unwrap();
        let arms = regional_arm_sizes(&plan, &alloc);
        let mut rng = RngStream::new(5, 0);
        let s = simulate_trial(&mut rng, &plan, &arms);
        assert!((s.region_effect(0) - s.effect()).abs() < 1e-14);
    }

    #[test]
    fn regional_decomposition_identity() {
        // D = f_k D_k + (1 - f_k) D_{-k} with realized integer weights,
        // exact when every region keeps the design ratio.
        let plan = normal_plan();
        let alloc = RegionAllocation::new(vec![0.23, 0.77]).unwrap();
        let arms = regional_arm_sizes(&plan, &alloc);
        for rep in 0..200 {
            let mut rng = RngStream::new(31, rep);
            let s = simulate_trial(&mut rng, &plan, &arms);
            for k in 0..2 {
                let f = s.realized_fraction(k);
                let recombined = f * s.region_effect(k) + (1.0 - f) * s.complement_effect(k);
                assert!(
                    (s.effect() - recombined).abs() <= 1e-12,
                    "identity violated at rep {rep}: {:.3e}",
                    (s.effect() - recombined).abs()
                );
            }
        }
    }

    #[test]
    fn rejection_rate_matches_design_power() {
        let plan = normal_plan();
        let alloc = RegionAllocation::new(vec![0.23, 0.77]).unwrap();
        let config = SimConfig {
            replications: 10_000,
            seed: 2024,
            tie_policy: TiePolicy::Strict,
            scenario: Scenario::OneStudy {
                plan,
                alloc,
                params: params(0.025, 0.2),
                criterion: CriterionChoice::EffectPreservation,
            },
        };
        let res = empirical_cp(&config).unwrap();
        let rate = res.rejections as f64 / res.replications as f64;
        assert!(
            (rate - 0.80).abs() < 0.012,
            "rejection rate {rate} vs design power 0.80"
        );
    }

    #[test]
    fn pooled_trend_numerator_signs_and_ties() {
        // opposite equal-magnitude regional differences cancel exactly
        let tie = pooled_trend_numerator((20, 20), (3, 10, 2, 10), (1, 10, 2, 10));
        assert_eq!(tie, 0);
        assert!(!TiePolicy::Strict.passes_exact(tie));
        assert!(TiePolicy::WeakInequality.passes_exact(tie));

        let pos = pooled_trend_numerator((20, 20), (3, 10, 2, 10), (2, 10, 2, 10));
        assert!(pos > 0);
        let neg = pooled_trend_numerator((20, 20), (1, 10, 2, 10), (1, 10, 2, 10));
        assert!(neg < 0);

        // unequal arm sizes and weights: sign matches the f64 evaluation
        // away from ties
        let num = pooled_trend_numerator((100, 300), (5, 9, 3, 8), (10, 31, 11, 30));
        let float = 0.25 * (5.0 / 9.0 - 3.0 / 8.0) + 0.75 * (10.0 / 31.0 - 11.0 / 30.0);
        assert_eq!(num > 0, float > 0.0);
    }

    #[test]
    fn wald_degenerate_variance_convention() {
        // all successes vs all successes: zero variance, zero difference
        assert!(!wald_rejects(20, 20, 20, 20, 1.645));
        // all successes vs none: zero variance, positive difference
        assert!(wald_rejects(20, 0, 20, 20, 1.645));
        assert!(!wald_rejects(0, 20, 20, 20, 1.645));
    }

    #[test]
    fn two_study_rejection_rate_matches_joint_power() {
        let p = params(0.025, 0.2);
        let plan = normal_plan();
        let two = crate::consistency_two::TwoStudyPlan::new(plan, plan, p).unwrap();
        let alloc = RegionAllocation::new(vec![0.128, 0.872]).unwrap();
        let config = SimConfig {
            replications: 10_000,
            seed: 515,
            tie_policy: TiePolicy::Strict,
            scenario: Scenario::TwoStudy {
                plan: two,
                alloc1: alloc.clone(),
                alloc2: alloc,
                criterion: CriterionChoice::EffectPreservation,
            },
        };
        let res = empirical_cp(&config).unwrap();
        let rate = res.rejections as f64 / res.replications as f64;
        // (1 - beta)^2 within 4 binomial standard errors
        let se = (0.64f64 * 0.36 / 10_000.0).sqrt();
        assert!(
            (rate - 0.64).abs() < 4.0 * se,
            "joint rejection rate {rate} vs 0.64"
        );
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let plan = normal_plan();
        let alloc = RegionAllocation::new(vec![0.23, 0.77]).unwrap();
        let mk = || SimConfig {
            replications: 2000,
            seed: 99,
            tie_policy: TiePolicy::Strict,
            scenario: Scenario::OneStudy {
                plan,
                alloc: alloc.clone(),
                params: params(0.025, 0.2),
                criterion: CriterionChoice::EffectPreservation,
            },
        };
        let a = empirical_cp(&mk()).unwrap();
        let b = empirical_cp(&mk()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn independent_of_worker_count() {
        let plan =
            StudyPlan::size(Endpoint::Binary { p_t: 0.6, p_c: 0.5 }, &params(0.025, 0.2)).unwrap();
        let alloc = RegionAllocation::new(vec![0.23, 0.77]).unwrap();
        let mk = || SimConfig {
            replications: 4000,
            seed: 7,
            tie_policy: TiePolicy::Strict,
            scenario: Scenario::OneStudy {
                plan,
                alloc: alloc.clone(),
                params: params(0.025, 0.2),
                criterion: CriterionChoice::EffectPreservation,
            },
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| empirical_cp(&mk()).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| empirical_cp(&mk()).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn degenerate_when_nothing_rejects() {
        // effect far below zero: essentially no rejections
        let plan = StudyPlan::from_total(
            Endpoint::Normal {
                sigma2_t: 1.0,
                sigma2_c: 1.0,
                d: -5.0,
            },
            40,
            1.0,
        )
        .unwrap();
        let alloc = RegionAllocation::new(vec![1.0]).unwrap();
        let config = SimConfig {
            replications: 500,
            seed: 1,
            tie_policy: TiePolicy::Strict,
            scenario: Scenario::OneStudy {
                plan,
                alloc,
                params: params(0.025, 0.2),
                criterion: CriterionChoice::SameTrend,
            },
        };
        match empirical_cp(&config) {
            Err(Error::DegenerateSimulation { replications }) => assert_eq!(replications, 500),
            other => panic!("expected degenerate simulation, got {other:?}"),
        }
    }
}
