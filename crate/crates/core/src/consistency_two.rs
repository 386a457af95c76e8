//! Pooled two-study consistency evaluation and fraction solving.
//!
//! Both criteria condition on both studies rejecting and measure regional
//! behaviour on the weight-combined samples. Evaluation is a double
//! integral over the two standardized overall effects; under variance
//! homogeneity with a common effect the criterion-I form collapses to a
//! single integral that depends on the fraction pair only through
//! c = 1/f1 + 1/f2.

use crate::consistency_one::{
    CpEstimate, FractionSolution, TiePolicy, CRITERION_II_GRID, CRITERION_I_GRID,
};
use crate::design::{regional_arm_sizes, DesignParams, RegionAllocation, StudyPlan};
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, integrate_2d, IntegralSpec1D, IntegralSpec2D};
use crate::simulate::{self, wald_rejects, CriterionChoice, Scenario, SimConfig};
use crate::solve::solve_fraction_on_grid;
use crate::stats::{binom_pmf, norm_pdf, norm_quantile, phi};

/// Two studies sharing significance, power, randomization ratio, and
/// endpoint family.
#[derive(Debug, Clone, Copy)]
pub struct TwoStudyPlan {
    pub study1: StudyPlan,
    pub study2: StudyPlan,
    pub params: DesignParams,
}

impl TwoStudyPlan {
    pub fn new(study1: StudyPlan, study2: StudyPlan, params: DesignParams) -> Result<Self> {
        let plan = TwoStudyPlan {
            study1,
            study2,
            params,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if (self.study1.ratio() - self.study2.ratio()).abs() > 1e-9 {
            return Err(Error::invalid(
                "randomization ratio must be identical across studies",
            ));
        }
        if self.study1.endpoint.is_binary() != self.study2.endpoint.is_binary() {
            return Err(Error::invalid(
                "studies must share the same endpoint family",
            ));
        }
        Ok(())
    }

    /// Study weights from the integer sample sizes (simulation convention).
    pub fn weights_actual(&self) -> (f64, f64) {
        let n1 = self.study1.n_total() as f64;
        let n2 = self.study2.n_total() as f64;
        (n1 / (n1 + n2), n2 / (n1 + n2))
    }

    /// Study weights from the unrounded sizing-formula totals
    /// (design-exact convention; equals the integer weights for plans built
    /// from explicit totals).
    pub fn weights_design(&self) -> (f64, f64) {
        let n1 = self.study1.raw_n_total();
        let n2 = self.study2.raw_n_total();
        (n1 / (n1 + n2), n2 / (n1 + n2))
    }
}

/// Source of the per-study effect-estimate standard deviations (and the
/// matching study weights) inside the pooled integrands.
///
/// `DesignExact` works on the continuous design equations: the effect sd
/// collapses to effect / (z_{1-alpha} + z_{1-beta}) and weights use the
/// unrounded totals; this is the solving convention. `ActualN` plugs in the
/// realized integer sample sizes and is the convention for cross-checks
/// against simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaDSource {
    #[default]
    DesignExact,
    ActualN,
}

/// A regional fraction in each of the two studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionPair {
    pub f1: f64,
    pub f2: f64,
}

impl FractionPair {
    pub fn new(f1: f64, f2: f64) -> Result<Self> {
        for f in [f1, f2] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(format!("fraction {f} must lie in (0, 1]")));
            }
        }
        Ok(FractionPair { f1, f2 })
    }

    /// c = 1/f1 + 1/f2, the homogeneous-case invariant.
    pub fn c(&self) -> f64 {
        1.0 / self.f1 + 1.0 / self.f2
    }
}

struct PooledScales {
    w_sigma_1: f64,
    w_sigma_2: f64,
    drift: f64,
    z_beta: f64,
    beta: f64,
}

fn pooled_scales(plan: &TwoStudyPlan, sigma: SigmaDSource) -> Result<PooledScales> {
    plan.validate()?;
    let d1 = plan.study1.endpoint.effect();
    let d2 = plan.study2.endpoint.effect();
    if d1 <= 0.0 || d2 <= 0.0 {
        return Err(Error::invalid("both study effects must be positive"));
    }
    let (w1, w2, s1, s2) = match sigma {
        SigmaDSource::DesignExact => {
            let (w1, w2) = plan.weights_design();
            (
                w1,
                w2,
                plan.study1.effect_sd_design(&plan.params),
                plan.study2.effect_sd_design(&plan.params),
            )
        }
        SigmaDSource::ActualN => {
            let (w1, w2) = plan.weights_actual();
            (
                w1,
                w2,
                plan.study1.effect_sd_actual(),
                plan.study2.effect_sd_actual(),
            )
        }
    };
    Ok(PooledScales {
        w_sigma_1: w1 * s1,
        w_sigma_2: w2 * s2,
        drift: w1 * d1 + w2 * d2,
        z_beta: norm_quantile(1.0 - plan.params.beta)?,
        beta: plan.params.beta,
    })
}

/// Pooled criterion-I consistency probability for a fraction pair: the
/// weight-combined regional effect retains fraction pi of the pooled
/// overall effect, given both studies reject.
pub fn cp_criterion1_pooled(
    plan: &TwoStudyPlan,
    pair: &FractionPair,
    sigma: SigmaDSource,
) -> Result<CpEstimate> {
    let sc = pooled_scales(plan, sigma)?;
    let denom = ((1.0 / pair.f1 - 1.0) * sc.w_sigma_1 * sc.w_sigma_1
        + (1.0 / pair.f2 - 1.0) * sc.w_sigma_2 * sc.w_sigma_2)
        .sqrt();
    if denom == 0.0 {
        // both fractions are 1: the pooled regional effect is the pooled
        // overall effect
        return Ok(CpEstimate::quadrature(1.0));
    }
    let shrink = (1.0 - plan.params.pi) / denom;
    let integrand = move |u: f64, v: f64| {
        phi(shrink * (sc.w_sigma_1 * u + sc.w_sigma_2 * v + sc.drift)) * norm_pdf(u) * norm_pdf(v)
    };
    let value = integrate_2d(&IntegralSpec2D::new(-sc.z_beta, -sc.z_beta, &integrand))?;
    Ok(CpEstimate::quadrature(
        value / ((1.0 - sc.beta) * (1.0 - sc.beta)),
    ))
}

/// Homogeneous-case criterion-I probability as a function of
/// c = 1/f1 + 1/f2 alone (equal effects, equal variances, equal weights).
pub fn cp_criterion1_homogeneous_by_c(params: &DesignParams, c: f64) -> Result<CpEstimate> {
    params.validate()?;
    if c < 2.0 {
        return Err(Error::invalid(format!(
            "c = 1/f1 + 1/f2 must be at least 2, got {c}"
        )));
    }
    if c == 2.0 {
        return Ok(CpEstimate::quadrature(1.0));
    }
    let zs = params.z_sum();
    let z_beta = norm_quantile(1.0 - params.beta)?;
    let shrink = (1.0 - params.pi) / (c - 2.0).sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let integrand = move |u: f64| {
        phi(shrink * (sqrt2 * u + 2.0 * zs)) * (2.0 * phi(u + sqrt2 * z_beta) - 1.0) * norm_pdf(u)
    };
    let value = integrate_1d(&IntegralSpec1D::new(-sqrt2 * z_beta, &integrand))?;
    let one_minus_beta = 1.0 - params.beta;
    Ok(CpEstimate::quadrature(
        value / (one_minus_beta * one_minus_beta),
    ))
}

/// Homogeneous-case criterion-I probability of a fraction pair.
pub fn cp_criterion1_pooled_homogeneous(
    params: &DesignParams,
    pair: &FractionPair,
) -> Result<CpEstimate> {
    cp_criterion1_homogeneous_by_c(params, pair.c())
}

/// Solution of the homogeneous pooled criterion-I sizing problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousCSolution {
    /// Reported c, derived from the grid-reported equal fraction
    /// (c = 2 / equal_fraction).
    pub c: f64,
    /// Smallest equal fraction on the criterion-I reporting grid attaining
    /// the target.
    pub equal_fraction: f64,
    /// Exact root in c before grid reporting.
    pub raw_c: f64,
    pub achieved_cp: f64,
}

/// Solve the homogeneous criterion-I problem for c = 1/f1 + 1/f2 at the
/// given target probability. The probability is decreasing in c, so the
/// solve runs on the equal fraction f = 2/c and reports c from the
/// grid-reported fraction, matching how fraction tables are published.
pub fn solve_c_homogeneous(params: &DesignParams, target: f64) -> Result<HomogeneousCSolution> {
    params.validate()?;
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid("target must lie in (0, 1)"));
    }
    let objective = |f: f64| cp_criterion1_homogeneous_by_c(params, 2.0 / f).map(|e| e.value);
    let sol = solve_fraction_on_grid(&objective, 1e-4, 1.0, target, CRITERION_I_GRID)?;
    Ok(HomogeneousCSolution {
        c: 2.0 / sol.fraction,
        equal_fraction: sol.fraction,
        raw_c: 2.0 / sol.raw_root,
        achieved_cp: sol.achieved,
    })
}

/// Fraction pairs attaining a given c, plus the grid entries that admit no
/// in-range partner (f2 would reach 1 or beyond).
#[derive(Debug, Clone, PartialEq)]
pub struct PairEnumeration {
    pub pairs: Vec<FractionPair>,
    pub skipped: Vec<f64>,
}

/// All pairs (f1, 1/(c - 1/f1)) over the supplied f1 grid. Every returned
/// pair satisfies 1/f1 + 1/f2 = c; the combined regional enrollment is
/// minimized at f1 = f2 = 2/c.
pub fn enumerate_fraction_pairs(c: f64, f1_grid: &[f64]) -> Result<PairEnumeration> {
    if c <= 2.0 {
        return Err(Error::invalid(format!("c must exceed 2, got {c}")));
    }
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for &f1 in f1_grid {
        if !(f1 > 0.0 && f1 < 1.0) || 1.0 / f1 >= c - 1.0 {
            skipped.push(f1);
            continue;
        }
        let f2 = 1.0 / (c - 1.0 / f1);
        pairs.push(FractionPair { f1, f2 });
    }
    Ok(PairEnumeration { pairs, skipped })
}

/// Default f1 grid for pair enumeration: 0.01 up to the equal split 2/c in
/// steps of 0.01.
pub fn default_pair_grid(c: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut f = 0.01;
    while f <= 2.0 / c + 1e-12 {
        grid.push((f * 100.0).round() / 100.0);
        f += 0.01;
    }
    grid
}

/// Smallest common fraction (criterion-I grid) such that the pooled
/// criterion-I probability at (f, f) reaches 1 - gamma. Depends on the
/// per-study effects and effect sds, unlike the one-study solver.
pub fn solve_fk_pooled_equal(plan: &TwoStudyPlan, sigma: SigmaDSource) -> Result<FractionSolution> {
    let target = 1.0 - plan.params.gamma;
    let objective =
        |f: f64| cp_criterion1_pooled(plan, &FractionPair { f1: f, f2: f }, sigma).map(|e| e.value);
    let sol = solve_fraction_on_grid(&objective, 1e-4, 1.0 - 1e-6, target, CRITERION_I_GRID)?;
    Ok(FractionSolution {
        fraction: sol.fraction,
        raw_root: sol.raw_root,
        achieved_cp: sol.achieved,
    })
}

/// Pooled criterion-II consistency probability: every weight-combined
/// regional effect trends positive given both studies reject.
pub fn cp_criterion2_pooled(
    plan: &TwoStudyPlan,
    alloc1: &RegionAllocation,
    alloc2: &RegionAllocation,
    sigma: SigmaDSource,
) -> Result<CpEstimate> {
    if alloc1.regions() != alloc2.regions() {
        return Err(Error::invalid(
            "allocations must cover the same regions in both studies",
        ));
    }
    let sc = pooled_scales(plan, sigma)?;
    let denominators: Vec<f64> = alloc1
        .fractions()
        .iter()
        .zip(alloc2.fractions())
        .map(|(&fa, &fb)| {
            ((1.0 / fa - 1.0) * sc.w_sigma_1 * sc.w_sigma_1
                + (1.0 / fb - 1.0) * sc.w_sigma_2 * sc.w_sigma_2)
                .sqrt()
        })
        .collect();
    if denominators.iter().all(|&d| d == 0.0) {
        return Ok(CpEstimate::quadrature(1.0));
    }
    let integrand = move |u: f64, v: f64| {
        let num = sc.w_sigma_1 * u + sc.w_sigma_2 * v + sc.drift;
        let mut p = norm_pdf(u) * norm_pdf(v);
        for &den in &denominators {
            if den > 0.0 {
                p *= phi(num / den);
            }
        }
        p
    };
    let value = integrate_2d(&IntegralSpec2D::new(-sc.z_beta, -sc.z_beta, &integrand))?;
    Ok(CpEstimate::quadrature(
        value / ((1.0 - sc.beta) * (1.0 - sc.beta)),
    ))
}

/// Pooled criterion-II ceiling at equal fractions in both studies.
pub fn max_cp_criterion2_pooled(
    plan: &TwoStudyPlan,
    k: usize,
    sigma: SigmaDSource,
) -> Result<CpEstimate> {
    if k < 2 {
        return Err(Error::invalid("criterion II ceilings need K >= 2"));
    }
    let eq = RegionAllocation::equal(k)?;
    cp_criterion2_pooled(plan, &eq, &eq, sigma)
}

/// Smallest region-of-interest fraction (criterion-II planning grid),
/// shared by both studies under equal-rest allocations, attaining the
/// target pooled criterion-II probability.
pub fn solve_f1_criterion2_pooled(
    plan: &TwoStudyPlan,
    k: usize,
    target: f64,
    sigma: SigmaDSource,
) -> Result<FractionSolution> {
    if k < 2 {
        return Err(Error::invalid("equal-rest structure needs K >= 2"));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid("target must lie in (0, 1)"));
    }
    let max = max_cp_criterion2_pooled(plan, k, sigma)?.value;
    if target > max + 1e-12 {
        return Err(Error::Unattainable { supremum: max });
    }
    let objective = |f1: f64| {
        let alloc = RegionAllocation::equal_rest(f1, k)?;
        cp_criterion2_pooled(plan, &alloc, &alloc, sigma).map(|e| e.value)
    };
    let sol = solve_fraction_on_grid(&objective, 1e-4, 1.0 / k as f64, target, CRITERION_II_GRID)?;
    Ok(FractionSolution {
        fraction: sol.fraction,
        raw_root: sol.raw_root,
        achieved_cp: sol.achieved,
    })
}

/// Binary pooled criterion II. Exact mode enumerates the joint law of the
/// per-study response totals restricted by the weighted regional
/// indicators and conditions on both exact rejection probabilities;
/// Monte Carlo mode simulates both trials.
pub fn cp_criterion2_pooled_binary(
    plan: &TwoStudyPlan,
    alloc1: &RegionAllocation,
    alloc2: &RegionAllocation,
    mode: crate::consistency_one::EvalMode,
    tie_policy: TiePolicy,
) -> Result<CpEstimate> {
    plan.validate()?;
    if !plan.study1.endpoint.is_binary() {
        return Err(Error::invalid(
            "cp_criterion2_pooled_binary needs binary endpoints",
        ));
    }
    match mode {
        crate::consistency_one::EvalMode::Exact { budget } => {
            exact_pooled_binary(plan, alloc1, alloc2, tie_policy, budget)
        }
        crate::consistency_one::EvalMode::MonteCarlo { replications, seed } => {
            let config = SimConfig {
                replications,
                seed,
                tie_policy,
                scenario: Scenario::TwoStudy {
                    plan: *plan,
                    alloc1: alloc1.clone(),
                    alloc2: alloc2.clone(),
                    criterion: CriterionChoice::SameTrend,
                },
            };
            let res = simulate::empirical_cp(&config)?;
            Ok(CpEstimate::monte_carlo(
                res.empirical_cp,
                res.mc_se,
                res.replications,
            ))
        }
    }
}

fn rates(plan: &StudyPlan) -> (f64, f64) {
    match plan.endpoint {
        crate::design::Endpoint::Binary { p_t, p_c } => (p_t, p_c),
        _ => unreachable!("validated binary endpoint"),
    }
}

/// Exact pooled enumeration over the 4-D joint law of per-study response
/// totals, regions folded in one at a time.
fn exact_pooled_binary(
    plan: &TwoStudyPlan,
    alloc1: &RegionAllocation,
    alloc2: &RegionAllocation,
    tie: TiePolicy,
    budget: u128,
) -> Result<CpEstimate> {
    if alloc1.regions() != alloc2.regions() {
        return Err(Error::invalid(
            "allocations must cover the same regions in both studies",
        ));
    }
    let arms1 = regional_arm_sizes(&plan.study1, alloc1);
    let arms2 = regional_arm_sizes(&plan.study2, alloc2);
    let (p_t1, p_c1) = rates(&plan.study1);
    let (p_t2, p_c2) = rates(&plan.study2);
    let study_totals = (plan.study1.n_total(), plan.study2.n_total());
    let z = norm_quantile(1.0 - plan.params.alpha)?;

    // running[idx(u1, v1, u2, v2)] with dims growing per folded region
    let mut dims = [1usize; 4];
    let mut running = vec![1.0f64];
    let mut spent: u128 = 0;
    for (a1, a2) in arms1.iter().zip(&arms2) {
        let cells = (a1.n_t + 1) as u128
            * (a1.n_c + 1) as u128
            * (a2.n_t + 1) as u128
            * (a2.n_c + 1) as u128;
        spent = spent.saturating_add(running.len() as u128 * cells);
        if spent > budget {
            return Err(Error::EnumerationBudget {
                required: spent,
                budget,
            });
        }
        let pm = |n: u64, p: f64| -> Vec<f64> {
            (0..=n).map(|x| binom_pmf(x, n, p).unwrap_or(0.0)).collect()
        };
        let (pt1, pc1, pt2, pc2) = (
            pm(a1.n_t, p_t1),
            pm(a1.n_c, p_c1),
            pm(a2.n_t, p_t2),
            pm(a2.n_c, p_c2),
        );
        let new_dims = [
            dims[0] + a1.n_t as usize,
            dims[1] + a1.n_c as usize,
            dims[2] + a2.n_t as usize,
            dims[3] + a2.n_c as usize,
        ];
        let mut next = vec![0.0f64; new_dims.iter().product()];
        let idx = |d: &[usize; 4], i: usize, j: usize, k: usize, l: usize| {
            ((i * d[1] + j) * d[2] + k) * d[3] + l
        };
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    for l in 0..dims[3] {
                        let mass = running[idx(&dims, i, j, k, l)];
                        if mass == 0.0 {
                            continue;
                        }
                        for x1 in 0..=a1.n_t as usize {
                            let p1 = mass * pt1[x1];
                            if p1 == 0.0 {
                                continue;
                            }
                            for y1 in 0..=a1.n_c as usize {
                                let q1 = p1 * pc1[y1];
                                for x2 in 0..=a2.n_t as usize {
                                    let q2 = q1 * pt2[x2];
                                    if q2 == 0.0 {
                                        continue;
                                    }
                                    for y2 in 0..=a2.n_c as usize {
                                        let trend = crate::simulate::pooled_trend_numerator(
                                            study_totals,
                                            (x1 as u64, a1.n_t, y1 as u64, a1.n_c),
                                            (x2 as u64, a2.n_t, y2 as u64, a2.n_c),
                                        );
                                        if !tie.passes_exact(trend) {
                                            continue;
                                        }
                                        next[idx(&new_dims, i + x1, j + y1, k + x2, l + y2)] +=
                                            q2 * pc2[y2];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        dims = new_dims;
        running = next;
    }

    // numerator over the product of the two rejection regions
    let reject1: Vec<bool> = (0..dims[0] as u64)
        .flat_map(|u| (0..dims[1] as u64).map(move |v| (u, v)))
        .map(|(u, v)| wald_rejects(u, v, plan.study1.n_t, plan.study1.n_c, z))
        .collect();
    let reject2: Vec<bool> = (0..dims[2] as u64)
        .flat_map(|u| (0..dims[3] as u64).map(move |v| (u, v)))
        .map(|(u, v)| wald_rejects(u, v, plan.study2.n_t, plan.study2.n_c, z))
        .collect();
    let mut numerator = 0.0;
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            if !reject1[i * dims[1] + j] {
                continue;
            }
            for k in 0..dims[2] {
                for l in 0..dims[3] {
                    if reject2[k * dims[3] + l] {
                        numerator += running[((i * dims[1] + j) * dims[2] + k) * dims[3] + l];
                    }
                }
            }
        }
    }

    let rejection_prob = |plan: &StudyPlan, p_t: f64, p_c: f64| -> f64 {
        let pmf_t: Vec<f64> = (0..=plan.n_t)
            .map(|u| binom_pmf(u, plan.n_t, p_t).unwrap_or(0.0))
            .collect();
        let pmf_c: Vec<f64> = (0..=plan.n_c)
            .map(|v| binom_pmf(v, plan.n_c, p_c).unwrap_or(0.0))
            .collect();
        let mut total = 0.0;
        for u in 0..=plan.n_t {
            for v in 0..=plan.n_c {
                if wald_rejects(u, v, plan.n_t, plan.n_c, z) {
                    total += pmf_t[u as usize] * pmf_c[v as usize];
                }
            }
        }
        total
    };
    let denom = rejection_prob(&plan.study1, p_t1, p_c1) * rejection_prob(&plan.study2, p_t2, p_c2);
    if denom <= 0.0 {
        return Err(Error::DegenerateSimulation { replications: 0 });
    }
    Ok(CpEstimate::exact(numerator / denom))
}

/// Monte Carlo solver for the pooled binary criterion II: smallest shared
/// fraction on the criterion-II planning grid whose equal-rest designs
/// attain the target, common random numbers across candidates, region of
/// interest sized by ceiling in both studies.
#[allow(clippy::too_many_arguments)]
pub fn solve_f1_criterion2_pooled_binary(
    plan: &TwoStudyPlan,
    k: usize,
    target: f64,
    replications: u64,
    seed: u64,
    tie_policy: TiePolicy,
) -> Result<FractionSolution> {
    plan.validate()?;
    if k < 2 {
        return Err(Error::invalid("equal-rest structure needs K >= 2"));
    }
    if !plan.study1.endpoint.is_binary() {
        return Err(Error::invalid("binary solver needs binary endpoints"));
    }
    for study in [&plan.study1, &plan.study2] {
        if study.n_t <= 2 * k as u64 || study.n_c <= 2 * k as u64 {
            return Err(Error::invalid(format!(
                "plan too small to allocate {k} regions per arm"
            )));
        }
    }
    let z = norm_quantile(1.0 - plan.params.alpha)?;
    let mut last = 0.0;
    let mut grid_idx = 1u64;
    loop {
        let f1 = grid_idx as f64 * CRITERION_II_GRID;
        if f1 >= 1.0 / k as f64 {
            return Err(Error::Unattainable { supremum: last });
        }
        let arms1 = crate::consistency_one::equal_rest_arms_ceil(&plan.study1, f1, k);
        let arms2 = crate::consistency_one::equal_rest_arms_ceil(&plan.study2, f1, k);
        let cp = simulate::binary_two_study_mc(
            &arms1,
            &arms2,
            (plan.study1.n_t, plan.study1.n_c),
            (plan.study2.n_t, plan.study2.n_c),
            rates(&plan.study1),
            rates(&plan.study2),
            z,
            tie_policy,
            replications,
            seed,
        )?;
        if cp.value >= target {
            return Ok(FractionSolution {
                fraction: f1,
                raw_root: f1,
                achieved_cp: cp.value,
            });
        }
        last = cp.value;
        grid_idx += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency_one::{cp_criterion1, EvalMode};
    use crate::design::Endpoint;

    fn params(alpha: f64, beta: f64, pi: f64, gamma: f64) -> DesignParams {
        DesignParams::new(alpha, beta, pi, gamma, 1.0).unwrap()
    }

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: {actual} vs {expected} (tol {tol:.1e})"
        );
    }

    fn homogeneous_plan(p: &DesignParams) -> TwoStudyPlan {
        let ep = Endpoint::Normal {
            sigma2_t: 16.0,
            sigma2_c: 16.0,
            d: 1.0,
        };
        let s = StudyPlan::size(ep, p).unwrap();
        TwoStudyPlan::new(s, s, *p).unwrap()
    }

    #[test]
    fn degenerate_pi_gives_half() {
        let p = params(0.025, 0.2, 1.0 - 1e-15, 0.2);
        let plan = homogeneous_plan(&p);
        let cp = cp_criterion1_pooled(
            &plan,
            &FractionPair { f1: 0.2, f2: 0.3 },
            SigmaDSource::DesignExact,
        )
        .unwrap()
        .value;
        assert_close(cp, 0.5, 1e-7, "pi -> 1 pooled");
    }

    #[test]
    fn homogeneous_single_integral_matches_double() {
        let p = params(0.025, 0.2, 0.5, 0.2);
        let plan = homogeneous_plan(&p);
        for pair in [
            FractionPair { f1: 0.5, f2: 0.5 },
            FractionPair {
                f1: 0.100,
                f2: 0.178,
            },
            FractionPair {
                f1: 0.080,
                f2: 0.320,
            },
        ] {
            let two_d = cp_criterion1_pooled(&plan, &pair, SigmaDSource::DesignExact)
                .unwrap()
                .value;
            let one_d = cp_criterion1_pooled_homogeneous(&p, &pair).unwrap().value;
            assert_close(two_d, one_d, 1e-6, "single vs double integral");
        }
    }

    #[test]
    fn homogeneous_invariance_in_c() {
        let p = params(0.025, 0.2, 0.5, 0.2);
        let c = 15.625;
        let pairs = [
            FractionPair {
                f1: 0.128,
                f2: 0.128,
            },
            FractionPair {
                f1: 0.100,
                f2: 1.0 / (c - 10.0),
            },
            FractionPair {
                f1: 0.080,
                f2: 0.320,
            },
        ];
        let base = cp_criterion1_homogeneous_by_c(&p, c).unwrap().value;
        for pair in pairs {
            let v = cp_criterion1_pooled_homogeneous(
                &p,
                &FractionPair {
                    f1: pair.f1,
                    f2: 1.0 / (c - 1.0 / pair.f1),
                },
            )
            .unwrap()
            .value;
            assert_close(v, base, 1e-6, "c-invariance");
        }
    }

    #[test]
    fn study_swap_symmetry_exact() {
        let p = params(0.025, 0.2, 0.5, 0.2);
        let ep1 = Endpoint::Binary { p_t: 0.6, p_c: 0.5 };
        let ep2 = Endpoint::Binary { p_t: 0.9, p_c: 0.8 };
        let s1 = StudyPlan::size(ep1, &p).unwrap();
        let s2 = StudyPlan::size(ep2, &p).unwrap();
        let fwd = TwoStudyPlan::new(s1, s2, p).unwrap();
        let rev = TwoStudyPlan::new(s2, s1, p).unwrap();
        let pair = FractionPair { f1: 0.15, f2: 0.22 };
        let swapped = FractionPair { f1: 0.22, f2: 0.15 };
        let a = cp_criterion1_pooled(&fwd, &pair, SigmaDSource::DesignExact)
            .unwrap()
            .value;
        let b = cp_criterion1_pooled(&rev, &swapped, SigmaDSource::DesignExact)
            .unwrap()
            .value;
        assert_close(a, b, 1e-9, "study swap");
    }

    #[test]
    fn pooled_monotonicity_in_pi_and_fractions() {
        let base = params(0.025, 0.2, 0.5, 0.2);
        let plan = homogeneous_plan(&base);
        let cp = |pi: f64, f1: f64, f2: f64| {
            let p = params(0.025, 0.2, pi, 0.2);
            let plan = TwoStudyPlan::new(plan.study1, plan.study2, p).unwrap();
            cp_criterion1_pooled(&plan, &FractionPair { f1, f2 }, SigmaDSource::DesignExact)
                .unwrap()
                .value
        };
        assert!(cp(0.6, 0.2, 0.2) < cp(0.5, 0.2, 0.2), "decreasing in pi");
        assert!(cp(0.5, 0.25, 0.2) > cp(0.5, 0.2, 0.2), "increasing in f1");
        assert!(cp(0.5, 0.2, 0.25) > cp(0.5, 0.2, 0.2), "increasing in f2");
    }

    #[test]
    fn pooling_dominates_independent_evaluation() {
        // pooled criterion-I probability at (f, f) is at least the product
        // of the two one-study probabilities at f
        let p = params(0.05, 0.2, 0.5, 0.2);
        let plan = homogeneous_plan(&p);
        for &f in &[0.1, 0.2, 0.3] {
            let pooled = cp_criterion1_pooled(
                &plan,
                &FractionPair { f1: f, f2: f },
                SigmaDSource::DesignExact,
            )
            .unwrap()
            .value;
            let single = cp_criterion1(&p, f).unwrap().value;
            assert!(
                pooled >= single * single - 1e-9,
                "pooling bound violated at f={f}: {pooled} < {}",
                single * single
            );
        }
    }

    #[test]
    fn c_solver_roundtrip() {
        let p = params(0.05, 0.2, 0.5, 0.2);
        let at_ten = cp_criterion1_homogeneous_by_c(&p, 10.0).unwrap().value;
        let sol = solve_c_homogeneous(&p, at_ten).unwrap();
        assert_close(sol.c, 10.0, 1e-6, "c roundtrip");

        // derived check: solve at another target and re-evaluate
        let p2 = params(0.05, 0.2, 0.5, 0.1);
        let sol = solve_c_homogeneous(&p2, 0.9).unwrap();
        let back = cp_criterion1_homogeneous_by_c(&p2, sol.c).unwrap().value;
        assert!(back >= 0.9 - 1e-9, "achieved {back} below target");
        let below = cp_criterion1_homogeneous_by_c(&p2, 2.0 / (sol.equal_fraction - 0.001))
            .unwrap()
            .value;
        assert!(below < 0.9, "previous grid point should miss the target");
    }

    #[test]
    fn c_solver_higher_power_pair_chain() {
        // power 0.9 sizing chain: equal fraction 0.110, pairs at the
        // published grid values
        let p = params(0.025, 0.1, 0.5, 0.2);
        let sol = solve_c_homogeneous(&p, 0.8).unwrap();
        assert_close(sol.equal_fraction, 0.110, 1e-12, "equal fraction");
        let en = enumerate_fraction_pairs(sol.c, &[0.090, 0.080]).unwrap();
        assert_close(en.pairs[0].f2, 0.141428, 1e-5, "pair at 0.090");
        assert_close(en.pairs[1].f2, 0.176, 1e-6, "pair at 0.080");
    }

    #[test]
    fn pair_enumeration_and_skips() {
        let en = enumerate_fraction_pairs(15.625, &[0.100, 0.080, 0.128, 0.05]).unwrap();
        // 1/0.05 = 20 > c - 1: infeasible
        assert_eq!(en.skipped, vec![0.05]);
        let f2_of = |f1: f64| {
            en.pairs
                .iter()
                .find(|p| (p.f1 - f1).abs() < 1e-12)
                .unwrap()
                .f2
        };
        assert_close(f2_of(0.100), 0.177778, 1e-6, "pair at 0.100");
        assert_close(f2_of(0.080), 0.320, 1e-9, "pair at 0.080");
        assert_close(f2_of(0.128), 0.128, 1e-9, "equal split at 2/c");
    }

    #[test]
    fn pooled_criterion2_full_allocation_is_one() {
        let p = params(0.05, 0.2, 0.5, 0.2);
        let plan = homogeneous_plan(&p);
        let full = RegionAllocation::new(vec![1.0]).unwrap();
        let v = cp_criterion2_pooled(&plan, &full, &full, SigmaDSource::DesignExact)
            .unwrap()
            .value;
        assert_eq!(v, 1.0);
    }

    #[test]
    fn pooled_criterion2_equal_fraction_dominance() {
        let p = params(0.05, 0.2, 0.5, 0.2);
        let plan = homogeneous_plan(&p);
        let base = max_cp_criterion2_pooled(&plan, 3, SigmaDSource::DesignExact)
            .unwrap()
            .value;
        for &delta in &[0.01, 0.05] {
            let alloc =
                RegionAllocation::new(vec![1.0 / 3.0 + delta, 1.0 / 3.0 - delta, 1.0 / 3.0])
                    .unwrap();
            let v = cp_criterion2_pooled(&plan, &alloc, &alloc, SigmaDSource::DesignExact)
                .unwrap()
                .value;
            assert!(v < base, "perturbed allocation should not beat equal");
        }
    }

    #[test]
    fn pooled_binary_exact_matches_brute_monte_carlo() {
        let p = params(0.05, 0.2, 0.5, 0.2);
        let ep = Endpoint::Binary { p_t: 0.8, p_c: 0.4 };
        let s = StudyPlan::from_total(ep, 20, 1.0).unwrap();
        let plan = TwoStudyPlan::new(s, s, p).unwrap();
        let alloc = RegionAllocation::equal(2).unwrap();
        let exact = cp_criterion2_pooled_binary(
            &plan,
            &alloc,
            &alloc,
            EvalMode::exact(),
            TiePolicy::Strict,
        )
        .unwrap()
        .value;
        let mc = cp_criterion2_pooled_binary(
            &plan,
            &alloc,
            &alloc,
            EvalMode::monte_carlo(60_000, 11),
            TiePolicy::Strict,
        )
        .unwrap();
        assert!(
            (mc.value - exact).abs() <= 3.0 * mc.mc_se.unwrap(),
            "exact {exact} vs mc {}",
            mc.value
        );
    }

    #[test]
    fn pooled_binary_single_region_is_one() {
        let p = params(0.05, 0.2, 0.5, 0.2);
        let ep = Endpoint::Binary { p_t: 0.8, p_c: 0.4 };
        let s = StudyPlan::from_total(ep, 16, 1.0).unwrap();
        let plan = TwoStudyPlan::new(s, s, p).unwrap();
        let alloc = RegionAllocation::new(vec![1.0]).unwrap();
        let exact = cp_criterion2_pooled_binary(
            &plan,
            &alloc,
            &alloc,
            EvalMode::exact(),
            TiePolicy::Strict,
        )
        .unwrap()
        .value;
        assert_close(exact, 1.0, 1e-12, "single full region");
    }
}
