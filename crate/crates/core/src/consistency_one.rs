//! Consistency-probability evaluation and regional-fraction solving for a
//! single multi-regional trial.
//!
//! Criterion I asks the region of interest to retain a fraction pi of the
//! observed overall effect given overall significance; criterion II asks
//! every region to show the overall trend. Both are evaluated by
//! quadrature under the normal approximation; the binary criterion II also
//! has an exact enumeration over the joint rejection region and a
//! trial-level Monte Carlo mode.

use crate::design::{regional_arm_sizes, DesignParams, RegionAllocation, StudyPlan};
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, IntegralSpec1D};
use crate::simulate::{self, wald_rejects, CriterionChoice, Scenario, SimConfig};
use crate::solve::solve_fraction_on_grid;
use crate::stats::{binom_pmf, norm_pdf, norm_quantile, phi};

/// How a consistency probability was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpMethod {
    Quadrature,
    ExactEnum,
    MonteCarlo,
}

/// A consistency-probability value with provenance; Monte Carlo estimates
/// carry their standard error and replication count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpEstimate {
    pub value: f64,
    pub method: CpMethod,
    pub mc_se: Option<f64>,
    pub replications: Option<u64>,
}

impl CpEstimate {
    pub(crate) fn quadrature(value: f64) -> Self {
        CpEstimate {
            value,
            method: CpMethod::Quadrature,
            mc_se: None,
            replications: None,
        }
    }

    pub(crate) fn exact(value: f64) -> Self {
        CpEstimate {
            value,
            method: CpMethod::ExactEnum,
            mc_se: None,
            replications: None,
        }
    }

    pub(crate) fn monte_carlo(value: f64, mc_se: f64, replications: u64) -> Self {
        CpEstimate {
            value,
            method: CpMethod::MonteCarlo,
            mc_se: Some(mc_se),
            replications: Some(replications),
        }
    }
}

/// Direction of the regional trend indicator where discrete outcomes can
/// tie. `Strict` requires a strictly positive regional difference; the
/// alternative counts exact zeros as consistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    #[default]
    Strict,
    WeakInequality,
}

impl TiePolicy {
    #[inline]
    pub(crate) fn passes(&self, diff: f64) -> bool {
        match self {
            TiePolicy::Strict => diff > 0.0,
            TiePolicy::WeakInequality => diff >= 0.0,
        }
    }

    /// Integer form for binary count comparisons, where lattice ties carry
    /// real probability mass and must not be decided by rounding crumbs.
    #[inline]
    pub(crate) fn passes_exact(&self, numerator: i128) -> bool {
        match self {
            TiePolicy::Strict => numerator > 0,
            TiePolicy::WeakInequality => numerator >= 0,
        }
    }
}

/// Evaluation mode for the binary criterion-II probabilities.
#[derive(Debug, Clone, Copy)]
pub enum EvalMode {
    /// Exact enumeration with a cap on the number of accumulated products.
    Exact { budget: u128 },
    /// Trial-level Monte Carlo under a fixed seed.
    MonteCarlo { replications: u64, seed: u64 },
}

impl EvalMode {
    pub fn exact() -> Self {
        EvalMode::Exact {
            budget: DEFAULT_ENUM_BUDGET,
        }
    }

    pub fn monte_carlo(replications: u64, seed: u64) -> Self {
        EvalMode::MonteCarlo { replications, seed }
    }
}

pub const DEFAULT_ENUM_BUDGET: u128 = 100_000_000;

/// Solver output: the reported planning-grid fraction plus the exact root
/// and the consistency probability achieved at the reported fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionSolution {
    pub fraction: f64,
    pub raw_root: f64,
    pub achieved_cp: f64,
}

/// Reporting grid for criterion-I fractions (primary sizing deliverable,
/// tenth-of-a-percent resolution).
pub const CRITERION_I_GRID: f64 = 0.001;
/// Reporting grid for criterion-II fractions (accommodation regions,
/// half-percent resolution).
pub const CRITERION_II_GRID: f64 = 0.005;

/// Criterion-I consistency probability for a region holding fraction `f_k`:
/// the chance the regional effect retains fraction pi of the overall effect
/// given overall significance, under the normal approximation.
pub fn cp_criterion1(params: &DesignParams, f_k: f64) -> Result<CpEstimate> {
    params.validate()?;
    if !(f_k > 0.0 && f_k <= 1.0) {
        return Err(Error::invalid(format!(
            "regional fraction {f_k} must lie in (0, 1]"
        )));
    }
    if f_k == 1.0 {
        // Whole trial in the region: the regional effect is the overall one.
        return Ok(CpEstimate::quadrature(1.0));
    }
    let zs = params.z_sum();
    let z_beta = norm_quantile(1.0 - params.beta)?;
    let shrink = (1.0 - params.pi) / (1.0 / f_k - 1.0).sqrt();
    let integrand = move |u: f64| phi(shrink * (u + zs)) * norm_pdf(u);
    let value = integrate_1d(&IntegralSpec1D::new(-z_beta, &integrand))?;
    Ok(CpEstimate::quadrature(value / (1.0 - params.beta)))
}

/// Smallest fraction (on the criterion-I reporting grid) whose criterion-I
/// consistency probability reaches 1 - gamma. Free of N and K.
pub fn solve_fk_criterion1(params: &DesignParams) -> Result<FractionSolution> {
    params.validate()?;
    let target = 1.0 - params.gamma;
    let objective = |f: f64| cp_criterion1(params, f).map(|e| e.value);
    let sol = solve_fraction_on_grid(&objective, 1e-4, 1.0 - 1e-6, target, CRITERION_I_GRID)?;
    Ok(FractionSolution {
        fraction: sol.fraction,
        raw_root: sol.raw_root,
        achieved_cp: sol.achieved,
    })
}

/// Criterion-II consistency probability: every region's observed effect
/// shares the overall trend given overall significance, under the normal
/// approximation (regional deviations treated as conditionally independent
/// given the overall estimate).
pub fn cp_criterion2(params: &DesignParams, alloc: &RegionAllocation) -> Result<CpEstimate> {
    params.validate()?;
    let fractions = alloc.fractions();
    if fractions.iter().all(|&f| f == 1.0) {
        return Ok(CpEstimate::quadrature(1.0));
    }
    let zs = params.z_sum();
    let z_beta = norm_quantile(1.0 - params.beta)?;
    let scales: Vec<f64> = fractions
        .iter()
        .map(|&f| {
            if f == 1.0 {
                f64::INFINITY
            } else {
                1.0 / (1.0 / f - 1.0).sqrt()
            }
        })
        .collect();
    let integrand = move |u: f64| {
        let x = u + zs;
        let mut p = norm_pdf(u);
        for &s in &scales {
            if s.is_finite() {
                p *= phi(s * x);
            }
        }
        p
    };
    let value = integrate_1d(&IntegralSpec1D::new(-z_beta, &integrand))?;
    Ok(CpEstimate::quadrature(value / (1.0 - params.beta)))
}

/// Criterion-II ceiling: the consistency probability at equal regional
/// fractions, which maximizes it over allocations and decreases in K.
pub fn max_cp_criterion2(params: &DesignParams, k: usize) -> Result<CpEstimate> {
    if k < 2 {
        return Err(Error::invalid("criterion II ceilings need K >= 2"));
    }
    cp_criterion2(params, &RegionAllocation::equal(k)?)
}

/// Smallest region-of-interest fraction (criterion-II planning grid) whose
/// equal-rest allocation attains the target criterion-II probability. When
/// no grid point can attain it (target at the ceiling), the exact root is
/// reported instead.
pub fn solve_f1_criterion2(
    params: &DesignParams,
    k: usize,
    target: f64,
) -> Result<FractionSolution> {
    params.validate()?;
    if k < 2 {
        return Err(Error::invalid("equal-rest structure needs K >= 2"));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid("target must lie in (0, 1)"));
    }
    let max = max_cp_criterion2(params, k)?.value;
    if target > max + 1e-12 {
        return Err(Error::Unattainable { supremum: max });
    }
    let objective =
        |f1: f64| cp_criterion2(params, &RegionAllocation::equal_rest(f1, k)?).map(|e| e.value);
    let sol = solve_fraction_on_grid(&objective, 1e-4, 1.0 / k as f64, target, CRITERION_II_GRID)?;
    Ok(FractionSolution {
        fraction: sol.fraction,
        raw_root: sol.raw_root,
        achieved_cp: sol.achieved,
    })
}

/// Binary-endpoint criterion-II consistency probability.
///
/// Exact mode enumerates the joint law of per-region response counts,
/// restricted by the regional-trend indicator, against the unpooled Wald
/// rejection region of the overall test, and conditions on the exact
/// rejection probability. Monte Carlo mode simulates whole trials.
/// Regional arm sizes come from per-arm largest-remainder apportionment.
pub fn cp_criterion2_binary(
    plan: &StudyPlan,
    alloc: &RegionAllocation,
    params: &DesignParams,
    mode: EvalMode,
    tie_policy: TiePolicy,
) -> Result<CpEstimate> {
    params.validate()?;
    let (p_t, p_c) = match plan.endpoint {
        crate::design::Endpoint::Binary { p_t, p_c } => (p_t, p_c),
        _ => {
            return Err(Error::invalid(
                "cp_criterion2_binary needs a binary endpoint",
            ))
        }
    };
    match mode {
        EvalMode::Exact { budget } => {
            let arms = regional_arm_sizes(plan, alloc);
            let z = norm_quantile(1.0 - params.alpha)?;
            exact_binary_cp(&arms, plan.n_t, plan.n_c, p_t, p_c, z, tie_policy, budget)
        }
        EvalMode::MonteCarlo { replications, seed } => {
            let config = SimConfig {
                replications,
                seed,
                tie_policy,
                scenario: Scenario::OneStudy {
                    plan: *plan,
                    alloc: alloc.clone(),
                    params: *params,
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

/// Exact enumeration: convolve per-region restricted count distributions
/// into the joint law of the overall response totals, then sum over the
/// Wald rejection region.
#[allow(clippy::too_many_arguments)]
fn exact_binary_cp(
    arms: &[crate::design::RegionArms],
    n_t: u64,
    n_c: u64,
    p_t: f64,
    p_c: f64,
    z: f64,
    tie_policy: TiePolicy,
    budget: u128,
) -> Result<CpEstimate> {
    // running[u][v] = P(all regions so far trend-positive, totals = (u, v))
    let mut running = vec![vec![1.0f64]];
    let mut spent: u128 = 0;
    for arm in arms {
        let rows = running.len();
        let cols = running[0].len();
        let cells = (arm.n_t + 1) as u128 * (arm.n_c + 1) as u128;
        spent = spent.saturating_add(rows as u128 * cols as u128 * cells);
        if spent > budget {
            return Err(Error::EnumerationBudget {
                required: spent,
                budget,
            });
        }
        let pmf_t: Vec<f64> = (0..=arm.n_t)
            .map(|a| binom_pmf(a, arm.n_t, p_t).unwrap_or(0.0))
            .collect();
        let pmf_c: Vec<f64> = (0..=arm.n_c)
            .map(|b| binom_pmf(b, arm.n_c, p_c).unwrap_or(0.0))
            .collect();
        let mut next = vec![vec![0.0f64; cols + arm.n_c as usize]; rows + arm.n_t as usize];
        for (i, row) in running.iter().enumerate() {
            for (j, &mass) in row.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for a in 0..=arm.n_t {
                    let pa = pmf_t[a as usize];
                    if pa == 0.0 {
                        continue;
                    }
                    for b in 0..=arm.n_c {
                        // regional trend: a / n_t1 vs b / n_c1, cross-multiplied
                        let diff = (a * arm.n_c) as f64 - (b * arm.n_t) as f64;
                        if !tie_policy.passes(diff) {
                            continue;
                        }
                        next[i + a as usize][j + b as usize] += mass * pa * pmf_c[b as usize];
                    }
                }
            }
        }
        running = next;
    }

    let mut numerator = 0.0;
    let mut rejection_prob = 0.0;
    let pmf_tot_t: Vec<f64> = (0..=n_t)
        .map(|u| binom_pmf(u, n_t, p_t).unwrap_or(0.0))
        .collect();
    let pmf_tot_c: Vec<f64> = (0..=n_c)
        .map(|v| binom_pmf(v, n_c, p_c).unwrap_or(0.0))
        .collect();
    for u in 0..=n_t {
        for v in 0..=n_c {
            if wald_rejects(u, v, n_t, n_c, z) {
                numerator += running[u as usize][v as usize];
                rejection_prob += pmf_tot_t[u as usize] * pmf_tot_c[v as usize];
            }
        }
    }
    if rejection_prob <= 0.0 {
        return Err(Error::DegenerateSimulation { replications: 0 });
    }
    Ok(CpEstimate::exact(numerator / rejection_prob))
}

/// Regional arm sizes for the binary solver: the region being sized gets
/// the ceiling of its per-arm share (never under-allocated), the remaining
/// regions split the rest evenly by largest remainder.
pub(crate) fn equal_rest_arms_ceil(
    plan: &StudyPlan,
    f1: f64,
    k: usize,
) -> Vec<crate::design::RegionArms> {
    let split = |total: u64| -> Vec<u64> {
        let first = ((f1 * total as f64).ceil() as u64).clamp(1, total - (k as u64 - 1));
        let rest = total - first;
        let mut sizes = vec![first];
        sizes.extend(crate::design::apportion(
            &vec![1.0 / (k - 1) as f64; k - 1],
            rest,
        ));
        sizes
    };
    split(plan.n_t)
        .into_iter()
        .zip(split(plan.n_c))
        .map(|(n_t, n_c)| crate::design::RegionArms { n_t, n_c })
        .collect()
}

/// Monte Carlo solver for the binary criterion II: smallest fraction on the
/// criterion-II planning grid whose equal-rest design attains the target,
/// using common random numbers across candidates. The region of interest is
/// sized by ceiling so the reported fraction is never under-allocated.
pub fn solve_f1_criterion2_binary(
    plan: &StudyPlan,
    params: &DesignParams,
    k: usize,
    target: f64,
    replications: u64,
    seed: u64,
    tie_policy: TiePolicy,
) -> Result<FractionSolution> {
    params.validate()?;
    if k < 2 {
        return Err(Error::invalid("equal-rest structure needs K >= 2"));
    }
    if plan.n_t <= 2 * k as u64 || plan.n_c <= 2 * k as u64 {
        return Err(Error::invalid(format!(
            "plan too small to allocate {k} regions per arm"
        )));
    }
    let z = norm_quantile(1.0 - params.alpha)?;
    let (p_t, p_c) = match plan.endpoint {
        crate::design::Endpoint::Binary { p_t, p_c } => (p_t, p_c),
        _ => return Err(Error::invalid("binary solver needs a binary endpoint")),
    };
    let mut last = 0.0;
    let mut grid_idx = 1u64;
    loop {
        let f1 = grid_idx as f64 * CRITERION_II_GRID;
        if f1 >= 1.0 / k as f64 {
            return Err(Error::Unattainable { supremum: last });
        }
        let arms = equal_rest_arms_ceil(plan, f1, k);
        let cp = simulate::binary_one_study_mc(
            &arms,
            plan.n_t,
            plan.n_c,
            p_t,
            p_c,
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
