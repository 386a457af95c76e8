//! Regional consistency evaluation and sample size allocation for
//! multi-regional clinical trials.
//!
//! The library covers:
//!
//! - overall sample size for one-sided superiority designs with continuous
//!   or binary endpoints ([`design`]);
//! - consistency probabilities for a single trial under the
//!   effect-preservation and same-trend regional criteria, with regional
//!   fraction solvers ([`consistency_one`]);
//! - the pooled two-trial extensions of both criteria, including the
//!   homogeneous single-integral form and fraction-pair enumeration
//!   ([`consistency_two`]);
//! - exact enumeration for binary endpoints and a reproducible,
//!   schedule-independent Monte Carlo engine that double-checks every
//!   analytic value ([`simulate`]).
//!
//! Fraction solvers report the smallest value on a planning grid that
//! attains the target probability (a tenth of a percent for the
//! effect-preservation criterion, half a percent for the same-trend
//! criterion), alongside the exact root.
//!
//! ```
//! use mrct_core::*;
//!
//! # fn run() -> Result<()> {
//! // one-sided 0.025, power 0.8, preserve half the effect, target CP 0.8
//! let params = DesignParams::new(0.025, 0.2, 0.5, 0.2, 1.0)?;
//! let plan = StudyPlan::size(Endpoint::Binary { p_t: 0.6, p_c: 0.5 }, &params)?;
//! assert_eq!(plan.n_total(), 770);
//!
//! let sol = solve_fk_criterion1(&params)?;
//! assert!((sol.fraction - 0.230).abs() < 1e-12);
//! assert!(sol.achieved_cp >= 0.8);
//! # Ok(())
//! # }
//! # run().unwrap();
//! ```

pub mod consistency_one;
pub mod consistency_two;
pub mod design;
pub mod error;
pub mod quad;
pub mod simulate;
mod solve;
pub mod stats;
pub mod tables;

pub use consistency_one::{
    cp_criterion1, cp_criterion2, cp_criterion2_binary, max_cp_criterion2, solve_f1_criterion2,
    solve_f1_criterion2_binary, solve_fk_criterion1, CpEstimate, CpMethod, EvalMode,
    FractionSolution, TiePolicy,
};
pub use consistency_two::{
    cp_criterion1_homogeneous_by_c, cp_criterion1_pooled, cp_criterion1_pooled_homogeneous,
    cp_criterion2_pooled, cp_criterion2_pooled_binary, default_pair_grid, enumerate_fraction_pairs,
    max_cp_criterion2_pooled, solve_c_homogeneous, solve_f1_criterion2_pooled,
    solve_f1_criterion2_pooled_binary, solve_fk_pooled_equal, FractionPair, HomogeneousCSolution,
    PairEnumeration, SigmaDSource, TwoStudyPlan,
};
pub use design::{
    apportion, regional_arm_sizes, DesignParams, Endpoint, RegionAllocation, RegionArms, StudyPlan,
};
pub use error::{Error, Result};
pub use simulate::{
    empirical_cp, simulate_trial, CriterionChoice, Scenario, SimConfig, SimResult, TrialSummary,
};
