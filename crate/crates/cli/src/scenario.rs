//! Build core design objects from a resolved configuration.

use anyhow::{anyhow, bail, Result};
use mrct_core::{
    DesignParams, Endpoint, RegionAllocation, SigmaDSource, StudyPlan, TiePolicy, TwoStudyPlan,
};

use crate::config::FileConfig;

pub fn design_params(cfg: &FileConfig) -> Result<DesignParams> {
    let alpha = cfg.alpha.unwrap_or(0.025);
    let power = cfg.power.unwrap_or(0.8);
    if !(power > 0.5 && power < 1.0) {
        bail!("power must lie in (0.5, 1), got {power}");
    }
    let params = DesignParams::new(
        alpha,
        1.0 - power,
        cfg.pi.unwrap_or(0.5),
        cfg.gamma.unwrap_or(0.2),
        cfg.ratio.unwrap_or(1.0),
    )?;
    for warning in params.guidance_warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(params)
}

fn endpoint_from(
    kind: Option<&str>,
    d: Option<f64>,
    s2t: Option<f64>,
    s2c: Option<f64>,
    p_t: Option<f64>,
    p_c: Option<f64>,
) -> Result<Endpoint> {
    match kind {
        Some("normal") => Ok(Endpoint::Normal {
            sigma2_t: s2t.ok_or_else(|| anyhow!("normal endpoint needs --sigma2-t"))?,
            sigma2_c: s2c.ok_or_else(|| anyhow!("normal endpoint needs --sigma2-c"))?,
            d: d.ok_or_else(|| anyhow!("normal endpoint needs --d"))?,
        }),
        Some("binary") => Ok(Endpoint::Binary {
            p_t: p_t.ok_or_else(|| anyhow!("binary endpoint needs --p-t"))?,
            p_c: p_c.ok_or_else(|| anyhow!("binary endpoint needs --p-c"))?,
        }),
        Some(other) => bail!("unknown endpoint kind '{other}' (expected normal or binary)"),
        None => bail!("an endpoint is required: --endpoint normal|binary plus its parameters"),
    }
}

pub fn endpoint1(cfg: &FileConfig) -> Result<Endpoint> {
    let ep = endpoint_from(
        cfg.endpoint.as_deref(),
        cfg.d,
        cfg.sigma2_t,
        cfg.sigma2_c,
        cfg.p_t,
        cfg.p_c,
    )?;
    ep.validate()?;
    Ok(ep)
}

/// Study-2 endpoint: study-1 values with per-field overrides.
pub fn endpoint2(cfg: &FileConfig) -> Result<Endpoint> {
    let ep = endpoint_from(
        cfg.endpoint.as_deref(),
        cfg.d2.or(cfg.d),
        cfg.sigma2_t2.or(cfg.sigma2_t),
        cfg.sigma2_c2.or(cfg.sigma2_c),
        cfg.p_t2.or(cfg.p_t),
        cfg.p_c2.or(cfg.p_c),
    )?;
    ep.validate()?;
    Ok(ep)
}

pub fn plan1(cfg: &FileConfig, params: &DesignParams) -> Result<StudyPlan> {
    let ep = endpoint1(cfg)?;
    Ok(match cfg.n_total {
        Some(n) => StudyPlan::from_total(ep, n, params.ratio)?,
        None => StudyPlan::size(ep, params)?,
    })
}

pub fn plan2(cfg: &FileConfig, params: &DesignParams) -> Result<StudyPlan> {
    let ep = endpoint2(cfg)?;
    Ok(match cfg.n_total2 {
        Some(n) => StudyPlan::from_total(ep, n, params.ratio)?,
        None => StudyPlan::size(ep, params)?,
    })
}

pub fn two_study_plan(cfg: &FileConfig, params: &DesignParams) -> Result<TwoStudyPlan> {
    Ok(TwoStudyPlan::new(
        plan1(cfg, params)?,
        plan2(cfg, params)?,
        *params,
    )?)
}

/// Allocation for one study: an explicit vector, an equal split of K, or an
/// equal-rest structure around the fraction of interest.
pub fn allocation(
    fractions: &Option<Vec<f64>>,
    f: Option<f64>,
    k: Option<usize>,
    equal_rest: bool,
) -> Result<RegionAllocation> {
    if let Some(v) = fractions {
        return Ok(RegionAllocation::new(v.clone())?);
    }
    match (f, k) {
        (Some(f1), Some(k)) if equal_rest => Ok(RegionAllocation::equal_rest(f1, k)?),
        (Some(f1), None) | (Some(f1), Some(_)) => {
            // fraction of interest vs the rest of the world
            Ok(RegionAllocation::new(vec![f1, 1.0 - f1])?)
        }
        (None, Some(k)) => Ok(RegionAllocation::equal(k)?),
        (None, None) => bail!(
            "an allocation is required: --fractions, --f (with optional --equal-rest --k), or --k"
        ),
    }
}

pub fn tie_policy(cfg: &FileConfig) -> Result<TiePolicy> {
    match cfg.tie_policy.as_deref() {
        None | Some("strict") => Ok(TiePolicy::Strict),
        Some("weak") => Ok(TiePolicy::WeakInequality),
        Some(other) => bail!("unknown tie policy '{other}' (expected strict or weak)"),
    }
}

pub fn sigma_source(cfg: &FileConfig) -> Result<SigmaDSource> {
    match cfg.sigma_source.as_deref() {
        None | Some("design") => Ok(SigmaDSource::DesignExact),
        Some("actual") => Ok(SigmaDSource::ActualN),
        Some(other) => bail!("unknown sigma source '{other}' (expected design or actual)"),
    }
}
