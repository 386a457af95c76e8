//! `mrct` — regional consistency evaluation for multi-regional trials.
//!
//! Subcommands: sample-size, cp, solve-fraction, pairs, simulate,
//! reproduce. Exit codes: 0 ok, 2 invalid input, 3 enumeration budget
//! exceeded, 4 unattainable target, 5 degenerate simulation.

mod config;
mod record;
mod reproduce;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::FileConfig;
use mrct_core::*;
use record::{fraction_display, RunRecord};
use scenario::*;

#[derive(Parser)]
#[command(
    name = "mrct",
    version,
    about = "Regional consistency probabilities and sample fractions for multi-regional trials"
)]
struct Cli {
    /// TOML or JSON scenario file (flags override file values)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit a structured run record to stdout instead of plain text
    #[arg(long, global = true)]
    json: bool,
    /// Output file (CSV for simulate/reproduce)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for Monte Carlo commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 or absent: library default; env MRCT_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Clone)]
struct ScenarioFlags {
    /// One-sided significance level
    #[arg(long)]
    alpha: Option<f64>,
    /// Design power (1 - beta)
    #[arg(long)]
    power: Option<f64>,
    /// Effect-preservation fraction for criterion 1
    #[arg(long)]
    pi: Option<f64>,
    /// Consistency risk; the target probability is 1 - gamma
    #[arg(long)]
    gamma: Option<f64>,
    /// Treatment:control randomization ratio
    #[arg(long)]
    ratio: Option<f64>,
    /// Endpoint family: normal | binary
    #[arg(long)]
    endpoint: Option<String>,
    /// Mean difference (normal endpoint)
    #[arg(long)]
    d: Option<f64>,
    /// Treatment-arm variance (normal endpoint)
    #[arg(long = "sigma2-t")]
    sigma2_t: Option<f64>,
    /// Control-arm variance (normal endpoint)
    #[arg(long = "sigma2-c")]
    sigma2_c: Option<f64>,
    /// Treatment response rate (binary endpoint)
    #[arg(long = "p-t")]
    p_t: Option<f64>,
    /// Control response rate (binary endpoint)
    #[arg(long = "p-c")]
    p_c: Option<f64>,
    /// Fixed total sample size (otherwise sized from the design)
    #[arg(long = "n-total")]
    n_total: Option<u64>,
    /// Study-2 mean difference (defaults to study 1)
    #[arg(long)]
    d2: Option<f64>,
    /// Study-2 treatment variance
    #[arg(long = "sigma2-t2")]
    sigma2_t2: Option<f64>,
    /// Study-2 control variance
    #[arg(long = "sigma2-c2")]
    sigma2_c2: Option<f64>,
    /// Study-2 treatment rate
    #[arg(long = "p-t2")]
    p_t2: Option<f64>,
    /// Study-2 control rate
    #[arg(long = "p-c2")]
    p_c2: Option<f64>,
    /// Study-2 fixed total
    #[arg(long = "n-total2")]
    n_total2: Option<u64>,
    /// Regional fraction of interest (study 1)
    #[arg(long)]
    f: Option<f64>,
    /// Regional fraction of interest in study 2
    #[arg(long)]
    f2: Option<f64>,
    /// Explicit regional fractions, comma separated
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Study-2 regional fractions
    #[arg(long, value_delimiter = ',')]
    fractions2: Option<Vec<f64>>,
    /// Number of regions
    #[arg(long)]
    k: Option<usize>,
    /// Give region 1 the fraction of interest and split the rest equally
    #[arg(long)]
    equal_rest: bool,
    /// Monte Carlo replications
    #[arg(long)]
    reps: Option<u64>,
    /// Tie policy for the same-trend indicator: strict | weak
    #[arg(long)]
    tie_policy: Option<String>,
    /// Effect-sd convention for pooled integrands: design | actual
    #[arg(long)]
    sigma_source: Option<String>,
}

impl ScenarioFlags {
    fn into_config(
        self,
        criterion: Option<u8>,
        studies: Option<u8>,
        method: Option<String>,
    ) -> FileConfig {
        FileConfig {
            schema: Some(1),
            alpha: self.alpha,
            power: self.power,
            pi: self.pi,
            gamma: self.gamma,
            ratio: self.ratio,
            endpoint: self.endpoint,
            d: self.d,
            sigma2_t: self.sigma2_t,
            sigma2_c: self.sigma2_c,
            p_t: self.p_t,
            p_c: self.p_c,
            n_total: self.n_total,
            d2: self.d2,
            sigma2_t2: self.sigma2_t2,
            sigma2_c2: self.sigma2_c2,
            p_t2: self.p_t2,
            p_c2: self.p_c2,
            n_total2: self.n_total2,
            criterion,
            studies,
            method,
            f: self.f,
            f2: self.f2,
            fractions: self.fractions,
            fractions2: self.fractions2,
            k: self.k,
            equal_rest: if self.equal_rest { Some(true) } else { None },
            reps: self.reps,
            tie_policy: self.tie_policy,
            sigma_source: self.sigma_source,
            ..FileConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Overall sample size for a one-sided superiority design
    SampleSize(ScenarioFlags),
    /// Evaluate a consistency probability
    Cp {
        /// Consistency criterion: 1 (effect preservation) | 2 (same trend)
        #[arg(long)]
        criterion: Option<u8>,
        /// Number of studies: 1 | 2
        #[arg(long)]
        studies: Option<u8>,
        /// Evaluation method: analytic | exact | mc
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        flags: ScenarioFlags,
    },
    /// Solve for the smallest regional fraction attaining the target
    SolveFraction {
        #[arg(long)]
        criterion: Option<u8>,
        #[arg(long)]
        studies: Option<u8>,
        /// binary criterion-2 solves use mc
        #[arg(long)]
        method: Option<String>,
        /// Target consistency probability (default 1 - gamma)
        #[arg(long)]
        target: Option<f64>,
        /// Solve the homogeneous two-study problem for c = 1/f1 + 1/f2 and
        /// list fraction pairs
        #[arg(long)]
        pair_c: bool,
        #[command(flatten)]
        flags: ScenarioFlags,
    },
    /// Enumerate fraction pairs attaining a given c = 1/f1 + 1/f2
    Pairs {
        /// The pair invariant c
        #[arg(long)]
        c: Option<f64>,
        /// First grid value for f1
        #[arg(long)]
        grid_start: Option<f64>,
        /// Grid step for f1
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Run the empirical consistency-probability protocol
    Simulate {
        #[arg(long)]
        criterion: Option<u8>,
        #[arg(long)]
        studies: Option<u8>,
        #[command(flatten)]
        flags: ScenarioFlags,
    },
    /// Regenerate published tables, worked examples, or the application
    /// example as CSV
    Reproduce {
        /// Table 1-6
        #[arg(long)]
        table: Option<u8>,
        /// Worked example 1-4
        #[arg(long)]
        example: Option<u8>,
        /// The two-study application example
        #[arg(long)]
        section4: bool,
        /// Monte Carlo replications per row
        #[arg(long)]
        reps: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = exit_code_for(&err);
            if code == 3 {
                eprintln!("hint: this design is beyond exact enumeration; try --method mc");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<mrct_core::Error>() {
        Some(Error::InvalidInput(_)) => 2,
        Some(Error::EnumerationBudget { .. }) => 3,
        Some(Error::Unattainable { .. }) => 4,
        Some(Error::DegenerateSimulation { .. }) => 5,
        Some(Error::QuadratureNonConvergence { .. }) => 1,
        None => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    let file_cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file_cfg.threads).or_else(|| {
        std::env::var("MRCT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }

    match cli.command {
        Command::SampleSize(flags) => {
            let mut cfg = flags.into_config(None, None, None).or(file_cfg);
            cfg.seed = cli.seed.or(cfg.seed);
            cmd_sample_size(cfg, cli.json)
        }
        Command::Cp {
            criterion,
            studies,
            method,
            flags,
        } => {
            let mut cfg = flags.into_config(criterion, studies, method).or(file_cfg);
            cfg.seed = cli.seed.or(cfg.seed);
            cmd_cp(cfg, cli.json)
        }
        Command::SolveFraction {
            criterion,
            studies,
            method,
            target,
            pair_c,
            flags,
        } => {
            let mut cfg = flags.into_config(criterion, studies, method).or(file_cfg);
            cfg.target = target.or(cfg.target);
            if pair_c {
                cfg.pair_c = Some(true);
            }
            cfg.seed = cli.seed.or(cfg.seed);
            cmd_solve_fraction(cfg, cli.json)
        }
        Command::Pairs {
            c,
            grid_start,
            grid_step,
        } => {
            let mut cfg = file_cfg;
            cfg.c = c.or(cfg.c);
            cfg.grid_start = grid_start.or(cfg.grid_start);
            cfg.grid_step = grid_step.or(cfg.grid_step);
            cmd_pairs(cfg, cli.json)
        }
        Command::Simulate {
            criterion,
            studies,
            flags,
        } => {
            let mut cfg = flags.into_config(criterion, studies, None).or(file_cfg);
            cfg.seed = cli.seed.or(cfg.seed);
            cmd_simulate(cfg, cli.json, cli.out.as_deref())
        }
        Command::Reproduce {
            table,
            example,
            section4,
            reps,
        } => {
            let seed = cli.seed.or(file_cfg.seed);
            let reps = reps.or(file_cfg.reps).unwrap_or(10_000);
            cmd_reproduce(table, example, section4, seed, reps, cli.out)
        }
    }
}

fn cmd_sample_size(cfg: FileConfig, as_json: bool) -> Result<()> {
    let params = design_params(&cfg)?;
    let plan = plan1(&cfg, &params)?;
    if as_json {
        let results = json!({
            "n_t": plan.n_t,
            "n_c": plan.n_c,
            "n_total": plan.n_total(),
        });
        RunRecord::new("sample-size", cfg, results).print();
    } else {
        println!("N_t = {}", plan.n_t);
        println!("N_c = {}", plan.n_c);
        println!("N   = {}", plan.n_total());
    }
    Ok(())
}

fn mc_settings(cfg: &FileConfig) -> Result<(u64, u64)> {
    let reps = cfg.reps.unwrap_or(10_000);
    let seed = cfg
        .seed
        .ok_or_else(|| anyhow!("--seed is required for Monte Carlo runs"))?;
    Ok((reps, seed))
}

fn cmd_cp(cfg: FileConfig, as_json: bool) -> Result<()> {
    let criterion = cfg.criterion.unwrap_or(1);
    let studies = cfg.studies.unwrap_or(1);
    let method = cfg.method.clone().unwrap_or_else(|| "analytic".to_string());
    let params = design_params(&cfg)?;
    let tie = tie_policy(&cfg)?;

    let estimate: CpEstimate = match (criterion, studies, method.as_str()) {
        (1, 1, "analytic") => {
            let f = cfg.f.ok_or_else(|| anyhow!("criterion 1 needs --f"))?;
            cp_criterion1(&params, f)?
        }
        (1, 1, "mc") => {
            let f = cfg.f.ok_or_else(|| anyhow!("criterion 1 needs --f"))?;
            let plan = plan1(&cfg, &params)?;
            let (reps, seed) = mc_settings(&cfg)?;
            let res = empirical_cp(&SimConfig {
                replications: reps,
                seed,
                tie_policy: tie,
                scenario: Scenario::OneStudy {
                    plan,
                    alloc: RegionAllocation::new(vec![f, 1.0 - f])?,
                    params,
                    criterion: CriterionChoice::EffectPreservation,
                },
            })?;
            CpEstimate {
                value: res.empirical_cp,
                method: CpMethod::MonteCarlo,
                mc_se: Some(res.mc_se),
                replications: Some(res.replications),
            }
        }
        (1, 2, "analytic") => {
            let plan = two_study_plan(&cfg, &params)?;
            let f1 = cfg
                .f
                .ok_or_else(|| anyhow!("pooled criterion 1 needs --f"))?;
            let f2 = cfg.f2.unwrap_or(f1);
            cp_criterion1_pooled(&plan, &FractionPair { f1, f2 }, sigma_source(&cfg)?)?
        }
        (1, 2, "mc") => {
            let plan = two_study_plan(&cfg, &params)?;
            let f1 = cfg
                .f
                .ok_or_else(|| anyhow!("pooled criterion 1 needs --f"))?;
            let f2 = cfg.f2.unwrap_or(f1);
            let (reps, seed) = mc_settings(&cfg)?;
            let res = empirical_cp(&SimConfig {
                replications: reps,
                seed,
                tie_policy: tie,
                scenario: Scenario::TwoStudy {
                    plan,
                    alloc1: RegionAllocation::new(vec![f1, 1.0 - f1])?,
                    alloc2: RegionAllocation::new(vec![f2, 1.0 - f2])?,
                    criterion: CriterionChoice::EffectPreservation,
                },
            })?;
            CpEstimate {
                value: res.empirical_cp,
                method: CpMethod::MonteCarlo,
                mc_se: Some(res.mc_se),
                replications: Some(res.replications),
            }
        }
        (2, 1, "analytic") => {
            let alloc = allocation(
                &cfg.fractions,
                cfg.f,
                cfg.k,
                cfg.equal_rest.unwrap_or(false),
            )?;
            cp_criterion2(&params, &alloc)?
        }
        (2, 1, "exact") => {
            let alloc = allocation(
                &cfg.fractions,
                cfg.f,
                cfg.k,
                cfg.equal_rest.unwrap_or(false),
            )?;
            let plan = plan1(&cfg, &params)?;
            cp_criterion2_binary(&plan, &alloc, &params, EvalMode::exact(), tie)?
        }
        (2, 1, "mc") => {
            let alloc = allocation(
                &cfg.fractions,
                cfg.f,
                cfg.k,
                cfg.equal_rest.unwrap_or(false),
            )?;
            let plan = plan1(&cfg, &params)?;
            let (reps, seed) = mc_settings(&cfg)?;
            let res = empirical_cp(&SimConfig {
                replications: reps,
                seed,
                tie_policy: tie,
                scenario: Scenario::OneStudy {
                    plan,
                    alloc,
                    params,
                    criterion: CriterionChoice::SameTrend,
                },
            })?;
            CpEstimate {
                value: res.empirical_cp,
                method: CpMethod::MonteCarlo,
                mc_se: Some(res.mc_se),
                replications: Some(res.replications),
            }
        }
        (2, 2, m) => {
            let alloc1 = allocation(
                &cfg.fractions,
                cfg.f,
                cfg.k,
                cfg.equal_rest.unwrap_or(false),
            )?;
            let alloc2 = if cfg.fractions2.is_some() || cfg.f2.is_some() {
                allocation(
                    &cfg.fractions2,
                    cfg.f2,
                    cfg.k,
                    cfg.equal_rest.unwrap_or(false),
                )?
            } else {
                alloc1.clone()
            };
            let plan = two_study_plan(&cfg, &params)?;
            match m {
                "analytic" => cp_criterion2_pooled(&plan, &alloc1, &alloc2, sigma_source(&cfg)?)?,
                "exact" => {
                    cp_criterion2_pooled_binary(&plan, &alloc1, &alloc2, EvalMode::exact(), tie)?
                }
                "mc" => {
                    let (reps, seed) = mc_settings(&cfg)?;
                    let res = empirical_cp(&SimConfig {
                        replications: reps,
                        seed,
                        tie_policy: tie,
                        scenario: Scenario::TwoStudy {
                            plan,
                            alloc1,
                            alloc2,
                            criterion: CriterionChoice::SameTrend,
                        },
                    })?;
                    CpEstimate {
                        value: res.empirical_cp,
                        method: CpMethod::MonteCarlo,
                        mc_se: Some(res.mc_se),
                        replications: Some(res.replications),
                    }
                }
                other => bail!("unknown method '{other}' (expected analytic, exact, or mc)"),
            }
        }
        (c, s, m) => bail!("unsupported combination: criterion {c}, studies {s}, method {m}"),
    };

    if as_json {
        let results = json!({
            "cp": estimate.value,
            "method": format!("{:?}", estimate.method),
            "mc_se": estimate.mc_se,
            "replications": estimate.replications,
        });
        RunRecord::new("cp", cfg, results).print();
    } else {
        match estimate.mc_se {
            Some(se) => println!(
                "CP = {:.4} (mc_se {:.4}, {} replications)",
                estimate.value,
                se,
                estimate.replications.unwrap_or(0)
            ),
            None => println!("CP = {:.4}", estimate.value),
        }
    }
    Ok(())
}

fn cmd_solve_fraction(cfg: FileConfig, as_json: bool) -> Result<()> {
    let criterion = cfg.criterion.unwrap_or(1);
    let studies = cfg.studies.unwrap_or(1);
    let params = design_params(&cfg)?;
    let target = cfg.target.unwrap_or(1.0 - params.gamma);

    if cfg.pair_c.unwrap_or(false) {
        // homogeneous two-study criterion-I sizing through the invariant c
        let sol = solve_c_homogeneous(&params, target)?;
        let grid = match (cfg.grid_start, cfg.grid_step) {
            (Some(start), step) => {
                let step = step.unwrap_or(0.01);
                let mut g = Vec::new();
                let mut f = start;
                while f <= 2.0 / sol.c + 1e-12 {
                    g.push(f);
                    f += step;
                }
                g
            }
            _ => default_pair_grid(sol.c),
        };
        let en = enumerate_fraction_pairs(sol.c, &grid)?;
        if as_json {
            let results = json!({
                "c": sol.c,
                "raw_c": sol.raw_c,
                "equal_fraction": sol.equal_fraction,
                "achieved_cp": sol.achieved_cp,
                "pairs": en.pairs.iter().map(|p| json!({"f1": p.f1, "f2": p.f2})).collect::<Vec<_>>(),
                "skipped": en.skipped,
            });
            RunRecord::new("solve-fraction", cfg, results).print();
        } else {
            println!(
                "c = {:.3} (equal fraction {})",
                sol.c,
                fraction_display(sol.equal_fraction)
            );
            println!("achieved CP = {:.4}", sol.achieved_cp);
            for pair in &en.pairs {
                println!(
                    "  f1 = {}  f2 = {}",
                    fraction_display(pair.f1),
                    fraction_display(pair.f2)
                );
            }
            for f1 in &en.skipped {
                eprintln!("note: f1 = {f1} admits no partner fraction below 1 at this c");
            }
        }
        return Ok(());
    }

    let method = cfg.method.clone().unwrap_or_else(|| "analytic".to_string());
    let sol: FractionSolution = match (criterion, studies, method.as_str()) {
        (1, 1, _) => {
            let p = DesignParams::new(
                params.alpha,
                params.beta,
                params.pi,
                1.0 - target,
                params.ratio,
            )?;
            solve_fk_criterion1(&p)?
        }
        (1, 2, _) => {
            let p = DesignParams::new(
                params.alpha,
                params.beta,
                params.pi,
                1.0 - target,
                params.ratio,
            )?;
            let plan = TwoStudyPlan::new(plan1(&cfg, &p)?, plan2(&cfg, &p)?, p)?;
            solve_fk_pooled_equal(&plan, sigma_source(&cfg)?)?
        }
        (2, 1, "mc") => {
            let k = cfg
                .k
                .ok_or_else(|| anyhow!("criterion 2 solve needs --k"))?;
            let plan = plan1(&cfg, &params)?;
            let (reps, seed) = mc_settings(&cfg)?;
            solve_f1_criterion2_binary(&plan, &params, k, target, reps, seed, tie_policy(&cfg)?)?
        }
        (2, 1, _) => {
            let k = cfg
                .k
                .ok_or_else(|| anyhow!("criterion 2 solve needs --k"))?;
            solve_f1_criterion2(&params, k, target)?
        }
        (2, 2, "mc") => {
            let k = cfg
                .k
                .ok_or_else(|| anyhow!("criterion 2 solve needs --k"))?;
            let plan = two_study_plan(&cfg, &params)?;
            let (reps, seed) = mc_settings(&cfg)?;
            solve_f1_criterion2_pooled_binary(&plan, k, target, reps, seed, tie_policy(&cfg)?)?
        }
        (2, 2, _) => {
            let k = cfg
                .k
                .ok_or_else(|| anyhow!("criterion 2 solve needs --k"))?;
            let plan = two_study_plan(&cfg, &params)?;
            solve_f1_criterion2_pooled(&plan, k, target, sigma_source(&cfg)?)?
        }
        (c, s, m) => bail!("unsupported combination: criterion {c}, studies {s}, method {m}"),
    };

    if as_json {
        let results = json!({
            "fraction": sol.fraction,
            "raw_root": sol.raw_root,
            "achieved_cp": sol.achieved_cp,
            "target": target,
        });
        RunRecord::new("solve-fraction", cfg, results).print();
    } else {
        println!("f = {}", fraction_display(sol.fraction));
        println!("achieved CP = {:.4} (target {target})", sol.achieved_cp);
    }
    Ok(())
}

fn cmd_pairs(cfg: FileConfig, as_json: bool) -> Result<()> {
    let c = cfg.c.ok_or_else(|| anyhow!("pairs needs --c"))?;
    let grid = match (cfg.grid_start, cfg.grid_step) {
        (Some(start), step) => {
            let step = step.unwrap_or(0.01);
            let mut g = Vec::new();
            let mut f = start;
            while f <= 2.0 / c + 1e-12 {
                g.push(f);
                f += step;
            }
            g
        }
        _ => default_pair_grid(c),
    };
    let en = enumerate_fraction_pairs(c, &grid)?;
    if as_json {
        let results = json!({
            "c": c,
            "pairs": en.pairs.iter().map(|p| json!({"f1": p.f1, "f2": p.f2})).collect::<Vec<_>>(),
            "skipped": en.skipped,
        });
        RunRecord::new("pairs", cfg, results).print();
    } else {
        println!("pairs attaining c = {c}:");
        for pair in &en.pairs {
            println!(
                "  f1 = {}  f2 = {}",
                fraction_display(pair.f1),
                fraction_display(pair.f2)
            );
        }
        for f1 in &en.skipped {
            eprintln!("note: f1 = {f1} admits no partner fraction below 1 at this c");
        }
    }
    Ok(())
}

fn cmd_simulate(cfg: FileConfig, as_json: bool, out: Option<&std::path::Path>) -> Result<()> {
    let criterion = cfg.criterion.unwrap_or(1);
    let studies = cfg.studies.unwrap_or(1);
    let params = design_params(&cfg)?;
    let (reps, seed) = mc_settings(&cfg)?;
    let choice = match criterion {
        1 => CriterionChoice::EffectPreservation,
        2 => CriterionChoice::SameTrend,
        other => bail!("unknown criterion {other}"),
    };
    let scenario = match studies {
        1 => Scenario::OneStudy {
            plan: plan1(&cfg, &params)?,
            alloc: allocation(
                &cfg.fractions,
                cfg.f,
                cfg.k,
                cfg.equal_rest.unwrap_or(false),
            )?,
            params,
            criterion: choice,
        },
        2 => {
            let alloc1 = allocation(
                &cfg.fractions,
                cfg.f,
                cfg.k,
                cfg.equal_rest.unwrap_or(false),
            )?;
            let alloc2 = if cfg.fractions2.is_some() || cfg.f2.is_some() {
                allocation(
                    &cfg.fractions2,
                    cfg.f2,
                    cfg.k,
                    cfg.equal_rest.unwrap_or(false),
                )?
            } else {
                alloc1.clone()
            };
            Scenario::TwoStudy {
                plan: two_study_plan(&cfg, &params)?,
                alloc1,
                alloc2,
                criterion: choice,
            }
        }
        other => bail!("unknown studies count {other}"),
    };
    let result = empirical_cp(&SimConfig {
        replications: reps,
        seed,
        tie_policy: tie_policy(&cfg)?,
        scenario,
    })?;

    if let Some(path) = out {
        let new_file = !path.exists();
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        if new_file {
            w.write_record([
                "criterion",
                "studies",
                "seed",
                "replications",
                "rejections",
                "empirical_cp",
                "mc_se",
            ])?;
        }
        w.write_record([
            criterion.to_string(),
            studies.to_string(),
            seed.to_string(),
            result.replications.to_string(),
            result.rejections.to_string(),
            format!("{:.6}", result.empirical_cp),
            format!("{:.6}", result.mc_se),
        ])?;
        w.flush()?;
    }

    if as_json {
        let results = json!({
            "replications": result.replications,
            "rejections": result.rejections,
            "consistent_and_rejected": result.consistent_and_rejected,
            "empirical_cp": result.empirical_cp,
            "mc_se": result.mc_se,
        });
        RunRecord::new("simulate", cfg, results).print();
    } else {
        println!("replications = {}", result.replications);
        println!("rejections   = {}", result.rejections);
        println!("empirical CP = {:.4}", result.empirical_cp);
        println!("mc_se        = {:.4}", result.mc_se);
    }
    Ok(())
}

fn cmd_reproduce(
    table: Option<u8>,
    example: Option<u8>,
    section4: bool,
    seed: Option<u64>,
    reps: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    match (table, example, section4) {
        (Some(id), None, false) => {
            let seed = seed.ok_or_else(|| anyhow!("--seed is required for table reproduction"))?;
            let path = out.unwrap_or_else(|| PathBuf::from(format!("table{id}.csv")));
            reproduce::table(id, seed, reps, &path)?;
            println!("wrote {}", path.display());
        }
        (None, Some(id), false) => {
            let seed = if id == 1 || id == 3 {
                seed.unwrap_or(0)
            } else {
                seed.ok_or_else(|| anyhow!("--seed is required for example reproduction"))?
            };
            let path = out.unwrap_or_else(|| PathBuf::from(format!("example{id}.csv")));
            reproduce::example(id, seed, reps, &path)?;
            println!("wrote {}", path.display());
        }
        (None, None, true) => {
            let path = out.unwrap_or_else(|| PathBuf::from("section4.csv"));
            reproduce::section4(&path)?;
            println!("wrote {}", path.display());
        }
        _ => bail!("choose exactly one of --table, --example, --section4"),
    }
    Ok(())
}
