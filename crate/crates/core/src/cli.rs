//! Command-line frontend: config parsing, experiment dispatch, CSV/JSON
//! emission, exit-code contract (0 ok / 2 invariant violation / 1 error).

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_rational::{BigRational, Rational64};
use serde_json::json;

use crate::ak::{self, AKSchedule, AKStage, ConjugatorSpec};
use crate::config::{DiophantineSpec, ExperimentConfig};
use crate::diophantine::{
    construct_exp_liouville, exp_liouville_witnesses, ContinuedFraction, GrowthSchedule,
    TorusComponent, TorusVector,
};
use crate::experiments::{
    entropy_slope, exp_liouville_rigidity, inequality_harness, recurrence_experiment,
    rigidity_scan, RigidityRow, SetSpec,
};
use crate::grid::GridSpec;
use crate::hamiltonian::{BumpProfile, Hamiltonian};
use crate::maps::MapExpr;
use crate::phase_space::{Atlas, Manifold};
use crate::report::{config_hash, fmt_f64, CsvReport};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "symplab", about = "norm inequalities and rigidity experiments for area-preserving maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// RNG seed for family generation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Grid as NxM (overrides the config grid).
    #[arg(long, global = true)]
    pub grid: Option<String>,

    /// Output directory (default: config, then $SYMPLAB_OUT, then ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Tolerance override.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Worker threads (speed only; results are bit-identical regardless).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Atlas constants (epsilon, L, delta, C) for a manifold's default atlas.
    Constants {
        #[arg(long, default_value = "annulus")]
        manifold: String,
    },
    /// Seeded random-map sweep of the Hoelder inequality.
    VerifyInequality {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Rigidity scan along convergent denominators.
    Rigidity {
        /// Rotation number: golden | sqrt2 (configs can supply more).
        #[arg(long, default_value = "golden")]
        alpha: String,
        #[arg(long, default_value_t = 10_000)]
        max_iterate: i64,
        /// Envelope rate c for the rigidity corollary.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Run an Anosov-Katok schedule and emit the stage ledger.
    AkBuild {
        #[arg(long, default_value_t = 4)]
        stages: usize,
    },
    /// Recurrence-density measurement.
    Recurrence {
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        /// Additional seeded (alpha, r) pairs to sweep.
        #[arg(long, default_value_t = 0)]
        pairs: usize,
    },
    /// Entropy slope of the configured map (default: torus linear map).
    Entropy {
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Continued fractions and exp-Liouville certificates.
    Diophantine {
        /// Growth schedule to construct, e.g. "c_n=n".
        #[arg(long)]
        construct: Option<String>,
        #[arg(long, default_value_t = 4)]
        stages: usize,
        /// Produce a witness certificate at this rate, e.g. "c=1".
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value = "golden")]
        alpha: String,
        #[arg(long, default_value_t = 10_000)]
        k_max: u64,
    },
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| Error::config("grid must look like 64x32"))?;
    let g = GridSpec::new(
        a.parse().map_err(|_| Error::config("bad grid width"))?,
        b.parse().map_err(|_| Error::config("bad grid height"))?,
    );
    g.validate()?;
    Ok(g)
}

fn parse_manifold(s: &str) -> Result<Manifold> {
    match s {
        "annulus" => Ok(Manifold::Annulus),
        "sphere" => Ok(Manifold::Sphere),
        "plane" => Ok(Manifold::Plane),
        other => Err(Error::config(format!("unknown manifold {other}"))),
    }
}

fn cf_from_spec(spec: &DiophantineSpec) -> Result<ContinuedFraction> {
    match spec {
        DiophantineSpec::Golden { depth } => Ok(ContinuedFraction::golden(*depth)),
        DiophantineSpec::Sqrt2 { depth } => Ok(ContinuedFraction::sqrt2(*depth)),
        DiophantineSpec::Rational { num, den } => Ok(ContinuedFraction::from_rational(
            &BigRational::new((*num).into(), (*den).into()),
        )),
        DiophantineSpec::Surd { m, d, q, depth } => {
            let d = u64::try_from(*d).map_err(|_| Error::config("surd d must be >= 0"))?;
            ContinuedFraction::quadratic_surd(*m, d, *q, *depth)
        }
        DiophantineSpec::Construct { .. } => Err(Error::config(
            "constructed rotation numbers are handled by their subcommands",
        )),
    }
}

fn named_cf(name: &str) -> Result<ContinuedFraction> {
    match name {
        "golden" => Ok(ContinuedFraction::golden(96)),
        "sqrt2" => Ok(ContinuedFraction::sqrt2(96)),
        other => Err(Error::config(format!("unknown rotation number {other}"))),
    }
}

/// Effective settings after merging flags over the config file.
struct Ctx {
    cfg: ExperimentConfig,
    cfg_hash: String,
    grid: GridSpec,
    seed: u64,
    tol: f64,
    out: PathBuf,
}

impl Ctx {
    fn new(cli: &Cli, default_grid: GridSpec) -> Result<Ctx> {
        let cfg = match &cli.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let grid = match &cli.grid {
            Some(s) => parse_grid(s)?,
            None => cfg.grid.unwrap_or(default_grid),
        };
        let out = cli
            .out
            .clone()
            .or_else(|| cfg.out_dir.clone())
            .or_else(|| std::env::var_os("SYMPLAB_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let cfg_hash = config_hash(&cfg.canonical_json());
        Ok(Ctx {
            seed: cli.seed.or(cfg.seed).unwrap_or(7),
            tol: cli.tol.or(cfg.tol).unwrap_or(1e-9),
            cfg,
            cfg_hash,
            grid,
            out,
        })
    }

    fn table(&self, columns: &[&str]) -> CsvReport {
        let mut t = CsvReport::new(columns);
        t.meta("config_sha256", self.cfg_hash.clone());
        t.meta("grid", self.grid.describe());
        t.meta("tolerance", fmt_f64(self.tol));
        t
    }

    fn emit(&self, name: &str, table: &CsvReport, summary: &serde_json::Value) -> Result<()> {
        table.write_to(&self.out.join(format!("{name}.csv")))?;
        let pretty = serde_json::to_string_pretty(summary)?;
        std::fs::write(self.out.join(format!("{name}.json")), &pretty)?;
        println!("{pretty}");
        Ok(())
    }
}

/// Default 4-stage schedule with `tol_m = 2^{-m}`; conjugator amplitudes
/// shrink like `1/q` to keep the Hamiltonian Hessians of order one.
pub fn default_ak_schedule(stages: usize) -> Result<AKSchedule> {
    let mut out = Vec::new();
    let mut alpha = Rational64::new(1, 3);
    let mut tol = 0.5;
    for m in 0..stages {
        let q = *alpha.denom();
        out.push(AKStage {
            alpha_num: *alpha.numer(),
            alpha_den: q,
            conjugator: ConjugatorSpec {
                frequency: q as u32,
                amplitude: 0.08 / q as f64,
                phase: 0.0,
                profile: BumpProfile::default(),
            },
            tol,
        });
        if m + 1 < stages {
            alpha = ak::ak_next_alpha_nested(alpha, 2 * q, 4.0, tol / 2.0)?;
            tol /= 2.0;
        }
    }
    Ok(AKSchedule { stages: out })
}

fn rigidity_table(ctx: &Ctx, rows: &[RigidityRow], enforce_cor13: bool) -> (CsvReport, bool) {
    let mut t = ctx.table(&[
        "n",
        "torus_dist",
        "torus_dist_log2",
        "hofer_ub",
        "hofer_ub_log2",
        "hofer_chain_ok",
        "c0_lower",
        "c0_upper",
        "c0_log2",
        "measured",
        "deriv_lower",
        "holder_rhs",
        "holder_ok",
        "cor13_envelope_log2",
        "cor13_ok",
    ]);
    let mut ok = true;
    let opt = |b: Option<bool>| match b {
        Some(true) => "true".to_string(),
        Some(false) => "false".to_string(),
        None => "skipped".to_string(),
    };
    for r in rows {
        ok &= r.holder_ok && r.hofer_chain_ok.unwrap_or(true);
        // The envelope bound is a theorem only along the exp-Liouville
        // subsequence; for generic alpha the column is informational.
        if enforce_cor13 {
            ok &= r.cor13_ok.unwrap_or(true);
        }
        t.row(vec![
            r.n.clone(),
            fmt_f64(r.torus_dist),
            fmt_f64(r.torus_dist_log2),
            fmt_f64(r.hofer_ub),
            fmt_f64(r.hofer_ub_log2),
            opt(r.hofer_chain_ok),
            fmt_f64(r.c0.as_ref().map(|e| e.lower).unwrap_or(f64::NAN)),
            fmt_f64(r.c0.as_ref().map(|e| e.upper).unwrap_or(f64::NAN)),
            fmt_f64(r.c0_log2),
            r.measured.to_string(),
            fmt_f64(r.deriv.as_ref().map(|e| e.lower).unwrap_or(f64::NAN)),
            fmt_f64(r.holder_rhs),
            r.holder_ok.to_string(),
            fmt_f64(r.cor13_envelope_log2.unwrap_or(f64::NAN)),
            opt(r.cor13_ok),
        ]);
    }
    // Strict decrease of the certified C0 sequence.
    for w in rows.windows(2) {
        ok &= w[1].c0_log2 < w[0].c0_log2;
    }
    (t, ok)
}

fn run_constants(ctx: &Ctx, manifold: Manifold) -> Result<bool> {
    let atlas = Atlas::default_for(manifold);
    let window = match manifold {
        Manifold::Plane => crate::grid::PlaneWindow::square(0.9),
        _ => Default::default(),
    };
    let constants = atlas.constants(&ctx.grid, &window)?;
    let mut t = ctx.table(&["quantity", "value"]);
    t.meta("mesh", constants.mesh.clone());
    for (k, v) in [
        ("epsilon", constants.epsilon),
        ("lipschitz_l", constants.lipschitz_l),
        ("delta", constants.delta),
        ("c", constants.c),
        ("diameter", constants.diameter),
    ] {
        t.row(vec![k.to_string(), fmt_f64(v)]);
    }
    ctx.emit(
        "constants",
        &t,
        &json!({
            "subcommand": "constants",
            "manifold": manifold,
            "constants": constants,
            "ok": true,
        }),
    )?;
    Ok(true)
}

fn run_verify_inequality(ctx: &Ctx, count: usize) -> Result<bool> {
    let witness = ctx.cfg.witness_grid.unwrap_or(GridSpec::new(11, 11));
    let report = inequality_harness(count, ctx.seed, &ctx.grid, &witness)?;
    let mut t = ctx.table(&[
        "index",
        "gamma_ub",
        "lhs_lower",
        "deriv_inflated",
        "rhs",
        "violation",
        "witness",
    ]);
    for s in &report.samples {
        t.row(vec![
            s.index.to_string(),
            fmt_f64(s.gamma_ub),
            fmt_f64(s.holder.lhs_lower),
            fmt_f64(s.holder.deriv_inflated),
            fmt_f64(s.holder.rhs),
            s.holder.violation.to_string(),
            match s.witness_found {
                Some(true) => "found".to_string(),
                Some(false) => "missing".to_string(),
                None => "not_sub_delta".to_string(),
            },
        ]);
    }
    let ok = report.violations == 0 && report.witness_successes == report.witness_attempts;
    ctx.emit(
        "verify_inequality",
        &t,
        &json!({
            "subcommand": "verify-inequality",
            "count": count,
            "seed": ctx.seed,
            "violations": report.violations,
            "witness_attempts": report.witness_attempts,
            "witness_successes": report.witness_successes,
            "min_slack_ratio": report.min_slack_ratio,
            "ok": ok,
        }),
    )?;
    Ok(ok)
}

fn run_rigidity(ctx: &Ctx, alpha: &str, max_iterate: i64, c: f64) -> Result<bool> {
    let default_h = MapExpr::Twist { strength: 1.0 };
    let h = ctx.cfg.conjugator.clone().unwrap_or(default_h);
    let (rows, label) = match &ctx.cfg.diophantine {
        Some(DiophantineSpec::Construct {
            schedule,
            rate,
            stages,
        }) => {
            let growth = growth_schedule(schedule, *rate)?;
            let built = construct_exp_liouville(&growth, *stages)?;
            // The conjugator for the chain: one AK conjugator flow.
            let h = ctx.cfg.conjugator.clone().unwrap_or_else(|| {
                MapExpr::flow(
                    Hamiltonian::AnnulusConjugator {
                        frequency: 2,
                        phase: 0.0,
                        amplitude: 0.1,
                        profile: BumpProfile::default(),
                    },
                    1.0,
                )
            });
            (
                exp_liouville_rigidity(&built, &h, c, &ctx.grid)?,
                "exp_liouville".to_string(),
            )
        }
        Some(spec) => {
            let cf = cf_from_spec(spec)?;
            let iters = convergent_denominators(&cf, max_iterate);
            (rigidity_scan(&h, &cf, &iters, c, &ctx.grid)?, "config".into())
        }
        None => {
            let cf = named_cf(alpha)?;
            let iters = convergent_denominators(&cf, max_iterate);
            (rigidity_scan(&h, &cf, &iters, c, &ctx.grid)?, alpha.to_string())
        }
    };
    let (t, ok) = rigidity_table(ctx, &rows, label == "exp_liouville");
    ctx.emit(
        "rigidity",
        &t,
        &json!({
            "subcommand": "rigidity",
            "alpha": label,
            "rows": rows.len(),
            "c": c,
            "ok": ok,
        }),
    )?;
    Ok(ok)
}

fn convergent_denominators(cf: &ContinuedFraction, max: i64) -> Vec<i64> {
    cf.denominators()
        .iter()
        .filter_map(|q| i64::try_from(q.clone()).ok())
        .filter(|&q| q >= 1 && q <= max)
        .collect()
}

fn growth_schedule(schedule: &str, rate: Option<f64>) -> Result<GrowthSchedule> {
    match schedule {
        "linear" | "c_n=n" => Ok(GrowthSchedule::Linear),
        "constant" => {
            let r = rate.ok_or_else(|| Error::config("constant schedule needs a rate"))?;
            let r = BigRational::from_float(r)
                .ok_or_else(|| Error::config("rate must be finite"))?;
            Ok(GrowthSchedule::Constant(r))
        }
        other => Err(Error::config(format!("unknown growth schedule {other}"))),
    }
}

fn run_ak_build(ctx: &Ctx, stages: usize) -> Result<bool> {
    let schedule = match &ctx.cfg.schedule {
        Some(s) => s.clone(),
        None => default_ak_schedule(stages)?,
    };
    let run = ak::ak_build(&schedule, &ctx.grid)?;
    let mut t = ctx.table(&[
        "stage",
        "q",
        "alpha",
        "c0_gap_lower",
        "c0_gap_upper",
        "c1_gap",
        "commutation_residual",
        "deriv_h",
        "consistency_prev",
        "accepted",
    ]);
    let mut ok = run.len() == schedule.stages.len();
    // 10x the midpoint solver's convergence tolerance.
    let consistency_cap = 10.0 * crate::integrator::IntegratorParams::default().tol;
    for s in &run {
        ok &= s.accepted
            && s.commutation_residual <= ctx.tol
            && s.consistency_prev.unwrap_or(0.0) <= consistency_cap;
        t.row(vec![
            s.stage.to_string(),
            s.alpha.denom().to_string(),
            format!("{}/{}", s.alpha.numer(), s.alpha.denom()),
            fmt_f64(s.c0_gap.lower),
            fmt_f64(s.c0_gap.upper),
            fmt_f64(s.c1_gap),
            fmt_f64(s.commutation_residual),
            fmt_f64(s.deriv_h),
            fmt_f64(s.consistency_prev.unwrap_or(f64::NAN)),
            s.accepted.to_string(),
        ]);
    }
    ctx.emit(
        "ak_build",
        &t,
        &json!({
            "subcommand": "ak-build",
            "stages_requested": schedule.stages.len(),
            "stages_built": run.len(),
            "budget_partial_sums": schedule.budget_partial_sums(),
            "ok": ok,
        }),
    )?;
    Ok(ok)
}

fn run_recurrence(ctx: &Ctx, radius: f64, n: u64, pairs: usize) -> Result<bool> {
    use rand::{Rng, SeedableRng};
    let mut t = ctx.table(&[
        "alpha", "r", "n", "threshold", "density", "bound", "discrepancy", "ok",
    ]);
    let mut all_ok = true;
    let push = |t: &mut CsvReport,
                    label: &str,
                    r: f64,
                    rep: &crate::experiments::RecurrenceReport| {
        t.row(vec![
            label.to_string(),
            fmt_f64(r),
            rep.n.to_string(),
            fmt_f64(rep.threshold),
            fmt_f64(rep.density),
            fmt_f64(rep.bound),
            fmt_f64(rep.discrepancy),
            rep.ok.to_string(),
        ]);
    };
    let golden = TorusVector::circle(TorusComponent::Irrational(ContinuedFraction::golden(96)));
    let rep = recurrence_experiment(&golden, &SetSpec::Ball { r: radius }, n, 1, 1.0)?;
    all_ok &= rep.ok;
    let density_head = rep.density;
    push(&mut t, "golden", radius, &rep);
    if pairs > 0 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.seed);
        for i in 0..pairs {
            // Quadratic surds sqrt(d) with square-free-ish d, fractional part.
            let d: i64 = rng.gen_range(2..50);
            if (d as f64).sqrt().fract() == 0.0 {
                continue;
            }
            let r: f64 = rng.gen_range(0.05..0.3);
            let cf = ContinuedFraction::quadratic_surd(0, d as u64, 1, 96)?;
            let alpha = TorusVector::circle(TorusComponent::Irrational(cf));
            let rep =
                recurrence_experiment(&alpha, &SetSpec::Ball { r }, n.min(20_000), 1, 1.0)?;
            all_ok &= rep.ok;
            push(&mut t, &format!("sqrt{d}_{i}"), r, &rep);
        }
    }
    ctx.emit(
        "recurrence",
        &t,
        &json!({
            "subcommand": "recurrence",
            "n": n,
            "pairs": pairs,
            "density_golden": density_head,
            "ok": all_ok,
        }),
    )?;
    Ok(all_ok)
}

fn run_entropy(ctx: &Ctx, n_max: usize) -> Result<bool> {
    let map = ctx.cfg.map.clone().unwrap_or(MapExpr::Linear {
        manifold: Manifold::Annulus,
        entries: [[2.0, 1.0], [1.0, 1.0]],
    });
    map.validate()?;
    let (slope, bound) = entropy_slope(&map, n_max, &ctx.grid)?;
    let mut t = ctx.table(&["n_max", "slope", "bound"]);
    t.row(vec![n_max.to_string(), fmt_f64(slope), fmt_f64(bound)]);
    let ok = slope.is_finite() && bound.is_finite();
    ctx.emit(
        "entropy",
        &t,
        &json!({
            "subcommand": "entropy",
            "n_max": n_max,
            "slope": slope,
            "bound": bound,
            "ok": ok,
        }),
    )?;
    Ok(ok)
}

fn run_diophantine(
    ctx: &Ctx,
    construct: Option<&str>,
    stages: usize,
    check: Option<&str>,
    alpha: &str,
    k_max: u64,
) -> Result<bool> {
    let parse_rate = |s: &str| -> Result<BigRational> {
        let v = s
            .strip_prefix("c=")
            .unwrap_or(s)
            .parse::<f64>()
            .map_err(|_| Error::config("check rate must look like c=1"))?;
        BigRational::from_float(v).ok_or_else(|| Error::config("rate must be finite"))
    };
    let mut summary = json!({ "subcommand": "diophantine" });
    let mut t = ctx.table(&["stage_or_k", "kind", "value", "ok"]);
    let mut ok = true;
    let mut cf = match construct {
        Some(rule) => {
            let growth = growth_schedule(rule, None)?;
            let built = construct_exp_liouville(&growth, stages)?;
            summary["construct"] = json!({
                "rule": rule,
                "stages": stages,
                "proves_membership": built.proves_membership,
            });
            for s in &built.stages {
                ok &= s.holds;
                t.row(vec![
                    format!("stage_{}", s.n),
                    "construction".to_string(),
                    s.dist_hi.describe(),
                    s.holds.to_string(),
                ]);
            }
            ok &= built.proves_membership;
            built.cf
        }
        None => named_cf(alpha)?,
    };
    if let Some(rate) = check {
        let c = parse_rate(rate)?;
        let cert = exp_liouville_witnesses(&mut cf, &c, k_max)?;
        for w in &cert.witnesses {
            t.row(vec![
                w.k.to_string(),
                "witness".to_string(),
                fmt_f64(crate::diophantine::rational_to_f64(&w.dist.hi)),
                "true".to_string(),
            ]);
        }
        let cert_json = cert.to_json();
        std::fs::create_dir_all(&ctx.out)?;
        std::fs::write(
            ctx.out.join("certificate.json"),
            serde_json::to_string_pretty(&cert_json)?,
        )?;
        summary["witnesses"] = json!(cert.witnesses.len());
        summary["undecided"] = json!(cert.undecided.len());
        // A construction must certify its own membership at the checked
        // rate with at least one materialized witness.
        if construct.is_some() {
            ok &= !cert.witnesses.is_empty();
        }
    }
    summary["ok"] = json!(ok);
    ctx.emit("diophantine", &t, &summary)?;
    Ok(ok)
}

/// Entry point used by `main`: returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match try_run(&cli) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            let code = e.exit_code();
            let diag = json!({ "error": e.to_string(), "exit_code": code });
            eprintln!("{diag}");
            code
        }
    }
}

fn try_run(cli: &Cli) -> Result<bool> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        // Build once; a second configure attempt in the same process is not
        // an error worth failing a run over.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Constants { manifold } => {
            let ctx = Ctx::new(cli, GridSpec::new(64, 64))?;
            run_constants(&ctx, parse_manifold(manifold)?)
        }
        Command::VerifyInequality { count } => {
            let ctx = Ctx::new(cli, GridSpec::new(32, 16))?;
            run_verify_inequality(&ctx, *count)
        }
        Command::Rigidity {
            alpha,
            max_iterate,
            c,
        } => {
            let ctx = Ctx::new(cli, GridSpec::new(48, 12))?;
            run_rigidity(&ctx, alpha, *max_iterate, *c)
        }
        Command::AkBuild { stages } => {
            let ctx = Ctx::new(cli, GridSpec::new(48, 12))?;
            run_ak_build(&ctx, *stages)
        }
        Command::Recurrence { radius, n, pairs } => {
            let ctx = Ctx::new(cli, GridSpec::new(16, 16))?;
            run_recurrence(&ctx, *radius, *n, *pairs)
        }
        Command::Entropy { n_max } => {
            let ctx = Ctx::new(cli, GridSpec::new(12, 12))?;
            run_entropy(&ctx, *n_max)
        }
        Command::Diophantine {
            construct,
            stages,
            check,
            alpha,
            k_max,
        } => {
            let ctx = Ctx::new(cli, GridSpec::new(8, 8))?;
            run_diophantine(
                &ctx,
                construct.as_deref(),
                *stages,
                check.as_deref(),
                alpha,
                *k_max,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parser() {
        let g = parse_grid("64x32").unwrap();
        assert_eq!(g.counts, [64, 32]);
        assert!(parse_grid("64").is_err());
    }

    #[test]
    fn default_schedule_is_valid_and_halves_budgets() {
        let s = default_ak_schedule(4).unwrap();
        s.validate().unwrap();
        assert_eq!(s.stages.len(), 4);
        // tol_m = 2^-m with stages numbered from 1.
        for (i, st) in s.stages.iter().enumerate() {
            assert_eq!(st.tol, 0.5f64.powi(i as i32 + 1));
        }
    }

    #[test]
    fn cli_parses_acceptance_style_invocation() {
        let cli = Cli::try_parse_from([
            "symplab",
            "diophantine",
            "--construct",
            "c_n=n",
            "--stages",
            "4",
            "--check",
            "c=1",
        ])
        .unwrap();
        match cli.command {
            Command::Diophantine {
                construct, stages, ..
            } => {
                assert_eq!(construct.as_deref(), Some("c_n=n"));
                assert_eq!(stages, 4);
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
