//! Thin wrappers that turn command-line arguments into library calls and
//! JSON documents.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::Args;
use num_bigint::BigUint;
use opi_core::attacks::{Comparator, OpiParams};
use opi_core::bent::{tbt_opi_generate, verify_bounds};
use opi_core::dicke::{selftest_sweep, Unranker};
use opi_core::eea_dialog::Dialog;
use opi_core::eea_sync::{cycle_bound, fibonacci_like_inputs, sync_eea_run, EeaMode};
use opi_core::gf::FieldConfig;
use opi_core::report::estimate as build_estimate;
use opi_core::rng::{random_poly_below, random_poly_exact, seeded};
use opi_core::rs_decode::{rs_decode, syndrome_compute, DecodeMode, ErrorPattern, RsCode};
use opi_core::{CostLedger, Error, FieldSpec, Result};
use serde_json::json;

use crate::{Common, Outcome, XpChoice};

/// Writes the document to `--out` or to `stdout`.
pub fn emit(value: &serde_json::Value, common: &Common, stdout: &mut dyn Write) -> std::io::Result<()> {
    let text = if common.compact { serde_json::to_string(value)? } else { serde_json::to_string_pretty(value)? };
    match &common.out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => writeln!(stdout, "{text}"),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))
}

/// The field of degree b, with constants from `--config` when it names b.
pub fn field_for(b: u32, config: Option<&Path>) -> Result<FieldSpec> {
    let Some(path) = config else {
        return FieldSpec::default_for(b);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let cfg: FieldConfig =
        toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))?;
    if cfg.b != b {
        return Err(Error::InvalidInput(format!("config describes GF(2^{}), command needs GF(2^{b})", cfg.b)));
    }
    FieldSpec::from_config(&cfg)
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub r: u64,
    /// Comparator of the XP dynamic program, or `off` to skip it.
    #[arg(long, value_enum, default_value_t = XpChoice::Fast)]
    pub xp: XpChoice,
    #[command(flatten)]
    pub common: Common,
}

pub fn estimate(a: &EstimateArgs) -> Result<Outcome> {
    let params = OpiParams::new(a.m, a.n, a.b, a.r)?;
    let comparator = match a.xp {
        XpChoice::Fast => Some(Comparator::Fast),
        XpChoice::Slow => Some(Comparator::Slow),
        XpChoice::Off => None,
    };
    let report = build_estimate(params, comparator, a.common.seed())?;
    let passed = report.decoder_ledger_explicit.sampled.recovered && report.decoder_ledger_implicit.sampled.recovered;
    Ok(Outcome { json: to_json(&report)?, passed })
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Field degree.
    #[arg(long)]
    pub b: u32,
    /// Block length, at most 2^b - 1.
    #[arg(long)]
    pub m: usize,
    /// Syndrome length; the decoder corrects floor(n/2) errors.
    #[arg(long)]
    pub n: usize,
    /// Planted error weight, default floor(n/2).
    #[arg(long)]
    pub weight: Option<usize>,
    /// Number of random patterns.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn decode(a: &DecodeArgs) -> Result<Outcome> {
    let field = field_for(a.b, a.common.config.as_deref())?;
    let code = RsCode::new(field, a.m, a.n)?;
    let weight = a.weight.unwrap_or(code.ell);
    if weight > a.m {
        return Err(Error::InvalidInput(format!("weight {weight} exceeds block length {}", a.m)));
    }
    let mut rng = seeded(a.common.seed());
    let mut failures = 0usize;
    let mut disagreements = 0usize;
    let mut ledgers = [CostLedger::new(), CostLedger::new()];
    for trial in 0..a.trials {
        let pattern = ErrorPattern::random(&code, weight, &mut rng);
        let s = syndrome_compute(&pattern, &code)?;
        let mut outs = Vec::with_capacity(2);
        for (i, mode) in [DecodeMode::Explicit, DecodeMode::Implicit].into_iter().enumerate() {
            let mut ledger = CostLedger::new();
            let out = rs_decode(&s, &code, mode, &mut ledger)?;
            if trial == 0 {
                ledgers[i] = ledger;
            }
            if weight <= code.ell && out.pattern != pattern {
                failures += 1;
            }
            outs.push(out.pattern);
        }
        if outs[0] != outs[1] {
            disagreements += 1;
        }
    }
    let passed = failures == 0 && disagreements == 0;
    Ok(Outcome {
        json: json!({
            "m": a.m, "n": a.n, "b": a.b, "ell": code.ell, "weight": weight, "trials": a.trials,
            "seed": a.common.seed(),
            "failures": failures, "mode_disagreements": disagreements,
            "ledger_explicit": to_json(&ledgers[0])?, "ledger_implicit": to_json(&ledgers[1])?,
        }),
        passed,
    })
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    /// Field degree.
    #[arg(long, default_value_t = 8)]
    pub b: u32,
    /// Degree of the first input.
    #[arg(long)]
    pub n: usize,
    /// Stop at the first remainder of degree below ceil(n/2).
    #[arg(long)]
    pub half: bool,
    /// Use worst-case inputs with linear quotients instead of random ones.
    #[arg(long)]
    pub fibonacci: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn trace(a: &TraceArgs) -> Result<Outcome> {
    if a.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let field = field_for(a.b, a.common.config.as_deref())?;
    let mut rng = seeded(a.common.seed());
    let (pa, pb) = if a.fibonacci {
        fibonacci_like_inputs(a.n, &field, &mut rng)
    } else {
        let pa = random_poly_exact(&field, a.n, &mut rng);
        let mut pb = random_poly_below(&field, a.n, &mut rng);
        while pb.is_zero() {
            pb = random_poly_below(&field, a.n, &mut rng);
        }
        (pa, pb)
    };
    let mode = if a.half { EeaMode::half_default(a.n) } else { EeaMode::Full };
    let mut sync_ledger = CostLedger::new();
    let (_, sync_trace) = sync_eea_run(&pa, &pb, mode, &field, &mut sync_ledger)?;
    let mut dialog_ledger = CostLedger::new();
    let mut snaps = Vec::new();
    let steps = 2 * a.n;
    let dialog = Dialog::build_bezout_traced(&pa, &pb, steps, &field, &mut dialog_ledger, Some(&mut snaps))?;
    let occupancy: Vec<usize> = snaps.iter().map(|s| s.buffer_len + s.dialog_len).collect();
    let capacity = dialog.capacity;
    let buffer_constant = occupancy.iter().all(|&c| c == capacity);
    let passed = !sync_trace.exceeded_bound && buffer_constant;
    Ok(Outcome {
        json: json!({
            "n": a.n, "b": a.b, "seed": a.common.seed(), "half": a.half, "fibonacci": a.fibonacci,
            "sync": {
                "bound": cycle_bound(a.n, mode),
                "trace": to_json(&sync_trace)?,
                "ledger": to_json(&sync_ledger)?,
            },
            "dialog": {
                "steps": dialog.len(),
                "final_delta": dialog.final_delta(),
                "capacity": capacity,
                "occupancy_constant": buffer_constant,
                "ledger": to_json(&dialog_ledger)?,
            },
        }),
        passed,
    })
}

#[derive(Args, Debug)]
pub struct UnrankArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    /// Rank in decimal.
    #[arg(long)]
    pub rank: String,
    #[command(flatten)]
    pub common: Common,
}

pub fn unrank(a: &UnrankArgs) -> Result<Outcome> {
    if a.k > a.m {
        return Err(Error::InvalidInput(format!("k = {} exceeds m = {}", a.k, a.m)));
    }
    let r: BigUint = a.rank.parse().map_err(|_| Error::InvalidInput(format!("rank {:?} is not a decimal integer", a.rank)))?;
    let un = Unranker::new(a.m, a.k);
    let greedy = un.unrank_greedy(&r)?;
    let dc = un.unrank_dc(&r)?;
    let greedy_ok = un.rank(&greedy) == r;
    let dc_ok = un.rank_dc(&dc) == r;
    Ok(Outcome {
        json: json!({
            "m": a.m, "k": a.k, "rank": r.to_string(), "count": un.count().to_string(),
            "greedy": greedy.0, "divide_and_conquer": dc.0,
            "greedy_roundtrip": greedy_ok, "divide_and_conquer_roundtrip": dc_ok,
        }),
        passed: greedy_ok && dc_ok,
    })
}

#[derive(Args, Debug)]
pub struct DickeSweepArgs {
    /// Largest C(m, k) swept exhaustively.
    #[arg(long, default_value_t = 100_000)]
    pub max_binom: u64,
    /// Largest m swept.
    #[arg(long, default_value_t = 60)]
    pub max_m: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn dicke_sweep(a: &DickeSweepArgs) -> Result<Outcome> {
    let start = Instant::now();
    let rep = selftest_sweep(a.max_binom, a.max_m);
    let passed = rep.greedy_roundtrip_failures == 0 && rep.dc_roundtrip_failures == 0;
    let mut json = to_json(&rep)?;
    json["seconds"] = json!(start.elapsed().as_secs_f64());
    Ok(Outcome { json, passed })
}

#[derive(Args, Debug)]
pub struct BentVerifyArgs {
    #[arg(long)]
    pub k: u32,
    /// Largest subspace dimension enumerated (default 2k).
    #[arg(long)]
    pub max_dim: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

pub fn bent_verify(a: &BentVerifyArgs) -> Result<Outcome> {
    let rows = verify_bounds(a.k, a.max_dim)?;
    let passed = rows.iter().all(|r| r.holds());
    Ok(Outcome { json: json!({ "k": a.k, "rows": to_json(&rows)?, "all_within_bound": passed }), passed })
}

#[derive(Args, Debug)]
pub struct BentGenArgs {
    #[arg(long)]
    pub k: u32,
    /// Code dimension of the instance.
    #[arg(long)]
    pub n: usize,
    /// Number of evaluation points, default 2^(2k) - 1.
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

pub fn bent_gen(a: &BentGenArgs) -> Result<Outcome> {
    if a.k == 0 || a.k > 15 {
        return Err(Error::InvalidInput(format!("k = {} outside 1..=15", a.k)));
    }
    let m = a.m.unwrap_or((1usize << (2 * a.k)) - 1);
    let inst = tbt_opi_generate(a.k, m, a.n, a.common.seed())?;
    let passed = inst.targets.iter().all(|t| t.transform.is_invertible());
    Ok(Outcome { json: to_json(&inst)?, passed })
}
