//! End-to-end classical-hardness reports for an OPI instance.
//!
//! A report combines the attack estimators with decoder cost ledgers. The
//! ledgers at full size come from the leading-order formulas; a concrete
//! decode at a scaled instance (m = 255 over GF(2^8)) cross-checks them.

use num_bigint::BigInt;
use num_traits::FromPrimitive;
use serde::{Deserialize, Serialize};

use crate::attacks::{
    frontier_trials_per_day, hoeffding_trials_lower_bound, prange_success_prob, xp_trials, AttackTarget, Comparator,
    OpiParams,
};
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::rng::seeded;
use crate::rs_decode::{rs_decode, syndrome_compute, DecodeMode, ErrorPattern, RsCode};

/// A quantity too large for a JSON number: exact decimal digits plus a
/// float mantissa and base-10 exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigNumber {
    pub decimal: String,
    pub mantissa: f64,
    pub exponent: i32,
}

impl BigNumber {
    /// Integer part of a float, written out in full.
    pub fn from_f64(value: f64) -> Self {
        let decimal = BigInt::from_f64(value.trunc()).map(|b| b.to_string()).unwrap_or_else(|| value.to_string());
        Self::with_decimal(decimal, value)
    }

    fn with_decimal(decimal: String, value: f64) -> Self {
        let exponent = if value > 0.0 && value.is_finite() { value.log10().floor() as i32 } else { 0 };
        let mantissa = value / 10f64.powi(exponent);
        Self { decimal, mantissa, exponent }
    }

    pub fn value(&self) -> f64 {
        self.mantissa * 10f64.powi(self.exponent)
    }
}

/// Leading-order decoder costs for one access model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingOrder {
    pub qq_mult: u64,
    pub qc_mult: u64,
    pub gf_inverse: u64,
}

impl LeadingOrder {
    /// Synchronized EEA plus explicit Chien search and Forney.
    pub fn explicit(m: usize, n: usize) -> Self {
        let (m, n) = (m as u64, n as u64);
        Self { qq_mult: 3 * n * n, qc_mult: m * n, gf_inverse: m + 6 * n }
    }

    /// Dialog EEA plus playback-based Chien search and Forney.
    pub fn implicit(m: usize, n: usize) -> Self {
        let (m, n) = (m as u64, n as u64);
        Self { qq_mult: 2 * m * n + n * n, qc_mult: m * n / 2, gf_inverse: m + n }
    }
}

/// Measured ledger of one concrete decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDecode {
    pub m: usize,
    pub n: usize,
    pub b: u32,
    pub weight: usize,
    pub recovered: bool,
    pub ledger: CostLedger,
    pub leading_order: LeadingOrder,
}

/// Decoder costs for one access model: formulas at full size plus a run at
/// the scaled size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderLedger {
    pub leading_order: LeadingOrder,
    pub sampled: SampledDecode,
}

/// Everything `opi estimate` reports for an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub instance: OpiParams,
    pub mu: f64,
    pub t: usize,
    pub prange_trials: BigNumber,
    /// Absent when the XP estimate was skipped.
    pub xp_trials: Option<BigNumber>,
    pub xp_comparator: Option<Comparator>,
    pub hoeffding_bound: BigNumber,
    /// Days of frontier-scale computation for the cheaper attack.
    pub frontier_days: f64,
    pub decoder_ledger_explicit: DecoderLedger,
    pub decoder_ledger_implicit: DecoderLedger,
    pub version: String,
    pub seed: u64,
}

/// Field degree of the scaled decoder run.
const SAMPLE_BITS: u32 = 8;
/// Code length of the scaled decoder run.
const SAMPLE_M: usize = 255;

/// Builds the report. `comparator = None` skips the XP dynamic program.
pub fn estimate(params: OpiParams, comparator: Option<Comparator>, seed: u64) -> Result<EstimateReport> {
    if params.m != (1usize << params.b) - 1 {
        return Err(Error::InvalidInput(format!(
            "m must be 2^b - 1 = {} for b = {}, got {}",
            (1usize << params.b) - 1,
            params.b,
            params.m
        )));
    }
    let target = AttackTarget::new(params)?;
    let p = prange_success_prob(params.m, params.n, params.r, params.q(), target.t)?;
    let prange_value = crate::attacks::ratio_to_f64(p.denom(), p.numer());
    let prange_int = (p.denom() + p.numer() / 2u32) / p.numer();
    let prange_trials = BigNumber::with_decimal(prange_int.to_string(), prange_value);
    let xp = comparator.map(|c| xp_trials(params, c)).transpose()?;
    let rate = params.n as f64 / params.m as f64;
    let hoeffding = hoeffding_trials_lower_bound(params.m, rate)?;
    let cheapest = xp.map_or(prange_value, |x| x.min(prange_value));
    let sampled_n = scaled_n(params);
    let mut rng = seeded(seed);
    let code = RsCode::with_bits(SAMPLE_BITS, SAMPLE_M, sampled_n)?;
    let weight = sampled_n / 2;
    let pattern = ErrorPattern::random(&code, weight, &mut rng);
    let syndrome = syndrome_compute(&pattern, &code)?;
    let mut ledgers = Vec::with_capacity(2);
    for mode in [DecodeMode::Explicit, DecodeMode::Implicit] {
        let mut ledger = CostLedger::new();
        let out = rs_decode(&syndrome, &code, mode, &mut ledger)?;
        let leading = match mode {
            DecodeMode::Explicit => LeadingOrder::explicit(SAMPLE_M, sampled_n),
            DecodeMode::Implicit => LeadingOrder::implicit(SAMPLE_M, sampled_n),
        };
        ledgers.push(SampledDecode {
            m: SAMPLE_M,
            n: sampled_n,
            b: SAMPLE_BITS,
            weight,
            recovered: out.pattern == pattern,
            ledger,
            leading_order: leading,
        });
    }
    let implicit = ledgers.pop().expect("two runs");
    let explicit = ledgers.pop().expect("two runs");
    Ok(EstimateReport {
        instance: params,
        mu: target.mu,
        t: target.t,
        prange_trials,
        xp_trials: xp.map(BigNumber::from_f64),
        xp_comparator: comparator,
        hoeffding_bound: BigNumber::from_f64(hoeffding),
        frontier_days: cheapest / frontier_trials_per_day(),
        decoder_ledger_explicit: DecoderLedger {
            leading_order: LeadingOrder::explicit(params.m, params.n),
            sampled: explicit,
        },
        decoder_ledger_implicit: DecoderLedger {
            leading_order: LeadingOrder::implicit(params.m, params.n),
            sampled: implicit,
        },
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
    })
}

/// Even code dimension at m = 255 with the same rate, between 2 and 64.
fn scaled_n(params: OpiParams) -> usize {
    let n = (params.n as f64 * SAMPLE_M as f64 / params.m as f64).round() as usize;
    (n / 2 * 2).clamp(2, 64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_number_parts() {
        let v = BigNumber::from_f64(5.4935525387784946e19);
        assert_eq!(v.exponent, 19);
        assert_eq!(v.decimal, "54935525387784945664");
        assert!((v.value() / 5.4935525387784946e19 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn estimate_rejects_mismatched_length() {
        let p = OpiParams::new(1000, 60, 10, 496).unwrap();
        assert!(estimate(p, None, 1).is_err());
    }

    #[test]
    fn small_estimate_runs_both_decoders() {
        let p = OpiParams::new(255, 26, 8, 120).unwrap();
        let rep = estimate(p, Some(Comparator::Fast), 7).unwrap();
        assert!(rep.decoder_ledger_explicit.sampled.recovered);
        assert!(rep.decoder_ledger_implicit.sampled.recovered);
        assert_eq!(rep.decoder_ledger_explicit.sampled.n, 26);
        assert!(rep.xp_trials.is_some());
    }
}
