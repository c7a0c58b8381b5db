//! Running account of the arithmetic a reversible circuit would perform.
//!
//! The counters classify field multiplications by operand kind. A
//! quantum-quantum (QQ) multiplication has both operands in registers and is
//! the only class that costs Toffoli gates. A quantum-classical (QC)
//! multiplication by a known constant is a linear map over F2 and compiles to
//! CNOTs only. Inversions are tracked separately from the multiplications of
//! their internal exponentiation chain so that totals can be compared against
//! tables that list inversions in their own column.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::gf::FieldSpec;

/// Operation counters. Every counter only ever increases; two ledgers merge
/// by componentwise addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    /// Multiplications with both operands held in registers.
    pub qq_mult: u64,
    /// Multiplications of a register by a classically known constant,
    /// excluding the point scalings counted in `qc_scale`.
    pub qc_mult: u64,
    /// Multiplications by the classical evaluation point performed while
    /// replaying a Dialog (the shift matrices of the playback).
    pub qc_scale: u64,
    /// Field inversions.
    pub gf_inverse: u64,
    /// Multiplications performed inside inversion chains.
    pub inv_qq_mult: u64,
    /// Controlled swaps of register pairs.
    pub cswap: u64,
    /// Controlled register-wide additions.
    pub cadd: u64,
}

impl CostLedger {
    /// An empty ledger.
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one QQ multiplication.
    pub fn record_qq(&mut self, count: u64) {
        self.qq_mult += count;
    }

    /// Records QC multiplications.
    pub fn record_qc(&mut self, count: u64) {
        self.qc_mult += count;
    }

    /// Records playback scalings by a classical point.
    pub fn record_qc_scale(&mut self, count: u64) {
        self.qc_scale += count;
    }

    /// Records one inversion together with the multiplications of its chain.
    pub fn record_inverse(&mut self, chain_mults: u64) {
        self.gf_inverse += 1;
        self.inv_qq_mult += chain_mults;
    }

    /// Records controlled swaps.
    pub fn record_cswap(&mut self, count: u64) {
        self.cswap += count;
    }

    /// Records controlled register additions.
    pub fn record_cadd(&mut self, count: u64) {
        self.cadd += count;
    }

    /// Toffoli total implied by the field's imported per-multiplication
    /// cost: direct QQ multiplications plus the multiplications of every
    /// inversion chain. `None` when the field has no cost constants.
    pub fn toffoli_total(&self, field: &FieldSpec) -> Option<u64> {
        let costs = field.costs()?;
        Some((self.qq_mult + self.gf_inverse * field.cost_inv_mults()) * costs.toffoli)
    }

    /// Multiplications in QQ-equivalent units (direct plus inversion chains).
    pub fn qq_equivalent(&self) -> u64 {
        self.qq_mult + self.inv_qq_mult
    }
}

impl AddAssign for CostLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.qq_mult += rhs.qq_mult;
        self.qc_mult += rhs.qc_mult;
        self.qc_scale += rhs.qc_scale;
        self.gf_inverse += rhs.gf_inverse;
        self.inv_qq_mult += rhs.inv_qq_mult;
        self.cswap += rhs.cswap;
        self.cadd += rhs.cadd;
    }
}

impl Add for CostLedger {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}
