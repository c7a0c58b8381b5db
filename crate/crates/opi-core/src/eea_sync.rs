//! Synchronized register-sharing extended Euclidean algorithm.
//!
//! Two registers of n+1 field cells hold the previous pair (u_{i-1}, r_{i-1})
//! and the current pair (u_i, r_i), where u is the cofactor of the second
//! input B and r the remainder. Each register keeps its cofactor anchored at
//! the low end (coefficient of z^k in cell k) and its remainder anchored at
//! the high end (leading coefficient in cell n). Because deg u_i + deg r_{i-1}
//! = n, the two parts never collide, and the padding left between them is
//! exactly large enough to hold the quotient produced by the next division.
//!
//! One logical iteration runs four synchronized phases with fixed durations:
//!
//! | phase      | cycles      | work                                              |
//! |------------|-------------|---------------------------------------------------|
//! | Division   | d_i + 1     | one quotient term per cycle, written in place     |
//! | Normalize  | s_i         | shift the new remainder up to its leading term    |
//! | Align      | d_{i-1}     | schedule slack; this layout needs no data motion  |
//! | Update     | d_i + 1     | consume one quotient term per cycle into u        |
//!
//! followed by a register swap that costs no cycle. Here d_i is the degree of
//! the i-th quotient and s_i the degree drop from r_{i-1} to r_i, so an
//! iteration takes 2 d_i + s_i + d_{i-1} + 2 cycles and a run of k
//! iterations takes 3 D_k + S_k - d_k + 2k.
//!
//! The cost ledger follows the constant-time schedule: every scheduled cycle
//! is one unified arithmetic block of n QQ multiplications and one
//! inversion, including idle cycles after early termination.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, FieldSpec};
use crate::ledger::CostLedger;
use crate::poly::Poly;

/// How far the Euclidean recurrence runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EeaMode {
    /// Until the remainder vanishes; yields the gcd and cofactors.
    Full,
    /// Until the first remainder of degree below `ell`.
    Half { ell: usize },
}

impl EeaMode {
    /// Half mode with the default threshold ceil(n/2) for a degree-n first input.
    pub fn half_default(n: usize) -> Self {
        EeaMode::Half { ell: n.div_ceil(2) }
    }
}

/// Phase of the synchronized schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Division,
    Normalize,
    Align,
    BezoutUpdate,
    Swap,
}

/// Worst-case cycle count: 6n - 1 for a full run, 6 floor(n/2) + 5 for a half run.
pub fn cycle_bound(n: usize, mode: EeaMode) -> u64 {
    let n = n as u64;
    match mode {
        EeaMode::Full => 6 * n - 1,
        EeaMode::Half { .. } => 6 * (n / 2) + 5,
    }
}

/// Statistics of one logical iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    /// Degree of the quotient.
    pub d: usize,
    /// Degree drop of the remainder.
    pub s: usize,
    /// Cycles spent, 2d + s + d_prev + 2.
    pub cycles: u64,
}

/// Cycle accounting of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleTrace {
    /// Degree of the first input.
    pub n: usize,
    pub iterations: Vec<IterationStats>,
    /// Active cycles T.
    pub total_cycles: u64,
    /// Cycles of the constant-time schedule charged to the ledger.
    pub scheduled_cycles: u64,
    /// Whether the active cycles exceeded the worst-case bound.
    pub exceeded_bound: bool,
    /// Largest number of occupied cells across both registers at any cycle.
    pub peak_live_cells: usize,
}

impl CycleTrace {
    /// Number of iterations k.
    pub fn k(&self) -> usize {
        self.iterations.len()
    }

    /// D_k, the sum of quotient degrees.
    pub fn d_sum(&self) -> u64 {
        self.iterations.iter().map(|it| it.d as u64).sum()
    }

    /// S_k, the sum of degree drops.
    pub fn s_sum(&self) -> u64 {
        self.iterations.iter().map(|it| it.s as u64).sum()
    }

    /// Closed form 3 D_k + S_k - d_k + 2k.
    pub fn closed_form(&self) -> u64 {
        let d_last = self.iterations.last().map_or(0, |it| it.d as u64);
        3 * self.d_sum() + self.s_sum() + 2 * self.k() as u64 - d_last
    }
}

/// Outcome of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyncEeaResult {
    /// A u + B v = gcd (gcd up to a unit, not normalized).
    Full { gcd: Poly, u: Poly, v: Poly },
    /// First remainder below the threshold and its B-cofactor.
    Half { omega: Poly, sigma: Poly },
}

/// One register: n+1 cells with a cofactor region at the low end, a
/// remainder region ending at `rem_hi`, and (during an iteration) a
/// quotient region above the remainder.
#[derive(Debug, Clone)]
struct Register {
    cells: Vec<Felt>,
    /// Number of cells of the cofactor region [0, cof_len).
    cof_len: usize,
    /// Remainder region [rem_lo, rem_hi]; empty when rem_lo > rem_hi.
    rem_lo: usize,
    rem_hi: isize,
    /// Quotient region [quo_lo, quo_hi]; empty when quo_lo > quo_hi.
    quo_lo: usize,
    quo_hi: isize,
}

impl Register {
    fn new(n: usize, cofactor: &Poly, remainder: &Poly) -> Self {
        let mut cells = vec![Felt::ZERO; n + 1];
        for (k, &c) in cofactor.coeffs().iter().enumerate() {
            cells[k] = c;
        }
        let rem_lo = (n as isize - remainder.deg()) as usize;
        for (k, &c) in remainder.coeffs().iter().enumerate() {
            cells[rem_lo + k] = c;
        }
        Self { cells, cof_len: cofactor.len(), rem_lo, rem_hi: n as isize, quo_lo: n + 1, quo_hi: n as isize }
    }

    fn rem_len(&self) -> usize {
        (self.rem_hi - self.rem_lo as isize + 1).max(0) as usize
    }

    fn quo_len(&self) -> usize {
        (self.quo_hi - self.quo_lo as isize + 1).max(0) as usize
    }

    fn live(&self) -> usize {
        self.cof_len + self.rem_len() + self.quo_len()
    }

    fn remainder(&self) -> Poly {
        if self.rem_len() == 0 {
            return Poly::zero();
        }
        Poly::from_coeffs(self.cells[self.rem_lo..=self.rem_hi as usize].to_vec())
    }

    fn cofactor(&self) -> Poly {
        Poly::from_coeffs(self.cells[..self.cof_len].to_vec())
    }

    /// Checks that the occupied regions are disjoint and inside the register.
    fn check_layout(&self) {
        let n = self.cells.len() - 1;
        let mut owned = vec![false; n + 1];
        let mut claim = |lo: usize, hi: isize| {
            for c in lo as isize..=hi {
                assert!((0..=n as isize).contains(&c), "cell {c} outside the register");
                let c = c as usize;
                assert!(!owned[c], "cell {c} claimed twice");
                owned[c] = true;
            }
        };
        claim(0, self.cof_len as isize - 1);
        claim(self.rem_lo, self.rem_hi);
        claim(self.quo_lo, self.quo_hi);
    }
}

/// The machine state between and within iterations.
#[derive(Debug, Clone)]
pub struct SyncEeaState {
    /// Register holding (u_{i-1}, r_{i-1}).
    reg_a: Register,
    /// Register holding (u_i, r_i).
    reg_b: Register,
    n: usize,
    pub phase: Phase,
    pub cycle: u64,
    peak_live: usize,
}

impl SyncEeaState {
    fn new(a: &Poly, b: &Poly) -> Self {
        let n = a.deg() as usize;
        let reg_a = Register::new(n, &Poly::zero(), a);
        let reg_b = Register::new(n, &Poly::one(), b);
        let mut st = Self { reg_a, reg_b, n, phase: Phase::Division, cycle: 0, peak_live: 0 };
        st.observe();
        st
    }

    /// Boundary between cofactor and remainder in the previous-pair register.
    pub fn boundary_a(&self) -> usize {
        self.reg_a.cof_len
    }

    /// Boundary between cofactor and remainder in the current-pair register.
    pub fn boundary_b(&self) -> usize {
        self.reg_b.cof_len
    }

    fn observe(&mut self) {
        self.reg_a.check_layout();
        self.reg_b.check_layout();
        self.peak_live = self.peak_live.max(self.reg_a.live() + self.reg_b.live());
    }

    fn tick(&mut self) {
        self.cycle += 1;
        self.observe();
    }

    /// Runs one logical iteration and returns (d, s).
    fn iterate(&mut self, field: &FieldSpec, d_prev: usize) -> Result<(usize, usize)> {
        let n = self.n;
        let deg_prev = self.reg_a.rem_len() - 1;
        let deg_cur = self.reg_b.rem_len() - 1;
        let d = deg_prev - deg_cur;
        let inv_lead = field.inv(self.reg_b.cells[n])?;
        let cur_lo = self.reg_b.rem_lo;

        self.phase = Phase::Division;
        for j in 0..=d {
            let top = n - j;
            let t = field.mul(self.reg_a.cells[top], inv_lead);
            for k in 0..deg_cur {
                let cell = top - deg_cur + k;
                self.reg_a.cells[cell] = self.reg_a.cells[cell] + field.mul(t, self.reg_b.cells[cur_lo + k]);
            }
            self.reg_a.cells[top] = t;
            self.reg_a.quo_lo = top;
            self.reg_a.rem_hi = top as isize - 1;
            // The remainder region never reaches below its original bottom.
            self.tick();
        }
        // Remainder of formal degree deg_cur - 1 sits in [rem_lo, n - d - 1].
        debug_assert_eq!(self.reg_a.rem_len(), deg_cur);

        self.phase = Phase::Normalize;
        let mut s = 0usize;
        loop {
            s += 1;
            let top = self.reg_a.rem_hi;
            let empty = self.reg_a.rem_len() == 0;
            if empty || !self.reg_a.cells[top as usize].is_zero() {
                self.tick();
                break;
            }
            // Leading cell is zero: shift the remainder up by one cell.
            let lo = self.reg_a.rem_lo;
            for c in (lo + 1..=top as usize).rev() {
                self.reg_a.cells[c] = self.reg_a.cells[c - 1];
            }
            self.reg_a.cells[lo] = Felt::ZERO;
            self.reg_a.rem_lo += 1;
            self.tick();
        }

        self.phase = Phase::Align;
        for _ in 0..d_prev {
            self.tick();
        }

        self.phase = Phase::BezoutUpdate;
        let cof_cur = self.reg_b.cof_len;
        for j in 0..=d {
            let qcell = n - d + j;
            let qj = self.reg_a.cells[qcell];
            self.reg_a.cells[qcell] = Felt::ZERO;
            self.reg_a.quo_lo = qcell + 1;
            // Shift the remainder up into the freed quotient cell.
            if self.reg_a.rem_len() > 0 {
                let lo = self.reg_a.rem_lo;
                for c in (lo + 1..=qcell).rev() {
                    self.reg_a.cells[c] = self.reg_a.cells[c - 1];
                }
                self.reg_a.cells[lo] = Felt::ZERO;
                self.reg_a.rem_lo += 1;
            } else {
                self.reg_a.rem_lo = qcell + 1;
            }
            self.reg_a.rem_hi = qcell as isize;
            for k in 0..cof_cur {
                let cell = k + j;
                self.reg_a.cells[cell] = self.reg_a.cells[cell] + field.mul(qj, self.reg_b.cells[k]);
            }
            self.reg_a.cof_len = self.reg_a.cof_len.max(cof_cur + j);
            self.tick();
        }
        // Trim the cofactor to its true length.
        while self.reg_a.cof_len > 0 && self.reg_a.cells[self.reg_a.cof_len - 1].is_zero() {
            self.reg_a.cof_len -= 1;
        }
        self.observe();

        self.phase = Phase::Swap;
        std::mem::swap(&mut self.reg_a, &mut self.reg_b);
        self.check_degree_invariants();
        Ok((d, s))
    }

    /// Invariants after every swap, with u the cofactor and r the remainder:
    /// deg u_i + deg r_i <= n, deg r_i < deg r_{i-1}, deg u_i > deg u_{i-1},
    /// and deg u_i + deg r_{i-1} = n.
    fn check_degree_invariants(&self) {
        let n = self.n as isize;
        let du = self.reg_b.cof_len as isize - 1;
        let dr = self.reg_b.rem_len() as isize - 1;
        let du_prev = self.reg_a.cof_len as isize - 1;
        let dr_prev = self.reg_a.rem_len() as isize - 1;
        assert!(du + dr <= n, "invariant (a) violated");
        assert!(dr < dr_prev && du > du_prev, "invariant (b) violated");
        assert_eq!(du + dr_prev, n, "invariant (c) violated");
    }
}

/// Runs the synchronized machine on (A, B) with deg B < deg A = n.
pub fn sync_eea_run(
    a: &Poly,
    b: &Poly,
    mode: EeaMode,
    field: &FieldSpec,
    ledger: &mut CostLedger,
) -> Result<(SyncEeaResult, CycleTrace)> {
    if b.is_zero() {
        return Err(Error::InvalidInput("second input must be nonzero".into()));
    }
    if a.deg() < 1 {
        return Err(Error::InvalidInput("first input must have degree at least 1".into()));
    }
    if b.deg() >= a.deg() {
        return Err(Error::InvalidInput(format!(
            "need deg B < deg A, got deg A = {} and deg B = {}",
            a.deg(),
            b.deg()
        )));
    }
    let n = a.deg() as usize;
    if let EeaMode::Half { ell } = mode {
        if ell > n {
            return Err(Error::InvalidInput(format!("half-mode threshold {ell} exceeds n = {n}")));
        }
    }
    let mut st = SyncEeaState::new(a, b);
    let mut iterations = Vec::new();
    let mut d_prev = 0;
    let done = |st: &SyncEeaState| match mode {
        EeaMode::Full => st.reg_b.rem_len() == 0,
        EeaMode::Half { ell } => (st.reg_b.rem_len() as isize - 1) < ell as isize,
    };
    while !done(&st) {
        let start = st.cycle;
        let (d, s) = st.iterate(field, d_prev)?;
        iterations.push(IterationStats { d, s, cycles: st.cycle - start });
        d_prev = d;
    }
    let bound = cycle_bound(n, mode);
    let total = st.cycle;
    let scheduled = bound.max(total);
    ledger.record_qq(scheduled * n as u64);
    for _ in 0..scheduled {
        ledger.record_inverse(field.cost_inv_mults());
    }
    ledger.record_cswap(iterations.len() as u64);
    let trace = CycleTrace {
        n,
        iterations,
        total_cycles: total,
        scheduled_cycles: scheduled,
        exceeded_bound: total > bound,
        peak_live_cells: st.peak_live,
    };
    let result = match mode {
        EeaMode::Full => {
            let gcd = st.reg_a.remainder();
            let v = st.reg_a.cofactor();
            // The machine keeps only the B-cofactor; the A-cofactor follows
            // from A u = gcd + B v by exact division.
            let (u, rest) = gcd.add(&b.mul(&v, field)).divmod(a, field)?;
            debug_assert!(rest.is_zero());
            SyncEeaResult::Full { gcd, u, v }
        }
        EeaMode::Half { .. } => SyncEeaResult::Half { omega: st.reg_b.remainder(), sigma: st.reg_b.cofactor() },
    };
    Ok((result, trace))
}

/// Inputs whose remainder sequence drops one degree per iteration with
/// linear quotients, ending at a nonzero constant gcd. These realize the
/// worst case 6n - 1 of a full run.
pub fn fibonacci_like_inputs<R: rand::Rng + ?Sized>(n: usize, field: &FieldSpec, rng: &mut R) -> (Poly, Poly) {
    assert!(n >= 1);
    // Build r_{k-1} = 1, r_{k-2} = q r_{k-1}, r_{j-2} = q_j r_{j-1} + r_j upward.
    let mut lower = Poly::zero();
    let mut upper = Poly::one();
    for _ in 0..n {
        let q = crate::rng::random_poly_exact(field, 1, rng);
        let next = q.mul(&upper, field).add(&lower);
        lower = upper;
        upper = next;
    }
    (upper, lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::classical_eea;
    use crate::rng::{random_poly_exact, seeded};

    #[test]
    fn bounds() {
        assert_eq!(cycle_bound(5, EeaMode::Full), 29);
        assert_eq!(cycle_bound(10, EeaMode::Half { ell: 5 }), 35);
        assert_eq!(cycle_bound(1, EeaMode::Full), 5);
    }

    #[test]
    fn fibonacci_inputs_hit_the_full_bound() {
        let f = FieldSpec::default_for(4).unwrap();
        let mut rng = seeded(5);
        let (a, b) = fibonacci_like_inputs(5, &f, &mut rng);
        let mut ledger = CostLedger::new();
        let (_, trace) = sync_eea_run(&a, &b, EeaMode::Full, &f, &mut ledger).unwrap();
        assert!(trace.iterations.iter().all(|it| it.d == 1 && it.s == 1));
        assert_eq!(trace.total_cycles, 29);
        assert_eq!(trace.closed_form(), 29);
    }

    #[test]
    fn full_run_matches_reference_table() {
        let f = FieldSpec::default_for(4).unwrap();
        let mut rng = seeded(11);
        for _ in 0..200 {
            let n = 1 + (rand::Rng::gen_range(&mut rng, 0..12));
            let a = random_poly_exact(&f, n, &mut rng);
            let b = crate::rng::random_poly_below(&f, n, &mut rng);
            if b.is_zero() {
                continue;
            }
            let mut ledger = CostLedger::new();
            let (res, trace) = sync_eea_run(&a, &b, EeaMode::Full, &f, &mut ledger).unwrap();
            let last = classical_eea(&a, &b, &f).unwrap().pop().unwrap();
            let SyncEeaResult::Full { gcd, u, v } = res else { panic!() };
            assert_eq!(gcd, last.r);
            assert_eq!(v, last.v);
            assert_eq!(u, last.u);
            assert_eq!(trace.total_cycles, trace.closed_form());
            assert!(trace.peak_live_cells <= 2 * (n + 1));
        }
    }

    #[test]
    fn input_validation() {
        let f = FieldSpec::default_for(3).unwrap();
        let a = Poly::from_bits(&[1, 1, 1]);
        let mut l = CostLedger::new();
        assert!(sync_eea_run(&a, &Poly::zero(), EeaMode::Full, &f, &mut l).is_err());
        assert!(sync_eea_run(&a, &a, EeaMode::Full, &f, &mut l).is_err());
        assert!(sync_eea_run(&a, &Poly::one(), EeaMode::Half { ell: 3 }, &f, &mut l).is_err());
    }

    #[test]
    fn half_bound_is_not_a_true_worst_case() {
        // Remainders fall one degree at a time down to degree ell and then
        // straight to zero: k = ell iterations, the last with s = ell + 1.
        let f = FieldSpec::default_for(4).unwrap();
        let mut rng = seeded(3);
        let ell = 8;
        let n = 2 * ell;
        let (mut upper, mut lower) = (random_poly_exact(&f, ell, &mut rng), Poly::zero());
        for _ in 0..ell {
            let q = random_poly_exact(&f, 1, &mut rng);
            let next = q.mul(&upper, &f).add(&lower);
            lower = upper;
            upper = next;
        }
        assert_eq!(upper.deg(), n as isize);
        let mut ledger = CostLedger::new();
        let (_, trace) = sync_eea_run(&upper, &lower, EeaMode::Half { ell }, &f, &mut ledger).unwrap();
        assert_eq!(trace.total_cycles, 7 * ell as u64 - 1);
        assert!(trace.exceeded_bound);
        assert_eq!(trace.scheduled_cycles, trace.total_cycles);
    }
}
