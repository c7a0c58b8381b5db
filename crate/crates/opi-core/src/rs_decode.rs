//! Reed-Solomon syndrome decoding through the key equation.
//!
//! Syndromes follow the Vandermonde convention s_k = sum_j e_j gamma_j^k for
//! k = 0..n-1, with gamma_j = g^(j-1) for a fixed generator g. The error
//! locator is sigma(z) = prod_j (1 - gamma_j z), so error positions are the
//! roots gamma_j^-1, and the evaluator is Omega = sigma S mod z^(2l). With
//! this offset Forney's formula reads e_j = gamma_j Omega(x) / sigma'(x) at
//! x = gamma_j^-1 (the minus sign vanishes in characteristic 2).
//!
//! The key equation is solved in one of two modes:
//!
//! - **explicit**: the synchronized EEA in half mode returns sigma as a
//!   polynomial. Each point then evaluates sigma = E(x^2) + x O(x^2), which
//!   also yields sigma'(x) = O(x^2) for free.
//! - **implicit**: a Dialog is built on (z^n, S) for n steps and sigma stays
//!   implicit. Each point replays the Dialog with derivative tracking to get
//!   W(x) and W'(x) for W = z^e sigma, where e = l + (delta_n + 1)/2.
//!
//! Both modes evaluate Omega explicitly by Horner's rule.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eea_dialog::{dialog_eval_with_derivative, Dialog, PolySpace};
use crate::eea_sync::{sync_eea_run, EeaMode, SyncEeaResult};
use crate::error::{Error, Result};
use crate::gf::{Felt, FieldSpec};
use crate::ledger::CostLedger;
use crate::poly::Poly;

/// Which EEA architecture solves the key equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    Explicit,
    Implicit,
}

impl std::str::FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(DecodeMode::Explicit),
            "implicit" => Ok(DecodeMode::Implicit),
            other => Err(Error::InvalidInput(format!("unknown decode mode {other:?}"))),
        }
    }
}

/// A Reed-Solomon code given by its evaluation points and syndrome length.
#[derive(Debug, Clone)]
pub struct RsCode {
    pub field: FieldSpec,
    /// Block length.
    pub m: usize,
    /// Syndrome length.
    pub n: usize,
    /// Correction radius floor(n/2).
    pub ell: usize,
    /// gamma_1..gamma_m as successive generator powers.
    pub eval_points: Vec<Felt>,
    /// gamma_j^-1, the candidate roots of sigma.
    pub root_points: Vec<Felt>,
}

impl RsCode {
    /// Code of length `m <= 2^b - 1` with `n` syndromes.
    pub fn new(field: FieldSpec, m: usize, n: usize) -> Result<Self> {
        if m == 0 || m > field.order() - 1 {
            return Err(Error::InvalidInput(format!(
                "block length {m} must lie in 1..={}",
                field.order() - 1
            )));
        }
        if n < 2 || n > m {
            return Err(Error::InvalidInput(format!("syndrome length {n} must lie in 2..={m}")));
        }
        let eval_points: Vec<Felt> = (0..m as u64).map(|j| field.exp_generator(j)).collect();
        let root_points = eval_points.iter().map(|&g| field.inv(g).expect("generator powers are nonzero")).collect();
        Ok(Self { field, m, n, ell: n / 2, eval_points, root_points })
    }

    /// Code over the default field of `b` bits.
    pub fn with_bits(b: u32, m: usize, n: usize) -> Result<Self> {
        Self::new(FieldSpec::default_for(b)?, m, n)
    }
}

/// Sparse error vector: location j in 1..=m mapped to a nonzero value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPattern(pub BTreeMap<usize, Felt>);

impl ErrorPattern {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of nonzero positions.
    pub fn weight(&self) -> usize {
        self.0.len()
    }

    /// Adds `value` at `location`, dropping the entry if it cancels.
    pub fn add(&mut self, location: usize, value: Felt) {
        let v = self.0.get(&location).copied().unwrap_or(Felt::ZERO) + value;
        if v.is_zero() {
            self.0.remove(&location);
        } else {
            self.0.insert(location, v);
        }
    }

    /// Symmetric sum of two patterns.
    pub fn xor(&self, other: &ErrorPattern) -> ErrorPattern {
        let mut out = self.clone();
        for (&j, &v) in &other.0 {
            out.add(j, v);
        }
        out
    }

    /// Uniform random pattern of exactly `weight` errors.
    pub fn random<R: rand::Rng + ?Sized>(code: &RsCode, weight: usize, rng: &mut R) -> ErrorPattern {
        let locations = rand::seq::index::sample(rng, code.m, weight.min(code.m));
        let mut out = ErrorPattern::new();
        for j in locations {
            out.0.insert(j + 1, crate::rng::random_nonzero(&code.field, rng));
        }
        out
    }
}

/// s_k = sum_j e_j gamma_j^k for k in 0..n.
pub fn syndrome_compute(e: &ErrorPattern, code: &RsCode) -> Result<Poly> {
    let f = &code.field;
    let mut s = vec![Felt::ZERO; code.n];
    for (&j, &v) in &e.0 {
        if j == 0 || j > code.m {
            return Err(Error::InvalidInput(format!("error location {j} outside 1..={}", code.m)));
        }
        let g = code.eval_points[j - 1];
        let mut term = v;
        for sk in s.iter_mut() {
            *sk = *sk + term;
            term = f.mul(term, g);
        }
    }
    Ok(Poly::from_coeffs(s))
}

/// The error locator in either representation.
#[derive(Debug, Clone)]
pub enum SigmaHandle {
    /// sigma as an explicit polynomial.
    Explicit(Poly),
    /// W = z^shift sigma is the B-cofactor of the Dialog's second row.
    Implicit { dialog: Dialog, shift: usize },
}

impl SigmaHandle {
    /// sigma as a polynomial (for the implicit form this replays the Dialog
    /// symbolically, which the quantum circuit never does).
    pub fn materialize(&self, field: &FieldSpec) -> Result<Poly> {
        match self {
            SigmaHandle::Explicit(p) => Ok(p.clone()),
            SigmaHandle::Implicit { dialog, shift } => {
                let space = PolySpace { field };
                let mut scratch = CostLedger::new();
                let (_, w) = dialog.apply_tau(&space, (Poly::zero(), Poly::one()), &mut scratch);
                if w.coeffs().iter().take(*shift).any(|c| !c.is_zero()) {
                    return Err(Error::DecodeFailure("locator cofactor has unexpected low terms".into()));
                }
                Ok(Poly::from_coeffs(w.coeffs().iter().skip(*shift).copied().collect()))
            }
        }
    }
}

/// Solution (sigma, Omega) of the key equation.
#[derive(Debug, Clone)]
pub struct KeySolution {
    pub sigma: SigmaHandle,
    pub omega: Poly,
}

impl KeySolution {
    /// (sigma, Omega) scaled so that sigma(0) = 1, for reporting.
    pub fn normalized(&self, field: &FieldSpec) -> Result<(Poly, Poly)> {
        let sigma = self.sigma.materialize(field)?;
        let c = sigma.coeff(0);
        if c.is_zero() {
            return Ok((sigma, self.omega.clone()));
        }
        let inv = field.inv(c)?;
        Ok((sigma.scale(inv, field), self.omega.scale(inv, field)))
    }
}

/// Solves sigma S = Omega mod z^(2l) with deg Omega < l.
pub fn solve_key_equation(
    s: &Poly,
    ell: usize,
    mode: DecodeMode,
    field: &FieldSpec,
    ledger: &mut CostLedger,
) -> Result<KeySolution> {
    if ell == 0 {
        return Err(Error::InvalidInput("correction radius must be positive".into()));
    }
    let n = 2 * ell;
    if s.deg() >= n as isize {
        return Err(Error::InvalidInput(format!("syndrome degree {} not below {n}", s.deg())));
    }
    let a = Poly::monomial(Felt::ONE, n);
    match mode {
        DecodeMode::Explicit => {
            if s.is_zero() {
                // The constant-time machine still runs its full schedule.
                let bound = crate::eea_sync::cycle_bound(n, EeaMode::Half { ell });
                ledger.record_qq(bound * n as u64);
                for _ in 0..bound {
                    ledger.record_inverse(field.cost_inv_mults());
                }
                return Ok(KeySolution { sigma: SigmaHandle::Explicit(Poly::one()), omega: Poly::zero() });
            }
            let (result, _) = sync_eea_run(&a, s, EeaMode::Half { ell }, field, ledger)?;
            match result {
                SyncEeaResult::Half { omega, sigma } => Ok(KeySolution { sigma: SigmaHandle::Explicit(sigma), omega }),
                SyncEeaResult::Full { .. } => unreachable!("half mode returns a half result"),
            }
        }
        DecodeMode::Implicit => {
            let dialog = Dialog::build_bezout_steps(&a, s, n, field, ledger)?;
            let delta = dialog.final_delta();
            // delta_n is odd after an even number of steps from delta_0 = 1.
            debug_assert_eq!(delta.rem_euclid(2), 1);
            let h = (delta - 1).div_euclid(2);
            let shift = ell as i64 + h + 1;
            let omega_deg = ell as i64 - 1 - h;
            if shift < 0 || omega_deg < -1 {
                return Err(Error::DecodeFailure(format!("dialog ended at delta = {delta}")));
            }
            let omega = if omega_deg < 0 {
                if !dialog.final_b.is_zero() {
                    return Err(Error::DecodeFailure("evaluator exceeds its formal degree".into()));
                }
                Poly::zero()
            } else {
                if dialog.final_b.deg() > omega_deg as isize {
                    return Err(Error::DecodeFailure("evaluator exceeds its formal degree".into()));
                }
                dialog.final_b.reverse(omega_deg as usize)
            };
            Ok(KeySolution { sigma: SigmaHandle::Implicit { dialog, shift: shift as usize }, omega })
        }
    }
}

/// What one evaluation point learns about sigma.
#[derive(Debug, Clone, Copy)]
struct PointProbe {
    is_root: bool,
    /// The Forney denominator: x sigma'(x) (explicit) or W'(x) (implicit).
    denom: Felt,
    /// The classical factor multiplying Omega(x) in Forney's numerator.
    numer_scale: Felt,
}

/// Evaluates sigma (or W) and the Forney denominator at a point.
fn probe(sol: &KeySolution, ell: usize, x: Felt, field: &FieldSpec, ledger: &mut CostLedger) -> Result<PointProbe> {
    match &sol.sigma {
        SigmaHandle::Explicit(sigma) => {
            // sigma(x) = E(x^2) + x O(x^2): l QC multiplications over the formal length l + 1.
            let x2 = field.square(x);
            let even: Vec<Felt> = sigma.coeffs().iter().step_by(2).copied().collect();
            let odd: Vec<Felt> = sigma.coeffs().iter().skip(1).step_by(2).copied().collect();
            let e = horner(&even, x2, field);
            let o = horner(&odd, x2, field);
            let value = e + field.mul(x, o);
            ledger.record_qc(ell as u64);
            // e_j = Omega(x) / (x sigma'(x)) with sigma'(x) = O(x^2).
            Ok(PointProbe {
                is_root: value.is_zero(),
                denom: o,
                numer_scale: field.inv(x)?,
            })
        }
        SigmaHandle::Implicit { dialog, shift } => {
            let rows = dialog_eval_with_derivative(dialog, x, field, ledger)?;
            let (w, dw) = rows.b_row;
            // sigma = W / z^shift, so x sigma'(x) = W'(x) / x^(shift - 1) at a root.
            Ok(PointProbe {
                is_root: w.is_zero(),
                denom: dw,
                numer_scale: field.pow(x, *shift as u64 - 1),
            })
        }
    }
}

fn horner(coeffs: &[Felt], x: Felt, field: &FieldSpec) -> Felt {
    coeffs.iter().rev().fold(Felt::ZERO, |acc, &c| field.mul(acc, x) + c)
}

/// Omega(x) times a classical factor, charged as l QC multiplications
/// (Horner over the formal length l plus the scaling).
fn forney_numerator(omega: &Poly, ell: usize, x: Felt, scale: Felt, field: &FieldSpec, ledger: &mut CostLedger) -> Felt {
    ledger.record_qc(ell as u64);
    field.mul(horner(omega.coeffs(), x, field), scale)
}

/// Locations j with sigma(gamma_j^-1) = 0.
pub fn chien_search(sol: &KeySolution, code: &RsCode, ledger: &mut CostLedger) -> Result<Vec<usize>> {
    let per_point: Vec<Result<(bool, CostLedger)>> = code
        .root_points
        .par_iter()
        .map(|&x| {
            let mut l = CostLedger::new();
            let p = probe(sol, code.ell, x, &code.field, &mut l)?;
            Ok((p.is_root, l))
        })
        .collect();
    let mut roots = Vec::new();
    for (j, r) in per_point.into_iter().enumerate() {
        let (is_root, l) = r?;
        *ledger += l;
        if is_root {
            roots.push(j + 1);
        }
    }
    Ok(roots)
}

/// Forney's error value at a root location j.
pub fn forney(sol: &KeySolution, location: usize, code: &RsCode, ledger: &mut CostLedger) -> Result<Felt> {
    if location == 0 || location > code.m {
        return Err(Error::InvalidInput(format!("location {location} outside 1..={}", code.m)));
    }
    let x = code.root_points[location - 1];
    let p = probe(sol, code.ell, x, &code.field, ledger)?;
    forney_value(sol, code, x, p, ledger)
}

fn forney_value(sol: &KeySolution, code: &RsCode, x: Felt, p: PointProbe, ledger: &mut CostLedger) -> Result<Felt> {
    let f = &code.field;
    let num = forney_numerator(&sol.omega, code.ell, x, p.numer_scale, f, ledger);
    let inv = f.inv_counted(p.denom, ledger).map_err(|_| {
        Error::DecodeFailure("zero locator derivative at a root (repeated root)".into())
    })?;
    Ok(f.mul_qq(num, inv, ledger))
}

/// A decoded pattern and whether its syndrome matches the input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub pattern: ErrorPattern,
    /// False flags an undecodable input (weight above the radius).
    pub syndrome_matches: bool,
}

/// Full pipeline: key equation, then a fused Chien/Forney pass over all
/// points. Forney is charged at every point, as in a constant-time circuit.
pub fn rs_decode(s: &Poly, code: &RsCode, mode: DecodeMode, ledger: &mut CostLedger) -> Result<DecodeOutcome> {
    let f = &code.field;
    let s_key = s.truncate(2 * code.ell);
    let sol = solve_key_equation(&s_key, code.ell, mode, f, ledger)?;
    let per_point: Vec<(Option<Felt>, CostLedger, bool)> = code
        .root_points
        .par_iter()
        .map(|&x| {
            let mut l = CostLedger::new();
            let p = match probe(&sol, code.ell, x, f, &mut l) {
                Ok(p) => p,
                Err(_) => return (None, l, true),
            };
            // Non-roots still pay for a Forney evaluation; their value is discarded.
            let forney_ok = if p.is_root {
                forney_value(&sol, code, x, p, &mut l)
            } else {
                let guard = PointProbe { denom: if p.denom.is_zero() { Felt::ONE } else { p.denom }, ..p };
                forney_value(&sol, code, x, guard, &mut l).map(|_| Felt::ZERO)
            };
            match forney_ok {
                Ok(v) if p.is_root => (Some(v), l, false),
                Ok(_) => (None, l, false),
                Err(_) => (None, l, true),
            }
        })
        .collect();
    let mut pattern = ErrorPattern::new();
    let mut failed = false;
    for (j, (value, l, bad)) in per_point.into_iter().enumerate() {
        *ledger += l;
        failed |= bad;
        if let Some(v) = value {
            if v.is_zero() {
                failed = true;
            } else {
                pattern.0.insert(j + 1, v);
            }
        }
    }
    let matches = !failed && syndrome_compute(&pattern, code)? == *s;
    Ok(DecodeOutcome { pattern, syndrome_matches: matches })
}
