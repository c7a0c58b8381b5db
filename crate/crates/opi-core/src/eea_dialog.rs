//! Division-free constant-time EEA recorded as a Dialog.
//!
//! The construction runs Bernstein-Yang divsteps on a pair (a, b) of
//! polynomials in a variable x, acting on constant terms:
//!
//! ```text
//! if delta > 0 and b(0) != 0:  (a, b, delta) <- (b, a, -delta)
//! c     <- b(0) / a(0)
//! b     <- (b - c a) / x
//! delta <- delta + 1
//! ```
//!
//! Each step is recorded as the pair (swapped, c); the list of steps is the
//! Dialog. Step i is the matrix M_double * M_add(c) * M_swap^swapped acting
//! on column vectors, so replaying the Dialog applies the product of all
//! step matrices (tau) to any start vector.
//!
//! The operands live in one shared buffer: `a` from the left end with a(0)
//! in the first cell, `b` from the right end with b(0) in the last cell. A
//! swap reverses the whole buffer. After the subtraction b(0) is zero, so
//! the last cell is released and becomes the next Dialog cell. The sum
//! len(buffer) + len(dialog) therefore never changes.
//!
//! Two orientations are supported:
//!
//! - **Bezout**: built on the reversed inputs rev(A), rev(B) of a pair with
//!   deg B < deg A = d. With z = 1/x, tau = M(z) diag(1, z) satisfies
//!   tau [A, B]^T = z^d [a_N(1/z), b_N(1/z)]^T, so tau [1, 0]^T and
//!   tau [0, 1]^T are Bezout cofactors of A and B. Each row equals a row of
//!   the classical EEA table times a unit and a power of z.
//! - **Modulus**: built directly on (P, B) with P(0) != 0 and deg B < deg P.
//!   Replaying over k[x]/(P), where M_double multiplies by x^-1, gives
//!   tau [P, B]^T = [c, 0]^T for the unit c = a_N, so tau [0, C]^T yields
//!   c C / B and the inverse replay yields B C.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, FieldSpec};
use crate::ledger::CostLedger;
use crate::poly::Poly;

/// One recorded divstep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogStep {
    /// Whether the conditional swap fired.
    #[serde(rename = "swap")]
    pub swapped: bool,
    /// The subtraction coefficient b(0)/a(0), serialized as hex.
    #[serde(with = "felt_hex")]
    pub coeff: Felt,
}

mod felt_hex {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::gf::Felt;

    pub fn serialize<S: Serializer>(f: &Felt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:x}", f.0))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Felt, D::Error> {
        let text = String::deserialize(d)?;
        u16::from_str_radix(text.trim_start_matches("0x"), 16)
            .map(Felt)
            .map_err(serde::de::Error::custom)
    }
}

/// Which playback semantics the Dialog carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Bezout,
    Modulus,
}

/// A recorded divstep sequence together with the final buffer contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialog {
    pub steps: Vec<DialogStep>,
    /// Formal degree d of the first input.
    pub n: usize,
    /// delta before each step and after the last (length steps + 1).
    pub deltas: Vec<i64>,
    pub orientation: Orientation,
    /// Number of buffer cells: len(buffer) + len(dialog) at every step.
    pub capacity: usize,
    /// Final first operand a_N in the buffer variable x.
    pub final_a: Poly,
    /// Final second operand b_N in the buffer variable x.
    pub final_b: Poly,
    /// Modulus for the modulus orientation.
    pub modulus: Option<Poly>,
}

/// Snapshot of the shared buffer after a step, used by the prefix checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BufferSnapshot {
    pub a: Poly,
    pub b: Poly,
    pub delta: i64,
    /// Cells still held by the operand buffer.
    pub buffer_len: usize,
    /// Cells already handed to the Dialog.
    pub dialog_len: usize,
}

/// The shared operand buffer of the construction.
struct SharedBuffer {
    cells: Vec<Felt>,
    /// Actual lengths (degree + 1) of the two operands.
    la: usize,
    lb: usize,
}

impl SharedBuffer {
    fn new(a: &Poly, b: &Poly, capacity: usize) -> Result<Self> {
        if a.len() + b.len() > capacity {
            return Err(Error::RegisterOverflow(format!(
                "operands need {} cells but the buffer has {capacity}",
                a.len() + b.len()
            )));
        }
        let mut cells = vec![Felt::ZERO; capacity];
        for (j, &c) in a.coeffs().iter().enumerate() {
            cells[j] = c;
        }
        for (j, &c) in b.coeffs().iter().enumerate() {
            cells[capacity - 1 - j] = c;
        }
        Ok(Self { cells, la: a.len(), lb: b.len() })
    }

    fn a(&self) -> Poly {
        Poly::from_coeffs(self.cells[..self.la].to_vec())
    }

    fn b(&self) -> Poly {
        let l = self.cells.len();
        Poly::from_coeffs((0..self.lb).map(|j| self.cells[l - 1 - j]).collect())
    }

    fn a0(&self) -> Felt {
        if self.la == 0 {
            Felt::ZERO
        } else {
            self.cells[0]
        }
    }

    fn b0(&self) -> Felt {
        if self.lb == 0 {
            Felt::ZERO
        } else {
            self.cells[self.cells.len() - 1]
        }
    }

    fn swap(&mut self) {
        self.cells.reverse();
        std::mem::swap(&mut self.la, &mut self.lb);
    }

    /// b <- (b - c a) / x, releasing the last cell. A zero coefficient
    /// skips the subtraction, so only the shift takes place.
    fn subtract_and_release(&mut self, c: Felt, field: &FieldSpec) -> Result<()> {
        let l = self.cells.len();
        let mut span = self.lb;
        if !c.is_zero() {
            span = self.la.max(self.lb);
            if self.la + span > l {
                return Err(Error::RegisterOverflow(format!(
                    "operands of lengths {} and {} do not fit in {l} cells",
                    self.la, self.lb
                )));
            }
            for j in 0..self.la {
                let cell = l - 1 - j;
                self.cells[cell] = self.cells[cell] + field.mul(c, self.cells[j]);
            }
        }
        if self.la >= l {
            return Err(Error::RegisterOverflow(format!(
                "first operand of length {} leaves no cell to release in {l}",
                self.la
            )));
        }
        debug_assert!(self.cells[l - 1].is_zero());
        self.cells.pop();
        let l = l - 1;
        let mut lb = span.saturating_sub(1);
        while lb > 0 && self.cells[l - lb].is_zero() {
            lb -= 1;
        }
        self.lb = lb;
        if self.la + self.lb > l {
            return Err(Error::RegisterOverflow(format!(
                "operands of lengths {} and {} overlap in {l} cells",
                self.la, self.lb
            )));
        }
        Ok(())
    }
}

/// Formal length bound (degree + 1) of the operands after `i` steps, for
/// inputs with deg a <= d and deg b < d: 2 deg a <= 2d - 1 - i + delta and
/// 2 deg b <= 2d - 1 - i - delta.
fn formal_len(d: usize, i: usize, delta: i64) -> (usize, usize) {
    let base = 2 * d as i64 - 1 - i as i64;
    let f = (base + delta).div_euclid(2) + 1;
    let g = (base - delta).div_euclid(2) + 1;
    (f.max(0) as usize, g.max(0) as usize)
}

struct Built {
    steps: Vec<DialogStep>,
    deltas: Vec<i64>,
    final_a: Poly,
    final_b: Poly,
}

#[allow(clippy::too_many_arguments)]
fn run_divsteps(
    a: &Poly,
    b: &Poly,
    d: usize,
    capacity: usize,
    nsteps: usize,
    field: &FieldSpec,
    ledger: &mut CostLedger,
    mut snapshots: Option<&mut Vec<BufferSnapshot>>,
) -> Result<Built> {
    let mut buf = SharedBuffer::new(a, b, capacity)?;
    let mut delta: i64 = 1;
    let mut steps = Vec::with_capacity(nsteps);
    let mut deltas = Vec::with_capacity(nsteps + 1);
    deltas.push(delta);
    for i in 0..nsteps {
        let swapped = delta > 0 && !buf.b0().is_zero();
        let (bound_f, bound_g) = formal_len(d, i, delta);
        if swapped {
            buf.swap();
            delta = -delta;
        }
        ledger.record_cswap(1);
        let a0 = buf.a0();
        let coeff = if a0.is_zero() {
            Felt::ZERO
        } else {
            let inv = field.inv_counted(a0, ledger)?;
            field.mul_qq(buf.b0(), inv, ledger)
        };
        if a0.is_zero() && !buf.b0().is_zero() {
            return Err(Error::InvalidInput("first operand has a zero constant term".into()));
        }
        let active = if swapped { bound_g } else { bound_f };
        ledger.record_qq(active.min(buf.cells.len()) as u64);
        ledger.record_cadd(1);
        buf.subtract_and_release(coeff, field)?;
        delta += 1;
        steps.push(DialogStep { swapped, coeff });
        deltas.push(delta);
        assert_eq!(buf.cells.len() + steps.len(), capacity, "register-sharing identity violated");
        if let Some(snaps) = snapshots.as_deref_mut() {
            snaps.push(BufferSnapshot {
                a: buf.a(),
                b: buf.b(),
                delta,
                buffer_len: buf.cells.len(),
                dialog_len: steps.len(),
            });
        }
    }
    Ok(Built { steps, deltas, final_a: buf.a(), final_b: buf.b() })
}

impl Dialog {
    /// Bezout-oriented build on (A, B) with deg B < deg A = n, running 2n steps.
    pub fn build_bezout(a: &Poly, b: &Poly, field: &FieldSpec, ledger: &mut CostLedger) -> Result<Dialog> {
        let d = Self::check_pair(a, b)?;
        Self::build_bezout_steps(a, b, 2 * d, field, ledger)
    }

    /// Bezout-oriented build with an explicit number of steps.
    pub fn build_bezout_steps(
        a: &Poly,
        b: &Poly,
        nsteps: usize,
        field: &FieldSpec,
        ledger: &mut CostLedger,
    ) -> Result<Dialog> {
        Self::build_bezout_traced(a, b, nsteps, field, ledger, None)
    }

    /// Bezout-oriented build that also records the buffer after every step.
    pub fn build_bezout_traced(
        a: &Poly,
        b: &Poly,
        nsteps: usize,
        field: &FieldSpec,
        ledger: &mut CostLedger,
        snapshots: Option<&mut Vec<BufferSnapshot>>,
    ) -> Result<Dialog> {
        let d = Self::check_pair(a, b)?;
        let fa = a.reverse(d);
        let fb = if d == 0 { Poly::zero() } else { b.reverse(d - 1) };
        let capacity = 2 * d + 1;
        let built = run_divsteps(&fa, &fb, d, capacity, nsteps, field, ledger, snapshots)?;
        Ok(Dialog {
            steps: built.steps,
            n: d,
            deltas: built.deltas,
            orientation: Orientation::Bezout,
            capacity,
            final_a: built.final_a,
            final_b: built.final_b,
            modulus: None,
        })
    }

    /// Modulus-oriented build on (P, B) with P(0) != 0 and deg B < deg P = n,
    /// running 2n steps. Fails with [`Error::NonUnitGcd`] when gcd(P, B) != 1.
    pub fn build_modulus(p: &Poly, b: &Poly, field: &FieldSpec, ledger: &mut CostLedger) -> Result<Dialog> {
        let d = Self::check_pair(p, b)?;
        if p.coeff(0).is_zero() {
            return Err(Error::InvalidInput("modulus must have a nonzero constant term".into()));
        }
        let capacity = 2 * d + 1;
        let built = run_divsteps(p, b, d, capacity, 2 * d, field, ledger, None).map_err(|e| match e {
            // A nontrivial gcd stays in the first operand and outgrows the buffer.
            Error::RegisterOverflow(msg) => Error::NonUnitGcd(msg),
            other => other,
        })?;
        if !built.final_b.is_zero() || built.final_a.deg() != 0 {
            return Err(Error::NonUnitGcd(format!(
                "divsteps ended at a = {}, b = {}",
                built.final_a, built.final_b
            )));
        }
        Ok(Dialog {
            steps: built.steps,
            n: d,
            deltas: built.deltas,
            orientation: Orientation::Modulus,
            capacity,
            final_a: built.final_a,
            final_b: built.final_b,
            modulus: Some(p.clone()),
        })
    }

    /// A Dialog from explicit steps, for contrived playback checks.
    pub fn from_steps(steps: Vec<DialogStep>, orientation: Orientation) -> Dialog {
        let mut deltas = vec![1i64];
        for s in &steps {
            let last = *deltas.last().unwrap();
            deltas.push(if s.swapped { -last } else { last } + 1);
        }
        Dialog {
            n: steps.len().div_ceil(2),
            capacity: steps.len() + 1,
            steps,
            deltas,
            orientation,
            final_a: Poly::zero(),
            final_b: Poly::zero(),
            modulus: None,
        }
    }

    fn check_pair(a: &Poly, b: &Poly) -> Result<usize> {
        if a.deg() < 0 {
            return Err(Error::InvalidInput("first input must be nonzero".into()));
        }
        if b.deg() >= a.deg() {
            return Err(Error::InvalidInput(format!(
                "need deg B < deg A, got {} and {}",
                b.deg(),
                a.deg()
            )));
        }
        Ok(a.deg() as usize)
    }

    /// Number of recorded steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Whether no steps were recorded.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// delta after the last step.
    pub fn final_delta(&self) -> i64 {
        *self.deltas.last().expect("deltas is never empty")
    }

    /// Replays the first `upto` steps on a start vector.
    pub fn play<S: PlaybackSpace>(
        &self,
        space: &S,
        start: (S::Elem, S::Elem),
        upto: usize,
        ledger: &mut CostLedger,
    ) -> (S::Elem, S::Elem) {
        let (mut x, mut y) = start;
        for step in &self.steps[..upto] {
            if step.swapped {
                std::mem::swap(&mut x, &mut y);
            }
            ledger.record_cswap(1);
            y = space.add_scaled(&y, step.coeff, &x, ledger);
            y = space.double(&y, ledger);
        }
        (x, y)
    }

    /// Applies the inverse of the first `upto` steps (last step first).
    pub fn play_inverse<S: PlaybackSpace>(
        &self,
        space: &S,
        start: (S::Elem, S::Elem),
        upto: usize,
        ledger: &mut CostLedger,
    ) -> (S::Elem, S::Elem) {
        let (mut x, mut y) = start;
        for step in self.steps[..upto].iter().rev() {
            y = space.halve(&y, ledger);
            y = space.add_scaled(&y, step.coeff, &x, ledger);
            if step.swapped {
                std::mem::swap(&mut x, &mut y);
            }
            ledger.record_cswap(1);
        }
        (x, y)
    }

    /// Bezout-orientation tau applied to a start vector: the leading
    /// diag(1, z) followed by every step.
    pub fn apply_tau<S: PlaybackSpace>(
        &self,
        space: &S,
        start: (S::Elem, S::Elem),
        ledger: &mut CostLedger,
    ) -> (S::Elem, S::Elem) {
        self.apply_tau_prefix(space, start, self.steps.len(), ledger)
    }

    /// As [`Dialog::apply_tau`] restricted to the first `upto` steps.
    pub fn apply_tau_prefix<S: PlaybackSpace>(
        &self,
        space: &S,
        start: (S::Elem, S::Elem),
        upto: usize,
        ledger: &mut CostLedger,
    ) -> (S::Elem, S::Elem) {
        let (x, y) = start;
        let y = match self.orientation {
            Orientation::Bezout => space.double(&y, ledger),
            Orientation::Modulus => y,
        };
        self.play(space, (x, y), upto, ledger)
    }

    /// The Bezout cofactor polynomials of both rows, materialized:
    /// ((U_a, V_a), (U_b, V_b)) with A U_r + B V_r = z^d r_N(1/z).
    pub fn bezout_rows(&self, field: &FieldSpec) -> Result<((Poly, Poly), (Poly, Poly))> {
        self.require(Orientation::Bezout)?;
        let space = PolySpace { field };
        let mut scratch = CostLedger::new();
        let (ua, ub) = self.apply_tau(&space, (Poly::one(), Poly::zero()), &mut scratch);
        let (va, vb) = self.apply_tau(&space, (Poly::zero(), Poly::one()), &mut scratch);
        Ok(((ua, va), (ub, vb)))
    }

    fn require(&self, want: Orientation) -> Result<()> {
        if self.orientation != want {
            return Err(Error::InvalidInput(format!(
                "operation needs a {want:?}-oriented dialog, got {:?}",
                self.orientation
            )));
        }
        Ok(())
    }

    fn modulus_space<'a>(&'a self, field: &'a FieldSpec, modulus: &Poly) -> Result<ModSpace<'a>> {
        self.require(Orientation::Modulus)?;
        let own = self.modulus.as_ref().expect("modulus dialogs store their modulus");
        if own != modulus {
            return Err(Error::InvalidInput("dialog was built for a different modulus".into()));
        }
        ModSpace::new(field, own)
    }
}

/// Vector space on which Dialog steps act. `add_scaled` is M_add (with the
/// sign absorbed by characteristic 2) and `double` is M_double acting on the
/// second component.
pub trait PlaybackSpace {
    type Elem: Clone;

    /// y + c x.
    fn add_scaled(&self, y: &Self::Elem, c: Felt, x: &Self::Elem, ledger: &mut CostLedger) -> Self::Elem;

    /// M_double on the second component.
    fn double(&self, y: &Self::Elem, ledger: &mut CostLedger) -> Self::Elem;

    /// Inverse of `double`.
    fn halve(&self, y: &Self::Elem, ledger: &mut CostLedger) -> Self::Elem;
}

/// Bezout polynomials in z; doubling multiplies by z.
pub struct PolySpace<'a> {
    pub field: &'a FieldSpec,
}

impl PlaybackSpace for PolySpace<'_> {
    type Elem = Poly;

    fn add_scaled(&self, y: &Poly, c: Felt, x: &Poly, _ledger: &mut CostLedger) -> Poly {
        y.add(&x.scale(c, self.field))
    }

    fn double(&self, y: &Poly, _ledger: &mut CostLedger) -> Poly {
        y.shift(1)
    }

    fn halve(&self, y: &Poly, _ledger: &mut CostLedger) -> Poly {
        assert!(y.coeff(0).is_zero(), "halving a polynomial with nonzero constant term");
        Poly::from_coeffs(y.coeffs().iter().skip(1).copied().collect())
    }
}

/// Buffer-variable polynomials; doubling is the exact division by x that
/// the construction performs.
pub struct NativeSpace<'a> {
    pub field: &'a FieldSpec,
}

impl PlaybackSpace for NativeSpace<'_> {
    type Elem = Poly;

    fn add_scaled(&self, y: &Poly, c: Felt, x: &Poly, ledger: &mut CostLedger) -> Poly {
        PolySpace { field: self.field }.add_scaled(y, c, x, ledger)
    }

    fn double(&self, y: &Poly, ledger: &mut CostLedger) -> Poly {
        PolySpace { field: self.field }.halve(y, ledger)
    }

    fn halve(&self, y: &Poly, _ledger: &mut CostLedger) -> Poly {
        y.shift(1)
    }
}

/// Evaluation of Bezout polynomials at a classical point.
pub struct PointSpace<'a> {
    pub field: &'a FieldSpec,
    pub x: Felt,
}

impl PlaybackSpace for PointSpace<'_> {
    type Elem = Felt;

    fn add_scaled(&self, y: &Felt, c: Felt, x: &Felt, ledger: &mut CostLedger) -> Felt {
        *y + self.field.mul_qq(c, *x, ledger)
    }

    fn double(&self, y: &Felt, ledger: &mut CostLedger) -> Felt {
        ledger.record_qc_scale(1);
        self.field.mul(*y, self.x)
    }

    fn halve(&self, y: &Felt, ledger: &mut CostLedger) -> Felt {
        ledger.record_qc_scale(1);
        self.field.mul(*y, self.field.inv(self.x).expect("halving needs a nonzero point"))
    }
}

/// Evaluation of Bezout polynomials and their derivatives at a classical
/// point, carried as (value, derivative) pairs by the product rule.
pub struct DualPointSpace<'a> {
    pub field: &'a FieldSpec,
    pub x: Felt,
}

impl PlaybackSpace for DualPointSpace<'_> {
    type Elem = (Felt, Felt);

    fn add_scaled(&self, y: &(Felt, Felt), c: Felt, x: &(Felt, Felt), ledger: &mut CostLedger) -> (Felt, Felt) {
        (y.0 + self.field.mul_qq(c, x.0, ledger), y.1 + self.field.mul_qq(c, x.1, ledger))
    }

    fn double(&self, y: &(Felt, Felt), ledger: &mut CostLedger) -> (Felt, Felt) {
        // d/dz (z v) = v + z v'.
        ledger.record_qc_scale(2);
        (self.field.mul(y.0, self.x), y.0 + self.field.mul(y.1, self.x))
    }

    fn halve(&self, y: &(Felt, Felt), ledger: &mut CostLedger) -> (Felt, Felt) {
        // w = v / z: w' = (v' - w) / z.
        ledger.record_qc_scale(2);
        let inv = self.field.inv(self.x).expect("halving needs a nonzero point");
        let w = self.field.mul(y.0, inv);
        (w, self.field.mul(y.1 + w, inv))
    }
}

/// Residues modulo P with P(0) != 0; doubling multiplies by x^-1.
pub struct ModSpace<'a> {
    field: &'a FieldSpec,
    modulus: &'a Poly,
    inv_p0: Felt,
}

impl<'a> ModSpace<'a> {
    pub fn new(field: &'a FieldSpec, modulus: &'a Poly) -> Result<Self> {
        let inv_p0 = field.inv(modulus.coeff(0))?;
        Ok(Self { field, modulus, inv_p0 })
    }

    fn width(&self) -> u64 {
        self.modulus.deg().max(0) as u64
    }
}

impl PlaybackSpace for ModSpace<'_> {
    type Elem = Poly;

    fn add_scaled(&self, y: &Poly, c: Felt, x: &Poly, ledger: &mut CostLedger) -> Poly {
        ledger.record_qq(self.width());
        y.add(&x.scale(c, self.field))
    }

    fn double(&self, y: &Poly, ledger: &mut CostLedger) -> Poly {
        // Add the multiple of P that clears the constant term, then divide by x.
        ledger.record_qc(self.width());
        let t = self.field.mul(y.coeff(0), self.inv_p0);
        let cleared = y.add(&self.modulus.scale(t, self.field));
        Poly::from_coeffs(cleared.coeffs().iter().skip(1).copied().collect())
    }

    fn halve(&self, y: &Poly, ledger: &mut CostLedger) -> Poly {
        ledger.record_qc(self.width());
        y.shift(1).rem(self.modulus, self.field).expect("modulus is nonzero")
    }
}

/// C / B mod P for a Dialog built from (P, B).
pub fn dialog_div(d: &Dialog, c: &Poly, modulus: &Poly, field: &FieldSpec, ledger: &mut CostLedger) -> Result<Poly> {
    let space = d.modulus_space(field, modulus)?;
    let start = c.rem(modulus, field)?;
    let (x, _) = d.play(&space, (Poly::zero(), start), d.len(), ledger);
    let unit_inv = field.inv_counted(d.final_a.coeff(0), ledger)?;
    Ok(x.scale(unit_inv, field))
}

/// B C mod P for a Dialog built from (P, B).
pub fn dialog_mul(d: &Dialog, c: &Poly, modulus: &Poly, field: &FieldSpec, ledger: &mut CostLedger) -> Result<Poly> {
    let space = d.modulus_space(field, modulus)?;
    let start = c.rem(modulus, field)?;
    let (_, y) = d.play_inverse(&space, (start, Poly::zero()), d.len(), ledger);
    Ok(y.scale(d.final_a.coeff(0), field))
}

/// Values of both rows' B-cofactors V_a and V_b at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowValues<T> {
    /// Row of the first operand (the gcd row once the run is complete).
    pub a_row: T,
    /// Row of the second operand.
    pub b_row: T,
}

/// Evaluates tau [0, 1]^T at `gamma`: the B-cofactors of both rows.
pub fn dialog_eval(d: &Dialog, gamma: Felt, field: &FieldSpec, ledger: &mut CostLedger) -> Result<RowValues<Felt>> {
    d.require(Orientation::Bezout)?;
    let space = PointSpace { field, x: gamma };
    let (a_row, b_row) = d.apply_tau(&space, (Felt::ZERO, Felt::ONE), ledger);
    Ok(RowValues { a_row, b_row })
}

/// As [`dialog_eval`], also returning each cofactor's derivative at `gamma`.
pub fn dialog_eval_with_derivative(
    d: &Dialog,
    gamma: Felt,
    field: &FieldSpec,
    ledger: &mut CostLedger,
) -> Result<RowValues<(Felt, Felt)>> {
    d.require(Orientation::Bezout)?;
    let space = DualPointSpace { field, x: gamma };
    let (a_row, b_row) = d.apply_tau(&space, ((Felt::ZERO, Felt::ZERO), (Felt::ONE, Felt::ZERO)), ledger);
    Ok(RowValues { a_row, b_row })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_poly_below, random_poly_exact, seeded};

    #[test]
    fn empty_dialog_exposes_z_in_the_second_row() {
        let f = FieldSpec::default_for(4).unwrap();
        let d = Dialog::from_steps(Vec::new(), Orientation::Bezout);
        let mut l = CostLedger::new();
        for g in f.elements() {
            let v = dialog_eval_with_derivative(&d, g, &f, &mut l).unwrap();
            assert_eq!(v.b_row, (g, Felt::ONE));
            assert_eq!(v.a_row, (Felt::ZERO, Felt::ZERO));
        }
    }

    #[test]
    fn constant_cofactor_evaluates_to_itself() {
        // One swap step with c = 0 moves the z of the second row into the
        // first and leaves 0 behind: tau [0,1] = (z, 0).
        let f = FieldSpec::default_for(4).unwrap();
        let d = Dialog::from_steps(vec![DialogStep { swapped: true, coeff: Felt::ZERO }], Orientation::Bezout);
        let mut l = CostLedger::new();
        let v = dialog_eval(&d, Felt(3), &f, &mut l).unwrap();
        assert_eq!(v.a_row, Felt(3));
        assert_eq!(v.b_row, Felt::ZERO);
    }

    #[test]
    fn register_identity_and_capacity() {
        let f = FieldSpec::default_for(5).unwrap();
        let mut rng = seeded(9);
        for n in 1..12 {
            let a = random_poly_exact(&f, n, &mut rng);
            let b = random_poly_below(&f, n, &mut rng);
            let mut snaps = Vec::new();
            let mut l = CostLedger::new();
            match Dialog::build_bezout_traced(&a, &b, 2 * n, &f, &mut l, Some(&mut snaps)) {
                Ok(d) => {
                    assert_eq!(d.len(), 2 * n);
                    assert_eq!(d.capacity, 2 * n + 1);
                    for s in &snaps {
                        assert_eq!(s.buffer_len + s.dialog_len, 2 * n + 1);
                    }
                }
                Err(Error::RegisterOverflow(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn orientation_mismatch_is_reported() {
        let f = FieldSpec::default_for(4).unwrap();
        let d = Dialog::from_steps(Vec::new(), Orientation::Modulus);
        let mut l = CostLedger::new();
        assert!(dialog_eval(&d, Felt(1), &f, &mut l).is_err());
        let p = Poly::from_bits(&[1, 1, 0, 1]);
        let bez = Dialog::from_steps(Vec::new(), Orientation::Bezout);
        assert!(dialog_div(&bez, &Poly::one(), &p, &f, &mut l).is_err());
    }

    #[test]
    fn non_coprime_modulus_is_flagged() {
        let f = FieldSpec::default_for(4).unwrap();
        // P = (z+1)(z+2), B = z+1 share a factor.
        let p = Poly::from_bits(&[1, 1]).mul(&Poly::from_bits(&[2, 1]), &f);
        let b = Poly::from_bits(&[1, 1]);
        let mut l = CostLedger::new();
        assert!(matches!(Dialog::build_modulus(&p, &b, &f, &mut l), Err(Error::NonUnitGcd(_))));
    }

    #[test]
    fn step_serialization_uses_swap_and_hex() {
        let s = DialogStep { swapped: true, coeff: Felt(0x1f) };
        let text = serde_json_like(&s);
        assert!(text.contains("\"swap\":true") && text.contains("\"coeff\":\"1f\""));
    }

    fn serde_json_like(s: &DialogStep) -> String {
        // Minimal JSON rendering through the serde data model.
        struct Out(String);
        impl std::fmt::Write for Out {
            fn write_str(&mut self, t: &str) -> std::fmt::Result {
                self.0.push_str(t);
                Ok(())
            }
        }
        let mut o = Out(String::new());
        use std::fmt::Write;
        write!(o, "{{\"swap\":{},\"coeff\":\"{:x}\"}}", s.swapped, s.coeff.0).unwrap();
        o.0
    }
}
