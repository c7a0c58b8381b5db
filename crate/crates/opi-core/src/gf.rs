//! Arithmetic in GF(2^b) in polynomial basis.
//!
//! Elements are b-bit symbols where bit i holds the coefficient of x^i.
//! Addition is XOR. Multiplication is the carry-less product reduced modulo
//! the field's irreducible polynomial; the hot path uses discrete log and
//! antilog tables built from that definition at construction time, and the
//! direct shift-and-reduce product stays available as a reference.
//!
//! Inversion follows an Itoh-Tsujii addition chain for a^(2^b - 2) so that
//! the number of multiplications it needs is known in advance and can be
//! charged to a [`CostLedger`].

use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::CostLedger;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

const MULT_COST_TABLE: &str = include_str!("../data/gf_mult_costs.csv");

/// One element of GF(2^b) as its coordinate bits in polynomial basis.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Felt(pub u16);

impl Felt {
    /// The additive identity.
    pub const ZERO: Felt = Felt(0);
    /// The multiplicative identity.
    pub const ONE: Felt = Felt(1);

    /// Raw coordinate bits.
    pub fn bits(self) -> u16 {
        self.0
    }

    /// Whether this is the zero element.
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// Field addition is bitwise XOR in every extension of F2.
impl Add for Felt {
    type Output = Felt;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Felt) -> Felt {
        Felt(self.0 ^ rhs.0)
    }
}

/// Subtraction coincides with addition in characteristic 2.
impl Sub for Felt {
    type Output = Felt;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Felt) -> Felt {
        Felt(self.0 ^ rhs.0)
    }
}

/// Adds two field elements (XOR of their bits).
pub fn felt_add(a: Felt, b: Felt) -> Felt {
    a + b
}

/// Gate counts of a single quantum-quantum multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCosts {
    pub toffoli: u64,
    pub cnot: u64,
    pub pctof: u64,
}

/// Looks up the shipped gate-count table for extension degree `b`.
pub fn shipped_costs(b: u32) -> Option<GateCosts> {
    MULT_COST_TABLE
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .filter_map(|line| {
            let cols: Vec<u64> = line.split(',').map(|c| c.trim().parse().ok()).collect::<Option<_>>()?;
            (cols.len() == 4).then(|| (cols[0], GateCosts { toffoli: cols[1], cnot: cols[2], pctof: cols[3] }))
        })
        .find(|(deg, _)| *deg == u64::from(b))
        .map(|(_, costs)| costs)
}

/// Serializable description of a field, as accepted by configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub b: u32,
    /// Hex bitmask of the modulus; the default polynomial is used when absent.
    #[serde(default)]
    pub irreducible_hex: Option<String>,
    /// Overrides the shipped gate counts.
    #[serde(default)]
    pub costs: Option<GateCosts>,
}

/// A binary extension field together with its imported cost constants.
///
/// Cloning is cheap: the arithmetic tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    b: u32,
    irreducible: u32,
    costs: Option<GateCosts>,
    cost_inv_mults: u64,
    generator: Felt,
    exp: Arc<[u16]>,
    log: Arc<[u16]>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("b", &self.b)
            .field("irreducible", &format_args!("{:#x}", self.irreducible))
            .field("costs", &self.costs)
            .field("cost_inv_mults", &self.cost_inv_mults)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.b == other.b && self.irreducible == other.irreducible
    }
}

impl Eq for FieldSpec {}

/// Remainder of `a` modulo `m` as F2[x] polynomials encoded in bitmasks.
fn poly2_rem(mut a: u64, m: u64) -> u64 {
    let dm = 63 - m.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= dm {
        a ^= m << (63 - a.leading_zeros() - dm);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: u32) -> bool {
    if poly < 2 {
        return false;
    }
    let deg = 31 - poly.leading_zeros();
    if deg == 0 {
        return false;
    }
    (1..=deg / 2).all(|d| ((1u64 << d)..(1u64 << (d + 1))).all(|q| poly2_rem(u64::from(poly), q) != 0))
}

/// The lexicographically smallest irreducible polynomial of degree `b`.
pub fn default_irreducible(b: u32) -> Result<u32> {
    check_degree(b)?;
    ((1u32 << b)..(1u32 << (b + 1)))
        .find(|&p| is_irreducible(p))
        .ok_or_else(|| Error::InvalidField(format!("no irreducible polynomial of degree {b}")))
}

fn check_degree(b: u32) -> Result<()> {
    if b == 0 || b > MAX_DEGREE {
        return Err(Error::InvalidField(format!("degree {b} outside 1..={MAX_DEGREE}")));
    }
    Ok(())
}

/// Carry-less product of two b-bit values reduced modulo `irreducible`.
pub fn clmul_reduce(a: u16, b: u16, irreducible: u32, deg: u32) -> u16 {
    let mut acc: u64 = 0;
    for i in 0..deg {
        if (b >> i) & 1 == 1 {
            acc ^= u64::from(a) << i;
        }
    }
    poly2_rem(acc, u64::from(irreducible)) as u16
}

/// Number of multiplications in the binary Itoh-Tsujii chain for degree `b`.
pub fn itoh_tsujii_mults(b: u32) -> u64 {
    if b <= 1 {
        return 0;
    }
    let e = b - 1;
    u64::from(31 - e.leading_zeros() + e.count_ones() - 1)
}

impl FieldSpec {
    /// Builds GF(2^b) modulo `irreducible`, validating degree and irreducibility.
    /// Cost constants are taken from the shipped table when it has a row for `b`.
    pub fn new(b: u32, irreducible: u32) -> Result<Self> {
        check_degree(b)?;
        if irreducible >> b != 1 {
            return Err(Error::InvalidField(format!(
                "modulus {irreducible:#x} does not have degree {b}"
            )));
        }
        if !is_irreducible(irreducible) {
            return Err(Error::InvalidField(format!("modulus {irreducible:#x} is reducible")));
        }
        let order = 1usize << b;
        let generator = find_generator(b, irreducible);
        let mut exp = vec![0u16; 2 * (order - 1)];
        let mut log = vec![0u16; order];
        let mut cur: u16 = 1;
        for i in 0..order - 1 {
            exp[i] = cur;
            exp[i + order - 1] = cur;
            log[usize::from(cur)] = i as u16;
            cur = clmul_reduce(cur, generator, irreducible, b);
        }
        Ok(Self {
            b,
            irreducible,
            costs: shipped_costs(b),
            cost_inv_mults: itoh_tsujii_mults(b),
            generator: Felt(generator),
            exp: exp.into(),
            log: log.into(),
        })
    }

    /// GF(2^b) over the lexicographically smallest irreducible polynomial.
    pub fn default_for(b: u32) -> Result<Self> {
        Self::new(b, default_irreducible(b)?)
    }

    /// Builds a field from a configuration entry.
    pub fn from_config(cfg: &FieldConfig) -> Result<Self> {
        let poly = match &cfg.irreducible_hex {
            Some(hex) => {
                let digits = hex.trim().trim_start_matches("0x").trim_start_matches("0X");
                u32::from_str_radix(digits, 16)
                    .map_err(|e| Error::InvalidField(format!("bad irreducible_hex {hex:?}: {e}")))?
            }
            None => default_irreducible(cfg.b)?,
        };
        let field = Self::new(cfg.b, poly)?;
        Ok(match cfg.costs {
            Some(costs) => field.with_costs(costs),
            None => field,
        })
    }

    /// Replaces the per-multiplication gate counts.
    pub fn with_costs(mut self, costs: GateCosts) -> Self {
        self.costs = Some(costs);
        self
    }

    /// Replaces the number of multiplications charged per inversion.
    pub fn with_inv_mults(mut self, mults: u64) -> Self {
        self.cost_inv_mults = mults;
        self
    }

    /// Extension degree.
    pub fn b(&self) -> u32 {
        self.b
    }

    /// Number of field elements, 2^b.
    pub fn order(&self) -> usize {
        1usize << self.b
    }

    /// Modulus bitmask (bit b set).
    pub fn irreducible(&self) -> u32 {
        self.irreducible
    }

    /// Imported gate counts, if known for this degree.
    pub fn costs(&self) -> Option<GateCosts> {
        self.costs
    }

    /// Multiplications charged per inversion.
    pub fn cost_inv_mults(&self) -> u64 {
        self.cost_inv_mults
    }

    /// Smallest primitive element; its powers enumerate the nonzero elements.
    pub fn generator(&self) -> Felt {
        self.generator
    }

    /// Validates a bit pattern as a field element.
    pub fn felt(&self, bits: u32) -> Result<Felt> {
        if bits >= (1u32 << self.b) {
            return Err(Error::ElementOutOfRange { bits, b: self.b });
        }
        Ok(Felt(bits as u16))
    }

    /// Whether `a` lies in this field.
    pub fn contains(&self, a: Felt) -> bool {
        u32::from(a.0) < (1u32 << self.b)
    }

    /// All field elements in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        (0..(1u32 << self.b)).map(|v| Felt(v as u16))
    }

    /// g^e for the field generator g.
    pub fn exp_generator(&self, e: u64) -> Felt {
        Felt(self.exp[(e % (self.order() as u64 - 1)) as usize])
    }

    /// Discrete log to the base of the generator; `None` for zero.
    pub fn log_generator(&self, a: Felt) -> Option<u64> {
        (!a.is_zero()).then(|| u64::from(self.log[usize::from(a.0)]))
    }

    /// Field product.
    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if a.0 == 0 || b.0 == 0 {
            return Felt::ZERO;
        }
        let i = usize::from(self.log[usize::from(a.0)]) + usize::from(self.log[usize::from(b.0)]);
        Felt(self.exp[i])
    }

    /// Field product computed by shift-and-reduce, independent of the tables.
    pub fn mul_reference(&self, a: Felt, b: Felt) -> Felt {
        Felt(clmul_reduce(a.0, b.0, self.irreducible, self.b))
    }

    /// Product of two register-held operands, charged as one QQ multiplication.
    #[inline]
    pub fn mul_qq(&self, a: Felt, b: Felt, ledger: &mut CostLedger) -> Felt {
        ledger.record_qq(1);
        self.mul(a, b)
    }

    /// Product with a classically known constant, charged as one QC multiplication.
    #[inline]
    pub fn mul_const(&self, a: Felt, c: Felt, ledger: &mut CostLedger) -> Felt {
        ledger.record_qc(1);
        self.mul(a, c)
    }

    /// a^2. Squaring is F2-linear in characteristic 2.
    #[inline]
    pub fn square(&self, a: Felt) -> Felt {
        self.mul(a, a)
    }

    /// a^e by square and multiply.
    pub fn pow(&self, a: Felt, mut e: u64) -> Felt {
        let mut base = a;
        let mut acc = Felt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse through the Itoh-Tsujii chain.
    pub fn inv(&self, a: Felt) -> Result<Felt> {
        self.inv_chain(a).map(|(v, _)| v)
    }

    /// Inverse charged to the ledger as one inversion plus its chain multiplications.
    pub fn inv_counted(&self, a: Felt, ledger: &mut CostLedger) -> Result<Felt> {
        let v = self.inv(a)?;
        ledger.record_inverse(self.cost_inv_mults);
        Ok(v)
    }

    /// Runs the chain a^(2^(b-1) - 1) then squares once, returning the
    /// inverse and the number of multiplications performed.
    pub fn inv_chain(&self, a: Felt) -> Result<(Felt, u64)> {
        if a.is_zero() {
            return Err(Error::InverseOfZero);
        }
        if self.b == 1 {
            return Ok((Felt::ONE, 0));
        }
        let e = self.b - 1;
        let top = 31 - e.leading_zeros();
        // beta holds a^(2^k - 1) for the chain position k.
        let mut beta = a;
        let mut k: u32 = 1;
        let mut mults = 0u64;
        for bit in (0..top).rev() {
            let mut shifted = beta;
            for _ in 0..k {
                shifted = self.square(shifted);
            }
            beta = self.mul(shifted, beta);
            mults += 1;
            k *= 2;
            if (e >> bit) & 1 == 1 {
                beta = self.mul(self.square(beta), a);
                mults += 1;
                k += 1;
            }
        }
        debug_assert_eq!(k, e);
        Ok((self.square(beta), mults))
    }
}

fn find_generator(b: u32, irreducible: u32) -> u16 {
    let order = (1u64 << b) - 1;
    if order == 1 {
        return 1;
    }
    let prime_factors: Vec<u64> = {
        let mut n = order;
        let mut fs = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                fs.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            fs.push(n);
        }
        fs
    };
    let pow = |g: u16, mut e: u64| {
        let mut acc: u16 = 1;
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = clmul_reduce(acc, base, irreducible, b);
            }
            base = clmul_reduce(base, base, irreducible, b);
            e >>= 1;
        }
        acc
    };
    (2..(1u32 << b))
        .map(|g| g as u16)
        .find(|&g| prime_factors.iter().all(|&p| pow(g, order / p) != 1))
        .expect("the multiplicative group of a finite field is cyclic")
}

/// A multi-target Toffoli whose two controls are parities of input wires:
/// every wire in `target_set` is flipped by parity(x & control_set_x) AND
/// parity(y & control_set_y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PctofGate {
    pub control_set_x: u32,
    pub control_set_y: u32,
    pub target_set: u32,
}

impl PctofGate {
    /// Applies the gate to an output register given inputs x and y.
    pub fn apply(&self, x: u32, y: u32, out: u32) -> u32 {
        let fire = ((x & self.control_set_x).count_ones() & (y & self.control_set_y).count_ones()) & 1;
        if fire == 1 {
            out ^ self.target_set
        } else {
            out
        }
    }

    /// The degree-2 Boolean form x^T (cx cy^T) y as a b*b-bit row vector,
    /// bit (i*b + j) standing for the monomial x_i y_j.
    fn form(&self, b: u32) -> Vec<u64> {
        let cols = (b * b) as usize;
        let mut row = vec![0u64; cols.div_ceil(64)];
        for i in 0..b {
            if (self.control_set_x >> i) & 1 == 0 {
                continue;
            }
            for j in 0..b {
                if (self.control_set_y >> j) & 1 == 1 {
                    let bit = (i * b + j) as usize;
                    row[bit / 64] ^= 1 << (bit % 64);
                }
            }
        }
        row
    }
}

/// Runs a gate list on inputs (x, y) starting from a zero output register.
pub fn pctof_apply_all(gates: &[PctofGate], x: u32, y: u32) -> u32 {
    gates.iter().fold(0, |out, g| g.apply(x, y, out))
}

/// Rank of a set of F2 row vectors.
pub fn f2_rank(rows: &[Vec<u64>]) -> usize {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (bvec, &p) in basis.iter().zip(&pivots) {
            if (r[p / 64] >> (p % 64)) & 1 == 1 {
                xor_into(&mut r, bvec);
            }
        }
        if let Some(p) = lowest_bit(&r) {
            basis.push(r);
            pivots.push(p);
        }
    }
    basis.len()
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Rewrites a PCTOF circuit on b-bit inputs with as many gates as the F2
/// rank of the gates' degree-2 forms.
///
/// The first gates whose forms are linearly independent are kept as a basis.
/// Every other gate's form is a sum of basis forms, so its targets are
/// folded into the target sets of those basis gates. The output computes the
/// same function on every input.
pub fn pctof_minimize(gates: &[PctofGate], b: u32) -> Vec<PctofGate> {
    let forms: Vec<Vec<u64>> = gates.iter().map(|g| g.form(b)).collect();
    // Reduced basis rows with their pivot and the combination of basis gates
    // (indices into `kept`) they equal.
    let mut reduced: Vec<(Vec<u64>, usize, Vec<u64>)> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut expansions: Vec<Vec<u64>> = Vec::with_capacity(gates.len());
    let words = |n: usize| n.div_ceil(64).max(1);
    let max_rank = (b * b) as usize;
    for (gi, form) in forms.iter().enumerate() {
        let mut r = form.clone();
        let mut combo = vec![0u64; words(max_rank)];
        for (row, p, c) in &reduced {
            if (r[p / 64] >> (p % 64)) & 1 == 1 {
                xor_into(&mut r, row);
                xor_into(&mut combo, c);
            }
        }
        match lowest_bit(&r) {
            Some(p) => {
                let idx = kept.len();
                kept.push(gi);
                // r = form + combo, so form = r + combo; the new row stands for
                // basis gate idx plus the already-reduced combination.
                combo[idx / 64] ^= 1 << (idx % 64);
                reduced.push((r, p, combo.clone()));
                let mut own = vec![0u64; words(max_rank)];
                own[idx / 64] ^= 1 << (idx % 64);
                expansions.push(own);
            }
            None => expansions.push(combo),
        }
    }
    let mut out: Vec<PctofGate> = kept
        .iter()
        .map(|&gi| PctofGate { target_set: 0, ..gates[gi] })
        .collect();
    for (gi, combo) in expansions.iter().enumerate() {
        for (idx, g) in out.iter_mut().enumerate() {
            if (combo[idx / 64] >> (idx % 64)) & 1 == 1 {
                g.target_set ^= gates[gi].target_set;
            }
        }
    }
    out
}

/// F2 rank of the gate forms, computed independently of the minimizer.
pub fn pctof_rank(gates: &[PctofGate], b: u32) -> usize {
    f2_rank(&gates.iter().map(|g| g.form(b)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf8() -> FieldSpec {
        FieldSpec::new(3, 0b1011).unwrap()
    }

    #[test]
    fn addition_is_xor() {
        assert_eq!(felt_add(Felt(0b101), Felt(0b011)), Felt(0b110));
        for a in gf8().elements() {
            assert_eq!(a + a, Felt::ZERO);
            assert_eq!(a + Felt::ZERO, a);
        }
    }

    #[test]
    fn gf8_products_match_log_table_oracle() {
        let f = gf8();
        assert_eq!(f.mul(Felt(0b010), Felt(0b010)), Felt(0b100));
        // Oracle: powers of the generator x with x^3 = x + 1.
        let mut antilog = vec![1u16];
        for _ in 0..6 {
            let last = *antilog.last().unwrap();
            let mut next = last << 1;
            if next & 0b1000 != 0 {
                next ^= 0b1011;
            }
            antilog.push(next);
        }
        let log = |v: u16| antilog.iter().position(|&x| x == v).unwrap();
        for a in 1..8u16 {
            for b in 1..8u16 {
                let want = antilog[(log(a) + log(b)) % 7];
                assert_eq!(f.mul(Felt(a), Felt(b)), Felt(want));
            }
        }
        assert_eq!(f.mul(Felt(0b110), Felt(0b101)), Felt(0b011));
        for a in f.elements() {
            assert_eq!(f.mul(a, Felt::ONE), a);
        }
    }

    #[test]
    fn mul_const_matches_mul_and_is_charged_as_qc() {
        let f = gf8();
        let mut ledger = CostLedger::new();
        assert_eq!(f.mul_const(Felt(0b110), Felt(0b101), &mut ledger), Felt(0b011));
        assert_eq!((ledger.qq_mult, ledger.qc_mult), (0, 1));
        for a in f.elements() {
            for c in f.elements() {
                assert_eq!(f.mul_const(a, c, &mut ledger), f.mul(a, c));
            }
        }
    }

    #[test]
    fn inverse_values_and_errors() {
        let f = gf8();
        assert_eq!(f.inv(Felt::ONE).unwrap(), Felt::ONE);
        let want = f.elements().find(|&y| f.mul(Felt(0b010), y) == Felt::ONE).unwrap();
        assert_eq!(want, Felt(0b101));
        assert_eq!(f.inv(Felt(0b010)).unwrap(), want);
        assert_eq!(f.inv(Felt::ZERO), Err(Error::InverseOfZero));
    }

    #[test]
    fn inverse_law_all_degrees_up_to_12() {
        for b in 1..=12 {
            let f = FieldSpec::default_for(b).unwrap();
            for a in f.elements().skip(1) {
                let (v, mults) = f.inv_chain(a).unwrap();
                assert_eq!(f.mul(a, v), Felt::ONE, "b={b} a={a}");
                assert_eq!(mults, f.cost_inv_mults());
            }
        }
    }

    #[test]
    fn inversion_is_charged_separately_from_direct_products() {
        let f = FieldSpec::default_for(10).unwrap();
        let mut ledger = CostLedger::new();
        f.inv_counted(Felt(7), &mut ledger).unwrap();
        assert_eq!(ledger.gf_inverse, 1);
        assert_eq!(ledger.qq_mult, 0);
        assert_eq!(ledger.inv_qq_mult, 4);
    }

    #[test]
    fn default_polynomials_are_smallest_irreducibles() {
        assert_eq!(default_irreducible(3).unwrap(), 0xb);
        assert_eq!(default_irreducible(8).unwrap(), 0x11b);
        assert_eq!(default_irreducible(10).unwrap(), 0x409);
        assert_eq!(default_irreducible(11).unwrap(), 0x805);
        assert_eq!(default_irreducible(12).unwrap(), 0x1009);
    }

    #[test]
    fn construction_rejects_bad_moduli() {
        assert!(matches!(FieldSpec::new(3, 0b1001), Err(Error::InvalidField(_))));
        assert!(matches!(FieldSpec::new(3, 0b111), Err(Error::InvalidField(_))));
        assert!(matches!(FieldSpec::new(0, 0b1), Err(Error::InvalidField(_))));
        assert!(matches!(FieldSpec::new(17, 0b1), Err(Error::InvalidField(_))));
    }

    #[test]
    fn shipped_cost_rows() {
        let row = |b| {
            let c = FieldSpec::default_for(b).unwrap().costs().unwrap();
            (c.toffoli, c.cnot, c.pctof)
        };
        assert_eq!(row(10), (39, 738, 39));
        assert_eq!(row(11), (47, 1278, 46));
        assert_eq!(row(12), (51, 1506, 51));
        assert!(FieldSpec::default_for(9).unwrap().costs().is_none());
    }

    #[test]
    fn config_loading() {
        let cfg = FieldConfig { b: 3, irreducible_hex: Some("0xd".into()), costs: None };
        let f = FieldSpec::from_config(&cfg).unwrap();
        assert_eq!(f.irreducible(), 0xd);
        let cfg = FieldConfig {
            b: 4,
            irreducible_hex: None,
            costs: Some(GateCosts { toffoli: 9, cnot: 30, pctof: 9 }),
        };
        let f = FieldSpec::from_config(&cfg).unwrap();
        assert_eq!(f.irreducible(), 0x13);
        assert_eq!(f.costs().unwrap().toffoli, 9);
    }

    #[test]
    fn pctof_duplicate_and_empty() {
        let g = PctofGate { control_set_x: 0b11, control_set_y: 0b01, target_set: 0b10 };
        let out = pctof_minimize(&[g, g], 2);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].control_set_x, g.control_set_x);
        assert_eq!(out[0].target_set, 0);
        assert!(pctof_minimize(&[], 4).is_empty());
    }
}
