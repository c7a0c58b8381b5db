//! Dense polynomials over GF(2^b) and the textbook extended Euclidean
//! algorithm that serves as the reference for both register-level EEA
//! machines.
//!
//! Coefficient `i` multiplies z^i. Values are kept canonical: high zero
//! coefficients are trimmed and the zero polynomial has degree -1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, FieldSpec};
use crate::ledger::CostLedger;

/// A polynomial with coefficients in some GF(2^b). The field is passed to
/// the operations that need multiplication.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Felt>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::constant(Felt::ONE)
    }

    /// A constant polynomial.
    pub fn constant(c: Felt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// c z^k.
    pub fn monomial(c: Felt, k: usize) -> Self {
        let mut coeffs = vec![Felt::ZERO; k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// Builds a canonical polynomial from low-to-high coefficients.
    pub fn from_coeffs(mut coeffs: Vec<Felt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds a polynomial from raw coefficient bits.
    pub fn from_bits(bits: &[u16]) -> Self {
        Self::from_coeffs(bits.iter().map(|&b| Felt(b)).collect())
    }

    /// Coefficients from z^0 up to the leading term.
    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Number of stored coefficients (degree + 1). Emptiness is `is_zero`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Whether this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of z^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Felt {
        self.coeffs.get(i).copied().unwrap_or(Felt::ZERO)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lead(&self) -> Felt {
        self.coeffs.last().copied().unwrap_or(Felt::ZERO)
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.len().max(other.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    /// Product by convolution.
    pub fn mul(&self, other: &Poly, field: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Felt::ZERO; self.len() + other.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + field.mul(a, b);
            }
        }
        Poly::from_coeffs(out)
    }

    /// Product charged as one QQ multiplication per coefficient pair.
    pub fn mul_counted(&self, other: &Poly, field: &FieldSpec, ledger: &mut CostLedger) -> Poly {
        ledger.record_qq((self.len() * other.len()) as u64);
        self.mul(other, field)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: Felt, field: &FieldSpec) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    /// Multiplies by z^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Felt::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Remainder modulo z^k.
    pub fn truncate(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().take(k).copied().collect())
    }

    /// Reversal with respect to a formal degree: z^d p(1/z). Requires deg p <= d.
    pub fn reverse(&self, formal_deg: usize) -> Poly {
        assert!(self.deg() <= formal_deg as isize, "reverse: degree exceeds formal degree");
        Poly::from_coeffs((0..=formal_deg).map(|i| self.coeff(formal_deg - i)).collect())
    }

    /// Quotient and remainder with a = b q + r and deg r < deg b.
    pub fn divmod(&self, divisor: &Poly, field: &FieldSpec) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        if self.deg() < divisor.deg() {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv_lead = field.inv(divisor.lead())?;
        let db = divisor.len() - 1;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Felt::ZERO; self.len() - db];
        for k in (0..quot.len()).rev() {
            let t = field.mul(rem[k + db], inv_lead);
            quot[k] = t;
            if t.is_zero() {
                continue;
            }
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j] + field.mul(t, c);
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Remainder of the division by `modulus`.
    pub fn rem(&self, modulus: &Poly, field: &FieldSpec) -> Result<Poly> {
        self.divmod(modulus, field).map(|(_, r)| r)
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: Felt, field: &FieldSpec) -> Felt {
        self.coeffs.iter().rev().fold(Felt::ZERO, |acc, &c| field.mul(acc, x) + c)
    }

    /// Horner evaluation at a classically known point, charging one QC
    /// multiplication per step (deg p of them).
    pub fn eval_const(&self, x: Felt, field: &FieldSpec, ledger: &mut CostLedger) -> Felt {
        if self.deg() > 0 {
            ledger.record_qc(self.deg() as u64);
        }
        self.eval(x, field)
    }

    /// Formal derivative in characteristic 2: only odd-degree terms survive,
    /// each dropping one degree with coefficient unchanged.
    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            (1..self.len())
                .map(|i| if i % 2 == 1 { self.coeffs[i] } else { Felt::ZERO })
                .collect(),
        )
    }

    /// Renders the `c0,c1,...` hex form used by the CLI.
    pub fn to_hex_string(&self) -> String {
        self.coeffs.iter().map(|c| format!("{:x}", c.0)).collect::<Vec<_>>().join(",")
    }

    /// Parses the `c0,c1,...` hex form, checking each coefficient against the field.
    pub fn parse_hex(text: &str, field: &FieldSpec) -> Result<Poly> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Poly::zero());
        }
        let coeffs = text
            .split(',')
            .map(|tok| {
                let tok = tok.trim().trim_start_matches("0x");
                let v = u32::from_str_radix(tok, 16)
                    .map_err(|e| Error::InvalidInput(format!("bad coefficient {tok:?}: {e}")))?;
                field.felt(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_hex_string())
    }
}

/// One row (r, u, v) of the extended Euclidean table, with A u + B v = r.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EeaTriple {
    pub r: Poly,
    pub u: Poly,
    pub v: Poly,
}

/// The full remainder/cofactor table starting from (A, 1, 0) and (B, 0, 1)
/// and ending at the last nonzero remainder. No monic normalization is
/// applied, so the final remainder is the gcd only up to a unit.
pub fn classical_eea(a: &Poly, b: &Poly, field: &FieldSpec) -> Result<Vec<EeaTriple>> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidInput("classical_eea needs a nonzero input".into()));
    }
    let mut rows = vec![
        EeaTriple { r: a.clone(), u: Poly::one(), v: Poly::zero() },
        EeaTriple { r: b.clone(), u: Poly::zero(), v: Poly::one() },
    ];
    if b.is_zero() {
        rows.pop();
        return Ok(rows);
    }
    loop {
        let prev = &rows[rows.len() - 2];
        let cur = &rows[rows.len() - 1];
        let (q, r) = prev.r.divmod(&cur.r, field)?;
        if r.is_zero() {
            return Ok(rows);
        }
        let u = prev.u.add(&q.mul(&cur.u, field));
        let v = prev.v.add(&q.mul(&cur.v, field));
        rows.push(EeaTriple { r, u, v });
    }
}

/// The last row of a classical EEA table: the gcd (up to a unit) with its cofactors.
pub fn eea_gcd_row(a: &Poly, b: &Poly, field: &FieldSpec) -> Result<EeaTriple> {
    let mut rows = classical_eea(a, b, field)?;
    Ok(rows.pop().expect("table is never empty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> FieldSpec {
        FieldSpec::new(1, 0b11).unwrap()
    }

    #[test]
    fn canonical_form_and_degree() {
        assert_eq!(Poly::zero().deg(), -1);
        assert_eq!(Poly::from_bits(&[1, 0, 0]).deg(), 0);
        assert_eq!(Poly::from_bits(&[0, 0]), Poly::zero());
    }

    #[test]
    fn addition_examples() {
        let p = Poly::from_bits(&[3, 1, 2]);
        assert!(p.add(&p).is_zero());
        assert_eq!(p.add(&Poly::zero()), p);
    }

    #[test]
    fn multiplication_examples() {
        let f = FieldSpec::default_for(4).unwrap();
        let p = Poly::from_bits(&[3, 1, 2]);
        assert_eq!(p.mul(&Poly::one(), &f), p);
        let z = Poly::monomial(Felt::ONE, 1);
        assert_eq!(z.mul(&z, &f), Poly::monomial(Felt::ONE, 2));
    }

    #[test]
    fn divmod_examples() {
        let f = gf2();
        let a = Poly::from_bits(&[1, 0, 0, 1]);
        let b = Poly::from_bits(&[1, 1]);
        let (q, r) = a.divmod(&b, &f).unwrap();
        assert_eq!(q, Poly::from_bits(&[1, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(q.mul(&b, &f).add(&r), a);
        let (q, r) = a.divmod(&Poly::one(), &f).unwrap();
        assert_eq!((q, r), (a.clone(), Poly::zero()));
        let (q, r) = b.divmod(&a, &f).unwrap();
        assert_eq!((q, r), (Poly::zero(), b.clone()));
        assert_eq!(a.divmod(&Poly::zero(), &f), Err(Error::DivisionByZeroPolynomial));
    }

    #[test]
    fn evaluation_examples() {
        let f = FieldSpec::default_for(4).unwrap();
        assert_eq!(Poly::constant(Felt(7)).eval(Felt(9), &f), Felt(7));
        let p = Poly::from_bits(&[5, 3, 9]);
        assert_eq!(p.eval(Felt::ZERO, &f), Felt(5));
        let mut ledger = CostLedger::new();
        p.eval_const(Felt(2), &f, &mut ledger);
        assert_eq!(ledger.qc_mult, 2);
    }

    #[test]
    fn derivative_examples() {
        let z2 = Poly::from_bits(&[0, 0, 1]);
        assert!(z2.derivative().is_zero());
        let p = Poly::from_bits(&[0, 1, 0, 1]);
        assert_eq!(p.derivative(), Poly::from_bits(&[1, 0, 1]));
    }

    #[test]
    fn reverse_and_truncate() {
        let p = Poly::from_bits(&[1, 2, 3]);
        assert_eq!(p.reverse(4), Poly::from_bits(&[0, 0, 3, 2, 1]));
        assert_eq!(p.truncate(2), Poly::from_bits(&[1, 2]));
    }

    #[test]
    fn hex_round_trip() {
        let f = FieldSpec::default_for(8).unwrap();
        let p = Poly::from_bits(&[0x1b, 0, 0xff]);
        assert_eq!(p.to_hex_string(), "1b,0,ff");
        assert_eq!(Poly::parse_hex("1b,0,ff", &f).unwrap(), p);
        assert!(Poly::parse_hex("100", &f).is_err());
    }

    #[test]
    fn eea_equal_inputs() {
        let f = FieldSpec::default_for(4).unwrap();
        let a = Poly::from_bits(&[3, 1, 2]);
        let row = eea_gcd_row(&a, &a, &f).unwrap();
        assert_eq!(row.r, a);
        assert!(classical_eea(&Poly::zero(), &Poly::zero(), &f).is_err());
    }
}
