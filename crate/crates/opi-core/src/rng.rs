//! Deterministic random sources shared by generators, tests and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::gf::{Felt, FieldSpec};
use crate::poly::Poly;

/// Default seed when neither a flag nor `OPI_SEED` provides one.
pub const DEFAULT_SEED: u64 = 0x5eed_0f0e_1dc0_de01;

/// The generator used everywhere a seed is accepted.
pub type WorkbenchRng = ChaCha20Rng;

/// A generator fully determined by `seed`.
pub fn seeded(seed: u64) -> WorkbenchRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform field element.
pub fn random_felt<R: Rng + ?Sized>(field: &FieldSpec, rng: &mut R) -> Felt {
    Felt(rng.gen_range(0..field.order()) as u16)
}

/// Uniform nonzero field element.
pub fn random_nonzero<R: Rng + ?Sized>(field: &FieldSpec, rng: &mut R) -> Felt {
    Felt(rng.gen_range(1..field.order()) as u16)
}

/// Uniform polynomial of degree exactly `deg` (nonzero leading coefficient).
pub fn random_poly_exact<R: Rng + ?Sized>(field: &FieldSpec, deg: usize, rng: &mut R) -> Poly {
    let mut coeffs: Vec<Felt> = (0..deg).map(|_| random_felt(field, rng)).collect();
    coeffs.push(random_nonzero(field, rng));
    Poly::from_coeffs(coeffs)
}

/// Uniform polynomial with at most `len` coefficients.
pub fn random_poly_below<R: Rng + ?Sized>(field: &FieldSpec, len: usize, rng: &mut R) -> Poly {
    Poly::from_coeffs((0..len).map(|_| random_felt(field, rng)).collect())
}
