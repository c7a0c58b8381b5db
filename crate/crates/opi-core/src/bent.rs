//! Maiorana-McFarland target sets and their affine-subspace overlaps.
//!
//! Vectors of F_2^{2k} are bitmasks: bit i - 1 holds x_i, so the first half
//! x_1..x_k sits in the low k bits and the second half in the next k bits.
//! S_k is the set where the halves have odd inner product.
//!
//! Affine subspaces are enumerated without repetition: each linear part is
//! a canonical reduced row echelon basis, and each coset is named by its
//! unique representative with zeros at every pivot column.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::OverlapTable;
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Largest ambient dimension 2k handled by exhaustive enumeration.
pub const EXHAUSTIVE_MAX_DIM: u32 = 8;

/// x in S_k: the inner product of the two halves of x is 1.
pub fn s_k_member(k: u32, x: u32) -> Result<bool> {
    if k == 0 || k > 15 {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..=15")));
    }
    if x >> (2 * k) != 0 {
        return Err(Error::InvalidInput(format!("vector {x:#x} longer than 2k = {}", 2 * k)));
    }
    Ok(in_s_k(k, x))
}

fn in_s_k(k: u32, x: u32) -> bool {
    let low = x & ((1 << k) - 1);
    let high = x >> k;
    (low & high).count_ones() % 2 == 1
}

/// |S_k| by enumeration of F_2^{2k}.
pub fn s_k_size(k: u32) -> Result<u64> {
    if k == 0 || k > 12 {
        return Err(Error::Capability(format!("enumerating S_k needs 1 <= k <= 12, got {k}")));
    }
    Ok((0..1u32 << (2 * k)).filter(|&x| in_s_k(k, x)).count() as u64)
}

/// The upper bound on |A ∩ S_k| over affine subspaces A of dimension d.
pub fn intersection_bound(k: u32, d: u32) -> Result<u64> {
    if k == 0 || d > 2 * k {
        return Err(Error::InvalidInput(format!("need k >= 1 and d <= 2k, got k = {k}, d = {d}")));
    }
    Ok(if d < k {
        1 << d
    } else if d < 2 * k - 1 {
        // Here k >= 2 because the range k <= d < 2k - 1 is empty for k = 1.
        (1 << (d - 1)) + (1 << (k - 2))
    } else if d == 2 * k - 1 {
        1 << (2 * k - 2)
    } else {
        (1 << (2 * k - 1)) - (1 << (k - 1))
    })
}

/// An affine subspace offset + span(basis) of F_2^dim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineSubspace {
    pub dim: u32,
    pub basis: Vec<u32>,
    pub offset: u32,
}

impl AffineSubspace {
    /// Checks that the basis vectors fit and are linearly independent.
    pub fn new(dim: u32, basis: Vec<u32>, offset: u32) -> Result<Self> {
        if basis.iter().chain(std::iter::once(&offset)).any(|&v| dim < 32 && v >> dim != 0) {
            return Err(Error::InvalidInput(format!("vector longer than dimension {dim}")));
        }
        if rank(&basis) != basis.len() {
            return Err(Error::InvalidInput("basis is linearly dependent".into()));
        }
        Ok(Self { dim, basis, offset })
    }

    /// Every point of the subspace.
    pub fn points(&self) -> Vec<u32> {
        let span = span_points(&self.basis);
        span.into_iter().map(|v| v ^ self.offset).collect()
    }
}

/// Rank over F_2 of a list of row bitmasks.
pub fn rank(rows: &[u32]) -> usize {
    let mut pivots: Vec<u32> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &p in &pivots {
            v = v.min(v ^ p);
        }
        if v != 0 {
            pivots.push(v);
            pivots.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    pivots.len()
}

fn span_points(basis: &[u32]) -> Vec<u32> {
    let mut pts = vec![0u32];
    for &v in basis {
        let extra: Vec<u32> = pts.iter().map(|p| p ^ v).collect();
        pts.extend(extra);
    }
    pts
}

/// Number of d-dimensional linear subspaces of F_2^n (Gaussian binomial).
pub fn gaussian_binomial(n: u32, d: u32) -> u128 {
    if d > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    num / den
}

/// Reduced row echelon bases with the given pivot columns: row i has its
/// leading one at pivots[i], zeros at the other pivots and at columns below
/// its own pivot, and free bits elsewhere above it.
fn rref_bases(dim: u32, pivots: &[u32]) -> Vec<Vec<u32>> {
    let pivot_mask: u32 = pivots.iter().map(|&p| 1u32 << p).sum();
    let free: Vec<Vec<u32>> = pivots
        .iter()
        .map(|&p| (p + 1..dim).filter(|&c| pivot_mask >> c & 1 == 0).collect())
        .collect();
    let total: u32 = free.iter().map(|f| f.len() as u32).sum();
    let mut out = Vec::with_capacity(1 << total);
    for bits in 0u64..1u64 << total {
        let mut shift = 0;
        let rows = pivots
            .iter()
            .zip(&free)
            .map(|(&p, cols)| {
                let mut row = 1u32 << p;
                for (j, &c) in cols.iter().enumerate() {
                    if bits >> (shift + j) & 1 == 1 {
                        row |= 1 << c;
                    }
                }
                shift += cols.len();
                row
            })
            .collect();
        out.push(rows);
    }
    out
}

fn pivot_sets(dim: u32, d: u32) -> Vec<Vec<u32>> {
    (0u32..1 << dim)
        .filter(|s| s.count_ones() == d)
        .map(|s| (0..dim).filter(|&c| s >> c & 1 == 1).collect())
        .collect()
}

/// Largest coset intersection for every linear subspace with these pivots,
/// together with the number of affine subspaces visited.
fn best_for_pivots(dim: u32, pivots: &[u32], members: &[u32]) -> (u64, u64) {
    let d = pivots.len() as u32;
    let mut best = 0u64;
    let mut visited = 0u64;
    let mut hist = vec![0u32; 1 << dim];
    for basis in rref_bases(dim, pivots) {
        for &x in members {
            let mut v = x;
            for (row, &p) in basis.iter().zip(pivots) {
                if v >> p & 1 == 1 {
                    v ^= row;
                }
            }
            hist[v as usize] += 1;
        }
        for h in hist.iter_mut() {
            best = best.max(*h as u64);
            *h = 0;
        }
        visited += 1 << (dim - d);
    }
    (best, visited)
}

/// Exact maximum of |A ∩ target| over d-dimensional affine subspaces A of
/// F_2^dim, and the number of subspaces enumerated.
pub fn max_affine_intersection_set(dim: u32, d: u32, target: &[u32]) -> Result<(u64, u64)> {
    if dim > EXHAUSTIVE_MAX_DIM {
        return Err(Error::Capability(format!(
            "exhaustive enumeration stops at dimension {EXHAUSTIVE_MAX_DIM}, got {dim}"
        )));
    }
    if d > dim {
        return Err(Error::InvalidInput(format!("subspace dimension {d} exceeds {dim}")));
    }
    Ok(pivot_sets(dim, d)
        .par_iter()
        .map(|piv| best_for_pivots(dim, piv, target))
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1)))
}

/// Exact maximum of |A ∩ S_k| over d-dimensional affine subspaces.
pub fn max_affine_intersection(k: u32, d: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let members: Vec<u32> = (0..1u32 << (2 * k)).filter(|&x| in_s_k(k, x)).collect();
    Ok(max_affine_intersection_set(2 * k, d, &members)?.0)
}

/// Square matrix over F_2 stored as row bitmasks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitMatrix {
    pub rows: Vec<u32>,
}

impl BitMatrix {
    pub fn identity(dim: u32) -> Self {
        Self { rows: (0..dim).map(|i| 1 << i).collect() }
    }

    pub fn dim(&self) -> u32 {
        self.rows.len() as u32
    }

    /// Matrix-vector product: bit i of the result is the parity of row i and x.
    pub fn apply(&self, x: u32) -> u32 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | (((r & x).count_ones() & 1) << i))
    }

    pub fn is_invertible(&self) -> bool {
        rank(&self.rows) == self.rows.len()
    }
}

/// Uniform invertible matrix: each row is drawn uniformly outside the span
/// of the earlier rows.
pub fn gl_random<R: Rng + ?Sized>(dim: u32, rng: &mut R) -> Result<BitMatrix> {
    if dim == 0 || dim > 31 {
        return Err(Error::InvalidInput(format!("matrix dimension {dim} outside 1..=31")));
    }
    let mut rows: Vec<u32> = Vec::with_capacity(dim as usize);
    while rows.len() < dim as usize {
        let candidate = rng.gen_range(1u32..1 << dim);
        rows.push(candidate);
        if rank(&rows) != rows.len() {
            rows.pop();
        }
    }
    Ok(BitMatrix { rows })
}

/// The set {x : A x + offset ∈ S_k}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSet {
    pub k: u32,
    pub transform: BitMatrix,
    pub offset: u32,
}

impl TargetSet {
    pub fn new(k: u32, transform: BitMatrix, offset: u32) -> Result<Self> {
        if transform.dim() != 2 * k || !transform.is_invertible() {
            return Err(Error::InvalidInput("transform must be an invertible 2k x 2k matrix".into()));
        }
        if offset >> (2 * k) != 0 {
            return Err(Error::InvalidInput("offset longer than 2k".into()));
        }
        Ok(Self { k, transform, offset })
    }

    /// S_k itself.
    pub fn untwisted(k: u32) -> Self {
        Self { k, transform: BitMatrix::identity(2 * k), offset: 0 }
    }

    pub fn contains(&self, x: u32) -> bool {
        in_s_k(self.k, self.transform.apply(x) ^ self.offset)
    }

    pub fn members(&self) -> Vec<u32> {
        (0..1u32 << (2 * self.k)).filter(|&x| self.contains(x)).collect()
    }
}

/// P[s] = max over codimension-s affine subspaces A of |A ∩ F| / |A|.
pub fn overlap_table_bruteforce(target: &TargetSet) -> Result<OverlapTable> {
    overlap_table_of_set(2 * target.k, &target.members())
}

/// Overlap table of an arbitrary subset of F_2^dim.
pub fn overlap_table_of_set(dim: u32, members: &[u32]) -> Result<OverlapTable> {
    let p = (0..=dim)
        .map(|s| {
            let d = dim - s;
            let (best, _) = max_affine_intersection_set(dim, d, members)?;
            Ok(best as f64 / (1u64 << d) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    OverlapTable::new(p)
}

/// A twisted bent target instance: one target set per evaluation point
/// alpha = 1..=m of GF(2^{2k})^*, and the code dimension n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TbtInstance {
    pub k: u32,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub targets: Vec<TargetSet>,
}

impl TbtInstance {
    /// |F_alpha|, identical for every point.
    pub fn r(&self) -> u64 {
        (1u64 << (2 * self.k - 1)) - (1u64 << (self.k - 1))
    }
}

/// Draws an independent uniform invertible transform per evaluation point.
pub fn tbt_opi_generate(k: u32, m: usize, n: usize, seed: u64) -> Result<TbtInstance> {
    if k == 0 || k > 15 {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..=15")));
    }
    if m != (1usize << (2 * k)) - 1 {
        return Err(Error::InvalidInput(format!("m must be 2^(2k) - 1 = {}, got {m}", (1usize << (2 * k)) - 1)));
    }
    if n == 0 || n > m {
        return Err(Error::InvalidInput(format!("need 0 < n <= m, got n = {n}")));
    }
    let mut rng = seeded(seed);
    let targets = (0..m)
        .map(|_| Ok(TargetSet { k, transform: gl_random(2 * k, &mut rng)?, offset: 0 }))
        .collect::<Result<Vec<_>>>()?;
    Ok(TbtInstance { k, m, n, seed, targets })
}

/// One line of the achieved-versus-bound comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: u32,
    pub d: u32,
    pub achieved: u64,
    pub bound: u64,
    pub subspaces: u64,
}

impl BoundRow {
    pub fn holds(&self) -> bool {
        self.achieved <= self.bound
    }
}

/// Exhaustive maxima for every dimension d <= max_dim, against the bound.
pub fn verify_bounds(k: u32, max_dim: Option<u32>) -> Result<Vec<BoundRow>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let members: Vec<u32> = (0..1u32 << (2 * k)).filter(|&x| in_s_k(k, x)).collect();
    let top = max_dim.unwrap_or(2 * k).min(2 * k);
    (0..=top)
        .map(|d| {
            let (achieved, subspaces) = max_affine_intersection_set(2 * k, d, &members)?;
            Ok(BoundRow { k, d, achieved, bound: intersection_bound(k, d)?, subspaces })
        })
        .collect()
}
