//! Ranking and unranking of k-combinations.
//!
//! A combination is a strictly decreasing list c_k > ... > c_1 >= 0 of
//! elements below m. The combinatorial number system ranks it as
//! r = sum_j C(c_j, j), which orders combinations colexicographically.
//!
//! Two unranking algorithms are provided:
//!
//! - **greedy**: pick the largest c_k with C(c_k, k) <= r by a bitwise
//!   binary search, subtract, and continue with k - 1. This inverts the
//!   colex rank exactly.
//! - **divide and conquer**: split the ground set into a lower half of
//!   floor(m/2) elements and an upper half, choose how many elements k_1 come
//!   from the lower half by locating r among the prefix sums of the
//!   hypergeometric counts H(i) = C(m_1, i) C(m_2, k - i), and recurse on
//!   both halves with residual ranks. The prefix sums are evaluated by binary
//!   splitting over the term ratio of H. This defines its own bijection
//!   between ranks and combinations, inverted by [`comb_rank_dc`]. It is not
//!   the colex order: groups with different k_1 interleave in colex order.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly decreasing list of distinct elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Combination(pub Vec<usize>);

impl Combination {
    /// Validates strict decrease and the ground-set bound.
    pub fn new(elements: Vec<usize>, m: usize) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput("combination must be strictly decreasing".into()));
        }
        if elements.first().is_some_and(|&c| c >= m) {
            return Err(Error::InvalidInput(format!("element out of range for m = {m}")));
        }
        Ok(Self(elements))
    }

    /// Number of elements k.
    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Colex comparison: compares largest elements first.
    pub fn colex_cmp(&self, other: &Combination) -> std::cmp::Ordering {
        self.0.cmp(&other.0)
    }
}

/// C(n, k) by the multiplicative formula.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Pascal table of C(n, j) for n <= max_n and j <= max_k.
#[derive(Debug, Clone)]
pub struct Binomials {
    max_n: usize,
    max_k: usize,
    rows: Vec<Vec<BigUint>>,
}

impl Binomials {
    /// Builds rows 0..=max_n, truncated at column max_k.
    pub fn new(max_n: usize, max_k: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let width = max_k.min(n) + 1;
            let mut row = Vec::with_capacity(width);
            row.push(BigUint::one());
            for j in 1..width {
                let prev = &rows[n - 1];
                let left = &prev[j - 1];
                let v = match prev.get(j) {
                    Some(right) => left + right,
                    None => left.clone(),
                };
                row.push(v);
            }
            rows.push(row);
        }
        Self { max_n, max_k, rows }
    }

    /// C(n, k), from the table when it covers (n, k).
    pub fn get(&self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        if n <= self.max_n && k <= self.max_k {
            return self.rows[n][k].clone();
        }
        binomial(n, k)
    }

    /// C(n, k) borrowed from the table; panics outside the table.
    fn at(&self, n: usize, k: usize) -> &BigUint {
        self.get_ref(n, k).expect("binomial inside the table")
    }

    fn get_ref(&self, n: usize, k: usize) -> Option<&BigUint> {
        if k <= n && n <= self.max_n && k <= self.max_k {
            Some(&self.rows[n][k])
        } else {
            None
        }
    }

    fn le(&self, n: usize, k: usize, r: &BigUint) -> bool {
        match self.get_ref(n, k) {
            Some(v) => v <= r,
            None => &self.get(n, k) <= r,
        }
    }
}

/// r = sum_j C(c_j, j) with c_1 the smallest element.
pub fn comb_rank(c: &Combination) -> BigUint {
    let k = c.k();
    c.0.iter().enumerate().map(|(idx, &cj)| binomial(cj, k - idx)).sum()
}

fn check_rank(m: usize, k: usize, r: &BigUint, table: &Binomials) -> Result<()> {
    if k > m {
        return Err(Error::InvalidInput(format!("k = {k} exceeds m = {m}")));
    }
    if r >= &table.get(m, k) {
        return Err(Error::InvalidInput(format!("rank {r} out of range for C({m}, {k})")));
    }
    Ok(())
}

/// Prefix sums PS(0..=k+1) keyed by the split (m1, m2, k).
type PrefixCache = HashMap<(usize, usize, usize), Rc<Vec<BigUint>>>;

/// Unranking machinery for one ground-set size, sharing a Pascal table and
/// the prefix sums of every split met so far.
#[derive(Debug, Clone)]
pub struct Unranker {
    m: usize,
    k: usize,
    table: Binomials,
    prefix_sums: RefCell<PrefixCache>,
}

impl Unranker {
    pub fn new(m: usize, k: usize) -> Self {
        Self { m, k, table: Binomials::new(m, k), prefix_sums: RefCell::new(HashMap::new()) }
    }

    /// PS(0..=k+1) for a split, each entry evaluated by binary splitting.
    fn prefix_sums(&self, m1: usize, m2: usize, k: usize) -> Rc<Vec<BigUint>> {
        let key = (m1, m2, k);
        if let Some(v) = self.prefix_sums.borrow().get(&key) {
            return Rc::clone(v);
        }
        let v: Rc<Vec<BigUint>> =
            Rc::new((0..=k + 1).map(|x| hypergeometric_prefix_sum_with(m1, m2, k, x, &self.table)).collect());
        self.prefix_sums.borrow_mut().insert(key, Rc::clone(&v));
        v
    }

    /// C(m, k).
    pub fn count(&self) -> BigUint {
        self.table.get(self.m, self.k)
    }

    /// Colex rank using the shared table.
    pub fn rank(&self, c: &Combination) -> BigUint {
        let k = c.k();
        let mut acc = BigUint::zero();
        for (idx, &cj) in c.0.iter().enumerate() {
            if cj >= k - idx {
                acc += self.table.at(cj, k - idx);
            }
        }
        acc
    }

    /// Greedy unranking with a bitwise binary search per element.
    pub fn unrank_greedy(&self, r: &BigUint) -> Result<Combination> {
        check_rank(self.m, self.k, r, &self.table)?;
        let mut r = r.clone();
        let mut out = Vec::with_capacity(self.k);
        let mut bound = self.m;
        for j in (1..=self.k).rev() {
            // Largest c < bound with C(c, j) <= r; C(j - 1, j) = 0 always qualifies.
            let mut c = 0usize;
            let mut bit = bound.next_power_of_two();
            while bit > 0 {
                let cand = c | bit;
                if cand < bound && self.table.le(cand, j, &r) {
                    c = cand;
                }
                bit >>= 1;
            }
            if c >= j {
                r -= self.table.at(c, j);
            }
            out.push(c);
            bound = c;
        }
        Ok(Combination(out))
    }

    /// Divide-and-conquer unranking over halves of the ground set.
    pub fn unrank_dc(&self, r: &BigUint) -> Result<Combination> {
        check_rank(self.m, self.k, r, &self.table)?;
        let mut out = Vec::with_capacity(self.k);
        self.dc(self.m, self.k, r.clone(), 0, &mut out);
        out.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Combination(out))
    }

    fn dc(&self, m: usize, k: usize, r: BigUint, offset: usize, out: &mut Vec<usize>) {
        if k == 0 {
            return;
        }
        if k == m {
            out.extend(offset..offset + m);
            return;
        }
        if m <= 2 {
            // Only m = 2, k = 1 remains: the rank is the element.
            out.push(offset + r.to_usize().expect("rank below 2"));
            return;
        }
        let (m1, m2) = (m / 2, m - m / 2);
        let (k1, ps) = self.split(m1, m2, k, &r);
        let (r2, r1) = (r - ps).div_rem(self.table.at(m1, k1));
        self.dc(m1, k1, r1, offset, out);
        self.dc(m2, k - k1, r2, offset + m1, out);
    }

    /// The k_1 with PS(k_1) <= r < PS(k_1 + 1), found bit by bit, and PS(k_1).
    fn split(&self, m1: usize, m2: usize, k: usize, r: &BigUint) -> (usize, BigUint) {
        let ps = self.prefix_sums(m1, m2, k);
        let lo = k.saturating_sub(m2);
        let hi = k.min(m1);
        let mut k1 = lo;
        let mut bit = (hi - lo + 1).next_power_of_two();
        while bit > 0 {
            let cand = k1 + bit;
            if cand <= hi && &ps[cand] <= r {
                k1 = cand;
            }
            bit >>= 1;
        }
        (k1, ps[k1].clone())
    }

    /// Inverse of [`Unranker::unrank_dc`].
    pub fn rank_dc(&self, c: &Combination) -> BigUint {
        let mut elems: Vec<usize> = c.0.clone();
        elems.sort_unstable();
        self.rank_dc_rec(self.m, &elems, 0)
    }

    fn rank_dc_rec(&self, m: usize, elems: &[usize], offset: usize) -> BigUint {
        let k = elems.len();
        if k == 0 || k == m {
            return BigUint::zero();
        }
        if m <= 2 {
            return BigUint::from(elems[0] - offset);
        }
        let (m1, m2) = (m / 2, m - m / 2);
        let k1 = elems.iter().take_while(|&&e| e < offset + m1).count();
        let ps = self.prefix_sums(m1, m2, k)[k1].clone();
        let r1 = self.rank_dc_rec(m1, &elems[..k1], offset);
        let r2 = self.rank_dc_rec(m2, &elems[k1..], offset + m1);
        ps + r2 * self.table.at(m1, k1) + r1
    }
}

/// Greedy unranking of rank `r` among the k-subsets of 0..m.
pub fn comb_unrank_greedy(m: usize, k: usize, r: &BigUint) -> Result<Combination> {
    Unranker::new(m, k).unrank_greedy(r)
}

/// Divide-and-conquer unranking of rank `r` among the k-subsets of 0..m.
pub fn comb_unrank_dc(m: usize, k: usize, r: &BigUint) -> Result<Combination> {
    Unranker::new(m, k).unrank_dc(r)
}

/// Rank of `c` in the divide-and-conquer order on 0..m.
pub fn comb_rank_dc(m: usize, c: &Combination) -> BigUint {
    Unranker::new(m, c.k()).rank_dc(c)
}

/// sum_{i < x} C(m1, i) C(m2, k - i), by binary splitting.
pub fn hypergeometric_prefix_sum(m1: usize, m2: usize, k: usize, x: usize) -> BigUint {
    hypergeometric_prefix_sum_with(m1, m2, k, x, &Binomials::new(0, 0))
}

fn hypergeometric_prefix_sum_with(m1: usize, m2: usize, k: usize, x: usize, table: &Binomials) -> BigUint {
    let first = k.saturating_sub(m2);
    let end = x.min(k.min(m1) + 1);
    if end <= first {
        return BigUint::zero();
    }
    let head = table.get(m1, first) * table.get(m2, k - first);
    // H(i + 1) / H(i) = (m1 - i)(k - i) / ((i + 1)(m2 - k + i + 1)).
    let ratio = |i: usize| -> (BigUint, BigUint) {
        let p = BigUint::from(m1 - i) * (k - i);
        let q = BigUint::from(i + 1) * (m2 + i + 1 - k);
        (p, q)
    };
    let (_, q, t) = split_series(first, end, &ratio);
    let (quot, rem) = (head * t).div_rem(&q);
    debug_assert!(rem.is_zero());
    quot
}

/// Binary splitting of sum_{j=a}^{b-1} prod_{t=a}^{j-1} p(t)/q(t), returned
/// as (P, Q, T) with the sum equal to T / Q.
fn split_series<F: Fn(usize) -> (BigUint, BigUint)>(a: usize, b: usize, ratio: &F) -> (BigUint, BigUint, BigUint) {
    if b - a == 1 {
        let (p, q) = ratio(a);
        let t = q.clone();
        return (p, q, t);
    }
    let mid = a + (b - a) / 2;
    let (p1, q1, t1) = split_series(a, mid, ratio);
    let (p2, q2, t2) = split_series(mid, b, ratio);
    let t = t1 * &q2 + &p1 * t2;
    (p1 * p2, q1 * q2, t)
}

/// Outcome of an exhaustive round-trip sweep.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SweepReport {
    pub pairs: usize,
    pub ranks: u64,
    pub greedy_roundtrip_failures: u64,
    pub dc_roundtrip_failures: u64,
    /// Ranks where the two algorithms return different combinations.
    pub disagreements: u64,
    /// First (m, k, r) with differing outputs.
    pub first_disagreement: Option<(usize, usize, u64)>,
}

/// Round-trips every rank of every (m, k) with 1 <= k < m <= max_m and
/// C(m, k) <= max_binom, through both algorithms.
pub fn selftest_sweep(max_binom: u64, max_m: usize) -> SweepReport {
    let mut rep = SweepReport::default();
    let limit = BigUint::from(max_binom);
    for m in 2..=max_m {
        for k in 1..m {
            if binomial(m, k) > limit {
                // C(m, k) is unimodal in k; skip to the mirrored tail.
                continue;
            }
            let un = Unranker::new(m, k);
            let total = un.count().to_u64().expect("bounded by max_binom");
            rep.pairs += 1;
            for r in 0..total {
                let rb = BigUint::from(r);
                let g = un.unrank_greedy(&rb).expect("rank in range");
                let d = un.unrank_dc(&rb).expect("rank in range");
                if un.rank(&g) != rb {
                    rep.greedy_roundtrip_failures += 1;
                }
                if un.rank_dc(&d) != rb {
                    rep.dc_roundtrip_failures += 1;
                }
                if g != d {
                    rep.disagreements += 1;
                    rep.first_disagreement.get_or_insert((m, k, r));
                }
                rep.ranks += 1;
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_combinations(m: usize, k: usize) -> Vec<Combination> {
        // Colex order: enumerate bitmasks by increasing value.
        (0u64..1 << m)
            .filter(|x| x.count_ones() as usize == k)
            .map(|x| Combination((0..m).rev().filter(|&i| x >> i & 1 == 1).collect()))
            .collect()
    }

    #[test]
    fn colex_enumeration_matches_rank() {
        for m in 1..=9 {
            for k in 0..=m {
                for (r, c) in all_combinations(m, k).iter().enumerate() {
                    assert_eq!(comb_rank(c), BigUint::from(r));
                }
            }
        }
    }

    #[test]
    fn small_ranks_and_unranks() {
        let c = Combination::new(vec![4, 3], 5).unwrap();
        assert_eq!(comb_rank(&c), BigUint::from(9u32));
        assert_eq!(comb_unrank_greedy(5, 2, &BigUint::from(9u32)).unwrap(), c);
        assert_eq!(comb_unrank_greedy(6, 3, &BigUint::zero()).unwrap().0, vec![2, 1, 0]);
        let last = Combination((4..7).rev().collect());
        assert_eq!(comb_rank(&last), binomial(7, 3) - 1u32);
        for r in 0..2u32 {
            assert_eq!(comb_unrank_dc(2, 1, &BigUint::from(r)).unwrap().0, vec![r as usize]);
        }
    }

    #[test]
    fn out_of_range_rank_is_rejected() {
        assert!(comb_unrank_greedy(5, 2, &BigUint::from(10u32)).is_err());
        assert!(comb_unrank_dc(5, 2, &BigUint::from(10u32)).is_err());
    }

    #[test]
    fn prefix_sum_edges() {
        assert!(hypergeometric_prefix_sum(7, 9, 5, 0).is_zero());
        assert_eq!(hypergeometric_prefix_sum(7, 9, 5, 6), binomial(16, 5));
        assert_eq!(hypergeometric_prefix_sum(2, 9, 5, 6), binomial(11, 5));
    }

    #[test]
    fn orders_differ_as_documented() {
        // Divide-and-conquer groups start with zero lower-half elements, so
        // its rank 0 is the top pair, while colex rank 0 is the bottom pair.
        let un = Unranker::new(5, 2);
        let first_dc = un.unrank_dc(&BigUint::zero()).unwrap();
        assert_eq!(first_dc.0, vec![4, 3]);
        assert_eq!(un.unrank_greedy(&BigUint::zero()).unwrap().0, vec![1, 0]);
    }

    #[test]
    fn small_sweep_round_trips() {
        let rep = selftest_sweep(2000, 40);
        assert_eq!(rep.greedy_roundtrip_failures, 0);
        assert_eq!(rep.dc_roundtrip_failures, 0);
        assert!(rep.ranks > 10_000);
    }
}
