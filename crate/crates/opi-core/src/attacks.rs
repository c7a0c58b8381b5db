//! Classical hardness estimators for OPI instances.
//!
//! - the semicircle law giving the fraction of clauses DQI satisfies,
//! - Prange's algorithm: the exact success probability of one trial,
//! - Extended Prange (XP): overlap tables, the expectation-optimal linear
//!   program and the probability-optimal knapsack dynamic program,
//! - the Hoeffding lower bound on XP trials and the frontier throughput.
//!
//! The DP follows the state (i, budget, low): the best joint distribution
//! of i Bernoulli variables that all use at least `low` base-field
//! constraints within `budget`. Two transitions lead into a state: raise
//! `low`, or fix one more variable at s = low. Allocations are therefore
//! built in descending order of s. Distributions are compared through the
//! tail tuple (P(sum >= t), P(sum = t-1), ..., P(sum = 0)), either directly
//! (fast comparator) or after convolving each candidate with a look-ahead
//! completion of the remaining variables (slow comparator). The look-ahead
//! maximizes the sum of P[s_i] over the remaining variables by a knapsack DP.

use std::rc::Rc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (sqrt(l/m (1 - r/q)) + sqrt((1 - l/m) r/q))^2, saturating at 1 once
/// l/m exceeds 1 - r/q.
pub fn semicircle_target(m: usize, ell: usize, r: u64, q: u64) -> Result<f64> {
    if ell > m || m == 0 {
        return Err(Error::InvalidInput(format!("need 0 <= l <= m, got l = {ell}, m = {m}")));
    }
    if r == 0 || r >= q {
        return Err(Error::InvalidInput(format!("need 0 < r < q, got r = {r}, q = {q}")));
    }
    let lm = ell as f64 / m as f64;
    let rq = r as f64 / q as f64;
    if lm > 1.0 - rq {
        return Ok(1.0);
    }
    let v = (lm * (1.0 - rq)).sqrt() + ((1.0 - lm) * rq).sqrt();
    Ok(v * v)
}

/// Parameters (m, n, b, r) of an OPI instance over GF(2^b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpiParams {
    pub m: usize,
    pub n: usize,
    pub b: u32,
    pub r: u64,
}

impl OpiParams {
    pub fn new(m: usize, n: usize, b: u32, r: u64) -> Result<Self> {
        if b == 0 || b > 16 {
            return Err(Error::InvalidInput(format!("field degree b = {b} outside 1..=16")));
        }
        if n == 0 || n > m {
            return Err(Error::InvalidInput(format!("need 0 < n <= m, got n = {n}, m = {m}")));
        }
        if r == 0 || r >= 1 << b {
            return Err(Error::InvalidInput(format!("need 0 < r < 2^b, got r = {r}")));
        }
        Ok(Self { m, n, b, r })
    }

    pub fn q(&self) -> u64 {
        1 << self.b
    }
}

/// Threshold t of clauses an attack must satisfy to match DQI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackTarget {
    pub params: OpiParams,
    /// Correction radius floor(n/2).
    pub ell: usize,
    pub mu: f64,
    pub t: usize,
}

impl AttackTarget {
    /// l = floor(n/2) and t = mu m rounded half up, the convention that
    /// reproduces the published Prange column.
    pub fn new(params: OpiParams) -> Result<Self> {
        let ell = params.n / 2;
        let mu = semicircle_target(params.m, ell, params.r, params.q())?;
        let t = (mu * params.m as f64 + 0.5).floor() as usize;
        let t = t.clamp(params.n, params.m);
        Ok(Self { params, ell, mu, t })
    }
}

/// Exact success probability of one Prange trial:
/// sum_{j >= t-n} C(M, j) (r/q)^j (1 - r/q)^(M-j) with M = m - n.
pub fn prange_success_prob(m: usize, n: usize, r: u64, q: u64, t: usize) -> Result<BigRational> {
    if n > t || t > m {
        return Err(Error::InvalidInput(format!("need n <= t <= m, got n = {n}, t = {t}, m = {m}")));
    }
    if r == 0 || r > q {
        return Err(Error::InvalidInput(format!("need 0 < r <= q, got r = {r}, q = {q}")));
    }
    let big_m = m - n;
    let first = t - n;
    let r_big = BigUint::from(r);
    let s_big = BigUint::from(q - r);
    // Powers of (q - r) indexed by exponent, built once.
    let mut s_pows = Vec::with_capacity(big_m + 1);
    s_pows.push(BigUint::one());
    for e in 1..=big_m - first {
        let next = &s_pows[e - 1] * &s_big;
        s_pows.push(next);
    }
    let mut binom = crate::dicke::binomial(big_m, first);
    let mut r_pow = num_traits::pow(r_big.clone(), first);
    let mut num = BigUint::zero();
    for j in first..=big_m {
        num += &binom * &r_pow * &s_pows[big_m - j];
        if j < big_m {
            binom = binom * (big_m - j) / (j + 1);
            r_pow *= &r_big;
        }
    }
    let den = num_traits::pow(BigUint::from(q), big_m);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// 1/p(t) from the exact probability, rounded to f64.
pub fn prange_trials(m: usize, n: usize, r: u64, q: u64, t: usize) -> Result<f64> {
    let p = prange_success_prob(m, n, r, q, t)?;
    Ok(ratio_to_f64(p.denom(), p.numer()))
}

/// a / b for large integers, with full f64 precision and range.
pub fn ratio_to_f64(a: &BigInt, b: &BigInt) -> f64 {
    if b.is_zero() {
        return f64::INFINITY;
    }
    let shift = b.bits() as i64 - a.bits() as i64 + 64;
    let q = if shift >= 0 { (a << shift as usize) / b } else { a / (b << (-shift) as usize) };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}

/// Independent log-space f64 evaluation of the Prange success probability.
pub fn prange_success_prob_f64(m: usize, n: usize, r: u64, q: u64, t: usize) -> f64 {
    let big_m = m - n;
    let lp = (r as f64 / q as f64).ln();
    let lq = (1.0 - r as f64 / q as f64).ln();
    let mut ln_fact = vec![0.0f64; big_m + 1];
    for i in 1..=big_m {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let terms: Vec<f64> = (t - n..=big_m)
        .map(|j| ln_fact[big_m] - ln_fact[j] - ln_fact[big_m - j] + j as f64 * lp + (big_m - j) as f64 * lq)
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (top + terms.iter().map(|x| (x - top).exp()).sum::<f64>().ln()).exp()
}

/// Trials per day of the frontier-scale heuristic estimate.
pub fn frontier_trials_per_day() -> f64 {
    frontier_trials(24.0 * 3600.0)
}

/// Trials run in `seconds` of wall-clock time: one half of 37632 nodes
/// times 220 cores times 4 trials per cycle at 1.7 GHz.
pub fn frontier_trials(seconds: f64) -> f64 {
    seconds * 0.5 * 37632.0 * 220.0 * 4.0 * 1.7e9
}

/// Exponent rate 2 (sqrt(R/2 (1 - R/2)) - R)^2 of the Hoeffding bound.
pub fn hoeffding_rate(rate: f64) -> f64 {
    let d = (rate / 2.0 * (1.0 - rate / 2.0)).sqrt() - rate;
    2.0 * d * d
}

/// Lower bound exp(rate m) on the number of XP trials.
pub fn hoeffding_trials_lower_bound(m: usize, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidInput(format!("rate {rate} outside (0, 1)")));
    }
    Ok((hoeffding_rate(rate) * m as f64).exp())
}

/// Hoeffding upper bound exp(-2 (t - mean)^2 / m) on P(sum >= t), or 1 when
/// t does not exceed the mean.
pub fn hoeffding_tail_bound(mean: f64, m: usize, t: usize) -> f64 {
    let gap = t as f64 - mean;
    if gap <= 0.0 {
        1.0
    } else {
        (-2.0 * gap * gap / m as f64).exp()
    }
}

/// Best fractional overlap P[s] of a codimension-s affine subspace with the
/// target set, for s = 0..=b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTable {
    pub p: Vec<f64>,
}

impl OverlapTable {
    /// Validates probabilities and monotonicity.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidInput("overlap table must be nonempty".into()));
        }
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidInput("overlaps must lie in [0, 1]".into()));
        }
        if p.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("overlaps must be nondecreasing in s".into()));
        }
        Ok(Self { p })
    }

    /// Largest codimension b.
    pub fn b(&self) -> usize {
        self.p.len() - 1
    }

    /// Smallest s reaching the maximal overlap; larger s only cost more.
    pub fn useful_max(&self) -> usize {
        let top = *self.p.last().unwrap();
        self.p.iter().position(|&x| x == top).unwrap()
    }

    /// The table Prange's algorithm sees: only the whole space (s = 0) and
    /// single points (s = b) are available, and any codimension in between
    /// buys nothing beyond the whole space.
    pub fn truncated(&self) -> OverlapTable {
        let b = self.b();
        let mut p = vec![self.p[0]; b + 1];
        p[b] = self.p[b];
        OverlapTable { p }
    }
}

/// Maiorana-McFarland table for b = 2k.
pub fn mm_overlap_table(k: u32) -> Result<OverlapTable> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let b = 2 * k as i32;
    let k = k as i32;
    let p = (0..=b)
        .map(|s| match s {
            0 => 0.5 - 2f64.powi(-(k + 1)),
            1 => 0.5,
            s if s <= k => 0.5 + 2f64.powi(-(k - s + 2)),
            _ => 1.0,
        })
        .collect();
    OverlapTable::new(p)
}

/// Optimal LP distribution over s with its expected overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpAllocation {
    pub distribution: Vec<f64>,
    pub value: f64,
}

/// Maximizes sum p_s P[s] with sum p_s = 1 and sum s p_s <= budget_per_clause.
/// Two equality-type constraints put an optimum on at most two points, so
/// all one- and two-point supports are enumerated.
pub fn xp_lp_allocation(table: &OverlapTable, budget_per_clause: f64) -> Result<LpAllocation> {
    if budget_per_clause < 0.0 {
        return Err(Error::InvalidInput("budget must be nonnegative".into()));
    }
    let b = table.b();
    let mut best = LpAllocation { distribution: vec![0.0; b + 1], value: f64::NEG_INFINITY };
    let mut consider = |dist: Vec<f64>, value: f64| {
        if value > best.value {
            best = LpAllocation { distribution: dist, value };
        }
    };
    for s in 0..=b {
        if s as f64 <= budget_per_clause {
            let mut d = vec![0.0; b + 1];
            d[s] = 1.0;
            consider(d, table.p[s]);
        }
    }
    for lo in 0..=b {
        for hi in lo + 1..=b {
            let (l, h) = (lo as f64, hi as f64);
            if l < budget_per_clause && budget_per_clause < h {
                let w = (budget_per_clause - l) / (h - l);
                let mut d = vec![0.0; b + 1];
                d[lo] = 1.0 - w;
                d[hi] = w;
                consider(d, (1.0 - w) * table.p[lo] + w * table.p[hi]);
            }
        }
    }
    Ok(best)
}

/// Which ordering the knapsack DP uses to compare partial allocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    /// Lexicographic tail tuple of the partial distribution alone.
    Fast,
    /// Tail tuple after completing each candidate with the best expected
    /// allocation of the remaining clauses.
    Slow,
}

/// An XP allocation: counts[s] clauses receive s base-field constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub counts: Vec<usize>,
}

impl Allocation {
    /// Total budget spent.
    pub fn cost(&self) -> usize {
        self.counts.iter().enumerate().map(|(s, c)| s * c).sum()
    }

    /// Number of clauses.
    pub fn clauses(&self) -> usize {
        self.counts.iter().sum()
    }

    /// s values in descending order.
    pub fn descending(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.clauses());
        for (s, &c) in self.counts.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(s, c));
        }
        out
    }

    /// Expected number of satisfied clauses.
    pub fn mean(&self, table: &OverlapTable) -> f64 {
        self.counts.iter().enumerate().map(|(s, &c)| c as f64 * table.p[s]).sum()
    }

    /// P(sum X_i >= t) by direct convolution of the Bernoulli variables.
    pub fn success_probability(&self, table: &OverlapTable, t: usize) -> f64 {
        let mut d = TailDist::unit(t);
        for (s, &c) in self.counts.iter().enumerate() {
            for _ in 0..c {
                d = d.with_bernoulli(table.p[s], t);
            }
        }
        d.tail
    }
}

/// Largest-remainder rounding of an LP distribution to m clauses, trimmed
/// back into the budget by lowering the most expensive clauses.
pub fn lp_rounded_allocation(table: &OverlapTable, lp: &LpAllocation, m: usize, budget: usize) -> Allocation {
    let b = table.b();
    let mut counts: Vec<usize> = lp.distribution.iter().map(|&p| (p * m as f64).floor() as usize).collect();
    let mut rest: Vec<(f64, usize)> =
        lp.distribution.iter().enumerate().map(|(s, &p)| (p * m as f64 - (p * m as f64).floor(), s)).collect();
    rest.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut i = 0;
    while counts.iter().sum::<usize>() < m {
        counts[rest[i % rest.len()].1] += 1;
        i += 1;
    }
    let mut alloc = Allocation { counts };
    while alloc.cost() > budget {
        let top = (1..=b).rev().find(|&s| alloc.counts[s] > 0).expect("cost is positive");
        alloc.counts[top] -= 1;
        alloc.counts[top - 1] += 1;
    }
    alloc
}

/// Distribution of a partial sum truncated at t: the tail mass P(sum >= t)
/// and the point masses P(sum = x) for x < t.
#[derive(Debug, Clone, PartialEq)]
struct TailDist {
    tail: f64,
    /// P(sum = x) for x = 0..pmf.len(), with pmf.len() <= t.
    pmf: Vec<f64>,
}

impl TailDist {
    fn unit(t: usize) -> Self {
        if t == 0 {
            TailDist { tail: 1.0, pmf: Vec::new() }
        } else {
            TailDist { tail: 0.0, pmf: vec![1.0] }
        }
    }

    fn with_bernoulli(&self, p: f64, t: usize) -> Self {
        let q = 1.0 - p;
        let len = self.pmf.len();
        let new_len = (len + 1).min(t);
        let mut pmf = vec![0.0; new_len];
        for (x, slot) in pmf.iter_mut().enumerate() {
            let stay = if x < len { self.pmf[x] * q } else { 0.0 };
            let step = if x >= 1 && x - 1 < len { self.pmf[x - 1] * p } else { 0.0 };
            *slot = stay + step;
        }
        let spill = if len == t && len > 0 { self.pmf[len - 1] * p } else { 0.0 };
        TailDist { tail: self.tail + spill, pmf }
    }

    /// Tuple entry j: the tail for j = 0, else P(sum = t - j).
    fn entry(&self, j: usize, t: usize) -> f64 {
        if j == 0 {
            self.tail
        } else {
            self.pmf.get(t - j).copied().unwrap_or(0.0)
        }
    }
}

/// Lexicographic comparison of tail tuples: true when `c` is strictly better.
fn tuple_better(c: &TailDist, a: &TailDist, t: usize) -> bool {
    for j in 0..=t {
        let (x, y) = (c.entry(j, t), a.entry(j, t));
        if x != y {
            return x > y;
        }
    }
    false
}

/// A DP cell: the distribution with the budget it used and its smallest s.
#[derive(Debug, Clone)]
struct Cell {
    dist: TailDist,
    used: usize,
    min_s: usize,
    /// Number of variables fixed at each s.
    counts: Vec<u32>,
}

impl Cell {
    fn extended(&self, p: f64, s: usize, t: usize) -> Cell {
        let mut counts = self.counts.clone();
        counts[s] += 1;
        Cell { dist: self.dist.with_bernoulli(p, t), used: self.used + s, min_s: s, counts }
    }
}

/// Look-ahead completion: for each cap, the knapsack table of the best
/// multiset of remaining variables, stored as counts of each s >= 1.
struct LookAhead {
    table: OverlapTable,
    m: usize,
    budget: usize,
    t: usize,
    /// counts[cap][r][beta] = counts of s = 1..=cap (flattened).
    counts: Vec<Vec<Vec<u16>>>,
    /// sf[c][x] = P(Bin(c, P[0]) >= x) for x in 0..=t.
    sf: Vec<Vec<f64>>,
}

impl LookAhead {
    fn new(table: &OverlapTable, m: usize, budget: usize, t: usize, smax: usize) -> Self {
        let rmax = budget.min(m);
        let mut counts = Vec::with_capacity(smax + 1);
        for cap in 0..=smax {
            // gain[r][beta]: best sum of (P[s] - P[0]) over r variables with
            // s <= cap. Equal sums are broken toward the larger total
            // variance, which spreads more mass into the upper tail.
            let width = budget + 1;
            let var = |s: usize| table.p[s] * (1.0 - table.p[s]) - table.p[0] * (1.0 - table.p[0]);
            let mut gain = vec![(0.0f64, 0.0f64); (rmax + 1) * width];
            let mut last = vec![0u8; (rmax + 1) * width];
            for r in 1..=rmax {
                for beta in 0..=budget {
                    let mut best = gain[(r - 1) * width + beta];
                    let mut arg = 0u8;
                    for s in 1..=cap.min(beta) {
                        let prev = gain[(r - 1) * width + beta - s];
                        let g = (prev.0 + (table.p[s] - table.p[0]), prev.1 + var(s));
                        if g.0 > best.0 || (g.0 == best.0 && g.1 > best.1) {
                            best = g;
                            arg = s as u8;
                        }
                    }
                    gain[r * width + beta] = best;
                    last[r * width + beta] = arg;
                }
            }
            // Unroll the choices into per-cell counts of each nonzero s.
            let mut cnt = vec![vec![0u16; cap * width]; rmax + 1];
            for r in 1..=rmax {
                for beta in 0..=budget {
                    let s = last[r * width + beta] as usize;
                    let prev_beta = beta - s;
                    let (head, tail) = cnt.split_at_mut(r);
                    let dst = &mut tail[0][beta * cap..(beta + 1) * cap];
                    dst.copy_from_slice(&head[r - 1][prev_beta * cap..(prev_beta + 1) * cap]);
                    if s > 0 {
                        dst[s - 1] += 1;
                    }
                }
            }
            counts.push(cnt);
        }
        let p0 = table.p[0];
        let mut sf = Vec::with_capacity(m + 1);
        let mut row = vec![0.0f64; t + 1];
        row[0] = 1.0;
        sf.push(row.clone());
        for _ in 1..=m {
            let mut next = vec![0.0f64; t + 1];
            next[0] = 1.0;
            for x in 1..=t {
                next[x] = p0 * row[x - 1] + (1.0 - p0) * row[x];
            }
            sf.push(next.clone());
            row = next;
        }
        LookAhead { table: table.clone(), m, budget, t, counts, sf }
    }

    /// Tail tuple of S + F(m - i, budget - used, min_s), entry by entry.
    fn completed<'a>(&'a self, cell: &'a Cell, i: usize) -> CompletedView<'a> {
        let r = self.m - i;
        let beta = self.budget - cell.used;
        let cap = cell.min_s.min(self.counts.len() - 1);
        let rr = r.min(self.budget.min(self.m));
        let cnt = &self.counts[cap][rr][beta * cap..(beta + 1) * cap];
        let mut shift = 0usize;
        let mut nonzero = 0usize;
        // Distribution of the non-P[0] part, with P = 1 items as a shift.
        let mut extra = vec![1.0f64];
        for (idx, &c) in cnt.iter().enumerate() {
            let p = self.table.p[idx + 1];
            for _ in 0..c {
                nonzero += 1;
                if p >= 1.0 {
                    shift += 1;
                } else {
                    let mut next = vec![0.0; extra.len() + 1];
                    for (y, &w) in extra.iter().enumerate() {
                        next[y] += w * (1.0 - p);
                        next[y + 1] += w * p;
                    }
                    extra = next;
                }
            }
        }
        let mut multiset = cell.counts.clone();
        multiset[0] += (r - nonzero) as u32;
        for (idx, &c) in cnt.iter().enumerate() {
            multiset[idx + 1] += c as u32;
        }
        CompletedView { la: self, dist: &cell.dist, zeros: r - nonzero, shift, extra, multiset }
    }
}

struct CompletedView<'a> {
    la: &'a LookAhead,
    dist: &'a TailDist,
    zeros: usize,
    shift: usize,
    extra: Vec<f64>,
    /// Counts of each s in the candidate together with its completion.
    multiset: Vec<u32>,
}

impl CompletedView<'_> {
    /// P(Y >= y) for the completion Y.
    fn y_tail(&self, y: usize) -> f64 {
        if y <= self.shift {
            return 1.0;
        }
        let need = y - self.shift;
        let sf = &self.la.sf[self.zeros];
        self.extra
            .iter()
            .enumerate()
            .map(|(e, &w)| {
                if e >= need {
                    w
                } else {
                    let x = need - e;
                    w * if x < sf.len() { sf[x] } else { 0.0 }
                }
            })
            .sum()
    }

    fn y_pmf(&self, y: usize) -> f64 {
        self.y_tail(y) - self.y_tail(y + 1)
    }

    /// Tuple entry j of the completed distribution.
    fn entry(&self, j: usize) -> f64 {
        let t = self.la.t;
        let pmf = &self.dist.pmf;
        if j == 0 {
            let mut acc = self.dist.tail;
            for (x, &w) in pmf.iter().enumerate() {
                if w != 0.0 {
                    acc += w * self.y_tail(t - x);
                }
            }
            acc
        } else {
            let target = t - j;
            (0..pmf.len().min(target + 1)).map(|x| pmf[x] * self.y_pmf(target - x)).sum()
        }
    }
}

fn completed_better(c: &CompletedView<'_>, a: &CompletedView<'_>, t: usize) -> bool {
    // Equal multisets give equal tuples.
    if c.multiset == a.multiset {
        return false;
    }
    for j in 0..=t {
        let (x, y) = (c.entry(j), a.entry(j));
        if x != y {
            return x > y;
        }
    }
    false
}

/// DP result: the allocation and its success probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackResult {
    pub allocation: Allocation,
    pub gamma: f64,
}

/// Probability-optimal allocation of `budget` base-field constraints over
/// m clauses, aiming at t satisfied clauses.
pub fn xp_knapsack_dp(
    table: &OverlapTable,
    m: usize,
    budget: usize,
    t: usize,
    comparator: Comparator,
) -> Result<KnapsackResult> {
    if t > m {
        return Err(Error::InvalidInput(format!("threshold t = {t} exceeds m = {m}")));
    }
    let smax = table.useful_max();
    let budget = budget.min(m * smax);
    let look = match comparator {
        Comparator::Slow => Some(LookAhead::new(table, m, budget, t, smax)),
        Comparator::Fast => None,
    };
    // choice[i][low - 1][u]: true when the state fixes one variable at s = low.
    let imax = if smax == 0 { 0 } else { budget.min(m) };
    let mut choice: Vec<Vec<Vec<bool>>> = Vec::with_capacity(imax + 1);
    let width = budget + 1;
    let unit = Cell { dist: TailDist::unit(t), used: 0, min_s: smax, counts: vec![0; smax + 1] };
    let unit = Rc::new(unit);
    let mut prev: Vec<Vec<Option<Rc<Cell>>>> = vec![vec![Some(unit.clone()); width]; smax + 1];
    choice.push(vec![vec![false; width]; smax]);
    let mut top_low1: Vec<Option<Rc<Cell>>> = vec![Some(unit.clone())];
    for i in 1..=imax {
        let mut cur: Vec<Vec<Option<Rc<Cell>>>> = vec![vec![None; width]; smax + 1];
        let mut ch = vec![vec![false; width]; smax];
        for low in (1..=smax).rev() {
            for u in 0..width {
                if i * low > u {
                    continue;
                }
                let raised = if low < smax { cur[low + 1][u].clone() } else { None };
                let fixed = prev[low][u - low].as_ref().map(|c| {
                    Rc::new(c.extended(table.p[low], low, t))
                });
                let (cell, took_fixed) = pick(raised, fixed, i, t, look.as_ref());
                ch[low - 1][u] = took_fixed;
                cur[low][u] = cell;
            }
        }
        top_low1.push(cur[1][budget].clone());
        choice.push(ch);
        prev = cur;
    }
    // Level low = 0 is only needed at the full budget.
    let mut level0 = unit;
    let mut choice0 = vec![false; m + 1];
    for (i, slot) in choice0.iter_mut().enumerate().skip(1) {
        let raised = top_low1.get(i).cloned().flatten();
        let fixed = Some(Rc::new(level0.extended(table.p[0], 0, t)));
        let (cell, took_fixed) = pick(raised, fixed, i, t, look.as_ref());
        *slot = took_fixed;
        level0 = cell.expect("the fixed branch is always feasible");
    }
    // Walk the choices back from (m, budget, 0).
    let mut counts = vec![0usize; table.b() + 1];
    let (mut i, mut u, mut low) = (m, budget, 0usize);
    while i > 0 {
        if low == 0 {
            if choice0[i] {
                counts[0] += 1;
                i -= 1;
            } else {
                low = 1;
            }
        } else if choice[i][low - 1][u] {
            counts[low] += 1;
            i -= 1;
            u -= low;
        } else {
            low += 1;
        }
    }
    Ok(KnapsackResult { allocation: Allocation { counts }, gamma: level0.dist.tail })
}

/// Chooses between the two transitions into a state. Ties go to the fixed
/// branch, which spends the smaller s.
fn pick(
    raised: Option<Rc<Cell>>,
    fixed: Option<Rc<Cell>>,
    i: usize,
    t: usize,
    look: Option<&LookAhead>,
) -> (Option<Rc<Cell>>, bool) {
    match (raised, fixed) {
        (None, f) => {
            let took = f.is_some();
            (f, took)
        }
        (Some(a), None) => (Some(a), false),
        (Some(a), Some(f)) => {
            let raised_wins = match look {
                None => tuple_better(&a.dist, &f.dist, t),
                Some(la) => completed_better(&la.completed(&a, i), &la.completed(&f, i), t),
            };
            if raised_wins {
                (Some(a), false)
            } else {
                (Some(f), true)
            }
        }
    }
}

/// Expected XP trials 1/gamma for an instance with the Maiorana-McFarland
/// table, budget b n and the calibrated threshold.
pub fn xp_trials(params: OpiParams, comparator: Comparator) -> Result<f64> {
    if !params.b.is_multiple_of(2) {
        return Err(Error::InvalidInput("the bent table needs an even field degree".into()));
    }
    let target = AttackTarget::new(params)?;
    let table = mm_overlap_table(params.b / 2)?;
    let res = xp_knapsack_dp(&table, params.m, params.b as usize * params.n, target.t, comparator)?;
    Ok(1.0 / res.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_examples() {
        assert!((semicircle_target(10, 0, 3, 8).unwrap() - 3.0 / 8.0).abs() < 1e-15);
        assert!((semicircle_target(10, 5, 4, 8).unwrap() - 1.0).abs() < 1e-15);
        let (m, n) = (1000usize, 200usize);
        let big_r = n as f64 / m as f64;
        let mu = semicircle_target(m, n / 2, 4, 8).unwrap();
        assert!((mu - (0.5 + (big_r / 2.0 * (1.0 - big_r / 2.0)).sqrt())).abs() < 1e-12);
        assert!(semicircle_target(10, 11, 3, 8).is_err());
        assert!(semicircle_target(10, 1, 8, 8).is_err());
    }

    #[test]
    fn prange_at_t_equal_n_is_certain() {
        let p = prange_success_prob(40, 10, 3, 8, 10).unwrap();
        assert!(p.is_one());
    }

    #[test]
    fn ratio_conversion_is_accurate() {
        let a = BigInt::from(1u64) << 3000usize;
        let b = BigInt::from(3u64) << 2990usize;
        assert!((ratio_to_f64(&a, &b) - 1024.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mm_tables() {
        assert_eq!(mm_overlap_table(2).unwrap().p, vec![0.375, 0.5, 0.75, 1.0, 1.0]);
        assert_eq!(mm_overlap_table(1).unwrap().p[0], 0.25);
        assert_eq!(mm_overlap_table(5).unwrap().useful_max(), 6);
    }

    #[test]
    fn lp_zero_budget_uses_whole_space() {
        let table = mm_overlap_table(3).unwrap();
        let lp = xp_lp_allocation(&table, 0.0).unwrap();
        assert_eq!(lp.distribution[0], 1.0);
        assert_eq!(lp.value, table.p[0]);
    }

    #[test]
    fn dp_trivial_cases() {
        let table = mm_overlap_table(2).unwrap();
        for cmp in [Comparator::Fast, Comparator::Slow] {
            assert_eq!(xp_knapsack_dp(&table, 7, 3, 0, cmp).unwrap().gamma, 1.0);
            let full = xp_knapsack_dp(&table, 7, 7 * 3, 7, cmp).unwrap();
            assert_eq!(full.gamma, 1.0);
            assert!(xp_knapsack_dp(&table, 7, 3, 8, cmp).is_err());
        }
    }

    #[test]
    fn dp_gamma_matches_its_allocation() {
        let table = mm_overlap_table(3).unwrap();
        for cmp in [Comparator::Fast, Comparator::Slow] {
            let res = xp_knapsack_dp(&table, 40, 50, 28, cmp).unwrap();
            assert_eq!(res.allocation.clauses(), 40);
            assert!(res.allocation.cost() <= 50);
            let direct = res.allocation.success_probability(&table, 28);
            assert!((direct - res.gamma).abs() <= 1e-12 * direct.max(1e-300));
        }
    }
}
