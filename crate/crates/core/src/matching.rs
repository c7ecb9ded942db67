//! Perfect matchings in 0-1 matrices / balanced bipartite graphs:
//! Hopcroft-Karp existence, exact counting via Ryser's formula, exhaustive
//! enumeration, exact uniform sampling, and an MCMC approximate sampler.

use crate::error::{Error, Result};
use rand::Rng;

/// Default dimension cap for the permanent oracle (Ryser is O(n 2^n)).
pub const DEFAULT_PERMANENT_LIMIT: usize = 24;

/// Dimension cap for exhaustive matching enumeration.
pub const ENUMERATION_LIMIT: usize = 8;

/// Largest dimension for the subset-DP uniform sampler (8 MiB table).
const DP_SAMPLER_LIMIT: usize = 20;

/// Rejection trials attempted before switching to the DP sampler.
const REJECTION_BEFORE_DP: u64 = 4096;

/// Hard cap on rejection trials when the DP sampler is unavailable.
const REJECTION_HARD_CAP: u64 = 200_000_000;

/// An n x n 0-1 matrix, read as the bi-adjacency matrix of a balanced
/// bipartite graph: rows on one side, columns on the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    n: usize,
    rows: Vec<u128>,
}

impl Skeleton {
    pub fn new(n: usize, rows: Vec<u128>) -> Result<Self> {
        if n == 0 || n > 128 {
            return Err(Error::InvalidMatching(format!("skeleton dimension {n} out of 1..=128")));
        }
        if rows.len() != n {
            return Err(Error::InvalidMatching("skeleton is not square".into()));
        }
        if n < 128 {
            for row in &rows {
                if row >> n != 0 {
                    return Err(Error::InvalidMatching("row bits beyond dimension".into()));
                }
            }
        }
        Ok(Skeleton { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        Skeleton::new(n, (0..n).map(|i| 1u128 << i).collect()).unwrap()
    }

    pub fn all_ones(n: usize) -> Self {
        let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        Skeleton::new(n, vec![full; n]).unwrap()
    }

    pub fn from_grid(grid: &[Vec<bool>]) -> Result<Self> {
        let n = grid.len();
        let rows = grid
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold(0u128, |acc, (j, &b)| if b { acc | 1 << j } else { acc })
            })
            .collect();
        if grid.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatching("skeleton is not square".into()));
        }
        Skeleton::new(n, rows)
    }

    /// Each entry 1 independently with probability `p`.
    pub fn bernoulli(n: usize, p: f64, rng: &mut impl Rng) -> Result<Self> {
        let mut rows = vec![0u128; n];
        for row in rows.iter_mut() {
            for j in 0..n {
                if rng.gen_bool(p) {
                    *row |= 1 << j;
                }
            }
        }
        Skeleton::new(n, rows)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bit(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> col & 1 == 1
    }

    #[inline]
    pub fn row(&self, row: usize) -> u128 {
        self.rows[row]
    }

    /// Bitmask over rows having a 1 in `col`.
    pub fn column_mask(&self, col: usize) -> u128 {
        let mut mask = 0u128;
        for (i, row) in self.rows.iter().enumerate() {
            if row >> col & 1 == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn density(&self) -> f64 {
        self.ones() as f64 / (self.n * self.n) as f64
    }

    /// Rows of '0'/'1' characters; inverse of [`Skeleton::parse`].
    pub fn format(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            for j in 0..self.n {
                out.push(if row >> j & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let n = lines.len();
        let mut rows = vec![0u128; n];
        for (i, line) in lines.iter().enumerate() {
            let line = line.trim();
            if line.len() != n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {n} characters, found {}", line.len()),
                });
            }
            for (j, c) in line.chars().enumerate() {
                match c {
                    '1' => rows[i] |= 1 << j,
                    '0' => {}
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
        }
        Skeleton::new(n, rows)
    }
}

/// One matched row per column, all rows distinct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectMatching {
    pub rows: Vec<usize>,
}

impl PerfectMatching {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        let n = rows.len();
        let mut seen = 0u128;
        for &r in &rows {
            if r >= n || seen >> r & 1 == 1 {
                return Err(Error::InvalidMatching(
                    "row indices must be distinct and in range".into(),
                ));
            }
            seen |= 1 << r;
        }
        Ok(PerfectMatching { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// True iff every matched cell is a 1 of `s`.
    pub fn is_valid_for(&self, s: &Skeleton) -> bool {
        self.rows.len() == s.n() && self.rows.iter().enumerate().all(|(col, &row)| s.bit(row, col))
    }
}

/// Maximum-cardinality matching via Hopcroft-Karp; columns are the left
/// side. Returns the size and, per column, the matched row if any. BFS and
/// DFS scan in ascending index order, so the output is deterministic.
pub fn max_matching(s: &Skeleton) -> (usize, Vec<Option<usize>>) {
    let n = s.n();
    const NONE: usize = usize::MAX;
    let mut col_to_row = vec![NONE; n];
    let mut row_to_col = vec![NONE; n];
    let mut dist = vec![0usize; n];
    let mut queue = std::collections::VecDeque::new();
    let mut size = 0;

    loop {
        // BFS layers over free columns.
        queue.clear();
        for c in 0..n {
            if col_to_row[c] == NONE {
                dist[c] = 0;
                queue.push_back(c);
            } else {
                dist[c] = NONE;
            }
        }
        let mut found = false;
        while let Some(c) = queue.pop_front() {
            let mut ones = s.row_mask_for_col(c);
            while ones != 0 {
                let r = ones.trailing_zeros() as usize;
                ones &= ones - 1;
                let c2 = row_to_col[r];
                if c2 == NONE {
                    found = true;
                } else if dist[c2] == NONE {
                    dist[c2] = dist[c] + 1;
                    queue.push_back(c2);
                }
            }
        }
        if !found {
            break;
        }
        // Layered DFS augmentation.
        fn dfs(
            c: usize,
            s: &Skeleton,
            dist: &mut [usize],
            col_to_row: &mut [usize],
            row_to_col: &mut [usize],
        ) -> bool {
            const NONE: usize = usize::MAX;
            let mut ones = s.row_mask_for_col(c);
            while ones != 0 {
                let r = ones.trailing_zeros() as usize;
                ones &= ones - 1;
                let c2 = row_to_col[r];
                if c2 == NONE
                    || (dist[c2] == dist[c].wrapping_add(1)
                        && dfs(c2, s, dist, col_to_row, row_to_col))
                {
                    col_to_row[c] = r;
                    row_to_col[r] = c;
                    return true;
                }
            }
            dist[c] = NONE;
            false
        }
        for c in 0..n {
            if col_to_row[c] == NONE && dfs(c, s, &mut dist, &mut col_to_row, &mut row_to_col) {
                size += 1;
            }
        }
    }

    let assignment = col_to_row
        .into_iter()
        .map(|r| if r == NONE { None } else { Some(r) })
        .collect();
    (size, assignment)
}

impl Skeleton {
    #[inline]
    fn row_mask_for_col(&self, col: usize) -> u128 {
        // Column masks are not cached; dimensions are small.
        self.column_mask(col)
    }
}

/// True iff the bipartite graph of `s` has a perfect matching.
pub fn has_perfect_matching(s: &Skeleton) -> bool {
    max_matching(s).0 == s.n()
}

/// Exact permanent of the 0-1 matrix = number of perfect matchings.
///
/// Ryser's inclusion-exclusion with Gray-code subset updates. Arithmetic
/// wraps mod 2^128; the result is exact because it is bounded by n! < 2^128
/// for n <= 24 (and intermediate terms only need to be correct mod 2^128).
pub fn count_pm(s: &Skeleton) -> Result<u128> {
    count_pm_with_limit(s, DEFAULT_PERMANENT_LIMIT)
}

pub fn count_pm_with_limit(s: &Skeleton, limit: usize) -> Result<u128> {
    let n = s.n();
    if n > limit {
        return Err(Error::OverLimit {
            what: "count_pm",
            what_limit: "dimension",
            limit,
            value: n,
        });
    }
    let mut row_sums = vec![0u128; n];
    let mut total = 0u128;
    let mut prev_gray = 0u64;
    for k in 1u64..1 << n {
        let gray = k ^ (k >> 1);
        let changed = (gray ^ prev_gray).trailing_zeros() as usize;
        let col_mask = 1u128 << changed;
        if gray >> changed & 1 == 1 {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs += u128::from(s.row(i) & col_mask != 0);
            }
        } else {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs -= u128::from(s.row(i) & col_mask != 0);
            }
        }
        prev_gray = gray;
        let mut product = 1u128;
        for &rs in &row_sums {
            product = product.wrapping_mul(rs);
            if product == 0 {
                break;
            }
        }
        // Sign (-1)^(n - |S|).
        if (n as u32 - gray.count_ones()) % 2 == 0 {
            total = total.wrapping_add(product);
        } else {
            total = total.wrapping_sub(product);
        }
    }
    Ok(total)
}

/// All perfect matchings of `s`, each exactly once (exhaustive oracle).
pub fn enumerate_pms(s: &Skeleton) -> Result<Vec<PerfectMatching>> {
    let n = s.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::OverLimit {
            what: "enumerate_pms",
            what_limit: "dimension",
            limit: ENUMERATION_LIMIT,
            value: n,
        });
    }
    let mut out = Vec::new();
    let mut rows = vec![0usize; n];
    fn rec(
        s: &Skeleton,
        col: usize,
        used: u128,
        rows: &mut Vec<usize>,
        out: &mut Vec<PerfectMatching>,
    ) {
        if col == s.n() {
            out.push(PerfectMatching { rows: rows.clone() });
            return;
        }
        let mut ones = s.column_mask(col) & !used;
        while ones != 0 {
            let r = ones.trailing_zeros() as usize;
            ones &= ones - 1;
            rows[col] = r;
            rec(s, col + 1, used | 1 << r, rows, out);
        }
    }
    rec(s, 0, 0, &mut rows, &mut out);
    Ok(out)
}

/// One rejection trial: draws a uniform random permutation column by
/// column and aborts on the first zero cell. Columns are visited sparsest
/// first (a fixed, matrix-determined order), which changes nothing about
/// the distribution but fails cheap trials early.
/// Exactly uniform draw from `0..bound` via Lemire's multiply-shift with a
/// precomputed rejection threshold `2^32 mod bound`.
#[inline]
fn pick_unbiased(rng: &mut impl Rng, bound: u32, threshold: u32) -> u32 {
    loop {
        let m = (rng.next_u32() as u64) * (bound as u64);
        if (m as u32) >= threshold {
            return (m >> 32) as u32;
        }
    }
}

/// `avail` must hold a permutation of `0..n` on entry; it is restored to
/// exactly the same order on abort, which keeps re-trials cheap: only the
/// few swaps made so far are undone. `thresholds[d]` must be
/// `2^32 mod (n - d)`.
fn rejection_trial(
    s: &Skeleton,
    col_order: &[usize],
    thresholds: &[u32],
    rows_out: &mut [usize],
    avail: &mut [usize],
    undo: &mut [(usize, usize)],
    rng: &mut impl Rng,
) -> bool {
    let n = avail.len();
    let mut depth = 0;
    for (&col, &threshold) in col_order.iter().zip(thresholds) {
        let pick = pick_unbiased(rng, (n - depth) as u32, threshold) as usize;
        let r = avail[pick];
        if !s.bit(r, col) {
            for &(p, saved) in undo[..depth].iter().rev() {
                avail[p] = saved;
            }
            return false;
        }
        undo[depth] = (pick, r);
        avail[pick] = avail[n - depth - 1];
        rows_out[col] = r;
        depth += 1;
    }
    true
}

/// Exactly uniform sampling via a subset DP over row sets. `dp[mask]`
/// counts matchings of columns `0..popcount(mask)` into the rows of
/// `mask`; counts fit in u64 for n <= 20.
fn dp_sample(s: &Skeleton, rng: &mut impl Rng) -> Result<PerfectMatching> {
    let n = s.n();
    debug_assert!(n <= DP_SAMPLER_LIMIT);
    let full: usize = (1 << n) - 1;
    let mut dp = vec![0u64; 1 << n];
    dp[0] = 1;
    for mask in 1..=full {
        let col = mask.count_ones() as usize - 1;
        let col_rows = s.column_mask(col) as usize;
        let mut candidates = mask & col_rows;
        let mut total = 0u64;
        while candidates != 0 {
            let low = candidates & candidates.wrapping_neg();
            total += dp[mask ^ low];
            candidates ^= low;
        }
        dp[mask] = total;
    }
    if dp[full] == 0 {
        return Err(Error::NoPerfectMatching);
    }
    let mut rows = vec![0usize; n];
    let mut mask = full;
    for col in (0..n).rev() {
        let target = rng.gen_range(0..dp[mask]);
        let mut acc = 0u64;
        let mut candidates = mask & s.column_mask(col) as usize;
        loop {
            debug_assert!(candidates != 0);
            let low = candidates & candidates.wrapping_neg();
            acc += dp[mask ^ low];
            if target < acc {
                rows[col] = low.trailing_zeros() as usize;
                mask ^= low;
                break;
            }
            candidates ^= low;
        }
    }
    Ok(PerfectMatching { rows })
}

/// Draws an exactly uniform perfect matching of `s`.
///
/// Strategy: rejection sampling over uniform permutations (exact), falling
/// back to the subset DP for n <= 20 when the skeleton is too sparse for
/// rejection to land quickly. Both routes are exactly uniform, so the
/// combination is too.
pub fn sample_pm_exact(s: &Skeleton, rng: &mut impl Rng) -> Result<PerfectMatching> {
    if !has_perfect_matching(s) {
        return Err(Error::NoPerfectMatching);
    }
    let n = s.n();
    let mut col_order: Vec<usize> = (0..n).collect();
    col_order.sort_by_key(|&c| s.column_mask(c).count_ones());
    let mut rows = vec![0usize; n];
    let mut avail: Vec<usize> = (0..n).collect();
    let mut undo = vec![(0usize, 0usize); n];
    let thresholds: Vec<u32> = (0..n)
        .map(|d| {
            let bound = (n - d) as u32;
            bound.wrapping_neg() % bound
        })
        .collect();
    for _ in 0..REJECTION_BEFORE_DP {
        if rejection_trial(s, &col_order, &thresholds, &mut rows, &mut avail, &mut undo, rng) {
            return Ok(PerfectMatching { rows });
        }
    }
    if n <= DP_SAMPLER_LIMIT {
        return dp_sample(s, rng);
    }
    for _ in REJECTION_BEFORE_DP..REJECTION_HARD_CAP {
        if rejection_trial(s, &col_order, &thresholds, &mut rows, &mut avail, &mut undo, rng) {
            return Ok(PerfectMatching { rows });
        }
    }
    Err(Error::RejectionCap(REJECTION_HARD_CAP))
}

/// Metropolis chain on perfect matchings: propose re-permuting the rows of
/// a small random block of columns, accept iff the result stays a matching
/// of `s`. A stand-in for heavyweight approximate samplers; validated
/// against the exact sampler on small instances. `steps = 0` returns the
/// deterministic Hopcroft-Karp matching.
pub fn sample_pm_mcmc(s: &Skeleton, steps: usize, rng: &mut impl Rng) -> Result<PerfectMatching> {
    let n = s.n();
    let (size, assignment) = max_matching(s);
    if size != n {
        return Err(Error::NoPerfectMatching);
    }
    let mut rows: Vec<usize> = assignment.into_iter().map(|r| r.unwrap()).collect();
    if n == 1 {
        return Ok(PerfectMatching { rows });
    }
    let block_cap = n.min(8);
    let mut cols: Vec<usize> = (0..n).collect();
    let mut perm: Vec<usize> = Vec::with_capacity(block_cap);
    for _ in 0..steps {
        let k = rng.gen_range(2..=block_cap);
        // Partial Fisher-Yates: the first k entries become the block.
        for i in 0..k {
            let j = rng.gen_range(i..n);
            cols.swap(i, j);
        }
        perm.clear();
        perm.extend(0..k);
        for i in (1..k).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let ok = (0..k).all(|i| s.bit(rows[cols[perm[i]]], cols[i]));
        if ok {
            let moved: Vec<usize> = (0..k).map(|i| rows[cols[perm[i]]]).collect();
            for i in 0..k {
                rows[cols[i]] = moved[i];
            }
        }
    }
    Ok(PerfectMatching { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn skel(text: &str) -> Skeleton {
        Skeleton::parse(text).unwrap()
    }

    #[test]
    fn parse_format_round_trip() {
        let s = skel("110\n011\n101");
        assert_eq!(Skeleton::parse(&s.format()).unwrap(), s);
    }

    #[test]
    fn max_matching_examples() {
        let id = Skeleton::identity(4);
        let (size, rows) = max_matching(&id);
        assert_eq!(size, 4);
        assert_eq!(rows, vec![Some(0), Some(1), Some(2), Some(3)]);

        let zeros = Skeleton::new(3, vec![0, 0, 0]).unwrap();
        assert_eq!(max_matching(&zeros).0, 0);

        let s = skel("11\n01");
        let (size, rows) = max_matching(&s);
        assert_eq!(size, 2);
        assert_eq!(rows, vec![Some(0), Some(1)]);
    }

    #[test]
    fn existence_examples() {
        assert!(has_perfect_matching(&Skeleton::identity(5)));
        let zero_row = skel("111\n000\n111");
        assert!(!has_perfect_matching(&zero_row));
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(count_pm(&Skeleton::all_ones(3)).unwrap(), 6);
        assert_eq!(count_pm(&Skeleton::identity(6)).unwrap(), 1);
        assert_eq!(count_pm(&skel("01\n11")).unwrap(), 1);
        assert!(count_pm(&Skeleton::all_ones(25)).is_err());
    }

    /// Permutation-sum permanent, the independent oracle for Ryser.
    pub(crate) fn naive_permanent(s: &Skeleton) -> u128 {
        fn rec(s: &Skeleton, col: usize, used: u128) -> u128 {
            if col == s.n() {
                return 1;
            }
            let mut total = 0;
            let mut ones = s.column_mask(col) & !used;
            while ones != 0 {
                let r = ones.trailing_zeros() as usize;
                ones &= ones - 1;
                total += rec(s, col + 1, used | 1 << r);
            }
            total
        }
        rec(s, 0, 0)
    }

    #[test]
    fn ryser_matches_naive() {
        let mut rng = stream(3, &[]);
        for n in 1..=6 {
            for _ in 0..40 {
                let s = Skeleton::bernoulli(n, 0.5, &mut rng).unwrap();
                assert_eq!(count_pm(&s).unwrap(), naive_permanent(&s), "n={n}\n{}", s.format());
            }
        }
    }

    #[test]
    fn existence_agrees_with_permanent() {
        let mut rng = stream(4, &[]);
        for _ in 0..1000 {
            let s = Skeleton::bernoulli(8, 0.3, &mut rng).unwrap();
            assert_eq!(has_perfect_matching(&s), count_pm(&s).unwrap() > 0);
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_pms(&skel("11\n11")).unwrap().len(), 2);
        assert_eq!(enumerate_pms(&Skeleton::identity(4)).unwrap().len(), 1);
        let mut rng = stream(5, &[]);
        for _ in 0..50 {
            let s = Skeleton::bernoulli(5, 0.5, &mut rng).unwrap();
            assert_eq!(enumerate_pms(&s).unwrap().len() as u128, count_pm(&s).unwrap());
        }
    }

    #[test]
    fn exact_sampler_unique_pm() {
        let mut rng = stream(6, &[]);
        let m = sample_pm_exact(&Skeleton::identity(5), &mut rng).unwrap();
        assert_eq!(m.rows, vec![0, 1, 2, 3, 4]);
        assert!(matches!(
            sample_pm_exact(&Skeleton::new(2, vec![0, 0]).unwrap(), &mut rng),
            Err(Error::NoPerfectMatching)
        ));
    }

    #[test]
    fn exact_sampler_two_by_two_marginal() {
        let s = skel("11\n11");
        let mut rng = stream(7, &[]);
        let trials = 100_000;
        let mut first = 0u32;
        for _ in 0..trials {
            let m = sample_pm_exact(&s, &mut rng).unwrap();
            assert!(m.is_valid_for(&s));
            if m.rows[0] == 0 {
                first += 1;
            }
        }
        let freq = f64::from(first) / f64::from(trials);
        assert!((freq - 0.5).abs() < 0.01, "freq={freq}");
    }

    #[test]
    fn dp_sampler_agrees_with_enumeration() {
        use crate::dist::{total_variation, Distribution};
        let mut rng = stream(8, &[]);
        let s = skel("1101\n1110\n0111\n1011");
        let pms = enumerate_pms(&s).unwrap();
        let draws: Vec<Vec<usize>> =
            (0..40_000).map(|_| dp_sample(&s, &mut rng).unwrap().rows).collect();
        let emp = Distribution::empirical(
            draws,
            Some(&pms.iter().map(|m| m.rows.clone()).collect::<Vec<_>>()),
        )
        .unwrap();
        let uni =
            Distribution::uniform_over(pms.iter().map(|m| m.rows.clone())).unwrap();
        assert!(total_variation(&emp, &uni) < 0.02);
    }

    #[test]
    fn mcmc_zero_steps_is_hk_matching() {
        let s = skel("11\n11");
        let (_, hk) = max_matching(&s);
        let m = sample_pm_mcmc(&s, 0, &mut stream(9, &[])).unwrap();
        assert_eq!(m.rows, hk.into_iter().map(|r| r.unwrap()).collect::<Vec<_>>());
    }

    #[test]
    fn mcmc_two_by_two_mixes() {
        let s = skel("11\n11");
        let mut rng = stream(10, &[]);
        let mut counts = [0u32; 2];
        for _ in 0..100_000 {
            let m = sample_pm_mcmc(&s, 100, &mut rng).unwrap();
            assert!(m.is_valid_for(&s));
            counts[m.rows[0]] += 1;
        }
        let tv = (f64::from(counts[0]) / 1e5 - 0.5).abs();
        assert!(tv <= 0.02, "tv={tv}");
    }
}
