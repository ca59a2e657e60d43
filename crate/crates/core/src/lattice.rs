//! Monotone lattice paths on an `m x n` grid, their statistics, and an
//! exhaustive enumerator that can be sharded by word prefix.
//!
//! A path from the upper-left node `(0,0)` to the lower-right node `(m,n)`
//! is a word over `{D, R}` with exactly `m` D's and `n` R's. Positions of
//! letters are 1-indexed; gaps sit between letters and are numbered
//! `0..=m+n`, gap `g` lying after letter `g`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qpoly::BiPoly;

/// Default cap on `m + n` for exhaustive enumeration.
pub const DEFAULT_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    D,
    R,
}

impl Step {
    pub fn as_char(self) -> char {
        match self {
            Step::D => 'D',
            Step::R => 'R',
        }
    }

    pub fn flip(self) -> Step {
        match self {
            Step::D => Step::R,
            Step::R => Step::D,
        }
    }
}

/// A gap index: `0` is before the first letter, `m+n` after the last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gap(pub usize);

/// A monotone path as a word over `{D, R}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathWord {
    m: usize,
    n: usize,
    steps: Vec<Step>,
}

impl PathWord {
    pub fn from_steps(steps: Vec<Step>) -> PathWord {
        let m = steps.iter().filter(|&&s| s == Step::D).count();
        let n = steps.len() - m;
        PathWord { m, n, steps }
    }

    /// Parses a word and checks it lives on the `m x n` grid.
    pub fn parse_on(s: &str, m: usize, n: usize) -> Result<PathWord> {
        let w: PathWord = s.parse()?;
        if w.m != m || w.n != n {
            return Err(Error::InvalidWord {
                word: s.to_string(),
                reason: format!("has {} D's and {} R's, expected {m} and {n}", w.m, w.n),
            });
        }
        Ok(w)
    }

    /// `D^m R^n`, the path of zero area.
    pub fn minimal(m: usize, n: usize) -> PathWord {
        let mut steps = vec![Step::D; m];
        steps.resize(m + n, Step::R);
        PathWord { m, n, steps }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn dees(&self) -> u32 {
        dees(&self.steps)
    }

    pub fn area(&self) -> u32 {
        area(&self.steps)
    }

    pub fn corners(&self) -> u32 {
        corner_gaps(&self.steps).count() as u32
    }

    pub fn cindex(&self) -> u32 {
        corner_gaps(&self.steps).map(|g| g as u32).sum()
    }

    /// Gaps holding a true corner (an `R` followed by a `D`).
    pub fn corner_gaps(&self) -> Vec<Gap> {
        corner_gaps(&self.steps).map(Gap).collect()
    }

    pub fn square_side(&self) -> u32 {
        square_side(&self.steps, self.m, self.n)
    }

    /// Exchanges the letters on either side of gap `g`.
    pub fn swap(&self, g: Gap) -> Result<PathWord> {
        let Gap(g) = g;
        let bad = |reason: &str| Error::InvalidSwap {
            word: self.to_string(),
            gap: g,
            reason: reason.to_string(),
        };
        if g == 0 || g >= self.len() {
            return Err(bad("gap must lie strictly inside the word"));
        }
        if self.steps[g - 1] == self.steps[g] {
            return Err(bad("letters around the gap are equal"));
        }
        let mut steps = self.steps.clone();
        steps.swap(g - 1, g);
        Ok(PathWord { m: self.m, n: self.n, steps })
    }

    /// Applies DEES-decreasing swaps (always the leftmost `RD`) until the
    /// word is `D^m R^n`; returns the number of swaps.
    pub fn greedy_descent(&self) -> u32 {
        let mut steps = self.steps.clone();
        let mut count = 0;
        while let Some(i) = steps.windows(2).position(|p| p == [Step::R, Step::D]) {
            steps.swap(i, i + 1);
            count += 1;
        }
        debug_assert_eq!(steps, PathWord::minimal(self.m, self.n).steps);
        count
    }

    /// Mirror image: reverse the word and exchange `D` with `R`. Maps the
    /// `m x n` grid onto the `n x m` grid, keeps corners, and sends a corner
    /// at gap `g` to gap `m+n-g`.
    pub fn mirror(&self) -> PathWord {
        PathWord {
            m: self.n,
            n: self.m,
            steps: self.steps.iter().rev().map(|s| s.flip()).collect(),
        }
    }

    /// Position (1-indexed) of the `k`-th occurrence of `letter`, `k >= 1`.
    pub fn position_of(&self, letter: Step, k: usize) -> Option<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == letter)
            .nth(k.checked_sub(1)?)
            .map(|(i, _)| i + 1)
    }

    /// ASCII drawing: `o` for nodes on the path, `.` elsewhere.
    pub fn render_ascii(&self) -> String {
        render_path(self, &[], &[], &[])
    }
}

/// Draws `w`. Nodes reached after `g` steps with `g` in `marked` print as `@`;
/// `h_lines` get a `<` at their right end, `v_lines` a `v` above them.
pub(crate) fn render_path(w: &PathWord, marked: &[usize], h_lines: &[usize], v_lines: &[usize]) -> String {
    let (m, n) = (w.m, w.n);
    // node_at[i][j] = Some(g) when the path visits (i,j) after g steps
    let mut node_at = vec![vec![None; n + 1]; m + 1];
    let mut right = vec![vec![false; n]; m + 1];
    let mut down = vec![vec![false; n + 1]; m];
    let (mut i, mut j) = (0, 0);
    node_at[0][0] = Some(0);
    for (k, s) in w.steps.iter().enumerate() {
        match s {
            Step::R => {
                right[i][j] = true;
                j += 1;
            }
            Step::D => {
                down[i][j] = true;
                i += 1;
            }
        }
        node_at[i][j] = Some(k + 1);
    }
    let mut out = String::new();
    if !v_lines.is_empty() {
        let mut line = String::new();
        for col in 0..=n {
            line.push(if v_lines.contains(&col) { 'v' } else { ' ' });
            if col < n {
                line.push_str("   ");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for row in 0..=m {
        let mut line = String::new();
        for col in 0..=n {
            line.push(match node_at[row][col] {
                Some(g) if marked.contains(&g) => '@',
                Some(_) => 'o',
                None => '.',
            });
            if col < n {
                line.push_str(if right[row][col] { "---" } else { "   " });
            }
        }
        if h_lines.contains(&row) {
            line.push_str(" <");
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if row < m {
            let mut line = String::new();
            for col in 0..=n {
                line.push(if down[row][col] { '|' } else { ' ' });
                if col < n {
                    line.push_str("   ");
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
    out
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PathWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<PathWord> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                'D' | 'd' => Ok(Step::D),
                'R' | 'r' => Ok(Step::R),
                other => Err(Error::InvalidWord {
                    word: s.to_string(),
                    reason: format!("unexpected letter {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PathWord::from_steps(steps))
    }
}

impl Serialize for PathWord {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PathWord {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Statistics on raw step slices
// ---------------------------------------------------------------------------

pub(crate) fn dees(steps: &[Step]) -> u32 {
    steps
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == Step::D)
        .map(|(i, _)| i as u32 + 1)
        .sum()
}

/// Squares below the path: each `D` contributes the number of `R`s before it.
pub(crate) fn area(steps: &[Step]) -> u32 {
    let mut rights = 0;
    let mut total = 0;
    for s in steps {
        match s {
            Step::R => rights += 1,
            Step::D => total += rights,
        }
    }
    total
}

pub(crate) fn corner_gaps(steps: &[Step]) -> impl Iterator<Item = usize> + '_ {
    steps
        .windows(2)
        .enumerate()
        .filter(|(_, p)| *p == [Step::R, Step::D])
        .map(|(i, _)| i + 1)
}

/// Side of the largest square anchored at the bottom-left node `(m,0)`
/// lying under the path.
pub(crate) fn square_side(steps: &[Step], m: usize, n: usize) -> u32 {
    // rights_before[i]: number of R's before the (i+1)-th D, nondecreasing in i
    let mut rights_before = Vec::with_capacity(m);
    let mut rights = 0;
    for s in steps {
        match s {
            Step::R => rights += 1,
            Step::D => rights_before.push(rights),
        }
    }
    (1..=m.min(n))
        .take_while(|&k| rights_before[m - k] >= k)
        .last()
        .unwrap_or(0) as u32
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

pub fn check_limit(m: usize, n: usize, limit: usize) -> Result<()> {
    if m + n > limit {
        Err(Error::LimitExceeded { m, n, limit })
    } else {
        Ok(())
    }
}

/// Rearranges `s` into the next word in lexicographic order (`D < R`).
/// Returns `false` once `s` is the last word.
fn next_word(s: &mut [Step]) -> bool {
    let Some(i) = s.windows(2).rposition(|p| p[0] < p[1]) else {
        return false;
    };
    let j = s.iter().rposition(|&x| x > s[i]).expect("a larger letter exists");
    s.swap(i, j);
    s[i + 1..].reverse();
    true
}

/// Lexicographic iterator over all words with a given prefix.
#[derive(Clone, Debug)]
pub struct Paths {
    m: usize,
    n: usize,
    prefix_len: usize,
    current: Option<Vec<Step>>,
}

impl Iterator for Paths {
    type Item = PathWord;

    fn next(&mut self) -> Option<PathWord> {
        let cur = self.current.as_mut()?;
        let out = PathWord { m: self.m, n: self.n, steps: cur.clone() };
        if !next_word(&mut cur[self.prefix_len..]) {
            self.current = None;
        }
        Some(out)
    }
}

/// Every word of the `m x n` grid, in lexicographic order with `D < R`.
pub fn enumerate(m: usize, n: usize) -> Result<Paths> {
    enumerate_with_limit(m, n, DEFAULT_LIMIT)
}

pub fn enumerate_with_limit(m: usize, n: usize, limit: usize) -> Result<Paths> {
    check_limit(m, n, limit)?;
    Ok(completions(m, n, &[]).expect("empty prefix is always valid"))
}

/// All completions of `prefix` on the `m x n` grid, in lexicographic order;
/// `None` when the prefix uses too many of either letter.
pub fn completions(m: usize, n: usize, prefix: &[Step]) -> Option<Paths> {
    let pd = prefix.iter().filter(|&&s| s == Step::D).count();
    let pr = prefix.len() - pd;
    if pd > m || pr > n {
        return None;
    }
    let mut steps = prefix.to_vec();
    steps.extend(std::iter::repeat_n(Step::D, m - pd));
    steps.extend(std::iter::repeat_n(Step::R, n - pr));
    Some(Paths { m, n, prefix_len: prefix.len(), current: Some(steps) })
}

/// Every admissible prefix of length `min(len, m+n)`, lexicographically.
/// The completions of these prefixes partition the grid's words.
pub fn prefixes(m: usize, n: usize, len: usize) -> Vec<Vec<Step>> {
    fn go(m: usize, n: usize, left: usize, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if m > 0 {
            cur.push(Step::D);
            go(m - 1, n, left - 1, cur, out);
            cur.pop();
        }
        if n > 0 {
            cur.push(Step::R);
            go(m, n - 1, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, n, len.min(m + n), &mut Vec::new(), &mut out);
    out
}

/// Visits every completion of `prefix` without allocating per word.
pub(crate) fn for_each_completion(m: usize, n: usize, prefix: &[Step], mut f: impl FnMut(&[Step])) {
    let Some(paths) = completions(m, n, prefix) else {
        return;
    };
    let mut cur = paths.current.expect("fresh iterator");
    let k = prefix.len();
    loop {
        f(&cur);
        if !next_word(&mut cur[k..]) {
            break;
        }
    }
}

/// Options for an exhaustive generating-function computation.
#[derive(Clone, Copy, Debug)]
pub struct Sweep {
    pub limit: usize,
    /// Worker threads; `0` or `1` runs serially on the calling thread.
    pub jobs: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep { limit: DEFAULT_LIMIT, jobs: 1 }
    }
}

impl Sweep {
    pub fn serial() -> Self {
        Sweep::default()
    }

    pub fn with_jobs(jobs: usize) -> Self {
        Sweep { jobs, ..Sweep::default() }
    }
}

fn tally(m: usize, n: usize, prefix: &[Step], stat: &(impl Fn(&[Step]) -> (u32, u32) + Sync)) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    for_each_completion(m, n, prefix, |w| {
        *counts.entry(stat(w)).or_insert(0u64) += 1;
    });
    counts
}

fn to_poly(counts: HashMap<(u32, u32), u64>) -> BiPoly {
    let mut p = BiPoly::zero();
    for ((q, t), c) in counts {
        p.add_term(q, t, c);
    }
    p
}

/// `Σ_w q^a t^b` over all words, where `(a, b) = stat(w)`.
///
/// With `jobs > 1` the words are sharded by prefix across a dedicated
/// thread pool and the per-shard polynomials are summed; the result is the
/// same polynomial as a serial run.
pub fn stat_gf(m: usize, n: usize, sweep: Sweep, stat: impl Fn(&[Step]) -> (u32, u32) + Sync) -> Result<BiPoly> {
    check_limit(m, n, sweep.limit)?;
    if sweep.jobs <= 1 {
        return Ok(to_poly(tally(m, n, &[], &stat)));
    }
    let shards = prefixes(m, n, 10);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<BiPoly> = pool.install(|| {
        shards
            .par_iter()
            .map(|p| to_poly(tally(m, n, p, &stat)))
            .collect()
    });
    Ok(parts.iter().fold(BiPoly::zero(), |acc, p| acc.add(p)))
}

/// `Σ_w q^area(w)`.
pub fn area_gf(m: usize, n: usize, sweep: Sweep) -> Result<BiPoly> {
    stat_gf(m, n, sweep, |w| (area(w), 0))
}

/// `Σ_w q^cindex(w) t^corners(w)` for unornated paths.
pub fn cindex_corners_gf(m: usize, n: usize, sweep: Sweep) -> Result<BiPoly> {
    stat_gf(m, n, sweep, |w| {
        let (mut ci, mut co) = (0, 0);
        for g in corner_gaps(w) {
            ci += g as u32;
            co += 1;
        }
        (ci, co)
    })
}

/// `Σ_w q^area(w) t^square_side(w)`.
pub fn area_square_gf(m: usize, n: usize, sweep: Sweep) -> Result<BiPoly> {
    stat_gf(m, n, sweep, move |w| (area(w), square_side(w, m, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PathWord {
        s.parse().unwrap()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(2, 4).unwrap().count(), 15);
        let only: Vec<_> = enumerate(0, 3).unwrap().collect();
        assert_eq!(only, vec![w("RRR")]);
        let all: Vec<_> = enumerate(3, 3).unwrap().collect();
        assert_eq!(all.len(), 20);
        assert_eq!(all[0], w("DDDRRR"));
        assert_eq!(all[19], w("RRRDDD"));
        assert!(all.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(enumerate(0, 0).unwrap().count(), 1);
    }

    #[test]
    fn enumerate_refuses_beyond_limit() {
        let err = enumerate(13, 12).unwrap_err();
        assert!(matches!(err, Error::LimitExceeded { m: 13, n: 12, limit: 24 }));
        assert!(err.to_string().contains("exceeds the limit"));
        assert!(enumerate_with_limit(13, 12, 25).is_ok());
    }

    #[test]
    fn prefix_shards_concatenate_to_serial_order() {
        for (m, n) in [(3, 3), (2, 5), (4, 1), (0, 2)] {
            let serial: Vec<_> = enumerate(m, n).unwrap().collect();
            for len in 0..=m + n + 1 {
                let sharded: Vec<_> = prefixes(m, n, len)
                    .iter()
                    .flat_map(|p| completions(m, n, p).unwrap())
                    .collect();
                assert_eq!(sharded, serial, "m={m} n={n} len={len}");
            }
        }
        assert!(completions(1, 1, &[Step::D, Step::D]).is_none());
    }

    #[test]
    fn dees_examples() {
        assert_eq!(w("DDRRRR").dees(), 3);
        assert_eq!(PathWord::minimal(5, 2).dees(), 15);
        assert_eq!(w("RRRRDD").dees(), 11);
    }

    #[test]
    fn area_examples() {
        assert_eq!(PathWord::minimal(3, 4).area(), 0);
        assert_eq!(w("RRRRDD").area(), 8);
        assert_eq!(w("RRDRRD").area(), 6);
    }

    #[test]
    fn corner_and_cindex_examples() {
        assert_eq!(PathWord::minimal(2, 4).corners(), 0);
        assert_eq!(w("RRDRRD").corners(), 2);
        assert_eq!(w("RDRDRD").corners(), 3);
        assert_eq!(w("RRDRRD").cindex(), 7);
        assert_eq!(PathWord::minimal(2, 4).cindex(), 0);
        assert_eq!(w("RRRRDD").cindex(), 4);
        assert_eq!(w("RRDRRD").corner_gaps(), vec![Gap(2), Gap(5)]);
    }

    #[test]
    fn square_side_examples() {
        assert_eq!(PathWord::minimal(2, 4).square_side(), 0);
        assert_eq!(w("RRRRDD").square_side(), 2);
        assert_eq!(w("RDRRRD").square_side(), 1);
        assert_eq!(w("RRRDDD").square_side(), 3);
        assert_eq!(w("RDRDRD").square_side(), 2);
    }

    #[test]
    fn swap_examples() {
        assert_eq!(w("RD").swap(Gap(1)).unwrap(), w("DR"));
        let x = w("RRDRRD");
        assert_eq!(x.swap(Gap(2)).unwrap().swap(Gap(2)).unwrap(), x);
        assert!(x.swap(Gap(0)).is_err());
        assert!(x.swap(Gap(6)).is_err());
        assert!(matches!(x.swap(Gap(1)), Err(Error::InvalidSwap { gap: 1, .. })));
    }

    #[test]
    fn swaps_move_dees_and_area_together() {
        for x in enumerate(3, 3).unwrap() {
            for g in 1..x.len() {
                if let Ok(y) = x.swap(Gap(g)) {
                    let dd = y.dees() as i64 - x.dees() as i64;
                    let da = y.area() as i64 - x.area() as i64;
                    assert_eq!(dd.abs(), 1);
                    assert_eq!(dd, da);
                }
            }
        }
    }

    #[test]
    fn greedy_descent_examples() {
        assert_eq!(PathWord::minimal(3, 2).greedy_descent(), 0);
        assert_eq!(w("RRRRDD").greedy_descent(), 8);
        for x in enumerate(3, 3).unwrap() {
            assert_eq!(x.greedy_descent(), x.area());
        }
    }

    #[test]
    fn mirror_keeps_corners_and_reflects_gaps() {
        for x in enumerate(3, 2).unwrap() {
            let y = x.mirror();
            assert_eq!((y.m(), y.n()), (2, 3));
            assert_eq!(y.corners(), x.corners());
            assert_eq!(y.cindex(), 5 * x.corners() - x.cindex());
            assert_eq!(y.mirror(), x);
        }
    }

    #[test]
    fn parse_rejects_bad_letters_and_dimensions() {
        assert!("RXD".parse::<PathWord>().is_err());
        assert!(PathWord::parse_on("RRD", 2, 1).is_err());
        assert!(PathWord::parse_on("RRD", 1, 2).is_ok());
    }

    #[test]
    fn ascii_rendering() {
        let pic = w("RRDRRD").render_ascii();
        let expected = "\
o---o---o   .   .
        |
.   .   o---o---o
                |
.   .   .   .   o
";
        assert_eq!(pic, expected);
    }

    #[test]
    fn parallel_gf_matches_serial() {
        let serial = cindex_corners_gf(5, 6, Sweep::serial()).unwrap();
        let par = cindex_corners_gf(5, 6, Sweep::with_jobs(4)).unwrap();
        assert_eq!(serial, par);
        assert_eq!(serial.to_json(), par.to_json());
    }
}
