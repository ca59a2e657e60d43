//! Scramblers: ornaments on horizontal and vertical grid lines that promote
//! extra gaps of every path to (virtual) corners.
//!
//! A horizontal ornament `h` in `H ⊆ {0..m-1}` marks the gap just before the
//! `(h+1)`-th `D`; a vertical ornament `v` in `V ⊆ {1..n}` marks the gap just
//! after the `v`-th `R`. Marked gaps form a set, so a gap that is both a true
//! corner and ornament-marked counts once.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Gap, PathWord, Step, Sweep};
use crate::qpoly::BiPoly;

/// A pair of ornament sets `(H, V)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Scrambler {
    #[serde(rename = "H")]
    h: BTreeSet<usize>,
    #[serde(rename = "V")]
    v: BTreeSet<usize>,
}

impl Scrambler {
    pub fn new(h: impl IntoIterator<Item = usize>, v: impl IntoIterator<Item = usize>) -> Scrambler {
        Scrambler { h: h.into_iter().collect(), v: v.into_iter().collect() }
    }

    pub fn empty() -> Scrambler {
        Scrambler::default()
    }

    /// `({0..m-1}, ∅)`: every horizontal line ornated.
    pub fn full_horizontal(m: usize) -> Scrambler {
        Scrambler::new(0..m, [])
    }

    /// `(∅, {1..r})`.
    pub fn packed_vertical(r: usize) -> Scrambler {
        Scrambler::new([], 1..=r)
    }

    /// `({0..d-1}, ∅)`.
    pub fn packed_horizontal(d: usize) -> Scrambler {
        Scrambler::new(0..d, [])
    }

    pub fn h(&self) -> &BTreeSet<usize> {
        &self.h
    }

    pub fn v(&self) -> &BTreeSet<usize> {
        &self.v
    }

    pub fn d(&self) -> usize {
        self.h.len()
    }

    pub fn r(&self) -> usize {
        self.v.len()
    }

    /// Ornament sum `ΣH + ΣV`.
    pub fn s(&self) -> usize {
        self.h.iter().sum::<usize>() + self.v.iter().sum::<usize>()
    }

    /// `d - r`.
    pub fn difference(&self) -> i64 {
        self.d() as i64 - self.r() as i64
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty() && self.v.is_empty()
    }

    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        let bad = |reason: String| Error::ScramblerRange {
            scrambler: self.to_string(),
            m,
            n,
            reason,
        };
        if m > 63 || n > 63 {
            return Err(Error::OutOfRange(format!(
                "scrambled statistics support sides up to 63, got {m}x{n}"
            )));
        }
        if let Some(&h) = self.h.iter().find(|&&h| h >= m) {
            return Err(bad(format!("horizontal ornament {h} outside 0..={}", m as i64 - 1)));
        }
        if let Some(&v) = self.v.iter().find(|&&v| v == 0 || v > n) {
            return Err(bad(format!("vertical ornament {v} outside 1..={n}")));
        }
        Ok(())
    }

    /// The scrambler with the same difference `d - r` and smallest ornament
    /// sum: one kind of ornament only, packed against the start.
    pub fn reduced(&self) -> Scrambler {
        let (d, r) = (self.d(), self.r());
        if d >= r {
            Scrambler::packed_horizontal(d - r)
        } else {
            Scrambler::packed_vertical(r - d)
        }
    }

    pub fn is_reduced(&self) -> bool {
        *self == self.reduced()
    }

    /// The scrambler that [`PathWord::mirror`] transports this one to:
    /// `(H, V)` on `m x n` becomes `({n - v}, {m - h})` on `n x m`.
    pub fn mirror(&self, m: usize, n: usize) -> Scrambler {
        Scrambler::new(self.v.iter().map(|&v| n - v), self.h.iter().map(|&h| m - h))
    }

    pub fn with_h(&self, h: BTreeSet<usize>) -> Scrambler {
        Scrambler { h, v: self.v.clone() }
    }

    pub fn with_v(&self, v: BTreeSet<usize>) -> Scrambler {
        Scrambler { h: self.h.clone(), v }
    }

    /// All `2^m * 2^n` scramblers of the `m x n` grid.
    pub fn all(m: usize, n: usize) -> impl Iterator<Item = Scrambler> {
        (0u64..1 << m).flat_map(move |hm| {
            (0u64..1 << n).map(move |vm| {
                Scrambler::new(
                    (0..m).filter(|&i| hm >> i & 1 == 1),
                    (0..n).filter(|&i| vm >> i & 1 == 1).map(|i| i + 1),
                )
            })
        })
    }

    fn masks(&self) -> (u64, u64) {
        let hm = self.h.iter().fold(0u64, |acc, &h| acc | 1 << h);
        let vm = self.v.iter().fold(0u64, |acc, &v| acc | 1 << v);
        (hm, vm)
    }

    /// Renders the scrambler on its own grid with `w` drawn through it:
    /// marked nodes print as `@`.
    pub fn render_ascii(&self, w: &PathWord) -> Result<String> {
        let marked: Vec<usize> = marked_gaps(w, self)?.into_iter().map(|g| g.0).collect();
        let h: Vec<usize> = self.h.iter().copied().collect();
        let v: Vec<usize> = self.v.iter().copied().collect();
        Ok(lattice::render_path(w, &marked, &h, &v))
    }
}

fn fmt_set(f: &mut fmt::Formatter<'_>, set: &BTreeSet<usize>) -> fmt::Result {
    let items: Vec<String> = set.iter().map(|x| x.to_string()).collect();
    f.write_str(&items.join(","))
}

impl fmt::Display for Scrambler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("H=")?;
        fmt_set(f, &self.h)?;
        f.write_str(";V=")?;
        fmt_set(f, &self.v)
    }
}

impl FromStr for Scrambler {
    type Err = Error;

    /// Parses `H=<ints>;V=<ints>`, where either list may be empty.
    fn from_str(text: &str) -> Result<Scrambler> {
        let bad = |reason: &str| Error::ScramblerSyntax {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let parse_list = |body: &str| -> Result<Vec<usize>> {
            let body = body.trim();
            if body.is_empty() {
                return Ok(Vec::new());
            }
            body.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad(&format!("{x:?} is not a non-negative integer"))))
                .collect()
        };
        let (left, right) = text.split_once(';').ok_or_else(|| bad("expected `H=...;V=...`"))?;
        let h = left.trim().strip_prefix("H=").ok_or_else(|| bad("first part must start with `H=`"))?;
        let v = right.trim().strip_prefix("V=").ok_or_else(|| bad("second part must start with `V=`"))?;
        let (h, v) = (parse_list(h)?, parse_list(v)?);
        let sc = Scrambler::new(h.iter().copied(), v.iter().copied());
        if sc.d() != h.len() || sc.r() != v.len() {
            return Err(bad("duplicate ornament"));
        }
        Ok(sc)
    }
}

/// Bit `g` set iff gap `g` is marked. Supports words up to 127 letters.
fn mark_mask(steps: &[Step], h_mask: u64, v_mask: u64) -> u128 {
    let mut marks = 0u128;
    let (mut ds, mut rs) = (0u32, 0u32);
    let mut prev = None;
    for (i, &s) in steps.iter().enumerate() {
        match s {
            Step::D => {
                // gap i sits right before the letter at position i+1
                if h_mask >> ds & 1 == 1 || prev == Some(Step::R) {
                    marks |= 1 << i;
                }
                ds += 1;
            }
            Step::R => {
                rs += 1;
                if v_mask >> rs & 1 == 1 {
                    marks |= 1 << (i + 1);
                }
            }
        }
        prev = Some(s);
    }
    marks
}

fn mask_stats(mut marks: u128) -> (u32, u32) {
    let corners = marks.count_ones();
    let mut cindex = 0;
    while marks != 0 {
        cindex += marks.trailing_zeros();
        marks &= marks - 1;
    }
    (cindex, corners)
}

/// Scrambled `(CINDEX, CORNERS)` of a raw word; the scrambler must already
/// be valid for the word's grid.
pub(crate) fn stats_unchecked(steps: &[Step], o: &Scrambler) -> (u32, u32) {
    let (hm, vm) = o.masks();
    mask_stats(mark_mask(steps, hm, vm))
}

/// Gaps holding a true or virtual corner.
pub fn marked_gaps(w: &PathWord, o: &Scrambler) -> Result<BTreeSet<Gap>> {
    o.validate(w.m(), w.n())?;
    let (hm, vm) = o.masks();
    let mask = mark_mask(w.steps(), hm, vm);
    Ok((0..=w.len()).filter(|&g| mask >> g & 1 == 1).map(Gap).collect())
}

pub fn scrambled_corners(w: &PathWord, o: &Scrambler) -> Result<u32> {
    Ok(marked_gaps(w, o)?.len() as u32)
}

pub fn scrambled_cindex(w: &PathWord, o: &Scrambler) -> Result<u32> {
    Ok(marked_gaps(w, o)?.iter().map(|g| g.0 as u32).sum())
}

/// A path together with a scrambler and its marked gaps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrnatedPath {
    pub word: PathWord,
    pub scrambler: Scrambler,
    pub marked: BTreeSet<Gap>,
}

impl OrnatedPath {
    pub fn new(word: PathWord, scrambler: Scrambler) -> Result<OrnatedPath> {
        let marked = marked_gaps(&word, &scrambler)?;
        Ok(OrnatedPath { word, scrambler, marked })
    }

    pub fn corners(&self) -> u32 {
        self.marked.len() as u32
    }

    pub fn cindex(&self) -> u32 {
        self.marked.iter().map(|g| g.0 as u32).sum()
    }

    /// `q^cindex t^corners`.
    pub fn monomial(&self) -> BiPoly {
        BiPoly::monomial(self.cindex(), self.corners(), 1)
    }
}

/// `Σ_w q^{scrambled cindex} t^{scrambled corners}` by exhaustive enumeration.
pub fn gf_scrambled(m: usize, n: usize, o: &Scrambler, sweep: Sweep) -> Result<BiPoly> {
    o.validate(m, n)?;
    let (hm, vm) = o.masks();
    lattice::stat_gf(m, n, sweep, move |w| mask_stats(mark_mask(w, hm, vm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate;

    fn w(s: &str) -> PathWord {
        s.parse().unwrap()
    }

    fn sc(s: &str) -> Scrambler {
        s.parse().unwrap()
    }

    fn gaps(v: &[usize]) -> BTreeSet<Gap> {
        v.iter().copied().map(Gap).collect()
    }

    #[test]
    fn scrambler_derived_quantities() {
        let o = sc("H=1;V=1,3");
        assert_eq!((o.d(), o.r(), o.s(), o.difference()), (1, 2, 5, -1));
        assert_eq!(o.reduced(), sc("H=;V=1"));
        assert_eq!(sc("H=0,2;V=1").reduced(), sc("H=0;V="));
        assert!(Scrambler::empty().is_reduced());
    }

    #[test]
    fn scrambler_text_round_trip() {
        for text in ["H=0,1;V=1,3", "H=;V=", "H=2;V="] {
            assert_eq!(sc(text).to_string(), text);
        }
        assert_eq!(sc(" H=1, 0 ; V= ").to_string(), "H=0,1;V=");
    }

    #[test]
    fn scrambler_syntax_errors() {
        for text in ["H=1", "V=1;H=0", "H=a;V=", "H=1,1;V=", "H=-1;V="] {
            assert!(matches!(text.parse::<Scrambler>(), Err(Error::ScramblerSyntax { .. })), "{text}");
        }
    }

    #[test]
    fn scrambler_range_errors() {
        assert!(sc("H=2;V=").validate(2, 3).is_err());
        assert!(sc("H=;V=0").validate(2, 3).is_err());
        assert!(sc("H=;V=4").validate(2, 3).is_err());
        assert!(sc("H=1;V=3").validate(2, 3).is_ok());
        assert!(marked_gaps(&w("RD"), &sc("H=1;V=")).is_err());
    }

    #[test]
    fn scrambler_json_shape() {
        assert_eq!(serde_json::to_string(&sc("H=1;V=1,3")).unwrap(), r#"{"H":[1],"V":[1,3]}"#);
        let back: Scrambler = serde_json::from_str(r#"{"H":[],"V":[2]}"#).unwrap();
        assert_eq!(back, sc("H=;V=2"));
    }

    #[test]
    fn marked_gap_examples() {
        assert_eq!(marked_gaps(&w("RRDRRD"), &sc("H=1;V=1,3")).unwrap(), gaps(&[1, 2, 4, 5]));
        let x = w("RRDRRD");
        assert_eq!(marked_gaps(&x, &Scrambler::empty()).unwrap(), x.corner_gaps().into_iter().collect());
        assert_eq!(marked_gaps(&w("DR"), &sc("H=0;V=")).unwrap(), gaps(&[0]));
    }

    #[test]
    fn scrambled_stat_examples() {
        let o = sc("H=1;V=1,3");
        assert_eq!(scrambled_corners(&w("RRDRRD"), &o).unwrap(), 4);
        assert_eq!(scrambled_cindex(&w("RRDRRD"), &o).unwrap(), 12);
        assert_eq!(scrambled_corners(&w("RD"), &sc("H=0;V=1")).unwrap(), 1);
        assert_eq!(scrambled_cindex(&w("DR"), &sc("H=;V=1")).unwrap(), 2);
        for x in enumerate(3, 3).unwrap() {
            assert_eq!(scrambled_corners(&x, &Scrambler::empty()).unwrap(), x.corners());
            assert_eq!(scrambled_cindex(&x, &Scrambler::empty()).unwrap(), x.cindex());
        }
    }

    #[test]
    fn gf_small_examples() {
        let g = gf_scrambled(1, 1, &sc("H=0;V=1"), Sweep::serial()).unwrap();
        let mut expect = BiPoly::monomial(1, 1, 1);
        expect.add_term(2, 2, 1);
        assert_eq!(g, expect);
    }

    #[test]
    fn corners_bounded_by_ornament_count() {
        for (m, n) in [(2, 3), (3, 3), (1, 4)] {
            for o in Scrambler::all(m, n) {
                for x in enumerate(m, n).unwrap() {
                    let c = scrambled_corners(&x, &o).unwrap();
                    assert!(x.corners() <= c && c <= x.corners() + (o.d() + o.r()) as u32);
                }
            }
        }
    }

    #[test]
    fn full_scrambler_marks_every_d_predecessor_and_r_successor() {
        for m in 0..=4 {
            for n in 0..=4 {
                let o = Scrambler::new(0..m, 1..=n);
                for x in enumerate(m, n).unwrap() {
                    let mut expect = BTreeSet::new();
                    for (i, &s) in x.steps().iter().enumerate() {
                        expect.insert(Gap(if s == Step::D { i } else { i + 1 }));
                    }
                    let got = marked_gaps(&x, &o).unwrap();
                    assert_eq!(got, expect);
                    assert_eq!(scrambled_corners(&x, &o).unwrap() as usize, expect.len());
                }
            }
        }
    }

    #[test]
    fn mirror_transports_marks() {
        for (m, n) in [(2, 3), (3, 2), (3, 3)] {
            let size = m + n;
            for o in Scrambler::all(m, n) {
                let om = o.mirror(m, n);
                om.validate(n, m).unwrap();
                for x in enumerate(m, n).unwrap() {
                    let a: BTreeSet<Gap> = marked_gaps(&x, &o).unwrap();
                    let b: BTreeSet<Gap> = marked_gaps(&x.mirror(), &om).unwrap();
                    let reflected: BTreeSet<Gap> = a.iter().map(|g| Gap(size - g.0)).collect();
                    assert_eq!(b, reflected);
                }
            }
        }
    }

    #[test]
    fn all_scramblers_count() {
        assert_eq!(Scrambler::all(2, 3).count(), 32);
        assert_eq!(Scrambler::all(0, 0).count(), 1);
        for o in Scrambler::all(2, 3) {
            o.validate(2, 3).unwrap();
        }
    }

    #[test]
    fn render_ornated() {
        let pic = sc("H=1;V=1,3").render_ascii(&w("RRDRRD")).unwrap();
        let expected = "    v       v
o---@---@   .   .
        |
.   .   o---@---@ <
                |
.   .   .   .   o
";
        assert_eq!(pic, expected);
    }
}
