//! Explicit bijections between differently ornated copies of a grid.
//!
//! Each map splits the words of the grid into classes whose members differ
//! only in where one "floating" letter sits inside a run ("sea") of the
//! other letter. Inside a class, the words are listed in two linear orders,
//! one for the source scrambler and one for the target, and the map pairs
//! words of equal index:
//!
//! * source order: type 1 (floating letter faces an ornated sea letter,
//!   listed with the floating letter moving right to left), then the type 3
//!   word, then type 2 (faces a plain sea letter, listed left to right),
//!   then the type 4 word;
//! * target order: the type 4 word first, followed by types 1, 3, 2 as above.
//!
//! Type 3 is the word whose floating letter is adjacent to the class's
//! fixed boundary; type 4 the one whose floating letter ends the sea.
//! A class whose sea is empty has a single word, mapped to itself.
//!
//! The horizontal shift is the conjugate of the inverse vertical shift by
//! [`PathWord::mirror`].

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{PathWord, Step};
use crate::scramble::{scrambled_cindex, scrambled_corners, Scrambler};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaKind {
    /// Removes the ornament pair `0 ∈ H`, `1 ∈ V`.
    PairCancel,
    /// Moves a vertical ornament from `v` to `v - 1`.
    ShiftV,
    /// Moves a horizontal ornament from `h` to `h - 1`.
    ShiftH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassType {
    /// Both sea parts nonempty; the floating letter faces an ornated letter.
    One,
    /// Both sea parts nonempty; the floating letter faces a plain letter.
    Two,
    /// The floating letter sits next to the fixed boundary.
    Three,
    /// The floating letter ends the sea.
    Four,
    /// Empty sea: the class has one word.
    Singleton,
}

impl ClassType {
    pub fn tag(self) -> u8 {
        match self {
            ClassType::One => 1,
            ClassType::Two => 2,
            ClassType::Three => 3,
            ClassType::Four => 4,
            ClassType::Singleton => 0,
        }
    }
}

/// A word split around its floating letter.
///
/// For the pair cancellation and vertical shift the word reads
/// `u [R] a R* b v` (the bracketed fixed `R` is absent for the pair
/// cancellation, `R*` is floating, `a b` are `D`s, `v` empty or starting with
/// `R`). For the horizontal shift the word reads `u a D* b D v`, with `a b`
/// made of `R`s and the fixed `D` to the right of the floating one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassDecomposition {
    pub kind: LemmaKind,
    pub u: String,
    pub a: String,
    pub b: String,
    pub v: String,
    #[serde(rename = "type")]
    pub class_type: ClassType,
}

impl ClassDecomposition {
    /// Concatenates the segments back into the word.
    pub fn reassemble(&self) -> String {
        match self.kind {
            LemmaKind::PairCancel => format!("{}{}R{}{}", self.u, self.a, self.b, self.v),
            LemmaKind::ShiftV => format!("{}R{}R{}{}", self.u, self.a, self.b, self.v),
            LemmaKind::ShiftH => format!("{}{}D{}D{}", self.u, self.a, self.b, self.v),
        }
    }
}

/// Audit record of one application of a lemma map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionTrace {
    pub kind: LemmaKind,
    pub source_word: PathWord,
    pub source_scrambler: Scrambler,
    pub target_word: PathWord,
    pub target_scrambler: Scrambler,
    pub source_class: ClassDecomposition,
    pub target_class: ClassDecomposition,
    pub class_size: usize,
    pub source_index: usize,
    pub target_index: usize,
    pub delta_cindex: i64,
    pub delta_corners: i64,
}

/// A class of words `prefix · [fixed] · D^i R D^(sea-i) · suffix`, in the
/// vertical (`R` floating in a sea of `D`s) orientation.
#[derive(Clone, Debug)]
struct FloatingClass {
    prefix: Vec<Step>,
    fixed: bool,
    sea: usize,
    suffix: Vec<Step>,
    /// Sea letters `k` (0-based) carrying a horizontal ornament.
    ornated: Vec<bool>,
}

impl FloatingClass {
    fn word(&self, i: usize) -> PathWord {
        let mut steps = self.prefix.clone();
        if self.fixed {
            steps.push(Step::R);
        }
        steps.extend(std::iter::repeat_n(Step::D, i));
        steps.push(Step::R);
        steps.extend(std::iter::repeat_n(Step::D, self.sea - i));
        steps.extend_from_slice(&self.suffix);
        PathWord::from_steps(steps)
    }

    fn class_type(&self, i: usize) -> ClassType {
        if self.sea == 0 {
            ClassType::Singleton
        } else if i == 0 {
            ClassType::Three
        } else if i == self.sea {
            ClassType::Four
        } else if self.ornated[i] {
            ClassType::One
        } else {
            ClassType::Two
        }
    }

    fn types_in(&self, t: ClassType) -> impl Iterator<Item = usize> + '_ {
        (0..=self.sea).filter(move |&i| self.class_type(i) == t)
    }

    /// `(source order, target order)` of floating positions.
    fn orders(&self) -> (Vec<usize>, Vec<usize>) {
        if self.sea == 0 {
            return (vec![0], vec![0]);
        }
        let mut body: Vec<usize> = self.types_in(ClassType::One).collect();
        body.reverse();
        body.push(0);
        body.extend(self.types_in(ClassType::Two));
        let mut source = body.clone();
        source.push(self.sea);
        let mut target = vec![self.sea];
        target.extend(body);
        (source, target)
    }

    fn decomposition(&self, kind: LemmaKind, i: usize) -> ClassDecomposition {
        let text = |s: &[Step]| s.iter().map(|x| x.as_char()).collect::<String>();
        ClassDecomposition {
            kind,
            u: text(&self.prefix),
            a: "D".repeat(i),
            b: "D".repeat(self.sea - i),
            v: text(&self.suffix),
            class_type: self.class_type(i),
        }
    }
}

/// Splits `w` around its `float`-th `R` (1-indexed); with `fixed` the
/// preceding `R` bounds the sea on the left, otherwise the sea starts at the
/// beginning of the word. Returns the class and the floating position.
fn split_vertical(w: &PathWord, o: &Scrambler, float: usize, fixed: bool) -> (FloatingClass, usize) {
    let steps = w.steps();
    let float_pos = w.position_of(Step::R, float).expect("floating R exists") - 1;
    let start = if fixed {
        w.position_of(Step::R, float - 1).expect("fixed R exists")
    } else {
        0
    };
    let end = w.position_of(Step::R, float + 1).map_or(steps.len(), |p| p - 1);
    let prefix_end = if fixed { start - 1 } else { 0 };
    let prefix = steps[..prefix_end].to_vec();
    let d_before = prefix.iter().filter(|&&s| s == Step::D).count();
    let sea = end - start - 1;
    let ornated = (0..sea).map(|k| o.h().contains(&(d_before + k))).collect();
    let class = FloatingClass {
        prefix,
        fixed,
        sea,
        suffix: steps[end..].to_vec(),
        ornated,
    };
    (class, float_pos - start)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

struct Mapped {
    target: PathWord,
    source_class: ClassDecomposition,
    target_class: ClassDecomposition,
    class_size: usize,
    index: usize,
}

fn map_in_class(kind: LemmaKind, class: &FloatingClass, i: usize, dir: Direction) -> Mapped {
    let (source, target) = class.orders();
    let (from, to) = match dir {
        Direction::Forward => (&source, &target),
        Direction::Backward => (&target, &source),
    };
    let index = from.iter().position(|&x| x == i).expect("position belongs to class");
    let j = to[index];
    Mapped {
        target: class.word(j),
        source_class: class.decomposition(kind, i),
        target_class: class.decomposition(kind, j),
        class_size: class.sea + 1,
        index,
    }
}

fn check_grid(w: &PathWord, o: &Scrambler) -> Result<()> {
    o.validate(w.m(), w.n())
}

fn trace(kind: LemmaKind, w: &PathWord, o: &Scrambler, o2: Scrambler, mapped: Mapped) -> Result<BijectionTrace> {
    let ci = |x: &PathWord, s: &Scrambler| scrambled_cindex(x, s).map(i64::from);
    let co = |x: &PathWord, s: &Scrambler| scrambled_corners(x, s).map(i64::from);
    Ok(BijectionTrace {
        kind,
        delta_cindex: ci(&mapped.target, &o2)? - ci(w, o)?,
        delta_corners: co(&mapped.target, &o2)? - co(w, o)?,
        source_word: w.clone(),
        source_scrambler: o.clone(),
        target_word: mapped.target,
        target_scrambler: o2,
        source_class: mapped.source_class,
        target_class: mapped.target_class,
        class_size: mapped.class_size,
        source_index: mapped.index,
        target_index: mapped.index,
    })
}

/// Pair cancellation: `(H, V)` with `0 ∈ H`, `1 ∈ V` to `(H∖{0}, V∖{1})`,
/// lowering both scrambled statistics by one.
pub fn lemma2_trace(w: &PathWord, o: &Scrambler) -> Result<BijectionTrace> {
    check_grid(w, o)?;
    if !o.h().contains(&0) || !o.v().contains(&1) {
        return Err(Error::Precondition(format!(
            "pair cancellation needs 0 in H and 1 in V, got {o}"
        )));
    }
    let mut h = o.h().clone();
    h.remove(&0);
    let mut v = o.v().clone();
    v.remove(&1);
    let o2 = Scrambler::new(h, v);
    let (class, i) = split_vertical(w, o, 1, false);
    let mapped = map_in_class(LemmaKind::PairCancel, &class, i, Direction::Forward);
    trace(LemmaKind::PairCancel, w, o, o2, mapped)
}

pub fn lemma2_map(w: &PathWord, o: &Scrambler) -> Result<(PathWord, Scrambler)> {
    let t = lemma2_trace(w, o)?;
    Ok((t.target_word, t.target_scrambler))
}

fn shift_v_preconditions(w: &PathWord, o: &Scrambler, v: usize) -> Result<BTreeSet<usize>> {
    check_grid(w, o)?;
    if !o.v().contains(&v) {
        return Err(Error::Precondition(format!("{v} is not a vertical ornament of {o}")));
    }
    if v < 2 || o.v().contains(&(v - 1)) {
        return Err(Error::Precondition(format!(
            "vertical ornament {v} cannot move down: needs v >= 2 and v-1 free in {o}"
        )));
    }
    let mut vs = o.v().clone();
    vs.remove(&v);
    vs.insert(v - 1);
    Ok(vs)
}

/// Vertical shift: moves the ornament `v` of `V` to `v - 1`, keeping the
/// scrambled corner count and lowering the scrambled c-index by one.
pub fn lemma2v_trace(w: &PathWord, o: &Scrambler, v: usize) -> Result<BijectionTrace> {
    let vs = shift_v_preconditions(w, o, v)?;
    let o2 = o.with_v(vs);
    let (class, i) = split_vertical(w, o, v, true);
    let mapped = map_in_class(LemmaKind::ShiftV, &class, i, Direction::Forward);
    trace(LemmaKind::ShiftV, w, o, o2, mapped)
}

pub fn lemma2v_map(w: &PathWord, o: &Scrambler, v: usize) -> Result<(PathWord, Scrambler)> {
    let t = lemma2v_trace(w, o, v)?;
    Ok((t.target_word, t.target_scrambler))
}

fn mirror_decomposition(d: ClassDecomposition) -> ClassDecomposition {
    let flip = |s: &str| -> String {
        s.chars()
            .rev()
            .map(|c| if c == 'D' { 'R' } else { 'D' })
            .collect()
    };
    // mirror of `u R a R* b v` is `φ(v) φ(b) D* φ(a) D φ(u)`
    ClassDecomposition {
        kind: LemmaKind::ShiftH,
        u: flip(&d.v),
        a: flip(&d.b),
        b: flip(&d.a),
        v: flip(&d.u),
        class_type: d.class_type,
    }
}

/// Horizontal shift: moves the ornament `h` of `H` to `h - 1`, keeping the
/// scrambled corner count and lowering the scrambled c-index by one.
pub fn lemma2h_trace(w: &PathWord, o: &Scrambler, h: usize) -> Result<BijectionTrace> {
    check_grid(w, o)?;
    if !o.h().contains(&h) {
        return Err(Error::Precondition(format!("{h} is not a horizontal ornament of {o}")));
    }
    if h < 1 || o.h().contains(&(h - 1)) {
        return Err(Error::Precondition(format!(
            "horizontal ornament {h} cannot move down: needs h >= 1 and h-1 free in {o}"
        )));
    }
    let (m, n) = (w.m(), w.n());
    let mut hs = o.h().clone();
    hs.remove(&h);
    hs.insert(h - 1);
    let o2 = o.with_h(hs);

    // In the mirror, `o2` carries vertical ornament m-h+1 and `o` carries
    // m-h: the inverse of the vertical shift of `o2` at m-h+1.
    let wm = w.mirror();
    let om2 = o2.mirror(m, n);
    let (class, i) = split_vertical(&wm, &om2, m - h + 1, true);
    let mapped = map_in_class(LemmaKind::ShiftV, &class, i, Direction::Backward);
    let mapped = Mapped {
        target: mapped.target.mirror(),
        source_class: mirror_decomposition(mapped.source_class),
        target_class: mirror_decomposition(mapped.target_class),
        ..mapped
    };
    trace(LemmaKind::ShiftH, w, o, o2, mapped)
}

pub fn lemma2h_map(w: &PathWord, o: &Scrambler, h: usize) -> Result<(PathWord, Scrambler)> {
    let t = lemma2h_trace(w, o, h)?;
    Ok((t.target_word, t.target_scrambler))
}

/// One step of an unscrambling plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum ChainStep {
    PairCancel,
    ShiftV { from: usize },
    ShiftH { from: usize },
}

impl ChainStep {
    pub fn apply_to_scrambler(&self, o: &Scrambler) -> Scrambler {
        match *self {
            ChainStep::PairCancel => {
                let mut h = o.h().clone();
                h.remove(&0);
                let mut v = o.v().clone();
                v.remove(&1);
                Scrambler::new(h, v)
            }
            ChainStep::ShiftV { from } => {
                let mut v = o.v().clone();
                v.remove(&from);
                v.insert(from - 1);
                o.with_v(v)
            }
            ChainStep::ShiftH { from } => {
                let mut h = o.h().clone();
                h.remove(&from);
                h.insert(from - 1);
                o.with_h(h)
            }
        }
    }

    pub fn trace(&self, w: &PathWord, o: &Scrambler) -> Result<BijectionTrace> {
        match *self {
            ChainStep::PairCancel => lemma2_trace(w, o),
            ChainStep::ShiftV { from } => lemma2v_trace(w, o, from),
            ChainStep::ShiftH { from } => lemma2h_trace(w, o, from),
        }
    }
}

/// Plan reducing `o` to [`Scrambler::reduced`]: while both kinds of
/// ornament remain, bring the smallest horizontal one down to `0` and the
/// smallest vertical one down to `1`, then cancel the pair; finally pack
/// the surviving ornaments downward, smallest first.
pub fn unscramble_chain(o: &Scrambler) -> Vec<ChainStep> {
    let mut plan = Vec::new();
    let mut cur = o.clone();
    let mut push = |step: ChainStep, cur: &mut Scrambler| {
        *cur = step.apply_to_scrambler(cur);
        plan.push(step);
    };
    while !cur.h().is_empty() && !cur.v().is_empty() {
        let h = *cur.h().iter().next().unwrap();
        for from in (1..=h).rev() {
            push(ChainStep::ShiftH { from }, &mut cur);
        }
        let v = *cur.v().iter().next().unwrap();
        for from in (2..=v).rev() {
            push(ChainStep::ShiftV { from }, &mut cur);
        }
        push(ChainStep::PairCancel, &mut cur);
    }
    let hs: Vec<usize> = cur.h().iter().copied().collect();
    for (slot, h) in hs.into_iter().enumerate() {
        for from in (slot + 1..=h).rev() {
            push(ChainStep::ShiftH { from }, &mut cur);
        }
    }
    let vs: Vec<usize> = cur.v().iter().copied().collect();
    for (slot, v) in vs.into_iter().enumerate() {
        for from in (slot + 2..=v).rev() {
            push(ChainStep::ShiftV { from }, &mut cur);
        }
    }
    debug_assert!(cur.is_reduced());
    plan
}

/// Runs the whole chain on one word, returning every intermediate trace.
pub fn apply_chain(w: &PathWord, o: &Scrambler) -> Result<Vec<BijectionTrace>> {
    let mut word = w.clone();
    let mut sc = o.clone();
    let mut out = Vec::new();
    for step in unscramble_chain(o) {
        let t = step.trace(&word, &sc)?;
        word = t.target_word.clone();
        sc = t.target_scrambler.clone();
        out.push(t);
    }
    Ok(out)
}

/// Composite image of `w` under the chain, with the reduced scrambler.
pub fn unscramble(w: &PathWord, o: &Scrambler) -> Result<(PathWord, Scrambler)> {
    check_grid(w, o)?;
    let traces = apply_chain(w, o)?;
    Ok(match traces.last() {
        Some(t) => (t.target_word.clone(), t.target_scrambler.clone()),
        None => (w.clone(), o.clone()),
    })
}

/// Words of the `m x n` grid with exactly `c` corners under `(∅, {1..r})`,
/// rebuilt in two stages from `R̊^r R^(n-r)`: first `c-r` single `D`s are
/// placed after distinct plain `R`s (creating the true corners), then the
/// other `D`s are distributed at the start and after every ornated `R` and
/// every new `RD`, where they add no corner.
pub fn prop3_construct(m: usize, n: usize, r: usize, c: usize) -> Result<Vec<PathWord>> {
    if r > n {
        return Err(Error::Precondition(format!("r = {r} exceeds n = {n}")));
    }
    if c < r {
        return Err(Error::Precondition(format!("c = {c} is below r = {r}")));
    }
    let ell = c - r;
    let plain = n - r;
    let mut out = Vec::new();
    if ell > m || ell > plain {
        return Ok(out);
    }
    let rest = m - ell;
    let bins = r + ell + 1;
    for chosen in combinations(plain, ell) {
        for comp in compositions(rest, bins) {
            let mut steps = Vec::with_capacity(m + n);
            let mut bin = comp.iter();
            let put = |steps: &mut Vec<Step>, k: usize| steps.extend(std::iter::repeat_n(Step::D, k));
            put(&mut steps, *bin.next().unwrap());
            for _ in 0..r {
                steps.push(Step::R);
                put(&mut steps, *bin.next().unwrap());
            }
            for p in 0..plain {
                steps.push(Step::R);
                if chosen.contains(&p) {
                    steps.push(Step::D);
                    put(&mut steps, *bin.next().unwrap());
                }
            }
            out.push(PathWord::from_steps(steps));
        }
    }
    Ok(out)
}

/// `R^r (RD)^(c-r) D^(m-c+r) R^(n-c)`, the word of least scrambled c-index
/// among those counted by [`prop3_construct`].
pub fn prop3_minimal_word(m: usize, n: usize, r: usize, c: usize) -> Result<PathWord> {
    if r > n || c < r || c - r > m || c > n {
        return Err(Error::Precondition(format!("no words for m={m} n={n} r={r} c={c}")));
    }
    let ell = c - r;
    let mut steps = vec![Step::R; r];
    for _ in 0..ell {
        steps.extend([Step::R, Step::D]);
    }
    steps.extend(std::iter::repeat_n(Step::D, m - ell));
    steps.extend(std::iter::repeat_n(Step::R, n - r - ell));
    Ok(PathWord::from_steps(steps))
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Weak compositions of `total` into `parts` parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            go(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, parts, &mut Vec::new(), &mut out);
    out
}
