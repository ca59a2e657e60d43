//! Closed-form evaluators and exhaustive verifiers.
//!
//! Every evaluator here is built from Gaussian polynomials alone; the
//! verifiers compare it against enumeration over the lattice, so the two
//! sides share no code beyond [`qbinom`] and polynomial arithmetic.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::biject::{self, BijectionTrace};
use crate::error::{Error, Result};
use crate::lattice::{self, PathWord, Sweep, DEFAULT_LIMIT};
use crate::qpoly::{qbinom, qbinom_signed, BiPoly, UniPoly};
use crate::scramble::{self, gf_scrambled, Scrambler};

/// `Σ_j [x, m-j]·[y, j]·q^((x-m+j)j)`.
pub fn vandermonde_standard(x: u32, y: u32, m: u32) -> UniPoly {
    let mut out = UniPoly::zero();
    let lo = m.saturating_sub(x);
    for j in lo..=m.min(y) {
        let e = (x + j - m) * j;
        let term = &qbinom(x, (m - j) as i64) * &qbinom(y, j as i64);
        out = &out + &term.shift(e);
    }
    out
}

/// `Σ_c [m+r-d, c-d]·[n+d-r, c-r]·q^((c-d)(c-r))`, summed over every
/// integer `c`; out-of-range binomials vanish, so a negative level makes
/// the whole sum zero.
pub fn vandermonde_symmetric(m: i64, n: i64, d: i64, r: i64) -> UniPoly {
    let mut out = UniPoly::zero();
    for c in d.max(r)..=(m + r).min(n + d) {
        let e = ((c - d) * (c - r)) as u32;
        let term = &qbinom_signed(m + r - d, c - d) * &qbinom_signed(n + d - r, c - r);
        out = &out + &term.shift(e);
    }
    out
}

/// `Σ_c [m, c]·[n, c]·q^(c²)·t^c`.
pub fn qt_binomial(m: usize, n: usize) -> BiPoly {
    let mut out = BiPoly::zero();
    for c in 0..=m.min(n) as u32 {
        out.add_assign_ref(&corner_restricted_gf(m, n, c).with_t(c));
    }
    out
}

/// `[m, c]·[n, c]·q^(c²)`: the c-index distribution of paths with `c` corners.
pub fn corner_restricted_gf(m: usize, n: usize, c: u32) -> UniPoly {
    let p = &qbinom(m as u32, c as i64) * &qbinom(n as u32, c as i64);
    p.shift(c * c)
}

/// `q^s Σ_c [m+r-d, c-d]·[n+d-r, c-r]·q^((c-d)(c-r))·t^c` for `O = (H, V)`
/// with `d = |H|`, `r = |V|`, `s` the ornament sum.
pub fn theorem_formula(m: usize, n: usize, o: &Scrambler) -> Result<BiPoly> {
    o.validate(m, n)?;
    let (m, n) = (m as i64, n as i64);
    let (d, r) = (o.d() as i64, o.r() as i64);
    let mut out = BiPoly::zero();
    for c in d.max(r)..=(m + r).min(n + d) {
        let e = ((c - d) * (c - r)) as u32;
        let term = &qbinom_signed(m + r - d, c - d) * &qbinom_signed(n + d - r, c - r);
        out.add_assign_ref(&term.shift(e).with_t(c as u32));
    }
    Ok(out.shift(o.s() as u32, 0))
}

/// Which prefactor [`reduced_formula`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducedForm {
    /// `q^(r(r-1)/2)`.
    Literal,
    /// `q^(r(r+1)/2)`, the ornament sum of `{1..r}`.
    Corrected,
}

/// `q^e Σ_c [m+r, c]·[n-r, c-r]·q^(c(c-r))·t^c` for the scrambler
/// `(∅, {1..r})`, with `e` chosen by `form`.
pub fn reduced_formula(m: usize, n: usize, r: usize, form: ReducedForm) -> Result<BiPoly> {
    if r > n {
        return Err(Error::Precondition(format!("r = {r} exceeds n = {n}")));
    }
    let pre = match form {
        ReducedForm::Literal => r * r.saturating_sub(1) / 2,
        ReducedForm::Corrected => r * (r + 1) / 2,
    };
    let mut out = BiPoly::zero();
    for c in r..=(m + r).min(n) {
        let term = &qbinom((m + r) as u32, c as i64) * &qbinom((n - r) as u32, (c - r) as i64);
        out.add_assign_ref(&term.shift((c * (c - r)) as u32).with_t(c as u32));
    }
    Ok(out.shift(pre as u32, 0))
}

/// How scramblers are chosen for each grid of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScramblerSelection {
    All,
    /// `per_grid` scramblers drawn uniformly (with repetition) from a
    /// generator seeded by `seed` and the grid shape.
    Sample { per_grid: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RangeSpec {
    /// Grids with `m + n <= max_sum`.
    pub max_sum: usize,
    pub min_side: usize,
    pub max_side: Option<usize>,
    pub scramblers: ScramblerSelection,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub limit: usize,
}

/// Above this sum, sweeps over every scrambler are refused.
pub const ALL_SCRAMBLERS_MAX_SUM: usize = 14;

impl RangeSpec {
    pub fn new(max_sum: usize) -> RangeSpec {
        RangeSpec {
            max_sum,
            min_side: 0,
            max_side: None,
            scramblers: ScramblerSelection::All,
            jobs: 1,
            limit: DEFAULT_LIMIT,
        }
    }

    pub fn sides(mut self, min: usize, max: Option<usize>) -> Self {
        self.min_side = min;
        self.max_side = max;
        self
    }

    pub fn sample(mut self, per_grid: usize, seed: u64) -> Self {
        self.scramblers = ScramblerSelection::Sample { per_grid, seed };
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn grids(&self) -> Vec<(usize, usize)> {
        let cap = self.max_side.unwrap_or(self.max_sum).min(self.max_sum);
        let mut out = Vec::new();
        for m in self.min_side..=cap {
            for n in self.min_side..=cap {
                if m + n <= self.max_sum {
                    out.push((m, n));
                }
            }
        }
        out
    }

    /// Scramblers tested on the `m x n` grid.
    pub fn scramblers_for(&self, m: usize, n: usize) -> Vec<Scrambler> {
        match self.scramblers {
            ScramblerSelection::All => Scrambler::all(m, n).collect(),
            ScramblerSelection::Sample { per_grid, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((m as u64) << 32 | n as u64));
                (0..per_grid)
                    .map(|_| {
                        let hm: u64 = rng.gen_range(0..1u64 << m);
                        let vm: u64 = rng.gen_range(0..1u64 << n);
                        Scrambler::new(
                            (0..m).filter(|&h| hm >> h & 1 == 1),
                            (1..=n).filter(|&v| vm >> (v - 1) & 1 == 1),
                        )
                    })
                    .collect()
            }
        }
    }

    fn check(&self, uses_scramblers: bool) -> Result<()> {
        if self.max_sum > self.limit {
            return Err(Error::LimitExceeded {
                m: self.max_sum,
                n: 0,
                limit: self.limit,
            });
        }
        if uses_scramblers
            && self.scramblers == ScramblerSelection::All
            && self.max_sum > ALL_SCRAMBLERS_MAX_SUM
        {
            return Err(Error::OutOfRange(format!(
                "sweeping every scrambler needs m+n <= {ALL_SCRAMBLERS_MAX_SUM}, got {}; sample instead",
                self.max_sum
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m+n<={}", self.max_sum)?;
        if self.min_side > 0 {
            write!(f, ", m,n>={}", self.min_side)?;
        }
        if let Some(s) = self.max_side {
            write!(f, ", m,n<={s}")?;
        }
        match self.scramblers {
            ScramblerSelection::All => Ok(()),
            ScramblerSelection::Sample { per_grid, seed } => {
                write!(f, ", {per_grid} sampled scramblers per grid (seed {seed})")
            }
        }
    }
}

/// One failing case: formula (or predicted) side against the enumerated side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scrambler: Option<Scrambler>,
    pub expected: BiPoly,
    pub actual: BiPoly,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub range: String,
    pub cases_run: usize,
    pub status: Status,
    pub mismatches: Vec<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time; left out of the JSON so that reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    fn new(identity: &str, range: String, cases_run: usize, mismatches: Vec<Witness>, notes: Vec<String>) -> Self {
        let status = if mismatches.is_empty() { Status::Pass } else { Status::Fail };
        VerificationReport {
            identity: identity.to_string(),
            range,
            cases_run,
            status,
            mismatches,
            notes,
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Combines the reports of two disjoint parts of one sweep.
    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        if self.range != other.range {
            self.range = format!("{}; {}", self.range, other.range);
        }
        self.cases_run += other.cases_run;
        self.mismatches.extend(other.mismatches);
        self.notes.extend(other.notes);
        self.elapsed += other.elapsed;
        self.status = if self.mismatches.is_empty() { Status::Pass } else { Status::Fail };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per report plus one per witness.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {}: {} cases, {} mismatches [{}]",
            match self.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            },
            self.identity,
            self.cases_run,
            self.mismatches.len(),
            self.range
        );
        for n in &self.notes {
            s.push_str(&format!("\n  note: {n}"));
        }
        for w in &self.mismatches {
            s.push_str(&format!("\n  {}: expected {} got {}", w.case, w.expected, w.actual));
            if let Some(n) = &w.note {
                s.push_str(&format!(" ({n})"));
            }
        }
        s
    }
}

/// Names accepted by [`verify_identity`].
pub const IDENTITIES: &[&str] = &[
    "fact1",
    "fact2",
    "fact3",
    "fact4",
    "eq1",
    "eq2",
    "eq3",
    "eq4",
    "footnote",
    "theorem",
    "corollary",
    "eq7",
    "eq7-literal",
    "lemma2",
    "lemma2v",
    "lemma2h",
    "chain",
    "prop3",
];

type Outcome = (usize, Vec<Witness>);

fn run_cases<T: Sync>(items: &[T], jobs: usize, f: impl Fn(&T) -> Outcome + Sync) -> Result<Outcome> {
    let parts: Vec<Outcome> = if jobs <= 1 {
        items.iter().map(&f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
        pool.install(|| items.par_iter().map(&f).collect())
    };
    let mut total = (0, Vec::new());
    for (c, w) in parts {
        total.0 += c;
        total.1.extend(w);
    }
    Ok(total)
}

fn check(out: &mut Vec<Witness>, case: String, o: Option<&Scrambler>, expected: BiPoly, actual: BiPoly) {
    if expected != actual {
        out.push(Witness {
            case,
            scrambler: o.cloned(),
            expected,
            actual,
            note: None,
        });
    }
}

fn serial() -> Sweep {
    Sweep {
        limit: usize::MAX,
        jobs: 1,
    }
}

fn grid_scramblers(range: &RangeSpec, filter: impl Fn(usize, usize, &Scrambler) -> bool) -> Vec<(usize, usize, Scrambler)> {
    let mut out = Vec::new();
    for (m, n) in range.grids() {
        for o in range.scramblers_for(m, n) {
            if filter(m, n, &o) {
                out.push((m, n, o));
            }
        }
    }
    out
}

/// Exhaustively compares one identity over `range`, collecting every
/// mismatch.
pub fn verify_identity(name: &str, range: &RangeSpec) -> Result<VerificationReport> {
    let started = Instant::now();
    let uses_scramblers = matches!(
        name,
        "theorem" | "corollary" | "lemma2" | "lemma2v" | "lemma2h" | "chain"
    );
    if !IDENTITIES.contains(&name) {
        return Err(Error::UnknownIdentity(name.to_string()));
    }
    range.check(uses_scramblers)?;
    let grids = range.grids();
    let jobs = range.jobs;
    let mut notes = Vec::new();
    let (cases, witnesses) = match name {
        "fact1" => run_cases(&grids, jobs, |&(m, n)| {
            let mut out = Vec::new();
            let mut count = 0;
            for w in enumerate_all(m, n) {
                count += 1;
                let steps = w.greedy_descent();
                check(
                    &mut out,
                    format!("m={m} n={n} w={w}"),
                    None,
                    BiPoly::monomial(w.area(), 0, 1),
                    BiPoly::monomial(steps, 0, 1),
                );
            }
            (count, out)
        })?,
        "fact2" => run_cases(&grids, jobs, |&(m, n)| {
            let mut out = Vec::new();
            let brute = lattice::area_gf(m, n, serial()).expect("limit disabled");
            check(&mut out, format!("m={m} n={n}"), None, qbinom((m + n) as u32, m as i64).to_bi(), brute);
            (1, out)
        })?,
        "fact3" => run_cases(&grids, jobs, |&(m, n)| {
            let mut out = Vec::new();
            let mut count = 0;
            let shift = (m * (m + 1) / 2) as u32;
            for w in enumerate_all(m, n) {
                count += 1;
                check(
                    &mut out,
                    format!("m={m} n={n} w={w}"),
                    None,
                    BiPoly::monomial(w.area() + shift, 0, 1),
                    BiPoly::monomial(w.dees(), 0, 1),
                );
            }
            (count, out)
        })?,
        "fact4" => run_cases(&grids, jobs, |&(m, n)| {
            let mut out = Vec::new();
            let brute = lattice::cindex_corners_gf(m, n, serial()).expect("limit disabled");
            check(
                &mut out,
                format!("m={m} n={n}"),
                None,
                qbinom((m + n) as u32, m as i64).to_bi(),
                brute.specialize(false, true),
            );
            (1, out)
        })?,
        "eq1" => {
            let mut items = Vec::new();
            for (x, y) in &grids {
                for k in 0..=(x + y + 1) {
                    items.push((*x as u32, *y as u32, k as u32));
                }
            }
            run_cases(&items, jobs, |&(x, y, k)| {
                let mut out = Vec::new();
                check(
                    &mut out,
                    format!("x={x} y={y} m={k}"),
                    None,
                    qbinom(x + y, k as i64).to_bi(),
                    vandermonde_standard(x, y, k).to_bi(),
                );
                (1, out)
            })?
        }
        "eq2" => {
            let mut items = Vec::new();
            for (m, n) in &grids {
                for d in -3i64..=3 {
                    for r in -3i64..=3 {
                        items.push((*m as i64, *n as i64, d, r));
                    }
                }
            }
            let outside = items.iter().filter(|&&(m, n, d, r)| !eq2_in_domain(m, n, d, r)).count();
            if outside > 0 {
                notes.push(format!(
                    "{outside} tuples have m+r-d < 0 or n+d-r < 0: the convolution is empty there (checked to be 0), not [m+n, m]"
                ));
            }
            run_cases(&items, jobs, |&(m, n, d, r)| {
                let mut out = Vec::new();
                let lhs = vandermonde_symmetric(m, n, d, r);
                let expected = if eq2_in_domain(m, n, d, r) {
                    qbinom((m + n) as u32, m)
                } else {
                    UniPoly::zero()
                };
                let case = format!("m={m} n={n} d={d} r={r}");
                check(&mut out, case.clone(), None, expected.to_bi(), lhs.to_bi());
                let mut count = 1;
                for k in -3i64..=3 {
                    count += 1;
                    let shifted = vandermonde_symmetric(m, n, d + k, r + k);
                    if shifted != lhs {
                        out.push(Witness {
                            case: case.clone(),
                            scrambler: None,
                            expected: lhs.to_bi(),
                            actual: shifted.to_bi(),
                            note: Some(format!("not invariant under (d,r) -> (d{k:+},r{k:+})")),
                        });
                    }
                }
                (count, out)
            })?
        }
        "eq3" | "footnote" => {
            let area_square = name == "footnote";
            run_cases(&grids, jobs, |&(m, n)| {
                let mut out = Vec::new();
                let brute = if area_square {
                    lattice::area_square_gf(m, n, serial())
                } else {
                    lattice::cindex_corners_gf(m, n, serial())
                }
                .expect("limit disabled");
                let top = m.min(n) as u32 + 1;
                for c in 0..=top {
                    check(
                        &mut out,
                        format!("m={m} n={n} c={c}"),
                        None,
                        corner_restricted_gf(m, n, c).to_bi(),
                        brute.t_coeff(c).to_bi(),
                    );
                }
                check(&mut out, format!("m={m} n={n} all c"), None, qt_binomial(m, n), brute);
                (top as usize + 2, out)
            })?
        }
        "eq4" => run_cases(&grids, jobs, |&(m, n)| {
            let mut out = Vec::new();
            let brute = gf_scrambled(m, n, &Scrambler::empty(), serial()).expect("limit disabled");
            check(&mut out, format!("m={m} n={n}"), None, qt_binomial(m, n), brute);
            (1, out)
        })?,
        "theorem" | "corollary" => {
            let items = grid_scramblers(range, |_, _, _| true);
            let corollary = name == "corollary";
            run_cases(&items, jobs, |(m, n, o)| {
                let (m, n) = (*m, *n);
                let mut out = Vec::new();
                let brute = gf_scrambled(m, n, o, serial()).expect("valid scrambler");
                let case = format!("m={m} n={n} O={o}");
                if corollary {
                    let expected = qbinom((m + n) as u32, m as i64).shift(o.s() as u32).to_bi();
                    check(&mut out, case, Some(o), expected, brute.specialize(false, true));
                } else {
                    let formula = theorem_formula(m, n, o).expect("valid scrambler");
                    check(&mut out, case, Some(o), formula, brute);
                }
                (1, out)
            })?
        }
        "eq7" | "eq7-literal" => {
            let literal = name == "eq7-literal";
            let items: Vec<(usize, usize, usize)> = grids
                .iter()
                .flat_map(|&(m, n)| (0..=n).map(move |r| (m, n, r)))
                .collect();
            let result = run_cases(&items, jobs, |&(m, n, r)| {
                let mut out = Vec::new();
                let o = Scrambler::packed_vertical(r);
                let brute = gf_scrambled(m, n, &o, serial()).expect("valid scrambler");
                let case = format!("m={m} n={n} r={r}");
                let form = if literal { ReducedForm::Literal } else { ReducedForm::Corrected };
                let formula = reduced_formula(m, n, r, form).expect("r <= n");
                if formula != brute {
                    let note = if formula.shift(r as u32, 0) == brute {
                        format!("differs by exactly q^{r}")
                    } else {
                        "differs by more than a q-power".to_string()
                    };
                    out.push(Witness {
                        case: case.clone(),
                        scrambler: Some(o.clone()),
                        expected: formula.clone(),
                        actual: brute,
                        note: Some(note),
                    });
                }
                if !literal {
                    let general = theorem_formula(m, n, &o).expect("valid scrambler");
                    if general != formula {
                        out.push(Witness {
                            case,
                            scrambler: Some(o),
                            expected: formula,
                            actual: general,
                            note: Some("disagrees with the general convolution".to_string()),
                        });
                    }
                }
                (1, out)
            })?;
            if literal && !result.1.is_empty() {
                let exact = result
                    .1
                    .iter()
                    .filter(|w| {
                        w.note
                            .as_deref()
                            .is_some_and(|n| n.starts_with("differs by exactly"))
                    })
                    .count();
                notes.push(format!(
                    "{exact} of {} mismatches are off by exactly q^r",
                    result.1.len()
                ));
            }
            result
        }
        "lemma2" | "lemma2v" | "lemma2h" => {
            let mut items = Vec::new();
            for (m, n, o) in grid_scramblers(range, |_, _, _| true) {
                match name {
                    "lemma2" if o.h().contains(&0) && o.v().contains(&1) => items.push((m, n, o, 0)),
                    "lemma2v" => {
                        for &v in o.v() {
                            if v >= 2 && !o.v().contains(&(v - 1)) {
                                items.push((m, n, o.clone(), v));
                            }
                        }
                    }
                    "lemma2h" => {
                        for &h in o.h() {
                            if h >= 1 && !o.h().contains(&(h - 1)) {
                                items.push((m, n, o.clone(), h));
                            }
                        }
                    }
                    _ => {}
                }
            }
            let expected = if name == "lemma2" { (-1, -1) } else { (-1, 0) };
            run_cases(&items, jobs, |(m, n, o, k)| {
                let apply = |w: &PathWord| match name {
                    "lemma2" => biject::lemma2_trace(w, o),
                    "lemma2v" => biject::lemma2v_trace(w, o, *k),
                    _ => biject::lemma2h_trace(w, o, *k),
                };
                let case = match name {
                    "lemma2" => format!("m={m} n={n} O={o}"),
                    "lemma2v" => format!("m={m} n={n} O={o} v={k}"),
                    _ => format!("m={m} n={n} O={o} h={k}"),
                };
                check_bijection(*m, *n, o, &case, expected, apply)
            })?
        }
        "chain" => {
            let items = grid_scramblers(range, |_, _, _| true);
            run_cases(&items, jobs, |(m, n, o)| {
                let (m, n) = (*m, *n);
                let red = o.reduced();
                let ds = o.s() as i64 - red.s() as i64;
                let dk = o.d().min(o.r()) as i64;
                let case = format!("m={m} n={n} O={o}");
                let composed = |w: &PathWord| -> Result<BijectionTrace> {
                    let traces = biject::apply_chain(w, o)?;
                    let mut first = match traces.first() {
                        Some(t) => t.clone(),
                        None => identity_trace(w, o)?,
                    };
                    if traces.is_empty() {
                        return Ok(first);
                    }
                    let last = traces.last().unwrap();
                    first.target_word = last.target_word.clone();
                    first.target_scrambler = last.target_scrambler.clone();
                    first.delta_cindex = traces.iter().map(|t| t.delta_cindex).sum();
                    first.delta_corners = traces.iter().map(|t| t.delta_corners).sum();
                    Ok(first)
                };
                let (count, mut out) = check_bijection(m, n, o, &case, (-ds, -dk), composed);
                let lhs = gf_scrambled(m, n, o, serial()).expect("valid scrambler");
                let rhs = gf_scrambled(m, n, &red, serial())
                    .expect("valid scrambler")
                    .shift(ds as u32, dk as u32);
                check(&mut out, format!("{case} gf"), Some(o), rhs, lhs);
                (count + 1, out)
            })?
        }
        "prop3" => run_cases(&grids, jobs, |&(m, n)| {
            let mut out = Vec::new();
            let mut count = 0;
            let all: HashSet<PathWord> = enumerate_all(m, n).collect();
            for r in 0..=n {
                let o = Scrambler::packed_vertical(r);
                let mut seen = HashSet::new();
                let mut dupes = 0;
                let mut total = BiPoly::zero();
                for c in r..=n + m {
                    count += 1;
                    let words = biject::prop3_construct(m, n, r, c).expect("r <= n <= c");
                    let mut gf = BiPoly::zero();
                    for w in &words {
                        let ci = scramble::scrambled_cindex(w, &o).expect("valid scrambler");
                        let co = scramble::scrambled_corners(w, &o).expect("valid scrambler");
                        gf.add_term(ci, co, 1);
                        if !seen.insert(w.clone()) {
                            dupes += 1;
                        }
                    }
                    let ell = c - r;
                    let expected = if ell > m {
                        BiPoly::zero()
                    } else {
                        let p = &qbinom((m + r) as u32, c as i64) * &qbinom((n - r) as u32, ell as i64);
                        p.shift((c * ell + r * (r + 1) / 2) as u32).with_t(c as u32)
                    };
                    check(&mut out, format!("m={m} n={n} r={r} c={c}"), Some(&o), expected, gf.clone());
                    total.add_assign_ref(&gf);
                }
                let brute = gf_scrambled(m, n, &o, serial()).expect("valid scrambler");
                check(&mut out, format!("m={m} n={n} r={r} all c"), Some(&o), brute, total.clone());
                if dupes > 0 || seen != all {
                    out.push(Witness {
                        case: format!("m={m} n={n} r={r}"),
                        scrambler: Some(o),
                        expected: BiPoly::monomial(0, 0, all.len() as u64),
                        actual: BiPoly::monomial(0, 0, seen.len() as u64),
                        note: Some(format!("{dupes} duplicates; union differs from the grid")),
                    });
                }
            }
            (count, out)
        })?,
        _ => unreachable!("name checked above"),
    };
    let mut report = VerificationReport::new(name, range.to_string(), cases, witnesses, notes);
    report.elapsed = started.elapsed();
    Ok(report)
}

fn eq2_in_domain(m: i64, n: i64, d: i64, r: i64) -> bool {
    m + r - d >= 0 && n + d - r >= 0
}

fn enumerate_all(m: usize, n: usize) -> lattice::Paths {
    lattice::enumerate_with_limit(m, n, usize::MAX).expect("limit disabled")
}

fn identity_trace(w: &PathWord, o: &Scrambler) -> Result<BijectionTrace> {
    let dummy = biject::ClassDecomposition {
        kind: biject::LemmaKind::PairCancel,
        u: String::new(),
        a: String::new(),
        b: String::new(),
        v: w.to_string(),
        class_type: biject::ClassType::Singleton,
    };
    Ok(BijectionTrace {
        kind: biject::LemmaKind::PairCancel,
        source_word: w.clone(),
        source_scrambler: o.clone(),
        target_word: w.clone(),
        target_scrambler: o.clone(),
        source_class: dummy.clone(),
        target_class: dummy,
        class_size: 1,
        source_index: 0,
        target_index: 0,
        delta_cindex: 0,
        delta_corners: 0,
    })
}

/// Applies `map` to every word of the grid and checks injectivity and the
/// pointwise statistic deltas against `expected`.
fn check_bijection(
    m: usize,
    n: usize,
    o: &Scrambler,
    case: &str,
    expected: (i64, i64),
    map: impl Fn(&PathWord) -> Result<BijectionTrace>,
) -> Outcome {
    let mut out = Vec::new();
    let mut count = 0;
    let mut images = BTreeSet::new();
    let mut size = 0usize;
    for w in enumerate_all(m, n) {
        size += 1;
        count += 1;
        let t = match map(&w) {
            Ok(t) => t,
            Err(e) => {
                out.push(Witness {
                    case: format!("{case} w={w}"),
                    scrambler: Some(o.clone()),
                    expected: BiPoly::zero(),
                    actual: BiPoly::zero(),
                    note: Some(format!("map rejected the word: {e}")),
                });
                continue;
            }
        };
        if (t.delta_cindex, t.delta_corners) != expected {
            let src_ci = scramble::scrambled_cindex(&w, o).unwrap_or(0);
            let src_co = scramble::scrambled_corners(&w, o).unwrap_or(0);
            let pred = |base: u32, d: i64| (base as i64 + d).max(0) as u32;
            out.push(Witness {
                case: format!("{case} w={w} -> {}", t.target_word),
                scrambler: Some(o.clone()),
                expected: BiPoly::monomial(pred(src_ci, expected.0), pred(src_co, expected.1), 1),
                actual: BiPoly::monomial(pred(src_ci, t.delta_cindex), pred(src_co, t.delta_corners), 1),
                note: Some("statistic deltas differ from the contract".to_string()),
            });
        }
        if t.target_word.m() != m || t.target_word.n() != n {
            out.push(Witness {
                case: format!("{case} w={w} -> {}", t.target_word),
                scrambler: Some(o.clone()),
                expected: BiPoly::zero(),
                actual: BiPoly::zero(),
                note: Some("image left the grid".to_string()),
            });
        }
        images.insert(t.target_word);
    }
    if images.len() != size {
        out.push(Witness {
            case: case.to_string(),
            scrambler: Some(o.clone()),
            expected: BiPoly::monomial(0, 0, size as u64),
            actual: BiPoly::monomial(0, 0, images.len() as u64),
            note: Some("map is not injective".to_string()),
        });
    }
    (count, out)
}

/// One bi-statistic compared in [`final_section_probe`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeCandidate {
    pub name: String,
    pub gf: BiPoly,
    pub equals_plain: bool,
    pub equals_squared: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub m: usize,
    pub n: usize,
    pub scrambler: Scrambler,
    pub paths: usize,
    /// Distinct scrambled corner counts seen.
    pub corner_counts: Vec<u32>,
    pub corners_always_m: bool,
    /// Distinct values of scrambled c-index minus area.
    pub offsets: Vec<i64>,
    pub offset: Option<i64>,
    /// `m(m-1)/2`.
    pub derived_offset: i64,
    /// `(m-2)(m-1)/2`.
    pub printed_offset: i64,
    /// `Σ_c [m,c][n,c] t^c`.
    pub target_plain: BiPoly,
    /// `Σ_c [m,c][n,c] q^(c²) t^c`.
    pub target_squared: BiPoly,
    pub candidates: Vec<ProbeCandidate>,
}

impl ProbeReport {
    /// The offset is constant and every path has `m` corners.
    pub fn structural_claims_hold(&self) -> bool {
        self.corners_always_m && self.offset.is_some()
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "probe m={} n={} O={}: {} paths\n",
            self.m, self.n, self.scrambler, self.paths
        );
        s.push_str(&format!(
            "scrambled corners always m: {} (seen {:?})\n",
            self.corners_always_m, self.corner_counts
        ));
        match self.offset {
            Some(c) => s.push_str(&format!(
                "scrambled cindex - area is constant {c}; m(m-1)/2 = {}, (m-2)(m-1)/2 = {}\n",
                self.derived_offset, self.printed_offset
            )),
            None => s.push_str(&format!("scrambled cindex - area is not constant: {:?}\n", self.offsets)),
        }
        s.push_str(&format!("plain target   {}\n", self.target_plain));
        s.push_str(&format!("squared target {}\n", self.target_squared));
        for c in &self.candidates {
            s.push_str(&format!(
                "{}: plain={} squared={} gf={}\n",
                c.name, c.equals_plain, c.equals_squared, c.gf
            ));
        }
        s
    }
}

/// Examines the scrambler with every horizontal ornament: corner counts,
/// the c-index/area offset, and which bi-statistic has the
/// `Σ_c [m,c][n,c]`-type generating function.
pub fn final_section_probe(m: usize, n: usize) -> Result<ProbeReport> {
    if m == 0 {
        return Err(Error::Precondition("the probe needs m >= 1".to_string()));
    }
    let o = Scrambler::full_horizontal(m);
    o.validate(m, n)?;
    lattice::check_limit(m, n, DEFAULT_LIMIT)?;
    let mut corner_counts = BTreeSet::new();
    let mut offsets = BTreeSet::new();
    let mut rows = Vec::new();
    for w in enumerate_all(m, n) {
        let (ci, co) = scramble::stats_unchecked(w.steps(), &o);
        corner_counts.insert(co);
        offsets.insert(ci as i64 - w.area() as i64);
        rows.push((w, ci, co));
    }
    let offset = if offsets.len() == 1 { offsets.iter().next().copied() } else { None };
    let shift = offset.unwrap_or(0);
    let mut by_corners = BiPoly::zero();
    let mut by_square = BiPoly::zero();
    let mut by_scrambled = BiPoly::zero();
    for (w, ci, co) in &rows {
        by_corners.add_term(w.area(), w.corners(), 1);
        by_square.add_term(w.area(), w.square_side(), 1);
        by_scrambled.add_term((*ci as i64 - shift).max(0) as u32, *co, 1);
    }
    let mut target_plain = BiPoly::zero();
    for c in 0..=m.min(n) as u32 {
        let p = &qbinom(m as u32, c as i64) * &qbinom(n as u32, c as i64);
        target_plain.add_assign_ref(&p.with_t(c));
    }
    let target_squared = qt_binomial(m, n);
    let candidate = |name: &str, gf: BiPoly| ProbeCandidate {
        name: name.to_string(),
        equals_plain: gf == target_plain,
        equals_squared: gf == target_squared,
        gf,
    };
    let candidates = vec![
        candidate("area,corners", by_corners),
        candidate("area,square_side", by_square),
        candidate("scrambled_cindex-offset,scrambled_corners", by_scrambled),
    ];
    let mi = m as i64;
    Ok(ProbeReport {
        m,
        n,
        scrambler: o,
        paths: rows.len(),
        corners_always_m: corner_counts.iter().all(|&c| c as usize == m),
        corner_counts: corner_counts.into_iter().collect(),
        offsets: offsets.into_iter().collect(),
        offset,
        derived_offset: mi * (mi - 1) / 2,
        printed_offset: (mi - 2) * (mi - 1) / 2,
        target_plain,
        target_squared,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(s: &str) -> Scrambler {
        s.parse().unwrap()
    }

    fn bi(terms: &[(u32, u32, i64)]) -> BiPoly {
        let mut p = BiPoly::zero();
        for &(q, t, c) in terms {
            p.add_term(q, t, c);
        }
        p
    }

    #[test]
    fn standard_vandermonde_examples() {
        assert_eq!(vandermonde_standard(2, 4, 2), qbinom(6, 2));
        for x in 0..5 {
            assert_eq!(vandermonde_standard(x, 3, 0), UniPoly::one());
        }
        assert_eq!(
            vandermonde_standard(3, 3, 3),
            UniPoly::from_coeffs(&[1, 1, 2, 3, 3, 3, 3, 2, 1, 1])
        );
        assert!(vandermonde_standard(2, 2, 5).is_zero());
    }

    #[test]
    fn symmetric_vandermonde_examples() {
        assert_eq!(vandermonde_symmetric(2, 4, 0, 0), qbinom(6, 2));
        assert_eq!(vandermonde_symmetric(1, 1, 1, 0), UniPoly::from_coeffs(&[1, 1]));
        assert_eq!(vandermonde_symmetric(3, 2, -2, 1), vandermonde_symmetric(3, 2, 0, 3));
        // outside m+r-d >= 0 the sum is empty
        assert!(vandermonde_symmetric(0, 0, 1, 0).is_zero());
    }

    #[test]
    fn qt_binomial_examples() {
        let expected = bi(&[
            (0, 0, 1),
            (1, 1, 1),
            (2, 1, 2),
            (3, 1, 2),
            (4, 1, 2),
            (5, 1, 1),
            (4, 2, 1),
            (5, 2, 1),
            (6, 2, 2),
            (7, 2, 1),
            (8, 2, 1),
        ]);
        assert_eq!(qt_binomial(2, 4), expected);
        assert_eq!(qt_binomial(5, 0), BiPoly::one());
        assert_eq!(qt_binomial(1, 1), bi(&[(0, 0, 1), (1, 1, 1)]));
    }

    #[test]
    fn theorem_formula_examples() {
        let expected = bi(&[
            (5, 2, 1),
            (6, 2, 1),
            (7, 2, 1),
            (7, 3, 1),
            (8, 3, 2),
            (9, 3, 3),
            (10, 3, 2),
            (11, 3, 1),
            (11, 4, 1),
            (12, 4, 1),
            (13, 4, 1),
        ]);
        assert_eq!(theorem_formula(2, 4, &sc("H=1;V=1,3")).unwrap(), expected);
        assert_eq!(theorem_formula(3, 2, &Scrambler::empty()).unwrap(), qt_binomial(3, 2));
        assert_eq!(
            theorem_formula(1, 1, &sc("H=0;V=1")).unwrap(),
            bi(&[(1, 1, 1), (2, 2, 1)])
        );
        assert!(theorem_formula(1, 1, &sc("H=1;V=")).is_err());
    }

    #[test]
    fn reduced_formula_examples() {
        assert_eq!(
            reduced_formula(2, 4, 2, ReducedForm::Corrected).unwrap(),
            theorem_formula(2, 4, &sc("H=;V=1,2")).unwrap()
        );
        for form in [ReducedForm::Literal, ReducedForm::Corrected] {
            assert_eq!(reduced_formula(3, 2, 0, form).unwrap(), qt_binomial(3, 2));
        }
        let o = sc("H=;V=1");
        assert_eq!(
            reduced_formula(1, 2, 1, ReducedForm::Corrected).unwrap(),
            gf_scrambled(1, 2, &o, Sweep::serial()).unwrap()
        );
        let lit = reduced_formula(1, 2, 1, ReducedForm::Literal).unwrap();
        assert_eq!(lit.shift(1, 0), reduced_formula(1, 2, 1, ReducedForm::Corrected).unwrap());
        assert!(reduced_formula(1, 2, 3, ReducedForm::Corrected).is_err());
    }

    #[test]
    fn corner_restricted_examples() {
        assert_eq!(corner_restricted_gf(2, 4, 0), UniPoly::one());
        assert_eq!(corner_restricted_gf(2, 4, 2), UniPoly::from_coeffs(&[0, 0, 0, 0, 1, 1, 2, 1, 1]));
        assert_eq!(corner_restricted_gf(1, 1, 1), UniPoly::monomial(1, 1));
    }

    #[test]
    fn verify_small_ranges() {
        let r = RangeSpec::new(6);
        for name in IDENTITIES {
            if *name == "eq7-literal" {
                continue;
            }
            let rep = verify_identity(name, &r).unwrap();
            assert!(rep.passed(), "{}", rep.summary());
            assert!(rep.cases_run > 0, "{name}");
        }
        let rep = verify_identity("eq7-literal", &RangeSpec::new(6).sides(0, Some(4))).unwrap();
        assert!(!rep.passed());
        for w in &rep.mismatches {
            assert!(w.note.as_deref().unwrap().starts_with("differs by exactly q^"));
        }
    }

    #[test]
    fn verify_errors() {
        assert!(matches!(
            verify_identity("nope", &RangeSpec::new(3)),
            Err(Error::UnknownIdentity(_))
        ));
        assert!(matches!(
            verify_identity("fact2", &RangeSpec::new(40)),
            Err(Error::LimitExceeded { .. })
        ));
        assert!(verify_identity("theorem", &RangeSpec::new(20)).is_err());
        assert!(verify_identity("theorem", &RangeSpec::new(20).sample(1, 3).sides(1, Some(3))).is_ok());
    }

    #[test]
    fn sampled_scramblers_are_deterministic() {
        let r = RangeSpec::new(8).sample(5, 42);
        assert_eq!(r.scramblers_for(3, 4), r.scramblers_for(3, 4));
        for o in r.scramblers_for(3, 4) {
            o.validate(3, 4).unwrap();
        }
        assert_ne!(r.scramblers_for(3, 4), RangeSpec::new(8).sample(5, 43).scramblers_for(3, 4));
    }

    #[test]
    fn parallel_verification_matches_serial() {
        let a = verify_identity("theorem", &RangeSpec::new(5)).unwrap();
        let b = verify_identity("theorem", &RangeSpec::new(5).jobs(4)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn report_merge() {
        let a = verify_identity("fact2", &RangeSpec::new(3)).unwrap();
        let b = verify_identity("eq7-literal", &RangeSpec::new(3)).unwrap();
        let (ca, cb, mb) = (a.cases_run, b.cases_run, b.mismatches.len());
        let m = a.merge(b);
        assert_eq!(m.cases_run, ca + cb);
        assert_eq!(m.mismatches.len(), mb);
        assert_eq!(m.status, Status::Fail);
    }

    #[test]
    fn probe_small_cases() {
        let p = final_section_probe(2, 1).unwrap();
        assert_eq!(p.paths, 3);
        assert!(p.corners_always_m);
        assert_eq!(p.offset, Some(1));
        assert_eq!(p.printed_offset, 0);

        let p = final_section_probe(1, 1).unwrap();
        assert_eq!(p.target_plain, bi(&[(0, 0, 1), (0, 1, 1)]));
        assert!(p.candidates.iter().all(|c| !c.equals_plain));
        let sq = p.candidates.iter().find(|c| c.name == "area,square_side").unwrap();
        assert_eq!(sq.gf, bi(&[(0, 0, 1), (1, 1, 1)]));
        assert!(sq.equals_squared);
        assert!(final_section_probe(0, 3).is_err());
    }
}
