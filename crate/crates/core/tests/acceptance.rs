//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every comparison is exact; the only tolerances are the wall-clock
//! bounds, pinned below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qtbinom::identities::{
    final_section_probe, qt_binomial, theorem_formula, verify_identity, RangeSpec, VerificationReport,
};
use qtbinom::{gf_scrambled, qbinom, BiPoly, Scrambler, Sweep, UniPoly};

const QBINOM_BUDGET: Duration = Duration::from_millis(1);
const THEOREM_BUDGET: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn bi(terms: &[(u32, u32, i64)]) -> BiPoly {
    let mut p = BiPoly::zero();
    for &(q, t, c) in terms {
        p.add_term(q, t, c);
    }
    p
}

fn require(report: &VerificationReport) -> Result<usize, String> {
    if report.passed() {
        Ok(report.cases_run)
    } else {
        Err(report.summary())
    }
}

fn golden_qbinom() -> Outcome {
    let start = Instant::now();
    let p = qbinom(6, 2);
    let took = start.elapsed();
    let expected = UniPoly::from_coeffs(&[1, 1, 2, 2, 3, 2, 2, 1, 1]);
    if p != expected {
        return Err(format!("got {p}"));
    }
    if took >= QBINOM_BUDGET {
        return Err(format!("took {took:?}, budget {QBINOM_BUDGET:?}"));
    }
    Ok(format!("{p} in {took:?}"))
}

fn golden_qt() -> Outcome {
    // the eleven terms q^a t^b with their multiplicities
    let expected = bi(&[
        (0, 0, 1),
        (1, 1, 1),
        (2, 1, 2),
        (3, 1, 2),
        (4, 1, 2),
        (4, 2, 1),
        (5, 1, 1),
        (5, 2, 1),
        (6, 2, 2),
        (7, 2, 1),
        (8, 2, 1),
    ]);
    let formula = qt_binomial(2, 4);
    let brute = gf_scrambled(2, 4, &Scrambler::empty(), Sweep::serial()).map_err(|e| e.to_string())?;
    if formula != expected || brute != expected {
        return Err(format!("formula {formula}, enumeration {brute}"));
    }
    Ok(format!("{} terms", expected.len()))
}

fn golden_scrambled() -> Outcome {
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
    let o: Scrambler = "H=1;V=1,3".parse().map_err(|e: qtbinom::Error| e.to_string())?;
    let brute = gf_scrambled(2, 4, &o, Sweep::serial()).map_err(|e| e.to_string())?;
    let formula = theorem_formula(2, 4, &o).map_err(|e| e.to_string())?;
    if brute != expected || formula != expected {
        return Err(format!("enumeration {brute}, formula {formula}"));
    }
    Ok(format!("{expected}"))
}

fn theorem_sweep() -> Outcome {
    let range = RangeSpec::new(8).sides(1, None);
    let start = Instant::now();
    let serial = verify_identity("theorem", &range).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let cases = require(&serial)?;
    if took >= THEOREM_BUDGET {
        return Err(format!("serial sweep took {took:?}, budget {THEOREM_BUDGET:?}"));
    }
    let parallel = verify_identity("theorem", &range.clone().jobs(4)).map_err(|e| e.to_string())?;
    if parallel.to_json() != serial.to_json() {
        return Err("parallel report differs from serial".to_string());
    }
    // and the polynomials themselves, sharded enumeration against serial
    for o in Scrambler::all(4, 4).step_by(17) {
        let a = gf_scrambled(4, 4, &o, Sweep::serial()).map_err(|e| e.to_string())?;
        let b = gf_scrambled(4, 4, &o, Sweep::with_jobs(4)).map_err(|e| e.to_string())?;
        if a.to_json() != b.to_json() {
            return Err(format!("parallel enumeration differs for {o}"));
        }
    }
    Ok(format!("{cases} (grid, scrambler) cases, serial {took:?}, parallel identical"))
}

fn corollary_sweep() -> Outcome {
    let r = verify_identity("corollary", &RangeSpec::new(8).sides(1, None)).map_err(|e| e.to_string())?;
    Ok(format!("{} cases", require(&r)?))
}

fn facts_suite() -> Outcome {
    let range = RangeSpec::new(10);
    let mut parts = Vec::new();
    for name in ["fact1", "fact2", "fact3", "fact4", "eq3"] {
        let r = verify_identity(name, &range).map_err(|e| e.to_string())?;
        parts.push(format!("{name} {}", require(&r)?));
    }
    Ok(parts.join(", "))
}

fn bijection_suite() -> Outcome {
    let range = RangeSpec::new(8).sides(0, Some(4));
    let mut parts = Vec::new();
    for name in ["lemma2", "lemma2v", "lemma2h", "chain"] {
        let r = verify_identity(name, &range).map_err(|e| e.to_string())?;
        parts.push(format!("{name} {}", require(&r)?));
    }
    Ok(parts.join(", "))
}

fn proposition_three() -> Outcome {
    let range = RangeSpec::new(10).sides(0, Some(5));
    let corrected = verify_identity("eq7", &range).map_err(|e| e.to_string())?;
    let cases = require(&corrected)?;
    let literal = verify_identity("eq7-literal", &range).map_err(|e| e.to_string())?;
    let with_r: usize = range.grids().iter().map(|&(_, n)| n).sum();
    if literal.mismatches.len() != with_r {
        return Err(format!(
            "literal form: {} mismatches, expected one per case with r >= 1 ({with_r})",
            literal.mismatches.len()
        ));
    }
    for w in &literal.mismatches {
        let r: u32 = w
            .case
            .rsplit("r=")
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| format!("unparsable case {}", w.case))?;
        if r == 0 || w.expected.shift(r, 0) != w.actual {
            return Err(format!("{} is not off by exactly q^r", w.case));
        }
    }
    Ok(format!(
        "corrected form exact on {cases} cases; literal form off by exactly q^r on all {with_r} cases with r >= 1"
    ))
}

fn final_probe() -> Outcome {
    let mut offsets = Vec::new();
    for m in 1..=5usize {
        for n in 0..=5usize {
            let p = final_section_probe(m, n).map_err(|e| e.to_string())?;
            if !p.corners_always_m {
                return Err(format!("m={m} n={n}: corner counts {:?}", p.corner_counts));
            }
            let Some(c) = p.offset else {
                return Err(format!("m={m} n={n}: offsets {:?}", p.offsets));
            };
            if c != p.derived_offset {
                return Err(format!("m={m} n={n}: offset {c}, derived {}", p.derived_offset));
            }
            let squared: Vec<&str> = p
                .candidates
                .iter()
                .filter(|x| x.equals_squared)
                .map(|x| x.name.as_str())
                .collect();
            if !squared.contains(&"area,square_side") {
                return Err(format!("m={m} n={n}: squared target matched by {squared:?}"));
            }
            if n == 5 {
                offsets.push(format!("m={m}: {c} (printed {})", p.printed_offset));
            }
        }
    }
    Ok(format!(
        "corners = m, offset m(m-1)/2 [{}]; (area,square_side) gives the q^(c^2) sum",
        offsets.join(", ")
    ))
}

fn vandermonde() -> Outcome {
    let eq1 = verify_identity("eq1", &RangeSpec::new(14).sides(0, Some(7))).map_err(|e| e.to_string())?;
    let eq2 = verify_identity("eq2", &RangeSpec::new(12).sides(0, Some(6))).map_err(|e| e.to_string())?;
    let (c1, c2) = (require(&eq1)?, require(&eq2)?);
    let outside = eq2.notes.join("; ");
    Ok(format!(
        "eq1 {c1} cases, eq2 {c2} cases incl. (d,r) shifts, exact wherever both levels are >= 0; \
         literal equality fails off that domain: {outside}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 golden q-binomial", golden_qbinom),
        ("2 golden qt-binomial", golden_qt),
        ("3 golden scrambled gf", golden_scrambled),
        ("4 theorem sweep", theorem_sweep),
        ("5 corollary sweep", corollary_sweep),
        ("6 facts suite", facts_suite),
        ("7 bijection suite", bijection_suite),
        ("8 reduced formula", proposition_three),
        ("9 horizontal probe", final_probe),
        ("10 vandermonde", vandermonde),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
