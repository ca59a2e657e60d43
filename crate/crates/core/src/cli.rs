//! Command-line front end. [`run`] takes the argument vector and two
//! writers so it can be driven from tests; the binary only forwards its
//! exit status.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::biject::{self, ChainStep};
use crate::error::Error;
use crate::identities::{self, RangeSpec};
use crate::lattice::{self, enumerate_with_limit, PathWord, Sweep, DEFAULT_LIMIT};
use crate::qpoly::{qbinom, BiPoly};
use crate::scramble::{self, Scrambler};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RANGE: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
    Ascii,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stat {
    Area,
    Dees,
    Cindex,
    Corners,
    Bistat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    Lemma2,
    Lemma2v,
    Lemma2h,
    Chain,
}

#[derive(Parser, Debug)]
#[command(name = "qtbinom", version, about = "Path statistics, scrambled corner generating functions and their identities")]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for enumeration and sweeps.
    #[arg(long, global = true, env = "QTBINOM_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// Lift the m+n <= 24 enumeration cap.
    #[arg(long, global = true)]
    pub unsafe_large: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gaussian polynomial [N, K].
    Qbinom { n: u32, k: i64 },
    /// Generating function of a statistic over every path of the grid.
    Gf {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        scrambler: Option<String>,
        #[arg(long, value_enum, default_value_t = Stat::Bistat)]
        stat: Stat,
    },
    /// Every path of the grid with all its statistics.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        scrambler: Option<String>,
    },
    /// Compare a closed form with enumeration over a range of grids.
    Verify {
        identity: String,
        #[arg(long)]
        max_sum: usize,
        #[arg(long, default_value_t = 0)]
        min_side: usize,
        #[arg(long)]
        max_side: Option<usize>,
        /// Test every scrambler of every grid (the default).
        #[arg(long, conflicts_with = "sample")]
        all_scramblers: bool,
        /// Test K random scramblers per grid instead.
        #[arg(long, value_name = "K")]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0, requires = "sample")]
        seed: u64,
    },
    /// Trace one of the class bijections on a word.
    Bijection {
        lemma: Lemma,
        #[arg(long)]
        word: String,
        #[arg(long)]
        scrambler: String,
        /// Ornament value moved by lemma2v / lemma2h.
        #[arg(long)]
        ornament: Option<usize>,
    },
    /// Statistics under the scrambler with every horizontal ornament.
    Probe {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Table of the 2x4 paths, plain (1) or under H={1}, V={1,3} (2).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
}

/// One row of `enumerate`.
#[derive(Clone, Debug, Serialize)]
pub struct PathRecord {
    pub word: PathWord,
    pub dees: u32,
    pub area: u32,
    pub corners: u32,
    pub cindex: u32,
    pub scrambled_corners: u32,
    pub scrambled_cindex: u32,
    pub square_side: u32,
}

impl PathRecord {
    pub fn new(w: PathWord, o: &Scrambler) -> crate::Result<PathRecord> {
        Ok(PathRecord {
            dees: w.dees(),
            area: w.area(),
            corners: w.corners(),
            cindex: w.cindex(),
            scrambled_corners: scramble::scrambled_corners(&w, o)?,
            scrambled_cindex: scramble::scrambled_cindex(&w, o)?,
            square_side: w.square_side(),
            word: w,
        })
    }
}

const CSV_HEADER: &str = "word,dees,area,corners,cindex,scrambled_corners,scrambled_cindex,square_side";

struct Ctx {
    format: Option<Format>,
    jobs: usize,
    limit: usize,
}

impl Ctx {
    fn sweep(&self) -> Sweep {
        Sweep {
            limit: self.limit,
            jobs: self.jobs,
        }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LimitExceeded { .. } => EXIT_LIMIT,
        Error::InvalidWord { .. } | Error::ScramblerSyntax { .. } | Error::UnknownIdentity(_) => EXIT_USAGE,
        Error::ScramblerRange { .. } | Error::InvalidSwap { .. } | Error::Precondition(_) | Error::OutOfRange(_) => {
            EXIT_RANGE
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let ctx = Ctx {
        format: cli.format,
        jobs: cli.jobs.max(1),
        limit: if cli.unsafe_large { usize::MAX } else { DEFAULT_LIMIT },
    };
    let result = match cli.command {
        Command::Qbinom { n, k } => cmd_qbinom(&ctx, n, k),
        Command::Gf { m, n, scrambler, stat } => cmd_gf(&ctx, m, n, scrambler.as_deref(), stat),
        Command::Enumerate { m, n, scrambler } => cmd_enumerate(&ctx, m, n, scrambler.as_deref()),
        Command::Verify {
            identity,
            max_sum,
            min_side,
            max_side,
            all_scramblers: _,
            sample,
            seed,
        } => {
            let mut range = RangeSpec::new(max_sum).sides(min_side, max_side).jobs(ctx.jobs);
            range.limit = ctx.limit;
            if let Some(k) = sample {
                range = range.sample(k, seed);
            }
            cmd_verify(&ctx, &identity, &range, err)
        }
        Command::Bijection {
            lemma,
            word,
            scrambler,
            ornament,
        } => cmd_bijection(&ctx, lemma, &word, &scrambler, ornament),
        Command::Probe { m, n } => cmd_probe(&ctx, m, n),
        Command::Figure { which } => cmd_figure(&ctx, which),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn unsupported(cmd: &str, f: Format) -> Failure {
    Failure::Usage(format!("{cmd} has no {f:?} output").to_lowercase())
}

fn parse_scrambler(s: Option<&str>, m: usize, n: usize) -> Result<Scrambler, Error> {
    let o = match s {
        Some(s) => s.parse::<Scrambler>()?,
        None => Scrambler::empty(),
    };
    o.validate(m, n)?;
    Ok(o)
}

fn poly_text(p: &BiPoly, f: Format) -> String {
    match f {
        Format::Json => p.to_json() + "\n",
        Format::Csv => p.to_csv(),
        Format::Latex => p.to_latex() + "\n",
        Format::Ascii => format!("{p}\n"),
    }
}

fn cmd_qbinom(ctx: &Ctx, n: u32, k: i64) -> Outcome {
    let p = qbinom(n, k);
    let f = ctx.format.unwrap_or(Format::Ascii);
    let text = match f {
        Format::Ascii => format!("{p}\n"),
        _ => poly_text(&p.to_bi(), f),
    };
    Ok((text, EXIT_OK))
}

fn cmd_gf(ctx: &Ctx, m: usize, n: usize, scrambler: Option<&str>, stat: Stat) -> Outcome {
    let o = parse_scrambler(scrambler, m, n)?;
    let sweep = ctx.sweep();
    let p = match stat {
        Stat::Area => lattice::area_gf(m, n, sweep)?,
        Stat::Dees => lattice::stat_gf(m, n, sweep, |w| (lattice::dees(w), 0))?,
        Stat::Cindex => scramble::gf_scrambled(m, n, &o, sweep)?.specialize(false, true),
        Stat::Corners => scramble::gf_scrambled(m, n, &o, sweep)?.specialize(true, false),
        Stat::Bistat => scramble::gf_scrambled(m, n, &o, sweep)?,
    };
    Ok((poly_text(&p, ctx.format.unwrap_or(Format::Ascii)), EXIT_OK))
}

fn records(m: usize, n: usize, o: &Scrambler, limit: usize) -> Result<Vec<PathRecord>, Error> {
    enumerate_with_limit(m, n, limit)?.map(|w| PathRecord::new(w, o)).collect()
}

fn records_table(rows: &[PathRecord], o: &Scrambler, f: Format, drawings: bool) -> Result<String, Error> {
    let mut s = String::new();
    match f {
        Format::Csv => {
            s.push_str(CSV_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.word, r.dees, r.area, r.corners, r.cindex, r.scrambled_corners, r.scrambled_cindex, r.square_side
                ));
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                scrambler: &'a Scrambler,
                paths: &'a [PathRecord],
            }
            s = serde_json::to_string_pretty(&Doc { scrambler: o, paths: rows }).expect("records serialize");
            s.push('\n');
        }
        Format::Latex => {
            s.push_str("\\begin{tabular}{lrrrrrrr}\n");
            s.push_str("word & dees & area & corners & cindex & s.corners & s.cindex & square \\\\\n\\hline\n");
            for r in rows {
                s.push_str(&format!(
                    "\\texttt{{{}}} & {} & {} & {} & {} & {} & {} & {} \\\\\n",
                    r.word, r.dees, r.area, r.corners, r.cindex, r.scrambled_corners, r.scrambled_cindex, r.square_side
                ));
            }
            s.push_str("\\end{tabular}\n");
        }
        Format::Ascii => {
            let width = rows.first().map_or(4, |r| r.word.len().max(4));
            s.push_str(&format!(
                "{:<width$}  {:>4} {:>4} {:>7} {:>6} {:>9} {:>8} {:>6}\n",
                "word", "dees", "area", "corners", "cindex", "s.corners", "s.cindex", "square"
            ));
            for r in rows {
                s.push_str(&format!(
                    "{:<width$}  {:>4} {:>4} {:>7} {:>6} {:>9} {:>8} {:>6}\n",
                    r.word.to_string(),
                    r.dees,
                    r.area,
                    r.corners,
                    r.cindex,
                    r.scrambled_corners,
                    r.scrambled_cindex,
                    r.square_side
                ));
                if drawings {
                    s.push_str(&o.render_ascii(&r.word)?);
                    s.push('\n');
                }
            }
        }
    }
    Ok(s)
}

fn cmd_enumerate(ctx: &Ctx, m: usize, n: usize, scrambler: Option<&str>) -> Outcome {
    let o = parse_scrambler(scrambler, m, n)?;
    let rows = records(m, n, &o, ctx.limit)?;
    Ok((records_table(&rows, &o, ctx.format.unwrap_or(Format::Csv), false)?, EXIT_OK))
}

fn cmd_verify(ctx: &Ctx, name: &str, range: &RangeSpec, err: &mut dyn Write) -> Outcome {
    let report = identities::verify_identity(name, range)?;
    let _ = writeln!(err, "elapsed {:.3}s", report.elapsed.as_secs_f64());
    let text = match ctx.format.unwrap_or(Format::Ascii) {
        Format::Json => report.to_json() + "\n",
        Format::Ascii => report.summary() + "\n",
        f => return Err(unsupported("verify", f)),
    };
    Ok((text, if report.passed() { EXIT_OK } else { EXIT_FAIL }))
}

fn trace_ascii(t: &biject::BijectionTrace) -> Result<String, Error> {
    let mut s = format!(
        "{:?}: {} [{}] -> {} [{}]\n",
        t.kind, t.source_word, t.source_scrambler, t.target_word, t.target_scrambler
    );
    s.push_str(&format!(
        "class u={:?} v={:?} size {}, index {} -> {}, types {:?} -> {:?}\n",
        t.source_class.u,
        t.source_class.v,
        t.class_size,
        t.source_index,
        t.target_index,
        t.source_class.class_type,
        t.target_class.class_type
    ));
    s.push_str(&format!("delta cindex {} corners {}\n", t.delta_cindex, t.delta_corners));
    s.push_str(&t.source_scrambler.render_ascii(&t.source_word)?);
    s.push_str("\n\n");
    s.push_str(&t.target_scrambler.render_ascii(&t.target_word)?);
    s.push('\n');
    Ok(s)
}

fn cmd_bijection(ctx: &Ctx, lemma: Lemma, word: &str, scrambler: &str, ornament: Option<usize>) -> Outcome {
    let w: PathWord = word.parse()?;
    let o: Scrambler = scrambler.parse()?;
    o.validate(w.m(), w.n())?;
    let need = || ornament.ok_or_else(|| Failure::Usage("this lemma needs --ornament".to_string()));
    let f = ctx.format.unwrap_or(Format::Json);
    if lemma == Lemma::Chain {
        #[derive(Serialize)]
        struct Doc {
            plan: Vec<ChainStep>,
            steps: Vec<biject::BijectionTrace>,
            target_word: PathWord,
            target_scrambler: Scrambler,
            delta_cindex: i64,
            delta_corners: i64,
        }
        let steps = biject::apply_chain(&w, &o)?;
        let (tw, ts) = biject::unscramble(&w, &o)?;
        let doc = Doc {
            plan: biject::unscramble_chain(&o),
            delta_cindex: steps.iter().map(|t| t.delta_cindex).sum(),
            delta_corners: steps.iter().map(|t| t.delta_corners).sum(),
            steps,
            target_word: tw,
            target_scrambler: ts,
        };
        let text = match f {
            Format::Json => serde_json::to_string_pretty(&doc).expect("trace serializes") + "\n",
            Format::Ascii => {
                let mut s = String::new();
                for t in &doc.steps {
                    s.push_str(&trace_ascii(t)?);
                    s.push('\n');
                }
                s.push_str(&format!(
                    "total: {} [{}] -> {} [{}], delta cindex {} corners {}\n",
                    w, o, doc.target_word, doc.target_scrambler, doc.delta_cindex, doc.delta_corners
                ));
                s
            }
            f => return Err(unsupported("bijection", f)),
        };
        return Ok((text, EXIT_OK));
    }
    let t = match lemma {
        Lemma::Lemma2 => biject::lemma2_trace(&w, &o)?,
        Lemma::Lemma2v => biject::lemma2v_trace(&w, &o, need()?)?,
        Lemma::Lemma2h => biject::lemma2h_trace(&w, &o, need()?)?,
        Lemma::Chain => unreachable!(),
    };
    let text = match f {
        Format::Json => serde_json::to_string_pretty(&t).expect("trace serializes") + "\n",
        Format::Ascii => trace_ascii(&t)?,
        f => return Err(unsupported("bijection", f)),
    };
    Ok((text, EXIT_OK))
}

fn cmd_probe(ctx: &Ctx, m: usize, n: usize) -> Outcome {
    let report = identities::final_section_probe(m, n)?;
    let text = match ctx.format.unwrap_or(Format::Ascii) {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Ascii => report.summary(),
        f => return Err(unsupported("probe", f)),
    };
    Ok((text, EXIT_OK))
}

fn cmd_figure(ctx: &Ctx, which: u8) -> Outcome {
    let o = if which == 1 {
        Scrambler::empty()
    } else {
        "H=1;V=1,3".parse().expect("fixed scrambler")
    };
    let rows = records(2, 4, &o, DEFAULT_LIMIT)?;
    let f = ctx.format.unwrap_or(Format::Ascii);
    let mut text = String::new();
    if f == Format::Ascii {
        text.push_str(&format!("The {} paths of the 2x4 grid, O = {o}\n\n", rows.len()));
        for r in &rows {
            let stats = if which == 1 {
                format!("area {}  cindex {}  corners {}", r.area, r.cindex, r.corners)
            } else {
                format!("cindex {}  corners {}", r.scrambled_cindex, r.scrambled_corners)
            };
            text.push_str(&format!("{}\n{}\n{}\n\n", r.word, o.render_ascii(&r.word)?, stats));
        }
        let gf = scramble::gf_scrambled(2, 4, &o, Sweep::serial())?;
        text.push_str(&format!("generating function: {gf}\n"));
    } else {
        text = records_table(&rows, &o, f, false)?;
    }
    Ok((text, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["qtbinom"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn qbinom_text() {
        let (code, out, _) = call(&["qbinom", "6", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1+q+2q^2+2q^3+3q^4+2q^5+2q^6+q^7+q^8\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["gf", "--m", "2", "--n", "2", "--scrambler", "H=0"]).0, EXIT_USAGE);
        assert_eq!(call(&["gf", "--m", "2", "--n", "2", "--scrambler", "H=5;V="]).0, EXIT_RANGE);
        assert_eq!(call(&["gf", "--m", "20", "--n", "20"]).0, EXIT_LIMIT);
        assert_eq!(call(&["verify", "nope", "--max-sum", "3"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "eq7-literal", "--max-sum", "4"]).0, EXIT_FAIL);
        assert_eq!(call(&["bijection", "lemma2v", "--word", "RRD", "--scrambler", "H=;V=2"]).0, EXIT_USAGE);
        assert_eq!(call(&["bijection", "lemma2", "--word", "RXD", "--scrambler", "H=;V=2"]).0, EXIT_USAGE);
        assert_eq!(call(&["probe", "--m", "0", "--n", "2"]).0, EXIT_RANGE);
    }
}
