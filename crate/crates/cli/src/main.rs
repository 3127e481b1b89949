//! `jwbraid`: brackets, projectors, diagonals, multicone rewriting and
//! Khovanov homology stabilization from the command line.
//!
//! Output goes to stdout in the chosen format. The exit code is 0 when every
//! verdict the command computes passes, 1 when one fails (the report is
//! still printed), and 2 on errors, which are printed to stderr as
//! `{"error":{"kind":...,"message":...}}`.

mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jwbraid::{
    bracket, bracket_preserved, bracket_stabilization, find_diagonals, find_diagonals_after, jones_wenzl, jw_series,
    khovanov_homology, minq_check, multicone_corpus, multicone_entries, multicone_term, normalized_bracket,
    normalized_homology_upto, pull_turnbacks, raw_bracket, stabilization_homology_report, stabilization_table,
    verify_axioms, Coefficients, LaurentPoly, TLElement, DEFAULT_MAX_CROSSINGS, DEFAULT_WINDOW,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use input::ExperimentConfig;
use render::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Parser)]
#[command(
    name = "jwbraid",
    version,
    about = "Kauffman brackets, Jones-Wenzl projectors and Khovanov homology of braids"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the ChaCha8 generator used by randomized commands [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest cube a homology computation may build [default: 20]
    #[arg(long, global = true)]
    max_crossings: Option<usize>,
    /// JSON experiment config; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Kauffman bracket of a braid word as a Temperley-Lieb element
    Bracket {
        #[arg(long)]
        n: Option<usize>,
        /// Signed generator indices separated by spaces or commas
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Multiply by (-1)^{n-} q^{-N}
        #[arg(long)]
        normalized: bool,
    },
    /// Jones-Wenzl projector as power series, optionally with an axiom check
    Jw {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: Option<i64>,
        /// Verify idempotence, turnback killing and the identity coefficient
        #[arg(long)]
        check: bool,
    },
    /// Diagonals of a word, or of a prefix of an infinite braid spec
    Diagonals {
        #[arg(long, conflicts_with = "word")]
        spec: Option<PathBuf>,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
    },
    /// Multicone terms and turnback pulling
    Multicone {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "corpus")]
        word: Option<String>,
        /// The i-th multicone term (partially resolved)
        #[arg(long, conflicts_with = "entry")]
        index: Option<usize>,
        /// A fully resolved entry by its resolution bits, bottommost first
        #[arg(long)]
        entry: Option<u64>,
        /// Pull turnbacks and report the shift ledger
        #[arg(long)]
        pull: bool,
        /// Run the shift and min-q checks over a seeded corpus of this many words
        #[arg(long, conflicts_with_all = ["word", "index", "entry"])]
        corpus: Option<usize>,
    },
    /// Coefficient-wise stabilization of normalized brackets against P_n
    Stabilize {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        order: Option<i64>,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Khovanov homology of a closed braid
    Kh {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// `trace`, inline JSON, or a JSON file
        #[arg(long)]
        closure: Option<String>,
        #[arg(long)]
        coeffs: Option<Coefficients>,
        /// Report the normalized bigrading (i + n-, j - N)
        #[arg(long)]
        normalized: bool,
        /// Only homological degrees up to this (normalized) value
        #[arg(long)]
        imax: Option<usize>,
    },
    /// Per-(i, j) stabilization of normalized homology over prefixes
    StabilizeKh {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        imax: Option<usize>,
        #[arg(long)]
        closure: Option<String>,
        #[arg(long)]
        coeffs: Option<Coefficients>,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Stabilized homology of a braid next to its torus counterpart
    CompareTorus {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        imax: Option<usize>,
        #[arg(long)]
        closure: Option<String>,
        #[arg(long)]
        coeffs: Option<Coefficients>,
        #[arg(long)]
        window: Option<usize>,
    },
}

struct Ctx {
    config: ExperimentConfig,
    format: Format,
    seed: u64,
    max_crossings: usize,
}

impl Ctx {
    fn len(&self, flag: Option<usize>) -> Result<usize> {
        match flag.or(self.config.max_len) {
            Some(l) => Ok(l),
            None => bail!("no prefix length: pass --len or set `max_len` in the config"),
        }
    }

    fn coeffs(&self, flag: Option<Coefficients>) -> Coefficients {
        flag.or(self.config.coefficients).unwrap_or(Coefficients::Q)
    }

    fn window(&self, flag: Option<usize>) -> usize {
        flag.or(self.config.window).unwrap_or(DEFAULT_WINDOW)
    }
}

fn element_rows<R: jwbraid::Coeff>(report: &mut Report, x: &TLElement<R>) {
    let mut terms: Vec<(String, String)> = x.terms().map(|(m, c)| (m.to_string(), c.to_string())).collect();
    terms.sort();
    for (m, c) in terms {
        report.row(vec![m, c]);
    }
}

fn cmd_bracket(n: Option<usize>, word: &str, normalized: bool) -> Result<(Report, bool)> {
    let w = input::word(n, word)?;
    let x: TLElement<LaurentPoly> = if normalized { normalized_bracket(&w) } else { bracket(&w) };
    let mut r = Report::new(
        &json!({"n": w.n(), "word": w.to_string(), "normalized": normalized, "element": x}),
        &["matching", "coefficient"],
    )?;
    element_rows(&mut r, &x);
    Ok((r, true))
}

fn cmd_jw(ctx: &Ctx, n: usize, order: Option<i64>, check: bool) -> Result<(Report, bool)> {
    if n == 0 {
        bail!("P_0 is not defined; use --n 1 or more");
    }
    let order = order.or(ctx.config.order).unwrap_or(12);
    let series = jw_series(n, order)?;
    let axioms = check.then(|| verify_axioms(&jones_wenzl(n)));
    let ok = axioms.as_ref().is_none_or(|a| a.passed());
    let mut r = Report::new(
        &json!({"n": n, "order": order, "element": series, "axioms": axioms}),
        &["matching", "coefficient"],
    )?;
    if let Some(a) = &axioms {
        r.note(format!("axioms: {}", if a.passed() { "pass" } else { "FAIL" }));
    }
    element_rows(&mut r, &series);
    Ok((r, ok))
}

fn cmd_diagonals(
    ctx: &Ctx,
    spec: Option<&PathBuf>,
    len: Option<usize>,
    n: Option<usize>,
    word: Option<&str>,
) -> Result<(Report, bool)> {
    let (w, skip) = match word {
        Some(text) => (input::word(n, text)?, 0),
        None => {
            let s = input::spec(spec, &ctx.config)?;
            let l = ctx.len(len)?;
            (s.prefix(l), s.prefix_len().min(l))
        }
    };
    let d = find_diagonals_after(&w, skip)?;
    let mut r = Report::new(&json!({"n": w.n(), "word": w.to_string(), "diagonals": d}), &["diagonal", "positions"])?;
    r.note(format!("y = {}, z = {}", d.y, d.z));
    for (k, p) in d.diagonals.iter().enumerate() {
        r.row(vec![(k + 1).to_string(), format!("{p:?}")]);
    }
    Ok((r, true))
}

fn cmd_multicone(
    ctx: &Ctx,
    n: Option<usize>,
    word: Option<&str>,
    index: Option<usize>,
    entry: Option<u64>,
    pull: bool,
    corpus: Option<usize>,
) -> Result<(Report, bool)> {
    if let Some(words) = corpus {
        return multicone_corpus_report(ctx, words);
    }
    let w = input::word(n, word.unwrap_or_default())?;
    let d = find_diagonals(&w)?;
    let t = match (index, entry) {
        (Some(i), _) => multicone_term(&w, &d, i)?,
        (None, Some(mask)) => {
            let all = multicone_entries(&w, &d, 20)?;
            match all.get((mask as usize).wrapping_sub(1)) {
                Some(t) if mask > 0 => t.clone(),
                _ => bail!("entry {mask} out of range 1..={}", all.len()),
            }
        }
        (None, None) => multicone_term(&w, &d, 1)?,
    };
    let mut body = json!({"n": w.n(), "word": w.to_string(), "y": d.y, "term": t.to_string(), "r": t.r});
    let mut ok = true;
    let mut r;
    if pull {
        let (out, ledger) = pull_turnbacks(&t, 0)?;
        let preserved = bracket_preserved(&t, &out, &ledger);
        let bound = ledger.s_q >= ledger.s_h && ledger.s_h >= d.y as i64;
        ok = preserved && bound;
        body["result"] = json!(out.to_string());
        body["ledger"] = serde_json::to_value(&ledger)?;
        body["raw_bracket_in"] = serde_json::to_value(raw_bracket(&t))?;
        body["raw_bracket_out"] = serde_json::to_value(raw_bracket(&out))?;
        body["bracket_preserved"] = json!(preserved);
        body["shift_bound"] = json!(bound);
        r = Report::new(&body, &["move", "direction", "generator", "slice"])?;
        r.note(format!("{t}  =>  {out}"));
        r.note(format!("s_h = {}, s_q = {}, y = {}", ledger.s_h, ledger.s_q, d.y));
        r.note(format!("bracket preserved: {preserved}; s_q >= s_h >= y: {bound}"));
        for m in &ledger.moves {
            r.row(vec![
                format!("{:?}", m.kind),
                format!("{:?}", m.direction),
                m.generator.to_string(),
                m.slice.to_string(),
            ]);
        }
    } else {
        r = Report::new(&body, &["term", "r"])?;
        r.row(vec![t.to_string(), t.r.to_string()]);
    }
    Ok((r, ok))
}

fn multicone_corpus_report(ctx: &Ctx, words: usize) -> Result<(Report, bool)> {
    let cases = multicone_corpus(ctx.seed, words, 4, 14, 6)?;
    let mut rows = Vec::new();
    let (mut shift_ok, mut preserved_ok, mut minq_ok) = (0, 0, 0);
    for c in &cases {
        let (out, ledger) = pull_turnbacks(&c.entry, 0)?;
        let shift = ledger.s_q >= ledger.s_h && ledger.s_h >= c.y as i64;
        let preserved = bracket_preserved(&c.entry, &out, &ledger);
        let m = minq_check(&out, &ledger, &jwbraid::ClosureSpec::Trace, c.y, ctx.max_crossings)?;
        shift_ok += shift as usize;
        preserved_ok += preserved as usize;
        minq_ok += (m.equal && m.bound_holds) as usize;
        rows.push(vec![
            format!("{:?}", c.word),
            c.entry.to_string(),
            c.y.to_string(),
            ledger.s_h.to_string(),
            ledger.s_q.to_string(),
            preserved.to_string(),
            m.enumerated.to_string(),
            m.formula.to_string(),
            m.bound.to_string(),
        ]);
    }
    let total = cases.len();
    let ok = shift_ok == total && preserved_ok == total && minq_ok == total;
    let summary = json!({
        "seed": ctx.seed, "entries": total,
        "shift_estimate": shift_ok, "bracket_preserved": preserved_ok, "minq": minq_ok,
    });
    let mut r = Report::new(&summary, &["word", "entry", "y", "s_h", "s_q", "preserved", "minq", "formula", "bound"])?;
    r.note(format!("{total} entries: shift {shift_ok}, preserved {preserved_ok}, min-q {minq_ok}"));
    for row in rows {
        r.row(row);
    }
    Ok((r, ok))
}

fn cmd_stabilize(
    ctx: &Ctx,
    spec: Option<&PathBuf>,
    len: Option<usize>,
    order: Option<i64>,
    window: Option<usize>,
) -> Result<(Report, bool)> {
    let s = input::spec(spec, &ctx.config)?;
    let len = ctx.len(len)?;
    let order = order.or(ctx.config.order).unwrap_or(12);
    let rep = bracket_stabilization(&s, len, order, ctx.window(window))?;
    if !s.is_complete() {
        eprintln!("warning: the braid is not complete; non-convergence is expected");
    }
    let mut r = Report::new(&rep, &["matching", "exponent", "stable_from", "value", "target"])?;
    r.note(format!("verdict: {:?}", rep.verdict));
    let yz: Vec<String> = rep.diagonals.iter().map(|(y, z)| format!("{y}/{z}")).collect();
    r.note(format!("y/z per length: {}", yz.join(" ")));
    for c in &rep.records {
        r.row(vec![
            c.basis.clone(),
            c.exponent.to_string(),
            c.stable_from.to_string(),
            c.value.to_string(),
            c.target.to_string(),
        ]);
    }
    Ok((r, rep.passed()))
}

fn cmd_kh(
    ctx: &Ctx,
    n: Option<usize>,
    word: &str,
    closure: Option<&str>,
    coeffs: Option<Coefficients>,
    normalized: bool,
    imax: Option<usize>,
) -> Result<(Report, bool)> {
    let w = input::word(n, word)?;
    let c = input::closure(closure, &ctx.config)?;
    let coeffs = ctx.coeffs(coeffs);
    let h = if normalized || imax.is_some() {
        let h = normalized_homology_upto(&w, &c, coeffs, imax, ctx.max_crossings)?;
        if normalized {
            h
        } else {
            bail!("--imax applies to the normalized grading; add --normalized")
        }
    } else {
        if w.len() > ctx.max_crossings {
            bail!(jwbraid::Error::TooManyCrossings { crossings: w.len(), limit: ctx.max_crossings });
        }
        khovanov_homology(&w, &c, coeffs)?
    };
    let mut r = Report::new(&h, &["i", "j", "rank", "torsion"])?;
    for (&(i, j), e) in &h.entries {
        let t: Vec<String> = e.torsion.iter().map(|x| x.to_string()).collect();
        r.row(vec![i.to_string(), j.to_string(), e.rank.to_string(), t.join(" ")]);
    }
    Ok((r, true))
}

struct HomologyArgs<'a> {
    spec: Option<&'a PathBuf>,
    len: Option<usize>,
    imax: Option<usize>,
    closure: Option<&'a str>,
    coeffs: Option<Coefficients>,
    window: Option<usize>,
}

fn cmd_stabilize_kh(ctx: &Ctx, a: HomologyArgs<'_>) -> Result<(Report, bool)> {
    let s = input::spec(a.spec, &ctx.config)?;
    let len = ctx.len(a.len)?;
    let imax = a.imax.or(ctx.config.i_max).unwrap_or(2);
    let window = ctx.window(a.window);
    let c = input::closure(a.closure, &ctx.config)?;
    let t = stabilization_table(&s, &c, len, imax, ctx.coeffs(a.coeffs), ctx.max_crossings)?;
    let ok = t.rows.iter().all(|x| x.stable_from + window <= len);
    let mut header = vec!["i".to_string(), "j".to_string(), "stable_from".to_string()];
    header.extend((0..=len).map(|l| format!("l={l}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut r = Report::new(&json!({"window": window, "stabilized": ok, "table": t}), &header)?;
    r.note(format!("stabilized within window {window}: {ok}"));
    for x in &t.rows {
        let mut row = vec![x.i.to_string(), x.j.to_string(), x.stable_from.to_string()];
        row.extend(x.ranks.iter().map(|v| v.to_string()));
        r.row(row);
    }
    Ok((r, ok))
}

fn cmd_compare_torus(ctx: &Ctx, a: HomologyArgs<'_>) -> Result<(Report, bool)> {
    let s = input::spec(a.spec, &ctx.config)?;
    let len = ctx.len(a.len)?;
    let imax = a.imax.or(ctx.config.i_max).unwrap_or(2);
    let c = input::closure(a.closure, &ctx.config)?;
    let rep = stabilization_homology_report(
        &s,
        &c,
        len,
        imax,
        ctx.window(a.window),
        ctx.coeffs(a.coeffs),
        ctx.max_crossings,
    )?;
    let mut r = Report::new(&rep, &["i", "j", "braid", "torus"])?;
    r.note(format!("match: {}", rep.matches));
    let show = |v: Option<usize>| v.map_or("unsettled".to_string(), |x| x.to_string());
    let braid = rep.braid.stabilized(len, rep.window);
    let torus = rep.torus.stabilized(len, rep.window);
    let mut keys: Vec<(i64, i64)> = braid.keys().chain(torus.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for k in keys {
        r.row(vec![k.0.to_string(), k.1.to_string(), show(braid.get(&k).copied()), show(torus.get(&k).copied())]);
    }
    Ok((r, rep.matches))
}

fn run(cli: Cli) -> Result<(Report, bool, Format)> {
    let config = ExperimentConfig::load(cli.global.config.as_deref())?;
    let format = cli.global.format.or(config.format).unwrap_or(Format::Json);
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let ctx = Ctx {
        seed: cli.global.seed.or(config.seed).unwrap_or(0),
        max_crossings: cli.global.max_crossings.or(config.max_crossings).unwrap_or(DEFAULT_MAX_CROSSINGS),
        format,
        config,
    };
    let (report, ok) = match &cli.command {
        Command::Bracket { n, word, normalized } => cmd_bracket(*n, word, *normalized)?,
        Command::Jw { n, order, check } => cmd_jw(&ctx, *n, *order, *check)?,
        Command::Diagonals { spec, len, n, word } => cmd_diagonals(&ctx, spec.as_ref(), *len, *n, word.as_deref())?,
        Command::Multicone { n, word, index, entry, pull, corpus } => {
            cmd_multicone(&ctx, *n, word.as_deref(), *index, *entry, *pull, *corpus)?
        }
        Command::Stabilize { spec, len, order, window } => cmd_stabilize(&ctx, spec.as_ref(), *len, *order, *window)?,
        Command::Kh { n, word, closure, coeffs, normalized, imax } => {
            cmd_kh(&ctx, *n, word, closure.as_deref(), *coeffs, *normalized, *imax)?
        }
        Command::StabilizeKh { spec, len, imax, closure, coeffs, window } => cmd_stabilize_kh(
            &ctx,
            HomologyArgs {
                spec: spec.as_ref(),
                len: *len,
                imax: *imax,
                closure: closure.as_deref(),
                coeffs: *coeffs,
                window: *window,
            },
        )?,
        Command::CompareTorus { spec, len, imax, closure, coeffs, window } => cmd_compare_torus(
            &ctx,
            HomologyArgs {
                spec: spec.as_ref(),
                len: *len,
                imax: *imax,
                closure: closure.as_deref(),
                coeffs: *coeffs,
                window: *window,
            },
        )?,
    };
    Ok((report, ok, ctx.format))
}

fn error_kind(e: &anyhow::Error) -> String {
    match e.downcast_ref::<jwbraid::Error>() {
        Some(inner) => {
            let debug = format!("{inner:?}");
            debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
        }
        None => "Error".to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(report, ok, format)| Ok((report.render(format)?, ok))) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let body = json!({"error": {"kind": error_kind(&e), "message": format!("{e:#}")}});
            eprintln!("{body}");
            ExitCode::from(2)
        }
    }
}
