mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};
use slpwp_core::aut::{checked_aut_word_problem, nielsen_catalog, whitehead_catalog, AutSet, Decomposition};
use slpwp_core::bench::size_growth;
use slpwp_core::free_group::{free_reduce, is_trivial_compressed, reduced_slp};
use slpwp_core::lyndon::{LyndonError, LyndonGroup};
use slpwp_core::normal_form::{check_conditions, normal_form};
use slpwp_core::oracles::{britton_wp_level1, expand_reduce_oracle, naive_aut_compose, power_membership};
use slpwp_core::phi::{compressed_word_problem_report, word_problem, CwpReport};
use slpwp_core::tower::Tower;
use slpwp_core::word::{parse_word, DEFAULT_WORD_CAP};
use slpwp_core::{compare, Alphabet, Slp, Word};

use report::RunReport;

#[derive(Parser)]
#[command(name = "slpwp", version, about = "Word problems through compressed words")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Print a structured JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Leave wall time out of reports, for byte-identical output.
    #[arg(long, global = true)]
    no_time: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Straight-line programs over an open alphabet.
    #[command(subcommand)]
    Slp(SlpCmd),
    /// Free group computations.
    #[command(subcommand)]
    Fg(FgCmd),
    /// Tower files.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Word problem for a plain word in the top group of a tower.
    Wp { tower: PathBuf, word: String },
    /// Compressed word problem for a program over the tower alphabet.
    Cwp {
        tower: PathBuf,
        slp: PathBuf,
        /// Write the program over the base alphabet to this file (`-` for stdout).
        #[arg(long, value_name = "FILE")]
        emit_reduced: Option<PathBuf>,
    },
    /// Normal form at the top level, with its condition checks.
    Nf { tower: PathBuf, word: String },
    /// Lyndon length on a one-letter extension.
    Len {
        tower: PathBuf,
        word: String,
        /// Also print l1 at this M.
        #[arg(long)]
        l1: Option<u64>,
        /// Print the common prefix length with this second word instead.
        #[arg(long, value_name = "WORD")]
        cp: Option<String>,
    },
    /// Automorphism computations.
    #[command(subcommand)]
    Aut(AutCmd),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Size accounting.
    #[command(subcommand)]
    Bench(BenchCmd),
}

#[derive(Subcommand)]
enum SlpCmd {
    /// Print the produced word.
    Eval { slp: PathBuf },
    /// Print the produced length.
    Len { slp: PathBuf },
    /// Are the two produced words equal?
    Equal { a: PathBuf, b: PathBuf },
    /// Print a program for `word^q`; generators are the names in the word.
    Power {
        word: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
}

#[derive(Subcommand)]
enum FgCmd {
    /// Freely reduce a word; generators are the names appearing in it.
    Reduce { word: String },
    /// Is the program trivial in the free group?
    Cwp {
        slp: PathBuf,
        /// Write the freely reduced program to this file (`-` for stdout).
        #[arg(long, value_name = "FILE")]
        emit_reduced: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TowerCmd {
    /// Validate a tower file and print its warnings.
    Check { tower: PathBuf },
    /// Print the constants L, N and M.
    Constants { tower: PathBuf },
}

#[derive(Subcommand)]
enum AutCmd {
    /// Is the composition the identity? `auts` is an automorphism file, or
    /// `@nielsen` for the Nielsen automorphisms of a free base.
    Wp { tower: PathBuf, auts: String, composition: String },
    /// Print a generated automorphism catalog in the automorphism file format.
    Catalog {
        tower: PathBuf,
        /// Free-product decomposition file; without it the Nielsen catalog
        /// of the base generators is printed.
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Expand and freely reduce a program.
    ExpandReduce { slp: PathBuf },
    /// Word problem in a one-level tower by Britton reduction.
    Britton { tower: PathBuf, word: String },
    /// `c` with `g = u^c` in the free group, if any.
    Power { u: String, g: String },
    /// Image of one generator under a composition, by literal substitution.
    Compose { tower: PathBuf, auts: String, composition: String, generator: String },
    /// Letter-by-letter comparison of two expanded programs.
    Equal { a: PathBuf, b: PathBuf },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Program sizes after reduction for the doubling family `word^(2^k)`.
    SizeGrowth {
        tower: PathBuf,
        word: String,
        #[arg(long, default_value_t = 5)]
        from: usize,
        #[arg(long, default_value_t = 20)]
        to: usize,
    },
}

enum Failure {
    /// Bad input; exit status 2.
    Usage(String),
    /// A computed result failed its own consistency check; exit status 3.
    Invariant(String),
}

type Res<T> = Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn cap() -> Res<usize> {
    match std::env::var("WP_EXPAND_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("WP_EXPAND_CAP: not a number: `{v}`"))),
        Err(_) => Ok(DEFAULT_WORD_CAP),
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_tower(path: &Path) -> Res<Tower> {
    Tower::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn tower_word(tower: &Tower, text: &str) -> Res<Word> {
    parse_word(text, tower.alphabet(), cap()?).map_err(usage)
}

fn load_slp(path: &Path, alphabet: &mut Alphabet, open: bool) -> Res<Slp> {
    Slp::parse(&read(path)?, alphabet, open).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Alphabet made of the identifiers occurring in the given texts.
fn alphabet_of(texts: &[&str]) -> Alphabet {
    let mut al = Alphabet::new();
    for t in texts {
        for tok in t.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\'')) {
            if tok.is_empty() || tok == "e" || tok.chars().all(|c| c.is_ascii_digit()) {
                continue;
            }
            al.intern(tok);
        }
    }
    al
}

fn emit(path: &Path, text: &str) -> Res<()> {
    if path == Path::new("-") {
        let _ = std::io::stdout().lock().write_all(text.as_bytes());
        Ok(())
    } else {
        fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn load_auts(tower: &Tower, auts: &str) -> Res<AutSet> {
    if auts == "@nielsen" {
        return Ok(nielsen_catalog(tower.base_generators()));
    }
    AutSet::parse(&read(Path::new(auts))?, tower.alphabet()).map_err(|e| usage(format!("{auts}: {e}")))
}

fn cwp_sizes(r: RunReport, rep: &CwpReport) -> RunReport {
    let ps: Vec<String> = rep.p.descending().map(|p| p.to_string()).collect();
    r.size("input_size", rep.input_size)
        .size("output_size", rep.base_size)
        .size("level_sizes", rep.level_sizes.clone())
        .size("produced_length", rep.produced_length.to_string())
        .size("p", ps)
}

fn dispatch(cmd: Cmd) -> Res<RunReport> {
    match cmd {
        Cmd::Slp(c) => slp_cmd(c),
        Cmd::Fg(c) => fg_cmd(c),
        Cmd::Tower(c) => tower_cmd(c),
        Cmd::Wp { tower, word } => {
            let t = load_tower(&tower)?;
            let w = tower_word(&t, &word)?;
            let b = word_problem(&t, w.letters());
            Ok(RunReport::new("wp").input("tower", tower.display().to_string()).input("word", word).boolean(b).size("word_length", w.len()))
        }
        Cmd::Cwp { tower, slp, emit_reduced } => {
            let t = load_tower(&tower)?;
            let mut al = t.alphabet().clone();
            let a = load_slp(&slp, &mut al, false)?;
            let rep = compressed_word_problem_report(&t, &a, emit_reduced.is_some());
            if let (Some(path), Some(prog)) = (&emit_reduced, &rep.base_program) {
                emit(path, &prog.to_text(t.alphabet()))?;
            }
            let r = RunReport::new("cwp").input("tower", tower.display().to_string()).input("slp", slp.display().to_string());
            Ok(cwp_sizes(r, &rep).boolean(rep.trivial.expect("decided")))
        }
        Cmd::Nf { tower, word } => {
            let t = load_tower(&tower)?;
            let w = tower_word(&t, &word)?;
            let nf = normal_form(&t, w.letters());
            let rep = check_conditions(&t, w.letters(), &nf);
            if !rep.all_ok() {
                return Err(Failure::Invariant(format!("normal form fails its checks: {rep:?}")));
            }
            let al = t.alphabet();
            let syllables: Vec<Value> = nf
                .syllables
                .iter()
                .map(|s| {
                    json!({
                        "g": al.display_word(s.g.letters()),
                        "u": al.display_word(t.entry(nf.level, s.entry).u.letters()),
                        "c": s.c,
                        "alpha": s.alpha,
                    })
                })
                .collect();
            let text = format!(
                "{}m = {}, flattened length {} <= {}",
                nf.display(&t),
                nf.syllable_count(),
                rep.flat_len,
                rep.length_bound
            );
            let v = json!({
                "level": nf.level,
                "m": nf.syllable_count(),
                "syllables": syllables,
                "tail": al.display_word(nf.tail.letters()),
                "checks": {
                    "nonzero_alpha": rep.nonzero_alpha,
                    "lower_alphabet": rep.lower_alphabet,
                    "no_commuting_neighbours": rep.no_commuting_neighbours,
                    "equal_to_input": rep.equal_to_input,
                },
            });
            Ok(RunReport::new("nf")
                .input("tower", tower.display().to_string())
                .input("word", word)
                .result(v, text)
                .size("word_length", w.len())
                .size("flat_length", rep.flat_len)
                .size("length_bound", rep.length_bound.to_string()))
        }
        Cmd::Len { tower, word, l1, cp } => {
            let t = load_tower(&tower)?;
            let g = LyndonGroup::new(&t).map_err(usage)?;
            let w = tower_word(&t, &word)?;
            let r = RunReport::new("len").input("tower", tower.display().to_string()).input("word", word);
            if let Some(other) = cp {
                let w2 = tower_word(&t, &other)?;
                let c = g.common_prefix_length(w.letters(), w2.letters()).map_err(|e| match e {
                    LyndonError::NotIntegral(_) => Failure::Invariant(e.to_string()),
                    e => usage(e),
                })?;
                return Ok(r.input("cp", other).result(json!(c.to_array(2)), c.to_string()));
            }
            let l = g.length(w.letters());
            match l1 {
                None => Ok(r.result(json!(l.to_array(2)), l.to_string())),
                Some(m) => {
                    let v = g.l1(&g.reduced_form(w.letters()), m);
                    Ok(r.input("m", m).result(json!({ "length": l.to_array(2), "l1": v }), format!("{l}\nl1 = {v}")))
                }
            }
        }
        Cmd::Aut(c) => aut_cmd(c),
        Cmd::Oracle(c) => oracle_cmd(c),
        Cmd::Bench(BenchCmd::SizeGrowth { tower, word, from, to }) => {
            let t = load_tower(&tower)?;
            let w = tower_word(&t, &word)?;
            let g = size_growth(&t, &w, from..=to);
            let mut text = String::from("k\t|A|\t|A_1|\tbound\tP\n");
            let rows: Vec<Value> = g
                .rows
                .iter()
                .map(|r| {
                    text.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.k, r.input_size, r.output_size, r.bound, r.p));
                    json!({ "k": r.k, "input_size": r.input_size, "output_size": r.output_size, "bound": r.bound.to_string(), "p": r.p })
                })
                .collect();
            text.push_str(&format!(
                "fit: |A_1| ~ {:.4} |A| + {:.4}, max relative residual {:.4}\nbound: |A_1| <= {:.4} |A| + {:.4}, holds: {}",
                g.slope,
                g.intercept,
                g.max_relative_residual,
                g.c1,
                g.c2,
                g.within_bounds()
            ));
            if !g.within_bounds() {
                return Err(Failure::Invariant(format!("size bound violated\n{text}")));
            }
            let v = json!({
                "rows": rows,
                "slope": g.slope,
                "intercept": g.intercept,
                "max_relative_residual": g.max_relative_residual,
                "c1": g.c1,
                "c2": g.c2,
            });
            Ok(RunReport::new("bench size-growth")
                .input("tower", tower.display().to_string())
                .input("word", word)
                .input("from", from)
                .input("to", to)
                .result(v, text))
        }
    }
}

fn slp_cmd(c: SlpCmd) -> Res<RunReport> {
    match c {
        SlpCmd::Eval { slp } => {
            let mut al = Alphabet::new();
            let a = load_slp(&slp, &mut al, true)?;
            let w = a.expand(cap()?).map_err(usage)?;
            let s = al.display_word(w.letters());
            Ok(RunReport::new("slp eval").input("slp", slp.display().to_string()).result(json!(s), s).size("input_size", a.size()))
        }
        SlpCmd::Len { slp } => {
            let mut al = Alphabet::new();
            let a = load_slp(&slp, &mut al, true)?;
            let n = a.produced_length().to_string();
            Ok(RunReport::new("slp len").input("slp", slp.display().to_string()).result(json!(n), n).size("input_size", a.size()))
        }
        SlpCmd::Power { word, q } => slp_power(word, q),
        SlpCmd::Equal { a, b } => {
            let mut al = Alphabet::new();
            let x = load_slp(&a, &mut al, true)?;
            let y = load_slp(&b, &mut al, true)?;
            Ok(RunReport::new("slp equal")
                .input("a", a.display().to_string())
                .input("b", b.display().to_string())
                .boolean(compare::equal(&x, &y))
                .size("size_a", x.size())
                .size("size_b", y.size()))
        }
    }
}

fn slp_power(word: String, q: String) -> Res<RunReport> {
    let al = alphabet_of(&[&word]);
    let w = parse_word(&word, &al, cap()?).map_err(usage)?;
    let qi: BigInt = q.trim().parse().map_err(|_| usage(format!("bad exponent `{q}`")))?;
    let a = Slp::power(&w, &qi);
    let text = a.to_text(&al);
    Ok(RunReport::new("slp power")
        .input("word", word)
        .input("q", q)
        .result(json!(text), text.trim_end())
        .size("output_size", a.size())
        .size("produced_length", a.produced_length().to_string()))
}

fn fg_cmd(c: FgCmd) -> Res<RunReport> {
    match c {
        FgCmd::Reduce { word } => {
            let al = alphabet_of(&[&word]);
            let w = parse_word(&word, &al, cap()?).map_err(usage)?;
            let r = free_reduce(w.letters());
            let s = al.display_word(r.letters());
            Ok(RunReport::new("fg reduce").input("word", word).result(json!(s), s).size("length", w.len()).size("reduced_length", r.len()))
        }
        FgCmd::Cwp { slp, emit_reduced } => {
            let mut al = Alphabet::new();
            let a = load_slp(&slp, &mut al, true)?;
            let b = is_trivial_compressed(&a);
            let mut r = RunReport::new("fg cwp").input("slp", slp.display().to_string()).boolean(b).size("input_size", a.size());
            if let Some(path) = emit_reduced {
                let red = reduced_slp(&a);
                emit(&path, &red.to_text(&al))?;
                r = r.size("output_size", red.size());
            }
            Ok(r)
        }
    }
}

fn tower_cmd(c: TowerCmd) -> Res<RunReport> {
    match c {
        TowerCmd::Check { tower } => {
            let t = load_tower(&tower)?;
            let warnings = t.warnings().to_vec();
            let mut text = format!("ok: height {}, {} generators", t.height(), t.generators().len());
            for w in &warnings {
                text.push_str(&format!("\nwarning: {w}"));
            }
            Ok(RunReport::new("tower check")
                .input("tower", tower.display().to_string())
                .result(json!({ "valid": true, "height": t.height(), "warnings": warnings }), text))
        }
        TowerCmd::Constants { tower } => {
            let t = load_tower(&tower)?;
            let c = t.constants();
            Ok(RunReport::new("tower constants")
                .input("tower", tower.display().to_string())
                .result(json!({ "L": c.l, "N": c.n, "M": c.m, "levels": c.levels }), format!("L={} N={} M={}", c.l, c.n, c.m)))
        }
    }
}

fn aut_cmd(c: AutCmd) -> Res<RunReport> {
    match c {
        AutCmd::Wp { tower, auts, composition } => {
            let t = load_tower(&tower)?;
            let set = load_auts(&t, &auts)?;
            let word = set.parse_composition(&composition).map_err(usage)?;
            let rep = checked_aut_word_problem(&t, &set, &word).map_err(usage)?;
            let al = t.alphabet();
            let moved: Vec<&str> = rep.moved.iter().map(|&g| al.name(g)).collect();
            Ok(RunReport::new("aut wp")
                .input("tower", tower.display().to_string())
                .input("auts", auts)
                .input("composition", composition)
                .boolean(rep.identity)
                .size("composition_length", word.len())
                .size("program_size", rep.program_size)
                .size("moved", moved))
        }
        AutCmd::Catalog { tower, decomposition } => {
            let t = load_tower(&tower)?;
            let set = match &decomposition {
                None => nielsen_catalog(t.base_generators()),
                Some(p) => {
                    let d = Decomposition::parse(&read(p)?, t.alphabet()).map_err(usage)?;
                    whitehead_catalog(&d, t.alphabet()).map_err(usage)?
                }
            };
            let text = set.to_text(t.alphabet());
            Ok(RunReport::new("aut catalog")
                .input("tower", tower.display().to_string())
                .result(json!(text), text.trim_end())
                .size("count", set.len()))
        }
    }
}

fn oracle_cmd(c: OracleCmd) -> Res<RunReport> {
    match c {
        OracleCmd::ExpandReduce { slp } => {
            let mut al = Alphabet::new();
            let a = load_slp(&slp, &mut al, true)?;
            let w = expand_reduce_oracle(&a, cap()?).map_err(usage)?;
            let s = al.display_word(&w);
            Ok(RunReport::new("oracle expand-reduce").input("slp", slp.display().to_string()).result(json!(s), s))
        }
        OracleCmd::Britton { tower, word } => {
            let t = load_tower(&tower)?;
            let w = tower_word(&t, &word)?;
            let b = britton_wp_level1(&t, w.letters()).map_err(usage)?;
            Ok(RunReport::new("oracle britton").input("tower", tower.display().to_string()).input("word", word).boolean(b))
        }
        OracleCmd::Power { u, g } => {
            let al = alphabet_of(&[&u, &g]);
            let uw = parse_word(&u, &al, cap()?).map_err(usage)?;
            let gw = parse_word(&g, &al, cap()?).map_err(usage)?;
            if free_reduce(uw.letters()).is_empty() {
                return Err(usage("u must be nontrivial"));
            }
            let c = power_membership(uw.letters(), gw.letters());
            let text = c.map_or_else(|| "not a power".to_string(), |c| c.to_string());
            Ok(RunReport::new("oracle power").input("u", u).input("g", g).result(json!(c), text))
        }
        OracleCmd::Compose { tower, auts, composition, generator } => {
            let t = load_tower(&tower)?;
            let set = load_auts(&t, &auts)?;
            let word = set.parse_composition(&composition).map_err(usage)?;
            let gen = t.alphabet().lookup(&generator).ok_or_else(|| usage(format!("unknown generator `{generator}`")))?;
            let img = naive_aut_compose(&set, &word, gen, cap()?).map_err(usage)?;
            let s = t.alphabet().display_word(img.letters());
            Ok(RunReport::new("oracle compose")
                .input("tower", tower.display().to_string())
                .input("auts", auts)
                .input("composition", composition)
                .input("generator", generator)
                .result(json!(s), s)
                .size("image_length", img.len()))
        }
        OracleCmd::Equal { a, b } => {
            let mut al = Alphabet::new();
            let x = load_slp(&a, &mut al, true)?;
            let y = load_slp(&b, &mut al, true)?;
            let b2 = slpwp_core::oracles::equal_oracle(&x, &y, cap()?).map_err(usage)?;
            Ok(RunReport::new("oracle equal").input("a", a.display().to_string()).input("b", b.display().to_string()).boolean(b2))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match dispatch(cli.cmd) {
        Ok(mut r) => {
            if !cli.opts.no_time {
                r.wall_time = Some(start.elapsed());
            }
            let out = if cli.opts.json { r.to_json() } else { r.text };
            // a closed pipe is not an error worth a panic
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("internal check failed: {m}");
            ExitCode::from(3)
        }
    }
}
