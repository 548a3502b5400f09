//! Acceptance suite. Runs each criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_bigint::{BigInt, BigUint};
use rand::rngs::StdRng;
use rand::Rng;
use slpwp_core::aut::{aut_word_problem, aut_word_problem_report, compose_slp, nielsen_catalog, AutSet};
use slpwp_core::bench::size_growth;
use slpwp_core::compare::{equal, equal_by_recompression};
use slpwp_core::free_group::{is_trivial_compressed, reduced_slp};
use slpwp_core::lyndon::{LengthVector, LyndonError, LyndonGroup};
use slpwp_core::normal_form::{check_conditions, normal_form, sigma};
use slpwp_core::oracles::{
    britton_wp_level1, equal_oracle, expand_oracle, expand_reduce_oracle, naive_aut_compose, OracleError, ORACLE_CAP,
};
use slpwp_core::phi::{compressed_word_problem, word_problem};
use slpwp_core::tower::Tower;
use slpwp_core::{Letter, Slp, Word};

const EXAMPLE_W: &str = "a (a b)^11 t^-1 a a b a^-1 t";

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn run(n: usize, name: &str, limit: Option<Duration>, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let out = std::panic::catch_unwind(f).unwrap_or_else(|_| fail("panicked"));
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took < l);
    let ok = out.ok && in_time;
    let limit_txt = limit.map_or(String::new(), |l| format!(" / limit {:.0?}", l));
    println!(
        "criterion {n} [{name}]: {} ({}; {:.2?}{limit_txt})",
        if ok { "PASS" } else { "FAIL" },
        if in_time { out.detail } else { format!("{}; over time limit", out.detail) },
        took,
    );
    ok
}

fn g1() -> Tower {
    Tower::parse(G1).unwrap()
}

fn word(t: &Tower, s: &str) -> Word {
    t.alphabet().parse_word(s).unwrap()
}

fn lyndon_golden() -> Outcome {
    let t = g1();
    let w = word(&t, EXAMPLE_W);
    let g = LyndonGroup::new(&t).unwrap();
    let l = g.length(w.letters());
    let l1 = g.l1(&g.reduced_form(w.letters()), 30);
    let want = LengthVector::new(vec![-21, 2]);
    let detail = format!("len = {l}, l1(M=30) = {l1}");
    if l == want && l1 == -21 && l.to_string() == "(-21, 2)" {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn normal_form_example() -> Outcome {
    let t = g1();
    let w = word(&t, EXAMPLE_W);
    let nf = normal_form(&t, w.letters());
    let rep = check_conditions(&t, w.letters(), &nf);
    let u = &t.entry(1, 0).u;
    let over_ab = nf.syllables.iter().all(|s| s.entry == 0) && *u == word(&t, "a b");
    // condition (iv): g_1 u^q1 g_2 u^q2 ... g_{m+1} is a o-product for every
    // q_i of sign sigma(alpha_i)
    let g = LyndonGroup::new(&t).unwrap();
    let mut circ = true;
    for q in 1..=40 {
        let mut parts = Vec::new();
        for (i, s) in nf.syllables.iter().enumerate() {
            parts.push(s.g.clone());
            parts.push(u.pow(sigma(&s.alpha) * (q + 7 * i as i64)));
        }
        parts.push(nf.tail.clone());
        circ &= g.is_circ_product(&parts);
    }
    let flat = nf.flatten(&t);
    let same = word_problem(&t, flat.concat(&w.inverse()).letters());
    let bound = 20 * w.len();
    let detail = format!(
        "m = {}, form = {}, |flat| = {} <= {bound}, (i)-(iii) {}, (iv) {circ}, equal {same}",
        nf.syllable_count(),
        nf.display(&t),
        flat.len(),
        rep.all_ok(),
    );
    if nf.syllable_count() == 2 && over_ab && rep.all_ok() && circ && same && flat.len() <= bound && w.len() == 29 {
        pass(detail)
    } else {
        fail(detail)
    }
}

/// Another program for the word of `a`, chosen from several constructions.
fn equal_variant(rng: &mut StdRng, a: &Slp) -> Slp {
    let len = a.produced_length();
    match rng.gen_range(0..4) {
        0 => a.rebalanced(),
        1 => Slp::from_word(&a.expand(usize::MAX).unwrap()),
        2 => {
            let n: u64 = (&len).try_into().unwrap();
            let k = BigUint::from(rng.gen_range(0..=n));
            let rest = &len - &k;
            a.cut_prefix(&k).unwrap().concat(&a.cut_suffix(&rest).unwrap())
        }
        _ => a.reverse_inverse().reverse_inverse().rebalanced(),
    }
}

/// Same length as `a`, one letter replaced.
fn near_miss(rng: &mut StdRng, a: &Slp, gens: &[u32]) -> Slp {
    let n: u64 = (&a.produced_length()).try_into().unwrap();
    if n == 0 {
        return Slp::letter(Letter::pos(gens[0]));
    }
    let k = rng.gen_range(0..n);
    let pre = a.cut_prefix(&BigUint::from(k)).unwrap();
    let suf = a.cut_suffix(&BigUint::from(n - k - 1)).unwrap();
    let l = random_letter(rng, gens);
    pre.concat(&Slp::letter(l)).concat(&suf)
}

fn equality_suite() -> Outcome {
    let mut rng = rng(3);
    let gens = [0u32, 1];
    let mut agree = 0;
    let mut equal_pairs = 0;
    let total = 1200;
    for i in 0..total {
        let a = bounded_random_slp(&mut rng, &gens, 100_000);
        let b = match i % 4 {
            0 | 1 => equal_variant(&mut rng, &a),
            2 => near_miss(&mut rng, &a, &gens),
            _ => {
                if i % 8 == 3 {
                    let n = rng.gen_range(1..6);
                    let w = random_word(&mut rng, &gens, n);
                    let q = rng.gen_range(1..2000i64);
                    let p = Slp::power(&w, &BigInt::from(q));
                    let b = Slp::from_word(&w.pow(q));
                    let want = equal_oracle(&p, &b, ORACLE_CAP).unwrap();
                    if equal(&p, &b) == want && equal_by_recompression(&p, &b) == want {
                        agree += 1;
                    }
                    equal_pairs += want as usize;
                    continue;
                }
                bounded_random_slp(&mut rng, &gens, 100_000)
            }
        };
        let want = equal_oracle(&a, &b, ORACLE_CAP).unwrap();
        equal_pairs += want as usize;
        let fast = equal(&a, &b);
        // the recompression path is exercised directly on a subset
        let exact = if i % 3 == 0 { equal_by_recompression(&a, &b) } else { fast };
        if fast == want && exact == want {
            agree += 1;
        }
    }
    let detail = format!("{agree}/{total} agree with expansion, {equal_pairs} equal pairs");
    if agree == total {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn cwp_suite() -> Outcome {
    let mut rng = rng(4);
    let gens = [0u32, 1, 2];
    let total = 1000;
    let mut agree = 0;
    let mut trivial = 0;
    let mut reduced_ok = 0;
    for i in 0..total {
        let a = bounded_random_slp(&mut rng, &gens, 100_000);
        let s = match i % 5 {
            // x y y^-1 x^-1 with y cut from x
            0 => {
                let n: u64 = (&a.produced_length()).try_into().unwrap();
                let y = a.cut_suffix(&BigUint::from(rng.gen_range(0..=n))).unwrap();
                a.concat(&y).concat(&y.reverse_inverse()).concat(&a.reverse_inverse())
            }
            // x^-1 followed by a program that nearly cancels it
            1 => {
                let b = near_miss(&mut rng, &a, &gens);
                a.reverse_inverse().concat(&b)
            }
            // commutator of two programs for powers of the same word
            2 => {
                let n = rng.gen_range(1..5);
                let w = random_word(&mut rng, &gens, n);
                let (p, q) = (rng.gen_range(1..300i64), rng.gen_range(1..300i64));
                let x = Slp::power(&w, &BigInt::from(p));
                let y = Slp::power(&w, &BigInt::from(q));
                x.concat(&y).concat(&x.reverse_inverse()).concat(&y.reverse_inverse())
            }
            _ => a,
        };
        let want = expand_reduce_oracle(&s, 1_000_000).unwrap();
        let got = is_trivial_compressed(&s);
        trivial += got as usize;
        if got == want.is_empty() {
            agree += 1;
        }
        if i % 10 == 0 && expand_oracle(&reduced_slp(&s), 1_000_000).unwrap() == want {
            reduced_ok += 1;
        }
    }
    let mut inv_ok = 0;
    for _ in 0..100 {
        let a = bounded_random_slp(&mut rng, &gens, 100_000);
        inv_ok += is_trivial_compressed(&a.concat(&a.reverse_inverse())) as usize;
    }
    let detail = format!(
        "{agree}/{total} agree ({trivial} trivial), reduced programs {reduced_ok}/{}, a.a^-1 trivial {inv_ok}/100",
        total / 10
    );
    if agree == total && inv_ok == 100 && reduced_ok == total / 10 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn stable_density(t: &Tower, w: &Word) -> f64 {
    let s = w.iter().filter(|l| t.stable_info(l.gen()).is_some()).count();
    s as f64 / w.len().max(1) as f64
}

fn tower_suite() -> Outcome {
    let t = g1();
    let mut rng = rng(5);
    let (mut agree, mut trivial, mut total) = (0, 0, 0);
    while total < 600 {
        let w = if total % 2 == 0 {
            random_trivial_word(&mut rng, &t, 40)
        } else {
            let len = rng.gen_range(1..=40);
            random_tower_word(&mut rng, &t, len, 0.4)
        };
        if w.is_empty() || w.len() > 40 || stable_density(&t, &w) < 0.25 {
            continue;
        }
        total += 1;
        let want = britton_wp_level1(&t, w.letters()).unwrap();
        trivial += want as usize;
        if compressed_word_problem(&t, &Slp::from_word(&w)) == want {
            agree += 1;
        }
    }
    let t2 = Tower::parse(G2).unwrap();
    let cwp = |w: &Word| compressed_word_problem(&t2, &Slp::from_word(w));
    let relators_ok = t2.relators().iter().all(&cwp);
    let stable: Vec<u32> = t2.generators().into_iter().filter(|&g| t2.stable_info(g).is_some()).collect();
    let singles_ok = stable.iter().all(|&g| !cwp(&Word(vec![Letter::pos(g)])) && !cwp(&Word(vec![Letter::neg(g)])));
    let gens = t2.generators();
    let (mut samples, mut sample_ok, mut nontrivial) = (0, 0, 0);
    for i in 0..220 {
        let w = if i % 3 == 0 {
            random_trivial_word(&mut rng, &t2, 30)
        } else {
            let len = rng.gen_range(1..20);
            random_tower_word(&mut rng, &t2, len, 0.35)
        };
        let glen = rng.gen_range(1..6);
        let g = random_word(&mut rng, &gens, glen);
        let triv = cwp(&w);
        nontrivial += !triv as usize;
        let ww = cwp(&w.concat(&w.inverse()));
        let conj = cwp(&g.concat(&w).concat(&g.inverse()));
        samples += 1;
        if ww && conj == triv {
            sample_ok += 1;
        }
    }
    let detail = format!(
        "G1 {agree}/{total} agree with Britton ({trivial} trivial); two-level: relators {relators_ok}, stable letters {singles_ok}, {sample_ok}/{samples} samples ({nontrivial} nontrivial)"
    );
    if agree == total && relators_ok && singles_ok && sample_ok == samples {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn ceil_log2(q: u64) -> u32 {
    if q <= 1 {
        0
    } else {
        64 - (q - 1).leading_zeros()
    }
}

fn size_bounds() -> Outcome {
    let mut rng = rng(6);
    let gens = [0u32, 1];
    let mut violations = Vec::new();
    let mut checked = 0;
    for len in 1..=8usize {
        for _ in 0..40 {
            let w = random_word(&mut rng, &gens, len);
            if Slp::from_word(&w).size() > 2 * w.len() {
                violations.push(format!("from_word |w|={len}"));
            }
            let mut qs: Vec<u64> = vec![1, 2, 3, 1 << 31, (1 << 32) - 1, 1 << 32];
            qs.extend((0..20).map(|_| rng.gen_range(1..=1u64 << 32)));
            qs.extend((0..5).map(|_| rng.gen_range(1..64)));
            for q in qs {
                for sign in [1i64, -1] {
                    let qq = BigInt::from(q) * sign;
                    let p = Slp::power(&w, &qq);
                    let c = q.count_ones() - 1;
                    let bound = 2 * len + ceil_log2(q) as usize + c as usize;
                    checked += 1;
                    if p.size() > bound || c > ceil_log2(q) {
                        violations.push(format!("power |w|={len} q={qq} size={} bound={bound}", p.size()));
                    }
                    if q < 64 && p.expand(usize::MAX).unwrap() != w.pow(q as i64 * sign) {
                        violations.push(format!("power |w|={len} q={qq} wrong word"));
                    }
                }
            }
        }
    }
    let mut growth = Vec::new();
    let mut growth_ok = true;
    for (spec, w) in [(G1, "t a t^-1 b"), (G2, "s t1 a t2^-1 s^-1 b")] {
        let t = Tower::parse(spec).unwrap();
        let g = size_growth(&t, &word(&t, w), 5..=20);
        let ok = g.within_bounds() && g.max_relative_residual < 0.1;
        growth_ok &= ok;
        let last = g.rows.last().unwrap();
        growth.push(format!(
            "height {}: |A_1| {} at |A| {} <= {:.0}|A|+{:.1}, fit slope {:.2} residual {:.3}",
            t.height(),
            last.output_size,
            last.input_size,
            g.c1,
            g.c2,
            g.slope,
            g.max_relative_residual
        ));
    }
    let detail = format!("{checked} power programs, {} violations; {}", violations.len(), growth.join("; "));
    if violations.is_empty() && growth_ok {
        pass(detail)
    } else {
        fail(format!("{detail}; first: {:?}", violations.first()))
    }
}

fn naive_identity(t: &Tower, set: &AutSet, comp: &[(usize, bool)]) -> Option<bool> {
    let mut id = true;
    for g in t.generators() {
        let img = match naive_aut_compose(set, comp, g, ORACLE_CAP) {
            Ok(w) => w,
            Err(OracleError::Overflow(_)) => return None,
            Err(e) => panic!("{e}"),
        };
        id &= word_problem(t, img.concat(&Word(vec![Letter::neg(g)])).letters());
    }
    Some(id)
}

fn aut_suite() -> Outcome {
    let t = Tower::free(["x1", "x2", "x3"]);
    let set = nielsen_catalog(&t.generators());
    let mut relations = 0;
    let mut relations_ok = 0;
    for (i, s) in set.specs().iter().enumerate() {
        let inv = set.inverse_of(i).unwrap();
        let comp = vec![(i, false), (inv, false)];
        relations += 1;
        relations_ok += aut_word_problem(&t, &set, &comp).unwrap() as usize;
        if s.name.starts_with("alpha") {
            relations += 1;
            relations_ok += aut_word_problem(&t, &set, &[(i, false), (i, false)]).unwrap() as usize;
        }
    }
    let mut rng = rng(7);
    let (mut agree, mut total, mut identities) = (0, 0, 0);
    while total < 300 {
        let m = rng.gen_range(1..=10);
        let mut comp: Vec<(usize, bool)> = (0..m).map(|_| (rng.gen_range(0..set.len()), rng.gen_bool(0.3))).collect();
        if total % 3 == 0 {
            // c c^-1 written out, so identities are well represented
            let half = comp[..m / 2 + 1].to_vec();
            comp = half.clone();
            comp.extend(half.iter().rev().map(|&(i, inv)| (i, !inv)));
            comp.truncate(10);
        }
        let Some(want) = naive_identity(&t, &set, &comp) else { continue };
        total += 1;
        identities += want as usize;
        if aut_word_problem(&t, &set, &comp).unwrap() == want {
            agree += 1;
        }
    }
    let comp = set.parse_composition("(beta12 beta21)^40").unwrap();
    let start = Instant::now();
    let rep = aut_word_problem_report(&t, &set, &comp).unwrap();
    let took = start.elapsed();
    let naive_big = matches!(naive_aut_compose(&set, &comp, 0, ORACLE_CAP), Err(OracleError::Overflow(_)));
    let prog = compose_slp(&t.generators(), &set, &comp).unwrap();
    let max_len = prog.image_lengths().into_iter().max().unwrap();
    let witness_ok = !rep.identity && naive_big && took < Duration::from_secs(60);
    let detail = format!(
        "relations {relations_ok}/{relations}; random {agree}/{total} agree ({identities} identities); witness: identity={} in {took:.2?}, program size {}, image length {max_len}, naive over 10^6 {naive_big}",
        rep.identity, rep.program_size
    );
    if relations_ok == relations && agree == total && witness_ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn lyndon_axioms() -> Outcome {
    let t = g1();
    let g = LyndonGroup::new(&t).unwrap();
    let mut rng = rng(8);
    let mut violations = Vec::new();
    let mut fifth_hits = 0;
    let samples = 600;
    for i in 0..samples {
        let len = rng.gen_range(1..16);
        let w = random_tower_word(&mut rng, &t, len, 0.3);
        let l = g.length(w.letters());
        if l < LengthVector::zero() {
            violations.push(format!("(i) {l}"));
        }
        if l != g.length(w.inverse().letters()) {
            violations.push("(ii)".to_string());
        }
        let nontrivial = !word_problem(&t, w.letters());
        if nontrivial && g.length(w.concat(&w).letters()) <= l {
            violations.push("(iii)".to_string());
        }
        // triples sharing random prefixes, so that c_p values differ
        let plen = rng.gen_range(0..8);
        let p = random_tower_word(&mut rng, &t, plen, 0.3);
        let qlen = rng.gen_range(0..4);
        let q = p.concat(&random_tower_word(&mut rng, &t, qlen, 0.3));
        let (alen, blen, clen) = (rng.gen_range(0..8), rng.gen_range(0..8), rng.gen_range(0..8));
        let x = q.concat(&random_tower_word(&mut rng, &t, alen, 0.3));
        let y = q.concat(&random_tower_word(&mut rng, &t, blen, 0.3));
        let z = if i % 2 == 0 { p.concat(&random_tower_word(&mut rng, &t, clen, 0.3)) } else { w.clone() };
        let cp = |a: &Word, b: &Word| g.common_prefix_length(a.letters(), b.letters());
        match (cp(&x, &y), cp(&x, &z), cp(&y, &z)) {
            (Ok(c12), Ok(c13), Ok(c23)) => {
                if c12 > c13 {
                    fifth_hits += 1;
                    if c13 != c23 {
                        violations.push(format!("(v) {c12} {c13} {c23}"));
                    }
                }
            }
            (a, b, c) => {
                for e in [a, b, c].into_iter().filter_map(Result::err) {
                    let LyndonError::NotIntegral(v) = e else { panic!("{e}") };
                    violations.push(format!("(iv) {v}"));
                }
            }
        }
    }
    let detail = format!(
        "{samples} words and triples, {} violations, (v) premise met {fifth_hits} times",
        violations.len()
    );
    if violations.is_empty() && fifth_hits > 0 {
        pass(detail)
    } else {
        fail(format!("{detail}; first: {:?}", violations.first()))
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "length golden value", Some(secs(1)), lyndon_golden),
        run(2, "normal form", Some(secs(5)), normal_form_example),
        run(3, "compressed equality vs expansion", Some(secs(60)), equality_suite),
        run(4, "free group compressed word problem", Some(secs(120)), cwp_suite),
        run(5, "tower word problem vs Britton", Some(secs(300)), tower_suite),
        run(6, "size bounds", None, size_bounds),
        run(7, "automorphism word problem", None, aut_suite),
        run(8, "length axioms", None, lyndon_axioms),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
