//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails. Comparisons are exact.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dedekind_core::families::{c27_rtimes_q8, c2sq_rtimes_c4, c3_rtimes_c8};
use dedekind_core::formulas::{self, Direction, Family};
use dedekind_core::invariants::{d_prime_of, d_star_with, SectionMode};
use dedekind_core::iso::is_isomorphic;
use dedekind_core::lattice::all_subgroups;
use dedekind_core::spec::parse_spec;
use dedekind_core::verify::{build_corpus, CorpusConfig, Verifier};
use dedekind_core::{FiniteGroup, Limits, Rational, SubgroupLattice};

type Outcome = Result<String, Vec<String>>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn limits() -> Limits {
    Limits::default()
}

fn build(spec: &str) -> FiniteGroup {
    parse_spec(spec).unwrap().build(&limits()).unwrap()
}

fn lattice(g: &FiniteGroup) -> SubgroupLattice {
    all_subgroups(g, &limits()).unwrap()
}

fn d_star(g: &FiniteGroup, mode: SectionMode) -> Rational {
    d_star_with(g, &lattice(g), &limits(), mode).unwrap()
}

/// Collects failures instead of stopping at the first one.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn eq<T: PartialEq + std::fmt::Display>(&mut self, what: impl Into<String>, got: T, want: T) {
        self.checks += 1;
        if got != want {
            self.failures
                .push(format!("{}: got {got}, want {want}", what.into()));
        }
    }

    fn holds(&mut self, what: impl Into<String>, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn finish(self, summary: String) -> Outcome {
        if self.failures.is_empty() {
            Ok(format!("{} checks; {summary}", self.checks))
        } else {
            Err(self.failures)
        }
    }
}

fn known_values() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    for (spec, want) in [
        ("D(8)", r(4, 5)),
        ("He(3)", r(11, 19)),
        ("He(5)", r(5, 13)),
        ("M(2,4)", r(10, 11)),
        ("M(3,3)", r(4, 5)),
        ("M(2,5)", r(13, 14)),
        ("D(6)", r(2, 3)),
        ("SD(2,3)", r(1, 2)),
        ("D(10)", r(1, 2)),
        ("C(3) x D(8)", r(4, 5)),
    ] {
        t.eq(
            format!("d'({spec})"),
            d_prime_of(&lattice(&build(spec))),
            want,
        );
    }
    let semi = c3_rtimes_c8().unwrap();
    t.eq("d'(C3:C8)", d_prime_of(&lattice(&semi)), r(4, 5));
    t.holds(
        "C3:C8 is not isomorphic to C3 x D8",
        !is_isomorphic(&semi, &build("C(3) x D(8)"), 128).unwrap(),
    );
    for n in 3..=7usize {
        let l = lattice(&build(&format!("D({})", 1u64 << n)));
        t.eq(format!("k'(D(2^{n}))"), l.class_count(), 3 * n - 1);
        t.eq(format!("|L(D(2^{n}))|"), l.len(), (1 << n) + n - 1);
    }
    for (p, n) in [(2usize, 4usize), (2, 5), (3, 3), (3, 4), (5, 3)] {
        let l = lattice(&build(&format!("M({p},{n})")));
        t.eq(
            format!("|N(M({p},{n}))|"),
            l.normal_subgroup_count(),
            (n - 2) * (p + 1) + 3,
        );
        t.eq(format!("nu(M({p},{n}))"), l.nu(), 1);
    }
    let elapsed = start.elapsed();
    t.holds(
        format!("runtime {elapsed:?} under 60 s"),
        elapsed < Duration::from_secs(60),
    );
    t.finish(format!("{elapsed:.2?}"))
}

fn order_216() -> Outcome {
    let start = Instant::now();
    let g = c27_rtimes_q8().unwrap();
    let l = lattice(&g);
    let elapsed = start.elapsed();
    let mut t = Tally::default();
    t.eq("order", g.order(), 216);
    t.eq("d'", d_prime_of(&l), r(2, 11));
    t.holds(
        format!("enumeration {elapsed:?} under 120 s"),
        elapsed < Duration::from_secs(120),
    );
    t.finish(format!(
        "d' = {} with |L| = {}, {elapsed:.2?}",
        d_prime_of(&l),
        l.len()
    ))
}

fn d_star_values() -> Outcome {
    let mut t = Tally::default();
    for (spec, want) in [
        ("D(8)", r(4, 5)),
        ("D(6)", r(2, 3)),
        ("He(3)", r(11, 19)),
        ("C(2) x D(8)", r(27, 35)),
    ] {
        t.eq(
            format!("d*({spec})"),
            d_star(&build(spec), SectionMode::Pruned),
            want,
        );
    }
    for (p, n) in [(2, 4), (2, 5), (3, 3), (3, 4), (5, 3)] {
        let g = build(&format!("M({p},{n})"));
        t.eq(
            format!("d*(M({p},{n})) = d'"),
            d_star(&g, SectionMode::Pruned),
            d_prime_of(&lattice(&g)),
        );
    }
    t.eq(
        "d*(C2^2:C4)",
        d_star(&c2sq_rtimes_c4().unwrap(), SectionMode::Pruned),
        r(17, 23),
    );
    let corpus = build_corpus(&CorpusConfig::default());
    let mut compared = 0;
    for e in corpus.entries.iter().filter(|e| e.group.order() <= 64) {
        let a = d_star(&e.group, SectionMode::Pruned);
        let b = d_star(&e.group, SectionMode::Exhaustive);
        t.eq(format!("pruned vs exhaustive d*({})", e.name), a, b);
        compared += 1;
    }
    t.finish(format!(
        "pruned = exhaustive on {compared} groups of order <= 64"
    ))
}

fn formulas_match_enumeration() -> Outcome {
    let mut t = Tally::default();
    for (p, n) in [(2, 4), (2, 5), (2, 6), (3, 3), (3, 4), (5, 3)] {
        let g = build(&format!("M({p},{n})"));
        t.eq(
            format!("M({p},{n})"),
            d_prime_of(&lattice(&g)),
            formulas::d_prime_modular_formula(p, n).unwrap(),
        );
    }
    for n in 3..=7 {
        let g = build(&format!("D({})", 1u64 << n));
        t.eq(
            format!("D(2^{n})"),
            d_prime_of(&lattice(&g)),
            formulas::d_prime_dihedral_formula(n).unwrap(),
        );
    }
    for p in [3, 5] {
        t.eq(
            format!("He({p})"),
            d_prime_of(&lattice(&build(&format!("He({p})")))),
            formulas::d_prime_heisenberg_formula(p).unwrap(),
        );
    }
    let mut schmidt = 0;
    for p in primes_below(200) {
        for q in primes_below(p) {
            if (p - 1) % q != 0 {
                continue;
            }
            for n in 2.. {
                let order = p * q.pow(n as u32 - 1);
                if order > 200 {
                    break;
                }
                let g = build(&format!("G({p},{q},{n})"));
                t.eq(
                    format!("G({p},{q},{n})"),
                    d_prime_of(&lattice(&g)),
                    formulas::d_prime_schmidt_formula(p, n).unwrap(),
                );
                schmidt += 1;
            }
        }
    }
    let mut gaussian = 0;
    for p in [2u64, 3, 5, 7, 11] {
        for rank in 1.. {
            if p.pow(rank as u32) > 128 {
                break;
            }
            let l = lattice(&build(&format!("EA({p},{rank})")));
            for i in 0..=rank {
                let count = l
                    .subgroups()
                    .iter()
                    .filter(|h| h.order() as u64 == p.pow(i as u32))
                    .count();
                t.eq(
                    format!("[{rank} choose {i}]_{p}"),
                    formulas::gaussian_binomial(rank, i, p).unwrap(),
                    count.into(),
                );
                gaussian += 1;
            }
        }
    }
    let mut sections = Vec::new();
    for (p, q) in [(2, 3), (3, 2), (2, 7), (5, 2), (7, 2), (3, 13)] {
        let spec = format!("SD({p},{q})");
        let Ok(g) = parse_spec(&spec).unwrap().build(&limits()) else {
            sections.push(format!("{spec} skipped"));
            continue;
        };
        let l = lattice(&g);
        let rank = dedekind_core::families::SchmidtSectionParams::new(p, q)
            .unwrap()
            .r;
        t.eq(
            format!("k'({spec})"),
            l.class_count().into(),
            formulas::schmidt_section_class_count(p, q, rank).unwrap(),
        );
        t.eq(
            format!("|L({spec})|"),
            l.len().into(),
            formulas::schmidt_section_lattice_size(p, q, rank).unwrap(),
        );
        sections.push(spec);
    }
    t.finish(format!(
        "{schmidt} G(p,q,n), {gaussian} Gaussian binomials, sections {}",
        sections.join(" ")
    ))
}

fn verify_suites() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_dedekind"))
        .args(["--no-cache", "--json", "verify", "all"])
        .output()
        .expect("dedekind binary runs");
    let mut t = Tally::default();
    t.eq("verify all exit code", out.status.code().unwrap_or(-1), 0);
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(&out.stdout) else {
        t.holds("verify all prints JSON", false);
        return t.finish(String::new());
    };
    let suites = v["suites"].as_array().cloned().unwrap_or_default();
    t.eq("suite count", suites.len(), 12);
    let mut checks = 0;
    for s in &suites {
        let name = s["suite"].as_str().unwrap_or("?");
        t.eq(
            format!("{name} failures"),
            s["failed"].as_u64().unwrap_or(1),
            0,
        );
        checks += s["passed"].as_u64().unwrap_or(0);
        for (k, count) in s["antecedents"].as_object().into_iter().flatten() {
            t.holds(
                format!("{name}: antecedent '{k}' exercised"),
                count.as_u64().unwrap_or(0) > 0,
            );
        }
    }
    t.finish(format!(
        "{} suites, {checks} checks, corpus of {}",
        suites.len(),
        v["corpus_size"]
    ))
}

fn closed_subsets(g: &FiniteGroup) -> BTreeSet<u32> {
    let n = g.order();
    let table = g.table();
    (0u32..(1 << (n - 1)))
        .map(|rest| (rest << 1) | 1)
        .filter(|&m| {
            (0..n).filter(|&a| m >> a & 1 == 1).all(|a| {
                (0..n)
                    .filter(|&b| m >> b & 1 == 1)
                    .all(|b| m >> table[a * n + b] & 1 == 1)
            })
        })
        .collect()
}

fn properties() -> Outcome {
    let corpus = build_corpus(&CorpusConfig::default());
    let verifier = Verifier::new(corpus, limits()).unwrap();
    let mut t = Tally::default();
    let props = verifier.run("properties").unwrap();
    t.eq("property suite failures", props.failed, 0);
    let pair_count = |k: &str| props.antecedents.get(k).copied().unwrap_or(0);
    t.holds(
        "at least 10 coprime pairs for d'",
        pair_count("coprime pairs (d′)") >= 10,
    );
    t.holds(
        "at least 10 coprime pairs for d*",
        pair_count("coprime pairs (d*)") >= 10,
    );
    let mut oracle = 0;
    for (e, a) in verifier.corpus.entries.iter().zip(&verifier.analyses) {
        let l = &a.lattice;
        if let Some(ds) = &a.d_star {
            t.holds(format!("d* <= d' for {}", e.name), *ds <= a.d_prime);
        }
        t.eq(
            format!("k' = |N| + nu for {}", e.name),
            l.class_count(),
            l.normal_subgroup_count() + l.nu(),
        );
        for class in l.conjugacy_classes() {
            let h = l.subgroup(class[0]);
            let normalizer = e.group.normalizer(h).order();
            t.eq(
                format!("class size x normalizer order in {}", e.name),
                class.len() * normalizer,
                e.group.order(),
            );
        }
        if e.group.order() <= 24 {
            let found: BTreeSet<u32> = l
                .subgroups()
                .iter()
                .map(|h| h.members().iter().fold(0u32, |m, x| m | 1 << x))
                .collect();
            t.holds(
                format!("brute-force subgroup oracle for {}", e.name),
                found == closed_subsets(&e.group),
            );
            oracle += 1;
        }
    }
    t.finish(format!(
        "{} coprime pairs, {} section pairs, {oracle} groups against the subset oracle",
        pair_count("coprime pairs (d′)"),
        pair_count("section pairs spot-checked")
    ))
}

fn primes_below(n: u64) -> Vec<u64> {
    (2..n)
        .filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
        .collect()
}

fn density() -> Outcome {
    let mut t = Tally::default();
    let eps = r(1, 100);
    let mut lengths = Vec::new();
    for (a, b) in [(1, 2), (2, 3), (2, 5), (3, 7)] {
        match formulas::density_sequence(a, b, &eps, 500) {
            Ok(steps) => {
                let last = steps.last().expect("at least one step");
                t.holds(format!("{a}/{b}: final gap below 1/100"), last.gap < eps);
                let tail = &steps[steps.len() / 2..];
                t.holds(
                    format!("{a}/{b}: gap decreases over the tail"),
                    tail.windows(2).all(|w| w[1].gap < w[0].gap),
                );
                lengths.push(format!("{a}/{b}:{}", steps.len()));
            }
            Err(e) => t.holds(format!("{a}/{b}: {e}"), false),
        }
    }
    let odd_primes: Vec<u64> = primes_below(300).into_iter().skip(1).take(50).collect();
    let n_range: Vec<u64> = (3..=50).collect();
    let cases = [
        (
            Family::Modular { p: 2 },
            (4..=50).collect(),
            Direction::StrictlyIncreasing,
        ),
        (
            Family::Modular { p: 3 },
            n_range.clone(),
            Direction::StrictlyIncreasing,
        ),
        (
            Family::Modular { p: 5 },
            n_range.clone(),
            Direction::StrictlyIncreasing,
        ),
        (
            Family::Schmidt { p: 3, q: 2 },
            (2..=50).collect(),
            Direction::StrictlyIncreasing,
        ),
        (
            Family::Schmidt { p: 7, q: 3 },
            (2..=50).collect(),
            Direction::StrictlyIncreasing,
        ),
        (Family::Dihedral, n_range, Direction::StrictlyDecreasing),
        (
            Family::Heisenberg,
            odd_primes,
            Direction::StrictlyDecreasing,
        ),
    ];
    for (family, params, want) in cases {
        let verdict = formulas::sequence_monotonicity(family, &params).unwrap();
        t.holds(format!("{family:?} is {want:?}"), verdict.direction == want);
    }
    t.finish(format!("steps to gap < 1/100: {}", lengths.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 known ratio values", known_values),
        ("2 order-216 lattice", order_216),
        ("3 section minima", d_star_values),
        ("4 closed forms vs enumeration", formulas_match_enumeration),
        ("5 verification suites", verify_suites),
        ("6 property suite", properties),
        ("7 density and monotonicity", density),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(summary) => println!(
                "PASS criterion {name} ({summary}) [{:.2?}]",
                start.elapsed()
            ),
            Err(failures) => {
                failed += 1;
                println!("FAIL criterion {name} [{:.2?}]", start.elapsed());
                for f in failures.iter().take(20) {
                    println!("    {f}");
                }
            }
        }
    }
    println!("{} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
