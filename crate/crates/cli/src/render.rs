//! Plain-text and DOT renderings.

use std::fmt::Write;

use dedekind_core::invariants::{Flags, InvariantReport};
use dedekind_core::verify::SuiteResult;
use dedekind_core::{FiniteGroup, SubgroupLattice};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn flag_line(f: &Flags) -> String {
    format!(
        "abelian={} dedekind={} nilpotent={} iwasawa={} modular-lattice={} schmidt={}",
        yes_no(f.abelian),
        yes_no(f.dedekind),
        yes_no(f.nilpotent),
        yes_no(f.iwasawa),
        yes_no(f.modular_lattice),
        yes_no(f.schmidt)
    )
}

pub fn report(r: &InvariantReport) -> String {
    let d_star = r
        .d_star
        .as_ref()
        .map_or_else(|| "skipped".to_string(), |d| d.to_string());
    format!(
        "spec     {}\norder    {}\n|L|      {}\nk'       {}\n|N|      {}\nnu       {}\nd'       {}\nd*       {}\nflags    {}\n",
        r.spec,
        r.order,
        r.lattice_size,
        r.k_prime,
        r.normal_count,
        r.nu,
        r.d_prime,
        d_star,
        flag_line(&r.flags)
    )
}

fn generator_text(g: &FiniteGroup, gens: &[usize]) -> String {
    if gens.is_empty() {
        return "1".to_string();
    }
    gens.iter()
        .map(|&x| g.label(x))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn lattice_table(g: &FiniteGroup, l: &SubgroupLattice) -> String {
    let mut out = String::from("#     order  class  normal  generators\n");
    for (i, h) in l.subgroups().iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<5} {:<6} {:<6} {:<7} {}",
            i,
            h.order(),
            l.class_of(i),
            yes_no(l.is_normal(i)),
            generator_text(g, h.generators())
        );
    }
    let _ = writeln!(
        out,
        "{} subgroups, {} classes, {} normal",
        l.len(),
        l.class_count(),
        l.normal_subgroup_count()
    );
    out
}

/// Graphviz digraph of the Hasse diagram, bottom to top. Normal subgroups
/// are double circles and class representatives are filled.
pub fn lattice_dot(name: &str, l: &SubgroupLattice) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph lattice {{");
    let _ = writeln!(out, "  label=\"{}\";", name.replace('"', "'"));
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for (i, h) in l.subgroups().iter().enumerate() {
        let shape = if l.is_normal(i) {
            "doublecircle"
        } else {
            "circle"
        };
        let representative = l.conjugacy_classes()[l.class_of(i)][0] == i;
        let style = if representative {
            ", style=filled, fillcolor=lightgray"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  s{i} [label=\"{}\", shape={shape}{style}];",
            h.order()
        );
    }
    for (a, b) in l.hasse_edges() {
        let _ = writeln!(out, "  s{a} -> s{b};");
    }
    out.push_str("}\n");
    out
}

pub fn suite(s: &SuiteResult) -> String {
    let mut out = String::new();
    let status = if s.ok() { "PASS" } else { "FAIL" };
    let _ = writeln!(
        out,
        "{status} {}: {} ({} passed, {} failed)",
        s.suite, s.title, s.passed, s.failed
    );
    for (k, v) in &s.antecedents {
        let _ = writeln!(out, "    count {v:>5}  {k}");
    }
    for c in &s.checks {
        if c.passed {
            continue;
        }
        let basis = match c.basis {
            dedekind_core::verify::Basis::Exact => "exact",
            dedekind_core::verify::Basis::Evidence => "evidence",
        };
        let _ = writeln!(out, "    FAIL [{basis}] {}", c.description);
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "         {w}");
        }
    }
    out
}
