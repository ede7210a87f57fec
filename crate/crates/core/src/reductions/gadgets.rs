//! PPN-3-SAT to the three disjoint-region classes.
//!
//! Every variant has one gadget per variable, one per clause (2- or
//! 3-literal shape) and one terminal per clause. Hospital x'_i_k of the
//! variable gadget and resident c'_j_l of the clause gadget are linked when
//! literal l of clause j is occurrence k of variable i. A terminal is a copy of
//! the two-by-two instance without a strongly stable matching, disarmed only
//! when its clause is satisfied.
//!
//! Gadgets are laid out clause by clause, each clause preceded by the
//! variables it introduces, so that agents which interact sit close together
//! in declaration order.

use super::cnf::{CnfFormula, SatAssignment};
use super::occurrence::OccurrenceTable;
use super::{assemble, name, Gadget};
use crate::model::{Assignment, Instance};

type Pairs = Vec<(String, String)>;

/// Hospital linked to resident c'_j_l.
fn x_of(t: &OccurrenceTable, j: usize, l: usize) -> String {
    let u = t.at(j, l);
    name("x", &[u.var, u.kind])
}

/// Resident linked to hospital x'_i_k.
fn c_of(t: &OccurrenceTable, i: usize, k: usize) -> String {
    let s = t.slot(i, k);
    name("c", &[s.clause, s.position])
}

fn layout(
    t: &OccurrenceTable,
    mut variable: impl FnMut(usize) -> Gadget,
    mut clause: impl FnMut(usize) -> Gadget,
) -> Instance {
    let mut placed = vec![false; t.num_vars() + 1];
    let mut out = Vec::new();
    for j in 1..=t.num_clauses() {
        for l in 1..=t.clause_len(j) {
            let i = t.at(j, l).var;
            if !placed[i] {
                placed[i] = true;
                out.push(variable(i));
            }
        }
        out.push(clause(j));
    }
    assemble(out)
}

/// Truth of each literal of clause `j`.
fn literal_values(formula: &CnfFormula, a: &SatAssignment, j: usize) -> Vec<bool> {
    formula.clause(j).iter().map(|l| l.value(a)).collect()
}

/// Clause gadget shared by the (2,2,3) and (2,3,2) variants.
fn clause_2x(t: &OccurrenceTable, j: usize, g: &mut Gadget) {
    let c: Vec<String> = (1..=3).map(|l| name("c", &[j, l])).collect();
    let a: Vec<String> = (1..=3).map(|k| name("a", &[j, k])).collect();
    let d = name("d", &[j]);
    let y = name("y", &[j]);
    let z = name("z", &[j]);
    if t.clause_len(j) == 2 {
        g.resident(&c[0], &[&x_of(t, j, 1), &a[0]]);
        g.resident(&c[1], &[&x_of(t, j, 2), &a[0]]);
        g.hospital(&a[0], 1, &[&c[0], &c[1]]);
        g.hospital(&y, 1, &[&z]);
        g.region(&[&a[0], &y], 1);
    } else {
        g.resident(&c[0], &[&x_of(t, j, 1), &a[0]]);
        g.resident(&c[1], &[&x_of(t, j, 2), &a[0]]);
        g.resident(&d, &[&a[1], &a[2]]);
        g.resident(&c[2], &[&x_of(t, j, 3), &a[2]]);
        g.hospital(&a[0], 1, &[&c[0], &c[1]]);
        g.hospital(&a[1], 1, &[&d]);
        g.hospital(&a[2], 1, &[&d, &c[2]]);
        g.hospital(&y, 1, &[&z]);
        g.region(&[&a[0], &a[1]], 1);
        g.region(&[&a[2], &y], 1);
    }
}

fn encode_clause_2x(t: &OccurrenceTable, formula: &CnfFormula, a: &SatAssignment, out: &mut Pairs) {
    for j in 1..=t.num_clauses() {
        let v = literal_values(formula, a, j);
        let c = |l: usize| name("c", &[j, l]);
        for (l0, &val) in v.iter().enumerate() {
            if !val {
                out.push((c(l0 + 1), x_of(t, j, l0 + 1)));
            }
        }
        if let Some(l0) = v[..2].iter().position(|&b| b) {
            out.push((c(l0 + 1), name("a", &[j, 1])));
        }
        if v.len() == 3 {
            let d = name("d", &[j]);
            if !v[0] && !v[1] {
                out.push((d, name("a", &[j, 2])));
                out.push((c(3), name("a", &[j, 3])));
            } else {
                out.push((d, name("a", &[j, 3])));
            }
        }
    }
}

pub(super) fn build_223(t: &OccurrenceTable) -> Instance {
    let variable = |i: usize| {
        let mut g = Gadget::default();
        let e1 = name("e", &[i, 1]);
        let e2 = name("e", &[i, 2]);
        let b: Vec<String> = (1..=4).map(|k| name("b", &[i, k])).collect();
        let x: Vec<String> = (1..=3).map(|k| name("x", &[i, k])).collect();
        g.resident(&e1, &[&b[0], &b[2]]);
        g.resident(&e2, &[&b[1], &b[3]]);
        g.hospital(&b[0], 1, &[&e1]);
        g.hospital(&x[0], 1, &[&c_of(t, i, 1)]);
        g.hospital(&b[1], 1, &[&e2]);
        g.hospital(&x[1], 1, &[&c_of(t, i, 2)]);
        g.hospital(&b[2], 1, &[&e1]);
        g.hospital(&b[3], 1, &[&e2]);
        g.hospital(&x[2], 1, &[&c_of(t, i, 3)]);
        g.region(&[&b[0], &x[0]], 1);
        g.region(&[&b[1], &x[1]], 1);
        g.region(&[&b[2], &b[3], &x[2]], 2);
        g
    };
    let clause = |j: usize| {
        let mut g = Gadget::default();
        clause_2x(t, j, &mut g);
        let g1 = name("g", &[j, 1]);
        let g2 = name("g", &[j, 2]);
        let g3 = name("g", &[j, 3]);
        let g4 = name("g", &[j, 4]);
        let y = name("y", &[j]);
        let z = name("z", &[j]);
        let tt = name("t", &[j]);
        g.resident(&g1, &[&g2, &g4]);
        g.resident(&g3, &[&g4, &g2]);
        g.resident(&z, &[&y, &tt]);
        g.hospital(&g2, 1, &[&g3, &g1]);
        g.hospital(&g4, 1, &[&g1, &g3]);
        g.hospital(&tt, 1, &[&z]);
        g.region(&[&g2, &g4, &tt], 1);
        g
    };
    layout(t, variable, clause)
}

pub(super) fn encode_223(t: &OccurrenceTable, formula: &CnfFormula, a: &SatAssignment) -> Pairs {
    let mut out = Pairs::new();
    for i in 1..=t.num_vars() {
        let (h1, h2) = if a.get(i) { (1, 2) } else { (3, 4) };
        out.push((name("e", &[i, 1]), name("b", &[i, h1])));
        out.push((name("e", &[i, 2]), name("b", &[i, h2])));
    }
    encode_clause_2x(t, formula, a, &mut out);
    for j in 1..=t.num_clauses() {
        out.push((name("z", &[j]), name("t", &[j])));
    }
    out
}

pub(super) fn build_232(t: &OccurrenceTable) -> Instance {
    let variable = |i: usize| {
        let mut g = Gadget::default();
        let e1 = name("e", &[i, 1]);
        let e2 = name("e", &[i, 2]);
        let b1 = name("b", &[i, 1]);
        let b2 = name("b", &[i, 2]);
        let x: Vec<String> = (1..=3).map(|k| name("x", &[i, k])).collect();
        g.resident(&e1, &[&b1, &x[2]]);
        g.resident(&e2, &[&b2, &x[2]]);
        g.hospital(&b1, 1, &[&e1]);
        g.hospital(&x[0], 1, &[&c_of(t, i, 1)]);
        g.hospital(&b2, 1, &[&e2]);
        g.hospital(&x[1], 1, &[&c_of(t, i, 2)]);
        g.hospital(&x[2], 2, &[&e1, &e2, &c_of(t, i, 3)]);
        g.region(&[&b1, &x[0]], 1);
        g.region(&[&b2, &x[1]], 1);
        g
    };
    let clause = |j: usize| {
        let mut g = Gadget::default();
        clause_2x(t, j, &mut g);
        let g1 = name("g", &[j, 1]);
        let g2 = name("g", &[j, 2]);
        let g3 = name("g", &[j, 3]);
        let g4 = name("g", &[j, 4]);
        let y = name("y", &[j]);
        let z = name("z", &[j]);
        g.resident(&g1, &[&g2, &g4]);
        g.resident(&g3, &[&g4, &g2]);
        g.resident(&z, &[&y, &g2]);
        g.hospital(&g2, 1, &[&z, &g3, &g1]);
        g.hospital(&g4, 1, &[&g1, &g3]);
        g.region(&[&g2, &g4], 1);
        g
    };
    layout(t, variable, clause)
}

pub(super) fn encode_232(t: &OccurrenceTable, formula: &CnfFormula, a: &SatAssignment) -> Pairs {
    let mut out = Pairs::new();
    for i in 1..=t.num_vars() {
        if a.get(i) {
            out.push((name("e", &[i, 1]), name("b", &[i, 1])));
            out.push((name("e", &[i, 2]), name("b", &[i, 2])));
        } else {
            out.push((name("e", &[i, 1]), name("x", &[i, 3])));
            out.push((name("e", &[i, 2]), name("x", &[i, 3])));
        }
    }
    encode_clause_2x(t, formula, a, &mut out);
    for j in 1..=t.num_clauses() {
        out.push((name("z", &[j]), name("g", &[j, 2])));
    }
    out
}

pub(super) fn build_322(t: &OccurrenceTable) -> Instance {
    let variable = |i: usize| {
        let mut g = Gadget::default();
        let e: Vec<String> = (1..=4).map(|k| name("e", &[i, k])).collect();
        let x: Vec<String> = (1..=3).map(|k| name("x", &[i, k])).collect();
        let b1 = name("b", &[i, 1]);
        let b2 = name("b", &[i, 2]);
        g.resident(&e[0], &[&b1, &x[0]]);
        g.resident(&e[1], &[&b1, &x[1]]);
        g.resident(&e[2], &[&b2, &x[2]]);
        g.resident(&e[3], &[&b2]);
        for k in 0..3 {
            g.hospital(&x[k], 1, &[&e[k], &c_of(t, i, k + 1)]);
        }
        g.hospital(&b1, 2, &[&e[1], &e[0]]);
        g.hospital(&b2, 2, &[&e[3], &e[2]]);
        g.region(&[&b1, &b2], 2);
        g
    };
    let clause = |j: usize| {
        let mut g = Gadget::default();
        let c: Vec<String> = (1..=3).map(|l| name("c", &[j, l])).collect();
        let a: Vec<String> = (1..=4).map(|k| name("a", &[j, k])).collect();
        let u1 = name("u", &[j, 1]);
        let u2 = name("u", &[j, 2]);
        let d = name("d", &[j]);
        let w = name("w", &[j]);
        let y = name("y", &[j]);
        let z = name("z", &[j]);
        if t.clause_len(j) == 2 {
            g.resident(&c[0], &[&x_of(t, j, 1), &a[0]]);
            g.resident(&c[1], &[&x_of(t, j, 2), &a[1]]);
            g.resident(&u1, &[&a[0], &a[1], &y]);
            g.hospital(&a[0], 1, &[&c[0], &u1]);
            g.hospital(&a[1], 1, &[&c[1], &u1]);
            g.hospital(&y, 1, &[&u1, &z]);
        } else {
            g.resident(&c[0], &[&x_of(t, j, 1), &a[0]]);
            g.resident(&c[1], &[&x_of(t, j, 2), &a[1]]);
            g.resident(&u1, &[&a[0], &a[1], &w]);
            g.resident(&d, &[&w, &a[3]]);
            g.resident(&c[2], &[&x_of(t, j, 3), &a[2]]);
            g.resident(&u2, &[&a[3], &a[2], &y]);
            g.hospital(&a[0], 1, &[&c[0], &u1]);
            g.hospital(&a[1], 1, &[&c[1], &u1]);
            g.hospital(&w, 1, &[&u1, &d]);
            g.hospital(&a[3], 1, &[&d, &u2]);
            g.hospital(&a[2], 1, &[&c[2], &u2]);
            g.hospital(&y, 1, &[&u2, &z]);
        }
        let g2 = name("g", &[j, 2]);
        let g3 = name("g", &[j, 3]);
        let g4 = name("g", &[j, 4]);
        g.resident(&z, &[&y, &g2, &g4]);
        g.resident(&g3, &[&g4, &g2]);
        g.hospital(&g2, 1, &[&g3, &z]);
        g.hospital(&g4, 1, &[&z, &g3]);
        g.region(&[&g2, &g4], 1);
        g
    };
    layout(t, variable, clause)
}

pub(super) fn encode_322(t: &OccurrenceTable, formula: &CnfFormula, a: &SatAssignment) -> Pairs {
    let mut out = Pairs::new();
    for i in 1..=t.num_vars() {
        let e = |k: usize| name("e", &[i, k]);
        if a.get(i) {
            out.push((e(1), name("b", &[i, 1])));
            out.push((e(2), name("b", &[i, 1])));
            out.push((e(3), name("x", &[i, 3])));
        } else {
            out.push((e(1), name("x", &[i, 1])));
            out.push((e(2), name("x", &[i, 2])));
            out.push((e(3), name("b", &[i, 2])));
            out.push((e(4), name("b", &[i, 2])));
        }
    }
    for j in 1..=t.num_clauses() {
        let v = literal_values(formula, a, j);
        let c = |l: usize| name("c", &[j, l]);
        let a_ = |k: usize| name("a", &[j, k]);
        // True literals send c' to x'; false ones fall back to their a'.
        for (l0, &val) in v.iter().enumerate() {
            let h = if val { x_of(t, j, l0 + 1) } else { a_(l0 + 1) };
            out.push((c(l0 + 1), h));
        }
        let u1 = if v[0] {
            a_(1)
        } else if v[1] {
            a_(2)
        } else {
            name("w", &[j])
        };
        out.push((name("u", &[j, 1]), u1));
        if v.len() == 3 {
            let w_free = v[0] || v[1];
            out.push((name("d", &[j]), if w_free { name("w", &[j]) } else { a_(4) }));
            let u2 = if w_free { a_(4) } else { a_(3) };
            out.push((name("u", &[j, 2]), u2));
        }
        out.push((name("z", &[j]), name("y", &[j])));
        out.push((name("g", &[j, 3]), name("g", &[j, 4])));
    }
    out
}

/// Reads x_i off the negative link x'_i_3: a true variable links it in the
/// (2,2,3) and (2,3,2) variants and leaves it unlinked in the (3,2,2) one.
pub(super) fn decode(
    instance: &Instance,
    t: &OccurrenceTable,
    m: &Assignment,
    linked_means_true: bool,
) -> SatAssignment {
    SatAssignment::new(
        (1..=t.num_vars())
            .map(|i| {
                let c = instance.resident_ix(&c_of(t, i, 3)).expect("clause resident");
                let x = instance
                    .hospital_ix(&name("x", &[i, 3]))
                    .expect("variable hospital");
                m.contains(c, x) == linked_means_true
            })
            .collect(),
    )
}
