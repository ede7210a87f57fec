//! One-in-three positive 3-SAT to (2,2,2) with intersecting regions.
//!
//! Variable i is a pair y'_i -> x'_i where x'_i is filled iff x_i is true.
//! Clause j is a copy of the two-by-two instance without a strongly stable
//! matching, g'_j_1..4, whose hospitals g'_j_2 and g'_j_4 share a cap-1 region
//! with each other and with every x' of the clause. Exactly one filled x' per
//! clause closes all those regions and so disarms the clause.

use std::collections::BTreeSet;

use super::cnf::{CnfFormula, SatAssignment};
use super::{assemble, name, Gadget};
use crate::model::{Assignment, Instance};

pub(super) fn build(formula: &CnfFormula) -> Instance {
    let mut vars = Gadget::default();
    for i in 1..=formula.num_vars() {
        let (y, x) = (name("y", &[i]), name("x", &[i]));
        vars.resident(&y, &[&x]);
        vars.hospital(&x, 1, &[&y]);
    }
    let mut clauses = Gadget::default();
    let mut seen: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    for (j0, clause) in formula.clauses().iter().enumerate() {
        let j = j0 + 1;
        let g: Vec<String> = (1..=4).map(|k| name("g", &[j, k])).collect();
        clauses.resident(&g[0], &[&g[1], &g[3]]);
        clauses.resident(&g[2], &[&g[3], &g[1]]);
        clauses.hospital(&g[1], 1, &[&g[2], &g[0]]);
        clauses.hospital(&g[3], 1, &[&g[0], &g[2]]);
        let mut members = vec![g[1].clone(), g[3].clone()];
        members.extend(clause.iter().map(|l| name("x", &[l.var])));
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let key: BTreeSet<String> = [members[a].clone(), members[b].clone()].into();
                if seen.insert(key) {
                    clauses.region(&[&members[a], &members[b]], 1);
                }
            }
        }
    }
    assemble([vars, clauses])
}

pub(super) fn encode(formula: &CnfFormula, a: &SatAssignment) -> Vec<(String, String)> {
    let used: BTreeSet<usize> = formula.clauses().iter().flatten().map(|l| l.var).collect();
    // A variable outside every clause has an unconstrained x', which must be filled.
    (1..=formula.num_vars())
        .filter(|&i| a.get(i) || !used.contains(&i))
        .map(|i| (name("y", &[i]), name("x", &[i])))
        .collect()
}

pub(super) fn decode(instance: &Instance, m: &Assignment) -> SatAssignment {
    let n = instance
        .hospitals()
        .iter()
        .filter(|h| h.id.starts_with("x'_"))
        .count();
    SatAssignment::new(
        (1..=n)
            .map(|i| {
                let x = instance.hospital_ix(&name("x", &[i])).expect("variable hospital");
                m.residents_of(x).next().is_some()
            })
            .collect(),
    )
}
