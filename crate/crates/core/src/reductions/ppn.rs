//! Rewriting an arbitrary formula with clauses of at most three literals into
//! one where every variable occurs twice positively and once negatively.

use serde::{Deserialize, Serialize};

use super::cnf::{CnfFormula, Literal, SatAssignment};
use crate::error::{Error, Result};

/// Fresh variable `v` (1-based) stands for literal `origin[v - 1]` of the
/// input formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpnProvenance {
    pub original_vars: usize,
    pub origin: Vec<Literal>,
}

impl PpnProvenance {
    /// Assignment of the input formula read off a normalized one.
    pub fn project(&self, a: &SatAssignment) -> SatAssignment {
        let mut out = SatAssignment::all_false(self.original_vars);
        // Walk in reverse so the first fresh variable of each original wins.
        for (k, lit) in self.origin.iter().enumerate().rev() {
            out.set(lit.var, a.get(k + 1) != lit.negated);
        }
        out
    }

    /// Assignment of the normalized formula induced by one of the input.
    pub fn lift(&self, a: &SatAssignment) -> SatAssignment {
        SatAssignment::new(self.origin.iter().map(|l| l.value(a)).collect())
    }
}

/// Each occurrence of a variable gets its own fresh variable holding the
/// truth of that literal; a cycle of implications forces the copies of one
/// variable to agree. Unit clauses are doubled first.
///
/// A fresh variable appears positively at its occurrence and once with each
/// sign in the cycle, so the result passes [`check_ppn`](super::check_ppn).
pub fn to_ppn(formula: &CnfFormula) -> Result<(CnfFormula, PpnProvenance)> {
    if let Some(j) = formula.clauses().iter().position(|c| c.len() > 3) {
        return Err(Error::precondition(format!(
            "clause {} has {} literals, at most 3 allowed",
            j + 1,
            formula.clause(j + 1).len()
        )));
    }
    let padded: Vec<Vec<Literal>> = formula
        .clauses()
        .iter()
        .map(|c| if c.len() == 1 { vec![c[0], c[0]] } else { c.clone() })
        .collect();

    let mut origin = Vec::new();
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); formula.num_vars() + 1];
    let mut clauses: Vec<Vec<Literal>> = padded
        .iter()
        .map(|c| {
            c.iter()
                .map(|&l| {
                    origin.push(l);
                    let fresh = origin.len();
                    occurrences[l.var].push(fresh);
                    Literal::pos(fresh)
                })
                .collect()
        })
        .collect();

    // Copy i of a variable is its i-th fresh variable, negated when that
    // occurrence was negative. Each link says copy i+1 implies copy i.
    let copy = |fresh: usize, negated: bool| Literal { var: fresh, negated };
    for chain in occurrences.iter().filter(|c| !c.is_empty()) {
        let k = chain.len();
        for i in 0..k {
            let (a, b) = (chain[i], chain[(i + 1) % k]);
            let (na, nb) = (origin[a - 1].negated, origin[b - 1].negated);
            clauses.push(vec![copy(a, na), copy(b, !nb)]);
        }
    }
    let provenance = PpnProvenance {
        original_vars: formula.num_vars(),
        origin,
    };
    Ok((CnfFormula::new(provenance.origin.len(), clauses)?, provenance))
}
