//! Where each variable of a PPN formula occurs.

use serde::{Deserialize, Serialize};

use super::cnf::{check_ppn, CnfFormula};
use crate::error::{Error, Result};

/// A literal slot: clause `clause`, position `position`, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub clause: usize,
    pub position: usize,
}

/// The variable at a slot and which of its occurrences it is: 1 and 2 for the
/// first and second positive ones in clause order, 3 for the negative one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotUse {
    pub var: usize,
    pub kind: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceTable {
    /// `by_variable[i - 1][k - 1]` is occurrence `k` of variable `i`.
    pub by_variable: Vec<[Slot; 3]>,
    /// `by_clause[j - 1][l - 1]` is the literal at position `l` of clause `j`.
    pub by_clause: Vec<Vec<SlotUse>>,
}

impl OccurrenceTable {
    pub fn new(formula: &CnfFormula) -> Result<Self> {
        check_ppn(formula).into_result()?;
        let mut found: Vec<Vec<Slot>> = vec![Vec::new(); formula.num_vars()];
        let mut neg: Vec<Option<Slot>> = vec![None; formula.num_vars()];
        let mut by_clause = Vec::with_capacity(formula.num_clauses());
        for (j, clause) in formula.clauses().iter().enumerate() {
            let mut uses = Vec::with_capacity(clause.len());
            for (l, lit) in clause.iter().enumerate() {
                let slot = Slot {
                    clause: j + 1,
                    position: l + 1,
                };
                let kind = if lit.negated {
                    neg[lit.var - 1] = Some(slot);
                    3
                } else {
                    found[lit.var - 1].push(slot);
                    found[lit.var - 1].len()
                };
                uses.push(SlotUse { var: lit.var, kind });
            }
            by_clause.push(uses);
        }
        let by_variable = found
            .into_iter()
            .zip(neg)
            .map(|(p, n)| [p[0], p[1], n.expect("checked PPN")])
            .collect();
        Ok(OccurrenceTable {
            by_variable,
            by_clause,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.by_variable.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.by_clause.len()
    }

    /// Occurrence `k` of variable `var`.
    pub fn slot(&self, var: usize, kind: usize) -> Slot {
        self.by_variable[var - 1][kind - 1]
    }

    pub fn at(&self, clause: usize, position: usize) -> SlotUse {
        self.by_clause[clause - 1][position - 1]
    }

    pub fn clause_len(&self, clause: usize) -> usize {
        self.by_clause[clause - 1].len()
    }

    /// Both directions agree.
    pub fn is_consistent(&self) -> bool {
        let forward = self.by_variable.iter().enumerate().all(|(i, slots)| {
            slots.iter().enumerate().all(|(k, s)| {
                self.by_clause
                    .get(s.clause.wrapping_sub(1))
                    .and_then(|c| c.get(s.position.wrapping_sub(1)))
                    == Some(&SlotUse {
                        var: i + 1,
                        kind: k + 1,
                    })
            })
        });
        let total: usize = self.by_clause.iter().map(Vec::len).sum();
        forward && total == 3 * self.by_variable.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: OccurrenceTable =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        if !table.is_consistent() {
            return Err(Error::parse(None, "occurrence table directions disagree"));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table() {
        // (x1 or x2), (x1 or not x2), (not x1 or x2)
        let f = CnfFormula::from_ints(2, &[&[1, 2], &[1, -2], &[-1, 2]]).unwrap();
        let t = OccurrenceTable::new(&f).unwrap();
        assert_eq!(
            t.slot(1, 1),
            Slot {
                clause: 1,
                position: 1
            }
        );
        assert_eq!(
            t.slot(1, 2),
            Slot {
                clause: 2,
                position: 1
            }
        );
        assert_eq!(
            t.slot(1, 3),
            Slot {
                clause: 3,
                position: 1
            }
        );
        assert_eq!(
            t.slot(2, 1),
            Slot {
                clause: 1,
                position: 2
            }
        );
        assert_eq!(
            t.slot(2, 2),
            Slot {
                clause: 3,
                position: 2
            }
        );
        assert_eq!(
            t.slot(2, 3),
            Slot {
                clause: 2,
                position: 2
            }
        );
        assert_eq!(t.at(2, 2), SlotUse { var: 2, kind: 3 });
        assert!(t.is_consistent());
        assert_eq!(OccurrenceTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn rejects_non_ppn() {
        let f = CnfFormula::from_ints(1, &[&[1, 1, -1]]).unwrap();
        assert!(matches!(OccurrenceTable::new(&f), Err(Error::Precondition(_))));
    }

    #[test]
    fn detects_tampering() {
        let f = CnfFormula::from_ints(2, &[&[1, 2], &[1, -2], &[-1, 2]]).unwrap();
        let mut t = OccurrenceTable::new(&f).unwrap();
        t.by_clause[0][0].kind = 2;
        assert!(!t.is_consistent());
        assert!(OccurrenceTable::from_json(&t.to_json()).is_err());
    }
}
