//! CNF formulas, DIMACS I/O, class checks and a brute-force SAT oracle.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the variable count accepted by [`sat_brute`].
pub const DEFAULT_SAT_BOUND: usize = 20;

/// A variable (1-based) with a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn from_dimacs(x: i64) -> Self {
        Literal {
            var: x.unsigned_abs() as usize,
            negated: x < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn value(self, a: &SatAssignment) -> bool {
        a.get(self.var) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    /// Variables must lie in `1..=num_vars` and no clause may be empty.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::parse(None, format!("clause {} is empty", j + 1)));
            }
            if let Some(l) = clause.iter().find(|l| l.var == 0 || l.var > num_vars) {
                return Err(Error::parse(
                    None,
                    format!("clause {} uses variable {} outside 1..={num_vars}", j + 1, l.var),
                ));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Builds from DIMACS-style signed integers.
    pub fn from_ints(num_vars: usize, clauses: &[&[i64]]) -> Result<Self> {
        Self::new(
            num_vars,
            clauses
                .iter()
                .map(|c| c.iter().map(|&x| Literal::from_dimacs(x)).collect())
                .collect(),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Clause `j`, 1-based.
    pub fn clause(&self, j: usize) -> &[Literal] {
        &self.clauses[j - 1]
    }

    pub fn satisfied_by(&self, a: &SatAssignment, mode: SatMode) -> bool {
        self.clauses.iter().all(|c| {
            let t = c.iter().filter(|l| l.value(a)).count();
            match mode {
                SatMode::Ordinary => t >= 1,
                SatMode::OneInThree => t == 1,
            }
        })
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_dimacs(self))
    }
}

/// A total assignment to variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SatAssignment(Vec<bool>);

impl SatAssignment {
    pub fn new(values: Vec<bool>) -> Self {
        SatAssignment(values)
    }

    pub fn all_false(n: usize) -> Self {
        SatAssignment(vec![false; n])
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    /// Value of variable `var`, 1-based.
    pub fn get(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// Variable 1 is the most significant bit of `bits`.
    fn from_bits(n: usize, bits: u64) -> Self {
        SatAssignment((0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect())
    }
}

impl fmt::Display for SatAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v {
                    format!("{}", i + 1)
                } else {
                    format!("-{}", i + 1)
                }
            })
            .collect();
        write!(f, "{}", lits.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatMode {
    /// At least one true literal per clause.
    Ordinary,
    /// Exactly one true literal per clause.
    OneInThree,
}

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_start = 0usize;
    let mut last_line = 0usize;

    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        last_line = lineno;
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "second problem line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match parts[..] {
                ["p", "cnf", n, m] => n.parse::<usize>().ok().zip(m.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some(nm) => header = Some(nm),
                None => {
                    return Err(Error::parse(
                        lineno,
                        format!("malformed problem line `{trimmed}`, expected `p cnf <vars> <clauses>`"),
                    ))
                }
            }
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(lineno, "clause before the `p cnf` problem line"));
        };
        for tok in trimmed.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("`{tok}` is not an integer literal")))?;
            if x == 0 {
                if current.is_empty() {
                    return Err(Error::parse(lineno, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if x.unsigned_abs() as usize > n {
                return Err(Error::parse(
                    lineno,
                    format!("literal {x} refers to a variable above the declared {n}"),
                ));
            }
            if current.is_empty() {
                current_start = lineno;
            }
            current.push(Literal::from_dimacs(x));
        }
    }

    let Some((n, m)) = header else {
        return Err(Error::parse(None, "missing `p cnf` problem line"));
    };
    if !current.is_empty() {
        return Err(Error::parse(current_start, "clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("problem line declares {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses)
}

pub fn to_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars, formula.clauses.len());
    for clause in &formula.clauses {
        for l in clause {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// A way a formula falls outside a restricted class. Clauses are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CnfViolation {
    ClauseSize {
        clause: usize,
        len: usize,
    },
    Occurrences {
        var: usize,
        positive: usize,
        negative: usize,
    },
    RepeatedLiteral {
        clause: usize,
        literal: i64,
    },
    RepeatedVariable {
        clause: usize,
        var: usize,
    },
    NegatedLiteral {
        clause: usize,
        literal: i64,
    },
}

impl fmt::Display for CnfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfViolation::ClauseSize { clause, len } => {
                write!(f, "clause {clause} has {len} literals")
            }
            CnfViolation::Occurrences {
                var,
                positive,
                negative,
            } => write!(
                f,
                "variable {var} occurs {positive} times positively and {negative} times negatively"
            ),
            CnfViolation::RepeatedLiteral { clause, literal } => {
                write!(f, "clause {clause} repeats literal {literal}")
            }
            CnfViolation::RepeatedVariable { clause, var } => {
                write!(f, "clause {clause} mentions variable {var} more than once")
            }
            CnfViolation::NegatedLiteral { clause, literal } => {
                write!(f, "clause {clause} contains negated literal {literal}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfReport(pub Vec<CnfViolation>);

impl CnfReport {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CnfViolation> {
        self.0.iter()
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::precondition(self.to_string()))
        }
    }
}

impl fmt::Display for CnfReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("; "))
    }
}

/// Every variable occurs twice positively and once negatively, every clause
/// has two or three literals, and no clause repeats a literal.
pub fn check_ppn(formula: &CnfFormula) -> CnfReport {
    let mut out = Vec::new();
    let mut pos = vec![0usize; formula.num_vars + 1];
    let mut neg = vec![0usize; formula.num_vars + 1];
    for (j, clause) in formula.clauses.iter().enumerate() {
        if !(2..=3).contains(&clause.len()) {
            out.push(CnfViolation::ClauseSize {
                clause: j + 1,
                len: clause.len(),
            });
        }
        for (k, l) in clause.iter().enumerate() {
            if clause[..k].contains(l) {
                out.push(CnfViolation::RepeatedLiteral {
                    clause: j + 1,
                    literal: l.to_dimacs(),
                });
            }
            if l.negated {
                neg[l.var] += 1;
            } else {
                pos[l.var] += 1;
            }
        }
    }
    for var in 1..=formula.num_vars {
        if pos[var] != 2 || neg[var] != 1 {
            out.push(CnfViolation::Occurrences {
                var,
                positive: pos[var],
                negative: neg[var],
            });
        }
    }
    CnfReport(out)
}

/// Every clause has exactly three positive literals over distinct variables.
pub fn check_one_in_three_positive(formula: &CnfFormula) -> CnfReport {
    let mut out = Vec::new();
    for (j, clause) in formula.clauses.iter().enumerate() {
        if clause.len() != 3 {
            out.push(CnfViolation::ClauseSize {
                clause: j + 1,
                len: clause.len(),
            });
        }
        for (k, l) in clause.iter().enumerate() {
            if l.negated {
                out.push(CnfViolation::NegatedLiteral {
                    clause: j + 1,
                    literal: l.to_dimacs(),
                });
            }
            if clause[..k].iter().any(|o| o.var == l.var) {
                out.push(CnfViolation::RepeatedVariable {
                    clause: j + 1,
                    var: l.var,
                });
            }
        }
    }
    CnfReport(out)
}

/// Least satisfying assignment with variable 1 most significant and false
/// before true, with the default variable bound.
pub fn sat_brute(formula: &CnfFormula, mode: SatMode) -> Result<Option<SatAssignment>> {
    sat_brute_bounded(formula, mode, DEFAULT_SAT_BOUND)
}

pub fn sat_brute_bounded(formula: &CnfFormula, mode: SatMode, bound: usize) -> Result<Option<SatAssignment>> {
    Ok(satisfying_assignments(formula, mode, bound)?.next())
}

/// All satisfying assignments in increasing order.
pub fn satisfying_assignments(
    formula: &CnfFormula,
    mode: SatMode,
    bound: usize,
) -> Result<impl Iterator<Item = SatAssignment> + '_> {
    let n = formula.num_vars;
    if n > bound.min(63) {
        return Err(Error::BoundExceeded {
            what: "variable count",
            value: n,
            bound: bound.min(63),
        });
    }
    Ok((0..1u64 << n)
        .map(move |bits| SatAssignment::from_bits(n, bits))
        .filter(move |a| formula.satisfied_by(a, mode)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_ints(n, clauses).unwrap()
    }

    #[test]
    fn parses_basic_file() {
        let got = parse_dimacs("c hello\np cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(got, f(2, &[&[1, -2]]));
    }

    #[test]
    fn clauses_may_span_lines() {
        let got = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n0\n%\n0\n").unwrap();
        assert_eq!(got, f(3, &[&[1, 2, 3], &[-1]]));
    }

    #[test]
    fn parse_errors() {
        let cases = [
            ("p cnf 2 1\n1 -2\n", "not terminated"),
            ("1 2 0\n", "before the `p cnf`"),
            ("p cnf 2 1\n1 3 0\n", "above the declared"),
            ("p cnf 2 2\n1 0\n", "declares 2 clauses"),
            ("p cnf 2 1\n0\n", "empty clause"),
            ("p cnf x 1\n", "malformed"),
            ("p cnf 2 1\n1 a 0\n", "not an integer"),
            ("", "missing"),
        ];
        for (text, needle) in cases {
            let err = parse_dimacs(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn dimacs_round_trip() {
        let formula = f(4, &[&[1, -2, 3], &[-4, 2], &[4]]);
        assert_eq!(parse_dimacs(&to_dimacs(&formula)).unwrap(), formula);
    }

    #[test]
    fn ppn_check() {
        // x = 1, y = 2: (x or y), (x or not y), (not x or y)
        assert!(check_ppn(&f(2, &[&[1, 2], &[1, -2], &[-1, 2]])).is_empty());
        let unit = check_ppn(&f(1, &[&[1], &[1, -1]]));
        assert!(unit
            .iter()
            .any(|v| matches!(v, CnfViolation::ClauseSize { clause: 1, len: 1 })));
        let three = check_ppn(&f(1, &[&[1, 1], &[1, -1]]));
        assert!(three.iter().any(|v| matches!(
            v,
            CnfViolation::Occurrences {
                var: 1,
                positive: 3,
                negative: 1
            }
        )));
        assert!(three
            .iter()
            .any(|v| matches!(v, CnfViolation::RepeatedLiteral { clause: 1, .. })));
        // Complementary literals in one clause are allowed.
        assert!(check_ppn(&f(2, &[&[1, -1], &[1, 2], &[2, -2]])).is_empty());
    }

    #[test]
    fn one_in_three_check() {
        assert!(check_one_in_three_positive(&f(3, &[&[1, 2, 3]])).is_empty());
        assert!(matches!(
            check_one_in_three_positive(&f(2, &[&[1, 2]])).0[..],
            [CnfViolation::ClauseSize { clause: 1, len: 2 }]
        ));
        assert!(matches!(
            check_one_in_three_positive(&f(3, &[&[1, -2, 3]])).0[..],
            [CnfViolation::NegatedLiteral {
                clause: 1,
                literal: -2
            }]
        ));
        assert!(matches!(
            check_one_in_three_positive(&f(2, &[&[1, 2, 1]])).0[..],
            [CnfViolation::RepeatedVariable { clause: 1, var: 1 }]
        ));
    }

    #[test]
    fn brute_force_examples() {
        let got = sat_brute(&f(2, &[&[1, 2]]), SatMode::Ordinary).unwrap().unwrap();
        assert_eq!(got.values(), &[false, true]);
        let got = sat_brute(&f(3, &[&[1, 2, 3]]), SatMode::OneInThree)
            .unwrap()
            .unwrap();
        assert_eq!(got.values(), &[false, false, true]);
        assert_eq!(sat_brute(&f(1, &[&[1], &[-1]]), SatMode::Ordinary).unwrap(), None);
        let empty = f(0, &[]);
        assert_eq!(
            sat_brute(&empty, SatMode::Ordinary).unwrap(),
            Some(SatAssignment::all_false(0))
        );
    }

    #[test]
    fn brute_force_bound() {
        let wide = CnfFormula::new(21, vec![vec![Literal::pos(21)]]).unwrap();
        assert!(matches!(
            sat_brute(&wide, SatMode::Ordinary),
            Err(Error::BoundExceeded {
                value: 21,
                bound: 20,
                ..
            })
        ));
        assert!(sat_brute_bounded(&wide, SatMode::Ordinary, 21).unwrap().is_some());
    }
}
