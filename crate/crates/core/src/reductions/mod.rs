//! The SAT side: CNF tooling, PPN normalization, and the four reductions
//! from satisfiability to existence of a strongly stable matching, each with
//! a witness encoder and decoder.
//!
//! Agent ids embed their gadget indices, e.g. `x'_2_3` is hospital
//! x'<sub>2,3</sub> and `c'_4_1` is resident c'<sub>4,1</sub>.

pub mod cnf;
mod gadgets;
pub mod occurrence;
mod one_in_three;
pub mod ppn;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cnf::{
    check_one_in_three_positive, check_ppn, parse_dimacs, sat_brute, sat_brute_bounded,
    satisfying_assignments, to_dimacs, CnfFormula, CnfReport, CnfViolation, Literal, SatAssignment, SatMode,
    DEFAULT_SAT_BOUND,
};
pub use occurrence::{OccurrenceTable, Slot, SlotUse};
pub use ppn::{to_ppn, PpnProvenance};

use crate::error::{Error, Result};
use crate::model::{Assignment, HospitalDoc, Instance, InstanceDoc, RegionDoc, ResidentDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionVariant {
    /// One-in-three positive 3-SAT to (2,2,2) with intersecting regions.
    OneInThree222,
    /// PPN-3-SAT to (2,2,3) with disjoint regions.
    Ppn223,
    /// PPN-3-SAT to (2,3,2) with disjoint regions.
    Ppn232,
    /// PPN-3-SAT to (3,2,2) with disjoint regions.
    Ppn322,
}

impl ReductionVariant {
    pub const ALL: [ReductionVariant; 4] = [
        ReductionVariant::OneInThree222,
        ReductionVariant::Ppn223,
        ReductionVariant::Ppn232,
        ReductionVariant::Ppn322,
    ];

    pub const PPN: [ReductionVariant; 3] = [
        ReductionVariant::Ppn223,
        ReductionVariant::Ppn232,
        ReductionVariant::Ppn322,
    ];

    /// The `(alpha, beta, gamma)` of the produced instances.
    pub fn parameters(self) -> (usize, usize, usize) {
        match self {
            ReductionVariant::OneInThree222 => (2, 2, 2),
            ReductionVariant::Ppn223 => (2, 2, 3),
            ReductionVariant::Ppn232 => (2, 3, 2),
            ReductionVariant::Ppn322 => (3, 2, 2),
        }
    }

    /// Satisfiability semantics of the source problem.
    pub fn sat_mode(self) -> SatMode {
        match self {
            ReductionVariant::OneInThree222 => SatMode::OneInThree,
            _ => SatMode::Ordinary,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReductionVariant::OneInThree222 => "one-in-three-222",
            ReductionVariant::Ppn223 => "ppn-223",
            ReductionVariant::Ppn232 => "ppn-232",
            ReductionVariant::Ppn322 => "ppn-322",
        }
    }
}

impl fmt::Display for ReductionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::parse(None, format!("unknown reduction target `{s}`")))
    }
}

/// An instance produced by a reduction, with its occurrence table for the
/// PPN variants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedInstance {
    pub variant: ReductionVariant,
    pub instance: Instance,
    pub occurrences: Option<OccurrenceTable>,
}

/// Builds the (2,2,2) instance of a one-in-three positive formula.
pub fn reduce_oneinthree(formula: &CnfFormula) -> Result<Instance> {
    check_one_in_three_positive(formula).into_result()?;
    Ok(one_in_three::build(formula))
}

/// Builds the instance of a PPN formula for one of the PPN variants.
pub fn reduce_ppn(formula: &CnfFormula, variant: ReductionVariant) -> Result<(Instance, OccurrenceTable)> {
    let table = OccurrenceTable::new(formula)?;
    let instance = match variant {
        ReductionVariant::Ppn223 => gadgets::build_223(&table),
        ReductionVariant::Ppn232 => gadgets::build_232(&table),
        ReductionVariant::Ppn322 => gadgets::build_322(&table),
        ReductionVariant::OneInThree222 => {
            return Err(Error::precondition("one-in-three target takes reduce_oneinthree"))
        }
    };
    Ok((instance, table))
}

pub fn reduce(formula: &CnfFormula, variant: ReductionVariant) -> Result<ReducedInstance> {
    Ok(match variant {
        ReductionVariant::OneInThree222 => ReducedInstance {
            variant,
            instance: reduce_oneinthree(formula)?,
            occurrences: None,
        },
        _ => {
            let (instance, table) = reduce_ppn(formula, variant)?;
            ReducedInstance {
                variant,
                instance,
                occurrences: Some(table),
            }
        }
    })
}

impl ReducedInstance {
    /// The strongly stable matching that witnesses a satisfying assignment.
    pub fn encode(&self, formula: &CnfFormula, a: &SatAssignment) -> Result<Assignment> {
        if a.num_vars() != formula.num_vars() || !formula.satisfied_by(a, self.variant.sat_mode()) {
            return Err(Error::NotSatisfying);
        }
        let pairs = match (&self.occurrences, self.variant) {
            (None, _) => one_in_three::encode(formula, a),
            (Some(t), ReductionVariant::Ppn223) => gadgets::encode_223(t, formula, a),
            (Some(t), ReductionVariant::Ppn232) => gadgets::encode_232(t, formula, a),
            (Some(t), _) => gadgets::encode_322(t, formula, a),
        };
        self.instance
            .assignment(pairs.iter().map(|(r, h)| (r.as_str(), h.as_str())))
    }

    /// The assignment read off a strongly stable matching.
    pub fn decode(&self, m: &Assignment) -> SatAssignment {
        match (&self.occurrences, self.variant) {
            (None, _) => one_in_three::decode(&self.instance, m),
            (Some(t), ReductionVariant::Ppn322) => gadgets::decode(&self.instance, t, m, false),
            (Some(t), _) => gadgets::decode(&self.instance, t, m, true),
        }
    }
}

pub fn encode_assignment(
    formula: &CnfFormula,
    a: &SatAssignment,
    variant: ReductionVariant,
) -> Result<Assignment> {
    reduce(formula, variant)?.encode(formula, a)
}

pub fn decode_matching(
    formula: &CnfFormula,
    m: &Assignment,
    variant: ReductionVariant,
) -> Result<SatAssignment> {
    Ok(reduce(formula, variant)?.decode(m))
}

/// Agents and regions of one gadget, by id.
#[derive(Default)]
struct Gadget {
    residents: Vec<ResidentDoc>,
    hospitals: Vec<HospitalDoc>,
    regions: Vec<RegionDoc>,
}

impl Gadget {
    fn resident(&mut self, id: &str, prefs: &[&String]) {
        self.residents.push(ResidentDoc {
            id: id.to_string(),
            prefs: prefs.iter().map(|s| (*s).clone()).collect(),
        });
    }

    fn hospital(&mut self, id: &str, capacity: u32, prefs: &[&String]) {
        self.hospitals.push(HospitalDoc {
            id: id.to_string(),
            capacity,
            prefs: prefs.iter().map(|s| (*s).clone()).collect(),
        });
    }

    fn region(&mut self, hospitals: &[&String], cap: u32) {
        self.regions.push(RegionDoc {
            hospitals: hospitals.iter().map(|s| (*s).clone()).collect(),
            cap,
        });
    }
}

fn assemble(gadgets: impl IntoIterator<Item = Gadget>) -> Instance {
    let mut doc = InstanceDoc::default();
    for g in gadgets {
        doc.residents.extend(g.residents);
        doc.hospitals.extend(g.hospitals);
        doc.regions.extend(g.regions);
    }
    Instance::from_doc(&doc).expect("gadget construction yields a valid instance")
}

fn name(prefix: &str, idx: &[usize]) -> String {
    let mut s = format!("{prefix}'");
    for i in idx {
        s.push('_');
        s.push_str(&i.to_string());
    }
    s
}
