//! Instances, assignments and their classification.
//!
//! An [`Instance`] is always valid: it can only be obtained from an
//! [`InstanceDoc`] that passed [`validate`]. Agents are addressed internally by
//! dense indices in declaration order, which fixes every iteration order in
//! the crate.

mod document;
mod fixtures;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use document::{
    load_instance, load_matching, save_instance, save_matching, validate, HospitalDoc, InstanceDoc,
    MatchingDoc, RegionDoc, ResidentDoc, ValidationReport, Violation,
};
pub use fixtures::{example_g2, example_g2_with_cap};

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_type!(
    /// Position of a resident in declaration order.
    ResidentIx
);
index_type!(
    /// Position of a hospital in declaration order.
    HospitalIx
);
index_type!(
    /// Position of a region in declaration order.
    RegionIx
);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resident {
    pub id: String,
    /// Most preferred first.
    pub prefs: Vec<HospitalIx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hospital {
    pub id: String,
    pub capacity: u32,
    /// Most preferred first.
    pub prefs: Vec<ResidentIx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub hospitals: Vec<HospitalIx>,
    pub cap: u32,
}

impl Region {
    pub fn contains(&self, h: HospitalIx) -> bool {
        self.hospitals.contains(&h)
    }
}

/// An HR instance with regional caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    residents: Vec<Resident>,
    hospitals: Vec<Hospital>,
    regions: Vec<Region>,
    resident_by_id: HashMap<String, ResidentIx>,
    hospital_by_id: HashMap<String, HospitalIx>,
    regions_of: Vec<Vec<RegionIx>>,
    resident_rank: Vec<HashMap<HospitalIx, usize>>,
    hospital_rank: Vec<HashMap<ResidentIx, usize>>,
}

impl Instance {
    /// Builds an instance from already-indexed parts. Callers inside the crate
    /// guarantee validity; everything public goes through [`Instance::from_doc`].
    pub(crate) fn from_parts(
        residents: Vec<Resident>,
        hospitals: Vec<Hospital>,
        regions: Vec<Region>,
    ) -> Self {
        let resident_by_id = residents
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), ResidentIx(i)))
            .collect();
        let hospital_by_id = hospitals
            .iter()
            .enumerate()
            .map(|(i, h)| (h.id.clone(), HospitalIx(i)))
            .collect();
        let mut regions_of = vec![Vec::new(); hospitals.len()];
        for (e, region) in regions.iter().enumerate() {
            for h in &region.hospitals {
                regions_of[h.0].push(RegionIx(e));
            }
        }
        let resident_rank = residents
            .iter()
            .map(|r| r.prefs.iter().enumerate().map(|(k, &h)| (h, k)).collect())
            .collect();
        let hospital_rank = hospitals
            .iter()
            .map(|h| h.prefs.iter().enumerate().map(|(k, &r)| (r, k)).collect())
            .collect();
        Instance {
            residents,
            hospitals,
            regions,
            resident_by_id,
            hospital_by_id,
            regions_of,
            resident_rank,
            hospital_rank,
        }
    }

    /// Validates a document and converts it into an instance. Regions listing
    /// the same hospital set with the same cap are merged.
    pub fn from_doc(doc: &InstanceDoc) -> Result<Self> {
        let report = validate(doc);
        if !report.is_empty() {
            return Err(Error::Invalid(report));
        }
        Ok(document::build_validated(doc))
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            residents: self
                .residents
                .iter()
                .map(|r| ResidentDoc {
                    id: r.id.clone(),
                    prefs: r.prefs.iter().map(|&h| self.hospital(h).id.clone()).collect(),
                })
                .collect(),
            hospitals: self
                .hospitals
                .iter()
                .map(|h| HospitalDoc {
                    id: h.id.clone(),
                    capacity: h.capacity,
                    prefs: h.prefs.iter().map(|&r| self.resident(r).id.clone()).collect(),
                })
                .collect(),
            regions: self
                .regions
                .iter()
                .map(|e| RegionDoc {
                    hospitals: e.hospitals.iter().map(|&h| self.hospital(h).id.clone()).collect(),
                    cap: e.cap,
                })
                .collect(),
        }
    }

    pub fn residents(&self) -> &[Resident] {
        &self.residents
    }

    pub fn hospitals(&self) -> &[Hospital] {
        &self.hospitals
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn num_residents(&self) -> usize {
        self.residents.len()
    }

    pub fn num_hospitals(&self) -> usize {
        self.hospitals.len()
    }

    pub fn resident(&self, r: ResidentIx) -> &Resident {
        &self.residents[r.0]
    }

    pub fn hospital(&self, h: HospitalIx) -> &Hospital {
        &self.hospitals[h.0]
    }

    pub fn region(&self, e: RegionIx) -> &Region {
        &self.regions[e.0]
    }

    pub fn resident_ixs(&self) -> impl Iterator<Item = ResidentIx> + '_ {
        (0..self.residents.len()).map(ResidentIx)
    }

    pub fn hospital_ixs(&self) -> impl Iterator<Item = HospitalIx> + '_ {
        (0..self.hospitals.len()).map(HospitalIx)
    }

    pub fn region_ixs(&self) -> impl Iterator<Item = RegionIx> + '_ {
        (0..self.regions.len()).map(RegionIx)
    }

    pub fn resident_ix(&self, id: &str) -> Option<ResidentIx> {
        self.resident_by_id.get(id).copied()
    }

    pub fn hospital_ix(&self, id: &str) -> Option<HospitalIx> {
        self.hospital_by_id.get(id).copied()
    }

    pub fn region_ix(&self, hospitals: &[HospitalIx]) -> Option<RegionIx> {
        let wanted: BTreeSet<_> = hospitals.iter().copied().collect();
        self.regions
            .iter()
            .position(|e| e.hospitals.iter().copied().collect::<BTreeSet<_>>() == wanted)
            .map(RegionIx)
    }

    /// Regions containing `h`, in declaration order.
    pub fn regions_of(&self, h: HospitalIx) -> &[RegionIx] {
        &self.regions_of[h.0]
    }

    pub fn capacity(&self, h: HospitalIx) -> u32 {
        self.hospitals[h.0].capacity
    }

    /// Position of `h` on `r`'s list (0 = first choice).
    pub fn resident_rank(&self, r: ResidentIx, h: HospitalIx) -> Option<usize> {
        self.resident_rank[r.0].get(&h).copied()
    }

    /// Position of `r` on `h`'s list (0 = first choice).
    pub fn hospital_rank(&self, h: HospitalIx, r: ResidentIx) -> Option<usize> {
        self.hospital_rank[h.0].get(&r).copied()
    }

    pub fn is_acceptable(&self, r: ResidentIx, h: HospitalIx) -> bool {
        self.resident_rank[r.0].contains_key(&h)
    }

    /// Number of acceptable pairs.
    pub fn num_pairs(&self) -> usize {
        self.residents.iter().map(|r| r.prefs.len()).sum()
    }

    /// Same instance with every hospital capacity replaced.
    pub fn with_capacities(&self, capacities: &[u32]) -> Instance {
        assert_eq!(capacities.len(), self.hospitals.len());
        let mut out = self.clone();
        for (h, &q) in out.hospitals.iter_mut().zip(capacities) {
            h.capacity = q;
        }
        out
    }

    /// Same instance with every region removed.
    pub fn without_regions(&self) -> Instance {
        Instance::from_parts(self.residents.clone(), self.hospitals.clone(), Vec::new())
    }

    pub fn capacities(&self) -> Vec<u32> {
        self.hospitals.iter().map(|h| h.capacity).collect()
    }

    pub fn classify(&self) -> InstanceClass {
        classify(self)
    }

    /// AC(a) for the agent with the given id.
    pub fn acceptables(&self, agent: &str) -> Result<BTreeSet<&str>> {
        if let Some(r) = self.resident_ix(agent) {
            Ok(self
                .resident(r)
                .prefs
                .iter()
                .map(|&h| self.hospital(h).id.as_str())
                .collect())
        } else if let Some(h) = self.hospital_ix(agent) {
            Ok(self
                .hospital(h)
                .prefs
                .iter()
                .map(|&r| self.resident(r).id.as_str())
                .collect())
        } else {
            Err(Error::UnknownAgent(agent.to_string()))
        }
    }

    /// CommonR(H'): residents acceptable to every hospital in `hospitals`.
    pub fn common_residents(&self, hospitals: &[&str]) -> Result<BTreeSet<&str>> {
        let ixs = hospitals
            .iter()
            .map(|id| {
                self.hospital_ix(id)
                    .ok_or_else(|| Error::UnknownAgent(id.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .common_residents_ix(&ixs)?
            .into_iter()
            .map(|r| self.resident(r).id.as_str())
            .collect())
    }

    /// Index form of [`Instance::common_residents`], in declaration order.
    pub fn common_residents_ix(&self, hospitals: &[HospitalIx]) -> Result<Vec<ResidentIx>> {
        let (first, rest) = hospitals.split_first().ok_or(Error::EmptyHospitalSet)?;
        let mut common: Vec<ResidentIx> = self.hospital(*first).prefs.clone();
        common.sort();
        common.retain(|&r| rest.iter().all(|&h| self.hospital_rank(h, r).is_some()));
        Ok(common)
    }

    /// Builds an assignment from `(resident id, hospital id)` pairs.
    pub fn assignment<'a, I>(&self, pairs: I) -> Result<Assignment>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        pairs
            .into_iter()
            .map(|(r, h)| {
                let ri = self
                    .resident_ix(r)
                    .ok_or_else(|| Error::UnknownAgent(r.to_string()))?;
                let hi = self
                    .hospital_ix(h)
                    .ok_or_else(|| Error::UnknownAgent(h.to_string()))?;
                Ok((ri, hi))
            })
            .collect()
    }

    pub fn assignment_from_doc(&self, doc: &MatchingDoc) -> Result<Assignment> {
        self.assignment(doc.pairs.iter().map(|(r, h)| (r.as_str(), h.as_str())))
    }

    pub fn assignment_to_doc(&self, m: &Assignment) -> MatchingDoc {
        MatchingDoc {
            pairs: m
                .pairs()
                .map(|(r, h)| (self.resident(r).id.clone(), self.hospital(h).id.clone()))
                .collect(),
        }
    }

    /// Renders pairs as `{(r1,h1), (r2,h2)}` using agent ids.
    pub fn display_assignment(&self, m: &Assignment) -> String {
        let body: Vec<String> = m
            .pairs()
            .map(|(r, h)| format!("({},{})", self.resident(r).id, self.hospital(h).id))
            .collect();
        format!("{{{}}}", body.join(", "))
    }
}

/// Derived parameters of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceClass {
    /// Longest resident list.
    pub alpha: usize,
    /// Longest hospital list.
    pub beta: usize,
    /// Largest region.
    pub gamma: usize,
    pub disjoint: bool,
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{}) {}",
            self.alpha,
            self.beta,
            self.gamma,
            if self.disjoint { "disjoint" } else { "intersecting" }
        )
    }
}

pub fn classify(instance: &Instance) -> InstanceClass {
    let alpha = instance
        .residents
        .iter()
        .map(|r| r.prefs.len())
        .max()
        .unwrap_or(0);
    let beta = instance
        .hospitals
        .iter()
        .map(|h| h.prefs.len())
        .max()
        .unwrap_or(0);
    let gamma = instance
        .regions
        .iter()
        .map(|e| e.hospitals.len())
        .max()
        .unwrap_or(0);
    let regions = &instance.regions;
    let disjoint = regions.iter().enumerate().all(|(i, a)| {
        regions[i + 1..]
            .iter()
            .all(|b| a.hospitals.iter().all(|h| !b.hospitals.contains(h)))
    });
    InstanceClass {
        alpha,
        beta,
        gamma,
        disjoint,
    }
}

/// A set of resident-hospital pairs, kept sorted by (resident, hospital)
/// declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    pairs: BTreeSet<(ResidentIx, HospitalIx)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, r: ResidentIx, h: HospitalIx) -> bool {
        self.pairs.insert((r, h))
    }

    pub fn remove(&mut self, r: ResidentIx, h: HospitalIx) -> bool {
        self.pairs.remove(&(r, h))
    }

    pub fn contains(&self, r: ResidentIx, h: HospitalIx) -> bool {
        self.pairs.contains(&(r, h))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ResidentIx, HospitalIx)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// First hospital paired with `r`, if any.
    pub fn hospital_of(&self, r: ResidentIx) -> Option<HospitalIx> {
        self.pairs
            .range((r, HospitalIx(0))..=(r, HospitalIx(usize::MAX)))
            .next()
            .map(|&(_, h)| h)
    }

    pub fn residents_of(&self, h: HospitalIx) -> impl Iterator<Item = ResidentIx> + '_ {
        self.pairs.iter().filter(move |p| p.1 == h).map(|p| p.0)
    }

    pub fn extend(&mut self, other: &Assignment) {
        self.pairs.extend(other.pairs.iter().copied());
    }
}

impl FromIterator<(ResidentIx, HospitalIx)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (ResidentIx, HospitalIx)>>(iter: T) -> Self {
        Assignment {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// Explains why `m` is not a matching of `instance`, or `None` if it is one.
pub fn matching_violation(instance: &Instance, m: &Assignment) -> Option<String> {
    let mut per_resident = vec![0usize; instance.num_residents()];
    let mut per_hospital = vec![0u32; instance.num_hospitals()];
    for (r, h) in m.pairs() {
        if r.0 >= instance.num_residents() || h.0 >= instance.num_hospitals() {
            return Some(format!("pair ({}, {}) refers to unknown agents", r.0, h.0));
        }
        if !instance.is_acceptable(r, h) {
            return Some(format!(
                "({}, {}) is not an acceptable pair",
                instance.resident(r).id,
                instance.hospital(h).id
            ));
        }
        per_resident[r.0] += 1;
        per_hospital[h.0] += 1;
    }
    if let Some(r) = per_resident.iter().position(|&c| c > 1) {
        return Some(format!(
            "resident {} is assigned more than once",
            instance.residents[r].id
        ));
    }
    for (h, &count) in per_hospital.iter().enumerate() {
        let hosp = &instance.hospitals[h];
        if count > hosp.capacity {
            return Some(format!(
                "hospital {} is assigned {} residents, capacity {}",
                hosp.id, count, hosp.capacity
            ));
        }
    }
    None
}

pub fn is_matching(instance: &Instance, m: &Assignment) -> bool {
    matching_violation(instance, m).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g2_classifies_as_222_disjoint() {
        let g2 = example_g2();
        assert_eq!(
            classify(&g2),
            InstanceClass {
                alpha: 2,
                beta: 2,
                gamma: 2,
                disjoint: true
            }
        );
    }

    #[test]
    fn empty_region_set_gives_gamma_zero() {
        let g2 = example_g2().without_regions();
        let class = classify(&g2);
        assert_eq!(class.gamma, 0);
        assert!(class.disjoint);
    }

    #[test]
    fn shared_member_is_not_disjoint() {
        let doc = InstanceDoc::default()
            .resident("r1", &["h1", "h2"])
            .hospital("h1", 1, &["r1"])
            .hospital("h2", 1, &["r1"])
            .region(&["h1", "h2"], 1)
            .region(&["h2"], 1);
        let inst = Instance::from_doc(&doc).unwrap();
        assert!(!classify(&inst).disjoint);
        assert_eq!(classify(&inst).gamma, 2);
    }

    #[test]
    fn empty_instance_classifies_to_zeros() {
        let inst = Instance::from_doc(&InstanceDoc::default()).unwrap();
        assert_eq!(
            classify(&inst),
            InstanceClass {
                alpha: 0,
                beta: 0,
                gamma: 0,
                disjoint: true
            }
        );
    }

    #[test]
    fn acceptables_on_g2() {
        let g2 = example_g2();
        assert_eq!(g2.acceptables("h1").unwrap(), BTreeSet::from(["r1", "r2"]));
        assert_eq!(g2.acceptables("r2").unwrap(), BTreeSet::from(["h1", "h2"]));
        assert!(matches!(g2.acceptables("nobody"), Err(Error::UnknownAgent(_))));
    }

    #[test]
    fn acceptables_of_agent_with_empty_list() {
        let doc = InstanceDoc::default().resident("r", &[]).hospital("h", 1, &[]);
        let inst = Instance::from_doc(&doc).unwrap();
        assert!(inst.acceptables("r").unwrap().is_empty());
        assert!(inst.acceptables("h").unwrap().is_empty());
    }

    #[test]
    fn common_residents_cases() {
        let g2 = example_g2();
        assert_eq!(
            g2.common_residents(&["h1", "h2"]).unwrap(),
            BTreeSet::from(["r1", "r2"])
        );
        assert_eq!(
            g2.common_residents(&["h2"]).unwrap(),
            g2.acceptables("h2").unwrap()
        );
        assert!(matches!(g2.common_residents(&[]), Err(Error::EmptyHospitalSet)));
        assert!(matches!(
            g2.common_residents(&["hx"]),
            Err(Error::UnknownAgent(_))
        ));

        let doc = InstanceDoc::default()
            .resident("r1", &["h1"])
            .resident("r2", &["h2"])
            .hospital("h1", 1, &["r1"])
            .hospital("h2", 1, &["r2"]);
        let inst = Instance::from_doc(&doc).unwrap();
        assert!(inst.common_residents(&["h1", "h2"]).unwrap().is_empty());
    }

    #[test]
    fn matching_predicate() {
        let g2 = example_g2();
        assert!(is_matching(&g2, &Assignment::new()));
        assert!(is_matching(
            &g2,
            &g2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap()
        ));
        // r1 twice
        assert!(!is_matching(
            &g2,
            &g2.assignment([("r1", "h1"), ("r1", "h2")]).unwrap()
        ));
        // h1 over capacity
        assert!(!is_matching(
            &g2,
            &g2.assignment([("r1", "h1"), ("r2", "h1")]).unwrap()
        ));
    }

    #[test]
    fn hospital_of_uses_range() {
        let g2 = example_g2();
        let m = g2.assignment([("r2", "h1")]).unwrap();
        assert_eq!(m.hospital_of(ResidentIx(0)), None);
        assert_eq!(m.hospital_of(ResidentIx(1)), Some(HospitalIx(0)));
    }
}
