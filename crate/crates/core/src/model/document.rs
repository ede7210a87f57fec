use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Hospital, HospitalIx, Instance, Region, Resident, ResidentIx};
use crate::error::{Error, Result};

/// JSON form of an instance, with agents referenced by id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub residents: Vec<ResidentDoc>,
    pub hospitals: Vec<HospitalDoc>,
    #[serde(default)]
    pub regions: Vec<RegionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidentDoc {
    pub id: String,
    pub prefs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HospitalDoc {
    pub id: String,
    pub capacity: u32,
    pub prefs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDoc {
    pub hospitals: Vec<String>,
    pub cap: u32,
}

/// JSON form of an assignment: `{"pairs": [["r1", "h1"], ...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingDoc {
    pub pairs: Vec<(String, String)>,
}

fn owned(ids: &[&str]) -> Vec<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

impl InstanceDoc {
    pub fn resident(mut self, id: &str, prefs: &[&str]) -> Self {
        self.residents.push(ResidentDoc {
            id: id.to_string(),
            prefs: owned(prefs),
        });
        self
    }

    pub fn hospital(mut self, id: &str, capacity: u32, prefs: &[&str]) -> Self {
        self.hospitals.push(HospitalDoc {
            id: id.to_string(),
            capacity,
            prefs: owned(prefs),
        });
        self
    }

    pub fn region(mut self, hospitals: &[&str], cap: u32) -> Self {
        self.regions.push(RegionDoc {
            hospitals: owned(hospitals),
            cap,
        });
        self
    }

    pub fn build(&self) -> Result<Instance> {
        Instance::from_doc(self)
    }
}

/// One broken instance invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateResident(String),
    DuplicateHospital(String),
    /// The same id names both a resident and a hospital.
    SharedId(String),
    UnknownHospitalInList {
        resident: String,
        hospital: String,
    },
    UnknownResidentInList {
        hospital: String,
        resident: String,
    },
    RepeatedInList {
        agent: String,
        entry: String,
    },
    /// `resident` and `hospital` disagree on acceptability.
    NotMutual {
        resident: String,
        hospital: String,
        listed_by_resident: bool,
    },
    EmptyRegion {
        index: usize,
    },
    UnknownHospitalInRegion {
        index: usize,
        hospital: String,
    },
    RepeatedInRegion {
        index: usize,
        hospital: String,
    },
    ConflictingRegionCaps {
        hospitals: Vec<String>,
        caps: Vec<u32>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateResident(id) => write!(f, "resident id `{id}` declared twice"),
            Violation::DuplicateHospital(id) => write!(f, "hospital id `{id}` declared twice"),
            Violation::SharedId(id) => write!(f, "id `{id}` names both a resident and a hospital"),
            Violation::UnknownHospitalInList { resident, hospital } => {
                write!(f, "resident `{resident}` lists unknown hospital `{hospital}`")
            }
            Violation::UnknownResidentInList { hospital, resident } => {
                write!(f, "hospital `{hospital}` lists unknown resident `{resident}`")
            }
            Violation::RepeatedInList { agent, entry } => {
                write!(f, "`{agent}` lists `{entry}` more than once")
            }
            Violation::NotMutual {
                resident,
                hospital,
                listed_by_resident,
            } => {
                if *listed_by_resident {
                    write!(
                        f,
                        "`{resident}` lists `{hospital}` but `{hospital}` does not list `{resident}`"
                    )
                } else {
                    write!(
                        f,
                        "`{hospital}` lists `{resident}` but `{resident}` does not list `{hospital}`"
                    )
                }
            }
            Violation::EmptyRegion { index } => write!(f, "region #{index} is empty"),
            Violation::UnknownHospitalInRegion { index, hospital } => {
                write!(f, "region #{index} contains unknown hospital `{hospital}`")
            }
            Violation::RepeatedInRegion { index, hospital } => {
                write!(f, "region #{index} lists `{hospital}` more than once")
            }
            Violation::ConflictingRegionCaps { hospitals, caps } => write!(
                f,
                "region {{{}}} declared with different caps {:?}",
                hospitals.join(", "),
                caps
            ),
        }
    }
}

/// Every violation found in a document; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport(pub Vec<Violation>);

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

pub fn validate(doc: &InstanceDoc) -> ValidationReport {
    let mut out = Vec::new();

    let mut residents: HashMap<&str, usize> = HashMap::new();
    for (i, r) in doc.residents.iter().enumerate() {
        if residents.insert(&r.id, i).is_some() {
            out.push(Violation::DuplicateResident(r.id.clone()));
        }
    }
    let mut hospitals: HashMap<&str, usize> = HashMap::new();
    for (i, h) in doc.hospitals.iter().enumerate() {
        if hospitals.insert(&h.id, i).is_some() {
            out.push(Violation::DuplicateHospital(h.id.clone()));
        }
    }
    for h in &doc.hospitals {
        if residents.contains_key(h.id.as_str()) {
            out.push(Violation::SharedId(h.id.clone()));
        }
    }

    let mut resident_lists: HashSet<(&str, &str)> = HashSet::new();
    for r in &doc.residents {
        let mut seen = HashSet::new();
        for h in &r.prefs {
            if !seen.insert(h.as_str()) {
                out.push(Violation::RepeatedInList {
                    agent: r.id.clone(),
                    entry: h.clone(),
                });
            } else if !hospitals.contains_key(h.as_str()) {
                out.push(Violation::UnknownHospitalInList {
                    resident: r.id.clone(),
                    hospital: h.clone(),
                });
            } else {
                resident_lists.insert((&r.id, h));
            }
        }
    }
    let mut hospital_lists: HashSet<(&str, &str)> = HashSet::new();
    for h in &doc.hospitals {
        let mut seen = HashSet::new();
        for r in &h.prefs {
            if !seen.insert(r.as_str()) {
                out.push(Violation::RepeatedInList {
                    agent: h.id.clone(),
                    entry: r.clone(),
                });
            } else if !residents.contains_key(r.as_str()) {
                out.push(Violation::UnknownResidentInList {
                    hospital: h.id.clone(),
                    resident: r.clone(),
                });
            } else {
                hospital_lists.insert((r, &h.id));
            }
        }
    }
    // Report in declaration order so the output is stable.
    for r in &doc.residents {
        for h in &r.prefs {
            let key = (r.id.as_str(), h.as_str());
            if hospitals.contains_key(h.as_str()) && !hospital_lists.contains(&key) {
                out.push(Violation::NotMutual {
                    resident: r.id.clone(),
                    hospital: h.clone(),
                    listed_by_resident: true,
                });
            }
        }
    }
    for h in &doc.hospitals {
        for r in &h.prefs {
            let key = (r.as_str(), h.id.as_str());
            if residents.contains_key(r.as_str()) && !resident_lists.contains(&key) {
                out.push(Violation::NotMutual {
                    resident: r.clone(),
                    hospital: h.id.clone(),
                    listed_by_resident: false,
                });
            }
        }
    }

    let mut caps_by_set: Vec<(BTreeSet<&str>, Vec<u32>)> = Vec::new();
    for (index, e) in doc.regions.iter().enumerate() {
        if e.hospitals.is_empty() {
            out.push(Violation::EmptyRegion { index });
            continue;
        }
        let mut set = BTreeSet::new();
        let mut ok = true;
        for h in &e.hospitals {
            if !hospitals.contains_key(h.as_str()) {
                out.push(Violation::UnknownHospitalInRegion {
                    index,
                    hospital: h.clone(),
                });
                ok = false;
            } else if !set.insert(h.as_str()) {
                out.push(Violation::RepeatedInRegion {
                    index,
                    hospital: h.clone(),
                });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        match caps_by_set.iter_mut().find(|(s, _)| *s == set) {
            Some((_, caps)) => {
                if !caps.contains(&e.cap) {
                    caps.push(e.cap);
                }
            }
            None => caps_by_set.push((set, vec![e.cap])),
        }
    }
    for (set, caps) in caps_by_set {
        if caps.len() > 1 {
            out.push(Violation::ConflictingRegionCaps {
                hospitals: set.into_iter().map(str::to_string).collect(),
                caps,
            });
        }
    }

    ValidationReport(out)
}

/// Converts a document that passed [`validate`].
pub(super) fn build_validated(doc: &InstanceDoc) -> Instance {
    let rix: HashMap<&str, ResidentIx> = doc
        .residents
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.as_str(), ResidentIx(i)))
        .collect();
    let hix: HashMap<&str, HospitalIx> = doc
        .hospitals
        .iter()
        .enumerate()
        .map(|(i, h)| (h.id.as_str(), HospitalIx(i)))
        .collect();
    let residents = doc
        .residents
        .iter()
        .map(|r| Resident {
            id: r.id.clone(),
            prefs: r.prefs.iter().map(|h| hix[h.as_str()]).collect(),
        })
        .collect();
    let hospitals = doc
        .hospitals
        .iter()
        .map(|h| Hospital {
            id: h.id.clone(),
            capacity: h.capacity,
            prefs: h.prefs.iter().map(|r| rix[r.as_str()]).collect(),
        })
        .collect();
    let mut seen: HashSet<BTreeSet<HospitalIx>> = HashSet::new();
    let mut regions = Vec::new();
    for e in &doc.regions {
        let members: Vec<HospitalIx> = e.hospitals.iter().map(|h| hix[h.as_str()]).collect();
        if seen.insert(members.iter().copied().collect()) {
            regions.push(Region {
                hospitals: members,
                cap: e.cap,
            });
        }
    }
    Instance::from_parts(residents, hospitals, regions)
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse((e.line() > 0).then_some(e.line()), format!("{e}"))
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(json_error)?;
    let mut ids = HashSet::new();
    for (i, r) in doc.residents.iter().enumerate() {
        if !ids.insert(r.id.as_str()) {
            return Err(Error::parse(
                None,
                format!("residents[{i}].id: duplicate resident id `{}`", r.id),
            ));
        }
    }
    ids.clear();
    for (i, h) in doc.hospitals.iter().enumerate() {
        if !ids.insert(h.id.as_str()) {
            return Err(Error::parse(
                None,
                format!("hospitals[{i}].id: duplicate hospital id `{}`", h.id),
            ));
        }
    }
    Instance::from_doc(&doc)
}

pub fn save_instance(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance.to_doc()).expect("instance documents always serialize")
}

pub fn load_matching(text: &str) -> Result<MatchingDoc> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn save_matching(doc: &MatchingDoc) -> String {
    serde_json::to_string_pretty(doc).expect("matching documents always serialize")
}
