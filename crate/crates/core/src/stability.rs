//! Feasibility, blocking pairs and strong blocking pairs.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{matching_violation, Assignment, HospitalIx, Instance, RegionIx, ResidentIx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockingKind {
    /// Blocking pair that is tolerated under regional caps.
    Bp,
    /// Strong blocking pair.
    Sbp,
}

/// Why a blocking pair is strong.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SbpCondition {
    /// The hospital prefers the resident to this current assignee.
    PreferredOverAssignee(ResidentIx),
    /// Moving the resident to the hospital keeps every region within its cap.
    MoveFeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingWitness {
    pub resident: ResidentIx,
    pub hospital: HospitalIx,
    pub kind: BlockingKind,
    /// Empty for `Bp`. A displacement condition, when present, comes first.
    pub conditions: Vec<SbpCondition>,
}

impl BlockingWitness {
    pub fn pair(&self) -> (ResidentIx, HospitalIx) {
        (self.resident, self.hospital)
    }

    pub fn describe(&self, instance: &Instance) -> String {
        let r = &instance.resident(self.resident).id;
        let h = &instance.hospital(self.hospital).id;
        let conds: Vec<String> = self
            .conditions
            .iter()
            .map(|c| match c {
                SbpCondition::MoveFeasible => "move-feasible".to_string(),
                SbpCondition::PreferredOverAssignee(x) => {
                    format!("preferred-over {}", instance.resident(*x).id)
                }
            })
            .collect();
        if conds.is_empty() {
            format!("({r},{h})")
        } else {
            format!("({r},{h}) via {}", conds.join(" + "))
        }
    }
}

/// A matching indexed for constant-time queries.
pub(crate) struct MatchingView {
    pub assigned: Vec<Option<HospitalIx>>,
    pub members: Vec<Vec<ResidentIx>>,
    pub region_load: Vec<u32>,
}

impl MatchingView {
    pub fn new(instance: &Instance, m: &Assignment) -> Result<Self> {
        if let Some(why) = matching_violation(instance, m) {
            return Err(Error::NotAMatching(why));
        }
        let mut assigned = vec![None; instance.num_residents()];
        let mut members = vec![Vec::new(); instance.num_hospitals()];
        for (r, h) in m.pairs() {
            assigned[r.0] = Some(h);
            members[h.0].push(r);
        }
        let region_load = instance
            .regions()
            .iter()
            .map(|e| e.hospitals.iter().map(|h| members[h.0].len() as u32).sum())
            .collect();
        Ok(MatchingView {
            assigned,
            members,
            region_load,
        })
    }

    fn first_overloaded(&self, instance: &Instance) -> Option<RegionIx> {
        instance
            .region_ixs()
            .find(|e| self.region_load[e.0] > instance.region(*e).cap)
    }

    /// Def. of a blocking pair, for an acceptable `(r, h)`.
    fn blocks(&self, instance: &Instance, r: ResidentIx, h: HospitalIx) -> bool {
        let resident_gains = match self.assigned[r.0] {
            None => true,
            Some(cur) => instance.resident_rank(r, h) < instance.resident_rank(r, cur),
        };
        if !resident_gains {
            return false;
        }
        let mine = &self.members[h.0];
        (mine.len() as u32) < instance.capacity(h) || self.worst_below(instance, r, h).is_some()
    }

    /// The least preferred assignee of `h` that `h` ranks below `r`.
    fn worst_below(&self, instance: &Instance, r: ResidentIx, h: HospitalIx) -> Option<ResidentIx> {
        let mine = instance.hospital_rank(h, r)?;
        self.members[h.0]
            .iter()
            .copied()
            .filter(|&x| instance.hospital_rank(h, x).is_some_and(|k| k > mine))
            .max_by_key(|&x| instance.hospital_rank(h, x))
    }

    /// Whether moving `r` to `h` keeps every region within its cap.
    fn move_feasible(&self, instance: &Instance, r: ResidentIx, h: HospitalIx) -> bool {
        let from = self.assigned[r.0];
        instance.regions_of(h).iter().all(|&e| {
            let region = instance.region(e);
            let stays = from.is_some_and(|f| region.contains(f));
            let load = self.region_load[e.0] + u32::from(!stays);
            load <= region.cap
        })
    }
}

/// |M(E)| for region `e`.
pub fn region_load(instance: &Instance, m: &Assignment, e: RegionIx) -> Result<u32> {
    if e.0 >= instance.regions().len() {
        return Err(Error::UnknownRegion);
    }
    let region = instance.region(e);
    let mut residents: Vec<ResidentIx> = m
        .pairs()
        .filter(|(_, h)| region.contains(*h))
        .map(|(r, _)| r)
        .collect();
    residents.dedup();
    Ok(residents.len() as u32)
}

/// Whether every region is within its cap. Rejects non-matchings.
pub fn is_feasible(instance: &Instance, m: &Assignment) -> Result<bool> {
    let view = MatchingView::new(instance, m)?;
    Ok(view.first_overloaded(instance).is_none())
}

/// All blocking pairs, in (resident, hospital) declaration order.
pub fn blocking_pairs(instance: &Instance, m: &Assignment) -> Result<Vec<(ResidentIx, HospitalIx)>> {
    let view = MatchingView::new(instance, m)?;
    Ok(blocking_pairs_in(instance, &view))
}

fn blocking_pairs_in(instance: &Instance, view: &MatchingView) -> Vec<(ResidentIx, HospitalIx)> {
    let mut out = Vec::new();
    for r in instance.resident_ixs() {
        let mut prefs = instance.resident(r).prefs.clone();
        prefs.sort();
        for h in prefs {
            if view.blocks(instance, r, h) {
                out.push((r, h));
            }
        }
    }
    out
}

fn witness(instance: &Instance, view: &MatchingView, r: ResidentIx, h: HospitalIx) -> BlockingWitness {
    let mut conditions = Vec::new();
    if let Some(x) = view.worst_below(instance, r, h) {
        conditions.push(SbpCondition::PreferredOverAssignee(x));
    }
    if view.move_feasible(instance, r, h) {
        conditions.push(SbpCondition::MoveFeasible);
    }
    BlockingWitness {
        resident: r,
        hospital: h,
        kind: if conditions.is_empty() {
            BlockingKind::Bp
        } else {
            BlockingKind::Sbp
        },
        conditions,
    }
}

/// Every blocking pair with its classification.
pub fn classify_blocking_pairs(instance: &Instance, m: &Assignment) -> Result<Vec<BlockingWitness>> {
    let view = MatchingView::new(instance, m)?;
    Ok(blocking_pairs_in(instance, &view)
        .into_iter()
        .map(|(r, h)| witness(instance, &view, r, h))
        .collect())
}

/// Strong blocking pairs of a feasible matching.
pub fn strong_blocking_pairs(instance: &Instance, m: &Assignment) -> Result<Vec<BlockingWitness>> {
    let view = MatchingView::new(instance, m)?;
    if let Some(e) = view.first_overloaded(instance) {
        return Err(Error::Infeasible(describe_region(instance, e)));
    }
    Ok(blocking_pairs_in(instance, &view)
        .into_iter()
        .map(|(r, h)| witness(instance, &view, r, h))
        .filter(|w| w.kind == BlockingKind::Sbp)
        .collect())
}

/// Feasible and free of strong blocking pairs. Non-matchings are never
/// strongly stable.
pub fn is_strongly_stable(instance: &Instance, m: &Assignment) -> bool {
    let Ok(view) = MatchingView::new(instance, m) else {
        return false;
    };
    if view.first_overloaded(instance).is_some() {
        return false;
    }
    for r in instance.resident_ixs() {
        for &h in &instance.resident(r).prefs {
            if view.blocks(instance, r, h)
                && (view.worst_below(instance, r, h).is_some() || view.move_feasible(instance, r, h))
            {
                return false;
            }
        }
    }
    true
}

/// Region written as its hospital ids, e.g. `{h1, h2}`.
pub fn describe_region(instance: &Instance, e: RegionIx) -> String {
    let names: Vec<&str> = instance
        .region(e)
        .hospitals
        .iter()
        .map(|&h| instance.hospital(h).id.as_str())
        .collect();
    format!("{{{}}}", names.join(", "))
}

/// Everything `check` reports about a matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub matching_error: Option<String>,
    pub feasible: bool,
    pub overloaded: Vec<RegionIx>,
    /// All blocking pairs, classified.
    pub blocking: Vec<BlockingWitness>,
}

impl StabilityReport {
    pub fn strongly_stable(&self) -> bool {
        self.matching_error.is_none()
            && self.feasible
            && self.blocking.iter().all(|w| w.kind == BlockingKind::Bp)
    }

    pub fn strong(&self) -> impl Iterator<Item = &BlockingWitness> {
        self.blocking.iter().filter(|w| w.kind == BlockingKind::Sbp)
    }
}

pub fn check(instance: &Instance, m: &Assignment) -> StabilityReport {
    let view = match MatchingView::new(instance, m) {
        Ok(v) => v,
        Err(e) => {
            return StabilityReport {
                matching_error: Some(e.to_string()),
                feasible: false,
                overloaded: Vec::new(),
                blocking: Vec::new(),
            }
        }
    };
    let overloaded: Vec<RegionIx> = instance
        .region_ixs()
        .filter(|e| view.region_load[e.0] > instance.region(*e).cap)
        .collect();
    let blocking = blocking_pairs_in(instance, &view)
        .into_iter()
        .map(|(r, h)| witness(instance, &view, r, h))
        .collect();
    StabilityReport {
        matching_error: None,
        feasible: overloaded.is_empty(),
        overloaded,
        blocking,
    }
}

impl fmt::Display for BlockingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockingKind::Bp => "BP",
            BlockingKind::Sbp => "SBP",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example_g2, example_g2_with_cap};

    fn ids(inst: &Instance, pairs: &[(ResidentIx, HospitalIx)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|&(r, h)| (inst.resident(r).id.clone(), inst.hospital(h).id.clone()))
            .collect()
    }

    fn owned(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn region_loads_on_g2() {
        let g2 = example_g2();
        let e = RegionIx(0);
        let m = g2.assignment([("r1", "h1")]).unwrap();
        assert_eq!(region_load(&g2, &m, e).unwrap(), 1);
        assert_eq!(region_load(&g2, &Assignment::new(), e).unwrap(), 0);
        let both = g2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap();
        assert_eq!(region_load(&g2, &both, e).unwrap(), 2);
        assert!(matches!(
            region_load(&g2, &m, RegionIx(4)),
            Err(Error::UnknownRegion)
        ));
    }

    #[test]
    fn feasibility_on_g2() {
        let g2 = example_g2();
        let both = g2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap();
        assert!(!is_feasible(&g2, &both).unwrap());
        assert!(is_feasible(&g2, &g2.assignment([("r1", "h1")]).unwrap()).unwrap());
        assert!(is_feasible(&g2, &Assignment::new()).unwrap());
        let bad = g2.assignment([("r1", "h1"), ("r1", "h2")]).unwrap();
        assert!(matches!(is_feasible(&g2, &bad), Err(Error::NotAMatching(_))));
    }

    #[test]
    fn blocking_pairs_on_g2() {
        let g2 = example_g2();
        let m = g2.assignment([("r1", "h1")]).unwrap();
        assert_eq!(
            ids(&g2, &blocking_pairs(&g2, &m).unwrap()),
            owned(&[("r2", "h1"), ("r2", "h2")])
        );
        let both = g2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap();
        assert!(blocking_pairs(&g2, &both).unwrap().is_empty());
        assert_eq!(
            ids(&g2, &blocking_pairs(&g2, &Assignment::new()).unwrap()),
            owned(&[("r1", "h1"), ("r1", "h2"), ("r2", "h1"), ("r2", "h2")])
        );
    }

    #[test]
    fn strong_blocking_pairs_on_g2() {
        let g2 = example_g2();
        let r1 = g2.resident_ix("r1").unwrap();
        let r2 = g2.resident_ix("r2").unwrap();
        let h1 = g2.hospital_ix("h1").unwrap();

        let m = g2.assignment([("r1", "h1")]).unwrap();
        let sbps = strong_blocking_pairs(&g2, &m).unwrap();
        assert_eq!(sbps.len(), 1);
        assert_eq!(sbps[0].pair(), (r2, h1));
        assert_eq!(sbps[0].conditions, vec![SbpCondition::PreferredOverAssignee(r1)]);

        let empty = strong_blocking_pairs(&g2, &Assignment::new()).unwrap();
        let w = empty.iter().find(|w| w.pair() == (r1, h1)).unwrap();
        assert_eq!(w.conditions, vec![SbpCondition::MoveFeasible]);

        let g2c2 = example_g2_with_cap(2);
        let both = g2c2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap();
        assert!(strong_blocking_pairs(&g2c2, &both).unwrap().is_empty());

        let infeasible = g2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap();
        assert!(matches!(
            strong_blocking_pairs(&g2, &infeasible),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn both_conditions_are_recorded() {
        // h has capacity 2 and holds r2; r1 is preferred and moving is feasible.
        let inst = crate::model::InstanceDoc::default()
            .resident("r1", &["h"])
            .resident("r2", &["h"])
            .hospital("h", 2, &["r1", "r2"])
            .build()
            .unwrap();
        let m = inst.assignment([("r2", "h")]).unwrap();
        let w = &strong_blocking_pairs(&inst, &m).unwrap()[0];
        assert_eq!(
            w.conditions,
            vec![
                SbpCondition::PreferredOverAssignee(ResidentIx(1)),
                SbpCondition::MoveFeasible
            ]
        );
    }

    #[test]
    fn strong_stability_on_g2() {
        let g2 = example_g2();
        assert!(!is_strongly_stable(&g2, &g2.assignment([("r1", "h1")]).unwrap()));
        assert!(!is_strongly_stable(
            &g2,
            &g2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap()
        ));
        let g2c2 = example_g2_with_cap(2);
        assert!(is_strongly_stable(
            &g2c2,
            &g2c2.assignment([("r1", "h1"), ("r2", "h2")]).unwrap()
        ));
    }

    #[test]
    fn report_lists_tolerated_pairs() {
        let g2 = example_g2();
        let m = g2.assignment([("r1", "h1")]).unwrap();
        let report = check(&g2, &m);
        assert!(report.feasible);
        assert_eq!(report.blocking.len(), 2);
        assert_eq!(report.strong().count(), 1);
        assert!(!report.strongly_stable());
        assert_eq!(report.blocking[1].describe(&g2), "(r2,h2)");
    }
}
