//! Polynomial-time solvers for the tractable parameter classes, and a
//! dispatcher that routes an instance to the first one that applies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exhaustive::{exists_strongly_stable, strongly_stable_set};
use crate::hr::{rgs, rgs_with_capacities, shrink};
use crate::model::{
    Assignment, HospitalDoc, HospitalIx, Instance, InstanceDoc, RegionDoc, RegionIx, ResidentDoc, ResidentIx,
};

/// Default bound on `|R| + |H|` for falling back to exhaustive search.
pub const DEFAULT_BRUTE_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Found(Assignment),
    NoneExists,
    /// No applicable solver; the reason names the parameter class.
    Unknown(String),
}

impl SolveOutcome {
    pub fn found(&self) -> Option<&Assignment> {
        match self {
            SolveOutcome::Found(m) => Some(m),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveOutcome::Found(_) => "Found",
            SolveOutcome::NoneExists => "NoneExists",
            SolveOutcome::Unknown(_) => "Unknown",
        }
    }
}

/// Which solver `solve_with` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Auto,
    Alg1,
    Alg2,
    Alg3,
    Alg4,
    Alg5,
    Brute,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algorithm::Auto => "auto",
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 => "alg3",
            Algorithm::Alg4 => "alg4",
            Algorithm::Alg5 => "alg5",
            Algorithm::Brute => "brute",
        };
        f.write_str(s)
    }
}

fn region_deficient(instance: &Instance, load: &[u32], h: HospitalIx) -> bool {
    instance
        .regions_of(h)
        .iter()
        .all(|e| load[e.0] < instance.region(*e).cap)
}

/// Regions of size one. Each hospital's capacity becomes the smaller of its
/// own and its region's cap, then resident-oriented Gale-Shapley runs.
pub fn solve_regions_size1(instance: &Instance) -> Result<Assignment> {
    let class = instance.classify();
    if class.gamma > 1 {
        return Err(Error::precondition(format!(
            "regions of size 1 required, found one of size {}",
            class.gamma
        )));
    }
    Ok(rgs_with_capacities(instance, &size1_capacities(instance)))
}

pub(crate) fn size1_capacities(instance: &Instance) -> Vec<u32> {
    instance
        .hospital_ixs()
        .map(|h| {
            instance
                .regions_of(h)
                .iter()
                .map(|e| instance.region(*e).cap)
                .fold(instance.capacity(h), u32::min)
        })
        .collect()
}

/// Residents with at most one acceptable hospital. Hospitals in declaration
/// order take residents greedily from the top of their lists.
pub fn solve_res_len1(instance: &Instance) -> Result<Assignment> {
    let class = instance.classify();
    if class.alpha > 1 {
        return Err(Error::precondition(format!(
            "resident lists of length at most 1 required, found length {}",
            class.alpha
        )));
    }
    let mut load = vec![0u32; instance.regions().len()];
    let mut m = Assignment::new();
    for h in instance.hospital_ixs() {
        let mut taken = 0u32;
        for &r in &instance.hospital(h).prefs {
            if taken < instance.capacity(h) && region_deficient(instance, &load, h) {
                m.insert(r, h);
                taken += 1;
                for e in instance.regions_of(h) {
                    load[e.0] += 1;
                }
            }
        }
    }
    Ok(m)
}

/// Hospitals with at most one acceptable resident. Residents in declaration
/// order take the first hospital with room whose regions are all deficient.
pub fn solve_hosp_len1(instance: &Instance) -> Result<Assignment> {
    let class = instance.classify();
    if class.beta > 1 {
        return Err(Error::precondition(format!(
            "hospital lists of length at most 1 required, found length {}",
            class.beta
        )));
    }
    let mut load = vec![0u32; instance.regions().len()];
    let mut m = Assignment::new();
    for r in instance.resident_ixs() {
        // Each hospital has only r on its list, so it is empty at this point.
        let pick = instance
            .resident(r)
            .prefs
            .iter()
            .copied()
            .find(|&h| instance.capacity(h) > 0 && region_deficient(instance, &load, h));
        if let Some(h) = pick {
            m.insert(r, h);
            for e in instance.regions_of(h) {
                load[e.0] += 1;
            }
        }
    }
    Ok(m)
}

/// Two residents and two hospitals that list each other and whose hospitals
/// form a region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubInstance2x2 {
    pub residents: [ResidentIx; 2],
    pub hospitals: [HospitalIx; 2],
    pub region: RegionIx,
}

pub fn find_2x2_subinstances(instance: &Instance) -> Vec<SubInstance2x2> {
    instance
        .region_ixs()
        .filter_map(|e| {
            let hs = &instance.region(e).hospitals;
            if hs.len() != 2 {
                return None;
            }
            let common = instance.common_residents_ix(hs).ok()?;
            match common[..] {
                [r1, r2] => Some(SubInstance2x2 {
                    residents: [r1, r2],
                    hospitals: [hs[0], hs[1]],
                    region: e,
                }),
                _ => None,
            }
        })
        .collect()
}

fn disjoint_required(instance: &Instance) -> Result<()> {
    if instance.classify().disjoint {
        Ok(())
    } else {
        Err(Error::precondition("regions must be pairwise disjoint"))
    }
}

/// Instances free of 2x2 blocks with lists, regions and capacities bounded by
/// two. Runs Gale-Shapley and, while some region is overloaded, lowers the
/// capacity of one of its hospitals and reruns.
pub fn solve_2x2_free(instance: &Instance) -> Result<Assignment> {
    solve_2x2_free_counted(instance).map(|(m, _)| m)
}

/// [`solve_2x2_free`] together with the number of capacity decrements made.
pub fn solve_2x2_free_counted(instance: &Instance) -> Result<(Assignment, usize)> {
    disjoint_required(instance)?;
    let class = instance.classify();
    if class.alpha > 2 {
        return Err(Error::precondition(format!(
            "resident lists of length at most 2 required, found length {}",
            class.alpha
        )));
    }
    if class.beta > 2 {
        return Err(Error::precondition(format!(
            "hospital lists of length at most 2 required, found length {}",
            class.beta
        )));
    }
    if class.gamma > 2 {
        return Err(Error::precondition(format!(
            "regions of size at most 2 required, found size {}",
            class.gamma
        )));
    }
    if let Some(h) = instance.hospital_ixs().find(|&h| instance.capacity(h) > 2) {
        return Err(Error::precondition(format!(
            "hospital capacities of at most 2 required, {} has {}",
            instance.hospital(h).id,
            instance.capacity(h)
        )));
    }
    if let Some(sub) = find_2x2_subinstances(instance).first() {
        let [h1, h2] = sub.hospitals;
        return Err(Error::precondition(format!(
            "region {{{}, {}}} has two common residents",
            instance.hospital(h1).id,
            instance.hospital(h2).id
        )));
    }

    let mut caps = instance.capacities();
    let mut m = rgs(instance);
    let bound = 2 * instance.num_hospitals();
    for rounds in 0..=bound {
        let Some(e) = first_overloaded(instance, &m) else {
            return Ok((m, rounds));
        };
        let h = pick_decrement(instance, &caps, e)?;
        caps[h.0] -= 1;
        m = rgs_with_capacities(instance, &caps);
    }
    unreachable!("capacity decrements exceed total capacity")
}

fn first_overloaded(instance: &Instance, m: &Assignment) -> Option<RegionIx> {
    let mut load = vec![0u32; instance.regions().len()];
    for (_, h) in m.pairs() {
        for e in instance.regions_of(h) {
            load[e.0] += 1;
        }
    }
    instance
        .region_ixs()
        .find(|e| load[e.0] > instance.region(*e).cap)
}

fn pick_decrement(instance: &Instance, caps: &[u32], e: RegionIx) -> Result<HospitalIx> {
    let hs = &instance.region(e).hospitals;
    if let [h] = hs[..] {
        return Ok(h);
    }
    let common = instance.common_residents_ix(hs)?;
    if let [r] = common[..] {
        let (plus, minus) = if instance.resident_rank(r, hs[0]) < instance.resident_rank(r, hs[1]) {
            (hs[0], hs[1])
        } else {
            (hs[1], hs[0])
        };
        return Ok(if caps[minus.0] > 0 { minus } else { plus });
    }
    Ok(hs
        .iter()
        .copied()
        .find(|h| caps[h.0] > 0)
        .expect("an overloaded region has a hospital with positive capacity"))
}

/// Disjoint instances with lists and regions of size at most two. Each 2x2
/// block is solved by brute force; the rest is shrunk and handed to
/// [`solve_2x2_free`].
pub fn solve_222_disjoint(instance: &Instance) -> Result<SolveOutcome> {
    disjoint_required(instance)?;
    let class = instance.classify();
    if class.alpha > 2 || class.beta > 2 || class.gamma > 2 {
        return Err(Error::precondition(format!(
            "class (2,2,2) required, found {class}"
        )));
    }
    let blocks = find_2x2_subinstances(instance);
    let mut keep_r = vec![true; instance.num_residents()];
    let mut keep_h = vec![true; instance.num_hospitals()];
    let mut keep_e = vec![true; instance.regions().len()];
    let mut result = Assignment::new();
    for block in &blocks {
        let mut br = vec![false; instance.num_residents()];
        let mut bh = vec![false; instance.num_hospitals()];
        let mut be = vec![false; instance.regions().len()];
        for r in block.residents {
            br[r.0] = true;
            keep_r[r.0] = false;
        }
        for h in block.hospitals {
            bh[h.0] = true;
            keep_h[h.0] = false;
        }
        be[block.region.0] = true;
        keep_e[block.region.0] = false;
        let sub = restrict(instance, &br, &bh, &be);
        match strongly_stable_set(&sub).into_iter().next() {
            Some(m) => result.extend(&lift(instance, &sub, &m)),
            None => return Ok(SolveOutcome::NoneExists),
        }
    }
    let rest = restrict(instance, &keep_r, &keep_h, &keep_e);
    let m = solve_2x2_free(&shrink(&rest))?;
    result.extend(&lift(instance, &rest, &m));
    Ok(SolveOutcome::Found(result))
}

/// The sub-instance on the kept agents and regions, with lists filtered to
/// kept agents.
fn restrict(instance: &Instance, keep_r: &[bool], keep_h: &[bool], keep_e: &[bool]) -> Instance {
    let rid = |r: ResidentIx| instance.resident(r).id.clone();
    let hid = |h: HospitalIx| instance.hospital(h).id.clone();
    let doc = InstanceDoc {
        residents: instance
            .resident_ixs()
            .filter(|r| keep_r[r.0])
            .map(|r| ResidentDoc {
                id: rid(r),
                prefs: instance
                    .resident(r)
                    .prefs
                    .iter()
                    .filter(|h| keep_h[h.0])
                    .map(|&h| hid(h))
                    .collect(),
            })
            .collect(),
        hospitals: instance
            .hospital_ixs()
            .filter(|h| keep_h[h.0])
            .map(|h| HospitalDoc {
                id: hid(h),
                capacity: instance.capacity(h),
                prefs: instance
                    .hospital(h)
                    .prefs
                    .iter()
                    .filter(|r| keep_r[r.0])
                    .map(|&r| rid(r))
                    .collect(),
            })
            .collect(),
        regions: instance
            .region_ixs()
            .filter(|e| keep_e[e.0])
            .map(|e| RegionDoc {
                hospitals: instance.region(e).hospitals.iter().map(|&h| hid(h)).collect(),
                cap: instance.region(e).cap,
            })
            .collect(),
    };
    Instance::from_doc(&doc).expect("restriction of a valid instance is valid")
}

fn lift(instance: &Instance, sub: &Instance, m: &Assignment) -> Assignment {
    m.pairs()
        .map(|(r, h)| {
            (
                instance.resident_ix(&sub.resident(r).id).expect("kept resident"),
                instance.hospital_ix(&sub.hospital(h).id).expect("kept hospital"),
            )
        })
        .collect()
}

/// Routes by parameter class: regions of size 1, then resident lists of
/// length 1, then hospital lists of length 1, then disjoint (2,2,2), then
/// exhaustive search when `|R| + |H| <= brute_limit`.
pub fn dispatch(instance: &Instance, brute_limit: usize) -> SolveOutcome {
    let class = instance.classify();
    let solved = if class.gamma <= 1 {
        solve_regions_size1(instance).map(SolveOutcome::Found)
    } else if class.alpha <= 1 {
        solve_res_len1(instance).map(SolveOutcome::Found)
    } else if class.beta <= 1 {
        solve_hosp_len1(instance).map(SolveOutcome::Found)
    } else if class.alpha <= 2 && class.beta <= 2 && class.gamma <= 2 && class.disjoint {
        solve_222_disjoint(instance)
    } else if instance.num_residents() + instance.num_hospitals() <= brute_limit {
        return exists_strongly_stable(instance);
    } else {
        return SolveOutcome::Unknown(hard_class_reason(instance, brute_limit));
    };
    solved.expect("class checked before routing")
}

fn hard_class_reason(instance: &Instance, brute_limit: usize) -> String {
    let class = instance.classify();
    let family = if !class.disjoint {
        "intersecting regions with lists and regions of size 2 or more"
    } else if class.gamma >= 3 {
        "regions of size 3 or more"
    } else if class.beta >= 3 {
        "hospital lists of length 3 or more"
    } else {
        "resident lists of length 3 or more"
    };
    format!(
        "class {class} ({family}) is NP-hard; {} agents exceed the brute-force limit of {brute_limit}",
        instance.num_residents() + instance.num_hospitals()
    )
}

/// Runs the requested solver. `Auto` is [`dispatch`].
pub fn solve_with(instance: &Instance, algorithm: Algorithm, brute_limit: usize) -> Result<SolveOutcome> {
    Ok(match algorithm {
        Algorithm::Auto => dispatch(instance, brute_limit),
        Algorithm::Alg1 => SolveOutcome::Found(solve_regions_size1(instance)?),
        Algorithm::Alg2 => SolveOutcome::Found(solve_res_len1(instance)?),
        Algorithm::Alg3 => SolveOutcome::Found(solve_hosp_len1(instance)?),
        Algorithm::Alg4 => SolveOutcome::Found(solve_2x2_free(instance)?),
        Algorithm::Alg5 => solve_222_disjoint(instance)?,
        Algorithm::Brute => {
            let size = instance.num_residents() + instance.num_hospitals();
            if size > brute_limit {
                return Err(Error::BoundExceeded {
                    what: "agents",
                    value: size,
                    bound: brute_limit,
                });
            }
            exists_strongly_stable(instance)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exhaustive::strongly_stable_set;
    use crate::model::{example_g2, example_g2_with_cap};
    use crate::stability::{blocking_pairs, is_strongly_stable, strong_blocking_pairs};

    fn build(doc: InstanceDoc) -> Instance {
        doc.build().unwrap()
    }

    #[test]
    fn alg1_examples() {
        let inst = build(
            InstanceDoc::default()
                .resident("r1", &["h"])
                .resident("r2", &["h"])
                .hospital("h", 2, &["r1", "r2"])
                .region(&["h"], 1),
        );
        let m = solve_regions_size1(&inst).unwrap();
        assert_eq!(m, inst.assignment([("r1", "h")]).unwrap());
        assert_eq!(strongly_stable_set(&inst), vec![m]);

        let plain = example_g2().without_regions();
        assert_eq!(solve_regions_size1(&plain).unwrap(), rgs(&plain));
        assert!(matches!(
            solve_regions_size1(&example_g2()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn alg2_examples() {
        let inst = build(
            InstanceDoc::default()
                .resident("r1", &["h"])
                .resident("r2", &["h"])
                .hospital("h", 1, &["r2", "r1"]),
        );
        let m = solve_res_len1(&inst).unwrap();
        assert_eq!(m, inst.assignment([("r2", "h")]).unwrap());
        assert!(is_strongly_stable(&inst, &m));

        let inst = build(
            InstanceDoc::default()
                .resident("r1", &["h1"])
                .resident("r2", &["h2"])
                .hospital("h1", 1, &["r1"])
                .hospital("h2", 1, &["r2"])
                .region(&["h1", "h2"], 1),
        );
        let m = solve_res_len1(&inst).unwrap();
        assert_eq!(m, inst.assignment([("r1", "h1")]).unwrap());
        let r2h2 = (inst.resident_ix("r2").unwrap(), inst.hospital_ix("h2").unwrap());
        assert_eq!(blocking_pairs(&inst, &m).unwrap(), vec![r2h2]);
        assert!(strong_blocking_pairs(&inst, &m).unwrap().is_empty());

        let zero = inst.with_capacities(&[0, 0]);
        assert!(solve_res_len1(&zero).unwrap().is_empty());
    }

    #[test]
    fn alg3_examples() {
        let inst = build(
            InstanceDoc::default()
                .resident("r", &["h1", "h2"])
                .hospital("h1", 1, &["r"])
                .hospital("h2", 1, &["r"])
                .region(&["h1"], 0),
        );
        let m = solve_hosp_len1(&inst).unwrap();
        assert_eq!(m, inst.assignment([("r", "h2")]).unwrap());
        assert!(is_strongly_stable(&inst, &m));

        let zero = build(
            InstanceDoc::default()
                .resident("r", &["h"])
                .hospital("h", 0, &["r"]),
        );
        assert!(solve_hosp_len1(&zero).unwrap().is_empty());

        let private = build(
            InstanceDoc::default()
                .resident("r1", &["h1"])
                .resident("r2", &["h2"])
                .hospital("h1", 1, &["r1"])
                .hospital("h2", 1, &["r2"]),
        );
        assert_eq!(solve_hosp_len1(&private).unwrap().len(), 2);
    }

    #[test]
    fn two_by_two_detection() {
        let g2 = example_g2();
        let found = find_2x2_subinstances(&g2);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].residents, [ResidentIx(0), ResidentIx(1)]);
        assert_eq!(found[0].hospitals, [HospitalIx(0), HospitalIx(1)]);
        assert!(find_2x2_subinstances(&g2.without_regions()).is_empty());

        let one_common = build(
            InstanceDoc::default()
                .resident("r", &["h1", "h2"])
                .resident("s", &["h1"])
                .hospital("h1", 1, &["r", "s"])
                .hospital("h2", 1, &["r"])
                .region(&["h1", "h2"], 1),
        );
        assert!(find_2x2_subinstances(&one_common).is_empty());
    }

    #[test]
    fn alg4_examples() {
        let inst = build(
            InstanceDoc::default()
                .resident("r1", &["h1", "h2"])
                .resident("r2", &["h1"])
                .hospital("h1", 1, &["r2", "r1"])
                .hospital("h2", 1, &["r1"])
                .region(&["h1", "h2"], 1),
        );
        let m = solve_2x2_free(&inst).unwrap();
        assert_eq!(m, inst.assignment([("r2", "h1")]).unwrap());
        assert!(is_strongly_stable(&inst, &m));

        let roomy = build(
            InstanceDoc::default()
                .resident("r1", &["h1"])
                .resident("r2", &["h2"])
                .hospital("h1", 1, &["r1"])
                .hospital("h2", 1, &["r2"])
                .region(&["h1", "h2"], 2),
        );
        assert_eq!(solve_2x2_free(&roomy).unwrap(), rgs(&roomy));

        let closed = build(
            InstanceDoc::default()
                .resident("r", &["h"])
                .hospital("h", 1, &["r"])
                .region(&["h"], 0),
        );
        let m = solve_2x2_free(&closed).unwrap();
        assert!(m.is_empty());
        assert!(is_strongly_stable(&closed, &m));
    }

    #[test]
    fn alg4_rejects_2x2_blocks() {
        let err = solve_2x2_free(&example_g2()).unwrap_err();
        assert!(err.to_string().contains("two common residents"), "{err}");
    }

    #[test]
    fn alg5_examples() {
        assert_eq!(
            solve_222_disjoint(&example_g2()).unwrap(),
            SolveOutcome::NoneExists
        );
        let g = example_g2_with_cap(2);
        assert_eq!(
            solve_222_disjoint(&g).unwrap(),
            SolveOutcome::Found(g.assignment([("r1", "h1"), ("r2", "h2")]).unwrap())
        );
        let twice = build(
            InstanceDoc::default()
                .resident("r1", &["h1", "h2"])
                .resident("r2", &["h2", "h1"])
                .resident("s1", &["k1", "k2"])
                .resident("s2", &["k2", "k1"])
                .hospital("h1", 1, &["r2", "r1"])
                .hospital("h2", 1, &["r1", "r2"])
                .hospital("k1", 1, &["s2", "s1"])
                .hospital("k2", 1, &["s1", "s2"])
                .region(&["h1", "h2"], 2)
                .region(&["k1", "k2"], 2),
        );
        let out = solve_222_disjoint(&twice).unwrap();
        let m = out.found().unwrap();
        assert_eq!(m.len(), 4);
        assert!(is_strongly_stable(&twice, m));
    }

    #[test]
    fn dispatch_routes() {
        assert_eq!(
            dispatch(&example_g2(), DEFAULT_BRUTE_LIMIT),
            SolveOutcome::NoneExists
        );

        // Overlapping regions over lists of length 2: hard class.
        let overlap = build(
            InstanceDoc::default()
                .resident("r1", &["h1", "h2"])
                .resident("r2", &["h2", "h3"])
                .hospital("h1", 1, &["r1"])
                .hospital("h2", 1, &["r1", "r2"])
                .hospital("h3", 1, &["r2"])
                .region(&["h1", "h2"], 1)
                .region(&["h2", "h3"], 1),
        );
        match dispatch(&overlap, 4) {
            SolveOutcome::Unknown(reason) => assert!(reason.contains("intersecting"), "{reason}"),
            other => panic!("expected Unknown, got {other:?}"),
        }
        assert!(dispatch(&overlap, 5).found().is_some());

        let both = build(
            InstanceDoc::default()
                .resident("r1", &["h"])
                .resident("r2", &["h"])
                .hospital("h", 2, &["r1", "r2"])
                .region(&["h"], 1),
        );
        assert_eq!(
            dispatch(&both, 0),
            SolveOutcome::Found(solve_regions_size1(&both).unwrap())
        );
    }
}
