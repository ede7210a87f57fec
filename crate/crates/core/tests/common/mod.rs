//! Oracles written straight from the definitions, sharing no code with the
//! library's checkers.

#![allow(dead_code)]

use hrrc_core::{Assignment, HospitalIx, Instance, ResidentIx};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn assigned_to(m: &[(usize, usize)], r: usize) -> Option<usize> {
    m.iter().find(|p| p.0 == r).map(|p| p.1)
}

fn as_pairs(m: &Assignment) -> Vec<(usize, usize)> {
    m.pairs().map(|(r, h)| (r.0, h.0)).collect()
}

fn feasible_pairs(inst: &Instance, m: &[(usize, usize)]) -> bool {
    inst.regions().iter().all(|e| {
        let load = m
            .iter()
            .filter(|p| e.hospitals.iter().any(|h| h.0 == p.1))
            .count();
        load as u32 <= e.cap
    })
}

/// Every resident at most once, every pair acceptable, capacities respected.
pub fn is_matching(inst: &Instance, m: &Assignment) -> bool {
    let pairs = as_pairs(m);
    let residents_once = (0..inst.num_residents()).all(|r| pairs.iter().filter(|p| p.0 == r).count() <= 1);
    let acceptable = pairs.iter().all(|&(r, h)| {
        inst.residents()[r].prefs.contains(&HospitalIx(h))
            && inst.hospitals()[h].prefs.contains(&ResidentIx(r))
    });
    let within = (0..inst.num_hospitals())
        .all(|h| pairs.iter().filter(|p| p.1 == h).count() as u32 <= inst.hospitals()[h].capacity);
    residents_once && acceptable && within
}

pub fn is_feasible(inst: &Instance, m: &Assignment) -> bool {
    feasible_pairs(inst, &as_pairs(m))
}

fn pos<T: PartialEq>(list: &[T], x: &T) -> usize {
    list.iter().position(|y| y == x).expect("listed")
}

/// Blocking pairs of the underlying HR instance.
pub fn blocking_pairs(inst: &Instance, m: &Assignment) -> Vec<(usize, usize)> {
    let pairs = as_pairs(m);
    let mut out = Vec::new();
    for r in 0..inst.num_residents() {
        let rp = &inst.residents()[r].prefs;
        for &h in rp {
            let h = h.0;
            let resident_wants = match assigned_to(&pairs, r) {
                None => true,
                Some(cur) => pos(rp, &HospitalIx(h)) < pos(rp, &HospitalIx(cur)),
            };
            if !resident_wants {
                continue;
            }
            let hp = &inst.hospitals()[h].prefs;
            let members: Vec<usize> = pairs.iter().filter(|p| p.1 == h).map(|p| p.0).collect();
            let under = (members.len() as u32) < inst.hospitals()[h].capacity;
            let prefers = members
                .iter()
                .any(|&x| pos(hp, &ResidentIx(r)) < pos(hp, &ResidentIx(x)));
            if under || prefers {
                out.push((r, h));
            }
        }
    }
    out.sort();
    out
}

/// Blocking pairs that survive the regional tolerance: moving r to h keeps
/// every cap, or h would drop someone worse than r.
pub fn strong_blocking_pairs(inst: &Instance, m: &Assignment) -> Vec<(usize, usize)> {
    let pairs = as_pairs(m);
    blocking_pairs(inst, m)
        .into_iter()
        .filter(|&(r, h)| {
            let mut moved: Vec<(usize, usize)> = pairs.iter().copied().filter(|p| p.0 != r).collect();
            moved.push((r, h));
            let hp = &inst.hospitals()[h].prefs;
            let displaces = pairs
                .iter()
                .any(|p| p.1 == h && pos(hp, &ResidentIx(r)) < pos(hp, &ResidentIx(p.0)));
            feasible_pairs(inst, &moved) || displaces
        })
        .collect()
}

pub fn is_strongly_stable(inst: &Instance, m: &Assignment) -> bool {
    is_matching(inst, m) && is_feasible(inst, m) && strong_blocking_pairs(inst, m).is_empty()
}

/// All feasible matchings by plain recursion, checking every constraint
/// from scratch at each leaf.
pub fn all_feasible(inst: &Instance) -> Vec<Assignment> {
    fn rec(inst: &Instance, r: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Assignment>) {
        if r == inst.num_residents() {
            let m: Assignment = cur.iter().map(|&(r, h)| (ResidentIx(r), HospitalIx(h))).collect();
            if is_matching(inst, &m) && is_feasible(inst, &m) {
                out.push(m);
            }
            return;
        }
        rec(inst, r + 1, cur, out);
        for h in inst.residents()[r].prefs.clone() {
            cur.push((r, h.0));
            rec(inst, r + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(inst, 0, &mut Vec::new(), &mut out);
    out
}

/// Stable matchings of the instance with regions ignored, by brute force.
pub fn hr_stable_matchings(inst: &Instance) -> Vec<Assignment> {
    let plain = inst.without_regions();
    all_feasible(&plain)
        .into_iter()
        .filter(|m| blocking_pairs(&plain, m).is_empty())
        .collect()
}

pub fn hospital_load(m: &Assignment, h: usize) -> usize {
    m.pairs().filter(|p| p.1 .0 == h).count()
}

/// Capacities used by the size-one region solver: each hospital capped by
/// every region containing it.
pub fn size1_capacities(inst: &Instance) -> Vec<u32> {
    (0..inst.num_hospitals())
        .map(|h| {
            let mut q = inst.hospitals()[h].capacity;
            for e in inst.regions() {
                if e.hospitals.contains(&HospitalIx(h)) {
                    q = q.min(e.cap);
                }
            }
            q
        })
        .collect()
}
