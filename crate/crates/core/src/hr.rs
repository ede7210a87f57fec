//! Classical HR machinery: resident-oriented Gale-Shapley and shrinking.
//!
//! Both operations ignore regions. [`rgs`] accepts region-bearing instances so
//! the regional solvers can call it on their inputs directly.

use std::collections::VecDeque;

use crate::model::{Assignment, HospitalIx, Instance, ResidentIx};

/// Resident-optimal stable matching of the underlying HR instance.
pub fn rgs(instance: &Instance) -> Assignment {
    rgs_with_capacities(instance, &instance.capacities())
}

/// [`rgs`] with the hospital capacities overridden by `capacities`.
///
/// Free residents propose in declaration order from a FIFO queue; a full
/// hospital rejects its least preferred assignee.
pub fn rgs_with_capacities(instance: &Instance, capacities: &[u32]) -> Assignment {
    let n = instance.num_residents();
    let mut next_choice = vec![0usize; n];
    let mut held: Vec<Vec<ResidentIx>> = vec![Vec::new(); instance.num_hospitals()];
    let mut free: VecDeque<ResidentIx> = instance.resident_ixs().collect();

    while let Some(r) = free.pop_front() {
        let prefs = &instance.resident(r).prefs;
        let Some(&h) = prefs.get(next_choice[r.0]) else {
            continue;
        };
        next_choice[r.0] += 1;
        let q = capacities[h.0] as usize;
        if q == 0 {
            free.push_back(r);
            continue;
        }
        let list = &mut held[h.0];
        if list.len() < q {
            list.push(r);
            continue;
        }
        let (worst_pos, &worst) = list
            .iter()
            .enumerate()
            .max_by_key(|(_, &x)| instance.hospital_rank(h, x))
            .expect("full hospital with positive capacity holds someone");
        if instance.hospital_rank(h, r) < instance.hospital_rank(h, worst) {
            list[worst_pos] = r;
            free.push_back(worst);
        } else {
            free.push_back(r);
        }
    }

    held.iter()
        .enumerate()
        .flat_map(|(h, rs)| rs.iter().map(move |&r| (r, HospitalIx(h))))
        .collect()
}

/// Capacity of every hospital reduced to the length of its list.
pub fn shrink(instance: &Instance) -> Instance {
    let caps: Vec<u32> = instance
        .hospitals()
        .iter()
        .map(|h| h.capacity.min(h.prefs.len() as u32))
        .collect();
    instance.with_capacities(&caps)
}
