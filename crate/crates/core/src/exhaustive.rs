//! Brute-force oracle over feasible matchings of small instances.
//!
//! [`enumerate_feasible`] visits every feasible matching exactly once in
//! canonical order: residents are decided in declaration order, each trying its
//! acceptable hospitals in declaration order and "unassigned" last.
//! [`strongly_stable_set`] filters that stream with
//! [`is_strongly_stable`](crate::stability::is_strongly_stable).
//! [`exists_strongly_stable`] walks the same tree but cuts every branch whose
//! decided residents already fix a strong blocking pair, which keeps the
//! reduced SAT instances searchable.

use std::thread;

use crate::model::{Assignment, HospitalIx, Instance, ResidentIx};
use crate::solvers::SolveOutcome;
use crate::stability::is_strongly_stable;

/// Emit a warning once this many matchings have been produced.
pub const DEFAULT_WARN_AFTER: u64 = 1_000_000;

struct Tree<'a> {
    instance: &'a Instance,
    /// Acceptable hospitals of each resident, by hospital index.
    choices: Vec<Vec<HospitalIx>>,
    assigned: Vec<Option<HospitalIx>>,
    count: Vec<u32>,
    load: Vec<u32>,
}

impl<'a> Tree<'a> {
    fn new(instance: &'a Instance) -> Self {
        let choices = instance
            .residents()
            .iter()
            .map(|r| {
                let mut c = r.prefs.clone();
                c.sort();
                c
            })
            .collect();
        Tree {
            instance,
            choices,
            assigned: vec![None; instance.num_residents()],
            count: vec![0; instance.num_hospitals()],
            load: vec![0; instance.regions().len()],
        }
    }

    fn fits(&self, h: HospitalIx) -> bool {
        self.count[h.0] < self.instance.capacity(h)
            && self
                .instance
                .regions_of(h)
                .iter()
                .all(|e| self.load[e.0] < self.instance.region(*e).cap)
    }

    fn place(&mut self, r: usize, h: HospitalIx) {
        self.assigned[r] = Some(h);
        self.count[h.0] += 1;
        for e in self.instance.regions_of(h) {
            self.load[e.0] += 1;
        }
    }

    fn unplace(&mut self, r: usize) {
        if let Some(h) = self.assigned[r].take() {
            self.count[h.0] -= 1;
            for e in self.instance.regions_of(h) {
                self.load[e.0] -= 1;
            }
        }
    }

    /// Option `k` of resident `r`: hospitals first, then unassigned.
    fn try_option(&mut self, r: usize, k: usize) -> bool {
        match self.choices[r].get(k) {
            Some(&h) => {
                if self.fits(h) {
                    self.place(r, h);
                    true
                } else {
                    false
                }
            }
            None => k == self.choices[r].len(),
        }
    }

    fn snapshot(&self) -> Assignment {
        self.assigned
            .iter()
            .enumerate()
            .filter_map(|(r, h)| h.map(|h| (ResidentIx(r), h)))
            .collect()
    }
}

/// Iterator over the feasible matchings of an instance.
pub struct FeasibleMatchings<'a> {
    tree: Tree<'a>,
    /// Next option to try per depth.
    next: Vec<usize>,
    depth: usize,
    floor: usize,
    done: bool,
    emitted: u64,
    warn_after: u64,
}

impl<'a> FeasibleMatchings<'a> {
    fn with_prefix(instance: &'a Instance, prefix: &[Option<HospitalIx>], warn_after: u64) -> Self {
        let mut tree = Tree::new(instance);
        let mut done = false;
        for (r, choice) in prefix.iter().enumerate() {
            match choice {
                Some(h) if tree.fits(*h) => tree.place(r, *h),
                Some(_) => done = true,
                None => {}
            }
        }
        let n = instance.num_residents();
        FeasibleMatchings {
            tree,
            next: vec![0; n + 1],
            depth: prefix.len(),
            floor: prefix.len(),
            done,
            emitted: 0,
            warn_after,
        }
    }

    /// Warn through the `log` facade after `limit` matchings.
    pub fn warn_after(mut self, limit: u64) -> Self {
        self.warn_after = limit;
        self
    }
}

impl Iterator for FeasibleMatchings<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let n = self.tree.choices.len();
        loop {
            if self.done {
                return None;
            }
            if self.depth == n {
                let out = self.tree.snapshot();
                if self.depth == self.floor {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                self.emitted += 1;
                if self.emitted == self.warn_after {
                    log::warn!(
                        "enumerated {} feasible matchings; instance may be too large for exhaustive search",
                        self.emitted
                    );
                }
                return Some(out);
            }
            let d = self.depth;
            self.tree.unplace(d);
            let k = self.next[d];
            if k > self.tree.choices[d].len() {
                self.next[d] = 0;
                if d == self.floor {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                continue;
            }
            self.next[d] = k + 1;
            if self.tree.try_option(d, k) {
                self.depth += 1;
                if self.depth < n {
                    self.next[self.depth] = 0;
                }
            }
        }
    }
}

/// Every feasible matching, each once, in canonical order.
pub fn enumerate_feasible(instance: &Instance) -> FeasibleMatchings<'_> {
    FeasibleMatchings::with_prefix(instance, &[], DEFAULT_WARN_AFTER)
}

/// All strongly stable matchings, in canonical order.
pub fn strongly_stable_set(instance: &Instance) -> Vec<Assignment> {
    enumerate_feasible(instance)
        .filter(|m| is_strongly_stable(instance, m))
        .collect()
}

/// [`strongly_stable_set`] with the first resident's options spread over up to
/// `jobs` threads. The result is identical to the sequential one.
pub fn strongly_stable_set_parallel(instance: &Instance, jobs: usize) -> Vec<Assignment> {
    if jobs <= 1 || instance.num_residents() == 0 {
        return strongly_stable_set(instance);
    }
    let mut first: Vec<Option<HospitalIx>> = {
        let mut c = instance.residents()[0].prefs.clone();
        c.sort();
        c.into_iter().map(Some).collect()
    };
    first.push(None);
    let chunks: Vec<Vec<Option<HospitalIx>>> = first
        .chunks(first.len().div_ceil(jobs))
        .map(<[_]>::to_vec)
        .collect();
    thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                s.spawn(move || {
                    let mut out = Vec::new();
                    for &choice in chunk {
                        out.extend(
                            FeasibleMatchings::with_prefix(instance, &[choice], DEFAULT_WARN_AFTER)
                                .filter(|m| is_strongly_stable(instance, m)),
                        );
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    })
}

/// Depth-first search for the canonically first strongly stable matching.
pub fn exists_strongly_stable(instance: &Instance) -> SolveOutcome {
    let mut search = PrunedSearch::new(instance);
    if search.descend(0) {
        SolveOutcome::Found(search.tree.snapshot())
    } else {
        SolveOutcome::NoneExists
    }
}

struct PrunedSearch<'a> {
    tree: Tree<'a>,
    /// Hospitals each resident finds acceptable, by hospital index.
    members: Vec<Vec<usize>>,
    /// Pairs whose strong-blocking status is fixed once resident `d` is decided.
    settled_at: Vec<Vec<(usize, HospitalIx)>>,
}

impl<'a> PrunedSearch<'a> {
    fn new(instance: &'a Instance) -> Self {
        let n = instance.num_residents();
        let mut settled_at = vec![Vec::new(); n];
        // Residents whose decisions can change the load of a region holding h.
        let last_in_region: Vec<usize> = instance
            .regions()
            .iter()
            .map(|e| {
                e.hospitals
                    .iter()
                    .flat_map(|&h| instance.hospital(h).prefs.iter().map(|r| r.0))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for r in instance.resident_ixs() {
            for &h in &instance.resident(r).prefs {
                let mut last = r.0;
                last = last.max(instance.hospital(h).prefs.iter().map(|x| x.0).max().unwrap_or(0));
                for e in instance.regions_of(h) {
                    last = last.max(last_in_region[e.0]);
                }
                settled_at[last].push((r.0, h));
            }
        }
        PrunedSearch {
            tree: Tree::new(instance),
            members: vec![Vec::new(); instance.num_hospitals()],
            settled_at,
        }
    }

    fn rank_h(&self, h: HospitalIx, r: usize) -> usize {
        self.tree
            .instance
            .hospital_rank(h, ResidentIx(r))
            .expect("acceptable pair")
    }

    /// Whether `r` would rather be at `h` than where it is now.
    fn envies(&self, r: usize, h: HospitalIx) -> bool {
        let inst = self.tree.instance;
        match self.tree.assigned[r] {
            None => true,
            Some(cur) => inst.resident_rank(ResidentIx(r), h) < inst.resident_rank(ResidentIx(r), cur),
        }
    }

    /// `h` holds someone it ranks below `r`.
    fn displaces(&self, r: usize, h: HospitalIx) -> bool {
        let mine = self.rank_h(h, r);
        self.members[h.0].iter().any(|&x| self.rank_h(h, x) > mine)
    }

    fn is_sbp(&self, r: usize, h: HospitalIx) -> bool {
        let inst = self.tree.instance;
        if !self.envies(r, h) {
            return false;
        }
        if self.displaces(r, h) {
            return true;
        }
        if self.members[h.0].len() as u32 >= inst.capacity(h) {
            return false;
        }
        let from = self.tree.assigned[r];
        inst.regions_of(h).iter().all(|&e| {
            let region = inst.region(e);
            let stays = from.is_some_and(|f| region.contains(f));
            self.tree.load[e.0] + u32::from(!stays) <= region.cap
        })
    }

    /// Strong blocking pairs that no later decision can remove.
    fn doomed(&self, d: usize) -> bool {
        let inst = self.tree.instance;
        // Assignee sets only grow, so a displacement seen now persists.
        if let Some(h) = self.tree.assigned[d] {
            let mine = self.rank_h(h, d);
            let better_decided = inst.hospital(h).prefs.iter().filter(|x| x.0 < d);
            for x in better_decided {
                if self.rank_h(h, x.0) < mine && self.envies(x.0, h) {
                    return true;
                }
            }
        }
        for &h in &inst.resident(ResidentIx(d)).prefs {
            if self.envies(d, h) && self.displaces(d, h) {
                return true;
            }
        }
        self.settled_at[d].iter().any(|&(r, h)| self.is_sbp(r, h))
    }

    fn descend(&mut self, d: usize) -> bool {
        let n = self.tree.choices.len();
        if d == n {
            return true;
        }
        for k in 0..=self.tree.choices[d].len() {
            if !self.tree.try_option(d, k) {
                continue;
            }
            if let Some(h) = self.tree.assigned[d] {
                self.members[h.0].push(d);
            }
            if !self.doomed(d) && self.descend(d + 1) {
                return true;
            }
            if let Some(h) = self.tree.assigned[d] {
                self.members[h.0].pop();
            }
            self.tree.unplace(d);
        }
        false
    }
}
