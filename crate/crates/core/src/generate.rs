//! Seeded random instances and formulas for tests and benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Instance, InstanceDoc};
use crate::reductions::{CnfFormula, Literal};

/// Bounds for [`random_instance`]. List and region bounds of zero mean
/// "no bound beyond the agent counts".
#[derive(Clone, Debug)]
pub struct Shape {
    pub residents: usize,
    pub hospitals: usize,
    pub max_resident_list: usize,
    pub max_hospital_list: usize,
    pub max_region: usize,
    pub max_regions: usize,
    pub disjoint: bool,
    pub max_capacity: u32,
    /// Chance that a candidate pair becomes acceptable.
    pub density: f64,
}

impl Shape {
    pub fn general(residents: usize, hospitals: usize) -> Self {
        Shape {
            residents,
            hospitals,
            max_resident_list: 0,
            max_hospital_list: 0,
            max_region: 0,
            max_regions: 3,
            disjoint: false,
            max_capacity: 3,
            density: 0.5,
        }
    }

    pub fn region_free(residents: usize, hospitals: usize) -> Self {
        Shape {
            max_regions: 0,
            ..Shape::general(residents, hospitals)
        }
    }

    pub fn regions_size1(residents: usize, hospitals: usize) -> Self {
        Shape {
            max_region: 1,
            max_regions: hospitals,
            ..Shape::general(residents, hospitals)
        }
    }

    pub fn resident_lists_len1(residents: usize, hospitals: usize) -> Self {
        Shape {
            max_resident_list: 1,
            density: 0.8,
            ..Shape::general(residents, hospitals)
        }
    }

    pub fn hospital_lists_len1(residents: usize, hospitals: usize) -> Self {
        Shape {
            max_hospital_list: 1,
            density: 0.8,
            ..Shape::general(residents, hospitals)
        }
    }

    pub fn disjoint_222(residents: usize, hospitals: usize) -> Self {
        Shape {
            max_resident_list: 2,
            max_hospital_list: 2,
            max_region: 2,
            max_regions: hospitals,
            disjoint: true,
            max_capacity: 2,
            density: 0.7,
            ..Shape::general(residents, hospitals)
        }
    }
}

/// A valid instance within `shape`. Agents are named `r1..` and `h1..`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Instance {
    let nr = shape.residents;
    let nh = shape.hospitals;
    let cap_r = if shape.max_resident_list == 0 {
        nh
    } else {
        shape.max_resident_list
    };
    let cap_h = if shape.max_hospital_list == 0 {
        nr
    } else {
        shape.max_hospital_list
    };

    let mut candidates: Vec<(usize, usize)> = (0..nr).flat_map(|r| (0..nh).map(move |h| (r, h))).collect();
    candidates.shuffle(rng);
    let mut deg_r = vec![0usize; nr];
    let mut deg_h = vec![0usize; nh];
    let mut res_lists: Vec<Vec<usize>> = vec![Vec::new(); nr];
    let mut hosp_lists: Vec<Vec<usize>> = vec![Vec::new(); nh];
    for (r, h) in candidates {
        if deg_r[r] < cap_r && deg_h[h] < cap_h && rng.gen_bool(shape.density) {
            deg_r[r] += 1;
            deg_h[h] += 1;
            res_lists[r].push(h);
            hosp_lists[h].push(r);
        }
    }
    for list in res_lists.iter_mut().chain(hosp_lists.iter_mut()) {
        list.shuffle(rng);
    }

    let rid = |r: usize| format!("r{}", r + 1);
    let hid = |h: usize| format!("h{}", h + 1);
    let mut doc = InstanceDoc::default();
    for (r, list) in res_lists.iter().enumerate() {
        let prefs: Vec<String> = list.iter().map(|&h| hid(h)).collect();
        let prefs: Vec<&str> = prefs.iter().map(String::as_str).collect();
        doc = doc.resident(&rid(r), &prefs);
    }
    let mut capacities = Vec::with_capacity(nh);
    for (h, list) in hosp_lists.iter().enumerate() {
        let prefs: Vec<String> = list.iter().map(|&r| rid(r)).collect();
        let prefs: Vec<&str> = prefs.iter().map(String::as_str).collect();
        let q = rng.gen_range(0..=shape.max_capacity);
        capacities.push(q);
        doc = doc.hospital(&hid(h), q, &prefs);
    }

    let max_region = if shape.max_region == 0 {
        nh
    } else {
        shape.max_region
    };
    let mut free: Vec<usize> = (0..nh).collect();
    free.shuffle(rng);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let count = if shape.max_regions == 0 || nh == 0 {
        0
    } else {
        rng.gen_range(0..=shape.max_regions)
    };
    for _ in 0..count {
        let pool: Vec<usize> = if shape.disjoint {
            free.clone()
        } else {
            (0..nh).collect()
        };
        if pool.is_empty() {
            break;
        }
        let size = rng.gen_range(1..=max_region.min(pool.len()));
        let mut members: Vec<usize> = pool.choose_multiple(rng, size).copied().collect();
        members.sort();
        if !seen.insert(members.clone()) {
            continue;
        }
        if shape.disjoint {
            free.retain(|h| !members.contains(h));
        }
        let total: u32 = members.iter().map(|&h| capacities[h]).sum();
        let cap = rng.gen_range(0..=total + 1);
        let ids: Vec<String> = members.iter().map(|&h| hid(h)).collect();
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        doc = doc.region(&ids, cap);
    }
    doc.build().expect("generated instance is valid")
}

/// Clauses of 1 to `max_len` literals over distinct variables with random signs.
pub fn random_cnf<R: Rng + ?Sized>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
    max_len: usize,
) -> CnfFormula {
    let vars: Vec<usize> = (1..=num_vars).collect();
    let clauses = (0..num_clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.min(num_vars));
            vars.choose_multiple(rng, len)
                .map(|&v| Literal {
                    var: v,
                    negated: rng.gen_bool(0.5),
                })
                .collect()
        })
        .collect();
    CnfFormula::new(num_vars, clauses).expect("variables in range")
}

/// Positive 3-literal clauses over distinct variables.
pub fn random_one_in_three<R: Rng + ?Sized>(rng: &mut R, num_vars: usize, num_clauses: usize) -> CnfFormula {
    assert!(num_vars >= 3, "a clause needs three distinct variables");
    let vars: Vec<usize> = (1..=num_vars).collect();
    let clauses = (0..num_clauses)
        .map(|_| vars.choose_multiple(rng, 3).map(|&v| Literal::pos(v)).collect())
        .collect();
    CnfFormula::new(num_vars, clauses).expect("variables in range")
}

/// A formula where each variable occurs twice positively and once negatively,
/// with `num_3` clauses of size 3 and the rest of size 2. Needs at least two
/// variables and `3 * num_vars - 3 * num_3` even and non-negative.
pub fn random_ppn<R: Rng + ?Sized>(rng: &mut R, num_vars: usize, num_3: usize) -> CnfFormula {
    let slots = 3 * num_vars;
    assert!(num_vars >= 2, "a single variable admits no PPN formula");
    assert!(
        3 * num_3 <= slots && (slots - 3 * num_3) % 2 == 0,
        "sizes do not add up"
    );
    let num_2 = (slots - 3 * num_3) / 2;
    loop {
        let mut lits: Vec<Literal> = (1..=num_vars)
            .flat_map(|v| [Literal::pos(v), Literal::pos(v), Literal::neg(v)])
            .collect();
        lits.shuffle(rng);
        let mut sizes: Vec<usize> = std::iter::repeat(3)
            .take(num_3)
            .chain(std::iter::repeat(2).take(num_2))
            .collect();
        sizes.shuffle(rng);
        let mut rest = &lits[..];
        let mut clauses = Vec::with_capacity(sizes.len());
        for s in sizes {
            let (head, tail) = rest.split_at(s);
            clauses.push(head.to_vec());
            rest = tail;
        }
        let repeated = clauses
            .iter()
            .any(|c: &Vec<Literal>| c.iter().enumerate().any(|(k, l)| c[..k].contains(l)));
        if !repeated {
            return CnfFormula::new(num_vars, clauses).expect("variables in range");
        }
    }
}

/// Every PPN formula over exactly `num_vars` variables, each once. Clauses
/// are sorted literal sets and formulas sorted clause lists, so formulas that
/// differ only in clause or literal order are identified.
pub fn enumerate_ppn(num_vars: usize) -> Vec<CnfFormula> {
    fn rec(
        remaining: &mut BTreeMap<Literal, usize>,
        clauses: &mut Vec<Vec<Literal>>,
        out: &mut BTreeSet<Vec<Vec<Literal>>>,
    ) {
        let Some(first) = remaining.iter().find(|(_, &c)| c > 0).map(|(&l, _)| l) else {
            let mut sorted = clauses.clone();
            sorted.sort();
            out.insert(sorted);
            return;
        };
        *remaining.get_mut(&first).unwrap() -= 1;
        let others: Vec<Literal> = remaining
            .iter()
            .filter(|(&l, &c)| c > 0 && l != first)
            .map(|(&l, _)| l)
            .collect();
        for a in 0..others.len() {
            let mut pick = |extra: &[Literal],
                            remaining: &mut BTreeMap<Literal, usize>,
                            clauses: &mut Vec<Vec<Literal>>| {
                for l in extra {
                    *remaining.get_mut(l).unwrap() -= 1;
                }
                let mut clause = vec![first];
                clause.extend_from_slice(extra);
                clauses.push(clause);
                rec(remaining, clauses, out);
                clauses.pop();
                for l in extra {
                    *remaining.get_mut(l).unwrap() += 1;
                }
            };
            pick(&[others[a]], remaining, clauses);
            for b in a + 1..others.len() {
                pick(&[others[a], others[b]], remaining, clauses);
            }
        }
        *remaining.get_mut(&first).unwrap() += 1;
    }

    let mut remaining: BTreeMap<Literal, usize> = (1..=num_vars)
        .flat_map(|v| [(Literal::pos(v), 2), (Literal::neg(v), 1)])
        .collect();
    let mut out = BTreeSet::new();
    rec(&mut remaining, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|clauses| CnfFormula::new(num_vars, clauses).expect("variables in range"))
        .collect()
}
