//! The NAE-3SAT → SortSupport gadget construction, with a full audit trace,
//! structural verification and witness/assignment extraction in both
//! directions.
//!
//! A balanced formula with `k` clauses becomes an instance with `n = 11k`
//! variables per side: one 6-vertex unit gadget per literal occurrence
//! (vertices `a, b, c` in U and `a', b', c'` in V), plus per-clause vertices
//! `d_i, e_i` in U and `d'_i, e'_i` in V. Unit gadgets of one variable form a
//! circular consistency component alternating positive/negative occurrences;
//! the gadgets of one clause form a truth component around `d_i/e_i/d'_i/e'_i`;
//! the `(e_i, e'_s)` edges for `i ≠ s` complete the matching.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{
    build_intersection_graph, q_sets, representatives, Matching, SortInstance, SupportWitness,
};
use crate::intervals::IntegerSet;
use crate::nae::{nae_brute_force, nae_check, Assignment, CnfFormula};
use crate::solver::{decide_support, Outcome, SolveOptions};

/// Which domain layout a reduction instance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// The base construction; U-domains overlap on shared segments.
    Overlapping,
    /// The transformed construction with pairwise disjoint U-domains.
    Disjoint,
}

/// One unit gadget: one literal occurrence of `var` in `clause`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    /// 0-based clause index.
    pub clause: usize,
    /// 0-based slot within the clause.
    pub slot: usize,
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
    /// Ordinal among occurrences of the same (clause, var) pair, so duplicate
    /// literals in a clause get distinct gadgets.
    pub occ_ordinal: usize,
    /// 0-based position in the alternating order of the consistency component.
    pub cc_pos: usize,
    /// Block index h: number of unit gadgets before this one globally.
    pub block: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Up,
    Down,
    UpLinking,
    DownLinking,
    Lateral,
    Completion,
}

/// An intended edge between U-index `u` and V-index `v` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    pub u: usize,
    pub v: usize,
}

/// Re-linearization record of the disjoint-domain transform: one original
/// atomic segment and the fresh value given to each (owning U, segment) slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSplit {
    pub lo: i64,
    pub hi: i64,
    /// (owning U-index if any, fresh value), in slot order.
    pub slots: Vec<(Option<usize>, i64)>,
}

/// The auditable record of a reduction run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub variant: Variant,
    /// The balanced source formula.
    pub formula: CnfFormula,
    pub k: usize,
    pub num_vars: usize,
    pub t: i64,
    pub m: i64,
    pub q: i64,
    pub n: usize,
    /// Unit gadgets indexed by block h.
    pub gadgets: Vec<Gadget>,
    /// Per variable, the gadget blocks of its consistency component in order.
    pub cc: Vec<Vec<usize>>,
    /// Per clause, the gadget block for each slot.
    pub clause_gadgets: Vec<Vec<usize>>,
    /// Human-readable vertex labels, by U-index and V-index.
    pub u_labels: Vec<String>,
    pub v_labels: Vec<String>,
    /// The edge set the construction is supposed to induce.
    pub edges: Vec<Edge>,
    /// Atomic-segment table of the disjoint transform (empty for overlapping).
    pub segments: Vec<SegmentSplit>,
}

impl ReductionTrace {
    pub fn a_u(&self, h: usize) -> usize {
        3 * h
    }
    pub fn b_u(&self, h: usize) -> usize {
        3 * h + 1
    }
    pub fn c_u(&self, h: usize) -> usize {
        3 * h + 2
    }
    pub fn d_u(&self, clause: usize) -> usize {
        9 * self.k + clause
    }
    pub fn e_u(&self, clause: usize) -> usize {
        10 * self.k + clause
    }
    /// V-side indices mirror the U-side layout (a', b', c', then d', then e').
    pub fn a_v(&self, h: usize) -> usize {
        3 * h
    }
    pub fn b_v(&self, h: usize) -> usize {
        3 * h + 1
    }
    pub fn c_v(&self, h: usize) -> usize {
        3 * h + 2
    }
    pub fn d_v(&self, clause: usize) -> usize {
        9 * self.k + clause
    }
    pub fn e_v(&self, clause: usize) -> usize {
        10 * self.k + clause
    }
}

fn vertex_label(k: usize, gadgets: &[Gadget], index: usize, primed: bool) -> String {
    let prime = if primed { "'" } else { "" };
    if index < 9 * k {
        let g = &gadgets[index / 3];
        let kind = ["a", "b", "c"][index % 3];
        let occ = if g.occ_ordinal > 0 { format!(".{}", g.occ_ordinal + 1) } else { String::new() };
        format!("{kind}{prime}_x{}_c{}{occ}", g.var + 1, g.clause + 1)
    } else if index < 10 * k {
        format!("d{prime}_{}", index - 9 * k + 1)
    } else {
        format!("e{prime}_{}", index - 10 * k + 1)
    }
}

fn dprime_dom(m: i64, clause: usize) -> IntegerSet {
    let i1 = clause as i64 + 1;
    IntegerSet::interval(m + 2 * i1 - 1, m + 2 * i1).unwrap()
}

fn eprime_dom(q: i64, clause: usize) -> IntegerSet {
    let i1 = clause as i64 + 1;
    IntegerSet::interval(q + 2 * i1 - 1, q + 2 * i1).unwrap()
}

fn y_dom(g: &Gadget, t: i64) -> IntegerSet {
    let h = g.block as i64;
    if g.positive {
        IntegerSet::interval(h * t + 1, h * t + 2).unwrap()
    } else {
        IntegerSet::interval(h * t - 7, h * t - 4).unwrap()
    }
}

fn z_dom(g: &Gadget, t: i64) -> IntegerSet {
    let h = g.block as i64;
    if g.positive {
        IntegerSet::interval(h * t + 21, h * t + 22).unwrap()
    } else {
        IntegerSet::interval(h * t + 23, h * t + 24).unwrap()
    }
}

/// Builds the SortSupport instance for a balanced NAE-3SAT formula, together
/// with its audit trace. Every variable must occur, with equally many positive
/// and negative occurrences.
pub fn reduce(f: &CnfFormula, variant: Variant) -> Result<(SortInstance, ReductionTrace)> {
    let counts = f.occurrence_counts();
    for (idx, &(pos, neg)) in counts.iter().enumerate() {
        if pos + neg == 0 {
            return Err(Error::UnusedVariable(idx + 1));
        }
        if pos != neg {
            return Err(Error::Unbalanced { var: idx + 1, pos, neg });
        }
    }
    let k = f.num_clauses();
    if k == 0 {
        return Err(Error::InvalidInstance("formula has no clauses".into()));
    }
    let t: i64 = 24;
    let m = 3 * k as i64 * t;
    let q = m + 2 * k as i64;
    let n = 11 * k;

    // occurrences per variable, split by polarity, in (clause, slot) order
    let mut positives: Vec<Vec<(usize, usize)>> = vec![Vec::new(); f.num_vars];
    let mut negatives: Vec<Vec<(usize, usize)>> = vec![Vec::new(); f.num_vars];
    for (clause, lits) in f.clauses.iter().enumerate() {
        for (slot, &lit) in lits.iter().enumerate() {
            let var = lit.unsigned_abs() as usize - 1;
            if lit > 0 {
                positives[var].push((clause, slot));
            } else {
                negatives[var].push((clause, slot));
            }
        }
    }

    // alternating CC order: i-th positive occurrence, then i-th negative
    let mut gadgets: Vec<Gadget> = Vec::with_capacity(3 * k);
    let mut cc: Vec<Vec<usize>> = Vec::with_capacity(f.num_vars);
    let mut occ_seen: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for var in 0..f.num_vars {
        let mut component = Vec::with_capacity(positives[var].len() * 2);
        for pair_idx in 0..positives[var].len() {
            for &(clause, slot) in
                [&positives[var][pair_idx], &negatives[var][pair_idx]].iter().copied()
            {
                let ordinal = occ_seen.entry((clause, var)).or_insert(0);
                let block = gadgets.len();
                gadgets.push(Gadget {
                    clause,
                    slot,
                    var,
                    positive: f.clauses[clause][slot] > 0,
                    occ_ordinal: *ordinal,
                    cc_pos: component.len(),
                    block,
                });
                *ordinal += 1;
                component.push(block);
            }
        }
        cc.push(component);
    }
    debug_assert_eq!(gadgets.len(), 3 * k);

    let mut clause_gadgets: Vec<Vec<usize>> = vec![vec![usize::MAX; 3]; k];
    for g in &gadgets {
        clause_gadgets[g.clause][g.slot] = g.block;
    }

    // domains
    let mut u_doms: Vec<IntegerSet> = vec![IntegerSet::empty(); n];
    let mut v_doms: Vec<IntegerSet> = vec![IntegerSet::empty(); n];
    for g in &gadgets {
        let h = g.block as i64;
        let occ = cc[g.var].len() as i64;
        let x = if g.positive {
            dprime_dom(m, g.clause).union(&eprime_dom(q, g.clause))
        } else if g.cc_pos + 1 < cc[g.var].len() {
            IntegerSet::interval((h + 1) * t + 21, (h + 1) * t + 22).unwrap()
        } else {
            // the last gadget links back to the first block of the component
            IntegerSet::interval((h + 1 - occ) * t + 21, (h + 1 - occ) * t + 22).unwrap()
        };
        let t_dom = if g.positive {
            IntegerSet::empty()
        } else {
            dprime_dom(m, g.clause).union(&eprime_dom(q, g.clause))
        };
        let y = y_dom(g, t);
        let z = z_dom(g, t);
        let a = IntegerSet::interval(h * t + 3, h * t + 6).unwrap().union(&x);
        let b = IntegerSet::interval(h * t + 9, h * t + 12).unwrap();
        let c = IntegerSet::interval(h * t + 15, h * t + 18).unwrap().union(&t_dom);
        let a_p = IntegerSet::interval(h * t + 7, h * t + 10).unwrap().union(&y);
        let b_p = IntegerSet::interval(h * t + 5, h * t + 8)
            .unwrap()
            .union(&IntegerSet::interval(h * t + 13, h * t + 16).unwrap());
        let c_p = IntegerSet::interval(h * t + 11, h * t + 14).unwrap().union(&z);
        let hb = g.block;
        u_doms[3 * hb] = a;
        u_doms[3 * hb + 1] = b;
        u_doms[3 * hb + 2] = c;
        v_doms[3 * hb] = a_p;
        v_doms[3 * hb + 1] = b_p;
        v_doms[3 * hb + 2] = c_p;
    }
    for clause in 0..k {
        let mut d = IntegerSet::empty();
        for &h in &clause_gadgets[clause] {
            let g = &gadgets[h];
            d = d.union(&if g.positive { y_dom(g, t) } else { z_dom(g, t) });
        }
        let mut e = d.clone();
        for s in 0..k {
            if s != clause {
                e = e.union(&eprime_dom(q, s));
            }
        }
        u_doms[9 * k + clause] = d;
        u_doms[10 * k + clause] = e;
        v_doms[9 * k + clause] = dprime_dom(m, clause);
        v_doms[10 * k + clause] = eprime_dom(q, clause);
    }

    let u_labels = (0..n).map(|i| vertex_label(k, &gadgets, i, false)).collect();
    let v_labels = (0..n).map(|i| vertex_label(k, &gadgets, i, true)).collect();

    let mut trace = ReductionTrace {
        variant: Variant::Overlapping,
        formula: f.clone(),
        k,
        num_vars: f.num_vars,
        t,
        m,
        q,
        n,
        gadgets,
        cc,
        clause_gadgets,
        u_labels,
        v_labels,
        edges: Vec::new(),
        segments: Vec::new(),
    };
    trace.edges = intended_edges(&trace);

    let inst = SortInstance::new(u_doms, v_doms, None, false)?;
    match variant {
        Variant::Overlapping => Ok((inst, trace)),
        Variant::Disjoint => disjointify(&inst, &trace),
    }
}

/// The exact edge set the construction is supposed to induce, built
/// combinatorially from the gadget tables (no interval arithmetic).
pub fn intended_edges(trace: &ReductionTrace) -> Vec<Edge> {
    let mut edges = Vec::new();
    for g in &trace.gadgets {
        let h = g.block;
        edges.push(Edge { kind: EdgeKind::Up, u: trace.a_u(h), v: trace.b_v(h) });
        edges.push(Edge { kind: EdgeKind::Up, u: trace.b_u(h), v: trace.c_v(h) });
        edges.push(Edge { kind: EdgeKind::Down, u: trace.b_u(h), v: trace.a_v(h) });
        edges.push(Edge { kind: EdgeKind::Down, u: trace.c_u(h), v: trace.b_v(h) });
    }
    for component in &trace.cc {
        for (pos, &h) in component.iter().enumerate() {
            let next = component[(pos + 1) % component.len()];
            if trace.gadgets[h].positive {
                // down-linking: c of a positive gadget to a' of the next (negative)
                edges.push(Edge { kind: EdgeKind::DownLinking, u: trace.c_u(h), v: trace.a_v(next) });
            } else {
                // up-linking: a of a negative gadget to c' of the next (positive)
                edges.push(Edge { kind: EdgeKind::UpLinking, u: trace.a_u(h), v: trace.c_v(next) });
            }
        }
    }
    for clause in 0..trace.k {
        for &h in &trace.clause_gadgets[clause] {
            let g = &trace.gadgets[h];
            let (u_free, v_free) =
                if g.positive { (trace.a_u(h), trace.a_v(h)) } else { (trace.c_u(h), trace.c_v(h)) };
            edges.push(Edge { kind: EdgeKind::Lateral, u: trace.d_u(clause), v: v_free });
            edges.push(Edge { kind: EdgeKind::Lateral, u: trace.e_u(clause), v: v_free });
            edges.push(Edge { kind: EdgeKind::Lateral, u: u_free, v: trace.d_v(clause) });
            edges.push(Edge { kind: EdgeKind::Lateral, u: u_free, v: trace.e_v(clause) });
        }
    }
    for i in 0..trace.k {
        for s in 0..trace.k {
            if i != s {
                edges.push(Edge { kind: EdgeKind::Completion, u: trace.e_u(i), v: trace.e_v(s) });
            }
        }
    }
    edges
}

/// Result of comparing the built intersection graph against the intended
/// edge list.
#[derive(Debug, Clone, Default, Serialize)]
pub struct StructureDiff {
    /// Intended edges missing from the built graph, as labels.
    pub missing: Vec<String>,
    /// Built edges not in the intended list, as labels.
    pub extra: Vec<String>,
}

impl StructureDiff {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl fmt::Display for StructureDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "structure ok");
        }
        for e in &self.missing {
            writeln!(f, "missing edge: {e}")?;
        }
        for e in &self.extra {
            writeln!(f, "extra edge: {e}")?;
        }
        Ok(())
    }
}

/// Checks that the intersection graph of `inst` equals the intended edge set
/// of `trace` exactly.
pub fn verify_structure(inst: &SortInstance, trace: &ReductionTrace) -> StructureDiff {
    let built: BTreeSet<(usize, usize)> =
        build_intersection_graph(inst).edges().into_iter().collect();
    let intended: BTreeSet<(usize, usize)> =
        trace.edges.iter().map(|e| (e.u, e.v)).collect();
    let label = |&(u, v): &(usize, usize)| {
        format!("({}, {})", trace.u_labels[u], trace.v_labels[v])
    };
    StructureDiff {
        missing: intended.difference(&built).map(label).collect(),
        extra: built.difference(&intended).map(label).collect(),
    }
}

/// Per-gadget edge selection of a matching, recovered from a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Up,
    Down,
}

/// Determines the up/down orientation of every unit gadget under the witness
/// matching, and checks the matching-structure properties: each gadget
/// contributes exactly its two up-edges or its two down-edges, uniformly per
/// consistency component, with the corresponding linking edges.
pub fn gadget_orientations(
    trace: &ReductionTrace,
    w: &SupportWitness,
) -> Result<Vec<Orientation>> {
    let in_m = |u: usize, v: usize| w.sigma[v] == u;
    let mut orientations = Vec::with_capacity(trace.gadgets.len());
    for g in &trace.gadgets {
        let h = g.block;
        let up = [in_m(trace.a_u(h), trace.b_v(h)), in_m(trace.b_u(h), trace.c_v(h))];
        let down = [in_m(trace.b_u(h), trace.a_v(h)), in_m(trace.c_u(h), trace.b_v(h))];
        match (up, down) {
            ([true, true], [false, false]) => orientations.push(Orientation::Up),
            ([false, false], [true, true]) => orientations.push(Orientation::Down),
            _ => {
                return Err(Error::BadGadgetMatching(format!(
                    "gadget at block {h} has edges up={up:?} down={down:?}"
                )))
            }
        }
    }
    for (var, component) in trace.cc.iter().enumerate() {
        let first = orientations[component[0]];
        for &h in component {
            if orientations[h] != first {
                return Err(Error::BadGadgetMatching(format!(
                    "consistency component of x{} mixes up- and down-edges",
                    var + 1
                )));
            }
        }
        for (pos, &h) in component.iter().enumerate() {
            let next = component[(pos + 1) % component.len()];
            let g = &trace.gadgets[h];
            // up orientation forces the down-linking edges and vice versa
            let (expected, u, v) = if g.positive {
                (Orientation::Up, trace.c_u(h), trace.a_v(next))
            } else {
                (Orientation::Down, trace.a_u(h), trace.c_v(next))
            };
            if (first == expected) != in_m(u, v) {
                return Err(Error::BadGadgetMatching(format!(
                    "linking edge ({}, {}) inconsistent with component orientation",
                    trace.u_labels[u], trace.v_labels[v]
                )));
            }
        }
    }
    Ok(orientations)
}

/// Reads a truth assignment off a witness: `x_j` is true iff the gadgets of
/// its consistency component carry their up-edges. Errors when the matching
/// violates the expected gadget structure.
pub fn extract_assignment(trace: &ReductionTrace, w: &SupportWitness) -> Result<Assignment> {
    let orientations = gadget_orientations(trace, w)?;
    let values = trace
        .cc
        .iter()
        .map(|component| orientations[component[0]] == Orientation::Up)
        .collect();
    Ok(Assignment { values })
}

/// Builds a complete support witness from a NAE-satisfying assignment,
/// following the truth-component construction: per clause, one true
/// occurrence pairs with `d_i`, one false occurrence with `d'_i`, and the
/// third occurrence with `e_i` or `e'_i`; the leftover `e`-vertices are
/// matched lowest-index-first across clauses.
pub fn build_witness(
    inst: &SortInstance,
    trace: &ReductionTrace,
    a: &Assignment,
) -> Result<SupportWitness> {
    if !nae_check(&trace.formula, a) {
        return Err(Error::NotNaeSatisfying);
    }
    let n = trace.n;
    let mut matched: Vec<Option<usize>> = vec![None; n];
    let set = |matched: &mut Vec<Option<usize>>, v: usize, u: usize| -> Result<()> {
        if matched[v].is_some() {
            return Err(Error::BadGadgetMatching(format!(
                "vertex {} matched twice",
                trace.v_labels[v]
            )));
        }
        matched[v] = Some(u);
        Ok(())
    };

    // unit-gadget edges follow the variable's truth value
    for g in &trace.gadgets {
        let h = g.block;
        if a.values[g.var] {
            set(&mut matched, trace.b_v(h), trace.a_u(h))?;
            set(&mut matched, trace.c_v(h), trace.b_u(h))?;
        } else {
            set(&mut matched, trace.a_v(h), trace.b_u(h))?;
            set(&mut matched, trace.b_v(h), trace.c_u(h))?;
        }
    }
    // linking edges follow the component orientation
    for component in &trace.cc {
        for (pos, &h) in component.iter().enumerate() {
            let next = component[(pos + 1) % component.len()];
            let g = &trace.gadgets[h];
            let up = a.values[g.var];
            if g.positive && up {
                set(&mut matched, trace.a_v(next), trace.c_u(h))?;
            } else if !g.positive && !up {
                set(&mut matched, trace.c_v(next), trace.a_u(h))?;
            }
        }
    }
    // lateral edges: d_i to a true occurrence, d'_i to a false one, the
    // third occurrence to the e-side of its truth value
    let mut e_unsaturated = Vec::new();
    let mut e_prime_unsaturated = Vec::new();
    for clause in 0..trace.k {
        let occ_true: Vec<bool> = trace.clause_gadgets[clause]
            .iter()
            .map(|&h| {
                let g = &trace.gadgets[h];
                a.values[g.var] == g.positive
            })
            .collect();
        let true_slot = occ_true
            .iter()
            .position(|&b| b)
            .ok_or(Error::NotNaeSatisfying)?;
        let false_slot = occ_true
            .iter()
            .position(|&b| !b)
            .ok_or(Error::NotNaeSatisfying)?;
        let third_slot = (0..3).find(|&s| s != true_slot && s != false_slot).unwrap();

        // the leftover V-vertex of a gadget whose occurrence is true, and the
        // leftover U-vertex of one whose occurrence is false
        let leftover_v = |h: usize| {
            let g = &trace.gadgets[h];
            if g.positive {
                trace.a_v(h)
            } else {
                trace.c_v(h)
            }
        };
        let leftover_u = |h: usize| {
            let g = &trace.gadgets[h];
            if g.positive {
                trace.a_u(h)
            } else {
                trace.c_u(h)
            }
        };

        let true_gadget = trace.clause_gadgets[clause][true_slot];
        let false_gadget = trace.clause_gadgets[clause][false_slot];
        let third_gadget = trace.clause_gadgets[clause][third_slot];
        set(&mut matched, leftover_v(true_gadget), trace.d_u(clause))?;
        set(&mut matched, trace.d_v(clause), leftover_u(false_gadget))?;
        if occ_true[third_slot] {
            set(&mut matched, leftover_v(third_gadget), trace.e_u(clause))?;
            e_prime_unsaturated.push(clause);
        } else {
            set(&mut matched, trace.e_v(clause), leftover_u(third_gadget))?;
            e_unsaturated.push(clause);
        }
    }
    // completion: pair leftover e-vertices lowest-index-first
    if e_unsaturated.len() != e_prime_unsaturated.len() {
        return Err(Error::BadGadgetMatching(format!(
            "unsaturated e/e' counts differ: {} vs {}",
            e_unsaturated.len(),
            e_prime_unsaturated.len()
        )));
    }
    for (&i, &s) in e_unsaturated.iter().zip(&e_prime_unsaturated) {
        debug_assert_ne!(i, s);
        set(&mut matched, trace.e_v(s), trace.e_u(i))?;
    }

    let sigma: Vec<usize> = matched
        .iter()
        .enumerate()
        .map(|(v, u)| {
            u.ok_or_else(|| {
                Error::BadGadgetMatching(format!("vertex {} left unmatched", trace.v_labels[v]))
            })
        })
        .collect::<Result<_>>()?;
    let q = q_sets(inst, &Matching::total(&sigma))?;
    let values = representatives(&q).ok_or_else(|| {
        Error::BadGadgetMatching("built matching admits no nondecreasing representatives".into())
    })?;
    Ok(SupportWitness::new(sigma, values))
}

/// Applies the disjoint-domain transform: refine the integer line into atomic
/// segments, give every (segment, owning-U) pair its own fresh value, and let
/// each covering V-domain span all values of the segment. U-domains become
/// pairwise disjoint; the intersection graph is unchanged.
pub fn disjointify(
    inst: &SortInstance,
    trace: &ReductionTrace,
) -> Result<(SortInstance, ReductionTrace)> {
    // atomic decomposition by every interval boundary
    let mut bounds = BTreeSet::new();
    for dom in inst.u_domains.iter().chain(&inst.v_domains) {
        for &(lo, hi) in dom.intervals() {
            bounds.insert(lo);
            bounds.insert(hi + 1);
        }
    }
    let cuts: Vec<i64> = bounds.into_iter().collect();

    let mut next_value: i64 = 1;
    let mut new_u: Vec<Vec<(i64, i64)>> = vec![Vec::new(); inst.n];
    let mut new_v: Vec<Vec<(i64, i64)>> = vec![Vec::new(); inst.n];
    let mut segments = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1] - 1);
        let owners: Vec<usize> =
            (0..inst.n).filter(|&i| inst.u_domains[i].contains(lo)).collect();
        let coverers: Vec<usize> =
            (0..inst.n).filter(|&j| inst.v_domains[j].contains(lo)).collect();
        if owners.is_empty() && coverers.is_empty() {
            continue;
        }
        let mut slots = Vec::new();
        if owners.is_empty() {
            slots.push((None, next_value));
            next_value += 1;
        } else {
            for &u in &owners {
                slots.push((Some(u), next_value));
                new_u[u].push((next_value, next_value));
                next_value += 1;
            }
        }
        let (seg_lo, seg_hi) = (slots.first().unwrap().1, slots.last().unwrap().1);
        for &v in &coverers {
            new_v[v].push((seg_lo, seg_hi));
        }
        segments.push(SegmentSplit { lo, hi, slots });
    }

    let u_domains: Vec<IntegerSet> =
        new_u.iter().map(|p| IntegerSet::normalize(p)).collect::<Result<_>>()?;
    let v_domains: Vec<IntegerSet> =
        new_v.iter().map(|p| IntegerSet::normalize(p)).collect::<Result<_>>()?;
    let new_inst = SortInstance::new(u_domains, v_domains, None, false)?;
    let mut new_trace = trace.clone();
    new_trace.variant = Variant::Disjoint;
    new_trace.segments = segments;
    Ok((new_inst, new_trace))
}

/// Result of a full round-trip check on one formula.
#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub variant: Variant,
    pub k: usize,
    pub n: usize,
    pub nae_satisfiable: bool,
    pub solver_yes: bool,
    pub problems: Vec<String>,
}

impl RoundtripReport {
    pub fn ok(&self) -> bool {
        self.nae_satisfiable == self.solver_yes && self.problems.is_empty()
    }
}

impl fmt::Display for RoundtripReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "k={} n={} nae={} solver={} -> {}",
            self.k,
            self.n,
            self.nae_satisfiable,
            self.solver_yes,
            if self.ok() { "agree" } else { "MISMATCH" }
        )?;
        for p in &self.problems {
            writeln!(f, "problem: {p}")?;
        }
        Ok(())
    }
}

/// Balances the formula, reduces it, and checks that the NAE brute force and
/// the solver agree, with witness/assignment extraction cross-checked in both
/// directions and the matching-structure properties asserted on YES.
pub fn roundtrip_verify(f: &CnfFormula, variant: Variant) -> Result<RoundtripReport> {
    let balanced = crate::nae::balance_occurrences(f);
    let nae = nae_brute_force(&balanced)?;
    let (inst, trace) = reduce(&balanced, variant)?;
    let verdict = decide_support(&inst, &SolveOptions::default())?;
    let mut problems = Vec::new();
    let solver_yes = match &verdict.outcome {
        Outcome::Yes(w) => {
            let validation = crate::instance::validate_witness(&inst, w);
            if !validation.ok() {
                problems.push(format!("solver witness invalid: {validation}"));
            }
            match gadget_orientations(&trace, w) {
                Ok(_) => {}
                Err(e) => problems.push(format!("matching structure violated: {e}")),
            }
            match extract_assignment(&trace, w) {
                Ok(a) => {
                    if !nae_check(&balanced, &a) {
                        problems.push("extracted assignment fails NAE check".into());
                    }
                }
                Err(e) => problems.push(format!("assignment extraction failed: {e}")),
            }
            true
        }
        Outcome::No => false,
        Outcome::Limit => {
            problems.push("solver hit its node limit".into());
            false
        }
    };
    if let Some(a) = &nae {
        match build_witness(&inst, &trace, a) {
            Ok(w) => {
                let validation = crate::instance::validate_witness(&inst, &w);
                if !validation.ok() {
                    problems.push(format!("built witness invalid: {validation}"));
                }
            }
            Err(e) => problems.push(format!("witness construction failed: {e}")),
        }
    }
    Ok(RoundtripReport {
        variant,
        k: trace.k,
        n: trace.n,
        nae_satisfiable: nae.is_some(),
        solver_yes,
        problems,
    })
}
