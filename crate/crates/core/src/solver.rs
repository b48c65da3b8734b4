//! Exact decision of support existence for `sort(U,V)`, `sort(U,V,P)` and
//! `keysorting(U,V,1,P)`, plus a brute-force oracle.
//!
//! The search assigns `σ(v_1), …, σ(v_n)` in V-order, keeps a running lower
//! bound on the assigned values, picks the greedy-minimal feasible value for
//! each candidate (minimal values dominate larger ones for a fixed matching
//! prefix) and prunes with a maximum-matching feasibility test on the
//! remaining bipartite graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{IntersectionGraph, SortInstance, SupportWitness};
use crate::intervals::IntegerSet;

/// Which side of the instance a pin targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

/// Forces `variable = value` in every reported support. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub side: Side,
    pub index: usize,
    pub value: i64,
}

/// Options controlling a solve.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub pins: Vec<Pin>,
    /// Honor the P-domains: `σ(v_j) = u_i` only when `j ∈ Dom(p_i)`.
    pub respect_p: bool,
    /// Honor stability: U-variables with equal values keep their U-order in V.
    pub respect_stability: bool,
    /// Search node budget; exceeding it yields [`Outcome::Limit`], never NO.
    pub node_limit: Option<u64>,
    /// Matching-based feasibility pruning. Disabling never changes verdicts,
    /// only node counts.
    pub prune: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            pins: Vec::new(),
            respect_p: false,
            respect_stability: false,
            node_limit: Some(10_000_000),
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Yes(SupportWitness),
    No,
    /// The node budget was exhausted before the search completed.
    Limit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self.outcome, Outcome::Yes(_))
    }

    pub fn witness(&self) -> Option<&SupportWitness> {
        match &self.outcome {
            Outcome::Yes(w) => Some(w),
            _ => None,
        }
    }
}

/// Size of a maximum bipartite matching on the edges of `graph` admitted by
/// `allowed`, computed with augmenting paths.
pub fn max_matching(
    graph: &IntersectionGraph,
    allowed: impl Fn(usize, usize) -> bool,
) -> usize {
    let adjacency: Vec<Vec<usize>> = graph
        .adjacency
        .iter()
        .enumerate()
        .map(|(j, us)| us.iter().copied().filter(|&i| allowed(i, j)).collect())
        .collect();
    let mut matched_u: Vec<Option<usize>> = vec![None; graph.n];
    let mut size = 0;
    let mut visited = vec![false; graph.n];
    for j in 0..adjacency.len() {
        visited.iter_mut().for_each(|v| *v = false);
        if augment(&adjacency, j, &mut matched_u, &mut visited) {
            size += 1;
        }
    }
    size
}

fn augment(
    adjacency: &[Vec<usize>],
    j: usize,
    matched_u: &mut Vec<Option<usize>>,
    visited: &mut [bool],
) -> bool {
    for &u in &adjacency[j] {
        if visited[u] {
            continue;
        }
        visited[u] = true;
        if matched_u[u].is_none()
            || augment(adjacency, matched_u[u].unwrap(), matched_u, visited)
        {
            matched_u[u] = Some(j);
            return true;
        }
    }
    false
}

/// Normalized pins per variable; contradictory pins make the instance
/// unsatisfiable rather than erroring.
struct PinTable {
    u: Vec<Option<i64>>,
    v: Vec<Option<i64>>,
    contradictory: bool,
}

fn check_pins(inst: &SortInstance, pins: &[Pin]) -> Result<PinTable> {
    let mut table =
        PinTable { u: vec![None; inst.n], v: vec![None; inst.n], contradictory: false };
    for pin in pins {
        let (doms, slot, side) = match pin.side {
            Side::U => (&inst.u_domains, &mut table.u, "u"),
            Side::V => (&inst.v_domains, &mut table.v, "v"),
        };
        if pin.index >= inst.n || !doms[pin.index].contains(pin.value) {
            return Err(Error::InvalidPin { side, index: pin.index + 1, value: pin.value });
        }
        match slot[pin.index] {
            Some(prev) if prev != pin.value => table.contradictory = true,
            _ => slot[pin.index] = Some(pin.value),
        }
    }
    Ok(table)
}

/// One intersection-graph edge seen from a V-variable: the adjacent U-index,
/// the (non-empty) domain intersection, and its maximum.
struct EdgeDomain {
    u: usize,
    inter: IntegerSet,
    max: i64,
}

/// Per-instance precomputation, reusable across solves with different
/// options. Building it costs one pass over all domain pairs; each solve then
/// only touches intersection-graph edges.
pub struct Solver<'a> {
    inst: &'a SortInstance,
    /// neighbors[j]: edges of v_j in ascending U-index order.
    neighbors: Vec<Vec<EdgeDomain>>,
}

impl<'a> Solver<'a> {
    pub fn new(inst: &'a SortInstance) -> Self {
        let neighbors = inst
            .v_domains
            .iter()
            .map(|vd| {
                inst.u_domains
                    .iter()
                    .enumerate()
                    .filter_map(|(u, ud)| {
                        let inter = ud.intersect(vd);
                        inter.max().map(|max| EdgeDomain { u, inter, max })
                    })
                    .collect()
            })
            .collect();
        Solver { inst, neighbors }
    }

    /// Decides whether the instance has a support under the given options.
    ///
    /// YES verdicts carry a witness with the greedy-minimal value selection
    /// for the found matching. With `respect_stability`, stability is
    /// enforced on that greedy selection, matching the brute-force oracle.
    pub fn decide(&self, opts: &SolveOptions) -> Result<Verdict> {
        let pins = check_pins(self.inst, &opts.pins)?;
        let mut search = Search {
            solver: self,
            pins,
            respect_p: opts.respect_p,
            respect_stability: opts.respect_stability,
            prune: opts.prune,
            node_limit: opts.node_limit,
            stats: SearchStats::default(),
            used: vec![false; self.inst.n],
            sigma: vec![0; self.inst.n],
            values: vec![0; self.inst.n],
            feas_adj: vec![Vec::new(); self.inst.n],
            feas_matched: vec![None; self.inst.n],
            feas_visited: vec![false; self.inst.n],
        };
        if search.pins.contradictory {
            return Ok(Verdict { outcome: Outcome::No, stats: search.stats });
        }
        let outcome = match search.dfs(0, i64::MIN) {
            Found::Yes => Outcome::Yes(SupportWitness::new(search.sigma, search.values)),
            Found::No => Outcome::No,
            Found::Limit => Outcome::Limit,
        };
        Ok(Verdict { outcome, stats: search.stats })
    }
}

struct Search<'a> {
    solver: &'a Solver<'a>,
    pins: PinTable,
    respect_p: bool,
    respect_stability: bool,
    prune: bool,
    node_limit: Option<u64>,
    stats: SearchStats,
    used: Vec<bool>,
    sigma: Vec<usize>,
    values: Vec<i64>,
    // scratch buffers for `feasible`, reused across nodes
    feas_adj: Vec<Vec<usize>>,
    feas_matched: Vec<Option<usize>>,
    feas_visited: Vec<bool>,
}

enum Found {
    Yes,
    No,
    Limit,
}

impl<'a> Search<'a> {
    fn p_allows(&self, u: usize, j: usize) -> bool {
        if !self.respect_p {
            return true;
        }
        match &self.solver.inst.p_domains {
            Some(p) => p[u].contains((j + 1) as i64),
            None => true,
        }
    }

    /// The value the edge would take at position `j` with lower bound
    /// `floor`, or None when no admissible value exists.
    fn candidate_value(&self, edge: &EdgeDomain, j: usize, floor: i64) -> Option<i64> {
        match (self.pins.u[edge.u], self.pins.v[j]) {
            (Some(a), Some(b)) if a != b => None,
            (Some(v), _) | (_, Some(v)) => {
                (v >= floor && edge.inter.contains(v)).then_some(v)
            }
            (None, None) => edge.inter.least_geq(floor),
        }
    }

    fn stability_ok(&self, u: usize, j: usize, value: i64) -> bool {
        if !self.respect_stability {
            return true;
        }
        // values are nondecreasing, so equal values form a suffix
        for j2 in (0..j).rev() {
            if self.values[j2] != value {
                break;
            }
            if self.sigma[j2] > u {
                return false;
            }
        }
        true
    }

    /// Necessary condition for completing the matching from position `j` with
    /// lower bound `floor`: the remaining V-positions must be saturable in the
    /// bipartite graph restricted to edges whose intersection reaches `floor`
    /// (relaxed: the chain condition between future values is ignored).
    fn feasible(&mut self, j: usize, floor: i64) -> bool {
        let n = self.solver.inst.n;
        let remaining = n - j;
        let mut adjacency = std::mem::take(&mut self.feas_adj);
        for (row, j2) in (j..n).enumerate() {
            adjacency[row].clear();
            adjacency[row].extend(
                self.solver.neighbors[j2]
                    .iter()
                    .filter(|edge| {
                        !self.used[edge.u]
                            && self.p_allows(edge.u, j2)
                            && match (self.pins.u[edge.u], self.pins.v[j2]) {
                                (Some(a), Some(b)) if a != b => false,
                                (Some(v), _) | (_, Some(v)) => {
                                    v >= floor && edge.inter.contains(v)
                                }
                                (None, None) => edge.max >= floor,
                            }
                    })
                    .map(|edge| edge.u),
            );
        }
        let mut matched_u = std::mem::take(&mut self.feas_matched);
        let mut visited = std::mem::take(&mut self.feas_visited);
        matched_u.fill(None);
        let mut ok = true;
        for row in 0..remaining {
            visited.fill(false);
            if !augment(&adjacency[..remaining], row, &mut matched_u, &mut visited) {
                ok = false;
                break;
            }
        }
        self.feas_adj = adjacency;
        self.feas_matched = matched_u;
        self.feas_visited = visited;
        ok
    }

    fn dfs(&mut self, j: usize, floor: i64) -> Found {
        if j == self.solver.inst.n {
            return Found::Yes;
        }
        for idx in 0..self.solver.neighbors[j].len() {
            let edge = &self.solver.neighbors[j][idx];
            let u = edge.u;
            if self.used[u] || !self.p_allows(u, j) {
                continue;
            }
            let Some(value) = self.candidate_value(edge, j, floor) else {
                continue;
            };
            if !self.stability_ok(u, j, value) {
                continue;
            }
            self.stats.nodes += 1;
            if let Some(limit) = self.node_limit {
                if self.stats.nodes > limit {
                    return Found::Limit;
                }
            }
            self.used[u] = true;
            self.sigma[j] = u;
            self.values[j] = value;
            let viable = !self.prune || j + 1 == self.solver.inst.n || {
                let ok = self.feasible(j + 1, value);
                if !ok {
                    self.stats.prunes += 1;
                }
                ok
            };
            if viable {
                match self.dfs(j + 1, value) {
                    Found::No => {}
                    other => return other,
                }
            }
            self.used[u] = false;
        }
        Found::No
    }
}

/// One-shot convenience wrapper around [`Solver`].
pub fn decide_support(inst: &SortInstance, opts: &SolveOptions) -> Result<Verdict> {
    Solver::new(inst).decide(opts)
}

/// Brute-force oracle: enumerates all n! injections and applies the greedy
/// representative selection to each. Guarded to n <= 8.
pub fn brute_force_support(inst: &SortInstance, opts: &SolveOptions) -> Result<Verdict> {
    if inst.n > 8 {
        return Err(Error::OracleTooLarge(inst.n));
    }
    let pins = check_pins(inst, &opts.pins)?;
    let mut stats = SearchStats::default();
    if pins.contradictory {
        return Ok(Verdict { outcome: Outcome::No, stats });
    }
    let n = inst.n;
    let mut sigma: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut found: Option<SupportWitness> = None;
    enumerate(inst, opts, &pins, &mut sigma, &mut used, &mut stats, &mut found);
    let outcome = match found {
        Some(w) => Outcome::Yes(w),
        None => Outcome::No,
    };
    Ok(Verdict { outcome, stats })
}

fn enumerate(
    inst: &SortInstance,
    opts: &SolveOptions,
    pins: &PinTable,
    sigma: &mut Vec<usize>,
    used: &mut Vec<bool>,
    stats: &mut SearchStats,
    found: &mut Option<SupportWitness>,
) {
    if found.is_some() {
        return;
    }
    let n = inst.n;
    if sigma.len() == n {
        stats.nodes += 1;
        if let Some(w) = try_sigma(inst, opts, pins, sigma) {
            *found = Some(w);
        }
        return;
    }
    for u in 0..n {
        if used[u] {
            continue;
        }
        used[u] = true;
        sigma.push(u);
        enumerate(inst, opts, pins, sigma, used, stats, found);
        sigma.pop();
        used[u] = false;
    }
}

fn try_sigma(
    inst: &SortInstance,
    opts: &SolveOptions,
    pins: &PinTable,
    sigma: &[usize],
) -> Option<SupportWitness> {
    if opts.respect_p {
        if let Some(p) = &inst.p_domains {
            for (j, &u) in sigma.iter().enumerate() {
                if !p[u].contains((j + 1) as i64) {
                    return None;
                }
            }
        }
    }
    let q: Vec<IntegerSet> = sigma
        .iter()
        .enumerate()
        .map(|(j, &u)| inst.u_domains[u].intersect(&inst.v_domains[j]))
        .collect();
    let mut forced: Vec<Option<i64>> = Vec::with_capacity(inst.n);
    for (j, &u) in sigma.iter().enumerate() {
        match (pins.u[u], pins.v[j]) {
            (Some(a), Some(b)) if a != b => return None,
            (Some(v), _) | (_, Some(v)) => forced.push(Some(v)),
            (None, None) => forced.push(None),
        }
    }
    let values = crate::instance::representatives_with_pins(&q, &forced)?;
    if opts.respect_stability {
        for j in 0..inst.n {
            for j2 in j + 1..inst.n {
                if values[j] == values[j2] && sigma[j] > sigma[j2] {
                    return None;
                }
            }
        }
    }
    Some(SupportWitness::new(sigma.to_vec(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_witness;

    fn set(pairs: &[(i64, i64)]) -> IntegerSet {
        IntegerSet::normalize(pairs).unwrap()
    }

    fn inst(u: &[IntegerSet], v: &[IntegerSet]) -> SortInstance {
        SortInstance::new(u.to_vec(), v.to_vec(), None, false).unwrap()
    }

    #[test]
    fn solve_trivial_yes() {
        let i = inst(
            &[IntegerSet::singleton(2), IntegerSet::singleton(1)],
            &[set(&[(1, 2)]), IntegerSet::singleton(2)],
        );
        let verdict = decide_support(&i, &SolveOptions::default()).unwrap();
        let w = verdict.witness().expect("YES");
        assert_eq!(w.values, vec![1, 2]);
        assert!(validate_witness(&i, w).ok());
    }

    #[test]
    fn solve_trivial_no() {
        let i = inst(
            &[IntegerSet::singleton(5), IntegerSet::singleton(5)],
            &[IntegerSet::singleton(5), IntegerSet::singleton(4)],
        );
        assert_eq!(decide_support(&i, &SolveOptions::default()).unwrap().outcome, Outcome::No);
    }

    #[test]
    fn solver_handle_is_reusable() {
        let i = inst(
            &[set(&[(1, 3)]), set(&[(2, 4)])],
            &[set(&[(1, 2)]), set(&[(3, 4)])],
        );
        let solver = Solver::new(&i);
        assert!(solver.decide(&SolveOptions::default()).unwrap().is_yes());
        let pinned = SolveOptions {
            pins: vec![Pin { side: Side::V, index: 0, value: 2 }],
            ..SolveOptions::default()
        };
        assert!(solver.decide(&pinned).unwrap().is_yes());
        let impossible = SolveOptions {
            pins: vec![Pin { side: Side::V, index: 1, value: 3 }],
            respect_stability: false,
            ..SolveOptions::default()
        };
        // v_2 = 3 forces u_2 on v_1 with value <= 3 ... still satisfiable
        assert!(solver.decide(&impossible).unwrap().is_yes());
    }

    #[test]
    fn oracle_singletons() {
        let yes = inst(&[IntegerSet::singleton(3)], &[IntegerSet::singleton(3)]);
        assert!(brute_force_support(&yes, &SolveOptions::default()).unwrap().is_yes());
        let no = inst(&[IntegerSet::singleton(3)], &[IntegerSet::singleton(4)]);
        assert!(!brute_force_support(&no, &SolveOptions::default()).unwrap().is_yes());
    }

    #[test]
    fn oracle_guard() {
        let doms: Vec<IntegerSet> = (0..9).map(IntegerSet::singleton).collect();
        let i = inst(&doms, &doms);
        assert!(matches!(
            brute_force_support(&i, &SolveOptions::default()),
            Err(Error::OracleTooLarge(9))
        ));
    }

    #[test]
    fn invalid_pin_is_an_error() {
        let i = inst(&[IntegerSet::singleton(2)], &[IntegerSet::singleton(2)]);
        let opts = SolveOptions {
            pins: vec![Pin { side: Side::U, index: 0, value: 7 }],
            ..SolveOptions::default()
        };
        assert!(matches!(decide_support(&i, &opts), Err(Error::InvalidPin { .. })));
    }

    #[test]
    fn contradictory_pins_are_no() {
        let i = inst(&[set(&[(1, 2)])], &[set(&[(1, 2)])]);
        let opts = SolveOptions {
            pins: vec![
                Pin { side: Side::U, index: 0, value: 1 },
                Pin { side: Side::U, index: 0, value: 2 },
            ],
            ..SolveOptions::default()
        };
        assert_eq!(decide_support(&i, &opts).unwrap().outcome, Outcome::No);
    }

    #[test]
    fn node_limit_yields_limit() {
        // an unsatisfiable instance with plenty of branching and no pruning
        let u: Vec<IntegerSet> = (0..6).map(|_| set(&[(0, 5)])).collect();
        let mut v: Vec<IntegerSet> = (0..5).map(|_| set(&[(0, 5)])).collect();
        v.push(IntegerSet::singleton(-1));
        let i = inst(&u, &v);
        let opts = SolveOptions { node_limit: Some(3), prune: false, ..SolveOptions::default() };
        assert_eq!(decide_support(&i, &opts).unwrap().outcome, Outcome::Limit);
    }

    #[test]
    fn max_matching_shapes() {
        // complete bipartite 3x3
        let g = IntersectionGraph { n: 3, adjacency: vec![vec![0, 1, 2]; 3] };
        assert_eq!(max_matching(&g, |_, _| true), 3);
        assert_eq!(max_matching(&g, |_, _| false), 0);
        // star: one u adjacent to three v
        let star = IntersectionGraph { n: 3, adjacency: vec![vec![0], vec![0], vec![0]] };
        assert_eq!(max_matching(&star, |_, _| true), 1);
    }
}
