//! The SortSupport problem model: variables with domains, the intersection
//! graph, matchings, Q-sets and witness validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::IntegerSet;

/// One decision problem: does `sort(U,V)` (optionally with a permutation
/// variable set P, optionally with the stability requirement) have a support?
///
/// `v_domains` are listed in the V-order `v_1..v_n`, which is part of the
/// problem: it defines which matchings are sort-matchings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortInstance {
    pub n: usize,
    pub u_domains: Vec<IntegerSet>,
    pub v_domains: Vec<IntegerSet>,
    /// Permutation variable domains, each a subset of `[1..n]`.
    pub p_domains: Option<Vec<IntegerSet>>,
    /// Whether the sorting must be stable (equal U-values keep their U-order in V).
    pub stable: bool,
}

impl SortInstance {
    pub fn new(
        u_domains: Vec<IntegerSet>,
        v_domains: Vec<IntegerSet>,
        p_domains: Option<Vec<IntegerSet>>,
        stable: bool,
    ) -> Result<Self> {
        let n = u_domains.len();
        if n == 0 {
            return Err(Error::InvalidInstance("n must be positive".into()));
        }
        if v_domains.len() != n {
            return Err(Error::InvalidInstance(format!(
                "|U| = {n} but |V| = {}",
                v_domains.len()
            )));
        }
        for (side, doms) in [("u", &u_domains), ("v", &v_domains)] {
            if let Some(idx) = doms.iter().position(IntegerSet::is_empty) {
                return Err(Error::InvalidInstance(format!(
                    "domain of {side}_{} is empty",
                    idx + 1
                )));
            }
        }
        if let Some(p) = &p_domains {
            if p.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "|P| = {} but n = {n}",
                    p.len()
                )));
            }
            let full = IntegerSet::interval(1, n as i64)?;
            for (i, dom) in p.iter().enumerate() {
                if dom.is_empty() {
                    return Err(Error::InvalidInstance(format!("domain of p_{} is empty", i + 1)));
                }
                if dom.intersect(&full) != *dom {
                    return Err(Error::InvalidInstance(format!(
                        "domain of p_{} is not a subset of [1..{n}]",
                        i + 1
                    )));
                }
            }
        }
        Ok(SortInstance { n, u_domains, v_domains, p_domains, stable })
    }

    /// Parses the line-based instance format (see [`SortInstance::render`]).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty instance file".into()))?;
        let mut toks = header.split_whitespace();
        if toks.next() != Some("sortsupport") {
            return Err(Error::Parse("expected `sortsupport` header".into()));
        }
        let n: usize = toks
            .next()
            .ok_or_else(|| Error::Parse("missing n in header".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad n in header".into()))?;
        let mut has_perm = false;
        let mut stable = false;
        for tok in toks {
            match tok {
                "perm" => has_perm = true,
                "stable" => stable = true,
                other => return Err(Error::Parse(format!("unknown header flag `{other}`"))),
            }
        }
        let mut u = vec![None; n];
        let mut v = vec![None; n];
        let mut p = vec![None; n];
        for line in lines {
            let mut toks = line.split_whitespace();
            let side = toks.next().unwrap();
            let idx: usize = toks
                .next()
                .ok_or_else(|| Error::Parse(format!("missing index in `{line}`")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in `{line}`")))?;
            if idx < 1 || idx > n {
                return Err(Error::Parse(format!("index {idx} out of range 1..{n}")));
            }
            let rest: String = toks.collect::<Vec<_>>().join(" ");
            let dom: IntegerSet = rest.parse()?;
            let slot = match side {
                "u" => &mut u[idx - 1],
                "v" => &mut v[idx - 1],
                "p" => &mut p[idx - 1],
                other => return Err(Error::Parse(format!("unknown line kind `{other}`"))),
            };
            if slot.is_some() {
                return Err(Error::Parse(format!("duplicate line for {side} {idx}")));
            }
            *slot = Some(dom);
        }
        let unwrap_all = |side: &str, v: Vec<Option<IntegerSet>>| -> Result<Vec<IntegerSet>> {
            v.into_iter()
                .enumerate()
                .map(|(i, d)| d.ok_or_else(|| Error::Parse(format!("missing {side} {}", i + 1))))
                .collect()
        };
        let u = unwrap_all("u", u)?;
        let v = unwrap_all("v", v)?;
        let p = if has_perm { Some(unwrap_all("p", p)?) } else { None };
        SortInstance::new(u, v, p, stable)
    }

    /// Renders the instance in the text format:
    ///
    /// ```text
    /// sortsupport <n> [perm] [stable]
    /// u <i> <interval-list>   (n lines)
    /// v <j> <interval-list>   (n lines)
    /// p <i> <interval-list>   (n lines, only with perm)
    /// ```
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("sortsupport {}", self.n));
        if self.p_domains.is_some() {
            out.push_str(" perm");
        }
        if self.stable {
            out.push_str(" stable");
        }
        out.push('\n');
        for (i, d) in self.u_domains.iter().enumerate() {
            out.push_str(&format!("u {} {}\n", i + 1, d));
        }
        for (j, d) in self.v_domains.iter().enumerate() {
            out.push_str(&format!("v {} {}\n", j + 1, d));
        }
        if let Some(p) = &self.p_domains {
            for (i, d) in p.iter().enumerate() {
                out.push_str(&format!("p {} {}\n", i + 1, d));
            }
        }
        out
    }
}

/// Bipartite graph on U ∪ V with an edge `(u_i, v_j)` iff the domains of
/// `u_i` and `v_j` intersect. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    pub n: usize,
    /// For each v_j, the sorted list of adjacent u_i.
    pub adjacency: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// All edges as (u_index, v_index) pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (j, us) in self.adjacency.iter().enumerate() {
            for &i in us {
                out.push((i, j));
            }
        }
        out
    }
}

pub fn build_intersection_graph(inst: &SortInstance) -> IntersectionGraph {
    let adjacency = inst
        .v_domains
        .iter()
        .map(|vd| {
            inst.u_domains
                .iter()
                .enumerate()
                .filter(|(_, ud)| !ud.is_disjoint_from(vd))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    IntersectionGraph { n: inst.n, adjacency }
}

/// A partial injective map from V-indices to U-indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub assignment: Vec<Option<usize>>,
}

impl Matching {
    pub fn total(sigma: &[usize]) -> Self {
        Matching { assignment: sigma.iter().map(|&u| Some(u)).collect() }
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }
}

/// The Q-sets of a total matching: `Q_j = Dom(σ(v_j)) ∩ Dom(v_j)`, in V-order.
pub fn q_sets(inst: &SortInstance, m: &Matching) -> Result<Vec<IntegerSet>> {
    if m.assignment.len() != inst.n || !m.is_total() {
        return Err(Error::PartialMatching);
    }
    Ok(m.assignment
        .iter()
        .enumerate()
        .map(|(j, u)| inst.u_domains[u.unwrap()].intersect(&inst.v_domains[j]))
        .collect())
}

/// The weak chain condition: all Q-sets non-empty and consecutively related
/// by `<=_lex`. Strictly weaker than the existence of a nondecreasing system
/// of representatives.
pub fn weak_chain_holds(q: &[IntegerSet]) -> bool {
    if q.iter().any(IntegerSet::is_empty) {
        return false;
    }
    q.windows(2).all(|w| w[0].lex_leq(&w[1]).unwrap())
}

/// Greedy nondecreasing system of representatives: `δ_1 = min(Q_1)`,
/// `δ_j = least element of Q_j that is >= δ_{j-1}`. Returns the sequence when
/// every step succeeds. Greedy is optimal: it succeeds iff any nondecreasing
/// selection exists.
pub fn representatives(q: &[IntegerSet]) -> Option<Vec<i64>> {
    representatives_with_pins(q, &vec![None; q.len()])
}

/// Same as [`representatives`], with some positions forced to a given value.
pub fn representatives_with_pins(q: &[IntegerSet], pins: &[Option<i64>]) -> Option<Vec<i64>> {
    let mut out = Vec::with_capacity(q.len());
    let mut floor = i64::MIN;
    for (qi, pin) in q.iter().zip(pins) {
        let value = match pin {
            Some(v) => {
                if *v < floor || !qi.contains(*v) {
                    return None;
                }
                *v
            }
            None => qi.least_geq(floor.max(qi.min()?))?,
        };
        out.push(value);
        floor = value;
    }
    Some(out)
}

/// A complete support: a bijection σ: V → U, the value assigned to each
/// matched pair, and the induced permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportWitness {
    /// sigma[j] = U-index matched to v_{j+1} (0-based on both sides).
    pub sigma: Vec<usize>,
    /// values[j] = value assigned to v_{j+1} and to u_{sigma[j]+1}.
    pub values: Vec<i64>,
    /// perm[i] = 1-based position j in V with σ(v_j) = u_{i+1}.
    pub perm: Vec<usize>,
}

impl SupportWitness {
    /// Builds a witness from a total matching and values, deriving the
    /// permutation.
    pub fn new(sigma: Vec<usize>, values: Vec<i64>) -> Self {
        let mut perm = vec![0; sigma.len()];
        for (j, &u) in sigma.iter().enumerate() {
            perm[u] = j + 1;
        }
        SupportWitness { sigma, values, perm }
    }

    /// Renders the witness block emitted by the CLI.
    pub fn render(&self) -> String {
        let values: Vec<String> = self.values.iter().map(i64::to_string).collect();
        let perm: Vec<String> = self.perm.iter().map(usize::to_string).collect();
        format!("values: {}\nperm: {}\n", values.join(" "), perm.join(" "))
    }
}

/// Outcome of validating a witness against an instance. Violations are
/// reported, not thrown.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_witness(inst: &SortInstance, w: &SupportWitness) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = inst.n;
    if w.sigma.len() != n || w.values.len() != n {
        report.violations.push(format!(
            "witness arity mismatch: sigma {} values {} vs n {n}",
            w.sigma.len(),
            w.values.len()
        ));
        return report;
    }
    let mut seen = vec![false; n];
    for (j, &u) in w.sigma.iter().enumerate() {
        if u >= n {
            report.violations.push(format!("sigma(v_{}) = u_{} out of range", j + 1, u + 1));
            return report;
        }
        if seen[u] {
            report.violations.push(format!("sigma is not injective at u_{}", u + 1));
        }
        seen[u] = true;
    }
    for w2 in w.values.windows(2) {
        if w2[0] > w2[1] {
            report.violations.push(format!("values not nondecreasing: {} > {}", w2[0], w2[1]));
            break;
        }
    }
    for (j, (&u, &val)) in w.sigma.iter().zip(&w.values).enumerate() {
        if !inst.v_domains[j].contains(val) {
            report.violations.push(format!("value {val} of v_{} outside its domain", j + 1));
        }
        if !inst.u_domains[u].contains(val) {
            report
                .violations
                .push(format!("value {val} of u_{} (via v_{}) outside its domain", u + 1, j + 1));
        }
    }
    if let Some(p) = &inst.p_domains {
        if w.perm.len() != n {
            report.violations.push("perm arity mismatch".into());
        } else {
            for (i, &pos) in w.perm.iter().enumerate() {
                if !p[i].contains(pos as i64) {
                    report.violations.push(format!(
                        "perm value {pos} of p_{} outside its domain",
                        i + 1
                    ));
                }
            }
        }
    }
    if inst.stable {
        // equal U-values must keep their U-order in V
        for i in 0..n {
            for i2 in i + 1..n {
                let (ji, ji2) = (w.perm[i], w.perm[i2]);
                if w.values[ji - 1] == w.values[ji2 - 1] && ji > ji2 {
                    report.violations.push(format!(
                        "stability violated: u_{} and u_{} share value {} but appear as v_{} and v_{}",
                        i + 1,
                        i2 + 1,
                        w.values[ji - 1],
                        ji,
                        ji2
                    ));
                }
            }
        }
    }
    report
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "valid")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            Ok(())
        }
    }
}
