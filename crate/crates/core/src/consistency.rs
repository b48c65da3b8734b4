//! Definition-level consistency checkers, built on the exact solver: a value
//! (or bound) is supported when the instance with that variable pinned still
//! has a support.
//!
//! Only the U- and V-variables are checked; pins on permutation variables are
//! outside the solver's pin surface.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::instance::SortInstance;
use crate::intervals::IntegerSet;
use crate::solver::{decide_support, Outcome, Pin, Side, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Domain,
    BoundsD,
    BoundsZ,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Domain => write!(f, "domain"),
            Level::BoundsD => write!(f, "boundsD"),
            Level::BoundsZ => write!(f, "boundsZ"),
        }
    }
}

/// One per-(variable, value) support check. `supported` is None when the
/// solver hit its node limit, leaving the check unknown.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConsistencyEntry {
    pub side: Side,
    /// 1-based variable index.
    pub index: usize,
    pub value: i64,
    pub supported: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub level: Level,
    pub entries: Vec<ConsistencyEntry>,
    /// True when every checked value/bound is supported.
    pub consistent: bool,
    /// True when some check was left unknown by the node limit.
    pub unknown: bool,
    /// Domain-consistency closure (domain level only); None when some domain
    /// prunes to empty or some check is unknown.
    pub pruned_instance: Option<SortInstance>,
    /// Supported values per variable at the domain level, U side then V side.
    pub pruned_u: Vec<IntegerSet>,
    pub pruned_v: Vec<IntegerSet>,
}

impl ConsistencyReport {
    fn from_entries(level: Level, entries: Vec<ConsistencyEntry>) -> Self {
        let consistent = entries.iter().all(|e| e.supported == Some(true));
        let unknown = entries.iter().any(|e| e.supported.is_none());
        ConsistencyReport {
            level,
            entries,
            consistent,
            unknown,
            pruned_instance: None,
            pruned_u: Vec::new(),
            pruned_v: Vec::new(),
        }
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "level={} consistent={}{}",
            self.level,
            self.consistent,
            if self.unknown { " (some checks unknown)" } else { "" }
        )?;
        for e in &self.entries {
            let side = match e.side {
                Side::U => "u",
                Side::V => "v",
            };
            let verdict = match e.supported {
                Some(true) => "supported",
                Some(false) => "unsupported",
                None => "unknown",
            };
            writeln!(f, "{side} {} = {}: {}", e.index, e.value, verdict)?;
        }
        Ok(())
    }
}

fn pinned_check(
    inst: &SortInstance,
    base: &SolveOptions,
    side: Side,
    index: usize,
    value: i64,
) -> Result<Option<bool>> {
    let mut opts = base.clone();
    opts.pins.push(Pin { side, index, value });
    let verdict = decide_support(inst, &opts)?;
    Ok(match verdict.outcome {
        Outcome::Yes(_) => Some(true),
        Outcome::No => Some(false),
        Outcome::Limit => None,
    })
}

/// Does some support assign `value` to the given variable? Errors when
/// `value` lies outside the variable's domain.
pub fn domain_consistent(
    inst: &SortInstance,
    base: &SolveOptions,
    side: Side,
    index: usize,
    value: i64,
) -> Result<Option<bool>> {
    pinned_check(inst, base, side, index, value)
}

/// Checks every value of every U- and V-variable and keeps exactly the
/// supported ones. One pass reaches the fixed point: supports are global, so
/// removing an unsupported value never changes any other check.
pub fn prune_domain_consistency(inst: &SortInstance, base: &SolveOptions) -> Result<ConsistencyReport> {
    let mut entries = Vec::new();
    let mut pruned = [Vec::new(), Vec::new()];
    for (side_idx, (side, doms)) in
        [(Side::U, &inst.u_domains), (Side::V, &inst.v_domains)].into_iter().enumerate()
    {
        for (i, dom) in doms.iter().enumerate() {
            let mut kept = Vec::new();
            for value in dom.iter() {
                let supported = pinned_check(inst, base, side, i, value)?;
                entries.push(ConsistencyEntry { side, index: i + 1, value, supported });
                if supported == Some(true) {
                    kept.push((value, value));
                }
            }
            pruned[side_idx].push(IntegerSet::normalize(&kept)?);
        }
    }
    let mut report = ConsistencyReport::from_entries(Level::Domain, entries);
    let [pruned_u, pruned_v] = pruned;
    if !report.unknown && pruned_u.iter().chain(&pruned_v).all(|d| !d.is_empty()) {
        report.pruned_instance = Some(SortInstance::new(
            pruned_u.clone(),
            pruned_v.clone(),
            inst.p_domains.clone(),
            inst.stable,
        )?);
    }
    report.pruned_u = pruned_u;
    report.pruned_v = pruned_v;
    Ok(report)
}

fn bounds_entries(
    inst: &SortInstance,
    relaxed: &SortInstance,
    base: &SolveOptions,
) -> Result<Vec<ConsistencyEntry>> {
    let mut entries = Vec::new();
    for (side, doms) in [(Side::U, &inst.u_domains), (Side::V, &inst.v_domains)] {
        for (i, dom) in doms.iter().enumerate() {
            let (inf, sup) = (dom.min().unwrap(), dom.max().unwrap());
            for value in if inf == sup { vec![inf] } else { vec![inf, sup] } {
                let supported = pinned_check(relaxed, base, side, i, value)?;
                entries.push(ConsistencyEntry { side, index: i + 1, value, supported });
            }
        }
    }
    Ok(entries)
}

/// Pins the minimum and maximum of each variable, with the other variables
/// ranging over their full domains.
pub fn bounds_d_consistent(inst: &SortInstance, base: &SolveOptions) -> Result<ConsistencyReport> {
    Ok(ConsistencyReport::from_entries(
        Level::BoundsD,
        bounds_entries(inst, inst, base)?,
    ))
}

/// Same as [`bounds_d_consistent`], but with every non-pinned domain relaxed
/// to its integer interval hull `[inf..sup]`.
pub fn bounds_z_consistent(inst: &SortInstance, base: &SolveOptions) -> Result<ConsistencyReport> {
    let relaxed = SortInstance::new(
        inst.u_domains.iter().map(IntegerSet::hull).collect(),
        inst.v_domains.iter().map(IntegerSet::hull).collect(),
        inst.p_domains.clone(),
        inst.stable,
    )?;
    Ok(ConsistencyReport::from_entries(
        Level::BoundsZ,
        bounds_entries(inst, &relaxed, base)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(i64, i64)]) -> IntegerSet {
        IntegerSet::normalize(pairs).unwrap()
    }

    fn inst2() -> SortInstance {
        SortInstance::new(
            vec![set(&[(1, 1), (3, 3)]), IntegerSet::singleton(2)],
            vec![set(&[(1, 2)]), set(&[(2, 3)])],
            None,
            false,
        )
        .unwrap()
    }

    #[test]
    fn domain_consistent_examples() {
        let base = SolveOptions::default();
        assert_eq!(
            domain_consistent(&inst2(), &base, Side::U, 0, 1).unwrap(),
            Some(true)
        );
        let no_support = SortInstance::new(
            vec![IntegerSet::singleton(5), IntegerSet::singleton(5)],
            vec![IntegerSet::singleton(5), IntegerSet::singleton(4)],
            None,
            false,
        )
        .unwrap();
        assert_eq!(
            domain_consistent(&no_support, &base, Side::U, 0, 5).unwrap(),
            Some(false)
        );
    }

    #[test]
    fn prune_keeps_only_supported_values() {
        // only matching is σ(v1) = u2, σ(v2) = u1: v_1 prunes to {1}
        let inst = SortInstance::new(
            vec![IntegerSet::singleton(2), IntegerSet::singleton(1)],
            vec![set(&[(1, 2)]), IntegerSet::singleton(2)],
            None,
            false,
        )
        .unwrap();
        let report = prune_domain_consistency(&inst, &SolveOptions::default()).unwrap();
        assert!(!report.consistent); // v_1 = 2 is unsupported
        assert_eq!(report.pruned_v[0], IntegerSet::singleton(1));
        let pruned = report.pruned_instance.unwrap();
        assert_eq!(pruned.v_domains[0], IntegerSet::singleton(1));
    }

    #[test]
    fn prune_unsat_instance_empties_domains() {
        let inst = SortInstance::new(
            vec![IntegerSet::singleton(5), IntegerSet::singleton(5)],
            vec![IntegerSet::singleton(5), IntegerSet::singleton(4)],
            None,
            false,
        )
        .unwrap();
        let report = prune_domain_consistency(&inst, &SolveOptions::default()).unwrap();
        assert!(!report.consistent);
        assert!(report.pruned_instance.is_none());
        assert!(report.pruned_u.iter().chain(&report.pruned_v).all(IntegerSet::is_empty));
    }

    #[test]
    fn bounds_d_consistent_example() {
        let report = bounds_d_consistent(&inst2(), &SolveOptions::default()).unwrap();
        assert!(report.consistent);
    }

    #[test]
    fn bounds_z_on_interval_domains_matches_bounds_d() {
        // domains already intervals: hulling is the identity
        let inst = SortInstance::new(
            vec![set(&[(1, 3)]), set(&[(2, 4)])],
            vec![set(&[(1, 2)]), set(&[(3, 4)])],
            None,
            false,
        )
        .unwrap();
        let d = bounds_d_consistent(&inst, &SolveOptions::default()).unwrap();
        let z = bounds_z_consistent(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(d.consistent, z.consistent);
        for (a, b) in d.entries.iter().zip(&z.entries) {
            assert_eq!(a.supported, b.supported);
        }
    }

    #[test]
    fn empty_intersection_instance_inconsistent_everywhere() {
        let inst = SortInstance::new(
            vec![IntegerSet::singleton(1)],
            vec![IntegerSet::singleton(2)],
            None,
            false,
        )
        .unwrap();
        for report in [
            bounds_d_consistent(&inst, &SolveOptions::default()).unwrap(),
            bounds_z_consistent(&inst, &SolveOptions::default()).unwrap(),
        ] {
            assert!(!report.consistent);
            assert!(report.entries.iter().all(|e| e.supported == Some(false)));
        }
    }
}
