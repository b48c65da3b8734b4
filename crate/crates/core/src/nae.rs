//! NAE-3SAT input handling: DIMACS parsing, occurrence balancing and a
//! brute-force satisfiability oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signed literal: positive `j` for `x_j`, negative for its negation.
/// Indices are 1-based, as in DIMACS.
pub type Literal = i64;

/// A CNF formula whose clauses all have exactly three literals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
    /// Indices of clauses that came from 1-literal input clauses. Such a
    /// clause normalizes to three copies of the literal and can never be
    /// not-all-equal, so it forces NAE-unsatisfiability.
    pub unit_clauses: Vec<usize>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        let f = CnfFormula { num_vars, clauses, unit_clauses: Vec::new() };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        for clause in &self.clauses {
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > self.num_vars {
                    return Err(Error::Parse(format!("literal {lit} out of range")));
                }
            }
        }
        Ok(())
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// (positive, negative) occurrence counts per variable, 1-based access
    /// via `counts[var - 1]`.
    pub fn occurrence_counts(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.num_vars];
        for clause in &self.clauses {
            for &lit in clause {
                let var = lit.unsigned_abs() as usize - 1;
                if lit > 0 {
                    counts[var].0 += 1;
                } else {
                    counts[var].1 += 1;
                }
            }
        }
        counts
    }

    /// True when every variable has as many positive as negative occurrences.
    pub fn is_balanced(&self) -> bool {
        self.occurrence_counts().iter().all(|&(p, n)| p == n)
    }

    /// Renders the formula in DIMACS CNF.
    pub fn render_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", clause[0], clause[1], clause[2]));
        }
        out
    }
}

/// A total truth assignment for `x_1..x_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn truth(&self, lit: Literal) -> bool {
        let v = self.values[lit.unsigned_abs() as usize - 1];
        if lit > 0 {
            v
        } else {
            !v
        }
    }

    pub fn complement(&self) -> Assignment {
        Assignment { values: self.values.iter().map(|b| !b).collect() }
    }
}

/// Parses DIMACS CNF. Comment lines (`c …`) are ignored. Clauses with two
/// literals are padded by duplicating the last literal, which preserves
/// NAE-satisfiability ({a,b,b} is not-all-equal iff a ≠ b iff {a,b} is).
/// One-literal clauses are retained (padded to three copies) and flagged.
/// Clauses with more than three literals are rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut tokens: Vec<i64> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse("duplicate DIMACS header".into()));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["p", "cnf", vars, clauses] => {
                    let vars = vars
                        .parse()
                        .map_err(|_| Error::Parse("bad variable count in header".into()))?;
                    let clauses = clauses
                        .parse()
                        .map_err(|_| Error::Parse("bad clause count in header".into()))?;
                    header = Some((vars, clauses));
                }
                _ => return Err(Error::Parse(format!("malformed header `{line}`"))),
            }
            continue;
        }
        for tok in line.split_whitespace() {
            tokens.push(
                tok.parse().map_err(|_| Error::Parse(format!("bad literal `{tok}`")))?,
            );
        }
    }
    let (num_vars, num_clauses) = header.ok_or_else(|| Error::Parse("missing header".into()))?;
    let mut clauses = Vec::new();
    let mut unit_clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for lit in tokens {
        if lit == 0 {
            let clause = match current.as_slice() {
                [] => return Err(Error::Parse("empty clause".into())),
                &[a] => {
                    unit_clauses.push(clauses.len());
                    [a, a, a]
                }
                &[a, b] => [a, b, b],
                &[a, b, c] => [a, b, c],
                more => {
                    return Err(Error::Parse(format!(
                        "clause with {} literals (at most 3 allowed)",
                        more.len()
                    )))
                }
            };
            clauses.push(clause);
            current.clear();
        } else {
            current.push(lit);
        }
    }
    if !current.is_empty() {
        return Err(Error::Parse("unterminated clause".into()));
    }
    if clauses.len() != num_clauses {
        return Err(Error::Parse(format!(
            "header announces {num_clauses} clauses but {} found",
            clauses.len()
        )));
    }
    let mut f = CnfFormula::new(num_vars, clauses)?;
    f.unit_clauses = unit_clauses;
    Ok(f)
}

/// Equalizes positive and negative occurrence counts for every variable by
/// appending padding clauses `(x ∨ x̄ ∨ x̄)` or `(x ∨ x ∨ x̄)`. Each padding
/// clause shifts one variable's imbalance by one and is NAE-satisfied under
/// every assignment. Padding is appended in ascending variable order, so the
/// result is deterministic. Variables with zero occurrences stay untouched.
pub fn balance_occurrences(f: &CnfFormula) -> CnfFormula {
    let mut out = f.clone();
    for (idx, &(pos, neg)) in f.occurrence_counts().iter().enumerate() {
        let var = (idx + 1) as i64;
        for _ in 0..pos.saturating_sub(neg) {
            out.clauses.push([var, -var, -var]);
        }
        for _ in 0..neg.saturating_sub(pos) {
            out.clauses.push([var, var, -var]);
        }
    }
    out
}

/// True iff every clause has at least one true and one false literal under `a`.
pub fn nae_check(f: &CnfFormula, a: &Assignment) -> bool {
    f.clauses.iter().all(|clause| {
        let truths = clause.map(|lit| a.truth(lit));
        truths.contains(&true) && truths.contains(&false)
    })
}

/// First NAE-satisfying assignment in lexicographic order over truth vectors
/// (false < true, `x_1` most significant), or None. Guarded to p <= 24.
pub fn nae_brute_force(f: &CnfFormula) -> Result<Option<Assignment>> {
    if f.num_vars > 24 {
        return Err(Error::FormulaTooLarge(f.num_vars));
    }
    let p = f.num_vars as u32;
    for bits in 0u64..(1u64 << p) {
        let a = Assignment {
            values: (0..p).map(|i| bits >> (p - 1 - i) & 1 == 1).collect(),
        };
        if nae_check(f, &a) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}
