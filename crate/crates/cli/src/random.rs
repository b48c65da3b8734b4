//! Seeded random 3-clause formulas for round-trip verification. Unused
//! variables are compacted away so every generated formula reduces cleanly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sortsupport::CnfFormula;

pub fn formulas(vars: usize, clauses: usize, count: usize, seed: u64) -> Vec<CnfFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| formula(vars.max(1), clauses.max(1), &mut rng)).collect()
}

fn formula(vars: usize, clauses: usize, rng: &mut ChaCha8Rng) -> CnfFormula {
    let raw: Vec<[i64; 3]> = (0..clauses)
        .map(|_| {
            [0; 3].map(|_| {
                let var = rng.gen_range(1..=vars as i64);
                if rng.gen() {
                    var
                } else {
                    -var
                }
            })
        })
        .collect();
    // compact variable indices so every variable occurs
    let mut remap = vec![0i64; vars + 1];
    let mut next = 0;
    for clause in &raw {
        for &lit in clause {
            let v = lit.unsigned_abs() as usize;
            if remap[v] == 0 {
                next += 1;
                remap[v] = next;
            }
        }
    }
    let clauses = raw
        .iter()
        .map(|c| c.map(|lit| remap[lit.unsigned_abs() as usize] * lit.signum()))
        .collect();
    CnfFormula::new(next as usize, clauses).unwrap()
}
