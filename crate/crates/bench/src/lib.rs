//! Inputs for the solver benchmarks: one seeded instance per solver and size.

use groupid::harness::bench_instance;
use groupid::poly::SOLVERS;
use groupid::AttackInstance;

/// Society sizes every solver is measured at.
pub const SIZES: [usize; 3] = [25, 50, 100];

/// Seed shared by all benchmark inputs.
pub const SEED: u64 = 2024;

/// `(solver name, n, instance)` for every registered solver and size.
pub fn inputs() -> Vec<(&'static str, usize, AttackInstance)> {
    let mut out = Vec::new();
    for (name, _) in SOLVERS {
        for n in SIZES {
            let (_, inst) = bench_instance(name, n, SEED).unwrap_or_else(|e| panic!("{name} at n = {n}: {e}"));
            out.push((name, n, inst));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_solver_gets_every_size() {
        let inputs = inputs();
        assert_eq!(inputs.len(), SOLVERS.len() * SIZES.len());
        for (name, n, inst) in &inputs {
            assert_eq!(inst.n(), *n, "{name}");
        }
    }
}
