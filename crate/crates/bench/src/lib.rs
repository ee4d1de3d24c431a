//! Benchmark fixtures shared by the criterion targets.

use edi_core::synth::{gen_boundary, gen_sweep, BoundaryCase, Family, SweepSpec};
use edi_core::Representation;

/// Fully disentangled discrete layout.
pub fn boundary(n: usize) -> Representation {
    gen_boundary(&BoundaryCase::new("111"), n, 11).expect("case 111 always generates")
}

/// Continuous noisy codes, k = d = 3.
pub fn noisy(n: usize) -> Representation {
    let mut spec = SweepSpec::new(Family::Noise, 0.3, 11);
    spec.n = n;
    gen_sweep(&spec).expect("noise sweep always generates")
}
