//! Inputs shared by the kernel benchmarks.

use pcsp_core::boolean::{Constraint, Instance};
use pcsp_core::threshold::{Form, LtfPresentation};

/// Weak presentation with weights 1..=n alternating in sign, threshold 0.
pub fn alternating_ltf(n: usize) -> LtfPresentation {
    let w: Vec<i64> = (1..=n as i64)
        .map(|i| if i % 2 == 0 { -i } else { i })
        .collect();
    LtfPresentation::from_ints(&w, 0, 1, Form::Weak)
}

/// Ternary instance on `n` variables whose constraints walk a cycle.
pub fn cyclic_instance(n: usize) -> Instance {
    let constraints = (0..n)
        .map(|i| Constraint {
            scope: vec![i + 1, (i + 1) % n + 1, (i + 2) % n + 1],
            relation: 0,
        })
        .collect();
    Instance::new(n, constraints).unwrap()
}
