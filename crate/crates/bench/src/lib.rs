//! Fixtures shared by the criterion benches.

use subsum::{Caps, FieldParams, Result, SumGraph};

/// Builds the graph on `F_{p^m}^n` under default caps.
pub fn fixture(n: usize, p: u32, m: u32) -> Result<SumGraph> {
    SumGraph::build(&FieldParams::new(p, m)?, n, &Caps::default())
}
