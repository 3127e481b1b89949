//! Fixed inputs shared by the benchmarks in `benches/`.

use jwbraid::{BraidWord, InfiniteBraidSpec};

/// `(σ_1 σ_2)^k`, the torus braid whose closure is T(3, k).
pub fn torus3(k: usize) -> BraidWord {
    BraidWord::from_signed(3, &[1, 2].repeat(k)).expect("valid word")
}

/// The complete 3-strand periodic braid used in the stabilization runs.
pub fn complete3() -> InfiniteBraidSpec {
    InfiniteBraidSpec::periodic(3, &[1, 2, 2, 1, 2]).expect("valid spec")
}
