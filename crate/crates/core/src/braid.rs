//! Infinite braid generators, their partial braids, and diagonals.
//!
//! A diagonal is a set of letters `σ_1, σ_2, ..., σ_{n-1}` at increasing
//! positions; each one plays the role of a fractional twist. Diagonals are
//! found by a forward scan for `σ_1`, then `σ_2` after it, and so on. An
//! upward back-scan from the diagonal's `σ_{n-1}` (each step taking the
//! nearest earlier `σ_k`) fixes where the next search for `σ_1` starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bracket::{BraidWord, Letter};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BraidKind {
    /// The base word repeated forever; every letter must be right-handed.
    Periodic { base: Vec<i64> },
    /// Letters drawn uniformly from `σ_1..σ_{n-1}` by ChaCha8 seeded with `seed`.
    Random { seed: u64 },
    /// Powers of `σ_1 σ_2 ... σ_{n-1}`.
    Torus,
}

/// A right-handed semi-infinite braid, optionally preceded by a finite word
/// of either handedness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteBraidSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prefix: Vec<i64>,
    #[serde(flatten)]
    pub kind: BraidKind,
}

impl InfiniteBraidSpec {
    pub fn periodic(n: usize, base: &[i64]) -> Result<Self> {
        Self { n, prefix: Vec::new(), kind: BraidKind::Periodic { base: base.to_vec() } }.validated()
    }

    pub fn random(n: usize, seed: u64) -> Result<Self> {
        Self { n, prefix: Vec::new(), kind: BraidKind::Random { seed } }.validated()
    }

    pub fn torus(n: usize) -> Result<Self> {
        Self { n, prefix: Vec::new(), kind: BraidKind::Torus }.validated()
    }

    pub fn with_prefix(mut self, prefix: &[i64]) -> Result<Self> {
        self.prefix = prefix.to_vec();
        self.validated()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s).map_err(|e| Error::Spec(e.to_string()))?;
        spec.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::Spec(format!("need at least 2 strands, got {}", self.n)));
        }
        BraidWord::from_signed(self.n, &self.prefix)?;
        if let BraidKind::Periodic { base } = &self.kind {
            if base.is_empty() {
                return Err(Error::Spec("periodic base is empty".into()));
            }
            if base.iter().any(|&k| k < 0) {
                return Err(Error::Spec("periodic base must be right-handed".into()));
            }
            BraidWord::from_signed(self.n, base)?;
        }
        Ok(self)
    }

    /// The spec with the same prefix and the torus tail.
    pub fn torus_counterpart(&self) -> Self {
        Self { n: self.n, prefix: self.prefix.clone(), kind: BraidKind::Torus }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    /// The first `len` letters.
    pub fn prefix(&self, len: usize) -> BraidWord {
        let mut out: Vec<i64> = self.prefix.iter().copied().take(len).collect();
        let tail = len - out.len();
        match &self.kind {
            BraidKind::Periodic { base } => out.extend(base.iter().copied().cycle().take(tail)),
            BraidKind::Torus => out.extend((1..self.n as i64).cycle().take(tail)),
            BraidKind::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                out.extend((0..tail).map(|_| rng.gen_range(1..self.n as i64)));
            }
        }
        BraidWord::from_signed(self.n, &out).expect("validated spec")
    }

    /// Whether every generator occurs infinitely often.
    pub fn is_complete(&self) -> bool {
        match &self.kind {
            BraidKind::Periodic { base } => (1..self.n as i64).all(|k| base.contains(&k)),
            BraidKind::Random { .. } | BraidKind::Torus => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalSet {
    /// Each diagonal lists the positions of its `σ_1, ..., σ_{n-1}`.
    pub diagonals: Vec<Vec<usize>>,
    pub y: usize,
    pub z: usize,
}

pub fn find_diagonals(w: &BraidWord) -> Result<DiagonalSet> {
    find_diagonals_after(w, 0)
}

/// Diagonals of `w` ignoring its first `skip` letters, which may have either
/// handedness; every later letter must be right-handed.
pub fn find_diagonals_after(w: &BraidWord, skip: usize) -> Result<DiagonalSet> {
    let n = w.n();
    let ls = w.letters();
    if let Some(p) = (skip..ls.len()).find(|&p| !ls[p].positive) {
        return Err(Error::NegativeLetter(p));
    }
    let mut diagonals = Vec::new();
    let mut start = skip;
    if n >= 2 {
        'scan: loop {
            let mut found = Vec::with_capacity(n - 1);
            let mut from = start;
            for k in 1..n {
                match (from..ls.len()).find(|&p| ls[p].index == k) {
                    Some(p) => {
                        found.push(p);
                        from = p + 1;
                    }
                    None => break 'scan,
                }
            }
            // back-scan from σ_{n-1}; the σ_1 it reaches is never before found[0]
            let mut b = found[n - 2];
            for k in (1..n - 1).rev() {
                b = (0..b).rev().find(|&p| ls[p].index == k).expect("found[k-1] lies below");
            }
            start = b + 1;
            diagonals.push(found);
        }
    }
    let y = diagonals.len();
    Ok(DiagonalSet { diagonals, y, z: if n == 0 { 0 } else { y / n } })
}

/// Positions outside every diagonal, in word order.
pub fn non_diagonal_positions(w: &BraidWord, d: &DiagonalSet) -> Vec<usize> {
    let mut used = vec![false; w.len()];
    for p in d.diagonals.iter().flatten() {
        used[*p] = true;
    }
    (0..w.len()).filter(|&p| !used[p]).collect()
}

/// `σ_k` occurs at each listed position, in order.
pub fn diagonal_letters_ok(w: &BraidWord, d: &DiagonalSet) -> bool {
    let ls = w.letters();
    let mut seen = vec![false; ls.len()];
    for diag in &d.diagonals {
        if diag.len() + 1 != w.n() || diag.windows(2).any(|p| p[0] >= p[1]) {
            return false;
        }
        for (k, &p) in diag.iter().enumerate() {
            if p >= ls.len() || ls[p] != Letter::pos(k + 1) || seen[p] {
                return false;
            }
            seen[p] = true;
        }
    }
    d.y == d.diagonals.len() && d.z == d.y / w.n()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn word(n: usize, ks: &[usize]) -> BraidWord {
        BraidWord::positive(n, ks).unwrap()
    }

    #[test]
    fn prefixes() {
        let t = InfiniteBraidSpec::torus(3).unwrap();
        assert_eq!(t.prefix(4), word(3, &[1, 2, 1, 2]));
        let p = InfiniteBraidSpec::periodic(3, &[1, 1, 2]).unwrap();
        assert_eq!(p.prefix(5), word(3, &[1, 1, 2, 1, 1]));
        let r = InfiniteBraidSpec::random(4, 7).unwrap();
        assert_eq!(r.prefix(10), r.prefix(10));
        assert_eq!(r.prefix(20).prefix(10), r.prefix(10));
        let neg = InfiniteBraidSpec::torus(2).unwrap().with_prefix(&[-1, -1]).unwrap();
        assert_eq!(neg.prefix(3), BraidWord::from_signed(2, &[-1, -1, 1]).unwrap());
        assert_eq!(neg.prefix(1), BraidWord::from_signed(2, &[-1]).unwrap());
    }

    #[test]
    fn completeness() {
        assert!(InfiniteBraidSpec::periodic(3, &[1, 2]).unwrap().is_complete());
        assert!(!InfiniteBraidSpec::periodic(3, &[1]).unwrap().is_complete());
        assert!(InfiniteBraidSpec::torus(5).unwrap().is_complete());
    }

    #[test]
    fn spec_json() {
        let s = InfiniteBraidSpec::from_json(r#"{"n":3,"kind":"periodic","base":[1,2,2,1,2]}"#).unwrap();
        assert_eq!(s, InfiniteBraidSpec::periodic(3, &[1, 2, 2, 1, 2]).unwrap());
        let r = InfiniteBraidSpec::from_json(r#"{"n":3,"kind":"random","seed":7}"#).unwrap();
        assert_eq!(r.kind, BraidKind::Random { seed: 7 });
        let t = InfiniteBraidSpec::from_json(r#"{"n":2,"kind":"torus","prefix":[-1]}"#).unwrap();
        assert_eq!(t.prefix, vec![-1]);
        assert!(InfiniteBraidSpec::from_json(r#"{"n":3,"kind":"periodic","base":[1,-2]}"#).is_err());
        assert!(InfiniteBraidSpec::from_json(r#"{"n":3,"kind":"periodic","base":[3]}"#).is_err());
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"n":2,"prefix":[-1],"kind":"torus"}"#);
    }

    #[test]
    fn diagonal_examples() {
        let d = find_diagonals(&word(3, &[1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2])).unwrap();
        assert_eq!((d.y, d.z), (6, 2));
        let w = word(3, &[1, 1, 2, 1, 2]);
        let d = find_diagonals(&w).unwrap();
        assert_eq!(d.diagonals, vec![vec![0, 2], vec![3, 4]]);
        assert_eq!((d.y, d.z), (2, 0));
        assert_eq!(non_diagonal_positions(&w, &d), vec![1]);
        let w = word(3, &[1, 1, 1]);
        let d = find_diagonals(&w).unwrap();
        assert_eq!(d.y, 0);
        assert_eq!(non_diagonal_positions(&w, &d), vec![0, 1, 2]);
        let w = word(3, &[1, 2, 1, 2]);
        assert!(non_diagonal_positions(&w, &find_diagonals(&w).unwrap()).is_empty());
    }

    #[test]
    fn negative_letters() {
        let w = BraidWord::from_signed(2, &[-1, 1, 1]).unwrap();
        assert_eq!(find_diagonals(&w), Err(Error::NegativeLetter(0)));
        let d = find_diagonals_after(&w, 1).unwrap();
        assert_eq!(d.diagonals, vec![vec![1], vec![2]]);
    }

    #[test]
    fn torus_counts() {
        for n in 2..=6 {
            let t = InfiniteBraidSpec::torus(n).unwrap();
            for k in 0..=8 {
                assert_eq!(find_diagonals(&t.prefix(k * (n - 1))).unwrap().y, k);
            }
        }
    }

    #[test]
    fn periodic_growth() {
        let s = InfiniteBraidSpec::periodic(3, &[1, 2, 2, 1, 2]).unwrap();
        let y = |l| find_diagonals(&s.prefix(l)).unwrap().y;
        assert!(y(15) >= 6);
        assert!(y(60) >= 2 * y(30) - 1);
    }

    fn complete_word() -> impl Strategy<Value = BraidWord> {
        (2usize..=6).prop_flat_map(|n| {
            prop::collection::vec(1..n, 0..40).prop_map(move |mut ks| {
                ks.extend(1..n);
                BraidWord::positive(n, &ks).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn diagonals_are_disjoint_and_ordered(w in complete_word()) {
            let d = find_diagonals(&w).unwrap();
            prop_assert!(diagonal_letters_ok(&w, &d));
            prop_assert!(d.y >= 1);
            for pair in d.diagonals.windows(2) {
                prop_assert!(pair[0][0] < pair[1][0]);
            }
        }

        #[test]
        fn diagonal_count_is_monotone(w in complete_word()) {
            let mut last = 0;
            for l in 0..=w.len() {
                let y = find_diagonals(&w.prefix(l)).unwrap().y;
                prop_assert!(y >= last);
                last = y;
            }
        }
    }
}
