//! Braid words and their Kauffman brackets in `TL_n`.
//!
//! A right-handed letter `σ_i` expands as `q·I - q²·e_i`; its vertical
//! smoothing is the 0-resolution. The left-handed letter `σ_i⁻¹` is the
//! same crossing turned a quarter turn and carries the opposite
//! orientation sign, so its 0-resolution is the turnback:
//! `⟨σ_i⁻¹⟩ = -q⁻²·e_i + q⁻¹·I`. With these two rules the bracket is
//! invariant under all braid relations without further shifts.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::LaurentPoly;
use crate::tl::{PlanarMatching, TLElement};

/// One braid generator: `σ_index` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub index: usize,
    pub positive: bool,
}

impl Letter {
    pub fn pos(index: usize) -> Self {
        Self { index, positive: true }
    }

    pub fn neg(index: usize) -> Self {
        Self { index, positive: false }
    }

    pub fn inverse(self) -> Self {
        Self { index: self.index, positive: !self.positive }
    }

    /// Signed integer form: `k` for `σ_k`, `-k` for `σ_k⁻¹`.
    pub fn signed(self) -> i64 {
        if self.positive {
            self.index as i64
        } else {
            -(self.index as i64)
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

/// A finite braid word on `n` strands, read top to bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    n: usize,
    letters: Vec<Letter>,
    n_minus: usize,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<Letter>) -> Result<Self> {
        if n == 0 {
            return Err(Error::StrandCount(n));
        }
        if let Some(l) = letters.iter().find(|l| l.index == 0 || l.index >= n) {
            return Err(Error::GeneratorIndex { n, index: l.index });
        }
        let n_minus = letters.iter().filter(|l| !l.positive).count();
        Ok(Self { n, letters, n_minus })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, letters: Vec::new(), n_minus: 0 }
    }

    /// All right-handed word from generator indices.
    pub fn positive(n: usize, indices: &[usize]) -> Result<Self> {
        Self::new(n, indices.iter().map(|&i| Letter::pos(i)).collect())
    }

    pub fn from_signed(n: usize, signed: &[i64]) -> Result<Self> {
        let letters = signed.iter().map(|&k| Letter { index: k.unsigned_abs() as usize, positive: k > 0 }).collect();
        Self::new(n, letters)
    }

    /// Parses whitespace- or comma-separated signed integers: `k` is `σ_k`,
    /// `-k` is `σ_k⁻¹`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for (position, tok) in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).enumerate()
        {
            let k: i64 =
                tok.parse().map_err(|_| Error::Parse { position, message: format!("`{tok}` is not an integer") })?;
            if k == 0 {
                return Err(Error::Parse { position, message: "generator 0 does not exist".into() });
            }
            let index = k.unsigned_abs() as usize;
            if index >= n {
                return Err(Error::Parse { position, message: format!("σ_{index} needs more than {n} strands") });
            }
            letters.push(Letter { index, positive: k > 0 });
        }
        Self::new(n, letters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn n_plus(&self) -> usize {
        self.letters.len() - self.n_minus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    /// `N = n⁺ - 2n⁻`.
    pub fn writhe_shift(&self) -> i64 {
        self.n_plus() as i64 - 2 * self.n_minus as i64
    }

    pub fn is_right_handed(&self) -> bool {
        self.n_minus == 0
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::StrandMismatch(self.n, other.n));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(self.n, letters)
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self::new(self.n, self.letters[..len.min(self.letters.len())].to_vec()).expect("prefix of a valid word")
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

pub fn letter_bracket(n: usize, letter: Letter) -> Result<TLElement<LaurentPoly>> {
    let id = PlanarMatching::identity(n);
    let e = PlanarMatching::generator(n, letter.index)?;
    let (ci, ce) = if letter.positive {
        (LaurentPoly::q_pow(1), LaurentPoly::monomial(-1, 2))
    } else {
        (LaurentPoly::q_pow(-1), LaurentPoly::monomial(-1, -2))
    };
    let mut x = TLElement::from_matching(id, ci);
    x.add_term(e, ce);
    Ok(x)
}

/// Product of letter brackets in word order, folded left to right so the
/// intermediate state never exceeds the Catalan-sized basis.
pub fn bracket(w: &BraidWord) -> TLElement<LaurentPoly> {
    let mut acc = TLElement::identity(w.n);
    for &l in &w.letters {
        let lb = letter_bracket(w.n, l).expect("letters are validated");
        acc = acc.mul(&lb).expect("same strand count");
    }
    acc
}

/// `(-1)^{n⁻} q^{-N}` times the bracket: the Euler characteristic of the
/// renormalized Khovanov complex.
pub fn normalized_bracket(w: &BraidWord) -> TLElement<LaurentPoly> {
    let sign = if w.n_minus.is_multiple_of(2) { 1 } else { -1 };
    bracket(w).scale(&LaurentPoly::monomial(sign, -w.writhe_shift()))
}

/// Applies one randomly chosen braid relation (braid relation, far
/// commutation, or cancelling pair) to `w`, returning the rewritten word
/// and a short description of the move.
pub fn random_relation_move(w: &BraidWord, rng: &mut impl Rng) -> (BraidWord, String) {
    let n = w.n;
    let ls = &w.letters;
    let mut candidates: Vec<(usize, u8)> = Vec::new();
    for p in 0..ls.len() {
        if p + 1 < ls.len() {
            if ls[p].index.abs_diff(ls[p + 1].index) >= 2 {
                candidates.push((p, 0));
            }
            if ls[p + 1] == ls[p].inverse() {
                candidates.push((p, 1));
            }
        }
        if p + 2 < ls.len() {
            let (a, b, c) = (ls[p], ls[p + 1], ls[p + 2]);
            if a == c && a.positive == b.positive && a.index.abs_diff(b.index) == 1 {
                candidates.push((p, 2));
            }
        }
    }
    let insert = n >= 2 && (candidates.is_empty() || rng.gen_bool(0.25));
    let mut out = ls.clone();
    let desc = if insert {
        let i = rng.gen_range(1..n);
        let l = if rng.gen_bool(0.5) { Letter::pos(i) } else { Letter::neg(i) };
        let p = rng.gen_range(0..=ls.len());
        out.splice(p..p, [l, l.inverse()]);
        format!("insert {} {} at {}", l, l.inverse(), p)
    } else if candidates.is_empty() {
        return (w.clone(), "no move".into());
    } else {
        let (p, kind) = candidates[rng.gen_range(0..candidates.len())];
        match kind {
            0 => {
                out.swap(p, p + 1);
                format!("commute at {p}")
            }
            1 => {
                out.drain(p..p + 2);
                format!("cancel at {p}")
            }
            _ => {
                let (a, b) = (out[p], out[p + 1]);
                out[p] = b;
                out[p + 1] = a;
                out[p + 2] = b;
                format!("braid relation at {p}")
            }
        }
    };
    (BraidWord::new(n, out).expect("moves preserve validity"), desc)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCounterexample {
    pub before: String,
    pub after: String,
    pub mov: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BraidRelationReport {
    pub n: usize,
    pub trials: usize,
    pub failures: Vec<RelationCounterexample>,
}

impl BraidRelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random words with random relation moves; the bracket must not change.
pub fn check_braid_relations(n: usize, trials: usize, seed: u64) -> BraidRelationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let len = rng.gen_range(0..=8);
        let letters = (0..len).map(|_| Letter { index: rng.gen_range(1..n), positive: rng.gen_bool(0.7) }).collect();
        let w = BraidWord::new(n, letters).expect("indices in range");
        let (v, mov) = random_relation_move(&w, &mut rng);
        if bracket(&w) != bracket(&v) {
            failures.push(RelationCounterexample { before: w.to_string(), after: v.to_string(), mov });
        }
    }
    BraidRelationReport { n, trials, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(t: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(t.iter().copied())
    }

    fn elem(n: usize, id: &[(i64, i64)], e1: &[(i64, i64)]) -> TLElement<LaurentPoly> {
        let mut x = TLElement::from_matching(PlanarMatching::identity(n), lp(id));
        x.add_term(PlanarMatching::generator(n, 1).unwrap(), lp(e1));
        x
    }

    #[test]
    fn letter_rules() {
        assert_eq!(letter_bracket(2, Letter::pos(1)).unwrap(), elem(2, &[(1, 1)], &[(2, -1)]));
        assert_eq!(letter_bracket(2, Letter::neg(1)).unwrap(), elem(2, &[(-1, 1)], &[(-2, -1)]));
        let prod = letter_bracket(2, Letter::pos(1)).unwrap().mul(&letter_bracket(2, Letter::neg(1)).unwrap()).unwrap();
        assert_eq!(prod, TLElement::identity(2));
        assert!(letter_bracket(2, Letter::pos(2)).is_err());
    }

    #[test]
    fn small_brackets() {
        let s1 = BraidWord::positive(2, &[1]).unwrap();
        assert_eq!(bracket(&s1), elem(2, &[(1, 1)], &[(2, -1)]));
        let s11 = BraidWord::positive(2, &[1, 1]).unwrap();
        assert_eq!(bracket(&s11), elem(2, &[(2, 1)], &[(3, -1), (5, 1)]));
        assert_eq!(bracket(&BraidWord::empty(3)), TLElement::identity(3));
    }

    #[test]
    fn normalized_examples() {
        let s111 = BraidWord::positive(2, &[1, 1, 1]).unwrap();
        assert_eq!(normalized_bracket(&s111), elem(2, &[(0, 1)], &[(1, -1), (3, 1), (5, -1)]));
        let s11 = BraidWord::positive(2, &[1, 1]).unwrap();
        assert_eq!(normalized_bracket(&s11), elem(2, &[(0, 1)], &[(1, -1), (3, 1)]));
        assert_eq!(normalized_bracket(&BraidWord::empty(4)), TLElement::identity(4));
    }

    #[test]
    fn relations() {
        let a = BraidWord::positive(3, &[1, 2, 1]).unwrap();
        let b = BraidWord::positive(3, &[2, 1, 2]).unwrap();
        assert_eq!(bracket(&a), bracket(&b));
        let c = BraidWord::positive(4, &[1, 3]).unwrap();
        let d = BraidWord::positive(4, &[3, 1]).unwrap();
        assert_eq!(bracket(&c), bracket(&d));
        let inv = BraidWord::from_signed(2, &[1, -1]).unwrap();
        assert_eq!(bracket(&inv), TLElement::identity(2));
        let inv3 = BraidWord::from_signed(3, &[-1, -2, -1]).unwrap();
        let inv3b = BraidWord::from_signed(3, &[-2, -1, -2]).unwrap();
        assert_eq!(bracket(&inv3), bracket(&inv3b));
    }

    #[test]
    fn random_relation_report() {
        for n in 2..=5 {
            let r = check_braid_relations(n, 100, 11 + n as u64);
            assert!(r.passed(), "{:?}", r.failures);
        }
    }

    #[test]
    fn parses_words() {
        let w = BraidWord::parse(3, "1 2, -1").unwrap();
        assert_eq!(w.letters(), &[Letter::pos(1), Letter::pos(2), Letter::neg(1)]);
        assert_eq!((w.n_plus(), w.n_minus(), w.writhe_shift()), (2, 1, 0));
        assert!(BraidWord::parse(2, "").unwrap().is_empty());
        assert!(matches!(BraidWord::parse(3, "1 x"), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(BraidWord::parse(3, "1 3"), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(BraidWord::parse(3, "0"), Err(Error::Parse { position: 0, .. })));
    }

    #[test]
    fn right_handed_normalization_has_no_negative_powers() {
        let w = BraidWord::positive(3, &[1, 2, 2, 1, 2, 1, 1]).unwrap();
        for (m, c) in normalized_bracket(&w).terms() {
            if m.is_identity() {
                assert!(c.min_exp().unwrap() >= 0);
            } else {
                assert!(c.min_exp().unwrap() >= 1);
            }
        }
    }
}
