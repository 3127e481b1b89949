//! Jones-Wenzl projectors.
//!
//! `P_n` is built by the Wenzl recursion
//! `P_n = P' - ([n-1]/[n]) P' e_{n-1} P'` with `P' = P_{n-1} ⊗ 1`, then
//! checked against its defining axioms, which is where correctness is
//! established.

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;

use crate::bracket::Letter;
use crate::braid::{find_diagonals_after, InfiniteBraidSpec};
use crate::error::Result;
use crate::ring::{expand_series, quantum_int, LaurentPoly, RationalFunction, TruncatedSeries};
use crate::tl::{tl_basis, PlanarMatching, TLElement};

#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub n: usize,
    pub element: TLElement<RationalFunction>,
}

// P_1, P_2, ... filled in order; P_k lives at index k - 1
fn cache() -> &'static Mutex<Vec<Arc<Projector>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<Projector>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// The projector `P_n`, memoized; panics for `n == 0`.
pub fn jones_wenzl(n: usize) -> Arc<Projector> {
    assert!(n >= 1, "P_0 is not defined");
    let mut table = cache().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() < n {
        let k = table.len() + 1;
        let next = if k == 1 { Projector { n: 1, element: TLElement::identity(1) } } else { wenzl_step(&table[k - 2]) };
        table.push(Arc::new(next));
    }
    table[n - 1].clone()
}

fn wenzl_step(prev: &Projector) -> Projector {
    let n = prev.n + 1;
    let lifted = prev.element.embed_right();
    let e = TLElement::generator(n, n - 1).expect("n >= 2");
    let sandwich = lifted.mul(&e).and_then(|x| x.mul(&lifted)).expect("same strand count");
    let ratio = RationalFunction::new(quantum_int(n as i64 - 1).unwrap(), quantum_int(n as i64).unwrap())
        .expect("quantum integers are nonzero");
    let element = lifted.sub(&sandwich.scale(&ratio)).expect("same strand count");
    Projector { n, element }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AxiomReport {
    pub n: usize,
    pub idempotent: bool,
    /// Generators `i` with `e_i · P ≠ 0`.
    pub left_kill_failures: Vec<usize>,
    /// Generators `i` with `P · e_i ≠ 0`.
    pub right_kill_failures: Vec<usize>,
    pub identity_coeff_one: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.idempotent
            && self.left_kill_failures.is_empty()
            && self.right_kill_failures.is_empty()
            && self.identity_coeff_one
    }
}

pub fn verify_axioms(p: &Projector) -> AxiomReport {
    verify_element(&p.element)
}

/// Axiom check on an arbitrary element, so that non-projectors can serve as
/// negative controls.
pub fn verify_element(x: &TLElement<RationalFunction>) -> AxiomReport {
    let n = x.n();
    let square = x.mul(x).expect("same strand count");
    let mut left = Vec::new();
    let mut right = Vec::new();
    for i in 1..n {
        let e = TLElement::generator(n, i).expect("index in range");
        if !e.mul(x).expect("same strand count").is_zero() {
            left.push(i);
        }
        if !x.mul(&e).expect("same strand count").is_zero() {
            right.push(i);
        }
    }
    AxiomReport {
        n,
        idempotent: &square == x,
        left_kill_failures: left,
        right_kill_failures: right,
        identity_coeff_one: x.coeff(&PlanarMatching::identity(n)) == RationalFunction::one(),
    }
}

/// `P_n` with every coefficient expanded as a power series through `q^order`.
pub fn jw_series(n: usize, order: i64) -> Result<TLElement<TruncatedSeries>> {
    let p = jones_wenzl(n);
    let mut out = TLElement::zero(n);
    for (m, c) in p.element.terms() {
        out.add_term(m.clone(), expand_series(c, order)?);
    }
    Ok(out)
}

/// Prefixes must hold a coefficient for this many trailing lengths before
/// it counts as stabilized.
pub const DEFAULT_WINDOW: usize = 3;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CoefficientRecord {
    pub basis: String,
    pub exponent: i64,
    /// Smallest `ℓ` with the coefficient constant on `ℓ ..= L`.
    pub stable_from: usize,
    pub value: BigInt,
    pub target: BigInt,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    /// Some base generator never occurs, so no diagonals can form.
    Incomplete,
    NotConverged,
}

/// Coefficient-wise stabilization of normalized brackets of the prefixes
/// of a braid, against the power series of `P_n`.
#[derive(Clone, Debug, Serialize)]
pub struct BracketStabilization {
    pub spec: InfiniteBraidSpec,
    pub len: usize,
    pub degree: i64,
    pub window: usize,
    /// `(y, z)` for each prefix length `0..=L`.
    pub diagonals: Vec<(usize, usize)>,
    pub records: Vec<CoefficientRecord>,
    pub verdict: Verdict,
}

impl BracketStabilization {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Converged
    }
}

/// Tracks every coefficient of q-degree `<= degree` of the normalized
/// bracket over prefixes `0..=len`. The verdict is `Converged` when every
/// such coefficient has been constant for the last `window + 1` prefixes
/// and equals the matching coefficient of `P_n`.
pub fn bracket_stabilization(
    spec: &InfiniteBraidSpec,
    len: usize,
    degree: i64,
    window: usize,
) -> Result<BracketStabilization> {
    let n = spec.n;
    let target = jw_series(n, degree)?;
    let word = spec.prefix(len);
    let mut acc = TLElement::<LaurentPoly>::identity(n);
    let mut history = vec![acc.clone()];
    for &l in word.letters() {
        acc = acc.mul(&normalized_letter(n, l)?)?;
        history.push(acc.clone());
    }
    let skip = spec.prefix_len();
    let diagonals = (0..=len)
        .map(|l| find_diagonals_after(&word.prefix(l), skip.min(l)).map(|d| (d.y, d.z)))
        .collect::<Result<_>>()?;
    let lowest = history
        .iter()
        .flat_map(|x| x.terms().map(|(_, c)| c.min_exp().unwrap_or(0)).collect::<Vec<_>>())
        .min()
        .unwrap_or(0)
        .min(0);
    let mut records = Vec::new();
    for m in tl_basis(n) {
        let series = target.coeff(&m).to_poly();
        for e in lowest..=degree {
            let at = |l: usize| history[l].coeff(&m).coeff(e);
            let value = at(len);
            let stable_from = (0..=len).rev().take_while(|&l| at(l) == value).last().unwrap_or(len);
            records.push(CoefficientRecord {
                basis: m.to_string(),
                exponent: e,
                stable_from,
                value,
                target: series.coeff(e),
            });
        }
    }
    let ok = records.iter().all(|r| r.stable_from + window <= len && r.value == r.target);
    let verdict = match (ok, spec.is_complete()) {
        (true, _) => Verdict::Converged,
        (false, false) => Verdict::Incomplete,
        (false, true) => Verdict::NotConverged,
    };
    Ok(BracketStabilization { spec: spec.clone(), len, degree, window, diagonals, records, verdict })
}

// `(-1)^{n⁻} q^{-N}` distributes over letters: `I - q e_i` for `σ_i`,
// `e_i - q I` for `σ_i⁻¹`
fn normalized_letter(n: usize, l: Letter) -> Result<TLElement<LaurentPoly>> {
    let e = PlanarMatching::generator(n, l.index)?;
    let mut x = TLElement::zero(n);
    if l.positive {
        x.add_term(PlanarMatching::identity(n), LaurentPoly::one());
        x.add_term(e, LaurentPoly::monomial(-1, 1));
    } else {
        x.add_term(PlanarMatching::identity(n), LaurentPoly::monomial(-1, 1));
        x.add_term(e, LaurentPoly::one());
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{normalized_bracket, BraidWord};

    fn lp(t: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(t.iter().copied())
    }

    #[test]
    fn p1_and_p2() {
        assert_eq!(jones_wenzl(1).element, TLElement::identity(1));
        let p2 = jones_wenzl(2);
        let e = PlanarMatching::generator(2, 1).unwrap();
        let expected = -&RationalFunction::new(LaurentPoly::one(), LaurentPoly::delta()).unwrap();
        assert_eq!(p2.element.coeff(&e), expected);
        assert_eq!(p2.element.len(), 2);
    }

    // second hand recursion: e_1 coefficient of P_3 is -[2]/[3]
    #[test]
    fn p3_e1_coefficient() {
        let p3 = jones_wenzl(3);
        let e1 = PlanarMatching::generator(3, 1).unwrap();
        let expected = -&RationalFunction::new(quantum_int(2).unwrap(), quantum_int(3).unwrap()).unwrap();
        assert_eq!(p3.element.coeff(&e1), expected);
        assert_eq!(p3.element.len(), 5);
    }

    #[test]
    fn axioms_hold() {
        for n in 1..=4 {
            let r = verify_axioms(&jones_wenzl(n));
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn identity_is_not_a_projector() {
        let r = verify_element(&TLElement::identity(2));
        assert!(r.idempotent && r.identity_coeff_one);
        assert_eq!(r.left_kill_failures, vec![1]);
        assert!(!r.passed());
    }

    #[test]
    fn p2_series() {
        let s = jw_series(2, 7).unwrap();
        let e = PlanarMatching::generator(2, 1).unwrap();
        assert_eq!(s.coeff(&e).to_poly(), lp(&[(1, -1), (3, 1), (5, -1), (7, 1)]));
        assert_eq!(s.coeff(&PlanarMatching::identity(2)).to_poly(), LaurentPoly::one());
        assert_eq!(jw_series(1, 4).unwrap().len(), 1);
    }

    #[test]
    fn series_low_degrees() {
        for n in 1..=4 {
            let s = jw_series(n, 12).unwrap();
            for m in tl_basis(n) {
                let c = s.coeff(&m);
                if m.is_identity() {
                    assert_eq!(c.to_poly(), LaurentPoly::one());
                } else if let Some(lo) = c.min_exp() {
                    assert!(lo >= 1, "n={n} {m}: {c}");
                }
            }
        }
    }

    #[test]
    fn series_prefix_stable() {
        let a = jw_series(3, 8).unwrap();
        let b = jw_series(3, 14).unwrap();
        for m in tl_basis(3) {
            assert_eq!(a.coeff(&m).to_poly(), b.coeff(&m).to_poly().truncate_above(8));
        }
    }

    #[test]
    fn normalized_letters_fold_to_the_bracket() {
        let w = BraidWord::from_signed(3, &[1, -2, 2, 1, -1, 2]).unwrap();
        let mut acc = TLElement::identity(3);
        for &l in w.letters() {
            acc = acc.mul(&normalized_letter(3, l).unwrap()).unwrap();
        }
        assert_eq!(acc, normalized_bracket(&w));
    }

    #[test]
    fn two_strand_stabilization() {
        let r = bracket_stabilization(&InfiniteBraidSpec::torus(2).unwrap(), 20, 12, DEFAULT_WINDOW).unwrap();
        assert!(r.passed());
        // the q^{2k-1} coefficient of e_1 settles at length k + 1
        let e = PlanarMatching::generator(2, 1).unwrap().to_string();
        for k in 1..=6 {
            let rec = r.records.iter().find(|x| x.basis == e && x.exponent == 2 * k - 1).unwrap();
            assert!(rec.stable_from <= k as usize + 1, "{rec:?}");
        }
    }

    #[test]
    fn incomplete_braid_is_flagged() {
        let spec = InfiniteBraidSpec::periodic(3, &[1]).unwrap();
        assert_eq!(bracket_stabilization(&spec, 20, 6, DEFAULT_WINDOW).unwrap().verdict, Verdict::Incomplete);
    }
}
