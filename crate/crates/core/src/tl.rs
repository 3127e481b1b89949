//! The Temperley-Lieb algebra `TL_n`.
//!
//! Boundary points of an `(n, n)` diagram are numbered `0..n` along the
//! bottom edge (left to right) and `n..2n` along the top edge (left to
//! right). The product `a * b` stacks `a` on top of `b`, gluing the bottom
//! of `a` to the top of `b`.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Coeff, LaurentPoly};
use crate::uf::UnionFind;

/// A crossingless `(n, n)` diagram, stored as the partner of each boundary point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarMatching {
    n: usize,
    partner: Vec<usize>,
}

/// Position of a boundary point when walking the rectangle boundary:
/// bottom left to right, then top right to left.
fn cyclic_pos(n: usize, p: usize) -> usize {
    if p < n {
        p
    } else {
        3 * n - 1 - p
    }
}

fn point_at(n: usize, c: usize) -> usize {
    if c < n {
        c
    } else {
        3 * n - 1 - c
    }
}

impl PlanarMatching {
    pub fn new(n: usize, partner: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::StrandCount(n));
        }
        if partner.len() != 2 * n {
            return Err(Error::Matching(format!("expected {} entries, got {}", 2 * n, partner.len())));
        }
        for (p, &q) in partner.iter().enumerate() {
            if q >= 2 * n || q == p || partner[q] != p {
                return Err(Error::Matching(format!("point {p} is not matched involutively")));
            }
        }
        // non-crossing iff the pairs nest when read around the boundary
        let mut stack = Vec::new();
        for c in 0..2 * n {
            let other = cyclic_pos(n, partner[point_at(n, c)]);
            if other > c {
                stack.push(c);
            } else if stack.pop() != Some(other) {
                return Err(Error::Matching("pairs cross".into()));
            }
        }
        Ok(Self { n, partner })
    }

    pub fn from_pairs(n: usize, pairs: &[[usize; 2]]) -> Result<Self> {
        let mut partner = vec![usize::MAX; 2 * n];
        for &[a, b] in pairs {
            if a >= 2 * n || b >= 2 * n || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::Matching(format!("bad pair [{a}, {b}]")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Self::new(n, partner)
    }

    pub fn identity(n: usize) -> Self {
        let partner = (0..2 * n).map(|p| if p < n { p + n } else { p - n }).collect();
        Self { n, partner }
    }

    /// The turnback `e_i`, `1 <= i <= n - 1`.
    pub fn generator(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::GeneratorIndex { n, index: i });
        }
        let mut m = Self::identity(n);
        let (b0, b1, t0, t1) = (i - 1, i, n + i - 1, n + i);
        m.partner[b0] = b1;
        m.partner[b1] = b0;
        m.partner[t0] = t1;
        m.partner[t1] = t0;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partner(&self, p: usize) -> usize {
        self.partner[p]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|k| self.partner[k] == k + self.n)
    }

    /// Sorted `[min, max]` pairs; the canonical serialization.
    pub fn pairs(&self) -> Vec<[usize; 2]> {
        (0..2 * self.n).filter(|&p| p < self.partner[p]).map(|p| [p, self.partner[p]]).collect()
    }

    /// Number of strands running from bottom to top.
    pub fn through_strands(&self) -> usize {
        (0..self.n).filter(|&k| self.partner[k] >= self.n).count()
    }

    /// Adds a vertical strand on the right, embedding `TL_n` into `TL_{n+1}`.
    pub fn embed_right(&self) -> Self {
        let n = self.n;
        let lift = |p: usize| if p < n { p } else { p + 1 };
        let mut partner = vec![0; 2 * n + 2];
        for p in 0..2 * n {
            partner[lift(p)] = lift(self.partner[p]);
        }
        partner[n] = 2 * n + 1;
        partner[2 * n + 1] = n;
        Self { n: n + 1, partner }
    }
}

/// Stacks `a` on top of `b`; returns the resulting matching and the number
/// of closed circles formed in the gluing region.
pub fn compose(a: &PlanarMatching, b: &PlanarMatching) -> Result<(PlanarMatching, usize)> {
    if a.n != b.n {
        return Err(Error::StrandMismatch(a.n, b.n));
    }
    let n = a.n;
    // nodes 0..2n are a's points, 2n..4n are b's
    let mut uf = UnionFind::new(4 * n);
    for p in 0..2 * n {
        uf.union(p, a.partner[p]);
        uf.union(2 * n + p, 2 * n + b.partner[p]);
    }
    for k in 0..n {
        uf.union(k, 3 * n + k);
    }
    // result bottom k is b's bottom k, result top n+k is a's top n+k
    let node = |p: usize| if p < n { 2 * n + p } else { p };
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for p in 0..2 * n {
        by_root.entry(uf.find(node(p))).or_default().push(p);
    }
    let mut partner = vec![0; 2 * n];
    for pts in by_root.values() {
        debug_assert_eq!(pts.len(), 2);
        partner[pts[0]] = pts[1];
        partner[pts[1]] = pts[0];
    }
    let circles = uf.count_sets() - n;
    Ok((PlanarMatching { n, partner }, circles))
}

/// All crossingless `(n, n)` diagrams, in canonical (sorted) order.
pub fn tl_basis(n: usize) -> Vec<PlanarMatching> {
    fn rec(lo: usize, hi: usize, out: &mut Vec<Vec<(usize, usize)>>) {
        // perfect non-crossing matchings of the cyclic interval lo..hi
        if lo >= hi {
            out.push(Vec::new());
            return;
        }
        let mut j = lo + 1;
        while j < hi {
            let mut inner = Vec::new();
            rec(lo + 1, j, &mut inner);
            let mut outer = Vec::new();
            rec(j + 1, hi, &mut outer);
            for i in &inner {
                for o in &outer {
                    let mut v = vec![(lo, j)];
                    v.extend_from_slice(i);
                    v.extend_from_slice(o);
                    out.push(v);
                }
            }
            j += 2;
        }
    }
    if n == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    rec(0, 2 * n, &mut raw);
    let mut basis: Vec<PlanarMatching> = raw
        .into_iter()
        .map(|pairs| {
            let mut partner = vec![0; 2 * n];
            for (x, y) in pairs {
                let (p, q) = (point_at(n, x), point_at(n, y));
                partner[p] = q;
                partner[q] = p;
            }
            PlanarMatching { n, partner }
        })
        .collect();
    basis.sort();
    basis
}

impl fmt::Display for PlanarMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I_{}", self.n);
        }
        let pairs: Vec<String> = self.pairs().iter().map(|[a, b]| format!("{a}-{b}")).collect();
        write!(f, "[{}]", pairs.join(" "))
    }
}

impl fmt::Debug for PlanarMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for PlanarMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

/// A formal linear combination of crossingless diagrams in `TL_n`.
#[derive(Clone, PartialEq)]
pub struct TLElement<R> {
    n: usize,
    terms: BTreeMap<PlanarMatching, R>,
}

impl<R: Coeff> TLElement<R> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn from_matching(m: PlanarMatching, coeff: R) -> Self {
        let mut x = Self::zero(m.n);
        x.add_term(m, coeff);
        x
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matching(PlanarMatching::identity(n), R::one())
    }

    pub fn generator(n: usize, i: usize) -> Result<Self> {
        Ok(Self::from_matching(PlanarMatching::generator(n, i)?, R::one()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PlanarMatching, &R)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: PlanarMatching, coeff: R) {
        assert_eq!(m.n, self.n, "matching has wrong strand count");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn coeff_of(&self, m: &PlanarMatching) -> Option<&R> {
        self.terms.get(m)
    }

    /// The coefficient of `m`, zero when absent.
    pub fn coeff(&self, m: &PlanarMatching) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::StrandMismatch(self.n, rhs.n));
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&R::one().neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero(self.n);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul(c));
        }
        out
    }

    /// Bilinear extension of [`compose`]; each closed circle contributes a
    /// factor `q + q^{-1}`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::StrandMismatch(self.n, rhs.n));
        }
        let delta = LaurentPoly::delta();
        let mut delta_pows: Vec<R> = vec![R::one()];
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let (m, circles) = compose(ma, mb)?;
                while delta_pows.len() <= circles {
                    let next = delta_pows.last().unwrap().mul(&R::from_laurent(&delta));
                    delta_pows.push(next);
                }
                let mut c = ca.mul(cb);
                if circles > 0 {
                    c = c.mul(&delta_pows[circles]);
                }
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<S: Coeff>(&self, f: impl Fn(&R) -> S) -> TLElement<S> {
        let mut out = TLElement::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Adds a vertical strand on the right of every diagram.
    pub fn embed_right(&self) -> Self {
        let mut out = Self::zero(self.n + 1);
        for (m, c) in &self.terms {
            out.add_term(m.embed_right(), c.clone());
        }
        out
    }
}

pub fn tl_mul<R: Coeff>(x: &TLElement<R>, y: &TLElement<R>) -> Result<TLElement<R>> {
    x.mul(y)
}

pub fn coeff_of<R: Coeff>(x: &TLElement<R>, m: &PlanarMatching) -> R {
    x.coeff(m)
}

impl<R: Coeff> fmt::Display for TLElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: Coeff> fmt::Debug for TLElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TLElement({self})")
    }
}

#[derive(Serialize)]
struct TermRef<'a, R> {
    matching: &'a PlanarMatching,
    coeff: &'a R,
}

impl<R: Coeff> Serialize for TLElement<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms: Vec<(Vec<[usize; 2]>, TermRef<'_, R>)> =
            self.terms.iter().map(|(matching, coeff)| (matching.pairs(), TermRef { matching, coeff })).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let terms: Vec<TermRef<'_, R>> = terms.into_iter().map(|(_, t)| t).collect();
        let mut st = s.serialize_struct("TLElement", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawTerm {
    matching: Vec<[usize; 2]>,
    coeff: LaurentPoly,
}

#[derive(Deserialize)]
struct RawElement {
    n: usize,
    terms: Vec<RawTerm>,
}

impl TLElement<LaurentPoly> {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawElement =
            serde_json::from_str(s).map_err(|e| Error::Parse { position: 0, message: e.to_string() })?;
        let mut x = Self::zero(raw.n);
        for t in raw.terms {
            x.add_term(PlanarMatching::from_pairs(raw.n, &t.matching)?, t.coeff);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::LaurentPoly as P;

    fn e(n: usize, i: usize) -> PlanarMatching {
        PlanarMatching::generator(n, i).unwrap()
    }

    fn el(n: usize, i: usize) -> TLElement<P> {
        TLElement::generator(n, i).unwrap()
    }

    #[test]
    fn identity_pairs() {
        assert_eq!(PlanarMatching::identity(1).pairs(), vec![[0, 1]]);
        assert_eq!(PlanarMatching::identity(2).pairs(), vec![[0, 2], [1, 3]]);
    }

    #[test]
    fn generator_pairs() {
        assert_eq!(e(2, 1).pairs(), vec![[0, 1], [2, 3]]);
        assert_eq!(e(3, 2).pairs(), vec![[0, 3], [1, 2], [4, 5]]);
        for n in 2..6 {
            for i in 1..n {
                assert_ne!(e(n, i), PlanarMatching::identity(n));
            }
        }
        assert!(PlanarMatching::generator(3, 3).is_err());
        assert!(PlanarMatching::generator(3, 0).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&e(2, 1), &e(2, 1)).unwrap(), (e(2, 1), 1));
        let (m12, c1) = compose(&e(3, 1), &e(3, 2)).unwrap();
        let (m121, c2) = compose(&m12, &e(3, 1)).unwrap();
        assert_eq!((m121, c1 + c2), (e(3, 1), 0));
        for m in tl_basis(4) {
            assert_eq!(compose(&PlanarMatching::identity(4), &m).unwrap(), (m.clone(), 0));
            assert_eq!(compose(&m, &PlanarMatching::identity(4)).unwrap(), (m, 0));
        }
        assert!(compose(&e(2, 1), &e(3, 1)).is_err());
    }

    #[test]
    fn circle_relation() {
        let x = el(2, 1).mul(&el(2, 1)).unwrap();
        assert_eq!(x, TLElement::from_matching(e(2, 1), P::delta()));
        let y = el(3, 1).mul(&el(3, 2)).unwrap().mul(&el(3, 1)).unwrap();
        assert_eq!(y, el(3, 1));
        let id = TLElement::<P>::identity(3);
        assert_eq!(id.mul(&y).unwrap(), y);
    }

    #[test]
    fn far_commutation() {
        assert_eq!(el(4, 1).mul(&el(4, 3)).unwrap(), el(4, 3).mul(&el(4, 1)).unwrap());
    }

    #[test]
    fn catalan_counts() {
        let catalan = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for n in 1..=8 {
            let b = tl_basis(n);
            assert_eq!(b.len(), catalan[n]);
            for m in &b {
                assert!(PlanarMatching::new(n, m.partner.clone()).is_ok());
            }
        }
    }

    #[test]
    fn rejects_crossing_pairs() {
        assert!(PlanarMatching::from_pairs(2, &[[0, 2], [1, 3]]).unwrap().is_identity());
        assert!(PlanarMatching::from_pairs(2, &[[0, 1], [2, 3]]).is_ok());
        // bottom 0 to top 1 and bottom 1 to top 0 is a crossing
        assert!(PlanarMatching::from_pairs(2, &[[0, 3], [1, 2]]).is_err());
        assert!(PlanarMatching::from_pairs(3, &[[0, 4], [1, 3], [2, 5]]).is_err());
    }

    #[test]
    fn coefficient_lookup() {
        let x = TLElement::from_matching(PlanarMatching::identity(2), P::q_pow(1))
            .add(&TLElement::from_matching(e(2, 1), P::monomial(-1, 2)))
            .unwrap();
        assert_eq!(coeff_of(&x, &e(2, 1)), P::monomial(-1, 2));
        assert_eq!(coeff_of(&el(2, 1), &PlanarMatching::identity(2)), P::from_terms::<_, i64>([]));
    }

    #[test]
    fn json_round_trip() {
        let x = TLElement::from_matching(PlanarMatching::identity(2), P::q_pow(1))
            .add(&TLElement::from_matching(e(2, 1), P::monomial(-1, 2)))
            .unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"terms":[{"matching":[[0,1],[2,3]],"coeff":{"2":"-1"}},{"matching":[[0,2],[1,3]],"coeff":{"1":"1"}}]}"#
        );
        assert_eq!(TLElement::from_json(&s).unwrap(), x);
    }
}
