//! Khovanov homology of closed braid and tangle diagrams.
//!
//! Every crossing has four ports `TL, TR, BL, BR`. For `σ_i` the
//! 0-resolution joins `TL–BL` and `TR–BR` (vertical); for `σ_i⁻¹` it joins
//! `TL–TR` and `BL–BR`. A generator is a state with `r` one-bits and a
//! `v±` label on each circle; with `p = #v₊ - #v₋` it sits in normalized
//! bidegree `(r, p + r)` and in the usual bidegree
//! `(r - n⁻, p + r + n⁺ - 2n⁻)`, with `n±` read off the oriented closure.
//! Edge maps are the merge/split maps of `Z[x]/(x²)` with `v₊ = 1`,
//! `v₋ = x`, signed by `(-1)^(ones before the flipped bit)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::bracket::BraidWord;
use crate::braid::{find_diagonals_after, InfiniteBraidSpec};
use crate::error::{Error, Result};
pub use crate::linalg::Coefficients;
use crate::linalg::{reduce, reduce_dense, SparseMatrix};
use crate::rewrite::{MixedTangle, ShiftLedger, Slice};
use crate::ring::LaurentPoly;
use crate::tl::{PlanarMatching, TLElement};
use crate::uf::UnionFind;

pub const DEFAULT_MAX_CROSSINGS: usize = 20;

const TL: usize = 0;
const TR: usize = 1;
const BL: usize = 2;
const BR: usize = 3;

/// How the `2n` endpoints of a braid box are joined outside the box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureSpec {
    /// Top endpoint `k` to bottom endpoint `k`, around the right.
    Trace,
    /// An arbitrary crossingless pairing of the boundary, in `TL_n`
    /// numbering (bottom `0..n`, top `n..2n`).
    Matched(PlanarMatching),
}

impl ClosureSpec {
    pub fn matching(&self, n: usize) -> Result<PlanarMatching> {
        match self {
            ClosureSpec::Trace => {
                let pairs: Vec<[usize; 2]> = (0..n).map(|k| [k, n + k]).collect();
                PlanarMatching::from_pairs(n, &pairs)
            }
            ClosureSpec::Matched(m) if m.n() == n => Ok(m.clone()),
            ClosureSpec::Matched(m) => Err(Error::StrandMismatch(m.n(), n)),
        }
    }

    /// Local maxima of the closing arcs: one per arc leaving the top edge.
    pub fn local_maxima(&self, n: usize) -> Result<usize> {
        let m = self.matching(n)?;
        Ok(m.pairs().iter().filter(|[a, b]| *a >= n || *b >= n).count())
    }
}

#[derive(Serialize, Deserialize)]
struct ClosureJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<[usize; 2]>>,
}

impl Serialize for ClosureSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ClosureSpec::Trace => ClosureJson { kind: "trace".into(), pairs: None }.serialize(s),
            ClosureSpec::Matched(m) => ClosureJson { kind: "matched".into(), pairs: Some(m.pairs()) }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ClosureSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ClosureJson::deserialize(d)?;
        match (raw.kind.as_str(), raw.pairs) {
            ("trace", _) => Ok(ClosureSpec::Trace),
            ("matched", Some(pairs)) => PlanarMatching::from_pairs(pairs.len(), &pairs)
                .map(ClosureSpec::Matched)
                .map_err(serde::de::Error::custom),
            (k, _) => Err(serde::de::Error::custom(format!("unknown closure `{k}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Cross { index: usize, positive: bool },
    Turn(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Crossing {
    /// `σ_i` rather than `σ_i⁻¹` in the braid picture.
    positive_letter: bool,
    /// Sign in the oriented closure.
    sign: i8,
}

/// A closed diagram: crossings with their ports, the arcs joining ports,
/// and closed loops that meet no crossing.
#[derive(Clone, Debug)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    partner: Vec<usize>,
    free_loops: usize,
}

impl LinkDiagram {
    pub fn from_word(w: &BraidWord, c: &ClosureSpec) -> Result<Self> {
        let pieces: Vec<Piece> =
            w.letters().iter().map(|l| Piece::Cross { index: l.index, positive: l.positive }).collect();
        Self::build(w.n(), &pieces, c)
    }

    pub fn from_tangle(t: &MixedTangle, c: &ClosureSpec) -> Result<Self> {
        let pieces: Vec<Piece> = t
            .slices
            .iter()
            .map(|s| match *s {
                Slice::Cross(i) => Piece::Cross { index: i, positive: true },
                Slice::Turnback(i) => Piece::Turn(i),
            })
            .collect();
        Self::build(t.n, &pieces, c)
    }

    fn build(n: usize, pieces: &[Piece], c: &ClosureSpec) -> Result<Self> {
        let closure = c.matching(n)?;
        let levels = pieces.len();
        let point = |k: usize, s: usize| k * n + s;
        let ports0 = (levels + 1) * n;
        let ncross = pieces.iter().filter(|p| matches!(p, Piece::Cross { .. })).count();
        let total = ports0 + 4 * ncross;
        let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); total];
        let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
            adj[a].push(b);
            adj[b].push(a);
        };
        let mut crossings = Vec::with_capacity(ncross);
        for (k, piece) in pieces.iter().enumerate() {
            let (i, is_cross) = match *piece {
                Piece::Cross { index, positive } => {
                    let base = ports0 + 4 * crossings.len();
                    link(point(k, index - 1), base + TL, &mut adj);
                    link(point(k, index), base + TR, &mut adj);
                    link(point(k + 1, index - 1), base + BL, &mut adj);
                    link(point(k + 1, index), base + BR, &mut adj);
                    crossings.push(Crossing { positive_letter: positive, sign: 0 });
                    (index, true)
                }
                Piece::Turn(index) => {
                    link(point(k, index - 1), point(k, index), &mut adj);
                    link(point(k + 1, index - 1), point(k + 1, index), &mut adj);
                    (index, false)
                }
            };
            if i == 0 || i >= n {
                return Err(Error::GeneratorIndex { n, index: i });
            }
            let _ = is_cross;
            for s in (0..n).filter(|&s| s + 1 != i && s != i) {
                link(point(k, s), point(k + 1, s), &mut adj);
            }
        }
        for [a, b] in closure.pairs() {
            let end = |p: usize| if p < n { point(levels, p) } else { point(0, p - n) };
            link(end(a), end(b), &mut adj);
        }
        // follow arcs from every port to the next port
        let mut partner = vec![usize::MAX; 4 * ncross];
        let mut seen = vec![false; total];
        for port in 0..4 * ncross {
            let start = ports0 + port;
            if partner[port] != usize::MAX {
                continue;
            }
            let (mut prev, mut cur) = (start, adj[start][0]);
            seen[start] = true;
            while cur < ports0 {
                seen[cur] = true;
                let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                prev = cur;
                cur = next;
            }
            seen[cur] = true;
            partner[port] = cur - ports0;
            partner[cur - ports0] = port;
        }
        let mut free_loops = 0;
        for p in 0..ports0 {
            if seen[p] {
                continue;
            }
            free_loops += 1;
            let (mut prev, mut cur) = (usize::MAX, p);
            while !seen[cur] {
                seen[cur] = true;
                let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
                prev = cur;
                cur = next;
            }
        }
        let mut d = Self { crossings, partner, free_loops };
        d.orient();
        Ok(d)
    }

    // Orients each component upward at the first crossing it meets and
    // records the resulting crossing signs.
    fn orient(&mut self) {
        let nc = self.crossings.len();
        // up[c][strand]: strand 0 runs TL–BR, strand 1 runs TR–BL
        let mut up: Vec<[Option<bool>; 2]> = vec![[None, None]; nc];
        let strand = |corner: usize| if corner == TL || corner == BR { 0 } else { 1 };
        for c in 0..nc {
            for s in 0..2 {
                if up[c][s].is_some() {
                    continue;
                }
                let mut entry = 4 * c + if s == 0 { BR } else { BL };
                loop {
                    let (cc, corner) = (entry / 4, entry % 4);
                    let st = strand(corner);
                    if up[cc][st].is_some() {
                        break;
                    }
                    up[cc][st] = Some(corner == BL || corner == BR);
                    let exit = 4 * cc + (3 - corner);
                    entry = self.partner[exit];
                }
            }
        }
        for (c, x) in self.crossings.iter_mut().enumerate() {
            let same = up[c][0] == up[c][1];
            x.sign = if same == x.positive_letter { 1 } else { -1 };
        }
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    /// Positive and negative crossings of the oriented diagram.
    pub fn signs(&self) -> (usize, usize) {
        let pos = self.crossings.iter().filter(|c| c.sign > 0).count();
        (pos, self.crossings.len() - pos)
    }

    fn vertical(&self, c: usize, state: u64) -> bool {
        let bit = (state >> c) & 1 == 1;
        bit != self.crossings[c].positive_letter
    }

    /// Circle id of every port in the resolution `state`, ids numbered by
    /// first port; free loops take the ids after those.
    fn circles(&self, state: u64) -> (Vec<u32>, usize) {
        let np = self.partner.len();
        let mut uf = UnionFind::new(np);
        for p in 0..np {
            uf.union(p, self.partner[p]);
        }
        for c in 0..self.crossings.len() {
            let b = 4 * c;
            if self.vertical(c, state) {
                uf.union(b + TL, b + BL);
                uf.union(b + TR, b + BR);
            } else {
                uf.union(b + TL, b + TR);
                uf.union(b + BL, b + BR);
            }
        }
        let mut id = vec![u32::MAX; np];
        let mut root_id: HashMap<usize, u32> = HashMap::new();
        for (p, slot) in id.iter_mut().enumerate() {
            let r = uf.find(p);
            let next = root_id.len() as u32;
            *slot = *root_id.entry(r).or_insert(next);
        }
        let count = root_id.len() + self.free_loops;
        (id, count)
    }

    pub fn circle_count(&self, state: u64) -> usize {
        self.circles(state).1
    }
}

/// `#°`: circles in the all-zero resolution.
pub fn all_zero_circles(d: &LinkDiagram) -> usize {
    d.circle_count(0)
}

struct Group {
    gens: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

impl Group {
    fn new() -> Self {
        Self { gens: Vec::new(), index: HashMap::new() }
    }

    fn push(&mut self, g: (u64, u64)) {
        self.index.insert(g, self.gens.len());
        self.gens.push(g);
    }
}

/// The cube complex in normalized bidegrees `(r, p + r)`, restricted to a
/// window of homological degrees.
pub struct ChainComplex {
    crossings: usize,
    n_plus: usize,
    n_minus: usize,
    degrees: RangeInclusive<usize>,
    groups: BTreeMap<(usize, i64), Group>,
    /// `d` from `(r, j)` to `(r + 1, j)`, rows indexed by the source.
    diffs: BTreeMap<(usize, i64), SparseMatrix>,
}

fn popcount(x: u64) -> usize {
    x.count_ones() as usize
}

impl ChainComplex {
    /// Builds every chain group with homological degree in `degrees`
    /// (normalized) and the differentials between them.
    pub fn build(d: &LinkDiagram, degrees: RangeInclusive<usize>, max_crossings: usize) -> Result<Self> {
        let c = d.crossing_count();
        if c > max_crossings || c >= 63 {
            return Err(Error::TooManyCrossings { crossings: c, limit: max_crossings });
        }
        let lo = *degrees.start();
        let hi = (*degrees.end()).min(c);
        let states: Vec<u64> = (0..1u64 << c).filter(|&s| (lo..=hi).contains(&popcount(s))).collect();
        let circles: HashMap<u64, (Vec<u32>, usize)> = states.par_iter().map(|&s| (s, d.circles(s))).collect();
        let mut groups: BTreeMap<(usize, i64), Group> = BTreeMap::new();
        for &s in &states {
            let r = popcount(s);
            let k = circles[&s].1;
            for labels in 0..1u64 << k {
                let j = 2 * popcount(labels) as i64 - k as i64 + r as i64;
                groups.entry((r, j)).or_insert_with(Group::new).push((s, labels));
            }
        }
        let keys: Vec<(usize, i64)> =
            groups.keys().copied().filter(|&(r, j)| groups.contains_key(&(r + 1, j))).collect();
        let diffs: BTreeMap<(usize, i64), SparseMatrix> = keys
            .par_iter()
            .map(|&(r, j)| {
                let src = &groups[&(r, j)];
                let dst = &groups[&(r + 1, j)];
                let mut m = SparseMatrix::new(src.gens.len(), dst.gens.len());
                for (row, &(s, labels)) in src.gens.iter().enumerate() {
                    for (t, sign, out) in edge_images(d, &circles, s, labels) {
                        let col = dst.index[&(t, out)];
                        m.push(row, col, sign);
                    }
                }
                m.finalize();
                ((r, j), m)
            })
            .collect();
        let (n_plus, n_minus) = d.signs();
        Ok(Self { crossings: c, n_plus, n_minus, degrees: lo..=hi, groups, diffs })
    }

    pub fn generator_count(&self) -> usize {
        self.groups.values().map(|g| g.gens.len()).sum()
    }

    /// `d ∘ d = 0` on every composable pair inside the window.
    pub fn d_squared_is_zero(&self) -> bool {
        self.diffs.iter().all(|(&(r, j), a)| self.diffs.get(&(r + 1, j)).is_none_or(|b| a.mul_is_zero(b)))
    }

    pub fn homology(&self, coeffs: Coefficients) -> BigradedHomology {
        self.homology_with(coeffs, true)
    }

    /// `reduced == false` skips the sparse unit-pivot pass.
    pub fn homology_with(&self, coeffs: Coefficients, reduced: bool) -> BigradedHomology {
        let ranks: HashMap<(usize, i64), crate::linalg::Reduction> = self
            .diffs
            .par_iter()
            .map(|(&k, m)| (k, if reduced { reduce(m, coeffs) } else { reduce_dense(m, coeffs) }))
            .collect();
        let lo = *self.degrees.start();
        let hi = *self.degrees.end();
        let mut entries = BTreeMap::new();
        for (&(r, j), g) in &self.groups {
            // the window edges lack one of the two neighbouring maps
            if (r == lo && lo > 0) || (r == hi && hi < self.crossings) {
                continue;
            }
            let out = ranks.get(&(r, j)).map_or(0, |x| x.rank);
            let (inc, torsion) = match (r > 0).then(|| ranks.get(&(r - 1, j))).flatten() {
                Some(x) => (x.rank, x.torsion.clone()),
                None => (0, Vec::new()),
            };
            let rank = g.gens.len() - out - inc;
            if rank > 0 || !torsion.is_empty() {
                entries
                    .insert((r as i64, j), HomologyEntry { rank, torsion: torsion.iter().map(big_to_u64).collect() });
            }
        }
        BigradedHomology { coefficients: coeffs, entries }
    }

    /// Shift from normalized to the usual bigrading.
    pub fn grading_shift(&self) -> (i64, i64) {
        let (p, m) = (self.n_plus as i64, self.n_minus as i64);
        (-m, p - 2 * m)
    }
}

fn big_to_u64(b: &BigInt) -> u64 {
    b.to_u64().expect("torsion coefficient fits in 64 bits")
}

// images of (s, labels) under every edge leaving s: (target, sign, labels)
fn edge_images(
    d: &LinkDiagram,
    circles: &HashMap<u64, (Vec<u32>, usize)>,
    s: u64,
    labels: u64,
) -> Vec<(u64, i64, u64)> {
    let (cs, ks) = &circles[&s];
    let sets_s = ks - d.free_loops;
    // representative port of every non-free circle of s
    let mut rep = vec![usize::MAX; sets_s];
    for (p, &c) in cs.iter().enumerate() {
        if rep[c as usize] == usize::MAX {
            rep[c as usize] = p;
        }
    }
    let mut out = Vec::new();
    for k in 0..d.crossing_count() {
        if (s >> k) & 1 == 1 {
            continue;
        }
        let t = s | (1 << k);
        let Some((ct, kt)) = circles.get(&t) else { continue };
        let sets_t = kt - d.free_loops;
        let sign = if popcount(s & ((1 << k) - 1)).is_multiple_of(2) { 1 } else { -1 };
        let base = 4 * k;
        let a = cs[base + TL] as usize;
        let b = if d.vertical(k, s) { cs[base + TR] } else { cs[base + BL] } as usize;
        // labels of untouched circles carried over
        let mut carried = 0u64;
        for x in 0..sets_s {
            if x != a && x != b && (labels >> x) & 1 == 1 {
                carried |= 1 << ct[rep[x]];
            }
        }
        for f in 0..d.free_loops {
            if (labels >> (sets_s + f)) & 1 == 1 {
                carried |= 1 << (sets_t + f);
            }
        }
        let (la, lb) = ((labels >> a) & 1 == 1, (labels >> b) & 1 == 1);
        if a != b {
            let m = ct[rep[a]];
            match (la, lb) {
                (true, true) => out.push((t, sign, carried | 1 << m)),
                (true, false) | (false, true) => out.push((t, sign, carried)),
                (false, false) => {}
            }
        } else {
            let (m1, m2) = (ct[base + TL], ct[base + BR]);
            if la {
                out.push((t, sign, carried | 1 << m1));
                out.push((t, sign, carried | 1 << m2));
            } else {
                out.push((t, sign, carried));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyEntry {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// Ranks (and integer torsion) indexed by `(i, j)`; only nonzero entries
/// are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedHomology {
    pub coefficients: Coefficients,
    pub entries: BTreeMap<(i64, i64), HomologyEntry>,
}

impl BigradedHomology {
    pub fn rank(&self, i: i64, j: i64) -> usize {
        self.entries.get(&(i, j)).map_or(0, |e| e.rank)
    }

    pub fn ranks(&self) -> BTreeMap<(i64, i64), usize> {
        self.entries.iter().filter(|(_, e)| e.rank > 0).map(|(&k, e)| (k, e.rank)).collect()
    }

    pub fn shifted(&self, di: i64, dj: i64) -> Self {
        Self {
            coefficients: self.coefficients,
            entries: self.entries.iter().map(|(&(i, j), e)| ((i + di, j + dj), e.clone())).collect(),
        }
    }

    /// `Σ (-1)^i rank(i, j) q^j`.
    pub fn euler_characteristic(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.entries.iter().map(|(&(i, j), e)| (j, if i % 2 == 0 { e.rank as i64 } else { -(e.rank as i64) })),
        )
    }
}

impl Serialize for BigradedHomology {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            i: i64,
            j: i64,
            rank: usize,
            torsion: &'a [u64],
        }
        let rows: Vec<Row<'_>> =
            self.entries.iter().map(|(&(i, j), e)| Row { i, j, rank: e.rank, torsion: &e.torsion }).collect();
        let mut st = s.serialize_struct("BigradedHomology", 2)?;
        st.serialize_field("coefficients", &self.coefficients)?;
        st.serialize_field("homology", &rows)?;
        st.end()
    }
}

impl fmt::Display for BigradedHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(i, j), e) in &self.entries {
            write!(f, "({i},{j}): {}", e.rank)?;
            if !e.torsion.is_empty() {
                let t: Vec<String> = e.torsion.iter().map(|x| format!("Z/{x}")).collect();
                write!(f, " + {}", t.join(" + "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Khovanov homology of the closure in the usual bigrading.
pub fn khovanov_homology(w: &BraidWord, c: &ClosureSpec, coeffs: Coefficients) -> Result<BigradedHomology> {
    let d = LinkDiagram::from_word(w, c)?;
    let cx = ChainComplex::build(&d, 0..=d.crossing_count(), DEFAULT_MAX_CROSSINGS)?;
    let (di, dj) = cx.grading_shift();
    Ok(cx.homology(coeffs).shifted(di, dj))
}

/// Homology in the normalized bigrading `(i + n⁻, j - N)`.
pub fn normalized_homology(w: &BraidWord, c: &ClosureSpec, coeffs: Coefficients) -> Result<BigradedHomology> {
    normalized_homology_upto(w, c, coeffs, None, DEFAULT_MAX_CROSSINGS)
}

/// Normalized homology for `i <= i_max` only, which needs the cube only up
/// to `i_max + 1` one-bits.
pub fn normalized_homology_upto(
    w: &BraidWord,
    c: &ClosureSpec,
    coeffs: Coefficients,
    i_max: Option<usize>,
    max_crossings: usize,
) -> Result<BigradedHomology> {
    let d = LinkDiagram::from_word(w, c)?;
    let top = i_max.map_or(d.crossing_count(), |m| m + 1);
    let cx = ChainComplex::build(&d, 0..=top, max_crossings)?;
    let mut h = cx.homology(coeffs);
    if let Some(m) = i_max {
        h.entries.retain(|&(i, _), _| i <= m as i64);
    }
    Ok(h)
}

/// Evaluates a `TL_n` element on a closure, each loop contributing
/// `q + q⁻¹`.
pub fn closure_value(x: &TLElement<LaurentPoly>, c: &ClosureSpec) -> Result<LaurentPoly> {
    let n = x.n();
    let cm = c.matching(n)?;
    let mut total = LaurentPoly::zero();
    for (m, coeff) in x.terms() {
        let mut uf = UnionFind::new(2 * n);
        for [a, b] in m.pairs().into_iter().chain(cm.pairs()) {
            uf.union(a, b);
        }
        total += &(coeff * &LaurentPoly::delta().pow(uf.count_sets() as u32));
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationRow {
    pub i: i64,
    pub j: i64,
    /// Rank at each prefix length `0..=L`.
    pub ranks: Vec<usize>,
    /// Smallest `ℓ*` with the rank constant on `ℓ* ..= L`.
    pub stable_from: usize,
    pub value: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationTable {
    pub spec: InfiniteBraidSpec,
    /// Diagonal count `y(ℓ)` for each prefix length.
    pub diagonals: Vec<usize>,
    pub rows: Vec<StabilizationRow>,
}

impl StabilizationTable {
    /// Entries constant over at least the last `window + 1` prefixes.
    pub fn stabilized(&self, len: usize, window: usize) -> BTreeMap<(i64, i64), usize> {
        self.rows.iter().filter(|r| r.stable_from + window <= len).map(|r| ((r.i, r.j), r.value)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationHomologyReport {
    pub closure: ClosureSpec,
    pub coefficients: Coefficients,
    pub len: usize,
    pub i_max: usize,
    pub window: usize,
    pub braid: StabilizationTable,
    pub torus: StabilizationTable,
    /// `(i, j, braid value, torus value)` where stabilized values differ
    /// or either side has not stabilized; `None` marks "not stabilized".
    pub mismatches: Vec<(i64, i64, Option<usize>, Option<usize>)>,
    pub matches: bool,
}

pub fn stabilization_table(
    spec: &InfiniteBraidSpec,
    c: &ClosureSpec,
    len: usize,
    i_max: usize,
    coeffs: Coefficients,
    max_crossings: usize,
) -> Result<StabilizationTable> {
    let per_len: Vec<Result<BTreeMap<(i64, i64), usize>>> = (0..=len)
        .into_par_iter()
        .map(|l| {
            let w = spec.prefix(l);
            Ok(normalized_homology_upto(&w, c, coeffs, Some(i_max), max_crossings)?.ranks())
        })
        .collect();
    let per_len: Vec<BTreeMap<(i64, i64), usize>> = per_len.into_iter().collect::<Result<_>>()?;
    let mut keys: Vec<(i64, i64)> = per_len.iter().flat_map(|m| m.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let rows = keys
        .into_iter()
        .map(|(i, j)| {
            let ranks: Vec<usize> = per_len.iter().map(|m| m.get(&(i, j)).copied().unwrap_or(0)).collect();
            let value = ranks[len];
            let stable_from = (0..=len).rev().take_while(|&l| ranks[l] == value).last().unwrap_or(len);
            StabilizationRow { i, j, ranks, stable_from, value }
        })
        .collect();
    let skip = spec.prefix_len();
    let diagonals =
        (0..=len).map(|l| find_diagonals_after(&spec.prefix(l), skip.min(l)).map(|d| d.y)).collect::<Result<_>>()?;
    Ok(StabilizationTable { spec: spec.clone(), diagonals, rows })
}

/// Per-`(i, j)` stabilization of normalized homology for prefixes of
/// `spec` and of its torus counterpart under the same closure, with a
/// side-by-side verdict. An entry counts as stabilized once it has been
/// constant for the last `window + 1` prefixes; entries that vanish
/// throughout the stabilized range on both sides are ignored.
pub fn stabilization_homology_report(
    spec: &InfiniteBraidSpec,
    c: &ClosureSpec,
    len: usize,
    i_max: usize,
    window: usize,
    coeffs: Coefficients,
    max_crossings: usize,
) -> Result<StabilizationHomologyReport> {
    let braid = stabilization_table(spec, c, len, i_max, coeffs, max_crossings)?;
    let torus = stabilization_table(&spec.torus_counterpart(), c, len, i_max, coeffs, max_crossings)?;
    let mismatches = compare_tables(&braid, &torus, len, window);
    Ok(StabilizationHomologyReport {
        closure: c.clone(),
        coefficients: coeffs,
        len,
        i_max,
        window,
        matches: mismatches.is_empty(),
        braid,
        torus,
        mismatches,
    })
}

fn compare_tables(
    a: &StabilizationTable,
    b: &StabilizationTable,
    len: usize,
    window: usize,
) -> Vec<(i64, i64, Option<usize>, Option<usize>)> {
    let sa = a.stabilized(len, window);
    let sb = b.stabilized(len, window);
    let mut keys: Vec<(i64, i64)> = a.rows.iter().chain(b.rows.iter()).map(|r| (r.i, r.j)).collect();
    keys.sort_unstable();
    keys.dedup();
    let stable_or_zero = |t: &StabilizationTable, s: &BTreeMap<(i64, i64), usize>, k: &(i64, i64)| {
        match s.get(k) {
            Some(&v) => Some(v),
            // absent rows are identically zero, hence stable
            None if !t.rows.iter().any(|r| (r.i, r.j) == *k) => Some(0),
            None => None,
        }
    };
    keys.into_iter()
        .filter_map(|k| {
            let (x, y) = (stable_or_zero(a, &sa, &k), stable_or_zero(b, &sb, &k));
            (x.is_none() || x != y).then_some((k.0, k.1, x, y))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MinqReport {
    /// Minimal q-degree over generators of the shifted complex.
    pub enumerated: i64,
    /// `1 + r' + s_q - #°` with `r' = r - 1` extra 1-resolutions.
    pub formula: i64,
    pub circles: usize,
    pub bound: i64,
    pub equal: bool,
    pub bound_holds: bool,
}

/// Compares the minimal q-degree of `h^{s_h} q^{r + s_q} KC(closure of t)`
/// (normalized) against the closed formula and the lower bound `y - c`,
/// where `c` counts the closure's local maxima.
pub fn minq_check(
    t: &MixedTangle,
    ledger: &ShiftLedger,
    c: &ClosureSpec,
    y: usize,
    max_crossings: usize,
) -> Result<MinqReport> {
    let d = LinkDiagram::from_tangle(t, c)?;
    let nc = d.crossing_count();
    if nc > max_crossings || nc >= 63 {
        return Err(Error::TooManyCrossings { crossings: nc, limit: max_crossings });
    }
    // the lowest generator of a state has every circle labelled v₋
    let min_gen = (0..1u64 << nc)
        .into_par_iter()
        .map(|s| popcount(s) as i64 - d.circle_count(s) as i64)
        .min()
        .expect("at least one state");
    let r = t.r as i64;
    let enumerated = r + ledger.s_q + min_gen;
    let circles = all_zero_circles(&d);
    let formula = 1 + (r - 1) + ledger.s_q - circles as i64;
    let bound = y as i64 - c.local_maxima(t.n)? as i64;
    Ok(MinqReport { enumerated, formula, circles, bound, equal: enumerated == formula, bound_holds: formula >= bound })
}
