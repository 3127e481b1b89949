//! Multicone terms and the turnback-pulling simplification.
//!
//! A [`MixedTangle`] is a braid word in which some letters have been
//! replaced by turnbacks `e_i`. Pulling a turnback through the diagonals
//! removes crossings by Reidemeister moves. On the raw bracket, where every
//! crossing expands as `I - q·e_i`, the moves act as
//!
//! | move    | pattern (top to bottom)           | result         | raw factor |
//! |---------|-----------------------------------|----------------|------------|
//! | R1      | `e_i σ_i` or `σ_i e_i`            | `e_i`          | `-q²`      |
//! | R2      | `e_i σ_j σ_i` or `σ_i σ_j e_i`    | `e_i e_j` / `e_j e_i` | `-q` |
//! | R3      | `σ_i σ_j σ_i`                     | `σ_j σ_i σ_j`  | `1`        |
//! | zigzag  | `e_i e_j e_i`                     | `e_i`          | `1`        |
//!
//! with `|i - j| = 1`, all taken modulo far commutation. The factors give
//! the homological and q-shifts `(1, 2)` per R1 and `(1, 1)` per R2.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bracket::{letter_bracket, BraidWord, Letter};
use crate::braid::{find_diagonals, non_diagonal_positions, DiagonalSet};
use crate::error::{Error, Result};
use crate::ring::LaurentPoly;
use crate::tl::TLElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slice {
    Cross(usize),
    Turnback(usize),
}

impl Slice {
    pub fn index(self) -> usize {
        match self {
            Slice::Cross(i) | Slice::Turnback(i) => i,
        }
    }

    pub fn is_turnback(self) -> bool {
        matches!(self, Slice::Turnback(_))
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slice::Cross(i) => write!(f, "s{i}"),
            Slice::Turnback(i) => write!(f, "e{i}"),
        }
    }
}

/// Slices read top to bottom; `r` counts the 1-resolutions that produced
/// the tangle, including the turnback of the chosen crossing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedTangle {
    pub n: usize,
    pub slices: Vec<Slice>,
    pub r: usize,
}

impl MixedTangle {
    pub fn new(n: usize, slices: Vec<Slice>, r: usize) -> Result<Self> {
        if let Some(s) = slices.iter().find(|s| s.index() == 0 || s.index() >= n) {
            return Err(Error::GeneratorIndex { n, index: s.index() });
        }
        Ok(Self { n, slices, r })
    }

    pub fn crossings(&self) -> usize {
        self.slices.iter().filter(|s| !s.is_turnback()).count()
    }

    pub fn turnbacks(&self) -> usize {
        self.slices.len() - self.crossings()
    }

    /// The braid word formed by the crossing slices alone.
    pub fn crossing_word(&self) -> BraidWord {
        let letters = self.slices.iter().filter(|s| !s.is_turnback()).map(|s| Letter::pos(s.index())).collect();
        BraidWord::new(self.n, letters).expect("validated indices")
    }
}

impl fmt::Display for MixedTangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.slices.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}] r={}", s.join(" "), self.r)
    }
}

fn require_right_handed(w: &BraidWord) -> Result<()> {
    match w.letters().iter().position(|l| !l.positive) {
        Some(p) => Err(Error::NegativeLetter(p)),
        None => Ok(()),
    }
}

/// The `i`-th multicone term: counting non-diagonal letters from the bottom,
/// the first `i - 1` take their 0-resolution (deleted) and the `i`-th its
/// 1-resolution (a turnback). Everything else is untouched.
pub fn multicone_term(w: &BraidWord, d: &DiagonalSet, i: usize) -> Result<MixedTangle> {
    require_right_handed(w)?;
    let nd = non_diagonal_positions(w, d);
    if i == 0 || i > nd.len() {
        return Err(Error::MulticoneIndex { index: i, available: nd.len() });
    }
    let chosen = nd[nd.len() - i];
    let deleted = &nd[nd.len() - i + 1..];
    let slices = w
        .letters()
        .iter()
        .enumerate()
        .filter(|(p, _)| !deleted.contains(p))
        .map(|(p, l)| if p == chosen { Slice::Turnback(l.index) } else { Slice::Cross(l.index) })
        .collect();
    MixedTangle::new(w.n(), slices, 1)
}

/// The entries of the full multicone expansion: every resolution of the
/// non-diagonal crossings with at least one 1-resolution, leaving only
/// diagonal crossings and turnbacks. `r` is the number of 1-resolutions.
/// Entries are ordered by their resolution bits, bottommost crossing first.
pub fn multicone_entries(w: &BraidWord, d: &DiagonalSet, max_free: usize) -> Result<Vec<MixedTangle>> {
    require_right_handed(w)?;
    let nd = non_diagonal_positions(w, d);
    if nd.len() > max_free {
        return Err(Error::TooManyCrossings { crossings: nd.len(), limit: max_free });
    }
    let m = nd.len();
    let mut out = Vec::with_capacity((1usize << m).saturating_sub(1));
    for mask in 1u64..(1u64 << m) {
        let mut slices = Vec::with_capacity(w.len());
        for (p, l) in w.letters().iter().enumerate() {
            match nd.iter().position(|&f| f == p) {
                // bit 0 is the bottommost non-diagonal crossing
                Some(k) if mask & (1 << (m - 1 - k)) != 0 => slices.push(Slice::Turnback(l.index)),
                Some(_) => {}
                None => slices.push(Slice::Cross(l.index)),
            }
        }
        out.push(MixedTangle::new(w.n(), slices, mask.count_ones() as usize)?);
    }
    Ok(out)
}

fn slice_element(n: usize, s: Slice, raw: bool) -> TLElement<LaurentPoly> {
    match s {
        Slice::Turnback(i) => TLElement::generator(n, i).expect("validated index"),
        Slice::Cross(i) if raw => {
            let mut x = TLElement::identity(n);
            x.add_term(
                crate::tl::PlanarMatching::generator(n, i).expect("validated index"),
                LaurentPoly::monomial(-1, 1),
            );
            x
        }
        Slice::Cross(i) => letter_bracket(n, Letter::pos(i)).expect("validated index"),
    }
}

fn fold(t: &MixedTangle, raw: bool) -> TLElement<LaurentPoly> {
    let mut acc = TLElement::identity(t.n);
    for &s in &t.slices {
        acc = acc.mul(&slice_element(t.n, s, raw)).expect("same strand count");
    }
    acc
}

/// Kauffman bracket with `σ_i ↦ q·I - q²·e_i` and turnbacks as `e_i`.
pub fn mixed_bracket(t: &MixedTangle) -> TLElement<LaurentPoly> {
    fold(t, false)
}

/// Bracket with `σ_i ↦ I - q·e_i`; equals `q^{-#crossings}` times
/// [`mixed_bracket`].
pub fn raw_bracket(t: &MixedTangle) -> TLElement<LaurentPoly> {
    fold(t, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    R1,
    R2,
    R3,
    Zigzag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Down,
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub direction: Direction,
    /// Generator index of the turnback (or of the outer letters for R3).
    pub generator: usize,
    /// Slice position of the turnback before the move.
    pub slice: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftLedger {
    pub s_h: i64,
    pub s_q: i64,
    pub moves: Vec<MoveRecord>,
}

impl ShiftLedger {
    fn record(&mut self, m: MoveRecord) {
        let (h, q) = match m.kind {
            MoveKind::R1 => shift_of_moves(0, 1),
            MoveKind::R2 => shift_of_moves(1, 0),
            MoveKind::R3 | MoveKind::Zigzag => (0, 0),
        };
        self.s_h += h;
        self.s_q += q;
        self.moves.push(m);
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.moves.iter().filter(|m| m.kind == kind).count()
    }

    /// Totals recomputed from the move log.
    pub fn recomputed(&self) -> (i64, i64) {
        shift_of_moves(self.count(MoveKind::R2) as i64, self.count(MoveKind::R1) as i64)
    }

    pub fn is_consistent(&self) -> bool {
        self.recomputed() == (self.s_h, self.s_q)
    }
}

/// `(s_h, s_q)` for the given numbers of R2 and negative R1 moves.
pub fn shift_of_moves(r2: i64, r1neg: i64) -> (i64, i64) {
    (r2 + r1neg, r2 + 2 * r1neg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PullStrategy {
    /// Zone by zone: the bottommost turnback of the topmost non-empty zone
    /// is pulled down, later turnbacks follow, then turnbacks are pulled up
    /// starting from the topmost.
    #[default]
    Schedule,
    /// Any reducing move touching any turnback, in slice order.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Item {
    slice: Slice,
    id: u32,
}

fn dependent(a: Slice, b: Slice) -> bool {
    a.index().abs_diff(b.index()) < 2
}

/// Reorders `items` modulo far commutation so that the `chosen` positions
/// (ascending) become contiguous. Letters strictly between them that are
/// linked to an earlier chosen letter through a chain of non-commuting
/// letters move below the block; the rest move above. Returns the new order
/// and the start of the block, or `None` if a chosen letter is blocked.
fn gather(items: &[Item], chosen: &[usize]) -> Option<(Vec<Item>, usize)> {
    let first = chosen[0];
    let last = *chosen.last().unwrap();
    let mut pinned: Vec<usize> = vec![first];
    let mut below: Vec<usize> = Vec::new();
    let mut above: Vec<usize> = Vec::new();
    for p in first + 1..=last {
        let s = items[p].slice;
        if chosen.contains(&p) {
            if below.iter().any(|&x| dependent(items[x].slice, s)) {
                return None;
            }
            pinned.push(p);
        } else if pinned.iter().chain(below.iter()).any(|&x| dependent(items[x].slice, s)) {
            below.push(p);
        } else {
            above.push(p);
        }
    }
    let mut out = Vec::with_capacity(items.len());
    out.extend_from_slice(&items[..first]);
    out.extend(above.iter().map(|&p| items[p]));
    let start = out.len();
    out.extend(chosen.iter().map(|&p| items[p]));
    out.extend(below.iter().map(|&p| items[p]));
    out.extend_from_slice(&items[last + 1..]);
    Some((out, start))
}

struct Candidate {
    kind: MoveKind,
    chosen: Vec<usize>,
}

struct Engine {
    n: usize,
    items: Vec<Item>,
    next_id: u32,
    ledger: ShiftLedger,
    r3_budget: usize,
}

impl Engine {
    fn new(t: &MixedTangle) -> Self {
        let items: Vec<Item> = t.slices.iter().enumerate().map(|(k, &slice)| Item { slice, id: k as u32 }).collect();
        let len = items.len();
        Self { n: t.n, next_id: len as u32, items, ledger: ShiftLedger::default(), r3_budget: 8 * len * len + 64 }
    }

    fn position(&self, id: u32) -> Option<usize> {
        self.items.iter().position(|it| it.id == id)
    }

    // the nearest reducing move below the turnback at p
    fn find_down(items: &[Item], p: usize) -> Option<Candidate> {
        let Slice::Turnback(i) = items[p].slice else { return None };
        let mut best: Option<(usize, Candidate)> = None;
        let offer = |last: usize, c: Candidate, best: &mut Option<(usize, Candidate)>| {
            if best.as_ref().is_none_or(|(l, _)| last < *l) {
                *best = Some((last, c));
            }
        };
        for a in p + 1..items.len() {
            if best.as_ref().is_some_and(|(l, _)| a >= *l) {
                break;
            }
            match items[a].slice {
                Slice::Cross(j) if j == i => {
                    if gather(items, &[p, a]).is_some() {
                        offer(a, Candidate { kind: MoveKind::R1, chosen: vec![p, a] }, &mut best);
                    }
                }
                Slice::Cross(j) if j.abs_diff(i) == 1 => {
                    if let Some(b) = (a + 1..items.len())
                        .filter(|&b| items[b].slice == Slice::Cross(i))
                        .find(|&b| gather(items, &[p, a, b]).is_some())
                    {
                        offer(b, Candidate { kind: MoveKind::R2, chosen: vec![p, a, b] }, &mut best);
                    }
                }
                Slice::Turnback(j) if j.abs_diff(i) == 1 => {
                    if let Some(b) = (a + 1..items.len())
                        .filter(|&b| items[b].slice == Slice::Turnback(i))
                        .find(|&b| gather(items, &[p, a, b]).is_some())
                    {
                        offer(b, Candidate { kind: MoveKind::Zigzag, chosen: vec![p, a, b] }, &mut best);
                    }
                }
                _ => {}
            }
        }
        best.map(|(_, c)| c)
    }

    fn apply(&mut self, c: &Candidate) {
        let (mut items, start) = gather(&self.items, &c.chosen).expect("candidate is feasible");
        let head = items[start];
        let i = head.slice.index();
        let replacement = match c.kind {
            MoveKind::R1 | MoveKind::Zigzag => vec![head],
            MoveKind::R2 => {
                let j = items[start + 1].slice.index();
                let left = Item { slice: Slice::Turnback(i), id: self.next_id };
                self.next_id += 1;
                vec![left, Item { slice: Slice::Turnback(j), id: head.id }]
            }
            MoveKind::R3 => {
                let j = items[start + 1].slice.index();
                let ids: Vec<u32> = items[start..start + 3].iter().map(|it| it.id).collect();
                vec![
                    Item { slice: Slice::Cross(j), id: ids[0] },
                    Item { slice: Slice::Cross(i), id: ids[1] },
                    Item { slice: Slice::Cross(j), id: ids[2] },
                ]
            }
        };
        items.splice(start..start + c.chosen.len(), replacement);
        self.items = items;
    }

    fn reverse(&mut self) {
        self.items.reverse();
    }

    fn log(&mut self, kind: MoveKind, dir: Direction, generator: usize, p: usize) {
        let slice = match dir {
            Direction::Down => p,
            Direction::Up => self.items.len() - 1 - p,
        };
        self.ledger.record(MoveRecord { kind, direction: dir, generator, slice });
    }

    /// One downward step of turnback `id` in the current orientation,
    /// using a single R3 to unblock it if needed.
    fn step(&mut self, id: u32, dir: Direction) -> bool {
        let Some(p) = self.position(id) else { return false };
        let gen = self.items[p].slice.index();
        if let Some(c) = Self::find_down(&self.items, p) {
            self.log(c.kind, dir, gen, p);
            self.apply(&c);
            return true;
        }
        for a in p + 1..self.items.len() {
            let Slice::Cross(i) = self.items[a].slice else { continue };
            for b in a + 1..self.items.len() {
                let Slice::Cross(j) = self.items[b].slice else { continue };
                if j.abs_diff(i) != 1 {
                    continue;
                }
                for c in b + 1..self.items.len() {
                    if self.r3_budget == 0 {
                        return false;
                    }
                    if self.items[c].slice != Slice::Cross(i) || gather(&self.items, &[a, b, c]).is_none() {
                        continue;
                    }
                    self.r3_budget -= 1;
                    let saved = self.items.clone();
                    self.apply(&Candidate { kind: MoveKind::R3, chosen: vec![a, b, c] });
                    let p2 = self.position(id).expect("R3 keeps turnbacks");
                    if let Some(m) = Self::find_down(&self.items, p2) {
                        self.log(MoveKind::R3, dir, i, p);
                        self.log(m.kind, dir, gen, p2);
                        self.apply(&m);
                        return true;
                    }
                    self.items = saved;
                }
            }
        }
        false
    }

    fn pull(&mut self, id: u32, dir: Direction) {
        if dir == Direction::Up {
            self.reverse();
        }
        while self.step(id, dir) {}
        if dir == Direction::Up {
            self.reverse();
        }
    }

    fn turnback_ids(&self) -> Vec<u32> {
        self.items.iter().filter(|it| it.slice.is_turnback()).map(|it| it.id).collect()
    }

    fn greedy(&mut self) {
        loop {
            let before = self.ledger.moves.len();
            for id in self.turnback_ids() {
                self.pull(id, Direction::Down);
                self.pull(id, Direction::Up);
            }
            if self.ledger.moves.len() == before {
                break;
            }
        }
    }

    // zone of each turnback: diagonals of the crossing word lying entirely above it
    fn zones(&self) -> Vec<(u32, usize, usize)> {
        let cross_pos: Vec<usize> = (0..self.items.len()).filter(|&p| !self.items[p].slice.is_turnback()).collect();
        let word =
            BraidWord::new(self.n, cross_pos.iter().map(|&p| Letter::pos(self.items[p].slice.index())).collect())
                .expect("validated indices");
        let ends: Vec<usize> = crate::braid::find_diagonals(&word)
            .map(|d| d.diagonals.iter().map(|dg| cross_pos[*dg.last().unwrap()]).collect())
            .unwrap_or_default();
        (0..self.items.len())
            .filter(|&p| self.items[p].slice.is_turnback())
            .map(|p| (self.items[p].id, ends.iter().filter(|&&e| e < p).count(), p))
            .collect()
    }

    fn schedule(&mut self) {
        let mut order = self.zones();
        // topmost zone first, bottommost turnback first within a zone
        order.sort_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)));
        for &(id, _, _) in &order {
            self.pull(id, Direction::Down);
        }
        let mut up: Vec<(u32, usize)> =
            self.items.iter().enumerate().filter(|(_, it)| it.slice.is_turnback()).map(|(p, it)| (it.id, p)).collect();
        up.sort_by_key(|&(_, p)| p);
        for (id, _) in up {
            self.pull(id, Direction::Up);
        }
        self.greedy();
    }

    fn finish(self, r: usize) -> (MixedTangle, ShiftLedger) {
        let slices = self.items.iter().map(|it| it.slice).collect();
        (MixedTangle { n: self.n, slices, r }, self.ledger)
    }
}

/// Simplifies `t` by pulling its turnbacks through the diagonals with the
/// default schedule.
pub fn pull_turnbacks(t: &MixedTangle, y: usize) -> Result<(MixedTangle, ShiftLedger)> {
    pull_turnbacks_with(t, y, PullStrategy::Schedule)
}

pub fn pull_turnbacks_with(t: &MixedTangle, y: usize, strategy: PullStrategy) -> Result<(MixedTangle, ShiftLedger)> {
    if t.turnbacks() == 0 {
        return Err(Error::NoTurnback);
    }
    let mut engine = Engine::new(t);
    match strategy {
        PullStrategy::Schedule => engine.schedule(),
        PullStrategy::Greedy => engine.greedy(),
    }
    let (out, ledger) = engine.finish(t.r);
    if ledger.s_h < y as i64 {
        return Err(Error::ShiftBound { s_h: ledger.s_h, y });
    }
    Ok((out, ledger))
}

/// Checks `raw(input) = (-1)^{s_h} q^{s_q} raw(output)`, the diagram-level
/// bracket identity behind the ledger's shifts.
pub fn bracket_preserved(input: &MixedTangle, output: &MixedTangle, ledger: &ShiftLedger) -> bool {
    let sign = if ledger.s_h % 2 == 0 { 1 } else { -1 };
    raw_bracket(input) == raw_bracket(output).scale(&LaurentPoly::monomial(sign, ledger.s_q))
}

/// A multicone entry of a random right-handed word, with the diagonal
/// count of that word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusCase {
    pub n: usize,
    /// Signed letters of the source word.
    pub word: Vec<i64>,
    pub y: usize,
    pub entry: MixedTangle,
}

/// Seeded corpus of multicone entries: `words` random positive words with
/// `2 <= n <= max_n` strands and at most `max_len` letters, each having at
/// least one diagonal, and up to `per_word` entries sampled from each.
pub fn multicone_corpus(
    seed: u64,
    words: usize,
    max_n: usize,
    max_len: usize,
    per_word: usize,
) -> Result<Vec<CorpusCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut made = 0;
    while made < words {
        let n = rng.gen_range(2..=max_n.max(2));
        let len = rng.gen_range((n - 1).min(max_len)..=max_len);
        let letters: Vec<usize> = (0..len).map(|_| rng.gen_range(1..n)).collect();
        let w = BraidWord::positive(n, &letters)?;
        let d = find_diagonals(&w)?;
        let free = non_diagonal_positions(&w, &d).len();
        if d.y == 0 || free == 0 {
            continue;
        }
        made += 1;
        let mut entries = multicone_entries(&w, &d, 16)?;
        entries.shuffle(&mut rng);
        entries.truncate(per_word);
        let word: Vec<i64> = w.letters().iter().map(|l| l.signed()).collect();
        out.extend(entries.into_iter().map(|entry| CorpusCase { n, word: word.clone(), y: d.y, entry }));
    }
    Ok(out)
}
