//! Exact ranks and Smith invariants of sparse integer matrices.
//!
//! The fast path pivots on `±1` entries, which is unimodular and therefore
//! preserves the rank over every coefficient ring and the Smith invariants
//! over the integers. What is left is handled densely with big integers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    /// The rationals.
    Q,
    /// The field with two elements.
    Z2,
    /// The integers; torsion is reported.
    Z,
}

impl std::str::FromStr for Coefficients {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "q" | "rational" | "rationals" => Ok(Coefficients::Q),
            "z2" | "f2" => Ok(Coefficients::Z2),
            "z" | "integer" | "integers" => Ok(Coefficients::Z),
            other => Err(format!("unknown coefficients `{other}` (expected q, z2 or z)")),
        }
    }
}

/// A sparse integer matrix stored by rows; each row is sorted by column.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub cols: usize,
    pub data: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { cols, data: vec![Vec::new(); rows] }
    }

    /// Adds `v` at `(r, c)`; rows must be finalized with [`Self::finalize`].
    pub fn push(&mut self, r: usize, c: usize, v: i64) {
        self.data[r].push((c, v));
    }

    pub fn finalize(&mut self) {
        for row in &mut self.data {
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *row = merged;
        }
    }

    /// Whether `self · other` vanishes; used for `d² = 0` checks.
    pub fn mul_is_zero(&self, other: &SparseMatrix) -> bool {
        // (self: a x b) (other: b x c)
        for row in &self.data {
            let mut acc: std::collections::HashMap<usize, i64> = std::collections::HashMap::new();
            for &(k, v) in row {
                for &(c, w) in &other.data[k] {
                    *acc.entry(c).or_insert(0) += v * w;
                }
            }
            if acc.values().any(|&x| x != 0) {
                return false;
            }
        }
        true
    }
}

/// Rank and, over the integers, the non-unit Smith invariants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reduction {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

fn row_sub(target: &[(usize, i64)], pivot: &[(usize, i64)], f: i64, modulus: Option<i64>) -> Option<Vec<(usize, i64)>> {
    // target - f * pivot
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    let norm = |x: i64| match modulus {
        Some(m) => x.rem_euclid(m),
        None => x,
    };
    while a < target.len() || b < pivot.len() {
        let ca = target.get(a).map_or(usize::MAX, |e| e.0);
        let cb = pivot.get(b).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(target[a]);
            a += 1;
        } else if cb < ca {
            let v = norm(pivot[b].1.checked_mul(f)?.checked_neg()?);
            if v != 0 {
                out.push((cb, v));
            }
            b += 1;
        } else {
            let v = norm(target[a].1.checked_sub(pivot[b].1.checked_mul(f)?)?);
            if v != 0 {
                out.push((ca, v));
            }
            a += 1;
            b += 1;
        }
    }
    Some(out)
}

/// Eliminates unit pivots; returns the number eliminated and the residual
/// rows, or `None` on `i64` overflow.
///
/// Pivots follow a Markowitz-style rule: take the sparsest row or column
/// (whichever is shorter) and the unit entry in it whose partner line is
/// shortest. Row lists of columns are maintained lazily and may hold stale
/// or duplicate rows until visited.
fn eliminate_units(m: &SparseMatrix, modulus: Option<i64>) -> Option<(usize, Vec<Vec<(usize, i64)>>)> {
    let mut rows: Vec<Vec<(usize, i64)>> = m
        .data
        .iter()
        .map(|r| match modulus {
            Some(p) => r.iter().map(|&(c, v)| (c, v.rem_euclid(p))).filter(|e| e.1 != 0).collect(),
            None => r.clone(),
        })
        .collect();
    let mut alive: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c].push(r);
        }
    }
    let is_unit = |v: i64| v == 1 || v == -1 || modulus.is_some();
    let entry = |row: &[(usize, i64)], c: usize| row.binary_search_by_key(&c, |e| e.0).ok().map(|k| row[k].1);
    let mut col_heap: BinaryHeap<Reverse<(usize, usize)>> =
        col_rows.iter().enumerate().filter(|(_, l)| !l.is_empty()).map(|(c, l)| Reverse((l.len(), c))).collect();
    let mut row_heap: BinaryHeap<Reverse<(usize, usize)>> =
        rows.iter().enumerate().filter(|(_, r)| !r.is_empty()).map(|(r, x)| Reverse((x.len(), r))).collect();
    // columns already found to hold no unit; retried after they change
    let mut stuck = vec![false; m.cols];
    let mut rank = 0;
    loop {
        // drop stale heads
        while let Some(&Reverse((len, r))) = row_heap.peek() {
            if alive[r] && rows[r].len() == len {
                break;
            }
            row_heap.pop();
        }
        while let Some(&Reverse((count, c))) = col_heap.peek() {
            if count == col_rows[c].len() && !stuck[c] {
                break;
            }
            col_heap.pop();
        }
        let row_head = row_heap.peek().map(|h| h.0);
        let col_head = col_heap.peek().map(|h| h.0);
        let (pr, c) = match (row_head, col_head) {
            (None, None) => break,
            (Some((len, r)), col) if col.is_none_or(|(count, _)| len <= count) => {
                row_heap.pop();
                let best = rows[r].iter().filter(|e| is_unit(e.1)).min_by_key(|e| col_rows[e.0].len()).map(|e| e.0);
                match best {
                    Some(c) => (r, c),
                    // no unit in this row; it waits for the dense pass unless it changes
                    None => continue,
                }
            }
            (_, Some((_, c))) => {
                col_heap.pop();
                let mut list = std::mem::take(&mut col_rows[c]);
                list.sort_unstable();
                list.dedup();
                list.retain(|&r| alive[r] && entry(&rows[r], c).is_some());
                let best = list
                    .iter()
                    .copied()
                    .filter(|&r| entry(&rows[r], c).is_some_and(is_unit))
                    .min_by_key(|&r| rows[r].len());
                col_rows[c] = list;
                match best {
                    Some(r) => (r, c),
                    None => {
                        stuck[c] = true;
                        continue;
                    }
                }
            }
            (Some(_), None) => unreachable!("guard accepts a row when no column is queued"),
        };
        let pivot = std::mem::take(&mut rows[pr]);
        alive[pr] = false;
        let pv = entry(&pivot, c).unwrap();
        let mut targets = std::mem::take(&mut col_rows[c]);
        targets.sort_unstable();
        targets.dedup();
        for t in targets {
            if t == pr || !alive[t] {
                continue;
            }
            let Some(tv) = entry(&rows[t], c) else { continue };
            let old = std::mem::take(&mut rows[t]);
            // pv is ±1, or 1 modulo 2
            let new = row_sub(&old, &pivot, tv * pv, modulus)?;
            let (mut i, mut j) = (0, 0);
            while j < new.len() {
                if i < old.len() && old[i].0 < new[j].0 {
                    i += 1;
                } else if i < old.len() && old[i].0 == new[j].0 {
                    i += 1;
                    j += 1;
                } else {
                    let cc = new[j].0;
                    col_rows[cc].push(t);
                    stuck[cc] = false;
                    col_heap.push(Reverse((col_rows[cc].len(), cc)));
                    j += 1;
                }
            }
            alive[t] = !new.is_empty();
            if alive[t] {
                row_heap.push(Reverse((new.len(), t)));
            }
            rows[t] = new;
        }
        rank += 1;
    }
    let residual = rows.into_iter().zip(alive).filter(|(_, a)| *a).map(|(r, _)| r).collect();
    Some((rank, residual))
}

fn compress(rows: &[Vec<(usize, i64)>]) -> Vec<Vec<BigInt>> {
    let mut cols: Vec<usize> = rows.iter().flatten().map(|e| e.0).collect();
    cols.sort_unstable();
    cols.dedup();
    rows.iter()
        .map(|row| {
            let mut dense = vec![BigInt::zero(); cols.len()];
            for &(c, v) in row {
                dense[cols.binary_search(&c).unwrap()] = BigInt::from(v);
            }
            dense
        })
        .collect()
}

/// Rank over the rationals by fraction-free elimination.
pub fn dense_rank_q(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let g = pivot_row[c].gcd(&row[c]);
            let fp = &row[c] / &g;
            let fr = &pivot_row[c] / &g;
            let mut content = BigInt::zero();
            for k in c..cols {
                row[k] = &row[k] * &fr - &pivot_row[k] * &fp;
                content = content.gcd(&row[k]);
            }
            if content > BigInt::one() {
                for x in row.iter_mut().skip(c) {
                    *x = &*x / &content;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the field with two elements.
pub fn dense_rank_z2(a: &[Vec<BigInt>]) -> usize {
    let two = BigInt::from(2);
    let mut m: Vec<Vec<bool>> = a.iter().map(|r| r.iter().map(|x| !x.mod_floor(&two).is_zero()).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c]) else { continue };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c] {
                for k in c..cols {
                    row[k] ^= pivot[k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Smith normal form diagonal (nonzero entries, each dividing the next).
pub fn smith_invariants(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !a[r][c].is_zero() && best.is_none_or(|(br, bc)| a[r][c].abs() < a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        a.swap(t, br);
        for row in a.iter_mut() {
            row.swap(t, bc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].div_floor(&a[t][t]);
                for c in t..cols {
                    let v = &a[r][c] - &q * &a[t][c];
                    a[r][c] = v;
                }
                if !a[r][t].is_zero() {
                    a.swap(t, r);
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].div_floor(&a[t][t]);
                for row in a.iter_mut() {
                    let v = &row[c] - &q * &row[t];
                    row[c] = v;
                }
                if !a[t][c].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, c);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (t + 1..rows).find_map(|r| (t + 1..cols).find(|&c| !a[r][c].is_multiple_of(&a[t][t])).map(|_| r));
            match bad {
                Some(r) => {
                    for c in t..cols {
                        let v = &a[t][c] + &a[r][c];
                        a[t][c] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

fn finish(units: usize, residual: &[Vec<(usize, i64)>], coeffs: Coefficients) -> Reduction {
    let dense = compress(residual);
    match coeffs {
        Coefficients::Q => Reduction { rank: units + dense_rank_q(dense), torsion: Vec::new() },
        Coefficients::Z2 => Reduction { rank: units + dense_rank_z2(&dense), torsion: Vec::new() },
        Coefficients::Z => {
            let inv = smith_invariants(dense);
            let torsion = inv.iter().filter(|d| !d.is_one()).cloned().collect();
            Reduction { rank: units + inv.len(), torsion }
        }
    }
}

/// Rank (and integer torsion) of `m`, pivoting on units first.
pub fn reduce(m: &SparseMatrix, coeffs: Coefficients) -> Reduction {
    let modulus = (coeffs == Coefficients::Z2).then_some(2);
    match eliminate_units(m, modulus) {
        Some((units, residual)) => finish(units, &residual, coeffs),
        None => reduce_dense(m, coeffs),
    }
}

/// The same computation without the sparse elimination pass.
pub fn reduce_dense(m: &SparseMatrix, coeffs: Coefficients) -> Reduction {
    let nonempty: Vec<Vec<(usize, i64)>> = m.data.iter().filter(|r| !r.is_empty()).cloned().collect();
    finish(0, &nonempty, coeffs)
}
