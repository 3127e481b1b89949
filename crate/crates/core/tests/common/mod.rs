//! Test-only oracles, written without reference to the library's cube code.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

/// Khovanov homology of the trace closure of a signed braid word, by full
/// cube enumeration and dense integer Smith normal form, in the usual
/// bigrading. Returns `(i, j) -> (free rank, torsion orders)`.
pub fn trace_closure_kh(n: usize, word: &[i64]) -> BTreeMap<(i64, i64), (usize, Vec<i64>)> {
    let c = word.len();
    assert!(c <= 10, "oracle is for small diagrams");
    let n_minus = word.iter().filter(|&&x| x < 0).count() as i64;
    let n_plus = c as i64 - n_minus;
    // node (level k, strand s) for k in 0..c; level c wraps to level 0
    let node = |k: usize, s: usize| (k % c.max(1)) * n + s;
    let nodes = c.max(1) * n;

    let circles_of = |state: u32| -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let join = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra] = rb;
            }
        };
        if c == 0 {
            return ((0..n).collect(), n);
        }
        for (k, &x) in word.iter().enumerate() {
            let i = x.unsigned_abs() as usize;
            for s in 0..n {
                if s + 1 != i && s != i {
                    join(&mut parent, node(k, s), node(k + 1, s));
                }
            }
            let one = (state >> k) & 1 == 1;
            let vertical = (x > 0) != one;
            if vertical {
                join(&mut parent, node(k, i - 1), node(k + 1, i - 1));
                join(&mut parent, node(k, i), node(k + 1, i));
            } else {
                join(&mut parent, node(k, i - 1), node(k, i));
                join(&mut parent, node(k + 1, i - 1), node(k + 1, i));
            }
        }
        let mut ids = HashMap::new();
        let labels: Vec<usize> = (0..nodes)
            .map(|v| {
                let r = find(&mut parent, v);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect();
        let count = ids.len();
        (labels, count)
    };

    // generators: (state, bitmask of circles labelled x); v+ = 1, v- = x
    let mut gens: BTreeMap<(i64, i64), Vec<(u32, u32)>> = BTreeMap::new();
    let mut circ: HashMap<u32, (Vec<usize>, usize)> = HashMap::new();
    for state in 0..(1u32 << c) {
        let (labels, k) = circles_of(state);
        let r = state.count_ones() as i64;
        for xs in 0..(1u32 << k) {
            let minus = xs.count_ones() as i64;
            let p = k as i64 - 2 * minus;
            gens.entry((r - n_minus, p + r + n_plus - 2 * n_minus)).or_default().push((state, xs));
        }
        circ.insert(state, (labels, k));
    }
    let index: HashMap<(u32, u32), usize> =
        gens.values().flat_map(|g| g.iter().enumerate().map(|(a, &b)| (b, a))).collect();

    // d applied to one generator, as (state, xs, coefficient)
    let image = |state: u32, xs: u32| -> Vec<(u32, u32, i64)> {
        let mut out = Vec::new();
        let (src, _) = &circ[&state];
        for k in 0..c {
            if (state >> k) & 1 == 1 {
                continue;
            }
            let t = state | (1 << k);
            let (dst, kt) = &circ[&t];
            let sign = if (state & ((1 << k) - 1)).count_ones().is_multiple_of(2) { 1 } else { -1 };
            // source circles feeding each target circle, and vice versa
            let mut feeds: Vec<Vec<usize>> = vec![Vec::new(); *kt];
            let mut fed: HashMap<usize, Vec<usize>> = HashMap::new();
            for v in 0..nodes {
                let (a, b) = (src[v], dst[v]);
                if !feeds[b].contains(&a) {
                    feeds[b].push(a);
                }
                let e = fed.entry(a).or_default();
                if !e.contains(&b) {
                    e.push(b);
                }
            }
            let has_x = |circle: usize| (xs >> circle) & 1 == 1;
            let mut terms: Vec<u32> = vec![0];
            let mut dead = false;
            for (b, f) in feeds.iter().enumerate() {
                if f.len() == 2 {
                    let deg = has_x(f[0]) as u32 + has_x(f[1]) as u32;
                    match deg {
                        0 => {}
                        1 => terms.iter_mut().for_each(|m| *m |= 1 << b),
                        _ => dead = true,
                    }
                } else if fed[&f[0]].len() == 1 && has_x(f[0]) {
                    terms.iter_mut().for_each(|m| *m |= 1 << b);
                }
            }
            for (a, targets) in &fed {
                if targets.len() == 2 {
                    let (t1, t2) = (targets[0], targets[1]);
                    terms = if has_x(*a) {
                        terms.iter().map(|m| m | 1 << t1 | 1 << t2).collect()
                    } else {
                        terms.iter().flat_map(|m| [m | 1 << t1, m | 1 << t2]).collect()
                    };
                }
            }
            if !dead {
                out.extend(terms.into_iter().map(|m| (t, m, sign)));
            }
        }
        out
    };

    let mut result = BTreeMap::new();
    let mut smith: HashMap<(i64, i64), Vec<i64>> = HashMap::new();
    for (&(i, j), g) in &gens {
        let Some(target) = gens.get(&(i + 1, j)) else { continue };
        let mut m = vec![vec![0i64; target.len()]; g.len()];
        for (row, &(s, xs)) in g.iter().enumerate() {
            for (t, m2, v) in image(s, xs) {
                m[row][index[&(t, m2)]] += v;
            }
        }
        smith.insert((i, j), smith_diagonal(m));
    }
    for (&(i, j), g) in &gens {
        let out = smith.get(&(i, j)).map_or(0, |d| d.len());
        let inc = smith.get(&(i - 1, j)).cloned().unwrap_or_default();
        let rank = g.len() - out - inc.len();
        let torsion: Vec<i64> = inc.into_iter().filter(|&d| d > 1).collect();
        if rank > 0 || !torsion.is_empty() {
            result.insert((i, j), (rank, torsion));
        }
    }
    result
}

/// Nonzero Smith invariants of a small dense integer matrix.
pub fn smith_diagonal(mut a: Vec<Vec<i64>>) -> Vec<i64> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best = None;
        for r in t..rows {
            for c in t..cols {
                if a[r][c] != 0 && best.is_none_or(|(br, bc): (usize, usize)| a[r][c].abs() < a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        a.swap(t, br);
        for row in a.iter_mut() {
            row.swap(t, bc);
        }
        let mut reduced = false;
        while !reduced {
            reduced = true;
            for r in t + 1..rows {
                let f = a[r][t].div_euclid(a[t][t]);
                for c in t..cols {
                    a[r][c] -= f * a[t][c];
                }
                if a[r][t] != 0 {
                    a.swap(t, r);
                    reduced = false;
                }
            }
            for c in t + 1..cols {
                let f = a[t][c].div_euclid(a[t][t]);
                for row in a.iter_mut() {
                    row[c] -= f * row[t];
                }
                if a[t][c] != 0 {
                    for row in a.iter_mut() {
                        row.swap(t, c);
                    }
                    reduced = false;
                }
            }
            if reduced {
                'outer: for r in t + 1..rows {
                    for c in t + 1..cols {
                        if a[r][c] % a[t][t] != 0 {
                            for k in t..cols {
                                a[t][k] += a[r][k];
                            }
                            reduced = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Graded Euler characteristic `Σ (-1)^i rank q^j` as exponent -> coefficient.
pub fn euler(h: &BTreeMap<(i64, i64), (usize, Vec<i64>)>) -> BTreeMap<i64, i64> {
    let mut out = BTreeMap::new();
    for (&(i, j), (rank, _)) in h {
        *out.entry(j).or_insert(0) += if i % 2 == 0 { *rank as i64 } else { -(*rank as i64) };
    }
    out.retain(|_, v| *v != 0);
    out
}
