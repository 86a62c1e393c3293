#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zcolor_core::coloring::{coloring_space, determinant, primitive_normalize, verify_coloring};
use zcolor_core::moves::legal_moves;
use zcolor_core::{apply_move, parse_pd, Coloring, Diagram, Move};

pub const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
pub const FIGURE8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
pub const HOPF: &str = "X[3,2,4,1] X[1,4,2,3]";
pub const KINK: &str = "X[1,1,2,2]";

pub fn pd(s: &str) -> Diagram {
    parse_pd(s).unwrap()
}

/// Counts Fox n-colorings by trying every assignment of `Z/n` to the arcs.
pub fn fox_count(d: &Diagram, n: i64) -> u64 {
    let arcs = d.compute_arcs();
    let k = arcs.arc_count();
    let rel: Vec<[usize; 3]> =
        d.crossings().iter().map(|q| [arcs.arc_of(q[0]), arcs.arc_of(q[1]), arcs.arc_of(q[2])]).collect();
    let mut col = vec![0i64; k];
    let mut count = 0;
    loop {
        if rel.iter().all(|&[a, b, c]| (2 * col[b] - col[a] - col[c]).rem_euclid(n) == 0) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k {
                return count;
            }
            col[i] += 1;
            if col[i] < n {
                break;
            }
            col[i] = 0;
            i += 1;
        }
    }
}

/// Rank of an integer matrix over `Z/p`, by plain Gaussian elimination.
pub fn rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let inv = |a: i64| (1..p).find(|&x| a * x % p == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, r);
        let iv = inv(m[rank][c]);
        for x in m[rank].iter_mut() {
            *x = *x * iv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] - f * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The coloring relations as plain rows: one per crossing, one column per arc.
pub fn relation_rows(d: &Diagram) -> Vec<Vec<i64>> {
    let arcs = d.compute_arcs();
    d.crossings()
        .iter()
        .map(|q| {
            let mut row = vec![0i64; arcs.arc_count()];
            row[arcs.arc_of(q[1])] += 2;
            row[arcs.arc_of(q[0])] -= 1;
            row[arcs.arc_of(q[2])] -= 1;
            row
        })
        .collect()
}

/// Palette graphs a coloring with image `{0,..,4}` can have, found by
/// listing every edge set drawn from the same-parity pairs whose average is a
/// color and keeping those whose components are exactly the two parity
/// classes.
pub fn palette_catalog_0_to_4() -> Vec<BTreeSet<(i64, i64)>> {
    let colors: Vec<i64> = (0..5).collect();
    let mut cand = Vec::new();
    for &a in &colors {
        for &c in &colors {
            if a < c && (a + c) % 2 == 0 {
                cand.push((a, c));
            }
        }
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << cand.len()) {
        let edges: BTreeSet<(i64, i64)> =
            cand.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let mut comp: Vec<usize> = (0..5).collect();
        for _ in 0..5 {
            for &(a, c) in &edges {
                let m = comp[a as usize].min(comp[c as usize]);
                comp[a as usize] = m;
                comp[c as usize] = m;
            }
        }
        if colors.iter().all(|&x| comp[x as usize] == (x % 2) as usize) {
            out.push(edges);
        }
    }
    out
}

/// Distinct primitive five-color colorings among integer combinations of the
/// kernel basis with coefficients in `[-3, 3]`, trying at most `cap`
/// combinations.
pub fn five_samples(d: &Diagram, cap: usize) -> Vec<Coloring> {
    let space = coloring_space(d).unwrap();
    let r = space.rank() as u32;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for idx in 0..7usize.pow(r).min(cap) {
        let mut rest = idx;
        let mut colors = vec![0i64; space.basis[0].len()];
        for b in &space.basis {
            let c = (rest % 7) as i64 - 3;
            rest /= 7;
            for (acc, &v) in colors.iter_mut().zip(b.colors()) {
                *acc += c * v;
            }
        }
        let g = Coloring::new(colors);
        if g.image().len() != 5 {
            continue;
        }
        if seen.insert(primitive_normalize(&g)) {
            out.push(g);
        }
    }
    out
}

/// Applies `steps` uniformly chosen legal moves, preferring shrinking moves
/// once the diagram grows past nine crossings, and checks every state.
pub fn walk(d: Diagram, g: Coloring, steps: usize, seed: u64, mut extra: impl FnMut(&Diagram, usize, Move)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let det0 = determinant(&d);
    let comps0 = d.link_components();
    let (mut d, mut g) = (d, g);
    for step in 0..steps {
        let moves = legal_moves(&d, &g);
        let shrinking: Vec<Move> =
            moves.iter().copied().filter(|m| matches!(m, Move::R1Remove { .. } | Move::R2Pop { .. })).collect();
        let pool = if d.crossing_count() > 9 && !shrinking.is_empty() { &shrinking } else { &moves };
        let m = *pool.choose(&mut rng).unwrap();
        let (d2, g2) = apply_move(&d, &g, m).unwrap_or_else(|e| panic!("step {step}: {m:?}: {e}"));
        d2.validate().unwrap();
        assert!(d2.is_planar(), "step {step}: {m:?} leaves a non-planar diagram");
        assert!(verify_coloring(&d2, &g2).unwrap(), "step {step}: {m:?}");
        assert_eq!(determinant(&d2), det0, "step {step}: {m:?}");
        assert_eq!(d2.link_components(), comps0, "step {step}: {m:?}");
        extra(&d2, step, m);
        d = d2;
        g = g2;
    }
}
