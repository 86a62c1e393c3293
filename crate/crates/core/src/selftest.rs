//! Runtime self-check over a fixture directory.
//!
//! Mirrors the acceptance suite with deterministic inputs so that an installed
//! binary can check itself without the test harness.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::coloring::{
    bounded_small_image_search, coloring_space, determinant, find_nontrivial_coloring, is_simple, primitive_normalize,
    verify_coloring, ColorImage, Coloring, Simplicity,
};
use crate::diagram::Diagram;
use crate::fixtures::{load_from, LINK_TABLE};
use crate::linalg::{integer_kernel_basis, smith_normal_form, IntMatrix};
use crate::moves::{apply_move, legal_moves, Move};
use crate::palette::{classify_five, palette_graph, FiveClass};
use crate::reduction::{reduce_five, reduce_simple};
use crate::trace::verify_trace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub millis: u128,
}

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Fixtures {
    table: Vec<(&'static str, Diagram)>,
    basic: Vec<(&'static str, Diagram)>,
}

fn load_all(dir: &Path) -> Result<Fixtures, String> {
    if !dir.is_dir() {
        return Err(format!("fixture directory {} does not exist (set ZCOLOR_FIXTURES)", dir.display()));
    }
    let get = |n: &'static str| load_from(dir, n).map(|d| (n, d)).map_err(|e| e.to_string());
    let table = LINK_TABLE.iter().map(|&n| get(n)).collect::<Result<_, _>>()?;
    let basic = ["trefoil", "figure8", "hopf", "kink"].into_iter().map(get).collect::<Result<_, _>>()?;
    Ok(Fixtures { table, basic })
}

/// Fox n-colorings counted by enumeration over arcs.
fn fox_count(d: &Diagram, n: i64) -> u64 {
    let arcs = d.compute_arcs();
    let k = arcs.arc_count() as u32;
    let rel: Vec<[usize; 3]> =
        d.crossings().iter().map(|q| [arcs.arc_of(q[0]), arcs.arc_of(q[1]), arcs.arc_of(q[2])]).collect();
    (0..(n as u64).pow(k))
        .filter(|&code| {
            let col = |a: usize| (code / (n as u64).pow(a as u32) % n as u64) as i64;
            rel.iter().all(|&[a, b, c]| (2 * col(b) - col(a) - col(c)).rem_euclid(n) == 0)
        })
        .count() as u64
}

fn determinants(f: &Fixtures) -> Outcome {
    for ((name, d), want) in f.basic.iter().zip([3u32, 5, 2, 1]) {
        let det = determinant(d);
        ensure!(det == BigInt::from(want), "{name}.pd: determinant {det}, want {want}");
        for n in [2i64, 3, 5] {
            let extra = fox_count(d, n) > n as u64;
            ensure!(extra == (want as i64 % n == 0), "{name}.pd: mod {n} coloring count disagrees with {want}");
        }
    }
    Ok("trefoil 3, figure8 5, hopf 2, kink 1".into())
}

fn zero_determinants(f: &Fixtures) -> Outcome {
    for (name, d) in &f.table {
        ensure!(determinant(d).is_zero(), "{name}.pd: determinant {}", determinant(d));
        let g = find_nontrivial_coloring(d).ok_or(format!("{name}.pd: no non-trivial coloring"))?;
        ensure!(verify_coloring(d, &g) == Ok(true), "{name}.pd: coloring fails the relation");
    }
    Ok(format!("{} links", f.table.len()))
}

fn three_colors(f: &Fixtures) -> Outcome {
    for (name, d) in &f.table {
        ensure!(bounded_small_image_search(d, 3, 3).is_none(), "{name}.pd: found a three-color coloring");
    }
    let tre = &f.basic[0].1;
    for (what, d) in [("trefoil+trefoil", tre.disjoint_union(tre)), ("hopf+kink", f.basic[2].1.disjoint_union(&f.basic[3].1))]
    {
        let g = bounded_small_image_search(&d, 3, 3).ok_or(format!("{what}: no split coloring"))?;
        ensure!(g.image().len() == 2, "{what}: image {:?}", g.image());
    }
    Ok("connected fixtures need 4+, split diagrams take 2".into())
}

fn pretzels() -> Outcome {
    for n in 2..=4i64 {
        for tw in [vec![n, -n], vec![n, -n, n, -n]] {
            let d = crate::diagram::pretzel(&tw).map_err(|e| e.to_string())?;
            let g = find_nontrivial_coloring(&d).ok_or(format!("{tw:?}: no coloring"))?;
            let Simplicity::Simple(gap) = is_simple(&d, &g) else {
                return Err(format!("{tw:?}: coloring is not simple"));
            };
            let r = reduce_simple(&d, &g).map_err(|e| format!("{tw:?}: {e}"))?;
            ensure!(r.final_image == ColorImage(vec![0, gap, 2 * gap, 3 * gap]), "{tw:?}: {:?}", r.final_image);
            verify_trace(&r.trace).map_err(|e| format!("{tw:?}: {e}"))?;
        }
    }
    Ok("6 pretzels reach {0,d,2d,3d}".into())
}

fn five_samples(d: &Diagram) -> Vec<Coloring> {
    let Ok(space) = coloring_space(d) else { return Vec::new() };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for idx in 0..5usize.pow(space.rank() as u32).min(500) {
        let mut rest = idx;
        let mut colors = vec![0i64; space.basis[0].len()];
        for b in &space.basis {
            let c = (rest % 5) as i64 - 2;
            rest /= 5;
            colors.iter_mut().zip(b.colors()).for_each(|(a, &v)| *a += c * v);
        }
        let g = Coloring::new(colors);
        if g.image().len() == 5 && seen.insert(primitive_normalize(&g)) {
            out.push(g);
        }
    }
    out
}

/// Edge sets a `{0,..,4}` palette graph can have.
fn palettes_0_to_4() -> Vec<BTreeSet<(i64, i64)>> {
    let even = [(0, 2), (0, 4), (2, 4)];
    let mut out = Vec::new();
    for mask in 1u8..8 {
        let mut s: BTreeSet<(i64, i64)> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| even[i]).collect();
        if s.len() >= 2 {
            s.insert((1, 3));
            out.push(s);
        }
    }
    out
}

fn five_colors(f: &Fixtures) -> Outcome {
    let palettes = palettes_0_to_4();
    let mut total = 0;
    for (name, d) in &f.table {
        for g in five_samples(d) {
            total += 1;
            let FiveClass::Canonical { .. } = classify_five(&g) else {
                return Err(format!("{name}.pd: {:?} is not in the catalog", g.image()));
            };
            let p = palette_graph(d, &g);
            ensure!(p.component_count() == 2, "{name}.pd: palette has {} components", p.component_count());
            let norm = primitive_normalize(&g);
            if norm.image() == ColorImage(vec![0, 1, 2, 3, 4]) {
                let pairs = palette_graph(d, &norm).edge_pairs();
                ensure!(palettes.contains(&pairs), "{name}.pd: unexpected palette {pairs:?}");
            }
            let r = reduce_five(d, &g).map_err(|e| format!("{name}.pd {:?}: {e}", g.image()))?;
            ensure!(r.achieved == 4, "{name}.pd: achieved {}", r.achieved);
            verify_trace(&r.trace).map_err(|e| format!("{name}.pd: {e}"))?;
        }
    }
    Ok(format!("{total} five-color samples classified and reduced"))
}

fn smith_forms() -> Outcome {
    let zero = BigInt::zero();
    let mut count = 0;
    for code in 0..6561u32 {
        let e: Vec<i64> = (0..8).map(|k| (code / 3u32.pow(k) % 3) as i64 * 3 - 3 + k as i64 % 2).collect();
        for (r, c) in [(2, 4), (4, 2), (2, 3)] {
            let rows: Vec<Vec<i64>> = (0..r).map(|i| (0..c).map(|j| e[(i * c + j) % 8]).collect()).collect();
            let m = IntMatrix::from_rows(&rows);
            let f = smith_normal_form(&m);
            ensure!(f.u.mul(&m).mul(&f.v) == f.s && f.s.is_diagonal(), "u*m*v != s for {rows:?}");
            let inv = f.invariant_factors();
            ensure!(inv.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), "divisibility fails for {rows:?}");
            for v in integer_kernel_basis(&m) {
                ensure!(m.mul_vec(&v).iter().all(|x| *x == zero), "kernel vector fails for {rows:?}");
            }
            count += 1;
        }
    }
    Ok(format!("{count} matrices"))
}

fn walk(d: Diagram, g: Coloring, steps: usize, stride: usize) -> Outcome {
    let det0 = determinant(&d);
    let comps0 = d.link_components();
    let (mut d, mut g) = (d, g);
    for k in 0..steps {
        let moves = legal_moves(&d, &g);
        let shrink: Vec<Move> =
            moves.iter().copied().filter(|m| matches!(m, Move::R1Remove { .. } | Move::R2Pop { .. })).collect();
        let pool = if d.crossing_count() > 9 && !shrink.is_empty() { &shrink } else { &moves };
        let m = pool[(k * stride + 7) % pool.len()];
        let (d2, g2) = apply_move(&d, &g, m).map_err(|e| format!("step {k}: {e}"))?;
        ensure!(d2.validate().is_ok() && d2.is_planar(), "step {k}: invalid diagram after {}", m.kind());
        ensure!(verify_coloring(&d2, &g2) == Ok(true), "step {k}: coloring breaks after {}", m.kind());
        ensure!(determinant(&d2) == det0 && d2.link_components() == comps0, "step {k}: invariant changes");
        d = d2;
        g = g2;
    }
    Ok(String::new())
}

fn moves(f: &Fixtures) -> Outcome {
    walk(f.basic[0].1.clone(), Coloring::constant(3, 1), 200, 31)?;
    let p = crate::diagram::pretzel(&[2, -2]).map_err(|e| e.to_string())?;
    let g = find_nontrivial_coloring(&p).ok_or("pretzel [2,-2] has no coloring")?;
    walk(p, g, 200, 17)?;
    Ok("400 moves keep every invariant".into())
}

fn timed(name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    let t0 = Instant::now();
    let out = f();
    let millis = t0.elapsed().as_millis();
    match out {
        Ok(detail) => Check { name, passed: true, detail, millis },
        Err(detail) => Check { name, passed: false, detail, millis },
    }
}

/// Runs every check against the fixtures in `dir`.
pub fn run(dir: &Path) -> Vec<Check> {
    let fx = match load_all(dir) {
        Ok(f) => f,
        Err(e) => return vec![Check { name: "fixtures", passed: false, detail: e, millis: 0 }],
    };
    vec![
        Check { name: "fixtures", passed: true, detail: format!("{} files in {}", fx.table.len() + fx.basic.len(), dir.display()), millis: 0 },
        timed("determinants", || determinants(&fx)),
        timed("zero determinants", || zero_determinants(&fx)),
        timed("no three colors", || three_colors(&fx)),
        timed("pretzel reductions", pretzels),
        timed("five colors", || five_colors(&fx)),
        timed("smith normal form", smith_forms),
        timed("move soundness", || moves(&fx)),
    ]
}
