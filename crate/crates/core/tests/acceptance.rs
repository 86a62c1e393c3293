//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zcolor_core::coloring::{
    bounded_small_image_search, determinant, find_nontrivial_coloring, is_simple, primitive_normalize, verify_coloring,
};
use zcolor_core::fixtures::{link_table, load};
use zcolor_core::{
    classify_five, integer_kernel_basis, palette_graph, pretzel, reduce_five, reduce_simple, smith_normal_form,
    verify_trace, ColorImage, Coloring, Diagram, FiveClass, IntMatrix, Simplicity,
};

mod common;
use common::{five_samples, fox_count, palette_catalog_0_to_4, rank_mod_p, relation_rows, walk};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn determinants() -> Outcome {
    for (name, want) in [("trefoil", 3u32), ("figure8", 5), ("hopf", 2), ("kink", 1)] {
        let d = load(name).map_err(|e| e.to_string())?;
        let det = determinant(&d);
        ensure!(det == BigInt::from(want), "{name}: determinant {det}, want {want}");
        let rows = relation_rows(&d);
        let arcs = d.compute_arcs().arc_count();
        for n in [2i64, 3, 5] {
            let count = fox_count(&d, n);
            let by_rank = (n as u64).pow((arcs - rank_mod_p(&rows, n)) as u32);
            ensure!(count == by_rank, "{name} mod {n}: {count} colorings by brute force, {by_rank} by rank");
            let nontrivial = count > n as u64;
            ensure!(
                nontrivial == (want as i64 % n == 0),
                "{name} mod {n}: {count} colorings disagree with determinant {want}"
            );
        }
    }
    Ok("4 diagrams, n in {2,3,5}".into())
}

fn zero_determinant_fixtures() -> Outcome {
    let table = link_table().map_err(|e| e.to_string())?;
    for (name, d) in &table {
        ensure!(determinant(d) == BigInt::from(0), "{name}: determinant {}", determinant(d));
        let g = find_nontrivial_coloring(d).ok_or(format!("{name}: no non-trivial coloring"))?;
        ensure!(!g.is_constant(), "{name}: constant coloring returned");
        ensure!(verify_coloring(d, &g) == Ok(true), "{name}: returned coloring fails the relation");
    }
    Ok(format!("{} links", table.len()))
}

fn split_diagrams() -> Vec<(&'static str, Diagram)> {
    let tre = load("trefoil").unwrap();
    let hopf = load("hopf").unwrap();
    let kink = load("kink").unwrap();
    let l8n6 = load("L8n6").unwrap();
    vec![
        ("trefoil+trefoil", tre.disjoint_union(&tre)),
        ("hopf+kink", hopf.disjoint_union(&kink)),
        ("L8n6+figure8", l8n6.disjoint_union(&load("figure8").unwrap())),
        ("trefoil+circle", tre.disjoint_union(&Diagram::from_quads(vec![], 1).unwrap())),
    ]
}

fn three_color_floor() -> Outcome {
    let table = link_table().map_err(|e| e.to_string())?;
    for (name, d) in &table {
        ensure!(d.diagram_components() == 1, "{name}: diagram is not connected");
        if let Some(g) = bounded_small_image_search(d, 3, 3) {
            return Err(format!("{name}: found {:?}", g.image()));
        }
    }
    for (name, d) in split_diagrams() {
        let g = bounded_small_image_search(&d, 3, 3).ok_or(format!("{name}: nothing found"))?;
        ensure!(g.image().len() == 2, "{name}: image {:?}", g.image());
        ensure!(verify_coloring(&d, &g) == Ok(true), "{name}: invalid witness");
    }
    Ok(format!("{} connected, 4 split", table.len()))
}

fn pretzel_endpoints() -> Outcome {
    let mut slowest = Duration::ZERO;
    for n in 2..=4i64 {
        for tw in [vec![n, -n], vec![n, -n, n, -n]] {
            let t0 = Instant::now();
            let d = pretzel(&tw).map_err(|e| e.to_string())?;
            let g = find_nontrivial_coloring(&d).ok_or(format!("{tw:?}: no coloring"))?;
            let Simplicity::Simple(gap) = is_simple(&d, &g) else {
                return Err(format!("{tw:?}: found coloring {:?} is not simple", g.image()));
            };
            let r = reduce_simple(&d, &g).map_err(|e| format!("{tw:?}: {e}"))?;
            let want = ColorImage(vec![0, gap, 2 * gap, 3 * gap]);
            ensure!(r.final_image == want, "{tw:?}: final image {:?}, want {want:?}", r.final_image);
            let p = primitive_normalize(r.final_coloring()).image();
            ensure!(p == ColorImage(vec![0, 1, 2, 3]), "{tw:?}: normalizes to {p:?}");
            verify_trace(&r.trace).map_err(|e| format!("{tw:?}: {e}"))?;
            let el = t0.elapsed();
            ensure!(el < Duration::from_secs(10), "{tw:?}: took {el:?}");
            slowest = slowest.max(el);
        }
    }
    Ok(format!("6 pretzels, slowest {slowest:.2?}"))
}

fn all_samples() -> Result<Vec<(&'static str, Diagram, Vec<Coloring>)>, String> {
    let table = link_table().map_err(|e| e.to_string())?;
    Ok(table
        .into_iter()
        .map(|(name, d)| {
            let s = five_samples(&d, 500);
            (name, d, s)
        })
        .collect())
}

fn five_catalog(samples: &[(&str, Diagram, Vec<Coloring>)]) -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    for (name, _, gs) in samples {
        for g in gs {
            total += 1;
            if let FiveClass::NotInCatalog { image } | FiveClass::Canonical { image } = classify_five(g) {
                if !zcolor_core::FIVE_CATALOG.iter().any(|c| c[..] == image.0[..]) {
                    bad.push(format!("{name}: {:?}", g.image()));
                }
            } else {
                bad.push(format!("{name}: {:?} is not five colors", g.image()));
            }
        }
    }
    ensure!(total > 0, "no five-color samples");
    ensure!(bad.is_empty(), "{} not in catalog: {}", bad.len(), bad.join("; "));
    Ok(format!("{total} samples"))
}

fn palette_structure(samples: &[(&str, Diagram, Vec<Coloring>)]) -> Outcome {
    let catalog = palette_catalog_0_to_4();
    ensure!(catalog.len() == 4, "oracle lists {} graphs", catalog.len());
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut total = 0;
    for (name, d, gs) in samples {
        for g in gs {
            total += 1;
            let p = palette_graph(d, g);
            ensure!(p.component_count() == 2, "{name}: {:?} has {} components", g.image(), p.component_count());
            let norm = primitive_normalize(g);
            if norm.image() == ColorImage(vec![0, 1, 2, 3, 4]) {
                let pairs = palette_graph(d, &norm).edge_pairs();
                let k = catalog.iter().position(|c| *c == pairs);
                ensure!(k.is_some(), "{name}: palette {pairs:?} is not in the enumerated four");
                seen.extend(k);
            }
        }
    }
    Ok(format!("{total} samples, {} of 4 {{0..4}} graphs seen", seen.len()))
}

fn five_reductions(samples: &[(&str, Diagram, Vec<Coloring>)]) -> Outcome {
    let mut total = 0;
    for (name, d, gs) in samples {
        for g in gs {
            let r = reduce_five(d, g).map_err(|e| format!("{name} {:?}: {e}", g.image()))?;
            ensure!(r.achieved == 4, "{name} {:?}: achieved {}", g.image(), r.achieved);
            verify_trace(&r.trace).map_err(|e| format!("{name} {:?}: {e}", g.image()))?;
            total += 1;
        }
    }
    Ok(format!("{total} reductions"))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let r = rng.gen_range(1..=8);
    let c = rng.gen_range(1..=8);
    let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
    IntMatrix::from_rows(&rows)
}

fn snf_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let zero = BigInt::from(0);
    for k in 0..10_000 {
        let m = random_matrix(&mut rng);
        let f = smith_normal_form(&m);
        ensure!(f.u.mul(&m).mul(&f.v) == f.s, "matrix {k}: u*m*v != s");
        ensure!(f.s.is_diagonal(), "matrix {k}: s is not diagonal");
        ensure!(f.u.det().magnitude() == &1u32.into(), "matrix {k}: u is not unimodular");
        ensure!(f.v.det().magnitude() == &1u32.into(), "matrix {k}: v is not unimodular");
        let inv = f.invariant_factors();
        ensure!(inv.iter().all(|x| *x > zero), "matrix {k}: non-positive factor");
        ensure!(inv.windows(2).all(|w| (&w[1] % &w[0]) == zero), "matrix {k}: divisibility chain breaks");
        for i in f.rank..m.rows().min(m.cols()) {
            ensure!(*f.s.get(i, i) == zero, "matrix {k}: entry past rank is nonzero");
        }
        let ker = integer_kernel_basis(&m);
        ensure!(ker.len() == m.cols() - f.rank, "matrix {k}: kernel has {} vectors", ker.len());
        for v in &ker {
            ensure!(m.mul_vec(v).iter().all(|x| *x == zero), "matrix {k}: kernel vector not annihilated");
        }
    }
    Ok("10000 matrices".into())
}

fn move_fuzz() -> Outcome {
    let tre = load("trefoil").map_err(|e| e.to_string())?;
    walk(tre, Coloring::constant(3, 7), 500, 1, |_, _, _| {});
    let p = pretzel(&[2, -2]).map_err(|e| e.to_string())?;
    let g = find_nontrivial_coloring(&p).ok_or("pretzel [2,-2] has no coloring")?;
    walk(p, g, 500, 2, |_, _, _| {});
    Ok("1000 moves".into())
}

fn run(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let el = t0.elapsed();
    let out = match (out, limit) {
        (Ok(_), Some(l)) if el > l => Err(format!("took {el:.2?}, limit {l:?}")),
        (o, _) => o,
    };
    match &out {
        Ok(detail) => println!("PASS {id} {name} ({el:.2?}): {detail}"),
        Err(why) => println!("FAIL {id} {name} ({el:.2?}): {why}"),
    }
    out.is_ok()
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= run(1, "determinants match Fox counts", Some(secs(1)), determinants);
    ok &= run(2, "zero-determinant fixtures", Some(secs(5)), zero_determinant_fixtures);
    ok &= run(3, "no three-color colorings", Some(secs(30)), three_color_floor);
    ok &= run(4, "pretzel simple reductions", None, pretzel_endpoints);
    let t0 = Instant::now();
    let samples = match catch_unwind(all_samples) {
        Ok(Ok(s)) => s,
        other => {
            println!("FAIL 5-7 could not sample five-color colorings: {other:?}");
            return ExitCode::FAILURE;
        }
    };
    let sampling = t0.elapsed();
    ok &= run(5, "five-color catalog", Some(secs(60) - sampling), || five_catalog(&samples));
    ok &= run(6, "palette graph structure", Some(secs(60) - sampling), || palette_structure(&samples));
    ok &= run(7, "five-color reductions", None, || five_reductions(&samples));
    ok &= run(8, "Smith normal form algebra", Some(secs(30)), snf_algebra);
    ok &= run(9, "move soundness fuzz", Some(secs(10)), move_fuzz);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
