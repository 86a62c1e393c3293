use std::collections::BTreeMap;

use zcolor_core::coloring::coloring_matrix;
use zcolor_core::fixtures::{fixture_dir, link_table, load};
use zcolor_core::{minor_determinant, parse_pd, pretzel, Diagram};

/// Closed strands, found by joining opposite slots at every crossing.
fn traversal_components(d: &Diagram) -> usize {
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    fn find(p: &mut BTreeMap<u32, u32>, x: u32) -> u32 {
        let up = *p.entry(x).or_insert(x);
        if up == x {
            x
        } else {
            let r = find(p, up);
            p.insert(x, r);
            r
        }
    }
    for q in d.crossings() {
        for (a, b) in [(q[0], q[2]), (q[1], q[3])] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent.insert(ra, rb);
        }
    }
    let labels: Vec<u32> = parent.keys().copied().collect();
    let mut roots: Vec<u32> = labels.into_iter().map(|l| find(&mut parent, l)).collect();
    roots.sort();
    roots.dedup();
    roots.len() + d.unknots()
}

fn everything() -> Vec<(String, Diagram)> {
    let mut out: Vec<(String, Diagram)> = link_table().unwrap().into_iter().map(|(n, d)| (n.to_string(), d)).collect();
    for n in ["trefoil", "figure8", "hopf", "kink"] {
        out.push((n.into(), load(n).unwrap()));
    }
    for tw in [vec![2, -2], vec![3, -3, 3, -3], vec![4, -4, 4, -4], vec![1, 2, 3], vec![-2, 5]] {
        out.push((format!("{tw:?}"), pretzel(&tw).unwrap()));
    }
    out
}

#[test]
fn structural_invariants() {
    for (name, d) in everything() {
        d.validate().unwrap();
        assert!(d.is_planar(), "{name}");
        assert_eq!(4 * d.crossing_count(), 2 * d.edge_count(), "{name}");
        let arcs = d.compute_arcs();
        let by_arc = arcs.edges_by_arc();
        assert_eq!(by_arc.len(), arcs.arc_count());
        assert_eq!(by_arc.iter().map(|a| a.len()).sum::<usize>(), d.edge_count(), "{name}");
        assert_eq!(d.compute_arcs(), arcs);
        assert_eq!(d.link_components(), traversal_components(&d), "{name}");
        assert!(d.link_components() <= arcs.arc_count().max(d.unknots()), "{name}");
        assert!(d.diagram_components() <= d.link_components(), "{name}");
    }
}

#[test]
fn text_and_json_round_trips() {
    for (name, d) in everything() {
        let text: String = d.crossings().iter().map(|q| format!("X[{},{},{},{}] ", q[0], q[1], q[2], q[3])).collect();
        assert_eq!(parse_pd(&text).unwrap(), d, "{name}");
        assert_eq!(Diagram::from_json(&d.to_json()).unwrap(), d, "{name}");
    }
}

#[test]
fn minors_agree_for_every_drop() {
    for (name, d) in everything() {
        let m = coloring_matrix(&d);
        if m.rows() != m.cols() {
            continue;
        }
        let first = minor_determinant(&m, 0, 0).unwrap();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                assert_eq!(minor_determinant(&m, i, j).unwrap(), first, "{name} drop ({i},{j})");
            }
        }
    }
}

#[test]
fn fixture_files_are_the_table() {
    let dir = fixture_dir();
    for (name, d) in link_table().unwrap() {
        assert!(dir.join(format!("{name}.pd")).is_file());
        assert_eq!(d.diagram_components(), 1, "{name}");
        assert!(d.link_components() >= 2, "{name}");
    }
}
