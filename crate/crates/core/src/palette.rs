//! Palette graphs and the five-color catalog.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::Serialize;

use crate::coloring::{affine, all_crossing_colors, primitive_normalize, ColorImage, Coloring};
use crate::diagram::{Diagram, Dsu};

/// Colors as vertices; an edge for every pair of distinct under colors met at
/// some crossing, labeled by the over color there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaletteGraph {
    pub vertices: Vec<i64>,
    pub edges: Vec<(i64, i64, i64)>,
    pub loops_omitted: usize,
}

impl PaletteGraph {
    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Vertex sets of the connected components, each sorted, listed by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<i64>> {
        let idx = |c: i64| self.vertices.binary_search(&c).expect("edge endpoint is a vertex");
        let mut dsu = Dsu::new(self.vertices.len());
        for &(a, b, _) in &self.edges {
            dsu.union(idx(a), idx(b));
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<i64>> = Default::default();
        for (i, &v) in self.vertices.iter().enumerate() {
            groups.entry(dsu.find(i)).or_default().push(v);
        }
        let mut out: Vec<Vec<i64>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Edge set without labels, as sorted pairs.
    pub fn edge_pairs(&self) -> BTreeSet<(i64, i64)> {
        self.edges.iter().map(|&(a, b, _)| (a, b)).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph palette {\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{v}\";");
        }
        for (a, b, l) in &self.edges {
            let _ = writeln!(s, "  \"{a}\" -- \"{b}\" [label=\"{l}\"];");
        }
        s.push_str("}\n");
        s
    }
}

pub fn palette_graph(d: &Diagram, g: &Coloring) -> PaletteGraph {
    let mut edges = BTreeSet::new();
    let mut loops = 0;
    for x in all_crossing_colors(d, g) {
        if x.a == x.c {
            loops += 1;
        } else {
            edges.insert((x.a.min(x.c), x.a.max(x.c), x.b));
        }
    }
    PaletteGraph { vertices: g.image().0, edges: edges.into_iter().collect(), loops_omitted: loops }
}

/// The seven possible images of a primitive five-color coloring of a
/// non-split diagram.
pub const FIVE_CATALOG: [[i64; 5]; 7] = [
    [0, 1, 2, 3, 4],
    [0, 1, 2, 3, 5],
    [0, 1, 2, 3, 6],
    [0, 1, 2, 4, 7],
    [0, 2, 3, 4, 5],
    [0, 3, 4, 5, 6],
    [0, 3, 5, 6, 7],
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FiveClass {
    Canonical { image: ColorImage },
    NotInCatalog { image: ColorImage },
    NotFiveColors { colors: usize },
}

fn in_catalog(im: &ColorImage) -> bool {
    FIVE_CATALOG.iter().any(|c| c[..] == im.0[..])
}

/// Shifts to min 0 and divides by the gcd, then looks the image up in the
/// catalog, trying the flip `c -> max - c` second.
pub fn classify_five(g: &Coloring) -> FiveClass {
    let p = primitive_normalize(g);
    let im = p.image();
    if im.len() != 5 {
        return FiveClass::NotFiveColors { colors: im.len() };
    }
    if in_catalog(&im) {
        return FiveClass::Canonical { image: im };
    }
    let flipped = affine(&p, -1, im.highest()).expect("nonzero scale").image();
    if in_catalog(&flipped) {
        return FiveClass::Canonical { image: flipped };
    }
    FiveClass::NotInCatalog { image: im }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn classify_examples() {
        let g = Coloring::new(vec![0, 2, 4, 6, 10]);
        assert_eq!(classify_five(&g), FiveClass::Canonical { image: ColorImage(vec![0, 1, 2, 3, 5]) });
        let g = Coloring::new(vec![0, 2, 3, 4, 5]);
        assert_eq!(classify_five(&g), FiveClass::Canonical { image: ColorImage(vec![0, 2, 3, 4, 5]) });
        let g = Coloring::new(vec![-3, 3, 6, 9, 18]);
        assert_eq!(classify_five(&g), FiveClass::NotInCatalog { image: ColorImage(vec![0, 2, 3, 4, 7]) });
        assert_eq!(classify_five(&Coloring::new(vec![0, 1, 2, 3])), FiveClass::NotFiveColors { colors: 4 });
        assert!(matches!(classify_five(&Coloring::new(vec![0, 1, 2, 3, 9])), FiveClass::NotInCatalog { .. }));
    }

    #[test]
    fn trivial_palette() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let p = palette_graph(&d, &Coloring::constant(3, 5));
        assert_eq!(p.vertices, vec![5]);
        assert!(p.edges.is_empty());
        assert_eq!(p.loops_omitted, 3);
        assert_eq!(p.component_count(), 1);
    }

    #[test]
    fn dot_is_ordered() {
        let p = PaletteGraph { vertices: vec![0, 1, 2, 3, 4], edges: vec![(0, 2, 1), (1, 3, 2)], loops_omitted: 0 };
        let dot = p.to_dot();
        assert!(dot.starts_with("graph palette {\n  \"0\";"));
        assert!(dot.contains("\"1\" -- \"3\" [label=\"2\"];"));
        assert_eq!(p.components(), vec![vec![0, 2], vec![1, 3], vec![4]]);
    }
}
