//! Coloring matrix, the coloring lattice and operations on single colorings.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::Diagram;
use crate::linalg::{integer_kernel_basis, minor_determinant, IntMatrix};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("coloring has {got} arc colors, diagram has {expected} arcs")]
    MissingArcColor { expected: usize, got: usize },
    #[error("affine scale must be nonzero")]
    ZeroScale,
    #[error("a color does not fit in 64 bits")]
    Overflow,
    #[error("bad coloring json: {0}")]
    Json(String),
}

/// Integer colors indexed by arc id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<i64>,
}

#[derive(Deserialize)]
struct RawColoring {
    arcs: std::collections::BTreeMap<String, i64>,
}

struct ArcMap<'a>(&'a [i64]);

impl Serialize for ArcMap<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (i, c) in self.0.iter().enumerate() {
            m.serialize_entry(&(i + 1).to_string(), c)?;
        }
        m.end()
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Coloring", 1)?;
        st.serialize_field("arcs", &ArcMap(&self.colors))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawColoring::deserialize(d)?;
        Coloring::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

/// Sorted distinct colors of a coloring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorImage(pub Vec<i64>);

impl ColorImage {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn lowest(&self) -> i64 {
        self.0[0]
    }
    pub fn highest(&self) -> i64 {
        *self.0.last().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringSpace {
    pub basis: Vec<Coloring>,
    pub trivials: Vec<Coloring>,
}

impl ColoringSpace {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Simplicity {
    Simple(i64),
    NotSimple,
    AllMonochrome,
}

/// Colors at one crossing: first under arc, over arc, second under arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrossingColors {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CrossingColors {
    pub fn is_mono(&self) -> bool {
        self.a == self.b && self.b == self.c
    }
    pub fn diff(&self) -> i64 {
        (self.b - self.a).abs()
    }
}

impl Coloring {
    pub fn new(colors: Vec<i64>) -> Self {
        Coloring { colors }
    }

    pub fn constant(arcs: usize, c: i64) -> Self {
        Coloring { colors: vec![c; arcs] }
    }

    pub fn colors(&self) -> &[i64] {
        &self.colors
    }

    pub fn get(&self, arc: usize) -> i64 {
        self.colors[arc]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn image(&self) -> ColorImage {
        let s: BTreeSet<i64> = self.colors.iter().copied().collect();
        ColorImage(s.into_iter().collect())
    }

    pub fn is_constant(&self) -> bool {
        self.colors.windows(2).all(|w| w[0] == w[1])
    }

    /// `{"arcs": {"1": c1, ...}}`, arcs numbered from 1.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloring json")
    }

    pub fn from_json(text: &str) -> Result<Self, ColoringError> {
        serde_json::from_str(text).map_err(|e| ColoringError::Json(e.to_string()))
    }

    fn from_raw(raw: RawColoring) -> Result<Self, ColoringError> {
        let mut colors = vec![None; raw.arcs.len()];
        for (k, v) in raw.arcs {
            let i: usize = k.parse().map_err(|_| ColoringError::Json(format!("arc key {k:?}")))?;
            if i == 0 || i > colors.len() {
                return Err(ColoringError::Json(format!("arc key {k:?} out of range")));
            }
            colors[i - 1] = Some(v);
        }
        let colors = colors.into_iter().collect::<Option<Vec<_>>>().ok_or(ColoringError::Json("gap in arc ids".into()))?;
        Ok(Coloring { colors })
    }
}

/// One row per crossing: +2 on the over arc, -1 on each under arc.
pub fn coloring_matrix(d: &Diagram) -> IntMatrix {
    let arcs = d.compute_arcs();
    let mut m = IntMatrix::zeros(d.crossing_count(), arcs.arc_count());
    for (i, q) in d.crossings().iter().enumerate() {
        m.add_to(i, arcs.arc_of(q[1]), 2);
        m.add_to(i, arcs.arc_of(q[0]), -1);
        m.add_to(i, arcs.arc_of(q[2]), -1);
    }
    m
}

/// Absolute value of the first minor of the coloring matrix. Disconnected
/// diagrams get 0, as do diagrams whose minor is not square (a component
/// lying entirely over the rest contributes a free arc).
pub fn determinant(d: &Diagram) -> BigInt {
    if d.diagram_components() != 1 {
        return BigInt::zero();
    }
    if d.crossing_count() == 0 {
        return BigInt::from(1);
    }
    minor_determinant(&coloring_matrix(d), 0, 0).unwrap_or_else(|_| BigInt::zero())
}

/// Diagram component of every arc, and the number of components.
pub fn arc_components(d: &Diagram) -> (Vec<usize>, usize) {
    let arcs = d.compute_arcs();
    let (xc, k) = d.crossing_component_ids();
    let mut out = vec![usize::MAX; arcs.arc_count()];
    for (i, q) in d.crossings().iter().enumerate() {
        for &e in q {
            out[arcs.arc_of(e)] = xc[i];
        }
    }
    for (j, slot) in out.iter_mut().filter(|s| **s == usize::MAX).enumerate() {
        *slot = k + j;
    }
    (out, k + d.unknots())
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>, ColoringError> {
    v.iter().map(|x| x.to_i64().ok_or(ColoringError::Overflow)).collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairwise size reduction of a lattice basis; keeps the lattice unchanged.
fn size_reduce(vs: &mut [Vec<BigInt>]) {
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 200 {
        changed = false;
        rounds += 1;
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                if i == j {
                    continue;
                }
                let nj = dot(&vs[j], &vs[j]);
                if nj.is_zero() {
                    continue;
                }
                let num = dot(&vs[i], &vs[j]);
                // nearest integer to num / nj
                let twice: BigInt = &num * 2 + &nj;
                let q = twice.div_floor(&(&nj * 2));
                if q.is_zero() {
                    continue;
                }
                let cand: Vec<BigInt> = vs[i].iter().zip(&vs[j]).map(|(x, y)| x - &q * y).collect();
                if dot(&cand, &cand) < dot(&vs[i], &vs[i]) {
                    vs[i] = cand;
                    changed = true;
                }
            }
        }
    }
}

pub fn coloring_space(d: &Diagram) -> Result<ColoringSpace, ColoringError> {
    let mut basis = integer_kernel_basis(&coloring_matrix(d));
    size_reduce(&mut basis);
    let basis = basis.iter().map(|v| to_i64(v).map(Coloring::new)).collect::<Result<Vec<_>, _>>()?;
    let (comp, k) = arc_components(d);
    let trivials = (0..k)
        .map(|c| Coloring::new(comp.iter().map(|&x| i64::from(x == c)).collect()))
        .collect();
    Ok(ColoringSpace { basis, trivials })
}

fn constant_on_components(g: &Coloring, comp: &[usize], k: usize) -> bool {
    let mut seen: Vec<Option<i64>> = vec![None; k];
    g.colors.iter().zip(comp).all(|(&c, &x)| *seen[x].get_or_insert(c) == c)
}

/// A coloring outside the span of per-component constants, shifted to min 0.
pub fn find_nontrivial_coloring(d: &Diagram) -> Option<Coloring> {
    let space = coloring_space(d).ok()?;
    let (comp, k) = arc_components(d);
    if space.rank() <= k {
        return None;
    }
    space
        .basis
        .iter()
        .filter(|g| !constant_on_components(g, &comp, k))
        .min_by_key(|g| {
            let p = primitive_normalize(g);
            (p.image().len(), p.image().highest())
        })
        .map(normalize_min_zero)
}

/// Colors of crossing `i` as `{a|b|c}` with `a`, `c` the under arcs.
pub fn crossing_colors(d: &Diagram, arcs: &crate::diagram::ArcPartition, g: &Coloring, i: usize) -> CrossingColors {
    let q = d.crossings()[i];
    CrossingColors { a: g.get(arcs.arc_of(q[0])), b: g.get(arcs.arc_of(q[1])), c: g.get(arcs.arc_of(q[2])) }
}

pub fn all_crossing_colors(d: &Diagram, g: &Coloring) -> Vec<CrossingColors> {
    let arcs = d.compute_arcs();
    (0..d.crossing_count()).map(|i| crossing_colors(d, &arcs, g, i)).collect()
}

pub fn verify_coloring(d: &Diagram, g: &Coloring) -> Result<bool, ColoringError> {
    let arcs = d.compute_arcs();
    if g.len() != arcs.arc_count() {
        return Err(ColoringError::MissingArcColor { expected: arcs.arc_count(), got: g.len() });
    }
    Ok((0..d.crossing_count()).all(|i| {
        let x = crossing_colors(d, &arcs, g, i);
        2 * x.b == x.a + x.c
    }))
}

pub fn normalize_min_zero(g: &Coloring) -> Coloring {
    let m = g.colors.iter().copied().min().unwrap_or(0);
    Coloring::new(g.colors.iter().map(|c| c - m).collect())
}

/// Every color `c` becomes `p*c + q`.
pub fn affine(g: &Coloring, p: i64, q: i64) -> Result<Coloring, ColoringError> {
    if p == 0 {
        return Err(ColoringError::ZeroScale);
    }
    g.colors
        .iter()
        .map(|&c| p.checked_mul(c).and_then(|x| x.checked_add(q)).ok_or(ColoringError::Overflow))
        .collect::<Result<Vec<_>, _>>()
        .map(Coloring::new)
}

/// Shift to min 0, then divide by the gcd of the colors.
pub fn primitive_normalize(g: &Coloring) -> Coloring {
    let z = normalize_min_zero(g);
    let gcd = z.colors.iter().fold(0i64, |a, &b| a.gcd(&b));
    if gcd <= 1 {
        return z;
    }
    Coloring::new(z.colors.iter().map(|c| c / gcd).collect())
}

/// The common nonzero over/under difference, if there is exactly one.
pub fn is_simple(d: &Diagram, g: &Coloring) -> Simplicity {
    let mut gap = 0;
    for x in all_crossing_colors(d, g) {
        for diff in [(x.b - x.a).abs(), (x.b - x.c).abs()] {
            if diff == 0 {
                continue;
            }
            if gap == 0 {
                gap = diff;
            } else if gap != diff {
                return Simplicity::NotSimple;
            }
        }
    }
    if gap == 0 {
        Simplicity::AllMonochrome
    } else {
        Simplicity::Simple(gap)
    }
}

/// Colors one diagram component 0 and the rest 1, when the diagram is split.
pub fn split_two_coloring(d: &Diagram) -> Option<Coloring> {
    let (comp, k) = arc_components(d);
    if k < 2 {
        return None;
    }
    Some(Coloring::new(comp.iter().map(|&c| i64::from(c != 0)).collect()))
}

/// Coefficient sequence 0, 1, -1, 2, -2, ...
fn coeff(digit: usize) -> i64 {
    let k = digit.div_ceil(2) as i64;
    if digit % 2 == 1 {
        k
    } else {
        -k
    }
}

/// Searches integer combinations of the kernel basis with coefficients in
/// `[-bound, bound]` for a non-constant coloring with at most `max_colors`
/// colors. The witness is the first hit in a fixed enumeration order.
pub fn bounded_small_image_search(d: &Diagram, max_colors: usize, coeff_bound: u32) -> Option<Coloring> {
    let space = coloring_space(d).ok()?;
    let r = space.rank();
    if r == 0 {
        return None;
    }
    let base = 2 * coeff_bound as usize + 1;
    let total = base.checked_pow(r as u32)?;
    let basis = &space.basis;
    let arcs = basis[0].len();
    par::find_first(total, |idx| {
        let mut rest = idx;
        let mut colors = vec![0i64; arcs];
        for b in basis {
            let c = coeff(rest % base);
            rest /= base;
            if c != 0 {
                for (acc, &v) in colors.iter_mut().zip(b.colors()) {
                    *acc += c * v;
                }
            }
        }
        let g = Coloring::new(colors);
        (!g.is_constant() && g.image().len() <= max_colors).then(|| normalize_min_zero(&g))
    })
}
