//! Link diagrams in planar-diagram (PD) notation.
//!
//! A crossing is a quadruple of edge labels listed counterclockwise, starting
//! at the incoming under-edge. Slots 0 and 2 carry the under strand, slots 1
//! and 3 the over strand.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type EdgeId = u32;

/// One crossing: edge labels counterclockwise from the incoming under-edge.
pub type Quad = [EdgeId; 4];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("malformed token at byte {pos}: {found:?}")]
    MalformedToken { pos: usize, found: String },
    #[error("edge {edge} occurs {count} time(s), expected exactly 2")]
    EdgeMultiplicity { edge: EdgeId, count: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("edge label {edge} lies outside 1..={max}")]
    DanglingEdge { edge: EdgeId, max: EdgeId },
    #[error("band {index} of the pretzel spec has zero twists")]
    ZeroTwistEntry { index: usize },
    #[error("strand orientation conflict at crossing {crossing}")]
    OrientationConflict { crossing: usize },
}

/// A validated link diagram. Crossing-free unknot components are kept as a
/// count rather than as fake kinks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "DiagramJson", into = "DiagramJson")]
pub struct Diagram {
    crossings: Vec<Quad>,
    unknots: usize,
}

/// Partition of edges into arcs. Arc ids are 0-based and ordered by the
/// smallest edge label they contain; unknot components come last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcPartition {
    arc_of_edge: Vec<usize>,
    arc_count: usize,
}

impl ArcPartition {
    pub fn arc_of(&self, e: EdgeId) -> usize {
        self.arc_of_edge[e as usize]
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// Edges of each arc, in increasing label order.
    pub fn edges_by_arc(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.arc_count];
        for e in 1..self.arc_of_edge.len() {
            out[self.arc_of_edge[e]].push(e as EdgeId);
        }
        out
    }
}

/// A position on a crossing: crossing index plus slot 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub crossing: usize,
    pub slot: u8,
}

impl Dart {
    pub fn new(crossing: usize, slot: u8) -> Self {
        Dart { crossing, slot }
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    crossings: Vec<Quad>,
    unknots: usize,
}

impl From<Diagram> for DiagramJson {
    fn from(d: Diagram) -> Self {
        DiagramJson { crossings: d.crossings, unknots: d.unknots }
    }
}

impl TryFrom<DiagramJson> for Diagram {
    type Error = DiagramError;
    fn try_from(raw: DiagramJson) -> Result<Self, DiagramError> {
        if raw.crossings.is_empty() && raw.unknots == 0 {
            return Err(DiagramError::EmptyInput);
        }
        Diagram::from_quads(raw.crossings, raw.unknots)
    }
}

pub(crate) struct Dsu(Vec<usize>);

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl Diagram {
    /// Builds and validates a diagram from quads whose labels are already 1..=2n.
    pub fn new(crossings: Vec<Quad>, unknots: usize) -> Result<Self, DiagramError> {
        let d = Diagram { crossings, unknots };
        d.validate()?;
        Ok(d)
    }

    /// Relabels edges in first-appearance order, then validates.
    pub fn from_quads(crossings: Vec<Quad>, unknots: usize) -> Result<Self, DiagramError> {
        check_multiplicity(&crossings)?;
        let d = Diagram { crossings: renumber(&crossings), unknots };
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn from_canonical_unchecked(crossings: Vec<Quad>, unknots: usize) -> Self {
        Diagram { crossings, unknots }
    }

    pub fn crossings(&self) -> &[Quad] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.crossings.len()
    }

    pub fn unknots(&self) -> usize {
        self.unknots
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        check_multiplicity(&self.crossings)?;
        let max = self.edge_count() as EdgeId;
        for q in &self.crossings {
            for &e in q {
                if e == 0 || e > max {
                    return Err(DiagramError::DanglingEdge { edge: e, max });
                }
            }
        }
        self.over_in_slots().map(|_| ())
    }

    /// Both occurrences of every edge label, indexed by label.
    pub fn occurrences(&self) -> Vec<[Dart; 2]> {
        let mut occ = vec![[Dart::new(usize::MAX, 0); 2]; self.edge_count() + 1];
        let mut seen = vec![0usize; self.edge_count() + 1];
        for (i, q) in self.crossings.iter().enumerate() {
            for (s, &e) in q.iter().enumerate() {
                occ[e as usize][seen[e as usize]] = Dart::new(i, s as u8);
                seen[e as usize] += 1;
            }
        }
        occ
    }

    /// The other end of the edge leaving through `d`.
    pub fn mate(&self, occ: &[[Dart; 2]], d: Dart) -> Dart {
        let e = self.crossings[d.crossing][d.slot as usize] as usize;
        if occ[e][0] == d {
            occ[e][1]
        } else {
            occ[e][0]
        }
    }

    pub fn compute_arcs(&self) -> ArcPartition {
        let n_e = self.edge_count();
        let mut dsu = Dsu::new(n_e + 1);
        for q in &self.crossings {
            dsu.union(q[1] as usize, q[3] as usize);
        }
        let mut arc_of_edge = vec![0; n_e + 1];
        let mut ids: HashMap<usize, usize> = HashMap::new();
        for (e, slot) in arc_of_edge.iter_mut().enumerate().skip(1) {
            let r = dsu.find(e);
            let next = ids.len();
            *slot = *ids.entry(r).or_insert(next);
        }
        ArcPartition { arc_of_edge, arc_count: ids.len() + self.unknots }
    }

    /// Connected components of the 4-valent graph; each crossing-free unknot counts once.
    pub fn diagram_components(&self) -> usize {
        self.crossing_component_ids().1 + self.unknots
    }

    /// Component index of every crossing, and the number of such components.
    pub fn crossing_component_ids(&self) -> (Vec<usize>, usize) {
        let n = self.crossings.len();
        let mut dsu = Dsu::new(n);
        let occ = self.occurrences();
        for pair in occ.iter().skip(1) {
            dsu.union(pair[0].crossing, pair[1].crossing);
        }
        let mut ids = HashMap::new();
        let mut out = vec![0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let r = dsu.find(i);
            let next = ids.len();
            *slot = *ids.entry(r).or_insert(next);
        }
        (out, ids.len())
    }

    /// Closed strands, traversing straight through every crossing.
    pub fn link_components(&self) -> usize {
        let occ = self.occurrences();
        let mut seen = vec![false; self.edge_count() + 1];
        let mut count = 0;
        for start in 1..=self.edge_count() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut d = occ[start][0];
            loop {
                let e = self.crossings[d.crossing][d.slot as usize] as usize;
                if seen[e] {
                    break;
                }
                seen[e] = true;
                let m = self.mate(&occ, d);
                d = Dart::new(m.crossing, (m.slot + 2) % 4);
            }
        }
        count + self.unknots
    }

    /// For every crossing, the over slot (1 or 3) through which the over strand
    /// enters. Components that never pass under get the direction in which
    /// their first occurrence (crossing order, then slot) is an entry.
    pub fn over_in_slots(&self) -> Result<Vec<u8>, DiagramError> {
        let n = self.crossings.len();
        let occ = self.occurrences();
        let mut over_in = vec![0u8; n];
        let mut visited = vec![false; self.edge_count() + 1];
        let mut starts: Vec<Dart> = (0..n).map(|i| Dart::new(i, 0)).collect();
        for i in 0..n {
            for s in [1u8, 3] {
                starts.push(Dart::new(i, s));
            }
        }
        for entry in starts {
            let e0 = self.crossings[entry.crossing][entry.slot as usize] as usize;
            if visited[e0] {
                continue;
            }
            // `entry` is where the strand arrives; walk forward from it.
            let mut at = entry;
            loop {
                let x = at.crossing;
                match at.slot {
                    0 => {}
                    2 => return Err(DiagramError::OrientationConflict { crossing: x }),
                    s => {
                        if over_in[x] != 0 && over_in[x] != s {
                            return Err(DiagramError::OrientationConflict { crossing: x });
                        }
                        over_in[x] = s;
                    }
                }
                let out = Dart::new(x, (at.slot + 2) % 4);
                let e = self.crossings[x][out.slot as usize] as usize;
                if visited[e] {
                    break;
                }
                visited[e] = true;
                at = self.mate(&occ, out);
            }
        }
        Ok(over_in)
    }

    /// Faces as cyclic lists of darts; each dart leaves its crossing and has
    /// its face on the left.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let occ = self.occurrences();
        let n = self.crossings.len();
        let mut seen = vec![[false; 4]; n];
        let mut faces = Vec::new();
        for x in 0..n {
            for s in 0..4u8 {
                if seen[x][s as usize] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = Dart::new(x, s);
                while !seen[d.crossing][d.slot as usize] {
                    seen[d.crossing][d.slot as usize] = true;
                    face.push(d);
                    let m = self.mate(&occ, d);
                    d = Dart::new(m.crossing, (m.slot + 3) % 4);
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Euler characteristic test: every connected piece must be a sphere.
    pub fn is_planar(&self) -> bool {
        let v = self.crossings.len() as i64;
        let (_, k) = self.crossing_component_ids();
        v - 2 * v + self.faces().len() as i64 == 2 * k as i64
    }

    /// Crossing signs (+1 / -1) under the derived orientation.
    pub fn crossing_signs(&self) -> Result<Vec<i8>, DiagramError> {
        Ok(self.over_in_slots()?.into_iter().map(|s| if s == 3 { 1 } else { -1 }).collect())
    }

    pub fn writhe(&self) -> Result<i64, DiagramError> {
        Ok(self.crossing_signs()?.iter().map(|&s| s as i64).sum())
    }

    /// Disjoint union; labels of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &Diagram) -> Diagram {
        let shift = self.edge_count() as EdgeId;
        let mut xs = self.crossings.clone();
        xs.extend(other.crossings.iter().map(|q| q.map(|e| e + shift)));
        Diagram { crossings: xs, unknots: self.unknots + other.unknots }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagram json")
    }

    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let raw: DiagramJson = serde_json::from_str(text).map_err(|e| DiagramError::MalformedToken {
            pos: e.column(),
            found: e.to_string(),
        })?;
        Diagram::try_from(raw)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for q in &self.crossings {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "X[{},{},{},{}]", q[0], q[1], q[2], q[3])?;
        }
        for _ in 0..self.unknots {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str("Loop[]")?;
        }
        Ok(())
    }
}

fn check_multiplicity(xs: &[Quad]) -> Result<(), DiagramError> {
    let mut count: HashMap<EdgeId, usize> = HashMap::new();
    for q in xs {
        for &e in q {
            *count.entry(e).or_default() += 1;
        }
    }
    let mut bad: Vec<_> = count.into_iter().filter(|&(_, c)| c != 2).collect();
    bad.sort();
    match bad.first() {
        Some(&(edge, count)) => Err(DiagramError::EdgeMultiplicity { edge, count }),
        None => Ok(()),
    }
}

pub(crate) fn renumber(xs: &[Quad]) -> Vec<Quad> {
    let mut map: HashMap<EdgeId, EdgeId> = HashMap::new();
    xs.iter()
        .map(|q| {
            q.map(|e| {
                let next = map.len() as EdgeId + 1;
                *map.entry(e).or_insert(next)
            })
        })
        .collect()
}

/// Parses PD text: `X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]`, optionally wrapped in
/// `PD[...]`. `Loop[]` adds a crossing-free unknot component.
pub fn parse_pd(text: &str) -> Result<Diagram, DiagramError> {
    let b = text.as_bytes();
    let mut i = 0;
    let mut xs = Vec::new();
    let mut unknots = 0;
    let mut depth = 0usize;
    let skip = |i: &mut usize| {
        while *i < b.len() && (b[*i].is_ascii_whitespace() || b[*i] == b',') {
            *i += 1;
        }
    };
    let bad = |pos: usize| DiagramError::MalformedToken {
        pos,
        found: text[pos..].chars().take(12).collect(),
    };
    loop {
        skip(&mut i);
        if i >= b.len() {
            break;
        }
        if text[i..].starts_with("PD[") {
            depth += 1;
            i += 3;
        } else if b[i] == b']' && depth > 0 {
            depth -= 1;
            i += 1;
        } else if text[i..].starts_with("Loop[]") {
            unknots += 1;
            i += 6;
        } else if b[i] == b'X' {
            let start = i;
            i += 1;
            skip_ws(b, &mut i);
            if i >= b.len() || b[i] != b'[' {
                return Err(bad(start));
            }
            i += 1;
            let mut q = [0; 4];
            for (k, slot) in q.iter_mut().enumerate() {
                skip_ws(b, &mut i);
                let s = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                *slot = text[s..i].parse().map_err(|_| bad(start))?;
                skip_ws(b, &mut i);
                let want = if k == 3 { b']' } else { b',' };
                if i >= b.len() || b[i] != want {
                    return Err(bad(start));
                }
                i += 1;
            }
            xs.push(q);
        } else {
            return Err(bad(i));
        }
    }
    if depth != 0 {
        return Err(bad(text.len()));
    }
    if xs.is_empty() && unknots == 0 {
        return Err(DiagramError::EmptyInput);
    }
    Diagram::from_quads(xs, unknots)
}

fn skip_ws(b: &[u8], i: &mut usize) {
    while *i < b.len() && b[*i].is_ascii_whitespace() {
        *i += 1;
    }
}

/// Builds a diagram from counterclockwise rotation quads that do not yet start
/// at the incoming under-edge. `over02[i]` says positions 0 and 2 of crossing
/// `i` form the over strand. Strands are oriented from their first occurrence.
pub fn from_rotation(quads: &[Quad], over02: &[bool]) -> Result<Diagram, DiagramError> {
    check_multiplicity(quads)?;
    let n = quads.len();
    let mut occ: HashMap<EdgeId, Vec<(usize, usize)>> = HashMap::new();
    for (i, q) in quads.iter().enumerate() {
        for (s, &e) in q.iter().enumerate() {
            occ.entry(e).or_default().push((i, s));
        }
    }
    let mate = |i: usize, s: usize| -> (usize, usize) {
        let v = &occ[&quads[i][s]];
        if v[0] == (i, s) {
            v[1]
        } else {
            v[0]
        }
    };
    // entry[i][p] = strand enters crossing i through position p
    let mut entry = vec![[false; 4]; n];
    let mut done = vec![[false; 4]; n];
    for i in 0..n {
        for p in 0..4 {
            if done[i][p] {
                continue;
            }
            let (mut x, mut s) = (i, p);
            while !done[x][s] {
                done[x][s] = true;
                entry[x][s] = true;
                let out = (s + 2) % 4;
                done[x][out] = true;
                let (y, t) = mate(x, out);
                x = y;
                s = t;
            }
        }
    }
    let rotated: Vec<Quad> = (0..n)
        .map(|i| {
            let under = if over02[i] { [1, 3] } else { [0, 2] };
            let start = if entry[i][under[0]] { under[0] } else { under[1] };
            [0, 1, 2, 3].map(|k| quads[i][(start + k) % 4])
        })
        .collect();
    Diagram::from_quads(rotated, 0)
}

/// Pretzel diagram with one vertical twist band per entry.
pub fn pretzel(twists: &[i64]) -> Result<Diagram, DiagramError> {
    if twists.is_empty() {
        return Err(DiagramError::EmptyInput);
    }
    if let Some(index) = twists.iter().position(|&t| t == 0) {
        return Err(DiagramError::ZeroTwistEntry { index });
    }
    // positions per crossing, counterclockwise: NE, NW, SW, SE
    const NE: usize = 0;
    const NW: usize = 1;
    const SW: usize = 2;
    const SE: usize = 3;
    let mut quads: Vec<Quad> = Vec::new();
    let mut over02 = Vec::new();
    let mut next: EdgeId = 1;
    let mut fresh = || {
        let e = next;
        next += 1;
        e
    };
    // band ends: (top-left, top-right, bottom-left, bottom-right) as (crossing, position)
    let mut ends = Vec::new();
    for &t in twists {
        let m = t.unsigned_abs() as usize;
        let base = quads.len();
        for _ in 0..m {
            quads.push([0; 4]);
            // NE-SW over for positive bands, NW-SE over for negative ones
            over02.push(t > 0);
        }
        for j in 0..m - 1 {
            let l = fresh();
            let r = fresh();
            quads[base + j][SW] = l;
            quads[base + j + 1][NW] = l;
            quads[base + j][SE] = r;
            quads[base + j + 1][NE] = r;
        }
        ends.push(((base, NW), (base, NE), (base + m - 1, SW), (base + m - 1, SE)));
    }
    let k = ends.len();
    for i in 0..k {
        let j = (i + 1) % k;
        let top = fresh();
        let bot = fresh();
        let (tr, br) = (ends[i].1, ends[i].3);
        let (tl, bl) = (ends[j].0, ends[j].2);
        quads[tr.0][tr.1] = top;
        quads[tl.0][tl.1] = top;
        quads[br.0][br.1] = bot;
        quads[bl.0][bl.1] = bot;
    }
    from_rotation(&quads, &over02)
}
