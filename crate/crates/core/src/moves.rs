//! Primitive Reidemeister moves on colored diagrams.
//!
//! Moves address crossings by their index in the diagram they are applied to
//! and edges by darts. A dart `(x, s)` stands for the edge leaving crossing
//! `x` through slot `s`; the face to its left is the face of the dart.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{Coloring, ColoringError, CrossingColors};
use crate::diagram::{renumber, Dart, Diagram, DiagramError, EdgeId, Quad};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("coloring relation would break at crossing {crossing}")]
    ColorMismatch { crossing: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    /// Kink on the edge of `dart`, looping into the dart's face. `first_over`
    /// makes the pass nearer the dart's crossing the over pass.
    #[serde(rename = "R1_add")]
    R1Add { dart: Dart, first_over: bool },
    /// Removes a kink crossing.
    #[serde(rename = "R1_remove")]
    R1Remove { crossing: usize },
    /// Pushes a finger of the `over` edge across the `under` edge; both darts
    /// must share a face.
    #[serde(rename = "R2_push")]
    R2Push { over: Dart, under: Dart },
    /// Removes the bigon face of `face`.
    #[serde(rename = "R2_pop")]
    R2Pop { face: Dart },
    /// Slides across the triangle face of `face`.
    #[serde(rename = "R3_slide")]
    R3Slide { face: Dart },
}

impl Move {
    pub(crate) fn map_crossings(self, f: impl Fn(usize) -> usize) -> Move {
        let md = |d: Dart| Dart::new(f(d.crossing), d.slot);
        match self {
            Move::R1Add { dart, first_over } => Move::R1Add { dart: md(dart), first_over },
            Move::R1Remove { crossing } => Move::R1Remove { crossing: f(crossing) },
            Move::R2Push { over, under } => Move::R2Push { over: md(over), under: md(under) },
            Move::R2Pop { face } => Move::R2Pop { face: md(face) },
            Move::R3Slide { face } => Move::R3Slide { face: md(face) },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Move::R1Add { .. } => "R1_add",
            Move::R1Remove { .. } => "R1_remove",
            Move::R2Push { .. } => "R2_push",
            Move::R2Pop { .. } => "R2_pop",
            Move::R3Slide { .. } => "R3_slide",
        }
    }
}

fn illegal<T>(msg: impl Into<String>) -> Result<T, MoveError> {
    Err(MoveError::IllegalMove(msg.into()))
}

fn opp(s: u8) -> u8 {
    (s + 2) % 4
}

/// Mutable diagram with stable crossing ids and per-edge colors.
#[derive(Debug, Clone)]
pub(crate) struct Work {
    quads: Vec<Option<Quad>>,
    over_in: Vec<u8>,
    color: Vec<i64>,
    unknot_colors: Vec<i64>,
}

impl Work {
    pub(crate) fn from_snapshot(d: &Diagram, g: &Coloring) -> Result<Work, MoveError> {
        let arcs = d.compute_arcs();
        if g.len() != arcs.arc_count() {
            return Err(ColoringError::MissingArcColor { expected: arcs.arc_count(), got: g.len() }.into());
        }
        let over_in = d.over_in_slots()?;
        let mut color = vec![0; d.edge_count() + 1];
        for (e, c) in color.iter_mut().enumerate().skip(1) {
            *c = g.get(arcs.arc_of(e as EdgeId));
        }
        let first_unknot = arcs.arc_count() - d.unknots();
        Ok(Work {
            quads: d.crossings().iter().map(|q| Some(*q)).collect(),
            over_in,
            color,
            unknot_colors: g.colors()[first_unknot..].to_vec(),
        })
    }

    pub(crate) fn live(&self) -> Vec<usize> {
        (0..self.quads.len()).filter(|&i| self.quads[i].is_some()).collect()
    }

    pub(crate) fn is_live(&self, id: usize) -> bool {
        self.quads.get(id).is_some_and(|q| q.is_some())
    }

    pub(crate) fn quad(&self, id: usize) -> Quad {
        self.quads[id].expect("live crossing")
    }

    pub(crate) fn label(&self, d: Dart) -> EdgeId {
        self.quad(d.crossing)[d.slot as usize]
    }

    pub(crate) fn color(&self, e: EdgeId) -> i64 {
        self.color[e as usize]
    }

    pub(crate) fn color_at(&self, d: Dart) -> i64 {
        self.color(self.label(d))
    }

    pub(crate) fn crossing_colors(&self, id: usize) -> CrossingColors {
        let q = self.quad(id);
        CrossingColors { a: self.color(q[0]), b: self.color(q[1]), c: self.color(q[2]) }
    }

    /// Snapshot index of a live crossing id.
    pub(crate) fn index_of(&self, id: usize) -> usize {
        self.quads[..id].iter().filter(|q| q.is_some()).count()
    }

    pub(crate) fn snapshot(&self) -> (Diagram, Coloring) {
        let live: Vec<Quad> = self.quads.iter().flatten().copied().collect();
        let canon = renumber(&live);
        let d = Diagram::from_canonical_unchecked(canon.clone(), self.unknot_colors.len());
        let arcs = d.compute_arcs();
        let mut colors = vec![0; arcs.arc_count()];
        for (q, c) in live.iter().zip(&canon) {
            for k in 0..4 {
                colors[arcs.arc_of(c[k])] = self.color(q[k]);
            }
        }
        let first_unknot = arcs.arc_count() - self.unknot_colors.len();
        colors[first_unknot..].copy_from_slice(&self.unknot_colors);
        (d, Coloring::new(colors))
    }

    /// Recomputes strand directions the same way a fresh snapshot would, so
    /// that replaying from snapshots builds identical crossings.
    fn reorient(&mut self) -> Result<(), MoveError> {
        let (d, _) = self.snapshot();
        let slots = d.over_in_slots()?;
        for (id, s) in self.live().into_iter().zip(slots) {
            self.over_in[id] = s;
        }
        Ok(())
    }

    fn fresh(&mut self, c: i64) -> EdgeId {
        self.color.push(c);
        (self.color.len() - 1) as EdgeId
    }

    fn push_crossing(&mut self, q: Quad, over_in: u8) -> usize {
        self.quads.push(Some(q));
        self.over_in.push(over_in);
        self.quads.len() - 1
    }

    fn set(&mut self, d: Dart, e: EdgeId) {
        self.quads[d.crossing].as_mut().expect("live crossing")[d.slot as usize] = e;
    }

    /// The other occurrence of the edge at `d`.
    pub(crate) fn mate(&self, d: Dart) -> Dart {
        let e = self.label(d);
        for (i, q) in self.quads.iter().enumerate() {
            if let Some(q) = q {
                for s in 0..4u8 {
                    if q[s as usize] == e && (i != d.crossing || s != d.slot) {
                        return Dart::new(i, s);
                    }
                }
            }
        }
        unreachable!("edge {e} occurs once")
    }

    fn other_occurrence(&self, e: EdgeId, not: &[usize]) -> Option<Dart> {
        for (i, q) in self.quads.iter().enumerate() {
            if let Some(q) = q {
                if not.contains(&i) {
                    continue;
                }
                if let Some(s) = q.iter().position(|&x| x == e) {
                    return Some(Dart::new(i, s as u8));
                }
            }
        }
        None
    }

    pub(crate) fn next_in_face(&self, d: Dart) -> Dart {
        let m = self.mate(d);
        Dart::new(m.crossing, (m.slot + 3) % 4)
    }

    pub(crate) fn face(&self, d: Dart) -> Vec<Dart> {
        let mut out = vec![d];
        let mut cur = self.next_in_face(d);
        while cur != d {
            out.push(cur);
            cur = self.next_in_face(cur);
        }
        out
    }

    /// True when the strand leaves the crossing through `d`.
    pub(crate) fn is_out(&self, d: Dart) -> bool {
        match d.slot {
            0 => false,
            2 => true,
            s => s != self.over_in[d.crossing],
        }
    }

    fn check_dart(&self, d: Dart) -> Result<(), MoveError> {
        if !self.is_live(d.crossing) || d.slot > 3 {
            return illegal(format!("no dart ({}, {})", d.crossing, d.slot));
        }
        Ok(())
    }

    fn check_relation(&self, id: usize) -> Result<(), MoveError> {
        let x = self.crossing_colors(id);
        if 2 * x.b != x.a + x.c {
            return Err(MoveError::ColorMismatch { crossing: id });
        }
        Ok(())
    }

    /// Applies a move whose crossing references are stable ids. Returns the
    /// ids of crossings created by the move.
    pub(crate) fn apply(&mut self, m: Move) -> Result<Vec<usize>, MoveError> {
        let made = self.apply_local(m)?;
        self.reorient()?;
        Ok(made)
    }

    /// The move itself, leaving `over_in` stale away from the new crossings.
    fn apply_local(&mut self, m: Move) -> Result<Vec<usize>, MoveError> {
        Ok(match m {
            Move::R1Add { dart, first_over } => vec![self.r1_add(dart, first_over)?],
            Move::R1Remove { crossing } => {
                self.r1_remove(crossing)?;
                vec![]
            }
            Move::R2Push { over, under } => {
                let (x, y) = self.r2_push(over, under)?;
                vec![x, y]
            }
            Move::R2Pop { face } => {
                self.r2_pop(face)?;
                vec![]
            }
            Move::R3Slide { face } => {
                self.r3(face)?;
                vec![]
            }
        })
    }

    fn r1_add(&mut self, d: Dart, first_over: bool) -> Result<usize, MoveError> {
        self.check_dart(d)?;
        let c = self.color_at(d);
        let near = self.label(d);
        let far_end = self.mate(d);
        let forward = self.is_out(d);
        let far = self.fresh(c);
        let lp = self.fresh(c);
        // Corners counterclockwise: near SW, far SE, loop NE and NW.
        let (q, over_in) = match (forward, first_over) {
            (true, true) => ([lp, near, far, lp], 1),
            (true, false) => ([near, far, lp, lp], 3),
            (false, true) => ([far, lp, lp, near], 1),
            (false, false) => ([lp, lp, near, far], 3),
        };
        self.set(far_end, far);
        Ok(self.push_crossing(q, over_in))
    }

    fn r1_remove(&mut self, id: usize) -> Result<(), MoveError> {
        if !self.is_live(id) {
            return illegal(format!("no crossing {id}"));
        }
        let q = self.quad(id);
        let Some(s) = (0..4).find(|&s| q[s] == q[(s + 1) % 4]) else {
            return illegal(format!("crossing {id} is not a kink"));
        };
        let (l, p, r) = (q[s], q[(s + 2) % 4], q[(s + 3) % 4]);
        if p == r {
            return illegal(format!("removing kink {id} leaves a crossing-free loop"));
        }
        if self.color(p) != self.color(r) || self.color(l) != self.color(p) {
            return Err(MoveError::ColorMismatch { crossing: id });
        }
        let end = self.other_occurrence(r, &[id]).expect("edge has two ends");
        self.quads[id] = None;
        self.set(end, p);
        Ok(())
    }

    fn r2_push(&mut self, a: Dart, b: Dart) -> Result<(usize, usize), MoveError> {
        self.check_dart(a)?;
        self.check_dart(b)?;
        let (la, lb) = (self.label(a), self.label(b));
        if la == lb {
            return illegal("R2 push of an edge across itself");
        }
        if !self.face(a).contains(&b) {
            return illegal("R2 push darts do not share a face");
        }
        let (ca, cb) = (self.color(la), self.color(lb));
        let mid = ca.checked_mul(2).and_then(|x| x.checked_sub(cb)).ok_or(ColoringError::Overflow)?;
        let (ha, hb) = (self.mate(a), self.mate(b));
        let (fa, fb) = (self.is_out(a), self.is_out(b));
        let la1 = self.fresh(ca);
        let am = self.fresh(ca);
        let bm = self.fresh(mid);
        let lb2 = self.fresh(cb);
        self.set(ha, la1);
        self.set(hb, lb2);
        let (qx, ox) = place([lb, am, bm, la1], if fb { lb } else { bm }, if fa { am } else { la1 });
        let (qy, oy) = place([bm, am, lb2, la], if fb { bm } else { lb2 }, if fa { la } else { am });
        let x = self.push_crossing(qx, ox);
        let y = self.push_crossing(qy, oy);
        Ok((x, y))
    }

    fn r2_pop(&mut self, f: Dart) -> Result<(), MoveError> {
        self.check_dart(f)?;
        let face = self.face(f);
        if face.len() != 2 || face[0].crossing == face[1].crossing {
            return illegal("R2 pop needs a bigon between two crossings");
        }
        let (d1, d2) = (face[0], face[1]);
        let (x, y) = (d1.crossing, d2.crossing);
        let m1 = self.mate(d1);
        let m2 = self.mate(d2);
        let odd = |s: u8| s % 2 == 1;
        if odd(d1.slot) != odd(m1.slot) || odd(d2.slot) != odd(m2.slot) || odd(d1.slot) == odd(d2.slot) {
            return illegal("bigon strands alternate over and under");
        }
        let (qx, qy) = (self.quad(x), self.quad(y));
        let p1 = qx[opp(d1.slot) as usize];
        let q1 = qy[opp(m1.slot) as usize];
        let p2 = qy[opp(d2.slot) as usize];
        let q2 = qx[opp(m2.slot) as usize];
        let outer = [p1, q1, p2, q2];
        let inner = [self.label(d1), self.label(d2)];
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| outer[i] != outer[j])) && outer.iter().all(|e| !inner.contains(e));
        if !distinct {
            return illegal("bigon is not bounded by four distinct outer edges");
        }
        self.check_relation(x)?;
        self.check_relation(y)?;
        if self.color(p1) != self.color(q1) {
            return Err(MoveError::ColorMismatch { crossing: x });
        }
        if self.color(p2) != self.color(q2) {
            return Err(MoveError::ColorMismatch { crossing: y });
        }
        let e1 = self.other_occurrence(q1, &[x, y]).expect("outer edge end");
        let e2 = self.other_occurrence(q2, &[x, y]).expect("outer edge end");
        self.quads[x] = None;
        self.quads[y] = None;
        self.set(e1, p1);
        self.set(e2, p2);
        Ok(())
    }

    fn r3(&mut self, f: Dart) -> Result<(), MoveError> {
        self.check_dart(f)?;
        let face = self.face(f);
        if face.len() != 3 {
            return illegal("R3 needs a triangle face");
        }
        let cs: Vec<usize> = face.iter().map(|d| d.crossing).collect();
        if cs[0] == cs[1] || cs[1] == cs[2] || cs[0] == cs[2] {
            return illegal("R3 triangle repeats a crossing");
        }
        let ends: Vec<(Dart, Dart)> = face.iter().map(|&d| (d, self.mate(d))).collect();
        let mut kinds = [0usize; 3];
        for &(s, t) in &ends {
            kinds[usize::from(s.slot % 2 == 1) + usize::from(t.slot % 2 == 1)] += 1;
        }
        if kinds != [1, 1, 1] {
            return illegal("triangle strands are not stacked top, middle, bottom");
        }
        for &c in &cs {
            self.check_relation(c)?;
        }
        let old: HashMap<usize, Quad> = cs.iter().map(|&c| (c, self.quad(c))).collect();
        let mut new = old.clone();
        for &(s, t) in &ends {
            let mid = old[&s.crossing][s.slot as usize];
            let outer_a = old[&s.crossing][opp(s.slot) as usize];
            let outer_b = old[&t.crossing][opp(t.slot) as usize];
            new.get_mut(&s.crossing).unwrap()[opp(s.slot) as usize] = mid;
            new.get_mut(&s.crossing).unwrap()[s.slot as usize] = outer_b;
            new.get_mut(&t.crossing).unwrap()[t.slot as usize] = outer_a;
            new.get_mut(&t.crossing).unwrap()[opp(t.slot) as usize] = mid;
        }
        for (&c, q) in &new {
            self.quads[c] = Some(*q);
        }
        // Mid edges get their colors back from the relation, top strand first.
        let mids: Vec<EdgeId> = ends.iter().map(|(s, _)| old[&s.crossing][s.slot as usize]).collect();
        let mut known: Vec<bool> = vec![false; 3];
        for _ in 0..3 {
            for (i, &(s, t)) in ends.iter().enumerate() {
                if known[i] {
                    continue;
                }
                for end in [s, t] {
                    let q = new[&end.crossing];
                    let slot = opp(end.slot) as usize;
                    let other = q[(slot + 2) % 4];
                    let val = if slot % 2 == 1 {
                        Some(self.color(other))
                    } else {
                        let over = q[(slot + 1) % 4];
                        let over_known = mids.iter().position(|&m| m == over).is_none_or(|j| known[j]);
                        over_known.then(|| 2 * self.color(over) - self.color(other))
                    };
                    if let Some(v) = val {
                        self.color[mids[i] as usize] = v;
                        known[i] = true;
                        break;
                    }
                }
            }
        }
        for &c in &cs {
            self.check_relation(c)?;
        }
        Ok(())
    }
}

/// Rotates a counterclockwise corner list so `under_in` sits in slot 0 and
/// returns the slot through which the over strand enters.
fn place(ccw: [EdgeId; 4], under_in: EdgeId, over_in: EdgeId) -> (Quad, u8) {
    let i = ccw.iter().position(|&e| e == under_in).expect("under edge present");
    let q = [ccw[i], ccw[(i + 1) % 4], ccw[(i + 2) % 4], ccw[(i + 3) % 4]];
    let o = q.iter().position(|&e| e == over_in).expect("over edge present") as u8;
    debug_assert!(o % 2 == 1);
    (q, o)
}

/// Applies one move to a colored diagram.
pub fn apply_move(d: &Diagram, g: &Coloring, m: Move) -> Result<(Diagram, Coloring), MoveError> {
    let mut w = Work::from_snapshot(d, g)?;
    w.apply(m)?;
    Ok(w.snapshot())
}

/// Every move whose local configuration is present in `d`, in a fixed order.
pub fn legal_moves(d: &Diagram, g: &Coloring) -> Vec<Move> {
    let Ok(base) = Work::from_snapshot(d, g) else {
        return Vec::new();
    };
    let mut cands = Vec::new();
    for x in 0..d.crossing_count() {
        for s in 0..4u8 {
            for first_over in [true, false] {
                cands.push(Move::R1Add { dart: Dart::new(x, s), first_over });
            }
        }
        cands.push(Move::R1Remove { crossing: x });
    }
    for face in d.faces() {
        for &a in &face {
            for &b in &face {
                if a != b {
                    cands.push(Move::R2Push { over: a, under: b });
                }
            }
        }
        match face.len() {
            2 => cands.push(Move::R2Pop { face: face[0] }),
            3 => cands.push(Move::R3Slide { face: face[0] }),
            _ => {}
        }
    }
    let keep = crate::par::map(&cands, |&m| !matches!(base.clone().apply_local(m), Err(MoveError::IllegalMove(_))));
    cands.into_iter().zip(keep).filter_map(|(m, k)| k.then_some(m)).collect()
}
