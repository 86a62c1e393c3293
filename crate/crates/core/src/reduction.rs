//! Color reduction by Reidemeister moves.
//!
//! Every rewrite here is a composite of the primitives in [`crate::moves`],
//! recorded step by step in a [`MoveTrace`].

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{
    affine, find_nontrivial_coloring, is_simple, normalize_min_zero, primitive_normalize, split_two_coloring,
    ColorImage, Coloring, Simplicity,
};
use crate::coloring::{bounded_small_image_search, coloring_space};
use crate::diagram::{Dart, Diagram, EdgeId};
use crate::moves::{Move, MoveError, Work};
use crate::palette::{classify_five, FiveClass};
use crate::trace::MoveTrace;

/// Safety valve on the number of primitive moves in one reduction.
pub const MOVE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("coloring is not simple")]
    NotSimple,
    #[error("max color {max} is below 4*{dgap}; nothing to reduce")]
    MaxTooSmall { max: i64, dgap: i64 },
    #[error("reduction exceeded {MOVE_BUDGET} moves")]
    Diverged,
    #[error("coloring uses {0} colors, not 5")]
    NotFiveColors(usize),
    #[error("five-color image {0:?} is not in the catalog")]
    NotInCatalog(Vec<i64>),
    #[error("no reduction implemented for {case}")]
    Unsupported { case: String },
    #[error("diagram admits no non-trivial coloring")]
    NotColorable,
    #[error("{what} failed: {source}")]
    Composite { what: &'static str, source: MoveError },
    #[error("{0}")]
    Stuck(String),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Coloring(#[from] crate::coloring::ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub initial_image: ColorImage,
    pub final_image: ColorImage,
    pub moves_applied: usize,
    pub lower_bound: usize,
    pub achieved: usize,
    pub trivial: bool,
    /// Which pipeline ran, e.g. `simple d=1` or `five {0,1,2,3,5}`.
    pub route: String,
    #[serde(skip)]
    pub trace: MoveTrace,
}

impl ReductionReport {
    pub fn final_coloring(&self) -> &Coloring {
        self.trace.final_coloring()
    }

    pub fn final_diagram(&self) -> &Diagram {
        self.trace.final_diagram()
    }
}

/// Work state plus the trace of every move applied to it.
struct Rec {
    w: Work,
    trace: MoveTrace,
}

impl Rec {
    fn new(d: &Diagram, g: &Coloring) -> Result<Rec, ReductionError> {
        Ok(Rec { w: Work::from_snapshot(d, g)?, trace: MoveTrace::new(d.clone(), g.clone()) })
    }

    fn step(&mut self, m: Move) -> Result<Vec<usize>, MoveError> {
        let rel = m.map_crossings(|id| self.w.index_of(id));
        let made = self.w.apply(m)?;
        let (d, g) = self.w.snapshot();
        self.trace.push(rel, d, g);
        Ok(made)
    }

    fn check_budget(&self) -> Result<(), ReductionError> {
        if self.trace.len() > MOVE_BUDGET {
            return Err(ReductionError::Diverged);
        }
        Ok(())
    }

    /// Runs `f`, rolling back every move it made if it fails.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Rec) -> Result<T, ReductionError>) -> Result<T, ReductionError> {
        let saved = self.w.clone();
        let len = self.trace.len();
        let out = f(self);
        if out.is_err() {
            self.w = saved;
            self.trace.steps.truncate(len);
        }
        out
    }

    fn max_color(&self) -> i64 {
        self.w.live().iter().map(|&x| self.w.quad(x).iter().map(|&e| self.w.color(e)).max().unwrap()).max().unwrap_or(0)
    }

    fn is_mono(&self, x: usize, c: i64) -> bool {
        self.w.quad(x).iter().all(|&e| self.w.color(e) == c)
    }

    fn is_kink(&self, x: usize) -> bool {
        let q = self.w.quad(x);
        (0..4).any(|s| q[s] == q[(s + 1) % 4])
    }

    fn mono_count(&self, c: i64) -> usize {
        self.w.live().into_iter().filter(|&x| self.is_mono(x, c)).count()
    }

    fn m_arc_count(&self, c: i64) -> usize {
        let (_, g) = self.w.snapshot();
        g.colors().iter().filter(|&&x| x == c).count()
    }

    fn labels_of(&self, x: usize) -> [EdgeId; 4] {
        self.w.quad(x)
    }

    /// The dart leaving `x` along label `e` (first slot if a loop).
    fn dart_on(&self, x: usize, e: EdgeId) -> Option<Dart> {
        self.labels_of(x).iter().position(|&l| l == e).map(|s| Dart::new(x, s as u8))
    }

    fn prev_in_face(&self, d: Dart) -> Dart {
        let f = self.w.face(d);
        *f.last().unwrap()
    }
}

fn composite(what: &'static str) -> impl Fn(MoveError) -> ReductionError {
    move |source| ReductionError::Composite { what, source }
}

fn stuck<T>(msg: impl Into<String>) -> Result<T, ReductionError> {
    Err(ReductionError::Stuck(msg.into()))
}

/// Removes kinks colored `c`.
fn remove_kinks(rec: &mut Rec, c: i64) -> Result<(), ReductionError> {
    while let Some(x) = rec.w.live().into_iter().find(|&x| rec.is_kink(x) && rec.is_mono(x, c)) {
        rec.step(Move::R1Remove { crossing: x }).map_err(composite("kink removal"))?;
        rec.check_budget()?;
    }
    Ok(())
}

/// Pops bigons between two crossings colored `{c|c|c}`.
fn pop_clasps(rec: &mut Rec, c: i64) -> Result<(), ReductionError> {
    'outer: loop {
        for x in rec.w.live() {
            if !rec.is_mono(x, c) {
                continue;
            }
            for s in 0..4 {
                let f = rec.w.face(Dart::new(x, s));
                if f.len() != 2 || f[1].crossing == x || !rec.is_mono(f[1].crossing, c) {
                    continue;
                }
                if rec.attempt(|r| r.step(Move::R2Pop { face: f[0] }).map_err(ReductionError::from)).is_ok() {
                    rec.check_budget()?;
                    continue 'outer;
                }
            }
        }
        return Ok(());
    }
}

/// An edge colored `m` leaving a non-monochrome crossing `c1` as an under
/// edge and ending at a monochrome crossing: `(dart at c1, far crossing)`.
fn open_run(rec: &Rec, m: i64) -> Option<(Dart, usize)> {
    for c1 in rec.w.live() {
        if rec.is_mono(c1, m) {
            continue;
        }
        for s in [0u8, 2] {
            let d = Dart::new(c1, s);
            if rec.w.color_at(d) != m {
                continue;
            }
            let far = rec.w.mate(d);
            if far.crossing != c1 && rec.is_mono(far.crossing, m) && !rec.is_kink(far.crossing) {
                return Some((d, far.crossing));
            }
        }
    }
    None
}

/// Reflects the monochrome crossing at the end of an open run through the
/// over color `o` of the run's first crossing: a finger of that over strand
/// is pushed across the run edge, then across a neighbouring leg of the
/// monochrome crossing, and finally slid over it.
fn reflect_mono(rec: &mut Rec, e_dart: Dart, x: usize, m: i64) -> Result<(), ReductionError> {
    let c1 = e_dart.crossing;
    let o = rec.w.crossing_colors(c1).b;
    let target = 2 * o - m;
    for side in [1u8, 3] {
        let res = rec.attempt(|rec| {
            let sb = (e_dart.slot + side) % 4;
            // The finger runs in the corner between the run edge and the
            // chosen over half at c1.
            let (over, under) = if side == 1 {
                (rec.w.mate(Dart::new(c1, sb)), e_dart)
            } else {
                (Dart::new(c1, sb), rec.w.mate(e_dart))
            };
            let made = rec.step(Move::R2Push { over, under }).map_err(composite("finger over run edge"))?;
            let (fx, fy) = (made[0], made[1]);
            let am = shared_over_label(rec, fx, fy).ok_or(ReductionError::Stuck("finger has no mid piece".into()))?;
            // piece of the run edge ending at x
            let near_x = rec.labels_of(x).iter().copied().find(|&l| {
                let d = rec.dart_on(x, l).unwrap();
                let m2 = rec.w.mate(d);
                m2.crossing == fx || m2.crossing == fy
            });
            let Some(near_x) = near_x else { return stuck("run edge does not reach the finger") };
            let mut pushed = None;
            for d in darts_with_label(rec, am) {
                let face = rec.w.face(d);
                for (i, &fd) in face.iter().enumerate() {
                    let nxt = face[(i + 1) % face.len()];
                    if rec.w.label(fd) == near_x && rec.w.mate(fd).crossing == x && fd.crossing != x {
                        pushed = Some((d, nxt));
                    } else if fd.crossing == x && rec.w.label(fd) == near_x {
                        let prev = face[(i + face.len() - 1) % face.len()];
                        pushed = Some((d, prev));
                    }
                }
                if pushed.is_some() {
                    break;
                }
            }
            let Some((a2, h)) = pushed else { return stuck("finger does not reach the monochrome crossing") };
            rec.step(Move::R2Push { over: a2, under: h }).map_err(composite("finger over crossing leg"))?;
            let tri = triangle_through(rec, x, near_x).ok_or(ReductionError::Stuck("no triangle at crossing".into()))?;
            rec.step(Move::R3Slide { face: tri }).map_err(composite("slide over monochrome crossing"))?;
            if !rec.is_mono(x, target) {
                return stuck(format!("crossing not reflected to {target}"));
            }
            Ok(())
        });
        if res.is_ok() {
            return Ok(());
        }
        if side == 3 {
            return res;
        }
    }
    unreachable!()
}

fn darts_with_label(rec: &Rec, e: EdgeId) -> Vec<Dart> {
    let mut out = Vec::new();
    for x in rec.w.live() {
        for s in 0..4u8 {
            if rec.w.label(Dart::new(x, s)) == e {
                out.push(Dart::new(x, s));
            }
        }
    }
    out
}

/// The label joining `x` and `y` in over slots at both.
fn shared_over_label(rec: &Rec, x: usize, y: usize) -> Option<EdgeId> {
    let qx = rec.labels_of(x);
    let qy = rec.labels_of(y);
    [1usize, 3].into_iter().map(|s| qx[s]).find(|e| qy[1] == *e || qy[3] == *e)
}

/// A triangle face through crossing `x` that uses an edge labeled `e`.
fn triangle_through(rec: &Rec, x: usize, e: EdgeId) -> Option<Dart> {
    darts_with_label(rec, e).into_iter().find_map(|d| {
        let f = rec.w.face(d);
        (f.len() == 3 && f.iter().any(|t| t.crossing == x)).then_some(d)
    })
}

/// Deletes every monochrome crossing of color `m` (the max color). Kinks are
/// removed by R1; other crossings are reflected away by [`reflect_mono`].
fn delete_mono(rec: &mut Rec, m: i64) -> Result<(), ReductionError> {
    loop {
        remove_kinks(rec, m)?;
        pop_clasps(rec, m)?;
        remove_kinks(rec, m)?;
        let count = rec.mono_count(m);
        if count == 0 {
            return Ok(());
        }
        let Some((e, x)) = open_run(rec, m) else {
            return stuck(format!("{count} crossings colored {{{m}|{m}|{m}}} but no open run reaches them"));
        };
        reflect_mono(rec, e, x, m)?;
        rec.check_budget()?;
        if rec.mono_count(m) >= count {
            return stuck("monochrome deletion made no progress");
        }
    }
}

/// First max-colored under edge, as its dart at the lower-index end.
fn max_edge(rec: &Rec, m: i64) -> Option<Dart> {
    for c1 in rec.w.live() {
        for s in [0u8, 2] {
            let d = Dart::new(c1, s);
            if rec.w.color_at(d) == m {
                return Some(d);
            }
        }
    }
    None
}

/// Recolors one max-colored edge `S` from `M` to `M - 4d`. `S` runs under
/// crossings `c1` and `c2` of type `{M-2d|M-d|M}`. The neighbouring piece `P`
/// of the same strand at `c1` (color `M-2d`) is pushed over the over strand
/// at `c1` and then over `S`; sliding and a kink removal make `S` pass under
/// the `M-3d` piece at `c1`. The same finger then swallows `c2`.
fn lasso(rec: &mut Rec, s_dart: Dart, m: i64) -> Result<(), ReductionError> {
    let c1 = s_dart.crossing;
    let far = rec.w.mate(s_dart);
    let c2 = far.crossing;
    if c1 == c2 {
        return stuck("max edge is a loop");
    }
    let s_p = (s_dart.slot + 2) % 4;
    let s_b = (s_p + 1) % 4;
    // 1. P over the over half-edge at c1
    let made = rec.step(Move::R2Push { over: Dart::new(c1, s_p), under: rec.w.mate(Dart::new(c1, s_b)) }).map_err(composite("lasso base push"))?;
    let (x, y) = (made[0], made[1]);
    let am = shared_over_label(rec, x, y).ok_or(ReductionError::Stuck("lasso finger has no mid piece".into()))?;
    // 2. finger over S, inside the corner face at c1
    let face = rec.w.face(Dart::new(c1, s_b));
    let Some(&a2) = face.iter().find(|d| rec.w.label(**d) == am) else {
        return stuck("lasso finger not in the corner face");
    };
    let b2 = rec.w.mate(Dart::new(c1, s_dart.slot));
    let made = rec.step(Move::R2Push { over: a2, under: b2 }).map_err(composite("lasso push over max edge"))?;
    let (x2, y2) = (made[0], made[1]);
    // 3. slide across the triangle at c1, 4. drop the kink it leaves
    rec.step(Move::R3Slide { face: Dart::new(c1, s_b) }).map_err(composite("lasso slide at first end"))?;
    let Some(k) = [y2, y, c1, x2].into_iter().find(|&k| rec.w.is_live(k) && rec.is_kink(k)) else {
        return stuck("lasso slide left no kink");
    };
    rec.step(Move::R1Remove { crossing: k }).map_err(composite("lasso kink removal"))?;
    let outer = if rec.w.is_live(x2) && x2 != k { x2 } else { y2 };
    // 5. finger over the over strand at c2, 6. slide across c2
    let s_at_c2 = Dart::new(c2, far.slot);
    let u = rec.w.mate(s_at_c2);
    if u.crossing != outer {
        return stuck("lasso: far piece of the max edge does not start at the finger");
    }
    for flip in [false, true] {
        let res = rec.attempt(|rec| {
            let (over, under, face) = if !flip {
                (rec.prev_in_face(u), rec.w.next_in_face(u), u)
            } else {
                (rec.w.next_in_face(s_at_c2), rec.prev_in_face(s_at_c2), s_at_c2)
            };
            rec.step(Move::R2Push { over, under }).map_err(composite("lasso push at second end"))?;
            rec.step(Move::R3Slide { face }).map_err(composite("lasso slide at second end"))?;
            Ok(())
        });
        if res.is_ok() {
            break;
        }
        if flip {
            return res;
        }
    }
    if rec.max_color() > m {
        return stuck("lasso raised the max color");
    }
    Ok(())
}

/// One reduction step on a simple coloring whose max color has no
/// monochrome crossings.
fn simple_step(rec: &mut Rec, dgap: i64) -> Result<(), ReductionError> {
    let m = rec.max_color();
    if m < 4 * dgap {
        return Err(ReductionError::MaxTooSmall { max: m, dgap });
    }
    if rec.mono_count(m) > 0 {
        return stuck("monochrome max crossings present");
    }
    let before = rec.m_arc_count(m);
    let s = max_edge(rec, m).ok_or(ReductionError::Stuck("no max edge".into()))?;
    rec.attempt(|rec| lasso(rec, s, m))?;
    let after_max = rec.max_color();
    if after_max == m && rec.m_arc_count(m) >= before {
        return stuck("lasso did not lower the measure");
    }
    Ok(())
}

fn check_simple(d: &Diagram, g: &Coloring) -> Result<Option<i64>, ReductionError> {
    match is_simple(d, g) {
        Simplicity::Simple(k) => Ok(Some(k)),
        Simplicity::AllMonochrome => Ok(None),
        Simplicity::NotSimple => Err(ReductionError::NotSimple),
    }
}

/// Deletes monochrome crossings of the max color; no-op if there are none.
pub fn delete_max_monochrome(d: &Diagram, g: &Coloring) -> Result<(Diagram, Coloring, MoveTrace), ReductionError> {
    let mut rec = Rec::new(d, g)?;
    let m = rec.max_color();
    delete_mono(&mut rec, m)?;
    let (d2, g2) = rec.w.snapshot();
    Ok((d2, g2, rec.trace))
}

/// One step of the simple reduction: lowers `(max, number of max arcs)`.
pub fn reduce_simple_step(d: &Diagram, g: &Coloring, dgap: i64) -> Result<(Diagram, Coloring, MoveTrace), ReductionError> {
    match check_simple(d, g)? {
        Some(k) if k == dgap => {}
        _ => return Err(ReductionError::NotSimple),
    }
    let g = normalize_min_zero(g);
    let mut rec = Rec::new(d, &g)?;
    simple_step(&mut rec, dgap)?;
    let (d2, g2) = rec.w.snapshot();
    Ok((d2, g2, rec.trace))
}

fn run_simple(rec: &mut Rec, dgap: i64) -> Result<(), ReductionError> {
    loop {
        let m = rec.max_color();
        if m < 4 * dgap {
            return Ok(());
        }
        delete_mono(rec, m)?;
        if rec.max_color() != m {
            continue;
        }
        simple_step(rec, dgap)?;
        rec.check_budget()?;
    }
}

fn lower_bound(d: &Diagram) -> usize {
    if d.diagram_components() > 1 {
        2
    } else {
        4
    }
}

fn report(rec: Rec, d: &Diagram, initial: ColorImage, route: String) -> ReductionReport {
    let final_image = rec.trace.final_coloring().image();
    let achieved = final_image.len();
    ReductionReport {
        initial_image: initial,
        moves_applied: rec.trace.len(),
        lower_bound: lower_bound(d),
        achieved,
        trivial: achieved == 1,
        route,
        final_image,
        trace: rec.trace,
    }
}

/// Reduces a simple coloring to the four colors `{0, d, 2d, 3d}`.
pub fn reduce_simple(d: &Diagram, g: &Coloring) -> Result<ReductionReport, ReductionError> {
    let initial = g.image();
    let Some(dgap) = check_simple(d, g)? else {
        let g0 = normalize_min_zero(g);
        let rec = Rec::new(d, &g0)?;
        return Ok(report(rec, d, initial, "trivial".into()));
    };
    let g0 = normalize_min_zero(g);
    let mut rec = Rec::new(d, &g0)?;
    run_simple(&mut rec, dgap)?;
    Ok(report(rec, d, initial, format!("simple d={dgap}")))
}

fn image_name(im: &ColorImage) -> String {
    let parts: Vec<String> = im.0.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Reduces a five-color coloring of a connected diagram to four colors.
pub fn reduce_five(d: &Diagram, g: &Coloring) -> Result<ReductionReport, ReductionError> {
    let initial = g.image();
    let canon = match classify_five(g) {
        FiveClass::NotFiveColors { colors } => return Err(ReductionError::NotFiveColors(colors)),
        FiveClass::NotInCatalog { image } => return Err(ReductionError::NotInCatalog(image.0)),
        FiveClass::Canonical { image } => image,
    };
    let mut p = primitive_normalize(g);
    if p.image() != canon {
        p = affine(&p, -1, p.image().highest())?;
    }
    let flips = [([0, 2, 3, 4, 5], 5), ([0, 1, 2, 3, 6], 6), ([0, 3, 5, 6, 7], 7)];
    for (from, max) in flips {
        if p.image().0 == from {
            p = affine(&p, -1, max)?;
        }
    }
    let case = p.image();
    match case.0.as_slice() {
        [0, 1, 2, 3, 4] => match is_simple(d, &p) {
            Simplicity::Simple(1) => {
                let mut rec = Rec::new(d, &p)?;
                run_simple(&mut rec, 1)?;
                Ok(report(rec, d, initial, "five {0,1,2,3,4} simple".into()))
            }
            _ => Err(ReductionError::Unsupported { case: "{0,1,2,3,4} with a {0|2|4} crossing".into() }),
        },
        _ => Err(ReductionError::Unsupported { case: image_name(&case) }),
    }
}

/// Finds a non-trivial coloring and reduces it as far as the implemented
/// pipelines allow.
pub fn minimize(d: &Diagram) -> Result<ReductionReport, ReductionError> {
    if let Some(g) = split_two_coloring(d) {
        let rec = Rec::new(d, &g)?;
        return Ok(report(rec, d, g.image(), "split".into()));
    }
    let g = find_nontrivial_coloring(d).ok_or(ReductionError::NotColorable)?;
    let g = primitive_normalize(&g);
    let mut candidates = vec![g.clone()];
    if let Some(small) = bounded_small_image_search(d, 5, 3) {
        candidates.push(primitive_normalize(&small));
    }
    if coloring_space(d).map(|s| s.rank()).unwrap_or(0) > 2 {
        if let Some(six) = bounded_small_image_search(d, 6, 2) {
            candidates.push(primitive_normalize(&six));
        }
    }
    let mut best: Option<ReductionReport> = None;
    let mut unsupported = None;
    for c in candidates {
        let attempt = match (is_simple(d, &c), c.image().len()) {
            (Simplicity::Simple(_), _) => reduce_simple(d, &c),
            (_, 5) => reduce_five(d, &c),
            _ => Ok(report(Rec::new(d, &c)?, d, c.image(), "unreduced".into())),
        };
        match attempt {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.achieved < b.achieved) {
                    best = Some(r);
                }
            }
            Err(e @ ReductionError::Unsupported { .. }) => {
                unsupported.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
        if best.as_ref().is_some_and(|b| b.achieved <= 4) {
            break;
        }
    }
    match (best, unsupported) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => Err(ReductionError::NotColorable),
    }
}
