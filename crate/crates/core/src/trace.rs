//! Recorded move sequences and their independent replay check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{determinant, verify_coloring, Coloring};
use crate::diagram::Diagram;
use crate::moves::{apply_move, Move};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(rename = "move")]
    pub mv: Move,
    pub diagram: Diagram,
    pub coloring: Coloring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub diagram: Diagram,
    pub coloring: Coloring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub initial: State,
    pub steps: Vec<TraceStep>,
}

/// First snapshot that fails a check; 0 is the initial state and `k` the
/// state after step `k`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace fails at snapshot {index}: {reason}")]
pub struct TraceError {
    pub index: usize,
    pub reason: String,
}

impl MoveTrace {
    pub fn new(d: Diagram, g: Coloring) -> Self {
        MoveTrace { initial: State { diagram: d, coloring: g }, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, mv: Move, diagram: Diagram, coloring: Coloring) {
        self.steps.push(TraceStep { mv, diagram, coloring });
    }

    pub fn final_diagram(&self) -> &Diagram {
        self.steps.last().map_or(&self.initial.diagram, |s| &s.diagram)
    }

    pub fn final_coloring(&self) -> &Coloring {
        self.steps.last().map_or(&self.initial.coloring, |s| &s.coloring)
    }

    /// Appends another trace that starts where this one ends.
    pub fn extend(&mut self, other: MoveTrace) {
        self.steps.extend(other.steps);
    }

    pub fn snapshots(&self) -> impl Iterator<Item = (&Diagram, &Coloring)> {
        std::iter::once((&self.initial.diagram, &self.initial.coloring))
            .chain(self.steps.iter().map(|s| (&s.diagram, &s.coloring)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace json")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn fail(index: usize, reason: impl Into<String>) -> TraceError {
    TraceError { index, reason: reason.into() }
}

/// Replays every step and checks each snapshot: valid planar diagram, valid
/// coloring, and determinant and link component count equal to the start.
pub fn verify_trace(t: &MoveTrace) -> Result<(), TraceError> {
    let mut det0 = None;
    let mut comps0 = 0;
    for (i, (d, g)) in t.snapshots().enumerate() {
        d.validate().map_err(|e| fail(i, e.to_string()))?;
        if !d.is_planar() {
            return Err(fail(i, "diagram is not planar"));
        }
        match verify_coloring(d, g) {
            Ok(true) => {}
            Ok(false) => return Err(fail(i, "coloring relation fails")),
            Err(e) => return Err(fail(i, e.to_string())),
        }
        let det = determinant(d);
        let comps = d.link_components();
        match &det0 {
            None => {
                det0 = Some(det);
                comps0 = comps;
            }
            Some(d0) => {
                if *d0 != det {
                    return Err(fail(i, format!("determinant {det} differs from {d0}")));
                }
                if comps != comps0 {
                    return Err(fail(i, format!("{comps} link components, expected {comps0}")));
                }
            }
        }
    }
    let mut prev = (&t.initial.diagram, &t.initial.coloring);
    for (i, step) in t.steps.iter().enumerate() {
        let (d, g) = apply_move(prev.0, prev.1, step.mv).map_err(|e| fail(i + 1, format!("replay: {e}")))?;
        if d != step.diagram || g != step.coloring {
            return Err(fail(i + 1, format!("replaying {} gives a different state", step.mv.kind())));
        }
        prev = (&step.diagram, &step.coloring);
    }
    Ok(())
}
