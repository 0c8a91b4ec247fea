//! Evaluation accounting.

use serde::{Deserialize, Serialize};

use crate::target::Factor;

/// Snapshot of how many times each factor has been evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub coarse: u64,
    pub fine: u64,
}

impl EvalCounts {
    pub fn since(self, earlier: EvalCounts) -> EvalCounts {
        EvalCounts {
            coarse: self.coarse - earlier.coarse,
            fine: self.fine - earlier.fine,
        }
    }

    pub fn weighted(self, coarse_weight: f64, fine_weight: f64) -> f64 {
        coarse_weight * self.coarse as f64 + fine_weight * self.fine as f64
    }
}

/// One entry of an ordering trace.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    /// A factor was evaluated at `point`. `passed` is the outcome of the
    /// superlevel comparison, or `None` for a bare evaluation (current state,
    /// full density).
    Evaluated {
        factor: Factor,
        point: Vec<f64>,
        passed: Option<bool>,
    },
    /// `point` was drawn directly from the coarse superlevel set, so its
    /// coarse membership holds without evaluation.
    CoarseCertified { point: Vec<f64> },
    /// A new transition starts at `point`.
    Transition { point: Vec<f64> },
}

/// Monotone evaluation counters with an optional ordering trace.
#[derive(Debug, Clone, Default)]
pub struct EvalLedger {
    counts: EvalCounts,
    trace: Option<Vec<TraceEvent>>,
}

impl EvalLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger that also records every evaluation in order.
    pub fn with_trace() -> Self {
        Self {
            counts: EvalCounts::default(),
            trace: Some(Vec::new()),
        }
    }

    pub fn counts(&self) -> EvalCounts {
        self.counts
    }

    pub fn n_coarse(&self) -> u64 {
        self.counts.coarse
    }

    pub fn n_fine(&self) -> u64 {
        self.counts.fine
    }

    pub fn is_tracing(&self) -> bool {
        self.trace.is_some()
    }

    pub(crate) fn record(&mut self, factor: Factor, point: &[f64], passed: Option<bool>) {
        match factor {
            Factor::Coarse => self.counts.coarse += 1,
            Factor::Fine => self.counts.fine += 1,
        }
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent::Evaluated {
                factor,
                point: point.to_vec(),
                passed,
            });
        }
    }

    pub(crate) fn certify_coarse(&mut self, point: &[f64]) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent::CoarseCertified {
                point: point.to_vec(),
            });
        }
    }

    pub(crate) fn begin_transition(&mut self, point: &[f64]) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent::Transition {
                point: point.to_vec(),
            });
        }
    }

    pub fn trace(&self) -> &[TraceEvent] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Drains the recorded trace, keeping tracing enabled.
    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }
}

/// A fine evaluation that was not preceded by a successful coarse check.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingViolation {
    pub event_index: usize,
    pub point: Vec<f64>,
}

/// Checks the delayed-acceptance ordering on a trace.
///
/// Within each transition, a fine evaluation at `y` must be preceded by a
/// coarse evaluation at the same `y` that either passed its superlevel check,
/// was a bare evaluation at the current state, or by a direct-sampler
/// certification of `y`.
pub fn check_ordering(trace: &[TraceEvent]) -> Vec<OrderingViolation> {
    let mut cleared: Vec<&[f64]> = Vec::new();
    let mut violations = Vec::new();
    for (i, event) in trace.iter().enumerate() {
        match event {
            TraceEvent::Transition { .. } => cleared.clear(),
            TraceEvent::CoarseCertified { point } => cleared.push(point),
            TraceEvent::Evaluated {
                factor: Factor::Coarse,
                point,
                passed,
            } => {
                if *passed != Some(false) {
                    cleared.push(point);
                }
            }
            TraceEvent::Evaluated {
                factor: Factor::Fine,
                point,
                ..
            } => {
                let ok = cleared.iter().any(|p| same_point(p, point));
                if !ok {
                    violations.push(OrderingViolation {
                        event_index: i,
                        point: point.clone(),
                    });
                }
            }
        }
    }
    violations
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}
