//! Truncation guard: flags samples whose highest retained Fock level of a
//! mode carries more than `1e-3` probability.
//!
//! The `b` and cavity modes are always checked. An `a` mode is checked only
//! when its truncation exceeds 2; at dimension 2 it is a two-level system
//! whose upper level is physical, not a truncation artefact.

use serde::Serialize;

use crate::error::Result;
use crate::fock::{ModeId, StateVector};

pub const TOP_LEVEL_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuardViolation {
    pub mode: ModeId,
    pub t: f64,
    pub population: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GuardReport {
    pub passed: bool,
    /// Largest top-level population seen per checked mode.
    pub max_population: Vec<(ModeId, f64)>,
    /// First offending sample per mode.
    pub violations: Vec<GuardViolation>,
}

fn guarded(mode: ModeId, dim: usize) -> bool {
    !matches!(mode, ModeId::A(_)) || dim > 2
}

/// Scans `samples` taken at `times`. Each first violation per mode is logged
/// as a warning.
pub fn check_samples(times: &[f64], samples: &[StateVector]) -> Result<GuardReport> {
    let Some(first) = samples.first() else {
        return Ok(GuardReport {
            passed: true,
            ..Default::default()
        });
    };
    let modes: Vec<_> = first
        .space()
        .modes()
        .iter()
        .filter(|s| guarded(s.mode, s.dim))
        .map(|s| s.mode)
        .collect();
    let mut max_population: Vec<(ModeId, f64)> = modes.iter().map(|&m| (m, 0.0)).collect();
    let mut violations: Vec<GuardViolation> = Vec::new();
    for (&t, state) in times.iter().zip(samples) {
        for (slot, &mode) in max_population.iter_mut().zip(&modes) {
            let p = state.top_level_population(mode)?;
            slot.1 = slot.1.max(p);
            if p > TOP_LEVEL_THRESHOLD && !violations.iter().any(|v| v.mode == mode) {
                log::warn!(
                    "truncation guard: mode {mode} has top-level population {p:.3e} at t = {t}; raise its dimension"
                );
                violations.push(GuardViolation { mode, t, population: p });
            }
        }
    }
    Ok(GuardReport {
        passed: violations.is_empty(),
        max_population,
        violations,
    })
}
