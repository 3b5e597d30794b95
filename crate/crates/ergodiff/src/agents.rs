//! Agent kinematics: constant-speed gradient pursuit with wall
//! reflection.
//!
//! Agents are single integrators `xdot = u` driven at full speed along
//! the potential gradient, `u = v_m * grad g / |grad g|`. Normalizing
//! the gradient makes the heading invariant to the potential's scale;
//! only its shape matters. Where the gradient is numerically degenerate
//! the agent keeps its previous heading instead of stalling, and hitting
//! a wall reflects the motion specularly back into the domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid2D;
use crate::vec2::Vec2;

/// Position plus the most recent unit heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub position: Vec2,
    pub last_heading: Vec2,
}

impl AgentState {
    pub fn new(position: Vec2, heading: Vec2) -> Self {
        AgentState { position, last_heading: heading.normalized() }
    }
}

/// Steering parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlParams {
    /// Agent speed.
    pub v_m: f64,
    /// Control (outer) time step.
    pub dt: f64,
    /// Below this gradient norm the agent holds its last heading.
    pub eps_grad: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        ControlParams { v_m: 1.0, dt: 0.05, eps_grad: 1e-12 }
    }
}

impl ControlParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_m > 0.0) || !self.v_m.is_finite() {
            return Err(Error::config("control.v_m", format!("must be positive, got {}", self.v_m)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("control.dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.eps_grad > 0.0) {
            return Err(Error::config(
                "control.eps_grad",
                format!("must be positive, got {}", self.eps_grad),
            ));
        }
        Ok(())
    }
}

/// Bilinear sample of both gradient components at `p`.
pub fn sample_gradient(gx: &ScalarField, gy: &ScalarField, p: Vec2) -> Vec2 {
    Vec2::new(gx.sample(p), gy.sample(p))
}

/// Velocity command for one agent; updates the stored heading when the
/// gradient is usable.
pub fn control(agent: &mut AgentState, grad: Vec2, params: &ControlParams) -> Vec2 {
    let norm = grad.norm();
    if norm > params.eps_grad {
        agent.last_heading = Vec2::new(grad.x / norm, grad.y / norm);
    }
    agent.last_heading * params.v_m
}

/// Forward Euler move with specular reflection at the walls.
pub fn step(agent: &mut AgentState, u: Vec2, dt: f64, grid: &Grid2D) {
    let mut p = agent.position + u * dt;
    let mut h = u;
    // fold until inside; a sane step exceeds a wall at most once per axis
    loop {
        let mut folded = false;
        if p.x < 0.0 {
            p.x = -p.x;
            h.x = -h.x;
            folded = true;
        } else if p.x > grid.lx() {
            p.x = 2.0 * grid.lx() - p.x;
            h.x = -h.x;
            folded = true;
        }
        if p.y < 0.0 {
            p.y = -p.y;
            h.y = -h.y;
            folded = true;
        } else if p.y > grid.ly() {
            p.y = 2.0 * grid.ly() - p.y;
            h.y = -h.y;
            folded = true;
        }
        if !folded {
            break;
        }
    }
    agent.position = p;
    let n = h.norm();
    if n > 0.0 {
        agent.last_heading = Vec2::new(h.x / n, h.y / n);
    }
}
