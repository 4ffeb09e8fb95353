//! Toroidal integer grid that hosts regulatory sites and transcription factors.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: u32,
    pub y: u32,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Position { x, y }
    }

    /// Position displaced by `(dx, dy)` on a torus of side `side`.
    pub fn shifted(self, dx: i64, dy: i64, side: u32) -> Position {
        let g = i64::from(side);
        Position {
            x: (i64::from(self.x) + dx).rem_euclid(g) as u32,
            y: (i64::from(self.y) + dy).rem_euclid(g) as u32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Side length in cells.
    pub size: u32,
    /// Per-axis bound of a single random-walk move.
    pub step: u32,
    /// Binding happens when the distance is strictly below this.
    pub threshold: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            size: 10,
            step: 5,
            threshold: 1.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.size == 0 {
            return Err("grid size must be at least 1".into());
        }
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(format!(
                "binding threshold {} must be finite and >= 0",
                self.threshold
            ));
        }
        Ok(())
    }
}

fn axis_gap(a: u32, b: u32, side: u32) -> f64 {
    let d = a.abs_diff(b);
    f64::from(d.min(side - d))
}

pub fn toroidal_distance(p: Position, q: Position, side: u32) -> f64 {
    let dx = axis_gap(p.x, q.x, side);
    let dy = axis_gap(p.y, q.y, side);
    (dx * dx + dy * dy).sqrt()
}

/// One random-walk move: each axis offset uniform in `[-step, step]`, x drawn first.
pub fn random_step<R: Rng + ?Sized>(p: Position, spec: &GridSpec, rng: &mut R) -> Position {
    let s = i64::from(spec.step);
    let dx = rng.random_range(-s..=s);
    let dy = rng.random_range(-s..=s);
    p.shifted(dx, dy, spec.size)
}

/// Inclusive per-axis bounds of the central placement square.
pub fn central_bounds(size: u32) -> (u32, u32) {
    let centre = size / 2;
    let side = (size / 2).max(1);
    let lo = centre.saturating_sub(side / 2);
    let hi = (lo + side - 1).min(size - 1);
    (lo, hi)
}

/// Uniform position in the square of side `max(1, size/2)` centred on `(size/2, size/2)`.
pub fn central_placement<R: Rng + ?Sized>(spec: &GridSpec, rng: &mut R) -> Position {
    let (lo, hi) = central_bounds(spec.size);
    let x = rng.random_range(lo..=hi);
    let y = rng.random_range(lo..=hi);
    Position { x, y }
}
