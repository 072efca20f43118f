use super::error::{PhaseSpaceError, Result};

/// Axis-aligned box `[lo, lo + side)` in the periodic domain.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRegion {
    pub lo: Vec<f64>,
    pub side: Vec<f64>,
    pub box_len: f64,
}

impl WindowRegion {
    pub fn new(lo: Vec<f64>, side: Vec<f64>, box_len: f64) -> Result<Self> {
        if lo.len() != side.len() || lo.is_empty() {
            return Err(PhaseSpaceError::InvalidWindow("lo and side must have the same nonzero length".into()));
        }
        if let Some(s) = side.iter().find(|&&s| !(s > 0.0 && s <= box_len)) {
            return Err(PhaseSpaceError::InvalidWindow(format!("side {s} must lie in (0, {box_len}]")));
        }
        if lo.iter().any(|x| !x.is_finite()) {
            return Err(PhaseSpaceError::InvalidWindow("corner must be finite".into()));
        }
        Ok(Self { lo, side, box_len })
    }

    /// Cube of volume `volume` with its corner at the origin.
    pub fn cube(dim: usize, volume: f64, box_len: f64) -> Result<Self> {
        let side = volume.powf(1.0 / dim as f64);
        Self::new(vec![0.0; dim], vec![side; dim], box_len)
    }

    pub fn whole_box(dim: usize, box_len: f64) -> Self {
        Self { lo: vec![0.0; dim], side: vec![box_len; dim], box_len }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.side.iter().product()
    }

    #[inline]
    pub fn contains(&self, q: &[f64]) -> bool {
        q.iter()
            .zip(&self.lo)
            .zip(&self.side)
            .all(|((&x, &lo), &s)| s >= self.box_len || (x - lo).rem_euclid(self.box_len) < s)
    }
}
