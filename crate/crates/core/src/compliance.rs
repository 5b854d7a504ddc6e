//! Passive finger compliance.
//!
//! The finger is a linear spring whose stiffness depends on the contact height
//! along the finger and on the propulsion angle of the load. Stiffness is
//! tabulated on a (angle, height) grid and bilinearly interpolated; nothing is
//! extrapolated outside the measured grid.

use crate::error::{ensure, Error, Result};

/// Deepest compression the stiffness was measured to, mm.
pub const MAX_COMPRESSION_MM: f64 = 15.0;

/// Tip-to-base stiffness ratio of a fin-ray finger, for comparison only.
pub const FIN_RAY_TIP_RATIO: f64 = 0.25;

/// Default probe heights h1..h4, m.
pub const DEFAULT_HEIGHTS: [f64; 4] = [0.025, 0.050, 0.075, 0.100];

/// Default propulsion angles, deg.
pub const DEFAULT_ANGLES: [f64; 3] = [0.0, 45.0, 90.0];

/// Measured frontal (0°) stiffness at h1, h3 and h4, N/mm.
pub const FRONTAL_K_H1: f64 = 1.699;
pub const FRONTAL_K_H3: f64 = 0.838;
pub const FRONTAL_K_H4: f64 = 1.051;

#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessProfile {
    angles: Vec<f64>,
    heights: Vec<f64>,
    /// Row-major `[angle][height]`, N/mm.
    k: Vec<Vec<f64>>,
}

impl StiffnessProfile {
    pub fn new(angles: Vec<f64>, heights: Vec<f64>, k: Vec<Vec<f64>>) -> Result<Self> {
        ensure(!angles.is_empty(), || "stiffness profile needs at least one angle".into())?;
        ensure(!heights.is_empty(), || "stiffness profile needs at least one height".into())?;
        ensure(strictly_ascending(&angles), || format!("angles strictly ascending violated ({angles:?})"))?;
        ensure(strictly_ascending(&heights), || format!("heights strictly ascending violated ({heights:?})"))?;
        ensure(heights.iter().all(|h| *h > 0.0), || format!("heights > 0 violated ({heights:?})"))?;
        ensure(k.len() == angles.len(), || {
            format!("k has {} rows, expected one per angle ({})", k.len(), angles.len())
        })?;
        for (row, angle) in k.iter().zip(&angles) {
            ensure(row.len() == heights.len(), || {
                format!("k row for {angle} deg has {} values, expected {}", row.len(), heights.len())
            })?;
            ensure(row.iter().all(|v| *v > 0.0 && v.is_finite()), || {
                format!("all k > 0 violated (row for {angle} deg: {row:?})")
            })?;
        }
        Ok(Self { angles, heights, k })
    }

    /// Measured frontal profile, with the oblique columns scaled from it.
    ///
    /// h2 at 0° is not reported and is taken as the midpoint of h1 and h3.
    /// The 45° and 90° columns are the 0° column times `scale_45` / `scale_90`.
    pub fn measured(heights: [f64; 4], scale_45: f64, scale_90: f64) -> Result<Self> {
        let frontal = vec![
            FRONTAL_K_H1,
            0.5 * (FRONTAL_K_H1 + FRONTAL_K_H3),
            FRONTAL_K_H3,
            FRONTAL_K_H4,
        ];
        let scaled = |s: f64| frontal.iter().map(|k| k * s).collect::<Vec<_>>();
        Self::new(
            DEFAULT_ANGLES.to_vec(),
            heights.to_vec(),
            vec![frontal.clone(), scaled(scale_45), scaled(scale_90)],
        )
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }
    pub fn values(&self) -> &[Vec<f64>] {
        &self.k
    }

    pub fn height_range(&self) -> (f64, f64) {
        (self.heights[0], self.heights[self.heights.len() - 1])
    }

    /// Stiffness at contact height `h` (m) and propulsion angle `theta` (deg), N/mm.
    pub fn stiffness_at(&self, h: f64, theta: f64) -> Result<f64> {
        let (ih, th) = locate(&self.heights, h, "h")?;
        let (ia, ta) = locate(&self.angles, theta, "theta")?;
        let row = |i: usize| {
            let r = &self.k[i];
            if r.len() == 1 {
                r[0]
            } else {
                lerp(r[ih], r[ih + 1], th)
            }
        };
        if self.angles.len() == 1 {
            Ok(row(0))
        } else {
            Ok(lerp(row(ia), row(ia + 1), ta))
        }
    }

    /// Normal force for a penetration in mm, N.
    pub fn normal_force(&self, penetration_mm: f64, h: f64, theta: f64) -> Result<f64> {
        if !(penetration_mm >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penetration must be >= 0 (got {penetration_mm} mm)"
            )));
        }
        if penetration_mm > MAX_COMPRESSION_MM {
            return Err(Error::BeyondCompressionDepth {
                penetration_mm,
                limit_mm: MAX_COMPRESSION_MM,
            });
        }
        Ok(self.stiffness_at(h, theta)? * penetration_mm)
    }
}

impl Default for StiffnessProfile {
    fn default() -> Self {
        Self::measured(DEFAULT_HEIGHTS, 1.0, 1.0).expect("built-in profile is valid")
    }
}

fn strictly_ascending(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

// Both weights are written out so that t == 0 and t == 1 return a knot bit-exactly.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    (1.0 - t) * a + t * b
}

/// Cell index and fractional position of `x` on a knot axis.
fn locate(knots: &[f64], x: f64, quantity: &'static str) -> Result<(usize, f64)> {
    let (min, max) = (knots[0], knots[knots.len() - 1]);
    if !(x >= min && x <= max) {
        return Err(Error::OutsideCharacterizedRegion {
            quantity,
            value: x,
            min,
            max,
        });
    }
    if knots.len() == 1 {
        return Ok((0, 0.0));
    }
    let i = knots.partition_point(|k| *k <= x).clamp(1, knots.len() - 1) - 1;
    let t = (x - knots[i]) / (knots[i + 1] - knots[i]);
    Ok((i, t))
}
