use crate::error::{ensure, Result};

/// One constant-speed stretch of belt commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub v_left: f64,
    pub v_right: f64,
}

/// Open-loop belt command sequence. Belts are stopped after the last segment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BeltSchedule {
    segments: Vec<Segment>,
}

impl BeltSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            ensure(s.duration > 0.0 && s.duration.is_finite(), || {
                format!("segment {i}: duration > 0 violated (duration = {})", s.duration)
            })?;
            ensure(s.v_left.is_finite() && s.v_right.is_finite(), || {
                format!("segment {i}: belt speeds must be finite")
            })?;
        }
        Ok(Self { segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Rejects any segment faster than `limit`.
    pub fn check_speed_limit(&self, limit: f64) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            ensure(s.v_left.abs() <= limit && s.v_right.abs() <= limit, || {
                format!(
                    "segment {i}: speeds within belt_speed_limit violated ({}, {} vs {limit})",
                    s.v_left, s.v_right
                )
            })?;
        }
        Ok(())
    }

    pub fn then(mut self, other: &BeltSchedule) -> Self {
        self.segments.extend_from_slice(&other.segments);
        self
    }

    /// Left and right belts exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    v_left: s.v_right,
                    v_right: s.v_left,
                    ..*s
                })
                .collect(),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    v_left: -s.v_left,
                    v_right: -s.v_right,
                    ..*s
                })
                .collect(),
        }
    }

    pub fn cursor(&self) -> ScheduleCursor<'_> {
        ScheduleCursor {
            schedule: self,
            index: 0,
            segment_end: self.segments.first().map_or(0.0, |s| s.duration),
        }
    }

    /// Commanded (left, right) speeds at time `t`.
    pub fn speeds_at(&self, t: f64) -> (f64, f64) {
        self.cursor().speeds_at(t)
    }
}

/// Forward-only lookup for monotonically increasing query times.
#[derive(Debug, Clone)]
pub struct ScheduleCursor<'a> {
    schedule: &'a BeltSchedule,
    index: usize,
    segment_end: f64,
}

impl ScheduleCursor<'_> {
    pub fn speeds_at(&mut self, t: f64) -> (f64, f64) {
        let segs = &self.schedule.segments;
        while self.index < segs.len() && t >= self.segment_end {
            self.index += 1;
            if let Some(s) = segs.get(self.index) {
                self.segment_end += s.duration;
            }
        }
        segs.get(self.index).map_or((0.0, 0.0), |s| (s.v_left, s.v_right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(duration: f64, v_left: f64, v_right: f64) -> Segment {
        Segment { duration, v_left, v_right }
    }

    #[test]
    fn lookup_walks_segments() {
        let s = BeltSchedule::new(vec![seg(1.0, 0.1, 0.1), seg(0.5, -0.1, 0.1)]).unwrap();
        assert_eq!(s.speeds_at(0.0), (0.1, 0.1));
        assert_eq!(s.speeds_at(0.999), (0.1, 0.1));
        assert_eq!(s.speeds_at(1.2), (-0.1, 0.1));
        assert_eq!(s.speeds_at(1.5), (0.0, 0.0));
        assert_eq!(s.total_duration(), 1.5);
        let mut c = s.cursor();
        assert_eq!(c.speeds_at(0.5), (0.1, 0.1));
        assert_eq!(c.speeds_at(1.25), (-0.1, 0.1));
        assert_eq!(c.speeds_at(9.0), (0.0, 0.0));
    }

    #[test]
    fn rejects_nonpositive_duration() {
        assert!(BeltSchedule::new(vec![seg(0.0, 0.1, 0.1)]).is_err());
        assert!(BeltSchedule::new(vec![seg(-1.0, 0.1, 0.1)]).is_err());
    }

    #[test]
    fn speed_limit_check() {
        let s = BeltSchedule::new(vec![seg(1.0, 0.3, -0.6)]).unwrap();
        assert!(s.check_speed_limit(0.6).is_ok());
        assert!(s.check_speed_limit(0.5).is_err());
    }

    #[test]
    fn mirror_and_negate() {
        let s = BeltSchedule::new(vec![seg(1.0, 0.1, 0.3)]).unwrap();
        assert_eq!(s.mirrored().segments()[0], seg(1.0, 0.3, 0.1));
        assert_eq!(s.negated().segments()[0], seg(1.0, -0.1, -0.3));
    }
}
