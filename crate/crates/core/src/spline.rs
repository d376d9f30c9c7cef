//! Piecewise-linear functions on right-closed segments of `(0, 1]`.
//!
//! Each segment is linear on `(t_start, t_end]`; consecutive segments share
//! boundaries but not necessarily values, so jumps at the breakpoints are
//! representable. Evaluation at a boundary returns the left segment's
//! endpoint; evaluation at 0 returns the stored initial value.

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub y_start: f64,
    pub y_end: f64,
}

impl Segment {
    /// Linear value at `t`, exact at the segment's right endpoint.
    pub fn value_at(&self, t: f64) -> f64 {
        if t == self.t_end {
            return self.y_end;
        }
        self.y_start + (self.y_end - self.y_start) * ((t - self.t_start) / (self.t_end - self.t_start))
    }
}

/// Piecewise-linear path on `[0, 1]` with right-closed segments.
#[derive(Debug, Clone)]
pub struct SplinePath {
    initial: f64,
    segments: Vec<Segment>,
}

impl SplinePath {
    /// Build a path from contiguous segments covering `(0, 1]`.
    pub fn new(initial: f64, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("a spline path needs at least one segment"));
        }
        if segments[0].t_start != 0.0 {
            return Err(Error::invalid("first segment must start at 0"));
        }
        if segments.last().unwrap().t_end != 1.0 {
            return Err(Error::invalid("last segment must end at 1"));
        }
        for w in segments.windows(2) {
            if w[0].t_end != w[1].t_start {
                return Err(Error::invalid(format!(
                    "segments not contiguous at t = {}",
                    w[0].t_end
                )));
            }
        }
        if segments.iter().any(|s| !(s.t_start < s.t_end)) {
            return Err(Error::invalid("each segment needs t_start < t_end"));
        }
        Ok(SplinePath { initial, segments })
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Value at `t` in `[0, 1]`: the unique segment with
    /// `t_start < t <= t_end`, or the initial value at `t = 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!(
                "evaluation time must lie in [0, 1], got {t}"
            )));
        }
        if t == 0.0 {
            return Ok(self.initial);
        }
        let idx = self.segments.partition_point(|s| s.t_end < t);
        Ok(self.segments[idx].value_at(t))
    }

    /// Right limit at `t`: the value as `s -> t` from above. Differs from
    /// `eval` only at a segment boundary with a jump; at `t = 1` it is the
    /// final value.
    pub fn right_limit(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!(
                "evaluation time must lie in [0, 1], got {t}"
            )));
        }
        if t == 1.0 {
            return Ok(self.segments.last().unwrap().y_end);
        }
        let idx = self.segments.partition_point(|s| s.t_end <= t);
        let seg = &self.segments[idx];
        if seg.t_start == t {
            Ok(seg.y_start)
        } else {
            Ok(seg.value_at(t))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jumpy() -> SplinePath {
        SplinePath::new(
            0.0,
            vec![
                Segment { t_start: 0.0, t_end: 0.5, y_start: 0.0, y_end: 1.0 },
                Segment { t_start: 0.5, t_end: 1.0, y_start: -2.0, y_end: 0.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_gaps_and_bad_cover() {
        let seg = |a: f64, b: f64| Segment { t_start: a, t_end: b, y_start: 0.0, y_end: 0.0 };
        assert!(SplinePath::new(0.0, vec![]).is_err());
        assert!(SplinePath::new(0.0, vec![seg(0.1, 1.0)]).is_err());
        assert!(SplinePath::new(0.0, vec![seg(0.0, 0.9)]).is_err());
        assert!(SplinePath::new(0.0, vec![seg(0.0, 0.4), seg(0.5, 1.0)]).is_err());
        assert!(SplinePath::new(0.0, vec![seg(0.0, 0.0), seg(0.0, 1.0)]).is_err());
        assert!(SplinePath::new(0.0, vec![seg(0.0, 1.0)]).is_ok());
    }

    #[test]
    fn boundary_belongs_to_left_segment() {
        let s = jumpy();
        assert_eq!(s.eval(0.5).unwrap(), 1.0);
        // Just past the jump the next segment applies.
        let just_after = 0.5 + 1e-9;
        assert!((s.eval(just_after).unwrap() - (-2.0)).abs() < 1e-7);
        assert_eq!(s.eval(1.0).unwrap(), 0.0);
    }

    #[test]
    fn right_limit_exposes_the_jump() {
        let s = jumpy();
        assert_eq!(s.right_limit(0.5).unwrap(), -2.0);
        assert_eq!(s.right_limit(1.0).unwrap(), 0.0);
        // Away from boundaries both sides agree.
        assert_eq!(s.right_limit(0.25).unwrap(), s.eval(0.25).unwrap());
        // At 0 the first segment's start value is the right limit.
        assert_eq!(s.right_limit(0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_maps_to_initial_value() {
        let s = jumpy();
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        let s = jumpy();
        assert!(s.eval(-0.1).is_err());
        assert!(s.eval(1.1).is_err());
    }

    #[test]
    fn interior_values_are_linear() {
        let s = jumpy();
        assert!((s.eval(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.eval(0.75).unwrap() - (-1.0)).abs() < 1e-15);
    }
}
