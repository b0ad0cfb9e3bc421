//! `start:stop:count` grids.

use std::str::FromStr;

use crate::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return invalid("grid bounds must be finite");
        }
        if count == 0 {
            return invalid("grid count must be at least 1");
        }
        if count > 1 && !(stop > start) {
            return invalid(format!("grid stop {stop} must exceed start {start}"));
        }
        Ok(Grid { start, stop, count })
    }

    /// Evenly spaced points, both ends included.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

/// A number, optionally written as a multiple of pi such as `3pi/4`.
fn parse_num(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((lhs, rhs)) = s.split_once("pi") {
        let mult = match lhs.trim() {
            "" => 1.0,
            "-" => -1.0,
            t => t.trim_end_matches('*').parse::<f64>().map_err(|_| bad(s))?,
        };
        let div = match rhs.trim() {
            "" => 1.0,
            t => t.strip_prefix('/').ok_or_else(|| bad(s))?.parse::<f64>().map_err(|_| bad(s))?,
        };
        return Ok(mult * std::f64::consts::PI / div);
    }
    s.parse::<f64>().map_err(|_| bad(s))
}

fn bad(s: &str) -> Error {
    Error::Invalid(format!("cannot parse `{s}` as a number"))
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return invalid(format!("grid `{s}` is not start:stop:count"));
        };
        let count = c.trim().parse::<usize>().map_err(|_| bad(c))?;
        Grid::new(parse_num(a)?, parse_num(b)?, count)
    }
}
