//! `start:stop:steps` grids and `name=start:stop:steps` sweep axes.

use std::fmt;
use std::str::FromStr;

use crate::config::SweepParam;
use crate::error::{CliError, Result};

/// Inclusive grid of `steps` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn point(x: f64) -> Self {
        Self {
            start: x,
            stop: x,
            steps: 1,
        }
    }

    pub fn is_point(&self) -> bool {
        self.steps == 1
    }

    pub fn points(&self) -> Vec<f64> {
        dirnet::linspace(self.start, self.stop, self.steps)
    }
}

impl FromStr for Range {
    type Err = CliError;

    /// Accepts `start:stop:steps` or a bare number for a single point.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| CliError::usage(format!("bad range '{s}': {why} (expected start:stop:steps)"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| -> Result<f64> {
            let v: f64 = p.trim().parse().map_err(|_| bad("not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("not finite"))
            }
        };
        let range = match parts.as_slice() {
            [x] => Range::point(num(x)?),
            [a, b, n] => Range {
                start: num(a)?,
                stop: num(b)?,
                steps: n.trim().parse().map_err(|_| bad("steps must be a positive integer"))?,
            },
            _ => return Err(bad("wrong number of fields")),
        };
        if range.steps == 0 {
            return Err(bad("steps must be at least 1"));
        }
        if range.steps == 1 && range.start != range.stop {
            return Err(bad("a single step needs start == stop"));
        }
        Ok(range)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

/// One swept parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub range: Range,
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("bad axis '{s}' (expected name=start:stop:steps)")))?;
        Ok(Self {
            param: name.parse()?,
            range: range.parse()?,
        })
    }
}

/// Every combination of axis values, first axis outermost.
pub fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        let pts = axis.range.points();
        acc.into_iter()
            .flat_map(|prefix| {
                pts.iter().map(move |&x| {
                    let mut row = prefix.clone();
                    row.push(x);
                    row
                })
            })
            .collect()
    })
}
