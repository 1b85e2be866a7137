//! Grid syntax for sweeps: `a,b,c` or an inclusive range `start:stop:step`.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub delta: Vec<f64>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.n.len() * self.p.len() * self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_one<T: FromStr>(token: &str) -> Result<T> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse grid value '{token}'")))
}

pub fn parse_int_grid(spec: &str) -> Result<Vec<usize>> {
    if let Some((start, stop, step)) = range_parts(spec) {
        let (start, stop, step): (usize, usize, usize) =
            (parse_one(start)?, parse_one(stop)?, parse_one(step)?);
        if step == 0 || stop < start {
            return Err(Error::Config(format!("bad integer range '{spec}'")));
        }
        return Ok((start..=stop).step_by(step).collect());
    }
    spec.split(',').map(parse_one).collect()
}

pub fn parse_float_grid(spec: &str) -> Result<Vec<f64>> {
    if let Some((start, stop, step)) = range_parts(spec) {
        let (start, stop, step): (f64, f64, f64) =
            (parse_one(start)?, parse_one(stop)?, parse_one(step)?);
        if !(step > 0.0) || stop < start {
            return Err(Error::Config(format!("bad float range '{spec}'")));
        }
        let slack = step * 1e-9;
        let count = ((stop - start + slack) / step).floor() as usize;
        return Ok((0..=count).map(|k| start + k as f64 * step).collect());
    }
    spec.split(',').map(parse_one).collect()
}

fn range_parts(spec: &str) -> Option<(&str, &str, &str)> {
    let mut parts = spec.split(':');
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), Some(c), None) => Some((a, b, c)),
        _ => None,
    }
}
