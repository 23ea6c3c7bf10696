//! Grid sampling and the CSV / JSON writers behind `infpot grid` and
//! `infpot oracle`.
//!
//! CSV rows are `x,y,u,ux,uy,region`, `y` outer and `x` inner. Floats are
//! written in Rust's shortest round-trip form (`{:?}`), so identical inputs
//! give byte-identical files; an undefined gradient is written as `NaN`.

use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::DiscreteSolution;
use crate::field::{FieldSample, Folded, Potential, Region};
use crate::minimax::PlanePoint;

pub const CSV_HEADER: [&str; 6] = ["x", "y", "u", "ux", "uy", "region"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::domain(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

/// `i`-th of `n` equispaced coordinates on `[0, 2]`; exact at both ends and,
/// for odd `n`, at the centre.
pub fn axis(i: usize, n: usize) -> f64 {
    2.0 * i as f64 / (n - 1) as f64
}

/// Samples of the analytic field on an `nx × ny` grid of `[0, 2]²`, `y` outer.
pub fn sample_grid(potential: &Potential, nx: usize, ny: usize) -> Result<Vec<FieldSample>> {
    if nx < 2 || ny < 2 {
        return Err(Error::domain(format!("grid needs nx, ny >= 2, got {nx} x {ny}")));
    }
    (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let p = PlanePoint::new(axis(k % nx, nx), axis(k / nx, ny))?;
            potential.sample(p).map_err(|e| e.at(p))
        })
        .collect()
}

/// The discrete solution in the layout of [`sample_grid`], with
/// difference-quotient gradients. The gradient is left undefined where the
/// analytic one is: at the centre and at the corners of the square.
pub fn discrete_samples(sol: &DiscreteSolution) -> Result<Vec<FieldSample>> {
    let n = sol.spec.n;
    (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let point = PlanePoint::new(sol.spec.coordinate(i), sol.spec.coordinate(j))?;
            let region = Folded::new(point).region();
            let corner = (i == 0 || i == n - 1) && (j == 0 || j == n - 1);
            let grad = if region == Region::Center || corner { None } else { Some(sol.gradient(i, j)) };
            Ok(FieldSample { point, u: sol.at(i, j), grad, hessian: None, region })
        })
        .collect()
}

pub fn write_csv<W: Write>(samples: &[FieldSample], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in samples {
        let [ux, uy] = s.grad.unwrap_or([f64::NAN; 2]);
        w.write_record([
            format!("{:?}", s.point.x),
            format!("{:?}", s.point.y),
            format!("{:?}", s.u),
            format!("{ux:?}"),
            format!("{uy:?}"),
            s.region.as_str().to_string(),
        ])?;
    }
    w.flush()
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

pub fn write_samples<W: Write>(samples: &[FieldSample], format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(samples, out),
        Format::Json => write_json(samples, out),
    }
}
