use rayon::prelude::*;

use crate::config::Params;
use crate::error::{CliError, Result};
use crate::metrics::{evaluate, header, Metric};
use crate::range::{grid, Axis};

/// Most axes a single sweep may span.
pub const MAX_AXES: usize = 2;

/// Header and rows of a grid sweep. Rows follow the axis order with the
/// first axis outermost; points are evaluated in parallel but emitted in
/// grid order.
pub fn run_sweep(base: &Params, axes: &[Axis], metrics: &[Metric]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    if axes.is_empty() || axes.len() > MAX_AXES {
        return Err(CliError::usage(format!(
            "a sweep needs 1 to {MAX_AXES} axes, got {}",
            axes.len()
        )));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.param == a.param) {
            return Err(CliError::usage(format!("axis {} given twice", a.param)));
        }
    }

    let mut cols: Vec<String> = axes.iter().map(|a| a.param.to_string()).collect();
    cols.extend(header(metrics));

    let rows = grid(axes)
        .into_par_iter()
        .map(|values| {
            let mut p = base.clone();
            for (axis, &v) in axes.iter().zip(&values) {
                p.set_swept(axis.param, v)?;
            }
            let mut row = values;
            row.extend(evaluate(&p, metrics)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cols, rows))
}
