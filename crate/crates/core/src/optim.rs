//! Nelder-Mead downhill simplex minimization.

use thiserror::Error;

use crate::exec::{map_slice, Execution};

/// Simplex coefficients and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    pub reflect: f64,
    pub expand: f64,
    pub contract: f64,
    pub shrink: f64,
    /// Stop once both the spread of objective values and the spread of vertex
    /// coordinates across the simplex drop below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Offset of each initial vertex from `x0` along one axis, relative to the
    /// coordinate's magnitude.
    pub relative_step: f64,
    /// Offset used for coordinates of `x0` that are exactly zero.
    pub zero_step: f64,
    /// Vertex evaluation mode for the initial simplex and shrink steps.
    pub execution: Execution,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            reflect: 1.0,
            expand: 2.0,
            contract: 0.5,
            shrink: 0.5,
            tolerance: 1e-8,
            max_iterations: 10_000,
            relative_step: 0.05,
            zero_step: 0.25,
            execution: Execution::Sequential,
        }
    }
}

impl NelderMeadConfig {
    fn validate(&self) -> Result<(), OptimError> {
        let ok = self.reflect > 0.0
            && self.expand > 1.0
            && self.expand > self.reflect
            && self.contract > 0.0
            && self.contract < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.tolerance > 0.0
            && self.relative_step > 0.0
            && self.zero_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(OptimError::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// Best point found by a minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,
    #[error("starting point is empty")]
    EmptyStart,
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence after {} iterations (best value {})", .best.iterations, .best.value)]
    NotConverged { best: Minimum },
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

/// Minimizes `objective` from `x0`.
///
/// Non-finite objective values are treated as `+∞`, so the simplex steps away
/// from them. Exceeding `max_iterations` returns
/// [`OptimError::NotConverged`] carrying the best vertex.
pub fn nelder_mead<F>(
    objective: F,
    x0: &[f64],
    config: &NelderMeadConfig,
) -> Result<Minimum, OptimError>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    config.validate()?;
    if x0.is_empty() {
        return Err(OptimError::EmptyStart);
    }
    let f = |x: &[f64]| {
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = objective(x0);
    if !f0.is_finite() {
        return Err(OptimError::NonFiniteStart);
    }

    let dim = x0.len();
    let mut points = vec![x0.to_vec()];
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += if p[i] != 0.0 {
            config.relative_step * p[i]
        } else {
            config.zero_step
        };
        points.push(p);
    }
    let values = map_slice(config.execution, &points[1..], |p| f(p));
    let mut simplex: Vec<Vertex> = std::iter::once(Vertex {
        x: points[0].clone(),
        f: f0,
    })
    .chain(
        points
            .into_iter()
            .skip(1)
            .zip(values)
            .map(|(x, f)| Vertex { x, f }),
    )
    .collect();
    let mut evaluations = dim + 1;

    let mut centroid = vec![0.0; dim];
    let point_along = |c: &[f64], towards: &[f64], t: f64| -> Vec<f64> {
        c.iter()
            .zip(towards)
            .map(|(ci, wi)| ci + t * (wi - ci))
            .collect()
    };

    for iteration in 0..config.max_iterations {
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        if has_converged(&simplex, config.tolerance) {
            return Ok(finish(simplex, iteration, evaluations, true));
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let best = simplex[0].f;
        let second_worst = simplex[dim - 1].f;
        let worst = simplex[dim].f;

        // x_r = c + ρ (c - x_w)
        let reflected = point_along(&centroid, &simplex[dim].x, -config.reflect);
        let f_reflected = f(&reflected);
        evaluations += 1;

        if f_reflected < best {
            let expanded = point_along(&centroid, &simplex[dim].x, -config.reflect * config.expand);
            let f_expanded = f(&expanded);
            evaluations += 1;
            simplex[dim] = if f_expanded < f_reflected {
                Vertex {
                    x: expanded,
                    f: f_expanded,
                }
            } else {
                Vertex {
                    x: reflected,
                    f: f_reflected,
                }
            };
            continue;
        }
        if f_reflected < second_worst {
            simplex[dim] = Vertex {
                x: reflected,
                f: f_reflected,
            };
            continue;
        }

        let accepted = if f_reflected < worst {
            let outside = point_along(&centroid, &reflected, config.contract);
            let f_outside = f(&outside);
            evaluations += 1;
            (f_outside <= f_reflected).then_some(Vertex {
                x: outside,
                f: f_outside,
            })
        } else {
            let inside = point_along(&centroid, &simplex[dim].x, config.contract);
            let f_inside = f(&inside);
            evaluations += 1;
            (f_inside < worst).then_some(Vertex {
                x: inside,
                f: f_inside,
            })
        };
        if let Some(v) = accepted {
            simplex[dim] = v;
            continue;
        }

        let anchor = simplex[0].x.clone();
        let shrunk: Vec<Vec<f64>> = simplex[1..]
            .iter()
            .map(|v| point_along(&anchor, &v.x, config.shrink))
            .collect();
        let values = map_slice(config.execution, &shrunk, |p| f(p));
        evaluations += dim;
        for (v, (x, fx)) in simplex[1..].iter_mut().zip(shrunk.into_iter().zip(values)) {
            *v = Vertex { x, f: fx };
        }
    }

    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
    let converged = has_converged(&simplex, config.tolerance);
    let best = finish(simplex, config.max_iterations, evaluations, converged);
    if converged {
        Ok(best)
    } else {
        Err(OptimError::NotConverged { best })
    }
}

fn has_converged(sorted: &[Vertex], tolerance: f64) -> bool {
    let value_spread = sorted[sorted.len() - 1].f - sorted[0].f;
    if !(value_spread.is_finite() && value_spread < tolerance) {
        return false;
    }
    let best = &sorted[0].x;
    let vertex_spread = sorted[1..]
        .iter()
        .flat_map(|v| v.x.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    vertex_spread < tolerance
}

fn finish(
    mut sorted: Vec<Vertex>,
    iterations: usize,
    evaluations: usize,
    converged: bool,
) -> Minimum {
    let best = sorted.swap_remove(0);
    Minimum {
        x: best.x,
        value: best.f,
        iterations,
        evaluations,
        converged,
    }
}
