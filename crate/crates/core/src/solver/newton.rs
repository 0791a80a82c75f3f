//! Incremental Newton-Raphson with load-step bisection.

use nalgebra::DVector;

use super::loads::LoadProgram;
use super::model::Model;
use super::sparse::SkylineLdl;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Halve the increment on failure instead of aborting.
    pub bisection: bool,
    pub max_bisections: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 6e-3,
            max_iter: 30,
            bisection: true,
            max_bisections: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub step: usize,
    pub iteration: usize,
    pub residual: f64,
    pub du_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub load_factor: f64,
    pub iterations: usize,
    pub bisections: usize,
    pub residual: f64,
    pub external_norm: f64,
    pub reaction_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// Total dof vector [mm].
    pub u: DVector<f64>,
    pub x_current: Vec<Vec2>,
    pub step: usize,
    pub residual_norm: f64,
    /// Converged u after every step.
    pub history: Vec<DVector<f64>>,
    pub steps: Vec<StepRecord>,
    pub log: Vec<IterationLog>,
}

impl SolverState {
    pub fn new(model: &Model) -> Self {
        SolverState {
            u: DVector::zeros(model.n_dofs()),
            x_current: model.mesh.nodes.clone(),
            step: 0,
            residual_norm: 0.0,
            history: Vec::new(),
            steps: Vec::new(),
            log: Vec::new(),
        }
    }
}

struct Bcs<'a> {
    constraints: &'a [(usize, f64)],
    free: &'a [usize],
    /// External force per unit load factor.
    traction: &'a DVector<f64>,
}

struct Increment {
    iterations: usize,
    residual: f64,
    external: f64,
    reaction: f64,
}

/// Solve one increment of the load factor from `lam0` to `lam1`. `u` is updated
/// only on success.
fn solve_increment(
    model: &Model,
    bcs: &Bcs,
    u: &mut DVector<f64>,
    (lam0, lam1): (f64, f64),
    step: usize,
    opts: &SolverOptions,
    log: &mut Vec<IterationLog>,
) -> Result<Increment> {
    let Bcs {
        constraints,
        free,
        traction,
    } = *bcs;
    let n = model.n_dofs();
    let mut k = model.pattern();
    let mut trial = u.clone();
    let f_ext = traction * lam1;
    let ext_norm = free
        .iter()
        .map(|&d| f_ext[d] * f_ext[d])
        .sum::<f64>()
        .sqrt();
    // prescribed increment, applied through the tangent on the first iteration
    let mut dg = DVector::zeros(n);
    for &(d, rate) in constraints {
        dg[d] = rate * (lam1 - lam0);
    }
    let mut history: Vec<f64> = Vec::new();
    let mut growth = 0;
    for it in 0..opts.max_iter {
        let f_int = model.assemble(&trial, &mut k)?;
        let r = &f_int - &f_ext;
        let res = free.iter().map(|&d| r[d] * r[d]).sum::<f64>().sqrt();
        let reac = constraints
            .iter()
            .map(|&(d, _)| r[d] * r[d])
            .sum::<f64>()
            .sqrt();
        if it > 0 {
            let scale = ext_norm.max(reac);
            let converged = if scale > 0.0 {
                res <= opts.tol * scale
            } else {
                res <= f64::EPSILON
            };
            if converged {
                *u = trial;
                return Ok(Increment {
                    iterations: it,
                    residual: res,
                    external: ext_norm,
                    reaction: reac,
                });
            }
            if let Some(&prev) = history.last() {
                growth = if res > prev { growth + 1 } else { 0 };
                if growth >= 3 {
                    return Err(Error::Diverged {
                        step,
                        reason: format!("residual grew for 3 iterations ({res:.3e})"),
                    });
                }
            }
            if !res.is_finite() {
                return Err(Error::Diverged {
                    step,
                    reason: "non-finite residual".into(),
                });
            }
        }
        history.push(res);
        let mut rhs = DVector::from_iterator(free.len(), free.iter().map(|&d| -r[d]));
        if it == 0 && dg.iter().any(|v| *v != 0.0) {
            let kdg = k.mul_vec(&dg);
            for (a, &d) in free.iter().enumerate() {
                rhs[a] -= kdg[d];
            }
        }
        let ldl = SkylineLdl::factor(&k, free)?;
        let du = ldl.solve(&rhs);
        let mut du_norm = du.norm_squared();
        for (a, &d) in free.iter().enumerate() {
            trial[d] += du[a];
        }
        if it == 0 {
            for &(d, _) in constraints {
                trial[d] += dg[d];
                du_norm += dg[d] * dg[d];
            }
        }
        log.push(IterationLog {
            step,
            iteration: it + 1,
            residual: res,
            du_norm: du_norm.sqrt(),
        });
        log::info!(
            "step {step} iter {} |R| {res:.4e} |du| {:.4e}",
            it + 1,
            du_norm.sqrt()
        );
    }
    Err(Error::Diverged {
        step,
        reason: format!("no convergence in {} iterations", opts.max_iter),
    })
}

/// Run the load program. `on_step` sees the state after every converged step
/// and may stop the run early by returning false.
pub fn newton_solve(
    model: &Model,
    program: &LoadProgram,
    opts: &SolverOptions,
    mut on_step: impl FnMut(&SolverState) -> Result<bool>,
) -> Result<SolverState> {
    program.validate(model)?;
    let constraints = program.constraints(model)?;
    let mut is_fixed = vec![false; model.n_dofs()];
    for &(d, _) in &constraints {
        is_fixed[d] = true;
    }
    let free: Vec<usize> = (0..model.n_dofs()).filter(|&d| !is_fixed[d]).collect();
    let mut state = SolverState::new(model);
    for step in 1..=program.n_steps {
        // traction edges are taken on the configuration at the step start
        let per_factor = program.traction_rate(model, &state.x_current)?;
        let base = (step - 1) as f64;
        let bcs = Bcs {
            constraints: &constraints,
            free: &free,
            traction: &per_factor,
        };
        let (mut lam, target) = (base, step as f64);
        let mut dl = 1.0;
        let mut level = 0;
        let mut iterations = 0;
        let mut last = None;
        while lam < target - 1e-12 {
            let lam1 = (lam + dl).min(target);
            let mut u = state.u.clone();
            match solve_increment(model, &bcs, &mut u, (lam, lam1), step, opts, &mut state.log) {
                Ok(inc) => {
                    state.u = u;
                    lam = lam1;
                    iterations += inc.iterations;
                    last = Some(inc);
                }
                Err(e @ (Error::Diverged { .. } | Error::Inversion { .. })) => {
                    if !opts.bisection || level >= opts.max_bisections {
                        return Err(match e {
                            Error::Inversion { element, det } => Error::Diverged {
                                step,
                                reason: format!("element {element} inverted (det {det:.3e}) after {level} bisections"),
                            },
                            Error::Diverged { reason, .. } => {
                                Error::Diverged { step, reason: format!("{reason} after {level} bisections") }
                            }
                            other => other,
                        });
                    }
                    level += 1;
                    dl *= 0.5;
                    log::warn!("step {step}: {e}; bisecting (level {level})");
                }
                Err(e) => return Err(e),
            }
        }
        let inc = last.unwrap();
        state.step = step;
        state.residual_norm = inc.residual;
        state.x_current = model.current_nodes(&state.u);
        state.history.push(state.u.clone());
        state.steps.push(StepRecord {
            step,
            load_factor: step as f64,
            iterations,
            bisections: level,
            residual: inc.residual,
            external_norm: inc.external,
            reaction_norm: inc.reaction,
        });
        log::info!(
            "step {step}: {iterations} iterations, |R| {:.3e}",
            inc.residual
        );
        if !on_step(&state)? {
            break;
        }
    }
    Ok(state)
}
