//! Limited-memory BFGS with a strong-Wolfe line search.
//!
//! Two-loop recursion over a bounded (s, y) history; the line search
//! brackets and zooms per Nocedal & Wright. Accepted steps always satisfy
//! the Armijo condition, so the objective is non-increasing across
//! iterations.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    /// Cap on outer quasi-Newton iterations.
    pub max_iters: usize,
    /// Number of (s, y) pairs kept for the two-loop recursion.
    pub history: usize,
    /// Stop when the gradient infinity norm drops below this.
    pub grad_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant for the strong Wolfe condition.
    pub c2: f64,
    /// Budget of function evaluations per line search.
    pub max_line_evals: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            max_iters: 100,
            history: 10,
            grad_tol: 1e-6,
            c1: 1e-4,
            c2: 0.9,
            max_line_evals: 30,
        }
    }
}

/// Why the optimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Gradient infinity norm fell below tolerance.
    GradientTol,
    /// Ran the full iteration budget.
    MaxIters,
    /// No acceptable step found; the best iterate so far is returned.
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Minimizes `eval` (which returns the value and gradient at a point)
/// starting from `x0`.
pub fn minimize<F>(mut eval: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut value, mut grad) = eval(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.history);
    let mut iterations = 0;
    let mut termination = Termination::MaxIters;

    for iter in 0..opts.max_iters {
        if inf_norm(&grad) < opts.grad_tol {
            termination = Termination::GradientTol;
            break;
        }
        let mut direction = two_loop_direction(&grad, &history);
        let mut slope = dot(&direction, &grad);
        if slope >= 0.0 || slope.is_nan() {
            // Curvature information went stale; restart from steepest descent.
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = dot(&direction, &grad);
            if slope == 0.0 {
                termination = Termination::GradientTol;
                break;
            }
        }
        let initial_step = if history.is_empty() {
            (1.0 / inf_norm(&grad)).min(1.0)
        } else {
            1.0
        };

        match strong_wolfe(&mut eval, &x, value, &grad, &direction, slope, initial_step, opts) {
            Some(step) => {
                let s: Vec<f64> = direction.iter().map(|d| d * step.alpha).collect();
                let y: Vec<f64> = step
                    .grad
                    .iter()
                    .zip(&grad)
                    .map(|(gn, go)| gn - go)
                    .collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * norm2(&s) * norm2(&y) {
                    if history.len() == opts.history {
                        history.pop_front();
                    }
                    let rho = 1.0 / sy;
                    history.push_back((s.clone(), y, rho));
                }
                for i in 0..n {
                    x[i] += s[i];
                }
                value = step.value;
                grad = step.grad;
                iterations = iter + 1;
            }
            None => {
                termination = Termination::LineSearchFailed;
                iterations = iter + 1;
                break;
            }
        }
    }
    if termination == Termination::MaxIters && inf_norm(&grad) < opts.grad_tol {
        termination = Termination::GradientTol;
    }

    LbfgsOutcome {
        grad_inf_norm: inf_norm(&grad),
        x,
        value,
        iterations,
        termination,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// H * g via the two-loop recursion, scaled by the standard gamma guess.
fn two_loop_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

struct AcceptedStep {
    alpha: f64,
    value: f64,
    grad: Vec<f64>,
}

struct ProbePoint {
    alpha: f64,
    value: f64,
    slope: f64,
    grad: Vec<f64>,
}

/// Bracket-and-zoom line search for the strong Wolfe conditions. Returns
/// None only when not even an Armijo point could be found within budget.
#[allow(clippy::too_many_arguments)]
fn strong_wolfe<F>(
    eval: &mut F,
    x: &[f64],
    f0: f64,
    _g0: &[f64],
    direction: &[f64],
    slope0: f64,
    initial_step: f64,
    opts: &LbfgsOptions,
) -> Option<AcceptedStep>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut evals = 0usize;
    let mut probe = |alpha: f64, evals: &mut usize| -> ProbePoint {
        *evals += 1;
        let point: Vec<f64> = x
            .iter()
            .zip(direction)
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        let (value, grad) = eval(&point);
        let slope = dot(&grad, direction);
        ProbePoint {
            alpha,
            value,
            slope,
            grad,
        }
    };
    let armijo = |p: &ProbePoint| p.value <= f0 + opts.c1 * p.alpha * slope0;
    let curvature = |p: &ProbePoint| p.slope.abs() <= -opts.c2 * slope0;

    let mut prev = ProbePoint {
        alpha: 0.0,
        value: f0,
        slope: slope0,
        grad: Vec::new(),
    };
    let mut alpha = initial_step.max(f64::MIN_POSITIVE);
    let mut bracket: Option<(ProbePoint, ProbePoint)> = None;
    for i in 0..opts.max_line_evals {
        let p = probe(alpha, &mut evals);
        if !p.value.is_finite() {
            // Overshot into garbage; treat as a high wall and zoom back.
            bracket = Some((prev, p));
            break;
        }
        if !armijo(&p) || (i > 0 && p.value >= prev.value) {
            bracket = Some((prev, p));
            break;
        }
        if curvature(&p) {
            return Some(AcceptedStep {
                alpha: p.alpha,
                value: p.value,
                grad: p.grad,
            });
        }
        if p.slope >= 0.0 {
            bracket = Some((p, prev));
            break;
        }
        alpha *= 2.0;
        prev = p;
    }

    let (mut lo, mut hi) = bracket?;
    // `lo` always satisfies Armijo with the lowest value seen.
    let mut fallback: Option<AcceptedStep> = if lo.alpha > 0.0 {
        Some(AcceptedStep {
            alpha: lo.alpha,
            value: lo.value,
            grad: lo.grad.clone(),
        })
    } else {
        None
    };
    while evals < opts.max_line_evals {
        let mid_alpha = 0.5 * (lo.alpha + hi.alpha);
        if (hi.alpha - lo.alpha).abs() < 1e-16 * (1.0 + lo.alpha.abs()) {
            break;
        }
        let p = probe(mid_alpha, &mut evals);
        if !p.value.is_finite() || !armijo(&p) || p.value >= lo.value {
            hi = p;
            continue;
        }
        if curvature(&p) {
            return Some(AcceptedStep {
                alpha: p.alpha,
                value: p.value,
                grad: p.grad,
            });
        }
        if p.slope * (hi.alpha - lo.alpha) >= 0.0 {
            hi = ProbePoint {
                alpha: lo.alpha,
                value: lo.value,
                slope: lo.slope,
                grad: std::mem::take(&mut lo.grad),
            };
        }
        fallback = Some(AcceptedStep {
            alpha: p.alpha,
            value: p.value,
            grad: p.grad.clone(),
        });
        lo = p;
    }
    // Budget exhausted: settle for the best Armijo point if there was one.
    fallback
}
