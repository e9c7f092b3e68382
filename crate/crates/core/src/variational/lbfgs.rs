//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LbfgsOptions {
    pub max_iterations: usize,
    /// Stop when `‖∇f‖_∞` drops below this.
    pub gradient_tolerance: f64,
    /// Stop when `‖Δx‖_∞` drops below this.
    pub parameter_tolerance: f64,
    pub memory: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { max_iterations: 500, gradient_tolerance: 1e-7, parameter_tolerance: 1e-10, memory: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Objective after each iteration, starting with the initial value.
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Probe<'a, F> {
    f: &'a mut F,
    x: &'a [f64],
    d: &'a [f64],
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> Probe<'_, F> {
    fn eval(&mut self, a: f64) -> (f64, f64, Vec<f64>, Vec<f64>) {
        let xa: Vec<f64> = self.x.iter().zip(self.d).map(|(x, d)| x + a * d).collect();
        let (fa, ga) = (self.f)(&xa);
        self.evaluations += 1;
        let da = dot(&ga, self.d);
        (fa, da, xa, ga)
    }
}

fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if disc < 0.0 {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    t.is_finite().then_some(t)
}

type Point = (f64, f64, Vec<f64>, Vec<f64>);

/// Returns `(alpha, f, x, g)` satisfying the strong Wolfe conditions, if found.
fn line_search<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    probe: &mut Probe<'_, F>,
    f0: f64,
    d0: f64,
    a_init: f64,
) -> Option<(f64, Point)> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    const MAX_STEPS: usize = 30;
    let (mut a_prev, mut f_prev, mut d_prev) = (0.0, f0, d0);
    let mut a = a_init;
    for i in 0..MAX_STEPS {
        let p = probe.eval(a);
        let (fa, da) = (p.0, p.1);
        if !fa.is_finite() {
            a *= 0.5;
            continue;
        }
        if fa > f0 + C1 * a * d0 || (i > 0 && fa >= f_prev) {
            return zoom(probe, f0, d0, (a_prev, f_prev, d_prev), (a, fa, da));
        }
        if da.abs() <= -C2 * d0 {
            return Some((a, p));
        }
        if da >= 0.0 {
            return zoom(probe, f0, d0, (a, fa, da), (a_prev, f_prev, d_prev));
        }
        a_prev = a;
        f_prev = fa;
        d_prev = da;
        a *= 2.0;
    }
    None
}

fn zoom<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    probe: &mut Probe<'_, F>,
    f0: f64,
    d0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
) -> Option<(f64, Point)> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut best: Option<(f64, Point)> = None;
    for _ in 0..40 {
        let (left, right) = (lo.0.min(hi.0), lo.0.max(hi.0));
        let width = right - left;
        if width < 1e-16 * left.abs().max(1.0) {
            break;
        }
        let mut a = cubic_min(lo.0, lo.1, lo.2, hi.0, hi.1, hi.2).unwrap_or(0.5 * (lo.0 + hi.0));
        if !(a > left + 0.1 * width && a < right - 0.1 * width) {
            a = 0.5 * (lo.0 + hi.0);
        }
        let p = probe.eval(a);
        let (fa, da) = (p.0, p.1);
        if fa > f0 + C1 * a * d0 || fa >= lo.1 {
            hi = (a, fa, da);
        } else {
            if da.abs() <= -C2 * d0 {
                return Some((a, p));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, da);
            best = Some((a, p));
        }
    }
    // Accept a sufficient-decrease point even without the curvature condition.
    best
}

/// Minimizes `f`, which returns the value and gradient.
pub fn minimize<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(mut f: F, x0: &[f64], opts: &LbfgsOptions) -> LbfgsResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut evaluations = 1;
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut trace = vec![fx];
    let mut converged = inf_norm(&g) < opts.gradient_tolerance || n == 0;
    while !converged && iterations < opts.max_iterations {
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut d0 = dot(&g, &d);
        if !(d0 < 0.0) {
            hist.clear();
            d = g.iter().map(|v| -v).collect();
            d0 = dot(&g, &d);
        }
        let a_init = if hist.is_empty() { (1.0 / inf_norm(&g)).min(1.0) } else { 1.0 };
        let mut probe = Probe { f: &mut f, x: &x, d: &d, evaluations: 0 };
        let found = line_search(&mut probe, fx, d0, a_init);
        evaluations += probe.evaluations;
        iterations += 1;
        let Some((alpha, (fa, _, xa, ga))) = found else {
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        };
        let s: Vec<f64> = d.iter().map(|v| alpha * v).collect();
        let y: Vec<f64> = ga.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == opts.memory {
                hist.pop_front();
            }
            hist.push_back((s.clone(), y, 1.0 / sy));
        }
        let step = inf_norm(&s);
        x = xa;
        fx = fa;
        g = ga;
        trace.push(fx);
        if inf_norm(&g) < opts.gradient_tolerance || step < opts.parameter_tolerance {
            converged = true;
        }
    }
    LbfgsResult { gradient_norm: inf_norm(&g), x, f: fx, iterations, evaluations, converged, trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            (v, g)
        };
        let r = minimize(f, &[-1.2, 1.0], &LbfgsOptions { max_iterations: 200, ..Default::default() });
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_in_few_steps() {
        let f = |x: &[f64]| {
            let v: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum();
            (v, x.iter().enumerate().map(|(i, v)| 2.0 * (i + 1) as f64 * v).collect())
        };
        let r = minimize(f, &[1.0; 6], &LbfgsOptions::default());
        assert!(r.converged && r.f < 1e-12 && r.iterations < 30);
    }
}
