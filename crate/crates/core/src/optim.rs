//! Derivative-free simplex search (Nelder–Mead).
//!
//! Used by the angular enclosing-ball refinement, the witness-point search and
//! the map-family optimizer. The objective is only ever evaluated, never
//! differentiated, so piecewise-smooth and piecewise-constant objectives are
//! fine (the search just stalls on plateaus rather than failing).

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop once the spread of simplex values and the simplex diameter both
    /// fall below these.
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.1,
            max_evals: 2000,
            f_tol: 1e-12,
            x_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// `(evaluation index, incumbent value)` recorded at each improvement.
    pub trace: Vec<(usize, f64)>,
}

struct Counter<F> {
    f: F,
    evals: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.evals += 1;
        if v < self.best {
            self.best = v;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
            self.trace.push((self.evals, v));
        }
        v
    }
}

impl NelderMead {
    pub fn with_budget(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.initial_step = step;
        self
    }

    pub fn minimize<F>(&self, f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let dim = x0.len();
        let mut c = Counter {
            f,
            evals: 0,
            best: f64::INFINITY,
            best_x: x0.to_vec(),
            trace: Vec::new(),
        };
        if dim == 0 {
            let value = c.eval(x0);
            return Minimum {
                x: x0.to_vec(),
                value,
                evals: c.evals,
                trace: c.trace,
            };
        }

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let v0 = c.eval(x0);
        simplex.push((x0.to_vec(), v0));
        for i in 0..dim {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = c.eval(&x);
            simplex.push((x, v));
        }

        let mut centroid = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        while c.evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[dim].1);
            let spread = worst - best;
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| linf(x, &simplex[0].0))
                .fold(0.0, f64::max);
            if (spread.is_finite() && spread <= self.f_tol) && size <= self.x_tol {
                break;
            }
            if size == 0.0 {
                break;
            }

            centroid.iter_mut().for_each(|v| *v = 0.0);
            for (x, _) in &simplex[..dim] {
                for (ci, xi) in centroid.iter_mut().zip(x) {
                    *ci += xi / dim as f64;
                }
            }
            let worst_x = simplex[dim].0.clone();
            along(&centroid, &worst_x, -self.reflection, &mut trial);
            let fr = c.eval(&trial);

            if fr < best {
                let reflected = trial.clone();
                along(&centroid, &worst_x, -self.reflection * self.expansion, &mut trial);
                let fe = c.eval(&trial);
                simplex[dim] = if fe < fr { (trial.clone(), fe) } else { (reflected, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (trial.clone(), fr);
            } else {
                let outside = fr < simplex[dim].1;
                let t = if outside {
                    -self.reflection * self.contraction
                } else {
                    self.contraction
                };
                along(&centroid, &worst_x, t, &mut trial);
                let fc = c.eval(&trial);
                let accept = if outside { fc <= fr } else { fc < simplex[dim].1 };
                if accept {
                    simplex[dim] = (trial.clone(), fc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        for (xi, bi) in entry.0.iter_mut().zip(&x_best) {
                            *xi = bi + self.shrink * (*xi - bi);
                        }
                        entry.1 = c.eval(&entry.0);
                        if c.evals >= self.max_evals {
                            break;
                        }
                    }
                }
            }
        }

        Minimum {
            x: c.best_x,
            value: c.best,
            evals: c.evals,
            trace: c.trace,
        }
    }
}

// out = centroid + t * (point - centroid)
fn along(centroid: &[f64], point: &[f64], t: f64, out: &mut [f64]) {
    for ((o, c), p) in out.iter_mut().zip(centroid).zip(point) {
        *o = c + t * (p - c);
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead::default().with_budget(5000).with_step(0.5);
        let m = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
        );
        assert!(m.value < 1e-8, "{m:?}");
        assert!((m.x[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn one_dimensional_abs() {
        let m = NelderMead::default().minimize(|x| (x[0] - 3.0).abs(), &[0.0]);
        assert!((m.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn trace_is_monotone_and_budget_respected() {
        let nm = NelderMead::default().with_budget(50);
        let m = nm.minimize(|x| x.iter().map(|v| v * v).sum(), &[1.0, 2.0, 3.0]);
        assert!(m.evals <= 50 + 3);
        assert!(m.trace.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn nan_objective_is_treated_as_infinite() {
        let m = NelderMead::default().minimize(|x| if x[0] > 0.5 { f64::NAN } else { (x[0] + 1.0).powi(2) }, &[0.0]);
        assert!(m.value.is_finite());
        assert!((m.x[0] + 1.0).abs() < 1e-5);
    }
}
