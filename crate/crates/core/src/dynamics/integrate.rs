use serde::Serialize;

use crate::error::{Error, Result};

use super::numeric::NumericField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedT,
    Converged,
    Diverged,
    StepUnderflow,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
    /// Largest distance from the watch center seen along the way.
    pub max_excursion: f64,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
    /// `‖x‖` above which the run stops as diverged.
    pub divergence_norm: f64,
    pub converge_steps: usize,
    /// Keep every accepted step (otherwise only the endpoints).
    pub record: bool,
    /// Stop as diverged once `‖x − center‖ > radius`.
    pub watch: Option<(Vec<f64>, f64)>,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            initial_step: None,
            divergence_norm: 1e6,
            converge_steps: 100,
            record: true,
            watch: None,
            max_steps: 50_000_000,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn check_finite(v: &[f64], t: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("field evaluation at t = {t}")))
    }
}

/// Adaptive Dormand–Prince integration of `x' = F(x)` on `[0, t_end]`.
pub fn integrate(f: &NumericField, x0: &[f64], t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::Dimension(format!("x0 has {} entries, field has {n}", x0.len())));
    }
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    f.eval_into(&x, &mut k[0]);
    check_finite(&k[0], t)?;

    let mut h = opts.initial_step.unwrap_or_else(|| {
        let d0 = norm(&x).max(1e-5);
        let d1 = norm(&k[0]).max(1e-5);
        (0.01 * d0 / d1).min(t_end.max(1e-12)).min(opts.max_step)
    });
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut quiet = 0usize;
    let mut max_exc = opts.watch.as_ref().map(|(c, _)| dist(&x, c)).unwrap_or(0.0);
    let mut stage = vec![0.0; n];
    let mut x5 = vec![0.0; n];
    let mut steps = 0usize;

    let termination = loop {
        if t >= t_end {
            break Termination::ReachedT;
        }
        if steps >= opts.max_steps {
            break Termination::StepUnderflow;
        }
        h = h.min(t_end - t).min(opts.max_step);
        if h < 1e-14 * t.abs().max(1.0) {
            break Termination::StepUnderflow;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = x[i] + h * acc;
            }
            let (_, tail) = k.split_at_mut(s);
            f.eval_into(&stage, &mut tail[0]);
            check_finite(&tail[0], t + C[s] * h)?;
        }
        let mut err = 0.0;
        for i in 0..n {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for j in 0..7 {
                s5 += B5[j] * k[j][i];
                s4 += B4[j] * k[j][i];
            }
            x5[i] = x[i] + h * s5;
            let sc = opts.abs_tol + opts.rel_tol * x[i].abs().max(x5[i].abs());
            let e = h * (s5 - s4) / sc;
            err += e * e;
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            continue;
        }
        if err <= 1.0 {
            steps += 1;
            t += h;
            let disp = dist(&x, &x5);
            std::mem::swap(&mut x, &mut x5);
            // FSAL: the last stage is F at the new point
            k.swap(0, 6);
            if opts.record {
                times.push(t);
                states.push(x.clone());
            }
            if norm(&x) > opts.divergence_norm {
                break Termination::Diverged;
            }
            if let Some((c, rad)) = &opts.watch {
                let d = dist(&x, c);
                max_exc = max_exc.max(d);
                if d > *rad {
                    break Termination::Diverged;
                }
            }
            if norm(&k[0]) < opts.abs_tol && disp < opts.abs_tol {
                quiet += 1;
                if quiet >= opts.converge_steps {
                    break Termination::Converged;
                }
            } else {
                quiet = 0;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    };
    if times.last() != Some(&t) {
        times.push(t);
        states.push(x);
    }
    Ok(Trajectory {
        times,
        states,
        termination,
        max_excursion: max_exc,
    })
}

/// Classical fixed-step RK4, mainly as a convergence-order reference.
pub fn rk4_fixed(f: &NumericField, x0: &[f64], t_end: f64, h: f64) -> Result<Trajectory> {
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::Dimension("x0 dimension".into()));
    }
    if h <= 0.0 {
        return Err(Error::Input("step must be positive".into()));
    }
    let steps = (t_end / h).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let mut x = x0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for s in 1..=steps {
        f.eval_into(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        f.eval_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        f.eval_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        f.eval_into(&tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_finite(&x, s as f64 * h)?;
        times.push(s as f64 * h);
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        termination: Termination::ReachedT,
        max_excursion: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsys::VectorField;
    use crate::poly::parse::{parse_polynomial, permissive_roles};

    fn field(rows: &[&str], vars: &[&str]) -> NumericField {
        let roles = permissive_roles(vars);
        let vf = VectorField::infer(
            vars.iter().map(|v| crate::poly::Symbol::new(v)).collect(),
            rows.iter().map(|r| parse_polynomial(r, &roles).unwrap()).collect(),
        )
        .unwrap();
        NumericField::from_polynomial(&vf, &Default::default()).unwrap()
    }

    #[test]
    fn exponential_decay() {
        let f = field(&["-x"], &["x"]);
        let tr = integrate(&f, &[1.0], 1.0, &IntegrateOptions::default()).unwrap();
        assert_eq!(tr.termination, Termination::ReachedT);
        assert!((tr.last()[0] - (-1f64).exp()).abs() < 1e-7);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn harmonic_oscillator_returns() {
        let f = field(&["-y", "x"], &["x", "y"]);
        let tr = integrate(&f, &[1.0, 0.0], 2.0 * std::f64::consts::PI, &IntegrateOptions::default()).unwrap();
        let e = tr.last();
        assert!((e[0] - 1.0).abs() < 1e-6 && e[1].abs() < 1e-6);
        assert!(((e[0] * e[0] + e[1] * e[1]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let f = field(&["-x"], &["x"]);
        let exact = (-1f64).exp();
        let e1 = (rk4_fixed(&f, &[1.0], 1.0, 0.1).unwrap().last()[0] - exact).abs();
        let e2 = (rk4_fixed(&f, &[1.0], 1.0, 0.05).unwrap().last()[0] - exact).abs();
        assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn blow_up_is_reported() {
        let f = field(&["x^2"], &["x"]);
        let tr = integrate(&f, &[1.0], 2.0, &IntegrateOptions::default()).unwrap();
        assert!(matches!(tr.termination, Termination::Diverged | Termination::StepUnderflow));
    }

    #[test]
    fn zero_field_converges() {
        let f = field(&["0*x"], &["x"]);
        let tr = integrate(&f, &[0.3], 1e100, &IntegrateOptions::default()).unwrap();
        assert_eq!(tr.termination, Termination::Converged);
        assert_eq!(tr.last(), &[0.3]);
    }
}
