use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

use super::integrate::{integrate, IntegrateOptions, Termination};
use super::numeric::NumericField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub radius: f64,
    pub samples: usize,
    pub t_end: f64,
    pub capture: f64,
    pub escape_factor: f64,
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            radius: 0.05,
            samples: 64,
            t_end: 500.0,
            capture: 1e-4,
            escape_factor: 10.0,
            seed: 0,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub sampled: usize,
    pub converged: usize,
    pub escaped: usize,
    pub escape_examples: Vec<Vec<f64>>,
    /// Largest final distance from the equilibrium among non-escaping runs.
    pub max_final_distance: f64,
    pub radius: f64,
    pub capture_distance: f64,
    pub escape_distance: f64,
    pub t_end: f64,
    pub seed: u64,
}

/// Seeded initial conditions uniform on the sphere of `radius` about `center`.
pub fn sphere_samples(center: &[f64], radius: f64, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let mut v: Vec<f64> = (0..center.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            for (x, c) in v.iter_mut().zip(center) {
                *x = c + radius * *x / n;
            }
            v
        })
        .collect()
}

/// Worker count from `NETBLOW_THREADS`, if set.
pub fn thread_cap() -> Option<usize> {
    std::env::var("NETBLOW_THREADS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Runs `job` on the rayon pool, capped by `NETBLOW_THREADS`.
pub fn with_pool<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(job),
        None => job(),
    }
}

/// Integrates from random points on a small sphere about `x_star`.
/// Stable iff every run ends within `capture·radius` without leaving the
/// `escape_factor·radius` ball; unstable iff any run leaves it.
pub fn stability_probe(f: &NumericField, x_star: &[f64], opts: &ProbeOptions) -> Result<StabilityVerdict> {
    let starts = sphere_samples(x_star, opts.radius, opts.samples, opts.seed);
    let escape = opts.escape_factor * opts.radius;
    let iopts = IntegrateOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        record: false,
        watch: Some((x_star.to_vec(), escape)),
        ..IntegrateOptions::default()
    };
    let runs = with_pool(|| {
        starts
            .par_iter()
            .map(|x0| integrate(f, x0, opts.t_end, &iopts))
            .collect::<Result<Vec<_>>>()
    })?;
    let capture = opts.capture * opts.radius;
    let mut converged = 0;
    let mut escaped = 0;
    let mut examples = Vec::new();
    let mut max_final: f64 = 0.0;
    for (x0, tr) in starts.iter().zip(&runs) {
        let d = tr
            .last()
            .iter()
            .zip(x_star)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let left = tr.termination == Termination::Diverged || tr.max_excursion > escape;
        if left {
            escaped += 1;
            if examples.len() < 3 {
                examples.push(x0.clone());
            }
        } else {
            max_final = max_final.max(d);
            if d <= capture {
                converged += 1;
            }
        }
    }
    let verdict = if escaped > 0 {
        Verdict::Unstable
    } else if converged == opts.samples {
        Verdict::Stable
    } else {
        Verdict::Inconclusive
    };
    Ok(StabilityVerdict {
        verdict,
        sampled: opts.samples,
        converged,
        escaped,
        escape_examples: examples,
        max_final_distance: max_final,
        radius: opts.radius,
        capture_distance: capture,
        escape_distance: escape,
        t_end: opts.t_end,
        seed: opts.seed,
    })
}
