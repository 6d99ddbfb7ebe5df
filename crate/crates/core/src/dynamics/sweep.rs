use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Symbol;

use super::integrate::{integrate, IntegrateOptions, Termination, Trajectory};
use super::numeric::NumericField;
use super::probe::with_pool;

/// Regular lattice over `[x0, x1] × [y0, y1]` with `nx × ny` points, row-major in y.
pub fn lattice(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Vec<Vec<f64>> {
    let at = |lo: f64, hi: f64, n: usize, k: usize| {
        if n <= 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push(vec![at(x.0, x.1, nx, i), at(y.0, y.1, ny, j)]);
        }
    }
    out
}

/// One trajectory per initial condition, in input order.
pub fn sweep_portrait(
    f: &NumericField,
    starts: &[Vec<f64>],
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Vec<Trajectory>> {
    if f.dim() != 2 {
        return Err(Error::Dimension("phase portraits need a planar field".into()));
    }
    with_pool(|| {
        starts
            .par_iter()
            .map(|x0| integrate(f, x0, t_end, opts))
            .collect()
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleEntry {
    pub index: usize,
    pub file: String,
    pub initial: Vec<f64>,
    pub final_state: Vec<f64>,
    pub final_time: f64,
    pub termination: Termination,
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleManifest {
    pub variables: Vec<Symbol>,
    pub t_end: f64,
    pub trajectories: Vec<BundleEntry>,
    pub meta: serde_json::Value,
}

/// Writes `traj_<index>.csv` files with header `t,<vars>` plus `manifest.json`.
pub fn write_bundle(
    dir: &Path,
    variables: &[Symbol],
    trajectories: &[Trajectory],
    t_end: f64,
    meta: serde_json::Value,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(trajectories.len());
    for (i, tr) in trajectories.iter().enumerate() {
        let name = format!("traj_{i:04}.csv");
        let mut w = csv::Writer::from_path(dir.join(&name)).map_err(|e| Error::Format(e.to_string()))?;
        let mut header = vec!["t".to_string()];
        header.extend(variables.iter().map(|v| v.to_string()));
        w.write_record(&header).map_err(|e| Error::Format(e.to_string()))?;
        for (t, x) in tr.times.iter().zip(&tr.states) {
            let mut rec = vec![format!("{t:.12e}")];
            rec.extend(x.iter().map(|v| format!("{v:.12e}")));
            w.write_record(&rec).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
        entries.push(BundleEntry {
            index: i,
            file: name,
            initial: tr.states.first().cloned().unwrap_or_default(),
            final_state: tr.last().to_vec(),
            final_time: tr.final_time(),
            termination: tr.termination,
        });
    }
    let manifest = BundleManifest {
        variables: variables.to_vec(),
        t_end,
        trajectories: entries,
        meta,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsys::VectorField;
    use crate::poly::parse::{parse_polynomial, permissive_roles};

    #[test]
    fn zero_field_bundle() {
        let roles = permissive_roles(&["x", "y"]);
        let vf = VectorField::infer(
            vec!["x".into(), "y".into()],
            vec![parse_polynomial("0", &roles).unwrap(), parse_polynomial("0", &roles).unwrap()],
        )
        .unwrap();
        let f = NumericField::from_polynomial(&vf, &Default::default()).unwrap();
        let starts = lattice((-1.0, 1.0), (-1.0, 1.0), 3, 2);
        assert_eq!(starts.len(), 6);
        let trs = sweep_portrait(&f, &starts, 5.0, &IntegrateOptions::default()).unwrap();
        for (s, t) in starts.iter().zip(&trs) {
            assert_eq!(t.last(), s.as_slice());
        }
        let dir = tempfile::tempdir().unwrap();
        let m = write_bundle(dir.path(), &vf.variables, &trs, 5.0, serde_json::json!({"seed": 0})).unwrap();
        assert!(m.exists());
        let csv = std::fs::read_to_string(dir.path().join("traj_0000.csv")).unwrap();
        assert!(csv.starts_with("t,x,y\n"));
    }
}
