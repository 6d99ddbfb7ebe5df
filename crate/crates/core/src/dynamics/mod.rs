//! Numerical integration, equilibria, stability probing and phase-portrait
//! sweeps.

mod equilibria;
mod integrate;
mod numeric;
mod probe;
mod sweep;

pub use equilibria::{
    classify_equilibrium, find_equilibria, verify_exact, Equilibrium, EquilibriumReport, EquilibriumSearch,
};
pub use integrate::{integrate, rk4_fixed, IntegrateOptions, Termination, Trajectory};
pub use numeric::{point_f64, NumericField};
pub use probe::{sphere_samples, stability_probe, thread_cap, with_pool, ProbeOptions, StabilityVerdict, Verdict};
pub use sweep::{lattice, sweep_portrait, write_bundle, BundleEntry, BundleManifest};
