//! Directional and polar blow-up charts, desingularization, restriction and
//! verification.

mod chart;
mod directional;
mod polar;
mod structure;

pub use chart::{parse_weights, BlowupChart, ChartKind};
pub use directional::{
    blowup, common_factor_divide, common_factor_divide_chart, desingularize, directional_blowup, divide,
    lift_weighted, restrict, verify_conjugacy, ChartField, ConjugacyReport, OrientationNote,
};
pub use polar::{circle_equilibria, polar_blowup_2d, CircleClass, CircleEquilibrium, TrigField};
pub use structure::{structure_report, CoefficientCheck, StructureReport};
