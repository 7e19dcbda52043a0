//! Translator ODEs: integration, asymptotes and chart checks.

pub mod asymptote;
pub mod charts;
pub mod integrator;
pub mod translators;

pub use asymptote::{estimate_asymptote, estimate_branch_asymptote, Asymptote};
pub use charts::{chart_residual_horizontal, chart_residual_vertical, HorizontalChartCheck};
pub use translators::{
    catenoid_family_table, family_s_max, integrate_catenoid, integrate_grim_reaper, profile_ode_rhs, CatenoidProfile,
    FamilyRow, GraphSample, GrimReaperProfile, IntegratorControls,
};
