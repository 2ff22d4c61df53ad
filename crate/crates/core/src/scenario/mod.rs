//! Scenario files, random markets, and outcome metrics.

pub mod format;
pub mod generator;
pub mod metrics;

pub use format::{emit, parse, Expected, ScenarioError, ScenarioFile};
pub use generator::{generate, small_market, EndowmentPolicy, GeneratorConfig, InconsistentConfig, Population, QuotaPolicy};
pub use metrics::{compute_metrics, result_document, AgentMetrics, MetricsReport, MetricsRow, CSV_COLUMNS};

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 7] = [
    ("fig2a", include_str!("../../scenarios/fig2a.scenario")),
    ("fig2c", include_str!("../../scenarios/fig2c.scenario")),
    ("fig3a", include_str!("../../scenarios/fig3a.scenario")),
    ("fig4a", include_str!("../../scenarios/fig4a.scenario")),
    ("fig5a", include_str!("../../scenarios/fig5a.scenario")),
    ("fig6a", include_str!("../../scenarios/fig6a.scenario")),
    ("fig6c", include_str!("../../scenarios/fig6c.scenario")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
