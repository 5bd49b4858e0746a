//! File handling, configuration and build-plan generation around
//! `objcbridge-core`.

pub mod build_plan;
pub mod config;
pub mod pipeline;
pub mod support;

pub use build_plan::{environment_fragment, forward_plan, reverse_plan, BuildPlan};
pub use config::{ConfigError, ToolConfig};
pub use pipeline::{commit, Direction, Invocation, Outcome, ToolError};
