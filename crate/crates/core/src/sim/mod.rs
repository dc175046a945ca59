//! Simulated world and the runtime loop that monitors, relaxes and repairs.

mod exec;
mod report;
mod scenario;
mod workspace;

pub use exec::{run_execution_loop, ExecConfig, ExecError, ExecutionReport, Terminal, TraceEntry, ViolationRecord};
pub use report::{format_events, format_json_events, format_trace, origin_label};
pub use scenario::{Effect, Event, Scenario, ScenarioError, Trigger};
pub use workspace::{prop_name, Rect, Region, WorldError, WorldState, Workspace};
