use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::SloSpec;
use crate::error::{invalid, Result};
use crate::sim::EnvState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    StreamChange(u32),
    Blur(f64),
    SloChange(SloSpec),
    Congestion(f64),
}

/// A change to the environment or SLO set taking effect at the start of `at_round`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEvent {
    pub at_round: u32,
    pub kind: EventKind,
}

impl ScenarioEvent {
    pub fn new(at_round: u32, kind: EventKind) -> Self {
        ScenarioEvent { at_round, kind }
    }
}

/// Applies an environment event. SLO changes leave the environment as is;
/// the caller routes them to the agent.
pub fn apply_event(env: &EnvState, event: &ScenarioEvent) -> EnvState {
    let mut next = env.clone();
    match &event.kind {
        EventKind::StreamChange(n) => next.streams = *n,
        EventKind::Blur(px) => next.blur = *px,
        EventKind::Congestion(level) => next.congestion = *level,
        EventKind::SloChange(_) => {}
    }
    next
}

pub fn load_events(path: impl AsRef<Path>) -> Result<Vec<ScenarioEvent>> {
    let events: Vec<ScenarioEvent> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if events.iter().any(|e| e.at_round == 0) {
        return Err(invalid("events must have at_round >= 1"));
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_and_blur_events() {
        let env = EnvState::default();
        let e = apply_event(&env, &ScenarioEvent::new(5, EventKind::StreamChange(6)));
        assert_eq!(e.streams, 6);
        assert_eq!(
            apply_event(&env, &ScenarioEvent::new(2, EventKind::Congestion(0.0))),
            env
        );
        assert_eq!(
            apply_event(&env, &ScenarioEvent::new(2, EventKind::Blur(5.0))).blur,
            5.0
        );
    }

    #[test]
    fn json_form() {
        let e = ScenarioEvent::new(5, EventKind::StreamChange(6));
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"at_round":5,"kind":{"stream_change":6}}"#);
    }
}
