//! Explicit-state GR(1) game construction, fixpoint solving and strategy
//! extraction.

mod game;
mod solve;
mod strategy;

use thiserror::Error;

pub use game::{
    build_game, build_game_with, BuildMode, EnvMove, GameConfig, GameState, GameStructure,
    DEFAULT_STATE_CAP,
};
pub use solve::{goal_fixpoint, solve_gr1, winning_set, GoalLayers, Solution};
pub use strategy::{extract_strategy, Strategy, StrategyNode};

use crate::spec::GR1Spec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("game exceeds the state cap of {0} states")]
    StateCap(usize),
    #[error("specification is unrealizable")]
    Unrealizable,
    #[error("internal error: {0}")]
    Internal(&'static str),
}

/// Outcome of building and solving one spec.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub game: GameStructure,
    pub solution: Solution,
    pub strategy: Option<Strategy>,
}

impl Synthesis {
    pub fn realizable(&self) -> bool {
        self.solution.realizable
    }
}

pub fn synthesize(spec: &GR1Spec, state_cap: usize) -> Result<Synthesis, SynthesisError> {
    let game = build_game_with(
        spec,
        GameConfig {
            mode: BuildMode::Reachable,
            state_cap,
        },
    )?;
    let solution = solve_gr1(&game);
    let strategy = if solution.realizable {
        Some(extract_strategy(&game, &solution)?)
    } else {
        None
    };
    Ok(Synthesis {
        game,
        solution,
        strategy,
    })
}

/// Realizability only, without extracting a strategy.
pub fn is_realizable(spec: &GR1Spec, state_cap: usize) -> Result<bool, SynthesisError> {
    let game = build_game_with(
        spec,
        GameConfig {
            mode: BuildMode::Reachable,
            state_cap,
        },
    )?;
    Ok(solve::realizable(&game, &winning_set(&game)))
}
