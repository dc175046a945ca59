use fixedbitset::FixedBitSet;

use super::game::GameStructure;

/// Layers of the middle and inner fixpoints for one system goal, computed
/// against the final winning set: `x[r][i]` is the inner set built at the
/// `r`-th middle iteration for environment assumption `i`.
#[derive(Clone, Debug)]
pub struct GoalLayers {
    pub x: Vec<Vec<FixedBitSet>>,
    /// Least `(r, i)` with the state in `x[r][i]`.
    pub rank: Vec<Option<(u32, u32)>>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub realizable: bool,
    pub winning: FixedBitSet,
    pub layers: Vec<GoalLayers>,
}

fn inner(game: &GameStructure, start: &FixedBitSet, not_je: &FixedBitSet) -> FixedBitSet {
    let mut x = game.full_set();
    loop {
        let mut next = game.cpre(&x);
        next.intersect_with(not_je);
        next.union_with(start);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// `mu Y. union_i nu X. (J & cpre(Z)) | cpre(Y) | (!Je_i & cpre(X))`, keeping
/// every inner set.
pub fn goal_fixpoint(game: &GameStructure, z: &FixedBitSet, goal: &FixedBitSet) -> (FixedBitSet, Vec<Vec<FixedBitSet>>) {
    let mut reach_goal = game.cpre(z);
    reach_goal.intersect_with(goal);
    let not_je: Vec<FixedBitSet> = game
        .env_liveness_sets
        .iter()
        .map(|je| {
            let mut s = je.clone();
            s.toggle_range(..);
            s
        })
        .collect();
    let mut y = game.empty_set();
    let mut layers = Vec::new();
    loop {
        let mut start = game.cpre(&y);
        start.union_with(&reach_goal);
        let xs: Vec<FixedBitSet> = not_je.iter().map(|n| inner(game, &start, n)).collect();
        let mut next = game.empty_set();
        for x in &xs {
            next.union_with(x);
        }
        layers.push(xs);
        if next == y {
            layers.pop();
            return (y, layers);
        }
        y = next;
    }
}

pub fn winning_set(game: &GameStructure) -> FixedBitSet {
    let mut z = game.full_set();
    loop {
        let mut next = z.clone();
        for goal in &game.sys_liveness_sets {
            let (y, _) = goal_fixpoint(game, &z, goal);
            next.intersect_with(&y);
        }
        if next == z {
            return z;
        }
        z = next;
    }
}

pub fn solve_gr1(game: &GameStructure) -> Solution {
    let winning = winning_set(game);
    let layers = game
        .sys_liveness_sets
        .iter()
        .map(|goal| {
            let (_, x) = goal_fixpoint(game, &winning, goal);
            let mut rank = vec![None; game.len()];
            for (r, row) in x.iter().enumerate() {
                for (i, set) in row.iter().enumerate() {
                    for s in set.ones() {
                        if rank[s].is_none() {
                            rank[s] = Some((r as u32, i as u32));
                        }
                    }
                }
            }
            GoalLayers { x, rank }
        })
        .collect();
    let realizable = realizable(game, &winning);
    Solution {
        realizable,
        winning,
        layers,
    }
}

/// Every environment-chosen initial input admits a winning system start.
pub fn realizable(game: &GameStructure, winning: &FixedBitSet) -> bool {
    game.initial
        .iter()
        .all(|(_, starts)| starts.iter().any(|&s| winning.contains(s)))
}
