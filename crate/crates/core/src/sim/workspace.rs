use std::collections::BTreeMap;

use thiserror::Error;

use crate::props::{InputState, PropositionTable};
use crate::spec::Skill;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("workspace line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("object `{object}` at ({x}, {y}) is outside all of its regions")]
    OutsideRegions { object: String, x: f64, y: f64 },
    #[error("input `{0}` has no grounding in the workspace")]
    Ungrounded(String),
    #[error("grounded proposition `{0}` is not a declared input")]
    UnknownProposition(String),
    #[error("no object named `{0}`")]
    UnknownObject(String),
    #[error("object `{object}` has no region `{region}`")]
    UnknownRegion { object: String, region: String },
    #[error("no flag named `{0}`")]
    UnknownFlag(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    /// Half-open on the upper edges so adjacent regions never overlap.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub name: String,
    /// Objects this region grounds a proposition for.
    pub objects: Vec<String>,
    pub rect: Rect,
}

/// Rectangular regions, object start poses and user flags. The proposition
/// for object `o` in region `r` is named `o_r`; a flag is its own
/// proposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Workspace {
    pub regions: Vec<Region>,
    pub objects: Vec<String>,
    initial_poses: BTreeMap<String, (f64, f64)>,
    initial_flags: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub poses: BTreeMap<String, (f64, f64)>,
    pub flags: BTreeMap<String, bool>,
}

pub fn prop_name(object: &str, region: &str) -> String {
    format!("{object}_{region}")
}

fn parse_err(line: usize, message: impl Into<String>) -> WorldError {
    WorldError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64, WorldError> {
    s.parse().map_err(|_| parse_err(line, format!("`{s}` is not a number")))
}

impl Workspace {
    /// Lines: `region r : group a,b : rect x0 y0 x1 y1`,
    /// `object o : pose x y`, `flag f = true|false`.
    pub fn parse(text: &str) -> Result<Self, WorldError> {
        let mut ws = Workspace {
            regions: Vec::new(),
            objects: Vec::new(),
            initial_poses: BTreeMap::new(),
            initial_flags: BTreeMap::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (kind, rest) = content.split_once(char::is_whitespace).ok_or_else(|| parse_err(line, "incomplete line"))?;
            match kind {
                "region" => {
                    let parts: Vec<&str> = rest.split(':').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(parse_err(line, "expected `region r : group a,b : rect x0 y0 x1 y1`"));
                    }
                    let objects = parts[1]
                        .strip_prefix("group")
                        .ok_or_else(|| parse_err(line, "expected `group`"))?
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect::<Vec<_>>();
                    let nums: Vec<f64> = parts[2]
                        .strip_prefix("rect")
                        .ok_or_else(|| parse_err(line, "expected `rect`"))?
                        .split_whitespace()
                        .map(|s| parse_f64(s, line))
                        .collect::<Result<_, _>>()?;
                    if nums.len() != 4 || nums[0] >= nums[2] || nums[1] >= nums[3] {
                        return Err(parse_err(line, "rect needs x0 y0 x1 y1 with x0 < x1 and y0 < y1"));
                    }
                    ws.regions.push(Region {
                        name: parts[0].to_string(),
                        objects,
                        rect: Rect {
                            x0: nums[0],
                            y0: nums[1],
                            x1: nums[2],
                            y1: nums[3],
                        },
                    });
                }
                "object" => {
                    let (name, pose) = rest.split_once(':').ok_or_else(|| parse_err(line, "expected `object o : pose x y`"))?;
                    let nums: Vec<f64> = pose
                        .trim()
                        .strip_prefix("pose")
                        .ok_or_else(|| parse_err(line, "expected `pose`"))?
                        .split_whitespace()
                        .map(|s| parse_f64(s, line))
                        .collect::<Result<_, _>>()?;
                    if nums.len() != 2 {
                        return Err(parse_err(line, "pose needs x y"));
                    }
                    let name = name.trim().to_string();
                    ws.objects.push(name.clone());
                    ws.initial_poses.insert(name, (nums[0], nums[1]));
                }
                "flag" => {
                    let (name, value) = rest.split_once('=').ok_or_else(|| parse_err(line, "expected `flag f = true|false`"))?;
                    let value = match value.trim() {
                        "true" => true,
                        "false" => false,
                        other => return Err(parse_err(line, format!("`{other}` is not true or false"))),
                    };
                    ws.initial_flags.insert(name.trim().to_string(), value);
                }
                other => return Err(parse_err(line, format!("unknown entry `{other}`"))),
            }
        }
        for r in &ws.regions {
            for o in &r.objects {
                if !ws.objects.contains(o) {
                    return Err(WorldError::UnknownObject(o.clone()));
                }
            }
        }
        Ok(ws)
    }

    pub fn initial_state(&self) -> WorldState {
        WorldState {
            poses: self.initial_poses.clone(),
            flags: self.initial_flags.clone(),
        }
    }

    pub fn regions_of<'a>(&'a self, object: &'a str) -> impl Iterator<Item = &'a Region> + 'a {
        self.regions.iter().filter(move |r| r.objects.iter().any(|o| o == object))
    }

    pub fn region(&self, object: &str, region: &str) -> Result<&Region, WorldError> {
        self.regions
            .iter()
            .find(|r| r.name == region && r.objects.iter().any(|o| o == object))
            .ok_or_else(|| WorldError::UnknownRegion {
                object: object.to_string(),
                region: region.to_string(),
            })
    }

    /// Checks that grounded propositions and spec inputs match one to one.
    pub fn check_grounding(&self, props: &PropositionTable) -> Result<(), WorldError> {
        let mut grounded: Vec<String> = Vec::new();
        for o in &self.objects {
            for r in self.regions_of(o) {
                grounded.push(prop_name(o, &r.name));
            }
        }
        grounded.extend(self.initial_flags.keys().cloned());
        for g in &grounded {
            if props.input_index(g).is_none() {
                return Err(WorldError::UnknownProposition(g.clone()));
            }
        }
        for p in props.inputs() {
            if !grounded.contains(&p.name) {
                return Err(WorldError::Ungrounded(p.name.clone()));
            }
        }
        Ok(())
    }

    /// Abstract input state of a world state: each object's containing
    /// region plus the flags that are set.
    pub fn inverse_grounding(&self, props: &PropositionTable, s: &WorldState) -> Result<InputState, WorldError> {
        let mut x = InputState::EMPTY;
        for o in &self.objects {
            let (px, py) = s.poses[o];
            let region = self
                .regions_of(o)
                .find(|r| r.rect.contains(px, py))
                .ok_or_else(|| WorldError::OutsideRegions {
                    object: o.clone(),
                    x: px,
                    y: py,
                })?;
            let name = prop_name(o, &region.name);
            let i = props
                .input_index(&name)
                .ok_or(WorldError::UnknownProposition(name))?;
            x = x.with(i);
        }
        for (flag, &value) in &s.flags {
            let i = props
                .input_index(flag)
                .ok_or_else(|| WorldError::UnknownProposition(flag.clone()))?;
            x = x.set(i, value);
        }
        Ok(x)
    }

    pub fn teleport(&self, s: &mut WorldState, object: &str, region: &str) -> Result<(), WorldError> {
        let center = self.region(object, region)?.rect.center();
        *s.poses
            .get_mut(object)
            .ok_or_else(|| WorldError::UnknownObject(object.to_string()))? = center;
        Ok(())
    }

    pub fn set_flag(&self, s: &mut WorldState, flag: &str, value: bool) -> Result<(), WorldError> {
        *s.flags
            .get_mut(flag)
            .ok_or_else(|| WorldError::UnknownFlag(flag.to_string()))? = value;
        Ok(())
    }

    /// The grounding of an input proposition: `(object, region)` or a flag.
    fn locate(&self, name: &str) -> Option<Grounding<'_>> {
        for o in &self.objects {
            for r in self.regions_of(o) {
                if prop_name(o, &r.name) == name {
                    return Some(Grounding::Place(o, &r.name));
                }
            }
        }
        self.initial_flags
            .contains_key(name)
            .then_some(Grounding::Flag)
    }

    /// Advances `skill` by one waypoint from chain position `progress`:
    /// objects jump to the next state's region centers and flags follow it.
    /// Returns whether the final postcondition was reached.
    pub fn apply_skill_tick(
        &self,
        props: &PropositionTable,
        skill: &Skill,
        progress: usize,
        world: &mut WorldState,
    ) -> Result<bool, WorldError> {
        let next = skill.chain[progress + 1];
        let scope = skill.scope(props);
        for i in scope.mask.iter() {
            let name = &props.inputs()[i].name;
            match self.locate(name) {
                Some(Grounding::Place(o, r)) => {
                    if next.contains(i) {
                        self.teleport(world, o, r)?;
                    }
                }
                Some(Grounding::Flag) => self.set_flag(world, name, next.contains(i))?,
                None => return Err(WorldError::Ungrounded(name.clone())),
            }
        }
        Ok(progress + 1 == skill.chain.len() - 1)
    }
}

enum Grounding<'a> {
    Place(&'a str, &'a str),
    Flag,
}
