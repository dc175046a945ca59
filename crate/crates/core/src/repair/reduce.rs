use crate::spec::GR1Spec;
use crate::synthesis::is_realizable;

use super::{add_skills, RepairError, SkillSuggestion};

/// Drops suggestions that are not needed, trying each once in insertion
/// order against the ones still kept: exactly one synthesis per suggestion.
/// The result is minimal (no kept skill can go) but not necessarily minimum.
/// Assumes `spec` plus all of `suggested` is realizable.
pub fn reduce_skills(
    spec: &GR1Spec,
    suggested: &[SkillSuggestion],
    state_cap: usize,
) -> Result<Vec<SkillSuggestion>, RepairError> {
    let mut kept: Vec<SkillSuggestion> = suggested.to_vec();
    for s in suggested {
        let without: Vec<SkillSuggestion> = kept.iter().filter(|k| k.name() != s.name()).cloned().collect();
        if is_realizable(&add_skills(spec, &without)?, state_cap)? {
            kept = without;
        }
    }
    Ok(kept)
}
