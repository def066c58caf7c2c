//! Replayable move words.
//!
//! A word records a move sequence from a base track: each step names its
//! site in the track it acts on, so replay is deterministic and two words
//! can be compared move for move.  Steps at sites that do not interact
//! commute; the normal form orders each word so the least available site
//! always acts first, which makes commutation-equivalent words identical.

use std::collections::BTreeMap;

use crate::moves::{self, Move, MoveData, SplitDir};
use crate::track::{BranchId, TrainTrack};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Shift(BranchId),
    Split(BranchId, SplitDir),
    Collision(BranchId),
}

impl Step {
    pub fn site(self) -> BranchId {
        match self {
            Step::Shift(b) | Step::Split(b, _) | Step::Collision(b) => b,
        }
    }

    pub fn is_split(self) -> bool {
        matches!(self, Step::Split(..))
    }

    pub fn of_move(m: &Move) -> Step {
        match &m.data {
            MoveData::Shift(f) => Step::Shift(f.b),
            MoveData::Split(f, dir) => Step::Split(f.e, *dir),
            MoveData::Collision(f) => Step::Collision(f.e),
        }
    }

    pub fn apply(self, track: &TrainTrack) -> Result<(TrainTrack, Move)> {
        match self {
            Step::Shift(b) => moves::shift(track, b),
            Step::Split(b, dir) => moves::split(track, b, dir),
            Step::Collision(b) => moves::collision(track, b),
        }
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Step::Shift(b) => write!(f, "shift b{b}"),
            Step::Split(b, SplitDir::Right) => write!(f, "split R e{b}"),
            Step::Split(b, SplitDir::Left) => write!(f, "split L e{b}"),
            Step::Collision(b) => write!(f, "collision e{b}"),
        }
    }
}

impl std::str::FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Step, String> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        // Large-branch sites print as e17, shift sites as b3; either
        // prefix is accepted on the way in.
        let site = |t: &str| -> std::result::Result<BranchId, String> {
            t.strip_prefix('b')
                .or_else(|| t.strip_prefix('e'))
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("bad branch id {t:?}"))
        };
        match tokens.as_slice() {
            ["shift", b] => Ok(Step::Shift(site(b)?)),
            ["split", "R", b] => Ok(Step::Split(site(b)?, SplitDir::Right)),
            ["split", "L", b] => Ok(Step::Split(site(b)?, SplitDir::Left)),
            ["collision", b] => Ok(Step::Collision(site(b)?)),
            _ => Err(format!("unrecognized move {s:?}")),
        }
    }
}

/// A validated move word: base track, steps, end track, and the composed
/// branch correspondence from base to end.
#[derive(Debug, Clone)]
pub struct MoveWord {
    pub base: TrainTrack,
    pub steps: Vec<Step>,
    pub end: TrainTrack,
    pub branch_map: BTreeMap<BranchId, BranchId>,
}

impl MoveWord {
    pub fn empty(base: &TrainTrack) -> MoveWord {
        MoveWord {
            base: base.clone(),
            steps: Vec::new(),
            end: base.clone(),
            branch_map: base.branch_ids().map(|b| (b, b)).collect(),
        }
    }

    /// Replay the steps from the base, validating each one.
    pub fn replay(base: &TrainTrack, steps: &[Step]) -> Result<MoveWord> {
        let mut word = MoveWord::empty(base);
        for &s in steps {
            word.push(s)?;
        }
        Ok(word)
    }

    pub fn push(&mut self, step: Step) -> Result<Move> {
        let (next, mv) = step.apply(&self.end)?;
        self.branch_map = moves::compose_branch_maps(&self.branch_map, &mv.branch_map);
        self.steps.push(step);
        self.end = next;
        Ok(mv)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_split_word(&self) -> bool {
        self.steps.iter().all(|s| s.is_split())
    }

    /// Number of steps whose site, read in the base track's labels through
    /// the running correspondence, is the given branch.  Steps name sites in
    /// the track they act on; this projects them back to the base.
    pub fn base_sites(&self) -> Result<Vec<BranchId>> {
        let mut word = MoveWord::empty(&self.base);
        let mut out = Vec::new();
        for &s in &self.steps {
            let inverse: BTreeMap<BranchId, BranchId> =
                word.branch_map.iter().map(|(&x, &y)| (y, x)).collect();
            let at = inverse.get(&s.site()).copied().ok_or_else(|| {
                Error::InvalidMove(format!(
                    "site b{} is not a transported base branch",
                    s.site()
                ))
            })?;
            out.push(at);
            word.push(s)?;
        }
        Ok(out)
    }
}

/// Build a word from already-applied moves.
pub fn record(base: &TrainTrack, moves: &[Move]) -> Result<MoveWord> {
    let steps: Vec<Step> = moves.iter().map(Step::of_move).collect();
    MoveWord::replay(base, &steps)
}

/// Whether the two adjacent steps can act in either order with the same
/// outcome: both orders valid, equal end tracks, equal correspondences.
fn steps_commute(track: &TrainTrack, first: Step, second: Step) -> bool {
    let one = (|| -> Result<(TrainTrack, BTreeMap<BranchId, BranchId>)> {
        let (t1, m1) = first.apply(track)?;
        let (t2, m2) = second.apply(&t1)?;
        Ok((t2, moves::compose_branch_maps(&m1.branch_map, &m2.branch_map)))
    })();
    let other = (|| -> Result<(TrainTrack, BTreeMap<BranchId, BranchId>)> {
        let (t1, m1) = second.apply(track)?;
        let (t2, m2) = first.apply(&t1)?;
        Ok((t2, moves::compose_branch_maps(&m1.branch_map, &m2.branch_map)))
    })();
    match (one, other) {
        (Ok((ta, fa)), Ok((tb, fb))) => ta.same_as(&tb) && fa == fb,
        _ => false,
    }
}

/// The commutation normal form: repeatedly act with the least-site step
/// that can be brought to the front of the remaining word.  The end track
/// and the composed correspondence are unchanged.
pub fn normalize(word: &MoveWord) -> Result<MoveWord> {
    let mut remaining: Vec<Step> = word.steps.clone();
    let mut out = MoveWord::empty(&word.base);
    while !remaining.is_empty() {
        // A step is available when it commutes past everything before it.
        let mut chosen = None;
        'candidates: for j in 0..remaining.len() {
            // Walk j to the front: each swap is tested in the track where
            // the swapped pair acts.
            for i in (0..j).rev() {
                let mut prefix = out.end.clone();
                for &s in &remaining[..i] {
                    prefix = s.apply(&prefix)?.0;
                }
                if !steps_commute(&prefix, remaining[i], remaining[j]) {
                    continue 'candidates;
                }
            }
            let site = remaining[j].site();
            match chosen {
                Some((best, _)) if site >= best => {}
                _ => chosen = Some((site, j)),
            }
        }
        let (_, j) = chosen.ok_or_else(|| {
            Error::Internal("no available step in a nonempty word".into())
        })?;
        let step = remaining.remove(j);
        out.push(step)?;
    }
    debug_assert!(out.end.same_as(&word.end));
    debug_assert_eq!(out.branch_map, word.branch_map);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{theta, two_thetas};

    #[test]
    fn step_strings_round_trip() {
        for s in [
            Step::Shift(3),
            Step::Split(17, SplitDir::Right),
            Step::Split(2, SplitDir::Left),
            Step::Collision(9),
        ] {
            let text = s.to_string();
            assert_eq!(text.parse::<Step>().unwrap(), s);
        }
        assert!("split X b1".parse::<Step>().is_err());
        assert!("frobnicate b1".parse::<Step>().is_err());
    }

    #[test]
    fn replay_matches_direct_application() {
        let t = theta();
        let word = MoveWord::replay(&t, &[Step::Split(0, SplitDir::Right)]).unwrap();
        let (direct, _) = moves::split(&t, 0, SplitDir::Right).unwrap();
        assert!(word.end.same_as(&direct));
        assert_eq!(word.branch_map.len(), 3);
    }

    #[test]
    fn disjoint_splits_normalize_to_least_site_first() {
        let t = two_thetas();
        let forwards =
            MoveWord::replay(&t, &[Step::Split(0, SplitDir::Right), Step::Split(3, SplitDir::Right)])
                .unwrap();
        let backwards =
            MoveWord::replay(&t, &[Step::Split(3, SplitDir::Right), Step::Split(0, SplitDir::Right)])
                .unwrap();
        assert!(forwards.end.same_as(&backwards.end));
        let na = normalize(&forwards).unwrap();
        let nb = normalize(&backwards).unwrap();
        assert_eq!(na.steps, nb.steps);
        assert_eq!(na.steps[0].site(), 0);
        // Idempotent.
        let again = normalize(&na).unwrap();
        assert_eq!(again.steps, na.steps);
    }

    #[test]
    fn dependent_steps_keep_their_order() {
        let t = theta();
        // Split at 0, then split at the branch that becomes large in the
        // result; the second step does not exist from the base, so the
        // word must not reorder.
        let w = MoveWord::replay(&t, &[Step::Split(0, SplitDir::Right)]).unwrap();
        let large: Vec<BranchId> = w
            .end
            .branch_ids()
            .filter(|&b| w.end.branch_class(b) == crate::track::BranchClass::Large)
            .collect();
        if let Some(&next) = large.first() {
            let mut longer = w.clone();
            longer.push(Step::Split(next, SplitDir::Right)).unwrap();
            let n = normalize(&longer).unwrap();
            assert_eq!(n.steps, longer.steps);
        }
    }

    #[test]
    fn base_sites_project_through_stable_labels() {
        let t = two_thetas();
        let word =
            MoveWord::replay(&t, &[Step::Split(3, SplitDir::Left), Step::Split(0, SplitDir::Right)])
                .unwrap();
        assert_eq!(word.base_sites().unwrap(), vec![3, 0]);
    }
}
