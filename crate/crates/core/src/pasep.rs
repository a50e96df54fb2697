//! Tree-like tableaux as exclusion-process states.
//!
//! The border, read from the southwest end with its first and last steps
//! dropped, is a lattice of n - 1 nodes: north steps are empty nodes and east
//! steps are particles.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::ReverseStep;
use crate::tableau::TreeLikeTableau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Empty,
    Particle,
}

/// Lattice occupancy, node 1 on the left.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PasepState {
    sites: Vec<Site>,
}

impl PasepState {
    pub fn new(sites: Vec<Site>) -> Self {
        PasepState { sites }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Occupancy of 1-based node `i`.
    pub fn site(&self, i: usize) -> Site {
        self.sites[i - 1]
    }
}

impl fmt::Display for PasepState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sites {
            f.write_str(match s {
                Site::Empty => "o",
                Site::Particle => "*",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PasepState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'o' => Ok(Site::Empty),
                '*' => Ok(Site::Particle),
                other => Err(Error::Parse(format!("unexpected site {other:?}, expected 'o' or '*'"))),
            })
            .collect::<Result<_>>()
            .map(PasepState::new)
    }
}

/// Admissible moves from a state; node indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveSet {
    pub right_jumps: Vec<usize>,
    pub left_jumps: Vec<usize>,
    pub can_enter: bool,
    pub can_exit: bool,
}

impl MoveSet {
    pub fn total(&self) -> usize {
        self.right_jumps.len() + self.left_jumps.len() + self.can_enter as usize + self.can_exit as usize
    }

    /// Moves sitting on a corner of the border: right jumps, entry and exit.
    pub fn corner_moves(&self) -> usize {
        self.right_jumps.len() + self.can_enter as usize + self.can_exit as usize
    }
}

pub fn to_pasep_state(t: &TreeLikeTableau) -> PasepState {
    let steps: Vec<ReverseStep> = t.border_path().north_east().collect();
    let inner = if steps.len() >= 2 { &steps[1..steps.len() - 1] } else { &[][..] };
    PasepState::new(
        inner
            .iter()
            .map(|s| match s {
                ReverseStep::North => Site::Empty,
                ReverseStep::East => Site::Particle,
            })
            .collect(),
    )
}

/// A particle may enter at an empty first node and leave from an occupied
/// last node; on the empty lattice entering is always possible.
pub fn moves(state: &PasepState) -> MoveSet {
    let s = state.sites();
    let len = s.len();
    let occupied = |i: usize| s[i] == Site::Particle;
    MoveSet {
        right_jumps: (0..len.saturating_sub(1))
            .filter(|&i| occupied(i) && !occupied(i + 1))
            .map(|i| i + 1)
            .collect(),
        left_jumps: (1..len)
            .filter(|&i| occupied(i) && !occupied(i - 1))
            .map(|i| i + 1)
            .collect(),
        can_enter: s.first().is_none_or(|&x| x == Site::Empty),
        can_exit: s.last().is_some_and(|&x| x == Site::Particle),
    }
}

/// 2 * corners - 1, checked against the move count of the encoded state.
pub fn current_activity(t: &TreeLikeTableau) -> usize {
    let activity = 2 * t.corners() - 1;
    debug_assert_eq!(activity, moves(&to_pasep_state(t)).total());
    activity
}

/// JSON view: `{"state": "o*..", "moves": {..}, "activity": 7}`.
#[derive(Debug, Clone, Serialize)]
pub struct PasepReport {
    pub state: String,
    pub moves: MoveSet,
    pub activity: usize,
}

pub fn pasep_report(t: &TreeLikeTableau) -> PasepReport {
    let state = to_pasep_state(t);
    PasepReport {
        moves: moves(&state),
        state: state.to_string(),
        activity: current_activity(t),
    }
}
