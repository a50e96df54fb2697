//! Ferrers shapes and their southeast border paths.
//!
//! A shape is stored as its row lengths from top to bottom together with its
//! length (rows + columns). Empty rows can only occur at the bottom, so the
//! same cell diagram with extra empty rows is a different shape of a larger
//! length.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shape {
    row_lengths: Vec<usize>,
    declared_length: usize,
}

impl Shape {
    /// Checks the row profile against the declared length.
    pub fn new(row_lengths: Vec<usize>, declared_length: usize) -> Result<Self> {
        let Some(&columns) = row_lengths.first() else {
            return Err(Error::InvalidShape("a shape needs at least one row".into()));
        };
        if let Some(i) = row_lengths.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidShape(format!(
                "row lengths must be weakly decreasing, row {} has {} cells but row {} has {}",
                i + 1,
                row_lengths[i],
                i + 2,
                row_lengths[i + 1]
            )));
        }
        let actual = row_lengths.len() + columns;
        if actual != declared_length {
            return Err(Error::InvalidShape(format!(
                "declared length {declared_length} but {} rows + {columns} columns = {actual}",
                row_lengths.len()
            )));
        }
        Ok(Shape {
            row_lengths,
            declared_length,
        })
    }

    /// Shape whose length is implied by the rows.
    pub fn from_rows(row_lengths: Vec<usize>) -> Result<Self> {
        let len = row_lengths.len() + row_lengths.first().copied().unwrap_or(0);
        Shape::new(row_lengths, len)
    }

    pub fn row_lengths(&self) -> &[usize] {
        &self.row_lengths
    }

    pub fn rows(&self) -> usize {
        self.row_lengths.len()
    }

    pub fn columns(&self) -> usize {
        self.row_lengths[0]
    }

    /// Rows + columns.
    pub fn length(&self) -> usize {
        self.declared_length
    }

    /// Length of row `r` (1-based).
    pub fn row_len(&self, r: usize) -> usize {
        self.row_lengths[r - 1]
    }

    /// Number of cells in column `c` (1-based).
    pub fn column_height(&self, c: usize) -> usize {
        self.row_lengths.iter().take_while(|&&len| len >= c).count()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= 1 && row <= self.rows() && col >= 1 && col <= self.row_len(row)
    }

    pub fn cell_count(&self) -> usize {
        self.row_lengths.iter().sum()
    }

    pub fn empty_rows(&self) -> usize {
        self.row_lengths.iter().filter(|&&l| l == 0).count()
    }

    pub fn border_path(&self) -> BorderPath {
        border_path(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    South,
    West,
}

/// Step of the border read from the southwest end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReverseStep {
    North,
    East,
}

impl Step {
    pub fn reversed(self) -> ReverseStep {
        match self {
            Step::South => ReverseStep::North,
            Step::West => ReverseStep::East,
        }
    }

    fn as_char(self) -> char {
        match self {
            Step::South => 'S',
            Step::West => 'W',
        }
    }
}

/// Border steps from the northeast end to the southwest end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BorderPath {
    steps: Vec<Step>,
}

impl BorderPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        match steps.first() {
            None => Err(Error::InvalidPath("empty path".into())),
            Some(Step::West) => Err(Error::InvalidPath(
                "path starts with a west step, which would be a column without cells".into(),
            )),
            Some(Step::South) => Ok(BorderPath { steps }),
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same border traversed from the southwest end.
    pub fn north_east(&self) -> impl Iterator<Item = ReverseStep> + '_ {
        self.steps.iter().rev().map(|s| s.reversed())
    }

    pub fn corners(&self) -> usize {
        corners(self)
    }

    pub fn inner_corners(&self) -> usize {
        inner_corners(self)
    }

    /// Inverse of [`border_path`].
    pub fn to_shape(&self) -> Shape {
        let mut rows = Vec::new();
        let mut west_after = self.steps.iter().filter(|&&s| s == Step::West).count();
        for step in &self.steps {
            match step {
                Step::South => rows.push(west_after),
                Step::West => west_after -= 1,
            }
        }
        Shape::new(rows, self.steps.len()).expect("a south-first path always yields a valid shape")
    }
}

impl fmt::Display for BorderPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.steps.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for BorderPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .chars()
            .map(|c| match c {
                'S' => Ok(Step::South),
                'W' => Ok(Step::West),
                other => Err(Error::InvalidPath(format!("unexpected step {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BorderPath::new(steps)
    }
}

/// Each row contributes a south step followed by one west step for every
/// column it has beyond the row below it.
pub fn border_path(shape: &Shape) -> BorderPath {
    let rows = shape.row_lengths();
    let mut steps = Vec::with_capacity(shape.length());
    for (i, &len) in rows.iter().enumerate() {
        let below = rows.get(i + 1).copied().unwrap_or(0);
        steps.push(Step::South);
        steps.extend(std::iter::repeat_n(Step::West, len - below));
    }
    BorderPath { steps }
}

/// South steps immediately followed by a west step.
pub fn corners(path: &BorderPath) -> usize {
    path.steps
        .windows(2)
        .filter(|w| w[0] == Step::South && w[1] == Step::West)
        .count()
}

/// North steps immediately followed by an east step when read from the
/// southwest, i.e. west-then-south pairs in the stored orientation.
pub fn inner_corners(path: &BorderPath) -> usize {
    path.steps
        .windows(2)
        .filter(|w| w[0] == Step::West && w[1] == Step::South)
        .count()
}
