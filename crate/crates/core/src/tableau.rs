//! Permutation tableaux and tree-like tableaux with their validators.
//!
//! Cells are addressed 1-based as `(row, column)` with `(1, 1)` the top-left
//! cell. Validators never abort: they report every broken rule they find.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{BorderPath, Shape};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    Shape(String),
    /// Filling row does not have as many entries as the shape row has cells.
    FillingMismatch { row: usize, expected: usize, found: usize },
    NotBinary { row: usize, col: usize, value: u8 },
    /// Column with no 1 in it.
    ColumnWithoutOne { col: usize },
    /// A 0 with a 1 above it and a 1 to its left.
    ZeroBetweenOnes { row: usize, col: usize },
    /// Tree-like tableau of size n must have length n + 1.
    WrongLength { expected: usize, found: usize },
    EmptyRow { row: usize },
    PointOutsideShape { row: usize, col: usize },
    DuplicatePoint { row: usize, col: usize },
    RootNotPointed,
    RowWithoutPoint { row: usize },
    ColumnWithoutPoint { col: usize },
    /// Non-root point with points both above it and to its left.
    PointBlocked { row: usize, col: usize },
    /// Non-root point with nothing above it and nothing to its left.
    PointUnsupported { row: usize, col: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            Shape(msg) => write!(f, "shape: {msg}"),
            FillingMismatch { row, expected, found } => {
                write!(f, "row {row} has {expected} cells but {found} filling entries")
            }
            NotBinary { row, col, value } => write!(f, "cell ({row},{col}) holds {value}, not 0/1"),
            ColumnWithoutOne { col } => write!(f, "column {col} contains no 1"),
            ZeroBetweenOnes { row, col } => {
                write!(f, "0 at ({row},{col}) has a 1 above it and a 1 to its left")
            }
            WrongLength { expected, found } => {
                write!(f, "length {found}, expected {expected}")
            }
            EmptyRow { row } => write!(f, "row {row} is empty"),
            PointOutsideShape { row, col } => write!(f, "point ({row},{col}) lies outside the shape"),
            DuplicatePoint { row, col } => write!(f, "point ({row},{col}) listed twice"),
            RootNotPointed => write!(f, "cell (1,1) is not pointed"),
            RowWithoutPoint { row } => write!(f, "row {row} has no point"),
            ColumnWithoutPoint { col } => write!(f, "column {col} has no point"),
            PointBlocked { row, col } => {
                write!(f, "point ({row},{col}) has points both above and to the left")
            }
            PointUnsupported { row, col } => {
                write!(f, "point ({row},{col}) has no point above and none to the left")
            }
        }
    }
}

/// Unvalidated permutation tableau data: one filling list per row, empty
/// lists for empty rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPermutationTableau {
    pub n: usize,
    pub rows: Vec<usize>,
    pub filling: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTreeLikeTableau {
    pub n: usize,
    pub rows: Vec<usize>,
    pub points: Vec<(usize, usize)>,
}

pub fn validate_permutation_tableau(t: &RawPermutationTableau) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if let Err(e) = Shape::new(t.rows.clone(), t.n) {
        out.push(Violation::Shape(e.to_string()));
        return Err(out);
    }
    let mut filling_ok = t.filling.len() == t.rows.len();
    if !filling_ok {
        out.push(Violation::Shape(format!(
            "{} rows but {} filling rows",
            t.rows.len(),
            t.filling.len()
        )));
    }
    for (i, (&len, row)) in t.rows.iter().zip(&t.filling).enumerate() {
        if row.len() != len {
            filling_ok = false;
            out.push(Violation::FillingMismatch {
                row: i + 1,
                expected: len,
                found: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v > 1 {
                out.push(Violation::NotBinary {
                    row: i + 1,
                    col: j + 1,
                    value: v,
                });
            }
        }
    }
    if !filling_ok {
        return Err(out);
    }

    let columns = t.rows[0];
    for col in 0..columns {
        let mut seen_one = false;
        for (row, cells) in t.filling.iter().enumerate() {
            let Some(&v) = cells.get(col) else { break };
            if v == 1 {
                seen_one = true;
            } else if seen_one && cells[..col].contains(&1) {
                out.push(Violation::ZeroBetweenOnes {
                    row: row + 1,
                    col: col + 1,
                });
            }
        }
        if !seen_one {
            out.push(Violation::ColumnWithoutOne { col: col + 1 });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        out.sort_by_key(violation_order);
        Err(out)
    }
}

fn violation_order(v: &Violation) -> (usize, usize) {
    match *v {
        Violation::ColumnWithoutOne { col } => (0, col),
        Violation::ZeroBetweenOnes { row, col } => (1 + col, row),
        _ => (usize::MAX, 0),
    }
}

pub fn validate_tree_like_tableau(t: &RawTreeLikeTableau) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let found = t.rows.len() + t.rows.first().copied().unwrap_or(0);
    if found != t.n + 1 {
        out.push(Violation::WrongLength {
            expected: t.n + 1,
            found,
        });
    }
    let shape = match Shape::new(t.rows.clone(), found) {
        Ok(s) => s,
        Err(e) => {
            out.push(Violation::Shape(e.to_string()));
            return Err(out);
        }
    };
    for (i, &len) in t.rows.iter().enumerate() {
        if len == 0 {
            out.push(Violation::EmptyRow { row: i + 1 });
        }
    }

    let mut points = BTreeSet::new();
    for &(row, col) in &t.points {
        if !shape.contains(row, col) {
            out.push(Violation::PointOutsideShape { row, col });
        } else if !points.insert((row, col)) {
            out.push(Violation::DuplicatePoint { row, col });
        }
    }
    if !points.contains(&(1, 1)) {
        out.push(Violation::RootNotPointed);
    }
    for row in 1..=shape.rows() {
        if shape.row_len(row) > 0 && !points.iter().any(|&(r, _)| r == row) {
            out.push(Violation::RowWithoutPoint { row });
        }
    }
    for col in 1..=shape.columns() {
        if !points.iter().any(|&(_, c)| c == col) {
            out.push(Violation::ColumnWithoutPoint { col });
        }
    }
    for &(row, col) in &points {
        if (row, col) == (1, 1) {
            continue;
        }
        let above = points.iter().any(|&(r, c)| c == col && r < row);
        let left = points.range((row, 0)..(row, col)).next().is_some();
        match (above, left) {
            (true, true) => out.push(Violation::PointBlocked { row, col }),
            (false, false) => out.push(Violation::PointUnsupported { row, col }),
            _ => {}
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A validated permutation tableau.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationTableau {
    shape: Shape,
    filling: Vec<Vec<bool>>,
}

impl PermutationTableau {
    pub fn new(shape: Shape, filling: Vec<Vec<bool>>) -> Result<Self> {
        let raw = RawPermutationTableau {
            n: shape.length(),
            rows: shape.row_lengths().to_vec(),
            filling: filling
                .iter()
                .map(|r| r.iter().map(|&b| b as u8).collect())
                .collect(),
        };
        validate_permutation_tableau(&raw).map_err(Error::InvalidTableau)?;
        Ok(PermutationTableau { shape, filling })
    }

    /// Caller guarantees validity; used on hot paths that build tableaux
    /// by construction.
    pub(crate) fn from_parts(shape: Shape, filling: Vec<Vec<bool>>) -> Self {
        debug_assert_eq!(shape.rows(), filling.len());
        PermutationTableau { shape, filling }
    }

    /// The unique tableau of length 1: a single empty row.
    pub fn unit() -> Self {
        PermutationTableau {
            shape: Shape::new(vec![0], 1).unwrap(),
            filling: vec![Vec::new()],
        }
    }

    pub fn n(&self) -> usize {
        self.shape.length()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn filling(&self) -> &[Vec<bool>] {
        &self.filling
    }

    /// Entry at a 1-based cell; `None` outside the shape.
    pub fn get(&self, row: usize, col: usize) -> Option<bool> {
        self.filling.get(row.checked_sub(1)?)?.get(col.checked_sub(1)?).copied()
    }

    pub fn border_path(&self) -> BorderPath {
        self.shape.border_path()
    }

    pub fn corners(&self) -> usize {
        self.border_path().corners()
    }

    pub fn inner_corners(&self) -> usize {
        self.border_path().inner_corners()
    }

    /// 1-based indices of the rows with no restricted zero, top to bottom.
    pub fn unrestricted_row_indices(&self) -> Vec<usize> {
        let mut restricted = vec![false; self.shape.rows()];
        for col in 0..self.shape.columns() {
            let mut seen_one = false;
            for (row, cells) in self.filling.iter().enumerate() {
                match cells.get(col) {
                    None => break,
                    Some(true) => seen_one = true,
                    Some(false) if seen_one => restricted[row] = true,
                    Some(false) => {}
                }
            }
        }
        (1..=self.shape.rows()).filter(|&r| !restricted[r - 1]).collect()
    }

    pub fn unrestricted_rows(&self) -> usize {
        unrestricted_rows(self)
    }

    pub fn to_raw(&self) -> RawPermutationTableau {
        RawPermutationTableau {
            n: self.n(),
            rows: self.shape.row_lengths().to_vec(),
            filling: self
                .filling
                .iter()
                .map(|r| r.iter().map(|&b| b as u8).collect())
                .collect(),
        }
    }
}

impl TryFrom<RawPermutationTableau> for PermutationTableau {
    type Error = Error;

    fn try_from(raw: RawPermutationTableau) -> Result<Self> {
        validate_permutation_tableau(&raw).map_err(Error::InvalidTableau)?;
        let shape = Shape::new(raw.rows, raw.n)?;
        let filling = raw
            .filling
            .into_iter()
            .map(|r| r.into_iter().map(|v| v == 1).collect())
            .collect();
        Ok(PermutationTableau { shape, filling })
    }
}

/// Number of rows of `t` containing no 0 that has a 1 above it.
pub fn unrestricted_rows(t: &PermutationTableau) -> usize {
    t.unrestricted_row_indices().len()
}

/// A validated tree-like tableau.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeLikeTableau {
    shape: Shape,
    points: BTreeSet<(usize, usize)>,
}

impl TreeLikeTableau {
    pub fn new(shape: Shape, points: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let raw = RawTreeLikeTableau {
            n: shape.length() - 1,
            rows: shape.row_lengths().to_vec(),
            points: points.into_iter().collect(),
        };
        TreeLikeTableau::try_from(raw)
    }

    pub(crate) fn from_parts(shape: Shape, points: BTreeSet<(usize, usize)>) -> Self {
        TreeLikeTableau { shape, points }
    }

    /// Size n; the shape has length n + 1.
    pub fn n(&self) -> usize {
        self.shape.length() - 1
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn points(&self) -> &BTreeSet<(usize, usize)> {
        &self.points
    }

    pub fn border_path(&self) -> BorderPath {
        self.shape.border_path()
    }

    pub fn corners(&self) -> usize {
        self.border_path().corners()
    }

    pub fn inner_corners(&self) -> usize {
        self.border_path().inner_corners()
    }

    pub fn to_raw(&self) -> RawTreeLikeTableau {
        RawTreeLikeTableau {
            n: self.n(),
            rows: self.shape.row_lengths().to_vec(),
            points: self.points.iter().copied().collect(),
        }
    }
}

impl TryFrom<RawTreeLikeTableau> for TreeLikeTableau {
    type Error = Error;

    fn try_from(raw: RawTreeLikeTableau) -> Result<Self> {
        validate_tree_like_tableau(&raw).map_err(Error::InvalidTableau)?;
        let shape = Shape::new(raw.rows, raw.n + 1)?;
        Ok(TreeLikeTableau {
            shape,
            points: raw.points.into_iter().collect(),
        })
    }
}

/// JSON document for either family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TableauDoc {
    Permutation {
        n: usize,
        rows: Vec<usize>,
        filling: Vec<Vec<u8>>,
    },
    Treelike {
        n: usize,
        rows: Vec<usize>,
        points: Vec<[usize; 2]>,
    },
}

/// A parsed and validated tableau of either family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tableau {
    Permutation(PermutationTableau),
    TreeLike(TreeLikeTableau),
}

impl TableauDoc {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tableau documents always serialize")
    }

    /// Runs the family's validator.
    pub fn into_tableau(self) -> Result<Tableau> {
        match self {
            TableauDoc::Permutation { n, rows, mut filling } => {
                // permit omitting the trailing empty rows from the filling
                while filling.len() < rows.len() && rows[filling.len()] == 0 {
                    filling.push(Vec::new());
                }
                let raw = RawPermutationTableau { n, rows, filling };
                Ok(Tableau::Permutation(raw.try_into()?))
            }
            TableauDoc::Treelike { n, rows, points } => {
                let raw = RawTreeLikeTableau {
                    n,
                    rows,
                    points: points.into_iter().map(|[r, c]| (r, c)).collect(),
                };
                Ok(Tableau::TreeLike(raw.try_into()?))
            }
        }
    }
}

impl From<&PermutationTableau> for TableauDoc {
    fn from(t: &PermutationTableau) -> Self {
        let raw = t.to_raw();
        TableauDoc::Permutation {
            n: raw.n,
            rows: raw.rows,
            filling: raw.filling,
        }
    }
}

impl From<&TreeLikeTableau> for TableauDoc {
    fn from(t: &TreeLikeTableau) -> Self {
        TableauDoc::Treelike {
            n: t.n(),
            rows: t.shape.row_lengths().to_vec(),
            points: t.points.iter().map(|&(r, c)| [r, c]).collect(),
        }
    }
}

/// Worked examples used across the test suites.
pub mod examples {
    use super::*;

    /// The 13-point tree-like tableau on rows 7,7,5,5,2,2,1 with four corners.
    pub fn thirteen_point_tree_like() -> TreeLikeTableau {
        let shape = Shape::new(vec![7, 7, 5, 5, 2, 2, 1], 14).unwrap();
        let points = [
            (1, 1),
            (1, 2),
            (1, 4),
            (1, 7),
            (2, 2),
            (2, 6),
            (3, 2),
            (4, 1),
            (4, 3),
            (4, 5),
            (5, 2),
            (6, 1),
            (7, 1),
        ];
        TreeLikeTableau::new(shape, points).unwrap()
    }

    fn perm(rows: Vec<usize>, filling: &[&[u8]]) -> PermutationTableau {
        let n = rows.len() + rows[0];
        RawPermutationTableau {
            n,
            rows,
            filling: filling.iter().map(|r| r.to_vec()).collect(),
        }
        .try_into()
        .unwrap()
    }

    /// Three permutation tableaux: lengths 11, 12 (two empty rows) and 7.
    pub fn permutation_examples() -> [PermutationTableau; 3] {
        [
            perm(
                vec![7, 3, 2, 1],
                &[&[0, 1, 0, 1, 1, 1, 1], &[0, 0, 1], &[1, 1], &[0]],
            ),
            perm(
                vec![6, 4, 4, 1, 0, 0],
                &[&[0, 1, 0, 0, 1, 1], &[0, 0, 1, 1], &[0, 1, 1, 1], &[1], &[], &[]],
            ),
            perm(
                vec![3, 3, 3, 2],
                &[&[1, 0, 1], &[0, 0, 0], &[0, 1, 1], &[0, 1]],
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn worked_permutation_tableaux_are_valid() {
        let [a, b, c] = permutation_examples();
        assert_eq!(a.n(), 11);
        assert_eq!(b.n(), 12);
        assert_eq!(b.shape().empty_rows(), 2);
        assert_eq!(c.n(), 7);
        // top and third rows unrestricted
        assert_eq!(a.unrestricted_row_indices(), vec![1, 3]);
        assert_eq!(unrestricted_rows(&a), 2);
        assert_eq!(b.unrestricted_row_indices(), vec![1, 3, 4, 5, 6]);
    }

    #[test]
    fn unit_tableau() {
        let t = PermutationTableau::unit();
        assert_eq!(t.n(), 1);
        assert_eq!(t.unrestricted_rows(), 1);
        assert_eq!(t.corners(), 0);
        assert!(validate_permutation_tableau(&t.to_raw()).is_ok());
    }

    #[test]
    fn single_zero_cell_breaks_column_rule() {
        let raw = RawPermutationTableau {
            n: 2,
            rows: vec![1],
            filling: vec![vec![0]],
        };
        assert_eq!(
            validate_permutation_tableau(&raw),
            Err(vec![Violation::ColumnWithoutOne { col: 1 }])
        );
    }

    #[test]
    fn zero_between_ones_is_reported() {
        let raw = RawPermutationTableau {
            n: 4,
            rows: vec![2, 2],
            filling: vec![vec![0, 1], vec![1, 0]],
        };
        assert_eq!(
            validate_permutation_tableau(&raw),
            Err(vec![Violation::ZeroBetweenOnes { row: 2, col: 2 }])
        );
    }

    #[test]
    fn length_two_candidates() {
        // shapes of length 2: one empty-row pair [0,0] and the single cell [1]
        let mut accepted = 0;
        let mut rejected = 0;
        let empty = RawPermutationTableau {
            n: 2,
            rows: vec![0, 0],
            filling: vec![vec![], vec![]],
        };
        for raw in [empty]
            .into_iter()
            .chain((0..2u8).map(|v| RawPermutationTableau {
                n: 2,
                rows: vec![1],
                filling: vec![vec![v]],
            }))
        {
            match validate_permutation_tableau(&raw) {
                Ok(()) => accepted += 1,
                Err(v) => {
                    assert!(!v.is_empty());
                    rejected += 1
                }
            }
        }
        assert_eq!((accepted, rejected), (2, 1));
    }

    #[test]
    fn malformed_filling() {
        let raw = RawPermutationTableau {
            n: 3,
            rows: vec![2],
            filling: vec![vec![1, 2, 1]],
        };
        let v = validate_permutation_tableau(&raw).unwrap_err();
        assert!(v.contains(&Violation::FillingMismatch {
            row: 1,
            expected: 2,
            found: 3
        }));
        assert!(v.contains(&Violation::NotBinary {
            row: 1,
            col: 2,
            value: 2
        }));
        let raw = RawPermutationTableau {
            n: 5,
            rows: vec![2],
            filling: vec![vec![1, 1]],
        };
        assert!(matches!(
            validate_permutation_tableau(&raw).unwrap_err()[0],
            Violation::Shape(_)
        ));
    }

    #[test]
    fn thirteen_point_tableau() {
        let t = thirteen_point_tree_like();
        assert_eq!(t.n(), 13);
        assert_eq!(t.points().len(), 13);
        assert_eq!(t.corners(), 4);
        assert_eq!(t.inner_corners(), 3);
    }

    #[test]
    fn root_only() {
        let t = TreeLikeTableau::new(Shape::new(vec![1], 2).unwrap(), [(1, 1)]).unwrap();
        assert_eq!(t.n(), 1);
        assert_eq!(t.corners(), 1);
    }

    #[test]
    fn tree_like_violations() {
        let raw = RawTreeLikeTableau {
            n: 3,
            rows: vec![2, 2],
            points: vec![(1, 1), (2, 2)],
        };
        let v = validate_tree_like_tableau(&raw).unwrap_err();
        assert!(!v.contains(&Violation::RowWithoutPoint { row: 2 }));
        assert!(v.contains(&Violation::PointUnsupported { row: 2, col: 2 }));
        assert!(!v.contains(&Violation::ColumnWithoutPoint { col: 2 }));

        let raw = RawTreeLikeTableau {
            n: 3,
            rows: vec![2, 2],
            points: vec![(1, 1), (1, 2), (2, 1), (2, 2)],
        };
        let v = validate_tree_like_tableau(&raw).unwrap_err();
        assert_eq!(v, vec![Violation::PointBlocked { row: 2, col: 2 }]);

        let raw = RawTreeLikeTableau {
            n: 2,
            rows: vec![1, 0],
            points: vec![(1, 1)],
        };
        assert!(validate_tree_like_tableau(&raw)
            .unwrap_err()
            .contains(&Violation::EmptyRow { row: 2 }));

        let raw = RawTreeLikeTableau {
            n: 2,
            rows: vec![1],
            points: vec![(1, 1), (1, 3)],
        };
        let v = validate_tree_like_tableau(&raw).unwrap_err();
        assert!(v.contains(&Violation::WrongLength {
            expected: 3,
            found: 2
        }));
        assert!(v.contains(&Violation::PointOutsideShape { row: 1, col: 3 }));

        let raw = RawTreeLikeTableau {
            n: 2,
            rows: vec![2],
            points: vec![(1, 2)],
        };
        let v = validate_tree_like_tableau(&raw).unwrap_err();
        assert!(v.contains(&Violation::RootNotPointed));
        assert!(v.contains(&Violation::ColumnWithoutPoint { col: 1 }));
    }

    #[test]
    fn json_round_trip() {
        let t = thirteen_point_tree_like();
        let doc = TableauDoc::from(&t);
        let text = doc.to_json();
        assert!(text.starts_with(r#"{"family":"treelike","n":13,"rows":[7,7,5,5,2,2,1]"#));
        let back = TableauDoc::from_json(&text).unwrap().into_tableau().unwrap();
        assert_eq!(back, Tableau::TreeLike(t));

        let p = &permutation_examples()[1];
        let text = TableauDoc::from(p).to_json();
        let back = TableauDoc::from_json(&text).unwrap().into_tableau().unwrap();
        assert_eq!(back, Tableau::Permutation(p.clone()));

        // trailing empty rows may be left out of the filling
        let short = r#"{"family":"permutation","n":3,"rows":[1,0],"filling":[[1]]}"#;
        assert!(TableauDoc::from_json(short).unwrap().into_tableau().is_ok());
    }
}
