//! Exhaustive generation of both tableau families.
//!
//! Permutation tableaux are grown one border step at a time from the unique
//! tableau of length 1. Tree-like tableaux have no such procedure here and are
//! found by a pruned search over shapes and point placements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{Shape, Step};
use crate::tableau::{PermutationTableau, TreeLikeTableau};

pub const DEFAULT_PERMUTATION_CAP: usize = 10;
pub const DEFAULT_TREE_LIKE_CAP: usize = 7;

/// How a tableau of length n grows to length n + 1.
///
/// `j` and the entries of `extra_ones` index the unrestricted rows of the
/// parent (1-based, top to bottom), not absolute row numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtensionChoice {
    South,
    West { j: usize, extra_ones: Vec<usize> },
}

impl ExtensionChoice {
    /// Unrestricted rows of the extension of a tableau with `u` of them.
    pub fn resulting_unrestricted(&self, u: usize) -> usize {
        match self {
            ExtensionChoice::South => u + 1,
            ExtensionChoice::West { j, extra_ones } => j + extra_ones.len(),
        }
    }

    fn check(&self, u: usize) -> Result<()> {
        let ExtensionChoice::West { j, extra_ones } = self else {
            return Ok(());
        };
        if *j < 1 || *j > u {
            return Err(Error::BadExtension(format!(
                "j = {j} but the tableau has {u} unrestricted rows"
            )));
        }
        let mut prev = *j;
        for &e in extra_ones {
            if e <= prev || e > u {
                return Err(Error::BadExtension(format!(
                    "extra ones {extra_ones:?} must be strictly increasing in {}..={u}",
                    j + 1
                )));
            }
            prev = e;
        }
        Ok(())
    }
}

/// Appends one border step at the southwest end.
///
/// A south step adds an empty bottom row. A west step adds a new first column
/// spanning every row: restricted rows get 0, the `j`-th unrestricted row gets
/// the topmost 1, and below it exactly the rows in `extra_ones` get 1.
pub fn extend(t: &PermutationTableau, choice: &ExtensionChoice) -> Result<PermutationTableau> {
    let unrestricted = t.unrestricted_row_indices();
    choice.check(unrestricted.len())?;
    Ok(extend_unchecked(t, &unrestricted, choice))
}

fn extend_unchecked(
    t: &PermutationTableau,
    unrestricted: &[usize],
    choice: &ExtensionChoice,
) -> PermutationTableau {
    let mut rows = t.shape().row_lengths().to_vec();
    let mut filling = t.filling().to_vec();
    match choice {
        ExtensionChoice::South => {
            rows.push(0);
            filling.push(Vec::new());
        }
        ExtensionChoice::West { j, extra_ones } => {
            let mut column = vec![false; rows.len()];
            column[unrestricted[j - 1] - 1] = true;
            for &e in extra_ones {
                column[unrestricted[e - 1] - 1] = true;
            }
            for ((len, cells), bit) in rows.iter_mut().zip(filling.iter_mut()).zip(column) {
                *len += 1;
                cells.insert(0, bit);
            }
        }
    }
    let shape = Shape::new(rows, t.n() + 1).expect("extension keeps the shape valid");
    PermutationTableau::from_parts(shape, filling)
}

/// Unrestricted rows (absolute, 1-based) after `choice`, updated from the
/// parent's list without rescanning the filling.
pub fn updated_unrestricted(
    parent_rows: usize,
    unrestricted: &[usize],
    choice: &ExtensionChoice,
) -> Vec<usize> {
    match choice {
        ExtensionChoice::South => {
            let mut next = unrestricted.to_vec();
            next.push(parent_rows + 1);
            next
        }
        ExtensionChoice::West { j, extra_ones } => {
            let mut next = unrestricted[..*j].to_vec();
            next.extend(extra_ones.iter().map(|&e| unrestricted[e - 1]));
            next
        }
    }
}

/// All `2^u` extensions of a tableau with `u` unrestricted rows: south first,
/// then west by `j`, then `extra_ones` in lexicographic order.
pub fn extension_choices(u: usize) -> Vec<ExtensionChoice> {
    let mut out = Vec::with_capacity(1 << u.min(20));
    out.push(ExtensionChoice::South);
    for j in 1..=u {
        let mut subsets = Vec::new();
        lex_subsets(j + 1, u, &mut Vec::new(), &mut subsets);
        out.extend(
            subsets
                .into_iter()
                .map(|extra_ones| ExtensionChoice::West { j, extra_ones }),
        );
    }
    out
}

// subsets of from..=to in lexicographic order of their sorted sequences
fn lex_subsets(from: usize, to: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for next in from..=to {
        prefix.push(next);
        lex_subsets(next + 1, to, prefix, out);
        prefix.pop();
    }
}

/// Extensions of a tableau with `u` unrestricted rows that end with exactly
/// `k` of them.
pub fn extensions_with_k(u: usize, k: usize) -> BigUint {
    if u == 0 || k == 0 || k > u + 1 {
        BigUint::zero()
    } else if k == u + 1 {
        BigUint::one()
    } else {
        binomial(u, k - 1)
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Removes the last border step: the bottom row if it is an empty south
/// step, otherwise the first column.
pub fn parent(t: &PermutationTableau) -> Option<PermutationTableau> {
    if t.n() <= 1 {
        return None;
    }
    let mut rows = t.shape().row_lengths().to_vec();
    let mut filling = t.filling().to_vec();
    match t.border_path().steps().last() {
        Some(Step::South) => {
            rows.pop();
            filling.pop();
        }
        _ => {
            for (len, cells) in rows.iter_mut().zip(filling.iter_mut()) {
                *len -= 1;
                cells.remove(0);
            }
        }
    }
    PermutationTableau::new(Shape::new(rows, t.n() - 1).ok()?, filling).ok()
}

/// Depth-first stream over P_n.
pub struct PermutationTableaux {
    n: usize,
    stack: Vec<(PermutationTableau, Vec<usize>)>,
}

impl Iterator for PermutationTableaux {
    type Item = PermutationTableau;

    fn next(&mut self) -> Option<PermutationTableau> {
        loop {
            let (t, unrestricted) = self.stack.pop()?;
            if t.n() == self.n {
                return Some(t);
            }
            let rows = t.shape().rows();
            for choice in extension_choices(unrestricted.len()).iter().rev() {
                let child = extend_unchecked(&t, &unrestricted, choice);
                let child_unrestricted = updated_unrestricted(rows, &unrestricted, choice);
                self.stack.push((child, child_unrestricted));
            }
        }
    }
}

pub fn enumerate_permutation_tableaux(n: usize) -> Result<PermutationTableaux> {
    enumerate_permutation_tableaux_capped(n, DEFAULT_PERMUTATION_CAP)
}

pub fn enumerate_permutation_tableaux_capped(n: usize, cap: usize) -> Result<PermutationTableaux> {
    check_size("permutation tableau length", n, cap)?;
    Ok(PermutationTableaux {
        n,
        stack: vec![(PermutationTableau::unit(), vec![1])],
    })
}

fn check_size(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain(format!("{what} must be at least 1")));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what,
            requested: n,
            cap,
        });
    }
    Ok(())
}

pub fn enumerate_tree_like_tableaux(n: usize) -> Result<Vec<TreeLikeTableau>> {
    enumerate_tree_like_tableaux_capped(n, DEFAULT_TREE_LIKE_CAP)
}

/// Every tree-like tableau of size `n`, shapes ordered by row count then by
/// row lengths, placements in row-major backtracking order.
pub fn enumerate_tree_like_tableaux_capped(n: usize, cap: usize) -> Result<Vec<TreeLikeTableau>> {
    check_size("tree-like tableau size", n, cap)?;
    let mut out = Vec::new();
    for shape in tree_like_shapes(n) {
        let mut search = PointSearch {
            shape: &shape,
            col_pointed: vec![false; shape.columns() + 1],
            points: BTreeSet::new(),
            out: &mut out,
        };
        search.cell(1, 1, false);
    }
    Ok(out)
}

/// Ferrers shapes of length n + 1 without empty rows.
pub fn tree_like_shapes(n: usize) -> Vec<Shape> {
    let mut shapes = Vec::new();
    for rows in 1..=n {
        let cols = n + 1 - rows;
        let mut acc = vec![cols];
        descending_rows(rows - 1, cols, &mut acc, &mut |r| {
            shapes.push(Shape::new(r.to_vec(), n + 1).unwrap())
        });
    }
    shapes
}

fn descending_rows(left: usize, max: usize, acc: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if left == 0 {
        emit(acc);
        return;
    }
    for len in (1..=max).rev() {
        acc.push(len);
        descending_rows(left - 1, len, acc, emit);
        acc.pop();
    }
}

struct PointSearch<'a> {
    shape: &'a Shape,
    col_pointed: Vec<bool>,
    points: BTreeSet<(usize, usize)>,
    out: &'a mut Vec<TreeLikeTableau>,
}

impl PointSearch<'_> {
    // decides cell (row, col); `row_pointed` says whether row already has a
    // point to the left of col
    fn cell(&mut self, row: usize, col: usize, row_pointed: bool) {
        if col > self.shape.row_len(row) {
            if !row_pointed {
                return;
            }
            // columns whose last cell is in this row must be pointed by now
            let below = self.shape.row_lengths().get(row).copied().unwrap_or(0);
            if (below + 1..=self.shape.row_len(row)).any(|c| !self.col_pointed[c]) {
                return;
            }
            if row == self.shape.rows() {
                self.out.push(TreeLikeTableau::from_parts(
                    self.shape.clone(),
                    self.points.clone(),
                ));
            } else {
                self.cell(row + 1, 1, false);
            }
            return;
        }
        let root = (row, col) == (1, 1);
        if !root {
            self.cell(row, col + 1, row_pointed);
        }
        let above = self.col_pointed[col];
        if root || above != row_pointed {
            let before = self.col_pointed[col];
            self.col_pointed[col] = true;
            self.points.insert((row, col));
            self.cell(row, col + 1, true);
            self.points.remove(&(row, col));
            self.col_pointed[col] = before;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Permutation,
    Treelike,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Permutation => "permutation",
            Family::Treelike => "treelike",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Corners,
    Unrestricted,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Corners => "corners",
            Statistic::Unrestricted => "unrestricted",
        })
    }
}

/// Exact histogram of a statistic over one family at one size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionTable {
    pub n: usize,
    pub family: Family,
    pub stat: Statistic,
    pub counts: BTreeMap<usize, BigUint>,
}

impl DistributionTable {
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn count(&self, value: usize) -> BigUint {
        self.counts.get(&value).cloned().unwrap_or_default()
    }

    /// E[X^power] under the uniform law.
    pub fn raw_moment(&self, power: u32) -> BigRational {
        let total = self.total();
        let sum: BigUint = self
            .counts
            .iter()
            .map(|(&v, c)| BigUint::from(v).pow(power) * c)
            .sum();
        BigRational::new(sum.into(), total.into())
    }

    pub fn mean(&self) -> BigRational {
        self.raw_moment(1)
    }

    /// E[X(X-1)...(X-k+1)].
    pub fn factorial_moment(&self, k: usize) -> BigRational {
        let total = self.total();
        let sum: BigUint = self
            .counts
            .iter()
            .filter(|(&v, _)| v >= k)
            .map(|(&v, c)| (v + 1 - k..=v).map(BigUint::from).product::<BigUint>() * c)
            .sum();
        BigRational::new(sum.into(), total.into())
    }
}

fn tally(n: usize, family: Family, stat: Statistic, values: impl Iterator<Item = usize>) -> DistributionTable {
    let mut counts = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert_with(BigUint::zero) += 1u32;
    }
    DistributionTable {
        n,
        family,
        stat,
        counts,
    }
}

pub fn corner_distribution(n: usize, family: Family) -> Result<DistributionTable> {
    distribution(n, family, Statistic::Corners)
}

pub fn distribution(n: usize, family: Family, stat: Statistic) -> Result<DistributionTable> {
    match (family, stat) {
        (Family::Permutation, Statistic::Corners) => Ok(tally(
            n,
            family,
            stat,
            enumerate_permutation_tableaux(n)?.map(|t| t.corners()),
        )),
        (Family::Permutation, Statistic::Unrestricted) => Ok(tally(
            n,
            family,
            stat,
            enumerate_permutation_tableaux(n)?.map(|t| t.unrestricted_rows()),
        )),
        (Family::Treelike, Statistic::Corners) => Ok(tally(
            n,
            family,
            stat,
            enumerate_tree_like_tableaux(n)?.iter().map(|t| t.corners()),
        )),
        (Family::Treelike, Statistic::Unrestricted) => Err(Error::Domain(
            "unrestricted rows are only defined for permutation tableaux".into(),
        )),
    }
}

/// Brute-force sum of x^corners z^unrestricted over P_n, keyed by
/// (corners, unrestricted rows).
pub fn joint_counts(n: usize) -> Result<BTreeMap<(usize, usize), BigUint>> {
    let mut out = BTreeMap::new();
    for t in enumerate_permutation_tableaux(n)? {
        *out.entry((t.corners(), t.unrestricted_rows()))
            .or_insert_with(BigUint::zero) += 1u32;
    }
    Ok(out)
}
