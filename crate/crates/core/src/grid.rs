//! Index conventions, residue arithmetic and the sparse array type shared by
//! every other module.
//!
//! Rows and columns are 1-based. Any out-of-range index is brought back into
//! `1..=n` with [`wrap_index`], so `0` names column `n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("invalid dimensions m={m} n={n} h={h} k={k}: {reason}")]
    BadDims {
        m: usize,
        n: usize,
        h: usize,
        k: usize,
        reason: &'static str,
    },
    #[error("cell ({row},{col}) lies outside a {m}x{n} array")]
    OutOfBounds {
        row: usize,
        col: usize,
        m: usize,
        n: usize,
    },
    #[error("value {value} at ({row},{col}) is not a nonzero integer in [-{bound}, {bound}]")]
    BadValue {
        row: usize,
        col: usize,
        value: i64,
        bound: i64,
    },
    #[error("cell ({row},{col}) is already filled")]
    Occupied { row: usize, col: usize },
}

/// Maps any integer onto `1..=n`, congruent to `i` modulo `n`.
pub fn wrap_index(i: i64, n: usize) -> usize {
    assert!(n >= 1, "wrap_index needs n >= 1");
    ((i - 1).rem_euclid(n as i64) + 1) as usize
}

/// The representative of `x` modulo an odd `modulus` in
/// `[-(modulus-1)/2, (modulus-1)/2]`.
pub fn canonical_residue(x: i64, modulus: i64) -> i64 {
    debug_assert!(modulus >= 3 && modulus % 2 == 1);
    let r = x.rem_euclid(modulus);
    if r > modulus / 2 {
        r - modulus
    } else {
        r
    }
}

/// Shape of a (possibly rectangular) Heffter array `H(m,n;h,k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub h: usize,
    pub k: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize, h: usize, k: usize) -> Result<Self, GridError> {
        let bad = |reason| GridError::BadDims { m, n, h, k, reason };
        if m == 0 || n == 0 || h == 0 || k == 0 {
            return Err(bad("all dimensions must be positive"));
        }
        if m * h != n * k {
            return Err(bad("m*h must equal n*k"));
        }
        if h > n || k > m {
            return Err(bad("need h <= n and k <= m"));
        }
        Ok(Self { m, n, h, k })
    }

    pub fn square(n: usize, k: usize) -> Result<Self, GridError> {
        Self::new(n, n, k, k)
    }

    /// Number of filled cells, `n*k`.
    pub fn cells(&self) -> usize {
        self.n * self.k
    }

    /// The group order `2nk + 1`.
    pub fn modulus(&self) -> i64 {
        2 * (self.n * self.k) as i64 + 1
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n && self.h == self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Builds a cell from unreduced indices, wrapping rows modulo `m` and
    /// columns modulo `n`.
    pub fn wrapped(row: i64, col: i64, m: usize, n: usize) -> Self {
        Self {
            row: wrap_index(row, m),
            col: wrap_index(col, n),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Which family of lines a check or trace runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Row => "row",
            Axis::Column => "column",
        })
    }
}

/// A sparse `m x n` grid of signed nonzero entries with `|entry| <= n*k`.
///
/// Empty cells are simply absent. Entries iterate in `(row, col)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialArray {
    dims: Dims,
    entries: BTreeMap<Cell, i64>,
}

impl PartialArray {
    pub fn new(dims: Dims) -> Self {
        Self {
            dims,
            entries: BTreeMap::new(),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn modulus(&self) -> i64 {
        self.dims.modulus()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<i64> {
        self.entries.get(&Cell::new(row, col)).copied()
    }

    pub fn is_filled(&self, cell: Cell) -> bool {
        self.entries.contains_key(&cell)
    }

    fn check(&self, cell: Cell, value: i64) -> Result<(), GridError> {
        let Dims { m, n, .. } = self.dims;
        if !(1..=m).contains(&cell.row) || !(1..=n).contains(&cell.col) {
            return Err(GridError::OutOfBounds {
                row: cell.row,
                col: cell.col,
                m,
                n,
            });
        }
        let bound = self.dims.cells() as i64;
        if value == 0 || value.abs() > bound {
            return Err(GridError::BadValue {
                row: cell.row,
                col: cell.col,
                value,
                bound,
            });
        }
        Ok(())
    }

    /// Fills an empty cell. Refuses to overwrite.
    pub fn insert(&mut self, cell: Cell, value: i64) -> Result<(), GridError> {
        self.check(cell, value)?;
        if self.entries.contains_key(&cell) {
            return Err(GridError::Occupied {
                row: cell.row,
                col: cell.col,
            });
        }
        self.entries.insert(cell, value);
        Ok(())
    }

    /// Sets a cell whether or not it is already filled.
    pub fn set(&mut self, cell: Cell, value: i64) -> Result<Option<i64>, GridError> {
        self.check(cell, value)?;
        Ok(self.entries.insert(cell, value))
    }

    pub fn remove(&mut self, cell: Cell) -> Option<i64> {
        self.entries.remove(&cell)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, i64)> + '_ {
        self.entries.iter().map(|(c, v)| (*c, *v))
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.entries.keys().copied()
    }

    /// Filled cells of row `r`, left to right.
    pub fn row(&self, r: usize) -> Vec<(usize, i64)> {
        self.entries
            .range(Cell::new(r, 0)..=Cell::new(r, usize::MAX))
            .map(|(c, v)| (c.col, *v))
            .collect()
    }

    /// Filled cells of column `c`, top to bottom.
    pub fn column(&self, c: usize) -> Vec<(usize, i64)> {
        (1..=self.dims.m)
            .filter_map(|r| self.get(r, c).map(|v| (r, v)))
            .collect()
    }

    /// Entries of line `index` along `axis` in natural order
    /// (left-to-right for rows, top-to-bottom for columns).
    pub fn line(&self, axis: Axis, index: usize) -> Vec<i64> {
        match axis {
            Axis::Row => self.row(index).into_iter().map(|(_, v)| v).collect(),
            Axis::Column => self.column(index).into_iter().map(|(_, v)| v).collect(),
        }
    }

    pub fn line_count(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.dims.m,
            Axis::Column => self.dims.n,
        }
    }

    /// Dense row-major view with `None` for empty cells.
    pub fn to_grid(&self) -> Vec<Vec<Option<i64>>> {
        let Dims { m, n, .. } = self.dims;
        let mut grid = vec![vec![None; n]; m];
        for (cell, v) in self.iter() {
            grid[cell.row - 1][cell.col - 1] = Some(v);
        }
        grid
    }

    pub fn from_grid(dims: Dims, grid: &[Vec<Option<i64>>]) -> Result<Self, GridError> {
        let mut array = Self::new(dims);
        for (r, line) in grid.iter().enumerate() {
            for (c, v) in line.iter().enumerate() {
                if let Some(v) = v {
                    array.insert(Cell::new(r + 1, c + 1), *v)?;
                }
            }
        }
        Ok(array)
    }
}
