//! Diagonal constructions of integer Heffter arrays `H(n;k)` with
//! `k = 1 (mod 4)`.
//!
//! Both congruence classes start from a base `H(n;5)` made of fourteen
//! diagonals (labelled `A`..`N`) plus a handful of individually placed cells,
//! and then grow by four full-length diagonals per step until every line holds
//! `k` entries. The base layouts live in [`base_layout`] as data so that they
//! can be audited against the worked `H(19;17)` and `H(20;17)` tables.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::grid::{Cell, Dims, GridError, PartialArray};
use crate::verify;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("diagonal {stage} collides with filled cell {cell}")]
    Collision { cell: Cell, stage: String },
    #[error("n = {n} is not in the {class} class: {reason}")]
    Class {
        n: usize,
        class: Class,
        reason: &'static str,
    },
    #[error("unsupported parameters n = {n}, k = {k}: {reason}")]
    Unsupported {
        n: usize,
        k: usize,
        reason: &'static str,
    },
    #[error("H({n};{k}) failed verification: {detail}")]
    Verification { n: usize, k: usize, detail: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Congruence class of `n` modulo 4 handled by the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    /// `n = 3 (mod 4)`
    N3,
    /// `n = 0 (mod 4)`
    N0,
}

impl Class {
    pub fn of(n: usize) -> Option<Class> {
        match n % 4 {
            3 => Some(Class::N3),
            0 => Some(Class::N0),
            _ => None,
        }
    }

    /// `h` for this class: `(n+1)/2` or `n/2`.
    pub fn half(self, n: usize) -> usize {
        match self {
            Class::N3 => n.div_ceil(2),
            Class::N0 => n / 2,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::N3 => "n3",
            Class::N0 => "n0",
        })
    }
}

impl std::str::FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n3" => Ok(Class::N3),
            "n0" => Ok(Class::N0),
            other => Err(format!("unknown class `{other}` (expected n3 or n0)")),
        }
    }
}

/// `len` cells starting at `(row, col)` with value `value`; each further cell
/// moves both indices by `step` and the value by `value_step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalSpec {
    pub row: i64,
    pub col: i64,
    pub value: i64,
    pub step: i64,
    pub value_step: i64,
    pub len: usize,
}

impl DiagonalSpec {
    pub const fn new(row: i64, col: i64, value: i64, step: i64, value_step: i64, len: i64) -> Self {
        Self {
            row,
            col,
            value,
            step,
            value_step,
            len: if len < 0 { 0 } else { len as usize },
        }
    }

    /// Target cells and values, wrapped into an `m x n` grid.
    pub fn cells(&self, m: usize, n: usize) -> impl Iterator<Item = (Cell, i64)> + '_ {
        (0..self.len as i64).map(move |j| {
            (
                Cell::wrapped(self.row + j * self.step, self.col + j * self.step, m, n),
                self.value + j * self.value_step,
            )
        })
    }
}

/// Derived quantities of `(n, k)` for one congruence class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassParams {
    pub class: Class,
    pub n: usize,
    pub k: usize,
    pub h: usize,
    pub q: usize,
    /// Number of four-diagonal groups, `(k-5)/4`.
    pub t: usize,
}

impl ClassParams {
    pub fn new(n: usize, k: usize) -> Result<Self, ConstructError> {
        let class = Class::of(n).ok_or(ConstructError::Unsupported {
            n,
            k,
            reason: "n must be 0 or 3 (mod 4)",
        })?;
        if k < 5 || k % 4 != 1 {
            return Err(ConstructError::Unsupported {
                n,
                k,
                reason: "k must be 1 (mod 4) and at least 5",
            });
        }
        let q = match class {
            Class::N3 => (n.saturating_sub(3)) / 4,
            Class::N0 => n / 4,
        };
        Ok(Self {
            class,
            n,
            k,
            h: class.half(n),
            q,
            t: (k - 5) / 4,
        })
    }
}

/// Fixed part of a base `H(n;5)`: labelled diagonals followed by single cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseLayout {
    pub diagonals: Vec<(char, DiagonalSpec)>,
    pub ad_hoc: Vec<(Cell, i64)>,
}

impl BaseLayout {
    pub fn cell_count(&self) -> usize {
        self.diagonals.iter().map(|(_, d)| d.len).sum::<usize>() + self.ad_hoc.len()
    }
}

/// The base `H(n;5)` layout for `class`. No range checks on `n`; callers
/// validate.
pub fn base_layout(class: Class, n: usize) -> BaseLayout {
    let n = n as i64;
    let d = DiagonalSpec::new;
    let cell = |r: i64, c: i64, v: i64| (Cell::new(r as usize, c as usize), v);
    match class {
        Class::N3 => {
            let h = (n + 1) / 2;
            let q = (n - 3) / 4;
            BaseLayout {
                diagonals: vec![
                    ('A', d(h + 1, h + 1, h - 2, 1, -1, h - 3)),
                    ('B', d(3, 3, -(n - 3), 1, 1, h - 3)),
                    ('C', d(2, 3, 4 * n, 2, -1, q)),
                    ('D', d(3, 2, -(4 * n + 1), 2, -1, q)),
                    ('E', d(3, 4, 5 * n - 3, 2, -1, q)),
                    ('F', d(4, 3, -(3 * n + 4), 2, -1, q)),
                    ('G', d(h + 1, h, -(4 * n - q), 2, 1, q)),
                    ('H', d(h + 2, h + 1, -(5 * n - q - 3), 2, 1, q)),
                    ('I', d(h, h + 1, 4 * n + q + 1, 2, 1, q)),
                    ('J', d(h + 1, h + 2, 3 * n + q + 4, 2, 1, q)),
                    ('K', d(h + 1, 2, -(n + 2), 1, -2, h - 2)),
                    ('L', d(h + 1, 1, n + 1, 1, 2, h - 1)),
                    ('M', d(1, h + 1, -(3 * n), 1, 2, h - 1)),
                    ('N', d(2, h + 1, 3 * n - 1, 1, -2, h - 2)),
                ],
                ad_hoc: vec![
                    cell(1, 1, n - 1),
                    cell(1, 2, 5 * n - 2),
                    cell(1, h, 2 * n + 2),
                    cell(1, n, -5 * n + 1),
                    cell(2, 1, -3 * n - 3),
                    cell(2, 2, -n + 2),
                    cell(h, 1, -2 * n + 1),
                    cell(h, h, -n),
                    cell(h, n, 2 * n + 1),
                    cell(n - 1, n - 1, -h + 1),
                    cell(n - 1, n, 5 * n),
                    cell(n, 1, 3 * n + 2),
                    cell(n, h, -2 * n),
                    cell(n, n - 1, -3 * n - 1),
                    cell(n, n, 1),
                ],
            }
        }
        Class::N0 => {
            let h = n / 2;
            let q = n / 4;
            BaseLayout {
                diagonals: vec![
                    ('A', d(h + 1, h + 2, h - 2, 1, -1, h - 3)),
                    ('B', d(1, 2, -(n - 2), 1, 1, h - 1)),
                    ('C', d(1, 3, 4 * n - 2, 2, -1, q)),
                    ('D', d(2, 2, -(4 * n - 1), 2, -1, q)),
                    ('E', d(2, 4, 5 * n - 5, 2, -1, q - 1)),
                    ('F', d(3, 3, -(3 * n + 2), 2, -1, q - 1)),
                    ('G', d(h + 1, h + 1, -(4 * n - q - 2), 2, 1, q - 1)),
                    ('H', d(h + 2, h + 2, -(5 * n - q - 4), 2, 1, q - 1)),
                    ('I', d(h, h + 2, 4 * n + q - 1, 2, 1, q - 1)),
                    ('J', d(h + 1, h + 3, 3 * n + q + 1, 2, 1, q - 1)),
                    ('K', d(h + 1, 1, n - 1, 1, 2, h - 1)),
                    ('L', d(h + 1, 2, -n, 1, -2, h - 2)),
                    ('M', d(2, h + 2, 3 * n - 4, 1, -2, h - 2)),
                    ('N', d(1, h + 2, -(3 * n - 3), 1, 2, h - 1)),
                ],
                ad_hoc: vec![
                    cell(1, 1, 3 * n - 2),
                    cell(1, h + 1, -3 * n - 1),
                    cell(h, 1, -2 * n + 2),
                    cell(h, h + 1, 5 * n - 3),
                    cell(h, n, -3 * n),
                    cell(n - 2, n - 1, -h + 1),
                    cell(n - 2, n, 5 * n - 2),
                    cell(n - 1, 1, -2 * n),
                    cell(n - 1, h, 5 * n),
                    cell(n - 1, n - 1, -3 * n + 1),
                    cell(n - 1, n, -2 * n + 4),
                    cell(n, 1, 1),
                    cell(n, 2, 5 * n - 4),
                    cell(n, h, -5 * n + 1),
                    cell(n, h + 1, -2 * n + 3),
                    cell(n, n, 2 * n - 1),
                ],
            }
        }
    }
}

/// The four diagonals of augmentation group `i` (1-based), labelled by their
/// diagonal number.
pub fn augmentation_group(params: &ClassParams, i: usize) -> [(usize, DiagonalSpec); 4] {
    let n = params.n as i64;
    let h = params.h as i64;
    let i = i as i64;
    let base = n + 4 * n * i;
    let d = |r, c, v, dv| DiagonalSpec::new(r, c, v, 1, dv, n);
    let label = |x: i64| x as usize;
    match params.class {
        Class::N3 => [
            (label(1 + 2 * i), d(1 + 2 * i, 1, base + 1, 2)),
            (label(2 + 2 * i), d(2 + 2 * i, 1, -(2 * n + base) - 1, -2)),
            (label(h + 2 * i), d(1 + 2 * i, h + 1, -base - 2, -2)),
            (label(h + 1 + 2 * i), d(2 + 2 * i, h + 1, 2 * n + base + 2, 2)),
        ],
        Class::N0 => [
            (label(2 + 2 * i), d(2 + 2 * i, 1, -base - 1, -4)),
            (label(3 + 2 * i), d(3 + 2 * i, 1, base + 3, 4)),
            (label(h + 1 + 2 * i), d(2 + 2 * i, h + 3, base + 2, 4)),
            (label(h + 2 + 2 * i), d(3 + 2 * i, h + 3, -base - 4, -4)),
        ],
    }
}

/// Places every cell of `spec`. Either all cells are placed or, on a
/// collision, none are.
pub fn place_diagonal(array: &mut PartialArray, spec: &DiagonalSpec) -> Result<(), ConstructError> {
    place_labeled(array, spec, "diag")
}

fn place_labeled(
    array: &mut PartialArray,
    spec: &DiagonalSpec,
    stage: &str,
) -> Result<(), ConstructError> {
    let Dims { m, n, .. } = array.dims();
    let mut seen = BTreeSet::new();
    let targets: Vec<_> = spec.cells(m, n).collect();
    for (cell, _) in &targets {
        if array.is_filled(*cell) || !seen.insert(*cell) {
            return Err(ConstructError::Collision {
                cell: *cell,
                stage: stage.to_string(),
            });
        }
    }
    for (cell, value) in targets {
        array.insert(cell, value)?;
    }
    Ok(())
}

fn build_base(class: Class, n: usize, min_n: usize) -> Result<PartialArray, ConstructError> {
    if Class::of(n) != Some(class) {
        return Err(ConstructError::Class {
            n,
            class,
            reason: "wrong residue of n modulo 4",
        });
    }
    if n < min_n {
        return Err(ConstructError::Class {
            n,
            class,
            reason: "n is below the smallest size the base layout supports",
        });
    }
    let mut array = PartialArray::new(Dims::square(n, 5)?);
    let layout = base_layout(class, n);
    for (label, spec) in &layout.diagonals {
        place_labeled(&mut array, spec, &label.to_string())?;
    }
    for (cell, value) in layout.ad_hoc {
        if array.is_filled(cell) {
            return Err(ConstructError::Collision {
                cell,
                stage: "ad hoc".into(),
            });
        }
        array.insert(cell, value)?;
    }
    Ok(array)
}

/// Base `H(n;5)` for `n = 3 (mod 4)`, `n >= 7`.
pub fn build_base_h5_n3(n: usize) -> Result<PartialArray, ConstructError> {
    build_base(Class::N3, n, 7)
}

/// Base `H(n;5)` for `n = 0 (mod 4)`, `n >= 8`.
pub fn build_base_h5_n0(n: usize) -> Result<PartialArray, ConstructError> {
    build_base(Class::N0, n, 8)
}

fn augment(
    array: PartialArray,
    params: &ClassParams,
    class: Class,
) -> Result<PartialArray, ConstructError> {
    if params.class != class {
        return Err(ConstructError::Class {
            n: params.n,
            class,
            reason: "parameters belong to the other class",
        });
    }
    let dims = array.dims();
    if dims.n != params.n || dims.k != 5 || array.len() != 5 * params.n {
        return Err(ConstructError::Unsupported {
            n: params.n,
            k: params.k,
            reason: "augmentation expects the base H(n;5) of the same n",
        });
    }
    if params.k > params.n {
        return Err(ConstructError::Unsupported {
            n: params.n,
            k: params.k,
            reason: "k must not exceed n",
        });
    }
    // Re-home the base cells in an array sized for the final k.
    let mut out = PartialArray::new(Dims::square(params.n, params.k)?);
    for (cell, value) in array.iter() {
        out.insert(cell, value)?;
    }
    for i in 1..=params.t {
        for (label, spec) in augmentation_group(params, i) {
            place_labeled(&mut out, &spec, &format!("D{label} (group {i})"))?;
        }
    }
    Ok(out)
}

/// Adds `t` groups of diagonals `D_{1+2i}, D_{2+2i}, D_{h+2i}, D_{h+1+2i}` to
/// a base array of class `n = 3 (mod 4)`.
pub fn augment_n3(array: PartialArray, params: &ClassParams) -> Result<PartialArray, ConstructError> {
    augment(array, params, Class::N3)
}

/// Adds `t` groups of diagonals `D_{2+2i}, D_{3+2i}, D_{h+1+2i}, D_{h+2+2i}`
/// to a base array of class `n = 0 (mod 4)`.
pub fn augment_n0(array: PartialArray, params: &ClassParams) -> Result<PartialArray, ConstructError> {
    augment(array, params, Class::N0)
}

fn build(params: &ClassParams) -> Result<PartialArray, ConstructError> {
    match params.class {
        Class::N3 => augment_n3(build_base_h5_n3(params.n)?, params),
        Class::N0 => augment_n0(build_base_h5_n0(params.n)?, params),
    }
}

fn require_verified(array: &PartialArray) -> Result<(), ConstructError> {
    let report = verify::is_globally_simple(array);
    if report.all_ok() {
        Ok(())
    } else {
        let dims = array.dims();
        Err(ConstructError::Verification {
            n: dims.n,
            k: dims.k,
            detail: report.summary(),
        })
    }
}

/// Builds the globally simple integer `H(n;k)`.
///
/// Accepts `k = 5` (the bare base array) and `13 <= k < n` with
/// `k = 1 (mod 4)` and `n = 0, 3 (mod 4)`. Base arrays with `n < 13` are run
/// through full verification before being returned.
pub fn construct(n: usize, k: usize) -> Result<PartialArray, ConstructError> {
    let params = ClassParams::new(n, k)?;
    if k == 9 {
        return Err(ConstructError::Unsupported {
            n,
            k,
            reason: "k = 9 is outside the supported range (forced construction verifies it instead)",
        });
    }
    if k > 5 && k >= n {
        return Err(ConstructError::Unsupported {
            n,
            k,
            reason: "need n > k",
        });
    }
    let array = build(&params)?;
    if k == 5 && n < 13 {
        require_verified(&array)?;
    }
    Ok(array)
}

/// Like [`construct`] but also admits `k = 9`; the result is returned only if
/// it passes every check in [`verify::is_globally_simple`].
pub fn construct_forced(n: usize, k: usize) -> Result<PartialArray, ConstructError> {
    let params = ClassParams::new(n, k)?;
    if k > 5 && k >= n {
        return Err(ConstructError::Unsupported {
            n,
            k,
            reason: "need n > k",
        });
    }
    let array = build(&params)?;
    require_verified(&array)?;
    Ok(array)
}
