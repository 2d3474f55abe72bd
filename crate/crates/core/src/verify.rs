//! Predicates for the defining properties of a Heffter array and for global
//! simplicity, plus the shifted/reversed partial-sum tables used to audit the
//! constructions line by line.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::construct::Class;
use crate::grid::{canonical_residue, wrap_index, Axis, Cell, PartialArray};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("partial-sum convention for class {class} does not apply: {reason}")]
    Class { class: Class, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    /// Line sums must be exactly zero.
    Integer,
    /// Line sums must vanish modulo `2nk+1`.
    Modular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillCounts {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub ok: bool,
}

pub fn check_fill_counts(array: &PartialArray) -> FillCounts {
    let dims = array.dims();
    let mut rows = vec![0; dims.m];
    let mut cols = vec![0; dims.n];
    for cell in array.cells() {
        rows[cell.row - 1] += 1;
        cols[cell.col - 1] += 1;
    }
    let ok = rows.iter().all(|&c| c == dims.h) && cols.iter().all(|&c| c == dims.k);
    FillCounts { rows, cols, ok }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    pub ok: bool,
    /// Values of `1..=nk` whose absolute value never appears.
    pub missing: Vec<u64>,
    /// Absolute values appearing more than once (including as `x` and `-x`).
    pub duplicated: Vec<u64>,
}

pub fn check_support(array: &PartialArray) -> SupportReport {
    let nk = array.dims().cells() as u64;
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for (_, v) in array.iter() {
        *seen.entry(v.unsigned_abs()).or_default() += 1;
    }
    let missing: Vec<u64> = (1..=nk).filter(|x| !seen.contains_key(x)).collect();
    let duplicated: Vec<u64> = seen
        .iter()
        .filter(|(_, &count)| count > 1)
        .map(|(&x, _)| x)
        .collect();
    SupportReport {
        ok: missing.is_empty() && duplicated.is_empty(),
        missing,
        duplicated,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub mode: SumMode,
    pub ok: bool,
    /// Offending lines with their integer sums.
    pub failures: Vec<(Axis, usize, i64)>,
}

pub fn check_sums(array: &PartialArray, mode: SumMode) -> SumReport {
    let modulus = array.modulus();
    let mut failures = Vec::new();
    for axis in [Axis::Row, Axis::Column] {
        for index in 1..=array.line_count(axis) {
            let sum: i64 = array.line(axis, index).iter().sum();
            let zero = match mode {
                SumMode::Integer => sum == 0,
                SumMode::Modular => sum.rem_euclid(modulus) == 0,
            };
            if !zero {
                failures.push((axis, index, sum));
            }
        }
    }
    SumReport {
        mode,
        ok: failures.is_empty(),
        failures,
    }
}

/// Running sums `e_1, e_1+e_2, ...` reduced to symmetric residues.
pub fn partial_sums(entries: &[i64], modulus: i64) -> Vec<i64> {
    entries
        .iter()
        .scan(0i64, |acc, &e| {
            *acc = canonical_residue(*acc + e, modulus);
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Repeat {
    /// 0-based index of the partial sum that repeats an earlier one.
    pub position: usize,
    pub residue: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Simplicity {
    pub ok: bool,
    pub repeat: Option<Repeat>,
}

/// Whether the partial sums of `entries` are pairwise distinct modulo
/// `modulus`. Reports the first repeat.
pub fn is_simple(entries: &[i64], modulus: i64) -> Simplicity {
    let mut seen = HashSet::with_capacity(entries.len());
    for (position, residue) in partial_sums(entries, modulus).into_iter().enumerate() {
        if !seen.insert(residue) {
            return Simplicity {
                ok: false,
                repeat: Some(Repeat { position, residue }),
            };
        }
    }
    Simplicity {
        ok: true,
        repeat: None,
    }
}

/// Heffter conditions: fill counts, support and line sums under `mode`.
pub fn is_heffter(array: &PartialArray, mode: SumMode) -> bool {
    check_fill_counts(array).ok && check_support(array).ok && check_sums(array, mode).ok
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detail {
    FillCount { count: usize, expected: usize },
    MissingValue { value: u64 },
    DuplicatedValue { value: u64 },
    ModularSum { sum: i64 },
    IntegerSum { sum: i64 },
    RepeatedPartialSum { position: usize, residue: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// `None` for array-wide failures (support).
    pub axis: Option<Axis>,
    pub index: usize,
    pub detail: Detail,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axis {
            Some(axis) => write!(f, "{axis} {}: ", self.index)?,
            None => f.write_str("support: ")?,
        }
        match &self.detail {
            Detail::FillCount { count, expected } => {
                write!(f, "{count} filled cells, expected {expected}")
            }
            Detail::MissingValue { value } => write!(f, "missing value {value}"),
            Detail::DuplicatedValue { value } => write!(f, "value {value} used more than once"),
            Detail::ModularSum { sum } => write!(f, "sum {sum} is not 0 modulo 2nk+1"),
            Detail::IntegerSum { sum } => write!(f, "integer sum is {sum}"),
            Detail::RepeatedPartialSum { position, residue } => write!(
                f,
                "repeated partial sum {residue} (at position {})",
                position + 1
            ),
        }
    }
}

/// Outcome of the full battery of checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub fill_ok: bool,
    pub support_ok: bool,
    pub modular_sums_ok: bool,
    pub integer_sums_ok: bool,
    /// Every row (left to right) and column (top to bottom) is simple.
    pub lines_simple: bool,
    /// `lines_simple` on an array whose lines vanish modulo `2nk+1`.
    pub globally_simple: bool,
    pub witnesses: Vec<Witness>,
}

impl VerifyReport {
    pub fn is_heffter(&self) -> bool {
        self.fill_ok && self.support_ok && self.modular_sums_ok
    }

    pub fn all_ok(&self) -> bool {
        self.is_heffter() && self.integer_sums_ok && self.globally_simple
    }

    pub fn summary(&self) -> String {
        if self.witnesses.is_empty() {
            return "all checks passed".into();
        }
        let mut parts: Vec<String> = self.witnesses.iter().take(5).map(|w| w.to_string()).collect();
        if self.witnesses.len() > 5 {
            parts.push(format!("... {} more", self.witnesses.len() - 5));
        }
        parts.join("; ")
    }

    /// Witnesses restricted to one kind of failure.
    pub fn witnesses_where<'a>(
        &'a self,
        pred: impl Fn(&Detail) -> bool + 'a,
    ) -> impl Iterator<Item = &'a Witness> + 'a {
        self.witnesses.iter().filter(move |w| pred(&w.detail))
    }
}

/// Runs every check; simplicity uses the natural order of each line.
pub fn is_globally_simple(array: &PartialArray) -> VerifyReport {
    let dims = array.dims();
    let modulus = array.modulus();
    let mut witnesses = Vec::new();

    let fill = check_fill_counts(array);
    for (axis, counts, expected) in [(Axis::Row, &fill.rows, dims.h), (Axis::Column, &fill.cols, dims.k)] {
        for (i, &count) in counts.iter().enumerate() {
            if count != expected {
                witnesses.push(Witness {
                    axis: Some(axis),
                    index: i + 1,
                    detail: Detail::FillCount { count, expected },
                });
            }
        }
    }

    let support = check_support(array);
    witnesses.extend(support.missing.iter().map(|&value| Witness {
        axis: None,
        index: 0,
        detail: Detail::MissingValue { value },
    }));
    witnesses.extend(support.duplicated.iter().map(|&value| Witness {
        axis: None,
        index: 0,
        detail: Detail::DuplicatedValue { value },
    }));

    let modular = check_sums(array, SumMode::Modular);
    witnesses.extend(modular.failures.iter().map(|&(axis, index, sum)| Witness {
        axis: Some(axis),
        index,
        detail: Detail::ModularSum { sum },
    }));
    let integer = check_sums(array, SumMode::Integer);
    witnesses.extend(
        integer
            .failures
            .iter()
            .filter(|(axis, index, _)| !modular.failures.iter().any(|(a, i, _)| a == axis && i == index))
            .map(|&(axis, index, sum)| Witness {
                axis: Some(axis),
                index,
                detail: Detail::IntegerSum { sum },
            }),
    );

    let mut lines_simple = true;
    for axis in [Axis::Row, Axis::Column] {
        for index in 1..=array.line_count(axis) {
            let check = is_simple(&array.line(axis, index), modulus);
            if let Some(Repeat { position, residue }) = check.repeat {
                lines_simple = false;
                witnesses.push(Witness {
                    axis: Some(axis),
                    index,
                    detail: Detail::RepeatedPartialSum { position, residue },
                });
            }
        }
    }

    // Support witnesses (axis None) sort first; line witnesses by (axis, index).
    witnesses.sort_by_key(|w| (w.axis, w.index));

    VerifyReport {
        fill_ok: fill.ok,
        support_ok: support.ok,
        modular_sums_ok: modular.ok,
        integer_sums_ok: integer.ok,
        lines_simple,
        globally_simple: lines_simple && modular.ok,
        witnesses,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

/// Partial sums of one line read from a chosen start cell in a chosen
/// direction, wrapping around the line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumTrace {
    pub axis: Axis,
    pub index: usize,
    pub start: Cell,
    pub direction: Direction,
    /// Residues in `0..=2nk`.
    pub sums: Vec<i64>,
}

impl SumTrace {
    pub fn label(&self) -> String {
        match self.axis {
            Axis::Row => format!("Row {}", self.index),
            Axis::Column => format!("Col {}", self.index),
        }
    }
}

/// Walks line `index` from `start` in `direction`, collecting filled cells.
pub fn trace_line(
    array: &PartialArray,
    axis: Axis,
    index: usize,
    start: Cell,
    direction: Direction,
) -> SumTrace {
    let dims = array.dims();
    let len = match axis {
        Axis::Row => dims.n,
        Axis::Column => dims.m,
    };
    let step: i64 = match direction {
        Direction::Forward => 1,
        Direction::Reverse => -1,
    };
    let origin = match axis {
        Axis::Row => start.col,
        Axis::Column => start.row,
    } as i64;
    let modulus = array.modulus();
    let mut acc = 0i64;
    let mut sums = Vec::new();
    for j in 0..len as i64 {
        let pos = wrap_index(origin + j * step, len);
        let value = match axis {
            Axis::Row => array.get(index, pos),
            Axis::Column => array.get(pos, index),
        };
        if let Some(v) = value {
            acc = (acc + v).rem_euclid(modulus);
            sums.push(acc);
        }
    }
    SumTrace {
        axis,
        index,
        start,
        direction,
        sums,
    }
}

/// Partial-sum traces in the shifted/reversed convention used to tabulate the
/// constructions: columns run top to bottom from `(c+h+1, c)`; rows run right
/// to left from `(r, r+h-2)` (`n = 3 mod 4`) or `(r, r+h-1)` (`n = 0 mod 4`).
pub fn shifted_sum_table(
    array: &PartialArray,
    axis: Axis,
    class: Class,
) -> Result<Vec<SumTrace>, VerifyError> {
    let dims = array.dims();
    let err = |reason: String| VerifyError::Class { class, reason };
    if !dims.is_square() {
        return Err(err("array is not square".into()));
    }
    let n = dims.n;
    if Class::of(n) != Some(class) {
        return Err(err(format!("n = {n} has residue {} modulo 4", n % 4)));
    }
    let h = class.half(n) as i64;
    let mut traces = Vec::with_capacity(n);
    for index in 1..=n {
        let i = index as i64;
        let (start, direction) = match (axis, class) {
            (Axis::Column, _) => (Cell::wrapped(i + h + 1, i, n, n), Direction::Forward),
            (Axis::Row, Class::N3) => (Cell::wrapped(i, i + h - 2, n, n), Direction::Reverse),
            (Axis::Row, Class::N0) => (Cell::wrapped(i, i + h - 1, n, n), Direction::Reverse),
        };
        if !array.is_filled(start) {
            return Err(err(format!("start cell {start} of {axis} {index} is empty")));
        }
        traces.push(trace_line(array, axis, index, start, direction));
    }
    Ok(traces)
}

/// Occupancy of the broken diagonals `{(r, c) : c - r = d (mod n)}` of a
/// square array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandLayout {
    /// Filled-cell count of diagonal `d` for `d = 0..n`.
    pub per_diagonal: Vec<usize>,
    /// Lengths of maximal cyclic runs of occupied diagonals.
    pub occupied_runs: Vec<usize>,
    /// Lengths of maximal cyclic runs of empty diagonals.
    pub empty_runs: Vec<usize>,
}

impl BandLayout {
    pub fn occupied(&self) -> usize {
        self.per_diagonal.iter().filter(|&&c| c > 0).count()
    }

    /// Every occupied diagonal is completely filled.
    pub fn full_diagonals(&self) -> bool {
        let n = self.per_diagonal.len();
        self.per_diagonal.iter().all(|&c| c == 0 || c == n)
    }
}

pub fn diagonal_bands(array: &PartialArray) -> BandLayout {
    let n = array.dims().n;
    let mut per_diagonal = vec![0usize; n];
    for cell in array.cells() {
        per_diagonal[(cell.col + n - cell.row) % n] += 1;
    }
    let occupied: Vec<bool> = per_diagonal.iter().map(|&c| c > 0).collect();
    let mut occupied_runs = Vec::new();
    let mut empty_runs = Vec::new();
    if occupied.iter().all(|&o| o) {
        occupied_runs.push(n);
    } else if occupied.iter().all(|&o| !o) {
        empty_runs.push(n);
    } else {
        // Start scanning just after a boundary so no run is split.
        let start = (0..n)
            .find(|&d| occupied[d] != occupied[(d + n - 1) % n])
            .unwrap_or(0);
        let mut run = 0;
        let mut state = occupied[start];
        for j in 0..n {
            let d = (start + j) % n;
            if occupied[d] == state {
                run += 1;
            } else {
                if state {
                    occupied_runs.push(run);
                } else {
                    empty_runs.push(run);
                }
                state = occupied[d];
                run = 1;
            }
        }
        if state {
            occupied_runs.push(run);
        } else {
            empty_runs.push(run);
        }
    }
    BandLayout {
        per_diagonal,
        occupied_runs,
        empty_runs,
    }
}
