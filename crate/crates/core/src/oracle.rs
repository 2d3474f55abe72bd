//! Exhaustive search, kept deliberately naive so it can cross-check the
//! validators: tiny Heffter arrays by backtracking over cells, and simple
//! orderings of a single line by backtracking over permutations.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::grid::{canonical_residue, Cell, Dims, GridError, PartialArray};
use crate::verify::{is_heffter, is_simple, SumMode};

pub const MAX_ORDERING_ENTRIES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("node budget exhausted after {nodes} nodes ({} partial results)", partial.len())]
    BudgetExceeded { partial: Vec<PartialArray>, nodes: u64 },
    #[error("ordering budget exhausted after {nodes} nodes")]
    OrderingBudgetExceeded { nodes: u64 },
    #[error("{len} entries exceeds the factorial-search limit of {MAX_ORDERING_ENTRIES}")]
    TooManyEntries { len: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub m: usize,
    pub n: usize,
    pub h: usize,
    pub k: usize,
    /// Exactly these cells are filled, if given.
    pub cell_pattern: Option<BTreeSet<Cell>>,
    /// Stop after this many solutions.
    pub limit: Option<usize>,
    /// Maximum number of search nodes.
    pub budget: u64,
}

impl SearchSpec {
    pub fn new(m: usize, n: usize, h: usize, k: usize) -> Self {
        Self {
            m,
            n,
            h,
            k,
            cell_pattern: None,
            limit: None,
            budget: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub solutions: Vec<PartialArray>,
    pub nodes: u64,
}

struct Search<'a> {
    spec: &'a SearchSpec,
    dims: Dims,
    modulus: i64,
    nk: i64,
    array: PartialArray,
    row_fill: Vec<usize>,
    col_fill: Vec<usize>,
    row_sum: Vec<i64>,
    col_sum: Vec<i64>,
    used: Vec<bool>,
    solutions: Vec<PartialArray>,
    nodes: u64,
}

enum Flow {
    Continue,
    Stop,
}

impl Search<'_> {
    fn allowed_empty(&self, r: usize, c: usize) -> bool {
        match &self.spec.cell_pattern {
            Some(p) => !p.contains(&Cell::new(r, c)),
            None => {
                self.row_fill[r] + (self.dims.n - c) >= self.dims.h
                    && self.col_fill[c] + (self.dims.m - r) >= self.dims.k
            }
        }
    }

    fn allowed_filled(&self, r: usize, c: usize) -> bool {
        let room = self.row_fill[r] < self.dims.h && self.col_fill[c] < self.dims.k;
        match &self.spec.cell_pattern {
            Some(p) => room && p.contains(&Cell::new(r, c)),
            None => room,
        }
    }

    /// Candidate values for `(r, c)` in increasing order. A cell that
    /// completes its row or column has its value forced by the line sum.
    fn candidates(&self, r: usize, c: usize) -> Vec<i64> {
        let forced = |sum: i64| canonical_residue(-sum, self.modulus);
        let by_row = (self.row_fill[r] + 1 == self.dims.h).then(|| forced(self.row_sum[r]));
        let by_col = (self.col_fill[c] + 1 == self.dims.k).then(|| forced(self.col_sum[c]));
        let pool: Vec<i64> = match (by_row, by_col) {
            (Some(a), Some(b)) if a != b => return Vec::new(),
            (Some(v), _) | (None, Some(v)) => vec![v],
            (None, None) => (-self.nk..=self.nk).collect(),
        };
        pool.into_iter()
            .filter(|&v| v != 0 && v.abs() <= self.nk && !self.used[v.unsigned_abs() as usize])
            .collect()
    }

    fn place(&mut self, r: usize, c: usize, v: i64, sign: i64) {
        self.row_fill[r] = (self.row_fill[r] as i64 + sign) as usize;
        self.col_fill[c] = (self.col_fill[c] as i64 + sign) as usize;
        self.row_sum[r] += sign * v;
        self.col_sum[c] += sign * v;
        self.used[v.unsigned_abs() as usize] = sign > 0;
        let cell = Cell::new(r, c);
        if sign > 0 {
            self.array.insert(cell, v).expect("candidate values are valid");
        } else {
            self.array.remove(cell);
        }
    }

    fn dfs(&mut self, idx: usize) -> Result<Flow, ()> {
        self.nodes += 1;
        if self.nodes > self.spec.budget {
            return Err(());
        }
        let (m, n) = (self.dims.m, self.dims.n);
        if idx == m * n {
            let filled = self.row_fill[1..].iter().all(|&f| f == self.dims.h)
                && self.col_fill[1..].iter().all(|&f| f == self.dims.k);
            if filled {
                self.solutions.push(self.array.clone());
                if self.spec.limit.is_some_and(|l| self.solutions.len() >= l) {
                    return Ok(Flow::Stop);
                }
            }
            return Ok(Flow::Continue);
        }
        let (r, c) = (idx / n + 1, idx % n + 1);
        if self.allowed_filled(r, c) {
            for v in self.candidates(r, c) {
                self.place(r, c, v, 1);
                let flow = self.dfs(idx + 1);
                self.place(r, c, v, -1);
                if !matches!(flow?, Flow::Continue) {
                    return Ok(Flow::Stop);
                }
            }
        }
        if self.allowed_empty(r, c) {
            return self.dfs(idx + 1);
        }
        Ok(Flow::Continue)
    }
}

/// Enumerates every `H(m,n;h,k)` with zero line sums modulo `2nk+1`.
///
/// Cells are visited row-major; at each cell the candidate values are tried
/// in increasing order and leaving the cell empty is tried last, so solutions
/// come out in a fixed lexicographic order.
pub fn brute_force_heffter(spec: &SearchSpec) -> Result<SearchOutcome, OracleError> {
    let dims = Dims::new(spec.m, spec.n, spec.h, spec.k)?;
    let nk = (spec.n * spec.k) as i64;
    let mut search = Search {
        spec,
        dims,
        modulus: dims.modulus(),
        nk,
        array: PartialArray::new(dims),
        row_fill: vec![0; spec.m + 1],
        col_fill: vec![0; spec.n + 1],
        row_sum: vec![0; spec.m + 1],
        col_sum: vec![0; spec.n + 1],
        used: vec![false; nk as usize + 1],
        solutions: Vec::new(),
        nodes: 0,
    };
    match search.dfs(0) {
        Ok(_) => {
            debug_assert!(search
                .solutions
                .iter()
                .all(|s| is_heffter(s, SumMode::Modular)));
            Ok(SearchOutcome {
                solutions: search.solutions,
                nodes: search.nodes,
            })
        }
        Err(()) => Err(OracleError::BudgetExceeded {
            partial: search.solutions,
            nodes: search.nodes,
        }),
    }
}

/// Finds an ordering of `entries` whose partial sums are distinct modulo
/// `modulus`. The given order is tried first and returned unchanged if it
/// already works; otherwise permutations are searched depth-first, pruning
/// as soon as a partial sum repeats.
pub fn find_simple_ordering(
    entries: &[i64],
    modulus: i64,
    budget: u64,
) -> Result<Option<Vec<i64>>, OracleError> {
    if entries.len() > MAX_ORDERING_ENTRIES {
        return Err(OracleError::TooManyEntries { len: entries.len() });
    }
    if is_simple(entries, modulus).ok {
        return Ok(Some(entries.to_vec()));
    }
    let mut sorted = entries.to_vec();
    sorted.sort_unstable();
    let mut state = OrderingSearch {
        entries: sorted,
        modulus,
        budget,
        nodes: 0,
        taken: vec![false; entries.len()],
        order: Vec::with_capacity(entries.len()),
        seen: HashSet::new(),
    };
    match state.dfs(0) {
        Ok(true) => Ok(Some(state.order)),
        Ok(false) => Ok(None),
        Err(()) => Err(OracleError::OrderingBudgetExceeded { nodes: state.nodes }),
    }
}

struct OrderingSearch {
    entries: Vec<i64>,
    modulus: i64,
    budget: u64,
    nodes: u64,
    taken: Vec<bool>,
    order: Vec<i64>,
    seen: HashSet<i64>,
}

impl OrderingSearch {
    fn dfs(&mut self, acc: i64) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if self.order.len() == self.entries.len() {
            return Ok(true);
        }
        let mut last_tried = None;
        for i in 0..self.entries.len() {
            let e = self.entries[i];
            // Equal values give equivalent subtrees.
            if self.taken[i] || last_tried == Some(e) {
                continue;
            }
            last_tried = Some(e);
            let next = (acc + e).rem_euclid(self.modulus);
            if !self.seen.insert(next) {
                continue;
            }
            self.taken[i] = true;
            self.order.push(e);
            if self.dfs(next)? {
                return Ok(true);
            }
            self.order.pop();
            self.taken[i] = false;
            self.seen.remove(&next);
        }
        Ok(false)
    }
}
