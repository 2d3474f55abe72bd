//! Cycle decompositions of `K_{2nk+1}` realized from the lines of a simple
//! Heffter array, and the compatibility test for row/column orderings.
//!
//! A line with entries `e_1..e_j` yields the base cycle with vertices
//! `0, e_1, e_1+e_2, ..., e_1+...+e_{j-1}` (mod `2nk+1`); translating every
//! base cycle by each group element develops the full decomposition.

use std::collections::HashMap;

use num_integer::gcd;
use serde::Serialize;
use thiserror::Error;

use crate::grid::{canonical_residue, Axis, Cell, PartialArray};
use crate::verify::is_simple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("{axis} {index} is not simple in its natural order")]
    NotSimple { axis: Axis, index: usize },
    #[error("cycle systems live on different vertex sets ({left} vs {right})")]
    ModulusMismatch { left: u64, right: u64 },
}

/// A set of cycles on the vertex set `Z_modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSystem {
    pub modulus: u64,
    pub base_cycles: Vec<Vec<u64>>,
    /// Full orbit under translation, if materialized.
    pub developed: Option<Vec<Vec<u64>>>,
}

impl CycleSystem {
    /// A system given directly by its cycles, treated as already developed.
    pub fn from_cycles(modulus: u64, cycles: Vec<Vec<u64>>) -> Self {
        Self {
            modulus,
            base_cycles: cycles.clone(),
            developed: Some(cycles),
        }
    }

    /// Translates of every base cycle, `g = 0..modulus`, without storing them.
    pub fn translates(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let m = self.modulus;
        (0..m).flat_map(move |g| {
            self.base_cycles
                .iter()
                .map(move |c| c.iter().map(|&v| (v + g) % m).collect())
        })
    }

    /// Materializes the orbit.
    pub fn develop(&self) -> CycleSystem {
        CycleSystem {
            modulus: self.modulus,
            base_cycles: self.base_cycles.clone(),
            developed: Some(self.translates().collect()),
        }
    }

    /// The developed cycles if stored, otherwise the streamed orbit.
    pub fn cycles(&self) -> Box<dyn Iterator<Item = Vec<u64>> + '_> {
        match &self.developed {
            Some(cycles) => Box::new(cycles.iter().cloned()),
            None => Box::new(self.translates()),
        }
    }

    pub fn cycle_count(&self) -> usize {
        match &self.developed {
            Some(c) => c.len(),
            None => self.base_cycles.len() * self.modulus as usize,
        }
    }

    /// Signed edge differences `v_{i+1} - v_i` around each base cycle,
    /// canonical in the symmetric residue range.
    pub fn edge_differences(&self) -> Vec<i64> {
        let m = self.modulus as i64;
        self.base_cycles
            .iter()
            .flat_map(|c| {
                (0..c.len()).map(move |i| {
                    let a = c[i] as i64;
                    let b = c[(i + 1) % c.len()] as i64;
                    canonical_residue(b - a, m)
                })
            })
            .collect()
    }

    /// Whether the base-cycle differences, together with their negatives,
    /// hit every nonzero residue exactly once.
    pub fn differences_cover_group(&self) -> bool {
        let m = self.modulus as usize;
        let mut hits = vec![0u32; m];
        for d in self.edge_differences() {
            hits[d.rem_euclid(m as i64) as usize] += 1;
            hits[(-d).rem_euclid(m as i64) as usize] += 1;
        }
        hits[0] == 0 && hits[1..].iter().all(|&h| h == 1)
    }
}

/// One base cycle per line of `array` along `axis`, realized by prefix sums.
pub fn base_cycles(array: &PartialArray, axis: Axis) -> Result<CycleSystem, DecomposeError> {
    let modulus = array.modulus();
    let mut cycles = Vec::with_capacity(array.line_count(axis));
    for index in 1..=array.line_count(axis) {
        let line = array.line(axis, index);
        if !is_simple(&line, modulus).ok {
            return Err(DecomposeError::NotSimple { axis, index });
        }
        let mut acc = 0i64;
        let mut vertices = Vec::with_capacity(line.len());
        for &e in &line {
            vertices.push(acc as u64);
            acc = (acc + e).rem_euclid(modulus);
        }
        cycles.push(vertices);
    }
    Ok(CycleSystem {
        modulus: modulus as u64,
        base_cycles: cycles,
        developed: None,
    })
}

/// Triangular index of the edge `{a, b}` of `K_m`, `a != b`.
fn edge_index(a: u64, b: u64, m: u64) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    (a * (2 * m - a - 1) / 2 + (b - a - 1)) as usize
}

fn edge_from_index(mut idx: u64, m: u64) -> (u64, u64) {
    for a in 0..m {
        let row = m - a - 1;
        if idx < row {
            return (a, a + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("edge index out of range")
}

fn cycle_edges(cycle: &[u64]) -> impl Iterator<Item = (u64, u64)> + '_ {
    (0..cycle.len()).map(move |i| (cycle[i], cycle[(i + 1) % cycle.len()]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeProblem {
    /// Cycle `cycle` repeats a vertex or has fewer than three vertices.
    NotACycle { cycle: usize },
    Doubled { a: u64, b: u64 },
    Missing { a: u64, b: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub ok: bool,
    pub cycles: usize,
    /// Edges counted with multiplicity.
    pub edges: u64,
    /// `|E(K_modulus)|`.
    pub expected_edges: u64,
    pub problem: Option<EdgeProblem>,
}

/// Checks that the cycles of `system` partition the edge set of
/// `K_modulus`; reports the first doubly-covered or, failing that, the first
/// missing edge.
pub fn verify_decomposition(system: &CycleSystem) -> DecompositionReport {
    let m = system.modulus;
    let expected_edges = m * (m - 1) / 2;
    let mut counts = vec![0u8; expected_edges as usize];
    let mut edges = 0u64;
    let mut problem = None;
    let mut cycles = 0usize;
    for (id, cycle) in system.cycles().enumerate() {
        cycles += 1;
        if problem.is_none() && !is_proper_cycle(&cycle) {
            problem = Some(EdgeProblem::NotACycle { cycle: id });
        }
        for (a, b) in cycle_edges(&cycle) {
            if a == b {
                continue;
            }
            edges += 1;
            let slot = &mut counts[edge_index(a, b, m)];
            *slot = slot.saturating_add(1);
            if *slot == 2 && problem.is_none() {
                problem = Some(EdgeProblem::Doubled { a: a.min(b), b: a.max(b) });
            }
        }
    }
    if problem.is_none() {
        if let Some(idx) = counts.iter().position(|&c| c == 0) {
            let (a, b) = edge_from_index(idx as u64, m);
            problem = Some(EdgeProblem::Missing { a, b });
        }
    }
    DecompositionReport {
        ok: problem.is_none(),
        cycles,
        edges,
        expected_edges,
        problem,
    }
}

fn is_proper_cycle(cycle: &[u64]) -> bool {
    if cycle.len() < 3 {
        return false;
    }
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub ok: bool,
    /// A (first-system cycle, second-system cycle) pair sharing two or more
    /// edges.
    pub witness: Option<(usize, usize)>,
}

/// Checks that every cycle of `first` meets every cycle of `second` in at
/// most one edge. Each edge is indexed to its cycle in `first`; each cycle of
/// `second` then looks for a repeated index among its edges.
pub fn check_orthogonality(
    first: &CycleSystem,
    second: &CycleSystem,
) -> Result<OrthogonalityReport, DecomposeError> {
    if first.modulus != second.modulus {
        return Err(DecomposeError::ModulusMismatch {
            left: first.modulus,
            right: second.modulus,
        });
    }
    let m = first.modulus;
    let mut owner = vec![u32::MAX; (m * (m - 1) / 2) as usize];
    for (id, cycle) in first.cycles().enumerate() {
        for (a, b) in cycle_edges(&cycle) {
            if a != b {
                owner[edge_index(a, b, m)] = id as u32;
            }
        }
    }
    let mut owners = Vec::new();
    for (id, cycle) in second.cycles().enumerate() {
        owners.clear();
        owners.extend(
            cycle_edges(&cycle)
                .filter(|(a, b)| a != b)
                .map(|(a, b)| owner[edge_index(a, b, m)])
                .filter(|&o| o != u32::MAX),
        );
        owners.sort_unstable();
        if let Some(w) = owners.windows(2).find(|w| w[0] == w[1]) {
            return Ok(OrthogonalityReport {
                ok: false,
                witness: Some((w[0] as usize, id)),
            });
        }
    }
    Ok(OrthogonalityReport {
        ok: true,
        witness: None,
    })
}

/// A permutation of `0..len` stored by images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    /// `None` unless `images` is a bijection on `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Self(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `sigma ∘ self ∘ sigma^-1`.
    pub fn conjugate(&self, sigma: &Permutation) -> Permutation {
        sigma.compose(self).compose(&sigma.inverse())
    }

    /// Cycle lengths, largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut lengths = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }
}

/// Cyclic row and column orderings as permutations on the filled cells.
/// Cell `i` is the `i`-th filled cell in `(row, col)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingPair {
    pub cells: Vec<Cell>,
    pub omega_r: Permutation,
    pub omega_c: Permutation,
}

/// Each filled cell maps to the next filled cell to its right (`omega_r`)
/// or below it (`omega_c`), wrapping around the line.
pub fn natural_orderings(array: &PartialArray) -> OrderingPair {
    let cells: Vec<Cell> = array.cells().collect();
    let index: HashMap<Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut omega_r = vec![0; cells.len()];
    let mut omega_c = vec![0; cells.len()];
    let dims = array.dims();
    for r in 1..=dims.m {
        let line: Vec<usize> = array.row(r).iter().map(|&(c, _)| index[&Cell::new(r, c)]).collect();
        for (i, &from) in line.iter().enumerate() {
            omega_r[from] = line[(i + 1) % line.len()];
        }
    }
    for c in 1..=dims.n {
        let line: Vec<usize> = array.column(c).iter().map(|&(r, _)| index[&Cell::new(r, c)]).collect();
        for (i, &from) in line.iter().enumerate() {
            omega_c[from] = line[(i + 1) % line.len()];
        }
    }
    OrderingPair {
        cells,
        omega_r: Permutation(omega_r),
        omega_c: Permutation(omega_c),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Compatibility {
    /// `omega_r ∘ omega_c` is a single cycle through all filled cells.
    pub compatible: bool,
    /// Cycle type of `omega_r ∘ omega_c` (apply `omega_c` first).
    pub cycle_type: Vec<usize>,
    /// Cycle type of `omega_c ∘ omega_r`, for reference.
    pub reverse_cycle_type: Vec<usize>,
}

pub fn check_compatible(pair: &OrderingPair) -> Compatibility {
    let total = pair.omega_r.len();
    let cycle_type = pair.omega_r.compose(&pair.omega_c).cycle_type();
    let reverse_cycle_type = pair.omega_c.compose(&pair.omega_r).cycle_type();
    Compatibility {
        compatible: total > 0 && cycle_type == [total],
        cycle_type,
        reverse_cycle_type,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Prediction {
    Yes,
    Unknown,
}

/// For odd `3 <= k < n` with the two-band diagonal layout, `gcd(n, k-2) = 1`
/// guarantees compatible orderings exist. Anything else is `Unknown`.
pub fn gcd_compat_predicate(n: usize, k: usize) -> Prediction {
    let premise = n % 2 == 1 && k % 2 == 1 && 3 <= k && k < n;
    if premise && gcd(n, k - 2) == 1 {
        Prediction::Yes
    } else {
        Prediction::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dims;

    #[test]
    fn edge_index_round_trips() {
        let m = 11;
        let mut idx = 0;
        for a in 0..m {
            for b in a + 1..m {
                assert_eq!(edge_index(a, b, m), idx);
                assert_eq!(edge_index(b, a, m), idx);
                assert_eq!(edge_from_index(idx as u64, m), (a, b));
                idx += 1;
            }
        }
    }

    #[test]
    fn one_base_cycle_develops_to_modulus_cycles() {
        let sys = CycleSystem {
            modulus: 7,
            base_cycles: vec![vec![0, 1, 3]],
            developed: None,
        };
        let dev = sys.develop();
        assert_eq!(dev.developed.as_ref().unwrap().len(), 7);
        // {1, 2, 3} is a perfect difference set mod 7: K_7 into triangles.
        let report = verify_decomposition(&dev);
        assert!(report.ok, "{report:?}");
        assert_eq!(report.edges, 21);
        assert!(sys.differences_cover_group());
    }

    #[test]
    fn duplicated_and_dropped_cycles_are_caught() {
        let dev = CycleSystem {
            modulus: 7,
            base_cycles: vec![vec![0, 1, 3]],
            developed: None,
        }
        .develop();
        let mut cycles = dev.developed.clone().unwrap();
        cycles.push(cycles[2].clone());
        let report = verify_decomposition(&CycleSystem::from_cycles(7, cycles.clone()));
        assert!(!report.ok);
        assert!(matches!(report.problem, Some(EdgeProblem::Doubled { .. })));

        cycles.truncate(6);
        let report = verify_decomposition(&CycleSystem::from_cycles(7, cycles));
        assert!(!report.ok);
        assert!(matches!(report.problem, Some(EdgeProblem::Missing { .. })));
        assert_eq!(report.edges, 18);
    }

    #[test]
    fn repeated_vertex_is_not_a_cycle() {
        let report = verify_decomposition(&CycleSystem::from_cycles(7, vec![vec![0, 1, 0, 2]]));
        assert_eq!(report.problem, Some(EdgeProblem::NotACycle { cycle: 0 }));
    }

    #[test]
    fn triangles_sharing_single_edges_are_orthogonal() {
        let a = CycleSystem::from_cycles(9, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let b = CycleSystem::from_cycles(9, vec![vec![0, 1, 6], vec![3, 4, 7], vec![2, 5, 8]]);
        assert!(check_orthogonality(&a, &b).unwrap().ok);
        let self_pair = check_orthogonality(&a, &a).unwrap();
        assert!(!self_pair.ok);
        assert_eq!(self_pair.witness, Some((0, 0)));
        let c = CycleSystem::from_cycles(11, vec![vec![0, 1, 2]]);
        assert!(check_orthogonality(&a, &c).is_err());
    }

    #[test]
    fn not_simple_line_is_rejected() {
        let mut a = PartialArray::new(Dims::square(8, 6).unwrap());
        for (c, v) in [-1, 5, 2, -7, -9, 10].iter().enumerate() {
            a.insert(Cell::new(1, c + 1), *v).unwrap();
        }
        assert_eq!(
            base_cycles(&a, Axis::Row),
            Err(DecomposeError::NotSimple {
                axis: Axis::Row,
                index: 1
            })
        );
    }

    #[test]
    fn row_successor_wraps() {
        let mut a = PartialArray::new(Dims::new(3, 9, 3, 1).unwrap());
        for c in [1, 5, 9] {
            a.set(Cell::new(1, c), c as i64).unwrap();
        }
        let pair = natural_orderings(&a);
        let pos = |c: usize| pair.cells.iter().position(|x| *x == Cell::new(1, c)).unwrap();
        assert_eq!(pair.omega_r.apply(pos(9)), pos(1));
        assert_eq!(pair.omega_r.apply(pos(1)), pos(5));
    }

    #[test]
    fn full_row_is_cyclic_shift() {
        let mut a = PartialArray::new(Dims::square(4, 4).unwrap());
        for r in 1..=4 {
            for c in 1..=4 {
                a.insert(Cell::new(r, c), (4 * (r - 1) + c) as i64).unwrap();
            }
        }
        let pair = natural_orderings(&a);
        for (i, cell) in pair.cells.iter().enumerate() {
            let next = pair.cells[pair.omega_r.apply(i)];
            assert_eq!(next.row, cell.row);
            assert_eq!(next.col, cell.col % 4 + 1);
        }
        assert_eq!(pair.omega_r.cycle_type(), vec![4; 4]);
    }

    #[test]
    fn identity_composed_with_long_cycle() {
        let n = 12;
        let shift = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        let pair = OrderingPair {
            cells: Vec::new(),
            omega_r: Permutation::identity(n),
            omega_c: shift,
        };
        let c = check_compatible(&pair);
        assert!(c.compatible);
        assert_eq!(c.cycle_type, vec![12]);
    }

    #[test]
    fn permutation_basics() {
        assert!(Permutation::from_images(vec![0, 0]).is_none());
        assert!(Permutation::from_images(vec![2, 0]).is_none());
        let p = Permutation::from_images(vec![1, 2, 0, 4, 3]).unwrap();
        assert_eq!(p.cycle_type(), vec![3, 2]);
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(5));
    }

    #[test]
    fn gcd_predicate() {
        assert_eq!(gcd_compat_predicate(19, 17), Prediction::Yes);
        assert_eq!(gcd_compat_predicate(15, 13), Prediction::Yes);
        assert_eq!(gcd_compat_predicate(27, 13), Prediction::Yes);
        // gcd(27, 9) = 9
        assert_eq!(gcd_compat_predicate(27, 11), Prediction::Unknown);
        assert_eq!(gcd_compat_predicate(20, 17), Prediction::Unknown);
    }
}
