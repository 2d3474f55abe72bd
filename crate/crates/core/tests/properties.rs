use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use proptest::prelude::*;

use heffter::construct::{construct, Class};
use heffter::decompose::{
    base_cycles, check_compatible, check_orthogonality, natural_orderings, verify_decomposition,
    OrderingPair, Permutation,
};
use heffter::grid::{Axis, Cell, Dims, PartialArray};
use heffter::io;
use heffter::oracle::{brute_force_heffter, SearchSpec};
use heffter::verify::{diagonal_bands, is_globally_simple, is_heffter, is_simple, SumMode};

/// Supported `(n, k)` with `n < 40` and `k >= 13`.
fn sizes() -> Vec<(usize, usize)> {
    (15..40)
        .filter(|n| Class::of(*n).is_some())
        .flat_map(|n| (13..n).step_by(4).map(move |k| (n, k)))
        .collect()
}

fn arb_size() -> impl Strategy<Value = (usize, usize)> {
    proptest::sample::select(sizes())
}

fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn all_3x3() -> &'static Vec<PartialArray> {
    static CELL: OnceLock<Vec<PartialArray>> = OnceLock::new();
    CELL.get_or_init(|| brute_force_heffter(&SearchSpec::new(3, 3, 3, 3)).unwrap().solutions)
}

#[test]
fn small_sweep_is_globally_simple() {
    for (n, k) in sizes() {
        let array = construct(n, k).unwrap();
        let report = is_globally_simple(&array);
        assert!(report.all_ok(), "H({n};{k}): {}", report.summary());
    }
}

#[test]
fn base_arrays_are_globally_simple() {
    for n in (7..60).filter(|n| Class::of(*n).is_some()) {
        let array = construct(n, 5).unwrap();
        assert_eq!(array.len(), 5 * n);
        assert!(is_globally_simple(&array).all_ok(), "H({n};5)");
    }
}

#[test]
fn odd_class_has_two_balanced_bands() {
    for (n, k) in sizes().into_iter().filter(|(n, _)| n % 2 == 1) {
        let b = diagonal_bands(&construct(n, k).unwrap());
        assert_eq!(b.occupied(), k);
        assert!(b.full_diagonals());
        assert_eq!(b.occupied_runs.len(), 2, "H({n};{k})");
        assert_eq!(b.empty_runs, vec![(n - k) / 2; 2], "H({n};{k})");
    }
}

#[test]
fn even_class_occupies_k_full_diagonals() {
    for (n, k) in sizes().into_iter().filter(|(n, _)| n % 2 == 0) {
        let b = diagonal_bands(&construct(n, k).unwrap());
        assert_eq!(b.occupied(), k);
        assert!(b.full_diagonals());
        assert_eq!(b.empty_runs.iter().sum::<usize>(), n - k);
    }
}

#[test]
fn small_decompositions_are_orthogonal() {
    for (n, k) in [(7, 5), (8, 5), (11, 5), (12, 5), (15, 13), (16, 13)] {
        let array = construct(n, k).unwrap();
        let rows = base_cycles(&array, Axis::Row).unwrap();
        let cols = base_cycles(&array, Axis::Column).unwrap();
        assert!(rows.differences_cover_group());
        assert!(cols.differences_cover_group());
        assert!(verify_decomposition(&rows).ok);
        assert!(verify_decomposition(&cols.develop()).ok);
        assert!(check_orthogonality(&rows, &cols).unwrap().ok, "H({n};{k})");
    }
}

/// Follows column-then-row successors cell by cell, without the
/// permutation type.
fn orbit_lengths(array: &PartialArray) -> Vec<usize> {
    let d = array.dims();
    let below = |c: Cell| {
        (1..=d.m)
            .map(|s| Cell::new((c.row - 1 + s) % d.m + 1, c.col))
            .find(|x| array.is_filled(*x))
            .unwrap()
    };
    let right = |c: Cell| {
        (1..=d.n)
            .map(|s| Cell::new(c.row, (c.col - 1 + s) % d.n + 1))
            .find(|x| array.is_filled(*x))
            .unwrap()
    };
    let mut seen = HashSet::new();
    let mut lengths = Vec::new();
    for start in array.cells() {
        let mut len = 0;
        let mut x = start;
        while seen.insert(x) {
            x = right(below(x));
            len += 1;
        }
        if len > 0 {
            lengths.push(len);
        }
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

#[test]
fn compatibility_cycle_type_matches_direct_walk() {
    for (n, k) in [(19, 17), (20, 17), (15, 13), (7, 5), (8, 5)] {
        let array = construct(n, k).unwrap();
        let c = check_compatible(&natural_orderings(&array));
        assert_eq!(c.cycle_type, orbit_lengths(&array), "H({n};{k})");
        assert_eq!(c.cycle_type.iter().sum::<usize>(), n * k);
    }
    let even = check_compatible(&natural_orderings(&construct(20, 17).unwrap()));
    assert!(!even.compatible);
}

#[test]
fn oracle_solutions_all_verify() {
    let all = all_3x3();
    assert!(!all.is_empty());
    for s in all {
        assert!(is_heffter(s, SumMode::Modular));
    }
}

fn permuted(array: &PartialArray, rows: &[usize], cols: &[usize], negate: bool) -> PartialArray {
    let mut out = PartialArray::new(array.dims());
    for (cell, v) in array.iter() {
        let target = Cell::new(rows[cell.row - 1] + 1, cols[cell.col - 1] + 1);
        out.insert(target, if negate { -v } else { v }).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplicity_survives_rotation_and_reversal(
        (n, k) in arb_size(),
        column in any::<bool>(),
        index in any::<prop::sample::Index>(),
        shift in any::<prop::sample::Index>(),
    ) {
        let array = construct(n, k).unwrap();
        let axis = if column { Axis::Column } else { Axis::Row };
        let mut line = array.line(axis, index.index(n) + 1);
        let modulus = array.modulus();
        prop_assert!(is_simple(&line, modulus).ok);
        let len = line.len();
        line.rotate_left(shift.index(len));
        prop_assert!(is_simple(&line, modulus).ok);
        line.reverse();
        prop_assert!(is_simple(&line, modulus).ok);
    }

    #[test]
    fn broken_lines_stay_broken_under_rotation(
        shift in 0usize..6,
        reverse in any::<bool>(),
    ) {
        let mut line = vec![-1, 5, 2, -7, -9, 10];
        line.rotate_left(shift);
        if reverse {
            line.reverse();
        }
        prop_assert!(!is_simple(&line, 97).ok);
    }

    #[test]
    fn cycle_type_is_conjugation_invariant(
        r in arb_perm(24),
        c in arb_perm(24),
        s in arb_perm(24),
    ) {
        let pair = OrderingPair { cells: Vec::new(), omega_r: r.clone(), omega_c: c.clone() };
        let conj = OrderingPair { cells: Vec::new(), omega_r: r.conjugate(&s), omega_c: c.conjugate(&s) };
        let a = check_compatible(&pair);
        let b = check_compatible(&conj);
        prop_assert_eq!(&a.cycle_type, &b.cycle_type);
        prop_assert_eq!(&a.reverse_cycle_type, &b.reverse_cycle_type);
        // r∘c and c∘r are conjugate by c.
        prop_assert_eq!(a.cycle_type, a.reverse_cycle_type);
    }

    #[test]
    fn constructed_arrays_round_trip((n, k) in arb_size()) {
        let array = construct(n, k).unwrap();
        prop_assert_eq!(&io::from_json(&io::to_json(&array)).unwrap(), &array);
        prop_assert_eq!(&io::from_csv(&io::to_csv(&array)).unwrap(), &array);
    }

    #[test]
    fn sparse_arrays_round_trip(
        entries in prop::collection::btree_map((1usize..=6, 1usize..=6), 1i64..=24, 0..20),
        signs in prop::collection::vec(any::<bool>(), 20),
    ) {
        // Cells and values are placed freely; only JSON keeps arbitrary shapes.
        let dims = Dims::square(6, 4).unwrap();
        let mut array = PartialArray::new(dims);
        let mut used = BTreeSet::new();
        for (i, ((r, c), v)) in entries.into_iter().enumerate() {
            if used.insert(v) {
                array.insert(Cell::new(r, c), if signs[i] { v } else { -v }).unwrap();
            }
        }
        prop_assert_eq!(io::from_json(&io::to_json(&array)).unwrap(), array);
    }

    #[test]
    fn heffter_3x3_images_are_enumerated(
        pick in any::<prop::sample::Index>(),
        rows in arb_perm(3),
        cols in arb_perm(3),
        negate in any::<bool>(),
    ) {
        let all = all_3x3();
        let source = &all[pick.index(all.len())];
        let image = permuted(source, rows.images(), cols.images(), negate);
        prop_assert!(is_heffter(&image, SumMode::Modular));
        prop_assert!(all.contains(&image));
    }
}
