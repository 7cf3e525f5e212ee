//! Named example fans.

use crate::fan::StackyFan;

pub const NAMES: &[&str] = &["P1", "P2", "P3", "P1xP1", "F1", "P112", "P1r2", "FLIP3", "BLP3"];

pub fn by_name(name: &str) -> Option<StackyFan> {
    Some(match name {
        "P1" => p1(),
        "P2" => p2(),
        "P3" => p3(),
        "P1xP1" => p1xp1(),
        "F1" => f1(),
        "P112" => p112(),
        "P1r2" => p1r2(),
        "FLIP3" => flip3(),
        "BLP3" => blp3(),
        _ => return None,
    })
}

pub fn all() -> Vec<(&'static str, StackyFan)> {
    NAMES
        .iter()
        .map(|n| (*n, by_name(n).expect("registered name")))
        .collect()
}

pub fn p1() -> StackyFan {
    StackyFan::with_unit_mult(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]])
}

pub fn p2() -> StackyFan {
    StackyFan::with_unit_mult(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![0, 2], vec![1, 2]],
    )
}

pub fn p3() -> StackyFan {
    StackyFan::with_unit_mult(
        3,
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    )
}

pub fn p1xp1() -> StackyFan {
    StackyFan::with_unit_mult(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

/// The Hirzebruch surface `F_1`, rays counterclockwise from `(0,-1)`; the
/// `(-1)`-curve is ray 2.
pub fn f1() -> StackyFan {
    StackyFan::with_unit_mult(
        2,
        vec![vec![0, -1], vec![1, 0], vec![0, 1], vec![-1, 1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

pub fn p112() -> StackyFan {
    StackyFan::with_unit_mult(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, -2]],
        vec![vec![0, 1], vec![0, 2], vec![1, 2]],
    )
}

/// `P^1` with multiplicities `(2, 1)`.
pub fn p1r2() -> StackyFan {
    StackyFan::new(1, vec![vec![1], vec![-1]], vec![2, 1], vec![vec![0], vec![1]])
}

/// A threefold with a small `K`-negative contraction: the wall `<v0, v1>`
/// carries the relation `v2 + 2 v3 - v0 - v1 = 0`.
pub fn flip3() -> StackyFan {
    StackyFan::with_unit_mult(
        3,
        vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![1, 1, -2],
            vec![0, 0, 1],
            vec![-1, -1, 0],
        ],
        vec![
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![1, 2, 4],
            vec![0, 2, 4],
            vec![1, 3, 4],
            vec![0, 3, 4],
        ],
    )
}

/// `P^3` blown up along the line `V(x_1) ∩ V(x_2)`; ray 0 is the
/// exceptional divisor.
pub fn blp3() -> StackyFan {
    StackyFan::with_unit_mult(
        3,
        vec![
            vec![1, 1, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![-1, -1, -1],
        ],
        vec![
            vec![0, 1, 3],
            vec![0, 2, 3],
            vec![0, 1, 4],
            vec![0, 2, 4],
            vec![2, 3, 4],
            vec![1, 3, 4],
        ],
    )
}
