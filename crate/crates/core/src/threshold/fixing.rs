use num_traits::Signed;

use crate::boolean::BooleanFunction;
use crate::rational;
use crate::threshold::LtfPresentation;

/// Ordered pairs `(i, j)` with `f = 0` whenever `(x_i, x_j) = (0, 1)` and
/// `f = 1` whenever `(x_i, x_j) = (1, 0)`, in lexicographic order.
pub fn find_fixing_pairs(f: &BooleanFunction) -> Vec<(usize, usize)> {
    let n = f.arity();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j && is_fixing_pair(f, i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn is_fixing_pair(f: &BooleanFunction, i: usize, j: usize) -> bool {
    let (bi, bj) = (1usize << (i - 1), 1usize << (j - 1));
    (0..f.table().len())
        .filter(|x| x & (bi | bj) == 0)
        .all(|x| !f.value_at(x | bj) && f.value_at(x | bi))
}

pub fn first_fixing_pair(f: &BooleanFunction) -> Option<(usize, usize)> {
    let n = f.arity();
    (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && is_fixing_pair(f, i, j))
}

/// `max(|a_i|, |a_j|) > (1/4) * sum |a_k|`.
pub fn fixing_pair_bound_holds(p: &LtfPresentation, i: usize, j: usize) -> bool {
    let m = p.weight(i).abs().max(p.weight(j).abs());
    m > p.abs_sum() * rational::frac(1, 4)
}
