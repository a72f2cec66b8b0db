//! WP: minors of `(1/3, 1/(3m) x 2m | 1/2)`.

use num_traits::Signed;

use crate::error::{check_capacity, param, Result};
use crate::minor::{AllMaps, MinorMap};
use crate::rational::{frac, Rational};
use crate::threshold::LtfPresentation;

pub const DEFAULT_SEARCH_CAP: u128 = 50_000_000;

pub fn wp_generator(m: usize) -> Result<LtfPresentation> {
    if m == 0 {
        return param("WP generator needs m >= 1");
    }
    let mut w = vec![frac(1, 3)];
    w.extend(vec![frac(1, 3 * m as i64); 2 * m]);
    LtfPresentation::weak(w, frac(1, 2))
}

/// First map `[n] -> [k]` (lexicographic) whose minor is symmetric.
pub fn symmetric_minor_search(
    p: &LtfPresentation,
    k: usize,
    cap: u128,
) -> Result<Option<MinorMap>> {
    let n = p.arity();
    if k == 0 || k > n {
        return param(format!("target arity {k} must be in [1, {n}]"));
    }
    let space = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    check_capacity("symmetric minor search space", space, cap)?;
    let f = p.truth_table()?;
    let table = f.table();
    // the minor is symmetric iff its value depends only on the popcount of the input
    let mut by_weight: Vec<Option<bool>> = vec![None; k + 1];
    'maps: for pi in AllMaps::new(n, k) {
        by_weight.iter_mut().for_each(|v| *v = None);
        let shifts = pi.as_slice();
        for y in 0..1usize << k {
            let idx = shifts
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &s)| acc | (((y >> (s - 1)) & 1) << j));
            let v = table[idx];
            let slot = &mut by_weight[y.count_ones() as usize];
            match *slot {
                Some(w) if w != v => continue 'maps,
                _ => *slot = Some(v),
            }
        }
        return Ok(Some(pi));
    }
    Ok(None)
}

/// `max |a_i| > bound * sum |a_i|`.
pub fn heavy_coordinate_bound(p: &LtfPresentation, bound: &Rational) -> bool {
    let top = p.weights().iter().map(|w| w.abs()).max().expect("nonempty");
    top > bound * p.abs_sum()
}
