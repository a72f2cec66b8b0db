//! The coordinate preorder: `i ⪯ j` when coordinate `j` carries at least as
//! much influence as `i`, with the monotone direction taken into account.

use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::error::{invariant, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Monotone,
    Antimonotone,
    /// Non-essential coordinate.
    Both,
    /// Not a threshold-function coordinate.
    Neither,
}

impl Monotonicity {
    fn allows(self, dir: Dir) -> bool {
        matches!(
            (self, dir),
            (Monotonicity::Both, _)
                | (Monotonicity::Monotone, Dir::Up)
                | (Monotonicity::Antimonotone, Dir::Down)
        )
    }

    fn directions(self) -> Vec<Dir> {
        [Dir::Up, Dir::Down]
            .into_iter()
            .filter(|&d| self.allows(d))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Up,
    Down,
}

pub fn monotonicity(f: &BooleanFunction, i: usize) -> Monotonicity {
    let b = 1usize << (i - 1);
    let (mut up, mut down) = (true, true);
    for x in (0..f.table().len()).filter(|x| x & b == 0) {
        let (lo, hi) = (f.value_at(x), f.value_at(x | b));
        up &= lo <= hi;
        down &= lo >= hi;
    }
    match (up, down) {
        (true, true) => Monotonicity::Both,
        (true, false) => Monotonicity::Monotone,
        (false, true) => Monotonicity::Antimonotone,
        (false, false) => Monotonicity::Neither,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinatePreorder {
    arity: usize,
    monotonicity: Vec<Monotonicity>,
    /// `leq[i][j]` for 0-based `i`, `j`.
    leq: Vec<Vec<bool>>,
}

/// Same-direction comparison: with `a_i = 1, a_j = 0`, `b_i = 0, b_j = 1` and
/// equal elsewhere, `f(a) <= f(b)` (monotone) or `f(a) >= f(b)` (antimonotone).
fn same_type_leq(f: &BooleanFunction, i: usize, j: usize, dir: Dir) -> bool {
    let (bi, bj) = (1usize << (i - 1), 1usize << (j - 1));
    (0..f.table().len())
        .filter(|x| x & (bi | bj) == 0)
        .all(|x| {
            let (fa, fb) = (f.value_at(x | bi), f.value_at(x | bj));
            match dir {
                Dir::Up => fa <= fb,
                Dir::Down => fa >= fb,
            }
        })
}

/// Mixed comparison: identify `i` and `j`; `i ⪯ j` iff the merged coordinate
/// moves in `j`'s direction.
fn mixed_leq(merged: Monotonicity, dir_j: Dir) -> bool {
    merged.allows(dir_j)
}

fn merged_monotonicity(f: &BooleanFunction, i: usize, j: usize) -> Monotonicity {
    let (g, _) = f.identify(i.min(j), i.max(j)).expect("valid pair");
    monotonicity(&g, i.min(j))
}

pub fn compute_preorder(f: &BooleanFunction) -> Result<CoordinatePreorder> {
    let n = f.arity();
    let mono: Vec<Monotonicity> = (1..=n).map(|i| monotonicity(f, i)).collect();
    if let Some(i) = mono.iter().position(|&m| m == Monotonicity::Neither) {
        return Err(Error::Parameter(format!(
            "coordinate {} is neither monotone nor antimonotone",
            i + 1
        )));
    }
    let mut leq = vec![vec![true; n]; n];
    for i in 1..=n {
        for j in (i + 1)..=n {
            let merged = merged_monotonicity(f, i, j);
            for (a, b) in [(i, j), (j, i)] {
                let mut verdicts = Vec::new();
                for da in mono[a - 1].directions() {
                    for db in mono[b - 1].directions() {
                        verdicts.push(if da == db {
                            same_type_leq(f, a, b, da)
                        } else {
                            mixed_leq(merged, db)
                        });
                    }
                }
                if verdicts.iter().any(|&v| v != verdicts[0]) {
                    return invariant(format!(
                        "preorder branches disagree on ({a}, {b}) for {}",
                        f.digest()
                    ));
                }
                leq[a - 1][b - 1] = verdicts[0];
            }
        }
    }
    let p = CoordinatePreorder {
        arity: n,
        monotonicity: mono,
        leq,
    };
    p.check()?;
    Ok(p)
}

impl CoordinatePreorder {
    fn check(&self) -> Result<()> {
        let n = self.arity;
        for i in 0..n {
            for j in 0..n {
                if !self.leq[i][j] && !self.leq[j][i] {
                    return invariant(format!("preorder not total on ({}, {})", i + 1, j + 1));
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return invariant(format!(
                            "preorder not transitive on ({}, {}, {})",
                            i + 1,
                            j + 1,
                            k + 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monotonicity(&self, i: usize) -> Monotonicity {
        self.monotonicity[i - 1]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i - 1][j - 1]
    }

    pub fn equiv(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) && self.leq(j, i)
    }

    pub fn strictly_less(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) && !self.leq(j, i)
    }

    /// Equivalence classes from the bottom up, each sorted ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.arity;
        let mut reps: Vec<usize> = Vec::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 1..=n {
            match reps.iter().position(|&r| self.equiv(r, i)) {
                Some(k) => classes[k].push(i),
                None => {
                    reps.push(i);
                    classes.push(vec![i]);
                }
            }
        }
        // below-count orders classes in a total preorder
        let rank = |c: &Vec<usize>| (1..=n).filter(|&k| self.strictly_less(k, c[0])).count();
        classes.sort_by_key(rank);
        classes
    }

    /// Coordinates from the top of the preorder down, ties by ascending index.
    pub fn descending(&self) -> Vec<usize> {
        self.classes().into_iter().rev().flatten().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threshold::{Form, LtfPresentation};

    fn table(w: &[i64], tn: i64, td: i64) -> BooleanFunction {
        LtfPresentation::from_ints(w, tn, td, Form::Weak)
            .truth_table()
            .unwrap()
    }

    #[test]
    fn monotonicity_examples() {
        let f = table(&[1, 2, -2], 0, 1);
        assert_eq!(monotonicity(&f, 3), Monotonicity::Antimonotone);
        assert_eq!(monotonicity(&f, 1), Monotonicity::Monotone);
        assert_eq!(monotonicity(&table(&[1, 1], 2, 1), 2), Monotonicity::Both);
        let xor = BooleanFunction::from_bits(2, 0b0110).unwrap();
        assert_eq!(monotonicity(&xor, 1), Monotonicity::Neither);
        assert!(compute_preorder(&xor).is_err());
    }

    #[test]
    fn preorder_examples() {
        for f in [table(&[1, 2, -2], 0, 1), table(&[2, 2, -2], 1, 1)] {
            let p = compute_preorder(&f).unwrap();
            assert_eq!(p.classes(), vec![vec![1, 2, 3]]);
        }
        let p = compute_preorder(&table(&[1, 3], 2, 1)).unwrap();
        assert!(p.strictly_less(1, 2));
        assert_eq!(p.descending(), vec![2, 1]);
        let p = compute_preorder(&table(&[1, 1, 1], 3, 2)).unwrap();
        assert_eq!(p.classes().len(), 1);
    }

    #[test]
    fn st_generator_layers() {
        let p = compute_preorder(&table(&[1, 2, -2, 4, -4, 8, -8], 0, 1)).unwrap();
        assert_eq!(p.classes(), vec![vec![1, 2, 3], vec![4, 5], vec![6, 7]]);
    }
}
