use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::rational::{serde_str, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConstraint {
    #[serde(with = "serde_str::vec")]
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    #[serde(with = "serde_str")]
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.relation {
            Relation::Le => lhs <= self.bound,
            Relation::Eq => lhs == self.bound,
            Relation::Ge => lhs >= self.bound,
        }
    }
}

/// Linear constraints over nonnegative variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalLP {
    pub variables: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl RationalLP {
    pub fn new(variables: usize) -> Self {
        RationalLP {
            variables,
            constraints: Vec::new(),
        }
    }

    /// Adds `sum coeff * x_v relation bound` from sparse `(v, coeff)` terms, `v` 0-based.
    pub fn add(
        &mut self,
        terms: &[(usize, Rational)],
        relation: Relation,
        bound: Rational,
    ) -> Result<()> {
        let mut coeffs = vec![Rational::zero(); self.variables];
        for (v, a) in terms {
            if *v >= self.variables {
                return param(format!("variable {v} outside the LP"));
            }
            coeffs[*v] += a;
        }
        self.constraints.push(LinearConstraint {
            coeffs,
            relation,
            bound,
        });
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match self
            .constraints
            .iter()
            .position(|c| c.coeffs.len() != self.variables)
        {
            Some(k) => param(format!(
                "constraint {k} has {} coefficients",
                self.constraints[k].coeffs.len()
            )),
            None => Ok(()),
        }
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variables
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPSolution {
    pub status: LpStatus,
    #[serde(with = "serde_str::vec")]
    pub assignment: Vec<Rational>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs of the phase-one objective
    cost: Vec<Rational>,
    value: Rational,
    artificial_from: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut().filter(|v| !v.is_zero()) {
                *v /= &p;
            }
            self.rhs[r] /= &p;
        }
        let nz: Vec<usize> = (0..self.rows[r].len())
            .filter(|&k| !self.rows[r][k].is_zero())
            .collect();
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &k in &nz {
                let d = &f * &prow[k];
                self.rows[i][k] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for &k in &nz {
                let d = &f * &prow[k];
                self.cost[k] -= d;
            }
            self.value += &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest entering column, lowest leaving basic variable on ties.
    fn run(&mut self) {
        loop {
            let Some(c) = (0..self.artificial_from).find(|&k| self.cost[k].is_negative()) else {
                return;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((q, _, b)) => ratio < *q || (ratio == *q && self.basis[i] < *b),
                };
                if better {
                    best = Some((ratio, i, self.basis[i]));
                }
            }
            // the phase-one objective is bounded below, so some row always qualifies
            let (_, r, _) = best.expect("bounded phase-one problem");
            self.pivot(r, c);
        }
    }
}

/// Exact phase-one simplex. Returns some feasible point, or `Infeasible`.
pub fn solve_lp(lp: &RationalLP) -> LPSolution {
    let n = lp.variables;
    let m = lp.constraints.len();
    let slacks: Vec<Option<usize>> = {
        let mut next = n;
        lp.constraints
            .iter()
            .map(|c| match c.relation {
                Relation::Eq => None,
                _ => {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let artificial_from = n + slacks.iter().flatten().count();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut needs_artificial = Vec::new();
    for (k, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); artificial_from];
        row[..n].clone_from_slice(&c.coeffs);
        if let Some(s) = slacks[k] {
            row[s] = if c.relation == Relation::Le {
                Rational::one()
            } else {
                -Rational::one()
            };
        }
        let mut b = c.bound.clone();
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        match slacks[k] {
            Some(s) if row[s].is_one() => basis.push(s),
            _ => {
                basis.push(usize::MAX);
                needs_artificial.push(k);
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    let width = artificial_from + needs_artificial.len();
    for row in rows.iter_mut() {
        row.resize(width, Rational::zero());
    }
    let mut cost = vec![Rational::zero(); width];
    let mut value = Rational::zero();
    for (t, &k) in needs_artificial.iter().enumerate() {
        rows[k][artificial_from + t] = Rational::one();
        basis[k] = artificial_from + t;
        for (c, v) in rows[k][..artificial_from].iter().enumerate() {
            if !v.is_zero() {
                cost[c] -= v;
            }
        }
        value += &rhs[k];
    }
    let mut tab = Tableau {
        rows,
        rhs,
        basis,
        cost,
        value,
        artificial_from,
    };
    tab.run();
    if tab.value.is_positive() {
        return LPSolution {
            status: LpStatus::Infeasible,
            assignment: Vec::new(),
        };
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[i].clone();
        }
    }
    assert!(
        lp.is_satisfied_by(&x),
        "simplex produced a point violating the LP"
    );
    LPSolution {
        status: LpStatus::Feasible,
        assignment: x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn trivial_hull() {
        // x = a0 * 0 + a1 * 1, a0 + a1 = 1, x <= 1
        let mut lp = RationalLP::new(3);
        lp.add(&[(0, int(1))], Relation::Le, int(1)).unwrap();
        lp.add(&[(1, int(1)), (2, int(1))], Relation::Eq, int(1))
            .unwrap();
        lp.add(&[(0, int(1)), (2, int(-1))], Relation::Eq, int(0))
            .unwrap();
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Feasible);
        assert!(lp.is_satisfied_by(&s.assignment));
    }

    #[test]
    fn contradiction() {
        let mut lp = RationalLP::new(1);
        lp.add(&[(0, int(1))], Relation::Le, int(0)).unwrap();
        lp.add(&[(0, int(1))], Relation::Ge, int(1)).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn negative_bounds_and_fractions() {
        // -x - y <= -3/2, x <= 1, y <= 1, x - y = 1/4
        let mut lp = RationalLP::new(2);
        lp.add(&[(0, int(-1)), (1, int(-1))], Relation::Le, frac(-3, 2))
            .unwrap();
        lp.add(&[(0, int(1))], Relation::Le, int(1)).unwrap();
        lp.add(&[(1, int(1))], Relation::Le, int(1)).unwrap();
        lp.add(&[(0, int(1)), (1, int(-1))], Relation::Eq, frac(1, 4))
            .unwrap();
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Feasible);
        assert!(lp.is_satisfied_by(&s.assignment));
        lp.add(&[(1, int(1))], Relation::Le, frac(1, 2)).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn empty_program() {
        let s = solve_lp(&RationalLP::new(2));
        assert_eq!(s.assignment, vec![int(0), int(0)]);
        let mut lp = RationalLP::new(0);
        lp.add(&[], Relation::Eq, int(1)).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }
}
