use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::blp::lp::{solve_lp, LpStatus, RationalLP, Relation};
use crate::boolean::{is_homomorphism, BooleanStructure, Instance};
use crate::error::{Error, Result};
use crate::rational::{int, serde_str, Rational};

/// Variables `x_1..x_n` come first (0-based positions `0..n`), then, per
/// constraint in order, one weight per tuple of its relation. Rows: `x_v <= 1`
/// for every variable, then per constraint `sum alpha = 1` followed by one
/// coupling equality per scope position. A constraint over an empty relation
/// yields the unsatisfiable row `0 = 1`.
pub fn build_blp(inst: &Instance, a: &BooleanStructure) -> Result<RationalLP> {
    inst.check_signature(a)?;
    let n = inst.variable_count();
    let weights: usize = inst
        .constraints()
        .iter()
        .map(|c| a.relations[c.relation].len())
        .sum();
    let mut lp = RationalLP::new(n + weights);
    for v in 0..n {
        lp.add(&[(v, int(1))], Relation::Le, int(1))?;
    }
    let mut next = n;
    for c in inst.constraints() {
        let rel = &a.relations[c.relation];
        let alphas: Vec<usize> = (next..next + rel.len()).collect();
        next += rel.len();
        let sum: Vec<(usize, Rational)> = alphas.iter().map(|&k| (k, int(1))).collect();
        lp.add(&sum, Relation::Eq, int(1))?;
        for (pos, &v) in c.scope.iter().enumerate() {
            let mut terms = vec![(v - 1, int(1))];
            for (t, &k) in rel.tuples().iter().zip(&alphas) {
                if t[pos] == 1 {
                    terms.push((k, int(-1)));
                }
            }
            lp.add(&terms, Relation::Eq, int(0))?;
        }
    }
    Ok(lp)
}

/// The full outcome of [`round_search_detailed`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rounding {
    /// values of `x_1..x_n` in the relaxation solution
    #[serde(with = "serde_str::vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serde_str")]
    pub threshold: Rational,
    /// `h(v) = 1` iff `x_v > threshold` when set, `x_v >= threshold` otherwise
    pub strict: bool,
    pub map: Vec<u8>,
}

pub fn round_search(
    inst: &Instance,
    a: &BooleanStructure,
    b: &BooleanStructure,
) -> Result<Option<Vec<u8>>> {
    Ok(round_search_detailed(inst, a, b)?.map(|r| r.map))
}

/// Solves the relaxation with the first variable fixed to 0, or to 1 if that
/// fails, then tries every threshold in `{0, x_1, ..., x_n}`, strict first.
pub fn round_search_detailed(
    inst: &Instance,
    a: &BooleanStructure,
    b: &BooleanStructure,
) -> Result<Option<Rounding>> {
    if a.signature() != b.signature() {
        return Err(Error::Structural(
            "templates have different signatures".into(),
        ));
    }
    let base = build_blp(inst, a)?;
    let n = inst.variable_count();
    let mut point = None;
    for fixed in [Rational::zero(), Rational::one()] {
        let mut lp = base.clone();
        lp.add(&[(0, int(1))], Relation::Eq, fixed)?;
        let sol = solve_lp(&lp);
        if sol.status == LpStatus::Feasible {
            point = Some(sol.assignment[..n].to_vec());
            break;
        }
    }
    let Some(point) = point else { return Ok(None) };
    let mut candidates: Vec<Rational> = vec![Rational::zero()];
    for w in &point {
        if !candidates.contains(w) {
            candidates.push(w.clone());
        }
    }
    for q in candidates {
        for strict in [true, false] {
            let map: Vec<u8> = point
                .iter()
                .map(|w| u8::from(if strict { *w > q } else { *w >= q }))
                .collect();
            if is_homomorphism(&map, inst, b)? {
                return Ok(Some(Rounding {
                    point,
                    threshold: q,
                    strict,
                    map,
                }));
            }
        }
    }
    Ok(None)
}
