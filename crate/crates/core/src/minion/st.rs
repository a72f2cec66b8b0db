//! ST: minors of the generators `(1, 2, -2, 4, -4, ..., 2^m, -2^m | 0)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::boolean::{is_polymorphism, st_left, st_right, BooleanFunction};
use crate::error::{check_capacity, invariant, param, Result};
use crate::minor::{AllMaps, MinorMap};
use crate::rational::{int, Rational};
use crate::threshold::fixing::first_fixing_pair;
use crate::threshold::LtfPresentation;

pub fn st_generator(m: usize) -> LtfPresentation {
    let mut w: Vec<Rational> = vec![int(1)];
    for k in 1..=m {
        let p = Rational::from_integer(num_bigint::BigInt::from(2).pow(k as u32));
        w.push(p.clone());
        w.push(-p);
    }
    LtfPresentation::weak(w, int(0)).expect("nonempty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StMethod {
    /// Peel off fixing pairs and assemble a map from a generator.
    Recursive,
    /// Idempotency plus polymorphism of `(STl, STr)`.
    Template,
    /// Search all maps from the generator of arity `2n - 1`.
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StWitness {
    pub m: usize,
    /// `f` is the `rho`-minor of `st_generator(m)`; absent for the template method.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<MinorMap>,
}

const BRUTE_FORCE_MAX_ARITY: usize = 5;

pub fn st_membership(f: &BooleanFunction, method: StMethod) -> Result<Option<StWitness>> {
    match method {
        StMethod::Recursive => {
            let Some((m, rho)) = recursive(f)? else {
                return Ok(None);
            };
            let g = st_generator(m).truth_table()?;
            if g.minor(&rho)? != *f {
                return invariant(format!("assembled map does not reproduce {}", f.digest()));
            }
            Ok(Some(minimize(f, StWitness { m, rho: Some(rho) })?))
        }
        StMethod::Template => {
            let ok = f.is_idempotent() && is_polymorphism(f, &st_left(), &st_right())?;
            Ok(ok.then(|| StWitness {
                m: f.arity() - 1,
                rho: None,
            }))
        }
        StMethod::BruteForce => {
            let n = f.arity();
            check_capacity(
                "brute-force ST arity",
                n as u128,
                BRUTE_FORCE_MAX_ARITY as u128,
            )?;
            let index = brute_force_index(n)?;
            match index.get(f.table()) {
                Some(rho) => Ok(Some(minimize(
                    f,
                    StWitness {
                        m: n - 1,
                        rho: Some(rho.clone()),
                    },
                )?)),
                None => Ok(None),
            }
        }
    }
}

fn recursive(f: &BooleanFunction) -> Result<Option<(usize, MinorMap)>> {
    let n = f.arity();
    if n == 1 {
        return Ok((*f == BooleanFunction::projection(1, 1)?).then(|| (0, MinorMap::identity(1))));
    }
    let Some((i, j)) = first_fixing_pair(f) else {
        return Ok(None);
    };
    let (g, _) = f.identify(i, j)?;
    let Some((m, rho)) = recursive(&g)? else {
        return Ok(None);
    };
    let lift = |c: usize| if c < j { c } else { c + 1 };
    let mut map: Vec<usize> = rho.as_slice().iter().map(|&c| lift(c)).collect();
    map.push(i);
    map.push(j);
    Ok(Some((m + 1, MinorMap::new(n, map)?)))
}

const MINIMIZE_CAP: u128 = 1 << 20;

/// Replaces the witness by one from the smallest generator that still has `f`
/// as a minor, as long as the search stays below [`MINIMIZE_CAP`] maps.
fn minimize(f: &BooleanFunction, found: StWitness) -> Result<StWitness> {
    let n = f.arity();
    for m in 0..found.m {
        let space = (n as u128)
            .checked_pow(2 * m as u32 + 1)
            .unwrap_or(u128::MAX);
        if space > MINIMIZE_CAP {
            break;
        }
        let gen = st_generator(m).truth_table()?;
        for rho in AllMaps::new(2 * m + 1, n) {
            if gen.minor(&rho)? == *f {
                return Ok(StWitness { m, rho: Some(rho) });
            }
        }
    }
    Ok(found)
}

type TableIndex = HashMap<Vec<bool>, MinorMap>;

/// Every `n`-ary minor of `st_generator(n - 1)`, with the first map (in
/// lexicographic order) producing it. Cached per arity.
fn brute_force_index(n: usize) -> Result<Arc<TableIndex>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TableIndex>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(ix) = cache.lock().unwrap().get(&n) {
        return Ok(ix.clone());
    }
    if n == 0 {
        return param("arity must be positive");
    }
    let gen = st_generator(n - 1).truth_table()?;
    let mut index = TableIndex::new();
    for rho in AllMaps::new(2 * n - 1, n) {
        let t = gen.minor(&rho)?;
        index.entry(t.table().to_vec()).or_insert(rho);
    }
    let index = Arc::new(index);
    cache.lock().unwrap().insert(n, index.clone());
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threshold::Form;

    const ALL: [StMethod; 3] = [
        StMethod::Recursive,
        StMethod::Template,
        StMethod::BruteForce,
    ];

    #[test]
    fn generators() {
        assert_eq!(
            st_generator(0),
            LtfPresentation::from_ints(&[1], 0, 1, Form::Weak)
        );
        assert_eq!(
            st_generator(2),
            LtfPresentation::from_ints(&[1, 2, -2, 4, -4], 0, 1, Form::Weak)
        );
    }

    #[test]
    fn membership_examples() {
        let id = BooleanFunction::projection(1, 1).unwrap();
        let g1 = st_generator(1).truth_table().unwrap();
        let maj = BooleanFunction::from_fn(3, |x| x.count_ones() >= 2).unwrap();
        for method in ALL {
            assert_eq!(st_membership(&id, method).unwrap().unwrap().m, 0);
            // the template method reports m = n - 1 without a map
            let want = if method == StMethod::Template { 2 } else { 1 };
            assert_eq!(st_membership(&g1, method).unwrap().unwrap().m, want);
            assert!(st_membership(&maj, method).unwrap().is_none());
        }
        let w = st_membership(&g1, StMethod::Recursive).unwrap().unwrap();
        assert_eq!(w.rho.unwrap().as_slice(), &[1, 2, 3]);
        // before minimization the recursion lands on the arity-5 generator
        let (m, rho) = recursive(&g1).unwrap().unwrap();
        assert_eq!((m, rho.as_slice()), (2, &[2, 2, 1, 1, 3][..]));
    }

    #[test]
    fn brute_force_is_capped() {
        let f = BooleanFunction::projection(6, 1).unwrap();
        assert!(st_membership(&f, StMethod::BruteForce).is_err());
        assert!(st_membership(&f, StMethod::Recursive).unwrap().is_some());
    }
}
