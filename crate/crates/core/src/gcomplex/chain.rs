use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Integer combination of `q`-simplices, keyed by simplex index in sorted
/// orientation. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    dim: usize,
    terms: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut c = Chain::zero(dim);
        for (i, k) in terms {
            c.add_term(i, k);
        }
        c
    }

    /// Single vertex with coefficient `k`.
    pub fn point(v: usize, k: i64) -> Self {
        Chain::from_terms(0, [(v, k)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, i: usize, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.terms.entry(i).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.remove(&i);
        }
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.terms.get(&i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing simplex index.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.terms.iter().map(|(&i, &k)| (i, k))
    }

    pub fn scale(&self, k: i64) -> Chain {
        Chain::from_terms(self.dim, self.iter().map(|(i, c)| (i, c * k)))
    }

    /// Terms whose simplex index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Chain {
        Chain::from_terms(self.dim, self.iter().filter(|&(i, _)| keep(i)))
    }
}

impl Add for Chain {
    type Output = Chain;
    fn add(mut self, rhs: Chain) -> Chain {
        assert_eq!(self.dim, rhs.dim, "adding chains of different dimension");
        for (i, k) in rhs.iter() {
            self.add_term(i, k);
        }
        self
    }
}

impl Sub for Chain {
    type Output = Chain;
    fn sub(self, rhs: Chain) -> Chain {
        self + (-rhs)
    }
}

impl Neg for Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        self.scale(-1)
    }
}

impl<'a> Add<&'a Chain> for &'a Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        self.clone() + rhs.clone()
    }
}

impl<'a> Sub<&'a Chain> for &'a Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        self.clone() - rhs.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_removes_terms() {
        let a = Chain::from_terms(1, [(0, 1), (3, 2)]);
        let b = Chain::from_terms(1, [(3, 2)]);
        let c = a - b;
        assert_eq!(c.len(), 1);
        assert_eq!(c.coeff(0), 1);
        assert!((c.clone() - c).is_zero());
    }
}
