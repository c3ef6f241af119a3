//! A minimal sparse polynomial type over `BigInt` in the eight coordinates
//! `r1..r8`, plus two auxiliary variables for the form variables when a test
//! oracle needs them. Only what invariant expansion and the test oracles
//! require: ring operations, content, and exact evaluation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub const NVARS: usize = 10; // r1..r8, plus x,y (or w1,w2) at indices 8,9

/// Sparse multivariate polynomial: monomial exponent vector -> coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    pub terms: BTreeMap<[u8; NVARS], BigInt>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: i64) -> Self {
        let mut p = MPoly::zero();
        if c != 0 {
            p.terms.insert([0; NVARS], BigInt::from(c));
        }
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0u8; NVARS];
        e[i] = 1;
        let mut p = MPoly::zero();
        p.terms.insert(e, BigInt::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, e: [u8; NVARS], c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let mut e = *e1;
                for i in 0..NVARS {
                    e[i] += e2[i];
                }
                out.insert(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> MPoly {
        if k == 0 {
            return MPoly::zero();
        }
        let k = BigInt::from(k);
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * &k)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut out = MPoly::constant(1);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn diff(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            out.insert(e2, c * BigInt::from(e[i]));
        }
        out
    }

    /// gcd of all coefficients (zero polynomial has content 0).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = num_integer::Integer::gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g.abs()
    }

    /// Exact division by an integer; panics if any coefficient is not divisible.
    pub fn div_exact(&self, k: &BigInt) -> MPoly {
        assert!(!k.is_zero());
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = num_integer::Integer::div_rem(c, k);
                    assert!(r.is_zero(), "non-exact division in MPoly::div_exact");
                    (*e, q)
                })
                .collect(),
        }
    }

    /// Substitute values for the first 8 variables; the polynomial must not
    /// involve variables 8 and 9.
    pub fn eval8(&self, vals: &[BigInt; 8]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            debug_assert!(e[8] == 0 && e[9] == 0);
            let mut t = c.clone();
            for i in 0..8 {
                for _ in 0..e[i] {
                    t *= &vals[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Collect coefficients of a binary form in variables `u`, `v` of degree
    /// `deg`; entry `k` is the coefficient of `u^(deg-k) v^k`.
    pub fn binary_coeffs(&self, u: usize, v: usize, deg: u8) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            assert!(e[u] + e[v] == deg, "not homogeneous of expected degree");
            let mut e2 = *e;
            e2[u] = 0;
            e2[v] = 0;
            out[e[v] as usize].insert(e2, c.clone());
        }
        out
    }
}

/// The two generic cubic forms in the binomial basis, as polynomials in
/// (r1..r8, x, y).
pub fn generic_pair() -> (MPoly, MPoly) {
    let x = MPoly::var(8);
    let y = MPoly::var(9);
    let form = |base: usize| {
        let r = |i: usize| MPoly::var(base + i);
        r(0)
            .mul(&x.pow(3))
            .add(&r(1).mul(&x.pow(2)).mul(&y).scale(3))
            .add(&r(2).mul(&x).mul(&y.pow(2)).scale(3))
            .add(&r(3).mul(&y.pow(3)))
    };
    (form(0), form(4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_ops() {
        let x = MPoly::var(0);
        let y = MPoly::var(1);
        let p = x.add(&y).pow(2);
        let q = x.pow(2).add(&x.mul(&y).scale(2)).add(&y.pow(2));
        assert_eq!(p, q);
        assert_eq!(p.diff(0), x.scale(2).add(&y.scale(2)));
    }

    #[test]
    fn content_and_division() {
        let p = MPoly::var(0).scale(6).add(&MPoly::constant(9));
        assert_eq!(p.content(), BigInt::from(3));
        let q = p.div_exact(&BigInt::from(3));
        assert_eq!(q, MPoly::var(0).scale(2).add(&MPoly::constant(3)));
    }
}
