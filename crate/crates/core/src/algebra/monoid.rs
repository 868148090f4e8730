use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// A finite monoid given by its full multiplication table.
///
/// Elements are dense indices `0..len()`; names are kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    names: Vec<String>,
    table: Vec<usize>,
    identity: usize,
}

impl FiniteMonoid {
    /// Builds a monoid from a table, checking totality, the identity laws and
    /// associativity on every triple.
    pub fn new(
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<Self, AlgebraError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::InvalidMonoid(
                "a monoid needs at least one element".into(),
            ));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::InvalidMonoid(format!(
                "operation table must be {n}x{n}"
            )));
        }
        if identity >= n || table.iter().flatten().any(|&x| x >= n) {
            return Err(AlgebraError::InvalidMonoid(
                "table entry out of range".into(),
            ));
        }
        let monoid = FiniteMonoid {
            names,
            table: table.into_iter().flatten().collect(),
            identity,
        };
        if let Some(x) = monoid.find_identity_violation() {
            return Err(AlgebraError::InvalidMonoid(format!(
                "`{}` is not neutral for `{}`",
                monoid.name(monoid.identity),
                monoid.name(x)
            )));
        }
        if let Some((a, b, c)) = monoid.find_associativity_violation() {
            return Err(AlgebraError::InvalidMonoid(format!(
                "not associative on ({}, {}, {})",
                monoid.name(a),
                monoid.name(b),
                monoid.name(c)
            )));
        }
        Ok(monoid)
    }

    /// Builds a monoid from a row-major table without checking the monoid laws.
    ///
    /// Used for tables that are associative by construction, and for
    /// deliberately broken tables handed to [`super::validate_axioms`].
    pub fn from_table_unchecked(names: Vec<String>, table: Vec<usize>, identity: usize) -> Self {
        let n = names.len();
        assert_eq!(table.len(), n * n, "table shape");
        assert!(identity < n, "identity in range");
        FiniteMonoid {
            names,
            table,
            identity,
        }
    }

    pub fn trivial() -> Self {
        FiniteMonoid {
            names: vec!["1".into()],
            table: vec![0],
            identity: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.len() + b]
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.len().max(1))
            .map(<[usize]>::to_vec)
            .collect()
    }

    /// `x^k`, with `x^0` the identity.
    pub fn power(&self, x: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, x))
    }

    pub fn product<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter()
            .fold(self.identity, |acc, x| self.mul(acc, x))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    /// The idempotent power of `x`: the unique idempotent among `x, x², x³, …`.
    pub fn omega(&self, x: usize) -> usize {
        let mut p = x;
        for _ in 0..self.len() {
            if self.is_idempotent(p) {
                return p;
            }
            p = self.mul(p, x);
        }
        unreachable!("no idempotent power of `{}` within |M| steps", self.name(x))
    }

    pub fn find_identity_violation(&self) -> Option<usize> {
        self.elements()
            .find(|&x| self.mul(self.identity, x) != x || self.mul(x, self.identity) != x)
    }

    pub fn find_associativity_violation(&self) -> Option<(usize, usize, usize)> {
        for a in self.elements() {
            for b in self.elements() {
                let ab = self.mul(a, b);
                for c in self.elements() {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// The monoid with the reversed multiplication.
    pub fn opposite(&self) -> FiniteMonoid {
        let n = self.len();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.mul(b, a);
            }
        }
        FiniteMonoid {
            names: self.names.clone(),
            table,
            identity: self.identity,
        }
    }
}

/// Convenience wrapper: the idempotent power of `x` in `mon`.
pub fn omega_power(mon: &FiniteMonoid, x: usize) -> usize {
    mon.omega(x)
}

/// The JSON form of a finite monoid, optionally with a letter assignment and a
/// stratification pre-order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidSpec {
    pub elements: Vec<String>,
    pub identity: String,
    pub op: Vec<Vec<String>>,
    /// `pre[n][m]` is true when `n ⪯ m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre: Option<Vec<Vec<bool>>>,
    /// Letter name to element name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letters: Option<std::collections::BTreeMap<String, String>>,
}

impl MonoidSpec {
    pub fn to_monoid(&self) -> Result<FiniteMonoid, AlgebraError> {
        let lookup = |name: &str| {
            self.elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| AlgebraError::UnknownElement(name.to_string()))
        };
        let mut table = Vec::with_capacity(self.op.len());
        for row in &self.op {
            table.push(
                row.iter()
                    .map(|x| lookup(x))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        FiniteMonoid::new(self.elements.clone(), table, lookup(&self.identity)?)
    }

    pub fn from_monoid(mon: &FiniteMonoid) -> Self {
        MonoidSpec {
            elements: mon.names().to_vec(),
            identity: mon.name(mon.identity()).to_string(),
            op: mon
                .table_rows()
                .iter()
                .map(|row| row.iter().map(|&x| mon.name(x).to_string()).collect())
                .collect(),
            pre: None,
            letters: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// B₂¹ over {1, a, b, ab, ba, z}.
    pub(crate) fn brandt() -> FiniteMonoid {
        let e = ["1", "a", "b", "ab", "ba", "z"];
        // Words over {a, b}: alternating words of length <= 2 survive, aba = a, bab = b.
        let reduce = |w: &str| -> &'static str {
            let mut s: String = w.chars().filter(|c| *c != '1').collect();
            if s.contains('z') {
                return "z";
            }
            loop {
                if s.contains("aa") || s.contains("bb") {
                    return "z";
                }
                if s.contains("aba") {
                    s = s.replacen("aba", "a", 1);
                } else if s.contains("bab") {
                    s = s.replacen("bab", "b", 1);
                } else {
                    break;
                }
            }
            match s.as_str() {
                "" => "1",
                "a" => "a",
                "b" => "b",
                "ab" => "ab",
                "ba" => "ba",
                other => unreachable!("{other}"),
            }
        };
        let table = e
            .iter()
            .map(|x| {
                e.iter()
                    .map(|y| {
                        let r = reduce(&format!("{x}{y}"));
                        e.iter().position(|n| *n == r).unwrap()
                    })
                    .collect()
            })
            .collect();
        FiniteMonoid::new(names(&e), table, 0).unwrap()
    }

    #[test]
    fn omega_examples() {
        let b = brandt();
        let a = b.index_of("a").unwrap();
        let z = b.index_of("z").unwrap();
        let ab = b.index_of("ab").unwrap();
        assert_eq!(omega_power(&b, a), z);
        assert_eq!(omega_power(&b, ab), ab);
        assert_eq!(omega_power(&b, b.identity()), b.identity());
        for x in b.elements() {
            let e = b.omega(x);
            assert!(b.is_idempotent(e));
            assert!((1..=b.len()).any(|k| b.power(x, k) == e));
        }
    }

    #[test]
    fn omega_in_a_cyclic_group() {
        // Z/3 with an adjoined nothing: every non-identity element has omega = 0.
        let table = (0..3)
            .map(|a| (0..3).map(|b| (a + b) % 3).collect())
            .collect();
        let z3 = FiniteMonoid::new(names(&["0", "1", "2"]), table, 0).unwrap();
        assert_eq!(z3.omega(1), 0);
        assert_eq!(z3.omega(2), 0);
    }

    #[test]
    fn rejects_broken_tables() {
        // x*y = y is associative but has no two-sided identity.
        let right_zero = vec![vec![0, 1], vec![0, 1]];
        assert!(matches!(
            FiniteMonoid::new(names(&["p", "q"]), right_zero, 0),
            Err(AlgebraError::InvalidMonoid(_))
        ));
        // Identity fine, but x*x flips: 1*1 = 2, 1*2 = 2, 2*1 = 1 breaks associativity.
        let bad = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 1, 1]];
        let err = FiniteMonoid::new(names(&["e", "x", "y"]), bad, 0).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
        assert!(FiniteMonoid::new(names(&["e"]), vec![vec![1]], 0).is_err());
    }

    #[test]
    fn opposite_reverses() {
        let b = brandt();
        let op = b.opposite();
        for x in b.elements() {
            for y in b.elements() {
                assert_eq!(op.mul(x, y), b.mul(y, x));
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let b = brandt();
        let spec = MonoidSpec::from_monoid(&b);
        assert_eq!(spec.to_monoid().unwrap(), b);
    }
}
