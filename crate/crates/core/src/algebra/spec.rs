use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{AlgebraError, FiniteMonoid, ForestAlgebra, Morphism, Recognizer};
use crate::term::Alphabet;

pub const DEFAULT_V_LIMIT: usize = 20_000;

/// A deterministic forest automaton: a finite monoid `H` of states under
/// `plus`, and for each letter a map `delta(a, ·)` giving the state of `a(t)`
/// from the state of `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonSpec {
    pub alphabet: Vec<String>,
    #[serde(rename = "H")]
    pub h: Vec<String>,
    pub zero: String,
    pub plus: Vec<Vec<String>>,
    pub delta: BTreeMap<String, BTreeMap<String, String>>,
    pub accepting: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::SpecInvalid(msg.into())
}

struct Resolved {
    plus: FiniteMonoid,
    delta: Vec<Vec<usize>>,
    accepting: Vec<bool>,
}

impl AutomatonSpec {
    fn resolve(&self) -> Result<Resolved, AlgebraError> {
        let n = self.h.len();
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, name) in self.h.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(invalid(format!("state `{name}` listed twice")));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| invalid(format!("unknown state `{name}`")))
        };
        let mut seen_letters = std::collections::HashSet::new();
        for a in &self.alphabet {
            if !seen_letters.insert(a.as_str()) {
                return Err(invalid(format!("letter `{a}` listed twice")));
            }
        }

        if self.plus.len() != n || self.plus.iter().any(|row| row.len() != n) {
            return Err(invalid(format!("plus table must be {n}x{n}")));
        }
        let mut table = Vec::with_capacity(n);
        for row in &self.plus {
            table.push(
                row.iter()
                    .map(|x| lookup(x))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let zero = lookup(&self.zero)?;
        let plus =
            FiniteMonoid::new(self.h.clone(), table, zero).map_err(|e| invalid(e.to_string()))?;

        let mut delta = Vec::with_capacity(self.alphabet.len());
        for a in &self.alphabet {
            let row = self
                .delta
                .get(a)
                .ok_or_else(|| invalid(format!("no transitions for letter `{a}`")))?;
            let mut map = Vec::with_capacity(n);
            for name in &self.h {
                let target = row
                    .get(name)
                    .ok_or_else(|| invalid(format!("delta({a}, {name}) is missing")))?;
                map.push(lookup(target)?);
            }
            if let Some(extra) = row.keys().find(|k| !index.contains_key(k.as_str())) {
                return Err(invalid(format!(
                    "delta({a}, ·) mentions unknown state `{extra}`"
                )));
            }
            delta.push(map);
        }
        if let Some(extra) = self.delta.keys().find(|k| !self.alphabet.contains(k)) {
            return Err(invalid(format!("delta mentions unknown letter `{extra}`")));
        }

        let mut accepting = vec![false; n];
        for name in &self.accepting {
            accepting[lookup(name)?] = true;
        }
        Ok(Resolved {
            plus,
            delta,
            accepting,
        })
    }
}

/// Closes a set of transformations of `0..n` under composition, starting
/// from the identity. `(x·g)[h] = x[g[h]]`; elements are numbered in
/// breadth-first order: identity, then the generators, then longer products.
///
/// Returns the elements and the index of each generator.
pub fn close_transformations(
    n: usize,
    generators: &[Vec<usize>],
    limit: usize,
) -> Result<(Vec<Vec<usize>>, Vec<usize>), AlgebraError> {
    let identity: Vec<usize> = (0..n).collect();
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let product: Vec<usize> = g.iter().map(|&h| elements[x][h]).collect();
            if !index.contains_key(&product) {
                if elements.len() >= limit {
                    return Err(AlgebraError::SizeLimitExceeded { limit });
                }
                index.insert(product.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(product);
            }
        }
    }
    let gens = generators.iter().map(|g| index[g]).collect();
    Ok((elements, gens))
}

/// The multiplication table of a closed set of transformations.
pub(crate) fn transformation_monoid(elements: &[Vec<usize>], prefix: &str) -> FiniteMonoid {
    let index: HashMap<&[usize], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();
    let m = elements.len();
    let mut table = Vec::with_capacity(m * m);
    for x in elements {
        for y in elements {
            let product: Vec<usize> = y.iter().map(|&h| x[h]).collect();
            table.push(index[product.as_slice()]);
        }
    }
    let names = (0..m).map(|i| format!("{prefix}{i}")).collect();
    FiniteMonoid::from_table_unchecked(names, table, 0)
}

pub fn build_transition_algebra(spec: &AutomatonSpec) -> Result<Recognizer, AlgebraError> {
    build_transition_algebra_with_limit(spec, DEFAULT_V_LIMIT)
}

/// Builds the transition forest algebra of `spec`, restricted to the states
/// reachable from `zero`, together with the morphism and accepting set.
pub fn build_transition_algebra_with_limit(
    spec: &AutomatonSpec,
    limit: usize,
) -> Result<Recognizer, AlgebraError> {
    let r = spec.resolve()?;
    let n = spec.h.len();

    let mut reached = vec![false; n];
    reached[r.plus.identity()] = true;
    let mut stack = vec![r.plus.identity()];
    while let Some(g) = stack.pop() {
        let mut next: Vec<usize> = r.delta.iter().map(|d| d[g]).collect();
        for h in 0..n {
            if reached[h] {
                next.push(r.plus.mul(g, h));
                next.push(r.plus.mul(h, g));
            }
        }
        for x in next {
            if !reached[x] {
                reached[x] = true;
                stack.push(x);
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&h| reached[h]).collect();
    let mut new_index = vec![usize::MAX; n];
    for (i, &h) in kept.iter().enumerate() {
        new_index[h] = i;
    }
    if kept.len() < n {
        log::info!("dropped {} unreachable state(s)", n - kept.len());
    }

    let k = kept.len();
    let mut h_table = Vec::with_capacity(k * k);
    for &g in &kept {
        for &h in &kept {
            h_table.push(new_index[r.plus.mul(g, h)]);
        }
    }
    let h_names: Vec<String> = kept.iter().map(|&h| spec.h[h].clone()).collect();
    let h_monoid =
        FiniteMonoid::from_table_unchecked(h_names, h_table, new_index[r.plus.identity()]);

    let mut generators: Vec<Vec<usize>> = r
        .delta
        .iter()
        .map(|d| kept.iter().map(|&h| new_index[d[h]]).collect())
        .collect();
    for g in 0..k {
        generators.push((0..k).map(|h| h_monoid.mul(g, h)).collect());
    }
    for g in 0..k {
        generators.push((0..k).map(|h| h_monoid.mul(h, g)).collect());
    }
    let (elements, gens) = close_transformations(k, &generators, limit)?;
    let bound = (k as f64).powf(k as f64);
    assert!(
        (elements.len() as f64) <= bound,
        "more transformations than |H|^|H|"
    );

    let v_monoid = transformation_monoid(&elements, "v");
    let letters = spec.alphabet.len();
    let action = elements.concat();
    let algebra = ForestAlgebra::from_flat(
        h_monoid,
        v_monoid,
        action,
        gens[letters..letters + k].to_vec(),
        gens[letters + k..].to_vec(),
    );
    let morphism = Morphism::new(Alphabet::new(&spec.alphabet), gens[..letters].to_vec());
    let accepting = kept.iter().map(|&h| r.accepting[h]).collect();
    Ok(Recognizer::new(algebra, morphism, accepting))
}

#[cfg(test)]
mod tests {
    use super::super::validate_axioms;
    use super::*;
    use crate::term::{parse_context, parse_forest};

    pub(crate) fn spec_from_json(text: &str) -> AutomatonSpec {
        serde_json::from_str(text).unwrap()
    }

    pub(crate) fn f1() -> AutomatonSpec {
        spec_from_json(
            r#"{"alphabet":["a","b"],"H":["n","y"],"zero":"n",
                "plus":[["n","y"],["y","y"]],
                "delta":{"a":{"n":"y","y":"y"},"b":{"n":"n","y":"y"}},
                "accepting":["y"]}"#,
        )
    }

    fn f2() -> AutomatonSpec {
        let names = ["0", "sc", "sa", "sb", "bot"];
        let plus: Vec<Vec<String>> = names
            .iter()
            .map(|g| {
                names
                    .iter()
                    .map(|h| match (*g, *h) {
                        ("0", x) | (x, "0") => x.to_string(),
                        _ => "bot".to_string(),
                    })
                    .collect()
            })
            .collect();
        let step = |pairs: &[(&str, &str)]| -> BTreeMap<String, String> {
            names
                .iter()
                .map(|h| {
                    let to = pairs.iter().find(|(f, _)| f == h).map_or("bot", |(_, t)| t);
                    (h.to_string(), to.to_string())
                })
                .collect()
        };
        AutomatonSpec {
            alphabet: vec!["a".into(), "b".into(), "c".into()],
            h: names.iter().map(|s| s.to_string()).collect(),
            zero: "0".into(),
            plus,
            delta: BTreeMap::from([
                ("a".to_string(), step(&[("sb", "sa")])),
                ("b".to_string(), step(&[("sc", "sb"), ("sa", "sb")])),
                ("c".to_string(), step(&[("0", "sc")])),
            ]),
            accepting: vec!["sc".into(), "sa".into()],
        }
    }

    #[test]
    fn f1_sizes_and_elements() {
        let rec = build_transition_algebra(&f1()).unwrap();
        let alg = rec.algebra();
        assert_eq!(alg.h_len(), 2);
        assert_eq!(alg.v_len(), 2);
        assert!(validate_axioms(alg).is_ok());
        let va = rec.morphism().letter_image(0);
        assert_eq!(alg.transformation(va), &[1, 1]);
        assert_eq!(alg.transformation(rec.morphism().letter_image(1)), &[0, 1]);
    }

    #[test]
    fn empty_alphabet_gives_trivial_algebra() {
        let spec = spec_from_json(
            r#"{"alphabet":[],"H":["z"],"zero":"z","plus":[["z"]],"delta":{},"accepting":[]}"#,
        );
        let rec = build_transition_algebra(&spec).unwrap();
        assert_eq!(rec.algebra().h_len(), 1);
        assert_eq!(rec.algebra().v_len(), 1);
    }

    #[test]
    fn f2_chain_elements() {
        let rec = build_transition_algebra(&f2()).unwrap();
        let alg = rec.algebra();
        assert!(validate_axioms(alg).is_ok());
        let sc = alg.h().index_of("sc").unwrap();
        let sa = alg.h().index_of("sa").unwrap();
        let sb = alg.h().index_of("sb").unwrap();
        let bot = alg.h().index_of("bot").unwrap();
        let va = rec
            .eval_context(&parse_context("a([])", None).unwrap())
            .unwrap();
        let vb = rec
            .eval_context(&parse_context("b([])", None).unwrap())
            .unwrap();
        let vab = rec
            .eval_context(&parse_context("a(b([]))", None).unwrap())
            .unwrap();
        assert_ne!(va, vb);
        assert_eq!(vab, alg.compose(va, vb));
        assert_eq!(alg.act(vab, sc), sa);
        assert_eq!(alg.act(vab, sb), bot);
        assert!(rec
            .member(&parse_forest("a(b(a(b(c))))", None).unwrap())
            .unwrap());
        assert!(!rec
            .member(&parse_forest("a(b(a(a(b(c)))))", None).unwrap())
            .unwrap());
    }

    #[test]
    fn junk_state_is_dropped() {
        let spec = spec_from_json(
            r#"{"alphabet":["a","b"],"H":["n","y","j"],"zero":"n",
                "plus":[["n","y","j"],["y","y","j"],["j","j","j"]],
                "delta":{"a":{"n":"y","y":"y","j":"j"},"b":{"n":"n","y":"y","j":"j"}},
                "accepting":["y"]}"#,
        );
        let rec = build_transition_algebra(&spec).unwrap();
        assert_eq!(rec.algebra().h_len(), 2);
        assert_eq!(rec.algebra().h().names(), ["n", "y"]);
    }

    #[test]
    fn invalid_specs() {
        let mut bad = f1();
        bad.plus[1][0] = "n".into();
        assert!(matches!(
            build_transition_algebra(&bad),
            Err(AlgebraError::SpecInvalid(_))
        ));
        let mut missing = f1();
        missing.delta.get_mut("a").unwrap().remove("y");
        let err = build_transition_algebra(&missing).unwrap_err();
        assert!(err.to_string().contains("delta(a, y)"), "{err}");
        let mut unknown = f1();
        unknown.accepting.push("q".into());
        assert!(build_transition_algebra(&unknown).is_err());
    }

    #[test]
    fn size_limit() {
        assert_eq!(
            build_transition_algebra_with_limit(&f2(), 3).unwrap_err(),
            AlgebraError::SizeLimitExceeded { limit: 3 }
        );
    }

    #[test]
    fn closure_numbering_is_breadth_first() {
        // Two swaps of three points generate S3; the identity comes first.
        let gens = vec![vec![1, 0, 2], vec![0, 2, 1]];
        let (elements, idx) = close_transformations(3, &gens, 100).unwrap();
        assert_eq!(elements.len(), 6);
        assert_eq!(elements[0], vec![0, 1, 2]);
        assert_eq!(idx, vec![1, 2]);
    }
}
