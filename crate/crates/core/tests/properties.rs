use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::select;

use forest_delta::algebra::{build_transition_algebra, Recognizer};
use forest_delta::corpus::builtin;
use forest_delta::logic::{eval_sentence, parse_formula, Formula};
use forest_delta::pieces::{compute_pieces, PieceRelation};
use forest_delta::term::{
    enumerate_contexts, enumerate_forests, parse_context, parse_forest, pieces_of, Alphabet,
    Context, Forest, Term,
};

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"])
}

fn forests() -> &'static [Forest] {
    static F: OnceLock<Vec<Forest>> = OnceLock::new();
    F.get_or_init(|| enumerate_forests(&ab(), 6))
}

fn contexts() -> &'static [Context] {
    static C: OnceLock<Vec<Context>> = OnceLock::new();
    C.get_or_init(|| enumerate_contexts(&ab(), 5))
}

/// Every built-in automaton over a superset of {a, b}, with its piece
/// relation.
fn recognizers() -> &'static [(String, Recognizer, PieceRelation)] {
    static R: OnceLock<Vec<(String, Recognizer, PieceRelation)>> = OnceLock::new();
    R.get_or_init(|| {
        builtin()
            .into_iter()
            .filter_map(|e| {
                let rec = build_transition_algebra(e.automaton.as_ref()?).ok()?;
                if !(rec.alphabet().contains("a") && rec.alphabet().contains("b")) {
                    return None;
                }
                let rel = compute_pieces(&rec, false);
                Some((e.name, rec, rel))
            })
            .collect()
    })
}

fn forest() -> impl Strategy<Value = Forest> {
    select(forests())
}

fn context() -> impl Strategy<Value = Context> {
    select(contexts())
}

fn recognizer_index() -> impl Strategy<Value = usize> {
    0..recognizers().len()
}

fn var() -> impl Strategy<Value = String> {
    select(vec!["x", "y", "z"]).prop_map(String::from)
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (select(vec!["a", "b"]), var()).prop_map(|(a, x)| Formula::Label(a.into(), x)),
        (var(), var()).prop_map(|(x, y)| Formula::Less(x, y)),
        (var(), var()).prop_map(|(x, y)| Formula::Lex(x, y)),
        (var(), var()).prop_map(|(x, y)| Formula::Eq(x, y)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (var(), inner.clone()).prop_map(|(x, f)| Formula::exists(&x, f)),
            (var(), inner).prop_map(|(x, f)| Formula::forall(&x, f)),
        ]
    })
}

/// Closes `body` over x, y, z with universal quantifiers.
fn universal(body: Formula) -> Formula {
    ["z", "y", "x"]
        .iter()
        .fold(body, |f, x| Formula::forall(x, f))
}

fn quantifier_free() -> impl Strategy<Value = Formula> {
    formula().prop_filter("quantifier-free", Formula::is_quantifier_free)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn forests_print_and_parse_back(t in forest()) {
        prop_assert_eq!(parse_forest(&t.to_string(), None).unwrap(), t);
    }

    #[test]
    fn contexts_print_and_parse_back(p in context()) {
        prop_assert_eq!(parse_context(&p.to_string(), None).unwrap(), p);
    }

    #[test]
    fn formulas_print_and_parse_back(phi in formula()) {
        prop_assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn evaluation_respects_the_action(i in recognizer_index(), p in context(), q in context(), s in forest(), t in forest()) {
        let (_, rec, _) = &recognizers()[i];
        let alg = rec.algebra();
        let (vp, vq) = (rec.eval_context(&p).unwrap(), rec.eval_context(&q).unwrap());
        let (hs, ht) = (rec.eval_forest(&s).unwrap(), rec.eval_forest(&t).unwrap());
        prop_assert_eq!(rec.eval_forest(&p.apply(&s)).unwrap(), alg.act(vp, hs));
        prop_assert_eq!(rec.eval_context(&p.compose(&q)).unwrap(), alg.compose(vp, vq));
        prop_assert_eq!(rec.eval_forest(&s.concat(&t)).unwrap(), alg.plus(hs, ht));
        prop_assert_eq!(alg.act(alg.compose(vp, vq), hs), alg.act(vp, alg.act(vq, hs)));
    }

    #[test]
    fn term_pieces_are_type_pieces(i in recognizer_index(), q in context(), t in forest()) {
        let (name, rec, rel) = &recognizers()[i];
        let vq = rec.eval_context(&q).unwrap();
        for p in pieces_of(&Term::Context(q.clone())) {
            let vp = rec.eval_term(&p).unwrap();
            prop_assert!(rel.v_le(vp, vq), "{}: {} of {}", name, p, q);
        }
        let ht = rec.eval_forest(&t).unwrap();
        for s in pieces_of(&Term::Forest(t.clone())) {
            let hs = rec.eval_term(&s).unwrap();
            prop_assert!(rel.h_le(hs, ht), "{}: {} of {}", name, s, t);
        }
    }

    #[test]
    fn universal_sentences_are_closed_under_pieces(body in quantifier_free(), t in forest()) {
        let phi = universal(body);
        if eval_sentence(&phi, &t).unwrap() {
            for s in pieces_of(&Term::Forest(t.clone())) {
                prop_assert!(eval_sentence(&phi, s.as_forest().unwrap()).unwrap(), "{} holds on {} but not on {}", phi, t, s);
            }
        }
    }

    #[test]
    fn quantifiers_over_the_empty_forest(x in var(), body in formula()) {
        let empty = Forest::empty();
        prop_assert_eq!(eval_sentence(&Formula::exists(&x, body.clone()), &empty), Ok(false));
        prop_assert_eq!(eval_sentence(&Formula::forall(&x, body), &empty), Ok(true));
    }
}
