#![allow(dead_code)]

use std::path::PathBuf;

use std::fs;

use fofkit::syntax::{parse_items, split_tstp, Connective, CorpusFile, Formula, ParseOptions, Quantifier, RawItem, Term};
use proptest::prelude::*;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap()
}

pub fn corpus_files() -> Vec<CorpusFile> {
    let mut out = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(corpus_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(&path).unwrap();
        let derivation = name.ends_with(".tstp");
        out.push(CorpusFile {
            name,
            text,
            derivation,
        });
    }
    out
}

pub fn parse_file(file: &CorpusFile) -> Vec<RawItem> {
    let text = if file.derivation {
        split_tstp(&file.text).joined()
    } else {
        file.text.clone()
    };
    parse_items(&text, ParseOptions { allow_cnf: file.derivation })
        .unwrap_or_else(|e| panic!("{}: {e}", file.name))
}

pub fn print_items(items: &[RawItem]) -> String {
    items.iter().map(|i| format!("{i}\n")).collect()
}

const VARS: [&str; 3] = ["X", "Y", "Z"];

pub fn term(depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        prop::sample::select(VARS.to_vec()).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(depth, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
        ]
    })
    .boxed()
}

/// Random formulas over p/1, q/2, r/0, f/1, g/2, a, b and variables X, Y, Z.
pub fn formula(depth: u32) -> BoxedStrategy<Formula> {
    let atom = prop_oneof![
        term(1).prop_map(|t| Formula::atom("p", vec![t])),
        (term(1), term(1)).prop_map(|(s, t)| Formula::atom("q", vec![s, t])),
        Just(Formula::prop("r")),
        (term(1), term(1)).prop_map(|(s, t)| Formula::eq(s, t)),
        Just(Formula::True),
        Just(Formula::False),
    ];
    atom.prop_recursive(depth, 24, 2, |inner| {
        let conn = prop::sample::select(vec![
            Connective::And,
            Connective::Or,
            Connective::Implies,
            Connective::Iff,
            Connective::Xor,
        ]);
        let quant = prop::sample::select(vec![Quantifier::Forall, Quantifier::Exists]);
        let vars = prop::sample::subsequence(VARS.to_vec(), 1..=2);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (conn, inner.clone(), inner.clone()).prop_map(|(c, l, r)| Formula::binary(c, l, r)),
            (quant, vars, inner).prop_map(|(q, vs, b)| {
                Formula::quant(q, vs.into_iter().map(String::from).collect(), b)
            }),
        ]
    })
    .boxed()
}

/// Closes `f` universally over its free variables.
pub fn close(f: Formula) -> Formula {
    let free: Vec<String> = fofkit::formula_ops::free_variables(&f).into_iter().collect();
    Formula::forall(free, f)
}

/// Builds a total model of `size` elements for the signature used by
/// [`formula`], reading table entries from `entropy`.
pub fn total_model(size: usize, entropy: &[u32]) -> fofkit::model::PartialModel {
    let mut m = fofkit::model::PartialModel::numbered(size);
    let mut bits = entropy.iter().cycle().enumerate().map(|(i, e)| e.rotate_left(i as u32 % 32));
    let mut next = |k: usize| bits.next().unwrap() as usize % k;
    let tuples = |arity: u32| -> Vec<Vec<usize>> {
        (0..size.pow(arity))
            .map(|mut c| {
                (0..arity)
                    .map(|_| {
                        let d = c % size;
                        c /= size;
                        d
                    })
                    .collect()
            })
            .collect()
    };
    for (name, arity) in [("a", 0), ("b", 0), ("f", 1), ("g", 2)] {
        for args in tuples(arity) {
            m.set_function(name, &args, next(size)).unwrap();
        }
    }
    for (name, arity) in [("r", 0), ("p", 1), ("q", 2)] {
        for args in tuples(arity) {
            m.set_predicate(name, &args, next(2) == 1).unwrap();
        }
    }
    m
}

/// `m` with the entries picked by `mask` removed.
pub fn forget(m: &fofkit::model::PartialModel, mask: &[bool]) -> fofkit::model::PartialModel {
    let mut out = m.clone();
    let mut pick = mask.iter().cycle();
    let funs: Vec<(String, Vec<usize>)> = m.function_entries().map(|(n, a, _)| (n.to_owned(), a.to_vec())).collect();
    let preds: Vec<(String, Vec<usize>)> = m.predicate_entries().map(|(n, a, _)| (n.to_owned(), a.to_vec())).collect();
    for (n, a) in funs {
        if *pick.next().unwrap() {
            out.unset_function(&n, &a);
        }
    }
    for (n, a) in preds {
        if *pick.next().unwrap() {
            out.unset_predicate(&n, &a);
        }
    }
    out
}

pub fn model_parts() -> impl Strategy<Value = (usize, Vec<u32>)> {
    (1..=3usize, prop::collection::vec(any::<u32>(), 16))
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap()
}
