//! Ordered-choice tables driving the packrat parser.
//!
//! Every alternation in the parser reads its alternative order from a
//! [`Grammar`]. The first alternative that succeeds is committed to, so an
//! alternative whose language is a strict prefix of a later one masks it.
//! [`crate::syntax::grammar_order_check`] guards the shipped order.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Item,
    UnitaryFormula,
    AtomicFormula,
    Term,
    InfixOp,
    BinaryConnective,
    Quantifier,
    Name,
}

impl RuleId {
    pub const ALL: [RuleId; 8] = [
        RuleId::Item,
        RuleId::UnitaryFormula,
        RuleId::AtomicFormula,
        RuleId::Term,
        RuleId::InfixOp,
        RuleId::BinaryConnective,
        RuleId::Quantifier,
        RuleId::Name,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Item => "item",
            RuleId::UnitaryFormula => "unitary_formula",
            RuleId::AtomicFormula => "atomic_formula",
            RuleId::Term => "term",
            RuleId::InfixOp => "infix_op",
            RuleId::BinaryConnective => "binary_connective",
            RuleId::Quantifier => "quantifier",
            RuleId::Name => "name",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Grammar symbol in an alternative's shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    /// Literal text.
    Lit(&'static str),
    /// Reference to another rule or nonterminal.
    Rule(&'static str),
    /// Lexical class such as `lower_word`.
    Class(&'static str),
}

/// One alternative: a label the parser dispatches on, and a symbol sequence
/// approximating its language for prefix analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alternative {
    pub label: &'static str,
    pub shape: &'static [Sym],
}

impl Alternative {
    /// True when every string of `self`'s shape is a strict prefix of some
    /// string of `later`'s shape, i.e. committing to `self` can mask `later`.
    pub fn prefix_subsumes(&self, later: &Alternative) -> bool {
        let (a, b) = (self.shape, later.shape);
        if a.is_empty() || a.len() > b.len() {
            return false;
        }
        let last = a.len() - 1;
        if a[..last] != b[..last] {
            return false;
        }
        match (a[last], b[last]) {
            (Sym::Lit(x), Sym::Lit(y)) => {
                y.starts_with(x) && (x.len() < y.len() || a.len() < b.len())
            }
            (x, y) => x == y && a.len() < b.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceRule {
    pub id: RuleId,
    pub alternatives: Vec<Alternative>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<ChoiceRule>,
}

use Sym::{Class, Lit, Rule};

const ITEM: &[Alternative] = &[
    Alternative { label: "fof", shape: &[Lit("fof("), Rule("name"), Lit(","), Class("role"), Lit(","), Rule("formula"), Lit(")."),] },
    Alternative { label: "cnf", shape: &[Lit("cnf("), Rule("name"), Lit(","), Class("role"), Lit(","), Rule("formula"), Lit(")."),] },
    Alternative { label: "tpi", shape: &[Lit("tpi("), Rule("name"), Lit(","), Class("verb"), Lit(","), Rule("payload"), Lit(")."),] },
    Alternative { label: "include", shape: &[Lit("include("), Class("single_quoted"), Lit(").")] },
];

const UNITARY: &[Alternative] = &[
    Alternative { label: "quantified", shape: &[Rule("quantifier"), Lit("["), Rule("variables"), Lit("]"), Lit(":"), Rule("unit_formula")] },
    Alternative { label: "negation", shape: &[Lit("~"), Rule("unit_formula")] },
    Alternative { label: "parenthesized", shape: &[Lit("("), Rule("formula"), Lit(")")] },
    Alternative { label: "atomic", shape: &[Rule("atomic_formula")] },
];

const ATOMIC: &[Alternative] = &[
    Alternative { label: "defined", shape: &[Class("dollar_word")] },
    Alternative { label: "infix", shape: &[Rule("term"), Rule("infix_op"), Rule("term")] },
    Alternative { label: "plain", shape: &[Rule("term")] },
];

const TERM: &[Alternative] = &[
    Alternative { label: "variable", shape: &[Class("upper_word")] },
    Alternative { label: "function", shape: &[Class("lower_word"), Lit("("), Rule("arguments"), Lit(")")] },
    Alternative { label: "constant", shape: &[Class("lower_word")] },
];

const INFIX: &[Alternative] = &[
    Alternative { label: "!=", shape: &[Lit("!=")] },
    Alternative { label: "=", shape: &[Lit("=")] },
];

const BINARY: &[Alternative] = &[
    Alternative { label: "<=>", shape: &[Lit("<=>")] },
    Alternative { label: "<~>", shape: &[Lit("<~>")] },
    Alternative { label: "=>", shape: &[Lit("=>")] },
    Alternative { label: "<=", shape: &[Lit("<=")] },
    Alternative { label: "&", shape: &[Lit("&")] },
    Alternative { label: "|", shape: &[Lit("|")] },
];

const QUANTIFIER: &[Alternative] = &[
    Alternative { label: "!", shape: &[Lit("!")] },
    Alternative { label: "?", shape: &[Lit("?")] },
];

const NAME: &[Alternative] = &[
    Alternative { label: "lower_word", shape: &[Class("lower_word")] },
    Alternative { label: "single_quoted", shape: &[Class("single_quoted")] },
    Alternative { label: "integer", shape: &[Class("integer")] },
];

impl Grammar {
    /// The shipped alternative order.
    pub fn tptp() -> Self {
        let table = |id, alts: &[Alternative]| ChoiceRule {
            id,
            alternatives: alts.to_vec(),
        };
        Grammar {
            rules: vec![
                table(RuleId::Item, ITEM),
                table(RuleId::UnitaryFormula, UNITARY),
                table(RuleId::AtomicFormula, ATOMIC),
                table(RuleId::Term, TERM),
                table(RuleId::InfixOp, INFIX),
                table(RuleId::BinaryConnective, BINARY),
                table(RuleId::Quantifier, QUANTIFIER),
                table(RuleId::Name, NAME),
            ],
        }
    }

    pub fn rules(&self) -> &[ChoiceRule] {
        &self.rules
    }

    pub fn alternatives(&self, id: RuleId) -> &[Alternative] {
        self.rules
            .iter()
            .find(|r| r.id == id)
            .map(|r| r.alternatives.as_slice())
            .unwrap_or(&[])
    }

    /// Returns a copy with `id`'s alternatives permuted into `labels` order.
    ///
    /// `labels` must be a permutation of the existing labels.
    pub fn reordered(&self, id: RuleId, labels: &[&str]) -> Option<Self> {
        let mut g = self.clone();
        let rule = g.rules.iter_mut().find(|r| r.id == id)?;
        if labels.len() != rule.alternatives.len() {
            return None;
        }
        let mut alts = Vec::with_capacity(labels.len());
        for l in labels {
            let alt = rule.alternatives.iter().find(|a| a.label == *l)?;
            if alts.iter().any(|a: &Alternative| a.label == *l) {
                return None;
            }
            alts.push(*alt);
        }
        rule.alternatives = alts;
        Some(g)
    }
}

impl Default for Grammar {
    fn default() -> Self {
        Grammar::tptp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_prefix_masks() {
        let le = BINARY.iter().find(|a| a.label == "<=").unwrap();
        let iff = BINARY.iter().find(|a| a.label == "<=>").unwrap();
        let xor = BINARY.iter().find(|a| a.label == "<~>").unwrap();
        assert!(le.prefix_subsumes(iff));
        assert!(!iff.prefix_subsumes(le));
        assert!(!le.prefix_subsumes(xor));
        assert!(!iff.prefix_subsumes(xor));
    }

    #[test]
    fn structural_prefix_masks() {
        let plain = ATOMIC[2];
        let infix = ATOMIC[1];
        assert!(plain.prefix_subsumes(&infix));
        assert!(!infix.prefix_subsumes(&plain));
        assert!(TERM[2].prefix_subsumes(&TERM[1]));
    }

    #[test]
    fn reorder_requires_permutation() {
        let g = Grammar::tptp();
        assert!(g.reordered(RuleId::InfixOp, &["=", "!="]).is_some());
        assert!(g.reordered(RuleId::InfixOp, &["=", "="]).is_none());
        assert!(g.reordered(RuleId::InfixOp, &["="]).is_none());
    }
}
