//! Scannerless packrat parser for the FOF/TPI subset.
//!
//! Each rule returns `Option<(value, next_pos)>`. Alternations consult the
//! [`Grammar`] for their order and commit to the first success. Failures
//! record the furthest position reached and what was expected there.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::*;
use super::error::ParseError;
use super::grammar::{Grammar, RuleId};
use super::lex;

/// Successful alternative counts, keyed by rule and label.
pub type Coverage = BTreeMap<(RuleId, &'static str), usize>;

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept `cnf(...)` statements (derivation mode).
    pub allow_cnf: bool,
}

pub struct Parser<'g, 's> {
    src: &'s str,
    grammar: &'g Grammar,
    opts: ParseOptions,
    furthest: usize,
    expected: BTreeSet<String>,
    fatal: Option<ParseError>,
    memo_unit: HashMap<usize, Option<(Formula, usize)>>,
    memo_term: HashMap<usize, Option<(Term, usize)>>,
    coverage: Coverage,
    lines: lex::LineIndex,
}

type P<T> = Option<(T, usize)>;

impl<'g, 's> Parser<'g, 's> {
    pub fn new(src: &'s str, grammar: &'g Grammar, opts: ParseOptions) -> Self {
        Parser {
            src,
            grammar,
            opts,
            furthest: 0,
            expected: BTreeSet::new(),
            fatal: None,
            memo_unit: HashMap::new(),
            memo_term: HashMap::new(),
            coverage: Coverage::new(),
            lines: lex::LineIndex::new(src),
        }
    }

    pub fn coverage(&self) -> &Coverage {
        &self.coverage
    }

    /// Parses the whole input as a sequence of top-level items.
    pub fn items(&mut self) -> Result<Vec<RawItem>, ParseError> {
        let mut out = Vec::new();
        let mut pos = 0;
        loop {
            pos = self.ws(pos);
            if pos >= self.src.len() {
                return Ok(out);
            }
            match self.item(pos) {
                Some((item, next)) => {
                    out.push(item);
                    pos = next;
                }
                None => return Err(self.error()),
            }
        }
    }

    /// Parses the whole input as a single formula.
    pub fn whole_formula(&mut self) -> Result<Formula, ParseError> {
        match self.formula(0) {
            Some((f, p)) => {
                let p = self.ws(p);
                if p == self.src.len() {
                    Ok(f)
                } else {
                    self.expect(p, "end of input");
                    Err(self.error())
                }
            }
            None => Err(self.error()),
        }
    }

    /// Parses the whole input as a single term.
    pub fn whole_term(&mut self) -> Result<Term, ParseError> {
        match self.term(0) {
            Some((t, p)) => {
                let p = self.ws(p);
                if p == self.src.len() {
                    Ok(t)
                } else {
                    self.expect(p, "end of input");
                    Err(self.error())
                }
            }
            None => Err(self.error()),
        }
    }

    /// Parses the whole input as comma-separated general terms, the shape
    /// of a statement annotation.
    pub fn whole_general_terms(&mut self) -> Result<Vec<GeneralTerm>, ParseError> {
        let mut items = Vec::new();
        let mut p = 0;
        loop {
            let Some((t, q)) = self.general_term(p) else {
                return Err(self.error());
            };
            items.push(t);
            match self.lit(q, ",") {
                Some(q) => p = q,
                None => {
                    let q = self.ws(q);
                    if q == self.src.len() {
                        return Ok(items);
                    }
                    self.expect(q, "end of input");
                    return Err(self.error());
                }
            }
        }
    }

    fn error(&mut self) -> ParseError {
        if let Some(e) = self.fatal.take() {
            return e;
        }
        let (line, column) = self.lines.line_col(self.furthest);
        ParseError::Syntax {
            line,
            column,
            expected: self.expected.iter().cloned().collect(),
        }
    }

    fn expect(&mut self, pos: usize, what: &str) {
        if pos > self.furthest {
            self.furthest = pos;
            self.expected.clear();
        }
        if pos == self.furthest {
            self.expected.insert(what.to_owned());
        }
    }

    fn cover(&mut self, rule: RuleId, label: &'static str) {
        *self.coverage.entry((rule, label)).or_default() += 1;
    }

    fn span(&self, start: usize, end: usize) -> Span {
        let (start_line, start_col) = self.lines.line_col(start);
        let (end_line, end_col) = self.lines.line_col(end);
        Span {
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    fn fatal<T>(&mut self, pos: usize, make: impl FnOnce(usize, usize) -> ParseError) -> Option<T> {
        if self.fatal.is_none() {
            let (line, column) = self.lines.line_col(pos);
            self.fatal = Some(make(line, column));
        }
        None
    }

    // ---- lexical ----

    fn ws(&self, pos: usize) -> usize {
        lex::skip_ws(self.src, pos)
    }

    fn lit(&mut self, pos: usize, s: &str) -> Option<usize> {
        let p = self.ws(pos);
        if self.src[p..].starts_with(s) {
            Some(p + s.len())
        } else {
            self.expect(p, &format!("\"{s}\""));
            None
        }
    }

    fn lexeme(
        &mut self,
        pos: usize,
        what: &str,
        scan: fn(&str, usize) -> Option<usize>,
    ) -> P<&'s str> {
        let p = self.ws(pos);
        match scan(self.src, p) {
            Some(end) => Some((&self.src[p..end], end)),
            None => {
                self.expect(p, what);
                None
            }
        }
    }

    fn lower_word(&mut self, pos: usize) -> P<&'s str> {
        self.lexeme(pos, "lower_word", lex::lower_word)
    }

    fn upper_word(&mut self, pos: usize) -> P<&'s str> {
        self.lexeme(pos, "upper_word", lex::upper_word)
    }

    fn keyword(&mut self, pos: usize, kw: &str) -> Option<usize> {
        let p = self.ws(pos);
        match lex::lower_word(self.src, p) {
            Some(end) if &self.src[p..end] == kw => Some(end),
            _ => {
                self.expect(p, &format!("\"{kw}\""));
                None
            }
        }
    }

    fn single_quoted(&mut self, pos: usize) -> P<String> {
        let (raw, end) = self.lexeme(pos, "single_quoted", lex::single_quoted)?;
        Some((lex::unquote(raw), end))
    }

    // ---- names ----

    fn name(&mut self, pos: usize) -> P<String> {
        for alt in self.grammar.alternatives(RuleId::Name) {
            let r = match alt.label {
                "lower_word" => self.lower_word(pos).map(|(w, p)| (w.to_owned(), p)),
                "single_quoted" => self.single_quoted(pos),
                "integer" => self
                    .lexeme(pos, "integer", lex::integer)
                    .map(|(w, p)| (w.to_owned(), p)),
                _ => None,
            };
            if r.is_some() {
                self.cover(RuleId::Name, alt.label);
                return r;
            }
        }
        None
    }

    // ---- items ----

    fn item(&mut self, pos: usize) -> P<RawItem> {
        let start = self.ws(pos);
        for alt in self.grammar.alternatives(RuleId::Item) {
            let r = match alt.label {
                "fof" => self.statement(start, Language::Fof),
                "cnf" => self.statement(start, Language::Cnf),
                "tpi" => self.tpi(start),
                "include" => self.include(start),
                _ => None,
            };
            if self.fatal.is_some() {
                return None;
            }
            if r.is_some() {
                self.cover(RuleId::Item, alt.label);
                return r;
            }
        }
        None
    }

    fn statement(&mut self, start: usize, lang: Language) -> P<RawItem> {
        let p = self.keyword(start, lang.keyword())?;
        let p = self.lit(p, "(")?;
        let (name, p) = self.name(p)?;
        let p = self.lit(p, ",")?;
        let (role_word, p) = self.lower_word(p)?;
        let role_pos = p - role_word.len();
        let Ok(role) = role_word.parse::<Role>() else {
            let role = role_word.to_owned();
            return self.fatal(role_pos, |line, column| ParseError::UnknownRole {
                role,
                line,
                column,
            });
        };
        let p = self.lit(p, ",")?;
        let (formula, p) = self.formula(p)?;
        let (source, p) = match self.lit(p, ",") {
            Some(p) => {
                let (text, p) = self.annotation(p)?;
                (Some(text), p)
            }
            None => (None, p),
        };
        let p = self.lit(p, ")")?;
        let end = self.lit(p, ".")?;
        if lang == Language::Cnf && !self.opts.allow_cnf {
            return self.fatal(start, |line, column| ParseError::CnfNotAllowed {
                name,
                line,
                column,
            });
        }
        let stmt = AnnotatedStatement {
            language: lang,
            name,
            role,
            formula,
            source,
            span: Some(self.span(start, end)),
        };
        Some((RawItem::Statement(stmt), end))
    }

    /// `source[, useful_info]`, returned verbatim.
    fn annotation(&mut self, pos: usize) -> P<String> {
        let start = self.ws(pos);
        let (_, mut p) = self.general_term(start)?;
        if let Some(q) = self.lit(p, ",") {
            let (_, q) = self.general_term(q)?;
            p = q;
        }
        Some((self.src[start..p].trim().to_owned(), p))
    }

    fn tpi(&mut self, start: usize) -> P<RawItem> {
        let p = self.keyword(start, "tpi")?;
        let p = self.lit(p, "(")?;
        let (name, p) = self.name(p)?;
        let p = self.lit(p, ",")?;
        let (verb_word, p) = self.lower_word(p)?;
        let verb_pos = p - verb_word.len();
        let Ok(verb) = verb_word.parse::<TpiVerb>() else {
            let verb = verb_word.to_owned();
            return self.fatal(verb_pos, |line, column| ParseError::UnknownVerb {
                verb,
                line,
                column,
            });
        };
        let p = self.lit(p, ",")?;
        let payload_pos = self.ws(p);
        let (lhs, p) = self.general_term(p)?;
        let (rhs, p) = match self.lit(p, "=>") {
            Some(q) => {
                let (t, q) = self.general_term(q)?;
                (Some(t), q)
            }
            None => (None, p),
        };
        let p = self.lit(p, ")")?;
        let end = self.lit(p, ".")?;
        let payload = match TpiPayload::from_parts(verb, lhs, rhs) {
            Ok(payload) => payload,
            Err(message) => {
                return self.fatal(payload_pos, |line, column| ParseError::MalformedPayload {
                    verb,
                    message,
                    line,
                    column,
                })
            }
        };
        let tpi = TpiInstruction {
            name,
            payload,
            span: Some(self.span(start, end)),
        };
        Some((RawItem::Tpi(tpi), end))
    }

    fn include(&mut self, start: usize) -> P<RawItem> {
        let p = self.keyword(start, "include")?;
        let p = self.lit(p, "(")?;
        let (path, p) = self.single_quoted(p)?;
        let p = self.lit(p, ")")?;
        let end = self.lit(p, ".")?;
        Some((RawItem::Include(path), end))
    }

    // ---- general terms ----

    fn general_term(&mut self, pos: usize) -> P<GeneralTerm> {
        let p0 = self.ws(pos);
        if let Some(p) = self.lit(p0, "[") {
            let (items, p) = self.general_list(p, "]")?;
            return Some((GeneralTerm::List(items), p));
        }
        let (data, p) = self.general_data(p0)?;
        match self.lit(p, ":") {
            Some(q) => {
                let (rest, q) = self.general_term(q)?;
                Some((GeneralTerm::Colon(Box::new(data), Box::new(rest)), q))
            }
            None => Some((data, p)),
        }
    }

    /// Comma-separated terms up to `close`, which is consumed.
    fn general_list(&mut self, pos: usize, close: &str) -> P<Vec<GeneralTerm>> {
        let mut items = Vec::new();
        if let Some(p) = self.lit(pos, close) {
            return Some((items, p));
        }
        let mut p = pos;
        loop {
            let (t, q) = self.general_term(p)?;
            items.push(t);
            if let Some(q) = self.lit(q, ",") {
                p = q;
                continue;
            }
            let q = self.lit(q, close)?;
            return Some((items, q));
        }
    }

    fn general_data(&mut self, pos: usize) -> P<GeneralTerm> {
        let p0 = self.ws(pos);
        let word = if let Some((w, p)) = self.lower_word(p0) {
            Some((w.to_owned(), p))
        } else if let Some((w, p)) = self.lexeme(p0, "dollar_word", lex::dollar_word) {
            Some((w.to_owned(), p))
        } else {
            self.single_quoted(p0)
        };
        if let Some((w, p)) = word {
            if let Some(q) = self.lit(p, "(") {
                let (args, q) = self.general_list(q, ")")?;
                return Some((GeneralTerm::App(w, args), q));
            }
            return Some((GeneralTerm::Word(w), p));
        }
        if let Some((v, p)) = self.upper_word(p0) {
            return Some((GeneralTerm::Var(v.to_owned()), p));
        }
        if let Some((n, p)) = self.lexeme(p0, "number", lex::number) {
            return Some((GeneralTerm::Number(n.to_owned()), p));
        }
        let (d, p) = self.lexeme(p0, "distinct_object", lex::distinct_object)?;
        Some((GeneralTerm::Distinct(lex::unquote(d)), p))
    }

    // ---- formulas ----

    pub(crate) fn formula(&mut self, pos: usize) -> P<Formula> {
        let (lhs, p) = self.unit(pos)?;
        let Some((conn, p2)) = self.binary_connective(p) else {
            return Some((lhs, p));
        };
        match self.binary_rest(lhs.clone(), conn, p2) {
            Some(r) => Some(r),
            // binary_formula failed: fall back to the unitary alternative
            None => Some((lhs, p)),
        }
    }

    fn binary_rest(&mut self, lhs: Formula, conn: ParsedConnective, pos: usize) -> P<Formula> {
        let (rhs, mut p) = self.unit(pos)?;
        match conn {
            ParsedConnective::Plain(c) if c.is_associative() => {
                let mut acc = Formula::binary(c, lhs, rhs);
                loop {
                    let save = p;
                    match self.binary_connective(p) {
                        Some((ParsedConnective::Plain(c2), q)) if c2 == c => match self.unit(q) {
                            Some((next, q2)) => {
                                acc = Formula::binary(c, acc, next);
                                p = q2;
                            }
                            None => return Some((acc, save)),
                        },
                        _ => return Some((acc, save)),
                    }
                }
            }
            ParsedConnective::Plain(c) => Some((Formula::binary(c, lhs, rhs), p)),
            ParsedConnective::ReverseImplies => Some((Formula::implies(rhs, lhs), p)),
        }
    }

    fn binary_connective(&mut self, pos: usize) -> P<ParsedConnective> {
        for alt in self.grammar.alternatives(RuleId::BinaryConnective) {
            if let Some(p) = self.lit(pos, alt.label) {
                self.cover(RuleId::BinaryConnective, alt.label);
                let c = match alt.label {
                    "&" => ParsedConnective::Plain(Connective::And),
                    "|" => ParsedConnective::Plain(Connective::Or),
                    "=>" => ParsedConnective::Plain(Connective::Implies),
                    "<=>" => ParsedConnective::Plain(Connective::Iff),
                    "<~>" => ParsedConnective::Plain(Connective::Xor),
                    "<=" => ParsedConnective::ReverseImplies,
                    _ => continue,
                };
                return Some((c, p));
            }
        }
        None
    }

    fn unit(&mut self, pos: usize) -> P<Formula> {
        let pos = self.ws(pos);
        if let Some(r) = self.memo_unit.get(&pos) {
            return r.clone();
        }
        let r = self.unit_uncached(pos);
        self.memo_unit.insert(pos, r.clone());
        r
    }

    fn unit_uncached(&mut self, pos: usize) -> P<Formula> {
        for alt in self.grammar.alternatives(RuleId::UnitaryFormula) {
            let r = match alt.label {
                "quantified" => self.quantified(pos),
                "negation" => self
                    .lit(pos, "~")
                    .and_then(|p| self.unit(p))
                    .map(|(f, p)| (Formula::not(f), p)),
                "parenthesized" => self.lit(pos, "(").and_then(|p| {
                    let (f, p) = self.formula(p)?;
                    let p = self.lit(p, ")")?;
                    Some((f, p))
                }),
                "atomic" => self.atomic(pos),
                _ => None,
            };
            if r.is_some() {
                self.cover(RuleId::UnitaryFormula, alt.label);
                return r;
            }
        }
        None
    }

    fn quantified(&mut self, pos: usize) -> P<Formula> {
        let mut found = None;
        for alt in self.grammar.alternatives(RuleId::Quantifier) {
            if let Some(p) = self.lit(pos, alt.label) {
                let q = match alt.label {
                    "!" => Quantifier::Forall,
                    "?" => Quantifier::Exists,
                    _ => continue,
                };
                self.cover(RuleId::Quantifier, alt.label);
                found = Some((q, p));
                break;
            }
        }
        let (q, p) = found?;
        let mut p = self.lit(p, "[")?;
        let mut vars = Vec::new();
        loop {
            let (v, q) = self.upper_word(p)?;
            vars.push(v.to_owned());
            match self.lit(q, ",") {
                Some(q) => p = q,
                None => {
                    p = self.lit(q, "]")?;
                    break;
                }
            }
        }
        let p = self.lit(p, ":")?;
        let (body, p) = self.unit(p)?;
        Some((Formula::Quant(q, vars, Box::new(body)), p))
    }

    fn atomic(&mut self, pos: usize) -> P<Formula> {
        for alt in self.grammar.alternatives(RuleId::AtomicFormula) {
            let r = match alt.label {
                "defined" => match self.lexeme(pos, "$true or $false", lex::dollar_word) {
                    Some(("$true", p)) => Some((Formula::True, p)),
                    Some(("$false", p)) => Some((Formula::False, p)),
                    _ => None,
                },
                "infix" => self.infix(pos),
                "plain" => match self.term(pos) {
                    Some((Term::App(f, args), p)) => Some((Formula::Atom(f, args), p)),
                    _ => None,
                },
                _ => None,
            };
            if r.is_some() {
                self.cover(RuleId::AtomicFormula, alt.label);
                return r;
            }
        }
        None
    }

    fn infix(&mut self, pos: usize) -> P<Formula> {
        let (lhs, p) = self.term(pos)?;
        let mut op = None;
        for alt in self.grammar.alternatives(RuleId::InfixOp) {
            if let Some(q) = self.lit(p, alt.label) {
                self.cover(RuleId::InfixOp, alt.label);
                op = Some((alt.label, q));
                break;
            }
        }
        let (op, p) = op?;
        let (rhs, p) = self.term(p)?;
        let eq = Formula::Eq(lhs, rhs);
        Some((if op == "!=" { Formula::not(eq) } else { eq }, p))
    }

    pub(crate) fn term(&mut self, pos: usize) -> P<Term> {
        let pos = self.ws(pos);
        if let Some(r) = self.memo_term.get(&pos) {
            return r.clone();
        }
        let r = self.term_uncached(pos);
        self.memo_term.insert(pos, r.clone());
        r
    }

    fn term_uncached(&mut self, pos: usize) -> P<Term> {
        for alt in self.grammar.alternatives(RuleId::Term) {
            let r = match alt.label {
                "variable" => self
                    .upper_word(pos)
                    .map(|(v, p)| (Term::Var(v.to_owned()), p)),
                "function" => self.function_term(pos),
                "constant" => self
                    .lower_word(pos)
                    .map(|(w, p)| (Term::constant(w), p)),
                _ => None,
            };
            if r.is_some() {
                self.cover(RuleId::Term, alt.label);
                return r;
            }
        }
        None
    }

    fn function_term(&mut self, pos: usize) -> P<Term> {
        let (f, p) = self.lower_word(pos)?;
        let mut p = self.lit(p, "(")?;
        let mut args = Vec::new();
        loop {
            let (t, q) = self.term(p)?;
            args.push(t);
            match self.lit(q, ",") {
                Some(q) => p = q,
                None => {
                    let q = self.lit(q, ")")?;
                    return Some((Term::App(f.to_owned(), args), q));
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ParsedConnective {
    Plain(Connective),
    /// `<=`, rewritten to `=>` with swapped operands.
    ReverseImplies,
}
