//! Exhaustive backtracking parser used as the oracle for alternative order.
//!
//! Every rule returns all of its successes (list-of-successes style), so no
//! alternative can mask another. It shares no code with the packrat parser
//! beyond the AST and the TPI payload constructor.

use std::cell::RefCell;
use std::collections::HashMap;

use super::ast::*;

type Many<T> = Vec<(T, usize)>;

const CONNECTIVES: [&str; 6] = ["<=>", "<~>", "=>", "<=", "&", "|"];

pub struct Backtracking<'s> {
    src: &'s str,
    allow_cnf: bool,
    memo_unit: RefCell<HashMap<usize, Many<Formula>>>,
    memo_term: RefCell<HashMap<usize, Many<Term>>>,
}

impl<'s> Backtracking<'s> {
    pub fn new(src: &'s str, allow_cnf: bool) -> Self {
        Backtracking {
            src,
            allow_cnf,
            memo_unit: RefCell::default(),
            memo_term: RefCell::default(),
        }
    }

    /// All complete parses of the input as an item sequence.
    pub fn all_parses(&self) -> Vec<Vec<RawItem>> {
        let mut done = Vec::new();
        let mut frontier: Vec<(usize, Vec<RawItem>)> = vec![(0, Vec::new())];
        while let Some((pos, items)) = frontier.pop() {
            let p = self.ws(pos);
            if p == self.src.len() {
                done.push(items);
                continue;
            }
            for (item, q) in self.item(p) {
                let mut next = items.clone();
                next.push(item);
                frontier.push((q, next));
            }
        }
        done
    }

    /// All complete parses of the input as one formula.
    pub fn all_formulas(&self) -> Vec<Formula> {
        self.formula(0)
            .into_iter()
            .filter(|(_, p)| self.ws(*p) == self.src.len())
            .map(|(f, _)| f)
            .collect()
    }

    fn ws(&self, mut p: usize) -> usize {
        let b = self.src.as_bytes();
        loop {
            if p < b.len() && b[p].is_ascii_whitespace() {
                p += 1;
            } else if p < b.len() && b[p] == b'%' {
                p = self.src[p..].find('\n').map_or(b.len(), |i| p + i);
            } else if self.src[p..].starts_with("/*") {
                p = self.src[p + 2..].find("*/").map_or(b.len(), |i| p + 2 + i + 2);
            } else {
                return p;
            }
        }
    }

    fn lit(&self, p: usize, s: &str) -> Option<usize> {
        let p = self.ws(p);
        self.src[p..].starts_with(s).then(|| p + s.len())
    }

    fn scan(&self, p: usize, first: impl Fn(char) -> bool) -> Option<(&'s str, usize)> {
        let p = self.ws(p);
        let rest = &self.src[p..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if first(c) => {}
            _ => return None,
        }
        let len = rest
            .char_indices()
            .skip(1)
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        Some((&rest[..len], p + len))
    }

    fn lower(&self, p: usize) -> Option<(&'s str, usize)> {
        self.scan(p, |c| c.is_ascii_lowercase())
    }

    fn upper(&self, p: usize) -> Option<(&'s str, usize)> {
        self.scan(p, |c| c.is_ascii_uppercase())
    }

    fn digits(&self, p: usize) -> Option<(&'s str, usize)> {
        let p = self.ws(p);
        let len = self.src[p..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.src.len() - p);
        (len > 0).then(|| (&self.src[p..p + len], p + len))
    }

    fn quoted(&self, p: usize, q: char) -> Option<(String, usize)> {
        let p = self.ws(p);
        let mut it = self.src[p..].char_indices();
        if it.next()?.1 != q {
            return None;
        }
        let mut out = String::new();
        let mut escaped = false;
        for (i, c) in it {
            if escaped {
                out.push(c);
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == q {
                return (!out.is_empty()).then(|| (out, p + i + 1));
            } else if c == '\n' {
                return None;
            } else {
                out.push(c);
            }
        }
        None
    }

    fn keyword(&self, p: usize, kw: &str) -> Option<usize> {
        match self.lower(p) {
            Some((w, q)) if w == kw => self.lit(q, "("),
            _ => None,
        }
    }

    fn names(&self, p: usize) -> Many<String> {
        let mut out = Vec::new();
        if let Some((w, q)) = self.lower(p) {
            out.push((w.to_owned(), q));
        }
        if let Some(r) = self.quoted(p, '\'') {
            out.push(r);
        }
        if let Some((w, q)) = self.digits(p) {
            out.push((w.to_owned(), q));
        }
        out
    }

    fn item(&self, p: usize) -> Many<RawItem> {
        let mut out = Vec::new();
        for lang in [Language::Fof, Language::Cnf] {
            if lang == Language::Cnf && !self.allow_cnf {
                continue;
            }
            if let Some(q) = self.keyword(p, lang.keyword()) {
                out.extend(self.statement_body(p, q, lang));
            }
        }
        if let Some(q) = self.keyword(p, "tpi") {
            out.extend(self.tpi_body(q));
        }
        if let Some(q) = self.keyword(p, "include") {
            if let Some((path, q)) = self.quoted(q, '\'') {
                if let Some(q) = self.lit(q, ")").and_then(|q| self.lit(q, ".")) {
                    out.push((RawItem::Include(path), q));
                }
            }
        }
        out
    }

    fn statement_body(&self, _start: usize, p: usize, lang: Language) -> Many<RawItem> {
        let mut out = Vec::new();
        for (name, q) in self.names(p) {
            let Some(q) = self.lit(q, ",") else { continue };
            let Some((role_word, q)) = self.lower(q) else { continue };
            let Ok(role) = role_word.parse::<Role>() else { continue };
            let Some(q) = self.lit(q, ",") else { continue };
            for (formula, r) in self.formula(q) {
                let mut tails: Vec<(Option<String>, usize)> = vec![(None, r)];
                if let Some(r2) = self.lit(r, ",") {
                    let start = self.ws(r2);
                    for (_, e) in self.annotation(r2) {
                        tails.push((Some(self.src[start..e].trim().to_owned()), e));
                    }
                }
                for (source, e) in tails {
                    if let Some(end) = self.lit(e, ")").and_then(|e| self.lit(e, ".")) {
                        let stmt = AnnotatedStatement {
                            language: lang,
                            name: name.clone(),
                            role,
                            formula: formula.clone(),
                            source,
                            span: None,
                        };
                        out.push((RawItem::Statement(stmt), end));
                    }
                }
            }
        }
        out
    }

    fn tpi_body(&self, p: usize) -> Many<RawItem> {
        let mut out = Vec::new();
        for (name, q) in self.names(p) {
            let Some(q) = self.lit(q, ",") else { continue };
            let Some((verb_word, q)) = self.lower(q) else { continue };
            let Ok(verb) = verb_word.parse::<TpiVerb>() else { continue };
            let Some(q) = self.lit(q, ",") else { continue };
            for (lhs, r) in self.gterm(q) {
                let mut options = vec![(lhs.clone(), None, r)];
                if let Some(r2) = self.lit(r, "=>") {
                    for (rhs, e) in self.gterm(r2) {
                        options.push((lhs.clone(), Some(rhs), e));
                    }
                }
                for (l, rhs, e) in options {
                    let Some(end) = self.lit(e, ")").and_then(|e| self.lit(e, ".")) else {
                        continue;
                    };
                    if let Ok(payload) = TpiPayload::from_parts(verb, l, rhs) {
                        let tpi = TpiInstruction {
                            name: name.clone(),
                            payload,
                            span: None,
                        };
                        out.push((RawItem::Tpi(tpi), end));
                    }
                }
            }
        }
        out
    }

    fn annotation(&self, p: usize) -> Many<()> {
        let mut out = Vec::new();
        for (_, q) in self.gterm(p) {
            out.push(((), q));
            if let Some(q2) = self.lit(q, ",") {
                for (_, r) in self.gterm(q2) {
                    out.push(((), r));
                }
            }
        }
        out
    }

    fn gterm(&self, p: usize) -> Many<GeneralTerm> {
        let mut out = Vec::new();
        if let Some(q) = self.lit(p, "[") {
            for (items, r) in self.gseq(q, "]") {
                out.push((GeneralTerm::List(items), r));
            }
        }
        for (d, q) in self.gdata(p) {
            out.push((d.clone(), q));
            if let Some(q2) = self.lit(q, ":") {
                for (rest, r) in self.gterm(q2) {
                    out.push((GeneralTerm::Colon(Box::new(d.clone()), Box::new(rest)), r));
                }
            }
        }
        out
    }

    fn gseq(&self, p: usize, close: &str) -> Many<Vec<GeneralTerm>> {
        let mut out = Vec::new();
        if let Some(q) = self.lit(p, close) {
            out.push((Vec::new(), q));
        }
        for (first, q) in self.gterm(p) {
            if let Some(r) = self.lit(q, close) {
                out.push((vec![first.clone()], r));
            }
            if let Some(r) = self.lit(q, ",") {
                for (mut rest, e) in self.gseq(r, close) {
                    if rest.is_empty() {
                        continue;
                    }
                    rest.insert(0, first.clone());
                    out.push((rest, e));
                }
            }
        }
        out
    }

    fn gdata(&self, p: usize) -> Many<GeneralTerm> {
        let mut out = Vec::new();
        let pw = self.ws(p);
        let mut words: Vec<(String, usize)> = Vec::new();
        if let Some((w, q)) = self.lower(pw) {
            words.push((w.to_owned(), q));
        }
        if self.src[pw..].starts_with('$') {
            let skip = if self.src[pw..].starts_with("$$") { 2 } else { 1 };
            if let Some((w, q)) = self.lower(pw + skip) {
                if q - w.len() == pw + skip {
                    words.push((format!("{}{w}", &self.src[pw..pw + skip]), q));
                }
            }
        }
        if let Some(r) = self.quoted(pw, '\'') {
            words.push(r);
        }
        for (w, q) in words {
            out.push((GeneralTerm::Word(w.clone()), q));
            if let Some(q2) = self.lit(q, "(") {
                for (args, r) in self.gseq(q2, ")") {
                    out.push((GeneralTerm::App(w.clone(), args), r));
                }
            }
        }
        if let Some((v, q)) = self.upper(pw) {
            out.push((GeneralTerm::Var(v.to_owned()), q));
        }
        if let Some(n) = self.number(pw) {
            out.push(n);
        }
        if let Some((d, q)) = self.quoted(pw, '"') {
            out.push((GeneralTerm::Distinct(d), q));
        }
        out
    }

    fn number(&self, p: usize) -> Option<(GeneralTerm, usize)> {
        let s = &self.src[p..];
        let bytes = s.as_bytes();
        let mut i = usize::from(matches!(bytes.first(), Some(b'-' | b'+')));
        let start_digits = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == start_digits {
            return None;
        }
        if i + 1 < bytes.len() && matches!(bytes[i], b'.' | b'/') && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
            let mut j = i + 1;
            if j < bytes.len() && matches!(bytes[j], b'-' | b'+') {
                j += 1;
            }
            let k = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > k {
                i = j;
            }
        }
        Some((GeneralTerm::Number(s[..i].to_owned()), p + i))
    }

    // ---- formulas ----

    fn formula(&self, p: usize) -> Many<Formula> {
        let mut out = Vec::new();
        for (lhs, q) in self.unit(p) {
            out.push((lhs.clone(), q));
            for (sym, q2) in self.connectives(q) {
                for (rhs, r) in self.unit(q2) {
                    match sym {
                        "&" | "|" => {
                            let c = if sym == "&" { Connective::And } else { Connective::Or };
                            self.chain(Formula::binary(c, lhs.clone(), rhs), c, sym, r, &mut out);
                        }
                        "<=" => out.push((Formula::implies(rhs, lhs.clone()), r)),
                        _ => {
                            let c = match sym {
                                "=>" => Connective::Implies,
                                "<=>" => Connective::Iff,
                                _ => Connective::Xor,
                            };
                            out.push((Formula::binary(c, lhs.clone(), rhs), r));
                        }
                    }
                }
            }
        }
        out
    }

    fn chain(&self, acc: Formula, c: Connective, sym: &str, p: usize, out: &mut Many<Formula>) {
        out.push((acc.clone(), p));
        for (s, q) in self.connectives(p) {
            if s != sym {
                continue;
            }
            for (next, r) in self.unit(q) {
                self.chain(Formula::binary(c, acc.clone(), next), c, sym, r, out);
            }
        }
    }

    fn connectives(&self, p: usize) -> Vec<(&'static str, usize)> {
        CONNECTIVES
            .iter()
            .filter_map(|c| self.lit(p, c).map(|q| (*c, q)))
            .collect()
    }

    fn unit(&self, p: usize) -> Many<Formula> {
        let p = self.ws(p);
        if let Some(r) = self.memo_unit.borrow().get(&p) {
            return r.clone();
        }
        let mut out = Vec::new();
        for (sym, q) in [("!", Quantifier::Forall), ("?", Quantifier::Exists)] {
            if let Some(r) = self.lit(p, sym) {
                for (vars, r) in self.variables(r) {
                    if let Some(r) = self.lit(r, ":") {
                        for (body, e) in self.unit(r) {
                            out.push((Formula::Quant(q, vars.clone(), Box::new(body)), e));
                        }
                    }
                }
            }
        }
        if let Some(q) = self.lit(p, "~") {
            for (f, r) in self.unit(q) {
                out.push((Formula::not(f), r));
            }
        }
        if let Some(q) = self.lit(p, "(") {
            for (f, r) in self.formula(q) {
                if let Some(e) = self.lit(r, ")") {
                    out.push((f, e));
                }
            }
        }
        if let Some(q) = self.lit(p, "$true") {
            out.push((Formula::True, q));
        }
        if let Some(q) = self.lit(p, "$false") {
            out.push((Formula::False, q));
        }
        for (lhs, q) in self.terms(p) {
            if let Term::App(f, args) = &lhs {
                out.push((Formula::Atom(f.clone(), args.clone()), q));
            }
            for (op, neg) in [("=", false), ("!=", true)] {
                if let Some(r) = self.lit(q, op) {
                    for (rhs, e) in self.terms(r) {
                        let eq = Formula::Eq(lhs.clone(), rhs);
                        out.push((if neg { Formula::not(eq) } else { eq }, e));
                    }
                }
            }
        }
        self.memo_unit.borrow_mut().insert(p, out.clone());
        out
    }

    fn variables(&self, p: usize) -> Many<Vec<String>> {
        let Some(mut q) = self.lit(p, "[") else {
            return Vec::new();
        };
        let mut vars = Vec::new();
        loop {
            let Some((v, r)) = self.upper(q) else {
                return Vec::new();
            };
            vars.push(v.to_owned());
            if let Some(r) = self.lit(r, ",") {
                q = r;
            } else if let Some(r) = self.lit(r, "]") {
                return vec![(vars, r)];
            } else {
                return Vec::new();
            }
        }
    }

    fn terms(&self, p: usize) -> Many<Term> {
        let p = self.ws(p);
        if let Some(r) = self.memo_term.borrow().get(&p) {
            return r.clone();
        }
        let mut out = Vec::new();
        if let Some((v, q)) = self.upper(p) {
            out.push((Term::Var(v.to_owned()), q));
        }
        if let Some((f, q)) = self.lower(p) {
            out.push((Term::constant(f), q));
            if let Some(q) = self.lit(q, "(") {
                for (args, r) in self.arguments(q) {
                    out.push((Term::App(f.to_owned(), args), r));
                }
            }
        }
        self.memo_term.borrow_mut().insert(p, out.clone());
        out
    }

    fn arguments(&self, p: usize) -> Many<Vec<Term>> {
        let mut out = Vec::new();
        for (t, q) in self.terms(p) {
            if let Some(r) = self.lit(q, ")") {
                out.push((vec![t.clone()], r));
            }
            if let Some(r) = self.lit(q, ",") {
                for (mut rest, e) in self.arguments(r) {
                    rest.insert(0, t.clone());
                    out.push((rest, e));
                }
            }
        }
        out
    }
}
