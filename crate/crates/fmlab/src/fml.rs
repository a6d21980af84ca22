//! The `.fml` formula format.
//!
//! ```text
//! phi(x0; y0) := R(x0,y0)
//! rho(x0,x1,x2; y0,y1,y2) := R(x0,y1) <-> R(x0,y2)
//! ```
//!
//! Head variables are `x0 … x{r-1}` then `y0 … y{s-1}`, in order; the `;`
//! may be omitted when there are no parameters. Connectives by binding
//! strength: `~`, `&`, `|`, `->` (right associative), `<->`. Quantifiers
//! `exists v.` and `forall v.` scope as far right as possible. A file may
//! hold several declarations; `#` starts a comment.

use std::collections::BTreeMap;

use fmlab_core::{Formula, PartitionedFormula, Signature, Var};

use crate::diag::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Define,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Dot,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("{s:?}"),
            Tok::End => "end of input".into(),
            t => format!("'{}'", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Define => ":=",
            Tok::Not => "~",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::Dot => ".",
            Tok::Ident(_) | Tok::End => "",
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, Diagnostic> {
    let mut out = Vec::new();
    let mut last = (1, 1);
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, len) = if rest.starts_with("<->") {
                (Tok::Iff, 3)
            } else if rest.starts_with("->") {
                (Tok::Implies, 2)
            } else if rest.starts_with(":=") {
                (Tok::Define, 2)
            } else {
                match c {
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    ',' => (Tok::Comma, 1),
                    ';' => (Tok::Semi, 1),
                    '~' => (Tok::Not, 1),
                    '&' => (Tok::And, 1),
                    '|' => (Tok::Or, 1),
                    '.' => (Tok::Dot, 1),
                    c if c.is_alphanumeric() || c == '_' => {
                        let mut j = i;
                        while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                            j += 1;
                        }
                        (Tok::Ident(chars[i..j].iter().collect()), j - i)
                    }
                    c => return Err(Diagnostic::new(line, col, format!("unexpected character {c:?}"))),
                }
            };
            out.push(Spanned { tok, line, col });
            i += len;
            last = (line, i + 1);
        }
    }
    out.push(Spanned { tok: Tok::End, line: last.0, col: last.1 });
    Ok(out)
}

/// Parses `x3`, `y0`, `z12`.
pub fn parse_var(s: &str) -> Option<Var> {
    let (sort, digits) = s.split_at(1.min(s.len()));
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0')) {
        return None;
    }
    let i: u32 = digits.parse().ok()?;
    match sort {
        "x" => Some(Var::X(i)),
        "y" => Some(Var::Y(i)),
        "z" => Some(Var::Z(i)),
        _ => None,
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: Option<&'a Signature>,
    arities: BTreeMap<String, usize>,
    scope: Vec<Var>,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(t.line, t.col, msg)
    }

    fn expect(&mut self, want: Tok) -> Result<Spanned, Diagnostic> {
        if self.peek().tok == want {
            Ok(self.next())
        } else {
            Err(self.error_here(format!("expected '{}', found {}", want.text(), self.peek().tok.describe())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Spanned), Diagnostic> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => Ok((s, self.next())),
            t => Err(self.error_here(format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn declaration(&mut self) -> Result<PartitionedFormula, Diagnostic> {
        let (name, _) = self.ident("a formula name")?;
        self.expect(Tok::LParen)?;
        let mut objs = Vec::new();
        let mut pars = Vec::new();
        let mut in_params = false;
        loop {
            match self.peek().tok {
                Tok::RParen => {
                    self.next();
                    break;
                }
                Tok::Semi if !in_params => {
                    self.next();
                    in_params = true;
                    continue;
                }
                Tok::Comma if !objs.is_empty() || !pars.is_empty() => {
                    self.next();
                }
                _ => {}
            }
            let (v, at) = self.ident("a variable")?;
            let (list, sort) = if in_params { (&mut pars, 'y') } else { (&mut objs, 'x') };
            let want = format!("{sort}{}", list.len());
            if v != want {
                return Err(Diagnostic::new(at.line, at.col, format!("expected variable {want}, found {v}")));
            }
            list.push(parse_var(&v).expect("checked name"));
            if !matches!(self.peek().tok, Tok::Comma | Tok::Semi | Tok::RParen) {
                return Err(self.error_here(format!("expected ',', ';' or ')', found {}", self.peek().tok.describe())));
            }
        }
        self.expect(Tok::Define)?;
        self.scope = objs.iter().chain(&pars).copied().collect();
        let body = self.iff()?;
        PartitionedFormula::new(&name, objs, pars, body).map_err(|e| self.error_here(e.to_string()))
    }

    fn iff(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.implies()?;
        while self.peek().tok == Tok::Iff {
            self.next();
            lhs = lhs.iff(self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, Diagnostic> {
        let lhs = self.or()?;
        if self.peek().tok == Tok::Implies {
            self.next();
            return Ok(lhs.implies(self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.and()?;
        while self.peek().tok == Tok::Or {
            self.next();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::And {
            self.next();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, Diagnostic> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Not => {
                self.next();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.next();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(q) if q == "exists" || q == "forall" => {
                let q = q.clone();
                self.next();
                let (v, at) = self.ident("a variable")?;
                let var = parse_var(&v).ok_or_else(|| Diagnostic::new(at.line, at.col, format!("bad variable name {v}")))?;
                self.expect(Tok::Dot)?;
                self.scope.push(var);
                let body = self.iff();
                self.scope.pop();
                let body = body?;
                Ok(if q == "exists" { Formula::exists(var, body) } else { Formula::forall(var, body) })
            }
            Tok::Ident(rel) => {
                let rel = rel.clone();
                self.next();
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                loop {
                    let (v, at) = self.ident("a variable")?;
                    let var = parse_var(&v).ok_or_else(|| Diagnostic::new(at.line, at.col, format!("bad variable name {v}")))?;
                    if !self.scope.contains(&var) {
                        return Err(Diagnostic::new(at.line, at.col, format!("undeclared variable {v}")));
                    }
                    args.push(var);
                    match self.peek().tok {
                        Tok::Comma => {
                            self.next();
                        }
                        _ => {
                            self.expect(Tok::RParen)?;
                            break;
                        }
                    }
                }
                self.check_atom(&rel, args.len(), &t)?;
                Ok(Formula::atom(&rel, &args))
            }
            tok => Err(self.error_here(format!("expected a formula, found {}", tok.describe()))),
        }
    }

    fn check_atom(&mut self, rel: &str, arity: usize, at: &Spanned) -> Result<(), Diagnostic> {
        if let Some(sig) = self.sig {
            match sig.arity(rel) {
                None => return Err(Diagnostic::new(at.line, at.col, format!("unknown relation {rel}"))),
                Some(a) if a != arity => return Err(Diagnostic::new(at.line, at.col, format!("arity mismatch: {rel} has arity {a}, used with {arity}"))),
                _ => {}
            }
        }
        match self.arities.get(rel) {
            Some(&a) if a != arity => Err(Diagnostic::new(at.line, at.col, format!("arity mismatch: {rel} used with {a} and {arity} arguments"))),
            _ => {
                self.arities.insert(rel.to_string(), arity);
                Ok(())
            }
        }
    }
}

/// All declarations in the text, checked against `sig` when given.
pub fn parse_formulas(text: &str, sig: Option<&Signature>) -> Result<Vec<PartitionedFormula>, Diagnostic> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig, arities: BTreeMap::new(), scope: Vec::new() };
    let mut out = Vec::new();
    while p.peek().tok != Tok::End {
        p.arities.clear();
        out.push(p.declaration()?);
    }
    if out.is_empty() {
        return Err(p.error_here("expected a formula declaration"));
    }
    Ok(out)
}

/// Exactly one declaration.
pub fn parse_formula(text: &str, sig: Option<&Signature>) -> Result<PartitionedFormula, Diagnostic> {
    let mut all = parse_formulas(text, sig)?;
    if all.len() > 1 {
        return Err(Diagnostic::new(1, 1, format!("expected one declaration, found {}", all.len())));
    }
    Ok(all.remove(0))
}

/// Text that parses back to `phi`.
pub fn formula_to_text(phi: &PartitionedFormula) -> String {
    let vars = |v: &[Var]| v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    format!("{}({}; {}) := {}", phi.name, vars(&phi.object_vars), vars(&phi.param_vars), phi.body)
}
