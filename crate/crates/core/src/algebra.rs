//! The embedding arithmetic language.
//!
//! ```text
//! expr := sum ('|' sum)*              rejection, lowest precedence
//! sum  := atom (('+' | '-') atom)*
//! atom := WORD | '"' PHRASE '"' | '(' expr ')'
//! ```
//!
//! All binary operators associate to the left. `a | b` removes from `a` its
//! component along `b`: `a - (a·b / b·b) b`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecstore::{check_dim, Embedding, EmbeddingSet, Vector, VectorStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryOp {
    Add,
    Sub,
    Reject,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Reject => '|',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Word(String),
    Phrase(String),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Every store token the expression refers to, in left-to-right order.
    /// Phrase leaves contribute each of their whitespace-separated tokens.
    pub fn tokens(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Word(w) => out.push(w),
            Expr::Phrase(p) => out.extend(p.split_whitespace()),
            Expr::Binary(_, l, r) => {
                l.collect_tokens(out);
                r.collect_tokens(out);
            }
        }
    }
}

/// Fully parenthesized infix rendering; reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Word(w) => f.write_str(w),
            Expr::Phrase(p) => write!(f, "\"{p}\""),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Phrase(String),
    Op(BinaryOp),
    Open,
    Close,
    End,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '+' | '-' | '|' | '"')
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | '+' | '-' | '|' => {
                chars.next();
                let tok = match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '+' => Tok::Op(BinaryOp::Add),
                    '-' => Tok::Op(BinaryOp::Sub),
                    _ => Tok::Op(BinaryOp::Reject),
                };
                toks.push((tok, i));
            }
            '"' => {
                chars.next();
                let start = i + 1;
                let end = loop {
                    match chars.next() {
                        Some((j, '"')) => break j,
                        Some(_) => {}
                        None => {
                            return Err(Error::Parse {
                                offset: i,
                                message: "unterminated quoted phrase".into(),
                            })
                        }
                    }
                };
                let phrase = text[start..end].split_whitespace().collect::<Vec<_>>().join(" ");
                if phrase.is_empty() {
                    return Err(Error::Parse {
                        offset: i,
                        message: "empty atom: quoted phrase has no tokens".into(),
                    });
                }
                toks.push((Tok::Phrase(phrase), i));
            }
            _ => {
                let mut end = text.len();
                while let Some(&(j, c)) = chars.peek() {
                    if !is_word_char(c) {
                        end = j;
                        break;
                    }
                    chars.next();
                }
                toks.push((Tok::Word(text[i..end].to_string()), i));
            }
        }
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.sum()?;
        while let (Tok::Op(BinaryOp::Reject), _) = self.peek() {
            self.bump();
            let rhs = self.sum()?;
            lhs = Expr::binary(BinaryOp::Reject, lhs, rhs);
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.atom()?;
        while let (Tok::Op(op @ (BinaryOp::Add | BinaryOp::Sub)), _) = *self.peek() {
            self.bump();
            let rhs = self.atom()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Word(w) => Ok(Expr::Word(w)),
            Tok::Phrase(p) => Ok(Expr::Phrase(p)),
            Tok::Open => {
                if let (Tok::Close, at) = *self.peek() {
                    return Err(Error::Parse {
                        offset: at,
                        message: "empty atom: nothing between parentheses".into(),
                    });
                }
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::Close, _) => Ok(inner),
                    (Tok::End, at) => Err(Error::Parse {
                        offset: at,
                        message: "unbalanced parentheses: missing ')'".into(),
                    }),
                    (t, at) => Err(unexpected(&t, at)),
                }
            }
            Tok::End => Err(Error::Parse {
                offset,
                message: "unexpected end of input, expected a word, phrase or '('".into(),
            }),
            t => Err(unexpected(&t, offset)),
        }
    }
}

fn unexpected(tok: &Tok, offset: usize) -> Error {
    let message = match tok {
        Tok::Close => "unbalanced parentheses: unmatched ')'".to_string(),
        Tok::Word(w) => format!("unexpected word {w:?}"),
        Tok::Phrase(p) => format!("unexpected phrase \"{p}\""),
        Tok::Op(op) => format!("unexpected operator '{}'", op.symbol()),
        Tok::Open => "unexpected '('".to_string(),
        Tok::End => "unexpected end of input".to_string(),
    };
    Error::Parse { offset, message }
}

pub fn parse(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let ast = p.expr()?;
    match p.bump() {
        (Tok::End, _) => Ok(ast),
        (t, at) => Err(unexpected(&t, at)),
    }
}

/// Evaluates `ast` against `store`. The result is named by the canonical
/// rendering of the tree, which is also recorded as its derivation. A bare
/// phrase keeps its plain text as the name.
pub fn evaluate(ast: &Expr, store: &VectorStore) -> Result<Embedding> {
    let vector = eval_vector(ast, store)?;
    let rendered = ast.to_string();
    let name = match ast {
        Expr::Phrase(p) => p.clone(),
        _ => rendered.clone(),
    };
    Ok(Embedding {
        name,
        vector,
        derivation: Some(rendered),
    })
}

/// Parses and evaluates in one step.
pub fn eval_str(text: &str, store: &VectorStore) -> Result<Embedding> {
    evaluate(&parse(text)?, store)
}

fn eval_vector(ast: &Expr, store: &VectorStore) -> Result<Vector> {
    match ast {
        Expr::Word(w) => Ok(store.lookup(w)?.vector),
        Expr::Phrase(p) => Ok(store.embed_phrase(p)?.vector),
        Expr::Binary(op, l, r) => {
            let (a, b) = (eval_vector(l, store), eval_vector(r, store));
            let (a, b) = match (a, b) {
                (Err(Error::OutOfVocabulary(mut x)), Err(Error::OutOfVocabulary(y))) => {
                    for t in y {
                        if !x.contains(&t) {
                            x.push(t);
                        }
                    }
                    return Err(Error::OutOfVocabulary(x));
                }
                (a, b) => (a?, b?),
            };
            apply(*op, &a, &b).map_err(|e| match e {
                Error::ZeroAxis(_) => Error::ZeroAxis(r.to_string()),
                e => e,
            })
        }
    }
}

fn apply(op: BinaryOp, a: &Vector, b: &Vector) -> Result<Vector> {
    check_dim(a.dim(), b.dim())?;
    Ok(match op {
        BinaryOp::Add => a.add(b),
        BinaryOp::Sub => a.sub(b),
        BinaryOp::Reject => {
            let bb = b.norm_squared();
            if bb == 0.0 {
                return Err(Error::ZeroAxis(String::new()));
            }
            a.sub(&b.scale(a.dot(b) / bb))
        }
    })
}

/// Applies `op` to two embeddings, naming the result `(<a> op <b>)`.
pub fn combine(a: &Embedding, op: BinaryOp, b: &Embedding) -> Result<Embedding> {
    let vector = apply(op, &a.vector, &b.vector).map_err(|e| match e {
        Error::ZeroAxis(_) => Error::ZeroAxis(b.name.clone()),
        e => e,
    })?;
    let sym = op.symbol();
    let derivation = match (a.expression(), b.expression()) {
        (Some(x), Some(y)) => Some(format!("({x} {sym} {y})")),
        _ => None,
    };
    Ok(Embedding {
        name: format!("({} {sym} {})", a.name, b.name),
        vector,
        derivation,
    })
}

/// `a` with its component along `b` removed.
pub fn reject(a: &Embedding, b: &Embedding) -> Result<Embedding> {
    combine(a, BinaryOp::Reject, b)
}

/// Scalar coordinate of a vector along an axis: `(a·axis) / (axis·axis)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectionCoefficient(f64);

impl ProjectionCoefficient {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn projection_coefficient(a: &Embedding, axis: &Embedding) -> Result<ProjectionCoefficient> {
    check_dim(axis.dim(), a.dim())?;
    let aa = axis.vector.norm_squared();
    if aa == 0.0 {
        return Err(Error::ZeroAxis(axis.name.clone()));
    }
    Ok(ProjectionCoefficient(a.vector.dot(&axis.vector) / aa))
}

/// Applies `op` with a fixed right-hand side to every member of `set`.
pub fn set_apply(set: &EmbeddingSet, op: BinaryOp, rhs: &Embedding) -> Result<EmbeddingSet> {
    check_dim(set.dim(), rhs.dim())?;
    if op == BinaryOp::Reject && rhs.vector.norm_squared() == 0.0 {
        return Err(Error::ZeroAxis(rhs.name.clone()));
    }
    let mut out = EmbeddingSet::new(set.dim());
    for member in set {
        out.push(combine(member, op, rhs)?)?;
    }
    Ok(out)
}

/// Componentwise mean of the members, named `average(<count>)`.
///
/// Uses a running mean, so averaging identical vectors returns that vector
/// exactly.
pub fn average(set: &EmbeddingSet) -> Result<Embedding> {
    let mut members = set.iter();
    let first = members
        .next()
        .ok_or_else(|| Error::Empty("cannot average an empty set".into()))?;
    let mut mean = first.vector.as_slice().to_vec();
    for (i, e) in members.enumerate() {
        let n = (i + 2) as f64;
        for (m, x) in mean.iter_mut().zip(e.vector.as_slice()) {
            *m += (x - *m) / n;
        }
    }
    Ok(Embedding::new(format!("average({})", set.len()), mean))
}
