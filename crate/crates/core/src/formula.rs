//! Formulas of the logic, their dual, and additive normal forms.
//!
//! The tensor is strict, so words of literals are flat lists. Duals are
//! carried on atoms only, and the unit never appears inside a word: an empty
//! word stands for `I`.

use std::fmt;

use thiserror::Error;

use crate::atoms::{Category, ObjId};
use crate::syntax::{self, Cursor, ParseError, Token};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Zero,
    Unit,
    Atom(ObjId),
    Dual(ObjId),
    Tensor(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("0 may only occur as a whole formula")]
    ZeroInside,
    #[error("I may only occur immediately under a biproduct")]
    UnitUnderTensor,
}

/// An atom or a dual atom.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Atom(ObjId),
    Dual(ObjId),
}

impl Literal {
    pub fn star(self) -> Literal {
        match self {
            Literal::Atom(o) => Literal::Dual(o),
            Literal::Dual(o) => Literal::Atom(o),
        }
    }

    pub fn object(self) -> ObjId {
        match self {
            Literal::Atom(o) | Literal::Dual(o) => o,
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Literal::Dual(_))
    }

    pub fn to_formula(self) -> Formula {
        match self {
            Literal::Atom(o) => Formula::Atom(o),
            Literal::Dual(o) => Formula::Dual(o),
        }
    }

    pub fn display(self, cat: &Category) -> String {
        match self {
            Literal::Atom(o) => cat.object_name(o).to_string(),
            Literal::Dual(o) => format!("{}*", cat.object_name(o)),
        }
    }
}

/// A tensor word of literals; the empty word is `I`.
pub type Word = Vec<Literal>;

pub fn star_word(w: &[Literal]) -> Word {
    w.iter().map(|l| l.star()).collect()
}

/// Additive normal form: a sum of tensor words. The empty sum is `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Anf {
    pub components: Vec<Word>,
}

impl Anf {
    pub fn zero() -> Anf {
        Anf { components: vec![] }
    }

    pub fn unit() -> Anf {
        Anf {
            components: vec![vec![]],
        }
    }

    pub fn word(w: Word) -> Anf {
        Anf {
            components: vec![w],
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sum(&self, other: &Anf) -> Anf {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Anf { components }
    }

    /// Distributed tensor; components are ordered with `self` major.
    pub fn product(&self, other: &Anf) -> Anf {
        let mut components = Vec::with_capacity(self.len() * other.len());
        for a in &self.components {
            for b in &other.components {
                let mut w = a.clone();
                w.extend(b.iter().copied());
                components.push(w);
            }
        }
        Anf { components }
    }

    pub fn product_all<'a>(factors: impl IntoIterator<Item = &'a Anf>) -> Anf {
        factors
            .into_iter()
            .fold(Anf::unit(), |acc, f| acc.product(f))
    }

    pub fn star(&self) -> Anf {
        Anf {
            components: self.components.iter().map(|w| star_word(w)).collect(),
        }
    }

    /// Rebuild a formula: a right-nested sum of right-nested tensors.
    pub fn to_formula(&self) -> Formula {
        fn word(w: &[Literal]) -> Formula {
            match w {
                [] => Formula::Unit,
                [l] => l.to_formula(),
                [l, rest @ ..] => Formula::Tensor(Box::new(l.to_formula()), Box::new(word(rest))),
            }
        }
        fn sum(ws: &[Word]) -> Formula {
            match ws {
                [] => Formula::Zero,
                [w] => word(w),
                [w, rest @ ..] => Formula::Plus(Box::new(word(w)), Box::new(sum(rest))),
            }
        }
        sum(&self.components)
    }

    pub fn display(&self, cat: &Category) -> String {
        if self.components.is_empty() {
            return "0".to_string();
        }
        self.components
            .iter()
            .map(|w| display_word(w, cat))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn display_word(w: &[Literal], cat: &Category) -> String {
    if w.is_empty() {
        "I".to_string()
    } else {
        w.iter()
            .map(|l| l.display(cat))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// Parse the flat printed form of an ANF (`0`, or words joined by `+`, each
/// `I` or literals joined by `x`).
pub fn parse_anf(cur: &mut Cursor<'_>, cat: &Category) -> Result<Anf, ParseError> {
    if matches!(cur.peek(), Some(Token::Int(s)) if s == "0") {
        cur.next();
        return Ok(Anf::zero());
    }
    let mut components = Vec::new();
    loop {
        let mut word = Vec::new();
        if cur.is_ident("I") {
            cur.next();
        } else {
            loop {
                let line = cur.line;
                let name = cur.ident()?;
                let o = cat
                    .object(name)
                    .ok_or_else(|| ParseError::new(line, name, "unknown atom"))?;
                word.push(if cur.eat_sym("*") {
                    Literal::Dual(o)
                } else {
                    Literal::Atom(o)
                });
                if !cur.is_ident("x") {
                    break;
                }
                cur.next();
            }
        }
        components.push(word);
        if !cur.eat_sym("+") {
            break;
        }
    }
    Ok(Anf { components })
}

impl Formula {
    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }

    pub fn star(&self) -> Formula {
        match self {
            Formula::Zero => Formula::Zero,
            Formula::Unit => Formula::Unit,
            Formula::Atom(o) => Formula::Dual(*o),
            Formula::Dual(o) => Formula::Atom(*o),
            Formula::Tensor(a, b) => Formula::tensor(a.star(), b.star()),
            Formula::Plus(a, b) => Formula::plus(a.star(), b.star()),
        }
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(o) => Some(Literal::Atom(*o)),
            Formula::Dual(o) => Some(Literal::Dual(*o)),
            _ => None,
        }
    }

    pub fn contains_zero(&self) -> bool {
        match self {
            Formula::Zero => true,
            Formula::Tensor(a, b) | Formula::Plus(a, b) => a.contains_zero() || b.contains_zero(),
            _ => false,
        }
    }

    /// Check the unit restrictions: `0` only as the whole formula, `I` only
    /// as the whole formula or immediately under `+`.
    pub fn validate(&self) -> Result<(), FormulaError> {
        fn inner(f: &Formula, under_plus: bool) -> Result<(), FormulaError> {
            match f {
                Formula::Zero => Err(FormulaError::ZeroInside),
                Formula::Unit if !under_plus => Err(FormulaError::UnitUnderTensor),
                Formula::Tensor(a, b) => {
                    inner(a, false)?;
                    inner(b, false)
                }
                Formula::Plus(a, b) => {
                    inner(a, true)?;
                    inner(b, true)
                }
                _ => Ok(()),
            }
        }
        match self {
            Formula::Zero | Formula::Unit => Ok(()),
            other => inner(other, true),
        }
    }

    /// Number of `⊕` connectives.
    pub fn plus_count(&self) -> usize {
        match self {
            Formula::Tensor(a, b) => a.plus_count() + b.plus_count(),
            Formula::Plus(a, b) => 1 + a.plus_count() + b.plus_count(),
            _ => 0,
        }
    }

    pub fn anf(&self) -> Anf {
        match self {
            Formula::Zero => Anf::zero(),
            Formula::Unit => Anf::unit(),
            Formula::Atom(o) => Anf::word(vec![Literal::Atom(*o)]),
            Formula::Dual(o) => Anf::word(vec![Literal::Dual(*o)]),
            Formula::Tensor(a, b) => a.anf().product(&b.anf()),
            Formula::Plus(a, b) => a.anf().sum(&b.anf()),
        }
    }

    /// Number of ANF components, without building them.
    pub fn component_count(&self) -> usize {
        match self {
            Formula::Zero => 0,
            Formula::Unit | Formula::Atom(_) | Formula::Dual(_) => 1,
            Formula::Tensor(a, b) => a.component_count() * b.component_count(),
            Formula::Plus(a, b) => a.component_count() + b.component_count(),
        }
    }

    /// The branch choices (false = left, true = right) of the introduced `⊕`
    /// links, in pre-order, that select ANF component `index`.
    pub fn choices_for_component(&self, index: usize) -> Vec<bool> {
        let mut out = Vec::new();
        self.push_choices(index, &mut out);
        out
    }

    fn push_choices(&self, index: usize, out: &mut Vec<bool>) {
        match self {
            Formula::Tensor(a, b) => {
                let nb = b.component_count();
                a.push_choices(index / nb, out);
                b.push_choices(index % nb, out);
            }
            Formula::Plus(a, b) => {
                let na = a.component_count();
                if index < na {
                    out.push(false);
                    a.push_choices(index, out);
                } else {
                    out.push(true);
                    b.push_choices(index - na, out);
                }
            }
            _ => {}
        }
    }

    /// Inverse of [`Formula::choices_for_component`]: consumes choices from
    /// the iterator and returns the selected ANF component, or `None` if the
    /// iterator runs out.
    pub fn component_for_choices(&self, choices: &mut impl Iterator<Item = bool>) -> Option<usize> {
        match self {
            Formula::Tensor(a, b) => {
                let ia = a.component_for_choices(choices)?;
                let ib = b.component_for_choices(choices)?;
                Some(ia * b.component_count() + ib)
            }
            Formula::Plus(a, b) => {
                if choices.next()? {
                    Some(a.component_count() + b.component_for_choices(choices)?)
                } else {
                    a.component_for_choices(choices)
                }
            }
            _ => Some(0),
        }
    }

    pub fn display<'a>(&'a self, cat: &'a Category) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, cat }
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    cat: &'a Category,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Formula::Zero => out.write_str("0"),
            Formula::Unit => out.write_str("I"),
            Formula::Atom(o) => out.write_str(self.cat.object_name(*o)),
            Formula::Dual(o) => write!(out, "{}*", self.cat.object_name(*o)),
            Formula::Tensor(a, b) => {
                write!(out, "({} x {})", a.display(self.cat), b.display(self.cat))
            }
            Formula::Plus(a, b) => {
                write!(out, "({} + {})", a.display(self.cat), b.display(self.cat))
            }
        }
    }
}

/// Parse one formula from the cursor (no restriction check).
pub(crate) fn parse_formula_raw(
    cur: &mut Cursor<'_>,
    cat: &Category,
) -> Result<Formula, ParseError> {
    let line = cur.line;
    let mut f = match cur.next() {
        Some(Token::Int(s)) if s == "0" => Formula::Zero,
        Some(Token::Ident(s)) if s == "I" => Formula::Unit,
        Some(Token::Ident(s)) => {
            let o = cat
                .object(s)
                .ok_or_else(|| ParseError::new(line, s.as_str(), "unknown atom"))?;
            Formula::Atom(o)
        }
        Some(Token::Sym("(")) => {
            let a = parse_formula_raw(cur, cat)?;
            let tensor = if cur.is_ident("x") {
                cur.next();
                true
            } else if cur.eat_sym("+") {
                false
            } else {
                return Err(cur.error("expected `x` or `+`"));
            };
            let b = parse_formula_raw(cur, cat)?;
            cur.expect_sym(")")?;
            if tensor {
                Formula::tensor(a, b)
            } else {
                Formula::plus(a, b)
            }
        }
        Some(t) => return Err(ParseError::new(line, t.to_string(), "expected formula")),
        None => return Err(ParseError::new(line, "end of line", "expected formula")),
    };
    while cur.eat_sym("*") {
        f = f.star();
    }
    Ok(f)
}

/// Parse and validate a formula from a cursor.
pub(crate) fn parse_formula_at(
    cur: &mut Cursor<'_>,
    cat: &Category,
) -> Result<Formula, FormulaError> {
    let f = parse_formula_raw(cur, cat)?;
    f.validate()?;
    Ok(f)
}

/// Parse a complete formula from text.
pub fn parse_formula(text: &str, cat: &Category) -> Result<Formula, FormulaError> {
    let toks = syntax::tokenize(text, 1)?;
    let mut cur = Cursor::new(&toks, 1);
    let f = parse_formula_at(&mut cur, cat)?;
    cur.expect_end()?;
    Ok(f)
}
