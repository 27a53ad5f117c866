//! Exact matrix models: dimensions for atoms, matrices for generator
//! arrows, and two evaluators (nets directly, free arrows functorially).
//!
//! A word indexes its basis row-major, first literal most significant, and
//! `dim(A*) = dim(A)`. The name of `f: A -> B` has entry `M_f[j][i]` at
//! `(A* index i, B index j)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::atoms::{Category, ObjId};
use crate::formula::{Anf, Formula, Literal};
use crate::freecat::{FreeArrow, KLTriple};
use crate::net::{CutLabel, LinkKind, Net, Port, Slice};
use crate::syntax::{self, Cursor, ParseError, Token};

/// A commutative semiring with an involution.
pub trait Semiring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    fn parse(cur: &mut Cursor<'_>) -> Result<Self, ParseError>;
}

/// `a + b√2 + c·i + d·i√2` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Scalar {
        Scalar { a, b, c, d }
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::new(BigRational::from_integer(n.into()), q0(), q0(), q0())
    }

    pub fn sqrt2() -> Scalar {
        Scalar::new(q0(), BigRational::one(), q0(), q0())
    }

    pub fn i() -> Scalar {
        Scalar::new(q0(), q0(), BigRational::one(), q0())
    }
}

fn q0() -> BigRational {
    BigRational::zero()
}

/// Product in ℚ(√2): `(a1 + b1√2)(a2 + b2√2)`.
fn mul2(
    a1: &BigRational,
    b1: &BigRational,
    a2: &BigRational,
    b2: &BigRational,
) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(2.into());
    (a1 * a2 + two * b1 * b2, a1 * b2 + b1 * a2)
}

impl Semiring for Scalar {
    fn zero() -> Self {
        Scalar::new(q0(), q0(), q0(), q0())
    }

    fn one() -> Self {
        Scalar::int(1)
    }

    fn add(&self, o: &Self) -> Self {
        Scalar::new(
            &self.a + &o.a,
            &self.b + &o.b,
            &self.c + &o.c,
            &self.d + &o.d,
        )
    }

    fn mul(&self, o: &Self) -> Self {
        // (p1 + i q1)(p2 + i q2) with p, q in ℚ(√2).
        let (pp_a, pp_b) = mul2(&self.a, &self.b, &o.a, &o.b);
        let (qq_a, qq_b) = mul2(&self.c, &self.d, &o.c, &o.d);
        let (pq_a, pq_b) = mul2(&self.a, &self.b, &o.c, &o.d);
        let (qp_a, qp_b) = mul2(&self.c, &self.d, &o.a, &o.b);
        Scalar::new(pp_a - qq_a, pp_b - qq_b, pq_a + qp_a, pq_b + qp_b)
    }

    fn conj(&self) -> Self {
        Scalar::new(self.a.clone(), self.b.clone(), -&self.c, -&self.d)
    }

    fn parse(cur: &mut Cursor<'_>) -> Result<Self, ParseError> {
        if cur.eat_sym("(") {
            let a = parse_rational(cur)?;
            cur.expect_sym(",")?;
            let b = parse_rational(cur)?;
            cur.expect_sym(",")?;
            let c = parse_rational(cur)?;
            cur.expect_sym(",")?;
            let d = parse_rational(cur)?;
            cur.expect_sym(")")?;
            Ok(Scalar::new(a, b, c, d))
        } else {
            Ok(Scalar::new(parse_rational(cur)?, q0(), q0(), q0()))
        }
    }
}

fn parse_rational(cur: &mut Cursor<'_>) -> Result<BigRational, ParseError> {
    let line = cur.line;
    let neg = cur.eat_sym("-");
    let p: BigInt = cur.int()?.parse().expect("digits");
    let q: BigInt = if cur.eat_sym("/") {
        cur.int()?.parse().expect("digits")
    } else {
        BigInt::one()
    };
    if q.is_zero() {
        return Err(ParseError::new(line, "0", "zero denominator"));
    }
    let r = BigRational::new(p, q);
    Ok(if neg { -r } else { r })
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() && self.c.is_zero() && self.d.is_zero() {
            f.write_str(&fmt_rational(&self.a))
        } else {
            write!(
                f,
                "({}, {}, {}, {})",
                fmt_rational(&self.a),
                fmt_rational(&self.b),
                fmt_rational(&self.c),
                fmt_rational(&self.d)
            )
        }
    }
}

/// The boolean semiring, for relational models.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bool(pub bool);

impl Semiring for Bool {
    fn zero() -> Self {
        Bool(false)
    }

    fn one() -> Self {
        Bool(true)
    }

    fn add(&self, o: &Self) -> Self {
        Bool(self.0 || o.0)
    }

    fn mul(&self, o: &Self) -> Self {
        Bool(self.0 && o.0)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn parse(cur: &mut Cursor<'_>) -> Result<Self, ParseError> {
        let line = cur.line;
        match cur.int()? {
            "0" => Ok(Bool(false)),
            "1" => Ok(Bool(true)),
            other => Err(ParseError::new(line, other, "boolean scalars are 0 or 1")),
        }
    }
}

impl fmt::Display for Bool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Semiring> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Matrix<S> {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix<S> {
        Matrix::new(rows, cols, vec![S::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Matrix<S> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    fn accumulate(&mut self, i: usize, j: usize, v: &S) {
        let k = i * self.cols + j;
        self.data[k] = self.data[k].add(v);
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn mul(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.accumulate(i, j, &a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum shape");
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn kron(&self, o: &Matrix<S>) -> Matrix<S> {
        let mut out = Matrix::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        out.set(i * o.rows + k, j * o.cols + l, a.mul(o.get(k, l)));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Matrix<S> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// Copy `block` into `self` with its top-left corner at `(r, c)`.
    fn place(&mut self, r: usize, c: usize, block: &Matrix<S>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.accumulate(r + i, c + j, block.get(i, j));
            }
        }
    }
}

impl<S: Semiring> fmt::Display for Matrix<S> {
    /// Column vectors print as a flat list, other matrices row by row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |i: usize, cols: usize| {
            (0..cols)
                .map(|j| self.data[i * cols + j].to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        if self.cols == 1 {
            let items: Vec<String> = self.data.iter().map(S::to_string).collect();
            write!(f, "[{}]", items.join(", "))
        } else {
            let rows: Vec<String> = (0..self.rows)
                .map(|i| format!("[{}]", row(i, self.cols)))
                .collect();
            write!(f, "[ {} ]", rows.join(" ; "))
        }
    }
}

impl<S: Semiring> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, o: Self) -> Matrix<S> {
        Matrix::add(self, o)
    }
}

impl<S: Semiring> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, o: Self) -> Matrix<S> {
        Matrix::mul(self, o)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("missing `model <name> over <category>` header")]
    MissingHeader,
    #[error("model is over `{found}`, but the category is `{expected}`")]
    CategoryMismatch { expected: String, found: String },
    #[error("no dimension given for object `{0}`")]
    MissingDim(String),
    #[error("dimension of `{0}` must be positive")]
    ZeroDim(String),
    #[error("no matrix given for arrow `{0}`")]
    MissingMatrix(String),
    #[error("matrix for `{arrow}` must be {expected}, found {found}")]
    Shape {
        arrow: String,
        expected: String,
        found: String,
    },
    #[error("composition law fails for {f} ; {g} = {h}: M({h}) = {lhs} but M({g})·M({f}) = {rhs}")]
    Composition {
        f: String,
        g: String,
        h: String,
        lhs: String,
        rhs: String,
    },
    #[error("dagger law fails for {f}† = {g}: M({g}) = {lhs} but M({f})† = {rhs}")]
    Dagger {
        f: String,
        g: String,
        lhs: String,
        rhs: String,
    },
}

/// A validated matrix model of a category.
#[derive(Clone, Debug)]
pub struct Interpretation<S> {
    name: String,
    dims: Vec<usize>,
    mats: Vec<Matrix<S>>,
}

/// A model with its scalar semiring.
#[derive(Clone, Debug)]
pub enum Model {
    Exact(Interpretation<Scalar>),
    Bool(Interpretation<Bool>),
}

impl Model {
    pub fn name(&self) -> &str {
        match self {
            Model::Exact(m) => &m.name,
            Model::Bool(m) => &m.name,
        }
    }

    /// Evaluate a net and print the resulting vector.
    pub fn eval_net_text(&self, n: &Net, cat: &Category) -> String {
        match self {
            Model::Exact(m) => eval_net(n, m, cat).to_string(),
            Model::Bool(m) => eval_net(n, m, cat).to_string(),
        }
    }
}

/// Parse and validate a model file.
pub fn load_model(text: &str, cat: &Category) -> Result<Model, ModelError> {
    let lines = syntax::lines(text)?;
    let bool_mode = lines
        .iter()
        .any(|(_, t)| matches!(t.first(), Some(Token::Ident(s)) if s == "scalars"));
    if bool_mode {
        Ok(Model::Bool(load_with(&lines, cat)?))
    } else {
        Ok(Model::Exact(load_with(&lines, cat)?))
    }
}

fn load_with<S: Semiring>(
    lines: &[(usize, Vec<Token>)],
    cat: &Category,
) -> Result<Interpretation<S>, ModelError> {
    let mut name = None;
    let mut dims: Vec<Option<usize>> = vec![None; cat.object_count()];
    let mut given: Vec<Option<(usize, Vec<Vec<S>>)>> = vec![None; cat.arrow_count()];
    for (line, toks) in lines {
        let mut cur = Cursor::new(toks, *line);
        match cur.ident()? {
            "model" => {
                name = Some(cur.ident()?.to_string());
                cur.expect_keyword("over")?;
                let over = cur.ident()?;
                if over != cat.name() {
                    return Err(ModelError::CategoryMismatch {
                        expected: cat.name().to_string(),
                        found: over.to_string(),
                    });
                }
            }
            "scalars" => {
                let kind = cur.ident()?;
                if kind != "bool" {
                    return Err(
                        ParseError::new(*line, kind, "only `scalars bool` is supported").into(),
                    );
                }
            }
            "dim" => {
                let obj = cur.ident()?;
                let o = cat
                    .object(obj)
                    .ok_or_else(|| ParseError::new(*line, obj, "unknown object"))?;
                cur.expect_sym("=")?;
                let n = cur.usize()?;
                if n == 0 {
                    return Err(ModelError::ZeroDim(obj.to_string()));
                }
                dims[o.index()] = Some(n);
            }
            "mat" => {
                let f = cat.parse_arrow_ref(&mut cur)?;
                cur.expect_sym("=")?;
                cur.expect_sym("[")?;
                let mut rows = Vec::new();
                loop {
                    cur.expect_sym("[")?;
                    let mut row = Vec::new();
                    if !cur.is_sym("]") {
                        loop {
                            row.push(S::parse(&mut cur)?);
                            if !cur.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    cur.expect_sym("]")?;
                    rows.push(row);
                    if !cur.eat_sym(";") {
                        break;
                    }
                }
                cur.expect_sym("]")?;
                given[f.index()] = Some((*line, rows));
            }
            other => return Err(ParseError::new(*line, other, "unknown directive").into()),
        }
        cur.expect_end()?;
    }
    let name = name.ok_or(ModelError::MissingHeader)?;
    let dims: Vec<usize> = cat
        .objects()
        .map(|o| {
            dims[o.index()].ok_or_else(|| ModelError::MissingDim(cat.object_name(o).to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mut mats = Vec::with_capacity(cat.arrow_count());
    for f in cat.arrows() {
        let (r, c) = (dims[cat.cod(f).index()], dims[cat.dom(f).index()]);
        let m = match given[f.index()].take() {
            None if cat.is_identity(f) => Matrix::identity(r),
            None => return Err(ModelError::MissingMatrix(cat.arrow_name(f).to_string())),
            Some((_, rows)) => {
                let found = format!("{}x{}", rows.len(), rows.first().map_or(0, Vec::len));
                if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                    return Err(ModelError::Shape {
                        arrow: cat.arrow_name(f).to_string(),
                        expected: format!("{r}x{c}"),
                        found,
                    });
                }
                Matrix::new(r, c, rows.into_iter().flatten().collect())
            }
        };
        mats.push(m);
    }
    let interp = Interpretation { name, dims, mats };
    interp.validate(cat)?;
    Ok(interp)
}

impl<S: Semiring> Interpretation<S> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self, o: ObjId) -> usize {
        self.dims[o.index()]
    }

    pub fn matrix(&self, f: crate::atoms::ArrowId) -> &Matrix<S> {
        &self.mats[f.index()]
    }

    fn validate(&self, cat: &Category) -> Result<(), ModelError> {
        for f in cat.arrows() {
            if cat.is_identity(f) && *self.matrix(f) != Matrix::identity(self.dim(cat.dom(f))) {
                return Err(ModelError::Shape {
                    arrow: cat.arrow_name(f).to_string(),
                    expected: "the identity matrix".to_string(),
                    found: self.matrix(f).to_string(),
                });
            }
            for g in cat.arrows().filter(|&g| cat.dom(g) == cat.cod(f)) {
                let h = cat.compose(f, g).expect("total");
                let rhs = self.matrix(g).mul(self.matrix(f));
                if *self.matrix(h) != rhs {
                    return Err(ModelError::Composition {
                        f: cat.arrow_name(f).to_string(),
                        g: cat.arrow_name(g).to_string(),
                        h: cat.arrow_name(h).to_string(),
                        lhs: self.matrix(h).to_string(),
                        rhs: rhs.to_string(),
                    });
                }
            }
            let g = cat.dagger(f);
            let rhs = self.matrix(f).conj_transpose();
            if *self.matrix(g) != rhs {
                return Err(ModelError::Dagger {
                    f: cat.arrow_name(f).to_string(),
                    g: cat.arrow_name(g).to_string(),
                    lhs: self.matrix(g).to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
        Ok(())
    }

    fn literal_dim(&self, l: Literal) -> usize {
        self.dim(l.object())
    }

    pub fn word_dim(&self, w: &[Literal]) -> usize {
        w.iter().map(|&l| self.literal_dim(l)).product()
    }

    /// Total dimension of an ANF: the sum over its components.
    pub fn anf_dim(&self, a: &Anf) -> usize {
        a.components.iter().map(|w| self.word_dim(w)).sum()
    }

    fn offsets(&self, a: &Anf) -> Vec<usize> {
        let mut out = Vec::with_capacity(a.len());
        let mut acc = 0;
        for w in &a.components {
            out.push(acc);
            acc += self.word_dim(w);
        }
        out
    }
}

/// Evaluate one triple as a `dim(cod) x dim(dom)` matrix.
pub fn eval_triple<S: Semiring>(t: &KLTriple, m: &Interpretation<S>) -> Matrix<S> {
    let signed = t.signed();
    let dims: Vec<usize> = signed.iter().map(|&l| m.literal_dim(l)).collect();
    let (rows, cols) = (m.word_dim(&t.cod), m.word_dim(&t.dom));
    let scalar = t
        .loops
        .iter()
        .fold(S::one(), |acc, l| acc.mul(&m.matrix(l.arrow()).trace()));
    let mut out = Matrix::zeros(rows, cols);
    if scalar.is_zero() {
        return out;
    }
    let d = t.dom.len();
    let mut idx = vec![0usize; signed.len()];
    for col in 0..cols {
        let mut rem = col;
        for k in (0..d).rev() {
            idx[k] = rem % dims[k];
            rem /= dims[k];
        }
        for row in 0..rows {
            let mut rem = row;
            for k in (d..signed.len()).rev() {
                idx[k] = rem % dims[k];
                rem /= dims[k];
            }
            let mut v = scalar.clone();
            for &(n, p, f) in &t.pairs {
                v = v.mul(m.matrix(f).get(idx[p], idx[n]));
                if v.is_zero() {
                    break;
                }
            }
            if !v.is_zero() {
                out.set(row, col, v);
            }
        }
    }
    out
}

/// The functorial extension of the model to free arrows.
pub fn eval_free<S: Semiring>(f: &FreeArrow, m: &Interpretation<S>) -> Matrix<S> {
    let (ro, co) = (m.offsets(f.cod()), m.offsets(f.dom()));
    let mut out = Matrix::zeros(m.anf_dim(f.cod()), m.anf_dim(f.dom()));
    for (&(i, j), ts) in f.entries() {
        for t in ts {
            out.place(ro[i], co[j], &eval_triple(t, m));
        }
    }
    out
}

/// A basis vector of one open wire: ANF component and index inside it.
type Basis = (usize, usize);

struct Wire {
    port: Port,
    anf: Anf,
}

/// Evaluate a net directly by contracting its links, as a column vector
/// over the ANF of the tensor of its conclusions.
pub fn eval_net<S: Semiring>(n: &Net, m: &Interpretation<S>, cat: &Category) -> Matrix<S> {
    let anfs: Vec<Anf> = n.conclusions().iter().map(Formula::anf).collect();
    let total = Anf::product_all(anfs.iter());
    let mut out = Matrix::zeros(m.anf_dim(&total), 1);
    for s in n.slices() {
        for (row, v) in eval_slice(s, &anfs, m, cat) {
            out.accumulate(row, 0, &v);
        }
    }
    out
}

fn eval_slice<S: Semiring>(
    s: &Slice,
    anfs: &[Anf],
    m: &Interpretation<S>,
    cat: &Category,
) -> Vec<(usize, S)> {
    let mut wires: Vec<Wire> = Vec::new();
    let mut terms: HashMap<Vec<Basis>, S> = HashMap::new();
    terms.insert(vec![], S::one());
    let mut done = std::collections::HashSet::new();
    let ids: Vec<_> = s.links().map(|(id, _)| id).collect();
    let take =
        |wires: &mut Vec<Wire>, p: Port| wires.iter().position(|w| w.port == p).expect("open wire");
    while done.len() < ids.len() {
        for &id in &ids {
            let link = s.link(id).expect("listed");
            if done.contains(&id) || !link.inputs.iter().all(|p| done.contains(&p.link)) {
                continue;
            }
            done.insert(id);
            match &link.kind {
                LinkKind::Axiom(f) => {
                    let mf = m.matrix(*f);
                    let mut next = HashMap::new();
                    for (basis, v) in &terms {
                        for i in 0..mf.cols() {
                            for j in 0..mf.rows() {
                                let e = mf.get(j, i);
                                if e.is_zero() {
                                    continue;
                                }
                                let mut b = basis.clone();
                                b.push((0, i));
                                b.push((0, j));
                                next.insert(b, v.mul(e));
                            }
                        }
                    }
                    terms = next;
                    wires.push(Wire {
                        port: Port::new(id, 0),
                        anf: Anf::word(vec![Literal::Dual(cat.dom(*f))]),
                    });
                    wires.push(Wire {
                        port: Port::new(id, 1),
                        anf: Anf::word(vec![Literal::Atom(cat.cod(*f))]),
                    });
                }
                LinkKind::Unit => {
                    for b in terms.keys().cloned().collect::<Vec<_>>() {
                        let v = terms.remove(&b).expect("present");
                        let mut b = b;
                        b.push((0, 0));
                        terms.insert(b, v);
                    }
                    wires.push(Wire {
                        port: Port::new(id, 0),
                        anf: Anf::unit(),
                    });
                }
                LinkKind::Times => {
                    let ka = take(&mut wires, link.inputs[0]);
                    let kb = take(&mut wires, link.inputs[1]);
                    let (a, b) = (wires[ka].anf.clone(), wires[kb].anf.clone());
                    let merged = a.product(&b);
                    let terms_old = std::mem::take(&mut terms);
                    for (basis, v) in terms_old {
                        let ((ca, ia), (cb, ib)) = (basis[ka], basis[kb]);
                        let db = m.word_dim(&b.components[cb]);
                        let mut nb = remove_two(&basis, ka, kb);
                        nb.push((ca * b.len() + cb, ia * db + ib));
                        add_term(&mut terms, nb, v);
                    }
                    remove_two_wires(&mut wires, ka, kb);
                    wires.push(Wire {
                        port: Port::new(id, 0),
                        anf: merged,
                    });
                }
                LinkKind::Plus1(other) | LinkKind::Plus2(other) => {
                    let k = take(&mut wires, link.inputs[0]);
                    let a = wires[k].anf.clone();
                    let b = other.anf();
                    let (sum, shift) = match link.kind {
                        LinkKind::Plus1(_) => (a.sum(&b), 0),
                        _ => (b.sum(&a), b.len()),
                    };
                    let terms_old = std::mem::take(&mut terms);
                    for (mut basis, v) in terms_old {
                        let (c, i) = basis.remove(k);
                        basis.push((c + shift, i));
                        add_term(&mut terms, basis, v);
                    }
                    wires.remove(k);
                    wires.push(Wire {
                        port: Port::new(id, 0),
                        anf: sum,
                    });
                }
                LinkKind::Cut(label) => {
                    let (p, q) = (link.inputs[0], link.inputs[1]);
                    let (kp, kq) = (take(&mut wires, p), take(&mut wires, q));
                    let terms_old = std::mem::take(&mut terms);
                    for (basis, v) in terms_old {
                        let (bp, bq) = (basis[kp], basis[kq]);
                        let w = match label {
                            CutLabel::Identity => {
                                if bp != bq {
                                    continue;
                                }
                                v
                            }
                            CutLabel::Arrow(g) => {
                                // The atom input indexes the domain of g.
                                let (src, dst) =
                                    if s.port_label(cat, p) == Formula::Atom(cat.dom(*g)) {
                                        (bp.1, bq.1)
                                    } else {
                                        (bq.1, bp.1)
                                    };
                                v.mul(m.matrix(*g).get(dst, src))
                            }
                        };
                        if !w.is_zero() {
                            add_term(&mut terms, remove_two(&basis, kp, kq), w);
                        }
                    }
                    remove_two_wires(&mut wires, kp, kq);
                }
            }
        }
    }
    // Read off each term at its position in the conclusion vector.
    let order: Vec<usize> = s
        .conclusions()
        .iter()
        .map(|&p| {
            wires
                .iter()
                .position(|w| w.port == p)
                .expect("conclusion wire")
        })
        .collect();
    let total = Anf::product_all(anfs.iter());
    let offsets = m.offsets(&total);
    let mut out = Vec::new();
    for (basis, v) in terms {
        if v.is_zero() {
            continue;
        }
        let mut comp = 0;
        let mut inner = 0;
        for (k, &w) in order.iter().enumerate() {
            let (c, i) = basis[w];
            comp = comp * anfs[k].len() + c;
            inner = inner * m.word_dim(&anfs[k].components[c]) + i;
        }
        out.push((offsets[comp] + inner, v));
    }
    out
}

fn add_term<S: Semiring>(terms: &mut HashMap<Vec<Basis>, S>, b: Vec<Basis>, v: S) {
    match terms.get_mut(&b) {
        Some(x) => *x = x.add(&v),
        None => {
            terms.insert(b, v);
        }
    }
}

fn remove_two(basis: &[Basis], a: usize, b: usize) -> Vec<Basis> {
    basis
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != a && k != b)
        .map(|(_, &x)| x)
        .collect()
}

fn remove_two_wires(wires: &mut Vec<Wire>, a: usize, b: usize) {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    wires.remove(hi);
    wires.remove(lo);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::freecat::denote;
    use crate::net::parse_net;

    fn exact(text: &str, cat: &Category) -> Interpretation<Scalar> {
        match load_model(text, cat).unwrap() {
            Model::Exact(m) => m,
            Model::Bool(_) => panic!("expected exact scalars"),
        }
    }

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&n| Scalar::int(n)).collect()
    }

    #[test]
    fn scalar_field_arithmetic() {
        let r2 = Scalar::sqrt2();
        assert_eq!(r2.mul(&r2), Scalar::int(2));
        let i = Scalar::i();
        assert_eq!(i.mul(&i), Scalar::int(-1));
        let z = r2.add(&i);
        // |√2 + i|² = 3
        assert_eq!(z.mul(&z.conj()), Scalar::int(3));
        assert_eq!(z.mul(&i).to_string(), "(-1, 0, 0, 1)");
    }

    #[test]
    fn loads_fixture_models() {
        let c = fixtures::pauli8();
        let m = exact(fixtures::PAULI8_MOD, &c);
        assert_eq!(m.dim(c.object("Q").unwrap()), 2);
        let s = fixtures::split();
        assert!(matches!(
            load_model(fixtures::SPLIT_REL_MOD, &s).unwrap(),
            Model::Bool(_)
        ));
        exact(fixtures::SPLIT_MOD, &s);
    }

    #[test]
    fn rejects_unlawful_models() {
        let c = fixtures::c2();
        let bad = "model c2 over c2\ndim Q = 2\nmat X = [ [0, 1] ; [0, 0] ]\n";
        assert!(matches!(
            load_model(bad, &c),
            Err(ModelError::Composition { .. })
        ));
        let bad = "model c2 over c2\ndim Q = 2\nmat X = [ [0, 1] ]\n";
        assert!(matches!(load_model(bad, &c), Err(ModelError::Shape { .. })));
        let bad = "model c2 over c2\ndim Q = 2\n";
        assert!(matches!(
            load_model(bad, &c),
            Err(ModelError::MissingMatrix(_))
        ));
        let bad = "model c2 over other\ndim Q = 2\nmat X = [ [0, 1] ; [1, 0] ]\n";
        assert!(matches!(
            load_model(bad, &c),
            Err(ModelError::CategoryMismatch { .. })
        ));
        let bad =
            "model c2 over c2\ndim Q = 2\nmat X = [ [0, (0, 0, 1, 0)] ; [(0, 0, 1, 0), 0] ]\n";
        assert!(matches!(
            load_model(bad, &c),
            Err(ModelError::Composition { .. })
        ));
    }

    #[test]
    fn dagger_law_uses_conjugation() {
        let text = "category h\nobject Q\narrow S : Q -> Q\narrow T : Q -> Q\narrow U : Q -> Q\n\
                    compose S ; S = U\ncompose S ; T = id Q\ncompose S ; U = T\n\
                    compose T ; S = id Q\ncompose T ; T = U\ncompose T ; U = S\n\
                    compose U ; S = T\ncompose U ; T = S\ncompose U ; U = id Q\n\
                    dagger S = T\ndagger T = S\ndagger U = U\n";
        let c = crate::atoms::load_category(text).unwrap();
        // S = diag(1, i), T = diag(1, -i), U = diag(1, -1).
        let model = "model h over h\ndim Q = 2\nmat S = [ [1, 0] ; [0, (0, 0, 1, 0)] ]\n\
                     mat T = [ [1, 0] ; [0, (0, 0, -1, 0)] ]\nmat U = [ [1, 0] ; [0, -1] ]\n";
        exact(model, &c);
        let wrong = model.replace(
            "mat T = [ [1, 0] ; [0, (0, 0, -1, 0)] ]",
            "mat T = [ [1, 0] ; [0, (0, 0, 1, 0)] ]",
        );
        assert!(load_model(&wrong, &c).is_err());
    }

    #[test]
    fn evaluates_bell_states() {
        let c = fixtures::pauli8();
        let m = exact(fixtures::PAULI8_MOD, &c);
        let bell = parse_net(fixtures::BELL_ID_NET, &c).unwrap();
        assert_eq!(
            eval_net(&bell, &m, &c).data(),
            ints(&[1, 0, 0, 1]).as_slice()
        );
        let swap = parse_net(fixtures::SWAP_X_NET, &c).unwrap();
        assert_eq!(
            eval_net(&swap, &m, &c).data(),
            ints(&[0, 1, 1, 0]).as_slice()
        );
        assert_eq!(eval_net(&swap, &m, &c).to_string(), "[0, 1, 1, 0]");
        let xz = parse_net(&fixtures::SWAP_X_NET.replace(": X", ": XZ"), &c).unwrap();
        // vec of XZ = [[0,-1],[1,0]] at (i, j) is M[j][i].
        assert_eq!(
            eval_net(&xz, &m, &c).data(),
            ints(&[0, 1, -1, 0]).as_slice()
        );
        assert_eq!(
            eval_free(&denote(&xz, &c).unwrap(), &m),
            eval_net(&xz, &m, &c)
        );
    }

    #[test]
    fn loops_evaluate_to_traces() {
        let c = fixtures::pauli8();
        let m = exact(fixtures::PAULI8_MOD, &c);
        let x = c.endo_class(c.arrow("X").unwrap()).unwrap();
        let id = c.endo_class(c.identity(c.object("Q").unwrap())).unwrap();
        assert_eq!(
            eval_free(&FreeArrow::scalar(vec![x]), &m).data(),
            ints(&[0]).as_slice()
        );
        assert_eq!(
            eval_free(&FreeArrow::scalar(vec![id, id]), &m).data(),
            ints(&[4]).as_slice()
        );
        let fig2 = parse_net(fixtures::FIG2_NET, &c).unwrap();
        let v = eval_net(&fig2, &m, &c);
        assert_eq!(v, eval_free(&denote(&fig2, &c).unwrap(), &m));
    }

    #[test]
    fn deleted_and_empty_nets_are_zero() {
        let c = fixtures::c2();
        let m = exact(fixtures::C2_MOD, &c);
        let n = parse_net(fixtures::PLUS_MISMATCH_NET, &c).unwrap();
        assert_eq!(eval_net(&n, &m, &c).data(), ints(&[0, 0, 0, 0]).as_slice());
        let q = c.object("Q").unwrap();
        let e = Net::new("e", vec![Formula::Dual(q), Formula::Atom(q)], vec![], &c).unwrap();
        assert_eq!(eval_net(&e, &m, &c), Matrix::zeros(4, 1));
    }

    #[test]
    fn relational_model() {
        let c = fixtures::split();
        let Model::Bool(m) = load_model(fixtures::SPLIT_REL_MOD, &c).unwrap() else {
            panic!("bool")
        };
        let text = "net l\nconclusions\nslice\n  ax a : u\n  cut a.1 , a.0 : v\n  out\nend\n";
        let n = parse_net(text, &c).unwrap();
        assert_eq!(eval_net(&n, &m, &c).data(), &[Bool(true)]);
        assert_eq!(
            eval_free(&denote(&n, &c).unwrap(), &m).data(),
            &[Bool(true)]
        );
    }
}
