//! The free strongly compact closed category with biproducts over a
//! generating category. Arrows are matrices, indexed by additive normal
//! forms, of multisets of Kelly-Laplaza triples.
//!
//! A triple from word `D` to word `C` lives on the signed word `D* ++ C`.
//! Its pairing joins each negative (dual) position to a positive one and
//! labels the pair by an arrow whose domain sits at the negative end.
//! Composition is diagrammatic throughout: `f.compose(&g)` is `g ∘ f`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::atoms::{ArrowId, CanonicalLoop, Category, CategoryError};
use crate::formula::{display_word, parse_anf, star_word, Anf, Formula, Literal, Word};
use crate::net::{CutLabel, LinkKind, Net, Port, Slice};
use crate::rewrite::CanonicalSlice;
use crate::syntax::{self, Cursor, ParseError, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("{op}: expected {expected}, found {found}")]
    Shape {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("invalid triple: {0}")]
    BadTriple(String),
    #[error("entry ({0},{1}) is outside the matrix")]
    BadEntry(usize, usize),
    #[error("missing `arrow` header")]
    MissingHeader,
}

/// A Kelly-Laplaza triple `(θ, p, L)` between two tensor words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KLTriple {
    pub dom: Word,
    pub cod: Word,
    /// Sorted `(negative position, positive position, label)`.
    pub pairs: Vec<(usize, usize, ArrowId)>,
    /// Sorted multiset of loops.
    pub loops: Vec<CanonicalLoop>,
}

impl KLTriple {
    /// Build and validate a triple.
    pub fn new(
        dom: Word,
        cod: Word,
        mut pairs: Vec<(usize, usize, ArrowId)>,
        mut loops: Vec<CanonicalLoop>,
        cat: &Category,
    ) -> Result<KLTriple, FreeError> {
        let signed = signed_word(&dom, &cod);
        let mut seen = vec![false; signed.len()];
        for &(n, p, f) in &pairs {
            for k in [n, p] {
                if k >= signed.len() {
                    return Err(FreeError::BadTriple(format!("position {k} out of range")));
                }
                if std::mem::replace(&mut seen[k], true) {
                    return Err(FreeError::BadTriple(format!("position {k} paired twice")));
                }
            }
            let ok =
                signed[n] == Literal::Dual(cat.dom(f)) && signed[p] == Literal::Atom(cat.cod(f));
            if !ok {
                return Err(FreeError::BadTriple(format!(
                    "pair {n}↔{p} joins {} and {} but is labelled by {}",
                    signed[n].display(cat),
                    signed[p].display(cat),
                    cat.arrow_name(f)
                )));
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(FreeError::BadTriple(format!("position {k} is unpaired")));
        }
        pairs.sort();
        loops.sort();
        Ok(KLTriple {
            dom,
            cod,
            pairs,
            loops,
        })
    }

    pub fn signed(&self) -> Word {
        signed_word(&self.dom, &self.cod)
    }

    /// The identity on a word.
    pub fn identity(w: &[Literal], cat: &Category) -> KLTriple {
        let n = w.len();
        let mut pairs: Vec<_> = w
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let id = cat.identity(l.object());
                if l.is_negative() {
                    (n + k, k, id)
                } else {
                    (k, n + k, id)
                }
            })
            .collect();
        pairs.sort();
        KLTriple {
            dom: w.to_vec(),
            cod: w.to_vec(),
            pairs,
            loops: vec![],
        }
    }

    /// The permutation `dom -> cod` with `cod[k] = dom[perm[k]]`.
    pub fn permutation(dom: &[Literal], perm: &[usize], cat: &Category) -> KLTriple {
        let n = dom.len();
        let cod: Word = perm.iter().map(|&i| dom[i]).collect();
        let mut pairs: Vec<_> = perm
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let l = dom[i];
                let id = cat.identity(l.object());
                if l.is_negative() {
                    (n + k, i, id)
                } else {
                    (i, n + k, id)
                }
            })
            .collect();
        pairs.sort();
        KLTriple {
            dom: dom.to_vec(),
            cod,
            pairs,
            loops: vec![],
        }
    }

    /// A generator `f: A -> B` as a triple `[A] -> [B]`.
    pub fn generator(f: ArrowId, cat: &Category) -> KLTriple {
        KLTriple {
            dom: vec![Literal::Atom(cat.dom(f))],
            cod: vec![Literal::Atom(cat.cod(f))],
            pairs: vec![(0, 1, f)],
            loops: vec![],
        }
    }

    /// The same pairing read with another split of the signed word.
    pub fn reshape(&self, dom: Word, cod: Word) -> KLTriple {
        debug_assert_eq!(signed_word(&dom, &cod), self.signed());
        KLTriple {
            dom,
            cod,
            pairs: self.pairs.clone(),
            loops: self.loops.clone(),
        }
    }

    /// Disjoint union: `self ⊗ other`.
    pub fn tensor(&self, other: &KLTriple) -> KLTriple {
        let (d1, c1, d2) = (self.dom.len(), self.cod.len(), other.dom.len());
        let left = |k: usize| if k < d1 { k } else { k + d2 };
        let right = |k: usize| if k < d2 { d1 + k } else { d1 + c1 + k };
        let mut pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|&(n, p, f)| (left(n), left(p), f))
            .chain(other.pairs.iter().map(|&(n, p, f)| (right(n), right(p), f)))
            .collect();
        pairs.sort();
        let mut loops: Vec<_> = self.loops.iter().chain(&other.loops).copied().collect();
        loops.sort();
        KLTriple {
            dom: [self.dom.clone(), other.dom.clone()].concat(),
            cod: [self.cod.clone(), other.cod.clone()].concat(),
            pairs,
            loops,
        }
    }

    pub fn dagger(&self, cat: &Category) -> KLTriple {
        let (d, c) = (self.dom.len(), self.cod.len());
        let pos = |k: usize| if k < d { c + k } else { k - d };
        let mut pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|&(n, p, f)| (pos(p), pos(n), cat.dagger(f)))
            .collect();
        pairs.sort();
        let mut loops: Vec<_> = self.loops.iter().map(|&l| cat.dagger_loop(l)).collect();
        loops.sort();
        KLTriple {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            pairs,
            loops,
        }
    }

    /// The dual `f*: C* -> D*`, a rotation of the signed word.
    pub fn dual(&self) -> KLTriple {
        let (d, c) = (self.dom.len(), self.cod.len());
        let pos = |k: usize| if k < d { c + k } else { k - d };
        let mut pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|&(n, p, f)| (pos(n), pos(p), f))
            .collect();
        pairs.sort();
        KLTriple {
            dom: star_word(&self.cod),
            cod: star_word(&self.dom),
            pairs,
            loops: self.loops.clone(),
        }
    }
}

fn signed_word(dom: &[Literal], cod: &[Literal]) -> Word {
    let mut w = star_word(dom);
    w.extend_from_slice(cod);
    w
}

/// Compose `f: A -> B` with `g: B -> C` by following paths through `B`.
pub fn kl_compose(f: &KLTriple, g: &KLTriple, cat: &Category) -> Result<KLTriple, FreeError> {
    if f.cod != g.dom {
        return Err(FreeError::Shape {
            op: "compose",
            expected: display_word(&f.cod, cat),
            found: display_word(&g.dom, cat),
        });
    }
    let nf = f.dom.len() + f.cod.len();
    let (df, b) = (f.dom.len(), f.cod.len());
    // Nodes: f positions, then g positions offset by nf.
    let mut fwd: HashMap<usize, (usize, ArrowId)> = HashMap::new();
    for &(n, p, l) in &f.pairs {
        fwd.insert(n, (p, l));
    }
    for &(n, p, l) in &g.pairs {
        fwd.insert(nf + n, (nf + p, l));
    }
    let glue = |x: usize| {
        if x < nf {
            nf + (x - df)
        } else {
            df + (x - nf)
        }
    };
    let boundary = |x: usize| x < df || x >= nf + b;
    let result = |x: usize| if x < df { x } else { df + (x - nf - b) };
    let mut visited: HashSet<usize> = HashSet::new();
    let mut pairs = Vec::new();
    let mut starts: Vec<usize> = fwd.keys().copied().filter(|&x| boundary(x)).collect();
    starts.sort();
    for x in starts {
        let mut labels = Vec::new();
        let mut cur = x;
        loop {
            visited.insert(cur);
            let (y, l) = fwd[&cur];
            labels.push(l);
            if boundary(y) {
                pairs.push((result(x), result(y), cat.compose_path(&labels)?));
                break;
            }
            cur = glue(y);
        }
    }
    let mut loops: Vec<CanonicalLoop> = f.loops.iter().chain(&g.loops).copied().collect();
    let mut rest: Vec<usize> = fwd
        .keys()
        .copied()
        .filter(|x| !visited.contains(x))
        .collect();
    rest.sort();
    for x in rest {
        if visited.contains(&x) {
            continue;
        }
        let mut labels = Vec::new();
        let mut cur = x;
        while visited.insert(cur) {
            let (y, l) = fwd[&cur];
            labels.push(l);
            cur = glue(y);
        }
        loops.push(cat.loop_class(&labels)?);
    }
    pairs.sort();
    loops.sort();
    Ok(KLTriple {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        pairs,
        loops,
    })
}

/// An arrow of the free category: a sparse matrix (row = codomain
/// component, column = domain component) of sorted multisets of triples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeArrow {
    dom: Anf,
    cod: Anf,
    entries: BTreeMap<(usize, usize), Vec<KLTriple>>,
}

impl FreeArrow {
    pub fn zero(dom: Anf, cod: Anf) -> FreeArrow {
        FreeArrow {
            dom,
            cod,
            entries: BTreeMap::new(),
        }
    }

    /// Build from entries, checking every triple's words against the shape.
    pub fn from_entries(
        dom: Anf,
        cod: Anf,
        entries: impl IntoIterator<Item = ((usize, usize), KLTriple)>,
    ) -> Result<FreeArrow, FreeError> {
        let mut out = FreeArrow::zero(dom, cod);
        for ((i, j), t) in entries {
            if i >= out.cod.len() || j >= out.dom.len() {
                return Err(FreeError::BadEntry(i, j));
            }
            if t.dom != out.dom.components[j] || t.cod != out.cod.components[i] {
                return Err(FreeError::BadTriple(format!(
                    "entry ({i},{j}) has the wrong words"
                )));
            }
            out.push(i, j, t);
        }
        out.normalize();
        Ok(out)
    }

    fn push(&mut self, i: usize, j: usize, t: KLTriple) {
        self.entries.entry((i, j)).or_default().push(t);
    }

    fn normalize(&mut self) {
        self.entries.retain(|_, v| !v.is_empty());
        for v in self.entries.values_mut() {
            v.sort();
        }
    }

    pub fn dom(&self) -> &Anf {
        &self.dom
    }

    pub fn cod(&self) -> &Anf {
        &self.cod
    }

    /// Nonempty entries in `(row, column)` order.
    pub fn entries(&self) -> &BTreeMap<(usize, usize), Vec<KLTriple>> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &[KLTriple] {
        self.entries.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn triple_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn identity(x: &Anf, cat: &Category) -> FreeArrow {
        let mut out = FreeArrow::zero(x.clone(), x.clone());
        for (i, w) in x.components.iter().enumerate() {
            out.push(i, i, KLTriple::identity(w, cat));
        }
        out
    }

    /// A generator `f: A -> B`.
    pub fn generator(f: ArrowId, cat: &Category) -> FreeArrow {
        let t = KLTriple::generator(f, cat);
        let mut out = FreeArrow::zero(Anf::word(t.dom.clone()), Anf::word(t.cod.clone()));
        out.push(0, 0, t);
        out
    }

    /// A scalar `I -> I` with one triple carrying `loops`.
    pub fn scalar(mut loops: Vec<CanonicalLoop>) -> FreeArrow {
        loops.sort();
        let mut out = FreeArrow::zero(Anf::unit(), Anf::unit());
        out.push(
            0,
            0,
            KLTriple {
                dom: vec![],
                cod: vec![],
                pairs: vec![],
                loops,
            },
        );
        out
    }

    fn block_offset(parts: &[Anf], i: usize) -> usize {
        parts[..i].iter().map(Anf::len).sum()
    }

    /// The injection `q_i: parts[i] -> parts[0] + ... + parts[n-1]`.
    pub fn injection(parts: &[Anf], i: usize, cat: &Category) -> FreeArrow {
        let sum = parts.iter().fold(Anf::zero(), |acc, p| acc.sum(p));
        let off = Self::block_offset(parts, i);
        let mut out = FreeArrow::zero(parts[i].clone(), sum);
        for (k, w) in parts[i].components.iter().enumerate() {
            out.push(off + k, k, KLTriple::identity(w, cat));
        }
        out
    }

    /// The projection `p_i: parts[0] + ... + parts[n-1] -> parts[i]`.
    pub fn projection(parts: &[Anf], i: usize, cat: &Category) -> FreeArrow {
        let sum = parts.iter().fold(Anf::zero(), |acc, p| acc.sum(p));
        let off = Self::block_offset(parts, i);
        let mut out = FreeArrow::zero(sum, parts[i].clone());
        for (k, w) in parts[i].components.iter().enumerate() {
            out.push(k, off + k, KLTriple::identity(w, cat));
        }
        out
    }

    /// Reorder tensor factors: `⊗ factors[k] -> ⊗ factors[perm[k]]`.
    pub fn permute(factors: &[Anf], perm: &[usize], cat: &Category) -> FreeArrow {
        let dom = Anf::product_all(factors);
        let cod = Anf::product_all(perm.iter().map(|&k| &factors[k]));
        let mut out = FreeArrow::zero(dom, cod);
        let sizes: Vec<usize> = factors.iter().map(Anf::len).collect();
        if sizes.contains(&0) {
            return out;
        }
        let total: usize = sizes.iter().product();
        for col in 0..total {
            let mut idx = vec![0; sizes.len()];
            let mut rem = col;
            for k in (0..sizes.len()).rev() {
                idx[k] = rem % sizes[k];
                rem /= sizes[k];
            }
            let row = perm.iter().fold(0, |acc, &k| acc * sizes[k] + idx[k]);
            let words: Vec<&Word> = (0..sizes.len())
                .map(|k| &factors[k].components[idx[k]])
                .collect();
            let mut starts = Vec::with_capacity(words.len());
            let mut acc = 0;
            for w in &words {
                starts.push(acc);
                acc += w.len();
            }
            let dom_word: Word = words.iter().flat_map(|w| w.iter().copied()).collect();
            let lit_perm: Vec<usize> = perm
                .iter()
                .flat_map(|&k| (0..words[k].len()).map(move |i| (k, i)))
                .map(|(k, i)| starts[k] + i)
                .collect();
            out.push(row, col, KLTriple::permutation(&dom_word, &lit_perm, cat));
        }
        out
    }

    /// The symmetry `x ⊗ y -> y ⊗ x`.
    pub fn symmetry(x: &Anf, y: &Anf, cat: &Category) -> FreeArrow {
        Self::permute(&[x.clone(), y.clone()], &[1, 0], cat)
    }

    /// The unit `η_X: I -> X* ⊗ X`.
    pub fn eta(x: &Anf, cat: &Category) -> FreeArrow {
        let n = x.len();
        let mut out = FreeArrow::zero(Anf::unit(), x.star().product(x));
        for (i, w) in x.components.iter().enumerate() {
            let t = KLTriple::identity(w, cat);
            out.push(i * n + i, 0, t.reshape(vec![], signed_word(w, w)));
        }
        out
    }

    /// The counit `ε_X: X ⊗ X* -> I`.
    pub fn epsilon(x: &Anf, cat: &Category) -> FreeArrow {
        let n = x.len();
        let mut out = FreeArrow::zero(x.product(&x.star()), Anf::unit());
        for (i, w) in x.components.iter().enumerate() {
            let t = KLTriple::identity(w, cat);
            out.push(
                0,
                i * n + i,
                t.reshape([w.clone(), star_word(w)].concat(), vec![]),
            );
        }
        out
    }

    /// The name `⌈f⌉: I -> X* ⊗ Y` of `f: X -> Y`.
    pub fn name(&self) -> FreeArrow {
        let m = self.cod.len();
        let mut out = FreeArrow::zero(Anf::unit(), self.dom.star().product(&self.cod));
        for (&(i, j), ts) in &self.entries {
            for t in ts {
                out.push(j * m + i, 0, t.reshape(vec![], t.signed()));
            }
        }
        out.normalize();
        out
    }

    /// The coname `⌊f⌋: X ⊗ Y* -> I` of `f: X -> Y`.
    pub fn coname(&self) -> FreeArrow {
        let m = self.cod.len();
        let mut out = FreeArrow::zero(self.dom.product(&self.cod.star()), Anf::unit());
        for (&(i, j), ts) in &self.entries {
            for t in ts {
                out.push(0, j * m + i, t.reshape(star_word(&t.signed()), vec![]));
            }
        }
        out.normalize();
        out
    }

    fn expect_same_shape(
        &self,
        other: &FreeArrow,
        op: &'static str,
        cat: &Category,
    ) -> Result<(), FreeError> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(FreeError::Shape {
                op,
                expected: self.type_string(cat),
                found: other.type_string(cat),
            });
        }
        Ok(())
    }

    pub fn type_string(&self, cat: &Category) -> String {
        format!("{} -> {}", self.dom.display(cat), self.cod.display(cat))
    }

    /// Diagrammatic composition: `g ∘ self`.
    pub fn compose(&self, g: &FreeArrow, cat: &Category) -> Result<FreeArrow, FreeError> {
        if self.cod != g.dom {
            return Err(FreeError::Shape {
                op: "compose",
                expected: self.cod.display(cat),
                found: g.dom.display(cat),
            });
        }
        let mut by_col: HashMap<usize, Vec<(usize, &Vec<KLTriple>)>> = HashMap::new();
        for (&(i, k), ts) in &g.entries {
            by_col.entry(k).or_default().push((i, ts));
        }
        let mut out = FreeArrow::zero(self.dom.clone(), g.cod.clone());
        for (&(k, j), fs) in &self.entries {
            let Some(gs) = by_col.get(&k) else {
                continue;
            };
            for &(i, gts) in gs {
                for ft in fs {
                    for gt in gts {
                        out.push(i, j, kl_compose(ft, gt, cat)?);
                    }
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Kronecker product; components are ordered with `self` major.
    pub fn tensor(&self, other: &FreeArrow) -> FreeArrow {
        let (m2, n2) = (other.cod.len(), other.dom.len());
        let mut out = FreeArrow::zero(self.dom.product(&other.dom), self.cod.product(&other.cod));
        for (&(i1, j1), ts1) in &self.entries {
            for (&(i2, j2), ts2) in &other.entries {
                for t1 in ts1 {
                    for t2 in ts2 {
                        out.push(i1 * m2 + i2, j1 * n2 + j2, t1.tensor(t2));
                    }
                }
            }
        }
        out.normalize();
        out
    }

    /// Entry-wise multiset union.
    pub fn add(&self, other: &FreeArrow, cat: &Category) -> Result<FreeArrow, FreeError> {
        self.expect_same_shape(other, "add", cat)?;
        let mut out = self.clone();
        for (&(i, j), ts) in &other.entries {
            for t in ts {
                out.push(i, j, t.clone());
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Transpose with every triple daggered.
    pub fn dagger(&self, cat: &Category) -> FreeArrow {
        let mut out = FreeArrow::zero(self.cod.clone(), self.dom.clone());
        for (&(i, j), ts) in &self.entries {
            for t in ts {
                out.push(j, i, t.dagger(cat));
            }
        }
        out.normalize();
        out
    }

    /// The dual `f*: Y* -> X*`.
    pub fn dual(&self) -> FreeArrow {
        let mut out = FreeArrow::zero(self.cod.star(), self.dom.star());
        for (&(i, j), ts) in &self.entries {
            for t in ts {
                out.push(j, i, t.dual());
            }
        }
        out.normalize();
        out
    }

    /// The covariant conjugate `f_* = (f*)†: X* -> Y*`.
    pub fn conjugate(&self, cat: &Category) -> FreeArrow {
        self.dual().dagger(cat)
    }

    /// Scalar multiplication `s • f` for `s: I -> I`.
    pub fn scalar_mul(&self, s: &FreeArrow, cat: &Category) -> Result<FreeArrow, FreeError> {
        if s.dom != Anf::unit() || s.cod != Anf::unit() {
            return Err(FreeError::Shape {
                op: "scalar_mul",
                expected: "I -> I".to_string(),
                found: s.type_string(cat),
            });
        }
        Ok(s.tensor(self))
    }

    /// The trace of `self: X ⊗ U -> Y ⊗ U` over `U`.
    pub fn trace(&self, x: &Anf, y: &Anf, u: &Anf, cat: &Category) -> Result<FreeArrow, FreeError> {
        let (dom, cod) = (x.product(u), y.product(u));
        if self.dom != dom || self.cod != cod {
            return Err(FreeError::Shape {
                op: "trace",
                expected: format!("{} -> {}", dom.display(cat), cod.display(cat)),
                found: self.type_string(cat),
            });
        }
        let us = u.star();
        let open = FreeArrow::identity(x, cat).tensor(&FreeArrow::eta(&us, cat));
        let body = self.tensor(&FreeArrow::identity(&us, cat));
        let close = FreeArrow::identity(y, cat).tensor(&FreeArrow::epsilon(u, cat));
        open.compose(&body, cat)?.compose(&close, cat)
    }

    /// Print in the canonical textual form.
    pub fn to_text(&self, cat: &Category) -> String {
        let mut out = format!(
            "arrow : {} -> {}\n",
            self.dom.display(cat),
            self.cod.display(cat)
        );
        for (&(i, j), ts) in &self.entries {
            let body: Vec<String> = ts.iter().map(|t| triple_text(t, cat)).collect();
            let _ = writeln!(out, "entry ({i},{j}): {{ {} }}", body.join(" , "));
        }
        out
    }
}

fn triple_text(t: &KLTriple, cat: &Category) -> String {
    let pairs: Vec<String> = t
        .pairs
        .iter()
        .map(|&(n, p, f)| format!("{n}↔{p}:{}", cat.arrow_name(f)))
        .collect();
    let loops: Vec<String> = t
        .loops
        .iter()
        .map(|&l| format!("[{}]", cat.loop_label(l)))
        .collect();
    format!("(pairs: {}; loops: {})", pairs.join(", "), loops.join(", "))
}

/// Entry-wise equality of two arrows of the same type.
pub fn fa_equal(f: &FreeArrow, g: &FreeArrow, cat: &Category) -> Result<bool, FreeError> {
    f.expect_same_shape(g, "fa_equal", cat)?;
    Ok(f.entries == g.entries)
}

/// Parse the canonical textual form.
pub fn parse_free_arrow(text: &str, cat: &Category) -> Result<FreeArrow, FreeError> {
    let lines = syntax::lines(text)?;
    let mut it = lines.iter();
    let (line, toks) = it.next().ok_or(FreeError::MissingHeader)?;
    let mut cur = Cursor::new(toks, *line);
    cur.expect_keyword("arrow")?;
    cur.expect_sym(":")?;
    let dom = parse_anf(&mut cur, cat)?;
    cur.expect_sym("->")?;
    let cod = parse_anf(&mut cur, cat)?;
    cur.expect_end()?;
    let mut entries = Vec::new();
    for (line, toks) in it {
        let mut cur = Cursor::new(toks, *line);
        cur.expect_keyword("entry")?;
        cur.expect_sym("(")?;
        let i = cur.usize()?;
        cur.expect_sym(",")?;
        let j = cur.usize()?;
        cur.expect_sym(")")?;
        cur.expect_sym(":")?;
        cur.expect_sym("{")?;
        if i >= cod.len() || j >= dom.len() {
            return Err(FreeError::BadEntry(i, j));
        }
        if !cur.is_sym("}") {
            loop {
                let t = parse_triple(&mut cur, &dom.components[j], &cod.components[i], cat)?;
                entries.push(((i, j), t));
                if !cur.eat_sym(",") {
                    break;
                }
            }
        }
        cur.expect_sym("}")?;
        cur.expect_end()?;
    }
    FreeArrow::from_entries(dom, cod, entries)
}

fn is_arrow_sym(cur: &Cursor<'_>) -> bool {
    cur.is_sym("↔") || cur.is_sym("<->")
}

fn parse_triple(
    cur: &mut Cursor<'_>,
    dom: &Word,
    cod: &Word,
    cat: &Category,
) -> Result<KLTriple, FreeError> {
    cur.expect_sym("(")?;
    cur.expect_keyword("pairs")?;
    cur.expect_sym(":")?;
    let mut pairs = Vec::new();
    if !cur.is_sym(";") {
        loop {
            let n = cur.usize()?;
            if !is_arrow_sym(cur) {
                return Err(cur.error("expected `↔`").into());
            }
            cur.next();
            let p = cur.usize()?;
            cur.expect_sym(":")?;
            let f = cat.parse_arrow_ref(cur)?;
            pairs.push((n, p, f));
            if !cur.eat_sym(",") {
                break;
            }
        }
    }
    cur.expect_sym(";")?;
    cur.expect_keyword("loops")?;
    cur.expect_sym(":")?;
    let mut loops = Vec::new();
    if cur.is_sym("[") {
        loop {
            cur.expect_sym("[")?;
            let line = cur.line;
            let obj = cur.ident()?;
            cur.expect_sym(":")?;
            let e = cat.parse_arrow_ref(cur)?;
            cur.expect_sym("]")?;
            let class = cat
                .endo_class(e)
                .filter(|_| cat.object_name(cat.dom(e)) == obj)
                .ok_or_else(|| {
                    ParseError::new(
                        line,
                        obj,
                        format!("`{}` is not an endomorphism of `{obj}`", cat.arrow_name(e)),
                    )
                })?;
            loops.push(class);
            // A comma followed by `[` continues the loop list; any other
            // comma separates triples.
            if cur.is_sym(",") && matches!(cur.peek_at(1), Some(Token::Sym("["))) {
                cur.next();
            } else {
                break;
            }
        }
    }
    cur.expect_sym(")")?;
    KLTriple::new(dom.clone(), cod.clone(), pairs, loops, cat)
}

/// Denotation of a slice as a state `I -> ⊗ conclusions`.
pub fn denote_slice(s: &Slice, cat: &Category) -> Result<FreeArrow, FreeError> {
    let order = topological(s);
    let mut psi = FreeArrow::identity(&Anf::unit(), cat);
    let mut wires: Vec<(Port, Anf)> = Vec::new();
    for id in order {
        let link = s.link(id).expect("listed");
        match &link.kind {
            LinkKind::Axiom(f) => {
                psi = psi.tensor(&FreeArrow::generator(*f, cat).name());
                wires.push((
                    Port::new(id, 0),
                    Anf::word(vec![Literal::Dual(cat.dom(*f))]),
                ));
                wires.push((
                    Port::new(id, 1),
                    Anf::word(vec![Literal::Atom(cat.cod(*f))]),
                ));
            }
            LinkKind::Unit => wires.push((Port::new(id, 0), Anf::unit())),
            LinkKind::Times => {
                psi = bring_to_end(psi, &mut wires, &link.inputs, cat)?;
                let b = wires.pop().expect("input").1;
                let a = wires.pop().expect("input").1;
                wires.push((Port::new(id, 0), a.product(&b)));
            }
            LinkKind::Plus1(other) | LinkKind::Plus2(other) => {
                psi = bring_to_end(psi, &mut wires, &link.inputs, cat)?;
                let a = wires.pop().expect("input").1;
                let b = other.anf();
                let (parts, i) = match link.kind {
                    LinkKind::Plus1(_) => ([a, b], 0),
                    _ => ([b, a], 1),
                };
                let q = FreeArrow::injection(&parts, i, cat);
                psi = apply_last(psi, &wires, &q, cat)?;
                wires.push((Port::new(id, 0), parts[0].sum(&parts[1])));
            }
            LinkKind::Cut(label) => {
                let (p, q) = (link.inputs[0], link.inputs[1]);
                let (ports, costate) = match label {
                    CutLabel::Arrow(g) => {
                        let first_is_dom = s.port_label(cat, p) == Formula::Atom(cat.dom(*g));
                        let ports = if first_is_dom { [p, q] } else { [q, p] };
                        (ports, FreeArrow::generator(*g, cat).coname())
                    }
                    CutLabel::Identity => {
                        ([p, q], FreeArrow::epsilon(&s.port_label(cat, p).anf(), cat))
                    }
                };
                psi = bring_to_end(psi, &mut wires, &ports, cat)?;
                wires.pop();
                wires.pop();
                psi = apply_last(psi, &wires, &costate, cat)?;
            }
        }
    }
    bring_to_end(psi, &mut wires, s.conclusions(), cat)
}

/// Post-compose `psi` with `id ⊗ h`, where `h` acts on the factors after `rest`.
fn apply_last(
    psi: FreeArrow,
    rest: &[(Port, Anf)],
    h: &FreeArrow,
    cat: &Category,
) -> Result<FreeArrow, FreeError> {
    let rest = Anf::product_all(rest.iter().map(|(_, a)| a));
    psi.compose(&FreeArrow::identity(&rest, cat).tensor(h), cat)
}

/// Permute the wires so that `ports` come last, in order.
fn bring_to_end(
    psi: FreeArrow,
    wires: &mut Vec<(Port, Anf)>,
    ports: &[Port],
    cat: &Category,
) -> Result<FreeArrow, FreeError> {
    let mut perm: Vec<usize> = (0..wires.len())
        .filter(|&k| !ports.contains(&wires[k].0))
        .collect();
    for p in ports {
        perm.push(wires.iter().position(|(w, _)| w == p).expect("open wire"));
    }
    if perm.iter().enumerate().all(|(k, &i)| k == i) {
        return Ok(psi);
    }
    let factors: Vec<Anf> = wires.iter().map(|(_, a)| a.clone()).collect();
    let sigma = FreeArrow::permute(&factors, &perm, cat);
    *wires = perm.iter().map(|&i| wires[i].clone()).collect();
    psi.compose(&sigma, cat)
}

/// Links ordered so that producers precede consumers, ties by id.
fn topological(s: &Slice) -> Vec<crate::net::LinkId> {
    let mut done: HashSet<crate::net::LinkId> = HashSet::new();
    let mut order = Vec::new();
    let ids: Vec<_> = s.links().map(|(id, _)| id).collect();
    while order.len() < ids.len() {
        let before = order.len();
        for &id in &ids {
            if done.contains(&id) {
                continue;
            }
            let link = s.link(id).expect("listed");
            if link.inputs.iter().all(|p| done.contains(&p.link)) {
                done.insert(id);
                order.push(id);
            }
        }
        assert!(order.len() > before, "well-formed slices are acyclic");
    }
    order
}

/// Denotation of a net: the sum of its slices, or zero if it has none.
pub fn denote(n: &Net, cat: &Category) -> Result<FreeArrow, FreeError> {
    let cod = Anf::product_all(
        n.conclusions()
            .iter()
            .map(Formula::anf)
            .collect::<Vec<_>>()
            .iter(),
    );
    let mut out = FreeArrow::zero(Anf::unit(), cod);
    for s in n.slices() {
        out = out.add(&denote_slice(s, cat)?, cat)?;
    }
    Ok(out)
}

/// The conclusions of the net built by [`complete`]: `X*` and `Y`, each
/// dropped when it is exactly `I`.
pub fn completion_conclusions(f: &FreeArrow) -> Vec<Formula> {
    [f.dom.star(), f.cod.clone()]
        .into_iter()
        .filter(|a| *a != Anf::unit())
        .map(|a| a.to_formula())
        .collect()
}

/// A net whose denotation is the name of `f`: one slice per triple.
pub fn complete(f: &FreeArrow, name: &str, cat: &Category) -> Result<Net, crate::net::NetError> {
    let keep_dom = f.dom.star() != Anf::unit();
    let keep_cod = f.cod != Anf::unit();
    let fx = f.dom.star().to_formula();
    let fy = f.cod.to_formula();
    let conclusions = completion_conclusions(f);
    let mut slices = Vec::new();
    for (&(i, j), ts) in &f.entries {
        let mut choices = Vec::new();
        if keep_dom {
            choices.extend(fx.choices_for_component(j));
        }
        if keep_cod {
            choices.extend(fy.choices_for_component(i));
        }
        for t in ts {
            let cs = CanonicalSlice {
                conclusions: conclusions.clone(),
                choices: choices.clone(),
                pairs: t.pairs.clone(),
                loops: t.loops.clone(),
            };
            slices.push(cs.to_slice());
        }
    }
    Net::new(name, conclusions, slices, cat)
}
