//! The generating category: a finite category with an involution, given by
//! an explicit composition table, together with the quotient of its
//! endomorphisms into loop classes.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{self, Cursor, ParseError, Token};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub u32);

impl ObjId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArrowId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// Canonical representative of a loop class: the least endomorphism of its
/// class under (object name, arrow name) order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalLoop(pub ArrowId);

impl CanonicalLoop {
    pub fn arrow(self) -> ArrowId {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("missing `category <name>` header")]
    MissingHeader,
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate arrow `{0}`")]
    DuplicateArrow(String),
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("`{f}` and `{g}` are not composable")]
    NotComposable { f: String, g: String },
    #[error("composite `{f} ; {g}` declared as `{h}`, which has the wrong type")]
    CompositeType { f: String, g: String, h: String },
    #[error("composite `{f} ; {g}` declared twice, as `{h1}` and `{h2}`")]
    ConflictingComposite {
        f: String,
        g: String,
        h1: String,
        h2: String,
    },
    #[error("composition not total: `{f} ; {g}` is undeclared")]
    NotTotal { f: String, g: String },
    #[error("identity law violated: `{f} ; {g}` declared as `{h}`")]
    IdentityLaw { f: String, g: String, h: String },
    #[error("composition not associative on `{f} ; {g} ; {h}`")]
    NotAssociative { f: String, g: String, h: String },
    #[error("dagger missing for `{0}`")]
    MissingDagger(String),
    #[error("dagger of `{0}` declared twice")]
    DuplicateDagger(String),
    #[error("dagger of `{f}` is `{g}`, which does not have the reversed type")]
    DaggerType { f: String, g: String },
    #[error("dagger not involutive: dagger({f}) = {g} but dagger({g}) = {h}")]
    NotInvolutive { f: String, g: String, h: String },
    #[error("dagger of an identity must be the identity (`{0}`)")]
    DaggerOfIdentity(String),
    #[error("dagger not contravariant on `{f} ; {g}`")]
    NotContravariant { f: String, g: String },
    #[error("loop word is empty")]
    EmptyWord,
    #[error("loop word is not cyclic or not composable at `{0}`")]
    BadWord(String),
}

const RESERVED: &[&str] = &[
    "id", "x", "I", "category", "object", "arrow", "compose", "dagger",
];

/// A finite category with an identity-on-objects contravariant involution.
/// Immutable once built; every law has been checked.
#[derive(Debug, Clone)]
pub struct Category {
    name: String,
    objects: Vec<String>,
    obj_by_name: HashMap<String, ObjId>,
    arrows: Vec<Arrow>,
    arrow_by_name: HashMap<String, ArrowId>,
    identities: Vec<ArrowId>,
    table: HashMap<(ArrowId, ArrowId), ArrowId>,
    dagger: Vec<ArrowId>,
    loop_rep: Vec<Option<ArrowId>>,
}

impl Category {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len() as u32).map(ObjId)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len() as u32).map(ArrowId)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o.index()]
    }

    pub fn object(&self, name: &str) -> Option<ObjId> {
        self.obj_by_name.get(name).copied()
    }

    /// Look up an arrow by name; identities are named `id <Obj>`.
    pub fn arrow(&self, name: &str) -> Option<ArrowId> {
        self.arrow_by_name.get(name).copied()
    }

    pub fn arrow_info(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.index()]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.index()].name
    }

    pub fn dom(&self, a: ArrowId) -> ObjId {
        self.arrows[a.index()].dom
    }

    pub fn cod(&self, a: ArrowId) -> ObjId {
        self.arrows[a.index()].cod
    }

    pub fn identity(&self, o: ObjId) -> ArrowId {
        self.identities[o.index()]
    }

    pub fn is_identity(&self, a: ArrowId) -> bool {
        let info = &self.arrows[a.index()];
        info.dom == info.cod && self.identities[info.dom.index()] == a
    }

    /// Arrows `dom -> cod`, in declaration order.
    pub fn hom(&self, dom: ObjId, cod: ObjId) -> Vec<ArrowId> {
        self.arrows()
            .filter(|&a| self.dom(a) == dom && self.cod(a) == cod)
            .collect()
    }

    /// Diagrammatic composition: for `f: A -> B`, `g: B -> C` returns `g ∘ f`.
    pub fn compose(&self, f: ArrowId, g: ArrowId) -> Result<ArrowId, CategoryError> {
        self.table
            .get(&(f, g))
            .copied()
            .ok_or_else(|| CategoryError::NotComposable {
                f: self.arrow_name(f).to_string(),
                g: self.arrow_name(g).to_string(),
            })
    }

    /// Compose a nonempty path of arrows in diagrammatic order.
    pub fn compose_path(&self, path: &[ArrowId]) -> Result<ArrowId, CategoryError> {
        let (&first, rest) = path.split_first().ok_or(CategoryError::EmptyWord)?;
        rest.iter().try_fold(first, |acc, &g| self.compose(acc, g))
    }

    pub fn dagger(&self, f: ArrowId) -> ArrowId {
        self.dagger[f.index()]
    }

    /// The loop class of an endomorphism, or `None` if `e` is not one.
    pub fn endo_class(&self, e: ArrowId) -> Option<CanonicalLoop> {
        self.loop_rep[e.index()].map(CanonicalLoop)
    }

    /// Compose a cyclic word of arrows and return its loop class.
    pub fn loop_class(&self, word: &[ArrowId]) -> Result<CanonicalLoop, CategoryError> {
        let (&first, _) = word.split_first().ok_or(CategoryError::EmptyWord)?;
        let last = *word.last().unwrap();
        if self.cod(last) != self.dom(first) {
            return Err(CategoryError::BadWord(self.arrow_name(last).to_string()));
        }
        for w in word.windows(2) {
            if self.cod(w[0]) != self.dom(w[1]) {
                return Err(CategoryError::BadWord(self.arrow_name(w[1]).to_string()));
            }
        }
        let e = self.compose_path(word)?;
        Ok(self
            .endo_class(e)
            .expect("a cyclic word composes to an endomorphism"))
    }

    /// The loop class of `L†` for a loop class `L`.
    pub fn dagger_loop(&self, l: CanonicalLoop) -> CanonicalLoop {
        self.endo_class(self.dagger(l.arrow()))
            .expect("dagger of an endomorphism is an endomorphism")
    }

    /// Render a loop class as `obj:endo`.
    pub fn loop_label(&self, l: CanonicalLoop) -> String {
        let a = l.arrow();
        format!("{}:{}", self.object_name(self.dom(a)), self.arrow_name(a))
    }

    /// Resolve an arrow reference from a token cursor: either `id <Obj>` or
    /// a plain arrow name.
    pub(crate) fn parse_arrow_ref(&self, cur: &mut Cursor<'_>) -> Result<ArrowId, ParseError> {
        let line = cur.line;
        if cur.is_ident("id") {
            if let Some(Token::Ident(obj)) = cur.peek_at(1) {
                cur.next();
                cur.next();
                let o = self
                    .object(obj)
                    .ok_or_else(|| ParseError::new(line, obj.as_str(), "unknown object"))?;
                return Ok(self.identity(o));
            }
        }
        let name = cur.ident()?;
        self.arrow(name)
            .ok_or_else(|| ParseError::new(line, name, "unknown arrow"))
    }

    /// Print the category in the category-file grammar.
    pub fn to_text(&self) -> String {
        let mut out = format!("category {}\n", self.name);
        for o in &self.objects {
            out.push_str(&format!("object {o}\n"));
        }
        for a in self.arrows() {
            if self.is_identity(a) {
                continue;
            }
            let info = self.arrow_info(a);
            out.push_str(&format!(
                "arrow {} : {} -> {}\n",
                info.name,
                self.object_name(info.dom),
                self.object_name(info.cod)
            ));
        }
        for f in self.arrows().filter(|&a| !self.is_identity(a)) {
            for g in self.arrows().filter(|&a| !self.is_identity(a)) {
                if let Some(&h) = self.table.get(&(f, g)) {
                    out.push_str(&format!(
                        "compose {} ; {} = {}\n",
                        self.arrow_name(f),
                        self.arrow_name(g),
                        self.arrow_name(h)
                    ));
                }
            }
        }
        for f in self.arrows().filter(|&a| !self.is_identity(a)) {
            out.push_str(&format!(
                "dagger {} = {}\n",
                self.arrow_name(f),
                self.arrow_name(self.dagger(f))
            ));
        }
        out
    }
}

/// Incremental construction of a [`Category`]; `build` checks every law.
#[derive(Debug, Clone, Default)]
pub struct CategoryBuilder {
    name: String,
    objects: Vec<String>,
    obj_by_name: HashMap<String, ObjId>,
    arrows: Vec<Arrow>,
    arrow_by_name: HashMap<String, ArrowId>,
    identities: Vec<ArrowId>,
    table: HashMap<(ArrowId, ArrowId), ArrowId>,
    dagger: HashMap<ArrowId, ArrowId>,
}

impl CategoryBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CategoryBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    fn check_name(name: &str) -> Result<(), CategoryError> {
        if RESERVED.contains(&name) {
            Err(CategoryError::ReservedName(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn object(&mut self, name: &str) -> Result<ObjId, CategoryError> {
        Self::check_name(name)?;
        if self.obj_by_name.contains_key(name) {
            return Err(CategoryError::DuplicateObject(name.to_string()));
        }
        let o = ObjId(self.objects.len() as u32);
        self.objects.push(name.to_string());
        self.obj_by_name.insert(name.to_string(), o);
        let id = ArrowId(self.arrows.len() as u32);
        let id_name = format!("id {name}");
        self.arrows.push(Arrow {
            name: id_name.clone(),
            dom: o,
            cod: o,
        });
        self.arrow_by_name.insert(id_name, id);
        self.identities.push(id);
        Ok(o)
    }

    fn obj(&self, name: &str) -> Result<ObjId, CategoryError> {
        self.obj_by_name
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
    }

    fn arr(&self, name: &str) -> Result<ArrowId, CategoryError> {
        self.arrow_by_name
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownArrow(name.to_string()))
    }

    pub fn arrow(&mut self, name: &str, dom: &str, cod: &str) -> Result<ArrowId, CategoryError> {
        Self::check_name(name)?;
        if self.arrow_by_name.contains_key(name) {
            return Err(CategoryError::DuplicateArrow(name.to_string()));
        }
        let (dom, cod) = (self.obj(dom)?, self.obj(cod)?);
        let a = ArrowId(self.arrows.len() as u32);
        self.arrows.push(Arrow {
            name: name.to_string(),
            dom,
            cod,
        });
        self.arrow_by_name.insert(name.to_string(), a);
        Ok(a)
    }

    /// Declare `h = g ∘ f` (written `compose f ; g = h`).
    pub fn compose(&mut self, f: &str, g: &str, h: &str) -> Result<&mut Self, CategoryError> {
        let (fa, ga, ha) = (self.arr(f)?, self.arr(g)?, self.arr(h)?);
        self.compose_ids(fa, ga, ha)?;
        Ok(self)
    }

    fn compose_ids(&mut self, f: ArrowId, g: ArrowId, h: ArrowId) -> Result<(), CategoryError> {
        let (fi, gi, hi) = (
            &self.arrows[f.index()],
            &self.arrows[g.index()],
            &self.arrows[h.index()],
        );
        if fi.cod != gi.dom {
            return Err(CategoryError::NotComposable {
                f: fi.name.clone(),
                g: gi.name.clone(),
            });
        }
        if hi.dom != fi.dom || hi.cod != gi.cod {
            return Err(CategoryError::CompositeType {
                f: fi.name.clone(),
                g: gi.name.clone(),
                h: hi.name.clone(),
            });
        }
        if let Some(&prev) = self.table.get(&(f, g)) {
            if prev != h {
                return Err(CategoryError::ConflictingComposite {
                    f: fi.name.clone(),
                    g: gi.name.clone(),
                    h1: self.arrows[prev.index()].name.clone(),
                    h2: hi.name.clone(),
                });
            }
        }
        self.table.insert((f, g), h);
        Ok(())
    }

    pub fn dagger(&mut self, f: &str, g: &str) -> Result<&mut Self, CategoryError> {
        let (fa, ga) = (self.arr(f)?, self.arr(g)?);
        if let Some(&prev) = self.dagger.get(&fa) {
            if prev != ga {
                return Err(CategoryError::DuplicateDagger(f.to_string()));
            }
        }
        self.dagger.insert(fa, ga);
        Ok(self)
    }

    fn is_identity(&self, a: ArrowId) -> bool {
        let info = &self.arrows[a.index()];
        self.identities[info.dom.index()] == a
    }

    pub fn build(mut self) -> Result<Category, CategoryError> {
        let n = self.arrows.len();
        let ids: Vec<ArrowId> = (0..n as u32).map(ArrowId).collect();
        let name = |a: ArrowId, s: &Self| s.arrows[a.index()].name.clone();

        // Identity laws: fill in, or check any explicit declarations.
        for &f in &ids {
            let (dom, cod) = (self.arrows[f.index()].dom, self.arrows[f.index()].cod);
            let (left, right) = (self.identities[dom.index()], self.identities[cod.index()]);
            for (a, b) in [(left, f), (f, right)] {
                match self.table.get(&(a, b)) {
                    Some(&h) if h != f => {
                        return Err(CategoryError::IdentityLaw {
                            f: name(a, &self),
                            g: name(b, &self),
                            h: name(h, &self),
                        })
                    }
                    _ => {
                        self.table.insert((a, b), f);
                    }
                }
            }
        }
        // Totality.
        for &f in &ids {
            for &g in &ids {
                if self.arrows[f.index()].cod == self.arrows[g.index()].dom
                    && !self.table.contains_key(&(f, g))
                {
                    return Err(CategoryError::NotTotal {
                        f: name(f, &self),
                        g: name(g, &self),
                    });
                }
            }
        }
        // Associativity.
        for &f in &ids {
            for &g in &ids {
                let Some(&fg) = self.table.get(&(f, g)) else {
                    continue;
                };
                for &h in &ids {
                    let Some(&gh) = self.table.get(&(g, h)) else {
                        continue;
                    };
                    if self.table[&(fg, h)] != self.table[&(f, gh)] {
                        return Err(CategoryError::NotAssociative {
                            f: name(f, &self),
                            g: name(g, &self),
                            h: name(h, &self),
                        });
                    }
                }
            }
        }
        // Dagger.
        let mut dagger = Vec::with_capacity(n);
        for &f in &ids {
            let g = if self.is_identity(f) {
                match self.dagger.get(&f) {
                    Some(&g) if g != f => {
                        return Err(CategoryError::DaggerOfIdentity(name(f, &self)))
                    }
                    _ => f,
                }
            } else {
                *self
                    .dagger
                    .get(&f)
                    .ok_or_else(|| CategoryError::MissingDagger(name(f, &self)))?
            };
            let (fi, gi) = (&self.arrows[f.index()], &self.arrows[g.index()]);
            if gi.dom != fi.cod || gi.cod != fi.dom {
                return Err(CategoryError::DaggerType {
                    f: name(f, &self),
                    g: name(g, &self),
                });
            }
            dagger.push(g);
        }
        for &f in &ids {
            let g = dagger[f.index()];
            let h = dagger[g.index()];
            if h != f {
                return Err(CategoryError::NotInvolutive {
                    f: name(f, &self),
                    g: name(g, &self),
                    h: name(h, &self),
                });
            }
        }
        for (&(f, g), &h) in &self.table {
            let (fd, gd) = (dagger[f.index()], dagger[g.index()]);
            if dagger[h.index()] != self.table[&(gd, fd)] {
                return Err(CategoryError::NotContravariant {
                    f: name(f, &self),
                    g: name(g, &self),
                });
            }
        }

        let loop_rep = loop_closure(&self.objects, &self.arrows, &self.table);
        Ok(Category {
            name: self.name,
            objects: self.objects,
            obj_by_name: self.obj_by_name,
            arrows: self.arrows,
            arrow_by_name: self.arrow_by_name,
            identities: self.identities,
            table: self.table,
            dagger,
            loop_rep,
        })
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Union-find closure of `g∘f ~ f∘g` over every pair `f: A -> B`,
/// `g: B -> A`; returns the class representative for each endomorphism.
fn loop_closure(
    objects: &[String],
    arrows: &[Arrow],
    table: &HashMap<(ArrowId, ArrowId), ArrowId>,
) -> Vec<Option<ArrowId>> {
    let n = arrows.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for f in 0..n {
        for g in 0..n {
            if arrows[f].cod == arrows[g].dom && arrows[g].cod == arrows[f].dom {
                let a = table[&(ArrowId(f as u32), ArrowId(g as u32))].index();
                let b = table[&(ArrowId(g as u32), ArrowId(f as u32))].index();
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let key = |a: usize| {
        (
            objects[arrows[a].dom.index()].as_str(),
            arrows[a].name.as_str(),
        )
    };
    let mut best: HashMap<usize, usize> = HashMap::new();
    for a in (0..n).filter(|&a| arrows[a].dom == arrows[a].cod) {
        let r = find(&mut parent, a);
        let entry = best.entry(r).or_insert(a);
        if key(a) < key(*entry) {
            *entry = a;
        }
    }
    (0..n)
        .map(|a| {
            if arrows[a].dom == arrows[a].cod {
                let r = find(&mut parent, a);
                Some(ArrowId(best[&r] as u32))
            } else {
                None
            }
        })
        .collect()
}

/// Parse and validate a category file.
pub fn load_category(text: &str) -> Result<Category, CategoryError> {
    let mut builder: Option<CategoryBuilder> = None;
    for (line, toks) in syntax::lines(text)? {
        let mut cur = Cursor::new(&toks, line);
        let kw = cur.ident()?;
        if kw == "category" {
            if builder.is_some() {
                return Err(ParseError::new(line, kw, "duplicate category header").into());
            }
            let name = cur.ident()?;
            cur.expect_end()?;
            builder = Some(CategoryBuilder::new(name));
            continue;
        }
        let b = builder.as_mut().ok_or(CategoryError::MissingHeader)?;
        match kw {
            "object" => {
                let name = cur.ident()?;
                cur.expect_end()?;
                b.object(name)?;
            }
            "arrow" => {
                let name = cur.ident()?;
                cur.expect_sym(":")?;
                let dom = cur.ident()?;
                cur.expect_sym("->")?;
                let cod = cur.ident()?;
                cur.expect_end()?;
                b.arrow(name, dom, cod)?;
            }
            "compose" => {
                let f = arrow_ref(&mut cur)?;
                cur.expect_sym(";")?;
                let g = arrow_ref(&mut cur)?;
                cur.expect_sym("=")?;
                let h = arrow_ref(&mut cur)?;
                cur.expect_end()?;
                b.compose(&f, &g, &h)?;
            }
            "dagger" => {
                let f = arrow_ref(&mut cur)?;
                cur.expect_sym("=")?;
                let g = arrow_ref(&mut cur)?;
                cur.expect_end()?;
                b.dagger(&f, &g)?;
            }
            other => {
                return Err(ParseError::new(line, other, "unknown directive").into());
            }
        }
    }
    builder.ok_or(CategoryError::MissingHeader)?.build()
}

fn arrow_ref(cur: &mut Cursor<'_>) -> Result<String, ParseError> {
    if cur.is_ident("id") {
        cur.next();
        let obj = cur.ident()?;
        return Ok(format!("id {obj}"));
    }
    Ok(cur.ident()?.to_string())
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const C2: &str =
        "category c2\nobject Q\narrow X : Q -> Q\ncompose X ; X = id Q\ndagger X = X\n";

    #[test]
    fn loads_minimal_involutive_category() {
        let c = load_category(C2).unwrap();
        assert_eq!(c.arrow_count(), 2);
        let x = c.arrow("X").unwrap();
        let q = c.object("Q").unwrap();
        assert_eq!(c.compose(x, x).unwrap(), c.identity(q));
        assert_eq!(c.compose(c.identity(q), x).unwrap(), x);
        assert_eq!(c.compose(x, c.identity(q)).unwrap(), x);
        assert_eq!(c.dagger(x), x);
    }

    #[test]
    fn rejects_partial_composition() {
        let text = "category c\nobject Q\narrow X : Q -> Q\ndagger X = X\n";
        let err = load_category(text).unwrap_err();
        assert!(matches!(err, CategoryError::NotTotal { .. }));
        assert!(err.to_string().contains("composition not total"));
    }

    #[test]
    fn rejects_non_involutive_dagger() {
        let mut text = String::from(
            "category c\nobject Q\narrow X : Q -> Q\narrow Y : Q -> Q\narrow Z : Q -> Q\n",
        );
        // Left-zero table: associative, so the dagger check is reached.
        for f in ["X", "Y", "Z"] {
            for g in ["X", "Y", "Z"] {
                text.push_str(&format!("compose {f} ; {g} = {f}\n"));
            }
        }
        text.push_str("dagger X = Y\ndagger Y = Z\ndagger Z = X\n");
        let err = load_category(&text).unwrap_err();
        assert!(err.to_string().contains("dagger not involutive"), "{err}");
    }

    #[test]
    fn rejects_non_associative_table() {
        // A three-element "magma" on one object that is not associative.
        let text = "category c\nobject Q\narrow a : Q -> Q\narrow b : Q -> Q\n\
                    compose a ; a = b\ncompose a ; b = a\ncompose b ; a = b\ncompose b ; b = b\n\
                    dagger a = a\ndagger b = b\n";
        let err = load_category(text).unwrap_err();
        assert!(matches!(err, CategoryError::NotAssociative { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_composite_type_and_syntax() {
        let text = "category c\nobject P\nobject Q\narrow u : P -> Q\ncompose u ; u = u\n";
        assert!(matches!(
            load_category(text).unwrap_err(),
            CategoryError::NotComposable { .. }
        ));
        let err = load_category("category c\nobject Q\narrow X Q -> Q\n").unwrap_err();
        match err {
            CategoryError::Parse(p) => {
                assert_eq!(p.line, 3);
                assert_eq!(p.token, "Q");
            }
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(
            load_category("object Q\n").unwrap_err(),
            CategoryError::MissingHeader
        ));
        assert!(matches!(
            load_category("category c\nobject x\n").unwrap_err(),
            CategoryError::ReservedName(_)
        ));
    }

    #[test]
    fn c2_loop_classes_are_singletons() {
        let c = load_category(C2).unwrap();
        let x = c.arrow("X").unwrap();
        let id = c.identity(c.object("Q").unwrap());
        assert_eq!(c.loop_class(&[x, x]).unwrap(), c.loop_class(&[id]).unwrap());
        assert_ne!(c.loop_class(&[id]).unwrap(), c.loop_class(&[x]).unwrap());
    }

    #[test]
    fn loop_closure_crosses_objects() {
        let c = fixtures::split();
        let u = c.arrow("u").unwrap();
        let v = c.arrow("v").unwrap();
        let e = c.arrow("e").unwrap();
        let id_a = c.identity(c.object("A").unwrap());
        let id_b = c.identity(c.object("B").unwrap());
        assert_eq!(
            c.loop_class(&[u, v]).unwrap(),
            c.loop_class(&[v, u]).unwrap()
        );
        assert_eq!(c.endo_class(e), c.endo_class(id_a));
        assert_ne!(c.endo_class(id_b), c.endo_class(id_a));
        // Representative is least by (object, arrow) name: (A, "id A").
        assert_eq!(c.endo_class(e).unwrap().arrow(), id_a);
    }

    #[test]
    fn pauli_rotations_identify_anticommuting_products() {
        let c = fixtures::pauli8();
        let x = c.arrow("X").unwrap();
        let z = c.arrow("Z").unwrap();
        let xz = c.compose(z, x).unwrap();
        let zx = c.compose(x, z).unwrap();
        assert_ne!(xz, zx);
        assert_eq!(c.endo_class(xz), c.endo_class(zx));
        assert_ne!(c.endo_class(x), c.endo_class(z));
    }

    #[test]
    fn word_errors() {
        let c = fixtures::split();
        let u = c.arrow("u").unwrap();
        assert!(matches!(c.loop_class(&[]), Err(CategoryError::EmptyWord)));
        assert!(matches!(c.loop_class(&[u]), Err(CategoryError::BadWord(_))));
        assert!(matches!(
            c.loop_class(&[u, u]),
            Err(CategoryError::BadWord(_))
        ));
    }

    #[test]
    fn printed_category_reloads() {
        for c in [fixtures::c2(), fixtures::pauli8(), fixtures::split()] {
            let again = load_category(&c.to_text()).unwrap();
            assert_eq!(again.arrow_count(), c.arrow_count());
            for f in c.arrows() {
                for g in c.arrows() {
                    assert_eq!(c.compose(f, g).ok(), again.compose(f, g).ok());
                }
            }
        }
    }
}
