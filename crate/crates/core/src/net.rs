//! Proof nets: slices of links wired through typed ports, nets as
//! multisets of slices sharing their conclusions.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::atoms::{ArrowId, Category};
use crate::formula::{parse_formula_at, Formula, FormulaError};
use crate::syntax::{self, Cursor, ParseError, Token};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub u32);

/// An output port: `index` 0 or 1 for axioms, 0 for every other producer.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub link: LinkId,
    pub index: u8,
}

impl Port {
    pub fn new(link: LinkId, index: u8) -> Port {
        Port { link, index }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CutLabel {
    Arrow(ArrowId),
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LinkKind {
    /// Outputs `(A*, B)` for `f: A -> B`.
    Axiom(ArrowId),
    Cut(CutLabel),
    Times,
    /// Left injection; carries the absent right summand.
    Plus1(Formula),
    /// Right injection; carries the absent left summand.
    Plus2(Formula),
    Unit,
}

impl LinkKind {
    pub fn arity(&self) -> usize {
        match self {
            LinkKind::Axiom(_) | LinkKind::Unit => 0,
            LinkKind::Plus1(_) | LinkKind::Plus2(_) => 1,
            LinkKind::Cut(_) | LinkKind::Times => 2,
        }
    }

    pub fn outputs(&self) -> u8 {
        match self {
            LinkKind::Axiom(_) => 2,
            LinkKind::Cut(_) => 0,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LinkKind::Axiom(_) => "ax",
            LinkKind::Cut(_) => "cut",
            LinkKind::Times => "times",
            LinkKind::Plus1(_) => "plus1",
            LinkKind::Plus2(_) => "plus2",
            LinkKind::Unit => "unit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    pub kind: LinkKind,
    pub inputs: Vec<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("duplicate link name `{0}`")]
    DuplicateLink(String),
    #[error("port `{0}` does not exist")]
    BadPort(String),
    #[error("link `{link}` expects {expected} inputs, got {found}")]
    Arity {
        link: String,
        expected: usize,
        found: usize,
    },
    #[error("port `{0}` is left dangling")]
    Dangling(String),
    #[error("port `{0}` is used more than once")]
    DoubleUse(String),
    #[error("type mismatch at `{at}`: expected {expected}, found {found}")]
    TypeMismatch {
        at: String,
        expected: String,
        found: String,
    },
    #[error("cyclic dependency through link `{0}`")]
    Cyclic(String),
    #[error(
        "correctness criterion: I-link `{0}` must be connected to a plus link or an identity cut"
    )]
    UnitCriterion(String),
    #[error("slice {slice} has conclusions ({found}), net declares ({expected})")]
    ConclusionMismatch {
        slice: usize,
        expected: String,
        found: String,
    },
    #[error("0 among the conclusions of a nonempty net")]
    ZeroConclusion,
    #[error("slice has no `out` line")]
    MissingOut,
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
}

/// One slice: a finite graph of links. Links are keyed by id; the id order
/// is the default redex order.
#[derive(Clone, Debug, Default)]
pub struct Slice {
    links: BTreeMap<LinkId, Link>,
    conclusions: Vec<Port>,
    next_id: u32,
    names: HashMap<LinkId, String>,
}

impl PartialEq for Slice {
    fn eq(&self, other: &Self) -> bool {
        self.links == other.links && self.conclusions == other.conclusions
    }
}

impl Eq for Slice {}

impl Slice {
    pub fn new() -> Slice {
        Slice::default()
    }

    pub fn links(&self) -> impl Iterator<Item = (LinkId, &Link)> {
        self.links.iter().map(|(&id, l)| (id, l))
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(&id)
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn conclusions(&self) -> &[Port] {
        &self.conclusions
    }

    pub fn set_conclusions(&mut self, ports: Vec<Port>) {
        self.conclusions = ports;
    }

    pub fn fresh_id(&mut self) -> LinkId {
        let id = LinkId(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn add(&mut self, kind: LinkKind, inputs: Vec<Port>) -> LinkId {
        let id = self.fresh_id();
        self.links.insert(id, Link { kind, inputs });
        id
    }

    pub(crate) fn insert(&mut self, id: LinkId, link: Link) {
        self.next_id = self.next_id.max(id.0 + 1);
        self.links.insert(id, link);
    }

    pub(crate) fn remove(&mut self, id: LinkId) -> Option<Link> {
        self.names.remove(&id);
        self.links.remove(&id)
    }

    pub(crate) fn link_mut(&mut self, id: LinkId) -> Option<&mut Link> {
        self.links.get_mut(&id)
    }

    /// Replace every use of port `from` (as a link input or a conclusion) by `to`.
    pub(crate) fn redirect(&mut self, from: Port, to: Port) {
        for link in self.links.values_mut() {
            for p in link.inputs.iter_mut() {
                if *p == from {
                    *p = to;
                }
            }
        }
        for p in self.conclusions.iter_mut() {
            if *p == from {
                *p = to;
            }
        }
    }

    pub fn axiom(&mut self, f: ArrowId) -> (Port, Port) {
        let id = self.add(LinkKind::Axiom(f), vec![]);
        (Port::new(id, 0), Port::new(id, 1))
    }

    pub fn unit(&mut self) -> Port {
        Port::new(self.add(LinkKind::Unit, vec![]), 0)
    }

    pub fn times(&mut self, a: Port, b: Port) -> Port {
        Port::new(self.add(LinkKind::Times, vec![a, b]), 0)
    }

    pub fn plus1(&mut self, a: Port, right: Formula) -> Port {
        Port::new(self.add(LinkKind::Plus1(right), vec![a]), 0)
    }

    pub fn plus2(&mut self, left: Formula, b: Port) -> Port {
        Port::new(self.add(LinkKind::Plus2(left), vec![b]), 0)
    }

    pub fn cut(&mut self, a: Port, b: Port, label: CutLabel) -> LinkId {
        self.add(LinkKind::Cut(label), vec![a, b])
    }

    pub fn link_name(&self, id: LinkId) -> String {
        match self.names.get(&id) {
            Some(n) => n.clone(),
            None => format!("#{}", id.0),
        }
    }

    pub fn port_name(&self, p: Port) -> String {
        format!("{}.{}", self.link_name(p.link), p.index)
    }

    /// Label of an output port; assumes the producer chain is acyclic.
    pub fn port_label(&self, cat: &Category, p: Port) -> Formula {
        let link = &self.links[&p.link];
        match &link.kind {
            LinkKind::Axiom(f) => {
                if p.index == 0 {
                    Formula::Dual(cat.dom(*f))
                } else {
                    Formula::Atom(cat.cod(*f))
                }
            }
            LinkKind::Unit => Formula::Unit,
            LinkKind::Times => Formula::tensor(
                self.port_label(cat, link.inputs[0]),
                self.port_label(cat, link.inputs[1]),
            ),
            LinkKind::Plus1(right) => {
                Formula::plus(self.port_label(cat, link.inputs[0]), right.clone())
            }
            LinkKind::Plus2(left) => {
                Formula::plus(left.clone(), self.port_label(cat, link.inputs[0]))
            }
            LinkKind::Cut(_) => unreachable!("cuts have no outputs"),
        }
    }

    /// The link consuming each output port, or `None` for a conclusion.
    pub fn consumers(&self) -> HashMap<Port, Option<LinkId>> {
        let mut out = HashMap::new();
        for (&id, link) in &self.links {
            for &p in &link.inputs {
                out.insert(p, Some(id));
            }
        }
        for &p in &self.conclusions {
            out.insert(p, None);
        }
        out
    }

    /// Check every slice invariant and return the conclusion labels.
    pub fn check(&self, cat: &Category) -> Result<Vec<Formula>, NetError> {
        let mut used: HashMap<Port, usize> = HashMap::new();
        for (&id, link) in &self.links {
            if link.inputs.len() != link.kind.arity() {
                return Err(NetError::Arity {
                    link: self.link_name(id),
                    expected: link.kind.arity(),
                    found: link.inputs.len(),
                });
            }
            match &link.kind {
                LinkKind::Plus1(f) | LinkKind::Plus2(f) => f.validate()?,
                _ => {}
            }
            for &p in &link.inputs {
                *used.entry(p).or_default() += 1;
            }
        }
        for &p in &self.conclusions {
            *used.entry(p).or_default() += 1;
        }
        for (&p, &n) in &used {
            match self.links.get(&p.link) {
                Some(l) if p.index < l.kind.outputs() => {}
                _ => return Err(NetError::BadPort(self.port_name(p))),
            }
            if n > 1 {
                return Err(NetError::DoubleUse(self.port_name(p)));
            }
        }
        for (&id, link) in &self.links {
            for i in 0..link.kind.outputs() {
                let p = Port::new(id, i);
                if !used.contains_key(&p) {
                    return Err(NetError::Dangling(self.port_name(p)));
                }
            }
        }

        let consumers = self.consumers();
        for (&id, link) in &self.links {
            if link.kind == LinkKind::Unit {
                let ok = match consumers[&Port::new(id, 0)] {
                    None => false,
                    Some(c) => matches!(
                        self.links[&c].kind,
                        LinkKind::Plus1(_) | LinkKind::Plus2(_) | LinkKind::Cut(CutLabel::Identity)
                    ),
                };
                if !ok {
                    return Err(NetError::UnitCriterion(self.link_name(id)));
                }
            }
        }
        let labels = self.labels(cat)?;
        for (&id, link) in &self.links {
            if let LinkKind::Cut(label) = &link.kind {
                let (a, b) = (&labels[&link.inputs[0]], &labels[&link.inputs[1]]);
                let ok = match label {
                    CutLabel::Identity => *b == a.star(),
                    CutLabel::Arrow(g) => {
                        let (dom, cod) = (Formula::Atom(cat.dom(*g)), Formula::Dual(cat.cod(*g)));
                        (*a == dom && *b == cod) || (*a == cod && *b == dom)
                    }
                };
                if !ok {
                    let expected = match label {
                        CutLabel::Identity => format!("X and X* (got X = {})", a.display(cat)),
                        CutLabel::Arrow(g) => format!(
                            "{} and {}*",
                            cat.object_name(cat.dom(*g)),
                            cat.object_name(cat.cod(*g))
                        ),
                    };
                    return Err(NetError::TypeMismatch {
                        at: format!("cut {}", self.link_name(id)),
                        expected,
                        found: format!("{} and {}", a.display(cat), b.display(cat)),
                    });
                }
            }
        }
        for label in labels.values() {
            label.validate()?;
        }
        Ok(self.conclusions.iter().map(|p| labels[p].clone()).collect())
    }

    fn labels(&self, cat: &Category) -> Result<HashMap<Port, Formula>, NetError> {
        enum Mark {
            Visiting,
            Done,
        }
        fn visit(
            s: &Slice,
            cat: &Category,
            id: LinkId,
            marks: &mut HashMap<LinkId, Mark>,
            out: &mut HashMap<Port, Formula>,
        ) -> Result<(), NetError> {
            match marks.get(&id) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Visiting) => return Err(NetError::Cyclic(s.link_name(id))),
                None => {}
            }
            marks.insert(id, Mark::Visiting);
            let link = &s.links[&id];
            for &p in &link.inputs {
                visit(s, cat, p.link, marks, out)?;
            }
            let input = |i: usize| out[&link.inputs[i]].clone();
            let label = match &link.kind {
                LinkKind::Axiom(f) => {
                    out.insert(Port::new(id, 0), Formula::Dual(cat.dom(*f)));
                    Some(Formula::Atom(cat.cod(*f)))
                }
                LinkKind::Unit => Some(Formula::Unit),
                LinkKind::Times => Some(Formula::tensor(input(0), input(1))),
                LinkKind::Plus1(r) => Some(Formula::plus(input(0), r.clone())),
                LinkKind::Plus2(l) => Some(Formula::plus(l.clone(), input(0))),
                LinkKind::Cut(_) => None,
            };
            if let Some(label) = label {
                let idx = if matches!(link.kind, LinkKind::Axiom(_)) {
                    1
                } else {
                    0
                };
                out.insert(Port::new(id, idx), label);
            }
            marks.insert(id, Mark::Done);
            Ok(())
        }
        let mut marks = HashMap::new();
        let mut out = HashMap::new();
        for &id in self.links.keys() {
            visit(self, cat, id, &mut marks, &mut out)?;
        }
        Ok(out)
    }

    /// Connected components (undirected), each as a sorted list of link ids.
    pub fn components(&self) -> Vec<Vec<LinkId>> {
        let ids: Vec<LinkId> = self.links.keys().copied().collect();
        let pos: HashMap<LinkId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (&id, link) in &self.links {
            for p in &link.inputs {
                let (a, b) = (find(&mut parent, pos[&id]), find(&mut parent, pos[&p.link]));
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<LinkId>> = BTreeMap::new();
        for (i, &id) in ids.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(id);
        }
        let mut out: Vec<Vec<LinkId>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Give links the short names used by the printer.
    fn printed_name(&self, id: LinkId) -> String {
        let prefix = match self.links[&id].kind {
            LinkKind::Axiom(_) => "a",
            LinkKind::Unit => "u",
            LinkKind::Times => "t",
            LinkKind::Plus1(_) | LinkKind::Plus2(_) => "p",
            LinkKind::Cut(_) => "c",
        };
        format!("{prefix}{}", id.0)
    }

    fn write_text(&self, cat: &Category, out: &mut String) {
        let pn = |p: &Port| format!("{}.{}", self.printed_name(p.link), p.index);
        out.push_str("slice\n");
        for (&id, link) in &self.links {
            let name = self.printed_name(id);
            let line = match &link.kind {
                LinkKind::Axiom(f) => format!("ax {name} : {}", cat.arrow_name(*f)),
                LinkKind::Unit => format!("unit {name}"),
                LinkKind::Times => format!(
                    "times {name} = {} {}",
                    pn(&link.inputs[0]),
                    pn(&link.inputs[1])
                ),
                LinkKind::Plus1(r) => format!(
                    "plus1 {name} = {} | {}",
                    pn(&link.inputs[0]),
                    r.display(cat)
                ),
                LinkKind::Plus2(l) => format!(
                    "plus2 {name} = {} | {}",
                    l.display(cat),
                    pn(&link.inputs[0])
                ),
                LinkKind::Cut(label) => {
                    let l = match label {
                        CutLabel::Identity => "id".to_string(),
                        CutLabel::Arrow(g) => cat.arrow_name(*g).to_string(),
                    };
                    format!(
                        "cut {} , {} : {l}",
                        pn(&link.inputs[0]),
                        pn(&link.inputs[1])
                    )
                }
            };
            let _ = writeln!(out, "  {line}");
        }
        let outs: Vec<String> = self.conclusions.iter().map(pn).collect();
        if outs.is_empty() {
            out.push_str("  out\n");
        } else {
            let _ = writeln!(out, "  out {}", outs.join(" , "));
        }
        out.push_str("end\n");
    }
}

/// A proof net: a multiset of slices with common conclusions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    name: String,
    conclusions: Vec<Formula>,
    slices: Vec<Slice>,
}

impl Net {
    /// Build a net, checking every slice and the shared conclusions.
    pub fn new(
        name: impl Into<String>,
        conclusions: Vec<Formula>,
        slices: Vec<Slice>,
        cat: &Category,
    ) -> Result<Net, NetError> {
        for f in &conclusions {
            f.validate()?;
        }
        if !slices.is_empty() && conclusions.iter().any(Formula::contains_zero) {
            return Err(NetError::ZeroConclusion);
        }
        for (i, s) in slices.iter().enumerate() {
            let found = s.check(cat)?;
            if found != conclusions {
                return Err(NetError::ConclusionMismatch {
                    slice: i,
                    expected: list(&conclusions, cat),
                    found: list(&found, cat),
                });
            }
        }
        Ok(Net {
            name: name.into(),
            conclusions,
            slices,
        })
    }

    pub(crate) fn new_unchecked(
        name: String,
        conclusions: Vec<Formula>,
        slices: Vec<Slice>,
    ) -> Net {
        Net {
            name,
            conclusions,
            slices,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Net {
        self.name = name.into();
        self
    }

    pub fn conclusions(&self) -> &[Formula] {
        &self.conclusions
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn link_count(&self) -> usize {
        self.slices.iter().map(Slice::link_count).sum()
    }

    /// Print in the net-file grammar; link names are regenerated.
    pub fn to_text(&self, cat: &Category) -> String {
        let mut out = format!("net {}\n", self.name);
        let _ = writeln!(out, "conclusions {}", list(&self.conclusions, cat));
        for s in &self.slices {
            s.write_text(cat, &mut out);
        }
        out
    }

    /// Render as a DOT digraph with one cluster per slice. Conclusion
    /// anchors `concl<i>` are shared between clusters.
    pub fn to_dot(&self, cat: &Category) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(&self.name));
        out.push_str("  node [shape=box];\n");
        for (i, f) in self.conclusions.iter().enumerate() {
            let _ = writeln!(
                out,
                "  concl{i} [shape=plaintext, label=\"{}\"];",
                escape(&f.display(cat).to_string())
            );
        }
        for (si, s) in self.slices.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{si} {{");
            let _ = writeln!(out, "    label=\"slice {si}\";");
            for (id, link) in s.links() {
                let label = match &link.kind {
                    LinkKind::Axiom(f) => format!("ax {}", cat.arrow_name(*f)),
                    LinkKind::Cut(CutLabel::Identity) => "cut id".to_string(),
                    LinkKind::Cut(CutLabel::Arrow(g)) => format!("cut {}", cat.arrow_name(*g)),
                    LinkKind::Times => "⊗".to_string(),
                    LinkKind::Plus1(_) => "⊕1".to_string(),
                    LinkKind::Plus2(_) => "⊕2".to_string(),
                    LinkKind::Unit => "I".to_string(),
                };
                let _ = writeln!(out, "    s{si}_l{} [label=\"{}\"];", id.0, escape(&label));
            }
            out.push_str("  }\n");
            for (id, link) in s.links() {
                for &p in &link.inputs {
                    let _ = writeln!(
                        out,
                        "  s{si}_l{} -> s{si}_l{} [label=\"{}\"];",
                        p.link.0,
                        id.0,
                        escape(&s.port_label(cat, p).display(cat).to_string())
                    );
                }
            }
            for (k, &p) in s.conclusions().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  s{si}_l{} -> concl{k} [label=\"{}\"];",
                    p.link.0,
                    escape(&s.port_label(cat, p).display(cat).to_string())
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(crate) fn list(fs: &[Formula], cat: &Category) -> String {
    fs.iter()
        .map(|f| f.display(cat).to_string())
        .collect::<Vec<_>>()
        .join(" , ")
}

/// Parse a net file against a category.
pub fn parse_net(text: &str, cat: &Category) -> Result<Net, NetError> {
    let lines = syntax::lines(text)?;
    let mut it = lines.iter().peekable();
    let mut name = None;
    let mut conclusions = None;
    let mut slices = Vec::new();
    while let Some((line, toks)) = it.next() {
        let mut cur = Cursor::new(toks, *line);
        match cur.ident()? {
            "net" => {
                name = Some(cur.ident()?.to_string());
                cur.expect_end()?;
            }
            "conclusions" => {
                let mut fs = Vec::new();
                if !cur.at_end() {
                    loop {
                        fs.push(parse_formula_at(&mut cur, cat)?);
                        if !cur.eat_sym(",") {
                            break;
                        }
                    }
                }
                cur.expect_end()?;
                conclusions = Some(fs);
            }
            "slice" => {
                let mut body = Vec::new();
                loop {
                    match it.next() {
                        Some((l, t)) if matches!(t.first(), Some(Token::Ident(s)) if s == "end") => {
                            Cursor::new(&t[1..], *l).expect_end()?;
                            break;
                        }
                        Some((l, t)) => body.push((*l, t.clone())),
                        None => {
                            return Err(ParseError::new(*line, "slice", "unterminated slice").into())
                        }
                    }
                }
                slices.push(parse_slice(&body, cat)?);
            }
            other => return Err(ParseError::new(*line, other, "unknown directive").into()),
        }
    }
    let name = name.ok_or(NetError::MissingHeader("net"))?;
    let conclusions = conclusions.ok_or(NetError::MissingHeader("conclusions"))?;
    Net::new(name, conclusions, slices, cat)
}

fn parse_slice(body: &[(usize, Vec<Token>)], cat: &Category) -> Result<Slice, NetError> {
    // First pass: give every link an id in line order so ports may refer forward.
    let mut ids: HashMap<String, LinkId> = HashMap::new();
    let mut slice = Slice::new();
    let mut out_line = None;
    let mut stmts = Vec::new();
    for (line, toks) in body {
        let mut cur = Cursor::new(toks, *line);
        let kw = cur.ident()?;
        match kw {
            "ax" | "unit" | "times" | "plus1" | "plus2" => {
                let n = cur.ident()?;
                let id = slice.fresh_id();
                if ids.insert(n.to_string(), id).is_some() {
                    return Err(NetError::DuplicateLink(n.to_string()));
                }
                slice.names.insert(id, n.to_string());
                stmts.push((id, kw, *line, toks));
            }
            "cut" => {
                let id = slice.fresh_id();
                stmts.push((id, kw, *line, toks));
            }
            "out" => {
                if out_line.is_some() {
                    return Err(ParseError::new(*line, kw, "duplicate `out` line").into());
                }
                out_line = Some((*line, toks.clone()));
            }
            other => return Err(ParseError::new(*line, other, "unknown link kind").into()),
        }
    }
    let port = |cur: &mut Cursor<'_>| -> Result<Port, NetError> {
        let line = cur.line;
        let n = cur.ident()?;
        let id = *ids
            .get(n)
            .ok_or_else(|| NetError::Parse(ParseError::new(line, n, "unknown link")))?;
        cur.expect_sym(".")?;
        let idx = cur.usize()?;
        let idx = u8::try_from(idx)
            .map_err(|_| ParseError::new(line, idx.to_string(), "bad port index"))?;
        Ok(Port::new(id, idx))
    };
    for (id, kw, line, toks) in stmts {
        let mut cur = Cursor::new(toks, line);
        cur.next();
        let link = match kw {
            "ax" => {
                cur.ident()?;
                cur.expect_sym(":")?;
                let f = cat.parse_arrow_ref(&mut cur)?;
                Link {
                    kind: LinkKind::Axiom(f),
                    inputs: vec![],
                }
            }
            "unit" => {
                cur.ident()?;
                Link {
                    kind: LinkKind::Unit,
                    inputs: vec![],
                }
            }
            "times" => {
                cur.ident()?;
                cur.expect_sym("=")?;
                let a = port(&mut cur)?;
                let b = port(&mut cur)?;
                Link {
                    kind: LinkKind::Times,
                    inputs: vec![a, b],
                }
            }
            "plus1" => {
                cur.ident()?;
                cur.expect_sym("=")?;
                let a = port(&mut cur)?;
                cur.expect_sym("|")?;
                let r = parse_formula_at(&mut cur, cat)?;
                Link {
                    kind: LinkKind::Plus1(r),
                    inputs: vec![a],
                }
            }
            "plus2" => {
                cur.ident()?;
                cur.expect_sym("=")?;
                let l = parse_formula_at(&mut cur, cat)?;
                cur.expect_sym("|")?;
                let b = port(&mut cur)?;
                Link {
                    kind: LinkKind::Plus2(l),
                    inputs: vec![b],
                }
            }
            "cut" => {
                let a = port(&mut cur)?;
                cur.expect_sym(",")?;
                let b = port(&mut cur)?;
                cur.expect_sym(":")?;
                let label = if cur.is_ident("id") && cur.peek_at(1).is_none() {
                    cur.next();
                    CutLabel::Identity
                } else {
                    let g = cat.parse_arrow_ref(&mut cur)?;
                    if cat.is_identity(g) {
                        CutLabel::Identity
                    } else {
                        CutLabel::Arrow(g)
                    }
                };
                Link {
                    kind: LinkKind::Cut(label),
                    inputs: vec![a, b],
                }
            }
            _ => unreachable!(),
        };
        cur.expect_end()?;
        slice.insert(id, link);
    }
    let (line, toks) = out_line.ok_or(NetError::MissingOut)?;
    let mut cur = Cursor::new(&toks, line);
    cur.next();
    let mut outs = Vec::new();
    if !cur.at_end() {
        loop {
            outs.push(port(&mut cur)?);
            if !cur.eat_sym(",") {
                break;
            }
        }
    }
    cur.expect_end()?;
    slice.set_conclusions(outs);
    Ok(slice)
}
