//! Cut elimination: redex detection, the rewrite rules, normalization
//! strategies, canonical normal forms and β-equality.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::atoms::{ArrowId, CanonicalLoop, Category, CategoryError};
use crate::formula::Formula;
use crate::net::{list, CutLabel, LinkId, LinkKind, Net, Port, Slice};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// A non-identity cut on both outputs of one axiom.
    AxSelf,
    /// A cut between outputs of two distinct axioms.
    AxAx,
    TensorCut,
    /// A cut between two plus links with injection indices `(i, j)`.
    PlusCut(u8, u8),
    UnitCut,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::AxSelf => f.write_str("ax-self"),
            Rule::AxAx => f.write_str("ax-ax"),
            Rule::TensorCut => f.write_str("tensor-cut"),
            Rule::PlusCut(i, j) => write!(f, "plus-cut({i},{j})"),
            Rule::UnitCut => f.write_str("unit-cut"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Redex {
    pub cut: LinkId,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("stale redex at cut #{0}")]
    StaleRedex(u32),
    #[error("slice is not normal: cut #{0} is a redex")]
    NotNormal(u32),
    #[error("nets have different conclusions: ({0}) and ({1})")]
    ConclusionMismatch(String, String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// The result of one rewrite step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Slice(Slice),
    Deleted,
}

fn classify(s: &Slice, id: LinkId) -> Option<Rule> {
    let link = s.link(id)?;
    let LinkKind::Cut(label) = link.kind else {
        return None;
    };
    let (p, q) = (link.inputs[0], link.inputs[1]);
    let (lp, lq) = (s.link(p.link)?, s.link(q.link)?);
    match (&lp.kind, &lq.kind) {
        (LinkKind::Axiom(_), LinkKind::Axiom(_)) if p.link == q.link => match label {
            CutLabel::Identity => None,
            CutLabel::Arrow(_) => Some(Rule::AxSelf),
        },
        (LinkKind::Axiom(_), LinkKind::Axiom(_)) => Some(Rule::AxAx),
        (LinkKind::Times, LinkKind::Times) => Some(Rule::TensorCut),
        (
            a @ (LinkKind::Plus1(_) | LinkKind::Plus2(_)),
            b @ (LinkKind::Plus1(_) | LinkKind::Plus2(_)),
        ) => Some(Rule::PlusCut(injection(a), injection(b))),
        (LinkKind::Unit, LinkKind::Unit) => Some(Rule::UnitCut),
        _ => None,
    }
}

fn injection(k: &LinkKind) -> u8 {
    match k {
        LinkKind::Plus1(_) => 1,
        _ => 2,
    }
}

/// Every cut of a well-formed slice that admits a rule, in link-id order.
pub fn find_redexes(s: &Slice) -> Vec<Redex> {
    s.links()
        .filter_map(|(id, _)| classify(s, id).map(|rule| Redex { cut: id, rule }))
        .collect()
}

pub fn is_normal(s: &Slice) -> bool {
    find_redexes(s).is_empty()
}

/// Apply one rewrite to a copy of `s`.
pub fn step(s: &Slice, r: Redex, cat: &Category) -> Result<Step, RewriteError> {
    let mut out = s.clone();
    Ok(if apply(&mut out, r, cat)? {
        Step::Slice(out)
    } else {
        Step::Deleted
    })
}

/// Rewrite in place; returns `false` if the slice is deleted.
fn apply(s: &mut Slice, r: Redex, cat: &Category) -> Result<bool, RewriteError> {
    if classify(s, r.cut) != Some(r.rule) {
        return Err(RewriteError::StaleRedex(r.cut.0));
    }
    let cut = s.link(r.cut).cloned().expect("classified");
    let LinkKind::Cut(label) = cut.kind else {
        unreachable!()
    };
    let (p, q) = (cut.inputs[0], cut.inputs[1]);
    let axiom = |s: &Slice, id: LinkId| match s.link(id).map(|l| &l.kind) {
        Some(LinkKind::Axiom(f)) => *f,
        _ => unreachable!("classified"),
    };
    match r.rule {
        Rule::AxAx => {
            // The atom input is always an axiom's output 1, the dual atom its output 0.
            let (pos, neg) = if p.index == 1 { (p, q) } else { (q, p) };
            let (f, h) = (axiom(s, pos.link), axiom(s, neg.link));
            let mut path = vec![f];
            if let CutLabel::Arrow(g) = label {
                path.push(g);
            }
            path.push(h);
            let fused = cat.compose_path(&path)?;
            s.remove(r.cut);
            s.remove(neg.link);
            s.link_mut(pos.link).expect("present").kind = LinkKind::Axiom(fused);
            s.redirect(Port::new(neg.link, 1), Port::new(pos.link, 1));
        }
        Rule::AxSelf => {
            let CutLabel::Arrow(g) = label else {
                unreachable!()
            };
            let f = axiom(s, p.link);
            let e = cat.compose(f, g)?;
            s.link_mut(p.link).expect("present").kind = LinkKind::Axiom(e);
            s.link_mut(r.cut).expect("present").kind = LinkKind::Cut(CutLabel::Identity);
        }
        Rule::TensorCut => {
            let a = s.remove(p.link).expect("present").inputs;
            let b = s.remove(q.link).expect("present").inputs;
            s.remove(r.cut);
            s.cut(a[0], b[0], CutLabel::Identity);
            s.cut(a[1], b[1], CutLabel::Identity);
        }
        Rule::PlusCut(i, j) => {
            if i != j {
                return Ok(false);
            }
            let a = s.remove(p.link).expect("present").inputs[0];
            let b = s.remove(q.link).expect("present").inputs[0];
            s.remove(r.cut);
            s.cut(a, b, CutLabel::Identity);
        }
        Rule::UnitCut => {
            s.remove(p.link);
            s.remove(q.link);
            s.remove(r.cut);
        }
    }
    Ok(true)
}

/// Redex selection strategy.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Always rewrite the cut with the least link id.
    MinId,
    /// Pick uniformly among the redexes; slice `k` uses seed `seed + k`.
    Random(u64),
}

/// One logged rewrite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub slice: usize,
    pub rule: Rule,
    pub cut: LinkId,
    /// Link count after the step, or `None` if the slice was deleted.
    pub links: Option<usize>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.links {
            Some(n) => write!(
                f,
                "slice {}: {} at cut #{} -> {} links",
                self.slice, self.rule, self.cut.0, n
            ),
            None => write!(
                f,
                "slice {}: {} at cut #{} -> deleted",
                self.slice, self.rule, self.cut.0
            ),
        }
    }
}

/// Per-slice outcome of normalization.
#[derive(Clone, Debug)]
pub struct SliceRun {
    /// The normal slice, or `None` if it was deleted.
    pub result: Option<Slice>,
    pub steps: usize,
    pub initial_links: usize,
    pub trace: Vec<TraceStep>,
}

pub fn normalize_slice(
    s: &Slice,
    index: usize,
    cat: &Category,
    strategy: Strategy,
) -> Result<SliceRun, RewriteError> {
    let mut cur = s.clone();
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64))),
        Strategy::MinId => None,
    };
    let mut trace = Vec::new();
    loop {
        let redexes = find_redexes(&cur);
        let r = match &mut rng {
            None => redexes.first().copied(),
            Some(rng) => redexes.choose(rng).copied(),
        };
        let Some(r) = r else {
            break;
        };
        let alive = apply(&mut cur, r, cat)?;
        trace.push(TraceStep {
            slice: index,
            rule: r.rule,
            cut: r.cut,
            links: alive.then(|| cur.link_count()),
        });
        if !alive {
            return Ok(SliceRun {
                result: None,
                steps: trace.len(),
                initial_links: s.link_count(),
                trace,
            });
        }
    }
    Ok(SliceRun {
        result: Some(cur),
        steps: trace.len(),
        initial_links: s.link_count(),
        trace,
    })
}

/// Normalization of a whole net, keeping the per-slice runs.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub runs: Vec<SliceRun>,
    pub normal: NormalNet,
}

impl Normalization {
    /// All steps in slice order.
    pub fn trace(&self) -> impl Iterator<Item = &TraceStep> {
        self.runs.iter().flat_map(|r| r.trace.iter())
    }

    /// The surviving normal slices as a net, in their original order.
    pub fn reduced_net(&self, name: &str, conclusions: &[Formula]) -> Net {
        let slices = self.runs.iter().filter_map(|r| r.result.clone()).collect();
        Net::new_unchecked(name.to_string(), conclusions.to_vec(), slices)
    }
}

/// Normalize every slice (in parallel) and canonicalize the survivors.
pub fn normalize_with(
    n: &Net,
    cat: &Category,
    strategy: Strategy,
) -> Result<Normalization, RewriteError> {
    let runs = n
        .slices()
        .par_iter()
        .enumerate()
        .map(|(i, s)| normalize_slice(s, i, cat, strategy))
        .collect::<Result<Vec<_>, _>>()?;
    let mut slices = runs
        .iter()
        .filter_map(|r| r.result.as_ref())
        .map(|s| canonicalize(s, cat))
        .collect::<Result<Vec<_>, _>>()?;
    slices.sort();
    Ok(Normalization {
        runs,
        normal: NormalNet {
            conclusions: n.conclusions().to_vec(),
            slices,
        },
    })
}

pub fn normalize(n: &Net, cat: &Category) -> Result<NormalNet, RewriteError> {
    Ok(normalize_with(n, cat, Strategy::MinId)?.normal)
}

/// The data determining a normal slice up to link renaming.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalSlice {
    pub conclusions: Vec<Formula>,
    /// One entry per plus link met in a pre-order walk of the conclusions
    /// (`false` = left injection).
    pub choices: Vec<bool>,
    /// `(negative position, positive position, label)` over the leaf atoms
    /// in walk order, sorted.
    pub pairs: Vec<(usize, usize, ArrowId)>,
    pub loops: Vec<CanonicalLoop>,
}

fn walk(s: &Slice, p: Port, choices: &mut Vec<bool>, leaves: &mut Vec<Port>) {
    let link = s.link(p.link).expect("well-formed");
    match &link.kind {
        LinkKind::Axiom(_) => leaves.push(p),
        LinkKind::Unit => {}
        LinkKind::Times => {
            walk(s, link.inputs[0], choices, leaves);
            walk(s, link.inputs[1], choices, leaves);
        }
        LinkKind::Plus1(_) => {
            choices.push(false);
            walk(s, link.inputs[0], choices, leaves);
        }
        LinkKind::Plus2(_) => {
            choices.push(true);
            walk(s, link.inputs[0], choices, leaves);
        }
        LinkKind::Cut(_) => unreachable!("cuts have no outputs"),
    }
}

/// Read off the canonical data of a normal, well-formed slice.
pub fn canonicalize(s: &Slice, cat: &Category) -> Result<CanonicalSlice, RewriteError> {
    if let Some(r) = find_redexes(s).first() {
        return Err(RewriteError::NotNormal(r.cut.0));
    }
    let mut choices = Vec::new();
    let mut leaves = Vec::new();
    for &p in s.conclusions() {
        walk(s, p, &mut choices, &mut leaves);
    }
    let pos: HashMap<Port, usize> = leaves.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut pairs = Vec::new();
    let mut loops = Vec::new();
    for (id, link) in s.links() {
        if let LinkKind::Axiom(f) = link.kind {
            match (pos.get(&Port::new(id, 0)), pos.get(&Port::new(id, 1))) {
                (Some(&n), Some(&p)) => pairs.push((n, p, f)),
                _ => loops.push(
                    cat.endo_class(f)
                        .expect("a closed loop is labelled by an endomorphism"),
                ),
            }
        }
    }
    pairs.sort();
    loops.sort();
    Ok(CanonicalSlice {
        conclusions: s
            .conclusions()
            .iter()
            .map(|&p| s.port_label(cat, p))
            .collect(),
        choices,
        pairs,
        loops,
    })
}

impl CanonicalSlice {
    /// Rebuild a slice: axioms for the pairs, the conclusion trees, then
    /// one axiom closed by an identity cut per loop.
    pub fn to_slice(&self) -> Slice {
        let mut s = Slice::new();
        let leaf_count = self.pairs.len() * 2;
        let mut ports = vec![None; leaf_count];
        for &(n, p, f) in &self.pairs {
            let (a, b) = s.axiom(f);
            ports[n] = Some(a);
            ports[p] = Some(b);
        }
        let mut leaves = ports
            .into_iter()
            .map(|p| p.expect("every position is paired"));
        let mut choices = self.choices.iter().copied();
        let outs = self
            .conclusions
            .iter()
            .map(|f| build(&mut s, f, &mut choices, &mut leaves))
            .collect();
        s.set_conclusions(outs);
        for l in &self.loops {
            let (a, b) = s.axiom(l.arrow());
            s.cut(b, a, CutLabel::Identity);
        }
        s
    }
}

pub(crate) fn build(
    s: &mut Slice,
    f: &Formula,
    choices: &mut impl Iterator<Item = bool>,
    leaves: &mut impl Iterator<Item = Port>,
) -> Port {
    match f {
        Formula::Atom(_) | Formula::Dual(_) => leaves.next().expect("enough leaves"),
        Formula::Unit => s.unit(),
        Formula::Tensor(a, b) => {
            let pa = build(s, a, choices, leaves);
            let pb = build(s, b, choices, leaves);
            s.times(pa, pb)
        }
        Formula::Plus(a, b) => {
            if choices.next().expect("enough choices") {
                let pb = build(s, b, choices, leaves);
                s.plus2((**a).clone(), pb)
            } else {
                let pa = build(s, a, choices, leaves);
                s.plus1(pa, (**b).clone())
            }
        }
        Formula::Zero => unreachable!("0 labels no edge"),
    }
}

/// A normal net: the sorted multiset of its canonical slices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalNet {
    pub conclusions: Vec<Formula>,
    pub slices: Vec<CanonicalSlice>,
}

impl NormalNet {
    pub fn to_net(&self, name: &str) -> Net {
        let slices = self.slices.iter().map(CanonicalSlice::to_slice).collect();
        Net::new_unchecked(name.to_string(), self.conclusions.clone(), slices)
    }

    pub fn to_text(&self, name: &str, cat: &Category) -> String {
        self.to_net(name).to_text(cat)
    }
}

/// β-equality, decided by comparing normal forms.
pub fn beta_equal(a: &Net, b: &Net, cat: &Category) -> Result<bool, RewriteError> {
    if a.conclusions() != b.conclusions() {
        return Err(RewriteError::ConclusionMismatch(
            list(a.conclusions(), cat),
            list(b.conclusions(), cat),
        ));
    }
    Ok(normalize(a, cat)? == normalize(b, cat)?)
}
