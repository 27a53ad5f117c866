//! Seeded generators of well-formed random nets and free arrows, shared by
//! the property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::atoms::{ArrowId, CanonicalLoop, Category, ObjId};
use crate::formula::Anf;
use crate::formula::{star_word, Formula, Literal, Word};
use crate::freecat::{FreeArrow, KLTriple};
use crate::net::{CutLabel, Net, Port, Slice};
use crate::rewrite::build;

/// Size limits for generated nets.
#[derive(Copy, Clone, Debug)]
pub struct Limits {
    pub max_links: usize,
    pub max_slices: usize,
    pub max_conclusions: usize,
    pub max_gadgets: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_links: 12,
            max_slices: 4,
            max_conclusions: 3,
            max_gadgets: 2,
        }
    }
}

fn random_literal<R: Rng>(rng: &mut R, cat: &Category) -> Literal {
    let o = ObjId(rng.gen_range(0..cat.object_count() as u32));
    if rng.gen_bool(0.5) {
        Literal::Atom(o)
    } else {
        Literal::Dual(o)
    }
}

/// A valid formula of depth at most `depth`; `I` may appear only directly
/// under `+`.
pub fn random_formula<R: Rng>(rng: &mut R, cat: &Category, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        return random_literal(rng, cat).to_formula();
    }
    if rng.gen_bool(0.5) {
        Formula::tensor(
            random_formula(rng, cat, depth - 1),
            random_formula(rng, cat, depth - 1),
        )
    } else {
        let side = |rng: &mut R| {
            if rng.gen_bool(0.25) {
                Formula::Unit
            } else {
                random_formula(rng, cat, depth - 1)
            }
        };
        let a = side(rng);
        let b = side(rng);
        Formula::plus(a, b)
    }
}

fn has_hom(cat: &Category, a: ObjId, b: ObjId) -> bool {
    !cat.hom(a, b).is_empty()
}

/// A random perfect matching of negative with positive demands, each pair
/// admitting an arrow from the negative object to the positive one.
fn match_demands<R: Rng>(
    rng: &mut R,
    cat: &Category,
    demands: &[Literal],
) -> Option<Vec<(usize, usize)>> {
    let mut neg: Vec<usize> = (0..demands.len())
        .filter(|&k| demands[k].is_negative())
        .collect();
    let mut pos: Vec<usize> = (0..demands.len())
        .filter(|&k| !demands[k].is_negative())
        .collect();
    if neg.len() != pos.len() {
        return None;
    }
    neg.shuffle(rng);
    pos.shuffle(rng);
    // Kuhn's augmenting paths over the shuffled order.
    let mut owner: Vec<Option<usize>> = vec![None; pos.len()];
    fn augment(
        u: usize,
        neg: &[usize],
        pos: &[usize],
        demands: &[Literal],
        cat: &Category,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for v in 0..pos.len() {
            if seen[v] || !has_hom(cat, demands[neg[u]].object(), demands[pos[v]].object()) {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none() || augment(owner[v].unwrap(), neg, pos, demands, cat, seen, owner)
            {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    for u in 0..neg.len() {
        let mut seen = vec![false; pos.len()];
        if !augment(u, &neg, &pos, demands, cat, &mut seen, &mut owner) {
            return None;
        }
    }
    Some(
        owner
            .iter()
            .enumerate()
            .map(|(v, u)| (neg[u.expect("perfect")], pos[v]))
            .collect(),
    )
}

/// The literals of ANF component `index` of each conclusion, concatenated.
fn leaves(conclusions: &[Formula], combo: &[usize]) -> Word {
    conclusions
        .iter()
        .zip(combo)
        .flat_map(|(f, &i)| f.anf().components[i].clone())
        .collect()
}

/// Every choice of one ANF component per conclusion.
fn combos(conclusions: &[Formula]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for f in conclusions {
        let n = f.component_count();
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..n).map(move |i| {
                    let mut c = c.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    out
}

/// Component choices whose leaves can be paired by axioms.
fn feasible_combos<R: Rng>(
    rng: &mut R,
    cat: &Category,
    conclusions: &[Formula],
    max_leaves: usize,
) -> Vec<Vec<usize>> {
    combos(conclusions)
        .into_iter()
        .filter(|c| {
            let ls = leaves(conclusions, c);
            ls.len() <= max_leaves && match_demands(rng, cat, &ls).is_some()
        })
        .collect()
}

/// Random conclusions admitting at least one slice.
pub fn random_conclusions<R: Rng>(rng: &mut R, cat: &Category, limits: &Limits) -> Vec<Formula> {
    loop {
        let k = rng.gen_range(1..=limits.max_conclusions);
        let fs: Vec<Formula> = (0..k).map(|_| random_formula(rng, cat, 2)).collect();
        if !feasible_combos(rng, cat, &fs, 6).is_empty() {
            return fs;
        }
    }
}

enum Gadget {
    /// Identity cut between trees for `X` and `X*` with the given components.
    Identity(Formula, usize, usize),
    Arrow(ArrowId),
    Units,
}

fn random_gadget<R: Rng>(rng: &mut R, cat: &Category) -> Gadget {
    match rng.gen_range(0..6) {
        0..=2 => {
            let x = random_formula(rng, cat, 2);
            let n = x.component_count();
            let i = rng.gen_range(0..n);
            let j = if rng.gen_bool(0.7) {
                i
            } else {
                rng.gen_range(0..n)
            };
            Gadget::Identity(x, i, j)
        }
        3 | 4 => Gadget::Arrow(ArrowId(rng.gen_range(0..cat.arrow_count() as u32))),
        _ => Gadget::Units,
    }
}

fn gadget_demands(g: &Gadget, cat: &Category) -> Word {
    match g {
        Gadget::Identity(x, i, j) => {
            let mut w = x.anf().components[*i].clone();
            w.extend(x.star().anf().components[*j].iter().copied());
            w
        }
        Gadget::Arrow(f) => vec![Literal::Atom(cat.dom(*f)), Literal::Dual(cat.cod(*f))],
        Gadget::Units => vec![],
    }
}

fn random_arrow<R: Rng>(rng: &mut R, cat: &Category, dom: ObjId, cod: ObjId) -> ArrowId {
    *cat.hom(dom, cod).choose(rng).expect("nonempty hom")
}

/// Axiom ports for one pair of demands, sometimes as a chain
/// `ax f1 , cut g , ax f2`.
fn axiom_ports<R: Rng>(
    rng: &mut R,
    cat: &Category,
    s: &mut Slice,
    a: ObjId,
    b: ObjId,
    chain: bool,
) -> (Port, Port) {
    if chain {
        let mids: Vec<(ObjId, ObjId)> = cat
            .objects()
            .flat_map(|c| cat.objects().map(move |d| (c, d)))
            .filter(|&(c, d)| has_hom(cat, a, c) && has_hom(cat, c, d) && has_hom(cat, d, b))
            .collect();
        if let Some(&(c, d)) = mids.choose(rng) {
            let f1 = random_arrow(rng, cat, a, c);
            let g = random_arrow(rng, cat, c, d);
            let f2 = random_arrow(rng, cat, d, b);
            let (p0, p1) = s.axiom(f1);
            let (q0, q1) = s.axiom(f2);
            let label = if cat.is_identity(g) {
                CutLabel::Identity
            } else {
                CutLabel::Arrow(g)
            };
            if rng.gen_bool(0.5) {
                s.cut(p1, q0, label);
            } else {
                s.cut(q0, p1, label);
            }
            return (p0, q1);
        }
    }
    s.axiom(random_arrow(rng, cat, a, b))
}

/// Build a slice with the given conclusions whose leaves are the component
/// choices in `combo`, plus the gadgets; `None` if over the link limit.
fn build_slice<R: Rng>(
    rng: &mut R,
    cat: &Category,
    conclusions: &[Formula],
    combo: &[usize],
    gadgets: &[Gadget],
    chain_p: f64,
    limits: &Limits,
) -> Option<Slice> {
    let mut demands = leaves(conclusions, combo);
    for g in gadgets {
        demands.extend(gadget_demands(g, cat));
    }
    let matching = match_demands(rng, cat, &demands)?;
    let mut s = Slice::new();
    let mut ports: Vec<Option<Port>> = vec![None; demands.len()];
    for (n, p) in matching {
        let chain = rng.gen_bool(chain_p);
        let (a, b) = axiom_ports(
            rng,
            cat,
            &mut s,
            demands[n].object(),
            demands[p].object(),
            chain,
        );
        ports[n] = Some(a);
        ports[p] = Some(b);
    }
    let mut it = ports.into_iter().map(|p| p.expect("matched"));
    let mut outs = Vec::new();
    for (f, &i) in conclusions.iter().zip(combo) {
        let mut ch = f.choices_for_component(i).into_iter();
        outs.push(build(&mut s, f, &mut ch, &mut it));
    }
    for g in gadgets {
        let (a, b, label) = match g {
            Gadget::Identity(x, i, j) => {
                let mut ci = x.choices_for_component(*i).into_iter();
                let a = build(&mut s, x, &mut ci, &mut it);
                let xs = x.star();
                let mut cj = xs.choices_for_component(*j).into_iter();
                let b = build(&mut s, &xs, &mut cj, &mut it);
                (a, b, CutLabel::Identity)
            }
            Gadget::Arrow(f) => {
                let a = it.next().expect("demand");
                let b = it.next().expect("demand");
                let label = if cat.is_identity(*f) {
                    CutLabel::Identity
                } else {
                    CutLabel::Arrow(*f)
                };
                (a, b, label)
            }
            Gadget::Units => (s.unit(), s.unit(), CutLabel::Identity),
        };
        if rng.gen_bool(0.5) {
            s.cut(a, b, label);
        } else {
            s.cut(b, a, label);
        }
    }
    s.set_conclusions(outs);
    (s.link_count() <= limits.max_links).then_some(s)
}

/// A random well-formed slice with the given conclusions.
pub fn random_slice<R: Rng>(
    rng: &mut R,
    cat: &Category,
    conclusions: &[Formula],
    limits: &Limits,
) -> Option<Slice> {
    let feasible = feasible_combos(rng, cat, conclusions, 8);
    if feasible.is_empty() {
        return None;
    }
    for attempt in 0..40 {
        let combo = feasible.choose(rng).expect("nonempty").clone();
        let count = if attempt < 30 {
            rng.gen_range(0..=limits.max_gadgets)
        } else {
            0
        };
        let gadgets: Vec<Gadget> = (0..count).map(|_| random_gadget(rng, cat)).collect();
        let chain_p = if attempt < 30 { 0.3 } else { 0.0 };
        if let Some(s) = build_slice(rng, cat, conclusions, &combo, &gadgets, chain_p, limits) {
            return Some(s);
        }
    }
    None
}

/// A random net with the given conclusions; occasionally empty.
pub fn random_net_over<R: Rng>(
    rng: &mut R,
    cat: &Category,
    conclusions: &[Formula],
    name: &str,
    limits: &Limits,
) -> Net {
    let k = if rng.gen_bool(0.05) {
        0
    } else {
        rng.gen_range(1..=limits.max_slices)
    };
    let slices: Vec<Slice> = (0..k)
        .filter_map(|_| random_slice(rng, cat, conclusions, limits))
        .collect();
    Net::new(name, conclusions.to_vec(), slices, cat).expect("generated nets are well-formed")
}

pub fn random_net<R: Rng>(rng: &mut R, cat: &Category, name: &str, limits: &Limits) -> Net {
    let conclusions = random_conclusions(rng, cat, limits);
    random_net_over(rng, cat, &conclusions, name, limits)
}

fn random_word<R: Rng>(rng: &mut R, cat: &Category, max: usize) -> Word {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_literal(rng, cat)).collect()
}

fn random_anf<R: Rng>(rng: &mut R, cat: &Category, max_components: usize, max_word: usize) -> Anf {
    let n = rng.gen_range(1..=max_components);
    Anf {
        components: (0..n).map(|_| random_word(rng, cat, max_word)).collect(),
    }
}

fn random_loops<R: Rng>(rng: &mut R, cat: &Category) -> Vec<CanonicalLoop> {
    let endos: Vec<CanonicalLoop> = cat.arrows().filter_map(|a| cat.endo_class(a)).collect();
    let n = [0, 0, 1, 2][rng.gen_range(0..4)];
    (0..n)
        .map(|_| *endos.choose(rng).expect("identities are endomorphisms"))
        .collect()
}

/// A random triple between two words, if their signed word can be paired.
pub fn random_triple<R: Rng>(
    rng: &mut R,
    cat: &Category,
    dom: &Word,
    cod: &Word,
) -> Option<KLTriple> {
    let mut signed = star_word(dom);
    signed.extend_from_slice(cod);
    let matching = match_demands(rng, cat, &signed)?;
    let pairs = matching
        .into_iter()
        .map(|(n, p)| {
            (
                n,
                p,
                random_arrow(rng, cat, signed[n].object(), signed[p].object()),
            )
        })
        .collect();
    let loops = random_loops(rng, cat);
    Some(
        KLTriple::new(dom.clone(), cod.clone(), pairs, loops, cat)
            .expect("generated triples are valid"),
    )
}

/// A random free arrow: at most 3 components on each side, words of at most
/// 4 literals, at most 3 triples per entry.
pub fn random_free_arrow<R: Rng>(rng: &mut R, cat: &Category) -> FreeArrow {
    loop {
        let dom = random_anf(rng, cat, 3, 2);
        let cod = random_anf(rng, cat, 3, 2);
        let mut entries = Vec::new();
        for (i, c) in cod.components.iter().enumerate() {
            for (j, d) in dom.components.iter().enumerate() {
                let k = rng.gen_range(0..=3);
                for _ in 0..k {
                    if let Some(t) = random_triple(rng, cat, d, c) {
                        entries.push(((i, j), t));
                    }
                }
            }
        }
        if !entries.is_empty() {
            return FreeArrow::from_entries(dom, cod, entries).expect("shapes match");
        }
    }
}

/// A random free arrow of a given type.
pub fn random_free_arrow_between<R: Rng>(
    rng: &mut R,
    cat: &Category,
    dom: &Anf,
    cod: &Anf,
) -> FreeArrow {
    let mut entries = Vec::new();
    for (i, c) in cod.components.iter().enumerate() {
        for (j, d) in dom.components.iter().enumerate() {
            for _ in 0..rng.gen_range(0..=2) {
                if let Some(t) = random_triple(rng, cat, d, c) {
                    entries.push(((i, j), t));
                }
            }
        }
    }
    FreeArrow::from_entries(dom.clone(), cod.clone(), entries).expect("shapes match")
}

/// A random ANF with short words, for law checks.
pub fn random_object<R: Rng>(rng: &mut R, cat: &Category) -> Anf {
    random_anf(rng, cat, 2, 2)
}
