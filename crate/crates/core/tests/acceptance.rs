//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every comparison is exact (no tolerance): scalars live in Q(i, sqrt 2)
//! and free arrows are compared structurally.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqlnet_core::atoms::{ArrowId, Category};
use cqlnet_core::fixtures;
use cqlnet_core::formula::Anf;
use cqlnet_core::freecat::{complete, denote, fa_equal, FreeArrow, KLTriple};
use cqlnet_core::model::{eval_free, eval_net, load_model, Interpretation, Matrix, Model, Scalar};
use cqlnet_core::net::{parse_net, Net};
use cqlnet_core::rewrite::{beta_equal, is_normal, normalize, normalize_with, Strategy};
use cqlnet_core::testing::{random_free_arrow, random_net, random_net_over, Limits};

/// Random nets per category in the shared corpus.
const NETS_PER_CATEGORY: usize = 100;
/// Random pairs for the faithfulness check.
const PAIRS: usize = 100;
/// Random free arrows for the completeness round trip.
const ARROWS: usize = 100;
/// Random strategies tried per net for confluence.
const RANDOM_STRATEGIES: u64 = 3;
const SEED: u64 = 0x5eed;

type Check = Result<String, String>;
type Criterion = (&'static str, fn(&Corpus) -> Check);

struct Fixture {
    name: &'static str,
    cat: Category,
    model: Interpretation<Scalar>,
}

fn fixture(name: &'static str, cat: Category, model: &str) -> Fixture {
    let model = match load_model(model, &cat).expect("shipped model") {
        Model::Exact(m) => m,
        Model::Bool(_) => panic!("shipped model {name} is not exact"),
    };
    Fixture { name, cat, model }
}

struct Corpus {
    fixtures: Vec<Fixture>,
    /// `(fixture index, net)`.
    nets: Vec<(usize, Net)>,
}

impl Corpus {
    fn build() -> Corpus {
        let fixtures = vec![
            fixture("c2", fixtures::c2(), fixtures::C2_MOD),
            fixture("pauli8", fixtures::pauli8(), fixtures::PAULI8_MOD),
        ];
        let limits = Limits::default();
        let mut nets = Vec::new();
        for (k, fx) in fixtures.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + k as u64);
            for i in 0..NETS_PER_CATEGORY {
                nets.push((k, random_net(&mut rng, &fx.cat, &format!("r{i}"), &limits)));
            }
        }
        Corpus { fixtures, nets }
    }

    fn iter(&self) -> impl Iterator<Item = (&Fixture, &Net)> {
        self.nets.iter().map(|(k, n)| (&self.fixtures[*k], n))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nf_net(n: &Net, cat: &Category) -> Result<Net, String> {
    Ok(normalize(n, cat)
        .map_err(|e| e.to_string())?
        .to_net(n.name()))
}

fn strong_normalization(c: &Corpus) -> Check {
    let limits = Limits::default();
    let mut steps = 0;
    let mut slices = 0;
    for (fx, n) in c.iter() {
        ensure(n.slices().len() <= limits.max_slices, || {
            format!("{}: too many slices", n.name())
        })?;
        let run = normalize_with(n, &fx.cat, Strategy::MinId).map_err(|e| e.to_string())?;
        for (i, r) in run.runs.iter().enumerate() {
            ensure(r.initial_links <= limits.max_links, || {
                format!("{} slice {i}: too many links", n.name())
            })?;
            ensure(r.steps <= r.initial_links, || {
                format!(
                    "{}/{} slice {i}: {} steps for {} links",
                    fx.name,
                    n.name(),
                    r.steps,
                    r.initial_links
                )
            })?;
            if let Some(s) = &r.result {
                ensure(is_normal(s), || {
                    format!("{}/{} slice {i}: not normal", fx.name, n.name())
                })?;
            }
            steps += r.steps;
            slices += 1;
        }
    }
    Ok(format!(
        "{} nets, {slices} slices, {steps} steps",
        c.nets.len()
    ))
}

fn fig1_critical_pair(cat: &Category) -> Result<(), String> {
    let n = parse_net(fixtures::FIG1_NET, cat).map_err(|e| e.to_string())?;
    let a = |s: &str| cat.arrow(s).expect("fixture arrow");
    // f ; Z ; h ; X ; m with f = X, h = Z, m = XZ.
    let expected = cat
        .compose_path(&[a("X"), a("Z"), a("Z"), a("X"), a("XZ")])
        .map_err(|e| e.to_string())?;
    let nf = normalize(&n, cat).map_err(|e| e.to_string())?;
    ensure(
        nf.slices.len() == 1 && nf.slices[0].pairs == vec![(0, 1, expected)],
        || "fig1 does not reduce to the associative composite".into(),
    )?;
    for seed in 0..16 {
        let other = normalize_with(&n, cat, Strategy::Random(seed)).map_err(|e| e.to_string())?;
        ensure(other.normal == nf, || {
            format!("fig1 diverges under seed {seed}")
        })?;
    }
    Ok(())
}

/// The two reduction orders of fig2 leave loops labelled X;Z and Z;X, which
/// differ as arrows and agree only as loop classes.
fn fig2_critical_pair(cat: &Category) -> Result<(), String> {
    let n = parse_net(fixtures::FIG2_NET, cat).map_err(|e| e.to_string())?;
    let mut labels: Vec<Vec<ArrowId>> = Vec::new();
    let mut normals = Vec::new();
    let strategies = std::iter::once(Strategy::MinId).chain((0..32).map(Strategy::Random));
    for st in strategies {
        let run = normalize_with(&n, cat, st).map_err(|e| e.to_string())?;
        let reduced = run.reduced_net("fig2", n.conclusions());
        let mut ls: Vec<ArrowId> = reduced.slices()[0]
            .links()
            .filter_map(|(_, l)| match l.kind {
                cqlnet_core::net::LinkKind::Axiom(f) => Some(f),
                _ => None,
            })
            .collect();
        ls.sort();
        if !labels.contains(&ls) {
            labels.push(ls);
        }
        normals.push(run.normal);
    }
    ensure(labels.len() >= 2, || {
        "fig2: only one reduction order observed".into()
    })?;
    ensure(labels.windows(2).all(|w| w[0] != w[1]), || {
        "fig2: raw labels coincide".into()
    })?;
    ensure(normals.windows(2).all(|w| w[0] == w[1]), || {
        "fig2: normal forms differ".into()
    })?;
    let class = |f| cat.endo_class(f);
    ensure(
        labels
            .iter()
            .all(|l| l.len() == 1 && class(l[0]) == class(labels[0][0])),
        || "fig2: loop classes differ".into(),
    )?;
    Ok(())
}

fn confluence(c: &Corpus) -> Check {
    for (fx, n) in c.iter() {
        let min = normalize_with(n, &fx.cat, Strategy::MinId)
            .map_err(|e| e.to_string())?
            .normal;
        for seed in 0..RANDOM_STRATEGIES {
            let r = normalize_with(n, &fx.cat, Strategy::Random(SEED + seed))
                .map_err(|e| e.to_string())?;
            ensure(r.normal == min, || {
                format!(
                    "{}/{}: strategies disagree (seed {seed})",
                    fx.name,
                    n.name()
                )
            })?;
        }
    }
    let pauli = &c.fixtures[1].cat;
    fig1_critical_pair(pauli)?;
    fig2_critical_pair(pauli)?;
    Ok(format!(
        "{} nets x {} strategies; fig1, fig2",
        c.nets.len(),
        RANDOM_STRATEGIES + 1
    ))
}

fn soundness(c: &Corpus) -> Check {
    for (fx, n) in c.iter() {
        let nf = nf_net(n, &fx.cat)?;
        ensure(
            eval_net(n, &fx.model, &fx.cat) == eval_net(&nf, &fx.model, &fx.cat),
            || {
                format!(
                    "{}/{}: evaluation changes under normalization",
                    fx.name,
                    n.name()
                )
            },
        )?;
        let d = denote(n, &fx.cat).map_err(|e| e.to_string())?;
        let dn = denote(&nf, &fx.cat).map_err(|e| e.to_string())?;
        ensure(
            fa_equal(&d, &dn, &fx.cat).map_err(|e| e.to_string())?,
            || {
                format!(
                    "{}/{}: denotation changes under normalization",
                    fx.name,
                    n.name()
                )
            },
        )?;
    }
    Ok(format!("{} nets", c.nets.len()))
}

/// A partner for `n1` with the same conclusions: an independent net, a
/// permuted normal form, or a perturbation.
fn partner(rng: &mut ChaCha8Rng, cat: &Category, n1: &Net, limits: &Limits) -> Net {
    let cs = n1.conclusions().to_vec();
    match rng.gen_range(0..4) {
        0 => random_net_over(rng, cat, &cs, "n2", limits),
        1 => {
            let mut slices = normalize(n1, cat)
                .expect("normalizes")
                .to_net("n2")
                .slices()
                .to_vec();
            slices.shuffle(rng);
            Net::new("n2", cs, slices, cat).expect("normal forms are nets")
        }
        2 => {
            let mut slices = n1.slices().to_vec();
            slices.reverse();
            Net::new("n2", cs, slices, cat).expect("same slices")
        }
        _ => {
            let mut slices = n1.slices().to_vec();
            if !slices.is_empty() && rng.gen_bool(0.5) {
                slices.remove(rng.gen_range(0..slices.len()));
            } else if let Some(s) = slices.choose(rng).cloned() {
                slices.push(s);
            } else {
                slices = random_net_over(rng, cat, &cs, "x", limits)
                    .slices()
                    .to_vec();
            }
            Net::new("n2", cs, slices, cat).expect("same conclusions")
        }
    }
}

fn faithfulness(c: &Corpus) -> Check {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let (mut equal, mut distinct) = (0, 0);
    for i in 0..PAIRS {
        let fx = &c.fixtures[i % c.fixtures.len()];
        let n1 = random_net(&mut rng, &fx.cat, "n1", &limits);
        let n2 = partner(&mut rng, &fx.cat, &n1, &limits);
        let beta = beta_equal(&n1, &n2, &fx.cat).map_err(|e| e.to_string())?;
        let d1 = denote(&n1, &fx.cat).map_err(|e| e.to_string())?;
        let d2 = denote(&n2, &fx.cat).map_err(|e| e.to_string())?;
        let den = fa_equal(&d1, &d2, &fx.cat).map_err(|e| e.to_string())?;
        ensure(beta == den, || {
            format!(
                "pair {i} over {}: beta_equal = {beta}, fa_equal = {den}\n{}\n{}",
                fx.name,
                n1.to_text(&fx.cat),
                n2.to_text(&fx.cat)
            )
        })?;
        if beta {
            equal += 1;
        } else {
            distinct += 1;
        }
    }
    ensure(equal > 0 && distinct > 0, || {
        format!("degenerate pairs: {equal} equal, {distinct} distinct")
    })?;
    Ok(format!("{PAIRS} pairs: {equal} equal, {distinct} distinct"))
}

fn completeness(c: &Corpus) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut slices = 0;
    for i in 0..ARROWS {
        let fx = &c.fixtures[i % c.fixtures.len()];
        let f = random_free_arrow(&mut rng, &fx.cat);
        ensure(f.dom().len() <= 3 && f.cod().len() <= 3, || {
            "too many components".into()
        })?;
        ensure(f.entries().values().all(|ts| ts.len() <= 3), || {
            "too many triples".into()
        })?;
        let n = complete(&f, "c", &fx.cat).map_err(|e| format!("arrow {i}: {e}"))?;
        slices += n.slices().len();
        let d = denote(&n, &fx.cat).map_err(|e| e.to_string())?;
        ensure(
            fa_equal(&d, &f.name(), &fx.cat).map_err(|e| e.to_string())?,
            || format!("arrow {i}: round trip differs\n{}", f.to_text(&fx.cat)),
        )?;
    }
    Ok(format!("{ARROWS} arrows, {slices} slices"))
}

fn eq(f: &FreeArrow, g: &FreeArrow, cat: &Category, what: &str) -> Result<(), String> {
    let same = fa_equal(f, g, cat).map_err(|e| format!("{what}: {e}"))?;
    ensure(same, || {
        format!("{what}:\n{}\n{}", f.to_text(cat), g.to_text(cat))
    })
}

fn compose(f: &FreeArrow, g: &FreeArrow, cat: &Category) -> Result<FreeArrow, String> {
    f.compose(g, cat).map_err(|e| e.to_string())
}

fn law_suite(c: &Corpus) -> Check {
    let mut checks = 0usize;
    let all = [
        ("c2", fixtures::c2()),
        ("pauli8", fixtures::pauli8()),
        ("split", fixtures::split()),
    ];
    for (name, cat) in &all {
        let gen = |f| FreeArrow::generator(f, cat);
        let id = |a: &Anf| FreeArrow::identity(a, cat);
        let objs: Vec<Anf> = cat
            .objects()
            .map(|o| Anf::word(vec![cqlnet_core::formula::Literal::Atom(o)]))
            .collect();
        // Triangle identities.
        for a in &objs {
            let l = compose(
                &id(a).tensor(&FreeArrow::eta(a, cat)),
                &FreeArrow::epsilon(a, cat).tensor(&id(a)),
                cat,
            )?;
            eq(&l, &id(a), cat, &format!("{name}: left triangle"))?;
            let s = a.star();
            let r = compose(
                &FreeArrow::eta(a, cat).tensor(&id(&s)),
                &id(&s).tensor(&FreeArrow::epsilon(a, cat)),
                cat,
            )?;
            eq(&r, &id(&s), cat, &format!("{name}: right triangle"))?;
            // Counit from unit: eps = eta-dagger after the symmetry.
            let e = compose(
                &FreeArrow::symmetry(a, &s, cat),
                &FreeArrow::eta(a, cat).dagger(cat),
                cat,
            )?;
            eq(
                &e,
                &FreeArrow::epsilon(a, cat),
                cat,
                &format!("{name}: eps = sigma ; eta-dagger"),
            )?;
            checks += 3;
        }
        let arrows: Vec<ArrowId> = cat.arrows().collect();
        for &f in &arrows {
            let (fa, fb) = (cat.dom(f), cat.cod(f));
            let obj = |o| Anf::word(vec![cqlnet_core::formula::Literal::Atom(o)]);
            let name_f = gen(f).name();
            for &g in arrows.iter().filter(|&&g| cat.dom(g) == fb) {
                let gf = cat.compose(f, g).map_err(|e| e.to_string())?;
                // (a) absorption.
                let lhs = compose(&name_f, &id(&obj(fa).star()).tensor(&gen(g)), cat)?;
                eq(&lhs, &gen(gf).name(), cat, &format!("{name}: absorption"))?;
                // (c) compositionality.
                let lhs = compose(
                    &id(&obj(fa)).tensor(&gen(g).name()),
                    &gen(f).coname().tensor(&id(&obj(cat.cod(g)))),
                    cat,
                )?;
                eq(&lhs, &gen(gf), cat, &format!("{name}: compositionality"))?;
                // (d) compositional cut.
                for &h in arrows.iter().filter(|&&h| cat.dom(h) == cat.cod(g)) {
                    let hgf = cat.compose_path(&[f, g, h]).map_err(|e| e.to_string())?;
                    let cut = id(&obj(fa).star())
                        .tensor(&gen(g).coname())
                        .tensor(&id(&obj(cat.cod(h))));
                    let lhs = compose(&name_f.tensor(&gen(h).name()), &cut, cat)?;
                    eq(
                        &lhs,
                        &gen(hgf).name(),
                        cat,
                        &format!("{name}: compositional cut"),
                    )?;
                    checks += 1;
                }
                checks += 2;
            }
            // (b) backward absorption.
            for &k in arrows.iter().filter(|&&k| cat.cod(k) == fa) {
                let fk = cat.compose(k, f).map_err(|e| e.to_string())?;
                let lhs = compose(&name_f, &gen(k).dual().tensor(&id(&obj(fb))), cat)?;
                eq(
                    &lhs,
                    &gen(fk).name(),
                    cat,
                    &format!("{name}: backward absorption"),
                )?;
                checks += 1;
            }
        }
        // Biproduct injections and projections.
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
        for _ in 0..10 {
            let parts: Vec<Anf> = (0..rng.gen_range(1..=3))
                .map(|_| cqlnet_core::testing::random_object(&mut rng, cat))
                .collect();
            let sum = parts.iter().fold(Anf::zero(), |acc, p| acc.sum(p));
            let mut total = FreeArrow::zero(sum.clone(), sum.clone());
            for i in 0..parts.len() {
                let p = FreeArrow::projection(&parts, i, cat);
                let q = FreeArrow::injection(&parts, i, cat);
                for j in 0..parts.len() {
                    let pq = compose(&FreeArrow::injection(&parts, j, cat), &p, cat)?;
                    let want = if i == j {
                        id(&parts[i])
                    } else {
                        FreeArrow::zero(parts[j].clone(), parts[i].clone())
                    };
                    eq(&pq, &want, cat, &format!("{name}: p{i} q{j}"))?;
                    checks += 1;
                }
                total = total
                    .add(&compose(&p, &q, cat)?, cat)
                    .map_err(|e| e.to_string())?;
            }
            eq(&total, &id(&sum), cat, &format!("{name}: sum of q p"))?;
            checks += 1;
        }
        // Bilinearity and zero.
        for _ in 0..20 {
            let x = cqlnet_core::testing::random_object(&mut rng, cat);
            let y = cqlnet_core::testing::random_object(&mut rng, cat);
            let z = cqlnet_core::testing::random_object(&mut rng, cat);
            let r = |rng: &mut ChaCha8Rng, a: &Anf, b: &Anf| {
                cqlnet_core::testing::random_free_arrow_between(rng, cat, a, b)
            };
            let (f1, f2) = (r(&mut rng, &x, &y), r(&mut rng, &x, &y));
            let (g1, g2) = (r(&mut rng, &y, &z), r(&mut rng, &y, &z));
            let add = |a: &FreeArrow, b: &FreeArrow| a.add(b, cat).map_err(|e| e.to_string());
            let lhs = compose(&add(&f1, &f2)?, &g1, cat)?;
            let rhs = add(&compose(&f1, &g1, cat)?, &compose(&f2, &g1, cat)?)?;
            eq(&lhs, &rhs, cat, &format!("{name}: left distributivity"))?;
            let lhs = compose(&f1, &add(&g1, &g2)?, cat)?;
            let rhs = add(&compose(&f1, &g1, cat)?, &compose(&f1, &g2, cat)?)?;
            eq(&lhs, &rhs, cat, &format!("{name}: right distributivity"))?;
            let zero = compose(&f1, &FreeArrow::zero(y.clone(), z.clone()), cat)?;
            eq(
                &zero,
                &FreeArrow::zero(x.clone(), z.clone()),
                cat,
                &format!("{name}: zero"),
            )?;
            checks += 3;
        }
        // KL-triple dagger involution on generated triples.
        for _ in 0..50 {
            let f = random_free_arrow(&mut rng, cat);
            for t in f.entries().values().flatten() {
                let back: KLTriple = t.dagger(cat).dagger(cat);
                ensure(&back == t, || {
                    format!("{name}: triple dagger is not an involution")
                })?;
                ensure(&t.dual().dual() == t, || {
                    format!("{name}: triple dual is not an involution")
                })?;
                checks += 2;
            }
            eq(
                &f.dagger(cat).dagger(cat),
                &f,
                cat,
                &format!("{name}: arrow dagger involution"),
            )?;
            // Matrix dagger: entry (j, i) of the dagger is the dagger of entry (i, j).
            let d = f.dagger(cat);
            for (&(i, j), ts) in f.entries() {
                let mut want: Vec<KLTriple> = ts.iter().map(|t| t.dagger(cat)).collect();
                want.sort();
                ensure(d.entry(j, i) == want.as_slice(), || {
                    format!("{name}: dagger is not the transpose")
                })?;
                checks += 1;
            }
        }
    }
    // Matrix-level dagger law through the exact models.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    for fx in &c.fixtures {
        for _ in 0..30 {
            let f = random_free_arrow(&mut rng, &fx.cat);
            let lhs: Matrix<Scalar> = eval_free(&f.dagger(&fx.cat), &fx.model);
            ensure(lhs == eval_free(&f, &fx.model).conj_transpose(), || {
                format!("{}: eval of dagger is not the conjugate transpose", fx.name)
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} equations"))
}

fn entanglement_swapping(c: &Corpus) -> Check {
    let fx = &c.fixtures[1];
    let cat = &fx.cat;
    let n = parse_net(fixtures::SWAP_NET, cat).map_err(|e| e.to_string())?;
    ensure(n.slices().len() == 4, || {
        "swap net must have four slices".into()
    })?;
    let nf = normalize(&n, cat).map_err(|e| e.to_string())?;
    ensure(nf.slices.len() == 4, || {
        format!("{} normal slices", nf.slices.len())
    })?;
    let mut labels: Vec<ArrowId> = Vec::new();
    let mut tags = Vec::new();
    for s in &nf.slices {
        ensure(s.loops.is_empty() && s.pairs.len() == 1, || {
            "normal slice is not a Bell slice".into()
        })?;
        let (neg, pos, f) = s.pairs[0];
        ensure((neg, pos) == (0, 1), || {
            "Bell slice pairs the wrong leaves".into()
        })?;
        labels.push(f);
        tags.push(s.choices.clone());
    }
    labels.sort();
    let q = cat.object("Q").ok_or("missing object Q")?;
    let mut want: Vec<ArrowId> = ["X", "Z", "XZ"]
        .iter()
        .map(|a| cat.arrow(a).ok_or(format!("missing arrow {a}")))
        .collect::<Result<_, _>>()?;
    want.push(cat.identity(q));
    want.sort();
    ensure(labels == want, || {
        "labels are not the four real Pauli representatives".into()
    })?;
    tags.sort();
    tags.dedup();
    ensure(tags.len() == 4, || "plus-tags are not distinct".into())?;

    // The X outcome alone, and as the second block of the full net.
    let x = [0, 1, 1, 0].map(Scalar::int).to_vec();
    let single = parse_net(fixtures::SWAP_X_NET, cat).map_err(|e| e.to_string())?;
    let v = eval_net(&nf_net(&single, cat)?, &fx.model, cat);
    ensure(v.data() == x.as_slice(), || {
        format!("swap_x evaluates to {v}")
    })?;
    let xs = cat.arrow("X").expect("X");
    let xslice = nf
        .slices
        .iter()
        .find(|s| s.pairs[0].2 == xs)
        .expect("X slice");
    let one = Net::new("x", nf.conclusions.clone(), vec![xslice.to_slice()], cat)
        .map_err(|e| e.to_string())?;
    let v = eval_net(&one, &fx.model, cat);
    ensure(v.rows() == 16 && v.cols() == 1, || {
        "gearstick vector has the wrong shape".into()
    })?;
    let nonzero: Vec<usize> = (0..4)
        .filter(|b| (0..4).any(|k| *v.get(4 * b + k, 0) != Scalar::int(0)))
        .collect();
    ensure(nonzero.len() == 1, || format!("X slice evaluates to {v}"))?;
    let b = nonzero[0];
    let block: Vec<Scalar> = (0..4).map(|k| v.get(4 * b + k, 0).clone()).collect();
    ensure(block == x, || format!("X slice block is {v}"))?;
    Ok(format!("4 Bell slices, X block {b} = [0, 1, 1, 0]"))
}

fn eta_ambiguity(c: &Corpus) -> Check {
    let cat = &c.fixtures[0].cat;
    let a = parse_net(fixtures::ETA_AXIOM_NET, cat).map_err(|e| e.to_string())?;
    let b = parse_net(fixtures::ETA_TIMES_NET, cat).map_err(|e| e.to_string())?;
    let (a, b) = (a.renamed("eta"), b.renamed("eta"));
    ensure(a != b, || "the two nets are equal as values".into())?;
    let (da, db) = (
        denote(&a, cat).map_err(|e| e.to_string())?,
        denote(&b, cat).map_err(|e| e.to_string())?,
    );
    let eta = FreeArrow::eta(
        &Anf::word(vec![cqlnet_core::formula::Literal::Atom(
            cat.objects().next().expect("Q"),
        )]),
        cat,
    );
    ensure(fa_equal(&da, &db, cat).map_err(|e| e.to_string())?, || {
        "denotations differ".into()
    })?;
    ensure(fa_equal(&da, &eta, cat).map_err(|e| e.to_string())?, || {
        "denotation is not eta".into()
    })?;
    Ok("both denote eta_Q".into())
}

fn oracle_independence(c: &Corpus) -> Check {
    let mut count = 0;
    let shipped = [
        fixtures::BELL_ID_NET,
        fixtures::BELL_X_NET,
        fixtures::BELL_ID_REDUCT_NET,
        fixtures::SWAP_X_NET,
        fixtures::SWAP_NET,
        fixtures::FIG1_NET,
        fixtures::FIG2_NET,
        fixtures::ETA_AXIOM_NET,
        fixtures::ETA_TIMES_NET,
        fixtures::PLUS_MISMATCH_NET,
        fixtures::PLUS_MATCH_NET,
    ];
    let mut extra = Vec::new();
    for text in shipped {
        for (k, fx) in c.fixtures.iter().enumerate() {
            if let Ok(n) = parse_net(text, &fx.cat) {
                extra.push((k, n));
            }
        }
    }
    for (k, n) in c.nets.iter().chain(extra.iter()) {
        let fx = &c.fixtures[*k];
        for m in [n.clone(), nf_net(n, &fx.cat)?] {
            let d = denote(&m, &fx.cat).map_err(|e| e.to_string())?;
            let direct = eval_net(&m, &fx.model, &fx.cat);
            let via = eval_free(&d, &fx.model);
            ensure(direct == via, || {
                format!("{}/{}: {direct} vs {via}", fx.name, m.name())
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} nets ({} shipped)", extra.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus = Corpus::build();
    let criteria: [Criterion; 9] = [
        ("strong normalization", strong_normalization),
        ("confluence", confluence),
        ("soundness", soundness),
        ("faithfulness", faithfulness),
        ("full completeness round trip", completeness),
        ("categorical law suite", law_suite),
        ("entanglement swapping", entanglement_swapping),
        ("eta ambiguity", eta_ambiguity),
        ("oracle independence", oracle_independence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&corpus)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
