use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::band::{
    extend_value, first, identity_one_holds, identity_two_holds, tuples_with_support, Band,
    Cocycle2, Level, Section,
};
use crate::budget::{product, Budget, Counter};
use crate::error::{Error, Result};
use crate::groups::Homomorphism;
use crate::space::{bits, mask_of, Mask};
use crate::torsors::odometer;

/// Sorted indices of a pair or triple.
fn ends<const K: usize>(mask: Mask) -> [usize; K] {
    let mut out = [0; K];
    for (i, x) in bits(mask).enumerate() {
        out[i] = x;
    }
    out
}

/// `k_αβ λ_αβ(k_βγ) g_αβγ k_αγ⁻¹` over every sorted triple.
pub(crate) fn gauge_values(band: &Band, g: &[Section], k: &[Section]) -> Vec<Section> {
    let pairs = Level::new(band.nerve(), 2);
    band.nerve()
        .simplices(3)
        .iter()
        .zip(g)
        .map(|(&t, v)| gauge_at(band, &pairs, t, v, k))
        .collect()
}

fn gauge_at(band: &Band, pairs: &Level, t: Mask, v: &[usize], k: &[Section]) -> Section {
    let [a, b, c] = ends::<3>(t);
    let at = |x: usize, y: usize| {
        let m = mask_of(&[x, y]);
        band.restrict(m, t, &k[pairs.pos[&m]])
    };
    let kbc = band.apply_lambda(a, b, t, &at(b, c));
    let left = band.mul(a, &band.mul(a, &at(a, b), &kbc), v);
    band.mul(a, &left, &band.inv(a, &at(a, c)))
}

/// `μ_αβ = (k_αβ)_* λ_αβ`.
fn twisted_band(band: &Band, k: &[Section]) -> Result<Band> {
    let mut lambda = BTreeMap::new();
    for (&p, kp) in band.nerve().simplices(2).iter().zip(k) {
        let [a, b] = ends::<2>(p);
        let ka = band.group(a);
        let maps = band
            .lambda(a, b)
            .iter()
            .zip(kp)
            .map(|(m, &x)| {
                Homomorphism::new(
                    band.group(b),
                    ka,
                    m.map().iter().map(|&y| ka.conj(x, y)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        lambda.insert((a, b), maps);
    }
    Band::new(band.nerve(), band.groups().to_vec(), lambda)
}

fn check_pair_family(band: &Band, k: &[Section]) -> Result<()> {
    let pairs = band.nerve().simplices(2);
    if k.len() != pairs.len() {
        return Err(Error::InvalidCocycle(format!(
            "{} values for {} inhabited pairs",
            k.len(),
            pairs.len()
        )));
    }
    for (s, &p) in k.iter().zip(pairs) {
        band.check_section(first(p), p, s)?;
    }
    Ok(())
}

/// The cocycle `(μ, h)` obtained from `c` by `k`, with
/// `μ_αβ = (k_αβ)_* λ_αβ` and `h = k_αβ λ_αβ(k_βγ) g_αβγ k_αγ⁻¹`.
pub fn twist(c: &Cocycle2, k: &[Section]) -> Result<Cocycle2> {
    let band = c.band();
    check_pair_family(band, k)?;
    let mu = Arc::new(twisted_band(band, k)?);
    Cocycle2::new(mu, gauge_values(band, c.values(), k))
}

/// Exhaustive search for `k_αβ ∈ K_α(U_αβ)` with `μ = (k)_* λ` and
/// `h = k_αβ λ_αβ(k_βγ) g k_αγ⁻¹`. The first witness in lexicographic order
/// is returned.
pub fn cocycles2_equivalent(
    c: &Cocycle2,
    d: &Cocycle2,
    budget: &Budget,
) -> Result<Option<Vec<Section>>> {
    let (lam, mu) = (c.band(), d.band());
    if !lam.same_groups(mu) {
        return Err(Error::MismatchedCovers);
    }
    let nerve = lam.nerve();
    let pairs = Level::new(nerve, 2);
    // candidates per pair: (k)_* λ = μ on every component
    let mut candidates = Vec::with_capacity(pairs.masks.len());
    for &p in &pairs.masks {
        let [a, b] = ends::<2>(p);
        let ka = lam.group(a);
        let ok: Vec<Section> = lam
            .sections(a, p)
            .into_iter()
            .filter(|s| {
                s.iter().enumerate().all(|(comp, &x)| {
                    let (l, m) = (&lam.lambda(a, b)[comp], &mu.lambda(a, b)[comp]);
                    lam.group(b)
                        .elements()
                        .all(|y| ka.conj(x, l.apply(y)) == m.apply(y))
                })
            })
            .collect();
        if ok.is_empty() {
            return Ok(None);
        }
        candidates.push(ok);
    }
    // a triple is checked once its last pair (b, c) is chosen
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); pairs.masks.len()];
    for (i, &t) in nerve.simplices(3).iter().enumerate() {
        let [_, b, cc] = ends::<3>(t);
        due[pairs.pos[&mask_of(&[b, cc])]].push(i);
    }
    let mut counter = budget.counter("searching 2-cocycle equivalences");
    let mut k: Vec<Section> = Vec::with_capacity(pairs.masks.len());
    fn go(
        i: usize,
        c: &Cocycle2,
        d: &Cocycle2,
        pairs: &Level,
        candidates: &[Vec<Section>],
        due: &[Vec<usize>],
        k: &mut Vec<Section>,
        counter: &mut Counter,
    ) -> Result<bool> {
        if i == candidates.len() {
            return Ok(true);
        }
        let band = c.band();
        let triples = band.nerve().simplices(3);
        for s in &candidates[i] {
            counter.tick()?;
            k.push(s.clone());
            let ok = due[i]
                .iter()
                .all(|&j| gauge_at(band, pairs, triples[j], &c.values()[j], k) == d.values()[j]);
            if ok && go(i + 1, c, d, pairs, candidates, due, k, counter)? {
                return Ok(true);
            }
            k.pop();
        }
        Ok(false)
    }
    if go(0, c, d, &pairs, &candidates, &due, &mut k, &mut counter)? {
        Ok(Some(k))
    } else {
        Ok(None)
    }
}

/// Search plan for 2-cocycles with fixed `λ`: candidate values per triple
/// (those satisfying identity (i) at all six orders) and the ordered
/// quadruples to check once the last triple of their support is chosen.
struct Plan {
    triples: Level,
    candidates: Vec<Vec<Section>>,
    due: Vec<Vec<[usize; 4]>>,
}

fn plan(band: &Band, budget: &Budget) -> Result<Plan> {
    let nerve = band.nerve();
    let triples = Level::new(nerve, 3);
    let mut candidates = Vec::with_capacity(triples.masks.len());
    for &t in &triples.masks {
        let a = first(t);
        budget.check(
            "enumerating values of a 2-cochain",
            product(vec![band.group(a).order(); band.components(t)]),
        )?;
        let orders = tuples_with_support::<3>(t);
        let ok: Vec<Section> = band
            .sections(a, t)
            .into_iter()
            .filter(|v| {
                orders
                    .iter()
                    .all(|&o| identity_one_holds(band, o, &extend_value(band, v, o)))
            })
            .collect();
        candidates.push(ok);
    }
    let mut due: Vec<Vec<[usize; 4]>> = vec![Vec::new(); triples.masks.len()];
    for size in 3..=4 {
        for &s in nerve.simplices(size) {
            let last = bits(s)
                .map(|x| s & !(1u64 << x))
                .chain(core::iter::once(s))
                .filter_map(|m| triples.pos.get(&m).copied())
                .max()
                .expect("a simplex with three or more indices contains a triple");
            due[last].extend(tuples_with_support::<4>(s));
        }
    }
    Ok(Plan {
        triples,
        candidates,
        due,
    })
}

fn lookup_in<'a>(
    band: &'a Band,
    triples: &'a Level,
    g: &'a [Section],
) -> impl Fn([usize; 3]) -> Section + 'a {
    move |t: [usize; 3]| {
        let m = mask_of(&t);
        match triples.pos.get(&m) {
            Some(&i) if m.count_ones() == 3 => extend_value(band, &g[i], t),
            _ => band.unit(t[0], m),
        }
    }
}

/// Number of independent branches of the cocycle search: the candidates
/// for the first triple.
pub fn cocycles2_branches(band: &Band, budget: &Budget) -> Result<usize> {
    let p = plan(band, budget)?;
    Ok(p.candidates.first().map_or(1, Vec::len))
}

/// Cocycle values in one branch, ascending.
pub fn cocycles2_in_branch(
    band: &Band,
    branch: usize,
    budget: &Budget,
) -> Result<Vec<Vec<Section>>> {
    let p = plan(band, budget)?;
    let mut out = Vec::new();
    if p.candidates.is_empty() {
        if branch == 0 {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    if branch >= p.candidates[0].len() {
        return Ok(out);
    }
    let mut counter = budget.counter("enumerating 2-cocycles");
    let mut g: Vec<Section> = vec![Vec::new(); p.triples.masks.len()];
    fn go(
        i: usize,
        band: &Band,
        p: &Plan,
        g: &mut Vec<Section>,
        out: &mut Vec<Vec<Section>>,
        counter: &mut Counter,
        branch: usize,
    ) -> Result<()> {
        if i == g.len() {
            out.push(g.clone());
            return Ok(());
        }
        let range = if i == 0 {
            branch..branch + 1
        } else {
            0..p.candidates[i].len()
        };
        for j in range {
            counter.tick()?;
            g[i] = p.candidates[i][j].clone();
            let ok = {
                let lookup = lookup_in(band, &p.triples, &g[..]);
                p.due[i]
                    .iter()
                    .all(|&q| identity_two_holds(band, q, &lookup))
            };
            if ok {
                go(i + 1, band, p, g, out, counter, branch)?;
            }
        }
        Ok(())
    }
    go(0, band, &p, &mut g, &mut out, &mut counter, branch)?;
    Ok(out)
}

/// All 2-cocycles for the fixed `λ` of `band`, ascending.
pub fn enumerate_cocycles2(band: &Band, budget: &Budget) -> Result<Vec<Vec<Section>>> {
    let mut out = Vec::new();
    for b in 0..cocycles2_branches(band, budget)? {
        out.extend(cocycles2_in_branch(band, b, budget)?);
    }
    Ok(out)
}

/// One class: its least member and how many cocycles with the fixed `λ`
/// it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class2 {
    pub representative: Cocycle2,
    pub size: usize,
}

/// `Ȟ²(𝒰, K)` for a band presentation.
///
/// An equivalence from `(λ, g)` to a cocycle with the same `λ` has central
/// `k`, and every `(k)_* λ` presentation carries a copy of the fixed-`λ`
/// cocycles, so classes are orbits of central gauges on the fixed-`λ`
/// cocycles. `presentations` counts the distinct `(k)_* λ` reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2 {
    pub cocycles: usize,
    pub presentations: u128,
    pub classes: Vec<Class2>,
}

pub fn classify_cocycles2(
    band: &Arc<Band>,
    cocycles: &[Vec<Section>],
    budget: &Budget,
) -> Result<H2> {
    let nerve = band.nerve();
    let pairs = nerve.simplices(2);
    let central: Vec<Vec<Section>> = pairs
        .iter()
        .map(|&p| band.central_sections(first(p), p))
        .collect();
    let radix: Vec<usize> = central.iter().map(Vec::len).collect();
    budget.check(
        "enumerating central gauges",
        product(radix.iter().copied()).saturating_mul(cocycles.len() as u128),
    )?;
    let mut seen = vec![false; cocycles.len()];
    let mut classes = Vec::new();
    for i in 0..cocycles.len() {
        if seen[i] {
            continue;
        }
        let mut size = 0;
        let mut digits = vec![0; radix.len()];
        loop {
            let k: Vec<Section> = digits
                .iter()
                .enumerate()
                .map(|(p, &d)| central[p][d].clone())
                .collect();
            let h = gauge_values(band, &cocycles[i], &k);
            let j = cocycles
                .binary_search(&h)
                .map_err(|_| Error::Internal("central gauge leaves the cocycle set".into()))?;
            if !seen[j] {
                seen[j] = true;
                size += 1;
            }
            if !odometer(&mut digits, &radix) {
                break;
            }
        }
        classes.push(Class2 {
            representative: Cocycle2::new(band.clone(), cocycles[i].clone())?,
            size,
        });
    }
    let presentations = pairs.iter().fold(1u128, |acc, &p| {
        let ka = band.group(first(p));
        let z = ka.elements().filter(|&x| ka.is_central(x)).count();
        let inner = (ka.order() / z) as u128;
        (0..band.components(p)).fold(acc, |a, _| a.saturating_mul(inner))
    });
    Ok(H2 {
        cocycles: cocycles.len(),
        presentations,
        classes,
    })
}

pub fn h2(band: &Arc<Band>, budget: &Budget) -> Result<H2> {
    let cocycles = enumerate_cocycles2(band, budget)?;
    classify_cocycles2(band, &cocycles, budget)
}

/// The class of `c` among `classes`, with a witness.
pub fn find_class(c: &Cocycle2, h: &H2, budget: &Budget) -> Result<Option<(usize, Vec<Section>)>> {
    for (i, class) in h.classes.iter().enumerate() {
        if let Some(k) = cocycles2_equivalent(c, &class.representative, budget)? {
            return Ok(Some((i, k)));
        }
    }
    Ok(None)
}

/// `m_αβ λ_αβ(m_βγ) g_αβγ m_αγ⁻¹` for central `m`, keeping `λ`.
pub fn central_twist(c: &Cocycle2, m: &[Section]) -> Result<Cocycle2> {
    let band = c.band();
    check_pair_family(band, m)?;
    for (&p, s) in band.nerve().simplices(2).iter().zip(m) {
        if !band.is_central(first(p), s) {
            return Err(Error::NonCentral(format!(
                "m over {} is not central",
                band.nerve().format_simplex(p)
            )));
        }
    }
    Cocycle2::new(band.clone(), gauge_values(band, c.values(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::space::AbstractNerve;

    #[test]
    fn tetrahedron_z2_has_two_classes() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::cyclic(2)).unwrap());
        let h = h2(&band, &Budget::default()).unwrap();
        assert_eq!(h.cocycles, 16);
        assert_eq!(h.classes.len(), 2);
        assert_eq!(h.classes.iter().map(|c| c.size).sum::<usize>(), 16);
    }

    #[test]
    fn tetrahedron_s3_has_one_class() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::symmetric(3)).unwrap());
        let h = h2(&band, &Budget::default()).unwrap();
        assert_eq!(h.cocycles, 1);
        assert_eq!(h.classes.len(), 1);
        assert_eq!(h.presentations, 6u128.pow(6));
    }

    #[test]
    fn twist_is_found_again() {
        let nerve = AbstractNerve::tetrahedron();
        let s3 = FiniteGroup::symmetric(3);
        let band = Arc::new(Band::constant(&nerve, &s3).unwrap());
        let c = Cocycle2::unit(band);
        let k: Vec<Section> = (0..6).map(|i| vec![i % 6]).collect();
        let d = twist(&c, &k).unwrap();
        assert!(super::super::band::check_cocycle2(&d).holds());
        let w = cocycles2_equivalent(&c, &d, &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(twist(&c, &w).unwrap(), d);
    }
}
