use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::band::{check_cocycle2, first, Band, Cocycle2};
use crate::budget::{Budget, Counter};
use crate::error::{Check, Error, Result};
use crate::groupoid::{Arrow, Functor, Groupoid};
use crate::groups::{FiniteGroup, Homomorphism, Subgroup};
use crate::sheaves::EtaleSpace;
use crate::space::{bits, nerve, Cover};

/// A finite groupoid extension `L → G → M ×_X M` over a surjective étale
/// map `M → X`, stalk by stalk. The stalk at `x` has the fiber `M_x` as
/// objects (in ascending order), and `j_m` identifies `L` with the vertex
/// group at `m`.
#[derive(Clone, Debug)]
pub struct GroupoidExtension {
    etale: EtaleSpace,
    kernel: FiniteGroup,
    fibers: Vec<Vec<usize>>,
    stalks: Vec<Groupoid>,
    /// Stalk maps for `x < y`, lying over `m ↦ lift(m, y)`.
    restrictions: BTreeMap<(usize, usize), Functor>,
    /// `j_m: L → Aut(m)` for every point `m` of `M`.
    j: Vec<Homomorphism>,
    /// For action groupoids, the arrow `m → γ·m` of each `(m, γ)`.
    acting: Option<Vec<Vec<Arrow>>>,
}

fn strictly_above(space: &crate::space::FinitePoset, x: usize) -> impl Iterator<Item = usize> {
    bits(space.up_set(x)).filter(move |&y| y != x)
}

impl GroupoidExtension {
    pub fn new(
        etale: EtaleSpace,
        kernel: FiniteGroup,
        stalks: Vec<Groupoid>,
        restrictions: BTreeMap<(usize, usize), Functor>,
        j: Vec<Homomorphism>,
    ) -> Result<Self> {
        let base = etale.base().clone();
        let total = etale.total();
        if stalks.len() != base.len() || j.len() != total.len() {
            return Err(Error::InvalidExtension(String::from(
                "one stalk per point and one j per point of M",
            )));
        }
        let fibers: Vec<Vec<usize>> = (0..base.len()).map(|x| etale.fiber(x)).collect();
        let index = |m: usize| {
            fibers[etale.project(m)]
                .iter()
                .position(|&e| e == m)
                .unwrap()
        };
        for x in 0..base.len() {
            let g = &stalks[x];
            if fibers[x].is_empty() {
                return Err(Error::InvalidExtension(format!(
                    "M has no point over {}",
                    base.label(x)
                )));
            }
            if g.object_count() != fibers[x].len() {
                return Err(Error::InvalidExtension(format!(
                    "stalk at {} has {} objects for a fiber of {}",
                    base.label(x),
                    g.object_count(),
                    fibers[x].len()
                )));
            }
            if g.components().len() != 1 {
                return Err(Error::InvalidExtension(format!(
                    "(s,t) is not onto M ×_X M over {}",
                    base.label(x)
                )));
            }
            for (i, &m) in fibers[x].iter().enumerate() {
                j[m].validate(&kernel, g.vertex_group(i))?;
                if !j[m].is_bijective() {
                    return Err(Error::InvalidExtension(format!(
                        "j does not identify L with the vertex group at {}",
                        total.label(m)
                    )));
                }
            }
        }
        for x in 0..base.len() {
            for y in strictly_above(&base, x) {
                let r = restrictions.get(&(x, y)).ok_or_else(|| {
                    Error::MissingData(format!(
                        "stalk map from {} to {}",
                        base.label(x),
                        base.label(y)
                    ))
                })?;
                r.validate(&stalks[x], &stalks[y])?;
                for (i, &m) in fibers[x].iter().enumerate() {
                    let m2 = etale.lift(m, y);
                    if r.object(i) != index(m2) {
                        return Err(Error::InvalidExtension(format!(
                            "stalk map {}→{} does not lie over M at {}",
                            base.label(x),
                            base.label(y),
                            total.label(m)
                        )));
                    }
                    for l in kernel.elements() {
                        let a = Arrow {
                            source: i,
                            target: i,
                            element: j[m].apply(l),
                        };
                        let b = r.apply(&stalks[x], &stalks[y], &a);
                        if b.element != j[m2].apply(l) {
                            return Err(Error::InvalidExtension(format!(
                                "j is not compatible with the stalk map at {}",
                                total.label(m)
                            )));
                        }
                    }
                }
                for z in strictly_above(&base, y) {
                    let rz = &restrictions[&(x, z)];
                    let ryz = &restrictions[&(y, z)];
                    let strict = (0..fibers[x].len()).all(|s| {
                        (0..fibers[x].len()).all(|t| {
                            stalks[x].hom(s, t).iter().all(|a| {
                                let via = ryz.apply(
                                    &stalks[y],
                                    &stalks[z],
                                    &r.apply(&stalks[x], &stalks[y], a),
                                );
                                via == rz.apply(&stalks[x], &stalks[z], a)
                            })
                        })
                    });
                    if !strict {
                        return Err(Error::InvalidExtension(format!(
                            "stalk maps do not compose over {} ≤ {} ≤ {}",
                            base.label(x),
                            base.label(y),
                            base.label(z)
                        )));
                    }
                }
            }
        }
        Ok(GroupoidExtension {
            etale,
            kernel,
            fibers,
            stalks,
            restrictions,
            j,
            acting: None,
        })
    }

    /// `G = L × (M ×_X M)`, with `j_m(l) = (m, m, l)`.
    pub fn product(etale: EtaleSpace, kernel: &FiniteGroup) -> Result<Self> {
        let base = etale.base().clone();
        let fibers: Vec<Vec<usize>> = (0..base.len()).map(|x| etale.fiber(x)).collect();
        let stalks = fibers
            .iter()
            .map(|f| {
                let labels: Vec<String> = f
                    .iter()
                    .map(|&m| String::from(etale.total().label(m)))
                    .collect();
                Groupoid::new(
                    labels,
                    alloc::vec![((0..f.len()).collect(), kernel.clone())],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut restrictions = BTreeMap::new();
        for x in 0..base.len() {
            for y in strictly_above(&base, x) {
                let f = Functor::from_arrow_map(&stalks[x], &stalks[y], |a| {
                    let pos = |i: usize| {
                        let m = etale.lift(fibers[x][i], y);
                        fibers[y].iter().position(|&e| e == m).unwrap()
                    };
                    Ok(Arrow {
                        source: pos(a.source),
                        target: pos(a.target),
                        element: a.element,
                    })
                })?;
                restrictions.insert((x, y), f);
            }
        }
        let j = (0..etale.total().len())
            .map(|_| Homomorphism::identity(kernel))
            .collect();
        GroupoidExtension::new(etale, kernel.clone(), stalks, restrictions, j)
    }

    /// The action groupoid of `group` acting on `M` over `X` through
    /// `action` (one permutation of the points of `M` per element). An arrow
    /// `m → γ·m` is `γ`; the stabilizer of every point must be exactly the
    /// subgroup `kernel`.
    pub fn from_action(
        etale: EtaleSpace,
        group: &FiniteGroup,
        kernel: &Subgroup,
        action: &[Vec<usize>],
    ) -> Result<Self> {
        let base = etale.base().clone();
        let total = etale.total().clone();
        if action.len() != group.order() || action.iter().any(|p| p.len() != total.len()) {
            return Err(Error::InvalidExtension(String::from(
                "one permutation of M per group element",
            )));
        }
        for a in group.elements() {
            for b in group.elements() {
                let ab = group.mul(a, b);
                if (0..total.len()).any(|m| action[ab][m] != action[a][action[b][m]]) {
                    return Err(Error::InvalidExtension(String::from(
                        "the action is not a homomorphism",
                    )));
                }
            }
            for m in 0..total.len() {
                let am = action[a][m];
                if etale.project(am) != etale.project(m) {
                    return Err(Error::InvalidExtension(format!(
                        "the action moves {} off its fiber",
                        total.label(m)
                    )));
                }
                for y in strictly_above(&base, etale.project(m)) {
                    if action[a][etale.lift(m, y)] != etale.lift(am, y) {
                        return Err(Error::InvalidExtension(format!(
                            "the action is not continuous at {}",
                            total.label(m)
                        )));
                    }
                }
            }
        }
        let in_kernel: Vec<bool> = {
            let mut v = alloc::vec![false; group.order()];
            for &e in kernel.embedding.map() {
                v[e] = true;
            }
            v
        };
        for m in 0..total.len() {
            if let Some(a) = group
                .elements()
                .find(|&a| (action[a][m] == m) != in_kernel[a])
            {
                return Err(Error::InvalidExtension(format!(
                    "stabilizer of {} differs from L at {}",
                    total.label(m),
                    group.label(a)
                )));
            }
        }
        let fibers: Vec<Vec<usize>> = (0..base.len()).map(|x| etale.fiber(x)).collect();
        let mut stalks = Vec::new();
        let mut decode = Vec::new();
        let mut encode = Vec::new();
        let mut j = alloc::vec![Homomorphism::identity(&kernel.group); total.len()];
        for fiber in &fibers {
            let pos = |m: usize| fiber.iter().position(|&e| e == m).unwrap();
            let mut raw = Vec::new();
            let mut ends = Vec::new();
            for (i, &m) in fiber.iter().enumerate() {
                for a in group.elements() {
                    raw.push((i, a));
                    ends.push((i, pos(action[a][m])));
                }
            }
            let n = group.order();
            let identity: Vec<usize> = (0..fiber.len()).map(|i| i * n + group.unit()).collect();
            let compose = |gi: usize, fi: usize| {
                let (i, a) = raw[fi];
                let (_, b) = raw[gi];
                i * n + group.mul(b, a)
            };
            let labels: Vec<String> = fiber
                .iter()
                .map(|&m| String::from(total.label(m)))
                .collect();
            let (g, normal) = Groupoid::from_arrows(labels, &ends, &identity, compose)?;
            for (i, &m) in fiber.iter().enumerate() {
                let map = kernel
                    .embedding
                    .map()
                    .iter()
                    .map(|&e| normal[i * n + e].element)
                    .collect();
                j[m] = Homomorphism::new(&kernel.group, g.vertex_group(i), map)?;
            }
            decode.push(
                normal
                    .iter()
                    .zip(&raw)
                    .map(|(a, &r)| (*a, r))
                    .collect::<BTreeMap<_, _>>(),
            );
            encode.push(normal);
            stalks.push(g);
        }
        let mut restrictions = BTreeMap::new();
        for x in 0..base.len() {
            for y in strictly_above(&base, x) {
                let f = Functor::from_arrow_map(&stalks[x], &stalks[y], |a| {
                    let (i, g) = decode[x][a];
                    let m = etale.lift(fibers[x][i], y);
                    let i2 = fibers[y].iter().position(|&e| e == m).unwrap();
                    Ok(encode[y][i2 * group.order() + g])
                })?;
                restrictions.insert((x, y), f);
            }
        }
        let acting = (0..total.len())
            .map(|m| {
                let x = etale.project(m);
                let i = fibers[x].iter().position(|&e| e == m).unwrap();
                (0..group.order()).map(|g| encode[x][i * group.order() + g]).collect()
            })
            .collect();
        let mut ext = GroupoidExtension::new(etale, kernel.group.clone(), stalks, restrictions, j)?;
        ext.acting = Some(acting);
        Ok(ext)
    }

    /// The arrow `m → γ·m` of an action groupoid.
    pub fn action_arrow(&self, m: usize, gamma: usize) -> Option<Arrow> {
        self.acting.as_ref().and_then(|a| a.get(m)?.get(gamma).copied())
    }

    pub fn etale(&self) -> &EtaleSpace {
        &self.etale
    }

    pub fn kernel(&self) -> &FiniteGroup {
        &self.kernel
    }

    pub fn stalk(&self, x: usize) -> &Groupoid {
        &self.stalks[x]
    }

    pub fn fiber(&self, x: usize) -> &[usize] {
        &self.fibers[x]
    }

    pub fn j(&self, m: usize) -> &Homomorphism {
        &self.j[m]
    }

    pub fn restriction(&self, x: usize, y: usize) -> Option<&Functor> {
        self.restrictions.get(&(x, y))
    }

    /// Position of `m` among the objects of its stalk.
    pub fn object(&self, m: usize) -> usize {
        let x = self.etale.project(m);
        self.fibers[x]
            .iter()
            .position(|&e| e == m)
            .expect("m lies in its fiber")
    }
}

/// Sections `a_α: U_α → M` and arrows `g_αβ: a_β → a_α` over `U_αβ`,
/// pointwise.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionChoices {
    /// `(α, x)` to `a_α(x) ∈ M_x`.
    pub sections: BTreeMap<(usize, usize), usize>,
    /// `(α, β, x)` for `α < β` to `g_αβ` in the stalk at `x`.
    pub arrows: BTreeMap<(usize, usize, usize), Arrow>,
}

/// Assigns one candidate to each of `points`, consistently along every
/// comparable pair.
fn compatible_family<T: Clone>(
    space: &crate::space::FinitePoset,
    points: &[usize],
    candidates: &impl Fn(usize) -> Vec<T>,
    agrees: &impl Fn(usize, &T, usize, &T) -> bool,
    counter: &mut Counter,
) -> Result<Option<Vec<T>>> {
    fn go<T: Clone>(
        space: &crate::space::FinitePoset,
        points: &[usize],
        candidates: &impl Fn(usize) -> Vec<T>,
        agrees: &impl Fn(usize, &T, usize, &T) -> bool,
        counter: &mut Counter,
        out: &mut Vec<T>,
    ) -> Result<bool> {
        let i = out.len();
        if i == points.len() {
            return Ok(true);
        }
        let x = points[i];
        for c in candidates(x) {
            counter.tick()?;
            let ok = (0..i).all(|k| {
                let y = points[k];
                (!space.leq(y, x) || agrees(y, &out[k], x, &c))
                    && (!space.leq(x, y) || agrees(x, &c, y, &out[k]))
            });
            if ok {
                out.push(c);
                if go(space, points, candidates, agrees, counter, out)? {
                    return Ok(true);
                }
                out.pop();
            }
        }
        Ok(false)
    }
    let mut out = Vec::with_capacity(points.len());
    Ok(
        if go(space, points, candidates, agrees, counter, &mut out)? {
            Some(out)
        } else {
            None
        },
    )
}

/// Points of a mask, those with the largest up-set first.
fn search_order(space: &crate::space::FinitePoset, mask: u64) -> Vec<usize> {
    let mut pts: Vec<usize> = bits(mask).collect();
    pts.sort_by_key(|&x| (core::cmp::Reverse(space.up_set(x).count_ones()), x));
    pts
}

/// First sections and arrows found by search, in canonical order.
pub fn choose_extension_data(
    ext: &GroupoidExtension,
    cover: &Cover,
    budget: &Budget,
) -> Result<ExtensionChoices> {
    let space = ext.etale.base();
    let mut counter = budget.counter("extension choices");
    let mut out = ExtensionChoices::default();
    for a in 0..cover.len() {
        let pts = search_order(space, cover.member(a).members());
        let family = compatible_family(
            space,
            &pts,
            &|x| ext.fibers[x].clone(),
            &|x, m: &usize, y, n: &usize| x == y || ext.etale.lift(*m, y) == *n,
            &mut counter,
        )?
        .ok_or_else(|| {
            Error::InvalidExtension(format!("M has no section over {}", cover.label(a)))
        })?;
        for (x, m) in pts.into_iter().zip(family) {
            out.sections.insert((a, x), m);
        }
    }
    for a in 0..cover.len() {
        for b in a + 1..cover.len() {
            let mask = cover.member(a).members() & cover.member(b).members();
            let pts = search_order(space, mask);
            let family = compatible_family(
                space,
                &pts,
                &|x| {
                    let s = ext.object(out.sections[&(b, x)]);
                    let t = ext.object(out.sections[&(a, x)]);
                    ext.stalks[x].hom(s, t)
                },
                &|x, f: &Arrow, y, g: &Arrow| {
                    x == y
                        || ext.restrictions[&(x, y)].apply(&ext.stalks[x], &ext.stalks[y], f) == *g
                },
                &mut counter,
            )?
            .ok_or_else(|| {
                Error::InvalidExtension(format!(
                    "no continuous arrows a_{} → a_{}",
                    cover.label(b),
                    cover.label(a)
                ))
            })?;
            for (x, f) in pts.into_iter().zip(family) {
                out.arrows.insert((a, b, x), f);
            }
        }
    }
    Ok(out)
}

/// The band `L̃` with `λ_αβ = θ_α (g_αβ)_* θ_β⁻¹` and the cocycle
/// `θ_α(g_αβ g_βγ g_αγ⁻¹)`, where `θ_α = j⁻¹` at `a_α`.
pub fn extension_to_cocycle(
    ext: &GroupoidExtension,
    cover: &Cover,
    choices: &ExtensionChoices,
) -> Result<(Arc<Band>, Cocycle2)> {
    let space = ext.etale.base();
    let total = ext.etale.total();
    let nerve = nerve(space, cover, 4)?;
    let l = &ext.kernel;
    let name = |x: usize| space.label(x);
    for a in 0..cover.len() {
        for x in cover.member(a).points() {
            let m = *choices.sections.get(&(a, x)).ok_or_else(|| {
                Error::MissingData(format!("a_{} at {}", cover.label(a), name(x)))
            })?;
            if m >= total.len() || ext.etale.project(m) != x {
                return Err(Error::InvalidExtension(format!(
                    "a_{} at {} is not over {}",
                    cover.label(a),
                    name(x),
                    name(x)
                )));
            }
            for y in strictly_above(space, x) {
                if choices.sections.get(&(a, y)) != Some(&ext.etale.lift(m, y)) {
                    return Err(Error::InvalidExtension(format!(
                        "a_{} is not continuous from {} to {}",
                        cover.label(a),
                        name(x),
                        name(y)
                    )));
                }
            }
        }
    }
    let sec = |a: usize, x: usize| choices.sections[&(a, x)];
    let arrow = |a: usize, b: usize, x: usize| -> Result<Arrow> {
        let g = &ext.stalks[x];
        if a == b {
            return Ok(g.identity(ext.object(sec(a, x))));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let f = *choices.arrows.get(&(lo, hi, x)).ok_or_else(|| {
            Error::MissingData(format!(
                "g_{}{} at {}",
                cover.label(lo),
                cover.label(hi),
                name(x)
            ))
        })?;
        Ok(if a < b { f } else { g.inverse(&f) })
    };
    for a in 0..cover.len() {
        for b in a + 1..cover.len() {
            for x in bits(cover.member(a).members() & cover.member(b).members()) {
                let f = arrow(a, b, x)?;
                let g = &ext.stalks[x];
                if !g.is_arrow(&f)
                    || f.source != ext.object(sec(b, x))
                    || f.target != ext.object(sec(a, x))
                {
                    return Err(Error::InvalidExtension(format!(
                        "g_{}{} at {} is not an arrow a_β → a_α",
                        cover.label(a),
                        cover.label(b),
                        name(x)
                    )));
                }
                for y in strictly_above(space, x) {
                    if ext.restrictions[&(x, y)].apply(g, &ext.stalks[y], &f) != arrow(a, b, y)? {
                        return Err(Error::InvalidExtension(format!(
                            "g_{}{} is not continuous from {} to {}",
                            cover.label(a),
                            cover.label(b),
                            name(x),
                            name(y)
                        )));
                    }
                }
            }
        }
    }
    let theta = |a: usize, x: usize, e: usize| ext.j[sec(a, x)].inverse().apply(e);
    let vertex = |a: usize, x: usize, l: usize| -> Arrow {
        let o = ext.object(sec(a, x));
        Arrow {
            source: o,
            target: o,
            element: ext.j[sec(a, x)].apply(l),
        }
    };
    // one value per component, read at every point and required to agree
    let per_component =
        |simplex: u64, at: &dyn Fn(usize) -> Result<Vec<usize>>| -> Result<Vec<Vec<usize>>> {
            let comps = nerve
                .components(simplex)
                .map(<[u64]>::to_vec)
                .unwrap_or_default();
            comps
                .iter()
                .map(|&c| {
                    let mut pts = bits(c);
                    let v = at(pts.next().expect("components are inhabited"))?;
                    for x in pts {
                        if at(x)? != v {
                            return Err(Error::InvalidExtension(format!(
                                "data over {} are not constant on a component",
                                nerve.format_simplex(simplex)
                            )));
                        }
                    }
                    Ok(v)
                })
                .collect()
        };
    let mut lambda = BTreeMap::new();
    for &pair in nerve.simplices(2) {
        let [a, b] = [first(pair), 63 - pair.leading_zeros() as usize];
        let maps = per_component(pair, &|x| {
            let g = &ext.stalks[x];
            let f = arrow(a, b, x)?;
            l.elements()
                .map(|e| {
                    let moved = g.compose(&g.compose(&f, &vertex(b, x, e))?, &g.inverse(&f))?;
                    Ok(theta(a, x, moved.element))
                })
                .collect()
        })?;
        let maps = maps
            .into_iter()
            .map(|m| Homomorphism::new(l, l, m))
            .collect::<Result<Vec<_>>>()?;
        lambda.insert((a, b), maps);
    }
    let band = Arc::new(Band::new(
        &nerve,
        alloc::vec![l.clone(); cover.len()],
        lambda,
    )?);
    let mut values = Vec::new();
    for &t in nerve.simplices(3) {
        let ix: Vec<usize> = bits(t).collect();
        let (a, b, c) = (ix[0], ix[1], ix[2]);
        let v = per_component(t, &|x| {
            let g = &ext.stalks[x];
            let h = g.compose(
                &g.compose(&arrow(a, b, x)?, &arrow(b, c, x)?)?,
                &arrow(c, a, x)?,
            )?;
            Ok(alloc::vec![theta(a, x, h.element)])
        })?;
        values.push(v.into_iter().flatten().collect());
    }
    let c = Cocycle2::new(band.clone(), values)?;
    if let Check::Fails(m) = check_cocycle2(&c) {
        return Err(Error::Internal(format!(
            "cocycle of an extension fails: {m}"
        )));
    }
    Ok((band, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gerbes::cocycles2_equivalent;
    use crate::space::FinitePoset;

    /// The connected double cover of the pseudo-circle: the 8-point circle.
    fn double_cover() -> EtaleSpace {
        let x = FinitePoset::pseudo_circle();
        // a0 c0 b0 d0 a1 c1 b1 d1 around the circle, with c, d below a, b
        let leq = [
            (4, 0),
            (4, 1),
            (5, 1),
            (5, 2),
            (6, 2),
            (6, 3),
            (7, 3),
            (7, 0),
        ];
        let labels = ["a0", "b0", "a1", "b1", "c0", "d0", "c1", "d1"];
        let total = FinitePoset::new(labels.to_vec(), &leq).unwrap();
        let pc = |l: &str| x.point(l).unwrap();
        let proj = ["a", "b", "a", "b", "c", "d", "c", "d"]
            .iter()
            .map(|l| pc(l))
            .collect();
        EtaleSpace::new(&x, total, proj).unwrap()
    }

    #[test]
    fn product_extension_has_trivial_class() {
        let m = double_cover();
        let ext = GroupoidExtension::product(m, &FiniteGroup::cyclic(2)).unwrap();
        let x = ext.etale().base().clone();
        let cover = Cover::minimal(&x, x.whole()).unwrap();
        let ch = choose_extension_data(&ext, &cover, &Budget::default()).unwrap();
        let (band, c) = extension_to_cocycle(&ext, &cover, &ch).unwrap();
        assert!(band.is_trivially_glued());
        let unit = Cocycle2::unit(band.clone());
        assert!(cocycles2_equivalent(&c, &unit, &Budget::default())
            .unwrap()
            .is_some());
    }

    /// `Z/4` acting on the double cover through `Z/4 → Z/2`.
    pub(crate) fn z4_extension() -> GroupoidExtension {
        let m = double_cover();
        let z4 = FiniteGroup::cyclic(4);
        let swap = [2, 3, 0, 1, 6, 7, 4, 5];
        let action: Vec<Vec<usize>> = z4
            .elements()
            .map(|k| {
                (0..8)
                    .map(|p| if k % 2 == 1 { swap[p] } else { p })
                    .collect()
            })
            .collect();
        let kernel = Subgroup::from_elements(&z4, alloc::vec![0, 2]).unwrap();
        GroupoidExtension::from_action(m, &z4, &kernel, &action).unwrap()
    }

    #[test]
    fn central_extension_has_identity_gluing() {
        let ext = z4_extension();
        let x = ext.etale().base().clone();
        let cover = Cover::minimal(&x, x.whole()).unwrap();
        let ch = choose_extension_data(&ext, &cover, &Budget::default()).unwrap();
        let (band, c) = extension_to_cocycle(&ext, &cover, &ch).unwrap();
        assert!(band.is_trivially_glued());
        assert!(check_cocycle2(&c).holds());
    }
}
