//! Strict presheaves of groupoids, descent data, prestacks and stacks.
//!
//! All checks use the cover of each open by the minimal opens of its
//! points. That cover refines every other cover, so it is the only one the
//! colimit over refinements ever needs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::budget::{product, Budget, Counter};
use crate::error::{Check, Error, Result};
use crate::groupoid::{Arrow, Functor, Groupoid};
use crate::groups::{FiniteGroup, MAX_ORDER};
use crate::sheaves::{sheaf_check, Presheaf};
use crate::space::{bits, Cover, FinitePoset, Mask};
use crate::torsors::{odometer, GroupSheaf};

/// A groupoid for every open and a functor for every inclusion, with
/// `(ij)* = j* i*` on the nose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidPresheaf {
    space: FinitePoset,
    opens: Vec<Mask>,
    index: BTreeMap<Mask, usize>,
    values: Vec<Groupoid>,
    /// `restrictions[u * n + v]` for `opens[v] ⊆ opens[u]`.
    restrictions: Vec<Option<Functor>>,
}

impl GroupoidPresheaf {
    /// `values[i]` over `space.open_masks()[i]`; `restrict(u, v, a)` sends an
    /// arrow over open `u` to one over open `v ⊆ u`. Restriction to the same
    /// open must be the identity and restrictions must compose strictly.
    pub fn new(
        space: &FinitePoset,
        values: Vec<Groupoid>,
        restrict: impl Fn(usize, usize, &Arrow) -> Result<Arrow>,
    ) -> Result<Self> {
        let opens = space.open_masks();
        let n = opens.len();
        if values.len() != n {
            return Err(Error::InvalidGroupoid(format!(
                "{} groupoids for {n} opens",
                values.len()
            )));
        }
        let mut restrictions = vec![None; n * n];
        for u in 0..n {
            for v in 0..n {
                if opens[v] & !opens[u] != 0 {
                    continue;
                }
                let f = Functor::from_arrow_map(&values[u], &values[v], |a| restrict(u, v, a))
                    .map_err(|e| {
                        Error::InvalidGroupoid(format!(
                            "restriction {} → {}: {e}",
                            space.format_set(opens[u]),
                            space.format_set(opens[v])
                        ))
                    })?;
                if u == v && f != Functor::identity(&values[u]) {
                    return Err(Error::InvalidGroupoid(format!(
                        "restriction of {} to itself is not the identity",
                        space.format_set(opens[u])
                    )));
                }
                restrictions[u * n + v] = Some(f);
            }
        }
        let p = GroupoidPresheaf {
            space: space.clone(),
            index: opens.iter().enumerate().map(|(i, &m)| (m, i)).collect(),
            opens,
            values,
            restrictions,
        };
        p.check_strict()?;
        Ok(p)
    }

    fn check_strict(&self) -> Result<()> {
        let n = self.opens.len();
        for u in 0..n {
            for v in 0..n {
                let Some(uv) = &self.restrictions[u * n + v] else {
                    continue;
                };
                for w in 0..n {
                    if u == v || v == w {
                        continue;
                    }
                    let Some(vw) = &self.restrictions[v * n + w] else {
                        continue;
                    };
                    let uw = self.restrictions[u * n + w].as_ref().unwrap();
                    let composite = vw.after(uv, &self.values[u], &self.values[v], &self.values[w]);
                    if composite != *uw {
                        return Err(Error::InvalidGroupoid(format!(
                            "restrictions {} → {} → {} do not compose strictly",
                            self.space.format_set(self.opens[u]),
                            self.space.format_set(self.opens[v]),
                            self.space.format_set(self.opens[w])
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// One object over every open with automorphism group `groups[i]`;
    /// `restrict(u, v, g)` is the restriction homomorphism.
    pub fn one_object(
        space: &FinitePoset,
        groups: Vec<FiniteGroup>,
        restrict: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let values = groups.iter().map(Groupoid::one_object).collect();
        GroupoidPresheaf::new(space, values, |u, v, a| {
            Ok(Arrow {
                source: 0,
                target: 0,
                element: restrict(u, v, a.element),
            })
        })
    }

    /// The one-object groupoid of a sheaf of groups; its descent data are
    /// torsor data.
    pub fn from_group_sheaf(sheaf: &GroupSheaf) -> Result<Self> {
        let sets = sheaf.sets();
        let groups = (0..sets.open_count())
            .map(|u| sheaf.group(u))
            .collect::<Result<Vec<_>>>()?;
        GroupoidPresheaf::one_object(sheaf.space(), groups, |u, v, g| sets.restrict(u, v, g))
    }

    /// Sections of a presheaf of sets as a discrete groupoid.
    pub fn discrete(p: &Presheaf) -> Result<Self> {
        let values = (0..p.open_count())
            .map(|u| Groupoid::discrete((0..p.size(u)).map(|s| format!("{s}")).collect::<Vec<_>>()))
            .collect();
        GroupoidPresheaf::new(p.space(), values, |u, v, a| {
            let x = p.restrict(u, v, a.source);
            Ok(Arrow {
                source: x,
                target: x,
                element: 0,
            })
        })
    }

    /// Pointwise product; object `(x, y)` is `x·|Ob B| + y`.
    pub fn product(a: &GroupoidPresheaf, b: &GroupoidPresheaf) -> Result<Self> {
        if a.space.id() != b.space.id() {
            return Err(Error::MismatchedSpaces);
        }
        let mut values = Vec::with_capacity(a.values.len());
        for (ga, gb) in a.values.iter().zip(&b.values) {
            values.push(product_groupoid(ga, gb)?);
        }
        GroupoidPresheaf::new(&a.space, values, |u, v, arrow| {
            let (ga, gb) = (&a.values[u], &b.values[u]);
            let (fa, fb) = (a.restriction(u, v), b.restriction(u, v));
            let nb = gb.object_count();
            let hb = gb.vertex_group(arrow.source % nb).order();
            let x = Arrow {
                source: arrow.source / nb,
                target: arrow.target / nb,
                element: arrow.element / hb,
            };
            let y = Arrow {
                source: arrow.source % nb,
                target: arrow.target % nb,
                element: arrow.element % hb,
            };
            let (x, y) = (
                fa.apply(ga, &a.values[v], &x),
                fb.apply(gb, &b.values[v], &y),
            );
            let nbv = b.values[v].object_count();
            let hbv = b.values[v].vertex_group(y.source).order();
            Ok(Arrow {
                source: x.source * nbv + y.source,
                target: x.target * nbv + y.target,
                element: x.element * hbv + y.element,
            })
        })
    }

    pub fn space(&self) -> &FinitePoset {
        &self.space
    }

    pub fn opens(&self) -> &[Mask] {
        &self.opens
    }

    pub fn open_index(&self, mask: Mask) -> Result<usize> {
        self.index.get(&mask).copied().ok_or_else(|| {
            Error::InvalidCover(format!("{} is not open", self.space.format_set(mask)))
        })
    }

    pub fn value(&self, u: usize) -> &Groupoid {
        &self.values[u]
    }

    pub fn restriction(&self, u: usize, v: usize) -> &Functor {
        self.restrictions[u * self.opens.len() + v]
            .as_ref()
            .expect("restriction along an inclusion")
    }

    pub fn restrict_arrow(&self, u: usize, v: usize, a: &Arrow) -> Arrow {
        self.restriction(u, v)
            .apply(&self.values[u], &self.values[v], a)
    }

    pub fn restrict_object(&self, u: usize, v: usize, x: usize) -> usize {
        self.restriction(u, v).object(x)
    }
}

fn product_groupoid(a: &Groupoid, b: &Groupoid) -> Result<Groupoid> {
    let nb = b.object_count();
    let labels: Vec<String> = (0..a.object_count() * nb)
        .map(|i| format!("({},{})", a.label(i / nb), b.label(i % nb)))
        .collect();
    let mut comps = Vec::new();
    for ca in a.components() {
        for cb in b.components() {
            let mut objects = vec![ca.base * nb + cb.base];
            for &x in &ca.objects {
                for &y in &cb.objects {
                    if (x, y) != (ca.base, cb.base) {
                        objects.push(x * nb + y);
                    }
                }
            }
            comps.push((objects, FiniteGroup::direct_product(&ca.group, &cb.group)?));
        }
    }
    Groupoid::new(labels, comps)
}

/// `V ↦ Hom_{F(V)}(a|V, b|V)` for opens `V ⊆ U`, as a presheaf on the
/// subspace `U`. Sections over `V` are indexed by vertex group elements.
pub fn hom_presheaf(f: &GroupoidPresheaf, u: Mask, a: usize, b: usize) -> Result<Presheaf> {
    let ui = f.open_index(u)?;
    let g = f.value(ui);
    if a >= g.object_count() || b >= g.object_count() {
        return Err(Error::InvalidGroupoid(format!(
            "object not in the value over {}",
            f.space.format_set(u)
        )));
    }
    let (sub, points) = f.space.subspace(u);
    let to_global = |m: Mask| -> Mask { bits(m).fold(0, |acc, i| acc | 1u64 << points[i]) };
    let global: Vec<usize> = sub
        .open_masks()
        .into_iter()
        .map(|m| f.index[&to_global(m)])
        .collect();
    let ends: Vec<(usize, usize)> = global
        .iter()
        .map(|&v| (f.restrict_object(ui, v, a), f.restrict_object(ui, v, b)))
        .collect();
    let sizes = global
        .iter()
        .zip(&ends)
        .map(|(&v, &(x, y))| f.value(v).hom_count(x, y))
        .collect();
    Presheaf::new(&sub, sizes, |p, q, s| {
        let (x, y) = ends[p];
        let arrow = Arrow {
            source: x,
            target: y,
            element: s,
        };
        f.restrict_arrow(global[p], global[q], &arrow).element
    })
}

/// A descent datum: an object over each cover member and a gluing arrow
/// `θ_αβ: a_β → a_α` over each intersection, for `α < β`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DescentDatum {
    pub objects: Vec<usize>,
    pub gluing: Vec<Arrow>,
}

/// `Des(𝒰, F)`: all descent data, in normal form.
#[derive(Clone, Debug)]
pub struct DescentCategory {
    /// Open index of each cover member.
    members: Vec<usize>,
    /// `(α, β, open index of U_αβ)` for all `α < β`.
    pairs: Vec<(usize, usize, usize)>,
    data: Vec<DescentDatum>,
    groupoid: Groupoid,
    /// Per datum, the family of arrows from its component's base.
    transports: Vec<Vec<Arrow>>,
    /// Per component, the automorphism families of the base, sorted.
    stabilizers: Vec<Vec<Vec<Arrow>>>,
}

fn pair_slot(k: usize, a: usize, b: usize) -> usize {
    // position of (a, b), a < b, in lexicographic order of pairs of 0..k
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

impl DescentCategory {
    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn data(&self) -> &[DescentDatum] {
        &self.data
    }

    pub fn find(&self, d: &DescentDatum) -> Option<usize> {
        self.data.binary_search(d).ok()
    }

    pub fn component_count(&self) -> usize {
        self.groupoid.components().len()
    }

    fn member_count(&self) -> usize {
        self.members.len()
    }

    /// Target of the family `f` out of datum `x`:
    /// `a'_α = target f_α`, `θ'_αβ = f_α θ_αβ f_β⁻¹`.
    fn target_of(&self, f: &GroupoidPresheaf, x: &DescentDatum, fam: &[Arrow]) -> DescentDatum {
        let objects = fam.iter().map(|a| a.target).collect();
        let gluing = self
            .pairs
            .iter()
            .zip(&x.gluing)
            .map(|(&(a, b, w), theta)| {
                let g = f.value(w);
                let fa = f.restrict_arrow(self.members[a], w, &fam[a]);
                let fb = f.restrict_arrow(self.members[b], w, &fam[b]);
                let t = g.compose(&fa, theta).unwrap();
                g.compose(&t, &g.inverse(&fb)).unwrap()
            })
            .collect();
        DescentDatum { objects, gluing }
    }

    fn compose(&self, f: &GroupoidPresheaf, g: &[Arrow], h: &[Arrow]) -> Vec<Arrow> {
        g.iter()
            .zip(h)
            .enumerate()
            .map(|(a, (x, y))| f.value(self.members[a]).compose(x, y).unwrap())
            .collect()
    }

    fn invert(&self, f: &GroupoidPresheaf, g: &[Arrow]) -> Vec<Arrow> {
        g.iter()
            .enumerate()
            .map(|(a, x)| f.value(self.members[a]).inverse(x))
            .collect()
    }

    /// Normal form of the arrow given by family `fam` from datum `x` to `y`.
    pub fn normalize(
        &self,
        f: &GroupoidPresheaf,
        x: usize,
        y: usize,
        fam: &[Arrow],
    ) -> Result<Arrow> {
        let inner = self.compose(
            f,
            &self.invert(f, &self.transports[y]),
            &self.compose(f, fam, &self.transports[x]),
        );
        let c = self.groupoid.component_of(x);
        let element = self.stabilizers[c]
            .binary_search_by(|s| s.as_slice().cmp(&inner))
            .map_err(|_| {
                Error::Internal("family is not an arrow of the descent groupoid".into())
            })?;
        Ok(Arrow {
            source: x,
            target: y,
            element,
        })
    }

    /// The family of the arrow `t_y ∘ g ∘ t_x⁻¹`.
    pub fn family(&self, f: &GroupoidPresheaf, a: &Arrow) -> Vec<Arrow> {
        let c = self.groupoid.component_of(a.source);
        let g = &self.stabilizers[c][a.element];
        self.compose(
            f,
            &self.transports[a.target],
            &self.compose(f, g, &self.invert(f, &self.transports[a.source])),
        )
    }
}

fn cover_opens(
    f: &GroupoidPresheaf,
    cover: &Cover,
) -> Result<(
    Vec<usize>,
    Vec<(usize, usize, usize)>,
    Vec<(usize, usize, usize, usize)>,
)> {
    if cover.of().space_id() != f.space.id() {
        return Err(Error::MismatchedSpaces);
    }
    let k = cover.len();
    let members = (0..k)
        .map(|a| f.open_index(cover.member(a).members()))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            pairs.push((
                a,
                b,
                f.open_index(cover.intersection(1u64 << a | 1u64 << b))?,
            ));
        }
    }
    let mut triples = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                triples.push((
                    a,
                    b,
                    c,
                    f.open_index(cover.intersection(1u64 << a | 1u64 << b | 1u64 << c))?,
                ));
            }
        }
    }
    Ok((members, pairs, triples))
}

/// Enumerates every descent datum for `cover` and finds the components of
/// `Des(𝒰, F)` by searching all arrow families out of each base.
pub fn descent_category(
    f: &GroupoidPresheaf,
    cover: &Cover,
    budget: &Budget,
) -> Result<DescentCategory> {
    let (members, pairs, triples) = cover_opens(f, cover)?;
    let k = members.len();
    // triples become checkable when their pair (b, c) is assigned
    let mut due: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); pairs.len()];
    for &t in &triples {
        due[pair_slot(k, t.1, t.2)].push(t);
    }
    let mut counter = budget.counter("enumerating descent data");
    let mut data = Vec::new();
    let mut objects = vec![0usize; k];
    let mut gluing = vec![
        Arrow {
            source: 0,
            target: 0,
            element: 0
        };
        pairs.len()
    ];
    struct Ctx<'a> {
        f: &'a GroupoidPresheaf,
        members: &'a [usize],
        pairs: &'a [(usize, usize, usize)],
        due: &'a [Vec<(usize, usize, usize, usize)>],
        k: usize,
        budget: &'a Budget,
    }
    fn choose_objects(
        i: usize,
        cx: &Ctx,
        objects: &mut Vec<usize>,
        gluing: &mut Vec<Arrow>,
        data: &mut Vec<DescentDatum>,
        counter: &mut Counter,
    ) -> Result<()> {
        if i == objects.len() {
            return choose_gluing(0, cx, objects, gluing, data, counter);
        }
        for x in 0..cx.f.value(cx.members[i]).object_count() {
            counter.tick()?;
            objects[i] = x;
            choose_objects(i + 1, cx, objects, gluing, data, counter)?;
        }
        Ok(())
    }
    fn choose_gluing(
        p: usize,
        cx: &Ctx,
        objects: &[usize],
        gluing: &mut Vec<Arrow>,
        data: &mut Vec<DescentDatum>,
        counter: &mut Counter,
    ) -> Result<()> {
        if p == cx.pairs.len() {
            data.push(DescentDatum {
                objects: objects.to_vec(),
                gluing: gluing.clone(),
            });
            if data.len() as u128 > cx.budget.arrows as u128 {
                cx.budget
                    .check_arrows("descent groupoid arrows", data.len() as u128)?;
            }
            return Ok(());
        }
        let (a, b, w) = cx.pairs[p];
        let f = cx.f;
        let xa = f.restrict_object(cx.members[a], w, objects[a]);
        let xb = f.restrict_object(cx.members[b], w, objects[b]);
        for theta in f.value(w).hom(xb, xa) {
            counter.tick()?;
            gluing[p] = theta;
            let ok = cx.due[p].iter().all(|&(a, b, c, t)| {
                let g = f.value(t);
                let ab = f.restrict_arrow(
                    cx.pairs[pair_slot(cx.k, a, b)].2,
                    t,
                    &gluing[pair_slot(cx.k, a, b)],
                );
                let bc = f.restrict_arrow(
                    cx.pairs[pair_slot(cx.k, b, c)].2,
                    t,
                    &gluing[pair_slot(cx.k, b, c)],
                );
                let ac = f.restrict_arrow(
                    cx.pairs[pair_slot(cx.k, a, c)].2,
                    t,
                    &gluing[pair_slot(cx.k, a, c)],
                );
                g.compose(&ab, &bc).map(|x| x == ac).unwrap_or(false)
            });
            if ok {
                choose_gluing(p + 1, cx, objects, gluing, data, counter)?;
            }
        }
        Ok(())
    }
    let cx = Ctx {
        f,
        members: &members,
        pairs: &pairs,
        due: &due,
        k,
        budget,
    };
    choose_objects(0, &cx, &mut objects, &mut gluing, &mut data, &mut counter)?;
    // data come out sorted: objects first, then gluing arrows in order
    debug_assert!(data.windows(2).all(|w| w[0] < w[1]));
    let mut des = DescentCategory {
        members,
        pairs,
        data,
        groupoid: Groupoid::discrete(Vec::<String>::new()),
        transports: Vec::new(),
        stabilizers: Vec::new(),
    };
    let n = des.data.len();
    let mut component_of = vec![usize::MAX; n];
    let mut transports = vec![Vec::new(); n];
    let mut comps: Vec<(Vec<usize>, FiniteGroup)> = Vec::new();
    let mut stabilizers = Vec::new();
    for x in 0..n {
        if component_of[x] != usize::MAX {
            continue;
        }
        let c = comps.len();
        let base = des.data[x].clone();
        let outs: Vec<Vec<Arrow>> = (0..des.member_count())
            .map(|a| {
                let g = f.value(des.members[a]);
                let src = base.objects[a];
                let cc = &g.components()[g.component_of(src)];
                let mut v: Vec<Arrow> = cc.objects.iter().flat_map(|&t| g.hom(src, t)).collect();
                v.sort();
                v
            })
            .collect();
        let radix: Vec<usize> = outs.iter().map(Vec::len).collect();
        budget.check(
            "arrow families of a descent datum",
            product(radix.iter().copied()),
        )?;
        let mut digits = vec![0usize; radix.len()];
        let mut objects = Vec::new();
        let mut stab: Vec<Vec<Arrow>> = Vec::new();
        loop {
            let fam: Vec<Arrow> = digits
                .iter()
                .enumerate()
                .map(|(a, &d)| outs[a][d])
                .collect();
            let target = des.target_of(f, &base, &fam);
            let y = des.find(&target).ok_or_else(|| {
                Error::Internal("arrow family leads outside the descent data".into())
            })?;
            if component_of[y] == usize::MAX {
                component_of[y] = c;
                objects.push(y);
                transports[y] = fam.clone();
            }
            if y == x {
                stab.push(fam);
            }
            if !odometer(&mut digits, &radix) {
                break;
            }
        }
        // the identity family is the first loop found only if it sorts first
        let identity: Vec<Arrow> = (0..des.member_count())
            .map(|a| f.value(des.members[a]).identity(base.objects[a]))
            .collect();
        transports[x] = identity.clone();
        objects.retain(|&y| y != x);
        objects.insert(0, x);
        stab.sort();
        if stab.len() > MAX_ORDER {
            return Err(Error::Budget {
                what: "automorphism group of a descent datum",
                needed: stab.len() as u128,
                limit: MAX_ORDER as u64,
            });
        }
        // unit first
        let unit = stab
            .binary_search(&identity)
            .map_err(|_| Error::Internal("identity family missing".into()))?;
        stab.remove(unit);
        stab.insert(0, identity);
        let mut sorted = stab.clone();
        sorted.sort();
        let pos = |fam: &Vec<Arrow>| stab.iter().position(|s| s == fam).unwrap();
        let lookup: BTreeMap<&Vec<Arrow>, usize> = sorted.iter().map(|s| (s, pos(s))).collect();
        let table = stab
            .iter()
            .map(|g| stab.iter().map(|h| lookup[&des.compose(f, g, h)]).collect())
            .collect();
        let labels: Vec<String> = stab
            .iter()
            .enumerate()
            .map(|(a, fam)| format_family(f, &des.members, fam, a))
            .collect();
        let group = FiniteGroup::from_table(labels, table)?;
        comps.push((objects, group));
        stabilizers.push(stab);
    }
    // stabilizers must be searchable, so store them sorted and renumber
    let mut sorted_groups = Vec::with_capacity(comps.len());
    let mut sorted_stabs = Vec::with_capacity(comps.len());
    for ((objects, group), stab) in comps.into_iter().zip(stabilizers) {
        let mut order: Vec<usize> = (0..stab.len()).collect();
        order.sort_by(|&i, &j| stab[i].cmp(&stab[j]));
        let mut rank = vec![0; stab.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let table = order
            .iter()
            .map(|&i| order.iter().map(|&j| rank[group.mul(i, j)]).collect())
            .collect();
        let labels: Vec<String> = order.iter().map(|&i| group.label(i).into()).collect();
        sorted_groups.push((objects, FiniteGroup::from_table(labels, table)?));
        sorted_stabs.push(
            order
                .into_iter()
                .map(|i| stab[i].clone())
                .collect::<Vec<_>>(),
        );
    }
    let labels: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    des.groupoid = Groupoid::new(labels, sorted_groups)?;
    des.transports = transports;
    des.stabilizers = sorted_stabs;
    budget.check_arrows("descent groupoid arrows", des.groupoid.arrow_count())?;
    Ok(des)
}

fn format_family(f: &GroupoidPresheaf, members: &[usize], fam: &[Arrow], _: usize) -> String {
    let parts: Vec<&str> = fam
        .iter()
        .enumerate()
        .map(|(a, x)| f.value(members[a]).vertex_group(x.source).label(x.element))
        .collect();
    format!("[{}]", parts.join(","))
}

/// `D: F(U) → Des(𝒰, F)`, `b ↦ (b|U_α, identities)`.
pub fn comparison_functor(
    f: &GroupoidPresheaf,
    cover: &Cover,
    des: &DescentCategory,
) -> Result<Functor> {
    let u = f.open_index(cover.of().members())?;
    let source = f.value(u);
    let datum = |b: usize| -> DescentDatum {
        DescentDatum {
            objects: des
                .members
                .iter()
                .map(|&m| f.restrict_object(u, m, b))
                .collect(),
            gluing: des
                .pairs
                .iter()
                .map(|&(_, _, w)| f.value(w).identity(f.restrict_object(u, w, b)))
                .collect(),
        }
    };
    Functor::from_arrow_map(source, des.groupoid(), |a| {
        let x = des
            .find(&datum(a.source))
            .ok_or_else(|| Error::Internal("D(b) is not a descent datum".into()))?;
        let y = des
            .find(&datum(a.target))
            .ok_or_else(|| Error::Internal("D(b) is not a descent datum".into()))?;
        let fam: Vec<Arrow> = des
            .members
            .iter()
            .map(|&m| f.restrict_arrow(u, m, a))
            .collect();
        des.normalize(f, x, y, &fam)
    })
}

/// Whether `D` is bijective on `Hom(a, b)` for the minimal cover of `u`,
/// counting arrows `D a → D b` directly as families that agree on overlaps.
fn comparison_hom_check(f: &GroupoidPresheaf, u: usize, budget: &Budget) -> Result<Option<String>> {
    let space = &f.space;
    let cover = Cover::minimal(space, space.open(f.opens[u])?)?;
    let (members, pairs, _) = cover_opens(f, &cover)?;
    let g = f.value(u);
    let mut counter = budget.counter("counting descent arrows");
    for a in 0..g.object_count() {
        for b in 0..g.object_count() {
            let homs: Vec<Vec<Arrow>> = members
                .iter()
                .map(|&m| {
                    f.value(m)
                        .hom(f.restrict_object(u, m, a), f.restrict_object(u, m, b))
                })
                .collect();
            let mut count = 0usize;
            let mut fam = Vec::with_capacity(members.len());
            fn go(
                i: usize,
                f: &GroupoidPresheaf,
                members: &[usize],
                pairs: &[(usize, usize, usize)],
                homs: &[Vec<Arrow>],
                fam: &mut Vec<Arrow>,
                count: &mut usize,
                counter: &mut Counter,
            ) -> Result<()> {
                if i == homs.len() {
                    *count += 1;
                    return Ok(());
                }
                for h in &homs[i] {
                    counter.tick()?;
                    fam.push(*h);
                    let ok = pairs.iter().filter(|p| p.1 == i).all(|&(a, b, w)| {
                        f.restrict_arrow(members[a], w, &fam[a])
                            == f.restrict_arrow(members[b], w, &fam[b])
                    });
                    if ok {
                        go(i + 1, f, members, pairs, homs, fam, count, counter)?;
                    }
                    fam.pop();
                }
                Ok(())
            }
            go(
                0,
                f,
                &members,
                &pairs,
                &homs,
                &mut fam,
                &mut count,
                &mut counter,
            )?;
            let mut images: Vec<Vec<Arrow>> = g
                .hom(a, b)
                .iter()
                .map(|h| members.iter().map(|&m| f.restrict_arrow(u, m, h)).collect())
                .collect();
            images.sort();
            images.dedup();
            let name = space.format_set(f.opens[u]);
            if images.len() != g.hom_count(a, b) {
                return Ok(Some(format!(
                    "D is not faithful on Hom({}, {}) over {name}",
                    g.label(a),
                    g.label(b)
                )));
            }
            if count != images.len() {
                return Ok(Some(format!(
                    "D is not full on Hom({}, {}) over {name}",
                    g.label(a),
                    g.label(b)
                )));
            }
        }
    }
    Ok(None)
}

/// The two prestack criteria, which always agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrestackReport {
    /// Every Hom presheaf is a sheaf.
    pub hom_sheaves: Check,
    /// `D` is fully faithful for the minimal cover of every open.
    pub comparison: Check,
}

pub fn prestack_report(f: &GroupoidPresheaf, budget: &Budget) -> Result<PrestackReport> {
    let mut hom_sheaves = Check::Holds;
    'outer: for u in 0..f.opens.len() {
        let g = f.value(u);
        for a in 0..g.object_count() {
            for b in 0..g.object_count() {
                let h = hom_presheaf(f, f.opens[u], a, b)?;
                if let Check::Fails(m) = sheaf_check(&h) {
                    hom_sheaves = Check::Fails(format!(
                        "Hom({}, {}) over {}: {m}",
                        g.label(a),
                        g.label(b),
                        f.space.format_set(f.opens[u])
                    ));
                    break 'outer;
                }
            }
        }
    }
    let mut comparison = Check::Holds;
    for u in 0..f.opens.len() {
        if let Some(m) = comparison_hom_check(f, u, budget)? {
            comparison = Check::Fails(m);
            break;
        }
    }
    if hom_sheaves.holds() != comparison.holds() {
        return Err(Error::Internal(format!(
            "prestack criteria disagree: Hom sheaves {:?}, comparison {:?}",
            hom_sheaves, comparison
        )));
    }
    Ok(PrestackReport {
        hom_sheaves,
        comparison,
    })
}

pub fn is_prestack(f: &GroupoidPresheaf, budget: &Budget) -> Result<bool> {
    Ok(prestack_report(f, budget)?.hom_sheaves.holds())
}

/// Prestack, and every descent datum for every minimal cover is isomorphic
/// to some `D(b)`.
pub fn stack_check(f: &GroupoidPresheaf, budget: &Budget) -> Result<Check> {
    let report = prestack_report(f, budget)?;
    if let Check::Fails(m) = report.hom_sheaves {
        return Ok(Check::Fails(format!("not a prestack: {m}")));
    }
    for u in 0..f.opens.len() {
        let cover = Cover::minimal(&f.space, f.space.open(f.opens[u])?)?;
        let des = descent_category(f, &cover, budget)?;
        let d = comparison_functor(f, &cover, &des)?;
        if !d.is_essentially_surjective(f.value(u), des.groupoid()) {
            return Ok(Check::Fails(format!(
                "a descent datum over {} is not effective",
                f.space.format_set(f.opens[u])
            )));
        }
    }
    Ok(Check::Holds)
}

pub fn is_stack(f: &GroupoidPresheaf, budget: &Budget) -> Result<bool> {
    Ok(stack_check(f, budget)?.holds())
}

/// The associated stack together with the descent categories it was built
/// from and the unit functors `F(U) → F̂(U)`.
#[derive(Clone, Debug)]
pub struct Stackification {
    pub stack: GroupoidPresheaf,
    pub descent: Vec<DescentCategory>,
    pub unit: Vec<Functor>,
}

/// `F̂(U) = Des(minimal cover of U, F)`, restricting by forgetting the
/// points outside the smaller open.
pub fn stackify(f: &GroupoidPresheaf, budget: &Budget) -> Result<Stackification> {
    if let Check::Fails(m) = prestack_report(f, budget)?.hom_sheaves {
        return Err(Error::NotPrestack(m));
    }
    let space = &f.space;
    let mut descent = Vec::with_capacity(f.opens.len());
    let mut unit = Vec::with_capacity(f.opens.len());
    for &u in &f.opens {
        let cover = Cover::minimal(space, space.open(u)?)?;
        let des = descent_category(f, &cover, budget)?;
        unit.push(comparison_functor(f, &cover, &des)?);
        descent.push(des);
    }
    let values = descent.iter().map(|d| d.groupoid.clone()).collect();
    let opens = f.opens.clone();
    let stack = GroupoidPresheaf::new(space, values, |u, v, a| {
        let (du, dv) = (&descent[u], &descent[v]);
        // member i of U's cover is the minimal open of the i-th point of U
        let keep: Vec<usize> = bits(opens[u])
            .enumerate()
            .filter(|&(_, x)| opens[v] >> x & 1 == 1)
            .map(|(i, _)| i)
            .collect();
        let k = du.member_count();
        let shrink = |d: &DescentDatum| DescentDatum {
            objects: keep.iter().map(|&i| d.objects[i]).collect(),
            gluing: keep
                .iter()
                .enumerate()
                .flat_map(|(p, &i)| keep[p + 1..].iter().map(move |&j| (i, j)))
                .map(|(i, j)| d.gluing[pair_slot(k, i, j)])
                .collect(),
        };
        let x = dv
            .find(&shrink(&du.data[a.source]))
            .ok_or_else(|| Error::Internal("restricted datum missing".into()))?;
        let y = dv
            .find(&shrink(&du.data[a.target]))
            .ok_or_else(|| Error::Internal("restricted datum missing".into()))?;
        let fam = du.family(f, a);
        let fam: Vec<Arrow> = keep.iter().map(|&i| fam[i]).collect();
        dv.normalize(f, x, y, &fam)
    })?;
    Ok(Stackification {
        stack,
        descent,
        unit,
    })
}

impl Stackification {
    /// The unit is fully faithful on every open and locally essentially
    /// surjective: near every point each object of `F̂(U)` comes from `F`.
    pub fn unit_check(&self, f: &GroupoidPresheaf) -> Check {
        let space = &f.space;
        for (u, d) in self.unit.iter().enumerate() {
            if !d.is_fully_faithful(f.value(u), self.stack.value(u)) {
                return Check::Fails(format!(
                    "unit is not fully faithful over {}",
                    space.format_set(f.opens[u])
                ));
            }
        }
        for u in 0..f.opens.len() {
            for x in bits(f.opens[u]) {
                let m = f.index[&space.up_set(x)];
                let near = &self.unit[m];
                let mut hit = vec![false; self.stack.value(m).components().len()];
                for c in f.value(m).components() {
                    hit[self.stack.value(m).component_of(near.object(c.base))] = true;
                }
                for obj in 0..self.stack.value(u).object_count() {
                    let r = self.stack.restrict_object(u, m, obj);
                    if !hit[self.stack.value(m).component_of(r)] {
                        return Check::Fails(format!(
                            "object over {} is not locally in the image near {}",
                            space.format_set(f.opens[u]),
                            space.label(x)
                        ));
                    }
                }
            }
        }
        Check::Holds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::AbstractNerve;

    fn big() -> Budget {
        Budget::default().with_arrows(10_000_000)
    }

    #[test]
    fn pseudo_circle_constant_z2() {
        let x = FinitePoset::pseudo_circle();
        let g = GroupSheaf::constant(&x, &FiniteGroup::cyclic(2));
        let f = GroupoidPresheaf::from_group_sheaf(&g).unwrap();
        assert!(is_prestack(&f, &big()).unwrap());
        assert!(!is_stack(&f, &big()).unwrap());
        let s = stackify(&f, &big()).unwrap();
        let top = s.stack.value(s.stack.opens().len() - 1);
        assert_eq!(top.components().len(), 2);
        assert!(s.unit_check(&f).holds());
        assert!(is_stack(&s.stack, &big()).unwrap());
    }

    #[test]
    fn triangle_descent_components() {
        let base = AbstractNerve::triangle().realize().unwrap();
        let g = GroupSheaf::constant(&base.space, &FiniteGroup::cyclic(2));
        let f = GroupoidPresheaf::from_group_sheaf(&g).unwrap();
        let des = descent_category(&f, &base.cover, &big()).unwrap();
        assert_eq!(des.component_count(), 2);
        assert_eq!(des.data().len(), 8);
    }

    #[test]
    fn empty_cover_gives_terminal_groupoid() {
        let x = FinitePoset::pseudo_circle();
        let g = GroupSheaf::constant(&x, &FiniteGroup::cyclic(3));
        let f = GroupoidPresheaf::from_group_sheaf(&g).unwrap();
        let cover = Cover::minimal(&x, x.empty_open()).unwrap();
        let des = descent_category(&f, &cover, &big()).unwrap();
        assert_eq!(des.groupoid().object_count(), 1);
        assert_eq!(des.groupoid().arrow_count(), 1);
    }

    #[test]
    fn constant_presheaf_is_not_a_prestack() {
        let x = FinitePoset::discrete(&["p", "q"]).unwrap();
        let n = x.open_masks().len();
        let z2 = FiniteGroup::cyclic(2);
        let f = GroupoidPresheaf::one_object(&x, vec![z2; n], |_, _, g| g).unwrap();
        let r = prestack_report(&f, &big()).unwrap();
        assert!(!r.hom_sheaves.holds());
        assert!(!r.comparison.holds());
        assert!(matches!(stackify(&f, &big()), Err(Error::NotPrestack(_))));
    }

    #[test]
    fn arrow_budget_enforced() {
        let x = FinitePoset::pseudo_circle();
        let g = GroupSheaf::constant(&x, &FiniteGroup::symmetric(3));
        let f = GroupoidPresheaf::from_group_sheaf(&g).unwrap();
        let cover = Cover::minimal(&x, x.whole()).unwrap();
        let e = descent_category(&f, &cover, &Budget::default()).unwrap_err();
        assert!(e.is_budget());
    }
}
