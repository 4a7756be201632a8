//! Sheaves of groups, torsors, 1-cocycles and H¹.
//!
//! Torsors live on a poset. Up to isomorphism a torsor is a choice of element
//! `h_xy` of the stalk at `y` for every `x <= y`, with
//! `h_xz = ρ(h_xy)·h_yz`, describing how the stalk at `x` (a copy of the stalk
//! group) maps into the stalk at `y`. These transition functors are what
//! [`classify_torsors`] enumerates.
//!
//! Čech data lives on a nerve. [`CechCoefficients`] supplies a group for each
//! inhabited simplex together with restriction maps to larger simplices,
//! either a constant group (one copy per component of the intersection) or
//! the sections of a [`GroupSheaf`] over a cover.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::budget::{product, Budget};
use crate::error::{Check, Error, Result};
use crate::groups::{FiniteGroup, Homomorphism};
use crate::sheaves::{is_sheaf, Morphism, Presheaf, StalkFunctor};
use crate::space::{bits, simplex_indices, AbstractNerve, FinitePoset, Fnv, Mask};

/// A sheaf of groups, given by its stalk groups and the homomorphisms
/// between them. Sections over an open are compatible families with the
/// pointwise product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSheaf {
    space: FinitePoset,
    stalks: Vec<FiniteGroup>,
    /// Homomorphisms for every `x <= y`.
    maps: BTreeMap<(usize, usize), Homomorphism>,
    sets: Presheaf,
    units: Vec<usize>,
}

impl GroupSheaf {
    /// From stalk groups and homomorphisms along the covering pairs of the
    /// poset; composites along different chains must agree.
    pub fn new(
        space: &FinitePoset,
        stalks: Vec<FiniteGroup>,
        edges: &BTreeMap<(usize, usize), Homomorphism>,
    ) -> Result<Self> {
        if stalks.len() != space.len() {
            return Err(Error::InvalidPresheaf(format!(
                "{} stalk groups for {} points",
                stalks.len(),
                space.len()
            )));
        }
        for (&(x, y), h) in edges {
            if x >= space.len() || y >= space.len() {
                return Err(Error::UnknownPoint(format!("#{}", x.max(y))));
            }
            h.validate(&stalks[x], &stalks[y]).map_err(|e| {
                Error::InvalidPresheaf(format!(
                    "map along {} <= {}: {e}",
                    space.label(x),
                    space.label(y)
                ))
            })?;
        }
        let raw: BTreeMap<(usize, usize), Vec<usize>> =
            edges.iter().map(|(&k, h)| (k, h.map().to_vec())).collect();
        let functor =
            StalkFunctor::new(space, stalks.iter().map(FiniteGroup::order).collect(), &raw)?;
        let mut maps = BTreeMap::new();
        for x in 0..space.len() {
            for y in bits(space.up_set(x)) {
                let m = (0..stalks[x].order())
                    .map(|s| functor.apply(x, y, s))
                    .collect();
                maps.insert((x, y), Homomorphism::unchecked(m));
            }
        }
        let sets = Presheaf::from_functor(&functor);
        let mut sheaf = GroupSheaf {
            space: space.clone(),
            stalks,
            maps,
            sets,
            units: Vec::new(),
        };
        sheaf.units = (0..sheaf.sets.open_count())
            .map(|u| {
                let fam: Vec<u32> = bits(sheaf.sets.opens()[u])
                    .map(|x| sheaf.stalks[x].unit() as u32)
                    .collect();
                sheaf
                    .sets
                    .find_family(u, &fam)
                    .expect("unit family is compatible")
            })
            .collect();
        Ok(sheaf)
    }

    /// Locally constant functions to `group`.
    pub fn constant(space: &FinitePoset, group: &FiniteGroup) -> Self {
        let edges = space
            .covering_pairs()
            .into_iter()
            .map(|p| (p, Homomorphism::identity(group)))
            .collect();
        GroupSheaf::new(space, vec![group.clone(); space.len()], &edges)
            .expect("identity maps commute")
    }

    pub fn space(&self) -> &FinitePoset {
        &self.space
    }

    /// The underlying sheaf of sets.
    pub fn sets(&self) -> &Presheaf {
        &self.sets
    }

    pub fn stalk(&self, x: usize) -> &FiniteGroup {
        &self.stalks[x]
    }

    /// The stalk homomorphism for `x <= y`.
    pub fn stalk_map(&self, x: usize, y: usize) -> &Homomorphism {
        &self.maps[&(x, y)]
    }

    pub fn open_index(&self, mask: Mask) -> Result<usize> {
        self.sets.open_index(mask).ok_or_else(|| {
            Error::InvalidCover(format!("{} is not open", self.space.format_set(mask)))
        })
    }

    pub fn order(&self, u: usize) -> usize {
        self.sets.size(u)
    }

    pub fn unit(&self, u: usize) -> usize {
        self.units[u]
    }

    fn pointwise(&self, u: usize, f: impl Fn(usize, usize) -> usize) -> usize {
        let fam: Vec<u32> = bits(self.sets.opens()[u])
            .enumerate()
            .map(|(i, x)| f(i, x) as u32)
            .collect();
        self.sets
            .find_family(u, &fam)
            .expect("pointwise operations preserve compatibility")
    }

    pub fn mul(&self, u: usize, a: usize, b: usize) -> usize {
        let (fa, fb) = (
            self.sets.family(u, a).unwrap(),
            self.sets.family(u, b).unwrap(),
        );
        self.pointwise(u, |i, x| self.stalks[x].mul(fa[i] as usize, fb[i] as usize))
    }

    pub fn inv(&self, u: usize, a: usize) -> usize {
        let fa = self.sets.family(u, a).unwrap();
        self.pointwise(u, |i, x| self.stalks[x].inv(fa[i] as usize))
    }

    /// Value at `x ∈ U` of the section `a` over open `u`.
    pub fn germ(&self, u: usize, a: usize, x: usize) -> usize {
        let mask = self.sets.opens()[u];
        let pos = (mask & ((1u64 << x) - 1)).count_ones() as usize;
        self.sets.family(u, a).unwrap()[pos] as usize
    }

    /// The group of sections over open `u`, as a table.
    pub fn group(&self, u: usize) -> Result<FiniteGroup> {
        let n = self.order(u);
        if n > crate::groups::MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "{n} sections, too many to tabulate"
            )));
        }
        let table = (0..n)
            .map(|a| (0..n).map(|b| self.mul(u, a, b)).collect())
            .collect();
        FiniteGroup::from_table(
            (0..n)
                .map(|a| self.format_section(u, a))
                .collect::<Vec<_>>(),
            table,
        )
    }

    /// `a=e,b=(1 2)` style label of a section.
    pub fn format_section(&self, u: usize, a: usize) -> String {
        let fam = self.sets.family(u, a).unwrap();
        let parts: Vec<String> = bits(self.sets.opens()[u])
            .zip(fam)
            .map(|(x, &g)| {
                format!(
                    "{}={}",
                    self.space.label(x),
                    self.stalks[x].label(g as usize)
                )
            })
            .collect();
        parts.join(",")
    }
}

/// A sheaf of sets with a left action of a [`GroupSheaf`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Torsor {
    carrier: Presheaf,
    /// `action[u][g * |S(U)| + s]`.
    action: Vec<Vec<u32>>,
}

impl Torsor {
    /// Unchecked; see [`check_torsor`].
    pub fn new(carrier: Presheaf, action: Vec<Vec<usize>>) -> Self {
        Torsor {
            carrier,
            action: action
                .into_iter()
                .map(|a| a.into_iter().map(|x| x as u32).collect())
                .collect(),
        }
    }

    /// The group acting on itself by left multiplication.
    pub fn trivial(group: &GroupSheaf) -> Self {
        let n = group.sets.open_count();
        let action = (0..n)
            .map(|u| {
                let k = group.order(u);
                (0..k * k)
                    .map(|i| group.mul(u, i / k, i % k) as u32)
                    .collect()
            })
            .collect();
        Torsor {
            carrier: group.sets.clone(),
            action,
        }
    }

    /// The torsor whose stalk at `x` is the stalk group at `x`, with
    /// restriction `s ↦ ρ(s)·h_xy`.
    pub fn from_transitions(group: &GroupSheaf, t: &TransitionFunctor) -> Result<Self> {
        let space = &group.space;
        let edges: BTreeMap<(usize, usize), Vec<usize>> = space
            .covering_pairs()
            .into_iter()
            .map(|(x, y)| {
                let h = t.value(x, y);
                let rho = &group.maps[&(x, y)];
                let m = group.stalks[x]
                    .elements()
                    .map(|s| group.stalks[y].mul(rho.apply(s), h))
                    .collect();
                ((x, y), m)
            })
            .collect();
        let functor = StalkFunctor::new(
            space,
            group.stalks.iter().map(FiniteGroup::order).collect(),
            &edges,
        )?;
        let carrier = Presheaf::from_functor(&functor);
        let action = (0..carrier.open_count())
            .map(|u| {
                let k = carrier.size(u);
                let mut table = Vec::with_capacity(group.order(u) * k);
                for g in 0..group.order(u) {
                    let fg = group.sets.family(u, g).unwrap();
                    for s in 0..k {
                        let fs = carrier.family(u, s).unwrap();
                        let fam: Vec<u32> = bits(carrier.opens()[u])
                            .enumerate()
                            .map(|(i, x)| {
                                group.stalks[x].mul(fg[i] as usize, fs[i] as usize) as u32
                            })
                            .collect();
                        table.push(
                            carrier
                                .find_family(u, &fam)
                                .expect("action preserves sections")
                                as u32,
                        );
                    }
                }
                table
            })
            .collect();
        Ok(Torsor { carrier, action })
    }

    pub fn carrier(&self) -> &Presheaf {
        &self.carrier
    }

    #[inline]
    pub fn act(&self, u: usize, g: usize, s: usize) -> usize {
        self.action[u][g * self.carrier.size(u) + s] as usize
    }

    pub fn global_sections(&self) -> usize {
        self.carrier.size(self.carrier.open_count() - 1)
    }
}

/// Verifies the torsor axioms; the diagnostic names the first failing open
/// and condition.
pub fn check_torsor(group: &GroupSheaf, torsor: &Torsor) -> Check {
    let s = &torsor.carrier;
    let space = &group.space;
    if s.space().id() != space.id() {
        return Check::Fails("carrier lives on a different space".into());
    }
    if !is_sheaf(s) {
        return Check::Fails("carrier is not a sheaf".into());
    }
    let n = s.open_count();
    if torsor.action.len() != n {
        return Check::Fails("action tables missing".into());
    }
    for u in 0..n {
        let name = space.format_set(s.opens()[u]);
        if torsor.action[u].len() != group.order(u) * s.size(u)
            || torsor.action[u].iter().any(|&t| t as usize >= s.size(u))
        {
            return Check::Fails(format!("action table over {name} has the wrong shape"));
        }
        for a in 0..s.size(u) {
            if torsor.act(u, group.unit(u), a) != a {
                return Check::Fails(format!("unit does not act trivially over {name}"));
            }
            for g in 0..group.order(u) {
                for h in 0..group.order(u) {
                    if torsor.act(u, group.mul(u, g, h), a) != torsor.act(u, g, torsor.act(u, h, a))
                    {
                        return Check::Fails(format!("action over {name} is not associative"));
                    }
                }
            }
        }
        for v in 0..n {
            let (Some(rg), Some(rs)) = (group.sets.restriction(u, v), s.restriction(u, v)) else {
                continue;
            };
            for g in 0..group.order(u) {
                for a in 0..s.size(u) {
                    if rs[torsor.act(u, g, a)] as usize
                        != torsor.act(v, rg[g] as usize, rs[a] as usize)
                    {
                        return Check::Fails(format!(
                            "action does not commute with restriction from {name} to {}",
                            space.format_set(s.opens()[v])
                        ));
                    }
                }
            }
        }
    }
    let covered = (0..n)
        .filter(|&u| s.size(u) > 0)
        .fold(0u64, |m, u| m | s.opens()[u]);
    if covered != space.all() {
        return Check::Fails(format!(
            "axiom (1): no local sections near {}",
            space.format_set(space.all() & !covered)
        ));
    }
    for u in 0..n {
        let k = s.size(u);
        if k == 0 {
            continue;
        }
        let name = space.format_set(s.opens()[u]);
        if group.order(u) != k {
            return Check::Fails(format!(
                "axiom (2) over {name}: {} group elements act on {k} sections",
                group.order(u)
            ));
        }
        let mut seen = vec![false; k];
        for g in 0..group.order(u) {
            let t = torsor.act(u, g, 0);
            if seen[t] {
                return Check::Fails(format!("axiom (2) over {name}: action is not free"));
            }
            seen[t] = true;
        }
        // orbit of one element is everything and counts agree, so the
        // action is free and transitive everywhere on S(U)
        if (0..k).any(|a| {
            (0..group.order(u))
                .filter(|&g| torsor.act(u, g, a) == a)
                .count()
                != 1
        }) {
            return Check::Fails(format!("axiom (2) over {name}: action is not free"));
        }
    }
    Check::Holds
}

/// Transition data `h_xy ∈ G_y` for all `x <= y` of a torsor in stalk
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransitionFunctor {
    values: BTreeMap<(usize, usize), usize>,
}

impl TransitionFunctor {
    /// From values on the covering pairs; composites must agree.
    pub fn from_edges(group: &GroupSheaf, edges: &BTreeMap<(usize, usize), usize>) -> Result<Self> {
        let space = &group.space;
        let covering = space.covering_pairs();
        for &(x, y) in &covering {
            match edges.get(&(x, y)) {
                Some(&h) if h < group.stalks[y].order() => {}
                _ => {
                    return Err(Error::InvalidTorsor(format!(
                        "no valid transition along {} <= {}",
                        space.label(x),
                        space.label(y)
                    )))
                }
            }
        }
        Self::extend(group, &covering, |x, y| edges[&(x, y)]).ok_or_else(|| {
            Error::InvalidTorsor("transitions along different chains disagree".into())
        })
    }

    fn extend(
        group: &GroupSheaf,
        covering: &[(usize, usize)],
        edge: impl Fn(usize, usize) -> usize,
    ) -> Option<Self> {
        let space = &group.space;
        let mut values = BTreeMap::new();
        for x in 0..space.len() {
            values.insert((x, x), group.stalks[x].unit());
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for x in 0..space.len() {
            for y in bits(space.up_set(x)) {
                if x != y {
                    pairs.push((x, y));
                }
            }
        }
        pairs.sort_by_key(|&(x, y)| (space.up_set(x) & space.down_set(y)).count_ones());
        for (x, y) in pairs {
            let mut found = None;
            for &(a, z) in covering {
                if a != x || !space.leq(z, y) {
                    continue;
                }
                let h = group.stalks[y].mul(group.maps[&(z, y)].apply(edge(x, z)), values[&(z, y)]);
                match found {
                    None => found = Some(h),
                    Some(f) if f != h => return None,
                    _ => {}
                }
            }
            values.insert((x, y), found?);
        }
        Some(TransitionFunctor { values })
    }

    /// Transitions of an arbitrary torsor, using the first element of each
    /// stalk as base point.
    pub fn of_torsor(group: &GroupSheaf, torsor: &Torsor) -> Result<Self> {
        let s = &torsor.carrier;
        let space = &group.space;
        let mut edges = BTreeMap::new();
        for (x, y) in space.covering_pairs() {
            let (mx, my) = (s.minimal_index(x), s.minimal_index(y));
            if s.size(mx) == 0 || s.size(my) == 0 {
                return Err(Error::InvalidTorsor(format!(
                    "empty stalk at {}",
                    space.label(x)
                )));
            }
            let image = s.restrict(mx, my, 0);
            let h = (0..group.order(my))
                .find(|&g| torsor.act(my, g, 0) == image)
                .ok_or_else(|| {
                    Error::InvalidTorsor(format!("stalk at {} is not transitive", space.label(y)))
                })?;
            edges.insert((x, y), group.germ(my, h, y));
        }
        TransitionFunctor::from_edges(group, &edges)
    }

    pub fn value(&self, x: usize, y: usize) -> usize {
        self.values[&(x, y)]
    }

    /// Values on the covering pairs, in their canonical order.
    pub fn edge_values(&self, space: &FinitePoset) -> Vec<usize> {
        space
            .covering_pairs()
            .into_iter()
            .map(|p| self.values[&p])
            .collect()
    }

    /// `h'_xy = ρ(f_x)⁻¹ h_xy f_y`, the transitions after changing base
    /// points by `f`.
    pub fn gauge(&self, group: &GroupSheaf, f: &[usize]) -> Self {
        let values = self
            .values
            .iter()
            .map(|(&(x, y), &h)| {
                let gy = &group.stalks[y];
                let r = gy.inv(group.maps[&(x, y)].apply(f[x]));
                ((x, y), gy.mul(gy.mul(r, h), f[y]))
            })
            .collect();
        TransitionFunctor { values }
    }
}

/// Isomorphism classes of torsors found by enumerating every transition
/// functor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsorClasses {
    /// Number of transition functors, which is the number of torsors with
    /// stalks identified with the stalk groups.
    pub functors: usize,
    /// The least functor of each class, in order.
    pub classes: Vec<TransitionFunctor>,
}

pub fn classify_torsors(group: &GroupSheaf, budget: &Budget) -> Result<TorsorClasses> {
    let space = &group.space;
    let covering = space.covering_pairs();
    let radix: Vec<usize> = covering
        .iter()
        .map(|&(_, y)| group.stalks[y].order())
        .collect();
    budget.check(
        "enumerating transition functors",
        product(radix.iter().copied()),
    )?;
    let mut all: Vec<(Vec<usize>, TransitionFunctor)> = Vec::new();
    let mut digits = vec![0usize; radix.len()];
    loop {
        let lookup: BTreeMap<(usize, usize), usize> = covering
            .iter()
            .copied()
            .zip(digits.iter().copied())
            .collect();
        if let Some(t) = TransitionFunctor::extend(group, &covering, |x, y| lookup[&(x, y)]) {
            all.push((digits.clone(), t));
        }
        if !odometer(&mut digits, &radix) {
            break;
        }
    }
    let gauge_radix: Vec<usize> = group.stalks.iter().map(FiniteGroup::order).collect();
    budget.check(
        "gauge orbits of transition functors",
        product(gauge_radix.iter().copied()),
    )?;
    let mut seen = vec![false; all.len()];
    let mut classes = Vec::new();
    for i in 0..all.len() {
        if seen[i] {
            continue;
        }
        classes.push(all[i].1.clone());
        let mut f = vec![0usize; gauge_radix.len()];
        loop {
            let image = all[i].1.gauge(group, &f).edge_values(space);
            let j = all
                .binary_search_by(|(d, _)| d.cmp(&image))
                .map_err(|_| Error::Internal("gauge image is not a transition functor".into()))?;
            seen[j] = true;
            if !odometer(&mut f, &gauge_radix) {
                break;
            }
        }
    }
    Ok(TorsorClasses {
        functors: all.len(),
        classes,
    })
}

/// Advances a mixed-radix counter, last digit fastest. Returns false after
/// the last value.
pub(crate) fn odometer(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Searches all equivariant maps `S → T`; any one found is an isomorphism.
/// An equivariant map is fixed by where it sends the first element of each
/// stalk, so those images are what the search ranges over.
pub fn torsor_isomorphism(
    group: &GroupSheaf,
    s: &Torsor,
    t: &Torsor,
    budget: &Budget,
) -> Result<Option<Morphism>> {
    let space = &group.space;
    let (ps, pt) = (&s.carrier, &t.carrier);
    if ps.space().id() != space.id() || pt.space().id() != space.id() {
        return Err(Error::MismatchedSpaces);
    }
    let n = space.len();
    let mins: Vec<usize> = (0..n).map(|x| ps.minimal_index(x)).collect();
    if (0..n).any(|x| ps.size(mins[x]) == 0 || pt.size(mins[x]) == 0) {
        return Err(Error::InvalidTorsor("empty stalk".into()));
    }
    // k_xy with ρ^S(e_x) = k_xy·e_y
    let base_shift = |x: usize, y: usize| -> usize {
        let image = ps.restrict(mins[x], mins[y], 0);
        (0..group.order(mins[y]))
            .find(|&g| s.act(mins[y], g, 0) == image)
            .expect("free transitive stalk")
    };
    let covering = space.covering_pairs();
    let shifts: BTreeMap<(usize, usize), usize> = covering
        .iter()
        .map(|&(x, y)| ((x, y), base_shift(x, y)))
        .collect();
    let mut counter = budget.counter("searching torsor isomorphisms");
    let mut choice = vec![0usize; n];
    // images t_x of e_x; visit points top down so constraints from x to
    // larger y can be checked as soon as x is chosen
    let order: Vec<usize> = (0..n).rev().collect();
    fn search(
        depth: usize,
        order: &[usize],
        choice: &mut Vec<usize>,
        ok: &dyn Fn(usize, &[usize]) -> bool,
        sizes: &[usize],
        counter: &mut crate::budget::Counter,
    ) -> Result<bool> {
        if depth == order.len() {
            return Ok(true);
        }
        let x = order[depth];
        for c in 0..sizes[x] {
            counter.tick()?;
            choice[x] = c;
            if ok(x, choice) && search(depth + 1, order, choice, ok, sizes, counter)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let sizes: Vec<usize> = (0..n).map(|x| pt.size(mins[x])).collect();
    let ok = |x: usize, choice: &[usize]| -> bool {
        covering.iter().filter(|&&(a, _)| a == x).all(|&(_, y)| {
            // φ_y(ρ^S(e_x)) = k·t_y must equal ρ^T(t_x)
            pt.restrict(mins[x], mins[y], choice[x]) == t.act(mins[y], shifts[&(x, y)], choice[y])
        })
    };
    if !search(0, &order, &mut choice, &ok, &sizes, &mut counter)? {
        return Ok(None);
    }
    // φ_x(g·e_x) = g·t_x, extended to all opens through germs
    let stalk_map = |x: usize, a: usize| -> usize {
        let g = (0..group.order(mins[x]))
            .find(|&g| s.act(mins[x], g, 0) == a)
            .expect("transitive stalk");
        t.act(mins[x], g, choice[x])
    };
    let mut comps = Vec::with_capacity(ps.open_count());
    for u in 0..ps.open_count() {
        let pts: Vec<usize> = bits(ps.opens()[u]).collect();
        let germs_t: Vec<Vec<usize>> = (0..pt.size(u))
            .map(|b| pts.iter().map(|&x| pt.restrict(u, mins[x], b)).collect())
            .collect();
        let mut comp = Vec::with_capacity(ps.size(u));
        for a in 0..ps.size(u) {
            let want: Vec<usize> = pts
                .iter()
                .map(|&x| stalk_map(x, ps.restrict(u, mins[x], a)))
                .collect();
            let b = germs_t
                .iter()
                .position(|g| *g == want)
                .ok_or_else(|| Error::Internal("equivariant map does not glue".into()))?;
            comp.push(b);
        }
        comps.push(comp);
    }
    let m = Morphism::new(comps);
    if !m.is_isomorphism(ps, pt) {
        return Err(Error::Internal(
            "equivariant map is not an isomorphism".into(),
        ));
    }
    Ok(Some(m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    Constant(FiniteGroup),
    Sheaf {
        sheaf: GroupSheaf,
        opens: BTreeMap<Mask, usize>,
    },
}

/// Groups attached to the inhabited simplices of a nerve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechCoefficients {
    nerve: AbstractNerve,
    source: Source,
    id: u64,
}

impl CechCoefficients {
    /// A constant group: over a simplex whose intersection has `k`
    /// components the group is `G^k`. Abstract simplices flagged as
    /// disconnected are rejected.
    pub fn constant(nerve: &AbstractNerve, group: &FiniteGroup) -> Result<Self> {
        nerve.require_connected_cells()?;
        for size in 1..=nerve.depth() {
            for &s in nerve.simplices(size) {
                let k = nerve.component_count(s) as u32;
                if (group.order() as u128)
                    .checked_pow(k)
                    .map_or(true, |n| n > u32::MAX as u128)
                {
                    return Err(Error::InvalidGroup(format!(
                        "{} components over {} make the coefficient group too large",
                        k,
                        nerve.format_simplex(s)
                    )));
                }
            }
        }
        let mut h = Fnv::new();
        h.u64(nerve.id());
        for l in group.labels() {
            h.bytes(l.as_bytes());
            h.bytes(&[0]);
        }
        Ok(CechCoefficients {
            nerve: nerve.clone(),
            source: Source::Constant(group.clone()),
            id: h.finish(),
        })
    }

    /// Sections of `sheaf` over the intersections of the cover the nerve was
    /// computed from.
    pub fn sheaf(nerve: &AbstractNerve, sheaf: &GroupSheaf) -> Result<Self> {
        let base = nerve.base().ok_or_else(|| {
            Error::InvalidNerve("sheaf coefficients need a nerve computed from a cover".into())
        })?;
        if base.space.id() != sheaf.space.id() {
            return Err(Error::MismatchedSpaces);
        }
        let mut opens = BTreeMap::new();
        for size in 1..=nerve.depth() {
            for &s in nerve.simplices(size) {
                opens.insert(s, sheaf.open_index(base.cover.intersection(s))?);
            }
        }
        let mut h = Fnv::new();
        h.u64(nerve.id());
        h.u64(0x5eaf);
        for x in 0..sheaf.space.len() {
            for l in sheaf.stalks[x].labels() {
                h.bytes(l.as_bytes());
            }
        }
        for m in sheaf.maps.values() {
            for &v in m.map() {
                h.u64(v as u64);
            }
        }
        Ok(CechCoefficients {
            nerve: nerve.clone(),
            source: Source::Sheaf {
                sheaf: sheaf.clone(),
                opens,
            },
            id: h.finish(),
        })
    }

    pub fn nerve(&self) -> &AbstractNerve {
        &self.nerve
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn constant_group(&self) -> Option<&FiniteGroup> {
        match &self.source {
            Source::Constant(g) => Some(g),
            Source::Sheaf { .. } => None,
        }
    }

    pub fn group_sheaf(&self) -> Option<&GroupSheaf> {
        match &self.source {
            Source::Constant(_) => None,
            Source::Sheaf { sheaf, .. } => Some(sheaf),
        }
    }

    /// Open index of the intersection over `simplex`, in sheaf mode.
    pub fn open_of(&self, simplex: Mask) -> Option<usize> {
        match &self.source {
            Source::Sheaf { opens, .. } => opens.get(&simplex).copied(),
            Source::Constant(_) => None,
        }
    }

    fn decode(&self, g: &FiniteGroup, simplex: Mask, a: usize) -> Vec<usize> {
        let k = self.nerve.component_count(simplex);
        let n = g.order();
        let mut out = vec![0; k];
        let mut a = a;
        for c in (0..k).rev() {
            out[c] = a % n;
            a /= n;
        }
        out
    }

    fn encode(g: &FiniteGroup, parts: &[usize]) -> usize {
        parts.iter().fold(0, |acc, &p| acc * g.order() + p)
    }

    pub fn order(&self, simplex: Mask) -> usize {
        match &self.source {
            Source::Constant(g) => g.order().pow(self.nerve.component_count(simplex) as u32),
            Source::Sheaf { sheaf, opens } => sheaf.order(opens[&simplex]),
        }
    }

    pub fn unit(&self, simplex: Mask) -> usize {
        match &self.source {
            Source::Constant(g) => {
                Self::encode(g, &vec![g.unit(); self.nerve.component_count(simplex)])
            }
            Source::Sheaf { sheaf, opens } => sheaf.unit(opens[&simplex]),
        }
    }

    pub fn mul(&self, simplex: Mask, a: usize, b: usize) -> usize {
        match &self.source {
            Source::Constant(g) => {
                if self.nerve.component_count(simplex) == 1 {
                    return g.mul(a, b);
                }
                let (x, y) = (self.decode(g, simplex, a), self.decode(g, simplex, b));
                let z: Vec<usize> = x.iter().zip(&y).map(|(&p, &q)| g.mul(p, q)).collect();
                Self::encode(g, &z)
            }
            Source::Sheaf { sheaf, opens } => sheaf.mul(opens[&simplex], a, b),
        }
    }

    pub fn inv(&self, simplex: Mask, a: usize) -> usize {
        match &self.source {
            Source::Constant(g) => {
                if self.nerve.component_count(simplex) == 1 {
                    return g.inv(a);
                }
                let x: Vec<usize> = self
                    .decode(g, simplex, a)
                    .iter()
                    .map(|&p| g.inv(p))
                    .collect();
                Self::encode(g, &x)
            }
            Source::Sheaf { sheaf, opens } => sheaf.inv(opens[&simplex], a),
        }
    }

    /// Restriction from the intersection over `face` to the smaller one over
    /// `simplex ⊇ face`.
    pub fn restrict(&self, face: Mask, simplex: Mask, a: usize) -> usize {
        if face == simplex {
            return a;
        }
        match &self.source {
            Source::Constant(g) => {
                let k = self.nerve.component_count(simplex);
                if k == 1 && self.nerve.component_count(face) == 1 {
                    return a;
                }
                let x = self.decode(g, face, a);
                let y: Vec<usize> = (0..k)
                    .map(|c| x[self.nerve.face_component(simplex, c, face)])
                    .collect();
                Self::encode(g, &y)
            }
            Source::Sheaf { sheaf, opens } => sheaf.sets.restrict(opens[&face], opens[&simplex], a),
        }
    }

    pub fn format(&self, simplex: Mask, a: usize) -> String {
        match &self.source {
            Source::Constant(g) => {
                let parts: Vec<&str> = self
                    .decode(g, simplex, a)
                    .iter()
                    .map(|&p| g.label(p))
                    .collect();
                parts.join("|")
            }
            Source::Sheaf { sheaf, opens } => sheaf.format_section(opens[&simplex], a),
        }
    }

    /// Inverse of [`format`](Self::format).
    pub fn parse(&self, simplex: Mask, text: &str) -> Result<usize> {
        if let Source::Constant(g) = &self.source {
            let parts: Vec<&str> = text.split('|').map(str::trim).collect();
            if parts.len() == self.nerve.component_count(simplex) {
                let idx = parts
                    .iter()
                    .map(|p| g.element(p))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Self::encode(g, &idx));
            }
        }
        (0..self.order(simplex))
            .find(|&a| self.format(simplex, a) == text)
            .ok_or_else(|| {
                Error::UnknownElement(format!(
                    "`{text}` over {}",
                    self.nerve.format_simplex(simplex)
                ))
            })
    }
}

/// Values `g_αβ` on the inhabited pairs `α < β`, in canonical simplex order.
/// `g_αα = 1` and `g_βα = g_αβ⁻¹` are implied.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cocycle1 {
    coefficients: u64,
    values: Vec<usize>,
}

impl Cocycle1 {
    /// Validates ranges and the cocycle identity.
    pub fn new(c: &CechCoefficients, values: Vec<usize>) -> Result<Self> {
        let pairs = c.nerve.simplices(2);
        if values.len() != pairs.len() {
            return Err(Error::InvalidCocycle(format!(
                "{} values for {} inhabited pairs",
                values.len(),
                pairs.len()
            )));
        }
        for (&s, &v) in pairs.iter().zip(&values) {
            if v >= c.order(s) {
                return Err(Error::UnknownElement(format!(
                    "value #{v} on {}",
                    c.nerve.format_simplex(s)
                )));
            }
        }
        let g = Cocycle1 {
            coefficients: c.id,
            values,
        };
        if let Check::Fails(m) = check_cocycle1(c, &g) {
            return Err(Error::InvalidCocycle(m));
        }
        Ok(g)
    }

    pub fn unit(c: &CechCoefficients) -> Self {
        Cocycle1 {
            coefficients: c.id,
            values: c.nerve.simplices(2).iter().map(|&s| c.unit(s)).collect(),
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `g_αβ` for `α < β`.
    pub fn value(&self, c: &CechCoefficients, alpha: usize, beta: usize) -> usize {
        let m = 1u64 << alpha | 1u64 << beta;
        let i = c
            .nerve
            .simplices(2)
            .iter()
            .position(|&s| s == m)
            .expect("inhabited pair");
        self.values[i]
    }

    pub fn format(&self, c: &CechCoefficients) -> String {
        let parts: Vec<String> = c
            .nerve
            .simplices(2)
            .iter()
            .zip(&self.values)
            .map(|(&s, &v)| format!("{}={}", c.nerve.format_simplex(s), c.format(s, v)))
            .collect();
        parts.join(" ")
    }

    fn require(&self, c: &CechCoefficients) -> Result<()> {
        if self.coefficients != c.id {
            return Err(Error::MismatchedCovers);
        }
        Ok(())
    }
}

fn pair_positions(c: &CechCoefficients) -> BTreeMap<Mask, usize> {
    c.nerve
        .simplices(2)
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect()
}

/// `g_αβ g_βγ = g_αγ` on every inhabited triple.
pub fn check_cocycle1(c: &CechCoefficients, g: &Cocycle1) -> Check {
    if g.coefficients != c.id {
        return Check::Fails("cocycle belongs to different coefficients".into());
    }
    if c.nerve.depth() < 3 {
        return Check::Fails("nerve needs depth 3 for the cocycle identity".into());
    }
    let pos = pair_positions(c);
    for &t in c.nerve.simplices(3) {
        if let Some(m) = triple_failure(c, &pos, &g.values, t) {
            return Check::Fails(m);
        }
    }
    Check::Holds
}

fn triple_failure(
    c: &CechCoefficients,
    pos: &BTreeMap<Mask, usize>,
    values: &[usize],
    t: Mask,
) -> Option<String> {
    let ix = simplex_indices(t);
    let (a, b, d) = (ix[0], ix[1], ix[2]);
    let e = |i: usize, j: usize| {
        let s = 1u64 << i | 1u64 << j;
        c.restrict(s, t, values[pos[&s]])
    };
    if c.mul(t, e(a, b), e(b, d)) != e(a, d) {
        Some(format!(
            "cocycle identity fails on {}",
            c.nerve.format_simplex(t)
        ))
    } else {
        None
    }
}

/// Number of branches the enumeration of 1-cocycles splits into; see
/// [`cocycles1_in_branch`].
pub fn cocycle1_branches(c: &CechCoefficients) -> usize {
    c.nerve.simplices(2).first().map_or(1, |&s| c.order(s))
}

/// Cocycles whose first value is `branch`, in lexicographic order.
/// Concatenating all branches gives [`enumerate_cocycles1`].
pub fn cocycles1_in_branch(
    c: &CechCoefficients,
    branch: usize,
    budget: &Budget,
) -> Result<Vec<Cocycle1>> {
    if c.nerve.depth() < 3 {
        return Err(Error::InvalidNerve(
            "1-cocycles need a nerve of depth 3".into(),
        ));
    }
    let pairs = c.nerve.simplices(2).to_vec();
    let pos = pair_positions(c);
    // triples become checkable once their last pair is assigned
    let mut due: Vec<Vec<Mask>> = vec![Vec::new(); pairs.len()];
    for &t in c.nerve.simplices(3) {
        let last = bits(t)
            .flat_map(|i| bits(t).filter(move |&j| j > i).map(move |j| (i, j)))
            .map(|(i, j)| pos[&(1u64 << i | 1u64 << j)])
            .max()
            .unwrap();
        due[last].push(t);
    }
    let mut counter = budget.counter("enumerating 1-cocycles");
    let mut out = Vec::new();
    if pairs.is_empty() {
        if branch == 0 {
            out.push(Cocycle1::unit(c));
        }
        return Ok(out);
    }
    let mut values = vec![0usize; pairs.len()];
    fn go(
        i: usize,
        c: &CechCoefficients,
        pairs: &[Mask],
        pos: &BTreeMap<Mask, usize>,
        due: &[Vec<Mask>],
        values: &mut Vec<usize>,
        out: &mut Vec<Cocycle1>,
        counter: &mut crate::budget::Counter,
        branch: usize,
    ) -> Result<()> {
        if i == pairs.len() {
            out.push(Cocycle1 {
                coefficients: c.id,
                values: values.clone(),
            });
            return Ok(());
        }
        let range = if i == 0 {
            branch..branch + 1
        } else {
            0..c.order(pairs[i])
        };
        for v in range {
            counter.tick()?;
            values[i] = v;
            if due[i]
                .iter()
                .all(|&t| triple_failure(c, pos, values, t).is_none())
            {
                go(i + 1, c, pairs, pos, due, values, out, counter, branch)?;
            }
        }
        Ok(())
    }
    go(
        0,
        c,
        &pairs,
        &pos,
        &due,
        &mut values,
        &mut out,
        &mut counter,
        branch,
    )?;
    Ok(out)
}

/// All 1-cocycles in lexicographic order of their values.
pub fn enumerate_cocycles1(c: &CechCoefficients, budget: &Budget) -> Result<Vec<Cocycle1>> {
    let mut out = Vec::new();
    for b in 0..cocycle1_branches(c) {
        out.extend(cocycles1_in_branch(c, b, budget)?);
    }
    Ok(out)
}

/// `h_αβ = f_α g_αβ f_β⁻¹`.
pub fn gauge1(c: &CechCoefficients, g: &Cocycle1, f: &[usize]) -> Cocycle1 {
    let values = c
        .nerve
        .simplices(2)
        .iter()
        .zip(&g.values)
        .map(|(&s, &v)| {
            let ix = simplex_indices(s);
            let fa = c.restrict(1u64 << ix[0], s, f[ix[0]]);
            let fb = c.restrict(1u64 << ix[1], s, f[ix[1]]);
            c.mul(s, c.mul(s, fa, v), c.inv(s, fb))
        })
        .collect();
    Cocycle1 {
        coefficients: c.id,
        values,
    }
}

/// The lexicographically first `{f_α}` with `f_α g_αβ = h_αβ f_β`, if any.
pub fn cocycles1_equivalent(
    c: &CechCoefficients,
    g: &Cocycle1,
    h: &Cocycle1,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    g.require(c)?;
    h.require(c)?;
    let n = c.nerve.len();
    let pos = pair_positions(c);
    let mut counter = budget.counter("searching 1-cocycle equivalences");
    let mut f = vec![0usize; n];
    fn go(
        i: usize,
        c: &CechCoefficients,
        pos: &BTreeMap<Mask, usize>,
        g: &Cocycle1,
        h: &Cocycle1,
        f: &mut Vec<usize>,
        counter: &mut crate::budget::Counter,
    ) -> Result<bool> {
        let n = f.len();
        if i == n {
            return Ok(true);
        }
        for v in 0..c.order(1u64 << i) {
            counter.tick()?;
            f[i] = v;
            let ok = (0..i).all(|a| {
                let s = 1u64 << a | 1u64 << i;
                match pos.get(&s) {
                    None => true,
                    Some(&p) => {
                        let fa = c.restrict(1u64 << a, s, f[a]);
                        let fb = c.restrict(1u64 << i, s, f[i]);
                        c.mul(s, fa, g.values[p]) == c.mul(s, h.values[p], fb)
                    }
                }
            });
            if ok && go(i + 1, c, pos, g, h, f, counter)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    Ok(if go(0, c, &pos, g, h, &mut f, &mut counter)? {
        Some(f)
    } else {
        None
    })
}

/// A class in H¹ with its least representative and its number of cocycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class1 {
    pub representative: Cocycle1,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1 {
    pub cocycles: usize,
    pub classes: Vec<Class1>,
}

/// Partitions sorted cocycles into gauge orbits.
pub fn classify_cocycles1(
    c: &CechCoefficients,
    cocycles: &[Cocycle1],
    budget: &Budget,
) -> Result<H1> {
    let radix: Vec<usize> = (0..c.nerve.len()).map(|i| c.order(1u64 << i)).collect();
    budget.check("gauge orbits of 1-cocycles", product(radix.iter().copied()))?;
    let mut seen = vec![false; cocycles.len()];
    let mut classes = Vec::new();
    for i in 0..cocycles.len() {
        if seen[i] {
            continue;
        }
        let mut size = 0;
        let mut f = vec![0usize; radix.len()];
        loop {
            let image = gauge1(c, &cocycles[i], &f);
            let j = cocycles
                .binary_search(&image)
                .map_err(|_| Error::Internal("gauge image is not a cocycle".into()))?;
            if !seen[j] {
                seen[j] = true;
                size += 1;
            }
            if !odometer(&mut f, &radix) {
                break;
            }
        }
        classes.push(Class1 {
            representative: cocycles[i].clone(),
            size,
        });
    }
    Ok(H1 {
        cocycles: cocycles.len(),
        classes,
    })
}

pub fn h1(c: &CechCoefficients, budget: &Budget) -> Result<H1> {
    let all = enumerate_cocycles1(c, budget)?;
    classify_cocycles1(c, &all, budget)
}

/// Coefficients of a group sheaf on the cover of the whole space by minimal
/// opens, which refines every cover.
pub fn finest_coefficients(sheaf: &GroupSheaf) -> Result<CechCoefficients> {
    let space = &sheaf.space;
    let cover = crate::space::Cover::minimal(space, space.whole())?;
    let nerve = crate::space::nerve(space, &cover, 3)?;
    CechCoefficients::sheaf(&nerve, sheaf)
}

/// H¹ of the whole space, computed on the finest cover.
pub fn h1_colim(sheaf: &GroupSheaf, budget: &Budget) -> Result<H1> {
    h1(&finest_coefficients(sheaf)?, budget)
}

/// The torsor glued from `∐ G|U_α` along the cocycle.
pub fn cocycle_to_torsor(c: &CechCoefficients, g: &Cocycle1) -> Result<Torsor> {
    g.require(c)?;
    if let Check::Fails(m) = check_cocycle1(c, g) {
        return Err(Error::InvalidCocycle(m));
    }
    let sheaf = c
        .group_sheaf()
        .ok_or_else(|| Error::InvalidNerve("torsors need sheaf coefficients on a cover".into()))?;
    let base = c.nerve.base().unwrap();
    let space = &sheaf.space;
    if base.cover.of().members() != space.all() {
        return Err(Error::InvalidCover(
            "cover must be of the whole space".into(),
        ));
    }
    let chart: Vec<usize> = (0..space.len())
        .map(|x| {
            (0..base.cover.len())
                .find(|&a| base.cover.member(a).contains(x))
                .unwrap()
        })
        .collect();
    // germ at y of g_{αβ} with the implied values for α >= β
    let germ = |a: usize, b: usize, y: usize| -> usize {
        let gy = &sheaf.stalks[y];
        if a == b {
            return gy.unit();
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let s = 1u64 << lo | 1u64 << hi;
        let v = sheaf.germ(c.open_of(s).unwrap(), g.value(c, lo, hi), y);
        if a < b {
            v
        } else {
            gy.inv(v)
        }
    };
    let edges: BTreeMap<(usize, usize), usize> = space
        .covering_pairs()
        .into_iter()
        .map(|(x, y)| ((x, y), germ(chart[x], chart[y], y)))
        .collect();
    let t = TransitionFunctor::from_edges(sheaf, &edges)
        .map_err(|_| Error::Internal("cocycle gave inconsistent transitions".into()))?;
    Torsor::from_transitions(sheaf, &t)
}

/// The cocycle `g_αβ` with `g_αβ·s_β = s_α` on `U_αβ`, for sections
/// `s_α ∈ S(U_α)`.
pub fn torsor_to_cocycle(
    c: &CechCoefficients,
    torsor: &Torsor,
    sections: &[usize],
) -> Result<Cocycle1> {
    let sheaf = c
        .group_sheaf()
        .ok_or_else(|| Error::InvalidNerve("torsors need sheaf coefficients on a cover".into()))?;
    let s = &torsor.carrier;
    if s.space().id() != sheaf.space.id() {
        return Err(Error::MismatchedSpaces);
    }
    let n = c.nerve.len();
    if sections.len() != n {
        return Err(Error::MissingData(format!(
            "{} sections for {n} cover members",
            sections.len()
        )));
    }
    for a in 0..n {
        let u = c.open_of(1u64 << a).unwrap();
        if s.size(u) == 0 {
            return Err(Error::NotTrivializing(format!(
                "no sections over {}",
                c.nerve.label(a)
            )));
        }
        if sections[a] >= s.size(u) {
            return Err(Error::UnknownElement(format!(
                "section #{} over {}",
                sections[a],
                c.nerve.label(a)
            )));
        }
    }
    let mut values = Vec::new();
    for &p in c.nerve.simplices(2) {
        let ix = simplex_indices(p);
        let w = c.open_of(p).unwrap();
        let sa = s.restrict(c.open_of(1u64 << ix[0]).unwrap(), w, sections[ix[0]]);
        let sb = s.restrict(c.open_of(1u64 << ix[1]).unwrap(), w, sections[ix[1]]);
        let g = (0..sheaf.order(w))
            .find(|&g| torsor.act(w, g, sb) == sa)
            .ok_or_else(|| {
                Error::InvalidTorsor(format!(
                    "action over {} is not transitive",
                    c.nerve.format_simplex(p)
                ))
            })?;
        values.push(g);
    }
    Cocycle1::new(c, values).map_err(|e| Error::Internal(format!("torsor cocycle: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{nerve, Cover};

    fn pseudo(g: &FiniteGroup) -> (GroupSheaf, CechCoefficients) {
        let s = GroupSheaf::constant(&FinitePoset::pseudo_circle(), g);
        let c = finest_coefficients(&s).unwrap();
        (s, c)
    }

    #[test]
    fn triangle_h1_counts() {
        let n = AbstractNerve::triangle();
        let b = Budget::default();
        let z2 = CechCoefficients::constant(&n, &FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(h1(&z2, &b).unwrap().classes.len(), 2);
        let s3 = CechCoefficients::constant(&n, &FiniteGroup::symmetric(3)).unwrap();
        assert_eq!(h1(&s3, &b).unwrap().classes.len(), 3);
    }

    #[test]
    fn pseudo_circle_h1_and_torsors_agree() {
        let b = Budget::default();
        for (g, k) in [(FiniteGroup::cyclic(2), 2), (FiniteGroup::cyclic(3), 3)] {
            let (s, c) = pseudo(&g);
            assert_eq!(h1(&c, &b).unwrap().classes.len(), k);
            assert_eq!(classify_torsors(&s, &b).unwrap().classes.len(), k);
        }
    }

    #[test]
    fn discrete_space_has_trivial_h1() {
        let x = FinitePoset::discrete(&["p", "q"]).unwrap();
        let s = GroupSheaf::constant(&x, &FiniteGroup::symmetric(3));
        assert_eq!(h1_colim(&s, &Budget::default()).unwrap().classes.len(), 1);
    }

    #[test]
    fn trivial_torsor_checks_and_round_trips() {
        let (s, c) = pseudo(&FiniteGroup::cyclic(2));
        let t = Torsor::trivial(&s);
        assert!(check_torsor(&s, &t).holds());
        let units: Vec<usize> = (0..c.nerve().len())
            .map(|a| s.unit(c.open_of(1 << a).unwrap()))
            .collect();
        let g = torsor_to_cocycle(&c, &t, &units).unwrap();
        assert_eq!(g, Cocycle1::unit(&c));
    }

    #[test]
    fn nontrivial_cocycle_gives_torsor_without_global_section() {
        let b = Budget::default();
        let (s, c) = pseudo(&FiniteGroup::cyclic(2));
        let h = h1(&c, &b).unwrap();
        let rep = &h.classes[1].representative;
        let t = cocycle_to_torsor(&c, rep).unwrap();
        assert!(check_torsor(&s, &t).holds());
        assert_eq!(t.global_sections(), 0);
        let back = torsor_to_cocycle(&c, &t, &vec![0; c.nerve().len()]).unwrap();
        assert!(cocycles1_equivalent(&c, &back, rep, &b).unwrap().is_some());
        assert!(cocycles1_equivalent(&c, &back, &Cocycle1::unit(&c), &b)
            .unwrap()
            .is_none());
        assert!(torsor_isomorphism(&s, &t, &Torsor::trivial(&s), &b)
            .unwrap()
            .is_none());
    }

    #[test]
    fn empty_carrier_fails_axiom_one() {
        let x = FinitePoset::discrete(&["p"]).unwrap();
        let s = GroupSheaf::constant(&x, &FiniteGroup::cyclic(2));
        let n = x.open_masks().len();
        let sizes: Vec<usize> = x.open_masks().iter().map(|&m| (m == 0) as usize).collect();
        let carrier = Presheaf::new(&x, sizes, |_, _, _| 0).unwrap();
        let action = (0..n)
            .map(|u| vec![0; s.order(u) * carrier.size(u)])
            .collect();
        let c = check_torsor(&s, &Torsor::new(carrier, action));
        assert!(c.diagnostic().unwrap().contains("axiom (1)"));
    }

    #[test]
    fn non_free_action_detected() {
        let x = FinitePoset::discrete(&["p"]).unwrap();
        let s = GroupSheaf::constant(&x, &FiniteGroup::cyclic(2));
        let t = Torsor::trivial(&s);
        // everything acts trivially
        let action = (0..t.carrier().open_count())
            .map(|u| {
                (0..s.order(u) * t.carrier().size(u))
                    .map(|i| i % t.carrier().size(u))
                    .collect()
            })
            .collect();
        let bad = Torsor::new(t.carrier().clone(), action);
        assert!(!check_torsor(&s, &bad).holds());
    }

    #[test]
    fn coarse_cover_cocycles() {
        let x = FinitePoset::pseudo_circle();
        let cover = Cover::new(
            &x,
            x.whole(),
            vec![
                ("U", x.open_of(&["c", "a", "b"]).unwrap()),
                ("V", x.open_of(&["d", "a", "b"]).unwrap()),
            ],
        )
        .unwrap();
        let n = nerve(&x, &cover, 3).unwrap();
        let c = CechCoefficients::constant(&n, &FiniteGroup::cyclic(2)).unwrap();
        // U∩V has two components, so G² on the pair and G² gauge
        assert_eq!(c.order(0b11), 4);
        assert_eq!(h1(&c, &Budget::default()).unwrap().classes.len(), 2);
    }
}
