//! Finite groupoids in normal form, and functors between them.
//!
//! Each connected component has a base object and a vertex group, and every
//! other object `x` of the component comes with a chosen arrow
//! `t_x: base → x` (`t_base = 1`). The arrow `(x, y, g)` stands for
//! `t_y ∘ g ∘ t_x⁻¹`, so a groupoid with `n` objects in one component with
//! vertex group `G` has `n²·|G|` arrows without storing any of them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, Homomorphism};

/// `(source, target, element)`; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub element: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub base: usize,
    pub objects: Vec<usize>,
    pub group: FiniteGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    labels: Vec<String>,
    component_of: Vec<usize>,
    components: Vec<Component>,
}

impl Groupoid {
    /// From components given as `(objects, vertex group)`; the first listed
    /// object is the base. Every object must occur exactly once.
    pub fn new<S: Into<String>>(
        labels: Vec<S>,
        components: Vec<(Vec<usize>, FiniteGroup)>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut component_of = vec![usize::MAX; labels.len()];
        let mut comps = Vec::with_capacity(components.len());
        for (c, (objects, group)) in components.into_iter().enumerate() {
            if objects.is_empty() {
                return Err(Error::InvalidGroupoid(format!(
                    "component {c} has no objects"
                )));
            }
            for &x in &objects {
                if x >= labels.len() || component_of[x] != usize::MAX {
                    return Err(Error::InvalidGroupoid(format!(
                        "object #{x} missing or listed twice"
                    )));
                }
                component_of[x] = c;
            }
            comps.push(Component {
                base: objects[0],
                objects,
                group,
            });
        }
        if let Some(x) = component_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidGroupoid(format!(
                "object `{}` in no component",
                labels[x]
            )));
        }
        Ok(Groupoid {
            labels,
            component_of,
            components: comps,
        })
    }

    /// One object with automorphism group `group`.
    pub fn one_object(group: &FiniteGroup) -> Self {
        Groupoid::new(vec!["*"], vec![(vec![0], group.clone())]).unwrap()
    }

    /// Only identity arrows.
    pub fn discrete<S: Into<String>>(labels: Vec<S>) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let comps = (0..labels.len())
            .map(|x| (vec![x], FiniteGroup::trivial()))
            .collect();
        Groupoid::new(labels, comps).unwrap()
    }

    /// Normalizes a groupoid given by explicit arrows. `arrows[i]` is
    /// `(source, target)`, `compose(g, f)` is `g ∘ f` for composable `f`
    /// then `g`, and `identity[x]` is the identity of `x`. All category
    /// axioms and invertibility are verified. Returns the groupoid and the
    /// normal form of every input arrow.
    pub fn from_arrows<S: Into<String>>(
        labels: Vec<S>,
        arrows: &[(usize, usize)],
        identity: &[usize],
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<(Self, Vec<Arrow>)> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let m = arrows.len();
        if identity.len() != n {
            return Err(Error::InvalidGroupoid(
                "one identity per object required".into(),
            ));
        }
        for (i, &(s, t)) in arrows.iter().enumerate() {
            if s >= n || t >= n {
                return Err(Error::InvalidGroupoid(format!(
                    "arrow #{i} has an unknown end"
                )));
            }
        }
        let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &(s, _)) in arrows.iter().enumerate() {
            out_of[s].push(i);
        }
        for x in 0..n {
            let e = identity[x];
            if e >= m || arrows[e] != (x, x) {
                return Err(Error::InvalidGroupoid(format!(
                    "bad identity at `{}`",
                    labels[x]
                )));
            }
        }
        let comp = |g: usize, f: usize| -> Result<usize> {
            let h = compose(g, f);
            if h >= m || arrows[h] != (arrows[f].0, arrows[g].1) {
                return Err(Error::InvalidGroupoid(format!(
                    "composite of #{g} and #{f} has the wrong ends"
                )));
            }
            Ok(h)
        };
        for f in 0..m {
            let (s, t) = arrows[f];
            if comp(identity[t], f)? != f || comp(f, identity[s])? != f {
                return Err(Error::InvalidGroupoid(format!(
                    "identity law fails at arrow #{f}"
                )));
            }
            let mut has_inverse = false;
            for &g in &out_of[t] {
                if arrows[g].1 == s && comp(g, f)? == identity[s] && comp(f, g)? == identity[t] {
                    has_inverse = true;
                    break;
                }
            }
            if !has_inverse {
                return Err(Error::InvalidGroupoid(format!(
                    "arrow #{f} is not invertible"
                )));
            }
        }
        for f in 0..m {
            for &g in &out_of[arrows[f].1] {
                for &h in &out_of[arrows[g].1] {
                    if comp(h, comp(g, f)?)? != comp(comp(h, g)?, f)? {
                        return Err(Error::InvalidGroupoid(format!(
                            "composition is not associative at arrows #{f}, #{g}, #{h}"
                        )));
                    }
                }
            }
        }
        // components, transports and vertex groups
        let mut component_of = vec![usize::MAX; n];
        let mut transport = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for base in 0..n {
            if component_of[base] != usize::MAX {
                continue;
            }
            let c = comps.len();
            let mut objects = Vec::new();
            let mut loops = Vec::new();
            for &f in &out_of[base] {
                let t = arrows[f].1;
                if t == base {
                    loops.push(f);
                }
                if component_of[t] == usize::MAX {
                    component_of[t] = c;
                    transport[t] = f;
                    objects.push(t);
                }
            }
            // base first
            objects.retain(|&x| x != base);
            objects.insert(0, base);
            transport[base] = identity[base];
            loops.sort_by_key(|&f| f != identity[base]);
            let index: BTreeMap<usize, usize> =
                loops.iter().enumerate().map(|(i, &f)| (f, i)).collect();
            let table = loops
                .iter()
                .map(|&g| loops.iter().map(|&h| index[&comp(g, h).unwrap()]).collect())
                .collect();
            let glabels: Vec<String> = loops.iter().map(|f| format!("#{f}")).collect();
            let group = FiniteGroup::from_table(glabels, table).map_err(|e| {
                Error::InvalidGroupoid(format!("vertex group at `{}`: {e}", labels[base]))
            })?;
            comps.push((objects, group, index));
        }
        // inverses of transports, for normalizing
        let inverse = |f: usize| -> usize {
            let (s, t) = arrows[f];
            *out_of[t]
                .iter()
                .find(|&&g| arrows[g].1 == s && comp(g, f).unwrap() == identity[s])
                .unwrap()
        };
        let mut normal = Vec::with_capacity(m);
        for f in 0..m {
            let (s, t) = arrows[f];
            if component_of[s] != component_of[t] {
                return Err(Error::Internal("arrow between components".into()));
            }
            let l = comp(inverse(transport[t]), comp(f, transport[s])?)?;
            let element = comps[component_of[s]].2[&l];
            normal.push(Arrow {
                source: s,
                target: t,
                element,
            });
        }
        let g = Groupoid::new(labels, comps.into_iter().map(|(o, g, _)| (o, g)).collect())?;
        Ok((g, normal))
    }

    pub fn object_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn object(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidGroupoid(format!("no object `{label}`")))
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of(&self, x: usize) -> usize {
        self.component_of[x]
    }

    pub fn vertex_group(&self, x: usize) -> &FiniteGroup {
        &self.components[self.component_of[x]].group
    }

    pub fn arrow_count(&self) -> u128 {
        self.components
            .iter()
            .map(|c| (c.objects.len() as u128).pow(2) * c.group.order() as u128)
            .sum()
    }

    pub fn identity(&self, x: usize) -> Arrow {
        Arrow {
            source: x,
            target: x,
            element: self.vertex_group(x).unit(),
        }
    }

    /// The chosen arrow from the base of `x`'s component to `x`.
    pub fn transport(&self, x: usize) -> Arrow {
        let c = &self.components[self.component_of[x]];
        Arrow {
            source: c.base,
            target: x,
            element: c.group.unit(),
        }
    }

    pub fn is_arrow(&self, a: &Arrow) -> bool {
        a.source < self.labels.len()
            && a.target < self.labels.len()
            && self.component_of[a.source] == self.component_of[a.target]
            && a.element < self.vertex_group(a.source).order()
    }

    /// All arrows `x → y`, in increasing order.
    pub fn hom(&self, x: usize, y: usize) -> Vec<Arrow> {
        if self.component_of[x] != self.component_of[y] {
            return Vec::new();
        }
        self.vertex_group(x)
            .elements()
            .map(|element| Arrow {
                source: x,
                target: y,
                element,
            })
            .collect()
    }

    pub fn hom_count(&self, x: usize, y: usize) -> usize {
        if self.component_of[x] != self.component_of[y] {
            0
        } else {
            self.vertex_group(x).order()
        }
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Arrow, f: &Arrow) -> Result<Arrow> {
        if f.target != g.source {
            return Err(Error::InvalidGroupoid(format!(
                "cannot compose arrows into `{}` and out of `{}`",
                self.labels[f.target], self.labels[g.source]
            )));
        }
        Ok(Arrow {
            source: f.source,
            target: g.target,
            element: self.vertex_group(f.source).mul(g.element, f.element),
        })
    }

    pub fn inverse(&self, f: &Arrow) -> Arrow {
        Arrow {
            source: f.target,
            target: f.source,
            element: self.vertex_group(f.source).inv(f.element),
        }
    }

    pub fn isomorphic(&self, x: usize, y: usize) -> bool {
        self.component_of[x] == self.component_of[y]
    }

    pub fn format_arrow(&self, a: &Arrow) -> String {
        format!(
            "{} -[{}]-> {}",
            self.labels[a.source],
            self.vertex_group(a.source).label(a.element),
            self.labels[a.target]
        )
    }
}

/// A functor in normal form: an object map, for each object `x` the element
/// `u_x` with `F(t_x) = (F base, F x, u_x)`, and for each component the
/// homomorphism on vertex groups. Then `F(x, y, g) = (Fx, Fy, u_y φ(g) u_x⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    objects: Vec<usize>,
    shifts: Vec<usize>,
    on_groups: Vec<Homomorphism>,
}

impl Functor {
    /// Reads off a functor from its values on transports and on the vertex
    /// groups of base objects, then checks it is well formed.
    pub fn from_arrow_map(
        source: &Groupoid,
        target: &Groupoid,
        map: impl Fn(&Arrow) -> Result<Arrow>,
    ) -> Result<Self> {
        let n = source.object_count();
        let mut objects = vec![0; n];
        let mut shifts = vec![0; n];
        let mut on_groups = Vec::with_capacity(source.components.len());
        for c in &source.components {
            let mut phi = Vec::with_capacity(c.group.order());
            for element in c.group.elements() {
                let a = map(&Arrow {
                    source: c.base,
                    target: c.base,
                    element,
                })?;
                if a.source != a.target || !target.is_arrow(&a) {
                    return Err(Error::InvalidGroupoid(
                        "vertex group not sent to a vertex group".into(),
                    ));
                }
                objects[c.base] = a.source;
                phi.push(a.element);
            }
            on_groups.push(Homomorphism::unchecked(phi));
            for &x in &c.objects {
                let a = map(&source.transport(x))?;
                if !target.is_arrow(&a) || a.source != objects[c.base] {
                    return Err(Error::InvalidGroupoid(
                        "transport not sent to an arrow".into(),
                    ));
                }
                objects[x] = a.target;
                shifts[x] = a.element;
            }
        }
        let f = Functor {
            objects,
            shifts,
            on_groups,
        };
        f.validate(source, target)?;
        Ok(f)
    }

    pub fn identity(g: &Groupoid) -> Self {
        Functor {
            objects: (0..g.object_count()).collect(),
            shifts: (0..g.object_count())
                .map(|x| g.vertex_group(x).unit())
                .collect(),
            on_groups: g
                .components
                .iter()
                .map(|c| Homomorphism::identity(&c.group))
                .collect(),
        }
    }

    pub fn validate(&self, source: &Groupoid, target: &Groupoid) -> Result<()> {
        if self.objects.len() != source.object_count()
            || self.on_groups.len() != source.components.len()
        {
            return Err(Error::InvalidGroupoid("functor has the wrong shape".into()));
        }
        for (ci, c) in source.components.iter().enumerate() {
            let img = self.objects[c.base];
            if img >= target.object_count() {
                return Err(Error::InvalidGroupoid("object image out of range".into()));
            }
            let tc = target.component_of(img);
            for &x in &c.objects {
                let y = self.objects[x];
                if y >= target.object_count() || target.component_of(y) != tc {
                    return Err(Error::InvalidGroupoid(format!(
                        "objects of one component of `{}` land in different components",
                        source.label(c.base)
                    )));
                }
                if self.shifts[x] >= target.components[tc].group.order() {
                    return Err(Error::InvalidGroupoid("shift out of range".into()));
                }
            }
            if self.shifts[c.base] != target.components[tc].group.unit() {
                return Err(Error::InvalidGroupoid("identity not preserved".into()));
            }
            self.on_groups[ci].validate(&c.group, &target.components[tc].group)?;
        }
        Ok(())
    }

    pub fn object(&self, x: usize) -> usize {
        self.objects[x]
    }

    pub fn objects(&self) -> &[usize] {
        &self.objects
    }

    pub fn apply(&self, source: &Groupoid, target: &Groupoid, a: &Arrow) -> Arrow {
        let c = source.component_of(a.source);
        let (fx, fy) = (self.objects[a.source], self.objects[a.target]);
        let h = target.vertex_group(fx);
        let g = self.on_groups[c].apply(a.element);
        Arrow {
            source: fx,
            target: fy,
            element: h.mul(
                h.mul(self.shifts[a.target], g),
                h.inv(self.shifts[a.source]),
            ),
        }
    }

    /// `self ∘ first`.
    pub fn after(
        &self,
        first: &Functor,
        source: &Groupoid,
        middle: &Groupoid,
        target: &Groupoid,
    ) -> Functor {
        Functor::from_arrow_map(source, target, |a| {
            Ok(self.apply(middle, target, &first.apply(source, middle, a)))
        })
        .expect("composite of functors is a functor")
    }

    /// Injective on components and bijective on vertex groups, which is the
    /// same as bijective on every Hom set.
    pub fn is_fully_faithful(&self, source: &Groupoid, target: &Groupoid) -> bool {
        let mut hit = vec![false; target.components.len()];
        for (ci, c) in source.components.iter().enumerate() {
            let tc = target.component_of(self.objects[c.base]);
            if hit[tc] {
                return false;
            }
            hit[tc] = true;
            if c.group.order() != target.components[tc].group.order()
                || !self.on_groups[ci].is_bijective()
            {
                return false;
            }
        }
        true
    }

    pub fn is_essentially_surjective(&self, source: &Groupoid, target: &Groupoid) -> bool {
        let mut hit = vec![false; target.components.len()];
        for c in &source.components {
            hit[target.component_of(self.objects[c.base])] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_equivalence(&self, source: &Groupoid, target: &Groupoid) -> bool {
        self.is_fully_faithful(source, target) && self.is_essentially_surjective(source, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The action groupoid of `Z/4` acting on itself through `Z/2`.
    fn explicit() -> (
        Vec<(usize, usize)>,
        Vec<usize>,
        impl Fn(usize, usize) -> usize,
    ) {
        // objects 0,1; arrows (s, t, k) with k in Z/2, encoded s*4 + t*2 + k
        let arrows: Vec<(usize, usize)> = (0..8).map(|i| (i / 4, (i / 2) % 2)).collect();
        let identity = vec![0, 6];
        let compose = |g: usize, f: usize| -> usize {
            let (s, k1) = (f / 4, f % 2);
            let (t, k2) = ((g / 2) % 2, g % 2);
            s * 4 + t * 2 + (k1 + k2) % 2
        };
        (arrows, identity, compose)
    }

    #[test]
    fn explicit_groupoid_normalizes() {
        let (arrows, identity, compose) = explicit();
        let (g, normal) =
            Groupoid::from_arrows(vec!["p", "q"], &arrows, &identity, compose).unwrap();
        assert_eq!(g.components().len(), 1);
        assert_eq!(g.arrow_count(), 8);
        let mut seen: Vec<Arrow> = normal.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 8);
        // normal forms compose like the originals
        let (arrows, _, compose) = explicit();
        for f in 0..8 {
            for h in 0..8 {
                if arrows[f].1 == arrows[h].0 {
                    let c = compose(h, f);
                    assert_eq!(g.compose(&normal[h], &normal[f]).unwrap(), normal[c]);
                }
            }
        }
    }

    #[test]
    fn non_associative_table_rejected() {
        // one object, "group" given by a non-associative loop table
        let table = [[0, 1, 2], [1, 0, 0], [2, 0, 0]];
        let r = Groupoid::from_arrows(vec!["*"], &[(0, 0); 3], &[0], |g, f| table[g][f]);
        assert!(r.is_err());
    }

    #[test]
    fn fully_faithful_matches_hom_counts() {
        let s3 = FiniteGroup::symmetric(3);
        let a = Groupoid::new(vec!["x", "y"], vec![(vec![0, 1], s3.clone())]).unwrap();
        let b = Groupoid::one_object(&s3);
        let f = Functor::from_arrow_map(&a, &b, |ar| {
            Ok(Arrow {
                source: 0,
                target: 0,
                element: ar.element,
            })
        })
        .unwrap();
        assert!(f.is_equivalence(&a, &b));
        // brute force: every Hom set maps bijectively
        for x in 0..2 {
            for y in 0..2 {
                let mut imgs: Vec<Arrow> = a.hom(x, y).iter().map(|h| f.apply(&a, &b, h)).collect();
                imgs.sort();
                imgs.dedup();
                assert_eq!(imgs.len(), b.hom_count(f.object(x), f.object(y)));
            }
        }
        let c = Groupoid::discrete(vec!["u", "v"]);
        let g = Functor::from_arrow_map(&c, &b, |_| Ok(b.identity(0))).unwrap();
        assert!(!g.is_fully_faithful(&c, &b));
        assert!(g.is_essentially_surjective(&c, &b));
    }
}
