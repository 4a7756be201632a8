//! Presheaves of finite sets on a finite poset, and étale spaces.
//!
//! A presheaf stores a finite set `0..size` for every open of its space, and a
//! restriction map for every inclusion `V ⊆ U`. Sheaf conditions are checked
//! on the cover of each open by the minimal opens of its points, which refines
//! every other cover, together with the empty cover of `∅`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::budget::{Budget, Counter};
use crate::error::{Check, Error, Result};
use crate::space::{bits, FinitePoset, Mask};

const NO_MAP: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presheaf {
    space: FinitePoset,
    opens: Vec<Mask>,
    index: BTreeMap<Mask, usize>,
    sizes: Vec<usize>,
    /// The map for `opens[v] ⊆ opens[u]` is `maps[offsets[u * n + v]..]`,
    /// `sizes[u]` entries; `NO_MAP` marks non-inclusions.
    offsets: Vec<u32>,
    maps: Vec<u32>,
    /// Per-point value tuples, when elements are families over points.
    families: Option<Vec<FamilyTable>>,
}

/// Sorted per-point value tuples of one open, stored row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FamilyTable {
    width: usize,
    len: usize,
    data: Vec<u32>,
}

impl FamilyTable {
    fn new(width: usize) -> Self {
        FamilyTable {
            width,
            len: 0,
            data: Vec::new(),
        }
    }

    fn push(&mut self, row: &[u32]) {
        self.data.extend_from_slice(row);
        self.len += 1;
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    fn find(&self, row: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(row) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

impl Presheaf {
    /// A presheaf with `sizes[i]` elements over `space.open_masks()[i]`, and
    /// restriction `restrict(u, v, s)` from open `u` to open `v ⊆ u`.
    /// Functoriality is verified.
    pub fn new(
        space: &FinitePoset,
        sizes: Vec<usize>,
        restrict: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let opens = space.open_masks();
        if sizes.len() != opens.len() {
            return Err(Error::InvalidPresheaf(format!(
                "{} values for {} opens",
                sizes.len(),
                opens.len()
            )));
        }
        let n = opens.len();
        let mut maps = vec![None; n * n];
        for u in 0..n {
            for v in 0..n {
                if opens[v] & !opens[u] == 0 {
                    let mut m = Vec::with_capacity(sizes[u]);
                    for s in 0..sizes[u] {
                        let t = restrict(u, v, s);
                        if t >= sizes[v] {
                            return Err(Error::InvalidPresheaf(format!(
                                "restriction {} → {} sends {s} out of range",
                                space.format_set(opens[u]),
                                space.format_set(opens[v])
                            )));
                        }
                        m.push(t as u32);
                    }
                    maps[u * n + v] = Some(m);
                }
            }
        }
        let p = Presheaf::assemble(space, opens, sizes, maps, None);
        p.check_functorial()?;
        Ok(p)
    }

    /// A presheaf from restriction maps given on some inclusions; the other
    /// inclusions are filled in by composing through intermediate opens. Every
    /// open must be listed in `sizes` (keyed by point mask).
    pub fn from_restrictions(
        space: &FinitePoset,
        sizes: &BTreeMap<Mask, usize>,
        given: &BTreeMap<(Mask, Mask), Vec<usize>>,
    ) -> Result<Self> {
        let opens = space.open_masks();
        let n = opens.len();
        let mut size_vec = Vec::with_capacity(n);
        for &u in &opens {
            match sizes.get(&u) {
                Some(&s) => size_vec.push(s),
                None => {
                    return Err(Error::InvalidPresheaf(format!(
                        "no value given for open {}",
                        space.format_set(u)
                    )))
                }
            }
        }
        for &(u, v) in given.keys() {
            if !space.is_up_closed(u) || !space.is_up_closed(v) || v & !u != 0 {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction {} → {} is not along an inclusion of opens",
                    space.format_set(u),
                    space.format_set(v)
                )));
            }
        }
        let index: BTreeMap<Mask, usize> = opens.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut maps: Vec<Option<Vec<u32>>> = vec![None; n * n];
        for u in 0..n {
            maps[u * n + u] = Some((0..size_vec[u] as u32).collect());
        }
        for (&(u, v), m) in given {
            let (iu, iv) = (index[&u], index[&v]);
            if m.len() != size_vec[iu] || m.iter().any(|&t| t >= size_vec[iv]) {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction {} → {} has the wrong shape",
                    space.format_set(u),
                    space.format_set(v)
                )));
            }
            maps[iu * n + iv] = Some(m.iter().map(|&t| t as u32).collect());
        }
        // Fill missing pairs by increasing gap size.
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && opens[v] & !opens[u] == 0 {
                    pairs.push((u, v));
                }
            }
        }
        pairs.sort_by_key(|&(u, v)| (opens[u] & !opens[v]).count_ones());
        for (u, v) in pairs {
            if maps[u * n + v].is_some() {
                continue;
            }
            let mid = (0..n).find(|&w| {
                w != u
                    && w != v
                    && opens[v] & !opens[w] == 0
                    && opens[w] & !opens[u] == 0
                    && maps[u * n + w].is_some()
                    && maps[w * n + v].is_some()
            });
            match mid {
                Some(w) => {
                    let uw = maps[u * n + w].clone().unwrap();
                    let wv = maps[w * n + v].as_ref().unwrap();
                    maps[u * n + v] = Some(uw.iter().map(|&s| wv[s as usize]).collect());
                }
                None => {
                    return Err(Error::InvalidPresheaf(format!(
                        "no restriction given from {} to {}",
                        space.format_set(opens[u]),
                        space.format_set(opens[v])
                    )))
                }
            }
        }
        let p = Presheaf::assemble(space, opens, size_vec, maps, None);
        p.check_functorial()?;
        Ok(p)
    }

    fn assemble(
        space: &FinitePoset,
        opens: Vec<Mask>,
        sizes: Vec<usize>,
        maps: Vec<Option<Vec<u32>>>,
        families: Option<Vec<FamilyTable>>,
    ) -> Self {
        let mut offsets = vec![NO_MAP; maps.len()];
        let mut flat = Vec::new();
        for (i, m) in maps.into_iter().enumerate() {
            if let Some(m) = m {
                offsets[i] = flat.len() as u32;
                flat.extend(m);
            }
        }
        Presheaf::assemble_flat(space, opens, sizes, offsets, flat, families)
    }

    fn assemble_flat(
        space: &FinitePoset,
        opens: Vec<Mask>,
        sizes: Vec<usize>,
        offsets: Vec<u32>,
        maps: Vec<u32>,
        families: Option<Vec<FamilyTable>>,
    ) -> Self {
        let index = opens.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Presheaf {
            space: space.clone(),
            opens,
            index,
            sizes,
            offsets,
            maps,
            families,
        }
    }

    /// Builds a presheaf whose elements over each open are families of
    /// per-point values; restriction forgets the points outside the smaller
    /// open. `families[i]` must be sorted.
    pub(crate) fn from_families(space: &FinitePoset, families: Vec<FamilyTable>) -> Self {
        let opens = space.open_masks();
        let n = opens.len();
        let sizes: Vec<usize> = families.iter().map(FamilyTable::len).collect();
        let mut offsets = vec![NO_MAP; n * n];
        let mut maps = Vec::new();
        let mut keep: Vec<usize> = Vec::new();
        let mut r: Vec<u32> = Vec::new();
        for u in 0..n {
            let pts: Vec<usize> = bits(opens[u]).collect();
            for v in 0..n {
                if opens[v] & !opens[u] != 0 {
                    continue;
                }
                offsets[u * n + v] = maps.len() as u32;
                if v == u {
                    maps.extend(0..sizes[u] as u32);
                    continue;
                }
                if opens[v] == 0 {
                    maps.resize(maps.len() + sizes[u], 0);
                    continue;
                }
                keep.clear();
                keep.extend(
                    pts.iter()
                        .enumerate()
                        .filter(|(_, &x)| opens[v] >> x & 1 == 1)
                        .map(|(i, _)| i),
                );
                for s in 0..sizes[u] {
                    let f = families[u].row(s);
                    r.clear();
                    r.extend(keep.iter().map(|&i| f[i]));
                    maps.push(families[v].find(&r).expect("restricted family exists") as u32);
                }
            }
        }
        Presheaf::assemble_flat(space, opens, sizes, offsets, maps, Some(families))
    }

    fn check_functorial(&self) -> Result<()> {
        let n = self.opens.len();
        for u in 0..n {
            let id = self.restriction(u, u).unwrap();
            if id.iter().enumerate().any(|(i, &t)| i as u32 != t) {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction to {} itself is not the identity",
                    self.space.format_set(self.opens[u])
                )));
            }
        }
        for u in 0..n {
            for v in 0..n {
                let Some(uv) = self.restriction(u, v) else {
                    continue;
                };
                for w in 0..n {
                    let Some(vw) = self.restriction(v, w) else {
                        continue;
                    };
                    let uw = self.restriction(u, w).unwrap();
                    for s in 0..self.sizes[u] {
                        if vw[uv[s] as usize] != uw[s] {
                            return Err(Error::InvalidPresheaf(format!(
                                "restrictions {} → {} → {} do not compose",
                                self.space.format_set(self.opens[u]),
                                self.space.format_set(self.opens[v]),
                                self.space.format_set(self.opens[w])
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The sheaf of families `(s_x)` over each open, with `s_x` in the stalk
    /// at `x` and `s_y = f(s_x)` whenever `x <= y`.
    pub fn from_functor(functor: &StalkFunctor) -> Self {
        let space = &functor.space;
        let families = space
            .open_masks()
            .into_iter()
            .map(|u| {
                let pts: Vec<usize> = bits(u).collect();
                enumerate_families(
                    &pts,
                    |x| functor.sizes[x],
                    |x, sx, y, sy| {
                        if space.leq(y, x) {
                            functor.apply(y, x, sy) == sx
                        } else if space.leq(x, y) {
                            functor.apply(x, y, sx) == sy
                        } else {
                            true
                        }
                    },
                )
            })
            .collect();
        Presheaf::from_families(space, families)
    }

    /// Pointwise product `U ↦ P(U) × Q(U)`, pair `(a, b)` encoded as
    /// `a·|Q(U)| + b`.
    pub fn product(p: &Presheaf, q: &Presheaf) -> Result<Self> {
        if p.space.id() != q.space.id() {
            return Err(Error::MismatchedSpaces);
        }
        let sizes: Vec<usize> = p.sizes.iter().zip(&q.sizes).map(|(a, b)| a * b).collect();
        Presheaf::new(&p.space, sizes, |u, v, s| {
            let (a, b) = (s / q.sizes[u], s % q.sizes[u]);
            p.restrict(u, v, a) * q.sizes[v] + q.restrict(u, v, b)
        })
    }

    pub fn space(&self) -> &FinitePoset {
        &self.space
    }

    pub fn opens(&self) -> &[Mask] {
        &self.opens
    }

    pub fn open_count(&self) -> usize {
        self.opens.len()
    }

    pub fn open_index(&self, mask: Mask) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn size(&self, u: usize) -> usize {
        self.sizes[u]
    }

    pub fn size_over(&self, mask: Mask) -> Option<usize> {
        self.open_index(mask).map(|u| self.sizes[u])
    }

    /// Restriction from open `u` to open `v ⊆ u` (indices into `opens`).
    #[inline]
    pub fn restrict(&self, u: usize, v: usize, s: usize) -> usize {
        let off = self.offsets[u * self.opens.len() + v];
        assert!(off != NO_MAP && s < self.sizes[u], "restriction along an inclusion");
        self.maps[off as usize + s] as usize
    }

    pub fn restriction(&self, u: usize, v: usize) -> Option<&[u32]> {
        let off = self.offsets[u * self.opens.len() + v];
        (off != NO_MAP).then(|| &self.maps[off as usize..off as usize + self.sizes[u]])
    }

    /// Per-point values of an element, for presheaves built from families.
    pub fn family(&self, u: usize, s: usize) -> Option<&[u32]> {
        self.families.as_ref().map(|f| f[u].row(s))
    }

    /// Position of a per-point family over open `u`.
    pub fn find_family(&self, u: usize, family: &[u32]) -> Option<usize> {
        self.families
            .as_ref()
            .and_then(|f| f[u].find(family))
    }

    /// Index of the minimal open of `x`.
    pub fn minimal_index(&self, x: usize) -> usize {
        self.index[&self.space.up_set(x)]
    }

    /// The stalk at `x`, which is the value on the minimal open of `x`.
    pub fn stalk(&self, x: usize) -> Result<usize> {
        if x >= self.space.len() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        Ok(self.sizes[self.minimal_index(x)])
    }

    /// Restrictions of `s ∈ P(U)` to the minimal opens of the points of `U`.
    fn germs(&self, u: usize, s: usize) -> Vec<u32> {
        bits(self.opens[u])
            .map(|x| self.restrict(u, self.minimal_index(x), s) as u32)
            .collect()
    }

    /// Families over the minimal-open cover of `U` that agree on pairwise
    /// intersections.
    fn compatible_families(&self, u: usize) -> FamilyTable {
        let pts: Vec<usize> = bits(self.opens[u]).collect();
        enumerate_families(
            &pts,
            |x| self.sizes[self.minimal_index(x)],
            |x, sx, y, sy| {
                let (ix, iy) = (self.minimal_index(x), self.minimal_index(y));
                let meet = self.index[&(self.opens[ix] & self.opens[iy])];
                self.restrict(ix, meet, sx) == self.restrict(iy, meet, sy)
            },
        )
    }
}

/// Walks all tuples `(s_x)` over `points`, with `s_x < choices(x)`, keeping
/// those where `compatible(x, s_x, y, s_y)` holds for each earlier `y`. The
/// output is in lexicographic order.
fn enumerate_families(
    points: &[usize],
    choices: impl Fn(usize) -> usize,
    compatible: impl Fn(usize, usize, usize, usize) -> bool,
) -> FamilyTable {
    let k = points.len();
    let mut out = FamilyTable::new(k);
    let mut cur: Vec<u32> = Vec::with_capacity(k);
    let mut next = vec![0usize; k + 1];
    let mut depth = 0;
    if k == 0 {
        out.push(&[]);
        return out;
    }
    loop {
        let x = points[depth];
        let mut placed = false;
        while next[depth] < choices(x) {
            let sx = next[depth];
            next[depth] += 1;
            if (0..depth).all(|j| compatible(x, sx, points[j], cur[j] as usize)) {
                cur.push(sx as u32);
                placed = true;
                break;
            }
        }
        if placed {
            if depth + 1 == k {
                out.push(&cur);
                cur.pop();
            } else {
                depth += 1;
                next[depth] = 0;
            }
        } else {
            if depth == 0 {
                return out;
            }
            depth -= 1;
            cur.pop();
        }
    }
}

/// A functor from the poset to finite sets: a set per point and a map
/// `F(x) → F(y)` for every `x <= y`. Sheaves on a finite poset are exactly
/// these, with `F(x)` the stalk at `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkFunctor {
    space: FinitePoset,
    sizes: Vec<usize>,
    maps: BTreeMap<(usize, usize), Vec<u32>>,
}

impl StalkFunctor {
    /// From maps on the covering pairs `x ⋖ y`; composites along different
    /// chains must agree.
    pub fn new(
        space: &FinitePoset,
        sizes: Vec<usize>,
        edges: &BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self> {
        if sizes.len() != space.len() {
            return Err(Error::InvalidPresheaf(format!(
                "{} stalks for {} points",
                sizes.len(),
                space.len()
            )));
        }
        let covering = space.covering_pairs();
        for &(x, y) in &covering {
            let m = edges.get(&(x, y)).ok_or_else(|| {
                Error::InvalidPresheaf(format!(
                    "no map along {} <= {}",
                    space.label(x),
                    space.label(y)
                ))
            })?;
            if m.len() != sizes[x] || m.iter().any(|&t| t >= sizes[y]) {
                return Err(Error::InvalidPresheaf(format!(
                    "map along {} <= {} has the wrong shape",
                    space.label(x),
                    space.label(y)
                )));
            }
        }
        if edges.keys().any(|k| !covering.contains(k)) {
            return Err(Error::InvalidPresheaf(
                "maps given on pairs that are not covering pairs".into(),
            ));
        }
        let mut maps = BTreeMap::new();
        for x in 0..space.len() {
            maps.insert((x, x), (0..sizes[x] as u32).collect::<Vec<u32>>());
        }
        // Longer gaps after shorter ones: sort pairs by distance in the order.
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
            // every x ⋖ z <= y route must agree
            let mut found: Option<Vec<u32>> = None;
            for &(a, z) in &covering {
                if a != x || !space.leq(z, y) {
                    continue;
                }
                let first = &edges[&(x, z)];
                let rest = &maps[&(z, y)];
                let m: Vec<u32> = first.iter().map(|&s| rest[s]).collect();
                match &found {
                    None => found = Some(m),
                    Some(f) if *f != m => {
                        return Err(Error::InvalidPresheaf(format!(
                            "maps from {} to {} along different chains disagree",
                            space.label(x),
                            space.label(y)
                        )))
                    }
                    _ => {}
                }
            }
            maps.insert(
                (x, y),
                found.expect("a chain exists between comparable points"),
            );
        }
        Ok(StalkFunctor {
            space: space.clone(),
            sizes,
            maps,
        })
    }

    /// The stalk functor of a presheaf.
    pub fn of_presheaf(p: &Presheaf) -> Self {
        let space = p.space.clone();
        let sizes = (0..space.len())
            .map(|x| p.sizes[p.minimal_index(x)])
            .collect();
        let mut maps = BTreeMap::new();
        for x in 0..space.len() {
            for y in bits(space.up_set(x)) {
                let m = p
                    .restriction(p.minimal_index(x), p.minimal_index(y))
                    .unwrap()
                    .to_vec();
                maps.insert((x, y), m);
            }
        }
        StalkFunctor { space, sizes, maps }
    }

    pub fn space(&self) -> &FinitePoset {
        &self.space
    }

    pub fn size(&self, x: usize) -> usize {
        self.sizes[x]
    }

    pub fn apply(&self, x: usize, y: usize, s: usize) -> usize {
        self.maps[&(x, y)][s] as usize
    }
}

/// First failure of the sheaf condition on minimal-open covers.
pub fn sheaf_check(p: &Presheaf) -> Check {
    for u in 0..p.open_count() {
        if let Some(m) = condition_at(p, u, true) {
            return Check::Fails(m);
        }
    }
    Check::Holds
}

fn condition_at(p: &Presheaf, u: usize, gluing: bool) -> Option<String> {
    let mut images: Vec<Vec<u32>> = (0..p.sizes[u]).map(|s| p.germs(u, s)).collect();
    images.sort();
    let before = images.len();
    images.dedup();
    let name = p.space.format_set(p.opens[u]);
    if images.len() != before {
        return Some(format!(
            "two sections over {name} agree on the minimal-open cover"
        ));
    }
    if gluing {
        let glued = p.compatible_families(u).len();
        if glued != images.len() {
            return Some(format!(
                "{glued} compatible families over {name} but {} sections",
                images.len()
            ));
        }
    }
    None
}

pub fn is_sheaf(p: &Presheaf) -> bool {
    sheaf_check(p).holds()
}

pub fn separation_check(p: &Presheaf) -> Check {
    for u in 0..p.open_count() {
        if let Some(m) = condition_at(p, u, false) {
            return Check::Fails(m);
        }
    }
    Check::Holds
}

pub fn is_separated(p: &Presheaf) -> bool {
    separation_check(p).holds()
}

/// A family of maps `P(U) → Q(U)`, one per open.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Morphism {
    components: Vec<Vec<u32>>,
}

impl Morphism {
    pub fn new(components: Vec<Vec<usize>>) -> Self {
        Morphism {
            components: components
                .into_iter()
                .map(|c| c.into_iter().map(|x| x as u32).collect())
                .collect(),
        }
    }

    #[inline]
    pub fn apply(&self, u: usize, s: usize) -> usize {
        self.components[u][s] as usize
    }

    pub fn component(&self, u: usize) -> &[u32] {
        &self.components[u]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Morphism) -> Morphism {
        Morphism {
            components: first
                .components
                .iter()
                .zip(&self.components)
                .map(|(f, g)| f.iter().map(|&s| g[s as usize]).collect())
                .collect(),
        }
    }

    /// Shapes match and the squares with all restrictions commute.
    pub fn is_morphism(&self, p: &Presheaf, q: &Presheaf) -> bool {
        let n = p.open_count();
        if p.space.id() != q.space.id() || self.components.len() != n {
            return false;
        }
        for u in 0..n {
            if self.components[u].len() != p.sizes[u]
                || self.components[u].iter().any(|&t| t as usize >= q.sizes[u])
            {
                return false;
            }
        }
        for u in 0..n {
            for v in 0..n {
                if p.restriction(u, v).is_none() {
                    continue;
                }
                for s in 0..p.sizes[u] {
                    if self.apply(v, p.restrict(u, v, s)) != q.restrict(u, v, self.apply(u, s)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_isomorphism(&self, p: &Presheaf, q: &Presheaf) -> bool {
        self.is_morphism(p, q)
            && self.components.iter().enumerate().all(|(u, c)| {
                let mut seen = vec![false; q.sizes[u]];
                c.len() == q.sizes[u]
                    && c.iter()
                        .all(|&t| !core::mem::replace(&mut seen[t as usize], true))
            })
    }

    /// Every element of `Q(U)` is, near each point of `U`, a restriction of
    /// something in the image.
    pub fn is_locally_surjective(&self, q: &Presheaf) -> bool {
        for u in 0..q.open_count() {
            for t in 0..q.sizes[u] {
                for x in bits(q.opens[u]) {
                    let mx = q.minimal_index(x);
                    let germ = q.restrict(u, mx, t);
                    if !self.components[mx].iter().any(|&s| s as usize == germ) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// All morphisms `P → Q`, in lexicographic order of their components.
/// Opens are visited smallest first so every restriction target is already
/// decided.
pub fn morphisms(p: &Presheaf, q: &Presheaf, budget: &Budget) -> Result<Vec<Morphism>> {
    if p.space.id() != q.space.id() {
        return Err(Error::MismatchedSpaces);
    }
    let n = p.open_count();
    // decision slots: (open, element)
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..p.sizes[u]).map(move |s| (u, s)))
        .collect();
    let mut counter = budget.counter("enumerating presheaf morphisms");
    let mut comps: Vec<Vec<u32>> = (0..n).map(|u| vec![u32::MAX; p.sizes[u]]).collect();
    let mut out = Vec::new();
    search_morphisms(p, q, &slots, 0, &mut comps, &mut out, &mut counter)?;
    Ok(out)
}

fn search_morphisms(
    p: &Presheaf,
    q: &Presheaf,
    slots: &[(usize, usize)],
    i: usize,
    comps: &mut Vec<Vec<u32>>,
    out: &mut Vec<Morphism>,
    counter: &mut Counter,
) -> Result<()> {
    if i == slots.len() {
        out.push(Morphism {
            components: comps.clone(),
        });
        return Ok(());
    }
    let (u, s) = slots[i];
    let n = p.open_count();
    for t in 0..q.sizes[u] {
        counter.tick()?;
        let ok = (0..n).all(|v| {
            v == u
                || p.restriction(u, v).is_none()
                || comps[v][p.restrict(u, v, s)] as usize == q.restrict(u, v, t)
        });
        if ok {
            comps[u][s] = t as u32;
            search_morphisms(p, q, slots, i + 1, comps, out, counter)?;
        }
    }
    comps[u][s] = u32::MAX;
    Ok(())
}

/// Result of [`separate`]: the quotient and the quotient map.
#[derive(Clone, Debug)]
pub struct Separation {
    pub presheaf: Presheaf,
    pub quotient: Morphism,
}

/// Identifies sections that agree on the minimal-open cover.
pub fn separate(p: &Presheaf) -> Separation {
    let n = p.open_count();
    let mut class: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(n);
    for u in 0..n {
        let mut seen: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        let mut cls = Vec::with_capacity(p.sizes[u]);
        let mut r = Vec::new();
        for s in 0..p.sizes[u] {
            let key = p.germs(u, s);
            let next = seen.len();
            let c = *seen.entry(key).or_insert_with(|| {
                r.push(s);
                next
            });
            cls.push(c);
        }
        class.push(cls);
        reps.push(r);
    }
    let sizes = reps.iter().map(Vec::len).collect();
    let presheaf = Presheaf::new(&p.space, sizes, |u, v, c| {
        class[v][p.restrict(u, v, reps[u][c])]
    })
    .expect("quotient of a presheaf is a presheaf");
    let quotient = Morphism::new(class);
    Separation { presheaf, quotient }
}

/// Result of [`sheafify`]: the associated sheaf and the unit `P → aP`.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub sheaf: Presheaf,
    pub unit: Morphism,
}

/// Separate, then take compatible families over the minimal-open cover of
/// each open. Elements of the result are families indexed by points.
pub fn sheafify(p: &Presheaf) -> Sheafification {
    let sep = separate(p);
    let q = &sep.presheaf;
    let families: Vec<FamilyTable> = (0..q.open_count())
        .map(|u| q.compatible_families(u))
        .collect();
    let sheaf = Presheaf::from_families(&p.space, families);
    let unit = (0..p.open_count())
        .map(|u| {
            (0..p.sizes[u])
                .map(|s| {
                    let g = q.germs(u, sep.quotient.apply(u, s));
                    sheaf
                        .find_family(u, &g)
                        .expect("germs form a compatible family")
                })
                .collect()
        })
        .collect();
    Sheafification {
        sheaf,
        unit: Morphism::new(unit),
    }
}

/// A poset over a base with a projection that is a local homeomorphism: it
/// maps the minimal open of each point isomorphically onto the minimal open
/// of its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleSpace {
    base: FinitePoset,
    total: FinitePoset,
    projection: Vec<usize>,
}

impl EtaleSpace {
    pub fn new(base: &FinitePoset, total: FinitePoset, projection: Vec<usize>) -> Result<Self> {
        if projection.len() != total.len() || projection.iter().any(|&x| x >= base.len()) {
            return Err(Error::InvalidPresheaf(
                "projection has the wrong shape".into(),
            ));
        }
        for e in 0..total.len() {
            let up_e: Vec<usize> = bits(total.up_set(e)).collect();
            let target = base.up_set(projection[e]);
            let image = up_e.iter().fold(0u64, |m, &f| m | 1u64 << projection[f]);
            let bijective = image == target && up_e.len() == target.count_ones() as usize;
            let order_iso = up_e.iter().all(|&f| {
                up_e.iter()
                    .all(|&g| total.leq(f, g) == base.leq(projection[f], projection[g]))
            });
            if !bijective || !order_iso {
                return Err(Error::InvalidPresheaf(format!(
                    "projection is not a local homeomorphism at {}",
                    total.label(e)
                )));
            }
        }
        Ok(EtaleSpace {
            base: base.clone(),
            total,
            projection,
        })
    }

    /// The identity of the base.
    pub fn identity(base: &FinitePoset) -> Self {
        EtaleSpace {
            base: base.clone(),
            total: base.clone(),
            projection: (0..base.len()).collect(),
        }
    }

    pub fn base(&self) -> &FinitePoset {
        &self.base
    }

    pub fn total(&self) -> &FinitePoset {
        &self.total
    }

    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    pub fn project(&self, e: usize) -> usize {
        self.projection[e]
    }

    /// Points over `x`, ascending.
    pub fn fiber(&self, x: usize) -> Vec<usize> {
        (0..self.total.len())
            .filter(|&e| self.projection[e] == x)
            .collect()
    }

    /// The unique point above `y` that lies over `e`'s minimal open, for
    /// `π(e) <= y`.
    pub fn lift(&self, e: usize, y: usize) -> usize {
        bits(self.total.up_set(e))
            .find(|&f| self.projection[f] == y)
            .expect("local homeomorphism lifts comparable points")
    }

    /// `E ×_X F` with the componentwise order; point `(e, f)` is labelled
    /// `e|f`.
    pub fn fibered_product(&self, other: &EtaleSpace) -> Result<EtaleSpace> {
        if self.base.id() != other.base.id() {
            return Err(Error::MismatchedSpaces);
        }
        let mut pts = Vec::new();
        for e in 0..self.total.len() {
            for f in 0..other.total.len() {
                if self.projection[e] == other.projection[f] {
                    pts.push((e, f));
                }
            }
        }
        let labels: Vec<String> = pts
            .iter()
            .map(|&(e, f)| format!("{}|{}", self.total.label(e), other.total.label(f)))
            .collect();
        let mut pairs = Vec::new();
        for (i, &(e, f)) in pts.iter().enumerate() {
            for (j, &(g, h)) in pts.iter().enumerate() {
                if i != j && self.total.leq(e, g) && other.total.leq(f, h) {
                    pairs.push((i, j));
                }
            }
        }
        let total = FinitePoset::new(labels, &pairs)?;
        let projection = pts.iter().map(|&(e, _)| self.projection[e]).collect();
        EtaleSpace::new(&self.base, total, projection)
    }

    /// `map` (total points of `self` to total points of `other`) is a
    /// bijection over the base preserving and reflecting the order.
    pub fn is_isomorphism_to(&self, other: &EtaleSpace, map: &[usize]) -> bool {
        let n = self.total.len();
        if self.base.id() != other.base.id() || map.len() != n || other.total.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for e in 0..n {
            let f = map[e];
            if f >= n || seen[f] || other.projection[f] != self.projection[e] {
                return false;
            }
            seen[f] = true;
        }
        (0..n).all(|e| (0..n).all(|g| self.total.leq(e, g) == other.total.leq(map[e], map[g])))
    }
}

/// Germs of `P`: points `(x, s)` for `s` in the stalk at `x`, ordered by
/// `x` then `s`, with `(x, s) <= (y, t)` when `x <= y` and `s` restricts to
/// `t`.
pub fn etale_space(p: &Presheaf) -> EtaleSpace {
    let space = &p.space;
    let mut pts = Vec::new();
    for x in 0..space.len() {
        for s in 0..p.sizes[p.minimal_index(x)] {
            pts.push((x, s));
        }
    }
    let labels: Vec<String> = pts
        .iter()
        .map(|&(x, s)| format!("{}#{}", space.label(x), s))
        .collect();
    let mut pairs = Vec::new();
    for (i, &(x, s)) in pts.iter().enumerate() {
        for (j, &(y, t)) in pts.iter().enumerate() {
            if i != j
                && space.leq(x, y)
                && p.restrict(p.minimal_index(x), p.minimal_index(y), s) == t
            {
                pairs.push((i, j));
            }
        }
    }
    let total = FinitePoset::new(labels, &pairs).expect("germ order is a partial order");
    let projection = pts.iter().map(|&(x, _)| x).collect();
    EtaleSpace::new(space, total, projection).expect("germ space is étale")
}

/// `U ↦` order-preserving sections of the projection over `U`. Elements are
/// families of total-space points indexed by the points of `U`.
pub fn sections_sheaf(e: &EtaleSpace) -> Presheaf {
    let fibers: Vec<Vec<usize>> = (0..e.base.len()).map(|x| e.fiber(x)).collect();
    let families = e
        .base
        .open_masks()
        .into_iter()
        .map(|u| {
            let pts: Vec<usize> = bits(u).collect();
            let raw = enumerate_families(
                &pts,
                |x| fibers[x].len(),
                |x, sx, y, sy| {
                    let (a, b) = (fibers[x][sx], fibers[y][sy]);
                    (!e.base.leq(x, y) || e.total.leq(a, b))
                        && (!e.base.leq(y, x) || e.total.leq(b, a))
                },
            );
            // store actual total points rather than fiber positions; fibers
            // are ascending so the order is kept
            let mut fams = raw;
            for f in fams.data.chunks_mut(pts.len().max(1)) {
                for (s, &x) in f.iter_mut().zip(&pts) {
                    *s = fibers[x][*s as usize] as u32;
                }
            }
            fams
        })
        .collect();
    Presheaf::from_families(&e.base, families)
}

/// The comparison `P → Γ(E(P))`, `s ↦ (x ↦ germ of s at x)`; `sections`
/// must be `sections_sheaf(germs)` and `germs` must be `etale_space(p)`.
pub fn germ_morphism(p: &Presheaf, germs: &EtaleSpace, sections: &Presheaf) -> Morphism {
    let space = &p.space;
    let offset: Vec<usize> = {
        let mut acc = 0;
        (0..space.len())
            .map(|x| {
                let o = acc;
                acc += p.sizes[p.minimal_index(x)];
                o
            })
            .collect()
    };
    debug_assert_eq!(
        germs.total.len(),
        offset
            .last()
            .map_or(0, |&o| o + p.sizes[p.minimal_index(space.len() - 1)])
    );
    let comps = (0..p.open_count())
        .map(|u| {
            (0..p.sizes[u])
                .map(|s| {
                    let fam: Vec<u32> = bits(p.opens[u])
                        .map(|x| (offset[x] + p.restrict(u, p.minimal_index(x), s)) as u32)
                        .collect();
                    sections.find_family(u, &fam).unwrap_or(usize::MAX)
                })
                .collect()
        })
        .collect();
    Morphism::new(comps)
}

/// The evaluation `E(Γ(E)) → E`, `(x, σ) ↦ σ(x)`; `sections` must be
/// `sections_sheaf(e)` and `germs` must be `etale_space(sections)`.
pub fn evaluation_map(e: &EtaleSpace, sections: &Presheaf, germs: &EtaleSpace) -> Vec<usize> {
    let base = &e.base;
    (0..germs.total.len())
        .map(|g| {
            let x = germs.projection[g];
            let mx = sections.minimal_index(x);
            let s = g - germs.fiber(x)[0];
            let fam = sections.family(mx, s).expect("sections are families");
            let pos = bits(base.up_set(x)).position(|y| y == x).unwrap();
            fam[pos] as usize
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(space: &FinitePoset, k: usize) -> Presheaf {
        let n = space.open_masks().len();
        Presheaf::new(space, vec![k; n], |_, _, s| s).unwrap()
    }

    #[test]
    fn constant_presheaf_fails_at_empty_open() {
        let x = FinitePoset::discrete(&["a", "b"]).unwrap();
        let p = constant(&x, 2);
        assert!(!is_separated(&p));
        assert!(!is_sheaf(&p));
        let sep = separate(&p);
        assert_eq!(sep.presheaf.size(0), 1);
        let a = sheafify(&p);
        assert!(is_sheaf(&a.sheaf));
        let whole = a.sheaf.open_index(x.all()).unwrap();
        assert_eq!(a.sheaf.size(whole), 4);
    }

    #[test]
    fn constant_presheaf_on_connected_space_sheafifies_to_constant() {
        let x = FinitePoset::pseudo_circle();
        let a = sheafify(&constant(&x, 3));
        let whole = a.sheaf.open_index(x.all()).unwrap();
        assert_eq!(a.sheaf.size(whole), 3);
        let ab = a
            .sheaf
            .open_index(x.open_of(&["a", "b"]).unwrap().members())
            .unwrap();
        assert_eq!(a.sheaf.size(ab), 9);
        assert!(a.unit.is_locally_surjective(&a.sheaf));
    }

    #[test]
    fn pseudo_circle_presheaf_without_global_sections() {
        let x = FinitePoset::pseudo_circle();
        let opens = x.open_masks();
        let sizes: Vec<usize> = opens
            .iter()
            .map(|&u| {
                if u == 0 {
                    1
                } else if u == x.all() {
                    0
                } else {
                    2
                }
            })
            .collect();
        // values {0,1} restrict identically, ∅ gets a single point
        let p = Presheaf::new(&x, sizes, |_, v, s| if opens[v] == 0 { 0 } else { s });
        // {a,b} restricting to {a} and {b} by the identity is not a sheaf either,
        // but the presheaf itself must be well formed
        let p = p.unwrap();
        assert!(!is_sheaf(&p));
    }

    #[test]
    fn etale_round_trip_on_pseudo_circle() {
        let x = FinitePoset::pseudo_circle();
        let mut edges = BTreeMap::new();
        for (a, b) in x.covering_pairs() {
            edges.insert((a, b), vec![1usize, 0]);
        }
        let f = StalkFunctor::new(&x, vec![2; 4], &edges).unwrap();
        let p = Presheaf::from_functor(&f);
        assert!(is_sheaf(&p));
        let e = etale_space(&p);
        let g = sections_sheaf(&e);
        let eta = germ_morphism(&p, &e, &g);
        assert!(eta.is_isomorphism(&p, &g));
        let e2 = etale_space(&g);
        let ev = evaluation_map(&e, &g, &e2);
        assert!(e2.is_isomorphism_to(&e, &ev));
    }

    #[test]
    fn identity_projection_gives_terminal_sheaf() {
        let x = FinitePoset::pseudo_circle();
        let g = sections_sheaf(&EtaleSpace::identity(&x));
        assert!((0..g.open_count()).all(|u| g.size(u) == 1));
    }

    #[test]
    fn morphism_enumeration_counts() {
        let x = FinitePoset::discrete(&["a"]).unwrap();
        let p = sheafify(&constant(&x, 2)).sheaf;
        let q = sheafify(&constant(&x, 3)).sheaf;
        assert_eq!(morphisms(&p, &q, &Budget::default()).unwrap().len(), 9);
    }
}
