//! Finite T0 spaces as posets, their opens, covers and nerves.
//!
//! Points are numbered in construction order and sets of points are `u64`
//! bitmasks, so a space has at most 64 points and a cover at most 64 members.
//! An open is an up-set: if `x` is in it and `x <= y` then so is `y`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub type Mask = u64;

pub const MAX_POINTS: usize = 64;

/// Largest simplex size a nerve records. Five lets coboundaries of 3-cochains
/// be evaluated.
pub const MAX_DEPTH: usize = 5;

/// Indices of the set bits of `mask`, ascending.
pub fn bits(mask: Mask) -> impl Iterator<Item = usize> + Clone {
    let mut m = mask;
    core::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1u64 << i))
}

/// Sorted index list of a simplex.
pub fn simplex_indices(mask: Mask) -> Vec<usize> {
    bits(mask).collect()
}

/// Order simplices by size, then lexicographically by their sorted indices.
pub fn simplex_order(a: &Mask, b: &Mask) -> core::cmp::Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| bits(*a).cmp(bits(*b)))
}

pub(crate) struct Fnv(u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn bytes(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

/// A finite T0 space given by its specialization order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    labels: Arc<[String]>,
    up: Arc<[Mask]>,
    down: Arc<[Mask]>,
    id: u64,
}

impl FinitePoset {
    /// Builds the poset generated by `leq` (pairs `(x, y)` meaning `x <= y`).
    /// Reflexive and transitive closure is taken; antisymmetry is checked.
    pub fn new<S: Into<String>>(labels: Vec<S>, leq: &[(usize, usize)]) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(Error::InvalidSpace(format!(
                "{n} points, at most {MAX_POINTS} supported"
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate point `{l}`")));
            }
        }
        let mut up: Vec<Mask> = (0..n).map(|x| 1u64 << x).collect();
        for &(x, y) in leq {
            if x >= n || y >= n {
                return Err(Error::InvalidSpace(format!("pair ({x}, {y}) out of range")));
            }
            up[x] |= 1u64 << y;
        }
        for k in 0..n {
            for x in 0..n {
                if up[x] >> k & 1 == 1 {
                    up[x] |= up[k];
                }
            }
        }
        for x in 0..n {
            for y in bits(up[x]) {
                if y != x && up[y] >> x & 1 == 1 {
                    return Err(Error::InvalidSpace(format!(
                        "order is not antisymmetric: {} <= {} <= {}",
                        labels[x], labels[y], labels[x]
                    )));
                }
            }
        }
        let mut down = vec![0u64; n];
        for x in 0..n {
            for y in bits(up[x]) {
                down[y] |= 1u64 << x;
            }
        }
        let mut h = Fnv::new();
        for (l, u) in labels.iter().zip(&up) {
            h.bytes(l.as_bytes());
            h.bytes(&[0xff]);
            h.u64(*u);
        }
        Ok(FinitePoset {
            labels: labels.into(),
            up: up.into(),
            down: down.into(),
            id: h.finish(),
        })
    }

    /// Same as [`FinitePoset::new`] with points and pairs given by label.
    pub fn from_labels(labels: &[&str], leq: &[(&str, &str)]) -> Result<Self> {
        let find = |l: &str| {
            labels
                .iter()
                .position(|p| *p == l)
                .ok_or_else(|| Error::UnknownPoint(l.to_string()))
        };
        let pairs = leq
            .iter()
            .map(|(a, b)| Ok((find(a)?, find(b)?)))
            .collect::<Result<Vec<_>>>()?;
        FinitePoset::new(labels.to_vec(), &pairs)
    }

    pub fn discrete(labels: &[&str]) -> Result<Self> {
        FinitePoset::from_labels(labels, &[])
    }

    /// Four points `a, b, c, d` with `c, d <= a` and `c, d <= b`: a finite
    /// model of the circle.
    pub fn pseudo_circle() -> Self {
        FinitePoset::from_labels(
            &["a", "b", "c", "d"],
            &[("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")],
        )
        .expect("pseudo-circle is a poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn point(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x] >> y & 1 == 1
    }

    /// `{y : x <= y}`.
    pub fn up_set(&self, x: usize) -> Mask {
        self.up[x]
    }

    /// `{y : y <= x}`.
    pub fn down_set(&self, x: usize) -> Mask {
        self.down[x]
    }

    pub fn all(&self) -> Mask {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn is_up_closed(&self, mask: Mask) -> bool {
        mask & !self.all() == 0 && bits(mask).all(|x| self.up[x] & !mask == 0)
    }

    pub fn open(&self, mask: Mask) -> Result<Open> {
        if !self.is_up_closed(mask) {
            return Err(Error::InvalidSpace(format!(
                "{} is not up-closed",
                self.format_set(mask)
            )));
        }
        Ok(Open {
            space: self.id,
            members: mask,
        })
    }

    pub fn open_of(&self, labels: &[&str]) -> Result<Open> {
        let mut m = 0;
        for l in labels {
            m |= 1u64 << self.point(l)?;
        }
        self.open(m)
    }

    pub fn whole(&self) -> Open {
        Open {
            space: self.id,
            members: self.all(),
        }
    }

    pub fn empty_open(&self) -> Open {
        Open {
            space: self.id,
            members: 0,
        }
    }

    /// The smallest open containing `x`, namely its up-set.
    pub fn minimal_open(&self, x: usize) -> Result<Open> {
        if x >= self.len() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        Ok(Open {
            space: self.id,
            members: self.up[x],
        })
    }

    /// All opens in ascending mask order; `∅` comes first and every open
    /// comes after all of its subsets.
    pub fn open_masks(&self) -> Vec<Mask> {
        let mut set = vec![0u64];
        for x in 0..self.len() {
            for i in 0..set.len() {
                set.push(set[i] | self.up[x]);
            }
            set.sort_unstable();
            set.dedup();
        }
        set
    }

    pub fn opens(&self) -> Vec<Open> {
        self.open_masks()
            .into_iter()
            .map(|m| Open {
                space: self.id,
                members: m,
            })
            .collect()
    }

    /// Connected components of `mask` in the comparability graph, ordered by
    /// their lowest point.
    pub fn components(&self, mask: Mask) -> Vec<Mask> {
        let mut rest = mask;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            loop {
                let mut grown = comp;
                for x in bits(comp) {
                    grown |= (self.up[x] | self.down[x]) & mask;
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    pub fn is_connected(&self, mask: Mask) -> bool {
        self.components(mask).len() == 1
    }

    /// Pairs `x < y` with nothing strictly between them.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            let above = self.up[x] & !(1u64 << x);
            for y in bits(above) {
                let between = above & self.down[y] & !(1u64 << y);
                if between == 0 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// The subspace on `mask`, with the original index of each new point.
    pub fn subspace(&self, mask: Mask) -> (FinitePoset, Vec<usize>) {
        let points: Vec<usize> = bits(mask).collect();
        let labels: Vec<String> = points.iter().map(|&x| self.labels[x].clone()).collect();
        let mut pairs = Vec::new();
        for (i, &x) in points.iter().enumerate() {
            for (j, &y) in points.iter().enumerate() {
                if i != j && self.leq(x, y) {
                    pairs.push((i, j));
                }
            }
        }
        let sub = FinitePoset::new(labels, &pairs).expect("subspace of a poset is a poset");
        (sub, points)
    }

    pub fn format_set(&self, mask: Mask) -> String {
        let names: Vec<&str> = bits(mask).map(|x| self.labels[x].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// An up-closed set of points, tagged with the space it lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Open {
    space: u64,
    members: Mask,
}

impl Open {
    pub fn members(&self) -> Mask {
        self.members
    }

    pub fn space_id(&self) -> u64 {
        self.space
    }

    pub fn contains(&self, x: usize) -> bool {
        x < 64 && self.members >> x & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_subset(&self, other: &Open) -> bool {
        self.members & !other.members == 0
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + Clone {
        bits(self.members)
    }
}

pub fn intersect(u: &Open, v: &Open) -> Result<Open> {
    if u.space != v.space {
        return Err(Error::MismatchedSpaces);
    }
    Ok(Open {
        space: u.space,
        members: u.members & v.members,
    })
}

pub fn union(u: &Open, v: &Open) -> Result<Open> {
    if u.space != v.space {
        return Err(Error::MismatchedSpaces);
    }
    Ok(Open {
        space: u.space,
        members: u.members | v.members,
    })
}

/// An indexed family of opens whose union is `of`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    of: Open,
    labels: Vec<String>,
    members: Vec<Open>,
}

impl Cover {
    pub fn new<S: Into<String>>(
        space: &FinitePoset,
        of: Open,
        members: Vec<(S, Open)>,
    ) -> Result<Self> {
        if of.space != space.id() {
            return Err(Error::MismatchedSpaces);
        }
        if members.len() > 64 {
            return Err(Error::InvalidCover(format!(
                "{} members, at most 64 supported",
                members.len()
            )));
        }
        let mut labels = Vec::new();
        let mut opens = Vec::new();
        let mut union = 0;
        for (label, u) in members {
            let label = label.into();
            if u.space != space.id() {
                return Err(Error::MismatchedSpaces);
            }
            if !u.is_subset(&of) {
                return Err(Error::InvalidCover(format!(
                    "member {label} = {} is not contained in {}",
                    space.format_set(u.members),
                    space.format_set(of.members)
                )));
            }
            if labels.contains(&label) {
                return Err(Error::InvalidCover(format!(
                    "duplicate member label `{label}`"
                )));
            }
            union |= u.members;
            labels.push(label);
            opens.push(u);
        }
        if union != of.members {
            return Err(Error::InvalidCover(format!(
                "members miss {}",
                space.format_set(of.members & !union)
            )));
        }
        Ok(Cover {
            of,
            labels,
            members: opens,
        })
    }

    /// The cover of `of` by the minimal opens of its points, labelled by the
    /// points. It refines every other cover of `of`.
    pub fn minimal(space: &FinitePoset, of: Open) -> Result<Self> {
        if of.space != space.id() {
            return Err(Error::MismatchedSpaces);
        }
        let members = of
            .points()
            .map(|x| (space.label(x).to_string(), space.minimal_open(x).unwrap()))
            .collect();
        Cover::new(space, of, members)
    }

    pub fn of(&self) -> Open {
        self.of
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidCover(format!("no member labelled `{label}`")))
    }

    pub fn member(&self, i: usize) -> Open {
        self.members[i]
    }

    pub fn members(&self) -> &[Open] {
        &self.members
    }

    /// Points of the intersection of the members indexed by `simplex`.
    pub fn intersection(&self, simplex: Mask) -> Mask {
        bits(simplex).fold(self.of.members, |m, i| m & self.members[i].members)
    }
}

/// For each member of `fine`, the smallest index of a member of `coarse`
/// containing it; `None` when some member fits nowhere or the covers are of
/// different opens.
pub fn refinement_map(fine: &Cover, coarse: &Cover) -> Option<Vec<usize>> {
    if fine.of != coarse.of {
        return None;
    }
    fine.members
        .iter()
        .map(|v| coarse.members.iter().position(|u| v.is_subset(u)))
        .collect()
}

/// The space and cover a nerve was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NerveBase {
    pub space: FinitePoset,
    pub cover: Cover,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Cell {
    /// Point sets of the connected components; empty for abstract cells.
    components: Vec<Mask>,
    connected: bool,
}

/// Which finite intersections of a cover are inhabited, with component data.
///
/// Simplices are bitmasks over the index set. A nerve computed from a cover
/// records the components of each intersection; an abstract nerve only
/// records inhabitation, and treats every listed intersection as connected
/// unless it was flagged otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractNerve {
    labels: Vec<String>,
    depth: usize,
    levels: Vec<Vec<Mask>>,
    cells: BTreeMap<Mask, Cell>,
    base: Option<NerveBase>,
    id: u64,
}

/// Nerve of `cover` up to simplices with `depth` indices.
pub fn nerve(space: &FinitePoset, cover: &Cover, depth: usize) -> Result<AbstractNerve> {
    if !(1..=MAX_DEPTH).contains(&depth) {
        return Err(Error::InvalidNerve(format!(
            "depth {depth} outside 1..={MAX_DEPTH}"
        )));
    }
    if cover.of.space != space.id() {
        return Err(Error::MismatchedSpaces);
    }
    let n = cover.len();
    let mut cells = BTreeMap::new();
    // Extend sorted tuples one index at a time; empty intersections prune.
    let mut frontier: Vec<(Mask, Mask)> = Vec::new();
    for i in 0..n {
        let pts = cover.members[i].members;
        if pts != 0 {
            frontier.push((1u64 << i, pts));
        }
    }
    let mut size = 1;
    while !frontier.is_empty() && size <= depth {
        let mut next = Vec::new();
        for &(s, pts) in &frontier {
            let components = space.components(pts);
            let connected = components.len() == 1;
            cells.insert(
                s,
                Cell {
                    components,
                    connected,
                },
            );
            if size < depth {
                let top = 63 - s.leading_zeros() as usize;
                for j in top + 1..n {
                    let p = pts & cover.members[j].members;
                    if p != 0 {
                        next.push((s | 1u64 << j, p));
                    }
                }
            }
        }
        frontier = next;
        size += 1;
    }
    Ok(AbstractNerve::assemble(
        cover.labels.clone(),
        depth,
        cells,
        Some(NerveBase {
            space: space.clone(),
            cover: cover.clone(),
        }),
    ))
}

impl AbstractNerve {
    /// An abstract nerve on `labels`. `simplices` lists inhabited tuples of
    /// size at least two; singletons are always inhabited. Anything not listed
    /// is empty. Tuples in `disconnected` must be listed and are flagged as
    /// having disconnected intersections.
    pub fn new<S: Into<String>>(
        labels: Vec<S>,
        simplices: &[Vec<usize>],
        disconnected: &[Vec<usize>],
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n > 64 {
            return Err(Error::InvalidNerve(format!(
                "{n} indices, at most 64 supported"
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidNerve(format!("duplicate index `{l}`")));
            }
        }
        let to_mask = |t: &Vec<usize>| -> Result<Mask> {
            let m = mask_of(t);
            if t.iter().any(|&i| i >= n) || m.count_ones() as usize != t.len() {
                return Err(Error::InvalidNerve(format!("malformed tuple {t:?}")));
            }
            if t.len() > MAX_DEPTH {
                return Err(Error::InvalidNerve(format!(
                    "tuple {t:?} longer than {MAX_DEPTH}"
                )));
            }
            Ok(m)
        };
        let mut cells = BTreeMap::new();
        for i in 0..n {
            cells.insert(
                1u64 << i,
                Cell {
                    components: Vec::new(),
                    connected: true,
                },
            );
        }
        for t in simplices {
            let m = to_mask(t)?;
            cells.insert(
                m,
                Cell {
                    components: Vec::new(),
                    connected: true,
                },
            );
        }
        for t in disconnected {
            let m = to_mask(t)?;
            match cells.get_mut(&m) {
                Some(c) => c.connected = false,
                None => {
                    return Err(Error::InvalidNerve(format!(
                        "tuple {t:?} flagged disconnected but not inhabited"
                    )))
                }
            }
        }
        for &m in cells.keys() {
            for i in bits(m) {
                let face = m & !(1u64 << i);
                if face != 0 && !cells.contains_key(&face) {
                    let names: Vec<&str> = bits(m).map(|j| labels[j].as_str()).collect();
                    return Err(Error::InvalidNerve(format!(
                        "({}) is inhabited but its face without {} is not",
                        names.join(","),
                        labels[i]
                    )));
                }
            }
        }
        Ok(AbstractNerve::assemble(labels, MAX_DEPTH, cells, None))
    }

    fn assemble(
        labels: Vec<String>,
        depth: usize,
        cells: BTreeMap<Mask, Cell>,
        base: Option<NerveBase>,
    ) -> Self {
        let mut levels = vec![Vec::new(); depth];
        for &m in cells.keys() {
            levels[m.count_ones() as usize - 1].push(m);
        }
        for level in &mut levels {
            level.sort_by(simplex_order);
        }
        let mut h = Fnv::new();
        for l in &labels {
            h.bytes(l.as_bytes());
            h.bytes(&[0xff]);
        }
        h.u64(depth as u64);
        for (m, c) in &cells {
            h.u64(*m);
            h.u64(c.connected as u64);
            for comp in &c.components {
                h.u64(*comp);
            }
        }
        AbstractNerve {
            labels,
            depth,
            levels,
            cells,
            base,
            id: h.finish(),
        }
    }

    /// Nerve of three opens meeting pairwise with empty triple intersection.
    pub fn triangle() -> Self {
        AbstractNerve::new(
            vec!["U0", "U1", "U2"],
            &[vec![0, 1], vec![0, 2], vec![1, 2]],
            &[],
        )
        .unwrap()
    }

    /// Nerve of four opens with all pairs and triples inhabited and empty
    /// quadruple intersection: the boundary of a tetrahedron.
    pub fn tetrahedron() -> Self {
        AbstractNerve::full_simplex_skeleton(4, 3)
    }

    /// All tuples of at most `top` of `n` indices inhabited.
    pub fn full_simplex_skeleton(n: usize, top: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| format!("U{i}")).collect();
        let mut simplices = Vec::new();
        for m in 1u64..(1u64 << n) {
            let k = m.count_ones() as usize;
            if k >= 2 && k <= top {
                simplices.push(simplex_indices(m));
            }
        }
        AbstractNerve::new(labels, &simplices, &[]).unwrap()
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidNerve(format!("no index labelled `{label}`")))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn base(&self) -> Option<&NerveBase> {
        self.base.as_ref()
    }

    pub fn is_abstract(&self) -> bool {
        self.base.is_none()
    }

    pub fn require_depth(&self, size: usize) -> Result<()> {
        if size > self.depth {
            return Err(Error::InvalidNerve(format!(
                "tuples of size {size} needed, nerve computed to depth {}",
                self.depth
            )));
        }
        Ok(())
    }

    pub fn is_inhabited(&self, simplex: Mask) -> bool {
        simplex == 0 || self.cells.contains_key(&simplex)
    }

    pub fn is_connected(&self, simplex: Mask) -> bool {
        self.cells
            .get(&simplex)
            .map(|c| c.connected)
            .unwrap_or(false)
    }

    /// Inhabited simplices with `size` indices in canonical order.
    pub fn simplices(&self, size: usize) -> &[Mask] {
        if size == 0 || size > self.depth {
            &[]
        } else {
            &self.levels[size - 1]
        }
    }

    pub fn component_count(&self, simplex: Mask) -> usize {
        match self.cells.get(&simplex) {
            None => 0,
            Some(c) if c.components.is_empty() => 1,
            Some(c) => c.components.len(),
        }
    }

    /// Point sets of the components, for nerves computed from a cover.
    pub fn components(&self, simplex: Mask) -> Option<&[Mask]> {
        self.cells
            .get(&simplex)
            .filter(|c| !c.components.is_empty())
            .map(|c| c.components.as_slice())
    }

    /// The component of the face `face ⊆ simplex` containing component
    /// `comp` of `simplex`.
    pub fn face_component(&self, simplex: Mask, comp: usize, face: Mask) -> usize {
        debug_assert!(face & !simplex == 0);
        match (self.components(simplex), self.components(face)) {
            (Some(cs), Some(fs)) => {
                let p = cs[comp];
                fs.iter()
                    .position(|f| f & p != 0)
                    .expect("component lies in a face component")
            }
            _ => 0,
        }
    }

    /// `(simplex, component)` pairs for simplices with `size` indices.
    pub fn slots(&self, size: usize) -> Vec<(Mask, usize)> {
        let mut out = Vec::new();
        for &s in self.simplices(size) {
            for c in 0..self.component_count(s) {
                out.push((s, c));
            }
        }
        out
    }

    /// Rejects abstract cells flagged as disconnected.
    pub fn require_connected_cells(&self) -> Result<()> {
        for (m, c) in &self.cells {
            if !c.connected && c.components.is_empty() {
                return Err(Error::DisconnectedIntersection(self.format_simplex(*m)));
            }
        }
        Ok(())
    }

    pub fn format_simplex(&self, simplex: Mask) -> String {
        let names: Vec<&str> = bits(simplex).map(|i| self.labels[i].as_str()).collect();
        format!("({})", names.join(","))
    }

    pub fn format_tuple(&self, tuple: &[usize]) -> String {
        let names: Vec<&str> = tuple.iter().map(|&i| self.labels[i].as_str()).collect();
        format!("({})", names.join(","))
    }

    /// The space and cover underlying this nerve. Abstract nerves are
    /// realized as their face poset ordered by inclusion, covered by the open
    /// stars of the vertices; the nerve of that cover is this nerve again.
    pub fn realize(&self) -> Result<NerveBase> {
        if let Some(b) = &self.base {
            return Ok(b.clone());
        }
        self.require_connected_cells()?;
        let mut cells: Vec<Mask> = self.cells.keys().copied().collect();
        cells.sort_by(simplex_order);
        if cells.len() > MAX_POINTS {
            return Err(Error::InvalidNerve(format!(
                "{} simplices, too many to realize as a space",
                cells.len()
            )));
        }
        let labels: Vec<String> = cells
            .iter()
            .map(|&m| {
                let names: Vec<&str> = bits(m).map(|i| self.labels[i].as_str()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        let mut pairs = Vec::new();
        for (i, &a) in cells.iter().enumerate() {
            for (j, &b) in cells.iter().enumerate() {
                if i != j && a & !b == 0 {
                    pairs.push((i, j));
                }
            }
        }
        let space = FinitePoset::new(labels, &pairs)?;
        let mut members = Vec::new();
        for (i, l) in self.labels.iter().enumerate() {
            let star = cells
                .iter()
                .enumerate()
                .filter(|(_, &m)| m >> i & 1 == 1)
                .fold(0u64, |acc, (j, _)| acc | 1u64 << j);
            members.push((l.clone(), space.open(star)?));
        }
        let cover = Cover::new(&space, space.whole(), members)?;
        Ok(NerveBase { space, cover })
    }

    /// Component of `simplex` containing point `x` of the underlying space.
    pub fn component_at(&self, base: &NerveBase, simplex: Mask, x: usize) -> Option<usize> {
        if base.cover.intersection(simplex) >> x & 1 == 0 {
            return None;
        }
        match self.components(simplex) {
            Some(cs) => cs.iter().position(|c| c >> x & 1 == 1),
            None => Some(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_circle_minimal_opens() {
        let x = FinitePoset::pseudo_circle();
        let c = x.point("c").unwrap();
        assert_eq!(
            x.minimal_open(c).unwrap(),
            x.open_of(&["a", "b", "c"]).unwrap()
        );
        let a = x.point("a").unwrap();
        assert_eq!(x.minimal_open(a).unwrap().len(), 1);
        assert_eq!(x.open_masks().len(), 7);
    }

    #[test]
    fn pseudo_circle_intersection_is_disconnected() {
        let x = FinitePoset::pseudo_circle();
        let u = x.open_of(&["c", "a", "b"]).unwrap();
        let v = x.open_of(&["d", "a", "b"]).unwrap();
        let w = intersect(&u, &v).unwrap();
        assert_eq!(w, x.open_of(&["a", "b"]).unwrap());
        assert_eq!(x.components(w.members()).len(), 2);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let x = FinitePoset::pseudo_circle();
        let y = FinitePoset::discrete(&["p"]).unwrap();
        assert_eq!(
            intersect(&x.whole(), &y.whole()),
            Err(Error::MismatchedSpaces)
        );
    }

    #[test]
    fn non_antisymmetric_rejected() {
        let e = FinitePoset::from_labels(&["p", "q"], &[("p", "q"), ("q", "p")]);
        assert!(matches!(e, Err(Error::InvalidSpace(_))));
    }

    #[test]
    fn transitive_closure_taken() {
        let x = FinitePoset::from_labels(&["p", "q", "r"], &[("p", "q"), ("q", "r")]).unwrap();
        assert!(x.leq(0, 2));
        assert_eq!(x.covering_pairs(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn realized_triangle_has_same_nerve() {
        let n = AbstractNerve::triangle();
        let base = n.realize().unwrap();
        assert_eq!(base.space.len(), 6);
        let again = nerve(&base.space, &base.cover, 5).unwrap();
        assert_eq!(again.simplices(2), n.simplices(2));
        assert!(again.simplices(3).is_empty());
        assert!(again
            .simplices(2)
            .iter()
            .all(|&s| again.component_count(s) == 1));
    }

    #[test]
    fn tetrahedron_counts() {
        let n = AbstractNerve::tetrahedron();
        assert_eq!(n.simplices(2).len(), 6);
        assert_eq!(n.simplices(3).len(), 4);
        assert!(n.simplices(4).is_empty());
    }

    #[test]
    fn abstract_nerve_must_be_downward_closed() {
        let e = AbstractNerve::new(vec!["A", "B", "C"], &[vec![0, 1, 2], vec![0, 1]], &[]);
        assert!(matches!(e, Err(Error::InvalidNerve(_))));
    }

    #[test]
    fn refinement_of_minimal_cover() {
        let x = FinitePoset::pseudo_circle();
        let fine = Cover::minimal(&x, x.whole()).unwrap();
        let coarse = Cover::new(
            &x,
            x.whole(),
            vec![
                ("U", x.open_of(&["c", "a", "b"]).unwrap()),
                ("V", x.open_of(&["d", "a", "b"]).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(refinement_map(&fine, &coarse), Some(vec![0, 0, 0, 1]));
        assert_eq!(refinement_map(&coarse, &fine), Some(vec![2, 3]));
        assert_eq!(refinement_map(&fine, &fine), Some(vec![0, 1, 2, 3]));
        let whole = Cover::new(&x, x.whole(), vec![("X", x.whole())]).unwrap();
        assert_eq!(refinement_map(&whole, &coarse), None);
    }
}
