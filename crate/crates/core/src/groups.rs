//! Finite groups as multiplication tables.
//!
//! Elements are indices `0..order`; labels are only for input and output.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Orders above this are refused by constructors that build product tables.
pub const MAX_ORDER: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<u32>,
    unit: usize,
    inv: Vec<u32>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[a][b] = ab`) exhaustively.
    pub fn from_table<S: Into<String>>(labels: Vec<S>, table: Vec<Vec<usize>>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidGroup(
                "a group has at least one element".into(),
            ));
        }
        if n > MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "order {n} exceeds {MAX_ORDER}"
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidGroup(format!("duplicate element `{l}`")));
            }
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup(format!("table is not {n}x{n}")));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &table {
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidGroup(format!("entry {v} out of range")));
                }
                flat.push(v as u32);
            }
        }
        let mul = |a: usize, b: usize| flat[a * n + b] as usize;
        let unit = (0..n)
            .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| mul(x, y) == unit && mul(y, x) == unit)
                .ok_or_else(|| Error::InvalidGroup(format!("`{}` has no inverse", labels[x])))?;
            inv[x] = y as u32;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            labels,
            table: flat,
            unit,
            inv,
        })
    }

    /// Builds a group from a multiplication that is known to be a group law.
    fn from_law(labels: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> Self {
        let n = labels.len();
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(mul(a, b) as u32);
            }
        }
        let unit = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x))
            .expect("group law has a unit");
        let mut inv = vec![0u32; n];
        for x in 0..n {
            inv[x] = (0..n).find(|&y| table[x * n + y] as usize == unit).unwrap() as u32;
        }
        FiniteGroup {
            labels,
            table,
            unit,
            inv,
        }
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// `Z/n` with elements `0..n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_ORDER);
        FiniteGroup::from_law((0..n).map(|i| i.to_string()).collect(), |a, b| (a + b) % n)
    }

    /// The symmetric group on `n` letters, permutations in lexicographic
    /// order of their images, labelled in cycle notation on `1..=n`.
    pub fn symmetric(n: usize) -> Self {
        assert!((1..=6).contains(&n));
        let perms = permutations(n);
        let index: BTreeMap<Vec<usize>, usize> = perms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let labels = perms.iter().map(|p| cycle_notation(p)).collect();
        FiniteGroup::from_law(labels, |a, b| {
            // (ab)(i) = a(b(i))
            let p: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index[&p]
        })
    }

    /// Dihedral group of order `2n`: `r^i` and `s r^i`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1 && 2 * n <= MAX_ORDER);
        let mut labels = Vec::new();
        for i in 0..n {
            labels.push(format!("r{i}"));
        }
        for i in 0..n {
            labels.push(format!("sr{i}"));
        }
        // element (f, i) = s^f r^i; r^i s = s r^{-i}
        FiniteGroup::from_law(labels, |a, b| {
            let (fa, ia) = (a / n, a % n);
            let (fb, ib) = (b / n, b % n);
            let i = if fb == 0 {
                (ia + ib) % n
            } else {
                (n - ia % n + ib) % n
            };
            ((fa + fb) % 2) * n + i
        })
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // unit index u in 0..4 (1,i,j,k) with sign
        let basis = |u: usize, v: usize| -> (usize, bool) {
            match (u, v) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 1) => (3, true),
                (2, 3) => (1, false),
                (3, 2) => (1, true),
                (3, 1) => (2, false),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        FiniteGroup::from_law(labels, |a, b| {
            let (ua, sa) = (a / 2, a % 2 == 1);
            let (ub, sb) = (b / 2, b % 2 == 1);
            let (u, s) = basis(ua, ub);
            2 * u + ((s ^ sa ^ sb) as usize)
        })
    }

    /// `Z/n ⋊ Z/m` where the generator of `Z/m` acts by multiplication by
    /// `r` (requires `r^m = 1 mod n`). Elements `a^i c^j` are labelled
    /// `a{i}c{j}`.
    pub fn metacyclic(n: usize, m: usize, r: usize) -> Result<Self> {
        if n == 0 || m == 0 || n * m > MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "bad metacyclic parameters ({n}, {m})"
            )));
        }
        let mut pw = vec![1 % n; m + 1];
        for j in 1..=m {
            pw[j] = pw[j - 1] * r % n;
        }
        if pw[m] != 1 % n {
            return Err(Error::InvalidGroup(format!("{r}^{m} is not 1 mod {n}")));
        }
        let labels = (0..n * m)
            .map(|e| format!("a{}c{}", e / m, e % m))
            .collect();
        // (i1, j1)(i2, j2) = (i1 + r^j1 i2, j1 + j2)
        Ok(FiniteGroup::from_law(labels, |a, b| {
            let (i1, j1) = (a / m, a % m);
            let (i2, j2) = (b / m, b % m);
            ((i1 + pw[j1] * i2) % n) * m + (j1 + j2) % m
        }))
    }

    /// Dicyclic group of order 20, `Z/5 ⋊ Z/4` with the generator of `Z/4`
    /// acting by inversion. Its center has order 2.
    pub fn dicyclic5() -> Self {
        FiniteGroup::metacyclic(5, 4, 4).unwrap()
    }

    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let (n, m) = (g.order(), h.order());
        if n * m > MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "product of order {} too large",
                n * m
            )));
        }
        let mut labels = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                labels.push(format!("({},{})", g.label(a), h.label(b)));
            }
        }
        Ok(FiniteGroup::from_law(labels, |x, y| {
            g.mul(x / m, y / m) * m + h.mul(x % m, y % m)
        }))
    }

    /// Built-in groups by name: `Zn` or `Z/n`, `Sn` (n ≤ 5), `Dn` (dihedral
    /// of order 2n), `Q8`, `Dic5`, `V4`, and products joined by `x` or `×`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        let parts: Vec<&str> = name.split(['x', '×']).map(str::trim).collect();
        if parts.len() > 1 {
            let mut acc = FiniteGroup::by_name(parts[0])?;
            for p in &parts[1..] {
                acc = FiniteGroup::direct_product(&acc, &FiniteGroup::by_name(p)?)?;
            }
            return Ok(acc);
        }
        let unknown = || Error::InvalidGroup(format!("unknown group name `{name}`"));
        let num = |s: &str| s.parse::<usize>().map_err(|_| unknown());
        match name {
            "Q8" => return Ok(FiniteGroup::quaternion()),
            "Dic5" => return Ok(FiniteGroup::dicyclic5()),
            "V4" | "Klein" => {
                return FiniteGroup::by_name("Z2xZ2");
            }
            _ => {}
        }
        if let Some(rest) = name.strip_prefix("Z/").or_else(|| name.strip_prefix('Z')) {
            let n = num(rest)?;
            if n == 0 || n > MAX_ORDER {
                return Err(unknown());
            }
            return Ok(FiniteGroup::cyclic(n));
        }
        if let Some(rest) = name.strip_prefix('S') {
            let n = num(rest)?;
            if !(1..=5).contains(&n) {
                return Err(unknown());
            }
            return Ok(FiniteGroup::symmetric(n));
        }
        if let Some(rest) = name.strip_prefix('D') {
            let n = num(rest)?;
            if n == 0 || 2 * n > MAX_ORDER {
                return Err(unknown());
            }
            return Ok(FiniteGroup::dihedral(n));
        }
        Err(unknown())
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g x g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn element(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_central(&self, a: usize) -> bool {
        self.elements().all(|b| self.mul(a, b) == self.mul(b, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.unit {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.unit, |acc, _| self.mul(acc, a))
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.unit] = true;
        let mut queue = VecDeque::from([self.unit]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    /// Greedy generating set: repeatedly add the least element outside the
    /// subgroup generated so far.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.generated(&gens);
        while span.len() < self.order() {
            let g = (0..self.order())
                .find(|x| span.binary_search(x).is_err())
                .unwrap();
            gens.push(g);
            span = self.generated(&gens);
        }
        gens
    }

    /// Conjugacy classes, each sorted, ordered by least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for x in self.elements() {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = self.elements().map(|g| self.conj(g, x)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                seen[y] = true;
            }
            out.push(class);
        }
        out
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for i in 0..p.len() {
        if seen[i] || p[i] == i {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            cycle.push((j + 1).to_string());
            j = p[j];
        }
        out.push('(');
        out.push_str(&cycle.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// A map of group elements, validated against a source and target group by
/// [`Homomorphism::new`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Homomorphism {
    map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, map: Vec<usize>) -> Result<Self> {
        let h = Homomorphism { map };
        h.validate(source, target)?;
        Ok(h)
    }

    pub(crate) fn unchecked(map: Vec<usize>) -> Self {
        Homomorphism { map }
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        Homomorphism {
            map: g.elements().collect(),
        }
    }

    pub fn validate(&self, source: &FiniteGroup, target: &FiniteGroup) -> Result<()> {
        if self.map.len() != source.order() {
            return Err(Error::InvalidHomomorphism(format!(
                "{} images for a group of order {}",
                self.map.len(),
                source.order()
            )));
        }
        if let Some(&v) = self.map.iter().find(|&&v| v >= target.order()) {
            return Err(Error::InvalidHomomorphism(format!(
                "image {v} out of range"
            )));
        }
        for a in source.elements() {
            for b in source.elements() {
                if self.map[source.mul(a, b)] != target.mul(self.map[a], self.map[b]) {
                    return Err(Error::InvalidHomomorphism(format!(
                        "f({}·{}) differs from f({})·f({})",
                        source.label(a),
                        source.label(b),
                        source.label(a),
                        source.label(b)
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        for &v in &self.map {
            if v >= seen.len() || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Homomorphism {
        let mut map = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y] = x;
        }
        Homomorphism { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// All isomorphisms `source → target`, sorted by their image vectors.
pub fn isomorphisms(source: &FiniteGroup, target: &FiniteGroup) -> Vec<Homomorphism> {
    if source.order() != target.order() {
        return Vec::new();
    }
    let n = source.order();
    let gens = source.generators();
    // Express each element as (earlier element) · generator.
    let mut word: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order_seen = vec![false; n];
    order_seen[source.unit()] = true;
    let mut bfs = vec![source.unit()];
    let mut head = 0;
    while head < bfs.len() {
        let x = bfs[head];
        head += 1;
        for (gi, &g) in gens.iter().enumerate() {
            let y = source.mul(x, g);
            if !order_seen[y] {
                order_seen[y] = true;
                word[y] = Some((x, gi));
                bfs.push(y);
            }
        }
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let k = source.element_order(g);
            target
                .elements()
                .filter(|&t| target.element_order(t) == k)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    if candidates.iter().any(|c| c.is_empty()) {
        return out;
    }
    loop {
        let images: Vec<usize> = choice
            .iter()
            .zip(&candidates)
            .map(|(&c, cs)| cs[c])
            .collect();
        let mut map = vec![usize::MAX; n];
        map[source.unit()] = target.unit();
        for &x in &bfs[1..] {
            let (prev, gi) = word[x].unwrap();
            map[x] = target.mul(map[prev], images[gi]);
        }
        let h = Homomorphism { map };
        if h.is_bijective() && h.validate(source, target).is_ok() {
            out.push(h);
        }
        // advance odometer
        let mut i = choice.len();
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// All automorphisms in canonical (lexicographic image) order.
pub fn automorphisms(g: &FiniteGroup) -> Vec<Homomorphism> {
    isomorphisms(g, g)
}

/// `x ↦ g x g⁻¹`.
pub fn inner_automorphism(group: &FiniteGroup, g: usize) -> Homomorphism {
    Homomorphism {
        map: group.elements().map(|x| group.conj(g, x)).collect(),
    }
}

/// Distinct inner automorphisms, sorted.
pub fn inner_automorphisms(group: &FiniteGroup) -> Vec<Homomorphism> {
    let set: BTreeSet<Homomorphism> = group
        .elements()
        .map(|g| inner_automorphism(group, g))
        .collect();
    set.into_iter().collect()
}

/// A class of automorphisms modulo inner automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterClass {
    pub representative: Homomorphism,
    pub members: Vec<Homomorphism>,
}

/// `Aut(G)` partitioned into cosets of `Inn(G)`, each represented by its
/// least member, classes ordered by representative.
pub fn outer_classes(group: &FiniteGroup) -> Vec<OuterClass> {
    let auts = automorphisms(group);
    let inns = inner_automorphisms(group);
    let mut seen: BTreeSet<Homomorphism> = BTreeSet::new();
    let mut out = Vec::new();
    for a in &auts {
        if seen.contains(a) {
            continue;
        }
        let mut members: Vec<Homomorphism> = inns.iter().map(|i| i.compose(a)).collect();
        members.sort();
        members.dedup();
        for m in &members {
            seen.insert(m.clone());
        }
        out.push(OuterClass {
            representative: members[0].clone(),
            members,
        });
    }
    out
}

/// A subgroup with its inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub group: FiniteGroup,
    /// Image in the ambient group of each subgroup element.
    pub embedding: Homomorphism,
}

impl Subgroup {
    /// Subgroup on a sorted element list closed under the ambient law.
    pub fn from_elements(ambient: &FiniteGroup, elements: Vec<usize>) -> Result<Self> {
        let pos: BTreeMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        for &a in &elements {
            for &b in &elements {
                if !pos.contains_key(&ambient.mul(a, b)) {
                    return Err(Error::InvalidGroup("element set is not closed".into()));
                }
            }
        }
        if !pos.contains_key(&ambient.unit()) {
            return Err(Error::InvalidGroup("element set misses the unit".into()));
        }
        let labels = elements
            .iter()
            .map(|&e| ambient.label(e).to_string())
            .collect();
        let group =
            FiniteGroup::from_law(labels, |a, b| pos[&ambient.mul(elements[a], elements[b])]);
        Ok(Subgroup {
            group,
            embedding: Homomorphism { map: elements },
        })
    }

    /// Position of an ambient element in the subgroup.
    pub fn locate(&self, ambient_element: usize) -> Option<usize> {
        self.embedding.map.binary_search(&ambient_element).ok()
    }
}

pub fn center(group: &FiniteGroup) -> Subgroup {
    let elements: Vec<usize> = group.elements().filter(|&a| group.is_central(a)).collect();
    Subgroup::from_elements(group, elements).expect("the center is a subgroup")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&FiniteGroup::cyclic(2)).len(), 1);
        assert_eq!(automorphisms(&FiniteGroup::cyclic(3)).len(), 2);
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(automorphisms(&s3).len(), 6);
        assert_eq!(inner_automorphisms(&s3).len(), 6);
        assert_eq!(
            automorphisms(&FiniteGroup::by_name("Z2xZ2").unwrap()).len(),
            6
        );
        assert_eq!(automorphisms(&FiniteGroup::quaternion()).len(), 24);
        assert_eq!(automorphisms(&FiniteGroup::dihedral(4)).len(), 8);
    }

    #[test]
    fn outer_class_counts() {
        assert_eq!(outer_classes(&FiniteGroup::symmetric(3)).len(), 1);
        assert_eq!(outer_classes(&FiniteGroup::cyclic(3)).len(), 2);
        assert_eq!(
            outer_classes(&FiniteGroup::by_name("Z2xZ2").unwrap()).len(),
            6
        );
        assert_eq!(outer_classes(&FiniteGroup::quaternion()).len(), 6);
    }

    #[test]
    fn centers() {
        assert_eq!(center(&FiniteGroup::symmetric(3)).group.order(), 1);
        assert_eq!(center(&FiniteGroup::quaternion()).group.order(), 2);
        assert_eq!(center(&FiniteGroup::cyclic(5)).group.order(), 5);
        let dic = FiniteGroup::dicyclic5();
        assert_eq!(dic.order(), 20);
        assert_eq!(center(&dic).group.order(), 2);
    }

    #[test]
    fn transposition_gives_order_two_automorphism() {
        let s3 = FiniteGroup::symmetric(3);
        let t = s3.element("(1 2)").unwrap();
        let phi = inner_automorphism(&s3, t);
        assert!(!phi.is_identity());
        assert!(phi.compose(&phi).is_identity());
    }

    #[test]
    fn named_groups() {
        assert_eq!(FiniteGroup::by_name("Z/4").unwrap().order(), 4);
        assert_eq!(FiniteGroup::by_name("S3").unwrap().order(), 6);
        assert_eq!(FiniteGroup::by_name("D4").unwrap().order(), 8);
        assert!(!FiniteGroup::by_name("D4").unwrap().is_abelian());
        assert!(FiniteGroup::by_name("Z2×Z3").unwrap().is_abelian());
        assert!(FiniteGroup::by_name("nope").is_err());
    }

    #[test]
    fn conjugacy_class_counts() {
        assert_eq!(FiniteGroup::symmetric(3).conjugacy_classes().len(), 3);
        assert_eq!(FiniteGroup::quaternion().conjugacy_classes().len(), 5);
        assert_eq!(FiniteGroup::dicyclic5().conjugacy_classes().len(), 8);
    }

    #[test]
    fn table_validation() {
        let bad = FiniteGroup::from_table(vec!["e", "x"], vec![vec![0, 1], vec![1, 1]]);
        assert!(bad.is_err());
        let z2 = FiniteGroup::from_table(vec!["e", "x"], vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            z2,
            FiniteGroup::from_table(vec!["e", "x"], vec![vec![0, 1], vec![1, 0]]).unwrap()
        );
    }
}
