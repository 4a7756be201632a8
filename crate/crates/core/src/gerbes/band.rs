use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Check, Error, Result};
use crate::groups::{FiniteGroup, Homomorphism};
use crate::space::{bits, mask_of, AbstractNerve, Fnv, Mask};
use crate::torsors::odometer;

/// An element of `K_α` over the intersection of a simplex: one group
/// element per connected component.
pub type Section = Vec<usize>;

/// A band presented over a nerve: a constant group `K_α` for every index and
/// an actual isomorphism `λ_αβ: K_β → K_α` on every component of every
/// inhabited `U_αβ`. Only `α < β` is stored; `λ_βα = λ_αβ⁻¹` and
/// `λ_αα = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Band {
    nerve: AbstractNerve,
    groups: Vec<FiniteGroup>,
    /// Both orders of every inhabited pair.
    lambda: BTreeMap<(usize, usize), Vec<Homomorphism>>,
    id: u64,
}

impl Band {
    pub fn new(
        nerve: &AbstractNerve,
        groups: Vec<FiniteGroup>,
        lambda: BTreeMap<(usize, usize), Vec<Homomorphism>>,
    ) -> Result<Self> {
        nerve.require_connected_cells()?;
        nerve.require_depth(4)?;
        if groups.len() != nerve.len() {
            return Err(Error::InvalidBand(format!(
                "{} groups for {} indices",
                groups.len(),
                nerve.len()
            )));
        }
        for &(a, b) in lambda.keys() {
            if a >= b || !nerve.is_inhabited(mask_of(&[a, b])) {
                return Err(Error::InvalidBand(format!(
                    "λ given for ({a},{b}), which is not an inhabited pair in increasing order"
                )));
            }
        }
        let mut full = BTreeMap::new();
        for &pair in nerve.simplices(2) {
            let ix: Vec<usize> = bits(pair).collect();
            let (a, b) = (ix[0], ix[1]);
            let name = nerve.format_simplex(pair);
            let maps = lambda
                .get(&(a, b))
                .ok_or_else(|| Error::MissingData(format!("λ over {name}")))?;
            if maps.len() != nerve.component_count(pair) {
                return Err(Error::InvalidBand(format!(
                    "λ over {name} has {} components, the intersection has {}",
                    maps.len(),
                    nerve.component_count(pair)
                )));
            }
            for m in maps {
                m.validate(&groups[b], &groups[a])
                    .map_err(|e| Error::InvalidBand(format!("λ over {name}: {e}")))?;
                if !m.is_bijective() {
                    return Err(Error::InvalidBand(format!(
                        "λ over {name} is not an isomorphism"
                    )));
                }
            }
            full.insert((b, a), maps.iter().map(Homomorphism::inverse).collect());
            full.insert((a, b), maps.clone());
        }
        let mut h = Fnv::new();
        h.u64(nerve.id());
        for g in &groups {
            for l in g.labels() {
                h.bytes(l.as_bytes());
                h.bytes(&[0]);
            }
            h.bytes(&[1]);
        }
        for (k, maps) in &full {
            h.u64(k.0 as u64);
            h.u64(k.1 as u64);
            for m in maps {
                for &v in m.map() {
                    h.u64(v as u64);
                }
            }
        }
        Ok(Band {
            nerve: nerve.clone(),
            groups,
            lambda: full,
            id: h.finish(),
        })
    }

    /// The same group everywhere, glued by identities.
    pub fn constant(nerve: &AbstractNerve, group: &FiniteGroup) -> Result<Self> {
        let mut lambda = BTreeMap::new();
        for &pair in nerve.simplices(2) {
            let ix: Vec<usize> = bits(pair).collect();
            lambda.insert(
                (ix[0], ix[1]),
                vec![Homomorphism::identity(group); nerve.component_count(pair)],
            );
        }
        Band::new(nerve, vec![group.clone(); nerve.len()], lambda)
    }

    pub fn nerve(&self) -> &AbstractNerve {
        &self.nerve
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn groups(&self) -> &[FiniteGroup] {
        &self.groups
    }

    pub fn group(&self, alpha: usize) -> &FiniteGroup {
        &self.groups[alpha]
    }

    /// `λ_αβ` per component of `U_αβ`, for `α ≠ β` in either order.
    pub fn lambda(&self, alpha: usize, beta: usize) -> &[Homomorphism] {
        &self.lambda[&(alpha, beta)]
    }

    /// Whether both presentations use the same nerve and groups.
    pub fn same_groups(&self, other: &Band) -> bool {
        self.nerve.id() == other.nerve.id() && self.groups == other.groups
    }

    /// Whether every `λ_αβ` is the identity of one common group.
    pub fn is_trivially_glued(&self) -> bool {
        self.groups.windows(2).all(|w| w[0] == w[1])
            && self.lambda.values().flatten().all(|m| m.is_identity())
    }

    pub fn components(&self, simplex: Mask) -> usize {
        self.nerve.component_count(simplex)
    }

    pub fn unit(&self, alpha: usize, simplex: Mask) -> Section {
        vec![self.groups[alpha].unit(); self.components(simplex)]
    }

    pub fn mul(&self, alpha: usize, a: &[usize], b: &[usize]) -> Section {
        let g = &self.groups[alpha];
        a.iter().zip(b).map(|(&x, &y)| g.mul(x, y)).collect()
    }

    pub fn inv(&self, alpha: usize, a: &[usize]) -> Section {
        let g = &self.groups[alpha];
        a.iter().map(|&x| g.inv(x)).collect()
    }

    pub fn is_unit(&self, alpha: usize, a: &[usize]) -> bool {
        let u = self.groups[alpha].unit();
        a.iter().all(|&x| x == u)
    }

    pub fn is_central(&self, alpha: usize, a: &[usize]) -> bool {
        a.iter().all(|&x| self.groups[alpha].is_central(x))
    }

    /// Restriction of a section over `face` to the larger `simplex`.
    pub fn restrict(&self, face: Mask, simplex: Mask, s: &[usize]) -> Section {
        if face == simplex {
            return s.to_vec();
        }
        (0..self.components(simplex))
            .map(|c| s[self.nerve.face_component(simplex, c, face)])
            .collect()
    }

    /// `λ_αβ` applied to a section of `K_β` over `simplex ∋ α, β`.
    pub fn apply_lambda(&self, alpha: usize, beta: usize, simplex: Mask, s: &[usize]) -> Section {
        if alpha == beta {
            return s.to_vec();
        }
        let maps = &self.lambda[&(alpha, beta)];
        let pair = mask_of(&[alpha, beta]);
        s.iter()
            .enumerate()
            .map(|(c, &x)| maps[self.nerve.face_component(simplex, c, pair)].apply(x))
            .collect()
    }

    /// `λ_αβ` on component `c` of `simplex`, as an element map.
    pub(crate) fn lambda_on(
        &self,
        alpha: usize,
        beta: usize,
        simplex: Mask,
        c: usize,
    ) -> Option<&Homomorphism> {
        if alpha == beta {
            return None;
        }
        let pair = mask_of(&[alpha, beta]);
        Some(&self.lambda[&(alpha, beta)][self.nerve.face_component(simplex, c, pair)])
    }

    /// All sections of `K_α` over `simplex`, ascending.
    pub fn sections(&self, alpha: usize, simplex: Mask) -> Vec<Section> {
        let k = self.components(simplex);
        let radix = vec![self.groups[alpha].order(); k];
        let mut digits = vec![0; k];
        let mut out = Vec::new();
        loop {
            out.push(digits.clone());
            if !odometer(&mut digits, &radix) {
                return out;
            }
        }
    }

    /// Central sections of `K_α` over `simplex`, ascending.
    pub fn central_sections(&self, alpha: usize, simplex: Mask) -> Vec<Section> {
        let g = &self.groups[alpha];
        let center: Vec<usize> = g.elements().filter(|&x| g.is_central(x)).collect();
        let k = self.components(simplex);
        let radix = vec![center.len(); k];
        let mut digits = vec![0; k];
        let mut out = Vec::new();
        loop {
            out.push(digits.iter().map(|&d| center[d]).collect());
            if !odometer(&mut digits, &radix) {
                return out;
            }
        }
    }

    /// Components joined by `|`.
    pub fn format_section(&self, alpha: usize, s: &[usize]) -> String {
        let g = &self.groups[alpha];
        let parts: Vec<&str> = s.iter().map(|&x| g.label(x)).collect();
        parts.join("|")
    }

    pub fn parse_section(&self, alpha: usize, simplex: Mask, text: &str) -> Result<Section> {
        let g = &self.groups[alpha];
        let out = text
            .split('|')
            .map(|p| g.element(p.trim()))
            .collect::<Result<Section>>()?;
        if out.len() != self.components(simplex) {
            return Err(Error::InvalidCocycle(format!(
                "`{text}` has {} components, {} has {}",
                out.len(),
                self.nerve.format_simplex(simplex),
                self.components(simplex)
            )));
        }
        Ok(out)
    }

    pub(crate) fn check_section(&self, alpha: usize, simplex: Mask, s: &[usize]) -> Result<()> {
        if s.len() != self.components(simplex) || s.iter().any(|&x| x >= self.groups[alpha].order())
        {
            return Err(Error::InvalidCocycle(format!(
                "malformed value over {}",
                self.nerve.format_simplex(simplex)
            )));
        }
        Ok(())
    }
}

/// Sorted inhabited simplices of one size with their positions.
#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub masks: Vec<Mask>,
    pub pos: BTreeMap<Mask, usize>,
}

impl Level {
    pub fn new(nerve: &AbstractNerve, size: usize) -> Self {
        let masks = nerve.simplices(size).to_vec();
        let pos = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Level { masks, pos }
    }
}

pub(crate) fn first(mask: Mask) -> usize {
    mask.trailing_zeros() as usize
}

/// Value at an ordered triple from the value `v` at its sorted version,
/// following `f_βα = f_αβ⁻¹`: for `a < b < c` the six orders give
/// `g`, `g⁻¹`, `λ_ba(g⁻¹)`, `λ_ba(g)`, `λ_ca(g)`, `λ_ca(g⁻¹)`.
pub(crate) fn extend_value(band: &Band, v: &[usize], t: [usize; 3]) -> Section {
    let supp = mask_of(&t);
    let [a, b, c] = t;
    if a == b || b == c || a == c {
        return band.unit(a, supp);
    }
    let mut s = t;
    s.sort_unstable();
    let [x, y, z] = s;
    let inv = || band.inv(x, v);
    match (a, b, c) {
        _ if (a, b, c) == (x, y, z) => v.to_vec(),
        _ if (a, b, c) == (x, z, y) => inv(),
        _ if (a, b, c) == (y, x, z) => band.apply_lambda(y, x, supp, &inv()),
        _ if (a, b, c) == (y, z, x) => band.apply_lambda(y, x, supp, v),
        _ if (a, b, c) == (z, x, y) => band.apply_lambda(z, x, supp, v),
        _ => band.apply_lambda(z, x, supp, &inv()),
    }
}

/// A normal 2-cocycle: the band presentation and `g_αβγ ∈ K_α(U_αβγ)` for
/// every inhabited `α < β < γ`. Values at other orders follow from the
/// convention `f_βα = f_αβ⁻¹` (see [`Cocycle2::value`]); values at tuples
/// with a repeated index are units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle2 {
    band: Arc<Band>,
    g: Vec<Section>,
}

impl Cocycle2 {
    /// Checks shapes only; use [`check_cocycle2`] for the identities.
    pub fn new(band: Arc<Band>, g: Vec<Section>) -> Result<Self> {
        let triples = band.nerve.simplices(3);
        if g.len() != triples.len() {
            return Err(Error::InvalidCocycle(format!(
                "{} values for {} inhabited triples",
                g.len(),
                triples.len()
            )));
        }
        for (s, &t) in g.iter().zip(triples) {
            band.check_section(first(t), t, s)?;
        }
        Ok(Cocycle2 { band, g })
    }

    pub fn unit(band: Arc<Band>) -> Self {
        let g = band
            .nerve
            .simplices(3)
            .iter()
            .map(|&t| band.unit(first(t), t))
            .collect();
        Cocycle2 { band, g }
    }

    pub fn band(&self) -> &Arc<Band> {
        &self.band
    }

    /// Values at the sorted inhabited triples, in canonical order.
    pub fn values(&self) -> &[Section] {
        &self.g
    }

    pub fn into_values(self) -> Vec<Section> {
        self.g
    }

    pub fn is_unit(&self) -> bool {
        self.band
            .nerve
            .simplices(3)
            .iter()
            .zip(&self.g)
            .all(|(&t, s)| self.band.is_unit(first(t), s))
    }

    /// `g` at any ordered triple whose support is inhabited, as a section
    /// over the support.
    pub fn value(&self, t: [usize; 3]) -> Section {
        let supp = mask_of(&t);
        if supp.count_ones() < 3 {
            return self.band.unit(t[0], supp);
        }
        let i = self
            .band
            .nerve
            .simplices(3)
            .iter()
            .position(|&m| m == supp)
            .expect("inhabited triple");
        extend_value(&self.band, &self.g[i], t)
    }

    /// The full table over ordered triples.
    pub fn ordered(&self) -> OrderedCocycle2 {
        let level = Level::new(&self.band.nerve, 3);
        let mut values = BTreeMap::new();
        for t in ordered_tuples::<3>(&self.band.nerve) {
            let supp = mask_of(&t);
            let v = match level.pos.get(&supp) {
                Some(&i) => extend_value(&self.band, &self.g[i], t),
                None => self.band.unit(t[0], supp),
            };
            values.insert(t, v);
        }
        OrderedCocycle2 {
            band: self.band.clone(),
            values,
        }
    }

    /// One line per triple, `(α,β,γ)=value`.
    pub fn format(&self) -> String {
        let nerve = &self.band.nerve;
        let parts: Vec<String> = nerve
            .simplices(3)
            .iter()
            .zip(&self.g)
            .map(|(&t, s)| {
                format!(
                    "{}={}",
                    nerve.format_simplex(t),
                    self.band.format_section(first(t), s)
                )
            })
            .collect();
        parts.join(" ")
    }
}

/// `g` at every ordered triple with inhabited support, without any
/// convention relating the orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedCocycle2 {
    pub band: Arc<Band>,
    pub values: BTreeMap<[usize; 3], Section>,
}

/// Ordered `K`-tuples of indices whose support is an inhabited simplex,
/// grouped by support in canonical order.
pub(crate) fn ordered_tuples<const K: usize>(nerve: &AbstractNerve) -> Vec<[usize; K]> {
    let mut out = Vec::new();
    for size in 1..=K.min(nerve.depth()) {
        for &s in nerve.simplices(size) {
            out.extend(tuples_with_support::<K>(s));
        }
    }
    out
}

pub(crate) fn tuples_with_support<const K: usize>(support: Mask) -> Vec<[usize; K]> {
    let ix: Vec<usize> = bits(support).collect();
    let radix = vec![ix.len(); K];
    let mut digits = vec![0; K];
    let mut out = Vec::new();
    loop {
        let mut t = [0; K];
        for (i, &d) in digits.iter().enumerate() {
            t[i] = ix[d];
        }
        if mask_of(&t) == support {
            out.push(t);
        }
        if !odometer(&mut digits, &radix) {
            return out;
        }
    }
}

/// Identity (i) at an ordered triple: `λ_αβ λ_βγ = (g_αβγ)_* λ_αγ` on every
/// component, with `g` the value over the support.
pub(crate) fn identity_one_holds(band: &Band, t: [usize; 3], g: &[usize]) -> bool {
    let [a, b, c] = t;
    let supp = mask_of(&t);
    let (ka, kc) = (&band.groups[a], &band.groups[c]);
    (0..band.components(supp)).all(|comp| {
        let ab = band.lambda_on(a, b, supp, comp);
        let bc = band.lambda_on(b, c, supp, comp);
        let ac = band.lambda_on(a, c, supp, comp);
        let ap = |h: Option<&Homomorphism>, x: usize| h.map_or(x, |h| h.apply(x));
        kc.elements()
            .all(|x| ap(ab, ap(bc, x)) == ka.conj(g[comp], ap(ac, x)))
    })
}

/// Identity (ii) at an ordered quadruple:
/// `g_αβγ g_αγδ = λ_αβ(g_βγδ) g_αβδ` over the support.
pub(crate) fn identity_two_holds(
    band: &Band,
    q: [usize; 4],
    lookup: &impl Fn([usize; 3]) -> Section,
) -> bool {
    let [a, b, c, d] = q;
    let supp = mask_of(&q);
    let at = |t: [usize; 3]| band.restrict(mask_of(&t), supp, &lookup(t));
    let left = band.mul(a, &at([a, b, c]), &at([a, c, d]));
    let right = band.mul(
        a,
        &band.apply_lambda(a, b, supp, &at([b, c, d])),
        &at([a, b, d]),
    );
    left == right
}

/// Verifies (i), (ii) and normality at every ordered tuple and reports the
/// first failure.
pub fn check_ordered(c: &OrderedCocycle2) -> Check {
    let band = &c.band;
    let nerve = &band.nerve;
    let triples = ordered_tuples::<3>(nerve);
    for t in &triples {
        let supp = mask_of(t);
        match c.values.get(t) {
            None => return Check::Fails(format!("no value at {}", nerve.format_tuple(t))),
            Some(v)
                if v.len() != band.components(supp)
                    || v.iter().any(|&x| x >= band.groups[t[0]].order()) =>
            {
                return Check::Fails(format!("malformed value at {}", nerve.format_tuple(t)))
            }
            _ => {}
        }
    }
    for t in &triples {
        if (t[0] == t[1] || t[1] == t[2]) && !band.is_unit(t[0], &c.values[t]) {
            return Check::Fails(format!("normality fails at {}", nerve.format_tuple(t)));
        }
    }
    for t in &triples {
        if !identity_one_holds(band, *t, &c.values[t]) {
            return Check::Fails(format!("identity (i) fails at {}", nerve.format_tuple(t)));
        }
    }
    let lookup = |t: [usize; 3]| c.values[&t].clone();
    for q in ordered_tuples::<4>(nerve) {
        if !identity_two_holds(band, q, &lookup) {
            return Check::Fails(format!("identity (ii) fails at {}", nerve.format_tuple(&q)));
        }
    }
    Check::Holds
}

/// Identities (i), (ii) and normality, checked exhaustively over all
/// ordered tuples of the canonical extension.
pub fn check_cocycle2(c: &Cocycle2) -> Check {
    check_ordered(&c.ordered())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cocycle_holds() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::symmetric(3)).unwrap());
        assert!(check_cocycle2(&Cocycle2::unit(band)).holds());
    }

    #[test]
    fn non_central_value_fails_identity_one() {
        let nerve = AbstractNerve::tetrahedron();
        let s3 = FiniteGroup::symmetric(3);
        let band = Arc::new(Band::constant(&nerve, &s3).unwrap());
        let mut g = Cocycle2::unit(band.clone()).into_values();
        g[0] = vec![1];
        let c = Cocycle2::new(band, g).unwrap();
        let d = check_cocycle2(&c);
        assert_eq!(d.diagnostic(), Some("identity (i) fails at (U0,U1,U2)"));
    }

    #[test]
    fn every_z2_cochain_on_the_tetrahedron_is_a_cocycle() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::cyclic(2)).unwrap());
        for bitsv in 0..16usize {
            let g = (0..4).map(|i| vec![bitsv >> i & 1]).collect();
            assert!(check_cocycle2(&Cocycle2::new(band.clone(), g).unwrap()).holds());
        }
    }

    #[test]
    fn single_entry_mutation_of_ordered_table_fails() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::cyclic(2)).unwrap());
        let mut t = Cocycle2::unit(band).ordered();
        t.values.insert([0, 1, 2], vec![1]);
        assert!(!check_ordered(&t).holds());
    }
}
