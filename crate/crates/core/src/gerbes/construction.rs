use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::band::{check_cocycle2, check_ordered, first, Band, Cocycle2, OrderedCocycle2, Section};
use crate::error::{Check, Error, Result};
use crate::groupoid::{Arrow, Functor, Groupoid};
use crate::groups::Homomorphism;
use crate::space::{bits, mask_of, Mask, NerveBase};

/// The sheaf of groupoids of a cocycle, stalk by stalk: at a point `x` the
/// objects are the indices `α` with `x ∈ U_α`, an arrow `(x,β) → (x,α)` is
/// an element of `K_α`, and `k ∘ l = k · λ_αβ(l) · g_αβγ(x)`.
#[derive(Clone, Debug)]
pub struct GerbeGroupoid {
    band: Arc<Band>,
    base: NerveBase,
    /// Per point, the indices whose member contains it, ascending.
    objects: Vec<Vec<usize>>,
    stalks: Vec<Groupoid>,
    /// Per point, the raw arrow `(target, source, k)` of each normal form.
    decode: Vec<BTreeMap<Arrow, (usize, usize, usize)>>,
    encode: Vec<BTreeMap<(usize, usize, usize), Arrow>>,
    /// Stalk maps for `x < y`.
    restrictions: BTreeMap<(usize, usize), Functor>,
}

/// Value of a section over `simplex` at point `x`.
fn at_point(band: &Band, base: &NerveBase, simplex: Mask, s: &[usize], x: usize) -> usize {
    let c = band
        .nerve()
        .component_at(base, simplex, x)
        .expect("point lies in the intersection");
    s[c]
}

impl GerbeGroupoid {
    /// Builds the stalks from an ordered table. Fails when the composition
    /// is not associative or lacks identities or inverses.
    pub fn from_ordered(table: &OrderedCocycle2) -> Result<Self> {
        let band = table.band.clone();
        let base = band.nerve().realize()?;
        let space = &base.space;
        let k = band.nerve().len();
        let mut objects = Vec::with_capacity(space.len());
        let mut stalks = Vec::with_capacity(space.len());
        let mut decode = Vec::with_capacity(space.len());
        let mut encode = Vec::with_capacity(space.len());
        for x in 0..space.len() {
            let obs: Vec<usize> = (0..k)
                .filter(|&a| base.cover.member(a).contains(x))
                .collect();
            let n = obs.len();
            let mut raw = Vec::new();
            let mut ends = Vec::new();
            for t in 0..n {
                for s in 0..n {
                    for e in band.group(obs[t]).elements() {
                        raw.push((obs[t], obs[s], e));
                        ends.push((s, t));
                    }
                }
            }
            let index: BTreeMap<(usize, usize, usize), usize> =
                raw.iter().enumerate().map(|(i, &r)| (r, i)).collect();
            let identity: Vec<usize> = obs
                .iter()
                .map(|&a| index[&(a, a, band.group(a).unit())])
                .collect();
            let value = |t: [usize; 3]| -> usize {
                let v = &table.values[&t];
                at_point(&band, &base, mask_of(&t), v, x)
            };
            let lam = |a: usize, b: usize, l: usize| -> usize {
                if a == b {
                    return l;
                }
                let pair = mask_of(&[a, b]);
                band.lambda(a, b)[band.nerve().component_at(&base, pair, x).unwrap()].apply(l)
            };
            let compose = |gi: usize, fi: usize| -> usize {
                let (a, b, kk) = raw[gi];
                let (_, c, l) = raw[fi];
                let ka = band.group(a);
                let e = ka.mul(ka.mul(kk, lam(a, b, l)), value([a, b, c]));
                index[&(a, c, e)]
            };
            let labels: Vec<String> = obs
                .iter()
                .map(|&a| String::from(band.nerve().label(a)))
                .collect();
            let (g, normal) =
                Groupoid::from_arrows(labels, &ends, &identity, compose).map_err(|e| {
                    Error::InvalidCocycle(format!("composition at point {}: {e}", space.label(x)))
                })?;
            decode.push(normal.iter().zip(&raw).map(|(a, &r)| (*a, r)).collect());
            encode.push(raw.iter().zip(&normal).map(|(&r, a)| (r, *a)).collect());
            objects.push(obs);
            stalks.push(g);
        }
        let mut gg = GerbeGroupoid {
            band,
            base,
            objects,
            stalks,
            decode,
            encode,
            restrictions: BTreeMap::new(),
        };
        let space = gg.base.space.clone();
        for x in 0..space.len() {
            for y in bits(space.up_set(x)) {
                if y == x {
                    continue;
                }
                let f = Functor::from_arrow_map(&gg.stalks[x], &gg.stalks[y], |a| {
                    let (ta, sb, e) = gg.decode[x][a];
                    Ok(gg.encode[y][&(ta, sb, e)])
                })?;
                gg.restrictions.insert((x, y), f);
            }
        }
        Ok(gg)
    }

    pub fn band(&self) -> &Arc<Band> {
        &self.band
    }

    pub fn base(&self) -> &NerveBase {
        &self.base
    }

    pub fn stalk(&self, x: usize) -> &Groupoid {
        &self.stalks[x]
    }

    pub fn stalk_objects(&self, x: usize) -> &[usize] {
        &self.objects[x]
    }

    /// The object `(x, α)`.
    pub fn object(&self, x: usize, alpha: usize) -> Option<usize> {
        self.objects[x].iter().position(|&a| a == alpha)
    }

    /// The arrow `(x, β) → (x, α)` given by `k ∈ K_α`.
    pub fn arrow(&self, x: usize, alpha: usize, beta: usize, k: usize) -> Option<Arrow> {
        self.encode[x].get(&(alpha, beta, k)).copied()
    }

    /// `(α, β, k)` for an arrow `(x, β) → (x, α)`.
    pub fn decode(&self, x: usize, a: &Arrow) -> (usize, usize, usize) {
        self.decode[x][a]
    }

    pub fn restriction(&self, x: usize, y: usize) -> Option<&Functor> {
        self.restrictions.get(&(x, y))
    }

    /// Every stalk is nonempty and connected.
    pub fn gerbe_check(&self) -> Check {
        for (x, g) in self.stalks.iter().enumerate() {
            if g.object_count() == 0 {
                return Check::Fails(format!("stalk at {} is empty", self.base.space.label(x)));
            }
            if g.components().len() != 1 {
                return Check::Fails(format!(
                    "stalk at {} is not connected",
                    self.base.space.label(x)
                ));
            }
        }
        Check::Holds
    }
}

/// The gerbe groupoid of a valid cocycle.
pub fn cocycle_to_groupoid(c: &Cocycle2) -> Result<GerbeGroupoid> {
    if let Check::Fails(m) = check_cocycle2(c) {
        return Err(Error::InvalidCocycle(m));
    }
    GerbeGroupoid::from_ordered(&c.ordered())
}

/// Whether the composition built from an ordered table is associative with
/// identities and inverses at every point.
pub fn composition_check(table: &OrderedCocycle2) -> Result<Check> {
    match GerbeGroupoid::from_ordered(table) {
        Ok(_) => Ok(Check::Holds),
        Err(Error::InvalidCocycle(m)) => Ok(Check::Fails(m)),
        Err(e) => Err(e),
    }
}

/// Objects `a_α`, arrows `f_αβ: a_β → a_α` for `α < β` and band
/// isomorphisms `θ_α: Aut(a_α) → K_α`, all given point by point.
/// `f_βα = f_αβ⁻¹` and `f_αα = 1` are implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandedGerbePresentation {
    /// `(α, x)` to the object of the stalk at `x`.
    pub objects: BTreeMap<(usize, usize), usize>,
    /// `(α, β, x)` to `f_αβ` at `x`, for `α < β`.
    pub arrows: BTreeMap<(usize, usize, usize), Arrow>,
    /// `(α, x)` to `θ_α` at `x`, from the vertex group of `a_α(x)`.
    pub theta: BTreeMap<(usize, usize), Homomorphism>,
}

impl BandedGerbePresentation {
    /// `a_α = α`, `f_αβ = 1 ∈ K_α` and `θ_α(k) = k`.
    pub fn canonical(g: &GerbeGroupoid) -> Result<Self> {
        let band = &g.band;
        let mut objects = BTreeMap::new();
        let mut arrows = BTreeMap::new();
        let mut theta = BTreeMap::new();
        for x in 0..g.stalks.len() {
            let stalk = &g.stalks[x];
            for &a in &g.objects[x] {
                let o = g.object(x, a).unwrap();
                objects.insert((a, x), o);
                let vg = stalk.vertex_group(o);
                let map = vg
                    .elements()
                    .map(|e| {
                        g.decode(
                            x,
                            &Arrow {
                                source: o,
                                target: o,
                                element: e,
                            },
                        )
                        .2
                    })
                    .collect();
                theta.insert((a, x), Homomorphism::new(vg, band.group(a), map)?);
                for &b in &g.objects[x] {
                    if a < b {
                        arrows.insert((a, b, x), g.arrow(x, a, b, band.group(a).unit()).unwrap());
                    }
                }
            }
        }
        Ok(BandedGerbePresentation {
            objects,
            arrows,
            theta,
        })
    }

    fn f(&self, g: &GerbeGroupoid, a: usize, b: usize, x: usize) -> Arrow {
        let stalk = &g.stalks[x];
        if a == b {
            stalk.identity(self.objects[&(a, x)])
        } else if a < b {
            self.arrows[&(a, b, x)]
        } else {
            stalk.inverse(&self.arrows[&(b, a, x)])
        }
    }

    /// Replaces `θ_α` by `ρ_α` with `θ_α = ρ_α (e_α)_*` and `f_αβ` by
    /// `e_α f_αβ e_β⁻¹`, where `e_α = θ_α⁻¹(ε_α)` for `ε_α ∈ K_α(U_α)`.
    pub fn rechoose_theta(&self, g: &GerbeGroupoid, eps: &[Section]) -> Result<Self> {
        self.change(g, eps, true)
    }

    /// Replaces `a_α` by `b_α = a_α` along `e_α: b_α → a_α`, so
    /// `θ̄_α = θ_α (e_α)_*` and `f̄_αβ = e_α⁻¹ f_αβ e_β`, with
    /// `e_α = θ_α⁻¹(ε_α)`.
    pub fn replace_objects(&self, g: &GerbeGroupoid, eps: &[Section]) -> Result<Self> {
        self.change(g, eps, false)
    }

    fn change(&self, g: &GerbeGroupoid, eps: &[Section], theta_case: bool) -> Result<Self> {
        let band = &g.band;
        let nerve = band.nerve();
        if eps.len() != nerve.len() {
            return Err(Error::InvalidPresentation(format!(
                "{} values for {} indices",
                eps.len(),
                nerve.len()
            )));
        }
        for (a, s) in eps.iter().enumerate() {
            band.check_section(a, 1u64 << a, s)?;
        }
        // e_α at each point, as an arrow
        let mut e = BTreeMap::new();
        for (&(a, x), th) in &self.theta {
            let value = at_point(band, &g.base, 1u64 << a, &eps[a], x);
            let local = th.inverse().apply(value);
            let o = self.objects[&(a, x)];
            e.insert(
                (a, x),
                Arrow {
                    source: o,
                    target: o,
                    element: local,
                },
            );
        }
        let mut out = self.clone();
        for (&(a, x), th) in &self.theta {
            let stalk = &g.stalks[x];
            let ea = e[&(a, x)];
            let vg = stalk.vertex_group(ea.source);
            // conjugation by e_α on Aut(a_α), inverse for ρ
            let conj = |u: usize| {
                let arrow = Arrow {
                    source: ea.source,
                    target: ea.source,
                    element: u,
                };
                let r = if theta_case {
                    stalk.compose(&stalk.compose(&stalk.inverse(&ea), &arrow)?, &ea)?
                } else {
                    stalk.compose(&stalk.compose(&ea, &arrow)?, &stalk.inverse(&ea))?
                };
                Ok::<usize, Error>(r.element)
            };
            let map = vg
                .elements()
                .map(|u| conj(u).map(|v| th.apply(v)))
                .collect::<Result<Vec<_>>>()?;
            out.theta
                .insert((a, x), Homomorphism::new(vg, band.group(a), map)?);
        }
        for (&(a, b, x), f) in &self.arrows {
            let stalk = &g.stalks[x];
            let (ea, eb) = (e[&(a, x)], e[&(b, x)]);
            let nf = if theta_case {
                stalk.compose(&stalk.compose(&ea, f)?, &stalk.inverse(&eb))?
            } else {
                stalk.compose(&stalk.compose(&stalk.inverse(&ea), f)?, &eb)?
            };
            out.arrows.insert((a, b, x), nf);
        }
        Ok(out)
    }
}

/// `g_αβγ = θ_α(f_αβ f_βγ f_αγ⁻¹)`, after checking that the presentation is
/// complete, compatible with the stalk maps and that every square
/// `λ_αβ θ_β = θ_α (f_αβ)_*` commutes on the nose.
pub fn groupoid_to_cocycle(g: &GerbeGroupoid, p: &BandedGerbePresentation) -> Result<Cocycle2> {
    let band = &g.band;
    let nerve = band.nerve();
    let space = &g.base.space;
    let cover = &g.base.cover;
    let name = |x: usize| space.label(x);
    for a in 0..nerve.len() {
        for x in cover.member(a).points() {
            let o = *p.objects.get(&(a, x)).ok_or_else(|| {
                Error::MissingData(format!("object a_{} at {}", nerve.label(a), name(x)))
            })?;
            if o >= g.stalks[x].object_count() {
                return Err(Error::InvalidPresentation(format!(
                    "unknown object at {}",
                    name(x)
                )));
            }
            let th = p.theta.get(&(a, x)).ok_or_else(|| {
                Error::MissingData(format!("θ_{} at {}", nerve.label(a), name(x)))
            })?;
            th.validate(g.stalks[x].vertex_group(o), band.group(a))?;
            if !th.is_bijective() {
                return Err(Error::InvalidPresentation(format!(
                    "θ_{} at {} is not bijective",
                    nerve.label(a),
                    name(x)
                )));
            }
        }
    }
    for &pair in nerve.simplices(2) {
        let [a, b] = [first(pair), 63 - pair.leading_zeros() as usize];
        for x in bits(cover.intersection(pair)) {
            let f = p.arrows.get(&(a, b, x)).ok_or_else(|| {
                Error::MissingData(format!(
                    "f over {} at {}",
                    nerve.format_simplex(pair),
                    name(x)
                ))
            })?;
            if !g.stalks[x].is_arrow(f)
                || f.source != p.objects[&(b, x)]
                || f.target != p.objects[&(a, x)]
            {
                return Err(Error::InvalidPresentation(format!(
                    "f over {} at {} is not an arrow a_β → a_α",
                    nerve.format_simplex(pair),
                    name(x)
                )));
            }
        }
    }
    // compatibility with the stalk maps
    for (&(x, y), r) in &g.restrictions {
        let (sx, sy) = (&g.stalks[x], &g.stalks[y]);
        for a in 0..nerve.len() {
            if !cover.member(a).contains(x) {
                continue;
            }
            let (ox, oy) = (p.objects[&(a, x)], p.objects[&(a, y)]);
            if r.object(ox) != oy {
                return Err(Error::InvalidPresentation(format!(
                    "a_{} does not restrict from {} to {}",
                    nerve.label(a),
                    name(x),
                    name(y)
                )));
            }
            let (tx, ty) = (&p.theta[&(a, x)], &p.theta[&(a, y)]);
            for e in sx.vertex_group(ox).elements() {
                let img = r.apply(
                    sx,
                    sy,
                    &Arrow {
                        source: ox,
                        target: ox,
                        element: e,
                    },
                );
                if ty.apply(img.element) != tx.apply(e) {
                    return Err(Error::InvalidPresentation(format!(
                        "θ_{} does not restrict from {} to {}",
                        nerve.label(a),
                        name(x),
                        name(y)
                    )));
                }
            }
        }
        for (&(a, b, z), f) in &p.arrows {
            if z == x && p.arrows.get(&(a, b, y)) != Some(&r.apply(sx, sy, f)) {
                return Err(Error::InvalidPresentation(format!(
                    "f_{}{} does not restrict from {} to {}",
                    nerve.label(a),
                    nerve.label(b),
                    name(x),
                    name(y)
                )));
            }
        }
    }
    // squares
    for &pair in nerve.simplices(2) {
        let [a, b] = [first(pair), 63 - pair.leading_zeros() as usize];
        for x in bits(cover.intersection(pair)) {
            let stalk = &g.stalks[x];
            let f = p.arrows[&(a, b, x)];
            let comp = nerve.component_at(&g.base, pair, x).unwrap();
            let lam = &band.lambda(a, b)[comp];
            let ob = p.objects[&(b, x)];
            for e in stalk.vertex_group(ob).elements() {
                let u = Arrow {
                    source: ob,
                    target: ob,
                    element: e,
                };
                let moved = stalk.compose(&stalk.compose(&f, &u)?, &stalk.inverse(&f))?;
                if lam.apply(p.theta[&(b, x)].apply(e)) != p.theta[&(a, x)].apply(moved.element) {
                    return Err(Error::InvalidPresentation(format!(
                        "square λ θ = θ f_* fails over {} at {}; re-choose f by an automorphism",
                        nerve.format_simplex(pair),
                        name(x)
                    )));
                }
            }
        }
    }
    let mut values = Vec::new();
    for &t in nerve.simplices(3) {
        let ix: Vec<usize> = bits(t).collect();
        let (a, b, c) = (ix[0], ix[1], ix[2]);
        let mut s: Vec<Option<usize>> = vec![None; band.components(t)];
        for x in bits(cover.intersection(t)) {
            let stalk = &g.stalks[x];
            let h = stalk.compose(
                &stalk.compose(&p.f(g, a, b, x), &p.f(g, b, c, x))?,
                &stalk.inverse(&p.f(g, a, c, x)),
            )?;
            let v = p.theta[&(a, x)].apply(h.element);
            let comp = nerve.component_at(&g.base, t, x).unwrap();
            match s[comp] {
                None => s[comp] = Some(v),
                Some(w) if w != v => {
                    return Err(Error::InvalidPresentation(format!(
                        "g over {} is not constant on a component",
                        nerve.format_simplex(t)
                    )))
                }
                _ => {}
            }
        }
        values.push(
            s.into_iter()
                .map(|v| v.expect("inhabited component"))
                .collect(),
        );
    }
    let c = Cocycle2::new(band.clone(), values)?;
    if let Check::Fails(m) = check_cocycle2(&c) {
        return Err(Error::Internal(format!(
            "cocycle read off a gerbe fails: {m}"
        )));
    }
    Ok(c)
}

/// Whether the ordered table satisfies the identities exactly when its
/// composition is associative; used to cross-check the two criteria.
pub fn associativity_agrees(table: &OrderedCocycle2) -> Result<bool> {
    Ok(check_ordered(table).holds() == composition_check(table)?.holds())
}

/// One of the four changes of choice that relate cocycles of one gerbe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recoordination {
    /// New arrows `k_αβ f_αβ`: `h = k_αβ λ_αβ(k_βγ) g_αβγ k_αγ⁻¹`, with
    /// `λ` replaced by `(k_αβ)_* λ_αβ`.
    Arrows(Vec<Section>),
    /// New band isomorphisms `θ_α (e_α)_*⁻¹` with `e_α` given in `K_α(U_α)`.
    Theta(Vec<Section>),
    /// A central twist `m_αβ λ_αβ(m_βγ) g_αβγ m_αγ⁻¹`, keeping `λ`.
    Central(Vec<Section>),
    /// New objects along `e_α`, given in `K_α(U_α)`.
    Objects(Vec<Section>),
}

/// The cocycle after a change of choice, with the pair family relating it
/// to the input (units for the changes that leave the cocycle fixed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recoordinated {
    pub cocycle: Cocycle2,
    pub witness: Vec<Section>,
}

pub fn recoordinate_cocycle(c: &Cocycle2, change: &Recoordination) -> Result<Recoordinated> {
    let band = c.band();
    let units = || -> Vec<Section> {
        band.nerve()
            .simplices(2)
            .iter()
            .map(|&p| band.unit(first(p), p))
            .collect()
    };
    match change {
        Recoordination::Arrows(k) => Ok(Recoordinated {
            cocycle: super::cohomology::twist(c, k)?,
            witness: k.clone(),
        }),
        Recoordination::Central(m) => Ok(Recoordinated {
            cocycle: super::cohomology::central_twist(c, m)?,
            witness: m.clone(),
        }),
        Recoordination::Theta(e) | Recoordination::Objects(e) => {
            let g = cocycle_to_groupoid(c)?;
            let p = BandedGerbePresentation::canonical(&g)?;
            let q = match change {
                Recoordination::Theta(_) => p.rechoose_theta(&g, e)?,
                _ => p.replace_objects(&g, e)?,
            };
            Ok(Recoordinated {
                cocycle: groupoid_to_cocycle(&g, &q)?,
                witness: units(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::space::AbstractNerve;

    #[test]
    fn round_trip_is_exact_for_canonical_choices() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::cyclic(2)).unwrap());
        let c = Cocycle2::new(band, vec![vec![1], vec![0], vec![0], vec![0]]).unwrap();
        let g = cocycle_to_groupoid(&c).unwrap();
        assert!(g.gerbe_check().holds());
        let p = BandedGerbePresentation::canonical(&g).unwrap();
        assert_eq!(groupoid_to_cocycle(&g, &p).unwrap(), c);
    }

    #[test]
    fn rechoices_leave_the_cocycle_unchanged() {
        let nerve = AbstractNerve::tetrahedron();
        let s3 = FiniteGroup::symmetric(3);
        let band = Arc::new(Band::constant(&nerve, &s3).unwrap());
        let c = Cocycle2::unit(band);
        let g = cocycle_to_groupoid(&c).unwrap();
        let p = BandedGerbePresentation::canonical(&g).unwrap();
        let eps: Vec<Section> = (0..4).map(|i| vec![i + 1]).collect();
        let q = p.rechoose_theta(&g, &eps).unwrap();
        assert_eq!(groupoid_to_cocycle(&g, &q).unwrap(), c);
        let r = p.replace_objects(&g, &eps).unwrap();
        assert_eq!(groupoid_to_cocycle(&g, &r).unwrap(), c);
    }

    #[test]
    fn mutated_table_is_not_associative() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::cyclic(2)).unwrap());
        let mut t = Cocycle2::unit(band).ordered();
        assert!(composition_check(&t).unwrap().holds());
        t.values.insert([1, 0, 2], vec![1]);
        assert!(!composition_check(&t).unwrap().holds());
        assert!(associativity_agrees(&t).unwrap());
    }
}
