use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::band::{check_cocycle2, first, identity_one_holds, Band, Cocycle2, Level, Section};
use crate::budget::{product, Budget};
use crate::error::{Check, Error, Result};
use crate::groups::{center, FiniteGroup, Subgroup};
use crate::linalg::solve_mod_p;
use crate::space::{bits, mask_of, AbstractNerve, Mask};

/// An abelian Čech cochain: one value per component of every inhabited
/// simplex with `degree + 1` indices, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<Section>,
}

impl Cochain {
    pub fn unit(nerve: &AbstractNerve, group: &FiniteGroup, degree: usize) -> Self {
        let values = nerve
            .simplices(degree + 1)
            .iter()
            .map(|&s| vec![group.unit(); nerve.component_count(s)])
            .collect();
        Cochain { degree, values }
    }

    pub fn is_unit(&self, group: &FiniteGroup) -> bool {
        self.values.iter().flatten().all(|&x| x == group.unit())
    }
}

fn drop_index(simplex: Mask, i: usize) -> Mask {
    let x = bits(simplex).nth(i).expect("index in range");
    simplex & !(1u64 << x)
}

/// `(dc)_{α₀…α_{n+1}} = ∏ c_{α₀…α̂_i…α_{n+1}}^{(-1)^i}` with values in a
/// constant abelian group.
pub fn cech_coboundary(nerve: &AbstractNerve, group: &FiniteGroup, c: &Cochain) -> Result<Cochain> {
    if !group.is_abelian() {
        return Err(Error::InvalidGroup(String::from(
            "coboundary coefficients must be abelian",
        )));
    }
    let n = c.degree;
    nerve.require_depth(n + 2)?;
    let faces = nerve.simplices(n + 1);
    if c.values.len() != faces.len() {
        return Err(Error::InvalidCocycle(format!(
            "{} values for {} simplices of degree {n}",
            c.values.len(),
            faces.len()
        )));
    }
    for (&s, v) in faces.iter().zip(&c.values) {
        if v.len() != nerve.component_count(s) || v.iter().any(|&x| x >= group.order()) {
            return Err(Error::InvalidCocycle(format!(
                "malformed value over {}",
                nerve.format_simplex(s)
            )));
        }
    }
    let pos: BTreeMap<Mask, usize> = faces.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let values = nerve
        .simplices(n + 2)
        .iter()
        .map(|&s| {
            (0..nerve.component_count(s))
                .map(|comp| {
                    (0..n + 2).fold(group.unit(), |acc, i| {
                        let f = drop_index(s, i);
                        let x = c.values[pos[&f]][nerve.face_component(s, comp, f)];
                        group.mul(acc, if i % 2 == 0 { x } else { group.inv(x) })
                    })
                })
                .collect()
        })
        .collect();
    Ok(Cochain {
        degree: n + 1,
        values,
    })
}

/// For identity `λ` on a constant group, every `g_αβγ` is central and `g`
/// is an ordinary Čech cocycle with values in `Z(K)`. Returns the center
/// and the cocycle in the center's own numbering.
pub fn abelian_reduce(c: &Cocycle2) -> Result<(Subgroup, Cochain)> {
    let band = c.band();
    let nerve = band.nerve();
    if !band.is_trivially_glued() {
        return Err(Error::InvalidBand(String::from(
            "abelian reduction needs one group and identity gluing maps",
        )));
    }
    for (&t, v) in nerve.simplices(3).iter().zip(c.values()) {
        if !band.is_central(first(t), v) {
            return Err(Error::NonCentral(format!(
                "g over {} is not central",
                nerve.format_simplex(t)
            )));
        }
    }
    if let Check::Fails(m) = check_cocycle2(c) {
        return Err(Error::InvalidCocycle(m));
    }
    let z = center(&band.groups()[0]);
    let index: BTreeMap<usize, usize> = z
        .embedding
        .map()
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let values = c
        .values()
        .iter()
        .map(|v| v.iter().map(|x| index[x]).collect())
        .collect();
    let out = Cochain { degree: 2, values };
    if nerve.depth() >= 4 && !cech_coboundary(nerve, &z.group, &out)?.is_unit(&z.group) {
        return Err(Error::Internal(String::from(
            "reduced cocycle fails the abelian relation",
        )));
    }
    Ok((z, out))
}

/// The 3-cochain `ξ` of a band with gluing data `g`, and when `ξ = dζ` is
/// solvable the correction `ζ` with the resulting cocycle `h = ζ g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// `ξ` over every inhabited `α < β < γ < δ`, valued in `Z(K_α)`.
    pub xi: Vec<Section>,
    pub zeta: Option<Vec<Section>>,
    pub corrected: Option<Cocycle2>,
}

impl Obstruction {
    pub fn xi_is_unit(&self, band: &Band) -> bool {
        band.nerve()
            .simplices(4)
            .iter()
            .zip(&self.xi)
            .all(|(&q, v)| band.is_unit(first(q), v))
    }
}

/// Value over `simplex ⊇ face` of a sorted cochain on faces of one size.
fn at(band: &Band, level: &Level, values: &[Section], face: Mask, simplex: Mask) -> Section {
    band.restrict(face, simplex, &values[level.pos[&face]])
}

/// `(dζ)_αβγδ = λ_αβ(ζ_βγδ) ζ_αγδ⁻¹ ζ_αβδ ζ_αβγ⁻¹`, and one degree up
/// the same alternating pattern, with the first face moved by `λ_αβ`.
pub fn twisted_coboundary(band: &Band, degree: usize, c: &[Section]) -> Result<Vec<Section>> {
    let nerve = band.nerve();
    nerve.require_depth(degree + 2)?;
    let level = Level::new(nerve, degree + 1);
    if c.len() != level.masks.len() {
        return Err(Error::InvalidCocycle(format!(
            "{} values for {} simplices of degree {degree}",
            c.len(),
            level.masks.len()
        )));
    }
    let mut out = Vec::new();
    for &s in nerve.simplices(degree + 2) {
        let ix: Vec<usize> = bits(s).collect();
        let a = ix[0];
        let mut acc = band.unit(a, s);
        for i in 0..ix.len() {
            let f = drop_index(s, i);
            let mut v = at(band, &level, c, f, s);
            if i == 0 {
                v = band.apply_lambda(a, ix[1], s, &v);
            }
            if i % 2 == 1 {
                v = band.inv(a, &v);
            }
            acc = band.mul(a, &acc, &v);
        }
        out.push(acc);
    }
    Ok(out)
}

/// `ξ_αβγδ = g_αβγ g_αγδ g_αβδ⁻¹ λ_αβ(g_βγδ)⁻¹`, the defect of identity
/// (ii). Identity (i) forces it into the center.
pub fn obstruction_cochain(band: &Band, g: &[Section]) -> Vec<Section> {
    let nerve = band.nerve();
    let level = Level::new(nerve, 3);
    nerve
        .simplices(4)
        .iter()
        .map(|&q| {
            let ix: Vec<usize> = bits(q).collect();
            let [a, b, c, d] = [ix[0], ix[1], ix[2], ix[3]];
            let abc = at(band, &level, g, mask_of(&[a, b, c]), q);
            let acd = at(band, &level, g, mask_of(&[a, c, d]), q);
            let abd = at(band, &level, g, mask_of(&[a, b, d]), q);
            let bcd = band.apply_lambda(a, b, q, &at(band, &level, g, mask_of(&[b, c, d]), q));
            let left = band.mul(a, &band.mul(a, &abc, &acd), &band.inv(a, &abd));
            band.mul(a, &left, &band.inv(a, &bcd))
        })
        .collect()
}

/// Computes `ξ` for gluing data satisfying identity (i), checks that it is
/// central and closed, and searches for `ζ` with `ξ = dζ`.
pub fn band_obstruction(band: &Arc<Band>, g: Vec<Section>, budget: &Budget) -> Result<Obstruction> {
    let nerve = band.nerve();
    nerve.require_depth(4)?;
    let c = Cocycle2::new(band.clone(), g)?;
    for (t, v) in &c.ordered().values {
        if !identity_one_holds(band, *t, v) {
            return Err(Error::InvalidCocycle(format!(
                "identity (i) fails at {}",
                nerve.format_tuple(t)
            )));
        }
    }
    let xi = obstruction_cochain(band, c.values());
    for (&q, v) in nerve.simplices(4).iter().zip(&xi) {
        if !band.is_central(first(q), v) {
            return Err(Error::NonCentral(format!(
                "ξ over {} is not central",
                nerve.format_simplex(q)
            )));
        }
    }
    if nerve.depth() >= 5 {
        let dxi = twisted_coboundary(band, 3, &xi)?;
        if let Some((&s, _)) = nerve
            .simplices(5)
            .iter()
            .zip(&dxi)
            .find(|(&s, v)| !band.is_unit(first(s), v))
        {
            return Err(Error::Internal(format!(
                "dξ is not the unit over {}",
                nerve.format_simplex(s)
            )));
        }
    }
    let zeta = solve_coboundary(band, &xi, budget)?;
    let corrected = match &zeta {
        None => None,
        Some(z) => {
            let h = nerve
                .simplices(3)
                .iter()
                .zip(z.iter().zip(c.values()))
                .map(|(&t, (z, v))| band.mul(first(t), z, v))
                .collect();
            let h = Cocycle2::new(band.clone(), h)?;
            if let Check::Fails(m) = check_cocycle2(&h) {
                return Err(Error::Internal(format!("corrected cocycle fails: {m}")));
            }
            Some(h)
        }
    };
    Ok(Obstruction {
        xi,
        zeta,
        corrected,
    })
}

/// Discrete logarithms in a cyclic center of prime order.
struct CyclicCenter {
    power: Vec<usize>,
    log: BTreeMap<usize, u32>,
}

impl CyclicCenter {
    fn new(group: &FiniteGroup) -> Option<(Self, u32)> {
        let z: Vec<usize> = group.elements().filter(|&x| group.is_central(x)).collect();
        let p = z.len();
        if p < 2 || (2..p).any(|d| p % d == 0) {
            return None;
        }
        let gen = z.into_iter().find(|&x| x != group.unit())?;
        let power: Vec<usize> = (0..p).map(|k| group.power(gen, k)).collect();
        let log = power
            .iter()
            .enumerate()
            .map(|(k, &x)| (x, k as u32))
            .collect();
        Some((CyclicCenter { power, log }, p as u32))
    }
}

/// A `ζ` with `dζ = ξ`, or `None` when there is none.
fn solve_coboundary(band: &Band, xi: &[Section], budget: &Budget) -> Result<Option<Vec<Section>>> {
    let nerve = band.nerve();
    let triples = Level::new(nerve, 3);
    let units = || -> Vec<Section> {
        triples
            .masks
            .iter()
            .map(|&t| band.unit(first(t), t))
            .collect()
    };
    let quads = nerve.simplices(4);
    if band.groups().iter().all(|k| center(k).group.order() == 1) {
        return Ok(
            if xi
                .iter()
                .zip(quads)
                .all(|(v, &q)| band.is_unit(first(q), v))
            {
                Some(units())
            } else {
                None
            },
        );
    }
    let cyclic: Option<Vec<(CyclicCenter, u32)>> =
        band.groups().iter().map(CyclicCenter::new).collect();
    if let Some(cyclic) = cyclic {
        let p = cyclic[0].1;
        if cyclic.iter().all(|c| c.1 == p) {
            return Ok(Some(solve_prime(band, &triples, xi, &cyclic, p)).flatten());
        }
    }
    solve_search(band, &triples, xi, budget)
}

fn solve_prime(
    band: &Band,
    triples: &Level,
    xi: &[Section],
    cyclic: &[(CyclicCenter, u32)],
    p: u32,
) -> Option<Vec<Section>> {
    let nerve = band.nerve();
    let mut column = BTreeMap::new();
    for &t in &triples.masks {
        for comp in 0..nerve.component_count(t) {
            let n = column.len();
            column.insert((t, comp), n);
        }
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (&q, v) in nerve.simplices(4).iter().zip(xi) {
        let ix: Vec<usize> = bits(q).collect();
        let (a, b) = (ix[0], ix[1]);
        let za = &cyclic[a].0;
        for (comp, x) in v.iter().enumerate() {
            let mut row = vec![0u32; column.len()];
            for i in 0..4 {
                let f = drop_index(q, i);
                let col = column[&(f, nerve.face_component(q, comp, f))];
                let coeff = match i {
                    0 => {
                        let zb = cyclic[b].0.power[1];
                        let image = band.lambda_on(a, b, q, comp).map_or(zb, |h| h.apply(zb));
                        za.log[&image]
                    }
                    2 => 1,
                    _ => p - 1,
                };
                row[col] = (row[col] + coeff) % p;
            }
            rows.push(row);
            rhs.push(za.log[x]);
        }
    }
    let x = solve_mod_p(&rows, &rhs, column.len(), p)?;
    Some(
        triples
            .masks
            .iter()
            .map(|&t| {
                let z = &cyclic[first(t)].0;
                (0..nerve.component_count(t))
                    .map(|comp| z.power[x[column[&(t, comp)]] as usize])
                    .collect()
            })
            .collect(),
    )
}

/// Backtracking over central values, checking each quadruple once its last
/// face is assigned.
fn solve_search(
    band: &Band,
    triples: &Level,
    xi: &[Section],
    budget: &Budget,
) -> Result<Option<Vec<Section>>> {
    let nerve = band.nerve();
    let candidates: Vec<Vec<Section>> = triples
        .masks
        .iter()
        .map(|&t| band.central_sections(first(t), t))
        .collect();
    budget.check(
        "obstruction correction",
        product(candidates.iter().map(Vec::len)),
    )?;
    let quads = nerve.simplices(4);
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); triples.masks.len()];
    for (qi, &q) in quads.iter().enumerate() {
        let last = (0..4)
            .map(|i| triples.pos[&drop_index(q, i)])
            .max()
            .expect("four faces");
        due[last].push(qi);
    }
    let mut counter = budget.counter("obstruction correction");
    let mut z: Vec<Section> = Vec::with_capacity(triples.masks.len());
    fn go(
        band: &Band,
        triples: &Level,
        xi: &[Section],
        candidates: &[Vec<Section>],
        due: &[Vec<usize>],
        counter: &mut crate::budget::Counter,
        z: &mut Vec<Section>,
    ) -> Result<bool> {
        let i = z.len();
        if i == candidates.len() {
            return Ok(true);
        }
        let quads = band.nerve().simplices(4);
        for cand in &candidates[i] {
            counter.tick()?;
            z.push(cand.clone());
            let ok = due[i].iter().all(|&qi| {
                let q = quads[qi];
                let ix: Vec<usize> = bits(q).collect();
                let a = ix[0];
                let mut acc = band.unit(a, q);
                for k in 0..4 {
                    let f = drop_index(q, k);
                    let mut v = band.restrict(f, q, &z[triples.pos[&f]]);
                    if k == 0 {
                        v = band.apply_lambda(a, ix[1], q, &v);
                    }
                    if k % 2 == 1 {
                        v = band.inv(a, &v);
                    }
                    acc = band.mul(a, &acc, &v);
                }
                acc == xi[qi]
            });
            if ok && go(band, triples, xi, candidates, due, counter, z)? {
                return Ok(true);
            }
            z.pop();
        }
        Ok(false)
    }
    Ok(
        if go(band, triples, xi, &candidates, &due, &mut counter, &mut z)? {
            Some(z)
        } else {
            None
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coboundary_squares_to_unit() {
        let nerve = AbstractNerve::full_simplex_skeleton(5, 5);
        let z3 = FiniteGroup::cyclic(3);
        for degree in 0..3 {
            let values = nerve
                .simplices(degree + 1)
                .iter()
                .enumerate()
                .map(|(i, _)| vec![(i * 7 + degree) % 3])
                .collect();
            let c = Cochain { degree, values };
            let dd =
                cech_coboundary(&nerve, &z3, &cech_coboundary(&nerve, &z3, &c).unwrap()).unwrap();
            assert!(dd.is_unit(&z3));
        }
    }

    #[test]
    fn s3_reduction_is_unit() {
        let nerve = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&nerve, &FiniteGroup::symmetric(3)).unwrap());
        let (z, c) = abelian_reduce(&Cocycle2::unit(band)).unwrap();
        assert_eq!(z.group.order(), 1);
        assert!(c.is_unit(&z.group));
    }

    #[test]
    fn central_defect_is_corrected() {
        let nerve = AbstractNerve::full_simplex_skeleton(4, 4);
        let q8 = FiniteGroup::quaternion();
        let band = Arc::new(Band::constant(&nerve, &q8).unwrap());
        let minus = q8
            .elements()
            .find(|&x| x != q8.unit() && q8.is_central(x))
            .unwrap();
        let mut g: Vec<Section> = Cocycle2::unit(band.clone()).into_values();
        g[2] = vec![minus];
        let budget = Budget::default();
        assert!(!check_cocycle2(&Cocycle2::new(band.clone(), g.clone()).unwrap()).holds());
        let ob = band_obstruction(&band, g.clone(), &budget).unwrap();
        assert!(!ob.xi_is_unit(&band));
        assert!(ob.corrected.is_some());
        // the search path agrees
        let z = solve_search(&band, &Level::new(&nerve, 3), &ob.xi, &budget).unwrap();
        assert!(z.is_some());
    }
}
