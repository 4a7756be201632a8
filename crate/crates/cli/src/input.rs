//! JSON documents and their conversion into library values.
//!
//! Any field that holds a document may instead hold a path (relative to the
//! file it appears in) to a JSON file with that document. Every file read is
//! digested for the report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lien::descent::GroupoidPresheaf;
use lien::gerbes::{Band, ExtensionChoices, GroupoidExtension, Section};
use lien::groupoid::{Arrow, Groupoid};
use lien::groups::{FiniteGroup, Homomorphism, Subgroup};
use lien::sheaves::EtaleSpace;
use lien::space::{mask_of, nerve, AbstractNerve, Cover, FinitePoset};
use lien::torsors::{CechCoefficients, GroupSheaf};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// A file that went into a report.
#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub file: String,
    pub sha256: String,
}

/// Reads JSON files and records their digests.
#[derive(Default)]
pub struct Loader {
    pub inputs: Vec<InputDigest>,
}

impl Loader {
    pub fn read(&mut self, role: &str, path: &Path) -> Result<(Value, PathBuf)> {
        let bytes = fs::read(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let value: Value =
            serde_json::from_slice(&bytes).map_err(|e| invalid(format!("{} is not valid JSON: {e}", path.display())))?;
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let sha256 = hex::encode(Sha256::digest(&bytes));
        if !self.inputs.iter().any(|i| i.role == role && i.sha256 == sha256) {
            self.inputs.push(InputDigest {
                role: role.to_string(),
                file,
                sha256,
            });
        }
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((value, dir))
    }

    /// The document itself, or the document in the file it names.
    pub fn resolve(&mut self, role: &str, v: &Value, dir: &Path) -> Result<(Value, PathBuf)> {
        match v {
            Value::String(s) if s.ends_with(".json") => self.read(role, &dir.join(s)),
            _ => Ok((v.clone(), dir.to_path_buf())),
        }
    }
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| invalid(format!("{what}: missing field `{key}`")))
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("{what}: expected a list")))?
        .iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(invalid(format!("{what}: expected labels"))),
        })
        .collect()
}

fn label_of(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(invalid(format!("{what}: expected a label"))),
    }
}

pub fn parse_group(v: &Value) -> Result<FiniteGroup> {
    match v {
        Value::String(name) => Ok(FiniteGroup::by_name(name)?),
        Value::Object(_) => {
            let labels = strings(field(v, "elements", "group")?, "group elements")?;
            let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
            let rows = field(v, "table", "group")?
                .as_array()
                .ok_or_else(|| invalid("group table: expected rows"))?;
            let table = rows
                .iter()
                .map(|r| {
                    strings(r, "group table row")?
                        .iter()
                        .map(|x| {
                            index
                                .get(x.as_str())
                                .copied()
                                .ok_or_else(|| invalid(format!("group table: unknown element `{x}`")))
                        })
                        .collect()
                })
                .collect::<Result<Vec<Vec<usize>>>>()?;
            Ok(FiniteGroup::from_table(labels, table)?)
        }
        _ => Err(invalid("group: expected a name or {elements, table}")),
    }
}

/// A group given on the command line: a built-in name or a JSON file.
pub fn group_arg(loader: &mut Loader, arg: &str) -> Result<FiniteGroup> {
    if arg.ends_with(".json") {
        let (v, _) = loader.read("group", Path::new(arg))?;
        parse_group(&v)
    } else {
        Ok(FiniteGroup::by_name(arg)?)
    }
}

pub fn parse_space(v: &Value) -> Result<FinitePoset> {
    if v.as_str() == Some("pseudo-circle") {
        return Ok(FinitePoset::pseudo_circle());
    }
    let points = strings(field(v, "points", "space")?, "space points")?;
    let mut leq = Vec::new();
    if let Some(pairs) = v.get("leq") {
        for p in pairs.as_array().ok_or_else(|| invalid("space leq: expected pairs"))? {
            let p = strings(p, "space leq")?;
            if p.len() != 2 {
                return Err(invalid("space leq: expected pairs [x, y] meaning x <= y"));
            }
            leq.push((p[0].clone(), p[1].clone()));
        }
    }
    let refs: Vec<&str> = points.iter().map(String::as_str).collect();
    let leq: Vec<(&str, &str)> = leq.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(FinitePoset::from_labels(&refs, &leq)?)
}

/// `{"opens": {"U0": [points], ...}}` (members in key order) or
/// `{"opens": [["U0", [points]], ...]}`; the covered open is the union.
pub fn parse_cover(space: &FinitePoset, v: &Value) -> Result<Cover> {
    let opens = field(v, "opens", "cover")?;
    let mut members = Vec::new();
    match opens {
        Value::Object(m) => {
            let sorted: BTreeMap<&String, &Value> = m.iter().collect();
            for (label, pts) in sorted {
                members.push((label.clone(), strings(pts, "cover member")?));
            }
        }
        Value::Array(items) => {
            for item in items {
                let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(|| invalid("cover: expected [label, points]"))?;
                members.push((label_of(&pair[0], "cover label")?, strings(&pair[1], "cover member")?));
            }
        }
        _ => return Err(invalid("cover opens: expected an object or a list")),
    }
    let mut union = 0u64;
    let mut out = Vec::new();
    for (label, pts) in members {
        let refs: Vec<&str> = pts.iter().map(String::as_str).collect();
        let open = space.open_of(&refs)?;
        union |= open.members();
        out.push((label, open));
    }
    let of = space.open(union)?;
    Ok(Cover::new(space, of, out)?)
}

/// The space of a document that has one, and the cover (minimal cover of
/// the whole space when absent).
pub fn space_and_cover(loader: &mut Loader, v: &Value, dir: &Path) -> Result<(FinitePoset, Cover)> {
    let (sv, _) = loader.resolve("space", field(v, "space", "document")?, dir)?;
    let space = parse_space(&sv)?;
    let cover = match v.get("cover") {
        Some(c) => {
            let (cv, _) = loader.resolve("cover", c, dir)?;
            parse_cover(&space, &cv)?
        }
        None => Cover::minimal(&space, space.whole())?,
    };
    Ok((space, cover))
}

/// An abstract nerve `{"indices", "inhabited_pairs", ...}` or the nerve of
/// `{"space", "cover"}`, computed to quadruples.
pub fn parse_nerve(loader: &mut Loader, v: &Value, dir: &Path) -> Result<AbstractNerve> {
    if v.get("space").is_some() {
        let (space, cover) = space_and_cover(loader, v, dir)?;
        return Ok(nerve(&space, &cover, 4)?);
    }
    let labels = strings(field(v, "indices", "nerve")?, "nerve indices")?;
    let index = |l: &str| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| invalid(format!("nerve: unknown index `{l}`")))
    };
    let tuples = |key: &str| -> Result<Vec<Vec<usize>>> {
        match v.get(key) {
            None => Ok(Vec::new()),
            Some(list) => list
                .as_array()
                .ok_or_else(|| invalid(format!("nerve {key}: expected a list")))?
                .iter()
                .map(|t| strings(t, key)?.iter().map(|l| index(l)).collect())
                .collect(),
        }
    };
    let mut simplices = Vec::new();
    for key in ["inhabited_pairs", "inhabited_triples", "inhabited_quadruples", "inhabited_quintuples"] {
        simplices.extend(tuples(key)?);
    }
    let disconnected = tuples("disconnected")?;
    Ok(AbstractNerve::new(labels, &simplices, &disconnected)?)
}

/// The nerve given on the command line, or the one a document names.
pub fn nerve_from(
    loader: &mut Loader,
    arg: Option<&Path>,
    doc: Option<(&Value, &Path)>,
) -> Result<AbstractNerve> {
    if let Some(path) = arg {
        let (v, dir) = loader.read("nerve", path)?;
        return parse_nerve(loader, &v, &dir);
    }
    match doc.and_then(|(v, dir)| v.get("nerve").map(|n| (n, dir))) {
        Some((n, dir)) => {
            let (nv, ndir) = loader.resolve("nerve", n, dir)?;
            parse_nerve(loader, &nv, &ndir)
        }
        None => Err(invalid("no nerve: pass --nerve or add a `nerve` field")),
    }
}

/// `"(U0,U1,U2)"` to sorted indices.
fn parse_tuple(nerve: &AbstractNerve, key: &str) -> Result<Vec<usize>> {
    let inner = key.trim().trim_start_matches('(').trim_end_matches(')');
    let mut ix = inner
        .split(',')
        .map(|l| nerve.index(l.trim()).map_err(CliError::from))
        .collect::<Result<Vec<usize>>>()?;
    let n = ix.len();
    ix.sort_unstable();
    ix.dedup();
    if ix.len() != n {
        return Err(invalid(format!("tuple {key} repeats an index")));
    }
    Ok(ix)
}

/// Sorted key order check: values are stored on `α < β < …`.
fn check_sorted(nerve: &AbstractNerve, key: &str, ix: &[usize]) -> Result<()> {
    let inner = key.trim().trim_start_matches('(').trim_end_matches(')');
    let given: Vec<&str> = inner.split(',').map(str::trim).collect();
    let sorted: Vec<&str> = ix.iter().map(|&i| nerve.label(i)).collect();
    if given != sorted {
        return Err(invalid(format!("key {key}: list indices in increasing order, as {}", nerve.format_tuple(ix))));
    }
    Ok(())
}

fn element(group: &FiniteGroup, v: &Value) -> Result<usize> {
    Ok(group.element(&label_of(v, "element")?)?)
}

/// One element for every component, or a list with one per component.
fn section(group: &FiniteGroup, v: &Value, components: usize) -> Result<Section> {
    match v {
        Value::Array(items) => {
            if items.len() != components {
                return Err(invalid(format!("{} values for {components} components", items.len())));
            }
            items.iter().map(|x| element(group, x)).collect()
        }
        _ => Ok(vec![element(group, v)?; components]),
    }
}

/// `{"K": group or {index: group}, "lambda": {"(α,β)": images}}`; missing
/// gluing maps are identities. Images list `λ_αβ(x)` for each element `x`
/// of `K_β` in order, or one such list per component of `U_αβ`.
pub fn parse_band(nerve: &AbstractNerve, v: &Value) -> Result<Band> {
    let k = field(v, "K", "band")?;
    let groups: Vec<FiniteGroup> = match k {
        Value::Object(m) if !m.contains_key("elements") => (0..nerve.len())
            .map(|i| {
                let g = m
                    .get(nerve.label(i))
                    .ok_or_else(|| invalid(format!("band K: no group for {}", nerve.label(i))))?;
                parse_group(g)
            })
            .collect::<Result<_>>()?,
        _ => vec![parse_group(k)?; nerve.len()],
    };
    let mut lambda = BTreeMap::new();
    for &pair in nerve.simplices(2) {
        let ix: Vec<usize> = lien::space::bits(pair).collect();
        let (a, b) = (ix[0], ix[1]);
        if groups[a] != groups[b] {
            return Err(invalid(format!(
                "band: {} needs explicit gluing between different groups",
                nerve.format_simplex(pair)
            )));
        }
        lambda.insert((a, b), vec![Homomorphism::identity(&groups[a]); nerve.component_count(pair)]);
    }
    if let Some(l) = v.get("lambda") {
        let m = l.as_object().ok_or_else(|| invalid("band lambda: expected an object"))?;
        for (key, images) in m {
            let ix = parse_tuple(nerve, key)?;
            check_sorted(nerve, key, &ix)?;
            if ix.len() != 2 {
                return Err(invalid(format!("band lambda: {key} is not a pair")));
            }
            let (a, b) = (ix[0], ix[1]);
            let pair = mask_of(&ix);
            if !nerve.is_inhabited(pair) {
                return Err(invalid(format!("band lambda: {key} is not inhabited")));
            }
            let list = images.as_array().ok_or_else(|| invalid(format!("band lambda {key}: expected images")))?;
            let per_component: Vec<&Value> = if list.first().is_some_and(Value::is_array) {
                list.iter().collect()
            } else {
                vec![images; nerve.component_count(pair)]
            };
            if per_component.len() != nerve.component_count(pair) {
                return Err(invalid(format!("band lambda {key}: one map per component expected")));
            }
            let maps = per_component
                .iter()
                .map(|imgs| {
                    let map = imgs
                        .as_array()
                        .ok_or_else(|| invalid(format!("band lambda {key}: expected images")))?
                        .iter()
                        .map(|x| element(&groups[a], x))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Homomorphism::new(&groups[b], &groups[a], map)?)
                })
                .collect::<Result<Vec<_>>>()?;
            lambda.insert((a, b), maps);
        }
    }
    Ok(Band::new(nerve, groups, lambda)?)
}

/// The band of a `--band` file or of a document's `band` field.
pub fn band_from(
    loader: &mut Loader,
    nerve_arg: Option<&Path>,
    band_arg: Option<&Path>,
    doc: Option<(&Value, &Path)>,
) -> Result<Arc<Band>> {
    let (bv, bdir) = match (band_arg, doc.and_then(|(v, d)| v.get("band").map(|b| (b, d)))) {
        (Some(p), _) => loader.read("band", p)?,
        (None, Some((b, d))) => loader.resolve("band", b, d)?,
        (None, None) => return Err(invalid("no band: pass --band or add a `band` field")),
    };
    let nerve = match (nerve_arg, bv.get("nerve")) {
        (Some(_), _) | (None, None) => nerve_from(loader, nerve_arg, doc)?,
        (None, Some(_)) => nerve_from(loader, None, Some((&bv, &bdir)))?,
    };
    Ok(Arc::new(parse_band(&nerve, &bv)?))
}

/// `{"g": {"(α,β,γ)": value}}` on sorted inhabited triples; missing
/// triples are units.
pub fn parse_cochain2(band: &Band, v: &Value) -> Result<Vec<Section>> {
    let nerve = band.nerve();
    let mut values: Vec<Section> = nerve.simplices(3).iter().map(|&t| band.unit(lien::space::bits(t).next().unwrap(), t)).collect();
    if let Some(g) = v.get("g") {
        let m = g.as_object().ok_or_else(|| invalid("g: expected an object"))?;
        for (key, val) in m {
            let ix = parse_tuple(nerve, key)?;
            check_sorted(nerve, key, &ix)?;
            let t = mask_of(&ix);
            let pos = nerve
                .simplices(3)
                .iter()
                .position(|&s| s == t)
                .ok_or_else(|| invalid(format!("g: {key} is not an inhabited triple")))?;
            values[pos] = section(band.group(ix[0]), val, nerve.component_count(t))?;
        }
    }
    Ok(values)
}

/// `{"nerve", "group", "g": {"(α,β)": element}}`; missing pairs are units.
pub fn parse_cochain1(c: &CechCoefficients, v: &Value) -> Result<Vec<usize>> {
    let nerve = c.nerve();
    let mut values: Vec<usize> = nerve.simplices(2).iter().map(|&s| c.unit(s)).collect();
    if let Some(g) = v.get("g") {
        let m = g.as_object().ok_or_else(|| invalid("g: expected an object"))?;
        for (key, val) in m {
            let ix = parse_tuple(nerve, key)?;
            check_sorted(nerve, key, &ix)?;
            let s = mask_of(&ix);
            let pos = nerve
                .simplices(2)
                .iter()
                .position(|&p| p == s)
                .ok_or_else(|| invalid(format!("g: {key} is not an inhabited pair")))?;
            values[pos] = c.parse(s, &label_of(val, "g value")?)?;
        }
    }
    Ok(values)
}

/// Presheaves of groupoids:
/// * `{"kind": "constant", "group": G}`, one object with `G` everywhere;
/// * `{"kind": "torsors", "group": G}`, one object with the locally
///   constant sheaf of `G`;
/// * `{"kind": "product", "factors": [..]}`;
/// * `{"kind": "explicit", "values": [..], "restrictions": [..]}` with a
///   groupoid `{"open", "objects", "components": [{"objects", "group"}]}`
///   per open and restrictions `{"from", "to", "objects": {x: y},
///   "groups": [[images of the base vertex group]], "shifts": {x: e}}`.
///   Missing restrictions are composed from given ones.
pub fn parse_presheaf(loader: &mut Loader, space: &FinitePoset, v: &Value, dir: &Path) -> Result<GroupoidPresheaf> {
    let kind = field(v, "kind", "presheaf")?.as_str().unwrap_or_default();
    match kind {
        "constant" => {
            let g = parse_group(field(v, "group", "presheaf")?)?;
            let n = space.open_masks().len();
            Ok(GroupoidPresheaf::one_object(space, vec![g; n], |_, _, x| x)?)
        }
        "torsors" => {
            let g = parse_group(field(v, "group", "presheaf")?)?;
            Ok(GroupoidPresheaf::from_group_sheaf(&GroupSheaf::constant(space, &g))?)
        }
        "product" => {
            let factors = field(v, "factors", "presheaf")?.as_array().ok_or_else(|| invalid("factors: expected a list"))?;
            let mut acc: Option<GroupoidPresheaf> = None;
            for f in factors {
                let (fv, fdir) = loader.resolve("presheaf", f, dir)?;
                let p = parse_presheaf(loader, space, &fv, &fdir)?;
                acc = Some(match acc {
                    None => p,
                    Some(a) => GroupoidPresheaf::product(&a, &p)?,
                });
            }
            acc.ok_or_else(|| invalid("product of no factors"))
        }
        "explicit" => parse_explicit_presheaf(space, v),
        other => Err(invalid(format!("presheaf: unknown kind `{other}`"))),
    }
}

struct Restriction {
    objects: Vec<usize>,
    groups: Vec<Vec<usize>>,
    shifts: Vec<usize>,
}

fn parse_explicit_presheaf(space: &FinitePoset, v: &Value) -> Result<GroupoidPresheaf> {
    let opens = space.open_masks();
    let open_index = |pts: &Value| -> Result<usize> {
        let labels = strings(pts, "open")?;
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let m = space.open_of(&refs)?.members();
        Ok(opens.iter().position(|&o| o == m).expect("every open is listed"))
    };
    let mut values: Vec<Option<Groupoid>> = vec![None; opens.len()];
    for g in field(v, "values", "presheaf")?.as_array().ok_or_else(|| invalid("values: expected a list"))? {
        let u = open_index(field(g, "open", "value")?)?;
        let labels = strings(field(g, "objects", "value")?, "objects")?;
        let pos = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| invalid(format!("unknown object `{l}`")))
        };
        let mut comps = Vec::new();
        for c in field(g, "components", "value")?.as_array().ok_or_else(|| invalid("components: expected a list"))? {
            let objs = strings(field(c, "objects", "component")?, "component objects")?
                .iter()
                .map(|l| pos(l))
                .collect::<Result<Vec<_>>>()?;
            comps.push((objs, parse_group(field(c, "group", "component")?)?));
        }
        values[u] = Some(Groupoid::new(labels.clone(), comps)?);
    }
    let values: Vec<Groupoid> = values
        .into_iter()
        .enumerate()
        .map(|(u, g)| g.ok_or_else(|| invalid(format!("no groupoid over {}", space.format_set(opens[u])))))
        .collect::<Result<_>>()?;
    let mut given: BTreeMap<(usize, usize), Restriction> = BTreeMap::new();
    if let Some(rs) = v.get("restrictions") {
        for r in rs.as_array().ok_or_else(|| invalid("restrictions: expected a list"))? {
            let u = open_index(field(r, "from", "restriction")?)?;
            let w = open_index(field(r, "to", "restriction")?)?;
            let (gu, gw) = (&values[u], &values[w]);
            let obj = |l: &str, g: &Groupoid| g.object(l).map_err(CliError::from);
            let omap = field(r, "objects", "restriction")?.as_object().ok_or_else(|| invalid("objects: expected a map"))?;
            let mut objects = vec![usize::MAX; gu.object_count()];
            for (k, t) in omap {
                objects[obj(k, gu)?] = obj(&label_of(t, "object")?, gw)?;
            }
            if objects.contains(&usize::MAX) {
                return Err(invalid("restriction: every object needs an image"));
            }
            let groups = match r.get("groups") {
                Some(gs) => gs
                    .as_array()
                    .ok_or_else(|| invalid("groups: expected a list"))?
                    .iter()
                    .zip(gu.components())
                    .map(|(imgs, c)| {
                        let target = gw.vertex_group(objects[c.base]);
                        imgs.as_array()
                            .ok_or_else(|| invalid("groups: expected images"))?
                            .iter()
                            .map(|x| element(target, x))
                            .collect()
                    })
                    .collect::<Result<Vec<Vec<usize>>>>()?,
                None => gu.components().iter().map(|c| c.group.elements().collect()).collect(),
            };
            let mut shifts: Vec<usize> = (0..gu.object_count()).map(|x| gw.vertex_group(objects[x]).unit()).collect();
            if let Some(s) = r.get("shifts").and_then(Value::as_object) {
                for (k, e) in s {
                    let x = obj(k, gu)?;
                    shifts[x] = element(gw.vertex_group(objects[x]), e)?;
                }
            }
            given.insert((u, w), Restriction { objects, groups, shifts });
        }
    }
    let apply_given = |u: usize, w: usize, a: &Arrow| -> lien::Result<Arrow> {
        let r = &given[&(u, w)];
        let (gu, gw) = (&values[u], &values[w]);
        let comp = gu.component_of(a.source);
        let base = gu.components()[comp].base;
        let fb = r.objects[base];
        let image = |x: usize| Arrow {
            source: fb,
            target: r.objects[x],
            element: r.shifts[x],
        };
        let phi = r.groups[comp].get(a.element).copied().ok_or_else(|| lien::Error::InvalidGroupoid("short group map".into()))?;
        let lp = Arrow {
            source: fb,
            target: fb,
            element: phi,
        };
        // (s,t,e) = tr_t ∘ (b,b,e) ∘ tr_s⁻¹
        gw.compose(&gw.compose(&image(a.target), &lp)?, &gw.inverse(&image(a.source)))
    };
    // restrict along a chain of given restrictions, shortest first
    let route = |u: usize, w: usize| -> Option<Vec<usize>> {
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut frontier = vec![u];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                if x == w {
                    let mut path = vec![w];
                    let mut y = w;
                    while y != u {
                        y = prev[&y];
                        path.push(y);
                    }
                    path.reverse();
                    return Some(path);
                }
                for &(a, b) in given.keys() {
                    if a == x && !prev.contains_key(&b) && b != u {
                        prev.insert(b, x);
                        next.push(b);
                    }
                }
            }
            frontier = next;
        }
        None
    };
    Ok(GroupoidPresheaf::new(space, values.clone(), |u, w, a| {
        if u == w {
            return Ok(*a);
        }
        let path = route(u, w).ok_or_else(|| {
            lien::Error::MissingData(format!(
                "no restriction from {} to {}",
                space.format_set(opens[u]),
                space.format_set(opens[w])
            ))
        })?;
        let mut x = *a;
        for s in path.windows(2) {
            x = apply_given(s[0], s[1], &x)?;
        }
        Ok(x)
    })?)
}

/// A groupoid extension with its cover and optional explicit choices:
/// * `{"kind": "product", "base", "total", "projection", "kernel": L}`;
/// * `{"kind": "action", "base", "total", "projection", "group": G,
///   "kernel": [elements], "action": {element: {point: point}}}`.
///
/// `cover` defaults to the minimal cover of the base; `choices` holds
/// `sections: {"U0": {x: m}}` and `arrows: {"(U0,U1)": {x: element}}`
/// where arrows are elements of the acting group, or of `L` for products.
pub fn parse_extension(
    loader: &mut Loader,
    v: &Value,
    dir: &Path,
) -> Result<(GroupoidExtension, Cover, Option<ExtensionChoices>)> {
    let (bv, _) = loader.resolve("space", field(v, "base", "extension")?, dir)?;
    let base = parse_space(&bv)?;
    let (tv, _) = loader.resolve("space", field(v, "total", "extension")?, dir)?;
    let total = parse_space(&tv)?;
    let pm = field(v, "projection", "extension")?.as_object().ok_or_else(|| invalid("projection: expected a map"))?;
    let projection = (0..total.len())
        .map(|m| {
            let x = pm
                .get(total.label(m))
                .ok_or_else(|| invalid(format!("projection: no image for {}", total.label(m))))?;
            Ok(base.point(&label_of(x, "point")?)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let etale = EtaleSpace::new(&base, total.clone(), projection)?;
    let kind = field(v, "kind", "extension")?.as_str().unwrap_or_default();
    let (ext, acting) = match kind {
        "product" => {
            let l = parse_group(field(v, "kernel", "extension")?)?;
            (GroupoidExtension::product(etale, &l)?, None)
        }
        "action" => {
            let g = parse_group(field(v, "group", "extension")?)?;
            let kernel = strings(field(v, "kernel", "extension")?, "kernel")?
                .iter()
                .map(|l| g.element(l).map_err(CliError::from))
                .collect::<Result<Vec<_>>>()?;
            let mut kernel = kernel;
            kernel.sort_unstable();
            let sub = Subgroup::from_elements(&g, kernel)?;
            let am = field(v, "action", "extension")?.as_object().ok_or_else(|| invalid("action: expected a map"))?;
            let mut action: Vec<Vec<usize>> = (0..g.order()).map(|_| (0..total.len()).collect()).collect();
            for (el, perm) in am {
                let e = g.element(el)?;
                let perm = perm.as_object().ok_or_else(|| invalid("action: expected point maps"))?;
                for (from, to) in perm {
                    action[e][total.point(from)?] = total.point(&label_of(to, "point")?)?;
                }
            }
            (GroupoidExtension::from_action(etale, &g, &sub, &action)?, Some(g))
        }
        other => return Err(invalid(format!("extension: unknown kind `{other}`"))),
    };
    let cover = match v.get("cover") {
        Some(c) => {
            let (cv, _) = loader.resolve("cover", c, dir)?;
            parse_cover(&base, &cv)?
        }
        None => Cover::minimal(&base, base.whole())?,
    };
    let choices = match v.get("choices") {
        None => None,
        Some(c) => Some(parse_choices(&ext, &cover, acting.as_ref(), c)?),
    };
    Ok((ext, cover, choices))
}

fn parse_choices(
    ext: &GroupoidExtension,
    cover: &Cover,
    acting: Option<&FiniteGroup>,
    v: &Value,
) -> Result<ExtensionChoices> {
    let base = ext.etale().base();
    let total = ext.etale().total();
    let mut out = ExtensionChoices::default();
    if let Some(s) = v.get("sections").and_then(Value::as_object) {
        for (u, map) in s {
            let a = cover.index(u)?;
            for (x, m) in map.as_object().ok_or_else(|| invalid("sections: expected point maps"))? {
                out.sections.insert((a, base.point(x)?), total.point(&label_of(m, "point")?)?);
            }
        }
    }
    if let Some(s) = v.get("arrows").and_then(Value::as_object) {
        for (key, map) in s {
            let inner = key.trim().trim_start_matches('(').trim_end_matches(')');
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(invalid(format!("arrows: {key} is not a pair")));
            }
            let (a, b) = (cover.index(parts[0])?, cover.index(parts[1])?);
            if a >= b {
                return Err(invalid(format!("arrows: list {key} in cover order")));
            }
            for (x, e) in map.as_object().ok_or_else(|| invalid("arrows: expected point maps"))? {
                let x = base.point(x)?;
                let (sa, sb) = match (out.sections.get(&(a, x)), out.sections.get(&(b, x))) {
                    (Some(&sa), Some(&sb)) => (sa, sb),
                    _ => return Err(invalid(format!("arrows {key}: sections missing at {}", base.label(x)))),
                };
                let stalk = ext.stalk(x);
                let (s, t) = (ext.object(sb), ext.object(sa));
                let label = label_of(e, "arrow")?;
                let arrow = match acting {
                    // the arrow b → a labelled by its group element
                    Some(g) => {
                        let f = ext.action_arrow(sb, g.element(&label)?).expect("action extension");
                        if f.target != t {
                            return Err(invalid(format!("arrows {key}: {label} does not map a_β to a_α")));
                        }
                        f
                    }
                    None => Arrow {
                        source: s,
                        target: t,
                        element: stalk.vertex_group(s).element(&label)?,
                    },
                };
                out.arrows.insert((a, b, x), arrow);
            }
        }
    }
    Ok(out)
}
