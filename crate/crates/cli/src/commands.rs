use std::path::Path;
use std::sync::Arc;

use lien::descent::{prestack_report, stack_check, stackify, GroupoidPresheaf};
use lien::gerbes::{
    band_obstruction, check_cocycle2, choose_extension_data, classify_cocycles2, cocycle_to_groupoid,
    cocycles2_branches, cocycles2_equivalent, cocycles2_in_branch, extension_to_cocycle, find_class,
    groupoid_to_cocycle, Band, BandedGerbePresentation, Cocycle2, Section, H2,
};
use lien::space::{bits, nerve, Cover};
use lien::torsors::{
    classify_cocycles1, classify_torsors, cocycle1_branches, cocycles1_in_branch, h1_colim, CechCoefficients,
    Cocycle1, GroupSheaf, H1,
};
use lien::{Budget, Check, Error};
use rayon::prelude::*;
use serde_json::Value;

use crate::input::{self, Loader};
use crate::report::Report;
use crate::{CheckKind, CliError, Command};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cmd: &Command, budget: &Budget) -> Result<Report> {
    let mut loader = Loader::default();
    let out = match cmd {
        Command::H1 {
            nerve,
            space,
            cover,
            group,
        } => h1(&mut loader, nerve.as_deref(), space.as_deref(), cover.as_deref(), group, budget),
        Command::H2 { nerve, band } => h2(&mut loader, nerve.as_deref(), band, budget),
        Command::ClassifyTorsors { space, group } => torsors(&mut loader, space, group, budget),
        Command::DescentCheck { space, presheaf, check } => descent(&mut loader, space, presheaf, *check, budget),
        Command::Stackify { space, presheaf } => stackification(&mut loader, space, presheaf, budget),
        Command::Obstruction { nerve, band, cocycle2 } => {
            obstruction(&mut loader, nerve.as_deref(), band.as_deref(), cocycle2, budget)
        }
        Command::GerbeRoundtrip { nerve, band, cocycle2 } => {
            roundtrip(&mut loader, nerve.as_deref(), band.as_deref(), cocycle2)
        }
        Command::ExtensionClass { extension } => extension_class(&mut loader, extension, budget),
        Command::Verify {
            nerve,
            band,
            cocycle1,
            cocycle2,
        } => verify(
            &mut loader,
            nerve.as_deref(),
            band.as_deref(),
            cocycle1.as_deref(),
            cocycle2.as_deref(),
        ),
    };
    let mut report = match out {
        Err(CliError::Failed(mut r)) => {
            r.inputs = loader.inputs;
            return Err(CliError::Failed(r));
        }
        other => other?,
    };
    report.inputs = loader.inputs;
    Ok(report)
}

/// 1-cocycles by branch in parallel; the concatenation is sorted, so the
/// result does not depend on the number of workers.
fn parallel_h1(c: &CechCoefficients, budget: &Budget) -> Result<H1> {
    let parts = (0..cocycle1_branches(c))
        .into_par_iter()
        .map(|b| cocycles1_in_branch(c, b, budget))
        .collect::<lien::Result<Vec<Vec<Cocycle1>>>>()?;
    let mut all: Vec<Cocycle1> = parts.into_iter().flatten().collect();
    all.sort();
    Ok(classify_cocycles1(c, &all, budget)?)
}

fn parallel_h2(band: &Arc<Band>, budget: &Budget) -> Result<H2> {
    let parts = (0..cocycles2_branches(band, budget)?)
        .into_par_iter()
        .map(|b| cocycles2_in_branch(band, b, budget))
        .collect::<lien::Result<Vec<Vec<Vec<Section>>>>>()?;
    let mut all: Vec<Vec<Section>> = parts.into_iter().flatten().collect();
    all.sort();
    Ok(classify_cocycles2(band, &all, budget)?)
}

fn h1(
    loader: &mut Loader,
    nerve_arg: Option<&Path>,
    space: Option<&Path>,
    cover: Option<&Path>,
    group: &str,
    budget: &Budget,
) -> Result<Report> {
    let g = input::group_arg(loader, group)?;
    let nv = match (nerve_arg, space) {
        (Some(p), _) => input::nerve_from(loader, Some(p), None)?,
        (None, Some(sp)) => {
            let (sv, _) = loader.read("space", sp)?;
            let space = input::parse_space(&sv)?;
            let cover = match cover {
                Some(cp) => {
                    let (cv, _) = loader.read("cover", cp)?;
                    input::parse_cover(&space, &cv)?
                }
                None => Cover::minimal(&space, space.whole())?,
            };
            nerve(&space, &cover, 3)?
        }
        (None, None) => return Err(CliError::Invalid("pass --nerve or --space".into())),
    };
    let c = CechCoefficients::constant(&nv, &g)?;
    let h = parallel_h1(&c, budget)?;
    let mut r = Report::new("h1");
    r.set("group_order", g.order());
    r.set("indices", nv.len());
    r.set("inhabited_pairs", nv.simplices(2).len());
    r.set("cocycles", h.cocycles);
    r.set("classes", h.classes.len());
    r.set(
        "representatives",
        h.classes
            .iter()
            .map(|k| Value::from(format!("[{}] {}", k.size, k.representative.format(&c))))
            .collect::<Vec<_>>(),
    );
    Ok(r)
}

fn h2(loader: &mut Loader, nerve_arg: Option<&Path>, band: &Path, budget: &Budget) -> Result<Report> {
    let band = input::band_from(loader, nerve_arg, Some(band), None)?;
    let h = parallel_h2(&band, budget)?;
    let unit = Cocycle2::unit(band.clone());
    let trivial = find_class(&unit, &h, budget)?.map(|(i, _)| i);
    let mut r = Report::new("h2");
    r.set("indices", band.nerve().len());
    r.set("inhabited_triples", band.nerve().simplices(3).len());
    r.set("cocycles", h.cocycles);
    r.set("presentations", h.presentations.to_string());
    r.set("classes", h.classes.len());
    r.set("unit_class", trivial.map_or(Value::Null, Value::from));
    r.set(
        "representatives",
        h.classes
            .iter()
            .map(|k| Value::from(format!("[{}] {}", k.size, k.representative.format())))
            .collect::<Vec<_>>(),
    );
    Ok(r)
}

fn torsors(loader: &mut Loader, space: &Path, group: &str, budget: &Budget) -> Result<Report> {
    let (sv, _) = loader.read("space", space)?;
    let space = input::parse_space(&sv)?;
    let g = input::group_arg(loader, group)?;
    let sheaf = GroupSheaf::constant(&space, &g);
    let classes = classify_torsors(&sheaf, budget)?;
    let cech = h1_colim(&sheaf, budget)?;
    if cech.classes.len() != classes.classes.len() {
        return Err(Error::Internal(format!(
            "{} torsor classes but {} Čech classes",
            classes.classes.len(),
            cech.classes.len()
        ))
        .into());
    }
    let edges = space.covering_pairs();
    let mut r = Report::new("classify-torsors");
    r.set("points", space.len());
    r.set("transition_functors", classes.functors);
    r.set("classes", classes.classes.len());
    r.set("cech_classes", cech.classes.len());
    r.set(
        "representatives",
        classes
            .classes
            .iter()
            .map(|t| {
                let vals = t.edge_values(&space);
                let parts: Vec<String> = edges
                    .iter()
                    .zip(&vals)
                    .map(|(&(x, y), &v)| format!("{}<{}={}", space.label(x), space.label(y), g.label(v)))
                    .collect();
                Value::from(parts.join(" "))
            })
            .collect::<Vec<_>>(),
    );
    Ok(r)
}

fn load_presheaf(loader: &mut Loader, space: &Path, presheaf: &Path) -> Result<GroupoidPresheaf> {
    let (sv, _) = loader.read("space", space)?;
    let space = input::parse_space(&sv)?;
    let (pv, dir) = loader.read("presheaf", presheaf)?;
    input::parse_presheaf(loader, &space, &pv, &dir)
}

fn check_value(c: &Check) -> Value {
    match c {
        Check::Holds => Value::from(true),
        Check::Fails(_) => Value::from(false),
    }
}

fn descent(loader: &mut Loader, space: &Path, presheaf: &Path, kind: CheckKind, budget: &Budget) -> Result<Report> {
    let f = load_presheaf(loader, space, presheaf)?;
    let mut r = Report::new("descent-check");
    r.set("opens", f.opens().len());
    if matches!(kind, CheckKind::Prestack | CheckKind::Both) {
        let p = prestack_report(&f, budget)?;
        r.set("prestack", check_value(&p.hom_sheaves));
        r.set("hom_sheaves", check_value(&p.hom_sheaves));
        r.set("comparison_fully_faithful", check_value(&p.comparison));
        if let Some(d) = p.hom_sheaves.diagnostic() {
            r.set("prestack_diagnostic", d);
        }
    }
    if matches!(kind, CheckKind::Stack | CheckKind::Both) {
        let s = stack_check(&f, budget)?;
        r.set("stack", check_value(&s));
        if let Some(d) = s.diagnostic() {
            r.set("stack_diagnostic", d);
        }
    }
    Ok(r)
}

fn stackification(loader: &mut Loader, space: &Path, presheaf: &Path, budget: &Budget) -> Result<Report> {
    let f = load_presheaf(loader, space, presheaf)?;
    let s = stackify(&f, budget)?;
    let sp = f.space();
    let mut r = Report::new("stackify");
    r.set(
        "values",
        (0..f.opens().len())
            .map(|u| {
                let (a, b) = (f.value(u), s.stack.value(u));
                Value::from(format!(
                    "{}: {} objects in {} classes -> {} objects in {} classes, {} arrows",
                    sp.format_set(f.opens()[u]),
                    a.object_count(),
                    a.components().len(),
                    b.object_count(),
                    b.components().len(),
                    b.arrow_count()
                ))
            })
            .collect::<Vec<_>>(),
    );
    let whole = f.opens().len() - 1;
    r.set("global_classes", s.stack.value(whole).components().len());
    let unit = s.unit_check(&f);
    r.set("unit_ok", check_value(&unit));
    if let Some(d) = unit.diagnostic() {
        r.set("unit_diagnostic", d);
    }
    Ok(r)
}

/// Band and raw values of a `--cocycle2` document.
fn load_cochain2(
    loader: &mut Loader,
    nerve_arg: Option<&Path>,
    band_arg: Option<&Path>,
    path: &Path,
) -> Result<(Arc<Band>, Vec<Section>)> {
    let (v, dir) = loader.read("cocycle2", path)?;
    let band = input::band_from(loader, nerve_arg, band_arg, Some((&v, &dir)))?;
    let g = input::parse_cochain2(&band, &v)?;
    Ok((band, g))
}

fn format_family(band: &Band, size: usize, values: &[Section], only_nonunit: bool) -> Vec<Value> {
    band.nerve()
        .simplices(size)
        .iter()
        .zip(values)
        .filter(|(&s, v)| !only_nonunit || !band.is_unit(first(s), v))
        .map(|(&s, v)| {
            Value::from(format!(
                "{}={}",
                band.nerve().format_simplex(s),
                band.format_section(first(s), v)
            ))
        })
        .collect()
}

fn first(mask: u64) -> usize {
    bits(mask).next().expect("nonempty simplex")
}

fn obstruction(
    loader: &mut Loader,
    nerve_arg: Option<&Path>,
    band_arg: Option<&Path>,
    path: &Path,
    budget: &Budget,
) -> Result<Report> {
    let (band, g) = load_cochain2(loader, nerve_arg, band_arg, path)?;
    let o = band_obstruction(&band, g, budget)?;
    let mut r = Report::new("obstruction");
    r.set("xi_trivial", o.xi_is_unit(&band));
    r.set("xi_nonunit", format_family(&band, 4, &o.xi, true));
    r.set("correctable", o.corrected.is_some());
    if let (Some(z), Some(h)) = (&o.zeta, &o.corrected) {
        r.set("zeta_nonunit", format_family(&band, 3, z, true));
        r.set("corrected", h.format());
    }
    Ok(r)
}

fn roundtrip(loader: &mut Loader, nerve_arg: Option<&Path>, band_arg: Option<&Path>, path: &Path) -> Result<Report> {
    let (band, g) = load_cochain2(loader, nerve_arg, band_arg, path)?;
    let c = Cocycle2::new(band, g)?;
    let gerbe = cocycle_to_groupoid(&c)?;
    let p = BandedGerbePresentation::canonical(&gerbe)?;
    let back = groupoid_to_cocycle(&gerbe, &p)?;
    let base = gerbe.base();
    let points = base.space.len();
    let mut r = Report::new("gerbe-roundtrip");
    r.set("points", points);
    r.set("gerbe", check_value(&gerbe.gerbe_check()));
    r.set(
        "stalks",
        (0..points)
            .map(|x| {
                let s = gerbe.stalk(x);
                Value::from(format!(
                    "{}: {} objects, {} arrows",
                    base.space.label(x),
                    s.object_count(),
                    s.arrow_count()
                ))
            })
            .collect::<Vec<_>>(),
    );
    r.set("recovered", back.format());
    r.set("exact", back == c);
    if back != c {
        return Err(Error::Internal("round trip changed the cocycle".into()).into());
    }
    Ok(r)
}

fn extension_class(loader: &mut Loader, path: &Path, budget: &Budget) -> Result<Report> {
    let (v, dir) = loader.read("extension", path)?;
    let (ext, cover, choices) = input::parse_extension(loader, &v, &dir)?;
    let choices = match choices {
        Some(c) => c,
        None => choose_extension_data(&ext, &cover, budget)?,
    };
    let (band, c) = extension_to_cocycle(&ext, &cover, &choices)?;
    let h = parallel_h2(&band, budget)?;
    let class = find_class(&c, &h, budget)?
        .ok_or_else(|| CliError::Lien(Error::Internal("extension cocycle lies in no class".into())))?;
    let trivial = cocycles2_equivalent(&c, &Cocycle2::unit(band.clone()), budget)?.is_some();
    let mut r = Report::new("extension-class");
    r.set("cover", cover.labels().join(" "));
    r.set("kernel_order", ext.kernel().order());
    r.set("band_trivially_glued", band.is_trivially_glued());
    r.set("cocycle", c.format());
    r.set("classes", h.classes.len());
    r.set("class", class.0);
    r.set("trivial", trivial);
    Ok(r)
}

fn failed(mut r: Report, diagnostic: String) -> CliError {
    r.set("valid", false);
    r.set("diagnostic", diagnostic);
    CliError::Failed(Box::new(r))
}

fn validation_message(e: &Error) -> Option<String> {
    match e {
        Error::Budget { .. } | Error::Internal(_) => None,
        other => Some(other.to_string()),
    }
}

fn verify(
    loader: &mut Loader,
    nerve_arg: Option<&Path>,
    band_arg: Option<&Path>,
    cocycle1: Option<&Path>,
    cocycle2: Option<&Path>,
) -> Result<Report> {
    if let Some(p) = cocycle1 {
        let mut r = Report::new("verify");
        r.set("kind", "cocycle1");
        let (v, dir) = loader.read("cocycle1", p)?;
        let nv = if v.get("space").is_some() {
            let (space, cover) = input::space_and_cover(loader, &v, &dir)?;
            nerve(&space, &cover, 3)?
        } else {
            input::nerve_from(loader, nerve_arg, Some((&v, &dir)))?
        };
        let g = input::parse_group(v.get("group").ok_or_else(|| CliError::Invalid("cocycle1: missing `group`".into()))?)?;
        let c = CechCoefficients::constant(&nv, &g)?;
        let values = input::parse_cochain1(&c, &v)?;
        return match Cocycle1::new(&c, values) {
            Ok(_) => {
                r.set("valid", true);
                Ok(r)
            }
            Err(Error::InvalidCocycle(m)) => Err(failed(r, m)),
            Err(e) => Err(e.into()),
        };
    }
    if let Some(p) = cocycle2 {
        let mut r = Report::new("verify");
        r.set("kind", "cocycle2");
        let (band, g) = match load_cochain2(loader, nerve_arg, band_arg, p) {
            Ok(x) => x,
            Err(CliError::Lien(e)) => match validation_message(&e) {
                Some(m) => return Err(failed(r, m)),
                None => return Err(e.into()),
            },
            Err(e) => return Err(e),
        };
        let c = Cocycle2::new(band, g)?;
        return match check_cocycle2(&c) {
            Check::Holds => {
                r.set("valid", true);
                Ok(r)
            }
            Check::Fails(m) => Err(failed(r, m)),
        };
    }
    if band_arg.is_some() {
        let mut r = Report::new("verify");
        r.set("kind", "band");
        return match input::band_from(loader, nerve_arg, band_arg, None) {
            Ok(band) => {
                r.set("valid", true);
                r.set("trivially_glued", band.is_trivially_glued());
                Ok(r)
            }
            Err(CliError::Lien(e)) => match validation_message(&e) {
                Some(m) => Err(failed(r, m)),
                None => Err(e.into()),
            },
            Err(e) => Err(e),
        };
    }
    Err(CliError::Invalid("verify needs --band, --cocycle1 or --cocycle2".into()))
}
