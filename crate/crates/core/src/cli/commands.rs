use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::{Artifact, Command, RunOptions};
use crate::density::{
    banach_density_emp, counting_bound_check, sample_windows, subset_generate, upper_density,
    FolnerSpec, SubsetSpec,
};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int_rat, parse_rational, rational_to_decimal, Rational};
use crate::ipsystems::{ip_pattern_search, recheck_ip_hit, verify_power_containment, ShrunkScheme};
use crate::patterns::{
    default_margin, gap_set, multi_recurrence_scan, recheck_witnesses, syndeticity, Endo,
    GapSetReport, PatternMode, PatternQuery, SyndeticityReport,
};
use crate::scheme::{enumerate, verify_axioms, PointSet, Scheme, SchemeKind};
use crate::transversal::{difference_set, patch_census, separation_check};

pub(super) fn run<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    match opts.command {
        Command::Generate => generate(s, cfg, opts),
        Command::Axioms => axioms(s, cfg, opts),
        Command::Density => density(s, cfg, opts),
        Command::Banach => banach(s, cfg, opts),
        Command::Gapset | Command::Apscan | Command::Multirec => scan(s, cfg, opts),
        Command::Synd => synd(s, cfg, opts),
        Command::Patches => patches(s, cfg, opts),
        Command::Separation => separation(s, cfg, opts),
        Command::Ip => ip(s, cfg, opts),
    }
}

fn num(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => json!(v),
        None => json!(b.to_string()),
    }
}

fn coords<S: Scheme>(s: &S, x: &S::Point) -> Value {
    let (a, b) = s.coords(x);
    json!([num(&a), num(&b)])
}

fn rational(r: &Rational) -> Value {
    json!({
        "num": num(r.numer()),
        "den": num(r.denom()),
        "decimal": rational_to_decimal(r, 12),
    })
}

fn dist<S: Scheme>(s: &S, d: &Option<S::Dist>) -> Value {
    match d {
        Some(d) => json!({ "exact": s.dist_exact(d), "decimal": s.dist_decimal(d) }),
        None => Value::Null,
    }
}

/// `P`: the configured subset of `Lambda ∩ region`.
fn subset_points<S: Scheme>(s: &S, cfg: &RunConfig, cap: u64) -> Result<(SubsetSpec, PointSet<S>, PointSet<S>)> {
    let region = cfg.region(s)?;
    let spec = cfg.subset(s)?;
    let lam = enumerate(s, &region, cap)?;
    let p = subset_generate(&lam, &spec);
    Ok((spec, lam, p))
}

fn generate<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let (_, _, p) = subset_points(s, cfg, opts.cap)?;
    Ok(vec![Artifact::text("points.csv", p.to_csv())])
}

fn axioms<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let region = cfg.region(s)?;
    let margin = cfg.margin(s)?.unwrap_or_else(|| s.radius_zero());
    let r = verify_axioms(s, &region, &margin, opts.cap)?;
    let v = json!({
        "region": s.region_label(&region),
        "inner": s.region_label(&r.inner),
        "inner_points": r.inner_points,
        "symmetric": r.symmetric,
        "contains_zero": r.contains_zero,
        "min_gap": dist(s, &r.min_gap),
        "covering_radius": dist(s, &r.covering_radius),
        "correction_set": r.approx_correction_set.iter().map(|f| coords(s, f)).collect::<Vec<_>>(),
        "distinct_sums": r.distinct_sums,
        "uncovered_sums": r.uncovered_sums,
        "correction_candidates": r.correction_candidates,
        "products_checked": r.products_checked,
        "mult_closed_violations": r.mult_closed_violations,
    });
    Ok(vec![Artifact::json("axioms.json", &v)])
}

fn density<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let spec = FolnerSpec::new(s, cfg.scales(s)?, cfg.translates(s)?, cfg.thickening(s)?)?;
    let subset = cfg.subset(s)?;
    let trace = upper_density(s, &subset, &spec, spec.len(), opts.cap)?;
    let v = json!({
        "subset": subset.label(),
        "limsup_estimate": rational(&trace.limsup_estimate),
        "rows": trace.rows.len(),
    });
    Ok(vec![
        Artifact::text("density.csv", trace.to_csv()),
        Artifact::json("density.json", &v),
    ])
}

/// The configured Banach window as a radius: quadratic windows are given
/// by their length.
fn banach_extent<S: Scheme>(s: &S, cfg: &RunConfig) -> Result<S::Radius> {
    let q = cfg.query();
    let f = cfg.need(&q.window, "query.window")?;
    match s.kind() {
        SchemeKind::Quadratic => {
            let t = cfg.rational(f, "query.window")?;
            s.parse_radius(&format_rational(&(t / int_rat(2))))
        }
        SchemeKind::Padic => cfg.radius(s, f, "query.window"),
    }
}

fn banach<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let region = cfg.region(s)?;
    let (spec, lam, p) = subset_points(s, cfg, opts.cap)?;
    let extent = banach_extent(s, cfg)?;
    let d_star = banach_density_emp(s, &p, &region, &extent)?;
    let q = cfg.query();
    // V: the half-gap neighbourhood of Lambda, which also separates P
    let gap = s.min_gap(lam.points());
    let mut v = json!({
        "subset": spec.label(),
        "region": s.region_label(&region),
        "points": p.len(),
        "window_radius": extent.to_string(),
        "empirical_d_star": rational(&d_star),
        "min_gap": dist(s, &gap),
    });
    if let Some(g) = &gap {
        let vr = s.separating_radius(g);
        let windows = sample_windows(s, &region, &extent, q.samples.unwrap_or(100), q.seed.unwrap_or(0));
        let c = counting_bound_check(s, &p, &windows, &vr)?;
        v["neighbourhood_radius"] = json!(vr.to_string());
        v["density_bound"] = rational(&c.density_bound);
        v["d_star_within_bound"] = json!(d_star <= c.density_bound);
        v["counting"] = json!({
            "windows": c.windows,
            "violations": c.violations,
            "worst_ratio": rational(&c.worst_ratio),
        });
    }
    Ok(vec![Artifact::json("banach.json", &v)])
}

fn query_of<S: Scheme>(s: &S, cfg: &RunConfig) -> Result<PatternQuery<S::Point>> {
    let q = cfg.query();
    let mode = q.mode.as_ref().map(|m| m.get_ref().as_str()).unwrap_or("dilation");
    match mode {
        "dilation" => PatternQuery::dilation(cfg.pattern(s)?),
        "multiples" => PatternQuery::multiples(*cfg.need(&q.r, "query.r")?),
        other => Err(Error::Config(format!(
            "query.mode: expected dilation or multiples, got {other:?}"
        ))),
    }
}

fn endos_for<S: Scheme>(s: &S, cfg: &RunConfig, cmd: Command) -> Result<Vec<Endo<S::Point>>> {
    match cmd {
        Command::Apscan => {
            let r = *cfg.need(&cfg.query().r, "query.r")?;
            PatternQuery::<S::Point>::multiples(r).map(|q| q.endos())
        }
        Command::Multirec => cfg.endos(s),
        _ => query_of(s, cfg).map(|q| q.endos()),
    }
}

fn inner_region<S: Scheme>(
    s: &S,
    cfg: &RunConfig,
    lam: &PointSet<S>,
    cands: &PointSet<S>,
    endos: &[Endo<S::Point>],
) -> Result<S::Region> {
    let region = lam.region();
    let margin = match cfg.margin(s)? {
        Some(m) => m,
        None => default_margin(s, lam, cands, endos),
    };
    s.shrink(region, &margin).ok_or_else(|| {
        Error::usage(format!(
            "margin {margin} leaves nothing of {}",
            s.region_label(region)
        ))
    })
}

fn scan_json<S: Scheme>(s: &S, r: &GapSetReport<S>) -> Value {
    json!({
        "query": r.label,
        "inner": s.region_label(&r.inner),
        "inner_measure": rational(&r.inner_measure),
        "candidates": r.candidates,
        "gap_count": r.rows.len(),
        "empty": r.is_empty(),
        "empirical_c": r.empirical_c().as_ref().map(rational),
    })
}

fn membership<'a, S: Scheme>(
    s: &'a S,
    region: &'a S::Region,
    spec: &'a SubsetSpec,
) -> impl Fn(&S::Point) -> bool + Sync + 'a {
    move |x| s.in_lambda(x) && s.in_region(region, x) && spec.contains(s, x)
}

fn recheck_artifact<S: Scheme>(
    s: &S,
    cfg: &RunConfig,
    spec: &SubsetSpec,
    report: &GapSetReport<S>,
    endos: &[Endo<S::Point>],
) -> Result<Artifact> {
    let region = cfg.region(s)?;
    let rc = recheck_witnesses(s, report, endos, membership(s, &region, spec));
    if rc.failures > 0 {
        return Err(Error::Verification(format!(
            "{} of {} witness pairs failed the membership recheck",
            rc.failures, rc.pairs
        )));
    }
    Ok(Artifact::json(
        "recheck.json",
        &json!({ "pairs": rc.pairs, "failures": rc.failures }),
    ))
}

fn scan<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let (spec, lam, p) = subset_points(s, cfg, opts.cap)?;
    let q = cfg.query();
    let extent = cfg.query_radius(s, &q.lambda_extent, "query.lambda_extent")?;
    let cands = enumerate(s, &s.ball(&s.zero(), &extent), opts.cap)?;
    let endos = endos_for(s, cfg, opts.command)?;
    let inner = inner_region(s, cfg, &lam, &cands, &endos)?;
    let report = match opts.command {
        Command::Multirec => {
            multi_recurrence_scan(s, &p, &inner, &cands, &endos, q.q.unwrap_or(1))?
        }
        Command::Apscan => {
            let r = *cfg.need(&q.r, "query.r")?;
            gap_set(s, &p, &inner, &cands, &PatternQuery::multiples(r)?)?
        }
        _ => gap_set(s, &p, &inner, &cands, &query_of(s, cfg)?)?,
    };
    let name = opts.command.name();
    let mut out = vec![
        Artifact::text(&format!("{name}.csv"), report.to_csv()),
        Artifact::json(&format!("{name}.json"), &scan_json(s, &report)),
    ];
    if opts.recheck {
        out.push(recheck_artifact(s, cfg, &spec, &report, &endos)?);
    }
    Ok(out)
}

fn synd<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let scales = cfg.scales(s)?;
    let spec = cfg.subset(s)?;
    let query = query_of(s, cfg)?;
    let endos = query.endos();
    let q = cfg.query();
    let mut rows = Vec::new();
    let mut pairs = 0;
    for t in &scales {
        let region = s.ball(&s.zero(), t);
        let lam = enumerate(s, &region, opts.cap)?;
        let p = subset_generate(&lam, &spec);
        let extent = match (&q.lambda_ratio, &q.lambda_extent) {
            (Some(ratio), _) => {
                if s.kind() != SchemeKind::Quadratic {
                    return Err(Error::Config(
                        "query.lambda_ratio needs a quadratic scheme; use lambda_extent".into(),
                    ));
                }
                let ratio = cfg.rational(ratio, "query.lambda_ratio")?;
                let t = parse_rational(&t.to_string())?;
                s.parse_radius(&format_rational(&(t * ratio)))?
            }
            (None, Some(_)) => cfg.query_radius(s, &q.lambda_extent, "query.lambda_extent")?,
            (None, None) => {
                return Err(Error::Config(
                    "query.lambda_extent or query.lambda_ratio is required for synd".into(),
                ))
            }
        };
        let cands = enumerate(s, &s.ball(&s.zero(), &extent), opts.cap)?;
        let inner = inner_region(s, cfg, &lam, &cands, &endos)?;
        let report = gap_set(s, &p, &inner, &cands, &query)?;
        if opts.recheck {
            let rc = recheck_witnesses(s, &report, &endos, membership(s, &region, &spec));
            if rc.failures > 0 {
                return Err(Error::Verification(format!(
                    "{} witness pairs failed the recheck at scale {t}",
                    rc.failures
                )));
            }
            pairs += rc.pairs;
        }
        rows.push(syndeticity(s, &report.gap_points, &cands, cands.region(), t.to_string())?);
    }
    let report = SyndeticityReport { rows };
    let v = json!({
        "query": query.label(),
        "subset": spec.label(),
        "non_increasing": report.non_increasing(),
        "rows": report.rows.iter().map(|r| json!({
            "scale": r.scale,
            "covering_radius": dist(s, &r.covering_radius),
            "witness": r.witness.as_ref().map(|w| coords(s, w)),
            "k_candidate": r.k_candidate.iter().map(|k| coords(s, k)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    let mut out = vec![
        Artifact::text("synd.csv", report.to_csv(s)),
        Artifact::json("synd.json", &v),
    ];
    if opts.recheck {
        out.push(Artifact::json("recheck.json", &json!({ "pairs": pairs, "failures": 0 })));
    }
    Ok(out)
}

fn patches<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let (_, _, p) = subset_points(s, cfg, opts.cap)?;
    let q = cfg.query();
    let rho = cfg.query_radius(s, &q.radius, "query.radius")?;
    let margin = cfg.margin(s)?.unwrap_or_else(|| rho.clone());
    let inner = s
        .shrink(p.region(), &margin)
        .ok_or_else(|| Error::usage(format!("margin {margin} leaves nothing of the region")))?;
    let stats = patch_census(s, &p, &inner, &rho)?;
    Ok(vec![Artifact::json("patches.json", &stats.to_json())])
}

fn separation<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let (_, _, p) = subset_points(s, cfg, opts.cap)?;
    let q = cfg.query();
    let radius = cfg.query_radius(s, &q.radius, "query.radius")?;
    let v = cfg.query_radius(s, &q.v, "query.v")?;
    let scan = cfg.query_radius(s, &q.scan_radius, "query.scan_radius")?;
    let order = q.order.unwrap_or(1);
    let qq = q.q.unwrap_or(1);
    let xi = difference_set(s, &p, &radius, order, opts.cap)?;
    let r = separation_check(s, &xi, qq, &v, &scan, opts.cap)?;
    let mut out = json!({
        "ok": r.ok,
        "q": qq,
        "v": v.to_string(),
        "difference_order": order,
        "difference_radius": radius.to_string(),
        "difference_count": xi.differences.len(),
        "max_admissible_radius": dist(s, &r.max_admissible_radius),
        "witness": r.witness.as_ref().map(|w| coords(s, w)),
        "scanned": r.scanned,
        "scan_radius": r.scan_radius.to_string(),
    });
    if s.kind() == SchemeKind::Quadratic {
        // |z| |z*| >= 1 and |z*| <= (2 + q) w
        let bound = (s.window() * int_rat(2 + qq)).recip();
        out["norm_bound"] = rational(&bound);
    }
    Ok(vec![Artifact::json("separation.json", &out)])
}

fn ip<S: Scheme>(s: &S, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let q = cfg.query();
    let n = *cfg.need(&q.n, "query.n")?;
    let sh = ShrunkScheme::new(s, n)?;
    let delta = cfg.point(s, cfg.need(&q.delta, "query.delta")?, "query.delta")?;
    let pattern = match query_of(s, cfg)?.mode {
        PatternMode::Dilation(f) => f,
        PatternMode::Multiples(_) => {
            return Err(Error::Config("ip needs query.mode = dilation".into()))
        }
    };
    let region = cfg.region(s)?;
    let (spec, _, p) = subset_points(s, cfg, opts.cap)?;
    let margin = match cfg.margin(s)? {
        Some(m) => m,
        None => {
            let step = s.scale(&s.abs(&delta), &BigInt::from(n));
            pattern
                .iter()
                .map(|f| s.radius_of(&s.norm(&s.mul(&step, f))))
                .max_by(|a, b| s.cmp_radius(a, b))
                .unwrap_or_else(|| s.radius_zero())
        }
    };
    let inner = s
        .shrink(&region, &margin)
        .ok_or_else(|| Error::usage(format!("margin {margin} leaves nothing of the region")))?;
    let search = ip_pattern_search(&sh, &p, &inner, &delta, &pattern)?;
    let verified = recheck_ip_hit(s, &search, &pattern, membership(s, &region, &spec));
    if !verified {
        return Err(Error::Verification("pattern hit failed the membership recheck".into()));
    }
    let power_region = match &q.radius {
        Some(r) => s.ball(&s.zero(), &cfg.radius(s, r, "query.radius")?),
        None => region.clone(),
    };
    let power = verify_power_containment(&sh, &power_region, opts.cap)?;
    let pv = json!({
        "n": n,
        "region": s.region_label(&power_region),
        "points": power.points,
        "sums": power.sums,
        "violations": power.violations,
        "strict_violations": power.strict_violations,
    });
    Ok(vec![
        Artifact::json("ip.json", &search.to_json(s, verified)),
        Artifact::json("ip_power.json", &pv),
    ])
}
