//! Run configuration: a TOML document with `scheme`, `region`, `subset`,
//! `query`, `folner` and `output` tables. Unknown keys are rejected and
//! every value error names its line.

use serde::Deserialize;
use toml::Spanned;

use crate::density::SubsetSpec;
use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, Rational};
use crate::patterns::Endo;
use crate::scheme::{parse_point, Scheme, SchemeKind};

/// An integer or a string such as `"1/2"` or `"3,2"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Str(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Str(s) => s.clone(),
        }
    }
}

type Field = Spanned<Scalar>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scheme: SchemeSection,
    pub region: RegionSection,
    pub subset: Option<SubsetSection>,
    pub query: Option<QuerySection>,
    pub folner: Option<FolnerSection>,
    pub output: Option<OutputSection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub kind: Spanned<String>,
    pub d: Option<Spanned<u64>>,
    pub p: Option<Spanned<u64>>,
    pub w: Field,
    pub window_closed: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    /// Half-width `T` (quadratic) or ball level (p-adic).
    pub extent: Field,
    pub margin: Option<Field>,
    pub center: Option<Spanned<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetSection {
    pub kind: Spanned<String>,
    pub theta: Option<Field>,
    pub seed: Option<u64>,
    pub w: Option<Field>,
    pub modulus: Option<u64>,
    pub residues: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySection {
    /// `dilation` or `multiples`.
    pub mode: Option<Spanned<String>>,
    pub pattern: Option<Vec<Spanned<String>>>,
    pub r: Option<u32>,
    pub q: Option<u64>,
    /// `mult_by:m,n` or `int_scale:k`.
    pub endos: Option<Vec<Spanned<String>>>,
    /// Radius of the candidate set for `lambda`.
    pub lambda_extent: Option<Field>,
    /// Candidate radius as a fraction of each Følner scale (`synd`).
    pub lambda_ratio: Option<Field>,
    /// Banach window: length (quadratic) or level (p-adic).
    pub window: Option<Field>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub radius: Option<Field>,
    pub order: Option<u8>,
    pub v: Option<Field>,
    pub scan_radius: Option<Field>,
    pub n: Option<u32>,
    pub delta: Option<Spanned<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FolnerSection {
    pub scales: Vec<Field>,
    pub translates: Option<Vec<Spanned<String>>>,
    pub thickening: Option<Field>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub formats: Option<Vec<String>>,
}

/// A parsed config together with its source text, for line numbers.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub text: String,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = RunConfig {
            raw,
            text: text.to_string(),
        };
        cfg.check_formats()?;
        Ok(cfg)
    }

    fn line(&self, span: std::ops::Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: std::ops::Range<usize>, key: &str, msg: impl std::fmt::Display) -> Result<T> {
        Err(Error::Config(format!("line {}: {key}: {msg}", self.line(span))))
    }

    fn check_formats(&self) -> Result<()> {
        for f in self.formats() {
            if f != "csv" && f != "json" {
                return Err(Error::Config(format!(
                    "output.formats: unknown format {f:?} (expected csv or json)"
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> Result<SchemeKind> {
        let k = &self.raw.scheme.kind;
        match k.get_ref().as_str() {
            "quadratic" => Ok(SchemeKind::Quadratic),
            "padic" => Ok(SchemeKind::Padic),
            other => self.err(k.span(), "scheme.kind", format!("expected quadratic or padic, got {other:?}")),
        }
    }

    pub fn rational(&self, f: &Field, key: &str) -> Result<Rational> {
        parse_rational(&f.get_ref().text()).or_else(|e| self.err(f.span(), key, e))
    }

    pub fn window(&self) -> Result<Rational> {
        self.rational(&self.raw.scheme.w, "scheme.w")
    }

    pub fn window_closed(&self) -> bool {
        self.raw.scheme.window_closed.unwrap_or(true)
    }

    pub fn radicand(&self) -> Result<u64> {
        match &self.raw.scheme.d {
            Some(d) => Ok(*d.get_ref()),
            None => self.err(self.raw.scheme.kind.span(), "scheme.d", "quadratic scheme needs d"),
        }
    }

    pub fn prime(&self) -> Result<u64> {
        match &self.raw.scheme.p {
            Some(p) => Ok(*p.get_ref()),
            None => self.err(self.raw.scheme.kind.span(), "scheme.p", "p-adic scheme needs p"),
        }
    }

    pub fn radius<S: Scheme>(&self, scheme: &S, f: &Field, key: &str) -> Result<S::Radius> {
        scheme
            .parse_radius(&f.get_ref().text())
            .or_else(|e| self.err(f.span(), key, e))
    }

    pub fn point<S: Scheme>(&self, scheme: &S, f: &Spanned<String>, key: &str) -> Result<S::Point> {
        parse_point(scheme, f.get_ref()).or_else(|e| self.err(f.span(), key, e))
    }

    pub fn region<S: Scheme>(&self, scheme: &S) -> Result<S::Region> {
        let r = &self.raw.region;
        let extent = self.radius(scheme, &r.extent, "region.extent")?;
        let center = match &r.center {
            Some(c) => self.point(scheme, c, "region.center")?,
            None => scheme.zero(),
        };
        Ok(scheme.ball(&center, &extent))
    }

    pub fn margin<S: Scheme>(&self, scheme: &S) -> Result<Option<S::Radius>> {
        self.raw
            .region
            .margin
            .as_ref()
            .map(|m| self.radius(scheme, m, "region.margin"))
            .transpose()
    }

    pub fn subset<S: Scheme>(&self, scheme: &S) -> Result<SubsetSpec> {
        let Some(s) = &self.raw.subset else {
            return Ok(SubsetSpec::Full);
        };
        let span = s.kind.span();
        let spec = match s.kind.get_ref().as_str() {
            "full" => SubsetSpec::Full,
            "bernoulli" => {
                let theta = match &s.theta {
                    Some(t) => self.rational(t, "subset.theta")?,
                    None => return self.err(span, "subset.theta", "bernoulli needs theta"),
                };
                let Some(seed) = s.seed else {
                    return self.err(span, "subset.seed", "bernoulli needs a seed");
                };
                SubsetSpec::Bernoulli { theta, seed }
            }
            "subwindow" => match &s.w {
                Some(w) => SubsetSpec::Subwindow {
                    w: self.rational(w, "subset.w")?,
                },
                None => return self.err(span, "subset.w", "subwindow needs w"),
            },
            "congruence" => SubsetSpec::Congruence {
                modulus: s.modulus.unwrap_or(0),
                residues: s.residues.clone().unwrap_or_default(),
            },
            other => {
                return self.err(
                    span,
                    "subset.kind",
                    format!("expected full, bernoulli, subwindow or congruence, got {other:?}"),
                )
            }
        };
        spec.validate(scheme).or_else(|e| self.err(span, "subset", e))?;
        Ok(spec)
    }

    pub fn query(&self) -> QuerySection {
        self.raw.query.clone().unwrap_or_default()
    }

    /// A required query field, or a config error naming it.
    pub fn need<'a, T>(&self, v: &'a Option<T>, key: &str) -> Result<&'a T> {
        v.as_ref()
            .ok_or_else(|| Error::Config(format!("{key} is required for this command")))
    }

    pub fn pattern<S: Scheme>(&self, scheme: &S) -> Result<Vec<S::Point>> {
        let q = self.query();
        let pat = self.need(&q.pattern, "query.pattern")?;
        pat.iter()
            .enumerate()
            .map(|(i, f)| self.point(scheme, f, &format!("query.pattern[{i}]")))
            .collect()
    }

    pub fn endos<S: Scheme>(&self, scheme: &S) -> Result<Vec<Endo<S::Point>>> {
        let q = self.query();
        let list = self.need(&q.endos, "query.endos")?;
        list.iter()
            .enumerate()
            .map(|(i, f)| {
                let key = format!("query.endos[{i}]");
                let text = f.get_ref();
                if let Some(rest) = text.strip_prefix("mult_by:") {
                    let c = parse_point(scheme, rest).or_else(|e| self.err(f.span(), &key, e))?;
                    Ok(Endo::MultBy(c))
                } else if let Some(rest) = text.strip_prefix("int_scale:") {
                    match rest.trim().parse::<i64>() {
                        Ok(k) => Ok(Endo::IntScale(k)),
                        Err(e) => self.err(f.span(), &key, e),
                    }
                } else {
                    self.err(f.span(), &key, "expected mult_by:x,y or int_scale:k")
                }
            })
            .collect()
    }

    pub fn query_radius<S: Scheme>(&self, scheme: &S, f: &Option<Field>, key: &str) -> Result<S::Radius> {
        self.radius(scheme, self.need(f, key)?, key)
    }

    pub fn scales<S: Scheme>(&self, scheme: &S) -> Result<Vec<S::Radius>> {
        let f = self.need(&self.raw.folner, "folner")?;
        f.scales
            .iter()
            .enumerate()
            .map(|(i, s)| self.radius(scheme, s, &format!("folner.scales[{i}]")))
            .collect()
    }

    pub fn translates<S: Scheme>(&self, scheme: &S) -> Result<Option<Vec<S::Point>>> {
        let Some(f) = &self.raw.folner else {
            return Ok(None);
        };
        f.translates
            .as_ref()
            .map(|ts| {
                ts.iter()
                    .enumerate()
                    .map(|(i, t)| self.point(scheme, t, &format!("folner.translates[{i}]")))
                    .collect()
            })
            .transpose()
    }

    pub fn thickening<S: Scheme>(&self, scheme: &S) -> Result<Option<S::Radius>> {
        let Some(f) = &self.raw.folner else {
            return Ok(None);
        };
        f.thickening
            .as_ref()
            .map(|t| self.radius(scheme, t, "folner.thickening"))
            .transpose()
    }

    pub fn out_dir(&self) -> Option<String> {
        self.raw.output.as_ref().and_then(|o| o.dir.clone())
    }

    pub fn formats(&self) -> Vec<String> {
        self.raw
            .output
            .as_ref()
            .and_then(|o| o.formats.clone())
            .unwrap_or_else(|| vec!["csv".into(), "json".into()])
    }

    /// Seeds named anywhere in the config, for the manifest.
    pub fn seeds(&self) -> Vec<u64> {
        let mut s = Vec::new();
        if let Some(seed) = self.raw.subset.as_ref().and_then(|s| s.seed) {
            s.push(seed);
        }
        if let Some(seed) = self.raw.query.as_ref().and_then(|q| q.seed) {
            s.push(seed);
        }
        s
    }
}
