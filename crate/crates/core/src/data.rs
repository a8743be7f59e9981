//! Datasets: synthetic manifolds, CSV input/output and standardization.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Vector;
use crate::rng;
use crate::scalar::Scalar;

/// Points with optional class labels and optional manifold parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset<F> {
    name: String,
    points: Vec<Vector<F>>,
    labels: Option<Vec<usize>>,
    t: Option<Vec<F>>,
    feature_names: Option<Vec<String>>,
    /// Original text of each label code, when labels were read as text.
    label_names: Option<Vec<String>>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(name: impl Into<String>, points: Vec<Vector<F>>) -> Result<Self> {
        if let Some(first) = points.first() {
            let m = first.dim();
            if let Some(p) = points.iter().find(|p| p.dim() != m) {
                return Err(Error::DimensionMismatch {
                    left: m,
                    right: p.dim(),
                });
            }
        }
        Ok(Dataset {
            name: name.into(),
            points,
            labels: None,
            t: None,
            feature_names: None,
            label_names: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                points: self.points.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_t(mut self, t: Vec<F>) -> Result<Self> {
        if t.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                labels: t.len(),
                points: self.points.len(),
            });
        }
        if let Some(i) = t.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        self.t = Some(t);
        Ok(self)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if !self.points.is_empty() && names.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Vector<F>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn t(&self) -> Option<&[F]> {
        self.t.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn label_names(&self) -> Option<&[String]> {
        self.label_names.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Feature dimension; 0 for an empty dataset.
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vector::dim)
    }

    pub fn class_count(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |&m| m + 1))
    }

    /// Sizes of classes `0..class_count`.
    pub fn class_distribution(&self) -> Option<Vec<usize>> {
        let labels = self.labels.as_ref()?;
        let mut counts = vec![0; self.class_count().unwrap_or(0)];
        for &l in labels {
            counts[l] += 1;
        }
        Some(counts)
    }
}

fn check_noise(noise: f64) -> Result<()> {
    if noise.is_finite() && noise >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "noise must be finite and nonnegative, got {noise}"
        )))
    }
}

/// Draws `n` pairs `(u, v)` uniform on `[0, 1)` followed by an `n x 3` block of
/// standard normals scaled by `noise` (skipped when `noise == 0`).
fn manifold_draws(n: usize, noise: f64, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<[f64; 3]>) {
    let mut rng = rng::seeded(seed);
    let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let eps = (0..n)
        .map(|_| {
            if noise == 0.0 {
                [0.0; 3]
            } else {
                let mut e = [0.0; 3];
                for c in &mut e {
                    let z: f64 = rng.sample(StandardNormal);
                    *c = noise * z;
                }
                e
            }
        })
        .collect();
    (u, v, eps)
}

fn manifold<F: Scalar>(name: &str, coords: Vec<[f64; 3]>, t: Vec<f64>) -> Result<Dataset<F>> {
    let points = coords
        .into_iter()
        .map(|c| Vector::new(c.iter().map(|&x| F::lit(x)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(name, points)?
        .with_t(t.into_iter().map(F::lit).collect())?
        .with_feature_names(vec!["x".into(), "y".into(), "z".into()])
}

/// S-shaped sheet: `t = 3π(u - 1/2)`, point `(sin t, 2v, sign(t)(cos t - 1))`
/// plus isotropic Gaussian noise of standard deviation `noise`.
pub fn gen_s_curve<F: Scalar>(n: usize, noise: F, seed: u64) -> Result<Dataset<F>> {
    let noise = noise.as_f64();
    check_noise(noise)?;
    let (u, v, eps) = manifold_draws(n, noise, seed);
    let t: Vec<f64> = u.iter().map(|&u| 3.0 * PI * (u - 0.5)).collect();
    let coords = t
        .iter()
        .zip(&v)
        .zip(&eps)
        .map(|((&t, &v), e)| {
            let sign = if t < 0.0 {
                -1.0
            } else if t > 0.0 {
                1.0
            } else {
                0.0
            };
            [
                t.sin() + e[0],
                2.0 * v + e[1],
                sign * (t.cos() - 1.0) + e[2],
            ]
        })
        .collect();
    manifold("s-curve", coords, t)
}

/// Rolled sheet: `t = 1.5π(1 + 2u)`, point `(t cos t, 21v, t sin t)` plus noise.
pub fn gen_swiss_roll<F: Scalar>(n: usize, noise: F, seed: u64) -> Result<Dataset<F>> {
    let noise = noise.as_f64();
    check_noise(noise)?;
    let (u, v, eps) = manifold_draws(n, noise, seed);
    let t: Vec<f64> = u.iter().map(|&u| 1.5 * PI * (1.0 + 2.0 * u)).collect();
    let coords = t
        .iter()
        .zip(&v)
        .zip(&eps)
        .map(|((&t, &v), e)| [t * t.cos() + e[0], 21.0 * v + e[1], t * t.sin() + e[2]])
        .collect();
    manifold("swiss-roll", coords, t)
}

/// Column selector for CSV input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
    Last,
}

impl ColumnRef {
    fn resolve(&self, header: Option<&[String]>, width: usize, path: &str) -> Result<usize> {
        let missing = || Error::NoSuchColumn {
            path: path.into(),
            column: format!("{self:?}"),
        };
        match self {
            ColumnRef::Index(i) if *i < width => Ok(*i),
            ColumnRef::Index(_) => Err(missing()),
            ColumnRef::Last if width > 0 => Ok(width - 1),
            ColumnRef::Last => Err(missing()),
            ColumnRef::Name(name) => header
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(missing),
        }
    }
}

impl std::str::FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// `last`, a zero-based index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "last" => ColumnRef::Last,
            _ => match s.parse::<usize>() {
                Ok(i) => ColumnRef::Index(i),
                Err(_) => ColumnRef::Name(s.to_string()),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: Option<ColumnRef>,
    pub t_column: Option<ColumnRef>,
    /// With a header and no explicit selector, treat columns named `label`
    /// and `t` as the label and manifold-parameter columns.
    pub auto_columns: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            label_column: None,
            t_column: None,
            auto_columns: true,
        }
    }
}

impl CsvOptions {
    pub fn headerless() -> Self {
        CsvOptions {
            has_header: false,
            auto_columns: false,
            ..Default::default()
        }
    }

    pub fn with_label(mut self, col: ColumnRef) -> Self {
        self.label_column = Some(col);
        self
    }

    pub fn with_t(mut self, col: ColumnRef) -> Self {
        self.t_column = Some(col);
        self
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    let v: f64 = cell.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Maps label cells to codes. Cells that are all nonnegative integers keep
/// their value; anything else is coded densely by first appearance.
fn code_labels(cells: Vec<String>) -> (Vec<usize>, Option<Vec<String>>) {
    let numeric: Option<Vec<usize>> = cells
        .iter()
        .map(|c| c.trim().parse::<usize>().ok())
        .collect();
    if let Some(codes) = numeric {
        return (codes, None);
    }
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut names = Vec::new();
    let codes = cells
        .into_iter()
        .map(|c| {
            let key = c.trim().to_string();
            *index.entry(key.clone()).or_insert_with(|| {
                names.push(key);
                names.len() - 1
            })
        })
        .collect();
    (codes, Some(names))
}

/// Reads a rectangular numeric CSV. Non-label, non-`t` columns become
/// coordinates.
pub fn load_csv<F: Scalar>(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset<F>> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(File::open(path).map_err(|source| Error::Open {
            path: shown.clone(),
            source,
        })?);

    let mut records = reader.records();
    let mut header: Option<Vec<String>> = None;
    let mut first_row = 1;
    if opts.has_header {
        if let Some(rec) = records.next() {
            header = Some(rec?.iter().map(str::to_string).collect());
            first_row = 2;
        }
    }
    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for rec in records {
        rows.push(rec?);
    }
    let width = header
        .as_ref()
        .map(Vec::len)
        .or_else(|| rows.first().map(|r| r.len()))
        .unwrap_or(0);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::RaggedRow {
                path: shown,
                row: first_row + i,
                found: r.len(),
                expected: width,
            });
        }
    }

    let auto = |name: &str| -> Option<usize> {
        if !(opts.auto_columns && opts.has_header) {
            return None;
        }
        header.as_ref()?.iter().position(|c| c == name)
    };
    let label_col = match &opts.label_column {
        Some(c) => Some(c.resolve(header.as_deref(), width, &shown)?),
        None => auto("label"),
    };
    let t_col = match &opts.t_column {
        Some(c) => Some(c.resolve(header.as_deref(), width, &shown)?),
        None => auto("t"),
    };
    if label_col.is_some() && label_col == t_col {
        return Err(Error::InvalidConfig(
            "label and t columns must differ".into(),
        ));
    }
    let feature_cols: Vec<usize> = (0..width)
        .filter(|&c| Some(c) != label_col && Some(c) != t_col)
        .collect();
    if feature_cols.is_empty() && !rows.is_empty() {
        return Err(Error::InvalidConfig(format!("{shown}: no feature columns")));
    }

    let bad = |row: usize, col: usize, value: &str| Error::BadCell {
        path: shown.clone(),
        row: first_row + row,
        col,
        value: value.to_string(),
    };
    let mut points = Vec::with_capacity(rows.len());
    let mut t = Vec::new();
    let mut label_cells = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut coords = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let v = parse_number(&r[c]).ok_or_else(|| bad(i, c, &r[c]))?;
            coords.push(F::lit(v));
        }
        points.push(Vector::new(coords).map_err(|_| bad(i, feature_cols[0], &r[feature_cols[0]]))?);
        if let Some(c) = t_col {
            t.push(F::lit(parse_number(&r[c]).ok_or_else(|| bad(i, c, &r[c]))?));
        }
        if let Some(c) = label_col {
            label_cells.push(r[c].to_string());
        }
    }

    let name = path.file_stem().map_or_else(
        || "dataset".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    let mut d = Dataset::new(name, points)?;
    if let Some(h) = &header {
        d.feature_names = Some(feature_cols.iter().map(|&c| h[c].clone()).collect());
    }
    if t_col.is_some() {
        d = d.with_t(t)?;
    }
    if label_col.is_some() {
        let (codes, names) = code_labels(label_cells);
        d = d.with_labels(codes)?;
        d.label_names = names;
    }
    Ok(d)
}

/// Reads one label column, coded as in [`load_csv`]. Other columns are
/// ignored, so a file holding only labels is accepted.
pub fn load_labels(
    path: impl AsRef<Path>,
    column: &ColumnRef,
    has_header: bool,
) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(File::open(path).map_err(|source| Error::Open {
            path: shown.clone(),
            source,
        })?);
    let mut records = reader.records();
    let header: Option<Vec<String>> = match (has_header, records.next()) {
        (true, Some(rec)) => Some(rec?.iter().map(str::to_string).collect()),
        (true, None) => None,
        (false, Some(rec)) => {
            let rec = rec?;
            let col = column.resolve(None, rec.len(), &shown)?;
            let mut cells = vec![rec[col].to_string()];
            return collect_labels(records, col, rec.len(), 1, &shown, &mut cells);
        }
        (false, None) => return Ok(Vec::new()),
    };
    let width = header.as_ref().map_or(0, Vec::len);
    let col = column.resolve(header.as_deref(), width, &shown)?;
    collect_labels(records, col, width, 2, &shown, &mut Vec::new())
}

fn collect_labels<R: std::io::Read>(
    records: csv::StringRecordsIter<'_, R>,
    col: usize,
    width: usize,
    first_row: usize,
    shown: &str,
    cells: &mut Vec<String>,
) -> Result<Vec<usize>> {
    let skip = cells.len();
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(Error::RaggedRow {
                path: shown.into(),
                row: first_row + skip + i,
                found: rec.len(),
                expected: width,
            });
        }
        cells.push(rec[col].to_string());
    }
    Ok(code_labels(std::mem::take(cells)).0)
}

/// Writes features, then `label` (integer codes), then `t`, with a header.
/// Floats use the shortest representation that parses back to the same value.
pub fn save_csv<F: Scalar>(d: &Dataset<F>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_csv(d, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv<F: Scalar, W: Write>(d: &Dataset<F>, out: &mut W) -> Result<()> {
    let m = d.dim();
    let mut head: Vec<String> = match &d.feature_names {
        Some(names) => names.clone(),
        None => (0..m).map(|i| format!("x{i}")).collect(),
    };
    if d.labels.is_some() {
        head.push("label".into());
    }
    if d.t.is_some() {
        head.push("t".into());
    }
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(&head)?;
    let mut row = Vec::with_capacity(head.len());
    for (i, p) in d.points.iter().enumerate() {
        row.clear();
        row.extend(p.iter().map(|v| format!("{v:?}")));
        if let Some(l) = &d.labels {
            row.push(l[i].to_string());
        }
        if let Some(t) = &d.t {
            row.push(format!("{:?}", t[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shifts each feature to mean 0 and scales it to population standard
/// deviation 1. Zero-variance features pass through unchanged.
pub fn standardize<F: Scalar>(d: &Dataset<F>) -> Dataset<F> {
    let n = d.len();
    if n < 2 {
        return d.clone();
    }
    let m = d.dim();
    let nf = F::from_count(n);
    let mut mean = vec![F::zero(); m];
    for p in &d.points {
        for (acc, &v) in mean.iter_mut().zip(p.iter()) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= nf;
    }
    let mut var = vec![F::zero(); m];
    for p in &d.points {
        for ((acc, &v), &mu) in var.iter_mut().zip(p.iter()).zip(&mean) {
            let dv = v - mu;
            *acc += dv * dv;
        }
    }
    let scale: Vec<Option<F>> = var
        .into_iter()
        .map(|v| {
            let sd = (v / nf).sqrt();
            (sd > F::zero()).then_some(sd)
        })
        .collect();
    let points = d
        .points
        .iter()
        .map(|p| {
            Vector::from_trusted(
                p.iter()
                    .zip(&mean)
                    .zip(&scale)
                    .map(|((&v, &mu), s)| match s {
                        Some(sd) => (v - mu) / *sd,
                        None => v,
                    })
                    .collect(),
            )
        })
        .collect();
    Dataset {
        points,
        ..d.clone()
    }
}

/// Expected shape of one of the benchmark datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub name: &'static str,
    pub n: usize,
    pub dim: usize,
    pub classes: usize,
    /// Class sizes; compared as a multiset.
    pub distribution: &'static [usize],
}

pub const UCI_MANIFESTS: [Manifest; 8] = [
    Manifest {
        name: "iris",
        n: 150,
        dim: 4,
        classes: 3,
        distribution: &[50, 50, 50],
    },
    Manifest {
        name: "breast",
        n: 106,
        dim: 9,
        classes: 6,
        distribution: &[22, 21, 14, 15, 16, 18],
    },
    Manifest {
        name: "seeds",
        n: 210,
        dim: 7,
        classes: 3,
        distribution: &[70, 70, 70],
    },
    Manifest {
        name: "glass",
        n: 214,
        dim: 9,
        classes: 6,
        distribution: &[70, 76, 17, 13, 9, 29],
    },
    Manifest {
        name: "wine",
        n: 178,
        dim: 13,
        classes: 3,
        distribution: &[59, 71, 48],
    },
    Manifest {
        name: "titanic",
        n: 2201,
        dim: 3,
        classes: 2,
        distribution: &[1490, 711],
    },
    Manifest {
        name: "yeast",
        n: 1484,
        dim: 8,
        classes: 10,
        distribution: &[5, 20, 30, 35, 44, 51, 163, 244, 429, 463],
    },
    Manifest {
        name: "wdbc",
        n: 569,
        dim: 30,
        classes: 2,
        distribution: &[212, 357],
    },
];

pub fn manifest(name: &str) -> Option<&'static Manifest> {
    UCI_MANIFESTS.iter().find(|m| m.name == name)
}

pub fn validate_manifest<F: Scalar>(d: &Dataset<F>, m: &Manifest) -> Result<()> {
    let fail = |detail: String| {
        Err(Error::Manifest {
            name: m.name.to_string(),
            detail,
        })
    };
    if d.len() != m.n {
        return fail(format!("expected {} rows, found {}", m.n, d.len()));
    }
    if d.dim() != m.dim {
        return fail(format!("expected {} features, found {}", m.dim, d.dim()));
    }
    let Some(mut dist) = d.class_distribution() else {
        return fail("no label column".into());
    };
    dist.retain(|&c| c > 0);
    if dist.len() != m.classes {
        return fail(format!(
            "expected {} classes, found {}",
            m.classes,
            dist.len()
        ));
    }
    let mut want = m.distribution.to_vec();
    want.sort_unstable();
    dist.sort_unstable();
    if dist != want {
        return fail(format!("class sizes {dist:?} differ from {want:?}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn generators_empty_and_deterministic() {
        let d: Dataset<f64> = gen_s_curve(0, 0.0, 1).unwrap();
        assert!(d.is_empty());
        let a: Dataset<f64> = gen_swiss_roll(50, 0.3, 9).unwrap();
        let b: Dataset<f64> = gen_swiss_roll(50, 0.3, 9).unwrap();
        assert_eq!(a, b);
        let c: Dataset<f64> = gen_swiss_roll(50, 0.3, 10).unwrap();
        assert_ne!(a, c);
        assert!(gen_s_curve::<f64>(5, -1.0, 0).is_err());
    }

    #[test]
    fn s_curve_lies_on_surface() {
        let d: Dataset<f64> = gen_s_curve(500, 0.0, 3).unwrap();
        assert_eq!((d.len(), d.dim(), d.t().unwrap().len()), (500, 3, 500));
        for p in d.points() {
            let r = p[0] * p[0] + (p[2].abs() - 1.0).powi(2);
            assert!((r - 1.0).abs() < 1e-12, "{r}");
            assert!((0.0..2.0).contains(&p[1]));
        }
    }

    #[test]
    fn swiss_roll_lies_on_spiral() {
        let d: Dataset<f64> = gen_swiss_roll(1500, 0.0, 7).unwrap();
        assert_eq!((d.len(), d.dim()), (1500, 3));
        for (p, &t) in d.points().iter().zip(d.t().unwrap()) {
            let r2 = p[0] * p[0] + p[2] * p[2];
            assert!((r2 - t * t).abs() <= 1e-9 * t * t);
            assert!((1.5 * PI..4.5 * PI).contains(&t));
        }
    }

    #[test]
    fn load_text_labels() {
        let f = write("1,2,a\n3,4,b\n");
        let d: Dataset<f64> = load_csv(
            f.path(),
            &CsvOptions::headerless().with_label(ColumnRef::Index(2)),
        )
        .unwrap();
        assert_eq!(d.points()[0].as_slice(), &[1.0, 2.0]);
        assert_eq!(d.points()[1].as_slice(), &[3.0, 4.0]);
        assert_eq!(d.labels().unwrap(), &[0, 1]);
        assert_eq!(
            d.label_names().unwrap(),
            &["a".to_string(), "b".to_string()]
        );
    }

    #[test]
    fn labels_follow_first_appearance() {
        let f = write("x,y,cls\n1,2,zeta\n3,4,alpha\n5,6,zeta\n");
        let d: Dataset<f64> = load_csv(
            f.path(),
            &CsvOptions::default().with_label(ColumnRef::Name("cls".into())),
        )
        .unwrap();
        assert_eq!(d.labels().unwrap(), &[0, 1, 0]);
        assert_eq!(
            d.feature_names().unwrap(),
            &["x".to_string(), "y".to_string()]
        );
    }

    #[test]
    fn header_populates_names() {
        let f = write("a,b\n1,2\n3,4\n");
        let d: Dataset<f64> = load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(
            d.feature_names().unwrap(),
            &["a".to_string(), "b".to_string()]
        );
        assert!(d.labels().is_none());
    }

    #[test]
    fn load_errors() {
        let f = write("1,2\n3\n");
        match load_csv::<f64>(f.path(), &CsvOptions::headerless()) {
            Err(Error::RaggedRow {
                row: 2,
                found: 1,
                expected: 2,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        let f = write("1,2\n3,oops\n");
        match load_csv::<f64>(f.path(), &CsvOptions::headerless()) {
            Err(Error::BadCell { row: 2, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let f = write("1,inf\n");
        assert!(matches!(
            load_csv::<f64>(f.path(), &CsvOptions::headerless()),
            Err(Error::BadCell { .. })
        ));
        assert!(matches!(
            load_csv::<f64>("/nonexistent/file.csv", &CsvOptions::default()),
            Err(Error::Open { .. })
        ));
        let f = write("a,b\n1,2\n");
        assert!(matches!(
            load_csv::<f64>(
                f.path(),
                &CsvOptions::default().with_label(ColumnRef::Name("zzz".into()))
            ),
            Err(Error::NoSuchColumn { .. })
        ));
    }

    #[test]
    fn round_trip_with_labels_and_t() {
        let d: Dataset<f64> = gen_swiss_roll(40, 0.5, 2).unwrap();
        let labels = (0..40).map(|i| (i * 7) % 5).collect();
        let d = d.with_labels(labels).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_csv(&d, f.path()).unwrap();
        let back: Dataset<f64> = load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!(back.points(), d.points());
        assert_eq!(back.labels(), d.labels());
        assert_eq!(back.t(), d.t());
        assert_eq!(back.feature_names(), d.feature_names());
    }

    #[test]
    fn standardize_examples() {
        let pts = vec![
            Vector::<f64>::new(vec![0.0, 5.0]).unwrap(),
            Vector::new(vec![10.0, 5.0]).unwrap(),
        ];
        let d = Dataset::new("s", pts)
            .unwrap()
            .with_labels(vec![1, 0])
            .unwrap();
        let s = standardize(&d);
        assert_eq!(s.points()[0].as_slice(), &[-1.0, 5.0]);
        assert_eq!(s.points()[1].as_slice(), &[1.0, 5.0]);
        assert_eq!(s.labels(), d.labels());
        let again = standardize(&s);
        for (a, b) in again.points().iter().zip(s.points()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn manifests() {
        let iris = manifest("iris").unwrap();
        assert_eq!((iris.n, iris.dim, iris.classes), (150, 4, 3));
        assert!(manifest("mnist").is_none());
        let pts = (0..150)
            .map(|i| Vector::new(vec![i as f64; 4]).unwrap())
            .collect();
        let d = Dataset::new("iris", pts).unwrap();
        assert!(validate_manifest(&d, iris).is_err());
        let d = d.with_labels((0..150).map(|i| i / 50).collect()).unwrap();
        validate_manifest(&d, iris).unwrap();
    }
}
