use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use viewmetric::clustering::Init;
use viewmetric::data::write_csv;
use viewmetric::eval::score_all;
use viewmetric::{
    contour_grid, gen_s_curve, gen_swiss_roll, kmeans_fit, knn_evaluate, load_csv, load_labels,
    spectral_report, standardize, ColumnRef, CsvOptions, Dataset64, KMeansConfig64, KnnConfig,
    Protocol,
};

use crate::args::{
    ContourArgs, DistmatArgs, EvalArgs, Format, GenArgs, InitArg, InputArgs, KmeansArgs, KnnArgs,
    Manifold, ProtocolArg,
};
use crate::CliError;

/// Largest point count `distmat` accepts without `--force`.
pub const DISTMAT_CAP: usize = 2000;

pub fn emit(out: Option<&Path>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| CliError::Output(e.into()))?;
    body.push(b'\n');
    Ok(body)
}

fn column(s: &str) -> ColumnRef {
    match s.parse() {
        Ok(c) => c,
        Err(never) => match never {},
    }
}

/// Loads the input CSV. Headerless files default to a trailing label column
/// when `labeled` is set.
fn load(input: &InputArgs, labeled: bool) -> Result<Dataset64, CliError> {
    let mut opts = if input.no_header {
        CsvOptions::headerless()
    } else {
        CsvOptions::default()
    };
    match &input.label_column {
        Some(c) => opts = opts.with_label(column(c)),
        None if labeled && input.no_header => opts = opts.with_label(ColumnRef::Last),
        None => {}
    }
    Ok(load_csv(&input.input, &opts)?)
}

fn maybe_standardize(d: Dataset64, on: bool) -> Dataset64 {
    if on {
        standardize(&d)
    } else {
        d
    }
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let c = &a.common;
    let d = match a.dataset {
        Manifold::SwissRoll => gen_swiss_roll(a.n, a.noise, c.seed)?,
        Manifold::SCurve => gen_s_curve(a.n, a.noise, c.seed)?,
    };
    let d = maybe_standardize(d, c.standardize);
    let body = match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&d, &mut buf)?;
            buf
        }
        Format::Json => json(&d)?,
    };
    emit(c.out.as_deref(), &body)
}

pub fn kmeans(a: KmeansArgs) -> Result<(), CliError> {
    let c = &a.common;
    let raw = load(&a.input, false)?;
    let d = maybe_standardize(raw.clone(), c.standardize);
    let init = match a.init {
        InitArg::KMeansPP => Init::KMeansPP,
        InitArg::Random => Init::RandomPoints,
    };
    let config = KMeansConfig64::new(a.k, c.metric)
        .with_seed(c.seed)
        .with_init(init)
        .with_restarts(a.restarts)
        .with_max_iter(a.max_iter)
        .with_tol(a.tol);
    let model = kmeans_fit(d.points(), &config)?;
    let body = match c.format_or(Format::Csv) {
        // Input features (as read) plus the assigned cluster in `label`.
        Format::Csv => {
            let mut out = Dataset64::new(raw.name(), raw.points().to_vec())?
                .with_labels(model.labels.clone())?;
            if let Some(names) = raw.feature_names() {
                out = out.with_feature_names(names.to_vec())?;
            }
            if let Some(t) = raw.t() {
                out = out.with_t(t.to_vec())?;
            }
            let mut buf = Vec::new();
            write_csv(&out, &mut buf)?;
            buf
        }
        Format::Json => json(&model)?,
    };
    emit(c.out.as_deref(), &body)
}

pub fn knn(a: KnnArgs) -> Result<(), CliError> {
    let c = &a.common;
    let d = maybe_standardize(load(&a.input, true)?, c.standardize);
    let protocol = match a.protocol {
        ProtocolArg::Loo => Protocol::LeaveOneOut,
        ProtocolArg::Kfold => Protocol::KFold {
            folds: a.folds,
            seed: c.seed,
        },
        ProtocolArg::Holdout => Protocol::HoldOut {
            fraction: a.fraction,
            seed: c.seed,
        },
    };
    let report = knn_evaluate(&d, &KnnConfig::new(a.k, c.metric).with_protocol(protocol))?;
    let body = match c.format_or(Format::Json) {
        Format::Csv => {
            let mut s = String::from("fold,correct,total,accuracy\n");
            for (i, f) in report.folds.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{},{:?}", f.correct, f.total, f.accuracy);
            }
            s.into_bytes()
        }
        Format::Json => json(&report)?,
    };
    emit(c.out.as_deref(), &body)
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    let truth = load_labels(&a.truth, &column(&a.truth_column), true)?;
    let pred = load_labels(&a.pred, &column(&a.pred_column), true)?;
    let scores = score_all(&truth, &pred)?;
    let body = match a.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let s = &scores;
            format!(
                "ari,homogeneity,completeness,v_measure,ami,fmi,best_map_accuracy\n{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
                s.ari, s.homogeneity, s.completeness, s.v_measure, s.ami, s.fmi, s.best_map_accuracy
            )
            .into_bytes()
        }
        Format::Json => json(&scores)?,
    };
    emit(a.out.as_deref(), &body)
}

pub fn distmat(a: DistmatArgs) -> Result<(), CliError> {
    let c = &a.common;
    let d = maybe_standardize(load(&a.input, false)?, c.standardize);
    if d.len() > DISTMAT_CAP && !a.force {
        return Err(CliError::Usage(format!(
            "{} points exceed the cap of {DISTMAT_CAP} for dense eigen-analysis; pass --force to run anyway",
            d.len()
        )));
    }
    let report = spectral_report(d.points(), a.tol)?;
    let body = match c.format_or(Format::Json) {
        Format::Csv => {
            let mut s = String::from("index,eigen_view,eigen_euclid\n");
            for (i, (v, e)) in report
                .eigenvalues_view
                .iter()
                .zip(&report.eigenvalues_euclid)
                .enumerate()
            {
                let _ = writeln!(s, "{i},{v:?},{e:?}");
            }
            s.into_bytes()
        }
        Format::Json => json(&report)?,
    };
    emit(c.out.as_deref(), &body)
}

pub fn contour(a: ContourArgs) -> Result<(), CliError> {
    let c = &a.common;
    let mut fixed = BTreeMap::new();
    for &(i, v) in &a.fixed {
        if fixed.insert(i, v).is_some() {
            return Err(CliError::Usage(format!(
                "coordinate {i} fixed more than once"
            )));
        }
    }
    let grid = contour_grid(a.dim, &fixed, a.axes, (a.lo, a.hi), a.steps, c.metric)?;
    let body = match c.format_or(Format::Csv) {
        Format::Csv => {
            let (p, q) = grid.axes;
            let mut s = format!("x{p},x{q},value\n");
            for (i, u) in grid.ticks.iter().enumerate() {
                for (j, v) in grid.ticks.iter().enumerate() {
                    let _ = writeln!(s, "{u:?},{v:?},{:?}", grid.at(i, j));
                }
            }
            s.into_bytes()
        }
        Format::Json => json(&grid)?,
    };
    emit(c.out.as_deref(), &body)
}
