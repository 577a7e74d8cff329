//! Text formats: measured joint distributions, tomographic density matrices
//! and reports.
//!
//! Distribution files are CSV with `# key=value` metadata lines:
//!
//! ```text
//! # phi_deg=180
//! # theta_deg=90
//! # r_h=0.1244
//! # r_v=0.4645
//! # m_plus=transmitted
//! m,y,w,p,sigma
//! 1,1,1,0.282,0.002
//! ...
//! ```
//!
//! `phi_deg` and `theta_deg` are required. `m_plus` says which probe outcome
//! the label `m = +1` stands for and defaults to `reflected`. Density-matrix
//! files hold sixteen `row,col,re,im` records under that header.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::experiment::Analysis;
use crate::qcore::{ComplexMatrix, DensityMatrix, C64};
use crate::scenario::{JointDistribution, Outcome, Provenance, SlideOutcome};
use crate::tolerance::Tolerances;

/// Significant digits used for every reported number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal that reads back as `round_sig(x)`.
pub fn format_number(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        // Avoid "-0".
        return "0".to_string();
    }
    if r.abs() < 1e-4 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits `# key=value` lines from the rest, keeping line numbers.
fn metadata_lines(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let Some(body) = line.trim().strip_prefix('#') else {
            continue;
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(parse_error(i + 1, format!("metadata line `{body}` is not key=value")));
        };
        out.insert(key.trim().to_string(), (i + 1, value.trim().to_string()));
    }
    Ok(out)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn record_line(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, index: usize, name: &str) -> Result<T> {
    let line = record_line(record);
    let raw = record
        .get(index)
        .ok_or_else(|| parse_error(line, format!("missing column `{name}`")))?;
    raw.parse()
        .map_err(|_| parse_error(line, format!("`{raw}` is not a valid {name}")))
}

fn check_header(reader: &mut csv::Reader<&[u8]>, accepted: &[&[&str]]) -> Result<usize> {
    let header = reader
        .headers()
        .map_err(|e| parse_error(1, e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    accepted
        .iter()
        .find(|h| **h == names.as_slice())
        .map(|h| h.len())
        .ok_or_else(|| {
            parse_error(
                record_line(&header),
                format!("unexpected header `{}`, expected `{}`", names.join(","), accepted[0].join(",")),
            )
        })
}

/// Metadata of a distribution file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionMetadata {
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub r_h: Option<f64>,
    pub r_v: Option<f64>,
    /// Probe outcome written as `m = +1`.
    pub m_plus: SlideOutcome,
    /// Unrecognised keys, kept verbatim.
    pub extra: BTreeMap<String, String>,
}

impl DistributionMetadata {
    pub fn new(phi_deg: f64, theta_deg: f64) -> Self {
        DistributionMetadata {
            phi_deg,
            theta_deg,
            r_h: None,
            r_v: None,
            m_plus: SlideOutcome::Reflected,
            extra: BTreeMap::new(),
        }
    }

    /// Probe outcome for a file label `m = ±1`.
    pub fn slide_outcome(&self, m: Outcome) -> SlideOutcome {
        match (m, self.m_plus) {
            (Outcome::Plus, s) => s,
            (Outcome::Minus, SlideOutcome::Reflected) => SlideOutcome::Transmitted,
            (Outcome::Minus, SlideOutcome::Transmitted) => SlideOutcome::Reflected,
        }
    }
}

/// A parsed distribution file. Probabilities are kept as written; analysis
/// normalises them.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFile {
    pub metadata: DistributionMetadata,
    pub distribution: JointDistribution,
    /// Uncertainties keyed by file labels `(m, y, w)`. Carried, never used in
    /// computations.
    pub sigmas: BTreeMap<(i8, i8, i8), f64>,
}

fn outcome_label(record: &csv::StringRecord, index: usize, name: &str) -> Result<Outcome> {
    let v: i64 = field(record, index, name)?;
    Outcome::from_label(v).ok_or_else(|| parse_error(record_line(record), format!("{name} = {v} is not +1 or -1")))
}

/// Parses and validates a measured distribution.
pub fn parse_distribution(text: &str, tol: &Tolerances) -> Result<DistributionFile> {
    let meta = metadata_lines(text)?;
    let number = |key: &'static str| -> Result<Option<f64>> {
        meta.get(key)
            .map(|(line, v)| v.parse::<f64>().map_err(|_| parse_error(*line, format!("`{key}={v}` is not a number"))))
            .transpose()
    };
    let phi_deg = number("phi_deg")?.ok_or(Error::MissingMetadata("phi_deg"))?;
    let theta_deg = number("theta_deg")?.ok_or(Error::MissingMetadata("theta_deg"))?;
    let m_plus = match meta.get("m_plus") {
        None => SlideOutcome::Reflected,
        Some((_, v)) if v == "reflected" => SlideOutcome::Reflected,
        Some((_, v)) if v == "transmitted" => SlideOutcome::Transmitted,
        Some((line, v)) => {
            return Err(parse_error(*line, format!("m_plus must be `reflected` or `transmitted`, not `{v}`")))
        }
    };
    let known = ["phi_deg", "theta_deg", "r_h", "r_v", "m_plus"];
    let metadata = DistributionMetadata {
        phi_deg,
        theta_deg,
        r_h: number("r_h")?,
        r_v: number("r_v")?,
        m_plus,
        extra: meta
            .iter()
            .filter(|(k, _)| !known.contains(&k.as_str()))
            .map(|(k, (_, v))| (k.clone(), v.clone()))
            .collect(),
    };

    let mut reader = csv_reader(text);
    let columns = check_header(&mut reader, &[&["m", "y", "w", "p", "sigma"], &["m", "y", "w", "p"]])?;
    let mut table: BTreeMap<(i8, i8, i8), f64> = BTreeMap::new();
    let mut sigmas = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record_line(&record);
        if record.len() != columns {
            return Err(parse_error(line, format!("expected {columns} fields, found {}", record.len())));
        }
        let m = outcome_label(&record, 0, "m")?;
        let y = outcome_label(&record, 1, "y")?;
        let w = outcome_label(&record, 2, "w")?;
        let p: f64 = field(&record, 3, "probability")?;
        let key = (m.label(), y.label(), w.label());
        if table.insert(key, p).is_some() {
            return Err(Error::DuplicateOutcome { m: key.0, y: key.1, w: key.2 });
        }
        if columns == 5 && !record[4].is_empty() {
            sigmas.insert(key, field::<f64>(&record, 4, "sigma")?);
        }
    }
    for m in Outcome::ALL {
        for y in Outcome::ALL {
            for w in Outcome::ALL {
                if !table.contains_key(&(m.label(), y.label(), w.label())) {
                    return Err(Error::MissingOutcome {
                        m: m.label(),
                        y: y.label(),
                        w: w.label(),
                    });
                }
            }
        }
    }
    let inverse = |s: SlideOutcome| {
        if metadata.slide_outcome(Outcome::Plus) == s {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    };
    let w_observable = crate::qcore::BlochObservable::from_degrees(theta_deg, phi_deg);
    let distribution = JointDistribution::from_fn(w_observable, Provenance::Measured, tol, |s, y, w| {
        table[&(inverse(s).label(), y.label(), w.label())]
    })?;
    Ok(DistributionFile {
        metadata,
        distribution,
        sigmas,
    })
}

/// Writes a distribution file that [`parse_distribution`] reads back.
pub fn emit_distribution(file: &DistributionFile) -> String {
    let md = &file.metadata;
    let mut out = String::new();
    out.push_str(&format!("# phi_deg={}\n", format_number(md.phi_deg)));
    out.push_str(&format!("# theta_deg={}\n", format_number(md.theta_deg)));
    if let Some(r) = md.r_h {
        out.push_str(&format!("# r_h={}\n", format_number(r)));
    }
    if let Some(r) = md.r_v {
        out.push_str(&format!("# r_v={}\n", format_number(r)));
    }
    let m_plus = match md.m_plus {
        SlideOutcome::Reflected => "reflected",
        SlideOutcome::Transmitted => "transmitted",
    };
    out.push_str(&format!("# m_plus={m_plus}\n"));
    for (k, v) in &md.extra {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("m,y,w,p,sigma\n");
    for m in Outcome::ALL {
        for y in Outcome::ALL {
            for w in Outcome::ALL {
                let p = file.distribution.get(md.slide_outcome(m), y, w);
                let key = (m.label(), y.label(), w.label());
                let sigma = file.sigmas.get(&key).map(|s| format_number(*s)).unwrap_or_default();
                out.push_str(&format!("{},{},{},{},{}\n", key.0, key.1, key.2, format_number(p), sigma));
            }
        }
    }
    out
}

/// A parsed density-matrix file.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixFile {
    pub state: DensityMatrix,
    pub metadata: BTreeMap<String, String>,
    /// Non-fatal findings, such as an accepted negative eigenvalue.
    pub warnings: Vec<String>,
}

/// Parses a 4×4 state. A matrix that passes the simulated-state checks is
/// used verbatim; otherwise it is validated as tomographic data, which
/// symmetrises, renormalises and accepts slightly negative eigenvalues.
pub fn parse_density_matrix(text: &str, tol: &Tolerances) -> Result<DensityMatrixFile> {
    const DIM: usize = 4;
    let metadata = metadata_lines(text)?
        .into_iter()
        .map(|(k, (_, v))| (k, v))
        .collect();
    let mut reader = csv_reader(text);
    check_header(&mut reader, &[&["row", "col", "re", "im"]])?;
    let mut entries: Vec<Option<C64>> = vec![None; DIM * DIM];
    let mut last_line = 1;
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record_line(&record);
        last_line = line;
        if record.len() != 4 {
            return Err(parse_error(line, format!("expected 4 fields, found {}", record.len())));
        }
        let row: usize = field(&record, 0, "row")?;
        let col: usize = field(&record, 1, "col")?;
        if row >= DIM || col >= DIM {
            return Err(parse_error(line, format!("index ({row}, {col}) outside the 4x4 grid")));
        }
        let re: f64 = field(&record, 2, "real part")?;
        let im: f64 = field(&record, 3, "imaginary part")?;
        if !re.is_finite() || !im.is_finite() {
            return Err(parse_error(line, "entry is not finite"));
        }
        if entries[row * DIM + col].replace(C64::new(re, im)).is_some() {
            return Err(parse_error(line, format!("duplicate entry ({row}, {col})")));
        }
    }
    if let Some(missing) = entries.iter().position(Option::is_none) {
        return Err(parse_error(
            last_line,
            format!("missing entry ({}, {})", missing / DIM, missing % DIM),
        ));
    }
    let values: Vec<C64> = entries.into_iter().flatten().collect();
    let matrix = ComplexMatrix::from_row_slice(DIM, &values)?;
    let mut warnings = Vec::new();
    let state = match DensityMatrix::new(matrix.clone()) {
        Ok(state) => state,
        Err(_) => {
            let state = DensityMatrix::from_measured(matrix, tol)?;
            if state.is_floored() {
                warnings.push(format!(
                    "negative eigenvalue {:e} accepted within the tomographic floor",
                    state.min_eigenvalue()
                ));
            }
            warnings.push("state was symmetrised and renormalised".to_string());
            state
        }
    };
    Ok(DensityMatrixFile {
        state,
        metadata,
        warnings,
    })
}

/// Writes a state with every digit needed to read back the same `f64`s.
pub fn emit_density_matrix(state: &DensityMatrix, metadata: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (k, v) in metadata {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("row,col,re,im\n");
    let m = state.matrix();
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            let z = m.get(r, c);
            out.push_str(&format!("{r},{c},{},{}\n", z.re, z.im));
        }
    }
    out
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match (n.is_f64(), n.as_f64()) {
            (true, Some(x)) => serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number),
            _ => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with keys in sorted order and floats rounded to
/// [`SIGNIFICANT_DIGITS`].
pub fn emit_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialise");
    let mut s = serde_json::to_string_pretty(&round_value(v)).expect("values serialise");
    s.push('\n');
    s
}

/// Column names of [`emit_analysis_csv`] for the estimator kinds present.
pub fn analysis_csv_header(analysis: &Analysis) -> Vec<String> {
    let mut cols: Vec<String> = ["phi_deg", "theta_deg", "bound", "spread_x", "spread_y", "kappa"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for e in &analysis.estimates {
        let k = e.x_estimator.kind.name();
        for c in [
            "f_plus",
            "f_minus",
            "g_plus",
            "g_minus",
            "eps_x",
            "spread_x_est",
            "root_dispersion",
            "eps_y",
            "spread_y_est",
            "lhs_ak",
            "lhs_hall",
            "lhs_ozawa",
            "lhs_new",
        ] {
            cols.push(format!("{k}_{c}"));
        }
    }
    cols
}

/// One row per analysis (one per `φ` in a sweep), with a block of columns
/// for each estimator kind. All rows must share the same estimator kinds.
pub fn emit_analysis_csv(analyses: &[Analysis]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if let Some(first) = analyses.first() {
        writer.write_record(analysis_csv_header(first)).expect("in-memory write");
    }
    for a in analyses {
        let mut row = vec![
            a.phi_deg,
            a.theta_deg,
            a.state.bound,
            a.state.spread_x,
            a.state.spread_y,
            a.slide.kappa,
        ];
        for e in &a.estimates {
            let r = &e.relations;
            row.extend([
                e.x_estimator.plus,
                e.x_estimator.minus,
                e.y_estimator.plus,
                e.y_estimator.minus,
                e.eps_x.value,
                e.spread_x_est,
                e.dispersion.root_lhs(),
                e.eps_y.value,
                e.spread_y_est,
                r.lhs_ak,
                r.lhs_hall,
                r.lhs_ozawa,
                r.lhs_new,
            ]);
        }
        writer
            .write_record(row.into_iter().map(format_number))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii output")
}
