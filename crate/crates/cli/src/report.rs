//! Experiment reports and their CSV form.

use ergolab::Complex64;

use crate::{CliError, CliResult};

pub const CSV_HEADER: [&str; 8] =
    ["experiment", "params", "N", "estimate_re", "estimate_im", "target_re", "target_im", "defect"];

/// One convergence row: an estimate at scale N against its target.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub params: String,
    pub n: u64,
    pub estimate: Complex64,
    pub target: Complex64,
    pub defect: f64,
}

impl ReportRow {
    pub fn new(experiment: &str, params: String, n: u64, estimate: Complex64, target: Complex64) -> Self {
        Self { experiment: experiment.to_string(), params, n, estimate, target, defect: (estimate - target).norm() }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// below 1e−4 and from 1e12.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{x:.*}", (11 - exp) as usize))
    }
}

fn parse_float(s: &str, what: &str) -> CliResult<f64> {
    s.parse::<f64>().map_err(|_| CliError::Other(format!("bad {what} '{s}' in CSV")))
}

impl ExperimentReport {
    /// Sorts rows by (experiment, N), keeping the order within each N.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| (a.experiment.as_str(), a.n).cmp(&(b.experiment.as_str(), b.n)));
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(CSV_HEADER).unwrap();
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.params.clone(),
                r.n.to_string(),
                format_g12(r.estimate.re),
                format_g12(r.estimate.im),
                format_g12(r.target.re),
                format_g12(r.target.im),
                format_g12(r.defect),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = rd.headers().map_err(|e| CliError::Other(e.to_string()))?;
        if header.iter().ne(CSV_HEADER) {
            return Err(CliError::Other(format!("unexpected CSV header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| CliError::Other(e.to_string()))?;
            let f = |i: usize, what: &str| parse_float(&rec[i], what);
            rows.push(ReportRow {
                experiment: rec[0].to_string(),
                params: rec[1].to_string(),
                n: rec[2].parse().map_err(|_| CliError::Other(format!("bad N '{}' in CSV", &rec[2])))?,
                estimate: Complex64::new(f(3, "estimate_re")?, f(4, "estimate_im")?),
                target: Complex64::new(f(5, "target_re")?, f(6, "target_im")?),
                defect: f(7, "defect")?,
            });
        }
        Ok(Self { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        // reference strings from C printf("%.12g")
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (std::f64::consts::PI * 1e-7, "3.14159265359e-07"),
            (0.6079271018540267, "0.607927101854"),
            (99999999999.95, "99999999999.9"),
            (999999999999.5, "1e+12"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g12(x), want, "{x}");
        }
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![
            ReportRow::new("pnt", String::new(), 10, Complex64::new(-0.2, 0.0), Complex64::new(0.0, 0.0)),
            ReportRow::new("katai", "alpha=sqrt2 - 1;quantity=mean,x".into(), 1000, Complex64::new(1e-9, -3.0), Complex64::new(0.5, 0.0)),
        ];
        let report = ExperimentReport { rows };
        let text = report.to_csv();
        assert!(text.starts_with("experiment,params,N,estimate_re,estimate_im,target_re,target_im,defect\n"));
        assert!(!text.contains('\r'));
        let back = ExperimentReport::from_csv(&text).unwrap();
        assert_eq!(back.to_csv(), text);
        assert_eq!(back.rows[1].params, "alpha=sqrt2 - 1;quantity=mean,x");
        assert_eq!(back.rows[0].estimate.re, -0.2);
    }
}
