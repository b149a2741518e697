//! Interval CSV interchange format.
//!
//! One header row, then one row per observation. Each variable `V`
//! contributes the columns `V_lo,V_hi` and optionally `V_mode`, in that
//! order. A file whose first row is numeric is read as header-less with
//! `lo,hi` pairs only.

use symint_core::pca::MultivariateIntervalSample;
use symint_core::{BivariateIntervalObs, BivariateIntervalSample, Interval};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct VariableColumns {
    pub name: String,
    lo: usize,
    hi: usize,
    mode: Option<usize>,
}

/// Parsed table: variable layout plus per-row intervals and modes.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTable {
    pub variables: Vec<VariableColumns>,
    pub intervals: Vec<Vec<Interval>>,
    pub modes: Option<Vec<Vec<f64>>>,
}

impl IntervalTable {
    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn has_modes(&self) -> bool {
        self.modes.is_some()
    }

    pub fn to_bivariate(&self) -> Result<BivariateIntervalSample, CliError> {
        if self.variables.len() != 2 {
            return Err(CliError::validation(format!(
                "expected exactly 2 variables, found {}",
                self.variables.len()
            )));
        }
        let obs = self
            .intervals
            .iter()
            .enumerate()
            .map(|(i, row)| match &self.modes {
                Some(m) => BivariateIntervalObs::with_modes(row[0], row[1], m[i][0], m[i][1])
                    .map_err(|e| CliError::from(e).in_row(i + 1)),
                None => Ok(BivariateIntervalObs::new(row[0], row[1])),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BivariateIntervalSample::new(obs)?)
    }

    pub fn to_multivariate(&self) -> Result<MultivariateIntervalSample, CliError> {
        let sample = match &self.modes {
            Some(m) => MultivariateIntervalSample::with_modes(self.intervals.clone(), m.clone()),
            None => MultivariateIntervalSample::new(self.intervals.clone()),
        }?;
        Ok(sample)
    }
}

fn header_layout(fields: &[String]) -> Option<Result<Vec<VariableColumns>, CliError>> {
    let suffix = |f: &str| {
        ["_lo", "_hi", "_mode"]
            .iter()
            .find(|s| f.len() > s.len() && f.ends_with(*s))
            .map(|s| (f[..f.len() - s.len()].to_string(), *s))
    };
    let parsed: Vec<_> = fields.iter().map(|f| suffix(f)).collect();
    if parsed.iter().any(|p| p.is_none()) {
        // A row that is not entirely `V_lo`-style names is data, unless it
        // is obviously a malformed header (no numeric field at all).
        if fields.iter().all(|f| f.parse::<f64>().is_err()) {
            return Some(Err(CliError::validation(
                "header must consist of `V_lo,V_hi[,V_mode]` column groups",
            )));
        }
        return None;
    }
    let parsed: Vec<(String, &str)> = parsed.into_iter().map(Option::unwrap).collect();
    let mut vars = Vec::new();
    let mut i = 0;
    while i < parsed.len() {
        let (name, kind) = &parsed[i];
        let next_is = |j: usize, k: &str| parsed.get(j).is_some_and(|(n, s)| n == name && *s == k);
        if *kind != "_lo" || !next_is(i + 1, "_hi") {
            return Some(Err(CliError::validation(format!(
                "header column {}: expected `{name}_lo` followed by `{name}_hi`",
                i + 1
            ))));
        }
        let mode = next_is(i + 2, "_mode").then_some(i + 2);
        if vars.iter().any(|v: &VariableColumns| &v.name == name) {
            return Some(Err(CliError::validation(format!("variable `{name}` appears twice"))));
        }
        vars.push(VariableColumns {
            name: name.clone(),
            lo: i,
            hi: i + 1,
            mode,
        });
        i += if mode.is_some() { 3 } else { 2 };
    }
    let with_modes = vars.iter().filter(|v| v.mode.is_some()).count();
    if with_modes != 0 && with_modes != vars.len() {
        return Some(Err(CliError::validation(
            "either every variable or none has a `_mode` column",
        )));
    }
    Some(Ok(vars))
}

fn headerless_layout(width: usize) -> Result<Vec<VariableColumns>, CliError> {
    if width < 4 || !width.is_multiple_of(2) {
        return Err(CliError::validation(format!(
            "header-less rows need an even number (at least 4) of columns, found {width}"
        )));
    }
    Ok((0..width / 2)
        .map(|j| VariableColumns {
            name: default_name(j),
            lo: 2 * j,
            hi: 2 * j + 1,
            mode: None,
        })
        .collect())
}

fn default_name(j: usize) -> String {
    match j {
        0 => "X".into(),
        1 => "Y".into(),
        _ => format!("V{}", j + 1),
    }
}

/// Parses CSV text into an interval table. Errors name the 1-based data row
/// and the file line.
pub fn parse_table(bytes: &[u8]) -> Result<IntervalTable, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CliError::validation("input is not valid UTF-8"))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::validation(format!("malformed CSV: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec.iter().map(str::to_string).collect::<Vec<_>>()));
    }
    let Some((_, first)) = records.first() else {
        return Err(CliError::validation("input contains no rows"));
    };
    let (variables, data) = match header_layout(first) {
        Some(layout) => (layout?, &records[1..]),
        None => (headerless_layout(first.len())?, &records[..]),
    };
    let width = variables.iter().map(|v| if v.mode.is_some() { 3 } else { 2 }).sum::<usize>();
    let header_names: Vec<String> = variables
        .iter()
        .flat_map(|v| {
            let mut cols = vec![format!("{}_lo", v.name), format!("{}_hi", v.name)];
            if v.mode.is_some() {
                cols.push(format!("{}_mode", v.name));
            }
            cols
        })
        .collect();
    let with_modes = variables.iter().any(|v| v.mode.is_some());
    let mut intervals = Vec::with_capacity(data.len());
    let mut modes = Vec::new();
    for (idx, (line, fields)) in data.iter().enumerate() {
        let row = idx + 1;
        let at = |msg: String| CliError::validation(format!("row {row} (line {line}): {msg}"));
        if fields.len() != width {
            return Err(at(format!("expected {width} fields, found {}", fields.len())));
        }
        let num = |col: usize| -> Result<f64, CliError> {
            let raw = &fields[col];
            let v: f64 = raw
                .parse()
                .map_err(|_| at(format!("column `{}`: cannot parse `{raw}` as a number", header_names[col])))?;
            if !v.is_finite() {
                return Err(at(format!("column `{}`: value `{raw}` is not finite", header_names[col])));
            }
            Ok(v)
        };
        let mut ivs = Vec::with_capacity(variables.len());
        let mut ms = Vec::new();
        for v in &variables {
            let (lo, hi) = (num(v.lo)?, num(v.hi)?);
            ivs.push(Interval::new(lo, hi).map_err(|e| at(format!("variable `{}`: {e}", v.name)))?);
            if let Some(mi) = v.mode {
                let m = num(mi)?;
                if !(lo <= m && m <= hi) {
                    return Err(at(format!("variable `{}`: mode {m} lies outside [{lo}, {hi}]", v.name)));
                }
                ms.push(m);
            }
        }
        intervals.push(ivs);
        if with_modes {
            modes.push(ms);
        }
    }
    if intervals.len() < 2 {
        return Err(CliError::validation(format!(
            "at least 2 observations required, found {}",
            intervals.len()
        )));
    }
    Ok(IntervalTable {
        variables,
        intervals,
        modes: with_modes.then_some(modes),
    })
}

/// Writes a table with the given variable names. Numbers use the shortest
/// representation that parses back to the same value.
pub fn write_table(names: &[String], intervals: &[Vec<Interval>], modes: Option<&[Vec<f64>]>) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = Vec::new();
    for n in names {
        header.push(format!("{n}_lo"));
        header.push(format!("{n}_hi"));
        if modes.is_some() {
            header.push(format!("{n}_mode"));
        }
    }
    w.write_record(&header).expect("in-memory write");
    for (i, row) in intervals.iter().enumerate() {
        let mut rec = Vec::new();
        for (j, iv) in row.iter().enumerate() {
            rec.push(iv.lower().to_string());
            rec.push(iv.upper().to_string());
            if let Some(m) = modes {
                rec.push(m[i][j].to_string());
            }
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// CSV of a bivariate sample with variables `X` and `Y`.
pub fn write_bivariate(sample: &BivariateIntervalSample) -> String {
    let intervals: Vec<Vec<Interval>> = sample.iter().map(|o| vec![*o.x(), *o.y()]).collect();
    let modes: Option<Vec<Vec<f64>>> = sample
        .has_modes()
        .then(|| sample.iter().map(|o| vec![o.resolved_mode_x(), o.resolved_mode_y()]).collect());
    write_table(&["X".into(), "Y".into()], &intervals, modes.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_modes() {
        let t = parse_table(b"a_lo,a_hi,a_mode,b_lo,b_hi,b_mode\n0,2,1,1,3,2.5\n1,4,1,0,1,0\n").unwrap();
        assert_eq!(t.names(), vec!["a", "b"]);
        assert_eq!(t.modes.as_ref().unwrap()[0], vec![1.0, 2.5]);
        let s = t.to_bivariate().unwrap();
        assert!(s.has_modes());
    }

    #[test]
    fn headerless_rows() {
        let t = parse_table(b"1,4,6,7\n2,7,6,9\n").unwrap();
        assert_eq!(t.names(), vec!["X", "Y"]);
        assert_eq!(t.intervals.len(), 2);
    }

    #[test]
    fn errors_name_rows() {
        let e = parse_table(b"1,abc,3,4\n1,2,3,4\n").unwrap_err();
        assert!(e.message.contains("row 1"), "{}", e.message);
        assert!(e.message.contains("abc"));
        let e = parse_table(b"X_lo,X_hi,Y_lo,Y_hi\n1,2,3,4\n5,4,3,4\n").unwrap_err();
        assert!(e.message.contains("row 2 (line 3)"), "{}", e.message);
        let e = parse_table(b"X_lo,X_hi,Y_lo,Y_hi\n1,2,3\n1,2,3,4\n").unwrap_err();
        assert!(e.message.contains("row 1"));
        assert!(parse_table(b"X_lo,X_hi,X_mode,Y_lo,Y_hi\n1,2,1,3,4\n1,2,1,3,4\n").is_err());
        assert!(parse_table(b"X_hi,X_lo,Y_lo,Y_hi\n1,2,3,4\n1,2,3,4\n").is_err());
        assert!(parse_table(b"X_lo,X_hi,Y_lo,Y_hi\n1,2,3,4\n").is_err());
        assert!(parse_table(b"X_lo,X_hi,Y_lo,Y_hi\n1,2,3,NaN\n1,2,3,4\n").is_err());
        assert!(parse_table(b"X_lo,X_hi,X_mode,Y_lo,Y_hi,Y_mode\n1,2,3,3,4,3\n1,2,1,3,4,3\n").is_err());
    }

    #[test]
    fn embedded_sets_round_trip_bit_exactly() {
        for s in symint_core::datasets::reference_sets() {
            let text = write_bivariate(&s);
            let back = parse_table(text.as_bytes()).unwrap().to_bivariate().unwrap();
            assert_eq!(back, s);
            assert_eq!(write_bivariate(&back), text);
        }
    }

    #[test]
    fn awkward_values_round_trip() {
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.12345679];
        let intervals: Vec<Vec<Interval>> = vals
            .iter()
            .map(|&v| vec![Interval::new(v, v.abs() * 2.0 + 1.0).unwrap(); 3])
            .collect();
        let names: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        let text = write_table(&names, &intervals, None);
        let back = parse_table(text.as_bytes()).unwrap();
        assert_eq!(back.intervals, intervals);
    }
}
