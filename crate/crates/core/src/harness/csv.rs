//! CSV rendering and parsing for sweep rows.
//!
//! Long layout columns:
//! `scenario_id,axis,axis_value,method,seed,sr,iterations,converged,wall_ms`.
//! Wide layout columns: `scenario_id,axis,axis_value,seed` followed by one SR
//! column per method, named after the method.

use super::{Axis, Layout, Method, SweepRow};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const LONG_HEADER: &str = "scenario_id,axis,axis_value,method,seed,sr,iterations,converged,wall_ms";

/// Round to 12 significant digits and print the shortest decimal that reads
/// back to the rounded value.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded:?}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

pub fn render_csv(rows: &[SweepRow], layout: Layout) -> Result<String> {
    match layout {
        Layout::Long => render_long(rows),
        Layout::Wide => render_wide(rows),
    }
}

fn render_long(rows: &[SweepRow]) -> Result<String> {
    let mut w = writer();
    w.write_record(LONG_HEADER.split(',')).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scenario_id.clone(),
            r.axis.to_string(),
            format_float(r.axis_value),
            r.method.to_string(),
            r.seed.to_string(),
            format_float(r.sr),
            r.iterations.to_string(),
            r.converged.to_string(),
            format_float(r.wall_ms),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

fn render_wide(rows: &[SweepRow]) -> Result<String> {
    let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    methods.sort_unstable();
    methods.dedup();
    let mut w = writer();
    let header = ["scenario_id", "axis", "axis_value", "seed"].into_iter().chain(methods.iter().map(|m| m.name()));
    w.write_record(header).map_err(csv_err)?;

    // Keyed by (axis value, seed) in sort order; methods are columns.
    let mut groups: BTreeMap<(OrdF64, u64), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((OrdF64(r.axis_value), r.seed)).or_default().push(r);
    }
    for ((v, seed), group) in groups {
        let mut rec =
            vec![group[0].scenario_id.clone(), group[0].axis.to_string(), format_float(v.0), seed.to_string()];
        for m in &methods {
            rec.push(group.iter().find(|r| r.method == *m).map(|r| format_float(r.sr)).unwrap_or_default());
        }
        w.write_record(rec).map_err(csv_err)?;
    }
    finish(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn field<T: std::str::FromStr>(line: u64, name: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Csv(format!("line {line}: bad {name} \"{s}\"")))
}

/// Parse a long-layout CSV.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut records = rd.records();
    match records.next() {
        Some(h) => {
            let h = h.map_err(csv_err)?;
            if h.iter().collect::<Vec<_>>().join(",") != LONG_HEADER {
                return Err(Error::Csv(format!("unexpected header \"{}\"", h.iter().collect::<Vec<_>>().join(","))));
            }
        }
        None => return Err(Error::Csv("empty file".into())),
    }
    records
        .map(|rec| {
            let f = rec.map_err(csv_err)?;
            let n = f.position().map_or(0, |p| p.line());
            if f.len() != 9 {
                return Err(Error::Csv(format!("line {n}: expected 9 fields, found {}", f.len())));
            }
            Ok(SweepRow {
                scenario_id: f[0].to_string(),
                axis: f[1].parse::<Axis>().map_err(|_| Error::Csv(format!("line {n}: bad axis \"{}\"", &f[1])))?,
                axis_value: field(n, "axis_value", &f[2])?,
                method: f[3]
                    .parse::<Method>()
                    .map_err(|_| Error::Csv(format!("line {n}: bad method \"{}\"", &f[3])))?,
                seed: field(n, "seed", &f[4])?,
                sr: field(n, "sr", &f[5])?,
                iterations: field(n, "iterations", &f[6])?,
                converged: field(n, "converged", &f[7])?,
                wall_ms: field(n, "wall_ms", &f[8])?,
            })
        })
        .collect()
}

/// Write through a temporary file in the target directory and rename it
/// into place.
pub fn write_csv_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(method: Method, v: f64, seed: u64, sr: f64) -> SweepRow {
        SweepRow {
            scenario_id: "s".into(),
            axis: Axis::P0Dbm,
            axis_value: v,
            method,
            seed,
            sr,
            iterations: 7,
            converged: true,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(20.0), "20");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(123456.7890123456), "123456.789012");
        assert_eq!(format_float(1e-11), "1e-11");
        assert_eq!(format_float(-2.5), "-2.5");
    }

    #[test]
    fn long_layout_round_trips() {
        let mut quoted = row(Method::FpaSide, 10.0, 1, 0.5);
        quoted.scenario_id = "a,\"b\"".into();
        let rows = vec![row(Method::MaCs, 10.0, 1, 3.25), quoted];
        let text = render_csv(&rows, Layout::Long).unwrap();
        assert!(text.starts_with(LONG_HEADER) && text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(parse_csv(&text).unwrap(), rows);
    }

    #[test]
    fn wide_layout_pivots_methods() {
        let rows = vec![
            row(Method::MaCs, 10.0, 1, 3.0),
            row(Method::MaCs, 20.0, 1, 4.0),
            row(Method::FpaSide, 10.0, 1, 1.0),
            row(Method::FpaSide, 20.0, 1, 2.0),
        ];
        let text = render_csv(&rows, Layout::Wide).unwrap();
        assert_eq!(text, "scenario_id,axis,axis_value,seed,ma-cs,fpa-side\ns,p0_dbm,10,1,3,1\ns,p0_dbm,20,1,4,2\n");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b\n").is_err());
        let bad = format!("{LONG_HEADER}\ns,p0_dbm,1,ma-cs,1,x,1,true,0\n");
        assert!(parse_csv(&bad).is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_csv_atomic(&p, "one\n").unwrap();
        write_csv_atomic(&p, "two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two\n");
    }

    proptest! {
        #[test]
        fn formatting_is_idempotent(x in -1e12f64..1e12) {
            let once = format_float(x);
            let back: f64 = once.parse().unwrap();
            prop_assert_eq!(format_float(back), once.clone());
            if x != 0.0 {
                prop_assert!(((back - x) / x).abs() <= 5e-12);
            }
        }

        #[test]
        fn rendered_rows_parse_back_exactly(
            vals in proptest::collection::vec((0.0f64..40.0, 0u64..1000, 0.0f64..30.0, 0usize..60, any::<bool>()), 0..20)
        ) {
            let rows: Vec<SweepRow> = vals.iter().map(|&(v, seed, sr, it, conv)| SweepRow {
                scenario_id: "prop".into(),
                axis: Axis::Eta,
                axis_value: format_float(v).parse().unwrap(),
                method: Method::Robust,
                seed,
                sr: format_float(sr).parse().unwrap(),
                iterations: it,
                converged: conv,
                wall_ms: 0.0,
            }).collect();
            let text = render_csv(&rows, Layout::Long).unwrap();
            prop_assert_eq!(parse_csv(&text).unwrap(), rows);
        }
    }
}
