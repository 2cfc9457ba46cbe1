//! `t,channel,value` result files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{SeriesSet, TimeSeries};

pub const HEADER: &str = "t,channel,value";

/// Rows ordered by `(channel, t)`, 17 significant digits, trailing newline.
pub fn format_csv(set: &SeriesSet) -> Result<String> {
    let mut rows: Vec<(&str, f64, f64)> = Vec::new();
    for s in &set.series {
        if s.label.contains([',', '\n', '\r']) || s.label.is_empty() {
            return Err(Error::Csv { line: 0, msg: format!("unusable channel name `{}`", s.label) });
        }
        rows.extend(s.times.iter().zip(&s.values).map(|(&t, &v)| (s.label.as_str(), t, v)));
    }
    rows.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for (c, t, v) in rows {
        writeln!(out, "{t:.16e},{c},{v:.16e}").expect("writing to a String");
    }
    Ok(out)
}

pub fn emit_csv(set: &SeriesSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_csv(set)?)?;
    Ok(())
}

/// Inverse of [`format_csv`]; channels come back in name order.
pub fn parse_csv(text: &str) -> Result<SeriesSet> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(Error::Csv { line: 1, msg: format!("expected header `{HEADER}`") }),
    }
    let mut acc: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Csv { line: i + 1, msg };
        let mut it = line.split(',');
        let (Some(t), Some(c), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(bad("expected three fields".into()));
        };
        let t: f64 = t.trim().parse().map_err(|_| bad(format!("bad time `{t}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| bad(format!("bad value `{v}`")))?;
        match acc.last_mut() {
            Some(last) if last.0 == c => {
                last.1.push(t);
                last.2.push(v);
            }
            _ => acc.push((c.to_string(), vec![t], vec![v])),
        }
    }
    let series = acc.into_iter().map(|(l, t, v)| TimeSeries::new(l, t, v)).collect::<Result<_>>()?;
    Ok(SeriesSet { series })
}

pub fn read_csv(path: &Path) -> Result<SeriesSet> {
    parse_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_is_header_only() {
        assert_eq!(format_csv(&SeriesSet::default()).unwrap(), "t,channel,value\n");
    }

    #[test]
    fn one_sample_two_lines() {
        let set = SeriesSet { series: vec![TimeSeries::new("B_L2", vec![0.0], vec![1.0]).unwrap()] };
        let s = format_csv(&set).unwrap();
        assert_eq!(s, "t,channel,value\n0.0000000000000000e0,B_L2,1.0000000000000000e0\n");
        assert_eq!(s.lines().count(), 2);
    }

    #[test]
    fn ordered_by_channel_then_time() {
        let set = SeriesSet {
            series: vec![
                TimeSeries::new("b", vec![0.0, 1.0], vec![1.0, 2.0]).unwrap(),
                TimeSeries::new("a", vec![0.5], vec![3.0]).unwrap(),
            ],
        };
        let s = format_csv(&set).unwrap();
        let chans: Vec<&str> = s.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(chans, ["a", "b", "b"]);
        let back = parse_csv(&s).unwrap();
        assert_eq!(back.series.len(), 2);
        assert_eq!(back.get("b").unwrap().values, vec![1.0, 2.0]);
    }

    #[test]
    fn rejects_commas_in_names_and_bad_rows() {
        let set = SeriesSet { series: vec![TimeSeries::new("a,b", vec![0.0], vec![1.0]).unwrap()] };
        assert!(format_csv(&set).is_err());
        assert!(parse_csv("x,y\n").is_err());
        assert!(parse_csv("t,channel,value\n1,a\n").is_err());
        assert!(parse_csv("t,channel,value\n1,a,zz\n").is_err());
    }
}
