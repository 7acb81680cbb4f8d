//! Text, JSON and CSV renderings of reports.

use std::fmt::Write as _;

use netagg::priority::RankedNode;
use netagg::rollup::RowKind;
use netagg::{AggregationReport64, ComparisonRow64, Group64, SweepRow64};
use serde::Serialize;

/// Six significant digits, fixed notation: `20.4082`, `83.3333`, `0.857143`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt(x: Option<f64>, missing: &str) -> String {
    x.map_or_else(|| missing.to_owned(), sig6)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

pub fn report_text(report: &AggregationReport64) -> String {
    let mut out = String::new();
    report_lines(report, 0, &mut out);
    out
}

fn report_lines(r: &AggregationReport64, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    match r.method {
        None => {
            let _ = writeln!(out, "{indent}{} [leaf] value={}", r.id, sig6(r.value));
        }
        Some(method) => {
            let _ = write!(out, "{indent}{} [{method}] value={} adequacy={}", r.id, sig6(r.value), sig6(r.adequacy));
            if let Some(c) = r.critical_wem {
                let _ = write!(out, " critical_wem={}", sig6(c));
            }
            let _ = writeln!(out, " weakest={} ({})", r.weakest_ids.join(","), sig6(r.weakest_value));
            for w in &r.warnings {
                let _ = writeln!(out, "{indent}  warning: {w}");
            }
        }
    }
    for c in &r.children {
        report_lines(c, depth + 1, out);
    }
}

pub fn report_csv(report: &AggregationReport64) -> String {
    let mut out = String::from("id,depth,method,value,adequacy,weakest\n");
    report_rows(report, 0, &mut out);
    out
}

fn report_rows(r: &AggregationReport64, depth: usize, out: &mut String) {
    let method = r.method.map_or_else(|| "leaf".to_owned(), |m| m.to_string());
    let _ = writeln!(
        out,
        "{},{depth},{method},{:.6},{:.6},{}",
        csv_field(&r.id),
        r.value,
        r.adequacy,
        csv_field(&r.weakest_ids.join(" "))
    );
    for c in &r.children {
        report_rows(c, depth + 1, out);
    }
}

fn kind(k: RowKind) -> &'static str {
    match k {
        RowKind::Subsystem => "subsystem",
        RowKind::Group => "group",
    }
}

pub fn comparison_text(rows: &[ComparisonRow64]) -> String {
    let header = ["node", "kind", "wem", "wlam", "nam", "hybrid", "sigma_12", "sigma_13", "weakest"];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in rows {
        table.push(vec![
            r.node.clone(),
            kind(r.kind).to_owned(),
            sig6(r.wem),
            sig6(r.wlam),
            opt(r.nam, "NA"),
            opt(r.hybrid, "-"),
            sig6(r.sigma_12),
            opt(r.sigma_13, "NA"),
            r.weakest_ids.join(","),
        ]);
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    for r in rows {
        for w in &r.warnings {
            let _ = writeln!(out, "warning: {}: {w}", r.node);
        }
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow64]) -> String {
    let mut out = String::from("node,kind,wem,wlam,nam,hybrid,sigma_12,sigma_13,weakest,warnings\n");
    let fixed = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:.6}"));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{},{},{:.6},{},{},{}",
            csv_field(&r.node),
            kind(r.kind),
            r.wem,
            r.wlam,
            fixed(r.nam),
            fixed(r.hybrid),
            r.sigma_12,
            fixed(r.sigma_13),
            csv_field(&r.weakest_ids.join(" ")),
            csv_field(&r.warnings.join("; "))
        );
    }
    out
}

/// `varied,wem,wlam,nam[,hybrid]`; an inapplicable nam is an empty field.
pub fn sweep_csv(rows: &[SweepRow64]) -> String {
    let with_hybrid = rows.iter().any(|r| r.hybrid.is_some());
    let mut out = String::from("varied,wem,wlam,nam");
    if with_hybrid {
        out.push_str(",hybrid");
    }
    out.push('\n');
    for r in rows {
        let nam = r.nam.map_or_else(String::new, |v| format!("{v:.6}"));
        let _ = write!(out, "{},{:.6},{:.6},{nam}", r.varied, r.wem, r.wlam);
        if with_hybrid {
            let _ = write!(out, ",{}", r.hybrid.map_or_else(String::new, |v| format!("{v:.6}")));
        }
        out.push('\n');
    }
    out
}

pub fn ranking_text(entries: &[RankedNode<f64>], groups: Option<&[Group64]>) -> String {
    let mut out = String::from("rank  node  score  priority\n");
    for e in entries {
        let _ = writeln!(out, "{}  {}  {}  {}", e.rank, e.id, sig6(e.score), sig6(e.priority));
    }
    if let Some(groups) = groups {
        out.push_str("groups:\n");
        for g in groups {
            let _ = writeln!(out, "{}  {}  {}", g.id, sig6(g.priority), g.members.join(","));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(20.408163265306122), "20.4082");
        assert_eq!(sig6(250.0 / 3.0), "83.3333");
        assert_eq!(sig6(0.857142857), "0.857143");
        assert_eq!(sig6(10.0), "10.0000");
        assert_eq!(sig6(100.0), "100.000");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(-0.25), "-0.250000");
    }

    #[test]
    fn sweep_rows_render_with_empty_nam() {
        let rows = [
            SweepRow64 { varied: 10.0, wem: 10.0, wlam: 70.0, nam: Some(20.408163265306122), hybrid: None },
            SweepRow64 { varied: 0.5, wem: 0.5, wlam: 1.0, nam: None, hybrid: None },
        ];
        assert_eq!(sweep_csv(&rows), "varied,wem,wlam,nam\n10,10.000000,70.000000,20.408163\n0.5,0.500000,1.000000,\n");
    }

    #[test]
    fn csv_quotes_separators() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
        assert_eq!(csv_field("x\"y,"), "\"x\"\"y,\"");
    }
}
