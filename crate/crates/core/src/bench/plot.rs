use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::eval::{EvalReport, SampleRow};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
const UNASSIGNED: &str = "#000000";

const LEFT: f64 = 60.0;
const TOP: f64 = 40.0;
const SIDE: f64 = 320.0;
const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 410.0;

/// RS scatter panels for a report: one per class, keyed by the true class
/// when labels exist and by the aligned cluster otherwise.
pub fn emit_plots(report: &EvalReport, out_dir: &Path) -> Result<()> {
    let rows = report.sample_rows();
    let classes: Vec<String> = match &report.truth {
        Some(y) => y.classes().to_vec(),
        None => first_appearance(rows.iter().map(|r| r.aligned_label.as_str())),
    };
    emit_panels(&rows, &classes, out_dir)
}

/// Writes `rs_<i>_<class>.svg` and `.csv` for every entry of `classes`.
/// Each panel holds the samples of that class with S on x and R on y,
/// colored by aligned label. A class with no samples gets an empty CSV and
/// a bare set of axes.
pub fn emit_panels(rows: &[SampleRow], classes: &[String], out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let has_truth = rows.iter().any(|r| !r.true_label.is_empty());
    let mut color_keys = classes.to_vec();
    for r in rows {
        if !r.aligned_label.is_empty() && !color_keys.contains(&r.aligned_label) {
            color_keys.push(r.aligned_label.clone());
        }
    }
    for (i, class) in classes.iter().enumerate() {
        let members: Vec<&SampleRow> = rows
            .iter()
            .filter(|r| {
                let key = if has_truth {
                    &r.true_label
                } else {
                    &r.aligned_label
                };
                key == class
            })
            .collect();
        let stem = format!("rs_{i}_{}", sanitize(class));
        let mut w = csv::Writer::from_path(out_dir.join(format!("{stem}.csv")))?;
        if members.is_empty() {
            w.write_record([
                "sample",
                "true_label",
                "cluster",
                "aligned_label",
                "r_score",
                "s_score",
            ])?;
        }
        for r in &members {
            w.serialize(r)?;
        }
        w.flush()?;
        fs::write(
            out_dir.join(format!("{stem}.svg")),
            render(class, &members, &color_keys),
        )?;
    }
    Ok(())
}

fn first_appearance<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in labels {
        if !out.iter().any(|o| o == l) {
            out.push(l.to_owned());
        }
    }
    out
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn color_of(label: &str, keys: &[String]) -> &'static str {
    match keys.iter().position(|k| k == label) {
        Some(i) if !label.is_empty() => PALETTE[i % PALETTE.len()],
        _ => UNASSIGNED,
    }
}

fn render(class: &str, members: &[&SampleRow], color_keys: &[String]) -> String {
    let mut s = String::new();
    let bottom = TOP + SIDE;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + SIDE / 2.0,
        escape(class)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{SIDE}" height="{SIDE}" fill="none" stroke="black"/>"#
    );
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let x = LEFT + tick * SIDE;
        let y = bottom - tick * SIDE;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{bottom}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{tick}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{tick}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">S score</text>"#,
        LEFT + SIDE / 2.0,
        bottom + 38.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">R score</text>"#,
        TOP + SIDE / 2.0,
        TOP + SIDE / 2.0
    );
    for r in members {
        if !(r.s_score.is_finite() && r.r_score.is_finite()) {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{}" fill-opacity="0.8"><title>{}</title></circle>"#,
            LEFT + r.s_score.clamp(0.0, 1.0) * SIDE,
            bottom - r.r_score.clamp(0.0, 1.0) * SIDE,
            color_of(&r.aligned_label, color_keys),
            escape(&r.sample)
        );
    }
    let legend: Vec<&str> = first_appearance(members.iter().map(|r| r.aligned_label.as_str()))
        .into_iter()
        .filter_map(|l| color_keys.iter().find(|k| **k == l).map(String::as_str))
        .collect();
    for (i, label) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let x = LEFT + SIDE + 20.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{x}" cy="{y}" r="5" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            color_of(label, color_keys),
            x + 10.0,
            y + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
