//! Report construction. Every command builds one JSON value with sorted
//! keys; the aligned-text tables are rendered from that same value, so the
//! two outputs can never disagree.

use num::complex::Complex64;
use serde_json::{json, Map, Value};

use crate::ahss::AhssRun;
use crate::coeff::CoefficientRow;
use crate::corep::{CorepMatrices, MagneticIrrep, MagneticRepRing};

fn matrices_to_json(m: &CorepMatrices) -> Value {
    let mats: Vec<Value> = m
        .mats
        .iter()
        .enumerate()
        .map(|(g, mat)| {
            let rows: Vec<Value> = mat
                .iter()
                .map(|row| {
                    Value::Array(row.iter().map(|e| Value::String(e.to_string())).collect())
                })
                .collect();
            json!({
                "element": g,
                "antiunitary": m.phi[g] == 1,
                "matrix": rows,
            })
        })
        .collect();
    Value::Array(mats)
}

pub fn format_complex(z: Complex64) -> String {
    // twelve significant digits, trailing zeros dropped
    let fmt = |x: f64| -> String {
        let s = format!("{:.11e}", x);
        let v: f64 = s.parse().unwrap_or(x);
        format!("{}", v)
    };
    if z.im.abs() < 1e-12 {
        fmt(z.re)
    } else if z.re.abs() < 1e-12 {
        format!("{}i", fmt(z.im))
    } else {
        format!("{}{}{}i", fmt(z.re), if z.im < 0.0 { "" } else { "+" }, fmt(z.im))
    }
}

fn irrep_to_json(irrep: &MagneticIrrep) -> Value {
    let constituents: Vec<Value> = irrep
        .constituents
        .iter()
        .map(|&i| Value::String(format!("chi{}", i + 1)))
        .collect();
    let mut obj = Map::new();
    obj.insert("name".into(), Value::String(irrep.name.clone()));
    obj.insert(
        "type".into(),
        Value::String(irrep.schur_type.as_str().to_string()),
    );
    obj.insert("dimension".into(), json!(irrep.dimension));
    obj.insert("constituents".into(), Value::Array(constituents));
    obj.insert("indicator".into(), json!(irrep.indicator));
    if let Some(m) = &irrep.matrices {
        obj.insert("matrices".into(), matrices_to_json(m));
    }
    Value::Object(obj)
}

pub fn irreps_report(ring: &MagneticRepRing) -> Value {
    json!({
        "command": "irreps",
        "magnetic": ring.magnetic,
        "counts": {
            "real": ring.counts.0,
            "complex": ring.counts.1,
            "quaternionic": ring.counts.2,
        },
        "irreps": ring.irreps.iter().map(irrep_to_json).collect::<Vec<_>>(),
    })
}

pub fn coefficients_report(rows: &[CoefficientRow]) -> Value {
    json!({
        "command": "coefficients",
        "rows": rows.iter().map(|row| json!({
            "t": row.t,
            "group": row.group.notation(),
            "labels": row.labels.iter().map(|l| l.render()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn periodicity_report(period: u32, section: &Option<Vec<usize>>) -> Value {
    json!({
        "command": "periodicity",
        "period": period,
        "section": section.as_ref().map(|s| {
            s.iter().enumerate().map(|(b, &t)| json!([b, t])).collect::<Vec<_>>()
        }),
    })
}

/// Substitutes first-page generator names into a page-entry label such as
/// "e0 - 2*e3".
fn prettify_label(label: &str, base: &[String]) -> String {
    let mut out = label.to_string();
    // replace in descending index order so e10 is not clobbered by e1
    let mut idx: Vec<usize> = (0..base.len()).collect();
    idx.sort_by(|a, b| b.cmp(a));
    for i in idx {
        out = out.replace(&format!("e{}", i), &format!("[{}]", base[i]));
    }
    out
}

pub fn ahss_report(run: &AhssRun) -> Value {
    let pages: Vec<Value> = run
        .pages
        .iter()
        .map(|page| {
            let entries: Vec<Value> = page
                .entries
                .iter()
                .map(|(&(n, t), e)| {
                    let labels: Vec<String> = if page.r == 1 {
                        e.labels.clone()
                    } else {
                        let base = &run.cell_labels[&(n, t)];
                        e.labels.iter().map(|l| prettify_label(l, base)).collect()
                    };
                    json!({
                        "n": n,
                        "t": t,
                        "group": e.group.notation(),
                        "labels": labels,
                    })
                })
                .collect();
            let diffs: Vec<Value> = page
                .diffs
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(&(n, t), m)| {
                    json!({
                        "from": [n, t],
                        "to": [n + page.r as i64, page.fold_t(t - page.r as i64 + 1)],
                        "matrix": m.to_i64_rows(),
                    })
                })
                .collect();
            json!({
                "r": page.r,
                "entries": entries,
                "differentials": diffs,
            })
        })
        .collect();
    let graded: Vec<Value> = run
        .graded
        .iter()
        .map(|g| {
            json!({
                "degree": g.degree,
                "pieces": g.pieces.iter().map(|p| p.notation()).collect::<Vec<_>>(),
                "ambiguous": g.ambiguous,
                "total": g.total.as_ref().map(|t| t.notation()),
                "assertion": g.assertion.as_ref().map(|a| json!({
                    "kind": a.kind,
                    "total": a.total.as_ref().map(|t| json!({"rank": t.rank, "torsion": t.torsion})),
                })),
            })
        })
        .collect();
    json!({
        "command": "ahss",
        "period": run.period,
        "pages": pages,
        "graded": graded,
        "overrides": run.overrides.iter().map(|o| json!({
            "page": o.page,
            "from": [o.from.0, o.from.1],
            "matrix": o.matrix,
        })).collect::<Vec<_>>(),
        "assertions": run.assertions.iter().map(|a| json!({
            "degree": a.degree,
            "kind": a.kind,
            "total": a.total.as_ref().map(|t| json!({"rank": t.rank, "torsion": t.torsion})),
        })).collect::<Vec<_>>(),
        "warnings": run.warnings,
    })
}

// ------------------------------ table views ------------------------------

fn pad(s: &str, w: usize) -> String {
    format!("{:w$}", s, w = w)
}

fn render_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for c in 0..cols {
            widths[c] = widths[c].max(row[c].chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String], widths: &[usize]| -> String {
        let mut s = String::new();
        for (c, cell) in cells.iter().enumerate() {
            if c > 0 {
                s.push_str("  ");
            }
            s.push_str(&pad(cell, widths[c]));
        }
        s.trim_end().to_string()
    };
    out.push_str(&line(headers, &widths));
    out.push('\n');
    let total: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row, &widths));
        out.push('\n');
    }
    out
}

/// Renders any report value as aligned text; the table reads the same JSON
/// the machine output serializes.
pub fn render_text(report: &Value) -> String {
    match report["command"].as_str() {
        Some("irreps") => {
            let mut out = String::new();
            let c = &report["counts"];
            out.push_str(&format!(
                "counts: real {}  complex {}  quaternionic {}\n\n",
                c["real"], c["complex"], c["quaternionic"]
            ));
            let headers = vec![
                "name".to_string(),
                "type".to_string(),
                "dim".to_string(),
                "constituents".to_string(),
                "indicator".to_string(),
            ];
            let rows: Vec<Vec<String>> = report["irreps"]
                .as_array()
                .unwrap()
                .iter()
                .map(|i| {
                    vec![
                        i["name"].as_str().unwrap().to_string(),
                        i["type"].as_str().unwrap().to_string(),
                        i["dimension"].to_string(),
                        i["constituents"]
                            .as_array()
                            .unwrap()
                            .iter()
                            .map(|v| v.as_str().unwrap())
                            .collect::<Vec<_>>()
                            .join(" "),
                        i["indicator"].to_string(),
                    ]
                })
                .collect();
            out.push_str(&render_table(&headers, &rows));
            out
        }
        Some("coefficients") => {
            let headers = vec!["t".to_string(), "group".to_string(), "generators".to_string()];
            let rows: Vec<Vec<String>> = report["rows"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| {
                    vec![
                        r["t"].to_string(),
                        r["group"].as_str().unwrap().to_string(),
                        r["labels"]
                            .as_array()
                            .unwrap()
                            .iter()
                            .map(|v| v.as_str().unwrap())
                            .collect::<Vec<_>>()
                            .join(", "),
                    ]
                })
                .collect();
            render_table(&headers, &rows)
        }
        Some("periodicity") => {
            let mut out = format!("period: {}\n", report["period"]);
            match report["section"].as_array() {
                Some(sec) => {
                    let pairs: Vec<String> = sec
                        .iter()
                        .map(|p| format!("{} -> {}", p[0], p[1]))
                        .collect();
                    out.push_str(&format!("section: {}\n", pairs.join(", ")));
                }
                None => out.push_str("section: none (pullback extension does not split)\n"),
            }
            out
        }
        Some("ahss") => {
            let mut out = format!("period: {}\n", report["period"]);
            for page in report["pages"].as_array().unwrap() {
                out.push_str(&format!("\n== page E{}\n", page["r"]));
                let headers = vec![
                    "n".to_string(),
                    "t".to_string(),
                    "group".to_string(),
                    "generators".to_string(),
                ];
                let rows: Vec<Vec<String>> = page["entries"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|e| {
                        vec![
                            e["n"].to_string(),
                            e["t"].to_string(),
                            e["group"].as_str().unwrap().to_string(),
                            e["labels"]
                                .as_array()
                                .unwrap()
                                .iter()
                                .map(|v| v.as_str().unwrap())
                                .collect::<Vec<_>>()
                                .join(", "),
                        ]
                    })
                    .collect();
                out.push_str(&render_table(&headers, &rows));
                let diffs = page["differentials"].as_array().unwrap();
                if !diffs.is_empty() {
                    out.push('\n');
                    for d in diffs {
                        out.push_str(&format!(
                            "d{}: {} -> {}  matrix {}\n",
                            page["r"], d["from"], d["to"], d["matrix"]
                        ));
                    }
                }
            }
            out.push_str("\n== graded K-groups\n");
            let headers = vec![
                "degree".to_string(),
                "pieces (filtration order)".to_string(),
                "ambiguous".to_string(),
                "total".to_string(),
            ];
            let rows: Vec<Vec<String>> = report["graded"]
                .as_array()
                .unwrap()
                .iter()
                .map(|g| {
                    vec![
                        g["degree"].to_string(),
                        g["pieces"]
                            .as_array()
                            .unwrap()
                            .iter()
                            .map(|v| v.as_str().unwrap())
                            .collect::<Vec<_>>()
                            .join(" | "),
                        g["ambiguous"].to_string(),
                        g["total"]
                            .as_str()
                            .map(|s| s.to_string())
                            .unwrap_or_else(|| "unresolved".to_string()),
                    ]
                })
                .collect();
            out.push_str(&render_table(&headers, &rows));
            let overrides = report["overrides"].as_array().unwrap();
            if !overrides.is_empty() {
                out.push_str("\noverrides applied:\n");
                for o in overrides {
                    out.push_str(&format!(
                        "  page {} from {}: {}\n",
                        o["page"], o["from"], o["matrix"]
                    ));
                }
            }
            let assertions = report["assertions"].as_array().unwrap();
            if !assertions.is_empty() {
                out.push_str("\nextension assertions:\n");
                for a in assertions {
                    out.push_str(&format!("  degree {}: {}\n", a["degree"], a["kind"]));
                }
            }
            let warnings = report["warnings"].as_array().unwrap();
            if !warnings.is_empty() {
                out.push_str("\nwarnings:\n");
                for w in warnings {
                    out.push_str(&format!("  {}\n", w.as_str().unwrap()));
                }
            }
            out
        }
        _ => serde_json::to_string_pretty(report).unwrap(),
    }
}
