//! CSV and JSON renderings. Every CSV header names the basis index of each
//! coordinate column (`K=` for β) and every row carries `n1,n2`.

use rotinv::geometry::{GeometryReport, Hyperplane, NamedPoint, RegionSweep};
use rotinv::maps::Classification;
use rotinv::verify::{Check, VerifyOptions};
use rotinv::ExactRadical;
use serde::Serialize;
use serde_json::{json, Value};

use crate::Failure;

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::input)?;
    text.push('\n');
    Ok(text)
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut writer = csv::WriterBuilder::new().flexible(false).from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).map_err(Failure::input)?;
    }
    let bytes = writer.into_inner().map_err(Failure::input)?;
    String::from_utf8(bytes).map_err(Failure::input)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn k_label(k: usize) -> String {
    format!("K={k}")
}

/// Even coordinate `i` of a ϑ₁-invariant β is `β_{2(i+1)}`.
fn even_label(i: usize) -> String {
    k_label(2 * (i + 1))
}

fn exact_text(labels: impl Iterator<Item = String>, values: &[ExactRadical]) -> String {
    labels.zip(values).map(|(l, v)| format!("{l}:{v}")).collect::<Vec<_>>().join(";")
}

pub fn classification_csv(c: &Classification) -> Result<String, Failure> {
    let mut header: Vec<String> = ["n1", "n2"].map(String::from).to_vec();
    header.extend((0..c.beta.len()).map(k_label));
    header.extend(
        [
            "verdict",
            "is_state",
            "is_ppt",
            "breuer_detected",
            "known_separable",
            "min_alpha",
            "min_alpha_theta1",
            "min_alpha_breuer",
        ]
        .map(String::from),
    );
    let mut row = vec![c.system[0].to_string(), c.system[1].to_string()];
    row.extend(c.beta.iter().map(f64::to_string));
    row.extend([
        format!("{:?}", c.verdict),
        c.is_state.to_string(),
        c.is_ppt.to_string(),
        opt(c.breuer_detected),
        c.known_separable.to_string(),
        c.min_alpha.to_string(),
        c.min_alpha_theta1.to_string(),
        opt(c.min_alpha_breuer),
    ]);
    csv_string(vec![header, row])
}

fn point_row(n1: usize, dims: &[String; 2], p: &NamedPoint) -> Vec<String> {
    let mut row = vec![dims[0].clone(), dims[1].clone(), "point".into(), p.label.clone(), String::new()];
    row.extend(p.beta.coords().iter().map(f64::to_string));
    row.push(p.exact.as_ref().map(|e| exact_text((0..n1).map(k_label), e)).unwrap_or_default());
    row
}

fn hyperplane_row(n1: usize, dims: &[String; 2], h: &Hyperplane) -> Vec<String> {
    let mut row = vec![dims[0].clone(), dims[1].clone(), "hyperplane".into(), h.label.clone(), h.constant.to_string()];
    let mut coords = vec![String::new(); n1];
    for (i, c) in h.coefficients.iter().enumerate() {
        coords[2 * (i + 1)] = c.to_string();
    }
    row.extend(coords);
    row.push(
        h.exact
            .as_ref()
            .map(|(c, e)| format!("const:{c};{}", exact_text((0..e.len()).map(even_label), e)))
            .unwrap_or_default(),
    );
    row
}

/// Columns `n1,n2,kind,label,const,K=0..K=n1-1,exact`. Points fill the `K=`
/// columns with β; hyperplanes fill `const` and the even `K=` columns with
/// their coefficients.
pub fn geometry_csv(report: &GeometryReport) -> Result<String, Failure> {
    let n1 = report.system.n1() as usize;
    let dims = [report.system.n1().to_string(), report.system.n2().to_string()];
    let mut header: Vec<String> = ["n1", "n2", "kind", "label", "const"].map(String::from).to_vec();
    header.extend((0..n1).map(k_label));
    header.push("exact".into());
    let mut rows = vec![header];
    rows.extend(report.points.iter().map(|p| point_row(n1, &dims, p)));
    rows.extend(report.hyperplanes.iter().map(|h| hyperplane_row(n1, &dims, h)));
    csv_string(rows)
}

pub fn geometry_json(report: &GeometryReport) -> Value {
    let points: Vec<Value> = report
        .points
        .iter()
        .map(|p| {
            json!({
                "label": p.label,
                "beta": p.beta.coords(),
                "exact": p.exact.as_ref().map(|e| e.iter().map(ToString::to_string).collect::<Vec<_>>()),
            })
        })
        .collect();
    let hyperplanes: Vec<Value> = report
        .hyperplanes
        .iter()
        .map(|h| {
            json!({
                "label": h.label,
                "constant": h.constant,
                "coefficients": h.coefficients,
                "coefficient_k": (0..h.coefficients.len()).map(|i| 2 * (i + 1)).collect::<Vec<_>>(),
                "exact": h.exact.as_ref().map(|(c, e)| json!({
                    "constant": c.to_string(),
                    "coefficients": e.iter().map(ToString::to_string).collect::<Vec<_>>(),
                })),
            })
        })
        .collect();
    json!({
        "system": [report.system.n1(), report.system.n2()],
        "basis": "beta",
        "points": points,
        "hyperplanes": hyperplanes,
    })
}

fn sweep_class(detected: bool) -> &'static str {
    if detected {
        "detected"
    } else {
        "undetected"
    }
}

/// Columns `n1,n2,K=2[,K=4],class`, one row per grid point inside the
/// polytope, followed by one `#` summary line.
pub fn sweep_csv(sweep: &RegionSweep) -> Result<String, Failure> {
    let dims = sweep.system.map(|n| n.to_string());
    let d = sweep.lower.len();
    let mut header: Vec<String> = ["n1", "n2"].map(String::from).to_vec();
    header.extend((0..d).map(even_label));
    header.push("class".into());
    let mut rows = vec![header];
    for p in &sweep.points {
        let mut row = dims.to_vec();
        row.extend(p.even.iter().map(f64::to_string));
        row.push(sweep_class(p.detected).into());
        rows.push(row);
    }
    let mut text = csv_string(rows)?;
    text.push_str(&format!(
        "# be_region_fraction={} detected={} inside={} grid={}\n",
        sweep.fraction, sweep.detected, sweep.inside, sweep.grid
    ));
    Ok(text)
}

pub fn sweep_json(sweep: &RegionSweep) -> Value {
    let labels: Vec<String> = (0..sweep.lower.len()).map(even_label).collect();
    let points: Vec<Value> = sweep
        .points
        .iter()
        .map(|p| json!({ "even": p.even, "class": sweep_class(p.detected) }))
        .collect();
    json!({
        "system": sweep.system,
        "grid": sweep.grid,
        "coordinates": labels,
        "lower": sweep.lower,
        "upper": sweep.upper,
        "inside": sweep.inside,
        "detected": sweep.detected,
        "be_region_fraction": sweep.fraction,
        "points": points,
    })
}

/// Columns `check,max_residual,tolerance,pass` after a `#` line with the seed.
pub fn checks_csv(opts: &VerifyOptions, checks: &[Check]) -> Result<String, Failure> {
    let mut rows = vec![["check", "max_residual", "tolerance", "pass"].map(String::from).to_vec()];
    rows.extend(
        checks.iter().map(|c| vec![c.name.clone(), c.max_residual.to_string(), c.tolerance.to_string(), c.pass.to_string()]),
    );
    let body = csv_string(rows)?;
    Ok(format!("# seed={} deep={} samples={}\n{body}", opts.seed, opts.deep, opts.samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rotinv::geometry::geometry_report;
    use rotinv::SpinPair;

    #[test]
    fn geometry_rows_have_fixed_width() {
        for (n1, n2) in [(4, 12), (6, 8), (8, 9)] {
            let report = geometry_report(SpinPair::new(n1, n2).unwrap()).unwrap();
            let text = geometry_csv(&report).unwrap();
            let width = 6 + n1 as usize;
            for line in csv::Reader::from_reader(text.as_bytes()).records() {
                assert_eq!(line.unwrap().len(), width);
            }
        }
    }

    #[test]
    fn hyperplane_coefficients_land_in_even_columns() {
        let report = geometry_report(SpinPair::new(6, 8).unwrap()).unwrap();
        let gamma = report.hyperplanes.iter().find(|h| h.label == "Gamma").unwrap();
        let row = hyperplane_row(6, &["6".into(), "8".into()], gamma);
        // n1,n2,kind,label,const,K=0..K=5,exact
        assert_eq!(row[5], "");
        assert_eq!(row[6], "");
        assert_eq!(row[7], gamma.coefficients[0].to_string());
        assert_eq!(row[9], gamma.coefficients[1].to_string());
        assert!(row[11].starts_with("const:"));
    }
}
