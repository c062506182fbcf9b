//! Wire formats: JSON records for classification and condition reports,
//! RFC-4180-style CSV for batch evaluation and arc lists.

use crate::carleson::CarlesonSet;
use crate::diagnostics::{ConditionParams, ConditionReport, Witness};
use crate::modulus::{ClassKind, ClassificationResult};
use serde::Serialize;

/// JSON record {"kind","constant","divergent","witness","grid_levels"}.
#[derive(Debug, Serialize)]
pub struct ClassificationRecord {
    pub kind: ClassKind,
    pub constant: Option<f64>,
    pub divergent: bool,
    pub witness: f64,
    pub grid_levels: u32,
}

impl From<&ClassificationResult> for ClassificationRecord {
    fn from(r: &ClassificationResult) -> Self {
        ClassificationRecord {
            kind: r.kind,
            constant: r.constant,
            divergent: r.divergent(),
            witness: r.witness,
            grid_levels: r.grid_levels,
        }
    }
}

/// JSON record {"condition_id","value","divergent","witness","params",
/// "grid_levels","stability_ratio"}.
#[derive(Debug, Serialize)]
pub struct ConditionRecord {
    pub condition_id: &'static str,
    pub value: Option<f64>,
    pub divergent: bool,
    pub witness: Witness,
    pub params: ConditionParams,
    pub grid_levels: u32,
    pub stability_ratio: Option<f64>,
}

impl From<&ConditionReport> for ConditionRecord {
    fn from(r: &ConditionReport) -> Self {
        ConditionRecord {
            condition_id: r.condition_id.as_str(),
            value: r.value,
            divergent: r.divergent(),
            witness: r.witness,
            params: r.params.clone(),
            grid_levels: r.grid_levels,
            stability_ratio: r.stability_ratio,
        }
    }
}

/// Quote a CSV field when it contains a comma, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        String::new()
    }
}

/// One row of the batch evaluation CSV.
#[derive(Debug, Clone)]
pub struct OuterSample {
    pub re_z: f64,
    pub im_z: f64,
    pub re_o: Option<f64>,
    pub im_o: Option<f64>,
    pub abs_o: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub err_flag: &'static str,
}

pub const OUTER_CSV_HEADER: &str = "re_z,im_z,re_O,im_O,abs_O,u,v,err_flag";

impl OuterSample {
    pub fn to_csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt_num(self.re_z),
            fmt_num(self.im_z),
            opt(self.re_o),
            opt(self.im_o),
            opt(self.abs_o),
            opt(self.u),
            opt(self.v),
            csv_field(self.err_flag)
        )
    }
}

pub fn outer_samples_csv(rows: &[OuterSample]) -> String {
    let mut out = String::from(OUTER_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Arc list CSV with header `a_angle,b_angle`.
pub fn arcs_csv(set: &CarlesonSet) -> String {
    let mut out = String::from("a_angle,b_angle\n");
    for &(a, b) in set.arcs() {
        out.push_str(&format!("{},{}\n", fmt_num(a), fmt_num(b)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn outer_row_with_margin_gap() {
        let row = OuterSample {
            re_z: 1.0,
            im_z: 0.0,
            re_o: None,
            im_o: None,
            abs_o: None,
            u: None,
            v: None,
            err_flag: "margin",
        };
        let s = row.to_csv_row();
        assert!(s.ends_with(",,,,,margin"));
        assert_eq!(s.split(',').count(), 8);
    }

    #[test]
    fn arcs_csv_shape() {
        let set = CarlesonSet::plus_minus_one();
        let text = arcs_csv(&set);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a_angle,b_angle");
        assert_eq!(lines.count(), 2);
    }
}
