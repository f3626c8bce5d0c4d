//! Check records and reports shared by the audits.

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::io::fmt_num;

fn ser_num<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else {
        s.serialize_str(&fmt_num(*v))
    }
}

fn ser_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_num(x, s),
        None => s.serialize_none(),
    }
}

fn ser_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else {
            seq.serialize_element(&fmt_num(*x))?;
        }
    }
    seq.end()
}

/// One audited condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub condition: String,
    /// Largest signed excess over the allowed value; `≤ 0` (or `≤ tolerance`)
    /// means the condition held at every sample.
    #[serde(serialize_with = "ser_num")]
    pub worst_violation: f64,
    /// Sample at which the worst violation occurred.
    #[serde(serialize_with = "ser_vec")]
    pub arg_worst: Vec<f64>,
    pub pass: bool,
    #[serde(serialize_with = "ser_opt")]
    pub empirical_constant: Option<f64>,
    #[serde(serialize_with = "ser_num")]
    pub tolerance: f64,
    pub samples: usize,
    pub note: String,
}

impl CheckRecord {
    pub fn new(condition: impl Into<String>, tolerance: f64) -> Self {
        Self {
            condition: condition.into(),
            worst_violation: f64::NEG_INFINITY,
            arg_worst: Vec::new(),
            pass: true,
            empirical_constant: None,
            tolerance,
            samples: 0,
            note: String::new(),
        }
    }

    /// Records one sample; keeps the worst.
    pub fn observe(&mut self, violation: f64, arg: impl FnOnce() -> Vec<f64>) {
        self.samples += 1;
        if violation > self.worst_violation || (violation.is_nan() && !self.worst_violation.is_nan()) {
            self.worst_violation = violation;
            self.arg_worst = arg();
        }
    }

    /// Sets `pass` from the worst violation and the tolerance.
    pub fn finish(mut self) -> Self {
        self.pass = !self.worst_violation.is_nan() && self.worst_violation <= self.tolerance;
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.empirical_constant = Some(c);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Associative merge of two records of the same condition.
    pub fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        if other.worst_violation > self.worst_violation {
            self.worst_violation = other.worst_violation;
            self.arg_worst = other.arg_worst;
        }
        self.empirical_constant = match (self.empirical_constant, other.empirical_constant) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.pass &= other.pass;
        if self.note.is_empty() {
            self.note = other.note;
        }
        self
    }
}

/// Ordered list of check records.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(rs);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.records.iter().find(|r| !r.pass)
    }

    pub fn get(&self, condition: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.condition == condition)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per record.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("condition,pass,worst_violation,empirical_constant,tolerance,samples,arg_worst,note\n");
        for r in &self.records {
            let arg: Vec<String> = r.arg_worst.iter().map(|v| fmt_num(*v)).collect();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.condition,
                r.pass,
                fmt_num(r.worst_violation),
                r.empirical_constant.map(fmt_num).unwrap_or_default(),
                fmt_num(r.tolerance),
                r.samples,
                arg.join(" "),
                r.note.replace(',', ";"),
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_worst_and_is_associative() {
        let mk = |v: f64| {
            let mut r = CheckRecord::new("X", 0.5);
            r.observe(v, || vec![v]);
            r.finish()
        };
        let a = mk(0.1).merge(mk(0.9)).merge(mk(0.3));
        let b = mk(0.1).merge(mk(0.9).merge(mk(0.3)));
        assert_eq!(a, b);
        assert_eq!(a.worst_violation, 0.9);
        assert_eq!(a.arg_worst, vec![0.9]);
        assert!(!a.pass);
        assert_eq!(a.samples, 3);
    }

    #[test]
    fn infinities_serialize_as_strings() {
        let mut r = CheckRecord::new("BLC", 0.0);
        r.observe(f64::INFINITY, || vec![1.0, f64::INFINITY]);
        let mut rep = Report::new();
        rep.push(r.finish());
        let js = rep.to_json().unwrap();
        assert!(js.contains("\"worst_violation\": \"inf\""));
        let back: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(back["records"][0]["pass"], false);
        assert!(rep.to_csv().lines().count() == 2);
    }

    #[test]
    fn empty_record_passes() {
        let r = CheckRecord::new("H1", 0.0).finish();
        assert!(r.pass);
        assert_eq!(r.samples, 0);
    }
}
