use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};
use wreathlab::exactmath::format_decimal;
use wreathlab::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Serialize, Debug)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

#[derive(Serialize, Debug)]
pub struct Row {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<RationalJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Serialize, Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Vec<Row>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            results: Vec::new(),
            status: "ok".into(),
            error: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn value(&mut self, name: &str, x: &BigRational) {
        self.push(name, None, x);
    }

    pub fn indexed(&mut self, name: &str, k: usize, x: &BigRational) {
        self.push(name, Some(k), x);
    }

    /// A floating-point quantity, reported through its exact binary value.
    pub fn float(&mut self, name: &str, x: f64) {
        match BigRational::from_float(x) {
            Some(r) => self.push(name, None, &r),
            None => self.text(name, x.to_string()),
        }
    }

    pub fn text(&mut self, name: &str, text: impl Into<String>) {
        self.results.push(Row {
            name: name.to_string(),
            k: None,
            rational: None,
            decimal: None,
            text: Some(text.into()),
        });
    }

    pub fn indexed_text(&mut self, name: &str, k: usize, text: impl Into<String>) {
        self.results.push(Row {
            name: name.to_string(),
            k: Some(k),
            rational: None,
            decimal: None,
            text: Some(text.into()),
        });
    }

    fn push(&mut self, name: &str, k: Option<usize>, x: &BigRational) {
        self.results.push(Row {
            name: name.to_string(),
            k,
            rational: Some(RationalJson {
                num: x.numer().to_string(),
                den: x.denom().to_string(),
            }),
            decimal: Some(format_decimal(x, 15)),
            text: None,
        });
    }

    pub fn emit(&self, format: Format) -> io::Result<()> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["name", "k", "num", "den", "decimal", "text"])?;
                for r in &self.results {
                    let (num, den) = r
                        .rational
                        .as_ref()
                        .map(|q| (q.num.as_str(), q.den.as_str()))
                        .unwrap_or(("", ""));
                    w.write_record([
                        r.name.as_str(),
                        &r.k.map(|k| k.to_string()).unwrap_or_default(),
                        num,
                        den,
                        r.decimal.as_deref().unwrap_or(""),
                        r.text.as_deref().unwrap_or(""),
                    ])?;
                }
                w.flush()?;
            }
            Format::Text => {
                writeln!(out, "{}", self.command)?;
                for (key, v) in &self.inputs {
                    match v {
                        Value::String(s) => writeln!(out, "  {key}: {s}")?,
                        other => writeln!(out, "  {key}: {other}")?,
                    }
                }
                for r in &self.results {
                    let name = match r.k {
                        Some(k) => format!("{}[{k}]", r.name),
                        None => r.name.clone(),
                    };
                    match (&r.rational, &r.text) {
                        (Some(q), _) => {
                            let exact = if q.den == "1" {
                                q.num.clone()
                            } else {
                                format!("{}/{}", q.num, q.den)
                            };
                            writeln!(out, "{name} = {exact} ({})", r.decimal.as_deref().unwrap_or(""))?;
                        }
                        (None, Some(t)) => writeln!(out, "{name}: {t}")?,
                        (None, None) => writeln!(out, "{name}")?,
                    }
                }
                if let Some(e) = &self.error {
                    writeln!(out, "error: {e}")?;
                }
                writeln!(out, "status: {}", self.status)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wreathlab::exactmath::rat;

    #[test]
    fn rows_carry_exact_and_decimal_forms() {
        let mut r = Report::new("stats");
        r.indexed("delta", 0, &rat(3, 8));
        r.text("transitive", "yes");
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["results"][0]["rational"]["num"], "3");
        assert_eq!(v["results"][0]["rational"]["den"], "8");
        assert_eq!(v["results"][0]["decimal"], "0.375000000000000");
        assert_eq!(v["results"][0]["k"], 0);
        assert!(v["results"][1].get("rational").is_none());
        assert!(v.get("error").is_none());
    }

    #[test]
    fn floats_are_reported_by_their_binary_value() {
        let mut r = Report::new("limits");
        r.float("half", 0.5);
        assert_eq!(r.results[0].rational.as_ref().unwrap().den, "2");
    }
}
