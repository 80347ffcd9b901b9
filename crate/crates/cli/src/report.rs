//! Reports: ordered fields plus named tables, rendered as text or as `key=value` lines.
//!
//! The machine form is line oriented: `report=<title>`, then one `key=value` per field and
//! `<table>.columns=` / `<table>.row=` lines per table. Values never contain newlines, so
//! parsing the machine form gives back the same report.

use std::fmt::Write;

use paperfold::rational::{decimal, fmt_rat, Rat};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Text form prints each row as `<name> col=value ...` instead of aligned columns.
    pub inline: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub fields: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

/// Fields printed after the tables in the text form.
const CLOSING_FIELDS: [&str; 2] = ["verdict", "reason"];

fn clean(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report { title: title.to_string(), ..Default::default() }
    }

    pub fn field(&mut self, key: &str, value: impl AsRef<str>) -> &mut Self {
        self.fields.push((key.to_string(), clean(value.as_ref())));
        self
    }

    /// An exact rational, with its decimal alongside.
    pub fn rational(&mut self, key: &str, value: &Rat) -> &mut Self {
        self.field(key, fmt_rat(value));
        let approx = paperfold::rational::to_f64(value);
        self.field(&format!("{key}.decimal"), decimal(approx))
    }

    /// A floating-point bound, tagged with the side on which it errs.
    pub fn bound(&mut self, key: &str, value: f64, direction: &str) -> &mut Self {
        self.field(key, decimal(value));
        self.field(&format!("{key}.direction"), direction)
    }

    pub fn table(&mut self, name: &str, columns: &[&str]) -> &mut Table {
        self.tables.push(Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), inline: false });
        self.tables.last_mut().expect("just pushed")
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.title).ok();
        let width = self.fields.iter().filter(|(k, _)| !k.contains('.')).map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let field_line = |out: &mut String, k: &str, v: &str| {
            let dir = self.get(&format!("{k}.direction")).map(|d| format!(" ({d} bound)")).unwrap_or_default();
            let dec = self.get(&format!("{k}.decimal")).filter(|d| *d != v).map(|d| format!(" ≈ {d}")).unwrap_or_default();
            writeln!(out, "  {:width$}  {v}{dec}{dir}", k).ok();
        };
        let closing = |k: &str| CLOSING_FIELDS.contains(&k);
        for (k, v) in &self.fields {
            if !(k.ends_with(".decimal") || k.ends_with(".direction") || closing(k)) {
                field_line(&mut out, k, v);
            }
        }
        for t in &self.tables {
            if t.inline {
                for r in &t.rows {
                    let cells: Vec<String> = t.columns.iter().zip(r).map(|(c, v)| format!("{c}={v}")).collect();
                    writeln!(out, "{} {}", t.name, cells.join(" ")).ok();
                }
                continue;
            }
            writeln!(out, "{}:", t.name).ok();
            let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for r in &t.rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &[String]| cells.iter().zip(&widths).map(|(c, w)| format!("{c:w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string();
            writeln!(out, "  {}", line(&t.columns)).ok();
            for r in &t.rows {
                writeln!(out, "  {}", line(r)).ok();
            }
        }
        for (k, v) in self.fields.iter().filter(|(k, _)| closing(k)) {
            field_line(&mut out, k, v);
        }
        out
    }

    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        writeln!(out, "report={}", self.title).ok();
        for (k, v) in &self.fields {
            writeln!(out, "{k}={v}").ok();
        }
        for t in &self.tables {
            writeln!(out, "table.{}.columns={}", t.name, t.columns.join("\t")).ok();
            if t.inline {
                writeln!(out, "table.{}.inline=true", t.name).ok();
            }
            for r in &t.rows {
                writeln!(out, "table.{}.row={}", t.name, r.join("\t")).ok();
            }
        }
        out
    }

    /// Inverse of [`Report::to_machine`].
    pub fn parse_machine(text: &str) -> Result<Report, String> {
        let mut lines = text.lines();
        let first = lines.next().ok_or("empty report")?;
        let title = first.strip_prefix("report=").ok_or("missing report= header")?;
        let mut rep = Report::new(title);
        for (i, line) in lines.enumerate() {
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 2))?;
            if let Some(rest) = k.strip_prefix("table.") {
                let (name, kind) = rest.rsplit_once('.').ok_or_else(|| format!("line {}: bad table key", i + 2))?;
                let cells: Vec<String> = if v.is_empty() { Vec::new() } else { v.split('\t').map(str::to_string).collect() };
                match kind {
                    "columns" => rep.tables.push(Table { name: name.to_string(), columns: cells, rows: Vec::new(), inline: false }),
                    "inline" => {
                        rep.tables.iter_mut().rev().find(|t| t.name == name).ok_or_else(|| format!("line {}: inline before columns", i + 2))?.inline =
                            v == "true"
                    }
                    "row" => {
                        rep.tables.iter_mut().rev().find(|t| t.name == name).ok_or_else(|| format!("line {}: row before columns", i + 2))?.rows.push(cells)
                    }
                    _ => return Err(format!("line {}: unknown table key {kind}", i + 2)),
                }
            } else {
                rep.fields.push((k.to_string(), v.to_string()));
            }
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use paperfold::rational::rat;

    #[test]
    fn machine_form_round_trips() {
        let mut r = Report::new("modulus");
        r.rational("delta", &rat(1, 192)).bound("w", 0.25, "lower").field("note", "a=b");
        let t = r.table("rho", &["t", "rho_hat"]);
        t.rows.push(vec!["1/384".into(), "0.5".into()]);
        let w = r.table("window", &["k", "W_k"]);
        w.inline = true;
        w.rows.push(vec!["0".into(), "0.25".into()]);
        assert_eq!(Report::parse_machine(&r.to_machine()).unwrap(), r);
        assert!(r.to_text().contains("1/192 ≈ 0.00520833333333"));
        assert!(r.to_text().contains("window k=0 W_k=0.25"));
    }
}
