//! Line-oriented structured text used to persist subroutines, instances and
//! witnesses.
//!
//! ```text
//! # comment
//! key value value ...
//! [section arg arg ...]
//! token token ...
//! ```
//!
//! Header lines precede the first section. Reals are written with 17
//! significant digits (`{:.16e}`), which round-trips every `f64` exactly.
//! The concrete layouts are documented in `docs/formats.md`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub args: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TextDoc {
    pub header: Vec<(String, Vec<String>)>,
    pub sections: Vec<Section>,
}

impl TextDoc {
    pub fn push_header<S: ToString>(&mut self, key: &str, values: impl IntoIterator<Item = S>) {
        self.header.push((key.to_string(), values.into_iter().map(|v| v.to_string()).collect()));
    }

    pub fn push_section(&mut self, name: &str, args: Vec<String>) -> &mut Section {
        self.sections.push(Section { name: name.to_string(), args, rows: Vec::new() });
        self.sections.last_mut().unwrap()
    }

    pub fn header_values(&self, key: &str) -> Result<&[String]> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing header key `{key}`") })
    }

    pub fn header_one<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.header_values(key)?;
        if v.len() != 1 {
            return Err(Error::Parse { line: 0, msg: format!("`{key}` expects one value") });
        }
        parse_token(&v[0])
    }

    pub fn header_list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.header_values(key)?.iter().map(|s| parse_token(s)).collect()
    }

    pub fn sections_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, vs) in &self.header {
            out.push_str(k);
            for v in vs {
                out.push(' ');
                out.push_str(v);
            }
            out.push('\n');
        }
        for s in &self.sections {
            out.push('[');
            out.push_str(&s.name);
            for a in &s.args {
                let _ = write!(out, " {a}");
            }
            out.push_str("]\n");
            for r in &s.rows {
                out.push_str(&r.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = TextDoc::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let inner = inner
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse { line: ln + 1, msg: "unterminated section header".into() })?;
                let mut toks = inner.split_whitespace();
                let name = toks.next().ok_or_else(|| Error::Parse { line: ln + 1, msg: "empty section name".into() })?;
                doc.push_section(name, toks.map(str::to_string).collect());
                continue;
            }
            let toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            match doc.sections.last_mut() {
                Some(s) => s.rows.push(toks),
                None => {
                    let (k, v) = toks.split_first().unwrap();
                    doc.header.push((k.clone(), v.to_vec()));
                }
            }
        }
        Ok(doc)
    }
}

pub fn parse_token<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Parse { line: 0, msg: format!("cannot parse token `{s}`") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_roundtrip() {
        let mut d = TextDoc::default();
        d.push_header("kind", ["demo"]);
        d.push_header("sizes", [1, 2, 3]);
        let s = d.push_section("block", vec!["1".into(), "0".into()]);
        s.rows.push(vec![fmt_f64(0.1), fmt_f64(-1.0 / 3.0)]);
        let text = d.render();
        let back = TextDoc::parse(&text).unwrap();
        assert_eq!(back, d);
        let v: Vec<f64> = back.sections[0].rows[0].iter().map(|t| parse_token(t).unwrap()).collect();
        assert_eq!(v[0].to_bits(), 0.1f64.to_bits());
        assert_eq!(v[1].to_bits(), (-1.0f64 / 3.0).to_bits());
        assert_eq!(back.header_list::<usize>("sizes").unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn seventeen_digits_are_exact() {
        for x in [f64::MIN_POSITIVE, 1e-300, 0.1 + 0.2, std::f64::consts::PI, -7.25e17] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
