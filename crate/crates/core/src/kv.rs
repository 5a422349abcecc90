//! Flat `key = value` configuration text.
//!
//! One assignment per line, `#` starts a comment, and an optional
//! `[section]` header groups the keys that follow it. Keys are
//! case-insensitive; values are kept verbatim (trimmed).

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvMap {
    entries: BTreeMap<String, String>,
}

impl KvMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: &str, value: &str) {
        self.entries.insert(key.trim().to_ascii_lowercase(), value.trim().to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&key.to_ascii_lowercase()).map(String::as_str)
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("cannot parse `{key} = {raw}`"))),
        }
    }

    /// Comma-separated list value.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => parse_list(raw).map(Some).map_err(|_| Error::Config(format!("cannot parse list `{key} = {raw}`"))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fails on the first key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.keys() {
            if !allowed.contains(&k) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn parse_list<T: FromStr>(raw: &str) -> std::result::Result<Vec<T>, ()> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| ()))
        .collect()
}

/// A parsed document: keys before the first header live in section `""`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDoc {
    pub sections: BTreeMap<String, KvMap>,
}

impl KvDoc {
    pub fn parse(text: &str) -> Result<KvDoc> {
        let mut doc = KvDoc::default();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Config(format!("line {}: malformed section header", lineno + 1)));
                }
                current = line[1..line.len() - 1].trim().to_ascii_lowercase();
                doc.sections.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            if k.trim().is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            doc.sections.entry(current.clone()).or_default().insert(k, v);
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&KvMap> {
        self.sections.get(&name.to_ascii_lowercase())
    }

    /// All sections merged, later sections overriding earlier ones.
    pub fn flatten(&self) -> KvMap {
        let mut out = KvMap::new();
        for map in self.sections.values() {
            for (k, v) in &map.entries {
                out.insert(k, v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let text = "# header\nn = 4 # trailing\n\n[experiment]\nkind = moments\nq = 0, 0.5 ,1\n";
        let doc = KvDoc::parse(text).unwrap();
        assert_eq!(doc.section("").unwrap().get("n"), Some("4"));
        let exp = doc.section("experiment").unwrap();
        assert_eq!(exp.get("kind"), Some("moments"));
        assert_eq!(exp.get_list::<f64>("q").unwrap().unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(KvDoc::parse("just words\n").is_err());
        assert!(KvDoc::parse("[open\n").is_err());
        let doc = KvDoc::parse("n = x\n").unwrap();
        assert!(doc.flatten().get_parsed::<usize>("n").is_err());
    }
}
