//! Flat `key = value` text files.
//!
//! Keys may carry a section prefix (`tracker.variant`). `#` starts a comment.
//! Vector values are whitespace or comma separated. Readers take the keys
//! they know and [`KeyValues::finish`] rejects anything left over, so typos
//! do not pass silently.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{read_error, CliError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::data(format!("line {}: expected `key = value`", i + 1)));
            };
            let key = k.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(CliError::data(format!("line {}: bad key {key:?}", i + 1)));
            }
            if entries.insert(key.to_string(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CliError::data(format!("line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| read_error(path, e))?;
        Self::parse(&text).map_err(|e| e.at(path))
    }

    /// Removes and parses `key`.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::data(format!("line {line}: {key}: {e}"))),
        }
    }

    pub fn take_required<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.take(key)?.ok_or_else(|| CliError::data(format!("missing key {key}")))
    }

    /// Removes `key` and parses exactly `N` numbers from it.
    pub fn take_array<const N: usize>(&mut self, key: &str) -> Result<Option<[f64; N]>> {
        let Some((line, v)) = self.entries.remove(key) else { return Ok(None) };
        parse_array(&v).map(Some).map_err(|e| CliError::data(format!("line {line}: {key}: {e}")))
    }

    /// Fails if any key was never taken.
    pub fn finish(self) -> Result<()> {
        match self.entries.iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((k, (line, _))) => Err(CliError::data(format!("line {line}: unknown key {k}"))),
        }
    }
}

/// Parses `N` numbers separated by whitespace and/or commas.
pub fn parse_array<const N: usize>(text: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    if parts.len() != N {
        return Err(format!("expected {N} values, found {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(out)
}

/// Accumulates `key = value` lines in insertion order.
#[derive(Debug, Default)]
pub struct KvWriter {
    text: String,
}

impl KvWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, c: &str) -> &mut Self {
        self.text.push_str("# ");
        self.text.push_str(c);
        self.text.push('\n');
        self
    }

    /// `f64` values use Rust's shortest round-trip formatting, so reading the
    /// file back gives the same bits.
    pub fn put(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.text.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn put_array(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let joined: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        self.put(key, joined.join(" "))
    }

    pub fn blank(&mut self) -> &mut Self {
        self.text.push('\n');
        self
    }

    pub fn finish(&self) -> String {
        self.text.clone()
    }
}
