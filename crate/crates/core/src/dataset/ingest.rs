use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub user_key: String,
    pub item_key: String,
    pub rating: Option<f64>,
    pub kind: Option<String>,
    pub timestamp: Option<i64>,
}

impl RawRecord {
    pub fn new(user: &str, item: &str) -> Self {
        Self { user_key: user.to_owned(), item_key: item.to_owned(), rating: None, kind: None, timestamp: None }
    }

    pub fn with_rating(mut self, rating: f64) -> Self {
        self.rating = Some(rating);
        self
    }

    pub fn with_kind(mut self, kind: &str) -> Self {
        self.kind = Some(kind.to_owned());
        self
    }
}

/// Parsed interaction log, possibly with duplicates and conflicts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawInteractions {
    pub records: Vec<RawRecord>,
    /// Non-header lines consumed, blank ones included.
    pub lines_read: usize,
    /// `(line number, reason)` for every skipped line.
    pub skipped: Vec<(usize, String)>,
}

impl RawInteractions {
    pub fn from_records(records: Vec<RawRecord>) -> Self {
        Self { lines_read: records.len(), records, skipped: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Char(char),
    /// Any run of ASCII whitespace.
    Whitespace,
}

impl Delimiter {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "tab" | "\\t" | "\t" => Ok(Delimiter::Char('\t')),
            "comma" | "," => Ok(Delimiter::Char(',')),
            "space" | "whitespace" => Ok(Delimiter::Whitespace),
            "semicolon" | ";" => Ok(Delimiter::Char(';')),
            other => {
                let mut chars = other.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(Error::config(format!("unsupported delimiter {other:?}"))),
                }
            }
        }
    }

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match *self {
            Delimiter::Char(c) => line.split(c).map(str::trim).collect(),
            Delimiter::Whitespace => line.split_ascii_whitespace().collect(),
        }
    }
}

/// A column addressed by 0-based position or, with a header, by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    /// Digits select by position, anything else by header name.
    pub fn parse(text: &str) -> Self {
        text.parse().map(ColumnSelector::Index).unwrap_or_else(|_| ColumnSelector::Name(text.to_owned()))
    }

    fn resolve(&self, header: Option<&[&str]>, width: usize) -> Result<usize> {
        let missing = || Error::MissingColumn { column: self.to_string() };
        match self {
            ColumnSelector::Index(idx) if *idx < width => Ok(*idx),
            ColumnSelector::Index(_) => Err(missing()),
            ColumnSelector::Name(name) => header.and_then(|h| h.iter().position(|c| c == name)).ok_or_else(missing),
        }
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Index(idx) => write!(f, "#{idx}"),
            ColumnSelector::Name(name) => write!(f, "{name:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub delimiter: Delimiter,
    pub has_header: bool,
    pub user: ColumnSelector,
    pub item: ColumnSelector,
    pub rating: Option<ColumnSelector>,
    pub kind: Option<ColumnSelector>,
    pub timestamp: Option<ColumnSelector>,
    /// Abort on the first malformed line instead of skipping it.
    pub strict: bool,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            delimiter: Delimiter::Char(','),
            has_header: false,
            user: ColumnSelector::Index(0),
            item: ColumnSelector::Index(1),
            rating: None,
            kind: None,
            timestamp: None,
            strict: false,
        }
    }
}

struct Resolved {
    user: usize,
    item: usize,
    rating: Option<usize>,
    kind: Option<usize>,
    timestamp: Option<usize>,
}

impl Resolved {
    fn new(spec: &ColumnSpec, header: Option<&[&str]>, width: usize) -> Result<Self> {
        let opt = |sel: &Option<ColumnSelector>| sel.as_ref().map(|s| s.resolve(header, width)).transpose();
        Ok(Self {
            user: spec.user.resolve(header, width)?,
            item: spec.item.resolve(header, width)?,
            rating: opt(&spec.rating)?,
            kind: opt(&spec.kind)?,
            timestamp: opt(&spec.timestamp)?,
        })
    }

    fn parse(&self, fields: &[&str]) -> std::result::Result<RawRecord, String> {
        let get = |idx: usize| {
            fields.get(idx).copied().ok_or_else(|| format!("expected at least {} fields, found {}", idx + 1, fields.len()))
        };
        let user = get(self.user)?;
        let item = get(self.item)?;
        if user.is_empty() || item.is_empty() {
            return Err("empty user or item key".into());
        }
        let mut record = RawRecord::new(user, item);
        if let Some(idx) = self.rating {
            let text = get(idx)?;
            record.rating = Some(text.parse().map_err(|_| format!("bad rating {text:?}"))?);
        }
        if let Some(idx) = self.kind {
            record.kind = Some(get(idx)?.to_owned());
        }
        if let Some(idx) = self.timestamp {
            let text = get(idx)?;
            record.timestamp = Some(text.parse().map_err(|_| format!("bad timestamp {text:?}"))?);
        }
        Ok(record)
    }
}

/// Parses a delimited interaction log, one record per well-formed line.
///
/// Column positions are validated against the header, or against the first
/// data line when there is none; a mandatory column that cannot exist is
/// fatal. Blank and malformed lines are skipped and reported in
/// [`RawInteractions::skipped`], unless `spec.strict` is set.
pub fn ingest_interactions<R: BufRead>(source: R, spec: &ColumnSpec) -> Result<RawInteractions> {
    let mut out = RawInteractions::default();
    let mut resolved: Option<Resolved> = None;
    let mut header_pending = spec.has_header;

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let text = line.trim_end_matches('\r');
        if header_pending {
            header_pending = false;
            let header = spec.delimiter.split(text);
            resolved = Some(Resolved::new(spec, Some(&header), header.len())?);
            continue;
        }
        out.lines_read += 1;
        if text.trim().is_empty() {
            skip(&mut out, spec, line_no, "blank line".into())?;
            continue;
        }
        let fields = spec.delimiter.split(text);
        let columns = match &resolved {
            Some(r) => r,
            None => resolved.insert(Resolved::new(spec, None, fields.len())?),
        };
        match columns.parse(&fields) {
            Ok(record) => out.records.push(record),
            Err(reason) => skip(&mut out, spec, line_no, reason)?,
        }
    }
    Ok(out)
}

fn skip(out: &mut RawInteractions, spec: &ColumnSpec, line: usize, message: String) -> Result<()> {
    if spec.strict {
        return Err(Error::MalformedLine { line, message });
    }
    out.skipped.push((line, message));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, spec: &ColumnSpec) -> Result<RawInteractions> {
        ingest_interactions(text.as_bytes(), spec)
    }

    #[test]
    fn three_lines() {
        let raw = parse("u1,i1\nu1,i2\nu2,i1", &ColumnSpec::default()).unwrap();
        assert_eq!(raw.records.len(), 3);
        assert_eq!(raw.records[1], RawRecord::new("u1", "i2"));
        assert!(raw.skipped.is_empty());
    }

    #[test]
    fn blank_line_is_skipped_with_warning() {
        let raw = parse("u1,i1\n\nu1,i2\nu2,i1\n", &ColumnSpec::default()).unwrap();
        assert_eq!(raw.records.len(), 3);
        assert_eq!(raw.skipped.len(), 1);
        assert_eq!(raw.skipped[0].0, 2);
    }

    #[test]
    fn header_is_not_a_record() {
        let spec = ColumnSpec { has_header: true, ..Default::default() };
        let raw = parse("user,item\nu1,i1\nu2,i1", &spec).unwrap();
        assert_eq!(raw.records.len(), 2);
        assert_eq!(raw.records[0].user_key, "u1");
    }

    #[test]
    fn columns_by_name() {
        let spec = ColumnSpec {
            has_header: true,
            user: ColumnSelector::parse("uid"),
            item: ColumnSelector::parse("iid"),
            rating: Some(ColumnSelector::parse("stars")),
            ..Default::default()
        };
        let raw = parse("stars,iid,uid\n4.5,i9,u3", &spec).unwrap();
        assert_eq!(raw.records[0], RawRecord::new("u3", "i9").with_rating(4.5));
    }

    #[test]
    fn missing_mandatory_column_is_fatal() {
        let spec = ColumnSpec { item: ColumnSelector::Index(3), ..Default::default() };
        assert!(matches!(parse("u1,i1\n", &spec), Err(Error::MissingColumn { .. })));
        let named = ColumnSpec { has_header: true, user: ColumnSelector::parse("who"), ..Default::default() };
        assert!(matches!(parse("user,item\nu,i\n", &named), Err(Error::MissingColumn { .. })));
    }

    #[test]
    fn malformed_lines_skip_or_abort() {
        let spec = ColumnSpec { rating: Some(ColumnSelector::Index(2)), ..Default::default() };
        let text = "u1,i1,3\nu1,i2,abc\nu2\nu2,i1,5";
        let raw = parse(text, &spec).unwrap();
        assert_eq!(raw.records.len(), 2);
        assert_eq!(raw.skipped.iter().map(|s| s.0).collect::<Vec<_>>(), [2, 3]);

        let strict = ColumnSpec { strict: true, ..spec };
        assert!(matches!(parse(text, &strict), Err(Error::MalformedLine { line: 2, .. })));
    }

    #[test]
    fn whitespace_delimited_with_kind_and_timestamp() {
        let spec = ColumnSpec {
            delimiter: Delimiter::parse("space").unwrap(),
            kind: Some(ColumnSelector::Index(2)),
            timestamp: Some(ColumnSelector::Index(3)),
            ..Default::default()
        };
        let raw = parse("7  12 buy 1700000000\n", &spec).unwrap();
        let rec = &raw.records[0];
        assert_eq!((rec.user_key.as_str(), rec.item_key.as_str()), ("7", "12"));
        assert_eq!(rec.kind.as_deref(), Some("buy"));
        assert_eq!(rec.timestamp, Some(1_700_000_000));
    }

    #[test]
    fn delimiter_names() {
        assert_eq!(Delimiter::parse("tab").unwrap(), Delimiter::Char('\t'));
        assert_eq!(Delimiter::parse("|").unwrap(), Delimiter::Char('|'));
        assert!(Delimiter::parse("::").is_err());
    }
}
