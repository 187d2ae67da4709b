//! NSL-KDD in ARFF form: `@relation`, `@attribute` and `@data` sections
//! with case-insensitive keywords and `%` comments.
//!
//! The first 41 attributes are the features in schema order; the next one
//! is the class. One further trailing attribute (the difficulty score) is
//! accepted and dropped. Declared nominal values form a closed list. An
//! attribute declared nominal where the schema expects a number (or the
//! reverse) is read with the schema's kind.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use emffs_core::{FeatureKind, Schema};

use crate::builder::Builder;
use crate::{FormatError, FormatResult};
use emffs_core::Dataset;

const FEATURES: usize = 41;

#[derive(Debug, Clone, PartialEq)]
enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone)]
struct Attribute {
    name: String,
    kind: AttrType,
}

/// Splits on commas outside single or double quotes and unquotes each
/// field.
fn split_fields(line: &str) -> Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), '\\') => {
                if let Some(n) = chars.next() {
                    cur.push(n);
                }
            }
            (Some(_), c) => cur.push(c),
            (None, '\'' | '"') if cur.trim().is_empty() => {
                cur.clear();
                quote = Some(c);
            }
            (None, ',') => fields.push(std::mem::take(&mut cur).trim().to_string()),
            (None, c) => cur.push(c),
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".into());
    }
    fields.push(cur.trim().to_string());
    Ok(fields)
}

/// Reads a possibly quoted leading token, returning it and the rest.
fn leading_token(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    let first = s.chars().next()?;
    if first == '\'' || first == '"' {
        let end = s[1..].find(first)? + 1;
        Some((s[1..end].to_string(), &s[end + 1..]))
    } else {
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        Some((s[..end].to_string(), &s[end..]))
    }
}

fn parse_attribute(rest: &str) -> Result<Attribute, String> {
    let (name, ty) = leading_token(rest).ok_or("attribute without a name")?;
    let ty = ty.trim();
    let kind = if let Some(body) = ty.strip_prefix('{') {
        let body = body.strip_suffix('}').ok_or("nominal value list is not closed")?;
        let values = split_fields(body)?;
        if values.iter().any(|v| v.is_empty()) {
            return Err("empty nominal value".into());
        }
        AttrType::Nominal(values)
    } else {
        match ty.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttrType::Numeric,
            other => return Err(format!("unsupported attribute type `{other}`")),
        }
    };
    Ok(Attribute { name, kind })
}

pub fn parse_arff<R: BufRead>(reader: R) -> FormatResult<Dataset> {
    let schema = Arc::new(Schema::nsl_kdd());
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut builder: Option<Builder> = None;
    let mut in_data = false;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = text.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            } else if lower.starts_with("@attribute") {
                let attr = parse_attribute(&text["@attribute".len()..]).map_err(|m| FormatError::line(line_no, m))?;
                attributes.push(attr);
            } else if lower.starts_with("@data") {
                builder = Some(start_data(&schema, &attributes).map_err(|m| FormatError::line(line_no, m))?);
                in_data = true;
            } else {
                return Err(FormatError::line(line_no, format!("unexpected header line `{text}`")));
            }
            continue;
        }
        if text.starts_with('{') {
            return Err(FormatError::line(line_no, "sparse ARFF rows are not supported"));
        }
        let fields = split_fields(text).map_err(|m| FormatError::line(line_no, m))?;
        if fields.len() != attributes.len() {
            return Err(FormatError::line(
                line_no,
                format!("{} values, expected {}", fields.len(), attributes.len()),
            ));
        }
        let b = builder.as_mut().expect("data section has a builder");
        b.push(line_no as u64, fields[..FEATURES].iter().map(String::as_str), &fields[FEATURES])
            .map_err(|e| match e {
                FormatError::Row { row, message } => FormatError::line(row as usize, message),
                other => other,
            })?;
    }
    match builder {
        Some(b) => b.finish(),
        None => Err(FormatError::Invalid("no @data section".into())),
    }
}

fn start_data(schema: &Arc<Schema>, attributes: &[Attribute]) -> Result<Builder, String> {
    if attributes.len() != FEATURES + 1 && attributes.len() != FEATURES + 2 {
        return Err(format!(
            "{} attributes, expected {} or {}",
            attributes.len(),
            FEATURES + 1,
            FEATURES + 2
        ));
    }
    let mut b = Builder::new(Arc::clone(schema));
    for (pos, (attr, spec)) in attributes.iter().zip(schema.features()).enumerate() {
        if !attr.name.eq_ignore_ascii_case(&spec.name) {
            log::warn!("attribute {} is named `{}`, treating it as `{}`", spec.index, attr.name, spec.name);
        }
        if let (AttrType::Nominal(values), FeatureKind::Nominal) = (&attr.kind, spec.kind) {
            b.declare_values(pos, values.clone());
        }
    }
    match &attributes[FEATURES].kind {
        AttrType::Nominal(values) => b.declare_labels(values.clone()),
        AttrType::Numeric => return Err("class attribute must be nominal".into()),
    }
    Ok(b)
}

pub fn read_arff_path(path: &Path) -> FormatResult<Dataset> {
    parse_arff(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_respect_quotes() {
        assert_eq!(split_fields("a, 'b,c' ,\"d\"").unwrap(), ["a", "b,c", "d"]);
        assert!(split_fields("'open").is_err());
    }

    #[test]
    fn attribute_forms() {
        let a = parse_attribute(" 'protocol_type' {'tcp','udp', icmp}").unwrap();
        assert_eq!(a.name, "protocol_type");
        assert_eq!(a.kind, AttrType::Nominal(vec!["tcp".into(), "udp".into(), "icmp".into()]));
        assert_eq!(parse_attribute("duration REAL").unwrap().kind, AttrType::Numeric);
        assert!(parse_attribute("x string").is_err());
    }
}
