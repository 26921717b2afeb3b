//! Compact `key=value;key=value` encoding used by the scripted policies.

use std::collections::BTreeMap;

pub fn encode<'a, I>(fields: I) -> String
where
    I: IntoIterator<Item = (&'a str, String)>,
{
    fields
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses `k=v;k=v`. Segments without `=` are skipped; later keys win.
pub fn decode(content: &str) -> BTreeMap<&str, &str> {
    content
        .split(';')
        .filter_map(|seg| seg.split_once('='))
        .map(|(k, v)| (k.trim(), v.trim()))
        .collect()
}

/// Numeric field lookup.
pub fn field<T: std::str::FromStr>(content: &str, key: &str) -> Option<T> {
    decode(content).get(key).and_then(|v| v.parse().ok())
}
