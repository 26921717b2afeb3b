//! Tab-separated transcript export: `round<TAB>src<TAB>dst<TAB>content`, one
//! message per line. Backslash, tab, newline and carriage return in the
//! content are escaped as `\\`, `\t`, `\n` and `\r`.

use std::fmt::Write as _;

use super::Message;

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_field`]. Unknown or dangling escapes are rejected.
pub fn unescape_field(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            _ => return None,
        });
    }
    Some(out)
}

pub fn write_transcript(messages: &[Message]) -> String {
    let mut out = String::new();
    for m in messages {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            m.round,
            m.src,
            m.dst,
            escape_field(&m.content)
        );
    }
    out
}

pub fn parse_transcript(text: &str) -> Result<Vec<Message>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = |what: &str| format!("line {}: {what}", i + 1);
            let mut fields = line.splitn(4, '\t');
            let mut num = |name: &str| -> Result<usize, String> {
                fields
                    .next()
                    .ok_or_else(|| bad(&format!("missing {name}")))?
                    .parse()
                    .map_err(|_| bad(&format!("bad {name}")))
            };
            let round = num("round")?;
            let src = num("src")?;
            let dst = num("dst")?;
            let content = fields.next().ok_or_else(|| bad("missing content"))?;
            let content = unescape_field(content).ok_or_else(|| bad("bad escape"))?;
            Ok(Message {
                round,
                src,
                dst,
                content,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn escapes_control_characters() {
        let m = Message {
            round: 2,
            src: 0,
            dst: 3,
            content: "a\tb\nc\\d".into(),
        };
        let text = write_transcript(std::slice::from_ref(&m));
        assert_eq!(text, "2\t0\t3\ta\\tb\\nc\\\\d\n");
        assert_eq!(parse_transcript(&text).unwrap(), vec![m]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_transcript("x\t0\t1\thi").is_err());
        assert!(parse_transcript("0\t0\t1").is_err());
        assert!(parse_transcript("0\t0\t1\tbad\\q").is_err());
        assert!(parse_transcript("0\t0\t1\tdangling\\").is_err());
    }

    proptest! {
        #[test]
        fn transcript_round_trips(msgs in prop::collection::vec(
            (0usize..50, 0usize..100, 0usize..100, ".*"), 0..20))
        {
            let messages: Vec<Message> = msgs
                .into_iter()
                .map(|(round, src, dst, content)| Message { round, src, dst, content })
                .collect();
            let parsed = parse_transcript(&write_transcript(&messages)).unwrap();
            prop_assert_eq!(parsed, messages);
        }
    }
}
