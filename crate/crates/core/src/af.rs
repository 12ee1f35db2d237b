//! Text format for abstract frameworks, for driving the solver directly:
//! one declaration per line, `arg <id>`, `att <attacker> <target>`,
//! `pref <stronger> <weaker>`. `#` starts a comment; ids are
//! whitespace-free tokens.

use crate::framework::{ArgumentId, ArgumentationFramework};
use crate::kb::ParseError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AfDocument {
    pub arguments: Vec<ArgumentId>,
    pub attacks: Vec<(ArgumentId, ArgumentId)>,
    pub preferences: Vec<(ArgumentId, ArgumentId)>,
}

impl AfDocument {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for id in &self.arguments {
            out.push_str(&format!("arg {id}\n"));
        }
        for (a, b) in &self.attacks {
            out.push_str(&format!("att {a} {b}\n"));
        }
        for (a, b) in &self.preferences {
            out.push_str(&format!("pref {a} {b}\n"));
        }
        out
    }

    pub fn build(&self) -> ArgumentationFramework {
        ArgumentationFramework::from_abstract(&self.arguments, &self.attacks, &self.preferences)
    }
}

pub fn parse_af(text: &str, origin: &str) -> Result<AfDocument, ParseError> {
    let mut doc = AfDocument::default();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = match raw_line.find('#') {
            Some(at) => &raw_line[..at],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let fail = |message: String| ParseError::at(origin, line_no, 1, message);
        match tokens[0] {
            "arg" => {
                if tokens.len() != 2 {
                    return Err(fail("`arg` takes exactly one id".into()));
                }
                let id = tokens[1].to_string();
                if doc.arguments.contains(&id) {
                    return Err(fail(format!("argument `{id}` declared twice")));
                }
                doc.arguments.push(id);
            }
            "att" | "pref" => {
                if tokens.len() != 3 {
                    return Err(fail(format!("`{}` takes exactly two ids", tokens[0])));
                }
                for id in &tokens[1..] {
                    if !doc.arguments.iter().any(|a| a == id) {
                        return Err(fail(format!("undeclared argument `{id}`")));
                    }
                }
                let pair = (tokens[1].to_string(), tokens[2].to_string());
                if tokens[0] == "att" {
                    doc.attacks.push(pair);
                } else {
                    doc.preferences.push(pair);
                }
            }
            other => {
                return Err(fail(format!(
                    "expected `arg`, `att` or `pref`, found `{other}`"
                )))
            }
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# four arguments, one flip pending
arg r1
arg r2
arg r3
arg r5
att r1 r2
att r3 r2
att r5 r3
pref r2 r1
pref r3 r2
";

    #[test]
    fn parses_and_round_trips() {
        let doc = parse_af(EXAMPLE, "<test>").unwrap();
        assert_eq!(doc.arguments, ["r1", "r2", "r3", "r5"]);
        assert_eq!(doc.attacks.len(), 3);
        assert_eq!(doc.preferences.len(), 2);
        let reparsed = parse_af(&doc.to_text(), "<round>").unwrap();
        assert_eq!(reparsed, doc);
    }

    #[test]
    fn undeclared_ids_are_rejected() {
        let err = parse_af("arg a\natt a b\n", "<test>").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message_text().contains("undeclared"));
    }

    #[test]
    fn duplicate_and_malformed_lines_are_rejected() {
        assert!(parse_af("arg a\narg a\n", "<test>").is_err());
        assert!(parse_af("arg\n", "<test>").is_err());
        assert!(parse_af("nonsense a b\n", "<test>").is_err());
    }

    #[test]
    fn built_framework_applies_preference_flips() {
        let doc = parse_af(EXAMPLE, "<test>").unwrap();
        let af = doc.build();
        let pairs: Vec<(&str, &str)> = af
            .attacks
            .iter()
            .map(|e| (e.attacker.as_str(), e.target.as_str()))
            .collect();
        assert_eq!(pairs, [("r2", "r1"), ("r3", "r2"), ("r5", "r3")]);
    }
}
