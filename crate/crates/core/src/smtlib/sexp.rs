use std::fmt;

/// An S-expression with the byte offset where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, usize),
    List(Vec<SExpr>, usize),
}

impl SExpr {
    pub fn offset(&self) -> usize {
        match self {
            SExpr::Atom(_, o) | SExpr::List(_, o) => *o,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            SExpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a, _) => f.write_str(a),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads every top-level S-expression in `text`. Errors carry a byte offset.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, (usize, String)> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(Vec<SExpr>, usize)> = Vec::new();
    let mut top = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let item = match c {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'(' => {
                stack.push((Vec::new(), i));
                i += 1;
                continue;
            }
            b')' => {
                let (items, start) = stack.pop().ok_or((i, "unbalanced `)`".to_string()))?;
                i += 1;
                SExpr::List(items, start)
            }
            b'"' => {
                let start = i;
                i += 1;
                loop {
                    match bytes.get(i) {
                        None => return Err((start, "unterminated string literal".into())),
                        // "" is an escaped quote inside a string
                        Some(b'"') if bytes.get(i + 1) == Some(&b'"') => i += 2,
                        Some(b'"') => break,
                        Some(_) => i += 1,
                    }
                }
                i += 1;
                SExpr::Atom(text[start..i].to_string(), start)
            }
            b'|' => {
                let start = i;
                let end = text[i + 1..].find('|').ok_or((start, "unterminated quoted symbol".to_string()))?;
                i += end + 2;
                SExpr::Atom(text[start + 1..i - 1].to_string(), start)
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !b"();\"|".contains(&bytes[i]) {
                    i += 1;
                }
                SExpr::Atom(text[start..i].to_string(), start)
            }
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => top.push(item),
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err((*start, "unbalanced `(`".into()));
    }
    Ok(top)
}
