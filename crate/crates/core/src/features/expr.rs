use std::fmt;

use super::FeatureError;

/// A role: a binary predicate or its goal version, optionally inverted
/// and/or transitively closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub pred: String,
    pub goal: bool,
    pub inverse: bool,
    pub plus: bool,
}

impl Role {
    pub fn prim(pred: &str) -> Self {
        Role { pred: pred.to_string(), goal: false, inverse: false, plus: false }
    }

    pub fn goal(pred: &str) -> Self {
        Role { goal: true, ..Role::prim(pred) }
    }

    pub fn inv(mut self) -> Self {
        self.inverse = true;
        self
    }

    pub fn closure(mut self) -> Self {
        self.plus = true;
        self
    }

    pub fn complexity(&self) -> u32 {
        1 + self.inverse as u32 + self.plus as u32
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if self.goal {
            f.write_str("_g")?;
        }
        if self.inverse {
            f.write_str("_inv")?;
        }
        if self.plus {
            f.write_str("_plus")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Concept {
    Top,
    Bot,
    Prim {
        pred: String,
        goal: bool,
    },
    Nominal(String),
    Type(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Exists(Role, Box<Concept>),
    Forall(Role, Box<Concept>),
    /// Objects whose `pred` successors equal their `pred_g` successors.
    Equal(String),
}

impl Concept {
    pub fn prim(pred: &str) -> Self {
        Concept::Prim { pred: pred.to_string(), goal: false }
    }

    pub fn goal(pred: &str) -> Self {
        Concept::Prim { pred: pred.to_string(), goal: true }
    }

    pub fn nominal(name: &str) -> Self {
        Concept::Nominal(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    /// Conjunction with children ordered by print form.
    pub fn and(a: Concept, b: Concept) -> Self {
        if b.to_string() < a.to_string() {
            Concept::And(Box::new(b), Box::new(a))
        } else {
            Concept::And(Box::new(a), Box::new(b))
        }
    }

    pub fn exists(r: Role, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn forall(r: Role, c: Concept) -> Self {
        Concept::Forall(r, Box::new(c))
    }

    /// Syntax-tree size; ⊤ and ⊥ weigh nothing.
    pub fn complexity(&self) -> u32 {
        match self {
            Concept::Top | Concept::Bot => 0,
            Concept::Prim { .. } | Concept::Nominal(_) | Concept::Type(_) => 1,
            Concept::Not(c) => 1 + c.complexity(),
            Concept::And(a, b) => 1 + a.complexity() + b.complexity(),
            Concept::Exists(r, c) | Concept::Forall(r, c) => 1 + r.complexity() + c.complexity(),
            Concept::Equal(_) => 3,
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("Top"),
            Concept::Bot => f.write_str("Bot"),
            Concept::Prim { pred, goal: false } => f.write_str(pred),
            Concept::Prim { pred, goal: true } => write!(f, "{pred}_g"),
            Concept::Nominal(n) => write!(f, "{{{n}}}"),
            Concept::Type(t) => write!(f, "Type({t})"),
            Concept::Not(c) => write!(f, "Not({c})"),
            Concept::And(a, b) => write!(f, "And({a},{b})"),
            Concept::Exists(r, c) => write!(f, "Exists({r},{c})"),
            Concept::Forall(r, c) => write!(f, "Forall({r},{c})"),
            Concept::Equal(p) => write!(f, "Equal({p},{p}_g)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Nullary {
        pred: String,
        goal: bool,
    },
    Card(Concept),
    /// Length of the shortest `role`-chain from `from` to `to` whose inner
    /// and final objects belong to `restrict`.
    Dist {
        from: Concept,
        role: Role,
        restrict: Concept,
        to: Concept,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Feature {
    pub kind: FeatureKind,
    pub boolean: bool,
}

impl Feature {
    pub fn nullary(pred: &str) -> Self {
        Feature { kind: FeatureKind::Nullary { pred: pred.to_string(), goal: false }, boolean: true }
    }

    pub fn card(c: Concept, boolean: bool) -> Self {
        Feature { kind: FeatureKind::Card(c), boolean }
    }

    pub fn dist(from: Concept, role: Role, restrict: Concept, to: Concept) -> Self {
        Feature { kind: FeatureKind::Dist { from, role, restrict, to }, boolean: false }
    }

    pub fn weight(&self) -> u32 {
        match &self.kind {
            FeatureKind::Nullary { .. } => 1,
            FeatureKind::Card(c) => c.complexity(),
            FeatureKind::Dist { from, role, restrict, to } => {
                let r = match restrict {
                    Concept::Top => 0,
                    c => 1 + c.complexity(),
                };
                1 + from.complexity() + role.complexity() + r + to.complexity()
            }
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FeatureKind::Nullary { pred, goal } => write!(f, "Nullary({pred}{})", if *goal { "_g" } else { "" }),
            FeatureKind::Card(c) => write!(f, "Card({c})"),
            FeatureKind::Dist { from, role, restrict, to } => write!(f, "Dist({from},{role},{restrict},{to})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Open,
    Close,
    Comma,
    Nominal(String),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, FeatureError> {
    let bad = |msg: String| FeatureError::Syntax { text: text.to_string(), msg };
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    let ident_char = |c: char| c.is_alphanumeric() || c == '-' || c == '_';
    while let Some((i, c)) = chars.next() {
        match c {
            '(' => toks.push(Tok::Open),
            ')' => toks.push(Tok::Close),
            ',' => toks.push(Tok::Comma),
            '{' => {
                let rest = &text[i + 1..];
                let end = rest.find('}').ok_or_else(|| bad("unterminated nominal".into()))?;
                let name = rest[..end].trim();
                if name.is_empty() || !name.chars().all(ident_char) {
                    return Err(bad(format!("bad nominal '{name}'")));
                }
                toks.push(Tok::Nominal(name.to_lowercase()));
                for _ in rest[..=end].chars() {
                    chars.next();
                }
            }
            c if c.is_whitespace() => {}
            c if ident_char(c) => {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if !ident_char(d) {
                        break;
                    }
                    end = j + d.len_utf8();
                    chars.next();
                }
                toks.push(Tok::Ident(text[i..end].to_lowercase()));
            }
            c => return Err(bad(format!("unexpected character '{c}'"))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> FeatureError {
        FeatureError::Syntax { text: self.text.to_string(), msg: msg.into() }
    }

    fn next(&mut self) -> Result<Tok, FeatureError> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| self.err("unexpected end of expression"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<(), FeatureError> {
        let got = self.next()?;
        if got != want {
            return Err(self.err(format!("expected {want:?}, found {got:?}")));
        }
        Ok(())
    }

    fn ident(&mut self) -> Result<String, FeatureError> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            t => Err(self.err(format!("expected a name, found {t:?}"))),
        }
    }

    fn finish(&self) -> Result<(), FeatureError> {
        if self.pos != self.toks.len() {
            return Err(self.err("trailing input"));
        }
        Ok(())
    }

    fn role(&mut self) -> Result<Role, FeatureError> {
        let mut name = self.ident()?;
        let mut strip = |suffix: &str| match name.strip_suffix(suffix) {
            Some(base) if !base.is_empty() => {
                name = base.to_string();
                true
            }
            _ => false,
        };
        let plus = strip("_plus");
        let inverse = strip("_inv");
        let goal = strip("_g");
        Ok(Role { pred: name, goal, inverse, plus })
    }

    fn concept(&mut self) -> Result<Concept, FeatureError> {
        let name = match self.next()? {
            Tok::Nominal(n) => return Ok(Concept::Nominal(n)),
            Tok::Ident(s) => s,
            t => return Err(self.err(format!("expected a concept, found {t:?}"))),
        };
        let c = match name.as_str() {
            "top" => Concept::Top,
            "bot" => Concept::Bot,
            "not" => {
                self.expect(Tok::Open)?;
                let c = self.concept()?;
                self.expect(Tok::Close)?;
                Concept::not(c)
            }
            "and" => {
                self.expect(Tok::Open)?;
                let a = self.concept()?;
                self.expect(Tok::Comma)?;
                let b = self.concept()?;
                self.expect(Tok::Close)?;
                Concept::and(a, b)
            }
            "exists" | "forall" => {
                self.expect(Tok::Open)?;
                let r = self.role()?;
                self.expect(Tok::Comma)?;
                let c = self.concept()?;
                self.expect(Tok::Close)?;
                if name == "exists" {
                    Concept::exists(r, c)
                } else {
                    Concept::forall(r, c)
                }
            }
            "type" => {
                self.expect(Tok::Open)?;
                let t = self.ident()?;
                self.expect(Tok::Close)?;
                Concept::Type(t)
            }
            "equal" => {
                self.expect(Tok::Open)?;
                let a = self.role()?;
                self.expect(Tok::Comma)?;
                let b = self.role()?;
                self.expect(Tok::Close)?;
                let plain = |r: &Role| !r.inverse && !r.plus;
                if a.pred != b.pred || !plain(&a) || !plain(&b) || a.goal == b.goal {
                    return Err(self.err("Equal pairs a primitive role with its goal version"));
                }
                Concept::Equal(a.pred)
            }
            _ => match name.strip_suffix("_g") {
                Some(base) if !base.is_empty() => Concept::goal(base),
                _ => Concept::prim(&name),
            },
        };
        Ok(c)
    }

    fn feature(&mut self) -> Result<FeatureKind, FeatureError> {
        let head = self.ident()?;
        self.expect(Tok::Open)?;
        let kind = match head.as_str() {
            "nullary" => {
                let p = self.ident()?;
                match p.strip_suffix("_g") {
                    Some(base) if !base.is_empty() => FeatureKind::Nullary { pred: base.to_string(), goal: true },
                    _ => FeatureKind::Nullary { pred: p, goal: false },
                }
            }
            "card" => FeatureKind::Card(self.concept()?),
            "dist" => {
                let from = self.concept()?;
                self.expect(Tok::Comma)?;
                let role = self.role()?;
                self.expect(Tok::Comma)?;
                let restrict = self.concept()?;
                self.expect(Tok::Comma)?;
                let to = self.concept()?;
                FeatureKind::Dist { from, role, restrict, to }
            }
            other => return Err(self.err(format!("unknown feature kind '{other}'"))),
        };
        self.expect(Tok::Close)?;
        Ok(kind)
    }
}

fn parser(text: &str) -> Result<Parser<'_>, FeatureError> {
    Ok(Parser { text, toks: tokenize(text)?, pos: 0 })
}

pub fn parse_concept(text: &str) -> Result<Concept, FeatureError> {
    let mut p = parser(text)?;
    let c = p.concept()?;
    p.finish()?;
    Ok(c)
}

pub fn parse_role(text: &str) -> Result<Role, FeatureError> {
    let mut p = parser(text)?;
    let r = p.role()?;
    p.finish()?;
    Ok(r)
}

/// Parses the expression part of a feature; `boolean` is supplied separately
/// since it is not part of the print form.
pub fn parse_feature(text: &str, boolean: bool) -> Result<Feature, FeatureError> {
    let mut p = parser(text)?;
    let kind = p.feature()?;
    p.finish()?;
    let boolean = match kind {
        FeatureKind::Nullary { .. } => true,
        FeatureKind::Dist { .. } => false,
        FeatureKind::Card(_) => boolean,
    };
    Ok(Feature { kind, boolean })
}
