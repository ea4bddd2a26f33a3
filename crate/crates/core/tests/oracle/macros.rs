//! A small token-level interpreter for the plain-style reference macros.
//!
//! The macro bodies below are transcribed token for token and run with
//! TeX's rules for tokenizing, delimited parameters, grouping, `\aftergroup`,
//! conditionals and `\unskip`. Fonts are ignored; ties come out as spaces.

use std::collections::{HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Char(char),
    Space,
    Begin,
    End,
    Param(u8),
    Tie,
    Cs(String),
}

fn is_letter(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

/// Tokenizes with the catcodes in force around these macros (`_` is a
/// letter, `~` is active).
pub fn tokenize(src: &str) -> Vec<Tok> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    // 0: mid-line, 1: skipping blanks, 2: new line
    let mut state = 2;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\\' => {
                i += 1;
                let start = i;
                if i < chars.len() && is_letter(chars[i]) {
                    while i < chars.len() && is_letter(chars[i]) {
                        i += 1;
                    }
                    out.push(Tok::Cs(chars[start..i].iter().collect()));
                    state = 1;
                } else {
                    let sym = chars.get(i).copied().unwrap_or(' ');
                    i += 1;
                    out.push(Tok::Cs(sym.to_string()));
                    state = if sym == ' ' { 1 } else { 0 };
                }
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                i += 1;
                state = 2;
                continue;
            }
            '\n' => {
                if state == 0 {
                    out.push(Tok::Space);
                }
                state = 2;
            }
            ' ' | '\t' => {
                if state == 0 {
                    out.push(Tok::Space);
                    state = 1;
                }
            }
            '{' => {
                out.push(Tok::Begin);
                state = 0;
            }
            '}' => {
                out.push(Tok::End);
                state = 0;
            }
            '#' => {
                i += 1;
                let d = chars[i].to_digit(10).expect("parameter digit") as u8;
                out.push(Tok::Param(d));
                state = 0;
            }
            '~' => {
                out.push(Tok::Tie);
                state = 0;
            }
            _ => {
                out.push(Tok::Char(c));
                state = 0;
            }
        }
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Meaning {
    Macro { params: Vec<Tok>, body: Vec<Tok> },
    Primitive(&'static str),
    Token(Tok),
}

const PRIMITIVES: &[&str] = &[
    "def",
    "let",
    "ifx",
    "if",
    "else",
    "fi",
    "expandafter",
    "aftergroup",
    "unskip",
    "errmessage",
    "sl",
    "bf",
    "rm",
    "/",
];

/// Plain-style macro bodies, transcribed. Names built from `\ref_item` are
/// spelled out as the fields they define.
const MACROS: &[(&str, &str, &str)] = &[
    ("empty", "", ""),
    (
        "_opt",
        "#1#2",
        "\\ifx#1\\undefined\\else{\\def\\__{#1\\unskip}#2}\\fi",
    ),
    (
        "opt_pages",
        "#1",
        "\\ifx\\the_pages\\undefined\\else{\\let\\__\\_pages#1}\\fi",
    ),
    (
        "_pages",
        "",
        "\\expandafter\\pp_range\\the_pages\\unskip---_",
    ),
    (
        "pp_range",
        "#1-#2#3-#4_",
        "#1\\ifx _#4_\\else\\if -#2--#3\\else --#2#3\\fi\\fi",
    ),
    ("do_amount", "", "{\\aftergroup\\do_pp\\aftergroup}"),
    ("do_pp", "", "~pp"),
    (
        "expl_pp",
        "",
        "\\def\\range_{pp.~}\\let\\amount_=\\do_amount",
    ),
    (
        "impl_pp",
        "",
        "\\let\\range_\\empty\\let\\amount_=\\do_amount",
    ),
    ("q_plur", "#1", "\\expandafter\\q_s#1,_"),
    ("q_s", "#1,#2_", "\\ifx _#2_\\else s\\fi"),
    ("format_author", "#1", "{\\rm#1}"),
    (
        "format_report",
        "",
        "{\\sl \\the_title\\unskip}, \\the_report\\unskip\\expl_pp\\opt_pages{, \\__}%
 \\_opt\\the_year{, (\\__)}",
    ),
    (
        "format_book",
        "",
        "{\\sl\\the_title\\unskip},\\expl_pp\\opt_pages{ \\__,}%
 \\_opt\\the_series{ \\__\\_opt\\the_ed{ (\\__, ed\\q_plur\\the_ed.)}%
 \\_opt\\the_vol{ \\__}\\_opt\\the_idno{, \\__},} \\the_publ\\unskip,
 \\the_year\\unskip\\_opt\\the_ISBN{, ISBN \\__}",
    ),
    (
        "format_article",
        "",
        "``\\the_title\\unskip'', {\\sl\\the_journal\\unskip\\_opt\\the_vol{\\/ \\bf\\__}}%
 \\_opt\\the_idno{, \\__}\\_opt\\the_year{, (\\__)}\\impl_pp\\opt_pages{, \\__}",
    ),
    (
        "format_proceedings",
        "",
        "``\\the_title\\unskip'',\\expl_pp\\opt_pages{ \\__} in {\\sl\\the_inbook\\unskip}%
 \\_opt\\the_ed{ (\\__, ed\\q_plur\\the_ed.)},
 \\_opt\\the_series{\\__\\_opt\\the_vol{ \\__}\\_opt\\the_idno{, \\__}, }%
 \\_opt\\the_publ{\\__, }\\the_year",
    ),
];

/// The body of an entry after the `[mark]` box, up to `\endgraf`.
const ENTRY: &str = "\\format_author{\\the_author\\unskip},
 \\ifx\\the_inbook\\undefined
   \\ifx\\the_journal\\undefined
     \\ifx\\the_publ\\undefined
       \\ifx\\the_report\\undefined
         \\errmessage{Unrecognised reference}%
       \\else \\format_report \\fi
     \\else \\format_book \\fi
   \\else \\format_article \\fi
 \\else\\format_proceedings \\fi
 \\unskip \\_opt\\the_endnote{. \\__}.";

struct Group {
    saved: HashMap<String, Meaning>,
    after: Vec<Tok>,
}

pub struct Machine {
    meanings: HashMap<String, Meaning>,
    input: VecDeque<Tok>,
    groups: Vec<Group>,
    /// Depth of the conditionals currently being executed.
    conds: usize,
    out: String,
    errors: Vec<String>,
    steps: usize,
}

impl Machine {
    fn new() -> Self {
        let mut meanings = HashMap::new();
        for &p in PRIMITIVES {
            meanings.insert(p.to_string(), Meaning::Primitive(p));
        }
        for &(name, params, body) in MACROS {
            meanings.insert(
                name.to_string(),
                Meaning::Macro {
                    params: tokenize(params),
                    body: tokenize(body),
                },
            );
        }
        // Outside `\expl_pp`/`\impl_pp` the markers stand for themselves.
        meanings.insert(
            "range_".to_string(),
            Meaning::Token(Tok::Cs("range_".into())),
        );
        meanings.insert(
            "amount_".to_string(),
            Meaning::Token(Tok::Cs("amount_".into())),
        );
        Machine {
            meanings,
            input: VecDeque::new(),
            groups: Vec::new(),
            conds: 0,
            out: String::new(),
            errors: Vec::new(),
            steps: 0,
        }
    }

    fn define(&mut self, name: &str, meaning: Option<Meaning>) {
        let old = self.meanings.get(name).cloned();
        if let Some(g) = self.groups.last_mut() {
            if !g.saved.contains_key(name) {
                g.saved.insert(
                    name.to_string(),
                    old.unwrap_or(Meaning::Primitive("undefined")),
                );
            }
        }
        match meaning {
            Some(m) => {
                self.meanings.insert(name.to_string(), m);
            }
            None => {
                self.meanings.remove(name);
            }
        }
    }

    fn next(&mut self) -> Option<Tok> {
        self.steps += 1;
        assert!(self.steps < 1_000_000, "runaway expansion");
        self.input.pop_front()
    }

    fn push_front(&mut self, toks: Vec<Tok>) {
        for t in toks.into_iter().rev() {
            self.input.push_front(t);
        }
    }

    fn meaning_of(&self, tok: &Tok) -> Option<Meaning> {
        match tok {
            Tok::Cs(name) => self.meanings.get(name).cloned().and_then(|m| match m {
                Meaning::Primitive("undefined") => None,
                other => Some(other),
            }),
            other => Some(Meaning::Token(other.clone())),
        }
    }

    fn is_expandable(&self, tok: &Tok) -> bool {
        match self.meaning_of(tok) {
            Some(Meaning::Macro { .. }) => true,
            Some(Meaning::Primitive(p)) => {
                matches!(p, "ifx" | "if" | "else" | "fi" | "expandafter")
            }
            _ => false,
        }
    }

    /// Reads one undelimited argument: a token or a braced group, after
    /// skipping spaces.
    fn undelimited(&mut self) -> Vec<Tok> {
        loop {
            match self.next().expect("argument") {
                Tok::Space => continue,
                Tok::Begin => return self.balanced(),
                t => return vec![t],
            }
        }
    }

    /// Tokens up to the matching `End` (consumed, not returned).
    fn balanced(&mut self) -> Vec<Tok> {
        let mut depth = 0;
        let mut out = Vec::new();
        loop {
            let t = self.next().expect("unbalanced group");
            match t {
                Tok::Begin => depth += 1,
                Tok::End if depth == 0 => return out,
                Tok::End => depth -= 1,
                _ => {}
            }
            out.push(t);
        }
    }

    fn delimited(&mut self, delim: &[Tok]) -> Vec<Tok> {
        let mut out: Vec<Tok> = Vec::new();
        let mut depth = 0;
        loop {
            if depth == 0 && out.ends_with(delim) {
                out.truncate(out.len() - delim.len());
                break;
            }
            let t = self.next().expect("delimiter not found");
            match t {
                Tok::Begin => depth += 1,
                Tok::End => depth -= 1,
                _ => {}
            }
            out.push(t);
        }
        if out.first() == Some(&Tok::Begin) && out.last() == Some(&Tok::End) {
            let inner = &out[1..out.len() - 1];
            let mut d = 0;
            let closes_early = inner.iter().any(|t| {
                match t {
                    Tok::Begin => d += 1,
                    Tok::End => d -= 1,
                    _ => {}
                }
                d < 0
            });
            if !closes_early {
                return inner.to_vec();
            }
        }
        out
    }

    fn expand_macro(&mut self, params: &[Tok], body: &[Tok]) {
        let mut args: Vec<Vec<Tok>> = Vec::new();
        let mut i = 0;
        // Leading literal tokens must match the input exactly.
        while i < params.len() && !matches!(params[i], Tok::Param(_)) {
            let t = self.next().expect("macro prefix");
            assert_eq!(t, params[i], "use does not match definition");
            i += 1;
        }
        while i < params.len() {
            i += 1;
            let start = i;
            while i < params.len() && !matches!(params[i], Tok::Param(_)) {
                i += 1;
            }
            let delim = &params[start..i];
            let arg = if delim.is_empty() {
                self.undelimited()
            } else {
                self.delimited(delim)
            };
            args.push(arg);
        }
        let mut out = Vec::new();
        for t in body {
            match t {
                Tok::Param(n) => out.extend(args[*n as usize - 1].iter().cloned()),
                other => out.push(other.clone()),
            }
        }
        self.push_front(out);
    }

    /// Skips the untaken branch. Stops after `\else` (when `stop_at_else`)
    /// or after the matching `\fi`.
    fn skip_branch(&mut self, stop_at_else: bool) -> bool {
        let mut depth = 0;
        loop {
            let t = self.next().expect("unterminated conditional");
            if let Tok::Cs(name) = &t {
                match self.meaning_of(&t) {
                    Some(Meaning::Primitive("ifx" | "if")) => depth += 1,
                    Some(Meaning::Primitive("fi")) => {
                        if depth == 0 {
                            return false;
                        }
                        depth -= 1;
                    }
                    Some(Meaning::Primitive("else")) if depth == 0 && stop_at_else => {
                        return true;
                    }
                    _ => {
                        let _ = name;
                    }
                }
            }
        }
    }

    fn conditional(&mut self, truth: bool) {
        if truth || self.skip_branch(true) {
            self.conds += 1;
        }
    }

    /// Expands until an unexpandable token arrives.
    fn next_unexpandable(&mut self) -> Tok {
        loop {
            let t = self.next().expect("token");
            if self.is_expandable(&t) {
                self.expand(t);
            } else {
                return t;
            }
        }
    }

    fn char_code(&self, tok: &Tok) -> Option<char> {
        match tok {
            Tok::Char(c) => Some(*c),
            Tok::Space => Some(' '),
            Tok::Begin => Some('{'),
            Tok::End => Some('}'),
            Tok::Cs(_) => match self.meaning_of(tok) {
                Some(Meaning::Token(Tok::Char(c))) => Some(c),
                _ => None,
            },
            _ => None,
        }
    }

    fn expand(&mut self, t: Tok) {
        match self.meaning_of(&t) {
            Some(Meaning::Macro { params, body }) => self.expand_macro(&params, &body),
            Some(Meaning::Primitive("ifx")) => {
                let a = self.next().expect("ifx operand");
                let b = self.next().expect("ifx operand");
                let truth = self.meaning_of(&a) == self.meaning_of(&b);
                self.conditional(truth);
            }
            Some(Meaning::Primitive("if")) => {
                let a = self.next_unexpandable();
                let b = self.next_unexpandable();
                let truth = self.char_code(&a) == self.char_code(&b);
                self.conditional(truth);
            }
            Some(Meaning::Primitive("else")) => {
                assert!(self.conds > 0, "extra \\else");
                self.skip_branch(false);
                self.conds -= 1;
            }
            Some(Meaning::Primitive("fi")) => {
                assert!(self.conds > 0, "extra \\fi");
                self.conds -= 1;
            }
            Some(Meaning::Primitive("expandafter")) => {
                let first = self.next().expect("expandafter");
                let second = self.next().expect("expandafter");
                if self.is_expandable(&second) {
                    self.expand(second);
                } else {
                    self.input.push_front(second);
                }
                self.input.push_front(first);
            }
            _ => unreachable!("not expandable"),
        }
    }

    fn cs_name(&mut self) -> String {
        match self.next() {
            Some(Tok::Cs(name)) => name,
            other => panic!("expected a control sequence, got {other:?}"),
        }
    }

    fn unskip(&mut self) {
        if self.out.ends_with(' ') || self.out.ends_with('\u{a0}') {
            self.out.pop();
        }
    }

    fn run(&mut self) {
        while let Some(t) = self.next() {
            if self.is_expandable(&t) {
                self.expand(t);
                continue;
            }
            match t {
                Tok::Begin => self.groups.push(Group {
                    saved: HashMap::new(),
                    after: Vec::new(),
                }),
                Tok::End => {
                    let g = self.groups.pop().expect("too many }");
                    for (name, old) in g.saved {
                        match old {
                            Meaning::Primitive("undefined") => {
                                self.meanings.remove(&name);
                            }
                            m => {
                                self.meanings.insert(name, m);
                            }
                        }
                    }
                    self.push_front(g.after);
                }
                Tok::Space => self.out.push(' '),
                Tok::Tie => self.out.push('\u{a0}'),
                Tok::Char(c) => self.out.push(c),
                Tok::Param(_) => panic!("parameter outside a macro"),
                Tok::Cs(ref name) => match self.meaning_of(&t) {
                    Some(Meaning::Primitive(p)) => self.primitive(p),
                    Some(Meaning::Token(Tok::Cs(_))) => {
                        panic!("marker \\{name} reached the output")
                    }
                    Some(Meaning::Token(tok)) => self.input.push_front(tok),
                    _ => panic!("undefined control sequence \\{name}"),
                },
            }
        }
    }

    fn primitive(&mut self, p: &str) {
        match p {
            "def" => {
                let name = self.cs_name();
                let mut params = Vec::new();
                loop {
                    match self.next().expect("def body") {
                        Tok::Begin => break,
                        t => params.push(t),
                    }
                }
                let body = self.balanced();
                self.define(&name, Some(Meaning::Macro { params, body }));
            }
            "let" => {
                let name = self.cs_name();
                let mut target = self.next().expect("let target");
                if target == Tok::Char('=') {
                    target = self.next().expect("let target");
                    if target == Tok::Space {
                        target = self.next().expect("let target");
                    }
                }
                let meaning = self.meaning_of(&target);
                self.define(&name, meaning);
            }
            "aftergroup" => {
                let t = self.next().expect("aftergroup token");
                self.groups
                    .last_mut()
                    .expect("aftergroup outside a group")
                    .after
                    .push(t);
            }
            "unskip" => self.unskip(),
            "errmessage" => {
                let msg = self.undelimited();
                let text = msg
                    .iter()
                    .map(|t| match t {
                        Tok::Char(c) => c.to_string(),
                        Tok::Space => " ".to_string(),
                        _ => String::new(),
                    })
                    .collect();
                self.errors.push(text);
            }
            "sl" | "bf" | "rm" | "/" => {}
            other => panic!("primitive \\{other} used unexpectedly"),
        }
    }
}

/// Field values as they would be captured by the field macros.
pub type Fields = Vec<(String, String)>;

/// Runs the plain-style entry macros on one record. `pages` values start
/// with `range:` or `amount:`. Returns the typeset text with ties as plain
/// spaces, or the error messages raised.
pub fn typeset(fields: &Fields) -> Result<String, Vec<String>> {
    let mut m = Machine::new();
    for (name, value) in fields {
        let body = if name == "pages" {
            let (marker, raw) = value.split_once(':').expect("pages form");
            let mut b = vec![Tok::Cs(format!("{marker}_"))];
            b.extend(tokenize(raw));
            b
        } else {
            tokenize(value)
        };
        m.meanings.insert(
            format!("the_{name}"),
            Meaning::Macro {
                params: Vec::new(),
                body,
            },
        );
    }
    m.input = tokenize(ENTRY).into();
    m.groups.push(Group {
        saved: HashMap::new(),
        after: Vec::new(),
    });
    m.run();
    if !m.errors.is_empty() {
        return Err(m.errors);
    }
    // `\endgraf` drops the last glue.
    m.unskip();
    Ok(m.out.replace('\u{a0}', " "))
}
