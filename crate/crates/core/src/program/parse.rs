use std::collections::HashMap;
use std::fmt;

use super::*;

/// A located parse or validation message. `line` and `column` are 1-based;
/// 0 means the message has no single source position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: u32, column: u32, message: impl Into<String>) -> Self {
        Diagnostic { line, column, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (0, _) => write!(f, "{}", self.message),
            (l, 0) => write!(f, "{l}: {}", self.message),
            (l, c) => write!(f, "{l}:{c}: {}", self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError(pub Vec<Diagnostic>);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    col: u32,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(k),
            (true, Some(s)) => {
                let col = line[..s].chars().count() as u32 + 1;
                out.push(Tok { col, text: &line[s..k] });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct RawDirective {
    line: u32,
    site: Site,
    command: Command,
    boundary: Option<(String, u32)>,
}

struct RawFrame {
    line: u32,
    repeating: bool,
    directives: Vec<RawDirective>,
}

struct RawPair {
    line: u32,
    nest: NestKind,
    a: NameAt,
    b: NameAt,
}

struct NameAt {
    col: u32,
    name: String,
}

struct Parser {
    diags: Vec<Diagnostic>,
    lattice: Option<(u32, u32)>,
    schedule: Option<Schedule>,
    boundaries: Vec<Boundary>,
    pairs: Vec<RawPair>,
    frames: Vec<RawFrame>,
    open: Option<RawFrame>,
    gate: Option<GateName>,
    logicals: Vec<LogicalChain>,
}

impl Parser {
    fn err(&mut self, line: u32, col: u32, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(line, col, msg));
    }

    fn number(&mut self, line: u32, t: Option<Tok>, what: &str) -> Option<u32> {
        match t {
            None => {
                self.err(line, 0, format!("missing {what}"));
                None
            }
            Some(t) => match t.text.parse() {
                Ok(v) => Some(v),
                Err(_) => {
                    self.err(line, t.col, format!("expected {what}, found `{}`", t.text));
                    None
                }
            },
        }
    }

    fn site(&mut self, line: u32, i: Option<Tok>, j: Option<Tok>) -> Option<Site> {
        let col = i.map_or(0, |t| t.col);
        let (i, j) = (self.number(line, i, "row")?, self.number(line, j, "column")?);
        match self.lattice {
            None => {
                self.err(line, col, "site given before `lattice`");
                None
            }
            Some((r, c)) if i >= r || j >= c => {
                self.err(line, col, format!("site ({i},{j}) outside the {r}x{c} lattice"));
                None
            }
            Some(_) => Some(Site::new(i, j)),
        }
    }

    fn expect_end(&mut self, line: u32, toks: &[Tok], n: usize) {
        if let Some(t) = toks.get(n) {
            self.err(line, t.col, format!("unexpected `{}`", t.text));
        }
    }

    fn statement(&mut self, line: u32, toks: &[Tok]) {
        let head = toks[0];
        if self.open.is_some() && !matches!(head.text, "q" | "end") {
            self.err(line, head.col, format!("`{}` not allowed inside a frame", head.text));
            return;
        }
        match head.text {
            "lattice" => {
                if self.lattice.is_some() {
                    self.err(line, head.col, "duplicate `lattice`");
                }
                if !self.frames.is_empty() {
                    self.err(line, head.col, "`lattice` must precede all frames");
                }
                let r = self.number(line, toks.get(1).copied(), "row count");
                let c = self.number(line, toks.get(2).copied(), "column count");
                if let (Some(r), Some(c)) = (r, c) {
                    if r == 0 || c == 0 {
                        self.err(line, toks[1].col, "lattice dimensions must be positive");
                    } else {
                        self.lattice = Some((r, c));
                    }
                }
                self.expect_end(line, toks, 3);
            }
            "schedule" => match toks.get(1) {
                None => self.err(line, 0, "missing schedule"),
                Some(t) => match t.text.parse() {
                    Ok(s) => self.schedule = Some(s),
                    Err(e) => self.err(line, t.col, e),
                },
            },
            "boundary" => {
                if toks.len() < 4 {
                    self.err(line, 0, "expected `boundary <id> <primal|dual> <spatial|temporal|spatiotemporal>`");
                    return;
                }
                let name = toks[1].text.to_string();
                let nest = toks[2].text.parse::<NestKind>();
                let extent = match toks[3].text {
                    "spatial" => Some(Extent::Spatial),
                    "temporal" => Some(Extent::Temporal),
                    "spatiotemporal" => Some(Extent::Spatiotemporal),
                    _ => None,
                };
                if self.boundaries.iter().any(|b| b.name == name) {
                    self.err(line, toks[1].col, format!("duplicate boundary id `{name}`"));
                }
                match (nest, extent) {
                    (Err(e), _) => self.err(line, toks[2].col, e),
                    (_, None) => self.err(line, toks[3].col, format!("unknown extent `{}`", toks[3].text)),
                    (Ok(nest), Some(extent)) => self.boundaries.push(Boundary { name, nest, extent }),
                }
                self.expect_end(line, toks, 4);
            }
            "failure_pair" => {
                if toks.len() < 4 {
                    self.err(line, 0, "expected `failure_pair <primal|dual> <id> <id>`");
                    return;
                }
                match toks[1].text.parse::<NestKind>() {
                    Err(e) => self.err(line, toks[1].col, e),
                    Ok(nest) => self.pairs.push(RawPair {
                        line,
                        nest,
                        a: NameAt { col: toks[2].col, name: toks[2].text.into() },
                        b: NameAt { col: toks[3].col, name: toks[3].text.into() },
                    }),
                }
                self.expect_end(line, toks, 4);
            }
            "gate" => match toks.get(1).map(|t| (t, t.text.parse::<GateName>())) {
                None => self.err(line, 0, "missing gate name"),
                Some((t, Err(e))) => self.err(line, t.col, e),
                Some((_, Ok(g))) => self.gate = Some(g),
            },
            "logical" => self.logical(line, toks),
            "frame" => {
                let repeating = match toks.get(1).map(|t| t.text) {
                    None => false,
                    Some("repeating") => true,
                    Some(other) => {
                        self.err(line, toks[1].col, format!("expected `repeating`, found `{other}`"));
                        false
                    }
                };
                self.expect_end(line, toks, 2);
                self.open = Some(RawFrame { line, repeating, directives: Vec::new() });
            }
            "end" => match self.open.take() {
                Some(f) => self.frames.push(f),
                None => self.err(line, head.col, "`end` without `frame`"),
            },
            "q" => self.directive(line, toks),
            other => self.err(line, head.col, format!("unknown keyword `{other}`")),
        }
    }

    fn logical(&mut self, line: u32, toks: &[Tok]) {
        let epoch = match toks.get(1).map(|t| t.text) {
            Some("initial") => Epoch::Initial,
            Some("final") => Epoch::Final,
            _ => {
                self.err(line, toks.get(1).map_or(0, |t| t.col), "expected `initial` or `final`");
                return;
            }
        };
        let kind = match toks.get(2).map(|t| t.text) {
            Some("X_L") => LogicalKind::XL,
            Some("Z_L") => LogicalKind::ZL,
            _ => {
                self.err(line, toks.get(2).map_or(0, |t| t.col), "expected `X_L` or `Z_L`");
                return;
            }
        };
        let mut sites = Vec::new();
        let mut rest = &toks[3..];
        while !rest.is_empty() {
            if rest[0].text != "q" || rest.len() < 3 {
                self.err(line, rest[0].col, "expected `q <i> <j>`");
                return;
            }
            let Some(s) = self.site(line, Some(rest[1]), Some(rest[2])) else { return };
            if s.kind() != SiteKind::Data {
                self.err(line, rest[1].col, format!("logical operator on non-data site {s}"));
            }
            sites.push(s);
            rest = &rest[3..];
        }
        if sites.is_empty() {
            self.err(line, 0, "logical operator with empty support");
        }
        if self.logicals.iter().any(|l| l.epoch == epoch && l.kind == kind) {
            self.err(line, toks[1].col, "duplicate logical operator");
        }
        self.logicals.push(LogicalChain { epoch, kind, sites });
    }

    fn directive(&mut self, line: u32, toks: &[Tok]) {
        if self.open.is_none() {
            self.err(line, toks[0].col, "`q` outside a frame");
            return;
        }
        let Some(site) = self.site(line, toks.get(1).copied(), toks.get(2).copied()) else { return };
        let Some(ct) = toks.get(3) else {
            self.err(line, 0, "missing command");
            return;
        };
        let Ok(command) = ct.text.parse::<Command>() else {
            self.err(line, ct.col, format!("unknown command `{}`", ct.text));
            return;
        };
        if site.kind() != SiteKind::Data && !command.is_syndrome_command() {
            self.err(line, ct.col, format!("data command on syndrome site {site}"));
            return;
        }
        let mut boundary = None;
        if let Some(bt) = toks.get(4) {
            match bt.text.strip_prefix("boundary=") {
                Some(name) if !name.is_empty() => boundary = Some((name.to_string(), bt.col)),
                _ => self.err(line, bt.col, format!("expected `boundary=<id>`, found `{}`", bt.text)),
            }
        }
        self.expect_end(line, toks, 5);
        let frame = self.open.as_mut().expect("checked above");
        if frame.directives.iter().any(|d| d.site == site) {
            self.diags.push(Diagnostic::new(line, toks[1].col, format!("duplicate directive for site {site}")));
            return;
        }
        frame.directives.push(RawDirective { line, site, command, boundary });
    }
}

/// Parses the `.scp` text format. All problems found are reported together.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser {
        diags: Vec::new(),
        lattice: None,
        schedule: None,
        boundaries: Vec::new(),
        pairs: Vec::new(),
        frames: Vec::new(),
        open: None,
        gate: None,
        logicals: Vec::new(),
    };
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k as u32 + 1;
        last_line = line;
        let toks = tokenize(raw.strip_suffix('\r').unwrap_or(raw));
        if !toks.is_empty() {
            p.statement(line, &toks);
        }
    }
    if let Some(f) = p.open.take() {
        p.err(f.line, 1, "frame is missing `end`");
    }
    let Some((rows, cols)) = p.lattice else {
        p.err(last_line.max(1), 0, if p.frames.is_empty() { "no frames" } else { "missing `lattice`" });
        return Err(ParseError(p.diags));
    };
    if p.frames.is_empty() {
        p.err(last_line.max(1), 0, "no frames");
    }

    let ids: HashMap<String, BoundaryId> =
        p.boundaries.iter().enumerate().map(|(k, b)| (b.name.clone(), BoundaryId(k as u16))).collect();
    let mut failure_pairs = Vec::new();
    for pair in std::mem::take(&mut p.pairs) {
        let mut resolve = |t: &NameAt| {
            let id = ids.get(&t.name).copied();
            if id.is_none() {
                p.diags.push(Diagnostic::new(pair.line, t.col, format!("unknown boundary id `{}`", t.name)));
            }
            id
        };
        if let (Some(a), Some(b)) = (resolve(&pair.a), resolve(&pair.b)) {
            failure_pairs.push(FailurePair { nest: pair.nest, a, b });
        }
    }

    let mut program = Program {
        rows,
        cols,
        schedule: p.schedule,
        boundaries: p.boundaries.clone(),
        failure_pairs,
        frames: Vec::new(),
        gate: p.gate,
        logicals: std::mem::take(&mut p.logicals),
    };
    for raw in std::mem::take(&mut p.frames) {
        let mut cells = program.default_cells(program.frames.last());
        let mut cell_lines = vec![0; cells.len()];
        for d in raw.directives {
            let boundary = match d.boundary {
                None => None,
                Some((name, col)) => match ids.get(&name) {
                    Some(id) => Some(*id),
                    None => {
                        p.err(d.line, col, format!("unknown boundary id `{name}`"));
                        None
                    }
                },
            };
            let k = program.index(d.site);
            cells[k] = Directive { command: d.command, boundary };
            cell_lines[k] = d.line;
        }
        program.frames.push(Frame { repeating: raw.repeating, cells, line: raw.line, cell_lines });
    }
    if p.diags.is_empty() {
        Ok(program)
    } else {
        Err(ParseError(p.diags))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(text: &str) -> Diagnostic {
        parse_program(text).unwrap_err().0.remove(0)
    }

    #[test]
    fn empty_file() {
        assert_eq!(first("").message, "no frames");
        assert_eq!(first("# nothing\n\n").message, "no frames");
        assert_eq!(first("lattice 3 3\n").message, "no frames");
    }

    #[test]
    fn data_command_on_syndrome_site() {
        let d = first("lattice 3 3\nframe\nq 1 1 ADD_X\nend\n");
        assert_eq!((d.line, d.column), (3, 7));
        assert_eq!(d.message, "data command on syndrome site (1,1)");
    }

    #[test]
    fn located_errors() {
        let d = first("lattice 3 3\nframe\n  q 0 1 FOO\nend\n");
        assert_eq!((d.line, d.column), (3, 9));
        let d = first("lattice 3 3\nframe\nq 5 1 ACTIVE\nend\n");
        assert_eq!((d.line, d.column), (3, 3));
        let d = first("lattice 3 3\nframe\nq 0 1 ACTIVE boundary=nope\nend\n");
        assert_eq!((d.line, d.column, d.message.as_str()), (3, 14, "unknown boundary id `nope`"));
        let d = first("lattice 3 3\nframe\nq 0 1 ACTIVE\nq 0 1 ADD_Z\nend\n");
        assert!(d.message.starts_with("duplicate directive"));
    }

    #[test]
    fn defaults_follow_liveness() {
        let text = "lattice 3 3\r\nframe\r\nq 0 1 ADD_Z\r\nq 1 0 TRIM_X\r\nq 0 0 ACTIVE\r\nend\r\nframe repeating # comment\r\nend\r\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.frames.len(), 2);
        let f = &p.frames[1];
        assert!(f.repeating);
        assert_eq!(f.cells[p.index(Site::new(0, 1))].command, Command::Active);
        assert_eq!(f.cells[p.index(Site::new(1, 0))].command, Command::Inactive);
        assert_eq!(f.cells[p.index(Site::new(0, 0))].command, Command::Active);
        assert_eq!(f.cells[p.index(Site::new(2, 2))].command, Command::Inactive);
    }
}
