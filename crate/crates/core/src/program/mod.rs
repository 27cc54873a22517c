//! Frames, programs and the `.scp` text format.
//!
//! A [`Program`] is a rectangular lattice of sites plus an ordered list of
//! [`Frame`]s. Every frame assigns one [`Directive`] (command and optional
//! boundary id) to every site. Frames marked `repeating` are replicated by
//! [`Program::expand`].

mod parse;
mod lifecycle;
mod plan;
mod validate;
mod write;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use parse::{parse_program, Diagnostic, ParseError};
pub use lifecycle::{lifecycle, matching_basis, End, Start, StabRound};
pub use plan::{RoundPlan, SwapMove};
pub use validate::validate_program;
pub use write::write_program;

/// Lattice coordinates. `i` is the row (north is smaller `i`), `j` the column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: u32,
    pub j: u32,
}

impl Site {
    pub const fn new(i: u32, j: u32) -> Self {
        Site { i, j }
    }

    pub fn kind(self) -> SiteKind {
        site_kind(self.i, self.j)
    }

    pub fn step(self, dir: Direction) -> Option<Site> {
        let (di, dj) = dir.offset();
        Some(Site { i: self.i.checked_add_signed(di)?, j: self.j.checked_add_signed(dj)? })
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NestKind {
    Primal,
    Dual,
}

impl NestKind {
    pub const BOTH: [NestKind; 2] = [NestKind::Primal, NestKind::Dual];

    pub fn name(self) -> &'static str {
        match self {
            NestKind::Primal => "primal",
            NestKind::Dual => "dual",
        }
    }
}

impl fmt::Display for NestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NestKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "primal" => Ok(NestKind::Primal),
            "dual" => Ok(NestKind::Dual),
            _ => Err(format!("unknown nest kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Data,
    /// Measures an X-type stabilizer with a `|+⟩` ancilla.
    Primal,
    /// Measures a Z-type stabilizer with a `|0⟩` ancilla.
    Dual,
}

impl SiteKind {
    pub fn nest(self) -> Option<NestKind> {
        match self {
            SiteKind::Data => None,
            SiteKind::Primal => Some(NestKind::Primal),
            SiteKind::Dual => Some(NestKind::Dual),
        }
    }
}

/// `i + j` odd is data; otherwise `i` odd is primal and `i` even is dual.
pub fn site_kind(i: u32, j: u32) -> SiteKind {
    if (i + j) % 2 == 1 {
        SiteKind::Data
    } else if i % 2 == 1 {
        SiteKind::Primal
    } else {
        SiteKind::Dual
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    N,
    W,
    E,
    S,
}

impl Direction {
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::N => (-1, 0),
            Direction::W => (0, -1),
            Direction::E => (0, 1),
            Direction::S => (1, 0),
        }
    }

    fn from_char(c: char) -> Option<Direction> {
        match c {
            'N' => Some(Direction::N),
            'W' => Some(Direction::W),
            'E' => Some(Direction::E),
            'S' => Some(Direction::S),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Direction::N => 'N',
            Direction::W => 'W',
            Direction::E => 'E',
            Direction::S => 'S',
        }
    }
}

/// Order in which every stabilizer visits its four neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Schedule(pub [Direction; 4]);

impl Default for Schedule {
    fn default() -> Self {
        Schedule([Direction::N, Direction::W, Direction::E, Direction::S])
    }
}

impl FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let dirs: Vec<_> = s.chars().map(Direction::from_char).collect::<Option<_>>().ok_or_else(|| format!("bad schedule `{s}`"))?;
        let mut seen = dirs.clone();
        seen.sort();
        seen.dedup();
        if dirs.len() != 4 || seen.len() != 4 {
            return Err(format!("schedule `{s}` must be a permutation of NWES"));
        }
        Ok(Schedule([dirs[0], dirs[1], dirs[2], dirs[3]]))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|d| write!(f, "{}", d.as_char()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Diagonal {
    NW,
    NE,
    SW,
    SE,
}

impl Diagonal {
    /// The syndrome site used as the swap channel.
    pub fn channel(self) -> Direction {
        match self {
            Diagonal::NW | Diagonal::NE => Direction::N,
            Diagonal::SW | Diagonal::SE => Direction::S,
        }
    }

    /// Second leg, taken from the channel to the destination.
    pub fn turn(self) -> Direction {
        match self {
            Diagonal::NW | Diagonal::SW => Direction::W,
            Diagonal::NE | Diagonal::SE => Direction::E,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Active,
    Inactive,
    AddX,
    AddZ,
    TrimX,
    TrimZ,
    Had,
    Swap(Diagonal),
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Active,
        Command::Inactive,
        Command::AddX,
        Command::AddZ,
        Command::TrimX,
        Command::TrimZ,
        Command::Had,
        Command::Swap(Diagonal::NW),
        Command::Swap(Diagonal::NE),
        Command::Swap(Diagonal::SW),
        Command::Swap(Diagonal::SE),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Active => "ACTIVE",
            Command::Inactive => "INACTIVE",
            Command::AddX => "ADD_X",
            Command::AddZ => "ADD_Z",
            Command::TrimX => "TRIM_X",
            Command::TrimZ => "TRIM_Z",
            Command::Had => "HAD",
            Command::Swap(Diagonal::NW) => "SWAP_NW",
            Command::Swap(Diagonal::NE) => "SWAP_NE",
            Command::Swap(Diagonal::SW) => "SWAP_SW",
            Command::Swap(Diagonal::SE) => "SWAP_SE",
        }
    }

    /// Allowed on syndrome sites.
    pub fn is_syndrome_command(self) -> bool {
        matches!(self, Command::Active | Command::Inactive)
    }

    pub fn add_basis(self) -> Option<crate::pauli_core::Basis> {
        use crate::pauli_core::Basis;
        match self {
            Command::AddX => Some(Basis::X),
            Command::AddZ => Some(Basis::Z),
            _ => None,
        }
    }

    pub fn trim_basis(self) -> Option<crate::pauli_core::Basis> {
        use crate::pauli_core::Basis;
        match self {
            Command::TrimX => Some(Basis::X),
            Command::TrimZ => Some(Basis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

/// Index into [`Program::boundaries`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryId(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extent {
    Spatial,
    Temporal,
    Spatiotemporal,
}

impl Extent {
    pub fn name(self) -> &'static str {
        match self {
            Extent::Spatial => "spatial",
            Extent::Temporal => "temporal",
            Extent::Spatiotemporal => "spatiotemporal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Boundary {
    pub name: String,
    pub nest: NestKind,
    pub extent: Extent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FailurePair {
    pub nest: NestKind,
    pub a: BoundaryId,
    pub b: BoundaryId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Directive {
    pub command: Command,
    pub boundary: Option<BoundaryId>,
}

impl Directive {
    pub const INACTIVE: Directive = Directive { command: Command::Inactive, boundary: None };
    pub const ACTIVE: Directive = Directive { command: Command::Active, boundary: None };
}

#[derive(Clone, Debug, Eq)]
pub struct Frame {
    pub repeating: bool,
    /// Row-major, one per lattice site.
    pub cells: Vec<Directive>,
    /// 1-based source line of the `frame` header, 0 if built in code.
    pub line: u32,
    /// Source line of each explicit directive, 0 for defaulted sites.
    pub cell_lines: Vec<u32>,
}

impl PartialEq for Frame {
    /// Source positions are not part of a frame's identity.
    fn eq(&self, other: &Self) -> bool {
        self.repeating == other.repeating && self.cells == other.cells
    }
}

/// The logical gate a program claims to implement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    Identity,
    Hadamard,
}

impl GateName {
    pub fn name(self) -> &'static str {
        match self {
            GateName::Identity => "identity",
            GateName::Hadamard => "hadamard",
        }
    }
}

impl FromStr for GateName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(GateName::Identity),
            "hadamard" => Ok(GateName::Hadamard),
            _ => Err(format!("unknown gate `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epoch {
    Initial,
    Final,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicalKind {
    XL,
    ZL,
}

impl LogicalKind {
    pub fn letter(self) -> crate::pauli_core::Letter {
        match self {
            LogicalKind::XL => crate::pauli_core::Letter::X,
            LogicalKind::ZL => crate::pauli_core::Letter::Z,
        }
    }
}

/// A logical operator chain: `letter` of `kind` on every listed data site.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogicalChain {
    pub epoch: Epoch,
    pub kind: LogicalKind,
    pub sites: Vec<Site>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub rows: u32,
    pub cols: u32,
    pub schedule: Option<Schedule>,
    pub boundaries: Vec<Boundary>,
    pub failure_pairs: Vec<FailurePair>,
    pub frames: Vec<Frame>,
    pub gate: Option<GateName>,
    pub logicals: Vec<LogicalChain>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("rounds per repeat must be at least 1")]
    ZeroRounds,
}

impl Program {
    pub fn num_sites(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    pub fn index(&self, s: Site) -> usize {
        (s.i * self.cols + s.j) as usize
    }

    pub fn site(&self, index: usize) -> Site {
        Site::new(index as u32 / self.cols, index as u32 % self.cols)
    }

    pub fn contains(&self, s: Site) -> bool {
        s.i < self.rows && s.j < self.cols
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.num_sites()).map(|k| self.site(k))
    }

    /// In-lattice neighbor.
    pub fn neighbor(&self, s: Site, dir: Direction) -> Option<Site> {
        s.step(dir).filter(|n| self.contains(*n))
    }

    pub fn boundary(&self, name: &str) -> Option<BoundaryId> {
        self.boundaries.iter().position(|b| b.name == name).map(|k| BoundaryId(k as u16))
    }

    pub fn boundary_info(&self, id: BoundaryId) -> &Boundary {
        &self.boundaries[id.0 as usize]
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule.unwrap_or_default()
    }

    /// Frame indices after replicating every repeating frame `rounds` times.
    pub fn expand(&self, rounds: u32) -> Result<Vec<usize>, ExpandError> {
        if rounds == 0 {
            return Err(ExpandError::ZeroRounds);
        }
        let mut out = Vec::new();
        for (k, f) in self.frames.iter().enumerate() {
            let n = if f.repeating { rounds } else { 1 };
            out.extend(std::iter::repeat_n(k, n as usize));
        }
        Ok(out)
    }

    /// `2·ceil(d/2)` with `d` the larger lattice dimension: enough rounds that
    /// time-like chains are never shorter than space-like ones.
    pub fn default_rounds(&self) -> u32 {
        2 * self.rows.max(self.cols).div_ceil(2)
    }

    /// Whether `site` holds quantum information after `frame` given whether
    /// it did before. Drives the default directive of the next frame.
    pub(crate) fn live_after(&self, frame: &Frame) -> Vec<bool> {
        let mut live: Vec<bool> = frame
            .cells
            .iter()
            .enumerate()
            .map(|(k, d)| match (self.site(k).kind(), d.command) {
                (SiteKind::Data, Command::Active | Command::AddX | Command::AddZ | Command::Had) => true,
                (SiteKind::Data, _) => false,
                (_, c) => c == Command::Active,
            })
            .collect();
        for (k, d) in frame.cells.iter().enumerate() {
            if let Command::Swap(diag) = d.command {
                let dest = self.neighbor(self.site(k), diag.channel()).and_then(|c| self.neighbor(c, diag.turn()));
                if let Some(dest) = dest {
                    live[self.index(dest)] = true;
                }
            }
        }
        live
    }

    /// Default directives for a frame following `prev` (or the first frame).
    pub(crate) fn default_cells(&self, prev: Option<&Frame>) -> Vec<Directive> {
        match prev {
            None => vec![Directive::INACTIVE; self.num_sites()],
            Some(f) => self.live_after(f).into_iter().map(|l| if l { Directive::ACTIVE } else { Directive::INACTIVE }).collect(),
        }
    }

    pub fn directive(&self, frame: usize, s: Site) -> Directive {
        self.frames[frame].cells[self.index(s)]
    }

    pub fn logical(&self, epoch: Epoch, kind: LogicalKind) -> Option<&LogicalChain> {
        self.logicals.iter().find(|l| l.epoch == epoch && l.kind == kind)
    }
}

/// The bundled distance-3 plate memory program.
pub const D3_PLATE: &str = include_str!("../../programs/d3_plate.scp");

/// The bundled distance-3 logical Hadamard program.
pub const D3_HADAMARD: &str = include_str!("../../programs/d3_hadamard.scp");
