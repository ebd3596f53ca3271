//! Task environments and their episode drivers.
//!
//! Gridworld maps load from an ASCII format: a `width height` header line,
//! then `height` rows of `width` characters each, with `#` wall, `.` empty,
//! `g`/`y` green/yellow victim, `S` agent start, `F` fire spawn region, and
//! `1`/`2`/`3` equipment or landmark ids.

pub mod binary;
pub mod coopnav;
pub mod fireman;
pub mod insider;
pub mod minimap;

use std::fmt;

use crate::key::ActionId;

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvStep {
    /// Reward for this step (collective in multi-agent tasks).
    pub reward: f64,
    /// Whether this step triggers delayed credit assignment.
    pub delayed: bool,
    /// Whether the episode is over (goal reached or step limit hit).
    pub done: bool,
}

/// Decision made at one timestep by one agent, recorded when tracing.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub t: u64,
    pub agent: u32,
    pub action: ActionId,
    pub blended: Vec<(ActionId, f64)>,
}

/// Per-run counter state. The global timestep advances once per environment
/// step for the whole run and never resets at episode boundaries.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub t: u64,
}

impl RunContext {
    pub fn new() -> Self {
        Self { t: 1 }
    }
}

impl Default for RunContext {
    fn default() -> Self {
        Self::new()
    }
}

pub const LEFT: ActionId = 0;
pub const RIGHT: ActionId = 1;
pub const UP: ActionId = 2;
pub const DOWN: ActionId = 3;
pub const GRID_ACTIONS: [ActionId; 4] = [LEFT, RIGHT, UP, DOWN];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub x: usize,
    pub y: usize,
}

impl Pos {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    /// Target cell of a move, or `None` when it leaves the grid.
    pub fn moved(self, action: ActionId, width: usize, height: usize) -> Option<Pos> {
        let (x, y) = (self.x, self.y);
        let target = match action {
            LEFT => (x.checked_sub(1)?, y),
            RIGHT => (x + 1, y),
            UP => (x, y.checked_sub(1)?),
            DOWN => (x, y + 1),
            other => panic!("unknown grid action {other}"),
        };
        (target.0 < width && target.1 < height).then(|| Pos::new(target.0, target.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Wall,
    GreenVictim,
    YellowVictim,
    Start,
    FireSpawn,
    /// Equipment or landmark id (1..=3), interpreted per task.
    Item(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
}

impl GridMap {
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(MapError::MissingHeader)?;
        let mut parts = header.split_whitespace();
        let width: usize = parts
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| MapError::BadHeader(header.to_string()))?;
        let height: usize = parts
            .next()
            .and_then(|h| h.parse().ok())
            .ok_or_else(|| MapError::BadHeader(header.to_string()))?;
        if width == 0 || height == 0 || parts.next().is_some() {
            return Err(MapError::BadHeader(header.to_string()));
        }
        let mut cells = Vec::with_capacity(width * height);
        let mut rows = 0;
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if line.chars().count() != width {
                return Err(MapError::WrongRowWidth { row, expected: width });
            }
            for (col, ch) in line.chars().enumerate() {
                cells.push(match ch {
                    '#' => Cell::Wall,
                    '.' => Cell::Empty,
                    'g' => Cell::GreenVictim,
                    'y' => Cell::YellowVictim,
                    'S' => Cell::Start,
                    'F' => Cell::FireSpawn,
                    '1'..='3' => Cell::Item(ch as u8 - b'0'),
                    other => return Err(MapError::BadChar { ch: other, row, col }),
                });
            }
            rows += 1;
        }
        if rows != height {
            return Err(MapError::WrongRowCount { expected: height, found: rows });
        }
        Ok(Self { width, height, cells })
    }

    pub fn cell(&self, pos: Pos) -> Cell {
        self.cells[pos.y * self.width + pos.x]
    }

    /// Positions matching a predicate, in row-major order.
    pub fn positions_where(&self, mut pred: impl FnMut(Cell) -> bool) -> Vec<Pos> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let p = Pos::new(x, y);
                if pred(self.cell(p)) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapError {
    MissingHeader,
    BadHeader(String),
    WrongRowWidth { row: usize, expected: usize },
    WrongRowCount { expected: usize, found: usize },
    BadChar { ch: char, row: usize, col: usize },
    Validation(String),
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapError::MissingHeader => write!(f, "map file is empty"),
            MapError::BadHeader(h) => write!(f, "bad map header {h:?}, expected \"width height\""),
            MapError::WrongRowWidth { row, expected } => {
                write!(f, "map row {row} is not {expected} characters wide")
            }
            MapError::WrongRowCount { expected, found } => {
                write!(f, "map has {found} rows, header says {expected}")
            }
            MapError::BadChar { ch, row, col } => {
                write!(f, "unknown map character {ch:?} at row {row}, column {col}")
            }
            MapError::Validation(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for MapError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_small_map() {
        let map = GridMap::parse("3 2\n#g#\n.S.\n").unwrap();
        assert_eq!(map.cell(Pos::new(1, 0)), Cell::GreenVictim);
        assert_eq!(map.cell(Pos::new(1, 1)), Cell::Start);
        assert_eq!(map.positions_where(|c| c == Cell::Wall).len(), 2);
    }

    #[test]
    fn rejects_malformed_maps() {
        assert_eq!(GridMap::parse(""), Err(MapError::MissingHeader));
        assert!(matches!(GridMap::parse("3\n...\n"), Err(MapError::BadHeader(_))));
        assert!(matches!(
            GridMap::parse("3 1\n..\n"),
            Err(MapError::WrongRowWidth { .. })
        ));
        assert!(matches!(
            GridMap::parse("2 2\n..\n"),
            Err(MapError::WrongRowCount { .. })
        ));
        assert!(matches!(
            GridMap::parse("2 1\n.x\n"),
            Err(MapError::BadChar { ch: 'x', .. })
        ));
    }

    #[test]
    fn moves_respect_bounds() {
        let p = Pos::new(0, 0);
        assert_eq!(p.moved(LEFT, 3, 3), None);
        assert_eq!(p.moved(UP, 3, 3), None);
        assert_eq!(p.moved(RIGHT, 3, 3), Some(Pos::new(1, 0)));
        assert_eq!(p.moved(DOWN, 3, 3), Some(Pos::new(0, 1)));
        assert_eq!(Pos::new(2, 2).moved(RIGHT, 3, 3), None);
    }
}
