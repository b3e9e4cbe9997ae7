//! The 30-class implicit motive × self-regulatory level label space.

use core::fmt;
use core::str::FromStr;

/// Number of distinct labels (5 motives × 6 levels).
pub const LABEL_COUNT: usize = Motive::COUNT * Level::COUNT;

/// Implicit motive, in flat-index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Motive {
    /// No identifiable motive (`0`).
    Zero,
    /// Affiliation (`A`).
    Affiliation,
    /// Freedom (`F`).
    Freedom,
    /// Achievement (`L`, from the German "Leistung").
    Achievement,
    /// Power (`M`, from the German "Macht").
    Power,
}

impl Motive {
    pub const COUNT: usize = 5;
    pub const ALL: [Motive; Motive::COUNT] = [
        Motive::Zero,
        Motive::Affiliation,
        Motive::Freedom,
        Motive::Achievement,
        Motive::Power,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Single-character code used in data files.
    pub fn code(self) -> char {
        match self {
            Motive::Zero => '0',
            Motive::Affiliation => 'A',
            Motive::Freedom => 'F',
            Motive::Achievement => 'L',
            Motive::Power => 'M',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            '0' => Some(Motive::Zero),
            'A' | 'a' => Some(Motive::Affiliation),
            'F' | 'f' => Some(Motive::Freedom),
            'L' | 'l' => Some(Motive::Achievement),
            'M' | 'm' => Some(Motive::Power),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Motive::Zero => "zero",
            Motive::Affiliation => "affiliation",
            Motive::Freedom => "freedom",
            Motive::Achievement => "achievement",
            Motive::Power => "power",
        }
    }
}

/// Self-regulatory level, 0 through 5. Level 4 is the sensitivity for
/// negative incentives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(u8);

impl Level {
    pub const COUNT: usize = 6;

    pub fn new(level: u8) -> Option<Self> {
        (usize::from(level) < Self::COUNT).then_some(Level(level))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Level> {
        (0..Self::COUNT as u8).map(Level)
    }
}

/// A (motive, level) pair. Flat index is `motive * 6 + level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub motive: Motive,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("unknown motive code {0:?}")]
    Motive(char),
    #[error("level out of range: {0:?}")]
    Level(alloc::string::String),
    #[error("malformed label {0:?}")]
    Malformed(alloc::string::String),
}

impl Label {
    /// The zero-motive fallback `(0, 0)`.
    pub const ZERO: Label = Label {
        motive: Motive::Zero,
        level: Level(0),
    };

    pub fn new(motive: Motive, level: Level) -> Self {
        Label { motive, level }
    }

    pub fn index(self) -> usize {
        self.motive.index() * Level::COUNT + usize::from(self.level.0)
    }

    pub fn from_index(i: usize) -> Option<Self> {
        let motive = Motive::from_index(i / Level::COUNT)?;
        Some(Label {
            motive,
            level: Level((i % Level::COUNT) as u8),
        })
    }

    /// All labels in flat-index order.
    pub fn all() -> impl Iterator<Item = Label> {
        (0..LABEL_COUNT).map(|i| Label::from_index(i).unwrap())
    }

    /// Parses separate motive and level columns, e.g. `("M", "4")`.
    pub fn from_parts(motive: &str, level: &str) -> Result<Self, LabelError> {
        let mut chars = motive.trim().chars();
        let m = match (chars.next(), chars.next()) {
            (Some(c), None) => Motive::from_code(c).ok_or(LabelError::Motive(c))?,
            _ => return Err(LabelError::Malformed(motive.into())),
        };
        let level_str = level.trim();
        let l = level_str
            .parse::<u8>()
            .ok()
            .and_then(Level::new)
            .ok_or_else(|| LabelError::Level(level_str.into()))?;
        Ok(Label::new(m, l))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.motive.code(), self.level.0)
    }
}

impl FromStr for Label {
    type Err = LabelError;

    /// Parses the compact form, e.g. `M4` or `00`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.chars().next() {
            Some(m) if s.len() == m.len_utf8() + 1 => {
                Label::from_parts(&s[..m.len_utf8()], &s[m.len_utf8()..])
            }
            _ => Err(LabelError::Malformed(s.into())),
        }
    }
}
